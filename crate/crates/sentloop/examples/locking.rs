//! Sentiment locking: when reward asymmetry pins a community at +1.
//!
//! A community with high persistence and a strong positive-engagement
//! reward (alpha 0.9, beta 0.6, no penalty, a = 1, b = 0) has no interior
//! equilibrium: the self-consistency condition alpha + k + c >= 1 holds at
//! the +1 boundary, so sentiment saturates and stays there. Cutting the
//! reward shows the same community settling at a moderate interior value
//! instead.
//!
//! Run with: `cargo run --example locking`

use sentloop::dynamics::{
    interior_equilibrium, simulate, DerivedLoop, EquilibriumKind, LoopParams, STABILITY_TOL,
};

fn steps_until_locked(states: &[f64]) -> Option<usize> {
    let first = states.iter().position(|s| *s == 1.0)?;
    states[first..].iter().all(|s| *s == 1.0).then_some(first)
}

fn main() {
    let locking = LoopParams::new(0.9, 0.6, 0.0, 1.0, 0.0).expect("valid parameters");
    let derived = DerivedLoop::from_params(&locking);
    println!(
        "echo-chamber parameters: alpha 0.9, beta 0.6, gamma 0, a 1, b 0  (k {:.2}, c {:.2})",
        derived.k, derived.c
    );
    println!(
        "boundary condition alpha + k + c = {:.2} >= 1, so +1 is self-sustaining",
        locking.alpha() + derived.k + derived.c
    );

    let equilibrium = interior_equilibrium(locking.alpha(), &derived);
    match &equilibrium.kind {
        EquilibriumKind::Boundary(side) => println!(
            "equilibrium: boundary {side:+} (stable: {})",
            equilibrium.stable
        ),
        other => panic!("expected a boundary equilibrium, got {other:?}"),
    }
    if let Some(note) = &equilibrium.note {
        println!("note: {note}");
    }

    let trace = simulate(&locking, 0.5, 0.5, 1_000, STABILITY_TOL).expect("simulation");
    let locked_at = steps_until_locked(&trace.states).expect("trajectory should lock");
    println!(
        "starting from mildly positive sentiment (0.5, 0.5), the loop hits +1 at step \
         {locked_at} and never leaves"
    );

    println!("\napproach to the ceiling:");
    for (i, s) in trace.states.iter().enumerate().take(locked_at + 2) {
        println!("  step {i:>2}: {s:.6}");
    }

    // Same community, positive reward cut from 0.6 to 0.05.
    let tempered = LoopParams::new(0.9, 0.05, 0.0, 1.0, 0.0).expect("valid parameters");
    let tempered_derived = DerivedLoop::from_params(&tempered);
    let tempered_eq = interior_equilibrium(tempered.alpha(), &tempered_derived);
    let trace = simulate(&tempered, 0.5, 0.5, 100_000, 1e-12).expect("simulation");
    match (&tempered_eq.kind, trace.terminal) {
        (EquilibriumKind::Interior(s_star), sentloop::dynamics::Terminal::Converged(value)) => {
            println!(
                "\nwith beta cut to 0.05 the interior equilibrium returns: S* = {s_star:.4}, \
                 simulation settles at {value:.4}"
            );
        }
        other => panic!("expected interior equilibrium and convergence, got {other:?}"),
    }
    println!("the lock is a property of the reward structure, not of the starting mood");
}
