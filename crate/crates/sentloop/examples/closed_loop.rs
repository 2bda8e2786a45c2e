//! Close a fitted model into a feedback loop and simulate it.
//!
//! Substitutes the engagement reactions `r_pos = a(1+S)/2` and
//! `r_neg = b(1-S)/2` into the fitted update, reducing the loop to
//! `S_{t+1} = sat(alpha*S_t + k*S_{t-1} + c)`. Derives `(k, c)`, the
//! characteristic roots, the stability class, and the equilibrium, then
//! simulates to confirm the trajectory settles where the algebra says.
//!
//! Run with: `cargo run --example closed_loop`

use sentloop::dynamics::{
    characteristic_roots, classify_stability, interior_equilibrium, simulate, spectral_radius,
    DerivedLoop, EquilibriumKind, LoopParams, Terminal, STABILITY_TOL,
};

fn main() {
    // Coefficients as a fit would produce them, with unit engagement
    // capacities (every follower reacts).
    let params = LoopParams::new(0.5, 0.2, -0.1, 1.0, 1.0).expect("valid parameters");
    let derived = DerivedLoop::from_params(&params);
    println!(
        "alpha {:.3}, beta {:.3}, gamma {:.3}, capacities a {:.1} b {:.1}",
        params.alpha(),
        params.beta(),
        params.gamma(),
        params.a(),
        params.b()
    );
    println!(
        "reduced form: S(t+1) = sat({:.3}*S(t) + {:.3}*S(t-1) + {:.3})",
        params.alpha(),
        derived.k,
        derived.c
    );

    let (r1, r2) = characteristic_roots(params.alpha(), derived.k);
    println!(
        "characteristic roots: {:.4}{:+.4}i and {:.4}{:+.4}i (spectral radius {:.4})",
        r1.re,
        r1.im,
        r2.re,
        r2.im,
        spectral_radius(params.alpha(), derived.k)
    );
    let class = classify_stability(params.alpha(), derived.k, STABILITY_TOL);
    println!("stability class: {}", class.as_str());

    let equilibrium = interior_equilibrium(params.alpha(), &derived);
    let predicted = match equilibrium.kind {
        EquilibriumKind::Interior(s) => {
            println!(
                "predicted interior equilibrium S* = c/(1 - alpha - k) = {s:.6} (stable: {})",
                equilibrium.stable
            );
            s
        }
        ref other => panic!("expected an interior equilibrium, got {other:?}"),
    };

    let trace = simulate(&params, -0.8, 0.9, 10_000, 1e-9).expect("simulation");
    match trace.terminal {
        Terminal::Converged(value) => {
            println!(
                "simulation from (-0.8, 0.9) converged after {} states at S = {value:.6}",
                trace.states.len()
            );
            println!(
                "|simulated - predicted| = {:.2e}",
                (value - predicted).abs()
            );
        }
        other => panic!("expected convergence, got {other:?}"),
    }
    println!(
        "saturation events along the way: {}",
        trace.saturation_events.len()
    );

    println!("\nfirst ten states of the trajectory:");
    for (i, s) in trace.states.iter().take(10).enumerate() {
        println!("  step {i:>2}: {s:>9.6}");
    }
}
