//! Border-collision cycles under strongly negative delayed feedback.
//!
//! When the delayed gain k is pushed well below -1, the unclipped
//! recurrence diverges, but saturation folds the trajectory back into
//! the band and a periodic orbit appears. This example produces a
//! period-4 orbit, confirms the built-in tail scan finds it, and shows
//! that a convergent run reports no cycle at all.
//!
//! Run with: `cargo run --example cycles`

use sentloop::dynamics::{detect_cycle, simulate, DerivedLoop, LoopParams, Terminal};

fn main() {
    // beta 0, gamma 2.4 with unit capacities gives k = -1.2, c = 1.2: the
    // community punishes negativity so hard that sentiment overshoots.
    let params = LoopParams::new(0.0, 0.0, 2.4, 1.0, 1.0).expect("valid parameters");
    let derived = DerivedLoop::from_params(&params);
    println!(
        "strong negative feedback: k {:.2}, c {:.2} (spectral radius {:.3})",
        derived.k,
        derived.c,
        sentloop::dynamics::spectral_radius(params.alpha(), derived.k)
    );

    let trace = simulate(&params, 0.0, 0.0, 400, 1e-9).expect("simulation");
    let period = match trace.terminal {
        Terminal::Cycle(p) => p,
        other => panic!("expected a periodic orbit, got {other:?}"),
    };
    println!("simulation ended in a period-{period} orbit");

    let orbit = &trace.states[trace.states.len() - period..];
    println!("one full turn of the orbit:");
    for (i, s) in orbit.iter().enumerate() {
        println!("  phase {i}: {s:+.6}");
    }
    println!(
        "{} of {} states were produced by clipping",
        trace.saturation_events.len(),
        trace.states.len()
    );

    // The detector itself is usable on any state sequence.
    let found = detect_cycle(&trace.states, 32, 1e-7).expect("cycle should be detectable");
    println!(
        "tail scan confirms minimal period {} with orbit {:?}",
        found.period, found.states
    );

    // A convergent loop must report no cycle: a fixed point is not a
    // period-1 orbit in this vocabulary.
    let calm = LoopParams::new(0.5, 0.2, -0.1, 1.0, 1.0).expect("valid parameters");
    let calm_trace = simulate(&calm, 0.0, 0.0, 10_000, 1e-12).expect("simulation");
    match calm_trace.terminal {
        Terminal::Converged(value) => {
            println!("\ncontrast: a calm loop converges to {value:.6}");
        }
        other => panic!("expected convergence, got {other:?}"),
    }
    assert!(
        detect_cycle(&calm_trace.states, 16, 1e-7).is_none(),
        "a settled trajectory must not be reported as periodic"
    );
    println!("and the tail scan correctly reports no periodic orbit for it");
}
