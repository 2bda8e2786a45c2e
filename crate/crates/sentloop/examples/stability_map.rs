//! Map stability classes over the (alpha, k) parameter plane.
//!
//! Sweeps a grid of persistence/delayed-gain pairs, classifies each cell
//! from the characteristic roots, and cross-checks a coarser grid against
//! the purely empirical classifier that just iterates the recurrence.
//! Writes `diagram.csv` and `diagram.svg` for the analytic map.
//!
//! Run with: `cargo run --example stability_map`

use std::collections::BTreeMap;
use std::fs;

use sentloop::dynamics::{stability_diagram, DiagramMode, StabilityClass};
use sentloop::svg::stability_heatmap;

fn main() {
    let alpha_range = (-2.0, 2.0);
    let k_range = (-2.0, 2.0);

    let analytic = stability_diagram(alpha_range, k_range, 80, DiagramMode::Analytic)
        .expect("analytic diagram");
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for class in analytic.classes() {
        *counts.entry(class.as_str()).or_default() += 1;
    }
    println!("analytic 80x80 sweep of alpha, k in [-2, 2]:");
    for (class, n) in &counts {
        let share = 100.0 * *n as f64 / analytic.classes().len() as f64;
        println!("  {class:<24} {n:>5} cells ({share:>5.1}%)");
    }

    // The empirical classifier should agree with the algebra away from
    // the |rho| = 1 boundary, where finite iteration cannot decide.
    let res = 40;
    let analytic_coarse =
        stability_diagram(alpha_range, k_range, res, DiagramMode::Analytic).expect("analytic");
    let simulated =
        stability_diagram(alpha_range, k_range, res, DiagramMode::Simulated).expect("simulated");
    let mut agree = 0usize;
    let mut compared = 0usize;
    for i_k in 0..res {
        for i_alpha in 0..res {
            let alpha = analytic_coarse.alpha_center(i_alpha);
            let k = analytic_coarse.k_center(i_k);
            let rho = sentloop::dynamics::spectral_radius(alpha, k);
            if (rho - 1.0).abs() < 0.02 {
                continue; // too close to the stability boundary to compare
            }
            compared += 1;
            if analytic_coarse.class_at(i_alpha, i_k) == simulated.class_at(i_alpha, i_k) {
                agree += 1;
            }
        }
    }
    println!(
        "\nanalytic vs simulated on {res}x{res}: {agree}/{compared} cells agree ({:.1}%) \
         away from the spectral-radius-1 boundary",
        100.0 * agree as f64 / compared as f64
    );

    let divergent_share = analytic
        .classes()
        .iter()
        .filter(|c| **c == StabilityClass::Divergent)
        .count() as f64
        / analytic.classes().len() as f64;
    println!(
        "{:.0}% of the swept plane is divergent; the convergent wedge sits under alpha + k < 1",
        100.0 * divergent_share
    );

    let out_dir = std::env::temp_dir().join("sentloop-stability-map");
    fs::create_dir_all(&out_dir).expect("output directory");
    fs::write(out_dir.join("diagram.csv"), analytic.to_csv()).expect("write csv");
    fs::write(
        out_dir.join("diagram.svg"),
        stability_heatmap(&analytic).expect("heatmap"),
    )
    .expect("write svg");
    println!(
        "\nwrote diagram.csv and diagram.svg to {}",
        out_dir.display()
    );
}
