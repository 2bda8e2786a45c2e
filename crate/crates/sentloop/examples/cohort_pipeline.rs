//! Per-author fits, z-scores, and party aggregation on a two-party corpus.
//!
//! Builds a synthetic cohort in which `party_b` authors get a constructed
//! positive shift in their reward asymmetry delta = beta - gamma, runs the
//! full cohort pipeline (activity filter, per-author regression, z-scoring,
//! party aggregation), and prints the resulting tables.
//!
//! Run with: `cargo run --example cohort_pipeline`

use sentloop::cohort::{aggregate_by_party, fit_all_individuals, zscores};
use sentloop::ingest::{filter_active_authors, parse_corpus, DayInterval, ParseOptions};
use sentloop::synth::SynthConfig;

fn main() {
    let mut config = SynthConfig::new(0.4, 0.5, -0.3, 10, 120);
    config.noise_std = 0.02;
    config.seed = 7;
    config.delta_shift = 0.7;

    let generated = sentloop::synth::generate(&config).expect("corpus generation");
    let (records, meta) =
        parse_corpus(generated.csv.as_bytes(), &ParseOptions::default()).expect("parse");
    let (start, end) = meta.date_range.expect("non-empty corpus");
    let interval = DayInterval::new(start, end).expect("valid interval");

    let active = filter_active_authors(&records, interval, 0.9).expect("activity filter");
    println!(
        "{} of {} authors pass the 90% activity threshold",
        active.len(),
        meta.author_count
    );

    let (fits, skipped) = fit_all_individuals(&records, &active, 30).expect("fits");
    println!("fitted {} authors, skipped {}", fits.len(), skipped.len());
    for skip in &skipped {
        println!("  skipped {}: {}", skip.author_id, skip.reason);
    }

    let report = zscores(&fits).expect("z-scores");
    println!(
        "\npopulation moments: mu_delta {:.4}, sigma_delta {:.4} over {} authors",
        report.mu_delta, report.sigma_delta, report.n
    );
    println!("\nper-author reward asymmetry (delta = beta - gamma):");
    println!(
        "{:<12} {:<10} {:>10} {:>8}",
        "author", "party", "delta", "z"
    );
    for entry in &report.authors {
        println!(
            "{:<12} {:<10} {:>10.4} {:>8.3}",
            entry.author_id, entry.party, entry.delta, entry.z
        );
    }

    let parties = aggregate_by_party(&report, 3).expect("aggregation");
    println!("\nparty summary (groups with at least 3 members):");
    println!(
        "{:<10} {:>4} {:>10} {:>10} {:>10}",
        "party", "n", "mean z", "median z", "IQR z"
    );
    for (party, row) in &parties {
        println!(
            "{:<10} {:>4} {:>10.4} {:>10.4} {:>10.4}",
            party, row.n, row.mean_z, row.median_z, row.iqr_z
        );
    }
    println!("\nthe constructed +0.7 delta shift shows up as a higher mean z for party_b");
}
