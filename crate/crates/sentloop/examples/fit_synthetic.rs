//! Recover known feedback coefficients from a synthetic corpus.
//!
//! Generates a one-author corpus whose daily aggregates follow
//! `S_{t+1} = alpha*S_t + beta*r_pos_t + gamma*r_neg_t` with small noise,
//! re-ingests it through the regular CSV parser, fits the model, and
//! compares the estimates against the generator's ground truth.
//!
//! Run with: `cargo run --example fit_synthetic`

use sentloop::ingest::{parse_corpus, ParseOptions};
use sentloop::regression::{build_design, fit_and_diagnose, FitOptions};
use sentloop::series::{build_series, SeriesOptions, Subject};
use sentloop::synth::SynthConfig;

fn main() {
    let mut config = SynthConfig::new(0.4, 0.5, -0.3, 1, 500);
    config.noise_std = 0.01;
    config.seed = 42;

    let generated = sentloop::synth::generate(&config).expect("corpus generation");
    println!(
        "generated {} days of tweets for {} author(s), seed {}",
        config.days, config.authors, config.seed
    );

    let (records, meta) =
        parse_corpus(generated.csv.as_bytes(), &ParseOptions::default()).expect("parse");
    println!(
        "parsed {} records, {} rejected",
        meta.record_count, meta.rejected_count
    );

    let series =
        build_series(&records, &Subject::All, &records, &SeriesOptions::default()).expect("series");
    let design = build_design(&series, true);
    let output = fit_and_diagnose(&design, &FitOptions::default()).expect("fit");

    println!(
        "\n{:<12} {:>12} {:>12} {:>12}",
        "", "true", "fitted", "error"
    );
    for (name, truth, fitted) in [
        ("alpha", config.alpha, output.fit.alpha),
        ("beta", config.beta, output.fit.beta),
        ("gamma", config.gamma, output.fit.gamma),
    ] {
        println!(
            "{name:<12} {truth:>12.6} {fitted:>12.6} {:>12.2e}",
            (fitted - truth).abs()
        );
    }
    println!(
        "\ntraining rows: {}, condition number: {:.2}",
        output.fit.n_obs, output.fit.condition_number
    );

    println!("\nper-regressor diagnostics:");
    for (name, r) in &output.diagnostics.pearson {
        println!(
            "  {name:<6} pearson vs target {r:>8.4}   VIF {:>8.4}",
            output.diagnostics.vif[name]
        );
    }
    println!(
        "\nout-of-sample RMSE: model {:.6} vs persistence baseline {:.6}",
        output.diagnostics.rmse_model, output.diagnostics.rmse_naive
    );
    if output.diagnostics.rmse_model < output.diagnostics.rmse_naive {
        println!("the fitted loop predicts tomorrow better than copying today");
    }
}
