//! Command-line surface: argument definitions and the command bodies.
//!
//! Every command reads inputs, computes through the library modules, and
//! writes its artifacts into an output location given by flags. Data
//! outputs (CSV/JSON) are byte-identical across reruns with the same
//! inputs and seed; SVG outputs are identical up to the generator version
//! string they embed. Exit codes are a stable contract: 0 success,
//! 1 usage error, 2 data error, 3 numeric or degenerate error.

use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};

use crate::cohort;
use crate::dynamics::{
    characteristic_roots, classify_stability, close_loop_from_fit, interior_equilibrium, simulate,
    stability_diagram, DerivedLoop, DiagramMode, EquilibriumKind, LoopParams, SimulationTrace,
    Terminal, STABILITY_TOL,
};
use crate::error::Error;
use crate::ingest::{self, DayInterval, ParseOptions};
use crate::regression::{build_design, fit_and_diagnose, FitOptions, FitResult, PredictionRow};
use crate::report::{self, CycleJson, EquilibriumDocument, EquilibriumJson, FitDocument, RootJson};
use crate::series::{build_series, Granularity, SeriesOptions, Subject};
use crate::svg;
use crate::synth::{self, SynthConfig};
use crate::util::{fmt_f64, median};
use crate::Result;

/// Analyze sentiment feedback loops in labeled tweet corpora.
#[derive(Debug, Parser)]
#[command(name = "sentloop", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the one-step sentiment model on a corpus and write fit files.
    Fit(FitArgs),
    /// Fit every sufficiently active author and standardize feedback scores.
    Cohort(CohortArgs),
    /// Simulate the closed sentiment loop and classify its long-run behavior.
    Simulate(SimulateArgs),
    /// Classify closed-loop stability over a grid of (alpha, k) cells.
    StabilityMap(StabilityMapArgs),
    /// Generate a synthetic corpus whose daily aggregates follow known dynamics.
    Synth(SynthArgs),
    /// Assemble prior run outputs into one self-contained HTML report.
    Report(ReportArgs),
}

/// Aggregation bucket width.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BucketArg {
    Day,
    Week,
}

impl From<BucketArg> for Granularity {
    fn from(value: BucketArg) -> Granularity {
        match value {
            BucketArg::Day => Granularity::Day,
            BucketArg::Week => Granularity::Week,
        }
    }
}

/// How stability-map cells are classified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Analytic,
    Simulated,
}

impl From<ModeArg> for DiagramMode {
    fn from(value: ModeArg) -> DiagramMode {
        match value {
            ModeArg::Analytic => DiagramMode::Analytic,
            ModeArg::Simulated => DiagramMode::Simulated,
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Corpus CSV path.
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory (created if absent).
    #[arg(long)]
    pub out: PathBuf,
    /// Fraction of usable transitions used for training (chronological split).
    #[arg(long, default_value_t = 0.7)]
    pub train_fraction: f64,
    /// Fit a free intercept alongside the three coefficients.
    #[arg(long, action = ArgAction::SetTrue)]
    pub intercept: bool,
    /// Drop transitions that touch a calendar gap (default). Pass
    /// `--drop-gaps false` to keep them.
    #[arg(
        long,
        action = ArgAction::Set,
        num_args = 0..=1,
        default_value_t = true,
        default_missing_value = "true"
    )]
    pub drop_gaps: bool,
    /// Aggregation bucket.
    #[arg(long, value_enum, default_value = "day")]
    pub bucket: BucketArg,
}

#[derive(Debug, Args)]
pub struct CohortArgs {
    /// Corpus CSV path (must carry party and role columns).
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory (created if absent).
    #[arg(long)]
    pub out: PathBuf,
    /// Minimum fraction of corpus days an author must post on (strict).
    #[arg(long, default_value_t = 0.9)]
    pub activity_threshold: f64,
    /// Minimum usable transitions per author.
    #[arg(long, default_value_t = 30)]
    pub min_obs: usize,
    /// Minimum member count for a party to appear in parties.csv.
    #[arg(long, default_value_t = 100)]
    pub min_group: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Sentiment persistence coefficient (with --beta and --gamma).
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Positive-engagement coefficient.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Negative-engagement coefficient.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Read alpha/beta/gamma (and any intercept) from a prior fit.json
    /// instead of passing them as flags.
    #[arg(long, value_name = "FIT_JSON")]
    pub from_fit: Option<PathBuf>,
    /// Positive engagement capacity (a >= 0).
    #[arg(long)]
    pub a: f64,
    /// Negative engagement capacity (b >= 0).
    #[arg(long)]
    pub b: f64,
    /// First initial state, in [-1, 1].
    #[arg(long, allow_negative_numbers = true)]
    pub s0: f64,
    /// Second initial state, in [-1, 1].
    #[arg(long, allow_negative_numbers = true)]
    pub s1: f64,
    /// Step budget.
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    /// Convergence tolerance on successive differences.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Output directory (created if absent).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StabilityMapArgs {
    /// Alpha axis as `lo:hi`.
    #[arg(long, default_value = "-2:2", allow_hyphen_values = true)]
    pub alpha_range: String,
    /// Feedback-gain axis as `lo:hi`.
    #[arg(long, default_value = "-2:2", allow_hyphen_values = true)]
    pub k_range: String,
    /// Cells per axis.
    #[arg(long, default_value_t = 400)]
    pub resolution: usize,
    /// Classification mode.
    #[arg(long, value_enum, default_value = "analytic")]
    pub mode: ModeArg,
    /// Output directory (created if absent).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// True persistence coefficient.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    /// True positive-engagement coefficient.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: f64,
    /// True negative-engagement coefficient.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Number of authors (even indices party_a/government, odd
    /// party_b/opposition).
    #[arg(long)]
    pub authors: usize,
    /// Number of calendar days.
    #[arg(long)]
    pub days: usize,
    /// Standard deviation of the per-day sentiment noise.
    #[arg(long)]
    pub noise: f64,
    /// RNG seed.
    #[arg(long)]
    pub seed: u64,
    /// Additive beta shift for odd-indexed authors, to build cohorts with
    /// a known between-party feedback difference.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub delta_shift: f64,
    /// Corpus CSV path to write; truth.json lands next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory holding prior run outputs (fit.json, parties.csv,
    /// diagram.csv required; predictions.csv, equilibrium.json, trace.csv
    /// embedded when present).
    #[arg(long)]
    pub from: PathBuf,
    /// HTML file to write.
    #[arg(long)]
    pub out: PathBuf,
}

/// Execute a parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    init_thread_pool()?;
    match &cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Cohort(args) => cmd_cohort(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::StabilityMap(args) => cmd_stability_map(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Report(args) => cmd_report(args),
    }
}

/// Parse an optional `SENTLOOP_THREADS` value into a thread cap.
fn thread_cap(value: Option<&str>) -> Result<Option<usize>> {
    match value {
        None => Ok(None),
        Some(text) => match text.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::InvalidArgument(format!(
                "SENTLOOP_THREADS must be a positive integer, got {text:?}"
            ))),
        },
    }
}

fn init_thread_pool() -> Result<()> {
    let cap = thread_cap(std::env::var("SENTLOOP_THREADS").ok().as_deref())?;
    if let Some(n) = cap {
        // A global pool may already exist (e.g. in tests); the cap is then
        // inert, which only affects speed, never results.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    Ok(())
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, content)?;
    Ok(())
}

fn read_corpus(path: &Path) -> Result<(Vec<crate::ingest::TweetRecord>, ingest::CorpusMeta)> {
    let file = std::fs::File::open(path)?;
    let (records, meta) = ingest::parse_corpus(BufReader::new(file), &ParseOptions::default())?;
    for warning in &meta.warnings {
        eprintln!("warning: {warning}");
    }
    if meta.rejected_count > 0 {
        eprintln!(
            "note: rejected {} of {} rows",
            meta.rejected_count,
            meta.rejected_count + meta.record_count
        );
        for (line, reason) in meta.rejection_log.iter().take(3) {
            eprintln!("  line {line}: {reason}");
        }
        if meta.rejection_log.len() > 3 {
            eprintln!("  ... and {} more", meta.rejection_log.len() - 3);
        }
    }
    Ok((records, meta))
}

fn predictions_csv(rows: &[PredictionRow]) -> String {
    let mut out = String::from("day,actual,predicted,naive\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.day,
            fmt_f64(row.actual),
            fmt_f64(row.predicted),
            fmt_f64(row.naive)
        ));
    }
    out
}

fn cmd_fit(args: &FitArgs) -> Result<()> {
    let (records, _meta) = read_corpus(&args.input)?;
    let options = SeriesOptions {
        granularity: args.bucket.into(),
        ..SeriesOptions::default()
    };
    let series = build_series(&records, &Subject::All, &records, &options)?;
    let design = build_design(&series, args.drop_gaps);
    let output = fit_and_diagnose(
        &design,
        &FitOptions {
            with_intercept: args.intercept,
            train_fraction: args.train_fraction,
        },
    )?;

    std::fs::create_dir_all(&args.out)?;
    let doc = FitDocument::from_output(&output);
    write_file(&args.out.join("fit.json"), &doc.to_json()?)?;
    write_file(&args.out.join("series.csv"), &series.to_csv())?;
    write_file(
        &args.out.join("predictions.csv"),
        &predictions_csv(&output.predictions),
    )?;

    println!(
        "fit: alpha={:.6} beta={:.6} gamma={:.6} n_obs={}",
        output.fit.alpha, output.fit.beta, output.fit.gamma, output.fit.n_obs
    );
    println!(
        "out-of-sample rmse: model={:.6} naive={:.6}",
        output.diagnostics.rmse_model, output.diagnostics.rmse_naive
    );
    println!(
        "wrote fit.json, series.csv, predictions.csv to {}",
        args.out.display()
    );
    Ok(())
}

fn cmd_cohort(args: &CohortArgs) -> Result<()> {
    let (records, meta) = read_corpus(&args.input)?;
    let (start, end) = meta.date_range.ok_or(Error::EmptyInput)?;
    let period = DayInterval::new(start, end)?;
    let active = ingest::filter_active_authors(&records, period, args.activity_threshold)?;
    let (fits, skipped) = cohort::fit_all_individuals(&records, &active, args.min_obs)?;

    let alphas: Vec<f64> = fits.iter().map(|f| f.fit.alpha).collect();
    if !alphas.is_empty() && median(&alphas) <= 0.0 {
        eprintln!(
            "warning: median per-author alpha is not positive; check bucket width and data quality"
        );
    }

    let zreport = cohort::zscores(&fits)?;
    let parties = cohort::aggregate_by_party(&zreport, args.min_group)?;

    std::fs::create_dir_all(&args.out)?;
    write_file(
        &args.out.join("individuals.csv"),
        &cohort::individuals_csv(&zreport),
    )?;
    write_file(
        &args.out.join("parties.csv"),
        &cohort::parties_csv(&parties),
    )?;
    write_file(
        &args.out.join("skipped.csv"),
        &cohort::skipped_csv(&skipped)?,
    )?;
    write_file(
        &args.out.join("zscores.json"),
        &(serde_json::to_string_pretty(&zreport)? + "\n"),
    )?;
    if parties.is_empty() {
        eprintln!(
            "note: no party met --min-group {}; parties.svg not written",
            args.min_group
        );
    } else {
        let bars: Vec<(String, f64)> = parties
            .iter()
            .map(|(party, stats)| (party.clone(), stats.mean_z))
            .collect();
        let chart = svg::bar_chart("Mean feedback z-score by party", "mean z", &bars)?;
        write_file(&args.out.join("parties.svg"), &chart)?;
    }

    println!(
        "cohort: fitted {} authors ({} skipped), {} parties reported",
        zreport.n,
        skipped.len(),
        parties.len()
    );
    println!("wrote cohort files to {}", args.out.display());
    Ok(())
}

fn resolve_loop_params(args: &SimulateArgs) -> Result<(LoopParams, Vec<String>)> {
    match (&args.from_fit, args.alpha, args.beta, args.gamma) {
        (Some(path), None, None, None) => {
            let doc: FitDocument = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            let fit = FitResult {
                alpha: doc.alpha,
                beta: doc.beta,
                gamma: doc.gamma,
                intercept: doc.intercept,
                n_obs: doc.n_obs,
                condition_number: doc.condition_number,
            };
            close_loop_from_fit(&fit, args.a, args.b)
        }
        (None, Some(alpha), Some(beta), Some(gamma)) => Ok((
            LoopParams::new(alpha, beta, gamma, args.a, args.b)?,
            Vec::new(),
        )),
        (Some(_), _, _, _) => Err(Error::InvalidArgument(
            "--from-fit conflicts with explicit --alpha/--beta/--gamma".to_string(),
        )),
        _ => Err(Error::InvalidArgument(
            "provide --alpha, --beta, and --gamma together, or --from-fit".to_string(),
        )),
    }
}

fn equilibrium_document(params: &LoopParams, trace: &SimulationTrace) -> EquilibriumDocument {
    let derived = DerivedLoop::from_params(params);
    let (r1, r2) = characteristic_roots(params.alpha(), derived.k);
    let class = classify_stability(params.alpha(), derived.k, STABILITY_TOL);
    let equilibrium = interior_equilibrium(params.alpha(), &derived);
    let (kind, value) = match equilibrium.kind {
        EquilibriumKind::Interior(v) => ("interior", Some(v)),
        EquilibriumKind::Boundary(side) => ("boundary", Some(side as f64)),
        EquilibriumKind::None => ("none", None),
    };
    let cycle = match trace.terminal {
        Terminal::Cycle(period) => Some(CycleJson {
            period,
            states: trace.states[trace.states.len() - period..].to_vec(),
        }),
        _ => None,
    };
    EquilibriumDocument {
        class: class.as_str().to_string(),
        roots: [
            RootJson {
                re: r1.re,
                im: r1.im,
            },
            RootJson {
                re: r2.re,
                im: r2.im,
            },
        ],
        k: derived.k,
        c: derived.c,
        equilibrium: EquilibriumJson {
            kind: kind.to_string(),
            value,
            stable: equilibrium.stable,
            note: equilibrium.note,
        },
        cycle,
    }
}

fn trace_chart(states: &[f64]) -> Result<String> {
    // Long traces are thinned for the plot only; trace.csv keeps every step.
    let stride = states.len().div_ceil(2048).max(1);
    let mut points: Vec<(f64, f64)> = states
        .iter()
        .enumerate()
        .step_by(stride)
        .map(|(i, s)| (i as f64, *s))
        .collect();
    let last = states.len() - 1;
    if points.last().map(|p| p.0 as usize) != Some(last) {
        points.push((last as f64, states[last]));
    }
    svg::line_chart(
        "Closed-loop sentiment trajectory",
        "step",
        "S",
        &[("S", points.as_slice())],
    )
}

fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let (params, warnings) = resolve_loop_params(args)?;
    for warning in &warnings {
        eprintln!("warning: {warning}");
    }
    let trace = simulate(&params, args.s0, args.s1, args.steps, args.tol)?;
    let doc = equilibrium_document(&params, &trace);

    std::fs::create_dir_all(&args.out)?;
    write_file(&args.out.join("trace.csv"), &trace.to_csv())?;
    write_file(&args.out.join("equilibrium.json"), &doc.to_json()?)?;
    write_file(&args.out.join("trace.svg"), &trace_chart(&trace.states)?)?;

    let terminal = match trace.terminal {
        Terminal::Converged(s) => format!("converged to {s:.6}"),
        Terminal::Cycle(p) => format!("settled into a period-{p} cycle"),
        Terminal::MaxSteps => "ran out of steps".to_string(),
    };
    println!(
        "simulate: class={} k={:.6} c={:.6}; {} after {} states",
        doc.class,
        doc.k,
        doc.c,
        terminal,
        trace.states.len()
    );
    println!(
        "wrote trace.csv, equilibrium.json, trace.svg to {}",
        args.out.display()
    );
    Ok(())
}

/// Parse `lo:hi` into an ordered pair.
fn parse_range(text: &str) -> Result<(f64, f64)> {
    let invalid =
        || Error::InvalidArgument(format!("range must be `lo:hi` with lo < hi, got {text:?}"));
    let (lo, hi) = text.split_once(':').ok_or_else(invalid)?;
    let lo: f64 = lo.trim().parse().map_err(|_| invalid())?;
    let hi: f64 = hi.trim().parse().map_err(|_| invalid())?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(invalid());
    }
    Ok((lo, hi))
}

fn cmd_stability_map(args: &StabilityMapArgs) -> Result<()> {
    let alpha_range = parse_range(&args.alpha_range)?;
    let k_range = parse_range(&args.k_range)?;
    let diagram = stability_diagram(alpha_range, k_range, args.resolution, args.mode.into())?;

    std::fs::create_dir_all(&args.out)?;
    write_file(&args.out.join("diagram.csv"), &diagram.to_csv())?;
    write_file(
        &args.out.join("diagram.svg"),
        &svg::stability_heatmap(&diagram)?,
    )?;

    println!(
        "stability-map: {}x{} cells over alpha {:?} x k {:?}",
        args.resolution, args.resolution, alpha_range, k_range
    );
    println!("wrote diagram.csv, diagram.svg to {}", args.out.display());
    Ok(())
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let config = SynthConfig {
        alpha: args.alpha,
        beta: args.beta,
        gamma: args.gamma,
        authors: args.authors,
        days: args.days,
        noise_std: args.noise,
        seed: args.seed,
        delta_shift: args.delta_shift,
    };
    let output = synth::generate(&config)?;

    write_file(&args.out, &output.csv)?;
    let truth_path = match args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        Some(parent) => parent.join("truth.json"),
        None => PathBuf::from("truth.json"),
    };
    write_file(
        &truth_path,
        &(serde_json::to_string_pretty(&output.truth)? + "\n"),
    )?;

    println!(
        "synth: {} authors x {} days, noise {}, seed {}",
        args.authors, args.days, args.noise, args.seed
    );
    println!(
        "wrote corpus to {} and truth to {}",
        args.out.display(),
        truth_path.display()
    );
    Ok(())
}

fn cmd_report(args: &ReportArgs) -> Result<()> {
    let html = report::build_report(&args.from)?;
    write_file(&args.out, &html)?;
    println!("wrote report to {}", args.out.display());
    Ok(())
}
