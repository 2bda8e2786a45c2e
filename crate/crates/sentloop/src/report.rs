//! Consolidated static HTML report over prior run outputs.
//!
//! The report command reads the data files earlier commands wrote into a
//! run directory and assembles one self-contained HTML page: fit tables,
//! party chart, stability heatmap, and (when present) prediction and
//! simulation sections. This module also owns the JSON document schemas
//! shared between the writing commands and the reader.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cohort::GroupStats;
use crate::dynamics::{StabilityClass, StabilityDiagram};
use crate::error::Error;
use crate::regression::FitOutput;
use crate::svg;
use crate::Result;

/// The `fit.json` document: coefficients and diagnostics, flat, with
/// stable key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDocument {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub intercept: Option<f64>,
    pub n_obs: usize,
    pub condition_number: f64,
    pub pearson: BTreeMap<String, f64>,
    pub vif: BTreeMap<String, f64>,
    pub rmse_model: f64,
    pub rmse_naive: f64,
}

impl FitDocument {
    pub fn from_output(output: &FitOutput) -> Self {
        FitDocument {
            alpha: output.fit.alpha,
            beta: output.fit.beta,
            gamma: output.fit.gamma,
            intercept: output.fit.intercept,
            n_obs: output.fit.n_obs,
            condition_number: output.fit.condition_number,
            pearson: output.diagnostics.pearson.clone(),
            vif: output.diagnostics.vif.clone(),
            rmse_model: output.diagnostics.rmse_model,
            rmse_naive: output.diagnostics.rmse_naive,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// One characteristic root in `equilibrium.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootJson {
    pub re: f64,
    pub im: f64,
}

/// Equilibrium block in `equilibrium.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumJson {
    /// `interior`, `boundary`, or `none`.
    pub kind: String,
    /// Fixed-point value: the interior value, `+1`/`-1` for a boundary
    /// lock, `null` when no equilibrium exists.
    pub value: Option<f64>,
    pub stable: bool,
    pub note: Option<String>,
}

/// Detected cycle block in `equilibrium.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleJson {
    pub period: usize,
    pub states: Vec<f64>,
}

/// The `equilibrium.json` document written by the simulate command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumDocument {
    /// Stability class of the unclipped recurrence.
    pub class: String,
    pub roots: [RootJson; 2],
    pub k: f64,
    pub c: f64,
    pub equilibrium: EquilibriumJson,
    pub cycle: Option<CycleJson>,
}

impl EquilibriumDocument {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Everything the report embeds, loaded from a run directory.
#[derive(Debug, Clone)]
pub struct ReportInputs {
    pub fit: FitDocument,
    pub parties: Vec<(String, GroupStats)>,
    pub diagram: StabilityDiagram,
    pub predictions: Option<Vec<PredictionPoint>>,
    pub equilibrium: Option<EquilibriumDocument>,
    pub trace: Option<Vec<f64>>,
}

/// One parsed row of `predictions.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionPoint {
    pub day: String,
    pub actual: f64,
    pub predicted: f64,
    pub naive: f64,
}

/// Files the report cannot be built without.
pub const REQUIRED_INPUTS: [&str; 3] = ["fit.json", "parties.csv", "diagram.csv"];

/// Load report inputs from a run directory. All of [`REQUIRED_INPUTS`]
/// must exist; the error lists every absent one. `predictions.csv`,
/// `equilibrium.json`, and `trace.csv` are embedded when present.
pub fn load_inputs(dir: &Path) -> Result<ReportInputs> {
    let missing: Vec<String> = REQUIRED_INPUTS
        .iter()
        .filter(|name| !dir.join(name).is_file())
        .map(|name| name.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingInputs(missing));
    }

    let fit: FitDocument = serde_json::from_str(&std::fs::read_to_string(dir.join("fit.json"))?)?;
    let parties = parse_parties_csv(&std::fs::read_to_string(dir.join("parties.csv"))?)?;
    let diagram = parse_diagram_csv(&std::fs::read_to_string(dir.join("diagram.csv"))?)?;

    let predictions = match std::fs::read_to_string(dir.join("predictions.csv")) {
        Ok(text) => Some(parse_predictions_csv(&text)?),
        Err(_) => None,
    };
    let equilibrium = match std::fs::read_to_string(dir.join("equilibrium.json")) {
        Ok(text) => Some(serde_json::from_str(&text)?),
        Err(_) => None,
    };
    let trace = match std::fs::read_to_string(dir.join("trace.csv")) {
        Ok(text) => Some(parse_trace_csv(&text)?),
        Err(_) => None,
    };

    Ok(ReportInputs {
        fit,
        parties,
        diagram,
        predictions,
        equilibrium,
        trace,
    })
}

fn schema_err(file: &str, detail: &str) -> Error {
    Error::Schema(format!("{file}: {detail}"))
}

fn parse_parties_csv(text: &str) -> Result<Vec<(String, GroupStats)>> {
    let mut lines = text.lines();
    match lines.next() {
        Some("party,n,mean_z,median_z,iqr_z") => {}
        other => {
            return Err(schema_err(
                "parties.csv",
                &format!("unexpected header {other:?}"),
            ))
        }
    }
    let mut out = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(schema_err("parties.csv", &format!("bad row {line:?}")));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| schema_err("parties.csv", &format!("bad number {s:?}")))
        };
        let n: usize = fields[1]
            .parse()
            .map_err(|_| schema_err("parties.csv", &format!("bad count {:?}", fields[1])))?;
        out.push((
            fields[0].to_string(),
            GroupStats {
                n,
                mean_z: parse(fields[2])?,
                median_z: parse(fields[3])?,
                iqr_z: parse(fields[4])?,
            },
        ));
    }
    Ok(out)
}

fn parse_diagram_csv(text: &str) -> Result<StabilityDiagram> {
    let mut lines = text.lines();
    match lines.next() {
        Some("alpha,k,class") => {}
        other => {
            return Err(schema_err(
                "diagram.csv",
                &format!("unexpected header {other:?}"),
            ))
        }
    }
    let mut alphas = Vec::new();
    let mut ks = Vec::new();
    let mut classes = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(schema_err("diagram.csv", &format!("bad row {line:?}")));
        }
        let alpha: f64 = fields[0]
            .parse()
            .map_err(|_| schema_err("diagram.csv", &format!("bad alpha {:?}", fields[0])))?;
        let k: f64 = fields[1]
            .parse()
            .map_err(|_| schema_err("diagram.csv", &format!("bad k {:?}", fields[1])))?;
        let class = StabilityClass::parse(fields[2])
            .ok_or_else(|| schema_err("diagram.csv", &format!("unknown class {:?}", fields[2])))?;
        alphas.push(alpha);
        ks.push(k);
        classes.push(class);
    }
    let count = classes.len();
    let resolution = (count as f64).sqrt().round() as usize;
    if resolution == 0 || resolution * resolution != count {
        return Err(schema_err(
            "diagram.csv",
            &format!("{count} cells do not form a square grid"),
        ));
    }
    let range_of = |centers: &[f64]| -> (f64, f64) {
        let first = centers[0];
        let last = centers[centers.len() - 1];
        if centers.len() > 1 {
            let step = (last - first) / (centers.len() - 1) as f64;
            (first - step / 2.0, last + step / 2.0)
        } else {
            (first - 0.5, first + 0.5)
        }
    };
    let alpha_centers: Vec<f64> = alphas[..resolution].to_vec();
    let k_centers: Vec<f64> = (0..resolution).map(|i| ks[i * resolution]).collect();
    StabilityDiagram::from_parts(
        range_of(&alpha_centers),
        range_of(&k_centers),
        resolution,
        classes,
    )
}

fn parse_predictions_csv(text: &str) -> Result<Vec<PredictionPoint>> {
    let mut lines = text.lines();
    match lines.next() {
        Some("day,actual,predicted,naive") => {}
        other => {
            return Err(schema_err(
                "predictions.csv",
                &format!("unexpected header {other:?}"),
            ))
        }
    }
    let mut out = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(schema_err("predictions.csv", &format!("bad row {line:?}")));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| schema_err("predictions.csv", &format!("bad number {s:?}")))
        };
        out.push(PredictionPoint {
            day: fields[0].to_string(),
            actual: parse(fields[1])?,
            predicted: parse(fields[2])?,
            naive: parse(fields[3])?,
        });
    }
    Ok(out)
}

fn parse_trace_csv(text: &str) -> Result<Vec<f64>> {
    let mut lines = text.lines();
    match lines.next() {
        Some("step,S,saturated") => {}
        other => {
            return Err(schema_err(
                "trace.csv",
                &format!("unexpected header {other:?}"),
            ))
        }
    }
    let mut out = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(schema_err("trace.csv", &format!("bad row {line:?}")));
        }
        out.push(
            fields[1]
                .parse()
                .map_err(|_| schema_err("trace.csv", &format!("bad state {:?}", fields[1])))?,
        );
    }
    Ok(out)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn num(value: f64) -> String {
    if value.abs() >= 1e4 || (value != 0.0 && value.abs() < 1e-3) {
        format!("{value:.4e}")
    } else {
        format!("{value:.4}")
    }
}

/// Render the report HTML with an explicit generation timestamp (tests
/// pin it; the command passes the current time).
pub fn render_html(inputs: &ReportInputs, generated_at: &str) -> Result<String> {
    let mut html = String::new();
    html.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    html.push_str(&format!(
        "<meta name=\"generated\" content=\"{}\">\n",
        escape(generated_at)
    ));
    html.push_str("<title>Sentiment feedback report</title>\n<style>\n");
    html.push_str(
        "body{font-family:sans-serif;max-width:60em;margin:2em auto;padding:0 1em;color:#222}\n\
         table{border-collapse:collapse;margin:1em 0}\n\
         th,td{border:1px solid #999;padding:0.3em 0.8em;text-align:right}\n\
         th:first-child,td:first-child{text-align:left}\n\
         h2{border-bottom:2px solid #444;padding-bottom:0.2em;margin-top:2em}\n\
         figure{margin:1em 0}\n",
    );
    html.push_str("</style>\n</head>\n<body>\n<h1>Sentiment feedback report</h1>\n");

    // Model fit.
    let fit = &inputs.fit;
    html.push_str("<h2>Model fit</h2>\n<table>\n<tr><th>quantity</th><th>value</th></tr>\n");
    for (name, value) in [
        ("alpha (S_t)", fit.alpha),
        ("beta (r_pos)", fit.beta),
        ("gamma (r_neg)", fit.gamma),
    ] {
        html.push_str(&format!(
            "<tr><td>{}</td><td>{}</td></tr>\n",
            escape(name),
            num(value)
        ));
    }
    match fit.intercept {
        Some(value) => html.push_str(&format!(
            "<tr><td>intercept</td><td>{}</td></tr>\n",
            num(value)
        )),
        None => html.push_str("<tr><td>intercept</td><td>(not fitted)</td></tr>\n"),
    }
    html.push_str(&format!(
        "<tr><td>observations</td><td>{}</td></tr>\n<tr><td>condition number</td><td>{}</td></tr>\n</table>\n",
        fit.n_obs,
        num(fit.condition_number)
    ));

    html.push_str("<table>\n<tr><th>regressor</th><th>pearson vs target</th><th>VIF</th></tr>\n");
    for (name, r) in &fit.pearson {
        let vif = fit.vif.get(name).copied();
        html.push_str(&format!(
            "<tr><td>{}</td><td>{}</td><td>{}</td></tr>\n",
            escape(name),
            num(*r),
            vif.map_or_else(|| "-".to_string(), num)
        ));
    }
    html.push_str("</table>\n");
    let verdict = if fit.rmse_model < fit.rmse_naive {
        "the model beats the persistence baseline"
    } else {
        "the model does not beat the persistence baseline"
    };
    html.push_str(&format!(
        "<p>Out-of-sample RMSE: model {} vs naive {} ({}).</p>\n",
        num(fit.rmse_model),
        num(fit.rmse_naive),
        verdict
    ));

    if let Some(points) = &inputs.predictions {
        html.push_str("<h2>Out-of-sample predictions</h2>\n");
        if points.is_empty() {
            html.push_str("<p>No prediction rows.</p>\n");
        } else {
            let actual: Vec<(f64, f64)> = points
                .iter()
                .enumerate()
                .map(|(i, p)| (i as f64, p.actual))
                .collect();
            let predicted: Vec<(f64, f64)> = points
                .iter()
                .enumerate()
                .map(|(i, p)| (i as f64, p.predicted))
                .collect();
            let naive: Vec<(f64, f64)> = points
                .iter()
                .enumerate()
                .map(|(i, p)| (i as f64, p.naive))
                .collect();
            let chart = svg::line_chart(
                "Test-window sentiment: actual vs predicted",
                "test day index",
                "daily sentiment",
                &[
                    ("actual", actual.as_slice()),
                    ("predicted", predicted.as_slice()),
                    ("naive", naive.as_slice()),
                ],
            )?;
            html.push_str("<figure>\n");
            html.push_str(&chart);
            html.push_str("</figure>\n");
        }
    }

    // Cohort.
    html.push_str("<h2>Party comparison</h2>\n");
    if inputs.parties.is_empty() {
        html.push_str("<p>No party passed the minimum group size.</p>\n");
    } else {
        html.push_str(
            "<table>\n<tr><th>party</th><th>members</th><th>mean z</th><th>median z</th><th>IQR z</th></tr>\n",
        );
        for (party, stats) in &inputs.parties {
            html.push_str(&format!(
                "<tr><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td></tr>\n",
                escape(party),
                stats.n,
                num(stats.mean_z),
                num(stats.median_z),
                num(stats.iqr_z)
            ));
        }
        html.push_str("</table>\n");
        let bars: Vec<(String, f64)> = inputs
            .parties
            .iter()
            .map(|(party, stats)| (party.clone(), stats.mean_z))
            .collect();
        let chart = svg::bar_chart("Mean feedback z-score by party", "mean z", &bars)?;
        html.push_str("<figure>\n");
        html.push_str(&chart);
        html.push_str("</figure>\n");
    }

    // Stability.
    html.push_str("<h2>Closed-loop stability</h2>\n");
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for class in inputs.diagram.classes() {
        *counts.entry(class.as_str()).or_default() += 1;
    }
    let total = inputs.diagram.classes().len();
    html.push_str("<table>\n<tr><th>class</th><th>cells</th><th>share</th></tr>\n");
    for (name, count) in &counts {
        html.push_str(&format!(
            "<tr><td>{}</td><td>{}</td><td>{:.1}%</td></tr>\n",
            name,
            count,
            100.0 * *count as f64 / total as f64
        ));
    }
    html.push_str("</table>\n<figure>\n");
    html.push_str(&svg::stability_heatmap(&inputs.diagram)?);
    html.push_str("</figure>\n");

    if let Some(doc) = &inputs.equilibrium {
        html.push_str("<h2>Simulation</h2>\n<table>\n<tr><th>quantity</th><th>value</th></tr>\n");
        html.push_str(&format!(
            "<tr><td>stability class</td><td>{}</td></tr>\n",
            escape(&doc.class)
        ));
        html.push_str(&format!(
            "<tr><td>roots</td><td>{} + {}i, {} + {}i</td></tr>\n",
            num(doc.roots[0].re),
            num(doc.roots[0].im),
            num(doc.roots[1].re),
            num(doc.roots[1].im)
        ));
        html.push_str(&format!(
            "<tr><td>k, c</td><td>{}, {}</td></tr>\n",
            num(doc.k),
            num(doc.c)
        ));
        let value = doc.equilibrium.value.map_or_else(|| "-".to_string(), num);
        html.push_str(&format!(
            "<tr><td>equilibrium</td><td>{} at {} ({})</td></tr>\n",
            escape(&doc.equilibrium.kind),
            value,
            if doc.equilibrium.stable {
                "stable"
            } else {
                "not stable"
            }
        ));
        if let Some(cycle) = &doc.cycle {
            html.push_str(&format!(
                "<tr><td>cycle</td><td>period {}</td></tr>\n",
                cycle.period
            ));
        }
        html.push_str("</table>\n");
        if let Some(note) = &doc.equilibrium.note {
            html.push_str(&format!("<p>{}</p>\n", escape(note)));
        }
        if let Some(states) = &inputs.trace {
            if !states.is_empty() {
                let points: Vec<(f64, f64)> = states
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (i as f64, *s))
                    .collect();
                let chart = svg::line_chart(
                    "Simulated closed-loop trajectory",
                    "step",
                    "S",
                    &[("S", points.as_slice())],
                )?;
                html.push_str("<figure>\n");
                html.push_str(&chart);
                html.push_str("</figure>\n");
            }
        }
    }

    html.push_str("</body>\n</html>\n");
    Ok(html)
}

/// Load inputs from `dir` and render with the current UTC time.
pub fn build_report(dir: &Path) -> Result<String> {
    let inputs = load_inputs(dir)?;
    let now = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    render_html(&inputs, &now)
}
