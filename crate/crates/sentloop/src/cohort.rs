//! Per-author model fits and cohort-level standardization.
//!
//! Each active author gets their own feedback fit: sentiment from their
//! own tweets, engagement fractions from the whole corpus (an individual
//! reacts to the global discourse, not only to reactions on their own
//! posts). The per-author net feedback sensitivity `delta = beta - gamma`
//! is then standardized across the cohort into z-scores, and summarized
//! by party and by institutional role.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::ingest::{Role, TweetRecord};
use crate::regression::{build_design, fit_linear, FitResult};
use crate::series::{build_series, SeriesOptions, Subject};
use crate::util::{iqr, median};
use crate::Result;

/// One author's fitted feedback model plus the metadata needed for
/// grouping.
#[derive(Debug, Clone, PartialEq)]
pub struct IndividualFit {
    pub author_id: String,
    pub party: String,
    pub role: Role,
    pub fit: FitResult,
    /// Number of usable design rows behind the fit.
    pub n_obs: usize,
}

impl IndividualFit {
    /// Net feedback sensitivity: positive-engagement coefficient minus
    /// negative-engagement coefficient.
    pub fn delta(&self) -> f64 {
        self.fit.beta - self.fit.gamma
    }
}

/// An active author that could not be fitted, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedAuthor {
    pub author_id: String,
    pub reason: String,
}

/// Fit every author in the active set independently.
///
/// Sentiment series are built per author on daily buckets with gap pairs
/// dropped; engagement regressors come from the whole corpus. Authors
/// with fewer than `min_obs` usable design rows, or whose fit fails
/// numerically, land in the skipped list with a reason instead of being
/// silently dropped. Fits run in parallel; the output order is the
/// sorted author order regardless of thread scheduling.
pub fn fit_all_individuals(
    records: &[TweetRecord],
    active_set: &BTreeSet<String>,
    min_obs: usize,
) -> Result<(Vec<IndividualFit>, Vec<SkippedAuthor>)> {
    if active_set.is_empty() {
        return Err(Error::EmptySubjectSeries(
            "active-author set is empty".to_string(),
        ));
    }
    if min_obs < 10 {
        return Err(Error::InvalidArgument(format!(
            "minimum observations per author must be at least 10, got {min_obs}"
        )));
    }

    // Party and role come from the author's chronologically first record.
    let mut first_record: BTreeMap<&str, &TweetRecord> = BTreeMap::new();
    for record in records {
        if !active_set.contains(&record.author_id) {
            continue;
        }
        first_record
            .entry(record.author_id.as_str())
            .and_modify(|current| {
                if record.timestamp < current.timestamp {
                    *current = record;
                }
            })
            .or_insert(record);
    }

    let authors: Vec<&String> = active_set.iter().collect();
    let series_options = SeriesOptions::default();
    let outcomes: Vec<(String, Result<IndividualFit>)> = authors
        .par_iter()
        .map(|author| {
            let outcome = fit_one(records, author, &first_record, min_obs, &series_options);
            (author.to_string(), outcome)
        })
        .collect();

    let mut fits = Vec::new();
    let mut skipped = Vec::new();
    for (author_id, outcome) in outcomes {
        match outcome {
            Ok(fit) => fits.push(fit),
            Err(err) => skipped.push(SkippedAuthor {
                author_id,
                reason: err.to_string(),
            }),
        }
    }
    Ok((fits, skipped))
}

fn fit_one(
    records: &[TweetRecord],
    author: &str,
    first_record: &BTreeMap<&str, &TweetRecord>,
    min_obs: usize,
    series_options: &SeriesOptions,
) -> Result<IndividualFit> {
    let meta = first_record
        .get(author)
        .ok_or_else(|| Error::EmptySubjectSeries(format!("author:{author}")))?;
    let subject = Subject::Individual(author.to_string());
    let series = build_series(records, &subject, records, series_options)?;
    let design = build_design(&series, true);
    if design.len() < min_obs {
        return Err(Error::InsufficientObservations {
            have: design.len(),
            need: min_obs,
        });
    }
    let fit = fit_linear(&design, false)?;
    Ok(IndividualFit {
        author_id: author.to_string(),
        party: meta.party.clone(),
        role: meta.role,
        n_obs: fit.n_obs,
        fit,
    })
}

/// One author's standardized score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthorZScore {
    pub author_id: String,
    pub party: String,
    pub role: String,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub z: f64,
    pub n_obs: usize,
}

/// Distribution summary of z within one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub n: usize,
    pub mean_z: f64,
    pub median_z: f64,
    pub iqr_z: f64,
}

/// The cohort standardization output: per-author scores, the population
/// moments behind them, and per-party / per-role summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZScoreReport {
    pub authors: Vec<AuthorZScore>,
    pub mu_delta: f64,
    pub sigma_delta: f64,
    pub n: usize,
    pub by_party: BTreeMap<String, GroupStats>,
    pub by_role: BTreeMap<String, GroupStats>,
}

/// Standardize `delta = beta - gamma` across the cohort.
///
/// `mu_delta` is the sample mean and `sigma_delta` the sample standard
/// deviation (n-1 denominator) over every fitted author; each z is
/// `(delta - mu) / sigma`. All fitted authors enter the moments; party
/// filtering happens later in [`aggregate_by_party`]. Fewer than two
/// fits, or all deltas identical, is a degenerate population.
///
/// Authors are processed in `author_id` order whatever order the caller
/// passed, so the report (including its floating-point sums) depends only
/// on the set of fits.
pub fn zscores(fits: &[IndividualFit]) -> Result<ZScoreReport> {
    if fits.len() < 2 {
        return Err(Error::DegeneratePopulation(format!(
            "need at least two fitted authors, got {}",
            fits.len()
        )));
    }
    let mut fits: Vec<&IndividualFit> = fits.iter().collect();
    fits.sort_by(|x, y| x.author_id.cmp(&y.author_id));
    let n = fits.len();
    let deltas: Vec<f64> = fits.iter().map(|f| f.delta()).collect();
    let mu = deltas.iter().sum::<f64>() / n as f64;
    let variance = deltas.iter().map(|d| (d - mu) * (d - mu)).sum::<f64>() / (n - 1) as f64;
    let sigma = variance.sqrt();
    if !(sigma > 0.0) {
        return Err(Error::DegeneratePopulation(
            "all authors have identical net feedback sensitivity".to_string(),
        ));
    }

    let authors: Vec<AuthorZScore> = fits
        .iter()
        .zip(&deltas)
        .map(|(fit, delta)| AuthorZScore {
            author_id: fit.author_id.clone(),
            party: fit.party.clone(),
            role: fit.role.as_str().to_string(),
            alpha: fit.fit.alpha,
            beta: fit.fit.beta,
            gamma: fit.fit.gamma,
            delta: *delta,
            z: (delta - mu) / sigma,
            n_obs: fit.n_obs,
        })
        .collect();

    let by_party = group_stats(&authors, |a| a.party.clone());
    let by_role = group_stats(&authors, |a| a.role.clone());

    Ok(ZScoreReport {
        authors,
        mu_delta: mu,
        sigma_delta: sigma,
        n,
        by_party,
        by_role,
    })
}

fn group_stats(
    authors: &[AuthorZScore],
    key: impl Fn(&AuthorZScore) -> String,
) -> BTreeMap<String, GroupStats> {
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for author in authors {
        groups.entry(key(author)).or_default().push(author.z);
    }
    groups
        .into_iter()
        .map(|(name, zs)| {
            let mean = zs.iter().sum::<f64>() / zs.len() as f64;
            let stats = GroupStats {
                n: zs.len(),
                mean_z: mean,
                median_z: median(&zs),
                iqr_z: iqr(&zs),
            };
            (name, stats)
        })
        .collect()
}

/// Party table with small parties removed from display. Their members
/// still shaped `mu_delta` and `sigma_delta`; only the per-party rows
/// are filtered.
pub fn aggregate_by_party(
    report: &ZScoreReport,
    min_group: usize,
) -> Result<BTreeMap<String, GroupStats>> {
    if min_group < 1 {
        return Err(Error::InvalidArgument(
            "minimum group size must be at least 1".to_string(),
        ));
    }
    Ok(report
        .by_party
        .iter()
        .filter(|(_, stats)| stats.n >= min_group)
        .map(|(name, stats)| (name.clone(), stats.clone()))
        .collect())
}

/// CSV rendering of per-author scores with columns
/// `author_id,party,role,alpha,beta,gamma,delta,z`.
pub fn individuals_csv(report: &ZScoreReport) -> String {
    use crate::util::fmt_f64;
    let mut out = String::from("author_id,party,role,alpha,beta,gamma,delta,z\n");
    for a in &report.authors {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            a.author_id,
            a.party,
            a.role,
            fmt_f64(a.alpha),
            fmt_f64(a.beta),
            fmt_f64(a.gamma),
            fmt_f64(a.delta),
            fmt_f64(a.z)
        ));
    }
    out
}

/// CSV rendering of a party table with columns
/// `party,n,mean_z,median_z,iqr_z`.
pub fn parties_csv(table: &BTreeMap<String, GroupStats>) -> String {
    use crate::util::fmt_f64;
    let mut out = String::from("party,n,mean_z,median_z,iqr_z\n");
    for (party, stats) in table {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            party,
            stats.n,
            fmt_f64(stats.mean_z),
            fmt_f64(stats.median_z),
            fmt_f64(stats.iqr_z)
        ));
    }
    out
}

/// CSV rendering of the skipped-author report (`author_id,reason`);
/// reasons are quoted since they contain commas.
pub fn skipped_csv(skipped: &[SkippedAuthor]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["author_id", "reason"])
        .map_err(csv_io)?;
    for s in skipped {
        writer
            .write_record([s.author_id.as_str(), s.reason.as_str()])
            .map_err(csv_io)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

fn csv_io(err: csv::Error) -> Error {
    Error::Io(std::io::Error::other(err.to_string()))
}
