//! Seeded synthetic corpus generator.
//!
//! Produces a tweet-level CSV in the ingest schema whose daily aggregates
//! follow the feedback model with known coefficients, so that the whole
//! ingest -> series -> fit pipeline can be tested against ground truth.
//!
//! The hard part is quantization: daily sentiment is a mean of labels in
//! {-1, 0, +1}, so it lives on a grid, while the model is continuous.
//! Naive rounding of the model's prediction to the grid would correlate
//! the rounding error with the regressors and bias the recovered
//! coefficients. Two measures remove the problem:
//!
//! 1. *Dithered rounding.* The model target is rounded to the label grid
//!    randomly, up with probability equal to the fractional part. The
//!    rounding error then has mean zero conditional on the target, so it
//!    acts as exogenous noise rather than bias.
//! 2. *Engagement back-solving.* Retweet counts for a day are chosen
//!    AFTER the next day's quantized sentiment is known: the count on
//!    the corrected side is solved from the model equation so that the
//!    achieved transition satisfies it almost exactly (the only slack is
//!    rounding that count to an integer, about `|coef|/(2M)` with `M`
//!    retweets per day). With the default volumes this leaves residuals
//!    near 1e-8, far below any acceptance tolerance.
//!
//! Author 0 carries all retweets and is corrected exactly; additional
//! authors follow the model with only the dither as extra noise, which
//! is unbiased and small (at most one grid step). Every value the parser
//! later computes (label means, retweet fractions) is an integer-sum
//! division that this generator reproduces bit for bit.

use chrono::Days;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::regression::SYNTHETIC_EPOCH;
use crate::Result;

/// Tweets each author posts per day. Labels always include at least one
/// positive, one negative, and one neutral tweet, so the achievable
/// daily mean grid is `{-17/20, ..., +17/20}`.
pub const TWEETS_PER_AUTHOR_PER_DAY: u64 = 20;

/// Total retweets distributed across each day's tweets.
pub const RETWEETS_PER_DAY: u64 = 10_000_000;

/// Widest achievable |label sum| per author-day.
const GRID_MAX: i64 = TWEETS_PER_AUTHOR_PER_DAY as i64 - 3;

/// Generator configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub authors: usize,
    pub days: usize,
    pub noise_std: f64,
    pub seed: u64,
    /// Additive shift applied to beta for odd-indexed authors (the
    /// second party), used to construct cohorts with a known net
    /// feedback difference between parties.
    pub delta_shift: f64,
}

impl SynthConfig {
    pub fn new(alpha: f64, beta: f64, gamma: f64, authors: usize, days: usize) -> Self {
        SynthConfig {
            alpha,
            beta,
            gamma,
            authors,
            days,
            noise_std: 0.0,
            seed: 0,
            delta_shift: 0.0,
        }
    }
}

/// Ground truth and provenance written alongside a generated corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRecord {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub authors: usize,
    pub days: usize,
    pub noise_std: f64,
    pub seed: u64,
    pub delta_shift: f64,
    pub tweets_per_author_per_day: u64,
    pub retweets_per_day: u64,
    /// Days on which the engagement back-solve hit its bounds and the
    /// model equation holds only approximately. Zero for moderate
    /// coefficient magnitudes.
    pub clamped_corrections: usize,
}

/// A generated corpus: the CSV text plus its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub csv: String,
    pub truth: TruthRecord,
}

/// Which retweet count is back-solved from the model equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CorrectionLeg {
    Positive,
    Negative,
    None,
}

/// Generate a synthetic corpus.
///
/// Columns and vocabularies match the ingest schema exactly; re-parsing
/// the output rejects zero rows. Even-indexed authors belong to
/// `party_a` (government), odd-indexed to `party_b` (opposition). The
/// same configuration always yields identical bytes.
pub fn generate(config: &SynthConfig) -> Result<SynthOutput> {
    validate(config)?;

    let n = TWEETS_PER_AUTHOR_PER_DAY;
    let m = RETWEETS_PER_DAY;
    let m_f = m as f64;
    let n_f = n as f64;

    let leg = if config.beta.abs() >= 1e-12 {
        CorrectionLeg::Positive
    } else if config.gamma.abs() >= 1e-12 {
        CorrectionLeg::Negative
    } else {
        CorrectionLeg::None
    };
    // The corrected side is drawn from a wide central range so the
    // back-solve has room to move without leaving [0, M]; the passive
    // side stays modest so the two always fit in the day's budget.
    let wide = (3 * m / 10, m / 2);
    let modest = (m / 20, 3 * m / 10);
    let (j_range, l_range) = match leg {
        CorrectionLeg::Positive => (wide, modest),
        CorrectionLeg::Negative => (modest, wide),
        CorrectionLeg::None => (modest, modest),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal is valid");

    let author_beta = |i: usize| {
        if i % 2 == 1 {
            config.beta + config.delta_shift
        } else {
            config.beta
        }
    };

    // Per-author label sums (d values); day 0 starts balanced at zero.
    let mut d_current = vec![0i64; config.authors];
    let mut clamped_corrections = 0usize;

    let mut csv =
        String::from("tweet_id,author_id,timestamp,sentiment,retweet_count,party,role,region\n");

    for t in 0..config.days {
        let j0 = rng.gen_range(j_range.0..=j_range.1);
        let l0 = rng.gen_range(l_range.0..=l_range.1);
        let mut d_next = vec![0i64; config.authors];

        // Author 0 first: its transition fixes the day's engagement.
        let w0 = normal.sample(&mut rng) * config.noise_std;
        let (j, l) = if t + 1 < config.days {
            let s_t = d_current[0] as f64 / n_f;
            let u = config.alpha * s_t
                + author_beta(0) * (j0 as f64 / m_f)
                + config.gamma * (l0 as f64 / m_f)
                + w0;
            let d = dither_to_grid(u, &mut rng);
            d_next[0] = d;
            let s_next = d as f64 / n_f;
            match leg {
                CorrectionLeg::Positive => {
                    let need = s_next - config.alpha * s_t - config.gamma * (l0 as f64 / m_f) - w0;
                    let exact = need * m_f / author_beta(0);
                    let j = clamp_count(exact, m - l0, &mut clamped_corrections);
                    (j, l0)
                }
                CorrectionLeg::Negative => {
                    let need =
                        s_next - config.alpha * s_t - author_beta(0) * (j0 as f64 / m_f) - w0;
                    let exact = need * m_f / config.gamma;
                    let l = clamp_count(exact, m - j0, &mut clamped_corrections);
                    (j0, l)
                }
                CorrectionLeg::None => (j0, l0),
            }
        } else {
            (j0, l0)
        };

        // Remaining authors react to the day's final engagement.
        for i in 1..config.authors {
            let w = normal.sample(&mut rng) * config.noise_std;
            if t + 1 < config.days {
                let s_t = d_current[i] as f64 / n_f;
                let u = config.alpha * s_t
                    + author_beta(i) * (j as f64 / m_f)
                    + config.gamma * (l as f64 / m_f)
                    + w;
                d_next[i] = dither_to_grid(u, &mut rng);
            }
        }

        let day = SYNTHETIC_EPOCH + Days::new(t as u64);
        for i in 0..config.authors {
            let d = d_current[i];
            let n_pos = (d.max(0) + 1) as u64;
            let n_neg = ((-d).max(0) + 1) as u64;
            let n_neu = n - n_pos - n_neg;
            let (party, role) = if i % 2 == 0 {
                ("party_a", "government")
            } else {
                ("party_b", "opposition")
            };
            let mut slot = 0u64;
            for (label, count) in [(1i8, n_pos), (-1, n_neg), (0, n_neu)] {
                for repeat in 0..count {
                    let retweets = if i == 0 && repeat == 0 {
                        match label {
                            1 => j,
                            -1 => l,
                            _ => m - j - l,
                        }
                    } else {
                        0
                    };
                    let seconds = i as u64 * n + slot;
                    let timestamp = day.and_hms_opt(0, 0, 0).expect("midnight is valid")
                        + chrono::Duration::seconds(seconds as i64);
                    csv.push_str(&format!(
                        "t{t:05}a{i:04}s{slot:02},author_{i:04},{},{label},{retweets},{party},{role},synthetic\n",
                        timestamp.format("%Y-%m-%dT%H:%M:%SZ"),
                    ));
                    slot += 1;
                }
            }
        }

        if t + 1 < config.days {
            d_current = d_next;
        }
    }

    Ok(SynthOutput {
        csv,
        truth: TruthRecord {
            alpha: config.alpha,
            beta: config.beta,
            gamma: config.gamma,
            authors: config.authors,
            days: config.days,
            noise_std: config.noise_std,
            seed: config.seed,
            delta_shift: config.delta_shift,
            tweets_per_author_per_day: n,
            retweets_per_day: m,
            clamped_corrections,
        },
    })
}

fn validate(config: &SynthConfig) -> Result<()> {
    for (name, value) in [
        ("alpha", config.alpha),
        ("beta", config.beta),
        ("gamma", config.gamma),
        ("delta-shift", config.delta_shift),
    ] {
        if !value.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "{name} must be finite, got {value}"
            )));
        }
    }
    if !(config.noise_std >= 0.0 && config.noise_std.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "noise standard deviation must be finite and nonnegative, got {}",
            config.noise_std
        )));
    }
    if config.authors == 0 || config.authors > 4000 {
        return Err(Error::InvalidArgument(format!(
            "author count must be in 1..=4000, got {}",
            config.authors
        )));
    }
    if config.days < 2 || config.days > 20_000 {
        return Err(Error::InvalidArgument(format!(
            "day count must be in 2..=20000, got {}",
            config.days
        )));
    }
    Ok(())
}

/// Round a model target onto the achievable label-mean grid with
/// probabilistic (unbiased) rounding, returning the label sum.
fn dither_to_grid(u: f64, rng: &mut ChaCha8Rng) -> i64 {
    let band = GRID_MAX as f64 / TWEETS_PER_AUTHOR_PER_DAY as f64;
    let clamped = u.clamp(-band, band);
    let scaled = clamped * TWEETS_PER_AUTHOR_PER_DAY as f64;
    let base = scaled.floor();
    let frac = scaled - base;
    let up = rng.gen::<f64>() < frac;
    (base as i64 + i64::from(up)).clamp(-GRID_MAX, GRID_MAX)
}

/// Round the back-solved count to an integer in `[0, bound]`, counting
/// the (rare) clamps that break exactness.
fn clamp_count(exact: f64, bound: u64, clamped: &mut usize) -> u64 {
    let rounded = exact.round();
    if !(0.0..=bound as f64).contains(&rounded) {
        *clamped += 1;
        return rounded.clamp(0.0, bound as f64) as u64;
    }
    rounded as u64
}
