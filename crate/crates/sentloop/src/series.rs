//! Daily aggregation of corpus records into sentiment and engagement
//! series.
//!
//! Each UTC calendar day (or ISO week, when weekly bucketing is selected)
//! becomes one observation: a mean sentiment score `S` in `[-1, 1]` for the
//! chosen subject, and global engagement fractions `r_pos`, `r_neg` giving
//! the share of the day's retweets received by positive and negative
//! tweets. Days on which the subject is silent are filled by carrying the
//! last observed score forward and flagged, so downstream consumers can
//! drop them.

use std::collections::BTreeMap;

use chrono::{Datelike, Days, NaiveDate};

use crate::error::Error;
use crate::ingest::TweetRecord;
use crate::util::fmt_f64;
use crate::Result;

/// Whose sentiment the series tracks. Engagement is always computed from
/// the full engagement corpus, regardless of subject.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Subject {
    /// Every record.
    All,
    /// Records whose `party` field equals the given name.
    Party(String),
    /// Records whose `region` field equals the given name.
    Region(String),
    /// Records of a single author.
    Individual(String),
}

impl Subject {
    pub fn matches(&self, record: &TweetRecord) -> bool {
        match self {
            Subject::All => true,
            Subject::Party(p) => record.party == *p,
            Subject::Region(r) => record.region == *r,
            Subject::Individual(a) => record.author_id == *a,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Subject::All => "all".to_string(),
            Subject::Party(p) => format!("party:{p}"),
            Subject::Region(r) => format!("region:{r}"),
            Subject::Individual(a) => format!("author:{a}"),
        }
    }
}

/// Bucket width for aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Granularity {
    #[default]
    Day,
    /// ISO weeks, keyed by their Monday.
    Week,
}

impl Granularity {
    pub fn step_days(&self) -> u64 {
        match self {
            Granularity::Day => 1,
            Granularity::Week => 7,
        }
    }

    /// Map a calendar day to the first day of its bucket.
    pub fn bucket_start(&self, day: NaiveDate) -> NaiveDate {
        match self {
            Granularity::Day => day,
            Granularity::Week => day - Days::new(day.weekday().num_days_from_monday() as u64),
        }
    }
}

/// Which retweets form the denominator of the engagement fractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EngagementDenominator {
    /// All retweets that day, including those of neutral tweets.
    #[default]
    AllTweets,
    /// Only retweets of positive and negative tweets. Available for
    /// sensitivity analysis; with this variant `r_pos + r_neg` is exactly 1
    /// on any day with polarized engagement.
    PolarizedOnly,
}

/// Aggregates for one bucket: tweet counts and retweet sums per label.
/// Index 0 holds label -1, index 1 label 0, index 2 label +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DailyBucket {
    pub day: NaiveDate,
    pub counts: [u64; 3],
    pub retweets: [u64; 3],
}

impl DailyBucket {
    pub fn empty(day: NaiveDate) -> Self {
        DailyBucket {
            day,
            counts: [0; 3],
            retweets: [0; 3],
        }
    }

    pub fn add(&mut self, record: &TweetRecord) {
        let slot = (record.sentiment + 1) as usize;
        self.counts[slot] += 1;
        self.retweets[slot] += record.retweet_count;
    }

    pub fn tweet_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn retweet_total(&self) -> u64 {
        self.retweets.iter().sum()
    }
}

/// Group records into buckets keyed by bucket start day.
pub fn bucket_by_day<'a, I>(
    records: I,
    granularity: Granularity,
) -> BTreeMap<NaiveDate, DailyBucket>
where
    I: IntoIterator<Item = &'a TweetRecord>,
{
    let mut buckets: BTreeMap<NaiveDate, DailyBucket> = BTreeMap::new();
    for record in records {
        let day = granularity.bucket_start(record.day());
        buckets
            .entry(day)
            .or_insert_with(|| DailyBucket::empty(day))
            .add(record);
    }
    buckets
}

/// Mean sentiment label of the bucket, in `[-1, 1]`.
///
/// Computed as an exact integer sum divided by the tweet count, so the
/// result is the correctly rounded value of the underlying rational.
pub fn sentiment_score(bucket: &DailyBucket) -> Result<f64> {
    let n = bucket.tweet_count();
    if n == 0 {
        return Err(Error::InvalidArgument(format!(
            "empty bucket for {}",
            bucket.day
        )));
    }
    let label_sum = bucket.counts[2] as i64 - bucket.counts[0] as i64;
    Ok(label_sum as f64 / n as f64)
}

/// Fractions of the bucket's retweets earned by positive and negative
/// tweets. A bucket with no qualifying retweets yields `(0.0, 0.0)`.
pub fn engagement_fractions(
    bucket: &DailyBucket,
    denominator: EngagementDenominator,
) -> (f64, f64) {
    let den = match denominator {
        EngagementDenominator::AllTweets => bucket.retweet_total(),
        EngagementDenominator::PolarizedOnly => bucket.retweets[0] + bucket.retweets[2],
    };
    if den == 0 {
        return (0.0, 0.0);
    }
    let den = den as f64;
    (
        bucket.retweets[2] as f64 / den,
        bucket.retweets[0] as f64 / den,
    )
}

/// Options controlling series construction.
#[derive(Debug, Clone, Copy, Default)]
pub struct SeriesOptions {
    pub granularity: Granularity,
    pub denominator: EngagementDenominator,
}

/// An aligned sentiment/engagement time series for one subject.
///
/// Invariants, checked on construction: bucket days strictly increase with
/// a uniform step; all scores lie in `[-1, 1]`; engagement fractions lie in
/// `[0, 1]` with `r_pos + r_neg <= 1`; all columns share one length.
#[derive(Debug, Clone, PartialEq)]
pub struct SentimentSeries {
    subject: Subject,
    days: Vec<NaiveDate>,
    s: Vec<f64>,
    r_pos: Vec<f64>,
    r_neg: Vec<f64>,
    gap: Vec<bool>,
    step_days: u64,
}

impl SentimentSeries {
    pub fn new(
        subject: Subject,
        days: Vec<NaiveDate>,
        s: Vec<f64>,
        r_pos: Vec<f64>,
        r_neg: Vec<f64>,
        gap: Vec<bool>,
        step_days: u64,
    ) -> Result<Self> {
        let n = days.len();
        if n == 0 {
            return Err(Error::EmptySubjectSeries(subject.label()));
        }
        if s.len() != n || r_pos.len() != n || r_neg.len() != n || gap.len() != n {
            return Err(Error::InvalidArgument(
                "series columns have mismatched lengths".to_string(),
            ));
        }
        if step_days == 0 {
            return Err(Error::InvalidArgument("zero step".to_string()));
        }
        for w in days.windows(2) {
            if (w[1] - w[0]).num_days() != step_days as i64 {
                return Err(Error::InvalidArgument(format!(
                    "days not consecutive at {} -> {} (expected step {step_days})",
                    w[0], w[1]
                )));
            }
        }
        for (i, &v) in s.iter().enumerate() {
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!(
                    "sentiment score {v} out of [-1, 1] at {}",
                    days[i]
                )));
            }
        }
        for i in 0..n {
            let (p, q) = (r_pos[i], r_neg[i]);
            if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) || p + q > 1.0 + 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "engagement fractions ({p}, {q}) invalid at {}",
                    days[i]
                )));
            }
        }
        Ok(SentimentSeries {
            subject,
            days,
            s,
            r_pos,
            r_neg,
            gap,
            step_days,
        })
    }

    pub fn subject(&self) -> &Subject {
        &self.subject
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn days(&self) -> &[NaiveDate] {
        &self.days
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn r_pos(&self) -> &[f64] {
        &self.r_pos
    }

    pub fn r_neg(&self) -> &[f64] {
        &self.r_neg
    }

    pub fn gap(&self) -> &[bool] {
        &self.gap
    }

    pub fn step_days(&self) -> u64 {
        self.step_days
    }

    /// Render as CSV with header `day,S,r_pos,r_neg,gap`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("day,S,r_pos,r_neg,gap\n");
        for i in 0..self.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.days[i].format("%Y-%m-%d"),
                fmt_f64(self.s[i]),
                fmt_f64(self.r_pos[i]),
                fmt_f64(self.r_neg[i]),
                u8::from(self.gap[i]),
            ));
        }
        out
    }
}

/// Build the aligned series for `subject`.
///
/// Sentiment comes from the subject's records; engagement fractions come
/// from `engagement` (normally the full corpus). The series spans the
/// subject's first through last active bucket. Buckets where the subject
/// is silent carry the last observed score forward and are flagged as
/// gaps; engagement on those buckets is still read from the engagement
/// corpus. The result does not depend on record order.
pub fn build_series(
    records: &[TweetRecord],
    subject: &Subject,
    engagement: &[TweetRecord],
    options: &SeriesOptions,
) -> Result<SentimentSeries> {
    let subject_buckets = bucket_by_day(
        records.iter().filter(|r| subject.matches(r)),
        options.granularity,
    );
    if subject_buckets.is_empty() {
        return Err(Error::EmptySubjectSeries(subject.label()));
    }
    let engagement_buckets = bucket_by_day(engagement.iter(), options.granularity);

    let first = *subject_buckets.keys().next().unwrap();
    let last = *subject_buckets.keys().next_back().unwrap();
    let step = options.granularity.step_days();

    let mut days = Vec::new();
    let mut s = Vec::new();
    let mut r_pos = Vec::new();
    let mut r_neg = Vec::new();
    let mut gap = Vec::new();

    let mut day = first;
    let mut carried = 0.0;
    while day <= last {
        let score = match subject_buckets.get(&day) {
            Some(bucket) => {
                carried = sentiment_score(bucket)?;
                gap.push(false);
                carried
            }
            None => {
                gap.push(true);
                carried
            }
        };
        let (p, q) = engagement_buckets
            .get(&day)
            .map(|b| engagement_fractions(b, options.denominator))
            .unwrap_or((0.0, 0.0));
        days.push(day);
        s.push(score);
        r_pos.push(p);
        r_neg.push(q);
        day = day + Days::new(step);
    }

    SentimentSeries::new(subject.clone(), days, s, r_pos, r_neg, gap, step)
}
