//! Corpus ingestion: CSV parsing with per-row validation and the
//! persistent-activity author filter.
//!
//! The expected header is
//! `tweet_id,author_id,timestamp,sentiment,retweet_count,party,role,region`.
//! Columns are matched by name, so order is free; unknown extra columns are
//! ignored with a warning. An optional `is_retweet` column marks retweet
//! rows, which are rejected so that retweet counts are never double-counted
//! as fresh statements.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};

use crate::error::Error;
use crate::Result;

/// Institutional role attached to an author.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Government,
    Opposition,
    Unknown,
}

impl Role {
    /// Case-insensitive parse of the documented vocabulary. An empty field
    /// is treated as `Unknown`; anything else is a validation failure.
    pub fn parse(s: &str) -> Option<Role> {
        let t = s.trim();
        if t.is_empty() {
            return Some(Role::Unknown);
        }
        match t.to_ascii_lowercase().as_str() {
            "government" => Some(Role::Government),
            "opposition" => Some(Role::Opposition),
            "unknown" => Some(Role::Unknown),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Role::Government => "government",
            Role::Opposition => "opposition",
            Role::Unknown => "unknown",
        }
    }
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One validated corpus record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TweetRecord {
    pub tweet_id: String,
    pub author_id: String,
    /// Publication instant, always UTC with second precision.
    pub timestamp: DateTime<Utc>,
    /// Sentiment label in {-1, 0, +1}.
    pub sentiment: i8,
    pub retweet_count: u64,
    /// Party affiliation; may be empty.
    pub party: String,
    pub role: Role,
    /// Free-form region tag; may be empty.
    pub region: String,
}

impl TweetRecord {
    /// UTC calendar day of the record.
    pub fn day(&self) -> NaiveDate {
        self.timestamp.date_naive()
    }
}

/// Summary of one parse run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusMeta {
    /// Number of valid records returned.
    pub record_count: usize,
    /// Number of distinct author ids among valid records.
    pub author_count: usize,
    /// Closed interval of UTC calendar days covered by valid records;
    /// `None` when no row survived validation.
    pub date_range: Option<(NaiveDate, NaiveDate)>,
    pub rejected_count: usize,
    /// One `(line number, reason)` entry per rejected row.
    pub rejection_log: Vec<(u64, String)>,
    /// Non-fatal notices, e.g. ignored extra columns.
    pub warnings: Vec<String>,
}

/// How the `sentiment` column is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelVocabulary {
    /// Integer labels `-1`, `0`, `1` (a leading `+` is accepted).
    #[default]
    Numeric,
    /// Word labels `negative`, `neutral`, `positive` (case-insensitive).
    Words,
}

/// Parser configuration.
#[derive(Debug, Clone)]
pub struct ParseOptions {
    pub delimiter: u8,
    pub vocabulary: LabelVocabulary,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            delimiter: b',',
            vocabulary: LabelVocabulary::Numeric,
        }
    }
}

const REQUIRED_COLUMNS: [&str; 8] = [
    "tweet_id",
    "author_id",
    "timestamp",
    "sentiment",
    "retweet_count",
    "party",
    "role",
    "region",
];

const RETWEET_FLAG_COLUMN: &str = "is_retweet";

/// Parse a corpus from CSV bytes.
///
/// Rows that fail validation are rejected individually and reported in the
/// returned [`CorpusMeta`]; they never abort the parse. A missing or
/// malformed header is fatal, as is an entirely empty input (which is a
/// different condition from a well-formed file whose rows all fail
/// validation).
pub fn parse_corpus<R: Read>(
    reader: R,
    options: &ParseOptions,
) -> Result<(Vec<TweetRecord>, CorpusMeta)> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .flexible(true)
        .from_reader(reader);

    let headers = match csv_reader.headers() {
        Ok(h) if h.is_empty() || (h.len() == 1 && h[0].trim().is_empty()) => {
            return Err(Error::EmptyInput)
        }
        Ok(h) => h.clone(),
        Err(_) => return Err(Error::EmptyInput),
    };

    let mut warnings = Vec::new();
    let mut column_index: BTreeMap<&'static str, usize> = BTreeMap::new();
    for (idx, name) in headers.iter().enumerate() {
        let name = name.trim();
        let known = REQUIRED_COLUMNS
            .iter()
            .copied()
            .find(|c| *c == name)
            .or_else(|| (name == RETWEET_FLAG_COLUMN).then_some(RETWEET_FLAG_COLUMN));
        match known {
            Some(canonical) => {
                if column_index.insert(canonical, idx).is_some() {
                    return Err(Error::Schema(format!("duplicate column `{name}`")));
                }
            }
            None => warnings.push(format!("ignoring unknown column `{name}`")),
        }
    }
    let missing: Vec<&str> = REQUIRED_COLUMNS
        .iter()
        .copied()
        .filter(|c| !column_index.contains_key(c))
        .collect();
    if !missing.is_empty() {
        return Err(Error::Schema(format!(
            "missing required column(s): {}",
            missing.join(", ")
        )));
    }

    let col = |name: &str| *column_index.get(name).unwrap();
    let retweet_flag_col = column_index.get(RETWEET_FLAG_COLUMN).copied();

    let mut records = Vec::new();
    let mut rejection_log: Vec<(u64, String)> = Vec::new();
    let mut authors: BTreeSet<String> = BTreeSet::new();
    let mut date_range: Option<(NaiveDate, NaiveDate)> = None;

    for row in csv_reader.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                rejection_log.push((line, format!("malformed row: {e}")));
                continue;
            }
        };
        let line = row.position().map(|p| p.line()).unwrap_or(0);

        macro_rules! reject {
            ($reason:expr) => {{
                rejection_log.push((line, $reason.to_string()));
                continue;
            }};
        }

        let field = |name: &str| row.get(col(name)).unwrap_or("").trim();

        if row.len() < headers.len() {
            reject!(format!(
                "expected {} fields, found {}",
                headers.len(),
                row.len()
            ));
        }

        if let Some(flag_col) = retweet_flag_col {
            let v = row.get(flag_col).unwrap_or("").trim().to_ascii_lowercase();
            match v.as_str() {
                "" | "0" | "false" | "no" => {}
                "1" | "true" | "yes" => reject!("retweet row"),
                other => reject!(format!("unparseable is_retweet value `{other}`")),
            }
        }

        let timestamp_raw = field("timestamp");
        let timestamp = match parse_utc_timestamp(timestamp_raw) {
            Some(t) => t,
            None => reject!(format!("bad timestamp `{timestamp_raw}`")),
        };

        let sentiment_raw = field("sentiment");
        let sentiment = match parse_label(sentiment_raw, options.vocabulary) {
            Ok(v) => v,
            Err(reason) => reject!(reason),
        };

        let retweet_raw = field("retweet_count");
        let retweet_count = match retweet_raw.parse::<i64>() {
            Ok(n) if n >= 0 => n as u64,
            Ok(_) => reject!(format!("negative retweet_count `{retweet_raw}`")),
            Err(_) => reject!(format!("unparseable retweet_count `{retweet_raw}`")),
        };

        let role_raw = field("role");
        let role = match Role::parse(role_raw) {
            Some(r) => r,
            None => reject!(format!("invalid role `{role_raw}`")),
        };

        let record = TweetRecord {
            tweet_id: field("tweet_id").to_string(),
            author_id: field("author_id").to_string(),
            timestamp,
            sentiment,
            retweet_count,
            party: field("party").to_string(),
            role,
            region: field("region").to_string(),
        };

        let day = record.day();
        date_range = Some(match date_range {
            None => (day, day),
            Some((lo, hi)) => (lo.min(day), hi.max(day)),
        });
        authors.insert(record.author_id.clone());
        records.push(record);
    }

    let meta = CorpusMeta {
        record_count: records.len(),
        author_count: authors.len(),
        date_range,
        rejected_count: rejection_log.len(),
        rejection_log,
        warnings,
    };
    Ok((records, meta))
}

/// Strict `YYYY-MM-DDTHH:MM:SSZ` parse; anything else is invalid.
fn parse_utc_timestamp(s: &str) -> Option<DateTime<Utc>> {
    if !s.ends_with('Z') {
        return None;
    }
    NaiveDateTime::parse_from_str(&s[..s.len() - 1], "%Y-%m-%dT%H:%M:%S")
        .ok()
        .map(|naive| naive.and_utc())
}

fn parse_label(raw: &str, vocabulary: LabelVocabulary) -> std::result::Result<i8, String> {
    match vocabulary {
        LabelVocabulary::Numeric => {
            let cleaned = raw.strip_prefix('+').unwrap_or(raw);
            match cleaned.parse::<i64>() {
                Ok(v @ -1..=1) => Ok(v as i8),
                Ok(_) => Err("label out of range".to_string()),
                Err(_) => Err(format!("unparseable label `{raw}`")),
            }
        }
        LabelVocabulary::Words => match raw.to_ascii_lowercase().as_str() {
            "negative" => Ok(-1),
            "neutral" => Ok(0),
            "positive" => Ok(1),
            _ => Err(format!("unknown label word `{raw}`")),
        },
    }
}

/// Inclusive day interval used by the activity filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DayInterval {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl DayInterval {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Result<Self> {
        if end < start {
            return Err(Error::InvalidArgument(format!(
                "day interval end {end} precedes start {start}"
            )));
        }
        Ok(DayInterval { start, end })
    }

    pub fn num_days(&self) -> u64 {
        (self.end - self.start).num_days() as u64 + 1
    }

    pub fn contains(&self, day: NaiveDate) -> bool {
        self.start <= day && day <= self.end
    }
}

/// Select authors active on strictly more than `threshold` of the days in
/// `period`.
///
/// Activity on a day means at least one valid record on that UTC calendar
/// day; the comparison is strict, so an author present on exactly
/// `threshold` of the days is excluded. The result only depends on the set
/// of records, not their order.
pub fn filter_active_authors(
    records: &[TweetRecord],
    period: DayInterval,
    threshold: f64,
) -> Result<BTreeSet<String>> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "activity threshold must be in (0, 1], got {threshold}"
        )));
    }
    let mut days_by_author: BTreeMap<&str, BTreeSet<NaiveDate>> = BTreeMap::new();
    for record in records {
        let day = record.day();
        if period.contains(day) {
            days_by_author
                .entry(record.author_id.as_str())
                .or_default()
                .insert(day);
        }
    }
    let period_days = period.num_days() as f64;
    Ok(days_by_author
        .into_iter()
        .filter(|(_, days)| days.len() as f64 / period_days > threshold)
        .map(|(author, _)| author.to_string())
        .collect())
}
