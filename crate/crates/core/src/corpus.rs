//! Posting data model and record validation.
//!
//! File decoding lives with the IO layer; this module receives already
//! decoded field values and decides which records become postings.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use chrono::NaiveDate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Region {
    LosAngeles,
    SantaBarbara,
    SanDiego,
}

impl Region {
    pub const ALL: [Region; 3] = [Region::LosAngeles, Region::SantaBarbara, Region::SanDiego];

    pub fn code(self) -> &'static str {
        match self {
            Region::LosAngeles => "LA",
            Region::SantaBarbara => "SB",
            Region::SanDiego => "SD",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown region {0:?} (expected LA, SB or SD)")]
pub struct UnknownRegion(pub String);

impl FromStr for Region {
    type Err = UnknownRegion;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "LA" => Ok(Region::LosAngeles),
            "SB" => Ok(Region::SantaBarbara),
            "SD" => Ok(Region::SanDiego),
            _ => Err(UnknownRegion(String::from(s))),
        }
    }
}

/// Inclusive date range in which postings must have been retrieved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollectionWindow {
    pub start: NaiveDate,
    pub end: NaiveDate,
}

impl CollectionWindow {
    pub fn new(start: NaiveDate, end: NaiveDate) -> Option<Self> {
        (start <= end).then_some(CollectionWindow { start, end })
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        self.start <= date && date <= self.end
    }
}

impl Default for CollectionWindow {
    /// 2025-03-15 through 2025-06-04.
    fn default() -> Self {
        CollectionWindow {
            start: NaiveDate::from_ymd_opt(2025, 3, 15).unwrap(),
            end: NaiveDate::from_ymd_opt(2025, 6, 4).unwrap(),
        }
    }
}

/// One scraped job advertisement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Posting {
    pub job_id: String,
    pub title: String,
    pub job_description: String,
    pub employer_name: String,
    pub employer_description: String,
    pub region: Region,
    pub retrieved_at: NaiveDate,
}

/// Raw field values of one record, before validation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RecordFields {
    pub job_id: String,
    pub title: String,
    pub job_description: String,
    pub employer_name: String,
    pub employer_description: String,
    pub region: String,
    pub retrieved_at: String,
}

impl From<&Posting> for RecordFields {
    fn from(p: &Posting) -> Self {
        RecordFields {
            job_id: p.job_id.clone(),
            title: p.title.clone(),
            job_description: p.job_description.clone(),
            employer_name: p.employer_name.clone(),
            employer_description: p.employer_description.clone(),
            region: String::from(p.region.code()),
            retrieved_at: alloc::format!("{}", p.retrieved_at.format("%Y-%m-%d")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    /// The line could not be decoded into a record at all.
    Malformed(String),
    EmptyJobId,
    UnknownRegion(String),
    RegionNotSelected(Region),
    BadDate(String),
    OutsideWindow(NaiveDate),
    /// A `(job_id, region)` pair already seen earlier in the inputs.
    DuplicateKey { first_source: usize, first_line: usize },
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::Malformed(m) => write!(f, "malformed record: {m}"),
            RejectReason::EmptyJobId => f.write_str("empty job_id"),
            RejectReason::UnknownRegion(r) => write!(f, "unknown region {r:?}"),
            RejectReason::RegionNotSelected(r) => write!(f, "region {r} not selected"),
            RejectReason::BadDate(d) => write!(f, "invalid retrieved_at {d:?}"),
            RejectReason::OutsideWindow(d) => write!(f, "retrieved_at {d} outside collection window"),
            RejectReason::DuplicateKey { first_source, first_line } => write!(
                f,
                "duplicate (job_id, region); first seen in input {first_source} line {first_line}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// Index of the input file.
    pub source: usize,
    /// 1-based line number.
    pub line: usize,
    pub job_id: String,
    pub reason: RejectReason,
}

/// Loaded postings plus the inputs they came from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub postings: Vec<Posting>,
    pub sources: Vec<String>,
}

/// Accumulates records in input order, rejecting invalid ones with a
/// diagnostic. Records must be pushed in input order for duplicate
/// detection to keep the first occurrence.
#[derive(Debug)]
pub struct CorpusBuilder {
    window: CollectionWindow,
    regions: [bool; 3],
    seen: BTreeMap<(Region, String), (usize, usize)>,
    corpus: Corpus,
    diagnostics: Vec<Diagnostic>,
}

impl CorpusBuilder {
    pub fn new(window: CollectionWindow, regions: &[Region]) -> Self {
        let mut selected = [false; 3];
        for r in regions {
            selected[r.index()] = true;
        }
        CorpusBuilder {
            window,
            regions: selected,
            seen: BTreeMap::new(),
            corpus: Corpus::default(),
            diagnostics: Vec::new(),
        }
    }

    /// Register an input source; returns its index for `push`/`reject`.
    pub fn add_source(&mut self, name: impl Into<String>) -> usize {
        self.corpus.sources.push(name.into());
        self.corpus.sources.len() - 1
    }

    pub fn reject(&mut self, source: usize, line: usize, job_id: impl Into<String>, reason: RejectReason) {
        self.diagnostics.push(Diagnostic { source, line, job_id: job_id.into(), reason });
    }

    /// Validate one record. Returns whether it was accepted.
    pub fn push(&mut self, source: usize, line: usize, fields: RecordFields) -> bool {
        match self.validate(source, line, &fields) {
            Ok((region, retrieved_at)) => {
                self.corpus.postings.push(Posting {
                    job_id: fields.job_id,
                    title: fields.title,
                    job_description: fields.job_description,
                    employer_name: fields.employer_name,
                    employer_description: fields.employer_description,
                    region,
                    retrieved_at,
                });
                true
            }
            Err(reason) => {
                self.reject(source, line, fields.job_id, reason);
                false
            }
        }
    }

    fn validate(&mut self, source: usize, line: usize, f: &RecordFields) -> Result<(Region, NaiveDate), RejectReason> {
        if f.job_id.trim().is_empty() {
            return Err(RejectReason::EmptyJobId);
        }
        let region: Region = f.region.parse().map_err(|_| RejectReason::UnknownRegion(f.region.clone()))?;
        if !self.regions[region.index()] {
            return Err(RejectReason::RegionNotSelected(region));
        }
        let date = NaiveDate::parse_from_str(&f.retrieved_at, "%Y-%m-%d")
            .map_err(|_| RejectReason::BadDate(f.retrieved_at.clone()))?;
        if !self.window.contains(date) {
            return Err(RejectReason::OutsideWindow(date));
        }
        if let Some(&(first_source, first_line)) = self.seen.get(&(region, f.job_id.clone())) {
            return Err(RejectReason::DuplicateKey { first_source, first_line });
        }
        self.seen.insert((region, f.job_id.clone()), (source, line));
        Ok((region, date))
    }

    pub fn finish(self) -> (Corpus, Vec<Diagnostic>) {
        (self.corpus, self.diagnostics)
    }
}
