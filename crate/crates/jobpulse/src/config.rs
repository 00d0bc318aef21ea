//! `key = value` configuration.
//!
//! Values come from a config file and from command-line flags; flags win.
//! Relative paths in a config file are resolved against the file's directory.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::NaiveDate;
use num_rational::Ratio;

use jobpulse_core::corpus::{CollectionWindow, Region};
use jobpulse_core::matcher::{DiscoveryConfig, FilterMode, IndustryToken};
use jobpulse_core::pipeline::PipelineConfig;
use jobpulse_core::synth::{Rate, SynthConfig};

use crate::error::Error;

pub const CONFIG_ENV: &str = "JOBPULSE_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Text,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Text => "txt",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            _ => Err(format!("unknown format {s:?} (expected csv or text)")),
        }
    }
}

const PATH_KEYS: [&str; 3] = ["taxonomy_path", "dictionary_path", "output_dir"];
const KEYS: [&str; 23] = [
    "taxonomy_path",
    "dictionary_path",
    "industry_token",
    "filter_mode",
    "regions",
    "window_start",
    "window_end",
    "output_dir",
    "format",
    "top_k",
    "min_count",
    "seed",
    "n_postings",
    "region_mix",
    "function_mix",
    "off_industry_rate",
    "multi_jst_rate_by_k",
    "division_rate",
    "onomastic_collision_rate",
    "legal_suffix_rate",
    "cross_region_repeat_count",
    "unknown_title_plants",
    "employer_pool",
];

/// Raw values by key, later sources overriding earlier ones.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse_file(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&text, base).map_err(|(line, message)| Error::Parse { path: path.to_path_buf(), line, message })
    }

    /// Parse `key = value` lines; `#` starts a comment line.
    pub fn parse(text: &str, base: &Path) -> Result<Self, (usize, String)> {
        let mut cfg = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or((i + 1, format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err((i + 1, format!("unknown key {key:?}")));
            }
            let value = if PATH_KEYS.contains(&key) && !value.is_empty() {
                base.join(value).display().to_string()
            } else {
                value.to_string()
            };
            cfg.values.insert(key.to_string(), value);
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        debug_assert!(KEYS.contains(&key), "{key}");
        self.values.insert(key.to_string(), value.into());
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str).filter(|v| !v.is_empty())
    }

    fn parsed<T>(&self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, Error> {
        self.get(key).map(|v| parse(v).map_err(|e| Error::Config(format!("{key}: {e}")))).transpose()
    }
}

/// Exact rate from `a/b` or a decimal such as `0.15`.
pub fn parse_rate(s: &str) -> Result<Rate, String> {
    let bad = || format!("invalid rate {s:?}");
    if let Some((n, d)) = s.split_once('/') {
        let (n, d): (u64, u64) = (n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?);
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || frac.len() > 18 {
        return Err(bad());
    }
    let den = 10u64.pow(frac.len() as u32);
    let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
    let frac: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
    let num = int.checked_mul(den).and_then(|v| v.checked_add(frac)).ok_or_else(bad)?;
    Ok(Ratio::new(num, den))
}

fn parse_rates<const N: usize>(s: &str) -> Result<[Rate; N], String> {
    let parts: Vec<Rate> = s.split(',').map(|p| parse_rate(p.trim())).collect::<Result<_, _>>()?;
    <[Rate; N]>::try_from(parts).map_err(|p| format!("expected {N} comma-separated rates, got {}", p.len()))
}

fn parse_plants(s: &str) -> Result<Vec<(String, usize)>, String> {
    s.split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let (phrase, count) = p.rsplit_once(':').ok_or_else(|| format!("expected phrase:count, got {p:?}"))?;
            let count = count.trim().parse().map_err(|_| format!("invalid count in {p:?}"))?;
            Ok((phrase.trim().to_string(), count))
        })
        .collect()
}

fn parse_regions(s: &str) -> Result<Vec<Region>, String> {
    let mut out: Vec<Region> = Vec::new();
    for part in s.split(',').map(str::trim) {
        let r: Region = part.parse().map_err(|e| format!("{e}"))?;
        if !out.contains(&r) {
            out.push(r);
        }
    }
    out.sort();
    Ok(out)
}

fn parse_date(s: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| format!("invalid date {s:?} (expected YYYY-MM-DD)"))
}

fn parse_num<T: FromStr>(s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("invalid number {s:?}"))
}

/// Fully resolved settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub taxonomy_path: Option<PathBuf>,
    pub dictionary_path: Option<PathBuf>,
    pub industry_token: IndustryToken,
    pub filter_mode: FilterMode,
    pub regions: Vec<Region>,
    pub window: CollectionWindow,
    pub output_dir: PathBuf,
    pub format: Format,
    pub top_k: usize,
    pub min_count: usize,
    /// Generator settings; dictionary, window and industry token are filled
    /// from the shared settings.
    pub synth: SynthConfig,
}

impl Settings {
    pub fn resolve(raw: &RawConfig) -> Result<Self, Error> {
        let defaults = SynthConfig::default();
        let industry = raw.get("industry_token").unwrap_or("semiconductor");
        let industry_token =
            IndustryToken::new(industry).map_err(|e| Error::Config(format!("industry_token: {e}")))?;
        let regions = raw.parsed("regions", parse_regions)?.unwrap_or_else(|| Region::ALL.to_vec());
        if regions.is_empty() {
            return Err(Error::Config("regions: at least one region is required".into()));
        }
        let start = raw.parsed("window_start", parse_date)?.unwrap_or(CollectionWindow::default().start);
        let end = raw.parsed("window_end", parse_date)?.unwrap_or(CollectionWindow::default().end);
        let window = CollectionWindow::new(start, end)
            .ok_or_else(|| Error::Config(format!("window_start {start} is after window_end {end}")))?;
        let existing = |key: &str| -> Result<Option<PathBuf>, Error> {
            match raw.get(key).map(PathBuf::from) {
                Some(p) if !p.exists() => Err(Error::Config(format!("{key}: {} does not exist", p.display()))),
                other => Ok(other),
            }
        };

        let synth = SynthConfig {
            seed: raw.parsed("seed", parse_num)?.unwrap_or(defaults.seed),
            n_postings: raw.parsed("n_postings", parse_num)?.unwrap_or(defaults.n_postings),
            region_mix: raw.parsed("region_mix", parse_rates::<3>)?.unwrap_or(defaults.region_mix),
            function_mix: raw.parsed("function_mix", parse_rates::<4>)?.unwrap_or(defaults.function_mix),
            off_industry_rate: raw.parsed("off_industry_rate", parse_rate)?.unwrap_or(defaults.off_industry_rate),
            multi_jst_rate_by_k: raw.parsed("multi_jst_rate_by_k", parse_rates::<5>)?.unwrap_or(defaults.multi_jst_rate_by_k),
            division_rate: raw.parsed("division_rate", parse_rate)?.unwrap_or(defaults.division_rate),
            onomastic_collision_rate: raw
                .parsed("onomastic_collision_rate", parse_rate)?
                .unwrap_or(defaults.onomastic_collision_rate),
            legal_suffix_rate: raw.parsed("legal_suffix_rate", parse_rate)?.unwrap_or(defaults.legal_suffix_rate),
            cross_region_repeat_count: raw
                .parsed("cross_region_repeat_count", parse_num)?
                .unwrap_or(defaults.cross_region_repeat_count),
            unknown_title_plants: match raw.values.get("unknown_title_plants") {
                Some(v) => parse_plants(v).map_err(|e| Error::Config(format!("unknown_title_plants: {e}")))?,
                None => defaults.unknown_title_plants,
            },
            employer_pool: raw.parsed("employer_pool", parse_num)?,
            industry_token: industry_token.as_str().to_string(),
            window,
            dictionary: defaults.dictionary,
        };
        synth.validate()?;

        let min_count = raw.parsed("min_count", parse_num)?.unwrap_or(DiscoveryConfig::DEFAULT_MIN_COUNT);
        if min_count == 0 {
            return Err(Error::Config("min_count: must be at least 1".into()));
        }
        Ok(Settings {
            taxonomy_path: existing("taxonomy_path")?,
            dictionary_path: existing("dictionary_path")?,
            industry_token,
            filter_mode: raw.parsed("filter_mode", |s| s.parse::<FilterMode>().map_err(|e| e.to_string()))?.unwrap_or_default(),
            regions,
            window,
            output_dir: raw.get("output_dir").map_or_else(|| PathBuf::from("."), PathBuf::from),
            format: raw.parsed("format", Format::from_str)?.unwrap_or_default(),
            top_k: raw.parsed("top_k", parse_num)?.unwrap_or(3),
            min_count,
            synth,
        })
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            industry_token: self.industry_token.clone(),
            filter_mode: self.filter_mode,
            top_k: self.top_k,
            discovery: DiscoveryConfig::with_min_count(self.min_count).expect("min_count validated"),
        }
    }

    /// Canonical `key = value` rendering of every setting that affects
    /// artifact content (the output directory does not).
    pub fn canonical(&self) -> String {
        let path = |p: &Option<PathBuf>| p.as_ref().map_or_else(|| "builtin".to_string(), |p| p.display().to_string());
        let rates = |r: &[Rate]| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let s = &self.synth;
        let mut out = String::new();
        let mut kv = |k: &str, v: String| writeln!(out, "{k} = {v}").unwrap();
        kv("taxonomy_path", path(&self.taxonomy_path));
        kv("dictionary_path", path(&self.dictionary_path));
        kv("industry_token", self.industry_token.to_string());
        kv("filter_mode", self.filter_mode.to_string());
        kv("regions", self.regions.iter().map(|r| r.code()).collect::<Vec<_>>().join(","));
        kv("window_start", self.window.start.to_string());
        kv("window_end", self.window.end.to_string());
        kv("format", format!("{:?}", self.format).to_lowercase());
        kv("top_k", self.top_k.to_string());
        kv("min_count", self.min_count.to_string());
        kv("seed", s.seed.to_string());
        kv("n_postings", s.n_postings.to_string());
        kv("region_mix", rates(&s.region_mix));
        kv("function_mix", rates(&s.function_mix));
        kv("off_industry_rate", s.off_industry_rate.to_string());
        kv("multi_jst_rate_by_k", rates(&s.multi_jst_rate_by_k));
        kv("division_rate", s.division_rate.to_string());
        kv("onomastic_collision_rate", s.onomastic_collision_rate.to_string());
        kv("legal_suffix_rate", s.legal_suffix_rate.to_string());
        kv("cross_region_repeat_count", s.cross_region_repeat_count.to_string());
        kv(
            "unknown_title_plants",
            s.unknown_title_plants.iter().map(|(p, c)| format!("{p}:{c}")).collect::<Vec<_>>().join("; "),
        );
        kv("employer_pool", s.employer_pool.map_or_else(|| "auto".to_string(), |p| p.to_string()));
        out
    }
}
