//! Aggregation of the demand ledger into funnel, demand tables and ratios.
//!
//! Totals stay exact rationals; decimals appear only when rendering, with
//! round-half-away-from-zero.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, ToPrimitive, Zero};

use crate::corpus::Region;
use crate::dedup::{to_big, DemandLedger};
use crate::taxonomy::{JobFunction, JstId, JstLevel, Taxonomy};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReportError {
    #[error("stage {stage:?} has {count} records, more than the {previous} before it")]
    IncreasingStage { stage: String, count: u64, previous: u64 },
    #[error("ratio denominator is zero")]
    ZeroDenominator,
    #[error("ratio operands must be positive")]
    NonPositive,
}

/// Render `value` with `places` decimals, rounding half away from zero.
pub fn render_decimal(value: &BigRational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let scaled = value * BigRational::from_integer(scale.clone());
    let negative = scaled.is_negative();
    let abs = scaled.abs();
    let (q, r) = abs.numer().div_rem(abs.denom());
    let rounded = if r * BigInt::from(2) >= *abs.denom() { q + 1 } else { q };
    let (int, frac) = rounded.div_rem(&scale);
    let mut out = String::new();
    if negative && !rounded.is_zero() {
        out.push('-');
    }
    out.push_str(&int.to_string());
    if places > 0 {
        let digits = frac.to_string();
        out.push('.');
        for _ in digits.len()..places as usize {
            out.push('0');
        }
        out.push_str(&digits);
    }
    out
}

/// `fraction` × 100 with a trailing `%`.
pub fn render_percent(fraction: &BigRational, places: u32) -> String {
    let mut s = render_decimal(&(fraction * BigRational::from_integer(BigInt::from(100))), places);
    s.push('%');
    s
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunnelStage {
    pub label: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunnelReport {
    pub stages: Vec<FunnelStage>,
    /// `reductions[i]` is the fraction lost between stage `i` and `i + 1`.
    pub reductions: Vec<Ratio<u64>>,
}

impl FunnelReport {
    pub fn count(&self, label: &str) -> Option<u64> {
        self.stages.iter().find(|s| s.label == label).map(|s| s.count)
    }
}

/// Stage counts in pipeline order; counts may not grow.
pub fn build_funnel(stages: &[(&str, u64)]) -> Result<FunnelReport, ReportError> {
    let mut reductions = Vec::new();
    for w in stages.windows(2) {
        let ((_, prev), (label, cur)) = (w[0], w[1]);
        if cur > prev {
            return Err(ReportError::IncreasingStage { stage: label.to_string(), count: cur, previous: prev });
        }
        reductions.push(if prev == 0 { Ratio::new(0, 1) } else { Ratio::new(prev - cur, prev) });
    }
    Ok(FunnelReport {
        stages: stages.iter().map(|(l, c)| FunnelStage { label: l.to_string(), count: *c }).collect(),
        reductions,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DemandLevel {
    Function,
    Family,
    /// One row per JST: family-level terms and titles.
    Title,
    Region,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandRow {
    pub label: String,
    pub function: Option<JobFunction>,
    /// Family the row belongs to, for title-level rows.
    pub family: Option<String>,
    /// Indexed by [`Region::index`].
    pub by_region: [BigRational; 3],
    pub total: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandTable {
    pub level: DemandLevel,
    pub rows: Vec<DemandRow>,
    pub region_totals: [BigRational; 3],
    pub grand_total: BigRational,
}

fn zeros() -> [BigRational; 3] {
    [BigRational::zero(), BigRational::zero(), BigRational::zero()]
}

impl DemandTable {
    fn from_rows(level: DemandLevel, mut rows: Vec<DemandRow>) -> Self {
        rows.sort_by(|a, b| b.total.cmp(&a.total).then_with(|| a.label.cmp(&b.label)));
        let mut region_totals = zeros();
        for r in &rows {
            for (acc, v) in region_totals.iter_mut().zip(&r.by_region) {
                *acc += v;
            }
        }
        let grand_total = region_totals.iter().fold(BigRational::zero(), |a, v| a + v);
        DemandTable { level, rows, region_totals, grand_total }
    }

    /// Rows belonging to one job function, with totals recomputed.
    pub fn restrict(&self, function: JobFunction) -> DemandTable {
        let rows = self.rows.iter().filter(|r| r.function == Some(function)).cloned().collect();
        DemandTable::from_rows(self.level, rows)
    }

    pub fn row(&self, label: &str) -> Option<&DemandRow> {
        self.rows.iter().find(|r| r.label == label)
    }

    /// Share of the grand total held by `label`.
    pub fn share(&self, label: &str) -> Option<BigRational> {
        let row = self.row(label)?;
        (!self.grand_total.is_zero()).then(|| row.total.clone() / &self.grand_total)
    }
}

/// Exact demand grouped by `level`. Every group the taxonomy defines gets a
/// row, zero or not; rows are ordered by total descending, then label.
pub fn demand_by(level: DemandLevel, ledger: &DemandLedger, taxonomy: &Taxonomy) -> DemandTable {
    let key = |jst: JstId, region: Region| -> usize {
        match level {
            DemandLevel::Function => taxonomy.function_of(jst) as usize,
            DemandLevel::Family => taxonomy.jst(jst).family.0 as usize,
            DemandLevel::Title => jst.index(),
            DemandLevel::Region => region.index(),
        }
    };
    // Group sums of 1/k kept as integer counts per k to avoid big-rational
    // additions on every assignment.
    let mut counts: BTreeMap<usize, [BTreeMap<u64, u64>; 3]> = BTreeMap::new();
    for a in &ledger.assignments {
        let region = ledger.unit(a).region;
        let slot = counts.entry(key(a.jst, region)).or_default();
        *slot[region.index()].entry(*a.weight.denom()).or_default() += *a.weight.numer();
    }
    let sum = |k: usize| -> [BigRational; 3] {
        let mut out = zeros();
        if let Some(by_region) = counts.get(&k) {
            for (o, per_den) in out.iter_mut().zip(by_region) {
                for (&den, &num) in per_den {
                    *o += to_big(Ratio::new_raw(num, den));
                }
            }
        }
        out
    };
    let row = |k: usize, label: String, function: Option<JobFunction>, family: Option<String>| {
        let by_region = sum(k);
        let total = by_region.iter().fold(BigRational::zero(), |a, v| a + v);
        DemandRow { label, function, family, by_region, total }
    };

    let rows: Vec<DemandRow> = match level {
        DemandLevel::Function => JobFunction::ALL
            .iter()
            .map(|&f| row(f as usize, f.label().to_string(), Some(f), None))
            .collect(),
        DemandLevel::Family => taxonomy
            .families()
            .iter()
            .enumerate()
            .map(|(i, f)| row(i, f.name.title_case(), Some(f.function), None))
            .collect(),
        DemandLevel::Title => taxonomy
            .jst_ids()
            .map(|id| {
                let j = taxonomy.jst(id);
                let family = taxonomy.family(j.family);
                let fam = match j.level {
                    JstLevel::Family => None,
                    JstLevel::Title => Some(family.name.title_case()),
                };
                row(id.index(), j.phrase.title_case(), Some(family.function), fam)
            })
            .collect(),
        DemandLevel::Region => Region::ALL.iter().map(|&r| row(r.index(), r.code().to_string(), None, None)).collect(),
    };
    DemandTable::from_rows(level, rows)
}

/// `a / b` as a decimal plus the closest unit ratio: `1:q` when `a < b`,
/// `p:1` otherwise, with the free term in `1..=10`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioReport {
    pub value: BigRational,
    pub approx: (u32, u32),
}

impl fmt::Display for RatioReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (≈ {}:{})", render_decimal(&self.value, 2), self.approx.0, self.approx.1)
    }
}

pub const RATIO_LIMIT: u32 = 10;

pub fn ratio(a: &BigRational, b: &BigRational) -> Result<RatioReport, ReportError> {
    if b.is_zero() {
        return Err(ReportError::ZeroDenominator);
    }
    if !a.is_positive() || !b.is_positive() {
        return Err(ReportError::NonPositive);
    }
    let value = a / b;
    Ok(RatioReport { approx: nearest_unit_ratio(&value, RATIO_LIMIT), value })
}

/// Closest ratio to `x > 0` among `1:1 ..= 1:limit` and `1:1 ..= limit:1`,
/// by absolute difference in value. Ties go to the smaller free term.
pub fn nearest_unit_ratio(x: &BigRational, limit: u32) -> (u32, u32) {
    let one = BigRational::from_integer(BigInt::from(1));
    let limit = limit.max(1);
    if *x >= one {
        // candidates p/1: floor(x) and floor(x) + 1
        let lo = x.floor().to_integer().to_u32().unwrap_or(u32::MAX).min(limit);
        let hi = (lo + 1).min(limit);
        let d = |p: u32| (x - BigRational::from_integer(BigInt::from(p))).abs();
        return if d(hi) < d(lo) { (hi, 1) } else { (lo, 1) };
    }
    // candidates 1/q around 1/x: q = floor(1/x) and floor(1/x) + 1
    let inv = x.recip();
    let lo = inv.floor().to_integer().to_u32().unwrap_or(u32::MAX).min(limit);
    let hi = (lo + 1).min(limit);
    let d = |q: u32| (x - BigRational::new(BigInt::from(1), BigInt::from(q))).abs();
    match d(lo).cmp(&d(hi)) {
        Ordering::Greater => (1, hi),
        _ => (1, lo),
    }
}

/// Sum of rendered one-decimal values minus the exact total.
pub fn rounding_gap(table: &DemandTable, places: u32) -> BigRational {
    let scale = BigRational::from_integer(BigInt::from(10u32).pow(places));
    let rendered = table.rows.iter().fold(BigRational::zero(), |acc, r| {
        let s = render_decimal(&r.total, places);
        let digits: String = s.chars().filter(|c| *c != '.').collect();
        acc + BigRational::from_integer(digits.parse::<BigInt>().unwrap()) / &scale
    });
    rendered - &table.grand_total
}

pub fn fraction(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
