//! Artifact bodies. Everything here is a pure function of its inputs so
//! repeated runs produce identical bytes.

use num_rational::BigRational;
use num_traits::Zero;

use jobpulse_core::corpus::{Corpus, Diagnostic, Region};
use jobpulse_core::dedup::{CrossRegionGroup, DemandLedger};
use jobpulse_core::employers::{EmployerMapping, EmployerReport};
use jobpulse_core::matcher::{Candidate, MatchRecord};
use jobpulse_core::report::{render_decimal, render_percent, DemandTable, FunnelReport, RatioReport};
use jobpulse_core::synth::TruthRecord;
use jobpulse_core::taxonomy::{JstLevel, Taxonomy};

use crate::config::Format;

/// A header plus rows of cells, rendered as CSV or an aligned text table.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn csv(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header).expect("write to memory");
        for r in &self.rows {
            w.write_record(r).expect("write to memory");
        }
        w.into_inner().expect("flush to memory")
    }

    /// First column left-aligned, the rest right-aligned.
    pub fn text(&self) -> Vec<u8> {
        let width = |i: usize| {
            self.rows.iter().map(|r| r[i].chars().count()).chain([self.header[i].chars().count()]).max().unwrap_or(0)
        };
        let widths: Vec<usize> = (0..self.header.len()).map(width).collect();
        let line = |cells: &[String]| -> String {
            let mut s = String::new();
            for (i, (c, w)) in cells.iter().zip(&widths).enumerate() {
                if i == 0 {
                    s.push_str(&format!("{c:<w$}"));
                } else {
                    s.push_str(&format!("  {c:>w$}"));
                }
            }
            s.trim_end().to_string() + "\n"
        };
        let mut out = line(&self.header);
        out.push_str(&line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>()));
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out.into_bytes()
    }

    pub fn render(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Csv => self.csv(),
            Format::Text => self.text(),
        }
    }
}

fn exact(r: &BigRational) -> String {
    r.to_string()
}

pub fn funnel(f: &FunnelReport) -> Table {
    let mut t = Table::new(&["stage", "count", "reduction"]);
    for (i, s) in f.stages.iter().enumerate() {
        let reduction = match i.checked_sub(1).map(|j| f.reductions[j]) {
            Some(r) => render_percent(&BigRational::new((*r.numer()).into(), (*r.denom()).into()), 1),
            None => String::new(),
        };
        t.push(vec![s.label.clone(), s.count.to_string(), reduction]);
    }
    t
}

/// Rows with one-decimal region columns and total, the share of the table
/// total, and the exact total as a fraction.
pub fn demand(table: &DemandTable, with_family: bool) -> Table {
    let mut header = vec!["label"];
    if with_family {
        header.push("family");
    }
    header.extend(["LA", "SB", "SD", "total", "share", "exact_total"]);
    let mut t = Table::new(&header);
    let share = |v: &BigRational| {
        if table.grand_total.is_zero() {
            render_percent(&BigRational::zero(), 1)
        } else {
            render_percent(&(v / &table.grand_total), 1)
        }
    };
    let mut push = |label: &str, family: Option<&str>, by_region: &[BigRational; 3], total: &BigRational| {
        let mut row = vec![label.to_string()];
        if with_family {
            row.push(family.unwrap_or("").to_string());
        }
        row.extend(Region::ALL.iter().map(|r| render_decimal(&by_region[r.index()], 1)));
        row.extend([render_decimal(total, 1), share(total), exact(total)]);
        t.push(row);
    };
    for r in &table.rows {
        push(&r.label, r.family.as_deref(), &r.by_region, &r.total);
    }
    push("Total", None, &table.region_totals, &table.grand_total);
    t
}

pub fn ratio(label: &str, r: &RatioReport) -> Table {
    let mut t = Table::new(&["ratio", "value", "approx", "exact"]);
    t.push(vec![label.to_string(), render_decimal(&r.value, 2), format!("{}:{}", r.approx.0, r.approx.1), exact(&r.value)]);
    t
}

pub fn employer_summary(e: &EmployerReport, raw_names: usize) -> Table {
    let mut t = Table::new(&["metric", "value"]);
    let opt = |v: Option<String>| v.unwrap_or_else(|| "n/a".to_string());
    t.push(vec!["raw_employer_names".into(), raw_names.to_string()]);
    t.push(vec!["canonical_employers".into(), e.employer_count.to_string()]);
    t.push(vec!["demand_units".into(), render_decimal(&e.total_units, 1)]);
    t.push(vec!["unattributed_units".into(), render_decimal(&e.unattributed_units, 1)]);
    t.push(vec!["mean_units_per_employer".into(), opt(e.mean_units().map(|m| render_decimal(&m, 1)))]);
    t.push(vec![format!("top_{}_units", e.top_k), render_decimal(&e.top_units(), 1)]);
    t.push(vec![format!("top_{}_share", e.top_k), opt(e.top_share().map(|s| render_percent(&s, 1)))]);
    t
}

pub fn employer_ranking(e: &EmployerReport) -> Table {
    let mut t = Table::new(&["rank", "employer", "units", "share", "exact_units"]);
    for (i, c) in e.ranked.iter().enumerate() {
        let share = e.share_of(c).map_or_else(String::new, |s| render_percent(&s, 1));
        t.push(vec![(i + 1).to_string(), c.name.title_case(), render_decimal(&c.units, 1), share, exact(&c.units)]);
    }
    t
}

pub fn ledger(l: &DemandLedger, taxonomy: &Taxonomy) -> Table {
    let mut t = Table::new(&["job_id", "region", "function", "family", "title", "weight_num", "weight_den"]);
    for a in &l.assignments {
        let unit = l.unit(a);
        let jst = taxonomy.jst(a.jst);
        let family = taxonomy.family(jst.family);
        let title = match jst.level {
            JstLevel::Family => String::new(),
            JstLevel::Title => jst.phrase.title_case(),
        };
        t.push(vec![
            unit.job_id.clone(),
            unit.region.code().to_string(),
            family.function.label().to_string(),
            family.name.title_case(),
            title,
            a.weight.numer().to_string(),
            a.weight.denom().to_string(),
        ]);
    }
    t
}

pub fn mapping(m: &EmployerMapping) -> Table {
    let mut t = Table::new(&["raw_name", "canonical_name"]);
    for (raw, canon) in m.pairs() {
        t.push(vec![raw.to_string(), canon.title_case()]);
    }
    for raw in &m.rejected {
        t.push(vec![raw.clone(), String::new()]);
    }
    t
}

pub fn discovery(c: &[Candidate]) -> Table {
    let mut t = Table::new(&["phrase", "count"]);
    for x in c {
        t.push(vec![x.phrase.clone(), x.count.to_string()]);
    }
    t
}

pub fn diagnostics(corpus: &Corpus, d: &[Diagnostic]) -> Table {
    let mut t = Table::new(&["source", "line", "job_id", "reason"]);
    for x in d {
        t.push(vec![corpus.sources[x.source].clone(), x.line.to_string(), x.job_id.clone(), x.reason.to_string()]);
    }
    t
}

/// One row per JST hit. `kept` tells whether the posting passed the
/// industry filter.
pub fn matches<'a>(records: impl IntoIterator<Item = (&'a MatchRecord, bool)>, taxonomy: &Taxonomy) -> Table {
    let mut t = Table::new(&["job_id", "region", "jst", "in_title", "industry"]);
    for (r, kept) in records {
        for h in &r.hits {
            t.push(vec![
                r.job_id.clone(),
                r.region.code().to_string(),
                taxonomy.jst(h.jst).phrase.to_string(),
                h.in_title.to_string(),
                kept.to_string(),
            ]);
        }
    }
    t
}

pub fn cross_region(groups: &[CrossRegionGroup]) -> Table {
    let mut t = Table::new(&["group", "region", "job_id"]);
    for (i, g) in groups.iter().enumerate() {
        for (region, job) in &g.members {
            t.push(vec![(i + 1).to_string(), region.code().to_string(), job.clone()]);
        }
    }
    t
}

pub fn truth(records: &[TruthRecord], taxonomy: &Taxonomy) -> Table {
    let mut t = Table::new(&[
        "job_id",
        "region",
        "off_industry",
        "function",
        "jsts",
        "employer_name",
        "employer_company",
        "employer_canonical",
        "cross_region_group",
        "unknown_title",
    ]);
    for r in records {
        t.push(vec![
            r.job_id.clone(),
            r.region.code().to_string(),
            r.off_industry.to_string(),
            r.function.label().to_string(),
            r.jsts.iter().map(|j| taxonomy.jst(*j).phrase.to_string()).collect::<Vec<_>>().join(";"),
            r.employer_name.clone(),
            r.employer_company.to_string(),
            r.employer_canonical.title_case(),
            r.cross_region_group.map_or_else(String::new, |g| (g + 1).to_string()),
            r.unknown_title.clone().unwrap_or_default(),
        ]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_tables_align() {
        let mut t = Table::new(&["stage", "count"]);
        t.push(vec!["raw observations".into(), "12084".into()]);
        t.push(vec!["demand units".into(), "4044".into()]);
        let s = String::from_utf8(t.text()).unwrap();
        assert_eq!(
            s,
            "stage             count\n----------------  -----\nraw observations  12084\ndemand units       4044\n"
        );
    }

    #[test]
    fn csv_quotes_when_needed() {
        let mut t = Table::new(&["raw_name", "canonical_name"]);
        t.push(vec!["Acme, Inc".into(), "Acme".into()]);
        assert_eq!(String::from_utf8(t.csv()).unwrap(), "raw_name,canonical_name\n\"Acme, Inc\",Acme\n");
    }
}
