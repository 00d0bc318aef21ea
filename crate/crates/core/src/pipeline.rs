//! End-to-end composition: match, filter by industry, weight, canonicalize
//! employers, and tabulate.

use alloc::vec::Vec;

use crate::corpus::Posting;
use crate::dedup::{cross_region_groups, weight_assignments, CrossRegionGroup, DedupError, DemandLedger};
use crate::employers::{employer_stats, Canonicalizer, EmployerError, EmployerMapping, EmployerReport};
use crate::matcher::{
    discover_candidate_titles, industry_filter, Candidate, DiscoveryConfig, FilterMode, IndustryToken, MatchRecord,
    Matcher,
};
use crate::report::{build_funnel, demand_by, DemandLevel, DemandTable, FunnelReport, ReportError};
use crate::taxonomy::Taxonomy;

pub const STAGE_RAW: &str = "raw observations";
pub const STAGE_INDUSTRY: &str = "industry observations";
pub const STAGE_UNITS: &str = "demand units";

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Dedup(#[from] DedupError),
    #[error(transparent)]
    Employer(#[from] EmployerError),
    #[error(transparent)]
    Report(#[from] ReportError),
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub industry_token: IndustryToken,
    pub filter_mode: FilterMode,
    pub top_k: usize,
    pub discovery: DiscoveryConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            industry_token: IndustryToken::new("semiconductor").unwrap(),
            filter_mode: FilterMode::default(),
            top_k: 3,
            discovery: DiscoveryConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    /// Matched postings that passed the industry filter.
    pub records: Vec<MatchRecord>,
    /// Postings with at least one JST hit, before the industry filter.
    pub matched_postings: usize,
    pub funnel: FunnelReport,
    pub ledger: DemandLedger,
    pub mapping: EmployerMapping,
    pub employers: EmployerReport,
    pub by_function: DemandTable,
    pub by_family: DemandTable,
    pub by_title: DemandTable,
    pub by_region: DemandTable,
    pub cross_region: Vec<CrossRegionGroup>,
    pub candidates: Vec<Candidate>,
}

/// Match every posting. Returns records in posting order; postings with no
/// hit are skipped.
pub fn match_all(postings: &[Posting], taxonomy: &Taxonomy) -> Vec<MatchRecord> {
    let m = Matcher::new(taxonomy);
    postings.iter().filter_map(|p| m.match_posting(p)).collect()
}

/// Run every stage after matching. `matches[i]` must be the match result of
/// `postings[i]`.
pub fn run_with_matches(
    postings: &[Posting],
    matches: Vec<Option<MatchRecord>>,
    taxonomy: &Taxonomy,
    canonicalizer: &Canonicalizer,
    config: &PipelineConfig,
) -> Result<PipelineOutput, PipelineError> {
    debug_assert_eq!(postings.len(), matches.len());
    let keep: Vec<bool> =
        postings.iter().map(|p| industry_filter(p, &config.industry_token, config.filter_mode)).collect();

    let (mut raw, mut kept_obs, mut matched_postings) = (0u64, 0u64, 0usize);
    let mut records = Vec::new();
    for (r, k) in matches.into_iter().zip(&keep) {
        let Some(r) = r else { continue };
        matched_postings += 1;
        raw += r.hits.len() as u64;
        if *k {
            kept_obs += r.hits.len() as u64;
            records.push(r);
        }
    }
    let funnel =
        build_funnel(&[(STAGE_RAW, raw), (STAGE_INDUSTRY, kept_obs), (STAGE_UNITS, records.len() as u64)])?;

    let ledger = weight_assignments(&records)?;
    let mapping = canonicalizer.canonicalize(ledger.units.iter().map(|u| u.employer_name.as_str()));
    let employers = employer_stats(&ledger, &mapping, config.top_k)?;

    let in_industry = postings.iter().zip(&keep).filter(|(_, k)| **k).map(|(p, _)| p);
    let cross_region = cross_region_groups(in_industry.clone());
    let candidates = discover_candidate_titles(in_industry, taxonomy, &config.discovery);

    Ok(PipelineOutput {
        by_function: demand_by(DemandLevel::Function, &ledger, taxonomy),
        by_family: demand_by(DemandLevel::Family, &ledger, taxonomy),
        by_title: demand_by(DemandLevel::Title, &ledger, taxonomy),
        by_region: demand_by(DemandLevel::Region, &ledger, taxonomy),
        records,
        matched_postings,
        funnel,
        ledger,
        mapping,
        employers,
        cross_region,
        candidates,
    })
}

pub fn run(
    postings: &[Posting],
    taxonomy: &Taxonomy,
    canonicalizer: &Canonicalizer,
    config: &PipelineConfig,
) -> Result<PipelineOutput, PipelineError> {
    let m = Matcher::new(taxonomy);
    let matches = postings.iter().map(|p| m.match_posting(p)).collect();
    run_with_matches(postings, matches, taxonomy, canonicalizer, config)
}
