//! Command-line entry point.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use jobpulse_core::corpus::{Corpus, Diagnostic, Region, RejectReason};
use jobpulse_core::dedup::{cross_region_groups, weight_assignments};
use jobpulse_core::matcher::{discover_candidate_titles, industry_filter, MatchRecord, Matcher};
use jobpulse_core::pipeline::{run_with_matches, PipelineOutput};
use jobpulse_core::report::ratio;
use jobpulse_core::synth::generate;
use jobpulse_core::taxonomy::{JobFunction, Taxonomy};
use jobpulse_core::Canonicalizer;

use crate::config::{RawConfig, Settings, CONFIG_ENV};
use crate::error::Error;
use crate::files::{self, load_dictionary, load_postings, load_taxonomy, BUILTIN_TAXONOMY};
use crate::manifest::Manifest;
use crate::render;

#[derive(Debug, Parser)]
#[command(name = "jobpulse", version, about = "Job-posting demand pipeline")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate posting files and write record diagnostics.
    Ingest(InputArgs),
    /// Match postings against the taxonomy and apply the industry filter.
    Match(InputArgs),
    /// Split each posting's unit of demand across its terms.
    Dedup(InputArgs),
    /// Canonicalize employer names.
    Disambiguate(InputArgs),
    /// Run the full pipeline: funnel, demand tables and employer report.
    Report(InputArgs),
    /// List frequent title phrases the taxonomy does not cover.
    Discover(InputArgs),
    /// Generate a synthetic corpus with ground truth.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Config file (`key = value` lines); falls back to $JOBPULSE_CONFIG.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub taxonomy: Option<PathBuf>,
    /// Extra common-word tokens for employer canonicalization.
    #[arg(long)]
    pub dictionary: Option<PathBuf>,
    #[arg(long)]
    pub industry_token: Option<String>,
    /// any_field or all_fields.
    #[arg(long)]
    pub filter_mode: Option<String>,
    /// Comma-separated subset of LA,SB,SD.
    #[arg(long)]
    pub regions: Option<String>,
    #[arg(long)]
    pub window_start: Option<String>,
    #[arg(long)]
    pub window_end: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or text.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub top_k: Option<String>,
    /// Minimum posting count for discovered phrases.
    #[arg(long)]
    pub min_count: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Posting files (one JSON record per line).
    #[arg(long, num_args = 1.., required = true)]
    pub input: Vec<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub n_postings: Option<String>,
}

impl CommonArgs {
    fn settings(&self, extra: &[(&str, Option<&String>)]) -> Result<Settings, Error> {
        let path = self.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        let mut raw = match path {
            Some(p) => RawConfig::parse_file(&p)?,
            None => RawConfig::default(),
        };
        let path_str = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let flags = [
            ("taxonomy_path", path_str(&self.taxonomy)),
            ("dictionary_path", path_str(&self.dictionary)),
            ("output_dir", path_str(&self.out)),
            ("industry_token", self.industry_token.clone()),
            ("filter_mode", self.filter_mode.clone()),
            ("regions", self.regions.clone()),
            ("window_start", self.window_start.clone()),
            ("window_end", self.window_end.clone()),
            ("format", self.format.clone()),
            ("top_k", self.top_k.clone()),
            ("min_count", self.min_count.clone()),
        ];
        for (k, v) in flags {
            if let Some(v) = v {
                raw.set(k, v);
            }
        }
        for (k, v) in extra {
            if let Some(v) = v {
                raw.set(k, v.as_str());
            }
        }
        Settings::resolve(&raw)
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, Error> {
    std::fs::read(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

/// Inputs shared by every pipeline subcommand.
struct Loaded {
    settings: Settings,
    taxonomy: Taxonomy,
    corpus: Corpus,
    diagnostics: Vec<Diagnostic>,
    manifest: Manifest,
}

fn load(command: &str, args: &InputArgs) -> Result<Loaded, Error> {
    let settings = args.common.settings(&[])?;
    let (taxonomy, warnings) = load_taxonomy(settings.taxonomy_path.as_deref())?;
    for w in &warnings {
        eprintln!("jobpulse: warning: taxonomy: {w}");
    }
    let mut manifest = Manifest::new(&settings.output_dir, command, &settings.canonical());
    let taxonomy_bytes = match &settings.taxonomy_path {
        Some(p) => read_bytes(p)?,
        None => BUILTIN_TAXONOMY.as_bytes().to_vec(),
    };
    manifest.set("taxonomy.sha256", crate::manifest::sha256_hex(&taxonomy_bytes));
    if let Some(p) = &settings.dictionary_path {
        manifest.set("dictionary.sha256", crate::manifest::sha256_hex(&read_bytes(p)?));
    }
    for (i, p) in args.input.iter().enumerate() {
        manifest.input(i + 1, p, &read_bytes(p)?);
    }
    let (corpus, diagnostics) = load_postings(&args.input, settings.window, &settings.regions)?;
    for d in &diagnostics {
        eprintln!("jobpulse: {}:{}: {}", corpus.sources[d.source], d.line, d.reason);
    }
    manifest.count("postings", corpus.postings.len());
    manifest.count("rejected", diagnostics.len());
    manifest.write("diagnostics.csv", &render::diagnostics(&corpus, &diagnostics).csv())?;
    Ok(Loaded { settings, taxonomy, corpus, diagnostics, manifest })
}

/// Repeated `(job_id, region)` keys break the one-unit-per-posting contract.
fn check_contract(loaded: &Loaded) -> Result<(), Error> {
    let dups = loaded.diagnostics.iter().filter(|d| matches!(d.reason, RejectReason::DuplicateKey { .. })).count();
    if dups > 0 {
        return Err(Error::Contract(format!("{dups} duplicate (job_id, region) record(s); see diagnostics.csv")));
    }
    Ok(())
}

fn match_parallel(postings: &[jobpulse_core::Posting], taxonomy: &Taxonomy) -> Vec<Option<MatchRecord>> {
    let m = Matcher::new(taxonomy);
    postings.par_iter().map(|p| m.match_posting(p)).collect()
}

fn full_pipeline(l: &Loaded) -> Result<PipelineOutput, Error> {
    let dictionary = load_dictionary(l.settings.dictionary_path.as_deref())?;
    let matches = match_parallel(&l.corpus.postings, &l.taxonomy);
    Ok(run_with_matches(&l.corpus.postings, matches, &l.taxonomy, &Canonicalizer::new(dictionary), &l.settings.pipeline())?)
}

fn ingest(args: &InputArgs) -> Result<(), Error> {
    let l = load("ingest", args)?;
    check_contract(&l)?;
    l.manifest.finish()?;
    Ok(())
}

fn match_cmd(args: &InputArgs) -> Result<(), Error> {
    let mut l = load("match", args)?;
    check_contract(&l)?;
    let matches = match_parallel(&l.corpus.postings, &l.taxonomy);
    let cfg = l.settings.pipeline();
    let rows: Vec<(&MatchRecord, bool)> = l
        .corpus
        .postings
        .iter()
        .zip(&matches)
        .filter_map(|(p, m)| m.as_ref().map(|m| (m, industry_filter(p, &cfg.industry_token, cfg.filter_mode))))
        .collect();
    l.manifest.count("matched_postings", rows.len());
    l.manifest.count("industry_postings", rows.iter().filter(|(_, k)| *k).count());
    l.manifest.write("matches.csv", &render::matches(rows.iter().copied(), &l.taxonomy).csv())?;
    l.manifest.finish()?;
    Ok(())
}

fn dedup(args: &InputArgs) -> Result<(), Error> {
    let mut l = load("dedup", args)?;
    check_contract(&l)?;
    let cfg = l.settings.pipeline();
    let matches = match_parallel(&l.corpus.postings, &l.taxonomy);
    let kept: Vec<MatchRecord> = l
        .corpus
        .postings
        .iter()
        .zip(matches)
        .filter(|(p, _)| industry_filter(p, &cfg.industry_token, cfg.filter_mode))
        .filter_map(|(_, m)| m)
        .collect();
    let ledger = weight_assignments(&kept).map_err(jobpulse_core::pipeline::PipelineError::from)?;
    let groups = cross_region_groups(
        l.corpus.postings.iter().filter(|p| industry_filter(p, &cfg.industry_token, cfg.filter_mode)),
    );
    l.manifest.count("demand_units", ledger.unit_count());
    l.manifest.count("assignments", ledger.assignments.len());
    l.manifest.count("cross_region_groups", groups.len());
    l.manifest.write("ledger.csv", &render::ledger(&ledger, &l.taxonomy).csv())?;
    l.manifest.write("cross_region.csv", &render::cross_region(&groups).csv())?;
    l.manifest.finish()?;
    Ok(())
}

fn disambiguate(args: &InputArgs) -> Result<(), Error> {
    let mut l = load("disambiguate", args)?;
    check_contract(&l)?;
    let out = full_pipeline(&l)?;
    l.manifest.count("raw_employer_names", out.mapping.raw_count());
    l.manifest.count("canonical_employers", out.mapping.employers.len());
    l.manifest.write("employers.csv", &render::mapping(&out.mapping).csv())?;
    l.manifest.finish()?;
    Ok(())
}

const FUNCTION_TABLES: [(JobFunction, &str); 4] = [
    (JobFunction::Scientist, "demand_scientist"),
    (JobFunction::Engineer, "demand_engineer"),
    (JobFunction::Technician, "demand_technician"),
    (JobFunction::OperationalSupport, "demand_operational_support"),
];

fn report(args: &InputArgs) -> Result<(), Error> {
    let mut l = load("report", args)?;
    check_contract(&l)?;
    let out = full_pipeline(&l)?;
    let format = l.settings.format;
    let m = &mut l.manifest;
    m.count("matched_postings", out.matched_postings);
    m.count("demand_units", out.ledger.unit_count());
    m.count("raw_employer_names", out.mapping.raw_count());
    m.count("canonical_employers", out.employers.employer_count);

    let mut tables = vec![
        ("funnel".to_string(), render::funnel(&out.funnel)),
        ("demand_functions".to_string(), render::demand(&out.by_function, false)),
        ("demand_regions".to_string(), render::demand(&out.by_region, false)),
        ("demand_families".to_string(), render::demand(&out.by_family, false)),
    ];
    for (f, stem) in FUNCTION_TABLES {
        tables.push((stem.to_string(), render::demand(&out.by_title.restrict(f), true)));
    }
    let total = |f: JobFunction| out.by_function.row(f.label()).map(|r| r.total.clone()).unwrap_or_default();
    match ratio(&total(JobFunction::Technician), &total(JobFunction::Engineer)) {
        Ok(r) => tables.push(("ratio".to_string(), render::ratio("technician:engineer", &r))),
        Err(e) => eprintln!("jobpulse: warning: technician:engineer ratio not reported: {e}"),
    }
    tables.push(("employer_summary".to_string(), render::employer_summary(&out.employers, out.mapping.raw_count())));
    tables.push(("employer_ranking".to_string(), render::employer_ranking(&out.employers)));
    for (stem, t) in &tables {
        m.write(&format!("{stem}.{}", format.extension()), &t.render(format))?;
    }
    m.write("ledger.csv", &render::ledger(&out.ledger, &l.taxonomy).csv())?;
    m.write("employers.csv", &render::mapping(&out.mapping).csv())?;
    m.write("cross_region.csv", &render::cross_region(&out.cross_region).csv())?;
    m.write("discovery.csv", &render::discovery(&out.candidates).csv())?;
    l.manifest.finish()?;
    Ok(())
}

fn discover(args: &InputArgs) -> Result<(), Error> {
    let mut l = load("discover", args)?;
    check_contract(&l)?;
    let cfg = l.settings.pipeline();
    let in_industry = l.corpus.postings.iter().filter(|p| industry_filter(p, &cfg.industry_token, cfg.filter_mode));
    let candidates = discover_candidate_titles(in_industry, &l.taxonomy, &cfg.discovery);
    l.manifest.count("candidates", candidates.len());
    l.manifest.write("discovery.csv", &render::discovery(&candidates).csv())?;
    l.manifest.finish()?;
    Ok(())
}

fn synth(args: &SynthArgs) -> Result<(), Error> {
    let mut settings = args.common.settings(&[("seed", args.seed.as_ref()), ("n_postings", args.n_postings.as_ref())])?;
    settings.synth.dictionary = load_dictionary(settings.dictionary_path.as_deref())?;
    let (taxonomy, _) = load_taxonomy(settings.taxonomy_path.as_deref())?;
    let out = generate(&settings.synth, &taxonomy)?;

    let mut m = Manifest::new(&settings.output_dir, "synth", &settings.canonical());
    m.count("postings", out.postings.len());
    for r in Region::ALL {
        let postings: Vec<_> = out.postings.iter().filter(|p| p.region == r).collect();
        m.count(&format!("postings.{}", r.code()), postings.len());
        if !postings.is_empty() {
            m.write(&format!("{}.jsonl", r.code().to_lowercase()), &files::postings_jsonl(postings))?;
        }
    }
    m.write("truth.csv", &render::truth(&out.truth, &taxonomy).csv())?;
    m.finish()?;
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Ingest(a) => ingest(a),
        Command::Match(a) => match_cmd(a),
        Command::Dedup(a) => dedup(a),
        Command::Disambiguate(a) => disambiguate(a),
        Command::Report(a) => report(a),
        Command::Discover(a) => discover(a),
        Command::Synth(a) => synth(a),
    }
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!("jobpulse: {}", msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: "));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("jobpulse: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
