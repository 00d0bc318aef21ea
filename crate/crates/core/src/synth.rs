//! Seeded synthetic corpus with ground truth.
//!
//! The generator plants exactly the phenomena the pipeline's rules cover:
//! JST phrases embedded verbatim in descriptions, off-industry postings that
//! never mention the industry token, corporate divisions that extend a parent
//! name, distinct employers that share a common leading word, cross-region
//! reposts under fresh job ids, and a few titles the taxonomy lacks.
//!
//! Stratum sizes (off-industry share, function mix, region mix, JSTs per
//! posting) are apportioned exactly with largest remainders, then shuffled,
//! so realized proportions differ from the configured ones only by rounding.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use chrono::{Days, NaiveDate};
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use rand::seq::{index, IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{CollectionWindow, Posting, Region};
use crate::employers::{Canonicalizer, NameDictionary};
use crate::matcher::IndustryToken;
use crate::taxonomy::{JobFunction, JstId, Taxonomy};
use crate::text::{bridge_hyphens, contains_run, normalize_text, Phrase};

pub type Rate = Ratio<u64>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthError {
    #[error("{name} must lie in [0, 1]")]
    RateOutOfRange { name: &'static str },
    #[error("{name} must sum to exactly 1")]
    MixNotUnit { name: &'static str },
    #[error("{function} needs {needed} plantable terms but the taxonomy offers {available}")]
    NotEnoughTerms { function: JobFunction, needed: usize, available: usize },
    #[error("planted title {phrase:?}: {reason}")]
    BadPlant { phrase: String, reason: &'static str },
    #[error("{planted} planted titles but only {available} in-industry postings")]
    TooManyPlants { planted: usize, available: usize },
    #[error("industry token {0:?} is not a single token or is itself a JST")]
    BadIndustryToken(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_postings: usize,
    /// LA, SB, SD.
    pub region_mix: [Rate; 3],
    /// Scientist, Engineer, Technician, OperationalSupport.
    pub function_mix: [Rate; 4],
    pub off_industry_rate: Rate,
    /// Probability of a posting carrying k = 1..=5 JSTs.
    pub multi_jst_rate_by_k: [Rate; 5],
    /// Share of employer names that belong to a parent-plus-divisions family.
    pub division_rate: Rate,
    /// Share of stand-alone employers whose name opens with a common word.
    pub onomastic_collision_rate: Rate,
    pub legal_suffix_rate: Rate,
    /// Extra reposts of an existing posting in another region.
    pub cross_region_repeat_count: usize,
    pub unknown_title_plants: Vec<(String, usize)>,
    /// Distinct raw employer names; `None` scales with the in-industry count.
    pub employer_pool: Option<usize>,
    pub industry_token: String,
    pub window: CollectionWindow,
    pub dictionary: NameDictionary,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 42,
            n_postings: 13_000,
            region_mix: [Rate::new(3, 4), Rate::new(1, 10), Rate::new(3, 20)],
            function_mix: [Rate::new(1, 10), Rate::new(2, 3), Rate::new(1, 5), Rate::new(1, 30)],
            off_industry_rate: Rate::new(1, 3),
            multi_jst_rate_by_k: [Rate::new(3, 10), Rate::new(7, 20), Rate::new(1, 5), Rate::new(1, 10), Rate::new(1, 20)],
            division_rate: Rate::new(3, 20),
            onomastic_collision_rate: Rate::new(1, 10),
            legal_suffix_rate: Rate::new(1, 5),
            cross_region_repeat_count: 7,
            unknown_title_plants: vec![
                ("microelectronics technician".to_string(), 12),
                ("rf engineer".to_string(), 5),
                ("radar engineer".to_string(), 3),
            ],
            employer_pool: None,
            industry_token: "semiconductor".to_string(),
            window: CollectionWindow::default(),
            dictionary: NameDictionary::default(),
        }
    }
}

/// Raw employer names per demand unit in the reference data (1,269 names
/// behind 4,044 units).
const NAMES_PER_UNIT: Rate = Rate::new_raw(1269, 4044);

fn check_rate(r: &Rate, name: &'static str) -> Result<(), SynthError> {
    if *r.denom() == 0 || r > &Rate::one() {
        return Err(SynthError::RateOutOfRange { name });
    }
    Ok(())
}

fn check_mix(mix: &[Rate], name: &'static str) -> Result<(), SynthError> {
    for r in mix {
        check_rate(r, name)?;
    }
    let sum = mix
        .iter()
        .fold(BigRational::zero(), |acc, r| acc + BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom())));
    if !sum.is_one() {
        return Err(SynthError::MixNotUnit { name });
    }
    Ok(())
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        check_mix(&self.region_mix, "region_mix")?;
        check_mix(&self.function_mix, "function_mix")?;
        check_mix(&self.multi_jst_rate_by_k, "multi_jst_rate_by_k")?;
        check_rate(&self.off_industry_rate, "off_industry_rate")?;
        check_rate(&self.division_rate, "division_rate")?;
        check_rate(&self.onomastic_collision_rate, "onomastic_collision_rate")?;
        check_rate(&self.legal_suffix_rate, "legal_suffix_rate")?;
        IndustryToken::new(&self.industry_token).map_err(|_| SynthError::BadIndustryToken(self.industry_token.clone()))?;
        Ok(())
    }
}

/// Split `n` items across `mix` exactly (largest remainder, ties to the
/// lower index).
pub fn apportion(n: usize, mix: &[Rate]) -> Vec<usize> {
    let n = n as u128;
    let mut counts = Vec::with_capacity(mix.len());
    let mut rems = Vec::with_capacity(mix.len());
    for (i, r) in mix.iter().enumerate() {
        let (num, den) = (*r.numer() as u128, *r.denom() as u128);
        counts.push(((n * num) / den) as usize);
        rems.push((i, (n * num) % den, den));
    }
    let assigned: usize = counts.iter().sum();
    // remainder a/b > c/d  <=>  a*d > c*b
    rems.sort_by(|x, y| (y.1 * x.2).cmp(&(x.1 * y.2)).then(x.0.cmp(&y.0)));
    for &(i, _, _) in rems.iter().take((n as usize).saturating_sub(assigned)) {
        counts[i] += 1;
    }
    counts
}

fn expand<T: Copy>(counts: &[usize], values: &[T]) -> Vec<T> {
    counts.iter().zip(values).flat_map(|(&c, &v)| core::iter::repeat_n(v, c)).collect()
}

fn chance(rng: &mut ChaCha8Rng, rate: &Rate) -> bool {
    *rate.numer() > 0 && rng.random_range(0..*rate.denom()) < *rate.numer()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EmployerKind {
    Standalone,
    /// Stand-alone employer whose name opens with common words.
    Collision,
    /// A bare run of common words, e.g. `Advanced`.
    BareCommon,
    Parent,
    Division,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthEmployer {
    pub raw_name: String,
    /// Same value for a parent and its divisions.
    pub company: usize,
    /// Expected canonical name: the parent's tokens.
    pub canonical: Phrase,
    pub kind: EmployerKind,
}

const ONSETS: [&str; 22] =
    ["b", "c", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "cr", "dr", "tr", "st", "pl", "qu"];
const VOWELS: [&str; 7] = ["a", "e", "i", "o", "u", "ae", "io"];
const CODAS: [&str; 7] = ["", "n", "r", "x", "s", "l", "th"];
const NAME_NOUNS: [&str; 8] = ["systems", "dynamics", "technologies", "industries", "microsystems", "devices", "labs", "aerospace"];
const DIVISIONS: [&str; 10] = [
    "web services", "robotics", "research", "federal", "space systems", "defense", "foundry services", "photonics",
    "mission systems", "ventures",
];
const COMMON_PREFIXES: [&[&str]; 5] = [&["advanced"], &["american"], &["university", "of"], &["applied"], &["global"]];
const LEGAL_SUFFIXES: [&str; 3] = ["Inc", "LLC", "Corp"];
const FILLERS: [&str; 40] = [
    "the", "team", "will", "support", "our", "work", "with", "experience", "in", "and", "for", "a", "role", "develop",
    "new", "products", "join", "customers", "across", "programs", "responsible", "collaborate", "deliver", "requirements",
    "growing", "company", "opportunity", "skills", "strong", "we", "are", "seeking", "to", "help", "build", "high",
    "volume", "daily", "site", "onsite",
];

fn coin_stem(rng: &mut ChaCha8Rng) -> String {
    let mut s = String::new();
    for _ in 0..rng.random_range(2..=3) {
        s.push_str(ONSETS.choose(rng).unwrap());
        s.push_str(VOWELS.choose(rng).unwrap());
    }
    s.push_str(CODAS.choose(rng).unwrap());
    s
}

fn render_name(tokens: &[String], suffix: Option<&str>) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        if t == "of" {
            out.push_str(t);
        } else {
            out.push_str(&Phrase::from_tokens(vec![t.clone()]).title_case());
        }
    }
    if let Some(s) = suffix {
        out.push(' ');
        out.push_str(s);
    }
    out
}

struct StemSource {
    used: BTreeSet<String>,
}

impl StemSource {
    fn new(reserved: impl IntoIterator<Item = String>) -> Self {
        StemSource { used: reserved.into_iter().collect() }
    }

    fn fresh(&mut self, rng: &mut ChaCha8Rng) -> String {
        loop {
            let s = coin_stem(rng);
            if self.used.insert(s.clone()) {
                return s;
            }
        }
    }
}

/// Generate `n` distinct raw employer names with planted divisions and
/// shared-prefix collisions.
pub fn generate_employer_pool(config: &SynthConfig, n: usize) -> Vec<SynthEmployer> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x656d_706c_6f79_6572);
    generate_employers_with(&mut rng, config, n)
}

fn generate_employers_with(rng: &mut ChaCha8Rng, config: &SynthConfig, n: usize) -> Vec<SynthEmployer> {
    let mut reserved: Vec<String> = config.dictionary.tokens().map(String::from).collect();
    reserved.extend(Canonicalizer::DEFAULT_SUFFIXES.iter().map(|s| s.to_string()));
    reserved.extend(NAME_NOUNS.iter().chain(FILLERS.iter()).map(|s| s.to_string()));
    reserved.extend(DIVISIONS.iter().flat_map(|d| normalize_text(d)));
    reserved.extend(COMMON_PREFIXES.iter().flat_map(|p| p.iter().map(|s| s.to_string())));
    reserved.push(config.industry_token.to_lowercase());
    let mut stems = StemSource::new(reserved);

    let bare_prefix: Option<Vec<String>> = COMMON_PREFIXES
        .iter()
        .find(|p| p.len() == 1 && p.iter().all(|t| config.dictionary.contains(t)))
        .map(|p| p.iter().map(|s| s.to_string()).collect());

    let base_name = |rng: &mut ChaCha8Rng, stems: &mut StemSource, collide: bool| -> Vec<String> {
        let mut toks = Vec::new();
        if collide {
            toks.extend(COMMON_PREFIXES.choose(rng).unwrap().iter().map(|s| s.to_string()));
        }
        toks.push(stems.fresh(rng));
        if rng.random_bool(0.4) {
            toks.push(NAME_NOUNS.choose(rng).unwrap().to_string());
        }
        toks
    };

    let mut out: Vec<(Vec<String>, usize, Vec<String>, EmployerKind)> = Vec::with_capacity(n);
    let mut company = 0;
    let mut family_slots = apportion(n, &[config.division_rate, Rate::one() - config.division_rate])[0];
    while family_slots >= 2 {
        let m = rng.random_range(1..=4usize).min(family_slots - 1);
        family_slots -= m + 1;
        let collide = chance(rng, &config.onomastic_collision_rate);
        let parent = base_name(rng, &mut stems, collide);
        out.push((parent.clone(), company, parent.clone(), EmployerKind::Parent));
        for d in index::sample(rng, DIVISIONS.len(), m).into_iter() {
            let mut toks = parent.clone();
            toks.extend(normalize_text(DIVISIONS[d]));
            out.push((toks, company, parent.clone(), EmployerKind::Division));
        }
        company += 1;
    }
    let standalone = n - out.len();
    let collisions = apportion(standalone, &[config.onomastic_collision_rate, Rate::one() - config.onomastic_collision_rate])[0];
    for i in 0..standalone {
        let (toks, kind) = match (i, &bare_prefix) {
            (0, Some(bare)) if collisions >= 2 => (bare.clone(), EmployerKind::BareCommon),
            _ if i < collisions => (base_name(rng, &mut stems, true), EmployerKind::Collision),
            _ => (base_name(rng, &mut stems, false), EmployerKind::Standalone),
        };
        out.push((toks.clone(), company, toks, kind));
        company += 1;
    }

    let mut pool: Vec<SynthEmployer> = out
        .into_iter()
        .map(|(toks, company, canonical, kind)| {
            let suffix = (kind != EmployerKind::BareCommon && chance(rng, &config.legal_suffix_rate))
                .then(|| *LEGAL_SUFFIXES.choose(rng).unwrap());
            SynthEmployer {
                raw_name: render_name(&toks, suffix),
                company,
                canonical: Phrase::from_tokens(canonical),
                kind,
            }
        })
        .collect();
    pool.shuffle(rng);
    pool
}

/// Ground truth for one generated posting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthRecord {
    pub job_id: String,
    pub region: Region,
    pub off_industry: bool,
    /// Planted JSTs, in taxonomy order.
    pub jsts: Vec<JstId>,
    pub function: JobFunction,
    pub employer_name: String,
    pub employer_company: usize,
    pub employer_canonical: Phrase,
    pub cross_region_group: Option<usize>,
    pub unknown_title: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SynthOutput {
    pub postings: Vec<Posting>,
    pub truth: Vec<TruthRecord>,
}

/// JSTs safe to plant: no other JST occurs inside them and they do not
/// contain the industry token.
pub fn plantable_terms(taxonomy: &Taxonomy, industry: &str) -> BTreeMap<JobFunction, Vec<JstId>> {
    let bridged: Vec<Vec<String>> = taxonomy.jsts().iter().map(|j| j.phrase.bridged()).collect();
    let mut out: BTreeMap<JobFunction, Vec<JstId>> = BTreeMap::new();
    for id in taxonomy.jst_ids() {
        let me = &bridged[id.index()];
        let nested = bridged.iter().enumerate().any(|(j, other)| j != id.index() && contains_run(me, other));
        if !nested && !me.iter().any(|t| t == industry) {
            out.entry(taxonomy.function_of(id)).or_default().push(id);
        }
    }
    out
}

struct Draft {
    region: Region,
    function: JobFunction,
    k: usize,
    off_industry: bool,
}

pub fn generate(config: &SynthConfig, taxonomy: &Taxonomy) -> Result<SynthOutput, SynthError> {
    config.validate()?;
    let industry = IndustryToken::new(&config.industry_token).unwrap();
    let industry = industry.as_str();
    if taxonomy.lookup(&Phrase::parse(industry)).is_some() {
        return Err(SynthError::BadIndustryToken(config.industry_token.clone()));
    }
    let bridged_jsts: Vec<Vec<String>> = taxonomy.jsts().iter().map(|j| j.phrase.bridged()).collect();
    let jst_tokens: BTreeSet<&str> = bridged_jsts.iter().flatten().map(String::as_str).collect();

    let plantable = plantable_terms(taxonomy, industry);
    let k_max = config.multi_jst_rate_by_k.iter().rposition(|r| *r.numer() > 0).map_or(1, |i| i + 1);
    for (i, f) in JobFunction::ALL.iter().enumerate() {
        let available = plantable.get(f).map_or(0, Vec::len);
        if *config.function_mix[i].numer() > 0 && available < k_max {
            return Err(SynthError::NotEnoughTerms { function: *f, needed: k_max, available });
        }
    }
    for (phrase, _) in &config.unknown_title_plants {
        let toks = bridge_hyphens(&normalize_text(phrase));
        let bad = |reason| SynthError::BadPlant { phrase: phrase.clone(), reason };
        if toks.is_empty() {
            return Err(bad("empty"));
        }
        if bridged_jsts.iter().any(|j| contains_run(&toks, j)) {
            return Err(bad("contains a taxonomy term"));
        }
        if toks.iter().any(|t| t == industry) {
            return Err(bad("contains the industry token"));
        }
    }
    let fillers: Vec<&str> =
        FILLERS.iter().copied().filter(|w| !jst_tokens.contains(w) && *w != industry).collect();

    if config.n_postings == 0 {
        return Ok(SynthOutput::default());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let n = config.n_postings;
    let [n_off, n_in] = <[usize; 2]>::try_from(apportion(n, &[config.off_industry_rate, Rate::one() - config.off_industry_rate])).unwrap();
    let planted_total: usize = config.unknown_title_plants.iter().map(|(_, c)| c).sum();
    if planted_total > n_in {
        return Err(SynthError::TooManyPlants { planted: planted_total, available: n_in });
    }

    let mut drafts = Vec::with_capacity(n);
    for (size, off_industry) in [(n_in, false), (n_off, true)] {
        let mut functions = expand(&apportion(size, &config.function_mix), &JobFunction::ALL);
        let mut regions = expand(&apportion(size, &config.region_mix), &Region::ALL);
        let mut ks = expand(&apportion(size, &config.multi_jst_rate_by_k), &[1, 2, 3, 4, 5]);
        functions.shuffle(&mut rng);
        regions.shuffle(&mut rng);
        ks.shuffle(&mut rng);
        for i in 0..size {
            drafts.push(Draft { region: regions[i], function: functions[i], k: ks[i], off_industry });
        }
    }
    drafts.shuffle(&mut rng);

    // unknown titles go to randomly chosen in-industry postings
    let in_industry: Vec<usize> = (0..n).filter(|&i| !drafts[i].off_industry).collect();
    let mut unknown: BTreeMap<usize, &str> = BTreeMap::new();
    let chosen = index::sample(&mut rng, in_industry.len(), planted_total).into_vec();
    let mut slots = chosen.into_iter().map(|i| in_industry[i]);
    for (phrase, count) in &config.unknown_title_plants {
        for _ in 0..*count {
            unknown.insert(slots.next().unwrap(), phrase.as_str());
        }
    }

    let pool_size = config
        .employer_pool
        .unwrap_or_else(|| {
            let scaled = Rate::from_integer(n_in as u64) * NAMES_PER_UNIT;
            scaled.round().to_integer() as usize
        })
        .clamp(1, n_in.max(1));
    let pool = generate_employers_with(&mut rng, config, pool_size);
    let mut next_unused = 0;

    let days = (config.window.end - config.window.start).num_days() as u64;
    let mut out = SynthOutput::default();
    let mut descriptions = Vec::with_capacity(n);
    for (i, d) in drafts.iter().enumerate() {
        let job_id = format!("JP{:07}", i + 1);
        let terms = &plantable[&d.function];
        let drawn: Vec<JstId> = index::sample(&mut rng, terms.len(), d.k).into_iter().map(|j| terms[j]).collect();

        let title = match unknown.get(&i) {
            Some(p) => Phrase::parse(p).title_case(),
            None => taxonomy.jst(drawn[0]).phrase.title_case(),
        };

        // 0 = job description only, 1 = employer description only, 2 = both
        let placement = if d.off_industry { None } else { Some(rng.random_range(0..3u8)) };
        let mut words: Vec<String> = Vec::new();
        let pad = |rng: &mut ChaCha8Rng, words: &mut Vec<String>| {
            for _ in 0..rng.random_range(1..=3) {
                words.push(fillers.choose(rng).unwrap().to_string());
            }
        };
        if matches!(placement, Some(0) | Some(2)) {
            pad(&mut rng, &mut words);
            words.push(industry.to_string());
        }
        for id in &drawn {
            pad(&mut rng, &mut words);
            words.push(taxonomy.jst(*id).phrase.title_case());
        }
        pad(&mut rng, &mut words);
        words.push(format!("ref {job_id}."));
        let job_description = words.join(" ");

        let employer = if !d.off_industry && next_unused < pool.len() {
            next_unused += 1;
            &pool[next_unused - 1]
        } else {
            pool.choose(&mut rng).unwrap()
        };
        let employer_description = match placement {
            Some(1) | Some(2) => format!("{} is a {} {} company.", employer.raw_name, fillers.choose(&mut rng).unwrap(), industry),
            _ => format!("{} is a {} company.", employer.raw_name, fillers.choose(&mut rng).unwrap()),
        };

        let retrieved_at = config.window.start + Days::new(rng.random_range(0..=days));
        let mut jsts = drawn.clone();
        jsts.sort();
        out.truth.push(TruthRecord {
            job_id: job_id.clone(),
            region: d.region,
            off_industry: d.off_industry,
            jsts,
            function: d.function,
            employer_name: employer.raw_name.clone(),
            employer_company: employer.company,
            employer_canonical: employer.canonical.clone(),
            cross_region_group: None,
            unknown_title: unknown.get(&i).map(|s| s.to_string()),
        });
        descriptions.push(employer_description.clone());
        out.postings.push(Posting {
            job_id,
            title,
            job_description,
            employer_name: employer.raw_name.clone(),
            employer_description,
            region: d.region,
            retrieved_at,
        });
    }

    let sources: Vec<usize> = (0..n).filter(|&i| !drafts[i].off_industry && !unknown.contains_key(&i)).collect();
    let repeats = config.cross_region_repeat_count.min(sources.len());
    for (group, s) in index::sample(&mut rng, sources.len(), repeats).into_iter().enumerate() {
        let src = sources[s];
        let others: Vec<Region> = Region::ALL.iter().copied().filter(|r| *r != drafts[src].region).collect();
        let region = *others.choose(&mut rng).unwrap();
        let mut posting = out.postings[src].clone();
        posting.job_id = format!("JP{:07}", out.postings.len() + 1);
        posting.region = region;
        posting.retrieved_at = config.window.start + Days::new(rng.random_range(0..=days));
        let mut truth = out.truth[src].clone();
        truth.job_id = posting.job_id.clone();
        truth.region = region;
        truth.cross_region_group = Some(group);
        out.truth[src].cross_region_group = Some(group);
        out.postings.push(posting);
        out.truth.push(truth);
    }
    Ok(out)
}

/// Date helper for callers that need the window bounds as strings.
pub fn date_string(d: NaiveDate) -> String {
    format!("{}", d.format("%Y-%m-%d"))
}
