//! Offline search-phrase semantics.
//!
//! A posting matches a JST when the JST's tokens occur as a contiguous run in
//! the normalized title or job description. Both sides are compared after
//! hyphen bridging, so `rf-engineer` and `rf engineer` are the same run.
//! Title and description are scanned separately; a run never spans the two.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::corpus::{Posting, Region};
use crate::taxonomy::{Jst, JstId, Taxonomy};
use crate::text::{bridge_hyphens, normalize_text, Phrase};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatchError {
    #[error("industry token must be exactly one token, got {0:?}")]
    BadIndustryToken(String),
    #[error("cannot parse search phrase {0:?}")]
    BadSearchPhrase(String),
    #[error("min_count must be positive")]
    ZeroMinCount,
    #[error("role word {0:?} must be exactly one token")]
    BadRoleWord(String),
}

/// A single normalized token such as `semiconductor`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndustryToken(String);

impl IndustryToken {
    pub fn new(raw: &str) -> Result<Self, MatchError> {
        let tokens = bridge_hyphens(&normalize_text(raw));
        match <[String; 1]>::try_from(tokens) {
            Ok([t]) => Ok(IndustryToken(t)),
            Err(_) => Err(MatchError::BadIndustryToken(String::from(raw))),
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for IndustryToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Industry token plus quoted JST n-gram, e.g. `semiconductor "product engineer"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchPhrase {
    pub industry_token: IndustryToken,
    pub jst_phrase: Phrase,
}

pub fn build_search_phrase(jst: &Jst, industry_token: &IndustryToken) -> SearchPhrase {
    SearchPhrase { industry_token: industry_token.clone(), jst_phrase: jst.phrase.clone() }
}

impl fmt::Display for SearchPhrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} \"{}\"", self.industry_token, self.jst_phrase)
    }
}

impl FromStr for SearchPhrase {
    type Err = MatchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MatchError::BadSearchPhrase(String::from(s));
        let (token, rest) = s.trim().split_once(' ').ok_or_else(bad)?;
        let quoted = rest.trim().strip_prefix('"').and_then(|r| r.strip_suffix('"')).ok_or_else(bad)?;
        let jst_phrase = Phrase::parse(quoted);
        if jst_phrase.is_empty() || quoted.contains('"') {
            return Err(bad());
        }
        Ok(SearchPhrase { industry_token: IndustryToken::new(token)?, jst_phrase })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FilterMode {
    /// Token in the job description or the employer description.
    #[default]
    AnyField,
    /// Token in both.
    AllFields,
}

impl FromStr for FilterMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "any_field" => Ok(FilterMode::AnyField),
            "all_fields" => Ok(FilterMode::AllFields),
            other => Err(alloc::format!("unknown filter_mode {other:?} (expected any_field or all_fields)")),
        }
    }
}

impl fmt::Display for FilterMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FilterMode::AnyField => "any_field",
            FilterMode::AllFields => "all_fields",
        })
    }
}

fn has_token(text: &str, token: &str) -> bool {
    bridge_hyphens(&normalize_text(text)).iter().any(|t| t == token)
}

/// Keep a posting only if the industry token appears in its descriptions.
pub fn industry_filter(p: &Posting, token: &IndustryToken, mode: FilterMode) -> bool {
    let in_job = has_token(&p.job_description, token.as_str());
    match mode {
        FilterMode::AnyField => in_job || has_token(&p.employer_description, token.as_str()),
        FilterMode::AllFields => in_job && has_token(&p.employer_description, token.as_str()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct JstHit {
    pub jst: JstId,
    pub in_title: bool,
}

/// Which JSTs hit one posting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchRecord {
    pub job_id: String,
    pub region: Region,
    pub employer_name: String,
    /// Sorted by JST id, non-empty.
    pub hits: Vec<JstHit>,
}

impl MatchRecord {
    pub fn jst_ids(&self) -> impl Iterator<Item = JstId> + '_ {
        self.hits.iter().map(|h| h.jst)
    }
}

#[derive(Debug, Default, Clone)]
struct Node {
    children: BTreeMap<String, usize>,
    ends: Vec<JstId>,
}

/// Token trie over the (bridged) JST phrases of a taxonomy.
#[derive(Debug, Clone)]
pub struct Matcher {
    nodes: Vec<Node>,
}

impl Matcher {
    pub fn new(taxonomy: &Taxonomy) -> Self {
        let mut nodes = alloc::vec![Node::default()];
        for id in taxonomy.jst_ids() {
            let mut at = 0;
            for tok in taxonomy.jst(id).phrase.bridged() {
                at = match nodes[at].children.get(&tok) {
                    Some(&next) => next,
                    None => {
                        nodes.push(Node::default());
                        let next = nodes.len() - 1;
                        nodes[at].children.insert(tok, next);
                        next
                    }
                };
            }
            if at != 0 {
                nodes[at].ends.push(id);
            }
        }
        Matcher { nodes }
    }

    /// Every JST whose bridged tokens occur as a run in `tokens`.
    pub fn scan(&self, tokens: &[String], out: &mut BTreeSet<JstId>) {
        for start in 0..tokens.len() {
            let mut at = 0;
            for tok in &tokens[start..] {
                match self.nodes[at].children.get(tok) {
                    Some(&next) => {
                        at = next;
                        out.extend(self.nodes[at].ends.iter().copied());
                    }
                    None => break,
                }
            }
        }
    }

    pub fn match_posting(&self, p: &Posting) -> Option<MatchRecord> {
        let mut in_title = BTreeSet::new();
        self.scan(&bridge_hyphens(&normalize_text(&p.title)), &mut in_title);
        let mut all = BTreeSet::new();
        self.scan(&bridge_hyphens(&normalize_text(&p.job_description)), &mut all);
        all.extend(in_title.iter().copied());
        if all.is_empty() {
            return None;
        }
        Some(MatchRecord {
            job_id: p.job_id.clone(),
            region: p.region,
            employer_name: p.employer_name.clone(),
            hits: all.into_iter().map(|jst| JstHit { jst, in_title: in_title.contains(&jst) }).collect(),
        })
    }
}

pub fn match_posting(p: &Posting, t: &Taxonomy) -> Option<MatchRecord> {
    Matcher::new(t).match_posting(p)
}

/// Settings for out-of-taxonomy title discovery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscoveryConfig {
    role_words: BTreeSet<String>,
    min_count: usize,
}

impl DiscoveryConfig {
    pub const DEFAULT_ROLE_WORDS: [&'static str; 5] =
        ["engineer", "technician", "scientist", "analyst", "administrator"];
    pub const DEFAULT_MIN_COUNT: usize = 3;

    pub fn new<S: AsRef<str>>(role_words: &[S], min_count: usize) -> Result<Self, MatchError> {
        if min_count == 0 {
            return Err(MatchError::ZeroMinCount);
        }
        let mut set = BTreeSet::new();
        for w in role_words {
            let toks = bridge_hyphens(&normalize_text(w.as_ref()));
            match <[String; 1]>::try_from(toks) {
                Ok([t]) => {
                    set.insert(t);
                }
                Err(_) => return Err(MatchError::BadRoleWord(String::from(w.as_ref()))),
            }
        }
        Ok(DiscoveryConfig { role_words: set, min_count })
    }

    pub fn with_min_count(min_count: usize) -> Result<Self, MatchError> {
        Self::new(&Self::DEFAULT_ROLE_WORDS, min_count)
    }

    pub fn min_count(&self) -> usize {
        self.min_count
    }
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        Self::with_min_count(Self::DEFAULT_MIN_COUNT).unwrap()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub phrase: String,
    /// Number of postings whose title contains the phrase.
    pub count: usize,
}

/// Title n-grams (2 to 4 tokens, ending in a role word) that no JST covers.
///
/// An n-gram is covered when it overlaps a JST occurrence in the same title,
/// so `Senior Supply Chain Analyst` yields nothing when `supply chain analyst`
/// is known. Each posting counts at most once per phrase. Sorted by count
/// descending, then phrase ascending.
pub fn discover_candidate_titles<'a>(
    postings: impl IntoIterator<Item = &'a Posting>,
    taxonomy: &Taxonomy,
    config: &DiscoveryConfig,
) -> Vec<Candidate> {
    let known: BTreeSet<Vec<String>> = taxonomy.jsts().iter().map(|j| j.phrase.bridged()).collect();
    let longest = known.iter().map(Vec::len).max().unwrap_or(0);
    let mut counts: BTreeMap<Vec<String>, usize> = BTreeMap::new();
    for p in postings {
        let tokens = bridge_hyphens(&normalize_text(&p.title));
        let mut covered = vec![false; tokens.len()];
        for start in 0..tokens.len() {
            for len in 1..=longest.min(tokens.len() - start) {
                if known.contains(&tokens[start..start + len]) {
                    covered[start..start + len].iter_mut().for_each(|c| *c = true);
                }
            }
        }
        let mut seen = BTreeSet::new();
        for end in 0..tokens.len() {
            if !config.role_words.contains(&tokens[end]) {
                continue;
            }
            for n in 2..=4usize {
                if n > end + 1 {
                    break;
                }
                let span = end + 1 - n..=end;
                if !covered[span.clone()].iter().any(|c| *c) {
                    let gram = &tokens[span];
                    seen.insert(gram.to_vec());
                }
            }
        }
        for gram in seen {
            *counts.entry(gram).or_default() += 1;
        }
    }
    let mut out: Vec<Candidate> = counts
        .into_iter()
        .filter(|(_, c)| *c >= config.min_count)
        .map(|(g, count)| Candidate { phrase: Phrase::from_tokens(g).to_string(), count })
        .collect();
    out.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.phrase.cmp(&b.phrase)));
    out
}
