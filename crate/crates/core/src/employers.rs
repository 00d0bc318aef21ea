//! Employer-name disambiguation.
//!
//! Names are normalized and stripped of trailing legal suffixes, then placed
//! in a token trie. The first level groups names by first word; deeper levels
//! compare the next word, and the next, until names either agree or split.
//! A name absorbs every name it is a proper token prefix of (a corporate
//! division such as `Amazon Web Services` under `Amazon`) unless all of its
//! tokens are common dictionary words, which keeps `Advanced` from swallowing
//! `Advanced Micro Devices`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::dedup::{to_big, DemandLedger};
use crate::text::{normalize_text, Phrase};

/// Common leading words that do not identify a company on their own.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NameDictionary {
    tokens: BTreeSet<String>,
}

impl NameDictionary {
    pub const DEFAULT_TOKENS: [&'static str; 4] = ["american", "advanced", "university", "of"];

    pub fn from_tokens<S: AsRef<str>>(tokens: impl IntoIterator<Item = S>) -> Self {
        let mut set = BTreeSet::new();
        for t in tokens {
            set.extend(normalize_text(t.as_ref()));
        }
        NameDictionary { tokens: set }
    }

    /// One token per line; `#` starts a comment line.
    pub fn parse(text: &str) -> Self {
        Self::from_tokens(
            text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn extend(&mut self, other: &NameDictionary) {
        self.tokens.extend(other.tokens.iter().cloned());
    }

    pub fn contains(&self, token: &str) -> bool {
        self.tokens.contains(token)
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(String::as_str)
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

impl Default for NameDictionary {
    fn default() -> Self {
        Self::from_tokens(Self::DEFAULT_TOKENS)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalEmployer {
    pub canonical_name: Phrase,
    /// Raw spellings mapped here.
    pub members: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EmployerMapping {
    /// Sorted by canonical name.
    pub employers: Vec<CanonicalEmployer>,
    by_raw: BTreeMap<String, usize>,
    /// Raw names that normalize to nothing.
    pub rejected: Vec<String>,
}

impl EmployerMapping {
    pub fn get(&self, raw: &str) -> Option<&CanonicalEmployer> {
        self.by_raw.get(raw).map(|&i| &self.employers[i])
    }

    pub fn index_of(&self, raw: &str) -> Option<usize> {
        self.by_raw.get(raw).copied()
    }

    /// `(raw_name, canonical_name)` pairs, sorted by raw name.
    pub fn pairs(&self) -> impl Iterator<Item = (&str, &Phrase)> {
        self.by_raw.iter().map(|(raw, &i)| (raw.as_str(), &self.employers[i].canonical_name))
    }

    pub fn raw_count(&self) -> usize {
        self.by_raw.len()
    }

    pub fn is_rejected(&self, raw: &str) -> bool {
        self.rejected.binary_search_by(|r| r.as_str().cmp(raw)).is_ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Canonicalizer {
    dictionary: NameDictionary,
    legal_suffixes: BTreeSet<String>,
}

#[derive(Debug, Default)]
struct TrieNode {
    children: BTreeMap<String, usize>,
    terminal: bool,
}

impl Canonicalizer {
    pub const DEFAULT_SUFFIXES: [&'static str; 5] = ["inc", "llc", "corp", "co", "ltd"];

    pub fn new(dictionary: NameDictionary) -> Self {
        Self::with_suffixes(dictionary, &Self::DEFAULT_SUFFIXES)
    }

    pub fn with_suffixes<S: AsRef<str>>(dictionary: NameDictionary, suffixes: &[S]) -> Self {
        let legal_suffixes = suffixes.iter().flat_map(|s| normalize_text(s.as_ref())).collect();
        Canonicalizer { dictionary, legal_suffixes }
    }

    pub fn dictionary(&self) -> &NameDictionary {
        &self.dictionary
    }

    /// Normalized comparison key: tokens with trailing legal suffixes
    /// removed. A lone suffix token is kept.
    pub fn key(&self, raw: &str) -> Vec<String> {
        let mut tokens = normalize_text(raw);
        while tokens.len() > 1 && self.legal_suffixes.contains(tokens.last().unwrap()) {
            tokens.pop();
        }
        tokens
    }

    fn all_dictionary(&self, tokens: &[String]) -> bool {
        tokens.iter().all(|t| self.dictionary.contains(t))
    }

    pub fn canonicalize<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> EmployerMapping {
        let mut keys: BTreeMap<Vec<String>, BTreeSet<String>> = BTreeMap::new();
        let mut rejected = BTreeSet::new();
        for raw in names {
            let key = self.key(raw);
            if key.is_empty() {
                rejected.insert(String::from(raw));
            } else {
                keys.entry(key).or_default().insert(String::from(raw));
            }
        }

        let mut nodes = alloc::vec![TrieNode::default()];
        for key in keys.keys() {
            let mut at = 0;
            for tok in key {
                at = match nodes[at].children.get(tok) {
                    Some(&n) => n,
                    None => {
                        nodes.push(TrieNode::default());
                        let n = nodes.len() - 1;
                        nodes[at].children.insert(tok.clone(), n);
                        n
                    }
                };
            }
            nodes[at].terminal = true;
        }

        // Walk each key from its first word down; the shallowest complete
        // name on the way that is not made only of dictionary words becomes
        // the group root. Without one the name stands alone.
        let mut groups: BTreeMap<Vec<String>, BTreeSet<String>> = BTreeMap::new();
        for (key, raws) in &keys {
            let mut root = key.len();
            let mut at = 0;
            for (depth, tok) in key.iter().enumerate() {
                at = nodes[at].children[tok];
                if nodes[at].terminal && !self.all_dictionary(&key[..=depth]) {
                    root = depth + 1;
                    break;
                }
            }
            groups.entry(key[..root].to_vec()).or_default().extend(raws.iter().cloned());
        }

        let mut mapping = EmployerMapping { rejected: rejected.into_iter().collect(), ..Default::default() };
        for (canonical, members) in groups {
            let idx = mapping.employers.len();
            for m in &members {
                mapping.by_raw.insert(m.clone(), idx);
            }
            mapping.employers.push(CanonicalEmployer { canonical_name: Phrase::from_tokens(canonical), members });
        }
        mapping
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EmployerError {
    #[error("employer {0:?} has no canonical mapping")]
    Unmapped(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmployerCount {
    pub name: Phrase,
    /// Exact sum of the demand weights of this employer's postings.
    pub units: BigRational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmployerReport {
    /// Canonical employers with at least one demand unit.
    pub employer_count: usize,
    pub total_units: BigRational,
    /// Units whose employer name normalizes to nothing; not in any total.
    pub unattributed_units: BigRational,
    /// Sorted by units descending, then name.
    pub ranked: Vec<EmployerCount>,
    pub top_k: usize,
}

impl EmployerReport {
    pub fn mean_units(&self) -> Option<BigRational> {
        (self.employer_count > 0).then(|| self.total_units.clone() / BigInt::from(self.employer_count))
    }

    pub fn top(&self) -> &[EmployerCount] {
        &self.ranked[..self.top_k.min(self.ranked.len())]
    }

    pub fn top_units(&self) -> BigRational {
        self.top().iter().fold(BigRational::zero(), |acc, e| acc + &e.units)
    }

    /// Share of all units held by the top employers, in `[0, 1]`.
    pub fn top_share(&self) -> Option<BigRational> {
        (!self.total_units.is_zero()).then(|| self.top_units() / &self.total_units)
    }

    pub fn share_of(&self, e: &EmployerCount) -> Option<BigRational> {
        (!self.total_units.is_zero()).then(|| e.units.clone() / &self.total_units)
    }
}

/// Demand per canonical employer.
pub fn employer_stats(
    ledger: &DemandLedger,
    mapping: &EmployerMapping,
    top_k: usize,
) -> Result<EmployerReport, EmployerError> {
    let mut units: BTreeMap<usize, BigRational> = BTreeMap::new();
    let mut unattributed_units = BigRational::zero();
    for a in &ledger.assignments {
        let raw = &ledger.unit(a).employer_name;
        match mapping.index_of(raw) {
            Some(idx) => *units.entry(idx).or_insert_with(BigRational::zero) += to_big(a.weight),
            None if mapping.is_rejected(raw) => unattributed_units += to_big(a.weight),
            None => return Err(EmployerError::Unmapped(raw.clone())),
        }
    }
    let total_units = units.values().fold(BigRational::zero(), |acc, u| acc + u);
    let mut ranked: Vec<EmployerCount> = units
        .into_iter()
        .map(|(i, units)| EmployerCount { name: mapping.employers[i].canonical_name.clone(), units })
        .collect();
    ranked.sort_by(|a, b| b.units.cmp(&a.units).then_with(|| a.name.cmp(&b.name)));
    Ok(EmployerReport { employer_count: ranked.len(), total_units, unattributed_units, ranked, top_k })
}
