//! Core of the JobPulse demand pipeline: taxonomy, matching, demand
//! weighting, employer canonicalization, reporting and synthetic corpora.
//!
//! The crate is `no_std` (it needs `alloc`); file formats and the command
//! line live in the `jobpulse` crate.

#![no_std]

extern crate alloc;

pub mod corpus;
pub mod dedup;
pub mod employers;
pub mod matcher;
pub mod pipeline;
pub mod report;
pub mod synth;
pub mod taxonomy;
pub mod text;

pub use corpus::{CollectionWindow, Corpus, CorpusBuilder, Posting, Region};
pub use dedup::{weight_assignments, DemandLedger, Weight};
pub use employers::{Canonicalizer, EmployerMapping, EmployerReport, NameDictionary};
pub use matcher::{FilterMode, IndustryToken, MatchRecord, Matcher};
pub use taxonomy::{JobFunction, JstId, Taxonomy};
pub use text::Phrase;
