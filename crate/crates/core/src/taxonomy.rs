//! The job-term hierarchy: job title → job family → job function.
//!
//! Every family name and every title is a job-specific term (JST). When a
//! phrase is declared as a family and also listed as a title elsewhere, the
//! family wins and the title entry is discarded with a warning.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::text::Phrase;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JobFunction {
    Scientist,
    Engineer,
    Technician,
    OperationalSupport,
}

impl JobFunction {
    pub const ALL: [JobFunction; 4] = [
        JobFunction::Scientist,
        JobFunction::Engineer,
        JobFunction::Technician,
        JobFunction::OperationalSupport,
    ];

    pub fn label(self) -> &'static str {
        match self {
            JobFunction::Scientist => "Scientist",
            JobFunction::Engineer => "Engineer",
            JobFunction::Technician => "Technician",
            JobFunction::OperationalSupport => "OperationalSupport",
        }
    }
}

impl fmt::Display for JobFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown job function label {0:?}")]
pub struct UnknownFunction(pub String);

impl FromStr for JobFunction {
    type Err = UnknownFunction;

    /// Case-insensitive; spaces, underscores and hyphens are ignored, so
    /// `Operational Support` and `operational_support` both parse.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s
            .chars()
            .filter(|c| !matches!(c, ' ' | '_' | '-'))
            .flat_map(char::to_lowercase)
            .collect();
        match key.as_str() {
            "scientist" => Ok(JobFunction::Scientist),
            "engineer" => Ok(JobFunction::Engineer),
            "technician" => Ok(JobFunction::Technician),
            "operationalsupport" => Ok(JobFunction::OperationalSupport),
            _ => Err(UnknownFunction(String::from(s))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JstLevel {
    Family,
    Title,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FamilyId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TitleId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JstId(pub u32);

impl JstId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobFamily {
    pub name: Phrase,
    pub function: JobFunction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobTitle {
    pub name: Phrase,
    pub family: FamilyId,
}

/// A job-specific term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Jst {
    pub phrase: Phrase,
    pub level: JstLevel,
    pub family: FamilyId,
    pub title: Option<TitleId>,
}

/// One entry before precedence resolution: a phrase, the level it was
/// declared at, and the family it belongs to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEntry {
    pub phrase: Phrase,
    pub level: JstLevel,
    pub family: Phrase,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CollisionWarning {
    /// `phrase` was listed as a title of `title_family` but is itself a
    /// family name; the title entry was dropped.
    ShadowedByFamily { phrase: Phrase, title_family: Phrase },
    /// The same title was listed twice in one family.
    DuplicateTitle { phrase: Phrase, family: Phrase },
}

impl fmt::Display for CollisionWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CollisionWarning::ShadowedByFamily { phrase, title_family } => write!(
                f,
                "\"{phrase}\" is a job family; dropped as a title of \"{title_family}\""
            ),
            CollisionWarning::DuplicateTitle { phrase, family } => {
                write!(f, "title \"{phrase}\" listed twice in family \"{family}\"")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaxonomyError {
    #[error("line {line}: {source}")]
    UnknownFunction { line: usize, source: UnknownFunction },
    #[error("line {line}: empty {field}")]
    EmptyPhrase { line: usize, field: &'static str },
    #[error("taxonomy declares no job families")]
    NoFamilies,
    #[error("\"{phrase}\" is declared as a job family more than once")]
    AmbiguousFamily { phrase: Phrase },
    #[error("title \"{phrase}\" appears in families \"{first}\" and \"{second}\"")]
    AmbiguousTitle { phrase: Phrase, first: Phrase, second: Phrase },
    #[error("line {line}: family \"{family}\" is never declared (add a row with an empty title)")]
    UndeclaredFamily { line: usize, family: Phrase },
    #[error("line {line}: family \"{family}\" belongs to {declared}, not {found}")]
    FunctionMismatch {
        line: usize,
        family: Phrase,
        declared: JobFunction,
        found: JobFunction,
    },
}

/// Apply the family-over-title precedence rule.
///
/// Survivors keep their input order. Applying this to its own output is the
/// identity.
pub fn resolve_precedence(
    entries: &[RawEntry],
) -> Result<(Vec<RawEntry>, Vec<CollisionWarning>), TaxonomyError> {
    let mut families = BTreeSet::new();
    for e in entries.iter().filter(|e| e.level == JstLevel::Family) {
        if !families.insert(&e.phrase) {
            return Err(TaxonomyError::AmbiguousFamily { phrase: e.phrase.clone() });
        }
    }

    let mut kept = Vec::with_capacity(entries.len());
    let mut warnings = Vec::new();
    let mut title_home: BTreeMap<&Phrase, &Phrase> = BTreeMap::new();
    for e in entries {
        if e.level == JstLevel::Family {
            kept.push(e.clone());
            continue;
        }
        if families.contains(&e.phrase) {
            warnings.push(CollisionWarning::ShadowedByFamily {
                phrase: e.phrase.clone(),
                title_family: e.family.clone(),
            });
            continue;
        }
        match title_home.get(&e.phrase) {
            Some(home) if *home == &e.family => {
                warnings.push(CollisionWarning::DuplicateTitle {
                    phrase: e.phrase.clone(),
                    family: e.family.clone(),
                });
            }
            Some(home) => {
                return Err(TaxonomyError::AmbiguousTitle {
                    phrase: e.phrase.clone(),
                    first: (*home).clone(),
                    second: e.family.clone(),
                });
            }
            None => {
                title_home.insert(&e.phrase, &e.family);
                kept.push(e.clone());
            }
        }
    }
    Ok((kept, warnings))
}

/// One parsed row of the taxonomy file: `function,family,title`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaxonomyRow {
    pub line: usize,
    pub function: String,
    pub family: String,
    pub title: String,
}

/// Validated, immutable taxonomy.
#[derive(Debug, Clone)]
pub struct Taxonomy {
    families: Vec<JobFamily>,
    titles: Vec<JobTitle>,
    jsts: Vec<Jst>,
    index: BTreeMap<Phrase, JstId>,
    source_version: String,
}

impl Taxonomy {
    /// Validate rows and build the taxonomy. Collision warnings are returned
    /// alongside; hard conflicts are errors.
    pub fn from_rows(
        rows: &[TaxonomyRow],
        source_version: impl Into<String>,
    ) -> Result<(Taxonomy, Vec<CollisionWarning>), TaxonomyError> {
        let mut declared: BTreeMap<Phrase, JobFunction> = BTreeMap::new();
        let mut parsed = Vec::with_capacity(rows.len());
        for row in rows {
            let function: JobFunction = row
                .function
                .parse()
                .map_err(|source| TaxonomyError::UnknownFunction { line: row.line, source })?;
            let family = Phrase::parse(&row.family);
            if family.is_empty() {
                return Err(TaxonomyError::EmptyPhrase { line: row.line, field: "family" });
            }
            let title = Phrase::parse(&row.title);
            if title.is_empty() && !row.title.trim().is_empty() {
                return Err(TaxonomyError::EmptyPhrase { line: row.line, field: "title" });
            }
            if title.is_empty() && declared.insert(family.clone(), function).is_some() {
                return Err(TaxonomyError::AmbiguousFamily { phrase: family });
            }
            parsed.push((row.line, function, family, title));
        }
        if declared.is_empty() {
            return Err(TaxonomyError::NoFamilies);
        }

        let mut entries = Vec::with_capacity(parsed.len());
        for (line, function, family, title) in parsed {
            let Some(&home_function) = declared.get(&family) else {
                return Err(TaxonomyError::UndeclaredFamily { line, family });
            };
            if home_function != function {
                return Err(TaxonomyError::FunctionMismatch {
                    line,
                    family,
                    declared: home_function,
                    found: function,
                });
            }
            entries.push(if title.is_empty() {
                RawEntry { phrase: family.clone(), level: JstLevel::Family, family }
            } else {
                RawEntry { phrase: title, level: JstLevel::Title, family }
            });
        }

        let (resolved, warnings) = resolve_precedence(&entries)?;
        Ok((Self::assemble(&resolved, &declared, source_version.into()), warnings))
    }

    fn assemble(
        resolved: &[RawEntry],
        functions: &BTreeMap<Phrase, JobFunction>,
        source_version: String,
    ) -> Taxonomy {
        let mut families = Vec::new();
        let mut family_ids = BTreeMap::new();
        for e in resolved.iter().filter(|e| e.level == JstLevel::Family) {
            family_ids.insert(e.phrase.clone(), FamilyId(families.len() as u32));
            families.push(JobFamily { name: e.phrase.clone(), function: functions[&e.phrase] });
        }
        let mut titles = Vec::new();
        let mut jsts = Vec::with_capacity(resolved.len());
        let mut index = BTreeMap::new();
        for e in resolved {
            let family = family_ids[&e.family];
            let title = match e.level {
                JstLevel::Family => None,
                JstLevel::Title => {
                    titles.push(JobTitle { name: e.phrase.clone(), family });
                    Some(TitleId(titles.len() as u32 - 1))
                }
            };
            index.insert(e.phrase.clone(), JstId(jsts.len() as u32));
            jsts.push(Jst { phrase: e.phrase.clone(), level: e.level, family, title });
        }
        Taxonomy { families, titles, jsts, index, source_version }
    }

    /// Exact-phrase lookup.
    pub fn lookup(&self, phrase: &Phrase) -> Option<&Jst> {
        self.index.get(phrase).map(|id| &self.jsts[id.index()])
    }

    pub fn lookup_id(&self, phrase: &Phrase) -> Option<JstId> {
        self.index.get(phrase).copied()
    }

    pub fn families(&self) -> &[JobFamily] {
        &self.families
    }

    pub fn titles(&self) -> &[JobTitle] {
        &self.titles
    }

    pub fn jsts(&self) -> &[Jst] {
        &self.jsts
    }

    pub fn jst(&self, id: JstId) -> &Jst {
        &self.jsts[id.index()]
    }

    pub fn jst_ids(&self) -> impl Iterator<Item = JstId> + '_ {
        (0..self.jsts.len() as u32).map(JstId)
    }

    pub fn family(&self, id: FamilyId) -> &JobFamily {
        &self.families[id.0 as usize]
    }

    pub fn title(&self, id: TitleId) -> &JobTitle {
        &self.titles[id.0 as usize]
    }

    pub fn function_of(&self, id: JstId) -> JobFunction {
        self.family(self.jst(id).family).function
    }

    pub fn source_version(&self) -> &str {
        &self.source_version
    }

    /// The taxonomy as resolved entries, in declaration order.
    pub fn entries(&self) -> Vec<RawEntry> {
        self.jsts
            .iter()
            .map(|j| RawEntry {
                phrase: j.phrase.clone(),
                level: j.level,
                family: self.family(j.family).name.clone(),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::string::ToString;
    use alloc::vec;
    use proptest::prelude::*;

    fn row(line: usize, function: &str, family: &str, title: &str) -> TaxonomyRow {
        TaxonomyRow {
            line,
            function: function.to_string(),
            family: family.to_string(),
            title: title.to_string(),
        }
    }

    fn entry(phrase: &str, level: JstLevel, family: &str) -> RawEntry {
        RawEntry { phrase: Phrase::parse(phrase), level, family: Phrase::parse(family) }
    }

    #[test]
    fn minimal_taxonomy_has_one_family_jst() {
        let (t, w) = Taxonomy::from_rows(&[row(2, "Technician", "Fab Technician", "")], "v").unwrap();
        assert!(w.is_empty());
        assert_eq!(t.jsts().len(), 1);
        assert_eq!(t.jsts()[0].level, JstLevel::Family);
        assert_eq!(t.jsts()[0].title, None);
    }

    #[test]
    fn thirty_one_families_and_177_titles_give_208_jsts() {
        let mut rows = Vec::new();
        let mut line = 2;
        for f in 0..31 {
            rows.push(row(line, "Engineer", &format!("family{f} engineer"), ""));
            line += 1;
        }
        for t in 0..177 {
            rows.push(row(line, "Engineer", &format!("family{} engineer", t % 31), &format!("title{t} engineer")));
            line += 1;
        }
        let (tax, w) = Taxonomy::from_rows(&rows, "v").unwrap();
        assert!(w.is_empty());
        assert_eq!(tax.families().len(), 31);
        assert_eq!(tax.titles().len(), 177);
        assert_eq!(tax.jsts().len(), 208);
    }

    #[test]
    fn family_takes_precedence_over_title_elsewhere() {
        let rows = [
            row(2, "Engineer", "Semiconductor Packaging Engineer", ""),
            row(3, "Engineer", "Assembly Engineer", ""),
            row(4, "Engineer", "Assembly Engineer", "Semiconductor Packaging Engineer"),
        ];
        let (t, w) = Taxonomy::from_rows(&rows, "v").unwrap();
        assert_eq!(t.jsts().len(), 2);
        let j = t.lookup(&Phrase::parse("semiconductor packaging engineer")).unwrap();
        assert_eq!(j.level, JstLevel::Family);
        assert_eq!(w.len(), 1);
        assert!(matches!(w[0], CollisionWarning::ShadowedByFamily { .. }));
    }

    #[test]
    fn precedence_example_pair() {
        let entries = [
            entry("packaging engineer", JstLevel::Family, "packaging engineer"),
            entry("packaging engineer", JstLevel::Title, "design engineer"),
        ];
        let (kept, warnings) = resolve_precedence(&entries).unwrap();
        assert_eq!(kept, vec![entries[0].clone()]);
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn precedence_without_collisions_is_identity() {
        let entries = [
            entry("design engineer", JstLevel::Family, "design engineer"),
            entry("asic designer", JstLevel::Title, "design engineer"),
        ];
        let (kept, warnings) = resolve_precedence(&entries).unwrap();
        assert_eq!(kept, entries.to_vec());
        assert!(warnings.is_empty());
    }

    #[test]
    fn family_in_two_places_is_rejected() {
        let entries = [
            entry("packaging engineer", JstLevel::Family, "packaging engineer"),
            entry("packaging engineer", JstLevel::Family, "packaging engineer"),
        ];
        assert!(matches!(resolve_precedence(&entries), Err(TaxonomyError::AmbiguousFamily { .. })));

        let rows = [row(2, "Engineer", "Test Engineer", ""), row(3, "Technician", "Test Engineer", "")];
        assert!(matches!(Taxonomy::from_rows(&rows, "v"), Err(TaxonomyError::AmbiguousFamily { .. })));
    }

    #[test]
    fn title_in_two_families_is_rejected() {
        let rows = [
            row(2, "Engineer", "Design Engineer", ""),
            row(3, "Engineer", "Layout Engineer", ""),
            row(4, "Engineer", "Design Engineer", "Mask Designer"),
            row(5, "Engineer", "Layout Engineer", "Mask Designer"),
        ];
        assert!(matches!(Taxonomy::from_rows(&rows, "v"), Err(TaxonomyError::AmbiguousTitle { .. })));
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            Taxonomy::from_rows(&[row(7, "Astronaut", "Moon Engineer", "")], "v"),
            Err(TaxonomyError::UnknownFunction { line: 7, .. })
        ));
        assert!(matches!(Taxonomy::from_rows(&[], "v"), Err(TaxonomyError::NoFamilies)));
        assert!(matches!(
            Taxonomy::from_rows(&[row(2, "Engineer", "Design Engineer", ""), row(3, "Engineer", "Etch Engineer", "x")], "v"),
            Err(TaxonomyError::UndeclaredFamily { line: 3, .. })
        ));
        assert!(matches!(
            Taxonomy::from_rows(&[row(2, "Engineer", "Design Engineer", ""), row(3, "Scientist", "Design Engineer", "x")], "v"),
            Err(TaxonomyError::FunctionMismatch { line: 3, .. })
        ));
        assert!(matches!(
            Taxonomy::from_rows(&[row(2, "Engineer", " ,, ", "")], "v"),
            Err(TaxonomyError::EmptyPhrase { line: 2, field: "family" })
        ));
    }

    #[test]
    fn function_labels() {
        assert_eq!("Operational Support".parse::<JobFunction>().unwrap(), JobFunction::OperationalSupport);
        assert_eq!("ENGINEER".parse::<JobFunction>().unwrap(), JobFunction::Engineer);
        assert!("Manager".parse::<JobFunction>().is_err());
    }

    #[test]
    fn lookup_basics() {
        let rows = [row(2, "Technician", "Fab Technician", ""), row(3, "Technician", "Fab Technician", "Equipment Technician")];
        let (t, _) = Taxonomy::from_rows(&rows, "v").unwrap();
        let j = t.lookup(&Phrase::parse("fab technician")).unwrap();
        assert_eq!(j.level, JstLevel::Family);
        assert_eq!(t.family(j.family).function, JobFunction::Technician);
        assert!(t.lookup(&Phrase::parse("")).is_none());
        assert!(t.lookup(&Phrase::parse("fab")).is_none());
    }

    // Brute-force reference: group phrases and apply the rule by hand.
    fn precedence_oracle(entries: &[RawEntry]) -> BTreeSet<(Phrase, JstLevel, Phrase)> {
        let families: BTreeSet<&Phrase> =
            entries.iter().filter(|e| e.level == JstLevel::Family).map(|e| &e.phrase).collect();
        entries
            .iter()
            .filter(|e| e.level == JstLevel::Family || !families.contains(&e.phrase))
            .map(|e| (e.phrase.clone(), e.level, e.family.clone()))
            .collect()
    }

    #[test]
    fn three_phrases_one_collision() {
        let entries = [
            entry("yield engineer", JstLevel::Family, "yield engineer"),
            entry("test engineer", JstLevel::Family, "test engineer"),
            entry("yield engineer", JstLevel::Title, "test engineer"),
        ];
        let (kept, _) = resolve_precedence(&entries).unwrap();
        assert_eq!(kept.len(), 2);
        let got: BTreeSet<_> = kept.iter().map(|e| (e.phrase.clone(), e.level, e.family.clone())).collect();
        assert_eq!(got, precedence_oracle(&entries));
    }

    fn arb_rows() -> impl Strategy<Value = Vec<TaxonomyRow>> {
        // Families fam0..fam5; titles drawn from a pool that overlaps with
        // family names so collisions happen often.
        let n_fam = 1..6usize;
        n_fam.prop_flat_map(|n| {
            let titles = proptest::collection::vec((0..n, 0..12usize), 0..40);
            (Just(n), titles)
        })
        .prop_map(|(n, titles)| {
            let mut rows = Vec::new();
            let mut line = 2;
            for f in 0..n {
                rows.push(row(line, "Engineer", &format!("fam{f}"), ""));
                line += 1;
            }
            let mut seen = BTreeMap::new();
            for (f, t) in titles {
                let phrase = if t < 6 { format!("fam{t}") } else { format!("title{t}") };
                // keep titles single-homed so the table is always valid
                let f = *seen.entry(phrase.clone()).or_insert(f);
                rows.push(row(line, "Engineer", &format!("fam{f}"), &phrase));
                line += 1;
            }
            rows
        })
    }

    proptest! {
        #[test]
        fn jst_count_and_lookup_match_linear_scan(rows in arb_rows()) {
            let (t, _) = Taxonomy::from_rows(&rows, "v").unwrap();
            prop_assert_eq!(t.jsts().len(), t.families().len() + t.titles().len());

            let families: BTreeSet<Phrase> = rows.iter().filter(|r| r.title.is_empty()).map(|r| Phrase::parse(&r.family)).collect();
            let mut probes: Vec<Phrase> = rows.iter().map(|r| Phrase::parse(&r.title)).collect();
            probes.extend(families.iter().cloned());
            probes.push(Phrase::parse("title99"));
            for p in probes {
                // linear scan over the source rows, post-precedence
                let expected = rows.iter().find_map(|r| {
                    let fam = Phrase::parse(&r.family);
                    let title = Phrase::parse(&r.title);
                    if r.title.is_empty() && fam == p {
                        Some(JstLevel::Family)
                    } else if !title.is_empty() && title == p && !families.contains(&p) {
                        Some(JstLevel::Title)
                    } else {
                        None
                    }
                });
                prop_assert_eq!(t.lookup(&p).map(|j| j.level), if p.is_empty() { None } else { expected });
            }
        }

        #[test]
        fn precedence_is_idempotent(rows in arb_rows()) {
            let (t, _) = Taxonomy::from_rows(&rows, "v").unwrap();
            let once = t.entries();
            let (twice, warnings) = resolve_precedence(&once).unwrap();
            prop_assert_eq!(twice, once);
            prop_assert!(warnings.is_empty());
        }
    }
}
