//! On-disk formats: taxonomy CSV, posting JSONL, dictionary lists, and
//! atomic artifact writes.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use jobpulse_core::corpus::{CollectionWindow, Corpus, CorpusBuilder, Diagnostic, Posting, RecordFields, Region, RejectReason};
use jobpulse_core::taxonomy::{CollisionWarning, Taxonomy, TaxonomyRow};
use jobpulse_core::NameDictionary;

use crate::error::Error;

/// The taxonomy shipped with the tool, used when no path is configured.
pub const BUILTIN_TAXONOMY: &str = include_str!("../../../data/taxonomy.csv");

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn parse_taxonomy(text: &str, source: &str) -> Result<(Taxonomy, Vec<CollisionWarning>), Error> {
    let parse_err = |line: usize, message: String| Error::Parse { path: PathBuf::from(source), line, message };
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["function", "family", "title"] {
        let line = reader.position().line() as usize;
        return Err(parse_err(line, format!("expected header function,family,title, got {}", headers.iter().collect::<Vec<_>>().join(","))));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        rows.push(TaxonomyRow {
            line,
            function: record[0].to_string(),
            family: record[1].to_string(),
            title: record[2].to_string(),
        });
    }
    Taxonomy::from_rows(&rows, source).map_err(|e| Error::Taxonomy { path: PathBuf::from(source), source: e })
}

/// Load the taxonomy at `path`, or the built-in one.
pub fn load_taxonomy(path: Option<&Path>) -> Result<(Taxonomy, Vec<CollisionWarning>), Error> {
    match path {
        Some(p) => parse_taxonomy(&read(p)?, &p.display().to_string()),
        None => parse_taxonomy(BUILTIN_TAXONOMY, "builtin"),
    }
}

/// Default dictionary tokens plus those listed at `path`.
pub fn load_dictionary(path: Option<&Path>) -> Result<NameDictionary, Error> {
    let mut dict = NameDictionary::default();
    if let Some(p) = path {
        dict.extend(&NameDictionary::parse(&read(p)?));
    }
    Ok(dict)
}

/// One posting line. Field names are the file format.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PostingLine<'a> {
    job_id: &'a str,
    title: &'a str,
    job_description: &'a str,
    employer_name: &'a str,
    employer_description: &'a str,
    region: &'a str,
    retrieved_at: &'a str,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OwnedPostingLine {
    job_id: String,
    title: String,
    job_description: String,
    employer_name: String,
    employer_description: String,
    region: String,
    retrieved_at: String,
}

/// Load posting files in order. Blank lines and lines starting with `#` are
/// skipped; every other line becomes a posting or a diagnostic.
pub fn load_postings(
    paths: &[PathBuf],
    window: CollectionWindow,
    regions: &[Region],
) -> Result<(Corpus, Vec<Diagnostic>), Error> {
    let mut builder = CorpusBuilder::new(window, regions);
    for path in paths {
        let text = read(path)?;
        let source = builder.add_source(path.display().to_string());
        for (i, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            match serde_json::from_str::<OwnedPostingLine>(trimmed) {
                Ok(r) => {
                    builder.push(
                        source,
                        i + 1,
                        RecordFields {
                            job_id: r.job_id,
                            title: r.title,
                            job_description: r.job_description,
                            employer_name: r.employer_name,
                            employer_description: r.employer_description,
                            region: r.region,
                            retrieved_at: r.retrieved_at,
                        },
                    );
                }
                Err(e) => builder.reject(source, i + 1, "", RejectReason::Malformed(e.to_string())),
            }
        }
    }
    Ok(builder.finish())
}

pub fn postings_jsonl<'a>(postings: impl IntoIterator<Item = &'a Posting>) -> Vec<u8> {
    let mut out = Vec::new();
    for p in postings {
        let fields = RecordFields::from(p);
        let line = PostingLine {
            job_id: &fields.job_id,
            title: &fields.title,
            job_description: &fields.job_description,
            employer_name: &fields.employer_name,
            employer_description: &fields.employer_description,
            region: &fields.region,
            retrieved_at: &fields.retrieved_at,
        };
        serde_json::to_writer(&mut out, &line).expect("serializing strings cannot fail");
        out.push(b'\n');
    }
    out
}

/// Write `bytes` to a sibling temp file, then rename over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    let io_err = |source: io::Error| Error::Io { path: path.to_path_buf(), source };
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io_err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_taxonomy_has_reference_shape() {
        let (t, warnings) = load_taxonomy(None).unwrap();
        assert_eq!(t.families().len(), 31);
        assert_eq!(t.titles().len(), 177);
        assert_eq!(t.jsts().len(), 208);
        assert_eq!(warnings.len(), 1);
    }

    #[test]
    fn taxonomy_errors_carry_line_numbers() {
        let text = "function,family,title\nEngineer,Layout Engineer,\nBaker,Bread,\n";
        let err = parse_taxonomy(text, "t.csv").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        let ragged = "function,family,title\nEngineer,Layout Engineer\n";
        assert!(parse_taxonomy(ragged, "t.csv").unwrap_err().to_string().contains("line 2"));
        assert!(parse_taxonomy("fn,fam,title\n", "t.csv").is_err());
    }

    #[test]
    fn comments_and_header_after_comments() {
        let text = "# reference\nfunction,family,title\n# engineers\nEngineer,Layout Engineer,\n";
        let (t, _) = parse_taxonomy(text, "t.csv").unwrap();
        assert_eq!(t.jsts().len(), 1);
    }
}
