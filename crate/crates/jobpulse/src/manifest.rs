//! Run manifest: a flat `key = value` file listing inputs, the config hash,
//! counts and a content hash per artifact. No timestamps, so identical runs
//! produce identical manifests.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::files::write_atomic;

pub const FILE_NAME: &str = "manifest.txt";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects entries while artifacts are written into `dir`.
#[derive(Debug)]
pub struct Manifest {
    dir: PathBuf,
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(dir: &Path, command: &str, config_canonical: &str) -> Self {
        let mut m = Manifest { dir: dir.to_path_buf(), entries: Vec::new() };
        m.set("tool", concat!("jobpulse ", env!("CARGO_PKG_VERSION")));
        m.set("command", command);
        m.set("config.sha256", sha256_hex(config_canonical.as_bytes()));
        m
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        // values are single-line by construction; keep the file parseable
        let value = value.to_string().replace(['\n', '\r'], " ");
        self.entries.push((key.to_string(), value));
    }

    pub fn input(&mut self, index: usize, path: &Path, bytes: &[u8]) {
        self.set(&format!("input.{index}.path"), path.display());
        self.set(&format!("input.{index}.sha256"), sha256_hex(bytes));
    }

    pub fn count(&mut self, name: &str, n: impl ToString) {
        self.set(&format!("count.{name}"), n);
    }

    /// Write an artifact atomically and record its hash.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), Error> {
        write_atomic(&self.dir.join(name), bytes)?;
        self.set(&format!("artifact.{name}.sha256"), sha256_hex(bytes));
        Ok(())
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn finish(self) -> Result<PathBuf, Error> {
        let path = self.dir.join(FILE_NAME);
        write_atomic(&path, self.render().as_bytes())?;
        Ok(path)
    }
}

/// Parse a manifest back into ordered pairs.
pub fn parse(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn render_parse_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = Manifest::new(dir.path(), "report", "a = 1\n");
        m.count("postings", 3);
        m.write("x.csv", b"h\n").unwrap();
        let pairs = parse(&m.render());
        assert_eq!(pairs[1], ("command".to_string(), "report".to_string()));
        assert_eq!(pairs.last().unwrap().0, "artifact.x.csv.sha256");
        assert!(dir.path().join("x.csv").exists());
    }
}
