//! The workspace manifest: a line-oriented `key = value` file.
//!
//! ```text
//! # kbctl workspace
//! version = 2
//! ontology = ontology.flo
//! ontology-digest = 3f2a...
//! mapping = mapping.map
//! mode = strict
//! snapshot = facts.flo
//! document = docs/article.rdf
//! bump = v2 2026-10-19T09:12:44Z 3f2a...
//! ```
//!
//! `ontology`, `document` and `bump` may repeat. Paths are relative to the
//! workspace directory.

use std::fmt::Write;

use ontokb::Mode;

use crate::error::{CliError, Result};

pub const FILE_NAME: &str = "kbctl.manifest";
pub const DEFAULT_SNAPSHOT: &str = "facts.flo";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub version: u32,
    pub ontology: Vec<String>,
    pub ontology_digest: Option<String>,
    pub mapping: Option<String>,
    pub mode: Option<Mode>,
    pub snapshot: String,
    pub documents: Vec<String>,
    pub bumps: Vec<String>,
}

impl Default for Manifest {
    fn default() -> Self {
        Manifest {
            version: 1,
            ontology: Vec::new(),
            ontology_digest: None,
            mapping: None,
            mode: None,
            snapshot: DEFAULT_SNAPSHOT.to_string(),
            documents: Vec::new(),
            bumps: Vec::new(),
        }
    }
}

fn parse_mode(s: &str) -> Option<Mode> {
    match s {
        "strict" => Some(Mode::Strict),
        "lenient" => Some(Mode::Lenient),
        _ => None,
    }
}

impl Manifest {
    pub fn parse(src: &str) -> Result<Manifest> {
        let mut m = Manifest::default();
        for (i, line) in src.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |why: &str| CliError::Usage(format!("{FILE_NAME}:{}: {why}", i + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim().to_string());
            if value.is_empty() {
                return Err(bad(&format!("`{key}` has no value")));
            }
            match key {
                "version" => {
                    m.version = value.strip_prefix('v').unwrap_or(&value).parse().map_err(|_| bad("version must be a positive integer"))?;
                    if m.version == 0 {
                        return Err(bad("version must be a positive integer"));
                    }
                }
                "ontology" => m.ontology.push(value),
                "ontology-digest" => m.ontology_digest = Some(value),
                "mapping" => m.mapping = Some(value),
                "mode" => m.mode = Some(parse_mode(&value).ok_or_else(|| bad("mode must be `strict` or `lenient`"))?),
                "snapshot" => m.snapshot = value,
                "document" => {
                    if !m.documents.contains(&value) {
                        m.documents.push(value);
                    }
                }
                "bump" => m.bumps.push(value),
                other => return Err(bad(&format!("unknown key `{other}`"))),
            }
        }
        Ok(m)
    }

    pub fn render(&self) -> String {
        let mut s = String::from("# kbctl workspace\n");
        let _ = writeln!(s, "version = {}", self.version);
        for o in &self.ontology {
            let _ = writeln!(s, "ontology = {o}");
        }
        if let Some(d) = &self.ontology_digest {
            let _ = writeln!(s, "ontology-digest = {d}");
        }
        if let Some(m) = &self.mapping {
            let _ = writeln!(s, "mapping = {m}");
        }
        if let Some(mode) = self.mode {
            let _ = writeln!(s, "mode = {}", if mode == Mode::Strict { "strict" } else { "lenient" });
        }
        let _ = writeln!(s, "snapshot = {}", self.snapshot);
        for d in &self.documents {
            let _ = writeln!(s, "document = {d}");
        }
        for b in &self.bumps {
            let _ = writeln!(s, "bump = {b}");
        }
        s
    }
}
