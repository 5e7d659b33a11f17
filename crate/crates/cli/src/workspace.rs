//! A workspace directory: manifest, ontology sources, mapping and the
//! fact snapshot built by ingestion.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use ontokb::ontology::OntologyBuilder;
use ontokb::rdf::{parse_mapping, MappingConfig};
use ontokb::{compile_rules, parse_program, Diagnostics, Fact, KnowledgeBase, Mode, RuleSet};

use crate::error::{CliError, Result};
use crate::manifest::{Manifest, FILE_NAME};
use crate::sources::{resolve, Sources};

pub struct Workspace {
    pub dir: PathBuf,
    pub manifest: Manifest,
    pub mode: Mode,
}

/// The ontology of a workspace, checked and ready for facts.
pub struct Ontology {
    pub kb: KnowledgeBase,
    pub rules: RuleSet,
    pub digest: String,
}

impl Workspace {
    /// Opens `dir`. A directory without a manifest is a fresh workspace.
    pub fn open(dir: &Path, mode: Option<Mode>) -> Result<Workspace> {
        if !dir.is_dir() {
            return Err(CliError::io(dir, std::io::Error::new(std::io::ErrorKind::NotFound, "workspace directory not found")));
        }
        let path = dir.join(FILE_NAME);
        let manifest = match std::fs::read_to_string(&path) {
            Ok(src) => Manifest::parse(&src)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Manifest::default(),
            Err(e) => return Err(CliError::io(path, e)),
        };
        let mode = mode.or(manifest.mode).unwrap_or_default();
        Ok(Workspace { dir: dir.to_path_buf(), manifest, mode })
    }

    pub fn save(&self) -> Result<()> {
        let path = self.dir.join(FILE_NAME);
        std::fs::write(&path, self.manifest.render()).map_err(|e| CliError::io(path, e))
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        resolve(&self.dir, rel)
    }

    pub fn sources(&self) -> Result<Sources> {
        let paths: Vec<(PathBuf, String)> = self.manifest.ontology.iter().map(|o| (self.path(o), o.clone())).collect();
        Sources::read(&paths)
    }

    /// Parses, finalizes and compiles the ontology sources and asserts the
    /// facts they contain. Diagnostics are printed; `None` means errors.
    pub fn ontology(&self) -> Result<Option<Ontology>> {
        let sources = self.sources()?;
        let mut diags = Diagnostics::new();
        let loaded = load_program(&sources, self.mode, &mut diags);
        print_diagnostics(&diags, |d| sources.render(d));
        Ok(loaded.filter(|_| !diags.has_errors()).map(|(kb, rules)| Ontology { kb, rules, digest: sources.digest() }))
    }

    /// True if the ontology sources changed since the recorded digest.
    pub fn is_stale(&self, digest: &str) -> bool {
        self.manifest.ontology_digest.as_deref().is_some_and(|d| d != digest)
    }

    pub fn stale_message(&self) -> String {
        format!(
            "ontology sources changed since v{} was recorded; run `kbctl version bump` before ingesting or querying new data",
            self.manifest.version
        )
    }

    pub fn mapping(&self) -> Result<Option<(MappingConfig, Diagnostics, String)>> {
        let Some(rel) = &self.manifest.mapping else { return Ok(None) };
        let path = self.path(rel);
        let src = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let mut diags = Diagnostics::new();
        let config = parse_mapping(&src, &mut diags);
        Ok(Some((config, diags, rel.clone())))
    }

    pub fn snapshot_path(&self) -> PathBuf {
        self.path(&self.manifest.snapshot)
    }

    /// Raw snapshot text; empty if nothing was ingested yet.
    pub fn snapshot_text(&self) -> Result<String> {
        let path = self.snapshot_path();
        match std::fs::read_to_string(&path) {
            Ok(s) => Ok(s),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(String::new()),
            Err(e) => Err(CliError::io(path, e)),
        }
    }

    /// Asserts the snapshot facts into `kb`.
    pub fn load_snapshot(&self, kb: &mut KnowledgeBase) -> Result<()> {
        let text = self.snapshot_text()?;
        let mut diags = Diagnostics::new();
        let facts = parse_facts(&text, &mut diags);
        kb.assert_all(facts.iter().map(|f| (f, None)), &mut diags);
        let name = self.manifest.snapshot.clone();
        print_diagnostics(&diags, |d| d.render(&name));
        if diags.has_errors() {
            return Err(CliError::Failed(format!("{name}: snapshot does not load against the current ontology")));
        }
        Ok(())
    }

    /// Workspace-relative form of `path` when it lies inside the workspace.
    pub fn relative(&self, path: &Path) -> String {
        let abs = |p: &Path| std::fs::canonicalize(p).unwrap_or_else(|_| p.to_path_buf());
        let (dir, path) = (abs(&self.dir), abs(path));
        match path.strip_prefix(&dir) {
            Ok(rel) => rel.to_string_lossy().replace('\\', "/"),
            Err(_) => path.to_string_lossy().into_owned(),
        }
    }
}

/// Builds a knowledge base from parsed sources: schema, facts and rules.
pub fn load_program(sources: &Sources, mode: Mode, diags: &mut Diagnostics) -> Option<(KnowledgeBase, RuleSet)> {
    let program = sources.parse(diags);
    if diags.has_errors() {
        return None;
    }
    let schema = OntologyBuilder::from_program(&program, diags).finalize(diags)?;
    let mut kb = KnowledgeBase::new(Arc::new(schema), mode);
    kb.assert_all(program.facts.iter().map(|f| (&f.fact, f.pos)), diags);
    let rules = compile_rules(&program.rules, kb.schema(), mode, diags);
    Some((kb, rules))
}

/// Reads fact lines in source syntax, e.g. a snapshot or a cache file.
pub fn parse_facts(text: &str, diags: &mut Diagnostics) -> Vec<Fact> {
    parse_program(text, diags).facts.into_iter().map(|f| f.fact).collect()
}

/// One fact per line, sorted, each terminated by `.`.
pub fn render_facts<'a>(facts: impl IntoIterator<Item = &'a Fact>) -> String {
    let mut lines: Vec<String> = facts.into_iter().map(|f| format!("{f}.")).collect();
    lines.sort();
    lines.dedup();
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

pub fn print_diagnostics(diags: &Diagnostics, render: impl Fn(&ontokb::Diagnostic) -> String) {
    for d in diags.iter() {
        eprintln!("{}", render(d));
    }
}
