//! Document ingestion: parse, validate, extract, version-check, map and
//! merge into the workspace snapshot.

use std::path::{Path, PathBuf};

use ontokb::rdf::{check_version, extract_document, extract_islands, map_to_facts, scan_rdf, MapOptions, MappingConfig, RdfGraph};
use ontokb::xml::{decode_bytes, doctype_dtd, parse_xml, validate_document};
use ontokb::{Diagnostic, Diagnostics, Fact, KnowledgeBase, Mode, Severity};

use crate::error::{CliError, Result};
use crate::workspace::{print_diagnostics, render_facts, Workspace};

/// What one document contributed.
struct Outcome {
    statements: usize,
    facts: Vec<Fact>,
}

pub fn run(dir: &Path, mode: Option<Mode>, docs: &[PathBuf], all_alternatives: bool) -> Result<()> {
    let mut ws = Workspace::open(dir, mode)?;
    let Some((config, map_diags, map_name)) = ws.mapping()? else {
        return Err(CliError::Failed("the workspace has no mapping; add `mapping = <file>` to the manifest".into()));
    };
    let Some(ontology) = ws.ontology()? else {
        return Err(CliError::Failed("ontology has errors".into()));
    };
    if ws.is_stale(&ontology.digest) {
        return Err(CliError::Failed(ws.stale_message()));
    }
    let mut map_diags = map_diags;
    config.check(ontology.kb.schema(), &mut map_diags);
    print_diagnostics(&map_diags, |d| d.render(&map_name));
    if map_diags.has_errors() {
        return Err(CliError::Failed(format!("{map_name}: mapping has errors")));
    }

    let mut kb = ontology.kb.clone();
    ws.load_snapshot(&mut kb)?;
    let opts = MapOptions { mode: ws.mode, all_alternatives };
    let mut rejected = 0;
    for doc in docs {
        let name = doc.display().to_string();
        let mut diags = Diagnostics::new();
        let bytes = std::fs::read(doc).map_err(|e| CliError::io(doc, e))?;
        let outcome = ingest_one(doc, &bytes, ws.manifest.version, &config, &mut kb, opts, &mut diags);
        print_diagnostics(&diags, |d| d.render(&name));
        match outcome {
            Some(o) => {
                println!("{name}: {} statements, {} facts, {} warnings", o.statements, o.facts.len(), diags.warning_count());
                let rel = ws.relative(doc);
                if !ws.manifest.documents.contains(&rel) {
                    ws.manifest.documents.push(rel);
                }
            }
            None => {
                rejected += 1;
                println!("{name}: rejected, {} errors", diags.error_count());
            }
        }
    }

    let path = ws.snapshot_path();
    // the snapshot holds ingested facts only; ontology facts come from source
    let ingested: Vec<Fact> = kb.facts().iter().filter(|f| !ontology.kb.facts().contains(f)).collect();
    std::fs::write(&path, render_facts(&ingested)).map_err(|e| CliError::io(path, e))?;
    if ws.manifest.ontology_digest.is_none() {
        ws.manifest.ontology_digest = Some(ontology.digest);
    }
    ws.save()?;
    match rejected {
        0 => Ok(()),
        n => Err(CliError::Failed(format!("{n} of {} documents rejected", docs.len()))),
    }
}

/// Processes one document. Returns `None` if it is rejected, in which case
/// `kb` is left unchanged.
fn ingest_one(
    path: &Path,
    bytes: &[u8],
    version: u32,
    config: &MappingConfig,
    kb: &mut KnowledgeBase,
    opts: MapOptions,
    diags: &mut Diagnostics,
) -> Option<Outcome> {
    let src = decode_bytes(bytes, diags)?;
    let graph = extract(path, &src, config, opts.mode, diags)?;
    if !check_version(&graph.namespaces, version, diags) {
        return None;
    }
    let facts = map_to_facts(&graph, kb.schema(), config, opts, diags);
    if diags.has_errors() {
        return None;
    }
    let mut next = kb.clone();
    next.assert_all(facts.iter().map(|f| (f, None)), diags);
    if diags.has_errors() {
        return None;
    }
    *kb = next;
    Some(Outcome { statements: graph.statements.len(), facts })
}

fn is_html(path: &Path) -> bool {
    path.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("html") || e.eq_ignore_ascii_case("htm"))
}

fn extract(path: &Path, src: &str, config: &MappingConfig, mode: Mode, diags: &mut Diagnostics) -> Option<RdfGraph> {
    let opts = config.extract_options();
    if is_html(path) {
        return Some(extract_islands(&scan_rdf(src, diags), &opts, diags));
    }
    let mut parse_diags = Diagnostics::new();
    let Some(doc) = parse_xml(src, mode, &mut parse_diags) else {
        if mode == Mode::Strict {
            diags.extend(parse_diags);
            return None;
        }
        diags.extend(downgrade(parse_diags));
        return Some(extract_islands(&scan_rdf(src, diags), &opts, diags));
    };
    diags.extend(parse_diags);
    if doc.doctype.is_some() {
        let base = path.parent().unwrap_or(Path::new("."));
        let mut load = |sys: &str| std::fs::read_to_string(base.join(sys)).map_err(|e| e.to_string());
        let mut dtd_diags = Diagnostics::new();
        if let Some(dtd) = doctype_dtd(&doc, &mut load, &mut dtd_diags) {
            validate_document(&doc, &dtd, &mut dtd_diags);
        }
        match mode {
            Mode::Strict => diags.extend(dtd_diags),
            Mode::Lenient => diags.extend(downgrade(dtd_diags)),
        }
        if diags.has_errors() {
            return None;
        }
    }
    Some(extract_document(&doc.root, &opts, diags))
}

/// Lenient mode reports validity problems without rejecting the document.
fn downgrade(diags: Diagnostics) -> Diagnostics {
    let mut out = Diagnostics::new();
    for d in diags.into_vec() {
        out.push(Diagnostic { severity: Severity::Warning, ..d });
    }
    out
}
