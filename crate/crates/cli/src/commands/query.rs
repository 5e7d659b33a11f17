//! Query evaluation with a disk cache of the saturated fact set.

use std::path::{Path, PathBuf};

use ontokb::{evaluate, explain, parse_query, saturate, supporting_facts, Diagnostics, FactStore, Mode, SaturatedKb};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};
use crate::workspace::{parse_facts, print_diagnostics, render_facts, Ontology, Workspace};
use crate::QueryArgs;

const CACHE_DIR: &str = ".kbctl-cache";
/// Prefix of replayed saturation warnings in a cache file.
const NOTE: &str = "//! ";

pub fn run(dir: &Path, mode: Option<Mode>, args: &QueryArgs) -> Result<()> {
    let ws = Workspace::open(dir, mode)?;
    let (text, name) = match (&args.text, &args.file) {
        (Some(t), _) => (t.clone(), "<query>".to_string()),
        (None, Some(f)) => (std::fs::read_to_string(f).map_err(|e| CliError::io(f, e))?, f.display().to_string()),
        (None, None) => return Err(CliError::Usage("give a query with -q or -f".into())),
    };
    let mut diags = Diagnostics::new();
    let query = parse_query(&text, &mut diags);
    print_diagnostics(&diags, |d| d.render(&name));
    let Some(query) = query.filter(|_| !diags.has_errors()) else {
        return Err(CliError::Failed("query rejected".into()));
    };

    let Some(mut ontology) = ws.ontology()? else {
        return Err(CliError::Failed("ontology has errors".into()));
    };
    if ws.is_stale(&ontology.digest) {
        eprintln!("warning: {}", ws.stale_message());
    }
    ws.load_snapshot(&mut ontology.kb)?;
    let skb = saturated(&ws, &ontology, args.explain.is_some())?;

    let mut diags = Diagnostics::new();
    let result = evaluate(&query, &skb, &mut diags);
    print_diagnostics(&diags, |d| d.render(&name));
    if diags.has_errors() {
        return Err(CliError::Failed("query rejected".into()));
    }
    print!("{}", result.render(args.tsv));

    if let Some(n) = args.explain {
        if n == 0 || n > result.len() {
            return Err(CliError::Usage(format!("--explain {n}: the result has {} row(s), numbered from 1", result.len())));
        }
        println!();
        for fact in supporting_facts(&query, &result, n - 1) {
            print!("{}", explain(&skb, &fact).render());
        }
    }
    Ok(())
}

/// Saturates, reusing a cached derived set when traces are not needed.
fn saturated(ws: &Workspace, ontology: &Ontology, need_provenance: bool) -> Result<SaturatedKb> {
    let cache = cache_path(ws, ontology)?;
    if !need_provenance {
        if let Some(skb) = read_cache(&cache, ontology) {
            return Ok(skb);
        }
    }
    let mut diags = Diagnostics::new();
    let skb = saturate(&ontology.kb, &ontology.rules, &mut diags).map_err(|e| CliError::Failed(e.to_string()))?;
    let notes: Vec<String> = diags.iter().map(|d| d.render("<saturation>")).collect();
    for n in &notes {
        eprintln!("{n}");
    }
    write_cache(&cache, &notes, skb.derived());
    Ok(skb)
}

fn cache_path(ws: &Workspace, ontology: &Ontology) -> Result<PathBuf> {
    let mut h = Sha256::new();
    h.update(ontology.digest.as_bytes());
    h.update([0]);
    h.update(ws.snapshot_text()?.as_bytes());
    h.update([0]);
    h.update(if ws.mode == Mode::Strict { b"strict".as_slice() } else { b"lenient".as_slice() });
    let key: String = h.finalize().iter().take(16).map(|b| format!("{b:02x}")).collect();
    Ok(ws.dir.join(CACHE_DIR).join(format!("{key}.flo")))
}

fn read_cache(path: &Path, ontology: &Ontology) -> Option<SaturatedKb> {
    let text = std::fs::read_to_string(path).ok()?;
    let mut diags = Diagnostics::new();
    let facts = parse_facts(&text, &mut diags);
    if diags.has_errors() {
        return None;
    }
    for line in text.lines().filter_map(|l| l.strip_prefix(NOTE)) {
        eprintln!("{line}");
    }
    let mut derived = FactStore::new();
    for f in &facts {
        derived.insert(f);
    }
    Some(SaturatedKb::restore(&ontology.kb, &ontology.rules, derived))
}

/// Best effort: a cache that cannot be written is simply not used.
fn write_cache(path: &Path, notes: &[String], derived: &FactStore) {
    let mut text: String = notes.iter().map(|n| format!("{NOTE}{n}\n")).collect();
    text.push_str(&render_facts(&derived.iter().collect::<Vec<_>>()));
    if let Some(dir) = path.parent() {
        let _ = std::fs::create_dir_all(dir);
    }
    let _ = std::fs::write(path, text);
}
