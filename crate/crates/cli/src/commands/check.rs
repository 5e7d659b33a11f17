use std::path::{Path, PathBuf};

use ontokb::{Diagnostics, Mode};

use crate::error::{CliError, Result};
use crate::sources::Sources;
use crate::workspace::{load_program, print_diagnostics, Workspace};

pub fn run(dir: &Path, mode: Option<Mode>, files: &[PathBuf]) -> Result<()> {
    if !files.is_empty() {
        let paths: Vec<(PathBuf, String)> = files.iter().map(|f| (f.clone(), f.display().to_string())).collect();
        let sources = Sources::read(&paths)?;
        return check_sources(&sources, mode.unwrap_or_default());
    }
    let ws = Workspace::open(dir, mode)?;
    if ws.manifest.ontology.is_empty() {
        return Err(CliError::Usage("no files given and the workspace lists no ontology sources".into()));
    }
    let sources = ws.sources()?;
    check_sources(&sources, ws.mode)?;
    if ws.is_stale(&sources.digest()) {
        eprintln!("warning: {}", ws.stale_message());
    }
    if let Some((config, mut diags, name)) = ws.mapping()? {
        let mut schema_diags = Diagnostics::new();
        if let Some((kb, _)) = load_program(&sources, ws.mode, &mut schema_diags) {
            config.check(kb.schema(), &mut diags);
        }
        print_diagnostics(&diags, |d| d.render(&name));
        if diags.has_errors() {
            return Err(CliError::Failed(format!("{name}: mapping has errors")));
        }
    }
    Ok(())
}

fn check_sources(sources: &Sources, mode: Mode) -> Result<()> {
    let mut diags = Diagnostics::new();
    load_program(sources, mode, &mut diags);
    print_diagnostics(&diags, |d| sources.render(d));
    match diags.error_count() {
        0 => Ok(()),
        1 => Err(CliError::Failed("1 error".into())),
        n => Err(CliError::Failed(format!("{n} errors"))),
    }
}
