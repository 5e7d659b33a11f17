use std::path::Path;

use ontokb::Mode;

use crate::error::{CliError, Result};
use crate::workspace::Workspace;

pub fn show(dir: &Path) -> Result<()> {
    let ws = Workspace::open(dir, None)?;
    println!("v{}", ws.manifest.version);
    Ok(())
}

/// Moves the workspace to the next version and records the digest of the
/// current ontology sources. Refused while the sources have errors.
pub fn bump(dir: &Path, mode: Option<Mode>) -> Result<()> {
    let mut ws = Workspace::open(dir, mode)?;
    let Some(ontology) = ws.ontology()? else {
        return Err(CliError::Failed("ontology has errors; fix them before bumping the version".into()));
    };
    ws.manifest.version += 1;
    let stamp = chrono::Utc::now().format("%Y-%m-%dT%H:%M:%SZ");
    ws.manifest.bumps.push(format!("v{} {stamp} {}", ws.manifest.version, &ontology.digest[..12]));
    ws.manifest.ontology_digest = Some(ontology.digest);
    ws.save()?;
    println!("v{}", ws.manifest.version);
    Ok(())
}
