//! Several ontology files parsed as one program, with diagnostics mapped
//! back to the file they came from.

use std::path::{Path, PathBuf};

use ontokb::{parse_program, Diagnostic, Diagnostics, Pos, Program};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

pub struct Sources {
    /// (display name, first line in the combined text, text)
    files: Vec<(String, u32, String)>,
}

impl Sources {
    /// Reads every file; `display` gives each the name used in diagnostics.
    pub fn read(paths: &[(PathBuf, String)]) -> Result<Sources> {
        let mut files = Vec::new();
        let mut line = 1;
        for (path, display) in paths {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            let lines = text.lines().count() as u32 + 1;
            files.push((display.clone(), line, text));
            line += lines;
        }
        Ok(Sources { files })
    }

    /// SHA-256 over names and contents, in order.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for (name, _, text) in &self.files {
            h.update(name.as_bytes());
            h.update([0]);
            h.update(text.as_bytes());
            h.update([0]);
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Parses the files as one program. Each file is first parsed alone so
    /// that a statement left open at the end of one file is reported there
    /// instead of swallowing the next file.
    pub fn parse(&self, diags: &mut Diagnostics) -> Program {
        let mut combined = String::new();
        let mut broken = false;
        for (_, start, text) in &self.files {
            let mut local = Diagnostics::new();
            parse_program(text, &mut local);
            for d in local.into_vec() {
                broken |= d.is_error();
                diags.push(Diagnostic { pos: d.pos.map(|p| Pos::new(p.line + start - 1, p.col)), ..d });
            }
            combined.push_str(text);
            combined.push('\n');
        }
        if broken {
            return Program::default();
        }
        parse_program(&combined, &mut Diagnostics::new())
    }

    /// `file:line:col: severity CODE message` for a diagnostic whose line
    /// refers to the combined text.
    pub fn render(&self, d: &Diagnostic) -> String {
        let Some(p) = d.pos else {
            let name = self.files.first().map(|f| f.0.as_str()).unwrap_or("<ontology>");
            return d.render(name);
        };
        let (name, start, _) = self.files.iter().rev().find(|(_, start, _)| *start <= p.line).unwrap_or(&self.files[0]);
        Diagnostic { pos: Some(Pos::new(p.line - start + 1, p.col)), ..d.clone() }.render(name)
    }
}

/// Resolves `rel` against `dir` unless it is absolute.
pub fn resolve(dir: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        dir.join(p)
    }
}
