//! Ontology versions carried in namespace URIs as a `#vN` fragment.

use super::NamespaceBinding;
use crate::diag::{Code, Diagnostics};

/// The `N` of a trailing `#vN` fragment.
pub fn parse_version(uri: &str) -> Option<u32> {
    let (_, frag) = uri.rsplit_once('#')?;
    let digits = frag.strip_prefix('v')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// Compares versioned bindings against the current ontology version.
/// Older versions warn; newer ones are errors, since new entries may only
/// be made against the newest version. Returns false if any binding is
/// newer.
pub fn check_version(bindings: &[NamespaceBinding], current: u32, diags: &mut Diagnostics) -> bool {
    let mut ok = true;
    for b in bindings {
        let Some(v) = b.version else { continue };
        let label = if b.prefix.is_empty() { "default namespace".to_string() } else { format!("namespace `{}`", b.prefix) };
        if v < current {
            diags.warning(
                Code::VersionOutdated,
                None,
                format!("{label} ({}) targets ontology v{v}, workspace is at v{current}; re-annotate against #v{current} when convenient", b.uri),
            );
        } else if v > current {
            ok = false;
            diags.error(
                Code::VersionTooNew,
                None,
                format!("{label} ({}) targets ontology v{v}, newer than the workspace version v{current}; bump the workspace first", b.uri),
            );
        }
    }
    ok
}
