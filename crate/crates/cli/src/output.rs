use std::io::Write;
use std::path::Path;

use tempfile::NamedTempFile;

use crate::Failure;

pub const STDOUT: &str = "-";

/// Writes every artifact only after all of them have been produced. Files
/// are staged next to their destination and renamed into place.
pub fn emit(artifacts: Vec<(String, String)>) -> Result<(), Failure> {
    let mut staged = Vec::new();
    let mut stdout = String::new();
    for (target, content) in artifacts {
        if target == STDOUT {
            stdout.push_str(&content);
            continue;
        }
        let path = Path::new(&target);
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let fail = |e: std::io::Error| Failure::Usage(format!("cannot write '{target}': {e}"));
        let mut tmp = NamedTempFile::new_in(dir).map_err(fail)?;
        tmp.write_all(content.as_bytes()).map_err(fail)?;
        tmp.flush().map_err(fail)?;
        staged.push((tmp, target));
    }
    for (tmp, target) in staged {
        tmp.persist(&target)
            .map_err(|e| Failure::Usage(format!("cannot write '{target}': {}", e.error)))?;
    }
    if !stdout.is_empty() {
        let mut out = std::io::stdout().lock();
        out.write_all(stdout.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| Failure::Usage(format!("cannot write to stdout: {e}")))?;
    }
    Ok(())
}
