use std::ffi::OsString;
use std::path::Path;

use crate::error::{Error, Result};

/// Flags from a `key=value` file. Blank lines and `#` comments are
/// skipped; `key=true` becomes a bare `--key` and `key=false` is dropped.
pub fn config_flags(text: &str) -> Result<Vec<OsString>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::arg(format!("config line {}: expected key=value", n + 1)))?;
        let key = key.trim().trim_start_matches('-');
        if key.is_empty() {
            return Err(Error::arg(format!("config line {}: empty key", n + 1)));
        }
        match value.trim() {
            "true" => out.push(format!("--{key}").into()),
            "false" => {}
            v => {
                out.push(format!("--{key}").into());
                out.push(v.into());
            }
        }
    }
    Ok(out)
}

/// Splices flags from any `--config FILE` in front of the subcommand's own
/// flags, so that the command line overrides the file.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut config = None;
    let mut sub = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if a == "--config" {
            config = args.get(i + 1).cloned();
            i += 2;
            continue;
        }
        if let Some(v) = a.strip_prefix("--config=") {
            config = Some(v.into());
        } else if sub.is_none() && !a.starts_with('-') {
            sub = Some(i);
        }
        i += 1;
    }
    let (Some(path), Some(sub)) = (config, sub) else {
        return Ok(args);
    };
    let path = Path::new(&path);
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::arg(format!("cannot read config {}: {e}", path.display())))?;
    let flags = config_flags(&text)?;
    let mut out = args[..=sub].to_vec();
    out.extend(flags);
    out.extend_from_slice(&args[sub + 1..]);
    Ok(out)
}
