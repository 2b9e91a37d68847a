//! `key = value` files, merged by splicing them in as flags ahead of the
//! real ones so that command-line values override file values.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use clap::CommandFactory;

use crate::args::Cli;

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected `key = value`", lineno + 1))?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() {
            return Err(format!("line {}: empty key", lineno + 1));
        }
        if pairs.iter().any(|(k, _): &(String, String)| *k == key) {
            return Err(format!("line {}: duplicate key {key:?}", lineno + 1));
        }
        pairs.push((key, value.trim().to_string()));
    }
    Ok(pairs)
}

/// Flags equivalent to `pairs` for `subcommand`. Unknown keys are errors.
pub fn to_flags(subcommand: &str, pairs: &[(String, String)]) -> Result<Vec<OsString>, String> {
    let root = Cli::command();
    let sub = root
        .find_subcommand(subcommand)
        .ok_or_else(|| format!("unknown command {subcommand}"))?;
    let mut flags = Vec::new();
    for (key, value) in pairs {
        let arg = sub
            .get_arguments()
            .find(|a| a.get_long() == Some(key.as_str()) && key != "config" && key != "help")
            .ok_or_else(|| format!("unknown config key {key:?} for {subcommand}"))?;
        if arg.get_action().takes_values() {
            flags.push(OsString::from(format!("--{key}")));
            flags.push(OsString::from(value));
        } else {
            match value.as_str() {
                "true" | "yes" | "1" => flags.push(OsString::from(format!("--{key}"))),
                "false" | "no" | "0" => {}
                _ => {
                    return Err(format!(
                        "config key {key:?} takes true or false, got {value:?}"
                    ))
                }
            }
        }
    }
    Ok(flags)
}

/// `argv` with the file's flags inserted right after the subcommand name.
pub fn merge(argv: &[OsString], subcommand: &str, path: &Path) -> Result<Vec<OsString>, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let flags = to_flags(subcommand, &parse(&text)?)?;
    let pos = (1..argv.len())
        .find(|&i| argv[i] == subcommand && argv[i - 1] != "--config")
        .ok_or_else(|| "cannot locate the subcommand".to_string())?;
    let mut out = argv[..=pos].to_vec();
    out.extend(flags);
    out.extend_from_slice(&argv[pos + 1..]);
    Ok(out)
}
