//! Flat `key=value` run manifests.
//!
//! Keys are long option names without the leading dashes (`delta`,
//! `grid-n`, `seed`, ...). `#` starts a comment. Boolean flags take `true`
//! or `false`. Values from the file are spliced in front of the
//! subcommand's own arguments, so flags given on the command line win.

use std::path::Path;

use anyhow::{bail, Context, Result};

/// Options that live on the top-level command and take a value.
const GLOBAL_VALUED: &[&str] = &["--seed", "--threads", "--config", "--format", "--output"];

/// Parses a manifest into `(key, value)` pairs in file order.
pub fn parse_manifest(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected key=value, got '{line}'", lineno + 1);
        };
        let key = k.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() || key == "config" {
            bail!("config line {}: invalid key '{}'", lineno + 1, k.trim());
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

/// Reads `path` and splices its options into `args` right after the
/// subcommand token. Returns `args` unchanged when no config is given.
pub fn apply_config(args: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = find_config(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path)).with_context(|| format!("reading config {path}"))?;
    let pairs = parse_manifest(&text)?;
    let Some(at) = subcommand_index(&args) else {
        // No subcommand: let clap report the usage error.
        return Ok(args);
    };
    let mut injected = Vec::new();
    for (k, v) in pairs {
        match v.as_str() {
            "true" => injected.push(format!("--{k}")),
            "false" => {}
            _ => injected.push(format!("--{k}={v}")),
        }
    }
    let mut out = args[..=at].to_vec();
    out.extend(injected);
    out.extend_from_slice(&args[at + 1..]);
    Ok(out)
}

fn find_config(args: &[String]) -> Option<String> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(v.to_string());
        }
    }
    None
}

/// Position of the first token that is neither an option nor an option's
/// value.
fn subcommand_index(args: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = &args[i];
        if GLOBAL_VALUED.contains(&a.as_str()) {
            i += 2;
            continue;
        }
        if a.starts_with('-') {
            i += 1;
            continue;
        }
        return Some(i);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn manifest_parsing() {
        let p = parse_manifest("# run\ndelta = 0.05\ngrid_n=51  # coarse\n\nquick=true\n").unwrap();
        assert_eq!(
            p,
            vec![
                ("delta".into(), "0.05".into()),
                ("grid-n".into(), "51".into()),
                ("quick".into(), "true".into())
            ]
        );
        assert!(parse_manifest("delta 0.05").is_err());
        assert!(parse_manifest("config=other").is_err());
    }

    #[test]
    fn subcommand_is_found_after_valued_globals() {
        let a = strings(&["sbr", "--seed", "4", "--format=csv", "ratio", "--delta", "0.1"]);
        assert_eq!(subcommand_index(&a), Some(4));
        assert_eq!(subcommand_index(&strings(&["sbr", "--seed", "4"])), None);
    }
}
