//! `key = value` run files merged into the argument list before parsing.

use anyhow::{bail, Context, Result};

#[derive(Debug, Default, PartialEq)]
pub struct RunConfig {
    pub command: Vec<String>,
    pub flags: Vec<(String, String)>,
}

pub fn parse(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected `key = value`, got {line:?}", no + 1);
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || k.starts_with('-') {
            bail!("config line {}: bad key {k:?}", no + 1);
        }
        if k == "command" {
            cfg.command = v.split_whitespace().map(String::from).collect();
        } else {
            cfg.flags.push((k.to_string(), v.to_string()));
        }
    }
    Ok(cfg)
}

fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn has_flag(argv: &[String], key: &str) -> bool {
    let long = format!("--{key}");
    let eq = format!("--{key}=");
    argv.iter().any(|a| *a == long || a.starts_with(&eq))
}

/// Inserts the config's command (when the command line has none) and
/// appends every flag the command line does not already set.
pub fn merge(mut argv: Vec<String>, cfg: &RunConfig) -> Vec<String> {
    let user = argv.clone();
    let mut rest = user.iter().skip(1);
    let mut has_command = false;
    while let Some(a) = rest.next() {
        if a == "--config" {
            rest.next();
        } else if !a.starts_with("--config=") {
            has_command = !a.starts_with('-');
            break;
        }
    }
    if !has_command {
        for (k, w) in cfg.command.iter().enumerate() {
            argv.insert(1 + k, w.clone());
        }
    }
    for (k, v) in &cfg.flags {
        if !has_flag(&user, k) {
            argv.push(format!("--{k}"));
            argv.push(v.clone());
        }
    }
    argv
}

pub fn expand_args(argv: Vec<String>) -> Result<Vec<String>> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {path}"))?;
    Ok(merge(argv, &parse(&text)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn command_line_wins() {
        let cfg = parse("# run\ncommand = escape and\neps = 4/5\nn = 3\n").unwrap();
        let out = merge(args("nsclosure --config c.txt --n 2"), &cfg);
        assert_eq!(out, args("nsclosure escape and --config c.txt --n 2 --eps 4/5"));
        let out = merge(args("nsclosure escape and --eps 9/10"), &cfg);
        assert_eq!(out, args("nsclosure escape and --eps 9/10 --n 3"));
    }

    #[test]
    fn malformed_lines() {
        assert!(parse("eps 4/5").is_err());
        assert!(parse("--eps = 4/5").is_err());
    }
}
