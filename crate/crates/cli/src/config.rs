//! `--config` support: entries of a flat `key = value` file become flags
//! unless the same flag was given on the command line.

use std::collections::BTreeSet;
use std::fs;

use clap::{ArgAction, CommandFactory};

use crate::args::Cli;

fn long_names(cmd: &clap::Command) -> impl Iterator<Item = (String, bool)> + '_ {
    cmd.get_arguments().filter_map(|a| {
        let is_switch = matches!(a.get_action(), ArgAction::SetTrue);
        a.get_long().map(|l| (l.to_string(), is_switch))
    })
}

/// Parses `key = value` lines; `#` starts a comment, a leading `--` on keys is optional.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
        let key = k.trim().trim_start_matches("--").to_string();
        if key.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        out.push((key, v.trim().to_string()));
    }
    Ok(out)
}

fn config_path(argv: &[String]) -> Option<String> {
    argv.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            argv.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_string)
        }
    })
}

/// Returns `argv` extended with flags from the config file named by `--config`, if any.
pub fn merge_config(argv: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let entries = parse_config(&text)?;

    let root = Cli::command();
    let sub = argv
        .iter()
        .skip(1)
        .find_map(|a| root.find_subcommand(a))
        .cloned();
    let Some(sub) = sub else {
        return Ok(argv);
    };

    let known_anywhere: BTreeSet<String> = root
        .get_subcommands()
        .flat_map(|s| long_names(s).map(|(l, _)| l).collect::<Vec<_>>())
        .chain(long_names(&root).map(|(l, _)| l))
        .collect();
    let accepted: Vec<(String, bool)> = long_names(&sub).chain(long_names(&root)).collect();
    let given: BTreeSet<String> = argv
        .iter()
        .filter_map(|a| a.strip_prefix("--"))
        .map(|a| a.split('=').next().unwrap_or(a).to_string())
        .collect();

    let mut out = argv;
    for (key, value) in entries {
        if key == "config" || given.contains(&key) {
            continue;
        }
        match accepted.iter().find(|(l, _)| *l == key) {
            Some((_, true)) => match value.as_str() {
                "true" | "1" | "yes" => out.push(format!("--{key}")),
                "false" | "0" | "no" => {}
                _ => return Err(format!("config key {key} expects true or false, got {value}")),
            },
            Some((_, false)) => {
                out.push(format!("--{key}"));
                out.push(value);
            }
            None if known_anywhere.contains(&key) => {}
            None => return Err(format!("unknown config key {key}")),
        }
    }
    Ok(out)
}
