//! Flat `key = value` configuration files merged under command-line flags.

use std::path::PathBuf;

use crate::CliError;

/// Global flags that take a value.
const GLOBAL_WITH_VALUE: [&str; 4] = ["config", "output", "format", "seed"];

/// Parses `key = value` lines. Blank lines and lines starting with `#` or `;`
/// are skipped; underscores in keys are read as hyphens. Later duplicates
/// win.
pub fn parse_ini(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config line {}: expected `key = value`, got `{line}`",
                n + 1
            )));
        };
        let key = k.trim().replace('_', "-");
        let value = v.trim().to_string();
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", n + 1)));
        }
        out.retain(|(existing, _)| *existing != key);
        out.push((key, value));
    }
    Ok(out)
}

/// The `--config` path among the arguments, if any.
pub(crate) fn config_path(args: &[String]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    let mut found = None;
    while let Some(a) = it.next() {
        if a == "--config" {
            found = it.next().map(PathBuf::from);
        } else if let Some(v) = a.strip_prefix("--config=") {
            found = Some(PathBuf::from(v));
        }
    }
    found
}

/// Index of the subcommand token in `args`, skipping global flag values.
fn subcommand_index(cmd: &clap::Command, args: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = &args[i];
        if let Some(flag) = a.strip_prefix("--") {
            if !flag.contains('=') && GLOBAL_WITH_VALUE.contains(&flag) {
                i += 1;
            }
        } else if cmd.find_subcommand(a).is_some() {
            return Some(i);
        }
        i += 1;
    }
    None
}

/// Inserts the file entries right after the subcommand token so that every
/// flag given on the command line comes later and overrides them.
pub(crate) fn merge_args(cmd: &clap::Command, args: &[String], file: &[(String, String)]) -> Result<Vec<String>, CliError> {
    if file.is_empty() {
        return Ok(args.to_vec());
    }
    let mut args = args.to_vec();
    if args.is_empty() {
        args.push("monopole-lab".into());
    }
    let file_command = file.iter().find(|(k, _)| k == "command").map(|(_, v)| v.clone());
    let idx = match subcommand_index(cmd, &args) {
        Some(i) => i,
        None => {
            let name = file_command.ok_or_else(|| CliError::Usage("no command given on the command line or in the config file".into()))?;
            if cmd.find_subcommand(&name).is_none() {
                return Err(CliError::Usage(format!("unknown command `{name}` in config file")));
            }
            args.push(name);
            args.len() - 1
        }
    };
    let sub = cmd
        .find_subcommand(&args[idx])
        .expect("subcommand index points at a subcommand");
    let known = |key: &str| {
        GLOBAL_WITH_VALUE.contains(&key)
            || sub
                .get_arguments()
                .any(|a| a.get_long() == Some(key))
    };
    let mut injected = Vec::new();
    for (k, v) in file {
        if k == "command" {
            continue;
        }
        if k == "config" {
            return Err(CliError::Usage("config files cannot include other config files".into()));
        }
        if !known(k) {
            return Err(CliError::Usage(format!(
                "unknown key `{k}` in config file for command `{}`",
                sub.get_name()
            )));
        }
        injected.push(format!("--{k}={v}"));
    }
    let mut merged = args[..=idx].to_vec();
    merged.extend(injected);
    merged.extend_from_slice(&args[idx + 1..]);
    Ok(merged)
}
