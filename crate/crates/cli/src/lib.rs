//! Command-line front end for the `noble-means` library.
//!
//! Each invocation resolves one [`config::RunConfig`] from flags and an
//! optional JSON file, runs it, and writes CSV, JSON or SVG output tagged
//! with the SHA-256 of that configuration.

pub mod commands;
pub mod config;
pub mod error;
pub mod svg;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;

use crate::commands::Part;
use crate::config::{CommandArgs, CommonArgs, Format};
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "noble-means", version, about = "Random noble means substitutions")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: CommandArgs,
}

/// Path of a named part: `<stem>_<name>.<ext>` next to `out`.
fn part_path(out: &Path, name: &str, format: Format) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = out
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| format.extension().to_owned());
    out.with_file_name(format!("{stem}_{name}.{ext}"))
}

fn write_parts(out: Option<&Path>, format: Format, parts: &[Part]) -> Result<(), CliError> {
    match out {
        Some(out) => {
            for part in parts {
                let path = match part.name {
                    Some(name) => part_path(out, name, format),
                    None => out.to_path_buf(),
                };
                std::fs::write(&path, &part.content).map_err(|source| CliError::Io { path, source })?;
            }
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            let io = |source| CliError::Io { path: PathBuf::from("<stdout>"), source };
            for (i, part) in parts.iter().enumerate() {
                if i > 0 {
                    writeln!(lock).map_err(io)?;
                }
                if let Some(name) = part.name {
                    writeln!(lock, "# part: {name}").map_err(io)?;
                }
                lock.write_all(part.content.as_bytes()).map_err(io)?;
            }
        }
    }
    Ok(())
}

/// Resolves, runs and writes one invocation.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let print_config = cli.common.print_config;
    let cfg = config::resolve(cli.common, cli.command)?;
    if print_config {
        println!("{}", cfg.to_json());
        return Ok(());
    }
    let parts = commands::execute(&cfg)?;
    write_parts(cfg.out.as_deref(), cfg.format, &parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn part_paths() {
        assert_eq!(part_path(Path::new("d/spec.csv"), "ac", Format::Csv), PathBuf::from("d/spec_ac.csv"));
        assert_eq!(part_path(Path::new("spec"), "pp", Format::Csv), PathBuf::from("spec_pp.csv"));
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
