mod args;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};
use serde_json::Value;

use args::{Cli, Command};
use config::RunConfig;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let Some(command) = cli.command else {
        eprintln!("{}", Cli::command().render_usage());
        return Ok(1);
    };
    let g = cli.global;
    let (mut cfg, flags) = match &command {
        Command::Run { path } => {
            if g.config.is_some() {
                bail!("`run` takes the config as its argument; drop --config");
            }
            (RunConfig::load(path)?, Value::Null)
        }
        sub => {
            let cfg = match &g.config {
                Some(path) => {
                    let cfg = RunConfig::load(path)?;
                    if cfg.command != sub.name() {
                        bail!(
                            "config {} is for `{}`, not `{}`",
                            path.display(),
                            cfg.command,
                            sub.name()
                        );
                    }
                    cfg
                }
                None => RunConfig::new(sub.name()),
            };
            (cfg, commands::flags(sub)?)
        }
    };
    if let Some(seed) = g.seed {
        cfg.master_seed = seed;
    }
    if let Some(dir) = g.output_dir {
        cfg.output_dir = Some(dir);
    }
    if let Some(w) = g.workers {
        cfg.workers = w;
    }
    rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build_global()?;
    let code = commands::dispatch(&mut cfg, &flags, g.quiet)?;
    Ok(code as u8)
}
