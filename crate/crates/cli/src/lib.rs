//! The `tm` command line, as a library so tests can drive it in-process.

pub mod args;
mod color;
mod commands;

use std::io::IsTerminal;
use std::path::Path;

use clap::Parser;
use rayon::prelude::*;

pub use args::{Cli, Command};
pub use color::ColorChoice;
use color::Painter;
use commands::{process, Context, FileOutput};

/// Exit code plus everything the process would print.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Clone, Copy)]
pub struct Env {
    pub color: ColorChoice,
    pub stderr_is_terminal: bool,
}

impl Env {
    pub fn from_process() -> Self {
        Env {
            color: ColorChoice::from_env_value(std::env::var("TM_COLOR").ok().as_deref()),
            stderr_is_terminal: std::io::stderr().is_terminal(),
        }
    }

    pub fn plain() -> Self {
        Env {
            color: ColorChoice::Never,
            stderr_is_terminal: false,
        }
    }
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &Env::from_process())
}

fn usage(message: &str) -> Outcome {
    Outcome {
        code: 2,
        stdout: String::new(),
        stderr: format!("tm: {message}\n"),
    }
}

pub fn run_with<I, T>(argv: I, env: &Env) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let inputs = cli.command.inputs();
    if cli.json && !matches!(cli.command, Command::Check(_) | Command::Events(_)) {
        return usage(&format!(
            "--json is not supported by `{}`",
            cli.command.name()
        ));
    }
    let is_fmt = matches!(cli.command, Command::Fmt(_));
    let to_stdout = cli.output.as_deref() == Some(Path::new("-"));
    if is_fmt && inputs.len() > 1 && cli.output.is_some() && !to_stdout {
        return usage("fmt -o FILE takes a single input");
    }

    let ctx = Context {
        cli: &cli,
        painter: Painter {
            enabled: env.color.enabled(env.stderr_is_terminal),
        },
        headers: inputs.len() > 1,
    };
    let outputs: Vec<FileOutput> = inputs.par_iter().map(|p| process(&ctx, p)).collect();

    let mut outcome = Outcome::default();
    let mut json = Vec::new();
    for o in outputs {
        outcome.code = outcome.code.max(o.code);
        outcome.stderr.push_str(&o.stderr);
        outcome.stdout.push_str(&o.stdout);
        json.extend(o.json);
    }
    if cli.json {
        let doc = if inputs.len() == 1 && json.len() == 1 {
            json.pop().unwrap()
        } else {
            serde_json::Value::Array(json)
        };
        outcome.stdout = serde_json::to_string_pretty(&doc).expect("json value serializes") + "\n";
    }
    if !is_fmt {
        if let Some(path) = cli.output.as_deref().filter(|p| *p != Path::new("-")) {
            if outcome.code == 0 {
                if let Err(e) = std::fs::write(path, &outcome.stdout) {
                    outcome
                        .stderr
                        .push_str(&format!("tm: cannot write {}: {e}\n", path.display()));
                    outcome.code = 2;
                }
            }
            outcome.stdout.clear();
        }
    }
    outcome
}
