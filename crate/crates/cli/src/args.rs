use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "tm",
    version,
    about = "Check, render and simulate Thinging Machine models written in .tm files"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Treat R4/R5 as errors (default)
    #[arg(long, global = true, conflicts_with = "lax")]
    pub strict: bool,

    /// Downgrade R4/R5 to warnings
    #[arg(long, global = true)]
    pub lax: bool,

    /// What `render` draws
    #[arg(long, global = true, value_enum, default_value_t = Mode::Static)]
    pub mode: Mode,

    /// Layout direction for `render`
    #[arg(long, global = true, value_enum, ignore_case = true, default_value_t = Dir::Lr)]
    pub rankdir: Dir,

    /// Report cycles in the declared behavior as errors
    #[arg(long, global = true)]
    pub acyclic: bool,

    /// Disconnected event regions are errors under --strict
    #[arg(long = "connected-regions", global = true)]
    pub connected_regions: bool,

    /// Machine-readable output (check, events)
    #[arg(long, global = true)]
    pub json: bool,

    /// Write output to FILE; for `fmt`, `-` means stdout
    #[arg(short = 'o', global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse, resolve and validate, printing diagnostics
    Check(Inputs),
    /// List events with their region size and inferred predecessors
    Events(Inputs),
    /// Check the declared chronology and print a linear order
    Behavior(Inputs),
    /// Emit Graphviz DOT
    Render(Inputs),
    /// Run the token simulation along the chronology
    Simulate(Inputs),
    /// Rewrite files in canonical layout
    Fmt(Inputs),
}

impl Command {
    pub fn inputs(&self) -> &[PathBuf] {
        match self {
            Command::Check(i)
            | Command::Events(i)
            | Command::Behavior(i)
            | Command::Render(i)
            | Command::Simulate(i)
            | Command::Fmt(i) => &i.files,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Check(_) => "check",
            Command::Events(_) => "events",
            Command::Behavior(_) => "behavior",
            Command::Render(_) => "render",
            Command::Simulate(_) => "simulate",
            Command::Fmt(_) => "fmt",
        }
    }
}

#[derive(Debug, Args)]
pub struct Inputs {
    #[arg(required = true, value_name = "FILE")]
    pub files: Vec<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Static,
    Dynamic,
    Behavior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dir {
    #[value(name = "LR")]
    Lr,
    #[value(name = "TB")]
    Tb,
}
