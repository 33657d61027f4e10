mod commands;
mod config;
mod selftest;
mod spec;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  internal error
  2  usage error (unknown flag, missing argument, bad config line)
  3  malformed input (box, wiring, rational or JSON)
  4  parameter out of range
  5  file I/O error
  6  a self-check failed

Rationals are exact \"num/den\" strings; decimal input is rejected.
Any flag can also be given in a --config file as `key = value` (flag name
without dashes). A `command = escape and` line selects the subcommand when
none is given on the command line; flags on the command line win.";

#[derive(Parser)]
#[command(name = "nsclosure", version, about = "Exact wirings, distillation and closure checks for bipartite non-signalling boxes", after_help = EXIT_CODES)]
pub struct Cli {
    /// Plain-text `key = value` file with default flag values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Inspect a single box.
    #[command(subcommand, name = "box")]
    Box(BoxCmd),
    /// Evaluate wirings.
    #[command(subcommand)]
    Wire(WireCmd),
    /// Iterate the two-copy distillation protocol along an edge.
    #[command(subcommand)]
    Distill(DistillCmd),
    /// AND-wiring escape from the noisy PR polytope.
    #[command(subcommand)]
    Escape(EscapeCmd),
    /// Hull growth under AND wirings of increasing size.
    #[command(subcommand)]
    Hull(HullCmd),
    /// Exhaustive wiring searches.
    #[command(subcommand)]
    Search(SearchCmd),
    /// Distillation out of Uffink's quadratic set.
    #[command(subcommand)]
    Uffink(UffinkCmd),
    /// Vector fields of protocols on two-dimensional sections.
    #[command(subcommand)]
    Field(FieldCmd),
    /// Run the invariant suites on random inputs.
    Selftest(SelftestArgs),
}

#[derive(Args, Clone)]
pub struct Output {
    /// Write the primary result to this file.
    #[arg(long, value_name = "FILE")]
    pub out: Option<String>,
}

#[derive(Subcommand)]
pub enum BoxCmd {
    /// Print a box with its correlators and Bell values.
    Show {
        /// pr | mixed | local:MNST | nl:MNS | correlated:E | isotropic:E |
        /// section:E,G | edge:MNSABG:E | @file.json
        #[arg(long = "box", value_name = "SPEC")]
        spec: String,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
pub enum WireCmd {
    /// Apply a wiring to boxes; a single box is copied as often as needed.
    Apply {
        /// identity | distill | and:N | @file.json
        #[arg(long, value_name = "SPEC")]
        wiring: String,
        /// Box specs in wiring order (see `box show`).
        #[arg(long = "box", value_name = "SPEC", required = true)]
        boxes: Vec<String>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
pub enum DistillCmd {
    /// Follow an edge box through k protocol steps.
    Iterate {
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Six bits MNSABG naming the edge; 000010 is PR over P_L^{0101}.
        #[arg(long, default_value = "000010")]
        edge: String,
        /// Certify exit from R_a at this CHSH cut-off.
        #[arg(long = "exit", value_name = "S")]
        exit_s: Option<String>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
pub enum EscapeCmd {
    /// Wire n isotropic boxes with AND and test the tilted CH facet.
    And {
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
pub enum HullCmd {
    /// Grow the hull stage by stage for n = 2..n-max.
    Iterate {
        #[arg(long)]
        eps: String,
        #[arg(long = "n-max", default_value_t = 10)]
        n_max: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
pub enum SearchCmd {
    /// All deterministic two-box wirings on all vertex pairs of R_b^S.
    TwoBox {
        #[arg(long = "S", value_name = "S")]
        s: String,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Stop after this many (vertex pair, facet) units.
        #[arg(long = "max-units")]
        max_units: Option<usize>,
        /// Violations stored with full certificates.
        #[arg(long = "max-violations", default_value_t = 16)]
        max_violations: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
pub enum UffinkCmd {
    /// Label section nodes by the first step leaving Uffink's set (CSV).
    Scan {
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[arg(long, default_value_t = 3)]
        iters: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
pub enum FieldCmd {
    /// Displacements on a grid of a section (CSV).
    Export {
        /// distill: (eps, gamma) section; and: isotropic section read
        /// through I(q) at --eps-ref.
        #[arg(long, default_value = "distill")]
        preset: String,
        #[arg(long, default_value_t = 20)]
        grid: usize,
        #[arg(long = "eps-ref", default_value = "4/5")]
        eps_ref: String,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Random cases per suite.
    #[arg(long, default_value_t = 100)]
    pub cases: usize,
}

fn main() -> ExitCode {
    let argv = match config::expand_args(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
