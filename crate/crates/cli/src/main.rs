//! `twistlab`: batch front end. Exit status 0 when every check passes,
//! 1 when a mathematical check fails, 2 on usage errors.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{RunConfig, SEED_ENV};
use twistlab_core::Error;

#[derive(Parser, Debug)]
#[command(name = "twistlab", version, about = "Squared Dehn twist computations")]
struct Cli {
    /// `key = value` file overriding the defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// json, csv or text.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct RankArg {
    #[arg(long)]
    k: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exceptional classes of the k-fold blowup.
    Exceptional(RankArg),
    /// (-2)-classes orthogonal to K.
    Roots(RankArg),
    /// Order of the group generated by simple reflections.
    Weyl {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Quantum homology of del Pezzo surfaces.
    #[command(subcommand)]
    Qh(QhCommand),
    /// Hurwitz moves on a batch file of tuples, one per line.
    #[command(subcommand)]
    Hurwitz(HurwitzCommand),
    /// Cyclic chain of roots with adjacent pairings +-1.
    Pentagon {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 5)]
        n: usize,
    },
    /// Numerical checks of the local model on T*S^2.
    #[command(subcommand)]
    Local(LocalCommand),
    /// Complete-intersection surfaces.
    #[command(subcommand)]
    Ci(CiCommand),
}

#[derive(Subcommand, Debug)]
enum QhCommand {
    /// Degree-one product of two classes.
    Star1 {
        #[arg(long)]
        k: usize,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        /// Allow k outside 5..=8.
        #[arg(long)]
        raw: bool,
    },
    /// The constant c with x *1 y = c (x.y) K on K-perp.
    Proportionality {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        raw: bool,
    },
    /// Frobenius obstruction for the square of the twist along a root.
    Obstruct {
        #[arg(long)]
        k: usize,
        #[arg(long, allow_hyphen_values = true)]
        l: String,
        /// Class with w.l = 1; found by the extended gcd when omitted.
        #[arg(long, allow_hyphen_values = true)]
        w: Option<String>,
        /// `formal` or an integer.
        #[arg(long, default_value = "formal", allow_hyphen_values = true)]
        alpha2: String,
    },
    /// Obstruction with the classical product, for minimal surfaces.
    GeneralType {
        #[arg(long)]
        b2: usize,
    },
}

#[derive(Args, Debug)]
struct BatchArgs {
    /// reflect or transvect.
    #[arg(long)]
    mode: String,
    #[arg(long)]
    file: PathBuf,
}

#[derive(Subcommand, Debug)]
enum HurwitzCommand {
    /// One elementary move on every tuple.
    Move {
        #[command(flatten)]
        batch: BatchArgs,
        /// 0-based position of the left cycle.
        #[arg(long)]
        index: usize,
        /// left or right.
        #[arg(long, default_value = "right")]
        dir: String,
    },
    /// Size of the orbit under all elementary moves.
    Orbit {
        #[command(flatten)]
        batch: BatchArgs,
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Random move sequences must preserve the total monodromy.
    Verify {
        #[command(flatten)]
        batch: BatchArgs,
        #[arg(long, default_value_t = 50)]
        moves: usize,
    },
}

#[derive(Subcommand, Debug)]
enum LocalCommand {
    Verify {
        /// twist, flow or fragility.
        #[arg(long)]
        check: String,
        #[arg(long, default_value_t = 0.1)]
        s: f64,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Plateau of r'; defaults to 0 for twist and lambda/5 for fragility.
        #[arg(long)]
        plateau: Option<f64>,
    },
}

#[derive(Subcommand, Debug)]
enum CiCommand {
    Classify {
        /// Comma-separated degrees.
        #[arg(long)]
        degrees: String,
    },
    Sweep {
        #[arg(long, default_value_t = 200)]
        max_product: u64,
    },
}

/// 2 for malformed input, 1 for failed mathematics.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DimensionMismatch { .. }
        | Error::UnsupportedRank { .. }
        | Error::NotARoot { .. }
        | Error::NotPrimitive { .. }
        | Error::IndexOutOfRange { .. }
        | Error::InvalidProfile(_)
        | Error::InvalidDegrees(_)
        | Error::Parse(_)
        | Error::Config(_) => 2,
        Error::NotProportional { .. }
        | Error::UnknownProduct(_)
        | Error::ReducibleAction { .. }
        | Error::ZeroSection { .. }
        | Error::IntegrationDiverged(_)
        | Error::ChartSingularity { .. }
        | Error::SampleOnSingularLocus(_)
        | Error::NotGeneralType(_)
        | Error::NotFound(_)
        | Error::Overflow(_) => 1,
    }
}

fn build_config(cli: &Cli) -> twistlab_core::Result<RunConfig> {
    let env = std::env::var(SEED_ENV).ok();
    let mut cfg = RunConfig::default().with_env(env.as_deref())?;
    if let Some(path) = &cli.config {
        cfg = cfg.with_file(path)?;
    }
    if let Some(f) = &cli.format {
        cfg.format = f.parse()?;
    }
    if let Some(o) = &cli.output {
        cfg.output = Some(o.clone());
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match commands::run(&cli.command, &cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let text = match output::render(&report, cfg.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = output::emit(&text, cfg.output.as_deref()) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(if report.pass { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn hyphenated_vectors_parse() {
        let cli = Cli::try_parse_from(["twistlab", "qh", "star1", "--k", "5", "--x", "-1,0,0,0,0,0", "--y", "0,1,-1,0,0,0"]).unwrap();
        assert!(matches!(cli.command, Command::Qh(QhCommand::Star1 { .. })));
    }

    #[test]
    fn usage_errors_map_to_two() {
        assert_eq!(exit_code(&Error::UnsupportedRank { k: 9, allowed: "1..=8" }), 2);
        assert_eq!(exit_code(&Error::NotFound("x".into())), 1);
    }
}
