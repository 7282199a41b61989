//! Argument parsing and the top-level run loop.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::execute;
use crate::config::{parse_config, Command, RunSpec, Setting};
use crate::error::{CliError, CliResult};
use crate::output::write_atomic;

#[derive(Parser, Debug)]
#[command(name = "orbit-pressure", version, about = "Orbit metrics and pressure estimates for symbolic and circle systems")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Orbit distances between two points
    Dist(Flags),
    /// Entropy estimates (the potential is forced to zero)
    Entropy(Flags),
    /// Pressure estimates, with an inf over q when several q are given
    Pressure(Flags),
    /// Local entropy medians over random centers
    #[command(name = "brin-katok")]
    BrinKatok(Flags),
    /// Convergence table over (kind, q, eps, n) with a summary block
    Table(Flags),
    /// Property suites against brute-force oracles
    Verify(Flags),
}

/// Every flag maps onto the config key of the same name.
#[derive(Args, Debug, Default)]
struct Flags {
    /// Plain-text config file; flags override its settings
    #[arg(long)]
    config: Option<PathBuf>,
    /// fullshift[K], golden, sft, doubling or rotation
    #[arg(long)]
    system: Option<String>,
    #[arg(long)]
    k: Option<String>,
    /// Rows of the 0/1 transition matrix, e.g. 11,10
    #[arg(long)]
    transitions: Option<String>,
    #[arg(long)]
    word_length: Option<String>,
    /// Rotation angle, a number or `golden`
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// zero, const:C, first_symbol:A,B.., identity[+C] or cos:A[+C]
    #[arg(long, allow_hyphen_values = true)]
    potential: Option<String>,
    /// bernoulli[:P,..], markov:ROW;ROW.., parry or lebesgue
    #[arg(long)]
    measure: Option<String>,
    /// measure, cover or spanning
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    n: Option<String>,
    #[arg(long, visible_alias = "delta")]
    eps: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    q_max: Option<String>,
    /// Metric families: bowen, mean, maxmean, fk
    #[arg(long, visible_aliases = ["metric", "kind"])]
    kinds: Option<String>,
    /// Sample size
    #[arg(long = "M", visible_aliases = ["m", "sample-size"])]
    m: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// greedy or exact
    #[arg(long)]
    method: Option<String>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    /// Output file, written atomically; stdout when absent
    #[arg(long)]
    output: Option<String>,
    /// Number of Brin-Katok centers
    #[arg(long)]
    centers: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
    #[arg(long)]
    x_equals_y: bool,
    #[arg(long)]
    suite: Option<String>,
    #[arg(long)]
    n_max: Option<String>,
    /// Test hook: relaxes a strict inequality inside the matching oracle
    #[arg(long)]
    inject_fault: bool,
    /// Record wall time per row (otherwise 0, keeping output reproducible)
    #[arg(long)]
    timing: bool,
}

impl Flags {
    fn settings(&self) -> Vec<Setting> {
        let values = [
            ("system", &self.system),
            ("k", &self.k),
            ("transitions", &self.transitions),
            ("word_length", &self.word_length),
            ("alpha", &self.alpha),
            ("potential", &self.potential),
            ("measure", &self.measure),
            ("variant", &self.variant),
            ("n", &self.n),
            ("eps", &self.eps),
            ("q", &self.q),
            ("q_max", &self.q_max),
            ("kinds", &self.kinds),
            ("m", &self.m),
            ("seed", &self.seed),
            ("method", &self.method),
            ("format", &self.format),
            ("output", &self.output),
            ("centers", &self.centers),
            ("x", &self.x),
            ("y", &self.y),
            ("suite", &self.suite),
            ("n_max", &self.n_max),
        ];
        let mut out: Vec<Setting> =
            values.into_iter().filter_map(|(k, v)| v.as_ref().map(|v| Setting::flag(k, v.clone()))).collect();
        for (key, on) in [("x_equals_y", self.x_equals_y), ("inject_fault", self.inject_fault), ("timing", self.timing)] {
            if on {
                out.push(Setting::flag(key, "true"));
            }
        }
        out
    }
}

fn resolve(command: Command, flags: &Flags) -> CliResult<RunSpec> {
    let mut settings = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => Vec::new(),
    };
    settings.extend(flags.settings());
    RunSpec::resolve(command, &settings)
}

fn run_command(command: Command, flags: &Flags, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let spec = resolve(command, flags)?;
    let outcome = execute(&spec)?;
    let bytes = outcome.report.render(spec.format)?;
    match &spec.output {
        Some(path) => {
            write_atomic(path, &bytes)?;
            let _ = writeln!(stderr, "wrote {}", path.display());
        }
        None => stdout.write_all(&bytes)?,
    }
    if outcome.violated.is_empty() {
        Ok(())
    } else {
        Err(CliError::Property(outcome.violated.join("; ")))
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    let (command, flags) = match &cli.command {
        Sub::Dist(f) => (Command::Dist, f),
        Sub::Entropy(f) => (Command::Entropy, f),
        Sub::Pressure(f) => (Command::Pressure, f),
        Sub::BrinKatok(f) => (Command::BrinKatok, f),
        Sub::Table(f) => (Command::Table, f),
        Sub::Verify(f) => (Command::Verify, f),
    };
    match run_command(command, flags, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "orbit-pressure: {e}");
            e.exit_code()
        }
    }
}
