//! Command-line front end. Subcommands implement [`Command`] and are looked up by
//! name in a [`CommandRegistry`].

mod commands;
pub mod report;

use std::collections::BTreeMap;
use std::time::Instant;

use clap::{value_parser, Arg, ArgAction, ArgMatches};
use thiserror::Error;

use crate::covers::{CoverError, ScanConfig};
use crate::dichotomy::DichotomyError;
use crate::eval::{with_threads, EvalConfig, EvalError, Evaluator};
use crate::twisted::TwistedError;

pub use report::{Format, Report, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Budget(_) => EXIT_BUDGET,
        }
    }

    pub fn usage(e: impl ToString) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Budget { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<DichotomyError> for CliError {
    fn from(e: DichotomyError) -> Self {
        match e {
            DichotomyError::Eval(e) => e.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<CoverError> for CliError {
    fn from(e: CoverError) -> Self {
        match e {
            CoverError::Budget { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<TwistedError> for CliError {
    fn from(e: TwistedError) -> Self {
        match e {
            TwistedError::Eval(e) => e.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// Settings shared by every subcommand.
pub struct Context {
    pub budget: u128,
    pub evaluator: Evaluator,
    pub scan: ScanConfig,
}

pub trait Command: Send + Sync {
    fn name(&self) -> &'static str;

    fn about(&self) -> &'static str;

    /// Subcommand-specific arguments.
    fn args(&self) -> Vec<Arg>;

    fn run(&self, args: &ArgMatches, ctx: &Context, report: &mut Report) -> Result<(), CliError>;
}

#[derive(Default)]
pub struct CommandRegistry {
    commands: BTreeMap<&'static str, Box<dyn Command>>,
}

impl CommandRegistry {
    pub fn register(&mut self, c: Box<dyn Command>) {
        self.commands.insert(c.name(), c);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Command> {
        self.commands.get(name).map(|c| c.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.commands.keys().copied().collect()
    }

    pub fn clap(&self) -> clap::Command {
        let mut app = clap::Command::new("galstrat")
            .version(env!("CARGO_PKG_VERSION"))
            .about("Exact point counting for first-order formulas over finite fields")
            .subcommand_required(true)
            .arg_required_else_help(true)
            .args(global_args());
        for c in self.commands.values() {
            app = app.subcommand(clap::Command::new(c.name()).about(c.about()).args(c.args()));
        }
        app
    }
}

pub fn registry() -> CommandRegistry {
    let mut r = CommandRegistry::default();
    commands::register_all(&mut r);
    r
}

fn global_args() -> Vec<Arg> {
    vec![
        Arg::new("budget")
            .long("budget")
            .global(true)
            .value_parser(value_parser!(u128))
            .default_value("1000000000")
            .help("Refuse work whose worst-case evaluation count exceeds N"),
        Arg::new("threads")
            .long("threads")
            .global(true)
            .value_parser(value_parser!(usize))
            .default_value("0")
            .help("Worker threads (0 = one per core); results do not depend on it"),
        Arg::new("format")
            .long("format")
            .global(true)
            .value_parser(["text", "structured"])
            .default_value("text")
            .help("Report format"),
        Arg::new("timing")
            .long("timing")
            .global(true)
            .action(ArgAction::SetTrue)
            .help("Include wall-clock time in the report (not deterministic)"),
    ]
}

/// Outcome of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let reg = registry();
    let matches = match reg.clap().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: text },
            };
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let command = reg.get(name).expect("registered subcommand");
    let budget = *sub.get_one::<u128>("budget").unwrap();
    let threads = *sub.get_one::<usize>("threads").unwrap();
    let format: Format = sub.get_one::<String>("format").unwrap().parse().unwrap();
    let ctx = Context {
        budget,
        evaluator: Evaluator::new(EvalConfig { budget, threads: 0 }),
        scan: ScanConfig { budget, threads: 0, projective: false },
    };
    let mut report = Report::new(name, budget);
    let start = Instant::now();
    let result = with_threads(threads, || command.run(sub, &ctx, &mut report));
    if sub.get_flag("timing") {
        report.timing_ms = Some(start.elapsed().as_millis().to_string());
    }
    match result {
        Ok(()) => Outcome { code: EXIT_OK, stdout: report.emit(format), stderr: String::new() },
        Err(e) => Outcome { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}
