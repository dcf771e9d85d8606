//! The `coopan` command line.
//!
//! Exit status: 0 on success, 1 when the input has problems (unreadable
//! file, syntax errors, diagnostics, a context outside the property space),
//! 2 on usage errors (bad flags, no initial context for `reach`, unknown
//! query name).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::abstraction::DEFAULT_MAX_PROPERTIES;
use crate::analysis::{Analysis, AnalysisError};
use crate::dsl::{parse_spec, validate_spec};
use crate::logicalc::{eval_logicalc, export_logicalc, parse_logicalc, parse_value};
use crate::report::{syntax_diagnostic, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "coopan", version, about = "Static analysis of cooperating constraint solvers")]
pub struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    /// Upper bound on the number of generated context properties.
    #[arg(long, default_value_t = DEFAULT_MAX_PROPERTIES, global = true)]
    pub max_properties: usize,
    /// Threads used to evaluate query candidates.
    #[arg(long, default_value_t = 1, global = true)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a specification.
    Check { spec: PathBuf },
    /// List the context properties.
    Properties { spec: PathBuf },
    /// List the abstract solver relations.
    Solvers { spec: PathBuf },
    /// Compute the feasible set from the initial context.
    Reach {
        spec: PathBuf,
        /// Initial context; overrides the specification's `initial`.
        #[arg(long)]
        initial: Option<String>,
    },
    /// Solve a reverse query.
    Query { spec: PathBuf, name: String },
    /// Write the constraint system in LogiCalc syntax.
    ExportLogicalc {
        spec: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate a LogiCalc file, binding `c0` to the given value.
    EvalLogicalc {
        file: PathBuf,
        #[arg(long)]
        c0: Option<String>,
    },
}

struct Failure {
    code: i32,
    message: String,
    report: Option<Box<Report>>,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure { code: EXIT_INPUT, message: message.to_string(), report: None }
    }

    fn usage(message: impl ToString) -> Self {
        Failure { code: EXIT_USAGE, message: message.to_string(), report: None }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn analyze(cli: &Cli, path: &Path) -> Result<Analysis, Failure> {
    let text = read(path)?;
    Analysis::from_source(&text, cli.max_properties).map_err(|e| match e {
        AnalysisError::Parse(err) => Failure {
            code: EXIT_INPUT,
            message: format!("{}: {err}", path.display()),
            report: Some(Box::new(Report { diagnostics: vec![syntax_diagnostic(&err)], ..Default::default() })),
        },
        AnalysisError::Invalid(diagnostics) => Failure {
            code: EXIT_INPUT,
            message: format!("{}: {} problem(s)", path.display(), diagnostics.len()),
            report: Some(Box::new(Report { diagnostics, ..Default::default() })),
        },
        other => Failure::input(format!("{}: {other}", path.display())),
    })
}

fn render(cli: &Cli, report: &Report) -> String {
    match cli.format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    }
}

fn execute(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Check { spec } => {
            let text = read(spec)?;
            let diagnostics = match parse_spec(&text) {
                Ok(model) => validate_spec(&model),
                Err(err) => vec![syntax_diagnostic(&err)],
            };
            let report = Report { diagnostics, ..Default::default() };
            if report.diagnostics.is_empty() {
                Ok(render(cli, &report))
            } else {
                Err(Failure {
                    code: EXIT_INPUT,
                    message: format!("{}: {} problem(s)", spec.display(), report.diagnostics.len()),
                    report: Some(Box::new(report)),
                })
            }
        }
        Command::Properties { spec } => {
            let analysis = analyze(cli, spec)?;
            Ok(render(cli, &Report::with_properties(&analysis)))
        }
        Command::Solvers { spec } => {
            let analysis = analyze(cli, spec)?;
            let mut report = Report::with_properties(&analysis);
            report.add_solvers(&analysis);
            Ok(render(cli, &report))
        }
        Command::Reach { spec, initial } => {
            let analysis = analyze(cli, spec)?;
            let c0 = match initial {
                Some(text) => analysis.parse_property(text),
                None if analysis.model.initial.is_none() => {
                    return Err(Failure::usage("no initial context: pass --initial or declare one"))
                }
                None => analysis.initial(),
            }
            .map_err(Failure::input)?;
            let mut report = Report::with_properties(&analysis);
            report.set_feasible(c0, analysis.feasible_from(c0).iter());
            Ok(render(cli, &report))
        }
        Command::Query { spec, name } => {
            let analysis = analyze(cli, spec)?;
            let solutions = analysis.solve_query(name, cli.jobs).map_err(|e| match e {
                AnalysisError::UnknownQuery(_) => Failure::usage(e),
                other => Failure::input(other),
            })?;
            let mut report = Report::with_properties(&analysis);
            report.add_query(name, &solutions);
            Ok(render(cli, &report))
        }
        Command::ExportLogicalc { spec, output } => {
            let analysis = analyze(cli, spec)?;
            let text = export_logicalc(&analysis.space, &analysis.solvers, &analysis.theory);
            match output {
                Some(path) => {
                    std::fs::write(path, &text)
                        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
                    Ok(String::new())
                }
                None => Ok(text),
            }
        }
        Command::EvalLogicalc { file, c0 } => {
            let text = read(file)?;
            let model = parse_logicalc(&text).map_err(|e| Failure::input(format!("{}: {e}", file.display())))?;
            let c0 = c0
                .as_deref()
                .map(parse_value)
                .transpose()
                .map_err(|e| Failure::usage(format!("--c0: {e}")))?;
            let bindings =
                eval_logicalc(&model, c0).map_err(|e| Failure::input(format!("{}: {e}", file.display())))?;
            Ok(match cli.format {
                Format::Text => bindings.iter().map(|(name, value)| format!("{name} = {value}\n")).collect(),
                Format::Json => {
                    let map: serde_json::Map<String, serde_json::Value> = bindings
                        .iter()
                        .map(|(name, value)| (name.clone(), serde_json::Value::String(value.to_string())))
                        .collect();
                    serde_json::to_string_pretty(&serde_json::json!({ "bindings": map })).unwrap() + "\n"
                }
            })
        }
    }
}

/// Runs the command line, writing the report to `out` and messages to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(failure) => {
            if let Some(report) = &failure.report {
                let _ = out.write_all(render(&cli, report).as_bytes());
            }
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
