use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use extcat::corpus::{corpus, sample, CorpusSpec};
use extcat::decide::Method;
use extcat::format::{object_line, SpecFile};
use extcat::report::{self, Report};
use extcat::{acceptance, Caps, Error};

#[derive(Parser)]
#[command(name = "extcat", version, about = "Extensions of finite abelian groups with uniserial end terms")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Parziale,
    Completo,
    CompletoPrime,
    Oracle,
    /// Every method that applies to the two lists.
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a file and summarize its objects.
    Check { file: PathBuf },
    /// The four class comparisons between two objects.
    Invariants { file: PathBuf, x: String, y: String },
    /// The endomorphism ring of an object.
    Endoring { file: PathBuf, object: String },
    /// Whether the sums of two lists are isomorphic.
    Decide {
        file: PathBuf,
        left: String,
        right: String,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
    },
    /// The out-neighbourhood condition and the pairing for a digraph.
    Digraph { file: PathBuf, name: String },
    /// Print every in-scope object up to a bound as an object file.
    Corpus {
        #[arg(long, default_value_t = 36)]
        max_order: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [2u64, 3])]
        primes: Vec<u64>,
        /// Keep only this many objects, chosen with `--seed`.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also include objects with a zero end term.
        #[arg(long)]
        degenerate: bool,
    },
    /// Run the acceptance suite.
    Selftest,
    /// Re-check a saved JSON report against its file.
    Revalidate { file: PathBuf, report: PathBuf },
}

/// Exit status for an error.
fn code(e: &Error) -> u8 {
    match e {
        Error::CapExceeded { .. } => 3,
        Error::TheoremViolation(_) | Error::NonTransitive { .. } => 4,
        _ => 2,
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn load(path: &Path, caps: &Caps) -> Result<SpecFile, Error> {
    SpecFile::parse(&read(path)?, caps)
}

fn methods(arg: MethodArg, file: &SpecFile, left: &str, right: &str) -> Result<Vec<Method>, Error> {
    Ok(match arg {
        MethodArg::Parziale => vec![Method::Parziale],
        MethodArg::Completo => vec![Method::Completo],
        MethodArg::CompletoPrime => vec![Method::CompletoPrime],
        MethodArg::Oracle => vec![Method::BruteForce],
        MethodArg::All => report::applicable_methods(&file.list(left)?, &file.list(right)?),
    })
}

/// Runs a command; returns the report and the exit status it calls for.
fn execute(command: Command, caps: &Caps) -> Result<(Option<Report>, String, u8), Error> {
    let mut status = 0;
    let report = match command {
        Command::Check { file } => report::check(&load(&file, caps)?),
        Command::Invariants { file, x, y } => report::invariants(&load(&file, caps)?, &x, &y, caps)?,
        Command::Endoring { file, object } => report::endoring(&load(&file, caps)?, &object, caps)?,
        Command::Decide {
            file,
            left,
            right,
            method,
        } => {
            let f = load(&file, caps)?;
            let r = report::decide(&f, &left, &right, &methods(method, &f, &left, &right)?, caps)?;
            if let Report::Decide(d) = &r {
                if d.agree == Some(false) {
                    status = 4;
                } else if d.results.iter().any(|x| !x.verdict) {
                    status = 1;
                }
            }
            r
        }
        Command::Digraph { file, name } => report::digraph(&load(&file, caps)?, &name, caps)?,
        Command::Corpus {
            max_order,
            primes,
            sample: k,
            seed,
            degenerate,
        } => {
            let mut spec = CorpusSpec::new(max_order, &primes);
            spec.degenerate = degenerate;
            let mut entries = corpus(&spec, caps)?;
            if let Some(k) = k {
                entries = sample(&entries, k, seed);
            }
            let mut text = String::new();
            for e in &entries {
                let gens: Vec<_> = e.generator.iter().cloned().collect();
                text.push_str(&object_line(&e.name, e.object.group(), &gens));
                text.push('\n');
            }
            return Ok((None, text, 0));
        }
        Command::Selftest => {
            let criteria = acceptance::all(caps);
            if criteria.iter().any(|c| !c.passed) {
                status = 4;
            }
            Report::Selftest { criteria }
        }
        Command::Revalidate { file, report } => {
            let f = load(&file, caps)?;
            let r = Report::from_json(&read(&report)?)?;
            let problems = report::revalidate(&f, &r, caps)?;
            let text = if problems.is_empty() {
                "ok: report re-validates\n".to_string()
            } else {
                problems.iter().map(|p| format!("problem: {p}\n")).collect()
            };
            return Ok((None, text, if problems.is_empty() { 0 } else { 2 }));
        }
    };
    Ok((Some(report), String::new(), status))
}

/// Writes to stdout; a closed pipe is not an error worth reporting.
fn emit(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let caps = match Caps::from_env() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(code(&e));
        }
    };
    let start = Instant::now();
    match execute(cli.command, &caps) {
        Ok((Some(r), _, status)) => {
            match cli.format {
                Format::Json => emit(&format!("{}\n", r.to_json())),
                Format::Text => emit(&format!("{}time: {:.3} s\n", r.render_text(), start.elapsed().as_secs_f64())),
            }
            ExitCode::from(status)
        }
        Ok((None, text, status)) => {
            emit(&text);
            ExitCode::from(status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(code(&e))
        }
    }
}
