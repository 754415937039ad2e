//! Command-line front end: `answer`, `rewrite`, `clausify`, `classify` and
//! `saturate`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::clausify::clausify;
use crate::classes::membership;
use crate::qans::{answer, AnswerError, Options, Verdict, DEFAULT_MAX_STEPS};
use crate::qrew::{rewrite_problem, PipelineError, RewriteError};
use crate::qsep::{analyse, is_icq};
use crate::syntax::{fragment, negate_query, parse_problem, Problem};
use crate::terms::Printer;

pub const EXIT_NO: i32 = 0;
pub const EXIT_YES: i32 = 10;
/// Rewriting found the query entailed by the rules alone.
pub const EXIT_ENTAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "guarded-saturate", version, about = "Query answering and rewriting for guarded fragments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    /// Bound on Deduce events.
    #[arg(long = "max-steps", default_value_t = DEFAULT_MAX_STEPS)]
    max_steps: u64,
    /// Seed for tie-breaking between equally heavy clauses.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl RunArgs {
    fn options(&self) -> Options {
        Options {
            max_steps: self.max_steps,
            seed: self.seed,
            audit: false,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Decide whether the rules and facts entail the queries.
    Answer {
        file: PathBuf,
        /// Write the derivation trace to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Rewrite rules and queries into a formula to be checked on data.
    Rewrite {
        file: PathBuf,
        /// Output file; standard output by default.
        #[arg(short = 'o')]
        output: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print the clausal form of the problem.
    Clausify { file: PathBuf },
    /// Print fragment membership of rules and the analysis of queries.
    Classify { file: PathBuf },
    /// Saturate and stream the trace to standard output.
    Saturate {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
}

fn load(path: &PathBuf) -> Result<Problem, String> {
    let src = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let p = parse_problem(&src).map_err(|e| format!("{}:{e}", path.display()))?;
    Ok(p)
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

fn answer_error(e: AnswerError, err: &mut dyn Write) -> i32 {
    let _ = writeln!(err, "error: {e}");
    match e {
        AnswerError::Budget(_) => EXIT_BUDGET,
        AnswerError::Clausify(_) => EXIT_INPUT,
    }
}

/// Runs the command line and returns the process exit code.
pub fn run(args: impl IntoIterator<Item = OsString>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{e}");
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_INPUT,
            };
        }
    };
    match dispatch(cli.cmd, out, err) {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_INPUT
        }
    }
}

fn dispatch(cmd: Cmd, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, String> {
    let io = |e: std::io::Error| e.to_string();
    match cmd {
        Cmd::Answer { file, trace, run } => {
            let p = load(&file)?;
            let a = match answer(&p, run.options()) {
                Ok(a) => a,
                Err(e) => return Ok(answer_error(e, err)),
            };
            if let Some(t) = trace {
                write_file(&t, &a.saturation.trace_text())?;
            }
            Ok(match a.verdict {
                Verdict::Yes => {
                    writeln!(out, "yes").map_err(io)?;
                    EXIT_YES
                }
                Verdict::No => {
                    writeln!(out, "no").map_err(io)?;
                    EXIT_NO
                }
            })
        }
        Cmd::Rewrite { file, output, run } => {
            let p = load(&file)?;
            match rewrite_problem(&p, run.options()) {
                Ok(r) => {
                    let text = format!("{}\n", r.text);
                    match output {
                        Some(o) => write_file(&o, &text)?,
                        None => out.write_all(text.as_bytes()).map_err(io)?,
                    }
                    writeln!(err, "sha256: {}", r.hash).map_err(io)?;
                    Ok(EXIT_NO)
                }
                Err(PipelineError::Rewrite(RewriteError::Bottom)) => {
                    writeln!(err, "the rules alone entail the query").map_err(io)?;
                    Ok(EXIT_ENTAILED)
                }
                Err(PipelineError::Answer(e)) => Ok(answer_error(e, err)),
                Err(PipelineError::Rewrite(e)) => Err(e.to_string()),
            }
        }
        Cmd::Clausify { file } => {
            let mut p = load(&file)?;
            let set = clausify(&mut p).map_err(|e| e.to_string())?;
            let pr = Printer::new(&p.table);
            for c in set.clauses() {
                writeln!(out, "clause: {}.", pr.clause(c)).map_err(io)?;
            }
            Ok(EXIT_NO)
        }
        Cmd::Classify { file } => {
            let p = load(&file)?;
            let pr = p.printer();
            for (i, f) in p.rules.iter().enumerate() {
                let m = fragment(f);
                writeln!(out, "rule {i}: gf={} lgf={} cgf={}", m.gf, m.lgf, m.cgf).map_err(io)?;
            }
            for (i, q) in p.queries.iter().enumerate() {
                let Some(c) = negate_query(q) else {
                    writeln!(out, "query {i}: not conjunctive").map_err(io)?;
                    continue;
                };
                let a = analyse(&c);
                let m = membership(&c);
                let vars = |s: &std::collections::BTreeSet<u32>| {
                    s.iter().map(|v| pr.var(*v)).collect::<Vec<_>>().join(",")
                };
                writeln!(
                    out,
                    "query {i}: chained {{{}}} isolated {{{}}} acyclic={} decomposable={} lg={} icq={}",
                    vars(&a.chained),
                    vars(&a.isolated),
                    a.acyclic,
                    a.decomposable,
                    m.lg,
                    is_icq(&c)
                )
                .map_err(io)?;
            }
            for (i, c) in p.clauses.iter().enumerate() {
                let m = membership(c);
                writeln!(
                    out,
                    "clause {i}: query={} lg={} guarded={} horn_guarded={}",
                    m.query, m.lg, m.guarded, m.horn_guarded
                )
                .map_err(io)?;
            }
            Ok(EXIT_NO)
        }
        Cmd::Saturate { file, run } => {
            let p = load(&file)?;
            let a = match answer(&p, run.options()) {
                Ok(a) => a,
                Err(e) => return Ok(answer_error(e, err)),
            };
            out.write_all(a.saturation.trace_text().as_bytes()).map_err(io)?;
            let (word, code) = match a.verdict {
                Verdict::Yes => ("yes", EXIT_YES),
                Verdict::No => ("no", EXIT_NO),
            };
            writeln!(out, "% {word} after {} steps", a.saturation.steps).map_err(io)?;
            Ok(code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv: Vec<OsString> = std::iter::once("guarded-saturate")
            .chain(args.iter().copied())
            .map(OsString::from)
            .collect();
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn file(src: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(src.as_bytes()).unwrap();
        f
    }

    #[test]
    fn unknown_flag_is_an_input_error() {
        assert_eq!(call(&["answer", "--bogus", "x.p"]).0, EXIT_INPUT);
    }

    #[test]
    fn answer_exit_codes() {
        let yes = file("fact: a(c). query: ? [X] : a(X).");
        let no = file("query: ? [X] : a(X).");
        assert_eq!(call(&["answer", yes.path().to_str().unwrap()]).0, EXIT_YES);
        assert_eq!(call(&["answer", no.path().to_str().unwrap()]).0, EXIT_NO);
        let bad = file("rule: ! [X,Y,Z] : ((r(X,Y) & r(Y,Z)) => r(X,Z)).");
        assert_eq!(call(&["answer", bad.path().to_str().unwrap()]).0, EXIT_INPUT);
        assert_eq!(call(&["answer", "/nonexistent/file.p"]).0, EXIT_INPUT);
    }

    #[test]
    fn rewrite_without_data() {
        let f = file("rule: ! [X] : (a(X) => b(X)). query: ? [X] : b(X).");
        let (code, out, err) = call(&["rewrite", f.path().to_str().unwrap()]);
        assert_eq!(code, EXIT_NO, "{err}");
        assert!(out.starts_with("formula: "));
        let g = file("rule: a(c). query: ? [X] : a(X).");
        assert_eq!(call(&["rewrite", g.path().to_str().unwrap()]).0, EXIT_ENTAILED);
    }
}
