//! Command-line front end: `verify`, `enforce`, `export` and `bound`.
//!
//! Exit codes are 0 when the model is opaque or enforcement succeeds, 1 when
//! it is not opaque or enforcement is impossible, and 2 for usage or model
//! errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use sbo_core::automaton::natural_cmp;
use sbo_core::composition::{cc_dss, cc_full_observer, cc_hat};
use sbo_core::export::export_graph;
use sbo_core::model::{parse_model, serialize_model};
use sbo_core::observer::subset_construction;
use sbo_core::{effective_k_bound, enforce, verify, EnforcementOutcome, NamedTransition, Nfa, Notion};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "sbo",
    version,
    about = "Verify and enforce strong state-based opacity of partially observed automata"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide whether the model satisfies an opacity notion.
    Verify {
        #[arg(long, value_enum)]
        notion: NotionArg,
        /// Step bound, required for k-sso.
        #[arg(long)]
        k: Option<u64>,
        model: PathBuf,
    },
    /// Compute controllable transitions whose removal makes the model opaque.
    Enforce {
        #[arg(long, value_enum)]
        notion: NotionArg,
        #[arg(long)]
        k: Option<u64>,
        model: PathBuf,
        /// Write the resulting subsystem as a model file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the disabled transitions, one per line.
        #[arg(long)]
        emit_ec: Option<PathBuf>,
    },
    /// Write a graph description of an intermediate structure.
    Export {
        #[arg(long, value_enum)]
        structure: Structure,
        model: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the step bound beyond which K-step opacity no longer depends on K.
    Bound { model: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NotionArg {
    KSso,
    Cso,
    Scso,
    Siso,
    InfSso,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Structure {
    Observer,
    CcHat,
    CcObs,
    CcDss,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn load(path: &Path) -> Result<Nfa, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    parse_model(&bytes).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn notion(arg: NotionArg, k: Option<u64>) -> Result<Notion, Failure> {
    match (arg, k) {
        (NotionArg::KSso, Some(k)) => Ok(Notion::KSso(k)),
        (NotionArg::KSso, None) => Err(Failure("--k is required with --notion k-sso".into())),
        (_, Some(_)) => Err(Failure("--k is only accepted with --notion k-sso".into())),
        (NotionArg::Cso, None) => Ok(Notion::Cso),
        (NotionArg::Scso, None) => Ok(Notion::Scso),
        (NotionArg::Siso, None) => Ok(Notion::Siso),
        (NotionArg::InfSso, None) => Ok(Notion::InfSso),
    }
}

fn note_capped_k(nfa: &Nfa, notion: Notion, err: &mut dyn Write) {
    if let Notion::KSso(k) = notion {
        let bound = effective_k_bound(nfa);
        if k > bound {
            let _ = writeln!(err, "note: K={k} exceeds the effective bound {bound}; using K={bound}");
        }
    }
}

fn sorted(ec: &std::collections::BTreeSet<NamedTransition>) -> Vec<&NamedTransition> {
    let mut v: Vec<&NamedTransition> = ec.iter().collect();
    v.sort_by(|a, b| {
        natural_cmp(&a.from, &b.from)
            .then_with(|| a.event.cmp(&b.event))
            .then_with(|| natural_cmp(&a.to, &b.to))
    });
    v
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cli.command {
        Command::Verify { notion: arg, k, model } => {
            let notion = notion(arg, k)?;
            let nfa = load(&model)?;
            note_capped_k(&nfa, notion, err);
            let verdict = verify(&nfa, notion);
            match verdict.witness {
                None => {
                    writeln!(out, "OPAQUE")?;
                    Ok(EXIT_OK)
                }
                Some(w) => {
                    writeln!(out, "NOT OPAQUE")?;
                    writeln!(out, "witness: {w}")?;
                    writeln!(out, "run: {}", w.left)?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Enforce {
            notion: arg,
            k,
            model,
            out: subsystem_path,
            emit_ec,
        } => {
            let notion = notion(arg, k)?;
            let nfa = load(&model)?;
            note_capped_k(&nfa, notion, err);
            match enforce(&nfa, notion) {
                EnforcementOutcome::Enforced { disabled, subsystem } => {
                    let lines: String = sorted(&disabled).iter().map(|t| format!("{t}\n")).collect();
                    writeln!(out, "ENFORCED")?;
                    write!(out, "{lines}")?;
                    if let Some(path) = subsystem_path {
                        write_file(&path, serialize_model(&subsystem).as_bytes())?;
                    }
                    if let Some(path) = emit_ec {
                        write_file(&path, lines.as_bytes())?;
                    }
                    Ok(EXIT_OK)
                }
                EnforcementOutcome::Impossible { witness } => {
                    writeln!(out, "IMPOSSIBLE")?;
                    writeln!(out, "witness: {witness}")?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Export {
            structure,
            model,
            out: path,
        } => {
            let nfa = load(&model)?;
            let mut buf = Vec::new();
            match structure {
                Structure::Observer => export_graph(&subset_construction(&nfa)?, &mut buf)?,
                Structure::CcHat => export_graph(&cc_hat(&nfa), &mut buf)?,
                Structure::CcObs => export_graph(&cc_full_observer(&nfa), &mut buf)?,
                Structure::CcDss => export_graph(&cc_dss(&nfa), &mut buf)?,
            }
            write_file(&path, &buf)?;
            Ok(EXIT_OK)
        }
        Command::Bound { model } => {
            writeln!(out, "{}", effective_k_bound(&load(&model)?))?;
            Ok(EXIT_OK)
        }
    }
}

/// Runs the command line `args` (including the program name), writing
/// results to `out` and diagnostics to `err`, and returns the exit code.
pub fn run_cli_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match execute(cli, out, err) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_cli_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
