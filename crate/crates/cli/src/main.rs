//! `obpers`: command-line access to the library.
//!
//! Exit codes: 0 success (and `yes` for `ob-iso`), 1 `no` for `ob-iso`,
//! 2 unreadable input, 3 input violating a module invariant, 4 bad arguments.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use obpers::decomp::decompose;
use obpers::diagrams::{diagram, measure, ob_isomorphic, Diagram, Rectangle};
use obpers::distances::{bottleneck, optimal_interleaving, verify_interleaving, Matching};
use obpers::observable::{bar, limiting_ranks, radical, underbar};
use obpers::persmod::{random_module, GridModule};
use obpers::{ExtReal, FieldSpec, Real};
use obpers_cli::{modfile, CliError};

#[derive(Parser)]
#[command(name = "obpers", version, about = "Persistence modules in the observable category")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a module file is well formed
    Validate { file: PathBuf },
    /// Print the decorated barcode
    Decompose { file: PathBuf },
    /// Print the undecorated diagram as `p q multiplicity` lines
    Diagram { file: PathBuf },
    /// Print the radical as a module file
    Radical { file: PathBuf },
    /// Print the left-limit module as a module file
    Bar { file: PathBuf },
    /// Print the right-limit module as a module file
    Underbar { file: PathBuf },
    /// Persistence measure of the rectangle [a, b] x [c, d]
    Measure {
        file: PathBuf,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
        #[arg(allow_hyphen_values = true)]
        c: String,
        #[arg(allow_hyphen_values = true)]
        d: String,
    },
    /// Limiting ranks and the plain rank between s < t
    Ranks {
        file: PathBuf,
        #[arg(allow_hyphen_values = true)]
        s: String,
        #[arg(allow_hyphen_values = true)]
        t: String,
    },
    /// Decide observable isomorphism (exit 0 for yes, 1 for no)
    ObIso { f: PathBuf, g: PathBuf },
    /// Bottleneck distance between the diagrams, with an optimal matching
    Bottleneck { f: PathBuf, g: PathBuf },
    /// Interleaving distance, with a verified interleaving attaining it
    Interleave { f: PathBuf, g: PathBuf },
    /// Print a random module file
    Random {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        criticals: usize,
        #[arg(long)]
        maxdim: usize,
        #[arg(long, default_value_t = 2)]
        field: u64,
    },
}

fn load(path: &Path) -> Result<GridModule, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    modfile::parse_module(&text).map_err(|e| match e {
        CliError::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
        CliError::Invariant(m) => CliError::Invariant(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn load_pair(f: &Path, g: &Path) -> Result<(GridModule, GridModule), CliError> {
    let (v, w) = (load(f)?, load(g)?);
    if v.field() != w.field() {
        return Err(CliError::Invariant(format!(
            "both modules must use the same field, got GF({}) and GF({})",
            v.field().characteristic(),
            w.field().characteristic()
        )));
    }
    Ok((v, w))
}

fn arg_real(name: &str, s: &str) -> Result<Real, CliError> {
    s.parse().map_err(|_| CliError::Args(format!("{name}: cannot parse {s:?} as a number")))
}

fn arg_ext(name: &str, s: &str) -> Result<ExtReal, CliError> {
    s.parse().map_err(|_| CliError::Args(format!("{name}: cannot parse {s:?} as a number or ±inf")))
}

fn matching_text(d1: &Diagram, d2: &Diagram, m: &Matching) -> String {
    let (x, y) = (d1.expanded(), d2.expanded());
    let mut out = String::new();
    for &(i, j) in &m.pairs {
        writeln!(out, "match {} {} -> {} {}", x[i].p, x[i].q, y[j].p, y[j].q).unwrap();
    }
    for &i in &m.unmatched1 {
        writeln!(out, "unmatched first {} {}", x[i].p, x[i].q).unwrap();
    }
    for &j in &m.unmatched2 {
        writeln!(out, "unmatched second {} {}", y[j].p, y[j].q).unwrap();
    }
    out
}

/// Runs one command, returning its output and exit code.
fn run(cmd: Command) -> Result<(String, u8), CliError> {
    let out = match cmd {
        Command::Validate { file } => {
            let v = load(&file)?;
            format!(
                "valid: GF({}), {} critical values, {} pieces\n",
                v.field().characteristic(),
                v.criticals().len(),
                v.n_pieces()
            )
        }
        Command::Decompose { file } => decompose(&load(&file)?).barcode.to_string(),
        Command::Diagram { file } => diagram(&load(&file)?).to_string(),
        Command::Radical { file } => modfile::write_module(&radical(&load(&file)?)),
        Command::Bar { file } => modfile::write_module(&bar(&load(&file)?)),
        Command::Underbar { file } => modfile::write_module(&underbar(&load(&file)?)),
        Command::Measure { file, a, b, c, d } => {
            let v = load(&file)?;
            let rect = Rectangle::new(
                arg_ext("a", &a)?,
                arg_real("b", &b)?,
                arg_real("c", &c)?,
                arg_ext("d", &d)?,
            )
            .map_err(|e| CliError::Args(e.to_string()))?;
            let mu = measure(&v, &rect).map_err(|e| CliError::Args(e.to_string()))?;
            format!("{mu}\n")
        }
        Command::Ranks { file, s, t } => {
            let v = load(&file)?;
            let lr = limiting_ranks(&v, arg_real("s", &s)?, arg_real("t", &t)?).map_err(|e| CliError::Args(e.to_string()))?;
            format!(
                "rk[s,t] {}\nrk[s,t) {}\nrk(s,t] {}\nrk(s,t) {}\nrk(s->t) {}\n",
                lr.closed_closed, lr.closed_open, lr.open_closed, lr.open_open, lr.strict
            )
        }
        Command::ObIso { f, g } => {
            let (v, w) = load_pair(&f, &g)?;
            let yes = ob_isomorphic(&v, &w).map_err(|e| CliError::Invariant(e.to_string()))?;
            return Ok((if yes { "yes\n" } else { "no\n" }.to_string(), if yes { 0 } else { 1 }));
        }
        Command::Bottleneck { f, g } => {
            let (v, w) = load_pair(&f, &g)?;
            let (d1, d2) = (diagram(&v), diagram(&w));
            let (value, m) = bottleneck(&d1, &d2);
            format!("{value}\n{}", matching_text(&d1, &d2, &m))
        }
        Command::Interleave { f, g } => {
            let (v, w) = load_pair(&f, &g)?;
            let (value, il) = optimal_interleaving(&v, &w).map_err(|e| CliError::Invariant(e.to_string()))?;
            let (d1, d2) = (diagram(&v), diagram(&w));
            let (_, m) = bottleneck(&d1, &d2);
            let mut out = format!("{value}\n{}", matching_text(&d1, &d2, &m));
            match il {
                Some(il) => {
                    let ok = verify_interleaving(&bar(&v), &bar(&w), &il).map_err(|e| CliError::Invariant(e.to_string()))?;
                    let status = if ok { "verified" } else { "FAILED verification" };
                    writeln!(out, "interleaving at {} between left limits: {status}", il.epsilon).unwrap();
                }
                None => out.push_str("no finite interleaving\n"),
            }
            out
        }
        Command::Random {
            seed,
            criticals,
            maxdim,
            field,
        } => {
            let field = FieldSpec::new(field).map_err(|e| CliError::Args(format!("--field: {e}")))?;
            modfile::write_module(&random_module(seed, field, criticals, maxdim))
        }
    };
    Ok((out, 0))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 4 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("obpers: {e}");
            ExitCode::from(e.code())
        }
    }
}
