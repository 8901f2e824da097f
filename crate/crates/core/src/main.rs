use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use flatiter::equivalence::{bisimilar, congruence, SatKind};
use flatiter::normalize::{saturate_fuel, strong_saturate_fuel, to_normal_form_fuel, NfMode};
use flatiter::parallel::{eliminate_parallel, parse_net};
use flatiter::proof::{check_proof, parse_certificate, render_certificate, Proof};
use flatiter::prover::{prove_congruent_fuel, ProveOutcome};
use flatiter::rewrite::phi;
use flatiter::semantics::build_lts;
use flatiter::{parse_process, Error, Process, RelKind};

#[derive(Parser)]
#[command(name = "flatiter", version, about = "Basic CCS with flat iteration: semantics, equivalences and equational proofs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum CheckMode {
    Equivalence,
    Congruence,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Aut,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether two terms are related.
    Check {
        left: String,
        right: String,
        #[arg(long, default_value = "strong")]
        rel: RelKind,
        #[arg(long, value_enum, default_value = "congruence")]
        mode: CheckMode,
    },
    /// Derive an equational proof of congruence and write it as a certificate.
    Prove {
        left: String,
        right: String,
        #[arg(long, default_value = "strong")]
        rel: RelKind,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        fuel: Option<usize>,
    },
    /// Check a proof certificate against an axiom system.
    Verify {
        file: PathBuf,
        #[arg(long, default_value = "strong")]
        rel: RelKind,
    },
    /// Print the transition system of a term.
    Lts {
        term: String,
        #[arg(long, value_enum, default_value = "aut")]
        format: Format,
    },
    /// Bring a term into normal form.
    Normalize {
        term: String,
        #[arg(long, default_value = "strong")]
        mode: NfMode,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        fuel: Option<usize>,
    },
    /// Saturate a term for eta, delay or weak bisimulation.
    Saturate {
        term: String,
        #[arg(long, default_value = "weak")]
        rel: RelKind,
        /// Also give every proper derivative a τ-loop (delay and weak only).
        #[arg(long)]
        strong: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        fuel: Option<usize>,
    },
    /// Translate a potential prefix-iteration expression into the prefix-iteration fragment.
    Phi { term: String },
    /// Eliminate parallel composition from a closed network `P | Q | ...`.
    Expand { net: String },
}

#[derive(Serialize)]
struct Verdict<'a> {
    command: &'a str,
    inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    relation: Option<RelKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mode: Option<CheckMode>,
    result: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    artifact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

impl Verdict<'_> {
    fn emit(&self) -> u8 {
        println!("{}", serde_json::to_string(self).expect("verdict serializes"));
        if self.result {
            0
        } else {
            1
        }
    }
}

/// A term given inline or as `@path`.
fn read_term(arg: &str) -> Result<String, Error> {
    match arg.strip_prefix('@') {
        Some(path) => fs::read_to_string(path)
            .map(|s| s.trim().to_string())
            .map_err(|e| Error::Precondition(format!("cannot read `{path}`: {e}"))),
        None => Ok(arg.to_string()),
    }
}

fn term(arg: &str) -> Result<Process, Error> {
    Ok(parse_process(&read_term(arg)?)?)
}

fn write_proof(out: &Option<PathBuf>, proof: &Proof) -> Result<Option<String>, Error> {
    let Some(path) = out else { return Ok(None) };
    fs::write(path, render_certificate(proof))
        .map_err(|e| Error::Precondition(format!("cannot write `{}`: {e}", path.display())))?;
    Ok(Some(path.display().to_string()))
}

fn sat_kind(k: RelKind) -> Result<SatKind, Error> {
    SatKind::try_from(k).map_err(|_| Error::Precondition(format!("saturation is defined for eta, delay and weak, not {k}")))
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Check { left, right, rel, mode } => {
            let (p, q) = (term(&left)?, term(&right)?);
            let (result, detail) = match mode {
                CheckMode::Equivalence => (bisimilar(&p, &q, rel), None),
                CheckMode::Congruence => match congruence(&p, &q, rel) {
                    Ok(()) => (true, None),
                    Err(m) => (false, Some(m.to_string())),
                },
            };
            let inputs = vec![p.to_string(), q.to_string()];
            Ok(Verdict { command: "check", inputs, relation: Some(rel), mode: Some(mode), result, artifact: None, detail }.emit())
        }
        Command::Prove { left, right, rel, out, fuel } => {
            let (p, q) = (term(&left)?, term(&right)?);
            let inputs = vec![p.to_string(), q.to_string()];
            let verdict = |result, artifact, detail| Verdict { command: "prove", inputs, relation: Some(rel), mode: None, result, artifact, detail };
            match prove_congruent_fuel(&p, &q, rel, fuel)? {
                ProveOutcome::Proved(proof) => {
                    let artifact = write_proof(&out, &proof)?;
                    let detail = Some(format!("{} steps", proof.len()));
                    Ok(verdict(true, artifact, detail).emit())
                }
                ProveOutcome::NotCongruent(m) => Ok(verdict(false, None, Some(m.to_string())).emit()),
            }
        }
        Command::Verify { file, rel } => {
            let text = fs::read_to_string(&file)
                .map_err(|e| Error::Precondition(format!("cannot read `{}`: {e}", file.display())))?;
            let proof = parse_certificate(&text).map_err(|e| Error::Precondition(e.to_string()))?;
            let checked = check_proof(&proof, rel);
            let inputs = vec![file.display().to_string()];
            let detail = Some(match &checked {
                Ok(()) => proof.claimed.to_string(),
                Err(e) => e.to_string(),
            });
            Ok(Verdict { command: "verify", inputs, relation: Some(rel), mode: None, result: checked.is_ok(), artifact: None, detail }.emit())
        }
        Command::Lts { term: t, format: Format::Aut } => {
            print!("{}", build_lts(&term(&t)?).to_aut());
            Ok(0)
        }
        Command::Normalize { term: t, mode, out, fuel } => {
            let (n, proof) = to_normal_form_fuel(&term(&t)?, mode, fuel)?;
            write_proof(&out, &proof)?;
            println!("{n}");
            Ok(0)
        }
        Command::Saturate { term: t, rel, strong, out, fuel } => {
            let k = sat_kind(rel)?;
            let p = term(&t)?;
            let (s, proof) = if strong { strong_saturate_fuel(&p, k, fuel)? } else { saturate_fuel(&p, k, fuel)? };
            write_proof(&out, &proof)?;
            println!("{s}");
            Ok(0)
        }
        Command::Phi { term: t } => match phi(&term(&t)?) {
            Ok(q) => {
                println!("{q}");
                Ok(0)
            }
            Err(Error::Precondition(m)) => {
                eprintln!("flatiter: {m}");
                Ok(1)
            }
            Err(e) => Err(e),
        },
        Command::Expand { net } => {
            let n = parse_net(&read_term(&net)?)?;
            println!("{}", eliminate_parallel(&n)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("flatiter: {e}");
            ExitCode::from(2)
        }
    }
}
