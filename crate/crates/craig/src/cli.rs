//! The `craig` command.
//!
//! Exit codes: 0 on success, 1 when a derivation or certificate fails its
//! checks, 2 on usage, IO or parse errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use craig_core::calculus::{check_nodes, Derivation};
use craig_core::interpolation::{simplify_bool, Conjunct};
use craig_core::{interpolate_strong, verify, InterpolationResult, SplitSequent, VerifyReport};

use crate::problem::{is_labeled, parse_problem, parse_result, ProblemError};
use crate::syntax::{decode, parse_derivation, print_derivation, print_formula};

pub const SUCCESS: i32 = 0;
pub const CONTRACT_FAILURE: i32 = 1;
pub const USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "craig",
    version,
    about = "Check sequent derivations and compute Craig interpolants"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that every node of a derivation is a correct rule application.
    Check { file: PathBuf },
    /// Compute an interpolant and witnesses for a problem file.
    Interpolate {
        file: PathBuf,
        /// Use the split (Γ, ∅, ∅, Δ) of the root; accepts a bare derivation.
        #[arg(long)]
        weak: bool,
        /// Print the interpolant with ⊥/⊤ unit laws applied.
        #[arg(long)]
        simplify: bool,
        #[arg(long)]
        json: bool,
    },
    /// Recheck a result file against a problem file.
    Verify {
        problem: PathBuf,
        result: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

/// Renders a node path: `ε` for the root, else dot-separated child indices.
pub fn format_path(path: &[usize]) -> String {
    if path.is_empty() {
        "ε".to_string()
    } else {
        path.iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn read(path: &Path) -> Result<String, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    decode(&bytes)
        .map(str::to_string)
        .map_err(|e| format!("{}: {e}", path.display()))
}

/// Runs a parsed command line, writing the report to `out` and diagnostics to
/// `err`. Returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Check { file } => check(file, out),
        Command::Interpolate {
            file,
            weak,
            simplify,
            json,
        } => interpolate_cmd(file, *weak, *simplify, *json, out),
        Command::Verify {
            problem,
            result,
            json,
        } => verify_cmd(problem, result, *json, out),
    };
    match result {
        Ok(code) => code,
        Err((code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

type Outcome = Result<i32, (i32, String)>;

fn usage(msg: String) -> (i32, String) {
    (USAGE, msg)
}

fn io(e: std::io::Error) -> (i32, String) {
    (USAGE, format!("cannot write output: {e}"))
}

fn check(file: &Path, out: &mut dyn Write) -> Outcome {
    let text = read(file).map_err(usage)?;
    let d = parse_derivation(&text).map_err(|e| usage(format!("{}: {e}", file.display())))?;
    let nodes = check_nodes(&d);
    let mut first_bad = None;
    for node in &nodes {
        let path = format_path(&node.path);
        let mut line = format!("node {path} {}", node.kind);
        if let Some(ri) = &node.instance {
            line += &format!(" principal {}", print_formula(ri.principal()));
            if let Some(a) = ri.eigen {
                line += &format!(" eigen {a}");
            }
            if let Some(t) = ri.term {
                line += &format!(" term {t}");
            }
        } else if first_bad.is_none() {
            first_bad = Some(path);
        }
        writeln!(out, "{line}: {}", pass(node.instance.is_some())).map_err(io)?;
    }
    let ok = first_bad.is_none();
    let good = nodes.iter().filter(|n| n.instance.is_some()).count();
    match first_bad {
        None => writeln!(out, "wellformed: PASS ({good}/{} nodes)", nodes.len()),
        Some(path) => writeln!(
            out,
            "wellformed: FAIL ({good}/{} nodes, first failure at node {path})",
            nodes.len()
        ),
    }
    .map_err(io)?;
    Ok(if ok { SUCCESS } else { CONTRACT_FAILURE })
}

// A problem file with its split, or a bare derivation under the weak split.
fn load_problem(
    file: &Path,
    text: &str,
    weak: bool,
) -> Result<(Derivation, SplitSequent), (i32, String)> {
    if weak && !is_labeled(text) {
        let d = parse_derivation(text).map_err(|e| usage(format!("{}: {e}", file.display())))?;
        let split = SplitSequent::weak(d.root());
        return Ok((d, split));
    }
    match parse_problem(text) {
        Ok(p) => {
            let split = if weak {
                SplitSequent::weak(p.derivation.root())
            } else {
                p.split()
            };
            Ok((p.derivation, split))
        }
        Err(e @ ProblemError::Syntax(_)) => Err(usage(format!("{}: {e}", file.display()))),
        Err(e @ ProblemError::RootMismatch { .. }) => {
            Err((CONTRACT_FAILURE, format!("{}: {e}", file.display())))
        }
    }
}

fn report_lines(report: &VerifyReport, out: &mut dyn Write) -> std::io::Result<()> {
    for &(c, ok) in &report.entries {
        writeln!(out, "{}: {}", c.name(), pass(ok))?;
    }
    let passed = report.entries.iter().filter(|(_, ok)| *ok).count();
    writeln!(
        out,
        "verify: {} ({passed}/{} conjuncts)",
        pass(report.passed()),
        Conjunct::ALL.len()
    )
}

fn report_json(report: &VerifyReport) -> serde_json::Map<String, serde_json::Value> {
    report
        .entries
        .iter()
        .map(|&(c, ok)| (c.name().to_string(), serde_json::Value::Bool(ok)))
        .collect()
}

fn interpolate_cmd(
    file: &Path,
    weak: bool,
    simplify: bool,
    json: bool,
    out: &mut dyn Write,
) -> Outcome {
    let text = read(file).map_err(usage)?;
    let (d, split) = load_problem(file, &text, weak)?;
    let result = interpolate_strong(&d, &split).map_err(|e| {
        let msg = match &e {
            craig_core::InterpolationError::Unwellformed { path } => {
                format!(
                    "derivation is not wellformed: first bad node at {}",
                    format_path(path)
                )
            }
            other => other.to_string(),
        };
        (CONTRACT_FAILURE, format!("{}: {msg}", file.display()))
    })?;
    let report = verify(&split, &result);
    let shown = if simplify {
        simplify_bool(&result.interpolant)
    } else {
        result.interpolant.clone()
    };
    let InterpolationResult {
        left_witness,
        right_witness,
        ..
    } = &result;
    if json {
        let mut map = report_json(&report);
        map.insert("interpolant".into(), print_formula(&shown).into());
        map.insert("left".into(), print_derivation(left_witness).into());
        map.insert("right".into(), print_derivation(right_witness).into());
        writeln!(out, "{}", serde_json::Value::Object(map)).map_err(io)?;
    } else {
        writeln!(out, "interpolant: {}", print_formula(&shown)).map_err(io)?;
        writeln!(out, "left: {}", print_derivation(left_witness)).map_err(io)?;
        writeln!(out, "right: {}", print_derivation(right_witness)).map_err(io)?;
        report_lines(&report, out).map_err(io)?;
    }
    Ok(if report.passed() {
        SUCCESS
    } else {
        CONTRACT_FAILURE
    })
}

fn verify_cmd(problem: &Path, result: &Path, json: bool, out: &mut dyn Write) -> Outcome {
    let text = read(problem).map_err(usage)?;
    let (_, split) = load_problem(problem, &text, false)?;
    let text = read(result).map_err(usage)?;
    let r = parse_result(&text).map_err(|e| usage(format!("{}: {e}", result.display())))?;
    let report = verify(&split, &r);
    if json {
        writeln!(out, "{}", serde_json::Value::Object(report_json(&report))).map_err(io)?;
    } else {
        report_lines(&report, out).map_err(io)?;
    }
    Ok(if report.passed() {
        SUCCESS
    } else {
        CONTRACT_FAILURE
    })
}
