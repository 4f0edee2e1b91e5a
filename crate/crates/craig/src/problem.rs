//! Problem and result files.
//!
//! A problem file lists the four parts of a split followed by a derivation
//! of the whole sequent:
//!
//! ```text
//! gamma1: [P0()]
//! gamma2: []
//! delta1: []
//! delta2: [P0()]
//! derivation: (Init [P0()] => [P0()])
//! ```
//!
//! Omitted parts are empty. A result file carries an interpolant and its two
//! witnesses under `interpolant:`, `left:` and `right:`; any other labeled
//! line (such as a report) is ignored, so the output of `craig interpolate`
//! is itself a result file.

use craig_core::calculus::{Derivation, FormulaSet, Sequent};
use craig_core::{Formula, InterpolationResult, SplitSequent};
use thiserror::Error;

use crate::syntax::{
    advance, print_derivation, print_formula, print_formula_list, print_sequent, ParseError,
    ParseErrorKind, Parser, Position,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemFile {
    pub gamma1: Vec<Formula>,
    pub gamma2: Vec<Formula>,
    pub delta1: Vec<Formula>,
    pub delta2: Vec<Formula>,
    pub derivation: Derivation,
}

impl ProblemFile {
    pub fn split(&self) -> SplitSequent {
        let set = |xs: &[Formula]| xs.iter().cloned().collect::<FormulaSet>();
        SplitSequent::new(
            set(&self.gamma1),
            set(&self.gamma2),
            set(&self.delta1),
            set(&self.delta2),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error(transparent)]
    Syntax(#[from] ParseError),
    #[error("split does not match the derivation\n  split:      {}\n  derivation: {}", print_sequent(.split), print_sequent(.root))]
    RootMismatch { split: Sequent, root: Sequent },
}

fn syntax_error(pos: Position, expected: &'static str, found: &str) -> ParseError {
    ParseError {
        pos,
        kind: ParseErrorKind::Unexpected {
            expected,
            found: found.to_string(),
        },
    }
}

// Splits `text` into labeled sections. A section starts on a line whose first
// non-blank text is `word:` and runs until the next such line. Text before
// the first label must be blank or comments.
fn sections(text: &str) -> Result<Vec<(String, Position, Position, &str)>, ParseError> {
    let mut out: Vec<(String, Position, Position, &str)> = Vec::new();
    let mut pos = Position::START;
    let mut offset = 0;
    let mut starts = Vec::new();
    for line in text.split_inclusive('\n') {
        let trimmed = line.trim_start();
        let indent = &line[..line.len() - trimmed.len()];
        let word_len = trimmed
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(trimmed.len());
        if word_len > 0 && trimmed[word_len..].starts_with(':') {
            let label_pos = advance(pos, indent);
            let body_start = offset + indent.len() + word_len + 1;
            let body_pos = advance(label_pos, &trimmed[..word_len + 1]);
            starts.push((
                trimmed[..word_len].to_string(),
                label_pos,
                body_pos,
                body_start,
                offset,
            ));
        } else if starts.is_empty() {
            let content = trimmed.split('#').next().unwrap_or("").trim();
            if !content.is_empty() {
                return Err(syntax_error(
                    advance(pos, indent),
                    "a `label:` header",
                    &format!("`{}`", content.chars().take(20).collect::<String>()),
                ));
            }
        }
        offset += line.len();
        pos = advance(pos, line);
    }
    for i in 0..starts.len() {
        let end = starts.get(i + 1).map_or(text.len(), |s| s.4);
        let (label, label_pos, body_pos, body_start, _) = &starts[i];
        out.push((
            label.clone(),
            *label_pos,
            *body_pos,
            &text[*body_start..end],
        ));
    }
    Ok(out)
}

fn parse_section<T>(
    body: &str,
    pos: Position,
    f: impl FnOnce(&mut Parser) -> Result<T, ParseError>,
) -> Result<T, ParseError> {
    let mut p = Parser::new(body, pos)?;
    let out = f(&mut p)?;
    p.finish()?;
    Ok(out)
}

/// Parses a problem file and checks that the split covers the root.
pub fn parse_problem(text: &str) -> Result<ProblemFile, ProblemError> {
    let mut parts: [Option<Vec<Formula>>; 4] = Default::default();
    let mut derivation = None;
    for (label, label_pos, body_pos, body) in sections(text)? {
        let slot = match label.as_str() {
            "gamma1" => Some(0),
            "gamma2" => Some(1),
            "delta1" => Some(2),
            "delta2" => Some(3),
            "derivation" => None,
            other => {
                return Err(syntax_error(
                    label_pos,
                    "one of gamma1, gamma2, delta1, delta2, derivation",
                    &format!("`{other}`"),
                )
                .into())
            }
        };
        let duplicate = match slot {
            Some(i) => parts[i].is_some(),
            None => derivation.is_some(),
        };
        if duplicate {
            return Err(syntax_error(
                label_pos,
                "each header at most once",
                &format!("a second `{label}`"),
            )
            .into());
        }
        match slot {
            Some(i) => parts[i] = Some(parse_section(body, body_pos, Parser::formula_list)?),
            None => derivation = Some(parse_section(body, body_pos, Parser::derivation)?),
        }
    }
    let derivation = derivation.ok_or_else(|| {
        syntax_error(
            advance(Position::START, text),
            "a `derivation:` header",
            "end of input",
        )
    })?;
    let [g1, g2, d1, d2] = parts.map(Option::unwrap_or_default);
    let problem = ProblemFile {
        gamma1: g1,
        gamma2: g2,
        delta1: d1,
        delta2: d2,
        derivation,
    };
    let split = problem.split();
    if !split.matches(problem.derivation.root()) {
        return Err(ProblemError::RootMismatch {
            split: split.sequent(),
            root: problem.derivation.root().clone(),
        });
    }
    Ok(problem)
}

/// Whether `text` looks like a labeled file rather than a bare derivation.
pub fn is_labeled(text: &str) -> bool {
    sections(text).is_ok_and(|s| !s.is_empty())
}

pub fn print_problem(split: &SplitSequent, d: &Derivation) -> String {
    format!(
        "gamma1: {}\ngamma2: {}\ndelta1: {}\ndelta2: {}\nderivation: {}\n",
        print_formula_list(&split.gamma1),
        print_formula_list(&split.gamma2),
        print_formula_list(&split.delta1),
        print_formula_list(&split.delta2),
        print_derivation(d),
    )
}

pub fn parse_result(text: &str) -> Result<InterpolationResult, ParseError> {
    let mut interpolant = None;
    let mut left = None;
    let mut right = None;
    for (label, label_pos, body_pos, body) in sections(text)? {
        let duplicate = match label.as_str() {
            "interpolant" => interpolant.is_some(),
            "left" => left.is_some(),
            "right" => right.is_some(),
            _ => continue,
        };
        if duplicate {
            return Err(syntax_error(
                label_pos,
                "each entry at most once",
                &format!("a second `{label}`"),
            ));
        }
        match label.as_str() {
            "interpolant" => interpolant = Some(parse_section(body, body_pos, Parser::formula)?),
            "left" => left = Some(parse_section(body, body_pos, Parser::derivation)?),
            _ => right = Some(parse_section(body, body_pos, Parser::derivation)?),
        }
    }
    let end = advance(Position::START, text);
    Ok(InterpolationResult {
        interpolant: interpolant
            .ok_or_else(|| syntax_error(end, "an `interpolant:` entry", "end of input"))?,
        left_witness: left.ok_or_else(|| syntax_error(end, "a `left:` entry", "end of input"))?,
        right_witness: right
            .ok_or_else(|| syntax_error(end, "a `right:` entry", "end of input"))?,
    })
}

pub fn print_result(r: &InterpolationResult) -> String {
    format!(
        "interpolant: {}\nleft: {}\nright: {}\n",
        print_formula(&r.interpolant),
        print_derivation(&r.left_witness),
        print_derivation(&r.right_witness),
    )
}
