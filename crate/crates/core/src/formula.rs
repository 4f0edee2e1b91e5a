//! De Bruijn formulae.
//!
//! Terms are variables. A quantifier binds index `0` of its body; every
//! index that escapes its binders is a free variable. Named binders are a
//! derived notion: [`bind`] abstracts a variable, [`inst`] puts one back.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// A variable, also used as a term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> u32 {
        self.0
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A predicate symbol. Arities are not tracked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PredId(pub u32);

impl fmt::Display for PredId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.0)
    }
}

/// Which quantifier a binder operation refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    All,
    Ex,
}

/// A first-order formula.
///
/// The derived ordering is the canonical order used for formula sets: the
/// constructor tag first (in declaration order), then the fields
/// lexicographically. It coincides with structural equality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(PredId, Vec<VarId>),
    Bot,
    Top,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    FAll(Box<Formula>),
    FEx(Box<Formula>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("cannot instantiate: expected a {expected:?} quantifier at the head")]
    HeadMismatch { expected: Quantifier },
}

impl Formula {
    pub fn atom(pred: u32, args: &[u32]) -> Formula {
        Formula::Atom(PredId(pred), args.iter().map(|&v| VarId(v)).collect())
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    pub fn fall(body: Formula) -> Formula {
        Formula::FAll(Box::new(body))
    }

    pub fn fex(body: Formula) -> Formula {
        Formula::FEx(Box::new(body))
    }

    pub fn quantified(q: Quantifier, body: Formula) -> Formula {
        match q {
            Quantifier::All => Formula::fall(body),
            Quantifier::Ex => Formula::fex(body),
        }
    }

    /// The quantifier at the head together with its body, if any.
    pub fn as_quantified(&self) -> Option<(Quantifier, &Formula)> {
        match self {
            Formula::FAll(body) => Some((Quantifier::All, body)),
            Formula::FEx(body) => Some((Quantifier::Ex, body)),
            _ => None,
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Atom(..) | Formula::Bot | Formula::Top => true,
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::FAll(_) | Formula::FEx(_) => false,
        }
    }

    /// Number of constructors in the formula.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(..) | Formula::Bot | Formula::Top => 1,
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.size() + b.size(),
            Formula::Not(a) | Formula::FAll(a) | Formula::FEx(a) => 1 + a.size(),
        }
    }

    /// Predicates occurring anywhere in the formula.
    pub fn predicates(&self) -> BTreeSet<PredId> {
        let pol = polarity(self);
        pol.positives.union(&pol.negatives).copied().collect()
    }

    /// Largest variable index mentioned by an atom, bound or free.
    pub fn max_var(&self) -> Option<u32> {
        match self {
            Formula::Atom(_, args) => args.iter().map(|v| v.0).max(),
            Formula::Bot | Formula::Top => None,
            Formula::And(a, b) | Formula::Or(a, b) => a.max_var().max(b.max_var()),
            Formula::Not(a) | Formula::FAll(a) | Formula::FEx(a) => a.max_var(),
        }
    }
}

/// Applies the renaming `s` to every free variable of `a`.
///
/// Under each binder the renaming is lifted: index `0` is kept and `n + 1`
/// goes to `s(n) + 1`.
pub fn rename_vars<F>(s: F, a: &Formula) -> Formula
where
    F: Fn(VarId) -> VarId,
{
    rename_at(&s, 0, a)
}

fn rename_at<F>(s: &F, depth: u32, a: &Formula) -> Formula
where
    F: Fn(VarId) -> VarId,
{
    match a {
        Formula::Atom(p, args) => Formula::Atom(
            *p,
            args.iter()
                .map(|&v| {
                    if v.0 < depth {
                        v
                    } else {
                        VarId(s(VarId(v.0 - depth)).0 + depth)
                    }
                })
                .collect(),
        ),
        Formula::Bot => Formula::Bot,
        Formula::Top => Formula::Top,
        Formula::And(l, r) => Formula::and(rename_at(s, depth, l), rename_at(s, depth, r)),
        Formula::Or(l, r) => Formula::or(rename_at(s, depth, l), rename_at(s, depth, r)),
        Formula::Not(b) => Formula::not(rename_at(s, depth, b)),
        Formula::FAll(b) => Formula::fall(rename_at(s, depth + 1, b)),
        Formula::FEx(b) => Formula::fex(rename_at(s, depth + 1, b)),
    }
}

/// Named binder: abstracts `a` in `body` under quantifier `q`.
pub fn bind(q: Quantifier, a: VarId, body: &Formula) -> Formula {
    let renamed = rename_vars(|v| if v == a { VarId(0) } else { VarId(v.0 + 1) }, body);
    Formula::quantified(q, renamed)
}

/// Instantiates the head quantifier of `a` with the term `t`.
pub fn inst(q: Quantifier, t: VarId, a: &Formula) -> Result<Formula, FormulaError> {
    match (q, a) {
        (Quantifier::All, Formula::FAll(body)) | (Quantifier::Ex, Formula::FEx(body)) => {
            Ok(instantiate_body(t, body))
        }
        _ => Err(FormulaError::HeadMismatch { expected: q }),
    }
}

fn instantiate_body(t: VarId, body: &Formula) -> Formula {
    rename_vars(|v| if v.0 == 0 { t } else { VarId(v.0 - 1) }, body)
}

/// Drops zeros and decrements everything else, keeping order.
pub fn pre_suc(xs: &[VarId]) -> Vec<VarId> {
    xs.iter()
        .filter(|v| v.0 != 0)
        .map(|v| VarId(v.0 - 1))
        .collect()
}

/// Free variables in occurrence order, duplicates included.
pub fn free_vars(a: &Formula) -> Vec<VarId> {
    match a {
        Formula::Atom(_, args) => args.clone(),
        Formula::Bot | Formula::Top => Vec::new(),
        Formula::And(l, r) | Formula::Or(l, r) => {
            let mut out = free_vars(l);
            out.extend(free_vars(r));
            out
        }
        Formula::Not(b) => free_vars(b),
        Formula::FAll(b) | Formula::FEx(b) => pre_suc(&free_vars(b)),
    }
}

/// Set view of [`free_vars`].
pub fn free_var_set(a: &Formula) -> BTreeSet<VarId> {
    free_vars(a).into_iter().collect()
}

/// Predicates occurring positively and negatively in a formula.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Polarity {
    pub positives: BTreeSet<PredId>,
    pub negatives: BTreeSet<PredId>,
}

impl Polarity {
    fn swapped(self) -> Polarity {
        Polarity {
            positives: self.negatives,
            negatives: self.positives,
        }
    }

    fn merge(mut self, other: Polarity) -> Polarity {
        self.positives.extend(other.positives);
        self.negatives.extend(other.negatives);
        self
    }
}

pub fn polarity(a: &Formula) -> Polarity {
    match a {
        Formula::Atom(p, _) => Polarity {
            positives: [*p].into_iter().collect(),
            negatives: BTreeSet::new(),
        },
        Formula::Bot | Formula::Top => Polarity::default(),
        Formula::And(l, r) | Formula::Or(l, r) => polarity(l).merge(polarity(r)),
        Formula::Not(b) => polarity(b).swapped(),
        Formula::FAll(b) | Formula::FEx(b) => polarity(b),
    }
}

pub fn pos(a: &Formula) -> BTreeSet<PredId> {
    polarity(a).positives
}

pub fn neg(a: &Formula) -> BTreeSet<PredId> {
    polarity(a).negatives
}

/// Finds a term `t` with `inst(q, t, quantified) == instance`.
///
/// When the bound index does not occur in the body every term works and `0`
/// is returned.
pub fn match_inst(quantified: &Formula, instance: &Formula) -> Option<VarId> {
    let (_, body) = quantified.as_quantified()?;
    let mut term = None;
    if !match_body(body, instance, 0, &mut term) {
        return None;
    }
    Some(term.unwrap_or(VarId(0)))
}

// Walks `body` (seen under `depth` extra binders) against `target`, fixing
// the term substituted for the outer index on first sight.
fn match_body(body: &Formula, target: &Formula, depth: u32, term: &mut Option<VarId>) -> bool {
    match (body, target) {
        (Formula::Atom(p, xs), Formula::Atom(q, ys)) => {
            if p != q || xs.len() != ys.len() {
                return false;
            }
            xs.iter().zip(ys).all(|(x, y)| {
                if x.0 < depth {
                    x == y
                } else if x.0 == depth {
                    if y.0 < depth {
                        return false;
                    }
                    let t = VarId(y.0 - depth);
                    match term {
                        Some(prev) => *prev == t,
                        None => {
                            *term = Some(t);
                            true
                        }
                    }
                } else {
                    y.0 == x.0 - 1
                }
            })
        }
        (Formula::Bot, Formula::Bot) | (Formula::Top, Formula::Top) => true,
        (Formula::And(a, b), Formula::And(c, d)) | (Formula::Or(a, b), Formula::Or(c, d)) => {
            match_body(a, c, depth, term) && match_body(b, d, depth, term)
        }
        (Formula::Not(a), Formula::Not(c)) => match_body(a, c, depth, term),
        (Formula::FAll(a), Formula::FAll(c)) | (Formula::FEx(a), Formula::FEx(c)) => {
            match_body(a, c, depth + 1, term)
        }
        _ => false,
    }
}

/// Finds the smallest `a` outside `forbidden` with `bind(q, a, body) ==
/// quantified`, where `q` is the head quantifier of `quantified`.
pub fn match_bind(
    quantified: &Formula,
    body: &Formula,
    forbidden: &BTreeSet<VarId>,
) -> Option<VarId> {
    let (q, inner) = quantified.as_quantified()?;
    let vacuous = !free_vars(inner).contains(&VarId(0));
    let candidate = if vacuous {
        let taken = free_var_set(body);
        smallest_outside(|v| forbidden.contains(&v) || taken.contains(&v))
    } else {
        let t = match_inst(quantified, body)?;
        if forbidden.contains(&t) {
            return None;
        }
        t
    };
    (bind(q, candidate, body) == *quantified).then_some(candidate)
}

/// Smallest variable not rejected by `excluded`.
pub fn smallest_outside<F>(excluded: F) -> VarId
where
    F: Fn(VarId) -> bool,
{
    (0..)
        .map(VarId)
        .find(|&v| !excluded(v))
        .expect("finitely many variables are excluded")
}
