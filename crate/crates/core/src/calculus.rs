//! Sequents, derivation trees and the wellformedness checker.
//!
//! A derivation node stores only its root sequent and its subderivations.
//! The principal formula, eigenvariable or instantiating term of a node is
//! recovered by [`resolve_rule`], which searches the candidates on the
//! relevant side of the node in canonical order and returns the first one
//! whose side conditions hold.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::formula::{free_vars, inst, match_bind, match_inst, Formula, Quantifier, VarId};

/// A finite set of formulae kept sorted and duplicate-free, so that set
/// equality is structural equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormulaSet(Vec<Formula>);

impl FormulaSet {
    pub fn new() -> FormulaSet {
        FormulaSet(Vec::new())
    }

    pub fn singleton(a: Formula) -> FormulaSet {
        FormulaSet(alloc::vec![a])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Formula> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[Formula] {
        &self.0
    }

    pub fn contains(&self, a: &Formula) -> bool {
        self.0.binary_search(a).is_ok()
    }

    pub fn insert(&mut self, a: Formula) -> bool {
        match self.0.binary_search(&a) {
            Ok(_) => false,
            Err(at) => {
                self.0.insert(at, a);
                true
            }
        }
    }

    pub fn remove(&mut self, a: &Formula) -> bool {
        match self.0.binary_search(a) {
            Ok(at) => {
                self.0.remove(at);
                true
            }
            Err(_) => false,
        }
    }

    /// `self ∪ {a}` as a new set.
    pub fn with(&self, a: Formula) -> FormulaSet {
        let mut out = self.clone();
        out.insert(a);
        out
    }

    pub fn union(&self, other: &FormulaSet) -> FormulaSet {
        self.iter().chain(other.iter()).cloned().collect()
    }

    pub fn intersection(&self, other: &FormulaSet) -> FormulaSet {
        FormulaSet(self.iter().filter(|a| other.contains(a)).cloned().collect())
    }

    pub fn difference(&self, other: &FormulaSet) -> FormulaSet {
        FormulaSet(
            self.iter()
                .filter(|a| !other.contains(a))
                .cloned()
                .collect(),
        )
    }

    pub fn is_subset(&self, other: &FormulaSet) -> bool {
        self.iter().all(|a| other.contains(a))
    }

    /// Set of all free variables of the members.
    pub fn free_vars(&self) -> BTreeSet<VarId> {
        self.iter().flat_map(free_vars).collect()
    }
}

impl FromIterator<Formula> for FormulaSet {
    fn from_iter<I: IntoIterator<Item = Formula>>(iter: I) -> Self {
        let mut v: Vec<Formula> = iter.into_iter().collect();
        v.sort();
        v.dedup();
        FormulaSet(v)
    }
}

impl<'a> IntoIterator for &'a FormulaSet {
    type Item = &'a Formula;
    type IntoIter = core::slice::Iter<'a, Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl IntoIterator for FormulaSet {
    type Item = Formula;
    type IntoIter = alloc::vec::IntoIter<Formula>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

/// `antecedent ⊢ succedent`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequent {
    pub antecedent: FormulaSet,
    pub succedent: FormulaSet,
}

impl Sequent {
    pub fn new(antecedent: FormulaSet, succedent: FormulaSet) -> Sequent {
        Sequent {
            antecedent,
            succedent,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<VarId> {
        let mut out = self.antecedent.free_vars();
        out.extend(self.succedent.free_vars());
        out
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.antecedent.iter().chain(self.succedent.iter())
    }
}

/// Rule tags, one per derivation constructor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleKind {
    Init,
    BotL,
    TopR,
    AndL,
    AndR,
    OrL,
    OrR,
    NotL,
    NotR,
    AllL,
    AllR,
    ExL,
    ExR,
    WL,
    WR,
}

impl RuleKind {
    pub const ALL: [RuleKind; 15] = [
        RuleKind::Init,
        RuleKind::BotL,
        RuleKind::TopR,
        RuleKind::AndL,
        RuleKind::AndR,
        RuleKind::OrL,
        RuleKind::OrR,
        RuleKind::NotL,
        RuleKind::NotR,
        RuleKind::AllL,
        RuleKind::AllR,
        RuleKind::ExL,
        RuleKind::ExR,
        RuleKind::WL,
        RuleKind::WR,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleKind::Init => "Init",
            RuleKind::BotL => "BotL",
            RuleKind::TopR => "TopR",
            RuleKind::AndL => "AndL",
            RuleKind::AndR => "AndR",
            RuleKind::OrL => "OrL",
            RuleKind::OrR => "OrR",
            RuleKind::NotL => "NotL",
            RuleKind::NotR => "NotR",
            RuleKind::AllL => "AllL",
            RuleKind::AllR => "AllR",
            RuleKind::ExL => "ExL",
            RuleKind::ExR => "ExR",
            RuleKind::WL => "WL",
            RuleKind::WR => "WR",
        }
    }

    pub fn from_name(name: &str) -> Option<RuleKind> {
        RuleKind::ALL.iter().copied().find(|k| k.name() == name)
    }

    /// Number of subderivations the constructor takes.
    pub fn arity(self) -> usize {
        match self {
            RuleKind::Init | RuleKind::BotL | RuleKind::TopR => 0,
            RuleKind::AndR | RuleKind::OrL => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A derivation tree. Wellformedness is not enforced by construction; see
/// [`is_wellformed`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Derivation {
    Init(Sequent),
    BotL(Sequent),
    TopR(Sequent),
    AndL(Sequent, Box<Derivation>),
    AndR(Sequent, Box<Derivation>, Box<Derivation>),
    OrL(Sequent, Box<Derivation>, Box<Derivation>),
    OrR(Sequent, Box<Derivation>),
    NotL(Sequent, Box<Derivation>),
    NotR(Sequent, Box<Derivation>),
    AllL(Sequent, Box<Derivation>),
    AllR(Sequent, Box<Derivation>),
    ExL(Sequent, Box<Derivation>),
    ExR(Sequent, Box<Derivation>),
    WL(Sequent, Box<Derivation>),
    WR(Sequent, Box<Derivation>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{kind} takes {expected} subderivation(s), got {found}")]
pub struct ArityError {
    pub kind: RuleKind,
    pub expected: usize,
    pub found: usize,
}

impl Derivation {
    /// Builds a node from its tag, sequent and subderivations.
    pub fn from_parts(
        kind: RuleKind,
        seq: Sequent,
        subs: Vec<Derivation>,
    ) -> Result<Derivation, ArityError> {
        if subs.len() != kind.arity() {
            return Err(ArityError {
                kind,
                expected: kind.arity(),
                found: subs.len(),
            });
        }
        let mut subs = subs.into_iter().map(Box::new);
        let mut next = || subs.next().expect("arity checked");
        Ok(match kind {
            RuleKind::Init => Derivation::Init(seq),
            RuleKind::BotL => Derivation::BotL(seq),
            RuleKind::TopR => Derivation::TopR(seq),
            RuleKind::AndL => Derivation::AndL(seq, next()),
            RuleKind::AndR => {
                let l = next();
                Derivation::AndR(seq, l, next())
            }
            RuleKind::OrL => {
                let l = next();
                Derivation::OrL(seq, l, next())
            }
            RuleKind::OrR => Derivation::OrR(seq, next()),
            RuleKind::NotL => Derivation::NotL(seq, next()),
            RuleKind::NotR => Derivation::NotR(seq, next()),
            RuleKind::AllL => Derivation::AllL(seq, next()),
            RuleKind::AllR => Derivation::AllR(seq, next()),
            RuleKind::ExL => Derivation::ExL(seq, next()),
            RuleKind::ExR => Derivation::ExR(seq, next()),
            RuleKind::WL => Derivation::WL(seq, next()),
            RuleKind::WR => Derivation::WR(seq, next()),
        })
    }

    /// Unary node. Panics if `kind` is not unary.
    pub fn unary(kind: RuleKind, seq: Sequent, sub: Derivation) -> Derivation {
        Derivation::from_parts(kind, seq, alloc::vec![sub]).expect("unary rule")
    }

    /// Binary node. Panics if `kind` is not binary.
    pub fn binary(kind: RuleKind, seq: Sequent, left: Derivation, right: Derivation) -> Derivation {
        Derivation::from_parts(kind, seq, alloc::vec![left, right]).expect("binary rule")
    }

    pub fn kind(&self) -> RuleKind {
        match self {
            Derivation::Init(_) => RuleKind::Init,
            Derivation::BotL(_) => RuleKind::BotL,
            Derivation::TopR(_) => RuleKind::TopR,
            Derivation::AndL(..) => RuleKind::AndL,
            Derivation::AndR(..) => RuleKind::AndR,
            Derivation::OrL(..) => RuleKind::OrL,
            Derivation::OrR(..) => RuleKind::OrR,
            Derivation::NotL(..) => RuleKind::NotL,
            Derivation::NotR(..) => RuleKind::NotR,
            Derivation::AllL(..) => RuleKind::AllL,
            Derivation::AllR(..) => RuleKind::AllR,
            Derivation::ExL(..) => RuleKind::ExL,
            Derivation::ExR(..) => RuleKind::ExR,
            Derivation::WL(..) => RuleKind::WL,
            Derivation::WR(..) => RuleKind::WR,
        }
    }

    pub fn root(&self) -> &Sequent {
        match self {
            Derivation::Init(s) | Derivation::BotL(s) | Derivation::TopR(s) => s,
            Derivation::AndR(s, ..) | Derivation::OrL(s, ..) => s,
            Derivation::AndL(s, _)
            | Derivation::OrR(s, _)
            | Derivation::NotL(s, _)
            | Derivation::NotR(s, _)
            | Derivation::AllL(s, _)
            | Derivation::AllR(s, _)
            | Derivation::ExL(s, _)
            | Derivation::ExR(s, _)
            | Derivation::WL(s, _)
            | Derivation::WR(s, _) => s,
        }
    }

    pub fn premises(&self) -> Vec<&Derivation> {
        match self {
            Derivation::Init(_) | Derivation::BotL(_) | Derivation::TopR(_) => Vec::new(),
            Derivation::AndR(_, l, r) | Derivation::OrL(_, l, r) => alloc::vec![&**l, &**r],
            Derivation::AndL(_, d)
            | Derivation::OrR(_, d)
            | Derivation::NotL(_, d)
            | Derivation::NotR(_, d)
            | Derivation::AllL(_, d)
            | Derivation::AllR(_, d)
            | Derivation::ExL(_, d)
            | Derivation::ExR(_, d)
            | Derivation::WL(_, d)
            | Derivation::WR(_, d) => alloc::vec![&**d],
        }
    }

    /// Number of rule nodes.
    pub fn size(&self) -> usize {
        1 + self.premises().iter().map(|d| d.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.premises().iter().map(|d| d.depth()).max().unwrap_or(0)
    }
}

pub fn root(d: &Derivation) -> &Sequent {
    d.root()
}

pub fn size(d: &Derivation) -> usize {
    d.size()
}

pub fn premises(d: &Derivation) -> Vec<&Derivation> {
    d.premises()
}

/// The witnesses of a node's side conditions.
///
/// `analysed` is the principal formula. `components` holds `(A, B)` for the
/// binary connectives. `component` holds the single formula moved to the
/// premise by the negation and quantifier rules (`A` for `¬A`, the instance
/// for quantifiers) and the weakened formula for `WL`/`WR`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleInstance {
    pub kind: RuleKind,
    pub analysed: Option<Formula>,
    pub components: Option<(Formula, Formula)>,
    pub component: Option<Formula>,
    pub eigen: Option<VarId>,
    pub term: Option<VarId>,
}

impl RuleInstance {
    fn new(kind: RuleKind, analysed: Formula) -> RuleInstance {
        RuleInstance {
            kind,
            analysed: Some(analysed),
            components: None,
            component: None,
            eigen: None,
            term: None,
        }
    }

    /// The principal formula. Every resolved instance has one.
    pub fn principal(&self) -> &Formula {
        self.analysed
            .as_ref()
            .expect("resolved rule has a principal formula")
    }
}

/// Witnesses the side conditions of the node at the root of `d`, without
/// looking at deeper nodes. Returns `None` if the node is not a correct
/// rule application.
pub fn resolve_rule(d: &Derivation) -> Option<RuleInstance> {
    let seq = d.root();
    let (gamma, delta) = (&seq.antecedent, &seq.succedent);
    match d {
        Derivation::Init(_) => gamma
            .iter()
            .find(|a| delta.contains(a))
            .map(|a| RuleInstance::new(RuleKind::Init, a.clone())),
        Derivation::BotL(_) => gamma
            .contains(&Formula::Bot)
            .then(|| RuleInstance::new(RuleKind::BotL, Formula::Bot)),
        Derivation::TopR(_) => delta
            .contains(&Formula::Top)
            .then(|| RuleInstance::new(RuleKind::TopR, Formula::Top)),
        Derivation::AndL(_, sub) => gamma.iter().find_map(|p| match p {
            Formula::And(a, b) => {
                let expected =
                    Sequent::new(gamma.with((**a).clone()).with((**b).clone()), delta.clone());
                (sub.root() == &expected).then(|| binary_instance(RuleKind::AndL, p, a, b))
            }
            _ => None,
        }),
        Derivation::AndR(_, l, r) => delta.iter().find_map(|p| match p {
            Formula::And(a, b) => {
                let left = Sequent::new(gamma.clone(), delta.with((**a).clone()));
                let right = Sequent::new(gamma.clone(), delta.with((**b).clone()));
                (l.root() == &left && r.root() == &right)
                    .then(|| binary_instance(RuleKind::AndR, p, a, b))
            }
            _ => None,
        }),
        Derivation::OrL(_, l, r) => gamma.iter().find_map(|p| match p {
            Formula::Or(a, b) => {
                let left = Sequent::new(gamma.with((**a).clone()), delta.clone());
                let right = Sequent::new(gamma.with((**b).clone()), delta.clone());
                (l.root() == &left && r.root() == &right)
                    .then(|| binary_instance(RuleKind::OrL, p, a, b))
            }
            _ => None,
        }),
        Derivation::OrR(_, sub) => delta.iter().find_map(|p| match p {
            Formula::Or(a, b) => {
                let expected =
                    Sequent::new(gamma.clone(), delta.with((**a).clone()).with((**b).clone()));
                (sub.root() == &expected).then(|| binary_instance(RuleKind::OrR, p, a, b))
            }
            _ => None,
        }),
        Derivation::NotL(_, sub) => gamma.iter().find_map(|p| match p {
            Formula::Not(a) => {
                let expected = Sequent::new(gamma.clone(), delta.with((**a).clone()));
                (sub.root() == &expected).then(|| unary_instance(RuleKind::NotL, p, a))
            }
            _ => None,
        }),
        Derivation::NotR(_, sub) => delta.iter().find_map(|p| match p {
            Formula::Not(a) => {
                let expected = Sequent::new(gamma.with((**a).clone()), delta.clone());
                (sub.root() == &expected).then(|| unary_instance(RuleKind::NotR, p, a))
            }
            _ => None,
        }),
        Derivation::AllL(_, sub) => resolve_instantiation(RuleKind::AllL, seq, sub.root()),
        Derivation::ExR(_, sub) => resolve_instantiation(RuleKind::ExR, seq, sub.root()),
        Derivation::AllR(_, sub) => resolve_eigen(RuleKind::AllR, seq, sub.root()),
        Derivation::ExL(_, sub) => resolve_eigen(RuleKind::ExL, seq, sub.root()),
        Derivation::WL(_, sub) => resolve_weakening(
            RuleKind::WL,
            gamma,
            delta,
            &sub.root().antecedent,
            &sub.root().succedent,
        ),
        Derivation::WR(_, sub) => resolve_weakening(
            RuleKind::WR,
            delta,
            gamma,
            &sub.root().succedent,
            &sub.root().antecedent,
        ),
    }
}

fn binary_instance(kind: RuleKind, p: &Formula, a: &Formula, b: &Formula) -> RuleInstance {
    RuleInstance {
        components: Some((a.clone(), b.clone())),
        ..RuleInstance::new(kind, p.clone())
    }
}

fn unary_instance(kind: RuleKind, p: &Formula, a: &Formula) -> RuleInstance {
    RuleInstance {
        component: Some(a.clone()),
        ..RuleInstance::new(kind, p.clone())
    }
}

// Side of the conclusion holding the principal formula, and its quantifier.
fn quantifier_side(kind: RuleKind) -> (bool, Quantifier) {
    match kind {
        RuleKind::AllL => (true, Quantifier::All),
        RuleKind::AllR => (false, Quantifier::All),
        RuleKind::ExL => (true, Quantifier::Ex),
        RuleKind::ExR => (false, Quantifier::Ex),
        _ => unreachable!("not a quantifier rule"),
    }
}

fn extended(seq: &Sequent, left: bool, a: &Formula) -> Sequent {
    if left {
        Sequent::new(seq.antecedent.with(a.clone()), seq.succedent.clone())
    } else {
        Sequent::new(seq.antecedent.clone(), seq.succedent.with(a.clone()))
    }
}

fn principal_candidates(
    seq: &Sequent,
    left: bool,
    q: Quantifier,
) -> impl Iterator<Item = &Formula> {
    let side = if left {
        &seq.antecedent
    } else {
        &seq.succedent
    };
    side.iter()
        .filter(move |f| matches!(f.as_quantified(), Some((found, _)) if found == q))
}

// AllL / ExR: some term t with root(sub) = conclusion + inst(t, Q).
fn resolve_instantiation(kind: RuleKind, seq: &Sequent, premise: &Sequent) -> Option<RuleInstance> {
    let (left, q) = quantifier_side(kind);
    let premise_side = if left {
        &premise.antecedent
    } else {
        &premise.succedent
    };
    principal_candidates(seq, left, q).find_map(|p| {
        premise_side.iter().find_map(|e| {
            let t = match_inst(p, e)?;
            (extended(seq, left, e) == *premise).then(|| RuleInstance {
                component: Some(e.clone()),
                term: Some(t),
                ..RuleInstance::new(kind, p.clone())
            })
        })
    })
}

// AllR / ExL: some eigenvariable a, not free in the conclusion, with
// root(sub) = conclusion + body where bind(q, a, body) = Q.
fn resolve_eigen(kind: RuleKind, seq: &Sequent, premise: &Sequent) -> Option<RuleInstance> {
    let (left, q) = quantifier_side(kind);
    let forbidden = seq.free_vars();
    let premise_side = if left {
        &premise.antecedent
    } else {
        &premise.succedent
    };
    principal_candidates(seq, left, q).find_map(|p| {
        premise_side.iter().find_map(|e| {
            let a = match_bind(p, e, &forbidden)?;
            debug_assert_eq!(inst(q, a, p).as_ref(), Ok(e));
            (extended(seq, left, e) == *premise).then(|| RuleInstance {
                component: Some(e.clone()),
                eigen: Some(a),
                ..RuleInstance::new(kind, p.clone())
            })
        })
    })
}

// The weakened side must be the premise side plus at most one formula; the
// other side is unchanged. When nothing was added, the weakened formula is
// one already present, taken as the first in canonical order.
fn resolve_weakening(
    kind: RuleKind,
    side: &FormulaSet,
    other: &FormulaSet,
    premise_side: &FormulaSet,
    premise_other: &FormulaSet,
) -> Option<RuleInstance> {
    if other != premise_other || !premise_side.is_subset(side) {
        return None;
    }
    let added = side.difference(premise_side);
    let weakened = match added.len() {
        0 => side.iter().next()?.clone(),
        1 => added.into_iter().next().expect("one element"),
        _ => return None,
    };
    Some(RuleInstance {
        component: Some(weakened.clone()),
        ..RuleInstance::new(kind, weakened)
    })
}

/// True iff every node of `d` is a correct rule application.
pub fn is_wellformed(d: &Derivation) -> bool {
    first_failure(d).is_none()
}

/// Path of the first node (pre-order) whose side conditions fail. Paths
/// list child positions from the root; the root itself is the empty path.
pub fn first_failure(d: &Derivation) -> Option<Vec<usize>> {
    let mut path = Vec::new();
    find_failure(d, &mut path).then_some(path)
}

fn find_failure(d: &Derivation, path: &mut Vec<usize>) -> bool {
    if resolve_rule(d).is_none() {
        return true;
    }
    for (i, sub) in d.premises().into_iter().enumerate() {
        path.push(i);
        if find_failure(sub, path) {
            return true;
        }
        path.pop();
    }
    false
}

/// Resolution result for one node of a derivation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeCheck {
    pub path: Vec<usize>,
    pub kind: RuleKind,
    pub instance: Option<RuleInstance>,
}

/// Resolves every node of `d` in pre-order.
pub fn check_nodes(d: &Derivation) -> Vec<NodeCheck> {
    let mut out = Vec::new();
    collect_checks(d, &mut Vec::new(), &mut out);
    out
}

fn collect_checks(d: &Derivation, path: &mut Vec<usize>, out: &mut Vec<NodeCheck>) {
    out.push(NodeCheck {
        path: path.clone(),
        kind: d.kind(),
        instance: resolve_rule(d),
    });
    for (i, sub) in d.premises().into_iter().enumerate() {
        path.push(i);
        collect_checks(sub, path, out);
        path.pop();
    }
}
