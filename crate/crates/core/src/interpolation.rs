//! Constructive interpolation for split sequents.
//!
//! Given a wellformed derivation of `Γ1, Γ2 ⊢ Δ1, Δ2`, [`interpolate_strong`]
//! produces a formula `C` with derivations of `Γ1 ⊢ Δ1, C` and
//! `C, Γ2 ⊢ Δ2`, such that every predicate positive in `C` is positive in
//! `Γ1, ¬Δ1` and in `¬Γ2, Δ2`, and likewise for negative occurrences. The
//! procedure recurses on the last rule of the derivation; each case builds
//! its witnesses from the witnesses of the premises.
//!
//! [`verify`] rechecks every conjunct of that contract from scratch.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::calculus::{
    first_failure, is_wellformed, resolve_rule, Derivation, FormulaSet, RuleInstance, RuleKind,
    Sequent,
};
use crate::formula::{bind, polarity, Formula, PredId, Quantifier};

/// The four parts `(Γ1, Γ2, Δ1, Δ2)` of a split sequent. Parts may overlap.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SplitSequent {
    pub gamma1: FormulaSet,
    pub gamma2: FormulaSet,
    pub delta1: FormulaSet,
    pub delta2: FormulaSet,
}

impl SplitSequent {
    pub fn new(
        gamma1: FormulaSet,
        gamma2: FormulaSet,
        delta1: FormulaSet,
        delta2: FormulaSet,
    ) -> SplitSequent {
        SplitSequent {
            gamma1,
            gamma2,
            delta1,
            delta2,
        }
    }

    /// The split `(Γ, ∅, ∅, Δ)` giving the ordinary interpolation problem.
    pub fn weak(seq: &Sequent) -> SplitSequent {
        SplitSequent::new(
            seq.antecedent.clone(),
            FormulaSet::new(),
            FormulaSet::new(),
            seq.succedent.clone(),
        )
    }

    /// `(Γ1 ∪ Γ2, Δ1 ∪ Δ2)`.
    pub fn sequent(&self) -> Sequent {
        Sequent::new(
            self.gamma1.union(&self.gamma2),
            self.delta1.union(&self.delta2),
        )
    }

    pub fn matches(&self, seq: &Sequent) -> bool {
        self.sequent() == *seq
    }

    /// Sequent the left witness must prove: `Γ1 ⊢ Δ1, C`.
    pub fn left_goal(&self, c: &Formula) -> Sequent {
        Sequent::new(self.gamma1.clone(), self.delta1.with(c.clone()))
    }

    /// Sequent the right witness must prove: `C, Γ2 ⊢ Δ2`.
    pub fn right_goal(&self, c: &Formula) -> Sequent {
        Sequent::new(self.gamma2.with(c.clone()), self.delta2.clone())
    }
}

/// An interpolant with its two witness derivations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpolationResult {
    pub interpolant: Formula,
    pub left_witness: Derivation,
    pub right_witness: Derivation,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InterpolationError {
    #[error("derivation is not wellformed (first bad node at {path:?})")]
    Unwellformed { path: Vec<usize> },
    #[error("split does not match the root sequent of the derivation")]
    SplitMismatch,
    #[error("{kind} node has no rule instance")]
    Unresolved { kind: RuleKind },
    #[error("{kind} principal formula lies in neither part of the split")]
    Contradiction { kind: RuleKind },
}

/// One branch of the case analysis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    InitGamma1Delta1,
    InitGamma1Delta2,
    InitGamma2Delta1,
    InitGamma2Delta2,
    AndLGamma1,
    AndLGamma2,
    AndRDelta1,
    AndRDelta2,
    OrLGamma1,
    OrLGamma2,
    OrRDelta1,
    OrRDelta2,
    NotLGamma1,
    NotLGamma2,
    NotRDelta1,
    NotRDelta2,
    AllLGamma1,
    AllLGamma2,
    AllRDelta1,
    AllRDelta2,
    ExLGamma1,
    ExLGamma2,
    ExRDelta1,
    ExRDelta2,
    WLBoth,
    WLGamma1Only,
    WLGamma2Only,
    WLNeither,
    WRBoth,
    WRDelta1Only,
    WRDelta2Only,
    WRNeither,
    BotLGamma1,
    BotLGamma2,
    TopRDelta1,
    TopRDelta2,
}

impl Branch {
    pub const COUNT: usize = 36;

    pub const ALL: [Branch; Branch::COUNT] = [
        Branch::InitGamma1Delta1,
        Branch::InitGamma1Delta2,
        Branch::InitGamma2Delta1,
        Branch::InitGamma2Delta2,
        Branch::AndLGamma1,
        Branch::AndLGamma2,
        Branch::AndRDelta1,
        Branch::AndRDelta2,
        Branch::OrLGamma1,
        Branch::OrLGamma2,
        Branch::OrRDelta1,
        Branch::OrRDelta2,
        Branch::NotLGamma1,
        Branch::NotLGamma2,
        Branch::NotRDelta1,
        Branch::NotRDelta2,
        Branch::AllLGamma1,
        Branch::AllLGamma2,
        Branch::AllRDelta1,
        Branch::AllRDelta2,
        Branch::ExLGamma1,
        Branch::ExLGamma2,
        Branch::ExRDelta1,
        Branch::ExRDelta2,
        Branch::WLBoth,
        Branch::WLGamma1Only,
        Branch::WLGamma2Only,
        Branch::WLNeither,
        Branch::WRBoth,
        Branch::WRDelta1Only,
        Branch::WRDelta2Only,
        Branch::WRNeither,
        Branch::BotLGamma1,
        Branch::BotLGamma2,
        Branch::TopRDelta1,
        Branch::TopRDelta2,
    ];

    /// The 32 classical cases: four `Init` subcases, two subcases for each
    /// of the ten connective and quantifier rules, four for each weakening
    /// rule. The `⊥L` and `⊤R` leaves are handled but not part of that count.
    pub fn is_classical(self) -> bool {
        !matches!(
            self,
            Branch::BotLGamma1 | Branch::BotLGamma2 | Branch::TopRDelta1 | Branch::TopRDelta2
        )
    }

    /// The weakening subcase where the weakened formula is in neither part.
    /// Only reachable when the split does not match the derivation.
    pub fn is_contradiction(self) -> bool {
        matches!(self, Branch::WLNeither | Branch::WRNeither)
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Hit counters for each [`Branch`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coverage {
    hits: [u64; Branch::COUNT],
}

impl Default for Coverage {
    fn default() -> Self {
        Coverage {
            hits: [0; Branch::COUNT],
        }
    }
}

impl Coverage {
    pub fn new() -> Coverage {
        Coverage::default()
    }

    pub fn record(&mut self, b: Branch) {
        self.hits[b.index()] += 1;
    }

    pub fn hits(&self, b: Branch) -> u64 {
        self.hits[b.index()]
    }

    pub fn merge(&mut self, other: &Coverage) {
        for (a, b) in self.hits.iter_mut().zip(other.hits.iter()) {
            *a += b;
        }
    }

    pub fn missing(&self) -> Vec<Branch> {
        Branch::ALL
            .iter()
            .copied()
            .filter(|&b| self.hits(b) == 0)
            .collect()
    }
}

/// Interpolates the split `split` of the root of `d`.
pub fn interpolate_strong(
    d: &Derivation,
    split: &SplitSequent,
) -> Result<InterpolationResult, InterpolationError> {
    interpolate_strong_traced(d, split, &mut Coverage::new())
}

/// [`interpolate_strong`], recording every branch taken into `coverage`.
pub fn interpolate_strong_traced(
    d: &Derivation,
    split: &SplitSequent,
    coverage: &mut Coverage,
) -> Result<InterpolationResult, InterpolationError> {
    if let Some(path) = first_failure(d) {
        return Err(InterpolationError::Unwellformed { path });
    }
    if !split.matches(d.root()) {
        return Err(InterpolationError::SplitMismatch);
    }
    interpolate_unchecked(d, split, coverage)
}

/// Runs the case analysis without first checking wellformedness or that
/// the split matches. Violations surface as errors at the node where the
/// case analysis gets stuck.
pub fn interpolate_unchecked(
    d: &Derivation,
    split: &SplitSequent,
    coverage: &mut Coverage,
) -> Result<InterpolationResult, InterpolationError> {
    Interpolator { coverage }.run(d, split)
}

/// Plain Craig interpolation: the split `(Γ, ∅, ∅, Δ)`.
pub fn interpolate(d: &Derivation) -> Result<InterpolationResult, InterpolationError> {
    interpolate_strong(d, &SplitSequent::weak(d.root()))
}

fn seq(antecedent: FormulaSet, succedent: FormulaSet) -> Sequent {
    Sequent::new(antecedent, succedent)
}

fn done(c: Formula, left: Derivation, right: Derivation) -> InterpolationResult {
    InterpolationResult {
        interpolant: c,
        left_witness: left,
        right_witness: right,
    }
}

fn component(ri: &RuleInstance) -> &Formula {
    ri.component
        .as_ref()
        .expect("rule instance carries its component")
}

fn components(ri: &RuleInstance) -> (&Formula, &Formula) {
    let (a, b) = ri
        .components
        .as_ref()
        .expect("rule instance carries its components");
    (a, b)
}

struct Interpolator<'a> {
    coverage: &'a mut Coverage,
}

impl Interpolator<'_> {
    fn hit(&mut self, b: Branch) {
        self.coverage.record(b);
    }

    fn run(
        &mut self,
        d: &Derivation,
        split: &SplitSequent,
    ) -> Result<InterpolationResult, InterpolationError> {
        let kind = d.kind();
        let ri = resolve_rule(d).ok_or(InterpolationError::Unresolved { kind })?;
        let SplitSequent {
            gamma1: g1,
            gamma2: g2,
            delta1: d1,
            delta2: d2,
        } = split;
        let principal = ri.principal();
        let in_g1 = g1.contains(principal);
        let in_g2 = g2.contains(principal);
        let in_d1 = d1.contains(principal);
        let in_d2 = d2.contains(principal);
        let contradiction = Err(InterpolationError::Contradiction { kind });

        match d {
            Derivation::Init(_) => self.init(split),
            Derivation::BotL(_) => {
                if in_g1 {
                    self.hit(Branch::BotLGamma1);
                    let c = Formula::Bot;
                    Ok(done(
                        c.clone(),
                        Derivation::BotL(seq(g1.clone(), d1.with(c.clone()))),
                        Derivation::BotL(seq(g2.with(c), d2.clone())),
                    ))
                } else if in_g2 {
                    self.hit(Branch::BotLGamma2);
                    let c = Formula::Top;
                    Ok(done(
                        c.clone(),
                        Derivation::TopR(seq(g1.clone(), d1.with(c.clone()))),
                        Derivation::BotL(seq(g2.with(c), d2.clone())),
                    ))
                } else {
                    contradiction
                }
            }
            Derivation::TopR(_) => {
                if in_d1 {
                    self.hit(Branch::TopRDelta1);
                    let c = Formula::Bot;
                    Ok(done(
                        c.clone(),
                        Derivation::TopR(seq(g1.clone(), d1.with(c.clone()))),
                        Derivation::BotL(seq(g2.with(c), d2.clone())),
                    ))
                } else if in_d2 {
                    self.hit(Branch::TopRDelta2);
                    let c = Formula::Top;
                    Ok(done(
                        c.clone(),
                        Derivation::TopR(seq(g1.clone(), d1.with(c.clone()))),
                        Derivation::TopR(seq(g2.with(c), d2.clone())),
                    ))
                } else {
                    contradiction
                }
            }
            Derivation::AndL(_, sub) => {
                let (a, b) = components(&ri);
                if in_g1 {
                    self.hit(Branch::AndLGamma1);
                    let next = SplitSequent::new(
                        g1.with(a.clone()).with(b.clone()),
                        g2.clone(),
                        d1.clone(),
                        d2.clone(),
                    );
                    self.wrap_left(RuleKind::AndL, sub, split, &next)
                } else if in_g2 {
                    self.hit(Branch::AndLGamma2);
                    let next = SplitSequent::new(
                        g1.clone(),
                        g2.with(a.clone()).with(b.clone()),
                        d1.clone(),
                        d2.clone(),
                    );
                    self.wrap_right(RuleKind::AndL, sub, split, &next)
                } else {
                    contradiction
                }
            }
            Derivation::OrR(_, sub) => {
                let (a, b) = components(&ri);
                if in_d1 {
                    self.hit(Branch::OrRDelta1);
                    let next = SplitSequent::new(
                        g1.clone(),
                        g2.clone(),
                        d1.with(a.clone()).with(b.clone()),
                        d2.clone(),
                    );
                    self.wrap_left(RuleKind::OrR, sub, split, &next)
                } else if in_d2 {
                    self.hit(Branch::OrRDelta2);
                    let next = SplitSequent::new(
                        g1.clone(),
                        g2.clone(),
                        d1.clone(),
                        d2.with(a.clone()).with(b.clone()),
                    );
                    self.wrap_right(RuleKind::OrR, sub, split, &next)
                } else {
                    contradiction
                }
            }
            Derivation::NotL(_, sub) => {
                let a = component(&ri);
                if in_g1 {
                    self.hit(Branch::NotLGamma1);
                    let next =
                        SplitSequent::new(g1.clone(), g2.clone(), d1.with(a.clone()), d2.clone());
                    self.wrap_left(RuleKind::NotL, sub, split, &next)
                } else if in_g2 {
                    self.hit(Branch::NotLGamma2);
                    let next =
                        SplitSequent::new(g1.clone(), g2.clone(), d1.clone(), d2.with(a.clone()));
                    self.wrap_right(RuleKind::NotL, sub, split, &next)
                } else {
                    contradiction
                }
            }
            Derivation::NotR(_, sub) => {
                let a = component(&ri);
                if in_d1 {
                    self.hit(Branch::NotRDelta1);
                    let next =
                        SplitSequent::new(g1.with(a.clone()), g2.clone(), d1.clone(), d2.clone());
                    self.wrap_left(RuleKind::NotR, sub, split, &next)
                } else if in_d2 {
                    self.hit(Branch::NotRDelta2);
                    let next =
                        SplitSequent::new(g1.clone(), g2.with(a.clone()), d1.clone(), d2.clone());
                    self.wrap_right(RuleKind::NotR, sub, split, &next)
                } else {
                    contradiction
                }
            }
            Derivation::AllL(_, sub) => {
                let e = component(&ri);
                if in_g1 {
                    self.hit(Branch::AllLGamma1);
                    let next =
                        SplitSequent::new(g1.with(e.clone()), g2.clone(), d1.clone(), d2.clone());
                    self.wrap_left(RuleKind::AllL, sub, split, &next)
                } else if in_g2 {
                    self.hit(Branch::AllLGamma2);
                    let next =
                        SplitSequent::new(g1.clone(), g2.with(e.clone()), d1.clone(), d2.clone());
                    self.wrap_right(RuleKind::AllL, sub, split, &next)
                } else {
                    contradiction
                }
            }
            Derivation::ExR(_, sub) => {
                let e = component(&ri);
                if in_d1 {
                    self.hit(Branch::ExRDelta1);
                    let next =
                        SplitSequent::new(g1.clone(), g2.clone(), d1.with(e.clone()), d2.clone());
                    self.wrap_left(RuleKind::ExR, sub, split, &next)
                } else if in_d2 {
                    self.hit(Branch::ExRDelta2);
                    let next =
                        SplitSequent::new(g1.clone(), g2.clone(), d1.clone(), d2.with(e.clone()));
                    self.wrap_right(RuleKind::ExR, sub, split, &next)
                } else {
                    contradiction
                }
            }
            Derivation::AndR(_, l, r) => {
                let (a, b) = components(&ri);
                if in_d1 {
                    self.hit(Branch::AndRDelta1);
                    let next_l =
                        SplitSequent::new(g1.clone(), g2.clone(), d1.with(a.clone()), d2.clone());
                    let next_r =
                        SplitSequent::new(g1.clone(), g2.clone(), d1.with(b.clone()), d2.clone());
                    let left = self.run(l, &next_l)?;
                    let right = self.run(r, &next_r)?;
                    Ok(disjoin_right_branches(
                        split,
                        (a, b),
                        false,
                        RuleKind::AndR,
                        left,
                        right,
                    ))
                } else if in_d2 {
                    self.hit(Branch::AndRDelta2);
                    let next_l =
                        SplitSequent::new(g1.clone(), g2.clone(), d1.clone(), d2.with(a.clone()));
                    let next_r =
                        SplitSequent::new(g1.clone(), g2.clone(), d1.clone(), d2.with(b.clone()));
                    let left = self.run(l, &next_l)?;
                    let right = self.run(r, &next_r)?;
                    Ok(conjoin_left_branches(
                        split,
                        (a, b),
                        false,
                        RuleKind::AndR,
                        left,
                        right,
                    ))
                } else {
                    contradiction
                }
            }
            Derivation::OrL(_, l, r) => {
                let (a, b) = components(&ri);
                if in_g1 {
                    self.hit(Branch::OrLGamma1);
                    let next_l =
                        SplitSequent::new(g1.with(a.clone()), g2.clone(), d1.clone(), d2.clone());
                    let next_r =
                        SplitSequent::new(g1.with(b.clone()), g2.clone(), d1.clone(), d2.clone());
                    let left = self.run(l, &next_l)?;
                    let right = self.run(r, &next_r)?;
                    Ok(disjoin_right_branches(
                        split,
                        (a, b),
                        true,
                        RuleKind::OrL,
                        left,
                        right,
                    ))
                } else if in_g2 {
                    self.hit(Branch::OrLGamma2);
                    let next_l =
                        SplitSequent::new(g1.clone(), g2.with(a.clone()), d1.clone(), d2.clone());
                    let next_r =
                        SplitSequent::new(g1.clone(), g2.with(b.clone()), d1.clone(), d2.clone());
                    let left = self.run(l, &next_l)?;
                    let right = self.run(r, &next_r)?;
                    Ok(conjoin_left_branches(
                        split,
                        (a, b),
                        true,
                        RuleKind::OrL,
                        left,
                        right,
                    ))
                } else {
                    contradiction
                }
            }
            Derivation::AllR(_, sub) => {
                let e = component(&ri);
                let a = ri.eigen.expect("AllR instance has an eigenvariable");
                if in_d1 {
                    self.hit(Branch::AllRDelta1);
                    let next =
                        SplitSequent::new(g1.clone(), g2.clone(), d1.with(e.clone()), d2.clone());
                    let inner = self.run(sub, &next)?;
                    let c = inner.interpolant;
                    let x = bind(Quantifier::Ex, a, &c);
                    let dl = Derivation::unary(
                        RuleKind::WR,
                        seq(
                            g1.clone(),
                            d1.with(e.clone()).with(c.clone()).with(x.clone()),
                        ),
                        inner.left_witness,
                    );
                    let dl = Derivation::unary(
                        RuleKind::ExR,
                        seq(g1.clone(), d1.with(e.clone()).with(x.clone())),
                        dl,
                    );
                    let dl =
                        Derivation::unary(RuleKind::AllR, seq(g1.clone(), d1.with(x.clone())), dl);
                    let dr = Derivation::unary(
                        RuleKind::WL,
                        seq(g2.with(x.clone()).with(c), d2.clone()),
                        inner.right_witness,
                    );
                    let dr =
                        Derivation::unary(RuleKind::ExL, seq(g2.with(x.clone()), d2.clone()), dr);
                    Ok(done(x, dl, dr))
                } else if in_d2 {
                    self.hit(Branch::AllRDelta2);
                    let next =
                        SplitSequent::new(g1.clone(), g2.clone(), d1.clone(), d2.with(e.clone()));
                    let inner = self.run(sub, &next)?;
                    let c = inner.interpolant;
                    let y = bind(Quantifier::All, a, &c);
                    let dl = Derivation::unary(
                        RuleKind::WR,
                        seq(g1.clone(), d1.with(c.clone()).with(y.clone())),
                        inner.left_witness,
                    );
                    let dl =
                        Derivation::unary(RuleKind::AllR, seq(g1.clone(), d1.with(y.clone())), dl);
                    let dr = Derivation::unary(
                        RuleKind::WL,
                        seq(g2.with(y.clone()).with(c), d2.with(e.clone())),
                        inner.right_witness,
                    );
                    let dr = Derivation::unary(
                        RuleKind::AllL,
                        seq(g2.with(y.clone()), d2.with(e.clone())),
                        dr,
                    );
                    let dr =
                        Derivation::unary(RuleKind::AllR, seq(g2.with(y.clone()), d2.clone()), dr);
                    Ok(done(y, dl, dr))
                } else {
                    contradiction
                }
            }
            Derivation::ExL(_, sub) => {
                let e = component(&ri);
                let a = ri.eigen.expect("ExL instance has an eigenvariable");
                if in_g1 {
                    self.hit(Branch::ExLGamma1);
                    let next =
                        SplitSequent::new(g1.with(e.clone()), g2.clone(), d1.clone(), d2.clone());
                    let inner = self.run(sub, &next)?;
                    let c = inner.interpolant;
                    let x = bind(Quantifier::Ex, a, &c);
                    let g1e = g1.with(e.clone());
                    let dl = Derivation::unary(
                        RuleKind::WR,
                        seq(g1e.clone(), d1.with(c.clone()).with(x.clone())),
                        inner.left_witness,
                    );
                    let dl = Derivation::unary(RuleKind::ExR, seq(g1e, d1.with(x.clone())), dl);
                    let dl =
                        Derivation::unary(RuleKind::ExL, seq(g1.clone(), d1.with(x.clone())), dl);
                    let dr = Derivation::unary(
                        RuleKind::WL,
                        seq(g2.with(x.clone()).with(c), d2.clone()),
                        inner.right_witness,
                    );
                    let dr =
                        Derivation::unary(RuleKind::ExL, seq(g2.with(x.clone()), d2.clone()), dr);
                    Ok(done(x, dl, dr))
                } else if in_g2 {
                    self.hit(Branch::ExLGamma2);
                    let next =
                        SplitSequent::new(g1.clone(), g2.with(e.clone()), d1.clone(), d2.clone());
                    let inner = self.run(sub, &next)?;
                    let c = inner.interpolant;
                    let y = bind(Quantifier::All, a, &c);
                    let dl = Derivation::unary(
                        RuleKind::WR,
                        seq(g1.clone(), d1.with(c.clone()).with(y.clone())),
                        inner.left_witness,
                    );
                    let dl =
                        Derivation::unary(RuleKind::AllR, seq(g1.clone(), d1.with(y.clone())), dl);
                    let g2e = g2.with(e.clone());
                    let dr = Derivation::unary(
                        RuleKind::WL,
                        seq(g2e.with(y.clone()).with(c), d2.clone()),
                        inner.right_witness,
                    );
                    let dr =
                        Derivation::unary(RuleKind::AllL, seq(g2e.with(y.clone()), d2.clone()), dr);
                    let dr =
                        Derivation::unary(RuleKind::ExL, seq(g2.with(y.clone()), d2.clone()), dr);
                    Ok(done(y, dl, dr))
                } else {
                    contradiction
                }
            }
            Derivation::WL(_, sub) => {
                let premise = &sub.root().antecedent;
                let next = SplitSequent::new(
                    premise.intersection(g1),
                    premise.intersection(g2),
                    d1.clone(),
                    d2.clone(),
                );
                let (branch, wrap_l, wrap_r) = match (in_g1, in_g2) {
                    (true, true) => (Branch::WLBoth, true, true),
                    (true, false) => (Branch::WLGamma1Only, true, false),
                    (false, true) => (Branch::WLGamma2Only, false, true),
                    (false, false) => {
                        self.hit(Branch::WLNeither);
                        return contradiction;
                    }
                };
                self.hit(branch);
                self.weaken(RuleKind::WL, sub, split, &next, wrap_l, wrap_r)
            }
            Derivation::WR(_, sub) => {
                let premise = &sub.root().succedent;
                let next = SplitSequent::new(
                    g1.clone(),
                    g2.clone(),
                    premise.intersection(d1),
                    premise.intersection(d2),
                );
                let (branch, wrap_l, wrap_r) = match (in_d1, in_d2) {
                    (true, true) => (Branch::WRBoth, true, true),
                    (true, false) => (Branch::WRDelta1Only, true, false),
                    (false, true) => (Branch::WRDelta2Only, false, true),
                    (false, false) => {
                        self.hit(Branch::WRNeither);
                        return contradiction;
                    }
                };
                self.hit(branch);
                self.weaken(RuleKind::WR, sub, split, &next, wrap_l, wrap_r)
            }
        }
    }

    // Four subcases, tried in order Γ1∩Δ1, Γ1∩Δ2, Γ2∩Δ1, Γ2∩Δ2.
    fn init(&mut self, split: &SplitSequent) -> Result<InterpolationResult, InterpolationError> {
        let SplitSequent {
            gamma1: g1,
            gamma2: g2,
            delta1: d1,
            delta2: d2,
        } = split;
        let shared = |g: &FormulaSet, d: &FormulaSet| g.iter().find(|a| d.contains(a)).cloned();
        if shared(g1, d1).is_some() {
            self.hit(Branch::InitGamma1Delta1);
            let c = Formula::Bot;
            return Ok(done(
                c.clone(),
                Derivation::Init(seq(g1.clone(), d1.with(c.clone()))),
                Derivation::BotL(seq(g2.with(c), d2.clone())),
            ));
        }
        if let Some(a) = shared(g1, d2) {
            self.hit(Branch::InitGamma1Delta2);
            return Ok(done(
                a.clone(),
                Derivation::Init(seq(g1.clone(), d1.with(a.clone()))),
                Derivation::Init(seq(g2.with(a), d2.clone())),
            ));
        }
        if let Some(a) = shared(g2, d1) {
            self.hit(Branch::InitGamma2Delta1);
            let c = Formula::not(a.clone());
            let dl = Derivation::unary(
                RuleKind::NotR,
                seq(g1.clone(), d1.with(c.clone())),
                Derivation::Init(seq(g1.with(a.clone()), d1.with(c.clone()))),
            );
            let dr = Derivation::unary(
                RuleKind::NotL,
                seq(g2.with(c.clone()), d2.clone()),
                Derivation::Init(seq(g2.with(c.clone()), d2.with(a))),
            );
            return Ok(done(c, dl, dr));
        }
        if shared(g2, d2).is_some() {
            self.hit(Branch::InitGamma2Delta2);
            let c = Formula::Top;
            return Ok(done(
                c.clone(),
                Derivation::TopR(seq(g1.clone(), d1.with(c.clone()))),
                Derivation::Init(seq(g2.with(c), d2.clone())),
            ));
        }
        Err(InterpolationError::Contradiction {
            kind: RuleKind::Init,
        })
    }

    // Principal formula on the left part: the left witness gets the rule.
    fn wrap_left(
        &mut self,
        kind: RuleKind,
        sub: &Derivation,
        split: &SplitSequent,
        next: &SplitSequent,
    ) -> Result<InterpolationResult, InterpolationError> {
        let inner = self.run(sub, next)?;
        let goal = split.left_goal(&inner.interpolant);
        Ok(InterpolationResult {
            left_witness: Derivation::unary(kind, goal, inner.left_witness),
            ..inner
        })
    }

    // Principal formula on the right part: the right witness gets the rule.
    fn wrap_right(
        &mut self,
        kind: RuleKind,
        sub: &Derivation,
        split: &SplitSequent,
        next: &SplitSequent,
    ) -> Result<InterpolationResult, InterpolationError> {
        let inner = self.run(sub, next)?;
        let goal = split.right_goal(&inner.interpolant);
        Ok(InterpolationResult {
            right_witness: Derivation::unary(kind, goal, inner.right_witness),
            ..inner
        })
    }

    fn weaken(
        &mut self,
        kind: RuleKind,
        sub: &Derivation,
        split: &SplitSequent,
        next: &SplitSequent,
        wrap_l: bool,
        wrap_r: bool,
    ) -> Result<InterpolationResult, InterpolationError> {
        let inner = self.run(sub, next)?;
        let c = inner.interpolant;
        let dl = if wrap_l {
            Derivation::unary(kind, split.left_goal(&c), inner.left_witness)
        } else {
            inner.left_witness
        };
        let dr = if wrap_r {
            Derivation::unary(kind, split.right_goal(&c), inner.right_witness)
        } else {
            inner.right_witness
        };
        Ok(done(c, dl, dr))
    }
}

// AndR with A∧B in Δ1, or OrL with A∨B in Γ1 (`on_left` set): C = C' ∨ C''.
// The extra component sits in Δ1 (resp. Γ1) of each branch's left witness.
fn disjoin_right_branches(
    split: &SplitSequent,
    (a, b): (&Formula, &Formula),
    on_left: bool,
    top: RuleKind,
    left: InterpolationResult,
    right: InterpolationResult,
) -> InterpolationResult {
    let SplitSequent {
        gamma1: g1,
        gamma2: g2,
        delta1: d1,
        delta2: d2,
    } = split;
    let (c1, c2) = (left.interpolant, right.interpolant);
    let c = Formula::or(c1.clone(), c2.clone());
    // (Γ1, Δ1) extended by the branch component on the proper side.
    let ctx = |x: &Formula| {
        if on_left {
            (g1.with(x.clone()), d1.clone())
        } else {
            (g1.clone(), d1.with(x.clone()))
        }
    };
    let branch = |x: &Formula, mine: &Formula, other: &Formula, w: Derivation| {
        let (g, d) = ctx(x);
        let w = Derivation::unary(
            RuleKind::WR,
            seq(g.clone(), d.with(mine.clone()).with(c.clone())),
            w,
        );
        let w = Derivation::unary(
            RuleKind::WR,
            seq(
                g.clone(),
                d.with(mine.clone()).with(c.clone()).with(other.clone()),
            ),
            w,
        );
        Derivation::unary(RuleKind::OrR, seq(g, d.with(c.clone())), w)
    };
    let dll = branch(a, &c1, &c2, left.left_witness);
    let drl = branch(b, &c2, &c1, right.left_witness);
    let dl = Derivation::binary(top, seq(g1.clone(), d1.with(c.clone())), dll, drl);

    let gc = g2.with(c.clone());
    let dlr = Derivation::unary(
        RuleKind::WL,
        seq(gc.with(c1), d2.clone()),
        left.right_witness,
    );
    let drr = Derivation::unary(
        RuleKind::WL,
        seq(gc.with(c2), d2.clone()),
        right.right_witness,
    );
    let dr = Derivation::binary(RuleKind::OrL, seq(gc, d2.clone()), dlr, drr);
    done(c, dl, dr)
}

// AndR with A∧B in Δ2, or OrL with A∨B in Γ2 (`on_left`): C = C' ∧ C''.
fn conjoin_left_branches(
    split: &SplitSequent,
    (a, b): (&Formula, &Formula),
    on_left: bool,
    top: RuleKind,
    left: InterpolationResult,
    right: InterpolationResult,
) -> InterpolationResult {
    let SplitSequent {
        gamma1: g1,
        gamma2: g2,
        delta1: d1,
        delta2: d2,
    } = split;
    let (c1, c2) = (left.interpolant, right.interpolant);
    let c = Formula::and(c1.clone(), c2.clone());

    let dll = Derivation::unary(
        RuleKind::WR,
        seq(g1.clone(), d1.with(c1.clone()).with(c.clone())),
        left.left_witness,
    );
    let drl = Derivation::unary(
        RuleKind::WR,
        seq(g1.clone(), d1.with(c2.clone()).with(c.clone())),
        right.left_witness,
    );
    let dl = Derivation::binary(
        RuleKind::AndR,
        seq(g1.clone(), d1.with(c.clone())),
        dll,
        drl,
    );

    let ctx = |x: &Formula| {
        if on_left {
            (g2.with(x.clone()), d2.clone())
        } else {
            (g2.clone(), d2.with(x.clone()))
        }
    };
    let branch = |x: &Formula, mine: &Formula, other: &Formula, w: Derivation| {
        let (g, d) = ctx(x);
        let w = Derivation::unary(
            RuleKind::WL,
            seq(g.with(mine.clone()).with(other.clone()), d.clone()),
            w,
        );
        let w = Derivation::unary(
            RuleKind::WL,
            seq(
                g.with(mine.clone()).with(other.clone()).with(c.clone()),
                d.clone(),
            ),
            w,
        );
        Derivation::unary(RuleKind::AndL, seq(g.with(c.clone()), d), w)
    };
    let dlr = branch(a, &c1, &c2, left.right_witness);
    let drr = branch(b, &c2, &c1, right.right_witness);
    let dr = Derivation::binary(top, seq(g2.with(c.clone()), d2.clone()), dlr, drr);
    done(c, dl, dr)
}

/// The eight conjuncts of the interpolation contract.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Conjunct {
    /// The left witness is wellformed.
    LeftWellformed,
    /// The right witness is wellformed.
    RightWellformed,
    /// The left witness proves `Γ1 ⊢ Δ1, C`.
    LeftRoot,
    /// The right witness proves `C, Γ2 ⊢ Δ2`.
    RightRoot,
    /// `pos C ⊆ pos Γ1 ∪ neg Δ1`.
    PosLeft,
    /// `pos C ⊆ neg Γ2 ∪ pos Δ2`.
    PosRight,
    /// `neg C ⊆ neg Γ1 ∪ pos Δ1`.
    NegLeft,
    /// `neg C ⊆ pos Γ2 ∪ neg Δ2`.
    NegRight,
}

impl Conjunct {
    pub const ALL: [Conjunct; 8] = [
        Conjunct::LeftWellformed,
        Conjunct::RightWellformed,
        Conjunct::LeftRoot,
        Conjunct::RightRoot,
        Conjunct::PosLeft,
        Conjunct::PosRight,
        Conjunct::NegLeft,
        Conjunct::NegRight,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Conjunct::LeftWellformed => "left_wellformed",
            Conjunct::RightWellformed => "right_wellformed",
            Conjunct::LeftRoot => "left_root",
            Conjunct::RightRoot => "right_root",
            Conjunct::PosLeft => "pos_left",
            Conjunct::PosRight => "pos_right",
            Conjunct::NegLeft => "neg_left",
            Conjunct::NegRight => "neg_right",
        }
    }
}

impl fmt::Display for Conjunct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of [`verify`], one entry per conjunct in [`Conjunct::ALL`] order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub entries: Vec<(Conjunct, bool)>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|&(_, ok)| ok)
    }

    pub fn get(&self, c: Conjunct) -> bool {
        self.entries
            .iter()
            .find(|(k, _)| *k == c)
            .map(|&(_, ok)| ok)
            .unwrap_or(false)
    }

    pub fn failures(&self) -> Vec<Conjunct> {
        self.entries
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|&(c, _)| c)
            .collect()
    }
}

fn union_pos(set: &FormulaSet) -> BTreeSet<PredId> {
    set.iter().flat_map(|f| polarity(f).positives).collect()
}

fn union_neg(set: &FormulaSet) -> BTreeSet<PredId> {
    set.iter().flat_map(|f| polarity(f).negatives).collect()
}

fn within(xs: &BTreeSet<PredId>, a: &BTreeSet<PredId>, b: &BTreeSet<PredId>) -> bool {
    xs.iter().all(|p| a.contains(p) || b.contains(p))
}

/// Rechecks every conjunct of the contract for `result` against `split`.
pub fn verify(split: &SplitSequent, result: &InterpolationResult) -> VerifyReport {
    let c = &result.interpolant;
    let pol = polarity(c);
    let entries = alloc::vec![
        (
            Conjunct::LeftWellformed,
            is_wellformed(&result.left_witness)
        ),
        (
            Conjunct::RightWellformed,
            is_wellformed(&result.right_witness)
        ),
        (
            Conjunct::LeftRoot,
            *result.left_witness.root() == split.left_goal(c)
        ),
        (
            Conjunct::RightRoot,
            *result.right_witness.root() == split.right_goal(c)
        ),
        (
            Conjunct::PosLeft,
            within(
                &pol.positives,
                &union_pos(&split.gamma1),
                &union_neg(&split.delta1)
            ),
        ),
        (
            Conjunct::PosRight,
            within(
                &pol.positives,
                &union_neg(&split.gamma2),
                &union_pos(&split.delta2)
            ),
        ),
        (
            Conjunct::NegLeft,
            within(
                &pol.negatives,
                &union_neg(&split.gamma1),
                &union_pos(&split.delta1)
            ),
        ),
        (
            Conjunct::NegRight,
            within(
                &pol.negatives,
                &union_pos(&split.gamma2),
                &union_neg(&split.delta2)
            ),
        ),
    ];
    VerifyReport { entries }
}

/// Removes `⊥`/`⊤` by the unit laws, bottom-up. Not part of the contract.
pub fn simplify_bool(c: &Formula) -> Formula {
    match c {
        Formula::Atom(..) | Formula::Bot | Formula::Top => c.clone(),
        Formula::And(a, b) => match (simplify_bool(a), simplify_bool(b)) {
            (Formula::Bot, _) | (_, Formula::Bot) => Formula::Bot,
            (Formula::Top, x) | (x, Formula::Top) => x,
            (x, y) => Formula::and(x, y),
        },
        Formula::Or(a, b) => match (simplify_bool(a), simplify_bool(b)) {
            (Formula::Top, _) | (_, Formula::Top) => Formula::Top,
            (Formula::Bot, x) | (x, Formula::Bot) => x,
            (x, y) => Formula::or(x, y),
        },
        Formula::Not(a) => match simplify_bool(a) {
            Formula::Top => Formula::Bot,
            Formula::Bot => Formula::Top,
            x => Formula::not(x),
        },
        Formula::FAll(a) => match simplify_bool(a) {
            k @ (Formula::Bot | Formula::Top) => k,
            x => Formula::fall(x),
        },
        Formula::FEx(a) => match simplify_bool(a) {
            k @ (Formula::Bot | Formula::Top) => k,
            x => Formula::fex(x),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::is_wellformed;

    fn p() -> Formula {
        Formula::atom(0, &[])
    }

    fn q() -> Formula {
        Formula::atom(1, &[])
    }

    fn set(xs: &[Formula]) -> FormulaSet {
        xs.iter().cloned().collect()
    }

    fn sq(a: &[Formula], s: &[Formula]) -> Sequent {
        Sequent::new(set(a), set(s))
    }

    fn split(g1: &[Formula], g2: &[Formula], d1: &[Formula], d2: &[Formula]) -> SplitSequent {
        SplitSequent::new(set(g1), set(g2), set(d1), set(d2))
    }

    fn init_p() -> Derivation {
        Derivation::Init(sq(&[p()], &[p()]))
    }

    #[test]
    fn init_gamma1_delta2() {
        let s = split(&[p()], &[], &[], &[p()]);
        let r = interpolate_strong(&init_p(), &s).unwrap();
        assert_eq!(r.interpolant, p());
        assert_eq!(r.left_witness, init_p());
        assert_eq!(r.right_witness, init_p());
        assert!(verify(&s, &r).passed());
    }

    #[test]
    fn init_gamma1_delta1() {
        let s = split(&[p()], &[], &[p()], &[]);
        let r = interpolate_strong(&init_p(), &s).unwrap();
        assert_eq!(r.interpolant, Formula::Bot);
        assert_eq!(
            r.left_witness,
            Derivation::Init(sq(&[p()], &[p(), Formula::Bot]))
        );
        assert_eq!(r.right_witness, Derivation::BotL(sq(&[Formula::Bot], &[])));
        assert!(verify(&s, &r).passed());
    }

    #[test]
    fn init_gamma2_delta2_is_top() {
        let d = Derivation::Init(sq(&[p(), q()], &[q()]));
        let s = split(&[p()], &[q()], &[], &[q()]);
        let r = interpolate_strong(&d, &s).unwrap();
        assert_eq!(r.interpolant, Formula::Top);
        assert!(verify(&s, &r).passed());
    }

    #[test]
    fn init_gamma2_delta1_is_negation() {
        let s = split(&[], &[p()], &[p()], &[]);
        let r = interpolate_strong(&init_p(), &s).unwrap();
        assert_eq!(r.interpolant, Formula::not(p()));
        assert!(verify(&s, &r).passed());
    }

    #[test]
    fn and_l_gamma1() {
        let pq = Formula::and(p(), q());
        let d = Derivation::AndL(
            sq(core::slice::from_ref(&pq), &[p()]),
            alloc::boxed::Box::new(Derivation::Init(sq(&[p(), q(), pq.clone()], &[p()]))),
        );
        let s = split(&[pq], &[], &[], &[p()]);
        let r = interpolate_strong(&d, &s).unwrap();
        assert_eq!(r.interpolant, p());
        assert_eq!(r.left_witness, d);
        assert_eq!(r.right_witness, init_p());
        assert_eq!(interpolate(&d).unwrap(), r);
    }

    #[test]
    fn bot_l_weak() {
        let d = Derivation::BotL(sq(&[Formula::Bot], &[]));
        let r = interpolate(&d).unwrap();
        assert_eq!(r.interpolant, Formula::Bot);
        assert!(verify(&SplitSequent::weak(d.root()), &r).passed());
    }

    #[test]
    fn rejects_bad_input() {
        let bad = Derivation::Init(sq(&[p()], &[q()]));
        assert!(matches!(
            interpolate(&bad),
            Err(InterpolationError::Unwellformed { .. })
        ));
        let s = split(&[q()], &[], &[], &[p()]);
        assert_eq!(
            interpolate_strong(&init_p(), &s),
            Err(InterpolationError::SplitMismatch)
        );
    }

    #[test]
    fn verify_detects_tampering() {
        let s = split(&[p()], &[], &[], &[p()]);
        let r = interpolate_strong(&init_p(), &s).unwrap();
        let report = verify(&s, &r);
        assert_eq!(report.entries.len(), 8);
        assert!(report.passed());

        let broken = InterpolationResult {
            right_witness: Derivation::Init(sq(&[p()], &[q()])),
            ..r.clone()
        };
        let report = verify(&s, &broken);
        assert!(!report.get(Conjunct::RightWellformed));
        assert!(report.get(Conjunct::LeftWellformed));

        let foreign = InterpolationResult {
            interpolant: Formula::atom(9, &[]),
            ..r
        };
        let report = verify(&s, &foreign);
        assert!(!report.get(Conjunct::PosLeft));
        assert!(!report.get(Conjunct::PosRight));
        assert!(report.get(Conjunct::NegLeft));
    }

    #[test]
    fn simplify_examples() {
        assert_eq!(
            simplify_bool(&Formula::and(Formula::Top, Formula::Bot)),
            Formula::Bot
        );
        assert_eq!(simplify_bool(&p()), p());
        assert_eq!(
            simplify_bool(&Formula::or(Formula::not(Formula::Bot), q())),
            Formula::Top
        );
        assert_eq!(
            simplify_bool(&Formula::fall(Formula::not(Formula::Top))),
            Formula::Bot
        );
        assert_eq!(simplify_bool(&Formula::and(Formula::Top, p())), p());
    }

    #[test]
    fn contradiction_branch_needs_mismatched_split() {
        // q is weakened in, but the split only covers p.
        let d = Derivation::WL(sq(&[p(), q()], &[p()]), alloc::boxed::Box::new(init_p()));
        assert!(is_wellformed(&d));
        let s = split(&[p()], &[], &[], &[p()]);
        let mut cov = Coverage::new();
        let err = interpolate_unchecked(&d, &s, &mut cov).unwrap_err();
        assert_eq!(
            err,
            InterpolationError::Contradiction { kind: RuleKind::WL }
        );
        assert_eq!(cov.hits(Branch::WLNeither), 1);
    }
}
