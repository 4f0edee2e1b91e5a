//! Ground truth for tests: truth-table semantics of the quantifier-free
//! fragment, and a seeded generator of wellformed derivations.
//!
//! Randomness comes from [`SplitMix64`], so a seed produces the same
//! derivation on every platform:
//!
//! ```text
//! state = state + 0x9E3779B97F4A7C15          (wrapping)
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9    (wrapping)
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB    (wrapping)
//! output z ^ (z >> 31)
//! ```
//!
//! A draw below `n` is `output % n`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use thiserror::Error;

use crate::calculus::{Derivation, FormulaSet, RuleKind, Sequent};
use crate::formula::{bind, free_var_set, Formula, PredId, Quantifier, VarId};
use crate::interpolation::SplitSequent;

/// Most atoms [`is_valid_sequent`] will enumerate.
pub const MAX_ATOMS: usize = 16;

/// A propositional atom: a predicate applied to fixed variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomKey {
    pub pred: PredId,
    pub args: Vec<VarId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("formula contains a quantifier")]
    Quantifier,
    #[error("no truth value assigned to atom {0:?}")]
    MissingAtom(AtomKey),
    #[error("{0} distinct atoms exceed the enumeration budget of {MAX_ATOMS}")]
    AtomBudget(usize),
}

pub type Valuation = BTreeMap<AtomKey, bool>;

pub fn eval(a: &Formula, v: &Valuation) -> Result<bool, OracleError> {
    Ok(match a {
        Formula::Atom(p, args) => {
            let key = AtomKey {
                pred: *p,
                args: args.clone(),
            };
            *v.get(&key).ok_or(OracleError::MissingAtom(key))?
        }
        Formula::Bot => false,
        Formula::Top => true,
        Formula::And(l, r) => eval(l, v)? & eval(r, v)?,
        Formula::Or(l, r) => eval(l, v)? | eval(r, v)?,
        Formula::Not(b) => !eval(b, v)?,
        Formula::FAll(_) | Formula::FEx(_) => return Err(OracleError::Quantifier),
    })
}

fn collect_atoms(a: &Formula, out: &mut BTreeSet<AtomKey>) -> Result<(), OracleError> {
    match a {
        Formula::Atom(p, args) => {
            out.insert(AtomKey {
                pred: *p,
                args: args.clone(),
            });
        }
        Formula::Bot | Formula::Top => {}
        Formula::And(l, r) | Formula::Or(l, r) => {
            collect_atoms(l, out)?;
            collect_atoms(r, out)?;
        }
        Formula::Not(b) => collect_atoms(b, out)?,
        Formula::FAll(_) | Formula::FEx(_) => return Err(OracleError::Quantifier),
    }
    Ok(())
}

/// Atoms of a quantifier-free formula.
pub fn atoms(a: &Formula) -> Result<BTreeSet<AtomKey>, OracleError> {
    let mut out = BTreeSet::new();
    collect_atoms(a, &mut out)?;
    Ok(out)
}

/// Every assignment making all of `gamma` true makes some member of
/// `delta` true.
pub fn is_valid_sequent(gamma: &FormulaSet, delta: &FormulaSet) -> Result<bool, OracleError> {
    let mut keys = BTreeSet::new();
    for f in gamma.iter().chain(delta.iter()) {
        collect_atoms(f, &mut keys)?;
    }
    if keys.len() > MAX_ATOMS {
        return Err(OracleError::AtomBudget(keys.len()));
    }
    let keys: Vec<AtomKey> = keys.into_iter().collect();
    for mask in 0u32..(1u32 << keys.len()) {
        let v: Valuation = keys
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), mask & (1 << i) != 0))
            .collect();
        let mut antecedent_holds = true;
        for f in gamma.iter() {
            if !eval(f, &v)? {
                antecedent_holds = false;
                break;
            }
        }
        if !antecedent_holds {
            continue;
        }
        let mut succedent_holds = false;
        for f in delta.iter() {
            if eval(f, &v)? {
                succedent_holds = true;
                break;
            }
        }
        if !succedent_holds {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_valid(seq: &Sequent) -> Result<bool, OracleError> {
    is_valid_sequent(&seq.antecedent, &seq.succedent)
}

/// `Γ1 ⊨ Δ1, C` and `C, Γ2 ⊨ Δ2`.
pub fn semantic_verify(split: &SplitSequent, c: &Formula) -> Result<bool, OracleError> {
    Ok(
        is_valid_sequent(&split.gamma1, &split.delta1.with(c.clone()))?
            && is_valid_sequent(&split.gamma2.with(c.clone()), &split.delta2)?,
    )
}

/// SplitMix64 pseudo-random generator.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish draw in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn index(&mut self, len: usize) -> usize {
        self.below(len as u64) as usize
    }

    /// True with probability `num / den`.
    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }
}

/// Parameters for [`gen_derivation`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GenConfig {
    /// Upper bound on the number of rule nodes, at least 1.
    pub max_nodes: usize,
    /// Predicates are drawn from `0..max_pred`.
    pub max_pred: u32,
    pub seed: u64,
    pub allow_quantifiers: bool,
}

impl GenConfig {
    pub fn propositional(seed: u64, max_nodes: usize, max_pred: u32) -> GenConfig {
        GenConfig {
            max_nodes,
            max_pred,
            seed,
            allow_quantifiers: false,
        }
    }
}

// Variables in generated atoms are drawn from 0..VAR_RANGE.
const VAR_RANGE: u64 = 3;
const MAX_FAILED_STEPS: usize = 8;

/// Generates a wellformed derivation with at most `cfg.max_nodes` nodes.
///
/// The tree is grown from a random leaf downwards. Each step picks a rule,
/// chooses its principal formula from the current root (or a fresh random
/// formula), weakens the current derivation until it has exactly the
/// premise the rule needs, and adds the rule node below it. Two-premise
/// rules generate their second branch recursively.
pub fn gen_derivation(cfg: &GenConfig) -> Derivation {
    let mut g = Generator {
        rng: SplitMix64::new(cfg.seed),
        cfg: *cfg,
    };
    g.derivation(cfg.max_nodes.max(1))
}

/// Assigns each formula of `seq` to part 1, part 2, or both, uniformly.
pub fn random_split(seq: &Sequent, seed: u64) -> SplitSequent {
    let mut rng = SplitMix64::new(seed);
    let mut split = SplitSequent::default();
    for f in seq.antecedent.iter() {
        match rng.below(3) {
            0 => {
                split.gamma1.insert(f.clone());
            }
            1 => {
                split.gamma2.insert(f.clone());
            }
            _ => {
                split.gamma1.insert(f.clone());
                split.gamma2.insert(f.clone());
            }
        }
    }
    for f in seq.succedent.iter() {
        match rng.below(3) {
            0 => {
                split.delta1.insert(f.clone());
            }
            1 => {
                split.delta2.insert(f.clone());
            }
            _ => {
                split.delta1.insert(f.clone());
                split.delta2.insert(f.clone());
            }
        }
    }
    split
}

/// Extends `d` by `WL`/`WR` steps, one formula at a time in canonical
/// order, until its root is `target`. The root of `d` must be included in
/// `target` on both sides.
pub fn weaken_to(mut d: Derivation, target: &Sequent) -> Derivation {
    let root = d.root().clone();
    debug_assert!(root.antecedent.is_subset(&target.antecedent));
    debug_assert!(root.succedent.is_subset(&target.succedent));
    let mut current = root;
    for f in target.antecedent.difference(&current.antecedent.clone()) {
        current.antecedent.insert(f);
        d = Derivation::unary(RuleKind::WL, current.clone(), d);
    }
    for f in target.succedent.difference(&current.succedent.clone()) {
        current.succedent.insert(f);
        d = Derivation::unary(RuleKind::WR, current.clone(), d);
    }
    d
}

struct Generator {
    rng: SplitMix64,
    cfg: GenConfig,
}

#[derive(Clone, Copy)]
enum Step {
    AndL,
    AndR,
    OrL,
    OrR,
    NotL,
    NotR,
    WL,
    WR,
    AllL,
    AllR,
    ExL,
    ExR,
}

const PROPOSITIONAL_STEPS: [Step; 8] = [
    Step::AndL,
    Step::AndR,
    Step::OrL,
    Step::OrR,
    Step::NotL,
    Step::NotR,
    Step::WL,
    Step::WR,
];

const QUANTIFIER_STEPS: [Step; 4] = [Step::AllL, Step::AllR, Step::ExL, Step::ExR];

impl Generator {
    fn derivation(&mut self, budget: usize) -> Derivation {
        let target = 1 + self.rng.index(budget);
        let mut d = self.leaf();
        let mut failures = 0;
        while d.size() < target && failures < MAX_FAILED_STEPS {
            match self.step(&d, budget) {
                Some(next) if next.size() <= budget => d = next,
                _ => failures += 1,
            }
        }
        d
    }

    fn var(&mut self) -> VarId {
        VarId(self.rng.below(VAR_RANGE) as u32)
    }

    fn atom(&mut self) -> Formula {
        let pred = PredId(self.rng.below(u64::from(self.cfg.max_pred.max(1))) as u32);
        let args = if self.cfg.allow_quantifiers && self.rng.chance(1, 2) {
            alloc::vec![self.var()]
        } else {
            Vec::new()
        };
        Formula::Atom(pred, args)
    }

    fn formula(&mut self, depth: u32) -> Formula {
        if depth == 0 {
            return match self.rng.below(12) {
                0 => Formula::Bot,
                1 => Formula::Top,
                _ => self.atom(),
            };
        }
        match self.rng.below(5) {
            0 => Formula::and(self.formula(depth - 1), self.formula(depth - 1)),
            1 => Formula::or(self.formula(depth - 1), self.formula(depth - 1)),
            2 => Formula::not(self.formula(depth - 1)),
            _ => self.atom(),
        }
    }

    fn pick(&mut self, side: &FormulaSet) -> Formula {
        if !side.is_empty() && self.rng.chance(3, 4) {
            side.as_slice()[self.rng.index(side.len())].clone()
        } else {
            self.formula(1)
        }
    }

    fn extras(&mut self, into: &mut FormulaSet) {
        for _ in 0..self.rng.below(3) {
            into.insert(self.atom());
        }
    }

    fn leaf(&mut self) -> Derivation {
        let mut gamma = FormulaSet::new();
        let mut delta = FormulaSet::new();
        self.extras(&mut gamma);
        self.extras(&mut delta);
        match self.rng.below(20) {
            0..=13 => {
                let p = self.atom();
                gamma.insert(p.clone());
                delta.insert(p);
                Derivation::Init(Sequent::new(gamma, delta))
            }
            14..=16 => {
                gamma.insert(Formula::Bot);
                Derivation::BotL(Sequent::new(gamma, delta))
            }
            _ => {
                delta.insert(Formula::Top);
                Derivation::TopR(Sequent::new(gamma, delta))
            }
        }
    }

    fn step(&mut self, d: &Derivation, budget: usize) -> Option<Derivation> {
        let n = PROPOSITIONAL_STEPS.len()
            + if self.cfg.allow_quantifiers {
                QUANTIFIER_STEPS.len()
            } else {
                0
            };
        let i = self.rng.index(n);
        let step = if i < PROPOSITIONAL_STEPS.len() {
            PROPOSITIONAL_STEPS[i]
        } else {
            QUANTIFIER_STEPS[i - PROPOSITIONAL_STEPS.len()]
        };
        let Sequent {
            antecedent: gamma,
            succedent: delta,
        } = d.root().clone();
        let d = d.clone();
        match step {
            Step::AndL | Step::OrR => {
                let left = matches!(step, Step::AndL);
                let side = if left { &gamma } else { &delta };
                let a = self.pick(side);
                let b = self.pick(side);
                let p = if left {
                    Formula::and(a.clone(), b.clone())
                } else {
                    Formula::or(a.clone(), b.clone())
                };
                let mut concl_side = side.with(p);
                if self.rng.chance(1, 2) {
                    concl_side.remove(&a);
                }
                if self.rng.chance(1, 2) {
                    concl_side.remove(&b);
                }
                let premise_side = concl_side.with(a).with(b);
                let (kind, concl, premise) = if left {
                    (
                        RuleKind::AndL,
                        Sequent::new(concl_side, delta.clone()),
                        Sequent::new(premise_side, delta),
                    )
                } else {
                    (
                        RuleKind::OrR,
                        Sequent::new(gamma.clone(), concl_side),
                        Sequent::new(gamma, premise_side),
                    )
                };
                Some(Derivation::unary(kind, concl, weaken_to(d, &premise)))
            }
            Step::NotL => {
                let a = self.pick(&delta);
                let mut concl_delta = delta.clone();
                if self.rng.chance(1, 2) {
                    concl_delta.remove(&a);
                }
                let concl_gamma = gamma.with(Formula::not(a.clone()));
                let premise = Sequent::new(concl_gamma.clone(), concl_delta.with(a));
                Some(Derivation::unary(
                    RuleKind::NotL,
                    Sequent::new(concl_gamma, concl_delta),
                    weaken_to(d, &premise),
                ))
            }
            Step::NotR => {
                let a = self.pick(&gamma);
                let mut concl_gamma = gamma.clone();
                if self.rng.chance(1, 2) {
                    concl_gamma.remove(&a);
                }
                let concl_delta = delta.with(Formula::not(a.clone()));
                let premise = Sequent::new(concl_gamma.with(a), concl_delta.clone());
                Some(Derivation::unary(
                    RuleKind::NotR,
                    Sequent::new(concl_gamma, concl_delta),
                    weaken_to(d, &premise),
                ))
            }
            Step::WL => {
                let x = if self.rng.chance(1, 3) {
                    self.pick(&delta)
                } else {
                    self.formula(1)
                };
                Some(Derivation::unary(
                    RuleKind::WL,
                    Sequent::new(gamma.with(x), delta),
                    d,
                ))
            }
            Step::WR => {
                let x = if self.rng.chance(1, 3) {
                    self.pick(&gamma)
                } else {
                    self.formula(1)
                };
                Some(Derivation::unary(
                    RuleKind::WR,
                    Sequent::new(gamma, delta.with(x)),
                    d,
                ))
            }
            Step::AndR | Step::OrL => {
                let used = d.size() + 1;
                if used >= budget {
                    return None;
                }
                let sibling = self.derivation(((budget - used) / 2).max(1));
                let right_root = sibling.root().clone();
                let left = matches!(step, Step::OrL);
                let (mine, theirs) = if left {
                    (&gamma, &right_root.antecedent)
                } else {
                    (&delta, &right_root.succedent)
                };
                let a = self.pick(mine);
                let b = self.pick(theirs);
                let p = if left {
                    Formula::or(a.clone(), b.clone())
                } else {
                    Formula::and(a.clone(), b.clone())
                };
                let mut concl_side = mine.union(theirs).with(p);
                if !theirs.contains(&a) && self.rng.chance(1, 2) {
                    concl_side.remove(&a);
                }
                if !mine.contains(&b) && b != a && self.rng.chance(1, 2) {
                    concl_side.remove(&b);
                }
                let (kind, concl) = if left {
                    (
                        RuleKind::OrL,
                        Sequent::new(concl_side.clone(), delta.union(&right_root.succedent)),
                    )
                } else {
                    (
                        RuleKind::AndR,
                        Sequent::new(gamma.union(&right_root.antecedent), concl_side.clone()),
                    )
                };
                let extend = |x: Formula| {
                    if left {
                        Sequent::new(concl.antecedent.with(x), concl.succedent.clone())
                    } else {
                        Sequent::new(concl.antecedent.clone(), concl.succedent.with(x))
                    }
                };
                let l = weaken_to(d, &extend(a));
                let r = weaken_to(sibling, &extend(b));
                Some(Derivation::binary(kind, concl, l, r))
            }
            Step::AllL | Step::ExR => {
                let left = matches!(step, Step::AllL);
                let q = if left {
                    Quantifier::All
                } else {
                    Quantifier::Ex
                };
                let side = if left { &gamma } else { &delta };
                let e = self.single_var_body(side);
                let vars: Vec<VarId> = free_var_set(&e).into_iter().collect();
                let t = match vars.first() {
                    Some(&v) if self.rng.chance(3, 4) => v,
                    _ => self.var(),
                };
                let quantified = bind(q, t, &e);
                let mut concl_side = side.with(quantified);
                if self.rng.chance(1, 2) {
                    concl_side.remove(&e);
                }
                let premise_side = concl_side.with(e);
                let (kind, concl, premise) = if left {
                    (
                        RuleKind::AllL,
                        Sequent::new(concl_side, delta.clone()),
                        Sequent::new(premise_side, delta),
                    )
                } else {
                    (
                        RuleKind::ExR,
                        Sequent::new(gamma.clone(), concl_side),
                        Sequent::new(gamma, premise_side),
                    )
                };
                Some(Derivation::unary(kind, concl, weaken_to(d, &premise)))
            }
            Step::AllR | Step::ExL => {
                let left = matches!(step, Step::ExL);
                let q = if left {
                    Quantifier::Ex
                } else {
                    Quantifier::All
                };
                let side = if left { &gamma } else { &delta };
                let e = self.single_var_body(side);
                let a = match free_var_set(&e).into_iter().next() {
                    Some(v) => v,
                    None => self.var(),
                };
                let quantified = bind(q, a, &e);
                let mut concl_side = side.clone();
                concl_side.remove(&e);
                concl_side.insert(quantified);
                let concl = if left {
                    Sequent::new(concl_side.clone(), delta.clone())
                } else {
                    Sequent::new(gamma.clone(), concl_side.clone())
                };
                if concl.free_vars().contains(&a) {
                    return None;
                }
                let premise = if left {
                    Sequent::new(concl_side.with(e), delta)
                } else {
                    Sequent::new(gamma, concl_side.with(e))
                };
                let kind = if left { RuleKind::ExL } else { RuleKind::AllR };
                Some(Derivation::unary(kind, concl, weaken_to(d, &premise)))
            }
        }
    }

    // A formula from `side` with at most one free variable, or a fresh atom.
    fn single_var_body(&mut self, side: &FormulaSet) -> Formula {
        let e = self.pick(side);
        if free_var_set(&e).len() <= 1 {
            e
        } else {
            self.atom()
        }
    }
}
