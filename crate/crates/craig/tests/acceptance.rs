//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use craig::{
    parse_derivation, parse_formula, parse_problem, parse_result, print_derivation, print_formula,
};
use craig_core::calculus::{is_wellformed, Derivation, FormulaSet, RuleKind, Sequent};
use craig_core::formula::{bind, neg, pos, Formula, PredId, Quantifier, VarId};
use craig_core::interpolation::{
    interpolate_strong_traced, interpolate_unchecked, simplify_bool, Branch, Coverage,
    InterpolationError,
};
use craig_core::oracle::{
    gen_derivation, is_valid, random_split, semantic_verify, weaken_to, GenConfig, SplitMix64,
};
use craig_core::{interpolate_strong, verify, SplitSequent};

const CORPUS_SIZE: u64 = 1000;
const SPLITS_PER_DERIVATION: u64 = 3;
const CORPUS_MAX_NODES: usize = 12;
const CORPUS_MAX_PRED: u32 = 4;
const TIME_LIMIT: Duration = Duration::from_secs(60);
const INIT_TIME_LIMIT: Duration = Duration::from_secs(1);
const DISJOINT_INSTANCES: u64 = 200;
const CLASSICAL_BRANCHES: usize = 32;
const ROUND_TRIP_FORMULAS: u64 = 10_000;
const ROUND_TRIP_DEPTH: u32 = 6;
const FUZZ_INPUTS: u64 = 100_000;

type Outcome = Result<String, String>;

fn set(xs: &[Formula]) -> FormulaSet {
    xs.iter().cloned().collect()
}

fn seq(a: &[Formula], s: &[Formula]) -> Sequent {
    Sequent::new(set(a), set(s))
}

fn split(g1: &[Formula], g2: &[Formula], d1: &[Formula], d2: &[Formula]) -> SplitSequent {
    SplitSequent::new(set(g1), set(g2), set(d1), set(d2))
}

fn p(n: u32) -> Formula {
    Formula::atom(n, &[])
}

fn corpus() -> Vec<(GenConfig, Derivation)> {
    (0..CORPUS_SIZE)
        .map(|seed| {
            let cfg = GenConfig::propositional(seed, CORPUS_MAX_NODES, CORPUS_MAX_PRED);
            (cfg, gen_derivation(&cfg))
        })
        .collect()
}

fn corpus_splits(seed: u64, d: &Derivation) -> impl Iterator<Item = SplitSequent> + '_ {
    (0..SPLITS_PER_DERIVATION)
        .map(move |k| random_split(d.root(), seed * SPLITS_PER_DERIVATION + k + 1))
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    if t < limit {
        Ok(t)
    } else {
        Err(format!("took {t:?}, limit {limit:?}"))
    }
}

// 1. The four Init subcases against hand-written witnesses. Each split
// shares formulas only within the subcase under test.
fn init_suite(cov: &mut Coverage) -> Outcome {
    let start = Instant::now();
    let a = p(0);
    let q = p(1);
    let r = p(2);
    let g1 = [a.clone(), q.clone()];
    let g2 = [a.clone(), r.clone()];
    let d1 = [a.clone(), r.clone()];
    let d2 = [a.clone(), q.clone()];
    let not_a = Formula::not(a.clone());
    // (name, split, C, dl, dr)
    let cases = [
        (
            "Γ1∩Δ1",
            split(&g1, std::slice::from_ref(&r), &d1, &[]),
            Formula::Bot,
            Derivation::Init(seq(&g1, &[a.clone(), r.clone(), Formula::Bot])),
            Derivation::BotL(seq(&[Formula::Bot, r.clone()], &[])),
        ),
        (
            "Γ1∩Δ2",
            split(&g1, &[], &[], &d2),
            a.clone(),
            Derivation::Init(seq(&g1, std::slice::from_ref(&a))),
            Derivation::Init(seq(std::slice::from_ref(&a), &d2)),
        ),
        (
            "Γ2∩Δ1",
            split(&[], &g2, &d1, &[]),
            not_a.clone(),
            Derivation::unary(
                RuleKind::NotR,
                seq(&[], &[a.clone(), r.clone(), not_a.clone()]),
                Derivation::Init(seq(
                    std::slice::from_ref(&a),
                    &[a.clone(), r.clone(), not_a.clone()],
                )),
            ),
            Derivation::unary(
                RuleKind::NotL,
                seq(&[not_a.clone(), a.clone(), r.clone()], &[]),
                Derivation::Init(seq(
                    &[not_a.clone(), a.clone(), r.clone()],
                    std::slice::from_ref(&a),
                )),
            ),
        ),
        (
            "Γ2∩Δ2",
            split(std::slice::from_ref(&q), &g2, &[], std::slice::from_ref(&a)),
            Formula::Top,
            Derivation::TopR(seq(std::slice::from_ref(&q), &[Formula::Top])),
            Derivation::Init(seq(
                &[Formula::Top, a.clone(), r.clone()],
                std::slice::from_ref(&a),
            )),
        ),
    ];
    for (name, s, c, dl, dr) in cases {
        let d = Derivation::Init(s.sequent());
        let res = interpolate_strong_traced(&d, &s, cov).map_err(|e| format!("{name}: {e}"))?;
        if res.interpolant != c {
            return Err(format!(
                "{name}: C = {}, expected {}",
                print_formula(&res.interpolant),
                print_formula(&c)
            ));
        }
        if res.left_witness != dl {
            return Err(format!(
                "{name}: dl = {}",
                print_derivation(&res.left_witness)
            ));
        }
        if res.right_witness != dr {
            return Err(format!(
                "{name}: dr = {}",
                print_derivation(&res.right_witness)
            ));
        }
        if !verify(&s, &res).passed() {
            return Err(format!("{name}: verify failed"));
        }
    }
    let t = within(start, INIT_TIME_LIMIT)?;
    Ok(format!("4/4 subcases exact, {t:?}"))
}

// 2. All eight conjuncts on the generated corpus.
fn contract(corpus: &[(GenConfig, Derivation)], cov: &mut Coverage) -> Outcome {
    let start = Instant::now();
    let mut n = 0;
    for (cfg, d) in corpus {
        for s in corpus_splits(cfg.seed, d) {
            let r = interpolate_strong_traced(d, &s, cov)
                .map_err(|e| format!("seed {}: {e}", cfg.seed))?;
            let report = verify(&s, &r);
            if !report.passed() {
                return Err(format!("seed {}: {:?}", cfg.seed, report.failures()));
            }
            n += 1;
        }
    }
    let t = within(start, TIME_LIMIT)?;
    Ok(format!("{n}/{n} instances pass all 8 conjuncts, {t:?}"))
}

// 3. Truth-table check of both interpolant sequents.
fn semantic(corpus: &[(GenConfig, Derivation)]) -> Outcome {
    let start = Instant::now();
    let mut n = 0;
    for (cfg, d) in corpus {
        for s in corpus_splits(cfg.seed, d) {
            let r = interpolate_strong(d, &s).map_err(|e| format!("seed {}: {e}", cfg.seed))?;
            match semantic_verify(&s, &r.interpolant) {
                Ok(true) => n += 1,
                Ok(false) => {
                    return Err(format!(
                        "seed {}: C = {} not valid",
                        cfg.seed,
                        print_formula(&r.interpolant)
                    ))
                }
                Err(e) => return Err(format!("seed {}: {e}", cfg.seed)),
            }
        }
    }
    let t = within(start, TIME_LIMIT)?;
    Ok(format!("{n}/{n} instances semantically valid, {t:?}"))
}

fn shift_preds(a: &Formula, k: u32) -> Formula {
    match a {
        Formula::Atom(PredId(n), args) => Formula::Atom(PredId(n + k), args.clone()),
        Formula::Bot | Formula::Top => a.clone(),
        Formula::And(l, r) => Formula::and(shift_preds(l, k), shift_preds(r, k)),
        Formula::Or(l, r) => Formula::or(shift_preds(l, k), shift_preds(r, k)),
        Formula::Not(b) => Formula::not(shift_preds(b, k)),
        Formula::FAll(b) => Formula::fall(shift_preds(b, k)),
        Formula::FEx(b) => Formula::fex(shift_preds(b, k)),
    }
}

fn shift_set(s: &FormulaSet, k: u32) -> FormulaSet {
    s.iter().map(|f| shift_preds(f, k)).collect()
}

fn shift_derivation(d: &Derivation, k: u32) -> Derivation {
    let root = d.root();
    let s = Sequent::new(
        shift_set(&root.antecedent, k),
        shift_set(&root.succedent, k),
    );
    let subs = d
        .premises()
        .into_iter()
        .map(|p| shift_derivation(p, k))
        .collect();
    Derivation::from_parts(d.kind(), s, subs).expect("same arity")
}

// 4. Two derivations over disjoint predicates, one weakened by the other's
// root. The interpolant mentions no predicate and collapses to a constant.
fn disjoint(cov: &mut Coverage) -> Outcome {
    let half = CORPUS_MAX_PRED / 2;
    let (mut bots, mut tops) = (0, 0);
    for seed in 0..DISJOINT_INSTANCES {
        let left = gen_derivation(&GenConfig::propositional(2 * seed, 6, half));
        let right = shift_derivation(
            &gen_derivation(&GenConfig::propositional(2 * seed + 1, 6, half)),
            half,
        );
        let (l, r) = (left.root().clone(), right.root().clone());
        let s = SplitSequent::new(
            l.antecedent.clone(),
            r.antecedent.clone(),
            l.succedent.clone(),
            r.succedent.clone(),
        );
        let target = s.sequent();
        let d = if seed % 2 == 0 {
            weaken_to(left, &target)
        } else {
            weaken_to(right, &target)
        };
        if !is_wellformed(&d) {
            return Err(format!("seed {seed}: joined derivation not wellformed"));
        }
        let res =
            interpolate_strong_traced(&d, &s, cov).map_err(|e| format!("seed {seed}: {e}"))?;
        if !verify(&s, &res).passed() {
            return Err(format!("seed {seed}: verify failed"));
        }
        let c = &res.interpolant;
        if !pos(c).is_empty() || !neg(c).is_empty() {
            return Err(format!(
                "seed {seed}: C = {} mentions predicates",
                print_formula(c)
            ));
        }
        match simplify_bool(c) {
            Formula::Bot => bots += 1,
            Formula::Top => tops += 1,
            other => {
                return Err(format!(
                    "seed {seed}: simplifies to {}",
                    print_formula(&other)
                ))
            }
        }
    }
    Ok(format!(
        "{}/{} collapse ({bots} to bot, {tops} to top)",
        bots + tops,
        DISJOINT_INSTANCES
    ))
}

// 5. One fixture per quantifier rule and side. Each ends in the rule under
// test above a short derivation whose interpolant C' is known.
fn quantifiers(cov: &mut Coverage) -> Outcome {
    let px = |v: u32| Formula::atom(0, &[v]);
    let all = bind(Quantifier::All, VarId(1), &px(1));
    let ex = bind(Quantifier::Ex, VarId(1), &px(1));
    let inst = px(1);
    let not_inst = Formula::not(inst.clone());

    // ∀L and ∃R: C = C'.
    let all_l = Derivation::unary(
        RuleKind::AllL,
        seq(std::slice::from_ref(&all), std::slice::from_ref(&inst)),
        Derivation::Init(seq(
            &[all.clone(), inst.clone()],
            std::slice::from_ref(&inst),
        )),
    );
    let ex_r = Derivation::unary(
        RuleKind::ExR,
        seq(std::slice::from_ref(&inst), std::slice::from_ref(&ex)),
        Derivation::Init(seq(
            std::slice::from_ref(&inst),
            &[ex.clone(), inst.clone()],
        )),
    );
    // ∀R over ∀L, and ∃L over ∃R, with eigenvariable x1.
    let all_r = Derivation::unary(
        RuleKind::AllR,
        seq(std::slice::from_ref(&all), std::slice::from_ref(&all)),
        Derivation::unary(
            RuleKind::AllL,
            seq(std::slice::from_ref(&all), &[all.clone(), inst.clone()]),
            Derivation::Init(seq(
                &[all.clone(), inst.clone()],
                &[all.clone(), inst.clone()],
            )),
        ),
    );
    let ex_l = Derivation::unary(
        RuleKind::ExL,
        seq(std::slice::from_ref(&ex), std::slice::from_ref(&ex)),
        Derivation::unary(
            RuleKind::ExR,
            seq(&[ex.clone(), inst.clone()], std::slice::from_ref(&ex)),
            Derivation::Init(seq(
                &[ex.clone(), inst.clone()],
                &[ex.clone(), inst.clone()],
            )),
        ),
    );
    let a = VarId(1);
    let cases = [
        (
            "∀L in Γ1",
            &all_l,
            split(
                std::slice::from_ref(&all),
                &[],
                &[],
                std::slice::from_ref(&inst),
            ),
            inst.clone(),
        ),
        (
            "∀L in Γ2",
            &all_l,
            split(
                &[],
                std::slice::from_ref(&all),
                std::slice::from_ref(&inst),
                &[],
            ),
            not_inst.clone(),
        ),
        (
            "∃R in Δ1",
            &ex_r,
            split(
                &[],
                std::slice::from_ref(&inst),
                std::slice::from_ref(&ex),
                &[],
            ),
            not_inst.clone(),
        ),
        (
            "∃R in Δ2",
            &ex_r,
            split(
                std::slice::from_ref(&inst),
                &[],
                &[],
                std::slice::from_ref(&ex),
            ),
            inst.clone(),
        ),
        (
            "∀R in Δ1",
            &all_r,
            split(
                &[],
                std::slice::from_ref(&all),
                std::slice::from_ref(&all),
                &[],
            ),
            bind(Quantifier::Ex, a, &not_inst),
        ),
        (
            "∀R in Δ2",
            &all_r,
            split(
                std::slice::from_ref(&all),
                &[],
                &[],
                std::slice::from_ref(&all),
            ),
            bind(Quantifier::All, a, &inst),
        ),
        (
            "∃L in Γ1",
            &ex_l,
            split(
                std::slice::from_ref(&ex),
                &[],
                &[],
                std::slice::from_ref(&ex),
            ),
            bind(Quantifier::Ex, a, &inst),
        ),
        (
            "∃L in Γ2",
            &ex_l,
            split(
                &[],
                std::slice::from_ref(&ex),
                std::slice::from_ref(&ex),
                &[],
            ),
            bind(Quantifier::All, a, &not_inst),
        ),
    ];
    for (name, d, s, expected) in cases {
        if !is_wellformed(d) {
            return Err(format!("{name}: fixture not wellformed"));
        }
        let res = interpolate_strong_traced(d, &s, cov).map_err(|e| format!("{name}: {e}"))?;
        if res.interpolant != expected {
            return Err(format!(
                "{name}: C = {}, expected {}",
                print_formula(&res.interpolant),
                print_formula(&expected)
            ));
        }
        let report = verify(&s, &res);
        if !report.passed() {
            return Err(format!("{name}: {:?}", report.failures()));
        }
    }
    Ok("8/8 fixtures match".into())
}

// 6. Branch counters over everything above plus a quantifier corpus. The two
// contradiction branches only fire when the split does not cover the root,
// so they are driven through the unchecked entry point.
fn coverage(mut cov: Coverage) -> Outcome {
    for seed in 0..CORPUS_SIZE {
        let cfg = GenConfig {
            max_nodes: CORPUS_MAX_NODES,
            max_pred: CORPUS_MAX_PRED,
            seed,
            allow_quantifiers: true,
        };
        let d = gen_derivation(&cfg);
        for s in corpus_splits(seed, &d) {
            interpolate_strong_traced(&d, &s, &mut cov).map_err(|e| format!("seed {seed}: {e}"))?;
        }
    }
    let q = p(1);
    let wl = Derivation::unary(
        RuleKind::WL,
        seq(std::slice::from_ref(&q), std::slice::from_ref(&q)),
        Derivation::Init(seq(&[], std::slice::from_ref(&q))),
    );
    let wr = Derivation::unary(
        RuleKind::WR,
        seq(std::slice::from_ref(&q), std::slice::from_ref(&q)),
        Derivation::Init(seq(std::slice::from_ref(&q), &[])),
    );
    for (d, kind) in [(wl, RuleKind::WL), (wr, RuleKind::WR)] {
        let s = split(&[], &[], &[], &[]);
        match interpolate_unchecked(&d, &s, &mut cov) {
            Err(InterpolationError::Contradiction { kind: k }) if k == kind => {}
            other => return Err(format!("{kind} outside split: {other:?}")),
        }
    }
    let missing: Vec<Branch> = cov
        .missing()
        .into_iter()
        .filter(|b| b.is_classical())
        .collect();
    let hit = Branch::ALL.iter().filter(|b| b.is_classical()).count() - missing.len();
    if hit == CLASSICAL_BRANCHES && missing.is_empty() {
        Ok(format!("{hit}/{CLASSICAL_BRANCHES} branches hit"))
    } else {
        Err(format!(
            "{hit}/{CLASSICAL_BRANCHES} branches hit, missing {missing:?}"
        ))
    }
}

// 7. Every wellformed corpus derivation has a valid root.
fn soundness(corpus: &[(GenConfig, Derivation)]) -> Outcome {
    let mut n = 0;
    for (cfg, d) in corpus {
        if !is_wellformed(d) {
            return Err(format!(
                "seed {}: generator produced an unwellformed derivation",
                cfg.seed
            ));
        }
        match is_valid(d.root()) {
            Ok(true) => n += 1,
            Ok(false) => return Err(format!("seed {}: wellformed but invalid root", cfg.seed)),
            Err(e) => return Err(format!("seed {}: {e}", cfg.seed)),
        }
    }
    Ok(format!("{n}/{n} wellformed derivations have valid roots"))
}

fn random_formula(rng: &mut SplitMix64, depth: u32) -> Formula {
    let leaf = depth == 0 || rng.chance(1, 4);
    if leaf {
        return match rng.below(6) {
            0 => Formula::Bot,
            1 => Formula::Top,
            _ => {
                let args: Vec<u32> = (0..rng.below(3)).map(|_| rng.below(5) as u32).collect();
                Formula::atom(rng.below(4) as u32, &args)
            }
        };
    }
    match rng.below(5) {
        0 => Formula::and(
            random_formula(rng, depth - 1),
            random_formula(rng, depth - 1),
        ),
        1 => Formula::or(
            random_formula(rng, depth - 1),
            random_formula(rng, depth - 1),
        ),
        2 => Formula::not(random_formula(rng, depth - 1)),
        3 => Formula::fall(random_formula(rng, depth - 1)),
        _ => Formula::fex(random_formula(rng, depth - 1)),
    }
}

const FRAGMENTS: &[&str] = &[
    "(",
    ")",
    "[",
    "]",
    ";",
    ",",
    ".",
    "&",
    "|",
    "~",
    "=>",
    ":",
    " ",
    "\n",
    "\r\n",
    "bot",
    "top",
    "P0",
    "P1",
    "x0",
    "x3",
    "forall",
    "exists",
    "Init",
    "AndR",
    "WL",
    "gamma1:",
    "derivation:",
    "interpolant:",
    "left:",
    "P99999999999",
    "#",
    "\u{3b5}",
    "=",
];

fn fuzz_input(rng: &mut SplitMix64) -> Vec<u8> {
    let len = rng.below(40) as usize;
    if rng.chance(1, 2) {
        (0..len).map(|_| rng.below(256) as u8).collect()
    } else {
        (0..len)
            .flat_map(|_| FRAGMENTS[rng.index(FRAGMENTS.len())].bytes())
            .collect()
    }
}

// 8. Printer/parser round trips and crash-freedom on arbitrary bytes.
fn round_trips(corpus: &[(GenConfig, Derivation)]) -> Outcome {
    let mut rng = SplitMix64::new(8);
    for i in 0..ROUND_TRIP_FORMULAS {
        let a = random_formula(&mut rng, ROUND_TRIP_DEPTH);
        let text = print_formula(&a);
        if parse_formula(&text).as_ref() != Ok(&a) {
            return Err(format!("formula {i}: {text}"));
        }
    }
    for (cfg, d) in corpus {
        let text = print_derivation(d);
        if parse_derivation(&text).as_ref() != Ok(d) {
            return Err(format!("derivation seed {}", cfg.seed));
        }
    }
    let mut rng = SplitMix64::new(88);
    let (mut values, mut errors) = (0u64, 0u64);
    let hook = std::panic::take_hook();
    std::panic::set_hook(Box::new(|_| {}));
    for i in 0..FUZZ_INPUTS {
        let bytes = fuzz_input(&mut rng);
        let outcome = catch_unwind(AssertUnwindSafe(|| {
            let text = match craig::syntax::decode(&bytes) {
                Ok(t) => t.to_string(),
                Err(_) => String::from_utf8_lossy(&bytes).into_owned(),
            };
            [
                parse_formula(&text).is_ok(),
                parse_derivation(&text).is_ok(),
                parse_problem(&text).is_ok(),
                parse_result(&text).is_ok(),
            ]
        }));
        match outcome {
            Ok(oks) => {
                values += oks.iter().filter(|&&ok| ok).count() as u64;
                errors += oks.iter().filter(|&&ok| !ok).count() as u64;
            }
            Err(_) => {
                std::panic::set_hook(hook);
                return Err(format!("parser panicked on fuzz input {i}: {bytes:?}"));
            }
        }
    }
    std::panic::set_hook(hook);
    Ok(format!(
        "{ROUND_TRIP_FORMULAS} formulas and {} derivations round-trip; {FUZZ_INPUTS} fuzz inputs, 0 crashes ({values} values, {errors} errors)",
        corpus.len()
    ))
}

fn main() {
    let corpus = corpus();
    let mut cov = Coverage::new();
    let results: Vec<(&str, Outcome)> = vec![
        ("init suite", init_suite(&mut cov)),
        ("contract on generated corpus", contract(&corpus, &mut cov)),
        ("semantic oracle", semantic(&corpus)),
        ("disjoint-language collapse", disjoint(&mut cov)),
        ("quantifier cases", quantifiers(&mut cov)),
        ("case coverage", coverage(cov)),
        ("checker soundness", soundness(&corpus)),
        ("round trips and fuzzing", round_trips(&corpus)),
    ];

    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria pass",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
