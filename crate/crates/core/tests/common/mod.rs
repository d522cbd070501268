//! Shared generators and ground-level checks for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;

use liftedve::ground::{self, Factor, GroundModel};
use liftedve::model::{Arg, Atom, Constraint, GroundAtom, LogVar, Model, Parfactor, Predicate, Term, Vocab};
use liftedve::potential::Potential;
use liftedve::scalar::ln_close;
use liftedve::Result;

pub const CAP: usize = 1 << 22;
pub const VARS: [&str; 3] = ["X", "Y", "Z"];

/// Domain `D = {d1..dn}` with unary `P`, `Q`, binary `F` and ternary-arity
/// `T`; ranges are boolean or of size three.
pub fn vocab<R: Rng>(rng: &mut R, n: usize) -> Vocab {
    let mut v = Vocab::new();
    v.add_sized_domain("D", "d", n).unwrap();
    for (name, arity) in [("P", 1), ("Q", 1), ("F", 2), ("T", 3)] {
        let range: &[&str] = if arity < 3 && rng.gen_bool(0.4) { &["r0", "r1", "r2"] } else { &["false", "true"] };
        v.add_predicate(Predicate::new(name, arity, range)).unwrap();
    }
    v
}

pub fn random_values<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| if rng.gen_bool(0.03) { 0.0 } else { rng.gen_range(0.1..2.0) }).collect()
}

/// A term over the first `k` logvars, or the constant `d1`.
pub fn random_term<R: Rng>(rng: &mut R, k: usize) -> Term {
    if k == 0 || rng.gen_bool(0.12) {
        Term::constant("d1")
    } else {
        Term::var(VARS[rng.gen_range(0..k)])
    }
}

pub fn atom(pred: &str, args: &[&str]) -> Atom {
    Atom::parse_simple(pred, args, &VARS)
}

/// Random inequalities among the first `k` logvars.
pub fn random_constraint<R: Rng>(rng: &mut R, k: usize, p_pair: f64) -> Constraint {
    let mut c = Constraint::new();
    for (i, x) in VARS[..k].iter().enumerate() {
        for y in &VARS[i + 1..k] {
            if rng.gen_bool(p_pair) {
                c.add(x, Term::var(*y)).unwrap();
            }
        }
        if rng.gen_bool(0.1) {
            c.add(x, Term::constant("d2")).unwrap();
        }
    }
    c
}

pub fn logvars(k: usize) -> Vec<LogVar> {
    VARS[..k].iter().map(|v| LogVar::new(*v, "D")).collect()
}

/// Parfactor over `args` with random values.
pub fn with_random_potential<R: Rng>(rng: &mut R, vocab: &Vocab, lvs: Vec<LogVar>, c: Constraint, args: Vec<Arg>) -> Option<Parfactor> {
    let shape = vocab.shape(&args).ok()?;
    let len = shape.iter().product();
    let pot = Potential::from_values(shape, random_values(rng, len)).ok()?;
    let pf = Parfactor::new(lvs, c, args, pot);
    pf.validate(vocab).ok()?;
    Some(pf)
}

/// Random atom parfactor with up to three logvars and three atoms, no `T`.
pub fn random_parfactor<R: Rng>(rng: &mut R, vocab: &Vocab) -> Option<Parfactor> {
    let k = rng.gen_range(1..=3);
    let c = random_constraint(rng, k, 0.5);
    let mut args: Vec<Arg> = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let pred = *["P", "Q", "F", "F"].choose(rng).unwrap();
        let arity = vocab.predicate(pred).unwrap().arity;
        let a = Atom::new(pred, (0..arity).map(|_| random_term(rng, k)).collect());
        let a = Arg::Atom(a);
        if !args.contains(&a) {
            args.push(a);
        }
    }
    with_random_potential(rng, vocab, logvars(k), c, args)
}

pub fn model_of(vocab: &Vocab, pfs: Vec<Parfactor>) -> Model {
    let mut m = Model::new(vocab.clone());
    m.parfactors = pfs;
    m
}

fn ln_eval(gm: &GroundModel, x: &BTreeMap<GroundAtom, usize>) -> f64 {
    gm.factors
        .iter()
        .map(|f| {
            let idx: Vec<usize> = f.args.iter().map(|a| x[a]).collect();
            f.potential.ln_at(&idx)
        })
        .sum()
}

fn ln_z_given(gm: &GroundModel, x: &BTreeMap<GroundAtom, usize>) -> Result<f64> {
    let mut factors: Vec<Factor<GroundAtom, f64>> = gm.factors.clone();
    for f in &mut factors {
        let mut i = 0;
        while i < f.args.len() {
            match x.get(&f.args[i]) {
                Some(&v) => {
                    f.potential = f.potential.slice(i, v);
                    f.args.remove(i);
                }
                None => i += 1,
            }
        }
    }
    let ranges: BTreeMap<GroundAtom, usize> =
        gm.ranges.iter().filter(|(a, _)| !x.contains_key(*a)).map(|(a, r)| (a.clone(), *r)).collect();
    let (f, _) = ground::weighted_ve(&factors, &ranges, &BTreeMap::new(), &BTreeSet::new(), CAP)?;
    Ok(f.potential.ln_total())
}

/// Outcome of comparing a lifted result with its input at the ground level.
#[derive(Debug)]
pub enum Check {
    Equal,
    Differ(String),
    /// The ground oracle exceeded its cap.
    TooLarge,
}

/// Checks that the grounding of `output` is the marginal of the grounding of
/// `input` over the output's randvars: equal partition functions and equal
/// unnormalized values at `samples` random assignments.
pub fn ground_equivalent<R: Rng>(rng: &mut R, input: &Model, output: &Model, samples: usize, tol: f64) -> Check {
    let run = |rng: &mut R| -> Result<Check> {
        let gi = GroundModel::from_model(input, CAP)?;
        let go = GroundModel::from_model(output, CAP)?;
        for (a, r) in &go.ranges {
            if gi.ranges.get(a) != Some(r) {
                return Ok(Check::Differ(format!("output randvar {a} is not an input randvar")));
            }
        }
        let zi = ground::ln_partition(&gi, CAP)?;
        let zo = ground::ln_partition(&go, CAP)?;
        if !ln_close(zi, zo, tol) {
            return Ok(Check::Differ(format!("ln Z {zi} vs {zo}")));
        }
        for _ in 0..samples {
            let x: BTreeMap<GroundAtom, usize> = go.ranges.iter().map(|(a, &r)| (a.clone(), rng.gen_range(0..r))).collect();
            let (li, lo) = (ln_z_given(&gi, &x)?, ln_eval(&go, &x));
            if !ln_close(li, lo, tol) {
                return Ok(Check::Differ(format!("at {x:?}: {li} vs {lo}")));
            }
        }
        Ok(Check::Equal)
    };
    match run(rng) {
        Ok(c) => c,
        Err(liftedve::Error::Capacity(_)) => Check::TooLarge,
        Err(e) => Check::Differ(format!("oracle error: {e}")),
    }
}
