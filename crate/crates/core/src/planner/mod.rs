//! Planners: the generic lifted elimination loop and the complete strategies
//! for 2-logvar models and for models whose atoms have at most one logvar.

pub mod generic;
pub mod steps;
pub mod trace;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::ground::{weighted_ve, GroundFactor, GroundModel};
use crate::model::{Arg, GroundAtom, Model};
use crate::ops::joint::AtomClass;
use crate::ops::{absorb_evidence, shatter};
use crate::scalar::Scalar;

pub use trace::{PlanTrace, Step};

use steps::Work;

/// A ground query with ground evidence. Without a target the answer is the
/// partition function alone.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Query {
    pub target: Option<GroundAtom>,
    pub evidence: Vec<(GroundAtom, String)>,
}

impl Query {
    pub fn partition() -> Self {
        Query::default()
    }

    pub fn of(target: GroundAtom) -> Self {
        Query { target: Some(target), evidence: Vec::new() }
    }

    pub fn anchors(&self) -> Vec<GroundAtom> {
        self.target.iter().cloned().chain(self.evidence.iter().map(|(a, _)| a.clone())).collect()
    }

    /// Checks the query against the model's vocabulary and resolves evidence
    /// values to range indices.
    pub fn resolve<T: Scalar>(&self, model: &Model<T>) -> Result<Vec<(GroundAtom, usize)>> {
        let check = |a: &GroundAtom| -> Result<()> {
            let p = model.vocab.predicate(&a.pred)?;
            if p.arity != a.args.len() {
                return Err(Error::Arity(format!("{a} has {} arguments, expected {}", a.args.len(), p.arity)));
            }
            for c in &a.args {
                if !model.vocab.domains.values().any(|d| d.contains(c)) {
                    return Err(Error::Declaration(format!("constant {c} is not declared")));
                }
            }
            Ok(())
        };
        if let Some(t) = &self.target {
            check(t)?;
            if self.evidence.iter().any(|(a, _)| a == t) {
                return Err(Error::Domain(format!("query atom {t} is also evidence")));
            }
        }
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for (a, v) in &self.evidence {
            check(a)?;
            if !seen.insert(a.clone()) {
                return Err(Error::Domain(format!("duplicate evidence for {a}")));
            }
            let idx = model
                .vocab
                .predicate(&a.pred)?
                .range_index(v)
                .ok_or_else(|| Error::Domain(format!("{v} is not in the range of {}", a.pred)))?;
            out.push((a.clone(), idx));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    Generic,
    TwoLogvar,
    OneLogvarAtoms,
}

/// Strategy requested by the caller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    Auto,
    TwoLogvar,
    OneLogvarAtoms,
    Generic,
    Ground,
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => Strategy::Auto,
            "two-logvar" => Strategy::TwoLogvar,
            "one-logvar-atoms" => Strategy::OneLogvarAtoms,
            "generic" => Strategy::Generic,
            "ground" => Strategy::Ground,
            _ => return Err(Error::Domain(format!("unknown strategy {s}"))),
        })
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Auto => "auto",
            Strategy::TwoLogvar => "two-logvar",
            Strategy::OneLogvarAtoms => "one-logvar-atoms",
            Strategy::Generic => "generic",
            Strategy::Ground => "ground",
        })
    }
}

impl From<StrategyKind> for Strategy {
    fn from(k: StrategyKind) -> Self {
        match k {
            StrategyKind::Generic => Strategy::Generic,
            StrategyKind::TwoLogvar => Strategy::TwoLogvar,
            StrategyKind::OneLogvarAtoms => Strategy::OneLogvarAtoms,
        }
    }
}

/// Most specific complete strategy for the model.
pub fn classify<T: Scalar>(m: &Model<T>) -> StrategyKind {
    if m.has_counting() {
        return StrategyKind::Generic;
    }
    let atoms = || m.parfactors.iter().flat_map(|p| p.args.iter().map(Arg::atom));
    if atoms().all(|a| AtomClass::of(a).logvar_count() <= 1) {
        StrategyKind::OneLogvarAtoms
    } else if m.max_logvars() <= 2 {
        StrategyKind::TwoLogvar
    } else {
        StrategyKind::Generic
    }
}

/// Shatters against query and evidence and clamps evidence.
pub fn prepare<T: Scalar>(m: &Model<T>, q: &Query) -> Result<Model<T>> {
    let evidence = q.resolve(m)?;
    let mut s = shatter(m, &q.anchors())?;
    for pf in &mut s.parfactors {
        for (a, v) in &evidence {
            *pf = absorb_evidence(pf, a, *v);
        }
    }
    Ok(s)
}

fn with_work<T: Scalar>(
    m: &Model<T>,
    q: &Query,
    cap: usize,
    body: impl FnOnce(&mut Work<'_, T>) -> Result<GroundFactor<T>>,
) -> Result<(GroundFactor<T>, PlanTrace)> {
    let mut trace = PlanTrace::default();
    let t0 = Instant::now();
    let model = prepare(m, q)?;
    trace.record("shatter", format!("{} parfactors", model.parfactors.len()), 0, 0, 0, t0.elapsed());
    let mut w = Work { model, keep: q.target.clone(), trace: &mut trace, cap };
    let f = body(&mut w)?;
    Ok((f, trace))
}

/// The constructive 2-logvar strategy: 2-logvar atoms by group inversion,
/// then 1-logvar atoms by conversions, then ground elimination.
pub fn run_two_logvar<T: Scalar>(m: &Model<T>, q: &Query, cap: usize) -> Result<(GroundFactor<T>, PlanTrace)> {
    if m.has_counting() || m.max_logvars() > 2 {
        return Err(Error::not_applicable("the model is not a 2-logvar model"));
    }
    with_work(m, q, cap, |w| {
        steps::eliminate_two_logvar_atoms(w)?;
        steps::eliminate_one_logvar_atoms(w)?;
        steps::finish(w)
    })
}

/// The strategy for models whose atoms have at most one logvar.
pub fn run_one_logvar_atoms<T: Scalar>(m: &Model<T>, q: &Query, cap: usize) -> Result<(GroundFactor<T>, PlanTrace)> {
    if classify(m) != StrategyKind::OneLogvarAtoms {
        return Err(Error::not_applicable("some atom has more than one logvar"));
    }
    with_work(m, q, cap, |w| {
        steps::eliminate_one_logvar_atoms(w)?;
        steps::finish(w)
    })
}

pub fn run_generic<T: Scalar>(m: &Model<T>, q: &Query, cap: usize) -> Result<(GroundFactor<T>, PlanTrace)> {
    with_work(m, q, cap, generic::run)
}

/// Grounds the whole model and eliminates propositionally.
pub fn run_ground<T: Scalar>(m: &Model<T>, q: &Query, cap: usize) -> Result<(GroundFactor<T>, PlanTrace)> {
    let evidence = q.resolve(m)?;
    let t0 = Instant::now();
    let mut total: u128 = 0;
    for pf in &m.parfactors {
        total += crate::grounding::count_groundings(&m.vocab, &pf.logvars, &pf.constraint)?;
    }
    if total > cap as u128 {
        return Err(Error::Capacity(format!("grounding needs {total} factors")));
    }
    let gm = GroundModel::from_model(m, cap)?;
    let mut factors = gm.factors;
    for f in &mut factors {
        for (a, v) in &evidence {
            while let Some(i) = f.args.iter().position(|x| x == a) {
                f.potential = f.potential.slice(i, *v);
                f.args.remove(i);
            }
        }
    }
    let mut ranges = gm.ranges;
    for (a, _) in &evidence {
        ranges.remove(a);
    }
    let keep = q.target.iter().filter(|t| ranges.contains_key(*t)).cloned().collect();
    let (f, stats) = weighted_ve(&factors, &ranges, &Default::default(), &keep, cap)?;
    let mut trace = PlanTrace::default();
    trace.record("ground_ve", format!("{} factors", factors.len()), f.args.len(), stats.max_cells, stats.muladds, t0.elapsed());
    Ok((f, trace))
}

/// Result of a query.
#[derive(Debug, Clone, PartialEq)]
pub struct Answer<T = f64> {
    /// Log of the unnormalized mass consistent with the evidence.
    pub ln_z: T,
    /// Normalized distribution over the target's range, if there is a target.
    pub marginal: Option<(GroundAtom, Vec<T>)>,
    pub strategy: Strategy,
    pub trace: PlanTrace,
}

impl<T: Scalar> Answer<T> {
    pub fn z(&self) -> T {
        self.ln_z.exp()
    }
}

/// Runs `strategy` and normalizes. `Auto` picks the classified strategy and
/// falls back to the generic loop, then to grounding, when a lifted strategy
/// does not apply or exceeds its limits.
pub fn marginal<T: Scalar>(m: &Model<T>, q: &Query, strategy: Strategy, cap: usize) -> Result<Answer<T>> {
    q.resolve(m)?;
    let (run, (f, trace)) = match strategy {
        Strategy::Auto => {
            let kind: Strategy = classify(m).into();
            let mut chain = vec![kind];
            if kind != Strategy::Generic {
                chain.push(Strategy::Generic);
            }
            chain.push(Strategy::Ground);
            let mut found = None;
            for s in chain {
                match run_strategy(m, q, s, cap) {
                    Ok(r) => {
                        found = Some((s, r));
                        break;
                    }
                    // Lifted limits defer to grounding, which enforces `cap` itself.
                    Err(Error::NotApplicable(_) | Error::Capacity(_)) if s != Strategy::Ground => {}
                    Err(e) => return Err(e),
                }
            }
            found.ok_or_else(|| Error::internal("ground strategy returned no result"))?
        }
        s => (s, run_strategy(m, q, s, cap)?),
    };
    let ln_z = f.potential.ln_total();
    let marginal = match &q.target {
        None => None,
        Some(t) => {
            if ln_z == T::neg_infinity() {
                return Err(Error::Undefined(format!("marginal of {t} under zero total weight")));
            }
            let r = m.vocab.range_size(&t.pred)?;
            let probs = match f.args.iter().position(|a| a == t) {
                Some(_) => f.potential.ln_values().iter().map(|&v| (v - ln_z).exp()).collect(),
                None => vec![T::one() / T::of(r as f64); r],
            };
            Some((t.clone(), probs))
        }
    };
    Ok(Answer { ln_z, marginal, strategy: run, trace })
}

fn run_strategy<T: Scalar>(m: &Model<T>, q: &Query, s: Strategy, cap: usize) -> Result<(GroundFactor<T>, PlanTrace)> {
    match s {
        Strategy::TwoLogvar => run_two_logvar(m, q, cap),
        Strategy::OneLogvarAtoms => run_one_logvar_atoms(m, q, cap),
        Strategy::Generic => run_generic(m, q, cap),
        Strategy::Ground => run_ground(m, q, cap),
        Strategy::Auto => Err(Error::internal("auto is resolved by the caller")),
    }
}

/// `ln Z` of a model, lifted when possible.
pub fn ln_partition<T: Scalar>(m: &Model<T>, cap: usize) -> Result<T> {
    Ok(marginal(m, &Query::partition(), Strategy::Auto, cap)?.ln_z)
}
