//! Weighted model counting models and their translation into parfactors.

use std::collections::BTreeMap;

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::ground::GroundModel;
use crate::grounding::gr_substitutions;
use crate::model::{Arg, Atom, Constraint, GroundAtom, LogVar, Model, Parfactor, Term, Vocab};
use crate::potential::Potential;
use crate::scalar::{rel_close, Scalar};

/// Domain size used when a WMC file declares no domain.
pub const DEFAULT_DOMAIN_SIZE: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

/// `l1 v l2 v ... | C` over `logvars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub logvars: Vec<LogVar>,
    pub literals: Vec<Literal>,
    pub constraint: Constraint,
}

/// Constrained clauses with a probability-like weight per predicate: a true
/// randvar contributes `w`, a false one `1 - w`.
#[derive(Debug, Clone, PartialEq)]
pub struct WmcModel {
    pub vocab: Vocab,
    /// Argument domains per predicate.
    pub signatures: IndexMap<String, Vec<String>>,
    pub weights: IndexMap<String, f64>,
    pub clauses: Vec<Clause>,
}

impl WmcModel {
    /// Checks weights, ranges and that every clause predicate is weighted.
    pub fn validate(&self) -> Result<()> {
        for (p, w) in &self.weights {
            if !(0.0..=1.0).contains(w) {
                return Err(Error::Domain(format!("weight of {p} is {w}, outside [0,1]")));
            }
        }
        for (name, p) in &self.vocab.predicates {
            if p.range.len() != 2 {
                return Err(Error::Range(format!("predicate {name} is not boolean")));
            }
            if !self.weights.contains_key(name) {
                return Err(Error::Declaration(format!("predicate {name} has no weight")));
            }
            if !self.signatures.contains_key(name) {
                return Err(Error::Declaration(format!("predicate {name} has no signature")));
            }
        }
        for c in &self.clauses {
            if c.literals.is_empty() {
                return Err(Error::Domain("empty clause".into()));
            }
            for l in &c.literals {
                let sig = self.signatures.get(&l.atom.pred).ok_or_else(|| {
                    Error::Declaration(format!("predicate {} is not declared", l.atom.pred))
                })?;
                if sig.len() != l.atom.args.len() {
                    return Err(Error::Arity(format!("{} has arity {}", l.atom, sig.len())));
                }
            }
        }
        Ok(())
    }

    /// Copy with every domain replaced by `n` constants, keeping mentioned ones.
    pub fn resized(&self, n: usize) -> Result<WmcModel> {
        let probe: Model = Model::new(self.vocab.clone())
            .with_parfactors(self.clauses.iter().map(clause_skeleton).collect());
        let vocab = probe.resized(n)?.vocab;
        Ok(WmcModel { vocab, ..self.clone() })
    }

    fn randvars(&self) -> Result<Vec<GroundAtom>> {
        let mut out = Vec::new();
        for (pred, sig) in &self.signatures {
            let lvs: Vec<LogVar> =
                sig.iter().enumerate().map(|(i, d)| LogVar::new(format!("X{i}"), d.clone())).collect();
            for theta in gr_substitutions(&self.vocab, &lvs, &Constraint::new())? {
                let args: Vec<&str> =
                    lvs.iter().map(|l| theta[&l.name].as_const().expect("ground")).collect();
                out.push(GroundAtom::new(pred.clone(), &args));
            }
        }
        Ok(out)
    }
}

/// A constant-table parfactor carrying only the clause's logvars and atoms;
/// used to reuse model-level domain handling.
fn clause_skeleton(c: &Clause) -> Parfactor {
    let mut args: Vec<Arg> = Vec::new();
    for l in &c.literals {
        let a = Arg::Atom(l.atom.clone());
        if !args.contains(&a) {
            args.push(a);
        }
    }
    let shape = vec![2; args.len()];
    Parfactor::new(c.logvars.clone(), c.constraint.clone(), args, Potential::ones(shape))
}

/// One weight parfactor per predicate, then one 0/1 clause parfactor per
/// clause. Identical atoms within a clause share an argument.
pub fn import_wmc<T: Scalar>(w: &WmcModel) -> Result<Model<T>> {
    w.validate()?;
    let mut m = Model::new(w.vocab.clone());
    for (pred, sig) in &w.signatures {
        let lvs: Vec<LogVar> =
            sig.iter().enumerate().map(|(i, d)| LogVar::new(format!("X{}", i + 1), d.clone())).collect();
        let atom = Atom::new(pred.clone(), lvs.iter().map(|l| Term::var(l.name.clone())).collect());
        let wt = w.weights[pred];
        m.push(Parfactor::from_atoms(&m.vocab, lvs, Constraint::new(), vec![atom], &[1.0 - wt, wt])?)?;
    }
    for c in &w.clauses {
        let skel = clause_skeleton(c);
        let atoms: Vec<&Atom> = skel.args.iter().map(Arg::atom).collect();
        let lits: Vec<(usize, bool)> = c
            .literals
            .iter()
            .map(|l| (atoms.iter().position(|a| **a == l.atom).expect("present"), l.positive))
            .collect();
        let potential = Potential::build(vec![2; atoms.len()], |idx| {
            if lits.iter().any(|&(i, pos)| (idx[i] == 1) == pos) {
                T::zero()
            } else {
                T::neg_infinity()
            }
        })?;
        let pf = Parfactor::new(c.logvars.clone(), c.constraint.clone(), skel.args, potential);
        pf.validate(&m.vocab)?;
        m.push(pf)?;
    }
    let clause_max = w.clauses.iter().map(|c| c.logvars.len()).max().unwrap_or(0);
    let weight_max = w.signatures.values().map(Vec::len).max().unwrap_or(0);
    if m.max_logvars() != clause_max.max(weight_max) {
        return Err(Error::internal("import changed the logvar count"));
    }
    Ok(m)
}

/// `Z` and `P(atom = true)` of a WMC model by direct enumeration.
pub fn wmc_enumerate(w: &WmcModel, cap: usize) -> Result<(f64, BTreeMap<GroundAtom, f64>)> {
    let rvs = w.randvars()?;
    let index: BTreeMap<&GroundAtom, usize> = rvs.iter().enumerate().map(|(i, a)| (a, i)).collect();
    if rvs.len() >= 63 || (1u64 << rvs.len()) > cap as u64 {
        return Err(Error::Capacity(format!("{} randvars exceed the enumeration cap", rvs.len())));
    }
    let mut ground: Vec<Vec<(usize, bool)>> = Vec::new();
    for c in &w.clauses {
        for theta in gr_substitutions(&w.vocab, &c.logvars, &c.constraint)? {
            let lits = c
                .literals
                .iter()
                .map(|l| {
                    let g = l.atom.substitute(&theta).to_ground().expect("ground");
                    (index[&g], l.positive)
                })
                .collect();
            ground.push(lits);
        }
    }
    let wts: Vec<f64> = rvs.iter().map(|a| w.weights[&a.pred]).collect();
    let mut z = 0.0;
    let mut on = vec![0.0; rvs.len()];
    for bits in 0u64..(1u64 << rvs.len()) {
        let val = |i: usize| bits >> i & 1 == 1;
        if !ground.iter().all(|cl| cl.iter().any(|&(i, pos)| val(i) == pos)) {
            continue;
        }
        let p: f64 = (0..rvs.len()).map(|i| if val(i) { wts[i] } else { 1.0 - wts[i] }).product();
        z += p;
        for (i, acc) in on.iter_mut().enumerate() {
            if val(i) {
                *acc += p;
            }
        }
    }
    let marg = rvs.into_iter().zip(on).map(|(a, v)| (a, if z > 0.0 { v / z } else { 0.0 })).collect();
    Ok((z, marg))
}

/// `Z` and `P(atom = true)` of a boolean parfactor model by enumerating its
/// ground instance.
pub fn model_enumerate<T: Scalar>(m: &Model<T>, cap: usize) -> Result<(f64, BTreeMap<GroundAtom, f64>)> {
    let gm = GroundModel::from_model(m, cap)?;
    let rvs: Vec<GroundAtom> = gm.randvars().into_iter().collect();
    if rvs.len() >= 63 || (1u64 << rvs.len()) > cap as u64 {
        return Err(Error::Capacity(format!("{} randvars exceed the enumeration cap", rvs.len())));
    }
    let index: BTreeMap<&GroundAtom, usize> = rvs.iter().enumerate().map(|(i, a)| (a, i)).collect();
    let factors: Vec<(Vec<usize>, &Potential<T>)> =
        gm.factors.iter().map(|f| (f.args.iter().map(|a| index[a]).collect(), &f.potential)).collect();
    let mut z = 0.0;
    let mut on = vec![0.0; rvs.len()];
    let mut idx = Vec::new();
    for bits in 0u64..(1u64 << rvs.len()) {
        let mut p = 1.0;
        for (vars, pot) in &factors {
            idx.clear();
            idx.extend(vars.iter().map(|&i| (bits >> i & 1) as usize));
            p *= pot.value_at(&idx).to_f64_lossy();
        }
        z += p;
        for (i, acc) in on.iter_mut().enumerate() {
            if bits >> i & 1 == 1 {
                *acc += p;
            }
        }
    }
    let marg = rvs.into_iter().zip(on).map(|(a, v)| (a, if z > 0.0 { v / z } else { 0.0 })).collect();
    Ok((z, marg))
}

/// Whether `m` and `w`, both at domain size `n`, agree on `Z` and on every
/// randvar marginal within relative tolerance `tol`.
pub fn check_equivalence<T: Scalar>(w: &WmcModel, m: &Model<T>, n: usize, tol: f64, cap: usize) -> Result<bool> {
    let (zw, mw) = wmc_enumerate(&w.resized(n)?, cap)?;
    let (zm, mm) = model_enumerate(&m.resized(n)?, cap)?;
    if !rel_close(zw, zm, tol) {
        return Ok(false);
    }
    if zw == 0.0 {
        return Ok(true);
    }
    Ok(mw.len() == mm.len()
        && mw.iter().all(|(a, p)| mm.get(a).is_some_and(|q| (p - q).abs() <= tol.max(tol * p.abs()))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Predicate;

    fn example() -> WmcModel {
        let mut vocab = Vocab::new();
        vocab.add_sized_domain("D", "d", 2).unwrap();
        vocab.add_predicate(Predicate::boolean("P", 1)).unwrap();
        vocab.add_predicate(Predicate::boolean("Q", 1)).unwrap();
        let sig = IndexMap::from([("P".to_string(), vec!["D".to_string()]), ("Q".to_string(), vec!["D".to_string()])]);
        let clause = Clause {
            logvars: vec![LogVar::new("X", "D"), LogVar::new("Y", "D")],
            literals: vec![
                Literal { positive: false, atom: Atom::parse_simple("P", &["X"], &["X"]) },
                Literal { positive: true, atom: Atom::parse_simple("Q", &["Y"], &["Y"]) },
            ],
            constraint: Constraint::all_distinct(&["X", "Y"]),
        };
        WmcModel {
            vocab,
            signatures: sig,
            weights: IndexMap::from([("P".to_string(), 0.3), ("Q".to_string(), 0.6)]),
            clauses: vec![clause],
        }
    }

    #[test]
    fn example_tables() {
        let m: Model = import_wmc(&example()).unwrap();
        assert_eq!(m.parfactors.len(), 3);
        let vals: Vec<Vec<f64>> = m.parfactors.iter().map(|p| p.potential.values()).collect();
        assert!(rel_close(vals[0][0], 0.7, 1e-12) && rel_close(vals[0][1], 0.3, 1e-12));
        assert!(rel_close(vals[1][0], 0.4, 1e-12) && rel_close(vals[1][1], 0.6, 1e-12));
        assert_eq!(vals[2], vec![1.0, 1.0, 0.0, 1.0]);
        for n in [2, 3] {
            assert!(check_equivalence(&example(), &m, n, 1e-9, 1 << 20).unwrap());
        }
    }

    #[test]
    fn no_clauses_gives_one() {
        let mut w = example();
        w.clauses.clear();
        let m: Model = import_wmc(&w).unwrap();
        let (z, _) = model_enumerate(&m, 1 << 20).unwrap();
        assert!(rel_close(z, 1.0, 1e-12));
    }

    #[test]
    fn bad_weight_is_rejected() {
        let mut w = example();
        w.weights["P"] = 1.5;
        assert!(matches!(import_wmc::<f64>(&w), Err(Error::Domain(_))));
    }

    #[test]
    fn unsatisfiable_is_zero_on_both_sides() {
        let mut w = example();
        let lit = |positive| Literal { positive, atom: Atom::parse_simple("P", &["X"], &["X"]) };
        let lv = vec![LogVar::new("X", "D")];
        w.clauses.push(Clause { logvars: lv.clone(), literals: vec![lit(true)], constraint: Constraint::new() });
        w.clauses.push(Clause { logvars: lv, literals: vec![lit(false)], constraint: Constraint::new() });
        let m: Model = import_wmc(&w).unwrap();
        assert_eq!(wmc_enumerate(&w, 1 << 20).unwrap().0, 0.0);
        assert!(check_equivalence(&w, &m, 2, 1e-9, 1 << 20).unwrap());
    }
}
