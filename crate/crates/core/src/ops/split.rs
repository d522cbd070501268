//! Splitting, normal form, shattering and evidence absorption.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::grounding::count_groundings;
use crate::model::{Arg, GroundAtom, Model, Parfactor, Substitution, Term, Vocab};
use crate::ops::prv::{compare, Prv, Relation};
use crate::scalar::Scalar;

/// Merges arguments that denote the same randvar (or the same counting
/// formula) into one axis by diagonalization.
pub fn simplify<T: Scalar>(mut pf: Parfactor<T>) -> Result<Parfactor<T>> {
    'outer: loop {
        for i in 0..pf.args.len() {
            for j in i + 1..pf.args.len() {
                if pf.args[i].same_as(&pf.args[j]) {
                    pf.potential = pf.potential.diagonal(i, j)?;
                    pf.args.remove(j);
                    continue 'outer;
                }
            }
        }
        return Ok(pf);
    }
}

/// Case split of `pf` on `var = term`: the substituted branch (omitted when
/// inconsistent with the constraint) followed by the residual branch with
/// `var != term` added (omitted when it has no groundings).
pub fn split<T: Scalar>(vocab: &Vocab, pf: &Parfactor<T>, var: &str, term: &Term) -> Result<Vec<Parfactor<T>>> {
    let lv = pf
        .logvar(var)
        .ok_or_else(|| Error::Declaration(format!("{var} is not a logvar of the parfactor")))?
        .clone();
    match term {
        Term::Const(c) => {
            if !vocab.domain(&lv.domain)?.contains(c) {
                return Err(Error::Domain(format!("{c} is not in domain {}", lv.domain)));
            }
        }
        Term::Var(y) => {
            let other = pf
                .logvar(y)
                .ok_or_else(|| Error::Declaration(format!("{y} is not a logvar of the parfactor")))?;
            if other.domain != lv.domain || y == var {
                return Err(Error::Domain(format!("cannot split {var} on {y}")));
            }
        }
    }
    if pf.constraint.contains(var, term) {
        return Ok(vec![pf.clone()]);
    }
    let mut out = Vec::new();
    let theta = Substitution::from([(var.to_string(), term.clone())]);
    if let Some(constraint) = pf.constraint.substitute(&theta) {
        let sub = Parfactor {
            logvars: pf.logvars.iter().filter(|l| l.name != var).cloned().collect(),
            constraint,
            args: pf.args.iter().map(|a| a.substitute(&theta)).collect(),
            potential: pf.potential.clone(),
            scale: pf.scale,
        };
        if count_groundings(vocab, &sub.logvars, &sub.constraint)? > 0 {
            out.push(simplify(sub)?);
        }
    }
    let mut rest = pf.clone();
    rest.constraint.add(var, term.clone())?;
    if count_groundings(vocab, &rest.logvars, &rest.constraint)? > 0 {
        out.push(rest);
    }
    Ok(out)
}

/// A split that brings `pf` closer to normal form: logvars sharing an
/// argument are constrained unequal, and logvars constrained unequal exclude
/// the same constants.
pub fn normal_form_split<T: Scalar>(pf: &Parfactor<T>) -> Option<(String, Term)> {
    for arg in &pf.args {
        let vars: Vec<&str> = arg.free_vars().into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        for (k, x) in vars.iter().enumerate() {
            for y in &vars[k + 1..] {
                let same_domain = pf.logvar(x).map(|l| &l.domain) == pf.logvar(y).map(|l| &l.domain);
                if same_domain && !pf.constraint.differ(x, y) {
                    return Some((x.to_string(), Term::var(*y)));
                }
            }
        }
    }
    for lv in &pf.logvars {
        let ex = pf.constraint.excluded_constants(&lv.name);
        for y in pf.constraint.neighbors(&lv.name) {
            let ey = pf.constraint.excluded_constants(&y);
            if let Some(c) = ex.difference(&ey).next() {
                return Some((y, Term::constant(c.clone())));
            }
        }
    }
    None
}

/// Splits until every pair of PRVs in the model, and every PRV against every
/// anchor, is identical or disjoint, and every parfactor is in normal form.
/// Parfactors without groundings are dropped.
pub fn shatter<T: Scalar>(model: &Model<T>, anchors: &[GroundAtom]) -> Result<Model<T>> {
    let vocab = &model.vocab;
    let mut pfs: Vec<Parfactor<T>> = Vec::new();
    for pf in &model.parfactors {
        if count_groundings(vocab, &pf.logvars, &pf.constraint)? > 0 {
            pfs.push(simplify(pf.clone())?);
        }
    }
    let anchor_prvs: Vec<Prv> = anchors.iter().map(Prv::ground).collect();
    loop {
        let Some((p, var, term)) = next_split(vocab, &pfs, &anchor_prvs)? else {
            return Ok(model.with_parfactors(pfs));
        };
        let parts = split(vocab, &pfs[p], &var, &term)?;
        pfs.splice(p..=p, parts);
    }
}

fn next_split<T: Scalar>(vocab: &Vocab, pfs: &[Parfactor<T>], anchors: &[Prv]) -> Result<Option<(usize, String, Term)>> {
    for (p, pf) in pfs.iter().enumerate() {
        if let Some((v, t)) = normal_form_split(pf) {
            return Ok(Some((p, v, t)));
        }
    }
    let prvs: Vec<(usize, Prv)> = pfs
        .iter()
        .enumerate()
        .flat_map(|(p, pf)| (0..pf.args.len()).map(move |i| (p, Prv::of_arg(pf, i))))
        .collect();
    for (k, (p, a)) in prvs.iter().enumerate() {
        for anchor in anchors {
            if let Relation::SplitLeft(v, t) = compare(vocab, a, anchor)? {
                return Ok(Some((*p, v, t)));
            }
        }
        for (q, b) in &prvs[k + 1..] {
            match compare(vocab, a, b)? {
                Relation::SplitLeft(v, t) => return Ok(Some((*p, v, t))),
                Relation::SplitRight(v, t) => return Ok(Some((*q, v, t))),
                _ => {}
            }
        }
    }
    Ok(None)
}

/// Clamps every argument equal to `atom` to the observed range index.
pub fn absorb_evidence<T: Scalar>(pf: &Parfactor<T>, atom: &GroundAtom, value: usize) -> Parfactor<T> {
    let target = Arg::Atom(atom.to_atom());
    let mut out = pf.clone();
    while let Some(i) = out.args.iter().position(|a| *a == target) {
        out.potential = out.potential.slice(i, value);
        out.args.remove(i);
    }
    out
}
