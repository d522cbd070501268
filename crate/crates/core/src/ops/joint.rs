//! Relabeling of atom classes and joint conversion of predicates.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{Arg, Atom, Model, Parfactor, Predicate, Term};
use crate::ops::prv::{compare, Prv, Relation};
use crate::ops::split::simplify;
use crate::scalar::Scalar;

/// Argument pattern of an atom: constants kept, logvars numbered by first
/// occurrence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Const(String),
    Var(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomClass {
    pub pred: String,
    pub pattern: Vec<Slot>,
}

impl AtomClass {
    pub fn of(atom: &Atom) -> AtomClass {
        let mut seen: Vec<&str> = Vec::new();
        let pattern = atom
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => Slot::Const(c.clone()),
                Term::Var(v) => Slot::Var(match seen.iter().position(|s| s == v) {
                    Some(k) => k,
                    None => {
                        seen.push(v);
                        seen.len() - 1
                    }
                }),
            })
            .collect();
        AtomClass { pred: atom.pred.clone(), pattern }
    }

    pub fn logvar_count(&self) -> usize {
        self.pattern.iter().filter_map(|s| if let Slot::Var(k) = s { Some(k + 1) } else { None }).max().unwrap_or(0)
    }

    /// Whether the pattern is `P(v0, v1, ..)` with no constants or repeats.
    pub fn is_plain(&self) -> bool {
        self.pattern.iter().enumerate().all(|(i, s)| *s == Slot::Var(i))
    }

    /// The distinct logvars of a member atom, in first-occurrence order.
    fn distinct_vars(atom: &Atom) -> Vec<Term> {
        let mut out: Vec<Term> = Vec::new();
        for t in &atom.args {
            if matches!(t, Term::Var(_)) && !out.contains(t) {
                out.push(t.clone());
            }
        }
        out
    }
}

fn map_atoms<T: Scalar>(pf: &Parfactor<T>, mut f: impl FnMut(&Atom) -> Option<Atom>) -> Parfactor<T> {
    let mut out = pf.clone();
    for arg in &mut out.args {
        match arg {
            Arg::Atom(a) => {
                if let Some(b) = f(a) {
                    *a = b;
                }
            }
            Arg::Count(cf) => {
                if let Some(b) = f(&cf.atom) {
                    cf.atom = b;
                }
            }
        }
    }
    out
}

/// Replaces every atom of `class` by an atom of a fresh predicate over its
/// distinct logvars. The class must be disjoint from all other atoms of the
/// same predicate (true in a shattered model). Returns the new name.
pub fn relabel<T: Scalar>(model: &Model<T>, class: &AtomClass, base: &str) -> Result<(Model<T>, String)> {
    let pfs = &model.parfactors;
    let mut members = Vec::new();
    let mut others = Vec::new();
    for (p, pf) in pfs.iter().enumerate() {
        for (i, a) in pf.args.iter().enumerate() {
            if a.atom().pred == class.pred {
                if AtomClass::of(a.atom()) == *class {
                    members.push((p, i));
                } else {
                    others.push((p, i));
                }
            }
        }
    }
    for &(p, i) in &members {
        for &(q, j) in &others {
            let rel = compare(&model.vocab, &Prv::of_arg(&pfs[p], i), &Prv::of_arg(&pfs[q], j));
            if !matches!(rel, Ok(Relation::Disjoint)) {
                return Err(Error::not_applicable(format!("{} overlaps {}", pfs[p].args[i], pfs[q].args[j])));
            }
        }
    }
    let old = model.vocab.predicate(&class.pred)?.clone();
    let name = model.vocab.fresh_predicate_name(base);
    let range: Vec<&str> = old.range.iter().map(String::as_str).collect();
    let mut out = model.clone();
    out.vocab.add_predicate(Predicate::new(name.clone(), class.logvar_count(), &range))?;
    out.parfactors = pfs
        .iter()
        .map(|pf| {
            map_atoms(pf, |a| {
                (AtomClass::of(a) == *class).then(|| Atom::new(name.clone(), AtomClass::distinct_vars(a)))
            })
        })
        .collect();
    Ok((out, name))
}

/// Occurrence signature of an atom: its class, argument domains and the
/// constraint on its logvars, with logvars renamed by position.
fn signature<T: Scalar>(pf: &Parfactor<T>, i: usize) -> Result<String> {
    if pf.args[i].is_count() {
        return Err(Error::not_applicable("joint conversion of counted predicates"));
    }
    let prv = Prv::of_arg(pf, i);
    let vars = AtomClass::distinct_vars(&prv.atom);
    let map: BTreeMap<String, String> = vars
        .iter()
        .enumerate()
        .filter_map(|(k, t)| t.as_var().map(|v| (v.to_string(), format!("v{k}"))))
        .collect();
    let doms: Vec<&str> = vars
        .iter()
        .filter_map(|t| t.as_var())
        .map(|v| prv.logvars.iter().find(|l| l.name == v).map_or("", |l| l.domain.as_str()))
        .collect();
    let class = AtomClass::of(&prv.atom);
    Ok(format!("{:?}|{:?}|{}", class.pattern, doms, prv.constraint.rename(&map)))
}

/// Replaces predicates `p1` and `p2` by one predicate whose range is the
/// product of theirs (labels `a.b`). All occurrences of both predicates must
/// share one signature, so that their randvars correspond object by object;
/// a parfactor mentioning only one of them becomes constant in the other
/// component. If `p2` occurs nowhere, `p1` is relabeled. Returns the new name.
pub fn joint_convert<T: Scalar>(model: &Model<T>, p1: &str, p2: &str) -> Result<(Model<T>, String)> {
    if p1 == p2 {
        return Err(Error::not_applicable("joint conversion needs two predicates"));
    }
    let (d1, d2) = (model.vocab.predicate(p1)?.clone(), model.vocab.predicate(p2)?.clone());
    let mut sigs: BTreeSet<String> = BTreeSet::new();
    let mut p2_used = false;
    for pf in &model.parfactors {
        for (i, a) in pf.args.iter().enumerate() {
            let pred = &a.atom().pred;
            if pred == p1 || pred == p2 {
                p2_used |= pred == p2;
                sigs.insert(signature(pf, i)?);
            }
        }
    }
    if sigs.len() > 1 {
        return Err(Error::not_applicable(format!("{p1} and {p2} occur over different randvar sets")));
    }
    if p2_used && d1.arity != d2.arity {
        return Err(Error::not_applicable("joint conversion needs equal arities"));
    }
    let r2 = if p2_used { d2.range.len() } else { 1 };
    let labels: Vec<String> = if p2_used {
        d1.range.iter().flat_map(|a| d2.range.iter().map(move |b| format!("{a}.{b}"))).collect()
    } else {
        d1.range.clone()
    };
    let name = model.vocab.fresh_predicate_name(&format!("{p1}{p2}"));
    let mut out = model.clone();
    let range: Vec<&str> = labels.iter().map(String::as_str).collect();
    out.vocab.add_predicate(Predicate::new(name.clone(), d1.arity, &range))?;
    let mut pfs = Vec::with_capacity(model.parfactors.len());
    for pf in &model.parfactors {
        // Component selector per axis: 1 for p1, 2 for p2.
        let comp: Vec<u8> = pf
            .args
            .iter()
            .map(|a| match a.atom().pred.as_str() {
                p if p == p1 => 1,
                p if p == p2 => 2,
                _ => 0,
            })
            .collect();
        if comp.iter().all(|&c| c == 0) {
            pfs.push(pf.clone());
            continue;
        }
        let shape: Vec<usize> =
            pf.potential.shape().iter().zip(&comp).map(|(&d, &c)| if c == 0 { d } else { labels.len() }).collect();
        let potential = pf.potential.reindex(shape, |idx, old| {
            for (k, o) in old.iter_mut().enumerate() {
                *o = match comp[k] {
                    1 => idx[k] / r2,
                    2 => idx[k] % r2,
                    _ => idx[k],
                };
            }
            true
        })?;
        let mut g = map_atoms(pf, |a| (a.pred == p1 || a.pred == p2).then(|| Atom::new(name.clone(), a.args.clone())));
        g.potential = potential;
        pfs.push(simplify(g)?);
    }
    out.parfactors = pfs;
    Ok((out, name))
}
