//! Parametrized randvars and their pairwise overlap analysis.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::grounding::count_groundings;
use crate::model::{Arg, Atom, Constraint, GroundAtom, LogVar, Parfactor, Substitution, Term, Vocab};
use crate::scalar::Scalar;

/// An atom together with the logvars and inequalities that determine the set
/// of randvars it represents. For the atom of a counting formula the counted
/// logvar is included and marked, since it cannot be split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prv {
    pub atom: Atom,
    pub logvars: Vec<LogVar>,
    pub constraint: Constraint,
    pub counted: Option<String>,
}

impl Prv {
    pub fn of_arg<T: Scalar>(pf: &Parfactor<T>, i: usize) -> Prv {
        let atom = pf.args[i].atom().clone();
        let names: BTreeSet<&str> = atom.vars().into_iter().collect();
        let mut logvars: Vec<LogVar> =
            pf.logvars.iter().filter(|l| names.contains(l.name.as_str())).cloned().collect();
        let mut constraint = pf.constraint.restrict(&names);
        let mut counted = None;
        if let Arg::Count(cf) = &pf.args[i] {
            logvars.push(cf.var.clone());
            for c in &cf.excluded {
                constraint.add(&cf.var.name, Term::constant(c.clone())).expect("constant inequality");
            }
            counted = Some(cf.var.name.clone());
        }
        Prv { atom, logvars, constraint, counted }
    }

    pub fn ground(g: &GroundAtom) -> Prv {
        Prv { atom: g.to_atom(), logvars: Vec::new(), constraint: Constraint::new(), counted: None }
    }

    fn logvar(&self, name: &str) -> Option<&LogVar> {
        self.logvars.iter().find(|l| l.name == name)
    }
}

/// Outcome of comparing two PRVs. A split names the side whose parfactor must
/// be split and the case `var = term` to split on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Relation {
    Disjoint,
    Identical,
    SplitLeft(String, Term),
    SplitRight(String, Term),
}

struct Classes {
    parent: BTreeMap<Term, Term>,
}

impl Classes {
    fn find(&mut self, t: &Term) -> Term {
        let p = self.parent.get(t).cloned().unwrap_or_else(|| t.clone());
        if p == *t {
            return p;
        }
        let r = self.find(&p);
        self.parent.insert(t.clone(), r.clone());
        r
    }

    fn union(&mut self, a: &Term, b: &Term) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent.insert(ra, rb);
        }
    }
}

const APART: &str = "'";

/// Compares the randvar sets of two PRVs: disjoint, identical, or a split of
/// one side that refines the pair towards one of the former.
pub fn compare(vocab: &Vocab, a: &Prv, b: &Prv) -> Result<Relation> {
    if a.atom.pred != b.atom.pred || a.atom.args.len() != b.atom.args.len() {
        return Ok(Relation::Disjoint);
    }
    let ren: BTreeMap<String, String> =
        b.logvars.iter().map(|l| (l.name.clone(), format!("{}{APART}", l.name))).collect();
    let b_atom = b.atom.rename(&ren);
    let b_constraint = b.constraint.rename(&ren);
    let mut domains: BTreeMap<String, String> =
        a.logvars.iter().map(|l| (l.name.clone(), l.domain.clone())).collect();
    for l in &b.logvars {
        domains.insert(ren[&l.name].clone(), l.domain.clone());
    }

    let mut cls = Classes { parent: BTreeMap::new() };
    for (s, t) in a.atom.args.iter().zip(&b_atom.args) {
        cls.union(s, t);
    }
    let mut terms: BTreeSet<Term> = a.atom.args.iter().cloned().collect();
    terms.extend(b_atom.args.iter().cloned());
    let mut members: BTreeMap<Term, Vec<Term>> = BTreeMap::new();
    for t in &terms {
        let r = cls.find(t);
        members.entry(r).or_default().push(t.clone());
    }
    // Representative of each class: its constant if any, else its least var.
    let mut rep: BTreeMap<String, Term> = BTreeMap::new();
    let mut merged_vars: Vec<LogVar> = Vec::new();
    for ms in members.values() {
        let consts: BTreeSet<&str> = ms.iter().filter_map(Term::as_const).collect();
        if consts.len() > 1 {
            return Ok(Relation::Disjoint);
        }
        let vars: Vec<&str> = ms.iter().filter_map(Term::as_var).collect();
        let doms: BTreeSet<&String> = vars.iter().map(|v| &domains[*v]).collect();
        if doms.len() > 1 {
            return Ok(Relation::Disjoint);
        }
        let r = match consts.iter().next() {
            Some(c) => {
                if let Some(d) = doms.iter().next() {
                    if !vocab.domain(d)?.iter().any(|x| x == c) {
                        return Ok(Relation::Disjoint);
                    }
                }
                Term::constant(*c)
            }
            None => {
                let v = vars[0];
                merged_vars.push(LogVar::new(v, domains[v].clone()));
                Term::var(v)
            }
        };
        for v in vars {
            rep.insert(v.to_string(), r.clone());
        }
    }
    let theta: Substitution = rep.clone();
    let (Some(ca), Some(cb)) = (a.constraint.substitute(&theta), b_constraint.substitute(&theta))
    else {
        return Ok(Relation::Disjoint);
    };
    let mut merged = ca;
    for i in cb.iter() {
        merged.add(&i.var, i.term.clone())?;
    }
    if count_groundings(vocab, &merged_vars, &merged)? == 0 {
        return Ok(Relation::Disjoint);
    }

    // Overlapping. Bindings that one side's logvars do not already have.
    for (side, prv, own) in [(0, a, false), (1, b, true)] {
        for l in &prv.logvars {
            let name = if own { ren[&l.name].clone() } else { l.name.clone() };
            let Some(r) = rep.get(&name) else { continue };
            let split = match r {
                Term::Const(c) => Some(Term::constant(c.clone())),
                Term::Var(_) => {
                    let root = cls.find(&Term::var(name.clone()));
                    members[&root]
                        .iter()
                        .filter_map(Term::as_var)
                        .find(|v| *v != name && v.ends_with(APART) == own)
                        .map(|v| Term::var(unrename(v, own)))
                }
            };
            if let Some(t) = split {
                return relation(prv, side, &l.name, t);
            }
        }
    }
    // Var classes now pair one logvar of each side; compare inequalities.
    let mut a_of: BTreeMap<String, Term> = BTreeMap::new();
    for l in &b.logvars {
        if let Some(Term::Var(_)) = rep.get(&ren[&l.name]) {
            let root = cls.find(&Term::var(ren[&l.name].clone()));
            if let Some(v) = members[&root].iter().filter_map(Term::as_var).find(|v| !v.ends_with(APART)) {
                a_of.insert(l.name.clone(), Term::var(v));
            }
        }
    }
    let b_of: BTreeMap<String, Term> = a_of
        .iter()
        .filter_map(|(k, v)| v.as_var().map(|v| (v.to_string(), Term::var(k.clone()))))
        .collect();
    if let Some(r) = missing(b, &a.constraint, &b_of, 1)? {
        return Ok(r);
    }
    if let Some(r) = missing(a, &b.constraint, &a_of, 0)? {
        return Ok(r);
    }
    Ok(Relation::Identical)
}

fn unrename(v: &str, own: bool) -> String {
    if own {
        v.trim_end_matches(APART).to_string()
    } else {
        v.to_string()
    }
}

fn relation(prv: &Prv, side: usize, var: &str, t: Term) -> Result<Relation> {
    if prv.counted.as_deref() == Some(var) || t.as_var().is_some_and(|v| prv.counted.as_deref() == Some(v)) {
        return Err(Error::not_applicable(format!(
            "overlap requires splitting the counted logvar of {}",
            prv.atom
        )));
    }
    Ok(if side == 0 { Relation::SplitLeft(var.into(), t) } else { Relation::SplitRight(var.into(), t) })
}

/// First inequality of `other`, mapped into `prv`'s logvars, that `prv`'s
/// constraint lacks.
fn missing(
    prv: &Prv,
    other: &Constraint,
    map: &BTreeMap<String, Term>,
    side: usize,
) -> Result<Option<Relation>> {
    for i in other.iter() {
        let (Some(Term::Var(x)), t) = (map.get(&i.var), &i.term) else { continue };
        let t = match t {
            Term::Const(c) => Term::constant(c.clone()),
            Term::Var(v) => match map.get(v) {
                Some(t) => t.clone(),
                None => continue,
            },
        };
        if prv.logvar(x).is_some() && !prv.constraint.contains(x, &t) {
            return relation(prv, side, x, t).map(Some);
        }
    }
    Ok(None)
}

/// Whether some randvar of `pf.args[i]` also occurs in another argument of
/// `pf` or in any other parfactor of `pfs`.
pub fn appears_elsewhere<T: Scalar>(vocab: &Vocab, pfs: &[Parfactor<T>], p: usize, i: usize) -> Result<bool> {
    let a = Prv::of_arg(&pfs[p], i);
    for (q, pf) in pfs.iter().enumerate() {
        for j in 0..pf.args.len() {
            if q == p && j == i {
                continue;
            }
            match compare(vocab, &a, &Prv::of_arg(pf, j)) {
                Ok(Relation::Disjoint) => {}
                Ok(_) | Err(_) => return Ok(true),
            }
        }
    }
    Ok(false)
}
