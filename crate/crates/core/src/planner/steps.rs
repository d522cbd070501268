//! Elimination phases shared by the planners: 2-logvar atoms by group
//! inversion, 1-logvar atoms by joint and counting conversion, and a final
//! weighted elimination over ground atoms and counting randvars.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::ground::{weighted_ve, Factor, GroundFactor};
use crate::model::{Arg, CountingFormula, GroundAtom, Model, Parfactor, Term};
use crate::ops::counting::{free_logvar_count, ln_num_weights};
use crate::ops::joint::AtomClass;
use crate::ops::{
    count_convert, drop_free_logvar, find_alignment, group_inversion, joint_convert,
    just_different_count_convert, lifted_multiply, relabel, simplify, split,
};
use crate::planner::trace::PlanTrace;
use crate::scalar::Scalar;

/// Largest joint range built by the 1-logvar phase.
pub const JOINT_RANGE_CAP: usize = 256;

/// Mutable planner state: the working model, the protected query atom and
/// the trace.
pub struct Work<'a, T: Scalar> {
    pub model: Model<T>,
    pub keep: Option<GroundAtom>,
    pub trace: &'a mut PlanTrace,
    pub cap: usize,
}

impl<'a, T: Scalar> Work<'a, T> {
    pub fn log(&mut self, op: &str, operands: impl Into<String>, pf: &Parfactor<T>, work: u64, t0: Instant) {
        self.trace.record(op, operands, pf.args.len(), pf.potential.len(), work, t0.elapsed());
    }

    fn vocab(&self) -> &crate::model::Vocab {
        &self.model.vocab
    }
}

fn cells<T: Scalar>(pf: &Parfactor<T>) -> u64 {
    pf.potential.len() as u64
}

fn describe<T: Scalar>(pf: &Parfactor<T>, idx: &[usize]) -> String {
    idx.iter().map(|&i| pf.args[i].to_string()).collect::<Vec<_>>().join(",")
}

/// Step 1: multiplies the parfactors of each class of 2-logvar atoms and
/// group-inverts the class away. Leaves a model whose atoms have at most one
/// logvar.
pub fn eliminate_two_logvar_atoms<T: Scalar>(w: &mut Work<'_, T>) -> Result<()> {
    loop {
        let found = w.model.parfactors.iter().flat_map(|pf| pf.args.iter()).find_map(|a| match a {
            Arg::Atom(atom) if AtomClass::of(atom).logvar_count() >= 2 => Some(AtomClass::of(atom)),
            _ => None,
        });
        let Some(class) = found else { return Ok(()) };
        if class.pattern.iter().any(|s| matches!(s, crate::ops::joint::Slot::Const(_))) {
            let t0 = Instant::now();
            let (m, name) = relabel(&w.model, &class, &format!("{}_r", class.pred))?;
            w.model = m;
            w.trace.record("relabel", format!("{} -> {name}", class.pred), 0, 0, 0, t0.elapsed());
            continue;
        }
        let member = |a: &Arg| matches!(a, Arg::Atom(x) if AtomClass::of(x) == class);
        let group: Vec<usize> =
            (0..w.model.parfactors.len()).filter(|&p| w.model.parfactors[p].args.iter().any(member)).collect();
        let mut acc = w.model.parfactors[group[0]].clone();
        for &q in &group[1..] {
            let t0 = Instant::now();
            let other = &w.model.parfactors[q];
            let al = find_alignment(&acc, other)
                .ok_or_else(|| Error::not_applicable(format!("cannot align {acc} with {other}")))?;
            acc = lifted_multiply(&acc, other, &al)?;
            let work = cells(&acc);
            w.log("multiply", format!("p{} p{q}", group[0]), &acc, work, t0);
        }
        let targets: Vec<usize> = (0..acc.args.len()).filter(|&i| member(&acc.args[i])).collect();
        let t0 = Instant::now();
        let desc = describe(&acc, &targets);
        let res = group_inversion(w.vocab(), &acc, &targets)?;
        let work = cells(&acc) * *res.scale.denom();
        w.log("group_inversion", desc, &res, work, t0);
        for &p in group.iter().rev() {
            w.model.parfactors.remove(p);
        }
        w.model.parfactors.insert(group[0], res);
    }
}

/// Removes logvars that occur in no argument, splitting first when their
/// neighbors may coincide.
pub fn drop_free_logvars<T: Scalar>(w: &mut Work<'_, T>) -> Result<()> {
    let mut p = 0;
    while p < w.model.parfactors.len() {
        let pf = &w.model.parfactors[p];
        let free = pf.logvars.iter().map(|l| l.name.clone()).find(|v| pf.occurrences(v).is_empty());
        let Some(var) = free else {
            p += 1;
            continue;
        };
        let t0 = Instant::now();
        match free_logvar_count(w.vocab(), pf, &var) {
            Ok(_) => match drop_free_logvar(w.vocab(), pf, &var)? {
                Some(g) => {
                    w.log("drop_logvar", format!("p{p} {var}"), &g, 1, t0);
                    w.model.parfactors[p] = g;
                }
                None => {
                    w.trace.record("drop_parfactor", format!("p{p}"), 0, 0, 0, t0.elapsed());
                    w.model.parfactors.remove(p);
                }
            },
            Err(_) => {
                let nb: Vec<String> = pf.constraint.neighbors(&var).into_iter().collect();
                let pair = nb
                    .iter()
                    .enumerate()
                    .find_map(|(k, a)| nb[k + 1..].iter().find(|b| !pf.constraint.differ(a, b)).map(|b| (a.clone(), b.clone())));
                let Some((a, b)) = pair else {
                    return Err(Error::not_applicable(format!("cannot count the values of {var} in {pf}")));
                };
                let parts = split(w.vocab(), pf, &a, &Term::var(b.clone()))?;
                w.trace.record("split", format!("p{p} {a}={b}"), 0, 0, 0, t0.elapsed());
                w.model.parfactors.splice(p..=p, parts);
            }
        }
    }
    Ok(())
}

fn unary_classes<T: Scalar>(m: &Model<T>) -> (BTreeSet<AtomClass>, BTreeMap<String, BTreeSet<AtomClass>>) {
    let mut one = BTreeSet::new();
    let mut by_pred: BTreeMap<String, BTreeSet<AtomClass>> = BTreeMap::new();
    for pf in &m.parfactors {
        for a in &pf.args {
            let c = AtomClass::of(a.atom());
            if !a.is_count() && c.logvar_count() == 1 {
                one.insert(c.clone());
            }
            by_pred.entry(c.pred.clone()).or_default().insert(c);
        }
    }
    (one, by_pred)
}

/// Gives every class of 1-logvar atoms a unary predicate of its own.
pub fn relabel_unary_classes<T: Scalar>(w: &mut Work<'_, T>) -> Result<()> {
    let (one, by_pred) = unary_classes(&w.model);
    for class in one {
        let alone = by_pred[&class.pred].len() == 1;
        let unary = class.pattern.len() == 1;
        if alone && unary && class.is_plain() {
            continue;
        }
        let t0 = Instant::now();
        let (m, name) = relabel(&w.model, &class, &format!("{}_r", class.pred))?;
        w.model = m;
        w.trace.record("relabel", format!("{} -> {name}", class.pred), 0, 0, 0, t0.elapsed());
    }
    Ok(())
}

fn find(parent: &mut BTreeMap<String, String>, x: &str) -> String {
    let p = parent.get(x).cloned().unwrap_or_else(|| x.to_string());
    if p == x {
        return p;
    }
    let r = find(parent, &p);
    parent.insert(x.to_string(), r.clone());
    r
}

/// Joint-converts unary predicates that share a logvar or sit on logvars
/// constrained unequal, so that every logvar ends up in a single atom.
pub fn joint_components<T: Scalar>(w: &mut Work<'_, T>) -> Result<()> {
    let mut parent: BTreeMap<String, String> = BTreeMap::new();
    let mut preds: BTreeSet<String> = BTreeSet::new();
    for pf in &w.model.parfactors {
        let mut on: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for a in &pf.args {
            if let Arg::Atom(atom) = a {
                if let [Term::Var(v)] = atom.args.as_slice() {
                    on.entry(v.as_str()).or_default().push(atom.pred.as_str());
                    preds.insert(atom.pred.clone());
                }
            }
        }
        let mut link = |a: &str, b: &str| {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent.insert(hi, lo);
            }
        };
        for ps in on.values() {
            for p in &ps[1..] {
                link(ps[0], p);
            }
        }
        for i in pf.constraint.iter() {
            if let (Some(a), Some(b)) = (on.get(i.var.as_str()), i.term.as_var().and_then(|v| on.get(v))) {
                link(a[0], b[0]);
            }
        }
    }
    let mut comps: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for p in &preds {
        comps.entry(find(&mut parent, p)).or_default().push(p.clone());
    }
    for comp in comps.values().filter(|c| c.len() > 1) {
        let mut cur = comp[0].clone();
        for next in &comp[1..] {
            let r = w.vocab().range_size(&cur)? * w.vocab().range_size(next)?;
            if r > JOINT_RANGE_CAP {
                return Err(Error::Capacity(format!("joint range of {cur} and {next} has {r} values")));
            }
            let t0 = Instant::now();
            let (m, name) = joint_convert(&w.model, &cur, next)?;
            w.model = m;
            w.trace.record("joint_convert", format!("{cur},{next} -> {name}"), 0, r, 0, t0.elapsed());
            cur = name;
        }
    }
    Ok(())
}

/// Converts every remaining logvar into a counting formula: counting
/// conversion for unconstrained logvars, just-different conversion for
/// unequal pairs.
pub fn convert_logvars<T: Scalar>(w: &mut Work<'_, T>) -> Result<()> {
    for p in 0..w.model.parfactors.len() {
        while let Some(lv) = w.model.parfactors[p].logvars.first().cloned() {
            let t0 = Instant::now();
            let pf = &w.model.parfactors[p];
            let x = lv.name.as_str();
            let nb = pf.constraint.neighbors(x);
            let (g, op, work) = if nb.is_empty() {
                let g = count_convert(w.vocab(), pf, x)?;
                let r = w.vocab().range_size(&pf.args[pf.occurrences(x)[0]].atom().pred)? as u64;
                let work = cells(&g) * r;
                (g, "count_convert", work)
            } else {
                let y = nb.iter().next().expect("non-empty");
                if nb.len() != 1 || pf.constraint.neighbors(y).len() != 1 {
                    return Err(Error::not_applicable(format!(
                        "{pf}: inequality cliques beyond pairs are not supported"
                    )));
                }
                let i = pf.occurrences(x).first().copied().unwrap_or(0);
                let r = w.vocab().range_size(&pf.args[i].atom().pred)? as u64;
                let g = just_different_count_convert(w.vocab(), pf, x, y)?;
                let work = cells(&g) * r * r;
                (g, "just_different_convert", work)
            };
            let g = simplify(g)?;
            w.log(op, format!("p{p} {x}"), &g, work, t0);
            w.model.parfactors[p] = g;
        }
    }
    Ok(())
}

/// Step 2: eliminates 1-logvar atoms up to the point where every parfactor
/// is ground apart from counting formulas.
pub fn eliminate_one_logvar_atoms<T: Scalar>(w: &mut Work<'_, T>) -> Result<()> {
    drop_free_logvars(w)?;
    relabel_unary_classes(w)?;
    joint_components(w)?;
    drop_free_logvars(w)?;
    convert_logvars(w)
}

/// A randvar of the final elimination: a ground atom or a counting randvar.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum VarKey {
    Ground(GroundAtom),
    Count(CountingFormula),
}

/// Step 3: variable elimination over a model without logvars. Counting
/// randvars are summed with multinomial weights. Returns the unnormalized
/// marginal over the protected atom (or the zero-ary total).
pub fn finish<T: Scalar>(w: &mut Work<'_, T>) -> Result<GroundFactor<T>> {
    let t0 = Instant::now();
    let vocab = &w.model.vocab;
    let mut factors = Vec::with_capacity(w.model.parfactors.len());
    let mut ranges: BTreeMap<VarKey, usize> = BTreeMap::new();
    let mut weights: BTreeMap<VarKey, Vec<T>> = BTreeMap::new();
    for pf in &w.model.parfactors {
        if !pf.logvars.is_empty() {
            return Err(Error::not_applicable(format!("{pf} still has logvars")));
        }
        let pf = pf.materialize();
        let mut keys = Vec::with_capacity(pf.args.len());
        for (a, &d) in pf.args.iter().zip(pf.potential.shape()) {
            let key = match a {
                Arg::Atom(atom) => VarKey::Ground(
                    atom.to_ground().ok_or_else(|| Error::internal(format!("{atom} is not ground")))?,
                ),
                Arg::Count(cf) => {
                    let c = cf.canonical();
                    if let std::collections::btree_map::Entry::Vacant(e) = weights.entry(VarKey::Count(c.clone())) {
                        e.insert(ln_num_weights(vocab, cf)?);
                    }
                    VarKey::Count(c)
                }
            };
            ranges.insert(key.clone(), d);
            keys.push(key);
        }
        factors.push(Factor { args: keys, potential: pf.potential });
    }
    let keep: BTreeSet<VarKey> = w
        .keep
        .iter()
        .map(|g| VarKey::Ground(g.clone()))
        .filter(|k| ranges.contains_key(k))
        .collect();
    let (f, stats) = weighted_ve(&factors, &ranges, &weights, &keep, w.cap)?;
    w.trace.record("ground_ve", format!("{} factors", factors.len()), f.args.len(), stats.max_cells, stats.muladds, t0.elapsed());
    let args = f
        .args
        .into_iter()
        .map(|k| match k {
            VarKey::Ground(g) => Ok(g),
            VarKey::Count(_) => Err(Error::internal("counting randvar kept")),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Factor { args, potential: f.potential })
}
