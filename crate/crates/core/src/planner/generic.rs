//! The greedy lifted elimination loop with a ground fallback.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::ground::{expand_crv, weighted_ve, GroundFactor};
use crate::model::{Arg, Parfactor, Term};
use crate::ops::counting::{check_just_different, check_sum_out_counting, free_logvar_count};
use crate::ops::inversion::check_sum_out_inversion;
use crate::ops::prv::appears_elsewhere;
use crate::ops::{
    compare, count_convert, drop_free_logvar, find_alignment, group_inversion, group_inversion_counting,
    joint_convert, just_different_count_convert, lifted_multiply, simplify, sum_out_counting,
    sum_out_inversion, Prv, Relation,
};
use crate::planner::steps::{finish, Work};
use crate::scalar::Scalar;

/// Upper bound on loop iterations before the remaining model is grounded.
pub const MAX_ITERATIONS: usize = 10_000;

fn is_protected<T: Scalar>(w: &Work<'_, T>, arg: &Arg) -> bool {
    match (arg, &w.keep) {
        (Arg::Atom(a), Some(k)) => a.to_ground().as_ref() == Some(k),
        _ => false,
    }
}

/// Runs the loop until no logvars remain, then eliminates at the ground
/// level; grounds the rest when no lifted operator applies.
pub fn run<T: Scalar>(w: &mut Work<'_, T>) -> Result<GroundFactor<T>> {
    for _ in 0..MAX_ITERATIONS {
        if w.model.parfactors.iter().all(|p| p.logvars.is_empty()) {
            return finish(w);
        }
        if try_sum_out(w)? || try_multiply(w)? || try_drop(w)? || try_joint(w)? || try_count(w)? {
            continue;
        }
        break;
    }
    ground_fallback(w)
}

fn replace<T: Scalar>(w: &mut Work<'_, T>, p: usize, op: &str, operands: String, g: Parfactor<T>, t0: Instant) {
    let work = g.potential.len() as u64 + w.model.parfactors[p].potential.len() as u64;
    w.log(op, operands, &g, work, t0);
    w.model.parfactors[p] = g;
}

fn try_sum_out<T: Scalar>(w: &mut Work<'_, T>) -> Result<bool> {
    for p in 0..w.model.parfactors.len() {
        let pf = &w.model.parfactors[p];
        if pf.logvars.is_empty() {
            continue;
        }
        for i in 0..pf.args.len() {
            let t0 = Instant::now();
            if is_protected(w, &pf.args[i]) {
                continue;
            }
            let elsewhere_outside = |w: &Work<'_, T>, idx: &[usize]| -> Result<bool> {
                for &k in idx {
                    let a = Prv::of_arg(&w.model.parfactors[p], k);
                    for (q, other) in w.model.parfactors.iter().enumerate().filter(|(q, _)| *q != p) {
                        for j in 0..other.args.len() {
                            if !matches!(compare(&w.model.vocab, &a, &Prv::of_arg(other, j)), Ok(Relation::Disjoint)) {
                                let _ = q;
                                return Ok(true);
                            }
                        }
                    }
                }
                Ok(false)
            };
            let vocab = &w.model.vocab;
            if check_sum_out_inversion(vocab, pf, i).is_ok() && !appears_elsewhere(vocab, &w.model.parfactors, p, i)? {
                let g = sum_out_inversion(vocab, pf, i)?;
                replace(w, p, "sum_out_inversion", format!("p{p} {}", pf.args[i]), g, t0);
                return Ok(true);
            }
            if check_sum_out_counting(vocab, pf, i).is_ok() && !appears_elsewhere(vocab, &w.model.parfactors, p, i)? {
                let g = sum_out_counting(vocab, pf, i)?;
                replace(w, p, "sum_out_counting", format!("p{p} {}", pf.args[i]), g, t0);
                return Ok(true);
            }
            // Group of arguments representing the same randvars as argument i.
            let a = Prv::of_arg(pf, i);
            let targets: Vec<usize> = (0..pf.args.len())
                .filter(|&j| {
                    pf.args[j].is_count() == pf.args[i].is_count()
                        && matches!(compare(vocab, &a, &Prv::of_arg(pf, j)), Ok(Relation::Identical))
                })
                .collect();
            if targets.len() < 2 || elsewhere_outside(w, &targets)? {
                continue;
            }
            let res = if pf.args[i].is_count() {
                group_inversion_counting(vocab, pf, &targets)
            } else {
                group_inversion(vocab, pf, &targets)
            };
            if let Ok(g) = res {
                let op = if pf.args[i].is_count() { "group_inversion_counting" } else { "group_inversion" };
                let desc = targets.iter().map(|&k| pf.args[k].to_string()).collect::<Vec<_>>().join(",");
                let work = pf.potential.len() as u64 * *g.scale.denom();
                w.log(op, format!("p{p} {desc}"), &g, work, t0);
                w.model.parfactors[p] = g;
                return Ok(true);
            }
        }
    }
    Ok(false)
}

fn try_multiply<T: Scalar>(w: &mut Work<'_, T>) -> Result<bool> {
    let pfs = &w.model.parfactors;
    for p in 0..pfs.len() {
        for q in p + 1..pfs.len() {
            let (a, b) = (&pfs[p], &pfs[q]);
            if a.logvars.is_empty() || a.logvars.len() != b.logvars.len() {
                continue;
            }
            let shares = (0..a.args.len()).any(|i| {
                let x = Prv::of_arg(a, i);
                (0..b.args.len()).any(|j| !matches!(compare(&w.model.vocab, &x, &Prv::of_arg(b, j)), Ok(Relation::Disjoint)))
            });
            if !shares {
                continue;
            }
            let Some(al) = find_alignment(a, b) else { continue };
            let t0 = Instant::now();
            let Ok(g) = lifted_multiply(a, b, &al) else { continue };
            let g = simplify(g)?;
            let work = g.potential.len() as u64;
            w.log("multiply", format!("p{p} p{q}"), &g, work, t0);
            w.model.parfactors[p] = g;
            w.model.parfactors.remove(q);
            return Ok(true);
        }
    }
    Ok(false)
}

fn try_drop<T: Scalar>(w: &mut Work<'_, T>) -> Result<bool> {
    for p in 0..w.model.parfactors.len() {
        let pf = &w.model.parfactors[p];
        for lv in &pf.logvars {
            if !pf.occurrences(&lv.name).is_empty() || free_logvar_count(&w.model.vocab, pf, &lv.name).is_err() {
                continue;
            }
            let t0 = Instant::now();
            match drop_free_logvar(&w.model.vocab, pf, &lv.name)? {
                Some(g) => replace(w, p, "drop_logvar", format!("p{p} {}", lv.name), g, t0),
                None => {
                    w.trace.record("drop_parfactor", format!("p{p}"), 0, 0, 0, t0.elapsed());
                    w.model.parfactors.remove(p);
                }
            }
            return Ok(true);
        }
    }
    Ok(false)
}

/// Joint-converts two unary predicates that block a counting conversion by
/// sharing a logvar or sitting on an unequal pair.
fn try_joint<T: Scalar>(w: &mut Work<'_, T>) -> Result<bool> {
    let mut candidates = Vec::new();
    for pf in &w.model.parfactors {
        let unary_on = |v: &str| -> Vec<String> {
            pf.args
                .iter()
                .filter_map(|a| match a {
                    Arg::Atom(x) if x.args == [Term::var(v)] => Some(x.pred.clone()),
                    _ => None,
                })
                .collect()
        };
        for lv in &pf.logvars {
            let here = unary_on(&lv.name);
            if here.len() >= 2 && here[0] != here[1] {
                candidates.push((here[0].clone(), here[1].clone()));
            }
            for y in pf.constraint.neighbors(&lv.name) {
                let there = unary_on(&y);
                if let (Some(a), Some(b)) = (here.first(), there.first()) {
                    if a != b {
                        candidates.push((a.clone(), b.clone()));
                    }
                }
            }
        }
    }
    for (a, b) in candidates {
        let t0 = Instant::now();
        if let Ok((m, name)) = joint_convert(&w.model, &a, &b) {
            w.model = m;
            let r = w.model.vocab.range_size(&name)?;
            w.trace.record("joint_convert", format!("{a},{b} -> {name}"), 0, r, 0, t0.elapsed());
            return Ok(true);
        }
    }
    Ok(false)
}

fn try_count<T: Scalar>(w: &mut Work<'_, T>) -> Result<bool> {
    for p in 0..w.model.parfactors.len() {
        let pf = &w.model.parfactors[p];
        for lv in &pf.logvars {
            let x = lv.name.as_str();
            let t0 = Instant::now();
            if let Ok(g) = count_convert(&w.model.vocab, pf, x) {
                let g = simplify(g)?;
                replace(w, p, "count_convert", format!("p{p} {x}"), g, t0);
                return Ok(true);
            }
            for y in pf.constraint.neighbors(x) {
                if check_just_different(pf, x, &y).is_ok() {
                    let g = simplify(just_different_count_convert(&w.model.vocab, pf, x, &y)?)?;
                    replace(w, p, "just_different_convert", format!("p{p} {x},{y}"), g, t0);
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

/// Grounds the remaining model and eliminates propositionally.
fn ground_fallback<T: Scalar>(w: &mut Work<'_, T>) -> Result<GroundFactor<T>> {
    let t0 = Instant::now();
    w.trace.fallback = true;
    let mut total: u128 = 0;
    for pf in &w.model.parfactors {
        total += crate::grounding::count_groundings(&w.model.vocab, &pf.logvars, &pf.constraint)?;
    }
    if total > w.cap as u128 {
        return Err(Error::Capacity(format!("ground fallback needs {total} factors")));
    }
    let mut factors = Vec::new();
    let mut ranges = std::collections::BTreeMap::new();
    for pf in &w.model.parfactors {
        for f in expand_crv(&w.model.vocab, pf, w.cap)? {
            for (a, &d) in f.args.iter().zip(f.potential.shape()) {
                ranges.insert(a.clone(), d);
            }
            factors.push(f);
        }
    }
    let keep = w.keep.iter().filter(|k| ranges.contains_key(*k)).cloned().collect();
    let (f, stats) = weighted_ve(&factors, &ranges, &Default::default(), &keep, w.cap).map_err(|e| match e {
        Error::Capacity(m) => Error::Capacity(format!("ground fallback: {m}")),
        e => e,
    })?;
    w.trace.record("ground_fallback", format!("{} factors", factors.len()), f.args.len(), stats.max_cells, stats.muladds, t0.elapsed());
    Ok(f)
}
