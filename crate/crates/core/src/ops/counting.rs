//! Counting conversion, just-different counting conversion, counting sum-out
//! and removal of logvars that occur in no argument.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::histogram::{self, ln_factorials};
use crate::model::{Arg, CountingFormula, LogVar, Parfactor, Vocab};
use crate::ops::prv::{compare, Prv, Relation};
use crate::potential::Potential;
use crate::scalar::Scalar;

/// `ln NUM(h)` for every histogram of `cf`, in axis order.
pub fn ln_num_weights<T: Scalar>(vocab: &Vocab, cf: &CountingFormula) -> Result<Vec<T>> {
    let n = vocab.group_size(cf)?;
    let r = vocab.range_size(&cf.atom.pred)?;
    let lf = ln_factorials(n);
    let mut out = Vec::with_capacity(vocab.arg_size(&Arg::Count(cf.clone()))?);
    histogram::for_each(n, r, |h| {
        out.push(T::of(lf[n] - h.iter().map(|&c| lf[c]).sum::<f64>()));
    });
    Ok(out)
}

/// `k * ln(v)` with `0 * ln(0) = 0`.
fn times<T: Scalar>(k: usize, ln: T) -> T {
    if k == 0 {
        T::zero()
    } else {
        T::of(k as f64) * ln
    }
}

fn histogram_axis_len(n: usize, r: usize) -> Result<usize> {
    histogram::count(n, r).ok_or_else(|| Error::Capacity(format!("histograms of {n} randvars over {r} values")))
}

fn domain_size(vocab: &Vocab, lv: &LogVar) -> Result<usize> {
    Ok(vocab.domain(&lv.domain)?.len())
}

/// Applicability of counting conversion on `var`.
pub fn check_count_convert<T: Scalar>(pf: &Parfactor<T>, var: &str) -> Result<usize> {
    if pf.logvar(var).is_none() {
        return Err(Error::not_applicable(format!("{var} is not a logvar")));
    }
    let occ = pf.occurrences(var);
    if occ.len() != 1 {
        return Err(Error::not_applicable(format!("{var} occurs in {} arguments", occ.len())));
    }
    if pf.args[occ[0]].is_count() {
        return Err(Error::not_applicable(format!("{var} occurs in a counting formula")));
    }
    if !pf.constraint.neighbors(var).is_empty() {
        return Err(Error::not_applicable(format!("{var} is constrained unequal to another logvar")));
    }
    Ok(occ[0])
}

/// Replaces the only atom containing `var` by `#var[atom]`, with
/// `phi#(.., h, ..) = prod_r phi(.., r, ..)^h(r)`.
pub fn count_convert<T: Scalar>(vocab: &Vocab, pf: &Parfactor<T>, var: &str) -> Result<Parfactor<T>> {
    let i = check_count_convert(pf, var)?;
    let lv = pf.logvar(var).expect("checked").clone();
    let excluded = pf.constraint.excluded_constants(var);
    let atom = pf.args[i].atom().clone();
    let n = domain_size(vocab, &lv)? - excluded.len();
    let shape = pf.potential.shape();
    let r = shape[i];
    let hn = histogram_axis_len(n, r)?;
    let pre: usize = shape[..i].iter().product();
    let post: usize = shape[i + 1..].iter().product();
    let old = pf.potential.ln_values();
    let mut ln = vec![T::zero(); pre * hn * post];
    let mut k = 0;
    histogram::for_each(n, r, |h| {
        for o in 0..pre {
            for p in 0..post {
                let mut s = T::zero();
                for (v, &c) in h.iter().enumerate() {
                    s = s + times(c, old[(o * r + v) * post + p]);
                }
                ln[(o * hn + k) * post + p] = s;
            }
        }
        k += 1;
    });
    let mut new_shape = shape.to_vec();
    new_shape[i] = hn;
    let mut out = pf.clone();
    out.args[i] = Arg::Count(CountingFormula::new(lv, excluded, atom));
    out.potential = Potential::from_ln(new_shape, ln)?;
    out.logvars.retain(|l| l.name != var);
    out.constraint = pf.constraint.without_var(var);
    Ok(out)
}

/// Applicability of just-different conversion on `x1 != x2`; returns the
/// argument indices of the two atoms.
pub fn check_just_different<T: Scalar>(pf: &Parfactor<T>, x1: &str, x2: &str) -> Result<(usize, usize)> {
    let (Some(l1), Some(l2)) = (pf.logvar(x1), pf.logvar(x2)) else {
        return Err(Error::not_applicable("unknown logvars"));
    };
    if l1.domain != l2.domain || !pf.constraint.differ(x1, x2) {
        return Err(Error::not_applicable(format!("{x1} != {x2} is not in the constraint")));
    }
    if pf.constraint.neighbors(x1) != BTreeSet::from([x2.to_string()])
        || pf.constraint.neighbors(x2) != BTreeSet::from([x1.to_string()])
    {
        return Err(Error::not_applicable("the logvars have further inequalities"));
    }
    if pf.constraint.excluded_constants(x1) != pf.constraint.excluded_constants(x2) {
        return Err(Error::not_applicable("the logvars exclude different constants"));
    }
    let (o1, o2) = (pf.occurrences(x1), pf.occurrences(x2));
    if o1.len() != 1 || o2.len() != 1 || o1[0] == o2[0] {
        return Err(Error::not_applicable("each logvar must occur in exactly one distinct argument"));
    }
    let (i, j) = (o1[0], o2[0]);
    let (Some(a1), Some(a2)) = (pf.args[i].as_atom(), pf.args[j].as_atom()) else {
        return Err(Error::not_applicable("just-different arguments must be atoms"));
    };
    let swapped = a1.rename(&[(x1.to_string(), x2.to_string())].into());
    if swapped != *a2 {
        return Err(Error::not_applicable(format!("{a1} and {a2} are not just-different")));
    }
    Ok((i, j))
}

/// Replaces just-different atoms `P(x1, ..)`, `P(x2, ..)` with `x1 != x2` by
/// one counting formula appended as the last argument:
/// `phi#(h) = prod_{r1,r2} phi(r1, r2)^m(h, r1, r2)` where `m` counts ordered
/// pairs of distinct members taking values `r1` and `r2`.
pub fn just_different_count_convert<T: Scalar>(vocab: &Vocab, pf: &Parfactor<T>, x1: &str, x2: &str) -> Result<Parfactor<T>> {
    let (i, j) = check_just_different(pf, x1, x2)?;
    let lv = pf.logvar(x1).expect("checked").clone();
    let excluded = pf.constraint.excluded_constants(x1);
    let n = domain_size(vocab, &lv)? - excluded.len();
    if n < 2 {
        return Err(Error::not_applicable("fewer than two members leave no groundings"));
    }
    let atom = pf.args[i].atom().clone();
    let others: Vec<usize> = (0..pf.args.len()).filter(|&k| k != i && k != j).collect();
    let mut order = others.clone();
    order.extend([i, j]);
    let moved = pf.potential.permute(&order)?;
    let r = pf.potential.shape()[i];
    let hn = histogram_axis_len(n, r)?;
    let outer: usize = others.iter().map(|&k| pf.potential.shape()[k]).product();
    let old = moved.ln_values();
    let mut ln = vec![T::zero(); outer * hn];
    let mut k = 0;
    histogram::for_each(n, r, |h| {
        for o in 0..outer {
            let mut s = T::zero();
            for r1 in 0..r {
                for r2 in 0..r {
                    let m = if r1 == r2 { h[r1] * h[r1].saturating_sub(1) } else { h[r1] * h[r2] };
                    s = s + times(m, old[(o * r + r1) * r + r2]);
                }
            }
            ln[o * hn + k] = s;
        }
        k += 1;
    });
    let mut shape: Vec<usize> = others.iter().map(|&k| pf.potential.shape()[k]).collect();
    shape.push(hn);
    let mut args: Vec<Arg> = others.iter().map(|&k| pf.args[k].clone()).collect();
    args.push(Arg::Count(CountingFormula::new(lv, excluded, atom)));
    let mut out = pf.clone();
    out.args = args;
    out.potential = Potential::from_ln(shape, ln)?;
    out.logvars.retain(|l| l.name != x1 && l.name != x2);
    out.constraint = pf.constraint.without_var(x1).without_var(x2);
    Ok(out)
}

/// Applicability of counting sum-out on `pf.args[target]`, apart from the
/// model-level condition that its members occur in no other parfactor.
pub fn check_sum_out_counting<T: Scalar>(vocab: &Vocab, pf: &Parfactor<T>, target: usize) -> Result<()> {
    let arg = pf.args.get(target).ok_or_else(|| Error::NotFound(format!("argument {target}")))?;
    if !arg.is_count() {
        return Err(Error::not_applicable("target is not a counting formula"));
    }
    let free = arg.free_vars();
    if !pf.logvars.iter().all(|l| free.contains(&l.name.as_str())) {
        return Err(Error::not_applicable(format!("{arg} does not contain every logvar")));
    }
    let a = Prv::of_arg(pf, target);
    for j in (0..pf.args.len()).filter(|&j| j != target) {
        match compare(vocab, &a, &Prv::of_arg(pf, j)) {
            Ok(Relation::Disjoint) => {}
            _ => return Err(Error::not_applicable(format!("{arg} overlaps {}", pf.args[j]))),
        }
    }
    Ok(())
}

/// `phi'(rest) = sum_h NUM(h) * phi(rest, h)`.
pub fn sum_out_counting<T: Scalar>(vocab: &Vocab, pf: &Parfactor<T>, target: usize) -> Result<Parfactor<T>> {
    check_sum_out_counting(vocab, pf, target)?;
    let Arg::Count(cf) = &pf.args[target] else { unreachable!() };
    let w = ln_num_weights::<T>(vocab, cf)?;
    let mut out = pf.materialize();
    out.potential = out.potential.sum_out(target, Some(&w));
    out.args.remove(target);
    Ok(out)
}

/// Number of values a logvar occurring in no argument takes per grounding of
/// the remaining logvars, when that number is the same for all of them.
pub fn free_logvar_count<T: Scalar>(vocab: &Vocab, pf: &Parfactor<T>, var: &str) -> Result<usize> {
    let lv = pf.logvar(var).ok_or_else(|| Error::not_applicable(format!("{var} is not a logvar")))?;
    if !pf.occurrences(var).is_empty() {
        return Err(Error::not_applicable(format!("{var} occurs in an argument")));
    }
    let nb: Vec<String> = pf.constraint.neighbors(var).into_iter().collect();
    for (k, a) in nb.iter().enumerate() {
        for b in &nb[k + 1..] {
            if !pf.constraint.differ(a, b) {
                return Err(Error::not_applicable(format!("{a} and {b} may coincide")));
            }
        }
    }
    let ex = pf.constraint.excluded_constants(var);
    for a in &nb {
        if !pf.constraint.excluded_constants(a).is_superset(&ex) {
            return Err(Error::not_applicable(format!("{a} may take a value excluded for {var}")));
        }
    }
    Ok(domain_size(vocab, lv)?.saturating_sub(ex.len() + nb.len()))
}

/// Removes a logvar that occurs in no argument by raising the potential to
/// the number of its values. `None` when that number is zero, in which case
/// the parfactor has no groundings.
pub fn drop_free_logvar<T: Scalar>(vocab: &Vocab, pf: &Parfactor<T>, var: &str) -> Result<Option<Parfactor<T>>> {
    let count = free_logvar_count(vocab, pf, var)?;
    if count == 0 {
        return Ok(None);
    }
    let mut out = pf.clone();
    out.scale *= num_rational::Ratio::from_integer(count as u64);
    out.logvars.retain(|l| l.name != var);
    out.constraint = pf.constraint.without_var(var);
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::histogram::Histogram;
    use crate::model::{Atom, Constraint, Predicate};

    fn vocab(n: usize) -> Vocab {
        let mut v = Vocab::new();
        v.add_sized_domain("D", "x", n).unwrap();
        v.add_predicate(Predicate::boolean("A", 1)).unwrap();
        v.add_predicate(Predicate::new("J", 1, &["a", "b", "c"])).unwrap();
        v
    }

    #[test]
    fn count_convert_unary() {
        let v = vocab(3);
        let g: Parfactor = Parfactor::from_atoms(
            &v,
            vec![LogVar::new("X", "D")],
            Constraint::new(),
            vec![Atom::parse_simple("A", &["X"], &["X"])],
            &[2.0, 5.0],
        )
        .unwrap();
        let c = count_convert(&v, &g, "X").unwrap();
        c.validate(&v).unwrap();
        assert!(c.logvars.is_empty());
        let h = Histogram::new(vec![1, 2]);
        assert!((c.potential.value_at(&[h.rank()]) - 2.0 * 25.0).abs() < 1e-9);
    }

    #[test]
    fn unit_potential_stays_unit() {
        let v = vocab(4);
        let g: Parfactor = Parfactor::from_atoms(
            &v,
            vec![LogVar::new("X", "D"), LogVar::new("Y", "D")],
            Constraint::all_distinct(&["X", "Y"]),
            vec![Atom::parse_simple("J", &["X"], &["X"]), Atom::parse_simple("J", &["Y"], &["Y"])],
            &[1.0; 9],
        )
        .unwrap();
        let c = just_different_count_convert(&v, &g, "X", "Y").unwrap();
        c.validate(&v).unwrap();
        assert_eq!(c.potential.len(), histogram::count(4, 3).unwrap());
        assert!(c.potential.values().iter().all(|&x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn free_logvar_count_excludes_neighbors() {
        let v = vocab(5);
        let g: Parfactor = Parfactor::from_atoms(
            &v,
            vec![LogVar::new("X", "D"), LogVar::new("Y", "D")],
            Constraint::all_distinct(&["X", "Y"]),
            vec![Atom::parse_simple("A", &["X"], &["X"])],
            &[1.0, 2.0],
        )
        .unwrap();
        let d = drop_free_logvar(&v, &g, "Y").unwrap().unwrap();
        assert_eq!(d.scale, num_rational::Ratio::from_integer(4));
        assert!(drop_free_logvar(&v, &g, "X").is_err());
    }
}
