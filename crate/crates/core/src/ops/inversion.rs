//! Lifted sum-out by inversion and by group inversion.

use std::collections::BTreeMap;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::model::{Arg, Atom, Parfactor, Term, Vocab};
use crate::ops::counting::ln_num_weights;
use crate::ops::multiply::{lifted_multiply, rename_parfactor};
use crate::ops::prv::{compare, Prv, Relation};
use crate::perm::{closure, Permutation, PermutationGroup};
use crate::scalar::Scalar;

fn disjoint_from_rest<T: Scalar>(vocab: &Vocab, pf: &Parfactor<T>, targets: &[usize]) -> Result<()> {
    for &t in targets {
        let a = Prv::of_arg(pf, t);
        for j in (0..pf.args.len()).filter(|j| !targets.contains(j)) {
            match compare(vocab, &a, &Prv::of_arg(pf, j)) {
                Ok(Relation::Disjoint) => {}
                _ => {
                    return Err(Error::not_applicable(format!(
                        "{} shares randvars with {}",
                        pf.args[t], pf.args[j]
                    )))
                }
            }
        }
    }
    Ok(())
}

fn covers_all_logvars<T: Scalar>(pf: &Parfactor<T>, arg: &Arg) -> bool {
    let free = arg.free_vars();
    pf.logvars.iter().all(|l| free.contains(&l.name.as_str()))
}

/// Applicability of plain inversion on `pf.args[target]`, apart from the
/// model-level condition that its randvars occur in no other parfactor.
pub fn check_sum_out_inversion<T: Scalar>(vocab: &Vocab, pf: &Parfactor<T>, target: usize) -> Result<()> {
    let arg = pf.args.get(target).ok_or_else(|| Error::NotFound(format!("argument {target}")))?;
    if arg.is_count() {
        return Err(Error::not_applicable("target is a counting formula"));
    }
    if !covers_all_logvars(pf, arg) {
        return Err(Error::not_applicable(format!("{arg} does not contain every logvar")));
    }
    disjoint_from_rest(vocab, pf, &[target])
}

/// Sums `pf.args[target]` out of every grounding at once.
pub fn sum_out_inversion<T: Scalar>(vocab: &Vocab, pf: &Parfactor<T>, target: usize) -> Result<Parfactor<T>> {
    check_sum_out_inversion(vocab, pf, target)?;
    let mut out = pf.materialize();
    out.potential = out.potential.sum_out(target, None);
    out.args.remove(target);
    Ok(out)
}

const COUNTED: &str = "#";

/// The atom of a target with its counted logvar (if any) replaced by a fixed
/// placeholder, so that positional maps ignore it.
fn pattern(arg: &Arg) -> Atom {
    match arg {
        Arg::Atom(a) => a.clone(),
        Arg::Count(cf) => cf.atom.rename(&BTreeMap::from([(cf.var.name.clone(), COUNTED.to_string())])),
    }
}

/// Step 1 of group inversion: the closure of the permutations mapping each
/// target onto each other target. Checks every local precondition.
pub fn inversion_group<T: Scalar>(vocab: &Vocab, pf: &Parfactor<T>, targets: &[usize]) -> Result<PermutationGroup> {
    if targets.is_empty() {
        return Err(Error::not_applicable("no targets"));
    }
    let mut seen = targets.to_vec();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != targets.len() || seen.iter().any(|&t| t >= pf.args.len()) {
        return Err(Error::not_applicable("targets must be distinct argument indices"));
    }
    let first = &pf.args[targets[0]];
    for &t in targets {
        let arg = &pf.args[t];
        if arg.is_count() != first.is_count() {
            return Err(Error::not_applicable("targets mix atoms and counting formulas"));
        }
        if let (Arg::Count(a), Arg::Count(b)) = (arg, first) {
            if a.excluded != b.excluded || a.var.domain != b.var.domain {
                return Err(Error::not_applicable("counting formulas differ in their inner constraint"));
            }
        }
        if pattern(arg).args.iter().any(|t| matches!(t, Term::Const(_))) {
            return Err(Error::not_applicable(format!("{arg} contains a constant")));
        }
        if !covers_all_logvars(pf, arg) {
            return Err(Error::not_applicable(format!("{arg} does not contain every logvar")));
        }
    }
    let names = pf.logvar_names();
    for (k, x) in names.iter().enumerate() {
        for y in &names[k + 1..] {
            if !pf.constraint.differ(x, y) {
                return Err(Error::not_applicable(format!("{x} != {y} is missing from the constraint")));
            }
        }
    }
    disjoint_from_rest(vocab, pf, targets)?;
    let mut gens = vec![Permutation::identity(&names)];
    for &i in targets {
        for &j in targets {
            let lam = Permutation::between(&names, &pattern(&pf.args[i]), &pattern(&pf.args[j]))
                .ok_or_else(|| {
                    Error::not_applicable(format!("no logvar permutation maps {} onto {}", pf.args[i], pf.args[j]))
                })?;
            if pf.constraint.rename(&lam.as_map()) != pf.constraint {
                return Err(Error::not_applicable(format!("{lam} does not preserve the constraint")));
            }
            gens.push(lam);
        }
    }
    let group = closure(&names, &gens)?;
    let patterns: Vec<Atom> = targets.iter().map(|&t| pattern(&pf.args[t])).collect();
    for lam in group.elements() {
        for p in &patterns {
            if !patterns.contains(&lam.apply_atom(p)) {
                return Err(Error::not_applicable(format!("{lam} maps target {p} outside the targets")));
            }
        }
    }
    Ok(group)
}

/// Group inversion over atom targets.
pub fn group_inversion<T: Scalar>(vocab: &Vocab, pf: &Parfactor<T>, targets: &[usize]) -> Result<Parfactor<T>> {
    if targets.iter().any(|&t| pf.args.get(t).is_some_and(Arg::is_count)) {
        return Err(Error::not_applicable("use group_inversion_counting for counting formulas"));
    }
    invert(vocab, pf, targets)
}

/// Group inversion over counting-formula targets; each summed histogram is
/// weighted by its multinomial coefficient.
pub fn group_inversion_counting<T: Scalar>(vocab: &Vocab, pf: &Parfactor<T>, targets: &[usize]) -> Result<Parfactor<T>> {
    if targets.iter().any(|&t| pf.args.get(t).is_some_and(|a| !a.is_count())) {
        return Err(Error::not_applicable("targets must be counting formulas"));
    }
    invert(vocab, pf, targets)
}

fn invert<T: Scalar>(vocab: &Vocab, pf: &Parfactor<T>, targets: &[usize]) -> Result<Parfactor<T>> {
    let group = inversion_group(vocab, pf, targets)?;
    let base = pf.materialize();
    let mut product: Option<Parfactor<T>> = None;
    for lam in group.elements() {
        let g = rename_parfactor(&base, &lam.as_map());
        product = Some(match product {
            None => g,
            Some(acc) => lifted_multiply(&acc, &g, &BTreeMap::new())?,
        });
    }
    let mut out = product.ok_or_else(|| Error::internal("empty permutation group"))?;
    let originals: Vec<Arg> = targets.iter().map(|&t| pf.args[t].clone()).collect();
    let mut axes: Vec<usize> =
        (0..out.args.len()).filter(|&k| originals.iter().any(|o| o.same_as(&out.args[k]))).collect();
    if axes.len() != originals.len() {
        return Err(Error::internal("targets are not closed under the permutation group"));
    }
    axes.sort_unstable_by(|a, b| b.cmp(a));
    for k in axes {
        let weights = match &out.args[k] {
            Arg::Count(cf) => Some(ln_num_weights::<T>(vocab, cf)?),
            Arg::Atom(_) => None,
        };
        out.potential = out.potential.sum_out(k, weights.as_deref());
        out.args.remove(k);
    }
    out.scale = Ratio::new(1, group.len() as u64);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Constraint, LogVar, Predicate};

    fn vocab() -> Vocab {
        let mut v = Vocab::new();
        v.add_sized_domain("D", "x", 3).unwrap();
        for p in ["S", "A"] {
            v.add_predicate(Predicate::boolean(p, 1)).unwrap();
        }
        v.add_predicate(Predicate::boolean("F", 2)).unwrap();
        v
    }

    fn xy() -> Vec<LogVar> {
        vec![LogVar::new("X", "D"), LogVar::new("Y", "D")]
    }

    #[test]
    fn inversion_on_full_atom() {
        let v = vocab();
        let g: Parfactor = Parfactor::from_atoms(
            &v,
            xy(),
            Constraint::all_distinct(&["X", "Y"]),
            vec![Atom::parse_simple("F", &["X", "Y"], &["X", "Y"]), Atom::parse_simple("S", &["X"], &["X"])],
            &[1.0, 2.0, 3.0, 4.0],
        )
        .unwrap();
        let r = sum_out_inversion(&v, &g, 0).unwrap();
        assert_eq!(r.args.len(), 1);
        assert!((r.potential.value_at(&[0]) - 4.0).abs() < 1e-12);
        assert!(sum_out_inversion(&v, &g, 1).is_err());
    }

    #[test]
    fn symmetric_pair_inverts_to_half_power() {
        let v = vocab();
        let g: Parfactor = Parfactor::from_atoms(
            &v,
            xy(),
            Constraint::all_distinct(&["X", "Y"]),
            vec![Atom::parse_simple("F", &["X", "Y"], &["X", "Y"]), Atom::parse_simple("F", &["Y", "X"], &["X", "Y"])],
            &[1.0, 2.0, 3.0, 4.0],
        )
        .unwrap();
        assert!(sum_out_inversion(&v, &g, 0).is_err());
        let r = group_inversion(&v, &g, &[0, 1]).unwrap();
        assert!(r.args.is_empty());
        assert_eq!(r.scale, Ratio::new(1, 2));
        // sum over (a,b) of phi(a,b) * phi(b,a) = 1 + 2*3 + 3*2 + 16.
        assert!((r.potential.value_at(&[]) - 29.0).abs() < 1e-9);
    }

    #[test]
    fn single_target_matches_plain_inversion() {
        let v = vocab();
        let g: Parfactor = Parfactor::from_atoms(
            &v,
            xy(),
            Constraint::all_distinct(&["X", "Y"]),
            vec![Atom::parse_simple("F", &["X", "Y"], &["X", "Y"]), Atom::parse_simple("S", &["X"], &["X"])],
            &[1.0, 2.0, 3.0, 4.0],
        )
        .unwrap();
        let a = sum_out_inversion(&v, &g, 0).unwrap();
        let b = group_inversion(&v, &g, &[0]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn targets_not_closed_under_group_are_rejected() {
        let mut v = vocab();
        v.add_predicate(Predicate::boolean("T", 3)).unwrap();
        let xyz = vec![LogVar::new("X", "D"), LogVar::new("Y", "D"), LogVar::new("Z", "D")];
        let names = ["X", "Y", "Z"];
        let g: Parfactor = Parfactor::from_atoms(
            &v,
            xyz,
            Constraint::all_distinct(&names),
            vec![Atom::parse_simple("T", &["Y", "Z", "X"], &names), Atom::parse_simple("T", &["X", "Y", "Z"], &names)],
            &[1.0, 2.0, 3.0, 4.0],
        )
        .unwrap();
        let err = group_inversion(&v, &g, &[0, 1]).unwrap_err();
        assert!(matches!(err, Error::NotApplicable(_)), "{err}");
    }
}
