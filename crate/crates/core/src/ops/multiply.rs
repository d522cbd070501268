//! Lifted multiplication of parfactors with matching logvars and constraints.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{Arg, Parfactor};
use crate::scalar::Scalar;

/// Maps logvars of the second operand onto logvars of the first.
pub type Alignment = BTreeMap<String, String>;

/// Renames the logvars of `pf` by `map` (a bijection on names).
pub fn rename_parfactor<T: Scalar>(pf: &Parfactor<T>, map: &Alignment) -> Parfactor<T> {
    Parfactor {
        logvars: pf
            .logvars
            .iter()
            .map(|l| {
                let mut l = l.clone();
                if let Some(n) = map.get(&l.name) {
                    l.name = n.clone();
                }
                l
            })
            .collect(),
        constraint: pf.constraint.rename(map),
        args: pf.args.iter().map(|a| a.rename(map)).collect(),
        potential: pf.potential.clone(),
        scale: pf.scale,
    }
}

fn same_logvars<T: Scalar>(a: &Parfactor<T>, b: &Parfactor<T>) -> bool {
    let mut x = a.logvars.clone();
    let mut y = b.logvars.clone();
    x.sort();
    y.sort();
    x == y
}

/// Product of `g1` and `g2` after renaming `g2` by `alignment`. Arguments of
/// `g2` equal to an argument of `g1` share its axis; the others are appended.
pub fn lifted_multiply<T: Scalar>(g1: &Parfactor<T>, g2: &Parfactor<T>, alignment: &Alignment) -> Result<Parfactor<T>> {
    let g2 = rename_parfactor(g2, alignment);
    if !same_logvars(g1, &g2) || g1.constraint != g2.constraint {
        return Err(Error::Alignment(format!(
            "{g2} does not match the logvars and constraint of {g1}"
        )));
    }
    let (g1, g2) = if g1.scale == g2.scale {
        (g1.clone(), g2)
    } else {
        (g1.materialize(), g2.materialize())
    };
    let mut args: Vec<Arg> = g1.args.clone();
    let mut shape = g1.potential.shape().to_vec();
    let mut axes2 = Vec::with_capacity(g2.args.len());
    for (a, &d) in g2.args.iter().zip(g2.potential.shape()) {
        match args.iter().position(|x| x.same_as(a)) {
            Some(i) => axes2.push(i),
            None => {
                args.push(a.clone());
                shape.push(d);
                axes2.push(args.len() - 1);
            }
        }
    }
    let axes1: Vec<usize> = (0..g1.args.len()).collect();
    let potential = g1.potential.product(&axes1, &g2.potential, &axes2, shape)?;
    Ok(Parfactor { logvars: g1.logvars.clone(), constraint: g1.constraint.clone(), args, potential, scale: g1.scale })
}

/// Constraint-preserving alignment of `g2` onto `g1` that shares the most
/// arguments; `None` when no bijection preserves domains and constraint.
pub fn find_alignment<T: Scalar>(g1: &Parfactor<T>, g2: &Parfactor<T>) -> Option<Alignment> {
    if g1.logvars.len() != g2.logvars.len() || g1.logvars.len() > 6 {
        return None;
    }
    let n = g1.logvars.len();
    let mut best: Option<(usize, Alignment)> = None;
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let ok = (0..n).all(|k| g2.logvars[k].domain == g1.logvars[perm[k]].domain);
        if ok {
            let map: Alignment = (0..n)
                .map(|k| (g2.logvars[k].name.clone(), g1.logvars[perm[k]].name.clone()))
                .collect();
            if g2.constraint.rename(&map) == g1.constraint {
                let shared = g2
                    .args
                    .iter()
                    .map(|a| a.rename(&map))
                    .filter(|a| g1.args.iter().any(|b| b.same_as(a)))
                    .count();
                if best.as_ref().is_none_or(|(s, _)| shared > *s) {
                    best = Some((shared, map));
                }
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.map(|(_, m)| m)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Atom, Constraint, LogVar, Predicate, Vocab};
    use crate::potential::Potential;

    fn vocab() -> Vocab {
        let mut v = Vocab::new();
        v.add_sized_domain("D", "x", 3).unwrap();
        v.add_predicate(Predicate::boolean("S", 1)).unwrap();
        v.add_predicate(Predicate::boolean("F", 2)).unwrap();
        v
    }

    #[test]
    fn unit_parfactor_is_neutral() {
        let v = vocab();
        let lv = vec![LogVar::new("X", "D"), LogVar::new("Y", "D")];
        let c = Constraint::all_distinct(&["X", "Y"]);
        let g: Parfactor = Parfactor::from_atoms(
            &v,
            lv.clone(),
            c.clone(),
            vec![Atom::parse_simple("F", &["X", "Y"], &["X", "Y"])],
            &[1.0, 3.0],
        )
        .unwrap();
        let one = Parfactor::new(lv, c, vec![], Potential::ones(vec![]));
        let al = find_alignment(&g, &one).unwrap();
        assert_eq!(lifted_multiply(&g, &one, &al).unwrap(), g);
    }

    #[test]
    fn alignment_prefers_shared_args() {
        let v = vocab();
        let g1: Parfactor = Parfactor::from_atoms(
            &v,
            vec![LogVar::new("X", "D"), LogVar::new("Y", "D")],
            Constraint::all_distinct(&["X", "Y"]),
            vec![Atom::parse_simple("F", &["X", "Y"], &["X", "Y"])],
            &[1.0, 3.0],
        )
        .unwrap();
        let g2: Parfactor = Parfactor::from_atoms(
            &v,
            vec![LogVar::new("A", "D"), LogVar::new("B", "D")],
            Constraint::all_distinct(&["A", "B"]),
            vec![Atom::parse_simple("S", &["B"], &["B"]), Atom::parse_simple("F", &["B", "A"], &["A", "B"])],
            &[1.0, 2.0, 3.0, 4.0],
        )
        .unwrap();
        let al = find_alignment(&g1, &g2).unwrap();
        assert_eq!(al["B"], "X");
        let p = lifted_multiply(&g1, &g2, &al).unwrap();
        assert_eq!(p.args.len(), 2);
        // F=true, S(X)=true: 3 * 4.
        assert!((p.potential.value_at(&[1, 1]) - 12.0).abs() < 1e-12);
    }
}
