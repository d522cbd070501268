//! Grounding substitutions, their number, and constraint satisfiability.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::model::{Atom, Constraint, GroundAtom, LogVar, Substitution, Term, Vocab};

/// All grounding substitutions of `logvars` consistent with `constraint`, in
/// lexicographic order of domain positions.
pub fn gr_substitutions(
    vocab: &Vocab,
    logvars: &[LogVar],
    constraint: &Constraint,
) -> Result<Vec<Substitution>> {
    let domains: Vec<&[String]> =
        logvars.iter().map(|l| vocab.domain(&l.domain)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut current: Vec<&str> = Vec::with_capacity(logvars.len());
    enumerate(logvars, &domains, constraint, &mut current, &mut out);
    Ok(out)
}

fn enumerate<'a>(
    logvars: &[LogVar],
    domains: &[&'a [String]],
    constraint: &Constraint,
    current: &mut Vec<&'a str>,
    out: &mut Vec<Substitution>,
) {
    let k = current.len();
    if k == logvars.len() {
        out.push(
            logvars
                .iter()
                .zip(current.iter())
                .map(|(l, c)| (l.name.clone(), Term::constant(*c)))
                .collect(),
        );
        return;
    }
    let var = &logvars[k].name;
    'values: for c in domains[k] {
        if constraint.contains(var, &Term::constant(c.as_str())) {
            continue;
        }
        for (j, prev) in current.iter().enumerate() {
            if *prev == c.as_str() && constraint.differ(var, &logvars[j].name) {
                continue 'values;
            }
        }
        current.push(c);
        enumerate(logvars, domains, constraint, current, out);
        current.pop();
    }
}

/// Ground atoms represented by `atom | constraint`.
pub fn rv_set(
    vocab: &Vocab,
    logvars: &[LogVar],
    constraint: &Constraint,
    atom: &Atom,
) -> Result<BTreeSet<GroundAtom>> {
    for v in atom.vars() {
        if !logvars.iter().any(|l| l.name == v) {
            return Err(Error::Declaration(format!("logvar {v} is not bound")));
        }
    }
    Ok(gr_substitutions(vocab, logvars, constraint)?
        .iter()
        .map(|theta| atom.substitute(theta).to_ground().expect("fully grounded"))
        .collect())
}

/// `|gr(logvars | constraint)|` without enumerating the groundings.
///
/// Constants never mentioned by the constraint are interchangeable, so each
/// logvar is assigned either a mentioned constant or an anonymous class; a new
/// class contributes the number of unused anonymous constants. The cost is
/// independent of domain sizes.
pub fn count_groundings(vocab: &Vocab, logvars: &[LogVar], constraint: &Constraint) -> Result<u128> {
    let mut named: BTreeMap<&str, BTreeSet<String>> = BTreeMap::new();
    for lv in logvars {
        let set = named.entry(lv.domain.as_str()).or_default();
        let dom = vocab.domain(&lv.domain)?;
        for c in constraint.excluded_constants(&lv.name) {
            if dom.contains(&c) {
                set.insert(c);
            }
        }
    }
    let mut pools: BTreeMap<&str, usize> = BTreeMap::new();
    for (d, set) in &named {
        pools.insert(d, vocab.domain(d)?.len() - set.len());
    }
    let mut assigned: Vec<Slot> = Vec::new();
    let mut classes: BTreeMap<&str, usize> = BTreeMap::new();
    Ok(count_rec(logvars, constraint, &named, &pools, &mut assigned, &mut classes))
}

#[derive(Clone, PartialEq)]
enum Slot {
    Named(String),
    Anon(usize),
}

fn count_rec<'a>(
    logvars: &'a [LogVar],
    constraint: &Constraint,
    named: &BTreeMap<&'a str, BTreeSet<String>>,
    pools: &BTreeMap<&'a str, usize>,
    assigned: &mut Vec<Slot>,
    classes: &mut BTreeMap<&'a str, usize>,
) -> u128 {
    let k = assigned.len();
    if k == logvars.len() {
        return 1;
    }
    let lv = &logvars[k];
    let dom = lv.domain.as_str();
    let clash = |slot: &Slot, assigned: &[Slot]| {
        assigned.iter().enumerate().any(|(j, s)| {
            s == slot && logvars[j].domain == lv.domain && constraint.differ(&lv.name, &logvars[j].name)
        })
    };
    let mut total: u128 = 0;
    for c in &named[dom] {
        if constraint.contains(&lv.name, &Term::constant(c.as_str())) {
            continue;
        }
        let slot = Slot::Named(c.clone());
        if clash(&slot, assigned) {
            continue;
        }
        assigned.push(slot);
        total += count_rec(logvars, constraint, named, pools, assigned, classes);
        assigned.pop();
    }
    let used = classes.get(dom).copied().unwrap_or(0);
    for class in 0..used {
        let slot = Slot::Anon(class);
        if clash(&slot, assigned) {
            continue;
        }
        assigned.push(slot);
        total += count_rec(logvars, constraint, named, pools, assigned, classes);
        assigned.pop();
    }
    let pool = pools[dom];
    if used < pool {
        assigned.push(Slot::Anon(used));
        classes.insert(dom, used + 1);
        let sub = count_rec(logvars, constraint, named, pools, assigned, classes);
        classes.insert(dom, used);
        assigned.pop();
        total += sub * (pool - used) as u128;
    }
    total
}

/// Whether at least one grounding satisfies the constraint.
pub fn constraint_satisfiable(vocab: &Vocab, logvars: &[LogVar], constraint: &Constraint) -> Result<bool> {
    Ok(count_groundings(vocab, logvars, constraint)? > 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::histogram::falling;

    fn vocab(n: usize) -> Vocab {
        let mut v = Vocab::new();
        v.add_sized_domain("D", "x", n).unwrap();
        v
    }

    fn lvs(names: &[&str]) -> Vec<LogVar> {
        names.iter().map(|n| LogVar::new(*n, "D")).collect()
    }

    #[test]
    fn excluded_constant_leaves_n_minus_one() {
        let v = vocab(5);
        let c = Constraint::from_pairs(&[("X", Term::constant("x1"))]).unwrap();
        assert_eq!(gr_substitutions(&v, &lvs(&["X"]), &c).unwrap().len(), 4);
        assert_eq!(count_groundings(&v, &lvs(&["X"]), &c).unwrap(), 4);
    }

    #[test]
    fn empty_logvar_set_has_one_substitution() {
        let v = vocab(3);
        let subs = gr_substitutions(&v, &[], &Constraint::new()).unwrap();
        assert_eq!(subs.len(), 1);
        assert!(subs[0].is_empty());
    }

    #[test]
    fn distinct_pair_over_three() {
        let v = vocab(3);
        let c = Constraint::all_distinct(&["X", "Y"]);
        assert_eq!(gr_substitutions(&v, &lvs(&["X", "Y"]), &c).unwrap().len(), 6);
        let f = crate::model::Atom::parse_simple("F", &["X", "Y"], &["X", "Y"]);
        assert_eq!(rv_set(&v, &lvs(&["X", "Y"]), &c, &f).unwrap().len(), 6);
    }

    #[test]
    fn smokes_example() {
        let v = vocab(3);
        let c = Constraint::from_pairs(&[("X", Term::constant("x1"))]).unwrap();
        let s = crate::model::Atom::parse_simple("Smokes", &["X"], &["X"]);
        let got: Vec<String> =
            rv_set(&v, &lvs(&["X"]), &c, &s).unwrap().iter().map(|g| g.to_string()).collect();
        assert_eq!(got, vec!["Smokes(x2)", "Smokes(x3)"]);
    }

    #[test]
    fn satisfiability_cases() {
        let xy = Constraint::all_distinct(&["X", "Y"]);
        assert!(!constraint_satisfiable(&vocab(1), &lvs(&["X", "Y"]), &xy).unwrap());
        assert!(constraint_satisfiable(&vocab(2), &lvs(&["X", "Y"]), &xy).unwrap());
        let tri = Constraint::all_distinct(&["X", "Y", "Z"]);
        assert!(!constraint_satisfiable(&vocab(2), &lvs(&["X", "Y", "Z"]), &tri).unwrap());
    }

    #[test]
    fn falling_factorial_counts() {
        let names = ["A", "B", "C"];
        for n in 1..=6 {
            for k in 1..=3 {
                let c = Constraint::all_distinct(&names[..k]);
                let l = lvs(&names[..k]);
                let enumerated = gr_substitutions(&vocab(n), &l, &c).unwrap().len();
                assert_eq!(enumerated as f64, falling(n, k));
                assert_eq!(count_groundings(&vocab(n), &l, &c).unwrap() as usize, enumerated);
            }
        }
    }

    #[test]
    fn lifted_count_matches_enumeration_with_constants() {
        let v = vocab(5);
        let mut c = Constraint::all_distinct(&["X", "Y"]);
        c.add("X", Term::constant("x1")).unwrap();
        c.add("Z", Term::constant("x2")).unwrap();
        c.add("Y", Term::var("Z")).unwrap();
        let l = lvs(&["X", "Y", "Z"]);
        assert_eq!(
            count_groundings(&v, &l, &c).unwrap() as usize,
            gr_substitutions(&v, &l, &c).unwrap().len()
        );
    }
}
