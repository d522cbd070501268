//! Propositional grounding and exact ground inference.
//!
//! This is the reference against which every lifted operator is checked:
//! models are expanded to ordinary factors and solved by variable
//! elimination or by brute-force enumeration of joint assignments.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::grounding::gr_substitutions;
use crate::histogram::Histogram;
use crate::model::{Arg, GroundAtom, Model, Parfactor, Substitution, Vocab};
use crate::potential::{for_each_index, strides, table_len, Potential};
use crate::scalar::{ln_sum, Scalar};

/// Default bound on table cells and joint assignments.
pub const DEFAULT_CAP: usize = 1 << 24;

/// A factor over distinct variables of type `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct Factor<K, T = f64> {
    pub args: Vec<K>,
    pub potential: Potential<T>,
}

pub type GroundFactor<T = f64> = Factor<GroundAtom, T>;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroundModel<T = f64> {
    pub factors: Vec<GroundFactor<T>>,
    pub ranges: BTreeMap<GroundAtom, usize>,
}

impl<T: Scalar> GroundModel<T> {
    pub fn randvars(&self) -> BTreeSet<GroundAtom> {
        self.ranges.keys().cloned().collect()
    }

    pub fn push(&mut self, f: GroundFactor<T>) {
        for (a, &d) in f.args.iter().zip(f.potential.shape()) {
            self.ranges.insert(a.clone(), d);
        }
        self.factors.push(f);
    }

    /// Grounds every parfactor of `model`, expanding counting formulas.
    pub fn from_model(model: &Model<T>, cap: usize) -> Result<Self> {
        let mut gm = GroundModel::default();
        for pf in &model.parfactors {
            for f in expand_crv(&model.vocab, pf, cap)? {
                gm.push(f);
            }
        }
        Ok(gm)
    }
}

/// Work counters of an elimination run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VeStats {
    pub muladds: u64,
    pub max_cells: usize,
}

/// Groundings of a parfactor without counting formulas; the pending exponent
/// is applied to each factor.
pub fn ground_parfactor<T: Scalar>(vocab: &Vocab, pf: &Parfactor<T>) -> Result<Vec<GroundFactor<T>>> {
    if pf.has_counting() {
        return Err(Error::not_applicable("parfactor has counting formulas; use expand_crv"));
    }
    expand_crv(vocab, pf, usize::MAX)
}

/// Groundings of a parfactor where each grounded counting formula is replaced
/// by its member randvars; the table value for a joint assignment is the
/// potential at the induced histogram.
pub fn expand_crv<T: Scalar>(vocab: &Vocab, pf: &Parfactor<T>, cap: usize) -> Result<Vec<GroundFactor<T>>> {
    let pot = pf.materialize().potential;
    let mut out = Vec::new();
    for theta in gr_substitutions(vocab, &pf.logvars, &pf.constraint)? {
        out.push(ground_one(vocab, pf, &pot, &theta, cap)?);
    }
    Ok(out)
}

enum Slot {
    Single(usize),
    Members(Vec<usize>, usize),
}

fn ground_one<T: Scalar>(
    vocab: &Vocab,
    pf: &Parfactor<T>,
    pot: &Potential<T>,
    theta: &Substitution,
    cap: usize,
) -> Result<GroundFactor<T>> {
    let mut vars: Vec<GroundAtom> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    let mut slots = Vec::with_capacity(pf.args.len());
    let intern = |g: GroundAtom, vars: &mut Vec<GroundAtom>, sizes: &mut Vec<usize>| -> Result<usize> {
        if let Some(i) = vars.iter().position(|v| *v == g) {
            return Ok(i);
        }
        sizes.push(vocab.range_size(&g.pred)?);
        vars.push(g);
        Ok(vars.len() - 1)
    };
    for arg in &pf.args {
        match arg.substitute(theta) {
            Arg::Atom(a) => {
                let g = a.to_ground().ok_or_else(|| Error::internal("grounding left a logvar"))?;
                slots.push(Slot::Single(intern(g, &mut vars, &mut sizes)?));
            }
            Arg::Count(cf) => {
                let dom = vocab.domain(&cf.var.domain)?;
                let r = vocab.range_size(&cf.atom.pred)?;
                let mut members = Vec::new();
                for c in dom.iter().filter(|c| !cf.excluded.contains(*c)) {
                    let s = Substitution::from([(cf.var.name.clone(), crate::model::Term::Const(c.clone()))]);
                    let g = cf.atom.substitute(&s).to_ground().ok_or_else(|| {
                        Error::internal("counting formula member is not ground")
                    })?;
                    members.push(intern(g, &mut vars, &mut sizes)?);
                }
                slots.push(Slot::Members(members, r));
            }
        }
    }
    let cells = table_len(&sizes).filter(|&c| c <= cap).ok_or_else(|| {
        Error::Capacity(format!("ground factor over {} randvars exceeds the cap", vars.len()))
    })?;
    let _ = cells;
    let st = strides(pot.shape());
    let mut buf = Vec::new();
    let potential = Potential::build(sizes, |idx| {
        let mut flat = 0;
        for (k, slot) in slots.iter().enumerate() {
            let v = match slot {
                Slot::Single(i) => idx[*i],
                Slot::Members(ms, r) => {
                    buf.clear();
                    buf.extend(ms.iter().map(|&m| idx[m]));
                    Histogram::from_assignment(&buf, *r).rank()
                }
            };
            flat += v * st[k];
        }
        pot.ln_values()[flat]
    })?;
    Ok(Factor { args: vars, potential })
}

/// Pointwise product over the union of arguments.
pub fn factor_multiply<K: Clone + PartialEq, T: Scalar>(f1: &Factor<K, T>, f2: &Factor<K, T>) -> Result<Factor<K, T>> {
    let mut args = f1.args.clone();
    let mut shape = f1.potential.shape().to_vec();
    let mut axes2 = Vec::with_capacity(f2.args.len());
    for (a, &d) in f2.args.iter().zip(f2.potential.shape()) {
        match args.iter().position(|x| x == a) {
            Some(i) => {
                if shape[i] != d {
                    return Err(Error::Alignment("shared variable with different ranges".into()));
                }
                axes2.push(i)
            }
            None => {
                args.push(a.clone());
                shape.push(d);
                axes2.push(args.len() - 1);
            }
        }
    }
    let axes1: Vec<usize> = (0..f1.args.len()).collect();
    let potential = f1.potential.product(&axes1, &f2.potential, &axes2, shape)?;
    Ok(Factor { args, potential })
}

pub fn factor_sum_out<K: PartialEq + std::fmt::Debug + Clone, T: Scalar>(f: &Factor<K, T>, var: &K) -> Result<Factor<K, T>> {
    let i = f
        .args
        .iter()
        .position(|a| a == var)
        .ok_or_else(|| Error::NotFound(format!("{var:?} is not an argument of the factor")))?;
    let mut args = f.args.clone();
    args.remove(i);
    Ok(Factor { args, potential: f.potential.sum_out(i, None) })
}

/// `ln Z` by enumerating every joint assignment.
pub fn brute_force_ln_partition<T: Scalar>(gm: &GroundModel<T>, cap: usize) -> Result<T> {
    let vars: Vec<&GroundAtom> = gm.ranges.keys().collect();
    let sizes: Vec<usize> = gm.ranges.values().copied().collect();
    let total = table_len(&sizes).filter(|&c| c <= cap).ok_or_else(|| {
        Error::Capacity(format!("{} randvars exceed the brute-force cap", vars.len()))
    })?;
    let index: BTreeMap<&GroundAtom, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let plans: Vec<(Vec<usize>, Vec<usize>)> = gm
        .factors
        .iter()
        .map(|f| (f.args.iter().map(|a| index[a]).collect(), strides(f.potential.shape())))
        .collect();
    let mut terms = Vec::with_capacity(total.min(1 << 16));
    let mut acc = T::neg_infinity();
    for_each_index(&sizes, |idx| {
        let mut s = T::zero();
        for (f, (pos, st)) in gm.factors.iter().zip(&plans) {
            let flat: usize = pos.iter().zip(st).map(|(&p, &w)| idx[p] * w).sum();
            s = s + f.potential.ln_values()[flat];
        }
        terms.push(s);
        if terms.len() == 1 << 16 {
            terms.push(acc);
            acc = ln_sum(&terms);
            terms.clear();
        }
    });
    terms.push(acc);
    Ok(ln_sum(&terms))
}

/// `Z` by enumeration. With `log_space` the sum is accumulated in log space,
/// which avoids underflow of long products.
pub fn brute_force_partition<T: Scalar>(gm: &GroundModel<T>, cap: usize, log_space: bool) -> Result<T> {
    if log_space {
        return Ok(brute_force_ln_partition(gm, cap)?.exp());
    }
    let vars: Vec<&GroundAtom> = gm.ranges.keys().collect();
    let sizes: Vec<usize> = gm.ranges.values().copied().collect();
    table_len(&sizes).filter(|&c| c <= cap).ok_or_else(|| {
        Error::Capacity(format!("{} randvars exceed the brute-force cap", vars.len()))
    })?;
    let index: BTreeMap<&GroundAtom, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let linear: Vec<(Vec<usize>, Vec<usize>, Vec<T>)> = gm
        .factors
        .iter()
        .map(|f| {
            (f.args.iter().map(|a| index[a]).collect(), strides(f.potential.shape()), f.potential.values())
        })
        .collect();
    let mut z = T::zero();
    for_each_index(&sizes, |idx| {
        let mut p = T::one();
        for (pos, st, vals) in &linear {
            let flat: usize = pos.iter().zip(st).map(|(&q, &w)| idx[q] * w).sum();
            p = p * vals[flat];
        }
        z = z + p;
    });
    Ok(z)
}

/// Unnormalized marginal over `keep` by brute force (keep in sorted order).
pub fn brute_force_marginal<T: Scalar>(gm: &GroundModel<T>, keep: &BTreeSet<GroundAtom>, cap: usize) -> Result<GroundFactor<T>> {
    let mut all = None;
    for f in &gm.factors {
        all = Some(match all {
            None => f.clone(),
            Some(acc) => factor_multiply(&acc, f)?,
        });
        if all.as_ref().map_or(0, |f: &GroundFactor<T>| f.potential.len()) > cap {
            return Err(Error::Capacity("joint table exceeds the cap".into()));
        }
    }
    let mut f = all.unwrap_or(Factor { args: vec![], potential: Potential::scalar_ln(T::zero()) });
    for v in gm.randvars() {
        if !f.args.contains(&v) {
            // Randvar with no factor: uniform contribution of its range size.
            let d = gm.ranges[&v];
            f = factor_multiply(&f, &Factor { args: vec![v.clone()], potential: Potential::ones(vec![d]) })?;
        }
    }
    for v in gm.randvars() {
        if !keep.contains(&v) {
            f = factor_sum_out(&f, &v)?;
        }
    }
    sort_args(&f)
}

fn sort_args<K: Ord + Clone, T: Scalar>(f: &Factor<K, T>) -> Result<Factor<K, T>> {
    let mut order: Vec<usize> = (0..f.args.len()).collect();
    order.sort_by(|&a, &b| f.args[a].cmp(&f.args[b]));
    Ok(Factor {
        args: order.iter().map(|&i| f.args[i].clone()).collect(),
        potential: f.potential.permute(&order)?,
    })
}

/// Unnormalized marginal over `keep` (sorted) by variable elimination.
pub fn ground_ve<T: Scalar>(gm: &GroundModel<T>, keep: &BTreeSet<GroundAtom>, cap: usize) -> Result<GroundFactor<T>> {
    for k in keep {
        if !gm.ranges.contains_key(k) {
            return Err(Error::NotFound(format!("{k} is not a randvar of the model")));
        }
    }
    let weights = BTreeMap::new();
    Ok(weighted_ve(&gm.factors, &gm.ranges, &weights, keep, cap)?.0)
}

/// Variable elimination where summing out `v` weighs its value `i` by
/// `exp(weights[v][i])`. Variables listed in `ranges` but absent from every
/// factor are summed out as free variables. Elimination order is min-degree
/// with ties broken by the variable order.
pub fn weighted_ve<K: Ord + Clone + std::fmt::Debug, T: Scalar>(
    factors: &[Factor<K, T>],
    ranges: &BTreeMap<K, usize>,
    weights: &BTreeMap<K, Vec<T>>,
    keep: &BTreeSet<K>,
    cap: usize,
) -> Result<(Factor<K, T>, VeStats)> {
    let mut stats = VeStats::default();
    let mut pool: Vec<Factor<K, T>> = factors.to_vec();
    let mut remaining: BTreeSet<K> = ranges.keys().filter(|k| !keep.contains(*k)).cloned().collect();
    let mut extra = T::zero();
    while !remaining.is_empty() {
        let mut best: Option<(usize, &K)> = None;
        for v in &remaining {
            let mut nb: BTreeSet<&K> = BTreeSet::new();
            for f in pool.iter().filter(|f| f.args.contains(v)) {
                nb.extend(f.args.iter());
            }
            let deg = nb.len();
            if best.is_none_or(|(d, _)| deg < d) {
                best = Some((deg, v));
            }
        }
        let v = best.expect("non-empty").1.clone();
        remaining.remove(&v);
        let (with, without): (Vec<_>, Vec<_>) = pool.into_iter().partition(|f| f.args.contains(&v));
        pool = without;
        let w = weights.get(&v);
        if with.is_empty() {
            let d = ranges[&v];
            let lw: Vec<T> = match w {
                Some(w) => w.clone(),
                None => vec![T::zero(); d],
            };
            extra = extra + ln_sum(&lw);
            continue;
        }
        let mut prod = with[0].clone();
        for f in &with[1..] {
            prod = factor_multiply(&prod, f)?;
            if prod.potential.len() > cap {
                return Err(Error::Capacity(format!(
                    "elimination table of {} cells exceeds the cap",
                    prod.potential.len()
                )));
            }
            stats.muladds += prod.potential.len() as u64;
        }
        stats.max_cells = stats.max_cells.max(prod.potential.len());
        stats.muladds += prod.potential.len() as u64;
        let i = prod.args.iter().position(|a| *a == v).expect("present");
        let mut args = prod.args.clone();
        args.remove(i);
        pool.push(Factor { args, potential: prod.potential.sum_out(i, w.map(Vec::as_slice)) });
    }
    let mut result = Factor { args: Vec::new(), potential: Potential::scalar_ln(extra) };
    for f in &pool {
        result = factor_multiply(&result, f)?;
        stats.muladds += result.potential.len() as u64;
    }
    for k in keep {
        if !result.args.contains(k) {
            let d = *ranges.get(k).ok_or_else(|| Error::NotFound(format!("{k:?}")))?;
            result = factor_multiply(&result, &Factor { args: vec![k.clone()], potential: Potential::ones(vec![d]) })?;
        }
    }
    stats.max_cells = stats.max_cells.max(result.potential.len());
    Ok((sort_args(&result)?, stats))
}

/// `ln Z` of a ground model by variable elimination.
pub fn ln_partition<T: Scalar>(gm: &GroundModel<T>, cap: usize) -> Result<T> {
    Ok(ground_ve(gm, &BTreeSet::new(), cap)?.potential.ln_values()[0])
}

/// Groups of groundings of `pf` linked through shared target randvars. Each
/// group is returned as the list of grounding substitutions it contains.
pub fn linked_groups<T: Scalar>(vocab: &Vocab, pf: &Parfactor<T>, targets: &[usize]) -> Result<Vec<Vec<Substitution>>> {
    let thetas = gr_substitutions(vocab, &pf.logvars, &pf.constraint)?;
    let mut parent: Vec<usize> = (0..thetas.len()).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut j = i;
        while p[j] != r {
            let n = p[j];
            p[j] = r;
            j = n;
        }
        r
    }
    let mut owner: BTreeMap<GroundAtom, usize> = BTreeMap::new();
    for (i, theta) in thetas.iter().enumerate() {
        for &t in targets {
            let g = pf.args[t]
                .as_atom()
                .ok_or_else(|| Error::not_applicable("targets must be atoms"))?
                .substitute(theta)
                .to_ground()
                .ok_or_else(|| Error::internal("target not ground"))?;
            match owner.get(&g) {
                Some(&j) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
                None => {
                    owner.insert(g, i);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<Substitution>> = BTreeMap::new();
    for (i, theta) in thetas.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(theta.clone());
    }
    Ok(groups.into_values().collect())
}

/// Canonical form of a group of substitutions under renaming of constants:
/// the lexicographically least encoding over all choices of starting element.
pub fn canonical_group(group: &[Substitution]) -> Vec<Vec<usize>> {
    let mut best: Option<Vec<Vec<usize>>> = None;
    for start in group {
        let mut names: BTreeMap<&str, usize> = BTreeMap::new();
        for t in start.values() {
            if let crate::model::Term::Const(c) = t {
                let k = names.len();
                names.entry(c.as_str()).or_insert(k);
            }
        }
        let mut enc: Vec<Vec<usize>> = Vec::new();
        let mut ok = true;
        for theta in group {
            let mut row = Vec::new();
            for t in theta.values() {
                match t {
                    crate::model::Term::Const(c) => match names.get(c.as_str()) {
                        Some(&k) => row.push(k),
                        None => ok = false,
                    },
                    _ => ok = false,
                }
            }
            enc.push(row);
        }
        if !ok {
            continue;
        }
        enc.sort();
        if best.as_ref().is_none_or(|b| enc < *b) {
            best = Some(enc);
        }
    }
    best.unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Atom, Constraint, CountingFormula, LogVar, Predicate, Term};

    fn vocab(n: usize) -> Vocab {
        let mut v = Vocab::new();
        v.add_sized_domain("D", "x", n).unwrap();
        for p in ["S", "A"] {
            v.add_predicate(Predicate::boolean(p, 1)).unwrap();
        }
        v.add_predicate(Predicate::boolean("F", 2)).unwrap();
        v
    }

    fn single(args: Vec<GroundAtom>, shape: Vec<usize>, vals: &[f64]) -> GroundFactor {
        Factor { args, potential: Potential::from_values(shape, vals.to_vec()).unwrap() }
    }

    #[test]
    fn one_factor_per_grounding() {
        let v = vocab(3);
        let pf: Parfactor = Parfactor::from_atoms(
            &v,
            vec![LogVar::new("X", "D")],
            Constraint::new(),
            vec![Atom::parse_simple("S", &["X"], &["X"]), Atom::parse_simple("A", &["X"], &["X"])],
            &[1.0, 2.0, 3.0, 4.0],
        )
        .unwrap();
        assert_eq!(ground_parfactor(&v, &pf).unwrap().len(), 3);
        let sym: Parfactor = Parfactor::from_atoms(
            &v,
            vec![LogVar::new("X", "D"), LogVar::new("Y", "D")],
            Constraint::all_distinct(&["X", "Y"]),
            vec![Atom::parse_simple("F", &["X", "Y"], &["X", "Y"]), Atom::parse_simple("F", &["Y", "X"], &["X", "Y"])],
            &[1.0, 2.0, 3.0, 4.0],
        )
        .unwrap();
        assert_eq!(ground_parfactor(&v, &sym).unwrap().len(), 6);
    }

    #[test]
    fn unsatisfiable_constraint_grounds_to_nothing() {
        let v = vocab(1);
        let pf: Parfactor = Parfactor::from_atoms(
            &v,
            vec![LogVar::new("X", "D"), LogVar::new("Y", "D")],
            Constraint::all_distinct(&["X", "Y"]),
            vec![Atom::parse_simple("F", &["X", "Y"], &["X", "Y"])],
            &[1.0, 2.0],
        )
        .unwrap();
        assert!(ground_parfactor(&v, &pf).unwrap().is_empty());
    }

    #[test]
    fn crv_expansion_uses_histograms() {
        let v = vocab(3);
        let cf = CountingFormula::new(
            LogVar::new("Y", "D"),
            Default::default(),
            Atom::parse_simple("F", &["x1", "Y"], &["Y"]),
        );
        // phi indexed by histogram rank: <0,3>, <1,2>, <2,1>, <3,0>
        let pf: Parfactor = Parfactor::new(
            vec![],
            Constraint::new(),
            vec![Arg::Count(cf)],
            Potential::from_values(vec![4], vec![1.0, 2.0, 3.0, 4.0]).unwrap(),
        );
        pf.validate(&v).unwrap();
        let fs = expand_crv(&v, &pf, DEFAULT_CAP).unwrap();
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].args.len(), 3);
        assert_eq!(fs[0].potential.len(), 8);
        // (true, false, true): histogram {false: 1, true: 2} = <1,2>, rank 1.
        assert!((fs[0].potential.value_at(&[1, 0, 1]) - 2.0).abs() < 1e-12);
        let too_small = expand_crv(&v, &pf, 4);
        assert!(matches!(too_small, Err(Error::Capacity(_))));
    }

    #[test]
    fn trivial_partitions() {
        let a = GroundAtom::new("A", &[]);
        let b = GroundAtom::new("B", &[]);
        let mut gm = GroundModel::default();
        gm.push(single(vec![a.clone()], vec![2], &[1.0, 1.0]));
        assert!((brute_force_partition(&gm, DEFAULT_CAP, false).unwrap() - 2.0).abs() < 1e-12);
        gm.push(single(vec![b], vec![2], &[1.0, 1.0]));
        assert!((brute_force_partition(&gm, DEFAULT_CAP, false).unwrap() - 4.0).abs() < 1e-12);
        assert!((brute_force_partition(&gm, DEFAULT_CAP, true).unwrap() - 4.0).abs() < 1e-12);
        assert!((ln_partition(&gm, DEFAULT_CAP).unwrap().exp() - 4.0).abs() < 1e-12);
        assert!(matches!(brute_force_partition(&gm, 2, false), Err(Error::Capacity(_))));
    }

    #[test]
    fn multiply_and_sum_out() {
        let a = GroundAtom::new("A", &[]);
        let f = single(vec![a.clone()], vec![2], &[0.3, 0.9]);
        let ones = single(vec![a.clone()], vec![2], &[1.0, 1.0]);
        let g = factor_multiply(&f, &ones).unwrap();
        assert_eq!(g, f);
        let z = factor_sum_out(&f, &a).unwrap();
        assert!((z.potential.value_at(&[]) - 1.2).abs() < 1e-12);
        assert!(matches!(factor_sum_out(&f, &GroundAtom::new("B", &[])), Err(Error::NotFound(_))));
    }

    #[test]
    fn keep_everything_is_the_product() {
        let a = GroundAtom::new("A", &[]);
        let b = GroundAtom::new("B", &[]);
        let mut gm = GroundModel::default();
        gm.push(single(vec![a.clone(), b.clone()], vec![2, 2], &[1.0, 2.0, 3.0, 4.0]));
        gm.push(single(vec![b.clone()], vec![2], &[0.5, 2.0]));
        let keep: BTreeSet<_> = [a.clone(), b.clone()].into();
        let f = ground_ve(&gm, &keep, DEFAULT_CAP).unwrap();
        assert!((f.potential.value_at(&[1, 1]) - 8.0).abs() < 1e-12);
        assert!((f.potential.value_at(&[0, 0]) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn linked_groups_of_symmetric_pairs() {
        let v = vocab(4);
        let pf: Parfactor = Parfactor::from_atoms(
            &v,
            vec![LogVar::new("X", "D"), LogVar::new("Y", "D")],
            Constraint::all_distinct(&["X", "Y"]),
            vec![Atom::parse_simple("F", &["X", "Y"], &["X", "Y"]), Atom::parse_simple("F", &["Y", "X"], &["X", "Y"])],
            &[1.0, 2.0, 3.0, 4.0],
        )
        .unwrap();
        let groups = linked_groups(&v, &pf, &[0, 1]).unwrap();
        assert_eq!(groups.len(), 6);
        let canon: BTreeSet<_> = groups.iter().map(|g| canonical_group(g)).collect();
        assert_eq!(canon.len(), 1);
        let _ = Term::var("X");
    }
}
