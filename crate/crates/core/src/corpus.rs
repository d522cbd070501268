//! Benchmark families and random model generators.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{Atom, Constraint, LogVar, Model, Parfactor, Predicate, Term, Vocab};

/// The relational patterns used to exercise the 2-logvar planner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Homophily,
    Symmetry,
    Antisymmetry,
    Reflexivity,
    Transitive,
}

/// Logvars, constraint, atoms and row values of one family parfactor.
type PfRows = (Vec<LogVar>, Constraint, Vec<Atom>, Vec<f64>);

impl Family {
    pub const ALL: [Family; 5] =
        [Family::Homophily, Family::Symmetry, Family::Antisymmetry, Family::Reflexivity, Family::Transitive];

    /// Largest joint range the 1-logvar phase builds for this family.
    pub fn joint_range(self) -> usize {
        match self {
            Family::Homophily => 2,
            Family::Transitive => 2,
            _ => 4,
        }
    }

    /// The family's model over a domain of `n` people.
    pub fn model(self, n: usize) -> Result<Model> {
        let mut v = Vocab::new();
        v.add_sized_domain("Person", "p", n)?;
        let lv = |names: &[&str]| names.iter().map(|x| LogVar::new(*x, "Person")).collect::<Vec<_>>();
        let at = |p: &str, args: &[&str]| Atom::new(p, args.iter().map(|a| Term::var(*a)).collect());
        let xy = || Constraint::all_distinct(&["X", "Y"]);
        let mut pfs: Vec<PfRows> = Vec::new();
        match self {
            Family::Homophily => {
                v.add_predicate(Predicate::boolean("Smokes", 1))?;
                v.add_predicate(Predicate::boolean("Friends", 2))?;
                pfs.push((lv(&["X"]), Constraint::new(), vec![at("Smokes", &["X"])], vec![1.4, 0.7]));
                pfs.push((
                    lv(&["X", "Y"]),
                    xy(),
                    vec![at("Smokes", &["X"]), at("Friends", &["X", "Y"]), at("Smokes", &["Y"])],
                    vec![1.0, 1.0, 1.0, 0.6, 1.0, 1.0, 0.6, 1.8],
                ));
            }
            Family::Symmetry => {
                v.add_predicate(Predicate::boolean("S", 1))?;
                v.add_predicate(Predicate::boolean("F", 2))?;
                v.add_predicate(Predicate::boolean("A", 1))?;
                pfs.push((lv(&["X"]), Constraint::new(), vec![at("S", &["X"])], vec![1.2, 0.9]));
                pfs.push((
                    lv(&["X", "Y"]),
                    xy(),
                    vec![at("S", &["X"]), at("F", &["X", "Y"]), at("F", &["Y", "X"]), at("A", &["Y"])],
                    (0..16).map(|k| 0.6 + 0.1 * ((k * 7) % 11) as f64).collect(),
                ));
                pfs.push((lv(&["X"]), Constraint::new(), vec![at("A", &["X"])], vec![0.8, 1.3]));
            }
            Family::Antisymmetry => {
                v.add_predicate(Predicate::boolean("Sm", 2))?;
                v.add_predicate(Predicate::boolean("B", 1))?;
                pfs.push((
                    lv(&["X", "Y"]),
                    Constraint::new(),
                    vec![at("Sm", &["X", "Y"]), at("Sm", &["Y", "X"])],
                    vec![1.0, 1.2, 1.2, 0.3],
                ));
                pfs.push((
                    lv(&["X", "Y"]),
                    Constraint::new(),
                    vec![at("B", &["X"]), at("Sm", &["X", "Y"])],
                    vec![1.1, 0.9, 0.7, 1.5],
                ));
            }
            Family::Reflexivity => {
                v.add_predicate(Predicate::boolean("K", 2))?;
                v.add_predicate(Predicate::boolean("P", 1))?;
                pfs.push((lv(&["X"]), Constraint::new(), vec![at("K", &["X", "X"])], vec![0.5, 1.5]));
                pfs.push((
                    lv(&["X", "Y"]),
                    Constraint::new(),
                    vec![at("K", &["X", "Y"]), at("P", &["X"])],
                    vec![1.0, 0.8, 1.3, 1.1],
                ));
            }
            Family::Transitive => {
                v.add_predicate(Predicate::boolean("L", 2))?;
                pfs.push((
                    lv(&["X", "Y", "Z"]),
                    Constraint::new(),
                    vec![at("L", &["X", "Y"]), at("L", &["Y", "Z"]), at("L", &["X", "Z"])],
                    vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.4, 1.0],
                ));
            }
        }
        let mut m = Model::new(v);
        for (l, c, a, vals) in pfs {
            let pf = Parfactor::from_atoms(&m.vocab, l, c, a, &vals)?;
            m.push(pf)?;
        }
        Ok(m)
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "homophily" => Family::Homophily,
            "symmetry" => Family::Symmetry,
            "antisymmetry" | "anti-symmetry" => Family::Antisymmetry,
            "reflexivity" => Family::Reflexivity,
            "transitive" => Family::Transitive,
            _ => return Err(Error::Domain(format!("unknown family {s}"))),
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Homophily => "homophily",
            Family::Symmetry => "symmetry",
            Family::Antisymmetry => "antisymmetry",
            Family::Reflexivity => "reflexivity",
            Family::Transitive => "transitive",
        })
    }
}

fn random_values<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(0.1..2.0)).collect()
}

fn range_labels(r: usize) -> Vec<String> {
    if r == 2 {
        vec!["false".into(), "true".into()]
    } else {
        (0..r).map(|k| format!("v{k}")).collect()
    }
}

fn add_pred(v: &mut Vocab, name: &str, arity: usize, r: usize) -> Result<()> {
    let labels = range_labels(r);
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    v.add_predicate(Predicate::new(name, arity, &refs))
}

/// Random model whose atoms have at most one logvar: unary predicates over
/// one or two logvars, plus ground atoms and atoms of a binary predicate with
/// one constant argument. Predicates whose atoms meet on a logvar or on an
/// unequal pair have range product at most `max_joint`.
pub fn random_one_logvar_model<R: Rng>(rng: &mut R, n: usize, max_joint: usize) -> Result<Model> {
    loop {
        let mut v = Vocab::new();
        v.add_sized_domain("D", "d", n)?;
        let np = rng.gen_range(1..=3);
        let mut preds = Vec::new();
        for k in 0..np {
            let r = if rng.gen_bool(0.3) { 3 } else { 2 };
            let arity = if k == 2 && rng.gen_bool(0.5) { 2 } else { 1 };
            let name = format!("P{k}");
            add_pred(&mut v, &name, arity, r)?;
            preds.push((name, arity, r));
        }
        let mut m = Model::new(v);
        for _ in 0..rng.gen_range(1..=3) {
            let nv = rng.gen_range(0..=2);
            let names = ["X", "Y"];
            let logvars: Vec<LogVar> = names[..nv].iter().map(|x| LogVar::new(*x, "D")).collect();
            let mut c = Constraint::new();
            if nv == 2 && rng.gen_bool(0.6) {
                c.add("X", Term::var("Y"))?;
            }
            let mut atoms: Vec<Atom> = Vec::new();
            for _ in 0..rng.gen_range(1..=3) {
                let (p, arity, _) = preds.choose(rng).expect("non-empty").clone();
                let pick = |rng: &mut R| -> Term {
                    if nv > 0 && rng.gen_bool(0.85) {
                        Term::var(names[rng.gen_range(0..nv)])
                    } else {
                        Term::constant("d1")
                    }
                };
                let args = if arity == 1 { vec![pick(rng)] } else { vec![Term::constant("d1"), pick(rng)] };
                let a = Atom::new(p, args);
                if !atoms.contains(&a) {
                    atoms.push(a);
                }
            }
            let shape: usize = atoms.iter().map(|a| m.vocab.range_size(&a.pred).unwrap()).product();
            let vals = random_values(rng, shape);
            m.push(Parfactor::from_atoms(&m.vocab, logvars, c, atoms, &vals)?)?;
        }
        if joint_bound(&m) <= max_joint {
            return Ok(m);
        }
    }
}

/// Upper bound on the joint range built from the model's unary atoms:
/// predicates meeting on a logvar or across an inequality are merged.
fn joint_bound(m: &Model) -> usize {
    let preds: Vec<&String> = m.vocab.predicates.keys().collect();
    let mut parent: Vec<usize> = (0..preds.len()).collect();
    fn root(p: &mut [usize], i: usize) -> usize {
        if p[i] == i {
            i
        } else {
            let r = root(p, p[i]);
            p[i] = r;
            r
        }
    }
    let idx = |name: &str| preds.iter().position(|p| *p == name).unwrap();
    for pf in &m.parfactors {
        let mut on: Vec<(String, usize)> = Vec::new();
        for a in &pf.args {
            for v in a.atom().vars() {
                on.push((v.to_string(), idx(&a.atom().pred)));
            }
        }
        for (v, p) in &on {
            for (w, q) in &on {
                if v == w || pf.constraint.differ(v, w) {
                    let (a, b) = (root(&mut parent, *p), root(&mut parent, *q));
                    parent[a] = b;
                }
            }
        }
    }
    let mut prod = vec![1usize; preds.len()];
    for (i, p) in preds.iter().enumerate() {
        let r = root(&mut parent, i);
        prod[r] *= m.vocab.range_size(p).unwrap();
    }
    prod.into_iter().max().unwrap_or(1)
}

/// Random 2-logvar model over boolean and ternary predicates.
pub fn random_two_logvar_model<R: Rng>(rng: &mut R, n: usize) -> Result<Model> {
    let mut v = Vocab::new();
    v.add_sized_domain("D", "d", n)?;
    add_pred(&mut v, "U", 1, if rng.gen_bool(0.3) { 3 } else { 2 })?;
    add_pred(&mut v, "F", 2, 2)?;
    let mut m = Model::new(v);
    let xy = [LogVar::new("X", "D"), LogVar::new("Y", "D")];
    let choices: [Atom; 5] = [
        Atom::parse_simple("F", &["X", "Y"], &["X", "Y"]),
        Atom::parse_simple("F", &["Y", "X"], &["X", "Y"]),
        Atom::parse_simple("U", &["X"], &["X"]),
        Atom::parse_simple("U", &["Y"], &["Y"]),
        Atom::parse_simple("F", &["X", "X"], &["X"]),
    ];
    for _ in 0..rng.gen_range(1..=3) {
        let mut atoms: Vec<Atom> = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            let a = choices.choose(rng).expect("non-empty").clone();
            if !atoms.contains(&a) {
                atoms.push(a);
            }
        }
        let c = if rng.gen_bool(0.7) { Constraint::all_distinct(&["X", "Y"]) } else { Constraint::new() };
        let shape: usize = atoms.iter().map(|a| m.vocab.range_size(&a.pred).unwrap()).product();
        let vals = random_values(rng, shape);
        m.push(Parfactor::from_atoms(&m.vocab, xy.to_vec(), c, atoms, &vals)?)?;
    }
    if rng.gen_bool(0.5) {
        let vals = random_values(rng, m.vocab.range_size("U")?);
        m.push(Parfactor::from_atoms(&m.vocab, vec![xy[0].clone()], Constraint::new(), vec![choices[2].clone()], &vals)?)?;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn families_validate() {
        for f in Family::ALL {
            f.model(3).unwrap().validate().unwrap();
            assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
        }
    }

    #[test]
    fn random_models_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            random_one_logvar_model(&mut rng, 3, 4).unwrap().validate().unwrap();
            random_two_logvar_model(&mut rng, 3).unwrap().validate().unwrap();
        }
    }
}
