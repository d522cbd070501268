//! Permutations of a parfactor's logvars and their closure under composition.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{Atom, Term};

/// A bijection on an ordered logvar set, stored as image indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    vars: Vec<String>,
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(vars: &[&str]) -> Self {
        Permutation {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            images: (0..vars.len()).collect(),
        }
    }

    /// `images[i]` is the image of `vars[i]`, as in the tuple notation
    /// `(W', X', Y', Z')`.
    pub fn from_images(vars: &[&str], images: &[&str]) -> Result<Self> {
        if vars.len() != images.len() {
            return Err(Error::Arity("permutation needs one image per logvar".into()));
        }
        let idx: Result<Vec<usize>> = images
            .iter()
            .map(|im| {
                vars.iter()
                    .position(|v| v == im)
                    .ok_or_else(|| Error::Arity(format!("image {im} is outside the logvar set")))
            })
            .collect();
        let idx = idx?;
        let distinct: BTreeSet<usize> = idx.iter().copied().collect();
        if distinct.len() != idx.len() {
            return Err(Error::Arity("permutation images are not distinct".into()));
        }
        Ok(Permutation { vars: vars.iter().map(|s| s.to_string()).collect(), images: idx })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn image_names(&self) -> Vec<&str> {
        self.images.iter().map(|&i| self.vars[i].as_str()).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn apply<'a>(&'a self, var: &'a str) -> &'a str {
        match self.vars.iter().position(|v| v == var) {
            Some(i) => &self.vars[self.images[i]],
            None => var,
        }
    }

    /// `(self . other)(X) = self(other(X))`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.vars != other.vars {
            return Err(Error::Arity("composing permutations over different logvar sets".into()));
        }
        Ok(Permutation {
            vars: self.vars.clone(),
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { vars: self.vars.clone(), images: inv }
    }

    pub fn as_map(&self) -> BTreeMap<String, String> {
        self.vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), self.vars[self.images[i]].clone()))
            .collect()
    }

    pub fn apply_atom(&self, atom: &Atom) -> Atom {
        atom.rename(&self.as_map())
    }

    /// The permutation mapping `from` onto `to` position by position, if the
    /// two atoms are constant-free, share a predicate and agree on repeated
    /// logvars. Logvars absent from `from` must also be absent from `to`;
    /// they are fixed.
    pub fn between(vars: &[&str], from: &Atom, to: &Atom) -> Option<Permutation> {
        if from.pred != to.pred || from.args.len() != to.args.len() {
            return None;
        }
        let mut map: BTreeMap<&str, &str> = BTreeMap::new();
        for (a, b) in from.args.iter().zip(&to.args) {
            match (a, b) {
                (Term::Var(x), Term::Var(y)) => {
                    if let Some(prev) = map.insert(x, y) {
                        if prev != y.as_str() {
                            return None;
                        }
                    }
                }
                _ => return None,
            }
        }
        let used: BTreeSet<&str> = map.values().copied().collect();
        if used.len() != map.len() {
            return None;
        }
        let free_src: Vec<&str> = vars.iter().copied().filter(|v| !map.contains_key(v)).collect();
        let free_dst: Vec<&str> = vars.iter().copied().filter(|v| !used.contains(v)).collect();
        if free_src != free_dst {
            return None;
        }
        let images: Vec<&str> = vars.iter().map(|v| map.get(v).copied().unwrap_or(v)).collect();
        Permutation::from_images(vars, &images).ok()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.image_names().join(","))
    }
}

/// A set of permutations closed under composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutationGroup {
    vars: Vec<String>,
    elements: Vec<Permutation>,
}

impl PermutationGroup {
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Elements in canonical (lexicographic on image sequences) order.
    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.elements.contains(p)
    }
}

/// Least superset of `gens` closed under composition, by worklist.
pub fn closure(vars: &[&str], gens: &[Permutation]) -> Result<PermutationGroup> {
    let id = Permutation::identity(vars);
    let mut set: BTreeSet<Permutation> = BTreeSet::new();
    let mut queue: VecDeque<Permutation> = VecDeque::new();
    for g in gens {
        if g.vars.iter().map(String::as_str).ne(vars.iter().copied()) {
            return Err(Error::Arity("generator over a different logvar set".into()));
        }
        if set.insert(g.clone()) {
            queue.push_back(g.clone());
        }
    }
    if set.is_empty() {
        set.insert(id.clone());
        queue.push_back(id);
    }
    while let Some(p) = queue.pop_front() {
        let current: Vec<Permutation> = set.iter().cloned().collect();
        for q in current {
            for r in [p.compose(&q)?, q.compose(&p)?] {
                if set.insert(r.clone()) {
                    queue.push_back(r);
                }
            }
        }
    }
    let mut elements: Vec<Permutation> = set.into_iter().collect();
    elements.sort_by(|a, b| a.image_names().cmp(&b.image_names()));
    Ok(PermutationGroup { vars: vars.iter().map(|s| s.to_string()).collect(), elements })
}

#[cfg(test)]
mod tests {
    use super::*;

    const WXYZ: [&str; 4] = ["W", "X", "Y", "Z"];

    fn p(images: &[&str]) -> Permutation {
        Permutation::from_images(&WXYZ, images).unwrap()
    }

    #[test]
    fn right_shift_squared() {
        let rs = p(&["Z", "W", "X", "Y"]);
        assert_eq!(rs.compose(&rs).unwrap().to_string(), "(Y,Z,W,X)");
    }

    #[test]
    fn identity_is_neutral_and_swap_is_involution() {
        let rs = p(&["Z", "W", "X", "Y"]);
        let id = Permutation::identity(&WXYZ);
        assert_eq!(id.compose(&rs).unwrap(), rs);
        let swap = Permutation::from_images(&["X", "Y"], &["Y", "X"]).unwrap();
        assert!(swap.compose(&swap).unwrap().is_identity());
    }

    #[test]
    fn mismatched_sets_are_rejected() {
        let a = Permutation::identity(&["X", "Y"]);
        let b = Permutation::identity(&["X", "Z"]);
        assert!(matches!(a.compose(&b), Err(Error::Arity(_))));
        assert!(Permutation::from_images(&["X", "Y"], &["X", "X"]).is_err());
    }

    #[test]
    fn shift_closure_has_four_elements() {
        let gens = [p(&["W", "X", "Y", "Z"]), p(&["Z", "W", "X", "Y"]), p(&["X", "Y", "Z", "W"])];
        let g = closure(&WXYZ, &gens).unwrap();
        assert_eq!(g.len(), 4);
        assert!(g.contains(&p(&["Y", "Z", "W", "X"])));
    }

    #[test]
    fn swap_closure_has_two_elements() {
        let vars = ["X", "Y"];
        let swap = Permutation::from_images(&vars, &["Y", "X"]).unwrap();
        let g = closure(&vars, &[Permutation::identity(&vars), swap]).unwrap();
        assert_eq!(g.len(), 2);
        let g = closure(&vars, &[Permutation::identity(&vars)]).unwrap();
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn permutation_between_atoms() {
        let a1 = Atom::parse_simple("F", &["W", "X", "Y", "Z"], &WXYZ);
        let a2 = Atom::parse_simple("F", &["Z", "W", "X", "Y"], &WXYZ);
        let l = Permutation::between(&WXYZ, &a1, &a2).unwrap();
        assert_eq!(l.to_string(), "(Z,W,X,Y)");
        assert_eq!(l.apply_atom(&a1), a2);
    }
}
