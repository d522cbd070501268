//! Symbolic vocabulary: logvars, atoms, counting formulas, constraints and
//! parfactors.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexMap;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::histogram;
use crate::potential::Potential;
use crate::scalar::Scalar;

/// A constant or a logvar.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }

    pub fn as_const(&self) -> Option<&str> {
        match self {
            Term::Const(c) => Some(c),
            Term::Var(_) => None,
        }
    }

    fn substitute(&self, theta: &Substitution) -> Term {
        match self {
            Term::Var(v) => theta.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::Const(_) => self.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) => f.write_str(c),
        }
    }
}

/// A logical variable together with the name of its domain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LogVar {
    pub name: String,
    pub domain: String,
}

impl LogVar {
    pub fn new(name: impl Into<String>, domain: impl Into<String>) -> Self {
        LogVar { name: name.into(), domain: domain.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Predicate {
    pub name: String,
    pub arity: usize,
    pub range: Vec<String>,
}

impl Predicate {
    pub fn new(name: impl Into<String>, arity: usize, range: &[&str]) -> Self {
        Predicate {
            name: name.into(),
            arity,
            range: range.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn boolean(name: impl Into<String>, arity: usize) -> Self {
        Predicate::new(name, arity, &["false", "true"])
    }

    pub fn range_index(&self, value: &str) -> Option<usize> {
        self.range.iter().position(|r| r == value)
    }
}

/// A (possibly non-ground) atom `P(t1, ..., tn)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(pred: impl Into<String>, args: Vec<Term>) -> Self {
        Atom { pred: pred.into(), args }
    }

    /// Builds an atom from short names: names listed in `vars` become logvars.
    pub fn parse_simple(pred: &str, args: &[&str], vars: &[&str]) -> Self {
        let args = args
            .iter()
            .map(|a| if vars.contains(a) { Term::var(*a) } else { Term::constant(*a) })
            .collect();
        Atom::new(pred, args)
    }

    /// Distinct logvars in order of first occurrence.
    pub fn vars(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for t in &self.args {
            if let Term::Var(v) = t {
                if !out.contains(&v.as_str()) {
                    out.push(v);
                }
            }
        }
        out
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| matches!(t, Term::Const(_)))
    }

    pub fn substitute(&self, theta: &Substitution) -> Atom {
        Atom {
            pred: self.pred.clone(),
            args: self.args.iter().map(|t| t.substitute(theta)).collect(),
        }
    }

    pub fn rename(&self, map: &BTreeMap<String, String>) -> Atom {
        Atom {
            pred: self.pred.clone(),
            args: self
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => Term::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
                    c => c.clone(),
                })
                .collect(),
        }
    }

    pub fn to_ground(&self) -> Option<GroundAtom> {
        let args = self
            .args
            .iter()
            .map(|t| t.as_const().map(str::to_string))
            .collect::<Option<Vec<_>>>()?;
        Some(GroundAtom { pred: self.pred.clone(), args })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.pred)?;
        for (i, t) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

/// A ground atom, i.e. a randvar.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundAtom {
    pub pred: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new(pred: impl Into<String>, args: &[&str]) -> Self {
        GroundAtom { pred: pred.into(), args: args.iter().map(|s| s.to_string()).collect() }
    }

    pub fn to_atom(&self) -> Atom {
        Atom::new(self.pred.clone(), self.args.iter().map(|c| Term::Const(c.clone())).collect())
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.pred, self.args.join(","))
    }
}

/// One inequality `var != term`. Logvar-logvar inequalities are stored with
/// the lexicographically smaller name in `var`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ineq {
    pub var: String,
    pub term: Term,
}

impl Ineq {
    fn normalized(var: &str, term: &Term) -> Result<Ineq> {
        match term {
            Term::Var(other) if other == var => {
                Err(Error::Domain(format!("unsatisfiable inequality {var} != {var}")))
            }
            Term::Var(other) if other.as_str() < var => {
                Ok(Ineq { var: other.clone(), term: Term::Var(var.to_string()) })
            }
            _ => Ok(Ineq { var: var.to_string(), term: term.clone() }),
        }
    }
}

impl fmt::Display for Ineq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} != {}", self.var, self.term)
    }
}

/// Conjunction of inequalities.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    ineqs: BTreeSet<Ineq>,
}

impl Constraint {
    pub fn new() -> Self {
        Constraint::default()
    }

    /// Convenience constructor from `(var, term)` pairs.
    pub fn from_pairs(pairs: &[(&str, Term)]) -> Result<Self> {
        let mut c = Constraint::new();
        for (v, t) in pairs {
            c.add(v, t.clone())?;
        }
        Ok(c)
    }

    /// All pairs of the given logvars constrained unequal.
    pub fn all_distinct(vars: &[&str]) -> Self {
        let mut c = Constraint::new();
        for (i, a) in vars.iter().enumerate() {
            for b in &vars[i + 1..] {
                c.add(a, Term::var(*b)).expect("distinct names");
            }
        }
        c
    }

    pub fn add(&mut self, var: &str, term: Term) -> Result<()> {
        self.ineqs.insert(Ineq::normalized(var, &term)?);
        Ok(())
    }

    pub fn contains(&self, var: &str, term: &Term) -> bool {
        match Ineq::normalized(var, term) {
            Ok(i) => self.ineqs.contains(&i),
            Err(_) => false,
        }
    }

    pub fn differ(&self, a: &str, b: &str) -> bool {
        self.contains(a, &Term::var(b))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Ineq> {
        self.ineqs.iter()
    }

    pub fn len(&self) -> usize {
        self.ineqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ineqs.is_empty()
    }

    pub fn excluded_constants(&self, var: &str) -> BTreeSet<String> {
        self.ineqs
            .iter()
            .filter(|i| i.var == var)
            .filter_map(|i| i.term.as_const().map(str::to_string))
            .collect()
    }

    /// Logvars constrained unequal to `var` (retrievable from either side).
    pub fn neighbors(&self, var: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for i in &self.ineqs {
            if let Term::Var(o) = &i.term {
                if i.var == var {
                    out.insert(o.clone());
                } else if o == var {
                    out.insert(i.var.clone());
                }
            }
        }
        out
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.ineqs.iter().any(|i| i.var == var || i.term.as_var() == Some(var))
    }

    /// Keeps only inequalities whose logvars are all in `vars`.
    pub fn restrict(&self, vars: &BTreeSet<&str>) -> Constraint {
        Constraint {
            ineqs: self
                .ineqs
                .iter()
                .filter(|i| {
                    vars.contains(i.var.as_str())
                        && i.term.as_var().is_none_or(|v| vars.contains(v))
                })
                .cloned()
                .collect(),
        }
    }

    pub fn without_var(&self, var: &str) -> Constraint {
        Constraint {
            ineqs: self
                .ineqs
                .iter()
                .filter(|i| i.var != var && i.term.as_var() != Some(var))
                .cloned()
                .collect(),
        }
    }

    /// Applies a substitution. Returns `None` when some inequality becomes
    /// false (`c != c` or `X != X`); inequalities that become trivially true
    /// are dropped.
    pub fn substitute(&self, theta: &Substitution) -> Option<Constraint> {
        let mut out = Constraint::new();
        for i in &self.ineqs {
            let lhs = Term::Var(i.var.clone()).substitute(theta);
            let rhs = i.term.substitute(theta);
            match (&lhs, &rhs) {
                (Term::Const(a), Term::Const(b)) => {
                    if a == b {
                        return None;
                    }
                }
                (Term::Var(a), Term::Var(b)) if a == b => return None,
                (Term::Var(a), t) | (t, Term::Var(a)) => {
                    out.ineqs.insert(Ineq::normalized(a, t).ok()?);
                }
            }
        }
        Some(out)
    }

    pub fn rename(&self, map: &BTreeMap<String, String>) -> Constraint {
        let theta: Substitution =
            map.iter().map(|(k, v)| (k.clone(), Term::Var(v.clone()))).collect();
        self.substitute(&theta).expect("renaming is injective")
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, q) in self.ineqs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{q}")?;
        }
        Ok(())
    }
}

/// Mapping from logvars to terms.
pub type Substitution = BTreeMap<String, Term>;

/// Applies `theta` to `atom`, checking that constant images lie in the
/// declared domain of the logvar they replace.
pub fn apply_substitution(
    vocab: &Vocab,
    logvars: &[LogVar],
    atom: &Atom,
    theta: &Substitution,
) -> Result<Atom> {
    for (var, image) in theta {
        if let Term::Const(c) = image {
            let lv = logvars
                .iter()
                .find(|l| &l.name == var)
                .ok_or_else(|| Error::Declaration(format!("logvar {var} is not declared")))?;
            if !vocab.domain(&lv.domain)?.contains(c) {
                return Err(Error::Domain(format!(
                    "constant {c} is not in domain {} of {var}",
                    lv.domain
                )));
            }
        }
    }
    Ok(atom.substitute(theta))
}

/// `#_{X : X != c1, ...}[P(..., X, ...)]`.
///
/// The inner constraint only excludes constants; the counted logvar is bound
/// and never a free logvar of the enclosing parfactor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CountingFormula {
    pub var: LogVar,
    pub excluded: BTreeSet<String>,
    pub atom: Atom,
}

impl CountingFormula {
    pub fn new(var: LogVar, excluded: BTreeSet<String>, atom: Atom) -> Self {
        CountingFormula { var, excluded, atom }
    }

    pub fn free_vars(&self) -> Vec<&str> {
        self.atom.vars().into_iter().filter(|v| *v != self.var.name).collect()
    }

    pub fn substitute(&self, theta: &Substitution) -> CountingFormula {
        let mut theta = theta.clone();
        theta.remove(&self.var.name);
        CountingFormula {
            var: self.var.clone(),
            excluded: self.excluded.clone(),
            atom: self.atom.substitute(&theta),
        }
    }

    /// Renames free logvars. The counted logvar is renamed apart first when
    /// it would capture an image of `map`.
    pub fn rename(&self, map: &BTreeMap<String, String>) -> CountingFormula {
        let mut map = map.clone();
        map.remove(&self.var.name);
        let free = self.free_vars();
        let captured = free
            .iter()
            .any(|v| map.get(*v).is_some_and(|img| *img == self.var.name));
        let mut var = self.var.clone();
        if captured {
            let taken = |n: &str| {
                free.contains(&n) || map.values().any(|img| img == n)
            };
            let mut fresh = format!("{}_", var.name);
            while taken(&fresh) {
                fresh.push('_');
            }
            map.insert(var.name.clone(), fresh.clone());
            var.name = fresh;
        }
        CountingFormula { var, excluded: self.excluded.clone(), atom: self.atom.rename(&map) }
    }

    /// Equality up to renaming of the counted logvar.
    pub fn alpha_eq(&self, other: &CountingFormula) -> bool {
        if self.var.domain != other.var.domain || self.excluded != other.excluded {
            return false;
        }
        let map = BTreeMap::from([(other.var.name.clone(), self.var.name.clone())]);
        let renamed = Atom {
            pred: other.atom.pred.clone(),
            args: other
                .atom
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => Term::Var(map.get(v).cloned().unwrap_or_else(|| v.clone())),
                    c => c.clone(),
                })
                .collect(),
        };
        renamed == self.atom
    }

    /// The formula with its counted logvar renamed to a fixed placeholder.
    pub fn canonical(&self) -> CountingFormula {
        let map = BTreeMap::from([(self.var.name.clone(), "_".to_string())]);
        CountingFormula {
            var: LogVar::new("_", self.var.domain.clone()),
            excluded: self.excluded.clone(),
            atom: self.atom.rename(&map),
        }
    }
}

impl fmt::Display for CountingFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.var.name)?;
        if !self.excluded.is_empty() {
            f.write_str(":")?;
            for (i, c) in self.excluded.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, " {} != {c}", self.var.name)?;
            }
            f.write_str(" ")?;
        }
        write!(f, "[{}]", self.atom)
    }
}

/// A parfactor argument: an atom or a counting formula.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Arg {
    Atom(Atom),
    Count(CountingFormula),
}

impl Arg {
    pub fn atom(&self) -> &Atom {
        match self {
            Arg::Atom(a) => a,
            Arg::Count(c) => &c.atom,
        }
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Arg::Atom(a) => Some(a),
            Arg::Count(_) => None,
        }
    }

    pub fn as_count(&self) -> Option<&CountingFormula> {
        match self {
            Arg::Count(c) => Some(c),
            Arg::Atom(_) => None,
        }
    }

    pub fn is_count(&self) -> bool {
        matches!(self, Arg::Count(_))
    }

    /// Free logvars of the argument.
    pub fn free_vars(&self) -> Vec<&str> {
        match self {
            Arg::Atom(a) => a.vars(),
            Arg::Count(c) => c.free_vars(),
        }
    }

    pub fn substitute(&self, theta: &Substitution) -> Arg {
        match self {
            Arg::Atom(a) => Arg::Atom(a.substitute(theta)),
            Arg::Count(c) => Arg::Count(c.substitute(theta)),
        }
    }

    pub fn rename(&self, map: &BTreeMap<String, String>) -> Arg {
        match self {
            Arg::Atom(a) => Arg::Atom(a.rename(map)),
            Arg::Count(c) => Arg::Count(c.rename(map)),
        }
    }

    /// Syntactic identity, up to renaming of counted logvars.
    pub fn same_as(&self, other: &Arg) -> bool {
        match (self, other) {
            (Arg::Atom(a), Arg::Atom(b)) => a == b,
            (Arg::Count(a), Arg::Count(b)) => a.alpha_eq(b),
            _ => false,
        }
    }
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Atom(a) => write!(f, "{a}"),
            Arg::Count(c) => write!(f, "{c}"),
        }
    }
}

/// Declared domains and predicates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocab {
    pub domains: IndexMap<String, Vec<String>>,
    pub predicates: IndexMap<String, Predicate>,
}

impl Vocab {
    pub fn new() -> Self {
        Vocab::default()
    }

    pub fn add_domain(&mut self, name: &str, constants: &[&str]) -> Result<()> {
        let constants: Vec<String> = constants.iter().map(|s| s.to_string()).collect();
        self.insert_domain(name, constants)
    }

    pub fn insert_domain(&mut self, name: &str, constants: Vec<String>) -> Result<()> {
        if constants.is_empty() {
            return Err(Error::Declaration(format!("domain {name} is empty")));
        }
        let distinct: BTreeSet<&String> = constants.iter().collect();
        if distinct.len() != constants.len() {
            return Err(Error::Declaration(format!("domain {name} repeats a constant")));
        }
        if self.domains.contains_key(name) {
            return Err(Error::Declaration(format!("domain {name} declared twice")));
        }
        self.domains.insert(name.to_string(), constants);
        Ok(())
    }

    /// A domain `name` with constants `prefix1..prefixN`.
    pub fn add_sized_domain(&mut self, name: &str, prefix: &str, n: usize) -> Result<()> {
        self.insert_domain(name, (1..=n).map(|i| format!("{prefix}{i}")).collect())
    }

    pub fn add_predicate(&mut self, p: Predicate) -> Result<()> {
        if p.range.len() < 2 {
            return Err(Error::Range(format!("predicate {} needs a range of size >= 2", p.name)));
        }
        let distinct: BTreeSet<&String> = p.range.iter().collect();
        if distinct.len() != p.range.len() {
            return Err(Error::Range(format!("predicate {} repeats a range value", p.name)));
        }
        if self.predicates.contains_key(&p.name) {
            return Err(Error::Declaration(format!("predicate {} declared twice", p.name)));
        }
        self.predicates.insert(p.name.clone(), p);
        Ok(())
    }

    pub fn domain(&self, name: &str) -> Result<&[String]> {
        self.domains
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::Declaration(format!("domain {name} is not declared")))
    }

    pub fn predicate(&self, name: &str) -> Result<&Predicate> {
        self.predicates
            .get(name)
            .ok_or_else(|| Error::Declaration(format!("predicate {name} is not declared")))
    }

    pub fn range_size(&self, pred: &str) -> Result<usize> {
        Ok(self.predicate(pred)?.range.len())
    }

    /// Number of randvars counted by a counting formula.
    pub fn group_size(&self, cf: &CountingFormula) -> Result<usize> {
        let dom = self.domain(&cf.var.domain)?;
        Ok(dom.iter().filter(|c| !cf.excluded.contains(*c)).count())
    }

    /// Number of values of an argument: the predicate range for atoms, the
    /// number of histograms for counting formulas.
    pub fn arg_size(&self, arg: &Arg) -> Result<usize> {
        match arg {
            Arg::Atom(a) => self.range_size(&a.pred),
            Arg::Count(c) => {
                let n = self.group_size(c)?;
                let r = self.range_size(&c.atom.pred)?;
                histogram::count(n, r).ok_or_else(|| {
                    Error::Capacity(format!("histogram range of {c} does not fit in memory"))
                })
            }
        }
    }

    pub fn shape(&self, args: &[Arg]) -> Result<Vec<usize>> {
        args.iter().map(|a| self.arg_size(a)).collect()
    }

    /// Returns a fresh predicate name starting with `base`.
    pub fn fresh_predicate_name(&self, base: &str) -> String {
        if !self.predicates.contains_key(base) {
            return base.to_string();
        }
        (1..).map(|i| format!("{base}_{i}")).find(|n| !self.predicates.contains_key(n)).unwrap()
    }
}

/// `forall L : C . phi(args)`, with a pending rational exponent on `phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Parfactor<T = f64> {
    pub logvars: Vec<LogVar>,
    pub constraint: Constraint,
    pub args: Vec<Arg>,
    pub potential: Potential<T>,
    pub scale: Ratio<u64>,
}

impl<T: Scalar> Parfactor<T> {
    pub fn new(
        logvars: Vec<LogVar>,
        constraint: Constraint,
        args: Vec<Arg>,
        potential: Potential<T>,
    ) -> Self {
        Parfactor { logvars, constraint, args, potential, scale: Ratio::from_integer(1) }
    }

    /// Parfactor over atoms only, with potential given as linear values.
    pub fn from_atoms(
        vocab: &Vocab,
        logvars: Vec<LogVar>,
        constraint: Constraint,
        atoms: Vec<Atom>,
        values: &[f64],
    ) -> Result<Self> {
        let args: Vec<Arg> = atoms.into_iter().map(Arg::Atom).collect();
        let shape = vocab.shape(&args)?;
        let potential = Potential::from_values(shape, values.iter().map(|&v| T::of(v)).collect())?;
        let pf = Parfactor::new(logvars, constraint, args, potential);
        pf.validate(vocab)?;
        Ok(pf)
    }

    pub fn logvar(&self, name: &str) -> Option<&LogVar> {
        self.logvars.iter().find(|l| l.name == name)
    }

    pub fn logvar_names(&self) -> Vec<&str> {
        self.logvars.iter().map(|l| l.name.as_str()).collect()
    }

    pub fn has_counting(&self) -> bool {
        self.args.iter().any(Arg::is_count)
    }

    /// Arguments in which `var` occurs free.
    pub fn occurrences(&self, var: &str) -> Vec<usize> {
        (0..self.args.len()).filter(|&i| self.args[i].free_vars().contains(&var)).collect()
    }

    pub fn scale_f64(&self) -> f64 {
        *self.scale.numer() as f64 / *self.scale.denom() as f64
    }

    /// Applies the pending exponent to the potential, leaving scale 1.
    pub fn materialize(&self) -> Parfactor<T> {
        if self.scale == Ratio::from_integer(1) {
            return self.clone();
        }
        let mut out = self.clone();
        out.potential = self.potential.powf(T::of(self.scale_f64()));
        out.scale = Ratio::from_integer(1);
        out
    }

    pub fn validate(&self, vocab: &Vocab) -> Result<()> {
        let mut names = BTreeSet::new();
        for lv in &self.logvars {
            vocab.domain(&lv.domain)?;
            if !names.insert(lv.name.as_str()) {
                return Err(Error::Declaration(format!("logvar {} bound twice", lv.name)));
            }
        }
        for ineq in self.constraint.iter() {
            let lv = self.logvar(&ineq.var).ok_or_else(|| {
                Error::Declaration(format!("constraint mentions unbound logvar {}", ineq.var))
            })?;
            match &ineq.term {
                Term::Var(o) => {
                    let other = self.logvar(o).ok_or_else(|| {
                        Error::Declaration(format!("constraint mentions unbound logvar {o}"))
                    })?;
                    if other.domain != lv.domain {
                        return Err(Error::Domain(format!(
                            "inequality {ineq} relates logvars of different domains"
                        )));
                    }
                }
                Term::Const(c) => {
                    if !vocab.domain(&lv.domain)?.contains(c) {
                        return Err(Error::Domain(format!(
                            "constant {c} is not in domain {} of {}",
                            lv.domain, lv.name
                        )));
                    }
                }
            }
        }
        let mut counted_seen: Vec<&Atom> = Vec::new();
        for arg in &self.args {
            let atom = arg.atom();
            let pred = vocab.predicate(&atom.pred)?;
            if pred.arity != atom.args.len() {
                return Err(Error::Arity(format!(
                    "{atom} has {} arguments, {} expects {}",
                    atom.args.len(),
                    pred.name,
                    pred.arity
                )));
            }
            for v in arg.free_vars() {
                if self.logvar(v).is_none() {
                    return Err(Error::Declaration(format!("logvar {v} in {arg} is not bound")));
                }
            }
            for t in &atom.args {
                if let Term::Const(c) = t {
                    if !vocab.domains.values().any(|d| d.contains(c)) {
                        return Err(Error::Declaration(format!("constant {c} is not declared")));
                    }
                }
            }
            if let Arg::Count(cf) = arg {
                vocab.domain(&cf.var.domain)?;
                if self.logvar(&cf.var.name).is_some() {
                    return Err(Error::Declaration(format!(
                        "counted logvar {} is also a parfactor logvar",
                        cf.var.name
                    )));
                }
                if !atom.vars().contains(&cf.var.name.as_str()) {
                    return Err(Error::Declaration(format!(
                        "counted logvar {} does not occur in {}",
                        cf.var.name, cf.atom
                    )));
                }
                if counted_seen.contains(&atom) {
                    return Err(Error::Declaration(format!("{atom} is counted twice")));
                }
                counted_seen.push(atom);
            }
        }
        let shape = vocab.shape(&self.args)?;
        if shape != self.potential.shape() {
            return Err(Error::Arity(format!(
                "potential shape {:?} does not match argument ranges {:?}",
                self.potential.shape(),
                shape
            )));
        }
        if *self.scale.numer() == 0 {
            return Err(Error::Domain("exponent scale must be positive".into()));
        }
        Ok(())
    }
}

impl<T: Scalar> fmt::Display for Parfactor<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("phi(")?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")?;
        if self.scale != Ratio::from_integer(1) {
            write!(f, "^{}", self.scale)?;
        }
        if !self.constraint.is_empty() {
            write!(f, " | {}", self.constraint)?;
        }
        Ok(())
    }
}

/// A set of parfactors over a shared vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct Model<T = f64> {
    pub vocab: Vocab,
    pub parfactors: Vec<Parfactor<T>>,
}

impl<T: Scalar> Model<T> {
    /// The same model with potentials in another scalar type.
    pub fn cast<U: Scalar>(&self) -> Model<U> {
        let parfactors = self
            .parfactors
            .iter()
            .map(|pf| Parfactor {
                logvars: pf.logvars.clone(),
                constraint: pf.constraint.clone(),
                args: pf.args.clone(),
                potential: pf.potential.cast(),
                scale: pf.scale,
            })
            .collect();
        Model { vocab: self.vocab.clone(), parfactors }
    }

    pub fn new(vocab: Vocab) -> Self {
        Model { vocab, parfactors: Vec::new() }
    }

    pub fn push(&mut self, pf: Parfactor<T>) -> Result<()> {
        pf.validate(&self.vocab)?;
        self.parfactors.push(pf);
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.parfactors.iter().try_for_each(|p| p.validate(&self.vocab))
    }

    pub fn with_parfactors(&self, parfactors: Vec<Parfactor<T>>) -> Model<T> {
        Model { vocab: self.vocab.clone(), parfactors }
    }

    /// Largest number of distinct logvars in one parfactor.
    pub fn max_logvars(&self) -> usize {
        self.parfactors.iter().map(|p| p.logvars.len()).max().unwrap_or(0)
    }

    pub fn has_counting(&self) -> bool {
        self.parfactors.iter().any(Parfactor::has_counting)
    }

    /// Copy of the model with every domain replaced by `n` fresh constants.
    /// Constants mentioned by the model are kept first so that references stay
    /// valid.
    pub fn resized(&self, n: usize) -> Result<Model<T>> {
        let mut vocab = Vocab::new();
        for (name, consts) in &self.vocab.domains {
            let used: Vec<String> = consts
                .iter()
                .filter(|c| self.mentions_constant(c))
                .cloned()
                .collect();
            if used.len() > n {
                return Err(Error::Domain(format!(
                    "domain {name} mentions {} constants, cannot shrink to {n}",
                    used.len()
                )));
            }
            let mut out = used;
            let mut k = 1;
            while out.len() < n {
                let c = format!("{}{}", name.to_lowercase(), k);
                k += 1;
                if !out.contains(&c) && !self.mentions_constant(&c) {
                    out.push(c);
                }
            }
            vocab.insert_domain(name, out)?;
        }
        vocab.predicates = self.vocab.predicates.clone();
        let mut m = Model::new(vocab);
        for pf in &self.parfactors {
            let pf = pf.clone();
            let shape = m.vocab.shape(&pf.args)?;
            if shape != pf.potential.shape() {
                return Err(Error::Domain("cannot resize a model with counting formulas".into()));
            }
            m.parfactors.push(pf);
        }
        Ok(m)
    }

    fn mentions_constant(&self, c: &str) -> bool {
        self.parfactors.iter().any(|p| {
            p.constraint.iter().any(|i| i.term.as_const() == Some(c))
                || p.args.iter().any(|a| {
                    a.atom().args.iter().any(|t| t.as_const() == Some(c))
                        || a.as_count().is_some_and(|cf| cf.excluded.contains(c))
                })
        })
    }
}
