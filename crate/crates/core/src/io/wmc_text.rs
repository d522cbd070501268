//! The `.wmc` format: weighted predicates and constrained clauses.
//!
//! ```text
//! domain D = {a, b}
//! weight P = 0.3
//! weight Q/1 = 0.6
//! clause !P(X) v Q(Y) | X != Y
//! clause [X in D] P(X) v Q(a)
//! ```
//!
//! Without a binder, capitalized names are logvars of the first domain. Without
//! a domain declaration, a domain `D` of `DEFAULT_DOMAIN_SIZE` constants is used.

use indexmap::IndexMap;

use super::lexer::{at, Cursor};
use super::model_text::parse_atom;
use crate::error::{Error, Result};
use crate::model::{Constraint, LogVar, Predicate, Term, Vocab};
use crate::wmc::{Clause, Literal, WmcModel, DEFAULT_DOMAIN_SIZE};

struct RawClause {
    line: usize,
    binder: Option<Vec<LogVar>>,
    literals: Vec<(usize, Literal)>,
    constraint: Constraint,
}

fn is_capitalized(w: &str) -> bool {
    w.chars().next().is_some_and(char::is_uppercase)
}

/// Parses a `.wmc` file.
pub fn parse_wmc(text: &str) -> Result<WmcModel> {
    let mut vocab = Vocab::new();
    let mut weights: IndexMap<String, (f64, Option<usize>, usize)> = IndexMap::new();
    let mut raw: Vec<RawClause> = Vec::new();
    for (i, src) in text.lines().enumerate() {
        let line = i + 1;
        let mut c = Cursor::new(src, line)?;
        if c.at_end() {
            continue;
        }
        let col = c.col();
        match c.word("declaration")? {
            "domain" => {
                let name = c.word("domain name")?;
                c.expect("=")?;
                let consts = c.list("{", "}", |c| c.word("constant").map(str::to_string))?;
                c.finish()?;
                vocab.insert_domain(name, consts).map_err(|e| at(line, col, e))?;
            }
            "weight" => {
                let pcol = c.col();
                let name = c.word("predicate")?;
                let arity = if c.eat("/") { Some(c.number::<usize>("arity")?) } else { None };
                c.expect("=")?;
                let wcol = c.col();
                let w = c.real("weight")?;
                if w > 1.0 {
                    return Err(Error::Parse { line, col: wcol, msg: format!("weight {w} is outside [0,1]") });
                }
                c.finish()?;
                if weights.insert(name.to_string(), (w, arity, line)).is_some() {
                    return Err(Error::Parse { line, col: pcol, msg: format!("duplicate weight for {name}") });
                }
            }
            "clause" => raw.push(parse_clause(&mut c)?),
            w => return Err(Error::Parse { line, col, msg: format!("unknown declaration `{w}`") }),
        }
    }
    if vocab.domains.is_empty() {
        vocab.add_sized_domain("D", "d", DEFAULT_DOMAIN_SIZE)?;
    }
    let default_domain = vocab.domains.keys().next().expect("a domain").clone();
    let mut signatures: IndexMap<String, Vec<String>> = IndexMap::new();
    let mut clauses = Vec::new();
    for rc in raw {
        let binder = rc.binder.clone();
        let lookup = |name: &str| -> Option<String> {
            match &binder {
                Some(b) => b.iter().find(|l| l.name == name).map(|l| l.domain.clone()),
                None => is_capitalized(name).then(|| default_domain.clone()),
            }
        };
        let mut logvars: Vec<LogVar> = binder.clone().unwrap_or_default();
        let mut literals = Vec::new();
        for (col, lit) in rc.literals {
            let (_, arity, _) = weights.get(&lit.atom.pred).ok_or_else(|| Error::Parse {
                line: rc.line,
                col,
                msg: format!("predicate {} has no weight", lit.atom.pred),
            })?;
            if let Some(k) = arity {
                if *k != lit.atom.args.len() {
                    return Err(Error::Parse { line: rc.line, col, msg: format!("{} expects {k} arguments", lit.atom.pred) });
                }
            }
            let mut args = Vec::new();
            let mut sig = Vec::new();
            for t in &lit.atom.args {
                let name = match t {
                    Term::Var(v) | Term::Const(v) => v.as_str(),
                };
                match lookup(name) {
                    Some(d) => {
                        if !logvars.iter().any(|l| l.name == name) {
                            logvars.push(LogVar::new(name, d.clone()));
                        }
                        args.push(Term::var(name));
                        sig.push(d);
                    }
                    None => {
                        let d = vocab.domains.iter().find(|(_, cs)| cs.iter().any(|c| c == name)).map(|(d, _)| d.clone());
                        let d = d.ok_or_else(|| Error::Parse {
                            line: rc.line,
                            col,
                            msg: format!("constant {name} is not in any domain"),
                        })?;
                        args.push(Term::constant(name));
                        sig.push(d);
                    }
                }
            }
            match signatures.get(&lit.atom.pred) {
                Some(s) if *s != sig => {
                    return Err(Error::Parse {
                        line: rc.line,
                        col,
                        msg: format!("{} is used with inconsistent argument domains", lit.atom.pred),
                    })
                }
                Some(_) => {}
                None => {
                    signatures.insert(lit.atom.pred.clone(), sig);
                }
            }
            literals.push(Literal { positive: lit.positive, atom: crate::model::Atom::new(lit.atom.pred, args) });
        }
        let mut constraint = Constraint::new();
        for q in rc.constraint.iter() {
            if !logvars.iter().any(|l| l.name == q.var) {
                return Err(Error::Parse { line: rc.line, col: 1, msg: format!("{} does not occur in the clause", q.var) });
            }
            let term = match &q.term {
                Term::Var(v) | Term::Const(v) if logvars.iter().any(|l| &l.name == v) => Term::var(v.clone()),
                Term::Var(v) | Term::Const(v) => Term::constant(v.clone()),
            };
            constraint.add(&q.var, term).map_err(|e| at(rc.line, 1, e))?;
        }
        clauses.push(Clause { logvars, literals, constraint });
    }
    for (name, (_, arity, line)) in &weights {
        let sig = match signatures.get(name) {
            Some(s) => s.clone(),
            None => vec![default_domain.clone(); arity.unwrap_or(0)],
        };
        vocab.add_predicate(Predicate::boolean(name.clone(), sig.len())).map_err(|e| at(*line, 1, e))?;
        signatures.insert(name.clone(), sig);
    }
    signatures.sort_by(|a, _, b, _| weights.get_index_of(a).cmp(&weights.get_index_of(b)));
    let weights = weights.into_iter().map(|(k, (w, _, _))| (k, w)).collect();
    let w = WmcModel { vocab, signatures, weights, clauses };
    w.validate()?;
    Ok(w)
}

fn parse_clause(c: &mut Cursor<'_>) -> Result<RawClause> {
    let line = c.line;
    let binder = if c.peek_is("[") {
        Some(c.list("[", "]", |c| {
            let name = c.word("logvar")?;
            c.expect("in")?;
            Ok(LogVar::new(name, c.word("domain")?))
        })?)
    } else {
        None
    };
    let mut literals = Vec::new();
    loop {
        let col = c.col();
        let positive = !c.eat("!");
        let atom = parse_atom(c, &|_| false)?;
        literals.push((col, Literal { positive, atom }));
        if !c.eat("v") {
            break;
        }
    }
    let mut constraint = Constraint::new();
    if c.eat("|") {
        loop {
            let col = c.col();
            let a = c.word("logvar")?;
            c.expect("!=")?;
            let b = c.word("term")?;
            constraint.add(a, Term::constant(b)).map_err(|e| at(line, col, e))?;
            if !c.eat(",") {
                break;
            }
        }
    }
    c.finish()?;
    Ok(RawClause { line, binder, literals, constraint })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_clause() {
        let w = parse_wmc("weight P = 0.3\nweight Q = 0.6\nclause !P(X) v Q(Y) | X != Y\n").unwrap();
        assert_eq!(w.clauses.len(), 1);
        let c = &w.clauses[0];
        assert!(!c.literals[0].positive && c.literals[1].positive);
        assert!(c.constraint.differ("X", "Y"));
        assert_eq!(w.vocab.domain("D").unwrap().len(), DEFAULT_DOMAIN_SIZE);
    }

    #[test]
    fn weight_alone() {
        let w = parse_wmc("weight P = 0.5").unwrap();
        assert!(w.clauses.is_empty());
        assert_eq!(w.vocab.predicate("P").unwrap().arity, 0);
    }

    #[test]
    fn unknown_predicate_is_positioned() {
        let e = parse_wmc("weight P = 0.5\nclause P(X) v R(X)").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, col: 15, .. }), "{e}");
    }
}
