//! The `.pfm` parfactor model format.
//!
//! ```text
//! domain Person = {ann, bob}
//! predicate Smokes/1 range {false, true}
//! parfactor [X in Person, Y in Person] | X != Y : phi(Smokes(X), #Z[Smokes(Z)]) ^ 1/2
//! row false <2,0> = 1.5
//! ```

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write;

use num_rational::Ratio;

use super::lexer::{at, Cursor};
use super::real::fmt_real;
use crate::error::{Error, Result};
use crate::histogram::{self, Histogram};
use crate::model::{Arg, Atom, Constraint, CountingFormula, LogVar, Model, Parfactor, Predicate, Term, Vocab};
use crate::potential::{table_len, Potential};
use crate::scalar::Scalar;

/// Largest potential table accepted from text.
pub const MAX_TABLE: usize = 1 << 24;

struct Pending<T> {
    line: usize,
    logvars: Vec<LogVar>,
    constraint: Constraint,
    args: Vec<Arg>,
    scale: Ratio<u64>,
    shape: Vec<usize>,
    ln: Vec<T>,
    seen: HashSet<usize>,
}

fn parse_ineq(c: &mut Cursor<'_>, is_var: &dyn Fn(&str) -> bool, out: &mut Constraint) -> Result<()> {
    let col = c.col();
    let a = c.word("logvar")?;
    c.expect("!=")?;
    let b = c.word("logvar or constant")?;
    let t = if is_var(b) { Term::var(b) } else { Term::constant(b) };
    if !is_var(a) {
        return Err(Error::Parse { line: c.line, col, msg: format!("{a} is not a bound logvar") });
    }
    out.add(a, t).map_err(|e| at(c.line, col, e))
}

/// `P(t, ...)` or `P`; names satisfying `is_var` are logvars.
pub(crate) fn parse_atom(c: &mut Cursor<'_>, is_var: &dyn Fn(&str) -> bool) -> Result<Atom> {
    let pred = c.word("predicate")?;
    let args = if c.peek_is("(") {
        c.list("(", ")", |c| {
            let w = c.word("term")?;
            Ok(if is_var(w) { Term::var(w) } else { Term::constant(w) })
        })?
    } else {
        Vec::new()
    };
    Ok(Atom::new(pred, args))
}

fn parse_count(c: &mut Cursor<'_>, vocab: &Vocab, is_var: &dyn Fn(&str) -> bool) -> Result<CountingFormula> {
    c.expect("#")?;
    let col = c.col();
    let var = c.word("counted logvar")?;
    let domain = if c.eat("in") {
        c.word("domain")?.to_string()
    } else if vocab.domains.len() == 1 {
        vocab.domains.keys().next().expect("one domain").clone()
    } else {
        return c.error("counted logvar needs `in <domain>` when several domains are declared");
    };
    if is_var(var) {
        return Err(Error::Parse { line: c.line, col, msg: format!("counted logvar {var} is already bound") });
    }
    let mut excluded = BTreeSet::new();
    if c.eat(":") {
        loop {
            let col = c.col();
            let v = c.word("counted logvar")?;
            if v != var {
                return Err(Error::Parse { line: c.line, col, msg: format!("expected {var}") });
            }
            c.expect("!=")?;
            excluded.insert(c.word("constant")?.to_string());
            if !c.eat(",") {
                break;
            }
        }
    }
    c.expect("[")?;
    let inner = |w: &str| w == var || is_var(w);
    let atom = parse_atom(c, &inner)?;
    c.expect("]")?;
    Ok(CountingFormula::new(LogVar::new(var, domain), excluded, atom))
}

fn parse_parfactor<T: Scalar>(c: &mut Cursor<'_>, vocab: &Vocab) -> Result<Pending<T>> {
    let line = c.line;
    let logvars = c.list("[", "]", |c| {
        let name = c.word("logvar")?;
        c.expect("in")?;
        let dom = c.word("domain")?;
        Ok(LogVar::new(name, dom))
    })?;
    let names: Vec<String> = logvars.iter().map(|l| l.name.clone()).collect();
    let is_var = |w: &str| names.iter().any(|n| n == w);
    let mut constraint = Constraint::new();
    if c.eat("|") {
        loop {
            parse_ineq(c, &is_var, &mut constraint)?;
            if !c.eat(",") {
                break;
            }
        }
    }
    c.expect(":")?;
    c.expect("phi")?;
    let args = c.list("(", ")", |c| {
        if c.peek_is("#") {
            Ok(Arg::Count(parse_count(c, vocab, &is_var)?))
        } else {
            Ok(Arg::Atom(parse_atom(c, &is_var)?))
        }
    })?;
    let mut scale = Ratio::from_integer(1u64);
    if c.eat("^") {
        let col = c.col();
        let p: u64 = c.number("exponent numerator")?;
        let q: u64 = if c.eat("/") { c.number("exponent denominator")? } else { 1 };
        if p == 0 || q == 0 {
            return Err(Error::Parse { line, col, msg: "exponent must be a positive fraction".into() });
        }
        scale = Ratio::new(p, q);
    }
    c.finish()?;
    let shape = vocab.shape(&args).map_err(|e| at(line, 1, e))?;
    let len = table_len(&shape).filter(|&n| n <= MAX_TABLE).ok_or_else(|| Error::Parse {
        line,
        col: 1,
        msg: format!("potential table exceeds {MAX_TABLE} cells"),
    })?;
    Parfactor::new(logvars.clone(), constraint.clone(), args.clone(), Potential::<T>::ones(shape.clone()))
        .validate(vocab)
        .map_err(|e| at(line, 1, e))?;
    Ok(Pending { line, logvars, constraint, args, scale, shape, ln: vec![T::neg_infinity(); len], seen: HashSet::new() })
}

fn parse_row<T: Scalar>(c: &mut Cursor<'_>, vocab: &Vocab, p: &mut Pending<T>) -> Result<()> {
    let mut idx = Vec::with_capacity(p.args.len());
    for (k, arg) in p.args.iter().enumerate() {
        if c.peek_is("=") {
            return c.error(format!("table-size mismatch: row has {k} values, expected {}", p.args.len()));
        }
        let col = c.col();
        match arg {
            Arg::Atom(a) => {
                let pred = vocab.predicate(&a.pred)?;
                let v = c.word("range value")?;
                let i = pred.range_index(v).ok_or_else(|| Error::Parse {
                    line: c.line,
                    col,
                    msg: format!("{v} is not in the range of {}", pred.name),
                })?;
                idx.push(i);
            }
            Arg::Count(cf) => {
                let r = vocab.range_size(&cf.atom.pred)?;
                let counts = c.list("<", ">", |c| c.number::<usize>("count"))?;
                let n = vocab.group_size(cf)?;
                if counts.len() != r || counts.iter().sum::<usize>() != n {
                    return Err(Error::Parse {
                        line: c.line,
                        col,
                        msg: format!("histogram must have {r} counts summing to {n}"),
                    });
                }
                idx.push(Histogram::new(counts).rank());
            }
        }
    }
    if !c.peek_is("=") {
        return c.error(format!("table-size mismatch: row has more than {} values", p.args.len()));
    }
    c.expect("=")?;
    let v = c.real("potential value")?;
    c.finish()?;
    let flat = idx.iter().zip(crate::potential::strides(&p.shape)).map(|(i, s)| i * s).sum::<usize>();
    if !p.seen.insert(flat) {
        return Err(Error::Parse { line: c.line, col: 1, msg: "duplicate row".into() });
    }
    p.ln[flat] = T::of(v).ln();
    Ok(())
}

fn close<T: Scalar>(p: Pending<T>, m: &mut Model<T>) -> Result<()> {
    let potential = Potential::from_ln(p.shape, p.ln).map_err(|e| at(p.line, 1, e))?;
    let mut pf = Parfactor::new(p.logvars, p.constraint, p.args, potential);
    pf.scale = p.scale;
    m.push(pf).map_err(|e| at(p.line, 1, e))
}

/// Parses a `.pfm` model. Missing rows are zero.
pub fn parse_model<T: Scalar>(text: &str) -> Result<Model<T>> {
    let mut m = Model::new(Vocab::new());
    let mut pending: Option<Pending<T>> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut c = Cursor::new(raw, line)?;
        if c.at_end() {
            continue;
        }
        if c.eat("row") {
            match pending.as_mut() {
                Some(p) => {
                    if p.seen.len() >= p.ln.len() {
                        return c.error(format!("table-size mismatch: more than {} rows", p.ln.len()));
                    }
                    parse_row(&mut c, &m.vocab, p).map_err(|e| at(line, 1, e))?
                }
                None => return c.error("row outside a parfactor"),
            }
            continue;
        }
        if let Some(p) = pending.take() {
            close(p, &mut m)?;
        }
        let col = c.col();
        match c.word("declaration")? {
            "domain" => {
                let name = c.word("domain name")?;
                c.expect("=")?;
                let consts = c.list("{", "}", |c| c.word("constant").map(str::to_string))?;
                c.finish()?;
                m.vocab.insert_domain(name, consts).map_err(|e| at(line, col, e))?;
            }
            "predicate" => {
                let name = c.word("predicate name")?;
                c.expect("/")?;
                let arity: usize = c.number("arity")?;
                c.expect("range")?;
                let range = c.list("{", "}", |c| c.word("range value"))?;
                c.finish()?;
                m.vocab.add_predicate(Predicate::new(name, arity, &range)).map_err(|e| at(line, col, e))?;
            }
            "parfactor" => pending = Some(parse_parfactor(&mut c, &m.vocab)?),
            w => return Err(Error::Parse { line, col, msg: format!("unknown declaration `{w}`") }),
        }
    }
    if let Some(p) = pending.take() {
        close(p, &mut m)?;
    }
    Ok(m)
}

fn write_count(out: &mut String, cf: &CountingFormula, vocab: &Vocab) {
    write!(out, "#{}", cf.var.name).unwrap();
    if vocab.domains.len() != 1 {
        write!(out, " in {}", cf.var.domain).unwrap();
    }
    if !cf.excluded.is_empty() {
        let parts: Vec<String> = cf.excluded.iter().map(|e| format!("{} != {e}", cf.var.name)).collect();
        write!(out, ": {} ", parts.join(", ")).unwrap();
    }
    write!(out, "[{}]", cf.atom).unwrap();
}

/// Canonical text: domains, predicates, then parfactors in model order, each
/// with every row of its table.
pub fn serialize_model<T: Scalar>(m: &Model<T>) -> String {
    let mut out = String::new();
    for (name, consts) in &m.vocab.domains {
        writeln!(out, "domain {name} = {{{}}}", consts.join(", ")).unwrap();
    }
    for (name, p) in &m.vocab.predicates {
        writeln!(out, "predicate {name}/{} range {{{}}}", p.arity, p.range.join(", ")).unwrap();
    }
    for pf in &m.parfactors {
        let lvs: Vec<String> = pf.logvars.iter().map(|l| format!("{} in {}", l.name, l.domain)).collect();
        write!(out, "parfactor [{}]", lvs.join(", ")).unwrap();
        if !pf.constraint.is_empty() {
            write!(out, " | {}", pf.constraint).unwrap();
        }
        out.push_str(" : phi(");
        for (i, a) in pf.args.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            match a {
                Arg::Atom(a) => write!(out, "{a}").unwrap(),
                Arg::Count(cf) => write_count(&mut out, cf, &m.vocab),
            }
        }
        out.push(')');
        if pf.scale != Ratio::from_integer(1) {
            write!(out, " ^ {}/{}", pf.scale.numer(), pf.scale.denom()).unwrap();
        }
        out.push('\n');
        let labels: Vec<Vec<String>> = pf
            .args
            .iter()
            .map(|a| match a {
                Arg::Atom(a) => m.vocab.predicate(&a.pred).map(|p| p.range.clone()).unwrap_or_default(),
                Arg::Count(cf) => {
                    let n = m.vocab.group_size(cf).unwrap_or(0);
                    let r = m.vocab.range_size(&cf.atom.pred).unwrap_or(0);
                    histogram::all(n, r)
                        .iter()
                        .map(|h| {
                            let c: Vec<String> = h.counts.iter().map(usize::to_string).collect();
                            format!("<{}>", c.join(","))
                        })
                        .collect()
                }
            })
            .collect();
        crate::potential::for_each_index(pf.potential.shape(), |idx| {
            out.push_str("row");
            for (k, &i) in idx.iter().enumerate() {
                write!(out, " {}", labels[k][i]).unwrap();
            }
            writeln!(out, " = {}", fmt_real(pf.potential.value_at(idx).to_f64_lossy())).unwrap();
        });
    }
    out
}
