//! The `.qry` query format and result output.
//!
//! ```text
//! query Smokes(ann)
//! evidence Friends(ann,bob) = true
//! ```

use std::fmt::Write;

use super::lexer::Cursor;
use super::model_text::parse_atom;
use super::real::{fmt_ln_real, fmt_real};
use crate::error::{Error, Result};
use crate::model::GroundAtom;
use crate::planner::{Answer, Query};
use crate::scalar::Scalar;

fn ground_atom(c: &mut Cursor<'_>) -> Result<GroundAtom> {
    let col = c.col();
    let a = parse_atom(c, &|_| false)?;
    a.to_ground().ok_or_else(|| Error::Parse { line: c.line, col, msg: "query atoms must be ground".into() })
}

/// Parses a `.qry` file. An empty query asks for the partition function.
pub fn parse_query(text: &str) -> Result<Query> {
    let mut q = Query::default();
    for (i, src) in text.lines().enumerate() {
        let line = i + 1;
        let mut c = Cursor::new(src, line)?;
        if c.at_end() {
            continue;
        }
        let col = c.col();
        match c.word("declaration")? {
            "query" => {
                if q.target.is_some() {
                    return Err(Error::Parse { line, col, msg: "only one query atom is supported".into() });
                }
                q.target = Some(ground_atom(&mut c)?);
                c.finish()?;
            }
            "evidence" => {
                let a = ground_atom(&mut c)?;
                c.expect("=")?;
                let v = c.word("range value")?;
                c.finish()?;
                q.evidence.push((a, v.to_string()));
            }
            w => return Err(Error::Parse { line, col, msg: format!("unknown declaration `{w}`") }),
        }
    }
    Ok(q)
}

/// `Z = ...`, then one `P(atom=value) = ...` line per value of the target,
/// then the plan trace when requested.
pub fn serialize_result<T: Scalar>(answer: &Answer<T>, range: &[String], trace: bool) -> String {
    let mut out = String::new();
    writeln!(out, "Z = {}", fmt_ln_real(answer.ln_z.to_f64_lossy())).unwrap();
    writeln!(out, "lnZ = {}", fmt_real(answer.ln_z.to_f64_lossy())).unwrap();
    if let Some((atom, probs)) = &answer.marginal {
        for (v, p) in range.iter().zip(probs) {
            writeln!(out, "P({atom}={v}) = {}", fmt_real(p.to_f64_lossy())).unwrap();
        }
    }
    if trace {
        writeln!(out, "strategy {}", answer.strategy).unwrap();
        write!(out, "{}", answer.trace).unwrap();
        if !out.ends_with('\n') {
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn query_and_evidence() {
        let q = parse_query("query S(a)\nevidence F(a,b) = true\n").unwrap();
        assert_eq!(q.target, Some(GroundAtom::new("S", &["a"])));
        assert_eq!(q.evidence, vec![(GroundAtom::new("F", &["a", "b"]), "true".to_string())]);
        assert_eq!(parse_query("").unwrap(), Query::partition());
    }
}
