//! Line-oriented curve context files.
//!
//! ```text
//! # comment
//! free p
//! torsion eta 3
//! point tau = 2*O - eta
//! ```

use crate::curve_pic::CurveContext;
use crate::error::{Error, Result};

use super::parse::{parse_point, SyntaxError};

pub const DEFAULT_CONTEXT: &str = include_str!("../../data/default.ctx");

pub fn default_context() -> CurveContext {
    parse_context(DEFAULT_CONTEXT).expect("bundled context is valid")
}

fn syntax(line: usize, column: usize, found: &str, expected: &[&str]) -> Error {
    Error::Syntax(SyntaxError {
        line,
        column,
        found: found.to_string(),
        expected: expected.iter().map(|s| s.to_string()).collect(),
    })
}

pub fn parse_context(src: &str) -> Result<CurveContext> {
    let mut ctx = CurveContext::new();
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        let indent = line.len() - line.trim_start().len();
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let rest_col = indent + raw[indent..].find(rest).unwrap_or(0) + 1;
        match keyword {
            "free" => {
                let [name] = rest.split_whitespace().collect::<Vec<_>>()[..] else {
                    return Err(syntax(line_no, rest_col, rest, &["one generator name"]));
                };
                ctx.add_free(name)?;
            }
            "torsion" => {
                let [name, order] = rest.split_whitespace().collect::<Vec<_>>()[..] else {
                    return Err(syntax(line_no, rest_col, rest, &["generator name and order"]));
                };
                let order = order.parse::<i64>().map_err(|_| syntax(line_no, rest_col, order, &["integer order"]))?;
                ctx.add_torsion(name, order)?;
            }
            "point" => {
                let Some((name, expr)) = rest.split_once('=') else {
                    return Err(syntax(line_no, rest_col, rest, &["`name = expression`"]));
                };
                let expr = parse_point(expr).map_err(|mut e| {
                    e.column += rest_col + name.len();
                    e.line = line_no;
                    e
                })?;
                ctx.define_point(name.trim(), expr)?;
            }
            other => return Err(syntax(line_no, indent + 1, other, &["`free`", "`torsion`", "`point`"])),
        }
    }
    ctx.validate()?;
    Ok(ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_context_has_tau_equal_minus_eta() {
        let ctx = default_context();
        assert_eq!(ctx.point("tau").unwrap(), ctx.point("eta").unwrap().scale(-1));
        assert_eq!(ctx.torsion_generators().len(), 2);
    }

    #[test]
    fn canonical_text_reparses() {
        let ctx = default_context();
        let again = parse_context(&ctx.canonical_text()).unwrap();
        assert_eq!(again.canonical_text(), ctx.canonical_text());
    }

    #[test]
    fn rejects_bad_lines() {
        let e = parse_context("torsion eta 3\nfoo bar").unwrap_err();
        assert!(matches!(e, Error::Syntax(SyntaxError { line: 2, column: 1, .. })));
        assert!(matches!(parse_context("torsion eta x"), Err(Error::Syntax(_))));
        assert!(matches!(parse_context("point tau = 2*O - zeta"), Err(Error::UnknownName(_))));
        assert!(matches!(parse_context("torsion eta 1"), Err(Error::InvalidContext(_))));
    }
}
