//! Recursive-descent parser for the bundle, divisor and surface DSLs.
//!
//! ```text
//! bundle  := term ("(+)" term)*
//! term    := factor ("(*)" factor)*
//! factor  := "Dual" factor | "Sym" "{" INT "}" factor | "Wedge2" factor
//!          | "(" bundle ")" | "E" "(" INT "," INT ";" point ")" | "L" "(" point ")"
//! point   := ["-"] pterm (("+" | "-") pterm)*
//! pterm   := [INT "*"] NAME | "0"
//! divisor := ["-"] dterm (("+" | "-") dterm)*
//! dterm   := [INT "*"] ("T" | "H" "(" point ")")
//! ci      := "ci" "(" bundle ";" "Q" "=" divisor ";" "X" "=" divisor ")"
//! ```

use std::fmt;

use crate::bundle_calc::{Atom, BundleExpr};
use crate::chow_fibration::DivClassW;
use crate::curve_pic::{CurveContext, PointExpr};
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub found: String,
    pub expected: Vec<String>,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at {}:{}: found {}", self.line, self.column, self.found)?;
        if !self.expected.is_empty() {
            write!(f, ", expected one of {}", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Comma,
    Semi,
    Eq,
    LParen,
    RParen,
    LBrace,
    RBrace,
    OPlus,
    OTimes,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "integer {n}"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBrace => write!(f, "`{{`"),
            Tok::RBrace => write!(f, "`}}`"),
            Tok::OPlus => write!(f, "`(+)`"),
            Tok::OTimes => write!(f, "`(*)`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> std::result::Result<Vec<Spanned>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let mut push = |tok, width: usize, i: &mut usize, col: &mut usize| {
            out.push(Spanned { tok, line: start_line, column: start_col });
            *i += width;
            *col += width;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '(' if chars.get(i + 1) == Some(&'+') && chars.get(i + 2) == Some(&')') => {
                push(Tok::OPlus, 3, &mut i, &mut col)
            }
            '(' if chars.get(i + 1) == Some(&'*') && chars.get(i + 2) == Some(&')') => {
                push(Tok::OTimes, 3, &mut i, &mut col)
            }
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '{' => push(Tok::LBrace, 1, &mut i, &mut col),
            '}' => push(Tok::RBrace, 1, &mut i, &mut col),
            '+' => push(Tok::Plus, 1, &mut i, &mut col),
            '-' => push(Tok::Minus, 1, &mut i, &mut col),
            '*' => push(Tok::Star, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            ';' => push(Tok::Semi, 1, &mut i, &mut col),
            '=' => push(Tok::Eq, 1, &mut i, &mut col),
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let text: String = chars[i..j].iter().collect();
                let n = text.parse::<i64>().map_err(|_| SyntaxError {
                    line: start_line,
                    column: start_col,
                    found: format!("integer literal {text}"),
                    expected: vec!["an integer that fits in 64 bits".into()],
                })?;
                push(Tok::Int(n), j - i, &mut i, &mut col);
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let text: String = chars[i..j].iter().collect();
                push(Tok::Ident(text), j - i, &mut i, &mut col);
            }
            other => {
                return Err(SyntaxError { line, column: col, found: format!("character {other:?}"), expected: vec![] })
            }
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, column: col });
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BundleAst {
    /// `E(r,d;p)`: indecomposable with det `O(d·p)`.
    E {
        rank: i64,
        degree: i64,
        point: PointExpr,
    },
    L(PointExpr),
    Sum(Box<BundleAst>, Box<BundleAst>),
    Tensor(Box<BundleAst>, Box<BundleAst>),
    Sym(u32, Box<BundleAst>),
    Wedge2(Box<BundleAst>),
    Dual(Box<BundleAst>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DivTerm {
    T(i64),
    H(i64, PointExpr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorAst {
    pub terms: Vec<DivTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CiAst {
    pub v: BundleAst,
    pub q: DivisorAst,
    pub x: DivisorAst,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = std::result::Result<T, SyntaxError>;

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser { toks: lex(src)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> SyntaxError {
        let s = &self.toks[self.pos];
        SyntaxError {
            line: s.line,
            column: s.column,
            found: s.tok.to_string(),
            expected: expected.iter().map(|e| e.to_string()).collect(),
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[&tok.to_string()]))
        }
    }

    fn expect_ident(&mut self, name: &str) -> PResult<()> {
        match self.peek() {
            Tok::Ident(s) if s == name => {
                self.bump();
                Ok(())
            }
            _ => Err(self.error(&[&format!("`{name}`")])),
        }
    }

    fn int(&mut self) -> PResult<i64> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(if neg { -n } else { n })
            }
            _ => Err(self.error(&["integer"])),
        }
    }

    fn finish(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }

    fn bundle(&mut self) -> PResult<BundleAst> {
        let mut lhs = self.term()?;
        while *self.peek() == Tok::OPlus {
            self.bump();
            lhs = BundleAst::Sum(Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> PResult<BundleAst> {
        let mut lhs = self.factor()?;
        while *self.peek() == Tok::OTimes {
            self.bump();
            lhs = BundleAst::Tensor(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> PResult<BundleAst> {
        const STARTS: &[&str] = &["`E`", "`L`", "`Dual`", "`Sym`", "`Wedge2`", "`(`"];
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.bundle()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(s) => match s.as_str() {
                "Dual" => {
                    self.bump();
                    Ok(BundleAst::Dual(Box::new(self.factor()?)))
                }
                "Wedge2" => {
                    self.bump();
                    Ok(BundleAst::Wedge2(Box::new(self.factor()?)))
                }
                "Sym" => {
                    self.bump();
                    self.expect(Tok::LBrace)?;
                    let n = match self.peek().clone() {
                        Tok::Int(n) if n <= u32::MAX as i64 => {
                            self.bump();
                            n as u32
                        }
                        _ => return Err(self.error(&["nonnegative integer"])),
                    };
                    self.expect(Tok::RBrace)?;
                    Ok(BundleAst::Sym(n, Box::new(self.factor()?)))
                }
                "E" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let rank = self.int()?;
                    self.expect(Tok::Comma)?;
                    let degree = self.int()?;
                    self.expect(Tok::Semi)?;
                    let point = self.point()?;
                    self.expect(Tok::RParen)?;
                    Ok(BundleAst::E { rank, degree, point })
                }
                "L" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let p = self.point()?;
                    self.expect(Tok::RParen)?;
                    Ok(BundleAst::L(p))
                }
                _ => Err(self.error(STARTS)),
            },
            _ => Err(self.error(STARTS)),
        }
    }

    /// Optional leading sign, then `+`/`-` separated items.
    fn signed_list<T>(&mut self, mut item: impl FnMut(&mut Self, i64) -> PResult<T>) -> PResult<Vec<T>> {
        let mut sign = 1;
        if *self.peek() == Tok::Minus {
            self.bump();
            sign = -1;
        }
        let mut out = vec![item(self, sign)?];
        loop {
            sign = match self.peek() {
                Tok::Plus => 1,
                Tok::Minus => -1,
                _ => return Ok(out),
            };
            self.bump();
            out.push(item(self, sign)?);
        }
    }

    fn coefficient(&mut self) -> PResult<Option<i64>> {
        if let Tok::Int(n) = *self.peek() {
            self.bump();
            if *self.peek() == Tok::Star {
                self.bump();
                return Ok(Some(n));
            }
            // a bare `0` names the origin
            if n == 0 {
                return Ok(None);
            }
            return Err(self.error(&["`*`"]));
        }
        Ok(Some(1))
    }

    fn point(&mut self) -> PResult<PointExpr> {
        let terms = self.signed_list(|p, sign| match p.coefficient()? {
            None => Ok((sign, "0".to_string())),
            Some(c) => match p.peek().clone() {
                Tok::Ident(name) => {
                    p.bump();
                    Ok((sign * c, name))
                }
                _ => Err(p.error(&["point name"])),
            },
        })?;
        Ok(PointExpr { terms })
    }

    fn divisor(&mut self) -> PResult<DivisorAst> {
        let terms = self.signed_list(|p, sign| {
            let c = match p.coefficient()? {
                Some(c) => sign * c,
                None => return Err(p.error(&["`T`", "`H`"])),
            };
            match p.peek().clone() {
                Tok::Ident(s) if s == "T" => {
                    p.bump();
                    Ok(DivTerm::T(c))
                }
                Tok::Ident(s) if s == "H" => {
                    p.bump();
                    p.expect(Tok::LParen)?;
                    let pt = p.point()?;
                    p.expect(Tok::RParen)?;
                    Ok(DivTerm::H(c, pt))
                }
                _ => Err(p.error(&["`T`", "`H`"])),
            }
        })?;
        Ok(DivisorAst { terms })
    }

    fn ci(&mut self) -> PResult<CiAst> {
        self.expect_ident("ci")?;
        self.expect(Tok::LParen)?;
        let v = self.bundle()?;
        self.expect(Tok::Semi)?;
        self.expect_ident("Q")?;
        self.expect(Tok::Eq)?;
        let q = self.divisor()?;
        self.expect(Tok::Semi)?;
        self.expect_ident("X")?;
        self.expect(Tok::Eq)?;
        let x = self.divisor()?;
        self.expect(Tok::RParen)?;
        Ok(CiAst { v, q, x })
    }
}

pub fn parse_bundle(src: &str) -> std::result::Result<BundleAst, SyntaxError> {
    let mut p = Parser::new(src)?;
    let b = p.bundle()?;
    p.finish()?;
    Ok(b)
}

pub fn parse_divisor(src: &str) -> std::result::Result<DivisorAst, SyntaxError> {
    let mut p = Parser::new(src)?;
    let d = p.divisor()?;
    p.finish()?;
    Ok(d)
}

pub fn parse_point(src: &str) -> std::result::Result<PointExpr, SyntaxError> {
    let mut p = Parser::new(src)?;
    let d = p.point()?;
    p.finish()?;
    Ok(d)
}

pub fn parse_ci(src: &str) -> std::result::Result<CiAst, SyntaxError> {
    let mut p = Parser::new(src)?;
    let c = p.ci()?;
    p.finish()?;
    Ok(c)
}

impl BundleAst {
    /// Resolves names against `ctx`; atoms are validated here.
    pub fn to_expr(&self, ctx: &CurveContext) -> Result<BundleExpr> {
        Ok(match self {
            BundleAst::E { rank, degree, point } => {
                let p = ctx.resolve_point(point)?;
                let det = crate::curve_pic::PicClass::new(*degree, p.scale(*degree));
                BundleExpr::atom(Atom::indecomposable(*rank, *degree, det)?)
            }
            BundleAst::L(p) => BundleExpr::atom(Atom::Line(ctx.pic_class(p)?)),
            BundleAst::Sum(a, b) => BundleExpr::sum(a.to_expr(ctx)?, b.to_expr(ctx)?),
            BundleAst::Tensor(a, b) => BundleExpr::tensor(a.to_expr(ctx)?, b.to_expr(ctx)?),
            BundleAst::Sym(n, a) => BundleExpr::sym(*n, a.to_expr(ctx)?),
            BundleAst::Wedge2(a) => BundleExpr::wedge2(a.to_expr(ctx)?),
            BundleAst::Dual(a) => BundleExpr::dual(a.to_expr(ctx)?),
        })
    }
}

impl DivisorAst {
    pub fn to_class(&self, ctx: &CurveContext) -> Result<DivClassW> {
        let mut acc = DivClassW::new(0, ctx.trivial_class());
        for t in &self.terms {
            let term = match t {
                DivTerm::T(c) => DivClassW::new(*c, ctx.trivial_class()),
                DivTerm::H(c, p) => {
                    DivClassW::new(0, crate::curve_pic::PicClass::new(1, ctx.resolve_point(p)?).scale(*c))
                }
            };
            acc = &acc + &term;
        }
        Ok(acc)
    }
}

fn write_coeff(f: &mut fmt::Formatter<'_>, first: bool, c: i64, body: &str) -> fmt::Result {
    let (neg, abs) = (c < 0, c.abs());
    match (first, neg) {
        (true, true) => write!(f, "-")?,
        (true, false) => {}
        (false, true) => write!(f, " - ")?,
        (false, false) => write!(f, " + ")?,
    }
    if abs == 1 {
        write!(f, "{body}")
    } else {
        write!(f, "{abs}*{body}")
    }
}

impl fmt::Display for DivisorAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            match t {
                DivTerm::T(c) => write_coeff(f, i == 0, *c, "T")?,
                DivTerm::H(c, p) => write_coeff(f, i == 0, *c, &format!("H({p})"))?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for BundleAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BundleAst::E { rank, degree, point } => write!(f, "E({rank},{degree};{point})"),
            BundleAst::L(p) => write!(f, "L({p})"),
            BundleAst::Sum(a, b) => match **b {
                BundleAst::Sum(..) => write!(f, "{a} (+) ({b})"),
                _ => write!(f, "{a} (+) {b}"),
            },
            BundleAst::Tensor(a, b) => {
                match **a {
                    BundleAst::Sum(..) => write!(f, "({a})")?,
                    _ => write!(f, "{a}")?,
                }
                match **b {
                    BundleAst::Sum(..) | BundleAst::Tensor(..) => write!(f, " (*) ({b})"),
                    _ => write!(f, " (*) {b}"),
                }
            }
            BundleAst::Sym(n, a) => write!(f, "Sym{{{n}}}({a})"),
            BundleAst::Wedge2(a) => write!(f, "Wedge2({a})"),
            BundleAst::Dual(a) => write!(f, "Dual({a})"),
        }
    }
}

impl fmt::Display for CiAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ci({}; Q={}; X={})", self.v, self.q, self.x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e31() -> BundleAst {
        BundleAst::E { rank: 3, degree: 1, point: PointExpr::name("O") }
    }

    fn n() -> BundleAst {
        BundleAst::L(PointExpr::name("eta").term(-1, "O"))
    }

    #[test]
    fn parses_v1() {
        let t = parse_bundle("E(3,1;O) (+) L(eta-O)").unwrap();
        assert_eq!(t, BundleAst::Sum(Box::new(e31()), Box::new(n())));
    }

    #[test]
    fn parses_sym_of_v1() {
        let t = parse_bundle("Sym{2}(E(3,1;O) (+) L(eta-O))").unwrap();
        let v1 = BundleAst::Sum(Box::new(e31()), Box::new(n()));
        assert_eq!(t, BundleAst::Sym(2, Box::new(v1)));
    }

    #[test]
    fn precedence() {
        let t = parse_bundle("Dual E(3,1;O) (*) L(O) (+) L(eta)").unwrap();
        match t {
            BundleAst::Sum(a, _) => match *a {
                BundleAst::Tensor(d, _) => assert!(matches!(*d, BundleAst::Dual(_))),
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parses_divisor() {
        let d = parse_divisor("2*T + H(eta) - H(O)").unwrap();
        assert_eq!(
            d.terms,
            vec![DivTerm::T(2), DivTerm::H(1, PointExpr::name("eta")), DivTerm::H(-1, PointExpr::name("O"))]
        );
        assert_eq!(d.to_string(), "2*T + H(eta) - H(O)");
        let d = parse_divisor("3*T-H(tau)").unwrap();
        assert_eq!(d.terms, vec![DivTerm::T(3), DivTerm::H(-1, PointExpr::name("tau"))]);
    }

    #[test]
    fn parses_ci() {
        let c = parse_ci("ci(E(3,1;O)(+)L(eta-O); Q=2*T+H(eta)-H(O); X=3*T-H(tau))").unwrap();
        assert_eq!(c.q.terms.len(), 3);
        assert_eq!(parse_ci(&c.to_string()).unwrap(), c);
    }

    #[test]
    fn bare_zero_is_origin() {
        assert_eq!(parse_point("2*O - 0").unwrap().terms, vec![(2, "O".into()), (-1, "0".into())]);
    }

    #[test]
    fn errors_carry_position_and_expectations() {
        let e = parse_bundle("E(3,1;O) (+)\n  Q(eta)").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(e.expected.contains(&"`Sym`".to_string()));
        let e = parse_bundle("E(3 1;O)").unwrap_err();
        assert_eq!((e.line, e.column), (1, 5));
        assert_eq!(e.expected, vec!["`,`".to_string()]);
        let e = parse_bundle("L(eta) L(O)").unwrap_err();
        assert_eq!(e.expected, vec!["end of input".to_string()]);
        assert!(parse_bundle("L(eta) # x").is_err());
        assert!(parse_bundle("").is_err());
    }

    #[test]
    fn round_trip() {
        for src in [
            "E(3,1;O) (+) L(eta - O)",
            "L(eta) (*) (L(O) (+) L(kappa))",
            "Sym{3}(Dual(E(3,-2;2*O - eta)))",
            "(L(a) (+) L(b)) (*) (L(c) (*) L(d))",
            "L(a) (+) (L(b) (+) L(c))",
            "Wedge2(E(3,1;O) (+) L(-eta))",
        ] {
            let t = parse_bundle(src).unwrap();
            assert_eq!(parse_bundle(&t.to_string()).unwrap(), t, "{src}");
        }
    }
}
