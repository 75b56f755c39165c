//! Points of an elliptic curve as elements of a finitely presented abelian
//! group, and line-bundle classes as (degree, Abel–Jacobi sum).
//!
//! Nothing here touches a concrete Weierstrass model. A [`CurveContext`]
//! declares free generators (generic points), torsion generators with their
//! orders, and named points defined as integer combinations of other names.
//! The name `0` (alias `O`) is always the neutral element.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_integer::Integer;

use crate::error::{Error, Result};

/// Integer combination of point names, e.g. `2*O - eta`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PointExpr {
    pub terms: Vec<(i64, String)>,
}

impl PointExpr {
    pub fn name(name: &str) -> Self {
        PointExpr { terms: vec![(1, name.to_string())] }
    }

    pub fn term(mut self, coeff: i64, name: &str) -> Self {
        self.terms.push((coeff, name.to_string()));
        self
    }

    /// Sum of coefficients, i.e. the degree when read as a divisor.
    pub fn degree(&self) -> i64 {
        self.terms.iter().map(|(c, _)| c).sum()
    }
}

impl fmt::Display for PointExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0*O");
        }
        for (i, (c, name)) in self.terms.iter().enumerate() {
            let (sign, abs) = if *c < 0 { ("-", -c) } else { ("+", *c) };
            if i == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            if abs == 1 {
                write!(f, "{name}")?;
            } else {
                write!(f, "{abs}*{name}")?;
            }
        }
        Ok(())
    }
}

/// Element of the declared group: free coordinates plus torsion residues.
///
/// The torsion orders travel with the element so that arithmetic can reduce
/// without a context at hand. Elements from different contexts never mix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointElt {
    free: Vec<i64>,
    torsion: Vec<i64>,
    orders: Vec<i64>,
}

impl PointElt {
    pub fn new(free: Vec<i64>, torsion: Vec<i64>, orders: Vec<i64>) -> Self {
        assert_eq!(torsion.len(), orders.len(), "torsion shape mismatch");
        let torsion = torsion.iter().zip(&orders).map(|(r, o)| r.mod_floor(o)).collect();
        PointElt { free, torsion, orders }
    }

    pub fn free_part(&self) -> &[i64] {
        &self.free
    }

    pub fn torsion_part(&self) -> &[i64] {
        &self.torsion
    }

    pub fn orders(&self) -> &[i64] {
        &self.orders
    }

    pub fn zero_like(&self) -> Self {
        PointElt { free: vec![0; self.free.len()], torsion: vec![0; self.torsion.len()], orders: self.orders.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.free.iter().all(|&x| x == 0) && self.torsion.iter().all(|&x| x == 0)
    }

    fn check_shape(&self, other: &Self) {
        assert!(
            self.free.len() == other.free.len() && self.orders == other.orders,
            "points from different curve contexts"
        );
    }

    pub fn scale(&self, k: i64) -> Self {
        PointElt::new(
            self.free.iter().map(|x| x * k).collect(),
            self.torsion.iter().map(|x| x * k).collect(),
            self.orders.clone(),
        )
    }

    /// Order of the element, `None` when it has a nonzero free part.
    pub fn order(&self) -> Option<i64> {
        if self.free.iter().any(|&x| x != 0) {
            return None;
        }
        Some(self.torsion.iter().zip(&self.orders).map(|(r, o)| o / r.gcd(o)).fold(1, |acc, x| acc.lcm(&x)))
    }

    /// Some `u` with `3u = self`, if one exists inside the declared group.
    pub fn div3(&self) -> Option<Self> {
        let mut free = Vec::with_capacity(self.free.len());
        for &x in &self.free {
            if x % 3 != 0 {
                return None;
            }
            free.push(x / 3);
        }
        let mut torsion = Vec::with_capacity(self.torsion.len());
        for (&r, &o) in self.torsion.iter().zip(&self.orders) {
            // 3x = r (mod o)
            let g = 3.gcd(&o);
            if r % g != 0 {
                return None;
            }
            let m = o / g;
            let x = if m == 1 { 0 } else { (r / g) * mod_inverse(3 / g, m) };
            torsion.push(x);
        }
        Some(PointElt::new(free, torsion, self.orders.clone()))
    }
}

fn mod_inverse(a: i64, m: i64) -> i64 {
    let e = a.extended_gcd(&m);
    debug_assert_eq!(e.gcd, 1);
    e.x.mod_floor(&m)
}

impl Add for &PointElt {
    type Output = PointElt;
    fn add(self, rhs: &PointElt) -> PointElt {
        self.check_shape(rhs);
        PointElt::new(
            self.free.iter().zip(&rhs.free).map(|(a, b)| a + b).collect(),
            self.torsion.iter().zip(&rhs.torsion).map(|(a, b)| a + b).collect(),
            self.orders.clone(),
        )
    }
}

impl Add for PointElt {
    type Output = PointElt;
    fn add(self, rhs: PointElt) -> PointElt {
        &self + &rhs
    }
}

impl Neg for &PointElt {
    type Output = PointElt;
    fn neg(self) -> PointElt {
        self.scale(-1)
    }
}

impl Neg for PointElt {
    type Output = PointElt;
    fn neg(self) -> PointElt {
        self.scale(-1)
    }
}

impl Sub for &PointElt {
    type Output = PointElt;
    fn sub(self, rhs: &PointElt) -> PointElt {
        self + &(-rhs)
    }
}

impl Sub for PointElt {
    type Output = PointElt;
    fn sub(self, rhs: PointElt) -> PointElt {
        &self - &rhs
    }
}

/// Isomorphism class of a line bundle: Pic(B) = Z ⊕ B.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PicClass {
    pub degree: i64,
    pub aj: PointElt,
}

impl PicClass {
    pub fn new(degree: i64, aj: PointElt) -> Self {
        PicClass { degree, aj }
    }

    pub fn zero_like(&self) -> Self {
        PicClass { degree: 0, aj: self.aj.zero_like() }
    }

    pub fn is_trivial(&self) -> bool {
        self.degree == 0 && self.aj.is_zero()
    }

    pub fn scale(&self, k: i64) -> Self {
        PicClass { degree: self.degree * k, aj: self.aj.scale(k) }
    }
}

impl Add for &PicClass {
    type Output = PicClass;
    fn add(self, rhs: &PicClass) -> PicClass {
        PicClass { degree: self.degree + rhs.degree, aj: &self.aj + &rhs.aj }
    }
}

impl Add for PicClass {
    type Output = PicClass;
    fn add(self, rhs: PicClass) -> PicClass {
        &self + &rhs
    }
}

impl Neg for &PicClass {
    type Output = PicClass;
    fn neg(self) -> PicClass {
        self.scale(-1)
    }
}

impl Neg for PicClass {
    type Output = PicClass;
    fn neg(self) -> PicClass {
        self.scale(-1)
    }
}

impl Sub for &PicClass {
    type Output = PicClass;
    fn sub(self, rhs: &PicClass) -> PicClass {
        self + &(-rhs)
    }
}

impl Sub for PicClass {
    type Output = PicClass;
    fn sub(self, rhs: PicClass) -> PicClass {
        &self - &rhs
    }
}

/// Torsion points of an exact order, together with whether the declared
/// presentation contains the whole n-torsion subgroup (Z/n)².
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionPoints {
    pub points: Vec<PointElt>,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CurveContext {
    free: Vec<String>,
    torsion: Vec<(String, i64)>,
    defined: BTreeMap<String, PointExpr>,
}

pub fn is_origin_name(name: &str) -> bool {
    name == "0" || name == "O"
}

impl CurveContext {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_fresh(&self, name: &str) -> Result<()> {
        let valid = !name.is_empty()
            && name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid {
            return Err(Error::InvalidContext(format!("`{name}` is not a valid point name")));
        }
        if is_origin_name(name) || self.is_declared(name) {
            return Err(Error::InvalidContext(format!("name `{name}` declared twice or reserved")));
        }
        Ok(())
    }

    fn is_declared(&self, name: &str) -> bool {
        self.free.iter().any(|n| n == name)
            || self.torsion.iter().any(|(n, _)| n == name)
            || self.defined.contains_key(name)
    }

    pub fn add_free(&mut self, name: &str) -> Result<()> {
        self.check_fresh(name)?;
        self.free.push(name.to_string());
        Ok(())
    }

    pub fn add_torsion(&mut self, name: &str, order: i64) -> Result<()> {
        self.check_fresh(name)?;
        if order < 2 {
            return Err(Error::InvalidContext(format!("torsion `{name}` has order {order} < 2")));
        }
        self.torsion.push((name.to_string(), order));
        Ok(())
    }

    /// Defines `name` by a relation `name ≡ expr`. Forward references are
    /// allowed; [`CurveContext::validate`] checks that everything resolves.
    pub fn define_point(&mut self, name: &str, expr: PointExpr) -> Result<()> {
        self.check_fresh(name)?;
        self.defined.insert(name.to_string(), expr);
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for name in self.defined.keys() {
            self.resolve_name(name, &mut Vec::new())?;
        }
        Ok(())
    }

    pub fn free_generators(&self) -> &[String] {
        &self.free
    }

    pub fn torsion_generators(&self) -> &[(String, i64)] {
        &self.torsion
    }

    pub fn defined_points(&self) -> &BTreeMap<String, PointExpr> {
        &self.defined
    }

    pub fn orders(&self) -> Vec<i64> {
        self.torsion.iter().map(|(_, o)| *o).collect()
    }

    pub fn zero(&self) -> PointElt {
        PointElt::new(vec![0; self.free.len()], vec![0; self.torsion.len()], self.orders())
    }

    pub fn trivial_class(&self) -> PicClass {
        PicClass::new(0, self.zero())
    }

    /// Degree-`d` class `O(d·0)`.
    pub fn origin_class(&self, d: i64) -> PicClass {
        PicClass::new(d, self.zero())
    }

    fn resolve_name(&self, name: &str, stack: &mut Vec<String>) -> Result<PointElt> {
        if is_origin_name(name) {
            return Ok(self.zero());
        }
        if let Some(i) = self.free.iter().position(|n| n == name) {
            let mut free = vec![0; self.free.len()];
            free[i] = 1;
            return Ok(PointElt::new(free, vec![0; self.torsion.len()], self.orders()));
        }
        if let Some(i) = self.torsion.iter().position(|(n, _)| n == name) {
            let mut tors = vec![0; self.torsion.len()];
            tors[i] = 1;
            return Ok(PointElt::new(vec![0; self.free.len()], tors, self.orders()));
        }
        let expr = self.defined.get(name).ok_or_else(|| Error::UnknownName(name.to_string()))?;
        if stack.iter().any(|s| s == name) {
            return Err(Error::CyclicDefinition(name.to_string()));
        }
        stack.push(name.to_string());
        let value = self.resolve_with(expr, stack);
        stack.pop();
        value
    }

    fn resolve_with(&self, expr: &PointExpr, stack: &mut Vec<String>) -> Result<PointElt> {
        let mut acc = self.zero();
        for (c, name) in &expr.terms {
            acc = &acc + &self.resolve_name(name, stack)?.scale(*c);
        }
        Ok(acc)
    }

    /// Group element named by `expr` (Σ coeff · point).
    pub fn resolve_point(&self, expr: &PointExpr) -> Result<PointElt> {
        self.resolve_with(expr, &mut Vec::new())
    }

    pub fn point(&self, name: &str) -> Result<PointElt> {
        self.resolve_point(&PointExpr::name(name))
    }

    /// Class of `O_B(Σ aᵢ pᵢ)`: degree Σ aᵢ, Abel–Jacobi sum Σ aᵢ pᵢ.
    pub fn pic_class(&self, divisor: &PointExpr) -> Result<PicClass> {
        Ok(PicClass::new(divisor.degree(), self.resolve_point(divisor)?))
    }

    pub fn torsion_points_of_order(&self, n: i64) -> Result<TorsionPoints> {
        if n < 2 {
            return Err(Error::OutOfRange(format!("torsion order {n} < 2")));
        }
        // residues killed by n in Z/o are the multiples of o / gcd(o, n)
        let steps: Vec<(i64, i64)> = self.torsion.iter().map(|(_, o)| (o / o.gcd(&n), o.gcd(&n))).collect();
        let killed: i64 = steps.iter().map(|(_, count)| count).product();
        if killed == 1 {
            return Err(Error::InsufficientTorsionDeclared(n));
        }
        let mut points = Vec::new();
        let mut idx = vec![0i64; steps.len()];
        loop {
            let tors: Vec<i64> = idx.iter().zip(&steps).map(|(i, (step, _))| i * step).collect();
            let p = PointElt::new(vec![0; self.free.len()], tors, self.orders());
            if p.order() == Some(n) {
                points.push(p);
            }
            // odometer over the killed subgroup
            let mut k = 0;
            loop {
                if k == idx.len() {
                    points.sort();
                    return Ok(TorsionPoints { points, complete: killed == n * n });
                }
                idx[k] += 1;
                if idx[k] < steps[k].1 {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    /// All nonzero 3-torsion points, insisting on the full (Z/3)².
    pub fn nonzero_three_torsion(&self) -> Result<Vec<PointElt>> {
        let tp = self.torsion_points_of_order(3).map_err(|_| Error::ContextTooSmall("no 3-torsion declared".into()))?;
        if !tp.complete {
            return Err(Error::ContextTooSmall(format!(
                "only {} of the 8 nonzero 3-torsion points are declared",
                tp.points.len()
            )));
        }
        Ok(tp.points)
    }

    pub fn format_point(&self, p: &PointElt) -> String {
        let mut parts = Vec::new();
        for (c, name) in p.free.iter().zip(&self.free) {
            push_term(&mut parts, *c, name);
        }
        for (c, (name, _)) in p.torsion.iter().zip(&self.torsion) {
            push_term(&mut parts, *c, name);
        }
        if parts.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, part) in parts.iter().enumerate() {
            match (i, part.strip_prefix('-')) {
                (0, _) => out.push_str(part),
                (_, Some(rest)) => {
                    out.push_str(" - ");
                    out.push_str(rest);
                }
                (_, None) => {
                    out.push_str(" + ");
                    out.push_str(part);
                }
            }
        }
        out
    }

    pub fn format_class(&self, c: &PicClass) -> String {
        format!("({}, {})", c.degree, self.format_point(&c.aj))
    }

    /// Canonical one-line description, used for report fingerprints.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        for name in &self.free {
            out.push_str(&format!("free {name}\n"));
        }
        for (name, order) in &self.torsion {
            out.push_str(&format!("torsion {name} {order}\n"));
        }
        for (name, expr) in &self.defined {
            out.push_str(&format!("point {name} = {expr}\n"));
        }
        out
    }
}

fn push_term(parts: &mut Vec<String>, c: i64, name: &str) {
    match c {
        0 => {}
        1 => parts.push(name.to_string()),
        -1 => parts.push(format!("-{name}")),
        _ => parts.push(format!("{c}*{name}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_ctx() -> CurveContext {
        let mut ctx = CurveContext::new();
        ctx.add_torsion("eta", 3).unwrap();
        ctx.add_torsion("kappa", 3).unwrap();
        ctx.define_point("tau", PointExpr::default().term(2, "O").term(-1, "eta")).unwrap();
        ctx
    }

    #[test]
    fn origin_is_identity() {
        let ctx = default_ctx();
        assert!(ctx.point("0").unwrap().is_zero());
        assert!(ctx.point("O").unwrap().is_zero());
    }

    #[test]
    fn tau_is_minus_eta() {
        let ctx = default_ctx();
        let tau = ctx.point("tau").unwrap();
        assert_eq!(tau, -ctx.point("eta").unwrap());
        assert_eq!(tau.torsion_part(), &[2, 0]);
    }

    #[test]
    fn three_eta_vanishes() {
        let ctx = default_ctx();
        let p = ctx.resolve_point(&PointExpr::default().term(3, "eta")).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn pic_class_examples() {
        let ctx = default_ctx();
        let eta = ctx.point("eta").unwrap();
        let n = ctx.pic_class(&PointExpr::name("eta").term(-1, "O")).unwrap();
        assert_eq!(n, PicClass::new(0, eta.clone()));
        assert_eq!(ctx.pic_class(&PointExpr::name("O")).unwrap(), ctx.origin_class(1));
        let d = ctx.pic_class(&PointExpr::default().term(2, "O").term(-1, "eta")).unwrap();
        assert_eq!(d, PicClass::new(1, -eta));
    }

    #[test]
    fn unknown_and_cyclic_names() {
        let mut ctx = default_ctx();
        assert_eq!(ctx.point("nope"), Err(Error::UnknownName("nope".into())));
        ctx.define_point("p", PointExpr::name("q")).unwrap();
        ctx.define_point("q", PointExpr::name("p").term(1, "eta")).unwrap();
        assert!(matches!(ctx.point("p"), Err(Error::CyclicDefinition(_))));
        assert!(ctx.validate().is_err());
    }

    #[test]
    fn rejects_bad_declarations() {
        let mut ctx = CurveContext::new();
        assert!(ctx.add_torsion("t", 1).is_err());
        assert!(ctx.add_free("O").is_err());
        ctx.add_free("p").unwrap();
        assert!(ctx.add_torsion("p", 3).is_err());
    }

    #[test]
    fn full_three_torsion_has_eight_points() {
        let tp = default_ctx().torsion_points_of_order(3).unwrap();
        assert_eq!(tp.points.len(), 8);
        assert!(tp.complete);
    }

    #[test]
    fn partial_three_torsion_is_flagged() {
        let mut ctx = CurveContext::new();
        ctx.add_torsion("eta", 3).unwrap();
        let tp = ctx.torsion_points_of_order(3).unwrap();
        assert_eq!(tp.points.len(), 2);
        assert!(!tp.complete);
        assert!(matches!(ctx.nonzero_three_torsion(), Err(Error::ContextTooSmall(_))));
    }

    #[test]
    fn missing_two_torsion_is_an_error() {
        assert_eq!(default_ctx().torsion_points_of_order(2), Err(Error::InsufficientTorsionDeclared(2)));
    }

    #[test]
    fn exact_order_filters_proper_divisors() {
        let mut ctx = CurveContext::new();
        ctx.add_torsion("s", 6).unwrap();
        // elements of Z/6 of exact order 6: 1 and 5
        let tp = ctx.torsion_points_of_order(6).unwrap();
        assert_eq!(tp.points.len(), 2);
        assert!(!tp.complete);
    }

    #[test]
    fn div3_inverts_tripling_when_possible() {
        let mut ctx = CurveContext::new();
        ctx.add_free("p").unwrap();
        ctx.add_torsion("s", 9).unwrap();
        let p = ctx.point("p").unwrap();
        let s = ctx.point("s").unwrap();
        let x = &p.scale(3) + &s.scale(3);
        assert_eq!(x.div3().unwrap().scale(3), x);
        assert!(p.div3().is_none());
        assert!(s.div3().is_none());
    }

    #[test]
    fn formatting() {
        let ctx = default_ctx();
        let p = &ctx.point("eta").unwrap().scale(2) + &ctx.point("kappa").unwrap();
        assert_eq!(ctx.format_point(&p), "2*eta + kappa");
        assert_eq!(ctx.format_point(&ctx.zero()), "0");
    }
}
