//! Vector bundles on the elliptic curve as formal direct sums of
//! indecomposable atoms.
//!
//! Isomorphism of bundles is multiset equality of atoms (Krull–Schmidt).
//! Tensor, symmetric and exterior powers are computed from a closed rule
//! table over line bundles and rank-3 stable bundles; anything outside the
//! table is refused with [`Error::UnsupportedDecomposition`] instead of being
//! guessed.
//!
//! Rule table, for a rank-3 stable atom `A` of degree `d` and det `δ`:
//!
//! * `Λ²A = A^∨ ⊗ det A`, a stable atom of degree `2d`, det `2δ`;
//! * `S²A = 2·(rank 3, degree 2d, det 2δ)` when `d ≡ 1 (mod 3)`;
//! * `S³A = ⊕ (d, δ + m)` over the ten classes `m ∈ {0, 0} ∪ (B[3] \ 0)` when
//!   `d ≡ 1 (mod 3)`;
//! * `A ⊗ A' = 3·(rank 3, degree d + d', det δ + δ')` when both degrees are
//!   `≡ 1 (mod 3)`;
//! * `A ⊗ A'` with degrees `≡ 1` and `≡ 2 (mod 3)` is `A ⊗ A^∨ ⊗ M` with
//!   `3M = δ + δ'`, i.e. the nine line bundles `M + ξ`, `ξ ∈ B[3]`.
//!
//! Only the det sums of the `S²` and `A ⊗ A'` splittings are forced; the
//! individual summands are the symmetric choice.

use std::fmt;

use num_integer::Integer;
use num_traits::Zero;

use crate::curve_pic::{CurveContext, PicClass};
use crate::error::{Error, Result};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    Line(PicClass),
    /// Indecomposable with `gcd(rank, degree) = 1`, hence stable.
    Stable {
        rank: i64,
        degree: i64,
        det: PicClass,
    },
    /// Indecomposable with `gcd(rank, degree) > 1` and nonzero degree.
    /// Strictly semistable; only ranks, degrees, dets and cohomology are
    /// available for these.
    Semistable {
        rank: i64,
        degree: i64,
        det: PicClass,
    },
}

impl Atom {
    pub fn line(cls: PicClass) -> Self {
        Atom::Line(cls)
    }

    pub fn stable(rank: i64, degree: i64, det: PicClass) -> Result<Self> {
        if rank < 2 {
            return Err(Error::InvalidAtom(format!("stable atom of rank {rank}; use a line bundle")));
        }
        if rank.gcd(&degree) != 1 {
            return Err(Error::InvalidAtom(format!(
                "E({rank},{degree}) is not coprime; non-coprime indecomposables are not stable"
            )));
        }
        if det.degree != degree {
            return Err(Error::InvalidAtom(format!(
                "det has degree {} but the bundle has degree {degree}",
                det.degree
            )));
        }
        Ok(Atom::Stable { rank, degree, det })
    }

    /// Indecomposable of any rank/degree: stable when coprime, otherwise a
    /// strictly semistable atom (degree zero rejected, since those are
    /// Atiyah's F_r twists and are not determined by their det).
    pub fn indecomposable(rank: i64, degree: i64, det: PicClass) -> Result<Self> {
        if rank == 1 {
            if det.degree != degree {
                return Err(Error::InvalidAtom("line bundle degree mismatch".into()));
            }
            return Ok(Atom::Line(det));
        }
        if rank < 1 {
            return Err(Error::InvalidAtom(format!("rank {rank}")));
        }
        if rank.gcd(&degree) == 1 {
            return Atom::stable(rank, degree, det);
        }
        if degree == 0 {
            return Err(Error::InvalidAtom(format!(
                "E({rank},0) is an F_r twist; degree-0 non-coprime atoms are not supported"
            )));
        }
        if det.degree != degree {
            return Err(Error::InvalidAtom(format!(
                "det has degree {} but the bundle has degree {degree}",
                det.degree
            )));
        }
        Ok(Atom::Semistable { rank, degree, det })
    }

    pub fn rank(&self) -> i64 {
        match self {
            Atom::Line(_) => 1,
            Atom::Stable { rank, .. } | Atom::Semistable { rank, .. } => *rank,
        }
    }

    pub fn degree(&self) -> i64 {
        match self {
            Atom::Line(c) => c.degree,
            Atom::Stable { degree, .. } | Atom::Semistable { degree, .. } => *degree,
        }
    }

    pub fn det(&self) -> PicClass {
        match self {
            Atom::Line(c) => c.clone(),
            Atom::Stable { det, .. } | Atom::Semistable { det, .. } => det.clone(),
        }
    }

    pub fn slope(&self) -> Rational {
        Rational::new(self.degree(), self.rank())
    }

    pub fn is_stable(&self) -> bool {
        !matches!(self, Atom::Semistable { .. })
    }

    pub fn dual(&self) -> Atom {
        match self {
            Atom::Line(c) => Atom::Line(-c),
            Atom::Stable { rank, degree, det } => Atom::Stable { rank: *rank, degree: -degree, det: -det },
            Atom::Semistable { rank, degree, det } => Atom::Semistable { rank: *rank, degree: -degree, det: -det },
        }
    }

    pub fn twist(&self, l: &PicClass) -> Atom {
        match self {
            Atom::Line(c) => Atom::Line(c + l),
            Atom::Stable { rank, degree, det } => {
                Atom::Stable { rank: *rank, degree: degree + rank * l.degree, det: det + &l.scale(*rank) }
            }
            Atom::Semistable { rank, degree, det } => {
                Atom::Semistable { rank: *rank, degree: degree + rank * l.degree, det: det + &l.scale(*rank) }
            }
        }
    }

    /// `(h⁰, h¹)` of the atom (Atiyah).
    pub fn cohomology(&self) -> (i64, i64) {
        let d = self.degree();
        if d > 0 {
            (d, 0)
        } else if d < 0 {
            (0, -d)
        } else if self.det().aj.is_zero() {
            // degree 0 occurs only for line bundles
            (1, 1)
        } else {
            (0, 0)
        }
    }

    pub fn display(&self, ctx: &CurveContext) -> String {
        match self {
            Atom::Line(c) => format!("L{}", ctx.format_class(c)),
            Atom::Stable { rank, degree, det } | Atom::Semistable { rank, degree, det } => {
                format!("E({rank},{degree}; det {})", ctx.format_class(det))
            }
        }
    }

    /// Rank-3 stable atom whose degree is 1 mod 3: a twist of `E(3,1)`.
    fn is_e31_type(&self) -> bool {
        matches!(self, Atom::Stable { rank: 3, degree, .. } if degree.mod_floor(&3) == 1)
    }

    fn is_e32_type(&self) -> bool {
        matches!(self, Atom::Stable { rank: 3, degree, .. } if degree.mod_floor(&3) == 2)
    }
}

/// Formal direct sum; atoms are kept sorted so `==` is the isomorphism test.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bundle {
    atoms: Vec<Atom>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleStats {
    pub rank: i64,
    pub degree: i64,
    pub slope: Rational,
    pub maxslope: Rational,
}

impl Bundle {
    pub fn new(mut atoms: Vec<Atom>) -> Self {
        atoms.sort();
        Bundle { atoms }
    }

    pub fn zero() -> Self {
        Bundle::default()
    }

    pub fn line(cls: PicClass) -> Self {
        Bundle::new(vec![Atom::Line(cls)])
    }

    pub fn atom(a: Atom) -> Self {
        Bundle::new(vec![a])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn rank(&self) -> i64 {
        self.atoms.iter().map(Atom::rank).sum()
    }

    pub fn degree(&self) -> i64 {
        self.atoms.iter().map(Atom::degree).sum()
    }

    pub fn slope(&self) -> Result<Rational> {
        match self.rank() {
            0 => Err(Error::EmptyBundle),
            r => Ok(Rational::new(self.degree(), r)),
        }
    }

    pub fn maxslope(&self) -> Result<Rational> {
        self.atoms.iter().map(Atom::slope).max().ok_or(Error::EmptyBundle)
    }

    pub fn stats(&self) -> Result<BundleStats> {
        Ok(BundleStats { rank: self.rank(), degree: self.degree(), slope: self.slope()?, maxslope: self.maxslope()? })
    }

    pub fn direct_sum(&self, other: &Bundle) -> Bundle {
        Bundle::new(self.atoms.iter().chain(&other.atoms).cloned().collect())
    }

    pub fn repeat(&self, k: usize) -> Bundle {
        Bundle::new(self.atoms.iter().cloned().cycle().take(self.atoms.len() * k).collect())
    }

    /// Complement of `part` inside `self` as multisets.
    pub fn remove_summand(&self, part: &Bundle) -> Result<Bundle> {
        let mut rest = self.atoms.clone();
        for a in &part.atoms {
            match rest.iter().position(|x| x == a) {
                Some(i) => {
                    rest.remove(i);
                }
                None => return Err(Error::NotASummand(format!("{a:?} does not occur"))),
            }
        }
        Ok(Bundle::new(rest))
    }

    pub fn contains(&self, a: &Atom) -> bool {
        self.atoms.contains(a)
    }

    pub fn display(&self, ctx: &CurveContext) -> String {
        if self.atoms.is_empty() {
            return "0".into();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.atoms.len() {
            let mut j = i;
            while j < self.atoms.len() && self.atoms[j] == self.atoms[i] {
                j += 1;
            }
            let s = self.atoms[i].display(ctx);
            parts.push(if j - i > 1 { format!("{}x {s}", j - i) } else { s });
            i = j;
        }
        parts.join(" (+) ")
    }
}

impl fmt::Display for BundleStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rank {} degree {} slope {} maxslope {}", self.rank, self.degree, self.slope, self.maxslope)
    }
}

pub fn dual(v: &Bundle) -> Bundle {
    Bundle::new(v.atoms.iter().map(Atom::dual).collect())
}

/// Determinant class; `ctx` supplies the neutral element for rank 0.
pub fn det(ctx: &CurveContext, v: &Bundle) -> PicClass {
    v.atoms.iter().fold(ctx.trivial_class(), |acc, a| &acc + &a.det())
}

pub fn twist(v: &Bundle, l: &PicClass) -> Bundle {
    Bundle::new(v.atoms.iter().map(|a| a.twist(l)).collect())
}

/// `(h⁰, h¹)` summed over atoms.
pub fn cohomology_b(v: &Bundle) -> (i64, i64) {
    v.atoms.iter().map(Atom::cohomology).fold((0, 0), |(a, b), (x, y)| (a + x, b + y))
}

fn assert_bilinear(a_rank: i64, a_deg: i64, b_rank: i64, b_deg: i64, out: &Bundle) {
    assert_eq!(out.rank(), a_rank * b_rank, "tensor rule broke rank multiplicativity");
    assert_eq!(out.degree(), a_rank * b_deg + b_rank * a_deg, "tensor rule broke degree bilinearity");
}

fn unsupported_pair(ctx: &CurveContext, a: &Atom, b: &Atom) -> Error {
    Error::UnsupportedDecomposition(format!("no tensor rule for {} (*) {}", a.display(ctx), b.display(ctx)))
}

fn tensor_atoms(ctx: &CurveContext, a: &Atom, b: &Atom) -> Result<Bundle> {
    let out = match (a, b) {
        (Atom::Line(l), x) | (x, Atom::Line(l)) => Bundle::atom(x.twist(l)),
        (Atom::Stable { rank: 3, degree: d1, det: det1 }, Atom::Stable { rank: 3, degree: d2, det: det2 })
            if a.is_e31_type() && b.is_e31_type() =>
        {
            let s = Atom::stable(3, d1 + d2, det1 + det2)?;
            Bundle::atom(s).repeat(3)
        }
        (Atom::Stable { rank: 3, degree: d1, det: det1 }, Atom::Stable { rank: 3, degree: d2, det: det2 })
            if (a.is_e31_type() && b.is_e32_type()) || (a.is_e32_type() && b.is_e31_type()) =>
        {
            // A ⊗ A' = A ⊗ A^∨ ⊗ M with 3M = det A + det A'
            let total = det1 + det2;
            let m_aj = total.aj.div3().ok_or_else(|| {
                Error::UnsupportedDecomposition(format!(
                    "{} (*) {}: det sum {} has no cube root in the declared group",
                    a.display(ctx),
                    b.display(ctx),
                    ctx.format_class(&total)
                ))
            })?;
            let m = PicClass::new((d1 + d2) / 3, m_aj);
            let mut lines = vec![Atom::Line(m.clone())];
            for xi in ctx.nonzero_three_torsion()? {
                lines.push(Atom::Line(PicClass::new(m.degree, &m.aj + &xi)));
            }
            Bundle::new(lines)
        }
        _ => return Err(unsupported_pair(ctx, a, b)),
    };
    assert_bilinear(a.rank(), a.degree(), b.rank(), b.degree(), &out);
    Ok(out)
}

/// `a ⊗ b`, distributing over direct sums.
pub fn tensor(ctx: &CurveContext, a: &Bundle, b: &Bundle) -> Result<Bundle> {
    let mut atoms = Vec::new();
    for x in &a.atoms {
        for y in &b.atoms {
            atoms.extend(tensor_atoms(ctx, x, y)?.atoms);
        }
    }
    let out = Bundle::new(atoms);
    assert_bilinear(a.rank(), a.degree(), b.rank(), b.degree(), &out);
    Ok(out)
}

fn sym_atom(ctx: &CurveContext, a: &Atom, k: u32) -> Result<Bundle> {
    match (a, k) {
        (_, 0) => Ok(Bundle::line(ctx.trivial_class())),
        (_, 1) => Ok(Bundle::atom(a.clone())),
        (Atom::Line(c), k) => Ok(Bundle::line(c.scale(k as i64))),
        (Atom::Stable { degree, det, .. }, 2) if a.is_e31_type() => {
            Ok(Bundle::atom(Atom::stable(3, 2 * degree, det.scale(2))?).repeat(2))
        }
        (Atom::Stable { degree, det, .. }, 3) if a.is_e31_type() => {
            let torsion = ctx.nonzero_three_torsion()?;
            let mut lines = vec![Atom::Line(det.clone()), Atom::Line(det.clone())];
            for m in torsion {
                lines.push(Atom::Line(PicClass::new(*degree, &det.aj + &m)));
            }
            Ok(Bundle::new(lines))
        }
        _ => Err(Error::UnsupportedDecomposition(format!("no rule for Sym{{{k}}}({})", a.display(ctx)))),
    }
}

/// Compositions of `n` into `parts` nonnegative summands.
fn compositions(n: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `Sⁿ(v)` for `n ≤ 3`: `Sⁿ(⊕ Aᵢ) = ⊕_{Σkᵢ = n} ⊗ᵢ S^{kᵢ}(Aᵢ)`.
pub fn sym(ctx: &CurveContext, v: &Bundle, n: u32) -> Result<Bundle> {
    if n > 3 {
        return Err(Error::UnsupportedDecomposition(format!("Sym{{{n}}} is outside the rule table")));
    }
    let mut atoms = Vec::new();
    for ks in compositions(n, v.atoms.len()) {
        let mut acc = Bundle::line(ctx.trivial_class());
        for (a, &k) in v.atoms.iter().zip(&ks) {
            if k > 0 {
                acc = tensor(ctx, &acc, &sym_atom(ctx, a, k)?)?;
            }
        }
        atoms.extend(acc.atoms);
    }
    Ok(Bundle::new(atoms))
}

fn wedge2_atom(ctx: &CurveContext, a: &Atom) -> Result<Bundle> {
    match a {
        Atom::Line(_) => Ok(Bundle::zero()),
        // Λ²A = A^∨ ⊗ det A in rank 3
        Atom::Stable { rank: 3, .. } => Ok(Bundle::atom(a.dual().twist(&a.det()))),
        _ => Err(Error::UnsupportedDecomposition(format!("no rule for Wedge2({})", a.display(ctx)))),
    }
}

/// `Λ²(⊕ Aᵢ) = ⊕ Λ²Aᵢ ⊕ ⊕_{i<j} Aᵢ ⊗ Aⱼ`.
pub fn wedge2(ctx: &CurveContext, v: &Bundle) -> Result<Bundle> {
    let mut atoms = Vec::new();
    for (i, a) in v.atoms.iter().enumerate() {
        atoms.extend(wedge2_atom(ctx, a)?.atoms);
        for b in &v.atoms[i + 1..] {
            atoms.extend(tensor_atoms(ctx, a, b)?.atoms);
        }
    }
    Ok(Bundle::new(atoms))
}

fn hom_dim_atoms(ctx: &CurveContext, a: &Atom, b: &Atom) -> Result<i64> {
    match (a, b) {
        (Atom::Line(l), x) => Ok(x.twist(&-l).cohomology().0),
        (x, Atom::Line(l)) => Ok(x.dual().twist(l).cohomology().0),
        _ => {
            let (sa, sb) = (a.slope(), b.slope());
            if sa > sb {
                Ok(0)
            } else if sa == sb && a.is_stable() && b.is_stable() {
                Ok(i64::from(a == b))
            } else {
                Err(Error::UnsupportedHomPair(format!("Hom({}, {})", a.display(ctx), b.display(ctx))))
            }
        }
    }
}

/// `dim Hom(a, b)`, summed over atom pairs.
pub fn hom_dim(ctx: &CurveContext, a: &Bundle, b: &Bundle) -> Result<i64> {
    let mut total = 0;
    for x in &a.atoms {
        for y in &b.atoms {
            total += hom_dim_atoms(ctx, x, y)?;
        }
    }
    Ok(total)
}

pub fn is_semistable(v: &Bundle) -> bool {
    v.atoms.windows(2).all(|w| w[0].slope() == w[1].slope())
}

pub fn is_stable(v: &Bundle) -> bool {
    v.atoms.len() == 1 && v.atoms[0].is_stable()
}

/// Necessary condition for an injection `a ↪ b`: `maxslope(a) ≤ maxslope(b)`.
pub fn injection_feasible(a: &Bundle, b: &Bundle) -> Result<bool> {
    Ok(a.maxslope()? <= b.maxslope()?)
}

/// `slope` of a rank/degree pair, for callers holding only numbers.
pub fn slope_of(rank: i64, degree: i64) -> Result<Rational> {
    if rank.is_zero() || rank.is_negative() {
        return Err(Error::EmptyBundle);
    }
    Ok(Rational::new(degree, rank))
}

/// Unevaluated bundle expression, kept so that independent evaluators can
/// check the rule table against it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BundleExpr {
    Atom(Atom),
    Sum(Box<BundleExpr>, Box<BundleExpr>),
    Tensor(Box<BundleExpr>, Box<BundleExpr>),
    Sym(u32, Box<BundleExpr>),
    Wedge2(Box<BundleExpr>),
    Dual(Box<BundleExpr>),
}

impl BundleExpr {
    pub fn atom(a: Atom) -> Self {
        BundleExpr::Atom(a)
    }

    pub fn sum(a: BundleExpr, b: BundleExpr) -> Self {
        BundleExpr::Sum(Box::new(a), Box::new(b))
    }

    pub fn tensor(a: BundleExpr, b: BundleExpr) -> Self {
        BundleExpr::Tensor(Box::new(a), Box::new(b))
    }

    pub fn sym(n: u32, a: BundleExpr) -> Self {
        BundleExpr::Sym(n, Box::new(a))
    }

    pub fn wedge2(a: BundleExpr) -> Self {
        BundleExpr::Wedge2(Box::new(a))
    }

    pub fn dual(a: BundleExpr) -> Self {
        BundleExpr::Dual(Box::new(a))
    }

    pub fn from_bundle(v: &Bundle) -> Option<Self> {
        let mut it = v.atoms.iter().cloned().map(BundleExpr::Atom);
        let first = it.next()?;
        Some(it.fold(first, BundleExpr::sum))
    }

    pub fn eval(&self, ctx: &CurveContext) -> Result<Bundle> {
        match self {
            BundleExpr::Atom(a) => Ok(Bundle::atom(a.clone())),
            BundleExpr::Sum(a, b) => Ok(a.eval(ctx)?.direct_sum(&b.eval(ctx)?)),
            BundleExpr::Tensor(a, b) => tensor(ctx, &a.eval(ctx)?, &b.eval(ctx)?),
            BundleExpr::Sym(n, a) => sym(ctx, &a.eval(ctx)?, *n),
            BundleExpr::Wedge2(a) => wedge2(ctx, &a.eval(ctx)?),
            BundleExpr::Dual(a) => Ok(dual(&a.eval(ctx)?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve_pic::PointExpr;

    fn ctx() -> CurveContext {
        let mut ctx = CurveContext::new();
        ctx.add_torsion("eta", 3).unwrap();
        ctx.add_torsion("kappa", 3).unwrap();
        ctx
    }

    fn e31(ctx: &CurveContext) -> Atom {
        Atom::stable(3, 1, ctx.origin_class(1)).unwrap()
    }

    fn n(ctx: &CurveContext) -> PicClass {
        ctx.pic_class(&PointExpr::name("eta").term(-1, "O")).unwrap()
    }

    fn v1(ctx: &CurveContext) -> Bundle {
        Bundle::new(vec![e31(ctx), Atom::Line(n(ctx))])
    }

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn stats_of_v1() {
        let c = ctx();
        let s = v1(&c).stats().unwrap();
        assert_eq!((s.rank, s.degree, s.slope, s.maxslope), (4, 1, r(1, 4), r(1, 3)));
    }

    #[test]
    fn stats_of_line_and_empty() {
        let c = ctx();
        let s = Bundle::line(n(&c)).stats().unwrap();
        assert_eq!((s.rank, s.degree, s.slope, s.maxslope), (1, 0, r(0, 1), r(0, 1)));
        assert_eq!(Bundle::zero().stats(), Err(Error::EmptyBundle));
    }

    #[test]
    fn s2_v1_maxslope_is_two_thirds() {
        let c = ctx();
        assert_eq!(sym(&c, &v1(&c), 2).unwrap().maxslope().unwrap(), r(2, 3));
    }

    #[test]
    fn atoms_reject_non_coprime_and_bad_det() {
        let c = ctx();
        assert!(Atom::stable(3, 3, c.origin_class(3)).is_err());
        assert!(Atom::stable(3, 1, c.origin_class(2)).is_err());
        assert!(Atom::indecomposable(3, 0, c.trivial_class()).is_err());
        let ss = Atom::indecomposable(3, 3, c.origin_class(3)).unwrap();
        assert!(!ss.is_stable());
        assert_eq!(ss.cohomology(), (3, 0));
    }

    #[test]
    fn dual_negates() {
        let c = ctx();
        let d = dual(&Bundle::atom(e31(&c)));
        assert_eq!(d, Bundle::atom(Atom::stable(3, -1, c.origin_class(-1)).unwrap()));
    }

    #[test]
    fn twist_by_three_torsion_fixes_det() {
        let c = ctx();
        let t = twist(&Bundle::atom(e31(&c)), &n(&c));
        assert_eq!(t, Bundle::atom(e31(&c)));
    }

    #[test]
    fn det_of_v1_is_o_eta() {
        let c = ctx();
        let expected = c.pic_class(&PointExpr::name("eta")).unwrap();
        assert_eq!(det(&c, &v1(&c)), expected);
    }

    #[test]
    fn cohomology_examples() {
        let c = ctx();
        assert_eq!(cohomology_b(&Bundle::atom(e31(&c))), (1, 0));
        assert_eq!(cohomology_b(&Bundle::line(n(&c))), (0, 0));
        assert_eq!(cohomology_b(&Bundle::line(c.trivial_class())), (1, 1));
    }

    #[test]
    fn sym2_of_v1() {
        let c = ctx();
        let e32 = Atom::stable(3, 2, c.origin_class(2)).unwrap();
        let expected = Bundle::new(vec![e32.clone(), e32, e31(&c).twist(&n(&c)), Atom::Line(n(&c).scale(2))]);
        assert_eq!(sym(&c, &v1(&c), 2).unwrap(), expected);
    }

    #[test]
    fn sym3_of_e31_is_ten_lines() {
        let c = ctx();
        let s3 = sym(&c, &Bundle::atom(e31(&c)), 3).unwrap();
        assert_eq!(s3.atoms().len(), 10);
        let trivial = s3.atoms().iter().filter(|a| **a == Atom::Line(c.origin_class(1))).count();
        assert_eq!(trivial, 2);
        for m in c.nonzero_three_torsion().unwrap() {
            assert!(s3.contains(&Atom::Line(PicClass::new(1, m))));
        }
    }

    #[test]
    fn sym_identity_and_bounds() {
        let c = ctx();
        assert_eq!(sym(&c, &v1(&c), 1).unwrap(), v1(&c));
        assert!(sym(&c, &v1(&c), 4).is_err());
        let mut small = CurveContext::new();
        small.add_torsion("eta", 3).unwrap();
        let e = Bundle::atom(Atom::stable(3, 1, small.origin_class(1)).unwrap());
        assert!(matches!(sym(&small, &e, 3), Err(Error::ContextTooSmall(_))));
    }

    #[test]
    fn tensor_examples() {
        let c = ctx();
        let e = Bundle::atom(e31(&c));
        let t = tensor(&c, &e, &Bundle::line(n(&c).scale(2))).unwrap();
        assert_eq!((t.rank(), t.degree()), (3, 1));
        let ee = tensor(&c, &e, &e).unwrap();
        let e32 = Atom::stable(3, 2, c.origin_class(2)).unwrap();
        assert_eq!(ee, Bundle::atom(e32).repeat(3));
        assert_eq!((ee.rank(), ee.degree()), (9, 6));
        let s2v1 = sym(&c, &v1(&c), 2).unwrap();
        let big = tensor(&c, &s2v1, &v1(&c)).unwrap();
        assert_eq!((big.rank(), big.degree()), (40, 30));
    }

    #[test]
    fn tensor_e32_e31_gives_nine_lines() {
        let c = ctx();
        let e32 = Bundle::atom(Atom::stable(3, 2, c.origin_class(2)).unwrap());
        let t = tensor(&c, &e32, &Bundle::atom(e31(&c))).unwrap();
        assert_eq!(t.atoms().len(), 9);
        assert!(t.atoms().iter().all(|a| a.rank() == 1 && a.degree() == 1));
    }

    #[test]
    fn tensor_outside_table_names_pair() {
        let c = ctx();
        let e32 = Bundle::atom(Atom::stable(3, 2, c.origin_class(2)).unwrap());
        match tensor(&c, &e32, &e32) {
            Err(Error::UnsupportedDecomposition(msg)) => assert!(msg.contains("E(3,2")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wedge2_examples() {
        let c = ctx();
        let w = wedge2(&c, &Bundle::atom(e31(&c))).unwrap();
        assert_eq!(w, Bundle::atom(Atom::stable(3, 2, c.origin_class(2)).unwrap()));
        let p = c.pic_class(&PointExpr::name("kappa")).unwrap();
        let q = n(&c);
        let two = Bundle::new(vec![Atom::Line(p.clone()), Atom::Line(q.clone())]);
        assert_eq!(wedge2(&c, &two).unwrap(), Bundle::line(&p + &q));
    }

    #[test]
    fn hom_dims() {
        let c = ctx();
        assert_eq!(hom_dim(&c, &v1(&c), &v1(&c)).unwrap(), 3);
        let e32 = Bundle::atom(Atom::stable(3, 2, c.origin_class(2)).unwrap());
        assert_eq!(hom_dim(&c, &e32, &e32).unwrap(), 1);
        let eta = c.point("eta").unwrap();
        let other = Bundle::atom(Atom::stable(3, 2, PicClass::new(2, eta)).unwrap());
        assert_eq!(hom_dim(&c, &e32, &other).unwrap(), 0);
        assert!(matches!(hom_dim(&c, &Bundle::atom(e31(&c)), &e32), Err(Error::UnsupportedHomPair(_))));
    }

    #[test]
    fn stability_predicates() {
        let c = ctx();
        assert!(!is_semistable(&v1(&c)));
        assert!(is_stable(&Bundle::atom(e31(&c))));
        let l = Bundle::line(c.origin_class(1));
        let v3 = Bundle::new(vec![Atom::Line(c.origin_class(1)), e31(&c)]);
        assert!(injection_feasible(&l, &v3).unwrap());
        assert!(!injection_feasible(&Bundle::line(c.origin_class(2)), &v3).unwrap());
    }

    #[test]
    fn expressions_evaluate_through_rules() {
        let c = ctx();
        let v = BundleExpr::from_bundle(&v1(&c)).unwrap();
        let e = BundleExpr::sym(2, v.clone());
        assert_eq!(e.eval(&c).unwrap(), sym(&c, &v1(&c), 2).unwrap());
        let d = BundleExpr::dual(BundleExpr::dual(v.clone()));
        assert_eq!(d.eval(&c).unwrap(), v1(&c));
        assert!(BundleExpr::from_bundle(&Bundle::zero()).is_none());
    }

    #[test]
    fn remove_summand_multiset() {
        let c = ctx();
        let s2 = sym(&c, &v1(&c), 2).unwrap();
        let rest = s2.remove_summand(&Bundle::line(n(&c).scale(2))).unwrap();
        assert_eq!(rest.rank(), 9);
        assert!(matches!(rest.remove_summand(&Bundle::line(n(&c))), Err(Error::NotASummand(_))));
    }
}
