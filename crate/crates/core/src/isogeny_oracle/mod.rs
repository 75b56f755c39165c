//! Independent checks through the degree-3 isogeny `φ: B̃ → B` on which the
//! rank-3 stable bundles split.
//!
//! The base must carry torsion exactly `(ℤ/3)²`, presented by a kernel
//! generator `η` (with `φ^*η` trivial) and an independent lift generator
//! `κ`. The cover keeps the free generators of the base and has 3-torsion
//! `{0̃, a, b = 2a} = ker φ`. On points `φ^*` is the dual isogeny: free
//! coordinates are copied and `κ ↦ a`, `η ↦ 0`.

pub mod cyclotomic;

use num_integer::{binomial, Integer};

use crate::bundle_calc::{Atom, Bundle, BundleExpr};
use crate::curve_pic::{CurveContext, PicClass, PointElt, PointExpr};
use crate::error::{Error, Result};

pub use cyclotomic::{CyclotomicPoly, QZeta};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsogenySpec {
    base: CurveContext,
    cover: CurveContext,
    kernel_gen: PointElt,
    lift_gen: PointElt,
}

const COVER_TORSION: &str = "a";

impl IsogenySpec {
    pub fn new(base: &CurveContext, kernel_gen: PointElt, lift_gen: PointElt) -> Result<Self> {
        let tors = base.torsion_generators();
        if tors.len() != 2 || tors.iter().any(|(_, o)| *o != 3) {
            return Err(Error::Precondition(
                "the isogeny oracle needs base torsion presented as exactly Z/3 x Z/3".into(),
            ));
        }
        let spec_base = base.clone();
        let det = residues(&kernel_gen)[0] * residues(&lift_gen)[1] - residues(&kernel_gen)[1] * residues(&lift_gen)[0];
        if kernel_gen.free_part().iter().any(|&x| x != 0)
            || lift_gen.free_part().iter().any(|&x| x != 0)
            || det.mod_floor(&3) == 0
        {
            return Err(Error::InconsistentContext(
                "kernel and lift generators must be independent 3-torsion points".into(),
            ));
        }
        let mut cover = CurveContext::new();
        for name in base.free_generators() {
            cover.add_free(name)?;
        }
        cover.add_torsion(COVER_TORSION, 3)?;
        cover.define_point("b", PointExpr::name(COVER_TORSION).term(1, COVER_TORSION))?;
        Ok(IsogenySpec { base: spec_base, cover, kernel_gen, lift_gen })
    }

    /// Lift generator: the first 3-torsion point outside `⟨kernel⟩`.
    pub fn with_kernel(base: &CurveContext, kernel_gen: PointElt) -> Result<Self> {
        let pts = base.nonzero_three_torsion()?;
        let lift = pts
            .into_iter()
            .find(|p| *p != kernel_gen && *p != kernel_gen.scale(2))
            .ok_or_else(|| Error::InconsistentContext("no lift generator available".into()))?;
        IsogenySpec::new(base, kernel_gen, lift)
    }

    pub fn base(&self) -> &CurveContext {
        &self.base
    }

    pub fn cover(&self) -> &CurveContext {
        &self.cover
    }

    pub fn kernel_gen(&self) -> &PointElt {
        &self.kernel_gen
    }

    pub fn lift_gen(&self) -> &PointElt {
        &self.lift_gen
    }

    /// Coordinates `(α, λ)` of the torsion part in the basis (kernel, lift).
    fn torsion_coords(&self, p: &PointElt) -> (i64, i64) {
        let (k, l, t) = (residues(&self.kernel_gen), residues(&self.lift_gen), residues(p));
        // inverse of a unit mod 3 is itself
        let d = (k[0] * l[1] - k[1] * l[0]).mod_floor(&3);
        let alpha = ((t[0] * l[1] - t[1] * l[0]) * d).mod_floor(&3);
        let lambda = ((k[0] * t[1] - k[1] * t[0]) * d).mod_floor(&3);
        (alpha, lambda)
    }

    /// Character by which `ker φ` acts on the trivialized `φ^*` of a point.
    pub fn character(&self, p: &PointElt) -> i64 {
        self.torsion_coords(p).0
    }

    pub fn pullback_point(&self, p: &PointElt) -> PointElt {
        let lambda = self.torsion_coords(p).1;
        PointElt::new(p.free_part().to_vec(), vec![lambda], vec![3])
    }

    pub fn pullback_class(&self, c: &PicClass) -> PicClass {
        PicClass::new(3 * c.degree, self.pullback_point(&c.aj))
    }

    fn cover_a(&self) -> PointElt {
        self.cover.point(COVER_TORSION).expect("declared on construction")
    }

    fn pullback_atom(&self, atom: &Atom) -> Result<Vec<PicClass>> {
        match atom {
            Atom::Line(c) => Ok(vec![self.pullback_class(c)]),
            Atom::Stable { rank: 3, degree, det } if degree.mod_floor(&3) != 0 => {
                let root = det.aj.div3().ok_or_else(|| {
                    Error::UnsupportedAtom(format!(
                        "{}: det is not three times a declared point",
                        atom.display(&self.base)
                    ))
                })?;
                let base = self.pullback_point(&root);
                let a = self.cover_a();
                Ok((0..3).map(|k| PicClass::new(*degree, &base + &a.scale(k))).collect())
            }
            _ => Err(Error::UnsupportedAtom(atom.display(&self.base))),
        }
    }
}

fn residues(p: &PointElt) -> [i64; 2] {
    let t = p.torsion_part();
    [t[0], t[1]]
}

/// `φ^* v` as a sum of line bundles on the cover.
pub fn pullback(spec: &IsogenySpec, v: &Bundle) -> Result<Bundle> {
    let mut lines = Vec::new();
    for a in v.atoms() {
        lines.extend(spec.pullback_atom(a)?.into_iter().map(Atom::Line));
    }
    Ok(Bundle::new(lines))
}

fn multisets(len: usize, n: u32) -> Vec<Vec<usize>> {
    fn go(start: usize, len: usize, left: u32, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..len {
            cur.push(i);
            go(i, len, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, len, n, &mut Vec::new(), &mut out);
    out
}

fn sum_classes(zero: &PicClass, items: impl IntoIterator<Item = PicClass>) -> PicClass {
    items.into_iter().fold(zero.clone(), |acc, c| &acc + &c)
}

/// Split-line evaluation on the cover, independent of the rule table.
fn eval_upstairs(spec: &IsogenySpec, e: &BundleExpr) -> Result<Vec<PicClass>> {
    let zero = spec.cover.trivial_class();
    Ok(match e {
        BundleExpr::Atom(a) => spec.pullback_atom(a)?,
        BundleExpr::Sum(a, b) => {
            let mut v = eval_upstairs(spec, a)?;
            v.extend(eval_upstairs(spec, b)?);
            v
        }
        BundleExpr::Tensor(a, b) => {
            let (x, y) = (eval_upstairs(spec, a)?, eval_upstairs(spec, b)?);
            x.iter().flat_map(|p| y.iter().map(move |q| p + q)).collect()
        }
        BundleExpr::Sym(n, a) => {
            let x = eval_upstairs(spec, a)?;
            multisets(x.len(), *n)
                .into_iter()
                .map(|m| sum_classes(&zero, m.into_iter().map(|i| x[i].clone())))
                .collect()
        }
        BundleExpr::Wedge2(a) => {
            let x = eval_upstairs(spec, a)?;
            let mut out = Vec::new();
            for i in 0..x.len() {
                for j in i + 1..x.len() {
                    out.push(&x[i] + &x[j]);
                }
            }
            out
        }
        BundleExpr::Dual(a) => eval_upstairs(spec, a)?.iter().map(|c| -c).collect(),
    })
}

/// Rank and det downstairs from the splitting-principle formulas.
fn rank_det(ctx: &CurveContext, e: &BundleExpr) -> (i64, PicClass) {
    match e {
        BundleExpr::Atom(a) => (a.rank(), a.det()),
        BundleExpr::Sum(a, b) => {
            let ((ra, da), (rb, db)) = (rank_det(ctx, a), rank_det(ctx, b));
            (ra + rb, &da + &db)
        }
        BundleExpr::Tensor(a, b) => {
            let ((ra, da), (rb, db)) = (rank_det(ctx, a), rank_det(ctx, b));
            (ra * rb, &da.scale(rb) + &db.scale(ra))
        }
        BundleExpr::Sym(n, a) => {
            let (r, d) = rank_det(ctx, a);
            let n = i64::from(*n);
            if r == 0 {
                return (i64::from(n == 0), ctx.trivial_class());
            }
            (binomial(n + r - 1, n), d.scale(binomial(n + r - 1, r)))
        }
        BundleExpr::Wedge2(a) => {
            let (r, d) = rank_det(ctx, a);
            if r < 2 {
                return (0, ctx.trivial_class());
            }
            (r * (r - 1) / 2, d.scale(r - 1))
        }
        BundleExpr::Dual(a) => {
            let (r, d) = rank_det(ctx, a);
            (r, -d)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionVerdict {
    pub rank: (i64, i64),
    pub degree: (i64, i64),
    pub det: (PicClass, PicClass),
    pub pullback_match: bool,
    pub pass: bool,
    pub note: String,
}

pub const NECESSARY_ONLY: &str = "necessary condition only: twists by the isogeny kernel are invisible after pullback";

/// Compares `lhs`, evaluated by split-line arithmetic on the cover, with a
/// claimed decomposition on the base.
pub fn check_decomposition(spec: &IsogenySpec, lhs: &BundleExpr, claimed: &Bundle) -> Result<DecompositionVerdict> {
    let ctx = &spec.base;
    let (lr, ld) = rank_det(ctx, lhs);
    let (cr, cd) = (claimed.rank(), crate::bundle_calc::det(ctx, claimed));
    let mut up_l = eval_upstairs(spec, lhs)?;
    let mut up_c: Vec<PicClass> = pullback(spec, claimed)?.atoms().iter().map(Atom::det).collect();
    up_l.sort();
    up_c.sort();
    let pullback_match = up_l == up_c;
    let mut problems = Vec::new();
    if lr != cr {
        problems.push(format!("rank mismatch {lr} vs {cr}"));
    }
    if ld.degree != cd.degree {
        problems.push(format!("degree mismatch {} vs {}", ld.degree, cd.degree));
    }
    if ld != cd {
        problems.push(format!("det mismatch {} vs {}", ctx.format_class(&ld), ctx.format_class(&cd)));
    }
    if !pullback_match {
        problems.push("pullback multisets differ".into());
    }
    let pass = problems.is_empty();
    problems.push(NECESSARY_ONLY.into());
    Ok(DecompositionVerdict {
        rank: (lr, cr),
        degree: (ld.degree, cd.degree),
        det: (ld, cd),
        pullback_match,
        pass,
        note: problems.join("; "),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitCount {
    /// Monomials as multisets of coordinate indices.
    pub monomials: Vec<Vec<usize>>,
    /// Coefficient line bundle of the first monomial, on the cover.
    pub class: PicClass,
    pub contribution: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaCount {
    pub orbits: Vec<OrbitCount>,
    pub total: i64,
}

struct Coordinate {
    class: PicClass,
    /// Image under the generator of `ker φ`.
    image: usize,
    character: i64,
}

fn coordinates(spec: &IsogenySpec, v: &Bundle) -> Result<Vec<Coordinate>> {
    let mut coords = Vec::new();
    for atom in v.atoms() {
        match atom {
            Atom::Line(c) => {
                let i = coords.len();
                coords.push(Coordinate { class: spec.pullback_class(c), image: i, character: spec.character(&c.aj) });
            }
            Atom::Stable { rank: 3, degree, .. } if degree.mod_floor(&3) != 0 => {
                let start = coords.len();
                // translation by a generator of ker φ shifts the Abel–Jacobi
                // sum of a degree-d line by d·a
                let shift = degree.mod_floor(&3) as usize;
                for (k, class) in spec.pullback_atom(atom)?.into_iter().enumerate() {
                    coords.push(Coordinate { class, image: start + (k + shift) % 3, character: 0 });
                }
            }
            _ => {
                return Err(Error::UnsupportedDecomposition(format!(
                    "no equivariant coordinates for {}",
                    atom.display(&spec.base)
                )))
            }
        }
    }
    Ok(coords)
}

fn h0_cover(c: &PicClass) -> i64 {
    match c.degree {
        d if d > 0 => d,
        0 if c.aj.is_zero() => 1,
        _ => 0,
    }
}

/// Dimension of the `ker φ`-invariant part of `H⁰(B̃, Sⁿ(φ^*v) ⊗ φ^*l)`,
/// i.e. `h⁰(B, Sⁿv ⊗ l)`, by orbit bookkeeping on monomials.
pub fn invariant_section_count(spec: &IsogenySpec, v: &Bundle, n: u32, l: &PicClass) -> Result<DeltaCount> {
    let coords = coordinates(spec, v)?;
    let twist = spec.pullback_class(l);
    let twist_char = spec.character(&l.aj);
    let zero = spec.cover.trivial_class();
    let act = |m: &[usize]| {
        let mut out: Vec<usize> = m.iter().map(|&i| coords[i].image).collect();
        out.sort_unstable();
        out
    };
    let mut seen = std::collections::BTreeSet::new();
    let mut orbits = Vec::new();
    for m in multisets(coords.len(), n) {
        if seen.contains(&m) {
            continue;
        }
        let mut orbit = vec![m.clone()];
        let mut next = act(&m);
        while next != m {
            orbit.push(next.clone());
            next = act(&next);
        }
        seen.extend(orbit.iter().cloned());
        let class = &sum_classes(&zero, m.iter().map(|&i| coords[i].class.clone())) + &twist;
        let contribution = if orbit.len() > 1 {
            h0_cover(&class)
        } else {
            if m.iter().any(|&i| coords[i].image != i) {
                return Err(Error::UnsupportedDecomposition("fixed monomial built from moving coordinates".into()));
            }
            let chi: i64 = m.iter().map(|&i| coords[i].character).sum::<i64>() + twist_char;
            match class.degree {
                d if d > 0 => d / 3,
                0 if class.aj.is_zero() && chi.mod_floor(&3) == 0 => 1,
                _ => 0,
            }
        };
        orbits.push(OrbitCount { monomials: orbit, class, contribution });
    }
    let total = orbits.iter().map(|o| o.contribution).sum();
    Ok(DeltaCount { orbits, total })
}

/// Invariant quadric coefficients for `V = E(3,1) ⊕ N` twisted by `N`, with
/// `N` the class of the kernel generator.
pub fn delta_parameter_count(spec: &IsogenySpec) -> Result<DeltaCount> {
    let ctx = &spec.base;
    let n = PicClass::new(0, spec.kernel_gen.clone());
    let v = Bundle::new(vec![Atom::stable(3, 1, ctx.origin_class(1))?, Atom::Line(n.clone())]);
    invariant_section_count(spec, &v, 2, &n)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantForm {
    pub poly: CyclotomicPoly,
    pub solution_dim: usize,
}

/// Cubics `c₁x₁³ + c₂x₂³ + c₃x₃³ + c₄x₁x₂x₃` with `σ^*g = ζ²g` for the
/// cyclic substitution `x₁ ↦ x₂ ↦ x₃ ↦ x₁`.
pub fn cubic_invariant_form() -> InvariantForm {
    let ansatz: [[u32; 4]; 4] = [[3, 0, 0, 0], [0, 3, 0, 0], [0, 0, 3, 0], [1, 1, 1, 0]];
    let perm = [1, 2, 0, 3];
    let target = QZeta::zeta_pow(2);
    // column j holds σ^*(m_j) − ζ²·m_j expanded in the ansatz basis
    let mut m = vec![vec![QZeta::int(0); 4]; 4];
    for (j, e) in ansatz.iter().enumerate() {
        let image = CyclotomicPoly::monomial(QZeta::int(1), *e).permute(perm);
        for (i, f) in ansatz.iter().enumerate() {
            m[i][j] = image.coeff(f) - if i == j { target } else { QZeta::int(0) };
        }
    }
    let basis = cyclotomic::nullspace(&m, 4);
    let mut poly = CyclotomicPoly::zero();
    if let Some(v) = basis.first() {
        for (c, e) in v.iter().zip(&ansatz) {
            poly.add_term(*c, *e);
        }
    }
    InvariantForm { poly, solution_dim: basis.len() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingularLocus {
    pub partials: Vec<CyclotomicPoly>,
    /// Variables (0-based) cut out by the partials.
    pub vanishing: Vec<usize>,
    /// Whether the locus is `{x₁ = x₂ = x₃ = 0}`.
    pub is_section_curve: bool,
}

/// Singular locus of a form in `x₁, x₂, x₃`, decided only when every
/// nonzero partial is a unit times a pure power of its own variable.
pub fn cubic_singular_locus(p: &CyclotomicPoly) -> Result<SingularLocus> {
    if p.terms().any(|(e, _)| e[3] != 0) {
        return Err(Error::Precondition("form involves x4".into()));
    }
    let partials: Vec<CyclotomicPoly> = (0..3).map(|i| p.derivative(i)).collect();
    let mut vanishing = Vec::new();
    for d in partials.iter().filter(|d| !d.is_zero()) {
        let mut terms = d.terms();
        let (e, _) = terms.next().expect("nonzero");
        let vars: Vec<usize> = (0..4).filter(|&i| e[i] > 0).collect();
        if terms.next().is_some() || vars.len() != 1 || vanishing.contains(&vars[0]) {
            return Err(Error::Inconclusive(format!("partial {d} is not a pure power of a new variable")));
        }
        vanishing.push(vars[0]);
    }
    vanishing.sort_unstable();
    let is_section_curve = vanishing == [0, 1, 2];
    Ok(SingularLocus { partials, vanishing, is_section_curve })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> CurveContext {
        let mut ctx = CurveContext::new();
        ctx.add_torsion("eta", 3).unwrap();
        ctx.add_torsion("kappa", 3).unwrap();
        ctx
    }

    fn spec() -> IsogenySpec {
        let b = base();
        let eta = b.point("eta").unwrap();
        IsogenySpec::with_kernel(&b, eta).unwrap()
    }

    fn e(ctx: &CurveContext, d: i64) -> Atom {
        Atom::stable(3, d, ctx.origin_class(d)).unwrap()
    }

    fn n(ctx: &CurveContext) -> PicClass {
        PicClass::new(0, ctx.point("eta").unwrap())
    }

    fn up(s: &IsogenySpec, d: i64, k: i64) -> Atom {
        Atom::Line(PicClass::new(d, s.cover().point("a").unwrap().scale(k)))
    }

    #[test]
    fn e31_splits_into_origin_a_b() {
        let s = spec();
        let pb = pullback(&s, &Bundle::atom(e(s.base(), 1))).unwrap();
        assert_eq!(pb, Bundle::new(vec![up(&s, 1, 0), up(&s, 1, 1), up(&s, 1, 2)]));
    }

    #[test]
    fn kernel_line_pulls_back_trivially() {
        let s = spec();
        let pb = pullback(&s, &Bundle::line(n(s.base()))).unwrap();
        assert_eq!(pb, Bundle::line(s.cover().trivial_class()));
    }

    #[test]
    fn e32_pulls_back_to_pairwise_sums() {
        let s = spec();
        let pb = pullback(&s, &Bundle::atom(e(s.base(), 2))).unwrap();
        assert_eq!(pb, Bundle::new(vec![up(&s, 2, 1), up(&s, 2, 0), up(&s, 2, 2)]));
    }

    #[test]
    fn unsupported_atoms() {
        let s = spec();
        let kappa = s.base().point("kappa").unwrap();
        let bad = Atom::stable(3, 1, PicClass::new(1, kappa)).unwrap();
        assert!(matches!(pullback(&s, &Bundle::atom(bad)), Err(Error::UnsupportedAtom(_))));
    }

    #[test]
    fn spec_requires_full_three_torsion() {
        let mut small = CurveContext::new();
        small.add_torsion("eta", 3).unwrap();
        let eta = small.point("eta").unwrap();
        assert!(IsogenySpec::with_kernel(&small, eta).is_err());
        let b = base();
        let eta = b.point("eta").unwrap();
        assert!(IsogenySpec::new(&b, eta.clone(), eta.scale(2)).is_err());
    }

    #[test]
    fn decomposition_checks() {
        let s = spec();
        let c = s.base();
        let ex = BundleExpr::atom(e(c, 1));
        let s2 = BundleExpr::sym(2, ex.clone());
        let v = check_decomposition(&s, &s2, &Bundle::atom(e(c, 2)).repeat(2)).unwrap();
        assert!(v.pass, "{}", v.note);
        assert!(v.note.contains("necessary"));
        let t = BundleExpr::tensor(ex.clone(), ex.clone());
        assert!(check_decomposition(&s, &t, &Bundle::atom(e(c, 2)).repeat(3)).unwrap().pass);
        let lhs = BundleExpr::sum(ex.clone(), BundleExpr::atom(Atom::Line(n(c))));
        let wrong = Bundle::new(vec![e(c, 1), Atom::Line(-n(c))]);
        let v = check_decomposition(&s, &lhs, &wrong).unwrap();
        assert!(!v.pass && v.pullback_match);
        assert!(v.note.contains("det mismatch"));
    }

    #[test]
    fn delta_count_is_six_over_four_orbits() {
        let s = spec();
        let d = delta_parameter_count(&s).unwrap();
        assert_eq!(d.total, 6);
        assert_eq!(d.orbits.len(), 4);
        let mut parts: Vec<i64> = d.orbits.iter().map(|o| o.contribution).collect();
        parts.sort_unstable();
        assert_eq!(parts, vec![1, 1, 2, 2]);
    }

    #[test]
    fn delta_count_degenerate_twist() {
        let s = spec();
        let c = s.base();
        let v = Bundle::new(vec![e(c, 1), Atom::Line(c.trivial_class())]);
        let d = invariant_section_count(&s, &v, 2, &c.trivial_class()).unwrap();
        assert_eq!(d.total, 6);
    }

    #[test]
    fn cubic_form() {
        let f = cubic_invariant_form();
        assert_eq!(f.solution_dim, 1);
        let mut expected = CyclotomicPoly::zero();
        expected.add_term(QZeta::int(1), [3, 0, 0, 0]);
        expected.add_term(QZeta::zeta(), [0, 3, 0, 0]);
        expected.add_term(QZeta::zeta_pow(2), [0, 0, 3, 0]);
        assert_eq!(f.poly, expected);
        assert!(f.poly.coeff(&[1, 1, 1, 0]).is_zero());
        assert_eq!(f.poly.permute([1, 2, 0, 3]), f.poly.scale(QZeta::zeta_pow(2)));
    }

    #[test]
    fn singular_loci() {
        let f = cubic_invariant_form().poly;
        let loc = cubic_singular_locus(&f).unwrap();
        assert!(loc.is_section_curve);
        assert_eq!(loc.partials[1], CyclotomicPoly::monomial(QZeta::zeta() * QZeta::int(3), [0, 2, 0, 0]));
        let x1 = CyclotomicPoly::monomial(QZeta::int(1), [3, 0, 0, 0]);
        let loc = cubic_singular_locus(&x1).unwrap();
        assert_eq!(loc.vanishing, vec![0]);
        assert!(!loc.is_section_curve);
        let mut hesse = CyclotomicPoly::zero();
        for e in [[3, 0, 0, 0], [0, 3, 0, 0], [0, 0, 3, 0]] {
            hesse.add_term(QZeta::int(1), e);
        }
        hesse.add_term(QZeta::int(-3), [1, 1, 1, 0]);
        assert!(matches!(cubic_singular_locus(&hesse), Err(Error::Inconclusive(_))));
    }
}
