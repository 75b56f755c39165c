//! Rank/degree bookkeeping for the relative canonical algebra of a genus-`g`
//! fibration over an elliptic curve, the slope inequalities built on it, and
//! the claim ledger tying every module together.
//!
//! Notation: `V_n = f_*ω^n`, `σ_n: Sⁿ(V₁) → V_n` with kernel `𝓛_n` and
//! cokernel `𝓣_n`.

use num_integer::binomial;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bundle_calc::{self, cohomology_b, dual, sym, Atom, Bundle, BundleExpr};
use crate::chow_fibration::{
    canonical_class_w, ci_chains, ci_surface_invariants, cohomology_w, linear_system_dim, moduli_dimension, DivClassW,
};
use crate::curve_pic::{CurveContext, PicClass, PointExpr};
use crate::error::{Error, Result};
use crate::isogeny_oracle::{
    check_decomposition, cubic_invariant_form, cubic_singular_locus, delta_parameter_count, invariant_section_count,
    pullback, CyclotomicPoly, IsogenySpec, QZeta,
};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FibrationData {
    pub g: i64,
    pub k2_rel: i64,
    pub chi: i64,
    pub v1: Option<Bundle>,
}

impl FibrationData {
    pub fn new(g: i64, k2_rel: i64, chi: i64, v1: Option<Bundle>) -> Result<Self> {
        if g < 2 {
            return Err(Error::OutOfRange(format!("fibre genus {g} < 2")));
        }
        if let Some(v) = &v1 {
            if v.rank() != g {
                return Err(Error::RankMismatch { expected: g, found: v.rank() });
            }
            if v.degree() != chi {
                return Err(Error::Precondition(format!("deg V1 = {} but chi(S/B) = {chi}", v.degree())));
            }
        }
        Ok(FibrationData { g, k2_rel, chi, v1 })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankDegTable {
    pub n: i64,
    pub rank_vn: i64,
    pub deg_vn: i64,
    pub rank_sn: i64,
    pub deg_sn: Rational,
    pub rank_ln: i64,
    /// `deg 𝓛_n` when `deg 𝓣_n = 0`.
    pub deg_ln_base: Rational,
}

impl RankDegTable {
    pub fn deg_ln(&self, deg_tn: i64) -> Rational {
        self.deg_ln_base + Rational::from_integer(deg_tn)
    }
}

pub fn vn_stats(d: &FibrationData, n: i64) -> Result<RankDegTable> {
    if n < 1 {
        return Err(Error::OutOfRange(format!("n = {n} < 1")));
    }
    let rank_vn = if n == 1 { d.g } else { (2 * n - 1) * (d.g - 1) };
    let deg_vn = n * (n - 1) / 2 * d.k2_rel + d.chi;
    let rank_sn = binomial(n + d.g - 1, n);
    let deg_sn = Rational::new(rank_sn * n * d.chi, d.g);
    Ok(RankDegTable {
        n,
        rank_vn,
        deg_vn,
        rank_sn,
        deg_sn,
        rank_ln: rank_sn - rank_vn,
        deg_ln_base: deg_sn - Rational::from_integer(deg_vn),
    })
}

/// Largest `deg 𝓣₂` with `slope 𝓛₂ ≤ maxslope`; negative means none.
pub fn t2_vanishing_bound_with(d: &FibrationData, maxslope: Rational) -> Result<i64> {
    if d.g <= 3 {
        return Err(Error::GenusTooSmall(d.g));
    }
    let t = vn_stats(d, 2)?;
    let slack = maxslope * Rational::from_integer(t.rank_ln) - t.deg_ln_base;
    Ok(slack.floor().to_integer())
}

/// Uses `maxslope(S²V₁)` when `V₁` is known, else the two-summand bound
/// `2/(g−1)`.
pub fn t2_vanishing_bound(ctx: &CurveContext, d: &FibrationData) -> Result<i64> {
    if d.g <= 3 {
        return Err(Error::GenusTooSmall(d.g));
    }
    let m = match &d.v1 {
        Some(v) => sym(ctx, v, 2)?.maxslope()?,
        None => Rational::new(2, d.g - 1),
    };
    t2_vanishing_bound_with(d, m)
}

/// Largest `g ≥ 2` with `2/g ≤ (K²+1)/(3(g−1))`.
pub fn genus_bound(k2: i64) -> Result<i64> {
    if !(2..5).contains(&k2) {
        return Err(Error::OutOfRange(format!("genus bound needs 2 <= K^2 <= 4, got {k2}")));
    }
    // 6(g − 1) ≤ g(K² + 1)  ⟺  g(5 − K²) ≤ 6
    Ok(6 / (5 - k2))
}

/// `V₁ = E ⊕ N` with `E` a rank-3 stable atom of degree `≡ 1 (mod 3)`.
pub fn split_v1(v1: &Bundle) -> Result<(Atom, PicClass)> {
    match v1.atoms() {
        [Atom::Line(n), e @ Atom::Stable { rank: 3, degree, .. }] if degree.rem_euclid(3) == 1 => {
            Ok((e.clone(), n.clone()))
        }
        _ => Err(Error::Precondition("V1 must be a rank-3 E(3,1)-twist plus a line bundle".into())),
    }
}

fn data_v1(d: &FibrationData) -> Result<&Bundle> {
    d.v1.as_ref().ok_or_else(|| Error::Precondition("V1 decomposition required".into()))
}

fn check_stats(b: &Bundle, rank: i64, degree: Rational, what: &str) -> Result<()> {
    if b.rank() != rank {
        return Err(Error::RankMismatch { expected: rank, found: b.rank() });
    }
    if Rational::from_integer(b.degree()) != degree {
        return Err(Error::Precondition(format!("{what}: degree {} against the forced {degree}", b.degree())));
    }
    Ok(())
}

/// `V₂ = S²V₁ ⊖ N²`.
pub fn v2_decomposition(ctx: &CurveContext, d: &FibrationData) -> Result<Bundle> {
    let v1 = data_v1(d)?;
    let (_, n) = split_v1(v1).map_err(|e| Error::NotASummand(e.to_string()))?;
    let v2 = sym(ctx, v1, 2)?.remove_summand(&Bundle::line(n.scale(2)))?;
    let t = vn_stats(d, 2)?;
    check_stats(&v2, t.rank_vn, Rational::from_integer(t.deg_vn), "V2")?;
    Ok(v2)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TildeV3Comparison {
    pub displayed: Bundle,
    /// In the computed bundle but not the displayed list.
    pub missing_from_displayed: Bundle,
    /// In the displayed list but not the computed bundle.
    pub extra_in_displayed: Bundle,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TildeV3 {
    pub bundle: Bundle,
    pub rank: i64,
    pub degree: i64,
    pub comparison: TildeV3Comparison,
}

fn multiset_minus(a: &Bundle, b: &Bundle) -> Bundle {
    let mut rest = a.atoms().to_vec();
    for x in b.atoms() {
        if let Some(i) = rest.iter().position(|y| y == x) {
            rest.remove(i);
        }
    }
    Bundle::new(rest)
}

/// The summand list `2·O(0) ⊕ ⊕ M_j(0) ⊕ 2·E(3,2)⊗N` that the cubic-level
/// analysis expects for `Ṽ₃`.
pub fn displayed_tilde_v3(ctx: &CurveContext, n: &PicClass) -> Result<Bundle> {
    let mut atoms = vec![Atom::Line(ctx.origin_class(1)); 2];
    for m in ctx.nonzero_three_torsion()? {
        atoms.push(Atom::Line(PicClass::new(1, m)));
    }
    let e32n = Atom::stable(3, 2, ctx.origin_class(2))?.twist(n);
    atoms.push(e32n.clone());
    atoms.push(e32n);
    Ok(Bundle::new(atoms))
}

/// `Ṽ₃ = S³V₁ ⊖ (E ⊗ N²)`.
pub fn tilde_v3(ctx: &CurveContext, d: &FibrationData) -> Result<TildeV3> {
    let v1 = data_v1(d)?;
    let (e, n) = split_v1(v1).map_err(|e| Error::NotASummand(e.to_string()))?;
    let removed = e.twist(&n.scale(2));
    let bundle = sym(ctx, v1, 3)?.remove_summand(&Bundle::atom(removed.clone()))?;
    let t = vn_stats(d, 3)?;
    check_stats(&bundle, t.rank_sn - removed.rank(), t.deg_sn - Rational::from_integer(removed.degree()), "tilde V3")?;
    let displayed = displayed_tilde_v3(ctx, &n)?;
    let missing = multiset_minus(&bundle, &displayed);
    let extra = multiset_minus(&displayed, &bundle);
    let note = if extra.atoms().is_empty() && missing.atoms().is_empty() {
        "computed list equals the displayed list".to_string()
    } else {
        let show = |b: &Bundle| if b.atoms().is_empty() { "nothing".to_string() } else { b.display(ctx) };
        format!(
            "discrepancy: displayed list (rank {}, degree {}) omits {} and adds {}",
            displayed.rank(),
            displayed.degree(),
            show(&missing),
            show(&extra)
        )
    };
    Ok(TildeV3 {
        rank: bundle.rank(),
        degree: bundle.degree(),
        bundle,
        comparison: TildeV3Comparison { displayed, missing_from_displayed: missing, extra_in_displayed: extra, note },
    })
}

/// Degree-1 line summands of maximal slope: the candidates for `𝓛₃'`.
pub fn l3_candidates(tv3: &Bundle) -> Vec<PicClass> {
    let mut out: Vec<PicClass> = tv3
        .atoms()
        .iter()
        .filter_map(|a| match a {
            Atom::Line(c) if c.degree == 1 => Some(c.clone()),
            _ => None,
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NOrderReport {
    /// Classes `(𝓛₃')^{-1}(0)` over all candidates, trivial one removed.
    pub candidates: Vec<PicClass>,
    pub n: PicClass,
    pub l3_prime: PicClass,
    pub n_order: Option<i64>,
    /// `Q + X = 5T + π^*(N^{-2} ⊗ (𝓛₃')^{-1})`.
    pub class_identity: bool,
    /// `K_W + Q + X = T`.
    pub canonical_is_t: bool,
}

/// Quadric and cubic classes `2T + π^*N` and `3T + π^*(N(−0))`.
pub fn ci_classes(ctx: &CurveContext, n: &PicClass) -> (DivClassW, DivClassW) {
    (DivClassW::new(2, n.clone()), DivClassW::new(3, n - &ctx.origin_class(1)))
}

pub fn n_order_check(ctx: &CurveContext, v1: &Bundle) -> Result<NOrderReport> {
    let (_, n) = split_v1(v1)?;
    let data = FibrationData::new(4, 4, v1.degree(), Some(v1.clone()))?;
    let tv3 = tilde_v3(ctx, &data)?;
    let o1 = ctx.origin_class(1);
    let mut candidates: Vec<PicClass> =
        l3_candidates(&tv3.bundle).iter().map(|l| &o1 - l).filter(|c| !c.is_trivial()).collect();
    candidates.sort();
    let fmt = |cs: &[PicClass]| cs.iter().map(|c| ctx.format_class(c)).collect::<Vec<_>>().join(", ");
    if n.is_trivial() {
        return Err(Error::InconsistentContext("N nontrivial required".into()));
    }
    if !candidates.contains(&n) {
        return Err(Error::InconsistentContext(format!(
            "N = {} lies outside the candidate set {{{}}}: empty intersection",
            ctx.format_class(&n),
            fmt(&candidates)
        )));
    }
    let l3_prime = &o1 - &n;
    let (q, x) = ci_classes(ctx, &n);
    let lhs = &q + &x;
    let rhs = DivClassW::new(5, &(-&n.scale(2)) - &l3_prime);
    let kw = canonical_class_w(ctx, v1)?;
    let k = &(&kw + &q) + &x;
    let report = NOrderReport {
        n_order: n.aj.order(),
        class_identity: lhs == rhs,
        canonical_is_t: k == DivClassW::tautological(ctx),
        candidates,
        n,
        l3_prime,
    };
    if !report.class_identity || !report.canonical_is_t {
        return Err(Error::InconsistentContext("class identities fail in Pic(W)".into()));
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimStatus {
    Pass,
    Fail,
    ModelAssumption,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClaimRecord {
    pub id: String,
    pub anchor: String,
    pub computed: String,
    pub expected: String,
    pub status: ClaimStatus,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LedgerReport {
    pub claims: Vec<ClaimRecord>,
    pub context_fingerprint: String,
    pub version: String,
}

impl LedgerReport {
    pub fn failures(&self) -> usize {
        self.claims.iter().filter(|c| c.status == ClaimStatus::Fail).count()
    }

    pub fn claim(&self, id: &str) -> Option<&ClaimRecord> {
        self.claims.iter().find(|c| c.id == id)
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for c in &self.claims {
            let status = match c.status {
                ClaimStatus::Pass => "PASS",
                ClaimStatus::Fail => "FAIL",
                ClaimStatus::ModelAssumption => "ASSUME",
            };
            out.push_str(&format!(
                "{:<4} {:<6} {}\n       computed: {}\n       expected: {}\n",
                c.id, status, c.anchor, c.computed, c.expected
            ));
            if !c.note.is_empty() {
                out.push_str(&format!("       note: {}\n", c.note));
            }
        }
        out.push_str(&format!(
            "{} claims, {} failed; context {}\n",
            self.claims.iter().filter(|c| c.status != ClaimStatus::ModelAssumption).count(),
            self.failures(),
            self.context_fingerprint
        ));
        out
    }
}

pub fn context_fingerprint(ctx: &CurveContext) -> String {
    hex::encode(Sha256::digest(ctx.canonical_text().as_bytes()))
}

/// Outcome of one claim before it is filed.
struct Outcome {
    computed: String,
    expected: String,
    pass: bool,
    note: String,
}

impl Outcome {
    fn eq<T: PartialEq + std::fmt::Debug>(computed: T, expected: T) -> Self {
        Outcome {
            pass: computed == expected,
            computed: format!("{computed:?}"),
            expected: format!("{expected:?}"),
            note: String::new(),
        }
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

/// The standard data: `V₁ = E(3,1;O) ⊕ N`, `N = O(η − 0)`,
/// `Q = 2T + H_η − H_0`, `X = 3T − H_τ`.
pub struct CiData {
    pub n: PicClass,
    pub v1: Bundle,
    pub q: DivClassW,
    pub x: DivClassW,
}

pub fn standard_data(ctx: &CurveContext) -> Result<CiData> {
    let n = ctx.pic_class(&PointExpr::name("eta").term(-1, "O"))?;
    let v1 = Bundle::new(vec![Atom::stable(3, 1, ctx.origin_class(1))?, Atom::Line(n.clone())]);
    let q = DivClassW::new(2, n.clone());
    let x = DivClassW::new(3, -ctx.pic_class(&PointExpr::name("tau"))?);
    Ok(CiData { n, v1, q, x })
}

/// Degenerate data with `N` trivial: `Q = 2T`, `X = 3T − H_0`.
pub fn degenerate_data(ctx: &CurveContext) -> Result<CiData> {
    let n = ctx.trivial_class();
    let v1 = Bundle::new(vec![Atom::stable(3, 1, ctx.origin_class(1))?, Atom::Line(n.clone())]);
    let q = DivClassW::new(2, n.clone());
    let x = DivClassW::new(3, ctx.origin_class(-1));
    Ok(CiData { n, v1, q, x })
}

/// `V = E(3,d; O(d·0)) ⊕ N`, `Q = 2T + π^*N`, `X = 3T + π^*(N^{-2}(−d·0))`.
pub fn sweep_data(ctx: &CurveContext, d: i64) -> Result<CiData> {
    let n = ctx.pic_class(&PointExpr::name("eta").term(-1, "O"))?;
    let e = Atom::indecomposable(3, d, ctx.origin_class(d))?;
    let v1 = Bundle::new(vec![e, Atom::Line(n.clone())]);
    let q = DivClassW::new(2, n.clone());
    let x = DivClassW::new(3, &(-&n.scale(2)) + &ctx.origin_class(-d));
    Ok(CiData { n, v1, q, x })
}

fn standard_fibration(ctx: &CurveContext) -> Result<(CiData, FibrationData)> {
    let p = standard_data(ctx)?;
    let d = FibrationData::new(4, 4, 1, Some(p.v1.clone()))?;
    Ok((p, d))
}

fn claim_c1(ctx: &CurveContext) -> Result<Outcome> {
    let p = standard_data(ctx)?;
    Ok(Outcome::eq(ci_surface_invariants(ctx, &p.v1, &p.q, &p.x)?.k2, 4))
}

fn claim_c2(ctx: &CurveContext) -> Result<Outcome> {
    let p = standard_data(ctx)?;
    let s = ci_surface_invariants(ctx, &p.v1, &p.q, &p.x)?;
    Ok(Outcome::eq((s.fibre_canonical_degree, s.fibre_genus), (6, 4)))
}

fn claim_c3(ctx: &CurveContext) -> Result<Outcome> {
    let p = standard_data(ctx)?;
    let s = ci_surface_invariants(ctx, &p.v1, &p.q, &p.x)?;
    let ch = ci_chains(ctx, &p.v1, &p.q, &p.x)?;
    Ok(Outcome::eq((s.h0_o, s.pg, s.q), (1, 1, 1)).note(format!("O_S(K) cohomology {}", ch.canonical_table())))
}

fn claim_c4(ctx: &CurveContext) -> Result<Outcome> {
    let p = standard_data(ctx)?;
    let computed = (
        linear_system_dim(ctx, &p.v1, &p.q)?,
        linear_system_dim(ctx, &p.v1, &p.x)?,
        bundle_calc::hom_dim(ctx, &p.v1, &p.v1)?,
        moduli_dimension(ctx, &p.v1, &p.q, &p.x)?,
    );
    Ok(Outcome::eq(computed, (5, 0, 3, 4)))
}

fn claim_c5(ctx: &CurveContext) -> Result<Outcome> {
    let p = degenerate_data(ctx)?;
    let s = ci_surface_invariants(ctx, &p.v1, &p.q, &p.x)?;
    let dq = linear_system_dim(ctx, &p.v1, &p.q)?;
    let dx = linear_system_dim(ctx, &p.v1, &p.x)?;
    let end = bundle_calc::hom_dim(ctx, &p.v1, &p.v1)?;
    let m = moduli_dimension(ctx, &p.v1, &p.q, &p.x)?;
    Ok(Outcome::eq((s.pg, s.q, s.k2, m), (2, 2, 4, 4)).note(format!(
        "N trivial forces X in |3T - H_0|; dim|Q| = {dq}, dim|X| = {dx}, dim End(V) = {end}, \
         so 1 + {dq} + {dx} - ({end} - 1) = {m}. h0(S^3 E(3,1)(-0)) = 2 because S^3 E(3,1) \
         contains O(0) twice, which makes |X| a pencil"
    )))
}

fn claim_c6(ctx: &CurveContext) -> Result<Outcome> {
    let mut computed = Vec::new();
    let mut expected = Vec::new();
    for d in 1..=5 {
        let p = sweep_data(ctx, d)?;
        let s = ci_surface_invariants(ctx, &p.v1, &p.q, &p.x)?;
        computed.push((s.k2, s.pg, s.q));
        expected.push((4 * d, d, 1));
    }
    Ok(Outcome::eq(computed, expected))
}

fn claim_c7() -> Result<Outcome> {
    let d = FibrationData::new(4, 4, 1, None)?;
    let (t2, t3) = (vn_stats(&d, 2)?, vn_stats(&d, 3)?);
    let computed = ((t2.rank_vn, t2.deg_vn), t2.rank_ln, t3.rank_ln, (t3.rank_sn, t3.deg_sn.to_integer()));
    let outcome = Outcome::eq(computed, ((9, 5), 1, 5, (20, 15)));
    Ok(Outcome { pass: outcome.pass && t3.deg_sn.is_integer(), ..outcome })
}

fn claim_c8(ctx: &CurveContext) -> Result<Outcome> {
    let (_, d) = standard_fibration(ctx)?;
    let bound = t2_vanishing_bound(ctx, &d)?;
    let mut scan = Vec::new();
    for g in 4..=12 {
        scan.push(t2_vanishing_bound(ctx, &FibrationData::new(g, 4, 1, None)?)?);
    }
    Ok(Outcome::eq((bound, scan), (0, vec![0; 9])).note("scan over g = 4..12 with maxslope 2/(g-1)"))
}

/// Largest `g` in `2..=limit` satisfying `2/g ≤ (K²+1)/(3(g−1))` exactly.
pub fn genus_bound_scan(k2: i64, limit: i64) -> Option<i64> {
    (2..=limit).filter(|&g| Rational::new(2, g) <= Rational::new(k2 + 1, 3 * (g - 1))).max()
}

fn claim_c9() -> Result<Outcome> {
    let mut computed = vec![genus_bound(4)?];
    let mut expected = vec![6];
    for k2 in 2..=4 {
        computed.push(genus_bound(k2)?);
        expected.push(genus_bound_scan(k2, 100).unwrap_or(-1));
    }
    Ok(Outcome::eq(computed, expected).note("first entry genus_bound(4); then K^2 = 2..4 against a scan to g = 100"))
}

fn claim_c10(ctx: &CurveContext) -> Result<Outcome> {
    let (p, d) = standard_fibration(ctx)?;
    let v2 = v2_decomposition(ctx, &d)?;
    let minus2 = -&p.n.scale(2);
    let deg_v2 = bundle_calc::twist(&v2, &minus2).degree();
    let (h0, h1) = cohomology_b(&bundle_calc::twist(&sym(ctx, &p.v1, 2)?, &minus2));
    Ok(Outcome::eq((deg_v2, h0), (5, 1)).note(format!(
        "h0(S^2 V1 (x) N^-2) = {h0}, h1 = {h1}: the two E(3,2)-type summands and E(3,1) (x) N^-1 \
         have positive degree and contribute sections; only the trivial summand O_B is cohomologically \
         visible in h1, and the surrounding argument uses exactly h1 = 1"
    )))
}

fn claim_c11(ctx: &CurveContext) -> Result<Outcome> {
    let (p, d) = standard_fibration(ctx)?;
    let v2 = v2_decomposition(ctx, &d)?;
    let (e, n) = split_v1(&p.v1)?;
    let e32 = Atom::stable(3, 2, ctx.origin_class(2))?;
    let expected = Bundle::new(vec![e32.clone(), e32, e.twist(&n)]);
    // det S²V₁ = (r+1)·det V₁ by the splitting principle
    let det_formula = &bundle_calc::det(ctx, &p.v1).scale(5) - &n.scale(2);
    let det_ok = bundle_calc::det(ctx, &v2) == det_formula;
    Ok(Outcome {
        computed: format!("{} rank {} degree {}", v2.display(ctx), v2.rank(), v2.degree()),
        expected: format!("{} rank 9 degree 5", expected.display(ctx)),
        pass: v2 == expected && (v2.rank(), v2.degree()) == (9, 5) && det_ok,
        note: format!(
            "det V2 = {} (formula {})",
            ctx.format_class(&bundle_calc::det(ctx, &v2)),
            ctx.format_class(&det_formula)
        ),
    })
}

fn claim_c12(ctx: &CurveContext) -> Result<Outcome> {
    let (_, d) = standard_fibration(ctx)?;
    let t = tilde_v3(ctx, &d)?;
    Ok(Outcome::eq((t.rank, t.degree), (17, 14)).note(format!("model note: {}", t.comparison.note)))
}

fn claim_c13(ctx: &CurveContext) -> Result<Outcome> {
    let (_, d) = standard_fibration(ctx)?;
    let t = tilde_v3(ctx, &d)?;
    let cands = l3_candidates(&t.bundle);
    let mut expected = vec![ctx.origin_class(1)];
    expected.extend(ctx.nonzero_three_torsion()?.into_iter().map(|m| PicClass::new(1, m)));
    expected.sort();
    let fmt = |cs: &[PicClass]| cs.iter().map(|c| ctx.format_class(c)).collect::<Vec<_>>().join(", ");
    let ms = t.bundle.maxslope()?;
    Ok(Outcome {
        computed: format!("maxslope {ms}; candidates {{{}}}", fmt(&cands)),
        expected: format!("maxslope 1; candidates {{{}}}", fmt(&expected)),
        pass: ms == Rational::from_integer(1) && cands == expected,
        note: String::new(),
    })
}

fn claim_c14(ctx: &CurveContext) -> Result<Outcome> {
    let p = standard_data(ctx)?;
    let r = n_order_check(ctx, &p.v1)?;
    let computed = (r.n_order, r.class_identity, r.canonical_is_t, ctx.format_class(&r.l3_prime));
    let expected = (Some(3), true, true, ctx.format_class(&(&ctx.origin_class(1) - &p.n)));
    Ok(Outcome::eq(computed, expected).note("identity checked as Q + X = 5T + pi^*(N^-2 (x) L3'^-1); K_W + Q + X = T"))
}

fn claim_c15() -> Result<Outcome> {
    let f = cubic_invariant_form();
    let loc = cubic_singular_locus(&f.poly)?;
    let mut expected = CyclotomicPoly::zero();
    for (k, e) in [[3, 0, 0, 0], [0, 3, 0, 0], [0, 0, 3, 0]].into_iter().enumerate() {
        expected.add_term(QZeta::zeta_pow(k as i64), e);
    }
    Ok(Outcome {
        computed: format!("{}; solution dim {}; singular locus {:?}", f.poly, f.solution_dim, loc.vanishing),
        expected: format!("{expected}; solution dim 1; singular locus [0, 1, 2]"),
        pass: f.poly == expected && f.solution_dim == 1 && loc.is_section_curve,
        note: "singular locus is the section curve x1 = x2 = x3 = 0".into(),
    })
}

fn rule_table_entries(ctx: &CurveContext, v1: &Bundle) -> Result<Vec<(String, BundleExpr)>> {
    let at = |a: Atom| BundleExpr::atom(a);
    let e = |d: i64| Atom::stable(3, d, ctx.origin_class(d));
    let (_, n) = split_v1(v1)?;
    let v = BundleExpr::from_bundle(v1).expect("nonempty");
    Ok(vec![
        ("Sym{2} E(3,1)".into(), BundleExpr::sym(2, at(e(1)?))),
        ("Sym{3} E(3,1)".into(), BundleExpr::sym(3, at(e(1)?))),
        ("E(3,1) (*) E(3,1)".into(), BundleExpr::tensor(at(e(1)?), at(e(1)?))),
        ("E(3,1) (*) E(3,2)".into(), BundleExpr::tensor(at(e(1)?), at(e(2)?))),
        ("Wedge2 E(3,1)".into(), BundleExpr::wedge2(at(e(1)?))),
        ("E(3,1) (*) N^2".into(), BundleExpr::tensor(at(e(1)?), at(Atom::Line(n.scale(2))))),
        ("Sym{2} E(3,4)".into(), BundleExpr::sym(2, at(e(4)?))),
        ("Sym{3} E(3,-2)".into(), BundleExpr::sym(3, at(e(-2)?))),
        ("Dual E(3,1) (*) E(3,1)".into(), BundleExpr::tensor(BundleExpr::dual(at(e(1)?)), at(e(1)?))),
        ("Sym{2} V1".into(), BundleExpr::sym(2, v.clone())),
        ("Sym{3} V1".into(), BundleExpr::sym(3, v.clone())),
        ("Wedge2 V1".into(), BundleExpr::wedge2(v.clone())),
        ("Sym{2} V1 (*) V1".into(), BundleExpr::tensor(BundleExpr::sym(2, v.clone()), v)),
    ])
}

fn random_bundle(ctx: &CurveContext, rng: &mut ChaCha8Rng) -> Result<Bundle> {
    let torsion = ctx.nonzero_three_torsion()?;
    let mut atoms = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        if rng.gen_bool(0.5) {
            let deg = rng.gen_range(-3..=3);
            let aj = if rng.gen_bool(0.8) { torsion[rng.gen_range(0..torsion.len())].clone() } else { ctx.zero() };
            atoms.push(Atom::Line(PicClass::new(deg, aj)));
        } else {
            let d = [-5, -4, -2, -1, 1, 2, 4, 5][rng.gen_range(0..8)];
            atoms.push(Atom::stable(3, d, ctx.origin_class(d))?);
        }
    }
    Ok(Bundle::new(atoms))
}

/// Seed for the randomized oracle regression.
pub const RANDOM_SEED: u64 = 0x5eed_e11c;

fn claim_c16(ctx: &CurveContext) -> Result<Outcome> {
    let p = standard_data(ctx)?;
    let spec = IsogenySpec::with_kernel(ctx, ctx.point("eta")?)?;
    let mut failed = Vec::new();
    let entries = rule_table_entries(ctx, &p.v1)?;
    for (name, expr) in &entries {
        let claimed = expr.eval(ctx)?;
        let v = check_decomposition(&spec, expr, &claimed)?;
        if !v.pass {
            failed.push(format!("{name}: {}", v.note));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(RANDOM_SEED);
    let mut random_ok = 0;
    for i in 0..200 {
        let b = random_bundle(ctx, &mut rng)?;
        let (h0, h1) = cohomology_b(&b);
        let (d0, d1) = cohomology_b(&dual(&b));
        let pb = pullback(&spec, &b)?;
        if h0 - h1 == b.degree() && (h0, h1) == (d1, d0) && pb.degree() == 3 * b.degree() && pb.rank() == b.rank() {
            random_ok += 1;
        } else {
            failed.push(format!("random bundle #{i}: {}", b.display(ctx)));
        }
    }
    Ok(Outcome::eq((entries.len() - failed.len().min(entries.len()), random_ok), (entries.len(), 200))
        .note(if failed.is_empty() { crate::isogeny_oracle::NECESSARY_ONLY.to_string() } else { failed.join("; ") }))
}

fn claim_c17(ctx: &CurveContext) -> Result<Outcome> {
    let p = standard_data(ctx)?;
    let spec = IsogenySpec::with_kernel(ctx, ctx.point("eta")?)?;
    let count = delta_parameter_count(&spec)?;
    let downstairs = cohomology_w(ctx, &p.v1, &p.q)?.get(0).unwrap_or(-1);
    let deg = degenerate_data(ctx)?;
    let deg_up = invariant_section_count(&spec, &deg.v1, 2, &deg.n)?.total;
    let deg_down = cohomology_w(ctx, &deg.v1, &deg.q)?.get(0).unwrap_or(-1);
    Ok(Outcome::eq((count.total, downstairs, count.orbits.len()), (6, 6, 4))
        .note(format!("degenerate twist: {deg_up} invariant parameters against h0 = {deg_down} downstairs")))
}

fn assumption(id: &str, anchor: &str, note: &str) -> ClaimRecord {
    ClaimRecord {
        id: id.into(),
        anchor: anchor.into(),
        computed: "assumed".into(),
        expected: "assumed".into(),
        status: ClaimStatus::ModelAssumption,
        note: note.into(),
    }
}

/// Evaluates every claim independently; errors are filed as failures.
pub fn run_ledger(ctx: &CurveContext) -> LedgerReport {
    type Claim<'a> = (&'static str, &'static str, Box<dyn Fn() -> Result<Outcome> + 'a>);
    let claims: Vec<Claim> = vec![
        ("C1", "K^2 of the (2,3) complete intersection", Box::new(|| claim_c1(ctx))),
        ("C2", "fibre canonical degree and fibre genus", Box::new(|| claim_c2(ctx))),
        ("C3", "h0(O_S), p_g, q forced by the restriction sequences", Box::new(|| claim_c3(ctx))),
        ("C4", "dim|Q|, dim|X|, dim End(V1), moduli dimension", Box::new(|| claim_c4(ctx))),
        ("C5", "degenerate case N = O_B: p_g, q, K^2, moduli dimension", Box::new(|| claim_c5(ctx))),
        ("C6", "sweep V = E(3,d) + N, d = 1..5: (K^2, p_g, q)", Box::new(|| claim_c6(ctx))),
        ("C7", "rank/degree table for g = 4, K^2_rel = 4, chi = 1", Box::new(claim_c7)),
        ("C8", "T_2 vanishing bound", Box::new(|| claim_c8(ctx))),
        ("C9", "genus bound from the slope inequality", Box::new(claim_c9)),
        ("C10", "deg(V2 (x) N^-2) and h0(S^2 V1 (x) N^-2)", Box::new(|| claim_c10(ctx))),
        ("C11", "V2 decomposition", Box::new(|| claim_c11(ctx))),
        ("C12", "tilde V3 rank and degree", Box::new(|| claim_c12(ctx))),
        ("C13", "maxslope(tilde V3) and candidates for L3'", Box::new(|| claim_c13(ctx))),
        ("C14", "N is nontrivial 3-torsion; class identities in Pic(W)", Box::new(|| claim_c14(ctx))),
        ("C15", "invariant cubic and its singular locus", Box::new(claim_c15)),
        ("C16", "oracle regression of the rule table", Box::new(|| claim_c16(ctx))),
        ("C17", "invariant quadric parameter count", Box::new(|| claim_c17(ctx))),
    ];
    let mut records: Vec<ClaimRecord> = claims
        .into_iter()
        .map(|(id, anchor, f)| match f() {
            Ok(o) => ClaimRecord {
                id: id.into(),
                anchor: anchor.into(),
                computed: o.computed,
                expected: o.expected,
                status: if o.pass { ClaimStatus::Pass } else { ClaimStatus::Fail },
                note: o.note,
            },
            Err(e) => ClaimRecord {
                id: id.into(),
                anchor: anchor.into(),
                computed: format!("error: {e}"),
                expected: String::new(),
                status: ClaimStatus::Fail,
                note: String::new(),
            },
        })
        .collect();
    records.push(assumption(
        "A1",
        "V1 has at most two indecomposable summands",
        "input hypothesis taken from the classification of relative canonical algebras; not re-derived",
    ));
    records.push(assumption(
        "A2",
        "multiplicities in S^3 E(3,1)",
        "O(0) twice and each nontrivial 3-torsion twist once; consistent with all computable constraints",
    ));
    records.push(assumption(
        "A3",
        "dets of the two summands of S^2 E(3,1)",
        "only their sum is forced; each summand gets the symmetric choice 2 det E",
    ));
    LedgerReport {
        claims: records,
        context_fingerprint: context_fingerprint(ctx),
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> CurveContext {
        let mut ctx = CurveContext::new();
        ctx.add_torsion("eta", 3).unwrap();
        ctx.add_torsion("kappa", 3).unwrap();
        ctx.define_point("tau", PointExpr::name("O").term(1, "O").term(-1, "eta")).unwrap();
        ctx
    }

    fn standard() -> FibrationData {
        let c = ctx();
        FibrationData::new(4, 4, 1, Some(standard_data(&c).unwrap().v1)).unwrap()
    }

    #[test]
    fn table_for_genus_four() {
        let d = standard();
        let t1 = vn_stats(&d, 1).unwrap();
        assert_eq!((t1.rank_vn, t1.deg_vn), (4, 1));
        let t2 = vn_stats(&d, 2).unwrap();
        assert_eq!((t2.rank_vn, t2.deg_vn, t2.rank_ln), (9, 5, 1));
        let t3 = vn_stats(&d, 3).unwrap();
        assert_eq!((t3.rank_ln, t3.rank_sn, t3.deg_sn), (5, 20, Rational::from_integer(15)));
        assert!(vn_stats(&d, 0).is_err());
    }

    #[test]
    fn rank_l2_closed_form() {
        for g in 4..30 {
            let d = FibrationData::new(g, 4, 1, None).unwrap();
            assert_eq!(vn_stats(&d, 2).unwrap().rank_ln, (g - 2) * (g - 3) / 2);
        }
    }

    #[test]
    fn t2_bounds() {
        let c = ctx();
        assert_eq!(t2_vanishing_bound(&c, &standard()).unwrap(), 0);
        let g5 = FibrationData::new(5, 4, 1, None).unwrap();
        assert_eq!(t2_vanishing_bound(&c, &g5).unwrap(), 0);
        assert_eq!(t2_vanishing_bound_with(&standard(), Rational::from_integer(2)).unwrap(), 2);
        let g3 = FibrationData::new(3, 4, 1, None).unwrap();
        assert_eq!(t2_vanishing_bound(&c, &g3), Err(Error::GenusTooSmall(3)));
    }

    #[test]
    fn genus_bounds() {
        assert_eq!(genus_bound(4).unwrap(), 6);
        assert_eq!(genus_bound(2).unwrap(), 2);
        assert_eq!(genus_bound(3).unwrap(), 3);
        assert!(matches!(genus_bound(5), Err(Error::OutOfRange(_))));
        for k2 in 2..=4 {
            assert_eq!(Some(genus_bound(k2).unwrap()), genus_bound_scan(k2, 100));
        }
    }

    #[test]
    fn v2_shapes() {
        let c = ctx();
        let v2 = v2_decomposition(&c, &standard()).unwrap();
        assert_eq!((v2.rank(), v2.degree()), (9, 5));
        let deg = degenerate_data(&c).unwrap();
        let d = FibrationData::new(4, 4, 1, Some(deg.v1)).unwrap();
        let v2 = v2_decomposition(&c, &d).unwrap();
        assert!(v2.contains(&Atom::stable(3, 1, c.origin_class(1)).unwrap()));
        let wrong = FibrationData { g: 4, k2_rel: 4, chi: 1, v1: Some(Bundle::line(c.origin_class(1))) };
        assert!(matches!(v2_decomposition(&c, &wrong), Err(Error::NotASummand(_))));
    }

    #[test]
    fn tilde_v3_and_comparison() {
        let c = ctx();
        let t = tilde_v3(&c, &standard()).unwrap();
        assert_eq!((t.rank, t.degree), (17, 14));
        assert_eq!(t.comparison.displayed.rank(), 16);
        assert_eq!(t.comparison.missing_from_displayed, Bundle::line(c.trivial_class()));
        assert!(t.comparison.extra_in_displayed.atoms().is_empty());
        assert!(t.comparison.note.starts_with("discrepancy"));
        assert_eq!(t.bundle.maxslope().unwrap(), Rational::from_integer(1));
        assert_eq!(l3_candidates(&t.bundle).len(), 9);
    }

    #[test]
    fn n_order_examples() {
        let c = ctx();
        let r = n_order_check(&c, &standard_data(&c).unwrap().v1).unwrap();
        assert_eq!(r.l3_prime, &c.origin_class(1) - &standard_data(&c).unwrap().n);
        assert_eq!(r.n_order, Some(3));
        assert_eq!(r.candidates.len(), 8);
        let deg = degenerate_data(&c).unwrap();
        match n_order_check(&c, &deg.v1) {
            Err(Error::InconsistentContext(m)) => assert!(m.contains("nontrivial")),
            other => panic!("{other:?}"),
        }
        let mut free = ctx();
        free.add_free("p").unwrap();
        let n = free.pic_class(&PointExpr::name("p").term(-1, "O")).unwrap();
        let v1 = Bundle::new(vec![Atom::stable(3, 1, free.origin_class(1)).unwrap(), Atom::Line(n)]);
        match n_order_check(&free, &v1) {
            Err(Error::InconsistentContext(m)) => assert!(m.contains("empty intersection")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fibration_data_validates_v1() {
        let c = ctx();
        let v1 = standard_data(&c).unwrap().v1;
        assert!(FibrationData::new(5, 4, 1, Some(v1.clone())).is_err());
        assert!(FibrationData::new(4, 4, 2, Some(v1)).is_err());
    }
}
