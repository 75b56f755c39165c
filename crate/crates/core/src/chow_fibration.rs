//! Intersection numbers and cohomology on the projective bundle
//! `W = ℙ(V) → B` of a rank-4 bundle, and the invariants of a surface cut
//! out by a relative quadric and cubic.
//!
//! Conventions: `π_* O_W(T) = V`, `T³·H = 1`, `T⁴ = deg V`, `H² = 0`.

use std::fmt;

use crate::bundle_calc::{cohomology_b, det, hom_dim, sym, twist, Bundle};
use crate::curve_pic::{CurveContext, PicClass};
use crate::error::{Error, Result};

const DIM_W: usize = 4;

/// Divisor class `t·T + π^*fib` on `W`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DivClassW {
    pub t: i64,
    pub fib: PicClass,
}

impl DivClassW {
    pub fn new(t: i64, fib: PicClass) -> Self {
        DivClassW { t, fib }
    }

    pub fn tautological(ctx: &CurveContext) -> Self {
        DivClassW::new(1, ctx.trivial_class())
    }

    /// Fibre over the origin.
    pub fn fibre(ctx: &CurveContext) -> Self {
        DivClassW::new(0, ctx.origin_class(1))
    }

    pub fn scale(&self, k: i64) -> Self {
        DivClassW::new(self.t * k, self.fib.scale(k))
    }

    pub fn display(&self, ctx: &CurveContext) -> String {
        format!("{}*T + pi^*{}", self.t, ctx.format_class(&self.fib))
    }
}

impl std::ops::Add for &DivClassW {
    type Output = DivClassW;
    fn add(self, o: &DivClassW) -> DivClassW {
        DivClassW::new(self.t + o.t, &self.fib + &o.fib)
    }
}

impl std::ops::Sub for &DivClassW {
    type Output = DivClassW;
    fn sub(self, o: &DivClassW) -> DivClassW {
        DivClassW::new(self.t - o.t, &self.fib - &o.fib)
    }
}

impl std::ops::Neg for &DivClassW {
    type Output = DivClassW;
    fn neg(self) -> DivClassW {
        DivClassW::new(-self.t, -&self.fib)
    }
}

/// Cohomology dimensions `h⁰..h^dim`; `None` marks a value not yet forced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CohTable {
    pub h: Vec<Option<i64>>,
}

impl CohTable {
    pub fn known(h: Vec<i64>) -> Self {
        CohTable { h: h.into_iter().map(Some).collect() }
    }

    pub fn unknown(dim: usize) -> Self {
        CohTable { h: vec![None; dim + 1] }
    }

    pub fn dim(&self) -> usize {
        self.h.len() - 1
    }

    /// `h^i`, with `Some(0)` past the dimension.
    pub fn get(&self, i: usize) -> Option<i64> {
        self.h.get(i).copied().unwrap_or(Some(0))
    }

    pub fn is_known(&self) -> bool {
        self.h.iter().all(Option::is_some)
    }

    pub fn values(&self) -> Option<Vec<i64>> {
        self.h.iter().copied().collect()
    }

    pub fn euler(&self) -> Option<i64> {
        let mut chi = 0;
        for (i, v) in self.h.iter().enumerate() {
            chi += if i % 2 == 0 { (*v)? } else { -(*v)? };
        }
        Some(chi)
    }
}

impl fmt::Display for CohTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.h.iter().map(|v| v.map_or_else(|| "?".to_string(), |x| x.to_string())).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceInvariants {
    pub k2: i64,
    pub pg: i64,
    pub q: i64,
    pub h0_o: i64,
    pub chi: i64,
    pub fibre_canonical_degree: i64,
    pub fibre_genus: i64,
}

fn require_rank4(v: &Bundle) -> Result<()> {
    match v.rank() {
        4 => Ok(()),
        r => Err(Error::RankMismatch { expected: 4, found: r }),
    }
}

pub fn intersect4(v: &Bundle, classes: [&DivClassW; 4]) -> Result<i64> {
    require_rank4(v)?;
    let ts: Vec<i64> = classes.iter().map(|c| c.t).collect();
    let mut total = v.degree() * ts.iter().product::<i64>();
    for (i, c) in classes.iter().enumerate() {
        let others: i64 = ts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, t)| t).product();
        total += c.fib.degree * others;
    }
    Ok(total)
}

pub fn canonical_class_w(ctx: &CurveContext, v: &Bundle) -> Result<DivClassW> {
    require_rank4(v)?;
    Ok(DivClassW::new(-(DIM_W as i64), det(ctx, v)))
}

pub fn cohomology_w(ctx: &CurveContext, v: &Bundle, d: &DivClassW) -> Result<CohTable> {
    require_rank4(v)?;
    if d.t >= 0 {
        let n = u32::try_from(d.t).map_err(|_| Error::OutOfRange(format!("t = {}", d.t)))?;
        let (h0, h1) = cohomology_b(&twist(&sym(ctx, v, n)?, &d.fib));
        Ok(CohTable::known(vec![h0, h1, 0, 0, 0]))
    } else if d.t > -(DIM_W as i64) {
        Ok(CohTable::known(vec![0; DIM_W + 1]))
    } else {
        let dual = &canonical_class_w(ctx, v)? - d;
        let mut h = cohomology_w(ctx, v, &dual)?.h;
        h.reverse();
        Ok(CohTable { h })
    }
}

pub fn linear_system_dim(ctx: &CurveContext, v: &Bundle, d: &DivClassW) -> Result<i64> {
    Ok(cohomology_w(ctx, v, d)?.get(0).expect("known on W") - 1)
}

/// One exact sequence `0 → A → B → C → 0`, solved in place.
///
/// The long sequence is cut at known zeros; a segment is solved when it has
/// a single unknown entry, and checked when it has none.
pub fn solve_les(name: &str, tables: [&mut CohTable; 3]) -> Result<()> {
    let top = tables.iter().map(|t| t.dim()).max().unwrap_or(0);
    let slots: Vec<(usize, usize)> = (0..=top).flat_map(|i| (0..3).map(move |k| (i, k))).collect();
    let read = |tables: &[&mut CohTable; 3], (i, k): (usize, usize)| tables[k].get(i);
    loop {
        let mut progress = false;
        let mut start = 0;
        while start < slots.len() {
            let mut end = start;
            while end < slots.len() && read(&tables, slots[end]) != Some(0) {
                end += 1;
            }
            let segment = &slots[start..end];
            let unknown: Vec<usize> = (0..segment.len()).filter(|&j| read(&tables, segment[j]).is_none()).collect();
            // the first entry of a segment sits just after a zero, so signs
            // alternate from + at its start
            let sign = |j: usize| if j.is_multiple_of(2) { 1 } else { -1 };
            match unknown.len() {
                0 if !segment.is_empty() => {
                    let sum: i64 = (0..segment.len()).map(|j| sign(j) * read(&tables, segment[j]).unwrap()).sum();
                    if sum != 0 {
                        return Err(Error::InconsistentLes(format!(
                            "{name}: alternating sum {sum} over {}",
                            describe(&tables, segment)
                        )));
                    }
                }
                1 => {
                    let u = unknown[0];
                    let rest: i64 = (0..segment.len())
                        .filter(|&j| j != u)
                        .map(|j| sign(j) * read(&tables, segment[j]).unwrap())
                        .sum();
                    let value = -rest * sign(u);
                    if value < 0 {
                        return Err(Error::InconsistentLes(format!(
                            "{name}: forced negative dimension in {}",
                            describe(&tables, segment)
                        )));
                    }
                    let (i, k) = segment[u];
                    tables[k].h[i] = Some(value);
                    progress = true;
                }
                _ => {}
            }
            start = end + 1;
        }
        if !progress {
            return Ok(());
        }
    }
}

fn describe(tables: &[&mut CohTable; 3], segment: &[(usize, usize)]) -> String {
    let names = ["A", "B", "C"];
    let parts: Vec<String> = segment
        .iter()
        .map(|&(i, k)| {
            let v = tables[k].get(i).map_or_else(|| "?".into(), |x| x.to_string());
            format!("h{i}({})={v}", names[k])
        })
        .collect();
    format!("[{}]", parts.join(" -> "))
}

/// All tables of the three restriction sequences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CiChains {
    /// `0 → O_W(K−Q) → O_W(K) → O_Q(K) → 0`
    pub a: [CohTable; 3],
    /// `0 → O_W(K_W) → O_W(K−X) → O_Q(K−X) → 0`
    pub b: [CohTable; 3],
    /// `0 → O_Q(K−X) → O_Q(K) → O_S(K) → 0`
    pub c: [CohTable; 3],
}

impl CiChains {
    pub fn canonical_table(&self) -> &CohTable {
        &self.c[2]
    }
}

fn run_les(name: &str, mut t: [CohTable; 3]) -> Result<[CohTable; 3]> {
    let [a, b, c] = &mut t;
    solve_les(name, [a, b, c])?;
    Ok(t)
}

fn check_ci_degrees(q: &DivClassW, x: &DivClassW) -> Result<()> {
    if q.t != 2 || x.t != 3 {
        return Err(Error::Precondition(format!(
            "expected a (2,3) complete intersection, got tautological degrees ({}, {})",
            q.t, x.t
        )));
    }
    Ok(())
}

pub fn ci_chains(ctx: &CurveContext, v: &Bundle, q: &DivClassW, x: &DivClassW) -> Result<CiChains> {
    check_ci_degrees(q, x)?;
    let kw = canonical_class_w(ctx, v)?;
    let k = &(&kw + q) + x;
    let a = run_les(
        "O_W(K-Q) -> O_W(K) -> O_Q(K)",
        [cohomology_w(ctx, v, &(&k - q))?, cohomology_w(ctx, v, &k)?, CohTable::unknown(3)],
    )?;
    let b = run_les(
        "O_W(K_W) -> O_W(K-X) -> O_Q(K-X)",
        [cohomology_w(ctx, v, &kw)?, cohomology_w(ctx, v, &(&k - x))?, CohTable::unknown(3)],
    )?;
    let c = run_les("O_Q(K-X) -> O_Q(K) -> O_S(K)", [b[2].clone(), a[2].clone(), CohTable::unknown(2)])?;
    Ok(CiChains { a, b, c })
}

pub fn ci_surface_invariants(
    ctx: &CurveContext,
    v: &Bundle,
    q: &DivClassW,
    x: &DivClassW,
) -> Result<SurfaceInvariants> {
    let chains = ci_chains(ctx, v, q, x)?;
    let kw = canonical_class_w(ctx, v)?;
    let k = &(&kw + q) + x;
    let k2 = intersect4(v, [&k, &k, q, x])?;
    let h = DivClassW::fibre(ctx);
    let fibre_canonical_degree = intersect4(v, [&(&k + &h), q, x, &h])?;
    let ks = chains.canonical_table();
    let need = |i: usize, what: &str| {
        ks.get(i).ok_or_else(|| Error::AmbiguousLes {
            target: what.to_string(),
            segment: format!("O_Q(K-X)={} O_Q(K)={} O_S(K)={}", chains.c[0], chains.c[1], ks),
        })
    };
    // Serre duality on S: h^i(K_S) = h^{2-i}(O_S)
    let pg = need(0, "p_g = h0(K_S)")?;
    let q_irr = need(1, "q = h1(K_S)")?;
    let h0_o = need(2, "h0(O_S) = h2(K_S)")?;
    Ok(SurfaceInvariants {
        k2,
        pg,
        q: q_irr,
        h0_o,
        chi: h0_o - q_irr + pg,
        fibre_canonical_degree,
        fibre_genus: fibre_canonical_degree / 2 + 1,
    })
}

pub fn moduli_dimension(ctx: &CurveContext, v: &Bundle, q: &DivClassW, x: &DivClassW) -> Result<i64> {
    let end = hom_dim(ctx, v, v)?;
    Ok(1 + linear_system_dim(ctx, v, q)? + linear_system_dim(ctx, v, x)? - (end - 1))
}
