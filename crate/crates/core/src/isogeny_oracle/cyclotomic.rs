//! Exact arithmetic in `ℚ(ζ)`, `ζ² + ζ + 1 = 0`, and polynomials over it.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::Rational;

/// `a + bζ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QZeta {
    pub a: Rational,
    pub b: Rational,
}

impl QZeta {
    pub fn new(a: Rational, b: Rational) -> Self {
        QZeta { a, b }
    }

    pub fn int(n: i64) -> Self {
        QZeta::new(Rational::from_integer(n), Rational::zero())
    }

    pub fn zeta() -> Self {
        QZeta::new(Rational::zero(), Rational::one())
    }

    pub fn zeta_pow(k: i64) -> Self {
        match k.rem_euclid(3) {
            0 => QZeta::int(1),
            1 => QZeta::zeta(),
            // ζ² = −1 − ζ
            _ => QZeta::new(-Rational::one(), -Rational::one()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Galois conjugate `ζ ↦ ζ²`.
    pub fn conj(&self) -> Self {
        QZeta::new(self.a - self.b, -self.b)
    }

    /// Field norm `a² − ab + b²`.
    pub fn norm(&self) -> Rational {
        self.a * self.a - self.a * self.b + self.b * self.b
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        let c = self.conj();
        Some(QZeta::new(c.a / n, c.b / n))
    }
}

impl Add for QZeta {
    type Output = QZeta;
    fn add(self, o: QZeta) -> QZeta {
        QZeta::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for QZeta {
    type Output = QZeta;
    fn sub(self, o: QZeta) -> QZeta {
        QZeta::new(self.a - o.a, self.b - o.b)
    }
}

impl Neg for QZeta {
    type Output = QZeta;
    fn neg(self) -> QZeta {
        QZeta::new(-self.a, -self.b)
    }
}

impl Mul for QZeta {
    type Output = QZeta;
    fn mul(self, o: QZeta) -> QZeta {
        // (a + bζ)(c + dζ) = ac + (ad + bc)ζ + bd(−1 − ζ)
        let bd = self.b * o.b;
        QZeta::new(self.a * o.a - bd, self.a * o.b + self.b * o.a - bd)
    }
}

impl fmt::Display for QZeta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == QZeta::zeta() {
            return write!(f, "zeta");
        }
        if *self == QZeta::zeta_pow(2) {
            return write!(f, "zeta^2");
        }
        match (self.a.is_zero(), self.b.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}*zeta", self.b),
            (false, false) => write!(f, "({} + {}*zeta)", self.a, self.b),
        }
    }
}

pub type Exponent = [u32; 4];

/// Polynomial in `x₁..x₄` over `ℚ(ζ)`; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CyclotomicPoly {
    terms: BTreeMap<Exponent, QZeta>,
}

impl CyclotomicPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(c: QZeta, e: Exponent) -> Self {
        let mut p = Self::zero();
        p.add_term(c, e);
        p
    }

    pub fn add_term(&mut self, c: QZeta, e: Exponent) {
        let v = self.terms.get(&e).copied().unwrap_or(QZeta::int(0)) + c;
        if v.is_zero() {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, v);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &QZeta)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exponent) -> QZeta {
        self.terms.get(e).copied().unwrap_or(QZeta::int(0))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: QZeta) -> Self {
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            out.add_term(*v * c, *e);
        }
        out
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            if e[var] > 0 {
                let mut e2 = *e;
                e2[var] -= 1;
                out.add_term(*v * QZeta::int(i64::from(e[var])), e2);
            }
        }
        out
    }

    /// Substitution `x_i ↦ x_{perm[i]}`.
    pub fn permute(&self, perm: [usize; 4]) -> Self {
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            let mut e2 = [0; 4];
            for i in 0..4 {
                e2[perm[i]] += e[i];
            }
            out.add_term(*v, e2);
        }
        out
    }
}

impl Add for &CyclotomicPoly {
    type Output = CyclotomicPoly;
    fn add(self, o: &CyclotomicPoly) -> CyclotomicPoly {
        let mut out = self.clone();
        for (e, v) in &o.terms {
            out.add_term(*v, *e);
        }
        out
    }
}

impl fmt::Display for CyclotomicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(e, v)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| if k == 1 { format!("x{}", i + 1) } else { format!("x{}^{k}", i + 1) })
                    .collect();
                let mono = mono.join("*");
                match (*v == QZeta::int(1), mono.is_empty()) {
                    (true, false) => mono,
                    (_, true) => v.to_string(),
                    _ => format!("{v}*{mono}"),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Basis of the right nullspace of `m`, each vector normalized to have its
/// first nonzero entry equal to 1.
pub fn nullspace(m: &[Vec<QZeta>], cols: usize) -> Vec<Vec<QZeta>> {
    let mut rows: Vec<Vec<QZeta>> = m.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv().expect("nonzero pivot");
        for x in rows[r].iter_mut() {
            *x = *x * inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c];
                let pivot_row = rows[r].clone();
                for (x, p) in rows[i].iter_mut().zip(pivot_row) {
                    *x = *x - f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![QZeta::int(0); cols];
        v[free] = QZeta::int(1);
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = -rows[i][free];
        }
        let lead = *v.iter().find(|x| !x.is_zero()).expect("basis vector is nonzero");
        let inv = lead.inv().expect("nonzero");
        basis.push(v.into_iter().map(|x| x * inv).collect());
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_is_a_primitive_cube_root() {
        let z = QZeta::zeta();
        assert_eq!(z * z * z, QZeta::int(1));
        assert_eq!(QZeta::int(1) + z + z * z, QZeta::int(0));
        assert_eq!(QZeta::zeta_pow(2), z * z);
        assert_eq!(QZeta::zeta_pow(-1), z * z);
    }

    #[test]
    fn inverse_and_norm() {
        let x = QZeta::new(Rational::from_integer(2), Rational::from_integer(-3));
        assert_eq!(x * x.inv().unwrap(), QZeta::int(1));
        assert_eq!(QZeta::zeta().norm(), Rational::one());
        assert!(QZeta::int(0).inv().is_none());
    }

    #[test]
    fn derivative_and_permute() {
        let p = CyclotomicPoly::monomial(QZeta::zeta(), [3, 0, 0, 0]);
        assert_eq!(p.derivative(0), CyclotomicPoly::monomial(QZeta::zeta() * QZeta::int(3), [2, 0, 0, 0]));
        assert!(p.derivative(1).is_zero());
        assert_eq!(p.permute([1, 2, 0, 3]), CyclotomicPoly::monomial(QZeta::zeta(), [0, 3, 0, 0]));
    }

    #[test]
    fn terms_cancel() {
        let p = CyclotomicPoly::monomial(QZeta::int(1), [1, 1, 0, 0]);
        let q = p.scale(QZeta::int(-1));
        assert!((&p + &q).is_zero());
    }

    #[test]
    fn nullspace_of_rank_one_matrix() {
        let one = QZeta::int(1);
        let m = vec![vec![one, QZeta::zeta()]];
        let ns = nullspace(&m, 2);
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0], vec![QZeta::int(1), -QZeta::zeta_pow(2)]);
    }
}
