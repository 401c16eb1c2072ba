//! Exterior calculus in the fixed coframe `(dz, dw)`.

use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::series::{invert_map, Series2, UNIT_TOLERANCE};

/// `p dz + q dw`.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm {
    pub p: Series2,
    pub q: Series2,
}

/// `r dz∧dw`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoForm {
    pub r: Series2,
}

/// `c0 dz³ + c1 dz²dw + c2 dz dw² + c3 dw³`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sym3Diff {
    pub c: [Series2; 4],
}

impl OneForm {
    pub fn new(p: Series2, q: Series2) -> Self {
        OneForm { p, q }
    }

    pub fn zero(n: usize) -> Self {
        OneForm::new(Series2::zero(n), Series2::zero(n))
    }

    pub fn dz(n: usize) -> Self {
        OneForm::new(Series2::one(n), Series2::zero(n))
    }

    pub fn dw(n: usize) -> Self {
        OneForm::new(Series2::zero(n), Series2::one(n))
    }

    pub fn valid_order(&self) -> usize {
        self.p.valid_order().min(self.q.valid_order())
    }

    pub fn max_order(&self) -> usize {
        self.p.max_order().min(self.q.max_order())
    }

    /// Largest coefficient modulus over trustworthy degrees.
    pub fn norm(&self) -> f64 {
        let v = self.valid_order();
        let p = self.p.clone().with_valid_order(v).norm();
        p.max(self.q.clone().with_valid_order(v).norm())
    }

    pub fn scale(&self, s: &Series2) -> Self {
        scale_form(s, self)
    }

    pub fn scale_const(&self, c: crate::Complex) -> Self {
        OneForm::new(self.p.scale(c), self.q.scale(c))
    }

    /// Pullback along `z = z_of(u, v)`, `w = w_of(u, v)`.
    pub fn pullback(&self, z_of: &Series2, w_of: &Series2) -> Result<Self> {
        let p = self.p.compose(z_of, w_of)?;
        let q = self.q.compose(z_of, w_of)?;
        let dz = grad(z_of);
        let dw = grad(w_of);
        Ok(&dz.scale(&p) + &dw.scale(&q))
    }
}

impl TwoForm {
    pub fn new(r: Series2) -> Self {
        TwoForm { r }
    }

    pub fn valid_order(&self) -> usize {
        self.r.valid_order()
    }

    pub fn scale(&self, s: &Series2) -> Self {
        TwoForm::new(s * &self.r)
    }
}

impl Sym3Diff {
    pub fn new(c0: Series2, c1: Series2, c2: Series2, c3: Series2) -> Self {
        Sym3Diff { c: [c0, c1, c2, c3] }
    }

    /// `(a dz + b dw) dz dw`.
    pub fn from_adapted(a: &Series2, b: &Series2) -> Self {
        let n = a.max_order().min(b.max_order());
        let zero = Series2::zero(n).with_valid_order(a.valid_order().min(b.valid_order()));
        Sym3Diff::new(zero.clone(), a.clone(), b.clone(), zero)
    }

    pub fn max_order(&self) -> usize {
        self.c.iter().map(Series2::max_order).min().unwrap_or(0)
    }

    pub fn valid_order(&self) -> usize {
        self.c.iter().map(Series2::valid_order).min().unwrap_or(0)
    }

    /// Largest coefficient modulus over trustworthy degrees.
    pub fn norm(&self) -> f64 {
        let v = self.valid_order();
        self.c
            .iter()
            .map(|s| s.clone().with_valid_order(v).norm())
            .fold(0.0, f64::max)
    }

    /// Largest modulus among the base-point coefficients.
    pub fn base_scale(&self) -> f64 {
        self.c.iter().map(|s| s.constant_term().norm()).fold(0.0, f64::max)
    }

    pub fn is_nondegenerate(&self) -> bool {
        let scale = self.base_scale();
        scale > 0.0 && discriminant(self).constant_term().norm() > UNIT_TOLERANCE * scale.powi(4)
    }

    pub fn sub(&self, other: &Sym3Diff) -> Sym3Diff {
        Sym3Diff {
            c: std::array::from_fn(|k| &self.c[k] - &other.c[k]),
        }
    }

    pub fn scale(&self, s: &Series2) -> Sym3Diff {
        Sym3Diff {
            c: std::array::from_fn(|k| s * &self.c[k]),
        }
    }

    pub fn resize(&self, n: usize) -> Sym3Diff {
        Sym3Diff {
            c: std::array::from_fn(|k| self.c[k].resize(n)),
        }
    }
}

pub fn wedge(u: &OneForm, v: &OneForm) -> TwoForm {
    TwoForm::new(&u.p * &v.q - &u.q * &v.p)
}

pub fn exterior_d(u: &OneForm) -> TwoForm {
    TwoForm::new(u.q.dz() - u.p.dw())
}

pub fn grad(h: &Series2) -> OneForm {
    OneForm::new(h.dz(), h.dw())
}

/// The function `num / den` for 2-forms; the denominator must be a unit.
pub fn ratio2(num: &TwoForm, den: &TwoForm) -> Result<Series2> {
    num.r.div(&den.r)
}

pub fn scale_form(s: &Series2, u: &OneForm) -> OneForm {
    OneForm::new(s * &u.p, s * &u.q)
}

/// Fully expanded symmetric product of three 1-forms.
pub fn sym3_product(u: &OneForm, v: &OneForm, x: &OneForm) -> Sym3Diff {
    let pp = &u.p * &v.p;
    let pq = &u.p * &v.q;
    let qp = &u.q * &v.p;
    let qq = &u.q * &v.q;
    let mixed = &pq + &qp;
    Sym3Diff::new(
        &pp * &x.p,
        &(&pp * &x.q) + &(&mixed * &x.p),
        &(&mixed * &x.q) + &(&qq * &x.p),
        &qq * &x.q,
    )
}

/// Discriminant of the binary cubic; nonzero exactly when the three lines are distinct.
pub fn discriminant(eta: &Sym3Diff) -> Series2 {
    let [c0, c1, c2, c3] = &eta.c;
    let c0c3 = c0 * c3;
    let c1c2 = c1 * c2;
    let c1_sq = c1 * c1;
    let c2_sq = c2 * c2;
    &(&(&c0c3 * &c1c2).scale_real(18.0) - &(&(&c1_sq * c1) * c3).scale_real(4.0))
        + &(&(&c1c2 * &c1c2) - &(&(&c2_sq * c2) * c0).scale_real(4.0))
        - (&c0c3 * &c0c3).scale_real(27.0)
}

/// Rewrites `eta` in coordinates `(u, v)` where `z = z_of(u, v)`, `w = w_of(u, v)`.
pub fn pullback_sym3(eta: &Sym3Diff, z_of: &Series2, w_of: &Series2) -> Result<Sym3Diff> {
    let (a, b) = (z_of.coeff(1, 0), z_of.coeff(0, 1));
    let (c, d) = (w_of.coeff(1, 0), w_of.coeff(0, 1));
    let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm()).max(1.0);
    if (a * d - b * c).norm() <= UNIT_TOLERANCE * scale * scale {
        return Err(Error::SingularJacobian);
    }
    let dz = grad(z_of);
    let dw = grad(w_of);
    let basis = [
        sym3_product(&dz, &dz, &dz),
        sym3_product(&dz, &dz, &dw),
        sym3_product(&dz, &dw, &dw),
        sym3_product(&dw, &dw, &dw),
    ];
    let n = eta.max_order().min(z_of.max_order()).min(w_of.max_order());
    let mut out: [Series2; 4] = std::array::from_fn(|_| Series2::zero(n));
    for (coeff, monomial) in eta.c.iter().zip(basis.iter()) {
        let composed = coeff.compose(z_of, w_of)?;
        for (o, m) in out.iter_mut().zip(monomial.c.iter()) {
            *o += &(&composed * m);
        }
    }
    Ok(Sym3Diff { c: out })
}

/// Pullback along the inverse of `(z, w) -> (u(z, w), v(z, w))`, i.e. the same
/// differential written in the chart `(u, v)`.
pub fn push_to_chart(eta: &Sym3Diff, u: &Series2, v: &Series2) -> Result<Sym3Diff> {
    let (z_of, w_of) = invert_map(u, v)?;
    pullback_sym3(eta, &z_of, &w_of)
}

impl Add for &OneForm {
    type Output = OneForm;
    fn add(self, rhs: &OneForm) -> OneForm {
        OneForm::new(&self.p + &rhs.p, &self.q + &rhs.q)
    }
}

impl Sub for &OneForm {
    type Output = OneForm;
    fn sub(self, rhs: &OneForm) -> OneForm {
        OneForm::new(&self.p - &rhs.p, &self.q - &rhs.q)
    }
}

impl Neg for &OneForm {
    type Output = OneForm;
    fn neg(self) -> OneForm {
        OneForm::new(-&self.p, -&self.q)
    }
}

impl Add for &TwoForm {
    type Output = TwoForm;
    fn add(self, rhs: &TwoForm) -> TwoForm {
        TwoForm::new(&self.r + &rhs.r)
    }
}

impl Sub for &TwoForm {
    type Output = TwoForm;
    fn sub(self, rhs: &TwoForm) -> TwoForm {
        TwoForm::new(&self.r - &rhs.r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Complex;

    const N: usize = 8;

    fn c(x: f64) -> Complex {
        Complex::new(x, 0.0)
    }

    fn one_plus_zw() -> Series2 {
        Series2::from_terms(N, [(0, 0, c(1.0)), (1, 1, c(1.0))])
    }

    #[test]
    fn wedge_basics() {
        assert_eq!(wedge(&OneForm::dz(N), &OneForm::dw(N)).r, Series2::one(N));
        let u = OneForm::new(one_plus_zw(), Series2::w(N));
        assert_eq!(wedge(&u, &u).r, Series2::zero(N));
        let f = &Series2::one(N) + &Series2::w(N);
        let lhs = wedge(&OneForm::new(f.clone(), Series2::zero(N)), &OneForm::dw(N));
        assert_eq!(lhs.r, f);
    }

    #[test]
    fn exterior_derivative() {
        assert_eq!(exterior_d(&OneForm::dz(N)).r, Series2::zero(N));
        let u = OneForm::new(one_plus_zw(), Series2::zero(N));
        assert_eq!(exterior_d(&u).r, -Series2::z(N));
        let h = Series2::from_terms(N, [(3, 2, c(1.5)), (0, 4, c(-2.0)), (1, 1, c(1.0))]);
        assert_eq!(exterior_d(&grad(&h)).r, Series2::zero(N));
        assert_eq!(exterior_d(&u).valid_order(), N - 1);
    }

    #[test]
    fn gradients() {
        let g = grad(&(&Series2::z(N) + &Series2::w(N)));
        assert_eq!(g.p, Series2::one(N));
        assert_eq!(g.q, Series2::one(N));
        let g = grad(&(&Series2::z(N) * &Series2::w(N)));
        assert_eq!(g.p, Series2::w(N));
        assert_eq!(g.q, Series2::z(N));
    }

    #[test]
    fn two_form_ratio() {
        let f = one_plus_zw();
        let omega = TwoForm::new(Series2::one(N));
        assert_eq!(ratio2(&TwoForm::new(f.clone()), &omega).unwrap(), f);
        assert_eq!(
            ratio2(&TwoForm::new(Series2::zero(N)), &TwoForm::new(f.clone())).unwrap(),
            Series2::zero(N)
        );
        let big = TwoForm::new(f.clone());
        assert!(ratio2(&big, &big).unwrap().approx_eq(&Series2::one(N), 1e-15));
        assert!(matches!(
            ratio2(&big, &TwoForm::new(Series2::z(N))),
            Err(Error::NotAUnit { .. })
        ));
    }

    #[test]
    fn scaling() {
        let u = OneForm::new(one_plus_zw(), Series2::w(N));
        assert_eq!(scale_form(&Series2::one(N), &u), u);
        let zdw = scale_form(&Series2::z(N), &OneForm::dw(N));
        assert_eq!(zdw.p, Series2::zero(N));
        assert_eq!(zdw.q, Series2::z(N));
        let s = one_plus_zw();
        let t = &Series2::one(N) - &Series2::w(N);
        assert_eq!(scale_form(&s, &scale_form(&t, &u)), scale_form(&(&s * &t), &u));
    }

    #[test]
    fn symmetric_products() {
        let dz = OneForm::dz(N);
        let dw = OneForm::dw(N);
        let third = -&(&dz + &dw);
        let eta = sym3_product(&dz, &dw, &third);
        let expected = [0.0, -1.0, -1.0, 0.0];
        for (ck, e) in eta.c.iter().zip(expected) {
            assert_eq!(*ck, Series2::constant(N, c(e)));
        }
        assert_eq!(discriminant(&eta), Series2::one(N));

        // (1+zw)dz · dw · (−(1+zw)dz − dw), expanded by hand.
        let f = one_plus_zw();
        let u = dz.scale(&f);
        let x = -&(&u + &dw);
        let eta = sym3_product(&u, &dw, &x);
        assert_eq!(eta.c[0], Series2::zero(N));
        assert!(eta.c[1].approx_eq(&-(&f * &f), 1e-15));
        assert!(eta.c[2].approx_eq(&-&f, 1e-15));
        assert_eq!(eta.c[3], Series2::zero(N));

        let permuted = sym3_product(&x, &u, &dw);
        for k in 0..4 {
            assert!(permuted.c[k].approx_eq(&eta.c[k], 1e-15));
        }
    }

    #[test]
    fn discriminant_detects_repeated_lines() {
        let u = OneForm::new(one_plus_zw(), Series2::w(N));
        let v = OneForm::new(Series2::z(N), &Series2::one(N) + &Series2::z(N));
        assert!(discriminant(&sym3_product(&u, &u, &v)).norm() < 1e-13);
    }

    #[test]
    fn discriminant_matches_product_of_root_differences() {
        // For c3 (s - r1)(s - r2)(s - r3): disc = c3^4 prod (ri - rj)^2.
        let roots = [c(0.3), Complex::new(-1.0, 0.5), Complex::new(0.2, -2.0)];
        let lead = Complex::new(1.5, -0.25);
        let e1 = roots[0] + roots[1] + roots[2];
        let e2 = roots[0] * roots[1] + roots[0] * roots[2] + roots[1] * roots[2];
        let e3 = roots[0] * roots[1] * roots[2];
        let k = |x: Complex| Series2::constant(2, x);
        let eta = Sym3Diff::new(k(-lead * e3), k(lead * e2), k(-lead * e1), k(lead));
        let mut expected = lead.powi(4);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            expected *= (roots[i] - roots[j]).powi(2);
        }
        assert!((discriminant(&eta).constant_term() - expected).norm() < 1e-12 * expected.norm());
    }

    #[test]
    fn pullbacks() {
        let eta = Sym3Diff::new(Series2::one(N), Series2::zero(N), Series2::zero(N), Series2::zero(N));
        let same = pullback_sym3(&eta, &Series2::z(N), &Series2::w(N)).unwrap();
        assert_eq!(same, eta);
        let scaled = pullback_sym3(&eta, &Series2::z(N).scale_real(2.0), &Series2::w(N)).unwrap();
        assert_eq!(scaled.c[0], Series2::constant(N, c(8.0)));
        assert_eq!(scaled.c[1], Series2::zero(N));
        assert_eq!(
            pullback_sym3(&eta, &Series2::z(N), &Series2::z(N)).unwrap_err(),
            Error::SingularJacobian
        );
    }

    #[test]
    fn pullback_round_trip() {
        let z = Series2::z(N);
        let w = Series2::w(N);
        let u = &(&z + &(&w * &w).scale_real(0.5)) + &(&z * &w);
        let v = &(&w - &z.scale_real(0.25)) + &(&z * &z);
        let eta = Sym3Diff::new(
            one_plus_zw(),
            Series2::w(N),
            &Series2::one(N) - &z,
            Series2::constant(N, c(2.0)),
        );
        let (p, q) = invert_map(&u, &v).unwrap();
        let there = pullback_sym3(&eta, &u, &v).unwrap();
        let back = pullback_sym3(&there, &p, &q).unwrap();
        for k in 0..4 {
            assert!(back.c[k].approx_eq(&eta.c[k], 1e-12));
        }
    }
}
