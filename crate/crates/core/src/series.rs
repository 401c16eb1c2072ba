//! Truncated bivariate power series in `(z, w)` with complex coefficients.
//!
//! A [`Series2`] stores every coefficient of total degree `<= max_order` and
//! tracks a `valid_order`: the largest total degree whose coefficients are
//! still exact after the operations that produced the value. Derivatives lose
//! one degree, binary operations keep the smaller of their inputs.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Modulus at or below which a constant term is treated as zero.
pub const UNIT_TOLERANCE: f64 = 1e-12;

pub(crate) const ZERO: Complex = Complex::new(0.0, 0.0);
pub(crate) const ONE: Complex = Complex::new(1.0, 0.0);

#[inline]
fn index(i: usize, j: usize) -> usize {
    let d = i + j;
    d * (d + 1) / 2 + j
}

#[inline]
fn storage_len(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

/// Iterates `(i, j)` with `i + j <= order`, grouped by total degree.
fn exponents(order: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=order).flat_map(|d| (0..=d).map(move |j| (d - j, j)))
}

/// Coordinate direction for partial derivatives and antiderivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Z,
    W,
}

/// A point of `C^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub z: Complex,
    pub w: Complex,
}

impl Point {
    pub fn new(z: Complex, w: Complex) -> Self {
        Point { z, w }
    }

    pub fn origin() -> Self {
        Point { z: ZERO, w: ZERO }
    }
}

#[derive(Debug, Clone)]
pub struct Series2 {
    max_order: usize,
    valid_order: usize,
    coeffs: Vec<Complex>,
}

impl Series2 {
    pub fn zero(max_order: usize) -> Self {
        Series2 {
            max_order,
            valid_order: max_order,
            coeffs: vec![ZERO; storage_len(max_order)],
        }
    }

    pub fn constant(max_order: usize, c: Complex) -> Self {
        let mut s = Self::zero(max_order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(max_order: usize) -> Self {
        Self::constant(max_order, ONE)
    }

    /// `c * z^i * w^j`, or zero when the monomial lies above the truncation.
    pub fn monomial(max_order: usize, i: usize, j: usize, c: Complex) -> Self {
        let mut s = Self::zero(max_order);
        if i + j <= max_order {
            s.coeffs[index(i, j)] = c;
        }
        s
    }

    /// The coordinate function `z`.
    pub fn z(max_order: usize) -> Self {
        Self::monomial(max_order, 1, 0, ONE)
    }

    /// The coordinate function `w`.
    pub fn w(max_order: usize) -> Self {
        Self::monomial(max_order, 0, 1, ONE)
    }

    pub fn from_fn(max_order: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut s = Self::zero(max_order);
        for (i, j) in exponents(max_order) {
            s.coeffs[index(i, j)] = f(i, j);
        }
        s
    }

    /// Builds a series from `(i, j, coefficient)` triples; repeated exponents accumulate.
    pub fn from_terms(max_order: usize, terms: impl IntoIterator<Item = (usize, usize, Complex)>) -> Self {
        let mut s = Self::zero(max_order);
        for (i, j, c) in terms {
            if i + j <= max_order {
                s.coeffs[index(i, j)] += c;
            }
        }
        s
    }

    /// Random polynomial with coefficients of degree `1..=degree` drawn from the
    /// square `|re|, |im| <= magnitude`, plus the given constant term.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        max_order: usize,
        constant: Complex,
        degree: usize,
        magnitude: f64,
    ) -> Self {
        Self::from_fn(max_order, |i, j| {
            let d = i + j;
            if d == 0 {
                constant
            } else if d <= degree {
                Complex::new(
                    rng.gen_range(-magnitude..=magnitude),
                    rng.gen_range(-magnitude..=magnitude),
                )
            } else {
                ZERO
            }
        })
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn valid_order(&self) -> usize {
        self.valid_order
    }

    /// Lowers the valid order; never raises it.
    pub fn with_valid_order(mut self, v: usize) -> Self {
        self.valid_order = self.valid_order.min(v);
        self
    }

    /// Coefficient of `z^i w^j` (zero above the truncation).
    pub fn coeff(&self, i: usize, j: usize) -> Complex {
        if i + j <= self.max_order {
            self.coeffs[index(i, j)]
        } else {
            ZERO
        }
    }

    pub fn constant_term(&self) -> Complex {
        self.coeffs[0]
    }

    /// All stored `(i, j, coefficient)` triples in graded order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, Complex)> + '_ {
        exponents(self.max_order).map(move |(i, j)| (i, j, self.coeffs[index(i, j)]))
    }

    pub fn is_unit(&self) -> bool {
        self.constant_term().norm() > UNIT_TOLERANCE
    }

    fn require_unit(&self) -> Result<()> {
        if self.is_unit() {
            Ok(())
        } else {
            Err(Error::NotAUnit {
                modulus: self.constant_term().norm(),
            })
        }
    }

    /// Changes the truncation bound, dropping or zero-filling coefficients.
    pub fn resize(&self, max_order: usize) -> Self {
        let mut s = Self::from_fn(max_order, |i, j| self.coeff(i, j));
        s.valid_order = self.valid_order.min(max_order);
        s
    }

    /// Homogeneous component of total degree `d`.
    pub fn homogeneous_part(&self, d: usize) -> Self {
        let mut s = Self::zero(self.max_order);
        s.valid_order = self.valid_order;
        if d <= self.max_order {
            for j in 0..=d {
                let k = index(d - j, j);
                s.coeffs[k] = self.coeffs[k];
            }
        }
        s
    }

    fn map_coeffs(&self, f: impl Fn(Complex) -> Complex) -> Self {
        Series2 {
            max_order: self.max_order,
            valid_order: self.valid_order,
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    pub fn scale(&self, c: Complex) -> Self {
        self.map_coeffs(|x| x * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.map_coeffs(|x| x * c)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex, Complex) -> Complex) -> Self {
        let n = self.max_order.min(other.max_order);
        let mut s = Self::from_fn(n, |i, j| f(self.coeffs[index(i, j)], other.coeffs[index(i, j)]));
        s.valid_order = self.valid_order.min(other.valid_order).min(n);
        s
    }

    fn mul_series(&self, other: &Self) -> Self {
        let n = self.max_order.min(other.max_order);
        let mut out = Self::zero(n);
        for (i1, j1) in exponents(n) {
            let a = self.coeffs[index(i1, j1)];
            if a == ZERO {
                continue;
            }
            let rest = n - i1 - j1;
            for (i2, j2) in exponents(rest) {
                out.coeffs[index(i1 + i2, j1 + j2)] += a * other.coeffs[index(i2, j2)];
            }
        }
        out.valid_order = self.valid_order.min(other.valid_order).min(n);
        out
    }

    /// Multiplicative inverse of a unit series.
    pub fn invert(&self) -> Result<Self> {
        self.require_unit()?;
        let n = self.max_order;
        let inv0 = self.coeffs[0].inv();
        let mut t = Self::zero(n);
        t.coeffs[0] = inv0;
        for d in 1..=n {
            for j in 0..=d {
                let i = d - j;
                let mut acc = ZERO;
                for k in 0..=i {
                    for l in 0..=j {
                        if k + l == 0 {
                            continue;
                        }
                        acc += self.coeffs[index(k, l)] * t.coeffs[index(i - k, j - l)];
                    }
                }
                t.coeffs[index(i, j)] = -inv0 * acc;
            }
        }
        t.valid_order = self.valid_order;
        Ok(t)
    }

    /// `self / other` for a unit `other`.
    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.invert()?)
    }

    /// Solves `t_d = (1 / (d * s0)) * sum_{(a,b) != 0} weight(d, a + b) * s_ab * t_{i-a, j-b}`
    /// one total degree at a time, where `d = i + j`. This is the coefficient form
    /// of the Euler-operator identities used for `log`, `exp` and powers.
    fn euler_recurrence(
        &self,
        t0: Complex,
        lead: Complex,
        source: impl Fn(usize, usize) -> Complex,
        weight: impl Fn(usize, usize) -> f64,
    ) -> Self {
        let n = self.max_order;
        let mut t = Self::zero(n);
        t.coeffs[0] = t0;
        for d in 1..=n {
            for j in 0..=d {
                let i = d - j;
                let mut acc = source(i, j);
                for a in 0..=i {
                    for b in 0..=j {
                        let k = a + b;
                        if k == 0 || k == d && weight(d, k) == 0.0 {
                            continue;
                        }
                        acc += self.coeffs[index(a, b)] * t.coeffs[index(i - a, j - b)] * weight(d, k);
                    }
                }
                t.coeffs[index(i, j)] = acc / (lead * d as f64);
            }
        }
        t.valid_order = self.valid_order;
        t
    }

    /// Principal logarithm of a unit series.
    pub fn log_unit(&self) -> Result<Self> {
        self.require_unit()?;
        let s0 = self.coeffs[0];
        // s * E(L) = E(s), E = z d/dz + w d/dw.
        Ok(self.euler_recurrence(
            s0.ln(),
            s0,
            |i, j| self.coeffs[index(i, j)] * (i + j) as f64,
            |d, k| if k == d { 0.0 } else { -((d - k) as f64) },
        ))
    }

    pub fn exp_series(&self) -> Self {
        let s0 = self.coeffs[0];
        // E(t) = t * E(s)
        self.euler_recurrence(s0.exp(), ONE, |_, _| ZERO, |_, k| k as f64)
    }

    /// Principal cube root: `t^3 = self` with `t(0,0)` the principal root of `self(0,0)`.
    pub fn cube_root_unit(&self) -> Result<Self> {
        self.require_unit()?;
        let s0 = self.coeffs[0];
        let alpha = 1.0 / 3.0;
        // s * E(t) = alpha * t * E(s)
        Ok(self.euler_recurrence(
            principal_cbrt(s0),
            s0,
            |_, _| ZERO,
            |d, k| alpha * k as f64 - (d - k) as f64,
        ))
    }

    pub fn partial(&self, dir: Direction) -> Self {
        let n = self.max_order;
        let mut out = Self::from_fn(n, |i, j| match dir {
            Direction::Z if i + j < n => self.coeffs[index(i + 1, j)] * (i + 1) as f64,
            Direction::W if i + j < n => self.coeffs[index(i, j + 1)] * (j + 1) as f64,
            _ => ZERO,
        });
        out.valid_order = self.valid_order.saturating_sub(1);
        out
    }

    pub fn dz(&self) -> Self {
        self.partial(Direction::Z)
    }

    pub fn dw(&self) -> Self {
        self.partial(Direction::W)
    }

    /// Term-by-term antiderivative with zero constant of integration.
    pub fn antiderivative(&self, dir: Direction) -> Self {
        let n = self.max_order;
        let mut out = Self::from_fn(n, |i, j| match dir {
            Direction::Z if i > 0 => self.coeffs[index(i - 1, j)] / i as f64,
            Direction::W if j > 0 => self.coeffs[index(i, j - 1)] / j as f64,
            _ => ZERO,
        });
        out.valid_order = (self.valid_order + 1).min(n);
        out
    }

    /// Evaluates the truncated polynomial at `p`.
    pub fn eval(&self, p: Point) -> Complex {
        let n = self.max_order;
        let mut acc = ZERO;
        let mut zi = ONE;
        for i in 0..=n {
            let mut wj = ONE;
            for j in 0..=n - i {
                acc += self.coeffs[index(i, j)] * zi * wj;
                wj *= p.w;
            }
            zi *= p.z;
        }
        acc
    }

    /// `self(u(z,w), v(z,w))`; both substitutions must vanish at the origin.
    pub fn compose(&self, u: &Series2, v: &Series2) -> Result<Self> {
        if u.constant_term().norm() > UNIT_TOLERANCE || v.constant_term().norm() > UNIT_TOLERANCE {
            return Err(Error::NonzeroConstantTerm);
        }
        let n = self.max_order.min(u.max_order).min(v.max_order);
        let mut u = u.resize(n);
        let mut v = v.resize(n);
        u.coeffs[0] = ZERO;
        v.coeffs[0] = ZERO;

        let mut vpow = Vec::with_capacity(n + 1);
        vpow.push(Self::one(n));
        for j in 1..=n {
            vpow.push(&vpow[j - 1] * &v);
        }
        // Horner in u over inner polynomials in v.
        let mut acc = Self::zero(n);
        for i in (0..=n).rev() {
            let mut inner = Self::zero(n);
            for (j, vj) in vpow.iter().enumerate().take(n - i + 1) {
                let c = self.coeff(i, j);
                if c != ZERO {
                    for (x, y) in inner.coeffs.iter_mut().zip(vj.coeffs.iter()) {
                        *x += c * y;
                    }
                }
            }
            acc = &(&acc * &u) + &inner;
        }
        acc.valid_order = self.valid_order.min(u.valid_order).min(v.valid_order).min(n);
        Ok(acc)
    }

    /// Maximum coefficient modulus over total degrees `<= up_to`.
    pub fn max_abs_coeff(&self, up_to: usize) -> Result<f64> {
        if up_to > self.valid_order {
            return Err(Error::OrderExceedsValid {
                requested: up_to,
                valid: self.valid_order,
            });
        }
        Ok(self.max_abs_through(up_to))
    }

    fn max_abs_through(&self, up_to: usize) -> f64 {
        exponents(up_to.min(self.max_order))
            .map(|(i, j)| self.coeffs[index(i, j)].norm())
            .fold(0.0, f64::max)
    }

    /// Maximum coefficient modulus over the trustworthy degrees.
    pub fn norm(&self) -> f64 {
        self.max_abs_through(self.valid_order)
    }

    /// Lowest total degree `<= valid_order` carrying a coefficient above `tol`.
    pub fn first_degree_above(&self, tol: f64) -> Option<usize> {
        (0..=self.valid_order).find(|&d| (0..=d).any(|j| self.coeffs[index(d - j, j)].norm() > tol))
    }

    /// Coefficientwise comparison through the smaller valid order.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self - other).norm() <= tol
    }

    /// True when every stored coefficient with `i > 0` is zero.
    pub fn is_function_of_w(&self) -> bool {
        self.terms().all(|(i, _, c)| i == 0 || c == ZERO)
    }

    pub fn is_function_of_z(&self) -> bool {
        self.terms().all(|(_, j, c)| j == 0 || c == ZERO)
    }

    /// Renders as an expression accepted by [`crate::parse::parse_expression`].
    pub fn to_expression(&self) -> String {
        let parts: Vec<String> = self
            .terms()
            .filter(|&(_, _, c)| c != ZERO)
            .map(|(i, j, c)| {
                let mut s = format!("({})", format_complex(c));
                for (var, e) in [("z", i), ("w", j)] {
                    match e {
                        0 => {}
                        1 => s.push_str(&format!("*{var}")),
                        _ => s.push_str(&format!("*{var}^{e}")),
                    }
                }
                s
            })
            .collect();
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

/// Inverse of the map `(z, w) -> (u, v)`: returns `(p, q)` with
/// `u(p, q) = z` and `v(p, q) = w`, corrected one total degree at a time.
pub fn invert_map(u: &Series2, v: &Series2) -> Result<(Series2, Series2)> {
    if u.constant_term().norm() > UNIT_TOLERANCE || v.constant_term().norm() > UNIT_TOLERANCE {
        return Err(Error::NonzeroConstantTerm);
    }
    let n = u.max_order.min(v.max_order);
    let (a, b, c, d) = (u.coeff(1, 0), u.coeff(0, 1), v.coeff(1, 0), v.coeff(0, 1));
    let det = a * d - b * c;
    let scale = a.norm().max(b.norm()).max(c.norm()).max(d.norm());
    if det.norm() <= UNIT_TOLERANCE * scale.max(1.0).powi(2) {
        return Err(Error::SingularJacobian);
    }
    let inv = [d / det, -b / det, -c / det, a / det];
    let apply_inverse = |ru: &Series2, rv: &Series2| -> (Series2, Series2) {
        (
            &ru.scale(inv[0]) + &rv.scale(inv[1]),
            &ru.scale(inv[2]) + &rv.scale(inv[3]),
        )
    };
    let zs = Series2::z(n);
    let ws = Series2::w(n);
    let (mut p, mut q) = apply_inverse(&zs, &ws);
    for deg in 2..=n {
        let ru = &u.compose(&p, &q)? - &zs;
        let rv = &v.compose(&p, &q)? - &ws;
        let (dp, dq) = apply_inverse(&ru.homogeneous_part(deg), &rv.homogeneous_part(deg));
        p = &p - &dp;
        q = &q - &dq;
    }
    let valid = u.valid_order.min(v.valid_order).min(n);
    p.valid_order = valid;
    q.valid_order = valid;
    Ok((p, q))
}

/// Principal cube root of a complex number.
pub fn principal_cbrt(c: Complex) -> Complex {
    if c == ZERO {
        ZERO
    } else {
        Complex::from_polar(c.norm().cbrt(), c.arg() / 3.0)
    }
}

/// `re+imi` with 17 significant digits in each part.
pub fn format_complex(c: Complex) -> String {
    let sign = if c.im.is_sign_negative() { '-' } else { '+' };
    format!("{:.16e}{}{:.16e}i", c.re, sign, c.im.abs())
}

impl PartialEq for Series2 {
    /// Exact coefficient equality through the smaller valid order.
    fn eq(&self, other: &Self) -> bool {
        let v = self.valid_order.min(other.valid_order);
        exponents(v).all(|(i, j)| self.coeff(i, j) == other.coeff(i, j))
    }
}

impl fmt::Display for Series2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + O({})", self.to_expression(), self.valid_order + 1)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Series2> for &Series2 {
            type Output = Series2;
            fn $method(self, rhs: &Series2) -> Series2 {
                $body(self, rhs)
            }
        }
        impl $trait<Series2> for Series2 {
            type Output = Series2;
            fn $method(self, rhs: Series2) -> Series2 {
                $body(&self, &rhs)
            }
        }
        impl $trait<&Series2> for Series2 {
            type Output = Series2;
            fn $method(self, rhs: &Series2) -> Series2 {
                $body(&self, rhs)
            }
        }
        impl $trait<Series2> for &Series2 {
            type Output = Series2;
            fn $method(self, rhs: Series2) -> Series2 {
                $body(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &Series2, b: &Series2| a.zip_with(b, |x, y| x + y));
forward_binop!(Sub, sub, |a: &Series2, b: &Series2| a.zip_with(b, |x, y| x - y));
forward_binop!(Mul, mul, |a: &Series2, b: &Series2| a.mul_series(b));

impl Mul<Complex> for &Series2 {
    type Output = Series2;
    fn mul(self, rhs: Complex) -> Series2 {
        self.scale(rhs)
    }
}

impl Mul<f64> for &Series2 {
    type Output = Series2;
    fn mul(self, rhs: f64) -> Series2 {
        self.scale_real(rhs)
    }
}

impl Neg for &Series2 {
    type Output = Series2;
    fn neg(self) -> Series2 {
        self.map_coeffs(|x| -x)
    }
}

impl Neg for Series2 {
    type Output = Series2;
    fn neg(self) -> Series2 {
        -&self
    }
}

impl AddAssign<&Series2> for Series2 {
    fn add_assign(&mut self, rhs: &Series2) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Series2> for Series2 {
    fn sub_assign(&mut self, rhs: &Series2) {
        *self = &*self - rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const N: usize = 8;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn poly(terms: &[(usize, usize, f64)]) -> Series2 {
        Series2::from_terms(N, terms.iter().map(|&(i, j, x)| (i, j, c(x, 0.0))))
    }

    #[test]
    fn add_and_negate() {
        let s = poly(&[(0, 0, 1.0), (1, 0, 1.0)]);
        let t = poly(&[(0, 0, 1.0), (0, 1, 1.0)]);
        assert_eq!(&s + &t, poly(&[(0, 0, 2.0), (1, 0, 1.0), (0, 1, 1.0)]));
        assert_eq!(&s + &(-&s), Series2::zero(N));
    }

    #[test]
    fn valid_order_min_rule() {
        let s = Series2::one(N).with_valid_order(5);
        let t = Series2::z(N).with_valid_order(3);
        assert_eq!((&s + &t).valid_order(), 3);
        assert_eq!((&s * &t).valid_order(), 3);
        assert_eq!((-&s).valid_order(), 5);
        assert_eq!(s.scale(c(2.0, 1.0)).valid_order(), 5);
    }

    #[test]
    fn products() {
        let s = poly(&[(0, 0, 1.0), (1, 0, 1.0)]);
        let t = poly(&[(0, 0, 1.0), (0, 1, 1.0)]);
        assert_eq!(&s * &t, poly(&[(0, 0, 1.0), (1, 0, 1.0), (0, 1, 1.0), (1, 1, 1.0)]));
        // (1 - z) * (1 + z + ... + z^N) = 1 - z^{N+1}, truncated to 1.
        let geo = Series2::from_fn(N, |_, j| if j == 0 { ONE } else { ZERO });
        let one_minus_z = poly(&[(0, 0, 1.0), (1, 0, -1.0)]);
        assert_eq!(&one_minus_z * &geo, Series2::one(N));
    }

    #[test]
    fn inverses() {
        let geo = Series2::from_fn(N, |_, j| if j == 0 { ONE } else { ZERO });
        assert_eq!(poly(&[(0, 0, 1.0), (1, 0, -1.0)]).invert().unwrap(), geo);
        assert_eq!(
            Series2::constant(N, c(2.0, 0.0)).invert().unwrap(),
            Series2::constant(N, c(0.5, 0.0))
        );
        let expected = Series2::from_fn(N, |i, j| {
            if i == j {
                c(if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
            } else {
                ZERO
            }
        });
        assert!(poly(&[(0, 0, 1.0), (1, 1, 1.0)])
            .invert()
            .unwrap()
            .approx_eq(&expected, 1e-15));
        assert!(matches!(Series2::z(N).invert(), Err(Error::NotAUnit { .. })));
    }

    #[test]
    fn logarithm_and_exponential() {
        let mercator = Series2::from_fn(N, |i, j| {
            if j == 0 && i > 0 {
                c(if i % 2 == 1 { 1.0 } else { -1.0 } / i as f64, 0.0)
            } else {
                ZERO
            }
        });
        let log = poly(&[(0, 0, 1.0), (1, 0, 1.0)]).log_unit().unwrap();
        assert!(log.approx_eq(&mercator, 1e-15));

        let minus_one = Series2::constant(N, c(-1.0, 0.0)).log_unit().unwrap();
        assert!((minus_one.constant_term() - c(0.0, std::f64::consts::PI)).norm() < 1e-15);

        assert_eq!(Series2::zero(N).exp_series(), Series2::one(N));
        let mut fact = 1.0;
        let exp_z = Series2::z(N).exp_series();
        for k in 0..=N {
            if k > 0 {
                fact *= k as f64;
            }
            assert!((exp_z.coeff(k, 0) - c(1.0 / fact, 0.0)).norm() < 1e-15);
        }
        let zw = &Series2::z(N) + &Series2::w(N);
        assert!(zw.exp_series().log_unit().unwrap().approx_eq(&zw, 1e-13));
    }

    #[test]
    fn cube_roots() {
        let cube = poly(&[(0, 0, 1.0), (1, 0, 3.0), (2, 0, 3.0), (3, 0, 1.0)]);
        assert!(cube
            .cube_root_unit()
            .unwrap()
            .approx_eq(&poly(&[(0, 0, 1.0), (1, 0, 1.0)]), 1e-14));
        let eight = Series2::constant(N, c(8.0, 0.0)).cube_root_unit().unwrap();
        assert!((eight.constant_term() - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn derivatives() {
        let s = poly(&[(2, 1, 1.0)]);
        let ds = s.dz();
        assert_eq!(ds, poly(&[(1, 1, 2.0)]));
        assert_eq!(ds.valid_order(), N - 1);
        assert_eq!(Series2::constant(N, c(3.0, 0.0)).dz(), Series2::zero(N));
        assert_eq!(Series2::zero(N).with_valid_order(0).dz().valid_order(), 0);

        let t = poly(&[(0, 0, 1.0), (0, 1, 1.0)]);
        let it = t.antiderivative(Direction::Z);
        assert_eq!(it, poly(&[(1, 0, 1.0), (1, 1, 1.0)]));
        assert_eq!(Series2::zero(N).antiderivative(Direction::Z), Series2::zero(N));
        assert_eq!(
            Series2::zero(N)
                .with_valid_order(4)
                .antiderivative(Direction::W)
                .valid_order(),
            5
        );
    }

    #[test]
    fn evaluation() {
        assert_eq!(poly(&[(0, 0, 1.0), (1, 1, 1.0)]).eval(Point::origin()), ONE);
        let s = poly(&[(1, 0, 1.0), (0, 1, -1.0)]);
        assert_eq!(s.eval(Point::new(c(2.0, 0.0), c(3.0, 0.0))), c(-1.0, 0.0));
    }

    #[test]
    fn composition() {
        let z = Series2::z(N);
        let w = Series2::w(N);
        let s = &z + &w;
        assert_eq!(s.compose(&w, &z).unwrap(), s);
        let zz = &z * &z;
        assert_eq!(zz.compose(&s, &(&w * &w)).unwrap(), &s * &s);
        let r = poly(&[(0, 0, 2.0), (3, 1, -1.5), (0, 2, 0.25)]);
        assert_eq!(r.compose(&z, &w).unwrap(), r);
        assert_eq!(r.compose(&Series2::one(N), &w).unwrap_err(), Error::NonzeroConstantTerm);
    }

    #[test]
    fn map_inversion() {
        let z = Series2::z(N);
        let w = Series2::w(N);
        let (p, q) = invert_map(&z.scale_real(2.0), &w.scale_real(3.0)).unwrap();
        assert!(p.approx_eq(&z.scale_real(0.5), 1e-15));
        assert!(q.approx_eq(&w.scale_real(1.0 / 3.0), 1e-15));
        let (p, q) = invert_map(&(&z + &w), &w).unwrap();
        assert!(p.approx_eq(&(&z - &w), 1e-15));
        assert!(q.approx_eq(&w, 1e-15));
        assert_eq!(invert_map(&z, &z).unwrap_err(), Error::SingularJacobian);
    }

    #[test]
    fn max_abs() {
        assert_eq!(Series2::zero(N).max_abs_coeff(3).unwrap(), 0.0);
        let s = Series2::from_terms(N, [(1, 0, c(3.0, 0.0)), (0, 2, c(0.0, -4.0))]);
        assert_eq!(s.max_abs_coeff(2).unwrap(), 4.0);
        assert_eq!(s.max_abs_coeff(0).unwrap(), 0.0);
        assert!(matches!(
            s.clone().with_valid_order(1).max_abs_coeff(2),
            Err(Error::OrderExceedsValid { requested: 2, valid: 1 })
        ));
    }

    #[test]
    fn complex_formatting() {
        assert_eq!(
            format_complex(c(1.0, -2.5)),
            "1.0000000000000000e0-2.5000000000000000e0i"
        );
        assert_eq!(Series2::zero(3).to_expression(), "0");
    }
}
