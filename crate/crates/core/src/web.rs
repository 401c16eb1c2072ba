//! The 3-web of a non-degenerate symmetric 3-differential: root germs of the
//! binary cubic, the normalized frame `ω₁ + ω₂ + ω₃ = 0`, its invariants
//! `Ω, h_i, γ, dγ`, first integrals and adapted coordinates.

use std::cmp::Ordering;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exterior::{exterior_d, pullback_sym3, ratio2, sym3_product, wedge, OneForm, Sym3Diff, TwoForm};
use crate::series::{invert_map, principal_cbrt, Complex, Series2, ONE, UNIT_TOLERANCE, ZERO};

/// Which affine chart of the projective line a root germ lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chart {
    /// Root `s` of `c0 + c1 s + c2 s² + c3 s³`; the factor is `s dz − dw`.
    Slope,
    /// Root `t` of `c0 t³ + c1 t² + c2 t + c3`; the factor is `dz − t dw`.
    InverseSlope,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootGerm {
    pub chart: Chart,
    pub value: Series2,
}

impl RootGerm {
    /// The linear factor of the cubic vanishing on this root.
    pub fn factor(&self) -> OneForm {
        let n = self.value.max_order();
        let one = Series2::one(n);
        match self.chart {
            Chart::Slope => OneForm::new(self.value.clone(), -&one),
            Chart::InverseSlope => OneForm::new(one, -&self.value),
        }
    }

    /// Base-point slope `dw/dz` of the line, `None` for the `dz = 0` direction.
    pub fn base_slope(&self) -> Option<Complex> {
        let v = self.value.constant_term();
        match self.chart {
            Chart::Slope => Some(v),
            Chart::InverseSlope if v.norm() <= UNIT_TOLERANCE => None,
            Chart::InverseSlope => Some(v.inv()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootTriple {
    pub roots: [RootGerm; 3],
}

impl RootTriple {
    /// Reorders the roots: entry `k` of the result is `roots[perm[k]]`.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        RootTriple {
            roots: std::array::from_fn(|k| self.roots[perm[k]].clone()),
        }
    }
}

fn chart_coefficients<T: Clone>(c: &[T; 4], chart: Chart) -> [T; 4] {
    match chart {
        Chart::Slope => c.clone(),
        Chart::InverseSlope => [c[3].clone(), c[2].clone(), c[1].clone(), c[0].clone()],
    }
}

fn poly_eval(k: &[Complex; 4], x: Complex) -> Complex {
    ((k[3] * x + k[2]) * x + k[1]) * x + k[0]
}

fn poly_deriv(k: &[Complex; 4], x: Complex) -> Complex {
    (k[3] * x * 3.0 + k[2] * 2.0) * x + k[1]
}

fn polish(k: &[Complex; 4], mut x: Complex) -> Complex {
    for _ in 0..60 {
        let d = poly_deriv(k, x);
        if d == ZERO {
            break;
        }
        let step = poly_eval(k, x) / d;
        x -= step;
        if step.norm() <= 1e-16 * (1.0 + x.norm()) {
            break;
        }
    }
    x
}

/// Roots of the monic cubic `x³ + a x² + b x + c` in closed form.
pub fn cardano(a: Complex, b: Complex, c: Complex) -> [Complex; 3] {
    let p = b - a * a / 3.0;
    let q = a * a * a * (2.0 / 27.0) - a * b / 3.0 + c;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let plus = -q / 2.0 + disc;
    let minus = -q / 2.0 - disc;
    let big = principal_cbrt(if plus.norm() >= minus.norm() { plus } else { minus });
    let unity = Complex::from_polar(1.0, 2.0 * PI / 3.0);
    let shift = a / 3.0;
    let mut out = [ZERO; 3];
    let mut rot = ONE;
    for root in out.iter_mut() {
        let u = big * rot;
        let y = if u.norm() <= 1e-300 { ZERO } else { u - p / (u * 3.0) };
        *root = y - shift;
        rot *= unity;
    }
    out
}

/// Base-point roots as (chart, value) pairs with `|value| <= 1`.
fn base_roots(c: [Complex; 4]) -> [(Chart, Complex); 3] {
    let scale = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let eps = 1e-8 * scale;
    let settle = |chart: Chart, x: Complex| -> (Chart, Complex) {
        let (chart, x) = if x.norm() <= 1.0 {
            (chart, x)
        } else {
            let other = match chart {
                Chart::Slope => Chart::InverseSlope,
                Chart::InverseSlope => Chart::Slope,
            };
            (other, x.inv())
        };
        (chart, polish(&chart_coefficients(&c, chart), x))
    };
    let cubic_in = |chart: Chart| {
        let k = chart_coefficients(&c, chart);
        cardano(k[2] / k[3], k[1] / k[3], k[0] / k[3]).map(|x| settle(chart, x))
    };
    if c[3].norm() > eps {
        cubic_in(Chart::Slope)
    } else if c[0].norm() > eps {
        cubic_in(Chart::InverseSlope)
    } else {
        // Both dz and dw divide the cubic (approximately); the third line is c1 dz + c2 dw.
        [
            settle(Chart::Slope, ZERO),
            settle(Chart::Slope, -c[1] / c[2]),
            settle(Chart::InverseSlope, ZERO),
        ]
    }
}

fn sort_key(chart: Chart, v: Complex) -> (bool, f64, f64) {
    let slope = match chart {
        Chart::Slope => Some(v),
        Chart::InverseSlope if v.norm() <= UNIT_TOLERANCE => None,
        Chart::InverseSlope => Some(v.inv()),
    };
    match slope {
        None => (true, 0.0, f64::INFINITY),
        Some(s) => {
            let mut arg = if s.norm() <= UNIT_TOLERANCE {
                0.0
            } else {
                s.arg().rem_euclid(2.0 * PI)
            };
            if 2.0 * PI - arg < 1e-9 {
                arg = 0.0;
            }
            (false, arg, s.norm())
        }
    }
}

fn compare_keys(a: &(bool, f64, f64), b: &(bool, f64, f64)) -> Ordering {
    a.0.cmp(&b.0).then_with(|| {
        if (a.1 - b.1).abs() > 1e-9 {
            a.1.total_cmp(&b.1)
        } else {
            a.2.total_cmp(&b.2)
        }
    })
}

fn horner(k: &[Series2; 4], x: &Series2) -> Series2 {
    let mut acc = k[3].clone();
    for coeff in k[..3].iter().rev() {
        acc = &(&acc * x) + coeff;
    }
    acc
}

/// Newton (Hensel) lifting of a simple base-point root to a series root.
fn lift_root(k: &[Series2; 4], base: Complex) -> Result<Series2> {
    let n = k.iter().map(Series2::max_order).min().unwrap_or(0);
    let valid = k.iter().map(Series2::valid_order).min().unwrap_or(0);
    let dk = [k[1].clone(), k[2].scale_real(2.0), k[3].scale_real(3.0)];
    let mut x = Series2::constant(n, base);
    let mut correct = 0usize;
    while correct < n {
        let value = horner(k, &x);
        let slope = &(&(&dk[2] * &x) + &dk[1]) * &x + &dk[0];
        x = &x - &value.div(&slope)?;
        correct = 2 * correct + 1;
    }
    // One more pass settles rounding in the top degrees.
    let value = horner(k, &x);
    let slope = &(&(&dk[2] * &x) + &dk[1]) * &x + &dk[0];
    x = &x - &value.div(&slope)?;
    Ok(x.with_valid_order(valid))
}

/// Splits the cubic into three root germs, ordered by base-point slope
/// (argument, then modulus; the `dz = 0` direction last).
pub fn factor_roots(eta: &Sym3Diff) -> Result<RootTriple> {
    let base: [Complex; 4] = std::array::from_fn(|k| eta.c[k].constant_term());
    let scale = base.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if scale <= UNIT_TOLERANCE {
        return Err(Error::ZeroCubic);
    }
    if !eta.is_nondegenerate() {
        return Err(Error::Degenerate {
            discriminant: crate::exterior::discriminant(eta).constant_term().norm(),
        });
    }
    let mut found = base_roots(base);
    found.sort_by(|a, b| compare_keys(&sort_key(a.0, a.1), &sort_key(b.0, b.1)));
    let mut roots = Vec::with_capacity(3);
    for (chart, value) in found {
        let k = chart_coefficients(&eta.c, chart);
        roots.push(RootGerm {
            chart,
            value: lift_root(&k, value)?,
        });
    }
    let roots: [RootGerm; 3] = roots.try_into().expect("three roots");
    Ok(RootTriple { roots })
}

/// Normalized web frame of a non-degenerate symmetric 3-differential.
#[derive(Debug, Clone)]
pub struct WebFrame {
    pub omega: [OneForm; 3],
    pub big_omega: TwoForm,
    pub h: [Series2; 3],
    pub gamma: OneForm,
    pub d_gamma: TwoForm,
}

impl WebFrame {
    /// Derives `Ω, h_i, γ, dγ` from three forms assumed to sum to zero.
    pub fn from_forms(omega: [OneForm; 3]) -> Result<Self> {
        let big_omega = wedge(&omega[0], &omega[1]);
        if !big_omega.r.is_unit() {
            return Err(Error::Degenerate {
                discriminant: big_omega.r.constant_term().norm(),
            });
        }
        let h: [Series2; 3] = [
            ratio2(&exterior_d(&omega[0]), &big_omega)?,
            ratio2(&exterior_d(&omega[1]), &big_omega)?,
            ratio2(&exterior_d(&omega[2]), &big_omega)?,
        ];
        let gamma = &omega[0].scale(&h[1]) - &omega[1].scale(&h[0]);
        let d_gamma = exterior_d(&gamma);
        Ok(WebFrame {
            omega,
            big_omega,
            h,
            gamma,
            d_gamma,
        })
    }

    /// Same web with the forms relabelled: new `ω_k` is old `ω_{perm[k]}`.
    pub fn permuted(&self, perm: [usize; 3]) -> Result<Self> {
        WebFrame::from_forms(std::array::from_fn(|k| self.omega[perm[k]].clone()))
    }

    /// Multiplies every form by `e^{2πik/3}`.
    pub fn with_phase(&self, k: u32) -> Result<Self> {
        let zeta = Complex::from_polar(1.0, 2.0 * PI * k as f64 / 3.0);
        WebFrame::from_forms(std::array::from_fn(|i| self.omega[i].scale_const(zeta)))
    }

    pub fn max_order(&self) -> usize {
        self.omega.iter().map(OneForm::max_order).min().unwrap_or(0)
    }

    pub fn blaschke_at_origin(&self) -> Complex {
        self.d_gamma.r.constant_term()
    }

    /// Residual norms of every frame invariant against the source differential.
    pub fn invariant_residuals(&self, eta: &Sym3Diff) -> FrameResiduals {
        let [w1, w2, w3] = &self.omega;
        let sum = &(w1 + w2) + w3;
        let product = sym3_product(w1, w2, w3).sub(eta).norm();
        let omega_agreement = (&wedge(w2, w3) - &self.big_omega)
            .r
            .norm()
            .max((&wedge(w3, w1) - &self.big_omega).r.norm());
        let h_sum = (&(&self.h[0] + &self.h[1]) + &self.h[2]).norm();
        let mut structure: f64 = 0.0;
        let mut curvature: f64 = 0.0;
        for (w, h) in self.omega.iter().zip(self.h.iter()) {
            let dw = exterior_d(w);
            structure = structure.max((&dw - &self.big_omega.scale(h)).r.norm());
            curvature = curvature.max((&dw - &wedge(&self.gamma, w)).r.norm());
        }
        FrameResiduals {
            sum: sum.norm(),
            product,
            omega_agreement,
            h_sum,
            structure,
            curvature,
        }
    }
}

/// Residuals of the defining identities of a [`WebFrame`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FrameResiduals {
    /// `ω₁ + ω₂ + ω₃`
    pub sum: f64,
    /// `ω₁ω₂ω₃ − η`
    pub product: f64,
    /// `ω₂∧ω₃ − Ω` and `ω₃∧ω₁ − Ω`
    pub omega_agreement: f64,
    /// `h₁ + h₂ + h₃`
    pub h_sum: f64,
    /// `dω_i − h_i Ω`
    pub structure: f64,
    /// `dω_i − γ∧ω_i`
    pub curvature: f64,
}

impl FrameResiduals {
    pub fn max(&self) -> f64 {
        [
            self.sum,
            self.product,
            self.omega_agreement,
            self.h_sum,
            self.structure,
            self.curvature,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Builds the frame `ω₁ + ω₂ + ω₃ = 0`, `ω₁ω₂ω₃ = η` from the root germs.
pub fn normalize_web(eta: &Sym3Diff, roots: &RootTriple) -> Result<WebFrame> {
    let mut lambda: [OneForm; 3] = std::array::from_fn(|k| roots.roots[k].factor());
    for i in 0..3 {
        for j in i + 1..3 {
            if !wedge(&lambda[i], &lambda[j]).r.is_unit() {
                return Err(Error::Degenerate { discriminant: 0.0 });
            }
        }
    }
    // Match the product to η through its dominant base-point coefficient.
    let product = sym3_product(&lambda[0], &lambda[1], &lambda[2]);
    let k = (0..4)
        .max_by(|&a, &b| {
            eta.c[a]
                .constant_term()
                .norm()
                .total_cmp(&eta.c[b].constant_term().norm())
        })
        .unwrap_or(0);
    let ratio = eta.c[k].div(&product.c[k])?;
    lambda[0] = lambda[0].scale(&ratio);

    // λ₃ = x λ₁ + y λ₂ in the frame (λ₁, λ₂).
    let det = wedge(&lambda[0], &lambda[1]);
    let x = ratio2(&wedge(&lambda[2], &lambda[1]), &det)?;
    let y = ratio2(&wedge(&lambda[0], &lambda[2]), &det)?;
    let n = x.max_order();
    let coefficients = [x, y, -Series2::one(n)];
    let triple = &(&coefficients[0] * &coefficients[1]) * &coefficients[2];
    let phase = triple.invert()?.cube_root_unit()?;
    let omega: [OneForm; 3] = std::array::from_fn(|i| lambda[i].scale(&(&phase * &coefficients[i])));
    WebFrame::from_forms(omega)
}

/// Factors `eta` and builds its normalized frame.
pub fn web_frame(eta: &Sym3Diff) -> Result<WebFrame> {
    normalize_web(eta, &factor_roots(eta)?)
}

/// A function `h` with `h(0,0) = 0`, unit derivative in the dominant direction
/// and `dh ∧ u = 0`.
pub fn first_integral(u: &OneForm) -> Result<Series2> {
    let p0 = u.p.constant_term().norm();
    let q0 = u.q.constant_term().norm();
    if p0.max(q0) <= UNIT_TOLERANCE {
        return Err(Error::DegenerateForm);
    }
    if q0 >= p0 {
        // h_z = (p/q) h_w with h = w + sum_k h_k(w) z^k
        let ratio = u.p.div(&u.q)?;
        Ok(integrate_leaf_equation(&ratio, true))
    } else {
        let ratio = u.q.div(&u.p)?;
        Ok(integrate_leaf_equation(&ratio, false))
    }
}

/// Solves `∂_z h = r ∂_w h`, `h(0, w) = w` (or the mirror image with the roles of
/// `z` and `w` exchanged), one power of the transverse variable at a time.
fn integrate_leaf_equation(ratio: &Series2, w_leading: bool) -> Series2 {
    let n = ratio.max_order();
    let (lead_i, lead_j) = if w_leading { (0, 1) } else { (1, 0) };
    let mut h = Series2::monomial(n, lead_i, lead_j, ONE);
    for k in 0..n {
        let rhs = if w_leading { ratio * &h.dw() } else { ratio * &h.dz() };
        let update: Vec<(usize, usize, Complex)> = (0..n - k)
            .map(|m| {
                let c = if w_leading { rhs.coeff(k, m) } else { rhs.coeff(m, k) };
                let c = c / (k + 1) as f64;
                if w_leading {
                    (k + 1, m, c)
                } else {
                    (m, k + 1, c)
                }
            })
            .collect();
        h = Series2::from_fn(n, |i, j| {
            let transverse = if w_leading { i } else { j };
            if transverse == k + 1 {
                ZERO
            } else {
                h.coeff(i, j)
            }
        });
        h = &h + &Series2::from_terms(n, update);
    }
    h.with_valid_order(ratio.valid_order())
}

/// η rewritten in coordinates whose differentials are proportional to ω₁, ω₂.
#[derive(Debug, Clone)]
pub struct AdaptedChart {
    /// η in the new chart; `c0`, `c3` vanish to valid order.
    pub eta: Sym3Diff,
    pub a: Series2,
    pub b: Series2,
    /// New coordinates as functions of the old ones.
    pub forward: (Series2, Series2),
    /// Old coordinates as functions of the new ones.
    pub inverse: (Series2, Series2),
}

pub fn adapt_coordinates(eta: &Sym3Diff, frame: &WebFrame) -> Result<AdaptedChart> {
    let u = first_integral(&frame.omega[0])?;
    let v = first_integral(&frame.omega[1])?;
    let (p, q) = invert_map(&u, &v)?;
    let adapted = pullback_sym3(eta, &p, &q)?;
    let scale = adapted.norm().max(1.0);
    let residual = adapted.c[0].norm().max(adapted.c[3].norm());
    if residual > 1e-9 * scale {
        return Err(Error::ShapeViolation { residual });
    }
    Ok(AdaptedChart {
        a: adapted.c[1].clone(),
        b: adapted.c[2].clone(),
        eta: adapted,
        forward: (u, v),
        inverse: (p, q),
    })
}

/// Frame data in a chart where `ω₁ = f dz`, `ω₂ = g dw`.
#[derive(Debug, Clone)]
pub struct AdaptedWebData {
    pub f: Series2,
    pub g: Series2,
    /// `∂_z∂_w log f`
    pub big_f: Series2,
    /// `∂_z∂_w log g`
    pub big_g: Series2,
}

impl AdaptedWebData {
    pub fn new(f: Series2, g: Series2) -> Result<Self> {
        let big_f = f.log_unit()?.dz().dw();
        let big_g = g.log_unit()?.dz().dw();
        Ok(AdaptedWebData { f, g, big_f, big_g })
    }

    /// Recovers `f, g` from `η = (a dz + b dw) dz dw` via `a = −f²g`, `b = −fg²`.
    pub fn from_ab(a: &Series2, b: &Series2) -> Result<Self> {
        let fg = (a * b).cube_root_unit()?;
        let inv = fg.invert()?;
        AdaptedWebData::new(-(a * &inv), -(b * &inv))
    }

    /// Reads `f, g` off a frame in adapted position.
    pub fn from_frame(frame: &WebFrame) -> Result<Self> {
        let [w1, w2, _] = &frame.omega;
        let scale = w1.norm().max(w2.norm()).max(1.0);
        if w1.q.norm() > 1e-9 * scale {
            return Err(Error::NotAdapted("ω₁ has a dw component".into()));
        }
        if w2.p.norm() > 1e-9 * scale {
            return Err(Error::NotAdapted("ω₂ has a dz component".into()));
        }
        AdaptedWebData::new(w1.p.clone(), w2.q.clone())
    }

    /// The frame `(f dz, g dw, −f dz − g dw)`.
    pub fn frame(&self) -> Result<WebFrame> {
        let n = self.f.max_order();
        let w1 = OneForm::new(self.f.clone(), Series2::zero(n));
        let w2 = OneForm::new(Series2::zero(n), self.g.clone());
        let w3 = -&(&w1 + &w2);
        WebFrame::from_forms([w1, w2, w3])
    }
}
