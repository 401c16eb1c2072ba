//! The two closedness criteria, the identities linking them, an independent
//! integration oracle, and the combined verdict.

use std::collections::HashMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{exterior_d, grad, wedge, OneForm, Sym3Diff, TwoForm};
use crate::series::{Complex, Direction, Series2, ZERO};
use crate::web::{adapt_coordinates, web_frame, AdaptedChart, AdaptedWebData, WebFrame};

/// `|dγ(0,0)|` (or `|(A − B)(0,0)|`) at or below this counts as Blaschke-flat.
pub const BLASCHKE_TOLERANCE: f64 = 1e-8;

/// Default residual tolerance, relative to the input scale.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Default truncation order.
pub const DEFAULT_ORDER: usize = 12;

/// A residual `Σ t_k` kept together with its terms, so that it can be judged
/// against the size of what cancels at each degree.
#[derive(Debug, Clone)]
pub struct Residual {
    pub value: Series2,
    pub terms: Vec<Series2>,
}

/// Size of a residual, raw and relative to its terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualSize {
    /// Largest coefficient modulus through the valid order.
    pub max_abs: f64,
    /// Largest `|r_d| / max(floor, |t_d|)` over degrees `d` and terms `t`.
    pub scaled: f64,
    /// Lowest degree where the scaled size exceeds the tolerance.
    pub first_nonzero_degree: Option<usize>,
    pub valid_order: usize,
}

impl Residual {
    fn new(terms: Vec<Series2>) -> Self {
        let n = terms[0].max_order();
        let mut value = Series2::zero(n);
        for t in &terms {
            value += t;
        }
        Residual { value, terms }
    }

    pub fn size(&self, floor: f64, tol: f64) -> ResidualSize {
        let valid = self.value.valid_order();
        let mut scaled = 0.0_f64;
        let mut first = None;
        for d in 0..=valid {
            let r = self.value.homogeneous_part(d).norm();
            let m = self
                .terms
                .iter()
                .map(|t| t.homogeneous_part(d).norm())
                .fold(floor, f64::max);
            let q = r / m;
            if q > tol && first.is_none() {
                first = Some(d);
            }
            scaled = scaled.max(q);
        }
        ResidualSize {
            max_abs: self.value.norm(),
            scaled,
            first_nonzero_degree: first,
            valid_order: valid,
        }
    }
}

impl ResidualSize {
    fn combine(sizes: &[ResidualSize]) -> ResidualSize {
        ResidualSize {
            max_abs: sizes.iter().map(|s| s.max_abs).fold(0.0, f64::max),
            scaled: sizes.iter().map(|s| s.scaled).fold(0.0, f64::max),
            first_nonzero_degree: sizes.iter().filter_map(|s| s.first_nonzero_degree).min(),
            valid_order: sizes.iter().map(|s| s.valid_order).min().unwrap_or(0),
        }
    }
}

/// Data of the coordinate criterion for `η = (a dz + b dw) dz dw`.
#[derive(Debug, Clone)]
pub struct Thm1Data {
    pub a: Series2,
    pub b: Series2,
    /// `∂_z∂_w log a`
    pub big_a: Series2,
    /// `∂_z∂_w log b`
    pub big_b: Series2,
    /// `a((b/a)B)_z − b((a/b)A)_w`, the numerator of `ξ`.
    pub numerator: Series2,
    pub xi: Series2,
    /// `(ξ/a)_z − A`
    pub r1: Series2,
    /// `(ξ/b)_w − B`
    pub r2: Series2,
    /// `(A − B)² r1` and `(A − B)² r2`, assembled without dividing by `A − B`.
    ///
    /// When the web is closed the numerator of `ξ` vanishes wherever `A − B`
    /// does, and the series quotient amplifies rounding by the inverse distance
    /// to that zero at every degree. The cleared forms vanish exactly when
    /// `r1`, `r2` do and stay at rounding level.
    pub cleared: [Residual; 2],
}

impl Thm1Data {
    pub fn valid_order(&self) -> usize {
        self.r1.valid_order().min(self.r2.valid_order())
    }

    pub fn size(&self, floor: f64, tol: f64) -> ResidualSize {
        ResidualSize::combine(&[self.cleared[0].size(floor, tol), self.cleared[1].size(floor, tol)])
    }
}

pub fn thm1_evaluate(a: &Series2, b: &Series2) -> Result<Thm1Data> {
    let big_a = a.log_unit()?.dz().dw();
    let big_b = b.log_unit()?.dz().dw();
    let diff = &big_a - &big_b;
    if diff.constant_term().norm() <= BLASCHKE_TOLERANCE {
        return Err(Error::BlaschkeFlat);
    }
    let b_over_a = b.div(a)?;
    let a_over_b = a.div(b)?;
    let numerator = &(a * &(&b_over_a * &big_b).dz()) - &(b * &(&a_over_b * &big_a).dw());
    let xi = numerator.div(&diff)?;
    let r1 = &xi.div(a)?.dz() - &big_a;
    let r2 = &xi.div(b)?.dw() - &big_b;

    let diff_sq = &diff * &diff;
    let n_a = numerator.div(a)?;
    let n_b = numerator.div(b)?;
    let cleared = [
        Residual::new(vec![&diff * &n_a.dz(), -(&n_a * &diff.dz()), -(&diff_sq * &big_a)]),
        Residual::new(vec![&diff * &n_b.dw(), -(&n_b * &diff.dw()), -(&diff_sq * &big_b)]),
    ];
    Ok(Thm1Data {
        a: a.clone(),
        b: b.clone(),
        big_a,
        big_b,
        numerator,
        xi,
        r1,
        r2,
        cleared,
    })
}

/// On-demand table of `β_ijkl` for one frame (indices are 1-based).
pub struct BetaTable<'a> {
    frame: &'a WebFrame,
    d_omega: [TwoForm; 3],
    quotients: HashMap<(usize, usize), Series2>,
    numerators: HashMap<(usize, usize, usize), Series2>,
}

impl<'a> BetaTable<'a> {
    pub fn new(frame: &'a WebFrame) -> Result<Self> {
        if frame.blaschke_at_origin().norm() <= BLASCHKE_TOLERANCE {
            return Err(Error::BlaschkeFlat);
        }
        Ok(BetaTable {
            frame,
            d_omega: std::array::from_fn(|k| exterior_d(&frame.omega[k])),
            quotients: HashMap::new(),
            numerators: HashMap::new(),
        })
    }

    /// `d(h_i ω_j) / Ω`
    fn quotient(&mut self, i: usize, j: usize) -> Result<Series2> {
        if let Some(u) = self.quotients.get(&(i, j)) {
            return Ok(u.clone());
        }
        let f = self.frame;
        let form = f.omega[j - 1].scale(&f.h[i - 1]);
        let u = exterior_d(&form).r.div(&f.big_omega.r)?;
        self.quotients.insert((i, j), u.clone());
        Ok(u)
    }

    /// `2u dω_k + du∧ω_k` with `u = d(h_i ω_j)/Ω`, before division by `dγ`.
    pub fn numerator(&mut self, i: usize, j: usize, k: usize) -> Result<Series2> {
        check_index(i)?;
        check_index(j)?;
        check_index(k)?;
        if let Some(t) = self.numerators.get(&(i, j, k)) {
            return Ok(t.clone());
        }
        let u = self.quotient(i, j)?;
        let omega_k = &self.frame.omega[k - 1];
        let two_form = &self.d_omega[k - 1].scale(&u.scale_real(2.0)) + &wedge(&grad(&u), omega_k);
        self.numerators.insert((i, j, k), two_form.r.clone());
        Ok(two_form.r)
    }

    /// The function multiplying `ω_l` in `β_ijkl`.
    pub fn coefficient(&mut self, i: usize, j: usize, k: usize) -> Result<Series2> {
        self.numerator(i, j, k)?.div(&self.frame.d_gamma.r)
    }

    pub fn beta(&mut self, i: usize, j: usize, k: usize, l: usize) -> Result<OneForm> {
        check_index(l)?;
        let t = self.coefficient(i, j, k)?;
        Ok(self.frame.omega[l - 1].scale(&t))
    }

    fn combination(&mut self, terms: &[(f64, [usize; 4])]) -> Result<OneForm> {
        let mut acc = OneForm::zero(self.frame.max_order());
        for &(weight, [i, j, k, l]) in terms {
            let beta = self.beta(i, j, k, l)?;
            acc = &acc + &beta.scale_const(Complex::new(weight, 0.0));
        }
        Ok(acc)
    }
}

fn check_index(i: usize) -> Result<()> {
    if (1..=3).contains(&i) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("frame index {i} outside 1..=3")))
    }
}

/// `β_ijkl` of a frame with nonvanishing Blaschke curvature (1-based indices).
pub fn beta_ijkl(frame: &WebFrame, i: usize, j: usize, k: usize, l: usize) -> Result<OneForm> {
    BetaTable::new(frame)?.beta(i, j, k, l)
}

/// `Σ_{i≠j} h_i ω_j`
pub fn alpha(frame: &WebFrame) -> OneForm {
    let mut acc = OneForm::zero(frame.max_order());
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                acc = &acc + &frame.omega[j].scale(&frame.h[i]);
            }
        }
    }
    acc
}

const LITERAL_BETA_S: [(f64, [usize; 4]); 4] = [
    (-1.0, [2, 1, 2, 1]),
    (-1.0, [1, 2, 1, 2]),
    (1.0, [2, 2, 1, 1]),
    (1.0, [1, 1, 2, 2]),
];

const LITERAL_BETA_A: [(f64, [usize; 4]); 8] = [
    (2.0, [1, 1, 2, 1]),
    (-2.0, [1, 2, 1, 1]),
    (1.0, [2, 1, 2, 1]),
    (-1.0, [1, 2, 1, 2]),
    (1.0, [1, 1, 2, 2]),
    (-1.0, [2, 2, 1, 1]),
    (2.0, [2, 1, 2, 2]),
    (-2.0, [2, 2, 1, 2]),
];

/// Data of the frame criterion.
#[derive(Debug, Clone)]
pub struct Thm2Data {
    /// `Σ_{i≠j} h_i ω_j`
    pub alpha: OneForm,
    /// `−β₂₁₂₁ − β₁₂₁₂ + β₂₂₁₁ + β₁₁₂₂`
    pub beta_s: OneForm,
    /// `2β₁₁₂₁ − 2β₁₂₁₁ + β₂₁₂₁ − β₁₂₁₂ + β₁₁₂₂ − β₂₂₁₁ + 2β₂₁₂₂ − 2β₂₂₁₂`
    pub beta_a: OneForm,
    /// `d(β_a − α)`, which vanishes for every frame.
    pub res_a: TwoForm,
    /// `d(β_s − γ)`, which vanishes for every frame.
    pub res_s: TwoForm,
    /// `Ξ = β₁₂₂ + 2β₂₁₂ + 2β₁₂₁ + β₂₁₁` (coefficient functions of the `β` forms).
    pub xi: Series2,
    /// `dγ²` times `d(Ξω₂) − d(2h₁ω₂ + h₂ω₁)` and `−d(Ξω₁) − d(h₁ω₂ + 2h₂ω₁)`,
    /// assembled from `Ξ dγ` without dividing by `dγ`. Both vanish exactly
    /// when the web is closed.
    pub labeled: [Residual; 2],
}

impl Thm2Data {
    pub fn valid_order(&self) -> usize {
        self.labeled[0]
            .value
            .valid_order()
            .min(self.labeled[1].value.valid_order())
    }

    pub fn size(&self, floor: f64, tol: f64) -> ResidualSize {
        ResidualSize::combine(&[self.labeled[0].size(floor, tol), self.labeled[1].size(floor, tol)])
    }
}

/// Evaluates the frame criterion.
///
/// The four- and eight-term combinations `β_s`, `β_a` reduce to `γ` and `α`
/// identically, so `res_s` and `res_a` carry no information. The decision rests
/// on the pair `labeled`, which is invariant under the swap `ω₁ ↔ ω₂` and under
/// the cube-root phase, and whose vanishing does not depend on the labeling.
pub fn thm2_evaluate(frame: &WebFrame) -> Result<Thm2Data> {
    let mut table = BetaTable::new(frame)?;
    let numerator = &(&table.numerator(1, 2, 2)? + &table.numerator(2, 1, 2)?.scale_real(2.0))
        + &(&table.numerator(1, 2, 1)?.scale_real(2.0) + &table.numerator(2, 1, 1)?);
    let dg = &frame.d_gamma.r;
    let dg_sq = dg * dg;
    let slope = grad(dg);
    let [w1, w2, _] = &frame.omega;
    let [h1, h2, _] = &frame.h;
    let rhs2 = exterior_d(&(&w2.scale(&h1.scale_real(2.0)) + &w1.scale(h2))).r;
    let rhs1 = exterior_d(&(&w2.scale(h1) + &w1.scale(&h2.scale_real(2.0)))).r;
    // dγ² d(Nω/dγ) = dγ d(Nω) − N ddγ∧ω
    let labeled = [
        Residual::new(vec![
            dg * &exterior_d(&w2.scale(&numerator)).r,
            -(&numerator * &wedge(&slope, w2).r),
            -(&dg_sq * &rhs2),
        ]),
        Residual::new(vec![
            -(dg * &exterior_d(&w1.scale(&numerator)).r),
            &numerator * &wedge(&slope, w1).r,
            -(&dg_sq * &rhs1),
        ]),
    ];

    let alpha = alpha(frame);
    let beta_s = table.combination(&LITERAL_BETA_S)?;
    let beta_a = table.combination(&LITERAL_BETA_A)?;
    Ok(Thm2Data {
        res_a: exterior_d(&(&beta_a - &alpha)),
        res_s: exterior_d(&(&beta_s - &frame.gamma)),
        alpha,
        beta_s,
        beta_a,
        xi: numerator.div(dg)?,
        labeled,
    })
}

/// Residual norms of the identities relating the two criteria in a chart
/// where `ω₁ = f dz`, `ω₂ = g dw`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossCheckReport {
    /// `A − (2F + G)`
    pub a_identity: f64,
    /// `B − (F + 2G)`
    pub b_identity: f64,
    /// `(A − B) − (F − G)`
    pub blaschke_identity: f64,
    /// `dγ − (F − G) dz∧dw`
    pub curvature_identity: f64,
    /// `a + f²g` and `b + fg²`
    pub coefficient_identity: f64,
    /// `ξ − f²g²Ξ`, multiplied through by `A − B = dγ`.
    pub xi_identity: f64,
    /// `[d(Ξω₂) − d(2h₁ω₂ + h₂ω₁)] + r1` and `[−d(Ξω₁) − d(h₁ω₂ + 2h₂ω₁)] + r2`,
    /// multiplied through by `(A − B)² = dγ²`.
    pub presymmetrized_identity: f64,
    /// Whether the pre-symmetrized equations and the coordinate residuals vanish together.
    pub vanish_together: bool,
    pub valid_order: usize,
}

impl CrossCheckReport {
    pub fn max(&self) -> f64 {
        [
            self.a_identity,
            self.b_identity,
            self.blaschke_identity,
            self.curvature_identity,
            self.coefficient_identity,
            self.xi_identity,
            self.presymmetrized_identity,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// `Ξ dγ`, built from the frame alone by the closed formula
/// `2U₁₂ dω₂ + 2U₂₁ dω₁ + dU₁₂∧ω₂ + dU₂₁∧ω₁` with
/// `U₁₂ = d(h₁ω₂ + 2h₂ω₁)/Ω`, `U₂₁ = d(2h₁ω₂ + h₂ω₁)/Ω`.
pub fn big_xi_numerator(frame: &WebFrame) -> Result<Series2> {
    let [w1, w2, _] = &frame.omega;
    let [h1, h2, _] = &frame.h;
    let first = &w2.scale(h1) + &w1.scale(&h2.scale_real(2.0));
    let second = &w2.scale(&h1.scale_real(2.0)) + &w1.scale(h2);
    let u12 = exterior_d(&first).r.div(&frame.big_omega.r)?;
    let u21 = exterior_d(&second).r.div(&frame.big_omega.r)?;
    let bracket = &(&(&exterior_d(w2).scale(&u12.scale_real(2.0)) + &exterior_d(w1).scale(&u21.scale_real(2.0)))
        + &wedge(&grad(&u12), w2))
        + &wedge(&grad(&u21), w1);
    Ok(bracket.r)
}

pub fn big_xi(frame: &WebFrame) -> Result<Series2> {
    big_xi_numerator(frame)?.div(&frame.d_gamma.r)
}

/// Identities of the adapted frame. Quotients by `A − B = dγ` are compared
/// after multiplying through, which keeps them at rounding level.
pub fn proof_crosschecks(frame: &WebFrame, adapted: &AdaptedWebData, tol: f64) -> Result<CrossCheckReport> {
    let scale = adapted.f.norm().max(adapted.g.norm()).max(1.0);
    let [w1, w2, _] = &frame.omega;
    let misfit = (&w1.p - &adapted.f)
        .norm()
        .max(w1.q.norm())
        .max((&w2.q - &adapted.g).norm())
        .max(w2.p.norm());
    if misfit > 1e-9 * scale {
        return Err(Error::NotAdapted(format!(
            "frame differs from (f dz, g dw) by {misfit:e}"
        )));
    }
    if frame.blaschke_at_origin().norm() <= BLASCHKE_TOLERANCE {
        return Err(Error::BlaschkeFlat);
    }
    let (f, g) = (&adapted.f, &adapted.g);
    let a = -(&(f * f) * g);
    let b = -(f * &(g * g));
    let thm1 = thm1_evaluate(&a, &b)?;
    let thm2 = thm2_evaluate(frame)?;
    let (big_f, big_g) = (&adapted.big_f, &adapted.big_g);

    let a_identity = (&thm1.big_a - &(&big_f.scale_real(2.0) + big_g)).norm();
    let b_identity = (&thm1.big_b - &(big_f + &big_g.scale_real(2.0))).norm();
    let blaschke_identity = (&(&thm1.big_a - &thm1.big_b) - &(big_f - big_g)).norm();
    let curvature_identity = (&frame.d_gamma.r - &(big_f - big_g)).norm();
    let coefficient_identity = (&frame_coefficient(frame, 1) - &a)
        .norm()
        .max((&frame_coefficient(frame, 2) - &b).norm());

    let fg = f * g;
    let xi_identity = (&thm1.numerator - &(&(&fg * &fg) * &big_xi_numerator(frame)?)).norm();
    let presymmetrized_identity = (&thm2.labeled[0].value + &thm1.cleared[0].value)
        .norm()
        .max((&thm2.labeled[1].value + &thm1.cleared[1].value).norm());

    let presym = thm2.size(scale, tol);
    let coordinate = thm1.size(scale, tol);
    Ok(CrossCheckReport {
        a_identity,
        b_identity,
        blaschke_identity,
        curvature_identity,
        coefficient_identity,
        xi_identity,
        presymmetrized_identity,
        vanish_together: (presym.scaled <= tol) == (coordinate.scaled <= tol),
        valid_order: presym.valid_order.min(coordinate.valid_order),
    })
}

/// `c1` or `c2` of the product of the frame forms.
fn frame_coefficient(frame: &WebFrame, k: usize) -> Series2 {
    let [w1, w2, w3] = &frame.omega;
    crate::exterior::sym3_product(w1, w2, w3).c[k].clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OracleStatus {
    ClosedDecompositionFound,
    /// The equations of total degree `<= order` admit no solution.
    Obstructed {
        order: usize,
    },
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub status: OracleStatus,
    /// Function of `z` only, `Z(0) = 1`.
    pub z_factor: Series2,
    /// Function of `w` only, `W(0) = 1`.
    pub w_factor: Series2,
    /// `H(0,0) = 0`
    pub h: Series2,
    /// `W'/W`, a function of `w`.
    pub c: Series2,
    /// `Z'/Z`, a function of `z`.
    pub d: Series2,
    /// Unmatched part of `a_w − b_z − (a c − b d)` and of the integrability
    /// condition, raw and relative to the terms of each equation.
    pub residual: ResidualSize,
    /// Total degree through which the equations were solved.
    pub checked_order: usize,
}

impl OracleResult {
    pub fn is_closed(&self) -> bool {
        self.status == OracleStatus::ClosedDecompositionFound
    }
}

struct Fit {
    solution: DVector<Complex>,
    /// `(raw, scaled)` misfit of each row.
    misfit: Vec<(f64, f64)>,
}

fn solve_least_squares(
    rows: &[(usize, usize)],
    half: usize,
    a: &Series2,
    b: &Series2,
    rhs: &Series2,
    floor: f64,
) -> Fit {
    let unknowns = 2 * half;
    let mut m = DMatrix::<Complex>::zeros(rows.len(), unknowns);
    let mut y = DVector::<Complex>::zeros(rows.len());
    for (r, &(i, j)) in rows.iter().enumerate() {
        for k in 0..=j.min(half - 1) {
            m[(r, k)] = a.coeff(i, j - k);
        }
        for k in 0..=i.min(half - 1) {
            m[(r, half + k)] = -b.coeff(i - k, j);
        }
        y[r] = rhs.coeff(i, j);
    }
    let svd = m.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let x = svd
        .solve(&y, 1e-12 * sigma_max.max(1e-300))
        .unwrap_or_else(|_| DVector::zeros(unknowns));
    let misfit = (0..rows.len())
        .map(|r| {
            let mut size = y[r].norm().max(floor);
            let mut acc = -y[r];
            for k in 0..unknowns {
                let t = m[(r, k)] * x[k];
                size = size.max(t.norm());
                acc += t;
            }
            (acc.norm(), acc.norm() / size)
        })
        .collect();
    Fit { solution: x, misfit }
}

/// Decides closedness of `(a dz + b dw) dz dw` by integration: closed iff there
/// are `c(w)`, `d(z)` with `a_w − b_z = a c − b d`; then `Z = exp ∫d`,
/// `W = exp ∫c` and `H` with `H_z = a/(ZW)`, `H_w = b/(ZW)`.
///
/// Each equation counts as satisfied when its misfit is within `tol` of the
/// largest of its terms and `max(1, |a|, |b|)`.
pub fn oracle_decompose(a: &Series2, b: &Series2, tol: f64) -> Result<OracleResult> {
    if !a.is_unit() {
        return Err(Error::NotAUnit {
            modulus: a.constant_term().norm(),
        });
    }
    if !b.is_unit() {
        return Err(Error::NotAUnit {
            modulus: b.constant_term().norm(),
        });
    }
    let n = a.max_order().min(b.max_order());
    let rhs = &a.dw() - &b.dz();
    let top = rhs.valid_order();
    let floor = a.norm().max(b.norm()).max(1.0);

    let mut rows = Vec::new();
    let mut solution = DVector::<Complex>::zeros(2);
    let mut obstruction = None;
    let mut raw = 0.0_f64;
    let mut scaled = 0.0_f64;
    for degree in 0..=top {
        rows.extend((0..=degree).map(|j| (degree - j, j)));
        let fit = solve_least_squares(&rows, degree + 1, a, b, &rhs, floor);
        solution = fit.solution;
        raw = fit.misfit.iter().map(|m| m.0).fold(0.0, f64::max);
        scaled = fit.misfit.iter().map(|m| m.1).fold(0.0, f64::max);
        if scaled > tol {
            obstruction = Some(degree);
            break;
        }
    }

    let half = solution.len() / 2;
    let c = Series2::from_terms(n, (0..half).map(|k| (0, k, solution[k]))).with_valid_order(top);
    let d = Series2::from_terms(n, (0..half).map(|k| (k, 0, solution[half + k]))).with_valid_order(top);
    let z_factor = d.antiderivative(Direction::Z).exp_series().with_valid_order(top);
    let w_factor = c.antiderivative(Direction::W).exp_series().with_valid_order(top);
    let fit_size = ResidualSize {
        max_abs: raw,
        scaled,
        first_nonzero_degree: obstruction,
        valid_order: obstruction.unwrap_or(top),
    };

    if let Some(order) = obstruction {
        return Ok(OracleResult {
            status: OracleStatus::Obstructed { order },
            z_factor,
            w_factor,
            h: Series2::zero(n).with_valid_order(top),
            c,
            d,
            residual: fit_size,
            checked_order: order,
        });
    }

    let zw_inv = (&z_factor * &w_factor).invert()?;
    let p = a * &zw_inv;
    let q = b * &zw_inv;
    let compat = Residual::new(vec![p.dw(), -q.dz()]).size(floor, tol);
    let h_z_part = p.antiderivative(Direction::Z);
    let remainder = &q - &h_z_part.dw();
    let w_only = Series2::from_fn(n, |i, j| if i == 0 { remainder.coeff(0, j) } else { ZERO });
    let h = (&h_z_part + &w_only.antiderivative(Direction::W)).with_valid_order(top);
    let status = match compat.first_nonzero_degree {
        Some(order) => OracleStatus::Obstructed { order },
        None => OracleStatus::ClosedDecompositionFound,
    };
    Ok(OracleResult {
        status,
        z_factor,
        w_factor,
        h,
        c,
        d,
        residual: ResidualSize::combine(&[fit_size, compat]),
        checked_order: top,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Closed,
    NotClosed,
    Indeterminate,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VerdictKind::Closed => "closed",
            VerdictKind::NotClosed => "not_closed",
            VerdictKind::Indeterminate => "indeterminate",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionSummary {
    pub name: &'static str,
    pub applicable: bool,
    /// The criterion's own decision, when applicable.
    pub closed: Option<bool>,
    /// Largest raw coefficient of the deciding residual.
    pub max_abs_residual: Option<f64>,
    /// Largest residual relative to the terms it balances; compared with the tolerance.
    pub scaled_residual: Option<f64>,
    pub first_nonzero_degree: Option<usize>,
    pub valid_order: Option<usize>,
}

impl CriterionSummary {
    fn not_applicable(name: &'static str) -> Self {
        CriterionSummary {
            name,
            applicable: false,
            closed: None,
            max_abs_residual: None,
            scaled_residual: None,
            first_nonzero_degree: None,
            valid_order: None,
        }
    }

    fn from_size(name: &'static str, size: ResidualSize, closed: bool) -> Self {
        CriterionSummary {
            name,
            applicable: true,
            closed: Some(closed),
            max_abs_residual: Some(size.max_abs),
            scaled_residual: Some(size.scaled),
            first_nonzero_degree: size.first_nonzero_degree,
            valid_order: Some(size.valid_order),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Preconditions {
    pub discriminant_unit: bool,
    pub blaschke_unit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub checked_order: usize,
    pub criteria: Vec<CriterionSummary>,
    pub preconditions: Preconditions,
    /// `|dγ(0,0)|` in the input chart.
    pub blaschke_at_origin: f64,
    /// Largest input coefficient modulus (at least 1).
    pub scale: f64,
}

impl Verdict {
    pub fn criterion(&self, name: &str) -> Option<&CriterionSummary> {
        self.criteria.iter().find(|c| c.name == name)
    }
}

/// Every intermediate object of a full check, for reporting.
pub struct Analysis {
    pub eta: Sym3Diff,
    pub frame: WebFrame,
    pub thm2: Option<Thm2Data>,
    pub chart: AdaptedChart,
    pub thm1: Option<Thm1Data>,
    pub oracle: Option<OracleResult>,
    pub verdict: Verdict,
}

pub const THM1: &str = "coordinate_criterion";
pub const THM2: &str = "web_criterion";
pub const ORACLE: &str = "integration_oracle";

/// The chart where `ω₁`, `ω₂` are proportional to the coordinate differentials.
/// Input already of the form `(a dz + b dw) dz dw` is kept as is.
fn adapted_chart(eta: &Sym3Diff, frame: &WebFrame) -> Result<AdaptedChart> {
    let n = eta.max_order();
    if eta.c[0].norm() == 0.0 && eta.c[3].norm() == 0.0 {
        let (z, w) = (Series2::z(n), Series2::w(n));
        return Ok(AdaptedChart {
            eta: eta.clone(),
            a: eta.c[1].clone(),
            b: eta.c[2].clone(),
            forward: (z.clone(), w.clone()),
            inverse: (z, w),
        });
    }
    adapt_coordinates(eta, frame)
}

/// Runs both criteria and the oracle on `eta` truncated at `order`.
pub fn analyze(eta: &Sym3Diff, order: usize, tol: f64) -> Result<Analysis> {
    let eta = if eta.max_order() > order {
        eta.resize(order)
    } else {
        eta.clone()
    };
    if !eta.is_nondegenerate() {
        return Err(Error::Degenerate {
            discriminant: crate::exterior::discriminant(&eta).constant_term().norm(),
        });
    }
    let scale = eta.norm().max(1.0);
    let frame = web_frame(&eta)?;
    let blaschke = frame.blaschke_at_origin().norm();
    let blaschke_unit = blaschke > BLASCHKE_TOLERANCE;

    let mut criteria = Vec::with_capacity(3);
    let thm2 = if blaschke_unit {
        Some(thm2_evaluate(&frame)?)
    } else {
        None
    };
    criteria.push(match &thm2 {
        Some(data) => {
            let size = data.size(scale, tol);
            CriterionSummary::from_size(THM2, size, size.scaled <= tol)
        }
        None => CriterionSummary::not_applicable(THM2),
    });

    let chart = adapted_chart(&eta, &frame)?;
    let thm1 = if blaschke_unit {
        match thm1_evaluate(&chart.a, &chart.b) {
            Ok(data) => Some(data),
            Err(Error::BlaschkeFlat) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    criteria.push(match &thm1 {
        Some(data) => {
            let size = data.size(scale, tol);
            CriterionSummary::from_size(THM1, size, size.scaled <= tol)
        }
        None => CriterionSummary::not_applicable(THM1),
    });

    let oracle = match oracle_decompose(&chart.a, &chart.b, tol) {
        Ok(result) => Some(result),
        Err(Error::NotAUnit { .. }) => None,
        Err(e) => return Err(e),
    };
    criteria.push(match &oracle {
        Some(result) => {
            let mut summary = CriterionSummary::from_size(ORACLE, result.residual, result.is_closed());
            summary.valid_order = Some(result.checked_order);
            summary
        }
        None => CriterionSummary::not_applicable(ORACLE),
    });

    let decisions: Vec<bool> = criteria.iter().filter_map(|c| c.closed).collect();
    let kind = match decisions.first() {
        None => VerdictKind::Indeterminate,
        Some(&first) => {
            if decisions.iter().any(|&d| d != first) {
                let detail = criteria
                    .iter()
                    .filter_map(|c| c.closed.map(|d| format!("{}={}", c.name, d)))
                    .collect::<Vec<_>>()
                    .join(", ");
                return Err(Error::InternalInconsistency(detail));
            }
            if first {
                VerdictKind::Closed
            } else {
                VerdictKind::NotClosed
            }
        }
    };
    let checked_order = criteria.iter().filter_map(|c| c.valid_order).min().unwrap_or(0);
    let verdict = Verdict {
        kind,
        checked_order,
        criteria,
        preconditions: Preconditions {
            discriminant_unit: true,
            blaschke_unit,
        },
        blaschke_at_origin: blaschke,
        scale,
    };
    Ok(Analysis {
        eta,
        frame,
        thm2,
        chart,
        thm1,
        oracle,
        verdict,
    })
}

/// Decides whether `eta` is closed through the trustworthy degrees at `order`.
pub fn is_closed(eta: &Sym3Diff, order: usize, tol: f64) -> Result<Verdict> {
    analyze(eta, order, tol).map(|a| a.verdict)
}
