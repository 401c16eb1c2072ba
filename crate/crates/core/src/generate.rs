//! Seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exterior::Sym3Diff;
use crate::series::{Complex, Series2, ONE, ZERO};

const MAX_ATTEMPTS: usize = 100;

/// A closed instance together with its decomposition `a = ZW H_z`, `b = ZW H_w`.
#[derive(Debug, Clone)]
pub struct ClosedSample {
    pub a: Series2,
    pub b: Series2,
    pub z_factor: Series2,
    pub w_factor: Series2,
    pub h: Series2,
}

fn uniform(rng: &mut ChaCha8Rng, magnitude: f64) -> Complex {
    Complex::new(
        rng.gen_range(-magnitude..=magnitude),
        rng.gen_range(-magnitude..=magnitude),
    )
}

/// `(A − B)(0,0)` for `a = ZW H_z`, `b = ZW H_w`; only `H` contributes.
fn blaschke_of_potential(h: &Series2) -> Result<Complex> {
    let h = h.resize(3);
    let big_a = h.dz().log_unit()?.dz().dw();
    let big_b = h.dw().log_unit()?.dz().dw();
    Ok(big_a.constant_term() - big_b.constant_term())
}

pub fn gen_closed_sample(seed: u64, order: usize, degree_bound: usize) -> Result<ClosedSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let degree = degree_bound.max(3);
    let z_factor = Series2::from_fn(order, |i, j| match (i, j) {
        (0, 0) => ONE,
        (i, 0) if i <= degree => uniform(&mut rng, 0.5),
        _ => ZERO,
    });
    let w_factor = Series2::from_fn(order, |i, j| match (i, j) {
        (0, 0) => ONE,
        (0, j) if j <= degree => uniform(&mut rng, 0.5),
        _ => ZERO,
    });
    let mut h = Series2::from_fn(order, |i, j| match i + j {
        1 => ONE,
        d if (2..=degree).contains(&d) => uniform(&mut rng, 0.5),
        _ => ZERO,
    });
    let mut attempts = 0;
    while blaschke_of_potential(&h)?.norm() <= 0.1 {
        attempts += 1;
        if attempts >= MAX_ATTEMPTS {
            return Err(Error::GenerationFailed { attempts });
        }
        let cubic = Series2::from_terms(order, [(2, 1, uniform(&mut rng, 0.5)), (1, 2, uniform(&mut rng, 0.5))]);
        h = Series2::from_fn(order, |i, j| {
            if (i, j) == (2, 1) || (i, j) == (1, 2) {
                ZERO
            } else {
                h.coeff(i, j)
            }
        });
        h = &h + &cubic;
    }
    let zw = &z_factor * &w_factor;
    Ok(ClosedSample {
        a: &zw * &h.dz(),
        b: &zw * &h.dw(),
        z_factor,
        w_factor,
        h,
    })
}

/// Closed `(a, b)` with nonvanishing Blaschke curvature, deterministic in `seed`.
pub fn gen_closed(seed: u64, order: usize, degree_bound: usize) -> Result<(Series2, Series2)> {
    gen_closed_sample(seed, order, degree_bound).map(|s| (s.a, s.b))
}

/// Adds `magnitude · e^{iθ} z^i w^j` (total degree 2 to 4) to `a` or `b`.
pub fn gen_perturbed(seed: u64, base: (&Series2, &Series2), magnitude: f64) -> (Series2, Series2) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = base.0.max_order();
    let degree = rng.gen_range(2..=4usize.min(n.max(2)));
    let i = rng.gen_range(0..=degree);
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    let bump = Series2::monomial(n, i, degree - i, Complex::from_polar(magnitude, theta));
    if rng.gen_bool(0.5) {
        (base.0 + &bump, base.1.clone())
    } else {
        (base.0.clone(), base.1 + &bump)
    }
}

/// Random non-degenerate η with `|Δ(0,0)|` bounded away from zero.
pub fn gen_sym3(seed: u64, order: usize, degree_bound: usize) -> Result<Sym3Diff> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let c: [Series2; 4] = std::array::from_fn(|_| {
            let constant = uniform(&mut rng, 1.0);
            Series2::random(&mut rng, order, constant, degree_bound, 0.5)
        });
        let eta = Sym3Diff { c };
        let scale = eta.base_scale().max(1e-300);
        if crate::exterior::discriminant(&eta).constant_term().norm() > 1e-2 * scale.powi(4) {
            return Ok(eta);
        }
    }
    Err(Error::GenerationFailed { attempts: MAX_ATTEMPTS })
}

/// Random unit pair `(f, g)` with `|F(0) − G(0)| > 0.1`.
pub fn gen_adapted(seed: u64, order: usize, degree_bound: usize) -> Result<(Series2, Series2)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let cf = Complex::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
        let cg = Complex::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..std::f64::consts::TAU));
        let f = Series2::random(&mut rng, order, cf, degree_bound, 0.5);
        let g = Series2::random(&mut rng, order, cg, degree_bound, 0.5);
        let curvature =
            f.resize(2).log_unit()?.dz().dw().constant_term() - g.resize(2).log_unit()?.dz().dw().constant_term();
        if curvature.norm() > 0.1 {
            return Ok((f, g));
        }
    }
    Err(Error::GenerationFailed { attempts: MAX_ATTEMPTS })
}

/// Random biholomorphic germ `(z, w) ↦ (z(z,w), w(z,w))` fixing the origin,
/// with linear part near the identity.
pub fn gen_coordinate_change(seed: u64, order: usize, degree_bound: usize) -> (Series2, Series2) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut component = |lead: (usize, usize)| {
        Series2::from_fn(order, |i, j| {
            let d = i + j;
            if d == 0 || d > degree_bound {
                ZERO
            } else if (i, j) == lead {
                ONE + uniform(&mut rng, 0.2)
            } else if d == 1 {
                uniform(&mut rng, 0.2)
            } else {
                uniform(&mut rng, 0.3)
            }
        })
    };
    let z_of = component((1, 0));
    let w_of = component((0, 1));
    (z_of, w_of)
}
