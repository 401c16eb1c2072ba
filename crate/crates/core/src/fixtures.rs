//! Hand-checked instances used as golden references.

use crate::series::{Complex, Series2};

fn c(re: f64) -> Complex {
    Complex::new(re, 0.0)
}

/// Closed, Blaschke-curved: `Z = W = 1`, `H = z + w + z²w/2 − zw²/2`.
/// Returns `(Z, W, H)`.
pub fn fixture_c_parts(n: usize) -> (Series2, Series2, Series2) {
    let h = Series2::from_terms(n, [(1, 0, c(1.0)), (0, 1, c(1.0)), (2, 1, c(0.5)), (1, 2, c(-0.5))]);
    (Series2::one(n), Series2::one(n), h)
}

/// `a = 1 + zw − w²/2`, `b = 1 + z²/2 − zw`; closed with `ξ = z − w`.
pub fn fixture_c(n: usize) -> (Series2, Series2) {
    let a = Series2::from_terms(n, [(0, 0, c(1.0)), (1, 1, c(1.0)), (0, 2, c(-0.5))]);
    let b = Series2::from_terms(n, [(0, 0, c(1.0)), (2, 0, c(0.5)), (1, 1, c(-1.0))]);
    (a, b)
}

/// `f = 1 + zw`, `g = 1`: `a = −(1+zw)²`, `b = −(1+zw)`; not closed.
pub fn fixture_w(n: usize) -> (Series2, Series2) {
    let f = Series2::from_terms(n, [(0, 0, c(1.0)), (1, 1, c(1.0))]);
    (-(&f * &f), -f)
}

/// `a = b = −1`: the flat hexagonal web, closed with `H = −z − w`.
pub fn fixture_k(n: usize) -> (Series2, Series2) {
    let m = Series2::constant(n, c(-1.0));
    (m.clone(), m)
}
