//! Series kernel laws, shared by the property tests and the acceptance run.
//! Each law drives a proptest runner over random truncated series.

#![allow(dead_code)]

use closed_sym3::{invert_map, parse_expression, Complex, Direction, Series2};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub type Law = fn(&mut TestRunner) -> Result<(), String>;

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn complex(magnitude: f64) -> impl Strategy<Value = Complex> {
    (-magnitude..=magnitude, -magnitude..=magnitude).prop_map(|(re, im)| Complex::new(re, im))
}

fn coeffs(order: usize, magnitude: f64) -> impl Strategy<Value = Vec<Complex>> {
    prop::collection::vec(complex(magnitude), (order + 1) * (order + 2) / 2)
}

fn build(order: usize, constant: Option<Complex>, c: Vec<Complex>) -> Series2 {
    let mut k = 0;
    Series2::from_fn(order, |i, j| {
        let x = c[k];
        k += 1;
        match constant {
            Some(c0) if i + j == 0 => c0,
            _ => x,
        }
    })
}

/// Any series at truncation order 2..=8.
pub fn series_at(order: usize) -> impl Strategy<Value = Series2> {
    coeffs(order, 1.0).prop_map(move |c| build(order, None, c))
}

/// Unit series: constant term of modulus in [0.5, 2].
pub fn unit_at(order: usize) -> impl Strategy<Value = Series2> {
    (0.5..2.0f64, 0.0..std::f64::consts::TAU, coeffs(order, 0.5))
        .prop_map(move |(r, t, c)| build(order, Some(Complex::from_polar(r, t)), c))
}

/// Series vanishing at the origin.
pub fn germ_at(order: usize) -> impl Strategy<Value = Series2> {
    coeffs(order, 0.5).prop_map(move |c| build(order, Some(Complex::new(0.0, 0.0)), c))
}

fn order() -> impl Strategy<Value = usize> {
    2usize..=8
}

fn close(x: &Series2, y: &Series2, scale: f64) -> Result<(), TestCaseError> {
    let diff = (x - y).norm();
    let bound = 1e-10 * scale.max(1.0);
    prop_assert!(diff <= bound, "differ by {diff:e} (bound {bound:e})\n  {x}\n  {y}");
    Ok(())
}

fn run<S: Strategy>(
    runner: &mut TestRunner,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

pub fn additive_group(r: &mut TestRunner) -> Result<(), String> {
    let s = order().prop_flat_map(|n| (series_at(n), series_at(n), series_at(n)));
    run(r, s, |(a, b, c)| {
        prop_assert_eq!(&a + &b, &b + &a);
        close(&(&(&a + &b) + &c), &(&a + &(&b + &c)), 1.0)?;
        let same = a.clone();
        prop_assert_eq!(&a - &same, Series2::zero(a.max_order()));
        prop_assert_eq!(&a + &Series2::zero(a.max_order()), a.clone());
        prop_assert_eq!(-&(-&a), a);
        Ok(())
    })
}

pub fn multiplicative_monoid(r: &mut TestRunner) -> Result<(), String> {
    let s = order().prop_flat_map(|n| (series_at(n), series_at(n), series_at(n)));
    run(r, s, |(a, b, c)| {
        let n = a.max_order() as f64;
        close(&(&a * &b), &(&b * &a), n * n)?;
        close(&(&(&a * &b) * &c), &(&a * &(&b * &c)), n.powi(4))?;
        prop_assert_eq!(&a * &Series2::one(a.max_order()), a);
        Ok(())
    })
}

pub fn distributive(r: &mut TestRunner) -> Result<(), String> {
    let s = order().prop_flat_map(|n| (series_at(n), series_at(n), series_at(n)));
    run(r, s, |(a, b, c)| {
        let n = a.max_order() as f64;
        close(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c)), n * n)
    })
}

pub fn inverse_pair(r: &mut TestRunner) -> Result<(), String> {
    let s = order().prop_flat_map(|n| (unit_at(n), series_at(n)));
    run(r, s, |(u, x)| {
        let n = u.max_order();
        let inv = u.invert().map_err(|e| TestCaseError::fail(e.to_string()))?;
        let growth = inv.norm() * u.norm() * (n * n) as f64;
        close(&(&u * &inv), &Series2::one(n), growth)?;
        let back = inv.invert().map_err(|e| TestCaseError::fail(e.to_string()))?;
        close(&back, &u, growth * growth)?;
        let q = x.div(&u).map_err(|e| TestCaseError::fail(e.to_string()))?;
        close(&(&q * &u), &x, growth * x.norm())
    })
}

pub fn log_exp_round_trip(r: &mut TestRunner) -> Result<(), String> {
    let s = order().prop_flat_map(|n| (unit_at(n), germ_at(n), complex(1.0)));
    run(r, s, |(u, g, c0)| {
        let n = u.max_order();
        let log = u.log_unit().map_err(|e| TestCaseError::fail(e.to_string()))?;
        let scale = log.norm().exp().powi(2) * (n * n) as f64;
        close(&log.exp_series(), &u, scale)?;
        // constant term within the principal strip, so log recovers it
        let s = &g + &Series2::constant(n, c0);
        let e = s.exp_series();
        let back = e.log_unit().map_err(|e| TestCaseError::fail(e.to_string()))?;
        close(&back, &s, e.norm() * e.invert().unwrap().norm() * (n * n) as f64)?;
        // log of a product is the sum of logs, up to the constant branch
        let sum = &log + &back;
        let prod = (&u * &e).log_unit().map_err(|e| TestCaseError::fail(e.to_string()))?;
        close(&prod.dz(), &sum.dz(), scale * e.norm())
    })
}

pub fn cube_root(r: &mut TestRunner) -> Result<(), String> {
    let s = order().prop_flat_map(unit_at);
    run(r, s, |u| {
        let n = u.max_order();
        let t = u.cube_root_unit().map_err(|e| TestCaseError::fail(e.to_string()))?;
        let t0 = t.constant_term();
        prop_assert!(t0.arg() > -std::f64::consts::PI / 3.0 - 1e-12 && t0.arg() <= std::f64::consts::PI / 3.0 + 1e-12);
        close(&(&(&t * &t) * &t), &u, t.norm().powi(3) * (n * n) as f64)
    })
}

pub fn calculus(r: &mut TestRunner) -> Result<(), String> {
    let s = order().prop_flat_map(|n| (series_at(n), series_at(n)));
    run(r, s, |(a, b)| {
        let n = a.max_order();
        for dir in [Direction::Z, Direction::W] {
            // the top degree of the antiderivative is truncated away
            let back = a.antiderivative(dir).partial(dir);
            close(&back.resize(n - 1), &a.resize(n - 1), 1.0)?;
            let leibniz = &(&a.partial(dir) * &b) + &(&a * &b.partial(dir));
            close(&(&a * &b).partial(dir), &leibniz, (n * n * n) as f64)?;
        }
        close(&a.dz().dw(), &a.dw().dz(), 1.0)
    })
}

pub fn composition(r: &mut TestRunner) -> Result<(), String> {
    let s = order().prop_flat_map(|n| (series_at(n), germ_at(n), germ_at(n), complex(0.3), complex(0.3)));
    run(r, s, |(a, u, v, e1, e2)| {
        let n = a.max_order();
        let one = Complex::new(1.0, 0.0);
        // linear parts near the identity keep the map invertible
        let u = Series2::from_fn(n, |i, j| match (i, j) {
            (1, 0) => one + e1,
            (0, 1) => e2,
            _ => u.coeff(i, j),
        });
        let v = Series2::from_fn(n, |i, j| match (i, j) {
            (1, 0) => e2,
            (0, 1) => one - e1,
            _ => v.coeff(i, j),
        });
        let (p, q) = invert_map(&u, &v).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let scale = 10f64.powi(n as i32);
        close(&u.compose(&p, &q).unwrap(), &Series2::z(n), scale)?;
        close(&v.compose(&p, &q).unwrap(), &Series2::w(n), scale)?;
        close(&p.compose(&u, &v).unwrap(), &Series2::z(n), scale)?;
        // a(u, v)(p, q) = a
        let round = a.compose(&u, &v).unwrap().compose(&p, &q).unwrap();
        close(&round, &a, scale * a.norm())?;
        // composition is a ring homomorphism
        let lhs = (&a * &a).compose(&u, &v).unwrap();
        let ac = a.compose(&u, &v).unwrap();
        close(&lhs, &(&ac * &ac), scale)
    })
}

pub fn expression_round_trip(r: &mut TestRunner) -> Result<(), String> {
    let s = order().prop_flat_map(series_at);
    run(r, s, |a| {
        let text = a.to_expression();
        let back = parse_expression(&text, a.max_order()).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(back.to_expression(), text);
        prop_assert_eq!(back, a);
        Ok(())
    })
}

pub fn valid_order_bookkeeping(r: &mut TestRunner) -> Result<(), String> {
    let s = (3usize..=8).prop_flat_map(|n| (unit_at(n), unit_at(n), 1usize..n, 1usize..n, 1usize..n));
    run(r, s, |(a, b, va, vb, m)| {
        let n = a.max_order();
        let a = a.with_valid_order(va);
        let b = b.with_valid_order(vb);
        let low = va.min(vb);
        prop_assert_eq!((&a * &b).valid_order(), low);
        prop_assert_eq!((&a + &b).valid_order(), low);
        prop_assert_eq!(a.dz().valid_order(), va - 1);
        prop_assert_eq!(a.antiderivative(Direction::W).valid_order(), (va + 1).min(n));
        prop_assert_eq!(a.invert().unwrap().valid_order(), va);
        prop_assert_eq!(a.log_unit().unwrap().valid_order(), va);
        prop_assert_eq!(a.resize(m).valid_order(), va.min(m));
        prop_assert_eq!(a.clone().with_valid_order(n).valid_order(), va);
        prop_assert!(a.max_abs_coeff(va + 1).is_err());
        prop_assert!(a.max_abs_coeff(va).is_ok());
        Ok(())
    })
}

pub const LAWS: [(&str, Law); 10] = [
    ("additive group", additive_group),
    ("multiplicative monoid", multiplicative_monoid),
    ("distributivity", distributive),
    ("inverse pairs", inverse_pair),
    ("log/exp round trip", log_exp_round_trip),
    ("cube root", cube_root),
    ("derivatives", calculus),
    ("composition and map inversion", composition),
    ("expression round trip", expression_round_trip),
    ("valid-order bookkeeping", valid_order_bookkeeping),
];
