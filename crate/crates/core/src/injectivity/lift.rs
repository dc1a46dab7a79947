//! Turning a kernel vector of a scaled class into two distinct positive
//! points with equal monomial images.
//!
//! For `v` and `w` with equal signs, `x_i = w_i e^{v_i}/(e^{v_i} − 1)` and
//! `y_i = w_i/(e^{v_i} − 1)` (both `1` when `v_i = 0`) satisfy `x − y = w` and
//! `ln x − ln y = v`.

use alloc::vec::Vec;

use num_traits::{ToPrimitive, Zero};

use super::sign_route::total_left;
use super::{Problem, SingularWitness};
use crate::classes::{scaling_of, Link, MatrixClass};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{Matrix, Rational};
use crate::signs::sigma;

/// Positive points `x ≠ y` and rate constants `κ` with
/// `A·(κ ∗ x^B) = A·(κ ∗ y^B)` up to floating-point error.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialLift {
    pub kappa: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// `‖(x − y) − z‖∞ / ‖z‖∞`.
    pub difference_residual: f64,
    /// `‖A(κ∗x^B − κ∗y^B)‖∞ / ‖A‖·‖κ∗x^B‖∞`, or the unprojected version without `A`.
    pub collision_residual: f64,
}

fn to_f64(v: &[Rational]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}

fn pair_point(v: f64, w: f64) -> (f64, f64) {
    if v == 0.0 {
        return (1.0, 1.0);
    }
    let d = libm::expm1(v);
    (w * libm::exp(v) / d, w / d)
}

fn lift_points(v: &[f64], w: &[f64]) -> (Vec<f64>, Vec<f64>) {
    v.iter().zip(w).map(|(&a, &b)| pair_point(a, b)).unzip()
}

/// `x^B` row by row, as `exp(Σ_j B_ij ln x_j)`.
pub(crate) fn monomials(b: &Matrix, x: &[f64]) -> Vec<f64> {
    let logs: Vec<f64> = x.iter().map(|&t| libm::log(t)).collect();
    (0..b.rows())
        .map(|i| {
            let s: f64 = b.row(i).iter().zip(&logs).map(|(c, l)| c.to_f64().unwrap_or(f64::NAN) * l).sum();
            libm::exp(s)
        })
        .collect()
}

/// Positive `x`, `y` with `x − y = w` and `x^B = y^B`, from `v ∈ ker B` with `σ(v) = σ(w)`.
pub fn lift_monomial_witness(b: &Matrix, v: &[Rational], w: &[Rational]) -> Result<(Vec<f64>, Vec<f64>)> {
    check_dim("lift exponent columns", b.cols(), v.len())?;
    check_dim("lift difference length", v.len(), w.len())?;
    if !b.mul_vec(v).iter().all(Zero::is_zero) {
        return Err(Error::InvalidInput("v is not in ker B".into()));
    }
    if sigma(v) != sigma(w) {
        return Err(Error::InvalidInput("v and w have different sign vectors".into()));
    }
    Ok(lift_points(&to_f64(v), &to_f64(w)))
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, &b| a.max(b.abs()))
}

/// Lift of a singular member `M = diag(κ̂)·B·diag(λ̂)` with `A·M·z = 0`.
///
/// Uses `w = z` and `v = λ̂ ∗ z`, then picks `κ` so that
/// `κ ∗ (x^B − y^B) = κ̂ ∗ (Bv)`, which `A` annihilates.
pub fn lift_composed(left: Option<&Matrix>, b: &Matrix, m: &Matrix, z: &[Rational]) -> Option<MonomialLift> {
    let (kappa_hat, lambda_hat) = scaling_of(b, m)?;
    if z.len() != b.cols() {
        return None;
    }
    let v: Vec<Rational> = lambda_hat.iter().zip(z).map(|(l, zi)| l * zi).collect();
    let bv = b.mul_vec(&v);
    let (x, y) = lift_points(&to_f64(&v), &to_f64(z));
    let yb = monomials(b, &y);
    let kappa: Vec<f64> = (0..b.rows())
        .map(|i| {
            if bv[i].is_zero() {
                1.0
            } else {
                let t = bv[i].to_f64().unwrap_or(f64::NAN);
                kappa_hat[i].to_f64().unwrap_or(f64::NAN) * t / (yb[i] * libm::expm1(t))
            }
        })
        .collect();
    let zf = to_f64(z);
    let diff: Vec<f64> = x.iter().zip(&y).zip(&zf).map(|((a, b), c)| (a - b) - c).collect();
    let difference_residual = inf_norm(&diff) / inf_norm(&zf);
    let collision_residual = collision_residual(left, b, &kappa, &x, &y);
    let finite = x.iter().chain(&y).chain(&kappa).all(|t| t.is_finite() && *t > 0.0);
    finite.then_some(MonomialLift {
        kappa,
        x,
        y,
        difference_residual,
        collision_residual,
    })
}

pub(crate) fn collision_residual(left: Option<&Matrix>, b: &Matrix, kappa: &[f64], x: &[f64], y: &[f64]) -> f64 {
    let gx: Vec<f64> = monomials(b, x).iter().zip(kappa).map(|(m, k)| m * k).collect();
    let gy: Vec<f64> = monomials(b, y).iter().zip(kappa).map(|(m, k)| m * k).collect();
    let d: Vec<f64> = gx.iter().zip(&gy).map(|(a, b)| a - b).collect();
    match left {
        None => inf_norm(&d) / inf_norm(&gx).max(f64::MIN_POSITIVE),
        Some(a) => {
            let af = a.to_f64();
            let c = a.cols();
            let mut num: f64 = 0.0;
            let mut den: f64 = 0.0;
            for i in 0..a.rows() {
                let row = &af[i * c..(i + 1) * c];
                let s: f64 = row.iter().zip(&d).map(|(p, q)| p * q).sum();
                let scale: f64 = row.iter().zip(&gx).map(|(p, q)| (p * q).abs()).sum();
                num = num.max(s.abs());
                den = den.max(scale);
            }
            num / den.max(f64::MIN_POSITIVE)
        }
    }
}

/// A lift when the class is a single scaled factor, with or without a
/// fixed left matrix (the problem's and any leading fixed factors).
pub(crate) fn lift_for_problem(problem: &Problem, w: &SingularWitness) -> Option<MonomialLift> {
    let chain = problem.class.chain().ok()?;
    let Some(Link::Class(MatrixClass::Scaled(b))) = chain.last() else {
        return None;
    };
    if chain[..chain.len() - 1].iter().any(|l| matches!(l, Link::Class(_))) {
        return None;
    }
    let left = total_left(problem, &chain).ok()?;
    lift_composed(left.as_ref(), b, w.factors.last()?, &w.z)
}
