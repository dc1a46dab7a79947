//! Independent re-checking of verdicts.

use num_traits::Zero;

use super::lift::collision_residual;
use super::sign_route::{classify, total_left, Shape};
use super::{det, det_view, interval_lp, pattern_problems, sign_route, Caps, Certificate, Problem, SingularWitness, Status, Verdict};
use crate::classes::{Link, MatrixClass};

/// Relative tolerance for the floating-point lift.
pub const LIFT_TOLERANCE: f64 = 1e-9;

/// Exact check of a singular witness, plus the numeric check of its lift.
pub fn verify_witness(problem: &Problem, w: &SingularWitness) -> bool {
    let Ok(chain) = problem.class.chain() else {
        return false;
    };
    let n = problem.subspace.ambient_dim();
    if w.z.len() != n || w.z.iter().all(Zero::is_zero) || !problem.subspace.contains(&w.z) {
        return false;
    }
    let offset = usize::from(problem.left.is_some());
    if w.factors.len() != chain.len() + offset {
        return false;
    }
    if let Some(a) = &problem.left {
        if &w.factors[0] != a {
            return false;
        }
    }
    if !chain.iter().zip(&w.factors[offset..]).all(|(l, f)| l.contains(f)) {
        return false;
    }
    let mut product = w.factors[0].clone();
    for f in &w.factors[1..] {
        match product.checked_mul(f) {
            Ok(p) => product = p,
            Err(_) => return false,
        }
    }
    if product != w.bhat || !w.bhat.mul_vec(&w.z).iter().all(Zero::is_zero) {
        return false;
    }
    match &w.lift {
        None => true,
        Some(l) => {
            let Some(Link::Class(MatrixClass::Scaled(b))) = chain.last() else {
                return false;
            };
            let Ok(left) = total_left(problem, &chain) else {
                return false;
            };
            let positive = l.x.iter().chain(&l.y).chain(&l.kappa).all(|t| t.is_finite() && *t > 0.0);
            let zf: alloc::vec::Vec<f64> = w.z.iter().map(|v| num_traits::ToPrimitive::to_f64(v).unwrap_or(f64::NAN)).collect();
            let scale = zf.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            let diff_ok = l
                .x
                .iter()
                .zip(&l.y)
                .zip(&zf)
                .all(|((x, y), z)| ((x - y) - z).abs() <= LIFT_TOLERANCE * scale);
            positive
                && diff_ok
                && collision_residual(left.as_ref(), b, &l.kappa, &l.x, &l.y) <= LIFT_TOLERANCE
        }
    }
}

fn verification_caps() -> Caps {
    Caps {
        sign_dim: usize::MAX,
        vertices: u128::MAX,
        monomials: u128::MAX,
        patterns: u128::MAX,
    }
}

/// Re-derives the certificate of `verdict` from `problem`. Inconclusive
/// verdicts and verdicts without certificates never verify.
pub fn verify_certificate(verdict: &Verdict, problem: &Problem) -> bool {
    if problem.validate().is_err() {
        return false;
    }
    match (verdict.status, &verdict.certificate) {
        (Status::NotInjective, Some(Certificate::Singular(w))) => verify_witness(problem, w),
        (Status::Injective, Some(c)) => verify_injective(c, problem),
        _ => false,
    }
}

fn verify_injective(cert: &Certificate, problem: &Problem) -> bool {
    let caps = verification_caps();
    match cert {
        Certificate::Positivity(table) => {
            let Ok(view) = det_view(problem) else {
                return false;
            };
            match det::analyse(&view, &caps) {
                Ok(a) => &a.table == table && table.sign().is_nonvanishing(),
                Err(_) => false,
            }
        }
        Certificate::SignSearch(s) => {
            if problem.subspace.dim() == 0 {
                return true;
            }
            let outcome = match classify(problem) {
                Ok(Shape::Chain) => sign_route::run(problem, &caps),
                Ok(Shape::Interval) => interval_lp::run(problem, &caps),
                _ => return false,
            };
            matches!(outcome, Ok(o) if o.witness.is_none()
                && o.subspace_sign_vectors == s.subspace_sign_vectors
                && o.candidates_checked == s.candidates_checked)
        }
        Certificate::PatternUnion(certs) => {
            let Ok(patterns) = pattern_problems(problem, &caps) else {
                return false;
            };
            patterns.len() == certs.len() && patterns.iter().zip(certs).all(|(p, c)| verify_injective(c, p))
        }
        Certificate::Singular(_) => false,
    }
}
