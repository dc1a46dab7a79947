//! One exact feasibility problem per orthant of `S` for interval classes.
//!
//! With `σ(z) = τ` fixed, `{Dz : D ∈ 𝓘}` is a box in each coordinate whose
//! ends are linear in `z`, so `Dz ∈ ker A` (or `Dz = 0`) is a homogeneous
//! system in `(z, y)`. Punctured entries contribute one system per piece.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use super::sign_route::{leading_fixed_factors, total_left, Outcome};
use super::{assemble_witness, subspace_sign_vectors, Caps, Problem};
use crate::classes::{Grid, IntervalEntry, Link, MatrixClass};
use crate::error::{Error, Result};
use crate::linalg::{int, Matrix, Rational};
use crate::lp::{Cone, Rel};
use crate::signs::{Sign, SignVector};

pub(crate) fn run(problem: &Problem, caps: &Caps) -> Result<Outcome> {
    let chain = problem.class.chain()?;
    let Some(Link::Class(MatrixClass::Interval(d))) = chain.last() else {
        return Err(Error::Unsupported("interval search needs an interval factor".into()));
    };
    let left = total_left(problem, &chain)?;
    let s_signs = subspace_sign_vectors(&problem.subspace, caps.sign_dim)?;
    let mut checked = 0usize;
    for tau in &s_signs {
        let split: Vec<(usize, usize)> = (0..d.rows())
            .flat_map(|i| (0..d.cols()).map(move |j| (i, j)))
            .filter(|&(i, j)| tau.0[j] != Sign::Zero && d.get(i, j).is_punctured())
            .collect();
        if split.len() >= 128 || (1u128 << split.len()) > caps.patterns {
            return Err(Error::CapExceeded {
                what: "punctured piece choices",
                count: if split.len() >= 128 { u128::MAX } else { 1u128 << split.len() },
                cap: caps.patterns,
            });
        }
        for choice in 0u128..(1u128 << split.len()) {
            let mut pieces = d.clone();
            for (k, &(i, j)) in split.iter().enumerate() {
                let p = d.get(i, j).pieces()[((choice >> k) & 1) as usize].clone();
                pieces.set(i, j, p);
            }
            checked += 1;
            if let Some((z, y)) = solve_orthant(problem, left.as_ref(), &pieces, tau) {
                let dhat = realize(&pieces, d, &z, &y);
                let mut factors = leading_fixed_factors(&chain);
                factors.push(dhat);
                let witness = assemble_witness(problem, factors, z)?;
                return Ok(Outcome {
                    subspace_sign_vectors: s_signs.len(),
                    candidates_checked: checked,
                    witness: Some(witness),
                });
            }
        }
    }
    Ok(Outcome {
        subspace_sign_vectors: s_signs.len(),
        candidates_checked: checked,
        witness: None,
    })
}

/// Bounds of `Σ_j d_j z_j` over the row: `(coefficients, open)` per side,
/// `None` when unbounded.
type Bound = Option<(Vec<Rational>, bool)>;

fn row_bounds(row: &[IntervalEntry], tau: &SignVector) -> (Bound, Bound) {
    let n = row.len();
    let mut lo = Some((vec![Rational::zero(); n], false));
    let mut hi = Some((vec![Rational::zero(); n], false));
    for (j, e) in row.iter().enumerate() {
        let (low_end, high_end) = match tau.0[j] {
            Sign::Zero => continue,
            Sign::Pos => ((e.lower(), e.lower_open()), (e.upper(), e.upper_open())),
            Sign::Neg => ((e.upper(), e.upper_open()), (e.lower(), e.lower_open())),
        };
        for (bound, (end, open)) in [(&mut lo, low_end), (&mut hi, high_end)] {
            match (bound.as_mut(), end) {
                (Some(b), Some(v)) => {
                    b.0[j] = v.clone();
                    b.1 |= open;
                }
                _ => *bound = None,
            }
        }
    }
    (lo, hi)
}

fn solve_orthant(
    problem: &Problem,
    left: Option<&Matrix>,
    d: &Grid<IntervalEntry>,
    tau: &SignVector,
) -> Option<(Vec<Rational>, Vec<Rational>)> {
    let n = d.cols();
    let r = d.rows();
    let ny = if left.is_some() { r } else { 0 };
    let mut vars: Vec<Option<Sign>> = tau.0.iter().map(|&s| Some(s)).collect();
    vars.extend(core::iter::repeat_n(None, ny));
    let mut cone = Cone::new(vars);
    let zk = problem.subspace.kernel_rep();
    for i in 0..zk.rows() {
        let mut row = zk.row(i).to_vec();
        row.resize(n + ny, Rational::zero());
        cone.push(row, Rel::Eq);
    }
    if let Some(a) = left {
        for k in 0..a.rows() {
            let mut row = vec![Rational::zero(); n];
            row.extend(a.row(k).iter().cloned());
            cone.push(row, Rel::Eq);
        }
    }
    for i in 0..r {
        let (lo, hi) = row_bounds(d.row(i), tau);
        // y_i - L(z) ⋈ 0 and U(z) - y_i ⋈ 0
        if let Some((c, open)) = lo {
            let mut row: Vec<Rational> = c.into_iter().map(|v| -v).collect();
            row.resize(n + ny, Rational::zero());
            if ny > 0 {
                row[n + i] = int(1);
            }
            cone.push(row, if open { Rel::Gt } else { Rel::Ge });
        }
        if let Some((c, open)) = hi {
            let mut row = c;
            row.resize(n + ny, Rational::zero());
            if ny > 0 {
                row[n + i] = int(-1);
            }
            cone.push(row, if open { Rel::Gt } else { Rel::Ge });
        }
    }
    let sol = cone.solve()?;
    let z = sol[..n].to_vec();
    let y = if ny > 0 { sol[n..].to_vec() } else { vec![Rational::zero(); r] };
    Some((z, y))
}

/// A member of `d` (respecting the chosen `pieces`) with `D̂z = y`.
fn realize(pieces: &Grid<IntervalEntry>, d: &Grid<IntervalEntry>, z: &[Rational], y: &[Rational]) -> Matrix {
    let (r, n) = (d.rows(), d.cols());
    let mut out = Matrix::zeros(r, n);
    for i in 0..r {
        let support: Vec<usize> = (0..n).filter(|&j| !z[j].is_zero()).collect();
        for j in 0..n {
            if z[j].is_zero() {
                out[(i, j)] = d.get(i, j).interior_point();
            }
        }
        // Contribution c_j = d_ij z_j ranges over an interval; start at the
        // centre and move toward y_i in proportion to the remaining room.
        let centre: Vec<Rational> = support
            .iter()
            .map(|&j| pieces.get(i, j).interior_point() * &z[j])
            .collect();
        let delta: Rational = &y[i] - centre.iter().sum::<Rational>();
        let up = delta.is_positive();
        let room: Vec<Option<Rational>> = support
            .iter()
            .zip(&centre)
            .map(|(&j, c)| {
                let e = pieces.get(i, j);
                let toward_larger_d = up == z[j].is_positive();
                let end = if toward_larger_d { e.upper() } else { e.lower() };
                end.map(|v| (v * &z[j] - c).abs())
            })
            .collect();
        let mut contrib = centre.clone();
        if !delta.is_zero() {
            if let Some(k) = room.iter().position(|r| r.is_none()) {
                contrib[k] += &delta;
            } else {
                let total: Rational = room.iter().map(|r| r.clone().unwrap_or_default()).sum();
                let frac = delta.abs() / total;
                for (c, rm) in contrib.iter_mut().zip(&room) {
                    let step = rm.clone().unwrap_or_default() * &frac;
                    if up {
                        *c += step;
                    } else {
                        *c -= step;
                    }
                }
            }
        }
        for (k, &j) in support.iter().enumerate() {
            out[(i, j)] = &contrib[k] / &z[j];
        }
    }
    out
}
