//! Sign-vector propagation through chains of sign classes and scaled classes.
//!
//! Each such class maps an orthant onto a union of whole orthants, so the
//! reachable set after every factor is a set of sign vectors. The last factor
//! is tested against `σ(ker A) ∪ {0}` (or `{0}` without a left matrix).

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::{assemble_witness, pair_sign_feasible, subspace_sign_vectors, concordant_pair, Caps, Problem, SingularWitness};
use crate::classes::{Grid, Link, MatrixClass};
use crate::error::{Error, Result};
use crate::linalg::{int, Matrix, Rational, Subspace, strict_sign_feasible};
use crate::signs::{orthogonal_representative, sigma, Sign, SignSet, SignVector};

pub(crate) enum Shape {
    Chain,
    Interval,
    Other,
}

pub(crate) struct Outcome {
    pub subspace_sign_vectors: usize,
    pub candidates_checked: usize,
    pub witness: Option<SingularWitness>,
}

fn leading_fixed(chain: &[Link<'_>]) -> usize {
    chain.iter().take_while(|l| matches!(l, Link::Fixed(_))).count()
}

pub(crate) fn classify(problem: &Problem) -> Result<Shape> {
    let chain = problem.class.chain()?;
    let rest = &chain[leading_fixed(&chain)..];
    if rest.is_empty() {
        return Ok(Shape::Other);
    }
    if let [Link::Class(MatrixClass::Interval(_))] = rest {
        return Ok(Shape::Interval);
    }
    let sign_or_scaled = rest.iter().all(|l| {
        matches!(
            l,
            Link::Class(MatrixClass::SignPattern(_) | MatrixClass::SignSets(_) | MatrixClass::Scaled(_))
        )
    });
    Ok(if sign_or_scaled { Shape::Chain } else { Shape::Other })
}

/// The problem's left matrix times the leading fixed factors of the class.
pub(crate) fn total_left(problem: &Problem, chain: &[Link<'_>]) -> Result<Option<Matrix>> {
    let mut acc = problem.left.clone();
    for l in &chain[..leading_fixed(chain)] {
        let Link::Fixed(m) = l else { unreachable!() };
        acc = Some(match acc {
            Some(a) => a.checked_mul(m)?,
            None => (*m).clone(),
        });
    }
    Ok(acc)
}

pub(crate) fn leading_fixed_factors(chain: &[Link<'_>]) -> Vec<Matrix> {
    chain[..leading_fixed(chain)]
        .iter()
        .map(|l| match l {
            Link::Fixed(m) => (*m).clone(),
            Link::Class(_) => unreachable!(),
        })
        .collect()
}

/// `σ(ker A) ∪ {0}` in lexicographic order.
pub(crate) fn kernel_signs(a: &Matrix, cap: usize) -> Result<Vec<SignVector>> {
    let mut out = vec![SignVector::zero(a.cols())];
    out.extend(subspace_sign_vectors(&Subspace::from_kernel(a), cap)?);
    out.sort();
    Ok(out)
}

fn as_sign_sets(class: &MatrixClass) -> Option<Grid<SignSet>> {
    match class {
        MatrixClass::SignPattern(g) => Some(g.map(|&s| SignSet::singleton(s))),
        MatrixClass::SignSets(g) => Some(g.clone()),
        _ => None,
    }
}

fn reach(level: &MatrixClass, tau: &SignVector, rho: &SignVector) -> Result<bool> {
    match level {
        MatrixClass::Scaled(b) => Ok(pair_sign_feasible(b, tau, rho)?.is_some()),
        other => {
            let w = as_sign_sets(other).expect("chain levels are sign or scaled classes");
            concordant_pair(rho, tau, &w)
        }
    }
}

pub(crate) fn run(problem: &Problem, caps: &Caps) -> Result<Outcome> {
    let chain = problem.class.chain()?;
    let lead = leading_fixed(&chain);
    let left = total_left(problem, &chain)?;
    let levels: Vec<&MatrixClass> = chain[lead..]
        .iter()
        .map(|l| match l {
            Link::Class(c) => *c,
            Link::Fixed(_) => unreachable!(),
        })
        .collect();
    let s_signs = subspace_sign_vectors(&problem.subspace, caps.sign_dim)?;
    let out_rows = levels[0].shape()?.0;
    let finals = match &left {
        Some(a) => kernel_signs(a, caps.sign_dim)?,
        None => vec![SignVector::zero(out_rows)],
    };

    let m = levels.len();
    let mut layers: Vec<Vec<(SignVector, usize)>> =
        vec![s_signs.iter().map(|t| (t.clone(), usize::MAX)).collect()];
    let mut checked = 0usize;
    for step in 0..m {
        let level = levels[m - 1 - step];
        let rows = level.shape()?.0;
        let prev = layers.last().expect("non-empty");
        let mut next = Vec::new();
        if step == m - 1 {
            'outer: for (ti, (tau, _)) in prev.iter().enumerate() {
                for rho in &finals {
                    checked += 1;
                    if reach(level, tau, rho)? {
                        next.push((rho.clone(), ti));
                        break 'outer;
                    }
                }
            }
        } else {
            if rows > caps.sign_dim {
                return Err(Error::CapExceeded {
                    what: "sign-vector dimension",
                    count: rows as u128,
                    cap: caps.sign_dim as u128,
                });
            }
            for rho in SignVector::all(rows) {
                for (ti, (tau, _)) in prev.iter().enumerate() {
                    checked += 1;
                    if reach(level, tau, &rho)? {
                        next.push((rho.clone(), ti));
                        break;
                    }
                }
            }
        }
        layers.push(next);
    }

    let mut outcome = Outcome {
        subspace_sign_vectors: s_signs.len(),
        candidates_checked: checked,
        witness: None,
    };
    if layers[m].is_empty() {
        return Ok(outcome);
    }

    // Sign vectors along the path, from σ(z) to the final image.
    let mut path = vec![layers[m][0].0.clone()];
    let mut idx = layers[m][0].1;
    for k in (0..m).rev() {
        path.push(layers[k][idx].0.clone());
        idx = layers[k][idx].1;
    }
    path.reverse();

    let z = strict_sign_feasible(problem.subspace.kernel_rep(), &path[0], &[])?
        .ok_or_else(|| Error::WitnessRejected("subspace sign vector not realizable".into()))?;
    let mut xs: Vec<Vec<Rational>> = vec![z.clone()];
    for v in &path[1..m] {
        xs.push(v.unit_representative());
    }
    let last = match &left {
        Some(a) => strict_sign_feasible(a, &path[m], &[])?
            .ok_or_else(|| Error::WitnessRejected("kernel sign vector not realizable".into()))?,
        None => vec![Rational::zero(); out_rows],
    };
    xs.push(last);

    let mut level_factors = Vec::with_capacity(m);
    for step in 0..m {
        let level = levels[m - 1 - step];
        level_factors.push(step_matrix(level, &xs[step], &xs[step + 1], &path[step], &path[step + 1])?);
    }
    level_factors.reverse();
    let mut factors = leading_fixed_factors(&chain);
    factors.extend(level_factors);
    outcome.witness = Some(assemble_witness(problem, factors, z)?);
    Ok(outcome)
}

/// A member `B` of `level` with `Bx = y`.
fn step_matrix(level: &MatrixClass, x: &[Rational], y: &[Rational], tau: &SignVector, rho: &SignVector) -> Result<Matrix> {
    match level {
        MatrixClass::Scaled(b) => {
            let xp = pair_sign_feasible(b, tau, rho)?
                .ok_or_else(|| Error::WitnessRejected("pair sign step not feasible".into()))?;
            let lambda: Vec<Rational> = xp
                .iter()
                .zip(x)
                .map(|(p, q)| if q.is_zero() { Rational::one() } else { p / q })
                .collect();
            let u = b.mul_vec(&xp);
            let kappa: Vec<Rational> = y
                .iter()
                .zip(&u)
                .map(|(p, q)| if q.is_zero() { Rational::one() } else { p / q })
                .collect();
            Ok(&(&Matrix::diagonal(&kappa) * b) * &Matrix::diagonal(&lambda))
        }
        other => {
            let w = as_sign_sets(other).expect("chain levels are sign or scaled classes");
            concordance_witness(&w, x, y)?
                .ok_or_else(|| Error::WitnessRejected("sign vectors are not concordant".into()))
        }
    }
}

/// A matrix `B` with entry signs in `w` and `Bx = y`, built row by row, or
/// `None` when the signs of `x` and `y` are not concordant with `w`.
pub fn concordance_witness(w: &Grid<SignSet>, x: &[Rational], y: &[Rational]) -> Result<Option<Matrix>> {
    crate::error::check_dim("concordance columns", w.cols(), x.len())?;
    crate::error::check_dim("concordance rows", w.rows(), y.len())?;
    let sx = sigma(x);
    let n = x.len();
    let mut rows = Vec::with_capacity(y.len());
    for (i, yi) in y.iter().enumerate() {
        let wi = w.row(i);
        if yi.is_zero() {
            let Some(t) = orthogonal_representative(wi, &sx)? else {
                return Ok(None);
            };
            let e = Matrix::row_vector(x);
            let row = strict_sign_feasible(&e, &t, &[])?
                .ok_or_else(|| Error::WitnessRejected("orthogonal sign vector not realizable".into()))?;
            rows.push(row);
            continue;
        }
        let target = Sign::of(yi);
        let pivot = (0..n).find_map(|j| wi[j].iter().find(|&s| s * sx.0[j] == target).map(|s| (j, s)));
        let Some((j, s)) = pivot else {
            return Ok(None);
        };
        let small: Vec<Sign> = wi
            .iter()
            .map(|set| if set.contains(Sign::Zero) { Sign::Zero } else { set.iter().next().expect("non-empty") })
            .collect();
        let mut eps = Rational::one();
        let row = loop {
            let mut row: Vec<Rational> = small
                .iter()
                .map(|t| &eps * int(t.as_i64()))
                .collect();
            row[j] = Rational::zero();
            let rest: Rational = row.iter().zip(x).map(|(b, xv)| b * xv).sum();
            if rest.abs() < yi.abs() {
                row[j] = (yi - rest) / &x[j];
                break row;
            }
            eps /= int(2);
        };
        debug_assert_eq!(Sign::of(&row[j]), s);
        rows.push(row);
    }
    Ok(Some(Matrix::from_rows(rows)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ints;

    #[test]
    fn concordance_rows_reach_the_target() {
        let w = Grid::from_rows(vec![
            vec![SignSet::POS, SignSet::ZERO],
            vec![SignSet::POS, SignSet::POS],
        ])
        .unwrap();
        let x = ints(&[3, -1]);
        let y = ints(&[5, 0]);
        let b = concordance_witness(&w, &x, &y).unwrap().unwrap();
        assert_eq!(b.mul_vec(&x), y);
        assert!(MatrixClass::SignSets(w.clone()).contains(&b).unwrap());
        assert!(concordance_witness(&w, &ints(&[1, 1]), &ints(&[0, 1])).unwrap().is_none());
    }

    #[test]
    fn small_entries_are_shrunk_below_the_target() {
        let w = Grid::from_rows(vec![vec![SignSet::POS, SignSet::NEG, SignSet::POS]]).unwrap();
        let x = ints(&[1, -100, 100]);
        let y = vec![crate::linalg::rat(1, 1000)];
        let b = concordance_witness(&w, &x, &y).unwrap().unwrap();
        assert_eq!(b.mul_vec(&x), y);
        assert!(MatrixClass::SignSets(w).contains(&b).unwrap());
    }
}
