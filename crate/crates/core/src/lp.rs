//! Exact phase-1 simplex for homogeneous sign-constrained systems.
//!
//! Every system handled here is a cone: each constraint is `a·x ⋈ 0` with
//! `⋈ ∈ {=, >, <, ≥, ≤}` and each variable is either sign-fixed or free.
//! Strict relations are normalised to `≥ 1` / `≤ -1`, which is exact on cones.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::linalg::Rational;
use crate::signs::Sign;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Rel {
    Eq,
    Gt,
    Lt,
    Ge,
    #[allow(dead_code)]
    Le,
}

impl Rel {
    pub(crate) fn strict(sign: Sign) -> Rel {
        match sign {
            Sign::Pos => Rel::Gt,
            Sign::Neg => Rel::Lt,
            Sign::Zero => Rel::Eq,
        }
    }
}

/// A homogeneous system in `x ∈ ℚⁿ`.
#[derive(Clone, Debug)]
pub(crate) struct Cone {
    vars: Vec<Option<Sign>>,
    rows: Vec<(Vec<Rational>, Rel)>,
}

impl Cone {
    /// `signs[i] = Some(s)` fixes `σ(x_i) = s`; `None` leaves `x_i` free.
    pub(crate) fn new(signs: Vec<Option<Sign>>) -> Self {
        Cone {
            vars: signs,
            rows: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, coeffs: Vec<Rational>, rel: Rel) {
        debug_assert_eq!(coeffs.len(), self.vars.len());
        self.rows.push((coeffs, rel));
    }

    /// An exact point satisfying all constraints, or `None` when infeasible.
    pub(crate) fn solve(&self) -> Option<Vec<Rational>> {
        // Column layout of the standard form: one column per sign-fixed
        // nonzero variable, two per free variable.
        let n = self.vars.len();
        let mut col_of: Vec<(Option<usize>, Option<usize>)> = vec![(None, None); n];
        let mut ncols = 0;
        for (i, s) in self.vars.iter().enumerate() {
            match s {
                Some(Sign::Zero) => {}
                Some(_) => {
                    col_of[i] = (Some(ncols), None);
                    ncols += 1;
                }
                None => {
                    col_of[i] = (Some(ncols), Some(ncols + 1));
                    ncols += 2;
                }
            }
        }
        let nslack = self
            .rows
            .iter()
            .filter(|(_, r)| *r != Rel::Eq)
            .count();
        let total = ncols + nslack;

        let mut a: Vec<Vec<Rational>> = Vec::with_capacity(self.rows.len());
        let mut b: Vec<Rational> = Vec::with_capacity(self.rows.len());
        let mut slack = ncols;
        for (coeffs, rel) in &self.rows {
            let mut row = vec![Rational::zero(); total];
            // Substitution x_i = ±(1 + s_i) contributes a constant ±a_i.
            let mut constant = Rational::zero();
            for (i, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                match (self.vars[i], col_of[i]) {
                    (Some(Sign::Zero), _) => {}
                    (Some(Sign::Pos), (Some(k), _)) => {
                        row[k] += c;
                        constant += c;
                    }
                    (Some(Sign::Neg), (Some(k), _)) => {
                        row[k] -= c;
                        constant -= c;
                    }
                    (None, (Some(p), Some(q))) => {
                        row[p] += c;
                        row[q] -= c;
                    }
                    _ => unreachable!(),
                }
            }
            let rhs = match rel {
                Rel::Eq => -constant,
                Rel::Gt => {
                    row[slack] = -Rational::one();
                    slack += 1;
                    Rational::one() - constant
                }
                Rel::Lt => {
                    row[slack] = Rational::one();
                    slack += 1;
                    -Rational::one() - constant
                }
                Rel::Ge => {
                    row[slack] = -Rational::one();
                    slack += 1;
                    -constant
                }
                Rel::Le => {
                    row[slack] = Rational::one();
                    slack += 1;
                    -constant
                }
            };
            a.push(row);
            b.push(rhs);
        }

        let s = phase_one(a, b, total)?;
        let mut x = vec![Rational::zero(); n];
        for i in 0..n {
            x[i] = match (self.vars[i], col_of[i]) {
                (Some(Sign::Zero), _) => Rational::zero(),
                (Some(Sign::Pos), (Some(k), _)) => Rational::one() + &s[k],
                (Some(Sign::Neg), (Some(k), _)) => -(Rational::one() + &s[k]),
                (None, (Some(p), Some(q))) => &s[p] - &s[q],
                _ => unreachable!(),
            };
        }
        Some(x)
    }
}

/// Finds `s ≥ 0` with `A s = b`, using artificial variables and Bland's rule.
fn phase_one(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>, n: usize) -> Option<Vec<Rational>> {
    let m = a.len();
    if m == 0 {
        return Some(vec![Rational::zero(); n]);
    }
    for i in 0..m {
        if b[i].is_negative() {
            b[i] = -b[i].clone();
            for v in a[i].iter_mut() {
                *v = -v.clone();
            }
        }
    }
    // Tableau columns: n structural, m artificial; rhs kept separately.
    let width = n + m;
    let mut t: Vec<Vec<Rational>> = a
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            row.resize(width, Rational::zero());
            row[n + i] = Rational::one();
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();
    // Reduced costs of the phase-1 objective (sum of artificials).
    let mut cost = vec![Rational::zero(); width];
    let mut obj = Rational::zero();
    for i in 0..m {
        for j in 0..n {
            cost[j] -= &t[i][j];
        }
        obj -= &b[i];
    }

    loop {
        let Some(enter) = (0..width).find(|&j| cost[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if !t[i][enter].is_positive() {
                continue;
            }
            let ratio = &b[i] / &t[i][enter];
            let better = match &leave {
                None => true,
                Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // The phase-1 objective is bounded below by zero.
        let (r, _) = leave.expect("phase-1 objective cannot be unbounded");
        pivot(&mut t, &mut b, &mut cost, &mut obj, r, enter);
        basis[r] = enter;
    }

    if !obj.is_zero() {
        return None;
    }
    let mut s = vec![Rational::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            s[bv] = b[i].clone();
        }
    }
    Some(s)
}

fn pivot(
    t: &mut [Vec<Rational>],
    b: &mut [Rational],
    cost: &mut [Rational],
    obj: &mut Rational,
    r: usize,
    c: usize,
) {
    let inv = t[r][c].recip();
    for v in t[r].iter_mut() {
        if !v.is_zero() {
            *v *= &inv;
        }
    }
    b[r] *= &inv;
    let pivot_row = t[r].clone();
    let pivot_rhs = b[r].clone();
    for i in 0..t.len() {
        if i == r || t[i][c].is_zero() {
            continue;
        }
        let f = t[i][c].clone();
        for (v, p) in t[i].iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *v -= &f * p;
            }
        }
        b[i] -= &f * &pivot_rhs;
    }
    if !cost[c].is_zero() {
        let f = cost[c].clone();
        for (v, p) in cost.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *v -= &f * p;
            }
        }
        *obj -= &f * &pivot_rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, ints};

    #[test]
    fn free_variables_and_strict_rows() {
        // x free, y > 0, x + y = 0, x - 2y < 0
        let mut c = Cone::new(vec![None, Some(Sign::Pos)]);
        c.push(ints(&[1, 1]), Rel::Eq);
        c.push(ints(&[1, -2]), Rel::Lt);
        let x = c.solve().unwrap();
        assert_eq!(&x[0] + &x[1], int(0));
        assert!(x[1] >= int(1));
    }

    #[test]
    fn infeasible_cone() {
        // x > 0, y > 0, x + y <= 0
        let mut c = Cone::new(vec![Some(Sign::Pos), Some(Sign::Pos)]);
        c.push(ints(&[1, 1]), Rel::Le);
        assert!(c.solve().is_none());
    }

    #[test]
    fn zero_variables_are_eliminated() {
        let mut c = Cone::new(vec![Some(Sign::Zero), Some(Sign::Neg)]);
        c.push(ints(&[5, 1]), Rel::Lt);
        let x = c.solve().unwrap();
        assert_eq!(x[0], int(0));
        assert!(x[1] <= int(-1));
    }
}
