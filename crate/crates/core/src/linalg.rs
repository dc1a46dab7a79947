//! Exact rational matrices, kernels, determinants and subspaces.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{check_dim, Error, Result};
use crate::lp::{Cone, Rel};
use crate::signs::SignVector;

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// `n/d`, reduced. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

/// Scales a nonzero vector to the primitive integer vector on the same ray.
pub fn primitive(v: &[Rational]) -> Vec<Rational> {
    let mut lcm = BigInt::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let scaled: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let mut gcd = BigInt::zero();
    for x in &scaled {
        gcd = gcd.gcd(x);
    }
    if gcd.is_zero() {
        return v.to_vec();
    }
    scaled
        .into_iter()
        .map(|x| BigRational::from_integer(x / &gcd))
        .collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        check_dim("matrix data length", rows * cols, data.len())?;
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for row in rows {
            check_dim("row length", cols, row.len())?;
            data.extend(row);
        }
        Ok(Matrix {
            rows: nrows,
            cols,
            data,
        })
    }

    /// Convenience constructor for integer literals. Panics on ragged input.
    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| ints(r)).collect()).expect("ragged integer matrix")
    }

    pub fn column_vector(v: &[Rational]) -> Self {
        Matrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn row_vector(v: &[Rational]) -> Self {
        Matrix {
            rows: 1,
            cols: v.len(),
            data: v.to_vec(),
        }
    }

    pub fn diagonal(d: &[Rational]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Rational] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.data)
    }

    pub fn checked_mul(&self, rhs: &Matrix) -> Result<Matrix> {
        check_dim("matrix product", self.cols, rhs.rows)?;
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// Stacks `below` under `self`.
    pub fn stack(&self, below: &Matrix) -> Result<Matrix> {
        check_dim("vertical stack", self.cols, below.cols)?;
        let mut data = self.data.clone();
        data.extend(below.data.iter().cloned());
        Ok(Matrix {
            rows: self.rows + below.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend(self.row(i).iter().cloned());
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        let mut m = Matrix::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (c, &j) in idx.iter().enumerate() {
                m[(i, c)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    let v = &m[(r, j)] * &f;
                    m[(i, j)] -= v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Indices of a maximal linearly independent set of rows, chosen greedily in order.
    pub fn independent_rows(&self) -> Vec<usize> {
        let (_, pivots) = self.transpose().rref();
        pivots
    }

    /// Whether `v` lies in the column span.
    pub fn span_contains(&self, v: &[Rational]) -> bool {
        assert_eq!(self.rows, v.len());
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = v[i].clone();
        }
        aug.rank() == self.rank()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.data.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.checked_mul(rhs).expect("matrix product dimension mismatch")
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}

/// Columns form a basis of `ker(m)`; zero columns when the kernel is trivial.
pub fn kernel_basis(m: &Matrix) -> Matrix {
    let (r, pivots) = m.rref();
    let free: Vec<usize> = (0..m.cols).filter(|c| !pivots.contains(c)).collect();
    let mut k = Matrix::zeros(m.cols, free.len());
    for (col, &f) in free.iter().enumerate() {
        k[(f, col)] = Rational::one();
        for (row, &p) in pivots.iter().enumerate() {
            k[(p, col)] = -r[(row, f)].clone();
        }
    }
    k
}

/// A full-row-rank `Z` whose kernel is the column span of `v`.
pub fn kernel_rep_of_image(v: &Matrix) -> Matrix {
    kernel_basis(&v.transpose()).transpose()
}

/// Exact determinant by Gaussian elimination over the rationals.
pub fn determinant(m: &Matrix) -> Result<Rational> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    let mut a = m.clone();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[(i, c)].is_zero()) else {
            return Ok(Rational::zero());
        };
        if p != c {
            a.swap_rows(p, c);
            det = -det;
        }
        let pivot = a[(c, c)].clone();
        det *= &pivot;
        for i in c + 1..n {
            if a[(i, c)].is_zero() {
                continue;
            }
            let f = &a[(i, c)] / &pivot;
            for j in c..n {
                let v = &a[(c, j)] * &f;
                a[(i, j)] -= v;
            }
        }
    }
    Ok(det)
}

/// A linear subspace `S ⊆ ℚⁿ`, held in both presentations: a column basis
/// and a full-row-rank `Z` with `S = ker Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
    kernel_rep: Matrix,
}

impl Subspace {
    /// `S = ℚⁿ`.
    pub fn full(n: usize) -> Self {
        Subspace {
            ambient: n,
            basis: Matrix::identity(n),
            kernel_rep: Matrix::zeros(0, n),
        }
    }

    /// `S = im(V)`.
    pub fn from_image(v: &Matrix) -> Self {
        let (_, pivots) = v.rref();
        Subspace {
            ambient: v.rows(),
            basis: v.select_cols(&pivots),
            kernel_rep: kernel_rep_of_image(v),
        }
    }

    /// `S = ker(Z)`. Redundant rows of `Z` are dropped; the remaining rows are kept verbatim.
    pub fn from_kernel(z: &Matrix) -> Self {
        let keep = z.independent_rows();
        Subspace {
            ambient: z.cols(),
            basis: kernel_basis(z),
            kernel_rep: z.select_rows(&keep),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    /// Columns spanning `S`.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// `Z` with `S = ker Z`, full row rank.
    pub fn kernel_rep(&self) -> &Matrix {
        &self.kernel_rep
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.ambient && is_zero_vec(&self.kernel_rep.mul_vec(x))
    }
}

/// An exact `x` with `Ex = 0`, `σ(x) = τ` and `σ(Cx) = ρ` for every extra pair
/// `(C, ρ)`, or `None` when no such `x` exists.
pub fn strict_sign_feasible(
    e: &Matrix,
    tau: &SignVector,
    extra: &[(&Matrix, &SignVector)],
) -> Result<Option<Vec<Rational>>> {
    let n = tau.len();
    check_dim("constraint matrix columns", n, e.cols())?;
    let mut cone = Cone::new(tau.as_slice().iter().map(|&s| Some(s)).collect());
    for i in 0..e.rows() {
        cone.push(e.row(i).to_vec(), Rel::Eq);
    }
    for (c, rho) in extra {
        check_dim("extra matrix columns", n, c.cols())?;
        check_dim("extra sign vector length", c.rows(), rho.len())?;
        for (i, &s) in rho.as_slice().iter().enumerate() {
            cone.push(c.row(i).to_vec(), Rel::strict(s));
        }
    }
    Ok(cone.solve())
}
