//! Descriptors for classes of matrices and their membership tests.

use alloc::boxed::Box;
use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{int, Matrix, Rational, Subspace};
use crate::signs::{Sign, SignSet};

/// A dense row-major grid of arbitrary entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grid<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            check_dim("row length", c, row.len())?;
            data.extend(row);
        }
        Ok(Grid {
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        check_dim("entry count", rows * cols, data.len())?;
        Ok(Grid { rows, cols, data })
    }

    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Grid {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[T] {
        &self.data
    }

    pub fn map<U, F: FnMut(&T) -> U>(&self, f: F) -> Grid<U> {
        Grid {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

/// A set of reals: an interval with optional infinite ends and open/closed
/// flags, optionally with `0` removed from its interior.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntervalEntry {
    lower: Option<Rational>,
    upper: Option<Rational>,
    lower_open: bool,
    upper_open: bool,
    punctured: bool,
}

impl IntervalEntry {
    /// `None` bounds are infinite and always open.
    pub fn new(
        lower: Option<Rational>,
        lower_open: bool,
        upper: Option<Rational>,
        upper_open: bool,
    ) -> Result<Self> {
        let e = IntervalEntry {
            lower_open: lower_open || lower.is_none(),
            upper_open: upper_open || upper.is_none(),
            lower,
            upper,
            punctured: false,
        };
        if let (Some(l), Some(u)) = (&e.lower, &e.upper) {
            if l > u || (l == u && (e.lower_open || e.upper_open)) {
                return Err(Error::InvalidInput(format!("empty interval {e}")));
            }
        }
        Ok(e)
    }

    pub fn point(v: Rational) -> Self {
        IntervalEntry {
            lower: Some(v.clone()),
            upper: Some(v),
            lower_open: false,
            upper_open: false,
            punctured: false,
        }
    }

    pub fn open(l: Rational, u: Rational) -> Result<Self> {
        Self::new(Some(l), true, Some(u), true)
    }

    pub fn closed(l: Rational, u: Rational) -> Result<Self> {
        Self::new(Some(l), false, Some(u), false)
    }

    pub fn positive() -> Self {
        Self::new(Some(Rational::zero()), true, None, true).expect("valid")
    }

    pub fn negative() -> Self {
        Self::new(None, true, Some(Rational::zero()), true).expect("valid")
    }

    pub fn real_line() -> Self {
        Self::new(None, true, None, true).expect("valid")
    }

    /// Removes `0`, which must lie strictly inside.
    pub fn punctured(self) -> Result<Self> {
        let below = self.lower.as_ref().is_none_or(|l| l.is_negative());
        let above = self.upper.as_ref().is_none_or(|u| u.is_positive());
        if !(below && above) {
            return Err(Error::InvalidInput(format!(
                "cannot remove 0 from {self}: 0 is not an interior point"
            )));
        }
        Ok(IntervalEntry {
            punctured: true,
            ..self
        })
    }

    pub fn lower(&self) -> Option<&Rational> {
        self.lower.as_ref()
    }

    pub fn upper(&self) -> Option<&Rational> {
        self.upper.as_ref()
    }

    pub fn lower_open(&self) -> bool {
        self.lower_open
    }

    pub fn upper_open(&self) -> bool {
        self.upper_open
    }

    pub fn is_punctured(&self) -> bool {
        self.punctured
    }

    pub fn as_point(&self) -> Option<&Rational> {
        match (&self.lower, &self.upper) {
            (Some(l), Some(u)) if l == u => Some(l),
            _ => None,
        }
    }

    /// `(0, +∞)` exactly.
    pub fn is_positive_half_line(&self) -> bool {
        self.lower.as_ref().is_some_and(Zero::is_zero)
            && self.lower_open
            && self.upper.is_none()
            && !self.punctured
    }

    pub fn contains(&self, x: &Rational) -> bool {
        if self.punctured && x.is_zero() {
            return false;
        }
        let above = match &self.lower {
            None => true,
            Some(l) => x > l || (!self.lower_open && x == l),
        };
        let below = match &self.upper {
            None => true,
            Some(u) => x < u || (!self.upper_open && x == u),
        };
        above && below
    }

    /// The signs attained by members.
    pub fn sign_set(&self) -> SignSet {
        let neg = self.lower.as_ref().is_none_or(|l| l.is_negative());
        let pos = self.upper.as_ref().is_none_or(|u| u.is_positive());
        let zero = self.contains(&Rational::zero());
        let signs = [(neg, Sign::Neg), (zero, Sign::Zero), (pos, Sign::Pos)];
        SignSet::from_signs(signs.into_iter().filter(|p| p.0).map(|p| p.1))
            .expect("intervals are non-empty")
    }

    /// The connected pieces: two for a punctured entry, otherwise the entry itself.
    pub fn pieces(&self) -> Vec<IntervalEntry> {
        if !self.punctured {
            return vec![self.clone()];
        }
        vec![
            IntervalEntry {
                upper: Some(Rational::zero()),
                upper_open: true,
                punctured: false,
                ..self.clone()
            },
            IntervalEntry {
                lower: Some(Rational::zero()),
                lower_open: true,
                punctured: false,
                ..self.clone()
            },
        ]
    }

    /// A fixed member, interior whenever the entry is not a point.
    pub fn interior_point(&self) -> Rational {
        if self.punctured {
            return self.pieces()[1].interior_point();
        }
        match (&self.lower, &self.upper) {
            (Some(l), Some(u)) => (l + u) / int(2),
            (Some(l), None) => l + int(1),
            (None, Some(u)) => u - int(1),
            (None, None) => Rational::zero(),
        }
    }
}

impl fmt::Display for IntervalEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = self.as_point() {
            return write!(f, "{{{p}}}");
        }
        let lo = |f: &mut fmt::Formatter<'_>, e: &IntervalEntry| match &e.lower {
            None => write!(f, "(-inf"),
            Some(l) => write!(f, "{}{l}", if e.lower_open { '(' } else { '[' }),
        };
        let hi = |f: &mut fmt::Formatter<'_>, e: &IntervalEntry| match &e.upper {
            None => write!(f, "inf)"),
            Some(u) => write!(f, "{u}{}", if e.upper_open { ')' } else { ']' }),
        };
        lo(f, self)?;
        if self.punctured {
            write!(f, ",0)u(0,")?;
        } else {
            write!(f, ",")?;
        }
        hi(f, self)
    }
}

/// A set of real matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatrixClass {
    /// All matrices with the given sign pattern.
    SignPattern(Grid<Sign>),
    /// All matrices whose entry signs lie in the given sign sets.
    SignSets(Grid<SignSet>),
    /// All matrices with entries in the given sets.
    Interval(Grid<IntervalEntry>),
    /// `{diag(κ)·B·diag(λ) : κ, λ > 0}`.
    Scaled(Matrix),
    /// `{L·R : L ∈ left, R ∈ right}`.
    Product(Box<Factor>, Box<MatrixClass>),
    /// `{[Z; B] : B ∈ inner}`.
    Augmented(Matrix, Box<MatrixClass>),
}

/// The left operand of a product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    Fixed(Matrix),
    Class(MatrixClass),
}

impl Factor {
    pub fn shape(&self) -> Result<(usize, usize)> {
        match self {
            Factor::Fixed(m) => Ok((m.rows(), m.cols())),
            Factor::Class(c) => c.shape(),
        }
    }
}

/// One factor of a flattened product, leftmost first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Link<'a> {
    Fixed(&'a Matrix),
    Class(&'a MatrixClass),
}

impl<'a> Link<'a> {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Link::Fixed(m) => (m.rows(), m.cols()),
            Link::Class(c) => c.shape().expect("links are atoms"),
        }
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        match self {
            Link::Fixed(f) => *f == m,
            Link::Class(c) => c.contains(m).unwrap_or(false),
        }
    }
}

impl MatrixClass {
    pub fn product(left: Factor, right: MatrixClass) -> Result<Self> {
        let (_, lc) = left.shape()?;
        let (rr, _) = right.shape()?;
        check_dim("product inner dimension", lc, rr)?;
        Ok(MatrixClass::Product(Box::new(left), Box::new(right)))
    }

    /// `(rows, cols)`; errors when a product or augmentation does not compose.
    pub fn shape(&self) -> Result<(usize, usize)> {
        match self {
            MatrixClass::SignPattern(g) => Ok((g.rows(), g.cols())),
            MatrixClass::SignSets(g) => Ok((g.rows(), g.cols())),
            MatrixClass::Interval(g) => Ok((g.rows(), g.cols())),
            MatrixClass::Scaled(b) => Ok((b.rows(), b.cols())),
            MatrixClass::Product(l, r) => {
                let (lr, lc) = l.shape()?;
                let (rr, rc) = r.shape()?;
                check_dim("product inner dimension", lc, rr)?;
                Ok((lr, rc))
            }
            MatrixClass::Augmented(z, inner) => {
                let (ir, ic) = inner.shape()?;
                if z.rows() > 0 {
                    check_dim("augmentation columns", ic, z.cols())?;
                }
                Ok((z.rows() + ir, ic))
            }
        }
    }

    pub fn is_atom(&self) -> bool {
        !matches!(self, MatrixClass::Product(..) | MatrixClass::Augmented(..))
    }

    /// Flattens nested products into their factors, leftmost first.
    pub fn chain(&self) -> Result<Vec<Link<'_>>> {
        let mut out = Vec::new();
        self.push_links(&mut out)?;
        Ok(out)
    }

    fn push_links<'a>(&'a self, out: &mut Vec<Link<'a>>) -> Result<()> {
        match self {
            MatrixClass::Product(l, r) => {
                match l.as_ref() {
                    Factor::Fixed(m) => out.push(Link::Fixed(m)),
                    Factor::Class(c) => c.push_links(out)?,
                }
                r.push_links(out)
            }
            MatrixClass::Augmented(..) => Err(Error::Unsupported(
                "augmented classes inside a product".into(),
            )),
            atom => {
                out.push(Link::Class(atom));
                Ok(())
            }
        }
    }

    /// Exact membership. Products are rejected because membership would
    /// need a factorization; check their factors instead.
    pub fn contains(&self, m: &Matrix) -> Result<bool> {
        let (r, c) = self.shape()?;
        if (m.rows(), m.cols()) != (r, c) {
            return Ok(false);
        }
        let entries = m.data();
        Ok(match self {
            MatrixClass::SignPattern(g) => entries
                .iter()
                .zip(g.entries())
                .all(|(x, &s)| Sign::of(x) == s),
            MatrixClass::SignSets(g) => entries
                .iter()
                .zip(g.entries())
                .all(|(x, s)| s.contains(Sign::of(x))),
            MatrixClass::Interval(g) => entries.iter().zip(g.entries()).all(|(x, d)| d.contains(x)),
            MatrixClass::Scaled(b) => scaling_of(b, m).is_some(),
            MatrixClass::Augmented(z, inner) => {
                let top: Vec<usize> = (0..z.rows()).collect();
                let rest: Vec<usize> = (z.rows()..r).collect();
                m.select_rows(&top) == *z && inner.contains(&m.select_rows(&rest))?
            }
            MatrixClass::Product(..) => {
                return Err(Error::Unsupported(
                    "membership in a product class; check the factors".into(),
                ))
            }
        })
    }
}

/// Positive `κ, λ` with `m = diag(κ)·b·diag(λ)`, if they exist.
pub fn scaling_of(b: &Matrix, m: &Matrix) -> Option<(Vec<Rational>, Vec<Rational>)> {
    let (r, c) = (b.rows(), b.cols());
    if (m.rows(), m.cols()) != (r, c) {
        return None;
    }
    for i in 0..r {
        for j in 0..c {
            if Sign::of(&b[(i, j)]) != Sign::of(&m[(i, j)]) {
                return None;
            }
        }
    }
    // Propagate κ_i·λ_j = m_ij / b_ij over the bipartite support graph.
    let mut kappa: Vec<Option<Rational>> = vec![None; r];
    let mut lambda: Vec<Option<Rational>> = vec![None; c];
    for start in 0..r {
        if kappa[start].is_some() {
            continue;
        }
        kappa[start] = Some(Rational::one());
        let mut queue = VecDeque::from([(true, start)]);
        while let Some((is_row, k)) = queue.pop_front() {
            if is_row {
                let ki = kappa[k].clone().expect("assigned");
                for j in 0..c {
                    if !b[(k, j)].is_zero() && lambda[j].is_none() {
                        lambda[j] = Some(&m[(k, j)] / &b[(k, j)] / &ki);
                        queue.push_back((false, j));
                    }
                }
            } else {
                let lj = lambda[k].clone().expect("assigned");
                for i in 0..r {
                    if !b[(i, k)].is_zero() && kappa[i].is_none() {
                        kappa[i] = Some(&m[(i, k)] / &b[(i, k)] / &lj);
                        queue.push_back((true, i));
                    }
                }
            }
        }
    }
    let kappa: Vec<Rational> = kappa.into_iter().map(|k| k.unwrap_or_else(Rational::one)).collect();
    let lambda: Vec<Rational> = lambda
        .into_iter()
        .map(|l| l.unwrap_or_else(Rational::one))
        .collect();
    for i in 0..r {
        for j in 0..c {
            if !b[(i, j)].is_zero() && &kappa[i] * &b[(i, j)] * &lambda[j] != m[(i, j)] {
                return None;
            }
        }
    }
    Some((kappa, lambda))
}

/// Entry-wise translation of sign sets into the real sets they describe.
pub fn d_of_signsets(w: &Grid<SignSet>) -> Grid<IntervalEntry> {
    w.map(|&s| match s {
        SignSet::ZERO => IntervalEntry::point(Rational::zero()),
        SignSet::NEG => IntervalEntry::negative(),
        SignSet::POS => IntervalEntry::positive(),
        SignSet::NONPOS => IntervalEntry::new(None, true, Some(Rational::zero()), false).expect("valid"),
        SignSet::NONNEG => IntervalEntry::new(Some(Rational::zero()), false, None, true).expect("valid"),
        SignSet::NONZERO => IntervalEntry::real_line().punctured().expect("0 is interior"),
        _ => IntervalEntry::real_line(),
    })
}

/// Every sign pattern `W` with `W_ij ∈ 𝒲_ij`, in lexicographic order.
pub fn enumerate_patterns(w: &Grid<SignSet>, cap: u128) -> Result<Vec<Grid<Sign>>> {
    let count = w
        .entries()
        .iter()
        .try_fold(1u128, |acc, s| acc.checked_mul(s.len() as u128))
        .unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::CapExceeded {
            what: "sign patterns",
            count,
            cap,
        });
    }
    let choices: Vec<Vec<Sign>> = w.entries().iter().map(|s| s.iter().collect()).collect();
    let mut idx = vec![0usize; choices.len()];
    let mut out = Vec::with_capacity(count as usize);
    loop {
        let data = idx.iter().zip(&choices).map(|(&k, c)| c[k]).collect();
        out.push(Grid::from_row_major(w.rows(), w.cols(), data)?);
        let mut k = choices.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// `{[Z; B] : B ∈ inner}` with `Z` a kernel presentation of `S`.
pub fn augment_with_kernel_rep(s: &Subspace, inner: MatrixClass) -> Result<MatrixClass> {
    let (_, c) = inner.shape()?;
    check_dim("class columns vs ambient dimension", s.ambient_dim(), c)?;
    Ok(MatrixClass::Augmented(s.kernel_rep().clone(), Box::new(inner)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    fn signs(rows: &[&str]) -> Grid<Sign> {
        Grid::from_rows(
            rows.iter()
                .map(|r| r.chars().map(|c| Sign::from_char(c).unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn signset_translation_table() {
        let g = Grid::from_rows(vec![SignSet::ALL.to_vec()]).unwrap();
        let d = d_of_signsets(&g);
        let shown: Vec<_> = d.entries().iter().map(|e| format!("{e}")).collect();
        assert_eq!(
            shown,
            ["{0}", "(-inf,0)", "(0,inf)", "(-inf,0]", "[0,inf)", "(-inf,0)u(0,inf)", "(-inf,inf)"]
        );
        for (e, s) in d.entries().iter().zip(SignSet::ALL) {
            assert_eq!(e.sign_set(), s);
        }
    }

    #[test]
    fn pattern_enumeration_counts() {
        let single = Grid::from_rows(vec![vec![SignSet::POS, SignSet::ZERO]]).unwrap();
        assert_eq!(enumerate_patterns(&single, 10).unwrap(), vec![signs(&["+0"])]);
        let one_star = Grid::from_rows(vec![vec![SignSet::ANY, SignSet::NEG]]).unwrap();
        assert_eq!(enumerate_patterns(&one_star, 10).unwrap().len(), 3);
        let all_nonneg = Grid::filled(2, 2, SignSet::NONNEG);
        assert_eq!(enumerate_patterns(&all_nonneg, 100).unwrap().len(), 16);
        assert_eq!(
            enumerate_patterns(&all_nonneg, 15),
            Err(Error::CapExceeded {
                what: "sign patterns",
                count: 16,
                cap: 15
            })
        );
    }

    #[test]
    fn augmentation_shapes() {
        let inner = MatrixClass::Scaled(Matrix::from_ints(&[&[1, 1]]));
        let full = augment_with_kernel_rep(&Subspace::full(2), inner.clone()).unwrap();
        assert_eq!(full.shape().unwrap(), (1, 2));
        let line = Subspace::from_image(&Matrix::from_ints(&[&[1], &[1]]));
        let aug = augment_with_kernel_rep(&line, inner).unwrap();
        assert_eq!(aug.shape().unwrap(), (2, 2));
        let bad = MatrixClass::Scaled(Matrix::from_ints(&[&[1, 1, 1]]));
        assert!(augment_with_kernel_rep(&line, bad).is_err());
    }

    #[test]
    fn interval_membership_honours_openness() {
        let e = IntervalEntry::new(Some(int(0)), true, Some(int(1)), false).unwrap();
        assert!(!e.contains(&int(0)));
        assert!(e.contains(&int(1)));
        assert!(e.contains(&rat(1, 2)));
        let p = IntervalEntry::real_line().punctured().unwrap();
        assert!(!p.contains(&int(0)));
        assert!(p.contains(&int(-7)));
        assert!(IntervalEntry::positive().punctured().is_err());
        assert!(IntervalEntry::new(Some(int(1)), true, Some(int(1)), false).is_err());
    }

    #[test]
    fn scaled_membership_recovers_factors() {
        let b = Matrix::from_ints(&[&[1, 1], &[2, 1]]);
        let k = [int(2), rat(1, 3)];
        let l = [int(5), rat(3, 7)];
        let m = &(&Matrix::diagonal(&k) * &b) * &Matrix::diagonal(&l);
        let (kk, ll) = scaling_of(&b, &m).unwrap();
        assert_eq!(&(&Matrix::diagonal(&kk) * &b) * &Matrix::diagonal(&ll), m);
        let mut bad = m.clone();
        bad[(1, 1)] += int(1);
        assert!(scaling_of(&b, &bad).is_none());
        assert!(MatrixClass::Scaled(b.clone()).contains(&m).unwrap());
        assert!(!MatrixClass::Scaled(b).contains(&Matrix::from_ints(&[&[1, 1], &[1, 1]])).unwrap());
    }

    #[test]
    fn chains_flatten_leftmost_first() {
        let a = Matrix::from_ints(&[&[1, -1]]);
        let w = MatrixClass::SignPattern(signs(&["+-", "++"]));
        let q = MatrixClass::Scaled(Matrix::from_ints(&[&[1, 1, 0], &[0, 0, 1]]));
        let inner = MatrixClass::product(Factor::Class(w.clone()), q.clone()).unwrap();
        let c = MatrixClass::product(Factor::Fixed(a.clone()), inner).unwrap();
        assert_eq!(c.shape().unwrap(), (1, 3));
        assert_eq!(c.chain().unwrap(), vec![Link::Fixed(&a), Link::Class(&w), Link::Class(&q)]);
        assert!(MatrixClass::product(Factor::Fixed(Matrix::from_ints(&[&[1, 2, 3]])), q).is_err());
    }
}
