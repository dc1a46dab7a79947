//! Polynomials in named class parameters and symbolic views of matrix classes.
//!
//! Parameters are numbered from 1 and stay stable for a given class:
//! `κ_i` scales rows and `λ_j` scales columns of a scaled factor, `μ_k`
//! stands for the magnitude of a strictly signed entry and `ν_k` for an entry
//! ranging over a general set. Sign-pattern atoms are numbered row-major over
//! nonzero entries, interval atoms row-major over non-point entries.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::classes::{d_of_signsets, IntervalEntry, Link, MatrixClass};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Rational};
use crate::signs::Sign;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    Mu(usize),
    Nu(usize),
    Kappa(usize),
    Lambda(usize),
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Param::Kappa(i) => write!(f, "κ{i}"),
            Param::Lambda(i) => write!(f, "λ{i}"),
            Param::Mu(i) => write!(f, "μ{i}"),
            Param::Nu(i) => write!(f, "ν{i}"),
        }
    }
}

/// A product of parameter powers, kept sorted by parameter.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<(Param, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(p: Param) -> Self {
        Monomial(vec![(p, 1)])
    }

    pub fn factors(&self) -> &[(Param, u32)] {
        &self.0
    }

    pub fn degree_in(&self, p: Param) -> u32 {
        self.0.iter().find(|(q, _)| *q == p).map_or(0, |&(_, e)| e)
    }

    pub fn is_multi_affine(&self) -> bool {
        self.0.iter().all(|&(_, e)| e <= 1)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < other.0.len() {
            match (self.0.get(i), other.0.get(j)) {
                (Some(&(p, a)), Some(&(q, b))) if p == q => {
                    out.push((p, a + b));
                    i += 1;
                    j += 1;
                }
                (Some(&(p, a)), Some(&(q, _))) if p < q => {
                    out.push((p, a));
                    i += 1;
                }
                (Some(_), Some(&(q, b))) | (None, Some(&(q, b))) => {
                    out.push((q, b));
                    j += 1;
                }
                (Some(&(p, a)), None) => {
                    out.push((p, a));
                    i += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Monomial(out)
    }

    pub fn eval(&self, values: &BTreeMap<Param, Rational>) -> Rational {
        let mut acc = Rational::one();
        for &(p, e) in &self.0 {
            let v = values.get(&p).cloned().unwrap_or_else(Rational::one);
            for _ in 0..e {
                acc *= &v;
            }
        }
        acc
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, &(p, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            write!(f, "{p}")?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// A sparse polynomial with exact coefficients; zero terms are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly(BTreeMap<Monomial, Rational>);

impl Poly {
    pub fn zero() -> Self {
        Poly(BTreeMap::new())
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.0.iter()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.0.len() {
            0 => Some(Rational::zero()),
            1 => self.0.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.0.entry(m);
        match entry {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Poly) {
        for (m, c) in &other.0 {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add_scaled(&mut self, other: &Poly, s: &Rational) {
        for (m, c) in &other.0 {
            self.add_term(m.clone(), c * s);
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &other.0 {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|(m, c)| (m.clone(), -c.clone())).collect())
    }

    pub fn is_multi_affine(&self) -> bool {
        self.0.keys().all(Monomial::is_multi_affine)
    }

    /// Parameters occurring with nonzero coefficient, sorted.
    pub fn variables(&self) -> Vec<Param> {
        let mut vs: Vec<Param> = self
            .0
            .keys()
            .flat_map(|m| m.0.iter().map(|&(p, _)| p))
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }

    /// Unassigned parameters evaluate to 1.
    pub fn eval(&self, values: &BTreeMap<Param, Rational>) -> Rational {
        self.0
            .iter()
            .fold(Rational::zero(), |acc, (m, c)| acc + c * m.eval(values))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.0.iter().enumerate() {
            let mag = c.abs();
            let sep = match (k, c.is_negative()) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            write!(f, "{sep}")?;
            match (mag.is_one(), m.0.is_empty()) {
                (true, true) => write!(f, "1")?,
                (true, false) => write!(f, "{m}")?,
                (false, true) => write!(f, "{mag}")?,
                (false, false) => write!(f, "{mag}*{m}")?,
            }
        }
        Ok(())
    }
}

/// A matrix of polynomial entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
}

impl SymbolicMatrix {
    pub fn from_matrix(m: &Matrix) -> Self {
        SymbolicMatrix {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.data().iter().cloned().map(Poly::constant).collect(),
        }
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Poly>) -> Self {
        assert_eq!(entries.len(), rows * cols);
        SymbolicMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    pub fn mul(&self, rhs: &SymbolicMatrix) -> SymbolicMatrix {
        assert_eq!(self.cols, rhs.rows);
        let mut entries = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = Poly::zero();
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), rhs.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc.add_assign(&a.mul(b));
                    }
                }
                entries.push(acc);
            }
        }
        SymbolicMatrix::from_entries(self.rows, rhs.cols, entries)
    }

    /// Rows of `top` above this matrix.
    pub fn stack_below(&self, top: &Matrix) -> SymbolicMatrix {
        let mut entries: Vec<Poly> = top.data().iter().cloned().map(Poly::constant).collect();
        entries.extend(self.entries.iter().cloned());
        SymbolicMatrix::from_entries(top.rows() + self.rows, self.cols, entries)
    }

    pub fn instantiate(&self, values: &BTreeMap<Param, Rational>) -> Matrix {
        let data = self.entries.iter().map(|p| p.eval(values)).collect();
        Matrix::from_row_major(self.rows, self.cols, data).expect("shape is consistent")
    }

    /// Exact expansion over column subsets; errors when an intermediate
    /// polynomial exceeds `cap` terms.
    pub fn determinant(&self, cap: u128) -> Result<Poly> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n > 24 {
            return Err(Error::CapExceeded {
                what: "determinant dimension",
                count: n as u128,
                cap: 24,
            });
        }
        let mut layer: BTreeMap<u32, Poly> = BTreeMap::new();
        layer.insert(0, Poly::constant(Rational::one()));
        for i in 0..n {
            let mut next: BTreeMap<u32, Poly> = BTreeMap::new();
            for (mask, acc) in &layer {
                for j in 0..n {
                    if mask & (1 << j) != 0 || self.get(i, j).is_zero() {
                        continue;
                    }
                    let mut term = acc.mul(self.get(i, j));
                    if (mask >> (j + 1)).count_ones() % 2 == 1 {
                        term = term.neg();
                    }
                    let slot = next.entry(mask | (1 << j)).or_default();
                    slot.add_assign(&term);
                    if slot.len() as u128 > cap {
                        return Err(Error::CapExceeded {
                            what: "monomials",
                            count: slot.len() as u128,
                            cap,
                        });
                    }
                }
            }
            next.retain(|_, p| !p.is_zero());
            layer = next;
        }
        Ok(layer.remove(&((1u32 << n) - 1)).unwrap_or_default())
    }
}

/// A class seen as a polynomial matrix: one symbolic matrix per chain link,
/// their product, and the set each parameter ranges over.
#[derive(Clone, Debug)]
pub struct SymbolicView {
    /// Fixed rows stacked above the product, if any.
    pub top: Option<Matrix>,
    pub links: Vec<SymbolicMatrix>,
    pub product: SymbolicMatrix,
    pub domains: BTreeMap<Param, IntervalEntry>,
}

impl SymbolicView {
    /// The full matrix, including the fixed top rows.
    pub fn matrix(&self) -> SymbolicMatrix {
        match &self.top {
            Some(z) => self.product.stack_below(z),
            None => self.product.clone(),
        }
    }

    /// Concrete factors for the given parameter values, leftmost first.
    pub fn instantiate_links(&self, values: &BTreeMap<Param, Rational>) -> Vec<Matrix> {
        self.links.iter().map(|l| l.instantiate(values)).collect()
    }

    /// Parameters whose domain is `(0, +∞)`.
    pub fn all_positive(&self) -> bool {
        self.domains.values().all(IntervalEntry::is_positive_half_line)
    }
}

#[derive(Default)]
struct Counters {
    kappa: usize,
    lambda: usize,
    mu: usize,
    nu: usize,
}

/// Builds the polynomial matrices of a class. A scaled factor directly to the
/// right of a sign class loses its row scalings, which the sign class absorbs.
pub fn symbolic_view(class: &MatrixClass) -> Result<SymbolicView> {
    let (top, inner) = match class {
        MatrixClass::Augmented(z, inner) => (Some(z.clone()), inner.as_ref()),
        c => (None, c),
    };
    let chain = inner.chain()?;
    symbolic_view_of_chain(top, &chain)
}

pub(crate) fn symbolic_view_of_chain(top: Option<Matrix>, chain: &[Link<'_>]) -> Result<SymbolicView> {
    let mut counters = Counters::default();
    let mut domains = BTreeMap::new();
    let mut links = Vec::with_capacity(chain.len());
    for (k, link) in chain.iter().enumerate() {
        let absorb = k > 0
            && matches!(
                chain[k - 1],
                Link::Class(MatrixClass::SignPattern(_)) | Link::Class(MatrixClass::SignSets(_))
            );
        links.push(link_matrix(link, absorb, &mut counters, &mut domains));
    }
    let mut product = links[0].clone();
    for l in &links[1..] {
        product = product.mul(l);
    }
    Ok(SymbolicView {
        top,
        links,
        product,
        domains,
    })
}

fn link_matrix(
    link: &Link<'_>,
    absorb_rows: bool,
    counters: &mut Counters,
    domains: &mut BTreeMap<Param, IntervalEntry>,
) -> SymbolicMatrix {
    let signed_atom = |s: Sign, counters: &mut Counters, domains: &mut BTreeMap<_, _>| {
        counters.mu += 1;
        let p = Param::Mu(counters.mu);
        domains.insert(p, IntervalEntry::positive());
        Poly::term(Rational::from_integer(s.as_i64().into()), Monomial::var(p))
    };
    let set_atom = |d: &IntervalEntry, counters: &mut Counters, domains: &mut BTreeMap<_, _>| {
        if let Some(v) = d.as_point() {
            return Poly::constant(v.clone());
        }
        counters.nu += 1;
        let p = Param::Nu(counters.nu);
        domains.insert(p, d.clone());
        Poly::term(Rational::one(), Monomial::var(p))
    };
    match link {
        Link::Fixed(m) => SymbolicMatrix::from_matrix(m),
        Link::Class(MatrixClass::SignPattern(g)) => {
            let entries = g
                .entries()
                .iter()
                .map(|&s| match s {
                    Sign::Zero => Poly::zero(),
                    s => signed_atom(s, counters, domains),
                })
                .collect();
            SymbolicMatrix::from_entries(g.rows(), g.cols(), entries)
        }
        Link::Class(MatrixClass::SignSets(g)) => {
            let d = d_of_signsets(g);
            let entries = g
                .entries()
                .iter()
                .zip(d.entries())
                .map(|(s, d)| match s.as_singleton() {
                    Some(Sign::Zero) => Poly::zero(),
                    Some(s) => signed_atom(s, counters, domains),
                    None => set_atom(d, counters, domains),
                })
                .collect();
            SymbolicMatrix::from_entries(g.rows(), g.cols(), entries)
        }
        Link::Class(MatrixClass::Interval(g)) => {
            let entries = g
                .entries()
                .iter()
                .map(|d| set_atom(d, counters, domains))
                .collect();
            SymbolicMatrix::from_entries(g.rows(), g.cols(), entries)
        }
        Link::Class(MatrixClass::Scaled(b)) => {
            let (k0, l0) = (counters.kappa, counters.lambda);
            if !absorb_rows {
                counters.kappa += b.rows();
                for i in 1..=b.rows() {
                    domains.insert(Param::Kappa(k0 + i), IntervalEntry::positive());
                }
            }
            counters.lambda += b.cols();
            for j in 1..=b.cols() {
                domains.insert(Param::Lambda(l0 + j), IntervalEntry::positive());
            }
            let mut entries = Vec::with_capacity(b.rows() * b.cols());
            for i in 0..b.rows() {
                for j in 0..b.cols() {
                    let mut m = Monomial::var(Param::Lambda(l0 + j + 1));
                    if !absorb_rows {
                        m = Monomial::var(Param::Kappa(k0 + i + 1)).mul(&m);
                    }
                    entries.push(Poly::term(b[(i, j)].clone(), m));
                }
            }
            SymbolicMatrix::from_entries(b.rows(), b.cols(), entries)
        }
        Link::Class(_) => unreachable!("chains contain atoms only"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{Factor, Grid};
    use crate::linalg::{int, rat, Subspace};
    use crate::classes::augment_with_kernel_rep;
    use alloc::string::ToString;

    fn pattern(rows: &[&str]) -> MatrixClass {
        MatrixClass::SignPattern(
            Grid::from_rows(
                rows.iter()
                    .map(|r| r.chars().map(|c| Sign::from_char(c).unwrap()).collect())
                    .collect(),
            )
            .unwrap(),
        )
    }

    fn shown(m: &SymbolicMatrix) -> Vec<alloc::string::String> {
        let mut out = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.push(m.get(i, j).to_string());
            }
        }
        out
    }

    #[test]
    fn scaled_class_determinant() {
        let view = symbolic_view(&MatrixClass::Scaled(Matrix::from_ints(&[&[1, 1], &[2, 1]]))).unwrap();
        let det = view.matrix().determinant(1000).unwrap();
        assert_eq!(det.to_string(), "-κ1*κ2*λ1*λ2");
    }

    #[test]
    fn sign_class_times_scaled_class() {
        let w = pattern(&["+-", "++"]);
        let q = MatrixClass::Scaled(Matrix::from_ints(&[&[1, 1, 0], &[0, 0, 1]]));
        let class = MatrixClass::product(Factor::Class(w), q).unwrap();
        let view = symbolic_view(&class).unwrap();
        assert_eq!(
            shown(&view.product),
            ["μ1*λ1", "μ1*λ2", "-μ2*λ3", "μ3*λ1", "μ3*λ2", "μ4*λ3"]
        );
        let s = Subspace::from_kernel(&Matrix::from_ints(&[&[1, -1, 1]]));
        let aug = augment_with_kernel_rep(&s, class).unwrap();
        let det = symbolic_view(&aug).unwrap().matrix().determinant(1000).unwrap();
        assert_eq!(det.len(), 4);
        assert!(det.terms().all(|(m, c)| *c == int(1) && m.is_multi_affine()));
        // λ3(λ1 + λ2)(μ1μ4 + μ2μ3)
        let l3 = Poly::term(int(1), Monomial::var(Param::Lambda(3)));
        let mut l12 = Poly::term(int(1), Monomial::var(Param::Lambda(1)));
        l12.add_term(Monomial::var(Param::Lambda(2)), int(1));
        let mut mu = Poly::term(int(1), Monomial::var(Param::Mu(1)).mul(&Monomial::var(Param::Mu(4))));
        mu.add_term(Monomial::var(Param::Mu(2)).mul(&Monomial::var(Param::Mu(3))), int(1));
        assert_eq!(det, l3.mul(&l12).mul(&mu));
    }

    #[test]
    fn fixed_left_factor_over_interval_class() {
        let a = Matrix::from_ints(&[&[-1, 0, 0, 1], &[0, 1, -1, 0]]);
        let unit = IntervalEntry::open(int(0), int(1)).unwrap();
        let p = |v| IntervalEntry::point(int(v));
        let d = Grid::from_rows(vec![
            vec![p(1), p(0)],
            vec![unit.clone(), p(0)],
            vec![p(0), p(1)],
            vec![p(0), unit],
        ])
        .unwrap();
        let class = MatrixClass::product(Factor::Fixed(a), MatrixClass::Interval(d)).unwrap();
        let view = symbolic_view(&class).unwrap();
        assert_eq!(shown(&view.product), ["-1", "ν2", "ν1", "-1"]);
        assert_eq!(view.domains.len(), 2);
        assert_eq!(view.matrix().determinant(100).unwrap().to_string(), "1 - ν1*ν2");
    }

    #[test]
    fn identity_left_factor_is_neutral() {
        let w = pattern(&["+0", "-+"]);
        let alone = symbolic_view(&w).unwrap().product;
        let with = symbolic_view(&MatrixClass::product(Factor::Fixed(Matrix::identity(2)), w).unwrap())
            .unwrap()
            .product;
        assert_eq!(alone, with);
    }

    #[test]
    fn product_matches_concrete_evaluation() {
        let w = pattern(&["+-", "0+"]);
        let q = MatrixClass::Scaled(Matrix::from_ints(&[&[1, 2], &[-1, 3]]));
        let class = MatrixClass::product(Factor::Class(w), q).unwrap();
        let view = symbolic_view(&class).unwrap();
        let mut values = BTreeMap::new();
        for (k, p) in view.domains.keys().enumerate() {
            values.insert(*p, rat(k as i64 + 2, 3));
        }
        let links = view.instantiate_links(&values);
        assert_eq!(&links[0] * &links[1], view.product.instantiate(&values));
        let det = view.product.determinant(100).unwrap().eval(&values);
        assert_eq!(det, crate::linalg::determinant(&view.product.instantiate(&values)).unwrap());
    }

    #[test]
    fn monomial_cap_is_reported() {
        let view = symbolic_view(&MatrixClass::Interval(Grid::filled(3, 3, IntervalEntry::positive()))).unwrap();
        assert!(matches!(
            view.matrix().determinant(2),
            Err(Error::CapExceeded { what: "monomials", .. })
        ));
        assert_eq!(view.matrix().determinant(10).unwrap().len(), 6);
    }
}
