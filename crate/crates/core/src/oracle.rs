//! Randomized search for singular class members.
//!
//! Each trial draws every free parameter of the class as a small rational,
//! picks one parameter and solves `det [Z; A'·B̂] = 0` for it (the determinant
//! is affine in any single parameter). Candidates are screened in `f64` and
//! confirmed in exact arithmetic, so every returned witness is exact.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classes::{scaling_of, Grid, IntervalEntry, Link, MatrixClass};
use crate::error::{Error, Result};
use crate::injectivity::{assemble_witness, folded_left, Problem, SingularWitness};
use crate::linalg::{determinant, int, kernel_basis, primitive, Matrix, Rational};
use crate::signs::{Sign, SignSet};

#[derive(Clone, Debug, PartialEq)]
pub struct OracleConfig {
    pub trials: u64,
    pub seed: u64,
    /// Largest magnitude drawn for unbounded parameters.
    pub magnitude: u32,
    /// Relative slack of the floating-point screen.
    pub tolerance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            trials: 100_000,
            seed: 0x5eed_0f_1a2b,
            magnitude: 4,
            tolerance: 1e-9,
        }
    }
}

impl OracleConfig {
    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidInput("oracle trials must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidInput("oracle tolerance must be positive".into()));
        }
        if self.magnitude == 0 {
            return Err(Error::InvalidInput("oracle magnitude must be positive".into()));
        }
        Ok(())
    }
}

const MAX_DEN: i64 = 6;

/// Range of `t = j/q` fed into `a + b·t`.
#[derive(Clone, Copy, Debug)]
enum Span {
    /// `t ∈ [0, 1]`, ends included when flagged.
    Unit { lo: bool, hi: bool },
    /// `t ∈ [0, magnitude]`, zero included when flagged.
    Ray { zero: bool },
    Fixed,
}

#[derive(Clone, Debug)]
struct Choice {
    a: Rational,
    b: Rational,
    af: f64,
    bf: f64,
    span: Span,
}

impl Choice {
    fn new(a: Rational, b: Rational, span: Span) -> Self {
        Choice {
            af: a.to_f64().unwrap_or(f64::NAN),
            bf: b.to_f64().unwrap_or(f64::NAN),
            a,
            b,
            span,
        }
    }
}

/// Where one free parameter lives.
#[derive(Clone, Debug)]
enum Domain {
    Signs(SignSet),
    Interval(IntervalEntry),
    Positive,
}

impl Domain {
    fn is_point(&self) -> bool {
        match self {
            Domain::Signs(s) => *s == SignSet::ZERO,
            Domain::Interval(e) => e.as_point().is_some(),
            Domain::Positive => false,
        }
    }

    fn contains(&self, x: &Rational) -> bool {
        match self {
            Domain::Signs(s) => s.contains(Sign::of(x)),
            Domain::Interval(e) => e.contains(x),
            Domain::Positive => x.is_positive(),
        }
    }

    /// Floating-point screen: closed ends get `slack` of room, open ends must
    /// be cleared by `slack`.
    fn roughly_contains(&self, x: f64, tol: f64) -> bool {
        if !x.is_finite() {
            return false;
        }
        let slack = tol * x.abs().max(1.0);
        let above = |l: f64, open: bool| if open { x > l + slack } else { x >= l - slack };
        let below = |u: f64, open: bool| if open { x < u - slack } else { x <= u + slack };
        match self {
            Domain::Signs(s) => s.iter().any(|sg| match sg {
                Sign::Pos => above(0.0, true),
                Sign::Neg => below(0.0, true),
                Sign::Zero => x.abs() <= slack,
            }),
            Domain::Interval(e) => {
                let f = |v: &Rational| v.to_f64().unwrap_or(f64::NAN);
                let inside = e.lower().is_none_or(|l| above(f(l), e.lower_open()))
                    && e.upper().is_none_or(|u| below(f(u), e.upper_open()));
                inside && !(e.is_punctured() && x.abs() <= slack)
            }
            Domain::Positive => above(0.0, true),
        }
    }

    fn choices(&self) -> Vec<Choice> {
        let one = || int(1);
        let zero = Rational::zero;
        match self {
            Domain::Positive => vec![Choice::new(zero(), one(), Span::Ray { zero: false })],
            Domain::Signs(s) => s
                .iter()
                .map(|sg| match sg {
                    Sign::Zero => Choice::new(zero(), zero(), Span::Fixed),
                    sg => Choice::new(zero(), int(sg.as_i64()), Span::Ray { zero: false }),
                })
                .collect(),
            Domain::Interval(e) => e
                .pieces()
                .iter()
                .flat_map(|p| match (p.lower(), p.upper()) {
                    (Some(l), Some(u)) if l == u => vec![Choice::new(l.clone(), zero(), Span::Fixed)],
                    (Some(l), Some(u)) => vec![Choice::new(
                        l.clone(),
                        u - l,
                        Span::Unit {
                            lo: !p.lower_open(),
                            hi: !p.upper_open(),
                        },
                    )],
                    (Some(l), None) => vec![Choice::new(l.clone(), one(), Span::Ray { zero: !p.lower_open() })],
                    (None, Some(u)) => vec![Choice::new(u.clone(), int(-1), Span::Ray { zero: !p.upper_open() })],
                    (None, None) => vec![
                        Choice::new(zero(), one(), Span::Ray { zero: true }),
                        Choice::new(zero(), int(-1), Span::Ray { zero: false }),
                    ],
                })
                .collect(),
        }
    }
}

/// A drawn parameter value: `a + b·j/q` of one of its domain's choices, or
/// an explicit rational.
#[derive(Clone, Debug)]
enum Code {
    Drawn { choice: usize, j: i64, q: i64 },
    Exact(Rational),
}

#[derive(Clone, Debug)]
struct Value {
    f: f64,
    code: Code,
}

impl Value {
    fn exact(x: Rational) -> Self {
        Value {
            f: x.to_f64().unwrap_or(f64::NAN),
            code: Code::Exact(x),
        }
    }
}

struct Param {
    domain: Domain,
    choices: Vec<Choice>,
}

impl Param {
    fn new(domain: Domain) -> Self {
        Param {
            choices: domain.choices(),
            domain,
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng, magnitude: i64) -> Value {
        let k = rng.gen_range(0..self.choices.len());
        let c = &self.choices[k];
        let (j, q) = match c.span {
            Span::Fixed => (0, 1),
            Span::Unit { lo, hi } => {
                let q = rng.gen_range(2..=MAX_DEN);
                let jlo = if lo { 0 } else { 1 };
                let jhi = if hi { q } else { q - 1 };
                (rng.gen_range(jlo..=jhi), q)
            }
            Span::Ray { zero } => {
                let q = rng.gen_range(1..=MAX_DEN);
                let jlo = if zero { 0 } else { 1 };
                (rng.gen_range(jlo..=magnitude * q), q)
            }
        };
        Value {
            f: c.af + c.bf * (j as f64) / (q as f64),
            code: Code::Drawn { choice: k, j, q },
        }
    }

    fn exact(&self, v: &Value) -> Rational {
        match &v.code {
            Code::Exact(x) => x.clone(),
            Code::Drawn { choice, j, q } => {
                let c = &self.choices[*choice];
                &c.a + &c.b * Rational::new((*j).into(), (*q).into())
            }
        }
    }
}

/// One factor of the chain with its free parameters.
enum Slotted {
    Fixed(Matrix, Vec<f64>),
    Grid { rows: usize, cols: usize, params: Vec<Param> },
    /// `diag(κ)·B·diag(λ)`; parameters are `κ` then `λ`.
    Scaled(Matrix, Vec<f64>),
}

impl Slotted {
    fn of(link: &Link<'_>) -> Self {
        match link {
            Link::Fixed(m) => Slotted::Fixed((*m).clone(), m.to_f64()),
            Link::Class(MatrixClass::Scaled(b)) => Slotted::Scaled(b.clone(), b.to_f64()),
            Link::Class(c) => {
                let domains: Grid<Domain> = match c {
                    MatrixClass::SignPattern(g) => g.map(|&s| Domain::Signs(SignSet::singleton(s))),
                    MatrixClass::SignSets(g) => g.map(|&s| Domain::Signs(s)),
                    MatrixClass::Interval(g) => g.map(|e| Domain::Interval(e.clone())),
                    _ => unreachable!("chains contain atoms only"),
                };
                Slotted::Grid {
                    rows: domains.rows(),
                    cols: domains.cols(),
                    params: domains.entries().iter().cloned().map(Param::new).collect(),
                }
            }
        }
    }

    fn params(&self) -> Vec<Param> {
        match self {
            Slotted::Fixed(..) => Vec::new(),
            Slotted::Grid { params, .. } => params.iter().map(|p| Param::new(p.domain.clone())).collect(),
            Slotted::Scaled(b, _) => (0..b.rows() + b.cols()).map(|_| Param::new(Domain::Positive)).collect(),
        }
    }

    fn shape(&self) -> (usize, usize) {
        match self {
            Slotted::Fixed(m, _) | Slotted::Scaled(m, _) => (m.rows(), m.cols()),
            Slotted::Grid { rows, cols, .. } => (*rows, *cols),
        }
    }

    fn write_f64(&self, vals: &[Value], out: &mut Vec<f64>) {
        out.clear();
        match self {
            Slotted::Fixed(_, f) => out.extend_from_slice(f),
            Slotted::Grid { .. } => out.extend(vals.iter().map(|v| v.f)),
            Slotted::Scaled(b, f) => {
                let (r, c) = (b.rows(), b.cols());
                out.extend_from_slice(f);
                for i in 0..r {
                    for j in 0..c {
                        out[i * c + j] *= vals[i].f * vals[r + j].f;
                    }
                }
            }
        }
    }

    fn to_exact(&self, params: &[Param], vals: &[Value]) -> Matrix {
        match self {
            Slotted::Fixed(m, _) => m.clone(),
            Slotted::Grid { rows, cols, .. } => {
                let data = params.iter().zip(vals).map(|(p, v)| p.exact(v)).collect();
                Matrix::from_row_major(*rows, *cols, data).expect("shape")
            }
            Slotted::Scaled(b, _) => {
                let (r, c) = (b.rows(), b.cols());
                let ex: Vec<Rational> = params.iter().zip(vals).map(|(p, v)| p.exact(v)).collect();
                let mut out = b.clone();
                for i in 0..r {
                    for j in 0..c {
                        out[(i, j)] = &b[(i, j)] * &ex[i] * &ex[r + j];
                    }
                }
                out
            }
        }
    }
}

fn mat_mul_f64(a: &[f64], ar: usize, ac: usize, b: &[f64], bc: usize, out: &mut Vec<f64>) {
    out.clear();
    out.resize(ar * bc, 0.0);
    for i in 0..ar {
        for k in 0..ac {
            let x = a[i * ac + k];
            if x == 0.0 {
                continue;
            }
            for j in 0..bc {
                out[i * bc + j] += x * b[k * bc + j];
            }
        }
    }
}

fn det_f64(m: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| m[i * n + c].abs().total_cmp(&m[j * n + c].abs()))
            .expect("non-empty");
        if m[p * n + c] == 0.0 {
            return 0.0;
        }
        if p != c {
            for j in 0..n {
                m.swap(p * n + j, c * n + j);
            }
            det = -det;
        }
        let piv = m[c * n + c];
        det *= piv;
        for i in c + 1..n {
            let f = m[i * n + c] / piv;
            if f != 0.0 {
                for j in c..n {
                    m[i * n + j] -= f * m[c * n + j];
                }
            }
        }
    }
    det
}

/// Buffers reused across trials.
#[derive(Default)]
struct Scratch {
    acc: Vec<f64>,
    tmp: Vec<f64>,
    factor: Vec<f64>,
    square: Vec<f64>,
    rows: Vec<usize>,
}

/// The search space of a problem: `[Z; A'·F₁⋯F_k]` with free parameters in
/// the class factors.
struct Layout<'p> {
    problem: &'p Problem,
    zk: Matrix,
    zk_f: Vec<f64>,
    left: Option<(Matrix, Vec<f64>)>,
    factors: Vec<Slotted>,
    params: Vec<Vec<Param>>,
    /// `(factor, parameter)` pairs that can be solved for.
    slots: Vec<(usize, usize)>,
    n: usize,
}

impl<'p> Layout<'p> {
    fn new(problem: &'p Problem) -> Result<Self> {
        problem.validate()?;
        let chain = problem.class.chain()?;
        let factors: Vec<Slotted> = chain.iter().map(Slotted::of).collect();
        let params: Vec<Vec<Param>> = factors.iter().map(Slotted::params).collect();
        let slots = params
            .iter()
            .enumerate()
            .flat_map(|(f, ps)| {
                ps.iter()
                    .enumerate()
                    .filter(|(_, p)| !p.domain.is_point())
                    .map(move |(k, _)| (f, k))
            })
            .collect();
        let zk = problem.subspace.kernel_rep().clone();
        let left = folded_left(problem).map(|a| {
            let f = a.to_f64();
            (a, f)
        });
        Ok(Layout {
            problem,
            zk_f: zk.to_f64(),
            zk,
            left,
            factors,
            params,
            slots,
            n: problem.subspace.ambient_dim(),
        })
    }

    fn product_rows(&self) -> usize {
        match &self.left {
            Some((a, _)) => a.rows(),
            None => self.factors[0].shape().0,
        }
    }

    fn draw(&self, rng: &mut ChaCha8Rng, magnitude: i64) -> Vec<Vec<Value>> {
        self.params
            .iter()
            .map(|ps| ps.iter().map(|p| p.draw(rng, magnitude)).collect())
            .collect()
    }

    fn redraw(&self, rng: &mut ChaCha8Rng, magnitude: i64, vals: &mut [Vec<Value>]) {
        for (ps, vs) in self.params.iter().zip(vals.iter_mut()) {
            for (p, v) in ps.iter().zip(vs.iter_mut()) {
                *v = p.draw(rng, magnitude);
            }
        }
    }

    /// Determinant of `Z` stacked over `rows` of `A'·F₁⋯F_k`, in floating point.
    fn square_det_f64(&self, vals: &[Vec<Value>], rows: &[usize], sc: &mut Scratch) -> f64 {
        let first = usize::from(self.left.is_none());
        let (r, mut c) = match &self.left {
            Some((a, f)) => {
                sc.acc.clear();
                sc.acc.extend_from_slice(f);
                (a.rows(), a.cols())
            }
            None => {
                self.factors[0].write_f64(&vals[0], &mut sc.acc);
                self.factors[0].shape()
            }
        };
        for (f, v) in self.factors.iter().zip(vals).skip(first) {
            let fc = f.shape().1;
            f.write_f64(v, &mut sc.factor);
            mat_mul_f64(&sc.acc, r, c, &sc.factor, fc, &mut sc.tmp);
            core::mem::swap(&mut sc.acc, &mut sc.tmp);
            c = fc;
        }
        let n = self.n;
        sc.square.clear();
        sc.square.extend_from_slice(&self.zk_f);
        for &i in rows {
            sc.square.extend_from_slice(&sc.acc[i * n..(i + 1) * n]);
        }
        det_f64(&mut sc.square, n)
    }

    fn exact_factors(&self, vals: &[Vec<Value>]) -> Vec<Matrix> {
        self.factors
            .iter()
            .zip(&self.params)
            .zip(vals)
            .map(|((f, p), v)| f.to_exact(p, v))
            .collect()
    }

    fn stacked_exact(&self, factors: &[Matrix]) -> Result<Matrix> {
        let mut acc = match &self.left {
            Some((a, _)) => a.clone(),
            None => factors[0].clone(),
        };
        let start = usize::from(self.left.is_none());
        for f in &factors[start..] {
            acc = acc.checked_mul(f)?;
        }
        self.zk.stack(&acc)
    }

    fn square_exact(&self, m: &Matrix, rows: &[usize]) -> Matrix {
        let mut idx: Vec<usize> = (0..self.zk.rows()).collect();
        idx.extend(rows.iter().map(|r| r + self.zk.rows()));
        m.select_rows(&idx)
    }

    /// A verified witness from exact factors, when `[Z; A'·B̂]` is singular.
    fn confirm(&self, factors: Vec<Matrix>) -> Result<Option<SingularWitness>> {
        let m = self.stacked_exact(&factors)?;
        let k = kernel_basis(&m);
        if k.cols() == 0 {
            return Ok(None);
        }
        let z = primitive(&k.column(0));
        match assemble_witness(self.problem, factors, z) {
            Ok(w) => Ok(Some(w)),
            Err(Error::WitnessRejected(_)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// One trial: solve for a random slot so that a random square row
    /// selection of `[Z; A'·B̂]` is singular, then confirm exactly.
    fn trial(
        &self,
        rng: &mut ChaCha8Rng,
        vals: &mut [Vec<Value>],
        tol: f64,
        sc: &mut Scratch,
    ) -> Result<Option<SingularWitness>> {
        let need = self.n - self.zk.rows();
        let prows = self.product_rows();
        if prows < need || self.slots.is_empty() {
            return self.confirm(self.exact_factors(vals));
        }
        let mut rows = core::mem::take(&mut sc.rows);
        rows.clear();
        rows.extend(0..prows);
        if prows > need {
            rows.shuffle(rng);
            rows.truncate(need);
            rows.sort_unstable();
        }
        let out = self.solve_slot(rng, vals, &rows, tol, sc);
        sc.rows = rows;
        out
    }

    fn solve_slot(
        &self,
        rng: &mut ChaCha8Rng,
        vals: &mut [Vec<Value>],
        rows: &[usize],
        tol: f64,
        sc: &mut Scratch,
    ) -> Result<Option<SingularWitness>> {
        let (f, k) = self.slots[rng.gen_range(0..self.slots.len())];
        vals[f][k].f = 0.0;
        let d0 = self.square_det_f64(vals, rows, sc);
        vals[f][k].f = 1.0;
        let d1 = self.square_det_f64(vals, rows, sc);
        let scale = d0.abs().max(d1.abs());
        if !(scale > 0.0) || (d1 - d0).abs() <= tol * scale {
            return Ok(None);
        }
        let xf = d0 / (d0 - d1);
        let param = &self.params[f][k];
        if !param.domain.roughly_contains(xf, tol) {
            return Ok(None);
        }
        let exact_det = |vals: &mut [Vec<Value>], x: Rational| -> Result<Rational> {
            vals[f][k] = Value::exact(x);
            let m = self.stacked_exact(&self.exact_factors(vals))?;
            determinant(&self.square_exact(&m, rows))
        };
        let e0 = exact_det(vals, Rational::zero())?;
        let e1 = exact_det(vals, int(1))?;
        if e0 == e1 {
            return Ok(None);
        }
        let x = &e0 / (&e0 - &e1);
        if !param.domain.contains(&x) {
            return Ok(None);
        }
        vals[f][k] = Value::exact(x);
        self.confirm(self.exact_factors(vals))
    }
}

/// An exact member of an atomic, product or augmented class.
pub fn sample_class(class: &MatrixClass, cfg: &OracleConfig) -> Result<Matrix> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    sample_with(class, cfg, &mut rng)
}

fn sample_with(class: &MatrixClass, cfg: &OracleConfig, rng: &mut ChaCha8Rng) -> Result<Matrix> {
    if let MatrixClass::Augmented(z, inner) = class {
        return z.stack(&sample_with(inner, cfg, rng)?);
    }
    let chain = class.chain()?;
    let mut acc: Option<Matrix> = None;
    for link in &chain {
        let s = Slotted::of(link);
        let params = s.params();
        let vals: Vec<Value> = params.iter().map(|p| p.draw(rng, i64::from(cfg.magnitude))).collect();
        let m = s.to_exact(&params, &vals);
        acc = Some(match acc {
            Some(a) => a.checked_mul(&m)?,
            None => m,
        });
    }
    Ok(acc.expect("chains are non-empty"))
}

/// Randomized search for a singular member with a kernel vector in `S`.
pub fn falsify(problem: &Problem, cfg: &OracleConfig) -> Result<Option<SingularWitness>> {
    cfg.validate()?;
    let layout = Layout::new(problem)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let magnitude = i64::from(cfg.magnitude);
    let mut sc = Scratch::default();
    let mut vals = layout.draw(&mut rng, magnitude);
    for t in 0..cfg.trials {
        if t > 0 {
            layout.redraw(&mut rng, magnitude, &mut vals);
        }
        if let Some(w) = layout.trial(&mut rng, &mut vals, cfg.tolerance, &mut sc)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// [`falsify`] with draws concentrated around the factors of `near`:
/// free parameters are scaled by `1 + δu` with `u ∈ [−1/2, 1/2]` and `δ`
/// shrinking from `1/2` as trials proceed, keeping the original value when
/// the perturbed one leaves its domain.
pub fn falsify_near(problem: &Problem, near: &SingularWitness, cfg: &OracleConfig) -> Result<Option<SingularWitness>> {
    cfg.validate()?;
    let layout = Layout::new(problem)?;
    let offset = usize::from(problem.left.is_some());
    if near.factors.len() != layout.factors.len() + offset {
        return Err(Error::InvalidInput("witness factors do not match the problem".into()));
    }
    let mut base: Vec<Vec<Value>> = Vec::with_capacity(layout.factors.len());
    for (f, m) in layout.factors.iter().zip(&near.factors[offset..]) {
        base.push(match f {
            Slotted::Fixed(..) => Vec::new(),
            Slotted::Grid { .. } => m.data().iter().cloned().map(Value::exact).collect(),
            Slotted::Scaled(b, _) => {
                let (k, l) = scaling_of(b, m)
                    .ok_or_else(|| Error::InvalidInput("witness factor is not a scaling".into()))?;
                k.into_iter().chain(l).map(Value::exact).collect()
            }
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut sc = Scratch::default();
    for t in 0..cfg.trials {
        let mut vals = base.clone();
        let delta = Rational::new(1.into(), (2i64 << (t % 16)).into());
        for (ps, vs) in layout.params.iter().zip(vals.iter_mut()) {
            for (p, v) in ps.iter().zip(vs.iter_mut()) {
                if p.domain.is_point() || !rng.gen_bool(0.5) {
                    continue;
                }
                let u = Rational::new(rng.gen_range(-6i64..=6).into(), 12.into());
                let x = p.exact(v) * (int(1) + &delta * u);
                if p.domain.contains(&x) {
                    *v = Value::exact(x);
                }
            }
        }
        if let Some(w) = layout.trial(&mut rng, &mut vals, cfg.tolerance, &mut sc)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::injectivity::verify_witness;
    use crate::linalg::Subspace;

    fn cfg(trials: u64) -> OracleConfig {
        OracleConfig {
            trials,
            ..OracleConfig::default()
        }
    }

    #[test]
    fn samples_are_members() {
        let pat = MatrixClass::SignPattern(
            Grid::from_rows(vec![vec![Sign::Pos, Sign::Zero], vec![Sign::Pos, Sign::Pos]]).unwrap(),
        );
        let unit = MatrixClass::Interval(
            Grid::from_rows(vec![vec![IntervalEntry::open(int(0), int(1)).unwrap()]]).unwrap(),
        );
        let scaled = MatrixClass::Scaled(Matrix::from_ints(&[&[1, 1], &[2, 1]]));
        for seed in 0..50 {
            let c = OracleConfig { seed, ..cfg(1) };
            for class in [&pat, &unit, &scaled] {
                let m = sample_class(class, &c).unwrap();
                assert!(class.contains(&m).unwrap(), "{m}");
            }
        }
    }

    #[test]
    fn finds_the_rank_one_member_of_the_positive_box() {
        let pos = IntervalEntry::positive();
        let d = Grid::filled(2, 2, pos);
        let p = Problem::new(MatrixClass::Interval(d), Subspace::full(2));
        let w = falsify(&p, &cfg(1_000)).unwrap().expect("witness");
        assert!(verify_witness(&p, &w));
    }

    #[test]
    fn no_witness_for_a_nonsingular_scaled_class() {
        let b = Matrix::from_ints(&[&[1, 1], &[2, 1]]);
        let p = Problem::new(MatrixClass::Scaled(b), Subspace::full(2));
        assert!(falsify(&p, &cfg(20_000)).unwrap().is_none());
    }

    #[test]
    fn identical_seeds_give_identical_witnesses() {
        let d = Grid::filled(2, 3, IntervalEntry::real_line());
        let p = Problem::new(MatrixClass::Interval(d), Subspace::from_kernel(&Matrix::from_ints(&[&[1, 1, 1]])));
        let a = falsify(&p, &cfg(100)).unwrap();
        let b = falsify(&p, &cfg(100)).unwrap();
        assert!(a.is_some());
        assert_eq!(a, b);
        assert_eq!(a.unwrap().z.len(), 3);
    }

    #[test]
    fn rejects_bad_configs() {
        let p = Problem::new(MatrixClass::Scaled(Matrix::identity(1)), Subspace::full(1));
        assert!(falsify(&p, &cfg(0)).is_err());
        let bad = OracleConfig { tolerance: 0.0, ..cfg(1) };
        assert!(falsify(&p, &bad).is_err());
    }
}
