//! Sign vectors, sign sets and the orthogonality calculus on them.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Mul;
use core::str::FromStr;

use num_traits::{Signed, Zero};

use crate::error::{check_dim, Error, Result};
use crate::linalg::Rational;

/// An element of `{-, 0, +}`. The derived order `- < 0 < +` is the
/// lexicographic order used whenever candidates are enumerated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub const ALL: [Sign; 3] = [Sign::Neg, Sign::Zero, Sign::Pos];

    pub fn of(x: &Rational) -> Sign {
        if x.is_zero() {
            Sign::Zero
        } else if x.is_positive() {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }

    pub fn of_f64(x: f64) -> Sign {
        if x > 0.0 {
            Sign::Pos
        } else if x < 0.0 {
            Sign::Neg
        } else {
            Sign::Zero
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Sign::Neg => '-',
            Sign::Zero => '0',
            Sign::Pos => '+',
        }
    }

    pub fn from_char(c: char) -> Option<Sign> {
        match c {
            '-' => Some(Sign::Neg),
            '0' => Some(Sign::Zero),
            '+' => Some(Sign::Pos),
            _ => None,
        }
    }

    /// `+1`, `0` or `-1`.
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Neg => -1,
            Sign::Zero => 0,
            Sign::Pos => 1,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        match (self, rhs) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Pos,
            _ => Sign::Neg,
        }
    }
}

/// A sign vector `σ(x) ∈ {-,0,+}ⁿ`; its text form is a string over `+-0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignVector(pub Vec<Sign>);

impl SignVector {
    pub fn zero(n: usize) -> Self {
        SignVector(alloc::vec![Sign::Zero; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&s| s == Sign::Zero)
    }

    pub fn as_slice(&self) -> &[Sign] {
        &self.0
    }

    pub fn neg(&self) -> SignVector {
        SignVector(self.0.iter().map(|&s| s * Sign::Neg).collect())
    }

    /// The vector with entries `±1` and `0` realizing this sign vector.
    pub fn unit_representative(&self) -> Vec<Rational> {
        self.0
            .iter()
            .map(|s| Rational::from_integer(s.as_i64().into()))
            .collect()
    }

    /// All `3ⁿ` sign vectors of length `n`, in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = SignVector> {
        let total = 3usize.checked_pow(n as u32).unwrap_or(usize::MAX);
        (0..total).map(move |mut k| {
            let mut v = alloc::vec![Sign::Neg; n];
            for i in (0..n).rev() {
                v[i] = Sign::ALL[k % 3];
                k /= 3;
            }
            SignVector(v)
        })
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for SignVector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| {
                Sign::from_char(c)
                    .ok_or_else(|| Error::InvalidInput(alloc::format!("bad sign character {c:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(SignVector)
    }
}

/// Component-wise sign.
pub fn sigma(x: &[Rational]) -> SignVector {
    SignVector(x.iter().map(Sign::of).collect())
}

pub fn sigma_f64(x: &[f64]) -> SignVector {
    SignVector(x.iter().map(|&v| Sign::of_f64(v)).collect())
}

/// `τ ≤ ρ` component-wise under `0 < -` and `0 < +`.
pub fn sign_leq(tau: &SignVector, rho: &SignVector) -> Result<bool> {
    check_dim("sign vector length", tau.len(), rho.len())?;
    Ok(tau
        .0
        .iter()
        .zip(&rho.0)
        .all(|(&t, &r)| t == Sign::Zero || t == r))
}

/// `τ · ρ = 0`: all products vanish, or both `-` and `+` occur among them.
pub fn sign_orthogonal(tau: &SignVector, rho: &SignVector) -> Result<bool> {
    check_dim("sign vector length", tau.len(), rho.len())?;
    let mut pos = false;
    let mut neg = false;
    for (&t, &r) in tau.0.iter().zip(&rho.0) {
        match t * r {
            Sign::Pos => pos = true,
            Sign::Neg => neg = true,
            Sign::Zero => {}
        }
    }
    Ok(pos == neg)
}

/// A non-empty subset of `{-, 0, +}`, stored as a 3-bit mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignSet(u8);

impl SignSet {
    pub const ZERO: SignSet = SignSet(0b010);
    pub const NEG: SignSet = SignSet(0b001);
    pub const POS: SignSet = SignSet(0b100);
    pub const NONPOS: SignSet = SignSet(0b011);
    pub const NONNEG: SignSet = SignSet(0b110);
    pub const NONZERO: SignSet = SignSet(0b101);
    pub const ANY: SignSet = SignSet(0b111);

    /// The seven sign sets, in the order `0 - + -0 0+ -+ *`.
    pub const ALL: [SignSet; 7] = [
        SignSet::ZERO,
        SignSet::NEG,
        SignSet::POS,
        SignSet::NONPOS,
        SignSet::NONNEG,
        SignSet::NONZERO,
        SignSet::ANY,
    ];

    fn bit(s: Sign) -> u8 {
        match s {
            Sign::Neg => 0b001,
            Sign::Zero => 0b010,
            Sign::Pos => 0b100,
        }
    }

    pub fn singleton(s: Sign) -> SignSet {
        SignSet(Self::bit(s))
    }

    /// `None` for the empty set.
    pub fn from_signs(signs: impl IntoIterator<Item = Sign>) -> Option<SignSet> {
        let mask = signs.into_iter().fold(0, |m, s| m | Self::bit(s));
        (mask != 0).then_some(SignSet(mask))
    }

    pub fn contains(self, s: Sign) -> bool {
        self.0 & Self::bit(s) != 0
    }

    /// Members in the order `-, 0, +`.
    pub fn iter(self) -> impl Iterator<Item = Sign> {
        Sign::ALL.into_iter().filter(move |&s| self.contains(s))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        false
    }

    pub fn as_singleton(self) -> Option<Sign> {
        let mut it = self.iter();
        match (it.next(), it.next()) {
            (Some(s), None) => Some(s),
            _ => None,
        }
    }

    /// File token: one of `0 - + -0 0+ -+ *`.
    pub fn token(self) -> &'static str {
        match self.0 {
            0b010 => "0",
            0b001 => "-",
            0b100 => "+",
            0b011 => "-0",
            0b110 => "0+",
            0b101 => "-+",
            _ => "*",
        }
    }

    /// Accepts `*` or any non-empty combination of `-`, `0`, `+`.
    pub fn from_token(tok: &str) -> Option<SignSet> {
        if tok == "*" {
            return Some(SignSet::ANY);
        }
        let mut mask = 0u8;
        for c in tok.chars() {
            let b = Self::bit(Sign::from_char(c)?);
            if mask & b != 0 {
                return None;
            }
            mask |= b;
        }
        (mask != 0).then_some(SignSet(mask))
    }
}

impl fmt::Display for SignSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// The admissible products `{t·ρ : t ∈ w}` as a sign set.
fn products(w: SignSet, rho: Sign) -> SignSet {
    SignSet::from_signs(w.iter().map(|t| t * rho)).expect("sign sets are non-empty")
}

/// Some `τ ∈ w` with `τ · ρ = 0`, chosen coordinate-wise without enumerating `w`.
pub fn orthogonal_representative(w: &[SignSet], rho: &SignVector) -> Result<Option<SignVector>> {
    check_dim("sign set row length", w.len(), rho.len())?;
    let n = w.len();
    let prods: Vec<SignSet> = w.iter().zip(&rho.0).map(|(&s, &r)| products(s, r)).collect();
    // Pick t in w_i giving product p, preferring the smallest such t.
    let pick = |i: usize, p: Sign| -> Sign {
        w[i].iter()
            .find(|&t| t * rho.0[i] == p)
            .expect("product was reported achievable")
    };
    if prods.iter().all(|p| p.contains(Sign::Zero)) {
        return Ok(Some(SignVector((0..n).map(|i| pick(i, Sign::Zero)).collect())));
    }
    for a in 0..n {
        if !prods[a].contains(Sign::Neg) {
            continue;
        }
        for b in 0..n {
            if b == a || !prods[b].contains(Sign::Pos) {
                continue;
            }
            let tau = (0..n)
                .map(|i| {
                    if i == a {
                        pick(i, Sign::Neg)
                    } else if i == b {
                        pick(i, Sign::Pos)
                    } else {
                        w[i].iter().next().expect("non-empty")
                    }
                })
                .collect();
            return Ok(Some(SignVector(tau)));
        }
    }
    Ok(None)
}

/// `w · ρ = 0`: some `τ` with `τ_i ∈ w_i` is orthogonal to `ρ`.
pub fn signset_row_orthogonal(w: &[SignSet], rho: &SignVector) -> Result<bool> {
    orthogonal_representative(w, rho).map(|t| t.is_some())
}

pub fn format_signset_row(w: &[SignSet]) -> String {
    let mut s = String::new();
    for (i, x) in w.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        s.push_str(x.token());
    }
    s
}
