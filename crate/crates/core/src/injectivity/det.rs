//! Sign analysis of the determinant of a square polynomial matrix.
//!
//! When every parameter ranges over `(0, +∞)` the sign is read off the
//! coefficients. Otherwise the determinant must be affine in each parameter;
//! each parameter is mapped onto `[0, 1]` through a projective substitution
//! that sends the two endpoints of its interval (possibly infinite) to `0`
//! and `1`, and the cleared polynomial is evaluated at the cube vertices.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use super::Caps;
use crate::classes::IntervalEntry;
use crate::error::{Error, Result};
use crate::linalg::{int, rat, Rational};
use crate::signs::Sign;
use crate::symbolic::{Monomial, Param, Poly, SymbolicView};

/// Sign of a determinant over all admissible parameter values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DetSign {
    Pos,
    Neg,
    /// Identically zero.
    Zero,
    /// Takes both signs, or zero without vanishing identically.
    Mixed,
    /// Never zero, but positive on some components and negative on others.
    Nonvanishing,
}

impl DetSign {
    pub fn is_nonvanishing(self) -> bool {
        matches!(self, DetSign::Pos | DetSign::Neg | DetSign::Nonvanishing)
    }

    pub fn name(self) -> &'static str {
        match self {
            DetSign::Pos => "POS",
            DetSign::Neg => "NEG",
            DetSign::Zero => "ZERO",
            DetSign::Mixed => "MIXED",
            DetSign::Nonvanishing => "NONVANISHING",
        }
    }
}

impl fmt::Display for DetSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The determinant as a list of signed monomials over positive parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedMonomialTable {
    pub terms: Vec<(Monomial, Rational)>,
    /// All monomials have the same total degree.
    pub homogeneous: bool,
    /// Every parameter occurs with degree at most one.
    pub multi_affine: bool,
    pub sign: DetSign,
}

/// One vertex of a cell: which end each parameter sits at, the cleared
/// determinant value there, and whether an open end excludes the vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexValue {
    pub at_upper: Vec<bool>,
    pub value: Rational,
    pub excluded: bool,
}

/// A product of connected parameter ranges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexCell {
    pub component: usize,
    pub pieces: Vec<IntervalEntry>,
    pub vertices: Vec<VertexValue>,
    pub sign: DetSign,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexTable {
    pub variables: Vec<Param>,
    pub cells: Vec<VertexCell>,
    pub sign: DetSign,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PositivityTable {
    Monomials(SignedMonomialTable),
    Vertices(VertexTable),
}

impl PositivityTable {
    pub fn sign(&self) -> DetSign {
        match self {
            PositivityTable::Monomials(t) => t.sign,
            PositivityTable::Vertices(t) => t.sign,
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct DetAnalysis {
    pub poly: Poly,
    pub table: PositivityTable,
    /// Some admissible parameter value makes the determinant vanish.
    pub zero_attainable: bool,
}

/// A finite or infinite interval end in homogeneous form `num/den`.
#[derive(Clone, Debug)]
struct End {
    num: Rational,
    den: Rational,
    open: bool,
}

fn ends(piece: &IntervalEntry) -> (End, End) {
    let lo = match piece.lower() {
        Some(a) => End {
            num: a.clone(),
            den: Rational::one(),
            open: piece.lower_open(),
        },
        None => End {
            num: int(-1),
            den: Rational::zero(),
            open: true,
        },
    };
    let hi = match piece.upper() {
        Some(b) => End {
            num: b.clone(),
            den: Rational::one(),
            open: piece.upper_open(),
        },
        None => End {
            num: int(1),
            den: Rational::zero(),
            open: true,
        },
    };
    (lo, hi)
}

/// A multi-affine polynomial indexed by variable position.
struct Affine {
    vars: Vec<Param>,
    terms: Vec<(Vec<bool>, Rational)>,
}

impl Affine {
    fn new(poly: &Poly) -> Self {
        let vars = poly.variables();
        let terms = poly
            .terms()
            .map(|(m, c)| {
                let used = vars.iter().map(|&p| m.degree_in(p) == 1).collect();
                (used, c.clone())
            })
            .collect();
        Affine { vars, terms }
    }

    /// The cleared polynomial at `α ∈ [0,1]^k`.
    fn eval(&self, cell: &[(End, End)], alpha: &[Rational]) -> Rational {
        let mut nums = Vec::with_capacity(alpha.len());
        let mut dens = Vec::with_capacity(alpha.len());
        for ((lo, hi), a) in cell.iter().zip(alpha) {
            let b = Rational::one() - a;
            nums.push(&b * &lo.num + a * &hi.num);
            dens.push(&b * &lo.den + a * &hi.den);
        }
        let mut total = Rational::zero();
        for (used, c) in &self.terms {
            let mut t = c.clone();
            for (k, &u) in used.iter().enumerate() {
                let f = if u { &nums[k] } else { &dens[k] };
                if f.is_zero() {
                    t = Rational::zero();
                    break;
                }
                t *= f;
            }
            total += t;
        }
        total
    }

    fn eval_vertex(&self, cell: &[(End, End)], bits: &[bool]) -> Rational {
        let alpha: Vec<Rational> = bits
            .iter()
            .map(|&b| if b { Rational::one() } else { Rational::zero() })
            .collect();
        self.eval(cell, &alpha)
    }

    fn to_values(&self, cell: &[(End, End)], alpha: &[Rational]) -> BTreeMap<Param, Rational> {
        let mut out = BTreeMap::new();
        for (k, ((lo, hi), a)) in cell.iter().zip(alpha).enumerate() {
            let b = Rational::one() - a;
            let num = &b * &lo.num + a * &hi.num;
            let den = &b * &lo.den + a * &hi.den;
            out.insert(self.vars[k], num / den);
        }
        out
    }
}

fn sign_of_values<'a>(values: impl Iterator<Item = &'a Rational>) -> (bool, bool, bool) {
    let (mut pos, mut neg, mut zero) = (false, false, false);
    for v in values {
        match Sign::of(v) {
            Sign::Pos => pos = true,
            Sign::Neg => neg = true,
            Sign::Zero => zero = true,
        }
    }
    (pos, neg, zero)
}

pub(crate) fn analyse(view: &SymbolicView, caps: &Caps) -> Result<DetAnalysis> {
    let poly = view.matrix().determinant(caps.monomials)?;
    let vars = poly.variables();
    let positive = vars
        .iter()
        .all(|p| view.domains.get(p).is_some_and(IntervalEntry::is_positive_half_line));
    if positive {
        let multi_affine = poly.is_multi_affine();
        let degrees: BTreeSet<u32> = poly
            .terms()
            .map(|(m, _)| m.factors().iter().map(|&(_, e)| e).sum())
            .collect();
        let (pos, neg, _) = sign_of_values(poly.terms().map(|(_, c)| c));
        let sign = match (pos, neg) {
            (false, false) => DetSign::Zero,
            (true, false) => DetSign::Pos,
            (false, true) => DetSign::Neg,
            (true, true) => DetSign::Mixed,
        };
        let zero_attainable = match sign {
            DetSign::Zero => true,
            DetSign::Mixed => multi_affine,
            _ => false,
        };
        let table = SignedMonomialTable {
            terms: poly.terms().map(|(m, c)| (m.clone(), c.clone())).collect(),
            homogeneous: degrees.len() <= 1,
            multi_affine,
            sign,
        };
        return Ok(DetAnalysis {
            poly,
            table: PositivityTable::Monomials(table),
            zero_attainable,
        });
    }
    if !poly.is_multi_affine() {
        return Err(Error::Unsupported(
            "determinant is not affine in each interval parameter".into(),
        ));
    }
    let table = vertex_table(&poly, view, caps)?;
    let zero_attainable = matches!(table.sign, DetSign::Zero | DetSign::Mixed);
    Ok(DetAnalysis {
        poly,
        table: PositivityTable::Vertices(table),
        zero_attainable,
    })
}

/// Cell layouts: punctured parameters pick a component, parameters ranging
/// over the whole line are cut at zero into two closed halves.
fn cell_layouts(vars: &[Param], domains: &BTreeMap<Param, IntervalEntry>) -> Vec<(usize, Vec<IntervalEntry>)> {
    let options: Vec<(bool, Vec<IntervalEntry>)> = vars
        .iter()
        .map(|p| {
            let d = &domains[p];
            if d.is_punctured() {
                (true, d.pieces())
            } else if d.lower().is_none() && d.upper().is_none() {
                let z = Rational::zero();
                (
                    false,
                    vec![
                        IntervalEntry::new(None, true, Some(z.clone()), false).expect("valid"),
                        IntervalEntry::new(Some(z), false, None, true).expect("valid"),
                    ],
                )
            } else {
                (false, vec![d.clone()])
            }
        })
        .collect();
    let mut out = Vec::new();
    let total: usize = options.iter().map(|o| o.1.len()).product();
    for code in 0..total {
        let mut rest = code;
        let mut pieces = Vec::with_capacity(vars.len());
        let mut component = 0;
        for (punct, opts) in options.iter().rev() {
            let pick = rest % opts.len();
            rest /= opts.len();
            if *punct {
                component = component * 2 + pick;
            }
            pieces.push(opts[pick].clone());
        }
        pieces.reverse();
        out.push((component, pieces));
    }
    out.sort_by_key(|(c, _)| *c);
    out
}

fn vertex_bits(v: usize, k: usize) -> Vec<bool> {
    (0..k).map(|i| v >> (k - 1 - i) & 1 == 1).collect()
}

/// Closed-end coordinates of vertex `v` as a bit mask.
fn closed_mask(cell: &[(End, End)], v: usize) -> usize {
    let k = cell.len();
    let mut m = 0;
    for (i, (lo, hi)) in cell.iter().enumerate() {
        let bit = k - 1 - i;
        let open = if v >> bit & 1 == 1 { hi.open } else { lo.open };
        if !open {
            m |= 1 << bit;
        }
    }
    m
}

/// A zero vertex whose closed coordinates span a face of zero vertices.
fn zero_face(cell: &[(End, End)], values: &[Rational]) -> Option<(usize, usize)> {
    let k = cell.len();
    let full = (1usize << k) - 1;
    let mut seen = BTreeSet::new();
    for (v, val) in values.iter().enumerate() {
        if !val.is_zero() {
            continue;
        }
        let fixed = closed_mask(cell, v);
        if !seen.insert((fixed, v & fixed)) {
            continue;
        }
        let free = full & !fixed;
        // Enumerate subsets of the free coordinates.
        let mut sub = free;
        let mut all_zero = true;
        loop {
            if !values[(v & fixed) | sub].is_zero() {
                all_zero = false;
                break;
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & free;
        }
        if all_zero {
            return Some((v, fixed));
        }
    }
    None
}

fn vertex_table(poly: &Poly, view: &SymbolicView, caps: &Caps) -> Result<VertexTable> {
    let aff = Affine::new(poly);
    let k = aff.vars.len();
    let layouts = cell_layouts(&aff.vars, &view.domains);
    let count = (layouts.len() as u128) << k.min(100);
    if k >= 100 || count > caps.vertices {
        return Err(Error::CapExceeded {
            what: "vertices",
            count,
            cap: caps.vertices,
        });
    }
    let mut cells = Vec::with_capacity(layouts.len());
    for (component, pieces) in layouts {
        let geom: Vec<(End, End)> = pieces.iter().map(ends).collect();
        let values: Vec<Rational> = (0..1usize << k)
            .map(|v| aff.eval_vertex(&geom, &vertex_bits(v, k)))
            .collect();
        let (pos, neg, zero) = sign_of_values(values.iter());
        let sign = match (pos, neg, zero) {
            (false, false, _) => DetSign::Zero,
            (true, true, _) => DetSign::Mixed,
            (true, false, false) => DetSign::Pos,
            (false, true, false) => DetSign::Neg,
            (p, _, true) => {
                if zero_face(&geom, &values).is_some() {
                    DetSign::Mixed
                } else if p {
                    DetSign::Pos
                } else {
                    DetSign::Neg
                }
            }
        };
        let vertices = values
            .into_iter()
            .enumerate()
            .map(|(v, value)| VertexValue {
                at_upper: vertex_bits(v, k),
                excluded: closed_mask(&geom, v) != (1 << k) - 1,
                value,
            })
            .collect();
        cells.push(VertexCell {
            component,
            pieces,
            vertices,
            sign,
        });
    }
    let sign = combine(&cells);
    Ok(VertexTable {
        variables: aff.vars,
        cells,
        sign,
    })
}

fn combine(cells: &[VertexCell]) -> DetSign {
    let mut comps: BTreeMap<usize, Vec<DetSign>> = BTreeMap::new();
    for c in cells {
        comps.entry(c.component).or_default().push(c.sign);
    }
    let comp_signs: Vec<DetSign> = comps
        .values()
        .map(|signs| {
            if signs.iter().all(|&s| s == signs[0]) {
                signs[0]
            } else {
                DetSign::Mixed
            }
        })
        .collect();
    if comp_signs.iter().all(|&s| s == DetSign::Zero) {
        DetSign::Zero
    } else if comp_signs.iter().any(|&s| matches!(s, DetSign::Zero | DetSign::Mixed)) {
        DetSign::Mixed
    } else if comp_signs.iter().all(|&s| s == DetSign::Pos) {
        DetSign::Pos
    } else if comp_signs.iter().all(|&s| s == DetSign::Neg) {
        DetSign::Neg
    } else {
        DetSign::Nonvanishing
    }
}

/// Admissible parameter values at which the determinant vanishes.
/// Requires `analysis.zero_attainable`.
pub(crate) fn zero_parameters(analysis: &DetAnalysis) -> Result<BTreeMap<Param, Rational>> {
    let aff = Affine::new(&analysis.poly);
    let k = aff.vars.len();
    let half = rat(1, 2);
    match &analysis.table {
        PositivityTable::Monomials(t) => {
            let geom: Vec<(End, End)> = (0..k).map(|_| ends(&IntervalEntry::positive())).collect();
            if t.sign == DetSign::Zero {
                return Ok(aff.to_values(&geom, &vec![half; k]));
            }
            let pick = |want: Sign| -> Option<Vec<bool>> {
                t.terms.iter().find(|(_, c)| Sign::of(c) == want).map(|(m, _)| {
                    aff.vars.iter().map(|&p| m.degree_in(p) == 1).collect()
                })
            };
            let (Some(up), Some(down)) = (pick(Sign::Pos), pick(Sign::Neg)) else {
                return Err(Error::WitnessRejected("mixed table without both signs".into()));
            };
            let p_plus = inward(&aff, &geom, &up, Sign::Pos)?;
            let p_minus = inward(&aff, &geom, &down, Sign::Neg)?;
            let root = walk(&aff, &geom, p_plus, p_minus)?;
            Ok(aff.to_values(&geom, &root))
        }
        PositivityTable::Vertices(t) => {
            for cell in &t.cells {
                let geom: Vec<(End, End)> = cell.pieces.iter().map(ends).collect();
                let values: Vec<Rational> = cell.vertices.iter().map(|v| v.value.clone()).collect();
                match cell.sign {
                    DetSign::Zero => return Ok(aff.to_values(&geom, &vec![half; k])),
                    DetSign::Mixed => {}
                    _ => continue,
                }
                if let Some((v, fixed)) = zero_face(&geom, &values) {
                    let alpha: Vec<Rational> = (0..k)
                        .map(|i| {
                            let bit = k - 1 - i;
                            if fixed >> bit & 1 == 1 {
                                int((v >> bit & 1) as i64)
                            } else {
                                half.clone()
                            }
                        })
                        .collect();
                    return Ok(aff.to_values(&geom, &alpha));
                }
                let find = |want: Sign| {
                    cell.vertices
                        .iter()
                        .find(|v| Sign::of(&v.value) == want)
                        .map(|v| v.at_upper.clone())
                };
                let (Some(up), Some(down)) = (find(Sign::Pos), find(Sign::Neg)) else {
                    continue;
                };
                let p_plus = inward(&aff, &geom, &up, Sign::Pos)?;
                let p_minus = inward(&aff, &geom, &down, Sign::Neg)?;
                let root = walk(&aff, &geom, p_plus, p_minus)?;
                return Ok(aff.to_values(&geom, &root));
            }
            Err(Error::WitnessRejected(
                "no cell of the vertex table attains zero".into(),
            ))
        }
    }
}

/// Moves a vertex into the open cube until the value has the wanted sign.
fn inward(aff: &Affine, geom: &[(End, End)], bits: &[bool], want: Sign) -> Result<Vec<Rational>> {
    let mut delta = rat(1, 4);
    for _ in 0..256 {
        let alpha: Vec<Rational> = bits
            .iter()
            .map(|&b| if b { Rational::one() - &delta } else { delta.clone() })
            .collect();
        if Sign::of(&aff.eval(geom, &alpha)) == want {
            return Ok(alpha);
        }
        delta /= int(2);
    }
    Err(Error::WitnessRejected(format!(
        "no interior point of sign {} near the vertex",
        want.to_char()
    )))
}

/// Walks from a positive to a negative point one coordinate at a time and
/// returns the exact root on the first segment where the sign changes.
fn walk(aff: &Affine, geom: &[(End, End)], start: Vec<Rational>, end: Vec<Rational>) -> Result<Vec<Rational>> {
    let mut cur = start;
    let mut f_cur = aff.eval(geom, &cur);
    for k in 0..cur.len() {
        if cur[k] == end[k] {
            continue;
        }
        let mut next = cur.clone();
        next[k] = end[k].clone();
        let f_next = aff.eval(geom, &next);
        if f_next.is_zero() {
            return Ok(next);
        }
        if f_next.is_negative() {
            let t = &cur[k] + (&end[k] - &cur[k]) * &f_cur / (&f_cur - &f_next);
            let mut root = cur;
            root[k] = t;
            debug_assert!(aff.eval(geom, &root).is_zero());
            return Ok(root);
        }
        cur = next;
        f_cur = f_next;
    }
    Err(Error::WitnessRejected("path between signed points never crossed zero".into()))
}
