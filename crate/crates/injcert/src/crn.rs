//! Reaction-network text files.
//!
//! ```text
//! # comment
//! species A B C                 # optional; fixes the species order
//! r1: A + B -> C                # optional label
//! 2 A <-> B                     # reversible: two reactions, R2 and R2_rev
//! A -> B : orders A=1/2         # power-law orders; unlisted species get 0
//! influence r1 0+ 0+ 0          # overrides one row of the influence matrix
//! ```
//!
//! Species are numbered in order of first appearance. An empty side, `0`
//! or `∅` denotes no species.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use injcert_core::classes::Grid;
use injcert_core::{Matrix, MatrixClass, Problem, Rational, SignSet, Subspace};
use num_traits::{One, Signed, Zero};

use crate::error::ParseError;
use crate::formats::{content_lines, format_rational, parse_rational, tokens};

/// How reaction rates depend on concentrations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KineticsMode {
    /// Orders equal reactant stoichiometry.
    MassAction,
    /// Orders given per reaction.
    PowerLaw,
    /// Rates strictly increasing in every reactant.
    MonotonicStrict,
    /// Rates non-decreasing in every reactant.
    MonotonicWeak,
}

impl KineticsMode {
    pub fn name(self) -> &'static str {
        match self {
            KineticsMode::MassAction => "MASS_ACTION",
            KineticsMode::PowerLaw => "POWER_LAW",
            KineticsMode::MonotonicStrict => "MONOTONIC_STRICT",
            KineticsMode::MonotonicWeak => "MONOTONIC_WEAK",
        }
    }

    fn is_monotonic(self) -> bool {
        matches!(self, KineticsMode::MonotonicStrict | KineticsMode::MonotonicWeak)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reaction {
    pub label: String,
    /// Indexed by species.
    pub reactants: Vec<Rational>,
    pub products: Vec<Rational>,
    pub orders: Option<Vec<Rational>>,
    pub influence: Option<Vec<SignSet>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    pub species: Vec<String>,
    pub reactions: Vec<Reaction>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("the network has no dynamics: its stoichiometric matrix is zero")]
    NoDynamics,
    #[error("{mode} needs kinetic orders on every reaction; {label} has none")]
    MissingOrders { mode: &'static str, label: String },
    #[error("{mode} does not use kinetic orders, but {label} declares them")]
    UnexpectedOrders { mode: &'static str, label: String },
    #[error("{mode} has no influence matrix, but {label} overrides a row")]
    UnexpectedInfluence { mode: &'static str, label: String },
    #[error(transparent)]
    Core(#[from] injcert_core::Error),
}

impl Network {
    /// `A`: species by reactions, column `j` = products − reactants of reaction `j`.
    pub fn stoichiometric_matrix(&self) -> Matrix {
        let (n, r) = (self.species.len(), self.reactions.len());
        let mut a = Matrix::zeros(n, r);
        for (j, rx) in self.reactions.iter().enumerate() {
            for i in 0..n {
                a[(i, j)] = &rx.products[i] - &rx.reactants[i];
            }
        }
        a
    }

    /// Reactions by species.
    pub fn reactant_matrix(&self) -> Matrix {
        rows_matrix(self.species.len(), self.reactions.iter().map(|r| r.reactants.clone()))
    }

    /// Declared orders, falling back to reactant stoichiometry.
    pub fn kinetic_order_matrix(&self) -> Matrix {
        rows_matrix(
            self.species.len(),
            self.reactions
                .iter()
                .map(|r| r.orders.clone().unwrap_or_else(|| r.reactants.clone())),
        )
    }

    /// `{+}` (strict) or `{0,+}` (weak) where a reactant appears, `{0}`
    /// elsewhere, with row overrides applied last.
    pub fn influence_matrix(&self, weak: bool) -> Grid<SignSet> {
        let hit = if weak { SignSet::NONNEG } else { SignSet::POS };
        let rows = self
            .reactions
            .iter()
            .map(|r| match &r.influence {
                Some(row) => row.clone(),
                None => r
                    .reactants
                    .iter()
                    .map(|s| if s.is_positive() { hit } else { SignSet::ZERO })
                    .collect(),
            })
            .collect();
        Grid::from_rows(rows).expect("rows have one entry per species")
    }
}

fn rows_matrix(cols: usize, rows: impl Iterator<Item = Vec<Rational>>) -> Matrix {
    let data: Vec<Rational> = rows.flatten().collect();
    let r = if cols == 0 { 0 } else { data.len() / cols };
    Matrix::from_row_major(r, cols, data).expect("rows have one entry per species")
}

/// The injectivity problem of the network: `S = im(A)`, left matrix `A`,
/// and the class of rate Jacobians on the open positive orthant.
pub fn build_problem(net: &Network, mode: KineticsMode) -> Result<Problem, BuildError> {
    let a = net.stoichiometric_matrix();
    if a.is_zero() {
        return Err(BuildError::NoDynamics);
    }
    for r in &net.reactions {
        let label = || r.label.clone();
        match (mode, &r.orders) {
            (KineticsMode::PowerLaw, None) => {
                return Err(BuildError::MissingOrders { mode: mode.name(), label: label() })
            }
            (KineticsMode::PowerLaw, Some(_)) => {}
            (_, Some(_)) => return Err(BuildError::UnexpectedOrders { mode: mode.name(), label: label() }),
            (_, None) => {}
        }
        if r.influence.is_some() && !mode.is_monotonic() {
            return Err(BuildError::UnexpectedInfluence { mode: mode.name(), label: label() });
        }
    }
    let class = match mode {
        KineticsMode::MassAction => MatrixClass::Scaled(net.reactant_matrix()),
        KineticsMode::PowerLaw => MatrixClass::Scaled(net.kinetic_order_matrix()),
        KineticsMode::MonotonicStrict => MatrixClass::SignSets(net.influence_matrix(false)),
        KineticsMode::MonotonicWeak => MatrixClass::SignSets(net.influence_matrix(true)),
    };
    let problem = Problem::new(class, Subspace::from_image(&a)).with_left(a);
    problem.validate()?;
    Ok(problem)
}

struct Builder {
    species: Vec<String>,
    index: BTreeMap<String, usize>,
    reactions: Vec<Draft>,
    labels: BTreeSet<String>,
    influences: Vec<(usize, usize, String, Vec<(usize, SignSet)>)>,
    lines_seen: usize,
}

struct Draft {
    label: String,
    reactants: BTreeMap<usize, Rational>,
    products: BTreeMap<usize, Rational>,
    orders: Option<BTreeMap<usize, Rational>>,
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_alphabetic() || c == '_') && cs.all(|c| c.is_alphanumeric() || c == '_')
}

fn col_of(line: &str, sub: &str) -> usize {
    let offset = sub.as_ptr() as usize - line.as_ptr() as usize;
    line[..offset].chars().count() + 1
}

impl Builder {
    fn species_id(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.species.push(name.to_string());
        self.index.insert(name.to_string(), self.species.len() - 1);
        self.species.len() - 1
    }

    fn side(&mut self, line: usize, text: &str, body: &str) -> Result<BTreeMap<usize, Rational>, ParseError> {
        let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
        let trimmed = body.trim();
        if trimmed.is_empty() || trimmed == "0" || trimmed == "∅" {
            return Ok(out);
        }
        for term in body.split('+') {
            let t = term.trim();
            let col = col_of(text, term) + (term.len() - term.trim_start().len());
            if t.is_empty() {
                return Err(ParseError::new(line, col, "empty term"));
            }
            if t.starts_with('-') {
                return Err(ParseError::new(line, col, "negative stoichiometry"));
            }
            let split = t.find(|c: char| !(c.is_ascii_digit() || c == '.' || c == '/')).unwrap_or(t.len());
            let (coef, name) = (&t[..split], t[split..].trim());
            let c = if coef.is_empty() {
                Rational::one()
            } else {
                parse_rational(coef).map_err(|m| ParseError::new(line, col, m))?
            };
            if !is_ident(name) {
                return Err(ParseError::new(line, col, format!("invalid species {name:?}")));
            }
            let id = self.species_id(name);
            *out.entry(id).or_insert_with(Rational::zero) += c;
        }
        Ok(out)
    }

    fn orders(&mut self, line: usize, text: &str, body: &str) -> Result<BTreeMap<usize, Rational>, ParseError> {
        let toks: Vec<(usize, &str)> = tokens(body).map(|(c, t)| (c + col_of(text, body) - 1, t)).collect();
        let Some(&(kw_col, kw)) = toks.first() else {
            return Err(ParseError::new(line, col_of(text, body), "expected `orders` after `:`"));
        };
        if kw != "orders" {
            return Err(ParseError::new(line, kw_col, format!("expected `orders`, found {kw:?}")));
        }
        // Re-join the rest so that `A = 1/2` and `A=1/2` read alike.
        let mut items: Vec<(usize, String)> = Vec::new();
        let mut pending_eq = false;
        for &(c, t) in &toks[1..] {
            match items.last_mut() {
                Some((_, last)) if pending_eq || t.starts_with('=') || last.ends_with('=') => {
                    last.push_str(t);
                    pending_eq = false;
                }
                _ => items.push((c, t.to_string())),
            }
            if t == "=" {
                pending_eq = true;
            }
        }
        if items.is_empty() {
            return Err(ParseError::new(line, kw_col, "`orders` needs at least one species=value"));
        }
        let mut out = BTreeMap::new();
        for (c, item) in items {
            let Some((name, value)) = item.split_once('=') else {
                return Err(ParseError::new(line, c, format!("expected species=value, found {item:?}")));
            };
            if !is_ident(name) {
                return Err(ParseError::new(line, c, format!("invalid species {name:?}")));
            }
            let v = parse_rational(value).map_err(|m| ParseError::new(line, c, m))?;
            let id = self.species_id(name);
            if out.insert(id, v).is_some() {
                return Err(ParseError::new(line, c, format!("order of {name} given twice")));
            }
        }
        Ok(out)
    }

    fn add_label(&mut self, line: usize, col: usize, label: String) -> Result<String, ParseError> {
        if !self.labels.insert(label.clone()) {
            return Err(ParseError::new(line, col, format!("duplicate reaction label {label:?}")));
        }
        Ok(label)
    }

    fn reaction(&mut self, line: usize, text: &str) -> Result<(), ParseError> {
        self.lines_seen += 1;
        let (label, label_col, rest) = match text.split_once(':') {
            Some((head, tail)) if !head.contains("->") => {
                let name = head.trim();
                let col = col_of(text, head) + (head.len() - head.trim_start().len());
                if !is_ident(name) {
                    return Err(ParseError::new(line, col, format!("invalid reaction label {name:?}")));
                }
                (name.to_string(), col, tail)
            }
            _ => (format!("R{}", self.lines_seen), 1, text),
        };
        let (arrow, reversible) = match (rest.find("<->"), rest.find("->")) {
            (Some(k), _) => (k, true),
            (None, Some(k)) => (k, false),
            (None, None) => return Err(ParseError::new(line, col_of(text, rest), "expected `->` or `<->`")),
        };
        let lhs = &rest[..arrow];
        let after = &rest[arrow + if reversible { 3 } else { 2 }..];
        let (rhs, orders_text) = match after.split_once(':') {
            Some((r, o)) => (r, Some(o)),
            None => (after, None),
        };
        if rhs.contains("->") {
            return Err(ParseError::new(line, col_of(text, rhs), "more than one arrow"));
        }
        let reactants = self.side(line, text, lhs)?;
        let products = self.side(line, text, rhs)?;
        let orders = match orders_text {
            Some(o) => {
                if reversible {
                    return Err(ParseError::new(
                        line,
                        col_of(text, o),
                        "orders on a reversible reaction; write the two directions separately",
                    ));
                }
                Some(self.orders(line, text, o)?)
            }
            None => None,
        };
        let label = self.add_label(line, label_col, label)?;
        if reversible {
            let back = self.add_label(line, label_col, format!("{label}_rev"))?;
            self.reactions.push(Draft {
                label,
                reactants: reactants.clone(),
                products: products.clone(),
                orders: None,
            });
            self.reactions.push(Draft {
                label: back,
                reactants: products,
                products: reactants,
                orders: None,
            });
        } else {
            self.reactions.push(Draft {
                label,
                reactants,
                products,
                orders,
            });
        }
        Ok(())
    }

    fn influence(&mut self, line: usize, text: &str) -> Result<(), ParseError> {
        let mut toks = tokens(text).skip(1);
        let Some((col, label)) = toks.next() else {
            return Err(ParseError::new(line, 1, "expected a reaction label after `influence`"));
        };
        let row = toks
            .map(|(c, t)| {
                SignSet::from_token(t)
                    .map(|s| (c, s))
                    .ok_or_else(|| ParseError::new(line, c, format!("invalid sign set {t:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.influences.push((line, col, label.to_string(), row));
        Ok(())
    }

    fn finish(self) -> Result<Network, ParseError> {
        let n = self.species.len();
        let dense = |m: &BTreeMap<usize, Rational>| -> Vec<Rational> {
            (0..n).map(|i| m.get(&i).cloned().unwrap_or_else(Rational::zero)).collect()
        };
        let mut reactions: Vec<Reaction> = self
            .reactions
            .iter()
            .map(|d| Reaction {
                label: d.label.clone(),
                reactants: dense(&d.reactants),
                products: dense(&d.products),
                orders: d.orders.as_ref().map(dense),
                influence: None,
            })
            .collect();
        for (line, col, label, row) in self.influences {
            let Some(r) = reactions.iter_mut().find(|r| r.label == label) else {
                return Err(ParseError::new(line, col, format!("unknown reaction label {label:?}")));
            };
            if r.influence.is_some() {
                return Err(ParseError::new(line, col, format!("influence of {label:?} given twice")));
            }
            if row.len() != n {
                return Err(ParseError::new(
                    line,
                    col,
                    format!("influence row has {} entries, expected one per species ({n})", row.len()),
                ));
            }
            r.influence = Some(row.into_iter().map(|(_, s)| s).collect());
        }
        Ok(Network {
            species: self.species,
            reactions,
        })
    }
}

/// Parses the line-oriented network format; errors carry line and column.
pub fn parse_network(text: &str) -> Result<Network, ParseError> {
    let mut b = Builder {
        species: Vec::new(),
        index: BTreeMap::new(),
        reactions: Vec::new(),
        labels: BTreeSet::new(),
        influences: Vec::new(),
        lines_seen: 0,
    };
    for (line, body) in content_lines(text) {
        let first = tokens(body).next().map(|(_, t)| t);
        match first {
            Some("species") if !body.contains("->") => {
                for (col, name) in tokens(body).skip(1) {
                    if !is_ident(name) {
                        return Err(ParseError::new(line, col, format!("invalid species {name:?}")));
                    }
                    if b.index.contains_key(name) {
                        return Err(ParseError::new(line, col, format!("species {name} declared twice")));
                    }
                    b.species_id(name);
                }
            }
            Some("influence") if !body.contains("->") => b.influence(line, body)?,
            _ => b.reaction(line, body)?,
        }
    }
    b.finish()
}

fn side_text(species: &[String], stoich: &[Rational]) -> String {
    let terms: Vec<String> = species
        .iter()
        .zip(stoich)
        .filter(|(_, c)| !c.is_zero())
        .map(|(s, c)| if c.is_one() { s.clone() } else { format!("{} {s}", format_rational(c)) })
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

/// Serializes `net` in the format read by [`parse_network`]; reversible
/// reactions appear as their two directions.
pub fn to_text(net: &Network) -> String {
    let mut out = String::new();
    if !net.species.is_empty() {
        let _ = writeln!(out, "species {}", net.species.join(" "));
    }
    for r in &net.reactions {
        let _ = write!(
            out,
            "{}: {} -> {}",
            r.label,
            side_text(&net.species, &r.reactants),
            side_text(&net.species, &r.products)
        );
        if let Some(orders) = &r.orders {
            let mut items: Vec<String> = net
                .species
                .iter()
                .zip(orders)
                .filter(|(_, o)| !o.is_zero())
                .map(|(s, o)| format!("{s}={}", format_rational(o)))
                .collect();
            if items.is_empty() {
                items.push(format!("{}=0", net.species[0]));
            }
            let _ = write!(out, " : orders {}", items.join(" "));
        }
        out.push('\n');
    }
    for r in &net.reactions {
        if let Some(row) = &r.influence {
            let toks: Vec<&str> = row.iter().map(|s| s.token()).collect();
            let _ = writeln!(out, "influence {} {}", r.label, toks.join(" "));
        }
    }
    out
}
