//! JSON verdict reports.
//!
//! Every exact quantity is written as a string (`"-3/2"`); floating-point
//! lift data stays numeric. The `input` section echoes the problem so that a
//! report can be turned back into the problem it answers.

use injcert_core::classes::{Factor, Grid};
use injcert_core::injectivity::{
    Certificate, Diagnostics, MonomialLift, PositivityTable, SingularWitness, VertexTable,
};
use injcert_core::{IntervalEntry, Matrix, MatrixClass, Problem, Rational, Sign, SignSet, Subspace, Verdict};
use serde::{Deserialize, Serialize};

use crate::formats::{format_rational, parse_interval, parse_rational};

pub type Rows = Vec<Vec<String>>;

pub fn rows_of(m: &Matrix) -> Rows {
    (0..m.rows()).map(|i| m.row(i).iter().map(format_rational).collect()).collect()
}

pub fn vector_of(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn grid_rows<T: Clone>(g: &Grid<T>, f: impl Fn(&T) -> String) -> Rows {
    (0..g.rows()).map(|i| g.row(i).iter().map(&f).collect()).collect()
}

/// A matrix class as nested JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassDoc {
    SignPattern(Rows),
    SignSets(Rows),
    Interval(Rows),
    Scaled(Rows),
    Product { left: Box<FactorDoc>, right: Box<ClassDoc> },
    Augmented { top: Rows, inner: Box<ClassDoc> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorDoc {
    Fixed(Rows),
    Class(ClassDoc),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubspaceDoc {
    Full { dim: usize },
    Image(Rows),
    Kernel(Rows),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemDoc {
    pub class: ClassDoc,
    pub subspace: SubspaceDoc,
    pub left: Option<Rows>,
    pub full_dimensional_domain: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed report entry: {0}")]
pub struct DocError(pub String);

fn matrix_from(rows: &Rows) -> Result<Matrix, DocError> {
    let parsed = rows
        .iter()
        .map(|r| r.iter().map(|t| parse_rational(t).map_err(DocError)).collect())
        .collect::<Result<Vec<Vec<Rational>>, _>>()?;
    if parsed.is_empty() {
        return Err(DocError("empty matrix".into()));
    }
    Matrix::from_rows(parsed).map_err(|e| DocError(e.to_string()))
}

fn grid_from<T: Clone>(rows: &Rows, f: impl Fn(&str) -> Result<T, String>) -> Result<Grid<T>, DocError> {
    let parsed = rows
        .iter()
        .map(|r| r.iter().map(|t| f(t).map_err(DocError)).collect())
        .collect::<Result<Vec<Vec<T>>, _>>()?;
    Grid::from_rows(parsed).map_err(|e| DocError(e.to_string()))
}

fn sign_of(t: &str) -> Result<Sign, String> {
    let mut cs = t.chars();
    match (cs.next().and_then(Sign::from_char), cs.next()) {
        (Some(s), None) => Ok(s),
        _ => Err(format!("invalid sign {t:?}")),
    }
}

fn signset_of(t: &str) -> Result<SignSet, String> {
    SignSet::from_token(t).ok_or_else(|| format!("invalid sign set {t:?}"))
}

impl ClassDoc {
    pub fn of(c: &MatrixClass) -> Self {
        match c {
            MatrixClass::SignPattern(g) => ClassDoc::SignPattern(grid_rows(g, |s| s.to_char().to_string())),
            MatrixClass::SignSets(g) => ClassDoc::SignSets(grid_rows(g, |s| s.token().to_string())),
            MatrixClass::Interval(g) => ClassDoc::Interval(grid_rows(g, IntervalEntry::to_string)),
            MatrixClass::Scaled(b) => ClassDoc::Scaled(rows_of(b)),
            MatrixClass::Product(l, r) => ClassDoc::Product {
                left: Box::new(match l.as_ref() {
                    Factor::Fixed(m) => FactorDoc::Fixed(rows_of(m)),
                    Factor::Class(c) => FactorDoc::Class(ClassDoc::of(c)),
                }),
                right: Box::new(ClassDoc::of(r)),
            },
            MatrixClass::Augmented(z, inner) => ClassDoc::Augmented {
                top: rows_of(z),
                inner: Box::new(ClassDoc::of(inner)),
            },
        }
    }

    pub fn to_class(&self) -> Result<MatrixClass, DocError> {
        Ok(match self {
            ClassDoc::SignPattern(r) => MatrixClass::SignPattern(grid_from(r, sign_of)?),
            ClassDoc::SignSets(r) => MatrixClass::SignSets(grid_from(r, signset_of)?),
            ClassDoc::Interval(r) => MatrixClass::Interval(grid_from(r, parse_interval)?),
            ClassDoc::Scaled(r) => MatrixClass::Scaled(matrix_from(r)?),
            ClassDoc::Product { left, right } => {
                let l = match left.as_ref() {
                    FactorDoc::Fixed(m) => Factor::Fixed(matrix_from(m)?),
                    FactorDoc::Class(c) => Factor::Class(c.to_class()?),
                };
                MatrixClass::product(l, right.to_class()?).map_err(|e| DocError(e.to_string()))?
            }
            ClassDoc::Augmented { top, inner } => {
                MatrixClass::Augmented(matrix_from(top)?, Box::new(inner.to_class()?))
            }
        })
    }
}

impl SubspaceDoc {
    pub fn to_subspace(&self) -> Result<Subspace, DocError> {
        Ok(match self {
            SubspaceDoc::Full { dim } => Subspace::full(*dim),
            SubspaceDoc::Image(r) => Subspace::from_image(&matrix_from(r)?),
            SubspaceDoc::Kernel(r) => Subspace::from_kernel(&matrix_from(r)?),
        })
    }
}

impl ProblemDoc {
    /// Echo of `p`, with the subspace in the presentation the user chose.
    pub fn of(p: &Problem, subspace: SubspaceDoc) -> Self {
        ProblemDoc {
            class: ClassDoc::of(&p.class),
            subspace,
            left: p.left.as_ref().map(rows_of),
            full_dimensional_domain: p.full_dimensional_domain,
        }
    }

    pub fn to_problem(&self) -> Result<Problem, DocError> {
        let mut p = Problem::new(self.class.to_class()?, self.subspace.to_subspace()?);
        if let Some(a) = &self.left {
            p = p.with_left(matrix_from(a)?);
        }
        p.full_dimensional_domain = self.full_dimensional_domain;
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftDoc {
    pub kappa: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub difference_residual: f64,
    pub collision_residual: f64,
}

impl LiftDoc {
    fn of(l: &MonomialLift) -> Self {
        LiftDoc {
            kappa: l.kappa.clone(),
            x: l.x.clone(),
            y: l.y.clone(),
            difference_residual: l.difference_residual,
            collision_residual: l.collision_residual,
        }
    }

    fn to_lift(&self) -> MonomialLift {
        MonomialLift {
            kappa: self.kappa.clone(),
            x: self.x.clone(),
            y: self.y.clone(),
            difference_residual: self.difference_residual,
            collision_residual: self.collision_residual,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessDoc {
    pub bhat: Rows,
    pub z: Vec<String>,
    pub factors: Vec<Rows>,
    pub lift: Option<LiftDoc>,
}

impl WitnessDoc {
    pub fn of(w: &SingularWitness) -> Self {
        WitnessDoc {
            bhat: rows_of(&w.bhat),
            z: vector_of(&w.z),
            factors: w.factors.iter().map(rows_of).collect(),
            lift: w.lift.as_ref().map(LiftDoc::of),
        }
    }

    pub fn to_witness(&self) -> Result<SingularWitness, DocError> {
        Ok(SingularWitness {
            bhat: matrix_from(&self.bhat)?,
            z: self
                .z
                .iter()
                .map(|t| parse_rational(t).map_err(DocError))
                .collect::<Result<_, _>>()?,
            factors: self.factors.iter().map(matrix_from).collect::<Result<_, _>>()?,
            lift: self.lift.as_ref().map(LiftDoc::to_lift),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermDoc {
    pub monomial: String,
    pub coefficient: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexDoc {
    pub at_upper: Vec<bool>,
    pub value: String,
    pub excluded: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellDoc {
    pub component: usize,
    pub pieces: Vec<String>,
    pub sign: String,
    pub vertices: Vec<VertexDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificateDoc {
    MonomialTable {
        sign: String,
        homogeneous: bool,
        multi_affine: bool,
        terms: Vec<TermDoc>,
    },
    VertexTable {
        sign: String,
        variables: Vec<String>,
        cells: Vec<CellDoc>,
    },
    SignSearch {
        subspace_sign_vectors: usize,
        candidates_checked: usize,
    },
    PatternUnion {
        certificates: Vec<CertificateDoc>,
    },
    SingularWitness(WitnessDoc),
}

fn vertex_doc(t: &VertexTable) -> CertificateDoc {
    CertificateDoc::VertexTable {
        sign: t.sign.name().to_string(),
        variables: t.variables.iter().map(ToString::to_string).collect(),
        cells: t
            .cells
            .iter()
            .map(|c| CellDoc {
                component: c.component,
                pieces: c.pieces.iter().map(ToString::to_string).collect(),
                sign: c.sign.name().to_string(),
                vertices: c
                    .vertices
                    .iter()
                    .map(|v| VertexDoc {
                        at_upper: v.at_upper.clone(),
                        value: format_rational(&v.value),
                        excluded: v.excluded,
                    })
                    .collect(),
            })
            .collect(),
    }
}

impl CertificateDoc {
    pub fn of(c: &Certificate) -> Self {
        match c {
            Certificate::Positivity(PositivityTable::Monomials(t)) => CertificateDoc::MonomialTable {
                sign: t.sign.name().to_string(),
                homogeneous: t.homogeneous,
                multi_affine: t.multi_affine,
                terms: t
                    .terms
                    .iter()
                    .map(|(m, c)| TermDoc {
                        monomial: m.to_string(),
                        coefficient: format_rational(c),
                    })
                    .collect(),
            },
            Certificate::Positivity(PositivityTable::Vertices(t)) => vertex_doc(t),
            Certificate::SignSearch(s) => CertificateDoc::SignSearch {
                subspace_sign_vectors: s.subspace_sign_vectors,
                candidates_checked: s.candidates_checked,
            },
            Certificate::PatternUnion(cs) => CertificateDoc::PatternUnion {
                certificates: cs.iter().map(CertificateDoc::of).collect(),
            },
            Certificate::Singular(w) => CertificateDoc::SingularWitness(WitnessDoc::of(w)),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsDoc {
    pub subspace_sign_vectors: Option<usize>,
    pub candidates_checked: usize,
    pub monomials: Option<usize>,
    pub vertices: Option<usize>,
    pub patterns: Option<usize>,
    pub oracle_trials: Option<u64>,
    pub caps: CapsDoc,
    pub notes: Vec<String>,
    /// Present only when timings were requested, so that reports stay
    /// reproducible byte for byte otherwise.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_ms: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapsDoc {
    pub sign_dim: usize,
    pub vertices: String,
    pub monomials: String,
    pub patterns: String,
}

impl CapsDoc {
    pub fn of(c: &injcert_core::injectivity::Caps) -> Self {
        CapsDoc {
            sign_dim: c.sign_dim,
            vertices: c.vertices.to_string(),
            monomials: c.monomials.to_string(),
            patterns: c.patterns.to_string(),
        }
    }
}

impl DiagnosticsDoc {
    pub fn of(d: &Diagnostics, caps: CapsDoc) -> Self {
        DiagnosticsDoc {
            subspace_sign_vectors: d.subspace_sign_vectors,
            candidates_checked: d.candidates_checked,
            monomials: d.monomials,
            vertices: d.vertices,
            patterns: d.patterns,
            oracle_trials: d.oracle_trials,
            caps,
            notes: d.notes.clone(),
            wall_time_ms: None,
        }
    }
}

/// What was asked: the subcommand, its settings and the exact problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDoc {
    pub command: String,
    pub problem: ProblemDoc,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub network: Option<NetworkDoc>,
    pub settings: SettingsDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkDoc {
    pub species: Vec<String>,
    pub reactions: Vec<String>,
    pub mode: String,
    pub domain_note: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SettingsDoc {
    pub route: String,
    /// Trials of the randomized search, when one may run.
    pub oracle_trials: Option<u64>,
    pub oracle_seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub status: String,
    pub method: String,
    pub certificate: Option<CertificateDoc>,
    pub diagnostics: DiagnosticsDoc,
    pub input: InputDoc,
}

impl Report {
    pub fn new(verdict: &Verdict, diagnostics: DiagnosticsDoc, input: InputDoc) -> Self {
        Report {
            status: verdict.status.name().to_string(),
            method: verdict.method.name().to_string(),
            certificate: verdict.certificate.as_ref().map(CertificateDoc::of),
            diagnostics,
            input,
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}
