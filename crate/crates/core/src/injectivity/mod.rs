//! Decision procedures for `ker(𝓑) ∩ S = {0}` and `ker(A) ∩ 𝓑(S*) = ∅`.
//!
//! [`check_injectivity`] dispatches between three exact routes and an
//! optional randomized fallback:
//!
//! * the determinant route for square problems, which analyses the sign of
//!   `det [Z; A'·B]` symbolically (`A'` is a row basis of `A`);
//! * the sign route, which enumerates `σ(S*)` and propagates sign vectors
//!   through chains of sign classes and scaled classes, or solves one linear
//!   feasibility problem per orthant for interval classes;
//! * the pattern union for sign-set classes, which checks every sign pattern.
//!
//! Every non-injective verdict carries a [`SingularWitness`] that
//! [`verify_certificate`] re-checks in exact arithmetic.

mod det;
mod interval_lp;
mod lift;
mod sign_route;
mod verify;

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::classes::{enumerate_patterns, Link, MatrixClass};
use crate::error::{check_dim, Error, Result};
use crate::linalg::{kernel_basis, primitive, strict_sign_feasible, Matrix, Rational, Subspace};
use crate::oracle::{self, OracleConfig};
use crate::signs::{signset_row_orthogonal, Sign, SignSet, SignVector};
use crate::symbolic::symbolic_view_of_chain;

pub use det::{DetSign, PositivityTable, SignedMonomialTable, VertexCell, VertexTable, VertexValue};
pub use lift::{lift_composed, lift_monomial_witness, MonomialLift};
pub use sign_route::concordance_witness;
pub use verify::{verify_certificate, verify_witness, LIFT_TOLERANCE};

/// An injectivity question: is `ker(left·𝓑) ∩ S = {0}`?
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub class: MatrixClass,
    pub subspace: Subspace,
    pub left: Option<Matrix>,
    /// The maps are defined on a set with non-empty interior.
    pub full_dimensional_domain: bool,
}

impl Problem {
    pub fn new(class: MatrixClass, subspace: Subspace) -> Self {
        Problem {
            class,
            subspace,
            left: None,
            full_dimensional_domain: true,
        }
    }

    pub fn with_left(mut self, a: Matrix) -> Self {
        self.left = Some(a);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.full_dimensional_domain {
            return Err(Error::InvalidInput(
                "the domain must have non-empty interior".into(),
            ));
        }
        if matches!(self.class, MatrixClass::Augmented(..)) {
            return Err(Error::Unsupported(
                "augmented classes as problem classes; pass the subspace instead".into(),
            ));
        }
        let (r, c) = self.class.shape()?;
        check_dim("class columns vs ambient dimension", self.subspace.ambient_dim(), c)?;
        if let Some(a) = &self.left {
            check_dim("left matrix columns vs class rows", r, a.cols())?;
        }
        self.class.chain()?;
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Injective,
    NotInjective,
    Inconclusive,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Injective => "INJECTIVE",
            Status::NotInjective => "NOT_INJECTIVE",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    SignRoute,
    DetRoute,
    PatternUnion,
    Oracle,
    /// No route decided the question.
    None,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::SignRoute => "SIGN_ROUTE",
            Method::DetRoute => "DET_ROUTE",
            Method::PatternUnion => "PATTERN_UNION",
            Method::Oracle => "ORACLE",
            Method::None => "NONE",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An exact member of the class with a nonzero kernel vector in `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularWitness {
    /// The product of `factors`.
    pub bhat: Matrix,
    pub z: Vec<Rational>,
    /// One concrete matrix per factor, leftmost first; the left matrix of the
    /// problem, if any, comes first.
    pub factors: Vec<Matrix>,
    pub lift: Option<MonomialLift>,
}

/// Record of an exhausted sign search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignSearch {
    pub subspace_sign_vectors: usize,
    pub candidates_checked: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    Positivity(PositivityTable),
    SignSearch(SignSearch),
    PatternUnion(Vec<Certificate>),
    Singular(Box<SingularWitness>),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub subspace_sign_vectors: Option<usize>,
    pub candidates_checked: usize,
    pub monomials: Option<usize>,
    pub vertices: Option<usize>,
    pub patterns: Option<usize>,
    pub oracle_trials: Option<u64>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub status: Status,
    pub method: Method,
    pub certificate: Option<Certificate>,
    pub diagnostics: Diagnostics,
}

/// Enumeration limits; exceeding one is reported, never guessed around.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Largest dimension whose `3ⁿ` sign vectors are enumerated.
    pub sign_dim: usize,
    pub vertices: u128,
    pub monomials: u128,
    pub patterns: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            sign_dim: 12,
            vertices: 1 << 20,
            monomials: 1_000_000,
            patterns: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RoutePreference {
    /// Determinant route when square, then the sign route.
    #[default]
    Auto,
    DetOnly,
    SignOnly,
    /// Decide sign-set classes pattern by pattern.
    PatternUnion,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckConfig {
    pub caps: Caps,
    pub route: RoutePreference,
    /// Randomized search run when no exact route decides.
    pub fallback: Option<OracleConfig>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            caps: Caps::default(),
            route: RoutePreference::Auto,
            fallback: Some(OracleConfig {
                trials: 2_000,
                ..OracleConfig::default()
            }),
        }
    }
}

/// [`check_injectivity_with`] under the default configuration.
pub fn check_injectivity(problem: &Problem) -> Result<Verdict> {
    check_injectivity_with(problem, &CheckConfig::default())
}

pub fn check_injectivity_with(problem: &Problem, cfg: &CheckConfig) -> Result<Verdict> {
    problem.validate()?;
    let mut diag = Diagnostics::default();
    if problem.subspace.dim() == 0 {
        diag.subspace_sign_vectors = Some(0);
        return Ok(Verdict {
            status: Status::Injective,
            method: Method::SignRoute,
            certificate: Some(Certificate::SignSearch(SignSearch {
                subspace_sign_vectors: 0,
                candidates_checked: 0,
            })),
            diagnostics: diag,
        });
    }
    if cfg.route == RoutePreference::PatternUnion {
        if let MatrixClass::SignSets(_) = &problem.class {
            return pattern_union(problem, cfg);
        }
        diag.notes
            .push("pattern union applies to sign-set classes only".into());
    }

    let mut table = None;
    let try_det = matches!(cfg.route, RoutePreference::Auto | RoutePreference::DetOnly | RoutePreference::PatternUnion);
    let try_sign = matches!(cfg.route, RoutePreference::Auto | RoutePreference::SignOnly | RoutePreference::PatternUnion);

    if try_det && is_square(problem) {
        match det_route(problem, cfg, &mut diag) {
            Ok(DetOutcome::Decided(v)) => return Ok(v),
            Ok(DetOutcome::Undecided(t)) => table = Some(t),
            Err(e @ (Error::CapExceeded { .. } | Error::Unsupported(_))) => {
                diag.notes.push(format!("determinant route: {e}"));
            }
            Err(e) => return Err(e),
        }
    } else if try_det {
        diag.notes
            .push("determinant route needs as many class rows as dim S".into());
    }

    if try_sign {
        match sign_route_dispatch(problem, cfg, &mut diag) {
            Ok(Some(v)) => return Ok(v),
            Ok(None) => {}
            Err(e @ (Error::CapExceeded { .. } | Error::Unsupported(_))) => {
                diag.notes.push(format!("sign route: {e}"));
            }
            Err(e) => return Err(e),
        }
    }

    if let Some(ocfg) = &cfg.fallback {
        diag.oracle_trials = Some(ocfg.trials);
        if let Some(w) = oracle::falsify(problem, ocfg)? {
            return Ok(Verdict {
                status: Status::NotInjective,
                method: Method::Oracle,
                certificate: Some(Certificate::Singular(Box::new(w))),
                diagnostics: diag,
            });
        }
    }
    Ok(Verdict {
        status: Status::Inconclusive,
        method: Method::None,
        certificate: table.map(Certificate::Positivity),
        diagnostics: diag,
    })
}

/// Rows of the left matrix kept for the determinant route: a basis of its row space.
pub(crate) fn folded_left(problem: &Problem) -> Option<Matrix> {
    problem
        .left
        .as_ref()
        .map(|a| a.select_rows(&a.independent_rows()))
}

fn is_square(problem: &Problem) -> bool {
    let rows = match folded_left(problem) {
        Some(a) => a.rows(),
        None => problem.class.shape().map(|s| s.0).unwrap_or(0),
    };
    rows == problem.subspace.dim()
}

enum DetOutcome {
    Decided(Verdict),
    Undecided(PositivityTable),
}

/// `[Z; A'·B]` with one parameter per free entry of the class.
pub(crate) fn det_view(problem: &Problem) -> Result<crate::symbolic::SymbolicView> {
    let chain = problem.class.chain()?;
    let folded = folded_left(problem);
    let mut links: Vec<Link<'_>> = Vec::with_capacity(chain.len() + 1);
    if let Some(a) = &folded {
        links.push(Link::Fixed(a));
    }
    links.extend(chain.iter().copied());
    symbolic_view_of_chain(Some(problem.subspace.kernel_rep().clone()), &links)
}

fn det_route(problem: &Problem, cfg: &CheckConfig, diag: &mut Diagnostics) -> Result<DetOutcome> {
    let folded = folded_left(problem);
    let view = det_view(problem)?;
    let analysis = det::analyse(&view, &cfg.caps)?;
    diag.monomials = Some(analysis.poly.len());
    if let PositivityTable::Vertices(t) = &analysis.table {
        diag.vertices = Some(t.cells.iter().map(|c| c.vertices.len()).sum());
    }
    let sign = analysis.table.sign();
    if sign.is_nonvanishing() {
        return Ok(DetOutcome::Decided(Verdict {
            status: Status::Injective,
            method: Method::DetRoute,
            certificate: Some(Certificate::Positivity(analysis.table)),
            diagnostics: diag.clone(),
        }));
    }
    if !analysis.zero_attainable {
        diag.notes.push(
            "determinant takes both signs but is not affine in each parameter; zero is not guaranteed"
                .into(),
        );
        return Ok(DetOutcome::Undecided(analysis.table));
    }
    let mut values = det::zero_parameters(&analysis)?;
    for (p, d) in &view.domains {
        values.entry(*p).or_insert_with(|| d.interior_point());
    }
    let mut factors = view.instantiate_links(&values);
    if let (Some(_), Some(a)) = (&folded, &problem.left) {
        factors[0] = a.clone();
    }
    let m = view.matrix().instantiate(&values);
    let k = kernel_basis(&m);
    if k.cols() == 0 {
        return Err(Error::WitnessRejected(
            "determinant root produced a nonsingular matrix".into(),
        ));
    }
    let z = primitive(&k.column(0));
    let witness = assemble_witness(problem, factors, z)?;
    Ok(DetOutcome::Decided(Verdict {
        status: Status::NotInjective,
        method: Method::DetRoute,
        certificate: Some(Certificate::Singular(Box::new(witness))),
        diagnostics: diag.clone(),
    }))
}

fn sign_route_dispatch(problem: &Problem, cfg: &CheckConfig, diag: &mut Diagnostics) -> Result<Option<Verdict>> {
    let outcome = match sign_route::classify(problem)? {
        sign_route::Shape::Chain => sign_route::run(problem, &cfg.caps)?,
        sign_route::Shape::Interval => interval_lp::run(problem, &cfg.caps)?,
        sign_route::Shape::Other => {
            diag.notes.push(
                "sign route needs a chain of sign and scaled classes, or one interval class".into(),
            );
            return Ok(None);
        }
    };
    diag.subspace_sign_vectors = Some(outcome.subspace_sign_vectors);
    diag.candidates_checked += outcome.candidates_checked;
    let verdict = match outcome.witness {
        Some(w) => Verdict {
            status: Status::NotInjective,
            method: Method::SignRoute,
            certificate: Some(Certificate::Singular(Box::new(w))),
            diagnostics: diag.clone(),
        },
        None => Verdict {
            status: Status::Injective,
            method: Method::SignRoute,
            certificate: Some(Certificate::SignSearch(SignSearch {
                subspace_sign_vectors: outcome.subspace_sign_vectors,
                candidates_checked: outcome.candidates_checked,
            })),
            diagnostics: diag.clone(),
        },
    };
    Ok(Some(verdict))
}

/// The sign-set problem split into one problem per sign pattern.
pub(crate) fn pattern_problems(problem: &Problem, caps: &Caps) -> Result<Vec<Problem>> {
    let MatrixClass::SignSets(w) = &problem.class else {
        return Err(Error::Unsupported("pattern union of a non sign-set class".into()));
    };
    Ok(enumerate_patterns(w, caps.patterns)?
        .into_iter()
        .map(|p| Problem {
            class: MatrixClass::SignPattern(p),
            ..problem.clone()
        })
        .collect())
}

fn pattern_union(problem: &Problem, cfg: &CheckConfig) -> Result<Verdict> {
    let patterns = pattern_problems(problem, &cfg.caps)?;
    let mut diag = Diagnostics {
        patterns: Some(patterns.len()),
        ..Diagnostics::default()
    };
    let sub_cfg = CheckConfig {
        route: RoutePreference::Auto,
        fallback: None,
        ..cfg.clone()
    };
    let mut certs = Vec::with_capacity(patterns.len());
    for p in &patterns {
        let v = check_injectivity_with(p, &sub_cfg)?;
        diag.candidates_checked += v.diagnostics.candidates_checked;
        match v.status {
            Status::Injective => certs.push(v.certificate.expect("injective verdicts carry certificates")),
            Status::NotInjective => {
                return Ok(Verdict {
                    status: Status::NotInjective,
                    method: Method::PatternUnion,
                    certificate: v.certificate,
                    diagnostics: diag,
                })
            }
            Status::Inconclusive => {
                diag.notes.push("a sign pattern was left undecided".into());
                return Ok(Verdict {
                    status: Status::Inconclusive,
                    method: Method::None,
                    certificate: None,
                    diagnostics: diag,
                });
            }
        }
    }
    Ok(Verdict {
        status: Status::Injective,
        method: Method::PatternUnion,
        certificate: Some(Certificate::PatternUnion(certs)),
        diagnostics: diag,
    })
}

/// Builds and checks a witness from concrete class factors (without the
/// problem's left matrix) or from all factors when `factors` already starts
/// with it.
pub(crate) fn assemble_witness(problem: &Problem, mut factors: Vec<Matrix>, z: Vec<Rational>) -> Result<SingularWitness> {
    let chain_len = problem.class.chain()?.len();
    if let Some(a) = &problem.left {
        if factors.len() == chain_len {
            factors.insert(0, a.clone());
        }
    }
    let mut bhat = factors[0].clone();
    for f in &factors[1..] {
        bhat = bhat.checked_mul(f)?;
    }
    let mut w = SingularWitness {
        bhat,
        z,
        factors,
        lift: None,
    };
    w.lift = lift::lift_for_problem(problem, &w);
    if !verify_witness(problem, &w) {
        return Err(Error::WitnessRejected(
            "constructed witness failed exact verification".into(),
        ));
    }
    Ok(w)
}

/// `σ(S ∖ {0})`, in lexicographic order.
pub fn subspace_sign_vectors(s: &Subspace, cap: usize) -> Result<Vec<SignVector>> {
    let n = s.ambient_dim();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "sign-vector dimension",
            count: n as u128,
            cap: cap as u128,
        });
    }
    let z = s.kernel_rep();
    let mut out = Vec::new();
    for tau in SignVector::all(n) {
        if tau.is_zero() {
            continue;
        }
        if z.rows() == 0 || strict_sign_feasible(z, &tau, &[])?.is_some() {
            out.push(tau);
        }
    }
    Ok(out)
}

/// Some `x` with `σ(x) = τ` and `σ(Bx) = ρ`.
pub fn pair_sign_feasible(b: &Matrix, tau: &SignVector, rho: &SignVector) -> Result<Option<Vec<Rational>>> {
    check_dim("pair sign vector length", b.cols(), tau.len())?;
    check_dim("pair image sign vector length", b.rows(), rho.len())?;
    strict_sign_feasible(&Matrix::zeros(0, b.cols()), tau, &[(b, rho)])
}

/// Whether `y = Bx` is solvable with `B ∈ Q(𝒲)` for any `x`, `y` with
/// `σ(x) = τ`, `σ(y) = ρ`.
pub fn concordant_pair(rho: &SignVector, tau: &SignVector, w: &crate::classes::Grid<SignSet>) -> Result<bool> {
    check_dim("concordance rows", w.rows(), rho.len())?;
    check_dim("concordance columns", w.cols(), tau.len())?;
    for (i, &r) in rho.as_slice().iter().enumerate() {
        let row = w.row(i);
        let ok = match r {
            Sign::Zero => signset_row_orthogonal(row, tau)?,
            r => row
                .iter()
                .zip(tau.as_slice())
                .any(|(s, &t)| s.iter().any(|x| x * t == r)),
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}
