//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use injcert_core::injectivity::{
    subspace_sign_vectors, Caps, Certificate, CheckConfig, Diagnostics, RoutePreference,
};
use injcert_core::oracle::{falsify, OracleConfig};
use injcert_core::{check_injectivity_with, MatrixClass, Method, Problem, Status, Subspace, Verdict};

use crate::crn::{build_problem, parse_network, to_text, BuildError, KineticsMode};
use crate::error::{Error, ParseError, Result, Source};
use crate::formats::{
    format_sign_vectors, parse_interval_matrix, parse_matrix, parse_signset_matrix,
};
use crate::report::{
    rows_of, CapsDoc, DiagnosticsDoc, InputDoc, NetworkDoc, ProblemDoc, Report, SettingsDoc, SubspaceDoc,
};

/// Noted in every network report.
pub const CRN_DOMAIN_NOTE: &str =
    "analysis on the open positive orthant; equilibria on its boundary are not covered";

#[derive(Parser, Debug)]
#[command(name = "injcert", version, about = "Exact injectivity certificates for classes of maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Largest dimension whose 3^n sign vectors are enumerated.
    #[arg(long, global = true, value_name = "N")]
    pub max_sign_dim: Option<usize>,
    /// Most parameter-box vertices evaluated per determinant.
    #[arg(long, global = true, value_name = "N")]
    pub max_vertices: Option<u128>,
    /// Most monomials expanded in a determinant table.
    #[arg(long, global = true, value_name = "N")]
    pub max_monomials: Option<u128>,
    /// Most sign patterns enumerated by the pattern-union route.
    #[arg(long, global = true, value_name = "N")]
    pub max_patterns: Option<u128>,
    /// Decision route to use.
    #[arg(long, global = true, value_enum, default_value_t = Route::Auto)]
    pub route: Route,
    /// Randomized trials when no exact route decides; 0 disables the search.
    #[arg(long, global = true, value_name = "N", default_value_t = 2_000)]
    pub fallback_trials: u64,
    /// Seed of every randomized search.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Record wall time in the report (reports then differ between runs).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Auto,
    Det,
    Sign,
    PatternUnion,
}

impl Route {
    fn preference(self) -> RoutePreference {
        match self {
            Route::Auto => RoutePreference::Auto,
            Route::Det => RoutePreference::DetOnly,
            Route::Sign => RoutePreference::SignOnly,
            Route::PatternUnion => RoutePreference::PatternUnion,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Route::Auto => "auto",
            Route::Det => "det",
            Route::Sign => "sign",
            Route::PatternUnion => "pattern-union",
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    MassAction,
    PowerLaw,
    MonotonicStrict,
    MonotonicWeak,
}

impl From<Mode> for KineticsMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::MassAction => KineticsMode::MassAction,
            Mode::PowerLaw => KineticsMode::PowerLaw,
            Mode::MonotonicStrict => KineticsMode::MonotonicStrict,
            Mode::MonotonicWeak => KineticsMode::MonotonicWeak,
        }
    }
}

/// `full`, `im:<file>` or `ker:<file>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubspaceArg {
    Full,
    Image(PathBuf),
    Kernel(PathBuf),
}

impl FromStr for SubspaceArg {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "full" {
            return Ok(SubspaceArg::Full);
        }
        match s.split_once(':') {
            Some(("im", p)) if !p.is_empty() => Ok(SubspaceArg::Image(p.into())),
            Some(("ker", p)) if !p.is_empty() => Ok(SubspaceArg::Kernel(p.into())),
            _ => Err(format!("expected `full`, `im:<file>` or `ker:<file>`, found {s:?}")),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct SubspaceFlags {
    /// The subspace S: `full`, `im:<file>` (columns span S) or `ker:<file>` (S = ker Z).
    #[arg(long = "S", value_name = "SPEC")]
    pub s: SubspaceArg,
    /// Fixed left matrix A, composed with the class.
    #[arg(long = "A", value_name = "FILE")]
    pub a: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct ClassFlags {
    /// Exponent matrix B of the scaled class diag(κ)·B·diag(λ).
    #[arg(long = "B", value_name = "FILE")]
    pub b: Option<PathBuf>,
    /// Sign-set matrix.
    #[arg(long = "W", value_name = "FILE")]
    pub w: Option<PathBuf>,
    /// Interval matrix.
    #[arg(long = "D", value_name = "FILE")]
    pub d: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Scaled monomial class q(B).
    Monomial {
        /// Exponent matrix B, whitespace-separated rationals.
        #[arg(long = "B", value_name = "FILE")]
        b: PathBuf,
        #[command(flatten)]
        sub: SubspaceFlags,
    },
    /// Sign-set class Q(W).
    Monotonic {
        /// Sign-set matrix W with entries like `+`, `0`, `-`, `0+`, `-+`, `*`.
        #[arg(long = "W", value_name = "FILE")]
        w: PathBuf,
        #[command(flatten)]
        sub: SubspaceFlags,
    },
    /// Interval class Q(D).
    Interval {
        /// Interval matrix D with entries like `[1,2)`, `(0,inf)`, `{3}`.
        #[arg(long = "D", value_name = "FILE")]
        d: PathBuf,
        #[command(flatten)]
        sub: SubspaceFlags,
    },
    /// Reaction network file.
    Crn {
        /// Network text: one reaction per line.
        file: PathBuf,
        /// Kinetics assumed for every reaction.
        #[arg(long, value_enum, default_value_t = Mode::MassAction)]
        mode: Mode,
    },
    /// Prints the sign vectors of S without 0.
    Signs {
        /// The subspace: `full`, `im:<file>` or `ker:<file>`.
        #[arg(long = "S", value_name = "SPEC")]
        s: SubspaceArg,
        /// Ambient dimension, needed with `--S full`.
        #[arg(long, value_name = "N")]
        dim: Option<usize>,
    },
    /// Randomized search for a singular member only.
    Falsify {
        #[command(flatten)]
        class: ClassFlags,
        #[command(flatten)]
        sub: SubspaceFlags,
        /// Number of random members tried.
        #[arg(long, value_name = "N", default_value_t = 100_000)]
        trials: u64,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|error| Error::Read {
        path: path.to_path_buf(),
        error,
    })
}

fn load<T>(path: &Path, parse: impl Fn(&str) -> std::result::Result<T, ParseError>) -> Result<T> {
    let text = read(path)?;
    parse(&text).map_err(|e| Error::parse(Source(Some(path.to_path_buf())), e))
}

fn load_subspace(arg: &SubspaceArg, dim: Option<usize>) -> Result<(Subspace, SubspaceDoc)> {
    match arg {
        SubspaceArg::Full => {
            let n = dim.ok_or_else(|| Error::Usage("`--S full` needs the ambient dimension".into()))?;
            Ok((Subspace::full(n), SubspaceDoc::Full { dim: n }))
        }
        SubspaceArg::Image(p) => {
            let v = load(p, parse_matrix)?;
            Ok((Subspace::from_image(&v), SubspaceDoc::Image(rows_of(&v))))
        }
        SubspaceArg::Kernel(p) => {
            let z = load(p, parse_matrix)?;
            Ok((Subspace::from_kernel(&z), SubspaceDoc::Kernel(rows_of(&z))))
        }
    }
}

fn assemble(class: MatrixClass, sub: &SubspaceFlags) -> Result<(Problem, SubspaceDoc)> {
    let (_, cols) = class.shape()?;
    let (s, doc) = load_subspace(&sub.s, Some(cols))?;
    let mut p = Problem::new(class, s);
    if let Some(a) = &sub.a {
        p = p.with_left(load(a, parse_matrix)?);
    }
    p.validate()?;
    Ok((p, doc))
}

fn caps(g: &GlobalArgs) -> Caps {
    let d = Caps::default();
    Caps {
        sign_dim: g.max_sign_dim.unwrap_or(d.sign_dim),
        vertices: g.max_vertices.unwrap_or(d.vertices),
        monomials: g.max_monomials.unwrap_or(d.monomials),
        patterns: g.max_patterns.unwrap_or(d.patterns),
    }
}

fn oracle_config(g: &GlobalArgs, trials: u64) -> OracleConfig {
    let d = OracleConfig::default();
    OracleConfig {
        trials,
        seed: g.seed.unwrap_or(d.seed),
        ..d
    }
}

/// What a run produced: the exit code and the text for stdout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
}

fn exit_code(s: Status) -> i32 {
    match s {
        Status::Injective => 0,
        Status::NotInjective => 1,
        Status::Inconclusive => 2,
    }
}

struct Run<'g> {
    g: &'g GlobalArgs,
    started: Instant,
}

impl Run<'_> {
    fn settings(&self, oracle: Option<&OracleConfig>) -> SettingsDoc {
        SettingsDoc {
            route: self.g.route.name().to_string(),
            oracle_trials: oracle.map(|o| o.trials),
            oracle_seed: oracle.map(|o| o.seed),
        }
    }

    fn emit(&self, verdict: &Verdict, input: InputDoc) -> Result<Outcome> {
        let mut diagnostics = DiagnosticsDoc::of(&verdict.diagnostics, CapsDoc::of(&caps(self.g)));
        if self.g.timings {
            diagnostics.wall_time_ms = Some(self.started.elapsed().as_secs_f64() * 1e3);
        }
        let report = Report::new(verdict, diagnostics, input);
        let code = exit_code(verdict.status);
        self.write(report.to_json()?, format!("{} via {}\n", report.status, report.method), code)
    }

    fn write(&self, text: String, summary: String, code: i32) -> Result<Outcome> {
        match &self.g.report {
            Some(path) => {
                fs::write(path, text).map_err(|error| Error::Write {
                    path: path.clone(),
                    error,
                })?;
                Ok(Outcome { code, output: summary })
            }
            None => Ok(Outcome { code, output: text }),
        }
    }

    fn check(
        &self,
        command: &str,
        problem: &Problem,
        subspace: SubspaceDoc,
        network: Option<NetworkDoc>,
    ) -> Result<Outcome> {
        let fallback = (self.g.fallback_trials > 0).then(|| oracle_config(self.g, self.g.fallback_trials));
        let cfg = CheckConfig {
            caps: caps(self.g),
            route: self.g.route.preference(),
            fallback: fallback.clone(),
        };
        let verdict = check_injectivity_with(problem, &cfg)?;
        let input = InputDoc {
            command: command.to_string(),
            problem: ProblemDoc::of(problem, subspace),
            network,
            settings: self.settings(fallback.as_ref()),
        };
        self.emit(&verdict, input)
    }
}

fn class_from_flags(c: &ClassFlags) -> Result<(MatrixClass, &'static str)> {
    match (&c.b, &c.w, &c.d) {
        (Some(b), None, None) => Ok((MatrixClass::Scaled(load(b, parse_matrix)?), "monomial")),
        (None, Some(w), None) => Ok((MatrixClass::SignSets(load(w, parse_signset_matrix)?), "monotonic")),
        (None, None, Some(d)) => Ok((MatrixClass::Interval(load(d, parse_interval_matrix)?), "interval")),
        _ => Err(Error::Usage("give exactly one of --B, --W, --D".into())),
    }
}

fn execute(cli: &Cli) -> Result<Outcome> {
    let run = Run {
        g: &cli.global,
        started: Instant::now(),
    };
    match &cli.command {
        Command::Monomial { b, sub } => {
            let (p, s) = assemble(MatrixClass::Scaled(load(b, parse_matrix)?), sub)?;
            run.check("monomial", &p, s, None)
        }
        Command::Monotonic { w, sub } => {
            let (p, s) = assemble(MatrixClass::SignSets(load(w, parse_signset_matrix)?), sub)?;
            run.check("monotonic", &p, s, None)
        }
        Command::Interval { d, sub } => {
            let (p, s) = assemble(MatrixClass::Interval(load(d, parse_interval_matrix)?), sub)?;
            run.check("interval", &p, s, None)
        }
        Command::Crn { file, mode } => {
            let net = load(file, parse_network)?;
            let kinetics = KineticsMode::from(*mode);
            let problem = build_problem(&net, kinetics).map_err(|e| match e {
                BuildError::Core(c) => Error::Core(c),
                other => Error::Data(format!("{}: {other}", file.display())),
            })?;
            let a = problem.left.clone().expect("network problems have a left matrix");
            let network = NetworkDoc {
                species: net.species.clone(),
                reactions: to_text(&net).lines().map(str::to_string).collect(),
                mode: kinetics.name().to_string(),
                domain_note: CRN_DOMAIN_NOTE.to_string(),
            };
            run.check("crn", &problem, SubspaceDoc::Image(rows_of(&a)), Some(network))
        }
        Command::Signs { s, dim } => {
            let (sub, _) = load_subspace(s, *dim)?;
            let vs = subspace_sign_vectors(&sub, caps(run.g).sign_dim)?;
            let text = format_sign_vectors(&vs);
            run.write(text, format!("{} sign vectors\n", vs.len()), 0)
        }
        Command::Falsify { class, sub, trials } => {
            let (c, kind) = class_from_flags(class)?;
            let (problem, s) = assemble(c, sub)?;
            let cfg = oracle_config(run.g, *trials);
            let hit = falsify(&problem, &cfg)?;
            let mut diagnostics = Diagnostics {
                oracle_trials: Some(cfg.trials),
                ..Diagnostics::default()
            };
            let verdict = match hit {
                Some(w) => Verdict {
                    status: Status::NotInjective,
                    method: Method::Oracle,
                    certificate: Some(Certificate::Singular(Box::new(w))),
                    diagnostics,
                },
                None => {
                    diagnostics
                        .notes
                        .push(format!("no singular member found in {} trials; this is not a proof", cfg.trials));
                    Verdict {
                        status: Status::Inconclusive,
                        method: Method::Oracle,
                        certificate: None,
                        diagnostics,
                    }
                }
            };
            let input = InputDoc {
                command: format!("falsify:{kind}"),
                problem: ProblemDoc::of(&problem, s),
                network: None,
                settings: run.settings(Some(&cfg)),
            };
            run.emit(&verdict, input)
        }
    }
}

/// Parses `args` (program name first), runs the command and writes its
/// output to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let target: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(&cli) {
        Ok(o) => {
            let _ = out.write_all(o.output.as_bytes());
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
