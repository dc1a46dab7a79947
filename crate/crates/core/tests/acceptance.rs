//! Acceptance gate: one line per criterion, all twelve must pass.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use injcert_core::classes::{enumerate_patterns, Factor};
use injcert_core::injectivity::{
    concordance_witness, concordant_pair, lift_monomial_witness, Certificate, DetSign, PositivityTable,
    RoutePreference,
};
use injcert_core::linalg::{int, kernel_basis, rat, strict_sign_feasible};
use injcert_core::oracle::{falsify, OracleConfig};
use injcert_core::signs::{sigma, sign_orthogonal};
use injcert_core::{
    check_injectivity_with, verify_certificate, CheckConfig, Grid, IntervalEntry, Matrix, MatrixClass, Method,
    Problem, Rational, Sign, SignSet, SignVector, Status, Subspace, Verdict,
};
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SMALL_CASE_BUDGET: Duration = Duration::from_secs(1);
const SUITE_BUDGET: Duration = Duration::from_secs(60);
const FALSIFIER_TRIALS: u64 = 100_000;
const FALSIFIER_SEED: u64 = 20_240_601;
const LIFT_TOL: f64 = 1e-9;

type Outcome = Result<String, String>;

fn exact_cfg() -> CheckConfig {
    CheckConfig {
        fallback: None,
        ..CheckConfig::default()
    }
}

fn route_cfg(route: RoutePreference) -> CheckConfig {
    CheckConfig {
        route,
        fallback: None,
        ..CheckConfig::default()
    }
}

fn signs(rows: &[&str]) -> Grid<Sign> {
    Grid::from_rows(
        rows.iter()
            .map(|r| r.chars().map(|c| Sign::from_char(c).unwrap()).collect())
            .collect(),
    )
    .unwrap()
}

fn sign_sets(rows: &[&[&str]]) -> Grid<SignSet> {
    Grid::from_rows(
        rows.iter()
            .map(|r| r.iter().map(|t| SignSet::from_token(t).unwrap()).collect())
            .collect(),
    )
    .unwrap()
}

fn point(v: i64) -> IntervalEntry {
    IntervalEntry::point(int(v))
}

fn open(l: Rational, u: Rational) -> IntervalEntry {
    IntervalEntry::open(l, u).unwrap()
}

fn line11() -> Subspace {
    Subspace::from_image(&Matrix::from_ints(&[&[1], &[1]]))
}

/// Collects every verdict for the soundness criterion.
#[derive(Default)]
struct Ledger {
    verdicts: Vec<(Problem, Verdict)>,
}

impl Ledger {
    fn check(&mut self, problem: &Problem, cfg: &CheckConfig) -> Result<Verdict, String> {
        let v = check_injectivity_with(problem, cfg).map_err(|e| e.to_string())?;
        self.verdicts.push((problem.clone(), v.clone()));
        Ok(v)
    }
}

fn expect_status(v: &Verdict, s: Status, what: &str) -> Result<(), String> {
    if v.status == s {
        Ok(())
    } else {
        Err(format!("{what}: expected {s}, got {} via {}", v.status, v.method))
    }
}

fn monomial_table(v: &Verdict) -> Result<Vec<(String, Rational)>, String> {
    match &v.certificate {
        Some(Certificate::Positivity(PositivityTable::Monomials(t))) => {
            Ok(t.terms.iter().map(|(m, c)| (m.to_string(), c.clone())).collect())
        }
        other => Err(format!("expected a monomial table, got {other:?}")),
    }
}

fn criterion_1(ledger: &mut Ledger) -> Outcome {
    let b = Matrix::from_ints(&[&[1, 1], &[2, 1]]);
    let scaled = Problem::new(MatrixClass::Scaled(b), Subspace::full(2));
    let v = ledger.check(&scaled, &exact_cfg())?;
    expect_status(&v, Status::Injective, "scaled on R^2")?;
    let table = monomial_table(&v)?;
    if table != vec![("κ1*κ2*λ1*λ2".to_string(), int(-1))] {
        return Err(format!("table {table:?}"));
    }
    let box_class = MatrixClass::Interval(Grid::filled(2, 2, IntervalEntry::positive()));
    let full = Problem::new(box_class.clone(), Subspace::full(2));
    let v = ledger.check(&full, &exact_cfg())?;
    expect_status(&v, Status::NotInjective, "positive box on R^2")?;
    if !verify_certificate(&v, &full) {
        return Err("witness rejected".into());
    }
    let v = ledger.check(&Problem::new(box_class, line11()), &exact_cfg())?;
    expect_status(&v, Status::Injective, "positive box on im(1,1)")?;
    Ok("scaled INJECTIVE with table {-κ1κ2λ1λ2}; positive box NOT_INJECTIVE on R^2, INJECTIVE on im(1,1)".into())
}

fn criterion_2(ledger: &mut Ledger) -> Outcome {
    let d = Grid::from_rows(vec![
        vec![point(1), point(0)],
        vec![IntervalEntry::positive(), IntervalEntry::positive()],
    ])
    .unwrap();
    let v = ledger.check(&Problem::new(MatrixClass::Interval(d), Subspace::full(2)), &exact_cfg())?;
    expect_status(&v, Status::Injective, "lower-triangular box")?;
    let w = sign_sets(&[&["+", "0"], &["+", "+"]]);
    let v = ledger.check(&Problem::new(MatrixClass::SignSets(w), Subspace::full(2)), &exact_cfg())?;
    expect_status(&v, Status::Injective, "lower-triangular signs")?;
    Ok("box and sign-set classes INJECTIVE".into())
}

fn criterion_3(ledger: &mut Ledger) -> Outcome {
    let d = Grid::from_rows(vec![
        vec![open(int(1), rat(13, 10)), open(int(1), rat(11, 10))],
        vec![open(int(2), rat(143, 50)), open(int(1), rat(121, 100))],
    ])
    .unwrap();
    let p = Problem::new(MatrixClass::Interval(d), Subspace::full(2));
    let v = ledger.check(&p, &exact_cfg())?;
    expect_status(&v, Status::Injective, "box")?;
    let Some(Certificate::Positivity(PositivityTable::Vertices(t))) = &v.certificate else {
        return Err(format!("expected a vertex table, got {:?}", v.certificate));
    };
    if t.sign != DetSign::Neg {
        return Err(format!("sign {}", t.sign));
    }
    let max = t
        .cells
        .iter()
        .flat_map(|c| c.vertices.iter().map(|x| x.value.clone()))
        .max()
        .ok_or("no vertices")?;
    if max != rat(-427, 1000) {
        return Err(format!("max vertex value {max}"));
    }
    Ok(format!("NEG, max vertex value {max}"))
}

fn criterion_4(ledger: &mut Ledger) -> Outcome {
    let a = Matrix::from_ints(&[&[-1, 0, 0, 1], &[0, 1, -1, 0]]);
    let k = || open(int(0), int(1));
    let d = Grid::from_rows(vec![
        vec![point(1), point(0)],
        vec![k(), point(0)],
        vec![point(0), point(1)],
        vec![point(0), k()],
    ])
    .unwrap();
    let p = Problem::new(MatrixClass::Interval(d), Subspace::full(2)).with_left(a);
    let v = ledger.check(&p, &exact_cfg())?;
    expect_status(&v, Status::Injective, "stacked box with left factor")?;
    let Some(Certificate::Positivity(PositivityTable::Vertices(t))) = &v.certificate else {
        return Err(format!("expected a vertex table, got {:?}", v.certificate));
    };
    let values: Vec<(Rational, bool)> = t.cells[0]
        .vertices
        .iter()
        .map(|x| (x.value.clone(), x.excluded))
        .collect();
    let zero_excluded = values.iter().any(|(x, e)| x.is_zero() && *e);
    if t.sign != DetSign::Pos || !zero_excluded {
        return Err(format!("sign {} vertices {values:?}", t.sign));
    }
    Ok(format!("POS, zero only at the excluded vertex; vertices {:?}", values.iter().map(|v| v.0.to_string()).collect::<Vec<_>>()))
}

fn criterion_5(ledger: &mut Ledger) -> Outcome {
    let a = Matrix::from_ints(&[&[1, -1]]);
    let d = Grid::from_rows(vec![vec![open(int(0), int(1)), point(0)], vec![point(0), point(1)]]).unwrap();
    let full = Problem::new(MatrixClass::Interval(d.clone()), Subspace::full(2)).with_left(a.clone());
    let v = ledger.check(&full, &exact_cfg())?;
    expect_status(&v, Status::NotInjective, "S = R^2")?;
    if !verify_certificate(&v, &full) {
        return Err("witness rejected".into());
    }
    let v = ledger.check(&Problem::new(MatrixClass::Interval(d), line11()).with_left(a), &exact_cfg())?;
    expect_status(&v, Status::Injective, "S = im(1,1)")?;
    Ok("NOT_INJECTIVE on R^2 (verified), INJECTIVE on im(1,1)".into())
}

fn criterion_6(ledger: &mut Ledger) -> Outcome {
    let s = Subspace::from_kernel(&Matrix::from_ints(&[&[1, -1, 1]]));
    let b = Matrix::from_ints(&[&[1, 1, 0], &[0, 0, 1]]);
    let class = MatrixClass::product(
        Factor::Class(MatrixClass::SignPattern(signs(&["+-", "++"]))),
        MatrixClass::Scaled(b),
    )
    .map_err(|e| e.to_string())?;
    let v = ledger.check(&Problem::new(class, s.clone()), &exact_cfg())?;
    expect_status(&v, Status::Injective, "product class")?;
    let mut table = monomial_table(&v)?;
    table.sort();
    let mut expected: Vec<(String, Rational)> = ["μ1*μ4*λ1*λ3", "μ1*μ4*λ2*λ3", "μ2*μ3*λ1*λ3", "μ2*μ3*λ2*λ3"]
        .iter()
        .map(|m| (m.to_string(), int(1)))
        .collect();
    expected.sort();
    if table != expected {
        return Err(format!("table {table:?}"));
    }
    let mixed = Problem::new(MatrixClass::SignSets(sign_sets(&[&["+", "+", "-"], &["+", "+", "+"]])), s);
    let v = ledger.check(&mixed, &exact_cfg())?;
    expect_status(&v, Status::NotInjective, "mixed signs")?;
    if !verify_certificate(&v, &mixed) {
        return Err("mixed-sign witness rejected".into());
    }
    Ok("POS with the 4 positive monomials; mixed signs NOT_INJECTIVE (verified)".into())
}

fn random_subspace(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Subspace {
    loop {
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
        let v = Matrix::from_ints(&refs);
        if v.rank() == d {
            return Subspace::from_image(&v);
        }
    }
}

fn random_sign(rng: &mut ChaCha8Rng) -> Sign {
    Sign::ALL[rng.gen_range(0..3)]
}

fn criterion_7(ledger: &mut Ledger) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut inj, mut non) = (0, 0);
    for k in 0..500 {
        let n = rng.gen_range(1..=4);
        let d = rng.gen_range(1..=n);
        let s = random_subspace(&mut rng, n, d);
        let class = if k % 2 == 0 {
            let rows: Vec<Vec<i64>> = (0..d).map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect()).collect();
            let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
            MatrixClass::Scaled(Matrix::from_ints(&refs))
        } else {
            let g: Vec<Vec<Sign>> = (0..d).map(|_| (0..n).map(|_| random_sign(&mut rng)).collect()).collect();
            MatrixClass::SignPattern(Grid::from_rows(g).unwrap())
        };
        let p = Problem::new(class, s);
        let det = ledger.check(&p, &route_cfg(RoutePreference::DetOnly))?;
        let sign = ledger.check(&p, &route_cfg(RoutePreference::SignOnly))?;
        if det.method != Method::DetRoute || sign.method != Method::SignRoute || det.status != sign.status {
            return Err(format!(
                "instance {k}: det {} via {}, sign {} via {} for {p:?}",
                det.status, det.method, sign.status, sign.method
            ));
        }
        if det.status == Status::Injective {
            inj += 1;
        } else {
            non += 1;
        }
    }
    Ok(format!("500 instances agree ({inj} INJECTIVE, {non} NOT_INJECTIVE)"))
}

fn criterion_8(ledger: &mut Ledger) -> Outcome {
    let (mut inj, mut non) = (0, 0);
    let all = SignSet::ALL;
    for code in 0..7usize.pow(4) {
        let entries: Vec<SignSet> = (0..4).map(|k| all[(code / 7usize.pow(k)) % 7]).collect();
        let w = Grid::from_row_major(2, 2, entries).unwrap();
        let p = Problem::new(MatrixClass::SignSets(w.clone()), Subspace::full(2));
        let whole = ledger.check(&p, &exact_cfg())?;
        let union = ledger.check(&p, &route_cfg(RoutePreference::PatternUnion))?;
        let mut conj = Status::Injective;
        for pat in enumerate_patterns(&w, 1 << 20).map_err(|e| e.to_string())? {
            let v = ledger.check(&Problem::new(MatrixClass::SignPattern(pat), Subspace::full(2)), &exact_cfg())?;
            if v.status != Status::Injective {
                conj = v.status;
                break;
            }
        }
        if whole.status != conj || union.status != conj {
            return Err(format!(
                "{w:?}: class {} via {}, pattern union {}, conjunction {conj}",
                whole.status, whole.method, union.status
            ));
        }
        if conj == Status::Injective {
            inj += 1;
        } else {
            non += 1;
        }
    }
    Ok(format!("2401 sign-set matrices agree ({inj} INJECTIVE, {non} NOT_INJECTIVE)"))
}

/// Key identifying problems up to identical content, for the falsifier pass.
fn key(p: &Problem) -> String {
    format!("{p:?}")
}

fn criterion_9(ledger: &Ledger) -> Outcome {
    let mut non = 0;
    let mut injective: Vec<&Problem> = Vec::new();
    let mut seen = BTreeSet::new();
    for (p, v) in &ledger.verdicts {
        match v.status {
            Status::NotInjective => {
                non += 1;
                if !verify_certificate(v, p) {
                    return Err(format!("certificate rejected for {p:?}"));
                }
            }
            Status::Injective => {
                if !verify_certificate(v, p) {
                    return Err(format!("injectivity certificate rejected for {p:?}"));
                }
                if seen.insert(key(p)) {
                    injective.push(p);
                }
            }
            Status::Inconclusive => return Err(format!("undecided verdict for {p:?}")),
        }
    }
    let cfg = OracleConfig {
        trials: FALSIFIER_TRIALS,
        seed: FALSIFIER_SEED,
        ..OracleConfig::default()
    };
    for p in &injective {
        if let Some(w) = falsify(p, &cfg).map_err(|e| e.to_string())? {
            return Err(format!("falsifier hit on an INJECTIVE verdict: {p:?} with {w:?}"));
        }
    }
    Ok(format!(
        "{non} NOT_INJECTIVE certificates verified; {} distinct INJECTIVE problems survive {FALSIFIER_TRIALS} trials each",
        injective.len()
    ))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut checked = 0;
    for n in 1..=4 {
        for _ in 0..25 {
            let v: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-3..=3))).collect();
            let e = Matrix::row_vector(&v);
            for tau in SignVector::all(n) {
                let combinatorial = sign_orthogonal(&tau, &sigma(&v)).map_err(|e| e.to_string())?;
                let exact = strict_sign_feasible(&e, &tau, &[]).map_err(|e| e.to_string())?.is_some();
                if combinatorial != exact {
                    return Err(format!("τ = {tau}, v = {v:?}: orthogonality {combinatorial}, feasibility {exact}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (τ, v) pairs agree"))
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, &b| a.max(b.abs()))
}

fn monomial(b: &Matrix, x: &[f64]) -> Vec<f64> {
    (0..b.rows())
        .map(|i| {
            b.row(i)
                .iter()
                .zip(x)
                .map(|(e, xi)| xi.powf(e.to_f64().unwrap()))
                .product()
        })
        .collect()
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut done = 0;
    let mut worst: (f64, f64) = (0.0, 0.0);
    while done < 200 {
        let n = rng.gen_range(2..=5);
        let r = rng.gen_range(1..n);
        let rows: Vec<Vec<i64>> = (0..r).map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        let refs: Vec<&[i64]> = rows.iter().map(|x| x.as_slice()).collect();
        let b = Matrix::from_ints(&refs);
        let k = kernel_basis(&b);
        let coeffs: Vec<Rational> = (0..k.cols()).map(|_| int(rng.gen_range(-2..=2))).collect();
        let v: Vec<Rational> = (0..n)
            .map(|i| coeffs.iter().enumerate().map(|(c, a)| &k[(i, c)] * a).sum())
            .collect();
        if v.iter().all(Zero::is_zero) {
            continue;
        }
        let w: Vec<Rational> = v
            .iter()
            .map(|x| int(Sign::of(x).as_i64()) * rat(rng.gen_range(1..=20), rng.gen_range(1..=5)))
            .collect();
        let (x, y) = lift_monomial_witness(&b, &v, &w).map_err(|e| e.to_string())?;
        if !x.iter().chain(&y).all(|t| *t > 0.0) {
            return Err(format!("non-positive lift for B = {b:?}"));
        }
        let wf: Vec<f64> = w.iter().map(|t| t.to_f64().unwrap()).collect();
        let diff: Vec<f64> = x.iter().zip(&y).zip(&wf).map(|((a, b), c)| a - b - c).collect();
        let d_rel = inf_norm(&diff) / inf_norm(&wf);
        let (xb, yb) = (monomial(&b, &x), monomial(&b, &y));
        let m: Vec<f64> = xb.iter().zip(&yb).map(|(a, b)| a - b).collect();
        let m_rel = inf_norm(&m) / inf_norm(&xb);
        if d_rel > LIFT_TOL || m_rel > LIFT_TOL {
            return Err(format!("residuals {d_rel:e}, {m_rel:e} for B = {b:?}, v = {v:?}"));
        }
        worst = (worst.0.max(d_rel), worst.1.max(m_rel));
        done += 1;
    }
    Ok(format!("200 lifts; worst residuals {:.1e} (difference), {:.1e} (monomials)", worst.0, worst.1))
}

/// Exact existence of `B ∈ Q(𝒲)` with `Bx = y`: rows are independent, and
/// each row is tried with every sign pattern it admits.
fn exists_member(w: &Grid<SignSet>, x: &[Rational], y: &[Rational]) -> bool {
    (0..w.rows()).all(|i| {
        let row = w.row(i);
        let mut e: Vec<Rational> = x.to_vec();
        e.push(-y[i].clone());
        let e = Matrix::row_vector(&e);
        let mut pattern = vec![Sign::Zero; row.len()];
        fn search(row: &[SignSet], k: usize, pattern: &mut Vec<Sign>, e: &Matrix) -> bool {
            if k == row.len() {
                let mut tau = pattern.clone();
                tau.push(Sign::Pos);
                return strict_sign_feasible(e, &SignVector(tau), &[]).unwrap().is_some();
            }
            row[k].iter().any(|s| {
                pattern[k] = s;
                search(row, k + 1, pattern, e)
            })
        }
        search(row, 0, &mut pattern, &e)
    })
}

fn realize(rng: &mut ChaCha8Rng, s: &SignVector) -> Vec<Rational> {
    s.as_slice()
        .iter()
        .map(|t| int(t.as_i64()) * rat(rng.gen_range(1..=9), rng.gen_range(1..=4)))
        .collect()
}

fn criterion_12() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut pairs = 0;
    let mut positive = 0;
    for r in 1..=3 {
        for n in 1..=3 {
            for _ in 0..4 {
                let g: Vec<Vec<SignSet>> = (0..r)
                    .map(|_| (0..n).map(|_| SignSet::ALL[rng.gen_range(0..7)]).collect())
                    .collect();
                let w = Grid::from_rows(g).unwrap();
                for rho in SignVector::all(r) {
                    for tau in SignVector::all(n) {
                        let cond = concordant_pair(&rho, &tau, &w).map_err(|e| e.to_string())?;
                        let x = realize(&mut rng, &tau);
                        let y = realize(&mut rng, &rho);
                        let exists = exists_member(&w, &x, &y);
                        let built = concordance_witness(&w, &x, &y).map_err(|e| e.to_string())?;
                        if let Some(b) = &built {
                            let member = MatrixClass::SignSets(w.clone()).contains(b).unwrap();
                            if !member || b.mul_vec(&x) != y {
                                return Err(format!("constructed B invalid for ρ = {rho}, τ = {tau}"));
                            }
                        }
                        if cond != exists || cond != built.is_some() {
                            return Err(format!(
                                "ρ = {rho}, τ = {tau}, 𝒲 = {w:?}: condition {cond}, exact {exists}, constructed {}",
                                built.is_some()
                            ));
                        }
                        pairs += 1;
                        positive += usize::from(cond);
                    }
                }
            }
        }
    }
    Ok(format!("{pairs} (ρ, τ) pairs agree ({positive} concordant)"))
}

fn report(id: u32, title: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let pass = out.is_ok() && in_time;
    let detail = match &out {
        Ok(s) => s.clone(),
        Err(e) => e.clone(),
    };
    let timing = if in_time {
        format!("{:.2?}", elapsed)
    } else {
        format!("{:.2?} over budget {:.0?}", elapsed, budget)
    };
    println!(
        "criterion {id:>2} {} {title}: {detail} [{timing}]",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

#[test]
fn acceptance() {
    let mut ledger = Ledger::default();
    let mut ok = true;
    ok &= report(1, "scaled 2x2 and positive box", SMALL_CASE_BUDGET, || criterion_1(&mut ledger));
    ok &= report(2, "lower-triangular box and signs", SMALL_CASE_BUDGET, || criterion_2(&mut ledger));
    ok &= report(3, "narrow box vertex table", SMALL_CASE_BUDGET, || criterion_3(&mut ledger));
    ok &= report(4, "stacked box with left factor", SMALL_CASE_BUDGET, || criterion_4(&mut ledger));
    ok &= report(5, "difference left factor", SMALL_CASE_BUDGET, || criterion_5(&mut ledger));
    ok &= report(6, "product class on a plane", SMALL_CASE_BUDGET, || criterion_6(&mut ledger));
    ok &= report(7, "route agreement", SUITE_BUDGET, || criterion_7(&mut ledger));
    ok &= report(8, "pattern union", SUITE_BUDGET, || criterion_8(&mut ledger));
    ok &= report(9, "certificate soundness", SUITE_BUDGET, || criterion_9(&ledger));
    ok &= report(10, "sign orthogonality", SUITE_BUDGET, criterion_10);
    ok &= report(11, "monomial lift", SUITE_BUDGET, criterion_11);
    ok &= report(12, "concordance", SUITE_BUDGET, criterion_12);
    assert!(ok, "acceptance criteria failed");
}
