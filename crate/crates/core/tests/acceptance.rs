//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Tolerances are the constants below.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nra_cegar::abstraction::{static_axioms, AbstractionConfig};
use nra_cegar::axiom::Axiom;
use nra_cegar::cli::{bench, check_vmt_file, to_csv, CSV_HEADER};
use nra_cegar::config::{Config, Engine, ModelFinder};
use nra_cegar::mc::{vmt_nra_check, McVerdict};
use nra_cegar::nra::{smt_nra_check, SmtVerdict};
use nra_cegar::refinement::{
    blocks, frontier_update, monotonicity_lemma, refine, tangent_lemma, Frontier, Frontiers, RefineConfig,
};
use nra_cegar::smtlib::parse_vmt;
use nra_cegar::solver::{Logic, SatResult, Session, SolverCommand};
use nra_cegar::stats::Journal;
use nra_cegar::terms::rat::{int, ratio};
use nra_cegar::terms::{contains_mul, evaluate_with, FmulMode, Model, Rat, Sort, Term, Value, Var};

const SEED: u64 = 0x5eed_2024;
const RUNNING_EXAMPLE_LIMIT: Duration = Duration::from_secs(60);
const KIND_MAX_K: u32 = 20;
const TRACE_STATES: usize = 10;
const SAMPLES_PER_FAMILY: usize = 100_000;
const SPURIOUS_MODELS: usize = 1_000;
const FUZZ_FORMULAS: usize = 500;
const FUZZ_MAX_VARS: usize = 4;
const FUZZ_MAX_MULS: usize = 3;
const FUZZ_COEFF: i64 = 5;
const FUZZ_TIMEOUT: Duration = Duration::from_secs(10);
const FUZZ_REFINEMENTS: usize = 40;
const GRID_HALF_WIDTH: i64 = 8;
const GRID_STEPS_PER_UNIT: i64 = 8;
const MIN_CORPUS: usize = 12;
const CORPUS_LIMIT: Duration = Duration::from_secs(15 * 60);
const CORPUS_INSTANCE_TIMEOUT: Duration = Duration::from_secs(120);

type Outcome = Result<String, String>;

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn real(name: &str) -> Var {
    Var::new(name, Sort::Real)
}

fn holds_as_product(t: &Term, m: &Model) -> bool {
    matches!(evaluate_with(t, m, FmulMode::Product), Ok(Value::Bool(true)))
}

/// Small rationals, with extra weight on integers and on zero so that the
/// equality branches of the lemmas are exercised.
fn sample_rat(rng: &mut ChaCha8Rng) -> Rat {
    match rng.gen_range(0..10) {
        0 => Rat::zero(),
        1..=4 => int(rng.gen_range(-12..=12)),
        _ => ratio(rng.gen_range(-60..=60), rng.gen_range(1..=9)),
    }
}

fn running_example() -> Outcome {
    let path = corpus_dir().join("intro.vmt");
    let cfg = Config {
        timeout: Some(RUNNING_EXAMPLE_LIMIT),
        ..Config::default()
    };
    let started = Instant::now();
    let v = check_vmt_file(&path, None, &cfg, &mut Journal::default())?;
    let took = started.elapsed();
    if !matches!(v, McVerdict::Safe) || took > RUNNING_EXAMPLE_LIMIT {
        return Err(format!("kind-houdini gave {v:?} after {took:.1?}"));
    }
    let plain = Config {
        engine: Engine::Kind,
        max_k: KIND_MAX_K,
        timeout: Some(RUNNING_EXAMPLE_LIMIT),
        ..Config::default()
    };
    let k = check_vmt_file(&path, None, &plain, &mut Journal::default())?;
    match k {
        McVerdict::Unknown { reason, .. } => Ok(format!(
            "SAFE in {took:.1?}; plain k-induction to k={KIND_MAX_K}: UNKNOWN ({reason})"
        )),
        other => Err(format!("plain k-induction gave {other:?}")),
    }
}

fn unsafe_trace() -> Outcome {
    let path = corpus_dir().join("intro_z_le_100.vmt");
    let ts = parse_vmt(&std::fs::read_to_string(&path).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let prop = ts.property(0).ok_or("no property 0")?.clone();
    let cfg = Config {
        timeout: Some(RUNNING_EXAMPLE_LIMIT),
        ..Config::default()
    };
    let started = Instant::now();
    let v = vmt_nra_check(&ts, &prop, &cfg, &mut Journal::default()).map_err(|e| e.to_string())?;
    let took = started.elapsed();
    let McVerdict::Unsafe(trace) = v else {
        return Err(format!("verdict {v:?}"));
    };
    trace.replay(&ts, &prop)?;
    let last = trace.states.last().unwrap();
    let val = |n: &str| last.eval_real(&Term::var(real(n))).map_err(|e| e.to_string());
    let end = (val("x")?, val("y")?, val("z")?);
    if trace.len() != TRACE_STATES || end != (int(11), int(11), int(121)) || took > RUNNING_EXAMPLE_LIMIT {
        return Err(format!("{} states ending at {end:?} after {took:.1?}", trace.len()));
    }
    Ok(format!(
        "{TRACE_STATES}-state trace ending at (11, 11, 121), replays exactly, {took:.1?}"
    ))
}

fn lemma_validity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (x, y, w, z) = (real("x"), real("y"), real("w"), real("z"));
    let tx = Term::var(x.clone());
    let ty = Term::var(y.clone());
    let tw = Term::var(w.clone());
    let tz = Term::var(z.clone());
    let xy = Term::fmul(tx.clone(), ty.clone());

    let assign = |rng: &mut ChaCha8Rng, pool: &[Rat]| {
        let mut m = Model::new();
        for v in [&x, &y, &w, &z] {
            // reuse a lemma constant now and then to hit the boundary cases
            let r = if !pool.is_empty() && rng.gen_bool(0.2) {
                pool[rng.gen_range(0..pool.len())].clone()
            } else {
                sample_rat(rng)
            };
            m.set_real(v.clone(), r);
        }
        m
    };

    let mut bad = Vec::new();
    for _ in 0..SAMPLES_PER_FAMILY {
        let (a, b) = (sample_rat(&mut rng), sample_rat(&mut rng));
        let lemma = tangent_lemma(&xy, &a, &b);
        let m = assign(&mut rng, &[a.clone(), b.clone()]);
        if contains_mul(&lemma.formula) || !holds_as_product(&lemma.formula, &m) {
            bad.push(format!("tangent at ({a}, {b})"));
        }
    }

    let pairs = [
        (xy.clone(), Term::fmul(tw.clone(), tz.clone())),
        (xy.clone(), Term::fmul(tx.clone(), tz.clone())),
        (Term::fmul(tx.clone(), tx.clone()), Term::fmul(ty.clone(), tw.clone())),
        (Term::fmul(tx.clone(), ty.clone()), Term::fmul(Term::int(3), tz.clone())),
    ];
    let mono: Vec<Axiom> = pairs
        .iter()
        .flat_map(|(m1, m2)| [monotonicity_lemma(m1, m2, false), monotonicity_lemma(m1, m2, true)])
        .collect();
    for i in 0..SAMPLES_PER_FAMILY {
        let lemma = &mono[i % mono.len()];
        let m = assign(&mut rng, &[]);
        if contains_mul(&lemma.formula) || !holds_as_product(&lemma.formula, &m) {
            bad.push(format!("monotonicity {}", lemma.formula));
        }
    }

    let cfg = AbstractionConfig {
        sign_axioms: true,
        commutativity: true,
    };
    let apps = BTreeSet::from([
        xy.clone(),
        Term::fmul(tx.clone(), tx.clone()),
        Term::fmul(Term::add([tx.clone(), Term::int(1)]), tz.clone()),
    ]);
    let (statics, _) = static_axioms(&apps, &cfg);
    for i in 0..SAMPLES_PER_FAMILY {
        let lemma = &statics[i % statics.len()];
        let m = assign(&mut rng, &[Rat::zero(), int(-1)]);
        if contains_mul(&lemma.formula) || !holds_as_product(&lemma.formula, &m) {
            bad.push(format!("static {}", lemma.formula));
        }
    }

    if bad.is_empty() {
        Ok(format!(
            "{SAMPLES_PER_FAMILY} samples each for tangent, monotonicity and static lemmas, 0 violations"
        ))
    } else {
        Err(format!("{} violations, first: {}", bad.len(), bad[0]))
    }
}

fn refinement_progress() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let names = ["x", "y", "z"];
    let vars: Vec<Term> = names.iter().map(|n| Term::var(real(n))).collect();
    let shapes = [
        Term::fmul(vars[0].clone(), vars[1].clone()),
        Term::fmul(vars[1].clone(), vars[2].clone()),
        Term::fmul(vars[0].clone(), vars[0].clone()),
        Term::fmul(Term::add([vars[0].clone(), vars[2].clone()]), vars[1].clone()),
    ];
    let mut shared = Frontiers::new();
    let mut lemmas_total = 0;
    for n in 0..SPURIOUS_MODELS {
        let mut model = Model::new();
        for v in names {
            model.set_real(real(v), sample_rat(&mut rng));
        }
        let mut fmuls = BTreeSet::new();
        for s in &shapes {
            if rng.gen_bool(0.6) {
                fmuls.insert(s.clone());
            }
        }
        if fmuls.is_empty() {
            fmuls.insert(shapes[n % shapes.len()].clone());
        }
        let list: Vec<Term> = fmuls.iter().cloned().collect();
        let forced = rng.gen_range(0..list.len());
        for (i, m) in list.iter().enumerate() {
            let (s, t) = m.fmul_args().unwrap();
            let product = model.eval_real(s).unwrap() * model.eval_real(t).unwrap();
            let value = if i == forced || rng.gen_bool(0.3) {
                let mut v = sample_rat(&mut rng);
                if v == product {
                    v += Rat::one();
                }
                v
            } else {
                product
            };
            model.set_fmul(m.clone(), value);
        }
        // half the models see frontiers already widened by earlier ones
        let mut fresh = Frontiers::new();
        let frontiers = if n % 2 == 0 { &mut shared } else { &mut fresh };
        let lemmas =
            refine(&model, &fmuls, frontiers, &RefineConfig::default()).map_err(|e| format!("model {n}: {e}"))?;
        if !blocks(&model, &lemmas) {
            return Err(format!("model {n} is not blocked by {} lemmas", lemmas.len()));
        }
        lemmas_total += lemmas.len();
    }
    Ok(format!(
        "{SPURIOUS_MODELS} spurious models blocked ({lemmas_total} lemmas)"
    ))
}

fn frontier_cases() -> Outcome {
    let q = |n: i64, d: i64| ratio(n, d);
    let fr = |a: Rat, b: Rat, c: Rat, d: Rat| Frontier::new(a, b, c, d);
    let i = int;
    // (start, point, extra points, next frontier)
    let cases = vec![
        (
            Frontier::default(),
            (i(2), i(3)),
            vec![(i(2), i(0)), (i(0), i(3))],
            fr(i(0), i(2), i(0), i(3)),
        ),
        (
            fr(i(0), i(2), i(0), i(3)),
            (i(-1), i(-2)),
            vec![(i(-1), i(3)), (i(2), i(-2))],
            fr(i(-1), i(2), i(-2), i(3)),
        ),
        (
            fr(i(-1), i(2), i(-2), i(3)),
            (i(-3), i(5)),
            vec![(i(-3), i(-2)), (i(2), i(5))],
            fr(i(-3), i(2), i(-2), i(5)),
        ),
        (
            fr(i(-3), i(2), i(-2), i(5)),
            (i(4), i(-6)),
            vec![(i(4), i(5)), (i(-3), i(-6))],
            fr(i(-3), i(4), i(-6), i(5)),
        ),
        (
            fr(q(1, 2), i(1), q(1, 3), i(2)),
            (i(3), q(7, 2)),
            vec![(i(3), q(1, 3)), (q(1, 2), q(7, 2))],
            fr(q(1, 2), i(3), q(1, 3), q(7, 2)),
        ),
        (
            fr(q(1, 2), i(1), q(1, 3), i(2)),
            (i(0), i(-1)),
            vec![(i(0), i(2)), (i(1), i(-1))],
            fr(i(0), i(1), i(-1), i(2)),
        ),
        (
            fr(q(1, 2), i(1), q(1, 3), i(2)),
            (i(-2), q(5, 2)),
            vec![(i(-2), q(1, 3)), (i(1), q(5, 2))],
            fr(i(-2), i(1), q(1, 3), q(5, 2)),
        ),
        (
            fr(q(1, 2), i(1), q(1, 3), i(2)),
            (q(7, 4), i(-3)),
            vec![(q(7, 4), i(2)), (q(1, 2), i(-3))],
            fr(q(1, 2), q(7, 4), i(-3), i(2)),
        ),
    ];
    let n = cases.len();
    for (k, (start, (a, b), extra, next)) in cases.into_iter().enumerate() {
        let (got_extra, got_next) = frontier_update(&start, &a, &b);
        if got_extra != extra || got_next != next || !got_next.contains(&start) {
            return Err(format!(
                "case {k}: from {start} at ({a}, {b}) got {got_extra:?} and {got_next}"
            ));
        }
    }
    Ok(format!("{n} corner cases reproduce points and frontiers"))
}

/// Random conjunction (sometimes with one disjunction) of linear atoms
/// plus at most `FUZZ_MAX_MULS` products.
fn fuzz_formula(rng: &mut ChaCha8Rng) -> (Term, usize) {
    let nvars = rng.gen_range(1..=FUZZ_MAX_VARS);
    let vars: Vec<Term> = (0..nvars).map(|i| Term::var(real(&format!("v{i}")))).collect();
    let coeff = |rng: &mut ChaCha8Rng| {
        let mut c = rng.gen_range(-FUZZ_COEFF..=FUZZ_COEFF);
        if c == 0 {
            c = 1;
        }
        int(c)
    };
    let mut muls_left = rng.gen_range(1..=FUZZ_MAX_MULS);
    let natoms = rng.gen_range(1..=3);
    let mut atoms = Vec::new();
    for k in 0..natoms {
        let mut sum = Vec::new();
        for v in &vars {
            if rng.gen_bool(0.5) {
                sum.push(Term::scale(coeff(rng), v.clone()));
            }
        }
        let take = if k + 1 == natoms {
            muls_left
        } else {
            rng.gen_range(0..=muls_left)
        };
        for _ in 0..take {
            let a = vars[rng.gen_range(0..nvars)].clone();
            let b = vars[rng.gen_range(0..nvars)].clone();
            sum.push(Term::scale(coeff(rng), Term::mul(a, b)));
        }
        muls_left -= take;
        let lhs = Term::add(sum);
        let rhs = Term::int(rng.gen_range(-FUZZ_COEFF..=FUZZ_COEFF));
        atoms.push(match rng.gen_range(0..5) {
            0 => Term::lt(lhs, rhs),
            1 => Term::le(lhs, rhs),
            2 => Term::eq(lhs, rhs),
            3 => Term::ge(lhs, rhs),
            _ => Term::gt(lhs, rhs),
        });
    }
    let phi = if atoms.len() >= 2 && rng.gen_bool(0.3) {
        let last = atoms.pop().unwrap();
        let prev = atoms.pop().unwrap();
        atoms.push(Term::or2(prev, last));
        Term::and(atoms)
    } else {
        Term::and(atoms)
    };
    (phi, nvars)
}

/// Exhaustive search of the grid with step 1/8 over [-8, 8]^n. Grid values
/// are dyadic with small exponents, so f64 arithmetic on them is exact.
fn grid_model(phi: &Term, nvars: usize) -> Option<Vec<f64>> {
    use nra_cegar::terms::Node;
    fn ev(t: &Term, x: &[f64]) -> Result<f64, bool> {
        match t.node() {
            Node::Var(v) => Ok(x[v.name[1..].parse::<usize>().unwrap()]),
            Node::Real(c) => Ok(num::ToPrimitive::to_f64(c).unwrap()),
            Node::Add(items) => items.iter().try_fold(0.0, |acc, u| Ok(acc + ev(u, x)?)),
            Node::Scale(c, u) => Ok(num::ToPrimitive::to_f64(c).unwrap() * ev(u, x)?),
            Node::Mul(a, b) => Ok(ev(a, x)? * ev(b, x)?),
            _ => Err(truth(t, x)),
        }
    }
    fn truth(t: &Term, x: &[f64]) -> bool {
        let num = |u: &Term| ev(u, x).expect("numeric subterm");
        match t.node() {
            Node::And(items) => items.iter().all(|u| truth(u, x)),
            Node::Or(items) => items.iter().any(|u| truth(u, x)),
            Node::Not(a) => !truth(a, x),
            Node::Le(a, b) => num(a) <= num(b),
            Node::Lt(a, b) => num(a) < num(b),
            Node::Eq(a, b) => num(a) == num(b),
            Node::Bool(b) => *b,
            other => panic!("unexpected node in fuzz formula: {other:?}"),
        }
    }
    let side = (2 * GRID_HALF_WIDTH * GRID_STEPS_PER_UNIT + 1) as usize;
    let total = side.pow(nvars as u32);
    let mut x = vec![0.0; nvars];
    for mut code in 0..total {
        for xi in x.iter_mut() {
            *xi = (code % side) as f64 / GRID_STEPS_PER_UNIT as f64 - GRID_HALF_WIDTH as f64;
            code /= side;
        }
        if truth(phi, &x) {
            return Some(x);
        }
    }
    None
}

fn nra_oracle(phi: &Term) -> Option<bool> {
    let mut s = Session::start(&SolverCommand::from_env(), Logic::Nra).ok()?;
    s.assert(phi).ok()?;
    match s.check_sat(Some(FUZZ_TIMEOUT)).ok()? {
        SatResult::Sat => Some(true),
        SatResult::Unsat => Some(false),
        SatResult::Unknown(_) => None,
    }
}

fn smt_loop_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let cfg = Config {
        timeout: Some(FUZZ_TIMEOUT),
        max_refinements: FUZZ_REFINEMENTS,
        model_finder: ModelFinder::Lines,
        ..Config::default()
    };
    let (mut sat, mut unsat, mut unknown, mut by_grid) = (0, 0, 0, 0);
    let mut violations = Vec::new();
    for n in 0..FUZZ_FORMULAS {
        let (phi, nvars) = fuzz_formula(&mut rng);
        match smt_nra_check(&phi, &cfg, cfg.budget(), &mut Journal::default()) {
            SmtVerdict::Sat(m) => {
                sat += 1;
                if !matches!(m.eval_bool(&phi), Ok(true)) {
                    violations.push(format!("#{n} sat model fails {phi}"));
                }
            }
            SmtVerdict::Unsat(_) => {
                unsat += 1;
                let counter = match nra_oracle(&phi) {
                    Some(is_sat) => is_sat,
                    None => {
                        by_grid += 1;
                        grid_model(&phi, nvars).is_some()
                    }
                };
                if counter {
                    violations.push(format!("#{n} unsat but satisfiable: {phi}"));
                }
            }
            SmtVerdict::Unknown(why) => {
                if why.starts_with("internal error") {
                    violations.push(format!("#{n} {why}"));
                }
                unknown += 1;
            }
        }
    }
    let summary = format!(
        "{FUZZ_FORMULAS} formulas: {sat} sat, {unsat} unsat ({by_grid} by grid), {unknown} unknown, {} violations",
        violations.len()
    );
    if violations.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; first: {}", violations[0]))
    }
}

fn expected(path: &Path) -> Option<String> {
    let text = std::fs::read_to_string(path.with_extension("expected")).ok()?;
    text.split_whitespace().next().map(str::to_string)
}

fn corpus_self_checks() -> Outcome {
    let cfg = Config {
        self_check: true,
        timeout: Some(CORPUS_INSTANCE_TIMEOUT),
        ..Config::default()
    };
    let mut checks = 0;
    let mut runs = 0;
    for path in nra_cegar::cli::instances(&corpus_dir())? {
        if path.extension().and_then(|e| e.to_str()) != Some("vmt") {
            continue;
        }
        let mut journal = Journal::default();
        // a failed self check surfaces as an internal error
        check_vmt_file(&path, None, &cfg, &mut journal)?;
        checks += journal.stats.self_checks;
        runs += 1;
    }
    if checks == 0 {
        return Err(format!("no self checks ran over {runs} systems"));
    }
    Ok(format!(
        "{checks} untiming and reduction checks over {runs} systems, none failed"
    ))
}

fn strip_time(csv: &str) -> String {
    let col = CSV_HEADER.split(',').position(|c| c == "time").unwrap();
    csv.lines()
        .map(|l| {
            let mut f: Vec<&str> = l.split(',').collect();
            f.remove(col);
            f.join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Runs the corpus twice; the first run is the timed one.
fn corpus_runs() -> (Outcome, Outcome) {
    let cfg = Config {
        timeout: Some(CORPUS_INSTANCE_TIMEOUT),
        ..Config::default()
    };
    let dir = corpus_dir();
    let started = Instant::now();
    let first = bench(&dir, &cfg, 1);
    let took = started.elapsed();
    let second = bench(&dir, &cfg, 1);
    let (Ok((rows, summary)), Ok((rows2, _))) = (first, second) else {
        let e = Err("cannot read the corpus".to_string());
        return (e.clone(), e);
    };
    let a = to_csv(&rows);
    let b = to_csv(&rows2);
    let determinism = if strip_time(&a) == strip_time(&b) {
        Ok(format!("{} rows identical apart from time", rows.len()))
    } else {
        Err(format!("CSVs differ:\n{a}\n---\n{b}"))
    };
    let words: BTreeSet<String> = rows
        .iter()
        .filter_map(|r| expected(&dir.join(&r.file)))
        .map(|w| w.to_uppercase())
        .collect();
    let spans = ["SAFE", "UNSAFE", "UNKNOWN"].iter().all(|w| words.contains(*w));
    let has_tcm = rows.iter().any(|r| r.file.starts_with("tcm_"));
    let complete = if rows.len() >= MIN_CORPUS && spans && has_tcm && summary.mismatches == 0 && took <= CORPUS_LIMIT {
        Ok(format!("{summary} in {took:.1?}"))
    } else {
        let bad: Vec<&str> = rows.iter().filter(|r| r.mismatch()).map(|r| r.file.as_str()).collect();
        Err(format!(
            "{summary} in {took:.1?}, mismatching: {bad:?}, spans all verdicts: {spans}"
        ))
    };
    (complete, determinism)
}

fn main() {
    let mut failed = 0;
    let mut report = |name: &str, o: Outcome| match o {
        Ok(msg) => println!("PASS  {name}: {msg}"),
        Err(msg) => {
            failed += 1;
            println!("FAIL  {name}: {msg}");
        }
    };
    if !SolverCommand::from_env().is_available() {
        println!(
            "FAIL  solver: `{}` is not runnable; every criterion needs it",
            SolverCommand::from_env()
        );
        std::process::exit(1);
    }
    report("running example safe, plain k-induction unknown", running_example());
    report("unsafe running example trace", unsafe_trace());
    report("lemma validity sampling", lemma_validity());
    report("refinement progress", refinement_progress());
    report("frontier cases", frontier_cases());
    report("smt loop vs complete oracle", smt_loop_oracle());
    report("untiming and reduction self checks", corpus_self_checks());
    let (complete, determinism) = corpus_runs();
    report("determinism", determinism);
    report("corpus verdicts and time", complete);
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
