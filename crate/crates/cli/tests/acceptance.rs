//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use signject::crn::{multistationarity_witness, parse_network, preclude_multistationarity};
use signject::descartes::{check_bnd, univariate_sign_variations};
use signject::injectivity::{
    check_injectivity, check_injectivity_with, gamma_det_poly, residual_tolerance, CheckOptions, Counterexample,
    Route, SubsetSpec, Verdict,
};
use signject::io::matrix_to_json;
use signject::linalg::{column_basis, gale_dual, kernel_basis, rank, row_basis, verify_gale_relation};
use signject::matroid::{covectors, image_signs, matroid_vectors};
use signject::numeric::{evaluate_map, evaluate_map_exact, relative_residual_bound};
use signject::oracle::{brute_force_sign_set, naive_symbolic_gamma_det, sampled_injectivity_search, SignSetMode};
use signject::{Rational, RationalMatrix};

const ORACLE_SAMPLES: usize = 10_000;
const ORACLE_SEED: u64 = 0;

type Check = Result<String, String>;

fn int_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> RationalMatrix {
    let rows = (0..rows)
        .map(|_| (0..cols).map(|_| Rational::from(rng.gen_range(-bound..=bound))).collect())
        .collect();
    RationalMatrix::from_rows(rows).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn positive(v: &[Rational]) -> bool {
    v.iter().all(|q| q.cmp0().is_gt())
}

// Instance families, shared with the determinism rerun.

fn bnd_instances() -> Vec<(RationalMatrix, RationalMatrix, bool)> {
    let mut out = Vec::new();
    for k in [3, 5, 9] {
        let b = RationalMatrix::from_ints(&[[1], [2], [k]]);
        out.push((RationalMatrix::from_ints(&[[1, -1, 1]]), b.clone(), false));
        out.push((RationalMatrix::from_ints(&[[1, 2, 3]]), b, true));
    }
    out
}

fn birch_instances() -> Vec<RationalMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut out = Vec::new();
    while out.len() < 100 {
        let n = rng.gen_range(1..=4);
        let r = rng.gen_range(n..=7);
        let a = int_matrix(&mut rng, n, r, 5);
        if rank(&a) == n {
            out.push(a);
        }
    }
    out
}

fn image_instances() -> Vec<(RationalMatrix, RationalMatrix)> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut out = Vec::new();
    while out.len() < 200 {
        let n = rng.gen_range(1..=4);
        let r = rng.gen_range(1..=4);
        let a = int_matrix(&mut rng, n, r, 3);
        let b = int_matrix(&mut rng, r, n, 3);
        if rank(&a) > 0 {
            out.push((a, b));
        }
    }
    out
}

/// `(A', B, Z)` with `A'` a row basis of `A` and `Z` a Gale dual of its
/// column space when `A` is not of full row rank.
fn det_instances() -> Vec<(RationalMatrix, RationalMatrix, Option<RationalMatrix>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut out = Vec::new();
    while out.len() < 100 {
        let n = rng.gen_range(1..=4);
        let r = rng.gen_range(1..=4);
        let a = int_matrix(&mut rng, n, r, 3);
        let b = int_matrix(&mut rng, r, n, 3);
        let aprime = row_basis(&a);
        if aprime.rows() == 0 {
            continue;
        }
        let z = (aprime.rows() < n).then(|| gale_dual(&column_basis(&a)).unwrap());
        out.push((aprime, b, z));
    }
    out
}

fn gale_instances() -> Vec<RationalMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut out = Vec::new();
    while out.len() < 100 {
        let n = rng.gen_range(2..=5);
        let s = rng.gen_range(1..n);
        let c = int_matrix(&mut rng, n, s, 4);
        if rank(&c) == s {
            out.push(c);
        }
    }
    out
}

fn covector_instances() -> Vec<RationalMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut out = Vec::new();
    while out.len() < 50 {
        let r = rng.gen_range(1..=5);
        let n = rng.gen_range(1..=r);
        let a = int_matrix(&mut rng, n, r, 3);
        if rank(&a) == n {
            out.push(a);
        }
    }
    out
}

/// Spanning matrices of random subspaces and of their orthogonal
/// complements.
fn duality_instances() -> Vec<(RationalMatrix, RationalMatrix)> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    (0..100)
        .map(|_| {
            let n = rng.gen_range(1..=5);
            let s = rng.gen_range(1..=n);
            let c = int_matrix(&mut rng, n, s, 3);
            let perp = kernel_basis(&c.transpose());
            (c, perp)
        })
        .collect()
}

const CRN_WORKED: [(&str, bool); 3] = [
    ("A -> B; B -> A", true),
    ("0 -> X; X -> 0", true),
    ("0 -> X; X -> 0; 2X -> 3X", false),
];

fn special_instance() -> (RationalMatrix, RationalMatrix) {
    (RationalMatrix::from_ints(&[[1, -1]]), RationalMatrix::from_ints(&[[1], [1]]))
}

// Criteria.

fn c1_univariate() -> Check {
    let start = Instant::now();
    for (a, b, expect) in bnd_instances() {
        let rep = check_bnd(&a, &b).map_err(|e| e.to_string())?;
        ensure(rep.holds == expect, || format!("bnd on A={a:?}, B={b:?} gave {}", rep.holds))?;
    }
    let q = Rational::from;
    for k in [3usize, 5, 9] {
        for c0 in [-7i64, -1, 0, 1, 4] {
            let mut coeffs = vec![q(0); k + 1];
            coeffs[0] = q(c0);
            coeffs[1] = q(1);
            coeffs[2] = q(-1);
            coeffs[k] = q(1);
            let want = if c0 < 0 { 3 } else { 2 };
            let got = univariate_sign_variations(&coeffs);
            ensure(got == want, || format!("k={k}, c0={c0}: {got} variations, expected {want}"))?;
        }
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!("6 bnd verdicts, 15 variation counts, {:.2?}", start.elapsed()))
}

fn c2_birch() -> Check {
    let start = Instant::now();
    for a in birch_instances() {
        let v = check_injectivity(&a, &a.transpose(), &SubsetSpec::FullSpace).map_err(|e| e.to_string())?;
        ensure(v.injective, || format!("not injective: A = {}", matrix_to_json(&a)))?;
    }
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!("100 instances, {:.2?}", start.elapsed()))
}

struct RouteRun {
    a: RationalMatrix,
    b: RationalMatrix,
    verdicts: Vec<Verdict>,
}

fn route_runs() -> Result<(Vec<RouteRun>, Duration), String> {
    let start = Instant::now();
    let mut runs = Vec::new();
    for (a, b) in image_instances() {
        let s = SubsetSpec::Image(a.clone());
        let mut verdicts = Vec::new();
        for route in [Route::Minors, Route::DetPoly, Route::SignSearch] {
            let opts = CheckOptions { route, ..Default::default() };
            verdicts.push(check_injectivity_with(&a, &b, &s, &opts).map_err(|e| e.to_string())?);
        }
        runs.push(RouteRun { a, b, verdicts });
    }
    Ok((runs, start.elapsed()))
}

fn c3_routes(runs: &[RouteRun], elapsed: Duration) -> Check {
    let mut injective = 0;
    for run in runs {
        let first = run.verdicts[0].injective;
        ensure(run.verdicts.iter().all(|v| v.injective == first), || {
            format!("routes disagree on A = {}, B = {}", matrix_to_json(&run.a), matrix_to_json(&run.b))
        })?;
        injective += usize::from(first);
    }
    within(elapsed, Duration::from_secs(300))?;
    Ok(format!("200 instances, {injective} injective, 0 disagreements, {elapsed:.2?}"))
}

fn check_counterexample(a: &RationalMatrix, b: &RationalMatrix, s: &SubsetSpec, ce: &Counterexample) -> Result<(), String> {
    ensure(positive(&ce.kappa) && positive(&ce.x) && positive(&ce.y), || "nonpositive entry".into())?;
    ensure(ce.x != ce.y, || "x = y".into())?;
    ensure(s.contains_difference(&ce.x, &ce.y).map_err(|e| e.to_string())?, || "x - y not in S".into())?;
    if let Some(fx) = evaluate_map_exact(a, b, &ce.kappa, &ce.x).map_err(|e| e.to_string())? {
        let fy = evaluate_map_exact(a, b, &ce.kappa, &ce.y).map_err(|e| e.to_string())?;
        return ensure(Some(fx) == fy, || "exact images differ".into());
    }
    let fx = evaluate_map(a, b, &ce.kappa, &ce.x, 256).map_err(|e| e.to_string())?;
    let fy = evaluate_map(a, b, &ce.kappa, &ce.y, 256).map_err(|e| e.to_string())?;
    let bound = relative_residual_bound(&fx, &fy, 256);
    ensure(bound <= residual_tolerance(256), || format!("residual bound {bound} at 256 bits"))
}

fn c4_counterexamples(runs: &[RouteRun]) -> Check {
    let mut checked = 0;
    for run in runs.iter().filter(|r| !r.verdicts[0].injective) {
        let s = SubsetSpec::Image(run.a.clone());
        for v in &run.verdicts {
            let ce = v.counterexample.as_ref().ok_or_else(|| format!("no counterexample via {:?}", v.method))?;
            check_counterexample(&run.a, &run.b, &s, ce)
                .map_err(|e| format!("{e}: A = {}, B = {}", matrix_to_json(&run.a), matrix_to_json(&run.b)))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} counterexamples verified (3 routes per instance)"))
}

fn c5_oracle(runs: &[RouteRun]) -> Check {
    let start = Instant::now();
    let mut checked = 0;
    for run in runs.iter().filter(|r| r.verdicts[0].injective) {
        let s = SubsetSpec::Image(run.a.clone());
        let rep = sampled_injectivity_search(&run.a, &run.b, &s, ORACLE_SAMPLES, ORACLE_SEED)
            .map_err(|e| e.to_string())?;
        ensure(rep.violation.is_none(), || {
            format!("violation on A = {}, B = {}", matrix_to_json(&run.a), matrix_to_json(&run.b))
        })?;
        checked += 1;
    }
    Ok(format!("{checked} injective instances, {ORACLE_SAMPLES} samples each, {:.2?}", start.elapsed()))
}

fn c6_det_poly() -> Check {
    for (aprime, b, z) in det_instances() {
        let fast = gamma_det_poly(&aprime, &b, z.as_ref()).map_err(|e| e.to_string())?;
        let slow = naive_symbolic_gamma_det(&aprime, &b, z.as_ref()).map_err(|e| e.to_string())?;
        ensure(fast == slow, || format!("mismatch on A' = {}, B = {}", matrix_to_json(&aprime), matrix_to_json(&b)))?;
    }
    Ok("100 instances, term-by-term equal".into())
}

fn c7_gale() -> Check {
    for c in gale_instances() {
        let z = gale_dual(&c).map_err(|e| e.to_string())?;
        ensure(z.mul(&c).map_err(|e| e.to_string())?.is_zero(), || "Z C != 0".into())?;
        ensure(rank(&z) == c.rows() - c.cols(), || "Z has wrong rank".into())?;
        let delta = verify_gale_relation(&c, &z).map_err(|e| format!("C = {}: {e}", matrix_to_json(&c)))?;
        ensure(delta.cmp0().is_ne(), || "delta = 0".into())?;
    }
    Ok("100 instances, one nonzero delta each".into())
}

fn c8_covectors() -> Check {
    for a in covector_instances() {
        let cov = covectors(&a).map_err(|e| e.to_string())?.into_set();
        let brute = brute_force_sign_set(&a.transpose(), SignSetMode::Image).map_err(|e| e.to_string())?;
        ensure(cov == brute, || format!("covectors differ on A = {}", matrix_to_json(&a)))?;
        let vec = matroid_vectors(&a).into_set();
        let brute = brute_force_sign_set(&a, SignSetMode::Kernel).map_err(|e| e.to_string())?;
        ensure(vec == brute, || format!("vectors differ on A = {}", matrix_to_json(&a)))?;
    }
    Ok("50 instances, covectors and vectors equal".into())
}

fn c9_duality() -> Check {
    for (c, perp) in duality_instances() {
        let s = image_signs(&c).into_set();
        let t = image_signs(&perp).into_set();
        ensure(s.intersection(&t).is_trivial(), || format!("shared sign vector for C = {}", matrix_to_json(&c)))?;
        let bs = brute_force_sign_set(&c, SignSetMode::Image).map_err(|e| e.to_string())?;
        let bt = brute_force_sign_set(&perp, SignSetMode::Image).map_err(|e| e.to_string())?;
        ensure(bs == s && bt == t, || format!("sign sets differ from brute force for C = {}", matrix_to_json(&c)))?;
    }
    Ok("100 subspaces, σ(S) ∩ σ(S^⊥) = {0}".into())
}

fn c10_crn() -> Check {
    let mut detail = String::new();
    for (text, expect) in CRN_WORKED {
        let start = Instant::now();
        let net = parse_network(text).map_err(|e| e.to_string())?;
        let v = preclude_multistationarity(&net).map_err(|e| e.to_string())?;
        ensure(v.precluded == expect, || format!("{text:?}: precluded = {}", v.precluded))?;
        if !expect {
            let pair = v.steady_state_pair.as_ref().ok_or_else(|| format!("{text:?}: no steady-state pair"))?;
            ensure(positive(&pair.kappa) && positive(&pair.x) && positive(&pair.y), || "nonpositive".into())?;
            ensure(pair.x != pair.y, || "x = y".into())?;
            for p in [&pair.x, &pair.y] {
                let f = evaluate_map_exact(&v.n, &v.v, &pair.kappa, p)
                    .map_err(|e| e.to_string())?
                    .ok_or("non-integral exponents")?;
                ensure(f.iter().all(|q| q.cmp0().is_eq()), || format!("f = {f:?} at {p:?}"))?;
            }
            let s = SubsetSpec::Image(v.n.clone());
            ensure(s.contains_difference(&pair.x, &pair.y).map_err(|e| e.to_string())?, || "x - y not in im N".into())?;
            let _ = write!(detail, " witness x={:?} y={:?} κ={:?};", pair.x, pair.y, pair.kappa);
        }
        within(start.elapsed(), Duration::from_secs(1))?;
    }
    Ok(format!("3 networks;{detail} residual 0"))
}

fn c11_special() -> Check {
    let (m, c) = special_instance();
    let s = SubsetSpec::Image(c);
    let w = multistationarity_witness(&m, &s, false).map_err(|e| e.to_string())?.ok_or("no witness")?;
    ensure(positive(&w.x) && positive(&w.y) && w.x != w.y, || "invalid points".into())?;
    ensure(s.contains_difference(&w.x, &w.y).map_err(|e| e.to_string())?, || "x - y not in S".into())?;
    ensure(m.mul_vec(&w.v).map_err(|e| e.to_string())?.iter().all(|q| q.cmp0().is_eq()), || "M v != 0".into())?;
    let mono = |p: &[Rational]| Rational::from(&p[0] / &p[1]);
    ensure(mono(&w.x) == mono(&w.y), || "x^M != y^M".into())?;
    Ok(format!("x* = {:?}, y* = {:?}, v = {:?}", w.x, w.y, w.v))
}

// Determinism: rerun the criteria through the binary with 1 and 8 jobs.

struct Inputs<'a> {
    dir: &'a Path,
    count: usize,
}

impl Inputs<'_> {
    fn put(&mut self, text: &str) -> PathBuf {
        self.count += 1;
        let p = self.dir.join(format!("in{}", self.count));
        fs::write(&p, text).unwrap();
        p
    }

    fn matrix(&mut self, m: &RationalMatrix) -> PathBuf {
        self.put(&matrix_to_json(m))
    }
}

fn invocations(runs: &[RouteRun], dir: &Path) -> Vec<Vec<String>> {
    let mut inp = Inputs { dir, count: 0 };
    let p = |path: PathBuf| path.to_string_lossy().into_owned();
    let mut out: Vec<Vec<String>> = Vec::new();
    let cmd = |parts: &[&str], files: Vec<String>| {
        let mut v: Vec<String> = parts.iter().map(|s| s.to_string()).collect();
        v.extend(files);
        v
    };
    for (a, b, _) in bnd_instances() {
        let (fa, fb) = (p(inp.matrix(&a)), p(inp.matrix(&b)));
        out.push(cmd(&["descartes", "bnd"], vec!["--A".into(), fa, "--B".into(), fb]));
    }
    for a in birch_instances() {
        let (fa, fb) = (p(inp.matrix(&a)), p(inp.matrix(&a.transpose())));
        out.push(cmd(&["injectivity", "--full-space"], vec!["--A".into(), fa, "--B".into(), fb]));
    }
    for run in runs {
        let (fa, fb) = (p(inp.matrix(&run.a)), p(inp.matrix(&run.b)));
        for route in ["minors", "det-poly", "sign-search"] {
            let files = vec!["--A".into(), fa.clone(), "--B".into(), fb.clone(), "--S-image".into(), fa.clone()];
            out.push(cmd(&["injectivity", "--route", route], files));
        }
        if run.verdicts[0].injective {
            let files = vec!["--A".into(), fa.clone(), "--B".into(), fb, "--S-image".into(), fa];
            let samples = ORACLE_SAMPLES.to_string();
            let seed = ORACLE_SEED.to_string();
            out.push(cmd(&["oracle", "sample", "--samples", &samples, "--seed", &seed], files));
        }
    }
    for (aprime, b, z) in det_instances() {
        let mut files = vec!["--Aprime".into(), p(inp.matrix(&aprime)), "--B".into(), p(inp.matrix(&b))];
        if let Some(z) = z {
            files.extend(["--Z".into(), p(inp.matrix(&z))]);
        }
        out.push(cmd(&["gamma-det"], files.clone()));
        out.push(cmd(&["oracle", "gamma-det"], files));
    }
    for c in gale_instances() {
        out.push(cmd(&["oracle", "gale"], vec!["--C".into(), p(inp.matrix(&c))]));
    }
    for a in covector_instances() {
        let fa = p(inp.matrix(&a));
        out.push(cmd(&["covectors"], vec!["--A".into(), fa.clone()]));
        out.push(cmd(&["oracle", "sign-set", "--mode", "kernel"], vec!["--M".into(), fa]));
    }
    for (c, perp) in duality_instances() {
        for m in [c, perp] {
            out.push(cmd(&["oracle", "sign-set", "--mode", "image"], vec!["--M".into(), p(inp.matrix(&m))]));
        }
    }
    for (text, _) in CRN_WORKED {
        out.push(cmd(&["crn", "preclude"], vec![p(inp.put(text))]));
    }
    // Stoichiometric subspace span{(1, 1)}, as in the special instance.
    let (m, _) = special_instance();
    out.push(cmd(&["crn", "special", "--M"], vec![p(inp.matrix(&m)), p(inp.put("0 -> X + Y"))]));
    out
}

fn run_cli(args: &[String], jobs: u32, out: &Path) -> Result<(i32, Vec<u8>), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_signject"))
        .args(args)
        .arg("--jobs")
        .arg(jobs.to_string())
        .arg("--output")
        .arg(out)
        .env_remove("SIGNJECT_PRECISION_BITS")
        .stderr(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    let bytes = fs::read(out).map_err(|e| format!("{}: {e}", args.join(" ")))?;
    Ok((status.code().unwrap_or(-1), bytes))
}

fn c12_determinism(runs: &[RouteRun]) -> Check {
    let start = Instant::now();
    let scratch = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (one, eight) = (scratch.path().join("j1.json"), scratch.path().join("j8.json"));
    let calls = invocations(runs, scratch.path());
    for args in &calls {
        let (c1, b1) = run_cli(args, 1, &one)?;
        let (c8, b8) = run_cli(args, 8, &eight)?;
        ensure(c1 == c8 && b1 == b8, || format!("outputs differ for `signject {}`", args.join(" ")))?;
        ensure(c1 == 0 || c1 == 3, || format!("exit code {c1} for `signject {}`", args.join(" ")))?;
    }
    Ok(format!("{} invocations byte-identical, {:.2?}", calls.len(), start.elapsed()))
}

fn report(id: &str, name: &str, result: Check) -> bool {
    match result {
        Ok(detail) => {
            println!("PASS  {id:<4} {name}: {detail}");
            true
        }
        Err(why) => {
            println!("FAIL  {id:<4} {name}: {why}");
            false
        }
    }
}

fn main() -> ExitCode {
    let runs = route_runs();
    let with_runs = |f: &dyn Fn(&[RouteRun], Duration) -> Check| match &runs {
        Ok((r, elapsed)) => f(r, *elapsed),
        Err(e) => Err(format!("route runs failed: {e}")),
    };
    let results = [
        report("C1", "univariate example", c1_univariate()),
        report("C2", "Birch instances injective", c2_birch()),
        report("C3", "route agreement on S = im A", with_runs(&c3_routes)),
        report("C4", "counterexample soundness", with_runs(&|r, _| c4_counterexamples(r))),
        report("C5", "sampling oracle finds no violation", with_runs(&|r, _| c5_oracle(r))),
        report("C6", "det coefficients vs Leibniz expansion", c6_det_poly()),
        report("C7", "Gale relation", c7_gale()),
        report("C8", "covectors and vectors vs brute force", c8_covectors()),
        report("C9", "sign duality", c9_duality()),
        report("C10", "reaction network worked set", c10_crn()),
        report("C11", "special steady-state witness", c11_special()),
        report("C12", "determinism across --jobs", with_runs(&|r, _| c12_determinism(r))),
    ];
    if results.iter().all(|&ok| ok) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
