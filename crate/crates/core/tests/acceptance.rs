//! Acceptance criteria 1-11. Each test prints one `PASS`/`FAIL` line on the
//! real stdout (bypassing the harness capture) and then asserts.

use std::io::Write;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use qmcbound_core::analysis::{approx_ratio_lp, find_kink, run_er_study, run_ss_sweep, ss_instance, SsSweepConfig};
use qmcbound_core::exact::ground_energy;
use qmcbound_core::graph::{gen_erdos_renyi, gen_kagome, gen_shastry_sutherland, gen_square};
use qmcbound_core::model::{pt_soc_params, solve_relaxation};
use qmcbound_core::rounding::{round, rounding_function, t_prime};
use qmcbound_core::symmetry::{
    character, check_lm_pt, derive_full_s4, fourqubit_blocks, is_state, reconstruct_operator, three_qubit_operator,
    weingarten_exact, young_orthogonal_irrep, InvariantOperator, Partition, Perm,
};
use qmcbound_core::{
    EdOptions, Edge, Graph, ModelOptions, Relaxation, RoundOptions, ScalingConvention, SolveOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn report(id: u32, title: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    let line = format!("{tag} criterion {id:>2}: {title} -- {detail}\n");
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

fn finish(id: u32, title: &str, failures: &[String], notes: &[String]) {
    let detail = if failures.is_empty() {
        notes.join("; ")
    } else {
        failures.join("; ")
    };
    report(id, title, failures.is_empty(), &detail);
    assert!(failures.is_empty(), "criterion {id} ({title}): {}", failures.join("; "));
}

/// Collects failed sub-checks of one criterion.
#[derive(Default)]
struct Tally {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: String) {
        if ok {
            self.notes.push(what);
        } else {
            self.failures.push(what);
        }
    }

    fn near(&mut self, name: &str, got: f64, want: f64, tol: f64) {
        self.check((got - want).abs() <= tol, format!("{name} = {got:.6} (want {want} ± {tol:e})"));
    }

    fn within(&mut self, name: &str, elapsed: Duration, limit: Duration) {
        self.check(
            elapsed <= limit,
            format!("{name} {:.2}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs()),
        );
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn complete(n: usize) -> Graph {
    Graph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| Edge::new(i, j, 1.0)))).unwrap()
}

fn relax(g: &Graph, r: Relaxation) -> f64 {
    solve_relaxation(g, &ModelOptions::new(r), &SolveOptions::default())
        .unwrap()
        .objective
        .varbench
}

fn ed(g: &Graph) -> f64 {
    ground_energy(g, ScalingConvention::VarBench, &EdOptions::default()).unwrap()
}

// ---------------------------------------------------------------------------
// Independent oracle for invariant operators: explicit permutation matrices
// on (C^d)^{(x)k} and a Gram-matrix solve for the operator in their span.

/// `T(sigma)` sending tensor factor `a` to position `sigma(a)`.
fn perm_matrix(p: &Perm, d: usize) -> DMatrix<f64> {
    let k = p.k();
    let dim = d.pow(k as u32);
    let mut m = DMatrix::zeros(dim, dim);
    for idx in 0..dim {
        let digits: Vec<usize> = (0..k).map(|a| (idx / d.pow((k - 1 - a) as u32)) % d).collect();
        let mut out = vec![0; k];
        for a in 0..k {
            out[p.apply(a)] = digits[a];
        }
        let j = out.iter().fold(0, |acc, &x| acc * d + x);
        m[(j, idx)] = 1.0;
    }
    m
}

struct Oracle {
    perms: Vec<Perm>,
    mats: Vec<DMatrix<f64>>,
    gram_pinv: DMatrix<f64>,
}

impl Oracle {
    fn new(k: usize, d: usize) -> Self {
        let perms = Perm::all(k);
        let mats: Vec<DMatrix<f64>> = perms.iter().map(|p| perm_matrix(p, d)).collect();
        let n = perms.len();
        let gram = DMatrix::from_fn(n, n, |a, b| (&mats[a] * &mats[b]).trace());
        let gram_pinv = gram.pseudo_inverse(1e-9).unwrap();
        Self { perms, mats, gram_pinv }
    }

    /// `tr(T(sigma) A)` for every sigma in `Perm::all` order.
    fn expectations(&self, a: &DMatrix<f64>) -> Vec<f64> {
        self.mats.iter().map(|t| (t * a).trace()).collect()
    }

    /// The operator in `span{T(sigma)}` with the given expectations.
    fn operator(&self, expect: &[f64]) -> DMatrix<f64> {
        let c = &self.gram_pinv * nalgebra::DVector::from_column_slice(expect);
        let dim = self.mats[0].nrows();
        let mut a = DMatrix::zeros(dim, dim);
        for (m, ci) in self.mats.iter().zip(c.iter()) {
            a += m * *ci;
        }
        a
    }

    fn min_eig(&self, expect: &[f64]) -> f64 {
        let a = self.operator(expect);
        let sym = (&a + a.transpose()) * 0.5;
        sym.symmetric_eigenvalues().min()
    }
}

/// Trace-one real symmetric matrix whose twirl sits near the PSD boundary:
/// a random matrix shifted by a multiple of the identity (which commutes
/// with the twirl) so the twirled minimum eigenvalue lands in a small
/// window around zero. Roughly half the draws are states.
fn random_operator(rng: &mut impl Rng, oracle: &Oracle) -> DMatrix<f64> {
    let dim = oracle.mats[0].nrows();
    loop {
        let q = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
        let a0 = (&q + q.transpose()) * 0.5;
        let tw = oracle.operator(&oracle.expectations(&a0));
        let eig = ((&tw + tw.transpose()) * 0.5).symmetric_eigenvalues();
        let (lo, hi) = (eig.min(), eig.max());
        let mu = lo + rng.random_range(-0.05..0.05) * (hi - lo);
        let a = a0 - DMatrix::identity(dim, dim) * mu;
        let tr = a.trace();
        if tr > 1e-6 {
            return a / tr;
        }
    }
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_01_lm_pt_matches_psd() {
    let start = Instant::now();
    let oracle = Oracle::new(3, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut t = Tally::default();
    let (mut disagree, mut lib_disagree) = (0, 0);
    let n = 10_000;
    for _ in 0..n {
        let [x, y, z]: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let expect: Vec<f64> = oracle
            .perms
            .iter()
            .map(|p| match p.cycles().as_slice() {
                [] => 1.0,
                [c] if c.len() == 2 => match (c[0], c[1]) {
                    (0, 1) => x,
                    (0, 2) => y,
                    _ => z,
                },
                // Qubit identity: the antisymmetrizer on three qubits vanishes.
                _ => (x + y + z - 1.0) / 2.0,
            })
            .collect();
        let psd = oracle.min_eig(&expect) >= -1e-9;
        if check_lm_pt(x, y, z) != psd {
            disagree += 1;
        }
        let lib = reconstruct_operator(&three_qubit_operator(x, y, z)).unwrap();
        if (lib.symmetric_eigenvalues().min() >= -1e-9) != psd {
            lib_disagree += 1;
        }
    }
    t.check(disagree == 0, format!("check_lm_pt disagrees on {disagree}/{n}"));
    t.check(lib_disagree == 0, format!("library operator disagrees on {lib_disagree}/{n}"));
    t.within("runtime", start.elapsed(), secs(60));
    finish(1, "LM+PT <=> PSD 8x8 invariant operator", &t.failures, &t.notes);
}

#[test]
fn criterion_02_soc_parameterization() {
    let start = Instant::now();
    let p = pt_soc_params();
    let mut t = Tally::default();
    let s3 = 3f64.sqrt();
    let printed = [[-1.0 / 3.0, -1.0 / 3.0, 2.0 / 3.0], [s3 / 3.0, -s3 / 3.0, 0.0]];
    let a_ok = (0..2).all(|r| (0..3).all(|c| (p.a[r][c] - printed[r][c]).abs() < 1e-15));
    let c_ok = p.c.iter().all(|&v| (v + 1.0 / 3.0).abs() < 1e-15) && (p.d - 1.0).abs() < 1e-15;
    t.check(a_ok && c_ok, "A, c, d match reference".into());

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut n, mut disagree, mut skipped) = (0usize, 0usize, 0usize);
    while n < 1_000_000 {
        let x: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let s = x[0] + x[1] + x[2];
        if !(0.0..=3.0).contains(&s) {
            continue;
        }
        n += 1;
        // Eggeling-Werner form of PT: r1^2 + r2^2 <= r0^2.
        let r0 = 1.0 - s / 3.0;
        let r1 = (2.0 * x[2] - x[0] - x[1]) / 3.0;
        let r2 = (x[0] - x[1]) / s3;
        let quad = r1 * r1 + r2 * r2 - r0 * r0;
        let (lhs, rhs) = p.sides(x);
        if quad.abs() < 1e-9 || (lhs - rhs).abs() < 1e-9 {
            skipped += 1;
            continue;
        }
        if (quad <= 0.0) != (lhs <= rhs) {
            disagree += 1;
        }
    }
    t.check(disagree == 0, format!("{disagree}/{n} LM triples disagree ({skipped} within 1e-9 of the boundary)"));
    t.within("runtime", start.elapsed(), secs(60));
    finish(2, "PT quadratic <=> SOC form", &t.failures, &t.notes);
}

#[test]
fn criterion_03_closed_forms() {
    let start = Instant::now();
    let mut t = Tally::default();
    // K_n, unit weights: SOC puts x = 0 on every pair (E = -W); exactly, the
    // singlet sector gives sum sigma_i . sigma_j = 2 S^2 - 3n/2 -> -3n/2.
    let edge = complete(2);
    for (name, v) in [
        ("edge SOC", relax(&edge, Relaxation::Soc)),
        ("edge SOC+P1", relax(&edge, Relaxation::SocP1)),
        ("edge ED", ed(&edge)),
    ] {
        t.near(name, v, -3.0, 1e-6);
    }
    let tri = complete(3);
    t.near("triangle SOC", relax(&tri, Relaxation::Soc), -3.0, 1e-6);
    t.near("triangle ED", ed(&tri), -3.0, 1e-6);
    for n in [10, 12] {
        let g = complete(n);
        let w = (n * (n - 1) / 2) as f64;
        let exact = -1.5 * n as f64;
        let soc = relax(&g, Relaxation::Soc);
        let ex = ed(&g);
        t.near(&format!("K{n} SOC"), soc, -w, 1e-5);
        t.near(&format!("K{n} SOC+P1"), relax(&g, Relaxation::SocP1), exact, 1e-5);
        t.near(&format!("K{n} ED"), ex, exact, 1e-5);
        t.near(&format!("K{n} ratio"), soc / ex, (n as f64 - 1.0) / 3.0, 1e-5);
    }
    t.within("runtime", start.elapsed(), secs(60));
    finish(3, "closed-form instances", &t.failures, &t.notes);
}

#[test]
fn criterion_04_benchmark_energies() {
    let mut t = Tally::default();
    let sq = gen_square(4, true).unwrap();
    let kg = gen_kagome(2, 3, true).unwrap();
    t.check((sq.n, sq.num_edges()) == (16, 32), format!("square |V|,|E| = {},{}", sq.n, sq.num_edges()));
    t.check((kg.n, kg.num_edges()) == (18, 36), format!("kagome |V|,|E| = {},{}", kg.n, kg.num_edges()));

    let timed = |f: &dyn Fn() -> f64| {
        let s = Instant::now();
        let v = f();
        (v, s.elapsed())
    };
    let (v, d) = timed(&|| relax(&sq, Relaxation::Soc));
    t.near("square16 SOC", v, -64.0, 1e-3);
    t.within("square16 SOC", d, secs(5));
    let (v, d) = timed(&|| relax(&sq, Relaxation::SocP1));
    t.near("square16 SOC+P1", v, -53.333, 5e-3);
    t.within("square16 SOC+P1", d, secs(120));
    let (v, d) = timed(&|| ed(&sq));
    t.near("square16 ED", v, -44.9139, 1e-3);
    t.within("square16 ED", d, secs(120));

    let (v, d) = timed(&|| relax(&kg, Relaxation::Soc));
    t.near("kagome18 SOC", v, -36.0, 1e-3);
    t.within("kagome18 SOC", d, secs(5));
    let (v, d) = timed(&|| relax(&kg, Relaxation::SocP1));
    t.near("kagome18 SOC+P1", v, -36.0, 1e-3);
    t.within("kagome18 SOC+P1", d, secs(120));
    let (v, d) = timed(&|| ed(&kg));
    t.near("kagome18 ED", v, -32.1931, 1e-3);
    t.within("kagome18 ED", d, secs(120));
    finish(4, "benchmark energies", &t.failures, &t.notes);
}

/// Gaussian projection of two unit vectors at inner product `rho`, done
/// directly: `b1 = g1 / |g1|`, `b2 = (rho g1 + s g2) / |.|`.
fn mc_edge_value(rho: f64, samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = (1.0 - rho * rho).max(0.0).sqrt();
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..samples {
        let g1: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let g2: [f64; 3] = std::array::from_fn(|_| rng.sample(StandardNormal));
        let u: [f64; 3] = std::array::from_fn(|a| rho * g1[a] + s * g2[a]);
        let n1 = g1.iter().map(|v| v * v).sum::<f64>().sqrt();
        let n2 = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        let dot = g1.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>() / (n1 * n2);
        let v = (1.0 - dot) / 4.0;
        sum += v;
        sq += v * v;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
    (mean, (var / n).sqrt())
}

#[test]
fn criterion_05_rounding_function() {
    let start = Instant::now();
    let mut t = Tally::default();
    t.near("F(1/4)", rounding_function(0.25).unwrap(), 1.0, 1e-10);
    t.near("F(1)", rounding_function(1.0).unwrap(), 0.5, 1e-10);
    let grid_min = (1..=100_000)
        .map(|k| rounding_function(k as f64 / 100_000.0).unwrap())
        .fold(f64::INFINITY, f64::min);
    t.check((0.496..=0.500).contains(&grid_min), format!("grid min {grid_min:.6} in [0.496, 0.500]"));
    for (k, x) in [1.0 / 3.0, 0.8, 1.0].into_iter().enumerate() {
        // Relaxed singlet weight x means M_ij = 1 - 4x on norm-sqrt(3) vectors.
        let rho = (1.0 - 4.0 * x) / 3.0;
        let (mean, se) = mc_edge_value(rho, 1_000_000, 50 + k as u64);
        let f = rounding_function(x).unwrap();
        // At x = 1 the projected vectors are antipodal and every draw is 1/2.
        let dev = (mean - f * x).abs();
        let ok = dev <= 3.0 * se || dev <= 1e-12;
        let spread = if se > 0.0 { format!("{:.2} se", dev / se) } else { "zero variance".into() };
        t.check(ok, format!("MC F({x:.3}) = {:.5} vs {f:.5} ({spread})", mean / x));
    }
    t.within("runtime", start.elapsed(), secs(120));
    finish(5, "rounding function", &t.failures, &t.notes);
}

#[test]
fn criterion_06_threshold_algebra() {
    let start = Instant::now();
    let mut t = Tally::default();
    // Independent evaluation of t' from its closed form.
    let tt: f64 = 0.771;
    let tp = 0.25 * (3.0 - 2.0 * tt + 2.0 * (3.0 * (tt - tt * tt)).sqrt());
    t.near("t'(0.771)", t_prime(tt).unwrap(), 0.7284, 5e-4);
    t.near("t' closed form", t_prime(tt).unwrap(), tp, 1e-12);
    t.near("ratio LP r(0.771)", approx_ratio_lp(tt).unwrap().r, 0.526, 1e-3);
    t.within("runtime", start.elapsed(), secs(1));
    finish(6, "threshold algebra", &t.failures, &t.notes);
}

#[test]
fn criterion_07_end_to_end_guarantee() {
    let start = Instant::now();
    let mut t = Tally::default();
    let (mut worst_ratio, mut worst_excess, mut used) = (f64::INFINITY, f64::NEG_INFINITY, 0);
    let mut seed = 0u64;
    while used < 50 {
        let g = gen_erdos_renyi(12, 0.4, seed).unwrap();
        seed += 1;
        if g.num_edges() == 0 {
            continue;
        }
        used += 1;
        let sol = solve_relaxation(&g, &ModelOptions::new(Relaxation::SocP1), &SolveOptions::default()).unwrap();
        let r = round(&sol, &g, &RoundOptions { seed, ..RoundOptions::default() }).unwrap();
        let relax = sol.objective.qmc_max();
        worst_ratio = worst_ratio.min(r.expected_energy_s.max(r.expected_energy_prod) / relax);
        worst_excess = worst_excess.max(r.best_sampled_energy - relax);
    }
    t.check(worst_ratio >= 0.526, format!("min expected/relaxation {worst_ratio:.4} >= 0.526 over {used}"));
    t.check(worst_excess <= 1e-9, format!("max(best sample - relaxation) = {worst_excess:.2e} <= 0"));
    t.within("runtime", start.elapsed(), secs(600));
    finish(7, "end-to-end guarantee on ER(12, 0.4)", &t.failures, &t.notes);
}

#[test]
fn criterion_08_er_ratios() {
    let start = Instant::now();
    let mut t = Tally::default();
    let opts = SolveOptions::default();
    let sparse = run_er_study(10, 0.2, 200, Relaxation::Soc, 0, &opts).unwrap();
    t.near(
        &format!("n=10 p=0.2 mean ratio ({} seeds, se {:.3})", sparse.ratios.len(), sparse.std_err),
        sparse.mean,
        1.03,
        0.03,
    );
    let k10 = run_er_study(10, 1.0, 3, Relaxation::Soc, 0, &opts).unwrap();
    let spread = k10.ratios.iter().fold(0.0f64, |a, r| a.max((r - k10.ratios[0]).abs()));
    t.near("n=10 p=1", k10.mean, 3.0, 1e-6);
    t.check(spread == 0.0, format!("n=10 p=1 seed spread {spread:e}"));
    let k12 = run_er_study(12, 1.0, 1, Relaxation::Soc, 0, &opts).unwrap();
    t.near("n=12 p=1", k12.mean, 3.67, 0.01);
    t.within("runtime", start.elapsed(), secs(900));
    finish(8, "ER ratio spot-check", &t.failures, &t.notes);
}

#[test]
fn criterion_09_shastry_sutherland() {
    let start = Instant::now();
    let mut t = Tally::default();
    let opts = SolveOptions::default();
    let g = gen_shastry_sutherland(4, 0.4, 1.0).unwrap();
    // Dimer product state: one singlet (-3 J_D) per diagonal, grid bonds cancel.
    let dimers = -3.0 * (g.n / 2) as f64;
    t.near("L=4 J/J_D=0.4 SOC", relax(&g, Relaxation::Soc), dimers, 1e-3);
    t.near("SOC+P1", relax(&g, Relaxation::SocP1), dimers, 1e-3);
    t.near("ED", ed(&g), dimers, 1e-3);

    let ratios: Vec<f64> = (0..=40).map(|k| 0.30 + 0.01 * k as f64).collect();
    let soc: Vec<f64> = ratios
        .iter()
        .map(|&r| relax(&gen_shastry_sutherland(4, r, 1.0).unwrap(), Relaxation::Soc))
        .collect();
    match find_kink(&ratios, &soc) {
        Some(k) => t.check(
            (0.45..=0.55).contains(&k.location),
            format!("SOC slope kink at {:.2} (jump {:.2})", k.location, k.jump),
        ),
        None => t.check(false, "no slope kink found".into()),
    }

    let mut cfg = SsSweepConfig::new(4, vec![0.4]);
    cfg.sigma = 0.05;
    cfg.seeds = (0..100).collect();
    cfg.pauli1 = false;
    let res = run_ss_sweep(&cfg, &opts).unwrap();
    // Cross-check one disordered point independently of the sweep driver.
    let g0 = ss_instance(4, 0.4, 0.05, 0).unwrap();
    let p0 = res.points.iter().find(|p| p.seed == 0).unwrap();
    t.near("sweep point reproduces", p0.ed.unwrap() / p0.soc, ed(&g0) / relax(&g0, Relaxation::Soc), 1e-9);
    // The ratio is taken in the QMC Hamiltonian scaling, -1/2 sum w (1 - SWAP).
    t.near(
        "sigma=0.05 mean ED/SOC (100 seeds)",
        res.mean_ed_over_soc(ScalingConvention::QmcMin).unwrap(),
        1.0,
        0.002,
    );
    t.within("runtime", start.elapsed(), secs(1800));
    finish(9, "Shastry-Sutherland", &t.failures, &t.notes);
}

fn irrep_err(lambda: &[usize], cycles: &[&[usize]], scale: f64, want: &[f64], symmetrize: bool) -> f64 {
    let lam = Partition::new(lambda.to_vec()).unwrap();
    let k = lam.size();
    let p = Perm::from_cycles(k, cycles).unwrap();
    let mut r = young_orthogonal_irrep(&lam, &p).unwrap();
    if symmetrize {
        r = (&r + young_orthogonal_irrep(&lam, &p.inverse()).unwrap()) * 0.5;
    }
    let dim = r.nrows();
    let w = DMatrix::from_row_slice(dim, dim, want) * scale;
    (r - w).abs().max()
}

#[test]
fn criterion_10_symmetry_suite() {
    let start = Instant::now();
    let mut t = Tally::default();
    let (s2, s3, s6) = (2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt());

    // Reference tables (cycles 0-based). Rows marked `*` list sigma together
    // with its inverse and are compared symmetrized.
    type Row<'a> = (&'a [usize], &'a [&'a [usize]], f64, Vec<f64>, bool);
    let rows: Vec<Row> = vec![
        (&[2, 1], &[], 1.0, vec![1.0, 0.0, 0.0, 1.0], false),
        (&[2, 1], &[&[0, 1]], 1.0, vec![1.0, 0.0, 0.0, -1.0], false),
        (&[2, 1], &[&[1, 2]], 0.5, vec![-1.0, s3, s3, 1.0], false),
        (&[2, 1], &[&[0, 2]], 0.5, vec![-1.0, -s3, -s3, 1.0], false),
        (&[2, 1], &[&[0, 1, 2]], 0.5, vec![-1.0, s3, -s3, -1.0], false),
        (&[2, 1], &[&[0, 2, 1]], 0.5, vec![-1.0, -s3, s3, -1.0], false),
        (&[3, 1], &[], 1.0, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0], false),
        (&[3, 1], &[&[0, 2], &[1, 3]], -1.0 / 3.0, vec![1.0, s2, -s6, s2, 2.0, s3, -s6, s3, 0.0], false),
        (&[3, 1], &[&[0, 3], &[1, 2]], -1.0 / 3.0, vec![1.0, s2, s6, s2, 2.0, -s3, s6, -s3, 0.0], false),
        (&[3, 1], &[&[0, 1], &[2, 3]], 1.0 / 3.0, vec![-1.0, 2.0 * s2, 0.0, 2.0 * s2, 1.0, 0.0, 0.0, 0.0, -3.0], false),
        (&[3, 1], &[&[1, 2, 3]], 1.0 / 6.0, vec![-2.0, s2, s6, s2, -1.0, 2.0 * s3, s6, 2.0 * s3, 3.0], true),
        (&[3, 1], &[&[0, 2, 1]], 0.5, vec![2.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0], true),
        (&[3, 1], &[&[0, 3, 2]], -1.0 / 6.0, vec![2.0, -s2, s6, -s2, 1.0, 2.0 * s3, s6, 2.0 * s3, -3.0], true),
        (&[3, 1], &[&[0, 1, 3]], 1.0 / 6.0, vec![-2.0, -2.0 * s2, 0.0, -2.0 * s2, 5.0, 0.0, 0.0, 0.0, -3.0], true),
        (&[3, 1], &[&[2, 3]], 1.0 / 3.0, vec![-1.0, 2.0 * s2, 0.0, 2.0 * s2, 1.0, 0.0, 0.0, 0.0, 3.0], false),
        (&[3, 1], &[&[0, 2, 1, 3]], -1.0 / 3.0, vec![1.0, s2, 0.0, s2, 2.0, 0.0, 0.0, 0.0, 0.0], true),
        (&[3, 1], &[&[0, 1]], 1.0, vec![1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0], false),
        (&[3, 1], &[&[1, 2]], 0.5, vec![2.0, 0.0, 0.0, 0.0, -1.0, s3, 0.0, s3, 1.0], false),
        (&[3, 1], &[&[0, 2, 3, 1]], 1.0 / 6.0, vec![-2.0, s2, s6, s2, -1.0, -s3, s6, -s3, -3.0], true),
        (
            &[3, 1],
            &[&[0, 3]],
            -1.0 / 6.0,
            vec![2.0, 2.0 * s2, 2.0 * s6, 2.0 * s2, -5.0, s3, 2.0 * s6, s3, -3.0],
            false,
        ),
        (
            &[3, 1],
            &[&[1, 3]],
            1.0 / 6.0,
            vec![-2.0, -2.0 * s2, 2.0 * s6, -2.0 * s2, 5.0, s3, 2.0 * s6, s3, 3.0],
            false,
        ),
        (&[3, 1], &[&[0, 2]], 0.5, vec![2.0, 0.0, 0.0, 0.0, -1.0, -s3, 0.0, -s3, 1.0], false),
        (&[3, 1], &[&[0, 3, 2, 1]], -1.0 / 6.0, vec![2.0, -s2, s6, -s2, 1.0, -s3, s6, -s3, 3.0], true),
        (&[2, 2], &[], 1.0, vec![1.0, 0.0, 0.0, 1.0], false),
        (&[2, 2], &[&[0, 2], &[1, 3]], 1.0, vec![1.0, 0.0, 0.0, 1.0], false),
        (&[2, 2], &[&[0, 3], &[1, 2]], 1.0, vec![1.0, 0.0, 0.0, 1.0], false),
        (&[2, 2], &[&[0, 1], &[2, 3]], 1.0, vec![1.0, 0.0, 0.0, 1.0], false),
        (&[2, 2], &[&[1, 2, 3]], -0.5, vec![1.0, 0.0, 0.0, 1.0], true),
        (&[2, 2], &[&[0, 2, 1]], -0.5, vec![1.0, 0.0, 0.0, 1.0], true),
        (&[2, 2], &[&[0, 3, 2]], -0.5, vec![1.0, 0.0, 0.0, 1.0], true),
        (&[2, 2], &[&[0, 1, 3]], -0.5, vec![1.0, 0.0, 0.0, 1.0], true),
        (&[2, 2], &[&[2, 3]], 1.0, vec![1.0, 0.0, 0.0, -1.0], false),
        (&[2, 2], &[&[0, 1]], 1.0, vec![1.0, 0.0, 0.0, -1.0], false),
        (&[2, 2], &[&[0, 2, 1, 3]], 1.0, vec![1.0, 0.0, 0.0, -1.0], true),
        (&[2, 2], &[&[1, 2]], 0.5, vec![-1.0, s3, s3, 1.0], false),
        (&[2, 2], &[&[0, 2, 3, 1]], 0.5, vec![-1.0, s3, s3, 1.0], true),
        (&[2, 2], &[&[0, 3]], 0.5, vec![-1.0, s3, s3, 1.0], false),
        (&[2, 2], &[&[1, 3]], 0.5, vec![-1.0, -s3, -s3, 1.0], false),
        (&[2, 2], &[&[0, 3, 2, 1]], 0.5, vec![-1.0, -s3, -s3, 1.0], true),
    ];
    let table_err = rows
        .iter()
        .map(|(l, c, s, w, sym)| irrep_err(l, c, *s, w, *sym))
        .fold(0.0f64, f64::max);
    t.check(table_err <= 1e-12, format!("{} reference entries, max error {table_err:.1e}", rows.len()));

    let mut hom = 0.0f64;
    for k in [3, 4] {
        let all = Perm::all(k);
        let mut dims_sq = 0i64;
        for lam in Partition::all(k) {
            let f = character(&lam, &Perm::identity(k)).unwrap();
            dims_sq += f * f;
            let r: Vec<DMatrix<f64>> = all.iter().map(|p| young_orthogonal_irrep(&lam, p).unwrap()).collect();
            for (a, ra) in all.iter().zip(&r) {
                let eye = DMatrix::<f64>::identity(ra.nrows(), ra.nrows());
                hom = hom.max((ra.transpose() * ra - eye).abs().max());
                for (b, rb) in all.iter().zip(&r) {
                    let rab = young_orthogonal_irrep(&lam, &a.compose(b)).unwrap();
                    hom = hom.max((ra * rb - rab).abs().max());
                }
            }
        }
        t.check(dims_sq == (1..=k as i64).product::<i64>(), format!("S{k}: sum chi(id)^2 = {dims_sq}"));
    }
    t.check(hom <= 1e-12, format!("homomorphism/orthogonality on S3, S4: {hom:.1e}"));

    let wg_id = weingarten_exact(&Partition::new(vec![1, 1]).unwrap(), 2).unwrap();
    let wg_sw = weingarten_exact(&Partition::new(vec![2]).unwrap(), 2).unwrap();
    t.check(
        (*wg_id.numer(), *wg_id.denom(), *wg_sw.numer(), *wg_sw.denom()) == (1, 3, -1, 6),
        format!("Wg_2(id) = {wg_id}, Wg_2(swap) = {wg_sw}"),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for (k, d) in [(3usize, 2usize), (3, 3), (4, 2), (4, 3)] {
        let oracle = Oracle::new(k, d);
        let (mut rt, mut disagree, mut states) = (0.0f64, 0, 0);
        for _ in 0..1000 {
            let a = random_operator(&mut rng, &oracle);
            let expect = oracle.expectations(&a);
            let op = InvariantOperator::from_fn(k, d, |p| {
                expect[oracle.perms.iter().position(|q| q == p).unwrap()]
            })
            .unwrap();
            let rec = reconstruct_operator(&op).unwrap();
            for (x, y) in oracle.expectations(&rec).iter().zip(&expect) {
                rt = rt.max((x - y).abs());
            }
            let psd = oracle.min_eig(&expect) >= -1e-9;
            states += psd as usize;
            if is_state(&op, 1e-9).unwrap() != psd {
                disagree += 1;
            }
        }
        t.check(rt <= 1e-10, format!("(k,d)=({k},{d}) round trip {rt:.1e}"));
        t.check(disagree == 0, format!("(k,d)=({k},{d}) blocks vs eig: {disagree}/1000 disagree ({states} states)"));
    }

    let oracle = Oracle::new(4, 2);
    let idx = |p: Perm| oracle.perms.iter().position(|q| *q == p).unwrap();
    let pair_ids: Vec<usize> = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        .iter()
        .map(|&(i, j)| idx(Perm::transposition(4, i, j)))
        .collect();
    let prod_ids: Vec<usize> = [[0, 1, 2, 3], [0, 2, 1, 3], [0, 3, 1, 2]]
        .iter()
        .map(|c| idx(Perm::from_cycles(4, &[&c[..2], &c[2..]]).unwrap()))
        .collect();
    let (mut disagree, mut derive_err, mut states) = (0, 0.0f64, 0);
    for _ in 0..1000 {
        let expect = oracle.expectations(&random_operator(&mut rng, &oracle));
        let pairs: [f64; 6] = std::array::from_fn(|i| expect[pair_ids[i]]);
        let products: [f64; 3] = std::array::from_fn(|i| expect[prod_ids[i]]);
        let full = derive_full_s4(&pairs, &products);
        for (p, e) in oracle.perms.iter().zip(&expect) {
            derive_err = derive_err.max((full.get(p) - e).abs());
        }
        let psd = oracle.min_eig(&expect) >= -1e-9;
        states += psd as usize;
        let a = fourqubit_blocks(&pairs, &products).feasible(1e-9);
        let d = is_state(&full, 1e-9).unwrap();
        if a != psd || d != psd {
            disagree += 1;
        }
    }
    t.check(derive_err <= 1e-10, format!("derived S4 expectations {derive_err:.1e}"));
    t.check(disagree == 0, format!("four-qubit blocks vs 16x16: {disagree}/1000 disagree ({states} states)"));
    t.within("runtime", start.elapsed(), secs(300));
    finish(10, "symmetry suite", &t.failures, &t.notes);
}

#[test]
fn criterion_11_sandwich() {
    let start = Instant::now();
    let mut t = Tally::default();
    let mut instances: Vec<(String, Graph)> = vec![
        ("edge".into(), complete(2)),
        ("triangle".into(), complete(3)),
        ("K10".into(), complete(10)),
        ("K12".into(), complete(12)),
        ("square16".into(), gen_square(4, true).unwrap()),
        ("ss16".into(), gen_shastry_sutherland(4, 0.6, 1.0).unwrap()),
        ("ss16 disordered".into(), ss_instance(4, 0.5, 0.1, 3).unwrap()),
    ];
    for seed in 0..5 {
        instances.push((format!("er12 seed {seed}"), gen_erdos_renyi(12, 0.4, seed).unwrap()));
    }
    let (mut worst, mut count) = (f64::NEG_INFINITY, 0);
    for (name, g) in &instances {
        let (a, b, c) = (relax(g, Relaxation::Soc), relax(g, Relaxation::SocP1), ed(g));
        let gap = (a - b).max(b - c);
        if gap > 1e-5 {
            t.failures.push(format!("{name}: SOC {a:.5}, SOC+P1 {b:.5}, ED {c:.5}"));
        }
        worst = worst.max(gap);
        count += 1;
    }
    t.check(worst <= 1e-5, format!("SOC <= SOC+P1 <= ED on {count} instances (max gap {worst:.1e})"));
    // Larger benchmark instances at SOC+P1 take hours; the ordering on
    // small ones stands in for them.
    t.within("runtime", start.elapsed(), secs(600));
    finish(11, "sandwich on n <= 16 instances", &t.failures, &t.notes);
}
