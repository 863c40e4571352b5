//! Built-in invariant suites. Each check compares a library routine against
//! an independent computation (explicit matrices, eigenvalues, brute force).

use nalgebra::DMatrix;
use qmcbound_core::analysis::approx_ratio_lp;
use qmcbound_core::exact::ground_energy;
use qmcbound_core::graph::gen_erdos_renyi;
use qmcbound_core::model::{pt_soc_params, solve_relaxation};
use qmcbound_core::rounding::{rounding_function, t_prime};
use qmcbound_core::symmetry::{
    check_lm_pt, derive_full_s4, fourqubit_blocks, fourqubit_moments, is_state, min_eigenvalue, permutation_matrix,
    reconstruct_operator, three_qubit_operator, weingarten, young_orthogonal_irrep, InvariantOperator, Partition,
    Perm,
};
use qmcbound_core::{EdOptions, Edge, Graph, ModelOptions, Relaxation, ScalingConvention, SolveOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::args::{Suite, VerifyArgs};
use crate::commands::Report;

/// Points closer than this to a feasibility boundary are not compared.
const MARGIN: f64 = 1e-7;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

struct Suites {
    checks: Vec<Check>,
    suite: &'static str,
}

impl Suites {
    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check {
            suite: self.suite,
            name: name.to_string(),
            passed,
            detail,
        });
    }

    /// Run `f` as a check; library errors count as failures.
    fn try_check(&mut self, name: &str, f: impl FnOnce() -> qmcbound_core::Result<(bool, String)>) {
        match f() {
            Ok((ok, d)) => self.check(name, ok, d),
            Err(e) => self.check(name, false, format!("error: {e}")),
        }
    }
}

pub fn run(a: &VerifyArgs) -> Report {
    let mut s = Suites {
        checks: Vec::new(),
        suite: "",
    };
    let want = |x: Suite| a.suite == Suite::All || a.suite == x;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    if want(Suite::Symmetry) {
        s.suite = "symmetry";
        symmetry(&mut s, &mut rng, a.points);
    }
    if want(Suite::Marginals) {
        s.suite = "marginals";
        marginals(&mut s, &mut rng, a.points);
    }
    if want(Suite::ClosedForms) {
        s.suite = "closed-forms";
        closed_forms(&mut s);
    }
    if want(Suite::Rounding) {
        s.suite = "rounding";
        rounding(&mut s);
    }
    if want(Suite::Sandwich) {
        s.suite = "sandwich";
        sandwich(&mut s, a.seed);
    }
    let failed = s.checks.iter().filter(|c| !c.passed).count();
    let mut table = String::new();
    for c in &s.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        table += &format!("{tag} {:<13} {:<34} {}\n", c.suite, c.name, c.detail);
    }
    table += &format!("{} checks, {} failed\n", s.checks.len(), failed);
    Report {
        json: json!({ "checks": s.checks, "failed": failed, "seed": a.seed }),
        table,
        failed: failed > 0,
    }
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

/// Real symmetric trace-one operator whose twirl lies near the PSD boundary:
/// a random matrix shifted by a multiple of the identity (which the twirl
/// preserves), so about half the draws are states.
fn random_operator(rng: &mut impl Rng, k: usize, d: usize) -> qmcbound_core::Result<DMatrix<f64>> {
    let dim = d.pow(k as u32);
    loop {
        let q = DMatrix::from_fn(dim, dim, |_, _| rng.random_range(-1.0..1.0));
        let a0 = (&q + q.transpose()) * 0.5;
        let tw = reconstruct_operator(&InvariantOperator::from_matrix(k, d, &a0)?)?;
        let eig = ((&tw + tw.transpose()) * 0.5).symmetric_eigenvalues();
        let (lo, hi) = (eig.min(), eig.max());
        let mu = lo + rng.random_range(-0.05..0.05) * (hi - lo);
        let a = a0 - DMatrix::identity(dim, dim) * mu;
        let tr = a.trace();
        if tr > 1e-6 {
            return Ok(a / tr);
        }
    }
}

fn symmetry(s: &mut Suites, rng: &mut ChaCha8Rng, points: usize) {
    for k in [3, 4] {
        s.try_check(&format!("S{k} homomorphism + orthogonality"), || {
            let all = Perm::all(k);
            let mut err = 0.0f64;
            for lambda in Partition::all(k) {
                for a in &all {
                    let ra = young_orthogonal_irrep(&lambda, a)?;
                    let eye = DMatrix::identity(ra.nrows(), ra.ncols());
                    err = err.max(max_abs(&(&ra * ra.transpose() - eye)));
                    for b in &all {
                        let rb = young_orthogonal_irrep(&lambda, b)?;
                        let rab = young_orthogonal_irrep(&lambda, &a.compose(b))?;
                        err = err.max(max_abs(&(ra.clone() * rb - rab)));
                    }
                }
            }
            Ok((err <= 1e-12, format!("max error {err:.1e}")))
        });
    }
    s.try_check("Weingarten k=2 d=2", || {
        let id = weingarten(&Partition::new(vec![1, 1])?, 2)?;
        let sw = weingarten(&Partition::new(vec![2])?, 2)?;
        let ok = (id - 1.0 / 3.0).abs() < 1e-14 && (sw + 1.0 / 6.0).abs() < 1e-14;
        Ok((ok, format!("Wg(id) = {id:.6}, Wg(swap) = {sw:.6}")))
    });
    for (k, d) in [(3usize, 2usize), (3, 3), (4, 2), (4, 3)] {
        let n = if d.pow(k as u32) > 30 { points.min(200) } else { points };
        s.try_check(&format!("round trip + blocks (k={k}, d={d})"), || {
            let mut worst = 0.0f64;
            let mut disagree = 0;
            let mut compared = 0;
            for _ in 0..n {
                let op = InvariantOperator::from_matrix(k, d, &random_operator(rng, k, d)?)?;
                let rec = reconstruct_operator(&op)?;
                let back = InvariantOperator::from_matrix(k, d, &rec)?;
                for (x, y) in op.expect.iter().zip(&back.expect) {
                    worst = worst.max((x - y).abs());
                }
                let eig = min_eigenvalue(&rec);
                if eig.abs() < MARGIN {
                    continue;
                }
                compared += 1;
                if is_state(&op, 1e-9)? != (eig >= 0.0) {
                    disagree += 1;
                }
            }
            let ok = worst <= 1e-10 && disagree == 0;
            Ok((ok, format!("round trip {worst:.1e}, {disagree}/{compared} disagree")))
        });
    }
    s.try_check("four-qubit blocks vs 16x16", || {
        let mut disagree = 0;
        let mut compared = 0;
        for _ in 0..points {
            let (pairs, products) = fourqubit_moments(&random_operator(rng, 4, 2)?);
            let op = derive_full_s4(&pairs, &products);
            let eig = min_eigenvalue(&reconstruct_operator(&op)?);
            if eig.abs() < MARGIN {
                continue;
            }
            compared += 1;
            let psd = eig >= 0.0;
            if fourqubit_blocks(&pairs, &products).feasible(1e-9) != psd || is_state(&op, 1e-9)? != psd {
                disagree += 1;
            }
        }
        Ok((disagree == 0, format!("{disagree}/{compared} disagree")))
    });
    s.try_check("permutation matrices compose", || {
        let all = Perm::all(3);
        let mut err = 0.0f64;
        for a in &all {
            for b in &all {
                let lhs = permutation_matrix(a, 2)? * permutation_matrix(b, 2)?;
                err = err.max(max_abs(&(lhs - permutation_matrix(&a.compose(b), 2)?)));
            }
        }
        Ok((err == 0.0, format!("max error {err:.1e}")))
    });
}

fn marginals(s: &mut Suites, rng: &mut ChaCha8Rng, points: usize) {
    s.try_check("LM+PT <=> 8x8 PSD", || {
        let mut disagree = 0;
        for _ in 0..points {
            let [x, y, z]: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let eig = min_eigenvalue(&reconstruct_operator(&three_qubit_operator(x, y, z))?);
            if check_lm_pt(x, y, z) != (eig >= -1e-9) {
                disagree += 1;
            }
        }
        Ok((disagree == 0, format!("{disagree}/{points} disagree")))
    });
    s.check("PT quadratic <=> SOC form", {
        let p = pt_soc_params();
        let mut disagree = 0;
        let mut n = 0;
        while n < points {
            let x: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
            let sum: f64 = x.iter().sum();
            if !(0.0..=3.0).contains(&sum) {
                continue;
            }
            n += 1;
            let pt = qmcbound_core::symmetry::pt_excess(x[0], x[1], x[2]);
            let (lhs, rhs) = p.sides(x);
            if pt.abs() < 1e-9 {
                continue;
            }
            if (pt <= 0.0) != (lhs <= rhs) {
                disagree += 1;
            }
        }
        disagree == 0
    }, format!("{points} LM triples"));
}

fn complete(n: usize) -> Graph {
    let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| Edge::new(i, j, 1.0)));
    Graph::new(n, edges).expect("complete graph")
}

fn bound(g: &Graph, r: Relaxation) -> qmcbound_core::Result<f64> {
    Ok(solve_relaxation(g, &ModelOptions::new(r), &SolveOptions::default())?
        .objective
        .varbench)
}

fn ed(g: &Graph) -> qmcbound_core::Result<f64> {
    ground_energy(g, ScalingConvention::VarBench, &EdOptions::default())
}

fn closed_forms(s: &mut Suites) {
    let cases: [(&str, Graph, [f64; 3]); 3] = [
        ("edge", complete(2), [-3.0, -3.0, -3.0]),
        ("triangle", complete(3), [-3.0, -3.0, -3.0]),
        ("K10", complete(10), [-45.0, -15.0, -15.0]),
    ];
    for (name, g, [soc, p1, exact]) in cases {
        s.try_check(&format!("{name}: SOC, SOC+P1, ED"), || {
            let got = [bound(&g, Relaxation::Soc)?, bound(&g, Relaxation::SocP1)?, ed(&g)?];
            let ok = got.iter().zip([soc, p1, exact]).all(|(a, b)| (a - b).abs() < 1e-5);
            Ok((ok, format!("{:.6} {:.6} {:.6}", got[0], got[1], got[2])))
        });
    }
}

fn rounding(s: &mut Suites) {
    s.try_check("F(1/4) = 1, F(1) = 1/2", || {
        let (a, b) = (rounding_function(0.25)?, rounding_function(1.0)?);
        Ok(((a - 1.0).abs() < 1e-10 && (b - 0.5).abs() < 1e-10, format!("{a:.12} {b:.12}")))
    });
    s.try_check("min F over (0, 1]", || {
        let mut m = f64::INFINITY;
        for k in 1..=10_000 {
            m = m.min(rounding_function(k as f64 / 10_000.0)?);
        }
        Ok(((0.496..=0.5).contains(&m), format!("{m:.6}")))
    });
    s.try_check("t'(0.771)", || {
        let v = t_prime(0.771)?;
        Ok(((v - 0.7284).abs() < 5e-4, format!("{v:.6}")))
    });
    s.try_check("ratio LP at t = 0.771", || {
        let r = approx_ratio_lp(0.771)?.r;
        Ok(((r - 0.526).abs() < 1e-3, format!("{r:.6}")))
    });
}

fn sandwich(s: &mut Suites, seed: u64) {
    s.try_check("SOC <= SOC+P1 <= ED (ER n=8)", || {
        let mut worst = f64::NEG_INFINITY;
        for k in 0..6 {
            let g = gen_erdos_renyi(8, 0.5, seed + k)?;
            if g.num_edges() == 0 {
                continue;
            }
            let (a, b, c) = (bound(&g, Relaxation::Soc)?, bound(&g, Relaxation::SocP1)?, ed(&g)?);
            worst = worst.max(a - b).max(b - c);
        }
        Ok((worst <= 1e-5, format!("max(lower - upper) = {worst:.1e}")))
    });
}
