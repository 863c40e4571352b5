//! Product-and-singlet rounding of Pauli level-1 solutions.
//!
//! Edges whose singlet weight `y_e = (1 - x_e) / 2` exceeds a threshold `t`
//! form a matching and become singlets; every vertex also receives a Bloch
//! vector from a Gaussian projection of its Gram vector. The better of the
//! matched state and the pure product state is returned.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{edge_value, BlochAssignment};
use crate::graph::Graph;
use crate::model::RelaxSolution;

pub use crate::exact::{state_energy, VertexState};

/// Default matching threshold.
pub const DEFAULT_T: f64 = 0.771;
/// Most negative eigenvalue of `M` tolerated (and clamped) by [`gram_vectors`].
pub const PSD_TOL: f64 = 1e-7;

/// `2F1(1/2, 1/2; 5/2; z)` for `0 <= z <= 1`.
pub fn hyp2f1_half(z: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::Domain(format!("hyp2f1_half needs 0 <= z <= 1, got {z}")));
    }
    if z <= 0.5 {
        return Ok(series(0.5, 0.5, 2.5, z));
    }
    // Around z = 1: with c - a - b = 3/2 the connection coefficients are
    // 3 pi / 8 and 1.
    let w = 1.0 - z;
    Ok(3.0 * PI / 8.0 * series(0.5, 0.5, -0.5, w) + w.powf(1.5) * series(2.0, 2.0, 2.5, w))
}

/// Plain hypergeometric series for `|z| <= 1/2`.
fn series(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 0..500 {
        let m = m as f64;
        term *= (a + m) * (b + m) / ((c + m) * (m + 1.0)) * z;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Which closed form of the rounding ratio function to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FForm {
    /// With the `(1 - 4x)` factor on the hypergeometric term.
    #[default]
    Corrected,
    /// Without it; kept for comparison only.
    Uncorrected,
}

/// Ratio of the expected rounded edge value to the relaxed value `x`.
pub fn rounding_function(x: f64) -> Result<f64> {
    rounding_function_with(x, FForm::Corrected)
}

pub fn rounding_function_with(x: f64, form: FForm) -> Result<f64> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::Domain(format!("F needs 0 < x <= 1, got {x}")));
    }
    let u = 1.0 - 4.0 * x;
    let h = hyp2f1_half((u * u / 9.0).min(1.0))?;
    let factor = match form {
        FForm::Corrected => u,
        FForm::Uncorrected => 1.0,
    };
    Ok((1.0 - 8.0 / (9.0 * PI) * factor * h) / (4.0 * x))
}

/// Expected QMC value of a unit edge whose Gram vectors have inner product `m`.
pub fn expected_edge_value(m: f64) -> Result<f64> {
    if !(m.abs() <= 3.0 + 1e-9) {
        return Err(Error::Domain(format!("|M_ij| must be at most 3, got {m}")));
    }
    let m = m.clamp(-3.0, 3.0);
    Ok(0.25 * (1.0 - 8.0 / (9.0 * PI) * m * hyp2f1_half(m * m / 9.0)?))
}

/// Largest singlet weight a neighbour of an edge with weight `t` can carry.
pub fn t_prime(t: f64) -> Result<f64> {
    if !(0.75..=1.0).contains(&t) {
        return Err(Error::Domain(format!("t' needs 3/4 <= t <= 1, got {t}")));
    }
    Ok(0.25 * (3.0 - 2.0 * t + 2.0 * 3f64.sqrt() * (t - t * t).max(0.0).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeClass {
    /// Matched: becomes a singlet.
    S,
    /// Shares an endpoint with a matched edge.
    T,
    U,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    /// One class per edge of the graph, in edge order.
    pub classes: Vec<EdgeClass>,
}

/// Matching from per-edge singlet weights.
pub fn extract_matching_from_y(g: &Graph, y: &[f64], t: f64) -> Result<Matching> {
    if !(t > 0.75 && t <= 1.0) {
        return Err(Error::Domain(format!("threshold must lie in (3/4, 1], got {t}")));
    }
    if y.len() != g.num_edges() {
        return Err(Error::DimensionMismatch(format!("{} weights for {} edges", y.len(), g.num_edges())));
    }
    let mut owner: Vec<Option<usize>> = vec![None; g.n];
    let mut pairs = Vec::new();
    for (k, (e, &ye)) in g.edges.iter().zip(y).enumerate() {
        if ye > t {
            for v in [e.i, e.j] {
                if let Some(other) = owner[v] {
                    let o = g.edges[other];
                    return Err(Error::InconsistentSolution(format!(
                        "edges ({}, {}) and ({}, {}) both exceed t = {t} (y = {:.6}, {:.6}); \
                         the neighbour cap is t' = {:.6}",
                        o.i,
                        o.j,
                        e.i,
                        e.j,
                        y[other],
                        ye,
                        t_prime(t.min(1.0))?
                    )));
                }
                owner[v] = Some(k);
            }
            pairs.push((e.i, e.j));
        }
    }
    let classes = g
        .edges
        .iter()
        .zip(y)
        .map(|(e, &ye)| {
            if ye > t {
                EdgeClass::S
            } else if owner[e.i].is_some() || owner[e.j].is_some() {
                EdgeClass::T
            } else {
                EdgeClass::U
            }
        })
        .collect();
    Ok(Matching { pairs, classes })
}

pub fn extract_matching(sol: &RelaxSolution, g: &Graph, t: f64) -> Result<Matching> {
    if sol.n != g.n {
        return Err(Error::DimensionMismatch(format!("solution has n = {}, graph {}", sol.n, g.n)));
    }
    let y: Vec<f64> = g.edges.iter().map(|e| (1.0 - sol.pair_value(e.i, e.j)) / 2.0).collect();
    extract_matching_from_y(g, &y, t)
}

/// Rows `v_i` with `<v_i, v_j> = M_ij`, from an eigendecomposition with
/// eigenvalues in `[-PSD_TOL, 0)` clamped to zero.
pub fn gram_vectors(m: &DMatrix<f64>) -> Result<Vec<Vec<f64>>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch("M is not square".into()));
    }
    let asym = (m - m.transpose()).abs().max();
    if asym > 1e-9 {
        return Err(Error::Precondition(format!("M is not symmetric (asymmetry {asym:.2e})")));
    }
    if let Some(i) = (0..n).find(|&i| (m[(i, i)] - 3.0).abs() > 1e-6) {
        return Err(Error::Precondition(format!("M[{i}][{i}] = {} differs from 3", m[(i, i)])));
    }
    let eig = m.clone().symmetric_eigen();
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -PSD_TOL {
        return Err(Error::NotPsd { min_eig: min });
    }
    let roots: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
    Ok((0..n)
        .map(|i| (0..n).map(|k| eig.eigenvectors[(i, k)] * roots[k]).collect())
        .collect())
}

/// Bloch vectors `R v_k / ||R v_k||` for a `3 x d` Gaussian `R`.
fn project(vectors: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Vec<[f64; 3]> {
    let d = vectors.first().map_or(0, Vec::len);
    let r: Vec<[f64; 3]> = (0..d)
        .map(|_| [0; 3].map(|_| StandardNormal.sample(rng)))
        .collect();
    vectors
        .iter()
        .map(|v| {
            let mut t = [0.0; 3];
            for (vk, rk) in v.iter().zip(&r) {
                for a in 0..3 {
                    t[a] += rk[a] * vk;
                }
            }
            let len = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
            if len > 0.0 {
                t.map(|c| c / len)
            } else {
                [0.0, 0.0, 1.0]
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundOptions {
    pub t: f64,
    pub samples: usize,
    pub seed: u64,
}

impl Default for RoundOptions {
    fn default() -> Self {
        Self {
            t: DEFAULT_T,
            samples: 1000,
            seed: 0,
        }
    }
}

/// Energies are QMC-max values (`sum_e w_e (1 - x_e) / 2` form; larger is better).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundingResult {
    pub t: f64,
    pub seed: u64,
    pub samples: usize,
    pub matching: Vec<(usize, usize)>,
    pub edge_classes: Vec<EdgeClass>,
    pub relaxation_value: f64,
    pub expected_energy_s: f64,
    pub expected_energy_prod: f64,
    pub best_sampled_energy: f64,
    /// True when the best sample is the matched state.
    pub best_uses_matching: bool,
    pub best_bloch: Vec<[f64; 3]>,
    pub sample_mean_s: f64,
    pub sample_mean_prod: f64,
    pub sample_se_s: f64,
    pub sample_se_prod: f64,
    pub guarantee_ratio: f64,
}

impl RoundingResult {
    pub fn expected_best(&self) -> f64 {
        self.expected_energy_s.max(self.expected_energy_prod)
    }
}

struct Draw {
    s: f64,
    prod: f64,
    bloch: Vec<[f64; 3]>,
}

fn qmc_value(g: &Graph, a: &BlochAssignment) -> f64 {
    g.edges.iter().map(|e| e.w * edge_value(a, e.i, e.j)).sum()
}

fn mean_se(v: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = v.clone().count();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = v.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = v.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Round a Pauli level-1 solution. Expectations are exact; samples exhibit
/// explicit states and are drawn in parallel from per-draw streams.
pub fn round(sol: &RelaxSolution, g: &Graph, opts: &RoundOptions) -> Result<RoundingResult> {
    let m = sol
        .moment_matrix()
        .ok_or_else(|| Error::Precondition("rounding needs a Pauli level-1 solution carrying M".into()))?;
    if m.nrows() != g.n {
        return Err(Error::DimensionMismatch(format!("M is {}x{}, graph has n = {}", m.nrows(), m.ncols(), g.n)));
    }
    let matching = extract_matching(sol, g, opts.t)?;
    let vectors = gram_vectors(&m)?;

    let mut exp_s = 0.0;
    let mut exp_prod = 0.0;
    for (e, class) in g.edges.iter().zip(&matching.classes) {
        let ev = expected_edge_value(m[(e.i, e.j)])?;
        exp_prod += e.w * ev;
        exp_s += e.w
            * match class {
                EdgeClass::S => 1.0,
                EdgeClass::T => 0.25,
                EdgeClass::U => ev,
            };
    }

    let draws: Vec<Draw> = (0..opts.samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(k as u64);
            let bloch = project(&vectors, &mut rng);
            let prod = qmc_value(g, &BlochAssignment::product(bloch.clone()));
            let s = qmc_value(g, &BlochAssignment::with_matching(&bloch, &matching.pairs));
            Draw { s, prod, bloch }
        })
        .collect();
    let (sample_mean_s, sample_se_s) = mean_se(draws.iter().map(|d| d.s));
    let (sample_mean_prod, sample_se_prod) = mean_se(draws.iter().map(|d| d.prod));
    let mut best = (f64::NEG_INFINITY, false, Vec::new());
    for d in &draws {
        if d.s > best.0 {
            best = (d.s, true, d.bloch.clone());
        }
        if d.prod > best.0 {
            best = (d.prod, false, d.bloch.clone());
        }
    }

    let relax = sol.objective.qmc_max();
    let expected_best = exp_s.max(exp_prod);
    let guarantee_ratio = if relax > 0.0 { expected_best / relax } else { 1.0 };
    Ok(RoundingResult {
        t: opts.t,
        seed: opts.seed,
        samples: opts.samples,
        matching: matching.pairs,
        edge_classes: matching.classes,
        relaxation_value: relax,
        expected_energy_s: exp_s,
        expected_energy_prod: exp_prod,
        best_sampled_energy: best.0,
        best_uses_matching: best.1,
        best_bloch: best.2,
        sample_mean_s,
        sample_mean_prod,
        sample_se_s,
        sample_se_prod,
        guarantee_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    /// `2F1(1/2,1/2;5/2;z) = (3/2) int_0^{pi/2} cos^3 p (1 - z sin^2 p)^{-1/2} dp`
    /// by composite Gauss-Legendre.
    fn euler_integral(z: f64) -> f64 {
        let nodes = [
            (-0.906_179_845_938_664, 0.236_926_885_056_189),
            (-0.538_469_310_105_683, 0.478_628_670_499_366),
            (0.0, 0.568_888_888_888_889),
            (0.538_469_310_105_683, 0.478_628_670_499_366),
            (0.906_179_845_938_664, 0.236_926_885_056_189),
        ];
        let panels = 2_000;
        let h = PI / 2.0 / panels as f64;
        let mut sum = 0.0;
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for (x, w) in nodes {
                let p = mid + 0.5 * h * x;
                sum += w * 0.5 * h * p.cos().powi(3) / (1.0 - z * p.sin().powi(2)).sqrt();
            }
        }
        1.5 * sum
    }

    #[test]
    fn hypergeometric_values() {
        assert_eq!(hyp2f1_half(0.0).unwrap(), 1.0);
        assert!((hyp2f1_half(1.0).unwrap() - 3.0 * PI / 8.0).abs() < 1e-14);
        for z in [0.1, 0.25, 0.5, 0.500001, 0.7, 0.99, 0.999999] {
            let a = hyp2f1_half(z).unwrap();
            let b = euler_integral(z);
            assert!((a - b).abs() < 1e-11, "z={z}: {a} vs {b}");
        }
        assert!(hyp2f1_half(1.0 + 1e-12).is_err() && hyp2f1_half(-1e-12).is_err());
    }

    #[test]
    fn f_limits_and_minimum() {
        assert!((rounding_function(0.25).unwrap() - 1.0).abs() < 1e-12);
        assert!((rounding_function(1.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((rounding_function_with(1.0, FForm::Uncorrected).unwrap() - 1.0 / 6.0).abs() < 1e-12);
        let min = (1..=1000)
            .map(|k| rounding_function(k as f64 * 1e-3).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!((0.496..=0.5).contains(&min), "{min}");
        assert!(rounding_function(0.0).is_err());
    }

    #[test]
    fn edge_values() {
        assert!((expected_edge_value(0.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((expected_edge_value(-3.0).unwrap() - 0.5).abs() < 1e-13);
        assert!(expected_edge_value(3.0).unwrap().abs() < 1e-13);
        for m in [-2.5, -1.0, 0.3, 0.9] {
            let x = (1.0 - m) / 4.0;
            let a = expected_edge_value(m).unwrap();
            assert!((a - x * rounding_function(x).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn threshold_algebra() {
        assert!((t_prime(0.771).unwrap() - 0.7284).abs() < 5e-4);
        assert!((t_prime(0.75).unwrap() - 0.75).abs() < 1e-15);
        assert!((t_prime(1.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(t_prime(0.7).is_err());
    }

    fn path() -> Graph {
        Graph::new(3, [Edge::new(0, 1, 1.0), Edge::new(1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn matching_examples() {
        let m = extract_matching_from_y(&path(), &[0.8, 0.1], DEFAULT_T).unwrap();
        assert_eq!(m.pairs, vec![(0, 1)]);
        assert_eq!(m.classes, vec![EdgeClass::S, EdgeClass::T]);
        let m = extract_matching_from_y(&path(), &[0.5, 0.5], DEFAULT_T).unwrap();
        assert!(m.pairs.is_empty() && m.classes == vec![EdgeClass::U; 2]);
        let err = extract_matching_from_y(&path(), &[0.8, 0.8], DEFAULT_T).unwrap_err();
        assert!(matches!(err, Error::InconsistentSolution(_)));
        assert!(t_prime(0.8).unwrap() < 0.8);
    }

    #[test]
    fn gram_examples() {
        let m = DMatrix::from_row_slice(2, 2, &[3.0, -3.0, -3.0, 3.0]);
        let v = gram_vectors(&m).unwrap();
        for k in 0..2 {
            assert!((v[0][k] + v[1][k]).abs() < 1e-12);
        }
        assert!((v[0].iter().map(|a| a * a).sum::<f64>() - 3.0).abs() < 1e-12);
        let v = gram_vectors(&(DMatrix::identity(4, 4) * 3.0)).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let ip: f64 = v[i].iter().zip(&v[j]).map(|(a, b)| a * b).sum();
                assert!((ip - if i == j { 3.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
        let bad = DMatrix::from_row_slice(2, 2, &[3.0, 3.5, 3.5, 3.0]);
        assert!(matches!(gram_vectors(&bad), Err(Error::NotPsd { .. })));
    }
}
