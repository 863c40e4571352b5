//! Exact ground energies of weighted Heisenberg / QMC Hamiltonians and
//! closed-form energies of product-and-singlet states.
//!
//! `H_varbench = sum_e w_e (X_i X_j + Y_i Y_j + Z_i Z_j)` conserves the
//! number of up spins, so it is applied matrix-free on one magnetization
//! sector at a time.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, ScalingConvention};
use crate::model::convert_energy;

pub const MAX_DENSE_QUBITS: usize = 12;
pub const MAX_LANCZOS_QUBITS: usize = 24;

/// Sectors at or below this dimension are diagonalized densely.
const DENSE_CUTOFF: usize = 256;
const KRYLOV_DIM: usize = 120;
const MAX_RESTARTS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EdMethod {
    Dense,
    Lanczos,
}

impl std::str::FromStr for EdMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dense" => Ok(EdMethod::Dense),
            "lanczos" => Ok(EdMethod::Lanczos),
            _ => Err(Error::InvalidParameter(format!("unknown ED method '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdOptions {
    pub method: EdMethod,
    /// Diagonalize each magnetization sector separately.
    pub sectors: bool,
    pub tol: f64,
}

impl Default for EdOptions {
    fn default() -> Self {
        Self {
            method: EdMethod::Lanczos,
            sectors: true,
            tol: 1e-9,
        }
    }
}

impl EdOptions {
    pub fn dense() -> Self {
        Self {
            method: EdMethod::Dense,
            ..Self::default()
        }
    }
}

/// Matrix-free Hamiltonian on the full `2^n` space or one sector.
#[derive(Debug, Clone)]
pub struct SparseHamiltonian {
    pub n: usize,
    pub scaling: ScalingConvention,
    edges: Vec<(usize, usize, f64)>,
    total_weight: f64,
    /// Basis states in increasing order; `None` for the full space.
    basis: Option<Vec<u32>>,
    diag: Vec<f64>,
    binom: Vec<Vec<usize>>,
}

impl SparseHamiltonian {
    pub fn new(g: &Graph, scaling: ScalingConvention) -> Result<Self> {
        Self::build(g, scaling, None)
    }

    /// Restriction to states with exactly `ups` spins up.
    pub fn sector(g: &Graph, scaling: ScalingConvention, ups: usize) -> Result<Self> {
        if ups > g.n {
            return Err(Error::InvalidParameter(format!("sector {ups} exceeds n = {}", g.n)));
        }
        Self::build(g, scaling, Some(ups))
    }

    fn build(g: &Graph, scaling: ScalingConvention, ups: Option<usize>) -> Result<Self> {
        g.validate()?;
        if g.n > MAX_LANCZOS_QUBITS {
            return Err(Error::InvalidParameter(format!(
                "n = {} exceeds the exact-diagonalization cap {MAX_LANCZOS_QUBITS}",
                g.n
            )));
        }
        let n = g.n;
        let binom = binomials(n);
        let basis = ups.map(|k| sector_basis(n, k));
        let edges: Vec<_> = g.edges.iter().map(|e| (e.i, e.j, e.w)).collect();
        let dim = basis.as_ref().map_or(1usize << n, Vec::len);
        let state = |idx: usize| basis.as_ref().map_or(idx as u32, |b| b[idx]);
        let diag = (0..dim)
            .into_par_iter()
            .map(|idx| {
                let s = state(idx);
                edges
                    .iter()
                    .map(|&(i, j, w)| if (s >> i ^ s >> j) & 1 == 0 { w } else { -w })
                    .sum()
            })
            .collect();
        Ok(Self {
            n,
            scaling,
            edges,
            total_weight: g.total_weight(),
            basis,
            diag,
            binom,
        })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    fn index(&self, s: u32) -> usize {
        match &self.basis {
            None => s as usize,
            // Colex rank: sum over set bits p_t (t-th from the bottom) of C(p_t, t + 1).
            Some(_) => {
                let mut rank = 0;
                let mut t = 0;
                let mut bits = s;
                while bits != 0 {
                    let p = bits.trailing_zeros() as usize;
                    t += 1;
                    rank += self.binom[p][t];
                    bits &= bits - 1;
                }
                rank
            }
        }
    }

    fn state(&self, idx: usize) -> u32 {
        self.basis.as_ref().map_or(idx as u32, |b| b[idx])
    }

    /// VarBench action, `out = H_varbench v`.
    fn apply_varbench(&self, v: &[f64], out: &mut [f64]) {
        out.par_iter_mut().enumerate().with_min_len(512).for_each(|(idx, o)| {
            let s = self.state(idx);
            let mut acc = self.diag[idx] * v[idx];
            for &(i, j, w) in &self.edges {
                if (s >> i ^ s >> j) & 1 == 1 {
                    acc += 2.0 * w * v[self.index(s ^ (1 << i | 1 << j))];
                }
            }
            *o = acc;
        });
    }

    /// `out = H v` in this Hamiltonian's scaling.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        if v.len() != self.dim() || out.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!("vector length differs from {}", self.dim())));
        }
        self.apply_varbench(v, out);
        if self.scaling == ScalingConvention::QmcMin {
            for (o, x) in out.iter_mut().zip(v) {
                *o = (*o - self.total_weight * x) / 4.0;
            }
        }
        Ok(())
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        let mut e = vec![0.0; d];
        let mut col = vec![0.0; d];
        for c in 0..d {
            e[c] = 1.0;
            self.apply(&e, &mut col).expect("dimensions agree");
            m.set_column(c, &DVector::from_column_slice(&col));
            e[c] = 0.0;
        }
        m
    }
}

fn binomials(n: usize) -> Vec<Vec<usize>> {
    let mut b = vec![vec![0usize; n + 2]; n + 1];
    for i in 0..=n {
        b[i][0] = 1;
        for k in 1..=i {
            b[i][k] = b[i - 1][k - 1] + if k < i { b[i - 1][k] } else { 0 };
        }
    }
    b
}

/// All `n`-bit words with `k` ones, increasing.
fn sector_basis(n: usize, k: usize) -> Vec<u32> {
    if k == 0 {
        return vec![0];
    }
    let limit = 1u64 << n;
    let mut out = Vec::new();
    let mut s: u64 = (1 << k) - 1;
    while s < limit {
        out.push(s as u32);
        // Gosper's hack.
        let c = s & s.wrapping_neg();
        let r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
    out
}

fn dense_min(h: &SparseHamiltonian) -> f64 {
    h.to_dense().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Lowest eigenvalue by Lanczos with full reorthogonalization and explicit
/// restarts from the current Ritz vector.
fn lanczos_min(h: &SparseHamiltonian, tol: f64, seed: u64) -> Result<f64> {
    let dim = h.dim();
    if dim <= DENSE_CUTOFF {
        return Ok(dense_min(h));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut start: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() - 0.5).collect();
    normalize(&mut start);
    let m_max = KRYLOV_DIM.min(dim);
    let mut w = vec![0.0; dim];
    let mut last = (f64::NAN, f64::INFINITY);
    for _ in 0..MAX_RESTARTS {
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        loop {
            let j = basis.len() - 1;
            h.apply(&basis[j], &mut w)?;
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            // Two rounds of classical Gram-Schmidt against the whole basis.
            for _ in 0..2 {
                for v in &basis {
                    let c = dot(&w, v);
                    axpy(-c, v, &mut w);
                }
            }
            let b = norm(&w);
            let (theta, s) = tridiagonal_min(&alpha, &beta);
            let resid = b * s.last().unwrap().abs();
            last = (theta, resid);
            let done = resid <= tol * theta.abs().max(1.0) || b <= 1e-14 * theta.abs().max(1.0);
            if done || basis.len() == m_max {
                if done {
                    return Ok(theta);
                }
                // Restart from the Ritz vector.
                let mut ritz = vec![0.0; dim];
                for (c, v) in s.iter().zip(&basis) {
                    axpy(*c, v, &mut ritz);
                }
                normalize(&mut ritz);
                start = ritz;
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
    }
    Err(Error::Numerical(format!(
        "Lanczos did not converge (dim {dim}, Ritz value {:.12}, residual {:.2e})",
        last.0, last.1
    )))
}

/// Lowest eigenpair of the symmetric tridiagonal matrix `(alpha, beta)`.
fn tridiagonal_min(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = t.symmetric_eigen();
    let (k, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    (theta, eig.eigenvectors.column(k).iter().copied().collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn normalize(v: &mut [f64]) {
    let s = norm(v);
    v.iter_mut().for_each(|x| *x /= s);
}

/// Minimum eigenvalue of the Hamiltonian of `g` in the requested scaling.
pub fn ground_energy(g: &Graph, scaling: ScalingConvention, opts: &EdOptions) -> Result<f64> {
    g.validate()?;
    let cap = match opts.method {
        EdMethod::Dense => MAX_DENSE_QUBITS,
        EdMethod::Lanczos => MAX_LANCZOS_QUBITS,
    };
    if g.n > cap {
        return Err(Error::InvalidParameter(format!(
            "n = {} exceeds the {:?} cap of {cap} qubits",
            g.n, opts.method
        )));
    }
    if g.n == 0 {
        return Ok(0.0);
    }
    let solve = |h: &SparseHamiltonian, seed: u64| match opts.method {
        EdMethod::Dense => Ok(dense_min(h)),
        EdMethod::Lanczos => lanczos_min(h, opts.tol, seed),
    };
    let vb = if opts.sectors {
        // Spin flip maps sector k to n - k, so k <= n/2 suffices.
        let mins = (0..=g.n / 2)
            .into_par_iter()
            .map(|k| solve(&SparseHamiltonian::sector(g, ScalingConvention::VarBench, k)?, k as u64))
            .collect::<Result<Vec<f64>>>()?;
        mins.into_iter().fold(f64::INFINITY, f64::min)
    } else {
        solve(&SparseHamiltonian::new(g, ScalingConvention::VarBench)?, 0)?
    };
    Ok(convert_energy(vb, ScalingConvention::VarBench, scaling, g.total_weight()))
}

/// Ground energy and a ground state on the full space (small `n` only).
pub fn ground_state(g: &Graph, scaling: ScalingConvention) -> Result<(f64, DVector<f64>)> {
    if g.n > MAX_DENSE_QUBITS {
        return Err(Error::InvalidParameter(format!("ground states are exposed only for n <= {MAX_DENSE_QUBITS}")));
    }
    let h = SparseHamiltonian::new(g, scaling)?;
    let eig = h.to_dense().symmetric_eigen();
    let (k, &e) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    Ok((e, eig.eigenvectors.column(k).into_owned()))
}

/// Per-vertex part of a product-and-singlet state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexState {
    /// Unit Bloch vector of a single-qubit pure state.
    Bloch([f64; 3]),
    /// Half of a singlet shared with `partner`.
    Matched(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochAssignment {
    pub vertices: Vec<VertexState>,
    pub matching: Vec<(usize, usize)>,
}

impl BlochAssignment {
    /// Product state with every vertex given by a Bloch vector.
    pub fn product(vectors: Vec<[f64; 3]>) -> Self {
        Self {
            vertices: vectors.into_iter().map(VertexState::Bloch).collect(),
            matching: Vec::new(),
        }
    }

    /// Singlets on `matching`, Bloch vectors elsewhere (taken from `vectors`).
    pub fn with_matching(vectors: &[[f64; 3]], matching: &[(usize, usize)]) -> Self {
        let mut vertices: Vec<VertexState> = vectors.iter().map(|&v| VertexState::Bloch(v)).collect();
        for &(i, j) in matching {
            vertices[i] = VertexState::Matched(j);
            vertices[j] = VertexState::Matched(i);
        }
        Self {
            vertices,
            matching: matching.to_vec(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.vertices.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "assignment covers {} vertices, graph has {n}",
                self.vertices.len()
            )));
        }
        let mut seen = vec![false; n];
        for &(i, j) in &self.matching {
            if i == j || i >= n || j >= n || seen[i] || seen[j] {
                return Err(Error::Validation(format!("matching pair ({i}, {j}) is invalid or not disjoint")));
            }
            seen[i] = true;
            seen[j] = true;
            if self.vertices[i] != VertexState::Matched(j) || self.vertices[j] != VertexState::Matched(i) {
                return Err(Error::Validation(format!("vertices {i}, {j} are not marked as partners")));
            }
        }
        for (v, s) in self.vertices.iter().enumerate() {
            match *s {
                VertexState::Bloch(t) => {
                    let len = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
                    if (len - 1.0).abs() > 1e-9 {
                        return Err(Error::Validation(format!("Bloch vector of vertex {v} has norm {len}")));
                    }
                }
                VertexState::Matched(_) if !seen[v] => {
                    return Err(Error::Validation(format!("vertex {v} is marked matched but not in the matching")));
                }
                VertexState::Matched(_) => {}
            }
        }
        Ok(())
    }
}

/// QMC-max value of one unit-weight edge in the state.
pub fn edge_value(a: &BlochAssignment, i: usize, j: usize) -> f64 {
    match (a.vertices[i], a.vertices[j]) {
        (VertexState::Bloch(u), VertexState::Bloch(v)) => (1.0 - (u[0] * v[0] + u[1] * v[1] + u[2] * v[2])) / 4.0,
        (VertexState::Matched(p), _) if p == j => 1.0,
        _ => 0.25,
    }
}

/// Exact energy of a product-and-singlet state.
pub fn state_energy(g: &Graph, a: &BlochAssignment, scaling: ScalingConvention) -> Result<f64> {
    a.validate(g.n)?;
    let qmc_max: f64 = g.edges.iter().map(|e| e.w * edge_value(a, e.i, e.j)).sum();
    Ok(convert_energy(-qmc_max, ScalingConvention::QmcMin, scaling, g.total_weight()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_erdos_renyi, gen_square, Edge};
    use ScalingConvention::*;

    fn triangle() -> Graph {
        Graph::new(3, [Edge::new(0, 1, 1.0), Edge::new(0, 2, 1.0), Edge::new(1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn small_closed_forms() {
        let edge = Graph::new(2, [Edge::new(0, 1, 1.0)]).unwrap();
        for opts in [EdOptions::default(), EdOptions::dense()] {
            assert!((ground_energy(&edge, VarBench, &opts).unwrap() + 3.0).abs() < 1e-12);
            assert!((ground_energy(&edge, QmcMin, &opts).unwrap() + 1.0).abs() < 1e-12);
            assert!((ground_energy(&triangle(), VarBench, &opts).unwrap() + 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn star_by_spin_addition() {
        // 2 (S(S+1) - 15/4 - 3/4) with S = 1 for K_{1,3}.
        let g = Graph::new(4, (1..4).map(|k| Edge::new(0, k, 1.0))).unwrap();
        assert!((ground_energy(&g, VarBench, &EdOptions::default()).unwrap() + 5.0).abs() < 1e-10);
    }

    #[test]
    fn sector_ranks_are_dense() {
        let g = gen_square(3, false).unwrap();
        for k in 0..=9 {
            let h = SparseHamiltonian::sector(&g, VarBench, k).unwrap();
            assert_eq!(h.dim(), binomials(9)[9][k]);
            for idx in 0..h.dim() {
                assert_eq!(h.index(h.state(idx)), idx);
            }
        }
    }

    #[test]
    fn sectors_and_methods_agree() {
        let g = gen_erdos_renyi(10, 0.5, 7).unwrap();
        let full = ground_energy(&g, VarBench, &EdOptions { sectors: false, ..EdOptions::dense() }).unwrap();
        let sect = ground_energy(&g, VarBench, &EdOptions::dense()).unwrap();
        let lz = ground_energy(&g, VarBench, &EdOptions::default()).unwrap();
        let lz_full = ground_energy(&g, VarBench, &EdOptions { sectors: false, ..EdOptions::default() }).unwrap();
        assert!((full - sect).abs() < 1e-9 && (full - lz).abs() < 1e-8 && (full - lz_full).abs() < 1e-8);
    }

    #[test]
    fn qmc_min_operator_is_shifted() {
        let g = triangle();
        let a = SparseHamiltonian::new(&g, VarBench).unwrap().to_dense();
        let b = SparseHamiltonian::new(&g, QmcMin).unwrap().to_dense();
        let want = (a - DMatrix::identity(8, 8) * 3.0) / 4.0;
        assert!((b - want).abs().max() < 1e-14);
    }

    #[test]
    fn ground_state_is_eigenvector() {
        let g = gen_square(2, false).unwrap();
        let (e, v) = ground_state(&g, VarBench).unwrap();
        let h = SparseHamiltonian::new(&g, VarBench).unwrap().to_dense();
        assert!((&h * &v - &v * e).norm() < 1e-10);
    }

    #[test]
    fn caps() {
        let g = Graph::new(13, []).unwrap();
        assert!(ground_energy(&g, VarBench, &EdOptions::dense()).is_err());
        let g = Graph::new(25, []).unwrap();
        assert!(ground_energy(&g, VarBench, &EdOptions::default()).is_err());
    }

    #[test]
    fn state_energy_examples() {
        let edge = Graph::new(2, [Edge::new(0, 1, 1.0)]).unwrap();
        let m = BlochAssignment::with_matching(&[[0.0, 0.0, 1.0]; 2], &[(0, 1)]);
        assert_eq!(state_energy(&edge, &m, QmcMin).unwrap(), -1.0);
        assert_eq!(state_energy(&edge, &m, VarBench).unwrap(), -3.0);
        let aligned = BlochAssignment::product(vec![[1.0, 0.0, 0.0]; 2]);
        assert_eq!(state_energy(&edge, &aligned, QmcMin).unwrap(), 0.0);
        let tri = BlochAssignment::with_matching(&[[0.0, 1.0, 0.0]; 3], &[(0, 1)]);
        assert_eq!(state_energy(&triangle(), &tri, QmcMin).unwrap(), -1.5);
        assert_eq!(state_energy(&triangle(), &tri, VarBench).unwrap(), -3.0);
        let bad = BlochAssignment::product(vec![[1.0, 0.1, 0.0]; 2]);
        assert!(state_energy(&edge, &bad, QmcMin).is_err());
    }
}
