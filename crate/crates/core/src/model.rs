//! Conic relaxations of the Quantum Max Cut ground-state problem.
//!
//! Variables are swap expectations `x_ij` for every vertex pair (plus, for
//! the four-body model, disjoint-pair products). The objective is always
//! the VarBench energy `sum_e w_e (2 x_e - 1)`, minimized.

use std::collections::BTreeSet;
use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::conic::svec::svec_len;
use crate::conic::{self, check_point, Cone, ConicProgram, Method, Residuals, SolveOptions, SparseMatrix, Status};
use crate::error::{Error, Result};
use crate::graph::{Graph, ScalingConvention};
use crate::symmetry::{fourqubit_forms, Affine9, PAIRS4};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relaxation {
    #[serde(rename = "soc")]
    Soc,
    #[serde(rename = "soc-p1")]
    SocP1,
    #[serde(rename = "soc-4")]
    Soc4,
}

impl Relaxation {
    pub fn name(self) -> &'static str {
        match self {
            Relaxation::Soc => "soc",
            Relaxation::SocP1 => "soc-p1",
            Relaxation::Soc4 => "soc-4",
        }
    }
}

impl std::str::FromStr for Relaxation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "soc" => Ok(Relaxation::Soc),
            "soc-p1" | "socp1" | "p1" => Ok(Relaxation::SocP1),
            "soc-4" | "soc4" => Ok(Relaxation::Soc4),
            _ => Err(Error::InvalidParameter(format!("unknown relaxation '{s}'"))),
        }
    }
}

/// Which vertex subsets receive marginal constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubsetPolicy {
    #[default]
    All,
    /// Subsets containing at least two graph edges.
    TwoEdge,
}

impl std::str::FromStr for SubsetPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "all" => Ok(SubsetPolicy::All),
            "two-edge" => Ok(SubsetPolicy::TwoEdge),
            _ => Err(Error::InvalidParameter(format!("unknown subset policy '{s}'"))),
        }
    }
}

pub type TriplePolicy = SubsetPolicy;
pub type QuadPolicy = SubsetPolicy;

/// Index of every model variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableMap {
    pub n: usize,
    pub pairs: Vec<(usize, usize)>,
    /// Quadruples carrying product variables, in variable order.
    pub quads: Vec<[usize; 4]>,
}

impl VariableMap {
    pub fn new(n: usize) -> Self {
        let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Self { n, pairs, quads: Vec::new() }
    }

    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    pub fn num_vars(&self) -> usize {
        self.pairs.len() + 3 * self.quads.len()
    }

    /// Variable of `x_ij` (either order).
    pub fn pair(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        debug_assert!(i != j && j < self.n);
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    /// Variable of product `which` (`0: 12|34, 1: 13|24, 2: 14|23`) of quad `q`.
    pub fn product(&self, q: usize, which: usize) -> usize {
        self.pairs.len() + 3 * q + which
    }
}

/// Parameters of `||A x|| <= c.x + d` for `x = (x_ij, x_ik, x_jk)`, `i < j < k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtSocParams {
    pub a: [[f64; 3]; 2],
    pub c: [f64; 3],
    pub d: f64,
}

pub fn pt_soc_params() -> PtSocParams {
    let s3 = 3f64.sqrt();
    PtSocParams {
        a: [[-1.0 / 3.0, -1.0 / 3.0, 2.0 / 3.0], [s3 / 3.0, -s3 / 3.0, 0.0]],
        c: [-1.0 / 3.0; 3],
        d: 1.0,
    }
}

impl PtSocParams {
    /// `(||A x||, c.x + d)`.
    pub fn sides(&self, x: [f64; 3]) -> (f64, f64) {
        let r: Vec<f64> = self.a.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect();
        let lhs = (r[0] * r[0] + r[1] * r[1]).sqrt();
        let rhs = self.c.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.d;
        (lhs, rhs)
    }
}

/// `E_to` from `E_from` given the total edge weight `w`.
pub fn convert_energy(value: f64, from: ScalingConvention, to: ScalingConvention, w: f64) -> f64 {
    use ScalingConvention::*;
    match (from, to) {
        (QmcMin, VarBench) => w + 4.0 * value,
        (VarBench, QmcMin) => (value - w) / 4.0,
        _ => value,
    }
}

pub fn select_triples(g: &Graph, policy: TriplePolicy) -> Vec<[usize; 3]> {
    let n = g.n;
    match policy {
        SubsetPolicy::All => (0..n)
            .flat_map(|i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| [i, j, k])))
            .collect(),
        SubsetPolicy::TwoEdge => {
            let nb = g.neighbors();
            let mut set = BTreeSet::new();
            for (c, list) in nb.iter().enumerate() {
                for (a, &u) in list.iter().enumerate() {
                    for &v in &list[a + 1..] {
                        let mut t = [c, u, v];
                        t.sort_unstable();
                        set.insert(t);
                    }
                }
            }
            set.into_iter().collect()
        }
    }
}

pub fn select_quads(g: &Graph, policy: QuadPolicy) -> Vec<[usize; 4]> {
    let n = g.n;
    let mut adj = vec![false; n * n];
    for e in &g.edges {
        adj[e.i * n + e.j] = true;
    }
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    let q = [i, j, k, l];
                    let keep = match policy {
                        SubsetPolicy::All => true,
                        SubsetPolicy::TwoEdge => PAIRS4.iter().filter(|&&(a, b)| adj[q[a] * n + q[b]]).count() >= 2,
                    };
                    if keep {
                        out.push(q);
                    }
                }
            }
        }
    }
    out
}

/// Affine slack `s = constant + sum coef x`.
type Expr = (f64, Vec<(usize, f64)>);

#[derive(Default)]
struct Builder {
    nonneg: Vec<Expr>,
    soc: Vec<Vec<Expr>>,
    psd: Vec<(usize, Vec<Expr>)>,
}

impl Builder {
    fn finish(self, g: &Graph, vars: &VariableMap) -> Result<ConicProgram> {
        let nv = vars.num_vars();
        let mut c = vec![0.0; nv];
        for e in &g.edges {
            c[vars.pair(e.i, e.j)] += 2.0 * e.w;
        }
        let mut rows: Vec<&Expr> = Vec::new();
        let mut cones = Vec::new();
        if !self.nonneg.is_empty() {
            cones.push(Cone::NonNeg(self.nonneg.len()));
            rows.extend(&self.nonneg);
        }
        for b in &self.soc {
            cones.push(Cone::Soc(b.len()));
            rows.extend(b);
        }
        for (s, b) in &self.psd {
            cones.push(Cone::Psd(*s));
            rows.extend(b);
        }
        let mut trip = Vec::new();
        let mut b = Vec::with_capacity(rows.len());
        for (r, (k, coefs)) in rows.iter().enumerate() {
            b.push(*k);
            trip.extend(coefs.iter().map(|&(v, a)| (r, v, -a)));
        }
        let a = SparseMatrix::from_triplets(rows.len(), nv, trip)?;
        let p = ConicProgram {
            c,
            offset: -g.total_weight(),
            a,
            b,
            cones,
        };
        p.validate()?;
        Ok(p)
    }
}

fn add_box_and_triples(bld: &mut Builder, vars: &VariableMap, triples: &[[usize; 3]]) {
    for v in 0..vars.num_pairs() {
        bld.nonneg.push((1.0, vec![(v, -1.0)]));
        bld.nonneg.push((1.0, vec![(v, 1.0)]));
    }
    let pt = pt_soc_params();
    for &[i, j, k] in triples {
        let ids = [vars.pair(i, j), vars.pair(i, k), vars.pair(j, k)];
        let sum: Vec<(usize, f64)> = ids.iter().map(|&v| (v, 1.0)).collect();
        bld.nonneg.push((0.0, sum.clone()));
        bld.nonneg.push((3.0, sum.iter().map(|&(v, a)| (v, -a)).collect()));
        let head = (pt.d, ids.iter().zip(pt.c).map(|(&v, c)| (v, c)).collect());
        let tail = pt.a.iter().map(|row| (0.0, ids.iter().zip(row).map(|(&v, &a)| (v, a)).collect()));
        bld.soc.push(std::iter::once(head).chain(tail).collect());
    }
}

fn add_quads(bld: &mut Builder, vars: &VariableMap) {
    let f = fourqubit_forms();
    for (q, quad) in vars.quads.iter().enumerate() {
        let ids: Vec<usize> = PAIRS4
            .iter()
            .map(|&(a, b)| vars.pair(quad[a], quad[b]))
            .chain((0..3).map(|w| vars.product(q, w)))
            .collect();
        let expr = |a: &Affine9| -> Expr {
            let coefs = ids.iter().zip(a.coef).filter(|(_, c)| *c != 0.0).map(|(&v, c)| (v, c)).collect();
            (a.constant, coefs)
        };
        let scaled = |e: Expr, s: f64| -> Expr { (e.0 * s, e.1.into_iter().map(|(v, c)| (v, c * s)).collect()) };
        bld.nonneg.push(expr(&f.sym));
        let [b0, b1, b2] = &f.bloch;
        bld.nonneg.push(expr(&f.b[0][0]));
        bld.nonneg.push(expr(&f.b[1][1]));
        bld.soc.push(vec![expr(b0), expr(b1), expr(b2)]);
        let mut block = Vec::with_capacity(6);
        for jj in 0..3 {
            for ii in 0..=jj {
                let e = expr(&f.a[ii][jj]);
                block.push(if ii == jj { e } else { scaled(e, SQRT_2) });
            }
        }
        bld.psd.push((3, block));
    }
}

fn add_pauli1(bld: &mut Builder, vars: &VariableMap) {
    let n = vars.n;
    let mut block = Vec::with_capacity(svec_len(n));
    for j in 0..n {
        for i in 0..=j {
            if i == j {
                block.push((3.0, Vec::new()));
            } else {
                block.push((-SQRT_2, vec![(vars.pair(i, j), 2.0 * SQRT_2)]));
            }
        }
    }
    bld.psd.push((n, block));
}

fn require_n(g: &Graph, min: usize) -> Result<()> {
    g.validate()?;
    if g.n < min {
        return Err(Error::InvalidInstance(format!("model needs n >= {min}, graph has n = {}", g.n)));
    }
    Ok(())
}

/// Box bounds, LM rows and the PT cone for every selected triple.
pub fn build_soc_model(g: &Graph, triples: TriplePolicy) -> Result<(ConicProgram, VariableMap)> {
    require_n(g, 2)?;
    let vars = VariableMap::new(g.n);
    let mut bld = Builder::default();
    add_box_and_triples(&mut bld, &vars, &select_triples(g, triples));
    Ok((bld.finish(g, &vars)?, vars))
}

/// The SOC model plus `M >= 0` with `M_ii = 3`, `M_ij = 2 x_ij - 1`.
pub fn build_pauli1_model(g: &Graph, triples: TriplePolicy) -> Result<(ConicProgram, VariableMap)> {
    require_n(g, 2)?;
    let vars = VariableMap::new(g.n);
    let mut bld = Builder::default();
    add_box_and_triples(&mut bld, &vars, &select_triples(g, triples));
    add_pauli1(&mut bld, &vars);
    Ok((bld.finish(g, &vars)?, vars))
}

/// The SOC model plus the partition `[4]`, `[3,1]` and `[2,2]` conditions
/// on every selected quadruple.
pub fn build_fourbody_model(g: &Graph, triples: TriplePolicy, quads: QuadPolicy) -> Result<(ConicProgram, VariableMap)> {
    require_n(g, 4)?;
    let mut vars = VariableMap::new(g.n);
    vars.quads = select_quads(g, quads);
    let mut bld = Builder::default();
    add_box_and_triples(&mut bld, &vars, &select_triples(g, triples));
    add_quads(&mut bld, &vars);
    Ok((bld.finish(g, &vars)?, vars))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelOptions {
    pub relaxation: Relaxation,
    pub triples: TriplePolicy,
    pub quads: QuadPolicy,
}

impl ModelOptions {
    pub fn new(relaxation: Relaxation) -> Self {
        Self {
            relaxation,
            triples: SubsetPolicy::All,
            quads: SubsetPolicy::TwoEdge,
        }
    }
}

pub fn build_model(g: &Graph, opts: &ModelOptions) -> Result<(ConicProgram, VariableMap)> {
    match opts.relaxation {
        Relaxation::Soc => build_soc_model(g, opts.triples),
        Relaxation::SocP1 => build_pauli1_model(g, opts.triples),
        Relaxation::Soc4 => build_fourbody_model(g, opts.triples, opts.quads),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objectives {
    pub varbench: f64,
    pub qmc_min: f64,
}

impl Objectives {
    pub fn from_varbench(e: f64, w: f64) -> Self {
        Self {
            varbench: e,
            qmc_min: convert_energy(e, ScalingConvention::VarBench, ScalingConvention::QmcMin, w),
        }
    }

    pub fn get(&self, s: ScalingConvention) -> f64 {
        match s {
            ScalingConvention::VarBench => self.varbench,
            ScalingConvention::QmcMin => self.qmc_min,
        }
    }

    /// The maximization form `sum_e w_e (1 - x_e) / 2 = -qmc_min`.
    pub fn qmc_max(&self) -> f64 {
        -self.qmc_min
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub status: Status,
    pub method: Method,
    pub iterations: usize,
    pub residuals: Residuals,
    pub tol: f64,
    pub dual_objective: f64,
    /// Largest cone violation of the returned point.
    pub max_violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadValues {
    pub quad: [usize; 4],
    /// `<(12)(34)>, <(13)(24)>, <(14)(23)>` in local labels.
    pub products: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxSolution {
    pub relaxation: Relaxation,
    pub n: usize,
    pub pairs: Vec<(usize, usize)>,
    /// `x_ij = <SWAP_ij>` in `pairs` order.
    pub x: Vec<f64>,
    /// `y_ij = (1 - x_ij) / 2`.
    pub y: Vec<f64>,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x4: Option<Vec<QuadValues>>,
    pub objective: Objectives,
    pub solver: SolverStats,
}

impl RelaxSolution {
    pub fn pair_value(&self, i: usize, j: usize) -> f64 {
        let vars = VariableMap::new(self.n);
        self.x[vars.pair(i, j)]
    }

    pub fn moment_matrix(&self) -> Option<DMatrix<f64>> {
        self.m
            .as_ref()
            .map(|rows| DMatrix::from_fn(self.n, self.n, |i, j| rows[i][j]))
    }

    /// `M_ii = 3`, `M_ij = 2 x_ij - 1`.
    pub fn moment_from_x(n: usize, x: &[f64]) -> Vec<Vec<f64>> {
        let vars = VariableMap::new(n);
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { 3.0 } else { 2.0 * x[vars.pair(i, j)] - 1.0 })
                    .collect()
            })
            .collect()
    }
}

/// Build, solve and package a relaxation. Non-optimal solver outcomes are
/// errors carrying the status.
pub fn solve_relaxation(g: &Graph, model: &ModelOptions, opts: &SolveOptions) -> Result<RelaxSolution> {
    let (prog, vars) = build_model(g, model)?;
    let sol = conic::solve(&prog, opts)?;
    if sol.status != Status::Optimal {
        return Err(Error::Numerical(format!(
            "{} solve of '{}' ended with {} after {} iterations (residuals {:.2e}/{:.2e}/{:.2e})",
            model.relaxation.name(),
            g.name,
            sol.status,
            sol.iterations,
            sol.residuals.primal,
            sol.residuals.dual,
            sol.residuals.gap
        )));
    }
    let report = check_point(&prog, &sol.x, opts.tol)?;
    let np = vars.num_pairs();
    let x: Vec<f64> = sol.x[..np].to_vec();
    let y = x.iter().map(|v| (1.0 - v) / 2.0).collect();
    let m = (model.relaxation == Relaxation::SocP1).then(|| RelaxSolution::moment_from_x(g.n, &x));
    let x4 = (model.relaxation == Relaxation::Soc4).then(|| {
        vars.quads
            .iter()
            .enumerate()
            .map(|(q, &quad)| QuadValues {
                quad,
                products: [0, 1, 2].map(|w| sol.x[vars.product(q, w)]),
            })
            .collect()
    });
    Ok(RelaxSolution {
        relaxation: model.relaxation,
        n: g.n,
        pairs: vars.pairs,
        x,
        y,
        m,
        x4,
        objective: Objectives::from_varbench(sol.objective, g.total_weight()),
        solver: SolverStats {
            status: sol.status,
            method: sol.method,
            iterations: sol.iterations,
            residuals: sol.residuals,
            tol: opts.tol,
            dual_objective: sol.dual_objective,
            max_violation: report.max_violation,
        },
    })
}
