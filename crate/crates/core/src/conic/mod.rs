//! Standard-form conic programs and their solvers.
//!
//! Programs are stated as
//!
//! ```text
//! minimize  c'x + offset   subject to   A x + s = b,   s in K
//! ```
//!
//! where `K` is an ordered product of zero, nonnegative, second-order and
//! PSD cones. PSD blocks use the scaled vectorization from [`svec`], so all
//! cones share the Euclidean inner product.

mod admm;
mod check;
pub(crate) mod cones;
mod ipm;
pub mod sparse;
pub mod svec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use check::{check_point, ConeViolation, PointReport};
pub use sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cone {
    /// `s = 0`.
    Zero(usize),
    /// `s >= 0` elementwise.
    NonNeg(usize),
    /// `s_0 >= ||s_1..||`; the size counts the head entry.
    Soc(usize),
    /// Side length of a symmetric block, stored in svec form.
    Psd(usize),
}

impl Cone {
    pub fn dim(&self) -> usize {
        match *self {
            Cone::Zero(m) | Cone::NonNeg(m) | Cone::Soc(m) => m,
            Cone::Psd(s) => svec::svec_len(s),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Cone::Zero(_) => "zero",
            Cone::NonNeg(_) => "nonneg",
            Cone::Soc(_) => "soc",
            Cone::Psd(_) => "psd",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConicProgram {
    pub c: Vec<f64>,
    /// Constant added to the reported objective.
    #[serde(default)]
    pub offset: f64,
    pub a: SparseMatrix,
    pub b: Vec<f64>,
    pub cones: Vec<Cone>,
}

impl ConicProgram {
    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn num_rows(&self) -> usize {
        self.b.len()
    }

    pub fn validate(&self) -> Result<()> {
        let rows: usize = self.cones.iter().map(Cone::dim).sum();
        if self.a.ncols() != self.c.len() {
            return Err(Error::InvalidProgram(format!(
                "A has {} columns but c has {} entries",
                self.a.ncols(),
                self.c.len()
            )));
        }
        if self.a.nrows() != self.b.len() || rows != self.b.len() {
            return Err(Error::InvalidProgram(format!(
                "A has {} rows, b has {}, cones cover {}",
                self.a.nrows(),
                self.b.len(),
                rows
            )));
        }
        if let Some(k) = self.cones.iter().position(|k| k.dim() == 0) {
            return Err(Error::InvalidProgram(format!("cone {k} is empty")));
        }
        let finite = self.c.iter().chain(&self.b).all(|v| v.is_finite())
            && self.a.triplets().all(|(_, _, v)| v.is_finite())
            && self.offset.is_finite();
        if !finite {
            return Err(Error::InvalidProgram("non-finite data".into()));
        }
        Ok(())
    }

    /// Row ranges of each cone, in order.
    pub fn cone_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.cones
            .iter()
            .map(|k| {
                let r = start..start + k.dim();
                start = r.end;
                r
            })
            .collect()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        dot(&self.c, x) + self.offset
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(s)?;
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    NumericalLimit,
}

impl Status {
    pub fn name(&self) -> &'static str {
        match self {
            Status::Optimal => "OPTIMAL",
            Status::PrimalInfeasible => "PRIMAL_INFEASIBLE",
            Status::DualInfeasible => "DUAL_INFEASIBLE",
            Status::NumericalLimit => "NUMERICAL_LIMIT",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// Relative primal infeasibility `||A x + s - b|| / max(1, ||b||)`.
    pub primal: f64,
    /// Relative dual infeasibility `||A'z + c|| / max(1, ||c||)`.
    pub dual: f64,
    /// Relative duality gap.
    pub gap: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.primal.max(self.dual).max(self.gap)
    }
}

/// Solver output. On `PrimalInfeasible`, `z` holds a certificate with
/// `A'z = 0`, `b'z = -1`, `z in K*`; on `DualInfeasible`, `x` holds a ray with
/// `c'x = -1`, `-A x in K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConicSolution {
    pub status: Status,
    pub x: Vec<f64>,
    pub s: Vec<f64>,
    pub z: Vec<f64>,
    /// Primal objective including the offset.
    pub objective: f64,
    /// Dual objective `-b'z + offset`.
    pub dual_objective: f64,
    pub residuals: Residuals,
    pub iterations: usize,
    pub method: Method,
}

impl ConicSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Ipm,
    Admm,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ipm" => Ok(Method::Ipm),
            "admm" => Ok(Method::Admm),
            _ => Err(Error::InvalidParameter(format!("unknown method '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub method: Method,
    /// Iteration cap for ADMM, which needs far more (cheap) iterations.
    pub admm_max_iter: usize,
    /// Print one line per iteration to stderr.
    pub verbose: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 200,
            method: Method::Ipm,
            admm_max_iter: 20_000,
            verbose: false,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }
}

/// Solve a conic program. Fails only on malformed input; numerical trouble
/// is reported through [`Status::NumericalLimit`].
pub fn solve(p: &ConicProgram, opts: &SolveOptions) -> Result<ConicSolution> {
    p.validate()?;
    if !(opts.tol > 0.0 && opts.tol.is_finite()) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {}", opts.tol)));
    }
    Ok(match opts.method {
        Method::Ipm => ipm::solve(p, opts),
        Method::Admm => admm::solve(p, opts),
    })
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Residuals of a candidate primal-dual pair in original coordinates.
pub(crate) fn residuals(p: &ConicProgram, x: &[f64], s: &[f64], z: &[f64]) -> Residuals {
    let ax = p.a.mul_vec(x);
    let rp: Vec<f64> = (0..p.b.len()).map(|i| ax[i] + s[i] - p.b[i]).collect();
    let mut rd = p.c.clone();
    p.a.mul_t_acc(z, 1.0, &mut rd);
    let pobj = dot(&p.c, x);
    let dobj = -dot(&p.b, z);
    let denom = 1f64.max(pobj.abs().min(dobj.abs()));
    Residuals {
        primal: norm(&rp) / 1f64.max(norm(&p.b)),
        dual: norm(&rd) / 1f64.max(norm(&p.c)),
        gap: (pobj - dobj).abs().max(dot(s, z).abs()) / denom,
    }
}
