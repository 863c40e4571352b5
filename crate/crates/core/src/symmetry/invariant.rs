//! Unitary-invariant `k`-body operators described by their permutation
//! expectations `<sigma> = tr(T(sigma) A)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::irrep::{irrep_table, weingarten, MAX_K};
use super::perm::{factorial, schur_dimension, Partition, Perm};
use crate::error::{Error, Result};

/// Materialization cap on `d^k`.
pub const MAX_DIM: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantOperator {
    pub k: usize,
    pub d: usize,
    /// `<sigma>` indexed by `Perm::rank`. The identity entry is the trace.
    pub expect: Vec<f64>,
}

impl InvariantOperator {
    pub fn new(k: usize, d: usize, expect: Vec<f64>) -> Result<Self> {
        if k == 0 || k > MAX_K || d == 0 {
            return Err(Error::InvalidParameter(format!("unsupported (k, d) = ({k}, {d})")));
        }
        if expect.len() != factorial(k) {
            return Err(Error::DimensionMismatch(format!(
                "{} expectations for k = {k} (need {})",
                expect.len(),
                factorial(k)
            )));
        }
        Ok(Self { k, d, expect })
    }

    pub fn from_fn(k: usize, d: usize, f: impl Fn(&Perm) -> f64) -> Result<Self> {
        Self::new(k, d, Perm::all(k).iter().map(f).collect())
    }

    /// Expectations of an explicit `d^k x d^k` matrix.
    pub fn from_matrix(k: usize, d: usize, a: &DMatrix<f64>) -> Result<Self> {
        let dim = checked_dim(k, d)?;
        if a.nrows() != dim || a.ncols() != dim {
            return Err(Error::DimensionMismatch(format!("matrix is not {dim}x{dim}")));
        }
        Self::from_fn(k, d, |p| {
            let map = perm_action(p, k, d);
            // T has a one at (map[i], i), so tr(T A) = sum_i A[i, map[i]].
            (0..dim).map(|i| a[(i, map[i])]).sum()
        })
    }

    pub fn get(&self, p: &Perm) -> f64 {
        self.expect[p.rank()]
    }

    /// `<id>`, the trace of the operator.
    pub fn trace(&self) -> f64 {
        self.expect[0]
    }

    /// `<sigma> == <sigma^{-1}>` for every sigma, as for real symmetric operators.
    pub fn is_real_symmetric(&self, tol: f64) -> bool {
        Perm::all(self.k)
            .iter()
            .all(|p| (self.get(p) - self.get(&p.inverse())).abs() <= tol)
    }
}

fn checked_dim(k: usize, d: usize) -> Result<usize> {
    match d.checked_pow(k as u32) {
        Some(n) if n <= MAX_DIM => Ok(n),
        _ => Err(Error::InvalidParameter(format!(
            "d^k = {d}^{k} exceeds the materialization cap {MAX_DIM}"
        ))),
    }
}

/// `map[i]` = basis index of `T(pi) e_i`, where `T(pi)` moves the tensor
/// factor in slot `j` to slot `pi(j)`. Slot 0 is the most significant digit.
fn perm_action(p: &Perm, k: usize, d: usize) -> Vec<usize> {
    let dim = d.pow(k as u32);
    let mut digits = vec![0usize; k];
    let mut out = vec![0usize; k];
    (0..dim)
        .map(|mut idx| {
            for j in (0..k).rev() {
                digits[j] = idx % d;
                idx /= d;
            }
            for j in 0..k {
                out[p.apply(j)] = digits[j];
            }
            out.iter().fold(0, |acc, &v| acc * d + v)
        })
        .collect()
}

/// Permutation operator `T(pi)` on `(C^d)^{(x)k}`; `T(s) T(t) = T(s t)`.
pub fn permutation_matrix(p: &Perm, d: usize) -> Result<DMatrix<f64>> {
    let k = p.k();
    let dim = checked_dim(k, d)?;
    let mut m = DMatrix::zeros(dim, dim);
    for (i, j) in perm_action(p, k, d).into_iter().enumerate() {
        m[(j, i)] = 1.0;
    }
    Ok(m)
}

/// The unique operator in `span{T(sigma)}` with the given expectations:
/// `A = sum_tau a_tau T(tau)`, `a_tau = sum_sigma <sigma^{-1}> Wg(tau^{-1} sigma, d)`.
pub fn reconstruct_operator(op: &InvariantOperator) -> Result<DMatrix<f64>> {
    let (k, d) = (op.k, op.d);
    let dim = checked_dim(k, d)?;
    let all = Perm::all(k);
    let wg: Vec<f64> = all
        .iter()
        .map(|p| weingarten(&p.cycle_type(), d))
        .collect::<Result<_>>()?;
    let mut a = DMatrix::zeros(dim, dim);
    for tau in &all {
        let ti = tau.inverse();
        let coef: f64 = all
            .iter()
            .map(|s| op.get(&s.inverse()) * wg[ti.compose(s).rank()])
            .sum();
        if coef == 0.0 {
            continue;
        }
        for (i, j) in perm_action(tau, k, d).into_iter().enumerate() {
            a[(j, i)] += coef;
        }
    }
    Ok(a)
}

/// Blocks `sum_sigma <sigma^{-1}> R_lambda(sigma)` for every `lambda` of
/// height at most `d`. The operator is PSD iff every block is.
pub fn positivity_blocks(op: &InvariantOperator) -> Result<Vec<(Partition, DMatrix<f64>)>> {
    let all = Perm::all(op.k);
    Partition::all(op.k)
        .into_iter()
        .filter(|l| schur_dimension(l, op.d) > 0)
        .map(|l| {
            let table = irrep_table(&l)?;
            let f = l.num_tableaux();
            let mut b = DMatrix::zeros(f, f);
            for s in &all {
                let w = op.get(&s.inverse());
                if w != 0.0 {
                    b += &table[s.rank()] * w;
                }
            }
            Ok((l, b))
        })
        .collect()
}

pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Trace one and every positivity block PSD within `tol`.
pub fn is_state(op: &InvariantOperator, tol: f64) -> Result<bool> {
    if (op.trace() - 1.0).abs() > tol {
        return Ok(false);
    }
    Ok(positivity_blocks(op)?.iter().all(|(_, b)| min_eigenvalue(b) >= -tol))
}
