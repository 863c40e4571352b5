//! Young's orthogonal form and character tables, memoized per partition.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_rational::Ratio;

use super::perm::{factorial, schur_dimension, Partition, Perm};
use crate::error::{Error, Result};

/// Largest `k` for which irreps are materialized.
pub const MAX_K: usize = 8;

/// Standard Young tableaux of shape `lambda`, each encoded by its row word
/// (`word[m]` = row holding entry `m`), in ascending lexicographic order.
pub fn standard_tableaux(lambda: &Partition) -> Vec<Vec<usize>> {
    fn rec(parts: &[usize], fill: &mut Vec<usize>, word: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
        if word.len() == k {
            out.push(word.clone());
            return;
        }
        for r in 0..parts.len() {
            if fill[r] < parts[r] && (r == 0 || fill[r - 1] > fill[r]) {
                fill[r] += 1;
                word.push(r);
                rec(parts, fill, word, k, out);
                word.pop();
                fill[r] -= 1;
            }
        }
    }
    let mut out = Vec::new();
    let parts = lambda.parts();
    rec(parts, &mut vec![0; parts.len()], &mut Vec::new(), lambda.size(), &mut out);
    out
}

/// Content `col - row` of every entry of a tableau given by its row word.
fn contents(word: &[usize]) -> Vec<i64> {
    let mut fill = vec![0i64; word.len()];
    word.iter()
        .map(|&r| {
            let c = fill[r] - r as i64;
            fill[r] += 1;
            c
        })
        .collect()
}

/// Matrix of the adjacent transposition `(a, a+1)`.
fn generator(tabs: &[Vec<usize>], index: &HashMap<Vec<usize>, usize>, a: usize) -> DMatrix<f64> {
    let f = tabs.len();
    let mut m = DMatrix::zeros(f, f);
    for (t, word) in tabs.iter().enumerate() {
        let c = contents(word);
        let rho = (c[a + 1] - c[a]) as f64;
        m[(t, t)] = 1.0 / rho;
        if rho.abs() != 1.0 {
            let mut other = word.clone();
            other.swap(a, a + 1);
            let u = index[&other];
            m[(u, t)] = (1.0 - 1.0 / (rho * rho)).sqrt();
        }
    }
    m
}

struct Irrep {
    /// Matrices indexed by `Perm::rank`.
    table: Vec<DMatrix<f64>>,
}

fn cache() -> &'static Mutex<HashMap<Partition, Arc<Irrep>>> {
    static C: OnceLock<Mutex<HashMap<Partition, Arc<Irrep>>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

fn irrep(lambda: &Partition) -> Result<Arc<Irrep>> {
    let k = lambda.size();
    if k > MAX_K {
        return Err(Error::InvalidParameter(format!("irreps limited to k <= {MAX_K}, got {k}")));
    }
    if let Some(r) = cache().lock().unwrap().get(lambda) {
        return Ok(r.clone());
    }
    let tabs = standard_tableaux(lambda);
    let index: HashMap<Vec<usize>, usize> = tabs.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let gens: Vec<DMatrix<f64>> = (0..k.saturating_sub(1)).map(|a| generator(&tabs, &index, a)).collect();
    let f = tabs.len();
    let table = Perm::all(k)
        .iter()
        .map(|p| {
            p.reduced_word()
                .iter()
                .fold(DMatrix::identity(f, f), |acc, &a| acc * &gens[a])
        })
        .collect();
    let r = Arc::new(Irrep { table });
    cache().lock().unwrap().insert(lambda.clone(), r.clone());
    Ok(r)
}

/// Orthogonal matrix `R_lambda(sigma)` in Young's orthogonal form.
pub fn young_orthogonal_irrep(lambda: &Partition, sigma: &Perm) -> Result<DMatrix<f64>> {
    if lambda.size() != sigma.k() {
        return Err(Error::InvalidParameter(format!(
            "partition {lambda} does not match permutation of {} points",
            sigma.k()
        )));
    }
    Ok(irrep(lambda)?.table[sigma.rank()].clone())
}

/// All of `R_lambda` indexed by `Perm::rank`.
pub fn irrep_table(lambda: &Partition) -> Result<Vec<DMatrix<f64>>> {
    Ok(irrep(lambda)?.table.clone())
}

/// Character `chi_lambda(sigma)`, an exact integer.
pub fn character(lambda: &Partition, sigma: &Perm) -> Result<i64> {
    Ok(young_orthogonal_irrep(lambda, sigma)?.trace().round() as i64)
}

fn wg_cache() -> &'static Mutex<HashMap<(Partition, usize), Ratio<i128>>> {
    static C: OnceLock<Mutex<HashMap<(Partition, usize), Ratio<i128>>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// Weingarten function as an exact rational:
/// `Wg(mu, d) = (1/k!^2) sum_{height(lambda) <= d} chi_lambda(id)^2 chi_lambda(mu) / s_{lambda,d}`.
pub fn weingarten_exact(cycle_type: &Partition, d: usize) -> Result<Ratio<i128>> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be >= 1".into()));
    }
    let key = (cycle_type.clone(), d);
    if let Some(v) = wg_cache().lock().unwrap().get(&key) {
        return Ok(*v);
    }
    let k = cycle_type.size();
    let rep = perm_of_type(cycle_type);
    let id = Perm::identity(k);
    let mut sum = Ratio::from_integer(0i128);
    for lambda in Partition::all(k) {
        let s = schur_dimension(&lambda, d);
        if s == 0 {
            continue;
        }
        let f = character(&lambda, &id)? as i128;
        let chi = character(&lambda, &rep)? as i128;
        sum += Ratio::new(f * f * chi, s as i128);
    }
    let kf = factorial(k) as i128;
    let v = sum / (kf * kf);
    wg_cache().lock().unwrap().insert(key, v);
    Ok(v)
}

pub fn weingarten(cycle_type: &Partition, d: usize) -> Result<f64> {
    let v = weingarten_exact(cycle_type, d)?;
    Ok(*v.numer() as f64 / *v.denom() as f64)
}

/// A representative permutation with the given cycle type.
pub fn perm_of_type(mu: &Partition) -> Perm {
    let k = mu.size();
    let mut img: Vec<usize> = (0..k).collect();
    let mut start = 0;
    for &len in mu.parts() {
        for a in 0..len {
            img[start + a] = start + (a + 1) % len;
        }
        start += len;
    }
    Perm::new(img).expect("cycle construction")
}
