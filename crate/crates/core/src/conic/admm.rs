//! Operator-splitting fallback: ADMM on `A x + s = b, s in K`.
//!
//! Each iteration costs one solve with the cached factor of
//! `rho A'A + sigma I` plus a projection onto the cone. Accuracy beyond
//! ~1e-7 is slow to reach; the interior-point method is the default.

use nalgebra::DVector;

use super::cones::Kind;
use super::{dot, residuals, Cone, ConicProgram, ConicSolution, Method, SolveOptions, Status};

const SIGMA: f64 = 1e-6;
const CHECK_EVERY: usize = 10;
const ADAPT_EVERY: usize = 50;

pub(super) fn solve(p: &ConicProgram, opts: &SolveOptions) -> ConicSolution {
    let n = p.num_vars();
    let m = p.num_rows();
    let ad = p.a.to_dense();
    let ata = ad.transpose() * &ad;
    let ranges = p.cone_ranges();
    let project = |v: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; m];
        for (k, r) in p.cones.iter().zip(&ranges) {
            let kind = match *k {
                Cone::Zero(_) => continue,
                Cone::NonNeg(_) => Kind::NonNeg,
                Cone::Soc(_) => Kind::Soc,
                Cone::Psd(s) => Kind::Psd(s),
            };
            out[r.clone()].copy_from_slice(&kind.project(&v[r.clone()]));
        }
        out
    };
    let factor = |rho: f64| {
        let mut k = &ata * rho;
        for i in 0..n {
            k[(i, i)] += SIGMA;
        }
        k.cholesky()
    };

    let mut rho = 1.0;
    let Some(mut chol) = factor(rho) else {
        return output(p, vec![0.0; n], vec![0.0; m], vec![0.0; m], Status::NumericalLimit, 0);
    };
    let mut x = vec![0.0; n];
    let mut s = vec![0.0; m];
    let mut u = vec![0.0; m];
    for iter in 1..=opts.admm_max_iter {
        // x-update.
        let w: Vec<f64> = (0..m).map(|i| s[i] - p.b[i] + u[i]).collect();
        let mut rhs: Vec<f64> = (0..n).map(|j| SIGMA * x[j] - p.c[j]).collect();
        p.a.mul_t_acc(&w, -rho, &mut rhs);
        x = chol.solve(&DVector::from_vec(rhs)).iter().copied().collect();
        // s-update.
        let ax = p.a.mul_vec(&x);
        let v: Vec<f64> = (0..m).map(|i| p.b[i] - ax[i] - u[i]).collect();
        let s_prev = std::mem::replace(&mut s, project(&v));
        for i in 0..m {
            u[i] += ax[i] + s[i] - p.b[i];
        }

        if iter % CHECK_EVERY == 0 || iter == opts.admm_max_iter {
            let z: Vec<f64> = u.iter().map(|v| rho * v).collect();
            let res = residuals(p, &x, &s, &z);
            if opts.verbose {
                eprintln!(
                    "admm {iter:>6} obj {:>14.7e} pres {:.2e} dres {:.2e} gap {:.2e} rho {rho:.2e}",
                    p.objective(&x),
                    res.primal,
                    res.dual,
                    res.gap
                );
            }
            if res.max() <= opts.tol {
                return output(p, x, s, z, Status::Optimal, iter);
            }
            if iter % ADAPT_EVERY == 0 {
                // Balance primal and dual residuals (dual residual of ADMM is
                // rho A'(s - s_prev)).
                let ds: Vec<f64> = (0..m).map(|i| s[i] - s_prev[i]).collect();
                let mut dr = vec![0.0; n];
                p.a.mul_t_acc(&ds, rho, &mut dr);
                let pr: f64 = (0..m).map(|i| (ax[i] + s[i] - p.b[i]).powi(2)).sum::<f64>().sqrt();
                let dn = dot(&dr, &dr).sqrt();
                let new_rho = if pr > 10.0 * dn {
                    rho * 5.0
                } else if dn > 10.0 * pr {
                    rho / 5.0
                } else {
                    rho
                };
                if new_rho != rho && (1e-6..=1e6).contains(&new_rho) {
                    for v in &mut u {
                        *v *= rho / new_rho;
                    }
                    rho = new_rho;
                    match factor(rho) {
                        Some(c) => chol = c,
                        None => return output(p, x, s, z, Status::NumericalLimit, iter),
                    }
                }
            }
        }
    }
    let z: Vec<f64> = u.iter().map(|v| rho * v).collect();
    output(p, x, s, z, Status::NumericalLimit, opts.admm_max_iter)
}

fn output(p: &ConicProgram, x: Vec<f64>, s: Vec<f64>, z: Vec<f64>, status: Status, iterations: usize) -> ConicSolution {
    ConicSolution {
        status,
        objective: p.objective(&x),
        dual_objective: -dot(&p.b, &z) + p.offset,
        residuals: residuals(p, &x, &s, &z),
        x,
        s,
        z,
        iterations,
        method: Method::Admm,
    }
}
