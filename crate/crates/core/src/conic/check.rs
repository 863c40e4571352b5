use serde::{Deserialize, Serialize};

use super::cones::min_eig;
use super::svec::smat;
use super::{norm, Cone, ConicProgram};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeViolation {
    pub cone: usize,
    pub kind: String,
    /// Nonnegative distance-like violation; zero when the slack is inside.
    pub violation: f64,
    /// Smallest eigenvalue of the slack block (PSD cones only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_eig: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub per_cone: Vec<ConeViolation>,
    pub max_violation: f64,
    pub tol: f64,
    pub feasible: bool,
}

/// Measure how far `s = b - A x` is from the cone, block by block.
///
/// PSD blocks are first tested by a Cholesky factorization of `S + tol I`;
/// only if that fails is the (negated) smallest eigenvalue reported.
pub fn check_point(p: &ConicProgram, x: &[f64], tol: f64) -> Result<PointReport> {
    p.validate()?;
    if x.len() != p.num_vars() {
        return Err(Error::DimensionMismatch(format!(
            "point has {} entries, program has {} variables",
            x.len(),
            p.num_vars()
        )));
    }
    let ax = p.a.mul_vec(x);
    let s: Vec<f64> = p.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let mut per_cone = Vec::with_capacity(p.cones.len());
    for (k, (cone, r)) in p.cones.iter().zip(p.cone_ranges()).enumerate() {
        let v = &s[r];
        let (violation, me) = match *cone {
            Cone::Zero(_) => (v.iter().map(|a| a.abs()).fold(0.0, f64::max), None),
            Cone::NonNeg(_) => (v.iter().map(|a| (-a).max(0.0)).fold(0.0, f64::max), None),
            Cone::Soc(_) => ((norm(&v[1..]) - v[0]).max(0.0), None),
            Cone::Psd(n) => {
                let mut m = smat(v, n);
                for i in 0..n {
                    m[(i, i)] += tol;
                }
                if m.clone().cholesky().is_some() {
                    (0.0, None)
                } else {
                    let e = min_eig(&smat(v, n));
                    ((-e).max(0.0), Some(e))
                }
            }
        };
        per_cone.push(ConeViolation {
            cone: k,
            kind: cone.kind().to_string(),
            violation,
            min_eig: me,
        });
    }
    let max_violation = per_cone.iter().map(|c| c.violation).fold(0.0, f64::max);
    Ok(PointReport {
        per_cone,
        max_violation,
        tol,
        feasible: max_violation <= tol,
    })
}
