//! Per-cone algebra: Jordan products, Nesterov-Todd scalings, step lengths
//! and projections. All functions act on the slice of a single block.

use nalgebra::{DMatrix, SymmetricEigen};

use super::svec::{smat, svec, svec_index, svec_len};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Kind {
    NonNeg,
    Soc,
    Psd(usize),
}

impl Kind {
    pub fn degree(self, dim: usize) -> usize {
        match self {
            Kind::NonNeg => dim,
            Kind::Soc => 1,
            Kind::Psd(s) => s,
        }
    }

    pub fn identity(self, dim: usize) -> Vec<f64> {
        match self {
            Kind::NonNeg => vec![1.0; dim],
            Kind::Soc => {
                let mut e = vec![0.0; dim];
                e[0] = 1.0;
                e
            }
            Kind::Psd(s) => {
                let mut e = vec![0.0; dim];
                for i in 0..s {
                    e[svec_index(i, i)] = 1.0;
                }
                e
            }
        }
    }

    /// Smallest "eigenvalue" of `v` relative to the identity: `v + t e` is
    /// interior iff `t > -margin(v)`.
    pub fn margin(self, v: &[f64]) -> f64 {
        match self {
            Kind::NonNeg => v.iter().copied().fold(f64::INFINITY, f64::min),
            Kind::Soc => v[0] - norm(&v[1..]),
            Kind::Psd(s) => min_eig(&smat(v, s)),
        }
    }

    /// Jordan product `u o v`.
    pub fn jordan(self, u: &[f64], v: &[f64]) -> Vec<f64> {
        match self {
            Kind::NonNeg => u.iter().zip(v).map(|(a, b)| a * b).collect(),
            Kind::Soc => {
                let mut w = Vec::with_capacity(u.len());
                w.push(dot(u, v));
                for k in 1..u.len() {
                    w.push(u[0] * v[k] + v[0] * u[k]);
                }
                w
            }
            Kind::Psd(s) => {
                let (a, b) = (smat(u, s), smat(v, s));
                let p = &a * &b;
                svec(&((&p + p.transpose()) * 0.5))
            }
        }
    }

    /// Solve `lambda o x = r` for `x`. For PSD blocks `lambda` must be diagonal.
    pub fn jordan_div(self, lambda: &[f64], r: &[f64]) -> Vec<f64> {
        match self {
            Kind::NonNeg => r.iter().zip(lambda).map(|(a, b)| a / b).collect(),
            Kind::Soc => {
                let l0 = lambda[0];
                let det = l0 * l0 - dot(&lambda[1..], &lambda[1..]);
                let x0 = (l0 * r[0] - dot(&lambda[1..], &r[1..])) / det;
                let mut x = Vec::with_capacity(r.len());
                x.push(x0);
                for k in 1..r.len() {
                    x.push((r[k] - x0 * lambda[k]) / l0);
                }
                x
            }
            Kind::Psd(s) => {
                let d: Vec<f64> = (0..s).map(|i| lambda[svec_index(i, i)]).collect();
                let mut x = vec![0.0; r.len()];
                for j in 0..s {
                    for i in 0..=j {
                        let k = svec_index(i, j);
                        x[k] = 2.0 * r[k] / (d[i] + d[j]);
                    }
                }
                x
            }
        }
    }

    /// Largest `alpha` with `v + alpha d` in the cone, for interior `v`.
    /// Returns infinity when the ray never leaves.
    pub fn max_step(self, v: &[f64], d: &[f64]) -> f64 {
        match self {
            Kind::NonNeg => v
                .iter()
                .zip(d)
                .filter(|(_, &di)| di < 0.0)
                .map(|(&vi, &di)| -vi / di)
                .fold(f64::INFINITY, f64::min),
            Kind::Soc => soc_max_step(v, d),
            Kind::Psd(s) => psd_max_step(&smat(v, s), &smat(d, s)),
        }
    }

    /// Euclidean projection onto the cone.
    pub fn project(self, v: &[f64]) -> Vec<f64> {
        match self {
            Kind::NonNeg => v.iter().map(|x| x.max(0.0)).collect(),
            Kind::Soc => {
                let t = v[0];
                let nx = norm(&v[1..]);
                if nx <= t {
                    v.to_vec()
                } else if nx <= -t {
                    vec![0.0; v.len()]
                } else {
                    let a = 0.5 * (t + nx);
                    let mut w = Vec::with_capacity(v.len());
                    w.push(a);
                    w.extend(v[1..].iter().map(|x| a * x / nx));
                    w
                }
            }
            Kind::Psd(s) => {
                let e = SymmetricEigen::new(smat(v, s));
                let d = DMatrix::from_diagonal(&e.eigenvalues.map(|l| l.max(0.0)));
                svec(&(&e.eigenvectors * d * e.eigenvectors.transpose()))
            }
        }
    }
}

/// Nesterov-Todd scaling `W` with `W z = W^{-T} s = lambda`.
#[derive(Debug, Clone)]
pub(crate) enum Scaling {
    NonNeg { w: Vec<f64> },
    Soc { eta: f64, wbar: Vec<f64> },
    Psd { s: usize, r: DMatrix<f64>, rinv: DMatrix<f64> },
}

impl Scaling {
    pub fn identity(kind: Kind, dim: usize) -> Self {
        match kind {
            Kind::NonNeg => Scaling::NonNeg { w: vec![1.0; dim] },
            Kind::Soc => Scaling::Soc {
                eta: 1.0,
                wbar: Kind::Soc.identity(dim),
            },
            Kind::Psd(s) => Scaling::Psd {
                s,
                r: DMatrix::identity(s, s),
                rinv: DMatrix::identity(s, s),
            },
        }
    }

    /// Scaling for interior `s`, `z`, together with `lambda`. `None` if
    /// either point has left the interior.
    pub fn compute(kind: Kind, s: &[f64], z: &[f64]) -> Option<(Self, Vec<f64>)> {
        match kind {
            Kind::NonNeg => {
                if s.iter().chain(z).any(|&v| !(v > 0.0)) {
                    return None;
                }
                let w = s.iter().zip(z).map(|(a, b)| (a / b).sqrt()).collect();
                let lambda = s.iter().zip(z).map(|(a, b)| (a * b).sqrt()).collect();
                Some((Scaling::NonNeg { w }, lambda))
            }
            Kind::Soc => {
                let ds = soc_det(s);
                let dz = soc_det(z);
                if !(ds > 0.0 && dz > 0.0 && s[0] > 0.0 && z[0] > 0.0) {
                    return None;
                }
                let (rs, rz) = (ds.sqrt(), dz.sqrt());
                let sb: Vec<f64> = s.iter().map(|v| v / rs).collect();
                let zb: Vec<f64> = z.iter().map(|v| v / rz).collect();
                let gamma = ((1.0 + dot(&sb, &zb)) / 2.0).sqrt();
                let mut wbar: Vec<f64> = sb.iter().zip(&zb).map(|(a, b)| (a - b) / (2.0 * gamma)).collect();
                wbar[0] = (sb[0] + zb[0]) / (2.0 * gamma);
                let sc = Scaling::Soc {
                    eta: (ds / dz).powf(0.25),
                    wbar,
                };
                let lambda = sc.apply(z);
                Some((sc, lambda))
            }
            Kind::Psd(n) => {
                let l1 = smat(s, n).cholesky()?.unpack();
                let l2 = smat(z, n).cholesky()?.unpack();
                let svd = (l2.transpose() * &l1).svd(true, true);
                let (u, vt) = (svd.u?, svd.v_t?);
                let sv = svd.singular_values;
                if sv.iter().any(|&x| !(x > 0.0)) {
                    return None;
                }
                let isq = DMatrix::from_diagonal(&sv.map(|x| 1.0 / x.sqrt()));
                let r = l1 * vt.transpose() * &isq;
                let rinv = isq * u.transpose() * l2.transpose();
                let mut lambda = vec![0.0; svec_len(n)];
                for i in 0..n {
                    lambda[svec_index(i, i)] = sv[i];
                }
                Some((Scaling::Psd { s: n, r, rinv }, lambda))
            }
        }
    }

    /// `W v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        match self {
            Scaling::NonNeg { w } => v.iter().zip(w).map(|(a, b)| a * b).collect(),
            Scaling::Soc { eta, wbar } => soc_apply(*eta, wbar, v, false),
            Scaling::Psd { s, r, .. } => congruence_t(r, v, *s),
        }
    }

    /// `W^{-1} v`.
    pub fn apply_inv(&self, v: &[f64]) -> Vec<f64> {
        match self {
            Scaling::NonNeg { w } => v.iter().zip(w).map(|(a, b)| a / b).collect(),
            Scaling::Soc { eta, wbar } => soc_apply(1.0 / eta, wbar, v, true),
            Scaling::Psd { s, rinv, .. } => congruence_t(rinv, v, *s),
        }
    }

    /// `W^T v`.
    pub fn apply_t(&self, v: &[f64]) -> Vec<f64> {
        match self {
            Scaling::Psd { s, r, .. } => congruence(r, v, *s),
            _ => self.apply(v),
        }
    }

    /// `W^{-T} v`.
    pub fn apply_inv_t(&self, v: &[f64]) -> Vec<f64> {
        match self {
            Scaling::Psd { s, rinv, .. } => congruence(rinv, v, *s),
            _ => self.apply_inv(v),
        }
    }
}

fn soc_apply(eta: f64, w: &[f64], v: &[f64], inverse: bool) -> Vec<f64> {
    let sign = if inverse { -1.0 } else { 1.0 };
    let w1v1 = dot(&w[1..], &v[1..]);
    let mut out = Vec::with_capacity(v.len());
    out.push(eta * (w[0] * v[0] + sign * w1v1));
    let coef = sign * v[0] + w1v1 / (1.0 + w[0]);
    for k in 1..v.len() {
        out.push(eta * (v[k] + coef * w[k]));
    }
    out
}

/// `svec(R X R^T)`.
fn congruence(r: &DMatrix<f64>, v: &[f64], s: usize) -> Vec<f64> {
    let x = smat(v, s);
    svec(&(r * x * r.transpose()))
}

/// `svec(R^T X R)`.
fn congruence_t(r: &DMatrix<f64>, v: &[f64], s: usize) -> Vec<f64> {
    let x = smat(v, s);
    svec(&(r.transpose() * x * r))
}

pub(crate) fn soc_det(v: &[f64]) -> f64 {
    let n = norm(&v[1..]);
    (v[0] - n) * (v[0] + n)
}

fn soc_max_step(v: &[f64], d: &[f64]) -> f64 {
    // det(v + a d) = qa a^2 + 2 qb a + qc with qc > 0.
    let qa = d[0] * d[0] - dot(&d[1..], &d[1..]);
    let qb = v[0] * d[0] - dot(&v[1..], &d[1..]);
    let qc = soc_det(v);
    let mut best = f64::INFINITY;
    let mut consider = |a: f64| {
        if a > 0.0 && a < best {
            best = a;
        }
    };
    let scale = qa.abs().max(qb.abs()).max(qc.abs());
    if qa.abs() <= 1e-15 * scale {
        if qb < 0.0 {
            consider(-qc / (2.0 * qb));
        }
    } else {
        let disc = qb * qb - qa * qc;
        if disc >= 0.0 {
            let q = -(qb + qb.signum() * disc.sqrt());
            if q != 0.0 {
                consider(q / qa);
                consider(qc / q);
            }
        }
    }
    // The head must stay positive even where the determinant is.
    if d[0] < 0.0 {
        consider(v[0] / -d[0]);
    }
    best
}

fn psd_max_step(v: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    let Some(ch) = v.clone().cholesky() else {
        return 0.0;
    };
    let l = ch.l();
    let Some(linv) = l.clone().try_inverse() else {
        return 0.0;
    };
    let m = &linv * d * linv.transpose();
    let lmin = min_eig(&((&m + m.transpose()) * 0.5));
    if lmin >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lmin
    }
}

pub(crate) fn min_eig(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
    }

    fn psd_point(s: usize, seed: u64) -> Vec<f64> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let b = DMatrix::from_fn(s, s, |_, _| rng.random::<f64>() - 0.5);
        svec(&(&b * b.transpose() + DMatrix::identity(s, s) * 0.3))
    }

    fn check_scaling(kind: Kind, s: &[f64], z: &[f64]) {
        let (w, lambda) = Scaling::compute(kind, s, z).expect("interior");
        assert!(close(&w.apply(z), &lambda, 1e-10), "W z");
        assert!(close(&w.apply_inv_t(s), &lambda, 1e-10), "W^-T s");
        assert!(close(&w.apply_inv(&w.apply(z)), z, 1e-10), "inverse");
        // Adjoint: <W u, v> = <u, W^T v>.
        let u: Vec<f64> = (0..s.len()).map(|k| (k as f64 * 0.7).sin()).collect();
        let v: Vec<f64> = (0..s.len()).map(|k| (k as f64 * 1.3).cos()).collect();
        assert!((dot(&w.apply(&u), &v) - dot(&u, &w.apply_t(&v))).abs() < 1e-10);
        assert!((dot(&w.apply_inv(&u), &v) - dot(&u, &w.apply_inv_t(&v))).abs() < 1e-10);
    }

    #[test]
    fn nt_scaling_identities() {
        check_scaling(Kind::NonNeg, &[1.0, 2.0, 0.5], &[3.0, 0.1, 4.0]);
        check_scaling(Kind::Soc, &[3.0, 1.0, -2.0, 0.5], &[2.0, -0.3, 0.4, 1.5]);
        check_scaling(Kind::Psd(3), &psd_point(3, 1), &psd_point(3, 2));
        check_scaling(Kind::Psd(5), &psd_point(5, 3), &psd_point(5, 4));
    }

    #[test]
    fn jordan_div_inverts_product() {
        let l = [2.0, 0.5, -0.7];
        let x = [0.3, -1.0, 2.0];
        let r = Kind::Soc.jordan(&l, &x);
        assert!(close(&Kind::Soc.jordan_div(&l, &r), &x, 1e-12));
        let mut lam = vec![0.0; 6];
        lam[0] = 1.0;
        lam[2] = 2.5;
        lam[5] = 0.4;
        let x = psd_point(3, 9);
        let r = Kind::Psd(3).jordan(&lam, &x);
        assert!(close(&Kind::Psd(3).jordan_div(&lam, &r), &x, 1e-12));
    }

    #[test]
    fn step_lengths_hit_boundary() {
        let v = [2.0, 0.0, 0.0];
        let d = [-1.0, 1.0, 0.0];
        let a = Kind::Soc.max_step(&v, &d);
        // (2 - a)^2 = a^2  =>  a = 1
        assert!((a - 1.0).abs() < 1e-12);
        let a = Kind::Psd(2).max_step(&[1.0, 0.0, 1.0], &[-1.0, 0.0, -0.5]);
        assert!((a - 1.0).abs() < 1e-12);
        assert_eq!(Kind::NonNeg.max_step(&[1.0], &[1.0]), f64::INFINITY);
    }

    #[test]
    fn projections() {
        assert_eq!(Kind::Soc.project(&[0.0, 3.0, 4.0]), vec![2.5, 1.5, 2.0]);
        assert_eq!(Kind::Soc.project(&[-5.0, 3.0, 4.0]), vec![0.0, 0.0, 0.0]);
        let p = Kind::Psd(2).project(&[1.0, 0.0, -1.0]);
        assert!(close(&p, &[1.0, 0.0, 0.0], 1e-12));
    }
}
