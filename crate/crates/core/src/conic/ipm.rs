//! Homogeneous self-dual interior-point method with Nesterov-Todd scaling
//! and a Mehrotra predictor-corrector.
//!
//! Zero-cone rows are split off as equalities `A_e x = b_e`; the remaining
//! rows form `G x + s = h` over the product cone. Without equalities the
//! reduced system `G'W^{-1}W^{-T}G` is factored through a QR decomposition of
//! `W^{-T}G`; otherwise `[G'W^{-1}W^{-T}G, A_e'; A_e, 0]` is factored by LU.

use nalgebra::{DMatrix, DVector};

use super::cones::{Kind, Scaling};
use super::{dot, norm, residuals, Cone, ConicProgram, ConicSolution, Method, SolveOptions, SparseMatrix, Status};

/// Fraction of the distance to the boundary taken per step.
const STEP_FRACTION: f64 = 0.99;
/// Iterations with negligible progress before giving up.
const STALL_LIMIT: usize = 5;
/// Refinement passes on the unreduced KKT system.
const REFINE_STEPS: usize = 4;

struct Block {
    kind: Kind,
    start: usize,
    dim: usize,
    /// Columns touched by the block, with the block's dense rows over them.
    cols: Vec<usize>,
    g: DMatrix<f64>,
}

struct Data {
    n: usize,
    c: Vec<f64>,
    ae: SparseMatrix,
    be: Vec<f64>,
    g: SparseMatrix,
    h: Vec<f64>,
    blocks: Vec<Block>,
    degree: usize,
    eq_rows: Vec<usize>,
    cone_rows: Vec<usize>,
}

impl Data {
    fn new(p: &ConicProgram) -> Self {
        let mut eq_rows = Vec::new();
        let mut cone_rows = Vec::new();
        let mut blocks = Vec::new();
        let mut start = 0;
        for (k, r) in p.cones.iter().zip(p.cone_ranges()) {
            let kind = match *k {
                Cone::Zero(_) => {
                    eq_rows.extend(r);
                    continue;
                }
                Cone::NonNeg(_) => Kind::NonNeg,
                Cone::Soc(_) => Kind::Soc,
                Cone::Psd(s) => Kind::Psd(s),
            };
            let dim = r.len();
            cone_rows.extend(r);
            blocks.push(Block {
                kind,
                start,
                dim,
                cols: Vec::new(),
                g: DMatrix::zeros(0, 0),
            });
            start += dim;
        }
        let g = p.a.select_rows(&cone_rows);
        for b in blocks.iter_mut().filter(|b| b.kind != Kind::NonNeg) {
            let mut cols: Vec<usize> = (b.start..b.start + b.dim)
                .flat_map(|r| g.row(r).map(|(c, _)| c))
                .collect();
            cols.sort_unstable();
            cols.dedup();
            let mut dense = DMatrix::zeros(b.dim, cols.len());
            for r in 0..b.dim {
                for (c, v) in g.row(b.start + r) {
                    let j = cols.binary_search(&c).unwrap();
                    dense[(r, j)] = v;
                }
            }
            b.cols = cols;
            b.g = dense;
        }
        let degree = blocks.iter().map(|b| b.kind.degree(b.dim)).sum();
        Data {
            n: p.num_vars(),
            c: p.c.clone(),
            ae: p.a.select_rows(&eq_rows),
            be: eq_rows.iter().map(|&r| p.b[r]).collect(),
            h: cone_rows.iter().map(|&r| p.b[r]).collect(),
            g,
            blocks,
            degree,
            eq_rows,
            cone_rows,
        }
    }

    fn m(&self) -> usize {
        self.h.len()
    }

    fn p(&self) -> usize {
        self.be.len()
    }

    /// Apply `f(block, scaling, slice)` blockwise to a cone-space vector.
    fn map_blocks(&self, ws: &[Scaling], v: &[f64], f: impl Fn(&Scaling, &[f64]) -> Vec<f64>) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for (b, w) in self.blocks.iter().zip(ws) {
            let r = b.start..b.start + b.dim;
            out[r.clone()].copy_from_slice(&f(w, &v[r]));
        }
        out
    }

    fn map_kinds(&self, u: &[f64], v: &[f64], f: impl Fn(Kind, &[f64], &[f64]) -> Vec<f64>) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        for b in &self.blocks {
            let r = b.start..b.start + b.dim;
            out[r.clone()].copy_from_slice(&f(b.kind, &u[r.clone()], &v[r]));
        }
        out
    }

    fn identity(&self) -> Vec<f64> {
        let mut e = vec![0.0; self.m()];
        for b in &self.blocks {
            e[b.start..b.start + b.dim].copy_from_slice(&b.kind.identity(b.dim));
        }
        e
    }

    fn max_step(&self, v: &[f64], d: &[f64]) -> f64 {
        self.blocks
            .iter()
            .map(|b| {
                let r = b.start..b.start + b.dim;
                b.kind.max_step(&v[r.clone()], &d[r])
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn margin(&self, v: &[f64]) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.kind.margin(&v[b.start..b.start + b.dim]))
            .fold(f64::INFINITY, f64::min)
    }
}

enum Factor {
    /// Upper factor of a QR decomposition of the scaled `G`: `H = R'R`.
    Qr(DMatrix<f64>),
    Lu(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

struct Kkt<'a> {
    data: &'a Data,
    ws: Vec<Scaling>,
    /// `W^{-T} G`, dense.
    gt: DMatrix<f64>,
    /// Unregularized reduced matrix, used for refinement when `p > 0`.
    k: Option<DMatrix<f64>>,
    factor: Factor,
}

impl<'a> Kkt<'a> {
    fn new(data: &'a Data, ws: Vec<Scaling>) -> Option<Self> {
        let n = data.n;
        let p = data.p();
        let m = data.m();
        let mut gt = DMatrix::<f64>::zeros(m, n);
        for (b, w) in data.blocks.iter().zip(&ws) {
            match (b.kind, w) {
                (Kind::NonNeg, Scaling::NonNeg { w }) => {
                    for r in 0..b.dim {
                        for (c, v) in data.g.row(b.start + r) {
                            gt[(b.start + r, c)] = v / w[r];
                        }
                    }
                }
                _ => {
                    for (j, &c) in b.cols.iter().enumerate() {
                        let col: Vec<f64> = b.g.column(j).iter().copied().collect();
                        let t = w.apply_inv_t(&col);
                        for (r, v) in t.into_iter().enumerate() {
                            gt[(b.start + r, c)] = v;
                        }
                    }
                }
            }
        }
        let scale = gt.column_iter().map(|c| c.norm_squared()).fold(1.0, f64::max);
        let mut delta = 1e-20 * scale;
        if p == 0 {
            // QR of the stacked [W^{-T} G; sqrt(delta) I] avoids squaring the
            // condition number, which matters near degenerate optima.
            for _ in 0..6 {
                let mut stacked = DMatrix::<f64>::zeros(m + n, n);
                stacked.rows_mut(0, m).copy_from(&gt);
                for i in 0..n {
                    stacked[(m + i, i)] = delta.sqrt();
                }
                let r = stacked.qr().r();
                let dmin = r.diagonal().iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
                if dmin.is_finite() && dmin > 1e-14 * scale.sqrt() {
                    return Some(Kkt { data, ws, gt, k: None, factor: Factor::Qr(r) });
                }
                delta *= 100.0;
            }
            return None;
        }
        let h = gt.transpose() * &gt;
        let mut k = DMatrix::zeros(n + p, n + p);
        k.view_mut((0, 0), (n, n)).copy_from(&h);
        for r in 0..p {
            for (c, v) in data.ae.row(r) {
                k[(n + r, c)] = v;
                k[(c, n + r)] = v;
            }
        }
        for _ in 0..6 {
            let mut kr = k.clone();
            for i in 0..n {
                kr[(i, i)] += delta;
            }
            for i in n..n + p {
                kr[(i, i)] -= delta;
            }
            let lu = kr.lu();
            if lu.is_invertible() {
                return Some(Kkt { data, ws, gt, k: Some(k), factor: Factor::Lu(lu) });
            }
            delta *= 100.0;
        }
        None
    }

    fn raw_solve(&self, r: &DVector<f64>) -> DVector<f64> {
        match &self.factor {
            Factor::Qr(u) => {
                let y = u.tr_solve_upper_triangular(r).unwrap_or_else(|| DVector::zeros(r.len()));
                u.solve_upper_triangular(&y).unwrap_or_else(|| DVector::zeros(r.len()))
            }
            Factor::Lu(l) => l.solve(r).unwrap_or_else(|| DVector::zeros(r.len())),
        }
    }

    fn apply_k(&self, v: &DVector<f64>) -> DVector<f64> {
        match &self.k {
            Some(k) => k * v,
            None => self.gt.tr_mul(&(&self.gt * v)),
        }
    }

    /// One pass through the reduced system.
    fn solve_reduced(&self, rx: &[f64], ry: &[f64], rz: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let d = self.data;
        let n = d.n;
        let rzt = d.map_blocks(&self.ws, rz, |w, v| w.apply_inv_t(v));
        let t = d.map_blocks(&self.ws, &rzt, |w, v| w.apply_inv(v));
        let mut bx = rx.to_vec();
        d.g.mul_t_acc(&t, 1.0, &mut bx);
        let rhs = DVector::from_iterator(n + d.p(), bx.into_iter().chain(ry.iter().copied()));
        let mut sol = self.raw_solve(&rhs);
        let res = &rhs - self.apply_k(&sol);
        sol += self.raw_solve(&res);
        let dx: Vec<f64> = sol.rows(0, n).iter().copied().collect();
        let dy: Vec<f64> = sol.rows(n, d.p()).iter().copied().collect();
        let mut gdx = d.g.mul_vec(&dx);
        for (a, b) in gdx.iter_mut().zip(rz) {
            *a -= b;
        }
        let dzt = d.map_blocks(&self.ws, &gdx, |w, v| w.apply_inv_t(v));
        let dz = d.map_blocks(&self.ws, &dzt, |w, v| w.apply_inv(v));
        (dx, dy, dz)
    }

    /// Residual of the full system at `(dx, dy, dz)`.
    fn full_residual(&self, rhs: [&[f64]; 3], dx: &[f64], dy: &[f64], dz: &[f64]) -> [Vec<f64>; 3] {
        let d = self.data;
        let mut ex = rhs[0].to_vec();
        d.ae.mul_t_acc(dy, -1.0, &mut ex);
        d.g.mul_t_acc(dz, -1.0, &mut ex);
        let mut ey = rhs[1].to_vec();
        for (a, b) in ey.iter_mut().zip(d.ae.mul_vec(dx)) {
            *a -= b;
        }
        let wdz = d.map_blocks(&self.ws, dz, |w, v| w.apply(v));
        let wtwdz = d.map_blocks(&self.ws, &wdz, |w, v| w.apply_t(v));
        let gdx = d.g.mul_vec(dx);
        let ez = (0..d.m()).map(|i| rhs[2][i] - gdx[i] + wtwdz[i]).collect();
        [ex, ey, ez]
    }

    /// Solve `[0 A_e' G'; A_e 0 0; G 0 -W'W] (dx, dy, dz) = (rx, ry, rz)`,
    /// refined on the unreduced system. Returns `(dx, dy, dz, W dz)`.
    fn solve(&self, rx: &[f64], ry: &[f64], rz: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let d = self.data;
        let (mut dx, mut dy, mut dz) = self.solve_reduced(rx, ry, rz);
        // The z rows are measured in the scaled space, where they are O(1).
        let size = |e: &[Vec<f64>; 3]| {
            let zt = d.map_blocks(&self.ws, &e[2], |w, v| w.apply_inv_t(v));
            (norm(&e[0]).powi(2) + norm(&e[1]).powi(2) + norm(&zt).powi(2)).sqrt()
        };
        let mut err = self.full_residual([rx, ry, rz], &dx, &dy, &dz);
        let mut err_norm = size(&err);
        let floor = 1e-15 * (1.0 + size(&[rx.to_vec(), ry.to_vec(), rz.to_vec()]));
        for _ in 0..REFINE_STEPS {
            if err_norm <= floor {
                break;
            }
            let (cx, cy, cz) = self.solve_reduced(&err[0], &err[1], &err[2]);
            let add = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(u, v)| u + v).collect() };
            let (nx, ny, nz) = (add(&dx, &cx), add(&dy, &cy), add(&dz, &cz));
            let next = self.full_residual([rx, ry, rz], &nx, &ny, &nz);
            let next_norm = size(&next);
            if next_norm >= err_norm {
                break;
            }
            (dx, dy, dz, err, err_norm) = (nx, ny, nz, next, next_norm);
        }
        let dzt = d.map_blocks(&self.ws, &dz, |w, v| w.apply(v));
        (dx, dy, dz, dzt)
    }
}

struct Iterate {
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
    s: Vec<f64>,
    tau: f64,
    kappa: f64,
}

pub(super) fn solve(p: &ConicProgram, opts: &SolveOptions) -> ConicSolution {
    let d = Data::new(p);
    let log = |msg: String| {
        if opts.verbose {
            eprintln!("{msg}");
        }
    };
    let Some(mut it) = initial_point(&d) else {
        return finish(p, &d, None, Status::NumericalLimit, 0);
    };
    let tol = opts.tol;
    let norm_c = 1f64.max(norm(&d.c));
    let norm_bh = 1f64.max((norm(&d.be).powi(2) + norm(&d.h).powi(2)).sqrt());
    let e = d.identity();
    let mut stalls = 0;
    log(format!("{:>4} {:>14} {:>14} {:>9} {:>9} {:>9} {:>9}", "it", "pcost", "dcost", "pres", "dres", "gap", "step"));
    for iter in 0..=opts.max_iter {
        // Residuals of the homogeneous embedding.
        let mut rx: Vec<f64> = d.c.iter().map(|v| v * it.tau).collect();
        d.ae.mul_t_acc(&it.y, 1.0, &mut rx);
        d.g.mul_t_acc(&it.z, 1.0, &mut rx);
        let mut ry = d.ae.mul_vec(&it.x);
        for (a, b) in ry.iter_mut().zip(&d.be) {
            *a -= b * it.tau;
        }
        let mut rz = d.g.mul_vec(&it.x);
        for i in 0..d.m() {
            rz[i] += it.s[i] - d.h[i] * it.tau;
        }
        let cx = dot(&d.c, &it.x);
        let by_hz = dot(&d.be, &it.y) + dot(&d.h, &it.z);
        let rt = it.kappa + cx + by_hz;
        let sz = dot(&it.s, &it.z);
        let mu = (sz + it.tau * it.kappa) / (d.degree as f64 + 1.0);

        let pcost = cx / it.tau;
        let dcost = -by_hz / it.tau;
        let pres = (norm(&ry).powi(2) + norm(&rz).powi(2)).sqrt() / it.tau / norm_bh;
        let dres = norm(&rx) / it.tau / norm_c;
        let gap = (pcost - dcost).abs().max(sz / (it.tau * it.tau)) / 1f64.max(pcost.abs().min(dcost.abs()));
        if pres <= tol && dres <= tol && gap <= tol {
            return finish(p, &d, Some(&it), Status::Optimal, iter);
        }
        // Infeasibility certificates: the iterate is an almost-ray when the
        // residual relative to the certificate's objective is below tol.
        if by_hz < 0.0 {
            let mut atz = vec![0.0; d.n];
            d.ae.mul_t_acc(&it.y, 1.0, &mut atz);
            d.g.mul_t_acc(&it.z, 1.0, &mut atz);
            if norm(&atz) / norm_c / -by_hz <= tol {
                return finish_certificate(p, &d, &it, Status::PrimalInfeasible, iter, -by_hz);
            }
        }
        if cx < 0.0 {
            let ax = d.ae.mul_vec(&it.x);
            let mut gxs = d.g.mul_vec(&it.x);
            for (a, b) in gxs.iter_mut().zip(&it.s) {
                *a += b;
            }
            let r = (norm(&ax).powi(2) + norm(&gxs).powi(2)).sqrt() / norm_bh;
            if r / -cx <= tol {
                return finish_certificate(p, &d, &it, Status::DualInfeasible, iter, -cx);
            }
        }
        if iter == opts.max_iter {
            break;
        }

        let mut ws = Vec::with_capacity(d.blocks.len());
        let mut lambda = vec![0.0; d.m()];
        for b in &d.blocks {
            let r = b.start..b.start + b.dim;
            let Some((w, l)) = Scaling::compute(b.kind, &it.s[r.clone()], &it.z[r.clone()]) else {
                log(format!("iterate left the cone at iteration {iter}"));
                return finish(p, &d, Some(&it), Status::NumericalLimit, iter);
            };
            ws.push(w);
            lambda[r].copy_from_slice(&l);
        }
        let Some(kkt) = Kkt::new(&d, ws) else {
            log(format!("KKT factorization failed at iteration {iter}"));
            return finish(p, &d, Some(&it), Status::NumericalLimit, iter);
        };
        let neg_c: Vec<f64> = d.c.iter().map(|v| -v).collect();
        let (x1, y1, z1, zt1) = kkt.solve(&neg_c, &d.be, &d.h);
        let q1 = dot(&d.c, &x1) + dot(&d.be, &y1) + dot(&d.h, &z1);
        let lsq = d.map_kinds(&lambda, &lambda, |k, a, b| k.jordan(a, b));

        let direction = |sigma: f64, rs: &[f64], rtk: f64| {
            let f = 1.0 - sigma;
            let bx: Vec<f64> = rx.iter().map(|v| -f * v).collect();
            let by: Vec<f64> = ry.iter().map(|v| -f * v).collect();
            let ldiv = d.map_kinds(&lambda, rs, |k, l, r| k.jordan_div(l, r));
            let wt = d.map_blocks(&kkt.ws, &ldiv, |w, v| w.apply_t(v));
            let bz: Vec<f64> = (0..d.m()).map(|i| -f * rz[i] - wt[i]).collect();
            let (x2, y2, z2, zt2) = kkt.solve(&bx, &by, &bz);
            let q2 = dot(&d.c, &x2) + dot(&d.be, &y2) + dot(&d.h, &z2);
            let dtau = (rtk + it.tau * (f * rt + q2)) / (it.kappa - it.tau * q1);
            let axpy = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(u, v)| u + dtau * v).collect() };
            let dx = axpy(&x2, &x1);
            let dy = axpy(&y2, &y1);
            let dz = axpy(&z2, &z1);
            let dzt = axpy(&zt2, &zt1);
            // ds from the linearized primal rows rather than W'(ldiv - dzt),
            // which cancels badly once the scaling is extreme.
            let gdx = d.g.mul_vec(&dx);
            let ds: Vec<f64> = (0..d.m()).map(|i| -f * rz[i] - gdx[i] + d.h[i] * dtau).collect();
            let dst = d.map_blocks(&kkt.ws, &ds, |w, v| w.apply_inv_t(v));
            let dkappa = (rtk - it.kappa * dtau) / it.tau;
            Step { dx, dy, dz, dzt, ds, dst, dtau, dkappa }
        };
        let max_alpha = |st: &Step| {
            let mut a = d.max_step(&lambda, &st.dst).min(d.max_step(&lambda, &st.dzt));
            if st.dtau < 0.0 {
                a = a.min(it.tau / -st.dtau);
            }
            if st.dkappa < 0.0 {
                a = a.min(it.kappa / -st.dkappa);
            }
            a
        };

        // Predictor.
        let rs_aff: Vec<f64> = lsq.iter().map(|v| -v).collect();
        let aff = direction(0.0, &rs_aff, -it.tau * it.kappa);
        let alpha_aff = max_alpha(&aff).min(1.0);
        let sigma = (1.0 - alpha_aff).max(0.0).powi(3);

        // Corrector.
        let cross = d.map_kinds(&aff.dst, &aff.dzt, |k, a, b| k.jordan(a, b));
        let rs: Vec<f64> = (0..d.m()).map(|i| -lsq[i] - cross[i] + sigma * mu * e[i]).collect();
        let rtk = -it.tau * it.kappa - aff.dtau * aff.dkappa + sigma * mu;
        let st = direction(sigma, &rs, rtk);
        let alpha = (STEP_FRACTION * max_alpha(&st)).min(1.0);

        log(format!(
            "{iter:>4} {pcost:>14.7e} {dcost:>14.7e} {pres:>9.2e} {dres:>9.2e} {gap:>9.2e} {alpha:>9.2e}"
        ));
        if !(alpha > 1e-10) || !st.dtau.is_finite() {
            stalls += 1;
            if stalls >= STALL_LIMIT || !st.dtau.is_finite() {
                return finish(p, &d, Some(&it), Status::NumericalLimit, iter);
            }
        } else {
            stalls = 0;
        }
        let ds = &st.ds;
        let upd = |v: &mut Vec<f64>, dv: &[f64]| {
            for (a, b) in v.iter_mut().zip(dv) {
                *a += alpha * b;
            }
        };
        upd(&mut it.x, &st.dx);
        upd(&mut it.y, &st.dy);
        upd(&mut it.z, &st.dz);
        upd(&mut it.s, ds);
        it.tau += alpha * st.dtau;
        it.kappa += alpha * st.dkappa;
    }
    finish(p, &d, Some(&it), Status::NumericalLimit, opts.max_iter)
}

struct Step {
    dx: Vec<f64>,
    dy: Vec<f64>,
    dz: Vec<f64>,
    dzt: Vec<f64>,
    ds: Vec<f64>,
    dst: Vec<f64>,
    dtau: f64,
    dkappa: f64,
}

/// Least-squares primal and minimum-norm dual starting points, shifted into
/// the cone interior.
fn initial_point(d: &Data) -> Option<Iterate> {
    let ws: Vec<Scaling> = d.blocks.iter().map(|b| Scaling::identity(b.kind, b.dim)).collect();
    let kkt = Kkt::new(d, ws)?;
    let zeros_n = vec![0.0; d.n];
    let zeros_p = vec![0.0; d.p()];
    let zeros_m = vec![0.0; d.m()];
    let (x, _, dz, _) = kkt.solve(&zeros_n, &d.be, &d.h);
    let mut s: Vec<f64> = dz.iter().map(|v| -v).collect();
    let neg_c: Vec<f64> = d.c.iter().map(|v| -v).collect();
    let (_, y, mut z, _) = kkt.solve(&neg_c, &zeros_p, &zeros_m);
    let e = d.identity();
    for v in [&mut s, &mut z] {
        let shift = -d.margin(v);
        if shift >= -1e-8 * 1f64.max(norm(v)) {
            for (a, b) in v.iter_mut().zip(&e) {
                *a += (1.0 + shift) * b;
            }
        }
    }
    let ok = [&x, &y, &z, &s].iter().all(|v| v.iter().all(|a| a.is_finite()));
    ok.then_some(Iterate { x, y, z, s, tau: 1.0, kappa: 1.0 })
}

/// Scatter internal (equality, cone) ordering back to the program's rows.
fn scatter(d: &Data, eq: &[f64], cone: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; d.eq_rows.len() + d.cone_rows.len()];
    for (&r, &v) in d.eq_rows.iter().zip(eq) {
        out[r] = v;
    }
    for (&r, &v) in d.cone_rows.iter().zip(cone) {
        out[r] = v;
    }
    out
}

fn finish(p: &ConicProgram, d: &Data, it: Option<&Iterate>, status: Status, iterations: usize) -> ConicSolution {
    let (x, s, z) = match it {
        Some(it) => {
            let t = it.tau;
            let sc = |v: &[f64]| v.iter().map(|a| a / t).collect::<Vec<f64>>();
            let zeros = vec![0.0; d.p()];
            (sc(&it.x), scatter(d, &zeros, &sc(&it.s)), scatter(d, &sc(&it.y), &sc(&it.z)))
        }
        None => (vec![0.0; d.n], vec![0.0; p.num_rows()], vec![0.0; p.num_rows()]),
    };
    let res = residuals(p, &x, &s, &z);
    ConicSolution {
        status,
        objective: p.objective(&x),
        dual_objective: -dot(&p.b, &z) + p.offset,
        residuals: res,
        x,
        s,
        z,
        iterations,
        method: Method::Ipm,
    }
}

fn finish_certificate(
    p: &ConicProgram,
    d: &Data,
    it: &Iterate,
    status: Status,
    iterations: usize,
    scale: f64,
) -> ConicSolution {
    let sc = |v: &[f64]| v.iter().map(|a| a / scale).collect::<Vec<f64>>();
    let zeros_p = vec![0.0; d.p()];
    let zeros_m = vec![0.0; d.m()];
    let (x, s, z) = match status {
        Status::PrimalInfeasible => (vec![0.0; d.n], vec![0.0; p.num_rows()], scatter(d, &sc(&it.y), &sc(&it.z))),
        _ => (sc(&it.x), scatter(d, &zeros_p, &sc(&it.s)), scatter(d, &zeros_p, &zeros_m)),
    };
    ConicSolution {
        status,
        objective: if status == Status::DualInfeasible { f64::NEG_INFINITY } else { f64::INFINITY },
        dual_objective: if status == Status::DualInfeasible { f64::NEG_INFINITY } else { f64::INFINITY },
        residuals: residuals(p, &x, &s, &z),
        x,
        s,
        z,
        iterations,
        method: Method::Ipm,
    }
}
