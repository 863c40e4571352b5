//! Studies built on the relaxations: the approximation-ratio LP, random-graph
//! ratio tables, Shastry-Sutherland sweeps and heatmap data.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::conic::{self, Cone, ConicProgram, SolveOptions, SparseMatrix};
use crate::error::{Error, Result};
use crate::exact::{ground_energy, EdOptions};
use crate::graph::{apply_disorder, gen_erdos_renyi, gen_shastry_sutherland, Graph, ScalingConvention};
use crate::model::{convert_energy, solve_relaxation, ModelOptions, Relaxation, RelaxSolution};
use crate::rounding::{rounding_function, t_prime};

/// Lower bound on the rounding function used for matched-edge mass.
pub const F_LOWER_BOUND: f64 = 0.498;

/// Coefficient of the neighbour-of-matching mass in the second LP row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TCoefficient {
    /// `1 / (4 t')`: value 1/4 against relaxed weight at most `t'`.
    #[default]
    Tight,
    /// A flat `1/4`.
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioLp {
    pub t: f64,
    pub t_prime: f64,
    pub f_t: f64,
    pub f_tprime: f64,
    pub t_coefficient: TCoefficient,
    /// Edge-mass fractions on matched, neighbouring and remaining edges.
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub r: f64,
}

pub fn approx_ratio_lp(t: f64) -> Result<RatioLp> {
    approx_ratio_lp_with(t, TCoefficient::Tight)
}

/// `r = min_{a+b+g=1, >=0} max{0.498 a + F(t') b + F(t) g, a + c b + F(t) g}`.
pub fn approx_ratio_lp_with(t: f64, coef: TCoefficient) -> Result<RatioLp> {
    if !(0.75..=1.0).contains(&t) {
        return Err(Error::Domain(format!("ratio LP needs 3/4 <= t <= 1, got {t}")));
    }
    let tp = t_prime(t)?;
    let f_t = rounding_function(t)?;
    let f_tp = rounding_function(tp)?;
    let c = match coef {
        TCoefficient::Tight => 1.0 / (4.0 * tp),
        TCoefficient::Flat => 0.25,
    };
    // Variables (alpha, beta, gamma, s); minimize s.
    let rows = [
        (vec![(0, 1.0), (1, 1.0), (2, 1.0)], 1.0),
        (vec![(0, -1.0)], 0.0),
        (vec![(1, -1.0)], 0.0),
        (vec![(2, -1.0)], 0.0),
        (vec![(0, F_LOWER_BOUND), (1, f_tp), (2, f_t), (3, -1.0)], 0.0),
        (vec![(0, 1.0), (1, c), (2, f_t), (3, -1.0)], 0.0),
    ];
    let trip = rows
        .iter()
        .enumerate()
        .flat_map(|(r, (coefs, _))| coefs.iter().map(move |&(v, a)| (r, v, a)));
    let p = ConicProgram {
        c: vec![0.0, 0.0, 0.0, 1.0],
        offset: 0.0,
        a: SparseMatrix::from_triplets(rows.len(), 4, trip)?,
        b: rows.iter().map(|r| r.1).collect(),
        cones: vec![Cone::Zero(1), Cone::NonNeg(5)],
    };
    let sol = conic::solve(&p, &SolveOptions::default().with_tol(1e-10))?;
    if !sol.is_optimal() {
        return Err(Error::Numerical(format!("ratio LP ended with {}", sol.status)));
    }
    Ok(RatioLp {
        t,
        t_prime: tp,
        f_t,
        f_tprime: f_tp,
        t_coefficient: coef,
        alpha: sol.x[0],
        beta: sol.x[1],
        gamma: sol.x[2],
        r: sol.objective,
    })
}

/// Relaxation / exact ratios on random graphs (VarBench, both negative).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErStudy {
    pub n: usize,
    pub p: f64,
    pub relaxation: Relaxation,
    pub seed: u64,
    /// Generator seeds actually used; empty graphs are skipped.
    pub seeds: Vec<u64>,
    pub relaxed: Vec<f64>,
    pub exact: Vec<f64>,
    pub ratios: Vec<f64>,
    pub mean: f64,
    pub std_err: f64,
}

pub fn run_er_study(
    n: usize,
    p: f64,
    instances: usize,
    relaxation: Relaxation,
    seed: u64,
    opts: &SolveOptions,
) -> Result<ErStudy> {
    if n > 20 {
        return Err(Error::InvalidParameter(format!("ratio studies need exact energies; n = {n} exceeds 20")));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("p must be in (0, 1], got {p}")));
    }
    if instances == 0 {
        return Err(Error::InvalidParameter("at least one instance is required".into()));
    }
    let mut graphs = Vec::with_capacity(instances);
    let mut s = seed;
    let mut redraws = 0;
    while graphs.len() < instances {
        let g = gen_erdos_renyi(n, p, s)?;
        if g.num_edges() > 0 {
            graphs.push((s, g));
        } else {
            redraws += 1;
            if redraws > 100 * instances {
                return Err(Error::InvalidParameter(format!("G({n}, {p}) keeps producing empty graphs")));
            }
        }
        s = s.wrapping_add(1);
    }
    let model = ModelOptions::new(relaxation);
    let pairs = graphs
        .par_iter()
        .map(|(_, g)| {
            let relax = solve_relaxation(g, &model, opts)?.objective.varbench;
            let ed = ground_energy(g, ScalingConvention::VarBench, &EdOptions::default())?;
            Ok((relax, ed))
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = pairs.iter().map(|(r, e)| r / e).collect();
    let (mean, std_err) = mean_and_se(&ratios);
    Ok(ErStudy {
        n,
        p,
        relaxation,
        seed,
        seeds: graphs.iter().map(|(s, _)| *s).collect(),
        relaxed: pairs.iter().map(|p| p.0).collect(),
        exact: pairs.iter().map(|p| p.1).collect(),
        ratios,
        mean,
        std_err,
    })
}

fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsSweepConfig {
    pub l: usize,
    /// Grid of `J / J_D` with `J_D = 1`.
    pub ratios: Vec<f64>,
    pub sigma: f64,
    pub seeds: Vec<u64>,
    pub pauli1: bool,
    /// Attach exact energies (only when `L^2 <= 20`).
    pub exact: bool,
}

impl SsSweepConfig {
    pub fn new(l: usize, ratios: Vec<f64>) -> Self {
        Self {
            l,
            ratios,
            sigma: 0.0,
            seeds: vec![0],
            pauli1: true,
            exact: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub ratio: f64,
    pub seed: u64,
    pub soc: f64,
    pub soc_p1: Option<f64>,
    pub ed: Option<f64>,
    /// Energies above are VarBench; `total_weight` converts them.
    pub total_weight: f64,
    /// SOC `x_e` per edge, for heatmaps.
    pub edge_x: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SsSweepConfig,
    pub tol: f64,
    pub points: Vec<SweepPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kink {
    pub location: f64,
    /// Change in finite-difference slope across `location`.
    pub jump: f64,
}

/// Grid point with the largest change of finite-difference slope.
pub fn find_kink(xs: &[f64], ys: &[f64]) -> Option<Kink> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return None;
    }
    let slopes: Vec<f64> = (0..xs.len() - 1).map(|k| (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k])).collect();
    (0..slopes.len() - 1)
        .map(|k| Kink {
            location: xs[k + 1],
            jump: slopes[k + 1] - slopes[k],
        })
        .max_by(|a, b| a.jump.abs().total_cmp(&b.jump.abs()))
}

impl SweepResult {
    /// Seed-averaged SOC objective per grid ratio.
    pub fn mean_soc(&self) -> Vec<(f64, f64)> {
        self.config
            .ratios
            .iter()
            .map(|&r| {
                let v: Vec<f64> = self.points.iter().filter(|p| p.ratio == r).map(|p| p.soc).collect();
                (r, v.iter().sum::<f64>() / v.len() as f64)
            })
            .collect()
    }

    pub fn soc_kink(&self) -> Option<Kink> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = self.mean_soc().into_iter().unzip();
        find_kink(&xs, &ys)
    }

    /// Mean of `ED / SOC` over points carrying exact energies. The ratio is
    /// not invariant under the affine change of scaling, so it is explicit.
    pub fn mean_ed_over_soc(&self, scaling: ScalingConvention) -> Option<f64> {
        let conv = |e: f64, w: f64| convert_energy(e, ScalingConvention::VarBench, scaling, w);
        let v: Vec<f64> = self
            .points
            .iter()
            .filter_map(|p| p.ed.map(|e| conv(e, p.total_weight) / conv(p.soc, p.total_weight)))
            .collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("ratio,seed,soc,soc_p1,ed\n");
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.10}"));
        for p in &self.points {
            let _ = writeln!(out, "{},{},{:.10},{},{}", p.ratio, p.seed, p.soc, opt(p.soc_p1), opt(p.ed));
        }
        out
    }

    /// CSV at `path` plus a JSON metadata file beside it.
    pub fn save(&self, path: &Path) -> Result<PathBuf> {
        fs::write(path, self.to_csv())?;
        let meta = json!({
            "generator": format!("qmcbound {}", env!("CARGO_PKG_VERSION")),
            "config": self.config,
            "tol": self.tol,
            "points": self.points.len(),
        });
        let meta_path = path.with_extension("json");
        fs::write(&meta_path, serde_json::to_string_pretty(&meta)?)?;
        Ok(meta_path)
    }
}

pub fn ss_instance(l: usize, ratio: f64, sigma: f64, seed: u64) -> Result<Graph> {
    let g = gen_shastry_sutherland(l, ratio, 1.0)?;
    apply_disorder(&g, sigma, seed)
}

pub fn run_ss_sweep(cfg: &SsSweepConfig, opts: &SolveOptions) -> Result<SweepResult> {
    if cfg.l < 2 || !cfg.l.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("L must be even and at least 2, got {}", cfg.l)));
    }
    if cfg.seeds.is_empty() || cfg.ratios.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one ratio and one seed".into()));
    }
    let with_ed = cfg.exact && cfg.l * cfg.l <= 20;
    let grid: Vec<(f64, u64)> = cfg
        .ratios
        .iter()
        .flat_map(|&r| cfg.seeds.iter().map(move |&s| (r, s)))
        .collect();
    let points = grid
        .par_iter()
        .map(|&(ratio, seed)| {
            let g = ss_instance(cfg.l, ratio, cfg.sigma, seed)?;
            let soc = solve_relaxation(&g, &ModelOptions::new(Relaxation::Soc), opts)?;
            let soc_p1 = if cfg.pauli1 {
                Some(solve_relaxation(&g, &ModelOptions::new(Relaxation::SocP1), opts)?.objective.varbench)
            } else {
                None
            };
            let ed = if with_ed {
                Some(ground_energy(&g, ScalingConvention::VarBench, &EdOptions::default())?)
            } else {
                None
            };
            Ok(SweepPoint {
                ratio,
                seed,
                soc: soc.objective.varbench,
                soc_p1,
                ed,
                total_weight: g.total_weight(),
                edge_x: edge_values(&soc, &g),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        config: cfg.clone(),
        tol: opts.tol,
        points,
    })
}

/// `x_e` of a relaxation solution in edge order.
pub fn edge_values(sol: &RelaxSolution, g: &Graph) -> Vec<f64> {
    g.edges.iter().map(|e| sol.pair_value(e.i, e.j)).collect()
}

/// Per-edge CSV `i,j,w,x_ij,xi,yi,xj,yj` plus a JSON colour-scale file;
/// returns the JSON path.
pub fn emit_heatmap(g: &Graph, edge_x: &[f64], path: &Path) -> Result<PathBuf> {
    let coords = g
        .coords
        .as_ref()
        .ok_or_else(|| Error::Precondition(format!("graph '{}' has no coordinates", g.name)))?;
    if edge_x.len() != g.num_edges() {
        return Err(Error::DimensionMismatch(format!("{} values for {} edges", edge_x.len(), g.num_edges())));
    }
    let mut out = String::from("i,j,w,x_ij,xi,yi,xj,yj\n");
    for (e, x) in g.edges.iter().zip(edge_x) {
        let (a, b) = (coords[e.i], coords[e.j]);
        let _ = writeln!(out, "{},{},{},{:.10},{},{},{},{}", e.i, e.j, e.w, x, a[0], a[1], b[0], b[1]);
    }
    fs::write(path, out)?;
    let meta = json!({
        "instance": g.name,
        "columns": ["i", "j", "w", "x_ij", "xi", "yi", "xj", "yj"],
        "value": "x_ij = <SWAP_ij>",
        "color_scale": {"min": -1.0, "max": 1.0, "at_min": "blue", "at_max": "red", "note": "x = -1 is a singlet"},
        "edges": g.num_edges(),
    });
    let meta_path = path.with_extension("json");
    fs::write(&meta_path, serde_json::to_string_pretty(&meta)?)?;
    Ok(meta_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_square, Edge};

    #[test]
    fn ed_over_soc_ratio_depends_on_scaling() {
        let point = |soc, ed| SweepPoint {
            ratio: 0.4,
            seed: 0,
            soc,
            soc_p1: None,
            ed: Some(ed),
            total_weight: 20.0,
            edge_x: vec![],
        };
        let res = SweepResult {
            config: SsSweepConfig::new(4, vec![0.4]),
            tol: 1e-8,
            points: vec![point(-25.0, -24.0), point(-24.0, -24.0)],
        };
        let vb = res.mean_ed_over_soc(ScalingConvention::VarBench).unwrap();
        assert!((vb - (0.96 + 1.0) / 2.0).abs() < 1e-15);
        // (E - W) / 4 per point: -44/-45 and 1.
        let qmc = res.mean_ed_over_soc(ScalingConvention::QmcMin).unwrap();
        assert!((qmc - (44.0 / 45.0 + 1.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn ratio_lp_at_default_threshold() {
        let lp = approx_ratio_lp(0.771).unwrap();
        assert!((lp.f_t - 0.5266).abs() < 1e-4);
        assert!((lp.f_tprime - 0.5380).abs() < 1e-3);
        assert!((lp.r - lp.f_t).abs() < 1e-7);
        assert!((lp.gamma - 1.0).abs() < 1e-6);
        assert!((lp.alpha + lp.beta + lp.gamma - 1.0).abs() < 1e-8);
        let flat = approx_ratio_lp_with(0.771, TCoefficient::Flat).unwrap();
        assert!(flat.r < lp.r - 1e-3);
    }

    #[test]
    fn ratio_lp_fixed_point_and_bounds() {
        let lp = approx_ratio_lp(0.75).unwrap();
        assert!((lp.t_prime - 0.75).abs() < 1e-12 && (lp.f_t - lp.f_tprime).abs() < 1e-12);
        for k in 1..25 {
            let t = 0.75 + 0.01 * k as f64;
            let lp = approx_ratio_lp(t.min(1.0)).unwrap();
            assert!(lp.r <= lp.f_t.min(1.0) + 1e-7 && lp.r >= F_LOWER_BOUND - 1e-7, "t={t}: {}", lp.r);
        }
        assert!(approx_ratio_lp(0.7).is_err());
    }

    #[test]
    fn kink_finder() {
        let xs: Vec<f64> = (0..11).map(|k| k as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| if x <= 0.5 { 0.0 } else { -(x - 0.5) }).collect();
        let k = find_kink(&xs, &ys).unwrap();
        assert!((k.location - 0.5).abs() < 1e-12 && (k.jump + 1.0).abs() < 1e-9);
    }

    #[test]
    fn heatmap_shape() {
        let dir = tempfile::tempdir().unwrap();
        let g = Graph::new(2, [Edge::new(0, 1, 1.0)]).unwrap().with_coords(vec![[0.0, 0.0], [1.0, 0.0]]).unwrap();
        let path = dir.path().join("edge.csv");
        let meta = emit_heatmap(&g, &[-1.0], &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().nth(1).unwrap().starts_with("0,1,1,-1.0000000000"));
        assert!(fs::read_to_string(meta).unwrap().contains("blue"));
        let bare = Graph::new(2, [Edge::new(0, 1, 1.0)]).unwrap();
        assert!(emit_heatmap(&bare, &[-1.0], &path).is_err());
        let sq = gen_square(4, true).unwrap();
        let sol = solve_relaxation(&sq, &ModelOptions::new(Relaxation::Soc), &SolveOptions::default()).unwrap();
        let x = edge_values(&sol, &sq);
        emit_heatmap(&sq, &x, &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 33);
        assert!(x.iter().all(|v| (-1.0 - 1e-7..=1.0 + 1e-7).contains(v)));
    }

    #[test]
    fn complete_graph_ratios_are_exact() {
        let s = run_er_study(6, 1.0, 2, Relaxation::Soc, 1, &SolveOptions::default()).unwrap();
        // K6: SOC = -15, ED = -9.
        assert!(s.ratios.iter().all(|r| (r - 15.0 / 9.0).abs() < 1e-6));
        assert!(s.std_err < 1e-9);
    }
}
