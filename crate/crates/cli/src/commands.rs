use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use qmcbound_core::analysis::{self, SsSweepConfig};
use qmcbound_core::exact::ground_energy;
use qmcbound_core::graph::save_edgelist;
use qmcbound_core::model::{convert_energy, solve_relaxation};
use qmcbound_core::rounding::round;
use qmcbound_core::{
    EdOptions, Error, Graph, ModelOptions, Relaxation, RelaxSolution, RoundOptions, ScalingConvention, SolveOptions,
};
use serde_json::{json, Value};

use crate::args::*;
use crate::instance::{self, GenSpec};
use crate::verify;

/// What a command hands back to `main`: a JSON document and a table.
pub struct Report {
    pub json: Value,
    pub table: String,
    /// Nonzero exit without an error (failed verification).
    pub failed: bool,
}

impl Report {
    fn ok(json: Value, table: String) -> Self {
        Self {
            json,
            table,
            failed: false,
        }
    }
}

pub fn execute(cmd: &Command) -> Result<Report> {
    let config = serde_json::to_value(RunConfig::new(cmd.clone()))?;
    let mut report = match cmd {
        Command::Generate(a) => generate(a)?,
        Command::Solve(a) => solve(a)?,
        Command::Exact(a) => exact(a)?,
        Command::Round(a) => round_cmd(a)?,
        Command::Sweep(a) => sweep(a)?,
        Command::RatioLp(a) => ratio_lp(a)?,
        Command::Verify(a) => verify::run(a),
        Command::Heatmap(a) => heatmap(a)?,
        Command::Run(a) => return replay(&a.config),
    };
    if let Value::Object(map) = &mut report.json {
        map.insert("config".into(), config);
    }
    if let Some(path) = output_json(cmd) {
        write_json(path, &report.json)?;
    }
    Ok(report)
}

/// Commands whose `--output` is the result JSON itself.
fn output_json(cmd: &Command) -> Option<&Path> {
    match cmd {
        Command::Solve(a) => a.output.as_deref(),
        Command::Exact(a) => a.output.as_deref(),
        Command::Round(a) => a.output.as_deref(),
        Command::RatioLp(a) => a.output.as_deref(),
        Command::Sweep(a) if a.kind == SweepKind::Er => a.output.as_deref(),
        _ => None,
    }
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(v)? + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn replay(path: &Path) -> Result<Report> {
    let text = fs::read_to_string(path).map_err(Error::from)?;
    let v: Value = serde_json::from_str(&text).map_err(Error::from)?;
    // Accept a bare RunConfig or any result file carrying one.
    let cfg = v.get("config").cloned().unwrap_or(v);
    let cfg: RunConfig = serde_json::from_value(cfg).map_err(Error::from)?;
    if matches!(cfg.command, Command::Run(_)) {
        bail!(Error::InvalidParameter("a config may not replay another config".into()));
    }
    execute(&cfg.command)
}

fn solve_opts(a: &SolverArgs) -> SolveOptions {
    SolveOptions {
        tol: a.tol,
        max_iter: a.max_iter,
        method: a.method,
        ..SolveOptions::default()
    }
}

fn model_opts(a: &ModelArgs) -> ModelOptions {
    ModelOptions {
        relaxation: a.relaxation,
        triples: a.triples,
        quads: a.quads,
    }
}

fn generate(a: &GenerateArgs) -> Result<Report> {
    let spec = GenSpec {
        lattice: a.lattice,
        l: a.l,
        periodic: a.periodic,
        cx: a.cx,
        cy: a.cy,
        n: a.n,
        p: a.p,
        seed: a.seed,
        j: a.j,
        jd: a.jd,
        sigma: a.sigma,
    };
    let g = spec.build()?;
    match a.output.extension().and_then(|e| e.to_str()) {
        Some("json") => g.save_json(&a.output)?,
        _ => save_edgelist(&g, &a.output)?,
    }
    let source = spec.to_string();
    let table = format!(
        "{:<24} {}\n{:<24} {}\n{:<24} {}\n{:<24} {}\n",
        "instance",
        g.name,
        "vertices",
        g.n,
        "edges",
        g.num_edges(),
        "written",
        a.output.display()
    );
    Ok(Report::ok(
        json!({ "instance": instance::describe(&g, &source), "output": a.output, "seed": a.seed }),
        table,
    ))
}

fn solution_json(g: &Graph, source: &str, sol: &RelaxSolution) -> Result<Value> {
    let mut v = serde_json::to_value(sol)?;
    let map = v.as_object_mut().expect("struct serializes to an object");
    map.insert("instance".into(), instance::describe(g, source));
    map.insert("relaxation".into(), json!(sol.relaxation.name()));
    map.insert("seed".into(), Value::Null);
    Ok(v)
}

fn solve(a: &SolveArgs) -> Result<Report> {
    let g = instance::resolve(&a.instance)?;
    let sol = solve_relaxation(&g, &model_opts(&a.model), &solve_opts(&a.solver))?;
    let s = &sol.solver;
    let table = format!(
        "{:<24} {}\n{:<24} {}\n{:<24} {:.6}\n{:<24} {:.6}\n{:<24} {} in {} iterations (max residual {:.2e})\n",
        "instance",
        g.name,
        "relaxation",
        sol.relaxation.name(),
        format!("bound ({})", a.scaling.name()),
        sol.objective.get(a.scaling),
        "bound (qmc_max)",
        sol.objective.qmc_max(),
        "solver",
        s.status.name(),
        s.iterations,
        s.residuals.max(),
    );
    Ok(Report::ok(solution_json(&g, &a.instance, &sol)?, table))
}

fn exact(a: &ExactArgs) -> Result<Report> {
    let g = instance::resolve(&a.instance)?;
    let opts = EdOptions {
        method: a.ed_method,
        sectors: !a.no_sectors,
        tol: a.ed_tol,
    };
    let vb = ground_energy(&g, ScalingConvention::VarBench, &opts)?;
    let qmc = convert_energy(vb, ScalingConvention::VarBench, ScalingConvention::QmcMin, g.total_weight());
    let shown = if a.scaling == ScalingConvention::VarBench { vb } else { qmc };
    let table = format!(
        "{:<24} {}\n{:<24} {:.8}\n",
        "instance",
        g.name,
        format!("ground energy ({})", a.scaling.name()),
        shown
    );
    Ok(Report::ok(
        json!({
            "instance": instance::describe(&g, &a.instance),
            "energy": { "varbench": vb, "qmc_min": qmc },
            "ed": opts,
            "seed": Value::Null,
        }),
        table,
    ))
}

fn round_cmd(a: &RoundArgs) -> Result<Report> {
    let g = instance::resolve(&a.instance)?;
    let sol: RelaxSolution = match &a.result {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(Error::from)?;
            serde_json::from_str(&text).map_err(Error::from)?
        }
        None => solve_relaxation(&g, &ModelOptions::new(Relaxation::SocP1), &solve_opts(&a.solver))?,
    };
    if sol.n != g.n {
        bail!(Error::DimensionMismatch(format!(
            "result has {} qubits, instance {}",
            sol.n, g.n
        )));
    }
    let opts = RoundOptions {
        t: a.t,
        samples: a.samples,
        seed: a.seed,
    };
    let r = round(&sol, &g, &opts)?;
    let w = g.total_weight();
    // Rounding reports QMC-max values; convert via qmc_min = -qmc_max.
    let conv = |qmc_max: f64| convert_energy(-qmc_max, ScalingConvention::QmcMin, a.scaling, w);
    let rows = [
        ("relaxation bound", conv(r.relaxation_value)),
        ("expected (matching)", conv(r.expected_energy_s)),
        ("expected (product)", conv(r.expected_energy_prod)),
        ("best sampled state", conv(r.best_sampled_energy)),
    ];
    let mut table = format!("{:<24} {}\n{:<24} {}\n", "instance", g.name, "scaling", a.scaling.name());
    for (k, v) in rows {
        table += &format!("{k:<24} {v:.6}\n");
    }
    table += &format!(
        "{:<24} {} pairs\n{:<24} {:.4}\n{:<24} {}\n",
        "matching",
        r.matching.len(),
        "guarantee ratio",
        r.guarantee_ratio,
        "seed",
        r.seed
    );
    let rounded = json!({
        "varbench": convert_energy(-r.best_sampled_energy, ScalingConvention::QmcMin, ScalingConvention::VarBench, w),
        "qmc_min": -r.best_sampled_energy,
    });
    let mut v = solution_json(&g, &a.instance, &sol)?;
    let map = v.as_object_mut().expect("object");
    map.insert("rounding".into(), serde_json::to_value(&r)?);
    map.insert("rounded_objective".into(), rounded);
    map.insert("seed".into(), json!(a.seed));
    Ok(Report::ok(v, table))
}

/// `start:stop:step` (inclusive) or a comma list.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidParameter(format!("bad ratio grid '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 3 {
        let v: Vec<f64> = parts.iter().map(|p| p.trim().parse()).collect::<Result<_, _>>().map_err(|_| bad())?;
        let (a, b, h) = (v[0], v[1], v[2]);
        if !(h > 0.0) || b < a {
            bail!(bad());
        }
        let steps = ((b - a) / h + 1e-9).floor() as usize;
        // Round to the step's precision so grid values print cleanly.
        return Ok((0..=steps).map(|k| ((a + k as f64 * h) * 1e12).round() / 1e12).collect());
    }
    let v: Vec<f64> = s.split(',').map(|p| p.trim().parse()).collect::<Result<_, _>>().map_err(|_| bad())?;
    if v.is_empty() {
        bail!(bad());
    }
    Ok(v)
}

fn sweep(a: &SweepArgs) -> Result<Report> {
    let opts = solve_opts(&a.solver);
    match a.kind {
        SweepKind::Ss => {
            let mut cfg = SsSweepConfig::new(a.l, parse_grid(&a.ratios)?);
            cfg.sigma = a.sigma;
            cfg.seeds = (a.seed..a.seed + a.seeds.max(1) as u64).collect();
            cfg.pauli1 = !a.no_p1;
            cfg.exact = !a.no_exact;
            let res = analysis::run_ss_sweep(&cfg, &opts)?;
            let mut table = format!("{:>8} {:>14} {:>14}\n", "J/J_D", "SOC", "slope");
            let mean = res.mean_soc();
            for (k, (r, v)) in mean.iter().enumerate() {
                let slope = if k > 0 {
                    format!("{:.6}", (v - mean[k - 1].1) / (r - mean[k - 1].0))
                } else {
                    String::new()
                };
                table += &format!("{r:>8.4} {v:>14.6} {slope:>14}\n");
            }
            let kink = res.soc_kink();
            if let Some(k) = &kink {
                table += &format!("kink at J/J_D = {:.4} (slope jump {:.4})\n", k.location, k.jump);
            }
            let ratio = |sc| res.mean_ed_over_soc(sc);
            if let Some(m) = ratio(ScalingConvention::QmcMin) {
                table += &format!("mean ED/SOC = {m:.6} (qmc_min scaling)\n");
            }
            if let Some(path) = &a.output {
                let meta = res.save(path)?;
                table += &format!("written {} (+ {})\n", path.display(), meta.display());
            }
            let seeds = res.config.seeds.clone();
            Ok(Report::ok(
                json!({
                    "sweep": res,
                    "kink": kink,
                    "mean_ed_over_soc": {
                        "qmc_min": ratio(ScalingConvention::QmcMin),
                        "varbench": ratio(ScalingConvention::VarBench),
                    },
                    "seed": seeds,
                }),
                table,
            ))
        }
        SweepKind::Er => {
            let study = analysis::run_er_study(a.n, a.p, a.seeds.max(1), a.relaxation, a.seed, &opts)?;
            let table = format!(
                "{:<24} {}\n{:<24} {}\n{:<24} {}\n{:<24} {}\n{:<24} {:.4} ± {:.4}\n",
                "n",
                a.n,
                "p",
                a.p,
                "relaxation",
                a.relaxation.name(),
                "instances",
                study.ratios.len(),
                "mean relaxed/exact",
                study.mean,
                study.std_err
            );
            let seed = study.seed;
            Ok(Report::ok(json!({ "study": study, "seed": seed }), table))
        }
    }
}

fn ratio_lp(a: &RatioLpArgs) -> Result<Report> {
    let r = analysis::approx_ratio_lp_with(a.t, a.coefficient())?;
    let table = format!(
        "{:<24} {}\n{:<24} {:.6}\n{:<24} {:.6}\n{:<24} {:.6}\n{:<24} (alpha, beta, gamma) = ({:.4}, {:.4}, {:.4})\n",
        "t",
        r.t,
        "t'",
        r.t_prime,
        "F(t)",
        r.f_t,
        "ratio",
        r.r,
        "weights",
        r.alpha,
        r.beta,
        r.gamma
    );
    Ok(Report::ok(json!({ "ratio_lp": r, "seed": Value::Null }), table))
}

fn heatmap(a: &HeatmapArgs) -> Result<Report> {
    let g = instance::resolve(&a.instance)?;
    let sol = solve_relaxation(&g, &model_opts(&a.model), &solve_opts(&a.solver))?;
    let xs = analysis::edge_values(&sol, &g);
    let meta = analysis::emit_heatmap(&g, &xs, &a.output)?;
    let table = format!(
        "{:<24} {}\n{:<24} {} edges\n{:<24} {} (+ {})\n",
        "instance",
        g.name,
        "values",
        xs.len(),
        "written",
        a.output.display(),
        meta.display()
    );
    Ok(Report::ok(
        json!({ "instance": instance::describe(&g, &a.instance), "edge_x": xs, "seed": Value::Null }),
        table,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.3:0.5:0.1").unwrap(), vec![0.3, 0.4, 0.5]);
        assert_eq!(parse_grid("0.4, 0.6").unwrap(), vec![0.4, 0.6]);
        assert!(parse_grid("0.5:0.3:0.1").is_err());
        assert!(parse_grid("a,b").is_err());
    }
}
