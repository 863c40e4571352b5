//! Sampling-based and sweep invariants that are too slow for proptest.

use qmcbound_core::analysis::{run_er_study, run_ss_sweep, SsSweepConfig};
use qmcbound_core::graph::{gen_erdos_renyi, gen_kagome, gen_square};
use qmcbound_core::model::solve_relaxation;
use qmcbound_core::rounding::{round, rounding_function};
use qmcbound_core::{ModelOptions, Relaxation, RoundOptions, SolveOptions};

#[test]
fn er_edge_count_matches_binomial() {
    let (n, p, seeds) = (10usize, 0.3, 10_000u64);
    let pairs = (n * (n - 1) / 2) as f64;
    let total: usize = (0..seeds).map(|s| gen_erdos_renyi(n, p, s).unwrap().num_edges()).sum();
    let mean = total as f64 / seeds as f64;
    let sd = (pairs * p * (1.0 - p) / seeds as f64).sqrt();
    assert!((mean - pairs * p).abs() <= 4.0 * sd, "mean {mean} vs {}", pairs * p);
}

#[test]
fn rounding_function_decreases_up_to_four_fifths() {
    let grid: Vec<f64> = (1..=8000).map(|k| k as f64 / 10_000.0).collect();
    let f: Vec<f64> = grid.iter().map(|&x| rounding_function(x).unwrap()).collect();
    for (k, w) in f.windows(2).enumerate() {
        assert!(w[0] >= w[1], "F rises between {} and {}", grid[k], grid[k + 1]);
    }
}

#[test]
fn monte_carlo_means_match_expectations() {
    let instances = [
        gen_square(3, false).unwrap(),
        gen_kagome(2, 2, false).unwrap(),
        gen_erdos_renyi(10, 0.5, 4).unwrap(),
    ];
    for g in &instances {
        let sol = solve_relaxation(g, &ModelOptions::new(Relaxation::SocP1), &SolveOptions::default()).unwrap();
        let r = round(
            &sol,
            g,
            &RoundOptions {
                samples: 100_000,
                seed: 11,
                ..RoundOptions::default()
            },
        )
        .unwrap();
        for (mean, se, exp) in [
            (r.sample_mean_prod, r.sample_se_prod, r.expected_energy_prod),
            (r.sample_mean_s, r.sample_se_s, r.expected_energy_s),
        ] {
            assert!(
                (mean - exp).abs() <= 3.0 * se + 1e-12,
                "{}: sample mean {mean} vs expectation {exp} (se {se})",
                g.name
            );
        }
    }
}

#[test]
fn er_ratios_are_valid_bounds() {
    let opts = SolveOptions::default();
    for p in [0.3, 0.6] {
        let s = run_er_study(8, p, 20, Relaxation::Soc, 100, &opts).unwrap();
        assert!(s.ratios.iter().all(|&r| r >= 1.0 - 10.0 * opts.tol), "{:?}", s.ratios);
    }
    let k = run_er_study(9, 1.0, 4, Relaxation::Soc, 0, &opts).unwrap();
    assert!(k.std_err == 0.0 && k.ratios.iter().all(|&r| r == k.ratios[0]));
}

#[test]
fn ss_relaxation_is_exact_in_dimer_phase() {
    let ratios: Vec<f64> = (0..=8).map(|k| 0.05 * k as f64).collect();
    let res = run_ss_sweep(&SsSweepConfig::new(4, ratios), &SolveOptions::default()).unwrap();
    for p in &res.points {
        let ed = p.ed.unwrap();
        assert!((p.soc - ed).abs() <= 1e-3, "J/J_D = {}: SOC {} vs ED {ed}", p.ratio, p.soc);
    }
}
