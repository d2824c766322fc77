//! Scratch measurement harness (deleted before release).
use fracparab::fd::{error_report, march};
use fracparab::inverse::*;
use fracparab::mesh::{SpaceGrid, TimeMesh};
use fracparab::problem::ProblemSpec;
use fracparab::spectral::*;
use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;
use std::time::Instant;

fn worked_example() -> ProblemSpec {
    ProblemSpec {
        rho: 0.5,
        mu: 1.0,
        horizon: 5.0,
        sigma: Arc::new(|t: f64| 2.0 + t.sqrt()),
        source_r: Some(Arc::new(|t: f64| {
            16.0 / (3.0 * (2.0 * PI).sqrt()) * t.powf(1.5)
                + SQRT_2 * PI * PI / (1.0 + PI * PI) * (2.0 + t.sqrt()) * (1.0 + t * t)
        })),
        phi: Arc::new(|x: f64| 2.0 * (PI * x).sin()),
        g: Arc::new(|x: f64| SQRT_2 * (1.0 + PI * PI) * (PI * x).sin()),
    }
}

fn exact(x: f64, t: f64) -> f64 {
    2.0 * (1.0 + t * t) * (PI * x).sin()
}

fn main() {
    let spec = worked_example();
    let grading = 3.0; // (2-rho)/rho for rho = 1/2

    // --- FD at the acceptance configuration ---
    for (n, m) in [(1000usize, 100usize), (1000, 200), (200, 50), (200, 100), (200, 200)] {
        let t0 = Instant::now();
        let grid = SpaceGrid::new(n).unwrap();
        let mesh = TimeMesh::graded(5.0, m, grading).unwrap();
        let field = march(&spec, &grid, &mesh).unwrap();
        let rep = error_report(&field, exact);
        println!(
            "FD N={n:5} M={m:4}: max_err={:.6e} l2@T={:.6e}  ({:.2?})",
            rep.max_err,
            rep.l2_err,
            t0.elapsed()
        );
    }

    // --- temporal Richardson triplet, fixed N (spatial error cancels) ---
    {
        let n = 200usize;
        let grid = SpaceGrid::new(n).unwrap();
        let runs: Vec<_> = [50usize, 100, 200, 400]
            .iter()
            .map(|&m| {
                let mesh = TimeMesh::graded(5.0, m, grading).unwrap();
                march(&spec, &grid, &mesh).unwrap()
            })
            .collect();
        let diff = |a: &fracparab::SolutionField, b: &fracparab::SolutionField, mc: usize| {
            // rows of the coarse mesh are nested in the fine mesh at 2k
            let mut d = 0.0f64;
            for k in 0..=mc {
                for i in 0..=n {
                    d = d.max((a.value(i, k) - b.value(i, 2 * k)).abs());
                }
            }
            d
        };
        let d1 = diff(&runs[0], &runs[1], 50);
        let d2 = diff(&runs[1], &runs[2], 100);
        let d3 = diff(&runs[2], &runs[3], 200);
        println!(
            "temporal diffs: {d1:.4e} {d2:.4e} {d3:.4e}  orders: {:.3} {:.3}",
            (d1 / d2).log2(),
            (d2 / d3).log2()
        );
    }

    // --- spatial ratio with M fixed large ---
    {
        let m = 600usize;
        let mesh = TimeMesh::graded(5.0, m, grading).unwrap();
        let mut errs = Vec::new();
        for n in [20usize, 40, 80] {
            let grid = SpaceGrid::new(n).unwrap();
            let field = march(&spec, &grid, &mesh).unwrap();
            errs.push(error_report(&field, exact).max_err);
        }
        println!(
            "spatial errs: {:.4e} {:.4e} {:.4e} ratios {:.3} {:.3}",
            errs[0],
            errs[1],
            errs[2],
            errs[0] / errs[1],
            errs[1] / errs[2]
        );
    }

    // --- spectral single mode vs sqrt2 (1+t^2) ---
    for m in [50usize, 100, 200] {
        let mesh = TimeMesh::graded(5.0, m, grading).unwrap();
        let t0 = Instant::now();
        let sol = solve_mode(&spec, 1, &mesh).unwrap();
        let mut err = 0.0f64;
        for (j, &t) in mesh.nodes().iter().enumerate() {
            err = err.max((sol.values[j] - SQRT_2 * (1.0 + t * t)).abs());
        }
        println!(
            "spectral mode1 M={m}: max_err={err:.4e} sweeps={} ({:.2?})",
            sol.picard_sweeps,
            t0.elapsed()
        );
    }
    // mode 2 should vanish
    {
        let mesh = TimeMesh::graded(5.0, 100, grading).unwrap();
        let sol = solve_mode(&spec, 2, &mesh).unwrap();
        let m = sol.values.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        println!("spectral mode2 sup = {m:.3e}");
    }

    // --- inverse recovery, inverse-crime-free analytic observation ---
    {
        let t0 = Instant::now();
        let mut inv_spec = spec.clone();
        inv_spec.source_r = None;
        let mesh = TimeMesh::graded(5.0, 200, grading).unwrap();
        let functional = make_functional(FunctionalKind::Mean, &inv_spec, 16).unwrap();
        let phi_samples: Vec<f64> = mesh
            .nodes()
            .iter()
            .map(|&t| 4.0 / PI * (1.0 + t * t))
            .collect();
        let obs = Observation {
            phi_samples,
            dphi: DphiMode::Analytic(Arc::new(|t: f64| {
                32.0 / (3.0 * PI.powf(1.5)) * t.powf(1.5)
            })),
        };
        let opts = InverseOptions {
            tol: 1e-8,
            max_iter: 500,
            relaxation: 1.0,
            truncation: 16,
        };
        match recover(&inv_spec, &functional, &obs, &mesh, opts) {
            Ok(res) => {
                let r_true = |t: f64| {
                    16.0 / (3.0 * (2.0 * PI).sqrt()) * t.powf(1.5)
                        + SQRT_2 * PI * PI / (1.0 + PI * PI) * (2.0 + t.sqrt()) * (1.0 + t * t)
                };
                let mut max_abs = 0.0f64;
                let mut sup_true = 0.0f64;
                for (j, &t) in mesh.nodes().iter().enumerate() {
                    max_abs = max_abs.max((res.r_samples[j] - r_true(t)).abs());
                    sup_true = sup_true.max(r_true(t).abs());
                }
                println!(
                    "inverse: rel_max_err={:.4e} iters={} c1={:.3e} (log {:.1}) violated={} ({:.2?})",
                    max_abs / sup_true,
                    res.iterations,
                    res.c1_bound,
                    res.diagnostics.c1_log,
                    res.bound_violated,
                    t0.elapsed()
                );
            }
            Err(e) => println!("inverse FAILED: {e}"),
        }
    }
}
