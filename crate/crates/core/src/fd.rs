//! Finite-difference forward solver: non-uniform L1 in time on a graded
//! mesh, second-order central differences in space, one tridiagonal solve
//! per time level.
//!
//! Writing Γ₂ = Γ(2−ρ), D²v_i = (v_{i+1} − 2v_i + v_{i−1})/h² and
//! e_m = d_{k,m+1} − d_{k,m} > 0, the level-k equation collapses to
//!
//!   −a^k u_{i−1}^k + c^k u_i^k − a^k u_{i+1}^k = b_i^k,
//!   a^k = μ d_{k,k}/(Γ₂ h²) + σ(t_k)/h²,
//!   c^k = d_{k,k}/Γ₂ + 2 a^k,
//!   b_i^k = r(t_k) g_i
//!         + (1/Γ₂) [ d_{k,1} u_i^0 + Σ_{m=1}^{k−1} e_m u_i^m ]
//!         − (μ/Γ₂) [ d_{k,1} D²u_i^0 + Σ_{m=1}^{k−1} e_m D²u_i^m ].
//!
//! The right-hand side is derived by moving every j < k term of the two L1
//! sums across the equality (see NOTES.md for the step-by-step algebra); the
//! ρ → 1 limit reproduces backward Euler from level k−1, which pins down the
//! signs. c^k − 2a^k = d_{k,k}/Γ₂ > 0, so every step system is strictly
//! diagonally dominant and the Thomas algorithm needs no pivoting.

use crate::error::{Error, Result};
use crate::gamma::recip_gamma;
use crate::mesh::{SpaceGrid, TimeMesh};
use crate::problem::{ProblemSpec, SolutionField};
use crate::specfun::l1_weights;

/// One time level's tridiagonal system over the interior unknowns i = 1..N−1.
#[derive(Debug, Clone)]
pub struct StepSystem {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl StepSystem {
    /// Constant-coefficient system (−a, c, −a) with the given right-hand side.
    pub fn symmetric(a: f64, c: f64, rhs: Vec<f64>) -> Self {
        let n = rhs.len();
        Self {
            sub: vec![-a; n],
            diag: vec![c; n],
            sup: vec![-a; n],
            rhs,
        }
    }

    fn check_dominance(&self) -> Result<()> {
        for i in 0..self.diag.len() {
            let off = if i > 0 { self.sub[i].abs() } else { 0.0 }
                + if i + 1 < self.diag.len() {
                    self.sup[i].abs()
                } else {
                    0.0
                };
            if !(self.diag[i].abs() > off) {
                return Err(Error::IllPosedSystem { row: i });
            }
        }
        Ok(())
    }
}

/// Assemble the level-k system from the solved history rows 0..k−1.
pub fn assemble_step(
    spec: &ProblemSpec,
    history: &SolutionField,
    mesh: &TimeMesh,
    k: usize,
) -> Result<StepSystem> {
    if k < 1 || k > mesh.steps_count {
        return Err(Error::IndexOutOfRange {
            index: k,
            constraint: "1 <= k <= M",
        });
    }
    let grid = &history.space;
    let n = grid.subintervals;
    let h2 = grid.h * grid.h;
    let gamma2_inv = recip_gamma(2.0 - spec.rho);
    let weights = l1_weights(mesh, spec.rho, k)?;
    let d_kk = weights[k - 1];
    let sigma_k = (spec.sigma)(mesh.node(k));
    let r_k = spec
        .source_r
        .as_ref()
        .map(|r| r(mesh.node(k)))
        .ok_or_else(|| Error::Domain("finite-difference march requires r(t)".into()))?;

    let a = spec.mu * d_kk * gamma2_inv / h2 + sigma_k / h2;
    let c = d_kk * gamma2_inv + 2.0 * a;
    debug_assert!(c - 2.0 * a > 0.0);

    let second_diff = |row: &[f64], i: usize| (row[i + 1] - 2.0 * row[i] + row[i - 1]) / h2;

    let mut rhs = vec![0.0; n - 1];
    for i in 1..n {
        let gi = (spec.g)(grid.node(i));
        let row0 = history.row(0);
        let mut scalar_hist = weights[0] * row0[i];
        let mut diff_hist = weights[0] * second_diff(row0, i);
        for m in 1..k {
            let e_m = weights[m] - weights[m - 1];
            let row = history.row(m);
            scalar_hist += e_m * row[i];
            diff_hist += e_m * second_diff(row, i);
        }
        rhs[i - 1] = r_k * gi + gamma2_inv * scalar_hist - spec.mu * gamma2_inv * diff_hist;
    }

    Ok(StepSystem::symmetric(a, c, rhs))
}

/// Thomas elimination; O(N), stable under the dominance invariant.
pub fn thomas_solve(sys: &StepSystem) -> Result<Vec<f64>> {
    sys.check_dominance()?;
    let n = sys.rhs.len();
    let mut c_star = vec![0.0; n];
    let mut d_star = vec![0.0; n];
    c_star[0] = sys.sup[0] / sys.diag[0];
    d_star[0] = sys.rhs[0] / sys.diag[0];
    for i in 1..n {
        let denom = sys.diag[i] - sys.sub[i] * c_star[i - 1];
        if denom == 0.0 {
            return Err(Error::IllPosedSystem { row: i });
        }
        c_star[i] = sys.sup[i] / denom;
        d_star[i] = (sys.rhs[i] - sys.sub[i] * d_star[i - 1]) / denom;
    }
    let mut x = d_star;
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= c_star[i] * next;
    }
    Ok(x)
}

/// Dense Gaussian elimination with partial pivoting on the same tridiagonal
/// data; the independent oracle the Thomas solver is validated against.
pub fn dense_oracle_solve(sys: &StepSystem) -> Vec<f64> {
    let n = sys.rhs.len();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        a[i][i] = sys.diag[i];
        if i > 0 {
            a[i][i - 1] = sys.sub[i];
        }
        if i + 1 < n {
            a[i][i + 1] = sys.sup[i];
        }
    }
    let mut b = sys.rhs.clone();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))
            .unwrap();
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                a[row][j] -= factor * a[col][j];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for j in row + 1..n {
            acc -= a[row][j] * x[j];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Options for the time march.
#[derive(Debug, Clone, Copy, Default)]
pub struct MarchOptions {
    /// Cross-check every Thomas solve against dense elimination (N <= 64).
    pub dense_check: bool,
}

/// March the scheme over all time levels.
pub fn march(spec: &ProblemSpec, grid: &SpaceGrid, mesh: &TimeMesh) -> Result<SolutionField> {
    march_with(spec, grid, mesh, MarchOptions::default())
}

pub fn march_with(
    spec: &ProblemSpec,
    grid: &SpaceGrid,
    mesh: &TimeMesh,
    opts: MarchOptions,
) -> Result<SolutionField> {
    spec.validate()?;
    let bounds = spec.sigma_bounds(mesh)?;
    debug_assert!(bounds.min > 0.0);
    let n = grid.subintervals;
    let mut field = SolutionField::zeros(grid.clone(), mesh.clone());

    // initial level: phi sampled at interior nodes, Dirichlet ends exact
    for i in 1..n {
        let v = (spec.phi)(grid.node(i));
        field.set(i, 0, v);
    }
    field.update_boundary_fluxes(0);

    for k in 1..=mesh.steps_count {
        let sys = assemble_step(spec, &field, mesh, k)?;
        let interior = thomas_solve(&sys)?;
        if opts.dense_check && n <= 64 {
            let oracle = dense_oracle_solve(&sys);
            for (i, (a, b)) in interior.iter().zip(oracle.iter()).enumerate() {
                if (a - b).abs() > 1e-10 * b.abs().max(1.0) {
                    return Err(Error::IllPosedSystem { row: i });
                }
            }
        }
        {
            let row = field.row_mut(k);
            row[0] = 0.0;
            row[1..n].copy_from_slice(&interior);
            row[n] = 0.0;
        }
        field.update_boundary_fluxes(k);
    }
    Ok(field)
}

/// Per-time-slice error row of an [`ErrorReport`].
#[derive(Debug, Clone, Copy)]
pub struct SliceError {
    pub t: f64,
    pub max_err: f64,
    pub l2_err: f64,
}

/// Nodal error summary of a field against a reference solution.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    pub max_err: f64,
    /// h-weighted discrete L2 error at the final time.
    pub l2_err: f64,
    pub slices: Vec<SliceError>,
}

pub fn error_report<F: Fn(f64, f64) -> f64>(field: &SolutionField, exact: F) -> ErrorReport {
    let grid = &field.space;
    let mesh = &field.time;
    let mut slices = Vec::with_capacity(mesh.len());
    let mut max_err = 0.0f64;
    for k in 0..mesh.len() {
        let t = mesh.node(k);
        let mut slice_max = 0.0f64;
        let mut sq = 0.0;
        for i in 0..grid.len() {
            let e = (field.value(i, k) - exact(grid.node(i), t)).abs();
            slice_max = slice_max.max(e);
            sq += e * e;
        }
        let l2 = (grid.h * sq).sqrt();
        slices.push(SliceError {
            t,
            max_err: slice_max,
            l2_err: l2,
        });
        max_err = max_err.max(slice_max);
    }
    let l2_err = slices.last().map(|s| s.l2_err).unwrap_or(0.0);
    ErrorReport {
        max_err,
        l2_err,
        slices,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gamma::recip_gamma;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn zero_data_spec() -> ProblemSpec {
        ProblemSpec {
            rho: 0.4,
            mu: 0.7,
            horizon: 1.0,
            sigma: Arc::new(|t: f64| 1.0 + t),
            source_r: Some(Arc::new(|_| 0.0)),
            phi: Arc::new(|_| 0.0),
            g: Arc::new(|x: f64| (PI * x).sin()),
        }
    }

    #[test]
    fn identity_system_returns_rhs() {
        let sys = StepSystem::symmetric(0.0, 1.0, vec![2.0, -3.0, 7.0]);
        let x = thomas_solve(&sys).unwrap();
        assert_eq!(x, vec![2.0, -3.0, 7.0]);
    }

    #[test]
    fn three_by_three_matches_dense_oracle() {
        // tri(-1, 3, -1) x = (1,1,1): dense elimination gives (4/7, 5/7, 4/7)
        let sys = StepSystem::symmetric(1.0, 3.0, vec![1.0, 1.0, 1.0]);
        let x = thomas_solve(&sys).unwrap();
        let oracle = dense_oracle_solve(&sys);
        for (a, b) in x.iter().zip(oracle.iter()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((x[0] - 4.0 / 7.0).abs() < 1e-14);
        assert!((x[1] - 5.0 / 7.0).abs() < 1e-14);
        assert!((x[2] - 4.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn dominance_violation_is_reported() {
        let sys = StepSystem::symmetric(2.0, 3.0, vec![1.0; 5]);
        assert!(matches!(
            thomas_solve(&sys),
            Err(Error::IllPosedSystem { .. })
        ));
    }

    #[test]
    fn zero_data_marches_to_zero() {
        let spec = zero_data_spec();
        let grid = SpaceGrid::new(16).unwrap();
        let mesh = TimeMesh::graded(1.0, 8, 2.0).unwrap();
        let field = march(&spec, &grid, &mesh).unwrap();
        for k in 0..mesh.len() {
            assert!(field.row(k).iter().all(|&v| v.abs() < 1e-14));
        }
    }

    #[test]
    fn first_step_rhs_matches_hand_formula() {
        // b^1 = r(t_1) g_i + (d11/G2) u0_i - (mu d11 / G2) D2 u0_i
        let spec = ProblemSpec {
            rho: 0.5,
            mu: 1.3,
            horizon: 1.0,
            sigma: Arc::new(|t: f64| 2.0 + t),
            source_r: Some(Arc::new(|t: f64| 1.0 + t)),
            phi: Arc::new(|x: f64| x * (1.0 - x)),
            g: Arc::new(|x: f64| (PI * x).sin()),
        };
        let grid = SpaceGrid::new(8).unwrap();
        let mesh = TimeMesh::graded(1.0, 4, 2.0).unwrap();
        let mut field = SolutionField::zeros(grid.clone(), mesh.clone());
        for i in 1..8 {
            field.set(i, 0, (spec.phi)(grid.node(i)));
        }
        let sys = assemble_step(&spec, &field, &mesh, 1).unwrap();

        let g2 = recip_gamma(2.0 - spec.rho);
        let d11 = mesh.step(1).powf(-spec.rho);
        let h2 = grid.h * grid.h;
        let r1 = 1.0 + mesh.node(1);
        for i in 1..8 {
            let u0 = field.value(i, 0);
            let lap = (field.value(i + 1, 0) - 2.0 * u0 + field.value(i - 1, 0)) / h2;
            let expect = r1 * (spec.g)(grid.node(i)) + g2 * d11 * u0 - spec.mu * g2 * d11 * lap;
            assert!(
                (sys.rhs[i - 1] - expect).abs() < 1e-10 * expect.abs().max(1.0),
                "i={i}: {} vs {expect}",
                sys.rhs[i - 1]
            );
        }
    }

    #[test]
    fn near_order_one_approaches_backward_euler() {
        // rho -> 1: d_{k,j} -> 0 for j < k and d_{k,k} -> 1/tau_k, so the
        // system matches backward Euler assembled from level k-1 only
        let rho = 0.999_999;
        let spec = ProblemSpec {
            rho,
            mu: 0.5,
            horizon: 1.0,
            sigma: Arc::new(|_| 1.0),
            source_r: Some(Arc::new(|_| 1.0)),
            phi: Arc::new(|x: f64| (PI * x).sin()),
            g: Arc::new(|x: f64| (PI * x).sin()),
        };
        let grid = SpaceGrid::new(10).unwrap();
        let mesh = TimeMesh::uniform(1.0, 4).unwrap();
        let field = march(&spec, &grid, &mesh).unwrap();

        // independent backward Euler march:
        // u^k/tau - (mu/tau + sigma) lap u^k = r g + u^{k-1}/tau - (mu/tau) lap u^{k-1}
        let h2 = grid.h * grid.h;
        let tau = 0.25;
        let mut prev: Vec<f64> = (0..=10).map(|i| (spec.phi)(grid.node(i))).collect();
        prev[0] = 0.0;
        prev[10] = 0.0;
        for _k in 1..=4usize {
            let a = spec.mu / (tau * h2) + 1.0 / h2;
            let c = 1.0 / tau + 2.0 * a;
            let mut rhs = vec![0.0; 9];
            for i in 1..10 {
                let lap = (prev[i + 1] - 2.0 * prev[i] + prev[i - 1]) / h2;
                rhs[i - 1] = (spec.g)(grid.node(i)) + prev[i] / tau - spec.mu / tau * lap;
            }
            let sys = StepSystem::symmetric(a, c, rhs);
            let interior = thomas_solve(&sys).unwrap();
            prev[1..10].copy_from_slice(&interior);
        }
        for i in 0..=10 {
            assert!(
                (field.value(i, 4) - prev[i]).abs() < 1e-4,
                "i={i}: {} vs {}",
                field.value(i, 4),
                prev[i]
            );
        }
    }

    #[test]
    fn error_report_on_shifted_field() {
        let grid = SpaceGrid::new(8).unwrap();
        let mesh = TimeMesh::uniform(1.0, 2).unwrap();
        let mut field = SolutionField::zeros(grid, mesh);
        for k in 0..3 {
            for i in 1..8 {
                field.set(i, k, 1e-3);
            }
        }
        let report = error_report(&field, |_, _| 0.0);
        assert!((report.max_err - 1e-3).abs() < 1e-18);
        let exact_field = error_report(&field, |x, _| {
            if x > 0.0 && x < 1.0 {
                1e-3
            } else {
                0.0
            }
        });
        assert_eq!(exact_field.max_err, 0.0);
        assert_eq!(exact_field.l2_err, 0.0);
    }
}
