//! Truncated eigenfunction solver for the forward problem.
//!
//! The Dirichlet Laplacian on (0,1) has eigenpairs λ_k = (πk)²,
//! v_k(x) = √2 sin(kπx). Each Fourier mode u_k(t) solves a scalar fractional
//! Cauchy problem, rewritten as a weakly singular Volterra equation
//!
//!   u_k(t) = φ_k E_{ρ,1}(−ω t^ρ)
//!          + g_k/(1+μλ_k) ∫₀ᵗ r(s) κ(t−s) ds
//!          + λ_k/(1+μλ_k) ∫₀ᵗ (σ_max − σ(s)) u_k(s) κ(t−s) ds,
//!
//! with ω = λ_k σ_max/(1+μλ_k) and κ(η) = η^{ρ−1} E_{ρ,ρ}(−ω η^ρ).
//!
//! # Discretization
//!
//! Product integration against piecewise-linear interpolation of the smooth
//! factor: since κ has the exact primitive W(η) = (1 − E_{ρ,1}(−ω η^ρ))/ω,
//! integration by parts gives, for piecewise-linear f with slopes f′_j,
//!
//!   ∫₀ᵗⁿ f(s) κ(t_n−s) ds = f(0) W(t_n) + Σ_j f′_j ∫_panel W(t_n−s) ds,
//!
//! and ∫ W is exact through the second primitive η E_{ρ,2}(−ω η^ρ). No
//! quadrature error enters beyond the interpolation of f, so the scheme
//! inherits the L1-type order 2−ρ on suitably graded meshes.
//!
//! The u_k-dependent term is resolved by outer Picard sweeps; the kernel has
//! mass ∫₀ᵀ κ < 1/ω · 1, so the sweep map contracts with factor
//! ≤ (σ_max − σ_min)/σ_max < 1.

use crate::error::{Error, Result};
use crate::mesh::{SpaceGrid, TimeMesh};
use crate::problem::{ProblemSpec, ScalarFn, SigmaBounds};
use crate::quad;
use crate::specfun::{ml, MLParams};
use rayon::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

pub const DEFAULT_TRUNCATION: usize = 64;
pub const FOURIER_TOL: f64 = 1e-10;
pub const PICARD_TOL: f64 = 1e-10;
pub const PICARD_MAX_SWEEPS: usize = 200;

/// Eigenpair k of A = −d²/dx² with Dirichlet conditions on (0,1).
pub fn eigensystem(k: usize) -> Result<(f64, ScalarFn)> {
    if k < 1 {
        return Err(Error::IndexOutOfRange {
            index: k,
            constraint: "mode index k >= 1",
        });
    }
    let kf = k as f64;
    let lambda = (PI * kf) * (PI * kf);
    let v: ScalarFn = Arc::new(move |x: f64| std::f64::consts::SQRT_2 * (kf * PI * x).sin());
    Ok((lambda, v))
}

#[inline]
pub fn eigenvalue(k: usize) -> f64 {
    let kf = k as f64;
    (PI * kf) * (PI * kf)
}

/// ⟨f, v_k⟩ = ∫₀¹ f(x) √2 sin(kπx) dx by adaptive quadrature, seeded at the
/// sine zeros.
pub fn fourier_coeff<F: Fn(f64) -> f64>(f: F, k: usize) -> Result<f64> {
    if k < 1 {
        return Err(Error::IndexOutOfRange {
            index: k,
            constraint: "mode index k >= 1",
        });
    }
    let kf = k as f64;
    let splits: Vec<f64> = (1..k).map(|i| i as f64 / kf).collect();
    let r = quad::integrate(
        |x| f(x) * std::f64::consts::SQRT_2 * (kf * PI * x).sin(),
        0.0,
        1.0,
        FOURIER_TOL,
        4000,
        &splits,
    )?;
    Ok(r.value)
}

/// Per-mode product-integration tables on a fixed mesh.
///
/// `e1[n][j]` holds E_{ρ,1}(−ω (t_n−t_j)^ρ) and `g2[n][j]` holds the second
/// primitive (t_n−t_j) E_{ρ,2}(−ω (t_n−t_j)^ρ), both on the triangle
/// 0 ≤ j ≤ n ≤ M. Building the tables is the expensive part (each entry is a
/// Mittag-Leffler evaluation); convolutions against them are O(M²) flops and
/// are reused across Picard sweeps and inverse iterations.
#[derive(Debug, Clone)]
pub struct ModalKernel {
    pub decay_rate: f64,
    m: usize,
    e1: Vec<f64>,
    g2: Vec<f64>,
    row_offsets: Vec<usize>,
    steps: Vec<f64>,
}

impl ModalKernel {
    /// Tables for decay rate ω = λ σ_scale / (1 + μ λ).
    pub fn build(rho: f64, decay_rate: f64, mesh: &TimeMesh) -> Self {
        let m = mesh.steps_count;
        let mut row_offsets = Vec::with_capacity(m + 1);
        let mut total = 0usize;
        for n in 0..=m {
            row_offsets.push(total);
            total += n + 1;
        }
        let p1 = MLParams { rho, beta: 1.0 };
        let p2 = MLParams { rho, beta: 2.0 };

        // rows are independent; fill them in parallel
        let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..=m)
            .into_par_iter()
            .map(|n| {
                let tn = mesh.node(n);
                let mut e1_row = Vec::with_capacity(n + 1);
                let mut g2_row = Vec::with_capacity(n + 1);
                for j in 0..=n {
                    let eta = tn - mesh.node(j);
                    if eta <= 0.0 {
                        e1_row.push(1.0);
                        g2_row.push(0.0);
                    } else {
                        let z = -decay_rate * eta.powf(rho);
                        e1_row.push(ml(p1, z));
                        g2_row.push(eta * ml(p2, z));
                    }
                }
                (e1_row, g2_row)
            })
            .collect();

        let mut e1 = Vec::with_capacity(total);
        let mut g2 = Vec::with_capacity(total);
        for (a, b) in rows {
            e1.extend_from_slice(&a);
            g2.extend_from_slice(&b);
        }
        let steps = (1..=m).map(|k| mesh.step(k)).collect();
        Self {
            decay_rate,
            m,
            e1,
            g2,
            row_offsets,
            steps,
        }
    }

    /// E_{ρ,1}(−ω t_n^ρ), the homogeneous decay factor.
    #[inline]
    pub fn decay(&self, n: usize) -> f64 {
        self.e1[self.row_offsets[n]]
    }

    /// ∫₀^{t_n} f(s) κ(t_n − s) ds for piecewise-linear nodal samples f,
    /// evaluated at every node n = 0..=M.
    pub fn convolve(&self, f: &[f64]) -> Vec<f64> {
        debug_assert_eq!(f.len(), self.m + 1);
        let omega = self.decay_rate;
        let mut out = Vec::with_capacity(self.m + 1);
        out.push(0.0);
        for n in 1..=self.m {
            let off = self.row_offsets[n];
            // f(0) * W(t_n)
            let mut acc = f[0] * (1.0 - self.e1[off]) / omega;
            for j in 1..=n {
                let slope = (f[j] - f[j - 1]) / self.steps[j - 1];
                // ∫ over panel j of W(t_n - s) ds, exact for the kernel
                let panel = (self.steps[j - 1] - (self.g2[off + j - 1] - self.g2[off + j])) / omega;
                acc += slope * panel;
            }
            out.push(acc);
        }
        out
    }
}

/// Solution of one modal Volterra problem plus its inputs.
#[derive(Debug, Clone)]
pub struct ModeSolution {
    pub k: usize,
    pub lambda: f64,
    pub phi_coeff: f64,
    pub g_coeff: f64,
    pub values: Vec<f64>,
    pub picard_sweeps: usize,
}

/// Context reused by every mode on a fixed (spec, mesh): σ samples and
/// bounds, plus the source samples if the spec carries one.
pub struct ModalContext {
    pub mesh: TimeMesh,
    pub bounds: SigmaBounds,
    pub sigma_nodes: Vec<f64>,
    pub r_nodes: Option<Vec<f64>>,
}

impl ModalContext {
    pub fn new(spec: &ProblemSpec, mesh: &TimeMesh) -> Result<Self> {
        spec.validate()?;
        let bounds = spec.sigma_bounds(mesh)?;
        let sigma_nodes = mesh.nodes().iter().map(|&t| (spec.sigma)(t)).collect();
        let r_nodes = spec
            .source_r
            .as_ref()
            .map(|r| mesh.nodes().iter().map(|&t| r(t)).collect());
        Ok(Self {
            mesh: mesh.clone(),
            bounds,
            sigma_nodes,
            r_nodes,
        })
    }
}

/// Solve the modal problem for mode k with explicit source samples.
///
/// This is the entry point the inverse iteration uses: `r_nodes` are the
/// current iterate's nodal values, interpolated piecewise-linearly inside the
/// convolution.
pub fn solve_mode_sampled(
    spec: &ProblemSpec,
    ctx: &ModalContext,
    kernel: &ModalKernel,
    phi_coeff: f64,
    g_coeff: f64,
    k: usize,
    r_nodes: &[f64],
) -> Result<ModeSolution> {
    let mesh = &ctx.mesh;
    if r_nodes.len() != mesh.len() {
        return Err(Error::ShapeMismatch {
            expected: mesh.len(),
            got: r_nodes.len(),
        });
    }
    let lambda = eigenvalue(k);
    let damp = 1.0 + spec.mu * lambda;

    // fixed part: phi-decay + source convolution
    let source_conv = kernel.convolve(r_nodes);
    let mut fixed = Vec::with_capacity(mesh.len());
    for n in 0..mesh.len() {
        fixed.push(phi_coeff * kernel.decay(n) + g_coeff / damp * source_conv[n]);
    }

    // sigma deviation weights (sigma_max - sigma(t_j)) >= 0
    let dev: Vec<f64> = ctx
        .sigma_nodes
        .iter()
        .map(|&s| ctx.bounds.max - s)
        .collect();
    let all_zero_dev = dev.iter().all(|&d| d.abs() < 1e-15);

    let mut u = fixed.clone();
    if all_zero_dev {
        // constant sigma: the fixed part is already the exact solution
        return Ok(ModeSolution {
            k,
            lambda,
            phi_coeff,
            g_coeff,
            values: u,
            picard_sweeps: 0,
        });
    }

    let gain = lambda / damp;
    let mut weighted = vec![0.0; mesh.len()];
    for sweep in 1..=PICARD_MAX_SWEEPS {
        for j in 0..mesh.len() {
            weighted[j] = dev[j] * u[j];
        }
        let conv = kernel.convolve(&weighted);
        let mut diff: f64 = 0.0;
        for n in 0..mesh.len() {
            let next = fixed[n] + gain * conv[n];
            diff = diff.max((next - u[n]).abs());
            u[n] = next;
        }
        if diff < PICARD_TOL {
            return Ok(ModeSolution {
                k,
                lambda,
                phi_coeff,
                g_coeff,
                values: u,
                picard_sweeps: sweep,
            });
        }
    }
    Err(Error::PicardDiverged {
        sweeps: PICARD_MAX_SWEEPS,
        residual: f64::NAN,
    })
}

/// Solve mode k of the forward problem (source taken from the spec).
pub fn solve_mode(spec: &ProblemSpec, k: usize, mesh: &TimeMesh) -> Result<ModeSolution> {
    let ctx = ModalContext::new(spec, mesh)?;
    let r_nodes = ctx.r_nodes.clone().ok_or_else(|| {
        Error::Domain("forward modal solve requires a source factor r(t)".into())
    })?;
    let kernel = ModalKernel::build(
        spec.rho,
        eigenvalue(k) * ctx.bounds.max / (1.0 + spec.mu * eigenvalue(k)),
        mesh,
    );
    let phi_coeff = fourier_coeff(|x| (spec.phi)(x), k)?;
    let g_coeff = fourier_coeff(|x| (spec.g)(x), k)?;
    solve_mode_sampled(spec, &ctx, &kernel, phi_coeff, g_coeff, k, &r_nodes)
}

/// Nodal upper bounds |φ_k| E_{ρ,1}(−λ σ_min t^ρ/(1+μλ)) +
/// |g_k|/(1+μλ) ∫ |r| κ_min, the a-priori modal estimate.
pub fn modal_estimate_bound(spec: &ProblemSpec, k: usize, mesh: &TimeMesh) -> Result<Vec<f64>> {
    let ctx = ModalContext::new(spec, mesh)?;
    let r_nodes = ctx
        .r_nodes
        .clone()
        .ok_or_else(|| Error::Domain("modal estimate requires a source factor r(t)".into()))?;
    let phi_coeff = fourier_coeff(|x| (spec.phi)(x), k)?;
    let g_coeff = fourier_coeff(|x| (spec.g)(x), k)?;
    let lambda = eigenvalue(k);
    let damp = 1.0 + spec.mu * lambda;
    let kernel_min = ModalKernel::build(spec.rho, lambda * ctx.bounds.min / damp, mesh);
    let abs_r: Vec<f64> = r_nodes.iter().map(|v| v.abs()).collect();
    let conv = kernel_min.convolve(&abs_r);
    Ok((0..mesh.len())
        .map(|n| phi_coeff.abs() * kernel_min.decay(n) + g_coeff.abs() / damp * conv[n])
        .collect())
}

/// Truncated eigenexpansion: coefficients and solved modes 1..=K.
#[derive(Debug, Clone)]
pub struct ModalSet {
    pub truncation: usize,
    pub lambdas: Vec<f64>,
    pub phi_coeffs: Vec<f64>,
    pub g_coeffs: Vec<f64>,
    pub mode_solutions: Vec<Vec<f64>>,
    pub mesh: TimeMesh,
    /// Per-mode bound |φ_K| + |g_K| sup|r| / (λ_K σ_min) at the truncation
    /// index, a cheap estimate of what the first omitted mode could carry.
    pub truncation_tail_hint: f64,
}

/// Solve modes 1..=K in parallel (they are independent).
pub fn solve_modes(spec: &ProblemSpec, mesh: &TimeMesh, truncation: usize) -> Result<ModalSet> {
    let ctx = ModalContext::new(spec, mesh)?;
    let r_nodes = ctx.r_nodes.clone().ok_or_else(|| {
        Error::Domain("forward modal solve requires a source factor r(t)".into())
    })?;
    let modes: Vec<Result<ModeSolution>> = (1..=truncation)
        .into_par_iter()
        .map(|k| {
            let lambda = eigenvalue(k);
            let kernel = ModalKernel::build(
                spec.rho,
                lambda * ctx.bounds.max / (1.0 + spec.mu * lambda),
                mesh,
            );
            let phi_coeff = fourier_coeff(|x| (spec.phi)(x), k)?;
            let g_coeff = fourier_coeff(|x| (spec.g)(x), k)?;
            solve_mode_sampled(spec, &ctx, &kernel, phi_coeff, g_coeff, k, &r_nodes)
        })
        .collect();

    let mut lambdas = Vec::with_capacity(truncation);
    let mut phi_coeffs = Vec::with_capacity(truncation);
    let mut g_coeffs = Vec::with_capacity(truncation);
    let mut mode_solutions = Vec::with_capacity(truncation);
    for m in modes {
        let m = m?;
        lambdas.push(m.lambda);
        phi_coeffs.push(m.phi_coeff);
        g_coeffs.push(m.g_coeff);
        mode_solutions.push(m.values);
    }
    let sup_r = r_nodes.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let kk = truncation - 1;
    let truncation_tail_hint =
        phi_coeffs[kk].abs() + g_coeffs[kk].abs() * sup_r / (lambdas[kk] * ctx.bounds.min);
    Ok(ModalSet {
        truncation,
        lambdas,
        phi_coeffs,
        g_coeffs,
        mode_solutions,
        mesh: mesh.clone(),
        truncation_tail_hint,
    })
}

/// u(x_i, t_j) = Σ_k u_k(t_j) √2 sin(kπ x_i); boundary columns exactly zero.
pub fn assemble(modes: &ModalSet, space: &SpaceGrid) -> crate::problem::SolutionField {
    let mut field = crate::problem::SolutionField::zeros(space.clone(), modes.mesh.clone());
    let n = space.subintervals;
    let m = modes.mesh.steps_count;
    let sqrt2 = std::f64::consts::SQRT_2;
    for j in 0..=m {
        for i in 1..n {
            let x = space.node(i);
            let mut acc = 0.0;
            for (kidx, uk) in modes.mode_solutions.iter().enumerate() {
                let kf = (kidx + 1) as f64;
                acc += uk[j] * sqrt2 * (kf * PI * x).sin();
            }
            field.set(i, j, acc);
        }
        // Dirichlet ends: exactly zero, not sin(k pi) round-off
        field.set(0, j, 0.0);
        field.set(n, j, 0.0);
        // boundary derivatives from the differentiated series
        let mut dl = 0.0;
        let mut dr = 0.0;
        for (kidx, uk) in modes.mode_solutions.iter().enumerate() {
            let kf = (kidx + 1) as f64;
            dl += uk[j] * sqrt2 * kf * PI;
            dr += uk[j] * sqrt2 * kf * PI * if (kidx + 1) % 2 == 0 { 1.0 } else { -1.0 };
        }
        field.flux_left[j] = dl;
        field.flux_right[j] = dr;
    }
    field
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::ml;

    fn sqrt2() -> f64 {
        std::f64::consts::SQRT_2
    }

    #[test]
    fn eigensystem_values() {
        let (l1, v1) = eigensystem(1).unwrap();
        assert!((l1 - PI * PI).abs() < 1e-12);
        assert!((v1(0.5) - sqrt2()).abs() < 1e-14);
        let (l2, v2) = eigensystem(2).unwrap();
        assert!((l2 - 4.0 * PI * PI).abs() < 1e-12);
        assert!(v2(0.5).abs() < 1e-14);
        assert!(eigensystem(0).is_err());
    }

    #[test]
    fn eigenfunctions_are_orthonormal() {
        for k in [1usize, 2, 3, 7] {
            for j in [1usize, 2, 3, 7] {
                let (_, vk) = eigensystem(k).unwrap();
                let (_, vj) = eigensystem(j).unwrap();
                let ip = quad::integrate(|x| vk(x) * vj(x), 0.0, 1.0, 1e-12, 4000, &[])
                    .unwrap()
                    .value;
                let expected = if k == j { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-10, "({k},{j}) -> {ip}");
            }
        }
    }

    #[test]
    fn fourier_coeff_orthogonality() {
        let f = |x: f64| sqrt2() * (PI * x).sin();
        assert!((fourier_coeff(f, 1).unwrap() - 1.0).abs() < 1e-10);
        assert!(fourier_coeff(f, 2).unwrap().abs() < 1e-10);
        // g of the worked example projects onto mode 1 with weight 1+pi^2
        let g = |x: f64| sqrt2() * (1.0 + PI * PI) * (PI * x).sin();
        assert!((fourier_coeff(g, 1).unwrap() - (1.0 + PI * PI)).abs() < 1e-9);
    }

    #[test]
    fn kernel_mass_matches_primitive() {
        // convolve(1) at t_n must equal W(t_n) = (1 - E_{rho,1}(-w t^rho))/w
        let mesh = TimeMesh::graded(2.0, 40, 2.0).unwrap();
        let rho = 0.5;
        let omega = 3.0;
        let kernel = ModalKernel::build(rho, omega, &mesh);
        let ones = vec![1.0; mesh.len()];
        let conv = kernel.convolve(&ones);
        for n in [1usize, 5, 17, 40] {
            let t = mesh.node(n);
            let exact =
                (1.0 - ml(MLParams { rho, beta: 1.0 }, -omega * t.powf(rho))) / omega;
            assert!(
                (conv[n] - exact).abs() < 1e-12,
                "n={n}: {} vs {exact}",
                conv[n]
            );
        }
    }

    fn constant_sigma_spec(sigma0: f64) -> ProblemSpec {
        ProblemSpec {
            rho: 0.5,
            mu: 1.0,
            horizon: 1.0,
            sigma: Arc::new(move |_| sigma0),
            source_r: Some(Arc::new(|_| 0.0)),
            phi: Arc::new(|x: f64| sqrt2() * (PI * x).sin()),
            g: Arc::new(|x: f64| sqrt2() * (PI * x).sin()),
        }
    }

    #[test]
    fn constant_sigma_zero_source_is_pure_decay() {
        let spec = constant_sigma_spec(2.0);
        let mesh = TimeMesh::graded(1.0, 32, 2.0).unwrap();
        for k in [1usize, 2, 5] {
            let sol = solve_mode(&spec, k, &mesh).unwrap();
            let lambda = eigenvalue(k);
            let omega = lambda * 2.0 / (1.0 + lambda);
            let phi_k = if k == 1 { 1.0 } else { 0.0 };
            for (n, &t) in mesh.nodes().iter().enumerate() {
                let exact = phi_k
                    * ml(
                        MLParams {
                            rho: 0.5,
                            beta: 1.0,
                        },
                        -omega * t.powf(0.5),
                    );
                assert!(
                    (sol.values[n] - exact).abs() < 1e-10,
                    "k={k} n={n}: {} vs {exact}",
                    sol.values[n]
                );
            }
            assert_eq!(sol.picard_sweeps, 0);
        }
    }

    #[test]
    fn monotone_damping_without_source() {
        for sigma in [1.0f64, 3.5] {
            let mut spec = constant_sigma_spec(sigma);
            spec.sigma = Arc::new(move |t: f64| sigma + 0.5 * (1.0 + (3.0 * t).sin()));
            let mesh = TimeMesh::graded(1.0, 48, 2.0).unwrap();
            let sol = solve_mode(&spec, 1, &mesh).unwrap();
            for n in 1..mesh.len() {
                assert!(
                    sol.values[n] <= sol.values[n - 1] + 1e-12,
                    "decay violated at n={n}"
                );
            }
        }
    }

    #[test]
    fn estimate_bound_is_tight_for_constant_sigma() {
        // with sigma constant and r = 0 the bound equals |u_k| exactly
        let spec = constant_sigma_spec(2.0);
        let mesh = TimeMesh::graded(1.0, 16, 2.0).unwrap();
        let sol = solve_mode(&spec, 1, &mesh).unwrap();
        let bound = modal_estimate_bound(&spec, 1, &mesh).unwrap();
        for n in 0..mesh.len() {
            assert!((bound[n] - sol.values[n].abs()).abs() < 1e-10);
        }
    }

    #[test]
    fn assemble_zero_modes_gives_zero_field() {
        let mesh = TimeMesh::uniform(1.0, 4).unwrap();
        let set = ModalSet {
            truncation: 2,
            lambdas: vec![eigenvalue(1), eigenvalue(2)],
            phi_coeffs: vec![0.0, 0.0],
            g_coeffs: vec![0.0, 0.0],
            mode_solutions: vec![vec![0.0; mesh.len()], vec![0.0; mesh.len()]],
            mesh: mesh.clone(),
            truncation_tail_hint: 0.0,
        };
        let field = assemble(&set, &SpaceGrid::new(8).unwrap());
        for k in 0..mesh.len() {
            assert!(field.row(k).iter().all(|&v| v == 0.0));
        }
    }
}
