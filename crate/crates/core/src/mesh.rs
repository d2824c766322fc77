//! Temporal and spatial grids.
//!
//! Time uses the graded mesh t_k = T (k/M)^r that clusters nodes near t = 0
//! where fractional-order solutions have their weak initial layer. Space is
//! the uniform grid x_i = i h on [0, 1].

use crate::error::{Error, Result};

/// Graded partition of [0, T] into M steps.
///
/// Both nodes and steps are stored; weight formulas that need differences of
/// node powers read the nodes directly instead of re-deriving them from
/// accumulated steps.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeMesh {
    pub horizon: f64,
    pub steps_count: usize,
    pub grading: f64,
    nodes: Vec<f64>,
    steps: Vec<f64>,
}

impl TimeMesh {
    /// Build t_k = T (k/M)^r for k = 0..=M.
    pub fn graded(horizon: f64, m: usize, grading: f64) -> Result<Self> {
        if !(horizon > 0.0) {
            return Err(Error::InvalidParameter {
                name: "T",
                value: horizon,
                constraint: "T > 0",
            });
        }
        if m < 1 {
            return Err(Error::InvalidParameter {
                name: "M",
                value: m as f64,
                constraint: "M >= 1",
            });
        }
        if !(grading >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "grading",
                value: grading,
                constraint: "r >= 1",
            });
        }
        let nodes: Vec<f64> = (0..=m)
            .map(|k| horizon * (k as f64 / m as f64).powf(grading))
            .collect();
        let steps: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        debug_assert!(steps.iter().all(|&tau| tau > 0.0));
        Ok(Self {
            horizon,
            steps_count: m,
            grading,
            nodes,
            steps,
        })
    }

    pub fn uniform(horizon: f64, m: usize) -> Result<Self> {
        Self::graded(horizon, m, 1.0)
    }

    /// Node t_k; k in 0..=M.
    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        self.nodes[k]
    }

    /// Step tau_k = t_k - t_{k-1}; k in 1..=M.
    #[inline]
    pub fn step(&self, k: usize) -> f64 {
        self.steps[k - 1]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Number of nodes, M + 1.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Piecewise-linear interpolation of nodal samples at time t.
    pub fn interp_linear(&self, samples: &[f64], t: f64) -> f64 {
        debug_assert_eq!(samples.len(), self.len());
        if t <= self.nodes[0] {
            return samples[0];
        }
        if t >= self.horizon {
            return samples[self.steps_count];
        }
        // nodes are sorted; binary search for the containing panel
        let j = match self
            .nodes
            .binary_search_by(|probe| probe.total_cmp(&t))
        {
            Ok(exact) => return samples[exact],
            Err(ins) => ins, // t in (t_{ins-1}, t_ins)
        };
        let w = (t - self.nodes[j - 1]) / self.steps[j - 1];
        samples[j - 1] * (1.0 - w) + samples[j] * w
    }
}

/// Uniform grid x_i = i / N on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceGrid {
    pub subintervals: usize,
    pub h: f64,
}

impl SpaceGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter {
                name: "N",
                value: n as f64,
                constraint: "N >= 2",
            });
        }
        Ok(Self {
            subintervals: n,
            h: 1.0 / n as f64,
        })
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    /// Number of nodes, N + 1.
    pub fn len(&self) -> usize {
        self.subintervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.subintervals).map(|i| self.node(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_mesh_matches_formula() {
        let mesh = TimeMesh::graded(5.0, 100, 2.0).unwrap();
        assert_eq!(mesh.node(0), 0.0);
        assert_eq!(mesh.node(100), 5.0);
        // t_1 = 5 * (1/100)^2 = 5e-4
        assert!((mesh.node(1) - 5e-4).abs() < 1e-18);
        for k in 1..=100 {
            assert!(mesh.node(k) > mesh.node(k - 1));
            assert!((mesh.step(k) - (mesh.node(k) - mesh.node(k - 1))).abs() < 1e-15);
        }
    }

    #[test]
    fn stronger_grading_concentrates_near_zero() {
        let m1 = TimeMesh::graded(1.0, 50, 1.5).unwrap();
        let m2 = TimeMesh::graded(1.0, 50, 3.0).unwrap();
        assert!(m2.node(1) < m1.node(1));
    }

    #[test]
    fn interpolation_hits_nodes_and_midpoints() {
        let mesh = TimeMesh::graded(2.0, 10, 2.0).unwrap();
        let samples: Vec<f64> = mesh.nodes().iter().map(|&t| 3.0 * t - 1.0).collect();
        // linear data is reproduced exactly everywhere
        for probe in [0.0, 0.013, 0.4, 1.0, 1.77, 2.0] {
            assert!((mesh.interp_linear(&samples, probe) - (3.0 * probe - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(TimeMesh::graded(0.0, 10, 1.0).is_err());
        assert!(TimeMesh::graded(1.0, 0, 1.0).is_err());
        assert!(TimeMesh::graded(1.0, 10, 0.5).is_err());
        assert!(SpaceGrid::new(1).is_err());
    }
}
