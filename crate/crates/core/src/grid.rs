//! Uniform 1D mesh on [0, 2*pi] with quadrature weights.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Boundary treatment of the discrete operators built on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    /// Stencils wrap around; the last and first node are neighbours.
    Periodic,
    /// One-sided closures at both ends; no boundary values imposed, so the
    /// variational forms see natural boundary conditions.
    Free,
}

/// Default domain length.
pub const DOMAIN_LENGTH: f64 = 2.0 * PI;

/// Smallest admissible point count.
pub const MIN_POINTS: usize = 8;

/// Uniform mesh with trapezoid (free) or uniform (periodic) quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n: usize,
    length: f64,
    spacing: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    bc: BoundaryCondition,
}

impl Grid {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    /// Trapezoid/uniform quadrature of nodal values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    /// Number of staggered midpoints used by first-derivative quadratic forms:
    /// n for periodic grids (the wrap interval counts), n-1 for free ends.
    pub fn midpoint_count(&self) -> usize {
        match self.bc {
            BoundaryCondition::Periodic => self.n,
            BoundaryCondition::Free => self.n - 1,
        }
    }
}

/// Build a uniform grid on [0, 2*pi].
///
/// Periodic grids place n points with spacing 2*pi/n and uniform weights;
/// free grids place n points including both ends with spacing 2*pi/(n-1)
/// and trapezoid weights.
pub fn build_grid(n: usize, bc: BoundaryCondition) -> Result<Grid> {
    build_grid_with_length(n, bc, DOMAIN_LENGTH)
}

pub fn build_grid_with_length(n: usize, bc: BoundaryCondition, length: f64) -> Result<Grid> {
    if n < MIN_POINTS {
        return Err(Error::GridSize { n, min: MIN_POINTS });
    }
    let spacing = match bc {
        BoundaryCondition::Periodic => length / n as f64,
        BoundaryCondition::Free => length / (n - 1) as f64,
    };
    let nodes: Vec<f64> = (0..n).map(|i| i as f64 * spacing).collect();
    let weights = match bc {
        BoundaryCondition::Periodic => vec![spacing; n],
        BoundaryCondition::Free => {
            let mut w = vec![spacing; n];
            w[0] = 0.5 * spacing;
            w[n - 1] = 0.5 * spacing;
            w
        }
    };
    Ok(Grid {
        n,
        length,
        spacing,
        nodes,
        weights,
        bc,
    })
}
