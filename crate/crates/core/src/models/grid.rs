use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::HermitianOperator;

/// Position grid for one particle: `n_points` equally spaced points from
/// `q_min` to `q_max` inclusive, hard walls just outside the ends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvGrid {
    pub q_min: f64,
    pub q_max: f64,
    pub n_points: usize,
    #[serde(default = "unit_mass")]
    pub mass: f64,
}

fn unit_mass() -> f64 {
    1.0
}

impl EnvGrid {
    pub fn new(q_min: f64, q_max: f64, n_points: usize, mass: f64) -> Result<Self> {
        let g = Self {
            q_min,
            q_max,
            n_points,
            mass,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q_min.is_finite() && self.q_max.is_finite() && self.q_max > self.q_min) {
            return Err(Error::InvalidGrid(format!(
                "need finite q_max > q_min, got [{}, {}]",
                self.q_min, self.q_max
            )));
        }
        if self.n_points < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 points, got {}",
                self.n_points
            )));
        }
        // infinite mass is allowed and switches the kinetic term off
        if !(self.mass > 0.0) {
            return Err(Error::InvalidGrid(format!("mass must be positive, got {}", self.mass)));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.q_max - self.q_min) / (self.n_points - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let dq = self.spacing();
        (0..self.n_points)
            .map(|j| {
                if j + 1 == self.n_points {
                    self.q_max
                } else {
                    self.q_min + j as f64 * dq
                }
            })
            .collect()
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.q_min + self.q_max)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.q_max - self.q_min)
    }

    /// Same grid translated by `delta`.
    pub fn shifted(&self, delta: f64) -> Self {
        Self {
            q_min: self.q_min + delta,
            q_max: self.q_max + delta,
            ..*self
        }
    }

    /// Box scaled about its center by `factor`, with `n_points` points.
    pub fn rescaled(&self, factor: f64, n_points: usize) -> Self {
        let c = self.center();
        let h = self.half_width() * factor;
        Self {
            q_min: c - h,
            q_max: c + h,
            n_points,
            mass: self.mass,
        }
    }

    /// Kinetic stencil `(diagonal, off-diagonal)` of `P^2/2M` with Dirichlet
    /// walls: `1/(M dq^2)` and `-1/(2 M dq^2)`.
    pub fn kinetic_stencil(&self) -> (f64, f64) {
        let dq = self.spacing();
        let d = 1.0 / (self.mass * dq * dq);
        (d, -0.5 * d)
    }
}

/// Position operator `Q` and kinetic operator `K = P^2/2M` on the grid.
pub fn build_grid_operators(grid: &EnvGrid) -> Result<(HermitianOperator, HermitianOperator)> {
    grid.validate()?;
    let q = HermitianOperator::diag(&grid.points());
    let n = grid.n_points;
    let (d, o) = grid.kinetic_stencil();
    let k = Mat::from_fn(n, n, |i, j| {
        if i == j {
            d
        } else if i.abs_diff(j) == 1 {
            o
        } else {
            0.0
        }
    });
    Ok((q, HermitianOperator::from_real(k)?))
}
