use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Dirichlet,
    Periodic,
}

/// Uniform grid along the tube axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub length: f64,
    pub points: usize,
    pub bc: Boundary,
}

pub const MIN_POINTS: usize = 64;

impl Grid1D {
    pub fn new(length: f64, points: usize, bc: Boundary) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidGrid(format!("length must be positive, got {length}")));
        }
        if points < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "need at least {MIN_POINTS} points, got {points}"
            )));
        }
        Ok(Grid1D { length, points, bc })
    }

    pub fn spacing(&self) -> f64 {
        match self.bc {
            Boundary::Periodic => self.length / self.points as f64,
            Boundary::Dirichlet => self.length / (self.points + 1) as f64,
        }
    }

    /// Position of site `j`. Dirichlet grids exclude both walls.
    pub fn position(&self, j: usize) -> f64 {
        let h = self.spacing();
        match self.bc {
            Boundary::Periodic => j as f64 * h,
            Boundary::Dirichlet => (j + 1) as f64 * h,
        }
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.position(j)).collect()
    }
}
