//! Tangential two-level problem: finite-difference eigensolver, fixed-energy
//! propagation, WKB branches and cross-section field reconstruction.

mod discretize;
pub mod eigen;
mod field;
mod grid;
mod propagate;
mod wkb;

use num_complex::Complex64;

pub use discretize::{discretize, eigensolve, DiscreteOperator, MAX_ALPHA_STEP, MIN_POINTS_PER_WAVE};
pub use eigen::{BandedHermitian, Selection, Spectrum};
pub use field::{
    phase_evolution_scan, reconstruct_field, rotation_correlation, CrossSectionField, PhaseJump,
    PhaseScan,
};
pub use grid::{Boundary, Grid1D, MIN_POINTS};
pub use propagate::{flux, propagate, Propagation, TOLERANCE};
pub(crate) use wkb::spinor_or_limit;
pub use wkb::{
    measured_splitting, predicted_splitting, wkb_branch, wkb_diagnostics, wkb_momenta, wkb_spinor, Branch,
    MeasuredSplitting, WkbBranch, WkbDiagnostics, WkbSample,
};

/// Two-component wavefunction sampled along s.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelField {
    pub s: Vec<f64>,
    pub values: Vec<[Complex64; 2]>,
    /// quadrature weights matching `s`
    pub weights: Vec<f64>,
}

impl TwoLevelField {
    /// ∫|φ|² ds.
    pub fn norm(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * (v[0].norm_sqr() + v[1].norm_sqr()))
            .sum()
    }
}
