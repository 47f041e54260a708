//! Config-driven batch runs: JSON config in, CSV/JSON tables and a
//! `summary.json` out.

mod config;
mod run;
mod table;

pub use config::{
    parse_config, Conventions, EnergyKeyword, EnergySpec, Format, GridConfig, ModesConfig, OutputConfig,
    ProfileConfig, QgtConfig, RunConfig, WkbConfig, DELTA_MAX, DELTA_WARN,
};
pub use run::{geometry_check, geometry_samples, run, with_dir, Command, RunReport, GEOMETRY_SAMPLES};
pub use table::{emit_table, Cell, ResultTable};

use crate::error::Error;

/// Exit status for a failed run; 2 is left to the argument parser.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Config(_) => 3,
        Error::Io { .. } => 4,
        Error::FrameUndefined { .. }
        | Error::CoordinateBreakdown { .. }
        | Error::SingularTransform { .. }
        | Error::InvalidCurve(_)
        | Error::InvalidFunction(_) => 5,
        Error::InvalidMode(_)
        | Error::NondegenerateSubspace { .. }
        | Error::InvalidGrid(_)
        | Error::InvalidInput(_)
        | Error::Unsupported(_) => 6,
        Error::Resolution(_) | Error::NotHermitian { .. } | Error::Eigen(_) | Error::Integration { .. } => 7,
        Error::TurningPoint { .. } | Error::DegenerateSpinor { .. } | Error::DegenerateAngle { .. } => 8,
        Error::CheckFailed(_) => 9,
    }
}
