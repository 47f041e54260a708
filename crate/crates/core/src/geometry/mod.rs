//! Tube axis, cross-section transformation field and the induced metric.

mod curve;
mod metric;
mod transform;

pub use curve::{frenet_frame, AxisPoint, CurveSpec, Frame, TabulatedCurve, TabulatedSpec};
pub use metric::{
    embed_point, gauge_divergence, gauge_divergence_by_differences, metric_by_differences,
    metric_tensor, MetricEvaluation,
};
pub use transform::{transform_matrix, TransformKind, TransformProfile, SLOW_VARIATION_WARN};
