//! Curves, discrete differential operators, measures, and similarity maps.

mod curve;
mod history;
mod linalg;
mod similarity;

pub use curve::{
    hausdorff_distance, measure_weights, point_segment_distance, resample_by_arclength,
    signed_curvature, Curve, CurvatureSample, Topology, BOUNDARY_COLLAR,
};
pub use history::{FlowHistory, Slice};
pub use linalg::{Mat2, Vec2};
pub use similarity::{apply_similarity, IndexShift, Similarity};
