//! Triangulations, metric meshes, and triangle comparison estimates.

pub mod comparison;
mod metric;
mod triangulation;

pub use comparison::{
    angle_perturbation_bound, map_distortion_bound, singular_values_of_map,
    spherical_euclidean_angle_gap, AngleGapReport, AnglePerturbationReport, MapDistortionReport,
};
pub use metric::{check_admissible, corner_angles, triangle_angles, CornerAngles, Flavor, MetricMesh};
pub use triangulation::{Corner, Topology, Triangulation};
