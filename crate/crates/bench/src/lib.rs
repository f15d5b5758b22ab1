//! Fixtures shared by the benchmarks.

use elastiscat::{builtin_shape, ElasticMedium, ExactShape, IncidentWave, ShapeKind, WaveKind};
use std::f64::consts::PI;

pub fn medium() -> ElasticMedium {
    ElasticMedium::new(3.88, 2.56, 0.7 * PI).expect("valid constants")
}

pub fn wave() -> IncidentWave {
    IncidentWave::new(WaveKind::S, 5.0 * PI / 8.0)
}

pub fn apple() -> ExactShape {
    builtin_shape(ShapeKind::Apple)
}
