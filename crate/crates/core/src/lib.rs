pub mod cli;
pub mod connections;
pub mod error;
pub mod fields;
pub mod frames;
pub mod metrics;
pub mod quadrature;
pub mod residual;
pub mod scenarios;

pub use error::{GeometryError, Result};
pub use fields::{DifferentiationConfig, Point, ScalarField};
pub use metrics::{DiagonalMetric, MetricField};
pub use residual::Residual;
pub use connections::{ChristoffelField, Curve};
