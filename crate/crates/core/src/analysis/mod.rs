//! Verification tools: sampling criteria, analytic resolution and PSF,
//! the brute-force backprojection oracle and image-quality metrics.

mod backproject;
mod metrics;
mod psf;
mod sampling;

pub use backproject::{backproject, GridSpec};
pub use metrics::{mainlobe_width, peak_metrics, resolution_guard, PeakMetrics, PointMetric};
pub use psf::{bessel_j1, psf_analytic, resolution_radial, resolution_vertical};
pub use sampling::{check_sampling, Criterion, SamplingReport};
