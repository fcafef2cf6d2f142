//! Heights of rational and Gaussian points under L^p metrics on O(1).
//!
//! The logarithmic height of a primitive tuple is h = log ‖x‖_p, and scaling
//! the metric weight by a constant λ shifts the height by λ/2. Both the
//! logarithmic height h and the exponential height H = e^h are reported; for
//! the sup metric on primitive integer coordinates H = max|x_i|.

use serde::Serialize;

use crate::core::{lp_norm, rational_to_f64, GaussianPoint, MetricSpec, RationalPoint};
use num::rational::BigRational;

/// Height of a point, in both logarithmic and exponential form.
#[derive(Debug, Clone, Serialize)]
pub struct PointHeight {
    /// Logarithmic height (natural log).
    pub h: f64,
    /// Exponential height, H = e^h.
    pub big_h: f64,
}

impl PointHeight {
    fn from_log(h: f64) -> Self {
        PointHeight { h, big_h: h.exp() }
    }
}

/// Height of a normalized rational point: h = log ‖x‖_p + λ/2.
pub fn point_height(x: &RationalPoint, metric: &MetricSpec) -> PointHeight {
    let mags: Vec<f64> = x
        .coords()
        .iter()
        .map(|c| rational_to_f64(&BigRational::from(c.clone())).abs())
        .collect();
    PointHeight::from_log(lp_norm(&mags, metric.p.p()).ln() + metric.shift / 2.0)
}

/// Height of a normalized Gaussian point. The two complex embeddings are
/// conjugate, so the Galois average collapses to the same norm of the moduli.
pub fn gaussian_height(x: &GaussianPoint, metric: &MetricSpec) -> PointHeight {
    let mags: Vec<f64> = x.coords().iter().map(|c| c.modulus()).collect();
    PointHeight::from_log(lp_norm(&mags, metric.p.p()).ln() + metric.shift / 2.0)
}

/// Returns (h_{φ+λ}(x), h_φ(x) + λ/2); the scaling law says they agree.
pub fn height_shift_check(x: &RationalPoint, metric: &MetricSpec, lambda: f64) -> (f64, f64) {
    let shifted = MetricSpec { shift: metric.shift + lambda, ..metric.clone() };
    (point_height(x, &shifted).h, point_height(x, metric).h + lambda / 2.0)
}
