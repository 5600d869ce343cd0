//! Conversion between wheel steering angles and single-track axle angles.
//!
//! Kinematic steering: all four wheel normals meet at one instantaneous centre.
//! With front/rear axle angles `δ_f, δ_r` the path curvature at the CoG line is
//! `k = (tan δ_f − tan δ_r) / L`, and a wheel at lateral position `y` (left
//! positive) steers to `tan δ = tan δ_axle / (1 − y k)`. The inverse takes the
//! cotangent mean of each axle, `cot δ_axle = (cot δ_l + cot δ_r)/2`, computed
//! as the harmonic mean of tangents so that straight wheels need no special
//! case.

use crate::params::ParamSet;

/// Curvature magnitude below which the wheel map degenerates to parallel
/// steering [1/m].
pub const STRAIGHT_CURVATURE: f64 = 1e-9;

/// Per-axle geometry needed by the conversion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteeringGeometry {
    pub wheelbase: f64,
    pub s_f: f64,
    pub s_r: f64,
}

impl From<&ParamSet> for SteeringGeometry {
    fn from(p: &ParamSet) -> Self {
        Self {
            wheelbase: p.wheelbase(),
            s_f: p.s_f,
            s_r: p.s_r,
        }
    }
}

fn axle_angle(left: f64, right: f64) -> f64 {
    let (tl, tr) = (left.tan(), right.tan());
    let sum = tl + tr;
    if tl * tr <= 0.0 || sum.abs() < f64::EPSILON {
        // Opposite-sign or zero wheel angles have no common turning centre on
        // this axle; fall back to the plain mean.
        return 0.5 * (left + right);
    }
    (2.0 * tl * tr / sum).atan()
}

/// Wheel angles `(fl, fr, rl, rr)` to single-track axle angles `(δ_f, δ_r)`.
///
/// The cotangent mean does not depend on the geometry; the parameter set is
/// taken for symmetry with [`ackermann_wheels`].
pub fn ackermann_convert(delta: &[f64; 4], _p: &ParamSet) -> (f64, f64) {
    (axle_angle(delta[0], delta[1]), axle_angle(delta[2], delta[3]))
}

/// Axle angles to Ackermann wheel angles `(fl, fr, rl, rr)`.
pub fn ackermann_wheels(delta_f: f64, delta_r: f64, p: &ParamSet) -> [f64; 4] {
    let geo = SteeringGeometry::from(p);
    let (tf, tr) = (delta_f.tan(), delta_r.tan());
    let k = (tf - tr) / geo.wheelbase;
    if k.abs() < STRAIGHT_CURVATURE {
        return [delta_f, delta_f, delta_r, delta_r];
    }
    let wheel = |t: f64, y: f64| (t / (1.0 - y * k)).atan();
    [
        wheel(tf, 0.5 * geo.s_f),
        wheel(tf, -0.5 * geo.s_f),
        wheel(tr, 0.5 * geo.s_r),
        wheel(tr, -0.5 * geo.s_r),
    ]
}
