//! Magic Formula tire forces, slip quantities and vertical wheel loads.
//!
//! All force functions are generic over [`Scalar`] so that the sensitivity
//! system can differentiate straight through them.

use serde::{Deserialize, Serialize};

use crate::dual::Scalar;
use crate::dynamics::GeometryTables;
use crate::error::Violation;
use crate::params::ParamSet;
use crate::state::DtState;

/// Default slip regularisation speed [m/s].
pub const V_EPS: f64 = 0.5;

/// Width of the smooth zero-load clamp [N].
pub const LOAD_CLAMP_WIDTH: f64 = 10.0;

/// Pacejka coefficients B (stiffness), C (shape), D (peak, N), E (curvature).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MagicFormulaCoeffs {
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "E")]
    pub e: f64,
}

impl MagicFormulaCoeffs {
    pub fn to_array(self) -> [f64; 4] {
        [self.b, self.c, self.d, self.e]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self {
            b: a[0],
            c: a[1],
            d: a[2],
            e: a[3],
        }
    }

    pub fn violations(&self, tag: &str) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.b > 0.0) {
            out.push(Violation::new(
                &format!("B_{tag}"),
                self.b,
                "must be strictly positive",
            ));
        }
        if !(self.c > 0.0 && self.c <= 3.0) {
            out.push(Violation::new(&format!("C_{tag}"), self.c, "out of (0,3]"));
        }
        if !(self.d > 0.0) {
            out.push(Violation::new(
                &format!("D_{tag}"),
                self.d,
                "must be strictly positive",
            ));
        }
        if !(self.e <= 1.0) {
            out.push(Violation::new(&format!("E_{tag}"), self.e, "must be <= 1"));
        }
        out
    }

    pub fn lift<T: Scalar>(&self) -> Mf<T> {
        Mf {
            b: T::cst(self.b),
            c: T::cst(self.c),
            d: T::cst(self.d),
            e: T::cst(self.e),
        }
    }
}

/// Magic Formula coefficients in a generic scalar type.
#[derive(Clone, Copy, Debug)]
pub struct Mf<T> {
    pub b: T,
    pub c: T,
    pub d: T,
    pub e: T,
}

/// `mu · load_scale · D · sin(C · atan(Bx − E(Bx − atan Bx))) + S`.
///
/// Friction and load ratio scale the peak; `s` shifts the curve vertically.
pub fn magic_formula<T: Scalar>(slip: T, c: &Mf<T>, mu: T, load_scale: T, s: T) -> T {
    let bx = c.b * slip;
    let inner = bx - c.e * (bx - bx.atan());
    mu * load_scale * c.d * (c.c * inner.atan()).sin() + s
}

/// Slope of [`magic_formula`] at zero slip, offset excluded.
pub fn cornering_stiffness(c: &MagicFormulaCoeffs, mu: f64, load_scale: f64) -> f64 {
    mu * load_scale * c.b * c.c * c.d
}

/// Contact-point velocities in the wheel frame plus spin state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WheelKinematics {
    pub v_x_w: f64,
    pub v_y_w: f64,
    pub omega: f64,
    pub r: f64,
    pub delta: f64,
}

/// C¹ replacement for `max(|v|, v_eps)`: quadratic inside the band.
pub fn slip_denominator<T: Scalar>(v: T, v_eps: f64) -> T {
    if v.re().abs() >= v_eps {
        v.abs()
    } else {
        v * v / (2.0 * v_eps) + 0.5 * v_eps
    }
}

/// `λ = (ω r − v_x)/den`, `α = −atan(v_y/den)`.
pub fn slips<T: Scalar>(v_x_w: T, v_y_w: T, omega: T, r: T, v_eps: f64) -> (T, T) {
    let den = slip_denominator(v_x_w, v_eps);
    let lambda = (omega * r - v_x_w) / den;
    let alpha = -(v_y_w / den).atan();
    (lambda, alpha)
}

pub fn slip_quantities(k: &WheelKinematics, v_eps: f64) -> (f64, f64) {
    slips(k.v_x_w, k.v_y_w, k.omega, k.r, v_eps)
}

/// Stationary load of one wheel: `m g l' / (2 (l_f + l_r))`.
pub fn stationary_load<T: Scalar>(m: T, g: T, l_opposite: T, wheelbase: T) -> T {
    m * g * l_opposite / (wheelbase * 2.0)
}

/// C¹ clamp of a wheel load at zero. Returns the clamped load and whether the
/// clamp (wheel lift) is active.
pub fn clamp_load<T: Scalar>(f: T) -> (T, bool) {
    let w = LOAD_CLAMP_WIDTH;
    let v = f.re();
    if v >= w {
        (f, false)
    } else if v <= -w {
        (T::cst(0.0), true)
    } else {
        let s = f + w;
        (s * s / (4.0 * w), true)
    }
}

/// Vertical wheel loads and wheel-lift flags, wheel order.
///
/// `ΔF = k (p φ + q θ − z_s) + d (p φ̇ + q θ̇ − ż_s)`: lift (`z_s > 0`)
/// extends all springs; roll and pitch compress the wheels on the side their
/// lever arm points to.
pub fn vertical_loads(x: &DtState, p: &ParamSet) -> ([f64; 4], [bool; 4]) {
    let geo = GeometryTables::new(p.l_f, p.l_r, p.s_f, p.s_r);
    let mut loads = [0.0; 4];
    let mut lift = [false; 4];
    for i in 0..4 {
        let (k, d) = if i < 2 { (p.k_f, p.d_f) } else { (p.k_r, p.d_r) };
        let f0 = stationary_load(p.m, p.g, geo.l_opp[i], p.wheelbase());
        let f = f0 + load_delta(&geo, i, k, d, x.z_s, x.z_s_dot, x.phi, x.phi_dot, x.theta, x.theta_dot);
        let (c, flag) = clamp_load(f);
        loads[i] = c;
        lift[i] = flag;
    }
    (loads, lift)
}

#[allow(clippy::too_many_arguments)]
pub fn load_delta<T: Scalar>(
    geo: &GeometryTables<T>,
    i: usize,
    k: T,
    d: T,
    z_s: T,
    z_s_dot: T,
    phi: T,
    phi_dot: T,
    theta: T,
    theta_dot: T,
) -> T {
    let defl = geo.p[i] * phi + geo.q[i] * theta - z_s;
    let rate = geo.p[i] * phi_dot + geo.q[i] * theta_dot - z_s_dot;
    k * defl + d * rate
}
