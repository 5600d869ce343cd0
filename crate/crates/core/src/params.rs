//! Physical parameter sets and their flat parameter-vector layout.
//!
//! The double-track parameter vector `c` has [`DT_PARAM_COUNT`] entries in the
//! order of [`DT_PARAM_NAMES`]; sensitivity column `k` always refers to entry
//! `k` of that list. Groups are body, inertia, wheel inertia, radius,
//! suspension, friction, Magic Formula and offsets. Within the per-wheel
//! groups the order is fixed by [`Wheel::ALL`].

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Violation};
use crate::tire::MagicFormulaCoeffs;

/// Wheel positions in their fixed storage order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Wheel {
    FrontLeft,
    FrontRight,
    RearLeft,
    RearRight,
}

impl Wheel {
    pub const ALL: [Wheel; 4] = [
        Wheel::FrontLeft,
        Wheel::FrontRight,
        Wheel::RearLeft,
        Wheel::RearRight,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn suffix(self) -> &'static str {
        ["fl", "fr", "rl", "rr"][self.index()]
    }

    pub fn is_front(self) -> bool {
        matches!(self, Wheel::FrontLeft | Wheel::FrontRight)
    }

    pub fn is_left(self) -> bool {
        matches!(self, Wheel::FrontLeft | Wheel::RearLeft)
    }

    /// Same axle, other side.
    pub fn mirrored(self) -> Wheel {
        match self {
            Wheel::FrontLeft => Wheel::FrontRight,
            Wheel::FrontRight => Wheel::FrontLeft,
            Wheel::RearLeft => Wheel::RearRight,
            Wheel::RearRight => Wheel::RearLeft,
        }
    }
}

impl fmt::Display for Wheel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.suffix())
    }
}

pub const DT_PARAM_COUNT: usize = 35;

pub const DT_PARAM_NAMES: [&str; DT_PARAM_COUNT] = [
    "m", "g", "h", "l_f", "l_r", "s_f", "s_r", //
    "J_x", "J_y", "J_z", //
    "J_w_fl", "J_w_fr", "J_w_rl", "J_w_rr", //
    "r_fl", "r_fr", "r_rl", "r_rr", //
    "k_f", "k_r", "d_f", "d_r", //
    "mu", //
    "B_lat", "C_lat", "D_lat", "E_lat", "B_lon", "C_lon", "D_lon", "E_lon", //
    "S_fl", "S_fr", "S_rl", "S_rr",
];

/// Offsets of the parameter groups inside the flat vector.
pub mod idx {
    pub const M: usize = 0;
    pub const G: usize = 1;
    pub const H: usize = 2;
    pub const L_F: usize = 3;
    pub const L_R: usize = 4;
    pub const S_F: usize = 5;
    pub const S_R: usize = 6;
    pub const J_X: usize = 7;
    pub const J_Y: usize = 8;
    pub const J_Z: usize = 9;
    pub const J_W: usize = 10;
    pub const R: usize = 14;
    pub const K_F: usize = 18;
    pub const K_R: usize = 19;
    pub const D_F: usize = 20;
    pub const D_R: usize = 21;
    pub const MU: usize = 22;
    pub const TIRE_LAT: usize = 23;
    pub const TIRE_LON: usize = 27;
    pub const S: usize = 31;
}

/// Full physical parameter set of the double-track model. Fields missing
/// from a deserialized table take their reference values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default = "ParamSet::reference")]
pub struct ParamSet {
    /// Vehicle mass [kg].
    pub m: f64,
    /// Gravitational acceleration [m/s²].
    pub g: f64,
    /// CoG height above ground [m].
    pub h: f64,
    /// CoG to front axle [m].
    pub l_f: f64,
    /// CoG to rear axle [m].
    pub l_r: f64,
    /// Front track width [m].
    pub s_f: f64,
    /// Rear track width [m].
    pub s_r: f64,
    /// Roll inertia [kg·m²].
    #[serde(rename = "J_x")]
    pub j_x: f64,
    /// Pitch inertia [kg·m²].
    #[serde(rename = "J_y")]
    pub j_y: f64,
    /// Yaw inertia [kg·m²].
    #[serde(rename = "J_z")]
    pub j_z: f64,
    /// Wheel spin inertias [kg·m²], wheel order.
    #[serde(rename = "J_w")]
    pub j_w: [f64; 4],
    /// Wheel radii [m], wheel order.
    pub r: [f64; 4],
    /// Suspension stiffness per wheel, front/rear [N/m].
    pub k_f: f64,
    pub k_r: f64,
    /// Suspension damping per wheel, front/rear [N·s/m].
    pub d_f: f64,
    pub d_r: f64,
    /// Road–tire friction coefficient [-].
    pub mu: f64,
    pub tire_lat: MagicFormulaCoeffs,
    pub tire_lon: MagicFormulaCoeffs,
    /// Lateral force offsets [N], wheel order.
    #[serde(rename = "S")]
    pub s: [f64; 4],
}

impl ParamSet {
    /// Shipped reference vehicle: a 1.6 t compact car with understeering
    /// axle layout (l_f < l_r, equal per-wheel tires).
    pub fn reference() -> Self {
        Self {
            m: 1600.0,
            g: 9.81,
            h: 0.55,
            l_f: 1.2,
            l_r: 1.8,
            s_f: 1.6,
            s_r: 1.6,
            j_x: 550.0,
            j_y: 2200.0,
            j_z: 2500.0,
            j_w: [1.2; 4],
            r: [0.31; 4],
            k_f: 35_000.0,
            k_r: 35_000.0,
            d_f: 3_500.0,
            d_r: 3_500.0,
            mu: 1.0,
            tire_lat: MagicFormulaCoeffs {
                b: 10.0,
                c: 1.3,
                d: 4000.0,
                e: 0.1,
            },
            tire_lon: MagicFormulaCoeffs {
                b: 12.0,
                c: 1.65,
                d: 4200.0,
                e: 0.1,
            },
            s: [0.0; 4],
        }
    }

    pub fn wheelbase(&self) -> f64 {
        self.l_f + self.l_r
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut c = Vec::with_capacity(DT_PARAM_COUNT);
        c.extend_from_slice(&[
            self.m, self.g, self.h, self.l_f, self.l_r, self.s_f, self.s_r,
        ]);
        c.extend_from_slice(&[self.j_x, self.j_y, self.j_z]);
        c.extend_from_slice(&self.j_w);
        c.extend_from_slice(&self.r);
        c.extend_from_slice(&[self.k_f, self.k_r, self.d_f, self.d_r]);
        c.push(self.mu);
        c.extend_from_slice(&self.tire_lat.to_array());
        c.extend_from_slice(&self.tire_lon.to_array());
        c.extend_from_slice(&self.s);
        debug_assert_eq!(c.len(), DT_PARAM_COUNT);
        c
    }

    pub fn unflatten(c: &[f64]) -> Result<Self, Error> {
        if c.len() != DT_PARAM_COUNT {
            return Err(Error::Dimension {
                what: "double-track parameter vector",
                expected: DT_PARAM_COUNT,
                got: c.len(),
            });
        }
        let four = |at: usize| [c[at], c[at + 1], c[at + 2], c[at + 3]];
        Ok(Self {
            m: c[idx::M],
            g: c[idx::G],
            h: c[idx::H],
            l_f: c[idx::L_F],
            l_r: c[idx::L_R],
            s_f: c[idx::S_F],
            s_r: c[idx::S_R],
            j_x: c[idx::J_X],
            j_y: c[idx::J_Y],
            j_z: c[idx::J_Z],
            j_w: four(idx::J_W),
            r: four(idx::R),
            k_f: c[idx::K_F],
            k_r: c[idx::K_R],
            d_f: c[idx::D_F],
            d_r: c[idx::D_R],
            mu: c[idx::MU],
            tire_lat: MagicFormulaCoeffs::from_array(four(idx::TIRE_LAT)),
            tire_lon: MagicFormulaCoeffs::from_array(four(idx::TIRE_LON)),
            s: four(idx::S),
        })
    }

    /// Collects every violated invariant instead of stopping at the first.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let c = self.flatten();
        for (k, name) in DT_PARAM_NAMES.iter().enumerate() {
            let v = c[k];
            if !v.is_finite() {
                out.push(Violation::new(name, v, "must be finite"));
            }
        }
        let positive = [
            ("m", self.m),
            ("g", self.g),
            ("h", self.h),
            ("l_f", self.l_f),
            ("l_r", self.l_r),
            ("s_f", self.s_f),
            ("s_r", self.s_r),
            ("J_x", self.j_x),
            ("J_y", self.j_y),
            ("J_z", self.j_z),
            ("k_f", self.k_f),
            ("k_r", self.k_r),
            ("d_f", self.d_f),
            ("d_r", self.d_r),
        ];
        for (name, v) in positive {
            if v.is_finite() && v <= 0.0 {
                out.push(Violation::new(name, v, "must be strictly positive"));
            }
        }
        for w in Wheel::ALL {
            let i = w.index();
            if self.j_w[i].is_finite() && self.j_w[i] <= 0.0 {
                out.push(Violation::new(
                    &format!("J_w_{w}"),
                    self.j_w[i],
                    "must be strictly positive",
                ));
            }
            if self.r[i].is_finite() && self.r[i] <= 0.0 {
                out.push(Violation::new(
                    &format!("r_{w}"),
                    self.r[i],
                    "must be strictly positive",
                ));
            }
        }
        if self.mu.is_finite() && !(self.mu > 0.0 && self.mu <= 2.0) {
            out.push(Violation::new("mu", self.mu, "out of (0,2]"));
        }
        out.extend(self.tire_lat.violations("lat"));
        out.extend(self.tire_lon.violations("lon"));
        out
    }

    pub fn validate(self) -> Result<ValidatedParams, Error> {
        let v = self.violations();
        if v.is_empty() {
            Ok(ValidatedParams(self))
        } else {
            Err(Error::InvalidParams(v))
        }
    }
}

impl Default for ParamSet {
    fn default() -> Self {
        Self::reference()
    }
}

/// Free-function form of [`ParamSet::validate`].
pub fn validate_params(p: ParamSet) -> Result<ValidatedParams, Error> {
    p.validate()
}

/// A [`ParamSet`] that passed [`ParamSet::validate`].
#[derive(Clone, Debug, PartialEq)]
pub struct ValidatedParams(ParamSet);

impl ValidatedParams {
    pub fn reference() -> Self {
        Self(ParamSet::reference())
    }

    pub fn into_inner(self) -> ParamSet {
        self.0
    }
}

impl Deref for ValidatedParams {
    type Target = ParamSet;
    fn deref(&self) -> &ParamSet {
        &self.0
    }
}

pub const ST_PARAM_COUNT: usize = 7;
pub const ST_PARAM_NAMES: [&str; ST_PARAM_COUNT] =
    ["m", "J_z", "l_f", "l_r", "c_alpha_f", "c_alpha_r", "v"];

/// Lowest speed at which the linear single-track model is evaluated [m/s].
pub const V_MIN: f64 = 1.0;

/// Parameters of the linear single-track model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StParams {
    pub m: f64,
    #[serde(rename = "J_z")]
    pub j_z: f64,
    pub l_f: f64,
    pub l_r: f64,
    /// Front axle cornering stiffness [N/rad].
    pub c_alpha_f: f64,
    /// Rear axle cornering stiffness [N/rad].
    pub c_alpha_r: f64,
    /// Longitudinal speed, treated as a parameter [m/s].
    pub v: f64,
}

impl StParams {
    pub fn flatten(&self) -> [f64; ST_PARAM_COUNT] {
        [
            self.m,
            self.j_z,
            self.l_f,
            self.l_r,
            self.c_alpha_f,
            self.c_alpha_r,
            self.v,
        ]
    }

    pub fn unflatten(c: &[f64]) -> Result<Self, Error> {
        if c.len() != ST_PARAM_COUNT {
            return Err(Error::Dimension {
                what: "single-track parameter vector",
                expected: ST_PARAM_COUNT,
                got: c.len(),
            });
        }
        Ok(Self {
            m: c[0],
            j_z: c[1],
            l_f: c[2],
            l_r: c[3],
            c_alpha_f: c[4],
            c_alpha_r: c[5],
            v: c[6],
        })
    }

    pub fn with_speed(mut self, v: f64) -> Self {
        self.v = v;
        self
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for (name, v) in ST_PARAM_NAMES.iter().zip(self.flatten()) {
            if !(v.is_finite() && v > 0.0) {
                out.push(Violation::new(name, v, "must be strictly positive"));
            }
        }
        if self.v.is_finite() && self.v > 0.0 && self.v < V_MIN {
            out.push(Violation::new("v", self.v, "below v_min = 1 m/s"));
        }
        out
    }

    pub fn validate(self) -> Result<Self, Error> {
        let v = self.violations();
        if v.is_empty() {
            Ok(self)
        } else {
            Err(Error::InvalidParams(v))
        }
    }
}
