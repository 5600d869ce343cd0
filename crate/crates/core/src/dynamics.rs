//! Right-hand sides of the double-track and linear single-track models.
//!
//! Frame conventions: body x forward, y left, z up; positive yaw turns left,
//! positive steering points the wheel left. The lateral lever arm `p` is
//! measured positive toward the RIGHT side of the vehicle (`p = −y`), which is
//! the sign under which the yaw and roll moment sums below equal the rigid-body
//! moment balance. Positive roll lowers the right side, positive pitch lowers
//! the nose, `z_s` is lift of the body (up).

use nalgebra::{Matrix2, Vector2};

use crate::dual::{Dual, Scalar, Tangent};
use crate::error::Error;
use crate::params::{
    idx, ParamSet, StParams, DT_PARAM_COUNT, DT_PARAM_NAMES, ST_PARAM_COUNT, ST_PARAM_NAMES,
    V_MIN,
};
use crate::scenario::ModelKind;
use crate::state::{
    ControlInput, DtState, StInput, StState, DT_INPUT_NAMES, DT_STATE_COUNT, DT_STATE_NAMES,
    ST_INPUT_NAMES, ST_STATE_COUNT, ST_STATE_NAMES,
};
use crate::tire::{self, cornering_stiffness, magic_formula, V_EPS};

/// Lever arms of the four wheels, wheel order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometryTables<T> {
    /// Lateral lever arm, positive on the right side.
    pub p: [T; 4],
    /// Longitudinal lever arm, positive ahead of the CoG.
    pub q: [T; 4],
    /// Distance from the CoG to the OTHER axle (stationary load split).
    pub l_opp: [T; 4],
}

impl<T: Scalar> GeometryTables<T> {
    pub fn new(l_f: T, l_r: T, s_f: T, s_r: T) -> Self {
        let hf = s_f * 0.5;
        let hr = s_r * 0.5;
        Self {
            p: [-hf, hf, -hr, hr],
            q: [l_f, l_f, -l_r, -l_r],
            l_opp: [l_r, l_r, l_f, l_f],
        }
    }
}

impl GeometryTables<f64> {
    pub fn from_params(p: &ParamSet) -> Self {
        Self::new(p.l_f, p.l_r, p.s_f, p.s_r)
    }
}

/// A model `ẋ = f(x, u, c)` that can be evaluated with any [`Scalar`].
pub trait Model: Sync {
    const KIND: ModelKind;
    type Input: Copy + Send + Sync + std::fmt::Debug;
    /// Dual type with exactly `n_states + n_params` tangent directions.
    type Tangent: Tangent;

    fn state_names(&self) -> &'static [&'static str];
    fn param_names(&self) -> &'static [&'static str];
    fn input_names(&self) -> &'static [&'static str];
    fn input_values(&self, u: &Self::Input) -> Vec<f64>;

    fn n_states(&self) -> usize {
        self.state_names().len()
    }

    fn n_params(&self) -> usize {
        self.param_names().len()
    }

    /// Writes `f(x, u, c)` into `dx`. Returns per-wheel lift flags where the
    /// model has wheels.
    fn rhs<T: Scalar>(&self, x: &[T], u: &Self::Input, c: &[T], dx: &mut [T])
        -> Result<[bool; 4], Error>;

    /// Inverse of [`Model::input_values`].
    fn input_from_values(&self, v: &[f64]) -> Self::Input;

    /// Rates of the global pose `(X, Y, ψ)` given heading `psi`.
    fn pose_rates(&self, x: &[f64], u: &Self::Input, c: &[f64], psi: f64) -> [f64; 3];
}

/// Nonlinear double-track model with Magic Formula tires and load transfer.
#[derive(Clone, Copy, Debug, Default)]
pub struct DoubleTrack;

/// Linear single-track model with front and rear steering.
#[derive(Clone, Copy, Debug, Default)]
pub struct SingleTrack;

impl Model for DoubleTrack {
    const KIND: ModelKind = ModelKind::DoubleTrack;
    type Input = ControlInput;
    type Tangent = Dual<{ DT_STATE_COUNT + DT_PARAM_COUNT }>;

    fn state_names(&self) -> &'static [&'static str] {
        &DT_STATE_NAMES
    }
    fn param_names(&self) -> &'static [&'static str] {
        &DT_PARAM_NAMES
    }
    fn input_names(&self) -> &'static [&'static str] {
        &DT_INPUT_NAMES
    }
    fn input_values(&self, u: &ControlInput) -> Vec<f64> {
        u.to_array().to_vec()
    }
    fn input_from_values(&self, v: &[f64]) -> ControlInput {
        ControlInput::from_slice(v)
    }
    fn pose_rates(&self, x: &[f64], _u: &ControlInput, _c: &[f64], psi: f64) -> [f64; 3] {
        let (s, c) = psi.sin_cos();
        [x[0] * c - x[1] * s, x[0] * s + x[1] * c, x[2]]
    }

    fn rhs<T: Scalar>(
        &self,
        x: &[T],
        u: &ControlInput,
        c: &[T],
        dx: &mut [T],
    ) -> Result<[bool; 4], Error> {
        check_len("double-track state", x.len(), DT_STATE_COUNT)?;
        check_len("double-track parameters", c.len(), DT_PARAM_COUNT)?;
        check_len("double-track derivative", dx.len(), DT_STATE_COUNT)?;
        Ok(dt_rhs_generic(x, u, c, dx))
    }
}

impl Model for SingleTrack {
    const KIND: ModelKind = ModelKind::SingleTrack;
    type Input = StInput;
    type Tangent = Dual<{ ST_STATE_COUNT + ST_PARAM_COUNT }>;

    fn state_names(&self) -> &'static [&'static str] {
        &ST_STATE_NAMES
    }
    fn param_names(&self) -> &'static [&'static str] {
        &ST_PARAM_NAMES
    }
    fn input_names(&self) -> &'static [&'static str] {
        &ST_INPUT_NAMES
    }
    fn input_values(&self, u: &StInput) -> Vec<f64> {
        u.to_array().to_vec()
    }
    fn input_from_values(&self, v: &[f64]) -> StInput {
        StInput {
            delta_f: v[0],
            delta_r: v[1],
            speed_offset: v[2],
        }
    }
    fn pose_rates(&self, x: &[f64], u: &StInput, c: &[f64], psi: f64) -> [f64; 3] {
        let v = c[6] + u.speed_offset;
        let (s, co) = (psi + x[0]).sin_cos();
        [v * co, v * s, x[1]]
    }

    fn rhs<T: Scalar>(
        &self,
        x: &[T],
        u: &StInput,
        c: &[T],
        dx: &mut [T],
    ) -> Result<[bool; 4], Error> {
        check_len("single-track state", x.len(), ST_STATE_COUNT)?;
        check_len("single-track parameters", c.len(), ST_PARAM_COUNT)?;
        check_len("single-track derivative", dx.len(), ST_STATE_COUNT)?;
        let v = c[6] + u.speed_offset;
        if !(v.re() >= V_MIN) {
            return Err(Error::SpeedBelowMin { v: v.re(), v_min: V_MIN });
        }
        let (a, b) = st_matrices_generic(c[0], c[1], c[2], c[3], c[4], c[5], v);
        dx[0] = a[0][0] * x[0] + a[0][1] * x[1] + b[0][0] * u.delta_f + b[0][1] * u.delta_r;
        dx[1] = a[1][0] * x[0] + a[1][1] * x[1] + b[1][0] * u.delta_f + b[1][1] * u.delta_r;
        Ok([false; 4])
    }
}

fn check_len(what: &'static str, got: usize, expected: usize) -> Result<(), Error> {
    if got == expected {
        Ok(())
    } else {
        Err(Error::Dimension { what, expected, got })
    }
}

/// Double-track state equations. Steering angles and drive torques are known
/// inputs; everything else may carry tangents.
fn dt_rhs_generic<T: Scalar>(x: &[T], u: &ControlInput, c: &[T], dx: &mut [T]) -> [bool; 4] {
    let m = c[idx::M];
    let g = c[idx::G];
    let h = c[idx::H];
    let l_f = c[idx::L_F];
    let l_r = c[idx::L_R];
    let geo = GeometryTables::new(l_f, l_r, c[idx::S_F], c[idx::S_R]);
    let wheelbase = l_f + l_r;
    let mu = c[idx::MU];
    let lat = tire::Mf {
        b: c[idx::TIRE_LAT],
        c: c[idx::TIRE_LAT + 1],
        d: c[idx::TIRE_LAT + 2],
        e: c[idx::TIRE_LAT + 3],
    };
    let lon = tire::Mf {
        b: c[idx::TIRE_LON],
        c: c[idx::TIRE_LON + 1],
        d: c[idx::TIRE_LON + 2],
        e: c[idx::TIRE_LON + 3],
    };

    let (v_x, v_y, psi_dot) = (x[0], x[1], x[2]);
    let (z_s, z_s_dot) = (x[3], x[4]);
    let (phi, phi_dot) = (x[5], x[6]);
    let (theta, theta_dot) = (x[7], x[8]);

    let zero = T::cst(0.0);
    let mut sum_fx = zero;
    let mut sum_fy = zero;
    let mut sum_fz = zero;
    let mut sum_p_fz = zero;
    let mut sum_q_fz = zero;
    let mut yaw = zero;
    let mut lift = [false; 4];

    for i in 0..4 {
        let (k, d) = if i < 2 {
            (c[idx::K_F], c[idx::D_F])
        } else {
            (c[idx::K_R], c[idx::D_R])
        };
        let f0 = tire::stationary_load(m, g, geo.l_opp[i], wheelbase);
        let raw = f0 + tire::load_delta(&geo, i, k, d, z_s, z_s_dot, phi, phi_dot, theta, theta_dot);
        let (fz, lifted) = tire::clamp_load(raw);
        lift[i] = lifted;
        let load_scale = fz / f0;

        let (sd, cd) = u.delta[i].sin_cos();
        let (p, q) = (geo.p[i], geo.q[i]);
        let vx_c = v_x + psi_dot * p;
        let vy_c = v_y + psi_dot * q;
        let vx_w = vx_c * cd + vy_c * sd;
        let vy_w = vy_c * cd - vx_c * sd;
        let omega = x[9 + i];
        let r = c[idx::R + i];
        let (lambda, alpha) = tire::slips(vx_w, vy_w, omega, r, V_EPS);
        let fx = magic_formula(lambda, &lon, mu, load_scale, zero);
        let fy = magic_formula(alpha, &lat, mu, load_scale, c[idx::S + i]);

        sum_fx += fx * cd - fy * sd;
        sum_fy += fx * sd + fy * cd;
        sum_fz += fz;
        sum_p_fz += p * fz;
        sum_q_fz += q * fz;
        yaw += (p * cd + q * sd) * fx + (q * cd - p * sd) * fy;

        dx[9 + i] = (fx * r * -1.0 + u.torque[i]) / c[idx::J_W + i];
    }

    dx[0] = v_y * psi_dot + sum_fx / m;
    dx[1] = -(v_x * psi_dot) + sum_fy / m;
    dx[2] = yaw / c[idx::J_Z];
    dx[3] = z_s_dot;
    dx[4] = sum_fz / m - g;
    dx[5] = phi_dot;
    dx[6] = (h * sum_fy - sum_p_fz) / c[idx::J_X];
    dx[7] = theta_dot;
    dx[8] = (-(h * sum_fx) - sum_q_fz) / c[idx::J_Y];
    lift
}

/// Double-track derivative and wheel-lift flags.
pub fn dt_rhs(x: &DtState, u: &ControlInput, p: &ParamSet) -> ([f64; DT_STATE_COUNT], [bool; 4]) {
    let mut dx = [0.0; DT_STATE_COUNT];
    let lift = dt_rhs_generic(&x.to_array(), u, &p.flatten(), &mut dx);
    (dx, lift)
}

#[allow(clippy::type_complexity)]
fn st_matrices_generic<T: Scalar>(
    m: T,
    j_z: T,
    l_f: T,
    l_r: T,
    c_f: T,
    c_r: T,
    v: T,
) -> ([[T; 2]; 2], [[T; 2]; 2]) {
    let a11 = -(c_f + c_r) / (m * v);
    let a12 = (c_r * l_r - c_f * l_f) / (m * v * v) - 1.0;
    let a21 = (c_r * l_r - c_f * l_f) / j_z;
    let a22 = -(c_f * l_f * l_f + c_r * l_r * l_r) / (j_z * v);
    let b11 = c_f / (m * v);
    let b12 = c_r / (m * v);
    let b21 = c_f * l_f / j_z;
    let b22 = -(c_r * l_r) / j_z;
    ([[a11, a12], [a21, a22]], [[b11, b12], [b21, b22]])
}

/// State matrix `A` and input matrix `B` of the single-track model.
pub fn st_matrices(sp: &StParams) -> Result<(Matrix2<f64>, Matrix2<f64>), Error> {
    if !(sp.v >= V_MIN) {
        return Err(Error::SpeedBelowMin { v: sp.v, v_min: V_MIN });
    }
    let (a, b) = st_matrices_generic(sp.m, sp.j_z, sp.l_f, sp.l_r, sp.c_alpha_f, sp.c_alpha_r, sp.v);
    Ok((
        Matrix2::new(a[0][0], a[0][1], a[1][0], a[1][1]),
        Matrix2::new(b[0][0], b[0][1], b[1][0], b[1][1]),
    ))
}

/// `A x + B (δ_f, δ_r)`.
pub fn st_rhs(x: &StState, delta_f: f64, delta_r: f64, sp: &StParams) -> Result<StState, Error> {
    let (a, b) = st_matrices(sp)?;
    let dx = a * Vector2::new(x.beta, x.psi_dot) + b * Vector2::new(delta_f, delta_r);
    Ok(StState {
        beta: dx[0],
        psi_dot: dx[1],
    })
}

/// Single-track parameters consistent with the double-track tire model.
///
/// Axle cornering stiffness is the Magic Formula slope at zero slip and
/// stationary load (load scale 1), summed over the axle's two wheels.
pub fn st_params_from_dt(p: &ParamSet, v: f64) -> StParams {
    let per_wheel = cornering_stiffness(&p.tire_lat, p.mu, 1.0);
    StParams {
        m: p.m,
        j_z: p.j_z,
        l_f: p.l_f,
        l_r: p.l_r,
        c_alpha_f: 2.0 * per_wheel,
        c_alpha_r: 2.0 * per_wheel,
        v,
    }
}

/// Steady-state yaw rate per radian of front steering of the single-track
/// model, `v / (L + K v²)` with the understeer gradient `K`.
pub fn st_yaw_gain(sp: &StParams) -> f64 {
    let l = sp.l_f + sp.l_r;
    let k = sp.m * (sp.c_alpha_r * sp.l_r - sp.c_alpha_f * sp.l_f) / (l * sp.c_alpha_f * sp.c_alpha_r);
    sp.v / (l + k * sp.v * sp.v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Wheel;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn reference_st(v: f64) -> StParams {
        st_params_from_dt(&ParamSet::reference(), v)
    }

    #[test]
    fn geometry_tables_follow_wheel_order() {
        let g = GeometryTables::from_params(&ParamSet::reference());
        assert_eq!(g.p, [-0.8, 0.8, -0.8, 0.8]);
        assert_eq!(g.q, [1.2, 1.2, -1.8, -1.8]);
        assert_eq!(g.l_opp, [1.8, 1.8, 1.2, 1.2]);
    }

    #[test]
    fn rest_state_is_an_exact_equilibrium() {
        let (dx, lift) = dt_rhs(&DtState::default(), &ControlInput::default(), &ParamSet::reference());
        for v in dx {
            assert!(v.abs() < 1e-12, "{dx:?}");
        }
        assert_eq!(lift, [false; 4]);
    }

    #[test]
    fn straight_rolling_has_no_acceleration() {
        let p = ParamSet::reference();
        let x = DtState::rolling(10.0, &p.r);
        let (dx, _) = dt_rhs(&x, &ControlInput::default(), &p);
        assert!(dx[0].abs() < 1e-12);
        assert!(dx[1].abs() < 1e-12);
        assert!(dx[2].abs() < 1e-12);
    }

    #[test]
    fn left_steer_produces_left_yaw_and_outward_roll() {
        let p = ParamSet::reference();
        let x = DtState::rolling(10.0, &p.r);
        let u = ControlInput {
            delta: [0.05, 0.05, 0.0, 0.0],
            ..Default::default()
        };
        let (dx, _) = dt_rhs(&x, &u, &p);
        assert!(dx[2] > 0.0, "yaw acceleration {dx:?}");
        assert!(dx[1] > 0.0, "lateral acceleration");
        assert!(dx[6] > 0.0, "roll toward the right");
    }

    #[test]
    fn kinematic_rows_integrate_rates() {
        let p = ParamSet::reference();
        let mut x = DtState::rolling(5.0, &p.r);
        x.z_s_dot = 0.1;
        x.phi_dot = -0.2;
        x.theta_dot = 0.3;
        let (dx, _) = dt_rhs(&x, &ControlInput::default(), &p);
        assert_eq!(dx[3], 0.1);
        assert_eq!(dx[5], -0.2);
        assert_eq!(dx[7], 0.3);
    }

    #[test]
    fn drive_torque_spins_up_the_wheel() {
        let p = ParamSet::reference();
        let x = DtState::rolling(10.0, &p.r);
        let u = ControlInput {
            torque: [100.0, 0.0, 0.0, 0.0],
            ..Default::default()
        };
        let (dx, _) = dt_rhs(&x, &u, &p);
        assert_relative_eq!(dx[9], 100.0 / p.j_w[0], max_relative = 1e-12);
        assert_eq!(dx[10], 0.0);
    }

    fn mirror(x: &DtState, u: &ControlInput) -> (DtState, ControlInput) {
        let mut xm = *x;
        xm.v_y = -x.v_y;
        xm.psi_dot = -x.psi_dot;
        xm.phi = -x.phi;
        xm.phi_dot = -x.phi_dot;
        let mut um = *u;
        for w in Wheel::ALL {
            let (i, j) = (w.index(), w.mirrored().index());
            xm.omega[i] = x.omega[j];
            um.delta[i] = -u.delta[j];
            um.torque[i] = u.torque[j];
        }
        (xm, um)
    }

    proptest! {
        #[test]
        fn left_right_mirror_symmetry(
            v_x in 3.0f64..25.0, v_y in -1.0f64..1.0, r in -0.5f64..0.5,
            z in -0.02f64..0.02, phi in -0.05f64..0.05, phid in -0.2f64..0.2,
            theta in -0.03f64..0.03, d in prop::array::uniform4(-0.2f64..0.2),
            slip in prop::array::uniform4(-0.1f64..0.1), m in prop::array::uniform4(-300.0f64..300.0),
        ) {
            let p = ParamSet::reference();
            let mut x = DtState { v_x, v_y, psi_dot: r, z_s: z, phi, phi_dot: phid, theta, ..Default::default() };
            for i in 0..4 {
                x.omega[i] = v_x * (1.0 + slip[i]) / p.r[i];
            }
            let u = ControlInput { delta: d, torque: m };
            let (xm, um) = mirror(&x, &u);
            let (a, _) = dt_rhs(&x, &u, &p);
            let (b, _) = dt_rhs(&xm, &um, &p);
            let tol = |v: f64| 1e-9 * (1.0 + v.abs());
            prop_assert!((a[1] + b[1]).abs() < tol(a[1]));
            prop_assert!((a[2] + b[2]).abs() < tol(a[2]));
            prop_assert!((a[6] + b[6]).abs() < tol(a[6]));
            prop_assert!((a[0] - b[0]).abs() < tol(a[0]));
            prop_assert!((a[4] - b[4]).abs() < tol(a[4]));
            prop_assert!((a[8] - b[8]).abs() < tol(a[8]));
        }

        #[test]
        fn st_rhs_is_linear(
            x1 in prop::array::uniform2(-0.2f64..0.2), x2 in prop::array::uniform2(-0.2f64..0.2),
            u1 in prop::array::uniform2(-0.1f64..0.1), u2 in prop::array::uniform2(-0.1f64..0.1),
            a in -2.0f64..2.0, b in -2.0f64..2.0,
        ) {
            let sp = reference_st(12.0);
            let f = |x: [f64; 2], u: [f64; 2]| {
                let s = st_rhs(&StState::from_slice(&x), u[0], u[1], &sp).unwrap();
                [s.beta, s.psi_dot]
            };
            let comb = f(
                [a * x1[0] + b * x2[0], a * x1[1] + b * x2[1]],
                [a * u1[0] + b * u2[0], a * u1[1] + b * u2[1]],
            );
            let (f1, f2) = (f(x1, u1), f(x2, u2));
            for i in 0..2 {
                let lin = a * f1[i] + b * f2[i];
                prop_assert!((comb[i] - lin).abs() <= 1e-12 * (1.0 + lin.abs()));
            }
        }
    }

    #[test]
    fn st_origin_is_fixed_point() {
        let dx = st_rhs(&StState::default(), 0.0, 0.0, &reference_st(10.0)).unwrap();
        assert_eq!(dx, StState::default());
    }

    #[test]
    fn neutral_steer_structure() {
        let sp = StParams {
            m: 1500.0,
            j_z: 2000.0,
            l_f: 1.5,
            l_r: 1.0,
            c_alpha_f: 60_000.0,
            c_alpha_r: 90_000.0,
            v: 15.0,
        };
        let (a, _) = st_matrices(&sp).unwrap();
        assert_eq!(a[(0, 1)], -1.0);
        assert_eq!(a[(1, 0)], 0.0);
    }

    #[test]
    fn symmetric_car_has_zero_a21() {
        let mut sp = reference_st(10.0);
        sp.l_f = 1.5;
        sp.l_r = 1.5;
        let (a, _) = st_matrices(&sp).unwrap();
        assert_eq!(a[(1, 0)], 0.0);
    }

    #[test]
    fn doubling_speed_halves_diagonal() {
        let (a1, _) = st_matrices(&reference_st(10.0)).unwrap();
        let (a2, _) = st_matrices(&reference_st(20.0)).unwrap();
        assert_relative_eq!(a2[(0, 0)], a1[(0, 0)] / 2.0, max_relative = 1e-15);
        assert_relative_eq!(a2[(1, 1)], a1[(1, 1)] / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn reference_is_stable_at_15_mps() {
        let (a, _) = st_matrices(&reference_st(15.0)).unwrap();
        // closed-form 2x2 eigenvalues: tr/2 ± sqrt(tr²/4 − det)
        let tr = a[(0, 0)] + a[(1, 1)];
        let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
        let disc = tr * tr / 4.0 - det;
        let re_max = if disc >= 0.0 { tr / 2.0 + disc.sqrt() } else { tr / 2.0 };
        assert!(re_max < 0.0);
        let eig = a.complex_eigenvalues();
        for e in eig.iter() {
            assert!(e.re < 0.0);
            assert!((e.re - re_max).abs() < 1e-9 || e.re < re_max);
        }
    }

    #[test]
    fn below_v_min_is_an_error() {
        assert!(matches!(
            st_matrices(&reference_st(0.5)),
            Err(Error::SpeedBelowMin { .. })
        ));
        assert!(st_rhs(&StState::default(), 0.0, 0.0, &reference_st(0.99)).is_err());
    }

    #[test]
    fn st_steady_state_matches_linear_solve() {
        let sp = reference_st(15.0);
        let (a, b) = st_matrices(&sp).unwrap();
        let u = Vector2::new(0.02, 0.0);
        let xss = -a.try_inverse().unwrap() * b * u;
        // Oracle: Cramer's rule on A x = −B u.
        let rhs = -(b * u);
        let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
        let beta = (rhs[0] * a[(1, 1)] - a[(0, 1)] * rhs[1]) / det;
        let r = (a[(0, 0)] * rhs[1] - rhs[0] * a[(1, 0)]) / det;
        assert_relative_eq!(xss[0], beta, max_relative = 1e-12);
        assert_relative_eq!(xss[1], r, max_relative = 1e-12);
        assert_relative_eq!(r, st_yaw_gain(&sp) * 0.02, max_relative = 1e-12);
        let dx = st_rhs(&StState { beta, psi_dot: r }, 0.02, 0.0, &sp).unwrap();
        assert!(dx.beta.abs() < 1e-14 && dx.psi_dot.abs() < 1e-14);
    }

    #[test]
    fn st_params_copy_geometry_and_double_per_wheel_stiffness() {
        let p = ParamSet::reference();
        let sp = st_params_from_dt(&p, 10.0);
        assert_eq!(sp.m, p.m);
        assert_eq!(sp.j_z, p.j_z);
        assert_eq!(sp.l_f, p.l_f);
        assert_eq!(sp.l_r, p.l_r);
        let bcd = p.mu * p.tire_lat.b * p.tire_lat.c * p.tire_lat.d;
        assert_relative_eq!(sp.c_alpha_f, 2.0 * bcd, max_relative = 1e-15);
        assert_relative_eq!(sp.c_alpha_r, 2.0 * bcd, max_relative = 1e-15);
    }

    /// Lateral force of one axle at slip angle `alpha`, stationary loads.
    fn axle_lateral_force(p: &ParamSet, alpha: f64) -> f64 {
        let mf = p.tire_lat.lift::<f64>();
        2.0 * magic_formula(alpha, &mf, p.mu, 1.0, 0.0)
    }

    #[test]
    fn axle_stiffness_matches_fd_slope() {
        let p = ParamSet::reference();
        let sp = st_params_from_dt(&p, 10.0);
        let h = 1e-7;
        let fd = (axle_lateral_force(&p, h) - axle_lateral_force(&p, -h)) / (2.0 * h);
        assert!(((fd - sp.c_alpha_f) / sp.c_alpha_f).abs() <= 1e-6);
    }

    #[test]
    fn small_slip_axle_force_is_linear_within_one_percent() {
        let p = ParamSet::reference();
        let sp = st_params_from_dt(&p, 10.0);
        for k in 1..=20 {
            let alpha = 0.0005 * k as f64;
            let f = axle_lateral_force(&p, alpha);
            assert!(((f - sp.c_alpha_f * alpha) / f).abs() <= 0.01, "alpha {alpha}");
        }
    }

    #[test]
    fn dt_axle_force_through_rhs_matches_cornering_stiffness() {
        // Pure side slip at the front axle only: yaw moment / l_f gives the
        // front axle's lateral force through the full double-track path.
        let p = ParamSet::reference();
        let v = 20.0;
        let alpha = 0.005;
        let mut x = DtState::rolling(v, &p.r);
        x.v_y = -v * alpha.tan();
        let sp = st_params_from_dt(&p, v);
        let (dx, _) = dt_rhs(&x, &ControlInput::default(), &p);
        let total_fy = dx[1] * p.m;
        let expected = (sp.c_alpha_f + sp.c_alpha_r) * alpha;
        assert!(((total_fy - expected) / expected).abs() <= 0.01, "{total_fy} vs {expected}");
    }
}
