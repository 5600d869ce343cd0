//! Direct-method parameter sensitivities.
//!
//! For `ẋ = f(x, u, c)` the sensitivities `Z = ∂x/∂c` obey the linear system
//! `Ż = f_c + J Z` with `J = ∂f/∂x`, `f_c = ∂f/∂c` and `Z(0) = 0`. Both
//! Jacobians come from one forward-mode pass over the model with
//! `n + m` tangent directions, so they are exact up to rounding.

use nalgebra::{DMatrix, Matrix2, Vector2};

use crate::dual::{Scalar, Tangent};
use crate::dynamics::{st_matrices, Model, SingleTrack};
use crate::error::Error;
use crate::params::StParams;
use crate::state::StInput;

/// `Z[i][k] = ∂x_i/∂c_k`; rows follow the model's state order, columns its
/// parameter order.
pub type SensitivityMatrix = DMatrix<f64>;

/// Default relative step of the finite-difference oracle.
pub const FD_H_REL: f64 = 1e-6;

/// Model state together with its sensitivity matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedState {
    pub x: Vec<f64>,
    pub z: SensitivityMatrix,
}

impl AugmentedState {
    /// Sensitivities start at zero: no parameter is an initial value.
    pub fn new(x: Vec<f64>, n_params: usize) -> Self {
        let n = x.len();
        Self {
            x,
            z: DMatrix::zeros(n, n_params),
        }
    }

    /// `[x, vec(Z)]` with `Z` stored column by column.
    pub fn flatten(&self) -> Vec<f64> {
        let mut y = Vec::with_capacity(self.x.len() * (1 + self.z.ncols()));
        y.extend_from_slice(&self.x);
        y.extend_from_slice(self.z.as_slice());
        y
    }

    pub fn unflatten(y: &[f64], n: usize, m: usize) -> Result<Self, Error> {
        if y.len() != n * (1 + m) {
            return Err(Error::Dimension {
                what: "augmented state",
                expected: n * (1 + m),
                got: y.len(),
            });
        }
        Ok(Self {
            x: y[..n].to_vec(),
            z: DMatrix::from_column_slice(n, m, &y[n..]),
        })
    }
}

/// Value and both Jacobians of a model at one point.
#[derive(Clone, Debug)]
pub struct Linearization {
    pub f: Vec<f64>,
    pub j: DMatrix<f64>,
    pub f_c: DMatrix<f64>,
    pub lift: [bool; 4],
}

/// Evaluates `f`, `∂f/∂x` and `∂f/∂c` in a single dual-number pass.
pub fn linearize<M: Model>(
    model: &M,
    x: &[f64],
    u: &M::Input,
    c: &[f64],
) -> Result<Linearization, Error> {
    let (n, m) = (x.len(), c.len());
    if M::Tangent::DIRS != n + m {
        return Err(Error::Dimension {
            what: "tangent directions",
            expected: n + m,
            got: M::Tangent::DIRS,
        });
    }
    let xd: Vec<M::Tangent> = x
        .iter()
        .enumerate()
        .map(|(i, &v)| M::Tangent::variable(v, i))
        .collect();
    let cd: Vec<M::Tangent> = c
        .iter()
        .enumerate()
        .map(|(k, &v)| M::Tangent::variable(v, n + k))
        .collect();
    let mut out = vec![M::Tangent::cst(0.0); n];
    let lift = model.rhs(&xd, u, &cd, &mut out)?;

    let mut f = Vec::with_capacity(n);
    let mut j = DMatrix::zeros(n, n);
    let mut f_c = DMatrix::zeros(n, m);
    for (i, d) in out.iter().enumerate() {
        f.push(d.re());
        let eps = d.eps();
        for col in 0..n {
            j[(i, col)] = eps[col];
        }
        for k in 0..m {
            f_c[(i, k)] = eps[n + k];
        }
    }
    if f.iter().chain(j.iter()).chain(f_c.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("model linearization"));
    }
    Ok(Linearization { f, j, f_c, lift })
}

/// `∂f/∂x`, n×n.
pub fn model_jacobian<M: Model>(
    model: &M,
    x: &[f64],
    u: &M::Input,
    c: &[f64],
) -> Result<DMatrix<f64>, Error> {
    linearize(model, x, u, c).map(|l| l.j)
}

/// `∂f/∂c`, n×m: the input of the sensitivity system.
pub fn param_jacobian<M: Model>(
    model: &M,
    x: &[f64],
    u: &M::Input,
    c: &[f64],
) -> Result<DMatrix<f64>, Error> {
    linearize(model, x, u, c).map(|l| l.f_c)
}

/// `Ż = f_c + J Z`.
pub fn sensitivity_rhs(
    j: &DMatrix<f64>,
    f_c: &DMatrix<f64>,
    z: &SensitivityMatrix,
) -> Result<SensitivityMatrix, Error> {
    let n = j.nrows();
    if j.ncols() != n {
        return Err(Error::Mismatch(format!("J is {}x{}, not square", n, j.ncols())));
    }
    if z.nrows() != n || f_c.nrows() != n || f_c.ncols() != z.ncols() {
        return Err(Error::Mismatch(format!(
            "J {}x{}, f_c {}x{}, Z {}x{}",
            n,
            n,
            f_c.nrows(),
            f_c.ncols(),
            z.nrows(),
            z.ncols()
        )));
    }
    Ok(f_c + j * z)
}

/// Side-slip sensitivity from velocity sensitivities:
/// `Z_β = (v_x Z_vy − v_y Z_vx) / (v_x² + v_y²)`.
pub fn beta_sensitivity(v_x: f64, v_y: f64, z_vx: f64, z_vy: f64) -> Result<f64, Error> {
    let den = v_x * v_x + v_y * v_y;
    if den == 0.0 {
        return Err(Error::Standstill);
    }
    Ok((v_x * z_vy - v_y * z_vx) / den)
}

/// Central-difference sensitivity of a whole trajectory to parameter `k`.
///
/// `simulate` maps a parameter vector to a state trajectory on a fixed time
/// grid. The step is `h_rel · |c_k|`, or `h_rel` itself when `c_k = 0`.
/// Returns one sensitivity column per output sample.
pub fn fd_sensitivity_oracle<F>(
    simulate: F,
    c: &[f64],
    k: usize,
    h_rel: f64,
) -> Result<Vec<Vec<f64>>, Error>
where
    F: Fn(&[f64]) -> Result<Vec<Vec<f64>>, Error>,
{
    if k >= c.len() {
        return Err(Error::Dimension {
            what: "parameter index",
            expected: c.len(),
            got: k,
        });
    }
    let step = if c[k] == 0.0 { h_rel } else { h_rel * c[k].abs() };
    let mut plus = c.to_vec();
    let mut minus = c.to_vec();
    plus[k] += step;
    minus[k] -= step;
    let actual = plus[k] - minus[k];
    let up = simulate(&plus)?;
    let down = simulate(&minus)?;
    if up.len() != down.len() {
        return Err(Error::Mismatch("perturbed runs differ in length".into()));
    }
    Ok(up
        .iter()
        .zip(&down)
        .map(|(a, b)| a.iter().zip(b).map(|(p, q)| (p - q) / actual).collect())
        .collect())
}

/// Steady state of the single-track model and its parameter sensitivities
/// for constant inputs: `x = −A⁻¹ B u`, `Z = −A⁻¹ f_c(x, u)`.
pub fn steady_state_sensitivity_st(
    sp: &StParams,
    u: &StInput,
) -> Result<(Vector2<f64>, SensitivityMatrix), Error> {
    let eff = sp.with_speed(sp.v + u.speed_offset);
    let (a, b) = st_matrices(&eff)?;
    let inv = invert2(&a)?;
    let x_ss = -(inv * b * Vector2::new(u.delta_f, u.delta_r));
    let f_c = param_jacobian(&SingleTrack, x_ss.as_slice(), u, &sp.flatten())?;
    let a_inv = DMatrix::from_column_slice(2, 2, inv.as_slice());
    Ok((x_ss, -(a_inv * f_c)))
}

fn invert2(a: &Matrix2<f64>) -> Result<Matrix2<f64>, Error> {
    let det = a.determinant();
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    if det.abs() <= 1e-14 * scale * scale {
        return Err(Error::SingularMatrix);
    }
    a.try_inverse().ok_or(Error::SingularMatrix)
}
