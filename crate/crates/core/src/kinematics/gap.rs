use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geometry::{surface_frame, Patch, SurfaceFrame};

/// Elastic gap at one master point and its split by the surface projectors.
#[derive(Clone, Debug)]
pub struct GapState {
    pub g_e: Vector3<f64>,
    pub g_n: Vector3<f64>,
    pub g_tau: Vector3<f64>,
    pub g_tau_max: Vector3<f64>,
    pub tau: Option<Vector3<f64>>,
    pub xi: [f64; 2],
    pub frame: SurfaceFrame,
}

impl GapState {
    /// Signed normal gap `g_e·n`; positive means penetration.
    pub fn normal_gap(&self) -> f64 {
        self.g_e.dot(&self.frame.n)
    }
}

/// `sign` with `sign(0) = +1`.
pub fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Gap from the master point of `frame` to `x_k`, without a friction bound.
pub fn gap_at_frame(x_k: &Vector3<f64>, frame: &SurfaceFrame) -> GapState {
    let g_e = x_k - frame.x;
    let g_n = frame.normal_part(&g_e);
    GapState {
        g_e,
        g_n,
        g_tau: g_e - g_n,
        g_tau_max: Vector3::zeros(),
        tau: None,
        xi: frame.xi,
        frame: frame.clone(),
    }
}

pub fn elastic_gap(x_k: &Vector3<f64>, patch: &Patch, xi: [f64; 2], controls: &[Vector3<f64>]) -> Result<GapState> {
    let element = patch.locate(xi);
    let frame = surface_frame(patch, element, xi, controls)?;
    Ok(gap_at_frame(x_k, &frame))
}

/// Unit sliding direction `P_τ ĝⁿ / ‖P_τ ĝⁿ‖` in the tangent plane of `frame`.
pub fn sliding_direction(g_hat_prev: &Vector3<f64>, frame: &SurfaceFrame, tol: f64) -> Result<Vector3<f64>> {
    let t = frame.tangential_part(g_hat_prev);
    let norm = t.norm();
    if norm <= tol {
        return Err(Error::DegenerateTangent);
    }
    Ok(t / norm)
}

/// Coulomb bound `μ‖g_n‖τ`.
pub fn gtau_max(g_n: &Vector3<f64>, mu: f64, tau: &Vector3<f64>) -> Vector3<f64> {
    tau * (mu * g_n.norm())
}
