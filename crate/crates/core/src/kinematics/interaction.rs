use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::gap::{gap_at_frame, GapState};
use super::projection::{closest_point_projection, frame_at};
use super::sliding::{sliding_point, SlidingPoint};
use crate::error::Result;
use crate::geometry::{frame_from_shape, Patch, ShapeEval, SurfaceFrame};

/// Committed per-quadrature-point contact state.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ContactHistory {
    pub active: bool,
    /// Interacting point ξ̂ⁿ of the last converged step (patch-global).
    pub xi_hat_prev: Option<[f64; 2]>,
    pub master: usize,
    pub omega: u8,
    /// Dissipated energy per reference area, summed over all steps.
    pub accumulated_dissipation: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct InteractionParams {
    /// Friction coefficient of the gap cone.
    pub mu: f64,
    /// Degenerate-direction threshold on `‖P_τ ĝⁿ‖`.
    pub tol_tau: f64,
    /// Deeper first touches are treated as spurious back-side matches.
    pub max_penetration: f64,
    /// Slave points farther than this from the master bounding box are
    /// not projected at all.
    pub search_radius: f64,
}

/// Outcome of the stick/slip logic for one slave point and one iteration.
#[derive(Clone, Debug)]
pub struct Interaction {
    pub phi: bool,
    pub omega: u8,
    /// No committed interacting point was available.
    pub first_touch: bool,
    /// The sliding or projection point left the master domain.
    pub leaving: bool,
    pub xi_hat: [f64; 2],
    pub xi_prev: Option<[f64; 2]>,
    /// Interacting gap ĝ.
    pub g_hat: Vector3<f64>,
    /// Trial gap ĝⁿ to the previous interacting point.
    pub g_hat_prev: Vector3<f64>,
    /// Frame and shape functions at ξ̂.
    pub frame: SurfaceFrame,
    pub shape: ShapeEval,
    /// Shape functions and current position of ξ̂ⁿ.
    pub shape_prev: Option<ShapeEval>,
    pub x_prev: Option<Vector3<f64>>,
    /// Local linearization (slip only).
    pub slide: Option<SlidingPoint>,
    pub mu: f64,
    pub gap: GapState,
}

impl Interaction {
    fn inactive(frame: SurfaceFrame, shape: ShapeEval, x_k: &Vector3<f64>, leaving: bool) -> Self {
        let gap = gap_at_frame(x_k, &frame);
        Self {
            phi: false,
            omega: 0,
            first_touch: false,
            leaving,
            xi_hat: frame.xi,
            xi_prev: None,
            g_hat: gap.g_e,
            g_hat_prev: gap.g_e,
            frame,
            shape,
            shape_prev: None,
            x_prev: None,
            slide: None,
            mu: 0.0,
            gap,
        }
    }

    /// History to commit if this state belongs to a converged step.
    pub fn committed(&self, old: &ContactHistory, dissipation: f64) -> ContactHistory {
        ContactHistory {
            active: self.phi,
            xi_hat_prev: if self.phi { Some(self.xi_hat) } else { None },
            master: old.master,
            omega: self.omega,
            accumulated_dissipation: old.accumulated_dissipation + dissipation,
        }
    }
}

fn with_bound(mut gap: GapState, mu: f64, tau: Option<Vector3<f64>>) -> GapState {
    if let Some(t) = tau {
        gap.g_tau_max = t * (mu * gap.g_n.norm());
    }
    gap.tau = tau;
    gap
}

/// Stick/slip decision for the slave point `x_k` against `patch`.
///
/// Returns `Ok(None)` when the point is too far from the master to be
/// considered at all.
pub fn update_interaction(
    history: &ContactHistory,
    x_k: &Vector3<f64>,
    patch: &Patch,
    controls: &[Vector3<f64>],
    bbox: &(Vector3<f64>, Vector3<f64>),
    params: &InteractionParams,
) -> Result<Option<Interaction>> {
    let prev = if history.active { history.xi_hat_prev } else { None };
    let Some(xi_prev) = prev else {
        return first_touch(x_k, patch, controls, bbox, params);
    };

    let shape_prev = patch.shape_at(xi_prev)?;
    let frame_prev = frame_from_shape(patch, &shape_prev, controls)?;
    let g_prev = x_k - frame_prev.x;
    let g_n_prev = g_prev.dot(&frame_prev.n);
    let g_tau_prev = frame_prev.tangential_part(&g_prev);
    let mu = params.mu;
    let bound_prev = mu * g_n_prev.abs();

    let stick = |phi: bool, leaving: bool| {
        let tau = g_tau_prev.try_normalize(params.tol_tau);
        let gap = with_bound(gap_at_frame(x_k, &frame_prev), mu, tau);
        Interaction {
            phi,
            omega: 0,
            first_touch: false,
            leaving,
            xi_hat: xi_prev,
            xi_prev: Some(xi_prev),
            g_hat: g_prev,
            g_hat_prev: g_prev,
            frame: frame_prev.clone(),
            shape: shape_prev.clone(),
            shape_prev: Some(shape_prev.clone()),
            x_prev: Some(frame_prev.x),
            slide: None,
            mu,
            gap,
        }
    };

    if g_tau_prev.norm() < bound_prev {
        return Ok(Some(stick(g_n_prev > 0.0, false)));
    }

    let sp = match sliding_point(x_k, patch, controls, &g_prev, mu, xi_prev, None, params.tol_tau) {
        Ok(sp) => sp,
        Err(e) if e.is_recoverable() => {
            let proj = closest_point_projection(x_k, patch, controls, Some(xi_prev))?;
            sliding_point(x_k, patch, controls, &g_prev, mu, proj.xi, None, params.tol_tau)?
        }
        Err(e) => return Err(e),
    };
    if sp.on_boundary {
        let mut out = Interaction::inactive(sp.frame.clone(), sp.shape.clone(), x_k, true);
        out.xi_prev = Some(xi_prev);
        return Ok(Some(out));
    }
    let phi = sp.g_n > 0.0;
    let bound_m = sp.mu * sp.g_n.abs();
    if g_tau_prev.norm() <= bound_m {
        return Ok(Some(stick(phi, false)));
    }
    let gap = with_bound(gap_at_frame(x_k, &sp.frame), sp.mu, sp.tau);
    Ok(Some(Interaction {
        phi,
        omega: 1,
        first_touch: false,
        leaving: false,
        xi_hat: sp.xi,
        xi_prev: Some(xi_prev),
        g_hat: sp.g,
        g_hat_prev: g_prev,
        frame: sp.frame.clone(),
        shape: sp.shape.clone(),
        shape_prev: Some(shape_prev),
        x_prev: Some(frame_prev.x),
        mu: sp.mu,
        slide: Some(sp),
        gap,
    }))
}

/// No interacting point yet: anchor at the closest projection point with
/// friction switched off, which is a frictionless slip.
fn first_touch(
    x_k: &Vector3<f64>,
    patch: &Patch,
    controls: &[Vector3<f64>],
    bbox: &(Vector3<f64>, Vector3<f64>),
    params: &InteractionParams,
) -> Result<Option<Interaction>> {
    let (lo, hi) = bbox;
    let outside = (0..3).any(|k| x_k[k] < lo[k] - params.search_radius || x_k[k] > hi[k] + params.search_radius);
    if outside {
        return Ok(None);
    }
    let proj = closest_point_projection(x_k, patch, controls, None)?;
    let g = x_k - proj.frame.x;
    let g_n = g.dot(&proj.frame.n);
    if proj.on_boundary || g_n <= 0.0 || g_n > params.max_penetration {
        let shape = patch.shape_at(proj.xi)?;
        return Ok(Some(Interaction::inactive(proj.frame, shape, x_k, proj.on_boundary)));
    }
    let sp = sliding_point(x_k, patch, controls, &g, 0.0, proj.xi, None, params.tol_tau)?;
    let gap = gap_at_frame(x_k, &sp.frame);
    Ok(Some(Interaction {
        phi: sp.g_n > 0.0 && !sp.on_boundary,
        omega: 1,
        first_touch: true,
        leaving: sp.on_boundary,
        xi_hat: sp.xi,
        xi_prev: None,
        g_hat: sp.g,
        g_hat_prev: sp.g,
        frame: sp.frame.clone(),
        shape: sp.shape.clone(),
        shape_prev: None,
        x_prev: None,
        mu: 0.0,
        slide: Some(sp),
        gap,
    }))
}

/// Frame of the master at `xi` for the given controls.
pub fn master_frame(patch: &Patch, xi: [f64; 2], controls: &[Vector3<f64>]) -> Result<SurfaceFrame> {
    frame_at(patch, xi, controls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(mu: f64) -> InteractionParams {
        InteractionParams {
            mu,
            tol_tau: 1e-10,
            max_penetration: 0.5,
            search_radius: 1.0,
        }
    }

    fn floor() -> Patch {
        // y = 0 line with the normal pointing down, into the support
        let mut p = Patch::rigid_line(Vector3::new(-5.0, 0.0, 0.0), Vector3::x(), [0.0, 10.0]).unwrap();
        p.set_normal_sign(-1.0);
        p
    }

    fn run(h: &ContactHistory, x: Vector3<f64>, mu: f64) -> Interaction {
        let p = floor();
        let bbox = (Vector3::new(-5.0, 0.0, 0.0), Vector3::new(5.0, 0.0, 0.0));
        update_interaction(h, &x, &p, p.ref_controls(), &bbox, &params(mu))
            .unwrap()
            .unwrap()
    }

    #[test]
    fn separated_point_is_inactive() {
        let out = run(&ContactHistory::default(), Vector3::new(0.2, 0.3, 0.0), 0.5);
        assert!(!out.phi);
        assert!(out.committed(&ContactHistory::default(), 0.0).xi_hat_prev.is_none());
    }

    #[test]
    fn first_touch_anchors_at_projection() {
        let out = run(&ContactHistory::default(), Vector3::new(0.2, -0.01, 0.0), 0.5);
        assert!(out.phi && out.first_touch);
        assert_eq!(out.mu, 0.0);
        assert_relative_eq!(out.frame.x, Vector3::new(0.2, 0.0, 0.0), epsilon = 1e-14);
    }

    #[test]
    fn small_tangential_motion_sticks() {
        let h = ContactHistory {
            active: true,
            xi_hat_prev: Some([5.2, 0.0]),
            ..Default::default()
        };
        let out = run(&h, Vector3::new(0.201, -0.01, 0.0), 0.5);
        assert_eq!(out.omega, 0);
        assert_eq!(out.xi_hat, [5.2, 0.0]);
    }

    #[test]
    fn large_tangential_motion_slips_onto_cone() {
        let h = ContactHistory {
            active: true,
            xi_hat_prev: Some([5.2, 0.0]),
            ..Default::default()
        };
        let out = run(&h, Vector3::new(0.5, -0.01, 0.0), 0.5);
        assert_eq!(out.omega, 1);
        let gt = out.frame.tangential_part(&out.g_hat).norm();
        let gn = out.frame.normal_part(&out.g_hat).norm();
        assert_relative_eq!(gt, 0.5 * gn, epsilon = 1e-14);
        assert_relative_eq!(out.frame.x.x, 0.495, epsilon = 1e-13);
    }
}
