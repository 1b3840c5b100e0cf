use nalgebra::Vector3;

use super::gap::sign;
use super::projection::length_scale;
use crate::error::{Error, Result};
use crate::geometry::{frame_from_shape, Patch, ShapeEval, SurfaceFrame};

pub const MAX_SLIDING_ITERATIONS: usize = 20;
const MAX_HALVINGS: usize = 5;

/// Converged sliding point together with the local linearization needed by
/// the slip tangent.
#[derive(Clone, Debug)]
pub struct SlidingPoint {
    pub xi: [f64; 2],
    pub frame: SurfaceFrame,
    pub shape: ShapeEval,
    /// `g = x_k − x(ξ_m)`.
    pub g: Vector3<f64>,
    /// Signed normal gap `g·n`.
    pub g_n: f64,
    /// Sliding direction; `None` when the trial gap has no tangential part.
    pub tau: Option<Vector3<f64>>,
    /// `‖P_τ ĝⁿ‖` at ξ_m.
    pub ptau_norm: f64,
    /// Friction coefficient actually used (0 for a degenerate direction).
    pub mu: f64,
    pub g_tau_max: Vector3<f64>,
    /// `∂f_α/∂ξ^β`.
    pub jac: [[f64; 2]; 2],
    /// Inverse Jacobian `c^{αβ}`.
    pub cinv: [[f64; 2]; 2],
    pub c: [Vector3<f64>; 2],
    /// `d[α][γ] = d_α^γ`.
    pub d: [[Vector3<f64>; 2]; 2],
    pub m: [Vector3<f64>; 2],
    pub iterations: usize,
    /// Final `max_α |f_α|`.
    pub residual: f64,
    pub residual_history: Vec<f64>,
    pub on_boundary: bool,
}

struct Local {
    frame: SurfaceFrame,
    shape: ShapeEval,
    g: Vector3<f64>,
    g_n: f64,
    tau: Option<Vector3<f64>>,
    ptau_norm: f64,
    mu: f64,
    g_tau_max: Vector3<f64>,
    f: [f64; 2],
    jac: [[f64; 2]; 2],
    c: [Vector3<f64>; 2],
    d: [[Vector3<f64>; 2]; 2],
    m: [Vector3<f64>; 2],
}

fn evaluate(
    patch: &Patch,
    controls: &[Vector3<f64>],
    x_k: &Vector3<f64>,
    g_hat_prev: &Vector3<f64>,
    mu: f64,
    xi: [f64; 2],
    tol_tau: f64,
) -> Result<Local> {
    let shape = patch.shape_at(xi)?;
    let frame = frame_from_shape(patch, &shape, controls)?;
    let dim = frame.dim;
    let n = frame.n;
    let g = x_k - frame.x;
    let g_n = g.dot(&n);
    let ptau = frame.tangential_part(g_hat_prev);
    let ptau_norm = ptau.norm();
    let (tau, mu) = if mu > 0.0 && ptau_norm > tol_tau {
        (Some(ptau / ptau_norm), mu)
    } else {
        (None, 0.0)
    };
    let tau_v = tau.unwrap_or_else(Vector3::zeros);
    let g_tau_max = tau_v * (mu * g_n.abs());
    let s = sign(g_n);
    let gh_n = g_hat_prev.dot(&n);
    let ratio = if mu > 0.0 { mu * g_n.abs() / ptau_norm } else { 0.0 };

    let mut c = [Vector3::zeros(); 2];
    let mut d = [[Vector3::zeros(); 2]; 2];
    let mut m = [Vector3::zeros(); 2];
    let mut f = [0.0; 2];
    let tau_co: Vec<f64> = (0..dim).map(|a| tau_v.dot(&frame.a[a])).collect();
    let tau_contra: Vec<f64> = (0..dim).map(|a| tau_v.dot(&frame.a_dual[a])).collect();
    let g_contra: Vec<f64> = (0..dim).map(|a| g.dot(&frame.a_dual[a])).collect();
    for al in 0..dim {
        f[al] = (g - g_tau_max).dot(&frame.a[al]);
        c[al] = frame.a[al] - n * (mu * s * tau_co[al]);
        m[al] = (frame.a[al] - tau_v * tau_co[al]) * ratio;
        for ga in 0..dim {
            let delta = if al == ga { 1.0 } else { 0.0 };
            d[al][ga] = n * (ratio * (delta - tau_co[al] * tau_contra[ga]) * gh_n - mu * s * tau_co[al] * g_contra[ga]);
        }
    }
    let mut jac = [[0.0; 2]; 2];
    for al in 0..dim {
        for be in 0..dim {
            let mut v = -c[al].dot(&frame.a[be]) + (g - g_tau_max).dot(&frame.a_deriv[al][be]);
            for ga in 0..dim {
                v -= d[al][ga].dot(&frame.a_deriv[ga][be]);
            }
            jac[al][be] = v;
        }
    }
    Ok(Local {
        frame,
        shape,
        g,
        g_n,
        tau,
        ptau_norm,
        mu,
        g_tau_max,
        f,
        jac,
        c,
        d,
        m,
    })
}

fn invert(jac: [[f64; 2]; 2], dim: usize) -> Option<[[f64; 2]; 2]> {
    if dim == 1 {
        if jac[0][0] == 0.0 || !jac[0][0].is_finite() {
            return None;
        }
        return Some([[1.0 / jac[0][0], 0.0], [0.0, 0.0]]);
    }
    let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some([
        [jac[1][1] / det, -jac[0][1] / det],
        [-jac[1][0] / det, jac[0][0] / det],
    ])
}

fn finish(local: Local, xi: [f64; 2], iterations: usize, history: Vec<f64>, on_boundary: bool) -> Result<SlidingPoint> {
    let dim = local.frame.dim;
    let cinv = invert(local.jac, dim).ok_or(Error::DegenerateFrame { xi })?;
    Ok(SlidingPoint {
        xi,
        frame: local.frame,
        shape: local.shape,
        g: local.g,
        g_n: local.g_n,
        tau: local.tau,
        ptau_norm: local.ptau_norm,
        mu: local.mu,
        g_tau_max: local.g_tau_max,
        jac: local.jac,
        cinv,
        c: local.c,
        d: local.d,
        m: local.m,
        iterations,
        residual: history.last().copied().unwrap_or(0.0),
        residual_history: history,
        on_boundary,
    })
}

fn newton(
    x_k: &Vector3<f64>,
    patch: &Patch,
    controls: &[Vector3<f64>],
    g_hat_prev: &Vector3<f64>,
    mu: f64,
    start: [f64; 2],
    tol_tau: f64,
) -> Result<SlidingPoint> {
    let dim = patch.param_dim();
    let dom = patch.domain();
    let scale = length_scale(controls);
    let (mut xi, _) = patch.clamp(start);
    let mut history = Vec::new();
    let mut local = evaluate(patch, controls, x_k, g_hat_prev, mu, xi, tol_tau)?;
    for it in 0..=MAX_SLIDING_ITERATIONS {
        let res = (0..dim).map(|a| local.f[a].abs()).fold(0.0, f64::max);
        if !res.is_finite() {
            break;
        }
        history.push(res);
        let a_max = (0..dim).map(|a| local.frame.a[a].norm()).fold(0.0, f64::max);
        let tol = 1e-13 * scale * a_max;
        let stalled = history.len() >= 2 && res >= history[history.len() - 2] && res <= 1e-10 * scale * a_max;
        if res <= tol || stalled {
            return finish(local, xi, it, history, false);
        }
        if it == MAX_SLIDING_ITERATIONS {
            break;
        }
        let cinv = match invert(local.jac, dim) {
            Some(c) => c,
            None => break,
        };
        let mut step = [0.0; 2];
        for al in 0..dim {
            for be in 0..dim {
                step[al] -= cinv[al][be] * local.f[be];
            }
        }
        // Pull iterates back into the domain by halving, then clamping.
        let mut factor = 1.0;
        let inside = |s: [f64; 2], f: f64| (0..dim).all(|k| {
            let t = xi[k] + f * s[k];
            t >= dom[k][0] && t <= dom[k][1]
        });
        let mut halvings = 0;
        while !inside(step, factor) && halvings < MAX_HALVINGS {
            factor *= 0.5;
            halvings += 1;
        }
        let (next, _) = patch.clamp([xi[0] + factor * step[0], xi[1] + factor * step[1]]);
        let blocked = (0..dim).any(|k| {
            let at_edge = next[k] <= dom[k][0] || next[k] >= dom[k][1];
            at_edge && (next[k] - xi[k]).abs() <= 1e-15 * (dom[k][1] - dom[k][0])
        });
        if blocked {
            return finish(local, xi, it, history, true);
        }
        xi = next;
        local = evaluate(patch, controls, x_k, g_hat_prev, mu, xi, tol_tau)?;
    }
    Err(Error::NoConvergence {
        what: "sliding point",
        iterations: MAX_SLIDING_ITERATIONS,
        residual: history.last().copied().unwrap_or(f64::NAN),
    })
}

/// Solves `f_α = (g_e − g_τ^max)·a_α = 0` for the sliding point, starting
/// from `guess` and retrying once from `fallback`.
#[allow(clippy::too_many_arguments)]
pub fn sliding_point(
    x_k: &Vector3<f64>,
    patch: &Patch,
    controls: &[Vector3<f64>],
    g_hat_prev: &Vector3<f64>,
    mu: f64,
    guess: [f64; 2],
    fallback: Option<[f64; 2]>,
    tol_tau: f64,
) -> Result<SlidingPoint> {
    match newton(x_k, patch, controls, g_hat_prev, mu, guess, tol_tau) {
        Ok(sp) => Ok(sp),
        Err(e) if e.is_recoverable() => match fallback {
            Some(start) => newton(x_k, patch, controls, g_hat_prev, mu, start, tol_tau),
            None => Err(e),
        },
        Err(e) => Err(e),
    }
}

/// Closed-form sliding point on a straight rigid line in 2D.
pub fn sliding_point_flat_2d(
    x_k: &Vector3<f64>,
    plane: &Patch,
    controls: &[Vector3<f64>],
    g_hat_prev: &Vector3<f64>,
    mu: f64,
) -> Result<Vector3<f64>> {
    if plane.param_dim() != 1 || controls.len() < 2 {
        return Err(Error::InvalidPatch("closed-form sliding point needs a 2D line".into()));
    }
    let origin = controls[0];
    let t = (controls[1] - origin)
        .try_normalize(0.0)
        .ok_or(Error::DegenerateFrame { xi: [0.0; 2] })?;
    let n = Vector3::new(-t.y, t.x, 0.0) * plane.normal_sign();
    let rel = x_k - origin;
    let s_k = rel.dot(&t);
    let g_n = rel.dot(&n);
    if mu == 0.0 {
        return Ok(origin + t * s_k);
    }
    let h_t = g_hat_prev.dot(&t);
    if h_t == 0.0 {
        return Err(Error::DegenerateTangent);
    }
    let h_n = g_hat_prev.dot(&n);
    let s_m = s_k - mu * sign(h_n) / sign(h_t) * g_n;
    Ok(origin + t * s_m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn closed_form_example() {
        // line along x; normal −y so that g_n = −0.1 for a point at y = 0.1
        let mut p = Patch::rigid_line(Vector3::zeros(), Vector3::x(), [-5.0, 5.0]).unwrap();
        p.set_normal_sign(-1.0);
        let x_k = Vector3::new(1.0, 0.1, 0.0);
        let gh = Vector3::new(0.3, 0.1, 0.0);
        let xm = sliding_point_flat_2d(&x_k, &p, p.ref_controls(), &gh, 0.5).unwrap();
        assert_relative_eq!(xm.x, 0.95, epsilon = 1e-15);
        let x0 = sliding_point_flat_2d(&x_k, &p, p.ref_controls(), &gh, 0.0).unwrap();
        assert_relative_eq!(x0.x, 1.0);
        assert!(matches!(
            sliding_point_flat_2d(&x_k, &p, p.ref_controls(), &Vector3::new(0.0, 0.1, 0.0), 0.5),
            Err(Error::DegenerateTangent)
        ));
    }

    #[test]
    fn general_solver_matches_closed_form() {
        let mut p = Patch::rigid_line(Vector3::new(-1.0, 0.0, 0.0), Vector3::x(), [0.0, 10.0]).unwrap();
        p.set_normal_sign(-1.0);
        let x_k = Vector3::new(1.0, -0.1, 0.0);
        let gh = Vector3::new(-0.4, -0.1, 0.0);
        let sp = sliding_point(&x_k, &p, p.ref_controls(), &gh, 0.5, [1.0, 0.0], None, 1e-10).unwrap();
        let xm = sliding_point_flat_2d(&x_k, &p, p.ref_controls(), &gh, 0.5).unwrap();
        assert_relative_eq!(sp.frame.x, xm, epsilon = 1e-12);
        assert!(sp.residual <= 1e-12);
    }
}
