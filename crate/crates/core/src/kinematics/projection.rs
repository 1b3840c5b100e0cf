use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geometry::{frame_from_shape, Patch, SurfaceFrame};

const MAX_ITERATIONS: usize = 30;
const MAX_HALVINGS: usize = 5;

#[derive(Clone, Debug)]
pub struct Projection {
    pub xi: [f64; 2],
    pub frame: SurfaceFrame,
    /// The foot point sits on the edge of the parameter domain.
    pub on_boundary: bool,
    pub iterations: usize,
}

impl Projection {
    pub fn distance(&self, x_k: &Vector3<f64>) -> f64 {
        (x_k - self.frame.x).norm()
    }
}

/// Diagonal of the bounding box of `controls`.
pub fn length_scale(controls: &[Vector3<f64>]) -> f64 {
    let mut lo = Vector3::repeat(f64::INFINITY);
    let mut hi = Vector3::repeat(f64::NEG_INFINITY);
    for c in controls {
        lo = lo.inf(c);
        hi = hi.sup(c);
    }
    (hi - lo).norm().max(f64::MIN_POSITIVE)
}

/// Axis-aligned bounding box of `controls`.
pub fn bounding_box(controls: &[Vector3<f64>]) -> (Vector3<f64>, Vector3<f64>) {
    let mut lo = Vector3::repeat(f64::INFINITY);
    let mut hi = Vector3::repeat(f64::NEG_INFINITY);
    for c in controls {
        lo = lo.inf(c);
        hi = hi.sup(c);
    }
    (lo, hi)
}

pub(crate) fn frame_at(patch: &Patch, xi: [f64; 2], controls: &[Vector3<f64>]) -> Result<SurfaceFrame> {
    let shape = patch.shape_at(xi)?;
    frame_from_shape(patch, &shape, controls)
}

/// Nearest of a few sample points per element; used as a Newton start.
pub fn sampled_guess(x_k: &Vector3<f64>, patch: &Patch, controls: &[Vector3<f64>], per_element: usize) -> Result<[f64; 2]> {
    let mut best = (f64::INFINITY, [0.0; 2]);
    let dim = patch.param_dim();
    for e in 0..patch.n_elements() {
        let dom = patch.element_domain(e)?;
        let n1 = if dim == 2 { per_element } else { 1 };
        for j in 0..n1 {
            for i in 0..per_element {
                let t0 = (i as f64 + 0.5) / per_element as f64;
                let t1 = (j as f64 + 0.5) / per_element as f64;
                let xi = [
                    dom[0][0] + t0 * (dom[0][1] - dom[0][0]),
                    if dim == 2 { dom[1][0] + t1 * (dom[1][1] - dom[1][0]) } else { 0.0 },
                ];
                let d = (patch.shape_functions(e, xi)?.point(controls) - x_k).norm_squared();
                if d < best.0 {
                    best = (d, xi);
                }
            }
        }
    }
    Ok(best.1)
}

/// Closest-point projection of `x_k` onto the patch.
pub fn closest_point_projection(
    x_k: &Vector3<f64>,
    patch: &Patch,
    controls: &[Vector3<f64>],
    guess: Option<[f64; 2]>,
) -> Result<Projection> {
    let start = match (guess, patch.control_parameters()) {
        (Some(g), _) => Some(g),
        (None, Some(params)) => controls
            .iter()
            .zip(params)
            .min_by(|a, b| (a.0 - x_k).norm_squared().total_cmp(&(b.0 - x_k).norm_squared()))
            .map(|(_, xi)| xi),
        (None, None) => None,
    };
    if let Some(start) = start {
        if let Some(p) = newton_projection(x_k, patch, controls, start)? {
            return Ok(p);
        }
    }
    if let Some(p) = newton_projection(x_k, patch, controls, sampled_guess(x_k, patch, controls, 4)?)? {
        return Ok(p);
    }
    // Deterministic multi-start over a 5-per-direction grid of the domain.
    let dom = patch.domain();
    let dim = patch.param_dim();
    let mut best: Option<Projection> = None;
    let n1 = if dim == 2 { 5 } else { 1 };
    for j in 0..n1 {
        for i in 0..5 {
            let xi = [
                dom[0][0] + (i as f64 + 0.5) / 5.0 * (dom[0][1] - dom[0][0]),
                dom[1][0] + (j as f64 + 0.5) / 5.0 * (dom[1][1] - dom[1][0]),
            ];
            if let Some(p) = newton_projection(x_k, patch, controls, xi)? {
                if best.as_ref().map_or(true, |b| p.distance(x_k) < b.distance(x_k)) {
                    best = Some(p);
                }
            }
        }
    }
    best.ok_or(Error::NoConvergence {
        what: "closest-point projection",
        iterations: MAX_ITERATIONS,
        residual: f64::NAN,
    })
}

fn solve2(jac: [[f64; 2]; 2], rhs: [f64; 2], dim: usize) -> Option<[f64; 2]> {
    if dim == 1 {
        if jac[0][0] == 0.0 {
            return None;
        }
        return Some([rhs[0] / jac[0][0], 0.0]);
    }
    let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some([
        (jac[1][1] * rhs[0] - jac[0][1] * rhs[1]) / det,
        (jac[0][0] * rhs[1] - jac[1][0] * rhs[0]) / det,
    ])
}

/// Damped Newton on `f_α = g·a_α`; `None` if it fails to converge.
fn newton_projection(x_k: &Vector3<f64>, patch: &Patch, controls: &[Vector3<f64>], start: [f64; 2]) -> Result<Option<Projection>> {
    let dim = patch.param_dim();
    let dom = patch.domain();
    let scale = length_scale(controls);
    let (mut xi, _) = patch.clamp(start);
    let mut frame = frame_at(patch, xi, controls)?;
    for it in 0..=MAX_ITERATIONS {
        let g = x_k - frame.x;
        let mut f = [0.0; 2];
        let mut hess = [[0.0; 2]; 2];
        for al in 0..dim {
            f[al] = g.dot(&frame.a[al]);
            for be in 0..dim {
                hess[al][be] = frame.a_cov[al][be] - g.dot(&frame.a_deriv[al][be]);
            }
        }
        // Fall back to the metric when the distance Hessian is indefinite.
        let det = if dim == 1 { hess[0][0] } else { hess[0][0] * hess[1][1] - hess[0][1] * hess[1][0] };
        if !(hess[0][0] > 0.0 && det > 0.0) {
            hess = frame.a_cov;
        }
        // Coordinates pinned at the boundary with the descent pointing outward.
        let mut pinned = [false; 2];
        for k in 0..dim {
            let at_lo = xi[k] <= dom[k][0];
            let at_hi = xi[k] >= dom[k][1];
            // f = −½∇‖g‖², so the descent direction is +f.
            if (at_lo && f[k] < 0.0) || (at_hi && f[k] > 0.0) {
                pinned[k] = true;
            }
        }
        let free: Vec<usize> = (0..dim).filter(|&k| !pinned[k]).collect();
        let converged = free
            .iter()
            .all(|&k| f[k].abs() <= 1e-13 * scale * frame.a[k].norm().max(1e-300));
        if converged {
            let on_boundary = pinned.iter().any(|&p| p);
            return Ok(Some(Projection {
                xi,
                frame,
                on_boundary,
                iterations: it,
            }));
        }
        if it == MAX_ITERATIONS {
            break;
        }
        let mut step = [0.0; 2];
        match free.len() {
            0 => unreachable!(),
            1 => {
                let k = free[0];
                step[k] = f[k] / hess[k][k];
            }
            _ => match solve2(hess, f, dim) {
                Some(s) => step = s,
                None => return Ok(None),
            },
        }
        let d0 = g.norm_squared();
        let mut accepted = false;
        let mut factor = 1.0;
        for _ in 0..=MAX_HALVINGS {
            let trial = [xi[0] + factor * step[0], xi[1] + factor * step[1]];
            let (trial, _) = patch.clamp(trial);
            let tf = frame_at(patch, trial, controls)?;
            let d1 = (x_k - tf.x).norm_squared();
            if d1 <= d0 * (1.0 + 1e-12) + 1e-30 {
                xi = trial;
                frame = tf;
                accepted = true;
                break;
            }
            factor *= 0.5;
        }
        if !accepted {
            // No descent left: the point is stationary to round-off.
            let residual = free.iter().map(|&k| f[k].abs()).fold(0.0, f64::max);
            if residual <= 1e-9 * scale * scale {
                return Ok(Some(Projection {
                    xi,
                    frame,
                    on_boundary: pinned.iter().any(|&p| p),
                    iterations: it,
                }));
            }
            return Ok(None);
        }
    }
    Ok(None)
}
