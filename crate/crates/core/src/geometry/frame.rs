use nalgebra::{Matrix3, Vector3};

use super::patch::{Patch, ShapeEval};
use crate::error::{Error, Result};

/// Differential geometry of a contact surface at one parametric point.
/// For curves only index 0 is meaningful; the unused slots are zero.
#[derive(Clone, Debug)]
pub struct SurfaceFrame {
    pub xi: [f64; 2],
    pub element: usize,
    pub dim: usize,
    pub x: Vector3<f64>,
    pub a: [Vector3<f64>; 2],
    pub a_dual: [Vector3<f64>; 2],
    pub n: Vector3<f64>,
    pub a_cov: [[f64; 2]; 2],
    pub a_con: [[f64; 2]; 2],
    pub b: [[f64; 2]; 2],
    /// Parametric derivatives `a_{α,β}` of the tangents.
    pub a_deriv: [[Vector3<f64>; 2]; 2],
    /// Current-to-reference area (or length) ratio.
    pub j: f64,
}

impl SurfaceFrame {
    pub fn p_n(&self) -> Matrix3<f64> {
        self.n * self.n.transpose()
    }

    pub fn p_tau(&self) -> Matrix3<f64> {
        Matrix3::identity() - self.p_n()
    }

    pub fn normal_part(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.n * self.n.dot(v)
    }

    pub fn tangential_part(&self, v: &Vector3<f64>) -> Vector3<f64> {
        v - self.normal_part(v)
    }
}

/// Frame at `xi` on `element` for the given control positions.
pub fn surface_frame(patch: &Patch, element: usize, xi: [f64; 2], controls: &[Vector3<f64>]) -> Result<SurfaceFrame> {
    let shape = patch.shape_functions(element, xi)?;
    frame_from_shape(patch, &shape, controls)
}

fn area_element(dim: usize, a: &[Vector3<f64>; 2]) -> f64 {
    if dim == 1 {
        a[0].norm()
    } else {
        a[0].cross(&a[1]).norm()
    }
}

/// Reference length/area element of the patch at the point of `shape`.
pub fn reference_area_element(patch: &Patch, shape: &ShapeEval) -> f64 {
    let r = patch.ref_controls();
    let dim = patch.param_dim();
    let a = [shape.tangent(r, 0), if dim == 2 { shape.tangent(r, 1) } else { Vector3::zeros() }];
    area_element(dim, &a)
}

fn scale_of(controls: &[Vector3<f64>]) -> f64 {
    let mut lo = Vector3::repeat(f64::INFINITY);
    let mut hi = Vector3::repeat(f64::NEG_INFINITY);
    for c in controls {
        lo = lo.inf(c);
        hi = hi.sup(c);
    }
    (hi - lo).norm().max(f64::MIN_POSITIVE)
}

pub fn frame_from_shape(patch: &Patch, shape: &ShapeEval, controls: &[Vector3<f64>]) -> Result<SurfaceFrame> {
    let dim = patch.param_dim();
    let x = shape.point(controls);
    let mut a = [Vector3::zeros(); 2];
    let mut a_deriv = [[Vector3::zeros(); 2]; 2];
    for al in 0..dim {
        a[al] = shape.tangent(controls, al);
        for be in 0..dim {
            a_deriv[al][be] = shape.tangent_deriv(controls, al, be);
        }
    }
    let scale = scale_of(patch.ref_controls());
    let measure = area_element(dim, &a);
    let threshold = 1e-14 * if dim == 1 { scale } else { scale * scale };
    if !(measure > threshold) {
        return Err(Error::DegenerateFrame { xi: shape.xi });
    }
    let sign = patch.normal_sign();
    let n = if dim == 1 {
        Vector3::new(-a[0].y, a[0].x, 0.0) * (sign / measure)
    } else {
        a[0].cross(&a[1]) * (sign / measure)
    };

    let mut a_cov = [[0.0; 2]; 2];
    let mut a_con = [[0.0; 2]; 2];
    if dim == 1 {
        a_cov[0][0] = a[0].dot(&a[0]);
        a_con[0][0] = 1.0 / a_cov[0][0];
    } else {
        for al in 0..2 {
            for be in 0..2 {
                a_cov[al][be] = a[al].dot(&a[be]);
            }
        }
        let det = a_cov[0][0] * a_cov[1][1] - a_cov[0][1] * a_cov[1][0];
        a_con = [
            [a_cov[1][1] / det, -a_cov[0][1] / det],
            [-a_cov[1][0] / det, a_cov[0][0] / det],
        ];
    }
    let mut a_dual = [Vector3::zeros(); 2];
    for al in 0..dim {
        for be in 0..dim {
            a_dual[al] += a[be] * a_con[al][be];
        }
    }
    let mut b = [[0.0; 2]; 2];
    for al in 0..dim {
        for be in 0..dim {
            b[al][be] = n.dot(&a_deriv[al][be]);
        }
    }
    let j = measure / reference_area_element(patch, shape);
    Ok(SurfaceFrame {
        xi: shape.xi,
        element: shape.element,
        dim,
        x,
        a,
        a_dual,
        n,
        a_cov,
        a_con,
        b,
        a_deriv,
        j,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(x: f64, y: f64, z: f64) -> Vector3<f64> {
        Vector3::new(x, y, z)
    }

    fn unit_square() -> Patch {
        let nodes = vec![v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0), v(1.0, 1.0, 0.0)];
        Patch::lagrange_grid([1, 1], nodes).unwrap()
    }

    #[test]
    fn flat_square_identity() {
        let p = unit_square();
        let f = surface_frame(&p, 0, [0.3, 0.6], p.ref_controls()).unwrap();
        assert_relative_eq!(f.n, v(0.0, 0.0, 1.0));
        assert_eq!(f.a_cov, [[1.0, 0.0], [0.0, 1.0]]);
        assert_relative_eq!(f.j, 1.0);
    }

    #[test]
    fn stretched_square_has_area_ratio_four() {
        let p = unit_square();
        let cur: Vec<_> = p.ref_controls().iter().map(|x| x * 2.0).collect();
        let f = surface_frame(&p, 0, [0.5, 0.5], &cur).unwrap();
        assert_relative_eq!(f.j, 4.0, epsilon = 1e-14);
    }

    #[test]
    fn collapsed_square_is_degenerate() {
        let p = unit_square();
        let cur = vec![Vector3::zeros(); 4];
        assert!(matches!(
            surface_frame(&p, 0, [0.5, 0.5], &cur),
            Err(Error::DegenerateFrame { .. })
        ));
    }

    #[test]
    fn quarter_cylinder_curvature() {
        let r = 2.5;
        let w = std::f64::consts::FRAC_1_SQRT_2;
        let arc = [v(r, 0.0, 0.0), v(r, r, 0.0), v(0.0, r, 0.0)];
        let mut ctrl = vec![];
        let mut weights = vec![];
        for z in [0.0, 1.0] {
            for (i, c) in arc.iter().enumerate() {
                ctrl.push(c + v(0.0, 0.0, z));
                weights.push(if i == 1 { w } else { 1.0 });
            }
        }
        let p = Patch::nurbs_surface(
            [2, 1],
            [vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0], vec![0.0, 0.0, 1.0, 1.0]],
            [3, 2],
            ctrl.clone(),
            weights,
        )
        .unwrap();
        for &s in &[0.1, 0.5, 0.77] {
            let f = surface_frame(&p, 0, [s, 0.4], &ctrl).unwrap();
            assert_relative_eq!(f.x.xy().norm(), r, epsilon = 1e-12);
            // a₁ × a₂ points outward here, so b₁₁ = −a₁₁/R
            assert_relative_eq!(f.b[0][0] / f.a_cov[0][0], -1.0 / r, epsilon = 1e-12);
            assert_relative_eq!(f.b[1][1], 0.0, epsilon = 1e-14);
            assert_relative_eq!(f.b[0][1], 0.0, epsilon = 1e-14);
        }
    }
}
