use nalgebra::{DMatrix, DVector, Matrix2, Matrix3, Vector3};

use super::material::{cauchy_stress, neo_hookean_stress, Material};
use crate::error::{Error, Result};

const GAUSS2: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];

/// Bilinear quadrilateral (2D, plane strain) or trilinear hexahedron (3D).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementKind {
    Quad4,
    Hex8,
}

impl ElementKind {
    pub fn for_dim(dim: usize) -> Self {
        if dim == 2 {
            Self::Quad4
        } else {
            Self::Hex8
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Self::Quad4 => 2,
            Self::Hex8 => 3,
        }
    }

    pub fn n_nodes(self) -> usize {
        match self {
            Self::Quad4 => 4,
            Self::Hex8 => 8,
        }
    }

    fn corners(self) -> &'static [[f64; 3]] {
        const Q: [[f64; 3]; 4] = [[-1.0, -1.0, 0.0], [1.0, -1.0, 0.0], [1.0, 1.0, 0.0], [-1.0, 1.0, 0.0]];
        const H: [[f64; 3]; 8] = [
            [-1.0, -1.0, -1.0],
            [1.0, -1.0, -1.0],
            [1.0, 1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
            [1.0, -1.0, 1.0],
            [1.0, 1.0, 1.0],
            [-1.0, 1.0, 1.0],
        ];
        match self {
            Self::Quad4 => &Q,
            Self::Hex8 => &H,
        }
    }

    /// Quadrature points `(ξ, weight)` of the 2-per-direction Gauss rule.
    pub fn quadrature(self) -> Vec<([f64; 3], f64)> {
        let mut out = vec![];
        match self {
            Self::Quad4 => {
                for &b in &GAUSS2 {
                    for &a in &GAUSS2 {
                        out.push(([a, b, 0.0], 1.0));
                    }
                }
            }
            Self::Hex8 => {
                for &c in &GAUSS2 {
                    for &b in &GAUSS2 {
                        for &a in &GAUSS2 {
                            out.push(([a, b, c], 1.0));
                        }
                    }
                }
            }
        }
        out
    }

    /// Local derivatives `∂N_a/∂ξ` at `xi`.
    pub fn shape_derivs(self, xi: [f64; 3]) -> Vec<[f64; 3]> {
        let dim = self.dim();
        self.corners()
            .iter()
            .map(|c| {
                let f: Vec<f64> = (0..dim).map(|k| 0.5 * (1.0 + c[k] * xi[k])).collect();
                let mut d = [0.0; 3];
                for k in 0..dim {
                    d[k] = 0.5 * c[k];
                    for m in 0..dim {
                        if m != k {
                            d[k] *= f[m];
                        }
                    }
                }
                d
            })
            .collect()
    }

    pub fn shape_values(self, xi: [f64; 3]) -> Vec<f64> {
        let dim = self.dim();
        self.corners()
            .iter()
            .map(|c| (0..dim).map(|k| 0.5 * (1.0 + c[k] * xi[k])).product())
            .collect()
    }
}

/// Spatial shape gradients `∂N_a/∂X` and `det(∂X/∂ξ)` at one point.
fn reference_gradients(kind: ElementKind, coords: &[Vector3<f64>], xi: [f64; 3]) -> Option<(Vec<Vector3<f64>>, f64)> {
    let dn = kind.shape_derivs(xi);
    match kind {
        ElementKind::Quad4 => {
            let mut j = Matrix2::zeros();
            for (x, d) in coords.iter().zip(&dn) {
                for r in 0..2 {
                    for c in 0..2 {
                        j[(r, c)] += x[r] * d[c];
                    }
                }
            }
            let det = j.determinant();
            let inv = j.try_inverse()?;
            let grads = dn
                .iter()
                .map(|d| {
                    let g = inv.transpose() * nalgebra::Vector2::new(d[0], d[1]);
                    Vector3::new(g.x, g.y, 0.0)
                })
                .collect();
            Some((grads, det))
        }
        ElementKind::Hex8 => {
            let mut j = Matrix3::zeros();
            for (x, d) in coords.iter().zip(&dn) {
                for r in 0..3 {
                    for c in 0..3 {
                        j[(r, c)] += x[r] * d[c];
                    }
                }
            }
            let det = j.determinant();
            let inv = j.try_inverse()?;
            let grads = dn.iter().map(|d| inv.transpose() * Vector3::new(d[0], d[1], d[2])).collect();
            Some((grads, det))
        }
    }
}

fn deformation_gradient(grads: &[Vector3<f64>], disp: &[Vector3<f64>], dim: usize) -> Matrix3<f64> {
    let mut f = Matrix3::identity();
    for (g, u) in grads.iter().zip(disp) {
        for i in 0..dim {
            for jj in 0..dim {
                f[(i, jj)] += u[i] * g[jj];
            }
        }
    }
    f
}

/// Internal force and tangent stiffness of one bulk element. Vectors are
/// ordered node-major, `dim` components per node.
pub fn bulk_element_forces(
    kind: ElementKind,
    element: usize,
    coords: &[Vector3<f64>],
    disp: &[Vector3<f64>],
    mat: &Material,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let dim = kind.dim();
    let nn = kind.n_nodes();
    let mut f_int = DVector::zeros(nn * dim);
    let mut k = DMatrix::zeros(nn * dim, nn * dim);
    for (xi, w) in kind.quadrature() {
        let (grads, det0) = reference_gradients(kind, coords, xi).ok_or(Error::ElementInversion { element, det: 0.0 })?;
        if !(det0 > 0.0) {
            return Err(Error::ElementInversion { element, det: det0 });
        }
        let f = deformation_gradient(&grads, disp, dim);
        let (p, a) = neo_hookean_stress(&f, mat).map_err(|e| match e {
            Error::ElementInversion { det, .. } => Error::ElementInversion { element, det },
            other => other,
        })?;
        let dv = w * det0;
        for an in 0..nn {
            for i in 0..dim {
                let mut s = 0.0;
                for jj in 0..dim {
                    s += p[(i, jj)] * grads[an][jj];
                }
                f_int[an * dim + i] += s * dv;
            }
        }
        for an in 0..nn {
            for i in 0..dim {
                for bn in 0..nn {
                    for kk in 0..dim {
                        let mut s = 0.0;
                        for jj in 0..dim {
                            for l in 0..dim {
                                s += grads[an][jj] * a[(3 * i + jj, 3 * kk + l)] * grads[bn][l];
                            }
                        }
                        k[(an * dim + i, bn * dim + kk)] += s * dv;
                    }
                }
            }
        }
    }
    Ok((f_int, k))
}

/// Total strain energy of one element.
pub fn bulk_element_energy(kind: ElementKind, coords: &[Vector3<f64>], disp: &[Vector3<f64>], mat: &Material) -> Result<f64> {
    let dim = kind.dim();
    let mut e = 0.0;
    for (xi, w) in kind.quadrature() {
        let (grads, det0) = reference_gradients(kind, coords, xi).ok_or(Error::ElementInversion { element: 0, det: 0.0 })?;
        let f = deformation_gradient(&grads, disp, dim);
        e += w * det0 * super::material::neo_hookean_energy(&f, mat)?;
    }
    Ok(e)
}

/// Mean Cauchy stress trace over the element's quadrature points.
pub fn element_mean_trace(kind: ElementKind, coords: &[Vector3<f64>], disp: &[Vector3<f64>], mat: &Material) -> Result<f64> {
    let dim = kind.dim();
    let q = kind.quadrature();
    let mut sum = 0.0;
    for (xi, _) in &q {
        let (grads, _) = reference_gradients(kind, coords, *xi).ok_or(Error::ElementInversion { element: 0, det: 0.0 })?;
        let f = deformation_gradient(&grads, disp, dim);
        sum += cauchy_stress(&f, mat)?.trace();
    }
    Ok(sum / q.len() as f64)
}
