use nalgebra::{Matrix3, SMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Material tangent `∂P_iJ/∂F_kL` stored at `(3i+J, 3k+L)`.
pub type Tangent = SMatrix<f64, 9, 9>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Material {
    #[serde(rename = "E")]
    pub e: f64,
    pub nu: f64,
}

impl Material {
    pub fn new(e: f64, nu: f64) -> Result<Self> {
        let m = Self { e, nu };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.e > 0.0) || !(self.nu > -1.0 && self.nu < 0.5) {
            return Err(Error::Scene(format!(
                "material needs E > 0 and -1 < nu < 0.5, got E = {}, nu = {}",
                self.e, self.nu
            )));
        }
        Ok(())
    }

    /// Shear modulus and first Lamé parameter.
    pub fn lame(&self) -> (f64, f64) {
        let g = self.e / (2.0 * (1.0 + self.nu));
        let lambda = self.e * self.nu / ((1.0 + self.nu) * (1.0 - 2.0 * self.nu));
        (g, lambda)
    }
}

/// Strain energy `W = G/2 (tr C − 3) − G ln J + Λ/2 (ln J)²`.
pub fn neo_hookean_energy(f: &Matrix3<f64>, mat: &Material) -> Result<f64> {
    let det = f.determinant();
    if !(det > 0.0) {
        return Err(Error::ElementInversion { element: usize::MAX, det });
    }
    let (g, lambda) = mat.lame();
    let ln_j = det.ln();
    Ok(0.5 * g * ((f.transpose() * f).trace() - 3.0) - g * ln_j + 0.5 * lambda * ln_j * ln_j)
}

/// First Piola–Kirchhoff stress and material tangent of the Neo-Hookean
/// energy. Plane strain is obtained by passing `F` with `F₃₃ = 1`.
pub fn neo_hookean_stress(f: &Matrix3<f64>, mat: &Material) -> Result<(Matrix3<f64>, Tangent)> {
    let det = f.determinant();
    if !(det > 0.0) {
        return Err(Error::ElementInversion { element: usize::MAX, det });
    }
    let (g, lambda) = mat.lame();
    let ln_j = det.ln();
    let finv = f.try_inverse().ok_or(Error::ElementInversion { element: usize::MAX, det })?;
    let finv_t = finv.transpose();
    let p = (f - finv_t) * g + finv_t * (lambda * ln_j);
    let mut a = Tangent::zeros();
    let coef = g - lambda * ln_j;
    for i in 0..3 {
        for jj in 0..3 {
            for k in 0..3 {
                for l in 0..3 {
                    let mut v = coef * finv[(l, i)] * finv[(jj, k)] + lambda * finv[(jj, i)] * finv[(l, k)];
                    if i == k && jj == l {
                        v += g;
                    }
                    a[(3 * i + jj, 3 * k + l)] = v;
                }
            }
        }
    }
    Ok((p, a))
}

/// Cauchy stress `σ = J⁻¹ P Fᵀ`.
pub fn cauchy_stress(f: &Matrix3<f64>, mat: &Material) -> Result<Matrix3<f64>> {
    let (p, _) = neo_hookean_stress(f, mat)?;
    Ok(p * f.transpose() / f.determinant())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_state_is_stress_free() {
        let m = Material::new(1.0, 0.3).unwrap();
        let (p, _) = neo_hookean_stress(&Matrix3::identity(), &m).unwrap();
        assert_relative_eq!(p, Matrix3::zeros(), epsilon = 1e-15);
    }

    #[test]
    fn small_strain_limit_is_linear_elasticity() {
        let m = Material::new(2.0, 0.3).unwrap();
        let (g, lambda) = m.lame();
        let (_, a) = neo_hookean_stress(&Matrix3::identity(), &m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let d = |x: usize, y: usize| if x == y { 1.0 } else { 0.0 };
                        let c = lambda * d(i, j) * d(k, l) + g * (d(i, k) * d(j, l) + d(i, l) * d(j, k));
                        assert_relative_eq!(a[(3 * i + j, 3 * k + l)], c, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn stress_is_energy_gradient_and_tangent_is_stress_gradient() {
        let m = Material::new(1.0, 0.3).unwrap();
        let f = Matrix3::new(1.1, 0.05, 0.0, -0.02, 0.95, 0.03, 0.01, 0.0, 1.02);
        let (p, a) = neo_hookean_stress(&f, &m).unwrap();
        let h = 1e-6;
        for r in 0..3 {
            for c in 0..3 {
                let mut fp = f;
                let mut fm = f;
                fp[(r, c)] += h;
                fm[(r, c)] -= h;
                let dw = (neo_hookean_energy(&fp, &m).unwrap() - neo_hookean_energy(&fm, &m).unwrap()) / (2.0 * h);
                assert_relative_eq!(p[(r, c)], dw, epsilon = 1e-8);
                let dp = (neo_hookean_stress(&fp, &m).unwrap().0 - neo_hookean_stress(&fm, &m).unwrap().0) / (2.0 * h);
                for i in 0..3 {
                    for j in 0..3 {
                        assert_relative_eq!(a[(3 * i + j, 3 * r + c)], dp[(i, j)], epsilon = 1e-7);
                    }
                }
            }
        }
    }

    #[test]
    fn inverted_gradient_is_rejected() {
        let m = Material::new(1.0, 0.3).unwrap();
        let f = Matrix3::from_diagonal(&nalgebra::Vector3::new(-1.0, 1.0, 1.0));
        assert!(matches!(neo_hookean_stress(&f, &m), Err(Error::ElementInversion { .. })));
    }
}
