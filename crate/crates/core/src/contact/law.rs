use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SurfaceFrame;

/// Quadratic interaction potential `W = ½ ĝ·ε ĝ` with
/// `ε = ε_n P_n + ε_τ P_τ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltyLaw {
    pub eps_n: f64,
    pub eps_tau: f64,
}

impl PenaltyLaw {
    pub fn isotropic(eps: f64) -> Self {
        Self { eps_n: eps, eps_tau: eps }
    }

    pub fn is_isotropic(&self) -> bool {
        self.eps_n == self.eps_tau
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps_n > 0.0) || !(self.eps_tau >= 0.0) {
            return Err(Error::Scene(format!(
                "penalty parameters need eps_n > 0 and eps_tau >= 0, got {} and {}",
                self.eps_n, self.eps_tau
            )));
        }
        Ok(())
    }

    pub fn tensor(&self, frame: &SurfaceFrame) -> Matrix3<f64> {
        let pn = frame.p_n();
        pn * self.eps_n + (Matrix3::identity() - pn) * self.eps_tau
    }

    /// Friction coefficient of the gap cone giving the traction cone `μ`:
    /// `‖ε_τ g_τ‖ = μ ε_n |g_n|`.
    pub fn cone_mu(&self, mu: f64) -> f64 {
        if self.eps_tau > 0.0 {
            mu * self.eps_n / self.eps_tau
        } else {
            0.0
        }
    }

    pub fn energy(&self, g_hat: &Vector3<f64>, frame: &SurfaceFrame) -> f64 {
        0.5 * g_hat.dot(&(self.tensor(frame) * g_hat))
    }
}

/// Nominal traction `T = φ ε ĝ`.
pub fn contact_traction(g_hat: &Vector3<f64>, frame: &SurfaceFrame, law: &PenaltyLaw, phi: bool) -> Vector3<f64> {
    if !phi {
        return Vector3::zeros();
    }
    law.tensor(frame) * g_hat
}

/// True traction `t = T / J`.
pub fn true_traction(t_nominal: &Vector3<f64>, j: f64) -> Result<Vector3<f64>> {
    if !(j > 0.0) {
        return Err(Error::NonPositiveStretch(j));
    }
    Ok(t_nominal / j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{surface_frame, Patch};
    use approx::assert_relative_eq;

    fn frame() -> SurfaceFrame {
        let p = Patch::rigid_plane(Vector3::zeros(), Vector3::x(), Vector3::y(), [[0.0, 1.0], [0.0, 1.0]]).unwrap();
        surface_frame(&p, 0, [0.5, 0.5], p.ref_controls()).unwrap()
    }

    #[test]
    fn traction_examples() {
        let f = frame();
        let law = PenaltyLaw::isotropic(100.0);
        let g = Vector3::new(0.0, 0.0, -0.01);
        assert_eq!(contact_traction(&g, &f, &law, false), Vector3::zeros());
        assert_relative_eq!(contact_traction(&g, &f, &law, true), Vector3::new(0.0, 0.0, -1.0), epsilon = 1e-15);
        let frictionless = PenaltyLaw { eps_n: 50.0, eps_tau: 0.0 };
        let g = Vector3::new(0.3, -0.2, 0.01);
        assert_relative_eq!(contact_traction(&g, &f, &frictionless, true), Vector3::new(0.0, 0.0, 0.5), epsilon = 1e-15);
    }

    #[test]
    fn true_traction_examples() {
        let t = Vector3::new(2.0, 0.0, 0.0);
        assert_eq!(true_traction(&t, 1.0).unwrap(), t);
        assert_eq!(true_traction(&t, 2.0).unwrap(), Vector3::new(1.0, 0.0, 0.0));
        assert!(true_traction(&t, 0.0).is_err());
    }

    #[test]
    fn traction_is_energy_gradient() {
        let f = frame();
        let law = PenaltyLaw { eps_n: 1000.0, eps_tau: 100.0 };
        let g = Vector3::new(0.01, -0.02, 0.003);
        let t = contact_traction(&g, &f, &law, true);
        let h = 1e-7;
        for k in 0..3 {
            let mut gp = g;
            let mut gm = g;
            gp[k] += h;
            gm[k] -= h;
            let fd = (law.energy(&gp, &f) - law.energy(&gm, &f)) / (2.0 * h);
            assert_relative_eq!(fd, t[k], max_relative = 1e-8);
        }
    }
}
