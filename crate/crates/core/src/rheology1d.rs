//! Spring–slider friction element.
//!
//! A single material point of the interface idealised as a linear spring
//! (stiffness `eps`, free energy `½ eps g_e·g_e`) in series with a Coulomb
//! slider. The total gap `x_k − x_o` splits into the elastic stretch `g_e`
//! and the sliding part `g_s`. The mass of the classical rheological picture
//! is dropped: everything here is quasi-static.
//!
//! This model is the reference the 3D contact kinematics are checked
//! against: a sticking step stores all of the motion in the spring and
//! dissipates nothing, a slipping step relocates the anchor so that the
//! spring force sits exactly on the friction bound.

use nalgebra::Vector2;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Slider1D {
    /// Spring stiffness (force/area per length).
    pub eps: f64,
    /// Friction coefficient.
    pub mu: f64,
    /// Normal pressure magnitude.
    pub p: f64,
    /// Elastic gap `x_k − x`.
    pub g_e: Vector2<f64>,
    /// Sliding gap `x − x_o`.
    pub g_s: Vector2<f64>,
    /// Initial anchor position.
    pub x_o: Vector2<f64>,
}

/// Result of one quasi-static increment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Step1d {
    pub slider: Slider1D,
    /// 0 for stick, 1 for slip.
    pub omega: u8,
    /// Anchor displacement over the step.
    pub delta_g_s: Vector2<f64>,
    /// `−t_c · Δg_s`, the energy dissipated over the step.
    pub dissipation: f64,
}

impl Slider1D {
    /// A slider resting at `x_o` with a relaxed spring.
    pub fn at_rest(eps: f64, mu: f64, p: f64, x_o: Vector2<f64>) -> Self {
        Self {
            eps,
            mu,
            p,
            g_e: Vector2::zeros(),
            g_s: Vector2::zeros(),
            x_o,
        }
    }

    /// Current anchor (slider) position `x = x_o + g_s`.
    pub fn anchor(&self) -> Vector2<f64> {
        self.x_o + self.g_s
    }

    /// Current position of the loaded point `x_k = x + g_e`.
    pub fn x_k(&self) -> Vector2<f64> {
        self.anchor() + self.g_e
    }

    /// Spring force `t = eps g_e`.
    pub fn spring_force(&self) -> Vector2<f64> {
        self.g_e * self.eps
    }
}

pub fn free_energy_1d(s: &Slider1D) -> f64 {
    0.5 * s.eps * s.g_e.dot(&s.g_e)
}

/// Moves the loaded point to `x_k_new` under the end-of-step pressure `p_new`.
pub fn step_1d(s: &Slider1D, x_k_new: Vector2<f64>, p_new: f64) -> Result<Step1d> {
    if p_new < 0.0 || p_new.is_nan() {
        return Err(Error::NegativePressure(p_new));
    }
    let anchor = s.anchor();
    let trial = x_k_new - anchor;
    let bound = s.mu * p_new;
    let trial_force = s.eps * trial.norm();

    let mut next = *s;
    next.p = p_new;

    // Zero bound means frictionless slip: the spring cannot hold any load.
    if bound > 0.0 && trial_force <= bound {
        next.g_e = trial;
        return Ok(Step1d {
            slider: next,
            omega: 0,
            delta_g_s: Vector2::zeros(),
            dissipation: 0.0,
        });
    }

    let stretch = if s.eps > 0.0 { bound / s.eps } else { 0.0 };
    let g_e = match trial.try_normalize(0.0) {
        Some(dir) => dir * stretch,
        None => Vector2::zeros(),
    };
    let x_m = x_k_new - g_e;
    let delta = x_m - anchor;
    next.g_e = g_e;
    next.g_s = x_m - s.x_o;
    // t_c = −t in the slider, so −t_c·Δg_s = eps g_e·Δg_s.
    let dissipation = s.eps * g_e.dot(&delta);
    Ok(Step1d {
        slider: next,
        omega: 1,
        delta_g_s: delta,
        dissipation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(x: f64, y: f64) -> Vector2<f64> {
        Vector2::new(x, y)
    }

    #[test]
    fn free_energy_examples() {
        let mut s = Slider1D::at_rest(0.0, 0.3, 1.0, v(0.0, 0.0));
        s.g_e = v(5.0, -2.0);
        assert_eq!(free_energy_1d(&s), 0.0);
        s.eps = 2.0;
        s.g_e = v(3.0, 0.0);
        assert_relative_eq!(free_energy_1d(&s), 9.0);
        s.eps = 1000.0;
        s.g_e = v(0.01, 0.0);
        assert_relative_eq!(free_energy_1d(&s), 0.05, epsilon = 1e-15);
    }

    #[test]
    fn stick_step_keeps_anchor() {
        let s = Slider1D::at_rest(100.0, 0.5, 1.0, v(0.0, 0.0));
        let out = step_1d(&s, v(0.001, 0.0), 1.0).unwrap();
        assert_eq!(out.omega, 0);
        assert_eq!(out.slider.g_s, s.g_s);
        assert_eq!(out.dissipation, 0.0);
        assert_relative_eq!(out.slider.spring_force().norm(), 0.1, epsilon = 1e-14);
    }

    #[test]
    fn slip_step_relocates_anchor() {
        let s = Slider1D::at_rest(100.0, 0.5, 1.0, v(0.0, 0.0));
        let out = step_1d(&s, v(0.1, 0.0), 1.0).unwrap();
        assert_eq!(out.omega, 1);
        assert_relative_eq!(out.slider.g_e.norm(), 0.005, epsilon = 1e-15);
        assert_relative_eq!(out.delta_g_s.x, 0.095, epsilon = 1e-15);
        assert_relative_eq!(out.dissipation, 0.0475, epsilon = 1e-14);
        assert_relative_eq!(out.slider.x_k(), v(0.1, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn frictionless_slip_releases_spring() {
        let mut s = Slider1D::at_rest(100.0, 0.0, 1.0, v(0.0, 0.0));
        s.g_e = v(0.02, 0.0);
        let out = step_1d(&s, v(0.3, -0.1), 1.0).unwrap();
        assert_eq!(out.omega, 1);
        assert_eq!(out.slider.g_e, Vector2::zeros());
        assert_eq!(out.dissipation, 0.0);
    }

    #[test]
    fn negative_pressure_is_rejected() {
        let s = Slider1D::at_rest(1.0, 0.1, 1.0, v(0.0, 0.0));
        assert!(matches!(
            step_1d(&s, v(1.0, 0.0), -1e-3),
            Err(Error::NegativePressure(_))
        ));
    }
}
