//! Neo-Hookean bulk elements.

pub mod element;
pub mod material;

pub use element::{bulk_element_energy, bulk_element_forces, element_mean_trace, ElementKind};
pub use material::{cauchy_stress, neo_hookean_energy, neo_hookean_stress, Material, Tangent};

use nalgebra::Vector3;

use crate::error::Result;
use crate::model::Model;

/// Nodal `I₁ = tr σ`, averaged from the adjacent elements.
pub fn stress_invariant_field(model: &Model, u: &[f64]) -> Result<Vec<f64>> {
    let kind = ElementKind::for_dim(model.dim);
    let mut sum = vec![0.0; model.nodes.len()];
    let mut count = vec![0usize; model.nodes.len()];
    for body in &model.bodies {
        for conn in &body.elements {
            let coords: Vec<Vector3<f64>> = conn.iter().map(|&n| model.nodes[n]).collect();
            let disp: Vec<Vector3<f64>> = conn.iter().map(|&n| model.node_displacement(u, n)).collect();
            let tr = element_mean_trace(kind, &coords, &disp, &body.material)?;
            for &n in conn {
                sum[n] += tr;
                count[n] += 1;
            }
        }
    }
    Ok(sum
        .iter()
        .zip(&count)
        .map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect())
}
