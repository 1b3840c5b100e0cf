//! Penalty contact tractions, element forces and tangents.

pub mod assembly;
pub mod law;
pub mod point;

pub use assembly::{
    assemble_contact, commit_histories, element_contact_forces, point_dissipation, slave_quadrature, ContactAssembly,
    ContactElementForces, ContactStats, PointResult, RunContext,
};
pub use law::{contact_traction, true_traction, PenaltyLaw};
pub use point::{labeled_blocks, point_contribution, Group, PointContribution, Side};
