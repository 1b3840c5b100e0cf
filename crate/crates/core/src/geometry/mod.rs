//! Parametric contact surfaces: basis functions, patches and frames.

pub mod basis;
pub mod frame;
pub mod patch;

pub use basis::{bernstein_eval, bezier_extraction, gauss_legendre, hermite_basis, Basis1d};
pub use frame::{frame_from_shape, reference_area_element, surface_frame, SurfaceFrame};
pub use patch::{Patch, PatchKind, ShapeEval};
