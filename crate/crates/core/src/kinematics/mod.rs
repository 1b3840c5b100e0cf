//! Contact kinematics: gaps, projections, sliding points and the
//! stick/slip state machine.

pub mod gap;
pub mod interaction;
pub mod projection;
pub mod sliding;

pub use gap::{elastic_gap, gap_at_frame, gtau_max, sign, sliding_direction, GapState};
pub use interaction::{update_interaction, ContactHistory, Interaction, InteractionParams};
pub use projection::{bounding_box, closest_point_projection, length_scale, Projection};
pub use sliding::{sliding_point, sliding_point_flat_2d, SlidingPoint, MAX_SLIDING_ITERATIONS};
