//! Load stepping and Newton iterations.

pub mod linear;
pub mod newton;
pub mod schedule;

pub use linear::solve_reduced;
pub use newton::{
    assemble, assemble_bulk, constraints, reactions, solve_increment, step_times, warn_on_model, Assembled,
    IncrementResult, IterationInfo, Solver, SolverSettings, StepReport,
};
pub use schedule::{FixedSet, LoadSchedule, Phase, Target};
