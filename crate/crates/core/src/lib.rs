pub mod bulk;
pub mod contact;
pub mod error;
pub mod geometry;
pub mod io;
pub mod kinematics;
pub mod model;
pub mod rheology1d;
pub mod solver;

pub use error::{Error, Result};
pub use model::{Body, ContactPair, ContactSurface, ControlMap, HistoryStore, Model, PassMode, SceneState};
pub use solver::{Solver, SolverSettings, StepReport};
