//! Scene files, mesh generators and result writers.

pub mod mesh;
pub mod output;
pub mod scene;

pub use mesh::{BodyMesh, Boundary, Dome};
pub use output::{csv_row, write_metadata, write_vtk, CsvWriter, RunMetadata, CSV_HEADER};
pub use scene::{apply_override, build_model, load_scene, parse_scene, read_scene, LoadedScene, SceneFile};
