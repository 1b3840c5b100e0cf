//! Result files: per-step CSV, legacy VTK snapshots and run metadata.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::bulk::stress_invariant_field;
use crate::error::Result;
use crate::model::Model;
use crate::solver::{SolverSettings, StepReport};

pub const CSV_HEADER: &str = "step,time,P_x,P_y,P_z,M_z,iterations,dissipation";

/// One CSV row; `dissipation` is the cumulative dissipated energy.
pub fn csv_row(r: &StepReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{}",
        r.step,
        r.time,
        r.reaction[0],
        r.reaction[1],
        r.reaction[2],
        r.torque_z,
        r.iterations,
        r.cumulative_dissipation
    )
}

/// Streams step rows to a CSV file; the header is written on creation.
pub struct CsvWriter {
    out: BufWriter<File>,
}

impl CsvWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{CSV_HEADER}")?;
        out.flush()?;
        Ok(Self { out })
    }

    pub fn write(&mut self, r: &StepReport) -> Result<()> {
        writeln!(self.out, "{}", csv_row(r))?;
        self.out.flush()?;
        Ok(())
    }
}

/// Legacy ASCII VTK unstructured grid of all bodies in the reference
/// configuration with `displacement` and `I1` (`tr σ / E₀`) point data.
pub fn write_vtk(path: &Path, model: &Model, u: &[f64], title: &str) -> Result<()> {
    let i1 = stress_invariant_field(model, u)?;
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "# vtk DataFile Version 3.0")?;
    writeln!(out, "{}", title.replace('\n', " "))?;
    writeln!(out, "ASCII")?;
    writeln!(out, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(out, "POINTS {} double", model.nodes.len())?;
    for x in &model.nodes {
        writeln!(out, "{} {} {}", x.x, x.y, x.z)?;
    }
    let n_cells = model.n_elements();
    let per = if model.dim == 2 { 4 } else { 8 };
    writeln!(out, "CELLS {} {}", n_cells, n_cells * (per + 1))?;
    for b in &model.bodies {
        for e in &b.elements {
            let ids: Vec<String> = e.iter().map(|n| n.to_string()).collect();
            writeln!(out, "{} {}", per, ids.join(" "))?;
        }
    }
    writeln!(out, "CELL_TYPES {n_cells}")?;
    let ty = if model.dim == 2 { 9 } else { 12 };
    for _ in 0..n_cells {
        writeln!(out, "{ty}")?;
    }
    writeln!(out, "POINT_DATA {}", model.nodes.len())?;
    writeln!(out, "VECTORS displacement double")?;
    for n in 0..model.nodes.len() {
        let d = model.node_displacement(u, n);
        writeln!(out, "{} {} {}", d.x, d.y, d.z)?;
    }
    writeln!(out, "SCALARS I1 double 1")?;
    writeln!(out, "LOOKUP_TABLE default")?;
    for v in &i1 {
        writeln!(out, "{}", v / model.stiffness_scale)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct RunMetadata {
    pub scene: String,
    pub scene_hash: String,
    pub version: String,
    pub solver: SolverSettings,
    pub threads: usize,
    pub pass: String,
    pub steps_completed: usize,
    pub status: String,
}

pub fn write_metadata(path: &Path, meta: &RunMetadata) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, meta)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}
