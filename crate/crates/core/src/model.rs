//! Scene data: meshes, materials, contact surfaces and the mutable solution
//! state.

use std::collections::BTreeMap;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::bulk::Material;
use crate::contact::PenaltyLaw;
use crate::error::{Error, Result};
use crate::geometry::Patch;
use crate::kinematics::ContactHistory;
use crate::solver::LoadSchedule;

#[derive(Clone, Debug)]
pub struct Body {
    pub name: String,
    pub material: Material,
    /// Connectivity in global node ids (Q4 in 2D, H8 in 3D).
    pub elements: Vec<Vec<usize>>,
    /// Global node ids owned by the body.
    pub nodes: Vec<usize>,
}

/// Expresses each surface control point as a linear combination of bulk
/// nodal displacements: `x_A = X_A + Σ c u_node`.
#[derive(Clone, Debug, Default)]
pub struct ControlMap {
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl ControlMap {
    pub fn identity(nodes: &[usize]) -> Self {
        Self {
            rows: nodes.iter().map(|&n| vec![(n, 1.0)]).collect(),
        }
    }

    /// A map for a surface whose controls never move.
    pub fn rigid(n_controls: usize) -> Self {
        Self {
            rows: vec![vec![]; n_controls],
        }
    }

    pub fn is_rigid(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }
}

#[derive(Clone, Debug)]
pub struct ContactSurface {
    pub name: String,
    pub body: Option<usize>,
    pub patch: Patch,
    pub map: ControlMap,
    /// Gauss points per parametric direction on each element.
    pub quadrature: usize,
}

impl ContactSurface {
    pub fn current_controls(&self, model: &Model, u: &[f64]) -> Vec<Vector3<f64>> {
        self.patch
            .ref_controls()
            .iter()
            .zip(&self.map.rows)
            .map(|(x, row)| {
                row.iter()
                    .fold(*x, |acc, &(n, c)| acc + model.node_displacement(u, n) * c)
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PassMode {
    Full,
    #[serde(alias = "two_half", alias = "twohalf")]
    TwoHalf,
}

impl std::str::FromStr for PassMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Self::Full),
            "twohalf" | "two_half" => Ok(Self::TwoHalf),
            other => Err(Error::Scene(format!("unknown pass mode `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContactPair {
    pub slave: usize,
    pub master: usize,
}

#[derive(Clone, Debug)]
pub struct ContactSettings {
    pub law: PenaltyLaw,
    pub mu: f64,
    pub pass: PassMode,
    pub pairs: Vec<ContactPair>,
    pub max_penetration: f64,
    pub search_radius: f64,
}

/// One slave loop of the contact algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContactRun {
    pub slave: usize,
    pub master: usize,
    /// Whether master-side forces and rows are assembled.
    pub full_pass: bool,
}

#[derive(Clone, Debug)]
pub struct Model {
    pub dim: usize,
    /// Reference nodal positions (z = 0 in 2D).
    pub nodes: Vec<Vector3<f64>>,
    pub bodies: Vec<Body>,
    pub sets: BTreeMap<String, Vec<usize>>,
    pub surfaces: Vec<ContactSurface>,
    pub contact: ContactSettings,
    pub schedule: LoadSchedule,
    /// Reference length `L₀` and stiffness `E₀` of the scene.
    pub length_scale: f64,
    pub stiffness_scale: f64,
    /// Set and point for the reported reactions and torque.
    pub reaction_set: Option<String>,
    pub torque_center: Vector3<f64>,
}

impl Model {
    pub fn n_dofs(&self) -> usize {
        self.nodes.len() * self.dim
    }

    pub fn node_displacement(&self, u: &[f64], node: usize) -> Vector3<f64> {
        let mut d = Vector3::zeros();
        for k in 0..self.dim {
            d[k] = u[node * self.dim + k];
        }
        d
    }

    pub fn current_position(&self, u: &[f64], node: usize) -> Vector3<f64> {
        self.nodes[node] + self.node_displacement(u, node)
    }

    pub fn n_elements(&self) -> usize {
        self.bodies.iter().map(|b| b.elements.len()).sum()
    }

    /// Slave loops implied by the pass mode: one per pair for full-pass, both
    /// orderings for two-half-pass. Surfaces without dofs are never slaves.
    pub fn contact_runs(&self) -> Vec<ContactRun> {
        let mut runs = vec![];
        for pair in &self.contact.pairs {
            let orders: &[(usize, usize)] = match self.contact.pass {
                PassMode::Full => &[(pair.slave, pair.master)][..],
                PassMode::TwoHalf => &[(pair.slave, pair.master), (pair.master, pair.slave)][..],
            };
            for &(s, m) in orders {
                if self.surfaces[s].map.is_rigid() {
                    continue;
                }
                runs.push(ContactRun {
                    slave: s,
                    master: m,
                    full_pass: self.contact.pass == PassMode::Full,
                });
            }
        }
        runs
    }

    pub fn set(&self, name: &str) -> Result<&[usize]> {
        self.sets
            .get(name)
            .map(|v| v.as_slice())
            .ok_or_else(|| Error::UnknownBoundary(name.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim != 2 && self.dim != 3 {
            return Err(Error::Scene(format!("dimension must be 2 or 3, got {}", self.dim)));
        }
        let nn = self.nodes.len();
        let per = if self.dim == 2 { 4 } else { 8 };
        for b in &self.bodies {
            b.material.validate()?;
            for e in &b.elements {
                if e.len() != per || e.iter().any(|&n| n >= nn) {
                    return Err(Error::Scene(format!("body `{}` has an invalid element", b.name)));
                }
            }
        }
        for (name, ids) in &self.sets {
            if ids.iter().any(|&n| n >= nn) {
                return Err(Error::Scene(format!("set `{name}` references a missing node")));
            }
        }
        for s in &self.surfaces {
            if s.patch.param_dim() + 1 != self.dim {
                return Err(Error::Scene(format!("surface `{}` has the wrong parametric dimension", s.name)));
            }
            if s.map.rows.len() != s.patch.n_controls() {
                return Err(Error::Scene(format!("surface `{}` control map size mismatch", s.name)));
            }
            if s.quadrature == 0 {
                return Err(Error::Scene(format!("surface `{}` needs at least one quadrature point", s.name)));
            }
        }
        for p in &self.contact.pairs {
            if p.slave >= self.surfaces.len() || p.master >= self.surfaces.len() || p.slave == p.master {
                return Err(Error::Scene("contact pair references invalid surfaces".into()));
            }
        }
        self.contact.law.validate()?;
        if !(self.contact.mu >= 0.0) {
            return Err(Error::Scene("friction coefficient must be non-negative".into()));
        }
        self.schedule.validate(self.dim)?;
        if let Some(s) = &self.reaction_set {
            self.set(s)?;
        }
        Ok(())
    }
}

/// Committed contact histories, one vector per slave loop, indexed by
/// `element · points_per_element + point`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct HistoryStore {
    pub runs: Vec<Vec<ContactHistory>>,
}

/// Mutable solution state of a scene.
#[derive(Clone, Debug)]
pub struct SceneState {
    pub model: Model,
    pub u: Vec<f64>,
    pub histories: HistoryStore,
    pub time: f64,
    pub step: usize,
    pub cumulative_dissipation: f64,
}

impl SceneState {
    pub fn new(model: Model) -> Result<Self> {
        model.validate()?;
        let u = vec![0.0; model.n_dofs()];
        let histories = HistoryStore {
            runs: model
                .contact_runs()
                .iter()
                .map(|r| {
                    let s = &model.surfaces[r.slave];
                    let q = s.quadrature.pow(s.patch.param_dim() as u32);
                    vec![
                        ContactHistory {
                            master: r.master,
                            ..Default::default()
                        };
                        s.patch.n_elements() * q
                    ]
                })
                .collect(),
        };
        Ok(Self {
            model,
            u,
            histories,
            time: 0.0,
            step: 0,
            cumulative_dissipation: 0.0,
        })
    }
}
