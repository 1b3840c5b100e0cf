//! Scene files: JSON description of bodies, contact surfaces, contact
//! settings and the load schedule.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::mesh::{block3d, filleted_block, half_disk, rectangle, spherical_cap, BodyMesh, Boundary, Dome};
use crate::bulk::Material;
use crate::contact::PenaltyLaw;
use crate::error::{Error, Result};
use crate::geometry::{Patch, PatchKind};
use crate::model::{Body, ContactPair, ContactSettings, ContactSurface, ControlMap, Model, PassMode, SceneState};
use crate::solver::{LoadSchedule, SolverSettings};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub name: String,
    pub dim: usize,
    /// Reference length `L₀` and stiffness `E₀`; all inputs are in these units.
    #[serde(default = "one")]
    pub length_scale: f64,
    #[serde(default = "one")]
    pub stiffness_scale: f64,
    pub bodies: Vec<BodySpec>,
    #[serde(default)]
    pub rigid: Vec<RigidSpec>,
    #[serde(default)]
    pub surfaces: Vec<SurfaceSpec>,
    #[serde(default)]
    pub contact: Option<ContactSpec>,
    pub schedule: LoadSchedule,
    #[serde(default)]
    pub reactions: Option<ReactionSpec>,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default)]
    pub solver: SolverSettings,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    pub name: String,
    pub material: Material,
    pub generator: Generator,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    FilletedBlock {
        origin: [f64; 2],
        width: f64,
        height: f64,
        fillet: f64,
        nx: usize,
        ny: usize,
    },
    HalfDisk {
        center: [f64; 2],
        radius: f64,
        m: usize,
        dome: Dome,
    },
    Rectangle {
        origin: [f64; 2],
        width: f64,
        height: f64,
        nx: usize,
        ny: usize,
    },
    Box {
        origin: [f64; 3],
        size: [f64; 3],
        n: [usize; 3],
    },
    SphericalCap {
        center: [f64; 3],
        radius: f64,
        thickness: f64,
        n: usize,
        layers: usize,
    },
}

impl Generator {
    pub fn build(&self) -> Result<BodyMesh> {
        match self {
            Self::FilletedBlock {
                origin,
                width,
                height,
                fillet,
                nx,
                ny,
            } => filleted_block(*origin, *width, *height, *fillet, *nx, *ny),
            Self::HalfDisk { center, radius, m, dome } => half_disk(*center, *radius, *m, *dome),
            Self::Rectangle {
                origin,
                width,
                height,
                nx,
                ny,
            } => rectangle(*origin, *width, *height, *nx, *ny),
            Self::Box { origin, size, n } => block3d(*origin, *size, *n),
            Self::SphericalCap {
                center,
                radius,
                thickness,
                n,
                layers,
            } => spherical_cap(*center, *radius, *thickness, *n, *layers),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Box { .. } | Self::SphericalCap { .. } => 3,
            _ => 2,
        }
    }
}

/// A rigid line (2D, one direction) or plane (3D, two directions).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigidSpec {
    pub name: String,
    pub origin: [f64; 3],
    pub directions: Vec<[f64; 3]>,
    pub range: Vec<[f64; 2]>,
    /// Direction pointing into the rigid body.
    pub inward: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub name: String,
    pub body: String,
    pub boundary: String,
    pub kind: PatchKind,
    /// NURBS degree.
    #[serde(default = "three")]
    pub degree: usize,
    /// Gauss points per direction; defaults to the contact block's value.
    #[serde(default)]
    pub quadrature: Option<usize>,
}

fn three() -> usize {
    3
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub slave: String,
    pub master: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContactSpec {
    pub pairs: Vec<PairSpec>,
    #[serde(default = "full")]
    pub pass: PassMode,
    /// Isotropic penalty; `eps_n`/`eps_tau` take precedence when given.
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub eps_n: Option<f64>,
    #[serde(default)]
    pub eps_tau: Option<f64>,
    pub mu: f64,
    #[serde(default = "three")]
    pub quadrature: usize,
    /// In units of `L₀`.
    #[serde(default = "quarter")]
    pub max_penetration: f64,
    #[serde(default = "half")]
    pub search_radius: f64,
}

fn full() -> PassMode {
    PassMode::Full
}

fn quarter() -> f64 {
    0.25
}

fn half() -> f64 {
    0.5
}

impl ContactSpec {
    pub fn law(&self) -> Result<PenaltyLaw> {
        let eps_n = self.eps_n.or(self.eps);
        let eps_tau = self.eps_tau.or(self.eps);
        match (eps_n, eps_tau) {
            (Some(n), Some(t)) => Ok(PenaltyLaw { eps_n: n, eps_tau: t }),
            _ => Err(Error::Scene("contact needs `eps` or both `eps_n` and `eps_tau`".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReactionSpec {
    pub set: String,
    #[serde(default)]
    pub center: [f64; 3],
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Write a VTK snapshot every this many steps; 0 disables snapshots.
    #[serde(default)]
    pub snapshot_every: usize,
}

/// A parsed scene with its canonical JSON and hash.
#[derive(Clone, Debug)]
pub struct LoadedScene {
    pub file: SceneFile,
    pub canonical: String,
    pub hash: String,
}

/// Applies a dotted-path override `a.b.0.c=value`. The value is parsed as
/// JSON when possible and kept as a string otherwise.
pub fn apply_override(root: &mut Value, spec: &str) -> Result<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::Scene(format!("override `{spec}` is not of the form key=value")))?;
    let value: Value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::Scene(format!("override path `{path}` has an empty segment")));
    }
    let mut cur = root;
    for (i, key) in keys.iter().enumerate() {
        let last = i + 1 == keys.len();
        cur = match cur {
            Value::Object(map) => {
                if last {
                    map.insert(key.to_string(), value);
                    return Ok(());
                }
                map.get_mut(*key)
                    .ok_or_else(|| Error::Scene(format!("override path `{path}`: no field `{key}`")))?
            }
            Value::Array(list) => {
                let idx: usize = key
                    .parse()
                    .map_err(|_| Error::Scene(format!("override path `{path}`: `{key}` is not an index")))?;
                let len = list.len();
                let slot = list
                    .get_mut(idx)
                    .ok_or_else(|| Error::Scene(format!("override path `{path}`: index {idx} out of {len}")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(Error::Scene(format!("override path `{path}`: `{key}` is not inside an object"))),
        };
    }
    Ok(())
}

/// Parses scene JSON text, applying overrides before validation.
pub fn parse_scene(text: &str, overrides: &[String]) -> Result<LoadedScene> {
    let mut value: Value = serde_json::from_str(text)
        .map_err(|e| Error::Scene(format!("invalid JSON at line {}, column {}: {e}", e.line(), e.column())))?;
    for o in overrides {
        apply_override(&mut value, o)?;
    }
    let file: SceneFile = serde_path_to_error::deserialize(&value).map_err(|e| {
        let path = e.path().to_string();
        Error::Scene(format!("at `{path}`: {}", e.into_inner()))
    })?;
    let canonical = serde_json::to_string(&value)?;
    let hash = hex::encode(Sha256::digest(canonical.as_bytes()));
    Ok(LoadedScene { file, canonical, hash })
}

pub fn read_scene(path: &Path, overrides: &[String]) -> Result<LoadedScene> {
    let text = std::fs::read_to_string(path)?;
    parse_scene(&text, overrides)
}

fn open_uniform_knots(n_ctrl: usize, degree: usize) -> Vec<f64> {
    let n_el = n_ctrl - degree;
    let mut k = vec![0.0; degree + 1];
    k.extend((1..n_el).map(|i| i as f64));
    k.extend(std::iter::repeat(n_el as f64).take(degree + 1));
    k
}

/// Surface patch through (or, for NURBS, controlled by) boundary nodes.
fn boundary_patch(kind: PatchKind, degree: usize, points: Vec<Vector3<f64>>, boundary: &Boundary) -> Result<Patch> {
    match (kind, boundary) {
        (PatchKind::Lagrange, Boundary::Chain(_)) => Patch::lagrange_chain(points),
        (PatchKind::Hermite, Boundary::Chain(_)) => Patch::hermite_chain(points),
        (PatchKind::Lagrange, Boundary::Grid { n, .. }) => Patch::lagrange_grid([n[0] - 1, n[1] - 1], points),
        (PatchKind::Nurbs, Boundary::Chain(_)) => {
            if points.len() <= degree {
                return Err(Error::Scene(format!("a degree-{degree} curve needs more than {degree} nodes")));
            }
            let w = vec![1.0; points.len()];
            Patch::nurbs_curve(degree, open_uniform_knots(points.len(), degree), points, w)
        }
        (PatchKind::Nurbs, Boundary::Grid { n, .. }) => {
            if n[0] <= degree || n[1] <= degree {
                return Err(Error::Scene(format!("a degree-{degree} surface needs more than {degree} nodes per direction")));
            }
            let w = vec![1.0; points.len()];
            Patch::nurbs_surface(
                [degree, degree],
                [open_uniform_knots(n[0], degree), open_uniform_knots(n[1], degree)],
                *n,
                points,
                w,
            )
        }
        (k, _) => Err(Error::Scene(format!("surface kind {k:?} does not fit this boundary"))),
    }
}

/// Orients a patch normal towards `inward` at the middle of its domain.
fn orient(patch: &mut Patch, at: impl Fn(&Vector3<f64>) -> Vector3<f64>) -> Result<()> {
    let d = patch.domain();
    let xi = [0.5 * (d[0][0] + d[0][1]), 0.5 * (d[1][0] + d[1][1])];
    let e = patch.locate(xi);
    let f = crate::geometry::surface_frame(patch, e, xi, patch.ref_controls())?;
    if f.n.dot(&at(&f.x)) < 0.0 {
        patch.set_normal_sign(-patch.normal_sign());
    }
    Ok(())
}

/// Expands generators and resolves names into a [`Model`].
pub fn build_model(scene: &SceneFile) -> Result<Model> {
    let dim = scene.dim;
    if dim != 2 && dim != 3 {
        return Err(Error::Scene(format!("dimension must be 2 or 3, got {dim}")));
    }
    let l0 = scene.length_scale;
    if !(l0 > 0.0) || !(scene.stiffness_scale > 0.0) {
        return Err(Error::Scene("length and stiffness scales must be positive".into()));
    }
    let mut nodes = vec![];
    let mut bodies = vec![];
    let mut sets = BTreeMap::new();
    let mut meshes: BTreeMap<String, (usize, BodyMesh)> = BTreeMap::new();
    for (bi, spec) in scene.bodies.iter().enumerate() {
        if spec.generator.dim() != dim {
            return Err(Error::Scene(format!("body `{}` does not match dimension {dim}", spec.name)));
        }
        if meshes.contains_key(&spec.name) {
            return Err(Error::Scene(format!("duplicate body name `{}`", spec.name)));
        }
        let mut mesh = spec.generator.build()?;
        mesh.offset_ids(nodes.len());
        let first = nodes.len();
        nodes.extend(mesh.nodes.iter().copied());
        for (k, v) in &mesh.sets {
            sets.insert(format!("{}.{k}", spec.name), v.clone());
        }
        bodies.push(Body {
            name: spec.name.clone(),
            material: spec.material,
            elements: mesh.elements.clone(),
            nodes: (first..nodes.len()).collect(),
        });
        meshes.insert(spec.name.clone(), (bi, mesh));
    }

    let mut surfaces = vec![];
    let mut surface_ids: BTreeMap<String, usize> = BTreeMap::new();
    let default_q = scene.contact.as_ref().map_or(3, |c| c.quadrature);
    for s in &scene.surfaces {
        let (bi, mesh) = meshes
            .get(&s.body)
            .ok_or_else(|| Error::Scene(format!("surface `{}` names unknown body `{}`", s.name, s.body)))?;
        let boundary = mesh
            .boundaries
            .get(&s.boundary)
            .ok_or_else(|| Error::Scene(format!("body `{}` has no boundary `{}`", s.body, s.boundary)))?;
        let ids = boundary.nodes().to_vec();
        let points = ids.iter().map(|&n| nodes[n]).collect();
        let mut patch = boundary_patch(s.kind, s.degree, points, boundary)?;
        let centroid = mesh.centroid();
        orient(&mut patch, |x| centroid - x)?;
        surface_ids.insert(s.name.clone(), surfaces.len());
        surfaces.push(ContactSurface {
            name: s.name.clone(),
            body: Some(*bi),
            patch,
            map: ControlMap::identity(&ids),
            quadrature: s.quadrature.unwrap_or(default_q),
        });
    }
    for r in &scene.rigid {
        let o = Vector3::from(r.origin);
        let mut patch = match (dim, r.directions.as_slice(), r.range.as_slice()) {
            (2, [d], [range]) => Patch::rigid_line(o, Vector3::from(*d), *range)?,
            (3, [d1, d2], [r1, r2]) => Patch::rigid_plane(o, Vector3::from(*d1), Vector3::from(*d2), [*r1, *r2])?,
            _ => {
                return Err(Error::Scene(format!(
                    "rigid surface `{}` needs {} direction(s) and range(s)",
                    r.name,
                    dim - 1
                )))
            }
        };
        let inward = Vector3::from(r.inward);
        orient(&mut patch, |_| inward)?;
        if surface_ids.contains_key(&r.name) {
            return Err(Error::Scene(format!("duplicate surface name `{}`", r.name)));
        }
        surface_ids.insert(r.name.clone(), surfaces.len());
        let n = patch.n_controls();
        surfaces.push(ContactSurface {
            name: r.name.clone(),
            body: None,
            patch,
            map: ControlMap::rigid(n),
            quadrature: default_q,
        });
    }

    let contact = match &scene.contact {
        Some(c) => {
            let resolve = |name: &str| {
                surface_ids
                    .get(name)
                    .copied()
                    .ok_or_else(|| Error::Scene(format!("contact pair names unknown surface `{name}`")))
            };
            let pairs = c
                .pairs
                .iter()
                .map(|p| {
                    Ok(ContactPair {
                        slave: resolve(&p.slave)?,
                        master: resolve(&p.master)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            ContactSettings {
                law: c.law()?,
                mu: c.mu,
                pass: c.pass,
                pairs,
                max_penetration: c.max_penetration * l0,
                search_radius: c.search_radius * l0,
            }
        }
        None => ContactSettings {
            law: PenaltyLaw::isotropic(1.0),
            mu: 0.0,
            pass: PassMode::Full,
            pairs: vec![],
            max_penetration: 0.25 * l0,
            search_radius: 0.5 * l0,
        },
    };
    let (reaction_set, torque_center) = match &scene.reactions {
        Some(r) => (Some(r.set.clone()), Vector3::from(r.center)),
        None => (None, Vector3::zeros()),
    };
    let model = Model {
        dim,
        nodes,
        bodies,
        sets,
        surfaces,
        contact,
        schedule: scene.schedule.clone(),
        length_scale: l0,
        stiffness_scale: scene.stiffness_scale,
        reaction_set,
        torque_center,
    };
    model.validate()?;
    Ok(model)
}

/// Reads, overrides and expands a scene file into a fresh solution state.
pub fn load_scene(path: &Path, overrides: &[String]) -> Result<(SceneState, LoadedScene)> {
    let loaded = read_scene(path, overrides)?;
    let model = build_model(&loaded.file)?;
    Ok((SceneState::new(model)?, loaded))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn overrides_follow_dotted_paths() {
        let mut v = json!({"contact": {"mu": 0.3}, "bodies": [{"generator": {"m": 16}}]});
        apply_override(&mut v, "contact.mu=0").unwrap();
        apply_override(&mut v, "bodies.0.generator.m=8").unwrap();
        apply_override(&mut v, "contact.pass=twohalf").unwrap();
        assert_eq!(v["contact"]["mu"], json!(0));
        assert_eq!(v["bodies"][0]["generator"]["m"], json!(8));
        assert_eq!(v["contact"]["pass"], json!("twohalf"));
        assert!(apply_override(&mut v, "nothing.here=1").is_err());
        assert!(apply_override(&mut v, "bodies.3.m=1").is_err());
        assert!(apply_override(&mut v, "contact.mu").is_err());
    }

    #[test]
    fn knots_are_open_uniform() {
        assert_eq!(open_uniform_knots(5, 3), vec![0.0, 0.0, 0.0, 0.0, 1.0, 2.0, 2.0, 2.0, 2.0]);
    }
}
