use std::collections::BTreeMap;

use nalgebra::{Rotation3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A prescribed motion of a node set, reached at the end of its phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Target {
    /// Displacement component (0 = x, 1 = y, 2 = z).
    Translate { set: String, component: usize, value: f64 },
    /// Rigid rotation about the z axis through `center`, in radians.
    RotateZ { set: String, angle: f64, center: [f64; 3] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    #[serde(default)]
    pub name: String,
    pub steps: usize,
    #[serde(default = "default_true")]
    pub friction: bool,
    #[serde(default)]
    pub targets: Vec<Target>,
}

fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LoadSchedule {
    /// Sets with all listed components held at zero.
    #[serde(default)]
    pub fixed: Vec<FixedSet>,
    pub phases: Vec<Phase>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedSet {
    pub set: String,
    pub components: Vec<usize>,
}

/// Motion state of one set at the end of a phase.
#[derive(Clone, Debug, Default, PartialEq)]
struct SetMotion {
    translation: [Option<f64>; 3],
    rotation: Option<(f64, Vector3<f64>)>,
}

impl LoadSchedule {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.phases.is_empty() {
            return Err(Error::Scene("schedule has no phases".into()));
        }
        for p in &self.phases {
            if p.steps == 0 {
                return Err(Error::Scene(format!("phase `{}` needs at least one step", p.name)));
            }
            for t in &p.targets {
                if let Target::Translate { component, .. } = t {
                    if *component >= dim {
                        return Err(Error::Scene(format!("component {component} out of range in phase `{}`", p.name)));
                    }
                }
            }
        }
        for f in &self.fixed {
            if f.components.iter().any(|&c| c >= dim) {
                return Err(Error::Scene(format!("fixed set `{}` names a component >= {dim}", f.set)));
            }
        }
        Ok(())
    }

    pub fn end_time(&self) -> f64 {
        self.phases.len() as f64
    }

    /// Phase index and the step size in pseudo-time for the phase.
    pub fn phase_at(&self, t: f64) -> usize {
        let p = t.ceil() as isize - 1;
        p.clamp(0, self.phases.len() as isize - 1) as usize
    }

    pub fn set_steps(&mut self, steps: usize) {
        for p in &mut self.phases {
            p.steps = steps;
        }
    }

    /// Motion of every targeted set at the end of each phase.
    fn states(&self) -> Vec<BTreeMap<String, SetMotion>> {
        let mut out = Vec::with_capacity(self.phases.len() + 1);
        let mut cur: BTreeMap<String, SetMotion> = BTreeMap::new();
        // The initial state: every targeted set at rest.
        for p in &self.phases {
            for t in &p.targets {
                let (set, motion) = match t {
                    Target::Translate { set, component, .. } => {
                        let mut m = SetMotion::default();
                        m.translation[*component] = Some(0.0);
                        (set, m)
                    }
                    Target::RotateZ { set, center, .. } => {
                        let m = SetMotion {
                            rotation: Some((0.0, Vector3::from(*center))),
                            ..Default::default()
                        };
                        (set, m)
                    }
                };
                let e = cur.entry(set.clone()).or_default();
                for k in 0..3 {
                    if motion.translation[k].is_some() {
                        e.translation[k] = Some(0.0);
                    }
                }
                if motion.rotation.is_some() && e.rotation.is_none() {
                    e.rotation = motion.rotation;
                }
            }
        }
        out.push(cur.clone());
        for p in &self.phases {
            for t in &p.targets {
                match t {
                    Target::Translate { set, component, value } => {
                        cur.get_mut(set).unwrap().translation[*component] = Some(*value);
                    }
                    Target::RotateZ { set, angle, center } => {
                        cur.get_mut(set).unwrap().rotation = Some((*angle, Vector3::from(*center)));
                    }
                }
            }
            out.push(cur.clone());
        }
        out
    }

    /// Prescribed displacement `(node, component, value)` at pseudo-time `t`
    /// for all constrained dofs, given reference positions and node sets.
    pub fn prescribed(
        &self,
        t: f64,
        nodes: &[Vector3<f64>],
        sets: &BTreeMap<String, Vec<usize>>,
    ) -> Result<Vec<(usize, usize, f64)>> {
        let states = self.states();
        let p = self.phase_at(t);
        let lambda = (t - p as f64).clamp(0.0, 1.0);
        let mut out = vec![];
        for f in &self.fixed {
            let ids = sets.get(&f.set).ok_or_else(|| Error::UnknownBoundary(f.set.clone()))?;
            for &n in ids {
                for &c in &f.components {
                    out.push((n, c, 0.0));
                }
            }
        }
        for (name, end) in &states[p + 1] {
            let start = &states[p][name];
            let ids = sets.get(name).ok_or_else(|| Error::UnknownBoundary(name.clone()))?;
            let mut trans = [None; 3];
            for k in 0..3 {
                if let (Some(a), Some(b)) = (start.translation[k], end.translation[k]) {
                    trans[k] = Some(a + lambda * (b - a));
                }
            }
            let rot = match (start.rotation, end.rotation) {
                (Some((a0, c)), Some((a1, _))) => Some((a0 + lambda * (a1 - a0), c)),
                _ => None,
            };
            for &n in ids {
                let x = nodes[n];
                let mut u = Vector3::zeros();
                let mut constrained = [false; 3];
                if let Some((angle, c)) = rot {
                    let r = Rotation3::from_axis_angle(&Vector3::z_axis(), angle);
                    u += r * (x - c) - (x - c);
                    constrained[0] = true;
                    constrained[1] = true;
                }
                for k in 0..3 {
                    if let Some(v) = trans[k] {
                        u[k] += v;
                        constrained[k] = true;
                    }
                }
                for k in 0..3 {
                    if constrained[k] {
                        out.push((n, k, u[k]));
                    }
                }
            }
        }
        Ok(out)
    }
}
