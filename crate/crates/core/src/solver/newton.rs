use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::linear::solve_reduced;
use crate::bulk::{bulk_element_forces, ElementKind};
use crate::contact::{assemble_contact, commit_histories, ContactAssembly, ContactStats};
use crate::error::{Error, Result};
use crate::model::{HistoryStore, Model, SceneState};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub max_iterations: usize,
    /// Residual reduction relative to the first effective right-hand side.
    pub rel_tol: f64,
    /// Absolute residual floor in units of `E₀ L₀^{d−1}`.
    pub abs_tol: f64,
    pub max_bisections: usize,
    /// Worker threads; `None` reads `FRICFEM_THREADS` or uses all cores.
    pub threads: Option<usize>,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            max_iterations: 25,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            max_bisections: 4,
            threads: None,
        }
    }
}

/// Global residual `f_int + f_c` and tangent triplets at one configuration.
#[derive(Clone, Debug, Default)]
pub struct Assembled {
    pub residual: Vec<f64>,
    pub triplets: Vec<(usize, usize, f64)>,
    pub contact: ContactAssembly,
}

/// Bulk internal forces and tangent of all bodies.
pub fn assemble_bulk(model: &Model, u: &[f64]) -> Result<(Vec<f64>, Vec<(usize, usize, f64)>)> {
    let dim = model.dim;
    let kind = ElementKind::for_dim(dim);
    let mut list = vec![];
    let mut offset = 0;
    for body in &model.bodies {
        for (e, conn) in body.elements.iter().enumerate() {
            list.push((offset + e, conn, &body.material));
        }
        offset += body.elements.len();
    }
    let parts = list
        .par_iter()
        .map(|&(e, conn, mat)| {
            let coords: Vec<Vector3<f64>> = conn.iter().map(|&n| model.nodes[n]).collect();
            let disp: Vec<Vector3<f64>> = conn.iter().map(|&n| model.node_displacement(u, n)).collect();
            bulk_element_forces(kind, e, &coords, &disp, mat)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut r = vec![0.0; model.n_dofs()];
    let mut t = Vec::with_capacity(list.len() * (kind.n_nodes() * dim).pow(2));
    for ((_, conn, _), (f, k)) in list.iter().zip(&parts) {
        for (a, &na) in conn.iter().enumerate() {
            for i in 0..dim {
                r[na * dim + i] += f[a * dim + i];
                for (b, &nb) in conn.iter().enumerate() {
                    for j in 0..dim {
                        t.push((na * dim + i, nb * dim + j, k[(a * dim + i, b * dim + j)]));
                    }
                }
            }
        }
    }
    Ok((r, t))
}

/// Bulk plus contact residual and tangent.
pub fn assemble(model: &Model, u: &[f64], histories: &HistoryStore, mu: f64) -> Result<Assembled> {
    let (mut residual, mut triplets) = assemble_bulk(model, u)?;
    let contact = assemble_contact(model, u, histories, mu)?;
    for (r, c) in residual.iter_mut().zip(&contact.residual) {
        *r += c;
    }
    triplets.extend_from_slice(&contact.triplets);
    Ok(Assembled {
        residual,
        triplets,
        contact,
    })
}

/// Information passed to observers after each assembly of an increment.
pub struct IterationInfo<'a> {
    /// Number of linear solves done so far in the increment.
    pub iteration: usize,
    pub residual_norm: f64,
    pub u: &'a [f64],
    pub assembled: &'a Assembled,
}

#[derive(Clone, Debug)]
pub struct IncrementResult {
    pub u: Vec<f64>,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub tolerance: f64,
    pub assembled: Assembled,
}

/// Prescribed displacements at time `t` as a per-dof vector and free-dof map.
pub fn constraints(model: &Model, t: f64) -> Result<(Vec<Option<usize>>, Vec<Option<f64>>)> {
    let n = model.n_dofs();
    let mut values = vec![None; n];
    for (node, comp, v) in model.schedule.prescribed(t, &model.nodes, &model.sets)? {
        values[node * model.dim + comp] = Some(v);
    }
    let mut free = vec![None; n];
    let mut k = 0;
    for d in 0..n {
        if values[d].is_none() {
            free[d] = Some(k);
            k += 1;
        }
    }
    Ok((free, values))
}

fn free_norm(r: &[f64], free: &[Option<usize>]) -> f64 {
    r.iter()
        .zip(free)
        .filter(|(_, f)| f.is_some())
        .map(|(v, _)| v * v)
        .sum::<f64>()
        .sqrt()
}

/// Newton iterations for the increment ending at pseudo-time `t`, starting
/// from `u_start` with committed histories.
pub fn solve_increment(
    model: &Model,
    u_start: &[f64],
    histories: &HistoryStore,
    t: f64,
    mu: f64,
    settings: &SolverSettings,
    observer: &mut (dyn FnMut(&IterationInfo) + Send),
) -> Result<IncrementResult> {
    let (free, values) = constraints(model, t)?;
    let mut u = u_start.to_vec();
    let du_p: Vec<f64> = values
        .iter()
        .zip(&u)
        .map(|(v, u)| v.map_or(0.0, |v| v - u))
        .collect();
    let abs_tol = settings.abs_tol * model.stiffness_scale * model.length_scale.powi(model.dim as i32 - 1);
    let mut tol = abs_tol;
    let mut history = vec![];
    let mut solves = 0;
    loop {
        let assembled = assemble(model, &u, histories, mu)?;
        let norm = free_norm(&assembled.residual, &free);
        if !norm.is_finite() {
            return Err(Error::NoConvergence {
                what: "equilibrium",
                iterations: solves,
                residual: norm,
            });
        }
        history.push(norm);
        observer(&IterationInfo {
            iteration: solves,
            residual_norm: norm,
            u: &u,
            assembled: &assembled,
        });
        if solves > 0 && norm <= tol {
            return Ok(IncrementResult {
                u,
                iterations: solves,
                residual_history: history,
                tolerance: tol,
                assembled,
            });
        }
        if solves == settings.max_iterations {
            return Err(Error::NoConvergence {
                what: "equilibrium",
                iterations: solves,
                residual: norm,
            });
        }
        let rhs: Vec<f64> = assembled.residual.iter().map(|v| -v).collect();
        let zero;
        let dup = if solves == 0 {
            &du_p
        } else {
            zero = vec![0.0; u.len()];
            &zero
        };
        let (du, rhs_norm) = solve_reduced(&assembled.triplets, &rhs, &free, dup)?;
        if solves == 0 {
            tol = (settings.rel_tol * rhs_norm).max(abs_tol);
        }
        for (a, b) in u.iter_mut().zip(&du) {
            *a += b;
        }
        solves += 1;
    }
}

/// Summary of one scheduled load step.
#[derive(Clone, Debug, Default, Serialize)]
pub struct StepReport {
    pub step: usize,
    pub time: f64,
    pub reaction: [f64; 3],
    pub torque_z: f64,
    /// Linear solves over all sub-increments of the step.
    pub iterations: usize,
    pub max_increment_iterations: usize,
    pub bisections: usize,
    pub residual_history: Vec<f64>,
    /// Dissipation of this step and the running total.
    pub dissipation: f64,
    pub cumulative_dissipation: f64,
    pub min_point_dissipation: f64,
    pub active_points: usize,
    pub stick_points: usize,
    pub slip_points: usize,
    pub max_sliding_iterations: usize,
    pub max_sliding_residual: f64,
    /// Per slave loop: sum of slave-side contact forces.
    pub net_slave_force: Vec<[f64; 3]>,
    /// Per slave loop: integrated tangential traction.
    pub net_tangential: Vec<[f64; 3]>,
}

/// Reaction force and z torque of the reaction set from the full residual.
pub fn reactions(model: &Model, u: &[f64], residual: &[f64]) -> (Vector3<f64>, f64) {
    let Some(name) = &model.reaction_set else {
        return (Vector3::zeros(), 0.0);
    };
    let Ok(ids) = model.set(name) else {
        return (Vector3::zeros(), 0.0);
    };
    let mut f = Vector3::zeros();
    let mut m = 0.0;
    for &n in ids {
        let r = model.node_displacement(residual, n);
        let arm = model.current_position(u, n) - model.torque_center;
        f += r;
        m += arm.x * r.y - arm.y * r.x;
    }
    (f, m)
}

/// Pseudo-times at the end of every scheduled step.
pub fn step_times(model: &Model) -> Vec<f64> {
    let mut out = vec![];
    for (p, phase) in model.schedule.phases.iter().enumerate() {
        for k in 1..=phase.steps {
            out.push(p as f64 + k as f64 / phase.steps as f64);
        }
    }
    out
}

pub struct Solver {
    pub settings: SolverSettings,
    pool: rayon::ThreadPool,
}

impl Solver {
    pub fn new(settings: SolverSettings) -> Result<Self> {
        let threads = settings.threads.or_else(|| {
            std::env::var("FRICFEM_THREADS")
                .ok()
                .and_then(|v| v.trim().parse::<usize>().ok())
                .filter(|&n| n > 0)
        });
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| Error::Scene(format!("cannot start worker threads: {e}")))?;
        Ok(Self { settings, pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Friction coefficient in effect at pseudo-time `t`.
    pub fn friction_at(model: &Model, t: f64) -> f64 {
        let p = model.schedule.phase_at(t);
        if model.schedule.phases[p].friction {
            model.contact.mu
        } else {
            0.0
        }
    }

    /// Advances `state` by the next scheduled step, bisecting on recoverable
    /// failures. The state is left untouched on error.
    pub fn step(&self, state: &mut SceneState, observer: &mut (dyn FnMut(&IterationInfo) + Send)) -> Result<StepReport> {
        let times = step_times(&state.model);
        let t1 = *times.get(state.step).ok_or_else(|| Error::StepFailed {
            time: state.time,
            reason: "schedule finished".into(),
        })?;
        let mut work = WorkState {
            u: state.u.clone(),
            histories: state.histories.clone(),
            time: state.time,
            dissipation: 0.0,
            min_point: 0.0,
            report: StepReport::default(),
            last: None,
        };
        self.pool
            .install(|| self.advance(&state.model, &mut work, t1, 0, observer))?;
        let last = work.last.take().expect("at least one increment");
        let (f, m) = reactions(&state.model, &work.u, &last.assembled.residual);
        state.u = work.u;
        state.histories = work.histories;
        state.time = t1;
        state.step += 1;
        state.cumulative_dissipation += work.dissipation;
        let stats: ContactStats = last.assembled.contact.stats;
        let mut rep = work.report;
        rep.step = state.step;
        rep.time = t1;
        rep.reaction = [f.x, f.y, f.z];
        rep.torque_z = m;
        rep.residual_history = last.residual_history;
        rep.dissipation = work.dissipation;
        rep.cumulative_dissipation = state.cumulative_dissipation;
        rep.min_point_dissipation = work.min_point;
        rep.active_points = stats.active;
        rep.stick_points = stats.stick;
        rep.slip_points = stats.slip;
        rep.max_sliding_iterations = rep.max_sliding_iterations.max(stats.max_sliding_iterations);
        rep.max_sliding_residual = rep.max_sliding_residual.max(stats.max_sliding_residual);
        rep.net_slave_force = last
            .assembled
            .contact
            .net_slave_force
            .iter()
            .map(|v| [v.x, v.y, v.z])
            .collect();
        rep.net_tangential = last
            .assembled
            .contact
            .net_tangential
            .iter()
            .map(|v| [v.x, v.y, v.z])
            .collect();
        Ok(rep)
    }

    fn advance(
        &self,
        model: &Model,
        work: &mut WorkState,
        t1: f64,
        depth: usize,
        observer: &mut (dyn FnMut(&IterationInfo) + Send),
    ) -> Result<()> {
        let mu = Self::friction_at(model, t1);
        match solve_increment(model, &work.u, &work.histories, t1, mu, &self.settings, observer) {
            Ok(inc) => {
                let (hist, d, min_point) = commit_histories(model, &inc.assembled.contact, &work.histories);
                work.histories = hist;
                work.dissipation += d;
                work.min_point = min_point;
                work.u = inc.u.clone();
                work.time = t1;
                work.report.iterations += inc.iterations;
                work.report.max_increment_iterations = work.report.max_increment_iterations.max(inc.iterations);
                let s = inc.assembled.contact.stats;
                work.report.max_sliding_iterations = work.report.max_sliding_iterations.max(s.max_sliding_iterations);
                work.report.max_sliding_residual = work.report.max_sliding_residual.max(s.max_sliding_residual);
                work.last = Some(inc);
                Ok(())
            }
            Err(e) if e.is_recoverable() && depth < self.settings.max_bisections => {
                log::debug!("bisecting increment ending at t = {t1}: {e}");
                work.report.bisections += 1;
                let mid = 0.5 * (work.time + t1);
                self.advance(model, work, mid, depth + 1, observer)?;
                self.advance(model, work, t1, depth + 1, observer)
            }
            Err(e) => Err(Error::StepFailed {
                time: t1,
                reason: e.to_string(),
            }),
        }
    }

    /// Runs all remaining steps, calling `on_step` after each.
    pub fn run(&self, state: &mut SceneState, on_step: &mut dyn FnMut(&SceneState, &StepReport)) -> Result<Vec<StepReport>> {
        warn_on_model(&state.model);
        let n = step_times(&state.model).len();
        let mut out = vec![];
        while state.step < n {
            let rep = self.step(state, &mut |_| {})?;
            on_step(state, &rep);
            out.push(rep);
        }
        Ok(out)
    }
}

struct WorkState {
    u: Vec<f64>,
    histories: HistoryStore,
    time: f64,
    dissipation: f64,
    min_point: f64,
    report: StepReport,
    last: Option<IncrementResult>,
}

/// Logs model settings whose tangent is only approximate.
pub fn warn_on_model(model: &Model) {
    if model.contact.law.is_isotropic() {
        return;
    }
    for run in model.contact_runs() {
        if !model.surfaces[run.master].map.is_rigid() {
            log::warn!(
                "anisotropic penalty on deformable master `{}`: tangent ignores normal variation",
                model.surfaces[run.master].name
            );
        }
    }
}
