use nalgebra::Vector3;
use rayon::prelude::*;

use super::law::contact_traction;
use super::point::{point_contribution, PointContribution, Side};
use crate::error::{Error, Result};
use crate::geometry::{gauss_legendre, reference_area_element, ShapeEval};
use crate::kinematics::{bounding_box, update_interaction, ContactHistory, Interaction, InteractionParams};
use crate::model::{ContactRun, ContactSurface, HistoryStore, Model};

/// Slave quadrature points of one element: shape functions and reference
/// area weights.
pub fn slave_quadrature(surface: &ContactSurface, element: usize) -> Result<Vec<(ShapeEval, f64)>> {
    let patch = &surface.patch;
    let dim = patch.param_dim();
    let (pts, wts) = gauss_legendre(surface.quadrature);
    let dom = patch.element_domain(element)?;
    let half = [0.5 * (dom[0][1] - dom[0][0]), 0.5 * (dom[1][1] - dom[1][0])];
    let mid = [0.5 * (dom[0][1] + dom[0][0]), 0.5 * (dom[1][1] + dom[1][0])];
    let nq = surface.quadrature;
    let n1 = if dim == 2 { nq } else { 1 };
    let mut out = Vec::with_capacity(nq * n1);
    for j in 0..n1 {
        for i in 0..nq {
            let xi = [mid[0] + half[0] * pts[i], if dim == 2 { mid[1] + half[1] * pts[j] } else { 0.0 }];
            let shape = patch.shape_functions(element, xi)?;
            let mut w = wts[i] * half[0];
            if dim == 2 {
                w *= wts[j] * half[1];
            }
            w *= reference_area_element(patch, &shape);
            out.push((shape, w));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct PointResult {
    pub qp: usize,
    pub weight: f64,
    pub x_k: Vector3<f64>,
    pub interaction: Option<Interaction>,
    pub contribution: PointContribution,
}

/// Contact contributions of one slave element, with forces keyed by patch
/// control index.
#[derive(Clone, Debug)]
pub struct ContactElementForces {
    pub element: usize,
    pub points: Vec<PointResult>,
    pub f_slave: Vec<(usize, Vector3<f64>)>,
    pub f_master: Vec<(usize, Vector3<f64>)>,
}

/// Everything the slave loops need about one run for one configuration.
pub struct RunContext<'a> {
    pub run: ContactRun,
    pub slave: &'a ContactSurface,
    pub master: &'a ContactSurface,
    pub slave_controls: Vec<Vector3<f64>>,
    pub master_controls: Vec<Vector3<f64>>,
    pub bbox: (Vector3<f64>, Vector3<f64>),
    pub params: InteractionParams,
    pub points_per_element: usize,
}

impl<'a> RunContext<'a> {
    pub fn new(model: &'a Model, run: ContactRun, u: &[f64], mu: f64) -> Self {
        let slave = &model.surfaces[run.slave];
        let master = &model.surfaces[run.master];
        let master_controls = master.current_controls(model, u);
        let bbox = bounding_box(&master_controls);
        let params = InteractionParams {
            mu: model.contact.law.cone_mu(mu),
            tol_tau: 1e-10 * model.length_scale,
            max_penetration: model.contact.max_penetration,
            search_radius: model.contact.search_radius,
        };
        Self {
            run,
            slave,
            master,
            slave_controls: slave.current_controls(model, u),
            master_controls,
            bbox,
            params,
            points_per_element: slave.quadrature.pow(slave.patch.param_dim() as u32),
        }
    }
}

/// Forces and tangents of every quadrature point of one slave element.
pub fn element_contact_forces(
    ctx: &RunContext,
    element: usize,
    histories: &[ContactHistory],
    model: &Model,
) -> Result<ContactElementForces> {
    let quad = slave_quadrature(ctx.slave, element)?;
    let mut points = Vec::with_capacity(quad.len());
    let mut f_slave: Vec<(usize, Vector3<f64>)> = vec![];
    let mut f_master: Vec<(usize, Vector3<f64>)> = vec![];
    for (q, (shape, w)) in quad.into_iter().enumerate() {
        let idx = element * ctx.points_per_element + q;
        let hist = histories.get(idx).ok_or(Error::MissingHistory(idx))?;
        let x_k = shape.point(&ctx.slave_controls);
        let inter = update_interaction(hist, &x_k, &ctx.master.patch, &ctx.master_controls, &ctx.bbox, &ctx.params)?;
        let contribution = match &inter {
            Some(i) => point_contribution(&shape, w, i, &model.contact.law, ctx.run.full_pass),
            None => PointContribution::default(),
        };
        for (s, f) in contribution.slots.iter().zip(&contribution.force) {
            let list = match s.0 {
                Side::Slave => &mut f_slave,
                Side::Master => &mut f_master,
            };
            if f.norm_squared() == 0.0 && s.0 == Side::Master && !ctx.run.full_pass {
                continue;
            }
            match list.iter_mut().find(|(c, _)| *c == s.1) {
                Some((_, acc)) => *acc += f,
                None => list.push((s.1, *f)),
            }
        }
        points.push(PointResult {
            qp: q,
            weight: w,
            x_k,
            interaction: inter,
            contribution,
        });
    }
    Ok(ContactElementForces {
        element,
        points,
        f_slave,
        f_master,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ContactStats {
    pub active: usize,
    pub stick: usize,
    pub slip: usize,
    pub leaving: usize,
    pub max_sliding_iterations: usize,
    pub max_sliding_residual: f64,
}

/// Assembled contact contribution for one configuration.
#[derive(Clone, Debug, Default)]
pub struct ContactAssembly {
    pub residual: Vec<f64>,
    pub triplets: Vec<(usize, usize, f64)>,
    /// Per run, per slave element.
    pub elements: Vec<Vec<ContactElementForces>>,
    /// Per run: sum of slave-side forces.
    pub net_slave_force: Vec<Vector3<f64>>,
    /// Per run: tangential nominal traction integrated over the slave
    /// reference surface.
    pub net_tangential: Vec<Vector3<f64>>,
    pub stats: ContactStats,
}

fn dof_map(surface: &ContactSurface, ctrl: usize) -> &[(usize, f64)] {
    &surface.map.rows[ctrl]
}

/// Runs all slave loops and scatters forces and tangents to global dofs.
pub fn assemble_contact(model: &Model, u: &[f64], histories: &HistoryStore, mu: f64) -> Result<ContactAssembly> {
    let dim = model.dim;
    let mut out = ContactAssembly {
        residual: vec![0.0; model.n_dofs()],
        ..Default::default()
    };
    for (r, run) in model.contact_runs().into_iter().enumerate() {
        let ctx = RunContext::new(model, run, u, mu);
        let hist = &histories.runs[r];
        let elements: Vec<ContactElementForces> = (0..ctx.slave.patch.n_elements())
            .into_par_iter()
            .map(|e| element_contact_forces(&ctx, e, hist, model))
            .collect::<Result<_>>()?;
        let mut net = Vector3::zeros();
        let mut net_t = Vector3::zeros();
        for ef in &elements {
            for p in &ef.points {
                if let Some(i) = &p.interaction {
                    if i.phi {
                        let t = contact_traction(&i.g_hat, &i.frame, &model.contact.law, true);
                        net_t += i.frame.tangential_part(&t) * p.weight;
                    }
                    if i.leaving {
                        out.stats.leaving += 1;
                    }
                    if i.phi {
                        out.stats.active += 1;
                        if i.omega == 0 {
                            out.stats.stick += 1;
                        } else {
                            out.stats.slip += 1;
                        }
                    }
                    if let Some(sp) = &i.slide {
                        out.stats.max_sliding_iterations = out.stats.max_sliding_iterations.max(sp.iterations);
                        out.stats.max_sliding_residual = out.stats.max_sliding_residual.max(sp.residual);
                    }
                }
                let c = &p.contribution;
                let ns = c.slots.len();
                let surf = |s: Side| match s {
                    Side::Slave => ctx.slave,
                    Side::Master => ctx.master,
                };
                for (i, &(side, ctrl)) in c.slots.iter().enumerate() {
                    if side == Side::Slave {
                        net += c.force[i];
                    }
                    for &(node, coef) in dof_map(surf(side), ctrl) {
                        for a in 0..dim {
                            out.residual[node * dim + a] += coef * c.force[i][a];
                        }
                    }
                }
                for i in 0..ns {
                    let rows = dof_map(surf(c.slots[i].0), c.slots[i].1);
                    if rows.is_empty() {
                        continue;
                    }
                    for j in 0..ns {
                        let cols = dof_map(surf(c.slots[j].0), c.slots[j].1);
                        let blk = c.block(i, j);
                        if cols.is_empty() || blk.iter().all(|v| *v == 0.0) {
                            continue;
                        }
                        for &(rn, rc) in rows {
                            for &(cn, cc) in cols {
                                for a in 0..dim {
                                    for b in 0..dim {
                                        let v = rc * cc * blk[(a, b)];
                                        if v != 0.0 {
                                            out.triplets.push((rn * dim + a, cn * dim + b, v));
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out.net_slave_force.push(net);
        out.net_tangential.push(net_t);
        out.elements.push(elements);
    }
    Ok(out)
}

/// Histories to commit after a converged step, the global dissipation of
/// the step and the smallest accumulated per-point dissipation.
pub fn commit_histories(model: &Model, assembly: &ContactAssembly, old: &HistoryStore) -> (HistoryStore, f64, f64) {
    let mut new = old.clone();
    let mut total = 0.0;
    let mut min_point = f64::INFINITY;
    for (r, elements) in assembly.elements.iter().enumerate() {
        let ppe = if let Some(run) = model.contact_runs().get(r) {
            let s = &model.surfaces[run.slave];
            s.quadrature.pow(s.patch.param_dim() as u32)
        } else {
            continue;
        };
        for ef in elements {
            for p in &ef.points {
                let idx = ef.element * ppe + p.qp;
                let prev = &old.runs[r][idx];
                let (hist, d) = match &p.interaction {
                    Some(i) => {
                        let d = point_dissipation(model, i);
                        (i.committed(prev, d), d)
                    }
                    None => (
                        ContactHistory {
                            active: false,
                            xi_hat_prev: None,
                            master: prev.master,
                            omega: 0,
                            accumulated_dissipation: prev.accumulated_dissipation,
                        },
                        0.0,
                    ),
                };
                total += d * p.weight;
                min_point = min_point.min(hist.accumulated_dissipation);
                new.runs[r][idx] = hist;
            }
        }
    }
    if !min_point.is_finite() {
        min_point = 0.0;
    }
    (new, total, min_point)
}

/// Dissipation per reference area of one point over the step:
/// `P_τT · (x(ξ̂ⁿ⁺¹) − x(ξ̂ⁿ))` in the current configuration.
pub fn point_dissipation(model: &Model, inter: &Interaction) -> f64 {
    if !inter.phi || inter.omega == 0 {
        return 0.0;
    }
    let Some(x_prev) = inter.x_prev else {
        return 0.0;
    };
    let t = contact_traction(&inter.g_hat, &inter.frame, &model.contact.law, true);
    inter.frame.tangential_part(&t).dot(&(inter.frame.x - x_prev))
}
