use nalgebra::{DMatrix, Matrix3, Vector3};

use super::law::{contact_traction, PenaltyLaw};
use crate::geometry::ShapeEval;
use crate::kinematics::Interaction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Slave,
    Master,
}

/// Node groups of the tangent blocks: the slave element, the master element
/// at the interacting point ξ̂ (slip) and the master element at the previous
/// interacting point ξ̂ⁿ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Group {
    K,
    LHat,
    LBar,
}

/// Contribution of one quadrature point in terms of patch control points.
#[derive(Clone, Debug, Default)]
pub struct PointContribution {
    pub slots: Vec<(Side, usize)>,
    pub force: Vec<Vector3<f64>>,
    /// `slots × slots` blocks, row-major: `∂force[i]/∂x[j]`.
    pub tangent: Vec<Matrix3<f64>>,
}

impl PointContribution {
    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn block(&self, i: usize, j: usize) -> &Matrix3<f64> {
        &self.tangent[i * self.slots.len() + j]
    }
}

struct GroupData {
    group: Group,
    side: Side,
    ctrl: Vec<usize>,
    n: Vec<f64>,
    dn: Vec<[f64; 2]>,
    /// `Δĝ = Σ G_j Δx_j`.
    g: Vec<Matrix3<f64>>,
    /// `Δξ^α = Σ M^α_j · Δx_j`.
    m: Vec<[Vector3<f64>; 2]>,
    /// Whether the group carries a force (rows are assembled).
    loaded: bool,
}

fn outer(a: &Vector3<f64>, b: &Vector3<f64>) -> Matrix3<f64> {
    a * b.transpose()
}

fn groups(slave: &ShapeEval, inter: &Interaction) -> Vec<GroupData> {
    let id = Matrix3::identity();
    let mut out = vec![];
    let group = |group, side, s: &ShapeEval, loaded| GroupData {
        group,
        side,
        ctrl: s.ctrl.clone(),
        n: s.n.clone(),
        dn: s.dn.clone(),
        g: vec![Matrix3::zeros(); s.len()],
        m: vec![[Vector3::zeros(); 2]; s.len()],
        loaded,
    };
    let mut k = group(Group::K, Side::Slave, slave, true);
    for j in 0..k.ctrl.len() {
        k.g[j] = id * k.n[j];
    }
    match (&inter.slide, inter.omega) {
        (Some(sp), 1) => {
            let dim = sp.frame.dim;
            let a = &sp.frame.a;
            let mut hat = group(Group::LHat, Side::Master, &inter.shape, true);
            let w = sp.g - sp.g_tau_max;
            let cinv = sp.cinv;
            // M^α_e = −c^{αβ}(c_β − m_β) N_e
            for j in 0..k.ctrl.len() {
                for al in 0..dim {
                    let mut v = Vector3::zeros();
                    for be in 0..dim {
                        v -= (sp.c[be] - sp.m[be]) * (cinv[al][be] * k.n[j]);
                    }
                    k.m[j][al] = v;
                }
            }
            // M^α_ê = −c^{αβ}[(g − g_τ^max) N_ê,β − c_β N_ê − d_β^γ N_ê,γ]
            for j in 0..hat.ctrl.len() {
                for al in 0..dim {
                    let mut v = Vector3::zeros();
                    for be in 0..dim {
                        let mut inner = w * hat.dn[j][be] - sp.c[be] * hat.n[j];
                        for ga in 0..dim {
                            inner -= sp.d[be][ga] * hat.dn[j][ga];
                        }
                        v -= inner * cinv[al][be];
                    }
                    hat.m[j][al] = v;
                }
                hat.g[j] = -id * hat.n[j];
            }
            out.push(k);
            let k = out.last_mut().unwrap();
            for j in 0..k.ctrl.len() {
                for al in 0..dim {
                    k.g[j] -= outer(&a[al], &k.m[j][al]);
                }
            }
            for j in 0..hat.ctrl.len() {
                for al in 0..dim {
                    hat.g[j] -= outer(&a[al], &hat.m[j][al]);
                }
            }
            out.push(hat);
            // M^α_ē = −c^{αβ} m_β N_ē
            if let Some(prev) = &inter.shape_prev {
                if sp.mu > 0.0 {
                    let mut bar = group(Group::LBar, Side::Master, prev, false);
                    for j in 0..bar.ctrl.len() {
                        for al in 0..dim {
                            let mut v = Vector3::zeros();
                            for be in 0..dim {
                                v -= sp.m[be] * (cinv[al][be] * bar.n[j]);
                            }
                            bar.m[j][al] = v;
                            bar.g[j] -= outer(&a[al], &v);
                        }
                    }
                    out.push(bar);
                }
            }
        }
        _ => {
            // Stick: the master point ξ̂ⁿ is fixed in parameter space.
            let mut bar = group(Group::LBar, Side::Master, &inter.shape, true);
            for j in 0..bar.ctrl.len() {
                bar.g[j] = -id * bar.n[j];
            }
            out.push(k);
            out.push(bar);
        }
    }
    out
}

/// Force and tangent of one active quadrature point with reference weight
/// `weight`. With `full_pass == false` master rows are dropped.
pub fn point_contribution(
    slave: &ShapeEval,
    weight: f64,
    inter: &Interaction,
    law: &PenaltyLaw,
    full_pass: bool,
) -> PointContribution {
    if !inter.phi {
        return PointContribution::default();
    }
    let eps = law.tensor(&inter.frame);
    let t = contact_traction(&inter.g_hat, &inter.frame, law, true);
    let gs = groups(slave, inter);
    let slip = inter.omega == 1 && inter.slide.is_some();

    let mut slots: Vec<(Side, usize)> = vec![];
    let mut col_g: Vec<Matrix3<f64>> = vec![];
    let mut col_m: Vec<[Vector3<f64>; 2]> = vec![];
    let slot_of = |slots: &mut Vec<(Side, usize)>, cg: &mut Vec<Matrix3<f64>>, cm: &mut Vec<[Vector3<f64>; 2]>, key| {
        if let Some(i) = slots.iter().position(|s| *s == key) {
            i
        } else {
            slots.push(key);
            cg.push(Matrix3::zeros());
            cm.push([Vector3::zeros(); 2]);
            slots.len() - 1
        }
    };
    for g in &gs {
        for j in 0..g.ctrl.len() {
            let s = slot_of(&mut slots, &mut col_g, &mut col_m, (g.side, g.ctrl[j]));
            col_g[s] += g.g[j];
            col_m[s][0] += g.m[j][0];
            col_m[s][1] += g.m[j][1];
        }
    }
    let ns = slots.len();
    let mut force = vec![Vector3::zeros(); ns];
    let mut tangent = vec![Matrix3::zeros(); ns * ns];
    let dim = inter.frame.dim;
    for g in &gs {
        if !g.loaded || (g.side == Side::Master && !full_pass) {
            continue;
        }
        let sgn = if g.side == Side::Slave { 1.0 } else { -1.0 };
        for i in 0..g.ctrl.len() {
            let row = slots.iter().position(|s| *s == (g.side, g.ctrl[i])).unwrap();
            let ni = sgn * g.n[i] * weight;
            force[row] += t * ni;
            for col in 0..ns {
                let mut blk = eps * col_g[col] * ni;
                if slip && g.side == Side::Master {
                    for al in 0..dim {
                        blk -= outer(&t, &col_m[col][al]) * (g.dn[i][al] * weight);
                    }
                }
                tangent[row * ns + col] += blk;
            }
        }
    }
    PointContribution { slots, force, tangent }
}

/// Tangent blocks of one point, labelled by node groups (`kk`, `k l̂`, ...),
/// each of size `(rows·dim) × (cols·dim)`.
pub fn labeled_blocks(
    slave: &ShapeEval,
    weight: f64,
    inter: &Interaction,
    law: &PenaltyLaw,
    dim: usize,
) -> Vec<((Group, Group), DMatrix<f64>)> {
    if !inter.phi {
        return vec![];
    }
    let eps = law.tensor(&inter.frame);
    let t = contact_traction(&inter.g_hat, &inter.frame, law, true);
    let gs = groups(slave, inter);
    let slip = inter.omega == 1 && inter.slide.is_some();
    let pdim = inter.frame.dim;
    let mut out = vec![];
    for rg in gs.iter().filter(|g| g.loaded) {
        let sgn = if rg.side == Side::Slave { 1.0 } else { -1.0 };
        for cg in &gs {
            let mut m = DMatrix::zeros(rg.ctrl.len() * dim, cg.ctrl.len() * dim);
            for i in 0..rg.ctrl.len() {
                for j in 0..cg.ctrl.len() {
                    let mut blk = eps * cg.g[j] * (sgn * rg.n[i] * weight);
                    if slip && rg.side == Side::Master {
                        for al in 0..pdim {
                            blk -= outer(&t, &cg.m[j][al]) * (rg.dn[i][al] * weight);
                        }
                    }
                    for a in 0..dim {
                        for b in 0..dim {
                            m[(i * dim + a, j * dim + b)] = blk[(a, b)];
                        }
                    }
                }
            }
            out.push(((rg.group, cg.group), m));
        }
    }
    out
}
