use nalgebra::{DMatrix, Vector3};
use serde::{Deserialize, Serialize};

use super::basis::{bezier_extraction, extracted_bspline, hermite_basis, knot_spans, validate_knots, Basis1d};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatchKind {
    Nurbs,
    Hermite,
    Lagrange,
    RigidPlane,
}

/// Shape functions of one element at one parametric point. Derivatives are
/// taken with respect to the patch-global parameters.
#[derive(Clone, Debug, Default)]
pub struct ShapeEval {
    pub element: usize,
    pub xi: [f64; 2],
    pub ctrl: Vec<usize>,
    pub n: Vec<f64>,
    pub dn: Vec<[f64; 2]>,
    pub ddn: Vec<[[f64; 2]; 2]>,
}

impl ShapeEval {
    fn with_capacity(element: usize, xi: [f64; 2], cap: usize) -> Self {
        Self {
            element,
            xi,
            ctrl: Vec::with_capacity(cap),
            n: Vec::with_capacity(cap),
            dn: Vec::with_capacity(cap),
            ddn: Vec::with_capacity(cap),
        }
    }

    fn push(&mut self, ctrl: usize, n: f64, dn: [f64; 2], ddn: [[f64; 2]; 2]) {
        if let Some(k) = self.ctrl.iter().position(|&c| c == ctrl) {
            self.n[k] += n;
            for a in 0..2 {
                self.dn[k][a] += dn[a];
                for b in 0..2 {
                    self.ddn[k][a][b] += ddn[a][b];
                }
            }
        } else {
            self.ctrl.push(ctrl);
            self.n.push(n);
            self.dn.push(dn);
            self.ddn.push(ddn);
        }
    }

    pub fn len(&self) -> usize {
        self.ctrl.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ctrl.is_empty()
    }

    pub fn point(&self, controls: &[Vector3<f64>]) -> Vector3<f64> {
        self.ctrl
            .iter()
            .zip(&self.n)
            .fold(Vector3::zeros(), |acc, (&c, &n)| acc + controls[c] * n)
    }

    pub fn tangent(&self, controls: &[Vector3<f64>], alpha: usize) -> Vector3<f64> {
        self.ctrl
            .iter()
            .zip(&self.dn)
            .fold(Vector3::zeros(), |acc, (&c, dn)| acc + controls[c] * dn[alpha])
    }

    pub fn tangent_deriv(&self, controls: &[Vector3<f64>], alpha: usize, beta: usize) -> Vector3<f64> {
        self.ctrl
            .iter()
            .zip(&self.ddn)
            .fold(Vector3::zeros(), |acc, (&c, d)| acc + controls[c] * d[alpha][beta])
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Nurbs {
        degrees: [usize; 2],
        knots: [Vec<f64>; 2],
        n_ctrl: [usize; 2],
        weights: Vec<f64>,
        spans: [Vec<(usize, f64, f64)>; 2],
        extraction: [Vec<DMatrix<f64>>; 2],
    },
    /// C¹ cubic Hermite chain; nodal slopes are tied to nodal positions.
    Hermite { n_el: usize },
    Lagrange { n_el: [usize; 2] },
    RigidPlane { range: [[f64; 2]; 2] },
}

/// A parametric contact surface: a curve (`param_dim == 1`) for 2D
/// problems or a surface for 3D problems.
#[derive(Clone, Debug)]
pub struct Patch {
    kind: PatchKind,
    param_dim: usize,
    ref_controls: Vec<Vector3<f64>>,
    normal_sign: f64,
    repr: Repr,
}

impl Patch {
    pub fn nurbs_curve(degree: usize, knots: Vec<f64>, controls: Vec<Vector3<f64>>, weights: Vec<f64>) -> Result<Self> {
        Self::nurbs(1, [degree, 0], [knots, vec![]], [controls.len(), 1], controls, weights)
    }

    /// Tensor-product NURBS surface; control `i + n_ctrl[0]·j`.
    pub fn nurbs_surface(
        degrees: [usize; 2],
        knots: [Vec<f64>; 2],
        n_ctrl: [usize; 2],
        controls: Vec<Vector3<f64>>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        Self::nurbs(2, degrees, knots, n_ctrl, controls, weights)
    }

    fn nurbs(
        param_dim: usize,
        degrees: [usize; 2],
        knots: [Vec<f64>; 2],
        n_ctrl: [usize; 2],
        controls: Vec<Vector3<f64>>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let mut spans: [Vec<(usize, f64, f64)>; 2] = [vec![], vec![]];
        let mut extraction: [Vec<DMatrix<f64>>; 2] = [vec![], vec![]];
        for k in 0..param_dim {
            validate_knots(&knots[k], degrees[k])?;
            let expected = knots[k].len() - degrees[k] - 1;
            if expected != n_ctrl[k] {
                return Err(Error::InvalidPatch(format!(
                    "direction {k}: {} knots and degree {} need {expected} control points, got {}",
                    knots[k].len(),
                    degrees[k],
                    n_ctrl[k]
                )));
            }
            spans[k] = knot_spans(&knots[k], degrees[k]);
            extraction[k] = bezier_extraction(&knots[k], degrees[k])?;
        }
        let total = n_ctrl[0] * if param_dim == 2 { n_ctrl[1] } else { 1 };
        if controls.len() != total || weights.len() != total {
            return Err(Error::InvalidPatch(format!(
                "expected {total} control points and weights, got {} and {}",
                controls.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidPatch("NURBS weights must be positive".into()));
        }
        Ok(Self {
            kind: PatchKind::Nurbs,
            param_dim,
            ref_controls: controls,
            normal_sign: 1.0,
            repr: Repr::Nurbs {
                degrees,
                knots,
                n_ctrl,
                weights,
                spans,
                extraction,
            },
        })
    }

    /// Hermite curve through `nodes`; the parameter runs over `[0, n_el]`.
    pub fn hermite_chain(nodes: Vec<Vector3<f64>>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidPatch("a Hermite chain needs at least two nodes".into()));
        }
        Ok(Self {
            kind: PatchKind::Hermite,
            param_dim: 1,
            repr: Repr::Hermite { n_el: nodes.len() - 1 },
            ref_controls: nodes,
            normal_sign: 1.0,
        })
    }

    /// Piecewise-linear curve through `nodes`; the parameter runs over `[0, n_el]`.
    pub fn lagrange_chain(nodes: Vec<Vector3<f64>>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidPatch("a polyline needs at least two nodes".into()));
        }
        Ok(Self {
            kind: PatchKind::Lagrange,
            param_dim: 1,
            repr: Repr::Lagrange {
                n_el: [nodes.len() - 1, 0],
            },
            ref_controls: nodes,
            normal_sign: 1.0,
        })
    }

    /// Bilinear facets on a `(n_el[0]+1) × (n_el[1]+1)` node grid.
    pub fn lagrange_grid(n_el: [usize; 2], nodes: Vec<Vector3<f64>>) -> Result<Self> {
        if n_el[0] == 0 || n_el[1] == 0 || nodes.len() != (n_el[0] + 1) * (n_el[1] + 1) {
            return Err(Error::InvalidPatch("node grid does not match element counts".into()));
        }
        Ok(Self {
            kind: PatchKind::Lagrange,
            param_dim: 2,
            repr: Repr::Lagrange { n_el },
            ref_controls: nodes,
            normal_sign: 1.0,
        })
    }

    /// Straight line `origin + s·dir`, `s ∈ range`.
    pub fn rigid_line(origin: Vector3<f64>, dir: Vector3<f64>, range: [f64; 2]) -> Result<Self> {
        Self::rigid(1, vec![origin, origin + dir], [range, [0.0, 0.0]])
    }

    /// Plane `origin + s₁·v1 + s₂·v2` over the rectangle `range`.
    pub fn rigid_plane(origin: Vector3<f64>, v1: Vector3<f64>, v2: Vector3<f64>, range: [[f64; 2]; 2]) -> Result<Self> {
        Self::rigid(2, vec![origin, origin + v1, origin + v2], range)
    }

    fn rigid(param_dim: usize, controls: Vec<Vector3<f64>>, range: [[f64; 2]; 2]) -> Result<Self> {
        for r in range.iter().take(param_dim) {
            if !(r[1] > r[0]) {
                return Err(Error::InvalidPatch("empty rigid plane range".into()));
            }
        }
        let patch = Self {
            kind: PatchKind::RigidPlane,
            param_dim,
            ref_controls: controls,
            normal_sign: 1.0,
            repr: Repr::RigidPlane { range },
        };
        let shape = patch.shape_at([range[0][0], range[1][0]])?;
        let c = &patch.ref_controls;
        let degenerate = if param_dim == 1 {
            shape.tangent(c, 0).norm() == 0.0
        } else {
            shape.tangent(c, 0).cross(&shape.tangent(c, 1)).norm() == 0.0
        };
        if degenerate {
            return Err(Error::InvalidPatch("rigid plane spanning vectors are degenerate".into()));
        }
        Ok(patch)
    }

    pub fn kind(&self) -> PatchKind {
        self.kind
    }

    pub fn param_dim(&self) -> usize {
        self.param_dim
    }

    pub fn ref_controls(&self) -> &[Vector3<f64>] {
        &self.ref_controls
    }

    pub fn n_controls(&self) -> usize {
        self.ref_controls.len()
    }

    /// +1 or −1; flips the normal produced by [`super::surface_frame`].
    pub fn normal_sign(&self) -> f64 {
        self.normal_sign
    }

    pub fn set_normal_sign(&mut self, sign: f64) {
        self.normal_sign = if sign < 0.0 { -1.0 } else { 1.0 };
    }

    pub fn weights(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Nurbs { weights, .. } => Some(weights),
            _ => None,
        }
    }

    pub fn degrees(&self) -> [usize; 2] {
        match &self.repr {
            Repr::Nurbs { degrees, .. } => *degrees,
            Repr::Hermite { .. } => [3, 0],
            Repr::Lagrange { .. } | Repr::RigidPlane { .. } => {
                if self.param_dim == 1 {
                    [1, 0]
                } else {
                    [1, 1]
                }
            }
        }
    }

    /// Elements per parametric direction (1 in unused directions).
    pub fn elements_per_dir(&self) -> [usize; 2] {
        let mut n = match &self.repr {
            Repr::Nurbs { spans, .. } => [spans[0].len(), spans[1].len()],
            Repr::Hermite { n_el } => [*n_el, 1],
            Repr::Lagrange { n_el } => *n_el,
            Repr::RigidPlane { .. } => [1, 1],
        };
        if self.param_dim == 1 {
            n[1] = 1;
        }
        n
    }

    pub fn n_elements(&self) -> usize {
        let n = self.elements_per_dir();
        n[0] * n[1]
    }

    /// Parametric bounds `[[lo₁, hi₁], [lo₂, hi₂]]`; unused directions are `[0, 0]`.
    pub fn domain(&self) -> [[f64; 2]; 2] {
        let mut d = match &self.repr {
            Repr::Nurbs { spans, .. } => {
                let mut d = [[0.0; 2]; 2];
                for k in 0..self.param_dim {
                    d[k] = [spans[k][0].1, spans[k].last().unwrap().2];
                }
                d
            }
            Repr::Hermite { n_el } => [[0.0, *n_el as f64], [0.0, 0.0]],
            Repr::Lagrange { n_el } => [[0.0, n_el[0] as f64], [0.0, n_el[1] as f64]],
            Repr::RigidPlane { range } => *range,
        };
        if self.param_dim == 1 {
            d[1] = [0.0, 0.0];
        }
        d
    }

    /// Parametric bounds of one element.
    pub fn element_domain(&self, element: usize) -> Result<[[f64; 2]; 2]> {
        let [e0, e1] = self.element_index(element)?;
        let mut d = match &self.repr {
            Repr::Nurbs { spans, .. } => {
                let mut d = [[0.0; 2]; 2];
                d[0] = [spans[0][e0].1, spans[0][e0].2];
                if self.param_dim == 2 {
                    d[1] = [spans[1][e1].1, spans[1][e1].2];
                }
                d
            }
            Repr::Hermite { .. } | Repr::Lagrange { .. } => [
                [e0 as f64, e0 as f64 + 1.0],
                [e1 as f64, e1 as f64 + 1.0],
            ],
            Repr::RigidPlane { range } => *range,
        };
        if self.param_dim == 1 {
            d[1] = [0.0, 0.0];
        }
        Ok(d)
    }

    fn element_index(&self, element: usize) -> Result<[usize; 2]> {
        let n = self.elements_per_dir();
        if element >= n[0] * n[1] {
            return Err(Error::ElementOutOfRange {
                element,
                count: n[0] * n[1],
            });
        }
        Ok([element % n[0], element / n[0]])
    }

    /// Clamps `xi` into the parameter domain; the flag reports whether any
    /// coordinate was moved onto (or already sat on) the boundary.
    pub fn clamp(&self, xi: [f64; 2]) -> ([f64; 2], bool) {
        let d = self.domain();
        let mut out = xi;
        let mut on_boundary = false;
        for k in 0..self.param_dim {
            let tol = 1e-12 * (d[k][1] - d[k][0]);
            if out[k] <= d[k][0] + tol {
                out[k] = d[k][0];
                on_boundary = true;
            } else if out[k] >= d[k][1] - tol {
                out[k] = d[k][1];
                on_boundary = true;
            }
        }
        if self.param_dim == 1 {
            out[1] = 0.0;
        }
        (out, on_boundary)
    }

    /// Element containing the patch-global parameter `xi` (clamped).
    pub fn locate(&self, xi: [f64; 2]) -> usize {
        let (xi, _) = self.clamp(xi);
        let n = self.elements_per_dir();
        let mut idx = [0usize; 2];
        for k in 0..self.param_dim {
            idx[k] = match &self.repr {
                Repr::Nurbs { spans, .. } => {
                    let s = &spans[k];
                    // first span whose upper end is not below xi
                    s.partition_point(|&(_, _, hi)| hi < xi[k]).min(s.len() - 1)
                }
                Repr::Hermite { .. } | Repr::Lagrange { .. } => (xi[k].floor().max(0.0) as usize).min(n[k] - 1),
                Repr::RigidPlane { .. } => 0,
            };
        }
        idx[0] + n[0] * idx[1]
    }

    /// Shape functions at `xi`, locating the owning element first.
    pub fn shape_at(&self, xi: [f64; 2]) -> Result<ShapeEval> {
        let (xi, _) = self.clamp(xi);
        self.shape_functions(self.locate(xi), xi)
    }

    /// Shape functions of `element` at the patch-global parameter `xi`.
    pub fn shape_functions(&self, element: usize, xi: [f64; 2]) -> Result<ShapeEval> {
        let [e0, e1] = self.element_index(element)?;
        let dom = self.element_domain(element)?;
        for k in 0..self.param_dim {
            let tol = 1e-9 * (dom[k][1] - dom[k][0]).max(1.0);
            if xi[k] < dom[k][0] - tol || xi[k] > dom[k][1] + tol {
                return Err(Error::OutOfRange {
                    value: xi[k],
                    lo: dom[k][0],
                    hi: dom[k][1],
                });
            }
        }
        let xi = if self.param_dim == 1 { [xi[0], 0.0] } else { xi };
        match &self.repr {
            Repr::Nurbs {
                degrees,
                n_ctrl,
                weights,
                spans,
                extraction,
                ..
            } => {
                let mut b: [Basis1d; 2] = [unit_basis(), unit_basis()];
                let mut first = [0usize; 2];
                for k in 0..self.param_dim {
                    let idx = [e0, e1][k];
                    let (span, lo, hi) = spans[k][idx];
                    let h = hi - lo;
                    let t = ((xi[k] - lo) / h).clamp(0.0, 1.0);
                    b[k] = extracted_bspline(&extraction[k][idx], degrees[k], t, h)?;
                    first[k] = span - degrees[k];
                }
                let n0 = b[0].values.len();
                let n1 = b[1].values.len();
                let mut out = ShapeEval::with_capacity(element, xi, n0 * n1);
                let (mut w, mut w1, mut w2) = (0.0, [0.0; 2], [[0.0; 2]; 2]);
                for j in 0..n1 {
                    for i in 0..n0 {
                        let ctrl = (first[0] + i) + n_ctrl[0] * (first[1] + j);
                        let wa = weights[ctrl];
                        let n = b[0].values[i] * b[1].values[j];
                        let dn = [b[0].d1[i] * b[1].values[j], b[0].values[i] * b[1].d1[j]];
                        let cross = b[0].d1[i] * b[1].d1[j];
                        let ddn = [
                            [b[0].d2[i] * b[1].values[j], cross],
                            [cross, b[0].values[i] * b[1].d2[j]],
                        ];
                        w += wa * n;
                        for a in 0..2 {
                            w1[a] += wa * dn[a];
                            for c in 0..2 {
                                w2[a][c] += wa * ddn[a][c];
                            }
                        }
                        out.ctrl.push(ctrl);
                        out.n.push(wa * n);
                        out.dn.push([wa * dn[0], wa * dn[1]]);
                        out.ddn.push([[wa * ddn[0][0], wa * ddn[0][1]], [wa * ddn[1][0], wa * ddn[1][1]]]);
                    }
                }
                // Rational quotient R = wN/W and its derivatives.
                for k in 0..out.ctrl.len() {
                    let r = out.n[k] / w;
                    let r1 = [(out.dn[k][0] - r * w1[0]) / w, (out.dn[k][1] - r * w1[1]) / w];
                    let mut r2 = [[0.0; 2]; 2];
                    for a in 0..2 {
                        for c in 0..2 {
                            r2[a][c] = (out.ddn[k][a][c] - r1[a] * w1[c] - r1[c] * w1[a] - r * w2[a][c]) / w;
                        }
                    }
                    out.n[k] = r;
                    out.dn[k] = r1;
                    out.ddn[k] = r2;
                }
                if self.param_dim == 1 {
                    for k in 0..out.ctrl.len() {
                        out.dn[k][1] = 0.0;
                        out.ddn[k] = [[out.ddn[k][0][0], 0.0], [0.0, 0.0]];
                    }
                }
                Ok(out)
            }
            Repr::Hermite { n_el } => {
                let local = 2.0 * (xi[0] - e0 as f64) - 1.0;
                let h = hermite_basis(local.clamp(-1.0, 1.0))?;
                let mut out = ShapeEval::with_capacity(element, xi, 4);
                // Position functions; d/ds = 2 d/dξ.
                for (slot, node) in [(0usize, e0), (1, e0 + 1)] {
                    out.push(node, h.values[slot], [2.0 * h.d1[slot], 0.0], [[4.0 * h.d2[slot], 0.0], [0.0, 0.0]]);
                }
                // Slope functions: x_{,ξ} = D/2 with D the tied nodal slope.
                for (slot, node) in [(2usize, e0), (3, e0 + 1)] {
                    for (other, c) in hermite_slope_stencil(*n_el, node) {
                        let f = 0.5 * c;
                        out.push(
                            other,
                            f * h.values[slot],
                            [2.0 * f * h.d1[slot], 0.0],
                            [[4.0 * f * h.d2[slot], 0.0], [0.0, 0.0]],
                        );
                    }
                }
                Ok(out)
            }
            Repr::Lagrange { n_el } => {
                let t0 = (xi[0] - e0 as f64).clamp(0.0, 1.0);
                if self.param_dim == 1 {
                    let mut out = ShapeEval::with_capacity(element, xi, 2);
                    out.push(e0, 1.0 - t0, [-1.0, 0.0], [[0.0; 2]; 2]);
                    out.push(e0 + 1, t0, [1.0, 0.0], [[0.0; 2]; 2]);
                    return Ok(out);
                }
                let t1 = (xi[1] - e1 as f64).clamp(0.0, 1.0);
                let row = n_el[0] + 1;
                let corners = [
                    (e0 + row * e1, 1.0 - t0, 1.0 - t1, -1.0, -1.0),
                    (e0 + 1 + row * e1, t0, 1.0 - t1, 1.0, -1.0),
                    (e0 + 1 + row * (e1 + 1), t0, t1, 1.0, 1.0),
                    (e0 + row * (e1 + 1), 1.0 - t0, t1, -1.0, 1.0),
                ];
                let mut out = ShapeEval::with_capacity(element, xi, 4);
                for (node, f0, f1, s0, s1) in corners {
                    out.push(node, f0 * f1, [s0 * f1, f0 * s1], [[0.0, s0 * s1], [s0 * s1, 0.0]]);
                }
                Ok(out)
            }
            Repr::RigidPlane { .. } => {
                let mut out = ShapeEval::with_capacity(element, xi, 3);
                if self.param_dim == 1 {
                    out.push(0, 1.0 - xi[0], [-1.0, 0.0], [[0.0; 2]; 2]);
                    out.push(1, xi[0], [1.0, 0.0], [[0.0; 2]; 2]);
                } else {
                    out.push(0, 1.0 - xi[0] - xi[1], [-1.0, -1.0], [[0.0; 2]; 2]);
                    out.push(1, xi[0], [1.0, 0.0], [[0.0; 2]; 2]);
                    out.push(2, xi[1], [0.0, 1.0], [[0.0; 2]; 2]);
                }
                Ok(out)
            }
        }
    }

    /// Position of the surface point `xi` for the given control positions.
    pub fn evaluate(&self, xi: [f64; 2], controls: &[Vector3<f64>]) -> Result<Vector3<f64>> {
        Ok(self.shape_at(xi)?.point(controls))
    }

    /// Greville abscissae per direction (NURBS only).
    pub fn greville(&self) -> Option<[Vec<f64>; 2]> {
        match &self.repr {
            Repr::Nurbs {
                degrees, knots, n_ctrl, ..
            } => {
                let mut g: [Vec<f64>; 2] = [vec![], vec![]];
                for k in 0..self.param_dim {
                    let p = degrees[k];
                    g[k] = (0..n_ctrl[k])
                        .map(|i| knots[k][i + 1..=i + p].iter().sum::<f64>() / p as f64)
                        .collect();
                }
                Some(g)
            }
            _ => None,
        }
    }

    /// A parameter associated with each control point (Greville abscissae
    /// for NURBS, node parameters for chains and grids); `None` for rigid
    /// planes.
    pub fn control_parameters(&self) -> Option<Vec<[f64; 2]>> {
        match &self.repr {
            Repr::Nurbs { n_ctrl, .. } => {
                let g = self.greville()?;
                let n1 = if self.param_dim == 2 { n_ctrl[1] } else { 1 };
                let mut out = Vec::with_capacity(n_ctrl[0] * n1);
                for j in 0..n1 {
                    for i in 0..n_ctrl[0] {
                        out.push([g[0][i], if self.param_dim == 2 { g[1][j] } else { 0.0 }]);
                    }
                }
                Some(out)
            }
            Repr::Hermite { .. } | Repr::Lagrange { .. } => {
                let n = self.n_ctrl_per_dir();
                let mut out = Vec::with_capacity(n[0] * n[1]);
                for j in 0..n[1] {
                    for i in 0..n[0] {
                        out.push([i as f64, j as f64]);
                    }
                }
                Some(out)
            }
            Repr::RigidPlane { .. } => None,
        }
    }

    pub fn n_ctrl_per_dir(&self) -> [usize; 2] {
        match &self.repr {
            Repr::Nurbs { n_ctrl, .. } => *n_ctrl,
            Repr::Hermite { n_el } => [n_el + 1, 1],
            Repr::Lagrange { n_el } => {
                if self.param_dim == 1 {
                    [n_el[0] + 1, 1]
                } else {
                    [n_el[0] + 1, n_el[1] + 1]
                }
            }
            Repr::RigidPlane { .. } => [self.ref_controls.len(), 1],
        }
    }
}

fn unit_basis() -> Basis1d {
    Basis1d {
        values: vec![1.0],
        d1: vec![0.0],
        d2: vec![0.0],
    }
}

/// Coefficients `c_B` of the tied slope `D_A = Σ c_B x_B` at node `a` of a
/// Hermite chain with `n_el` elements: central differences inside, second
/// order one-sided differences at the ends.
pub fn hermite_slope_stencil(n_el: usize, a: usize) -> Vec<(usize, f64)> {
    if n_el == 1 {
        return vec![(0, -1.0), (1, 1.0)];
    }
    if a == 0 {
        vec![(0, -1.5), (1, 2.0), (2, -0.5)]
    } else if a == n_el {
        vec![(n_el, 1.5), (n_el - 1, -2.0), (n_el - 2, 0.5)]
    } else {
        vec![(a - 1, -0.5), (a + 1, 0.5)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn v(x: f64, y: f64, z: f64) -> Vector3<f64> {
        Vector3::new(x, y, z)
    }

    #[test]
    fn bilinear_center_values() {
        let nodes = vec![v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(0.0, 1.0, 0.0), v(1.0, 1.0, 0.0)];
        let p = Patch::lagrange_grid([1, 1], nodes).unwrap();
        let s = p.shape_functions(0, [0.5, 0.5]).unwrap();
        for n in &s.n {
            assert_relative_eq!(*n, 0.25);
        }
        assert!(matches!(p.shape_functions(3, [0.5, 0.5]), Err(Error::ElementOutOfRange { .. })));
    }

    #[test]
    fn hermite_chain_reproduces_straight_line() {
        let nodes: Vec<_> = (0..5).map(|i| v(0.5 * i as f64, 1.0, 0.0)).collect();
        let p = Patch::hermite_chain(nodes.clone()).unwrap();
        for &s in &[0.0, 0.3, 1.0, 2.71, 4.0] {
            let e = p.shape_at([s, 0.0]).unwrap();
            let x = e.point(&nodes);
            assert_relative_eq!(x, v(0.5 * s, 1.0, 0.0), epsilon = 1e-14);
            assert_relative_eq!(e.tangent(&nodes, 0), v(0.5, 0.0, 0.0), epsilon = 1e-14);
        }
    }

    #[test]
    fn hermite_chain_is_c1_across_nodes() {
        let nodes: Vec<_> = (0..6)
            .map(|i| {
                let t = i as f64 * 0.4;
                v(t.cos(), t.sin(), 0.0)
            })
            .collect();
        let p = Patch::hermite_chain(nodes.clone()).unwrap();
        for node in 1..5 {
            let left = p.shape_functions(node - 1, [node as f64, 0.0]).unwrap();
            let right = p.shape_functions(node, [node as f64, 0.0]).unwrap();
            assert_relative_eq!(left.point(&nodes), right.point(&nodes), epsilon = 1e-14);
            assert_relative_eq!(left.tangent(&nodes, 0), right.tangent(&nodes, 0), epsilon = 1e-14);
        }
    }

    #[test]
    fn rigid_plane_rejects_degenerate_vectors() {
        let o = v(0.0, 0.0, 0.0);
        assert!(Patch::rigid_plane(o, v(1.0, 0.0, 0.0), v(2.0, 0.0, 0.0), [[0.0, 1.0], [0.0, 1.0]]).is_err());
        assert!(Patch::rigid_line(o, v(0.0, 0.0, 0.0), [0.0, 1.0]).is_err());
    }

    #[test]
    fn nurbs_rejects_bad_weights_and_counts() {
        let knots = vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let ctrl = vec![v(0.0, 0.0, 0.0), v(1.0, 0.0, 0.0), v(2.0, 0.0, 0.0)];
        assert!(Patch::nurbs_curve(2, knots.clone(), ctrl.clone(), vec![1.0, 0.0, 1.0]).is_err());
        assert!(Patch::nurbs_curve(2, knots, ctrl[..2].to_vec(), vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn locate_finds_owning_span() {
        let knots = vec![0.0, 0.0, 0.0, 1.0, 2.0, 3.0, 3.0, 3.0];
        let ctrl: Vec<_> = (0..5).map(|i| v(i as f64, 0.0, 0.0)).collect();
        let p = Patch::nurbs_curve(2, knots, ctrl, vec![1.0; 5]).unwrap();
        assert_eq!(p.n_elements(), 3);
        assert_eq!(p.locate([0.5, 0.0]), 0);
        assert_eq!(p.locate([1.5, 0.0]), 1);
        assert_eq!(p.locate([3.0, 0.0]), 2);
        assert_eq!(p.locate([7.0, 0.0]), 2);
    }
}
