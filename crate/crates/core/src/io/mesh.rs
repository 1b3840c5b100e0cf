//! Structured mesh generators for the benchmark bodies.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// Ordered surface nodes of a body: a chain (2D) or a node grid (3D) with
/// node `i + n[0]·j`.
#[derive(Clone, Debug, PartialEq)]
pub enum Boundary {
    Chain(Vec<usize>),
    Grid { n: [usize; 2], nodes: Vec<usize> },
}

impl Boundary {
    pub fn nodes(&self) -> &[usize] {
        match self {
            Self::Chain(v) => v,
            Self::Grid { nodes, .. } => nodes,
        }
    }

    fn offset(&mut self, by: usize) {
        match self {
            Self::Chain(v) => v.iter_mut().for_each(|n| *n += by),
            Self::Grid { nodes, .. } => nodes.iter_mut().for_each(|n| *n += by),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct BodyMesh {
    pub dim: usize,
    pub nodes: Vec<Vector3<f64>>,
    pub elements: Vec<Vec<usize>>,
    pub sets: BTreeMap<String, Vec<usize>>,
    pub boundaries: BTreeMap<String, Boundary>,
}

impl BodyMesh {
    pub fn centroid(&self) -> Vector3<f64> {
        self.nodes.iter().sum::<Vector3<f64>>() / self.nodes.len().max(1) as f64
    }

    /// Shifts all node ids by `by`, for concatenation into a global mesh.
    pub fn offset_ids(&mut self, by: usize) {
        self.elements.iter_mut().flatten().for_each(|n| *n += by);
        self.sets.values_mut().flatten().for_each(|n| *n += by);
        self.boundaries.values_mut().for_each(|b| b.offset(by));
    }

    pub fn translate(&mut self, v: Vector3<f64>) {
        self.nodes.iter_mut().for_each(|x| *x += v);
    }
}

/// Node insertion with merging of coincident positions.
struct Builder {
    nodes: Vec<Vector3<f64>>,
    index: HashMap<[i64; 3], usize>,
    elements: Vec<Vec<usize>>,
}

impl Builder {
    fn new() -> Self {
        Self {
            nodes: vec![],
            index: HashMap::new(),
            elements: vec![],
        }
    }

    fn node(&mut self, x: Vector3<f64>) -> usize {
        let key = [
            (x.x * 1e9).round() as i64,
            (x.y * 1e9).round() as i64,
            (x.z * 1e9).round() as i64,
        ];
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        self.nodes.push(x);
        self.index.insert(key, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    /// Transfinite quad block from its four edges (`bottom`/`top` indexed by
    /// `i`, `left`/`right` by `j`). Returns node ids `[j][i]`.
    fn coons_block(
        &mut self,
        bottom: &[Vector3<f64>],
        top: &[Vector3<f64>],
        left: &[Vector3<f64>],
        right: &[Vector3<f64>],
    ) -> Vec<Vec<usize>> {
        let nx = bottom.len() - 1;
        let ny = left.len() - 1;
        let mut ids = vec![vec![0; nx + 1]; ny + 1];
        for j in 0..=ny {
            let t = j as f64 / ny as f64;
            for i in 0..=nx {
                let s = i as f64 / nx as f64;
                let x = if j == 0 {
                    bottom[i]
                } else if j == ny {
                    top[i]
                } else if i == 0 {
                    left[j]
                } else if i == nx {
                    right[j]
                } else {
                    bottom[i] * (1.0 - t) + top[i] * t + left[j] * (1.0 - s) + right[j] * s
                        - (bottom[0] * ((1.0 - s) * (1.0 - t))
                            + bottom[nx] * (s * (1.0 - t))
                            + top[0] * ((1.0 - s) * t)
                            + top[nx] * (s * t))
                };
                ids[j][i] = self.node(x);
            }
        }
        for j in 0..ny {
            for i in 0..nx {
                self.elements
                    .push(vec![ids[j][i], ids[j][i + 1], ids[j + 1][i + 1], ids[j + 1][i]]);
            }
        }
        ids
    }

    fn finish(self, dim: usize) -> BodyMesh {
        BodyMesh {
            dim,
            nodes: self.nodes,
            elements: self.elements,
            ..Default::default()
        }
    }
}

fn line(a: Vector3<f64>, b: Vector3<f64>, n: usize) -> Vec<Vector3<f64>> {
    (0..=n).map(|i| a + (b - a) * (i as f64 / n as f64)).collect()
}

fn arc(center: Vector3<f64>, r: f64, a0: f64, a1: f64, n: usize) -> Vec<Vector3<f64>> {
    (0..=n)
        .map(|i| {
            let a = a0 + (a1 - a0) * i as f64 / n as f64;
            center + Vector3::new(r * a.cos(), r * a.sin(), 0.0)
        })
        .collect()
}

fn join(parts: &[Vec<Vector3<f64>>]) -> Vec<Vector3<f64>> {
    let mut out: Vec<Vector3<f64>> = vec![];
    for p in parts {
        let skip = usize::from(!out.is_empty());
        out.extend(p.iter().skip(skip));
    }
    out
}

fn nodes_where(nodes: &[Vector3<f64>], f: impl Fn(&Vector3<f64>) -> bool) -> Vec<usize> {
    (0..nodes.len()).filter(|&i| f(&nodes[i])).collect()
}

fn need(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Scene(msg.to_string()))
    }
}

/// `width × height` block with its lower corners rounded by `fillet`,
/// meshed by `nx × ny` quads. Sets `top`, `bottom`; boundary `bottom`
/// running left to right over both fillets.
pub fn filleted_block(origin: [f64; 2], width: f64, height: f64, fillet: f64, nx: usize, ny: usize) -> Result<BodyMesh> {
    need(width > 0.0 && height > 0.0, "block dimensions must be positive")?;
    need(fillet > 0.0 && 2.0 * fillet < width && fillet < height, "fillet radius out of range")?;
    let arc_len = fillet * PI / 4.0;
    let n_arc_x = ((nx as f64 * arc_len / (width - 2.0 * fillet + 2.0 * arc_len)).round() as usize).max(1);
    let n_arc_y = ((ny as f64 * arc_len / (height - fillet + arc_len)).round() as usize).max(1);
    need(nx > 2 * n_arc_x && ny > n_arc_y, "block mesh is too coarse for its fillets")?;
    let o = Vector3::new(origin[0], origin[1], 0.0);
    let cl = o + Vector3::new(fillet, fillet, 0.0);
    let cr = o + Vector3::new(width - fillet, fillet, 0.0);
    let bottom = join(&[
        arc(cl, fillet, 1.25 * PI, 1.5 * PI, n_arc_x),
        line(o + Vector3::new(fillet, 0.0, 0.0), o + Vector3::new(width - fillet, 0.0, 0.0), nx - 2 * n_arc_x),
        arc(cr, fillet, 1.5 * PI, 1.75 * PI, n_arc_x),
    ]);
    let left = join(&[
        arc(cl, fillet, 1.25 * PI, PI, n_arc_y),
        line(o + Vector3::new(0.0, fillet, 0.0), o + Vector3::new(0.0, height, 0.0), ny - n_arc_y),
    ]);
    let right = join(&[
        arc(cr, fillet, 1.75 * PI, 2.0 * PI, n_arc_y),
        line(o + Vector3::new(width, fillet, 0.0), o + Vector3::new(width, height, 0.0), ny - n_arc_y),
    ]);
    let top = line(o + Vector3::new(0.0, height, 0.0), o + Vector3::new(width, height, 0.0), nx);
    let mut b = Builder::new();
    let ids = b.coons_block(&bottom, &top, &left, &right);
    let mut chain: Vec<usize> = (1..=n_arc_y).rev().map(|j| ids[j][0]).collect();
    chain.extend(ids[0].iter().copied());
    chain.extend((1..=n_arc_y).map(|j| ids[j][nx]));
    let mut mesh = b.finish(2);
    mesh.sets.insert("top".into(), ids[ny].clone());
    mesh.sets.insert("bottom".into(), chain.clone());
    mesh.boundaries.insert("bottom".into(), Boundary::Chain(chain));
    Ok(mesh)
}

/// Which way the curved side of a half-disk faces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dome {
    Down,
    Up,
}

/// Half-disk of radius `radius` with its flat side through `center`, meshed
/// by an O-grid of `21 m²/32` quads (`m` a multiple of 8). Sets `flat`,
/// `arc`; boundary `arc` ordered by increasing x.
pub fn half_disk(center: [f64; 2], radius: f64, m: usize, dome: Dome) -> Result<BodyMesh> {
    need(radius > 0.0, "radius must be positive")?;
    need(m >= 8 && m % 8 == 0, "half-disk resolution must be a positive multiple of 8")?;
    let k = m / 8;
    let (p, q) = (3 * k, 2 * k);
    let a = 0.5 * radius;
    let bh = 0.5 * radius;
    let z = Vector3::zeros();
    let v = |x: f64, y: f64| Vector3::new(x, y, 0.0);
    let ang = |deg: f64| deg * PI / 180.0;
    let mut b = Builder::new();
    // inner rectangle
    b.coons_block(
        &line(v(-a, -bh), v(a, -bh), 2 * p),
        &line(v(-a, 0.0), v(a, 0.0), 2 * p),
        &line(v(-a, -bh), v(-a, 0.0), p),
        &line(v(a, -bh), v(a, 0.0), p),
    );
    let arc_pt = |deg: f64| z + v(radius * ang(deg).cos(), radius * ang(deg).sin());
    let left = b.coons_block(
        &line(arc_pt(225.0), v(-a, -bh), q),
        &line(v(-radius, 0.0), v(-a, 0.0), q),
        &arc(z, radius, ang(225.0), ang(180.0), p),
        &line(v(-a, -bh), v(-a, 0.0), p),
    );
    let bottom = b.coons_block(
        &arc(z, radius, ang(225.0), ang(315.0), 2 * p),
        &line(v(-a, -bh), v(a, -bh), 2 * p),
        &line(arc_pt(225.0), v(-a, -bh), q),
        &line(arc_pt(315.0), v(a, -bh), q),
    );
    let right = b.coons_block(
        &line(v(a, -bh), arc_pt(315.0), q),
        &line(v(a, 0.0), v(radius, 0.0), q),
        &line(v(a, -bh), v(a, 0.0), p),
        &arc(z, radius, ang(315.0), ang(360.0), p),
    );
    let mut chain: Vec<usize> = (0..=p).rev().map(|j| left[j][0]).collect();
    chain.extend(bottom[0].iter().skip(1).copied());
    chain.extend((1..=p).map(|j| right[j][q]));
    let mut mesh = b.finish(2);
    if dome == Dome::Up {
        for x in &mut mesh.nodes {
            x.y = -x.y;
        }
        for e in &mut mesh.elements {
            e.swap(1, 3);
        }
    }
    mesh.translate(v(center[0], center[1]));
    let flat = nodes_where(&mesh.nodes, |x| (x.y - center[1]).abs() < 1e-9 * radius);
    mesh.sets.insert("flat".into(), flat);
    mesh.sets.insert("arc".into(), chain.clone());
    mesh.boundaries.insert("arc".into(), Boundary::Chain(chain));
    Ok(mesh)
}

/// Rectangle `[x0, x0+width] × [y0, y0+height]` with `nx × ny` quads. Sets
/// and left-to-right boundaries `top`, `bottom`; sets `left`, `right`.
pub fn rectangle(origin: [f64; 2], width: f64, height: f64, nx: usize, ny: usize) -> Result<BodyMesh> {
    need(width > 0.0 && height > 0.0, "rectangle dimensions must be positive")?;
    need(nx > 0 && ny > 0, "rectangle needs at least one element per direction")?;
    let v = |x: f64, y: f64| Vector3::new(origin[0] + x, origin[1] + y, 0.0);
    let mut b = Builder::new();
    let ids = b.coons_block(
        &line(v(0.0, 0.0), v(width, 0.0), nx),
        &line(v(0.0, height), v(width, height), nx),
        &line(v(0.0, 0.0), v(0.0, height), ny),
        &line(v(width, 0.0), v(width, height), ny),
    );
    let mut mesh = b.finish(2);
    mesh.sets.insert("top".into(), ids[ny].clone());
    mesh.sets.insert("bottom".into(), ids[0].clone());
    mesh.sets.insert("left".into(), ids.iter().map(|r| r[0]).collect());
    mesh.sets.insert("right".into(), ids.iter().map(|r| r[nx]).collect());
    mesh.boundaries.insert("top".into(), Boundary::Chain(ids[ny].clone()));
    mesh.boundaries.insert("bottom".into(), Boundary::Chain(ids[0].clone()));
    Ok(mesh)
}

fn hex_grid(n: [usize; 3], pos: impl Fn(usize, usize, usize) -> Vector3<f64>) -> (BodyMesh, impl Fn(usize, usize, usize) -> usize) {
    let id = move |i: usize, j: usize, k: usize| i + (n[0] + 1) * (j + (n[1] + 1) * k);
    let mut nodes = vec![Vector3::zeros(); (n[0] + 1) * (n[1] + 1) * (n[2] + 1)];
    for k in 0..=n[2] {
        for j in 0..=n[1] {
            for i in 0..=n[0] {
                nodes[id(i, j, k)] = pos(i, j, k);
            }
        }
    }
    let mut elements = vec![];
    for k in 0..n[2] {
        for j in 0..n[1] {
            for i in 0..n[0] {
                elements.push(vec![
                    id(i, j, k),
                    id(i + 1, j, k),
                    id(i + 1, j + 1, k),
                    id(i, j + 1, k),
                    id(i, j, k + 1),
                    id(i + 1, j, k + 1),
                    id(i + 1, j + 1, k + 1),
                    id(i, j + 1, k + 1),
                ]);
            }
        }
    }
    (
        BodyMesh {
            dim: 3,
            nodes,
            elements,
            ..Default::default()
        },
        id,
    )
}

fn face(n: [usize; 3], k: usize, id: &impl Fn(usize, usize, usize) -> usize) -> Vec<usize> {
    let mut out = vec![];
    for j in 0..=n[1] {
        for i in 0..=n[0] {
            out.push(id(i, j, k));
        }
    }
    out
}

/// Axis-aligned box with `n[0] × n[1] × n[2]` hexahedra. Sets `top`,
/// `bottom`; boundary grid `top`.
pub fn block3d(origin: [f64; 3], size: [f64; 3], n: [usize; 3]) -> Result<BodyMesh> {
    need(size.iter().all(|&s| s > 0.0), "box dimensions must be positive")?;
    need(n.iter().all(|&k| k > 0), "box needs at least one element per direction")?;
    let (mut mesh, id) = hex_grid(n, |i, j, k| {
        Vector3::new(
            origin[0] + size[0] * i as f64 / n[0] as f64,
            origin[1] + size[1] * j as f64 / n[1] as f64,
            origin[2] + size[2] * k as f64 / n[2] as f64,
        )
    });
    let top = face(n, n[2], &id);
    mesh.sets.insert("top".into(), top.clone());
    mesh.sets.insert("bottom".into(), face(n, 0, &id));
    mesh.boundaries.insert(
        "top".into(),
        Boundary::Grid {
            n: [n[0] + 1, n[1] + 1],
            nodes: top,
        },
    );
    Ok(mesh)
}

/// Hollow spherical cap below `center`: the gnomonic image of one cube face,
/// spanning ±45° around the lowest point, with `n × n` hexahedra per layer.
/// Sets `outer`, `inner`, `rim`; boundary grid `outer`.
pub fn spherical_cap(center: [f64; 3], radius: f64, thickness: f64, n: usize, layers: usize) -> Result<BodyMesh> {
    need(radius > 0.0 && thickness > 0.0 && thickness < radius, "cap thickness must lie in (0, radius)")?;
    need(n > 0 && layers > 0, "cap needs at least one element per direction")?;
    let c = Vector3::from(center);
    let dir = |i: usize, j: usize| {
        let s = (-0.25 * PI + 0.5 * PI * i as f64 / n as f64).tan();
        let t = (-0.25 * PI + 0.5 * PI * j as f64 / n as f64).tan();
        Vector3::new(s, t, -1.0).normalize()
    };
    // k = 0 is the outer surface so that (i, j, k) is right-handed.
    let (mut mesh, id) = hex_grid([n, n, layers], |i, j, k| {
        c + dir(i, j) * (radius - thickness * k as f64 / layers as f64)
    });
    let dims = [n, n, layers];
    let outer = face(dims, 0, &id);
    mesh.sets.insert("outer".into(), outer.clone());
    mesh.sets.insert("inner".into(), face(dims, layers, &id));
    let mut rim = vec![];
    for k in 0..=layers {
        for j in 0..=n {
            for i in 0..=n {
                if i == 0 || j == 0 || i == n || j == n {
                    rim.push(id(i, j, k));
                }
            }
        }
    }
    mesh.sets.insert("rim".into(), rim);
    mesh.boundaries.insert(
        "outer".into(),
        Boundary::Grid {
            n: [n + 1, n + 1],
            nodes: outer,
        },
    );
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bulk::{bulk_element_forces, ElementKind, Material};

    fn all_positive(mesh: &BodyMesh) -> bool {
        let kind = ElementKind::for_dim(mesh.dim);
        let mat = Material::new(1.0, 0.3).unwrap();
        mesh.elements.iter().enumerate().all(|(e, conn)| {
            let x: Vec<_> = conn.iter().map(|&n| mesh.nodes[n]).collect();
            let u = vec![Vector3::zeros(); x.len()];
            bulk_element_forces(kind, e, &x, &u, &mat).is_ok()
        })
    }

    #[test]
    fn block_counts_and_orientation() {
        let m = filleted_block([0.0, 0.0], 1.0, 1.0, 0.1, 16, 19).unwrap();
        assert_eq!(m.elements.len(), 304);
        assert_eq!(m.nodes.len(), 17 * 20);
        assert!(all_positive(&m));
        let chain = m.boundaries["bottom"].nodes();
        assert!((m.nodes[chain[0]] - Vector3::new(0.0, 0.1, 0.0)).norm() < 1e-12);
        assert!((m.nodes[*chain.last().unwrap()] - Vector3::new(1.0, 0.1, 0.0)).norm() < 1e-12);
        assert!(chain.iter().all(|&n| m.nodes[n].y <= 0.1 + 1e-12));
    }

    #[test]
    fn half_disk_counts() {
        for (mm, expect) in [(8, 42), (16, 168)] {
            let m = half_disk([0.0, 0.0], 1.0, mm, Dome::Down).unwrap();
            assert_eq!(m.elements.len(), expect);
            assert!(all_positive(&m));
            let chain = m.boundaries["arc"].nodes();
            assert_eq!(chain.len(), 4 * 3 * mm / 8 + 1);
            for w in chain.windows(2) {
                assert!(m.nodes[w[1]].x > m.nodes[w[0]].x);
            }
            assert!(chain.iter().all(|&n| (m.nodes[n].norm() - 1.0).abs() < 1e-12));
        }
        let up = half_disk([0.0, 0.0], 1.0, 8, Dome::Up).unwrap();
        assert!(all_positive(&up));
        assert!(up.nodes.iter().all(|x| x.y >= -1e-12));
        assert!(half_disk([0.0, 0.0], 1.0, 12, Dome::Up).is_err());
    }

    #[test]
    fn slab_and_boxes() {
        let m = rectangle([-5.0, -2.0], 10.0, 2.0, 60, 12).unwrap();
        assert_eq!(m.elements.len(), 720);
        assert!(all_positive(&m));
        let b = block3d([-0.5, -0.5, -1.0], [1.0; 3], [3, 3, 2]).unwrap();
        assert_eq!(b.elements.len(), 18);
        assert!(all_positive(&b));
        let c = spherical_cap([0.0, 0.0, 1.0], 1.0, 1.0 / 3.0, 4, 2).unwrap();
        assert_eq!(c.elements.len(), 32);
        assert!(all_positive(&c));
        let lowest = c.sets["outer"].iter().map(|&n| c.nodes[n].z).fold(f64::INFINITY, f64::min);
        assert!(lowest.abs() < 1e-12);
    }
}
