use criterion::{black_box, criterion_group, criterion_main, Criterion};
use fricfem::bulk::{bulk_element_forces, ElementKind, Material};
use fricfem::geometry::{bernstein_eval, bezier_extraction, surface_frame, Patch};
use fricfem::kinematics::{closest_point_projection, sliding_point};
use nalgebra::Vector3;

fn open_uniform(degree: usize, spans: usize) -> Vec<f64> {
    let mut k = vec![0.0; degree];
    k.extend((0..=spans).map(|i| i as f64));
    k.extend(vec![spans as f64; degree]);
    k
}

fn wavy_curve() -> (Patch, Vec<Vector3<f64>>) {
    let n = 12;
    let ctrl: Vec<Vector3<f64>> = (0..n).map(|i| Vector3::new(i as f64, 0.2 * (i as f64).sin(), 0.0)).collect();
    let patch = Patch::nurbs_curve(3, open_uniform(3, n - 3), ctrl.clone(), vec![1.0; n]).unwrap();
    (patch, ctrl)
}

fn geometry(c: &mut Criterion) {
    let knots = open_uniform(3, 64);
    c.bench_function("bezier_extraction_cubic_64", |b| b.iter(|| bezier_extraction(black_box(&knots), 3).unwrap()));
    c.bench_function("bernstein_eval_cubic", |b| b.iter(|| bernstein_eval(3, black_box(0.37)).unwrap()));
}

fn kinematics(c: &mut Criterion) {
    let (patch, ctrl) = wavy_curve();
    let x_k = Vector3::new(4.3, 0.05, 0.0);
    c.bench_function("closest_point_projection_curve", |b| {
        b.iter(|| closest_point_projection(black_box(&x_k), &patch, &ctrl, Some([4.0, 0.0])).unwrap())
    });
    let frame = surface_frame(&patch, patch.locate([4.0, 0.0]), [4.0, 0.0], &ctrl).unwrap();
    let g_prev = x_k - frame.x + frame.a[0].normalize() * 0.2;
    c.bench_function("sliding_point_curve", |b| {
        b.iter(|| sliding_point(black_box(&x_k), &patch, &ctrl, &g_prev, 0.3, [4.0, 0.0], None, 1e-10).unwrap())
    });
}

fn bulk(c: &mut Criterion) {
    let mat = Material::new(1.0, 0.3).unwrap();
    let quad: Vec<Vector3<f64>> = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
        .iter()
        .map(|p| Vector3::new(p[0], p[1], 0.0))
        .collect();
    let quad_u: Vec<Vector3<f64>> = quad.iter().map(|x| Vector3::new(0.05 * x.y, -0.02 * x.x, 0.0)).collect();
    c.bench_function("bulk_quad4", |b| {
        b.iter(|| bulk_element_forces(ElementKind::for_dim(2), 0, black_box(&quad), &quad_u, &mat).unwrap())
    });
    let hex: Vec<Vector3<f64>> = (0..8)
        .map(|i| {
            let (x, y) = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)][i % 4];
            Vector3::new(x, y, (i / 4) as f64)
        })
        .collect();
    let hex_u: Vec<Vector3<f64>> = hex.iter().map(|x| Vector3::new(0.03 * x.z, 0.01 * x.x, -0.02 * x.y)).collect();
    c.bench_function("bulk_hex8", |b| {
        b.iter(|| bulk_element_forces(ElementKind::for_dim(3), 0, black_box(&hex), &hex_u, &mat).unwrap())
    });
}

criterion_group!(benches, geometry, kinematics, bulk);
criterion_main!(benches);
