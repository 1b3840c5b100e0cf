use std::path::PathBuf;

use fricfem::bulk::{cauchy_stress, neo_hookean_energy, Material};
use fricfem::contact::{contact_traction, PenaltyLaw};
use fricfem::geometry::{surface_frame, Patch};
use fricfem::io::read_scene;
use fricfem::kinematics::sliding_point;
use fricfem::rheology1d::{free_energy_1d, step_1d, Slider1D};
use nalgebra::{Matrix3, Rotation3, Vector2, Vector3};
use proptest::prelude::*;

fn rotation(angles: (f64, f64, f64)) -> Matrix3<f64> {
    Rotation3::from_euler_angles(angles.0, angles.1, angles.2).into_inner()
}

fn deformation(entries: [f64; 9]) -> Matrix3<f64> {
    Matrix3::identity() + Matrix3::from_row_slice(&entries) * 0.3
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn slider_never_exceeds_the_friction_bound(
        eps in 1.0..1000.0f64,
        mu in 0.0..1.0f64,
        moves in prop::collection::vec((-0.05..0.05f64, -0.05..0.05f64, 0.0..2.0f64), 1..20),
    ) {
        let mut s = Slider1D::at_rest(eps, mu, 1.0, Vector2::zeros());
        for (dx, dy, p) in moves {
            let before = s;
            let step = step_1d(&s, s.x_k() + Vector2::new(dx, dy), p).unwrap();
            s = step.slider;
            prop_assert!(step.dissipation >= -1e-14);
            prop_assert!(s.spring_force().norm() <= mu * p * (1.0 + 1e-12) + 1e-14);
            prop_assert!((s.x_k() - before.x_k() - Vector2::new(dx, dy)).norm() < 1e-12);
            if step.omega == 0 {
                prop_assert_eq!(step.delta_g_s, Vector2::zeros());
                prop_assert_eq!(s.anchor(), before.anchor());
            } else {
                prop_assert!((s.anchor() - before.anchor() - step.delta_g_s).norm() < 1e-12);
            }
            prop_assert!(free_energy_1d(&s) >= 0.0);
        }
    }

    #[test]
    fn neo_hookean_energy_is_frame_indifferent(
        entries in prop::array::uniform9(-1.0..1.0f64),
        angles in (-3.0..3.0f64, -1.5..1.5f64, -3.0..3.0f64),
    ) {
        let f = deformation(entries);
        prop_assume!(f.determinant() > 0.2);
        let mat = Material::new(1.0, 0.3).unwrap();
        let w = neo_hookean_energy(&f, &mat).unwrap();
        let q = rotation(angles);
        let wq = neo_hookean_energy(&(q * f), &mat).unwrap();
        prop_assert!((w - wq).abs() <= 1e-12 * (1.0 + w.abs()));
        prop_assert!(w >= -1e-14);
        let sigma = cauchy_stress(&f, &mat).unwrap();
        prop_assert!((sigma - sigma.transpose()).norm() <= 1e-12 * (1.0 + sigma.norm()));
        let sigma_q = cauchy_stress(&(q * f), &mat).unwrap();
        prop_assert!((sigma_q - q * sigma * q.transpose()).norm() <= 1e-10 * (1.0 + sigma.norm()));
    }

    #[test]
    fn penalty_traction_is_the_energy_gradient(
        g in prop::array::uniform3(-0.1..0.1f64),
        eps_n in 10.0..1000.0f64,
        eps_tau in 10.0..1000.0f64,
        x0 in 0.2..3.8f64,
    ) {
        let ctrl: Vec<Vector3<f64>> = (0..5).map(|i| Vector3::new(i as f64, 0.1 * (i as f64).powi(2), 0.3 * i as f64)).collect();
        let patch = Patch::lagrange_grid([4, 1], ctrl.iter().chain(ctrl.iter().map(|c| c + Vector3::new(0.0, 0.2, -1.0)).collect::<Vec<_>>().iter()).copied().collect()).unwrap();
        let controls = patch.ref_controls().to_vec();
        let xi = [x0, 0.5];
        let frame = surface_frame(&patch, patch.locate(xi), xi, &controls).unwrap();
        let law = PenaltyLaw { eps_n, eps_tau };
        let g = Vector3::from(g);
        let t = contact_traction(&g, &frame, &law, true);
        prop_assert!(law.energy(&g, &frame) >= 0.0);
        let h = 1e-6;
        for k in 0..3 {
            let mut e = Vector3::zeros();
            e[k] = h;
            let fd = (law.energy(&(g + e), &frame) - law.energy(&(g - e), &frame)) / (2.0 * h);
            prop_assert!((fd - t[k]).abs() <= 1e-6 * (1.0 + t.norm()));
        }
        prop_assert_eq!(contact_traction(&g, &frame, &law, false), Vector3::zeros());
    }

    #[test]
    fn sliding_point_lies_on_the_friction_cone(
        s in 1.0..4.0f64,
        offset in 0.02..0.2f64,
        drift in 0.05..0.5f64,
        mu in 0.05..0.8f64,
        bump in prop::array::uniform5(-0.3..0.3f64),
    ) {
        let ctrl: Vec<Vector3<f64>> = (0..7)
            .map(|i| Vector3::new(i as f64 * 5.0 / 6.0, if (1..6).contains(&i) { bump[i - 1] } else { 0.0 }, 0.0))
            .collect();
        let knots = vec![0.0, 0.0, 0.0, 0.0, 1.25, 2.5, 3.75, 5.0, 5.0, 5.0, 5.0];
        let patch = Patch::nurbs_curve(3, knots, ctrl.clone(), vec![1.0; 7]).unwrap();
        let frame = surface_frame(&patch, patch.locate([s, 0.0]), [s, 0.0], &ctrl).unwrap();
        let x_k = frame.x + frame.n * offset + frame.a[0].normalize() * drift;
        // The previous interacting point sits at the surface point below x_k.
        let g_prev = x_k - frame.x + frame.a[0].normalize() * drift;
        let r = sliding_point(&x_k, &patch, &ctrl, &g_prev, mu, [s, 0.0], None, 1e-10);
        prop_assume!(r.is_ok());
        let sp = r.unwrap();
        prop_assume!(!sp.on_boundary);
        let tau = sp.tau.unwrap();
        let g_tau = sp.frame.tangential_part(&sp.g);
        prop_assert!((g_tau - tau * (mu * sp.g_n.abs())).norm() <= 1e-10);
        prop_assert!(sp.iterations <= 20);
        prop_assert!(sp.residual <= 1e-10);
    }

    #[test]
    fn hermite_chains_interpolate_their_nodes(ys in prop::collection::vec(-0.5..0.5f64, 3..9)) {
        let nodes: Vec<Vector3<f64>> = ys.iter().enumerate().map(|(i, &y)| Vector3::new(i as f64, y, 0.0)).collect();
        let patch = Patch::hermite_chain(nodes.clone()).unwrap();
        for (i, x) in nodes.iter().enumerate() {
            let p = patch.evaluate([i as f64, 0.0], &nodes).unwrap();
            prop_assert!((p - x).norm() < 1e-13);
        }
    }

    #[test]
    fn overrides_reach_the_parsed_scene(mu in 0.0..2.0f64, steps in 1usize..100) {
        let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenes/block2d.json");
        let loaded = read_scene(&path, &[format!("contact.mu={mu}"), format!("schedule.phases.1.steps={steps}")]).unwrap();
        prop_assert_eq!(loaded.file.contact.unwrap().mu, mu);
        prop_assert_eq!(loaded.file.schedule.phases[1].steps, steps);
    }
}
