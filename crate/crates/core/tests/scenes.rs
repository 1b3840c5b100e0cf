use std::path::PathBuf;

use fricfem::io::{load_scene, parse_scene, read_scene};
use fricfem::{Error, Solver};

fn scene(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenes").join(name)
}

fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn element_counts(name: &str, overrides: &[&str]) -> Vec<usize> {
    let (state, _) = load_scene(&scene(name), &strings(overrides)).unwrap();
    state.model.bodies.iter().map(|b| b.elements.len()).collect()
}

#[test]
fn block_scene_has_304_elements() {
    assert_eq!(element_counts("block2d.json", &[]), vec![304]);
}

#[test]
fn ironing_element_counts_follow_mesh_parameters() {
    let counts = element_counts(
        "ironing.json",
        &["bodies.0.generator.m=8", "bodies.1.generator.nx=60", "bodies.1.generator.ny=12"],
    );
    assert_eq!(counts, vec![42, 720]);
    assert_eq!(element_counts("ironing.json", &[]), vec![168, 1280]);
}

#[test]
fn half_cylinder_scene_loads_both_bodies() {
    assert_eq!(element_counts("halfcyl.json", &[]), vec![168, 168]);
}

#[test]
fn every_shipped_scene_loads() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenes");
    let mut n = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) == Some("json") {
            let (state, loaded) = load_scene(&path, &[]).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            assert!(state.model.n_elements() > 0);
            assert_eq!(loaded.hash.len(), 64);
            n += 1;
        }
    }
    assert!(n >= 5);
}

#[test]
fn loading_is_deterministic() {
    let (a, la) = load_scene(&scene("twist3d.json"), &[]).unwrap();
    let (b, lb) = load_scene(&scene("twist3d.json"), &[]).unwrap();
    assert_eq!(la.hash, lb.hash);
    assert_eq!(a.model.nodes, b.model.nodes);
    for (x, y) in a.model.bodies.iter().zip(&b.model.bodies) {
        assert_eq!(x.elements, y.elements);
    }
    assert_eq!(a.histories, b.histories);
    let (_, lc) = load_scene(&scene("twist3d.json"), &strings(&["contact.mu=0.3"])).unwrap();
    assert_ne!(la.hash, lc.hash);
}

#[test]
fn minimal_scene_runs_with_zero_reactions() {
    let (mut state, loaded) = load_scene(&scene("minimal.json"), &[]).unwrap();
    let solver = Solver::new(loaded.file.solver).unwrap();
    let reports = solver.run(&mut state, &mut |_, _| {}).unwrap();
    assert_eq!(reports.len(), 2);
    for r in &reports {
        assert!(r.reaction.iter().all(|v| v.abs() < 1e-14));
        assert_eq!(r.torque_z, 0.0);
        assert_eq!(r.active_points, 0);
    }
    assert!(state.u.iter().all(|v| v.abs() < 1e-14));
}

#[test]
fn unknown_fields_are_reported_with_their_path() {
    let err = read_scene(&scene("block2d.json"), &strings(&["contact.penalty=3"])).unwrap_err();
    let msg = err.to_string();
    assert!(matches!(err, Error::Scene(_)));
    assert!(msg.contains("contact"), "{msg}");
    assert!(msg.contains("penalty"), "{msg}");
}

#[test]
fn malformed_json_reports_the_line() {
    let err = parse_scene("{\n  \"name\": \"x\",\n  oops\n}", &[]).unwrap_err();
    assert!(err.to_string().contains("line 3"), "{err}");
}

#[test]
fn invalid_values_are_rejected() {
    for o in [
        "bodies.0.material.E=-1",
        "bodies.0.material.nu=0.5",
        "contact.mu=-0.1",
        "contact.pairs.0.master=nowhere",
        "surfaces.0.boundary=left",
        "schedule.phases.0.steps=0",
        "dim=4",
    ] {
        assert!(load_scene(&scene("block2d.json"), &strings(&[o])).is_err(), "{o} accepted");
    }
}

#[test]
fn overrides_need_existing_paths() {
    assert!(read_scene(&scene("block2d.json"), &strings(&["contact.pairs.3.slave=x"])).is_err());
    assert!(read_scene(&scene("block2d.json"), &strings(&["nonsense"])).is_err());
    assert!(read_scene(&scene("block2d.json"), &strings(&["name.inner=1"])).is_err());
    let loaded = read_scene(&scene("block2d.json"), &strings(&["contact.mu=0.45", "name=renamed"])).unwrap();
    assert_eq!(loaded.file.name, "renamed");
    assert_eq!(loaded.file.contact.unwrap().mu, 0.45);
}

#[test]
fn missing_file_is_an_io_error() {
    assert!(matches!(load_scene(&scene("absent.json"), &[]), Err(Error::Io(_))));
}
