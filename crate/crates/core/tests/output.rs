use std::collections::HashMap;
use std::path::PathBuf;

use fricfem::io::{csv_row, load_scene, write_metadata, write_vtk, CsvWriter, RunMetadata, CSV_HEADER};
use fricfem::{Solver, StepReport};

fn scene(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenes").join(name)
}

#[test]
fn csv_header_is_stable() {
    assert_eq!(CSV_HEADER, "step,time,P_x,P_y,P_z,M_z,iterations,dissipation");
}

#[test]
fn empty_run_gives_header_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    drop(CsvWriter::create(&path).unwrap());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), format!("{CSV_HEADER}\n"));
}

#[test]
fn csv_rows_round_trip() {
    let r = StepReport {
        step: 7,
        time: 1.25,
        reaction: [0.5, -2.0, 0.0],
        torque_z: 1e-3,
        iterations: 4,
        cumulative_dissipation: 0.125,
        ..Default::default()
    };
    let row = csv_row(&r);
    let fields: Vec<f64> = row.split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(fields, vec![7.0, 1.25, 0.5, -2.0, 0.0, 1e-3, 4.0, 0.125]);
    assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
}

#[test]
fn unwritable_path_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("x.csv");
    assert!(CsvWriter::create(&path).is_err());
}

/// A legacy VTK reader written against the file-format description.
struct Vtk {
    points: Vec<[f64; 3]>,
    cells: Vec<Vec<usize>>,
    types: Vec<u8>,
    vectors: HashMap<String, Vec<[f64; 3]>>,
    scalars: HashMap<String, Vec<f64>>,
}

struct Tokens<'a> {
    items: Vec<&'a str>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn next(&mut self) -> &'a str {
        self.pos += 1;
        self.items.get(self.pos - 1).expect("truncated file")
    }

    fn num<T: std::str::FromStr>(&mut self) -> T
    where
        T::Err: std::fmt::Debug,
    {
        self.next().parse().unwrap()
    }

    fn vec3(&mut self) -> [f64; 3] {
        [self.num(), self.num(), self.num()]
    }

    fn done(&self) -> bool {
        self.pos >= self.items.len()
    }
}

fn read_vtk(text: &str) -> Vtk {
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# vtk DataFile Version"));
    lines.next().unwrap();
    assert_eq!(lines.next().unwrap().trim(), "ASCII");
    let mut t = Tokens {
        items: lines.flat_map(|l| l.split_whitespace()).collect(),
        pos: 0,
    };
    assert_eq!(t.next(), "DATASET");
    assert_eq!(t.next(), "UNSTRUCTURED_GRID");
    let mut vtk = Vtk {
        points: vec![],
        cells: vec![],
        types: vec![],
        vectors: HashMap::new(),
        scalars: HashMap::new(),
    };
    let mut n_points = 0;
    while !t.done() {
        match t.next() {
            "POINTS" => {
                n_points = t.num();
                t.next();
                vtk.points = (0..n_points).map(|_| t.vec3()).collect();
            }
            "CELLS" => {
                let n: usize = t.num();
                let size: usize = t.num();
                let mut read = 0;
                for _ in 0..n {
                    let k: usize = t.num();
                    vtk.cells.push((0..k).map(|_| t.num()).collect());
                    read += k + 1;
                }
                assert_eq!(read, size);
            }
            "CELL_TYPES" => {
                let n: usize = t.num();
                vtk.types = (0..n).map(|_| t.num()).collect();
            }
            "POINT_DATA" => assert_eq!(t.num::<usize>(), n_points),
            "VECTORS" => {
                let name = t.next().to_string();
                t.next();
                let v = (0..n_points).map(|_| t.vec3()).collect();
                vtk.vectors.insert(name, v);
            }
            "SCALARS" => {
                let name = t.next().to_string();
                t.next();
                t.next();
                assert_eq!(t.next(), "LOOKUP_TABLE");
                t.next();
                let v = (0..n_points).map(|_| t.num()).collect();
                vtk.scalars.insert(name, v);
            }
            other => panic!("unexpected token {other}"),
        }
    }
    vtk
}

#[test]
fn vtk_snapshot_round_trips() {
    let overrides = vec!["schedule.phases.0.targets.0.value=-0.05".to_string()];
    let (mut state, loaded) = load_scene(&scene("minimal.json"), &overrides).unwrap();
    let solver = Solver::new(loaded.file.solver).unwrap();
    let reports = solver.run(&mut state, &mut |_, _| {}).unwrap();
    assert!(reports.last().unwrap().reaction[1] < 0.0);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("minimal.vtk");
    write_vtk(&path, &state.model, &state.u, "minimal").unwrap();
    let vtk = read_vtk(&std::fs::read_to_string(&path).unwrap());

    assert_eq!(vtk.points.len(), state.model.nodes.len());
    assert_eq!(vtk.cells.len(), 4);
    assert!(vtk.types.iter().all(|&t| t == 9));
    for (p, x) in vtk.points.iter().zip(&state.model.nodes) {
        assert_eq!(p, &[x.x, x.y, x.z]);
    }
    let disp = &vtk.vectors["displacement"];
    for (n, d) in disp.iter().enumerate() {
        assert_eq!(d[0], state.u[2 * n]);
        assert_eq!(d[1], state.u[2 * n + 1]);
        assert_eq!(d[2], 0.0);
    }
    let i1 = &vtk.scalars["I1"];
    assert!(i1.iter().all(|v| v.is_finite()));
    // Compression of the plate gives a negative first stress invariant.
    assert!(i1.iter().sum::<f64>() < 0.0);
}

#[test]
fn hexahedral_snapshots_use_cell_type_12() {
    let (state, _) = load_scene(&scene("twist3d.json"), &[]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.vtk");
    write_vtk(&path, &state.model, &state.u, "twist").unwrap();
    let vtk = read_vtk(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(vtk.cells.len(), state.model.n_elements());
    assert!(vtk.types.iter().all(|&t| t == 12));
    assert!(vtk.cells.iter().all(|c| c.len() == 8));
    assert!(vtk.scalars["I1"].iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn metadata_is_valid_json() {
    let (_, loaded) = load_scene(&scene("block2d.json"), &[]).unwrap();
    let meta = RunMetadata {
        scene: loaded.file.name.clone(),
        scene_hash: loaded.hash.clone(),
        version: "0.1.0".into(),
        solver: loaded.file.solver,
        threads: 1,
        pass: "Full".into(),
        steps_completed: 0,
        status: "completed".into(),
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    write_metadata(&path, &meta).unwrap();
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["scene_hash"], loaded.hash);
    assert_eq!(v["solver"]["max_iterations"], 25);
}
