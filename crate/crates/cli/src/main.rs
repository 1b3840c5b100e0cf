use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fricfem::io::{load_scene, write_metadata, write_vtk, CsvWriter, RunMetadata};
use fricfem::{Error, PassMode, Solver};

/// Quasi-static frictional contact simulations from JSON scene files.
#[derive(Parser, Debug)]
#[command(name = "fricfem", version)]
struct Args {
    /// Scene file (JSON).
    #[arg(long)]
    scene: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "./out")]
    out: PathBuf,
    /// Contact pass mode: full or twohalf.
    #[arg(long)]
    pass: Option<PassMode>,
    /// Load steps per phase, replacing the scene's values.
    #[arg(long)]
    steps: Option<usize>,
    /// Dotted-path scene override `key=value`; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Write a VTK snapshot every this many steps.
    #[arg(long)]
    snapshots: Option<usize>,
    #[arg(long)]
    quiet: bool,
}

enum Failure {
    Input(Error),
    Solve(Error),
}

fn main() -> ExitCode {
    let args = Args::parse();
    let level = if args.quiet { "warn" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            log::error!("{e}");
            ExitCode::from(1)
        }
        Err(Failure::Solve(e)) => {
            log::error!("{e}");
            ExitCode::from(2)
        }
    }
}

fn run(args: &Args) -> Result<(), Failure> {
    let mut overrides = args.overrides.clone();
    if let Some(p) = args.pass {
        let name = match p {
            PassMode::Full => "full",
            PassMode::TwoHalf => "twohalf",
        };
        overrides.push(format!("contact.pass={name}"));
    }
    if let Some(k) = args.snapshots {
        overrides.push(format!("output.snapshot_every={k}"));
    }
    let (mut state, loaded) = load_scene(&args.scene, &overrides).map_err(Failure::Input)?;
    if let Some(n) = args.steps {
        if n == 0 {
            return Err(Failure::Input(Error::Scene("--steps must be positive".into())));
        }
        state.model.schedule.set_steps(n);
    }
    std::fs::create_dir_all(&args.out).map_err(|e| Failure::Input(e.into()))?;
    let name = &loaded.file.name;
    let solver = Solver::new(loaded.file.solver).map_err(Failure::Input)?;
    let every = loaded.file.output.snapshot_every;
    log::info!(
        "scene `{name}`: {} nodes, {} elements, {} threads",
        state.model.nodes.len(),
        state.model.n_elements(),
        solver.threads()
    );

    let mut csv = CsvWriter::create(&args.out.join(format!("{name}.csv"))).map_err(Failure::Input)?;
    let snapshot = |state: &fricfem::SceneState| -> fricfem::Result<()> {
        let path = args.out.join(format!("{name}_{:04}.vtk", state.step));
        write_vtk(&path, &state.model, &state.u, &format!("{name} step {}", state.step))
    };
    if every > 0 {
        snapshot(&state).map_err(Failure::Input)?;
    }
    let mut io_error = None;
    let result = solver.run(&mut state, &mut |s, rep| {
        log::info!(
            "step {:>4}  t = {:.4}  P = ({:+.5e}, {:+.5e}, {:+.5e})  its = {}  active = {}  slip = {}",
            rep.step,
            rep.time,
            rep.reaction[0],
            rep.reaction[1],
            rep.reaction[2],
            rep.iterations,
            rep.active_points,
            rep.slip_points
        );
        log::debug!("residual history {:?}", rep.residual_history);
        let mut w = csv.write(rep);
        if w.is_ok() && every > 0 && s.step % every == 0 {
            w = snapshot(s);
        }
        if let Err(e) = w {
            io_error.get_or_insert(e);
        }
    });
    let status = match &result {
        Ok(_) => "completed".to_string(),
        Err(e) => format!("failed: {e}"),
    };
    let meta = RunMetadata {
        scene: name.clone(),
        scene_hash: loaded.hash.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        solver: solver.settings,
        threads: solver.threads(),
        pass: format!("{:?}", state.model.contact.pass),
        steps_completed: state.step,
        status,
    };
    write_metadata(&args.out.join(format!("{name}.meta.json")), &meta).map_err(Failure::Input)?;
    if let Some(e) = io_error {
        return Err(Failure::Input(e));
    }
    result.map(|_| ()).map_err(Failure::Solve)
}
