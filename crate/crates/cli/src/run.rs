//! Experiment dispatch: compute in a worker pool, then write every artifact
//! from the calling thread.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nhsoc_core::analysis::PointSourceSettings;
use nhsoc_core::{
    evolve, point_source_diagram, predict_nat_radius, protocol_phase_diagram, spin_polarization, speed_sweep,
    ControlPoint, Direction, Error, Model64, Path64, PhaseDiagramSettings, StepControl, Trajectory64,
};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::config::{BandGrid, ConfigError, Experiment, ExperimentConfig, SpeedSpec};
use crate::output::*;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("{}: {0}", .0.name())]
    Numeric(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl RunError {
    /// 2 for configuration problems, 3 for numeric failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numeric(_) => 3,
            RunError::Io(_) => 1,
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    pub step: Option<f64>,
    pub stride: Option<usize>,
    pub speed: Option<f64>,
    pub direction: Option<Direction>,
}

/// Parses, applies overrides and validates a config document.
pub fn load(source: &str, experiment: Option<Experiment>, ov: &Overrides) -> Result<ExperimentConfig, ConfigError> {
    let mut cfg = ExperimentConfig::parse(source, experiment)?;
    if let Some(d) = &ov.out_dir {
        cfg.out_dir = Some(d.clone());
    }
    if let Some(w) = ov.workers {
        cfg.workers = Some(w);
    }
    if let Some(s) = ov.step {
        cfg.numerics.step = s;
    }
    if let Some(s) = ov.stride {
        cfg.numerics.stride = s;
    }
    if let Some(v) = ov.speed {
        cfg.speed = Some(SpeedSpec::Value(v));
    }
    if let Some(d) = ov.direction {
        cfg.direction = d;
    }
    cfg.validate(source)?;
    Ok(cfg)
}

struct Artifacts {
    tables: Vec<Table>,
    json: Vec<(String, serde_json::Value)>,
    notes: Vec<String>,
}

/// Runs one experiment and writes its artifacts plus `manifest.json` into
/// `out_dir`.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunManifest, RunError> {
    let started = Instant::now();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(io::Error::other)?;
    let art = pool.install(|| compute(cfg))?;

    fs::create_dir_all(out_dir)?;
    let mut outputs = Vec::new();
    for t in &art.tables {
        t.write_to(out_dir)?;
        outputs.push(OutputFile { file: t.name.clone(), rows: t.rows.len() });
    }
    for (name, value) in &art.json {
        let text = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
        fs::write(out_dir.join(name), text + "\n")?;
        outputs.push(OutputFile { file: name.clone(), rows: 1 });
    }
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        experiment: cfg.experiment().as_str(),
        config: serde_json::to_value(cfg).map_err(io::Error::other)?,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        outputs,
        notes: art.notes,
    };
    manifest.write_to(out_dir)?;
    Ok(manifest)
}

fn compute(cfg: &ExperimentConfig) -> Result<Artifacts, RunError> {
    let model = cfg.model().map_err(Error::InvalidInput)?;
    let mut art = Artifacts { tables: vec![], json: vec![], notes: vec![] };
    match cfg.experiment() {
        Experiment::Bands => {
            let rows = band_surface_scan(&model, &cfg.bands);
            let mut t = Table::new("bands.csv", BANDS_HEADER);
            let mut eps = 0;
            for r in &rows {
                eps += r.ep as usize;
                t.push(&[r.q, r.g, r.e_plus.0, r.e_plus.1, r.e_minus.0, r.e_minus.1, r.spin_plus, r.spin_minus]);
                let last = t.rows.pop().expect("row just pushed");
                t.push_raw(format!("{last},{}", r.ep as u8));
            }
            if eps > 0 {
                art.notes.push(format!("{eps} grid point(s) on the exceptional point flagged in ep_flag"));
            }
            art.tables.push(t);
        }
        Experiment::Evolve => {
            let protocol = cfg.protocol.expect("validated");
            let speed = cfg.speed_value().expect("validated");
            let path = Path64::standard(&protocol, cfg.direction, speed)?;
            let step = StepControl { dt: cfg.numerics.step, stride: cfg.numerics.stride, renormalize: true };
            let traj = evolve(&model, &path, &cfg.initial.resolve(), &step)?;
            art.tables.push(trajectory_table(&traj));
        }
        Experiment::SpeedSweep => {
            let protocol = cfg.protocol.expect("validated");
            let speeds = cfg.speeds.values();
            let curve =
                speed_sweep(&model, &protocol, cfg.direction, &speeds, &cfg.initial.resolve(), cfg.numerics.step)?;
            let mut t = Table::new("speedsweep.csv", SPEEDSWEEP_HEADER);
            for (v, b) in curve {
                t.push(&[v, b]);
            }
            art.tables.push(t);
        }
        Experiment::PointSource => {
            let ps = &cfg.point_source;
            let speed = cfg.speed_value().expect("validated");
            let initial = cfg.initial.resolve();
            let settings = PointSourceSettings {
                n_rays: ps.n_rays,
                max_arc: ps.max_arc,
                min_samples_per_ray: ps.min_samples_per_ray,
                dt: cfg.numerics.step,
                hysteresis: ps.hysteresis,
            };
            let field = point_source_diagram(&model, ps.origin, &initial, speed, &settings)?;
            let predicted = match predict_nat_radius(&model, ps.origin, initial.b_ratio()?, speed) {
                Ok(p) => p.radius,
                Err(e @ (Error::NoTransition(_) | Error::NoDamping)) => {
                    art.notes.push(format!("no predicted radius: {e}"));
                    f64::NAN
                }
                Err(e) => return Err(e.into()),
            };
            let mut samples = Table::new("pointsource.csv", POINTSOURCE_HEADER);
            let mut front = Table::new("natfront.csv", NATFRONT_HEADER);
            for ray in &field.rays {
                for s in &ray.samples {
                    samples.push(&[ray.angle, s.arc, s.point.q, s.point.g, s.band_index.unwrap_or(f64::NAN)]);
                }
                front.push(&[ray.angle, ray.front.unwrap_or(f64::NAN), predicted]);
            }
            let missing = field.rays.iter().filter(|r| r.front.is_none()).count();
            if missing > 0 {
                art.notes.push(format!("{missing} ray(s) without a sign flip (radius_measured = nan)"));
            }
            art.tables.push(samples);
            art.tables.push(front);
        }
        Experiment::PredictRadius => {
            let origin = cfg.point_source.origin;
            let speed = cfg.speed_value().expect("validated");
            let b0 = cfg.initial.resolve().b_ratio()?;
            let p = predict_nat_radius(&model, origin, b0, speed)?;
            let value = serde_json::to_value(Prediction {
                origin,
                speed,
                b0: [b0.re, b0.im],
                radius: p.radius,
                xi: p.xi,
                n0: [p.n0.re, p.n0.im],
                tau_root: p.tau_root,
                t_occur: p.t_occur,
            })
            .map_err(io::Error::other)?;
            art.json.push(("prediction.json".into(), value));
        }
        Experiment::PhaseDiagram => {
            let ph = &cfg.phase;
            let speed = cfg.speed_value().expect("validated");
            let settings =
                PhaseDiagramSettings { dt: cfg.numerics.step, bisection_tol: ph.bisection_tol, extent: ph.extent };
            let d = protocol_phase_diagram(&model, &ph.xm_values(), &ph.h_values(), speed, cfg.direction, &settings)?;
            let mut grid = Table::new("phasediagram.csv", PHASEDIAGRAM_HEADER);
            for (i, &x) in d.xm_grid.iter().enumerate() {
                for (j, &h) in d.h_grid.iter().enumerate() {
                    grid.push(&[x, h, d.band_index_final[i][j]]);
                }
            }
            let mut boundary = Table::new("boundary.csv", BOUNDARY_HEADER);
            let mut unbracketed = Vec::new();
            for bp in &d.boundary {
                match bp.h_star {
                    Some(h) => boundary.push(&[bp.x_m, h]),
                    None => unbracketed.push(num(bp.x_m)),
                }
            }
            if !unbracketed.is_empty() {
                art.notes.push(format!(
                    "no predicted boundary inside the h grid for x_m = {} (omitted from boundary.csv)",
                    unbracketed.join(", ")
                ));
            }
            art.tables.push(grid);
            art.tables.push(boundary);
        }
    }
    Ok(art)
}

#[derive(Serialize)]
struct Prediction {
    origin: ControlPoint<f64>,
    speed: f64,
    b0: [f64; 2],
    radius: f64,
    xi: f64,
    n0: [f64; 2],
    tau_root: f64,
    t_occur: f64,
}

fn trajectory_table(traj: &Trajectory64) -> Table {
    let mut t = Table::new("trajectory.csv", TRAJECTORY_HEADER);
    let nan = f64::NAN;
    for s in &traj.samples {
        let (cp, cm, ee, b, ep, em) = match &s.bands {
            Some(d) => (d.coeffs.c_plus, d.coeffs.c_minus, d.exp_e, d.band_index, d.e_plus, d.e_minus),
            None => {
                let z = nhsoc_core::C64::new(nan, nan);
                (z, z, z, nan, z, z)
            }
        };
        t.push(&[
            s.t,
            s.point.q,
            s.point.g,
            cp.re,
            cp.im,
            cm.re,
            cm.im,
            ee.re,
            ee.im,
            b,
            s.spin,
            ep.re,
            ep.im,
            em.re,
            em.im,
            s.state.log_norm,
        ]);
    }
    t
}

/// One point of the band-surface scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandRow {
    pub q: f64,
    pub g: f64,
    pub e_plus: (f64, f64),
    pub e_minus: (f64, f64),
    pub spin_plus: f64,
    pub spin_minus: f64,
    /// The point lies on the exceptional point; eigenstates are undefined
    /// and the spins are `nan`.
    pub ep: bool,
}

/// Complex bands and eigenstate spin polarizations over a `(q, g)` grid,
/// `q` outer and `g` inner. Exceptional points are flagged, never fatal.
pub fn band_surface_scan(model: &Model64, grid: &BandGrid) -> Vec<BandRow> {
    let qs = crate::config::linspace(grid.q_min, grid.q_max, grid.nq);
    let gs = crate::config::linspace(grid.g_min, grid.g_max, grid.ng);
    (0..qs.len() * gs.len())
        .into_par_iter()
        .map(|idx| {
            let p = ControlPoint::new(qs[idx / gs.len()], gs[idx % gs.len()]);
            match model.eigensystem(p) {
                Ok(e) => BandRow {
                    q: p.q,
                    g: p.g,
                    e_plus: (e.e_plus.re, e.e_plus.im),
                    e_minus: (e.e_minus.re, e.e_minus.im),
                    spin_plus: spin_polarization(&e.psi_plus).unwrap_or(f64::NAN),
                    spin_minus: spin_polarization(&e.psi_minus).unwrap_or(f64::NAN),
                    ep: false,
                },
                Err(_) => {
                    let de = model.delta_e(p);
                    BandRow {
                        q: p.q,
                        g: p.g,
                        e_plus: (de.re, de.im),
                        e_minus: (-de.re, -de.im),
                        spin_plus: f64::NAN,
                        spin_minus: f64::NAN,
                        ep: true,
                    }
                }
            }
        })
        .collect()
}
