use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use hmaser::analytics::{
    g2_numeric, g2_phonon_analytic, photon_distribution_db, photon_trapping_thetas,
    phonon_number_analytic,
    trapping_roots, wigner_mode, WignerGrid, G2_MIN_OCCUPATION,
};
use hmaser::lindblad::{steady_state, RESIDUAL_TOL};
use hmaser::dynamics::TRUNCATION_WARN;
use hmaser::{Error, MasterEquation, SteadyState};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Axis, Method, Observable, ParamsConfig, SweepConfig};

/// `Θ` window searched for trapping values.
pub const ROOT_WINDOW: (f64, f64) = (1.0, 30.0);
/// Number of photon trapping values reported per point.
pub const PHOTON_ROOTS: usize = 3;
/// Fixed CSV header.
pub const COLUMNS: [&str; 8] =
    ["axis", "value", "observable", "method", "result", "residual", "cav_dim", "mech_dim"];

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub axis: String,
    pub value: f64,
    pub observable: String,
    pub method: Method,
    pub result: f64,
    pub residual: Option<f64>,
    pub cav_dim: usize,
    pub mech_dim: usize,
    /// Set when the value is not trustworthy at the available truncation.
    pub failure: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub rows: Vec<Row>,
    pub wall_time_s: f64,
}

impl SweepResult {
    pub fn unconverged(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.failure.is_some())
    }

    pub fn converged(&self) -> bool {
        self.unconverged().next().is_none()
    }

    pub fn write_csv<W: io::Write>(&self, out: W) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(COLUMNS)?;
        for r in &self.rows {
            w.write_record([
                r.axis.clone(),
                r.value.to_string(),
                r.observable.clone(),
                r.method.to_string(),
                r.result.to_string(),
                r.residual.map(|x| x.to_string()).unwrap_or_default(),
                r.cav_dim.to_string(),
                r.mech_dim.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn metadata(&self) -> String {
        #[derive(Serialize)]
        struct Run<'a> {
            wall_time_s: f64,
            code_version: &'a str,
            rows: usize,
            unconverged: Vec<String>,
        }
        let run = Run {
            wall_time_s: self.wall_time_s,
            code_version: env!("CARGO_PKG_VERSION"),
            rows: self.rows.len(),
            unconverged: self
                .unconverged()
                .map(|r| {
                    format!(
                        "{}={} {} {}: {}",
                        r.axis,
                        r.value,
                        r.observable,
                        r.method,
                        r.failure.as_deref().unwrap_or_default()
                    )
                })
                .collect(),
        };
        let mut text = self.config.to_toml();
        let mut run_table = toml::Table::new();
        run_table.insert(
            crate::config::RUN_TABLE.into(),
            toml::Value::try_from(run).expect("run record is representable"),
        );
        let _ = writeln!(text);
        text.push_str(&toml::to_string(&run_table).expect("run record is representable"));
        text
    }

    /// Writes the CSV to `path` and the metadata to the sidecar next to it.
    pub fn save(&self, path: &Path) -> anyhow::Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)
                .with_context(|| format!("cannot create {}", dir.display()))?;
        }
        let file = std::fs::File::create(path)
            .with_context(|| format!("cannot write {}", path.display()))?;
        self.write_csv(io::BufWriter::new(file))?;
        std::fs::write(sidecar_path(path), self.metadata())?;
        Ok(())
    }
}

/// `out/fig.csv` → `out/fig.meta.toml`
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.toml")
}

/// Runs every grid point of every series, in parallel on the current rayon
/// pool. Rows come back in grid order.
pub fn run_sweep(cfg: &SweepConfig) -> SweepResult {
    let start = Instant::now();
    let grid = cfg.grid.values();
    let series: Vec<Option<(Axis, f64)>> = match &cfg.series {
        Some(s) => s.values.iter().map(|&v| Some((s.param, v))).collect(),
        None => vec![None],
    };
    let tasks: Vec<(Option<(Axis, f64)>, f64)> =
        series.iter().flat_map(|s| grid.iter().map(move |&x| (*s, x))).collect();
    let rows = tasks
        .par_iter()
        .map(|&(s, x)| {
            let mut params = cfg.params;
            let label = match s {
                Some((axis, v)) => {
                    params.set(axis, v);
                    format!("{}@{}={}", cfg.axis, axis, v)
                }
                None => cfg.axis.to_string(),
            };
            params.set(cfg.axis, x);
            Point::new(cfg, params, label, x).rows()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    SweepResult { config: cfg.clone(), rows, wall_time_s: start.elapsed().as_secs_f64() }
}

/// A numeric steady state with its truncation record.
struct Solved {
    steady: SteadyState,
    dim: usize,
    failure: Option<String>,
}

type Outcome<T> = std::result::Result<T, String>;

/// Steady state at `dim`, doubled once if the top level holds population.
fn solve_with_doubling(dim: usize, build: impl Fn(usize) -> hmaser::Result<MasterEquation>) -> Outcome<Solved> {
    let mut last = None;
    for d in [dim, 2 * dim] {
        let me = build(d).map_err(|e| e.to_string())?;
        let steady = steady_state(&me).map_err(|e| e.to_string())?;
        let top = *steady.state.rho().populations().last().unwrap_or(&0.0);
        if top <= TRUNCATION_WARN {
            let failure = (steady.residual >= RESIDUAL_TOL)
                .then(|| format!("residual {:.3e}", steady.residual));
            return Ok(Solved { steady, dim: d, failure });
        }
        last = Some((steady, d, top));
    }
    let (steady, d, top) = last.expect("at least one attempt");
    Ok(Solved { steady, dim: d, failure: Some(format!("top-level population {top:.3e} at dim {d}")) })
}

struct Point<'a> {
    cfg: &'a SweepConfig,
    params: ParamsConfig,
    label: String,
    value: f64,
}

impl<'a> Point<'a> {
    fn new(cfg: &'a SweepConfig, params: ParamsConfig, label: String, value: f64) -> Self {
        Self { cfg, params, label, value }
    }

    fn row(&self, obs: impl ToString, method: Method, result: f64) -> Row {
        Row {
            axis: self.label.clone(),
            value: self.value,
            observable: obs.to_string(),
            method,
            result,
            residual: None,
            cav_dim: self.cfg.dims.cavity,
            mech_dim: self.cfg.dims.mech,
            failure: None,
        }
    }

    fn rows(&self) -> Vec<Row> {
        let mut out = Vec::new();
        let mut phonon: Option<Outcome<Solved>> = None;
        let mut photon: Option<Outcome<Solved>> = None;
        let mut db: Option<Outcome<(Vec<f64>, usize)>> = None;
        for &obs in &self.cfg.observables {
            for &method in self.cfg.methods.list() {
                if !self.cfg.supports(obs, method) {
                    continue;
                }
                match (obs, method) {
                    (Observable::Roots, _) => out.extend(self.roots()),
                    (Observable::Nb | Observable::G2b, Method::Analytic) => {
                        out.push(self.phonon_analytic(obs))
                    }
                    (Observable::Na | Observable::G2a, Method::Analytic) => {
                        let db = db.get_or_insert_with(|| self.distribution());
                        out.push(self.photon_analytic(obs, db));
                    }
                    (Observable::Nb | Observable::G2b | Observable::Wigner, Method::Numeric) => {
                        let s = phonon.get_or_insert_with(|| self.phonon_numeric());
                        out.push(self.state_row(obs, s, false));
                    }
                    (Observable::Na | Observable::G2a, Method::Numeric) => {
                        let s = photon.get_or_insert_with(|| self.photon_numeric());
                        out.push(self.state_row(obs, s, true));
                    }
                    (Observable::Wigner, Method::Analytic) => unreachable!("rejected by supports"),
                }
            }
        }
        out
    }

    fn roots(&self) -> Vec<Row> {
        let p = self.params.system();
        let mut out = Vec::new();
        match trapping_roots(&p, ROOT_WINDOW.0, ROOT_WINDOW.1) {
            Ok(r) => {
                for (k, t) in r.thetas.iter().enumerate() {
                    out.push(self.row(format!("theta_{}", k + 1), Method::Analytic, *t));
                }
            }
            Err(e) => out.push(self.failed("theta_1", Method::Analytic, e.to_string())),
        }
        match photon_trapping_thetas(&p, 0, PHOTON_ROOTS) {
            Ok(t) => {
                for (m, t) in t.iter().enumerate() {
                    out.push(self.row(format!("theta_tilde_{}", m + 1), Method::Analytic, *t));
                }
            }
            Err(e) => out.push(self.failed("theta_tilde_1", Method::Analytic, e.to_string())),
        }
        out
    }

    fn failed(&self, obs: impl ToString, method: Method, why: String) -> Row {
        Row { failure: Some(why), ..self.row(obs, method, f64::NAN) }
    }

    fn phonon_analytic(&self, obs: Observable) -> Row {
        let p = self.params.system();
        let value = self.params.tau().and_then(|tau| {
            Ok(match obs {
                Observable::Nb => phonon_number_analytic(&p, tau, None)?,
                _ => match g2_phonon_analytic(&p, tau, None) {
                    Err(Error::UndefinedStatistics(_)) => f64::NAN,
                    other => other?,
                },
            })
        });
        match value {
            Ok(v) => self.row(obs, Method::Analytic, v),
            Err(e) => self.failed(obs, Method::Analytic, e.to_string()),
        }
    }

    fn distribution(&self) -> Outcome<(Vec<f64>, usize)> {
        let p = self.params.system();
        let pump = self.params.pump().map_err(|e| e.to_string())?;
        let nc = self.cfg.dims.cavity;
        match photon_distribution_db(&p, pump, nc - 1) {
            Err(Error::Truncation(_)) => photon_distribution_db(&p, pump, 2 * nc - 1)
                .map(|d| (d, 2 * nc))
                .map_err(|e| e.to_string()),
            other => other.map(|d| (d, nc)).map_err(|e| e.to_string()),
        }
    }

    fn photon_analytic(&self, obs: Observable, db: &Outcome<(Vec<f64>, usize)>) -> Row {
        let (dist, dim) = match db {
            Ok(d) => d,
            Err(e) => return self.failed(obs, Method::Analytic, e.clone()),
        };
        let n: f64 = dist.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        let result = match obs {
            Observable::Na => n,
            _ => {
                let nn: f64 =
                    dist.iter().enumerate().map(|(k, p)| (k * k.saturating_sub(1)) as f64 * p).sum();
                if n > G2_MIN_OCCUPATION {
                    nn / (n * n)
                } else {
                    f64::NAN
                }
            }
        };
        Row { cav_dim: *dim, ..self.row(obs, Method::Analytic, result) }
    }

    fn phonon_numeric(&self) -> Outcome<Solved> {
        let p = self.params.system();
        let tau = self.params.tau().map_err(|e| e.to_string())?;
        solve_with_doubling(self.cfg.dims.mech, |d| {
            if p.xi > 0.0 {
                MasterEquation::phonon_squeezed(&p, tau, d)
            } else {
                MasterEquation::phonon_thermal(&p, tau, d)
            }
        })
    }

    fn photon_numeric(&self) -> Outcome<Solved> {
        let p = self.params.system();
        let pump = self.params.pump().map_err(|e| e.to_string())?;
        solve_with_doubling(self.cfg.dims.cavity, |d| MasterEquation::photon_thermal(&p, pump, d))
    }

    fn state_row(&self, obs: Observable, solved: &Outcome<Solved>, cavity: bool) -> Row {
        let s = match solved {
            Ok(s) => s,
            Err(e) => return self.failed(obs, Method::Numeric, e.clone()),
        };
        let state = &s.steady.state;
        let result = match obs {
            Observable::Nb | Observable::Na => Ok(state.mean_number()),
            Observable::G2b | Observable::G2a => match g2_numeric(state) {
                Err(Error::UndefinedStatistics(_)) => Ok(f64::NAN),
                other => other,
            },
            _ => wigner_mode(state, &WignerGrid::around(state.amplitude())).map(|w| w.peak().1),
        };
        let mut row = match result {
            Ok(v) => self.row(obs, Method::Numeric, v),
            Err(e) => return self.failed(obs, Method::Numeric, e.to_string()),
        };
        row.residual = Some(s.steady.residual);
        row.failure = s.failure.clone();
        if cavity {
            row.cav_dim = s.dim;
        } else {
            row.mech_dim = s.dim;
        }
        row
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Methods;

    fn cfg(text: &str) -> SweepConfig {
        SweepConfig::from_toml(text, &[]).unwrap()
    }

    #[test]
    fn single_point_is_one_solve_per_method() {
        let c = cfg(r#"
            axis = "theta"
            observables = ["nb"]
            grid = { min = 14.0, max = 14.0, points = 1 }
        "#);
        let r = run_sweep(&c);
        assert_eq!(r.rows.len(), 2);
        assert_eq!(r.rows[0].method, Method::Analytic);
        assert_eq!(r.rows[1].method, Method::Numeric);
        assert!(r.rows[1].residual.unwrap() < RESIDUAL_TOL);
        assert!(r.converged());
        let rel = (r.rows[0].result - r.rows[1].result).abs() / r.rows[1].result;
        assert!(rel < 0.05, "{rel}");
    }

    #[test]
    fn rows_follow_grid_then_observable_order() {
        let c = cfg(r#"
            axis = "theta"
            observables = ["na", "nb"]
            methods = "analytic"
            grid = { min = 2.0, max = 6.0, points = 3 }
            series = { param = "g_cm", values = [0.01, 0.03] }
        "#);
        let r = run_sweep(&c);
        let keys: Vec<(String, f64, String)> =
            r.rows.iter().map(|r| (r.axis.clone(), r.value, r.observable.clone())).collect();
        assert_eq!(keys.len(), 12);
        assert_eq!(keys[0], ("theta@g_cm=0.01".into(), 2.0, "na".into()));
        assert_eq!(keys[1], ("theta@g_cm=0.01".into(), 2.0, "nb".into()));
        assert_eq!(keys[2].1, 4.0);
        assert_eq!(keys[6].0, "theta@g_cm=0.03");
    }

    #[test]
    fn roots_rows_match_the_trapping_values() {
        let c = cfg(r#"
            axis = "alpha"
            observables = ["roots"]
            grid = { min = 0.3, max = 0.3, points = 1 }
        "#);
        let r = run_sweep(&c);
        let want = [9.32, 18.81, 28.01, 9.36, 18.73, 28.09];
        assert_eq!(r.rows.len(), 6);
        for (row, w) in r.rows.iter().zip(want) {
            assert!((row.result - w).abs() < 0.02, "{} {}", row.observable, row.result);
        }
        assert_eq!(r.rows[3].observable, "theta_tilde_1");
    }

    #[test]
    fn squeezed_sweep_skips_analytic_phonon_rows() {
        let mut c = cfg(r#"
            axis = "theta"
            observables = ["g2b"]
            grid = { min = 14.0, max = 14.0, points = 1 }
            [params]
            xi = 0.015
            phi = 3.141592653589793
        "#);
        c.methods = Methods::Both;
        let r = run_sweep(&c);
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].method, Method::Numeric);
    }

    #[test]
    fn truncation_overflow_is_flagged() {
        let c = cfg(r#"
            axis = "theta"
            observables = ["nb"]
            methods = "numeric"
            grid = { min = 14.0, max = 14.0, points = 1 }
            dims = { cavity = 10, mech = 3 }
            [params]
            n_th = 2.0
        "#);
        let r = run_sweep(&c);
        assert!(!r.converged());
        assert_eq!(r.rows[0].mech_dim, 6);
        assert!(r.metadata().contains("top-level population"));
    }

    #[test]
    fn csv_is_deterministic_and_metadata_round_trips() {
        let c = cfg(r#"
            axis = "theta"
            observables = ["nb", "g2a"]
            grid = { min = 4.0, max = 12.0, points = 3 }
        "#);
        let csv = |r: &SweepResult| {
            let mut buf = Vec::new();
            r.write_csv(&mut buf).unwrap();
            String::from_utf8(buf).unwrap()
        };
        let a = run_sweep(&c);
        let b = run_sweep(&c);
        assert_eq!(csv(&a), csv(&b));
        assert!(csv(&a).starts_with("axis,value,observable,method,result,residual,cav_dim,mech_dim\n"));
        let back = SweepConfig::from_toml(&a.metadata(), &[]).unwrap();
        assert_eq!(back, c);
    }
}
