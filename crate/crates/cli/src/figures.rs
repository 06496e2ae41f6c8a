//! Data and plots for each figure panel of the trapping and blockade study.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use hmaser::analytics::{photon_trapping_thetas, trapping_roots, wigner_mode, WignerGrid};
use hmaser::lindblad::steady_state;
use hmaser::{MasterEquation, PumpParameter, SystemParams, C64};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{
    Axis, DimsConfig, Grid, Method, Methods, Observable, ParamsConfig, Series, SweepConfig,
};
use crate::plot::{Curve, Heatmap, LineChart, Stroke};
use crate::sweep::{run_sweep, sidecar_path, Row, SweepResult, COLUMNS, ROOT_WINDOW};

pub const TAGS: [&str; 14] = [
    "fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b", "fig3c", "fig4a", "fig4b", "fig5a",
    "fig5b", "fig5c", "fig5d", "fig6",
];

/// Squeezing amplitudes of the blockade heatmaps.
const XI_VALUES: [f64; 7] = [0.0, 0.005, 0.01, 0.015, 0.02, 0.025, 0.03];

/// Options shared by every panel.
#[derive(Debug, Clone, Default)]
pub struct FigureOptions {
    pub dims: Option<DimsConfig>,
    pub methods: Option<Methods>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureReport {
    pub files: Vec<PathBuf>,
    pub converged: bool,
}

enum Render {
    Lines { log_y: bool, v_lines: Vec<(String, f64)> },
    Heat { observable: Observable },
}

struct Panel {
    title: String,
    y_label: String,
    config: SweepConfig,
    render: Render,
}

fn sweep(axis: Axis, min: f64, max: f64, points: usize, observables: &[Observable]) -> SweepConfig {
    SweepConfig {
        params: ParamsConfig::default(),
        axis,
        grid: Grid { min, max, points },
        series: None,
        observables: observables.to_vec(),
        methods: Methods::Both,
        dims: DimsConfig::default(),
        output: PathBuf::new(),
    }
}

fn series(param: Axis, values: &[f64]) -> Option<Series> {
    Some(Series { param, values: values.to_vec() })
}

/// Phonon trapping values `Θ₁..Θ₃` at the default parameters.
fn default_roots() -> anyhow::Result<Vec<f64>> {
    Ok(trapping_roots(&SystemParams::default(), ROOT_WINDOW.0, ROOT_WINDOW.1)?.thetas)
}

fn blockade_params() -> ParamsConfig {
    ParamsConfig { g_cm: 0.014, phi: PI, ..ParamsConfig::default() }
}

fn lines(log_y: bool) -> Render {
    Render::Lines { log_y, v_lines: Vec::new() }
}

fn panel(tag: &str) -> anyhow::Result<Panel> {
    use Observable::*;
    let roots = default_roots()?;
    let p = match tag {
        "fig2a" => Panel {
            title: "Steady-state phonon number for several |α|".into(),
            y_label: "⟨b†b⟩".into(),
            config: SweepConfig {
                series: series(Axis::Alpha, &[0.1, 0.3, 0.5, 1.0]),
                ..sweep(Axis::Theta, 0.0, 30.0, 121, &[Nb])
            },
            render: lines(false),
        },
        "fig2b" => Panel {
            title: "Steady-state phonon number for several g_cm".into(),
            y_label: "⟨b†b⟩".into(),
            config: SweepConfig {
                series: series(Axis::GCm, &[0.01, 0.02, 0.03]),
                ..sweep(Axis::Theta, 0.0, 30.0, 121, &[Nb])
            },
            render: lines(false),
        },
        "fig2c" => Panel {
            title: "Phonon number at the trapping values vs g_cm".into(),
            y_label: "⟨b†b⟩".into(),
            config: SweepConfig {
                series: series(Axis::Theta, &roots),
                ..sweep(Axis::GCm, 0.005, 0.05, 19, &[Nb])
            },
            render: lines(true),
        },
        "fig2d" => Panel {
            title: "Phonon number at the trapping values vs n_th".into(),
            y_label: "⟨b†b⟩".into(),
            config: SweepConfig {
                series: series(Axis::Theta, &roots),
                ..sweep(Axis::NTh, 0.0, 0.1, 21, &[Nb])
            },
            render: lines(true),
        },
        "fig3a" => Panel {
            title: "Steady-state photon and phonon numbers".into(),
            y_label: "occupation".into(),
            config: sweep(Axis::Theta, 0.0, 30.0, 121, &[Na, Nb]),
            render: lines(false),
        },
        "fig3b" => Panel {
            title: "Phonon (solid) and photon (dashed) vacuum trapping values".into(),
            y_label: "Θ".into(),
            config: SweepConfig {
                methods: Methods::Analytic,
                ..sweep(Axis::Alpha, 0.02, 1.5, 75, &[Roots])
            },
            render: lines(false),
        },
        "fig4a" => {
            let p = SystemParams::default();
            let mut v_lines: Vec<(String, f64)> =
                roots.iter().enumerate().map(|(k, t)| (format!("Θ{}", k + 1), *t)).collect();
            for k in [0, 1] {
                for (m, t) in photon_trapping_thetas(&p, k, 3)?.into_iter().enumerate() {
                    if t <= 30.0 {
                        v_lines.push((format!("photon k={k} m={}", m + 1), t));
                    }
                }
            }
            Panel {
                title: "Photon and phonon g²(0)".into(),
                y_label: "g²(0)".into(),
                config: sweep(Axis::Theta, 0.2, 30.0, 150, &[G2a, G2b]),
                render: Render::Lines { log_y: true, v_lines },
            }
        }
        "fig4b" => Panel {
            title: "Phonon g²(0), n_th = 0.01".into(),
            y_label: "g²(0)".into(),
            config: SweepConfig {
                params: ParamsConfig { n_th: 0.01, ..ParamsConfig::default() },
                series: series(Axis::GCm, &[0.01, 0.02, 0.03]),
                ..sweep(Axis::Theta, 0.2, 30.0, 150, &[G2b])
            },
            render: lines(true),
        },
        "fig5a" => Panel {
            title: "Phonon g²(0) over (Θ, ξ)".into(),
            y_label: "ξ".into(),
            config: SweepConfig {
                params: blockade_params(),
                series: series(Axis::Xi, &XI_VALUES),
                methods: Methods::Numeric,
                ..sweep(Axis::Theta, 0.5, 30.0, 60, &[G2b])
            },
            render: Render::Heat { observable: G2b },
        },
        "fig5b" | "fig5c" | "fig5d" => {
            let k = (tag.as_bytes()[4] - b'b') as usize;
            let theta = *roots.get(k).context("missing trapping value")?;
            Panel {
                title: format!("Phonon g²(0) over (g_cm, ξ) at Θ{} = {theta:.3}", k + 1),
                y_label: "ξ".into(),
                config: SweepConfig {
                    params: ParamsConfig { theta, ..blockade_params() },
                    series: series(Axis::Xi, &XI_VALUES),
                    methods: Methods::Numeric,
                    ..sweep(Axis::GCm, 0.002, 0.03, 15, &[G2b])
                },
                render: Render::Heat { observable: G2b },
            }
        }
        "fig6" => Panel {
            title: "Blockade: phonon g²(0), photon and phonon numbers".into(),
            y_label: "value".into(),
            config: SweepConfig {
                params: ParamsConfig { alpha: 0.384, xi: 0.015, ..blockade_params() },
                methods: Methods::Numeric,
                ..sweep(Axis::Theta, 0.5, 30.0, 120, &[G2b, Na, Nb])
            },
            render: lines(true),
        },
        other => bail!("unknown figure tag {other:?}; known tags: {}", TAGS.join(", ")),
    };
    Ok(p)
}

/// Resolves the sweep behind a figure tag after applying `opts`.
pub fn figure_config(tag: &str, opts: &FigureOptions) -> anyhow::Result<SweepConfig> {
    if tag == "fig3c" {
        bail!("fig3c is a phase-space figure without a sweep config");
    }
    let mut cfg = panel(tag)?.config;
    if let Some(d) = opts.dims {
        cfg.dims = d;
    }
    if let Some(m) = opts.methods {
        cfg.methods = m;
    }
    cfg.output = PathBuf::from(format!("{tag}.csv"));
    cfg.validate()?;
    Ok(cfg)
}

pub fn is_known(tag: &str) -> bool {
    TAGS.contains(&tag)
}

/// Writes `<tag>.csv`, its metadata sidecar and the SVG plot(s) into `out`.
pub fn reproduce_figure(tag: &str, out: &Path, opts: &FigureOptions) -> anyhow::Result<FigureReport> {
    if !is_known(tag) {
        bail!("unknown figure tag {tag:?}; known tags: {}", TAGS.join(", "));
    }
    if tag == "fig3c" {
        return wigner_figure(out, opts);
    }
    let p = panel(tag)?;
    let cfg = figure_config(tag, opts)?;
    let result = run_sweep(&cfg);
    let csv = out.join(&cfg.output);
    result.save(&csv)?;
    let svg_path = out.join(format!("{tag}.svg"));
    let svg = match &p.render {
        Render::Lines { log_y, v_lines } => line_chart(&result, &p, *log_y, v_lines).render(),
        Render::Heat { observable } => heatmap(&result, &p, *observable)?.render(),
    };
    std::fs::write(&svg_path, svg)?;
    Ok(FigureReport {
        files: vec![csv.clone(), sidecar_path(&csv), svg_path],
        converged: result.converged(),
    })
}

fn series_label(axis_label: &str) -> Option<&str> {
    axis_label.split_once('@').map(|(_, s)| s)
}

fn line_chart(result: &SweepResult, p: &Panel, log_y: bool, v_lines: &[(String, f64)]) -> LineChart {
    // keyed by (curve order, axis label, observable, method)
    type Key = (usize, String, String, Method);
    let mut groups: BTreeMap<Key, Vec<(f64, f64)>> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    for r in &result.rows {
        let idx = order.iter().position(|a| *a == r.axis).unwrap_or_else(|| {
            order.push(r.axis.clone());
            order.len() - 1
        });
        let y = if log_y && r.result <= 0.0 { f64::NAN } else { r.result };
        groups
            .entry((idx, r.axis.clone(), r.observable.clone(), r.method))
            .or_default()
            .push((r.value, y));
    }
    let curves = groups
        .into_iter()
        .map(|((_, axis, obs, method), points)| {
            let stroke = if obs.starts_with("theta_tilde") {
                Stroke::Dashed
            } else if method == Method::Numeric {
                Stroke::Dotted
            } else {
                Stroke::Solid
            };
            let mut label = format!("{obs} {method}");
            if let Some(s) = series_label(&axis) {
                label = format!("{label} {s}");
            }
            Curve { label, points, stroke }
        })
        .collect();
    LineChart {
        title: p.title.clone(),
        x_label: result.config.axis.to_string(),
        y_label: p.y_label.clone(),
        curves,
        h_lines: Vec::new(),
        v_lines: v_lines.to_vec(),
        log_y,
    }
}

fn heatmap(result: &SweepResult, p: &Panel, obs: Observable) -> anyhow::Result<Heatmap> {
    let cfg = &result.config;
    let s = cfg.series.as_ref().context("heatmap needs a series")?;
    let xs = cfg.grid.values();
    let mut values = vec![vec![f64::NAN; xs.len()]; s.values.len()];
    let name = obs.to_string();
    let rows: Vec<&Row> = result.rows.iter().filter(|r| r.observable == name).collect();
    for (k, r) in rows.iter().enumerate() {
        values[k / xs.len()][k % xs.len()] = r.result;
    }
    Ok(Heatmap {
        title: p.title.clone(),
        x_label: cfg.axis.to_string(),
        y_label: p.y_label.clone(),
        xs,
        ys: s.values.clone(),
        values,
    })
}

/// Interaction times of the phase-space panels: two mid-gap values and the
/// first two phonon trapping values.
fn wigner_thetas() -> anyhow::Result<Vec<f64>> {
    let r = default_roots()?;
    Ok(vec![5.0, r[0], 14.0, r[1]])
}

/// Half-width of the cavity phase-space window.
const CAVITY_WINDOW: f64 = 8.0;
const WIGNER_POINTS: usize = 81;

fn wigner_figure(out: &Path, opts: &FigureOptions) -> anyhow::Result<FigureReport> {
    let dims = opts.dims.unwrap_or_default();
    dims.space()?;
    let params = ParamsConfig::default();
    let p = params.system();
    let thetas = wigner_thetas()?;

    struct Field {
        mode: &'static str,
        k: usize,
        theta: f64,
        grid: WignerGrid,
        values: Vec<f64>,
        residual: f64,
        converged: bool,
    }

    let jobs: Vec<(usize, &'static str)> =
        (0..thetas.len()).flat_map(|k| [(k, "a"), (k, "b")]).collect();
    let fields = jobs
        .par_iter()
        .map(|&(k, mode)| -> anyhow::Result<Field> {
            let theta = thetas[k];
            let pump = PumpParameter::new(theta)?;
            let me = if mode == "a" {
                MasterEquation::photon_thermal(&p, pump, dims.cavity)?
            } else {
                MasterEquation::phonon_thermal(&p, pump.tau(&p)?, dims.mech)?
            };
            let steady = steady_state(&me)?;
            let state = &steady.state;
            let top = *state.rho().populations().last().unwrap_or(&0.0);
            let converged = top <= hmaser::dynamics::TRUNCATION_WARN
                && steady.residual < hmaser::lindblad::RESIDUAL_TOL;
            let centre = if mode == "a" { C64::new(0.0, 0.0) } else { state.amplitude() };
            let w = if mode == "a" { CAVITY_WINDOW } else { 4.0 };
            let grid = WignerGrid::new(
                (centre.re - w, centre.re + w),
                (centre.im - w, centre.im + w),
                WIGNER_POINTS,
                WIGNER_POINTS,
            )?;
            let field = wigner_mode(state, &grid)?;
            Ok(Field {
                mode,
                k,
                theta,
                grid,
                values: field.values,
                residual: steady.residual,
                converged,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;

    std::fs::create_dir_all(out)?;
    let csv_path = out.join("fig3c.csv");
    let mut w = csv::Writer::from_path(&csv_path)?;
    w.write_record(COLUMNS)?;
    let mut files = vec![csv_path.clone()];
    for f in &fields {
        let (nx, np) = (f.grid.xs.len(), f.grid.ps.len());
        for (j, pv) in f.grid.ps.iter().enumerate() {
            let axis = format!("x@theta={},mode={},p={}", f.theta, f.mode, pv);
            for (i, xv) in f.grid.xs.iter().enumerate() {
                w.write_record([
                    axis.clone(),
                    xv.to_string(),
                    "wigner".into(),
                    "numeric".into(),
                    f.values[j * nx + i].to_string(),
                    f.residual.to_string(),
                    dims.cavity.to_string(),
                    dims.mech.to_string(),
                ])?;
            }
        }
        let values: Vec<Vec<f64>> =
            (0..np).map(|j| (0..nx).map(|i| f.values[j * nx + i]).collect()).collect();
        let name = if f.mode == "a" { "cavity" } else { "mechanics" };
        let map = Heatmap {
            title: format!("{name} Wigner function, Θ = {:.3}", f.theta),
            x_label: "Re β".into(),
            y_label: "Im β".into(),
            xs: f.grid.xs.clone(),
            ys: f.grid.ps.clone(),
            values,
        };
        let svg = out.join(format!("fig3c_{}_{}.svg", f.mode, f.k + 1));
        std::fs::write(&svg, map.render())?;
        files.push(svg);
    }
    w.flush()?;

    #[derive(Serialize)]
    struct Meta {
        params: ParamsConfig,
        thetas: Vec<f64>,
        dims: DimsConfig,
        grid_points: usize,
        cavity_window: f64,
        mechanics_window: f64,
        code_version: &'static str,
        unconverged: Vec<String>,
    }
    let meta = Meta {
        params,
        thetas,
        dims,
        grid_points: WIGNER_POINTS,
        cavity_window: CAVITY_WINDOW,
        mechanics_window: 4.0,
        code_version: env!("CARGO_PKG_VERSION"),
        unconverged: fields
            .iter()
            .filter(|f| !f.converged)
            .map(|f| format!("mode {} at theta {}", f.mode, f.theta))
            .collect(),
    };
    let side = sidecar_path(&csv_path);
    std::fs::write(&side, toml::to_string(&meta)?)?;
    files.insert(1, side);
    Ok(FigureReport { files, converged: meta.unconverged.is_empty() })
}
