use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context};
use hmaser::{PumpParameter, SpaceDims, SystemParams, C64};
use serde::{Deserialize, Serialize};

/// Model parameters as written in a config file. `theta` is the pump
/// parameter used when it is not the sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsConfig {
    pub omega_m: f64,
    pub omega_a: f64,
    pub omega_c: f64,
    pub g_ac: f64,
    pub g_cm: f64,
    pub r: f64,
    pub kappa_a: f64,
    pub kappa_b: f64,
    pub n_th: f64,
    pub alpha: f64,
    pub xi: f64,
    pub phi: f64,
    pub theta: f64,
}

impl Default for ParamsConfig {
    fn default() -> Self {
        let p = SystemParams::default();
        Self {
            omega_m: p.omega_m,
            omega_a: p.omega_a,
            omega_c: p.omega_c,
            g_ac: p.g_ac,
            g_cm: p.g_cm,
            r: p.r,
            kappa_a: p.kappa_a,
            kappa_b: p.kappa_b,
            n_th: p.n_th,
            alpha: p.alpha.re,
            xi: p.xi,
            phi: p.phi,
            theta: 10.0,
        }
    }
}

impl ParamsConfig {
    pub fn system(&self) -> SystemParams {
        SystemParams {
            omega_m: self.omega_m,
            omega_a: self.omega_a,
            omega_c: self.omega_c,
            g_ac: self.g_ac,
            g_cm: self.g_cm,
            r: self.r,
            kappa_a: self.kappa_a,
            kappa_b: self.kappa_b,
            n_th: self.n_th,
            alpha: C64::from(self.alpha),
            xi: self.xi,
            phi: self.phi,
        }
    }

    pub fn set(&mut self, axis: Axis, value: f64) {
        match axis {
            Axis::Theta => self.theta = value,
            Axis::GCm => self.g_cm = value,
            Axis::Xi => self.xi = value,
            Axis::Alpha => self.alpha = value,
            Axis::NTh => self.n_th = value,
        }
    }

    pub fn pump(&self) -> anyhow::Result<PumpParameter> {
        Ok(PumpParameter::new(self.theta)?)
    }

    pub fn tau(&self) -> anyhow::Result<f64> {
        Ok(self.pump()?.tau(&self.system())?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Theta,
    GCm,
    Xi,
    Alpha,
    NTh,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Theta => "theta",
            Axis::GCm => "g_cm",
            Axis::Xi => "xi",
            Axis::Alpha => "alpha",
            Axis::NTh => "n_th",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    /// Mean phonon number.
    Nb,
    /// Mean photon number.
    Na,
    /// Phonon `g²(0)`.
    G2b,
    /// Photon `g²(0)`.
    G2a,
    /// Peak value of the mechanical Wigner function.
    Wigner,
    /// Phonon and photon vacuum trapping values of `Θ`.
    Roots,
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Observable::Nb => "nb",
            Observable::Na => "na",
            Observable::G2b => "g2b",
            Observable::G2a => "g2a",
            Observable::Wigner => "wigner",
            Observable::Roots => "roots",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Methods {
    Analytic,
    Numeric,
    Both,
}

impl Methods {
    pub fn list(self) -> &'static [Method] {
        match self {
            Methods::Analytic => &[Method::Analytic],
            Methods::Numeric => &[Method::Numeric],
            Methods::Both => &[Method::Analytic, Method::Numeric],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Analytic,
    Numeric,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Analytic => "analytic",
            Method::Numeric => "numeric",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        if n == 1 {
            return vec![self.min];
        }
        (0..n)
            .map(|k| {
                if k + 1 == n {
                    self.max
                } else {
                    self.min + (self.max - self.min) * k as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

/// A second parameter held at each of a list of values, one curve per value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Series {
    pub param: Axis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimsConfig {
    pub cavity: usize,
    pub mech: usize,
}

impl Default for DimsConfig {
    fn default() -> Self {
        Self { cavity: 40, mech: 16 }
    }
}

impl DimsConfig {
    pub fn space(&self) -> anyhow::Result<SpaceDims> {
        Ok(SpaceDims::new(self.cavity, self.mech)?)
    }
}

impl std::str::FromStr for DimsConfig {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (c, m) = s.split_once(',').ok_or("expected Nc,Nm")?;
        let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
        Ok(Self { cavity: parse(c)?, mech: parse(m)? })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub params: ParamsConfig,
    pub axis: Axis,
    pub grid: Grid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series: Option<Series>,
    pub observables: Vec<Observable>,
    #[serde(default = "default_methods")]
    pub methods: Methods,
    #[serde(default)]
    pub dims: DimsConfig,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

fn default_methods() -> Methods {
    Methods::Both
}

fn default_output() -> PathBuf {
    PathBuf::from("sweep.csv")
}

/// Key of the run record appended to metadata sidecars; ignored when a
/// sidecar is read back as a config.
pub const RUN_TABLE: &str = "run";

impl SweepConfig {
    pub fn from_toml(text: &str, overrides: &[String]) -> anyhow::Result<Self> {
        let mut table: toml::Table = toml::from_str(text).context("malformed config")?;
        table.remove(RUN_TABLE);
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: SweepConfig = table.try_into().context("invalid config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_toml(&text, overrides)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    /// Whether any point of the sweep uses a squeezed phonon reservoir.
    pub fn squeezed(&self) -> bool {
        let axis_xi = self.axis == Axis::Xi && (self.grid.min > 0.0 || self.grid.max > 0.0);
        let series_xi = self
            .series
            .as_ref()
            .is_some_and(|s| s.param == Axis::Xi && s.values.iter().any(|&v| v > 0.0));
        self.params.xi > 0.0 || axis_xi || series_xi
    }

    pub fn supports(&self, obs: Observable, method: Method) -> bool {
        match (obs, method) {
            (Observable::Nb | Observable::G2b, Method::Analytic) => !self.squeezed(),
            (Observable::Wigner, Method::Analytic) => false,
            (Observable::Roots, Method::Numeric) => false,
            _ => true,
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        let g = &self.grid;
        ensure!(g.points >= 1, "grid.points must be at least 1");
        ensure!(g.min.is_finite() && g.max.is_finite(), "grid bounds must be finite");
        if g.points >= 2 {
            ensure!(g.min < g.max, "grid.min must be below grid.max");
        }
        ensure!(!self.observables.is_empty(), "no observables requested");
        if let Some(s) = &self.series {
            ensure!(s.param != self.axis, "series parameter equals the sweep axis");
            ensure!(!s.values.is_empty(), "series has no values");
        }
        self.dims.space()?;
        for &obs in &self.observables {
            if !self.methods.list().iter().any(|&m| self.supports(obs, m)) {
                bail!("observable {obs} cannot be computed with method {:?}", self.methods);
            }
        }
        let mut probe = self.params;
        for v in [g.min, g.max] {
            probe.set(self.axis, v);
            probe.system().validate().with_context(|| format!("{} = {v}", self.axis))?;
            PumpParameter::new(probe.theta)?;
        }
        Ok(())
    }
}

/// Applies `key=value`, where a bare key addresses `params` and a dotted key
/// any table. Values are parsed as TOML, falling back to a string.
pub fn apply_override(table: &mut toml::Table, entry: &str) -> anyhow::Result<()> {
    let (key, raw) = entry
        .split_once('=')
        .with_context(|| format!("override {entry:?} is not key=value"))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let mut path: Vec<&str> = key.split('.').collect();
    ensure!(path.iter().all(|p| !p.is_empty()), "empty key segment in {key:?}");
    if path.len() == 1 && !is_top_level(path[0]) {
        path.insert(0, "params");
    }
    let (last, parents) = path.split_last().expect("non-empty path");
    let mut cur = table;
    for p in parents {
        cur = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .with_context(|| format!("{p} is not a table"))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

fn is_top_level(key: &str) -> bool {
    matches!(
        key,
        "params" | "axis" | "grid" | "series" | "observables" | "methods" | "dims" | "output"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = r#"
        axis = "theta"
        observables = ["nb"]
        [grid]
        min = 0.0
        max = 30.0
        points = 61
    "#;

    #[test]
    fn grid_hits_both_ends() {
        let v = Grid { min: 0.0, max: 30.0, points: 61 }.values();
        assert_eq!(v.len(), 61);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[60], 30.0);
        assert!((v[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn defaults_follow_the_model() {
        let cfg = SweepConfig::from_toml(BASIC, &[]).unwrap();
        assert_eq!(cfg.params.system(), SystemParams::default());
        assert_eq!(cfg.methods, Methods::Both);
        assert_eq!(cfg.dims, DimsConfig::default());
    }

    #[test]
    fn overrides_reach_params_and_nested_tables() {
        let o = ["g_cm=0.03".to_string(), "grid.points=5".into(), "methods=numeric".into()];
        let cfg = SweepConfig::from_toml(BASIC, &o).unwrap();
        assert_eq!(cfg.params.g_cm, 0.03);
        assert_eq!(cfg.grid.points, 5);
        assert_eq!(cfg.methods, Methods::Numeric);
    }

    #[test]
    fn round_trips_through_toml() {
        let mut cfg = SweepConfig::from_toml(BASIC, &[]).unwrap();
        cfg.series = Some(Series { param: Axis::GCm, values: vec![0.01, 0.02] });
        cfg.params.alpha = 0.384;
        let back = SweepConfig::from_toml(&cfg.to_toml(), &[]).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn run_table_is_ignored() {
        let text = format!("{BASIC}\n[run]\nwall_time_s = 1.0\n");
        assert!(SweepConfig::from_toml(&text, &[]).is_ok());
    }

    #[test]
    fn rejects_bad_configs() {
        let cases = [
            "grid.points=0",
            "grid.max=-1.0",
            "observables=[]",
            "dims.mech=0",
            "kappa_b=-1.0",
            "unknown_key=1",
        ];
        for c in cases {
            assert!(SweepConfig::from_toml(BASIC, &[c.to_string()]).is_err(), "{c}");
        }
        let wig = ["observables=[\"wigner\"]".to_string(), "methods=analytic".into()];
        assert!(SweepConfig::from_toml(BASIC, &wig).is_err());
    }

    #[test]
    fn squeezing_disables_analytic_phonon_rows() {
        let cfg = SweepConfig::from_toml(BASIC, &["xi=0.015".to_string()]).unwrap();
        assert!(!cfg.supports(Observable::Nb, Method::Analytic));
        assert!(cfg.supports(Observable::Na, Method::Analytic));
        let only = ["xi=0.015".to_string(), "methods=analytic".into()];
        assert!(SweepConfig::from_toml(BASIC, &only).is_err());
    }

    #[test]
    fn parses_dims_flag() {
        let d: DimsConfig = "12, 20".parse().unwrap();
        assert_eq!(d, DimsConfig { cavity: 12, mech: 20 });
        assert!("12".parse::<DimsConfig>().is_err());
    }
}
