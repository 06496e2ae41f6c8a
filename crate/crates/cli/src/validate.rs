//! Oracle-equivalence battery.

use std::f64::consts::PI;

use anyhow::bail;
use hmaser::analytics::{phonon_number_analytic, photon_distribution_db, photon_trapping_thetas};
use hmaser::dynamics::{evolve_brute_force, evolve_closed_form, ground_atom_product, to_interaction_frame};
use hmaser::gain::{cavity_gain_map, gain_coefficients, joint_gain_state, phonon_gain_map, AtomInit};
use hmaser::lindblad::steady_state;
use hmaser::operator::{coherent_state, fock_state, partial_trace, trace_distance};
use hmaser::{MasterEquation, PumpParameter, Subsystem, SystemParams, C64};

pub const CHECKS: [&str; 5] =
    ["closed-form", "analytic-me", "gain-maps", "normalization", "detailed-balance"];

/// Closed form vs brute force, trace distance. The reduced propagator neglects
/// terms of order `g_cm/ω_m` beside the atom-cavity coupling.
pub const CLOSED_FORM_TOL: f64 = 1e-2;
/// Relative phonon-number agreement, measured against `max(⟨n⟩, 1)`.
pub const ANALYTIC_ME_TOL: f64 = 0.05;
pub const GAIN_MAP_TOL: f64 = 1e-9;
pub const JOINT_TOL: f64 = 1e-6;
pub const NORMALIZATION_TOL: f64 = 1e-12;
pub const DETAILED_BALANCE_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<17} measured {:.3e} (tolerance {:.1e}) {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.measured,
                c.tolerance,
                c.detail
            )?;
        }
        let failed = self.checks.iter().filter(|c| !c.pass).count();
        write!(f, "{} checks, {failed} failed", self.checks.len())
    }
}

fn below(name: &str, measured: f64, tolerance: f64, detail: String) -> CheckResult {
    CheckResult { name: name.into(), pass: measured < tolerance, measured, tolerance, detail }
}

fn tau_of(p: &SystemParams, theta: f64) -> hmaser::Result<f64> {
    PumpParameter::new(theta)?.tau(p)
}

fn closed_form(p: &SystemParams) -> anyhow::Result<CheckResult> {
    let rc = coherent_state(12, C64::from(0.3))?;
    let rm = fock_state(16, 0)?;
    let rho0 = ground_atom_product(&rc, &rm)?;
    let period = PI / p.g_ac;
    let mut worst: f64 = 0.0;
    for k in 1..=6 {
        let t = period * k as f64 / 6.0;
        let cf = evolve_closed_form(&rho0, p, t)?;
        let bf = to_interaction_frame(&evolve_brute_force(&rho0, p, t, 1)?, p, t)?;
        worst = worst.max(trace_distance(cf.matrix(), bf.matrix()));
    }
    Ok(below("closed-form", worst, CLOSED_FORM_TOL, format!("over τ ∈ (0, π/g_ac], g_cm = {}", p.g_cm)))
}

fn analytic_me(p: &SystemParams) -> anyhow::Result<CheckResult> {
    let mut worst = (0.0f64, 0.0);
    for k in 0..=12 {
        let theta = 2.5 * k as f64;
        let tau = tau_of(p, theta)?;
        let analytic = phonon_number_analytic(p, tau, None)?;
        let numeric = steady_state(&MasterEquation::phonon_thermal(p, tau, 16)?)?.state.mean_number();
        let rel = (analytic - numeric).abs() / numeric.max(1.0);
        if rel > worst.0 {
            worst = (rel, theta);
        }
    }
    Ok(below("analytic-me", worst.0, ANALYTIC_ME_TOL, format!("worst at Θ = {}", worst.1)))
}

fn gain_maps(p: &SystemParams) -> anyhow::Result<CheckResult> {
    let theta = 7.0;
    let tau = tau_of(p, theta)?;
    let rc = coherent_state(14, p.alpha)?;
    let rm = coherent_state(16, C64::from(0.4))?;
    let joint = joint_gain_state(&rc, &rm, p, tau, AtomInit::Ground)?;
    let mech = partial_trace(&joint, &[Subsystem::Mechanics])?;
    let d_m = trace_distance(mech.matrix(), phonon_gain_map(&rm, p, tau)?.matrix());
    let joint = joint_gain_state(&rc, &rm, p, tau, AtomInit::Excited)?;
    let cav = partial_trace(&joint, &[Subsystem::Cavity])?;
    let d_c = trace_distance(cav.matrix(), cavity_gain_map(&rc, p, PumpParameter::new(theta)?)?.matrix());

    let rc = coherent_state(12, p.alpha)?;
    let rm = fock_state(12, 0)?;
    let full = evolve_closed_form(&ground_atom_product(&rc, &rm)?, p, tau)?;
    let traced = partial_trace(&full, &[Subsystem::Cavity, Subsystem::Mechanics])?;
    let joint = joint_gain_state(&rc, &rm, p, tau, AtomInit::Ground)?;
    let d_j = trace_distance(traced.matrix(), joint.matrix());

    let measured = d_m.max(d_c);
    Ok(CheckResult {
        name: "gain-maps".into(),
        pass: measured < GAIN_MAP_TOL && d_j < JOINT_TOL,
        measured,
        tolerance: GAIN_MAP_TOL,
        detail: format!("marginals {d_m:.1e}/{d_c:.1e}; joint vs tripartite {d_j:.1e} (tol {JOINT_TOL:.0e})"),
    })
}

fn normalization(p: &SystemParams) -> anyhow::Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for k in 0..=40 {
        let gc = gain_coefficients(p, 0.25 * k as f64)?;
        worst = worst.max((gc.a_coeff + gc.b_coeff - 1.0).abs());
    }
    Ok(below("normalization", worst, NORMALIZATION_TOL, "|A + B − 1| over τ ∈ [0, 10]".into()))
}

fn detailed_balance(p: &SystemParams) -> anyhow::Result<CheckResult> {
    let dim = 80;
    let mut thetas = vec![2.0, 5.0, 12.0, 22.0];
    thetas.extend(photon_trapping_thetas(p, 0, 1)?);
    let mut worst = (0.0f64, 0.0);
    for theta in thetas {
        let th = PumpParameter::new(theta)?;
        let db = photon_distribution_db(p, th, dim - 1)?;
        let pops = steady_state(&MasterEquation::photon_thermal(p, th, dim)?)?.state.rho().populations();
        let d = (0..=10).map(|n| (db[n] - pops[n]).abs()).fold(0.0, f64::max);
        if d > worst.0 {
            worst = (d, theta);
        }
    }
    Ok(below(
        "detailed-balance",
        worst.0,
        DETAILED_BALANCE_TOL,
        format!("max |ΔP_n|, n ≤ 10, worst at Θ̃ = {:.3}", worst.1),
    ))
}

/// Runs the named checks (all of [`CHECKS`] if `names` is `None`).
pub fn validate(p: &SystemParams, names: Option<&[String]>) -> anyhow::Result<Report> {
    let selected: Vec<&str> = match names {
        Some(n) => n.iter().map(String::as_str).filter(|s| !s.is_empty()).collect(),
        None => CHECKS.to_vec(),
    };
    for s in &selected {
        if !CHECKS.contains(s) {
            bail!("unknown check {s:?}; known checks: {}", CHECKS.join(", "));
        }
    }
    p.validate()?;
    let mut report = Report::default();
    for name in CHECKS.iter().filter(|c| selected.contains(c)) {
        let result = match *name {
            "closed-form" => closed_form(p),
            "analytic-me" => analytic_me(p),
            "gain-maps" => gain_maps(p),
            "normalization" => normalization(p),
            _ => detailed_balance(p),
        };
        report.checks.push(result.unwrap_or_else(|e| CheckResult {
            name: name.to_string(),
            pass: false,
            measured: f64::NAN,
            tolerance: f64::NAN,
            detail: format!("error: {e}"),
        }));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_selection_passes_trivially() {
        let r = validate(&SystemParams::default(), Some(&[String::new()])).unwrap();
        assert!(r.checks.is_empty());
        assert!(r.pass());
    }

    #[test]
    fn unknown_check_is_rejected() {
        assert!(validate(&SystemParams::default(), Some(&["bogus".into()])).is_err());
    }

    #[test]
    fn strong_coupling_breaks_closed_form() {
        let p = SystemParams { g_cm: 0.5, ..SystemParams::default() };
        let r = validate(&p, Some(&["closed-form".into()])).unwrap();
        assert!(!r.pass());
        assert!(r.checks[0].measured > 1e-2);
    }

    #[test]
    fn fast_checks_pass_at_defaults() {
        let names: Vec<String> = ["normalization", "gain-maps", "analytic-me"].map(String::from).to_vec();
        let r = validate(&SystemParams::default(), Some(&names)).unwrap();
        assert!(r.pass(), "{r}");
        assert_eq!(r.checks.len(), 3);
    }
}
