//! Closed-form results and derived observables: the coherent phonon
//! amplitude, trapping conditions, the photon-number distribution, intensity
//! correlations and Wigner functions.

use std::f64::consts::{FRAC_2_PI, PI};

use crate::dynamics::{PumpParameter, SystemParams};
use crate::error::{Error, Result};
use crate::gain::gain_coefficients;
use crate::lindblad::ModeState;
use crate::operator::{CMatrix, CVector, DensityMatrix, C64, ZERO};

/// Coherent amplitude `β₁` of the phonon P-function and the thermal
/// occupancy it sits on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpSolution {
    pub beta1: f64,
    pub n_th: f64,
}

/// `β₁(t) = (2λrB/κ_b)(1 − e^{−κ_b t/2})`; `t = None` is the stationary value.
///
/// `β₁` is the magnitude of the mechanical amplitude. The mean `⟨b⟩` itself
/// is `−β₁`, since each atom displaces the mode by `−λ`.
pub fn fp_solution(p: &SystemParams, tau: f64, t: Option<f64>) -> Result<FpSolution> {
    if p.kappa_b <= 0.0 {
        return Err(Error::Divergence(format!("κ_b = {} leaves no steady state", p.kappa_b)));
    }
    let gc = gain_coefficients(p, tau)?;
    let stationary = 2.0 * gc.lambda.abs() * p.r * gc.b_coeff / p.kappa_b;
    let build_up = match t {
        None => 1.0,
        Some(t) if t >= 0.0 && t.is_finite() => -(-0.5 * p.kappa_b * t).exp_m1(),
        Some(t) => return Err(Error::InvalidParameter(format!("time {t}"))),
    };
    Ok(FpSolution { beta1: stationary * build_up, n_th: p.n_th })
}

/// `⟨b†b⟩ = n̄_th + β₁²`, at time `t` or in the steady state.
pub fn phonon_number_analytic(p: &SystemParams, tau: f64, t: Option<f64>) -> Result<f64> {
    let fp = fp_solution(p, tau, t)?;
    Ok(fp.n_th + fp.beta1 * fp.beta1)
}

/// Terms `(c_k, ω_k)` with `Σ c_k sin(ω_k Θ)` the trapping series; summed
/// until the coefficients drop below `1e-16` of the largest.
fn trapping_terms(p: &SystemParams) -> Result<Vec<(f64, f64)>> {
    let wr = p.omega_m * p.r;
    if !(wr > 0.0) {
        return Err(Error::InvalidParameter("trapping needs ω_m r > 0".into()));
    }
    let x = p.alpha.norm_sqr();
    let mut out = Vec::new();
    // |α|^{2k} √k / k!, built in log space
    let mut ln_pow = 0.0;
    let mut biggest = f64::NEG_INFINITY;
    for k in 1.. {
        let kf = k as f64;
        ln_pow += x.ln() - kf.ln();
        let ln_c = ln_pow + 0.5 * kf.ln();
        biggest = biggest.max(ln_c);
        out.push((ln_c, 2.0 * p.g_ac * (kf / wr).sqrt()));
        if kf > x && ln_c < biggest + (1e-16f64).ln() {
            break;
        }
    }
    // rescale by the largest coefficient so tiny |α| stays representable
    Ok(out.into_iter().map(|(l, w)| ((l - biggest).exp(), w)).collect())
}

/// Trapping series `Σ_n |α|^{2(n+1)}√(n+1)/(n+1)! · sin(2g_ac Θ √((n+1)/ω_m r))`,
/// normalized so its largest coefficient is one.
pub fn trapping_series(p: &SystemParams, theta: f64) -> Result<f64> {
    Ok(trapping_terms(p)?.iter().map(|(c, w)| c * (w * theta).sin()).sum())
}

fn trapping_slope(terms: &[(f64, f64)], theta: f64) -> f64 {
    terms.iter().map(|(c, w)| c * w * (w * theta).cos()).sum()
}

/// Pump parameters at which the coherent phonon number is locally minimal.
#[derive(Debug, Clone, PartialEq)]
pub struct TrappingRoots {
    pub thetas: Vec<f64>,
}

pub const ROOT_SCAN_STEP: f64 = 0.05;
pub const ROOT_TOL: f64 = 1e-10;

/// Zeros of [`trapping_series`] in `[lo, hi]` that are minima of `⟨b†b⟩`.
///
/// `d⟨b†b⟩/dΘ` is the series times `B(τ) ≥ 0`, so minima are the zeros where
/// the series turns from negative to positive.
pub fn trapping_roots(p: &SystemParams, lo: f64, hi: f64) -> Result<TrappingRoots> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidParameter(format!("interval [{lo}, {hi}]")));
    }
    let terms = trapping_terms(p)?;
    let f = |th: f64| -> f64 { terms.iter().map(|(c, w)| c * (w * th).sin()).sum() };
    let steps = ((hi - lo) / ROOT_SCAN_STEP).ceil() as usize;
    let grid: Vec<f64> = (0..=steps)
        .map(|k| (lo + k as f64 * ROOT_SCAN_STEP).min(hi))
        .collect();
    let mut thetas = Vec::new();
    for w in grid.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (mut fa, fb) = (f(a), f(b));
        if fa == 0.0 {
            if trapping_slope(&terms, a) > 0.0 && thetas.last() != Some(&a) {
                thetas.push(a);
            }
            continue;
        }
        if fa.signum() == fb.signum() || fb == 0.0 {
            continue;
        }
        while b - a > ROOT_TOL {
            let m = 0.5 * (a + b);
            let fm = f(m);
            if fm == 0.0 {
                a = m;
                b = m;
                break;
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        let root = 0.5 * (a + b);
        if trapping_slope(&terms, root) > 0.0 {
            thetas.push(root);
        }
    }
    // a zero exactly on the last grid point
    if let Some(&last) = grid.last() {
        if f(last) == 0.0 && trapping_slope(&terms, last) > 0.0 && thetas.last() != Some(&last) {
            thetas.push(last);
        }
    }
    Ok(TrappingRoots { thetas })
}

/// `Θ̃ = mπ√(ω_m r/(k+1))/g_ac` for `m = 1..=m_max`: pump parameters at
/// which an atom meeting `k` photons cannot emit.
pub fn photon_trapping_thetas(p: &SystemParams, k: usize, m_max: usize) -> Result<Vec<f64>> {
    let wr = p.omega_m * p.r;
    if !(wr > 0.0) || p.g_ac == 0.0 {
        return Err(Error::InvalidParameter("photon trapping needs ω_m r > 0 and g_ac ≠ 0".into()));
    }
    let unit = PI * (wr / (k as f64 + 1.0)).sqrt() / p.g_ac.abs();
    Ok((1..=m_max).map(|m| m as f64 * unit).collect())
}

/// Largest probability mass allowed beyond `n_max` in [`photon_distribution_db`].
pub const TAIL_TOL: f64 = 1e-10;

/// Emission probability of an excited atom meeting `k − 1` photons.
fn emission_probability(p: &SystemParams, tau: f64, k: usize) -> f64 {
    let g2k = p.g_ac * p.g_ac * k as f64;
    let phi = g2k + (0.5 * p.delta()).powi(2);
    if phi == 0.0 {
        return 0.0;
    }
    g2k * (tau * phi.sqrt()).sin().powi(2) / phi
}

/// Steady photon distribution from detailed balance:
/// `P_k/P_{k−1} = (r p_k + κ_a n̄_th k) / (κ_a (n̄_th+1) k)`, `k = 1..n`.
pub fn photon_distribution_db(p: &SystemParams, theta: PumpParameter, n_max: usize) -> Result<Vec<f64>> {
    if !(p.kappa_a > 0.0) {
        return Err(Error::InvalidParameter(format!("κ_a = {} must be positive", p.kappa_a)));
    }
    let tau = theta.tau(p)?;
    // extend well past n_max to measure the tail
    let reach = 2 * n_max + 200;
    let mut ln_p = Vec::with_capacity(reach + 1);
    ln_p.push(0.0f64);
    for k in 1..=reach {
        let kf = k as f64;
        let up = p.r * emission_probability(p, tau, k) + p.kappa_a * p.n_th * kf;
        let down = p.kappa_a * (p.n_th + 1.0) * kf;
        let prev = ln_p[k - 1];
        ln_p.push(if up == 0.0 { f64::NEG_INFINITY } else { prev + (up / down).ln() });
    }
    let top = ln_p.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = ln_p.iter().map(|l| (l - top).exp()).collect();
    let total: f64 = w.iter().sum();
    let tail: f64 = w[n_max + 1..].iter().sum::<f64>() / total;
    if tail > TAIL_TOL || w[reach] / total > f64::EPSILON {
        return Err(Error::Truncation(format!(
            "photon distribution holds {tail:.2e} beyond n = {n_max}"
        )));
    }
    let head: f64 = w[..=n_max].iter().sum();
    Ok(w[..=n_max].iter().map(|x| x / head).collect())
}

/// `g²(0)` of a displaced thermal state,
/// `(2n̄² + 4β₁²n̄ + β₁⁴)/(n̄² + 2β₁²n̄ + β₁⁴)`.
pub fn g2_phonon_analytic(p: &SystemParams, tau: f64, t: Option<f64>) -> Result<f64> {
    let fp = fp_solution(p, tau, t)?;
    g2_displaced_thermal(fp.beta1, fp.n_th)
}

fn g2_displaced_thermal(beta: f64, nbar: f64) -> Result<f64> {
    let b2 = beta * beta;
    let num = 2.0 * nbar * nbar + 4.0 * b2 * nbar + b2 * b2;
    let den = nbar * nbar + 2.0 * b2 * nbar + b2 * b2;
    if den == 0.0 {
        return Err(Error::UndefinedStatistics("vacuum has no intensity correlation".into()));
    }
    Ok(num / den)
}

/// Occupation below which `g²(0)` is reported as undefined.
pub const G2_MIN_OCCUPATION: f64 = 1e-12;

/// `⟨b†b†bb⟩/⟨b†b⟩²` of a single-mode state.
pub fn g2_numeric(state: &ModeState) -> Result<f64> {
    let n = state.mean_number();
    if !(n > G2_MIN_OCCUPATION) {
        return Err(Error::UndefinedStatistics(format!("⟨n⟩ = {n:.3e}")));
    }
    Ok(state.second_factorial_moment() / (n * n))
}

/// Rectangular phase-space grid, `β = x + ip`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid {
    pub xs: Vec<f64>,
    pub ps: Vec<f64>,
}

impl WignerGrid {
    pub fn new(x_range: (f64, f64), p_range: (f64, f64), nx: usize, np: usize) -> Result<Self> {
        let axis = |(a, b): (f64, f64), n: usize| -> Result<Vec<f64>> {
            if !(a.is_finite() && b.is_finite()) || n == 0 || (n > 1 && !(a < b)) {
                return Err(Error::InvalidParameter(format!("grid axis [{a}, {b}] with {n} points")));
            }
            if n == 1 {
                return Ok(vec![a]);
            }
            Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect())
        };
        Ok(Self { xs: axis(x_range, nx)?, ps: axis(p_range, np)? })
    }

    /// 101 × 101 points centred on `centre`, half-width 4.
    pub fn around(centre: C64) -> Self {
        Self::new((centre.re - 4.0, centre.re + 4.0), (centre.im - 4.0, centre.im + 4.0), 101, 101)
            .expect("finite centre")
    }
}

impl Default for WignerGrid {
    fn default() -> Self {
        Self::around(ZERO)
    }
}

/// Wigner function sampled on a grid; `values[j * xs.len() + i]` is at `(xs[i], ps[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerField {
    pub grid: WignerGrid,
    pub values: Vec<f64>,
}

impl WignerField {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.grid.xs.len() + i]
    }

    /// Grid point of the largest value.
    pub fn peak(&self) -> (C64, f64) {
        let nx = self.grid.xs.len();
        let (k, v) = self
            .values
            .iter()
            .cloned()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, v)| if v > best.1 { (k, v) } else { best });
        (C64::new(self.grid.xs[k % nx], self.grid.ps[k / nx]), v)
    }

    /// Riemann sum over the grid.
    pub fn integral(&self) -> f64 {
        let step = |v: &[f64]| if v.len() > 1 { v[1] - v[0] } else { 1.0 };
        self.values.iter().sum::<f64>() * step(&self.grid.xs) * step(&self.grid.ps)
    }
}

/// `W(β) = (2/π) Tr[ρ D(β) P D(β)†]` with the parity `P = (−1)^{a†a}`.
///
/// Uses `D(β)PD(β)† = D(2β)P` and exact matrix elements of `D(2β)` on the
/// occupied levels, so no truncation enters beyond that of `ρ` itself.
pub fn wigner(rho: &DensityMatrix, grid: &WignerGrid) -> Result<WignerField> {
    if rho.dims().len() != 1 {
        return Err(Error::DimensionMismatch("single-mode state expected".into()));
    }
    Ok(wigner_shifted(rho.matrix(), ZERO, grid))
}

/// Wigner function of a state stored in a displaced frame.
pub fn wigner_mode(state: &ModeState, grid: &WignerGrid) -> Result<WignerField> {
    Ok(wigner_shifted(state.rho().matrix(), state.shift(), grid))
}

fn wigner_shifted(rho: &CMatrix, shift: C64, grid: &WignerGrid) -> WignerField {
    let n = rho.nrows();
    let mut values = Vec::with_capacity(grid.xs.len() * grid.ps.len());
    let mut cols = vec![CVector::zeros(n); n];
    for &p in &grid.ps {
        for &x in &grid.xs {
            let gamma = (C64::new(x, p) - shift) * 2.0;
            displacement_columns(gamma, &mut cols);
            let mut acc = ZERO;
            for (m, col) in cols.iter().enumerate() {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let mut s = ZERO;
                for k in 0..n {
                    s += rho[(m, k)] * col[k];
                }
                acc += s * sign;
            }
            values.push(FRAC_2_PI * acc.re);
        }
    }
    WignerField { grid: grid.clone(), values }
}

/// `cols[m][k] = ⟨k|D(γ)|m⟩` from `D(γ)|m⟩ = (a† − γ*)^m |γ⟩ / √m!`.
fn displacement_columns(gamma: C64, cols: &mut [CVector]) {
    let n = cols.len();
    let mut c = C64::from((-0.5 * gamma.norm_sqr()).exp());
    for (k, x) in cols[0].iter_mut().enumerate() {
        *x = c;
        c *= gamma / ((k + 1) as f64).sqrt();
    }
    for m in 1..n {
        let sm = (m as f64).sqrt();
        for k in 0..n {
            let up = if k > 0 { cols[m - 1][k - 1] * (k as f64).sqrt() } else { ZERO };
            cols[m][k] = (up - gamma.conj() * cols[m - 1][k]) / sm;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::displacement;
    use crate::lindblad::{steady_state, MasterEquation};
    use crate::operator::{coherent_state, fock_state, thermal_state, FockOperator};

    fn tau_of(p: &SystemParams, theta: f64) -> f64 {
        PumpParameter::new(theta).unwrap().tau(p).unwrap()
    }

    #[test]
    fn fp_amplitude_limits() {
        let p = SystemParams::default();
        assert_eq!(phonon_number_analytic(&p, 0.0, None).unwrap(), p.n_th);
        let tau = tau_of(&p, 5.0);
        let fin = fp_solution(&p, tau, Some(0.0)).unwrap();
        assert_eq!(fin.beta1, 0.0);
        let late = fp_solution(&p, tau, Some(2000.0)).unwrap();
        let inf = fp_solution(&p, tau, None).unwrap();
        assert!((late.beta1 - inf.beta1).abs() < 1e-12 * inf.beta1);
        assert!(inf.beta1 > 0.0);
        let mut q = p;
        q.kappa_b = 0.0;
        assert!(matches!(phonon_number_analytic(&q, tau, None), Err(Error::Divergence(_))));
    }

    #[test]
    fn trapping_roots_at_reference_parameters() {
        let p = SystemParams::default();
        let roots = trapping_roots(&p, 1.0, 30.0).unwrap().thetas;
        let want = [9.32, 18.81, 28.01];
        assert_eq!(roots.len(), 3, "{roots:?}");
        for (r, w) in roots.iter().zip(want) {
            assert!((r - w).abs() < 0.02, "{r} vs {w}");
        }
    }

    #[test]
    fn trapping_roots_are_minima_and_zeros() {
        let p = SystemParams::default();
        for th in trapping_roots(&p, 1.0, 30.0).unwrap().thetas {
            assert!(trapping_series(&p, th).unwrap().abs() < 1e-9);
            let n = |t: f64| phonon_number_analytic(&p, tau_of(&p, t), None).unwrap();
            assert!(n(th - 1e-3) > n(th) && n(th + 1e-3) > n(th), "{th}");
        }
    }

    #[test]
    fn weak_field_roots_approach_single_term_values() {
        let mut p = SystemParams::default();
        p.alpha = C64::from(1e-4);
        let roots = trapping_roots(&p, 1.0, 30.0).unwrap().thetas;
        let single = photon_trapping_thetas(&p, 0, 3).unwrap();
        for (r, s) in roots.iter().zip(&single) {
            assert!((r - s).abs() / s < 1e-6, "{r} vs {s}");
        }
        assert_eq!(roots.len(), 3);
    }

    #[test]
    fn doubling_coupling_halves_roots() {
        let p = SystemParams::default();
        let mut q = p;
        q.g_ac *= 2.0;
        let a = trapping_roots(&p, 1.0, 30.0).unwrap().thetas;
        let b = trapping_roots(&q, 0.5, 15.0).unwrap().thetas;
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x / 2.0 - y).abs() < 1e-9);
        }
    }

    #[test]
    fn empty_root_interval_and_bad_interval() {
        let p = SystemParams::default();
        assert!(trapping_roots(&p, 1.0, 2.0).unwrap().thetas.is_empty());
        assert!(trapping_roots(&p, 2.0, 1.0).is_err());
        assert!(trapping_roots(&p, 0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn photon_trapping_values() {
        let p = SystemParams::default();
        let t = photon_trapping_thetas(&p, 0, 3).unwrap();
        for (x, w) in t.iter().zip([9.36, 18.73, 28.09]) {
            assert!((x - w).abs() < 0.01);
        }
        let k1 = photon_trapping_thetas(&p, 1, 1).unwrap()[0];
        assert!((k1 - PI * 40f64.sqrt() / 3.0).abs() < 1e-12);
        assert!((k1 - 6.62).abs() < 0.01);
        assert!(photon_trapping_thetas(&p, 0, 0).unwrap().is_empty());
    }

    #[test]
    fn detailed_balance_limits() {
        let p = SystemParams::default();
        let t1 = photon_trapping_thetas(&p, 0, 1).unwrap()[0];
        let trapped = photon_distribution_db(&p, PumpParameter::new(t1).unwrap(), 20).unwrap();
        // sin(π) is zero only to rounding
        assert!((trapped[0] - 1.0).abs() < 1e-15);
        assert!(trapped[1..].iter().all(|&x| x < 1e-25));
        let off = photon_distribution_db(&p, PumpParameter::new(0.0).unwrap(), 20).unwrap();
        assert_eq!(off[0], 1.0);
        let mut q = p;
        q.kappa_a = 0.0;
        assert!(photon_distribution_db(&q, PumpParameter::new(3.0).unwrap(), 20).is_err());
        // a strongly pumped field does not fit in five levels
        let err = photon_distribution_db(&p, PumpParameter::new(4.0).unwrap(), 5);
        assert!(matches!(err, Err(Error::Truncation(_))));
    }

    #[test]
    fn detailed_balance_matches_birth_death_steady_state() {
        let mut p = SystemParams::default().with_delta(0.5);
        p.n_th = 0.2;
        let theta = PumpParameter::new(4.0).unwrap();
        let db = photon_distribution_db(&p, theta, 70).unwrap();
        let me = MasterEquation::photon_thermal(&p, theta, 90).unwrap();
        let pops = steady_state(&me).unwrap().state.rho().populations();
        for n in 0..=70 {
            assert!((db[n] - pops[n]).abs() < 1e-10, "n = {n}");
        }
    }

    #[test]
    fn g2_limits() {
        let mut p = SystemParams::default();
        p.g_cm = 0.0;
        p.n_th = 0.3;
        assert!((g2_phonon_analytic(&p, 1.0, None).unwrap() - 2.0).abs() < 1e-15);
        let q = SystemParams::default();
        let tau = tau_of(&q, 5.0);
        assert!((g2_phonon_analytic(&q, tau, None).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(g2_phonon_analytic(&q, 0.0, None), Err(Error::UndefinedStatistics(_))));
    }

    #[test]
    fn g2_numeric_reference_states() {
        let m = |rho: DensityMatrix| ModeState::new(rho, ZERO).unwrap();
        assert_eq!(g2_numeric(&m(fock_state(6, 1).unwrap())).unwrap(), 0.0);
        let coh = g2_numeric(&m(coherent_state(40, C64::new(1.2, 0.5)).unwrap())).unwrap();
        assert!((coh - 1.0).abs() < 1e-10);
        let th = g2_numeric(&m(thermal_state(80, 0.5).unwrap())).unwrap();
        assert!((th - 2.0).abs() < 1e-10);
        assert!(matches!(g2_numeric(&m(fock_state(6, 0).unwrap())), Err(Error::UndefinedStatistics(_))));
        // a displaced frame vacuum is a coherent state
        let shifted = ModeState::new(fock_state(6, 0).unwrap(), C64::from(0.8)).unwrap();
        assert!((g2_numeric(&shifted).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn thermal_phonon_steady_state_has_thermal_statistics() {
        let mut p = SystemParams::default();
        p.g_cm = 0.0;
        p.n_th = 0.01;
        let me = MasterEquation::phonon_thermal(&p, tau_of(&p, 10.0), 16).unwrap();
        let g2 = g2_numeric(&steady_state(&me).unwrap().state).unwrap();
        assert!((g2 - 2.0).abs() < 1e-6, "{g2}");
    }

    #[test]
    fn wigner_reference_values() {
        let origin = WignerGrid::new((0.0, 0.0), (0.0, 0.0), 1, 1).unwrap();
        let vac = wigner(&fock_state(10, 0).unwrap(), &origin).unwrap();
        assert!((vac.values[0] - FRAC_2_PI).abs() < 1e-15);
        let one = wigner(&fock_state(10, 1).unwrap(), &origin).unwrap();
        assert!((one.values[0] + FRAC_2_PI).abs() < 1e-15);
    }

    #[test]
    fn wigner_matches_parity_of_displaced_state() {
        // brute force: displace in a large space, read the parity
        let rho = thermal_state(8, 0.4).unwrap();
        let big = 60;
        let mut embedded = CMatrix::zeros(big, big);
        embedded.view_mut((0, 0), (8, 8)).copy_from(rho.matrix());
        let parity = CMatrix::from_diagonal(&CVector::from_fn(big, |k, _| {
            C64::from(if k % 2 == 0 { 1.0 } else { -1.0 })
        }));
        let grid = WignerGrid::new((-1.5, 1.0), (-0.5, 1.2), 4, 3).unwrap();
        let w = wigner(&rho, &grid).unwrap();
        for (j, &p) in grid.ps.iter().enumerate() {
            for (i, &x) in grid.xs.iter().enumerate() {
                let d = displacement(big, C64::new(x, p)).unwrap().into_matrix();
                let op = &d * &parity * d.adjoint();
                let want = FRAC_2_PI * (&embedded * op).trace().re;
                assert!((w.at(i, j) - want).abs() < 1e-12, "({x}, {p})");
            }
        }
    }

    #[test]
    fn wigner_normalization_bounds_and_peak() {
        let beta = C64::new(1.1, -0.6);
        let rho = coherent_state(30, beta).unwrap();
        let w = wigner(&rho, &WignerGrid::default()).unwrap();
        assert!((w.integral() - 1.0).abs() < 1e-2);
        assert!(w.values.iter().all(|v| v.abs() <= FRAC_2_PI + 1e-12));
        let (at, _) = w.peak();
        assert!((at - beta).norm() < 0.06);

        let framed = ModeState::new(fock_state(4, 0).unwrap(), beta).unwrap();
        let wf = wigner_mode(&framed, &WignerGrid::default()).unwrap();
        let diff = w.values.iter().zip(&wf.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-12);

        let f = FockOperator::new(vec![3, 2], CMatrix::identity(6, 6) / C64::from(6.0)).unwrap();
        assert!(wigner(&DensityMatrix::new(f).unwrap(), &WignerGrid::default()).is_err());
    }
}
