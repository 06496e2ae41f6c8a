//! Master equations for one bosonic mode driven by the atomic gain map and
//! damped by a thermal or squeezed reservoir.
//!
//! A master equation may be written in a displaced frame: the state is stored
//! as `ρ' = D(s)† ρ D(s)`, so the mode operator becomes `b + s`. The gain maps
//! used here commute with displacements, so only the dissipators change.
//! Choosing `s` at the stationary mean amplitude keeps `ρ'` close to the
//! vacuum and lets a small truncation describe large coherent amplitudes.

use log::debug;

use crate::dynamics::{PumpParameter, SystemParams};
use crate::error::{Error, Result};
use crate::gain::{cavity_kraus, gain_coefficients, phonon_kraus, KrausMap};
use crate::operator::{
    destroy, expm, trace_product, CMatrix, CVector, DensityMatrix, FockOperator, C64, ONE, ZERO,
};

/// Largest admissible `‖dρ/dt‖` at a reported steady state.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Relative size below which a generator direction counts as null.
pub const NULL_TOL: f64 = 1e-11;
/// Local error tolerance of the adaptive integrator.
pub const STEP_TOL: f64 = 1e-10;

/// Ladder operator slot of a dissipator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Lower,
    Raise,
}

/// `rate · (2XρY − YXρ − ρYX)`.
///
/// `(Lower, Raise)` is the usual damping `L[b]`, `(Raise, Lower)` is `L[b†]`,
/// and the equal pairs carry the two-phonon correlations of a squeezed bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DissipatorTerm {
    pub rate: C64,
    pub x: Ladder,
    pub y: Ladder,
}

impl DissipatorTerm {
    pub fn new(rate: C64, x: Ladder, y: Ladder) -> Self {
        Self { rate, x, y }
    }

    fn is_number_conserving(&self) -> bool {
        self.x != self.y
    }
}

/// Reservoir moments `N = sinh²ξ`, `M = −e^{iφ} sinh ξ cosh ξ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedBath {
    pub n_sq: f64,
    pub m_sq: C64,
}

impl SqueezedBath {
    pub fn new(xi: f64, phi: f64) -> Self {
        let (s, c) = (xi.sinh(), xi.cosh());
        Self { n_sq: s * s, m_sq: -C64::from_polar(1.0, phi) * (s * c) }
    }
}

#[derive(Debug, Clone)]
struct BuiltTerm {
    rate: C64,
    x: CMatrix,
    y: CMatrix,
    yx: CMatrix,
}

/// `dρ/dt = r(M − 1)ρ + Σ dissipators`, on a single mode of `dim` levels.
#[derive(Debug, Clone)]
pub struct MasterEquation {
    pump_rate: f64,
    gain: KrausMap,
    terms: Vec<DissipatorTerm>,
    shift: C64,
    built: Vec<BuiltTerm>,
}

impl MasterEquation {
    pub fn new(gain: KrausMap, pump_rate: f64, terms: Vec<DissipatorTerm>) -> Result<Self> {
        if gain.dims().len() != 1 {
            return Err(Error::DimensionMismatch("single-mode gain map expected".into()));
        }
        if !(pump_rate >= 0.0 && pump_rate.is_finite()) {
            return Err(Error::InvalidParameter(format!("pump rate {pump_rate}")));
        }
        for t in &terms {
            let ok = t.rate.re.is_finite()
                && t.rate.im.is_finite()
                && (!t.is_number_conserving() || (t.rate.re >= 0.0 && t.rate.im == 0.0));
            if !ok {
                return Err(Error::InvalidParameter(format!("dissipator rate {}", t.rate)));
            }
        }
        let mut me = Self { pump_rate, gain, terms, shift: ZERO, built: Vec::new() };
        me.build()?;
        Ok(me)
    }

    /// Phonon mode pumped by ground-state atoms, thermal reservoir. The frame
    /// is centred on the stationary amplitude.
    pub fn phonon_thermal(p: &SystemParams, tau: f64, dim: usize) -> Result<Self> {
        p.validate()?;
        let k = p.kappa_b / 2.0;
        let terms = vec![
            DissipatorTerm::new(C64::from(k * (p.n_th + 1.0)), Ladder::Lower, Ladder::Raise),
            DissipatorTerm::new(C64::from(k * p.n_th), Ladder::Raise, Ladder::Lower),
        ];
        let me = Self::new(phonon_kraus(p, tau, dim)?, p.r, terms)?;
        me.with_shift(stationary_amplitude(p, tau)?)
    }

    /// Phonon mode with a squeezed vacuum reservoir; `n_th` plays no role.
    pub fn phonon_squeezed(p: &SystemParams, tau: f64, dim: usize) -> Result<Self> {
        p.validate()?;
        let bath = SqueezedBath::new(p.xi, p.phi);
        let k = p.kappa_b / 2.0;
        let terms = vec![
            DissipatorTerm::new(C64::from(k * (bath.n_sq + 1.0)), Ladder::Lower, Ladder::Raise),
            DissipatorTerm::new(C64::from(k * bath.n_sq), Ladder::Raise, Ladder::Lower),
            DissipatorTerm::new(bath.m_sq * k, Ladder::Raise, Ladder::Raise),
            DissipatorTerm::new(bath.m_sq.conj() * k, Ladder::Lower, Ladder::Lower),
        ];
        let me = Self::new(phonon_kraus(p, tau, dim)?, p.r, terms)?;
        me.with_shift(stationary_amplitude(p, tau)?)
    }

    /// Cavity mode pumped by excited atoms, thermal reservoir.
    pub fn photon_thermal(p: &SystemParams, theta: PumpParameter, dim: usize) -> Result<Self> {
        p.validate()?;
        let k = p.kappa_a / 2.0;
        let terms = vec![
            DissipatorTerm::new(C64::from(k * (p.n_th + 1.0)), Ladder::Lower, Ladder::Raise),
            DissipatorTerm::new(C64::from(k * p.n_th), Ladder::Raise, Ladder::Lower),
        ];
        // without atoms the transit time is undefined and irrelevant
        let tau = if p.r == 0.0 { 0.0 } else { theta.tau(p)? };
        Self::new(cavity_kraus(p, tau, dim)?, p.r, terms)
    }

    /// Same equation written in the frame displaced by `shift`.
    pub fn with_shift(mut self, shift: C64) -> Result<Self> {
        if !(shift.re.is_finite() && shift.im.is_finite()) {
            return Err(Error::InvalidParameter(format!("frame shift {shift}")));
        }
        self.shift = shift;
        self.build()?;
        Ok(self)
    }

    fn build(&mut self) -> Result<()> {
        let lower = self.mode_operator()?;
        let raise = lower.adjoint();
        let pick = |l: Ladder| match l {
            Ladder::Lower => lower.clone(),
            Ladder::Raise => raise.clone(),
        };
        self.built = self
            .terms
            .iter()
            .map(|t| {
                let (x, y) = (pick(t.x), pick(t.y));
                let yx = &y * &x;
                BuiltTerm { rate: t.rate, x, y, yx }
            })
            .collect();
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.gain.dim()
    }

    pub fn shift(&self) -> C64 {
        self.shift
    }

    pub fn pump_rate(&self) -> f64 {
        self.pump_rate
    }

    pub fn gain(&self) -> &KrausMap {
        &self.gain
    }

    pub fn terms(&self) -> &[DissipatorTerm] {
        &self.terms
    }

    /// `b + s` on the truncated space.
    pub fn mode_operator(&self) -> Result<CMatrix> {
        let n = self.dim();
        Ok(destroy(n)?.into_matrix() + CMatrix::identity(n, n) * self.shift)
    }

    /// Sum of all rate magnitudes, the natural size of the generator.
    pub fn rate_scale(&self) -> f64 {
        self.pump_rate + self.terms.iter().map(|t| t.rate.norm()).sum::<f64>()
    }

    pub fn rhs(&self, rho: &CMatrix) -> CMatrix {
        let mut out = (self.gain.apply_matrix(rho) - rho) * C64::from(self.pump_rate);
        for t in &self.built {
            let jump = &t.x * rho * &t.y * C64::from(2.0);
            out += (jump - &t.yx * rho - rho * &t.yx) * t.rate;
        }
        out
    }

    /// Generator on column-stacked states, `vec(AXB) = (Bᵀ ⊗ A) vec X`.
    pub fn generator(&self) -> CMatrix {
        let n = self.dim();
        let id = CMatrix::identity(n, n);
        let id2 = CMatrix::identity(n * n, n * n);
        let mut g = (self.gain.superoperator() - id2) * C64::from(self.pump_rate);
        for t in &self.built {
            let term = t.y.transpose().kronecker(&t.x) * C64::from(2.0)
                - id.kronecker(&t.yx)
                - t.yx.transpose().kronecker(&id);
            g += term * t.rate;
        }
        g
    }

    /// True when populations and coherences evolve independently: every
    /// dissipator conserves excitation number, the frame is undisplaced, and
    /// each Kraus operator shifts Fock levels by a fixed amount.
    pub fn is_phase_covariant(&self) -> bool {
        if self.shift != ZERO || !self.terms.iter().all(|t| t.is_number_conserving()) {
            return false;
        }
        self.gain.ops().iter().all(|k| {
            let mut offset = None;
            for j in 0..k.ncols() {
                for i in 0..k.nrows() {
                    if k[(i, j)] != ZERO {
                        let d = i as isize - j as isize;
                        if *offset.get_or_insert(d) != d {
                            return false;
                        }
                    }
                }
            }
            true
        })
    }

    /// Rate matrix of the populations, valid when [`is_phase_covariant`](Self::is_phase_covariant).
    pub fn population_generator(&self) -> CMatrix {
        let n = self.dim();
        let mut g = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = CMatrix::zeros(n, n);
            e[(j, j)] = ONE;
            let d = self.rhs(&e);
            for i in 0..n {
                g[(i, j)] = d[(i, i)];
            }
        }
        g
    }
}

/// Stationary `⟨b⟩` of the phonon equations: each atom kicks the mode by
/// `−λ` with probability `B`, the reservoir damps it at `κ_b/2`.
fn stationary_amplitude(p: &SystemParams, tau: f64) -> Result<C64> {
    if p.kappa_b == 0.0 {
        return Ok(ZERO);
    }
    let gc = gain_coefficients(p, tau)?;
    Ok(C64::from(-2.0 * gc.lambda * p.r * gc.b_coeff / p.kappa_b))
}

/// A single-mode state in a displaced frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeState {
    rho: DensityMatrix,
    shift: C64,
}

impl ModeState {
    pub fn new(rho: DensityMatrix, shift: C64) -> Result<Self> {
        if rho.dims().len() != 1 {
            return Err(Error::DimensionMismatch("single-mode state expected".into()));
        }
        Ok(Self { rho, shift })
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn shift(&self) -> C64 {
        self.shift
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    /// `b + s` on the truncated space.
    pub fn mode_operator(&self) -> CMatrix {
        let n = self.dim();
        let mut b = CMatrix::zeros(n, n);
        for k in 1..n {
            b[(k - 1, k)] = C64::from((k as f64).sqrt());
        }
        b + CMatrix::identity(n, n) * self.shift
    }

    /// `⟨b⟩`
    pub fn amplitude(&self) -> C64 {
        self.rho.expect(&self.mode_operator())
    }

    /// `⟨b†b⟩`
    pub fn mean_number(&self) -> f64 {
        let b = self.mode_operator();
        self.rho.expect(&(b.adjoint() * b)).re
    }

    /// `⟨b†b†bb⟩`
    pub fn second_factorial_moment(&self) -> f64 {
        let b = self.mode_operator();
        let bb = &b * &b;
        self.rho.expect(&(bb.adjoint() * bb)).re
    }
}

/// How a steady state was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteadyMethod {
    DirectSolve,
    TimeMarch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub state: ModeState,
    /// Frobenius norm of `dρ/dt` at the returned state.
    pub residual: f64,
    pub method: SteadyMethod,
}

/// Generator restricted to the sector that holds the steady state.
struct Sector {
    g: CMatrix,
    trace_fn: CVector,
    populations: bool,
    n: usize,
}

impl Sector {
    fn of(me: &MasterEquation) -> Self {
        let n = me.dim();
        if me.is_phase_covariant() {
            Self { g: me.population_generator(), trace_fn: CVector::from_element(n, ONE), populations: true, n }
        } else {
            let id = CMatrix::identity(n, n);
            let trace_fn = CVector::from_column_slice(id.as_slice());
            Self { g: me.generator(), trace_fn, populations: false, n }
        }
    }

    fn start(&self) -> CVector {
        let mut x = CVector::zeros(self.g.nrows());
        x[0] = ONE;
        x
    }

    fn to_state(&self, x: &CVector, shift: C64) -> Result<ModeState> {
        let m = if self.populations {
            CMatrix::from_diagonal(x)
        } else {
            CMatrix::from_column_slice(self.n, self.n, x.as_slice())
        };
        let rho = DensityMatrix::from_matrix_normalized(vec![self.n], m)?;
        ModeState::new(rho, shift)
    }
}

fn finish(me: &MasterEquation, state: ModeState, method: SteadyMethod) -> Result<SteadyState> {
    let residual = me.rhs(state.rho.matrix()).norm();
    if !(residual < RESIDUAL_TOL) {
        return Err(Error::NonConvergence(format!(
            "steady-state residual {residual:.3e} ({method:?})"
        )));
    }
    Ok(SteadyState { state, residual, method })
}

/// Steady state by the null-space solve, falling back to time marching if
/// the solve fails to converge. Degenerate steady states are an error.
pub fn steady_state(me: &MasterEquation) -> Result<SteadyState> {
    match steady_state_direct(me) {
        Err(Error::NonConvergence(why)) | Err(Error::InvalidState(why)) => {
            debug!("direct steady-state solve failed ({why}); time marching");
            steady_state_time_march(me)
        }
        other => other,
    }
}

/// Null vector of the generator by shifted inverse iteration.
pub fn steady_state_direct(me: &MasterEquation) -> Result<SteadyState> {
    let sector = Sector::of(me);
    let x = null_vector(&sector.g, &sector.trace_fn, sector.start(), me.rate_scale())?;
    finish(me, sector.to_state(&x, me.shift)?, SteadyMethod::DirectSolve)
}

/// Steady state as the long-time limit of `exp(G t)` applied to the frame
/// vacuum, with `t` doubled by repeated squaring.
pub fn steady_state_time_march(me: &MasterEquation) -> Result<SteadyState> {
    const MAX_DOUBLINGS: usize = 48;
    let sector = Sector::of(me);
    let n = sector.g.nrows();
    let mut q = expm(&FockOperator::new(vec![n], sector.g.clone())?)?.into_matrix();
    let mut x = sector.start();
    for k in 0..MAX_DOUBLINGS {
        let next = &q * &x;
        let tr = sector.trace_fn.dotc(&next);
        let next = next / tr;
        let change = (&next - &x).camax();
        x = next;
        if change < 1e-14 && k > 0 {
            return finish(me, sector.to_state(&x, me.shift)?, SteadyMethod::TimeMarch);
        }
        q = &q * &q;
    }
    Err(Error::NonConvergence("time march did not settle".into()))
}

/// Right null vector of `g`, given its left null vector `trace_fn`.
///
/// A second null direction is searched for after deflating the first with
/// the oblique projector `1 − x t†/(t†x)`; finding one makes the steady state
/// ambiguous.
fn null_vector(g: &CMatrix, trace_fn: &CVector, start: CVector, scale: f64) -> Result<CVector> {
    let n = g.nrows();
    let norm = g.norm();
    if norm <= NULL_TOL * scale {
        return if n == 1 { Ok(start) } else { Err(Error::AmbiguousSteadyState(n)) };
    }
    let mut sigma = 1e-13 * norm;
    let lu = loop {
        let lu = (g - CMatrix::identity(n, n) * C64::from(sigma)).lu();
        if lu.is_invertible() {
            break lu;
        }
        sigma *= 100.0;
        if sigma > 1e-6 * norm {
            return Err(Error::NonConvergence("shifted generator is singular".into()));
        }
    };
    let solve = |v: &CVector| -> Result<CVector> {
        let y = lu
            .solve(v)
            .ok_or_else(|| Error::NonConvergence("LU solve".into()))?;
        let s = y.norm();
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::NonConvergence("inverse iteration".into()));
        }
        Ok(y / C64::from(s))
    };

    let mut x = start;
    for _ in 0..3 {
        x = solve(&x)?;
    }

    let tx = trace_fn.dotc(&x);
    if tx.norm() < 1e-12 {
        return Err(Error::NonConvergence("null vector has zero trace".into()));
    }
    x /= tx;
    // t†x = 1 from here on
    let deflate = |y: CVector| -> CVector {
        let c = trace_fn.dotc(&y);
        y - &x * c
    };
    let mut y = deflate(CVector::from_fn(n, |k, _| {
        C64::new((0.7 + 1.3 * k as f64).sin(), (0.4 + 0.9 * k as f64).cos())
    }));
    for _ in 0..3 {
        y = deflate(solve(&y)?);
        let s = y.norm();
        if s == 0.0 {
            return Ok(x);
        }
        y /= C64::from(s);
    }
    if (g * &y).norm() < NULL_TOL * norm {
        let sv = g.clone().singular_values();
        let count = sv.iter().filter(|&&s| s < NULL_TOL * norm).count().max(2);
        return Err(Error::AmbiguousSteadyState(count));
    }
    Ok(x)
}

/// Observable evaluated on the frame density matrix during time evolution.
pub type Observable<'a> = &'a (dyn Fn(&CMatrix) -> f64 + Sync);

/// Sampled trajectory of [`evolve_me`].
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `values[i][k]` is observable `k` at `times[i]`.
    pub values: Vec<Vec<f64>>,
    pub final_rho: CMatrix,
    /// Largest `|Tr ρ − 1|` seen at the sample times.
    pub max_trace_defect: f64,
}

/// Integrates the master equation from `rho0` (in the equation's frame) with
/// an adaptive Dormand–Prince 5(4) scheme, sampling `observables` at each of
/// the ascending `sample_times`.
pub fn evolve_me(
    me: &MasterEquation,
    rho0: &CMatrix,
    sample_times: &[f64],
    observables: &[Observable<'_>],
) -> Result<Trajectory> {
    if rho0.nrows() != me.dim() || rho0.ncols() != me.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{}×{} state for a {}-level equation",
            rho0.nrows(),
            rho0.ncols(),
            me.dim()
        )));
    }
    if sample_times.iter().any(|t| !(t.is_finite() && *t >= 0.0))
        || sample_times.windows(2).any(|w| w[1] < w[0])
    {
        return Err(Error::InvalidParameter("sample times must be finite, ≥ 0 and ascending".into()));
    }
    let mut values = Vec::with_capacity(sample_times.len());
    let mut max_defect = 0.0f64;
    let mut record = |rho: &CMatrix| {
        max_defect = max_defect.max((rho.trace() - ONE).norm());
        values.push(observables.iter().map(|f| f(rho)).collect::<Vec<_>>());
    };

    let mut y = rho0.clone();
    let mut t = 0.0;
    let mut h = initial_step(me, &y);
    for &target in sample_times {
        while t < target {
            let span = target - t;
            let trial = h.min(span);
            let (next, err) = dopri_step(me, &y, trial);
            if err <= 1.0 {
                t = if trial == span { target } else { t + trial };
                y = next;
            }
            let factor = if err == 0.0 {
                5.0
            } else if err.is_finite() {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            } else {
                0.2
            };
            if err <= 1.0 && trial < h {
                // a clipped step says nothing about the natural step size
                h = h.max(trial * factor);
            } else {
                h = trial * factor;
            }
            if h < 1e-14 * t.max(1.0) {
                return Err(Error::Stiffness(t));
            }
        }
        record(&y);
    }
    Ok(Trajectory {
        times: sample_times.to_vec(),
        values,
        final_rho: y,
        max_trace_defect: max_defect,
    })
}

fn initial_step(me: &MasterEquation, y: &CMatrix) -> f64 {
    let f = me.rhs(y).amax_norm();
    if f > 0.0 { (1e-3 / f).min(0.1) } else { 0.1 }
}

trait AmaxNorm {
    fn amax_norm(&self) -> f64;
}

impl AmaxNorm for CMatrix {
    fn amax_norm(&self) -> f64 {
        self.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One Dormand–Prince step; returns the new state and the scaled error.
fn dopri_step(me: &MasterEquation, y: &CMatrix, h: f64) -> (CMatrix, f64) {
    let mut k: Vec<CMatrix> = Vec::with_capacity(7);
    k.push(me.rhs(y));
    for row in A.iter() {
        let mut yi = y.clone();
        for (j, a) in row.iter().enumerate().take(k.len()) {
            if *a != 0.0 {
                yi += &k[j] * C64::from(h * a);
            }
        }
        if k.len() == 6 {
            // the last row gives the fifth-order solution itself
            let f = me.rhs(&yi);
            k.push(f);
            let mut err = CMatrix::zeros(y.nrows(), y.ncols());
            for (kj, e) in k.iter().zip(E.iter()) {
                if *e != 0.0 {
                    err += kj * C64::from(h * e);
                }
            }
            let scale = y.amax_norm().max(yi.amax_norm());
            let tol = STEP_TOL * (1.0 + scale);
            return (yi, err.amax_norm() / tol);
        }
        k.push(me.rhs(&yi));
    }
    unreachable!("tableau has six rows")
}

fn require_single(rho: &DensityMatrix) -> Result<()> {
    if rho.dims().len() == 1 {
        Ok(())
    } else {
        Err(Error::DimensionMismatch("single-mode state expected".into()))
    }
}

/// `dρ/dt` of the thermal phonon equation, in the undisplaced frame.
pub fn rhs_phonon_thermal(rho: &DensityMatrix, p: &SystemParams, tau: f64) -> Result<CMatrix> {
    require_single(rho)?;
    let me = MasterEquation::phonon_thermal(p, tau, rho.dim())?.with_shift(ZERO)?;
    Ok(me.rhs(rho.matrix()))
}

/// `dρ/dt` of the thermal photon equation.
pub fn rhs_photon_thermal(rho: &DensityMatrix, p: &SystemParams, theta: PumpParameter) -> Result<CMatrix> {
    require_single(rho)?;
    Ok(MasterEquation::photon_thermal(p, theta, rho.dim())?.rhs(rho.matrix()))
}

/// `dρ/dt` of the squeezed-reservoir phonon equation, in the undisplaced frame.
pub fn rhs_phonon_squeezed(rho: &DensityMatrix, p: &SystemParams, tau: f64) -> Result<CMatrix> {
    require_single(rho)?;
    let me = MasterEquation::phonon_squeezed(p, tau, rho.dim())?.with_shift(ZERO)?;
    Ok(me.rhs(rho.matrix()))
}

/// Expectation of `op` in a frame density matrix.
pub fn frame_expect(rho: &CMatrix, op: &CMatrix) -> C64 {
    trace_product(rho, op)
}
