//! Hamiltonian of the atom-cavity-mechanics system, the closed-form
//! propagator in the doubly rotated frame, and a brute-force propagation
//! oracle for it.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::operator::{
    create, destroy, expm, kron, matrix_function, number, pauli_z, sigma_minus, sigma_plus,
    CMatrix, DensityMatrix, FockOperator, ScalarMap, SpaceDims, C64, I, ONE, ZERO,
};

/// Physical constants of the model, in units of the mechanical frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub omega_m: f64,
    pub omega_a: f64,
    pub omega_c: f64,
    pub g_ac: f64,
    pub g_cm: f64,
    /// Atomic injection rate.
    pub r: f64,
    pub kappa_a: f64,
    pub kappa_b: f64,
    /// Mean thermal occupancy of the baths.
    pub n_th: f64,
    /// Coherent amplitude of the cavity field met by each atom.
    pub alpha: C64,
    /// Squeezing amplitude of the phonon reservoir.
    pub xi: f64,
    /// Squeezing phase.
    pub phi: f64,
}

impl Default for SystemParams {
    /// Resonant parameters of the thermal-bath phonon trapping study.
    fn default() -> Self {
        Self {
            omega_m: 1.0,
            omega_a: 10.0,
            omega_c: 10.0,
            g_ac: 3.0,
            g_cm: 0.02,
            r: 80.0,
            kappa_a: 3.0,
            kappa_b: 0.05,
            n_th: 0.0,
            alpha: C64::new(0.3, 0.0),
            xi: 0.0,
            phi: 0.0,
        }
    }
}

impl SystemParams {
    /// Detuning `ω_a − ω_c`.
    pub fn delta(&self) -> f64 {
        self.omega_a - self.omega_c
    }

    /// Sets the detuning by moving `ω_a`.
    pub fn with_delta(mut self, delta: f64) -> Self {
        self.omega_a = self.omega_c + delta;
        self
    }

    /// Dimensionless displacement `g_cm / ω_m`.
    pub fn lambda(&self) -> f64 {
        self.g_cm / self.omega_m
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.omega_m,
            self.omega_a,
            self.omega_c,
            self.g_ac,
            self.g_cm,
            self.r,
            self.kappa_a,
            self.kappa_b,
            self.n_th,
            self.alpha.re,
            self.alpha.im,
            self.xi,
            self.phi,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("non-finite parameter".into()));
        }
        if self.omega_m <= 0.0 {
            return Err(Error::InvalidParameter("omega_m must be positive".into()));
        }
        for (name, v) in [
            ("r", self.r),
            ("kappa_a", self.kappa_a),
            ("kappa_b", self.kappa_b),
            ("n_th", self.n_th),
            ("xi", self.xi),
        ] {
            if v < 0.0 {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be ≥ 0")));
            }
        }
        if !(0.0..2.0 * PI).contains(&self.phi) {
            return Err(Error::InvalidParameter(format!(
                "phi = {} outside [0, 2π)",
                self.phi
            )));
        }
        Ok(())
    }
}

/// Dimensionless interaction time `Θ = τ √(ω_m r)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PumpParameter(f64);

impl PumpParameter {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::InvalidParameter(format!("pump parameter {theta}")));
        }
        Ok(Self(theta))
    }

    pub fn from_tau(tau: f64, p: &SystemParams) -> Result<Self> {
        Self::new(tau * Self::rate_scale(p)?)
    }

    pub fn theta(&self) -> f64 {
        self.0
    }

    /// Transit time `τ = Θ / √(ω_m r)`.
    pub fn tau(&self, p: &SystemParams) -> Result<f64> {
        Ok(self.0 / Self::rate_scale(p)?)
    }

    fn rate_scale(p: &SystemParams) -> Result<f64> {
        let s = (p.omega_m * p.r).sqrt();
        if s > 0.0 && s.is_finite() {
            Ok(s)
        } else {
            Err(Error::InvalidParameter(
                "pump parameter needs ω_m r > 0".into(),
            ))
        }
    }
}

/// Lab-frame Hamiltonian
/// `ω_a σz/2 + ω_c a†a + ω_m b†b + g_ac(a σ₊ + a† σ₋) − g_cm a†a (b† + b)`.
pub fn build_hamiltonian(p: &SystemParams, dims: SpaceDims) -> Result<FockOperator> {
    let ops = TripartiteOps::new(dims)?;
    let h = &ops.sz * C64::from(0.5 * p.omega_a)
        + &ops.nc * C64::from(p.omega_c)
        + &ops.nm * C64::from(p.omega_m)
        + (&ops.a * &ops.sp + &ops.ad * &ops.sm) * C64::from(p.g_ac)
        - &ops.nc * (&ops.bd + &ops.b) * C64::from(p.g_cm);
    FockOperator::new(dims.factors(), h)
}

/// Polariton number `a†a + σz/2`; conserved by [`build_hamiltonian`].
pub fn polariton_number(dims: SpaceDims) -> Result<FockOperator> {
    let ops = TripartiteOps::new(dims)?;
    FockOperator::new(dims.factors(), &ops.nc + &ops.sz * C64::from(0.5))
}

struct TripartiteOps {
    a: CMatrix,
    ad: CMatrix,
    b: CMatrix,
    bd: CMatrix,
    nc: CMatrix,
    nm: CMatrix,
    sz: CMatrix,
    sp: CMatrix,
    sm: CMatrix,
}

impl TripartiteOps {
    fn new(dims: SpaceDims) -> Result<Self> {
        let ia = FockOperator::identity(2)?;
        let ic = FockOperator::identity(dims.cavity())?;
        let im = FockOperator::identity(dims.mech())?;
        let lift_c = |op: FockOperator| kron(&[&ia, &op, &im]).map(FockOperator::into_matrix);
        let lift_m = |op: FockOperator| kron(&[&ia, &ic, &op]).map(FockOperator::into_matrix);
        let lift_a = |op: FockOperator| kron(&[&op, &ic, &im]).map(FockOperator::into_matrix);
        Ok(Self {
            a: lift_c(destroy(dims.cavity())?)?,
            ad: lift_c(create(dims.cavity())?)?,
            nc: lift_c(number(dims.cavity())?)?,
            b: lift_m(destroy(dims.mech())?)?,
            bd: lift_m(create(dims.mech())?)?,
            nm: lift_m(number(dims.mech())?)?,
            sz: lift_a(pauli_z())?,
            sp: lift_a(sigma_plus())?,
            sm: lift_a(sigma_minus())?,
        })
    }
}

/// Single-mode displacement operator `exp(β b† − β* b)` on `dim` levels.
pub fn displacement(dim: usize, beta: C64) -> Result<FockOperator> {
    let b = destroy(dim)?.into_matrix();
    let gen = b.adjoint() * beta - &b * beta.conj();
    expm(&FockOperator::new(vec![dim], gen)?)
}

/// `e^{iF}` with `F = −iλ(b†η − bη*)` frozen at `η = −1`.
///
/// This equals the displacement `D(−λ)`: an atom that absorbs a cavity photon
/// shifts a coherent mechanical state `|β⟩ → |β − λ⟩`.
pub fn displacement_exp_i_f(p: &SystemParams, mech_dim: usize) -> Result<FockOperator> {
    displacement(mech_dim, C64::from(-p.lambda()))
}

/// Diagonal cavity operators `Ĉ`, `Ŝ`, `D̂` of the closed-form propagator.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionBlocks {
    pub c: FockOperator,
    pub s: FockOperator,
    pub d: FockOperator,
}

/// `φ̂ = g_ac² a†a + (δ/2)²` on `cavity_dim` levels.
pub fn phi_operator(p: &SystemParams, cavity_dim: usize) -> Result<FockOperator> {
    let n = number(cavity_dim)?;
    let shift = (0.5 * p.delta()).powi(2);
    let m = n.matrix() * C64::from(p.g_ac * p.g_ac)
        + CMatrix::identity(cavity_dim, cavity_dim) * C64::from(shift);
    FockOperator::new(vec![cavity_dim], m)
}

/// Spectral functions of `φ̂` at time `t`:
///
/// * `Ĉ = cos(t√(φ̂+g²)) − (iδ/2) sin(t√(φ̂+g²))/√(φ̂+g²)`
/// * `Ŝ = sin(t√(φ̂+g²))/√(φ̂+g²)`
/// * `D̂ = cos(t√φ̂) + (iδ/2) sin(t√φ̂)/√φ̂`
pub fn evolution_blocks(p: &SystemParams, cavity_dim: usize, t: f64) -> Result<EvolutionBlocks> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time {t}")));
    }
    let phi = phi_operator(p, cavity_dim)?;
    let g2 = CMatrix::identity(cavity_dim, cavity_dim) * C64::from(p.g_ac * p.g_ac);
    let phi_up = FockOperator::new(vec![cavity_dim], phi.matrix() + g2)?;
    let half_delta = C64::new(0.0, 0.5 * p.delta());

    let sinc = ScalarMap::sin_sqrt_over_sqrt(t);
    let cos = ScalarMap::cos_sqrt(t);

    let s = matrix_function(&phi_up, &sinc)?;
    let c = matrix_function(&phi_up, &cos)?.sub(&s.scale(half_delta))?;
    let d = matrix_function(&phi, &cos)?.add(&matrix_function(&phi, &sinc)?.scale(half_delta))?;
    Ok(EvolutionBlocks { c, s, d })
}

/// Closed-form propagator `U(t)` in the doubly rotated frame, with the
/// mechanical displacement frozen at `η = −1`.
pub fn closed_form_propagator(p: &SystemParams, dims: SpaceDims, t: f64) -> Result<FockOperator> {
    let nc = dims.cavity();
    let nm = dims.mech();
    let blocks = evolution_blocks(p, nc, t)?;
    let a = destroy(nc)?.into_matrix();
    let e = displacement_exp_i_f(p, nm)?.into_matrix();
    let id_m = CMatrix::identity(nm, nm);
    let g = C64::from(p.g_ac);

    let upper_left = blocks.c.matrix().kronecker(&id_m);
    let upper_right = (blocks.s.matrix() * &a).kronecker(&e) * (-I * g);
    let lower_left = (a.adjoint() * blocks.s.matrix()).kronecker(&e.adjoint()) * (-I * g);
    let lower_right = blocks.d.matrix().kronecker(&id_m);

    let n = nc * nm;
    let mut u = CMatrix::zeros(2 * n, 2 * n);
    u.view_mut((0, 0), (n, n)).copy_from(&upper_left);
    u.view_mut((0, n), (n, n)).copy_from(&upper_right);
    u.view_mut((n, 0), (n, n)).copy_from(&lower_left);
    u.view_mut((n, n), (n, n)).copy_from(&lower_right);
    FockOperator::new(dims.factors(), u)
}

/// Populations above which the highest Fock level counts as overflowing.
pub const TRUNCATION_WARN: f64 = 1e-8;

/// Population of the top cavity and mechanical Fock levels of a tripartite state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopPopulations {
    pub cavity: f64,
    pub mech: f64,
}

impl TopPopulations {
    pub fn overflows(&self) -> bool {
        self.cavity > TRUNCATION_WARN || self.mech > TRUNCATION_WARN
    }
}

pub fn top_populations(rho: &DensityMatrix) -> Result<TopPopulations> {
    let dims = rho.dims();
    if dims.len() != 3 {
        return Err(Error::DimensionMismatch(format!(
            "tripartite state expected, got factors {dims:?}"
        )));
    }
    let (nc, nm) = (dims[1], dims[2]);
    let pops = rho.populations();
    let mut top = TopPopulations { cavity: 0.0, mech: 0.0 };
    for (k, p) in pops.iter().enumerate() {
        let m = k % nm;
        let c = (k / nm) % nc;
        if c == nc - 1 {
            top.cavity += p;
        }
        if m == nm - 1 {
            top.mech += p;
        }
    }
    Ok(top)
}

fn require_tripartite(rho: &DensityMatrix) -> Result<SpaceDims> {
    match rho.dims() {
        [2, nc, nm] => SpaceDims::new(*nc, *nm),
        other => Err(Error::DimensionMismatch(format!(
            "tripartite atom ⊗ cavity ⊗ mechanics state expected, got {other:?}"
        ))),
    }
}

/// `U(τ) ρ₀ U†(τ)` with the closed-form propagator.
///
/// Logs a warning when the top Fock levels of the result hold more than
/// [`TRUNCATION_WARN`] population.
pub fn evolve_closed_form(rho0: &DensityMatrix, p: &SystemParams, tau: f64) -> Result<DensityMatrix> {
    let dims = require_tripartite(rho0)?;
    let u = closed_form_propagator(p, dims, tau)?.into_matrix();
    let out = &u * rho0.matrix() * u.adjoint();
    let rho = DensityMatrix::new(FockOperator::new(dims.factors(), out)?)?;
    let top = top_populations(&rho)?;
    if top.overflows() {
        log::warn!(
            "closed-form evolution: top-level populations cavity {:.2e}, mechanics {:.2e}",
            top.cavity,
            top.mech
        );
    }
    Ok(rho)
}

/// Propagates `ρ₀` under the lab-frame Hamiltonian for time `t` by repeated
/// unitary steps `exp(−iH dt)`. The step count is doubled until halving the
/// step changes the state by less than `1e-8`.
pub fn evolve_brute_force(
    rho0: &DensityMatrix,
    p: &SystemParams,
    t: f64,
    steps: usize,
) -> Result<DensityMatrix> {
    const TOL: f64 = 1e-8;
    const MAX_DOUBLINGS: usize = 8;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time {t}")));
    }
    let dims = require_tripartite(rho0)?;
    let h = build_hamiltonian(p, dims)?;
    let mut n = steps.max(1);
    let mut coarse = propagate_steps(rho0.matrix(), h.matrix(), t, n)?;
    for _ in 0..MAX_DOUBLINGS {
        let fine = propagate_steps(rho0.matrix(), h.matrix(), t, 2 * n)?;
        let change = (&fine - &coarse).camax();
        if change < TOL {
            return DensityMatrix::new(FockOperator::new(dims.factors(), fine)?);
        }
        coarse = fine;
        n *= 2;
    }
    Err(Error::NonConvergence(format!(
        "brute-force propagation still changing after {n} steps"
    )))
}

fn propagate_steps(rho0: &CMatrix, h: &CMatrix, t: f64, steps: usize) -> Result<CMatrix> {
    let dt = t / steps as f64;
    let step = expm(&FockOperator::single(h * (-I * dt))?)?.into_matrix();
    let step_adj = step.adjoint();
    let mut rho = rho0.clone();
    for _ in 0..steps {
        rho = &step * rho * &step_adj;
    }
    Ok(rho)
}

/// Moves a lab-frame state at time `t` into the frame of the closed-form
/// propagator: first rotating away `ω_c(a†a + σz/2) + ω_m b†b`, then undoing
/// the photon-number-conditioned mechanical displacement `n λ (e^{iω_m t} − 1)`
/// driven by radiation pressure.
pub fn to_interaction_frame(rho_lab: &DensityMatrix, p: &SystemParams, t: f64) -> Result<DensityMatrix> {
    let dims = require_tripartite(rho_lab)?;
    let (nc, nm) = (dims.cavity(), dims.mech());
    let eta = C64::new((p.omega_m * t).cos() - 1.0, (p.omega_m * t).sin());

    // V = R(t) · U_om(t), block diagonal in (atom, photon number)
    let n = 2 * nc * nm;
    let mut v = CMatrix::zeros(n, n);
    for (s, sz) in [(0usize, 1.0f64), (1, -1.0)] {
        for k in 0..nc {
            let disp = displacement(nm, eta * (k as f64 * p.lambda()))?.into_matrix();
            let base = (s * nc + k) * nm;
            for m in 0..nm {
                let energy = p.omega_c * (k as f64 + 0.5 * sz) + p.omega_m * m as f64;
                let phase = C64::from_polar(1.0, -energy * t);
                for j in 0..nm {
                    v[(base + m, base + j)] = phase * disp[(m, j)];
                }
            }
        }
    }
    let out = v.adjoint() * rho_lab.matrix() * &v;
    DensityMatrix::from_matrix_normalized(dims.factors(), out)
}

/// `|g⟩⟨g| ⊗ ρ_c ⊗ ρ_m`, the state met by each atom on entry.
pub fn ground_atom_product(rho_c: &DensityMatrix, rho_m: &DensityMatrix) -> Result<DensityMatrix> {
    let ground = FockOperator::single(DMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, ONE]))?;
    DensityMatrix::new(kron(&[&ground, rho_c.op(), rho_m.op()])?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{coherent_state, fock_state, thermal_state, trace_distance};

    fn dims(nc: usize, nm: usize) -> SpaceDims {
        SpaceDims::new(nc, nm).unwrap()
    }

    #[test]
    fn pump_parameter_round_trip() {
        let p = SystemParams::default();
        let th = PumpParameter::new(9.32).unwrap();
        let tau = th.tau(&p).unwrap();
        assert!((tau * (p.omega_m * p.r).sqrt() - 9.32).abs() < 1e-13);
        assert!((PumpParameter::from_tau(tau, &p).unwrap().theta() - th.theta()).abs() < 1e-13);
        assert!(PumpParameter::new(-1.0).is_err());
        let mut q = p;
        q.r = 0.0;
        assert!(th.tau(&q).is_err());
    }

    #[test]
    fn params_validation() {
        let p = SystemParams::default();
        assert!(p.validate().is_ok());
        assert_eq!(p.lambda(), p.g_cm / p.omega_m);
        assert!((p.with_delta(0.7).delta() - 0.7).abs() < 1e-13);
        let mut q = p;
        q.kappa_b = -0.1;
        assert!(q.validate().is_err());
        let mut q = p;
        q.phi = 7.0;
        assert!(q.validate().is_err());
    }

    #[test]
    fn uncoupled_hamiltonian_is_bare_energies() {
        let mut p = SystemParams::default().with_delta(0.4);
        p.g_ac = 0.0;
        p.g_cm = 0.0;
        let d = dims(3, 4);
        let h = build_hamiltonian(&p, d).unwrap();
        let m = h.matrix();
        for i in 0..d.total() {
            for j in 0..d.total() {
                if i != j {
                    assert_eq!(m[(i, j)], ZERO);
                }
            }
            let s = if i / 12 == 0 { 1.0 } else { -1.0 };
            let nc = ((i / 4) % 3) as f64;
            let nm = (i % 4) as f64;
            let want = 0.5 * p.omega_a * s + p.omega_c * nc + p.omega_m * nm;
            assert!((m[(i, i)].re - want).abs() < 1e-13);
        }
    }

    #[test]
    fn hamiltonian_is_hermitian_and_conserves_polaritons() {
        let mut p = SystemParams::default().with_delta(-0.3);
        p.g_cm = 0.37;
        let d = dims(5, 6);
        let h = build_hamiltonian(&p, d).unwrap();
        assert!(h.hermiticity_defect() < 1e-13);
        let n = polariton_number(d).unwrap();
        assert!(h.commutator(&n).unwrap().matrix().camax() < 1e-12);
    }

    #[test]
    fn displacement_examples() {
        let mut p = SystemParams::default();
        p.g_cm = 0.0;
        let e = displacement_exp_i_f(&p, 10).unwrap();
        assert!((e.matrix() - CMatrix::identity(10, 10)).camax() < 1e-15);

        p.g_cm = 0.02;
        let e = displacement_exp_i_f(&p, 24).unwrap();
        let vac = fock_state(24, 0).unwrap();
        let out = e.matrix() * vac.matrix() * e.matrix().adjoint();
        let nb = number(24).unwrap();
        let mean = (out * nb.matrix()).trace().re;
        assert!((mean - 4e-4).abs() < 1e-12, "{mean}");

        let unit = (e.matrix().adjoint() * e.matrix() - CMatrix::identity(24, 24)).camax();
        assert!(unit < 1e-10);
    }

    #[test]
    fn displacement_shifts_coherent_state() {
        let mut p = SystemParams::default();
        p.g_cm = 0.3;
        let e = displacement_exp_i_f(&p, 30).unwrap();
        let beta = C64::new(0.8, 0.2);
        let src = coherent_state(30, beta).unwrap();
        let out = e.matrix() * src.matrix() * e.matrix().adjoint();
        let want = coherent_state(30, beta - 0.3).unwrap();
        assert!(trace_distance(&out, want.matrix()) < 1e-10);
    }

    #[test]
    fn blocks_at_zero_time() {
        let p = SystemParams::default().with_delta(0.5);
        let b = evolution_blocks(&p, 6, 0.0).unwrap();
        let id = CMatrix::identity(6, 6);
        assert!((b.c.matrix() - &id).camax() < 1e-15);
        assert!((b.d.matrix() - &id).camax() < 1e-15);
        assert!(b.s.matrix().camax() < 1e-15);
    }

    #[test]
    fn blocks_resonant_entries() {
        let p = SystemParams::default();
        let t = 0.83;
        let b = evolution_blocks(&p, 8, t).unwrap();
        for n in 0..8 {
            let want = (t * p.g_ac * ((n + 1) as f64).sqrt()).cos();
            assert!((b.c.matrix()[(n, n)] - C64::from(want)).norm() < 1e-14);
        }
        // removable singularity of D at n = 0, δ = 0
        assert!((b.d.matrix()[(0, 0)] - ONE).norm() < 1e-15);
    }

    #[test]
    fn assembled_propagator_is_unitary_on_populated_subspace() {
        let mut p = SystemParams::default().with_delta(0.6);
        p.g_cm = 0.02;
        let d = dims(16, 6);
        let u = closed_form_propagator(&p, d, 0.77).unwrap().into_matrix();
        let utu = u.adjoint() * &u;
        // drop the excited-atom, top-photon rows: they couple to |g, n_max+1⟩
        let nm = d.mech();
        let keep: Vec<usize> = (0..d.total())
            .filter(|k| !(k / (16 * nm) == 0 && (k / nm) % 16 == 15))
            .collect();
        let mut worst = 0.0f64;
        for &i in &keep {
            for &j in &keep {
                let want = if i == j { ONE } else { ZERO };
                worst = worst.max((utu[(i, j)] - want).norm());
            }
        }
        assert!(worst < 1e-9, "{worst}");
    }

    #[test]
    fn closed_form_at_zero_time_and_without_coupling() {
        let p = SystemParams::default();
        let rc = coherent_state(6, C64::from(0.3)).unwrap();
        let rm = thermal_state(5, 0.05).unwrap();
        let rho0 = ground_atom_product(&rc, &rm).unwrap();
        let same = evolve_closed_form(&rho0, &p, 0.0).unwrap();
        assert!((same.matrix() - rho0.matrix()).camax() < 1e-15);

        // no atom-cavity coupling: a ground-state atom leaves both modes alone
        let mut q = p;
        q.g_ac = 0.0;
        let out = evolve_closed_form(&rho0, &q, 0.9).unwrap();
        let red_c = crate::operator::partial_trace(&out, &[crate::operator::Subsystem::Cavity]).unwrap();
        let red_m = crate::operator::partial_trace(&out, &[crate::operator::Subsystem::Mechanics]).unwrap();
        assert!(trace_distance(red_c.matrix(), rc.matrix()) < 1e-14);
        assert!(trace_distance(red_m.matrix(), rm.matrix()) < 1e-14);
    }

    #[test]
    fn closed_form_is_exact_jaynes_cummings_without_optomechanics() {
        let mut p = SystemParams::default().with_delta(0.4);
        p.g_cm = 0.0;
        let rc = coherent_state(8, C64::from(0.5)).unwrap();
        let rm = fock_state(3, 0).unwrap();
        let rho0 = ground_atom_product(&rc, &rm).unwrap();
        for t in [0.2, 0.6, 1.0] {
            let cf = evolve_closed_form(&rho0, &p, t).unwrap();
            let lab = evolve_brute_force(&rho0, &p, t, 4).unwrap();
            let bf = to_interaction_frame(&lab, &p, t).unwrap();
            let td = trace_distance(cf.matrix(), bf.matrix());
            assert!(td < 1e-9, "t = {t}: {td}");
        }
    }

    #[test]
    fn brute_force_conserves_energy_polaritons_and_purity() {
        let p = SystemParams::default();
        let d = dims(5, 6);
        let rc = coherent_state(5, C64::from(0.3)).unwrap();
        let rm = fock_state(6, 0).unwrap();
        let rho0 = ground_atom_product(&rc, &rm).unwrap();
        let h = build_hamiltonian(&p, d).unwrap();
        let n = polariton_number(d).unwrap();
        let out = evolve_brute_force(&rho0, &p, 0.8, 4).unwrap();
        assert!((out.expect(h.matrix()) - rho0.expect(h.matrix())).norm() < 1e-8);
        assert!((out.expect(n.matrix()) - rho0.expect(n.matrix())).norm() < 1e-8);
        assert!((out.purity() - rho0.purity()).abs() < 1e-8);
        let same = evolve_brute_force(&rho0, &p, 0.0, 1).unwrap();
        assert!((same.matrix() - rho0.matrix()).camax() < 1e-15);
    }

    #[test]
    fn closed_form_preserves_purity() {
        let p = SystemParams::default();
        let rc = coherent_state(10, C64::from(0.3)).unwrap();
        let rm = fock_state(12, 0).unwrap();
        let rho0 = ground_atom_product(&rc, &rm).unwrap();
        let out = evolve_closed_form(&rho0, &p, 0.5).unwrap();
        assert!((out.purity() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn frozen_displacement_error_grows_with_coupling() {
        // the η = −1 discrepancy is first order in λ
        let rc = coherent_state(6, C64::from(0.3)).unwrap();
        let rm = fock_state(10, 0).unwrap();
        let rho0 = ground_atom_product(&rc, &rm).unwrap();
        let err = |g_cm: f64| {
            let mut p = SystemParams::default();
            p.g_cm = g_cm;
            let t = 0.5;
            let cf = evolve_closed_form(&rho0, &p, t).unwrap();
            let lab = evolve_brute_force(&rho0, &p, t, 2).unwrap();
            let bf = to_interaction_frame(&lab, &p, t).unwrap();
            trace_distance(cf.matrix(), bf.matrix())
        };
        let small = err(0.01);
        let double = err(0.02);
        assert!(small < 1e-2);
        assert!((double / small - 2.0).abs() < 0.1, "{small} {double}");
    }
}
