//! Coarse-grained gain maps: the state change produced by one atom transit,
//! for the mechanical mode and for the cavity field.

use crate::dynamics::{displacement_exp_i_f, evolution_blocks, PumpParameter, SystemParams};
use crate::error::{Error, Result};
use crate::operator::{
    destroy, kron, CMatrix, DensityMatrix, FockOperator, ScalarMap, C64, ONE,
};

/// Poisson weights below this are dropped from the gain sums.
pub const WEIGHT_CUTOFF: f64 = 1e-16;

/// Probabilities that an atom leaves the mechanics untouched (`a_coeff`) or
/// kicks it by `lambda` (`b_coeff`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainCoefficients {
    pub a_coeff: f64,
    pub b_coeff: f64,
    pub lambda: f64,
}

/// Which level the injected atoms start in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomInit {
    Ground,
    Excited,
}

/// Poisson weights `e^{−x} xⁿ/n!`, `x = |α|²`, up to the point where they
/// fall below [`WEIGHT_CUTOFF`] past the peak.
pub(crate) fn poisson_weights(alpha: C64) -> Vec<f64> {
    let x = alpha.norm_sqr();
    if x == 0.0 {
        return vec![1.0];
    }
    let ln_x = x.ln();
    let mut ln_w = -x;
    let mut out = Vec::new();
    let mut n = 0usize;
    loop {
        let w = ln_w.exp();
        out.push(w);
        if (n as f64) > x && w < WEIGHT_CUTOFF {
            break;
        }
        n += 1;
        ln_w += ln_x - (n as f64).ln();
    }
    out
}

/// `sin²(t√φ)/φ`, with the `t²` limit at `φ = 0`.
fn sinc_sq(phi: f64, t: f64) -> f64 {
    let s = ScalarMap::sin_sqrt_over_sqrt(t).eval(phi).map(|z| z.re).unwrap_or(t);
    s * s
}

/// `A(τ)` and `B(τ)` for a coherent cavity field of amplitude `p.alpha`.
pub fn gain_coefficients(p: &SystemParams, tau: f64) -> Result<GainCoefficients> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidParameter(format!("interaction time {tau}")));
    }
    if !(p.alpha.re.is_finite() && p.alpha.im.is_finite()) {
        return Err(Error::InvalidParameter("alpha must be finite".into()));
    }
    let g2 = p.g_ac * p.g_ac;
    let d2 = (0.5 * p.delta()).powi(2);
    let (mut a, mut b) = (0.0, 0.0);
    for (n, w) in poisson_weights(p.alpha).into_iter().enumerate() {
        let phi = g2 * n as f64 + d2;
        let cos = (tau * phi.sqrt()).cos();
        let s2 = sinc_sq(phi, tau);
        a += w * (cos * cos + d2 * s2);
        b += w * g2 * n as f64 * s2;
    }
    Ok(GainCoefficients { a_coeff: a, b_coeff: b, lambda: p.lambda() })
}

/// A completely positive map `ρ ↦ Σ K ρ K†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausMap {
    dims: Vec<usize>,
    ops: Vec<CMatrix>,
}

impl KrausMap {
    pub fn new(dims: Vec<usize>, ops: Vec<CMatrix>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if ops.is_empty() {
            return Err(Error::EmptyOperands);
        }
        if ops.iter().any(|k| k.nrows() != n || k.ncols() != n) {
            return Err(Error::DimensionMismatch(format!("Kraus operators for dims {dims:?}")));
        }
        Ok(Self { dims, ops })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    pub fn apply_matrix(&self, rho: &CMatrix) -> CMatrix {
        let n = self.dim();
        self.ops
            .iter()
            .fold(CMatrix::zeros(n, n), |acc, k| acc + k * rho * k.adjoint())
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state of dim {} into map of dim {}",
                rho.dim(),
                self.dim()
            )));
        }
        DensityMatrix::from_matrix_normalized(rho.dims().to_vec(), self.apply_matrix(rho.matrix()))
    }

    /// `Σ K†K`; the identity for a trace-preserving map.
    pub fn completeness(&self) -> CMatrix {
        let n = self.dim();
        self.ops
            .iter()
            .fold(CMatrix::zeros(n, n), |acc, k| acc + k.adjoint() * k)
    }

    /// Matrix of the map on column-stacked `vec(ρ)`: `Σ conj(K) ⊗ K`.
    pub fn superoperator(&self) -> CMatrix {
        let n = self.dim();
        self.ops
            .iter()
            .fold(CMatrix::zeros(n * n, n * n), |acc, k| acc + k.conjugate().kronecker(k))
    }

    /// Choi matrix `Σ_ij |i⟩⟨j| ⊗ M(|i⟩⟨j|)`.
    pub fn choi(&self) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(n * n, n * n);
        for i in 0..n {
            for j in 0..n {
                let mut e = CMatrix::zeros(n, n);
                e[(i, j)] = ONE;
                out.view_mut((i * n, j * n), (n, n)).copy_from(&self.apply_matrix(&e));
            }
        }
        out
    }
}

/// Kraus form of the phonon gain map: `{√A·1, √B·e^{iF}}`.
pub fn phonon_kraus(p: &SystemParams, tau: f64, mech_dim: usize) -> Result<KrausMap> {
    let gc = gain_coefficients(p, tau)?;
    let e = displacement_exp_i_f(p, mech_dim)?.into_matrix();
    let id = CMatrix::identity(mech_dim, mech_dim);
    KrausMap::new(
        vec![mech_dim],
        vec![id * C64::from(gc.a_coeff.sqrt()), e * C64::from(gc.b_coeff.sqrt())],
    )
}

/// `A ρ + B e^{iF} ρ e^{−iF}`.
pub fn phonon_gain_map(rho_m: &DensityMatrix, p: &SystemParams, tau: f64) -> Result<DensityMatrix> {
    phonon_kraus(p, tau, rho_m.dim())?.apply(rho_m)
}

/// Kraus pair `{Ĉ, g·a†Ŝ}` of an excited atom crossing the cavity.
///
/// The top Fock level cannot emit inside the truncation, so it is left
/// untouched there; this keeps the map trace preserving.
pub fn cavity_kraus(p: &SystemParams, tau: f64, cavity_dim: usize) -> Result<KrausMap> {
    let blocks = evolution_blocks(p, cavity_dim, tau)?;
    let mut c = blocks.c.into_matrix();
    let top = cavity_dim - 1;
    c.row_mut(top).fill(C64::from(0.0));
    c[(top, top)] = ONE;
    let mut s = blocks.s.into_matrix();
    s[(top, top)] = C64::from(0.0);
    let ad = destroy(cavity_dim)?.into_matrix().adjoint();
    let emit = ad * s * C64::from(p.g_ac);
    KrausMap::new(vec![cavity_dim], vec![c, emit])
}

/// Cavity gain map at pump parameter `theta`.
pub fn cavity_gain_map(
    rho_c: &DensityMatrix,
    p: &SystemParams,
    theta: PumpParameter,
) -> Result<DensityMatrix> {
    let tau = theta.tau(p)?;
    cavity_kraus(p, tau, rho_c.dim())?.apply(rho_c)
}

/// Joint cavity ⊗ mechanics state after one transit, the atom traced out.
///
/// A ground-state atom gives `(D̂ρ_cD̂†)⊗ρ_m + g²(Ŝâρ_câ†Ŝ)⊗(e^{iF}ρ_m e^{−iF})`;
/// an excited atom gives `(Ĉρ_cĈ†)⊗ρ_m + g²(â†Ŝρ_cŜâ)⊗(e^{−iF}ρ_m e^{iF})`.
pub fn joint_gain_state(
    rho_c0: &DensityMatrix,
    rho_m0: &DensityMatrix,
    p: &SystemParams,
    tau: f64,
    atom: AtomInit,
) -> Result<DensityMatrix> {
    let nc = rho_c0.dim();
    let nm = rho_m0.dim();
    let e = displacement_exp_i_f(p, nm)?.into_matrix();
    let g = C64::from(p.g_ac);
    let (stay, jump, mech_kick) = match atom {
        AtomInit::Ground => {
            let blocks = evolution_blocks(p, nc, tau)?;
            let a = destroy(nc)?.into_matrix();
            let jump = blocks.s.matrix() * a * g;
            (blocks.d.into_matrix(), jump, e)
        }
        AtomInit::Excited => {
            let k = cavity_kraus(p, tau, nc)?;
            (k.ops[0].clone(), k.ops[1].clone(), e.adjoint())
        }
    };
    let c_part = |k: &CMatrix| k * rho_c0.matrix() * k.adjoint();
    let m_kicked = &mech_kick * rho_m0.matrix() * mech_kick.adjoint();
    let first = kron(&[
        &FockOperator::new(vec![nc], c_part(&stay))?,
        rho_m0.op(),
    ])?;
    let second = kron(&[
        &FockOperator::new(vec![nc], c_part(&jump))?,
        &FockOperator::new(vec![nm], m_kicked)?,
    ])?;
    DensityMatrix::from_matrix_normalized(vec![nc, nm], first.matrix() + second.matrix())
}
