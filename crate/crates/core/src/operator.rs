//! Truncated Fock-space linear algebra.
//!
//! Every operator carries the dimensions of its tensor factors. Composite
//! spaces are always ordered atom ⊗ cavity ⊗ mechanics, and the atom basis
//! is `{|e⟩, |g⟩}` (index 0 is the excited level).

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// Hermiticity tolerance (max-abs entry of `ρ − ρ†`).
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Unit-trace tolerance.
pub const TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue tolerated in a density matrix.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Names the tensor factors of the atom-cavity-mechanics space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    Atom,
    Cavity,
    Mechanics,
}

/// Truncation of the tripartite space. The atom always has two levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceDims {
    cavity: usize,
    mech: usize,
}

impl SpaceDims {
    pub const ATOM_LEVELS: usize = 2;

    pub fn new(cavity: usize, mech: usize) -> Result<Self> {
        if cavity == 0 || mech == 0 {
            return Err(Error::InvalidDimension(format!(
                "cavity_dim = {cavity}, mech_dim = {mech}; both must be ≥ 1"
            )));
        }
        Ok(Self { cavity, mech })
    }

    pub fn cavity(&self) -> usize {
        self.cavity
    }

    pub fn mech(&self) -> usize {
        self.mech
    }

    pub fn total(&self) -> usize {
        Self::ATOM_LEVELS * self.cavity * self.mech
    }

    pub fn factors(&self) -> Vec<usize> {
        vec![Self::ATOM_LEVELS, self.cavity, self.mech]
    }
}

/// A dense complex matrix on a (possibly composite) truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    dims: Vec<usize>,
    matrix: CMatrix,
}

impl FockOperator {
    /// Wraps `matrix`, checking it is square with side equal to the product of `dims`.
    pub fn new(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidDimension(format!("factor dims {dims:?}")));
        }
        let n: usize = dims.iter().product();
        if !matrix.is_square() || matrix.nrows() != n {
            return Err(Error::DimensionMismatch(format!(
                "{}×{} matrix for factor dims {dims:?}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { dims, matrix })
    }

    /// Single-factor operator.
    pub fn single(matrix: CMatrix) -> Result<Self> {
        let n = matrix.nrows();
        Self::new(vec![n], matrix)
    }

    pub(crate) fn from_parts(dims: Vec<usize>, matrix: CMatrix) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), matrix.nrows());
        Self { dims, matrix }
    }

    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self::from_parts(vec![dim], CMatrix::identity(dim, dim)))
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let n = dims.iter().product();
        Self::new(dims, CMatrix::zeros(n, n))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self::from_parts(self.dims.clone(), self.matrix.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_parts(self.dims.clone(), &self.matrix * s)
    }

    /// Operator product `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Self::from_parts(self.dims.clone(), &self.matrix * &other.matrix))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Self::from_parts(self.dims.clone(), &self.matrix + &other.matrix))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Self::from_parts(self.dims.clone(), &self.matrix - &other.matrix))
    }

    /// `[self, other]`
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Self::from_parts(
            self.dims.clone(),
            &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        ))
    }

    /// Largest `|A_ij − conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn is_finite(&self) -> bool {
        self.matrix.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Position of `s` among the tensor factors.
    ///
    /// Three factors are read as atom ⊗ cavity ⊗ mechanics, two as
    /// cavity ⊗ mechanics. Single-factor operators carry no tags.
    pub fn subsystem_index(&self, s: Subsystem) -> Result<usize> {
        let idx = match (self.dims.len(), s) {
            (3, Subsystem::Atom) => Some(0),
            (3, Subsystem::Cavity) => Some(1),
            (3, Subsystem::Mechanics) => Some(2),
            (2, Subsystem::Cavity) => Some(0),
            (2, Subsystem::Mechanics) => Some(1),
            _ => None,
        };
        idx.ok_or(Error::UnknownSubsystem(s))
    }

    fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(())
    }
}

pub(crate) fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in j..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 {
        Err(Error::InvalidDimension("dim must be ≥ 1".into()))
    } else {
        Ok(())
    }
}

/// Bosonic annihilation operator: `⟨n−1|a|n⟩ = √n`.
pub fn destroy(dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    let mut m = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        m[(n - 1, n)] = C64::from((n as f64).sqrt());
    }
    Ok(FockOperator::from_parts(vec![dim], m))
}

/// Bosonic creation operator, the adjoint of [`destroy`].
pub fn create(dim: usize) -> Result<FockOperator> {
    Ok(destroy(dim)?.adjoint())
}

/// Number operator `a†a`.
pub fn number(dim: usize) -> Result<FockOperator> {
    check_dim(dim)?;
    let diag = CVector::from_fn(dim, |n, _| C64::from(n as f64));
    Ok(FockOperator::from_parts(vec![dim], CMatrix::from_diagonal(&diag)))
}

pub fn pauli_z() -> FockOperator {
    let m = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]);
    FockOperator::from_parts(vec![2], m)
}

/// `σ₊ = |e⟩⟨g|`
pub fn sigma_plus() -> FockOperator {
    let m = CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ZERO, ZERO]);
    FockOperator::from_parts(vec![2], m)
}

/// `σ₋ = |g⟩⟨e|`
pub fn sigma_minus() -> FockOperator {
    sigma_plus().adjoint()
}

/// Kronecker product in the order given (atom ⊗ cavity ⊗ mechanics by convention).
pub fn kron(ops: &[&FockOperator]) -> Result<FockOperator> {
    let (first, rest) = ops.split_first().ok_or(Error::EmptyOperands)?;
    let mut dims = first.dims.clone();
    let mut m = first.matrix.clone();
    for op in rest {
        dims.extend_from_slice(&op.dims);
        m = m.kronecker(&op.matrix);
    }
    Ok(FockOperator::from_parts(dims, m))
}

/// Traces out every factor whose index is not in `keep` (kept factors stay in order).
pub(crate) fn partial_trace_factors(m: &CMatrix, dims: &[usize], keep: &[usize]) -> CMatrix {
    let nf = dims.len();
    // stride of each factor in the flattened (row-major over factors) index
    let mut strides = vec![1usize; nf];
    for k in (0..nf.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let traced: Vec<usize> = (0..nf).filter(|k| !keep.contains(k)).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let n_keep: usize = keep_dims.iter().product();
    let n_traced: usize = traced_dims.iter().product();

    let offsets = |factors: &[usize], fdims: &[usize], count: usize| -> Vec<usize> {
        (0..count)
            .map(|mut idx| {
                let mut off = 0;
                for (f, d) in factors.iter().zip(fdims).rev() {
                    off += (idx % d) * strides[*f];
                    idx /= d;
                }
                off
            })
            .collect()
    };
    let keep_off = offsets(keep, &keep_dims, n_keep);
    let traced_off = offsets(&traced, &traced_dims, n_traced);

    CMatrix::from_fn(n_keep, n_keep, |r, c| {
        traced_off
            .iter()
            .map(|t| m[(keep_off[r] + t, keep_off[c] + t)])
            .sum()
    })
}

/// Reduced state on the subsystems in `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[Subsystem]) -> Result<DensityMatrix> {
    let op = rho.op();
    if keep.is_empty() {
        return Err(Error::EmptyOperands);
    }
    let mut idx = keep
        .iter()
        .map(|s| op.subsystem_index(*s))
        .collect::<Result<Vec<_>>>()?;
    idx.sort_unstable();
    idx.dedup();
    let dims: Vec<usize> = idx.iter().map(|&k| op.dims[k]).collect();
    let m = partial_trace_factors(&op.matrix, &op.dims, &idx);
    DensityMatrix::new(FockOperator::from_parts(dims, m))
}

/// Matrix exponential (scaled Padé approximant).
pub fn expm(op: &FockOperator) -> Result<FockOperator> {
    if !op.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(FockOperator::from_parts(op.dims.clone(), op.matrix.exp()))
}

/// A scalar function applied through spectral calculus, optionally with a
/// declared value at a removable singularity.
pub struct ScalarMap<'a> {
    f: Box<dyn Fn(f64) -> C64 + Send + Sync + 'a>,
    limit: Option<(f64, C64)>,
}

impl<'a> ScalarMap<'a> {
    pub fn new(f: impl Fn(f64) -> C64 + Send + Sync + 'a) -> Self {
        Self {
            f: Box::new(f),
            limit: None,
        }
    }

    /// Declares `f(at) := value`.
    pub fn with_limit(mut self, at: f64, value: C64) -> Self {
        self.limit = Some((at, value));
        self
    }

    /// `x ↦ sin(t√x)/√x`, continued to `t` at `x = 0`.
    pub fn sin_sqrt_over_sqrt(t: f64) -> ScalarMap<'static> {
        ScalarMap::new(move |x: f64| {
            let s = x.sqrt();
            C64::from((t * s).sin() / s)
        })
        .with_limit(0.0, C64::from(t))
    }

    /// `x ↦ cos(t√x)`
    pub fn cos_sqrt(t: f64) -> ScalarMap<'static> {
        ScalarMap::new(move |x: f64| C64::from((t * x.sqrt()).cos()))
    }

    pub fn eval(&self, x: f64) -> Result<C64> {
        if let Some((at, value)) = self.limit {
            if (x - at).abs() <= 1e-14 * at.abs().max(1.0) {
                return Ok(value);
            }
        }
        let y = (self.f)(x);
        if y.re.is_finite() && y.im.is_finite() {
            Ok(y)
        } else {
            Err(Error::SingularFunction(x))
        }
    }
}

/// Eigenvalues of a Hermitian matrix.
///
/// The QR sweep can break down on matrices with exactly zero rows, so a
/// non-finite result is retried on `m + sI` with `s = ‖m‖`.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<DVector<f64>> {
    let ev = m.clone().symmetric_eigenvalues();
    if ev.iter().all(|x| x.is_finite()) {
        return Ok(ev);
    }
    let s = shift_for(m);
    let ev = (m + CMatrix::identity(m.nrows(), m.ncols()) * C64::from(s)).symmetric_eigenvalues();
    if ev.iter().all(|x| x.is_finite()) {
        Ok(ev.add_scalar(-s))
    } else {
        Err(Error::NonConvergence("Hermitian eigenvalue sweep".into()))
    }
}

/// Eigendecomposition of a Hermitian matrix, with the same fallback as
/// [`hermitian_eigenvalues`].
pub fn hermitian_eigen(m: &CMatrix) -> Result<nalgebra::SymmetricEigen<C64, nalgebra::Dyn>> {
    let finite = |e: &nalgebra::SymmetricEigen<C64, nalgebra::Dyn>| {
        e.eigenvalues.iter().all(|x| x.is_finite())
            && e.eigenvectors.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    };
    let eig = m.clone().symmetric_eigen();
    if finite(&eig) {
        return Ok(eig);
    }
    let s = shift_for(m);
    let mut eig = (m + CMatrix::identity(m.nrows(), m.ncols()) * C64::from(s)).symmetric_eigen();
    if !finite(&eig) {
        return Err(Error::NonConvergence("Hermitian eigendecomposition".into()));
    }
    eig.eigenvalues.add_scalar_mut(-s);
    Ok(eig)
}

fn shift_for(m: &CMatrix) -> f64 {
    let n = m.norm();
    if n > 0.0 { n } else { 1.0 }
}

/// `f(op)` for Hermitian `op`. Diagonal input is mapped entrywise; otherwise
/// the eigendecomposition is used.
pub fn matrix_function(op: &FockOperator, f: &ScalarMap<'_>) -> Result<FockOperator> {
    if !op.is_finite() {
        return Err(Error::NonFinite);
    }
    let scale = op.matrix.camax().max(1.0);
    if op.hermiticity_defect() > HERMITIAN_TOL * scale {
        return Err(Error::InvalidParameter(
            "spectral calculus needs a Hermitian operator".into(),
        ));
    }
    let n = op.dim();
    let m = &op.matrix;
    let diagonal = (0..n).all(|j| (0..n).all(|i| i == j || m[(i, j)] == ZERO));
    let out = if diagonal {
        let d = (0..n)
            .map(|k| f.eval(m[(k, k)].re))
            .collect::<Result<Vec<_>>>()?;
        CMatrix::from_diagonal(&CVector::from_vec(d))
    } else {
        let eig = hermitian_eigen(m)?;
        let fd = eig
            .eigenvalues
            .iter()
            .map(|&x| f.eval(x))
            .collect::<Result<Vec<_>>>()?;
        let v = &eig.eigenvectors;
        let mut scaled = v.clone();
        for (j, fj) in fd.iter().enumerate() {
            for i in 0..n {
                scaled[(i, j)] *= *fj;
            }
        }
        scaled * v.adjoint()
    };
    Ok(FockOperator::from_parts(op.dims.clone(), out))
}

/// A Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: FockOperator,
}

impl DensityMatrix {
    /// Validates all density-matrix invariants.
    pub fn new(op: FockOperator) -> Result<Self> {
        let defect = op.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (defect {defect:.3e})"
            )));
        }
        let tr = op.trace();
        if (tr - ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min_eig = hermitian_eigenvalues(&op.matrix)?
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { op })
    }

    /// Hermitizes and trace-normalizes before validating.
    pub fn from_matrix_normalized(dims: Vec<usize>, m: CMatrix) -> Result<Self> {
        let h = (&m + m.adjoint()) * C64::from(0.5);
        let tr = h.trace().re;
        if !(tr.is_finite() && tr > 0.0) {
            return Err(Error::InvalidState(format!("trace {tr} cannot be normalized")));
        }
        Self::new(FockOperator::new(dims, h / C64::from(tr))?)
    }

    /// `|ψ⟩⟨ψ|` for a normalized single-factor or composite vector.
    pub fn pure(dims: Vec<usize>, psi: &CVector) -> Result<Self> {
        Self::new(FockOperator::new(dims, psi * psi.adjoint())?)
    }

    pub fn op(&self) -> &FockOperator {
        &self.op
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.op.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.op.dims
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn into_op(self) -> FockOperator {
        self.op
    }

    /// `Tr(ρ A)`
    pub fn expect(&self, a: &CMatrix) -> C64 {
        trace_product(&self.op.matrix, a)
    }

    pub fn purity(&self) -> f64 {
        self.op.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Diagonal in the Fock (product) basis.
    pub fn populations(&self) -> Vec<f64> {
        self.op.matrix.diagonal().iter().map(|z| z.re).collect()
    }
}

/// `Tr(AB)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Trace distance `½‖A − B‖₁` between two Hermitian matrices of equal size.
/// NaN if the eigenvalue sweep fails.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let d = a - b;
    let d = (&d + d.adjoint()) * C64::from(0.5);
    hermitian_eigenvalues(&d)
        .map(|ev| 0.5 * ev.iter().map(|x| x.abs()).sum::<f64>())
        .unwrap_or(f64::NAN)
}

/// Fock state `|n⟩` in a `dim`-level space.
pub fn fock_state(dim: usize, n: usize) -> Result<DensityMatrix> {
    if n >= dim {
        return Err(Error::InvalidDimension(format!("level {n} outside dim {dim}")));
    }
    let mut psi = CVector::zeros(dim);
    psi[n] = ONE;
    DensityMatrix::pure(vec![dim], &psi)
}

/// Coherent-state amplitudes `e^{−|α|²/2} αⁿ/√n!`, renormalized on the truncated space.
pub fn coherent_vector(dim: usize, alpha: C64) -> Result<CVector> {
    check_dim(dim)?;
    let mut psi = CVector::zeros(dim);
    let mut c = C64::from((-0.5 * alpha.norm_sqr()).exp());
    for n in 0..dim {
        psi[n] = c;
        c *= alpha / ((n + 1) as f64).sqrt();
    }
    let norm = psi.norm();
    Ok(psi / C64::from(norm))
}

pub fn coherent_state(dim: usize, alpha: C64) -> Result<DensityMatrix> {
    DensityMatrix::pure(vec![dim], &coherent_vector(dim, alpha)?)
}

/// Bose–Einstein state with mean occupation `nbar`, normalized on the truncated space.
pub fn thermal_state(dim: usize, nbar: f64) -> Result<DensityMatrix> {
    check_dim(dim)?;
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::InvalidParameter(format!("thermal occupancy {nbar}")));
    }
    let ratio = nbar / (1.0 + nbar);
    let mut p: Vec<f64> = (0..dim).map(|n| ratio.powi(n as i32)).collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    let diag = CVector::from_iterator(dim, p.into_iter().map(C64::from));
    DensityMatrix::new(FockOperator::from_parts(vec![dim], CMatrix::from_diagonal(&diag)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
        let a = random_matrix(rng, n);
        (&a + a.adjoint()) * C64::from(0.5)
    }

    fn random_density(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
        let a = random_matrix(rng, n);
        let r = &a * a.adjoint();
        DensityMatrix::from_matrix_normalized(vec![n], r).unwrap()
    }

    #[test]
    fn destroy_small_dims() {
        assert_eq!(destroy(1).unwrap().matrix(), &CMatrix::zeros(1, 1));
        let a = destroy(3).unwrap();
        assert_eq!(a.matrix()[(0, 1)], C64::from(1.0));
        assert_eq!(a.matrix()[(1, 2)], C64::from(2f64.sqrt()));
        let nonzero = a.matrix().iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
        assert!(matches!(destroy(0), Err(Error::InvalidDimension(_))));
    }

    #[test]
    fn ladder_matrix_elements() {
        let dim = 9;
        let a = destroy(dim).unwrap();
        for m in 0..dim {
            for n in 0..dim {
                let expect = if m + 1 == n { (n as f64).sqrt() } else { 0.0 };
                assert_eq!(a.matrix()[(m, n)].re, expect);
            }
        }
    }

    #[test]
    fn truncated_commutator_is_identity_below_top() {
        let a = destroy(20).unwrap();
        let ad = create(20).unwrap();
        let c = a.commutator(&ad).unwrap();
        for k in 0..19 {
            assert!((c.matrix()[(k, k)] - ONE).norm() < 1e-14);
        }
        // the top level carries the truncation artefact −(dim−1)
        assert!((c.matrix()[(19, 19)] - C64::from(-19.0)).norm() < 1e-12);
    }

    #[test]
    fn spin_algebra() {
        let pm = sigma_plus().compose(&sigma_minus()).unwrap();
        assert_eq!(pm.matrix(), &CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]));
        let z2 = pauli_z().compose(&pauli_z()).unwrap();
        assert_eq!(z2.matrix(), &CMatrix::identity(2, 2));
        assert_eq!(create(4).unwrap(), destroy(4).unwrap().adjoint());
    }

    #[test]
    fn kron_examples() {
        let i2 = FockOperator::identity(2).unwrap();
        let i3 = FockOperator::identity(3).unwrap();
        let k = kron(&[&i2, &i3]).unwrap();
        assert_eq!(k.matrix(), &CMatrix::identity(6, 6));
        assert_eq!(k.dims(), &[2, 3]);

        let p = FockOperator::single(CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO])).unwrap();
        let k = kron(&[&p, &i2]).unwrap();
        let expect: Vec<f64> = vec![1.0, 1.0, 0.0, 0.0];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(k.matrix()[(i, i)].re, *e);
        }
        assert!(matches!(kron(&[]), Err(Error::EmptyOperands)));
    }

    #[test]
    fn kron_trace_factorizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let x = FockOperator::single(random_matrix(&mut rng, 3)).unwrap();
            let y = FockOperator::single(random_matrix(&mut rng, 3)).unwrap();
            let k = kron(&[&x, &y]).unwrap();
            assert!((k.trace() - x.trace() * y.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn kron_is_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = FockOperator::single(random_matrix(&mut rng, 2)).unwrap();
        let b = FockOperator::single(random_matrix(&mut rng, 3)).unwrap();
        let c = FockOperator::single(random_matrix(&mut rng, 2)).unwrap();
        let left = kron(&[&kron(&[&a, &b]).unwrap(), &c]).unwrap();
        let right = kron(&[&a, &kron(&[&b, &c]).unwrap()]).unwrap();
        assert!((left.matrix() - right.matrix()).camax() < 1e-14);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ra = random_density(&mut rng, 2);
        let rc = random_density(&mut rng, 3);
        let rm = random_density(&mut rng, 4);
        let full = kron(&[ra.op(), rc.op(), rm.op()]).unwrap();
        let full = DensityMatrix::new(full).unwrap();
        for (keep, want) in [
            (Subsystem::Atom, &ra),
            (Subsystem::Cavity, &rc),
            (Subsystem::Mechanics, &rm),
        ] {
            let red = partial_trace(&full, &[keep]).unwrap();
            assert!((red.matrix() - want.matrix()).camax() < 1e-12);
        }
        let cm = partial_trace(&full, &[Subsystem::Mechanics, Subsystem::Cavity]).unwrap();
        let want = kron(&[rc.op(), rm.op()]).unwrap();
        assert_eq!(cm.dims(), &[3, 4]);
        assert!((cm.matrix() - want.matrix()).camax() < 1e-12);
    }

    #[test]
    fn partial_trace_of_bell_pair() {
        let mut psi = CVector::zeros(4);
        psi[0] = C64::from(0.5f64.sqrt());
        psi[3] = C64::from(0.5f64.sqrt());
        let rho = DensityMatrix::pure(vec![2, 2], &psi).unwrap();
        for keep in [Subsystem::Cavity, Subsystem::Mechanics] {
            let red = partial_trace(&rho, &[keep]).unwrap();
            let half = CMatrix::identity(2, 2) * C64::from(0.5);
            assert!((red.matrix() - half).camax() < 1e-15);
        }
        assert!(matches!(
            partial_trace(&rho, &[Subsystem::Atom]),
            Err(Error::UnknownSubsystem(Subsystem::Atom))
        ));
    }

    #[test]
    fn expm_examples() {
        let z = FockOperator::zeros(vec![3]).unwrap();
        assert_eq!(expm(&z).unwrap().matrix(), &CMatrix::identity(3, 3));

        let e = expm(&pauli_z().scale(I * std::f64::consts::PI)).unwrap();
        assert!((e.matrix() + CMatrix::identity(2, 2)).camax() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2, 5, 12] {
            let h = FockOperator::single(random_hermitian(&mut rng, n) * C64::from(4.0)).unwrap();
            let p = expm(&h).unwrap();
            let spectral = matrix_function(&h, &ScalarMap::new(|x: f64| C64::from(x.exp()))).unwrap();
            let err = (p.matrix() - spectral.matrix()).norm() / p.matrix().norm();
            assert!(err < 1e-12, "n = {n}: {err}");
        }

        let mut bad = CMatrix::zeros(2, 2);
        bad[(0, 1)] = C64::new(f64::NAN, 0.0);
        assert!(matches!(expm(&FockOperator::single(bad).unwrap()), Err(Error::NonFinite)));
    }

    #[test]
    fn expm_of_unitary_generator_at_large_norm() {
        // ‖op‖ up to 50: exp(−iH) must stay unitary
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let h = random_hermitian(&mut rng, 8);
        let h = &h * C64::from(50.0 / h.norm());
        let u = expm(&FockOperator::single(-(h * I)).unwrap()).unwrap();
        let err = (u.matrix().adjoint() * u.matrix() - CMatrix::identity(8, 8)).norm();
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn matrix_function_examples() {
        let n = number(5).unwrap();
        let same = matrix_function(&n, &ScalarMap::new(C64::from)).unwrap();
        assert_eq!(same, n);

        let t = 0.7;
        let zero = FockOperator::zeros(vec![1]).unwrap();
        let s = matrix_function(&zero, &ScalarMap::sin_sqrt_over_sqrt(t)).unwrap();
        assert!((s.matrix()[(0, 0)] - C64::from(t)).norm() < 1e-15);

        let singular = ScalarMap::new(|x: f64| C64::from(1.0 / x));
        assert!(matches!(matrix_function(&n, &singular), Err(Error::SingularFunction(_))));
    }

    #[test]
    fn matrix_function_spectral_matches_eigen_route() {
        // diagonal input: entrywise route vs full eigendecomposition of a rotated copy
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let n = 6;
        let d: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..5.0)).collect();
        let diag = CMatrix::from_diagonal(&CVector::from_iterator(n, d.iter().map(|&x| C64::from(x))));
        let f = ScalarMap::sin_sqrt_over_sqrt(1.3);
        let direct = matrix_function(&FockOperator::single(diag.clone()).unwrap(), &f).unwrap();

        let h = random_hermitian(&mut rng, n);
        let u = expm(&FockOperator::single(h * I).unwrap()).unwrap().into_matrix();
        let rotated = &u * &diag * u.adjoint();
        let via_eig = matrix_function(&FockOperator::single(rotated).unwrap(), &f).unwrap();
        let back = u.adjoint() * via_eig.matrix() * &u;
        assert!((back - direct.matrix()).camax() < 1e-12);
    }

    #[test]
    fn matrix_function_commutes_with_argument() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let h = FockOperator::single(random_hermitian(&mut rng, 7)).unwrap();
        let f = matrix_function(&h, &ScalarMap::new(|x: f64| C64::from((2.0 * x).sin()))).unwrap();
        let c = f.commutator(&h).unwrap();
        assert!(c.matrix().norm() < 1e-10);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(FockOperator::identity(2).unwrap()).is_err());
        let bad = CMatrix::from_row_slice(2, 2, &[C64::from(1.5), ZERO, ZERO, C64::from(-0.5)]);
        assert!(DensityMatrix::new(FockOperator::single(bad).unwrap()).is_err());
        let mut skew = CMatrix::identity(2, 2) * C64::from(0.5);
        skew[(0, 1)] = C64::from(0.1);
        assert!(DensityMatrix::new(FockOperator::single(skew).unwrap()).is_err());
        assert!(thermal_state(10, 0.3).is_ok());
        assert!(coherent_state(30, C64::new(1.0, 0.5)).is_ok());
    }

    #[test]
    fn trace_distance_basics() {
        let a = fock_state(3, 0).unwrap();
        let b = fock_state(3, 1).unwrap();
        assert!((trace_distance(a.matrix(), b.matrix()) - 1.0).abs() < 1e-14);
        assert!(trace_distance(a.matrix(), a.matrix()) < 1e-15);
    }
}
