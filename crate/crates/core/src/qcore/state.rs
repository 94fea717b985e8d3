//! Validated state, isometry and measurement types.


use super::linalg::*;
use crate::config::tolerances;
use crate::{Error, Result};

fn check_dims(dims: &[usize], side: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::DimensionMismatch(format!("bad dimension list {dims:?}")));
    }
    if product(dims) != side {
        return Err(Error::DimensionMismatch(format!(
            "dims {dims:?} do not multiply to {side}"
        )));
    }
    if side > 4096 {
        return Err(Error::Envelope(format!("dimension {side} too large")));
    }
    Ok(())
}

/// Normalized pure state with an ordered list of subsystem dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct PureStateVector {
    amps: ComplexVector,
    dims: Vec<usize>,
}

impl PureStateVector {
    pub fn new(amps: ComplexVector, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amps.len())?;
        if !amps.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > tolerances().norm {
            return Err(Error::InvalidState(format!("norm {norm} differs from 1")));
        }
        Ok(Self { amps, dims })
    }

    /// Scale a nonzero vector to unit norm.
    pub fn normalized(amps: ComplexVector, dims: Vec<usize>) -> Result<Self> {
        let norm = amps.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState("cannot normalize zero vector".into()));
        }
        Self::new(amps.unscale(norm), dims)
    }

    /// Computational basis state `|index>`.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let n = product(&dims);
        if index >= n {
            return Err(Error::InvalidState(format!("basis index {index} >= {n}")));
        }
        let mut v = ComplexVector::zeros(n);
        v[index] = ONE;
        Self::new(v, dims)
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amps
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            amps: kron_vec(&self.amps, &other.amps),
            dims,
        }
    }

    /// Reorder subsystems so that new subsystem `i` is old subsystem `order[i]`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let (amps, dims) = permute_vector(&self.amps, &self.dims, order)?;
        Ok(Self { amps, dims })
    }

    /// Merge all subsystems into one factor.
    pub fn flattened(&self) -> Self {
        Self {
            amps: self.amps.clone(),
            dims: vec![self.amps.len()],
        }
    }

    /// Replace the dimension list by a compatible one.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, self.amps.len())?;
        Ok(Self {
            amps: self.amps.clone(),
            dims,
        })
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::trusted(outer(&self.amps), self.dims.clone())
    }

    /// Marginal on `keep` computed directly from the amplitudes.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityOperator> {
        let (m, kept) = reduced_from_vector(&self.amps, &self.dims, keep)?;
        Ok(DensityOperator::trusted(m, kept))
    }

    /// `|<self|other>|`
    pub fn overlap(&self, other: &Self) -> Result<f64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(self.amps.dotc(&other.amps).norm())
    }
}

/// Reduced density matrix of a (not necessarily normalized) vector.
pub fn reduced_from_vector(
    v: &ComplexVector,
    dims: &[usize],
    keep: &[usize],
) -> Result<(ComplexMatrix, Vec<usize>)> {
    let keep = check_index_set(keep, dims.len())?;
    let order = order_with_front(&keep, dims.len());
    let (p, pd) = permute_vector(v, dims, &order)?;
    let dk = product(&pd[..keep.len()]);
    let m = reshape(&p, dk, v.len() / dk);
    let rho = &m * m.adjoint();
    let kept = if keep.is_empty() {
        vec![1]
    } else {
        pd[..keep.len()].to_vec()
    };
    Ok((hermitian_part(&rho), kept))
}

/// Positive semidefinite operator of unit trace (or at most unit trace, when
/// flagged subnormalized) with subsystem dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    mat: ComplexMatrix,
    dims: Vec<usize>,
    subnormalized: bool,
}

impl DensityOperator {
    fn validate(mat: &ComplexMatrix, dims: &[usize]) -> Result<f64> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch("density matrix not square".into()));
        }
        check_dims(dims, mat.nrows())?;
        if !is_finite(mat) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let tol = tolerances();
        let defect = hermitian_defect(mat);
        if defect > tol.hermitian {
            return Err(Error::InvalidState(format!("not Hermitian (defect {defect:e})")));
        }
        let min = eigenvalues_hermitian(mat).first().copied().unwrap_or(0.0);
        if min < -tol.eigen_floor {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(trace(mat).re)
    }

    pub fn new(mat: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let tr = Self::validate(&mat, &dims)?;
        if (tr - 1.0).abs() > tolerances().trace {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        Ok(Self {
            mat: hermitian_part(&mat),
            dims,
            subnormalized: false,
        })
    }

    /// Positive operator with trace in `(0, 1]`, used for smoothing.
    pub fn new_subnormalized(mat: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let tr = Self::validate(&mat, &dims)?;
        if tr > 1.0 + tolerances().trace || tr <= 0.0 {
            return Err(Error::InvalidState(format!("trace {tr} outside (0, 1]")));
        }
        Ok(Self {
            mat: hermitian_part(&mat),
            dims,
            subnormalized: true,
        })
    }

    /// Build from a matrix known to be a state by construction.
    pub(crate) fn trusted(mat: ComplexMatrix, dims: Vec<usize>) -> Self {
        Self {
            mat: hermitian_part(&mat),
            dims,
            subnormalized: false,
        }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let n = product(&dims);
        Self::trusted(identity(n).unscale(n as f64), dims)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn is_subnormalized(&self) -> bool {
        self.subnormalized
    }

    pub fn trace(&self) -> f64 {
        trace(&self.mat).re
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            mat: kron(&self.mat, &other.mat),
            dims,
            subnormalized: self.subnormalized || other.subnormalized,
        }
    }

    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let (mat, dims) = permute_matrix(&self.mat, &self.dims, order)?;
        Ok(Self {
            mat,
            dims,
            subnormalized: self.subnormalized,
        })
    }

    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, self.dim())?;
        Ok(Self {
            mat: self.mat.clone(),
            dims,
            subnormalized: self.subnormalized,
        })
    }

    /// Eigenvalues (ascending) with dust clamped to zero.
    pub fn spectrum(&self) -> Vec<f64> {
        eigenvalues_hermitian(&self.mat)
            .into_iter()
            .map(|l| l.max(0.0))
            .collect()
    }

    /// Conjugate by a unitary acting on the whole space.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch("unitary size".into()));
        }
        Ok(Self {
            mat: hermitian_part(&(u * &self.mat * u.adjoint())),
            dims: self.dims.clone(),
            subnormalized: self.subnormalized,
        })
    }
}

/// Isometry `W` (`W^H W = 1`) between multipartite spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    mat: ComplexMatrix,
    in_dims: Vec<usize>,
    out_dims: Vec<usize>,
}

impl Isometry {
    pub fn new(mat: ComplexMatrix, in_dims: Vec<usize>, out_dims: Vec<usize>) -> Result<Self> {
        check_dims(&in_dims, mat.ncols())?;
        check_dims(&out_dims, mat.nrows())?;
        if mat.nrows() < mat.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "isometry {}x{} has fewer rows than columns",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let defect = max_abs(&(mat.adjoint() * &mat - identity(mat.ncols())));
        if defect > tolerances().isometry {
            return Err(Error::NotIsometry(defect));
        }
        Ok(Self {
            mat,
            in_dims,
            out_dims,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn in_dims(&self) -> &[usize] {
        &self.in_dims
    }

    pub fn out_dims(&self) -> &[usize] {
        &self.out_dims
    }

    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        if v.len() != self.mat.ncols() {
            return Err(Error::DimensionMismatch("isometry input".into()));
        }
        Ok(&self.mat * v)
    }
}

/// Positive operators summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidPovm("no elements".into()))?;
        let n = first.nrows();
        let tol = tolerances();
        let mut sum = ComplexMatrix::zeros(n, n);
        for (k, e) in elements.iter().enumerate() {
            if e.nrows() != n || e.ncols() != n {
                return Err(Error::InvalidPovm(format!("element {k} has wrong shape")));
            }
            if hermitian_defect(e) > tol.hermitian.max(tol.povm) {
                return Err(Error::InvalidPovm(format!("element {k} not Hermitian")));
            }
            let min = eigenvalues_hermitian(e).first().copied().unwrap_or(0.0);
            if min < -tol.eigen_floor {
                return Err(Error::InvalidPovm(format!(
                    "element {k} has eigenvalue {min:e}"
                )));
            }
            sum += e;
        }
        let defect = max_abs(&(sum - identity(n)));
        if defect > tol.povm {
            return Err(Error::InvalidPovm(format!("completeness defect {defect:e}")));
        }
        Ok(Self {
            elements: elements.iter().map(hermitian_part).collect(),
        })
    }

    /// Projective measurement in the computational basis of dimension `d`.
    pub fn computational(d: usize) -> Self {
        Self {
            elements: (0..d)
                .map(|k| ComplexMatrix::from_fn(d, d, |i, j| if i == k && j == k { ONE } else { ZERO }))
                .collect(),
        }
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].nrows()
    }

    pub fn into_elements(self) -> Vec<ComplexMatrix> {
        self.elements
    }
}

/// Classical-quantum ensemble `Σ_z p_z |z><z| ⊗ φ_z`.
#[derive(Debug, Clone, PartialEq)]
pub struct CqState {
    probs: Vec<f64>,
    conditionals: Vec<DensityOperator>,
    side_dims: Vec<usize>,
}

impl CqState {
    pub fn new(probs: Vec<f64>, conditionals: Vec<DensityOperator>) -> Result<Self> {
        if probs.is_empty() || probs.len() != conditionals.len() {
            return Err(Error::LengthMismatch {
                expected: probs.len(),
                got: conditionals.len(),
            });
        }
        if probs.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
            return Err(Error::InvalidState("negative or non-finite probability".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > tolerances().trace {
            return Err(Error::InvalidState(format!("probabilities sum to {total}")));
        }
        let side_dims = conditionals[0].dims().to_vec();
        if conditionals.iter().any(|c| c.dims() != side_dims.as_slice()) {
            return Err(Error::DimensionMismatch("conditionals differ in dims".into()));
        }
        Ok(Self {
            probs,
            conditionals,
            side_dims,
        })
    }

    pub(crate) fn trusted(probs: Vec<f64>, conditionals: Vec<DensityOperator>) -> Self {
        let side_dims = conditionals[0].dims().to_vec();
        Self {
            probs,
            conditionals,
            side_dims,
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn conditionals(&self) -> &[DensityOperator] {
        &self.conditionals
    }

    pub fn side_dims(&self) -> &[usize] {
        &self.side_dims
    }

    pub fn alphabet(&self) -> usize {
        self.probs.len()
    }

    pub fn side_dim(&self) -> usize {
        product(&self.side_dims)
    }

    /// `Σ_z p_z φ_z`
    pub fn side_average(&self) -> ComplexMatrix {
        let n = self.side_dim();
        self.probs
            .iter()
            .zip(&self.conditionals)
            .fold(ComplexMatrix::zeros(n, n), |acc, (&p, c)| acc + c.matrix().scale(p))
    }

    /// The block-diagonal density operator on (Z, S).
    pub fn to_density(&self) -> DensityOperator {
        let d = self.alphabet();
        let s = self.side_dim();
        let mut m = ComplexMatrix::zeros(d * s, d * s);
        for (z, (&p, c)) in self.probs.iter().zip(&self.conditionals).enumerate() {
            m.view_mut((z * s, z * s), (s, s)).copy_from(&c.matrix().scale(p));
        }
        let mut dims = vec![d];
        dims.extend_from_slice(&self.side_dims);
        DensityOperator::trusted(m, dims)
    }

    /// Trace out side subsystems, keeping `keep` (indices into `side_dims`).
    pub fn restrict_side(&self, keep: &[usize]) -> Result<Self> {
        let conditionals = self
            .conditionals
            .iter()
            .map(|c| partial_trace(c, keep))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::trusted(self.probs.clone(), conditionals))
    }
}

/// Marginal on the subsystems listed in `keep` (kept in ascending order).
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let (mat, dims) = if keep.is_empty() {
        (
            ComplexMatrix::from_element(1, 1, trace(rho.matrix())),
            vec![1],
        )
    } else {
        partial_trace_matrix(rho.matrix(), rho.dims(), keep)?
    };
    Ok(DensityOperator {
        mat: hermitian_part(&mat),
        dims,
        subnormalized: rho.subnormalized,
    })
}

/// Purification `Σ_i √λ_i |v_i>|i>` with purifying dimension equal to the
/// numerical rank of `rho`. The purifying factor is appended last.
pub fn purify(rho: &DensityOperator) -> PureStateVector {
    let e = eigh(rho.matrix());
    let cutoff = 1e-14 * e.values.last().copied().unwrap_or(1.0).max(1e-300);
    let kept: Vec<usize> = (0..e.values.len())
        .rev()
        .filter(|&i| e.values[i] > cutoff)
        .collect();
    let r = kept.len().max(1);
    let n = rho.dim();
    let mut v = ComplexVector::zeros(n * r);
    for (k, &i) in kept.iter().enumerate() {
        let s = e.values[i].sqrt();
        for a in 0..n {
            v[a * r + k] = e.vectors[(a, i)] * s;
        }
    }
    let norm = v.norm();
    let mut dims = rho.dims().to_vec();
    dims.push(r);
    PureStateVector {
        amps: v.unscale(norm),
        dims,
    }
}

fn same_shape(rho: &DensityOperator, sigma: &DensityOperator) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{:?} vs {:?}",
            rho.dims(),
            sigma.dims()
        )));
    }
    Ok(())
}

/// `F(ρ, σ) = ‖√ρ √σ‖₁`
pub fn fidelity(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_shape(rho, sigma)?;
    Ok(root_fidelity(rho.matrix(), sigma.matrix()).clamp(0.0, 1.0))
}

/// `‖√P √Q‖₁` for positive semidefinite matrices (no normalization assumed).
pub fn root_fidelity(p: &ComplexMatrix, q: &ComplexMatrix) -> f64 {
    trace_norm(&(sqrt_psd(p) * sqrt_psd(q)))
}

/// `D(ρ, σ) = ½‖ρ − σ‖₁`
pub fn trace_distance(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    same_shape(rho, sigma)?;
    Ok((0.5 * trace_norm_hermitian(&(rho.matrix() - sigma.matrix()))).clamp(0.0, 1.0))
}

/// Optimal Uhlmann map between the purifying factors of two pure states.
#[derive(Debug, Clone)]
pub struct Uhlmann {
    /// The partial isometry, oriented from the smaller purifying factor into
    /// the larger one.
    pub isometry: Isometry,
    /// `true` when the isometry maps the purifying factor of `phi` into that
    /// of `psi`; `false` when it maps the other way.
    pub phi_to_psi: bool,
    /// Achieved `|<ψ|(1⊗W)|φ>|`, equal to the fidelity of the shared marginals.
    pub overlap: f64,
    w: ComplexMatrix,
}

impl Uhlmann {
    /// The contraction `W` from `phi`'s purifying factor to `psi`'s.
    pub fn phi_to_psi_map(&self) -> &ComplexMatrix {
        &self.w
    }
}

/// Uhlmann isometry when the shared subsystems sit at the same positions in
/// both states.
pub fn uhlmann_isometry(
    psi: &PureStateVector,
    phi: &PureStateVector,
    shared: &[usize],
) -> Result<Uhlmann> {
    uhlmann_isometry_between(psi, shared, phi, shared)
}

/// Find `W` on the non-shared factors maximizing `|<ψ|(1⊗W)|φ>|`.
///
/// The non-shared factors of each state keep their relative order; `W` maps
/// the flattened non-shared space of `phi` to that of `psi`.
pub fn uhlmann_isometry_between(
    psi: &PureStateVector,
    psi_shared: &[usize],
    phi: &PureStateVector,
    phi_shared: &[usize],
) -> Result<Uhlmann> {
    let (k1, p1, s1) = split_purifying(psi, psi_shared)?;
    let (k2, p2, s2) = split_purifying(phi, phi_shared)?;
    if s1 != s2 {
        return Err(Error::DimensionMismatch(format!(
            "shared factors {s1:?} vs {s2:?}"
        )));
    }
    // O[a, b] = Σ_s conj Ψ[s, a] Φ[s, b];  the overlap with (1⊗W) is Tr(W Oᵀ)
    let k = (k1.adjoint() * &k2).transpose();
    let svd = k.svd(true, true);
    let u = svd.u.ok_or_else(|| Error::InvalidState("SVD failed".into()))?;
    let v_t = svd.v_t.ok_or_else(|| Error::InvalidState("SVD failed".into()))?;
    let overlap: f64 = svd.singular_values.iter().sum();
    let w = v_t.adjoint() * u.adjoint();
    let (d1, d2) = (product(&p1), product(&p2));
    let (isometry, phi_to_psi) = if d2 <= d1 {
        (Isometry::new(w.clone(), p2, p1)?, true)
    } else {
        (Isometry::new(w.adjoint(), p1, p2)?, false)
    };
    Ok(Uhlmann {
        isometry,
        phi_to_psi,
        overlap,
        w,
    })
}

/// Reshape a pure state as a (shared × purifying) matrix.
fn split_purifying(
    psi: &PureStateVector,
    shared: &[usize],
) -> Result<(ComplexMatrix, Vec<usize>, Vec<usize>)> {
    let k = psi.dims().len();
    if shared.iter().any(|&i| i >= k) || {
        let mut s = shared.to_vec();
        s.sort_unstable();
        s.windows(2).any(|w| w[0] == w[1])
    } {
        return Err(Error::InvalidSubsystems(format!("shared set {shared:?}")));
    }
    let order = order_with_front(shared, k);
    let p = psi.permute(&order)?;
    let shared_dims = p.dims()[..shared.len()].to_vec();
    let mut pur_dims = p.dims()[shared.len()..].to_vec();
    if pur_dims.is_empty() {
        pur_dims.push(1);
    }
    let ds = product(&shared_dims);
    Ok((
        reshape(p.amplitudes(), ds, p.dim() / ds),
        pur_dims,
        shared_dims,
    ))
}
