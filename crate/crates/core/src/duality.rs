//! Secrecy of one observable versus recoverability of its conjugate, as
//! executable constructions on concrete states.
//!
//! Every epsilon in a [`DualityReport`] is measured on the instance at hand.
//! The checks are implications between measured quantities, so a report with
//! `passed == false` is a genuine counterexample rather than an error.

use serde::{Deserialize, Serialize};

use crate::binlin::{complete_basis, dual_basis, BinaryMatrix};
use crate::config::tolerances;
use crate::entropy::{cq_cond_entropy, smooth_max_entropy, smooth_min_entropy, SmoothingBall};
use crate::qcore::linalg::{
    digits, fourier_bra_matrix, hermitian_part, identity, index_of, kron, kron_all, kron_vec, outer,
    product, reshape, ComplexMatrix, ComplexVector, ONE, ZERO,
};
use crate::qcore::random::{haar_state_rng, rng_from_seed};
use crate::qcore::{
    uhlmann_isometry_between, Basis, CqState, Isometry, Povm, PureStateVector,
};
use crate::entropy::guessing_probability;
use crate::protocols::{
    csi_p_guess, p_guess_with, p_secure, register_cq, run_pa, CsiProtocol, PaProtocol,
};
use crate::stabilizer::SubsystemSplit;
use crate::{Error, Result};

/// A pure state on `A B R`, stored with the subsystems in that order.
#[derive(Debug, Clone, PartialEq)]
pub struct TripartiteState {
    psi: PureStateVector,
    a: usize,
    b: usize,
}

impl TripartiteState {
    /// The first `a` subsystems are `A`, the next `b` are `B`, the rest `R`.
    pub fn new(psi: PureStateVector, a: usize, b: usize) -> Result<Self> {
        if a == 0 || a + b > psi.dims().len() {
            return Err(Error::InvalidSubsystems(format!(
                "cannot label {a} + {b} of {} subsystems",
                psi.dims().len()
            )));
        }
        Ok(Self { psi, a, b })
    }

    pub fn psi(&self) -> &PureStateVector {
        &self.psi
    }

    pub fn a_indices(&self) -> Vec<usize> {
        (0..self.a).collect()
    }

    pub fn b_indices(&self) -> Vec<usize> {
        (self.a..self.a + self.b).collect()
    }

    pub fn r_indices(&self) -> Vec<usize> {
        (self.a + self.b..self.psi.dims().len()).collect()
    }

    pub fn a_dims(&self) -> &[usize] {
        &self.psi.dims()[..self.a]
    }

    pub fn b_dims(&self) -> &[usize] {
        &self.psi.dims()[self.a..self.a + self.b]
    }

    pub fn r_dims(&self) -> &[usize] {
        &self.psi.dims()[self.a + self.b..]
    }

    pub fn a_dim(&self) -> usize {
        product(self.a_dims())
    }

    /// Number of qubits when `A` is a qubit register.
    pub fn qubits(&self) -> Result<usize> {
        if self.a_dims().iter().all(|&d| d == 2) {
            Ok(self.a)
        } else {
            Err(Error::Precondition(format!(
                "A = {:?} is not a qubit register",
                self.a_dims()
            )))
        }
    }

    fn cq(&self, basis: Basis, side: &[usize]) -> Result<CqState> {
        register_cq(&self.psi, basis, &self.a_indices(), side)
    }

    pub fn z_given_b(&self) -> Result<CqState> {
        self.cq(Basis::Computational, &self.b_indices())
    }

    pub fn z_given_r(&self) -> Result<CqState> {
        self.cq(Basis::Computational, &self.r_indices())
    }

    pub fn x_given_b(&self) -> Result<CqState> {
        self.cq(Basis::Fourier, &self.b_indices())
    }

    pub fn x_given_r(&self) -> Result<CqState> {
        self.cq(Basis::Fourier, &self.r_indices())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Theorem1,
    CaseA,
    CaseB,
    CsiToPa,
    PaToCsi,
}

/// Which structural hypothesis a state satisfies: `H(X^A|B) = 0` for
/// [`Case::A`], `H(Z^A|R) = 0` for [`Case::B`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub check: Check,
    pub epsilon: f64,
    pub bound: f64,
    pub achieved: f64,
    /// Distance by which the inequality holds; negative on a violation.
    pub slack: f64,
    pub passed: bool,
    pub key_length: Option<usize>,
    pub compressed_length: Option<usize>,
}

impl DualityReport {
    /// `achieved ≤ √(2ε)`.
    fn secrecy(check: Check, epsilon: f64, achieved: f64) -> Self {
        let bound = (2.0 * epsilon).sqrt();
        Self::finish(check, epsilon, bound, achieved, bound - achieved)
    }

    /// `achieved ≥ 1 − √(2ε)`.
    fn recovery(check: Check, epsilon: f64, achieved: f64) -> Self {
        let bound = 1.0 - (2.0 * epsilon).sqrt();
        Self::finish(check, epsilon, bound, achieved, achieved - bound)
    }

    fn finish(check: Check, epsilon: f64, bound: f64, achieved: f64, slack: f64) -> Self {
        Self {
            check,
            epsilon,
            bound,
            achieved,
            slack,
            passed: slack >= -tolerances().bound_slack,
            key_length: None,
            compressed_length: None,
        }
    }

    fn lengths(mut self, key: usize, compressed: usize) -> Self {
        self.key_length = Some(key);
        self.compressed_length = Some(compressed);
        self
    }
}

fn fourier_bras(dims: &[usize]) -> ComplexMatrix {
    kron_all(&dims.iter().map(|&d| fourier_bra_matrix(d)).collect::<Vec<_>>())
}

fn row_vector(m: &ComplexMatrix, r: usize) -> ComplexVector {
    ComplexVector::from_iterator(m.ncols(), m.row(r).iter().copied())
}

/// `U|φ> = Σ_z |z>_M ⊗ √Λ_z |φ>`, with `M` the first output factor.
pub fn coherent_measurement(decoder: &Povm) -> Result<Isometry> {
    let k = decoder.len();
    let d = decoder.dim();
    let mut u = ComplexMatrix::zeros(k * d, d);
    for (z, e) in decoder.elements().iter().enumerate() {
        let root = crate::qcore::linalg::sqrt_psd(e);
        u.view_mut((z * d, 0), (d, d)).copy_from(&root);
    }
    Isometry::new(u, vec![d], vec![k, d])
}

/// `p_secure(X^A|R) ≤ √(2ε)` with `ε = 1 − p_guess(Z^A|B)`; the guessing
/// probability comes from the SDP, the secrecy from an eigendecomposition.
pub fn verify_theorem1(state: &TripartiteState) -> Result<DualityReport> {
    let (p_guess, _) = guessing_probability(&state.z_given_b()?)?;
    let epsilon = (1.0 - p_guess).max(0.0);
    let secrecy = p_secure(&state.x_given_r()?);
    Ok(DualityReport::secrecy(Check::Theorem1, epsilon, secrecy))
}

fn check_distribution(p: &[f64], len: usize) -> Result<()> {
    if p.len() != len {
        return Err(Error::LengthMismatch {
            expected: len,
            got: p.len(),
        });
    }
    let total: f64 = p.iter().sum();
    if p.iter().any(|&x| x.is_nan() || x < 0.0) || (total - 1.0).abs() > tolerances().trace {
        return Err(Error::InvalidState(format!("not a distribution: {p:?}")));
    }
    Ok(())
}

fn bipartite_factors(states: &[PureStateVector], len: usize) -> Result<(usize, usize)> {
    if states.len() != len {
        return Err(Error::LengthMismatch {
            expected: len,
            got: states.len(),
        });
    }
    let dims = states[0].dims();
    if dims.len() != 2 || states.iter().any(|s| s.dims() != dims) {
        return Err(Error::DimensionMismatch(
            "conditional states must share dims [d1, d2]".into(),
        ));
    }
    Ok((dims[0], dims[1]))
}

/// `Σ_x √q_x |x̃>_A |x̃>_{B1} |ϑ_x>_{B2 R}` with `B1` a copy of `A`'s factors.
/// `theta` entries have dims `[d_B2, d_R]`.
pub fn build_case_a_state(
    a_dims: &[usize],
    qx: &[f64],
    theta: &[PureStateVector],
) -> Result<TripartiteState> {
    let d = product(a_dims);
    check_distribution(qx, d)?;
    let (db2, dr) = bipartite_factors(theta, d)?;
    let fb = fourier_bras(a_dims);
    let mut amps = ComplexVector::zeros(d * d * db2 * dr);
    for (x, (&q, t)) in qx.iter().zip(theta).enumerate() {
        let ket = row_vector(&fb, x).conjugate();
        amps += kron_vec(&kron_vec(&ket, &ket), t.amplitudes()).scale(q.sqrt());
    }
    let mut dims = [a_dims, a_dims].concat();
    dims.extend([db2, dr]);
    let n = a_dims.len();
    TripartiteState::new(PureStateVector::normalized(amps, dims)?, n, n + 1)
}

/// `Σ_z √p_z |z>_A |z>_{R1} |φ_z>_{B R2}` with `R1` a copy of `A`'s factors.
/// `phi` entries have dims `[d_B, d_R2]`; the layout is `A, B, R1, R2`.
pub fn build_case_b_state(
    a_dims: &[usize],
    pz: &[f64],
    phi: &[PureStateVector],
) -> Result<TripartiteState> {
    let d = product(a_dims);
    check_distribution(pz, d)?;
    let (db, dr2) = bipartite_factors(phi, d)?;
    let mut amps = ComplexVector::zeros(d * db * d * dr2);
    for (z, (&p, f)) in pz.iter().zip(phi).enumerate() {
        let s = p.sqrt();
        for b in 0..db {
            for r in 0..dr2 {
                amps[((z * db + b) * d + z) * dr2 + r] = f.amplitudes()[b * dr2 + r] * s;
            }
        }
    }
    let mut dims = a_dims.to_vec();
    dims.push(db);
    dims.extend(a_dims);
    dims.push(dr2);
    TripartiteState::new(PureStateVector::normalized(amps, dims)?, a_dims.len(), 1)
}

fn random_distribution(d: usize, rng: &mut impl rand::Rng) -> Vec<f64> {
    haar_state_rng(&[d], rng)
        .amplitudes()
        .iter()
        .map(|a| a.norm_sqr())
        .collect()
}

/// Case-(a) state with random weights and Haar-random `ϑ_x`.
pub fn random_case_a_state(a_dims: &[usize], b2: usize, r: usize, seed: u64) -> Result<TripartiteState> {
    let mut rng = rng_from_seed(seed);
    let d = product(a_dims);
    let q = random_distribution(d, &mut rng);
    let theta: Vec<_> = (0..d).map(|_| haar_state_rng(&[b2, r], &mut rng)).collect();
    build_case_a_state(a_dims, &q, &theta)
}

/// Case-(b) state with random weights and Haar-random `φ_z`.
pub fn random_case_b_state(a_dims: &[usize], b: usize, r2: usize, seed: u64) -> Result<TripartiteState> {
    let mut rng = rng_from_seed(seed);
    let d = product(a_dims);
    let p = random_distribution(d, &mut rng);
    let phi: Vec<_> = (0..d).map(|_| haar_state_rng(&[b, r2], &mut rng)).collect();
    build_case_b_state(a_dims, &p, &phi)
}

/// Haar-random pure state on `A B R`.
pub fn random_tripartite(
    a_dims: &[usize],
    b_dims: &[usize],
    r_dims: &[usize],
    seed: u64,
) -> Result<TripartiteState> {
    let dims = [a_dims, b_dims, r_dims].concat();
    let psi = crate::qcore::haar_state(&dims, seed);
    TripartiteState::new(psi, a_dims.len(), b_dims.len())
}

/// `Σ_z |z z z> / √d` on `A B R`.
pub fn ghz_state(d: usize) -> Result<TripartiteState> {
    let mut amps = ComplexVector::zeros(d * d * d);
    for z in 0..d {
        amps[(z * d + z) * d + z] = ONE;
    }
    TripartiteState::new(PureStateVector::normalized(amps, vec![d, d, d])?, 1, 1)
}

/// `(|0> + i|1>)/√2` on `A`, a Bell pair on `B R`.
pub fn itilde_product_state() -> Result<TripartiteState> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let a = ComplexVector::from_vec(vec![ONE.scale(s), crate::qcore::c64(0.0, s)]);
    let br = ComplexVector::from_vec(vec![ONE.scale(s), ZERO, ZERO, ONE.scale(s)]);
    TripartiteState::new(PureStateVector::new(kron_vec(&a, &br), vec![2, 2, 2])?, 1, 1)
}

fn require_case(state: &TripartiteState, case: Case) -> Result<()> {
    let h = match case {
        Case::A => cq_cond_entropy(&state.x_given_b()?),
        Case::B => cq_cond_entropy(&state.z_given_r()?),
    };
    if h > tolerances().case_detection {
        return Err(Error::Precondition(format!(
            "state is not of case-{case:?} form: conditional entropy {h:.3e}"
        )));
    }
    Ok(())
}

fn negate(z: usize, dims: &[usize]) -> usize {
    let neg: Vec<usize> = digits(z, dims)
        .iter()
        .zip(dims)
        .map(|(&v, &d)| (d - v) % d)
        .collect();
    index_of(&neg, dims)
}

/// `Λ_z = V† (|−z><−z|_{B1} ⊗ 1) V` with `V = Σ_x |x̃><x̃|_{B1} ⊗ W_x`, where
/// `W_x` is the Uhlmann map from `ϑ_x` into the whole state sharing `R`.
/// `B` must begin with a copy `B1` of `A`'s factors.
fn case_a_povm(state: &TripartiteState) -> Result<Povm> {
    let (na, nb) = (state.a, state.b);
    let a_dims = state.a_dims();
    if nb < na || &state.b_dims()[..na] != a_dims {
        return Err(Error::Precondition(
            "B must start with a copy of A's factors".into(),
        ));
    }
    let psi = &state.psi;
    let d = product(a_dims);
    let rest = psi.dim() / (d * d);
    let db2 = product(&state.b_dims()[na..]);
    let dpur = d * d * db2;
    let tail_dims = psi.dims()[2 * na..].to_vec();
    let r_shared = state.r_indices();
    let theta_shared: Vec<usize> = (nb - na..tail_dims.len()).collect();

    let fb = fourier_bras(a_dims);
    let on_a = &fb * reshape(psi.amplitudes(), d, d * rest);
    let mut v = ComplexMatrix::zeros(d * dpur, d * db2);
    for x in 0..d {
        let branch = reshape(&row_vector(&on_a, x), d, rest);
        let vx = ComplexVector::from_iterator(rest, (fb.row(x) * branch).iter().copied());
        let w = if vx.norm_squared() > 1e-14 {
            let theta = PureStateVector::normalized(vx, tail_dims.clone())?;
            uhlmann_isometry_between(psi, &r_shared, &theta, &theta_shared)?
                .phi_to_psi_map()
                .clone()
        } else {
            ComplexMatrix::identity(dpur, db2)
        };
        v += kron(&outer(&fb.row(x).adjoint()), &w);
    }
    let elements = (0..d)
        .map(|z| {
            let block = v.rows(negate(z, a_dims) * dpur, dpur);
            hermitian_part(&(block.adjoint() * block))
        })
        .collect();
    Povm::new(elements)
}

/// `Λ_z = W† (|z><z|_M ⊗ 1_B) W` with `W` the Uhlmann map from the
/// `X = 0` branch `θ^{BR}` into the whole state sharing `R`.
fn case_b_povm(state: &TripartiteState) -> Result<Povm> {
    let psi = &state.psi;
    let d = state.a_dim();
    let rest = psi.dim() / d;
    let db = product(state.b_dims());
    let fb = fourier_bras(state.a_dims());
    let row = fb.row(0) * reshape(psi.amplitudes(), d, rest);
    let theta = PureStateVector::normalized(
        ComplexVector::from_iterator(rest, row.iter().copied()),
        psi.dims()[state.a..].to_vec(),
    )?;
    let theta_shared: Vec<usize> = (state.b..state.b + state.r_dims().len()).collect();
    let u = uhlmann_isometry_between(psi, &state.r_indices(), &theta, &theta_shared)?;
    let w = u.phi_to_psi_map();
    let elements = (0..d)
        .map(|z| {
            let block = w.rows(z * db, db);
            hermitian_part(&(block.adjoint() * block))
        })
        .collect();
    Povm::new(elements)
}

fn recover(state: &TripartiteState, case: Case) -> Result<(Povm, DualityReport)> {
    require_case(state, case)?;
    let povm = match case {
        Case::A => case_a_povm(state)?,
        Case::B => case_b_povm(state)?,
    };
    let epsilon = p_secure(&state.x_given_r()?);
    let achieved = p_guess_with(&state.z_given_b()?, &povm)?;
    let check = match case {
        Case::A => Check::CaseA,
        Case::B => Check::CaseB,
    };
    Ok((povm, DualityReport::recovery(check, epsilon, achieved)))
}

/// Recovery measurement on `B = B1 B2` for a state with `H(X^A|B) = 0`.
pub fn recover_measurement_case_a(state: &TripartiteState) -> Result<(Povm, DualityReport)> {
    recover(state, Case::A)
}

/// Recovery measurement on `B` for a state with `H(Z^A|R) = 0`.
pub fn recover_measurement_case_b(state: &TripartiteState) -> Result<(Povm, DualityReport)> {
    recover(state, Case::B)
}

/// Repurpose a compressor as an extractor: the rows of the dual basis paired
/// with the completion of `f` hash the Fourier outcome into a key secure
/// against `R`.
pub fn csi_to_pa(state: &TripartiteState, protocol: &CsiProtocol) -> Result<DualityReport> {
    let n = state.qubits()?;
    let f = protocol.compressor();
    if f.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "compressor acts on {} bits, A has {n} qubits",
            f.cols()
        )));
    }
    let ell = f.rows();
    let epsilon = (1.0 - csi_p_guess(&state.z_given_b()?, protocol)?).max(0.0);
    let dual = dual_basis(&f.stack(&complete_basis(f)?)?)?;
    let extractor = PaProtocol::new(dual.row_range(ell, n))?;
    let (_, report) = run_pa(&state.psi, &state.a_indices(), &state.r_indices(), &extractor)?;
    Ok(DualityReport::secrecy(Check::CsiToPa, epsilon, report.achieved).lengths(n - ell, ell))
}

/// Permute the computational basis of a qubit register occupying
/// subsystems `start..start + n`.
fn relabel_register(
    amps: &ComplexVector,
    dims: &[usize],
    start: usize,
    n: usize,
    perm: &[usize],
) -> ComplexVector {
    let hi = product(&dims[..start]);
    let mid = 1usize << n;
    let lo = product(&dims[start + n..]);
    let mut out = ComplexVector::zeros(amps.len());
    for h in 0..hi {
        for (m, &pm) in perm.iter().enumerate() {
            for l in 0..lo {
                out[(h * mid + pm) * lo + l] = amps[(h * mid + m) * lo + l];
            }
        }
    }
    out
}

/// Repurpose an extractor as a compressor. With `(f; f⊥)` the dual basis of
/// `(g; g_c)`, the compressed value is `f⊥(z)`; conditioned on it, the
/// matching recovery construction guesses `f(z)` from `B`.
pub fn pa_to_csi(
    state: &TripartiteState,
    g: &BinaryMatrix,
    case: Case,
) -> Result<(CsiProtocol, DualityReport)> {
    let n = state.qubits()?;
    if g.cols() != n {
        return Err(Error::DimensionMismatch(format!(
            "extractor acts on {} bits, A has {n} qubits",
            g.cols()
        )));
    }
    require_case(state, case)?;
    let ell = g.rows();
    let compressed = n - ell;
    let pa = PaProtocol::new(g.clone())?;
    let (_, pa_report) = run_pa(&state.psi, &state.a_indices(), &state.r_indices(), &pa)?;
    let epsilon = pa_report.achieved;

    let paired = dual_basis(&g.stack(&complete_basis(g)?)?)?;
    let f_perp = paired.row_range(ell, n);
    let split = SubsystemSplit::from_parts(paired.row_range(0, ell), f_perp.clone())?;
    let perm = split.permutation();

    let dims = state.psi.dims().to_vec();
    let mut amps = relabel_register(state.psi.amplitudes(), &dims, 0, n, perm);
    let b_dims = state.b_dims().to_vec();
    let db = product(&b_dims);
    // In case (a) the copy B1 carries the same labels as A.
    let b_relabel = match case {
        Case::A => {
            if state.b < n || b_dims[..n].iter().any(|&d| d != 2) {
                return Err(Error::Precondition(
                    "B must start with a copy of A's qubits".into(),
                ));
            }
            amps = relabel_register(&amps, &dims, n, n, perm);
            Some(kron(&split.relabel(), &identity(db >> n)))
        }
        Case::B => None,
    };

    let rest = state.psi.dim() >> n;
    let rest_dims = dims[n..].to_vec();
    let values = 1usize << compressed;
    let mut decoders = Vec::with_capacity(values);
    for c in 0..values {
        let mut elements = vec![ComplexMatrix::zeros(db, db); 1 << n];
        if ell == 0 {
            elements[perm.iter().position(|&w| w == c).expect("bijection")] = identity(db);
            decoders.push(Povm::new(elements)?);
            continue;
        }
        let projected = ComplexVector::from_iterator(
            rest << ell,
            (0..1usize << ell).flat_map(|zbar| {
                let base = ((zbar << compressed) | c) * rest;
                amps.rows(base, rest).iter().copied().collect::<Vec<_>>()
            }),
        );
        if projected.norm_squared() < 1e-14 {
            elements[0] = identity(db);
            decoders.push(Povm::new(elements)?);
            continue;
        }
        let mut cond_dims = vec![2; ell];
        cond_dims.extend(&rest_dims);
        let cond = TripartiteState::new(
            PureStateVector::normalized(projected, cond_dims)?,
            ell,
            state.b,
        )?;
        let local = match case {
            Case::A => case_a_povm(&cond)?,
            Case::B => case_b_povm(&cond)?,
        };
        for (z, &w) in perm.iter().enumerate() {
            if w & (values - 1) == c {
                let e = &local.elements()[w >> compressed];
                elements[z] = match &b_relabel {
                    Some(p) => p.adjoint() * e * p,
                    None => e.clone(),
                };
            }
        }
        decoders.push(Povm::new(elements)?);
    }
    let protocol = CsiProtocol::new(f_perp, decoders)?;
    let achieved = csi_p_guess(&state.z_given_b()?, &protocol)?;
    let report = DualityReport::recovery(Check::PaToCsi, epsilon, achieved).lengths(ell, compressed);
    Ok((protocol, report))
}

/// `H(X^A|R) + H(Z^A|B)` against a lower bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub h_x_r: f64,
    pub h_z_b: f64,
    pub bound: f64,
    pub slack: f64,
    pub passed: bool,
    /// The bound is non-positive, so the inequality holds trivially.
    pub vacuous: bool,
}

impl UncertaintyReport {
    fn new(h_x_r: f64, h_z_b: f64, bound: f64) -> Self {
        let slack = h_x_r + h_z_b - bound;
        Self {
            h_x_r,
            h_z_b,
            bound,
            slack,
            passed: slack >= -tolerances().bound_slack,
            vacuous: bound <= 0.0,
        }
    }
}

/// `H(X^A|R) + H(Z^A|B) ≥ log₂ d`.
pub fn check_uncertainty(state: &TripartiteState) -> Result<UncertaintyReport> {
    let h_x_r = cq_cond_entropy(&state.x_given_r()?);
    let h_z_b = cq_cond_entropy(&state.z_given_b()?);
    Ok(UncertaintyReport::new(h_x_r, h_z_b, (state.a_dim() as f64).log2()))
}

/// `H_min^δ(X^A|R) + H_max^δ(Z^A|B) ≥ log₂ d − 8 log₂(1/δ) − 12`.
pub fn check_smooth_uncertainty(state: &TripartiteState, delta: f64) -> Result<UncertaintyReport> {
    let d = state.a_dim();
    if !d.is_power_of_two() {
        return Err(Error::Precondition(format!("dimension {d} is not a power of two")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Precondition(format!("δ = {delta} outside (0, 1)")));
    }
    let ball = SmoothingBall::new(delta)?;
    let side = |cq: &CqState| -> (crate::qcore::DensityOperator, Vec<usize>) {
        let rho = cq.to_density();
        let idx = (1..rho.dims().len()).collect();
        (rho, idx)
    };
    let (rx, ix) = side(&state.x_given_r()?);
    let (rz, iz) = side(&state.z_given_b()?);
    let h_min = smooth_min_entropy(&rx, &ix, ball)?;
    let h_max = smooth_max_entropy(&rz, &iz, ball)?;
    let bound = (d as f64).log2() - 8.0 * (1.0 / delta).log2() - 12.0;
    Ok(UncertaintyReport::new(h_min, h_max, bound))
}
