//! Privacy amplification by linear hashing and compression with quantum side
//! information decoded by the pretty-good measurement.

use serde::{Deserialize, Serialize};

use crate::binlin::{BinaryMatrix, BitVector};
use crate::config::tolerances;
use crate::entropy::{smooth_max_entropy, smooth_min_entropy, SmoothingBall};
use crate::qcore::linalg::{
    hermitian_part, identity, inv_sqrt_on_support, product, trace_norm_hermitian, ComplexMatrix,
};
use crate::qcore::measure::{branches, measure_basis_many, Basis};
use crate::qcore::state::{reduced_from_vector, CqState, DensityOperator, Povm, PureStateVector};
use crate::{Error, Result};

/// Distance of a cq state from a uniform key independent of the side system:
/// `½ Σ_z ‖p_z φ_z − ρ_S / d‖₁`.
pub fn p_secure(cq: &CqState) -> f64 {
    let avg = cq.side_average().unscale(cq.alphabet() as f64);
    let total: f64 = cq
        .probs()
        .iter()
        .zip(cq.conditionals())
        .map(|(&p, c)| trace_norm_hermitian(&(c.matrix().scale(p) - &avg)))
        .sum();
    (0.5 * total).clamp(0.0, 1.0)
}

/// Success probability `Σ_z p_z Tr(Λ_z φ_z)` of a given decoder.
pub fn p_guess_with(cq: &CqState, decoder: &Povm) -> Result<f64> {
    if decoder.len() != cq.alphabet() {
        return Err(Error::LengthMismatch {
            expected: cq.alphabet(),
            got: decoder.len(),
        });
    }
    if decoder.dim() != cq.side_dim() {
        return Err(Error::DimensionMismatch(format!(
            "decoder acts on dimension {}, side system has {}",
            decoder.dim(),
            cq.side_dim()
        )));
    }
    let v: f64 = cq
        .probs()
        .iter()
        .zip(cq.conditionals())
        .zip(decoder.elements())
        .map(|((&p, c), l)| p * (l * c.matrix()).trace().re)
        .sum();
    Ok(v.clamp(0.0, 1.0))
}

/// Pretty-good measurement `Λ_z = S^{-1/2} p_z φ_z S^{-1/2}`; the part of the
/// identity outside the support of `S` is added to `Λ_0`.
pub fn pgm(cq: &CqState) -> Povm {
    let s = cq.side_average();
    let n = s.nrows();
    let t = inv_sqrt_on_support(&s, tolerances().pgm_cutoff);
    let mut elements: Vec<ComplexMatrix> = cq
        .probs()
        .iter()
        .zip(cq.conditionals())
        .map(|(&p, c)| hermitian_part(&(&t * c.matrix().scale(p) * &t)))
        .collect();
    let sum = elements.iter().fold(ComplexMatrix::zeros(n, n), |a, e| a + e);
    elements[0] += hermitian_part(&(identity(n) - sum));
    Povm::new(elements).expect("pretty-good measurement is complete by construction")
}

/// Decoder that always answers `answer`.
pub fn constant_decoder(alphabet: usize, dim: usize, answer: usize) -> Povm {
    let elements = (0..alphabet)
        .map(|z| {
            if z == answer {
                identity(dim)
            } else {
                ComplexMatrix::zeros(dim, dim)
            }
        })
        .collect();
    Povm::new(elements).expect("identity decoder")
}

fn check_full_rank(m: &BinaryMatrix) -> Result<()> {
    let r = m.rank();
    if r != m.rows() {
        return Err(Error::RankDeficient {
            rank: r,
            expected: m.rows(),
        });
    }
    Ok(())
}

/// Linear extractor `g : F₂ⁿ → F₂^ℓ` of full rank.
#[derive(Debug, Clone, PartialEq)]
pub struct PaProtocol {
    g: BinaryMatrix,
}

impl PaProtocol {
    pub fn new(g: BinaryMatrix) -> Result<Self> {
        check_full_rank(&g)?;
        Ok(Self { g })
    }

    pub fn extractor(&self) -> &BinaryMatrix {
        &self.g
    }

    pub fn key_length(&self) -> usize {
        self.g.rows()
    }
}

/// Linear compressor plus one decoder per compressed value.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiProtocol {
    f: BinaryMatrix,
    decoders: Vec<Povm>,
}

impl CsiProtocol {
    pub fn new(f: BinaryMatrix, decoders: Vec<Povm>) -> Result<Self> {
        check_full_rank(&f)?;
        let n = f.cols();
        if decoders.len() != 1 << f.rows() {
            return Err(Error::LengthMismatch {
                expected: 1 << f.rows(),
                got: decoders.len(),
            });
        }
        if let Some(bad) = decoders.iter().find(|d| d.len() != 1 << n) {
            return Err(Error::LengthMismatch {
                expected: 1 << n,
                got: bad.len(),
            });
        }
        Ok(Self { f, decoders })
    }

    pub fn compressor(&self) -> &BinaryMatrix {
        &self.f
    }

    pub fn decoders(&self) -> &[Povm] {
        &self.decoders
    }

    pub fn compressed_length(&self) -> usize {
        self.f.rows()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    PSecure,
    PGuess,
}

/// Outcome of one protocol run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub input: String,
    pub n: usize,
    pub length: usize,
    pub metric: Metric,
    pub achieved: f64,
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub entropy: Option<f64>,
    pub seed: Option<u64>,
}

/// Split a single `2ⁿ`-dimensional subsystem into `n` qubits, or check that
/// the listed targets are qubits. Returns the state, the qubit indices in
/// register order and, for every remaining subsystem, its original index.
fn qubit_register(
    psi: &PureStateVector,
    targets: &[usize],
    n: usize,
) -> Result<(PureStateVector, Vec<usize>, Vec<usize>)> {
    let dims = psi.dims();
    if targets.iter().any(|&t| t >= dims.len()) {
        return Err(Error::InvalidSubsystems(format!("targets {targets:?}")));
    }
    let joint: usize = targets.iter().map(|&t| dims[t]).product();
    if joint != 1 << n {
        return Err(Error::DimensionMismatch(format!(
            "register of dimension {joint} is not {n} qubits"
        )));
    }
    let rest: Vec<usize> = (0..dims.len()).filter(|i| !targets.contains(i)).collect();
    let order: Vec<usize> = targets.iter().chain(&rest).copied().collect();
    let p = psi.permute(&order)?;
    let mut new_dims = vec![2; n];
    new_dims.extend(rest.iter().map(|&i| dims[i]));
    Ok((p.with_dims(new_dims)?, (0..n).collect(), rest))
}

/// Measure the register in `basis`, hash the outcome with `g` and return the
/// key's cq state against the `adversary` subsystems.
pub fn run_pa_in(
    psi: &PureStateVector,
    basis: Basis,
    targets: &[usize],
    adversary: &[usize],
    pa: &PaProtocol,
) -> Result<(CqState, ProtocolReport)> {
    let g = pa.extractor();
    let n = g.cols();
    let (reg, qubits, rest) = qubit_register(psi, targets, n)?;
    let (rows, rest_dims) = branches(&reg, basis, &qubits)?;
    let adv: Vec<usize> = adversary
        .iter()
        .map(|a| {
            rest.iter()
                .position(|r| r == a)
                .ok_or_else(|| Error::InvalidSubsystems(format!("adversary {a} overlaps targets")))
        })
        .collect::<Result<_>>()?;
    let ell = g.rows();
    let keys = 1usize << ell;
    let side_dims: Vec<usize> = if adv.is_empty() {
        vec![1]
    } else {
        adv.iter().map(|&a| rest_dims[a]).collect()
    };
    let ds = product(&side_dims);
    let mut blocks = vec![ComplexMatrix::zeros(ds, ds); keys];
    for x in 0..rows.nrows() {
        let v = rows.row(x).transpose();
        let (m, _) = reduced_from_vector(&v, &rest_dims, &adv)?;
        let k = g.mul_vec(&BitVector::from_index(x, n))?.to_index();
        blocks[k] += m;
    }
    let cq = cq_from_blocks(blocks, side_dims)?;
    let report = ProtocolReport {
        input: "pure state".into(),
        n,
        length: ell,
        metric: Metric::PSecure,
        achieved: p_secure(&cq),
        eps1: None,
        eps2: None,
        entropy: None,
        seed: None,
    };
    Ok((cq, report))
}

/// Privacy amplification on the Fourier-basis outcome of the register.
pub fn run_pa(
    psi: &PureStateVector,
    targets: &[usize],
    adversary: &[usize],
    pa: &PaProtocol,
) -> Result<(CqState, ProtocolReport)> {
    run_pa_in(psi, Basis::Fourier, targets, adversary, pa)
}

/// Key cq state `k = g(z)` of a cq state over `2ⁿ` symbols. `g` may be
/// rank deficient, as for uniformly sampled linear hashes.
pub fn hash_cq(cq: &CqState, g: &BinaryMatrix) -> Result<CqState> {
    let n = g.cols();
    if cq.alphabet() != 1 << n {
        return Err(Error::DimensionMismatch(format!(
            "alphabet {} is not 2^{n}",
            cq.alphabet()
        )));
    }
    let ds = cq.side_dim();
    let mut blocks = vec![ComplexMatrix::zeros(ds, ds); 1 << g.rows()];
    for (z, (&p, phi)) in cq.probs().iter().zip(cq.conditionals()).enumerate() {
        let k = g.mul_vec(&BitVector::from_index(z, n))?.to_index();
        blocks[k] += phi.matrix().scale(p);
    }
    cq_from_blocks(blocks, cq.side_dims().to_vec())
}

/// Normalize unnormalized blocks `p_z φ_z` into a cq state.
pub(crate) fn cq_from_blocks(blocks: Vec<ComplexMatrix>, side_dims: Vec<usize>) -> Result<CqState> {
    let probs: Vec<f64> = blocks.iter().map(|b| b.trace().re.max(0.0)).collect();
    let total: f64 = probs.iter().sum();
    let conditionals = blocks
        .into_iter()
        .zip(&probs)
        .map(|(b, &p)| {
            if p > 0.0 {
                DensityOperator::trusted(b.unscale(p), side_dims.clone())
            } else {
                DensityOperator::maximally_mixed(side_dims.clone())
            }
        })
        .collect();
    Ok(CqState::trusted(probs.iter().map(|p| p / total).collect(), conditionals))
}

/// Apply a map `z ↦ c` to a cq state over `2ⁿ` symbols: for each value `c`,
/// the conditional ensemble over the full alphabet.
pub fn conditional_ensembles(cq: &CqState, f: &BinaryMatrix) -> Result<Vec<(f64, Option<CqState>)>> {
    let n = f.cols();
    if cq.alphabet() != 1 << n {
        return Err(Error::DimensionMismatch(format!(
            "alphabet {} is not 2^{n}",
            cq.alphabet()
        )));
    }
    let values = 1usize << f.rows();
    let mut probs = vec![vec![0.0; cq.alphabet()]; values];
    for (z, &p) in cq.probs().iter().enumerate() {
        let c = f.mul_vec(&BitVector::from_index(z, n))?.to_index();
        probs[c][z] = p;
    }
    Ok(probs
        .into_iter()
        .map(|pz| {
            let pc: f64 = pz.iter().sum();
            if pc > 0.0 {
                let norm = pz.iter().map(|p| p / pc).collect();
                (pc, Some(CqState::trusted(norm, cq.conditionals().to_vec())))
            } else {
                (0.0, None)
            }
        })
        .collect())
}

/// Compress `Z` with `f` and decode each conditional ensemble with its PGM.
pub fn run_csi(cq: &CqState, f: &BinaryMatrix) -> Result<(CsiProtocol, ProtocolReport)> {
    let n = f.cols();
    let ensembles = conditional_ensembles(cq, f)?;
    let mut decoders = Vec::with_capacity(ensembles.len());
    let mut total = 0.0;
    for (pc, ens) in &ensembles {
        match ens {
            Some(e) => {
                let d = pgm(e);
                total += pc * p_guess_with(e, &d)?;
                decoders.push(d);
            }
            None => decoders.push(constant_decoder(cq.alphabet(), cq.side_dim(), 0)),
        }
    }
    let protocol = CsiProtocol::new(f.clone(), decoders)?;
    let report = ProtocolReport {
        input: "cq state".into(),
        n,
        length: f.rows(),
        metric: Metric::PGuess,
        achieved: total.clamp(0.0, 1.0),
        eps1: None,
        eps2: None,
        entropy: None,
        seed: None,
    };
    Ok((protocol, report))
}

/// Overall success probability of a CSI protocol on a cq state.
pub fn csi_p_guess(cq: &CqState, protocol: &CsiProtocol) -> Result<f64> {
    let ensembles = conditional_ensembles(cq, protocol.compressor())?;
    let mut total = 0.0;
    for ((pc, ens), d) in ensembles.iter().zip(protocol.decoders()) {
        if let Some(e) = ens {
            total += pc * p_guess_with(e, d)?;
        }
    }
    Ok(total)
}

/// The cq state of the computational-basis outcome of a register against the
/// listed side subsystems.
pub fn register_cq(
    psi: &PureStateVector,
    basis: Basis,
    targets: &[usize],
    side: &[usize],
) -> Result<CqState> {
    let cq = measure_basis_many(psi, basis, targets)?;
    let rest: Vec<usize> = (0..psi.dims().len()).filter(|i| !targets.contains(i)).collect();
    let keep: Vec<usize> = side
        .iter()
        .map(|s| {
            rest.iter()
                .position(|r| r == s)
                .ok_or_else(|| Error::InvalidSubsystems(format!("side {s} overlaps targets")))
        })
        .collect::<Result<_>>()?;
    cq.restrict_side(&keep)
}

fn register_bits(cq: &CqState) -> Result<usize> {
    let d = cq.alphabet();
    if !d.is_power_of_two() {
        return Err(Error::Precondition(format!("alphabet {d} is not a power of two")));
    }
    Ok(d.trailing_zeros() as usize)
}

fn side_indices(cq: &CqState) -> Vec<usize> {
    (1..=cq.side_dims().len()).collect()
}

fn check_eps(eps1: f64, eps2: f64) -> Result<()> {
    if !((0.0..1.0).contains(&eps1) && eps2 > 0.0 && eps2 <= 1.0) {
        return Err(Error::Precondition(format!(
            "need 0 ≤ ε₁ < 1 and 0 < ε₂ ≤ 1, got {eps1}, {eps2}"
        )));
    }
    Ok(())
}

/// `floor(h − 2 log₂(1/ε₂) + 2)` clamped to `[0, n]`.
pub fn pa_length_from_entropy(h_min: f64, eps2: f64, n: usize) -> usize {
    let raw = h_min - 2.0 * (1.0 / eps2).log2() + 2.0;
    (raw + 1e-9).floor().clamp(0.0, n as f64) as usize
}

/// `ceil(h + 2 log₂(1/ε₂) + 4)` clamped to `[0, n]`.
pub fn csi_length_from_entropy(h_max: f64, eps2: f64, n: usize) -> usize {
    let raw = h_max + 2.0 * (1.0 / eps2).log2() + 4.0;
    (raw - 1e-9).ceil().clamp(0.0, n as f64) as usize
}

/// Key length achievable by hashing, from `H_min^{ε₁}(Z|S)`. Returns the
/// length and the entropy used.
pub fn pa_length_bound(cq: &CqState, eps1: f64, eps2: f64) -> Result<(usize, f64)> {
    check_eps(eps1, eps2)?;
    let n = register_bits(cq)?;
    let h = smooth_min_entropy(&cq.to_density(), &side_indices(cq), SmoothingBall::new(eps1)?)?;
    Ok((pa_length_from_entropy(h, eps2, n), h))
}

/// Compression length sufficient for decoding, from `H_max^{ε₁}(Z|S)`.
pub fn csi_length_bound(cq: &CqState, eps1: f64, eps2: f64) -> Result<(usize, f64)> {
    check_eps(eps1, eps2)?;
    let n = register_bits(cq)?;
    let h = smooth_max_entropy(&cq.to_density(), &side_indices(cq), SmoothingBall::new(eps1)?)?;
    Ok((csi_length_from_entropy(h, eps2, n), h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{c64, ComplexVector, ONE};

    fn pure(v: &[(f64, f64)]) -> DensityOperator {
        let amps = ComplexVector::from_iterator(v.len(), v.iter().map(|&(a, b)| c64(a, b)));
        PureStateVector::normalized(amps, vec![v.len()]).unwrap().density()
    }

    #[test]
    fn ideal_and_deterministic_keys() {
        let phi = pure(&[(1.0, 0.0), (0.3, 0.2)]);
        let ideal = CqState::new(vec![0.5, 0.5], vec![phi.clone(), phi.clone()]).unwrap();
        assert!(p_secure(&ideal) < 1e-12);
        let fixed = CqState::new(vec![1.0, 0.0], vec![phi.clone(), phi]).unwrap();
        assert!((p_secure(&fixed) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constant_decoder_guesses_first() {
        let a = pure(&[(1.0, 0.0), (0.0, 0.0)]);
        let b = pure(&[(1.0, 0.0), (1.0, 0.0)]);
        let cq = CqState::new(vec![0.7, 0.3], vec![a, b]).unwrap();
        let d = constant_decoder(2, 2, 0);
        assert!((p_guess_with(&cq, &d).unwrap() - 0.7).abs() < 1e-12);
    }

    #[test]
    fn pgm_single_symbol_is_identity() {
        let cq = CqState::new(vec![1.0], vec![pure(&[(0.6, 0.0), (0.0, 0.8)])]).unwrap();
        let m = pgm(&cq);
        assert!(crate::qcore::linalg::max_abs(&(&m.elements()[0] - identity(2))) < 1e-12);
    }

    #[test]
    fn length_arithmetic() {
        assert_eq!(pa_length_from_entropy(4.0, 0.5, 4), 4);
        assert_eq!(pa_length_from_entropy(-30.0, 0.5, 4), 0);
        assert_eq!(csi_length_from_entropy(0.0, 0.25, 3), 3);
        assert_eq!(csi_length_from_entropy(0.0, 0.25, 20), 8);
    }

    #[test]
    fn trivial_key_is_secure() {
        let mut v = ComplexVector::zeros(8);
        v[0] = ONE;
        v[7] = ONE;
        let ghz = PureStateVector::normalized(v, vec![2, 2, 2]).unwrap();
        let g = PaProtocol::new(BinaryMatrix::zeros(0, 1)).unwrap();
        let (_, rep) = run_pa(&ghz, &[0], &[2], &g).unwrap();
        assert!(rep.achieved.abs() < 1e-12);
    }
}
