//! CSS-type Pauli strings on qubit registers and the relabeling unitary that
//! splits a register into `Ā Â` according to a full-rank linear map.

use serde::{Deserialize, Serialize};

use crate::binlin::{complete_basis, dual_basis, BinaryMatrix, BitVector};
use crate::qcore::linalg::{kron_all, max_abs, ComplexMatrix, C64, ONE, ZERO};
use crate::{Error, Result};

/// Largest register for which operators are materialized.
pub const MAX_QUBITS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliKind {
    Z,
    X,
}

/// `Z^h = ⊗_i Z^{h_i}` or `X^g = ⊗_i X^{g_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub kind: PauliKind,
    pub support: BitVector,
}

impl PauliString {
    pub fn z(support: BitVector) -> Self {
        Self {
            kind: PauliKind::Z,
            support,
        }
    }

    pub fn x(support: BitVector) -> Self {
        Self {
            kind: PauliKind::X,
            support,
        }
    }
}

fn check_register(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::Envelope(format!(
            "register of {n} qubits exceeds {MAX_QUBITS}"
        )));
    }
    Ok(())
}

/// Dense `2ⁿ × 2ⁿ` matrix of a Pauli string. `Z^h` is diagonal with entries
/// `(−1)^{h·z}`; `X^g` maps `|z>` to `|z ⊕ g>`.
pub fn pauli_operator(p: &PauliString) -> Result<ComplexMatrix> {
    let n = p.support.len();
    check_register(n)?;
    let dim = 1usize << n;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for z in 0..dim {
        let bits = BitVector::from_index(z, n);
        match p.kind {
            PauliKind::Z => {
                m[(z, z)] = if p.support.dot(&bits)? { -ONE } else { ONE };
            }
            PauliKind::X => {
                m[(bits.xor(&p.support)?.to_index(), z)] = ONE;
            }
        }
    }
    Ok(m)
}

/// Sign in `X^g Z^h = (−1)^{g·h} Z^h X^g`.
pub fn commutation_phase(g: &BitVector, h: &BitVector) -> Result<i8> {
    Ok(if g.dot(h)? { -1 } else { 1 })
}

/// Subsystem decomposition `A = Ā Â` with `z ↦ (f(z), f⊥(z))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsystemSplit {
    f: BinaryMatrix,
    f_perp: BinaryMatrix,
    /// `perm[z]` is the index of `|f(z)>|f⊥(z)>`.
    perm: Vec<usize>,
}

impl SubsystemSplit {
    /// Use a given completion; the stacked matrix must be invertible.
    pub fn from_parts(f: BinaryMatrix, f_perp: BinaryMatrix) -> Result<Self> {
        let n = f.cols();
        check_register(n)?;
        let full = f.stack(&f_perp)?;
        if full.rows() != n || full.rank() != n {
            return Err(Error::RankDeficient {
                rank: full.rank(),
                expected: n,
            });
        }
        let perm = (0..1usize << n)
            .map(|z| Ok(full.mul_vec(&BitVector::from_index(z, n))?.to_index()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { f, f_perp, perm })
    }

    pub fn n(&self) -> usize {
        self.f.cols()
    }

    pub fn m(&self) -> usize {
        self.f.rows()
    }

    pub fn f(&self) -> &BinaryMatrix {
        &self.f
    }

    pub fn f_perp(&self) -> &BinaryMatrix {
        &self.f_perp
    }

    /// The stacked invertible matrix `(f; f⊥)`.
    pub fn full(&self) -> BinaryMatrix {
        self.f.stack(&self.f_perp).expect("equal widths")
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// The relabeling as an explicit permutation matrix.
    pub fn relabel(&self) -> ComplexMatrix {
        let dim = self.perm.len();
        let mut u = ComplexMatrix::zeros(dim, dim);
        for (z, &w) in self.perm.iter().enumerate() {
            u[(w, z)] = ONE;
        }
        u
    }

    /// Apply the relabeling to amplitudes by index mapping.
    pub fn apply(&self, amps: &[C64]) -> Result<Vec<C64>> {
        if amps.len() != self.perm.len() {
            return Err(Error::LengthMismatch {
                expected: self.perm.len(),
                got: amps.len(),
            });
        }
        let mut out = vec![ZERO; amps.len()];
        for (z, &w) in self.perm.iter().enumerate() {
            out[w] = amps[z];
        }
        Ok(out)
    }

    pub fn apply_inverse(&self, amps: &[C64]) -> Result<Vec<C64>> {
        if amps.len() != self.perm.len() {
            return Err(Error::LengthMismatch {
                expected: self.perm.len(),
                got: amps.len(),
            });
        }
        Ok(self.perm.iter().map(|&w| amps[w]).collect())
    }

    /// `"n N"` followed by `f` and `f⊥` in matrix text format.
    pub fn to_text(&self) -> String {
        format!("n {}\n{}{}", self.n(), self.f.to_text(), self.f_perp.to_text())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        let n: usize = lines
            .first()
            .and_then(|l| l.strip_prefix("n "))
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse("missing `n` header".into()))?;
        let rows_of = |i: usize| -> Result<usize> {
            lines
                .get(i)
                .and_then(|l| l.split_whitespace().next())
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Parse("missing matrix header".into()))
        };
        let m = rows_of(1)?;
        let f = BinaryMatrix::from_text(&lines[1..2 + m].join("\n"))?;
        let f_perp = BinaryMatrix::from_text(&lines[2 + m..].join("\n"))?;
        if f.cols() != n || f_perp.cols() != n {
            return Err(Error::Parse(format!("matrix widths differ from n = {n}")));
        }
        Self::from_parts(f, f_perp)
    }
}

/// Build the split for a full-rank `f`, completing it with
/// [`complete_basis`].
pub fn build_split(f: &BinaryMatrix) -> Result<SubsystemSplit> {
    check_register(f.cols())?;
    let f_perp = complete_basis(f)?;
    SubsystemSplit::from_parts(f.clone(), f_perp)
}

/// Result of the encoded-operator checks.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EncodedCheckReport {
    /// `Z^{h_j}|z> = (−1)^{f(z)_j}|z>` on every basis state.
    pub measurement: bool,
    /// `U Z^{h_j} U† = Z_j` on the `Ā` wires.
    pub conjugation: bool,
    /// `X^{g_j}` and `Z^{h_k}` anticommute exactly when `j = k`, and
    /// `U X^{g_j} U† = X_j`.
    pub commutation: bool,
    pub failures: Vec<String>,
}

impl EncodedCheckReport {
    pub fn passed(&self) -> bool {
        self.measurement && self.conjugation && self.commutation
    }
}

pub fn encoded_measurement_check(split: &SubsystemSplit) -> Result<EncodedCheckReport> {
    let dual = dual_basis(&split.full())?;
    encoded_measurement_check_with_dual(split, &dual)
}

/// As [`encoded_measurement_check`] but with a caller-supplied dual basis.
pub fn encoded_measurement_check_with_dual(
    split: &SubsystemSplit,
    dual: &BinaryMatrix,
) -> Result<EncodedCheckReport> {
    let n = split.n();
    let full = split.full();
    if dual.rows() != n || dual.cols() != n {
        return Err(Error::DimensionMismatch("dual basis must be n × n".into()));
    }
    let u = split.relabel();
    let mut report = EncodedCheckReport {
        measurement: true,
        conjugation: true,
        commutation: true,
        failures: Vec::new(),
    };

    for j in 0..split.m() {
        let h = split.f().row(j);
        let zh = pauli_operator(&PauliString::z(h.clone()))?;
        for z in 0..1usize << n {
            let bit = split.f().mul_vec(&BitVector::from_index(z, n))?.get(j);
            let expected = if bit { -1.0 } else { 1.0 };
            if zh[(z, z)].re != expected {
                report.measurement = false;
                report.failures.push(format!("Z^h_{j} on |{z}>"));
            }
        }
        let wire = pauli_operator(&PauliString::z(BitVector::unit(n, j)))?;
        if max_abs(&(&u * &zh * u.adjoint() - wire)) != 0.0 {
            report.conjugation = false;
            report.failures.push(format!("U Z^h_{j} U† ≠ Z_{j}"));
        }
    }

    for j in 0..n {
        let g = dual.row(j);
        let xg = pauli_operator(&PauliString::x(g.clone()))?;
        for k in 0..n {
            let h = full.row(k);
            let sign = commutation_phase(g, h)?;
            let want = if j == k { -1 } else { 1 };
            let zh = pauli_operator(&PauliString::z(h.clone()))?;
            let lhs = &xg * &zh;
            let rhs = (&zh * &xg).scale(f64::from(sign));
            if sign != want || max_abs(&(lhs - rhs)) != 0.0 {
                report.commutation = false;
                report.failures.push(format!("X^g_{j} vs Z^h_{k}"));
            }
        }
        let wire = pauli_operator(&PauliString::x(BitVector::unit(n, j)))?;
        if max_abs(&(&u * &xg * u.adjoint() - wire)) != 0.0 {
            report.commutation = false;
            report.failures.push(format!("U X^g_{j} U† ≠ X_{j}"));
        }
    }
    Ok(report)
}

/// `H^{⊗n} U H^{⊗n}` equals the permutation `|x> ↦ |G x>` with `G` the dual
/// basis of `(f; f⊥)`, i.e. the X-basis labels become `(g(x), g⊥(x))`.
/// Returns the largest entry deviation.
pub fn fourier_relabel_defect(split: &SubsystemSplit) -> Result<f64> {
    let n = split.n();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h1 = ComplexMatrix::from_row_slice(
        2,
        2,
        &[C64::new(s, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0)],
    );
    let hn = kron_all(&vec![h1; n]);
    let conj = &hn * split.relabel() * &hn;
    let g = dual_basis(&split.full())?;
    let dim = 1usize << n;
    let mut expected = ComplexMatrix::zeros(dim, dim);
    for x in 0..dim {
        let gx = g.mul_vec(&BitVector::from_index(x, n))?.to_index();
        expected[(gx, x)] = ONE;
    }
    Ok(max_abs(&(conj - expected)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_split_is_trivial() {
        let s = build_split(&BinaryMatrix::identity(3)).unwrap();
        assert_eq!(s.permutation(), &(0..8).collect::<Vec<_>>()[..]);
        assert!(encoded_measurement_check(&s).unwrap().passed());
    }

    #[test]
    fn parity_split_on_two_qubits() {
        let f = BinaryMatrix::parse_rows(&["11"]).unwrap();
        let s = build_split(&f).unwrap();
        for z in 0..4usize {
            let bits = BitVector::from_index(z, 2);
            let parity = bits.get(0) ^ bits.get(1);
            let image = BitVector::from_index(s.permutation()[z], 2);
            assert_eq!(image.get(0), parity);
        }
    }

    #[test]
    fn split_text_roundtrip() {
        let f = BinaryMatrix::parse_rows(&["101", "011"]).unwrap();
        let s = build_split(&f).unwrap();
        assert_eq!(SubsystemSplit::from_text(&s.to_text()).unwrap(), s);
    }

    #[test]
    fn oversize_register_is_rejected() {
        let p = PauliString::z(BitVector::zeros(9));
        assert!(matches!(pauli_operator(&p), Err(Error::Envelope(_))));
    }
}
