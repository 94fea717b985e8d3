//! Dense complex matrices and the tensor-index bookkeeping used everywhere
//! else: Kronecker products, subsystem permutations, partial traces and
//! Hermitian eigendecompositions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let s = a[(i, j)];
            if s == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn kron_vec(a: &ComplexVector, b: &ComplexVector) -> ComplexVector {
    let mut out = ComplexVector::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

/// Largest absolute entry.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn hermitian_defect(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(m - m.adjoint()))
}

/// `(m + m^H) / 2`
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigh {
    /// Rebuild `Σ f(λ_i) |v_i><v_i|`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let s = f(lam);
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        &scaled * self.vectors.adjoint()
    }
}

pub fn eigh(m: &ComplexMatrix) -> Eigh {
    let n = m.nrows();
    if n == 0 {
        return Eigh {
            values: Vec::new(),
            vectors: ComplexMatrix::zeros(0, 0),
        };
    }
    let herm = hermitian_part(m);
    let se = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        vectors.set_column(new, &se.eigenvectors.column(old));
    }
    Eigh { values, vectors }
}

pub fn eigenvalues_hermitian(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Clamp eigenvalue dust in `[-floor, 0)` to zero; anything more negative is
/// reported as an error.
pub fn clamp_eigenvalue(lam: f64, floor: f64) -> Result<f64> {
    if lam >= 0.0 {
        Ok(lam)
    } else if lam >= -floor {
        Ok(0.0)
    } else {
        Err(Error::InvalidState(format!(
            "eigenvalue {lam:e} below clamp floor -{floor:e}"
        )))
    }
}

/// Square root of a positive semidefinite matrix; negative dust is clamped.
pub fn sqrt_psd(m: &ComplexMatrix) -> ComplexMatrix {
    eigh(m).map(|l| l.max(0.0).sqrt())
}

/// Pseudo-inverse square root on the support (eigenvalues above `cutoff`).
pub fn inv_sqrt_on_support(m: &ComplexMatrix, cutoff: f64) -> ComplexMatrix {
    eigh(m).map(|l| if l > cutoff { 1.0 / l.sqrt() } else { 0.0 })
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &ComplexMatrix) -> f64 {
    eigenvalues_hermitian(m).iter().map(|l| l.abs()).sum()
}

/// Sum of singular values of an arbitrary matrix.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().singular_values().iter().sum()
}

/// Mixed-radix digits of `index` for the given subsystem dimensions, most
/// significant subsystem first (the Kronecker ordering).
pub fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

pub fn index_of(digits: &[usize], dims: &[usize]) -> usize {
    digits
        .iter()
        .zip(dims)
        .fold(0, |acc, (&d, &n)| acc * n + d)
}

pub fn product(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Check that `order` is a permutation of `0..k`.
pub fn check_permutation(order: &[usize], k: usize) -> Result<()> {
    let mut seen = vec![false; k];
    if order.len() != k {
        return Err(Error::InvalidSubsystems(format!(
            "order {order:?} does not cover {k} subsystems"
        )));
    }
    for &o in order {
        if o >= k || seen[o] {
            return Err(Error::InvalidSubsystems(format!(
                "order {order:?} is not a permutation of 0..{k}"
            )));
        }
        seen[o] = true;
    }
    Ok(())
}

/// Check a subsystem index set: in range and without repetition. Returns the
/// sorted set.
pub fn check_index_set(set: &[usize], k: usize) -> Result<Vec<usize>> {
    let mut s = set.to_vec();
    s.sort_unstable();
    if s.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidSubsystems(format!("repeated index in {set:?}")));
    }
    if let Some(&bad) = s.iter().find(|&&i| i >= k) {
        return Err(Error::InvalidSubsystems(format!(
            "index {bad} out of range for {k} subsystems"
        )));
    }
    Ok(s)
}

/// For each old flat index, the flat index after reordering subsystems so
/// that new subsystem `i` is old subsystem `order[i]`.
fn permutation_map(dims: &[usize], order: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
    let n = product(dims);
    let mut map = vec![0; n];
    let mut new_digits = vec![0; dims.len()];
    for (old, slot) in map.iter_mut().enumerate() {
        let d = digits(old, dims);
        for (i, &o) in order.iter().enumerate() {
            new_digits[i] = d[o];
        }
        *slot = index_of(&new_digits, &new_dims);
    }
    (map, new_dims)
}

pub fn permute_vector(
    v: &ComplexVector,
    dims: &[usize],
    order: &[usize],
) -> Result<(ComplexVector, Vec<usize>)> {
    check_permutation(order, dims.len())?;
    let (map, new_dims) = permutation_map(dims, order);
    let mut out = ComplexVector::zeros(v.len());
    for (old, &new) in map.iter().enumerate() {
        out[new] = v[old];
    }
    Ok((out, new_dims))
}

pub fn permute_matrix(
    m: &ComplexMatrix,
    dims: &[usize],
    order: &[usize],
) -> Result<(ComplexMatrix, Vec<usize>)> {
    check_permutation(order, dims.len())?;
    let (map, new_dims) = permutation_map(dims, order);
    let n = map.len();
    let mut out = ComplexMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            out[(map[a], map[b])] = m[(a, b)];
        }
    }
    Ok((out, new_dims))
}

/// Order that moves `front` (in the given order) ahead of all remaining
/// subsystems (which keep their relative order).
pub fn order_with_front(front: &[usize], k: usize) -> Vec<usize> {
    let mut order = front.to_vec();
    order.extend((0..k).filter(|i| !front.contains(i)));
    order
}

/// Partial trace keeping the subsystems in `keep` (ascending order).
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<(ComplexMatrix, Vec<usize>)> {
    let keep = check_index_set(keep, dims.len())?;
    if product(dims) != m.nrows() || !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "matrix {}x{} does not match dims {dims:?}",
            m.nrows(),
            m.ncols()
        )));
    }
    let kept_dims: Vec<usize> = keep.iter().map(|&i| dims[i]).collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let dk = product(&kept_dims);
    let dt = product(&traced_dims);
    let n = m.nrows();
    // groups[t][k] = flat index with traced part t and kept part k
    let mut groups = vec![vec![0usize; dk]; dt];
    let mut kd = vec![0; keep.len()];
    let mut td = vec![0; traced.len()];
    for idx in 0..n {
        let d = digits(idx, dims);
        for (i, &s) in keep.iter().enumerate() {
            kd[i] = d[s];
        }
        for (i, &s) in traced.iter().enumerate() {
            td[i] = d[s];
        }
        groups[index_of(&td, &traced_dims)][index_of(&kd, &kept_dims)] = idx;
    }
    let mut out = ComplexMatrix::zeros(dk, dk);
    for g in &groups {
        for (a, &ia) in g.iter().enumerate() {
            for (b, &ib) in g.iter().enumerate() {
                out[(a, b)] += m[(ia, ib)];
            }
        }
    }
    Ok((out, kept_dims))
}

/// Row-major reshape of a vector into a `rows x cols` matrix.
pub fn reshape(v: &ComplexVector, rows: usize, cols: usize) -> ComplexMatrix {
    debug_assert_eq!(v.len(), rows * cols);
    ComplexMatrix::from_fn(rows, cols, |i, j| v[i * cols + j])
}

/// Inverse of [`reshape`].
pub fn flatten(m: &ComplexMatrix) -> ComplexVector {
    let (r, c) = m.shape();
    ComplexVector::from_fn(r * c, |k, _| m[(k / c, k % c)])
}

/// `|v><v|`
pub fn outer(v: &ComplexVector) -> ComplexMatrix {
    v * v.adjoint()
}

/// Fourier matrix with entries `F[x, z] = d^{-1/2} ω^{xz}`, `ω = e^{2πi/d}`.
/// Row `x` is the bra `<x̃|` of the conjugate basis `|x̃> = d^{-1/2} Σ_z ω^{-xz}|z>`.
pub fn fourier_bra_matrix(d: usize) -> ComplexMatrix {
    let s = 1.0 / (d as f64).sqrt();
    ComplexMatrix::from_fn(d, d, |x, z| {
        let phase = 2.0 * std::f64::consts::PI * ((x * z) % d) as f64 / d as f64;
        C64::from_polar(s, phase)
    })
}

/// Weyl-Heisenberg phase operator `Z = Σ_k ω^k |k><k|`.
pub fn clock(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| {
        if i == j {
            C64::from_polar(1.0, 2.0 * std::f64::consts::PI * i as f64 / d as f64)
        } else {
            ZERO
        }
    })
}

/// Weyl-Heisenberg shift operator `X = Σ_k |k+1><k|`.
pub fn shift(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| if i == (j + 1) % d { ONE } else { ZERO })
}

/// `Π_i m_i` as a Kronecker product over a list of factors.
pub fn kron_all(factors: &[ComplexMatrix]) -> ComplexMatrix {
    factors
        .iter()
        .fold(ComplexMatrix::identity(1, 1), |acc, f| kron(&acc, f))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_roundtrip() {
        let dims = [2, 3, 4];
        for i in 0..24 {
            assert_eq!(index_of(&digits(i, &dims), &dims), i);
        }
        assert_eq!(digits(23, &dims), vec![1, 2, 3]);
    }

    #[test]
    fn permutation_is_reversible() {
        let dims = [2, 3];
        let v = ComplexVector::from_fn(6, |i, _| c64(i as f64, 0.0));
        let (p, nd) = permute_vector(&v, &dims, &[1, 0]).unwrap();
        assert_eq!(nd, vec![3, 2]);
        // |a=0, b=1> (index 1) lands at |b=1, a=0> (index 2)
        assert_eq!(p[2], v[1]);
        let (back, _) = permute_vector(&p, &nd, &[1, 0]).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn bad_index_sets_are_rejected() {
        assert!(check_index_set(&[0, 0], 2).is_err());
        assert!(check_index_set(&[3], 2).is_err());
        assert!(check_permutation(&[0, 0], 2).is_err());
    }

    #[test]
    fn fourier_matrix_is_unitary() {
        for d in 2..6 {
            let f = fourier_bra_matrix(d);
            let defect = max_abs(&(f.adjoint() * &f - identity(d)));
            assert!(defect < 1e-12);
        }
    }

    #[test]
    fn eigh_sorted_and_reconstructs() {
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c64(2.0, 0.0), c64(0.0, 1.0), c64(0.0, -1.0), c64(2.0, 0.0)],
        );
        let e = eigh(&m);
        assert!((e.values[0] - 1.0).abs() < 1e-12 && (e.values[1] - 3.0).abs() < 1e-12);
        assert!(max_abs(&(e.map(|x| x) - &m)) < 1e-12);
    }
}
