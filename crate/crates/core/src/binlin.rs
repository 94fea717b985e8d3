//! Linear algebra over GF(2) on bit-packed words, and the linear hash
//! families used for privacy amplification and compression.
//!
//! Bits are stored little-endian inside 64-bit words: bit `j` of a vector is
//! bit `j % 64` of word `j / 64`. When a vector labels a computational basis
//! state of an `n`-qubit register, bit `i` is qubit `i`, and qubit 0 is the
//! most significant digit of the basis index.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector(")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, ")")
    }
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Parse a string of `0`/`1` characters, bit 0 first.
    pub fn parse(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("bad bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bits(&bits))
    }

    /// The `n`-bit string of basis index `index` (bit 0 most significant).
    pub fn from_index(index: usize, n: usize) -> Self {
        let mut v = Self::zeros(n);
        for i in 0..n {
            v.set(i, (index >> (n - 1 - i)) & 1 == 1);
        }
        v
    }

    pub fn to_index(&self) -> usize {
        (0..self.len).fold(0, |acc, i| (acc << 1) | usize::from(self.get(i)))
    }

    pub fn random(len: usize, rng: &mut impl Rng) -> Self {
        let mut v = Self::zeros(len);
        for w in &mut v.words {
            *w = rng.random();
        }
        v.mask();
        v
    }

    fn mask(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, b: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if b {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn xor_assign(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                got: other.len,
            });
        }
        let mut out = self.clone();
        out.xor_assign(other);
        Ok(out)
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &Self) -> Result<bool> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                got: other.len,
            });
        }
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        Ok(ones % 2 == 1)
    }

    /// Concatenation `self ‖ other`.
    pub fn concat(&self, other: &Self) -> Self {
        let mut v = Self::zeros(self.len + other.len);
        for i in 0..self.len {
            v.set(i, self.get(i));
        }
        for i in 0..other.len {
            v.set(self.len + i, other.get(i));
        }
        v
    }

    /// Bits `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> Self {
        let mut v = Self::zeros(end - start);
        for i in start..end {
            v.set(i - start, self.get(i));
        }
        v
    }
}

/// Dense GF(2) matrix stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVector>,
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryMatrix {}x{} [", self.rows, self.cols)?;
        for (i, r) in self.data.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols {
                write!(f, "{}", u8::from(r.get(j)))?;
            }
        }
        write!(f, "]")
    }
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_rows(n, (0..n).map(|i| BitVector::unit(n, i)).collect()).expect("square")
    }

    /// The first `m` rows of the `n × n` identity.
    pub fn truncated_identity(m: usize, n: usize) -> Self {
        Self::from_rows(n, (0..m).map(|i| BitVector::unit(n, i)).collect()).expect("rows fit")
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::LengthMismatch {
                expected: cols,
                got: bad.len(),
            });
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows,
        })
    }

    /// Parse rows written as `0`/`1` strings, e.g. `["1011", "0110"]`.
    pub fn parse_rows(rows: &[&str]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| BitVector::parse(r))
            .collect::<Result<Vec<_>>>()?;
        let cols = parsed.first().map_or(0, BitVector::len);
        Self::from_rows(cols, parsed)
    }

    pub fn random(rows: usize, cols: usize, rng: &mut impl Rng) -> Self {
        Self {
            rows,
            cols,
            data: (0..rows).map(|_| BitVector::random(cols, rng)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.data[i]
    }

    pub fn row_vectors(&self) -> &[BitVector] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, b: bool) {
        self.data[i].set(j, b);
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k) {
                    out.data[i].xor_assign(&other.data[k]);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, z: &BitVector) -> Result<BitVector> {
        if z.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: z.len(),
            });
        }
        let mut out = BitVector::zeros(self.rows);
        for (i, r) in self.data.iter().enumerate() {
            if r.dot(z)? {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &Self) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                got: other.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Self::from_rows(self.cols, data)
    }

    /// Rows `start..end`.
    pub fn row_range(&self, start: usize, end: usize) -> Self {
        Self {
            rows: end - start,
            cols: self.cols,
            data: self.data[start..end].to_vec(),
        }
    }

    /// Reduced row echelon form and pivot columns.
    fn echelon(&self) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.get(i, c)) else {
                continue;
            };
            m.data.swap(r, p);
            let pivot_row = m.data[r].clone();
            for i in 0..m.rows {
                if i != r && m.get(i, c) {
                    m.data[i].xor_assign(&pivot_row);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "inverse of non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let aug = Self::from_rows(
            2 * n,
            (0..n)
                .map(|i| self.data[i].concat(&BitVector::unit(n, i)))
                .collect(),
        )?;
        let (red, pivots) = aug.echelon();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::RankDeficient {
                rank: self.rank(),
                expected: n,
            });
        }
        Self::from_rows(n, red.data.iter().map(|r| r.slice(n, 2 * n)).collect())
    }

    /// Text form: `"m n"` then one line per row, each the row's 64-bit words
    /// as 16 hex digits, word 0 first.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for r in &self.data {
            for w in r.words() {
                s.push_str(&format!("{w:016x}"));
            }
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix text".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header {header:?}"))))
            .collect::<Result<_>>()?;
        let [m, n] = dims[..] else {
            return Err(Error::Parse(format!("bad header {header:?}")));
        };
        let nw = words_for(n);
        let mut rows = Vec::with_capacity(m);
        for _ in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse("missing matrix row".into()))?;
            if line.len() != 16 * nw {
                return Err(Error::Parse(format!("row {line:?} has wrong width")));
            }
            let mut v = BitVector::zeros(n);
            for w in 0..nw {
                v.words[w] = u64::from_str_radix(&line[16 * w..16 * w + 16], 16)
                    .map_err(|e| Error::Parse(e.to_string()))?;
            }
            let before = v.words.clone();
            v.mask();
            if v.words != before {
                return Err(Error::Parse("bits set beyond row length".into()));
            }
            rows.push(v);
        }
        if lines.next().is_some() {
            return Err(Error::Parse("trailing rows".into()));
        }
        Self::from_rows(n, rows)
    }
}

pub fn rank_f2(m: &BinaryMatrix) -> usize {
    m.rank()
}

pub fn apply_hash(m: &BinaryMatrix, z: &BitVector) -> Result<BitVector> {
    m.mul_vec(z)
}

/// Uniformly random full-rank `m × n` matrix by rejection sampling.
pub fn sample_full_rank(m: usize, n: usize, seed: u64) -> Result<BinaryMatrix> {
    sample_full_rank_rng(m, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn sample_full_rank_rng(m: usize, n: usize, rng: &mut impl Rng) -> Result<BinaryMatrix> {
    if m > n {
        return Err(Error::Precondition(format!("{m} rows exceed {n} columns")));
    }
    loop {
        let h = BinaryMatrix::random(m, n, rng);
        if h.rank() == m {
            return Ok(h);
        }
    }
}

/// Uniformly random `m × n` matrix (any rank): the full linear family.
pub fn sample_uniform_linear(m: usize, n: usize, seed: u64) -> BinaryMatrix {
    BinaryMatrix::random(m, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Rows completing a full-rank `H` to an invertible matrix: unit vectors at
/// the non-pivot columns of the echelon form of `H`.
pub fn complete_basis(h: &BinaryMatrix) -> Result<BinaryMatrix> {
    let (_, pivots) = h.echelon();
    if pivots.len() != h.rows() {
        return Err(Error::RankDeficient {
            rank: pivots.len(),
            expected: h.rows(),
        });
    }
    let n = h.cols();
    BinaryMatrix::from_rows(
        n,
        (0..n)
            .filter(|j| !pivots.contains(j))
            .map(|j| BitVector::unit(n, j))
            .collect(),
    )
}

/// Dual basis `G = (Hᵀ)⁻¹`, so that `g_j · h_k = δ_jk`.
pub fn dual_basis(h_full: &BinaryMatrix) -> Result<BinaryMatrix> {
    h_full.transpose().inverse()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HashKind {
    /// All `m × n` matrices.
    UniformLinear,
    /// Toeplitz matrices `T_ij = t_{i − j + n − 1}` with `t ∈ F₂^{n+m−1}`.
    Toeplitz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HashFamilySpec {
    pub kind: HashKind,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
}

impl HashFamilySpec {
    pub fn new(kind: HashKind, n: usize, m: usize, seed: u64) -> Result<Self> {
        if m > n || n == 0 {
            return Err(Error::Precondition(format!("need 0 ≤ m ≤ n, got m={m}, n={n}")));
        }
        Ok(Self { kind, n, m, seed })
    }

    /// Draw a member of the family from `seed`.
    pub fn sample(&self) -> BinaryMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        match self.kind {
            HashKind::UniformLinear => BinaryMatrix::random(self.m, self.n, &mut rng),
            HashKind::Toeplitz => {
                toeplitz(&BitVector::random(self.n + self.m - 1, &mut rng), self.m, self.n)
            }
        }
    }
}

/// Toeplitz matrix from its `m + n − 1` diagonals.
pub fn toeplitz(t: &BitVector, m: usize, n: usize) -> BinaryMatrix {
    let mut out = BinaryMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            out.set(i, j, t.get(i + n - 1 - j));
        }
    }
    out
}

/// Exact probability, over the whole family, that `z1` and `z2` hash to the
/// same value.
pub fn collision_probability(spec: &HashFamilySpec, z1: &BitVector, z2: &BitVector) -> Result<f64> {
    if z1.len() != spec.n || z2.len() != spec.n {
        return Err(Error::LengthMismatch {
            expected: spec.n,
            got: z1.len().max(z2.len()),
        });
    }
    if z1 == z2 {
        return Err(Error::Precondition("inputs must differ".into()));
    }
    if spec.n > 12 {
        return Err(Error::Envelope(format!("exact mode needs n ≤ 12, got {}", spec.n)));
    }
    let delta = z1.xor(z2)?;
    let (n, m) = (spec.n, spec.m);
    match spec.kind {
        HashKind::UniformLinear => {
            // rows are independent: a collision needs every row orthogonal to δ
            let mut good = 0u64;
            for idx in 0..1usize << n {
                if !BitVector::from_index(idx, n).dot(&delta)? {
                    good += 1;
                }
            }
            Ok((good as f64 / (1u64 << n) as f64).powi(m as i32))
        }
        HashKind::Toeplitz => {
            if m == 0 {
                return Ok(1.0);
            }
            let len = n + m - 1;
            let mut hits = 0u64;
            for idx in 0..1usize << len {
                let t = toeplitz(&BitVector::from_index(idx, len), m, n);
                if t.mul_vec(&delta)?.is_zero() {
                    hits += 1;
                }
            }
            Ok(hits as f64 / (1u64 << len) as f64)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_zero_rank() {
        assert_eq!(rank_f2(&BinaryMatrix::identity(7)), 7);
        assert_eq!(rank_f2(&BinaryMatrix::zeros(3, 5)), 0);
    }

    #[test]
    fn index_convention() {
        let v = BitVector::from_index(0b110, 3);
        assert!(v.get(0) && v.get(1) && !v.get(2));
        assert_eq!(v.to_index(), 6);
    }

    #[test]
    fn canonical_completion() {
        let h = BinaryMatrix::truncated_identity(2, 4);
        let c = complete_basis(&h).unwrap();
        assert_eq!(c, BinaryMatrix::identity(4).row_range(2, 4));
    }

    #[test]
    fn text_roundtrip_wide() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = BinaryMatrix::random(3, 70, &mut rng);
        let text = m.to_text();
        assert_eq!(BinaryMatrix::from_text(&text).unwrap(), m);
        assert!(BinaryMatrix::from_text("1 4\n00000000000000ff\n").is_err());
    }

    #[test]
    fn singular_inverse_fails() {
        let m = BinaryMatrix::parse_rows(&["11", "11"]).unwrap();
        assert!(matches!(m.inverse(), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn single_bit_collision() {
        let spec = HashFamilySpec::new(HashKind::UniformLinear, 1, 1, 0).unwrap();
        let p = collision_probability(&spec, &BitVector::zeros(1), &BitVector::unit(1, 0)).unwrap();
        assert_eq!(p, 0.5);
    }
}
