//! Dense primal-dual interior-point solver for small complex Hermitian
//! semidefinite programs in block-diagonal standard form:
//!
//! ```text
//! minimize ⟨C, X⟩  subject to  ⟨A_i, X⟩ = b_i,  X ⪰ 0
//! maximize b·y     subject to  Z = C − Σ y_i A_i ⪰ 0
//! ```
//!
//! with `⟨A, X⟩ = Re Tr(A X)` and `X = diag(X_1, …, X_k)`. One-by-one blocks
//! act as nonnegative scalar variables. The search direction is the HKM
//! direction with a Mehrotra predictor-corrector step.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::config::tolerances;
use crate::qcore::linalg::{eigenvalues_hermitian, hermitian_part, ComplexMatrix, C64, ONE};
use crate::{Error, Result};

/// Coefficient matrix restricted to one block.
#[derive(Debug, Clone, PartialEq)]
pub enum Coeff {
    /// Every nonzero entry `(row, col, value)` of a Hermitian matrix.
    Sparse(Vec<(usize, usize, C64)>),
    Dense(ComplexMatrix),
}

impl Coeff {
    /// `|p><p|` when `p == q`, otherwise `|p><q| + |q><p|` (picks `2 Re X_pq`).
    pub fn sym(p: usize, q: usize, scale: f64) -> Self {
        if p == q {
            Coeff::Sparse(vec![(p, p, C64::new(scale, 0.0))])
        } else {
            Coeff::Sparse(vec![(p, q, C64::new(scale, 0.0)), (q, p, C64::new(scale, 0.0))])
        }
    }

    /// `i|p><q| − i|q><p|` (picks `2 Im X_pq`).
    pub fn antisym(p: usize, q: usize, scale: f64) -> Self {
        Coeff::Sparse(vec![(p, q, C64::new(0.0, scale)), (q, p, C64::new(0.0, -scale))])
    }

    fn cost(&self, n: usize) -> usize {
        match self {
            Coeff::Sparse(e) => e.len(),
            Coeff::Dense(_) => n * n,
        }
    }

    /// `Re Tr(A G)`
    fn inner(&self, g: &ComplexMatrix) -> f64 {
        match self {
            Coeff::Sparse(e) => e.iter().map(|&(p, q, a)| (a * g[(q, p)]).re).sum(),
            Coeff::Dense(a) => {
                let n = a.nrows();
                let mut s = 0.0;
                for p in 0..n {
                    for q in 0..n {
                        s += (a[(p, q)] * g[(q, p)]).re;
                    }
                }
                s
            }
        }
    }

    /// `out += s · A`
    fn add_to(&self, out: &mut ComplexMatrix, s: f64) {
        match self {
            Coeff::Sparse(e) => {
                for &(p, q, a) in e {
                    out[(p, q)] += a * s;
                }
            }
            Coeff::Dense(a) => *out += a.scale(s),
        }
    }

    fn to_dense(&self, n: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        self.add_to(&mut m, 1.0);
        m
    }

    /// `X A Z⁻¹`
    fn sandwich(&self, x: &ComplexMatrix, zinv: &ComplexMatrix, out: &mut ComplexMatrix) {
        match self {
            Coeff::Sparse(e) => {
                out.fill(C64::new(0.0, 0.0));
                let n = x.nrows();
                for &(p, q, a) in e {
                    for s in 0..n {
                        let w = a * zinv[(q, s)];
                        if w == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for r in 0..n {
                            out[(r, s)] += x[(r, p)] * w;
                        }
                    }
                }
            }
            Coeff::Dense(a) => {
                let t = x * a;
                out.gemm(ONE, &t, zinv, C64::new(0.0, 0.0));
            }
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        match self {
            Coeff::Sparse(e) => {
                if e.iter().any(|&(p, q, _)| p >= n || q >= n) {
                    return Err(Error::DimensionMismatch("sparse entry outside block".into()));
                }
            }
            Coeff::Dense(a) => {
                if a.nrows() != n || a.ncols() != n {
                    return Err(Error::DimensionMismatch("dense coefficient size".into()));
                }
            }
        }
        let d = self.to_dense(n);
        if crate::qcore::linalg::hermitian_defect(&d) > 1e-12 * (1.0 + crate::qcore::linalg::max_abs(&d)) {
            return Err(Error::InvalidState("coefficient matrix not Hermitian".into()));
        }
        Ok(())
    }
}

/// Linear functional `X ↦ Σ_blocks ⟨A_b, X_b⟩`.
pub type Terms = Vec<(usize, Coeff)>;

#[derive(Debug, Clone)]
pub struct Constraint {
    pub terms: Terms,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// A semidefinite program over block-diagonal Hermitian variables.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub blocks: Vec<usize>,
    pub objective: Terms,
    pub sense: Sense,
    pub constraints: Vec<Constraint>,
}

impl SdpProblem {
    pub fn new(blocks: Vec<usize>, sense: Sense) -> Self {
        Self {
            blocks,
            objective: Vec::new(),
            sense,
            constraints: Vec::new(),
        }
    }

    pub fn objective(&mut self, block: usize, c: Coeff) -> &mut Self {
        self.objective.push((block, c));
        self
    }

    pub fn constrain(&mut self, terms: Terms, rhs: f64) -> &mut Self {
        self.constraints.push(Constraint { terms, rhs });
        self
    }

    pub fn solve(&self) -> Result<SdpSolution> {
        Solver::new(self)?.run()
    }
}

/// Optimal value plus primal/dual certificates.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// Optimal value in the problem's own sense.
    pub value: f64,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub x: Vec<ComplexMatrix>,
    pub y: Vec<f64>,
    pub z: Vec<ComplexMatrix>,
    /// `|primal − dual|`
    pub gap: f64,
    pub infeasibility: f64,
    pub iterations: usize,
}

#[derive(Serialize)]
struct TraceRecord {
    iter: usize,
    pobj: f64,
    dobj: f64,
    gap: f64,
    pinf: f64,
    dinf: f64,
    mu: f64,
    alpha_p: f64,
    alpha_d: f64,
}

struct Solver<'a> {
    p: &'a SdpProblem,
    /// Objective in minimization form.
    c: Vec<ComplexMatrix>,
    b: DVector<f64>,
    cost: Vec<usize>,
}

type Blocks = Vec<ComplexMatrix>;

fn zeros_like(blocks: &[usize]) -> Blocks {
    blocks.iter().map(|&n| ComplexMatrix::zeros(n, n)).collect()
}

fn inner(a: &Blocks, b: &Blocks) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y.iter()).map(|(p, q)| (p.conj() * q).re).sum::<f64>())
        .sum()
}

fn frob(a: &Blocks) -> f64 {
    inner(a, a).sqrt()
}

fn cholesky_inverse(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    m.clone().cholesky().map(|c| c.inverse())
}

/// Largest `α ≤ 1/0` keeping `X + α dX ⪰ 0`, returned as `+∞` when unbounded.
fn max_step(x: &Blocks, dx: &Blocks) -> f64 {
    let mut alpha = f64::INFINITY;
    for (xb, db) in x.iter().zip(dx) {
        let lam = match xb.clone().cholesky() {
            Some(ch) => {
                let l = ch.l();
                let t = l
                    .solve_lower_triangular(db)
                    .and_then(|t| l.solve_lower_triangular(&t.adjoint()));
                match t {
                    Some(t) => eigenvalues_hermitian(&t)[0],
                    None => return 0.0,
                }
            }
            None => return 0.0,
        };
        if lam < 0.0 {
            alpha = alpha.min(-1.0 / lam);
        }
    }
    alpha
}

impl<'a> Solver<'a> {
    fn new(p: &'a SdpProblem) -> Result<Self> {
        if p.blocks.is_empty() || p.blocks.contains(&0) {
            return Err(Error::DimensionMismatch("empty block list".into()));
        }
        let check = |terms: &Terms| -> Result<()> {
            for (b, c) in terms {
                let n = *p
                    .blocks
                    .get(*b)
                    .ok_or_else(|| Error::DimensionMismatch(format!("block {b} missing")))?;
                c.check(n)?;
            }
            Ok(())
        };
        check(&p.objective)?;
        for con in &p.constraints {
            check(&con.terms)?;
        }
        let sign = match p.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut c = zeros_like(&p.blocks);
        for (b, coeff) in &p.objective {
            coeff.add_to(&mut c[*b], sign);
        }
        let b = DVector::from_iterator(p.constraints.len(), p.constraints.iter().map(|c| c.rhs));
        let cost = p
            .constraints
            .iter()
            .map(|con| con.terms.iter().map(|(b, c)| c.cost(p.blocks[*b])).sum())
            .collect();
        Ok(Self { p, c, b, cost })
    }

    fn apply(&self, x: &Blocks) -> DVector<f64> {
        DVector::from_iterator(
            self.p.constraints.len(),
            self.p
                .constraints
                .iter()
                .map(|con| con.terms.iter().map(|(b, c)| c.inner(&x[*b])).sum::<f64>()),
        )
    }

    fn adjoint(&self, y: &DVector<f64>) -> Blocks {
        let mut out = zeros_like(&self.p.blocks);
        for (con, &yi) in self.p.constraints.iter().zip(y.iter()) {
            if yi != 0.0 {
                for (b, c) in &con.terms {
                    c.add_to(&mut out[*b], yi);
                }
            }
        }
        out
    }

    /// Schur complement `M_ij = Re Tr(A_i X A_j Z⁻¹)`.
    fn schur(&self, x: &Blocks, zinv: &Blocks) -> DMatrix<f64> {
        let m = self.p.constraints.len();
        let nb = self.p.blocks.len();
        let mut out = DMatrix::<f64>::zeros(m, m);
        let mut g: Vec<Option<ComplexMatrix>> = vec![None; nb];
        let mut buf = zeros_like(&self.p.blocks);
        let mut touched = vec![false; nb];
        for j in 0..m {
            let cj = &self.p.constraints[j];
            touched.iter_mut().for_each(|t| *t = false);
            for (b, coeff) in &cj.terms {
                coeff.sandwich(&x[*b], &zinv[*b], &mut buf[*b]);
                match &mut g[*b] {
                    Some(acc) if touched[*b] => *acc += &buf[*b],
                    slot => *slot = Some(buf[*b].clone()),
                }
                touched[*b] = true;
            }
            let key_j = (self.cost[j], j);
            for i in 0..m {
                if (self.cost[i], i) > key_j {
                    continue;
                }
                let mut s = 0.0;
                for (b, coeff) in &self.p.constraints[i].terms {
                    if touched[*b] {
                        s += coeff.inner(g[*b].as_ref().expect("touched block"));
                    }
                }
                out[(i, j)] = s;
            }
        }
        for j in 0..m {
            for i in 0..m {
                if (self.cost[i], i) > (self.cost[j], j) {
                    out[(i, j)] = out[(j, i)];
                }
            }
        }
        let t = out.transpose();
        (out + t) * 0.5
    }

    fn run(&self) -> Result<SdpSolution> {
        let tol = tolerances();
        let blocks = &self.p.blocks;
        let m = self.p.constraints.len();
        let big_n: f64 = blocks.iter().map(|&n| n as f64).sum();

        // starting point
        let mut x = Vec::with_capacity(blocks.len());
        let mut z = Vec::with_capacity(blocks.len());
        for (bi, &n) in blocks.iter().enumerate() {
            let nf = n as f64;
            let mut xi = 10.0_f64.max(nf.sqrt());
            let mut eta = 10.0_f64.max(nf.sqrt()).max(self.c[bi].norm());
            for (k, con) in self.p.constraints.iter().enumerate() {
                for (b, coeff) in &con.terms {
                    if *b == bi {
                        let an = coeff.to_dense(n).norm();
                        xi = xi.max(nf * (1.0 + self.b[k].abs()) / (1.0 + an));
                        eta = eta.max(an);
                    }
                }
            }
            x.push(ComplexMatrix::identity(n, n).scale(xi));
            z.push(ComplexMatrix::identity(n, n).scale(eta));
        }
        let mut y = DVector::<f64>::zeros(m);
        let ident: Blocks = blocks.iter().map(|&n| ComplexMatrix::identity(n, n)).collect();
        let gram = SchurFactor::new(self.schur(&ident, &ident));

        let bnorm = 1.0 + self.b.norm();
        let cnorm = 1.0 + frob(&self.c);
        let mut best: Option<(f64, SdpSolution)> = None;
        let mut stalls = 0;

        for iter in 0..=tol.sdp_max_iterations {
            let ax = self.apply(&x);
            let rp = &self.b - &ax;
            let aty = self.adjoint(&y);
            let rd: Blocks = (0..blocks.len()).map(|k| &self.c[k] - &z[k] - &aty[k]).collect();
            let pobj = inner(&self.c, &x);
            let dobj = self.b.dot(&y);
            let pinf = rp.norm() / bnorm;
            let dinf = frob(&rd) / cnorm;
            let gap = (pobj - dobj).abs();
            let relgap = gap / (1.0 + pobj.abs() + dobj.abs());
            let mu = inner(&x, &z) / big_n;
            let score = relgap.max(pinf).max(dinf);

            let accepted = gap <= tol.sdp_gap && pinf <= tol.sdp_gap && dinf <= tol.sdp_gap;
            if best.as_ref().is_none_or(|(s, _)| score < *s) {
                best = Some((score, self.solution(&x, &y, &z, pobj, dobj, pinf.max(dinf), iter)));
                stalls = 0;
            } else {
                stalls += 1;
            }
            if score < tol.sdp_target || (accepted && stalls > 0) || iter == tol.sdp_max_iterations {
                break;
            }
            if stalls > 8 {
                break;
            }

            let Some(zinv) = z.iter().map(cholesky_inverse).collect::<Option<Vec<_>>>() else {
                break;
            };
            let schur = self.schur(&x, &zinv);
            let factor = SchurFactor::new(schur);

            // predictor
            let xrz: Blocks = (0..blocks.len()).map(|k| &x[k] * &rd[k] * &zinv[k]).collect();
            let k_aff: Blocks = (0..blocks.len()).map(|k| -&x[k] - &xrz[k]).collect();
            let (dxa, dya, dza) = match self.direction(&factor, &gram, &rp, &rd, &x, &zinv, &k_aff) {
                Some(d) => d,
                None => break,
            };
            let ap = (max_step(&x, &dxa)).min(1.0);
            let ad = (max_step(&z, &dza)).min(1.0);
            let xa: Blocks = (0..blocks.len()).map(|k| &x[k] + dxa[k].scale(ap)).collect();
            let za: Blocks = (0..blocks.len()).map(|k| &z[k] + dza[k].scale(ad)).collect();
            let mu_aff = inner(&xa, &za) / big_n;
            let sigma = if mu > 0.0 { (mu_aff / mu).max(0.0).powi(3).min(1.0) } else { 0.0 };
            let gamma = 0.9 + 0.09 * ap.min(ad);

            // corrector
            let k_cor: Blocks = (0..blocks.len())
                .map(|k| {
                    zinv[k].scale(sigma * mu) - &x[k] - &xrz[k] - &dxa[k] * &dza[k] * &zinv[k]
                })
                .collect();
            let (dx, dy, dz) = match self.direction(&factor, &gram, &rp, &rd, &x, &zinv, &k_cor) {
                Some(d) => d,
                None => (dxa, dya, dza),
            };
            let alpha_p = (gamma * max_step(&x, &dx)).min(1.0);
            let alpha_d = (gamma * max_step(&z, &dz)).min(1.0);

            if tol.sdp_trace {
                let rec = TraceRecord {
                    iter,
                    pobj,
                    dobj,
                    gap,
                    pinf,
                    dinf,
                    mu,
                    alpha_p,
                    alpha_d,
                };
                if let Ok(s) = serde_json::to_string(&rec) {
                    eprintln!("{s}");
                }
            }
            if alpha_p < 1e-14 && alpha_d < 1e-14 {
                break;
            }
            for k in 0..blocks.len() {
                x[k] += dx[k].scale(alpha_p);
                x[k] = hermitian_part(&x[k]);
                z[k] += dz[k].scale(alpha_d);
                z[k] = hermitian_part(&z[k]);
            }
            y += dy * alpha_d;
        }

        let (_, sol) = best.expect("at least one iterate");
        if sol.gap <= tol.sdp_gap && sol.infeasibility <= tol.sdp_gap {
            Ok(sol)
        } else {
            Err(Error::SolverFailed {
                iterations: sol.iterations,
                gap: sol.gap,
                infeasibility: sol.infeasibility,
            })
        }
    }

    /// Solve the Newton system for a given right-hand side operator `K`
    /// (so that `dX = K + X A*(dy) Z⁻¹`).
    #[allow(clippy::too_many_arguments)]
    fn direction(
        &self,
        factor: &SchurFactor,
        gram: &SchurFactor,
        rp: &DVector<f64>,
        rd: &Blocks,
        x: &Blocks,
        zinv: &Blocks,
        k: &Blocks,
    ) -> Option<(Blocks, DVector<f64>, Blocks)> {
        let rhs = rp - self.apply(k);
        let dy = factor.solve(&rhs)?;
        let atdy = self.adjoint(&dy);
        let dz: Blocks = (0..rd.len()).map(|b| &rd[b] - &atdy[b]).collect();
        let mut dx: Blocks = (0..rd.len())
            .map(|b| hermitian_part(&(&k[b] + &x[b] * &atdy[b] * &zinv[b])))
            .collect();
        // Near the boundary `Z⁻¹` amplifies rounding, so `A(dX) = r_p` only
        // holds approximately; project the residual out with `(A A*)⁻¹`.
        let miss = rp - self.apply(&dx);
        if let Some(c) = gram.solve(&miss) {
            for (d, fix) in dx.iter_mut().zip(self.adjoint(&c)) {
                *d += hermitian_part(&fix);
            }
        }
        if dx.iter().chain(&dz).any(|m| m.iter().any(|v| !v.re.is_finite() || !v.im.is_finite())) {
            return None;
        }
        Some((dx, dy, dz))
    }

    #[allow(clippy::too_many_arguments)]
    fn solution(
        &self,
        x: &Blocks,
        y: &DVector<f64>,
        z: &Blocks,
        pobj: f64,
        dobj: f64,
        infeasibility: f64,
        iterations: usize,
    ) -> SdpSolution {
        let sign = match self.p.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        SdpSolution {
            value: sign * pobj,
            primal_objective: sign * pobj,
            dual_objective: sign * dobj,
            x: x.clone(),
            y: y.iter().copied().collect(),
            z: z.clone(),
            gap: (pobj - dobj).abs(),
            infeasibility,
            iterations,
        }
    }
}

/// Factorization of the (real symmetric) Schur complement. Cholesky first;
/// partial-pivot LU when the matrix has lost definiteness. Solves are
/// followed by a few steps of iterative refinement against the unfactored
/// matrix, which keeps primal feasibility from drifting once the system is
/// ill-conditioned near the optimum.
struct SchurFactor {
    matrix: faer::Mat<f64>,
    kind: FactorKind,
}

enum FactorKind {
    Cholesky(faer::linalg::solvers::Llt<f64>),
    Lu(faer::linalg::solvers::PartialPivLu<f64>),
}

const REFINEMENT_STEPS: usize = 3;

impl SchurFactor {
    fn new(m: DMatrix<f64>) -> Self {
        let n = m.nrows();
        let matrix = faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)]);
        let kind = match matrix.llt(faer::Side::Lower) {
            Ok(c) => FactorKind::Cholesky(c),
            Err(_) => FactorKind::Lu(matrix.partial_piv_lu()),
        };
        Self { matrix, kind }
    }

    fn raw_solve(&self, r: &faer::Mat<f64>) -> faer::Mat<f64> {
        use faer::linalg::solvers::Solve;
        match &self.kind {
            FactorKind::Cholesky(c) => c.solve(r),
            FactorKind::Lu(l) => l.solve(r),
        }
    }

    fn solve(&self, rhs: &DVector<f64>) -> Option<DVector<f64>> {
        let n = rhs.len();
        let b = faer::Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
        let mut x = self.raw_solve(&b);
        let mut res_norm = f64::INFINITY;
        for _ in 0..REFINEMENT_STEPS {
            let r = &b - &self.matrix * &x;
            let norm = r.norm_l2();
            if norm.is_nan() || norm >= res_norm {
                break;
            }
            res_norm = norm;
            x += self.raw_solve(&r);
        }
        let out = DVector::from_fn(n, |i, _| x[(i, 0)]);
        out.iter().all(|v| v.is_finite()).then_some(out)
    }
}

/// Hermitian basis of `n × n` matrices, orthogonal under `⟨·,·⟩`:
/// diagonal units, then `sym(p, q)` and `antisym(p, q)` for `p < q`.
pub fn hermitian_basis(n: usize) -> Vec<Coeff> {
    let mut out = Vec::with_capacity(n * n);
    for p in 0..n {
        out.push(Coeff::sym(p, p, 1.0));
    }
    for p in 0..n {
        for q in p + 1..n {
            out.push(Coeff::sym(p, q, 1.0));
            out.push(Coeff::antisym(p, q, 1.0));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::c64;

    #[test]
    fn largest_eigenvalue_as_sdp() {
        // max ⟨C, X⟩ s.t. Tr X = 1 gives λ_max(C)
        let c = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c64(1.0, 0.0), c64(0.0, 2.0), c64(0.0, -2.0), c64(-1.0, 0.0)],
        );
        let mut p = SdpProblem::new(vec![2], Sense::Maximize);
        p.objective(0, Coeff::Dense(c));
        p.constrain(vec![(0, Coeff::sym(0, 0, 1.0)), (0, Coeff::sym(1, 1, 1.0))], 1.0);
        let s = p.solve().unwrap();
        assert!((s.value - 5.0_f64.sqrt()).abs() < 1e-7, "{}", s.value);
    }

    #[test]
    fn scalar_lp() {
        // min x1 + 2 x2 s.t. x1 + x2 = 1, x ≥ 0
        let mut p = SdpProblem::new(vec![1, 1], Sense::Minimize);
        p.objective(0, Coeff::sym(0, 0, 1.0)).objective(1, Coeff::sym(0, 0, 2.0));
        p.constrain(vec![(0, Coeff::sym(0, 0, 1.0)), (1, Coeff::sym(0, 0, 1.0))], 1.0);
        let s = p.solve().unwrap();
        assert!((s.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn hermitian_basis_is_orthogonal() {
        let n = 3;
        let basis: Vec<ComplexMatrix> = hermitian_basis(n).iter().map(|c| c.to_dense(n)).collect();
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let v = (a * b).trace().re;
                if i != j {
                    assert!(v.abs() < 1e-14);
                } else {
                    assert!(v > 0.5);
                }
            }
        }
    }
}
