//! Closed-form smoothing for classical distributions without side
//! information.
//!
//! For a distribution `P` the optimal subnormalized `Q` in the fidelity ball
//! `Σ_x √(P_x Q_x) ≥ c` with `max_x Q_x = t` is `Q_x = min(t, κ P_x)` with
//! `Σ Q ≤ 1`; the smallest feasible `t` is found by bisection.

/// Best fidelity reachable with cap `t`, and the corresponding `Q`.
pub fn water_fill(p: &[f64], t: f64) -> (f64, Vec<f64>) {
    let k = p.len() as f64;
    if k * t <= 1.0 {
        let q = vec![t; p.len()];
        let f = p.iter().map(|&x| (x * t).sqrt()).sum();
        return (f, q);
    }
    // Σ_x min(t, κ P_x) = 1, increasing in κ
    let mass = |kappa: f64| p.iter().map(|&x| (kappa * x).min(t)).sum::<f64>();
    let (mut lo, mut hi) = (0.0, 1.0);
    while mass(hi) < 1.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mass(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let q: Vec<f64> = p.iter().map(|&x| (lo * x).min(t)).collect();
    let f = p.iter().zip(&q).map(|(&a, &b)| (a * b).sqrt()).sum();
    (f, q)
}

/// `H_min^ε(X)` in bits for a normalized distribution and trivial side
/// information.
pub fn classical_smooth_min_entropy(p: &[f64], epsilon: f64) -> f64 {
    let c = (1.0 - epsilon * epsilon).sqrt();
    let pmax = p.iter().copied().fold(0.0, f64::max);
    if epsilon == 0.0 {
        return -pmax.log2();
    }
    let (mut lo, mut hi) = (0.0, pmax);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if water_fill(p, mid).0 >= c {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    -hi.log2()
}
