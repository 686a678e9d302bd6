use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::randsrc::WeightLaw;

/// `Q_1, …, Q_k` with `Q_1 = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QTrace {
    pub values: Vec<f64>,
}

/// `Q_2 = min(X, Y)` and `Q_{k+1} = Q_k + min(X, Y − Q_k | Y > Q_k)`, with
/// fresh `X`, `Y` at every step.
pub fn run_q<R: Rng + ?Sized>(law: WeightLaw, k_max: usize, rng: &mut R) -> Result<QTrace> {
    law.validate()?;
    if k_max < 2 {
        return Err(Error::param(format!("k_max must be at least 2, got {k_max}")));
    }
    let mut values = Vec::with_capacity(k_max);
    values.push(0.0);
    let mut q = law.sample(rng).min(law.sample(rng));
    values.push(q);
    while values.len() < k_max {
        let fresh = law.sample(rng);
        let old = law.sample_residual(q, rng)?;
        q += fresh.min(old);
        values.push(q);
    }
    Ok(QTrace { values })
}

/// Iterates `b_{k+1} = b_k + C·b_k^(1−α)` from `b_1` and returns `b_1, …, b_n`.
pub fn bound_recursion(c: f64, b1: f64, alpha: f64, n: usize) -> Result<Vec<f64>> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::param(format!("C must be nonnegative, got {c}")));
    }
    if !(b1 > 0.0 && b1.is_finite()) {
        return Err(Error::param(format!("b1 must be positive, got {b1}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let mut out = Vec::with_capacity(n);
    let mut b = b1;
    for _ in 0..n {
        out.push(b);
        b += c * b.powf(1.0 - alpha);
    }
    Ok(out)
}

/// `max(b_1, (αC)^(1/α))`, the constant `d` in `b_n ≤ d·n^(1/α)`.
pub fn recursion_constant(c: f64, b1: f64, alpha: f64) -> f64 {
    b1.max((alpha * c).powf(1.0 / alpha))
}

/// `P[X_(k) > t]` for the `k`-th smallest of `k + 1` i.i.d. `pow(α, 1)`
/// variables, i.e. the probability that at least two exceed `t`.
///
/// With `q = t^(−α)` this is `1 − (1 − q)^k (1 + kq)`, evaluated through
/// `ln_1p`/`exp_m1` so that small tails keep their relative precision.
pub fn star_tail(k: usize, t: f64, alpha: f64) -> Result<f64> {
    if k < 1 {
        return Err(Error::param("k must be at least 1"));
    }
    if !(t > 1.0) {
        return Err(Error::param(format!("t must exceed 1, got {t}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::param(format!("alpha must be positive, got {alpha}")));
    }
    let q = t.powf(-alpha);
    let kf = k as f64;
    let log_keep = kf * (-q).ln_1p() + (kf * q).ln_1p();
    Ok(-log_keep.exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randsrc::RngStream;

    #[test]
    fn q_is_increasing() {
        let law = WeightLaw::power(0.8, 1.0).unwrap();
        let mut rng = RngStream::new(3, 0);
        for _ in 0..200 {
            let q = run_q(law, 40, &mut rng).unwrap();
            assert_eq!(q.values.len(), 40);
            assert_eq!(q.values[0], 0.0);
            assert!(q.values.windows(2).all(|w| w[1] > w[0]));
        }
        assert!(run_q(law, 1, &mut rng).is_err());
    }

    #[test]
    fn degenerate_recursion() {
        let b = bound_recursion(0.0, 2.5, 0.8, 10).unwrap();
        assert!(b.iter().all(|&x| x == 2.5));
        assert!(bound_recursion(1.0, 0.0, 0.8, 3).is_err());
    }

    #[test]
    fn star_tail_k1_is_min_of_two() {
        for &t in &[1.5f64, 10.0, 1e4] {
            let q: f64 = t.powf(-0.8);
            let expect = q * q;
            assert!((star_tail(1, t, 0.8).unwrap() / expect - 1.0).abs() < 1e-12);
        }
        assert!(star_tail(3, 1.0, 0.8).is_err());
    }

    #[test]
    fn star_tail_matches_literal_formula() {
        for k in [1usize, 2, 5, 30] {
            for &t in &[1.2f64, 3.0, 10.0, 50.0] {
                let q: f64 = t.powf(-0.7);
                let kf = k as f64;
                let literal = 1.0 - (kf + 1.0) * (1.0 - q).powf(kf) * q - (1.0 - q).powf(kf + 1.0);
                assert!((star_tail(k, t, 0.7).unwrap() - literal).abs() < 1e-12);
            }
        }
    }
}
