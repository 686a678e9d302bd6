use rand::Rng;
use rand_distr::{Binomial, Distribution, Geometric, Poisson};
use serde::{Deserialize, Serialize};

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Critical offspring distribution (mean exactly 1).
///
/// Serialized as its string form, see [`FromStr`](std::str::FromStr).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum OffspringLaw {
    /// Poisson(1), `σ² = 1`.
    Poisson1,
    /// `P[ξ = k] = 2^-(k+1)`, `σ² = 2`.
    GeometricHalf,
    /// Binomial(k, 1/k), `σ² = 1 − 1/k`; needs `k ≥ 2`.
    BinomialCritical(u32),
}

impl OffspringLaw {
    pub fn validate(&self) -> Result<()> {
        match *self {
            OffspringLaw::BinomialCritical(k) if k < 2 => Err(Error::param(format!(
                "BinomialCritical needs k >= 2, got {k}"
            ))),
            _ => Ok(()),
        }
    }

    pub fn mean(&self) -> f64 {
        1.0
    }

    pub fn variance(&self) -> f64 {
        match *self {
            OffspringLaw::Poisson1 => 1.0,
            OffspringLaw::GeometricHalf => 2.0,
            OffspringLaw::BinomialCritical(k) => 1.0 - 1.0 / k as f64,
        }
    }

    /// `P[ξ = k]`.
    pub fn pmf(&self, k: u64) -> f64 {
        match *self {
            OffspringLaw::Poisson1 => (-1.0 - ln_factorial(k)).exp(),
            OffspringLaw::GeometricHalf => 0.5f64.powi(k as i32 + 1),
            OffspringLaw::BinomialCritical(n) => {
                let n = n as u64;
                if k > n {
                    return 0.0;
                }
                let p = 1.0 / n as f64;
                let log = ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
                    + k as f64 * p.ln()
                    + (n - k) as f64 * (1.0 - p).ln();
                log.exp()
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match *self {
            OffspringLaw::Poisson1 => poisson1(rng),
            OffspringLaw::GeometricHalf => geometric_half(rng),
            OffspringLaw::BinomialCritical(n) => binomial(n as u64, 1.0 / n as f64, rng),
        }
    }

    /// Draw from the size-biased law `P[ξ̂ = k] = k·P[ξ = k]`.
    pub fn sample_size_biased<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match *self {
            OffspringLaw::Poisson1 => 1 + poisson1(rng),
            OffspringLaw::GeometricHalf => 1 + geometric_half(rng) + geometric_half(rng),
            OffspringLaw::BinomialCritical(n) => 1 + binomial(n as u64 - 1, 1.0 / n as f64, rng),
        }
    }
}

impl OffspringLaw {
    /// `ln P[ξ_1 + … + ξ_n = j]` for `n ≥ 1` i.i.d. copies.
    fn ln_sum_pmf(&self, n: u64, j: u64) -> f64 {
        let (nf, jf) = (n as f64, j as f64);
        match *self {
            OffspringLaw::Poisson1 => jf * nf.ln() - nf - ln_gamma(jf + 1.0),
            OffspringLaw::GeometricHalf => {
                ln_gamma(nf + jf) - ln_gamma(nf) - ln_gamma(jf + 1.0) - (nf + jf) * std::f64::consts::LN_2
            }
            OffspringLaw::BinomialCritical(k) => {
                let trials = n * k as u64;
                if j > trials {
                    return f64::NEG_INFINITY;
                }
                let p = 1.0 / k as f64;
                ln_gamma(trials as f64 + 1.0) - ln_gamma(jf + 1.0) - ln_gamma((trials - j) as f64 + 1.0)
                    + jf * p.ln()
                    + (trials - j) as f64 * (1.0 - p).ln()
            }
        }
    }

    /// `P[κ = m]` at the root of the size-biased infinite tree: one spine
    /// child plus `ξ̂ − 1` independent trees, whose total size is given by
    /// the hitting-time formula `P[S = s | k trees] = (k/s) P[ξ_1+…+ξ_s = s−k]`.
    pub fn limit_kappa_pmf(&self, m: u64) -> f64 {
        let siblings = |k: u64| (k + 1) as f64 * self.pmf(k + 1);
        if m == 0 {
            return 0.0;
        }
        let s = m - 1;
        if s == 0 {
            return siblings(0);
        }
        let mut total = 0.0;
        for k in 1..=s {
            let w = siblings(k);
            if w < 1e-300 {
                break;
            }
            total += w * (k as f64 / s as f64) * self.ln_sum_pmf(s, s - k).exp();
        }
        total
    }

    /// Quantiles of the limit law of [`limit_kappa_pmf`](Self::limit_kappa_pmf);
    /// `None` when not reached by `m_max`.
    pub fn limit_kappa_quantiles(&self, qs: &[f64], m_max: u64) -> Vec<Option<u64>> {
        let mut out = vec![None; qs.len()];
        let mut cdf = 0.0;
        for m in 1..=m_max {
            cdf += self.limit_kappa_pmf(m);
            for (o, &q) in out.iter_mut().zip(qs) {
                if o.is_none() && cdf >= q {
                    *o = Some(m);
                }
            }
            if out.iter().all(Option::is_some) {
                break;
            }
        }
        out
    }
}

fn poisson1<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    Poisson::new(1.0).expect("valid rate").sample(rng) as u64
}

fn geometric_half<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    Geometric::new(0.5).expect("valid probability").sample(rng)
}

fn binomial<R: Rng + ?Sized>(n: u64, p: f64, rng: &mut R) -> u64 {
    Binomial::new(n, p).expect("valid binomial").sample(rng)
}

fn ln_factorial(k: u64) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

impl std::str::FromStr for OffspringLaw {
    type Err = Error;

    /// `poisson1`, `geometric-half` or `binomial:K`.
    fn from_str(s: &str) -> Result<Self> {
        let law = match s {
            "poisson1" => OffspringLaw::Poisson1,
            "geometric-half" => OffspringLaw::GeometricHalf,
            _ => {
                let k = s
                    .strip_prefix("binomial:")
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(|| Error::param(format!("unknown offspring law {s:?}")))?;
                OffspringLaw::BinomialCritical(k)
            }
        };
        law.validate()?;
        Ok(law)
    }
}

impl TryFrom<String> for OffspringLaw {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<OffspringLaw> for String {
    fn from(law: OffspringLaw) -> String {
        law.to_string()
    }
}

impl std::fmt::Display for OffspringLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OffspringLaw::Poisson1 => f.write_str("poisson1"),
            OffspringLaw::GeometricHalf => f.write_str("geometric-half"),
            OffspringLaw::BinomialCritical(k) => write!(f, "binomial:{k}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pmfs_are_critical() {
        for law in [
            OffspringLaw::Poisson1,
            OffspringLaw::GeometricHalf,
            OffspringLaw::BinomialCritical(2),
            OffspringLaw::BinomialCritical(5),
        ] {
            let (mut mass, mut mean, mut second) = (0.0, 0.0, 0.0);
            for k in 0..200u64 {
                let p = law.pmf(k);
                mass += p;
                mean += k as f64 * p;
                second += (k * k) as f64 * p;
            }
            assert!((mass - 1.0).abs() < 1e-12, "{law:?}");
            assert!((mean - 1.0).abs() < 1e-12, "{law:?}");
            assert!((second - 1.0 - law.variance()).abs() < 1e-10, "{law:?}");
        }
    }

    #[test]
    fn limit_kappa_law() {
        let p = OffspringLaw::Poisson1;
        assert!((p.limit_kappa_pmf(1) - (-1f64).exp()).abs() < 1e-15);
        // κ = 2: one sibling which is a leaf.
        assert!((p.limit_kappa_pmf(2) - (-2f64).exp()).abs() < 1e-15);
        let g = OffspringLaw::GeometricHalf;
        assert!((g.limit_kappa_pmf(1) - 0.25).abs() < 1e-15);
        assert!((g.limit_kappa_pmf(2) - 2.0 * 0.25 * 0.5 * 0.5).abs() < 1e-15);
        let b = OffspringLaw::BinomialCritical(2);
        // Siblings: 1 w.p. 1/2; trees: leaf 1/4, root+1 leaf 2·1/4·1/4.
        assert!((b.limit_kappa_pmf(1) - 0.5).abs() < 1e-15);
        assert!((b.limit_kappa_pmf(2) - 0.5 * 0.25).abs() < 1e-15);
        assert!((b.limit_kappa_pmf(3) - 0.5 * 0.125).abs() < 1e-15);
        assert_eq!(p.limit_kappa_quantiles(&[0.5, 0.75, 0.9, 0.95], 100_000), vec![Some(2), Some(10), Some(64), Some(255)]);
        assert_eq!(p.limit_kappa_quantiles(&[0.999], 10), vec![None]);
    }

    #[test]
    fn binomial_needs_two_trials() {
        assert!(OffspringLaw::BinomialCritical(1).validate().is_err());
        assert!(OffspringLaw::BinomialCritical(2).validate().is_ok());
    }

    #[test]
    fn parse_round_trip() {
        for law in [OffspringLaw::Poisson1, OffspringLaw::GeometricHalf, OffspringLaw::BinomialCritical(3)] {
            assert_eq!(law.to_string().parse::<OffspringLaw>().unwrap(), law);
        }
        assert!("binomial:1".parse::<OffspringLaw>().is_err());
        assert!("poisson".parse::<OffspringLaw>().is_err());
        let json = serde_json::to_string(&OffspringLaw::BinomialCritical(3)).unwrap();
        assert_eq!(json, "\"binomial:3\"");
        assert!(serde_json::from_str::<OffspringLaw>("\"binomial:0\"").is_err());
    }
}
