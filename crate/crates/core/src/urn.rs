//! Two-color Pólya urns with arbitrary positive increments.
//!
//! At each step the whole increment goes to red with probability
//! `red / (red + blue)` and to blue otherwise. Fed with the branch sizes of
//! the colored Wilson algorithm, the urn reproduces the red/blue split of
//! the spanning tree in law.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::genmodels::ColoredUstResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UrnState {
    red: u64,
    blue: u64,
    initial_total: u64,
    history: Vec<(u64, Color)>,
}

impl UrnState {
    /// Both counts must be positive.
    pub fn new(red: u64, blue: u64) -> Result<Self> {
        if red == 0 || blue == 0 {
            return Err(Error::param(format!("urn needs red, blue >= 1, got ({red}, {blue})")));
        }
        let initial_total = red
            .checked_add(blue)
            .ok_or_else(|| Error::resource("urn count overflow"))?;
        Ok(UrnState {
            red,
            blue,
            initial_total,
            history: Vec::new(),
        })
    }

    pub fn red(&self) -> u64 {
        self.red
    }

    pub fn blue(&self) -> u64 {
        self.blue
    }

    pub fn total(&self) -> u64 {
        self.red + self.blue
    }

    pub fn initial_total(&self) -> u64 {
        self.initial_total
    }

    /// `red / (red + blue)`.
    pub fn ratio(&self) -> f64 {
        self.red as f64 / self.total() as f64
    }

    /// `(increment, color)` for every step so far.
    pub fn history(&self) -> &[(u64, Color)] {
        &self.history
    }

    /// One step with a uniform draw `u ∈ [0, 1)`: red iff `u < red / total`.
    pub fn step_with(&mut self, increment: u64, u: f64) -> Result<Color> {
        if increment == 0 {
            return Err(Error::param("urn increment must be positive"));
        }
        let color = if u * (self.total() as f64) < self.red as f64 {
            Color::Red
        } else {
            Color::Blue
        };
        self.apply(increment, color)?;
        Ok(color)
    }

    /// One random step.
    pub fn step<R: Rng + ?Sized>(&mut self, increment: u64, rng: &mut R) -> Result<Color> {
        if increment == 0 {
            return Err(Error::param("urn increment must be positive"));
        }
        let color = if rng.random_range(0..self.total()) < self.red {
            Color::Red
        } else {
            Color::Blue
        };
        self.apply(increment, color)?;
        Ok(color)
    }

    fn apply(&mut self, increment: u64, color: Color) -> Result<()> {
        let slot = match color {
            Color::Red => &mut self.red,
            Color::Blue => &mut self.blue,
        };
        *slot = slot
            .checked_add(increment)
            .ok_or_else(|| Error::resource("urn count overflow"))?;
        if self.red.checked_add(self.blue).is_none() {
            return Err(Error::resource("urn count overflow"));
        }
        self.history.push((increment, color));
        Ok(())
    }
}

/// Functional form of [`UrnState::step`].
pub fn urn_step<R: Rng + ?Sized>(mut state: UrnState, increment: u64, rng: &mut R) -> Result<UrnState> {
    state.step(increment, rng)?;
    Ok(state)
}

/// Runs the urn from `initial` through `increments` and returns the final
/// red fraction.
pub fn urn_run<R: Rng + ?Sized>(initial: (u64, u64), increments: &[u64], rng: &mut R) -> Result<f64> {
    if increments.is_empty() {
        return Err(Error::param("need at least one increment"));
    }
    let mut state = UrnState::new(initial.0, initial.1)?;
    for &inc in increments {
        state.step(inc, rng)?;
    }
    Ok(state.ratio())
}

/// Distribution of `max_i |Δ_i| / √n` over colored Wilson runs.
#[derive(Clone, Debug, Serialize)]
pub struct IncrementBound {
    pub n: usize,
    /// One value per run, in run order.
    pub values: Vec<f64>,
    pub p50: f64,
    pub p90: f64,
}

/// Summarizes the largest branch size per run, `|Δ_{-1}|` included.
pub fn increment_boundedness_check(runs: &[ColoredUstResult], n: usize) -> Result<IncrementBound> {
    if runs.is_empty() {
        return Err(Error::param("no runs given"));
    }
    let scale = (n as f64).sqrt();
    let mut values = Vec::with_capacity(runs.len());
    for (i, r) in runs.iter().enumerate() {
        if r.n != n {
            return Err(Error::param(format!("run {i} has n = {}, expected {n}", r.n)));
        }
        let max = r.increment_sizes.iter().copied().max().unwrap_or(0);
        values.push(max as f64 / scale);
    }
    let p50 = crate::harness::quantile(&values, 0.5);
    let p90 = crate::harness::quantile(&values, 0.9);
    Ok(IncrementBound { n, values, p50, p90 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randsrc::RngStream;

    #[test]
    fn forced_red_branch() {
        let mut s = UrnState::new(1, 1).unwrap();
        assert_eq!(s.step_with(1, 0.1).unwrap(), Color::Red);
        assert_eq!((s.red(), s.blue()), (2, 1));
        assert!(UrnState::new(5, 0).is_err());
        assert!(s.step_with(0, 0.1).is_err());
    }

    #[test]
    fn single_increment_outcomes() {
        let mut rng = RngStream::new(4, 0);
        for _ in 0..100 {
            let r = urn_run((1, 1), &[7], &mut rng).unwrap();
            assert!(r == 8.0 / 9.0 || r == 1.0 / 9.0);
        }
    }

    #[test]
    fn conservation_and_interior() {
        let mut rng = RngStream::new(6, 0);
        let incs: Vec<u64> = (1..=200).collect();
        let mut s = UrnState::new(1, 1).unwrap();
        for &i in &incs {
            s.step(i, &mut rng).unwrap();
            assert!(s.ratio() > 0.0 && s.ratio() < 1.0);
        }
        assert_eq!(s.total(), 2 + incs.iter().sum::<u64>());
        assert_eq!(s.history().len(), 200);
    }

    #[test]
    fn small_classic_urn_is_uniform_exactly() {
        // Enumerate all colour sequences of 4 unit steps from (1, 1): the
        // final red count is uniform on {1, …, 5}.
        let mut mass = [0f64; 6];
        for bits in 0u32..16 {
            let (mut r, mut b, mut p) = (1u64, 1u64, 1f64);
            for i in 0..4 {
                let t = (r + b) as f64;
                if bits >> i & 1 == 1 {
                    p *= r as f64 / t;
                    r += 1;
                } else {
                    p *= b as f64 / t;
                    b += 1;
                }
            }
            mass[r as usize] += p;
        }
        for m in &mass[1..] {
            assert!((m - 0.2).abs() < 1e-12);
        }
    }
}
