use rand::Rng;

use crate::randsrc::WeightLaw;

/// Per-edge passage times, drawn on first use and then fixed.
///
/// Sharing one table between two processes couples them on identical
/// weights.
#[derive(Clone, Debug)]
pub struct EdgeWeights {
    law: Option<WeightLaw>,
    w: Vec<f64>,
}

impl EdgeWeights {
    /// Undrawn weights for `m` edges.
    pub fn lazy(m: usize, law: WeightLaw) -> Self {
        EdgeWeights {
            law: Some(law),
            w: vec![f64::NAN; m],
        }
    }

    /// Predetermined weights. Every entry must be finite and nonnegative.
    pub fn fixed(w: Vec<f64>) -> Self {
        assert!(w.iter().all(|x| x.is_finite() && *x >= 0.0), "weights must be finite and nonnegative");
        EdgeWeights { law: None, w }
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// Weight of edge `e`, drawing it if needed.
    pub fn get<R: Rng + ?Sized>(&mut self, e: usize, rng: &mut R) -> f64 {
        let x = self.w[e];
        if !x.is_nan() {
            return x;
        }
        let law = self.law.expect("fixed weights are never undrawn");
        let x = law.sample(rng);
        self.w[e] = x;
        x
    }

    /// Weight of edge `e` if it has been drawn.
    pub fn peek(&self, e: usize) -> Option<f64> {
        let x = self.w[e];
        (!x.is_nan()).then_some(x)
    }
}
