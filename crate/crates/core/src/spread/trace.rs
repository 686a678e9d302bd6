use std::fmt;
use std::fmt::Write as _;

use serde::{Serialize, Serializer};

/// Infection time of the `k`-th vertex, or `Never` when the process stops first.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub enum Arrival {
    At(f64),
    Never,
}

impl Arrival {
    pub fn time(self) -> Option<f64> {
        match self {
            Arrival::At(t) => Some(t),
            Arrival::Never => None,
        }
    }

    pub fn is_never(self) -> bool {
        matches!(self, Arrival::Never)
    }
}

impl fmt::Display for Arrival {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arrival::At(t) => write!(f, "{t}"),
            Arrival::Never => f.write_str("inf"),
        }
    }
}

impl Serialize for Arrival {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Arrival::At(t) => s.serialize_f64(*t),
            Arrival::Never => s.serialize_str("inf"),
        }
    }
}

/// One realization of a spreading process on a rooted graph with `n` vertices.
///
/// Index `k − 1` of the per-step vectors describes the `k`-th infection.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpreadTrace {
    /// `T_1 = 0 ≤ T_2 ≤ … ≤ T_n`.
    pub times: Vec<Arrival>,
    /// Vertices in infection order; shorter than `n` if some are never reached.
    pub order: Vec<u32>,
    /// Per vertex, the edge it was infected through. `None` for the root and
    /// for unreached vertices.
    pub infector_edge: Vec<Option<u32>>,
    /// Active edges (exactly one infected endpoint) right after the `k`-th infection.
    pub front_sizes: Vec<u32>,
    /// Smallest `k < n` whose front has at most one edge.
    pub first_bottleneck: Option<usize>,
}

impl SpreadTrace {
    pub fn n(&self) -> usize {
        self.times.len()
    }

    /// `T_k` for 1-based `k`.
    pub fn time(&self, k: usize) -> Arrival {
        self.times[k - 1]
    }

    pub(crate) fn finish(
        n: usize,
        mut times: Vec<Arrival>,
        order: Vec<u32>,
        infector_edge: Vec<Option<u32>>,
        mut front_sizes: Vec<u32>,
    ) -> Self {
        times.resize(n, Arrival::Never);
        let last = front_sizes.last().copied().unwrap_or(0);
        front_sizes.resize(n, last);
        let first_bottleneck = (1..n).find(|&k| front_sizes[k - 1] <= 1);
        SpreadTrace {
            times,
            order,
            infector_edge,
            front_sizes,
            first_bottleneck,
        }
    }

    /// CSV with columns `k,T_k,front_size,infector_edge`. Unreached times are
    /// written as `inf`; the root and unreached rows leave the edge empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,T_k,front_size,infector_edge\n");
        for k in 1..=self.n() {
            let edge = self
                .order
                .get(k - 1)
                .and_then(|&v| self.infector_edge[v as usize])
                .map(|e| e.to_string())
                .unwrap_or_default();
            let _ = writeln!(out, "{k},{},{},{edge}", self.times[k - 1], self.front_sizes[k - 1]);
        }
        out
    }
}
