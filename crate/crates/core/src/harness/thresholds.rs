use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ensemble::PlateauRule;
use crate::error::{Error, Result};

/// The versioned defaults, embedded at build time.
pub const DEFAULT_THRESHOLDS: &str = include_str!("thresholds.toml");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Theory,
    Pilot,
    Design,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Threshold {
    pub value: f64,
    pub provenance: Provenance,
    pub note: String,
}

macro_rules! group {
    ($name:ident { $($field:ident),* $(,)? }) => {
        #[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            $(pub $field: Threshold,)*
        }

        impl $name {
            fn entries(&self, prefix: &str, out: &mut BTreeMap<String, Threshold>) {
                $(out.insert(format!("{prefix}.{}", stringify!($field)), self.$field.clone());)*
            }
        }
    };
}

group!(PlateauThresholds { cv, share, tail_index });
group!(GwThresholds { p95_ratio_max, median_max, extra_edge_delta, extra_edge_prob_min, hill_tolerance });
group!(UstThresholds { delta, prob_min, ks_max, urn_interior_min });
group!(UrnThresholds {
    boundary_bin,
    wilson_boundary_max,
    scale_side_max,
    p_value_min,
    martingale_slope_max,
    increment_p90_tolerance,
});
group!(ErThresholds {
    tree_ratio_min,
    p95_factor_max,
    interior_min,
    surplus_slope_lo,
    surplus_slope_hi,
    epsilon,
    escape_min,
});
group!(ScalingThresholds { cycle_slope_tolerance, star_factor_max, q_slope_tolerance, std_errors });

/// All pass thresholds, grouped by experiment family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub version: u32,
    pub plateau: PlateauThresholds,
    pub gw: GwThresholds,
    pub ust: UstThresholds,
    pub urn: UrnThresholds,
    pub er: ErThresholds,
    pub scaling: ScalingThresholds,
}

impl Thresholds {
    /// The embedded defaults.
    pub fn defaults() -> Self {
        Self::parse(DEFAULT_THRESHOLDS).expect("embedded thresholds parse")
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::data(format!("thresholds: {e}")))
    }

    pub fn plateau_rule(&self) -> PlateauRule {
        PlateauRule {
            cv: self.plateau.cv.value,
            share: self.plateau.share.value,
            tail_index: self.plateau.tail_index.value,
        }
    }

    /// Entries of one group (`"gw"`, `"urn"`, …) keyed as `group.name`.
    pub fn group(&self, name: &str) -> BTreeMap<String, Threshold> {
        let mut out = BTreeMap::new();
        match name {
            "plateau" => self.plateau.entries(name, &mut out),
            "gw" => self.gw.entries(name, &mut out),
            "ust" => self.ust.entries(name, &mut out),
            "urn" => self.urn.entries(name, &mut out),
            "er" => self.er.entries(name, &mut out),
            "scaling" => self.scaling.entries(name, &mut out),
            _ => {}
        }
        out
    }
}
