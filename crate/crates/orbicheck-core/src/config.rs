//! Singularity configurations: a multiset of catalog types plus (b2, b3),
//! and the full consistency report combining the Salamon relation, the
//! characteristic numbers, and both feasibility inequalities.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::catalog::{entry_label, resolve_point, Family};
use crate::error::Error;
use crate::hodge::{
    characteristic_numbers, guan_feasible_with_b3, hitchin_sawon_feasible, salamon_solve,
    CharacteristicNumbers, GlobalSingularityData, HodgeDiamond,
};
use crate::invariants::LocalInvariants;
use crate::rational::Rat;
use crate::Result;

/// One kind of singular point and how many times it occurs.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq, Hash)]
pub struct SingularitySpec {
    pub family: Family,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    pub count: u64,
}

/// Input to all global checks:
/// `{"b2": .., "b3": .., "singularities": [{"family": .., "n": .., "count": ..}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SingularityConfig {
    pub b2: i64,
    pub b3: i64,
    #[serde(default)]
    pub singularities: Vec<SingularitySpec>,
}

impl SingularityConfig {
    pub fn smooth(b2: i64, b3: i64) -> Self {
        SingularityConfig {
            b2,
            b3,
            singularities: Vec::new(),
        }
    }

    pub fn total_points(&self) -> u64 {
        self.singularities.iter().map(|s| s.count).sum()
    }
}

/// Everything the checks produce for one configuration. `flags` is empty
/// exactly when all cross-checks pass.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigReport {
    pub b2: i64,
    pub b3: i64,
    pub points: Vec<(String, u64)>,
    pub total_points: u64,
    pub aggregate: GlobalSingularityData,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b4: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diamond: Option<HodgeDiamond>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub char_numbers: Option<CharacteristicNumbers>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub guan_holds: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hitchin_sawon_holds: Option<bool>,
    pub flags: Vec<String>,
}

/// Resolve every point type by brute force, aggregate, solve for b4, fill
/// the diamond, compute the characteristic numbers with the double-route
/// χ_top assertion, and evaluate both inequalities.
pub fn check_config(config: &SingularityConfig) -> Result<ConfigReport> {
    let mut cache: HashMap<SingularitySpec, LocalInvariants> = HashMap::new();
    let mut aggregate = GlobalSingularityData::smooth();
    let mut points = Vec::new();
    for spec in &config.singularities {
        let key = SingularitySpec {
            count: 0,
            ..spec.clone()
        };
        let inv = match cache.get(&key) {
            Some(inv) => inv.clone(),
            None => {
                let inv = resolve_point(spec.family, spec.n, spec.k)?;
                cache.insert(key, inv.clone());
                inv
            }
        };
        let count = Rat::from_int(spec.count as i64);
        aggregate.s0 += &(&inv.s_p[0] * &count);
        aggregate.s1 += &(&inv.s_p[1] * &count);
        aggregate.s2 += &(&inv.s_p[2] * &count);
        aggregate.eta += &(&inv.eta * &count);
        aggregate.s += &(&inv.s * &count);
        points.push((entry_label(spec.family, spec.n, spec.k), spec.count));
    }

    let mut flags = Vec::new();
    let (b4, diamond) = match salamon_solve(config.b2, config.b3, &aggregate.s) {
        Ok((b4, d)) => (Some(b4), Some(d)),
        Err(Error::NonIntegralS(_)) => {
            flags.push("non-integral s".to_string());
            (None, None)
        }
        Err(Error::NegativeHodgeNumber(_)) => {
            flags.push("negative Hodge number".to_string());
            (None, None)
        }
        Err(e) => return Err(e),
    };
    let char_numbers = match &diamond {
        None => None,
        Some(d) => match characteristic_numbers(d, &aggregate) {
            Ok(c) => Some(c),
            Err(Error::GaussBonnetInconsistency { .. }) => {
                flags.push("Gauss-Bonnet inconsistency".to_string());
                None
            }
            Err(e) => return Err(e),
        },
    };
    let guan_holds = guan_feasible_with_b3(config.b2, config.b3, &aggregate.s).ok();
    if guan_holds == Some(false) {
        flags.push("Guan inequality violated".to_string());
    }
    let (hs_holds, _) =
        hitchin_sawon_feasible(config.b2, config.b3, &aggregate.s0, &aggregate.s1);
    if !hs_holds {
        flags.push("Hitchin-Sawon inequality violated".to_string());
    }
    Ok(ConfigReport {
        b2: config.b2,
        b3: config.b3,
        points,
        total_points: config.total_points(),
        aggregate,
        b4,
        diamond,
        char_numbers,
        guan_holds,
        hitchin_sawon_holds: Some(hs_holds),
        flags,
    })
}
