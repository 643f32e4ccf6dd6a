//! Global bounds derived from the Guan budget and the per-family score
//! formulas, not hardcoded: the budget maximum, the family caps, and the
//! maximal local group order.

use serde::Serialize;

use crate::group::KleinianFamily;
use crate::hodge::guan_budget;
use crate::invariants::{closed_form_s, index2_s_upper_bound};
use crate::rational::Rat;
use crate::Result;

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub struct FamilyCaps {
    pub cyclic: u32,
    pub binary_dihedral: u32,
    pub cyclic_index2: u32,
    pub dihedral_index2: u32,
    pub max_order: u64,
}

/// Largest n per family whose score (or score bound, for index-2) stays
/// within the global budget, and the largest group order they produce.
pub fn family_caps() -> FamilyCaps {
    let budget = Rat::from_int(-global_budget());
    let cap = |score: &dyn Fn(u32) -> Rat| -> u32 {
        let mut n = 1;
        while score(n + 1) >= budget {
            n += 1;
        }
        n
    };
    let cyclic = cap(&|n| closed_form_s(KleinianFamily::Cyclic, n).unwrap());
    let binary_dihedral = cap(&|n| closed_form_s(KleinianFamily::BinaryDihedral, n).unwrap());
    let cyclic_index2 = cap(&|n| index2_s_upper_bound(KleinianFamily::Cyclic, n).unwrap());
    let dihedral_index2 = cap(&|n| index2_s_upper_bound(KleinianFamily::BinaryDihedral, n).unwrap());
    // orders: A_n has order n, D̃_n order 4n, A_n^[2] order 2n, D̃_n^[2]
    // order 8n; the sporadic embeddings top out at 120
    let max_order = [
        cyclic as u64,
        4 * binary_dihedral as u64,
        2 * cyclic_index2 as u64,
        8 * dihedral_index2 as u64,
        120,
    ]
    .into_iter()
    .max()
    .unwrap();
    FamilyCaps {
        cyclic,
        binary_dihedral,
        cyclic_index2,
        dihedral_index2,
        max_order,
    }
}

/// max over 3 ≤ b2 ≤ 23 of the Guan budget at b3 = 0 (the global |s| cap).
pub fn global_budget() -> i64 {
    (3..=23)
        .map(|b2| budget_points(b2))
        .max()
        .expect("nonempty range")
}

/// Budget-derived maximal number of singular points at a given b2
/// (each point costs at least 1 of the |s| budget).
pub fn budget_points(b2: i64) -> i64 {
    let b = guan_budget(b2, 0).expect("b2 >= 3").floor_int();
    i64::try_from(&b).expect("budget fits i64").max(0)
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsReport {
    pub max_points: i64,
    pub max_order: u64,
    pub family_caps: FamilyCaps,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b2: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b2_max_points: Option<i64>,
}

/// Global answers (91 points, order 1424, the four family caps), plus the
/// per-b2 point cap when b2 is given.
pub fn bounds(b2: Option<i64>) -> Result<BoundsReport> {
    let caps = family_caps();
    let report = BoundsReport {
        max_points: global_budget(),
        max_order: caps.max_order,
        family_caps: caps,
        b2,
        b2_max_points: match b2 {
            None => None,
            Some(b2) => {
                guan_budget(b2, 0)?; // validates b2 ≥ 3
                Some(budget_points(b2))
            }
        },
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_global_bounds() {
        let caps = family_caps();
        assert_eq!(caps.cyclic, 92);
        assert_eq!(caps.binary_dihedral, 89);
        assert_eq!(caps.cyclic_index2, 181);
        assert_eq!(caps.dihedral_index2, 178);
        assert_eq!(caps.max_order, 1424);
        assert_eq!(global_budget(), 91);
    }

    #[test]
    fn per_b2_point_caps() {
        assert_eq!(budget_points(22), 13);
        assert_eq!(budget_points(21), 25);
        assert_eq!(budget_points(20), 36);
        assert_eq!(budget_points(23), 0);
    }

    #[test]
    fn budget_is_maximized_in_the_middle() {
        let best: Vec<i64> = (3..=23).filter(|&b2| budget_points(b2) == 91).collect();
        assert_eq!(best, vec![9, 10]);
    }
}
