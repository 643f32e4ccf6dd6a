//! Feasibility enumeration: multisets of catalog types whose total score
//! fits the Guan budget for (b2, b3). Counting is exact bounded-knapsack
//! dynamic programming over the |s| budget; streaming is for inspection and
//! is guarded by a result cap.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::catalog::CatalogEntry;
use crate::error::Error;
use crate::hodge::guan_budget;
use crate::rational::Rat;
use crate::Result;

struct Item {
    label: String,
    scaled_weight: usize,
}

/// Entries admissible for enumeration: negative score within the global
/// budget. Weights are |s| in units of 1/scale, where scale clears every
/// denominator (per-point scores are integers for the whole catalog, so
/// scale is 1 in practice; fractional scores are still handled and
/// configurations with fractional totals are excluded).
fn items_and_scale(entries: &[CatalogEntry]) -> (Vec<Item>, u64) {
    let feasible: Vec<&CatalogEntry> = entries
        .iter()
        .filter(|e| e.globally_feasible && e.s.is_negative())
        .collect();
    let mut scale = BigInt::one();
    for e in &feasible {
        scale = scale.lcm(e.s.denom());
    }
    let scale_u = scale.to_u64().expect("scale fits u64");
    let mut items: Vec<Item> = feasible
        .iter()
        .map(|e| {
            let w = (&e.s.abs().0 * &scale).to_integer();
            Item {
                label: e.label.clone(),
                scaled_weight: w.to_usize().expect("weight fits usize"),
            }
        })
        .collect();
    items.sort_by(|a, b| a.scaled_weight.cmp(&b.scaled_weight).then(a.label.cmp(&b.label)));
    (items, scale_u)
}

fn scaled_budget(b2: i64, b3: i64, scale: u64) -> Result<usize> {
    if b3 < 0 || b3 % 2 != 0 {
        return Err(Error::InvalidInput(
            "b3 must be even and non-negative (b3 = 2·h^{2,1})".into(),
        ));
    }
    let budget = guan_budget(b2, b3)?;
    if budget.is_negative() {
        return Err(Error::BudgetInfeasible {
            budget: budget.to_string(),
        });
    }
    let jmax = (&budget * &Rat::from_int(scale as i64)).floor_int();
    Ok(usize::try_from(&jmax).expect("budget fits usize"))
}

/// Exact number of admissible configurations for (b2, b3) over the given
/// catalog restriction, by dynamic programming.
pub fn enumerate_count(entries: &[CatalogEntry], b2: i64, b3: i64) -> Result<BigUint> {
    let (items, scale) = items_and_scale(entries);
    let jmax = scaled_budget(b2, b3, scale)?;
    let mut dp: Vec<BigUint> = vec![BigUint::zero(); jmax + 1];
    dp[0] = BigUint::one();
    for item in &items {
        let w = item.scaled_weight;
        if w == 0 || w > jmax {
            continue;
        }
        for j in w..=jmax {
            let add = dp[j - w].clone();
            dp[j] += add;
        }
    }
    // only integral total scores are geometrically possible
    let mut total = BigUint::zero();
    let step = scale as usize;
    let mut j = 0;
    while j <= jmax {
        total += &dp[j];
        j += step.max(1);
    }
    Ok(total)
}

#[derive(Clone, Debug, Serialize)]
pub struct EnumeratedConfig {
    pub total_s: Rat,
    pub points: Vec<(String, u64)>,
}

/// Stream the configurations ordered by total |s| (then lexicographically),
/// up to `cap` results. The boolean reports whether the cap cut the stream.
pub fn enumerate_stream(
    entries: &[CatalogEntry],
    b2: i64,
    b3: i64,
    cap: usize,
) -> Result<(Vec<EnumeratedConfig>, bool)> {
    let (items, scale) = items_and_scale(entries);
    let jmax = scaled_budget(b2, b3, scale)?;
    let mut out = Vec::new();
    let mut capped = false;
    let step = (scale as usize).max(1);
    'targets: for target in (0..=jmax).step_by(step) {
        // multisets with scaled total exactly `target`
        let mut stack: Vec<(String, u64)> = Vec::new();
        if !emit_exact(&items, 0, target, &mut stack, &mut out, cap, scale) {
            capped = true;
            break 'targets;
        }
    }
    Ok((out, capped))
}

fn emit_exact(
    items: &[Item],
    idx: usize,
    remaining: usize,
    stack: &mut Vec<(String, u64)>,
    out: &mut Vec<EnumeratedConfig>,
    cap: usize,
    scale: u64,
) -> bool {
    if remaining == 0 {
        if out.len() >= cap {
            return false;
        }
        let total = Rat::new(
            BigInt::from(-(stack_weight(items, stack) as i64)),
            BigInt::from(scale),
        );
        out.push(EnumeratedConfig {
            total_s: total,
            points: stack.clone(),
        });
        return true;
    }
    if idx >= items.len() {
        return true;
    }
    let w = items[idx].scaled_weight;
    // count = 0 first, then increasing
    if !emit_exact(items, idx + 1, remaining, stack, out, cap, scale) {
        return false;
    }
    if w == 0 || w > remaining {
        return true;
    }
    let max_count = remaining / w;
    for c in 1..=max_count as u64 {
        stack.push((items[idx].label.clone(), c));
        let ok = emit_exact(items, idx + 1, remaining - w * c as usize, stack, out, cap, scale);
        stack.pop();
        if !ok {
            return false;
        }
    }
    true
}

fn stack_weight(items: &[Item], stack: &[(String, u64)]) -> u64 {
    stack
        .iter()
        .map(|(label, count)| {
            let w = items
                .iter()
                .find(|i| &i.label == label)
                .expect("label from the item list")
                .scaled_weight as u64;
            w * count
        })
        .sum()
}
