//! The catalog of admissible local singularity types: the A-D-E diagonal
//! embeddings, the three sporadic embeddings, and the freely-acting index-2
//! extensions, each with its exact invariants.


use serde::{Deserialize, Serialize};

use crate::bounds::family_caps;
use crate::error::Error;
use crate::exec::{self, ExecMode};
use crate::group::{
    conjugation_automorphism, diagonal_embed, extend_by_t, kleinian_group, Automorphism,
    ExtendSpec, GroupSpec, KleinianFamily, SymplecticGroup, Theta,
};
use crate::invariants::{closed_form_s, local_invariants, LocalInvariants};
use crate::matrix::Mat2;
use crate::rational::Rat;
use crate::{cyclotomic::CycloNum, Result};

/// Families of catalog entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "cyclic")]
    Cyclic,
    #[serde(rename = "binary_dihedral")]
    BinaryDihedral,
    #[serde(rename = "2T")]
    Tetrahedral,
    #[serde(rename = "2O")]
    Octahedral,
    #[serde(rename = "2I")]
    Icosahedral,
    #[serde(rename = "cyclic_index2")]
    CyclicIndex2,
    #[serde(rename = "dihedral_index2")]
    DihedralIndex2,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Cyclic => "cyclic",
            Family::BinaryDihedral => "binary_dihedral",
            Family::Tetrahedral => "2T",
            Family::Octahedral => "2O",
            Family::Icosahedral => "2I",
            Family::CyclicIndex2 => "cyclic_index2",
            Family::DihedralIndex2 => "dihedral_index2",
        }
    }
}

/// One admissible singularity type.
#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub label: String,
    pub family: Family,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    pub order: u64,
    pub s: Rat,
    pub eta: Rat,
    /// Full record when the entry was brute-forced.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invariants: Option<LocalInvariants>,
    /// "brute_force" or "closed_form" (Example-3.7 values, spot-checked).
    pub s_source: &'static str,
    /// s ≥ −91; types below the global budget can never occur.
    pub globally_feasible: bool,
    pub group_spec: GroupSpec,
}

/// Caps for catalog construction. Defaults are the derived family caps and
/// the derived maximal order; requests beyond them are rejected.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogLimits {
    pub cyclic_max: u32,
    pub dihedral_max: u32,
    pub cyclic_index2_max: u32,
    pub dihedral_index2_max: u32,
    pub order_cap: u64,
    /// Orders up to this are brute-forced; larger cyclic/dihedral entries
    /// use the closed forms (spot-checked against brute force).
    pub brute_force_threshold: u64,
    pub include_sporadic: bool,
}

impl Default for CatalogLimits {
    fn default() -> Self {
        let caps = family_caps();
        CatalogLimits {
            cyclic_max: caps.cyclic,
            dihedral_max: caps.binary_dihedral,
            cyclic_index2_max: caps.cyclic_index2,
            dihedral_index2_max: caps.dihedral_index2,
            order_cap: caps.max_order,
            brute_force_threshold: 2000,
            include_sporadic: true,
        }
    }
}

impl CatalogLimits {
    /// Restrict every family by a single order cap.
    pub fn with_order_cap(order_cap: u64) -> Self {
        CatalogLimits {
            order_cap,
            ..Default::default()
        }
    }
}

fn check_cap(what: &str, requested: u64, max: u64) -> Result<()> {
    if requested > max {
        return Err(Error::CapExceeded {
            what: what.into(),
            requested,
            max,
        });
    }
    Ok(())
}

enum Recipe {
    Plain(Family, Option<u32>),
    Index2 { family: Family, n: u32, k: u32 },
}

/// Build the symplectic group behind a catalog descriptor; None when the
/// index-2 recipe does not close at index 2 or does not act freely.
pub fn build_point_group(family: Family, n: Option<u32>, k: Option<u32>) -> Result<SymplecticGroup> {
    match family {
        Family::Cyclic => {
            let h = kleinian_group(KleinianFamily::Cyclic, n)?;
            diagonal_embed(&h, &Automorphism::identity(h.order()))
        }
        Family::BinaryDihedral => {
            let h = kleinian_group(KleinianFamily::BinaryDihedral, n)?;
            diagonal_embed(&h, &Automorphism::identity(h.order()))
        }
        Family::Tetrahedral | Family::Octahedral | Family::Icosahedral => {
            let kf = match family {
                Family::Tetrahedral => KleinianFamily::BinaryTetrahedral,
                Family::Octahedral => KleinianFamily::BinaryOctahedral,
                _ => KleinianFamily::BinaryIcosahedral,
            };
            let h = kleinian_group(kf, None)?;
            diagonal_embed(&h, &Automorphism::identity(h.order()))
        }
        Family::CyclicIndex2 => {
            let n = n.ok_or_else(|| Error::InvalidInput("cyclic_index2 needs n".into()))?;
            let k = k.unwrap_or(1);
            let h = kleinian_group(KleinianFamily::Cyclic, Some(n))?;
            let base = diagonal_embed(&h, &Automorphism::identity(h.order()))?;
            Ok(extend_by_t(&base, n, k)?.group)
        }
        Family::DihedralIndex2 => {
            let n = n.ok_or_else(|| Error::InvalidInput("dihedral_index2 needs n".into()))?;
            let k = k.unwrap_or(1);
            let (group, _) = dihedral_index2(n, k)?;
            Ok(group)
        }
    }
}

/// D̃_n extended to index 2: the base is embedded with the quarter-turn
/// twist θ (conjugation by diag(ζ_{4n}, ζ_{4n}^{−1}), which fixes B and
/// shifts the P-coset by one), then extended by T_{2n,k}. With θ = id no
/// extension of a binary dihedral group acts freely; this twist does.
pub fn dihedral_index2(n: u32, k: u32) -> Result<(SymplecticGroup, GroupSpec)> {
    let h = kleinian_group(KleinianFamily::BinaryDihedral, Some(n))?;
    let m = 4 * n;
    let r = Mat2::from_entries(
        m,
        vec![
            CycloNum::root(m, 1),
            CycloNum::zero(m),
            CycloNum::zero(m),
            CycloNum::root(m, m - 1),
        ],
    )?;
    let theta = conjugation_automorphism(&h, &r)?;
    let base = diagonal_embed(&h, &theta)?;
    let ext = extend_by_t(&base, 2 * n, k)?;
    let spec = GroupSpec {
        family: KleinianFamily::BinaryDihedral,
        n: Some(n),
        theta: Some(Theta::Table(theta.map.clone())),
        extend: Some(ExtendSpec { n: 2 * n, k }),
    };
    Ok((ext.group, spec))
}

/// Exact invariants for one singularity type, always by brute force.
pub fn resolve_point(family: Family, n: Option<u32>, k: Option<u32>) -> Result<LocalInvariants> {
    let g = build_point_group(family, n, k)?;
    local_invariants(&g)
}

pub fn entry_label(family: Family, n: Option<u32>, k: Option<u32>) -> String {
    match family {
        Family::Cyclic => format!("A_{}", n.unwrap_or(0)),
        Family::BinaryDihedral => format!("Dtilde_{}", n.unwrap_or(0)),
        Family::Tetrahedral => "2T".into(),
        Family::Octahedral => "2O".into(),
        Family::Icosahedral => "2I".into(),
        Family::CyclicIndex2 => format!("A_{}^[2](k={})", n.unwrap_or(0), k.unwrap_or(1)),
        Family::DihedralIndex2 => format!("Dtilde_{}^[2](k={})", n.unwrap_or(0), k.unwrap_or(1)),
    }
}

/// Build the full catalog under the given limits.
pub fn build_catalog(limits: &CatalogLimits) -> Result<Vec<CatalogEntry>> {
    build_catalog_with_mode(limits, ExecMode::default())
}

pub fn build_catalog_with_mode(
    limits: &CatalogLimits,
    mode: ExecMode,
) -> Result<Vec<CatalogEntry>> {
    let defaults = CatalogLimits::default();
    check_cap("cyclic n", limits.cyclic_max as u64, defaults.cyclic_max as u64)?;
    check_cap(
        "binary dihedral n",
        limits.dihedral_max as u64,
        defaults.dihedral_max as u64,
    )?;
    check_cap(
        "cyclic index-2 n",
        limits.cyclic_index2_max as u64,
        defaults.cyclic_index2_max as u64,
    )?;
    check_cap(
        "dihedral index-2 n",
        limits.dihedral_index2_max as u64,
        defaults.dihedral_index2_max as u64,
    )?;
    check_cap("order cap", limits.order_cap, defaults.order_cap)?;

    let mut recipes: Vec<Recipe> = Vec::new();
    for n in 2..=limits.cyclic_max {
        if n as u64 <= limits.order_cap {
            recipes.push(Recipe::Plain(Family::Cyclic, Some(n)));
        }
    }
    for n in 2..=limits.dihedral_max {
        if 4 * n as u64 <= limits.order_cap {
            recipes.push(Recipe::Plain(Family::BinaryDihedral, Some(n)));
        }
    }
    if limits.include_sporadic {
        for (fam, order) in [
            (Family::Tetrahedral, 24u64),
            (Family::Octahedral, 48),
            (Family::Icosahedral, 120),
        ] {
            if order <= limits.order_cap {
                recipes.push(Recipe::Plain(fam, None));
            }
        }
    }
    for n in 2..=limits.cyclic_index2_max {
        // θ = id extensions close at index 2 for any n but act freely only
        // for even n (odd k); k = 1 is the catalog representative
        if n % 2 == 0 && 2 * n as u64 <= limits.order_cap {
            recipes.push(Recipe::Index2 {
                family: Family::CyclicIndex2,
                n,
                k: 1,
            });
        }
    }
    for n in 2..=limits.dihedral_index2_max {
        if 8 * n as u64 <= limits.order_cap {
            recipes.push(Recipe::Index2 {
                family: Family::DihedralIndex2,
                n,
                k: 1,
            });
        }
    }

    let built: Vec<Result<Option<CatalogEntry>>> = exec::map_vec(mode, &recipes, |recipe| {
        build_entry(recipe, limits.brute_force_threshold)
    });
    let mut entries = Vec::new();
    for e in built {
        if let Some(entry) = e? {
            entries.push(entry);
        }
    }

    // closed-form entries exist: spot-check the largest one per family
    for family in [Family::Cyclic, Family::BinaryDihedral] {
        if let Some(entry) = entries
            .iter()
            .filter(|e| e.family == family && e.s_source == "closed_form")
            .max_by_key(|e| e.order)
        {
            let brute = resolve_point(entry.family, entry.n, entry.k)?;
            assert_eq!(
                brute.s, entry.s,
                "closed form must match brute force at the spot check"
            );
        }
    }
    Ok(entries)
}

fn build_entry(recipe: &Recipe, brute_threshold: u64) -> Result<Option<CatalogEntry>> {
    match recipe {
        Recipe::Plain(family, n) => {
            let kf = match family {
                Family::Cyclic => KleinianFamily::Cyclic,
                Family::BinaryDihedral => KleinianFamily::BinaryDihedral,
                Family::Tetrahedral => KleinianFamily::BinaryTetrahedral,
                Family::Octahedral => KleinianFamily::BinaryOctahedral,
                Family::Icosahedral => KleinianFamily::BinaryIcosahedral,
                _ => unreachable!(),
            };
            let h = kleinian_group(kf, *n)?;
            let order = h.order() as u64;
            let spec = GroupSpec::new(kf, *n);
            let closed = closed_form_s(kf, n.unwrap_or(0)).ok();
            let (s, eta, invariants, source) = if order <= brute_threshold || closed.is_none() {
                let g = diagonal_embed(&h, &Automorphism::identity(h.order()))?;
                let inv = local_invariants(&g)?;
                (inv.s.clone(), inv.eta.clone(), Some(inv), "brute_force")
            } else {
                let eta = &Rat::one() - &Rat::from_int(order as i64).recip();
                (closed.unwrap(), eta, None, "closed_form")
            };
            Ok(Some(entry_from_parts(*family, *n, None, order, s, eta, invariants, source, spec)))
        }
        Recipe::Index2 { family, n, k } => {
            let built = match family {
                Family::CyclicIndex2 => {
                    let h = kleinian_group(KleinianFamily::Cyclic, Some(*n))?;
                    let base = diagonal_embed(&h, &Automorphism::identity(h.order()))?;
                    match extend_by_t(&base, *n, *k) {
                        Ok(ext) => {
                            let mut spec = GroupSpec::new(KleinianFamily::Cyclic, Some(*n));
                            spec.extend = Some(ExtendSpec { n: *n, k: *k });
                            Some((ext.group, spec))
                        }
                        Err(Error::NotIndexTwo { .. }) => None,
                        Err(e) => return Err(e),
                    }
                }
                Family::DihedralIndex2 => match dihedral_index2(*n, *k) {
                    Ok(pair) => Some(pair),
                    Err(Error::NotIndexTwo { .. }) => None,
                    Err(e) => return Err(e),
                },
                _ => unreachable!(),
            };
            let Some((group, spec)) = built else {
                return Ok(None);
            };
            // included only when the action is free; s is always brute-forced
            let inv = match local_invariants(&group) {
                Ok(inv) => inv,
                Err(Error::NonFreeAction { .. }) => return Ok(None),
                Err(e) => return Err(e),
            };
            Ok(Some(entry_from_parts(
                *family,
                Some(*n),
                Some(*k),
                group.order() as u64,
                inv.s.clone(),
                inv.eta.clone(),
                Some(inv),
                "brute_force",
                spec,
            )))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn entry_from_parts(
    family: Family,
    n: Option<u32>,
    k: Option<u32>,
    order: u64,
    s: Rat,
    eta: Rat,
    invariants: Option<LocalInvariants>,
    s_source: &'static str,
    group_spec: GroupSpec,
) -> CatalogEntry {
    // per-point bound: s ≤ −2(|G|−1)/|G|
    debug_assert!(
        s <= Rat::frac(-2 * (order as i64 - 1), order as i64),
        "score bound violated for {}",
        entry_label(family, n, k)
    );
    let globally_feasible = s >= Rat::from_int(-91);
    CatalogEntry {
        label: entry_label(family, n, k),
        family,
        n,
        k,
        order,
        s,
        eta,
        invariants,
        s_source,
        globally_feasible,
        group_spec,
    }
}

/// Match a catalog entry against a token: an exact label ("A_7") or a
/// family name ("cyclic", "2T", …).
pub fn entry_matches(entry: &CatalogEntry, token: &str) -> bool {
    entry.label == token || entry.family.name() == token
}

/// Validate a restriction list against the catalog.
pub fn validate_restriction(catalog: &[CatalogEntry], tokens: &[String]) -> Result<()> {
    for t in tokens {
        if !catalog.iter().any(|e| entry_matches(e, t)) {
            return Err(Error::UnknownLabel(t.clone()));
        }
    }
    Ok(())
}
