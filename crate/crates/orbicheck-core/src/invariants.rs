//! The local data of an isolated symplectic quotient singularity C⁴/G:
//! the Riemann–Roch correction sums S_0..S_4, the Gauss–Bonnet defect η,
//! and the Salamon score s, all exact.
//!
//! Two routes compute the sums. The generic route walks the elements,
//! takes the elementary symmetric functions e_p(g) of the eigenvalues from
//! principal minors (for symplectic g the eigenvalue multiset is closed
//! under inversion, so the dual-representation traces coincide with e_p),
//! and inverts det(id − g) by the extended Euclidean algorithm. The fast
//! route applies to monomial groups: each element yields its eigenvalue
//! exponent pair exactly, elements are grouped into Galois orbits, and each
//! orbit contributes a rational trace computed from the closed-form inverse
//! of (1 − ζ^a). The routes are cross-tested against each other; neither
//! uses any closed-form value for s.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::approx::{self, sign_of_real, Cx, ORACLE_BITS};
use crate::cyclotomic::{euler_phi, ramanujan_sum, CycloNum};
use crate::error::Error;
use crate::exec::{self, ExecMode};
use crate::group::{
    diagonal_embed, extend_by_t, free_check, kleinian_group, Automorphism, KleinianFamily,
    SymplecticGroup,
};
use crate::matrix::{char_poly_elementary, Mat4};
use crate::rational::Rat;
use crate::Result;

/// The record (|G|, S_0..S_4, η, s) of one singular point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalInvariants {
    pub group_order: u64,
    /// S_0 … S_4, per point.
    pub s_p: [Rat; 5],
    pub eta: Rat,
    pub s: Rat,
}

impl LocalInvariants {
    pub fn trivial() -> Self {
        LocalInvariants {
            group_order: 1,
            s_p: [
                Rat::zero(),
                Rat::zero(),
                Rat::zero(),
                Rat::zero(),
                Rat::zero(),
            ],
            eta: Rat::zero(),
            s: Rat::zero(),
        }
    }

    /// Assemble the record from the raw sums Σ_{g≠id} e_p/det(id−g) and
    /// check every internal identity: the three expressions for s agree,
    /// S_3 = S_1, S_4 = S_0, and η equals the alternating S-sum. These hold
    /// exactly when the group preserves a symplectic form.
    fn from_sums(order: u64, sums: [Rat; 5]) -> Result<Self> {
        let ord = Rat::from_int(order as i64);
        let s_p: [Rat; 5] = sums.map(|x| &x / &ord);
        let eta = &Rat::one() - &ord.recip();
        let s1 = &(&Rat::from_int(6) * &(&s_p[1] - &(&Rat::from_int(4) * &s_p[0]))) + &eta;
        let s2 = &(&Rat::from_int(3) * &(&s_p[2] - &(&Rat::from_int(6) * &s_p[0])))
            - &(&Rat::from_int(2) * &eta);
        let s3 = &(&(&Rat::from_int(4) * &s_p[1]) + &s_p[2]) - &(&Rat::from_int(22) * &s_p[0]);
        let alt = &(&(&s_p[0] - &s_p[1]) + &(&s_p[2] - &s_p[3])) + &s_p[4];
        if s1 != s2 || s1 != s3 || s_p[3] != s_p[1] || s_p[4] != s_p[0] || eta != alt {
            return Err(Error::NotSymplectic);
        }
        Ok(LocalInvariants {
            group_order: order,
            s_p,
            eta,
            s: s1,
        })
    }
}

/// Exact S_p, η and s for a freely-acting symplectic group.
pub fn local_invariants(g: &SymplecticGroup) -> Result<LocalInvariants> {
    local_invariants_with_mode(g, ExecMode::default())
}

pub fn local_invariants_with_mode(
    g: &SymplecticGroup,
    mode: ExecMode,
) -> Result<LocalInvariants> {
    free_check(g)?;
    if g.order() == 1 {
        return Ok(LocalInvariants::trivial());
    }
    if let Some(inv) = local_invariants_fast(g)? {
        return Ok(inv);
    }
    local_invariants_generic(g, mode)
}

// ---------------------------------------------------------------------------
// Generic route
// ---------------------------------------------------------------------------

/// Per-element route: e_p from char_poly_elementary, field inversion of
/// det(id − g). Exposed for cross-testing against the fast route.
#[doc(hidden)]
pub fn local_invariants_generic(g: &SymplecticGroup, mode: ExecMode) -> Result<LocalInvariants> {
    free_check(g)?;
    if g.order() == 1 {
        return Ok(LocalInvariants::trivial());
    }
    let n = g.conductor();
    let contribs: Vec<Result<[CycloNum; 5]>> = exec::map_range(mode, 1..g.order(), |i| {
        let m = g.element(i);
        let e = char_poly_elementary(m);
        let d = m.det_id_minus();
        let dinv = d.inverse()?;
        Ok([
            dinv.clone(),
            e[0].mul(&dinv),
            e[1].mul(&dinv),
            e[2].mul(&dinv),
            e[3].mul(&dinv),
        ])
    });
    let mut sums: [CycloNum; 5] = std::array::from_fn(|_| CycloNum::zero(n));
    for c in contribs {
        let c = c?;
        for (acc, term) in sums.iter_mut().zip(c.into_iter()) {
            *acc = acc.add(&term);
        }
    }
    let mut rat_sums: [Rat; 5] = std::array::from_fn(|_| Rat::zero());
    for (p, sum) in sums.into_iter().enumerate() {
        rat_sums[p] = sum.to_rational().map_err(|_| Error::NonRationalSum {
            what: format!("S_{p}"),
        })?;
    }
    LocalInvariants::from_sums(g.order() as u64, rat_sums)
}

// ---------------------------------------------------------------------------
// Fast route for monomial groups
// ---------------------------------------------------------------------------

fn q_table(d: u32) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&d) {
        return Arc::clone(t);
    }
    // Q_t = Σ_{j,l in [0,d), j-l ≡ t} j·l; these are the coefficients of
    // d²/((1-ζ)(1-ζ^{-1})) in the group ring, from 1/(1-ζ) = -(1/d)Σ j ζ^j.
    let mut q = vec![0i64; d as usize];
    for (t, slot) in q.iter_mut().enumerate() {
        let mut acc: i64 = 0;
        for j in 0..d as i64 {
            let l = (j - t as i64).rem_euclid(d as i64);
            acc += j * l;
        }
        *slot = acc;
    }
    let arc = Arc::new(q);
    cache.lock().unwrap().insert(d, Arc::clone(&arc));
    arc
}

fn ramanujan_table(m: u32) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&m) {
        return Arc::clone(t);
    }
    let table: Vec<i64> = (0..m).map(|j| ramanujan_sum(m, j)).collect();
    let arc = Arc::new(table);
    cache.lock().unwrap().insert(m, Arc::clone(&arc));
    arc
}

/// Tr_{Q(ζ_m)/Q} of 1/(2 − ζ^a − ζ^{−a}).
fn trace_inv_u(m: u32, a: u32) -> Rat {
    let d = m / a.gcd(&m);
    debug_assert!(d > 1, "u_0 = 0 is excluded by freeness");
    let q = q_table(d);
    let c = ramanujan_table(m);
    let mut acc: i128 = 0;
    for (t, &qt) in q.iter().enumerate() {
        let e = ((a as u64 * t as u64) % m as u64) as usize;
        acc += qt as i128 * c[e] as i128;
    }
    Rat::new(BigInt::from(acc), BigInt::from(d as i128 * d as i128))
}

/// Tr_{Q(ζ_m)/Q} of 1/((2 − ζ^a − ζ^{−a})(2 − ζ^b − ζ^{−b})).
fn trace_inv_uu(m: u32, a: u32, b: u32) -> Rat {
    let da = m / a.gcd(&m);
    let db = m / b.gcd(&m);
    let qa = q_table(da);
    let qb = q_table(db);
    let c = ramanujan_table(m);
    let mut acc: i128 = 0;
    for (t, &qat) in qa.iter().enumerate() {
        if qat == 0 {
            continue;
        }
        let base = (a as u64 * t as u64) % m as u64;
        for (t2, &qbt) in qb.iter().enumerate() {
            let e = ((base + b as u64 * t2 as u64) % m as u64) as usize;
            acc += qat as i128 * qbt as i128 * c[e] as i128;
        }
    }
    let denom = BigInt::from(da as i128 * da as i128) * BigInt::from(db as i128 * db as i128);
    Rat::new(BigInt::from(acc), denom)
}

fn orbit_traces(m: u32, a: u32, b: u32) -> (Rat, Rat, Rat) {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32, u32), (Rat, Rat, Rat)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&(m, a, b)) {
        return t.clone();
    }
    let v = (trace_inv_uu(m, a, b), trace_inv_u(m, a), trace_inv_u(m, b));
    cache.lock().unwrap().insert((m, a, b), v.clone());
    v
}

fn canonical_exp(m: u32, x: u32) -> u32 {
    let x = x % m;
    x.min(m - x)
}

fn canonical_pair(m: u32, a: u32, b: u32) -> (u32, u32) {
    let a = canonical_exp(m, a);
    let b = canonical_exp(m, b);
    (a.min(b), a.max(b))
}

/// Galois-orbit route. Returns Ok(None) when the group is not monomial or an
/// internal stability check fails (the caller then uses the generic route).
fn local_invariants_fast(g: &SymplecticGroup) -> Result<Option<LocalInvariants>> {
    let Some(monos) = g.monomial_forms() else {
        return Ok(None);
    };
    let m = 4 * g.conductor();
    let phi_m = euler_phi(m);

    let mut counts: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for (i, mono) in monos.iter().enumerate().skip(1) {
        let Some((a, b)) = mono.eigen_pairs() else {
            return Ok(None);
        };
        debug_assert!(a > 0, "freeness was checked before dispatch");
        *counts.entry(canonical_pair(m, a, b)).or_insert(0) += 1;

        // exact per-element identities from independently enumerated
        // principal minors (integer arithmetic on root-of-unity exponents):
        // palindromic char poly (e3 = e1, e4 = 1) on symplectic elements
        let e1_terms = mono.elementary_exponent_multiset(1);
        let e3_terms = mono.elementary_exponent_multiset(3);
        let e4_terms = mono.elementary_exponent_multiset(4);
        if e3_terms != e1_terms || e4_terms != vec![0] {
            // multisets can differ while the sums agree; decide in the field
            let e = char_poly_elementary(g.element(i));
            if e[2] != e[0] || !e[3].sub(&CycloNum::one(g.conductor())).is_zero() {
                return Ok(None); // not symplectic; the generic route decides
            }
        }
        // sampled check that the extracted pair reproduces the trace
        if i % (g.order() / 32 + 1) == 0 {
            let e1 = g.element(i).principal_minor_sum(1);
            let expect = CycloNum::root(m, a)
                .add(&CycloNum::root(m, m - a))
                .add(&CycloNum::root(m, b))
                .add(&CycloNum::root(m, (m - b) % m));
            assert_eq!(
                e1.lift_to(m)?,
                expect,
                "eigenvalue pair must reproduce the trace"
            );
        }
    }

    let units: Vec<u32> = (1..m).filter(|k| k.gcd(&m) == 1).collect();
    let mut sums = [Rat::zero(), Rat::zero(), Rat::zero()];
    let mut visited: BTreeSet<(u32, u32)> = BTreeSet::new();
    for (&key, &mult) in &counts {
        if visited.contains(&key) {
            continue;
        }
        let mut orbit: BTreeSet<(u32, u32)> = BTreeSet::new();
        for &k in &units {
            orbit.insert(canonical_pair(
                m,
                ((key.0 as u64 * k as u64) % m as u64) as u32,
                ((key.1 as u64 * k as u64) % m as u64) as u32,
            ));
        }
        // Galois stability: every key of the orbit present with equal count
        for k2 in &orbit {
            if counts.get(k2) != Some(&mult) {
                return Ok(None);
            }
        }
        visited.extend(orbit.iter().copied());
        let (t2, t1a, t1b) = orbit_traces(m, key.0, key.1);
        let weight = Rat::new(
            BigInt::from(mult) * BigInt::from(orbit.len() as u64),
            BigInt::from(phi_m),
        );
        // e0/D = 1/(u_a u_b); e1/D = 4/(u_a u_b) − 1/u_a − 1/u_b;
        // e2/D = 6/(u_a u_b) − 2/u_a − 2/u_b + 1
        let t1 = &t1a + &t1b;
        sums[0] += &(&weight * &t2);
        sums[1] += &(&weight * &(&(&Rat::from_int(4) * &t2) - &t1));
        sums[2] += &(&weight
            * &(&(&(&Rat::from_int(6) * &t2) - &(&Rat::from_int(2) * &t1))
                + &Rat::from_int(phi_m as i64)));
    }
    let sums5 = [
        sums[0].clone(),
        sums[1].clone(),
        sums[2].clone(),
        sums[1].clone(), // e3 = e1 verified per element above
        sums[0].clone(), // e4 = e0 = 1 verified per element above
    ];
    Ok(Some(LocalInvariants::from_sums(g.order() as u64, sums5)?))
}

// ---------------------------------------------------------------------------
// Closed forms and bounds (used as oracles against the brute force)
// ---------------------------------------------------------------------------

/// s_x(A_n) = −(n−1), s_x(D̃_n) = −(n+2).
pub fn closed_form_s(family: KleinianFamily, n: u32) -> Result<Rat> {
    match family {
        KleinianFamily::Cyclic => {
            if n < 1 {
                return Err(Error::InvalidInput("cyclic needs n >= 1".into()));
            }
            Ok(Rat::from_int(-((n as i64) - 1)))
        }
        KleinianFamily::BinaryDihedral => {
            if n < 2 {
                return Err(Error::InvalidInput("binary dihedral needs n >= 2".into()));
            }
            Ok(Rat::from_int(-((n as i64) + 2)))
        }
        _ => Err(Error::InvalidInput(
            "closed forms exist only for the cyclic and binary dihedral families".into(),
        )),
    }
}

/// The index-2 estimates: s_x(A_n^[2]) ≤ −(n+1)/2 and s_x(D̃_n^[2]) ≤ −(n+4)/2.
pub fn index2_s_upper_bound(base_family: KleinianFamily, n: u32) -> Result<Rat> {
    match base_family {
        KleinianFamily::Cyclic => Ok(Rat::new(
            BigInt::from(-((n as i64) + 1)),
            BigInt::from(2),
        )),
        KleinianFamily::BinaryDihedral => Ok(Rat::new(
            BigInt::from(-((n as i64) + 4)),
            BigInt::from(2),
        )),
        _ => Err(Error::InvalidInput(
            "index-2 bounds exist only for the cyclic and binary dihedral families".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Per-element bound
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct PerElementBoundReport {
    pub group_order: u64,
    /// (tr − 4)/det(g − id) ≤ −1/2 for every non-identity element.
    pub holds_for_all: bool,
    pub equality_count: usize,
    pub equality_only_at_minus_id: bool,
    /// How many strict inequalities were certified by the interval sign test
    /// (all of them for small or dense groups, a deterministic sample for
    /// large monomial groups).
    pub certified_elements: usize,
    /// Numeric maximum of the per-element values, for the report only.
    pub max_value_approx: String,
}

/// Exact per-element check of (tr(g) − 4)/det(g − id) ≤ −1/2. Equality is
/// decided exactly; strict negativity is certified by the interval sign test
/// on cyclotomic reals.
pub fn per_element_bound_check(g: &SymplecticGroup) -> Result<PerElementBoundReport> {
    free_check(g)?;
    let n = g.conductor();
    let minus_id = Mat4::identity(n).neg();
    let order = g.order();
    let certify_all = order <= 256 || !g.is_monomial_group();
    let stride = if certify_all { 1 } else { (order - 1) / 128 + 1 };

    let mut equality_count = 0usize;
    let mut equality_only_at_minus_id = true;
    let mut certified = 0usize;
    let mut holds = true;
    let mut max_num: Option<f64> = None;

    for i in 1..order {
        let m = g.element(i);
        let e1 = m.principal_minor_sum(1);
        let d = m.det_id_minus();
        // value + 1/2 has the sign of w = 2(e1 − 4) + d, because d > 0
        let w = e1
            .sub(&CycloNum::from_int(n, 4))
            .scale(&Rat::from_int(2))
            .add(&d);
        if w.is_zero() {
            equality_count += 1;
            max_num = Some(max_num.map_or(-0.5, |m| m.max(-0.5)));
            if *m != minus_id {
                equality_only_at_minus_id = false;
            }
        } else if certify_all || i % stride == 0 {
            match sign_of_real(&w)? {
                Ordering::Less => certified += 1,
                _ => holds = false,
            }
            // numeric value for the report, on the certified sample
            let (re1, _, _) = approx::eval_certified(&e1, 64);
            let (rd, _, _) = approx::eval_certified(&d, 64);
            let num = (rat_to_f64(&re1) - 4.0) / rat_to_f64(&rd);
            max_num = Some(max_num.map_or(num, |m| m.max(num)));
        }
    }
    Ok(PerElementBoundReport {
        group_order: order as u64,
        holds_for_all: holds,
        equality_count,
        equality_only_at_minus_id,
        certified_elements: certified,
        max_value_approx: max_num.map_or_else(|| "none".into(), |v| format!("{v:.12}")),
    })
}

fn rat_to_f64(r: &Rat) -> f64 {
    let num: f64 = r.numer().to_string().parse().unwrap_or(f64::NAN);
    let den: f64 = r.denom().to_string().parse().unwrap_or(f64::NAN);
    num / den
}

// ---------------------------------------------------------------------------
// Index-2 bound check
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct Index2BoundReport {
    pub order: u64,
    pub s: Rat,
    pub bound: Rat,
    pub holds: bool,
}

/// Brute-force s of the extension of diag-embedded `base_family(n)` by
/// T_{n,k}, compared against the index-2 estimate.
pub fn index2_bound_check(
    n: u32,
    k: u32,
    base_family: KleinianFamily,
) -> Result<Index2BoundReport> {
    let h = kleinian_group(base_family, Some(n))?;
    let base = diagonal_embed(&h, &Automorphism::identity(h.order()))?;
    let ext = extend_by_t(&base, n, k)?;
    let inv = local_invariants(&ext.group)?;
    let bound = index2_s_upper_bound(base_family, n)?;
    let holds = inv.s <= bound;
    Ok(Index2BoundReport {
        order: ext.group.order() as u64,
        s: inv.s,
        bound,
        holds,
    })
}

// ---------------------------------------------------------------------------
// Float-oracle cross check
// ---------------------------------------------------------------------------

/// Recompute the S_p sums with the high-precision numeric path (matrix
/// entries evaluated at ζ_N ↦ e^{2iπ/N}, numeric minors and determinants)
/// and return the maximum relative deviation from the exact values.
pub fn float_check_local(g: &SymplecticGroup, exact: &LocalInvariants) -> Rat {
    let bits = ORACLE_BITS;
    let order = g.order();
    let mut sums: Vec<Cx> = (0..5).map(|_| Cx::zero(bits)).collect();
    for i in 1..order {
        let m = g.element(i);
        let num: Vec<Cx> = (0..16)
            .map(|t| Cx::from_cyclo(m.get(t / 4, t % 4), bits))
            .collect();
        let e = numeric_elementary(&num, bits);
        let mut id_minus = Vec::with_capacity(16);
        for t in 0..16 {
            let idv = if t / 4 == t % 4 {
                Cx::from_rat(&Rat::one(), bits)
            } else {
                Cx::zero(bits)
            };
            id_minus.push(idv.sub(&num[t]));
        }
        let d = numeric_det(&id_minus, &[0, 1, 2, 3], &[0, 1, 2, 3], bits);
        sums[0] = sums[0].add(&Cx::from_rat(&Rat::one(), bits).div(&d));
        for p in 1..=4 {
            sums[p] = sums[p].add(&e[p - 1].div(&d));
        }
    }
    let ord = Rat::from_int(order as i64);
    let mut max_dev = Rat::zero();
    for p in 0..5 {
        let approx_val = &sums[p].re / &ord;
        let dev = approx::relative_deviation(&exact.s_p[p], &approx_val);
        if dev > max_dev {
            max_dev = dev;
        }
    }
    // s recomputed from the numeric sums
    let s_num = &(&(&(&sums[1].re * &Rat::from_int(4)) + &sums[2].re)
        - &(&sums[0].re * &Rat::from_int(22)))
        / &ord;
    let dev = approx::relative_deviation(&exact.s, &s_num);
    if dev > max_dev {
        max_dev = dev;
    }
    max_dev
}

fn numeric_det(entries: &[Cx], rows: &[usize], cols: &[usize], bits: u32) -> Cx {
    match rows.len() {
        0 => Cx::from_rat(&Rat::one(), bits),
        1 => entries[rows[0] * 4 + cols[0]].clone(),
        _ => {
            let mut acc = Cx::zero(bits);
            let rest: Vec<usize> = rows[1..].to_vec();
            for (k, &c) in cols.iter().enumerate() {
                let sub_cols: Vec<usize> = cols
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &x)| x)
                    .collect();
                let minor = numeric_det(entries, &rest, &sub_cols, bits);
                let term = entries[rows[0] * 4 + c].mul(&minor);
                acc = if k % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

fn numeric_elementary(entries: &[Cx], bits: u32) -> [Cx; 4] {
    let mut out: [Cx; 4] = std::array::from_fn(|_| Cx::zero(bits));
    let subsets: [Vec<Vec<usize>>; 4] = [
        vec![vec![0], vec![1], vec![2], vec![3]],
        vec![
            vec![0, 1],
            vec![0, 2],
            vec![0, 3],
            vec![1, 2],
            vec![1, 3],
            vec![2, 3],
        ],
        vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        vec![vec![0, 1, 2, 3]],
    ];
    for (p, subs) in subsets.iter().enumerate() {
        for s in subs {
            out[p] = out[p].add(&numeric_det(entries, s, s, bits));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Theta;

    fn embed_cyclic(n: u32) -> SymplecticGroup {
        let h = kleinian_group(KleinianFamily::Cyclic, Some(n)).unwrap();
        diagonal_embed(&h, &Automorphism::identity(h.order())).unwrap()
    }

    fn embed_dihedral(n: u32) -> SymplecticGroup {
        let h = kleinian_group(KleinianFamily::BinaryDihedral, Some(n)).unwrap();
        diagonal_embed(&h, &Automorphism::identity(h.order())).unwrap()
    }

    #[test]
    fn minus_id_point_exact_record() {
        // the A_2 point: single element −Id with det(Id−g) = 16
        let g = embed_cyclic(2);
        let inv = local_invariants(&g).unwrap();
        assert_eq!(inv.group_order, 2);
        assert_eq!(inv.s_p[0], Rat::frac(1, 32));
        assert_eq!(inv.s_p[1], Rat::frac(-1, 8));
        assert_eq!(inv.s_p[2], Rat::frac(3, 16));
        assert_eq!(inv.eta, Rat::frac(1, 2));
        assert_eq!(inv.s, Rat::from_int(-1));
    }

    #[test]
    fn trivial_group_record() {
        let g = embed_cyclic(1);
        let inv = local_invariants(&g).unwrap();
        assert_eq!(inv, LocalInvariants::trivial());
    }

    #[test]
    fn cyclic3_exact_record() {
        let g = embed_cyclic(3);
        let inv = local_invariants(&g).unwrap();
        assert_eq!(inv.s_p[0], Rat::frac(2, 27));
        assert_eq!(inv.s_p[1], Rat::frac(-4, 27));
        assert_eq!(inv.s_p[2], Rat::frac(2, 9));
        assert_eq!(inv.eta, Rat::frac(2, 3));
        assert_eq!(inv.s, Rat::from_int(-2));
    }

    #[test]
    fn a7_point_matches_known_aggregates() {
        // per-point values whose 9-fold sums drive the M_7 example
        let inv = local_invariants(&embed_cyclic(7)).unwrap();
        assert_eq!(inv.s_p[0], Rat::frac(4, 7));
        assert_eq!(inv.s_p[1], Rat::frac(8, 7));
        assert_eq!(inv.s_p[2], Rat::from_int(2));
        assert_eq!(inv.eta, Rat::frac(6, 7));
        assert_eq!(inv.s, Rat::from_int(-6));
    }

    #[test]
    fn fast_and_generic_routes_agree() {
        for g in [
            embed_cyclic(4),
            embed_cyclic(5),
            embed_cyclic(12),
            embed_dihedral(2),
            embed_dihedral(3),
            embed_dihedral(5),
        ] {
            assert!(g.is_monomial_group());
            let fast = local_invariants(&g).unwrap();
            let generic = local_invariants_generic(&g, ExecMode::Sequential).unwrap();
            assert_eq!(fast, generic);
        }
    }

    #[test]
    fn extensions_fast_generic_agree() {
        for (n, k) in [(2u32, 1u32), (4, 1), (6, 1), (6, 5), (8, 3)] {
            let base = embed_cyclic(n);
            let ext = extend_by_t(&base, n, k).unwrap();
            if free_check(&ext.group).is_err() {
                continue;
            }
            let fast = local_invariants(&ext.group).unwrap();
            let generic = local_invariants_generic(&ext.group, ExecMode::Sequential).unwrap();
            assert_eq!(fast, generic);
        }
    }

    #[test]
    fn t21_extension_record() {
        let trivial = embed_cyclic(2);
        let ext = extend_by_t(&trivial, 2, 1).unwrap();
        assert_eq!(ext.group.order(), 4);
        let inv = local_invariants(&ext.group).unwrap();
        assert_eq!(inv.s_p[0], Rat::frac(9, 64));
        assert_eq!(inv.s_p[1], Rat::frac(-1, 16));
        assert_eq!(inv.s_p[2], Rat::frac(11, 32));
        assert_eq!(inv.eta, Rat::frac(3, 4));
        assert_eq!(inv.s, Rat::from_int(-3));
    }

    #[test]
    fn closed_forms() {
        assert_eq!(
            closed_form_s(KleinianFamily::Cyclic, 7).unwrap(),
            Rat::from_int(-6)
        );
        assert_eq!(
            closed_form_s(KleinianFamily::Cyclic, 1).unwrap(),
            Rat::zero()
        );
        assert_eq!(
            closed_form_s(KleinianFamily::BinaryDihedral, 3).unwrap(),
            Rat::from_int(-5)
        );
    }

    #[test]
    fn brute_force_matches_closed_forms_small() {
        for n in 2..=10 {
            assert_eq!(
                local_invariants(&embed_cyclic(n)).unwrap().s,
                closed_form_s(KleinianFamily::Cyclic, n).unwrap()
            );
        }
        for n in 2..=5 {
            assert_eq!(
                local_invariants(&embed_dihedral(n)).unwrap().s,
                closed_form_s(KleinianFamily::BinaryDihedral, n).unwrap()
            );
        }
    }

    #[test]
    fn cyclic_s0_s1_match_their_derived_forms() {
        // derived cross-checks recorded alongside the brute force:
        // S0(A_n) = (n²−1)(n²+11)/(720 n), S1(A_n) = 4·S0 − (n²−1)/(6n)
        for n in 2..=30i64 {
            let inv = local_invariants(&embed_cyclic(n as u32)).unwrap();
            let s0 = Rat::new(
                BigInt::from((n * n - 1) * (n * n + 11)),
                BigInt::from(720 * n),
            );
            let s1 = &(&Rat::from_int(4) * &s0) - &Rat::frac(n * n - 1, 6 * n);
            assert_eq!(inv.s_p[0], s0, "S0(A_{n})");
            assert_eq!(inv.s_p[1], s1, "S1(A_{n})");
        }
    }

    #[test]
    fn sporadic_scores_brute_forced() {
        // new derived data: the sporadic diagonal embeddings
        for (fam, expect) in [
            (KleinianFamily::BinaryTetrahedral, -6),
            (KleinianFamily::BinaryOctahedral, -7),
            (KleinianFamily::BinaryIcosahedral, -8),
        ] {
            let h = kleinian_group(fam, None).unwrap();
            let g = diagonal_embed(&h, &Automorphism::identity(h.order())).unwrap();
            let inv = local_invariants(&g).unwrap();
            assert_eq!(inv.s, Rat::from_int(expect));
        }
    }

    #[test]
    fn per_element_bound_extremal_at_minus_id() {
        let g = embed_cyclic(2);
        let rep = per_element_bound_check(&g).unwrap();
        assert!(rep.holds_for_all);
        assert_eq!(rep.equality_count, 1);
        assert!(rep.equality_only_at_minus_id);

        let g = embed_cyclic(3);
        let rep = per_element_bound_check(&g).unwrap();
        assert!(rep.holds_for_all);
        assert_eq!(rep.equality_count, 0);
    }

    #[test]
    fn per_element_values_of_cyclic_3_are_minus_two_thirds() {
        // both non-identity elements give (tr − 4)/det(g − id) = (−2−4)/9
        let g = embed_cyclic(3);
        for m in g.elements().iter().skip(1) {
            let e1 = m.principal_minor_sum(1).to_rational().unwrap();
            let d = m.det_id_minus().to_rational().unwrap();
            assert_eq!(&(&e1 - &Rat::from_int(4)) / &d, Rat::frac(-2, 3));
        }
    }

    #[test]
    fn index2_bound_check_cases() {
        let rep = index2_bound_check(2, 1, KleinianFamily::Cyclic).unwrap();
        assert_eq!(rep.order, 4);
        assert_eq!(rep.s, Rat::from_int(-3));
        assert_eq!(rep.bound, Rat::frac(-3, 2));
        assert!(rep.holds);

        let rep = index2_bound_check(6, 1, KleinianFamily::Cyclic).unwrap();
        assert_eq!(rep.s, Rat::from_int(-11));
        assert!(rep.holds); // −11 ≤ −7/2

        // ξ_n^k = 1 forces T² = Id and an eigenvalue 1
        match index2_bound_check(3, 3, KleinianFamily::Cyclic) {
            Err(Error::NonFreeAction { .. }) => {}
            other => panic!("expected NonFreeAction, got {other:?}"),
        }
        // odd n never acts freely in this family
        assert!(index2_bound_check(5, 1, KleinianFamily::Cyclic).is_err());
    }

    #[test]
    fn theta_changes_s_p_but_not_s_and_eta() {
        // Counterexample recorded by the brute force: for H = C_5 and
        // θ: A ↦ A², S_0 moves from 6/25 to 4/25 while s and η stay put.
        let h = kleinian_group(KleinianFamily::Cyclic, Some(5)).unwrap();
        let id_inv = local_invariants(&diagonal_embed(&h, &Automorphism::identity(5)).unwrap())
            .unwrap();
        // the squaring automorphism: generator ↦ generator²
        let autos = automorphisms_of_c5(&h);
        let squaring = autos
            .into_iter()
            .find(|a| a.map[1] == 2 || a.map[2] == 4)
            .expect("squaring automorphism exists");
        let tw_inv = local_invariants(&diagonal_embed(&h, &squaring).unwrap()).unwrap();
        assert_eq!(id_inv.s_p[0], Rat::frac(6, 25));
        assert_eq!(tw_inv.s_p[0], Rat::frac(4, 25));
        assert_ne!(id_inv.s_p, tw_inv.s_p);
        assert_eq!(id_inv.s, tw_inv.s);
        assert_eq!(id_inv.eta, tw_inv.eta);
    }

    fn automorphisms_of_c5(h: &crate::group::KleinianGroup) -> Vec<Automorphism> {
        crate::group::automorphisms(h)
    }

    #[test]
    fn g_prime_sum_identity_for_twisted_embeddings() {
        // Σ_{g ≠ id} (tr − 4)/det(g − id) over diag(A, θ(A)) equals
        // −2 Σ_{A ≠ id} 1/(2 − tr A), for every automorphism θ.
        let h = kleinian_group(KleinianFamily::Cyclic, Some(8)).unwrap();
        let two = CycloNum::from_int(8, 2);
        let mut rhs = CycloNum::zero(8);
        for a in h.elements().iter().skip(1) {
            rhs = rhs.add(&two.sub(&a.trace()).inverse().unwrap());
        }
        let rhs = rhs.scale(&Rat::from_int(-2)).to_rational().unwrap();
        for theta in crate::group::automorphisms(&h) {
            let g = diagonal_embed(&h, &theta).unwrap();
            let mut lhs = CycloNum::zero(8);
            for m in g.elements().iter().skip(1) {
                let e1 = m.principal_minor_sum(1);
                let d = m.det_id_minus();
                lhs = lhs.add(&e1.sub(&CycloNum::from_int(8, 4)).mul(&d.inverse().unwrap()));
            }
            assert_eq!(lhs.to_rational().unwrap(), rhs);
        }
    }

    #[test]
    fn intermediate_sums_match_paper_forms_small() {
        // Σ (tr−4)/det = −(n²−1)/6 for cyclic and −(4n²+12n−1)/6 for dihedral
        for n in 2..=8u32 {
            let g = embed_cyclic(n);
            let mut acc = CycloNum::zero(g.conductor());
            for m in g.elements().iter().skip(1) {
                let e1 = m.principal_minor_sum(1);
                let d = m.det_id_minus();
                acc = acc.add(
                    &e1.sub(&CycloNum::from_int(g.conductor(), 4))
                        .mul(&d.inverse().unwrap()),
                );
            }
            let expect = Rat::frac(-((n as i64) * (n as i64) - 1), 6);
            assert_eq!(acc.to_rational().unwrap(), expect);
        }
        for n in 2..=4u32 {
            let g = embed_dihedral(n);
            let mut acc = CycloNum::zero(g.conductor());
            for m in g.elements().iter().skip(1) {
                let e1 = m.principal_minor_sum(1);
                let d = m.det_id_minus();
                acc = acc.add(
                    &e1.sub(&CycloNum::from_int(g.conductor(), 4))
                        .mul(&d.inverse().unwrap()),
                );
            }
            let n = n as i64;
            let expect = Rat::frac(-(4 * n * n + 12 * n - 1), 6);
            assert_eq!(acc.to_rational().unwrap(), expect);
        }
    }

    #[test]
    fn float_oracle_agreement_small() {
        for g in [embed_cyclic(5), embed_dihedral(3)] {
            let exact = local_invariants(&g).unwrap();
            let dev = float_check_local(&g, &exact);
            assert!(dev < approx::oracle_tolerance(), "deviation {dev}");
        }
    }

    #[test]
    fn non_free_is_rejected() {
        let h = kleinian_group(KleinianFamily::Cyclic, Some(1)).unwrap();
        let trivial = diagonal_embed(&h, &Automorphism::identity(1)).unwrap();
        let ext = extend_by_t(&trivial, 1, 1).unwrap();
        match local_invariants(&ext.group) {
            Err(Error::NonFreeAction { .. }) => {}
            other => panic!("expected NonFreeAction, got {other:?}"),
        }
    }

    #[test]
    fn theta_spec_resolution_in_specs() {
        let h = kleinian_group(KleinianFamily::Cyclic, Some(3)).unwrap();
        let theta = crate::group::resolve_theta(&h, &Theta::Named("inversion".into())).unwrap();
        let g = diagonal_embed(&h, &theta).unwrap();
        let inv = local_invariants(&g).unwrap();
        assert_eq!(inv.s, Rat::from_int(-2));
    }
}
