//! Exact arithmetic in cyclotomic fields Q(ζ_N).
//!
//! An element is a rational linear combination of roots of unity ζ_N^e.
//! Internally we keep the terms sign-normalized (for even N the exponent
//! range is [0, N/2), using ζ^{e+N/2} = −ζ^e), which keeps products of
//! monomials single-term; the canonical coordinates in the power basis of
//! Q[x]/Φ_N(x) are produced on demand (equality, serialization, queries)
//! through a per-conductor reduction table. Inversion runs the extended
//! Euclidean algorithm on polynomials over Q against Φ_N.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::rational::Rat;
use crate::Result;

/// Conductors above this would need reduction tables we refuse to build.
const MAX_CONDUCTOR: u32 = 100_000;

// ---------------------------------------------------------------------------
// Elementary number theory
// ---------------------------------------------------------------------------

pub fn factorize(mut n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u32) -> u32 {
    factorize(n)
        .into_iter()
        .map(|(p, e)| (p - 1) * p.pow(e - 1))
        .product::<u32>()
        .max(1)
}

fn divisors(n: u32) -> Vec<u32> {
    let mut ds = vec![1u32];
    for (p, e) in factorize(n) {
        let snapshot = ds.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            ds.extend(snapshot.iter().map(|d| d * pk));
        }
    }
    ds.sort_unstable();
    ds
}

fn moebius(n: u32) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Ramanujan sum c_n(j) = Σ_{k ∈ (Z/n)*} ζ_n^{jk} = μ(n/g)·φ(n)/φ(n/g)
/// with g = gcd(j, n). This is the trace of ζ_n^j down to Q.
pub fn ramanujan_sum(n: u32, j: u32) -> i64 {
    let g = (j % n).gcd(&n).max(1);
    let m = n / g;
    moebius(m) * (euler_phi(n) / euler_phi(m)) as i64
}

// ---------------------------------------------------------------------------
// Integer polynomials and the cyclotomic polynomials
// ---------------------------------------------------------------------------

fn int_poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    // Exact division of integer polynomials with monic divisor tail handling;
    // panics if the division is not exact (never happens for x^N-1 / prod Phi_d).
    let mut rem: Vec<BigInt> = num.to_vec();
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "divisor must be monic");
    let nd = rem.len() - 1;
    if nd < dd {
        assert!(rem.iter().all(|c| c.is_zero()));
        return vec![BigInt::zero()];
    }
    let mut quot = vec![BigInt::zero(); nd - dd + 1];
    for k in (0..=nd - dd).rev() {
        let c = rem[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        quot[k] = c.clone();
        for i in 0..=dd {
            let delta = &den[i] * &c;
            rem[k + i] -= delta;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
    quot
}

fn phi_poly_cache() -> &'static Mutex<HashMap<u32, Arc<Vec<BigInt>>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<BigInt>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients (ascending degree, monic) of the N-th cyclotomic polynomial,
/// computed by dividing x^N − 1 by Φ_d for the proper divisors d of N.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<BigInt>> {
    assert!(n >= 1, "conductor must be positive");
    if let Some(p) = phi_poly_cache().lock().unwrap().get(&n) {
        return Arc::clone(p);
    }
    let result = if n == 1 {
        vec![BigInt::from(-1), BigInt::from(1)]
    } else {
        let mut num = vec![BigInt::zero(); n as usize + 1];
        num[0] = BigInt::from(-1);
        num[n as usize] = BigInt::from(1);
        let mut acc = num;
        for d in divisors(n) {
            if d < n {
                let phi_d = cyclotomic_polynomial(d);
                acc = int_poly_div_exact(&acc, &phi_d);
            }
        }
        acc
    };
    let arc = Arc::new(result);
    phi_poly_cache()
        .lock()
        .unwrap()
        .insert(n, Arc::clone(&arc));
    arc
}

// ---------------------------------------------------------------------------
// Per-conductor reduction tables
// ---------------------------------------------------------------------------

pub(crate) struct ConductorTable {
    #[allow(dead_code)]
    pub n: u32,
    pub phi: u32,
    /// Φ_N over Q, for the Euclidean inversion.
    pub phi_poly_q: Vec<Rat>,
    /// rows[k] = coefficients of x^k mod Φ_N in the power basis, k < rows.len().
    pub rows: Vec<Vec<i64>>,
}

impl ConductorTable {
    fn build(n: u32) -> Result<ConductorTable> {
        if n == 0 || n > MAX_CONDUCTOR {
            return Err(Error::ConductorTooLarge(n));
        }
        let phi_poly = cyclotomic_polynomial(n);
        let phi = (phi_poly.len() - 1) as u32;
        debug_assert_eq!(phi, euler_phi(n));
        let p_i64: Vec<i64> = phi_poly
            .iter()
            .map(|c| i64::try_from(c).map_err(|_| Error::ConductorTooLarge(n)))
            .collect::<Result<_>>()?;
        let rows_len = (n as usize).max(2 * phi as usize - 1);
        let mut rows: Vec<Vec<i64>> = Vec::with_capacity(rows_len);
        for k in 0..phi as usize {
            let mut row = vec![0i64; phi as usize];
            row[k] = 1;
            rows.push(row);
        }
        for _ in phi as usize..rows_len {
            let prev = rows.last().unwrap();
            let carry = prev[phi as usize - 1];
            let mut row = vec![0i64; phi as usize];
            for i in 0..phi as usize {
                let mut acc: i128 = if i >= 1 { prev[i - 1] as i128 } else { 0 };
                acc -= carry as i128 * p_i64[i] as i128;
                row[i] = i64::try_from(acc).map_err(|_| Error::ConductorTooLarge(n))?;
            }
            rows.push(row);
        }
        let phi_poly_q = phi_poly
            .iter()
            .map(|c| Rat::from_bigint(c.clone()))
            .collect();
        Ok(ConductorTable {
            n,
            phi,
            phi_poly_q,
            rows,
        })
    }
}

pub(crate) fn conductor_table(n: u32) -> Result<Arc<ConductorTable>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<ConductorTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&n) {
        return Ok(Arc::clone(t));
    }
    let t = Arc::new(ConductorTable::build(n)?);
    cache.lock().unwrap().insert(n, Arc::clone(&t));
    Ok(t)
}

// ---------------------------------------------------------------------------
// CycloNum
// ---------------------------------------------------------------------------

/// An element of Q(ζ_N), exact.
#[derive(Clone)]
pub struct CycloNum {
    conductor: u32,
    /// exponent → coefficient, exponents sign-normalized: in [0, N/2) for even
    /// N (using ζ^{N/2} = −1) and [0, N) for odd N. No zero coefficients.
    terms: BTreeMap<u32, Rat>,
}

impl CycloNum {
    fn normalize_exp(n: u32, e: u32, c: Rat) -> (u32, Rat) {
        let e = e % n;
        if n % 2 == 0 && e >= n / 2 {
            (e - n / 2, -c)
        } else {
            (e, c)
        }
    }

    pub fn zero(n: u32) -> Self {
        assert!(n >= 1);
        CycloNum {
            conductor: n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: u32) -> Self {
        Self::from_rat(n, Rat::one())
    }

    pub fn from_rat(n: u32, r: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(0, r);
        }
        CycloNum {
            conductor: n,
            terms,
        }
    }

    pub fn from_int(n: u32, v: i64) -> Self {
        Self::from_rat(n, Rat::from_int(v))
    }

    /// ζ_n^e.
    pub fn root(n: u32, e: u32) -> Self {
        Self::from_terms(n, [(e, Rat::one())])
    }

    pub fn from_terms(n: u32, it: impl IntoIterator<Item = (u32, Rat)>) -> Self {
        assert!(n >= 1);
        let mut terms: BTreeMap<u32, Rat> = BTreeMap::new();
        for (e, c) in it {
            if c.is_zero() {
                continue;
            }
            let (e, c) = Self::normalize_exp(n, e, c);
            let entry = terms.entry(e).or_insert_with(Rat::zero);
            *entry += &c;
            if entry.is_zero() {
                terms.remove(&e);
            }
        }
        CycloNum {
            conductor: n,
            terms,
        }
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub(crate) fn terms(&self) -> impl Iterator<Item = (u32, &Rat)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Some((exponent, coefficient)) if the stored form is a single term.
    /// Single-term forms are unique per field element, so this doubles as a
    /// canonical monomial test.
    pub fn as_single_term(&self) -> Option<(u32, &Rat)> {
        if self.terms.len() == 1 {
            let (&e, c) = self.terms.iter().next().unwrap();
            Some((e, c))
        } else {
            None
        }
    }

    pub fn add(&self, other: &CycloNum) -> CycloNum {
        if self.conductor != other.conductor {
            let (a, b) = Self::unify(self, other);
            return a.add(&b);
        }
        let mut terms = self.terms.clone();
        for (&e, c) in &other.terms {
            let entry = terms.entry(e).or_insert_with(Rat::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(&e);
            }
        }
        CycloNum {
            conductor: self.conductor,
            terms,
        }
    }

    pub fn sub(&self, other: &CycloNum) -> CycloNum {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CycloNum {
        CycloNum {
            conductor: self.conductor,
            terms: self.terms.iter().map(|(&e, c)| (e, -c)).collect(),
        }
    }

    pub fn scale(&self, r: &Rat) -> CycloNum {
        if r.is_zero() {
            return CycloNum::zero(self.conductor);
        }
        CycloNum {
            conductor: self.conductor,
            terms: self.terms.iter().map(|(&e, c)| (e, c * r)).collect(),
        }
    }

    pub fn mul(&self, other: &CycloNum) -> CycloNum {
        if self.conductor != other.conductor {
            let (a, b) = Self::unify(self, other);
            return a.mul(&b);
        }
        let n = self.conductor;
        let mut acc: BTreeMap<u32, Rat> = BTreeMap::new();
        for (&e1, c1) in &self.terms {
            for (&e2, c2) in &other.terms {
                let (e, c) = Self::normalize_exp(n, e1 + e2, c1 * c2);
                let entry = acc.entry(e).or_insert_with(Rat::zero);
                *entry += &c;
                if entry.is_zero() {
                    acc.remove(&e);
                }
            }
        }
        CycloNum {
            conductor: n,
            terms: acc,
        }
    }

    pub fn pow(&self, mut k: u64) -> CycloNum {
        let mut base = self.clone();
        let mut out = CycloNum::one(self.conductor);
        while k > 0 {
            if k & 1 == 1 {
                out = out.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        out
    }

    /// Complex conjugation ζ ↦ ζ^{−1}.
    pub fn conjugate(&self) -> CycloNum {
        let n = self.conductor;
        CycloNum::from_terms(n, self.terms.iter().map(|(&e, c)| ((n - e) % n, c.clone())))
    }

    /// Galois action σ_k: ζ ↦ ζ^k, gcd(k, N) = 1.
    pub fn galois_apply(&self, k: u32) -> CycloNum {
        assert_eq!((k % self.conductor).gcd(&self.conductor), 1);
        let n = self.conductor;
        CycloNum::from_terms(
            n,
            self.terms
                .iter()
                .map(|(&e, c)| (((e as u64 * k as u64) % n as u64) as u32, c.clone())),
        )
    }

    /// Embed into Q(ζ_m); m must be a multiple of the conductor.
    pub fn lift_to(&self, m: u32) -> Result<CycloNum> {
        if m % self.conductor != 0 {
            return Err(Error::ConductorMismatch(self.conductor, m));
        }
        let f = m / self.conductor;
        Ok(CycloNum::from_terms(
            m,
            self.terms.iter().map(|(&e, c)| (e * f, c.clone())),
        ))
    }

    /// Bring two elements into the compositum Q(ζ_lcm).
    pub fn unify(a: &CycloNum, b: &CycloNum) -> (CycloNum, CycloNum) {
        if a.conductor == b.conductor {
            return (a.clone(), b.clone());
        }
        let l = a.conductor.lcm(&b.conductor);
        (a.lift_to(l).unwrap(), b.lift_to(l).unwrap())
    }

    /// Canonical coordinates in the power basis 1, ζ, …, ζ^{φ(N)−1} of
    /// Q[x]/Φ_N. Equal field elements produce identical sequences.
    pub fn canonical_coeffs(&self) -> Vec<Rat> {
        let table = conductor_table(self.conductor).expect("conductor table");
        let phi = table.phi as usize;
        let mut out = vec![Rat::zero(); phi];
        for (&e, c) in &self.terms {
            if (e as usize) < phi {
                out[e as usize] += c;
            } else {
                for (i, &r) in table.rows[e as usize].iter().enumerate() {
                    if r != 0 {
                        out[i] += &(c * &Rat::from_int(r));
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        if self.terms.is_empty() {
            return true;
        }
        if self.terms.len() == 1 {
            // single-term forms are canonical
            return false;
        }
        self.canonical_coeffs().iter().all(Rat::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.to_rational().is_ok()
    }

    pub fn is_real(&self) -> bool {
        self.eq(&self.conjugate())
    }

    /// Exact rational value; errors (naming the offending basis index) if any
    /// higher canonical coefficient is nonzero.
    pub fn to_rational(&self) -> Result<Rat> {
        let coeffs = self.canonical_coeffs();
        for (i, c) in coeffs.iter().enumerate().skip(1) {
            if !c.is_zero() {
                return Err(Error::NotRational {
                    conductor: self.conductor,
                    index: i as u32,
                    coeff: c.to_string(),
                });
            }
        }
        Ok(coeffs.into_iter().next().unwrap_or_else(Rat::zero))
    }

    /// Multiplicative inverse via the extended Euclidean algorithm on
    /// polynomials over Q against Φ_N.
    pub fn inverse(&self) -> Result<CycloNum> {
        if self.is_zero() {
            return Err(Error::DivisionByZero {
                conductor: self.conductor,
            });
        }
        let table = conductor_table(self.conductor)?;
        let a = poly_trimmed(self.canonical_coeffs());
        let (g, u, _) = poly_ext_gcd(&a, &table.phi_poly_q);
        // Φ_N is irreducible over Q, so the gcd is a nonzero constant.
        assert_eq!(g.len(), 1, "cyclotomic polynomial must be irreducible");
        let ginv = g[0].recip();
        let inv_coeffs = u.into_iter().map(|c| c * &ginv);
        let out = CycloNum::from_terms(
            self.conductor,
            inv_coeffs.enumerate().map(|(i, c)| (i as u32, c)),
        );
        // degree of u is < φ(N), already in the power basis range
        Ok(out)
    }

    pub fn div(&self, other: &CycloNum) -> Result<CycloNum> {
        let (a, b) = Self::unify(self, other);
        Ok(a.mul(&b.inverse()?))
    }

    /// Trace down to Q: Σ_{σ ∈ Gal(Q(ζ_N)/Q)} σ(x), exact.
    pub fn trace_to_q(&self) -> Rat {
        let n = self.conductor;
        let mut acc = Rat::zero();
        for (&e, c) in &self.terms {
            acc += &(c * &Rat::from_int(ramanujan_sum(n, e)));
        }
        acc
    }

    /// Express the element in Q(ζ_m) for a divisor m of the conductor, if it
    /// lies in that subfield.
    pub fn try_descend(&self, m: u32) -> Result<CycloNum> {
        if self.conductor % m != 0 {
            return Err(Error::ConductorMismatch(m, self.conductor));
        }
        if m == self.conductor {
            return Ok(self.clone());
        }
        let phi_m = euler_phi(m) as usize;
        let target = self.canonical_coeffs();
        let phi_n = target.len();
        // columns: canonical coords of ζ_m^j lifted into Q(ζ_N)
        let mut cols: Vec<Vec<Rat>> = Vec::with_capacity(phi_m);
        for j in 0..phi_m {
            let lifted = CycloNum::root(m, j as u32).lift_to(self.conductor)?;
            cols.push(lifted.canonical_coeffs());
        }
        // solve cols * x = target by Gaussian elimination on the augmented system
        let mut aug: Vec<Vec<Rat>> = (0..phi_n)
            .map(|r| {
                let mut row: Vec<Rat> = cols.iter().map(|c| c[r].clone()).collect();
                row.push(target[r].clone());
                row
            })
            .collect();
        let mut pivot_rows = Vec::new();
        let mut r0 = 0;
        for col in 0..phi_m {
            let Some(pr) = (r0..phi_n).find(|&r| !aug[r][col].is_zero()) else {
                continue;
            };
            aug.swap(r0, pr);
            let inv = aug[r0][col].recip();
            for c in col..=phi_m {
                aug[r0][c] = &aug[r0][c] * &inv;
            }
            for r in 0..phi_n {
                if r != r0 && !aug[r][col].is_zero() {
                    let f = aug[r][col].clone();
                    for c in col..=phi_m {
                        let delta = &aug[r0][c] * &f;
                        aug[r][c] -= &delta;
                    }
                }
            }
            pivot_rows.push((r0, col));
            r0 += 1;
        }
        // inconsistent rows mean the element is not in the subfield
        for r in r0..phi_n {
            if !aug[r][phi_m].is_zero() {
                return Err(Error::NoDescent(m));
            }
        }
        let mut coeffs = vec![Rat::zero(); phi_m];
        for &(r, c) in &pivot_rows {
            coeffs[c] = aug[r][phi_m].clone();
        }
        Ok(CycloNum::from_terms(
            m,
            coeffs.into_iter().enumerate().map(|(i, c)| (i as u32, c)),
        ))
    }
}

impl PartialEq for CycloNum {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor != other.conductor {
            return false;
        }
        if self.terms == other.terms {
            return true;
        }
        // empty and single-term forms are canonical
        match (self.terms.len(), other.terms.len()) {
            (0, _) => other.is_zero(),
            (_, 0) => self.is_zero(),
            (1, 1) => false,
            _ => self.canonical_coeffs() == other.canonical_coeffs(),
        }
    }
}

impl Eq for CycloNum {}

/// Field equality across different conductors, via the compositum.
pub fn eq_as_field(a: &CycloNum, b: &CycloNum) -> bool {
    let (a, b) = CycloNum::unify(a, b);
    a == b
}

impl fmt::Debug for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0 in Q(z_{})", self.conductor);
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&e, c)| {
                if e == 0 {
                    format!("{c}")
                } else {
                    format!("{c}*z^{e}")
                }
            })
            .collect();
        write!(f, "{} in Q(z_{})", parts.join(" + "), self.conductor)
    }
}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

// Serialized form: {"conductor": N, "coeffs": ["p/q", ...]} with the dense
// canonical power-basis coefficients, length φ(N).
impl Serialize for CycloNum {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("CycloNum", 2)?;
        st.serialize_field("conductor", &self.conductor)?;
        st.serialize_field("coeffs", &self.canonical_coeffs())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for CycloNum {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            conductor: u32,
            coeffs: Vec<Rat>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.conductor == 0 {
            return Err(de::Error::custom("conductor must be positive"));
        }
        let phi = euler_phi(raw.conductor) as usize;
        if raw.coeffs.len() != phi {
            return Err(de::Error::custom(format!(
                "expected {} coefficients for conductor {}, got {}",
                phi,
                raw.conductor,
                raw.coeffs.len()
            )));
        }
        Ok(CycloNum::from_terms(
            raw.conductor,
            raw.coeffs.into_iter().enumerate().map(|(i, c)| (i as u32, c)),
        ))
    }
}

// ---------------------------------------------------------------------------
// Dense polynomial arithmetic over Q (for the Euclidean inversion)
// ---------------------------------------------------------------------------

fn poly_trimmed(mut v: Vec<Rat>) -> Vec<Rat> {
    while v.len() > 1 && v.last().map(Rat::is_zero).unwrap_or(false) {
        v.pop();
    }
    if v.is_empty() {
        v.push(Rat::zero());
    }
    v
}

fn poly_is_zero(v: &[Rat]) -> bool {
    v.iter().all(Rat::is_zero)
}

fn poly_divmod(num: &[Rat], den: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let den = poly_trimmed(den.to_vec());
    assert!(!poly_is_zero(&den), "polynomial division by zero");
    let mut rem = poly_trimmed(num.to_vec());
    let dd = den.len() - 1;
    if rem.len() - 1 < dd || poly_is_zero(&rem) {
        return (vec![Rat::zero()], rem);
    }
    let mut quot = vec![Rat::zero(); rem.len() - dd];
    let lead_inv = den[dd].recip();
    for k in (0..=rem.len() - 1 - dd).rev() {
        let c = &rem[k + dd] * &lead_inv;
        if c.is_zero() {
            continue;
        }
        quot[k] = c.clone();
        for i in 0..=dd {
            let delta = &den[i] * &c;
            rem[k + i] -= &delta;
        }
    }
    (poly_trimmed(quot), poly_trimmed(rem))
}

fn poly_sub_mul(a: &[Rat], q: &[Rat], b: &[Rat]) -> Vec<Rat> {
    // a - q*b
    let mut out = vec![Rat::zero(); a.len().max(q.len() + b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, qc) in q.iter().enumerate() {
        if qc.is_zero() {
            continue;
        }
        for (j, bc) in b.iter().enumerate() {
            let delta = qc * bc;
            out[i + j] -= &delta;
        }
    }
    poly_trimmed(out)
}

/// Extended gcd: returns (g, u, v) with u·a + v·b = g.
fn poly_ext_gcd(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>, Vec<Rat>) {
    let mut r0 = poly_trimmed(a.to_vec());
    let mut r1 = poly_trimmed(b.to_vec());
    let mut u0 = vec![Rat::one()];
    let mut u1 = vec![Rat::zero()];
    let mut v0 = vec![Rat::zero()];
    let mut v1 = vec![Rat::one()];
    while !poly_is_zero(&r1) {
        let (q, r) = poly_divmod(&r0, &r1);
        let u = poly_sub_mul(&u0, &q, &u1);
        let v = poly_sub_mul(&v0, &q, &v1);
        r0 = r1;
        r1 = r;
        u0 = u1;
        u1 = u;
        v0 = v1;
        v1 = v;
    }
    (r0, u0, v0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_i64(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn cyclotomic_polynomials_small() {
        assert_eq!(*cyclotomic_polynomial(1), poly_i64(&[-1, 1]));
        assert_eq!(*cyclotomic_polynomial(4), poly_i64(&[1, 0, 1]));
        // divide x^12 - 1 by the product of Phi_d, d in {1,2,3,4,6}
        assert_eq!(*cyclotomic_polynomial(12), poly_i64(&[1, 0, -1, 0, 1]));
        assert_eq!(*cyclotomic_polynomial(5), poly_i64(&[1, 1, 1, 1, 1]));
        assert_eq!(*cyclotomic_polynomial(2), poly_i64(&[1, 1]));
    }

    #[test]
    fn minimal_polynomial_relation() {
        // ζ_3 + ζ_3² + 1 = 0
        let z = CycloNum::root(3, 1);
        let sum = z.add(&z.pow(2)).add(&CycloNum::one(3));
        assert!(sum.is_zero());
    }

    #[test]
    fn phi5_at_one_by_expansion() {
        // (1 − ζ_5)(1 − ζ_5²)(1 − ζ_5³)(1 − ζ_5⁴) = 5
        let one = CycloNum::one(5);
        let mut prod = CycloNum::one(5);
        for k in 1..=4 {
            prod = prod.mul(&one.sub(&CycloNum::root(5, k)));
        }
        assert_eq!(prod.to_rational().unwrap(), Rat::from_int(5));
    }

    #[test]
    fn invert_two() {
        // ζ_4 + ζ_4^{−1} = 0, so 2 − ζ_4 − ζ_4^{−1} = 2
        let z = CycloNum::root(4, 1);
        let x = CycloNum::from_int(4, 2).sub(&z).sub(&z.conjugate());
        assert_eq!(x.to_rational().unwrap(), Rat::from_int(2));
        assert_eq!(x.inverse().unwrap().to_rational().unwrap(), Rat::frac(1, 2));
    }

    #[test]
    fn zero_of_q_zeta7_is_rational_zero() {
        let z = CycloNum::zero(7);
        assert_eq!(z.to_rational().unwrap(), Rat::zero());
    }

    #[test]
    fn zeta8_is_not_rational() {
        let err = CycloNum::root(8, 1).to_rational().unwrap_err();
        match err {
            Error::NotRational { index, .. } => assert_eq!(index, 1),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn sin_square_sum_at_n5_brute_force() {
        // Σ_{k=1}^{4} 1/(2 − ζ_5^k − ζ_5^{−k}), computed entirely in the field.
        // Frozen value from this brute force: 2.
        let two = CycloNum::from_int(5, 2);
        let mut acc = CycloNum::zero(5);
        for k in 1..=4 {
            let z = CycloNum::root(5, k);
            let d = two.sub(&z).sub(&z.conjugate());
            acc = acc.add(&d.inverse().unwrap());
        }
        assert_eq!(acc.to_rational().unwrap(), Rat::from_int(2));
    }

    #[test]
    fn conjugation_is_an_involution() {
        let x = CycloNum::from_terms(
            12,
            [(1, Rat::frac(2, 3)), (5, Rat::from_int(-7)), (0, Rat::one())],
        );
        assert_eq!(x.conjugate().conjugate(), x);
    }

    #[test]
    fn inverse_times_self_is_one() {
        let x = CycloNum::from_terms(
            7,
            [(0, Rat::from_int(2)), (1, Rat::frac(1, 3)), (4, Rat::from_int(-1))],
        );
        let inv = x.inverse().unwrap();
        assert_eq!(x.mul(&inv), CycloNum::one(7));
    }

    #[test]
    fn embed_and_descend_round_trip() {
        let x = CycloNum::from_terms(6, [(0, Rat::frac(1, 2)), (1, Rat::from_int(3))]);
        let lifted = x.lift_to(24).unwrap();
        assert_eq!(lifted.try_descend(6).unwrap(), x);
        // an element that is not in the subfield must be rejected
        assert!(CycloNum::root(24, 1).try_descend(6).is_err());
    }

    #[test]
    fn equality_is_canonical_across_representations() {
        // 1 + ζ + ζ² + ζ³ + ζ⁴ = 0 in Q(ζ_5): built as a five-term sum
        let mut x = CycloNum::one(5);
        for e in 1..=4 {
            x = x.add(&CycloNum::root(5, e));
        }
        assert!(x.is_zero());
        assert_eq!(x, CycloNum::zero(5));
    }

    #[test]
    fn trace_matches_brute_force_galois_sum() {
        let n = 12u32;
        let x = CycloNum::from_terms(n, [(1, Rat::from_int(2)), (0, Rat::frac(1, 2)), (4, Rat::one())]);
        let mut brute = CycloNum::zero(n);
        for k in 1..n {
            if k.gcd(&n) == 1 {
                brute = brute.add(&x.galois_apply(k));
            }
        }
        assert_eq!(brute.to_rational().unwrap(), x.trace_to_q());
    }

    #[test]
    fn ramanujan_small_values() {
        assert_eq!(ramanujan_sum(5, 0), 4);
        assert_eq!(ramanujan_sum(5, 1), -1);
        assert_eq!(ramanujan_sum(6, 1), 1);
        assert_eq!(ramanujan_sum(4, 2), -2);
    }

    #[test]
    fn serde_round_trip_dense_canonical() {
        let x = CycloNum::from_terms(8, [(3, Rat::frac(-2, 5)), (0, Rat::one())]);
        let json = serde_json::to_string(&x).unwrap();
        let back: CycloNum = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
    }
}
