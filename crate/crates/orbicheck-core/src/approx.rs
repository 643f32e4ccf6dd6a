//! High-precision floating evaluation of cyclotomic numbers.
//!
//! Two layers share the machinery:
//!
//! * a certified evaluator (value plus error bound, both exact rationals)
//!   backing [`sign_of_real`], the exact sign test for real cyclotomic
//!   numbers — refinement terminates because a nonzero field element has a
//!   nonzero embedding;
//! * a plain high-precision complex arithmetic ([`Cx`]) used as the
//!   cross-check oracle (default 96-bit working precision). The oracle is
//!   never a source of truth.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::cyclotomic::CycloNum;
use crate::error::Error;
use crate::rational::Rat;
use crate::Result;

/// Default working precision of the oracle, in bits. Kept above the 64
/// significant bits the cross-check contract asks for.
pub const ORACLE_BITS: u32 = 96;

fn pow2_inv(bits: u32) -> Rat {
    Rat(BigRational::new(BigInt::one(), BigInt::one() << bits))
}

/// Round to the dyadic grid with step 2^{-bits}; |x - round(x)| <= 2^{-bits}.
fn round_dyadic(x: &Rat, bits: u32) -> Rat {
    let scaled = &x.0 * BigRational::from_integer(BigInt::one() << bits);
    let nearest = scaled.round().to_integer();
    Rat(BigRational::new(nearest, BigInt::one() << bits))
}

/// arctan(1/x) for integer x >= 2, with |error| <= 2^{-bits}.
fn atan_inv(x: i64, bits: u32) -> Rat {
    let threshold = pow2_inv(bits + 2);
    let x2 = Rat::from_int(x * x);
    let mut term = Rat::frac(1, x);
    let mut acc = Rat::zero();
    let mut k: i64 = 0;
    loop {
        let contrib = &term / &Rat::from_int(2 * k + 1);
        if k % 2 == 0 {
            acc += &contrib;
        } else {
            acc -= &contrib;
        }
        term = &term / &x2;
        // alternating series with decreasing terms: remainder <= next term
        if &term / &Rat::from_int(2 * k + 3) < threshold {
            break;
        }
        k += 1;
    }
    acc
}

/// π with |error| <= 2^{-bits}, by Machin's formula.
fn pi_approx(bits: u32) -> Rat {
    static CACHE: OnceLock<Mutex<HashMap<u32, Rat>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&bits) {
        return p.clone();
    }
    let a = atan_inv(5, bits + 6);
    let b = atan_inv(239, bits + 4);
    let pi = &(&Rat::from_int(16) * &a) - &(&Rat::from_int(4) * &b);
    let pi = round_dyadic(&pi, bits + 2);
    cache.lock().unwrap().insert(bits, pi.clone());
    pi
}

/// cos(x) and sin(x) by Taylor series at a rational point, |x| <= 8.
/// Errors are at most 2^{-bits} each.
fn cos_sin(x: &Rat, bits: u32) -> (Rat, Rat) {
    let threshold = pow2_inv(bits + 4);
    let mut cos = Rat::zero();
    let mut sin = Rat::zero();
    // term_k = x^k / k!
    let mut term = Rat::one();
    let mut k: u32 = 0;
    loop {
        match k % 4 {
            0 => cos += &term,
            1 => sin += &term,
            2 => cos -= &term,
            _ => sin -= &term,
        }
        k += 1;
        term = &(&term * x) / &Rat::from_int(k as i64);
        if k > 16 && term.abs() < threshold {
            // tail is dominated by a geometric series with ratio < 1/2
            break;
        }
    }
    (round_dyadic(&cos, bits + 2), round_dyadic(&sin, bits + 2))
}

/// (re, im) of ζ_n^e with each component within 2^{-bits} of the true value,
/// under the canonical embedding ζ_n = e^{2iπ/n}.
pub fn root_of_unity_approx(n: u32, e: u32, bits: u32) -> (Rat, Rat) {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32, u32), (Rat, Rat)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let e = e % n;
    if let Some(v) = cache.lock().unwrap().get(&(n, e, bits)) {
        return v.clone();
    }
    let inner = bits + 8;
    let theta = &(&pi_approx(inner) * &Rat::from_int(2 * e as i64)) / &Rat::from_int(n as i64);
    let v = cos_sin(&theta, inner);
    cache.lock().unwrap().insert((n, e, bits), v.clone());
    v
}

/// Certified evaluation: (re, im, err) with the true embedding inside the
/// err-ball around (re, im), componentwise.
pub fn eval_certified(x: &CycloNum, bits: u32) -> (Rat, Rat, Rat) {
    let n = x.conductor();
    let mut re = Rat::zero();
    let mut im = Rat::zero();
    let mut coeff_mass = Rat::zero();
    for (e, c) in x.terms() {
        let (r, i) = root_of_unity_approx(n, e, bits + 4);
        re += &(c * &r);
        im += &(c * &i);
        coeff_mass += &c.abs();
    }
    let err = &(&coeff_mass * &pow2_inv(bits + 4)) + &pow2_inv(bits);
    (round_dyadic(&re, bits), round_dyadic(&im, bits), err)
}

/// Exact sign of a real cyclotomic number under the canonical embedding.
/// Zero is decided exactly; a nonzero sign is certified by interval
/// refinement.
pub fn sign_of_real(x: &CycloNum) -> Result<Ordering> {
    if !x.is_real() {
        return Err(Error::NotReal);
    }
    if x.is_zero() {
        return Ok(Ordering::Equal);
    }
    let mut bits = 64;
    loop {
        let (re, im, err) = eval_certified(x, bits);
        debug_assert!(im.abs() <= &err + &err, "imaginary part must enclose zero");
        if re.abs() > err {
            return Ok(if re.is_negative() {
                Ordering::Less
            } else {
                Ordering::Greater
            });
        }
        bits *= 2;
        assert!(
            bits <= 1 << 16,
            "sign refinement exceeded 65536 bits; element should have been exactly zero"
        );
    }
}

/// Relative deviation |approx − exact| / |exact| (absolute when exact = 0).
pub fn relative_deviation(exact: &Rat, approx: &Rat) -> Rat {
    let diff = (approx - exact).abs();
    if exact.is_zero() {
        diff
    } else {
        &diff / &exact.abs()
    }
}

/// 2^{-40}, the agreement tolerance of the cross-check oracle.
pub fn oracle_tolerance() -> Rat {
    pow2_inv(40)
}

// ---------------------------------------------------------------------------
// Plain high-precision complex arithmetic (the oracle path)
// ---------------------------------------------------------------------------

/// Complex number at fixed dyadic working precision.
#[derive(Clone, Debug)]
pub struct Cx {
    pub re: Rat,
    pub im: Rat,
    bits: u32,
}

impl Cx {
    pub fn zero(bits: u32) -> Self {
        Cx {
            re: Rat::zero(),
            im: Rat::zero(),
            bits,
        }
    }

    pub fn from_rat(r: &Rat, bits: u32) -> Self {
        Cx {
            re: round_dyadic(r, bits),
            im: Rat::zero(),
            bits,
        }
    }

    /// Numeric embedding of a cyclotomic number.
    pub fn from_cyclo(x: &CycloNum, bits: u32) -> Self {
        let n = x.conductor();
        let mut re = Rat::zero();
        let mut im = Rat::zero();
        for (e, c) in x.terms() {
            let (r, i) = root_of_unity_approx(n, e, bits + 4);
            re += &(c * &r);
            im += &(c * &i);
        }
        Cx {
            re: round_dyadic(&re, bits),
            im: round_dyadic(&im, bits),
            bits,
        }
    }

    fn rounded(re: Rat, im: Rat, bits: u32) -> Self {
        Cx {
            re: round_dyadic(&re, bits),
            im: round_dyadic(&im, bits),
            bits,
        }
    }

    pub fn add(&self, o: &Cx) -> Cx {
        Cx::rounded(&self.re + &o.re, &self.im + &o.im, self.bits)
    }

    pub fn sub(&self, o: &Cx) -> Cx {
        Cx::rounded(&self.re - &o.re, &self.im - &o.im, self.bits)
    }

    pub fn mul(&self, o: &Cx) -> Cx {
        let re = &(&self.re * &o.re) - &(&self.im * &o.im);
        let im = &(&self.re * &o.im) + &(&self.im * &o.re);
        Cx::rounded(re, im, self.bits)
    }

    pub fn div(&self, o: &Cx) -> Cx {
        let d = &(&o.re * &o.re) + &(&o.im * &o.im);
        assert!(!d.is_zero(), "complex division by (numerically) zero");
        let re = &(&(&self.re * &o.re) + &(&self.im * &o.im)) / &d;
        let im = &(&(&self.im * &o.re) - &(&self.re * &o.im)) / &d;
        Cx::rounded(re, im, self.bits)
    }

    pub fn neg(&self) -> Cx {
        Cx {
            re: -&self.re,
            im: -&self.im,
            bits: self.bits,
        }
    }

    pub fn abs_sq(&self) -> Rat {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }
}
