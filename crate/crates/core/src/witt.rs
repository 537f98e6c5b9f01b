//! Arithmetic in `W(F_q)`, `q = p^f`, modulo `p^N`.
//!
//! `W(F_q)` is realized as `(Z/p^N)[T]/(m(T))` for a monic lift `m` of an
//! irreducible polynomial over `F_p`, which is isomorphic to the Witt ring of
//! the residue field at every finite precision. Each value carries its own
//! absolute precision `prec`: the value is known modulo `p^prec`.
//!
//! Precision rules (absolute model):
//!
//! ```text
//! prec(x + y) = min(prec x, prec y)
//! prec(x * y) = min(prec x + v(y), prec y + v(x), W)
//! prec(x / p) = prec x - 1
//! ```
//!
//! where `v` is the valuation visible at the value's own precision and `W`
//! is the working precision of the ring.

use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::params::AmbientParams;

type Coeffs = SmallVec<[u64; 2]>;

/// An element of `W(F_q)` known modulo `p^prec`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WittScalar {
    coeffs: Coeffs,
    prec: u32,
}

impl WittScalar {
    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Canonical residues in `[0, p^prec)`, constant term first.
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }
}

impl fmt::Debug for WittScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.len() == 1 {
            write!(f, "{}+O({})", self.coeffs[0], self.prec)
        } else {
            write!(f, "{:?}+O({})", self.coeffs.as_slice(), self.prec)
        }
    }
}

struct WittData {
    p: u64,
    f: usize,
    /// `m(T)` lower coefficients, constant term first; `T^f = -sum m_i T^i`.
    m: Vec<u64>,
    w: u32,
    pow: Vec<u64>,
    /// `sigma(T)^i` for `i < f`.
    sigma_pows: Vec<WittScalar>,
}

/// The ring `W(F_q) / p^W` together with its Frobenius.
#[derive(Clone)]
pub struct Witt(Arc<WittData>);

impl fmt::Debug for Witt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W(F_{}^{}) mod p^{}", self.0.p, self.0.f, self.0.w)
    }
}

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

impl Witt {
    pub fn new(params: &AmbientParams) -> Result<Self> {
        params.validate()?;
        Ok(Self::with_prec(params.p, &params.m_coeffs, params.work_prec()))
    }

    /// Ring with an explicit working precision; `m` is monic of degree `f`.
    pub fn with_prec(p: u64, m: &[u64], w: u32) -> Self {
        let f = m.len() - 1;
        let mut pow = vec![1u64; w as usize + 1];
        for k in 1..=w as usize {
            pow[k] = pow[k - 1] * p;
        }
        let mut data = WittData { p, f, m: m[..f].to_vec(), w, pow, sigma_pows: Vec::new() };
        let one = WittScalar { coeffs: unit_vec(f, 0), prec: w };
        data.sigma_pows = vec![one; 1];
        let mut ring = Witt(Arc::new(data));
        let sigma_t = ring.lift_sigma_generator();
        let mut sigma_pows = Vec::with_capacity(f);
        let mut acc = ring.one();
        for _ in 0..f {
            sigma_pows.push(acc.clone());
            acc = ring.mul(&acc, &sigma_t);
        }
        Arc::get_mut(&mut ring.0).expect("fresh ring").sigma_pows = sigma_pows;
        ring
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn f(&self) -> usize {
        self.0.f
    }

    /// Working precision `W`.
    pub fn work_prec(&self) -> u32 {
        self.0.w
    }

    pub(crate) fn p_pow(&self, k: u32) -> u64 {
        self.0.pow[k as usize]
    }

    fn modulus(&self, prec: u32) -> u64 {
        self.0.pow[prec.min(self.0.w) as usize]
    }

    fn make(&self, mut coeffs: Coeffs, prec: u32) -> WittScalar {
        let prec = prec.min(self.0.w);
        let m = self.modulus(prec);
        for c in coeffs.iter_mut() {
            *c %= m;
        }
        WittScalar { coeffs, prec }
    }

    pub fn zero(&self) -> WittScalar {
        WittScalar { coeffs: SmallVec::from_elem(0, self.0.f), prec: self.0.w }
    }

    pub fn one(&self) -> WittScalar {
        self.from_int(1)
    }

    /// A zero known only modulo `p^prec`.
    pub fn zero_with_prec(&self, prec: u32) -> WittScalar {
        WittScalar { coeffs: SmallVec::from_elem(0, self.0.f), prec: prec.min(self.0.w) }
    }

    pub fn from_int(&self, n: i64) -> WittScalar {
        let m = self.modulus(self.0.w) as i128;
        let mut coeffs = SmallVec::from_elem(0, self.0.f);
        coeffs[0] = (n as i128).rem_euclid(m) as u64;
        WittScalar { coeffs, prec: self.0.w }
    }

    /// `sum c_i T^i` at full precision.
    pub fn from_ints(&self, cs: &[i64]) -> WittScalar {
        assert!(cs.len() <= self.0.f, "too many coefficients for f = {}", self.0.f);
        let m = self.modulus(self.0.w) as i128;
        let mut coeffs: Coeffs = SmallVec::from_elem(0, self.0.f);
        for (i, &c) in cs.iter().enumerate() {
            coeffs[i] = (c as i128).rem_euclid(m) as u64;
        }
        WittScalar { coeffs, prec: self.0.w }
    }

    /// Builds a scalar from residues; fails if the shape is wrong.
    pub fn from_residues(&self, cs: &[u64], prec: u32) -> Result<WittScalar> {
        if cs.len() != self.0.f {
            return Err(Error::Shape(format!("scalar needs {} coefficients", self.0.f)));
        }
        if prec > self.0.w {
            return Err(Error::PrecisionMismatch(format!(
                "precision {prec} exceeds working precision {}",
                self.0.w
            )));
        }
        Ok(self.make(cs.iter().copied().collect(), prec))
    }

    /// The scalar `T`, a lift of a generator of `F_q` over `F_p`.
    pub fn generator(&self) -> WittScalar {
        if self.0.f == 1 {
            // T = -m_0 mod the linear polynomial m(T) = T + m_0
            return self.neg(&self.from_int(self.0.m[0] as i64));
        }
        WittScalar { coeffs: unit_vec(self.0.f, 1), prec: self.0.w }
    }

    pub fn add(&self, x: &WittScalar, y: &WittScalar) -> WittScalar {
        let prec = x.prec.min(y.prec);
        let m = self.modulus(prec);
        let coeffs = x
            .coeffs
            .iter()
            .zip(&y.coeffs)
            .map(|(&a, &b)| ((a % m) + (b % m)) % m)
            .collect();
        WittScalar { coeffs, prec }
    }

    pub fn neg(&self, x: &WittScalar) -> WittScalar {
        let m = self.modulus(x.prec);
        let coeffs = x.coeffs.iter().map(|&a| if a == 0 { 0 } else { m - a }).collect();
        WittScalar { coeffs, prec: x.prec }
    }

    pub fn sub(&self, x: &WittScalar, y: &WittScalar) -> WittScalar {
        self.add(x, &self.neg(y))
    }

    /// Valuation visible at the value's precision (equal to `prec` for zero).
    pub fn valuation(&self, x: &WittScalar) -> u32 {
        let p = self.0.p;
        x.coeffs
            .iter()
            .map(|&c| {
                if c == 0 {
                    x.prec
                } else {
                    let mut c = c;
                    let mut v = 0;
                    while c % p == 0 {
                        c /= p;
                        v += 1;
                    }
                    v
                }
            })
            .min()
            .unwrap_or(x.prec)
            .min(x.prec)
    }

    fn product_prec(&self, x: &WittScalar, y: &WittScalar) -> u32 {
        let w = self.0.w;
        if x.prec >= w && y.prec >= w {
            return w;
        }
        let vx = self.valuation(x);
        let vy = self.valuation(y);
        (x.prec + vy).min(y.prec + vx).min(w)
    }

    pub fn mul(&self, x: &WittScalar, y: &WittScalar) -> WittScalar {
        let prec = self.product_prec(x, y);
        let m = self.modulus(self.0.w);
        let f = self.0.f;
        if f == 1 {
            let c = mulmod(x.coeffs[0], y.coeffs[0], m);
            return self.make(SmallVec::from_elem(c, 1), prec);
        }
        let mut prod = vec![0u64; 2 * f - 1];
        for (i, &a) in x.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in y.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + mulmod(a, b, m)) % m;
            }
        }
        // T^f = -sum m_i T^i, reduce from the top
        for k in (f..2 * f - 1).rev() {
            let top = prod[k];
            if top == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, &mi) in self.0.m.iter().enumerate() {
                let t = mulmod(top, mi, m);
                prod[k - f + i] = (prod[k - f + i] + m - t) % m;
            }
        }
        self.make(prod[..f].iter().copied().collect(), prec)
    }

    pub fn mul_int(&self, x: &WittScalar, n: i64) -> WittScalar {
        self.mul(x, &self.from_int(n))
    }

    pub fn pow(&self, x: &WittScalar, mut e: u64) -> WittScalar {
        let mut acc = self.one();
        let mut base = x.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    pub fn is_zero(&self, x: &WittScalar) -> bool {
        x.coeffs.iter().all(|&c| c == 0)
    }

    /// True when `x` is known to be `0 mod p^n`.
    pub fn vanishes_to(&self, x: &WittScalar, n: u32) -> bool {
        n == 0 || (x.prec >= n && x.coeffs.iter().all(|&c| c % self.modulus(n) == 0))
    }

    /// Equality modulo `p^n`, which requires both sides to be known that far.
    pub fn eq_at(&self, x: &WittScalar, y: &WittScalar, n: u32) -> bool {
        self.vanishes_to(&self.sub(x, y), n)
    }

    /// Equality at the common precision of both sides.
    pub fn eq(&self, x: &WittScalar, y: &WittScalar) -> bool {
        self.is_zero(&self.sub(x, y))
    }

    pub fn is_unit(&self, x: &WittScalar) -> bool {
        x.prec >= 1 && !self.vanishes_to(x, 1)
    }

    pub fn truncate(&self, x: &WittScalar, prec: u32) -> WittScalar {
        self.make(x.coeffs.clone(), x.prec.min(prec))
    }

    /// Same residue, precision raised to `W`: a lift, not an exact value.
    pub fn lift(&self, x: &WittScalar) -> WittScalar {
        WittScalar { coeffs: x.coeffs.clone(), prec: self.0.w }
    }

    /// Exact division by `p^k`; consumes `k` digits of precision.
    pub fn div_p_pow(&self, x: &WittScalar, k: u32) -> Result<WittScalar> {
        if k == 0 {
            return Ok(x.clone());
        }
        if x.prec < k {
            return Err(Error::PrecisionExhausted { needed: k, have: x.prec });
        }
        let d = self.p_pow(k);
        if x.coeffs.iter().any(|&c| c % d != 0) {
            return Err(Error::NotDivisible(k));
        }
        Ok(self.make(x.coeffs.iter().map(|&c| c / d).collect(), x.prec - k))
    }

    /// Multiplication by `p^k`; gains `k` digits (capped at `W`).
    pub fn mul_p_pow(&self, x: &WittScalar, k: u32) -> WittScalar {
        if k >= self.0.w {
            return self.zero();
        }
        let m = self.modulus(self.0.w);
        let d = self.p_pow(k);
        self.make(x.coeffs.iter().map(|&c| mulmod(c, d, m)).collect(), x.prec + k)
    }

    /// Inverse of a unit: the inverse in `F_q` lifted by the Newton step
    /// `z <- z (2 - x z)`.
    pub fn invert(&self, x: &WittScalar) -> Result<WittScalar> {
        if !self.is_unit(x) {
            return Err(Error::NotAUnit);
        }
        let q = self.0.p.pow(self.0.f as u32);
        let x1 = self.truncate(x, 1);
        let z1 = self.pow(&x1, q - 2);
        let target = x.prec;
        let mut z = WittScalar { coeffs: z1.coeffs, prec: target };
        let two = self.from_int(2);
        let mut known = 1u32;
        while known < target {
            z = self.mul(&z, &self.sub(&two, &self.mul(x, &z)));
            known *= 2;
        }
        debug_assert!(self.eq(&self.mul(x, &z), &self.truncate(&self.one(), target)));
        Ok(self.truncate(&z, target))
    }

    /// Arithmetic Frobenius: `sum c_i T^i -> sum c_i sigma(T)^i`.
    pub fn frobenius(&self, x: &WittScalar) -> WittScalar {
        if self.0.f == 1 {
            return x.clone();
        }
        let mut acc = self.zero();
        for (c, s) in x.coeffs.iter().zip(&self.0.sigma_pows) {
            if *c == 0 {
                continue;
            }
            let term = WittScalar { coeffs: s.coeffs.iter().map(|&v| mulmod(v, *c, self.modulus(self.0.w))).collect(), prec: self.0.w };
            acc = self.add(&acc, &term);
        }
        self.truncate(&acc, x.prec)
    }

    /// `sigma^n`.
    pub fn frobenius_pow(&self, x: &WittScalar, n: usize) -> WittScalar {
        (0..n % self.0.f).fold(x.clone(), |acc, _| self.frobenius(&acc))
    }

    /// Root of `m` congruent to `T^p mod p`, Hensel-lifted by Newton's method.
    fn lift_sigma_generator(&self) -> WittScalar {
        let t = self.generator();
        if self.0.f == 1 {
            return t;
        }
        let mut z = self.pow(&t, self.0.p);
        for _ in 0..64 {
            let (mz, dmz) = self.eval_m(&z);
            if self.is_zero(&mz) {
                break;
            }
            let inv = self.invert(&dmz).expect("m is separable mod p");
            z = self.sub(&z, &self.mul(&mz, &inv));
        }
        z
    }

    /// `(m(z), m'(z))` for the defining polynomial.
    fn eval_m(&self, z: &WittScalar) -> (WittScalar, WittScalar) {
        let f = self.0.f;
        let mut coeffs: Vec<i64> = self.0.m.iter().map(|&c| c as i64).collect();
        coeffs.push(1);
        let mut val = self.zero();
        let mut der = self.zero();
        for k in (0..=f).rev() {
            der = self.add(&self.mul(&der, z), &val);
            val = self.add(&self.mul(&val, z), &self.from_int(coeffs[k]));
        }
        (val, der)
    }

    /// Residue-level zero test (`x = 0 mod p`), used by the unit criteria.
    pub fn residue_is_zero(&self, x: &WittScalar) -> bool {
        x.coeffs.iter().all(|&c| c % self.0.p == 0)
    }

    /// Signed representative of a `f = 1` scalar, for display and tests.
    pub fn to_signed(&self, x: &WittScalar) -> i128 {
        let m = self.modulus(x.prec) as i128;
        let c = x.coeffs[0] as i128;
        if c > m / 2 {
            c - m
        } else {
            c
        }
    }
}

fn unit_vec(f: usize, i: usize) -> Coeffs {
    let mut v: Coeffs = SmallVec::from_elem(0, f);
    v[i] = 1;
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn zp(p: u64, w: u32) -> Witt {
        Witt::with_prec(p, &[0, 1], w)
    }

    /// Extended Euclid oracle for inverses modulo `m`.
    fn euclid_inverse(a: i128, m: i128) -> i128 {
        let (mut r0, mut r1, mut s0, mut s1) = (m, a.rem_euclid(m), 0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        assert_eq!(r0, 1);
        s0.rem_euclid(m)
    }

    #[test]
    fn invert_examples() {
        let w = zp(3, 6);
        assert_eq!(w.invert(&w.one()).unwrap(), w.one());
        let w4 = zp(3, 4);
        let inv = w4.invert(&w4.from_int(2)).unwrap();
        assert_eq!(inv.coeffs(), &[euclid_inverse(2, 81) as u64]);
        assert_eq!(inv.coeffs(), &[41]);
        assert_eq!(w.invert(&w.from_int(3)), Err(Error::NotAUnit));
    }

    #[test]
    fn sigma_on_f2_negates_generator() {
        // m = T^2 + 1 over Z_3: sigma(T) = -T
        let w = Witt::with_prec(3, &[1, 0, 1], 8);
        let t = w.generator();
        assert_eq!(w.frobenius(&t), w.neg(&t));
        // -T is a root of m and agrees with T^3 mod 3
        let minus_t = w.neg(&t);
        let m_val = w.add(&w.mul(&minus_t, &minus_t), &w.one());
        assert!(w.is_zero(&m_val));
        assert!(w.eq_at(&minus_t, &w.pow(&t, 3), 1));
    }

    #[test]
    fn f1_sigma_is_identity() {
        let w = zp(5, 10);
        let x = w.from_int(1234);
        assert_eq!(w.frobenius(&x), x);
    }

    #[test]
    fn division_by_p_tracks_precision() {
        let w = zp(3, 6);
        let x = w.from_int(18);
        let y = w.div_p_pow(&x, 2).unwrap();
        assert_eq!(y.prec(), 4);
        assert_eq!(y.coeffs(), &[2]);
        assert_eq!(w.div_p_pow(&w.from_int(2), 1), Err(Error::NotDivisible(1)));
    }

    #[test]
    fn product_precision_uses_valuation() {
        let w = zp(3, 10);
        let x = w.truncate(&w.from_int(9), 4); // 9 + O(3^4)
        let y = w.truncate(&w.from_int(3), 5); // 3 + O(3^5)
        let z = w.mul(&x, &y);
        assert_eq!(z.prec(), 5); // min(4 + 1, 5 + 2)
        assert_eq!(z.coeffs(), &[27]);
    }

    fn arb_scalar(f: usize) -> impl Strategy<Value = Vec<i64>> {
        proptest::collection::vec(-500i64..500, f)
    }

    proptest! {
        #[test]
        fn ring_axioms_f3(a in arb_scalar(3), b in arb_scalar(3), c in arb_scalar(3)) {
            let m = crate::params::first_irreducible(5, 3);
            let w = Witt::with_prec(5, &m, 12);
            let (x, y, z) = (w.from_ints(&a), w.from_ints(&b), w.from_ints(&c));
            prop_assert!(w.eq(&w.mul(&w.mul(&x, &y), &z), &w.mul(&x, &w.mul(&y, &z))));
            prop_assert!(w.eq(&w.mul(&x, &w.add(&y, &z)), &w.add(&w.mul(&x, &y), &w.mul(&x, &z))));
            prop_assert!(w.eq(&w.mul(&x, &y), &w.mul(&y, &x)));
        }

        #[test]
        fn sigma_is_frobenius_lift(a in arb_scalar(2), b in arb_scalar(2)) {
            let w = Witt::with_prec(7, &crate::params::first_irreducible(7, 2), 9);
            let (x, y) = (w.from_ints(&a), w.from_ints(&b));
            prop_assert!(w.eq(&w.frobenius(&w.mul(&x, &y)), &w.mul(&w.frobenius(&x), &w.frobenius(&y))));
            prop_assert!(w.eq(&w.frobenius(&w.add(&x, &y)), &w.add(&w.frobenius(&x), &w.frobenius(&y))));
            prop_assert!(w.eq_at(&w.frobenius(&x), &w.pow(&x, 7), 1));
            prop_assert!(w.eq(&w.frobenius_pow(&x, 2), &x));
        }

        #[test]
        fn inverse_times_x_is_one(a in arb_scalar(3)) {
            let m = crate::params::first_irreducible(3, 3);
            let w = Witt::with_prec(3, &m, 20);
            let x = w.from_ints(&a);
            prop_assume!(w.is_unit(&x));
            let inv = w.invert(&x).unwrap();
            prop_assert!(w.eq_at(&w.mul(&x, &inv), &w.one(), 20));
        }
    }
}
