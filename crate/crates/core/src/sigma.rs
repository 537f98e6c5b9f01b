//! The power-series ring 𝔖 = W(k)[[u]] truncated at u-degree `N_u`.

use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::params::AmbientParams;
use crate::ring::Ring;
use crate::witt::{Witt, WittScalar};

/// `sum c_i u^i` with `i < N_u`. `truncated` records that a nonzero term of
/// degree `>= N_u` was dropped at some point.
#[derive(Clone, PartialEq)]
pub struct SigmaSeries {
    coeffs: Vec<WittScalar>,
    truncated: bool,
}

impl SigmaSeries {
    pub fn coeffs(&self) -> &[WittScalar] {
        &self.coeffs
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// Degree of the stored polynomial (`None` for zero).
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }
}

impl fmt::Debug for SigmaSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c:?}")?;
        }
        write!(f, "]{}", if self.truncated { "+O(u^N)" } else { "" })
    }
}

struct SigmaData {
    witt: Witt,
    n_u: usize,
    /// `p a`, the constant term of `E(u)`.
    pa: WittScalar,
}

/// Context for 𝔖 with `E(u) = u + p a`.
#[derive(Clone)]
pub struct Sigma(Arc<SigmaData>);

impl fmt::Debug for Sigma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W[[u]] mod u^{}", self.0.n_u)
    }
}

impl Sigma {
    pub fn new(params: &AmbientParams, witt: &Witt) -> Self {
        let a = witt.from_ints(&params.a);
        Self::with_bound(witt, params.n_u(), &a)
    }

    pub fn with_bound(witt: &Witt, n_u: usize, a: &WittScalar) -> Self {
        let pa = witt.mul_int(a, witt.p() as i64);
        Sigma(Arc::new(SigmaData { witt: witt.clone(), n_u, pa }))
    }

    pub fn n_u(&self) -> usize {
        self.0.n_u
    }

    pub fn pa(&self) -> &WittScalar {
        &self.0.pa
    }

    fn normalize(&self, mut coeffs: Vec<WittScalar>, mut truncated: bool) -> SigmaSeries {
        let w = &self.0.witt;
        if coeffs.len() > self.0.n_u {
            truncated |= coeffs[self.0.n_u..].iter().any(|c| !w.is_zero(c));
            coeffs.truncate(self.0.n_u);
        }
        let full = w.work_prec();
        while coeffs.last().is_some_and(|c| c.prec() >= full && w.is_zero(c)) {
            coeffs.pop();
        }
        SigmaSeries { coeffs, truncated }
    }

    pub fn from_coeffs(&self, coeffs: Vec<WittScalar>) -> SigmaSeries {
        self.normalize(coeffs, false)
    }

    /// As [`Sigma::from_coeffs`], keeping a flag for terms lost past `N_u`.
    pub fn from_coeffs_flagged(&self, coeffs: Vec<WittScalar>, truncated: bool) -> SigmaSeries {
        self.normalize(coeffs, truncated)
    }

    pub fn from_ints(&self, cs: &[i64]) -> SigmaSeries {
        let w = &self.0.witt;
        self.from_coeffs(cs.iter().map(|&c| w.from_int(c)).collect())
    }

    /// `c u^n`.
    pub fn monomial(&self, c: &WittScalar, n: usize) -> SigmaSeries {
        let mut coeffs = vec![self.0.witt.zero(); n];
        coeffs.push(c.clone());
        self.normalize(coeffs, false)
    }

    pub fn u(&self) -> SigmaSeries {
        self.monomial(&self.0.witt.one(), 1)
    }

    /// `E(u) = u + p a`.
    pub fn eisenstein(&self) -> SigmaSeries {
        self.from_coeffs(vec![self.0.pa.clone(), self.0.witt.one()])
    }

    pub fn eisenstein_pow(&self, n: u32) -> SigmaSeries {
        let e = self.eisenstein();
        (0..n).fold(self.one(), |acc, _| self.mul(&acc, &e))
    }

    pub fn coeff(&self, x: &SigmaSeries, i: usize) -> WittScalar {
        x.coeffs.get(i).cloned().unwrap_or_else(|| self.0.witt.zero())
    }

    /// Evaluation at `u = t` for `t` in `pW` (converges `p`-adically).
    pub fn eval(&self, x: &SigmaSeries, t: &WittScalar) -> WittScalar {
        let w = &self.0.witt;
        let mut acc = w.zero();
        for c in x.coeffs.iter().rev() {
            acc = w.add(&w.mul(&acc, t), c);
        }
        if x.truncated {
            // the dropped tail lies in t^{N_u} W
            let v = w.valuation(t).saturating_mul(self.0.n_u as u32);
            acc = w.truncate(&acc, v);
        }
        acc
    }

    /// Synthetic division by `E(u)`: `x = q E + rem` with `rem` in `W(k)`.
    pub fn weierstrass_divide(&self, x: &SigmaSeries) -> (SigmaSeries, WittScalar) {
        let w = &self.0.witt;
        let alpha = w.neg(&self.0.pa);
        if x.coeffs.is_empty() {
            return (self.zero(), w.zero());
        }
        let n = x.coeffs.len() - 1;
        let mut q = vec![w.zero(); n];
        let mut carry = x.coeffs[n].clone();
        for k in (0..n).rev() {
            q[k] = carry.clone();
            carry = w.add(&x.coeffs[k], &w.mul(&alpha, &carry));
        }
        if x.truncated {
            // a dropped term f_m u^m (m >= N_u) feeds f_m alpha^{m-k-1} into q_k
            let v = w.valuation(&alpha);
            for (k, qk) in q.iter_mut().enumerate() {
                *qk = w.truncate(qk, v * (self.0.n_u - k - 1) as u32);
            }
            carry = w.truncate(&carry, v * self.0.n_u as u32);
        }
        (self.normalize(q, x.truncated), carry)
    }

    /// Largest `s` with `E^s | x`, together with `x / E^s`, dividing while
    /// the remainder vanishes at precision.
    pub fn eisenstein_valuation(&self, x: &SigmaSeries, max: u32) -> (u32, SigmaSeries) {
        let w = &self.0.witt;
        let mut cur = x.clone();
        let mut s = 0;
        while s < max {
            let (q, rem) = self.weierstrass_divide(&cur);
            if !w.is_zero(&rem) {
                break;
            }
            cur = q;
            s += 1;
        }
        (s, cur)
    }
}

impl Ring for Sigma {
    type Elem = SigmaSeries;

    fn witt(&self) -> &Witt {
        &self.0.witt
    }

    fn zero(&self) -> SigmaSeries {
        SigmaSeries { coeffs: Vec::new(), truncated: false }
    }

    fn one(&self) -> SigmaSeries {
        self.from_scalar(&self.0.witt.one())
    }

    fn from_scalar(&self, s: &WittScalar) -> SigmaSeries {
        self.from_coeffs(vec![s.clone()])
    }

    fn add(&self, x: &SigmaSeries, y: &SigmaSeries) -> SigmaSeries {
        let w = &self.0.witt;
        let n = x.coeffs.len().max(y.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (x.coeffs.get(i), y.coeffs.get(i)) {
                (Some(a), Some(b)) => w.add(a, b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        self.normalize(coeffs, x.truncated || y.truncated)
    }

    fn neg(&self, x: &SigmaSeries) -> SigmaSeries {
        let w = &self.0.witt;
        SigmaSeries { coeffs: x.coeffs.iter().map(|c| w.neg(c)).collect(), truncated: x.truncated }
    }

    fn mul(&self, x: &SigmaSeries, y: &SigmaSeries) -> SigmaSeries {
        let w = &self.0.witt;
        let truncated = (x.truncated && !y.coeffs.is_empty()) || (y.truncated && !x.coeffs.is_empty());
        if x.coeffs.is_empty() || y.coeffs.is_empty() {
            return SigmaSeries { coeffs: Vec::new(), truncated };
        }
        let len = x.coeffs.len() + y.coeffs.len() - 1;
        let keep = len.min(self.0.n_u);
        let mut out: Vec<Option<WittScalar>> = vec![None; keep];
        let mut dropped = false;
        for (i, a) in x.coeffs.iter().enumerate() {
            if a.prec() >= w.work_prec() && w.is_zero(a) {
                continue;
            }
            for (j, b) in y.coeffs.iter().enumerate() {
                if b.prec() >= w.work_prec() && w.is_zero(b) {
                    continue;
                }
                let t = w.mul(a, b);
                if i + j >= keep {
                    dropped |= !w.is_zero(&t);
                    continue;
                }
                out[i + j] = Some(match out[i + j].take() {
                    Some(acc) => w.add(&acc, &t),
                    None => t,
                });
            }
        }
        let coeffs = out.into_iter().map(|c| c.unwrap_or_else(|| w.zero())).collect();
        self.normalize(coeffs, truncated || dropped)
    }

    fn scale(&self, s: &WittScalar, x: &SigmaSeries) -> SigmaSeries {
        let w = &self.0.witt;
        self.normalize(x.coeffs.iter().map(|c| w.mul(s, c)).collect(), x.truncated)
    }

    fn is_zero(&self, x: &SigmaSeries) -> bool {
        let w = &self.0.witt;
        x.coeffs.iter().all(|c| w.is_zero(c))
    }

    fn vanishes_to(&self, x: &SigmaSeries, n: u32) -> bool {
        let w = &self.0.witt;
        x.coeffs.iter().all(|c| w.vanishes_to(c, n))
    }

    fn residue(&self, x: &SigmaSeries) -> WittScalar {
        let w = &self.0.witt;
        w.truncate(&self.coeff(x, 0), 1)
    }

    fn div_p_pow(&self, x: &SigmaSeries, k: u32) -> Result<SigmaSeries> {
        let w = &self.0.witt;
        let coeffs = x.coeffs.iter().map(|c| w.div_p_pow(c, k)).collect::<Result<Vec<_>>>()?;
        Ok(SigmaSeries { coeffs, truncated: x.truncated })
    }

    fn mul_p_pow(&self, x: &SigmaSeries, k: u32) -> SigmaSeries {
        let w = &self.0.witt;
        self.normalize(x.coeffs.iter().map(|c| w.mul_p_pow(c, k)).collect(), x.truncated)
    }

    /// `phi(sum c_i u^i) = sum sigma(c_i) u^{p i}`.
    fn frobenius(&self, x: &SigmaSeries) -> SigmaSeries {
        let w = &self.0.witt;
        let p = w.p() as usize;
        if x.coeffs.is_empty() {
            return x.clone();
        }
        let len = (x.coeffs.len() - 1) * p + 1;
        let mut coeffs = vec![w.zero(); len.min(self.0.n_u + 1)];
        let mut dropped = false;
        for (i, c) in x.coeffs.iter().enumerate() {
            if i * p < coeffs.len() {
                coeffs[i * p] = w.frobenius(c);
            } else {
                dropped |= !w.is_zero(c);
            }
        }
        self.normalize(coeffs, x.truncated || dropped)
    }

    fn truncate(&self, x: &SigmaSeries, prec: u32) -> SigmaSeries {
        let w = &self.0.witt;
        SigmaSeries { coeffs: x.coeffs.iter().map(|c| w.truncate(c, prec)).collect(), truncated: x.truncated }
    }

    fn min_prec(&self, x: &SigmaSeries) -> u32 {
        x.coeffs.iter().map(|c| c.prec()).min().unwrap_or(self.0.witt.work_prec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx() -> Sigma {
        let w = Witt::with_prec(3, &[0, 1], 10);
        Sigma::with_bound(&w, 30, &w.from_int(-1))
    }

    /// Schoolbook division of integer polynomials by `u - t`, the oracle for
    /// synthetic division.
    fn divide_by_linear(f: &[i64], t: i64) -> (Vec<i64>, i64) {
        let mut rem = f.to_vec();
        let mut q = vec![0; f.len().saturating_sub(1)];
        for k in (1..f.len()).rev() {
            q[k - 1] = rem[k];
            rem[k - 1] += t * rem[k];
            rem[k] = 0;
        }
        (q, rem[0])
    }

    #[test]
    fn weierstrass_examples() {
        let s = ctx();
        let w = s.witt().clone();
        let (q, r) = s.weierstrass_divide(&s.monomial(&w.one(), 3));
        let (oq, or) = divide_by_linear(&[0, 0, 0, 1], 3);
        assert_eq!(q, s.from_ints(&oq));
        assert_eq!(w.to_signed(&r), or as i128);
        assert_eq!(oq, vec![9, 3, 1]);
        assert_eq!(or, 27);

        let (q, r) = s.weierstrass_divide(&s.eisenstein());
        assert_eq!(q, s.one());
        assert!(w.is_zero(&r));

        let (q, r) = s.weierstrass_divide(&s.from_int(5));
        assert!(s.is_zero(&q));
        assert_eq!(w.to_signed(&r), 5);
    }

    #[test]
    fn frobenius_is_u_to_the_p() {
        let s = ctx();
        let x = s.from_ints(&[1, 2, 0, 4]);
        assert_eq!(s.frobenius(&x), s.from_ints(&[1, 0, 0, 2, 0, 0, 0, 0, 0, 4]));
        let big = s.monomial(&s.witt().one(), 11);
        assert!(s.frobenius(&big).truncated());
    }

    #[test]
    fn unit_inverse() {
        let s = ctx();
        let x = s.from_ints(&[2, 1, 7]);
        let y = s.invert(&x).unwrap();
        assert!(s.eq(&s.mul(&x, &y), &s.one()));
        assert!(s.invert(&s.u()).is_err());
    }

    proptest! {
        #[test]
        fn division_reconstructs(cs in proptest::collection::vec(-50i64..50, 1..12)) {
            let s = ctx();
            let x = s.from_ints(&cs);
            let (q, r) = s.weierstrass_divide(&x);
            let back = s.add(&s.mul(&q, &s.eisenstein()), &s.from_scalar(&r));
            prop_assert!(s.eq(&back, &x));
        }

        #[test]
        fn frobenius_multiplicative(a in proptest::collection::vec(-9i64..9, 1..6), b in proptest::collection::vec(-9i64..9, 1..6)) {
            let s = ctx();
            let (x, y) = (s.from_ints(&a), s.from_ints(&b));
            prop_assert!(s.eq(&s.frobenius(&s.mul(&x, &y)), &s.mul(&s.frobenius(&x), &s.frobenius(&y))));
        }
    }
}
