//! The common interface of the three coefficient rings `W(k)`, 𝔖 and `S`.

use std::fmt;

use crate::error::{Error, Result};
use crate::witt::{Witt, WittScalar};

/// A local `W(k)`-algebra with a Frobenius lift, computed at finite precision.
///
/// `residue` is the reduction to the residue field `k` (as a scalar of
/// precision 1); an element is a unit exactly when its residue is nonzero.
pub trait Ring: Clone + Send + Sync {
    type Elem: Clone + fmt::Debug + PartialEq + Send + Sync;

    fn witt(&self) -> &Witt;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_scalar(&self, s: &WittScalar) -> Self::Elem;
    fn add(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn neg(&self, x: &Self::Elem) -> Self::Elem;
    fn mul(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn scale(&self, s: &WittScalar, x: &Self::Elem) -> Self::Elem;
    /// Zero at the element's own precision.
    fn is_zero(&self, x: &Self::Elem) -> bool;
    /// Known to lie in `p^n` times the ring.
    fn vanishes_to(&self, x: &Self::Elem, n: u32) -> bool;
    fn residue(&self, x: &Self::Elem) -> WittScalar;
    fn div_p_pow(&self, x: &Self::Elem, k: u32) -> Result<Self::Elem>;
    fn mul_p_pow(&self, x: &Self::Elem, k: u32) -> Self::Elem;
    /// `sigma` on `W(k)`, `u -> u^p` on 𝔖, `phi` on `S`.
    fn frobenius(&self, x: &Self::Elem) -> Self::Elem;
    fn truncate(&self, x: &Self::Elem, prec: u32) -> Self::Elem;
    /// Smallest coefficient precision.
    fn min_prec(&self, x: &Self::Elem) -> u32;

    fn sub(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        self.add(x, &self.neg(y))
    }

    fn eq(&self, x: &Self::Elem, y: &Self::Elem) -> bool {
        self.is_zero(&self.sub(x, y))
    }

    fn is_unit(&self, x: &Self::Elem) -> bool {
        self.witt().is_unit(&self.residue(x))
    }

    fn from_int(&self, n: i64) -> Self::Elem {
        self.from_scalar(&self.witt().from_int(n))
    }

    /// Newton iteration `z <- z + z (1 - x z)` from the residue inverse.
    fn invert(&self, x: &Self::Elem) -> Result<Self::Elem> {
        if !self.is_unit(x) {
            return Err(Error::NotAUnit);
        }
        let w = self.witt();
        let z0 = w.lift(&w.invert(&self.residue(x))?);
        let mut z = self.from_scalar(&z0);
        let one = self.one();
        for _ in 0..64 {
            let e = self.sub(&one, &self.mul(x, &z));
            if self.is_zero(&e) {
                return Ok(z);
            }
            z = self.add(&z, &self.mul(&z, &e));
        }
        Err(Error::NotInvertible)
    }
}

impl Ring for Witt {
    type Elem = WittScalar;

    fn witt(&self) -> &Witt {
        self
    }
    fn zero(&self) -> WittScalar {
        Witt::zero(self)
    }
    fn one(&self) -> WittScalar {
        Witt::one(self)
    }
    fn from_scalar(&self, s: &WittScalar) -> WittScalar {
        s.clone()
    }
    fn add(&self, x: &WittScalar, y: &WittScalar) -> WittScalar {
        Witt::add(self, x, y)
    }
    fn neg(&self, x: &WittScalar) -> WittScalar {
        Witt::neg(self, x)
    }
    fn sub(&self, x: &WittScalar, y: &WittScalar) -> WittScalar {
        Witt::sub(self, x, y)
    }
    fn mul(&self, x: &WittScalar, y: &WittScalar) -> WittScalar {
        Witt::mul(self, x, y)
    }
    fn scale(&self, s: &WittScalar, x: &WittScalar) -> WittScalar {
        Witt::mul(self, s, x)
    }
    fn is_zero(&self, x: &WittScalar) -> bool {
        Witt::is_zero(self, x)
    }
    fn vanishes_to(&self, x: &WittScalar, n: u32) -> bool {
        Witt::vanishes_to(self, x, n)
    }
    fn residue(&self, x: &WittScalar) -> WittScalar {
        Witt::truncate(self, x, 1)
    }
    fn div_p_pow(&self, x: &WittScalar, k: u32) -> Result<WittScalar> {
        Witt::div_p_pow(self, x, k)
    }
    fn mul_p_pow(&self, x: &WittScalar, k: u32) -> WittScalar {
        Witt::mul_p_pow(self, x, k)
    }
    fn frobenius(&self, x: &WittScalar) -> WittScalar {
        Witt::frobenius(self, x)
    }
    fn truncate(&self, x: &WittScalar, prec: u32) -> WittScalar {
        Witt::truncate(self, x, prec)
    }
    fn min_prec(&self, x: &WittScalar) -> u32 {
        x.prec()
    }
    fn is_unit(&self, x: &WittScalar) -> bool {
        Witt::is_unit(self, x)
    }
    fn invert(&self, x: &WittScalar) -> Result<WittScalar> {
        Witt::invert(self, x)
    }
}
