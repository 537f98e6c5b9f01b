//! Ambient parameters: the prime, the residue degree, precisions, the Hodge
//! bound `r` and the unit `a` with `E(u) = u + p a`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest residue modulus that still leaves room for `u128` products.
pub const MODULUS_BITS: u32 = 62;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmbientParams {
    pub p: u64,
    pub f: usize,
    /// Monic lift of an irreducible polynomial of degree `f` over F_p,
    /// constant term first (length `f + 1`).
    pub m_coeffs: Vec<u64>,
    #[serde(rename = "N_p")]
    pub n_p: u32,
    #[serde(rename = "N_gamma")]
    pub n_gamma: usize,
    pub r: u32,
    #[serde(with = "scalar_ints")]
    pub a: Vec<i64>,
    pub headroom: u32,
}

impl AmbientParams {
    /// Defaults: `f = 1`, `a = -1` (so `E = u - p`), headroom and `N_gamma`
    /// sized for the section iteration.
    pub fn new(p: u64, r: u32, n_p: u32) -> Result<Self> {
        Self::with_residue_degree(p, 1, r, n_p)
    }

    pub fn with_residue_degree(p: u64, f: usize, r: u32, n_p: u32) -> Result<Self> {
        check_prime(p)?;
        if f == 0 {
            return Err(Error::InvalidParams("residue degree must be >= 1".into()));
        }
        let m_coeffs = if f == 1 {
            vec![0, 1]
        } else {
            first_irreducible(p, f)
        };
        let headroom = default_headroom(p, r, n_p)?;
        let n_gamma = default_n_gamma(p, n_p + headroom);
        let mut a = vec![0; f];
        a[0] = -1;
        let params = AmbientParams { p, f, m_coeffs, n_p, n_gamma, r, a, headroom };
        params.validate()?;
        Ok(params)
    }

    /// Same prime and precision, different `a`.
    pub fn with_a(mut self, a: Vec<i64>) -> Result<Self> {
        self.a = a;
        self.validate()?;
        Ok(self)
    }

    pub fn with_headroom(mut self, headroom: u32) -> Result<Self> {
        self.headroom = headroom;
        self.n_gamma = self.n_gamma.max(default_n_gamma(self.p, self.n_p + headroom));
        self.validate()?;
        Ok(self)
    }

    pub fn with_n_gamma(mut self, n_gamma: usize) -> Result<Self> {
        self.n_gamma = n_gamma;
        self.validate()?;
        Ok(self)
    }

    /// Internal working precision `N_p + headroom`.
    pub fn work_prec(&self) -> u32 {
        self.n_p + self.headroom
    }

    /// u-adic truncation bound for the power-series ring.
    pub fn n_u(&self) -> usize {
        self.p as usize * self.n_gamma
    }

    pub fn validate(&self) -> Result<()> {
        check_prime(self.p)?;
        let bad = |s: String| Err(Error::InvalidParams(s));
        if self.f == 0 || self.m_coeffs.len() != self.f + 1 || self.m_coeffs[self.f] != 1 {
            return bad(format!("m_coeffs must be monic of degree f = {}", self.f));
        }
        if self.m_coeffs.iter().any(|&c| c >= self.p) {
            return bad("m_coeffs must be reduced mod p".into());
        }
        if self.f > 1 && !is_irreducible_mod_p(self.p, &self.m_coeffs) {
            return bad("m_coeffs is not irreducible mod p".into());
        }
        if self.r as u64 > self.p - 1 {
            return bad(format!("r = {} exceeds p - 1", self.r));
        }
        if self.n_p == 0 || self.n_gamma == 0 {
            return bad("precisions must be positive".into());
        }
        if self.a.len() != self.f {
            return bad("a must have f coefficients".into());
        }
        if self.a.iter().all(|&c| c.rem_euclid(self.p as i64) == 0) {
            return bad("a must be a unit".into());
        }
        // N_gamma (p-2)/(p-1) >= N_p + r
        let lhs = self.n_gamma as u64 * (self.p - 2);
        let rhs = (self.n_p as u64 + self.r as u64) * (self.p - 1);
        if lhs < rhs {
            return bad(format!(
                "N_gamma = {} too small: need N_gamma (p-2)/(p-1) >= N_p + r",
                self.n_gamma
            ));
        }
        let w = self.work_prec();
        if !fits_modulus(self.p, w) {
            return Err(Error::PrecisionOverflow(w));
        }
        Ok(())
    }
}

fn check_prime(p: u64) -> Result<()> {
    if p == 2 {
        return Err(Error::EvenPrime);
    }
    if p < 3 || (2..).take_while(|d: &u64| d * d <= p).any(|d| p % d == 0) {
        return Err(Error::InvalidParams(format!("{p} is not an odd prime")));
    }
    Ok(())
}

pub fn fits_modulus(p: u64, w: u32) -> bool {
    let mut m: u128 = 1;
    for _ in 0..w {
        m *= p as u128;
        if m >= 1u128 << MODULUS_BITS {
            return false;
        }
    }
    true
}

fn max_prec(p: u64) -> u32 {
    let mut w = 0;
    while fits_modulus(p, w + 1) {
        w += 1;
    }
    w
}

/// `v_p(n!)` by Legendre's formula.
pub fn vp_factorial(p: u64, n: u64) -> u64 {
    let mut v = 0;
    let mut q = n / p;
    while q > 0 {
        v += q;
        q /= p;
    }
    v
}

/// Smallest `p`-adic valuation of `phi(gamma_i) / p^j = p^(i-j) c^i / i!`
/// over all `i >= n`: the precision lost when a tail `gamma_{>= n}` is
/// dropped before applying the divided Frobenius `phi_j`.
pub fn tail_valuation(p: u64, n: usize, j: u32) -> u32 {
    // i - v_p(i!) grows like i (p-2)/(p-1); scanning a window of p^2 past n
    // catches every dip caused by high powers of p.
    let reach = n as u64 + (p * p).max(64);
    (n as u64..=reach)
        .map(|i| i - vp_factorial(p, i))
        .min()
        .unwrap_or(0)
        .saturating_sub(j as u64) as u32
}

/// First `n` with `p + p^2 + ... + p^(n+1) - r (n+1) >= N_p`.
pub fn rate_bound(p: u64, r: u32, n_p: u32) -> usize {
    let mut sum: i128 = 0;
    let mut pk: i128 = 1;
    for n in 0..64usize {
        pk *= p as i128;
        sum += pk;
        if sum - (r as i128) * (n as i128 + 1) >= n_p as i128 {
            return n;
        }
    }
    64
}

/// Headroom for the section iteration: each step divides by `p^r`, and at
/// most `2 * rate_bound + 2` steps are taken before the certificate.
fn default_headroom(p: u64, r: u32, n_p: u32) -> Result<u32> {
    let steps = 2 * rate_bound(p, r, n_p) as u32 + 4;
    let wanted = r * steps + 2;
    let cap = max_prec(p);
    if n_p >= cap {
        return Err(Error::PrecisionOverflow(n_p));
    }
    let minimal = r * (rate_bound(p, r, n_p) as u32 + 2) + 1;
    let headroom = wanted.min(cap - n_p);
    if headroom < minimal {
        return Err(Error::PrecisionOverflow(n_p + minimal));
    }
    Ok(headroom)
}

/// Smallest `N_gamma` whose dropped tail lies in `p^w S` under `phi`.
pub fn default_n_gamma(p: u64, w: u32) -> usize {
    let mut n = 1;
    while tail_valuation(p, n, 0) < w {
        n += 1;
    }
    n
}

// --- polynomials over F_p, constant term first -------------------------

fn trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut a = trim(a.to_vec());
    let b = trim(b.to_vec());
    let lead_inv = pow_mod(*b.last().unwrap(), p - 2, p);
    while a.len() >= b.len() {
        let shift = a.len() - b.len();
        let q = a.last().unwrap() * lead_inv % p;
        for (i, &bc) in b.iter().enumerate() {
            a[i + shift] = (a[i + shift] + p - q * bc % p) % p;
        }
        a = trim(a);
    }
    a
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn digits(mut n: u64, p: u64, len: usize) -> Vec<u64> {
    (0..len)
        .map(|_| {
            let d = n % p;
            n /= p;
            d
        })
        .collect()
}

/// Brute-force irreducibility: no monic factor of degree `1..=deg/2`.
pub fn is_irreducible_mod_p(p: u64, m: &[u64]) -> bool {
    let deg = m.len() - 1;
    for k in 1..=deg / 2 {
        for n in 0..p.pow(k as u32) {
            let mut g = digits(n, p, k);
            g.push(1);
            if poly_rem(p, m, &g).is_empty() {
                return false;
            }
        }
    }
    true
}

/// First monic irreducible of degree `f` when enumerating lower coefficients
/// as base-`p` digits, constant term least significant.
pub fn first_irreducible(p: u64, f: usize) -> Vec<u64> {
    (0..p.pow(f as u32))
        .map(|n| {
            let mut m = digits(n, p, f);
            m.push(1);
            m
        })
        .find(|m| is_irreducible_mod_p(p, m))
        .expect("irreducible polynomials exist in every degree")
}

mod scalar_ints {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Repr {
        coeffs: Vec<String>,
        #[serde(default)]
        prec: Option<u32>,
    }

    pub fn serialize<S: Serializer>(a: &[i64], s: S) -> Result<S::Ok, S::Error> {
        Repr { coeffs: a.iter().map(|c| c.to_string()).collect(), prec: None }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<i64>, D::Error> {
        let repr = Repr::deserialize(d)?;
        repr.coeffs
            .iter()
            .map(|c| c.parse::<i64>().map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_satisfy_invariants() {
        for (p, r) in [(3, 0), (3, 1), (3, 2), (5, 0), (5, 3), (5, 4), (7, 5)] {
            let params = AmbientParams::new(p, r, 6).unwrap();
            params.validate().unwrap();
            assert!(tail_valuation(p, params.n_gamma, 0) >= params.work_prec());
        }
    }

    #[test]
    fn rejects_even_and_composite() {
        assert_eq!(AmbientParams::new(2, 1, 6), Err(Error::EvenPrime));
        assert!(AmbientParams::new(9, 1, 6).is_err());
        assert!(AmbientParams::new(3, 3, 6).is_err());
    }

    #[test]
    fn rate_bound_values() {
        // 3 - 2 = 1 < 6, 3 + 9 - 4 = 8 >= 6
        assert_eq!(rate_bound(3, 2, 6), 1);
        assert_eq!(rate_bound(5, 0, 5), 0);
        assert_eq!(rate_bound(5, 3, 6), 1);
    }

    #[test]
    fn irreducible_search() {
        assert_eq!(first_irreducible(3, 2), vec![1, 0, 1]);
        assert!(is_irreducible_mod_p(5, &first_irreducible(5, 3)));
        assert!(!is_irreducible_mod_p(5, &[4, 0, 1]));
    }

    #[test]
    fn n_gamma_invariant_enforced() {
        let params = AmbientParams::new(3, 2, 6).unwrap();
        assert!(params.with_n_gamma(15).is_err());
    }
}
