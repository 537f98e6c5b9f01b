//! The divided-power ring `S` in the basis `gamma_i = E(u)^i / i!`.
//!
//! Elements live in `S / (p^W, gamma_{>= N_gamma})`. The ideal spanned by the
//! dropped tail is stable under multiplication, so products and the
//! embedding of 𝔖 are exact in the quotient; `tail_dirty` remembers that a
//! nonzero tail was discarded, which matters for the maps that do not
//! preserve the ideal (`N`, `f_0`, and `phi` when `N_gamma` is small).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::params::{tail_valuation, vp_factorial, AmbientParams};
use crate::ring::Ring;
use crate::sigma::{Sigma, SigmaSeries};
use crate::witt::{Witt, WittScalar};

/// `sum_{i < N_gamma} b_i gamma_i`.
#[derive(Clone, PartialEq)]
pub struct PDElement {
    g: Vec<WittScalar>,
    tail_dirty: bool,
}

impl PDElement {
    pub fn gcoeffs(&self) -> &[WittScalar] {
        &self.g
    }

    pub fn tail_dirty(&self) -> bool {
        self.tail_dirty
    }
}

impl fmt::Debug for PDElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let last = self.g.iter().rposition(|c| c.coeffs().iter().any(|&x| x != 0));
        write!(f, "[")?;
        for (i, c) in self.g.iter().take(last.map_or(0, |l| l + 1)).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c:?}")?;
        }
        write!(f, "]{}", if self.tail_dirty { "+tail" } else { "" })
    }
}

struct PdData {
    witt: Witt,
    sigma: Sigma,
    n_gamma: usize,
    pa: WittScalar,
    /// `binom[n][k]` for `n < N_gamma`.
    binom: Vec<Vec<WittScalar>>,
    c: PDElement,
    /// `phi_tab[j][i] = phi(gamma_i) / p^j` for `i >= j`.
    phi_tab: Vec<Vec<PDElement>>,
    /// `(p a)^i / i!`.
    pa_divided: Vec<WittScalar>,
    /// `tail_valuation(p, N_gamma, j)`.
    tail_val: Vec<u32>,
}

/// Context for `S` attached to `E(u) = u + p a`.
#[derive(Clone)]
pub struct Pd(Arc<PdData>);

impl fmt::Debug for Pd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S mod gamma_{}", self.0.n_gamma)
    }
}

/// `(p^(n - v_p(n!)), unit part of n!)` as scalars.
fn factorial_split(w: &Witt, n: usize) -> (u32, WittScalar) {
    let p = w.p();
    let mut unit = w.one();
    for k in 1..=n as u64 {
        let mut m = k;
        while m % p == 0 {
            m /= p;
        }
        unit = w.mul_int(&unit, (m % w.p_pow(w.work_prec())) as i64);
    }
    (vp_factorial(p, n as u64) as u32, unit)
}

impl Pd {
    pub fn new(params: &AmbientParams, witt: &Witt, sigma: &Sigma) -> Self {
        let a = witt.from_ints(&params.a);
        Self::with_bound(witt, sigma, params.n_gamma, &a)
    }

    pub fn with_bound(witt: &Witt, sigma: &Sigma, n_gamma: usize, a: &WittScalar) -> Self {
        let w = witt;
        let p = w.p();
        let pa = w.mul_int(a, p as i64);
        let mut binom = vec![vec![w.one()]];
        for n in 1..n_gamma {
            let prev: &Vec<WittScalar> = &binom[n - 1];
            let row = (0..=n)
                .map(|k| match (k, k == n) {
                    (0, _) | (_, true) => w.one(),
                    _ => w.add(&prev[k - 1], &prev[k]),
                })
                .collect();
            binom.push(row);
        }
        let max_j = (p - 1) as usize;
        let tail_val = (0..=max_j).map(|j| tail_valuation(p, n_gamma, j as u32)).collect();
        let mut pa_divided = Vec::with_capacity(n_gamma);
        for i in 0..n_gamma {
            let (v, unit) = factorial_split(w, i);
            let num = w.mul_p_pow(&w.pow(a, i as u64), i as u32 - v);
            pa_divided.push(w.mul(&num, &w.invert(&unit).expect("factorial unit part")));
        }
        let mut pd = Pd(Arc::new(PdData {
            witt: w.clone(),
            sigma: sigma.clone(),
            n_gamma,
            pa,
            binom,
            c: PDElement { g: Vec::new(), tail_dirty: false },
            phi_tab: Vec::new(),
            pa_divided,
            tail_val,
        }));
        let c = pd.compute_c(a);
        let mut c_pows = Vec::with_capacity(n_gamma);
        let mut acc = pd.one();
        for _ in 0..n_gamma {
            c_pows.push(acc.clone());
            acc = pd.mul(&acc, &c);
        }
        let mut phi_tab = Vec::with_capacity(max_j + 1);
        for j in 0..=max_j {
            let row = (0..n_gamma)
                .map(|i| {
                    if i < j {
                        return pd.zero();
                    }
                    let (v, unit) = factorial_split(w, i);
                    let unit_inv = w.invert(&unit).expect("factorial unit part");
                    let shift = (i - j) as u32 - v;
                    let s = w.mul_p_pow(&unit_inv, shift);
                    pd.scale(&s, &c_pows[i])
                })
                .collect();
            phi_tab.push(row);
        }
        let data = Arc::get_mut(&mut pd.0).expect("fresh context");
        data.c = c;
        data.phi_tab = phi_tab;
        pd
    }

    /// `c = phi(E)/p = u^p/p + sigma(a)`, expanded from
    /// `u^p = sum_k C(p,k) k! (-p a)^(p-k) gamma_k` with the division by `p`
    /// carried out on integers so no precision is lost.
    fn compute_c(&self, a: &WittScalar) -> PDElement {
        let w = &self.0.witt;
        let p = w.p() as usize;
        let minus_a = w.neg(a);
        let mut g = vec![w.zero(); self.0.n_gamma];
        let mut dirty = false;
        for k in 0..=p {
            // C(p,k) k! p^(p-k) / p = (p-1)!/(p-k)! * p^(p-k) for k >= 1
            let (coef, shift) = if k == 0 {
                (w.one(), (p - 1) as u32)
            } else {
                let falling = ((p - k + 1)..p).fold(w.one(), |acc, m| w.mul_int(&acc, m as i64));
                (falling, (p - k) as u32)
            };
            let term = w.mul(&w.mul_p_pow(&coef, shift), &w.pow(&minus_a, (p - k) as u64));
            if k < g.len() {
                g[k] = w.add(&g[k], &term);
            } else {
                dirty |= !w.is_zero(&term);
            }
        }
        g[0] = w.add(&g[0], &w.frobenius(a));
        PDElement { g, tail_dirty: dirty }
    }

    pub fn n_gamma(&self) -> usize {
        self.0.n_gamma
    }

    pub fn sigma(&self) -> &Sigma {
        &self.0.sigma
    }

    pub fn pa(&self) -> &WittScalar {
        &self.0.pa
    }

    /// The unit `c = phi(E(u))/p`.
    pub fn c(&self) -> &PDElement {
        &self.0.c
    }

    pub fn from_gcoeffs(&self, mut g: Vec<WittScalar>) -> PDElement {
        let w = &self.0.witt;
        let n = self.0.n_gamma;
        let dirty = g.len() > n && g[n..].iter().any(|c| !w.is_zero(c));
        g.resize(n, w.zero());
        PDElement { g, tail_dirty: dirty }
    }

    pub fn from_ints(&self, cs: &[i64]) -> PDElement {
        let w = &self.0.witt;
        self.from_gcoeffs(cs.iter().map(|&c| w.from_int(c)).collect())
    }

    /// `s gamma_i`.
    pub fn gamma_scaled(&self, s: &WittScalar, i: usize) -> PDElement {
        let mut x = self.zero();
        if i < self.0.n_gamma {
            x.g[i] = s.clone();
        } else {
            x.tail_dirty = !self.0.witt.is_zero(s);
        }
        x
    }

    pub fn gamma(&self, i: usize) -> PDElement {
        self.gamma_scaled(&self.0.witt.one(), i)
    }

    pub fn mark_dirty(&self, mut x: PDElement) -> PDElement {
        x.tail_dirty = true;
        x
    }

    /// Embedding of 𝔖, refusing inputs whose degree reaches `N_gamma`.
    pub fn embed_sigma(&self, s: &SigmaSeries) -> Result<PDElement> {
        if let Some(deg) = s.degree() {
            if deg >= self.0.n_gamma {
                return Err(Error::DegreeOverflow { degree: deg, bound: self.0.n_gamma });
            }
        }
        Ok(self.embed_truncating(s))
    }

    /// Embedding of 𝔖 into the quotient by `gamma_{>= N_gamma}`, exact in that
    /// quotient for any degree. Horner's rule with
    /// `u gamma_k = (k+1) gamma_{k+1} - p a gamma_k`.
    pub fn embed_truncating(&self, s: &SigmaSeries) -> PDElement {
        let w = &self.0.witt;
        let mut acc = self.zero();
        for c in s.coeffs().iter().rev() {
            acc = self.mul_u(&acc);
            acc.g[0] = w.add(&acc.g[0], c);
        }
        if s.truncated() {
            // u^n for n >= N_u has gamma_{< N_gamma} coefficients in p^{n - N_gamma + 1}
            let cap = (self.0.sigma.n_u() + 1).saturating_sub(self.0.n_gamma) as u32;
            acc = self.truncate(&acc, cap);
            acc.tail_dirty = true;
        }
        acc
    }

    pub fn mul_u(&self, x: &PDElement) -> PDElement {
        let w = &self.0.witt;
        let n = self.0.n_gamma;
        let mut g = Vec::with_capacity(n);
        for k in 0..n {
            let mut t = w.neg(&w.mul(&self.0.pa, &x.g[k]));
            if k > 0 {
                t = w.add(&t, &w.mul_int(&x.g[k - 1], k as i64));
            }
            g.push(t);
        }
        let dirty = x.tail_dirty || !is_exact_zero(w, &x.g[n - 1]);
        PDElement { g, tail_dirty: dirty }
    }

    pub fn u(&self) -> PDElement {
        self.mul_u(&self.one())
    }

    /// Largest `j` with `b_0 = ... = b_{j-1} = 0` at precision.
    pub fn fil_valuation(&self, x: &PDElement) -> usize {
        let w = &self.0.witt;
        x.g.iter().position(|c| !w.is_zero(c)).unwrap_or(self.0.n_gamma)
    }

    /// `phi_j = phi / p^j` on `Fil^j S`.
    pub fn phi_j(&self, x: &PDElement, j: u32) -> Result<PDElement> {
        let w = &self.0.witt;
        let ju = j as usize;
        if ju >= self.0.phi_tab.len() {
            return Err(Error::InvalidParams(format!("phi_{j} needs j <= p - 1")));
        }
        let got = self.fil_valuation(x);
        if got < ju {
            return Err(Error::NotInFil { needed: ju, got });
        }
        let mut acc = self.zero();
        let mut cap = w.work_prec();
        for (i, b) in x.g.iter().enumerate() {
            if i < ju {
                // b is zero at precision b.prec; phi(gamma_i) has valuation i
                cap = cap.min((b.prec() + i as u32).saturating_sub(j));
                continue;
            }
            if is_exact_zero(w, b) {
                continue;
            }
            acc = self.add(&acc, &self.scale(b, &self.0.phi_tab[ju][i]));
        }
        if x.tail_dirty {
            cap = cap.min(self.0.tail_val[ju]);
            acc.tail_dirty = true;
        }
        Ok(self.truncate(&acc, cap))
    }

    /// The derivation with `N(u) = -u`:
    /// `N(gamma_i) = -i gamma_i + p a gamma_{i-1}`.
    pub fn n_op(&self, x: &PDElement) -> PDElement {
        let w = &self.0.witt;
        let n = self.0.n_gamma;
        let mut g = Vec::with_capacity(n);
        for k in 0..n {
            let mut t = w.neg(&w.mul_int(&x.g[k], k as i64));
            if k + 1 < n {
                t = w.add(&t, &w.mul(&self.0.pa, &x.g[k + 1]));
            }
            g.push(t);
        }
        if x.tail_dirty {
            // the unknown b_{N_gamma} feeds p a b_{N_gamma} into the last slot
            g[n - 1] = w.truncate(&g[n - 1], 1);
        }
        PDElement { g, tail_dirty: x.tail_dirty }
    }

    /// `f_0`: the `W(k)`-algebra map with `u -> 0`.
    pub fn eval_f0(&self, x: &PDElement) -> WittScalar {
        let w = &self.0.witt;
        let mut acc = w.zero();
        for (b, t) in x.g.iter().zip(&self.0.pa_divided) {
            if !is_exact_zero(w, b) {
                acc = w.add(&acc, &w.mul(b, t));
            }
        }
        if x.tail_dirty {
            acc = w.truncate(&acc, self.0.tail_val[0]);
        }
        acc
    }

    /// `f_pi`: `u -> pi = -p a`, which kills every `gamma_i` with `i >= 1`.
    pub fn eval_fpi(&self, x: &PDElement) -> WittScalar {
        x.g[0].clone()
    }

    /// Coordinates in the basis `u^n / n!`:
    /// `c_n = sum_{k >= n} b_k (p a)^(k-n) / (k-n)!`.
    pub fn u_divided_coeffs(&self, x: &PDElement) -> Vec<WittScalar> {
        let w = &self.0.witt;
        let n_g = self.0.n_gamma;
        (0..n_g)
            .map(|n| {
                let mut acc = w.zero();
                for k in n..n_g {
                    if !is_exact_zero(w, &x.g[k]) {
                        acc = w.add(&acc, &w.mul(&x.g[k], &self.0.pa_divided[k - n]));
                    }
                }
                if x.tail_dirty {
                    acc = w.truncate(&acc, tail_valuation(w.p(), n_g - n, 0));
                }
                acc
            })
            .collect()
    }

    /// Membership in `u^p S`: with `x = sum c_n u^n/n!`, require `c_n = 0`
    /// for `n < p` and `n!/(n-p)!` dividing `c_n` otherwise, as far as the
    /// known digits allow.
    pub fn in_up_s(&self, x: &PDElement) -> bool {
        let w = &self.0.witt;
        let p = w.p();
        self.u_divided_coeffs(x).iter().enumerate().all(|(n, c)| {
            let need = if (n as u64) < p {
                c.prec()
            } else {
                (vp_factorial(p, n as u64) - vp_factorial(p, n as u64 - p)) as u32
            };
            w.vanishes_to(c, need.min(c.prec()))
        })
    }

    /// `E(u) x`.
    pub fn mul_e(&self, x: &PDElement) -> PDElement {
        self.mul(&self.gamma(1), x)
    }

    pub fn eisenstein_pow(&self, n: u32) -> PDElement {
        let mut numer = self.one();
        let e = self.gamma(1);
        for _ in 0..n {
            numer = self.mul(&numer, &e);
        }
        numer
    }
}

fn is_exact_zero(w: &Witt, x: &WittScalar) -> bool {
    x.prec() >= w.work_prec() && w.is_zero(x)
}

impl Ring for Pd {
    type Elem = PDElement;

    fn witt(&self) -> &Witt {
        &self.0.witt
    }

    fn zero(&self) -> PDElement {
        PDElement { g: vec![self.0.witt.zero(); self.0.n_gamma], tail_dirty: false }
    }

    fn one(&self) -> PDElement {
        self.gamma(0)
    }

    fn from_scalar(&self, s: &WittScalar) -> PDElement {
        self.gamma_scaled(s, 0)
    }

    fn add(&self, x: &PDElement, y: &PDElement) -> PDElement {
        let w = &self.0.witt;
        PDElement {
            g: x.g.iter().zip(&y.g).map(|(a, b)| w.add(a, b)).collect(),
            tail_dirty: x.tail_dirty || y.tail_dirty,
        }
    }

    fn neg(&self, x: &PDElement) -> PDElement {
        let w = &self.0.witt;
        PDElement { g: x.g.iter().map(|a| w.neg(a)).collect(), tail_dirty: x.tail_dirty }
    }

    fn sub(&self, x: &PDElement, y: &PDElement) -> PDElement {
        let w = &self.0.witt;
        PDElement {
            g: x.g.iter().zip(&y.g).map(|(a, b)| w.sub(a, b)).collect(),
            tail_dirty: x.tail_dirty || y.tail_dirty,
        }
    }

    /// `gamma_i gamma_j = C(i+j, i) gamma_{i+j}`.
    fn mul(&self, x: &PDElement, y: &PDElement) -> PDElement {
        let w = &self.0.witt;
        let n = self.0.n_gamma;
        let xs: Vec<usize> = (0..n).filter(|&i| !is_exact_zero(w, &x.g[i])).collect();
        let ys: Vec<usize> = (0..n).filter(|&j| !is_exact_zero(w, &y.g[j])).collect();
        let mut dirty = (x.tail_dirty && !ys.is_empty()) || (y.tail_dirty && !xs.is_empty());
        let mut g = vec![w.zero(); n];
        for &i in &xs {
            for &j in &ys {
                if i + j >= n {
                    dirty = true;
                    continue;
                }
                let mut t = w.mul(&x.g[i], &y.g[j]);
                if i > 0 && j > 0 {
                    t = w.mul(&t, &self.0.binom[i + j][i]);
                }
                g[i + j] = w.add(&g[i + j], &t);
            }
        }
        PDElement { g, tail_dirty: dirty }
    }

    fn scale(&self, s: &WittScalar, x: &PDElement) -> PDElement {
        let w = &self.0.witt;
        PDElement { g: x.g.iter().map(|b| w.mul(s, b)).collect(), tail_dirty: x.tail_dirty }
    }

    fn is_zero(&self, x: &PDElement) -> bool {
        let w = &self.0.witt;
        x.g.iter().all(|b| w.is_zero(b))
    }

    fn vanishes_to(&self, x: &PDElement, n: u32) -> bool {
        let w = &self.0.witt;
        x.g.iter().all(|b| w.vanishes_to(b, n))
    }

    /// Reduction modulo the maximal ideal `(p, Fil^1 S)`.
    fn residue(&self, x: &PDElement) -> WittScalar {
        self.0.witt.truncate(&x.g[0], 1)
    }

    fn div_p_pow(&self, x: &PDElement, k: u32) -> Result<PDElement> {
        let w = &self.0.witt;
        let g = x.g.iter().map(|b| w.div_p_pow(b, k)).collect::<Result<Vec<_>>>()?;
        Ok(PDElement { g, tail_dirty: x.tail_dirty })
    }

    fn mul_p_pow(&self, x: &PDElement, k: u32) -> PDElement {
        let w = &self.0.witt;
        PDElement { g: x.g.iter().map(|b| w.mul_p_pow(b, k)).collect(), tail_dirty: x.tail_dirty }
    }

    fn frobenius(&self, x: &PDElement) -> PDElement {
        self.phi_j(x, 0).expect("phi_0 is total")
    }

    fn truncate(&self, x: &PDElement, prec: u32) -> PDElement {
        let w = &self.0.witt;
        PDElement { g: x.g.iter().map(|b| w.truncate(b, prec)).collect(), tail_dirty: x.tail_dirty }
    }

    fn min_prec(&self, x: &PDElement) -> u32 {
        x.g.iter().map(|b| b.prec()).min().unwrap_or(self.0.witt.work_prec())
    }
}
