//! Strongly divisible Breuil modules over `S`, presented by the matrix of
//! `phi`, an optional monodromy matrix and an adapted filtration.
//!
//! With reference basis `f`, `Fil^r` is `{ f C y : y_i in Fil^{r - r_i} S }`.
//! Its generators are `gamma_{k_i} (f C)_i` with `k_i = r - r_i`, and
//! `phi_r = phi / p^r` sends them to the columns of
//!
//! ```text
//! G = Phi phi(C) diag(phi_{k_i}(gamma_{k_i}) / p^{r_i}).
//! ```

use crate::ambient::Ambient;
use crate::error::{Error, Result};
use crate::fl::check_jumps;
use crate::matrix::{RingMatrix, Verdict};
use crate::pd::PDElement;
use crate::ring::Ring;

#[derive(Clone, Debug, PartialEq)]
pub struct BreuilModule {
    /// `phi(f) = f Phi`.
    pub phi: RingMatrix<PDElement>,
    /// `N(f x) = f (Nmat x + N_S(x))`.
    pub nmat: Option<RingMatrix<PDElement>>,
    pub c: RingMatrix<PDElement>,
    pub jumps: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub strongly_divisible: bool,
    /// `None` when the module carries no monodromy.
    pub griffiths: Option<bool>,
    pub diagram: Option<bool>,
    pub cris: Option<bool>,
}

impl ValidationReport {
    pub fn all_true(&self) -> bool {
        self.strongly_divisible
            && self.griffiths.unwrap_or(false)
            && self.diagram.unwrap_or(false)
            && self.cris.unwrap_or(false)
    }
}

#[derive(Clone, Debug)]
pub struct BreuilClass {
    pub etale: bool,
    pub multiplicative: bool,
    pub unipotent: Verdict<PDElement>,
}

impl BreuilModule {
    pub fn d(&self) -> usize {
        self.jumps.len()
    }

    pub fn check(&self, amb: &Ambient) -> Result<()> {
        check_jumps(&self.jumps, amb.r(), false)?;
        let d = self.d();
        let square = |m: &RingMatrix<PDElement>| m.rows() == d && m.cols() == d && m.denom_exp == 0;
        if !square(&self.phi) || !square(&self.c) || self.nmat.as_ref().is_some_and(|n| !square(n)) {
            return Err(Error::Shape(format!("Breuil matrices must be integral {d}x{d}")));
        }
        if !self.c.is_invertible(&amb.pd) {
            return Err(Error::NotInvertible);
        }
        Ok(())
    }

    /// `k_i = r - r_i`.
    fn depths(&self, amb: &Ambient) -> Vec<u32> {
        self.jumps.iter().map(|&j| amb.r() - j).collect()
    }

    fn adapted_coords(&self, amb: &Ambient, x: &[PDElement]) -> Result<Vec<PDElement>> {
        self.c.invert(&amb.pd)?.apply(&amb.pd, x)
    }

    /// `N` on coordinates in the reference basis.
    pub fn monodromy(&self, amb: &Ambient, x: &[PDElement]) -> Result<Vec<PDElement>> {
        let pd = &amb.pd;
        let nmat = self.nmat.as_ref().ok_or(Error::NotCrystalline)?;
        let nx = nmat.apply(pd, x)?;
        Ok(nx.iter().zip(x).map(|(a, b)| pd.add(a, &pd.n_op(b))).collect())
    }

    /// `Phi phi(C)` with column `i` divided by `p^{r_i}`.
    fn scaled_frobenius_columns(&self, amb: &Ambient) -> Result<RingMatrix<PDElement>> {
        let pd = &amb.pd;
        let mut m = self.phi.mul(pd, &self.c.frobenius(pd))?;
        for (i, &ri) in self.jumps.iter().enumerate() {
            for row in 0..m.rows() {
                let x = pd.div_p_pow(m.get(row, i), ri)?;
                m.set(row, i, x);
            }
        }
        Ok(m)
    }

    /// `phi_r` of the generators `gamma_{k_i} (f C)_i`, as columns.
    pub fn generator_images(&self, amb: &Ambient) -> Result<RingMatrix<PDElement>> {
        let pd = &amb.pd;
        let mut g = self.scaled_frobenius_columns(amb)?;
        for (i, k) in self.depths(amb).into_iter().enumerate() {
            let t = pd.phi_j(&pd.gamma(k as usize), k)?;
            for row in 0..g.rows() {
                let x = pd.mul(g.get(row, i), &t);
                g.set(row, i, x);
            }
        }
        Ok(g)
    }

    /// The generators of `Fil^r` as coordinate vectors.
    pub fn fil_r_generators(&self, amb: &Ambient) -> Vec<Vec<PDElement>> {
        let pd = &amb.pd;
        self.depths(amb)
            .into_iter()
            .enumerate()
            .map(|(i, k)| {
                let gk = pd.gamma(k as usize);
                self.c.column(i).iter().map(|x| pd.mul(&gk, x)).collect()
            })
            .collect()
    }
}

/// Component `i` of `C^{-1} x` lies in `Fil^{max(0, r - r_i)} S`.
pub fn fil_membership(amb: &Ambient, b: &BreuilModule, x: &[PDElement]) -> Result<bool> {
    fil_lower(amb, b, amb.r(), x)
}

/// `Fil^i`: component `j` of `C^{-1} x` lies in `Fil^{max(0, i - r_j)} S`.
pub fn fil_lower(amb: &Ambient, b: &BreuilModule, i: u32, x: &[PDElement]) -> Result<bool> {
    let pd = &amb.pd;
    let y = b.adapted_coords(amb, x)?;
    Ok(y.iter().zip(&b.jumps).all(|(yj, &rj)| pd.fil_valuation(yj) >= i.saturating_sub(rj) as usize))
}

/// `phi_r(x) = Phi phi(C) (phi_{k_i}(y_i) / p^{r_i})_i` for `x = C y`.
pub fn phi_r_apply(amb: &Ambient, b: &BreuilModule, x: &[PDElement]) -> Result<Vec<PDElement>> {
    let pd = &amb.pd;
    let y = b.adapted_coords(amb, x)?;
    let mut z = Vec::with_capacity(y.len());
    for (yi, k) in y.iter().zip(b.depths(amb)) {
        z.push(pd.phi_j(yi, k)?);
    }
    b.scaled_frobenius_columns(amb)?.apply(pd, &z)
}

pub fn breuil_validate(amb: &Ambient, b: &BreuilModule) -> Result<ValidationReport> {
    b.check(amb)?;
    let pd = &amb.pd;
    let strongly_divisible = match b.generator_images(amb) {
        Ok(g) => g.is_invertible(pd),
        Err(Error::NotDivisible(_)) => false,
        Err(e) => return Err(e),
    };
    let Some(nmat) = &b.nmat else {
        return Ok(ValidationReport { strongly_divisible, griffiths: None, diagram: None, cris: None });
    };
    let cris = nmat.entries().iter().all(|x| amb.witt.is_zero(&pd.eval_f0(x)));
    let mut griffiths = true;
    let mut diagram = true;
    for y in b.fil_r_generators(amb) {
        let eny: Vec<PDElement> = b.monodromy(amb, &y)?.iter().map(|x| pd.mul_e(x)).collect();
        if !fil_membership(amb, b, &eny)? {
            griffiths = false;
            diagram = false;
            continue;
        }
        // phi_r(E N(y)) = c N(phi_r(y))
        let lhs = match phi_r_apply(amb, b, &eny) {
            Ok(v) => v,
            Err(Error::NotDivisible(_)) => {
                diagram = false;
                continue;
            }
            Err(e) => return Err(e),
        };
        let rhs: Vec<PDElement> = match phi_r_apply(amb, b, &y) {
            Ok(v) => b.monodromy(amb, &v)?.iter().map(|x| pd.mul(pd.c(), x)).collect(),
            Err(Error::NotDivisible(_)) => {
                diagram = false;
                continue;
            }
            Err(e) => return Err(e),
        };
        if !lhs.iter().zip(&rhs).all(|(l, r)| pd.eq(l, r)) {
            diagram = false;
        }
    }
    Ok(ValidationReport { strongly_divisible, griffiths: Some(griffiths), diagram: Some(diagram), cris: Some(cris) })
}

/// `x in \hat{Fil}^n`: `f_pi(N^k x) in Fil^{n-k}(f_pi M)` for `k = 0..n-1`, with
/// the flag on `f_pi(M)` spanned by the reference vectors `e_j` with
/// `m_jumps[j] >= n - k`.
pub fn hat_fil_membership(amb: &Ambient, b: &BreuilModule, m_jumps: &[u32], x: &[PDElement], n: u32) -> Result<bool> {
    if n > amb.r() {
        return Err(Error::RecursionBudget(n as usize));
    }
    let pd = &amb.pd;
    let w = &amb.witt;
    let mut cur = x.to_vec();
    for level in (1..=n).rev() {
        let fpi: Vec<_> = cur.iter().map(|c| pd.eval_fpi(c)).collect();
        let in_flag = fpi.iter().zip(m_jumps).all(|(v, &j)| j >= level || w.is_zero(v));
        if !in_flag {
            return Ok(false);
        }
        if level > 1 {
            cur = b.monodromy(amb, &cur)?;
        }
    }
    Ok(true)
}

/// `p^r Phi^{-1} = phi(C) diag(phi_{k_i}(gamma_{k_i}) p^{r - r_i}) G^{-1}`,
/// which is integral whenever `G` is invertible.
pub fn breuil_hat_b(amb: &Ambient, b: &BreuilModule) -> Result<RingMatrix<PDElement>> {
    let pd = &amb.pd;
    let g = b.generator_images(amb)?;
    let g_inv = g.invert(pd).map_err(|_| Error::NotStrong)?;
    let r = amb.r();
    let diag: Vec<PDElement> = b
        .depths(amb)
        .into_iter()
        .zip(&b.jumps)
        .map(|(k, &rj)| Ok(pd.mul_p_pow(&pd.phi_j(&pd.gamma(k as usize), k)?, r - rj)))
        .collect::<Result<_>>()?;
    let hat_b = b.c.frobenius(pd).mul(pd, &RingMatrix::diagonal(pd, &diag))?.mul(pd, &g_inv)?;
    let pr = RingMatrix::diagonal(pd, &vec![pd.from_scalar(&amb.p_pow(r)); b.d()]);
    if !b.phi.mul(pd, &hat_b)?.eq_at_prec(pd, &pr) {
        return Err(Error::NotDivisible(r));
    }
    Ok(hat_b)
}

pub fn breuil_classify(amb: &Ambient, b: &BreuilModule) -> Result<BreuilClass> {
    let pd = &amb.pd;
    let r = amb.r();
    let hat_b = breuil_hat_b(amb, b)?;
    Ok(BreuilClass {
        etale: b.jumps.iter().all(|&j| j == r),
        multiplicative: b.jumps.iter().all(|&j| j == 0),
        unipotent: hat_b.converges_to_zero(pd, amb.n_p(), crate::fl::default_max_steps(amb, b.d())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn amb() -> Ambient {
        Ambient::standard(3, 2, 6).unwrap()
    }

    fn rank_one(a: &Ambient, s: u32, nmat: Option<PDElement>) -> BreuilModule {
        let pd = &a.pd;
        BreuilModule {
            phi: RingMatrix::diagonal(pd, &[pd.from_scalar(&a.p_pow(s))]),
            nmat: nmat.map(|n| RingMatrix::diagonal(pd, &[n])),
            c: RingMatrix::identity(pd, 1),
            jumps: vec![s],
        }
    }

    #[test]
    fn membership_examples() {
        let a = amb();
        let pd = &a.pd;
        let b = rank_one(&a, 1, Some(pd.zero()));
        assert!(fil_membership(&a, &b, &[pd.gamma(1)]).unwrap());
        assert!(!fil_membership(&a, &b, &[pd.gamma(0)]).unwrap());
        assert!(fil_membership(&a, &b, &[pd.gamma(2)]).unwrap());
        assert!(fil_lower(&a, &b, 0, &[pd.gamma(0)]).unwrap());
        assert!(fil_lower(&a, &b, 1, &[pd.gamma(0)]).unwrap());
        assert!(!fil_lower(&a, &b, 2, &[pd.gamma(0)]).unwrap());
    }

    #[test]
    fn phi_r_examples() {
        let a = amb();
        let pd = &a.pd;
        for s in 0..=2u32 {
            let b = rank_one(&a, s, None);
            let k = 2 - s;
            let got = phi_r_apply(&a, &b, &[pd.gamma(k as usize)]).unwrap();
            assert!(pd.eq(&got[0], &pd.phi_j(&pd.gamma(k as usize), k).unwrap()));
            assert!(pd.is_unit(&got[0]));
        }
        // x = E^r e: phi_r(x) = c^r phi(e)
        let b = rank_one(&a, 1, None);
        let got = phi_r_apply(&a, &b, &[pd.eisenstein_pow(2)]).unwrap();
        let expect = pd.scale(&a.p_pow(1), &pd.mul(pd.c(), pd.c()));
        assert!(pd.eq(&got[0], &expect));
        assert!(matches!(phi_r_apply(&a, &b, &[pd.one()]), Err(Error::NotInFil { .. })));
    }

    #[test]
    fn validate_and_classify_rank_one() {
        let a = amb();
        let pd = &a.pd;
        let b = rank_one(&a, 2, Some(pd.zero()));
        assert!(breuil_validate(&a, &b).unwrap().all_true());
        let c = breuil_classify(&a, &b).unwrap();
        assert!(c.etale && !c.unipotent.is_zero());
        let c = breuil_classify(&a, &rank_one(&a, 1, None)).unwrap();
        assert!(!c.etale && c.unipotent.is_zero());
        let not_cris = rank_one(&a, 1, Some(pd.one()));
        assert_eq!(breuil_validate(&a, &not_cris).unwrap().cris, Some(false));
    }

    #[test]
    fn hat_filtration_examples() {
        let a = amb();
        let pd = &a.pd;
        for s in 0..=2u32 {
            let b = rank_one(&a, s, Some(pd.zero()));
            for n in 0..=2u32 {
                assert_eq!(hat_fil_membership(&a, &b, &[s], &[pd.one()], n).unwrap(), n <= s);
            }
        }
        let b = rank_one(&a, 0, Some(pd.zero()));
        assert!(hat_fil_membership(&a, &b, &[0], &[pd.gamma(1)], 1).unwrap());
        assert_eq!(hat_fil_membership(&a, &b, &[0], &[pd.one()], 3), Err(Error::RecursionBudget(3)));
    }
}
