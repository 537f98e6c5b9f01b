//! Kisin modules of `E(u)`-height `r`, the GLS normal form and the functor to
//! Breuil modules.

use crate::ambient::Ambient;
use crate::breuil::BreuilModule;
use crate::error::{Error, Result};
use crate::fl::check_jumps;
use crate::matrix::{RingMatrix, Verdict};
use crate::pd::PDElement;
use crate::ring::Ring;
use crate::sigma::SigmaSeries;

/// `phi(e) = e X Lambda Y` with `Lambda = diag(E^{r_i})`.
#[derive(Clone, Debug, PartialEq)]
pub struct GlsParts {
    pub x: RingMatrix<SigmaSeries>,
    pub jumps: Vec<u32>,
    pub y: RingMatrix<SigmaSeries>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KisinModule {
    pub a: RingMatrix<SigmaSeries>,
    pub gls: Option<GlsParts>,
}

impl KisinModule {
    pub fn d(&self) -> usize {
        self.a.rows()
    }
}

#[derive(Clone, Debug)]
pub struct KisinClass {
    pub etale: bool,
    pub multiplicative: bool,
    pub unipotent: Verdict<SigmaSeries>,
}

/// `B` with `A B = E^r I`, or the reason none exists in 𝔖.
///
/// `det A` is split as `w E^s` with `w` a unit; then `B = E^r adj(A) / det A`
/// requires `E^s | E^r adj(A)` entrywise.
pub fn kisin_height_check(amb: &Ambient, a: &RingMatrix<SigmaSeries>) -> Result<RingMatrix<SigmaSeries>> {
    let s = &amb.sigma;
    let w = &amb.witt;
    let r = amb.r();
    if !a.is_square() {
        return Err(Error::Shape("Kisin matrix must be square".into()));
    }
    let d = a.rows() as u32;
    let det = a.det(s)?;
    if s.is_zero(&det) {
        return Err(Error::SingularMatrix);
    }
    let (ev, unit_part) = s.eisenstein_valuation(&det, r * d + 1);
    if ev > r * d {
        return Err(Error::TooTall(format!("E^{ev} divides det A, more than E^(r d)")));
    }
    if !s.is_unit(&unit_part) {
        return Err(Error::TooTall(format!(
            "det A = E^{ev} times a non-unit (constant term {:?})",
            s.coeff(&unit_part, 0)
        )));
    }
    let unit_inv = s.invert(&unit_part)?;
    let er = s.eisenstein_pow(r);
    let adj = a.adjugate(s)?;
    let mut b = adj.clone();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let mut t = s.mul(&er, adj.get(i, j));
            for k in 0..ev {
                let (q, rem) = s.weierstrass_divide(&t);
                if !w.is_zero(&rem) {
                    return Err(Error::TooTall(format!(
                        "entry ({i},{j}) of E^r adj(A) leaves remainder {rem:?} at division {}",
                        k + 1
                    )));
                }
                t = q;
            }
            b.set(i, j, s.mul(&t, &unit_inv));
        }
    }
    let check = a.mul(s, &b)?;
    let target = RingMatrix::diagonal(s, &vec![er; a.rows()]);
    if !check.eq_at_prec(s, &target) {
        return Err(Error::TooTall("A B differs from E^r I at precision".into()));
    }
    Ok(b)
}

/// `A = X Lambda Y`.
pub fn kisin_gls_construct(
    amb: &Ambient,
    x: RingMatrix<SigmaSeries>,
    jumps: Vec<u32>,
    y: RingMatrix<SigmaSeries>,
) -> Result<KisinModule> {
    let s = &amb.sigma;
    check_jumps(&jumps, amb.r(), false)?;
    let d = jumps.len();
    for m in [&x, &y] {
        if m.rows() != d || m.cols() != d {
            return Err(Error::Shape(format!("GLS factors must be {d}x{d}")));
        }
        if !m.is_invertible(s) {
            return Err(Error::NotInvertible);
        }
    }
    let lambda = RingMatrix::diagonal(s, &jumps.iter().map(|&j| s.eisenstein_pow(j)).collect::<Vec<_>>());
    let a = x.mul(s, &lambda)?.mul(s, &y)?;
    kisin_height_check(amb, &a)?;
    Ok(KisinModule { a, gls: Some(GlsParts { x, jumps, y }) })
}

/// Steps allowed for the `(p, u)`-adic zero test over 𝔖: the `p`-adic
/// budget plus the number of Frobenius twists that still touch `u^{< N_u}`.
pub fn sigma_max_steps(amb: &Ambient, d: usize) -> usize {
    let mut log = 0;
    let mut q = 1usize;
    while q < amb.sigma.n_u() {
        q *= amb.p() as usize;
        log += 1;
    }
    d.max(1) * amb.n_p() as usize + log + 1
}

pub fn kisin_classify(amb: &Ambient, k: &KisinModule) -> Result<KisinClass> {
    let s = &amb.sigma;
    let b = kisin_height_check(amb, &k.a)?;
    Ok(KisinClass {
        etale: b.is_invertible(s),
        multiplicative: k.a.is_invertible(s),
        unipotent: b.converges_to_zero(s, amb.n_p(), sigma_max_steps(amb, k.d())),
    })
}

/// `S (x)_{phi, 𝔖} 𝔐` in the basis `f = e Y^{-1}`, where `e = 1 (x) 𝔢`.
///
/// In the basis `e` the Frobenius has matrix `phi(X Lambda Y)`; after
/// `f = e Y^{-1}` (with `Y` embedded by `u -> u`) it becomes
/// `Y phi(X Lambda)`. The filtration is adapted with `C = I` and the GLS
/// jumps: `x = f w` has `(1 (x) phi)(x)` with coordinates `X Lambda w`.
pub fn kisin_to_breuil(amb: &Ambient, k: &KisinModule) -> Result<BreuilModule> {
    let gls = k.gls.as_ref().ok_or(Error::MissingGlsForm)?;
    let s = &amb.sigma;
    let pd = &amb.pd;
    let lambda = RingMatrix::diagonal(s, &gls.jumps.iter().map(|&j| s.eisenstein_pow(j)).collect::<Vec<_>>());
    let phi_xl = gls.x.mul(s, &lambda)?.frobenius(s);
    let phi = embed(amb, &gls.y).mul(pd, &embed(amb, &phi_xl))?;
    let d = k.d();
    Ok(BreuilModule {
        phi,
        nmat: None,
        c: RingMatrix::identity(pd, d),
        jumps: gls.jumps.clone(),
    })
}

/// Entrywise embedding 𝔖 -> S.
pub fn embed(amb: &Ambient, m: &RingMatrix<SigmaSeries>) -> RingMatrix<PDElement> {
    m.map(|x| amb.pd.embed_truncating(x))
}

/// The defining condition `(1 (x) phi)(x) in Fil^r S (x) 𝔐` for
/// `x = e v` in the tensor basis: every entry of `A v` lies in `Fil^r S`.
pub fn raw_fil_r(amb: &Ambient, k: &KisinModule, v: &[PDElement]) -> Result<bool> {
    let pd = &amb.pd;
    let av = embed(amb, &k.a).apply(pd, v)?;
    Ok(av.iter().all(|x| pd.fil_valuation(x) >= amb.r() as usize))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn amb() -> Ambient {
        Ambient::standard(3, 2, 6).unwrap()
    }

    fn one_by_one(a: &Ambient, x: SigmaSeries) -> RingMatrix<SigmaSeries> {
        RingMatrix::diagonal(&a.sigma, &[x])
    }

    #[test]
    fn height_examples() {
        let a = amb();
        let s = &a.sigma;
        let e2 = s.eisenstein_pow(2);
        let b = kisin_height_check(&a, &one_by_one(&a, e2.clone())).unwrap();
        assert!(b.eq_at_prec(s, &RingMatrix::identity(s, 1)));
        let b = kisin_height_check(&a, &one_by_one(&a, s.one())).unwrap();
        assert!(b.eq_at_prec(s, &one_by_one(&a, e2.clone())));
        // (u - 3)^2 / u leaves the constant term 9
        let err = kisin_height_check(&a, &one_by_one(&a, s.u())).unwrap_err();
        assert!(matches!(err, Error::TooTall(_)));
        assert_eq!(a.witt.to_signed(&s.coeff(&e2, 0)), 9);
        let cube = one_by_one(&a, s.eisenstein_pow(3));
        assert!(matches!(kisin_height_check(&a, &cube), Err(Error::TooTall(_))));
    }

    #[test]
    fn gls_examples() {
        let a = amb();
        let s = &a.sigma;
        let id = RingMatrix::identity(s, 2);
        let k = kisin_gls_construct(&a, id.clone(), vec![0, 2], id.clone()).unwrap();
        assert_eq!(k.a, RingMatrix::diagonal(s, &[s.one(), s.eisenstein_pow(2)]));
        let y = RingMatrix::from_rows(vec![vec![s.one(), s.u()], vec![s.zero(), s.one()]]).unwrap();
        let k = kisin_gls_construct(&a, id.clone(), vec![1, 1], y).unwrap();
        let e = s.eisenstein();
        let expect = RingMatrix::from_rows(vec![vec![e.clone(), s.mul(&e, &s.u())], vec![s.zero(), e]]).unwrap();
        assert_eq!(k.a, expect);
    }

    #[test]
    fn classify_examples() {
        let a = amb();
        let s = &a.sigma;
        let one = RingMatrix::identity(s, 1);
        let etale = kisin_gls_construct(&a, one.clone(), vec![2], one.clone()).unwrap();
        let c = kisin_classify(&a, &etale).unwrap();
        assert!(c.etale && !c.unipotent.is_zero());
        let mult = kisin_gls_construct(&a, one.clone(), vec![0], one.clone()).unwrap();
        let c = kisin_classify(&a, &mult).unwrap();
        assert!(c.multiplicative && c.unipotent.is_zero());
        let id = RingMatrix::identity(s, 2);
        let mixed = kisin_gls_construct(&a, id.clone(), vec![0, 2], id).unwrap();
        let c = kisin_classify(&a, &mixed).unwrap();
        assert!(!c.etale && !c.multiplicative);
    }

    #[test]
    fn rank_one_breuil_image() {
        let a = amb();
        let (s, pd) = (&a.sigma, &a.pd);
        let one = RingMatrix::identity(s, 1);
        for sj in 0..=2u32 {
            let k = kisin_gls_construct(&a, one.clone(), vec![sj], one.clone()).unwrap();
            let b = kisin_to_breuil(&a, &k).unwrap();
            // phi(E)^s = p^s c^s
            let mut expect = pd.one();
            for _ in 0..sj {
                expect = pd.mul(&expect, pd.c());
            }
            expect = pd.scale(&a.p_pow(sj), &expect);
            assert!(pd.eq(b.phi.get(0, 0), &expect));
            assert_eq!(b.jumps, vec![sj]);
        }
        let generic = KisinModule { a: one, gls: None };
        assert_eq!(kisin_to_breuil(&a, &generic).unwrap_err(), Error::MissingGlsForm);
    }
}
