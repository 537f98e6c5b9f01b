//! Free Fontaine-Laffaille modules presented in an adapted basis.
//!
//! A module is `(jumps, Ftil)`: the basis `e_i` has `e_i` in
//! `Fil^{r_i} \ Fil^{r_i + 1}`, and column `i` of `Ftil` is `phi_{r_i}(e_i)`.
//! The other divided Frobenii are forced by `phi_i = p^{r_j - i} phi_{r_j}` on
//! `e_j`, so the matrix of `phi = phi_0` is `F = Ftil diag(p^{r_i})`. Because
//! `sigma` is bijective on `W(k)`, `sum_i phi_i(Fil^i M)` is the column span of
//! `Ftil`: the module is strong exactly when `Ftil` is invertible.

use crate::ambient::Ambient;
use crate::error::{Error, Result};
use crate::matrix::{RingMatrix, Verdict};
use crate::witt::WittScalar;

#[derive(Clone, Debug, PartialEq)]
pub struct FLModule {
    pub jumps: Vec<u32>,
    pub ftil: RingMatrix<WittScalar>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strength {
    Strong,
    NotStrong,
}

#[derive(Clone, Debug)]
pub struct FlClass {
    pub etale: bool,
    pub multiplicative: bool,
    pub nilpotent: Verdict<WittScalar>,
    pub unipotent: Verdict<WittScalar>,
}

pub(crate) fn check_jumps(jumps: &[u32], r: u32, sorted: bool) -> Result<()> {
    if let Some(j) = jumps.iter().find(|&&j| j > r) {
        return Err(Error::MalformedJumps(format!("jump {j} exceeds r = {r}")));
    }
    if sorted && jumps.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::MalformedJumps(format!("jumps {jumps:?} are not sorted")));
    }
    Ok(())
}

impl FLModule {
    pub fn new(amb: &Ambient, jumps: Vec<u32>, ftil: RingMatrix<WittScalar>) -> Result<Self> {
        let m = FLModule { jumps, ftil };
        m.check(amb)?;
        Ok(m)
    }

    pub fn d(&self) -> usize {
        self.jumps.len()
    }

    pub fn check(&self, amb: &Ambient) -> Result<()> {
        check_jumps(&self.jumps, amb.r(), true)?;
        if self.ftil.rows() != self.d() || self.ftil.cols() != self.d() || self.ftil.denom_exp != 0 {
            return Err(Error::Shape(format!("Ftil must be an integral {0}x{0} matrix", self.d())));
        }
        Ok(())
    }

    /// Matrix of `phi` on the adapted basis.
    pub fn f_matrix(&self, amb: &Ambient) -> RingMatrix<WittScalar> {
        let w = &amb.witt;
        let diag: Vec<_> = self.jumps.iter().map(|&j| amb.p_pow(j)).collect();
        self.ftil.mul(w, &RingMatrix::diagonal(w, &diag)).expect("square")
    }
}

pub fn fl_validate(amb: &Ambient, m: &FLModule) -> Result<Strength> {
    m.check(amb)?;
    Ok(if m.ftil.is_invertible(&amb.witt) { Strength::Strong } else { Strength::NotStrong })
}

/// `(V, F)` with `V = diag(p^{r - r_i}) Ftil^{-1}` and `F V = p^r I`.
pub fn fl_v_matrix(amb: &Ambient, m: &FLModule) -> Result<(RingMatrix<WittScalar>, RingMatrix<WittScalar>)> {
    if fl_validate(amb, m)? == Strength::NotStrong {
        return Err(Error::NotStrong);
    }
    let w = &amb.witt;
    let r = amb.r();
    let diag: Vec<_> = m.jumps.iter().map(|&j| amb.p_pow(r - j)).collect();
    let v = RingMatrix::diagonal(w, &diag).mul(w, &m.ftil.invert(w)?)?;
    Ok((v, m.f_matrix(amb)))
}

pub fn default_max_steps(amb: &Ambient, d: usize) -> usize {
    d.max(1) * amb.n_p() as usize
}

pub fn fl_classify(amb: &Ambient, m: &FLModule) -> Result<FlClass> {
    let (v, f) = fl_v_matrix(amb, m)?;
    let r = amb.r();
    let steps = default_max_steps(amb, m.d());
    Ok(FlClass {
        etale: m.jumps.iter().all(|&j| j == r),
        multiplicative: m.jumps.iter().all(|&j| j == 0),
        nilpotent: f.converges_to_zero(&amb.witt, amb.n_p(), steps),
        unipotent: v.converges_to_zero(&amb.witt, amb.n_p(), steps),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn amb() -> Ambient {
        Ambient::standard(3, 2, 6).unwrap()
    }

    fn module(a: &Ambient, jumps: &[u32], ftil: &[&[i64]]) -> FLModule {
        FLModule::new(a, jumps.to_vec(), RingMatrix::from_ints(&a.witt, ftil)).unwrap()
    }

    #[test]
    fn validate_examples() {
        let a = amb();
        assert_eq!(fl_validate(&a, &module(&a, &[1], &[&[1]])).unwrap(), Strength::Strong);
        assert_eq!(fl_validate(&a, &module(&a, &[1], &[&[3]])).unwrap(), Strength::NotStrong);
        assert_eq!(fl_validate(&a, &module(&a, &[0, 2], &[&[0, 1], &[1, 0]])).unwrap(), Strength::Strong);
        let bad = FLModule { jumps: vec![2, 0], ftil: RingMatrix::identity(&a.witt, 2) };
        assert!(matches!(fl_validate(&a, &bad), Err(Error::MalformedJumps(_))));
        let tall = FLModule { jumps: vec![3], ftil: RingMatrix::identity(&a.witt, 1) };
        assert!(matches!(fl_validate(&a, &tall), Err(Error::MalformedJumps(_))));
    }

    #[test]
    fn v_matrix_examples() {
        let a = amb();
        let w = &a.witt;
        let (v, f) = fl_v_matrix(&a, &module(&a, &[1], &[&[1]])).unwrap();
        assert_eq!((v, f), (RingMatrix::from_ints(w, &[&[3]]), RingMatrix::from_ints(w, &[&[3]])));
        let (v, f) = fl_v_matrix(&a, &module(&a, &[0, 2], &[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(f, RingMatrix::from_ints(w, &[&[1, 0], &[0, 9]]));
        assert_eq!(v, RingMatrix::from_ints(w, &[&[9, 0], &[0, 1]]));
        let (v, f) = fl_v_matrix(&a, &module(&a, &[0, 2], &[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(v, RingMatrix::from_ints(w, &[&[0, 9], &[1, 0]]));
        assert_eq!(f.mul(w, &v).unwrap(), RingMatrix::from_ints(w, &[&[9, 0], &[0, 9]]));
        assert_eq!(fl_v_matrix(&a, &module(&a, &[1], &[&[3]])).unwrap_err(), Error::NotStrong);
    }

    #[test]
    fn classify_examples() {
        let a = amb();
        let c = fl_classify(&a, &module(&a, &[2], &[&[1]])).unwrap();
        assert!(c.etale && !c.multiplicative && !c.unipotent.is_zero());
        let c = fl_classify(&a, &module(&a, &[1], &[&[1]])).unwrap();
        assert!(!c.etale && c.unipotent.is_zero());
        let c = fl_classify(&a, &module(&a, &[0, 2], &[&[0, 1], &[1, 0]])).unwrap();
        assert!(c.unipotent.is_zero() && c.nilpotent.is_zero());
        let c = fl_classify(&a, &module(&a, &[0], &[&[1]])).unwrap();
        assert!(c.multiplicative && !c.nilpotent.is_zero());
    }
}
