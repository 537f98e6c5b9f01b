//! Seeded random instances. Every generator is a pure function of its RNG
//! state; campaigns derive one `ChaCha8Rng` per seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ambient::Ambient;
use crate::error::Result;
use crate::fl::{fl_classify, FLModule};
use crate::kisin::{kisin_gls_construct, KisinModule};
use crate::matrix::RingMatrix;
use crate::pd::PDElement;
use crate::sigma::SigmaSeries;
use crate::witt::WittScalar;

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in `W(k) / p^{N_p}`, stored at the working precision.
pub fn random_scalar<R: Rng>(amb: &Ambient, rng: &mut R) -> WittScalar {
    let w = &amb.witt;
    let bound = amb.p().pow(amb.n_p());
    let cs: Vec<u64> = (0..w.f()).map(|_| rng.gen_range(0..bound)).collect();
    w.from_residues(&cs, w.work_prec()).expect("residues below the modulus")
}

/// Small integer coefficients in `[-b, b]`, for perturbations.
pub fn small_scalar<R: Rng>(amb: &Ambient, rng: &mut R, b: i64) -> WittScalar {
    let cs: Vec<i64> = (0..amb.witt.f()).map(|_| rng.gen_range(-b..=b)).collect();
    amb.witt.from_ints(&cs)
}

pub fn random_matrix<R: Rng>(amb: &Ambient, rng: &mut R, d: usize) -> RingMatrix<WittScalar> {
    RingMatrix::from_fn(d, d, |_, _| random_scalar(amb, rng))
}

/// `GL_d(W)` by rejection on the residue.
pub fn random_gl<R: Rng>(amb: &Ambient, rng: &mut R, d: usize) -> RingMatrix<WittScalar> {
    loop {
        let m = random_matrix(amb, rng, d);
        if m.is_invertible(&amb.witt) {
            return m;
        }
    }
}

/// Sorted jumps in `0..=r`.
pub fn random_jumps<R: Rng>(amb: &Ambient, rng: &mut R, d: usize) -> Vec<u32> {
    let mut j: Vec<u32> = (0..d).map(|_| rng.gen_range(0..=amb.r())).collect();
    j.sort_unstable();
    j
}

/// A strong module: `Ftil` uniform in `GL_d`.
pub fn fl_random<R: Rng>(amb: &Ambient, rng: &mut R, jumps: Vec<u32>) -> Result<FLModule> {
    let d = jumps.len();
    let ftil = random_gl(amb, rng, d);
    FLModule::new(amb, jumps, ftil)
}

/// `Ftil = G diag(1, .., 1, p)`, which is never invertible.
pub fn fl_random_not_strong<R: Rng>(amb: &Ambient, rng: &mut R, jumps: Vec<u32>) -> Result<FLModule> {
    let w = &amb.witt;
    let d = jumps.len();
    let g = random_gl(amb, rng, d);
    let diag: Vec<_> = (0..d).map(|i| if i + 1 == d { amb.p_pow(1) } else { w.one() }).collect();
    let ftil = g.mul(w, &RingMatrix::diagonal(w, &diag))?;
    FLModule::new(amb, jumps, ftil)
}

/// Strong and unipotent, by rejection on the `V`-product verdict.
pub fn fl_random_unipotent<R: Rng>(amb: &Ambient, rng: &mut R, jumps: Vec<u32>, tries: usize) -> Result<Option<FLModule>> {
    for _ in 0..tries {
        let m = fl_random(amb, rng, jumps.clone())?;
        if fl_classify(amb, &m)?.unipotent.is_zero() {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Jumps for which a unipotent module exists: not all equal to `r`.
pub fn random_unipotent_jumps<R: Rng>(amb: &Ambient, rng: &mut R, d: usize) -> Vec<u32> {
    loop {
        let j = random_jumps(amb, rng, d);
        if j.iter().any(|&x| x < amb.r()) {
            return j;
        }
    }
}

/// `I + p R_0 + sum_{k in degrees} u^k R_k` with small integer `R_k`.
pub fn random_sigma_perturbation<R: Rng>(
    amb: &Ambient,
    rng: &mut R,
    d: usize,
    degrees: std::ops::RangeInclusive<usize>,
) -> RingMatrix<SigmaSeries> {
    let s = &amb.sigma;
    let w = &amb.witt;
    RingMatrix::from_fn(d, d, |i, j| {
        let mut cs: Vec<WittScalar> = vec![w.zero(); degrees.end() + 1];
        let c0 = w.mul_p_pow(&small_scalar(amb, rng, 2), 1);
        cs[0] = if i == j { w.add(&w.one(), &c0) } else { c0 };
        for k in degrees.clone() {
            cs[k] = small_scalar(amb, rng, 2);
        }
        s.from_coeffs(cs)
    })
}

/// `X` has terms in `u^1 .. u^4`; `Y` is constant modulo `u^p`, which is
/// what lattices in crystalline representations satisfy (it makes
/// `A A_0^{-1} - I` divisible by `u^p / p`). A `Y` with lower `u`-terms
/// gives a Kisin module for which the section iteration leaves `Mat_d(S)`.
pub fn kisin_random_gls<R: Rng>(amb: &Ambient, rng: &mut R, jumps: Vec<u32>) -> Result<KisinModule> {
    let d = jumps.len();
    let p = amb.p() as usize;
    let x = random_sigma_perturbation(amb, rng, d, 1..=4);
    let y = random_sigma_perturbation(amb, rng, d, p..=p + 1);
    kisin_gls_construct(amb, x, jumps, y)
}

/// `sum_{k=low}^{high-1} c_k gamma_k` with random `c_k`; lies in `Fil^low S`.
pub fn random_pd_element_from<R: Rng>(amb: &Ambient, rng: &mut R, low: usize, high: usize) -> PDElement {
    let pd = &amb.pd;
    let w = &amb.witt;
    let n = pd.n_gamma();
    let g: Vec<WittScalar> = (0..n)
        .map(|k| if k >= low && k < high.min(n) { random_scalar(amb, rng) } else { w.zero() })
        .collect();
    pd.from_gcoeffs(g)
}

/// A random element of low `gamma`-degree.
pub fn random_pd_element<R: Rng>(amb: &Ambient, rng: &mut R) -> PDElement {
    random_pd_element_from(amb, rng, 0, 4)
}

/// `g = I + p R` with `R` supported on `gamma_0 .. gamma_2`.
pub fn random_basis_change<R: Rng>(amb: &Ambient, rng: &mut R, d: usize) -> RingMatrix<PDElement> {
    let pd = &amb.pd;
    let w = &amb.witt;
    let n = pd.n_gamma();
    RingMatrix::from_fn(d, d, |i, j| {
        let g: Vec<WittScalar> = (0..n)
            .map(|k| {
                let base = if i == j && k == 0 { w.one() } else { w.zero() };
                if k < 3 { w.add(&base, &w.mul_p_pow(&small_scalar(amb, rng, 2), 1)) } else { base }
            })
            .collect();
        pd.from_gcoeffs(g)
    })
}

/// A random vector of coordinates for elements of a Breuil module.
pub fn random_vector<R: Rng>(amb: &Ambient, rng: &mut R, d: usize) -> Vec<PDElement> {
    (0..d).map(|_| random_pd_element(amb, rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fl::{fl_validate, Strength};
    use crate::kisin::kisin_height_check;

    #[test]
    fn generators_are_deterministic() {
        let amb = Ambient::standard(3, 2, 6).unwrap();
        let a = fl_random(&amb, &mut rng_for(7), vec![0, 2]).unwrap();
        let b = fl_random(&amb, &mut rng_for(7), vec![0, 2]).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, fl_random(&amb, &mut rng_for(8), vec![0, 2]).unwrap());
    }

    #[test]
    fn generator_contracts() {
        let amb = Ambient::standard(5, 3, 6).unwrap();
        for seed in 0..20 {
            let mut rng = rng_for(seed);
            let j = random_jumps(&amb, &mut rng, 3);
            assert_eq!(fl_validate(&amb, &fl_random(&amb, &mut rng, j.clone()).unwrap()).unwrap(), Strength::Strong);
            let bad = fl_random_not_strong(&amb, &mut rng, j.clone()).unwrap();
            assert_eq!(fl_validate(&amb, &bad).unwrap(), Strength::NotStrong);
            let k = kisin_random_gls(&amb, &mut rng, j).unwrap();
            kisin_height_check(&amb, &k.a).unwrap();
        }
    }

    #[test]
    fn basis_change_is_congruent_to_identity() {
        let amb = Ambient::standard(3, 2, 6).unwrap();
        let g = random_basis_change(&amb, &mut rng_for(1), 2);
        let id = RingMatrix::identity(&amb.pd, 2);
        assert!(g.eq_mod(&amb.pd, &id, 1));
        assert!(g.is_invertible(&amb.pd));
    }
}
