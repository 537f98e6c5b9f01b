//! Verification campaigns: named suites of seeded checks, run in parallel
//! and merged by seed order into deterministic JSON-lines reports.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ambient::Ambient;
use crate::breuil::{breuil_classify, breuil_validate, fil_lower, fil_membership, hat_fil_membership};
use crate::error::{Error, Result};
use crate::fl::{fl_classify, fl_validate, FLModule, Strength};
use crate::functors::{fl_to_breuil, random_fil_candidate, roundtrip_breuil, roundtrip_fl, section_compute};
use crate::gen::{self, rng_for};
use crate::json::{document, Document, Object};
use crate::kisin::{embed, kisin_to_breuil, raw_fil_r, KisinModule};
use crate::matrix::RingMatrix;
use crate::params::AmbientParams;
use crate::pd::PDElement;
use crate::ring::Ring;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    RingLaws,
    Easylemma,
    Lemfil1,
    Section,
    RoundtripFl,
    RoundtripBreuil,
    Unipotence,
    KisinBreuilConsistency,
    Lemfltos,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::RingLaws,
        Suite::Easylemma,
        Suite::Lemfil1,
        Suite::Section,
        Suite::RoundtripFl,
        Suite::RoundtripBreuil,
        Suite::Unipotence,
        Suite::KisinBreuilConsistency,
        Suite::Lemfltos,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::RingLaws => "ring-laws",
            Suite::Easylemma => "easylemma",
            Suite::Lemfil1 => "lemfil1",
            Suite::Section => "section",
            Suite::RoundtripFl => "roundtrip-fl",
            Suite::RoundtripBreuil => "roundtrip-breuil",
            Suite::Unipotence => "unipotence",
            Suite::KisinBreuilConsistency => "kisin-breuil-consistency",
            Suite::Lemfltos => "lemfltos",
        }
    }

    /// Share of seeds allowed to end without convergence.
    fn nonconvergence_allowance(self) -> f64 {
        match self {
            Suite::RoundtripBreuil => 0.05,
            _ => 0.0,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown suite {s:?}; known: {}", Suite::ALL.map(Suite::name).join(", ")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    NonConvergent,
}

/// One seed of one suite. Failing cases carry the instance as a document.
#[derive(Clone, Debug, Serialize)]
pub struct CaseOutcome {
    pub suite: Suite,
    pub seed: u64,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Document>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub params: AmbientParams,
    pub seeds: usize,
    pub passed: usize,
    pub failed: usize,
    pub nonconvergent: usize,
    pub failing_seeds: Vec<u64>,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct Campaign {
    pub params: AmbientParams,
    pub suites: Vec<Suite>,
    pub seeds: Vec<u64>,
    pub d_max: usize,
    pub samples: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct CaseConfig {
    pub d_max: usize,
    pub samples: usize,
}

impl Default for CaseConfig {
    fn default() -> Self {
        CaseConfig { d_max: 3, samples: 50 }
    }
}

// --- building outcomes -------------------------------------------------------

struct Case {
    status: Status,
    detail: String,
    iterations: Option<usize>,
    instance: Option<Object>,
}

impl Case {
    fn pass() -> Self {
        Case { status: Status::Pass, detail: String::new(), iterations: None, instance: None }
    }

    fn fail(detail: impl Into<String>, instance: Option<Object>) -> Self {
        Case { status: Status::Fail, detail: detail.into(), iterations: None, instance }
    }

    fn check(ok: bool, detail: impl FnOnce() -> String, instance: impl FnOnce() -> Object) -> Self {
        if ok {
            Case::pass()
        } else {
            Case::fail(detail(), Some(instance()))
        }
    }
}

fn finish(amb: &Ambient, suite: Suite, seed: u64, case: Result<Case>) -> CaseOutcome {
    let case = case.unwrap_or_else(|e| Case::fail(format!("error: {e}"), None));
    CaseOutcome {
        suite,
        seed,
        status: case.status,
        detail: case.detail,
        iterations: case.iterations,
        counterexample: match case.status {
            Status::Pass => None,
            _ => case.instance.as_ref().map(|o| document(amb, o)),
        },
    }
}

fn random_d<R: Rng>(rng: &mut R, d_max: usize) -> usize {
    rng.gen_range(1..=d_max.max(1))
}

// --- per-case checks -----------------------------------------------------------

/// Associativity, distributivity, the `N`-derivation rule, multiplicativity
/// of `phi`, `N phi = p phi N` and `f_0 phi = sigma f_0` on one random triple.
pub fn check_ring_laws(amb: &Ambient, seed: u64) -> Result<Vec<String>> {
    let mut rng = rng_for(seed);
    let (w, s, pd) = (&amb.witt, &amb.sigma, &amb.pd);
    let mut bad = Vec::new();
    let (a, b, c) = (gen::random_scalar(amb, &mut rng), gen::random_scalar(amb, &mut rng), gen::random_scalar(amb, &mut rng));
    if !w.eq(&w.mul(&w.mul(&a, &b), &c), &w.mul(&a, &w.mul(&b, &c))) {
        bad.push("W: associativity".into());
    }
    if !w.eq(&w.mul(&a, &w.add(&b, &c)), &w.add(&w.mul(&a, &b), &w.mul(&a, &c))) {
        bad.push("W: distributivity".into());
    }
    let sig = |rng: &mut rand_chacha::ChaCha8Rng| {
        s.from_coeffs((0..5).map(|_| gen::random_scalar(amb, rng)).collect())
    };
    let (x, y, z) = (sig(&mut rng), sig(&mut rng), sig(&mut rng));
    if !s.eq(&s.mul(&s.mul(&x, &y), &z), &s.mul(&x, &s.mul(&y, &z))) {
        bad.push("𝔖: associativity".into());
    }
    if !s.eq(&s.frobenius(&s.mul(&x, &y)), &s.mul(&s.frobenius(&x), &s.frobenius(&y))) {
        bad.push("𝔖: phi multiplicative".into());
    }
    let (x, y, z) = (gen::random_pd_element(amb, &mut rng), gen::random_pd_element(amb, &mut rng), gen::random_pd_element(amb, &mut rng));
    if !pd.eq(&pd.mul(&pd.mul(&x, &y), &z), &pd.mul(&x, &pd.mul(&y, &z))) {
        bad.push("S: associativity".into());
    }
    if !pd.eq(&pd.mul(&x, &pd.add(&y, &z)), &pd.add(&pd.mul(&x, &y), &pd.mul(&x, &z))) {
        bad.push("S: distributivity".into());
    }
    let xy = pd.mul(&x, &y);
    if !pd.eq(&pd.n_op(&xy), &pd.add(&pd.mul(&pd.n_op(&x), &y), &pd.mul(&x, &pd.n_op(&y)))) {
        bad.push("S: N is a derivation".into());
    }
    if !pd.eq(&pd.frobenius(&xy), &pd.mul(&pd.frobenius(&x), &pd.frobenius(&y))) {
        bad.push("S: phi multiplicative".into());
    }
    let f1 = gen::random_pd_element_from(amb, &mut rng, 1, 5);
    let lhs = pd.n_op(&pd.frobenius(&f1));
    let rhs = pd.mul_p_pow(&pd.frobenius(&pd.n_op(&f1)), 1);
    if !pd.eq(&lhs, &rhs) {
        bad.push("S: N phi = p phi N on Fil^1".into());
    }
    if !w.eq(&pd.eval_f0(&pd.frobenius(&x)), &w.frobenius(&pd.eval_f0(&x))) {
        bad.push("S: f_0 phi = sigma f_0".into());
    }
    Ok(bad)
}

/// `s, N(s) in Fil^i` forces `s in Fil^{i+1}`, on constructed elements, and
/// the witness `gamma_i` has `N(gamma_i)` outside `Fil^i`.
pub fn check_easylemma(amb: &Ambient, seed: u64) -> Result<Vec<String>> {
    let mut rng = rng_for(seed);
    let pd = &amb.pd;
    let mut bad = Vec::new();
    let top = amb.r().saturating_sub(1).max(1) as usize;
    for i in 1..=top {
        // in Fil^i, with a random (possibly zero) gamma_i coefficient
        let low = if rng.gen_bool(0.5) { i } else { i + 1 };
        let s = gen::random_pd_element_from(amb, &mut rng, low, low + 4);
        let ns = pd.n_op(&s);
        if pd.fil_valuation(&s) >= i && pd.fil_valuation(&ns) >= i && pd.fil_valuation(&s) < i + 1 {
            bad.push(format!("i = {i}: s and N(s) in Fil^i but s not in Fil^(i+1)"));
        }
        let g = pd.gamma(i);
        if pd.fil_valuation(&pd.n_op(&g)) >= i {
            bad.push(format!("i = {i}: N(gamma_i) lies in Fil^i"));
        }
    }
    Ok(bad)
}

/// Tensor and hat filtrations agree on `M_S(M)` for every `n <= r`.
pub fn check_lemfil1<R: Rng>(amb: &Ambient, m: &FLModule, rng: &mut R, samples: usize) -> Result<Option<String>> {
    let b = fl_to_breuil(amb, m);
    let r = amb.r();
    for k in 0..samples {
        let x: Vec<PDElement> = (0..m.d())
            .map(|_| {
                let low = rng.gen_range(0..=r as usize + 1);
                gen::random_pd_element_from(amb, rng, low, low + 3)
            })
            .collect();
        for n in 0..=r {
            let tensor = fil_lower(amb, &b, n, &x)?;
            let hat = hat_fil_membership(amb, &b, &m.jumps, &x, n)?;
            if tensor != hat {
                return Ok(Some(format!("sample {k}, n = {n}: tensor {tensor}, hat {hat}")));
            }
        }
    }
    Ok(None)
}

/// `section_compute(M_S(M))` is the identity after zero iterations.
pub fn check_telescoping(amb: &Ambient, m: &FLModule) -> Result<Option<String>> {
    let pd = &amb.pd;
    let res = section_compute(amb, &fl_to_breuil(amb, m))?;
    let id = RingMatrix::identity(pd, m.d());
    if res.iterations != 0 {
        return Ok(Some(format!("{} iterations", res.iterations)));
    }
    if !res.bmat.eq_mod(pd, &id, amb.n_p()) {
        return Ok(Some("section differs from I".into()));
    }
    Ok(None)
}

#[derive(Clone, Debug)]
pub struct SectionCertificate {
    pub iterations: usize,
    pub rate_bound: usize,
    pub fixed_point: bool,
    pub f0_identity: bool,
    pub invertible: bool,
    pub claim: bool,
}

impl SectionCertificate {
    pub fn ok(&self) -> bool {
        self.iterations <= self.rate_bound && self.fixed_point && self.f0_identity && self.invertible
    }
}

/// Section of the Breuil image of a GLS module, with every certificate
/// re-checked here rather than trusted from the iteration.
pub fn certify_kisin_section(amb: &Ambient, k: &KisinModule) -> Result<SectionCertificate> {
    let (pd, w) = (&amb.pd, &amb.witt);
    let n_p = amb.n_p();
    let b = kisin_to_breuil(amb, k)?;
    let res = section_compute(amb, &b)?;
    let a = &b.phi;
    let a0 = a.map(|x| pd.from_scalar(&pd.eval_f0(x)));
    let lhs = res.bmat.mul(pd, &a0)?;
    let rhs = a.mul(pd, &res.bmat.frobenius(pd))?;
    let fixed_point = lhs.eq_mod(pd, &rhs, n_p);
    let f0_identity = res.bmat.map(|x| pd.eval_f0(x)).eq_mod(w, &RingMatrix::identity(w, k.d()), n_p);
    Ok(SectionCertificate {
        iterations: res.iterations,
        rate_bound: res.rate_bound,
        fixed_point,
        f0_identity,
        invertible: res.bmat.is_invertible(pd),
        claim: res.b0_claim_ok,
    })
}

/// Adapted membership in `Fil^r` against `(1 (x) phi)(x) in Fil^r S (x) 𝔐`,
/// plus strong divisibility of the image.
pub fn check_kisin_breuil<R: Rng>(amb: &Ambient, k: &KisinModule, rng: &mut R, samples: usize) -> Result<Option<String>> {
    let pd = &amb.pd;
    let b = kisin_to_breuil(amb, k)?;
    if !breuil_validate(amb, &b)?.strongly_divisible {
        return Ok(Some("image is not strongly divisible".into()));
    }
    let gls = k.gls.as_ref().ok_or(Error::MissingGlsForm)?;
    // x = f w = e Y^{-1} w
    let y_inv = embed(amb, &gls.y).invert(pd)?;
    for i in 0..samples {
        let w = random_fil_candidate(amb, &b, rng.gen_bool(0.5), rng)?;
        let adapted = fil_membership(amb, &b, &w)?;
        let raw = raw_fil_r(amb, k, &y_inv.apply(pd, &w)?)?;
        if adapted != raw {
            return Ok(Some(format!("sample {i}: adapted {adapted}, raw {raw}")));
        }
    }
    Ok(None)
}

/// Strong `M` gives a module passing every validation; `NotStrong` gives one
/// that is not strongly divisible.
pub fn check_lemfltos(amb: &Ambient, strong: &FLModule, weak: &FLModule) -> Result<Option<String>> {
    if fl_validate(amb, strong)? != Strength::Strong || fl_validate(amb, weak)? != Strength::NotStrong {
        return Err(Error::InvalidParams("generator broke its strength contract".into()));
    }
    let rep = breuil_validate(amb, &fl_to_breuil(amb, strong))?;
    if !rep.all_true() {
        return Ok(Some(format!("strong module gave {rep:?}")));
    }
    let rep = breuil_validate(amb, &fl_to_breuil(amb, weak))?;
    if rep.strongly_divisible {
        return Ok(Some("NotStrong module gave a strongly divisible image".into()));
    }
    Ok(None)
}

/// Unipotence verdicts of `M` and `M_S(M)` agree.
pub fn check_unipotence(amb: &Ambient, m: &FLModule) -> Result<Option<String>> {
    let fl = fl_classify(amb, m)?.unipotent.is_zero();
    let br = breuil_classify(amb, &fl_to_breuil(amb, m))?.unipotent.is_zero();
    Ok((fl != br).then(|| format!("FL says unipotent = {fl}, Breuil says {br}")))
}

/// Rank-one modules of every jump and the `2 x 2` swap module.
pub fn crafted_unipotence_family(amb: &Ambient) -> Vec<FLModule> {
    let w = &amb.witt;
    let r = amb.r();
    let mut out: Vec<FLModule> = (0..=r)
        .map(|s| FLModule::new(amb, vec![s], RingMatrix::identity(w, 1)).expect("rank one"))
        .collect();
    out.push(FLModule::new(amb, vec![0, r], RingMatrix::from_ints(w, &[&[0, 1], &[1, 0]])).expect("swap"));
    out
}

/// A random module for `roundtrip-fl`: strong, and unipotent when `r = p - 1`.
pub fn roundtrip_fl_instance<R: Rng>(amb: &Ambient, rng: &mut R, d: usize) -> Result<Option<FLModule>> {
    if amb.r() as u64 + 1 == amb.p() {
        let j = gen::random_unipotent_jumps(amb, rng, d);
        gen::fl_random_unipotent(amb, rng, j, 500)
    } else {
        let j = gen::random_jumps(amb, rng, d);
        gen::fl_random(amb, rng, j).map(Some)
    }
}

// --- suites ----------------------------------------------------------------------

fn from_laws(bad: Result<Vec<String>>) -> Result<Case> {
    bad.map(|b| if b.is_empty() { Case::pass() } else { Case::fail(b.join("; "), None) })
}

fn from_check(found: Result<Option<String>>, instance: impl FnOnce() -> Object) -> Result<Case> {
    found.map(|f| match f {
        None => Case::pass(),
        Some(msg) => Case::fail(msg, Some(instance())),
    })
}

pub fn run_case(amb: &Ambient, suite: Suite, seed: u64, cfg: CaseConfig) -> CaseOutcome {
    let case = (|| -> Result<Case> {
        let mut rng = rng_for(seed);
        let d = random_d(&mut rng, cfg.d_max);
        match suite {
            Suite::RingLaws => from_laws(check_ring_laws(amb, seed)),
            Suite::Easylemma => from_laws(check_easylemma(amb, seed)),
            Suite::Lemfil1 => {
                let j = gen::random_jumps(amb, &mut rng, d);
                let m = gen::fl_random(amb, &mut rng, j)?;
                from_check(check_lemfil1(amb, &m, &mut rng, cfg.samples), || Object::Fl(m.clone()))
            }
            Suite::Section => {
                let j = gen::random_jumps(amb, &mut rng, d);
                let m = gen::fl_random(amb, &mut rng, j)?;
                if let Some(msg) = check_telescoping(amb, &m)? {
                    return Ok(Case::fail(format!("telescoping: {msg}"), Some(Object::Fl(m))));
                }
                let j = gen::random_jumps(amb, &mut rng, d);
                let k = gen::kisin_random_gls(amb, &mut rng, j)?;
                let cert = match certify_kisin_section(amb, &k) {
                    Ok(c) => c,
                    Err(e @ (Error::NonConvergent(_) | Error::NonIntegralIterate(_))) => {
                        return Ok(Case::fail(format!("GLS instance: {e}"), Some(Object::Kisin(k))));
                    }
                    Err(e) => return Err(e),
                };
                let mut case = Case::check(cert.ok() && cert.claim, || format!("{cert:?}"), || Object::Kisin(k.clone()));
                case.iterations = Some(cert.iterations);
                Ok(case)
            }
            Suite::RoundtripFl => match roundtrip_fl_instance(amb, &mut rng, d)? {
                None => Ok(Case::fail("no unipotent instance found by rejection", None)),
                Some(m) => {
                    let rep = roundtrip_fl(amb, &m, false)?;
                    let mut case = Case::check(rep.success(), || rep.details.join("; "), || Object::Fl(m.clone()));
                    case.iterations = rep.iterations;
                    Ok(case)
                }
            },
            Suite::RoundtripBreuil => {
                let j = gen::random_jumps(amb, &mut rng, d);
                let m = gen::fl_random(amb, &mut rng, j)?;
                let g = gen::random_basis_change(amb, &mut rng, d);
                let rep = roundtrip_breuil(amb, &m, &g, cfg.samples, &mut rng)?;
                let instance = || {
                    crate::functors::change_basis(amb, &fl_to_breuil(amb, &m), &g)
                        .map(Object::Breuil)
                        .unwrap_or_else(|_| Object::Fl(m.clone()))
                };
                let mut case = if !rep.converged {
                    Case { status: Status::NonConvergent, detail: rep.details.join("; "), iterations: None, instance: Some(instance()) }
                } else {
                    Case::check(rep.success(), || rep.details.join("; "), instance)
                };
                case.iterations = rep.iterations;
                Ok(case)
            }
            Suite::Unipotence => {
                let j = gen::random_jumps(amb, &mut rng, d);
                let m = gen::fl_random(amb, &mut rng, j)?;
                from_check(check_unipotence(amb, &m), || Object::Fl(m.clone()))
            }
            Suite::KisinBreuilConsistency => {
                let j = gen::random_jumps(amb, &mut rng, d);
                let k = gen::kisin_random_gls(amb, &mut rng, j)?;
                from_check(check_kisin_breuil(amb, &k, &mut rng, cfg.samples), || Object::Kisin(k.clone()))
            }
            Suite::Lemfltos => {
                let j = gen::random_jumps(amb, &mut rng, d);
                let strong = gen::fl_random(amb, &mut rng, j.clone())?;
                let weak = gen::fl_random_not_strong(amb, &mut rng, j)?;
                from_check(check_lemfltos(amb, &strong, &weak), || Object::Fl(weak.clone()))
            }
        }
    })();
    finish(amb, suite, seed, case)
}

/// Re-runs the check a counterexample came from on the stored object alone;
/// `seed` drives only the random samples. Seed-only suites regenerate.
pub fn recheck(amb: &Ambient, suite: Suite, obj: &Object, seed: u64, cfg: CaseConfig) -> CaseOutcome {
    let mut rng = rng_for(seed);
    let case = (|| -> Result<Case> {
        let inst = || obj.clone();
        match (suite, obj) {
            (Suite::RingLaws | Suite::Easylemma, _) => Ok(run_case(amb, suite, seed, cfg).into()),
            (Suite::Lemfil1, Object::Fl(m)) => from_check(check_lemfil1(amb, m, &mut rng, cfg.samples), inst),
            (Suite::Section, Object::Fl(m)) => from_check(check_telescoping(amb, m), inst),
            (Suite::Section, Object::Kisin(k)) => {
                let cert = certify_kisin_section(amb, k)?;
                Ok(Case::check(cert.ok() && cert.claim, || format!("{cert:?}"), inst))
            }
            (Suite::RoundtripFl, Object::Fl(m)) => {
                let rep = roundtrip_fl(amb, m, false)?;
                Ok(Case::check(rep.success(), || rep.details.join("; "), inst))
            }
            (Suite::RoundtripBreuil, Object::Breuil(b)) => match crate::functors::breuil_to_fl(amb, b) {
                Ok(m) => {
                    let rep = roundtrip_fl(amb, &m, true)?;
                    Ok(Case::check(rep.success(), || rep.details.join("; "), inst))
                }
                Err(e @ (Error::NonConvergent(_) | Error::NonIntegralIterate(_))) => {
                    Ok(Case { status: Status::NonConvergent, detail: e.to_string(), iterations: None, instance: Some(inst()) })
                }
                Err(e) => Err(e),
            },
            (Suite::Unipotence, Object::Fl(m)) => from_check(check_unipotence(amb, m), inst),
            (Suite::KisinBreuilConsistency, Object::Kisin(k)) => {
                from_check(check_kisin_breuil(amb, k, &mut rng, cfg.samples), inst)
            }
            (Suite::Lemfltos, Object::Fl(m)) => {
                let rep = breuil_validate(amb, &fl_to_breuil(amb, m))?;
                let ok = match fl_validate(amb, m)? {
                    Strength::Strong => rep.all_true(),
                    _ => !rep.strongly_divisible,
                };
                Ok(Case::check(ok, || format!("{rep:?}"), inst))
            }
            _ => Err(Error::InvalidParams(format!("suite {suite} does not take this kind of object"))),
        }
    })();
    finish(amb, suite, seed, case)
}

impl From<CaseOutcome> for Case {
    fn from(c: CaseOutcome) -> Self {
        Case { status: c.status, detail: c.detail, iterations: c.iterations, instance: None }
    }
}

/// Runs one suite over all seeds; results come back in seed order.
pub fn run_suite(amb: &Ambient, suite: Suite, seeds: &[u64], cfg: CaseConfig) -> (SuiteReport, Vec<CaseOutcome>) {
    let cases: Vec<CaseOutcome> = seeds.par_iter().map(|&s| run_case(amb, suite, s, cfg)).collect();
    let mut extra = Vec::new();
    if suite == Suite::Unipotence {
        // the crafted family rides along with the first seed
        for (i, m) in crafted_unipotence_family(amb).into_iter().enumerate() {
            let case = from_check(check_unipotence(amb, &m), || Object::Fl(m.clone()));
            let mut out = finish(amb, suite, u64::MAX - i as u64, case);
            out.detail = if out.detail.is_empty() { format!("crafted module {i}") } else { format!("crafted module {i}: {}", out.detail) };
            extra.push(out);
        }
    }
    let all: Vec<CaseOutcome> = cases.into_iter().chain(extra).collect();
    let count = |s: Status| all.iter().filter(|c| c.status == s).count();
    let (passed, failed, nonconvergent) = (count(Status::Pass), count(Status::Fail), count(Status::NonConvergent));
    let allowed = (suite.nonconvergence_allowance() * all.len() as f64).floor() as usize;
    let report = SuiteReport {
        suite,
        params: amb.params.clone(),
        seeds: all.len(),
        passed,
        failed,
        nonconvergent,
        failing_seeds: all.iter().filter(|c| c.status != Status::Pass).map(|c| c.seed).collect(),
        ok: failed == 0 && nonconvergent <= allowed,
    };
    (report, all)
}

impl Campaign {
    pub fn run(&self) -> Result<(Vec<SuiteReport>, Vec<CaseOutcome>)> {
        let amb = Ambient::new(self.params.clone())?;
        let cfg = CaseConfig { d_max: self.d_max, samples: self.samples };
        let mut reports = Vec::new();
        let mut cases = Vec::new();
        for &suite in &self.suites {
            let (r, c) = run_suite(&amb, suite, &self.seeds, cfg);
            reports.push(r);
            cases.extend(c);
        }
        Ok((reports, cases))
    }
}

/// JSON lines: every case, then one summary line per suite.
pub fn to_json_lines(reports: &[SuiteReport], cases: &[CaseOutcome]) -> String {
    let mut out = String::new();
    for c in cases {
        out.push_str(&serde_json::to_string(c).expect("cases serialize"));
        out.push('\n');
    }
    for r in reports {
        out.push_str(&serde_json::to_string(&serde_json::json!({ "summary": r })).expect("reports serialize"));
        out.push('\n');
    }
    out
}

pub fn human_summary(reports: &[SuiteReport]) -> String {
    reports
        .iter()
        .map(|r| {
            let nc = if r.nonconvergent > 0 { format!(", {} non-convergent", r.nonconvergent) } else { String::new() };
            format!(
                "{:<26} {}  {}/{} passed{nc}",
                r.suite.name(),
                if r.ok { "PASS" } else { "FAIL" },
                r.passed,
                r.seeds
            )
        })
        .collect::<Vec<_>>()
        .join("\n")
}
