//! The `laffaille/v1` JSON format. Every file is a document carrying the
//! schema tag, the ambient parameters and one object, so that it can be
//! re-read without any other context.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ambient::Ambient;
use crate::breuil::BreuilModule;
use crate::error::{Error, Result};
use crate::fl::FLModule;
use crate::functors::SectionResult;
use crate::kisin::{GlsParts, KisinModule};
use crate::matrix::RingMatrix;
use crate::params::AmbientParams;
use crate::pd::PDElement;
use crate::sigma::SigmaSeries;
use crate::witt::WittScalar;

pub const SCHEMA: &str = "laffaille/v1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarJson {
    pub coeffs: Vec<String>,
    pub prec: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaJson {
    pub ucoeffs: Vec<ScalarJson>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdJson {
    pub gcoeffs: Vec<ScalarJson>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub tail_dirty: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson<T> {
    pub rows: usize,
    pub cols: usize,
    #[serde(default)]
    pub denom_exp: u32,
    pub entries: Vec<Vec<T>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlJson {
    pub d: usize,
    pub jumps: Vec<u32>,
    #[serde(rename = "Ftil")]
    pub ftil: MatrixJson<ScalarJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlsJson {
    #[serde(rename = "X")]
    pub x: MatrixJson<SigmaJson>,
    pub jumps: Vec<u32>,
    #[serde(rename = "Y")]
    pub y: MatrixJson<SigmaJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KisinJson {
    pub d: usize,
    #[serde(rename = "A")]
    pub a: MatrixJson<SigmaJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gls: Option<GlsJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BreuilJson {
    pub d: usize,
    #[serde(rename = "Phi")]
    pub phi: MatrixJson<PdJson>,
    #[serde(rename = "Nmat", default, skip_serializing_if = "Option::is_none")]
    pub nmat: Option<MatrixJson<PdJson>>,
    #[serde(rename = "C")]
    pub c: MatrixJson<PdJson>,
    pub jumps: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionJson {
    #[serde(rename = "Bmat")]
    pub bmat: MatrixJson<PdJson>,
    pub iterations: usize,
    pub residual: u32,
    pub b0_claim_ok: bool,
    #[serde(rename = "B0")]
    pub b0: MatrixJson<PdJson>,
    #[serde(rename = "A0")]
    pub a0: MatrixJson<ScalarJson>,
    pub rate_bound: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectJson {
    FlModule(FlJson),
    KisinModule(KisinJson),
    BreuilModule(BreuilJson),
    Section(SectionJson),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub schema: String,
    pub params: AmbientParams,
    pub object: ObjectJson,
}

/// The native objects a document can carry.
#[derive(Clone, Debug)]
pub enum Object {
    Fl(FLModule),
    Kisin(KisinModule),
    Breuil(BreuilModule),
    Section(SectionResult),
}

// --- encoding --------------------------------------------------------------

pub fn scalar_json(x: &WittScalar) -> ScalarJson {
    ScalarJson { coeffs: x.coeffs().iter().map(|c| c.to_string()).collect(), prec: x.prec() }
}

pub fn sigma_json(x: &SigmaSeries) -> SigmaJson {
    SigmaJson { ucoeffs: x.coeffs().iter().map(scalar_json).collect(), truncated: x.truncated() }
}

pub fn pd_json(amb: &Ambient, x: &PDElement) -> PdJson {
    let full = amb.witt.work_prec();
    let g = x.gcoeffs();
    let mut len = g.len();
    while len > 0 && g[len - 1].prec() >= full && amb.witt.is_zero(&g[len - 1]) {
        len -= 1;
    }
    PdJson { gcoeffs: g[..len].iter().map(scalar_json).collect(), tail_dirty: x.tail_dirty() }
}

pub fn matrix_json<E: Clone, T>(m: &RingMatrix<E>, f: impl Fn(&E) -> T) -> MatrixJson<T> {
    MatrixJson {
        rows: m.rows(),
        cols: m.cols(),
        denom_exp: m.denom_exp,
        entries: m.to_rows().iter().map(|r| r.iter().map(&f).collect()).collect(),
    }
}

pub fn object_json(amb: &Ambient, obj: &Object) -> ObjectJson {
    let pdm = |m: &RingMatrix<PDElement>| matrix_json(m, |x| pd_json(amb, x));
    match obj {
        Object::Fl(m) => ObjectJson::FlModule(FlJson {
            d: m.d(),
            jumps: m.jumps.clone(),
            ftil: matrix_json(&m.ftil, scalar_json),
        }),
        Object::Kisin(k) => ObjectJson::KisinModule(KisinJson {
            d: k.d(),
            a: matrix_json(&k.a, sigma_json),
            gls: k.gls.as_ref().map(|g| GlsJson {
                x: matrix_json(&g.x, sigma_json),
                jumps: g.jumps.clone(),
                y: matrix_json(&g.y, sigma_json),
            }),
        }),
        Object::Breuil(b) => ObjectJson::BreuilModule(BreuilJson {
            d: b.d(),
            phi: pdm(&b.phi),
            nmat: b.nmat.as_ref().map(pdm),
            c: pdm(&b.c),
            jumps: b.jumps.clone(),
        }),
        Object::Section(s) => ObjectJson::Section(SectionJson {
            bmat: pdm(&s.bmat),
            iterations: s.iterations,
            residual: s.residual,
            b0_claim_ok: s.b0_claim_ok,
            b0: pdm(&s.b0),
            a0: matrix_json(&s.a0, scalar_json),
            rate_bound: s.rate_bound,
        }),
    }
}

pub fn document(amb: &Ambient, obj: &Object) -> Document {
    Document { schema: SCHEMA.into(), params: amb.params.clone(), object: object_json(amb, obj) }
}

pub fn to_string(amb: &Ambient, obj: &Object) -> String {
    serde_json::to_string_pretty(&document(amb, obj)).expect("documents always serialize")
}

// --- decoding --------------------------------------------------------------

pub fn scalar_from(amb: &Ambient, s: &ScalarJson) -> Result<WittScalar> {
    let w = &amb.witt;
    let cs = s
        .coeffs
        .iter()
        .map(|c| c.parse::<u64>().map_err(|e| Error::SchemaMismatch(format!("coefficient {c:?}: {e}"))))
        .collect::<Result<Vec<_>>>()?;
    if s.prec > w.work_prec() {
        return Err(Error::PrecisionMismatch(format!(
            "precision {} exceeds the working precision {}",
            s.prec,
            w.work_prec()
        )));
    }
    let bound = amb.p().checked_pow(s.prec).unwrap_or(u64::MAX);
    if cs.iter().any(|&c| c >= bound) {
        return Err(Error::PrecisionMismatch(format!("residue not reduced mod p^{}", s.prec)));
    }
    w.from_residues(&cs, s.prec)
}

pub fn sigma_from(amb: &Ambient, s: &SigmaJson) -> Result<SigmaSeries> {
    if s.ucoeffs.len() > amb.sigma.n_u() {
        return Err(Error::PrecisionMismatch(format!("more than N_u = {} u-coefficients", amb.sigma.n_u())));
    }
    let cs = s.ucoeffs.iter().map(|c| scalar_from(amb, c)).collect::<Result<Vec<_>>>()?;
    Ok(amb.sigma.from_coeffs_flagged(cs, s.truncated))
}

pub fn pd_from(amb: &Ambient, x: &PdJson) -> Result<PDElement> {
    if x.gcoeffs.len() > amb.pd.n_gamma() {
        return Err(Error::PrecisionMismatch(format!("more than N_gamma = {} gamma-coefficients", amb.pd.n_gamma())));
    }
    let g = x.gcoeffs.iter().map(|c| scalar_from(amb, c)).collect::<Result<Vec<_>>>()?;
    let e = amb.pd.from_gcoeffs(g);
    Ok(if x.tail_dirty { amb.pd.mark_dirty(e) } else { e })
}

pub fn matrix_from<E: Clone, T>(m: &MatrixJson<T>, f: impl Fn(&T) -> Result<E>) -> Result<RingMatrix<E>> {
    if m.entries.len() != m.rows || m.entries.iter().any(|r| r.len() != m.cols) {
        return Err(Error::SchemaMismatch(format!("matrix entries do not form {}x{}", m.rows, m.cols)));
    }
    let rows = m.entries.iter().map(|r| r.iter().map(&f).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
    let mut out = if m.rows == 0 { RingMatrix::from_fn(0, m.cols, |_, _| unreachable!()) } else { RingMatrix::from_rows(rows)? };
    out.denom_exp = m.denom_exp;
    Ok(out)
}

fn check_d(d: usize, n: usize, what: &str) -> Result<()> {
    if d != n {
        return Err(Error::SchemaMismatch(format!("d = {d} but {what} has size {n}")));
    }
    Ok(())
}

pub fn object_from(amb: &Ambient, o: &ObjectJson) -> Result<Object> {
    let pdm = |m: &MatrixJson<PdJson>| matrix_from(m, |x| pd_from(amb, x));
    let sgm = |m: &MatrixJson<SigmaJson>| matrix_from(m, |x| sigma_from(amb, x));
    Ok(match o {
        ObjectJson::FlModule(m) => {
            check_d(m.d, m.jumps.len(), "jumps")?;
            Object::Fl(FLModule::new(amb, m.jumps.clone(), matrix_from(&m.ftil, |x| scalar_from(amb, x))?)?)
        }
        ObjectJson::KisinModule(k) => {
            let a = sgm(&k.a)?;
            check_d(k.d, a.rows(), "A")?;
            let gls = match &k.gls {
                Some(g) => Some(GlsParts { x: sgm(&g.x)?, jumps: g.jumps.clone(), y: sgm(&g.y)? }),
                None => None,
            };
            Object::Kisin(KisinModule { a, gls })
        }
        ObjectJson::BreuilModule(b) => {
            check_d(b.d, b.jumps.len(), "jumps")?;
            let m = BreuilModule {
                phi: pdm(&b.phi)?,
                nmat: b.nmat.as_ref().map(pdm).transpose()?,
                c: pdm(&b.c)?,
                jumps: b.jumps.clone(),
            };
            m.check(amb)?;
            Object::Breuil(m)
        }
        ObjectJson::Section(s) => Object::Section(SectionResult {
            bmat: pdm(&s.bmat)?,
            iterations: s.iterations,
            residual: s.residual,
            b0_claim_ok: s.b0_claim_ok,
            b0: pdm(&s.b0)?,
            a0: matrix_from(&s.a0, |x| scalar_from(amb, x))?,
            rate_bound: s.rate_bound,
        }),
    })
}

/// Parses a document, checking the schema tag before anything else and
/// validating the parameters (which rejects `p = 2`).
pub fn from_str(s: &str) -> Result<(Ambient, Object)> {
    let v: Value = serde_json::from_str(s).map_err(|e| Error::SchemaMismatch(e.to_string()))?;
    match v.get("schema").and_then(Value::as_str) {
        Some(SCHEMA) => {}
        Some(other) => return Err(Error::SchemaMismatch(format!("schema {other:?}, expected {SCHEMA:?}"))),
        None => return Err(Error::SchemaMismatch("missing schema tag".into())),
    }
    if v.pointer("/params/p").and_then(Value::as_u64) == Some(2) {
        return Err(Error::EvenPrime);
    }
    let doc: Document = serde_json::from_value(v).map_err(|e| Error::SchemaMismatch(e.to_string()))?;
    doc.params.validate()?;
    let amb = Ambient::new(doc.params.clone())?;
    let obj = object_from(&amb, &doc.object)?;
    Ok((amb, obj))
}
