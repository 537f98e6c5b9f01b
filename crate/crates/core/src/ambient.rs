use crate::error::Result;
use crate::params::AmbientParams;
use crate::pd::Pd;
use crate::sigma::Sigma;
use crate::witt::{Witt, WittScalar};

/// The validated parameters together with the three coefficient rings.
/// Cheap to clone; all contexts are shared read-only.
#[derive(Clone, Debug)]
pub struct Ambient {
    pub params: AmbientParams,
    pub witt: Witt,
    pub sigma: Sigma,
    pub pd: Pd,
}

impl Ambient {
    pub fn new(params: AmbientParams) -> Result<Self> {
        let witt = Witt::new(&params)?;
        let sigma = Sigma::new(&params, &witt);
        let pd = Pd::new(&params, &witt, &sigma);
        Ok(Ambient { params, witt, sigma, pd })
    }

    /// `p`, `r = 0..p-1`, `N_p`, everything else at its default.
    pub fn standard(p: u64, r: u32, n_p: u32) -> Result<Self> {
        Self::new(AmbientParams::new(p, r, n_p)?)
    }

    pub fn p(&self) -> u64 {
        self.params.p
    }

    pub fn r(&self) -> u32 {
        self.params.r
    }

    pub fn n_p(&self) -> u32 {
        self.params.n_p
    }

    pub fn a(&self) -> WittScalar {
        self.witt.from_ints(&self.params.a)
    }

    /// `p^k` as a scalar.
    pub fn p_pow(&self, k: u32) -> WittScalar {
        self.witt.mul_p_pow(&self.witt.one(), k)
    }
}
