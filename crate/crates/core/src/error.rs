use thiserror::Error;

/// Errors raised by the arithmetic kernel and the module functors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid ambient parameters: {0}")]
    InvalidParams(String),
    #[error("p = 2 is not supported: the GLS normal form is only available for odd p")]
    EvenPrime,
    #[error("element is not a unit (reduction mod p vanishes)")]
    NotAUnit,
    #[error("element is not divisible by p^{0}")]
    NotDivisible(u32),
    #[error("precision exhausted: needed {needed} digits, have {have}")]
    PrecisionExhausted { needed: u32, have: u32 },
    #[error("working precision p^{0} does not fit the 62-bit residue representation")]
    PrecisionOverflow(u32),
    #[error("u-degree {degree} does not fit below the divided-power bound {bound}")]
    DegreeOverflow { degree: usize, bound: usize },
    #[error("element is not in Fil^{needed} (valuation {got})")]
    NotInFil { needed: usize, got: usize },
    #[error("matrix is not invertible: residue determinant vanishes")]
    NotInvertible,
    #[error("matrix dimensions do not match: {0}")]
    Shape(String),
    #[error("filtration jumps malformed: {0}")]
    MalformedJumps(String),
    #[error("Fontaine-Laffaille module is not strong")]
    NotStrong,
    #[error("Kisin height check failed: {0}")]
    TooTall(String),
    #[error("determinant vanishes at precision")]
    SingularMatrix,
    #[error("Kisin module carries no GLS factorization")]
    MissingGlsForm,
    #[error("p^r times the inverse of f_0(Phi) is not integral")]
    A0NotScaledIntegral,
    #[error("section iteration did not stabilize within {0} steps")]
    NonConvergent(usize),
    #[error("section iterate {0} left Mat_d(S) (not divisible by p^r)")]
    NonIntegralIterate(usize),
    #[error("Fil^{0} is not a direct summand of the previous step")]
    NotDirectSummand(usize),
    #[error("hat-filtration index {0} exceeds r")]
    RecursionBudget(usize),
    #[error("Fontaine-Laffaille module is not unipotent: required when r = p - 1")]
    NotUnipotent,
    #[error("module is not crystalline: N(M) is not contained in uM")]
    NotCrystalline,
    #[error("section iteration invariant violated: {0}")]
    SectionInvariant(String),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("precision mismatch: {0}")]
    PrecisionMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
