//! Fontaine-Laffaille, Kisin and Breuil modules over `W(F_q)` at finite
//! precision, with the functors between them.

pub mod ambient;
pub mod breuil;
pub mod campaign;
pub mod error;
pub mod fl;
pub mod functors;
pub mod gen;
pub mod json;
pub mod kisin;
pub mod matrix;
pub mod params;
pub mod pd;
pub mod ring;
pub mod sigma;
pub mod witt;

pub use ambient::Ambient;
pub use breuil::BreuilModule;
pub use error::{Error, Result};
pub use fl::FLModule;
pub use kisin::KisinModule;
pub use matrix::{RingMatrix, Verdict};
pub use params::AmbientParams;
pub use pd::{PDElement, Pd};
pub use ring::Ring;
pub use sigma::{Sigma, SigmaSeries};
pub use witt::{Witt, WittScalar};
