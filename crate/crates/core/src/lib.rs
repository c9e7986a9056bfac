//! Moments of quadratic Dirichlet L-functions over 𝔽_q[x].

pub mod bounds;
pub mod cache;
pub mod characters;
pub mod config;
pub mod error;
pub mod eulerprod;
pub mod ffpoly;
pub mod jet;
pub mod lfun;
pub mod moments;
pub mod quad;
pub mod trigsums;
pub mod verify;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use ffpoly::Poly;
pub use lfun::LPolynomial;
pub use quad::QuadraticAlgebraic;
