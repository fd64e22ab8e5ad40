//! Truncated q-character series for the untwisted affine algebras of types
//! A, B, C, D, the Casorati determinants built from them, and checkers for
//! the polynomial relations they satisfy at the series and character level.

pub mod builders;
pub mod character;
pub mod determinant;
pub mod fixtures;
pub mod identities;
pub mod laurent;
pub mod monomial;
pub mod root_data;
pub mod series;
pub mod weight;

pub use laurent::{LaurentPoly, RationalFn};
pub use monomial::LMonomial;
pub use root_data::{AlgebraContext, AlgebraType, BoxIndex};
pub use series::GradedSeries;
pub use weight::XWeight;
