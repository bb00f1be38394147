//! Numerical laboratory for conformal-welding pairs: truncated Grunsky
//! operators, Fredholm-determinant potentials, the universal Liouville action,
//! and the genus-two octagon group at the Fuchsian basepoint.

// `!(x > 0.0)` is used throughout to reject NaN along with bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fft;
pub mod fuchsian;
pub mod grunsky;
pub mod liouville;
pub mod maps;
pub mod quadrature;
pub mod series;

pub use error::{Error, Result};
pub use maps::{Family, MoebiusTransform, StarDomain, WeldingPair};
pub use quadrature::QuadratureGrid;
pub use series::{ComplexSeries, SeriesKind};
