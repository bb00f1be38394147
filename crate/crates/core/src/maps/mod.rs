//! Construction and normalization of welding pairs.

pub mod domain;
pub mod moebius;
pub mod pair;
pub mod schwarzian;
pub mod theodorsen;

pub use domain::{RadiusFunction, StarDomain, SMOOTHNESS_CAP};
pub use moebius::MoebiusTransform;
pub use pair::{
    catalog, exterior_via_inversion, invert_map, invert_pair, normalize_pair, CatalogOptions, Family, PairDocument,
    PairResiduals, WeldingPair,
};
pub use schwarzian::{locate, schwarzian, schwarzian_fn, theta, Side, ThetaOptions};
pub use theodorsen::{damping_for, theodorsen_interior, TheodorsenMap, TheodorsenOptions};
