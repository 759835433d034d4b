//! Exact computation with Dedekind eta-quotients on `Γ₀(N)`.

pub mod arith;
pub mod curve;
pub mod decompose;
pub mod error;
pub mod etaquot;
pub mod linalg;
pub mod qseries;
pub mod search;
pub mod spaces;

pub use curve::WeierstrassCurve;
pub use decompose::{DecomposeOptions, DecompositionResult, TargetForm};
pub use error::{Error, Result};
pub use etaquot::{Classification, CuspOrders, EtaQuotient, NebentypusChar, UnimodularMatrix};
pub use qseries::FracSeries;
pub use search::{SearchConfig, SearchReport, SpaceKind, VanishingTuple};
pub use spaces::{Cusp, ExistenceVerdict, LevelProfile};
