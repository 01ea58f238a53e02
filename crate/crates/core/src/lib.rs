//! Character-level Iwasawa invariants of abelian fields: ℓ-adic character
//! algebra, decomposition data in cyclotomic towers, defect characters and
//! λ-shifts, finite-level orders of elementary Λ-modules, and Tate
//! cohomology of finite cyclic-group modules.

pub mod arith;
pub mod asymptotics;
pub mod characters;
pub mod cohomology;
pub mod defect;
pub mod error;
pub mod groups;
pub mod splitting;

pub use error::{Error, ErrorKind, Result};

pub use asymptotics::{ElementaryModuleSpec, FitOutcome, FittedParameters, LevelOrderTable};
pub use characters::{AbsChar, LadicChar, Parity, VirtualChar};
pub use cohomology::{AmbiguousInput, FiniteGammaModule};
pub use defect::{BaseSymbol, CaseTag, LambdaExpr};
pub use groups::{FiniteAbelianGroup, GroupElement, Subgroup};
pub use splitting::{FieldSpec, PrimeLocalData};
