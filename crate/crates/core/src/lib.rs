//! Free-probability transforms, single-ring spectra and Monte Carlo checks
//! for biunitarily invariant random matrices.

pub mod analytic;
pub mod ensembles;
pub mod error;
pub mod montecarlo;
pub mod quaternion;
pub mod series;
pub mod single_ring;
pub mod transforms;

pub use analytic::{AnalyticFn, ClosedForm};
pub use ensembles::{CommutatorConvention, EnsembleSpec};
pub use error::{Error, Result};
pub use series::{SeriesError, TruncatedSeries};
pub use transforms::{CumulantData, DeterminingSequence, MomentData, TransformKind, TransformSeries};
