//! Joint tail asymptotics for bivariate scale mixtures `(X, Y) = (R U₁, R U₂)`
//! with a radial factor in the Gumbel max-domain of attraction.

pub mod angular;
pub mod asymptotics;
pub mod dependence;
pub mod error;
pub mod functional;
pub mod model;
pub mod numerics;
pub mod oracle;
pub mod radial;
pub mod verify;

pub use angular::{AngularModelA, LimitData, LinearCombo};
pub use asymptotics::{Method, TailEstimate};
pub use dependence::{EtaFit, ExcessLimit, ExcessReport, IndexSource, ResidualIndex};
pub use error::{Error, Result};
pub use functional::{CriticalData, CustomShape, FunctionalModelB, WLaw, ZShape};
pub use model::{Margin, Model};
pub use oracle::{ConvergenceRow, ConvergenceTable, OracleConfig};
pub use radial::{MdaRow, MdaTable, RadialLaw};
