pub mod alpha;
pub mod block;
pub mod double_double;
pub mod error;
pub mod harness;
pub mod io;
pub mod kernel;
pub mod operator;
pub mod oracle;
pub mod params;
pub mod scalar;
pub mod theta;
pub mod trig;
mod theta_tables;

pub use block::BlockVector;
pub use error::{Error, Result};
pub use scalar::Scalar;
pub use theta::{ThetaTable, Tolerance};
