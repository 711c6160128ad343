pub mod axb;
pub mod error;
pub mod finite;
pub mod freegrp;
pub mod grid;
pub mod heisenberg;
pub mod io;
pub mod nclp;
pub mod random;
pub mod report;
pub mod spherical;

pub use error::{Error, Result};
pub use nclp::{OpenInterval, SingularProfile, TracedElement};
pub use num_complex::Complex64;
