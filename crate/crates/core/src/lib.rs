pub mod certify;
pub mod cli;
pub mod constants;
pub mod entropy;
pub mod error;
pub mod exact;
pub mod forms;
pub mod hypercube_norm;
pub mod lp_norm;
pub mod mixed_norms;

pub use error::{Error, Result};
pub use forms::{Coef, MonomialTerm, MultilinearForm};
