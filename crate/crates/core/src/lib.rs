//! Constant-weight codes under the l1 metric: bounds, designs, orbit
//! development, constructions and exact search.

pub mod bounds;
pub mod code;
pub mod construct;
pub mod designs;
pub mod develop;
pub mod error;
pub mod io;
pub mod par;
pub mod search;

pub use code::{
    distance_via_overlap, l1_distance, l1_weight, type_census, unc_packing, verify_code, Code, CodeParams, Codeword,
    MinDistance, TypeCensus, VerificationReport, UNBOUNDED,
};
pub use error::{Error, Result};
pub use par::Strategy;
