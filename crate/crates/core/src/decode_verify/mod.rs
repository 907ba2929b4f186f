//! Model decoding, valuation tables, exhaustive verification and analytics.

pub mod analytics;
pub mod decode;
pub mod threevals;
pub mod verify;

pub use analytics::{count_mms_quadruples, count_mms_violations, find_mms_violations, marginal_matrix_csv, marginal_values, MmsViolation};
pub use decode::{decode_valuations, encode_assignment, DecodeError};
pub use threevals::{dump_threevals, dump_value_table, load_threevals, load_value_table, ThreeValsError};
pub use verify::{verify, VerifyError, VerifyOptions, VerifyReport};
