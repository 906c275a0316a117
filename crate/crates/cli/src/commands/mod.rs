pub mod convert;
pub mod correlate;
pub mod eval;
pub mod extract;
pub mod split;
