pub mod eval;
pub mod filter;
pub mod netspec;
pub mod project;
pub mod simulate;
