pub mod compare;
pub mod convert;
pub mod eval;
pub mod index;
pub mod run;
pub mod search;
