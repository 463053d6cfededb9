//! Twisted spin bordism computations over A(1).

pub mod a1;
pub mod catalog;
pub mod cli;
pub mod gf2;
pub mod groups;
pub mod les;
pub mod decompose;
pub mod ext;
pub mod module;
pub mod obstruction;
pub mod pipeline;
pub mod space;
