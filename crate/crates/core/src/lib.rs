pub mod cone;
pub mod claim;
pub mod criteria;
pub mod expr;
pub mod lattice;
pub mod rational;
pub mod search;
pub mod surface;
