//! Pseudo-convergent sequences over concrete valued fields, Taylor dominance
//! via Hasse-Schmidt derivatives, and explicit complete-intersection stage
//! chains with their transition maps.

pub mod ci_stages;
pub mod lab;
pub mod ordered_values;
pub mod poly_calc;
pub mod pseudo_seq;
pub mod valued_arith;
