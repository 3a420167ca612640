pub mod boundary;
pub mod catalog;
pub mod cli;
pub mod exact;
pub mod geometry;
pub mod jet;
pub mod profile;
pub mod ode;
pub mod poly;
pub mod quadrature;
pub mod roots;
pub mod solver;
