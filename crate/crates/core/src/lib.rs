pub mod arith;
pub mod graph;
pub mod gpa;
pub mod cells;
pub mod relations;
pub mod solver;
pub mod cli;
