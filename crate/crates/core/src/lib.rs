pub mod algebra;
pub mod derived;
pub mod field;
pub mod filtration;
pub mod fuzz;
pub mod generators;
pub mod graded;
pub mod io;
pub mod linalg;
pub mod module;
pub mod resolution;
pub mod workbench;
