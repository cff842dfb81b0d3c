pub mod central;
pub mod eala;
pub mod error;
pub mod graded;
pub mod lattice;
pub mod lie;
pub mod linalg;
pub mod matrix_lie;
pub mod reflection;
pub mod report;
pub mod roots;
pub mod scalar;
