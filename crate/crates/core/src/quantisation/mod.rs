//! Hilbert and Fubini–Study maps, Bergman functions and the centre of mass.

mod export;
mod form;
mod fs;
mod level;

pub use export::{bergman_csv, matrix_csv};
pub use form::HermitianForm;
pub use fs::{FsData, FsSample};
pub use level::{BergmanSample, LevelData};
