pub mod complex;
pub mod matrix;
pub mod smith;
