pub mod assembly;
pub mod transport;
