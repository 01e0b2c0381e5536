pub mod group;
pub mod group_ring;
pub mod novikov;
pub mod ring;
