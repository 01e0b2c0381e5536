pub mod decomposition;
pub mod gain_graph;
pub mod poset;
