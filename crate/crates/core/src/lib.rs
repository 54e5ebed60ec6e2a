pub mod surge;
pub mod geom;
pub mod zones;
pub mod exposure;
pub mod econ;
