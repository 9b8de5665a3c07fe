pub mod model;
pub mod rdf;
pub mod segments;
pub mod store;
pub mod temporal;
#[cfg(feature = "testing")]
pub mod testing;
pub mod time;
