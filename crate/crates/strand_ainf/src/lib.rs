pub mod ainf_engine;
pub mod arc_diagram;
pub mod homology;
pub mod optrees;
pub mod shorthand;
pub mod strand_core;
pub mod tensor_class;
pub mod worked_examples;
