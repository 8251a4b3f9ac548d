pub mod bundled;
pub mod datatypes;
pub mod docgen;
pub mod engine;
pub mod ns;
pub mod operator;
pub mod rdf;
pub mod validate;
pub mod vocab;
