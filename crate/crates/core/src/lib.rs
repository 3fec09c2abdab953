pub mod cli;
pub mod cloneengine;
pub mod config;
pub mod interval;
pub mod linmodel;
pub mod machida;
pub mod monoid;
pub mod poset;
pub mod report;
