//! Library surface of the scenario runner: the scenario schema and the
//! execution/serialization layer used by the `corrtherm` binary.

pub mod run;
pub mod scenario;
