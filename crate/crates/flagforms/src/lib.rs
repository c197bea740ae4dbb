//! Command-line workbench around [`flagforms_core`]: the expression parser,
//! JSON file formats, parallel Monte Carlo, the convention ledger and the
//! verification suites.

pub mod checks;
pub mod json;
pub mod ledger;
pub mod mc;
pub mod paper;
pub mod parse;
