//! Text and JSON front ends.

mod dsl;
mod json;

pub use dsl::{max_index, parse_operator, parse_poly, parse_symbol, MAX_EXPONENT};
pub use json::{
    field_strings, DensityJson, MatrixJson, OperatorJson, PartJson, SdiffParamsJson, SymbolJson, SymbolTermJson,
    TermJson, VolumeJson,
};
