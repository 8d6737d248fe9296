//! Projectively equivariant symbol calculus and the pencil liftings built
//! from it.

mod lift;
mod symbol;
mod table;

pub use lift::{
    dlo_pencil, full_symbol, graded_decompose, proj_generators, quantize, quantize_pencil, schwarzian_scalar,
    second_order_selfadjoint_family, second_order_selfadjoint_params, self_adjointness_filter, triangular_family_lift,
    SelfAdjointnessReport, TriangularFamilyParams,
};
pub use symbol::{symbol_lie, SymbolPoly};
pub use table::{
    a_d, b_d, dlo_table, solve_dlo_table, table_cache_dir, verify_table, DloTable, TableJson, TABLE_CACHE_ENV,
};
