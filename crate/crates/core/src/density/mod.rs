//! Weight-zero differential operators on densities of arbitrary weight,
//! represented in the normal form over `Q[x][d, w]`.

mod fields;
mod operator;
mod quasi;

pub use fields::{
    ad_action, ad_action_at, decompose_first_order, divergence_hat, FirstOrderParts, HatVectorField, VectorField,
};
pub use operator::{vertical_order, DensityOperator, OperatorTerm, TermKey};
pub use quasi::{long_bracket, QuasiDensity};
