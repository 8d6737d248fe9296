pub mod algebra;
pub mod cli;
pub mod density;
pub mod error;
pub mod io;
pub mod pencil;
pub mod projective;
pub mod random;
pub mod sdiff;

pub use error::{Error, Result};
