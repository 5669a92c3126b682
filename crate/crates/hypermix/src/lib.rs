//! File formats, element literals, the descriptor runner and the invariant
//! suite for `hypermix-core`. The `hypermix` binary is a thin clap front-end
//! over [`run::run`].

pub mod descriptor;
pub mod expr;
pub mod format;
pub mod random;
pub mod run;
pub mod verify;
