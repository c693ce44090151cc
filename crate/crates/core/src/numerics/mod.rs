//! General-purpose numerical building blocks.

pub mod grid;
pub mod interp;
pub mod ode;
pub mod quadrature;
pub mod roots;
pub mod special;
