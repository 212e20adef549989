//! Discrete variational calculus on weighted finite graphs and numerical
//! tools for a nonhomogeneous `(p,q)`-Kirchhoff system with concave-convex
//! nonlinearities posed on `Ω ∪ ∂Ω`.

pub mod graph;
pub mod par;
pub mod spaces;
pub mod kirchhoff;
pub mod solvers;
pub mod analysis;
