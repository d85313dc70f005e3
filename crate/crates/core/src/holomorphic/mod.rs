//! Holomorphic expressions `h(z)` and their exact 2-jets.

mod eval;
mod expr;
mod parse;

pub use eval::{eval, eval_jet2, ComplexJet2, POLE_EPS};
pub use expr::HoloExpr;
pub use parse::{parse_complex, parse_holomorphic};
