pub mod linalg;
pub mod logform;
pub mod point;
pub mod poly;
pub mod ratfunc;
pub mod rational;

pub use linalg::{FMat2, Mat2, RMat2};
pub use logform::{residue, LogForm};
pub use point::ProjPoint;
pub use poly::Poly;
pub use ratfunc::RatFunc;
pub use rational::{int, q, Rational};
