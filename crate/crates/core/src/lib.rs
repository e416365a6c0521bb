pub mod specfun;
pub mod exactpoly;
pub mod besselzero;
pub mod zetacont;
pub mod basemanifold;
pub mod modelops;
pub mod torsion;
pub mod cli;
