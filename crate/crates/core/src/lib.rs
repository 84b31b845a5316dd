//! Exact coefficients and saddle-point asymptotics for exponential
//! generating functions of the form `exp(m·e^(b·x) + r·e^(d·x) + s)`.

pub mod asymptotics;
pub mod numerics;
pub mod oeis;
pub mod richardson;
pub mod series;
pub mod params;
pub mod saddle;
