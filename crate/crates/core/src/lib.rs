//! Sieved Pollaczek polynomials: exact values from the three-term recurrence
//! and uniform large-degree approximations built from the equilibrium
//! measure, Szegő function and Airy parametrices.

pub mod error;
pub mod quad;
pub mod oracle;
pub mod measure;
pub mod auxfun;
pub mod equilibrium;
pub mod airy;
pub mod asymptotics;
pub mod harness;

pub use error::{Error, Result};
pub use oracle::{FamilyParams, OracleValue, PolySequenceValue, ScaledComplex};
pub use auxfun::point::{BoundaryPoint, Side};
