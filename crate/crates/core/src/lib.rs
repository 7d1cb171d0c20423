//! Species lifting for chemical reaction networks.
//!
//! The crate covers exact stoichiometric algebra, power-law/mass-action
//! kinetics, the lifting construction that adds a linearly dependent species
//! with ε-scaled rate constants, numerical dynamics restricted to
//! stoichiometric classes (equilibria, periodic orbits, Floquet multipliers)
//! and the bifurcation analysis of the homogenised Brusselator.

// comparisons are written so that NaN fails them
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bifurcation;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod kinetics;
pub mod lifting;
pub mod network;
pub mod parse;
pub mod rational;
pub mod stoich;

pub use error::{Error, ParseError, Result};
pub use kinetics::{mass_action_exponents, ExponentMatrix, KineticModel};
pub use lifting::{LiftSpec, LiftedFamily};
pub use network::{Complex, Crn, Reaction};
pub use parse::{parse_network, parse_network_file, serialize_network, NetworkFile};
pub use rational::Rational;
pub use stoich::{
    conservation_laws, is_homogeneous, network_rank, stoichiometric_matrix, StoichMatrix,
};
