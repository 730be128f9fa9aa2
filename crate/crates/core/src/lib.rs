//! Curve-resolution numerics workbench.
//!
//! A library for studying rank deficiency in bilinear spectrokinetic data:
//! dense linear algebra with rank diagnostics ([`matcore`]), adaptive
//! Runge–Kutta integration ([`odeint`]), mass-action kinetics with dosing
//! ([`kinetics`]), bilinear data synthesis and spectral recovery
//! ([`bilinear`]), external/internal normalization ([`normalization`]),
//! matrix irreducibility ([`reducibility`]), equilibrium titration
//! speciation ([`speciation`]), and signal-contribution-function geometry
//! on two-component feasible regions ([`scf`]).

pub mod bilinear;
pub mod kinetics;
pub mod matcore;
pub mod normalization;
pub mod odeint;
pub mod reducibility;
pub mod scf;
pub mod speciation;

mod error;

pub use error::{Error, Result};
pub use matcore::Matrix;
