//! Oscillator model: coefficients, wavefunctions, velocity fields, potentials.

pub mod params;
pub mod potential;
pub mod special;
pub mod velocity;
pub mod wavefunction;

pub use params::{derive_params, energy, Branch, OscillatorParams};
pub use potential::{
    classical_potential, quantum_potential, quantum_potential_numeric, total_potential,
    total_potential_grid, PotentialGrid, RealGrid,
};
pub use special::{hermite_poly, hyp2f1_terminating};
pub use velocity::{
    velocity_excited, velocity_ground, velocity_numeric, StateField, Velocity, VelocityField,
    ZeroField, DIFF_STEP, SINGULARITY_FLOOR,
};
pub use wavefunction::{coeff_ckl, eval_eigenstate, excited_node, gaussian_exponent, ComplexPoint, EigenstateSpec};
