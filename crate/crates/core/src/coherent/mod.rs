//! Coherent states of the deformed oscillator and the integrals built on them.

mod density;
mod expectation;
mod kernel;
mod measure;
mod state;
mod traces;

pub use measure::{ln_coeff_sq, ln_inv_norm, ln_resolution_density, RadialMeasure, RadialNode, RadialPoint, RadialSpec};
pub use state::{coherent_vector, identity_resolution_check, overlap, CoherentVector, ResolutionReport};
pub use density::{density_from_weight, gaussian_weight, gaussian_weight_mass, projector_reconstruct, rho_function, trace_with, DensityCoefficients};
pub use kernel::{kernel_diagonal_series, kernel_hermiticity_gap, kernel_idempotence, kernel_k, kernel_weight, reproducing_check, reproducing_check_displayed_order, KernelCheck, KernelValue};
pub use expectation::{cs_expectation_antinormal, cs_expectation_normal, quadrature_moments, sandwich, Expectation, QuadratureMoments};
pub use traces::{gaussian_density, kerr_expectation, kerr_spectral, spectral_sum, trace_antinormal_closed, trace_antinormal_spectral, trace_hamiltonian, trace_normal_closed, trace_normal_integral, trace_number_display, trace_position, HamiltonianTrace, PositionTrace};
