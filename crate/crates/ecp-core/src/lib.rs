//! Exact state-vector simulation of entanglement concentration driven by
//! photonic Faraday rotation in low-Q cavities.
//!
//! A single photon (or a single cavity atom) at the middle station picks up
//! a polarization-conditional phase on reflection; Hadamards and a
//! three-particle measurement then herald whether the two remote particles
//! were projected onto a maximally entangled state. The crate provides
//!
//! * [`state`] — labeled registers, dense complex amplitudes, gates,
//!   projective branch enumeration, seeded sampling, concurrence/fidelity;
//! * [`faraday`] — the input-output reflection coefficients, the phase pair
//!   (φ, φ0), the conditional gate, and experimental-feasibility helpers;
//! * [`protocols`] — the atomic and photonic concentration circuits and
//!   their GHZ-class generalizations, with structural success
//!   classification;
//! * [`analysis`] — detuning/coupling-mismatch and coefficient-deviation
//!   fidelities, parameter sweeps, and Monte Carlo statistics.
//!
//! Conventions, frozen throughout: label order is big-endian (first label =
//! most significant bit); atoms encode |g_L⟩ ↦ 0, |g_R⟩ ↦ 1 and photons
//! |L⟩ ↦ 0, |R⟩ ↦ 1; all randomness flows through an explicitly seeded
//! ChaCha8 generator.

pub mod analysis;
pub mod error;
pub mod faraday;
pub mod gate;
pub mod protocols;
pub mod register;
pub mod state;

pub use analysis::{
    deviation_fidelity_analytic, deviation_fidelity_simulated, linspace,
    mismatch_fidelity_analytic, mismatch_fidelity_simulated, monte_carlo_protocol, sweep,
    DeviationSpec, MismatchFidelity, MonteCarloResult, SweepAxis, SweepConfig, SweepResult,
    SweepRow, SweepTable,
};
pub use error::{Error, Result};
pub use faraday::{
    cavity_q_factor, coupling_from_position, detuning_conventions, faraday_gate,
    kappa_from_finesse, mod_two_pi, omega_from_wavelength, phase_pair, reflection_coupled,
    reflection_empty, CavityParams, DetuningConvention, FaradayGateSpec, LeakageMode, PhasePair,
    PhotonAnchor, SPEED_OF_LIGHT,
};
pub use gate::{Gate, GateMatrix};
pub use protocols::{
    atomic_ecp, atomic_ghz_ecp, photonic_ecp, photonic_ghz_ecp, run_protocol,
    success_probability_analytic, Correction, GhzSpec, PairSpec, ProtocolBranch, ProtocolKind,
    ProtocolOptions, ProtocolResult, ProtocolSpec, MAX_GHZ_N,
};
pub use register::{QubitLabel, Role};
pub use state::{Branch, StateVector};
