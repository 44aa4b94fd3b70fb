//! Crosstalk between two GKP-encoded bosonic modes.
//!
//! A beam splitter of transmissivity `η = q/(q + p·d1·d2)` maps a pair of
//! GKP codewords of dimensions `d1, d2` into the enlarged codes
//! `C_{n·d1} ⊗ C_{n·d2}` (`n = q + p·d1·d2`), where the logical pair survives
//! next to a maximally entangled `n`-dimensional gauge register. This crate
//! builds those states exactly in the discrete coset basis, removes the gauge
//! with a modular-arithmetic decoder, and estimates fidelities under Gaussian
//! displacement noise.
//!
//! ```
//! use gkp_crosstalk::{build_output_state, decode, perfect_transmission_check, Rational};
//! use rand::SeedableRng;
//!
//! let params = perfect_transmission_check(Rational::new(1, 5).unwrap(), 2, 2).unwrap();
//! assert_eq!((params.n(), params.r1(), params.r2()), (5, 4, 2));
//!
//! let state = build_output_state(1, 0, &params).unwrap();
//! let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
//! let out = decode(&state, &params, &mut rng).unwrap();
//! assert_eq!((out.mu1, out.mu2, out.consistent), (1, 0, true));
//! ```

pub mod crosstalk;
pub mod decoder;
pub mod error;
pub mod modular;
pub mod noise;
pub mod phase_space;
pub mod special;
pub mod state;

pub use crosstalk::{
    build_multiplexed_epr_state, build_output_state, build_symmetric_output,
    check_gauge_factorization, gauge_group_order, output_basis_index,
    perfect_transmission_check, transform_displacement, verify_gauge_factorization,
    CrosstalkParams, Mode,
};
pub use decoder::{
    apply_correction_and_reduce, apply_gauge_fix, decode, extract_logical,
    gauge_fix_dims, gauge_fix_permutation, gauge_index_from_outcome, invert_permutation,
    simulate_ancilla_measurement, DecodeOutcome, Measurement,
};
pub use error::{Error, Result};
pub use modular::{
    classify_eta, enumerate_admissible_etas, eta_for, extended_gcd, mod_inverse, BezoutPair,
    EtaClass, Rational,
};
pub use noise::{
    dv_baseline_fidelity, f_ideal, f_single, fidelity_upper_bound, mc_fidelity_estimate,
    sample_displacement, sample_eta_lognormal, FidelityBoundParams, McEstimate, NoiseParams,
};
pub use phase_space::{
    induced_partner_lattice, is_sublattice, lattice_contains, make_square_code,
    matching_scaling_matrix, symplectic_form, GkpCode, GkpLattice, PhaseVector,
};
pub use special::erf;
pub use state::DiscreteState;
