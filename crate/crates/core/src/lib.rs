//! Exact evolution of two spin-1/2 particles under the isotropic Heisenberg
//! Hamiltonian in a z-directed magnetic field, the Fubini–Study geometry of
//! the reachable states, and their concurrence.
//!
//! Basis ordering everywhere is `|↑↑⟩, |↑↓⟩, |↓↑⟩, |↓↓⟩`, and ħ = 1.

pub mod entanglement;
pub mod hamiltonian;
pub mod manifold;
pub mod qstate;
pub mod scenario;

pub use entanglement::{
    concurrence, concurrence_disentangled, concurrence_evolved, concurrence_wootters_oracle,
    constant_entanglement_circle, max_entanglement_time, product_state, ConcurrenceProfile, EntanglementError,
    ProductKind,
};
pub use hamiltonian::{eigensystem, propagator_analytic, propagator_spectral, EigenSystem, SystemParams};
pub use manifold::{
    classify, diagonalize_check, evolve_family, family_invariants, metric_analytic, metric_numeric, params_to_point,
    FamilyInvariants, ManifoldError, ManifoldKind, ManifoldReport, MetricTensor2, TorusPoint,
};
pub use qstate::{apply, fs_distance_sq, inner, ray_equal, ComplexAmp, Operator4, PureState2Q, StateError};
