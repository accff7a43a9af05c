//! Correlations of pairs of qudits in Bloch coordinates.
//!
//! Generalized Gell-Mann generators and their structure constants, density
//! matrices in Bloch form, local projective measurements, and the geometric
//! discord measures D₁ (trace norm) and D₂ (Hilbert–Schmidt) with their
//! universal lower bounds. Seeded samplers drive Monte Carlo checks of the
//! bounds.
//!
//! Numerical routines are generic over [`scalar::Real`] (`f32` or `f64`);
//! the `*F64` aliases below fix the usual double-precision choice.
//!
//! ```
//! use quditcorr::{d1_discord, make_family, FamilySpec, GellMannBasis, OptimizerConfig};
//! use quditcorr::linalg::identity;
//!
//! let basis = GellMannBasis::<f64>::new(2).unwrap();
//! let bell = make_family(&FamilySpec::AA { t: 1.0, u1: identity(2), u2: identity(2) }, &basis).unwrap();
//! let cfg = OptimizerConfig { starts: 4, ..OptimizerConfig::with_seed(1) };
//! let r = d1_discord(&bell, &basis, &cfg).unwrap();
//! assert!((r.value - 1.0).abs() < 1e-6);
//! ```

pub mod discord;
pub mod error;
pub mod io;
pub mod linalg;
pub mod measurement;
pub mod optimize;
pub mod sampling;
pub mod scalar;
pub mod states;
pub mod su_algebra;

pub use discord::{
    analytic_d1, d1_discord, d1_objective, d2_discord, d2_objective, extract_family_parameter, i0_matrix,
    isotropic_state, lower_bounds, make_family, oracle_d1, t_range, werner_singlet_mixture, werner_state, xi,
    DiscordResult, FamilyKind, FamilyMatch, FamilySpec, I0Matrix, Measure, Normalization, OptimizerConfig,
};
pub use error::{Error, Result, StateViolation};
pub use measurement::{
    apply_local_measurement, bloch_projector, canonical_measurement, disturbance, measurement_from_unitary,
    ProjectiveMeasurement,
};
pub use sampling::{
    haar_unitary, random_density, random_lmm_state, run_bound_experiment, run_containment_experiment, stream_rng,
    Ensemble, ExperimentReport, SamplerConfig,
};
pub use scalar::Real;
pub use states::{
    bipartite_compose, bipartite_decompose, bloch_to_density, density_to_bloch, partial_trace, ppt_min_eigenvalue,
    BipartiteState, BlochVector, DensityMatrix, Subsystem,
};
pub use su_algebra::{
    adjoint_rep, dims_table, generate_basis, structure_constants, AdjointMatrix, GellMannBasis, GroupDims,
    StructureTensors,
};

pub type GellMannBasisF64 = GellMannBasis<f64>;
pub type StructureTensorsF64 = StructureTensors<f64>;
pub type BlochVectorF64 = BlochVector<f64>;
pub type DensityMatrixF64 = DensityMatrix<f64>;
pub type BipartiteStateF64 = BipartiteState<f64>;
pub type ProjectiveMeasurementF64 = ProjectiveMeasurement<f64>;
pub type DiscordResultF64 = DiscordResult<f64>;
pub type FamilySpecF64 = FamilySpec<f64>;

pub type GellMannBasisF32 = GellMannBasis<f32>;
pub type BipartiteStateF32 = BipartiteState<f32>;
