//! Two-qubit dephasing, its Kraus decompositions, and the exchange symmetry
//! of Bell states under each decomposition.
//!
//! Basis order throughout is `|00⟩, |01⟩, |10⟩, |11⟩`; index bit 1 is qubit A
//! and bit 0 is qubit B.

pub mod channel;
pub mod error;
pub mod kraus;
pub mod linalg;
pub mod random;
pub mod spinbath;
pub mod symmetry;

pub use channel::{
    apply_dephasing, apply_dephasing_factors, dephase_matrix, gamma_factor, monte_carlo_dephasing,
    single_flip_decay, ChannelParams, DephasingFactors, MonteCarloEstimate, NoiseTrajectoryConfig,
};
pub use error::{Error, Result};
pub use kraus::{
    apply_kraus, canonical_kraus, channels_equal, choi_of_channel, kraus_from_choi, mix_kraus,
    ChoiMatrix, KrausFactors, KrausSet, KrausSetDocument, UnitaryMixer,
};
pub use linalg::{c64, ComplexMatrix, DensityMatrix, HermitianEigen};
pub use num_complex::Complex64;
pub use spinbath::{
    decoherence_factor, identical_bath, random_bath, reduced_density, BathSpec, BathSpin,
    CentralState,
};
pub use symmetry::{
    is_exchange_symmetric, maximize_symmetric_probability, BellState, ConstraintPattern,
    OptimizerConfig, SymmetryClass, SymmetryReport,
};
