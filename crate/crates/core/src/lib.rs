//! Hartman measurable sequences on ℤ.
//!
//! A bounded `φ : ℤ → ℂ` is Hartman measurable when `φ = φ* ∘ ι` for a
//! Riemann-integrable `φ*` on a group compactification `(ι, X)`. This crate
//! models the compactifications `𝕋^k × ℤ/L` induced by finitely generated
//! subgroups of 𝕋, exact step-function and trigonometric realizations,
//! invariant means, spectra, the distance `d_φ` and its filter sets, the
//! Weil fiber average with aperiodization, Fejér summation, and the
//! reconstruction of the minimal compactification from samples.

pub mod angle;
pub mod corpus;
pub mod distance;
pub mod error;
pub mod fejer;
pub mod group;
pub mod json;
pub mod lattice;
pub mod mean;
pub mod rational;
pub mod realize;
pub mod reconstruct;
pub mod sequence;
pub mod spectrum;
pub mod step;
pub mod surd;
pub mod weil;

pub use angle::{Angle, Character, CompactGroup, Point};
pub use distance::{
    distance_on_x, distance_on_z, distance_profile, filter_set, kernel_subgroup, neighborhood_check,
    sub_membership_test, DistanceProfile, FilterSet, SubReport, SubTestParams, SubVerdict,
};
pub use error::{Error, Result};
pub use fejer::{fejer_apply, FejerOperator};
pub use group::{
    covers, induce_compactification, Certification, Compactification, Membership, PresentationConfig,
    SpectralSubgroup,
};
pub use mean::{cesaro_mean, exact_mean, fourier_coefficient, MeanEstimate};
pub use rational::{classify_rationality, RationalClass, Rational};
pub use realize::{realize_on_gamma, GammaRealization};
pub use reconstruct::{equivalence_check, reconstruct, Equivalence, ReconstructParams, Reconstruction};
pub use sequence::{HartmanFunction, Realization};
pub use spectrum::{scan_spectrum, subgroup_of, Peak, SpectrumReport};
pub use step::{Frequency, Magnitude, StepFunction, TrigPolynomial};
pub use weil::{aperiodize, fiber_average, Aperiodization, Quotient, SubgroupH, Translation};
