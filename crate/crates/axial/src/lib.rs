//! Axial tests of uniformity on the unit hypersphere.
//!
//! The crate covers the full pipeline: sampling from axially symmetric
//! rotationally symmetric distributions, the test statistics (specified
//! axis, Bingham, extreme eigenvalues, Rayleigh), their limiting null and
//! non-null laws, asymptotic powers, and a reproducible Monte Carlo
//! harness for size/power studies and figure reproduction.

pub mod error;
pub mod harness;
pub mod limlaw;
pub mod linalg;
pub mod models;
pub mod rng;
pub mod special;
pub mod teststats;

pub use error::{Error, Result};
pub use harness::{
    kde, replicate_figure, run_power_experiment, run_size_experiment, simulate_statistic,
    ExperimentSpec, FigureOutput, Histogram, KdeCurve, PowerCurve, PowerPoint, Scale,
};
pub use limlaw::{
    build_table, crit_value, power_bingham, power_eigen_mc, power_specified, CritMethod,
    EigenTestKind, LimitLawTable, LimitMatrixSpec, Side,
};
pub use linalg::{Matrix, SymEigen};
pub use models::{
    sample_axial, sample_uniform_sphere, AngularFunction, AxialModel, AxialSampler,
    SphericalSample,
};
pub use rng::RngStream;
pub use teststats::{
    bingham_q, delta_theta, eigen_test, rayleigh_stat, scatter_matrix, t_specified, DistRef,
    ScatterSpectrum, TestName, TestReport,
};
