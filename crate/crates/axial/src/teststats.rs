//! Scatter matrix and the uniformity test statistics: the specified-axis
//! optimal test, the Bingham test, the extreme-eigenvalue tests, the
//! Rayleigh baseline, and the exact Watson log-likelihood ratio used for
//! LAN diagnostics.

use crate::error::{Error, Result};
use crate::limlaw::{self, bingham_df, EigenTestKind, LimitLawTable, Side};
use crate::linalg::{commutation_matrix, j_matrix, jacobi_eigen, Matrix, SymEigen};
use crate::models::{normalizing_constant, uniform_constant, AngularFunction, SphericalSample};
use crate::special::{chisq_cdf, std_normal_cdf};

/// Identifier of a test, matching the names used in reports and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestName {
    SpecifiedRight,
    SpecifiedLeft,
    SpecifiedTwoSided,
    Bingham,
    TPlus,
    TMinus,
    TPm,
    Rayleigh,
}

impl TestName {
    pub fn as_str(&self) -> &'static str {
        match self {
            TestName::SpecifiedRight => "specified_right",
            TestName::SpecifiedLeft => "specified_left",
            TestName::SpecifiedTwoSided => "specified_two_sided",
            TestName::Bingham => "bingham",
            TestName::TPlus => "t_plus",
            TestName::TMinus => "t_minus",
            TestName::TPm => "t_pm",
            TestName::Rayleigh => "rayleigh",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "specified_right" => TestName::SpecifiedRight,
            "specified_left" => TestName::SpecifiedLeft,
            "specified_two_sided" => TestName::SpecifiedTwoSided,
            "bingham" => TestName::Bingham,
            "t_plus" => TestName::TPlus,
            "t_minus" => TestName::TMinus,
            "t_pm" => TestName::TPm,
            "rayleigh" => TestName::Rayleigh,
            other => {
                return Err(Error::InvalidArgument(format!("unknown test '{other}'")));
            }
        })
    }

    pub fn needs_theta(&self) -> bool {
        matches!(
            self,
            TestName::SpecifiedRight | TestName::SpecifiedLeft | TestName::SpecifiedTwoSided
        )
    }
}

/// Reference to the null distribution a p-value was computed against.
#[derive(Debug, Clone, PartialEq)]
pub enum DistRef {
    Normal,
    ChiSq { df: u32 },
    NoncentralChiSq { df: u32, delta: f64 },
    LmaxEmpirical { p: usize, tau: f64, m: usize, seed: u64 },
    LminEmpirical { p: usize, tau: f64, m: usize, seed: u64 },
    LabsEmpirical { p: usize, tau: f64, m: usize, seed: u64 },
    LmaxP2Exact,
    LmaxP3Exact,
    LabsP3Exact,
}

impl DistRef {
    pub fn describe(&self) -> String {
        match self {
            DistRef::Normal => "standard normal".into(),
            DistRef::ChiSq { df } => format!("chi-square, {df} df"),
            DistRef::NoncentralChiSq { df, delta } => {
                format!("noncentral chi-square, {df} df, noncentrality {delta}")
            }
            DistRef::LmaxEmpirical { p, tau, m, seed } => {
                format!("empirical largest-eigenvalue law (p={p}, tau={tau}, m={m}, seed={seed})")
            }
            DistRef::LminEmpirical { p, tau, m, seed } => {
                format!("empirical smallest-eigenvalue law (p={p}, tau={tau}, m={m}, seed={seed})")
            }
            DistRef::LabsEmpirical { p, tau, m, seed } => {
                format!("empirical two-sided eigenvalue law (p={p}, tau={tau}, m={m}, seed={seed})")
            }
            DistRef::LmaxP2Exact => "exact largest-eigenvalue law, p=2".into(),
            DistRef::LmaxP3Exact => "exact largest-eigenvalue law, p=3".into(),
            DistRef::LabsP3Exact => "exact two-sided eigenvalue law, p=3".into(),
        }
    }
}

/// Outcome of a single test on a sample.
#[derive(Debug, Clone)]
pub struct TestReport {
    pub test_name: TestName,
    pub statistic: f64,
    pub null_ref: DistRef,
    pub p_value: f64,
    pub alpha: f64,
    pub reject: bool,
}

impl TestReport {
    fn new(test_name: TestName, statistic: f64, null_ref: DistRef, p_value: f64, alpha: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        TestReport {
            test_name,
            statistic,
            null_ref,
            p_value,
            alpha,
            reject: p_value < alpha,
        }
    }
}

/// The scatter matrix S_n with its ordered eigensystem.
#[derive(Debug, Clone)]
pub struct ScatterSpectrum {
    s: Matrix,
    eigen: SymEigen,
}

impl ScatterSpectrum {
    pub fn matrix(&self) -> &Matrix {
        &self.s
    }

    /// Eigenvalues in descending order; they sum to one.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigen.values
    }

    /// Orthonormal eigenvectors, column k paired with eigenvalue k.
    pub fn eigenvectors(&self) -> &Matrix {
        &self.eigen.vectors
    }

    pub fn leading_eigenvector(&self) -> Vec<f64> {
        self.eigen.vector(0)
    }

    pub fn trailing_eigenvector(&self) -> Vec<f64> {
        self.eigen.vector(self.s.dim() - 1)
    }
}

/// S_n = n^{-1} sum of X_i X_i' together with its eigensystem.
pub fn scatter_matrix(sample: &SphericalSample) -> Result<ScatterSpectrum> {
    let p = sample.p();
    let n = sample.n();
    let mut s = Matrix::zeros(p);
    for row in sample.rows() {
        for i in 0..p {
            for j in i..p {
                s.add_assign_at(i, j, row[i] * row[j]);
            }
        }
    }
    let inv_n = 1.0 / n as f64;
    for i in 0..p {
        for j in i..p {
            let v = s.get(i, j) * inv_n;
            s.set(i, j, v);
            s.set(j, i, v);
        }
    }
    let eigen = jacobi_eigen(&s)?;
    Ok(ScatterSpectrum { s, eigen })
}

fn check_theta(sample: &SphericalSample, theta: &[f64]) -> Result<()> {
    if theta.len() != sample.p() {
        return Err(Error::InvalidArgument("theta dimension mismatch".into()));
    }
    let norm: f64 = theta.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!(
            "theta must be a unit vector, norm {norm}"
        )));
    }
    Ok(())
}

/// Central sequence of the specified-axis problem:
/// (p/sqrt(n)) sum of ((X_i' theta)^2 - 1/p), equal to sqrt(n)(p theta'S theta - 1).
pub fn delta_theta(sample: &SphericalSample, theta: &[f64]) -> Result<f64> {
    check_theta(sample, theta)?;
    let p = sample.p() as f64;
    let n = sample.n() as f64;
    let mut acc = 0.0;
    for row in sample.rows() {
        let t: f64 = row.iter().zip(theta).map(|(a, b)| a * b).sum();
        acc += t * t - 1.0 / p;
    }
    Ok(p / n.sqrt() * acc)
}

/// Specified-axis optimal test: T = Delta_theta / sqrt(Gamma_p).
pub fn t_specified(
    sample: &SphericalSample,
    theta: &[f64],
    side: Side,
    alpha: f64,
) -> Result<TestReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument("alpha must lie in (0,1)".into()));
    }
    let t = delta_theta(sample, theta)? / limlaw::gamma_p_scalar(sample.p()).sqrt();
    let (name, p_value) = match side {
        Side::Right => (TestName::SpecifiedRight, 1.0 - std_normal_cdf(t)),
        Side::Left => (TestName::SpecifiedLeft, std_normal_cdf(t)),
        Side::TwoSided => (TestName::SpecifiedTwoSided, 2.0 * (1.0 - std_normal_cdf(t.abs()))),
    };
    Ok(TestReport::new(name, t, DistRef::Normal, p_value, alpha))
}

/// Bingham statistic Q = (n p (p+2)/2)(tr S^2 - 1/p), null chi-square with
/// d_p = p(p+1)/2 - 1 degrees of freedom.
pub fn bingham_q(sample: &SphericalSample, alpha: f64) -> Result<TestReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument("alpha must lie in (0,1)".into()));
    }
    let spectrum = scatter_matrix(sample)?;
    let q = bingham_q_from_spectrum(sample.n(), &spectrum);
    let df = bingham_df(sample.p());
    let p_value = 1.0 - chisq_cdf(q.max(0.0), df)?;
    Ok(TestReport::new(
        TestName::Bingham,
        q,
        DistRef::ChiSq { df },
        p_value,
        alpha,
    ))
}

/// Q from the trace form, cross-checkable against the eigenvalue form.
pub fn bingham_q_from_spectrum(n: usize, spectrum: &ScatterSpectrum) -> f64 {
    let p = spectrum.matrix().dim();
    let pf = p as f64;
    let mut tr_s2 = 0.0;
    for i in 0..p {
        for j in 0..p {
            tr_s2 += spectrum.matrix().get(i, j).powi(2);
        }
    }
    n as f64 * pf * (pf + 2.0) / 2.0 * (tr_s2 - 1.0 / pf)
}

/// Q from the eigenvalue form (n p (p+2)/2)(sum lambda^2 - 1/p).
pub fn bingham_q_eigen_form(n: usize, spectrum: &ScatterSpectrum) -> f64 {
    let pf = spectrum.matrix().dim() as f64;
    let sum_sq: f64 = spectrum.eigenvalues().iter().map(|l| l * l).sum();
    n as f64 * pf * (pf + 2.0) / 2.0 * (sum_sq - 1.0 / pf)
}

/// Source of the null reference for the eigenvalue tests.
#[derive(Debug, Clone, Copy)]
pub enum EigenNull<'a> {
    /// Exact limiting CDFs; p = 2 or 3 only.
    Analytic,
    /// Empirical null table (any p).
    Table(&'a LimitLawTable),
}

/// Raw eigenvalue statistics (T+, T-, T+-) of a sample.
pub fn eigen_statistics(sample: &SphericalSample, spectrum: &ScatterSpectrum) -> (f64, f64, f64) {
    let pf = sample.p() as f64;
    let sqrt_n = (sample.n() as f64).sqrt();
    let lambda = spectrum.eigenvalues();
    let t_plus = sqrt_n * (pf * lambda[0] - 1.0);
    let t_minus = -sqrt_n * (pf * lambda[lambda.len() - 1] - 1.0);
    let t_pm = sqrt_n
        * (pf * lambda[0] - 1.0)
            .abs()
            .max((pf * lambda[lambda.len() - 1] - 1.0).abs());
    (t_plus, t_minus, t_pm)
}

/// One of the extreme-eigenvalue tests, with the p-value taken from the
/// requested null reference.
pub fn eigen_test(
    sample: &SphericalSample,
    kind: EigenTestKind,
    alpha: f64,
    null: EigenNull<'_>,
) -> Result<TestReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument("alpha must lie in (0,1)".into()));
    }
    let p = sample.p();
    let spectrum = scatter_matrix(sample)?;
    let (t_plus, t_minus, t_pm) = eigen_statistics(sample, &spectrum);
    let (name, stat) = match kind {
        EigenTestKind::Plus => (TestName::TPlus, t_plus),
        EigenTestKind::Minus => (TestName::TMinus, t_minus),
        EigenTestKind::PlusMinus => (TestName::TPm, t_pm),
    };
    let (p_value, null_ref) = match null {
        EigenNull::Analytic => {
            let cdf = limlaw::exact_null_cdf(kind, p, stat)?;
            let null_ref = match (p, kind) {
                (2, _) => DistRef::LmaxP2Exact,
                (3, EigenTestKind::PlusMinus) => DistRef::LabsP3Exact,
                (3, _) => DistRef::LmaxP3Exact,
                _ => unreachable!("exact_null_cdf rejects other p"),
            };
            (1.0 - cdf, null_ref)
        }
        EigenNull::Table(table) => {
            if table.spec.p != p {
                return Err(Error::InvalidArgument(format!(
                    "null table has p={}, sample has p={p}",
                    table.spec.p
                )));
            }
            let p_value = table.survival(kind, stat);
            let params = (table.spec.p, table.spec.tau, table.m, table.seed);
            let null_ref = match kind {
                EigenTestKind::Plus => DistRef::LmaxEmpirical {
                    p: params.0,
                    tau: params.1,
                    m: params.2,
                    seed: params.3,
                },
                EigenTestKind::Minus => DistRef::LminEmpirical {
                    p: params.0,
                    tau: params.1,
                    m: params.2,
                    seed: params.3,
                },
                EigenTestKind::PlusMinus => DistRef::LabsEmpirical {
                    p: params.0,
                    tau: params.1,
                    m: params.2,
                    seed: params.3,
                },
            };
            (p_value, null_ref)
        }
    };
    Ok(TestReport::new(name, stat, null_ref, p_value, alpha))
}

pub fn t_plus(sample: &SphericalSample, alpha: f64, null: EigenNull<'_>) -> Result<TestReport> {
    eigen_test(sample, EigenTestKind::Plus, alpha, null)
}

pub fn t_minus(sample: &SphericalSample, alpha: f64, null: EigenNull<'_>) -> Result<TestReport> {
    eigen_test(sample, EigenTestKind::Minus, alpha, null)
}

pub fn t_pm(sample: &SphericalSample, alpha: f64, null: EigenNull<'_>) -> Result<TestReport> {
    eigen_test(sample, EigenTestKind::PlusMinus, alpha, null)
}

/// |Delta evaluated at the leading eigenvector minus T+|; an algebraic
/// identity, so this should never exceed ~1e-8.
pub fn sup_identity_check(sample: &SphericalSample) -> Result<f64> {
    let spectrum = scatter_matrix(sample)?;
    let (t_plus, _, _) = eigen_statistics(sample, &spectrum);
    let theta_hat = spectrum.leading_eigenvector();
    Ok((delta_theta(sample, &theta_hat)? - t_plus).abs())
}

/// Rayleigh statistic n p ||mean||^2 with the classical chi-square_p null.
/// Included as a baseline: it has no power against axial alternatives.
pub fn rayleigh_stat(sample: &SphericalSample, alpha: f64) -> Result<TestReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument("alpha must lie in (0,1)".into()));
    }
    let p = sample.p();
    let n = sample.n();
    let mut mean = vec![0.0; p];
    for row in sample.rows() {
        for (m, x) in mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    let norm2: f64 = mean.iter().map(|m| (m / n as f64).powi(2)).sum();
    let stat = n as f64 * p as f64 * norm2;
    let df = p as u32;
    let p_value = 1.0 - chisq_cdf(stat, df)?;
    Ok(TestReport::new(
        TestName::Rayleigh,
        stat,
        DistRef::ChiSq { df },
        p_value,
        alpha,
    ))
}

/// Exact Watson log-likelihood ratio against uniformity:
/// n log(c_{p,kappa,exp}/c_p) + kappa * sum (X_i' theta)^2.
pub fn watson_loglik_ratio(sample: &SphericalSample, theta: &[f64], kappa: f64) -> Result<f64> {
    check_theta(sample, theta)?;
    if kappa == 0.0 {
        return Ok(0.0);
    }
    let p = sample.p();
    let watson = AngularFunction::watson();
    let c_kappa = normalizing_constant(p, kappa, &watson)?;
    let c0 = uniform_constant(p);
    let mut sum_t2 = 0.0;
    for row in sample.rows() {
        let t: f64 = row.iter().zip(theta).map(|(a, b)| a * b).sum();
        sum_t2 += t * t;
    }
    Ok(sample.n() as f64 * (c_kappa / c0).ln() + kappa * sum_t2)
}

/// Vectorized central sequence p sqrt(n) vec(S_n - I/p), length p^2.
pub fn vec_central_sequence(sample: &SphericalSample) -> Result<Vec<f64>> {
    let spectrum = scatter_matrix(sample)?;
    let p = sample.p();
    let pf = p as f64;
    let scale = pf * (sample.n() as f64).sqrt();
    let mut centered = spectrum.s.clone();
    for i in 0..p {
        centered.set(i, i, centered.get(i, i) - 1.0 / pf);
    }
    centered.scale(scale);
    Ok(centered.vec())
}

/// The p^2 x p^2 information matrix (p/(p+2))(I + K_p - (2/p) J_p).
pub fn gamma_matrix(p: usize) -> Matrix {
    let pf = p as f64;
    let mut g = commutation_matrix(p).add(&Matrix::identity(p * p));
    let mut j = j_matrix(p);
    j.scale(-2.0 / pf);
    g = g.add(&j);
    g.scale(pf / (pf + 2.0));
    g
}
