//! Axial rotationally symmetric distributions on the unit sphere:
//! densities, normalizing constants, moments, and samplers.
//!
//! The family is parametrized by a location axis theta, a concentration
//! kappa, and an angular function f with f(0) = f'(0) = 1; kappa = 0 is
//! the uniform distribution regardless of f.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::orthogonal_complement_basis;
use crate::rng::RngStream;
use crate::special::ln_gamma;

/// The angular function f together with its first two derivatives at 0.
#[derive(Clone)]
pub struct AngularFunction {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    d1_at_0: f64,
    d2_at_0: f64,
    label: String,
}

impl std::fmt::Debug for AngularFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AngularFunction")
            .field("label", &self.label)
            .field("d1_at_0", &self.d1_at_0)
            .field("d2_at_0", &self.d2_at_0)
            .finish()
    }
}

impl AngularFunction {
    /// Watson angular function f(z) = exp(z).
    pub fn watson() -> Self {
        AngularFunction {
            eval: Arc::new(f64::exp),
            d1_at_0: 1.0,
            d2_at_0: 1.0,
            label: "watson".into(),
        }
    }

    /// Linear angular function f(z) = 1 + z (positive only while
    /// 1 + kappa s^2 > 0; the model constructor rejects violations).
    pub fn linear() -> Self {
        AngularFunction {
            eval: Arc::new(|z| 1.0 + z),
            d1_at_0: 1.0,
            d2_at_0: 0.0,
            label: "linear".into(),
        }
    }

    /// User-supplied angular function. Monotonicity and the class
    /// requirements f(0) = f'(0) = 1 are grid-checked, not proven.
    pub fn custom(
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d1_at_0: f64,
        d2_at_0: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        if (eval(0.0) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument("angular function must satisfy f(0)=1".into()));
        }
        if (d1_at_0 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument("angular function must satisfy f'(0)=1".into()));
        }
        let f = AngularFunction {
            eval: Arc::new(eval),
            d1_at_0,
            d2_at_0,
            label: label.into(),
        };
        f.check_monotone(-8.0, 8.0)?;
        Ok(f)
    }

    pub fn by_label(label: &str) -> Result<Self> {
        match label {
            "watson" => Ok(Self::watson()),
            "linear" => Ok(Self::linear()),
            other => Err(Error::InvalidArgument(format!("unknown angular function '{other}'"))),
        }
    }

    #[inline]
    pub fn eval(&self, z: f64) -> f64 {
        (self.eval)(z)
    }

    pub fn d1_at_0(&self) -> f64 {
        self.d1_at_0
    }

    pub fn d2_at_0(&self) -> f64 {
        self.d2_at_0
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    fn check_monotone(&self, lo: f64, hi: f64) -> Result<()> {
        let mut prev = self.eval(lo);
        for i in 1..1024 {
            let z = lo + (hi - lo) * i as f64 / 1023.0;
            let v = self.eval(z);
            if v < prev - 1e-12 {
                return Err(Error::InvalidArgument(format!(
                    "angular function '{}' is not monotone near z={z}",
                    self.label
                )));
            }
            prev = v;
        }
        Ok(())
    }
}

/// The alternative P_{theta, kappa, f} in dimension p.
#[derive(Debug, Clone)]
pub struct AxialModel {
    p: usize,
    theta: Vec<f64>,
    kappa: f64,
    f: AngularFunction,
}

impl AxialModel {
    pub fn new(p: usize, theta: Vec<f64>, kappa: f64, f: AngularFunction) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidArgument("dimension p must be >= 2".into()));
        }
        if theta.len() != p {
            return Err(Error::InvalidArgument("theta length must equal p".into()));
        }
        let norm: f64 = theta.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "theta must be a unit vector, got norm {norm}"
            )));
        }
        // Positivity of f(kappa s^2) on a 1024-point grid over s in [-1,1].
        for i in 0..1024 {
            let s = -1.0 + 2.0 * i as f64 / 1023.0;
            if f.eval(kappa * s * s) <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "density is nonpositive at s={s} for kappa={kappa}"
                )));
            }
        }
        Ok(AxialModel { p, theta, kappa, f })
    }

    /// Model with location e1, the convention used in the experiments.
    pub fn with_axis_e1(p: usize, kappa: f64, f: AngularFunction) -> Result<Self> {
        let mut theta = vec![0.0; p];
        theta[0] = 1.0;
        Self::new(p, theta, kappa, f)
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn angular(&self) -> &AngularFunction {
        &self.f
    }
}

/// n unit vectors in R^p, stored row-major.
#[derive(Debug, Clone)]
pub struct SphericalSample {
    n: usize,
    p: usize,
    data: Vec<f64>,
}

impl SphericalSample {
    /// Validates that every row is a unit vector within 1e-8.
    pub fn new(p: usize, data: Vec<f64>) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidData("dimension p must be >= 2".into()));
        }
        if data.is_empty() || data.len() % p != 0 {
            return Err(Error::InvalidData("data length must be a positive multiple of p".into()));
        }
        let n = data.len() / p;
        for i in 0..n {
            let norm: f64 = data[i * p..(i + 1) * p].iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-8 {
                return Err(Error::InvalidData(format!(
                    "row {i} has norm {norm}; expected a unit vector"
                )));
            }
        }
        Ok(SphericalSample { n, p, data })
    }

    /// Rows are renormalized to unit length; zero rows are rejected.
    pub fn new_renormalized(p: usize, mut data: Vec<f64>) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidData("dimension p must be >= 2".into()));
        }
        if data.is_empty() || data.len() % p != 0 {
            return Err(Error::InvalidData("data length must be a positive multiple of p".into()));
        }
        let n = data.len() / p;
        for i in 0..n {
            let row = &mut data[i * p..(i + 1) * p];
            let norm: f64 = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                return Err(Error::InvalidData(format!("row {i} cannot be renormalized")));
            }
            row.iter_mut().for_each(|x| *x /= norm);
        }
        Ok(SphericalSample { n, p, data })
    }

    pub(crate) fn from_unit_rows(p: usize, data: Vec<f64>) -> Self {
        debug_assert!(!data.is_empty() && data.len() % p == 0);
        SphericalSample {
            n: data.len() / p,
            p,
            data,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.p)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

/// Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Integral of (1-s^2)^{(p-3)/2} w(s) over [-1, 1], via the substitution
/// s = sin(u), which removes the endpoint singularity at p = 2. Starts at
/// 256 Gauss-Legendre nodes, doubling until two successive values agree
/// to 1e-11.
pub fn axial_weight_integral(p: usize, w: impl Fn(f64) -> f64) -> Result<f64> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let pm2 = p as f64 - 2.0;
    let eval = |nodes: &[f64], weights: &[f64]| -> f64 {
        let mut total = 0.0;
        for (&x, &wt) in nodes.iter().zip(weights) {
            let u = half_pi * x;
            let (sin_u, cos_u) = u.sin_cos();
            total += wt * cos_u.powf(pm2) * w(sin_u);
        }
        total * half_pi
    };
    let mut n = 256;
    let (nodes, weights) = gauss_legendre(n);
    let mut prev = eval(&nodes, &weights);
    for _ in 0..6 {
        n *= 2;
        let (nodes, weights) = gauss_legendre(n);
        let next = eval(&nodes, &weights);
        if (next - prev).abs() <= 1e-11 * (1.0 + next.abs()) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Numeric("quadrature did not converge".into()))
}

/// The uniform-case constant c_p = Gamma(p/2) / (sqrt(pi) Gamma((p-1)/2)).
pub fn uniform_constant(p: usize) -> f64 {
    let pf = p as f64;
    (ln_gamma(pf / 2.0) - 0.5 * std::f64::consts::PI.ln() - ln_gamma((pf - 1.0) / 2.0)).exp()
}

/// Normalizing constant c_{p,kappa,f} = 1 / integral of
/// (1-s^2)^{(p-3)/2} f(kappa s^2) ds.
pub fn normalizing_constant(p: usize, kappa: f64, f: &AngularFunction) -> Result<f64> {
    let integral = axial_weight_integral(p, |s| f.eval(kappa * s * s))?;
    if !(integral > 0.0) {
        return Err(Error::Numeric("nonpositive normalizing integral".into()));
    }
    Ok(1.0 / integral)
}

/// Density of the axial model at a unit vector x.
pub fn density(model: &AxialModel, x: &[f64]) -> Result<f64> {
    if x.len() != model.p {
        return Err(Error::InvalidArgument("dimension mismatch".into()));
    }
    let norm: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidArgument(format!("x must be a unit vector, norm {norm}")));
    }
    let c = normalizing_constant(model.p, model.kappa, &model.f)?;
    let pf = model.p as f64;
    let surface =
        (ln_gamma((pf - 1.0) / 2.0) - ((pf - 1.0) / 2.0) * std::f64::consts::PI.ln()).exp() / 2.0;
    let t: f64 = x.iter().zip(&model.theta).map(|(a, b)| a * b).sum();
    Ok(c * surface * model.f.eval(model.kappa * t * t))
}

/// E[(X'theta)^2] under the model: g_f(kappa).
pub fn moment_gf(p: usize, kappa: f64, f: &AngularFunction) -> Result<f64> {
    let denom = axial_weight_integral(p, |s| f.eval(kappa * s * s))?;
    let numer = axial_weight_integral(p, |s| s * s * f.eval(kappa * s * s))?;
    if !(denom > 0.0) {
        return Err(Error::Numeric("nonpositive normalizing integral".into()));
    }
    Ok(numer / denom)
}

/// R(g) = c_p * integral of (1-s^2)^{(p-3)/2} g(kappa s^2) ds, the moment
/// functional appearing in the local expansions.
pub fn moment_integral(p: usize, kappa: f64, g: impl Fn(f64) -> f64) -> Result<f64> {
    let c = uniform_constant(p);
    Ok(c * axial_weight_integral(p, |s| g(kappa * s * s))?)
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

/// Uniform sample on S^{p-1}: normalized standard Gaussian vectors.
pub fn sample_uniform_sphere(p: usize, n: usize, stream: &mut RngStream) -> SphericalSample {
    assert!(p >= 2 && n >= 1);
    let mut data = Vec::with_capacity(n * p);
    for _ in 0..n {
        loop {
            let v: Vec<f64> = stream.next_normals(p);
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                data.extend(v.iter().map(|x| x / norm));
                break;
            }
        }
    }
    SphericalSample::from_unit_rows(p, data)
}

/// Inverse-CDF sampler for t = X'theta, built on a 4096-point grid in the
/// angle variable u (s = sin u), with piecewise-linear interpolation of
/// the CDF.
pub struct AxialSampler {
    model: AxialModel,
    basis: Vec<Vec<f64>>,
    // grid of t values and the CDF evaluated there, both length GRID.
    t_grid: Vec<f64>,
    cdf: Vec<f64>,
}

const T_GRID: usize = 4096;

impl AxialSampler {
    pub fn new(model: &AxialModel) -> Result<Self> {
        let p = model.p;
        let pm2 = p as f64 - 2.0;
        let half_pi = std::f64::consts::FRAC_PI_2;
        let mut t_grid = Vec::with_capacity(T_GRID);
        let mut dens = Vec::with_capacity(T_GRID);
        for i in 0..T_GRID {
            let u = -half_pi + std::f64::consts::PI * i as f64 / (T_GRID - 1) as f64;
            let (sin_u, cos_u) = u.sin_cos();
            let d = cos_u.powf(pm2) * model.f.eval(model.kappa * sin_u * sin_u);
            if !(d.is_finite() && d >= 0.0) {
                return Err(Error::Numeric("degenerate axial density on grid".into()));
            }
            t_grid.push(sin_u);
            dens.push(d);
        }
        // Cumulative trapezoid in u (uniform spacing cancels in the ratio).
        let mut cdf = vec![0.0; T_GRID];
        for i in 1..T_GRID {
            cdf[i] = cdf[i - 1] + 0.5 * (dens[i - 1] + dens[i]);
        }
        let total = cdf[T_GRID - 1];
        if !(total > 0.0) {
            return Err(Error::Numeric("axial density integrates to zero".into()));
        }
        cdf.iter_mut().for_each(|v| *v /= total);
        Ok(AxialSampler {
            model: model.clone(),
            basis: orthogonal_complement_basis(&model.theta),
            t_grid,
            cdf,
        })
    }

    fn draw_t(&self, stream: &mut RngStream) -> f64 {
        let v = stream.next_uniform();
        let idx = self.cdf.partition_point(|&c| c < v).min(T_GRID - 1).max(1);
        let (c0, c1) = (self.cdf[idx - 1], self.cdf[idx]);
        let frac = if c1 > c0 { (v - c0) / (c1 - c0) } else { 0.5 };
        let t = self.t_grid[idx - 1] + frac * (self.t_grid[idx] - self.t_grid[idx - 1]);
        t.clamp(-1.0, 1.0)
    }

    /// One draw X = t theta + sqrt(1-t^2) U, with U uniform on the
    /// equatorial sphere in theta-perp.
    pub fn draw_into(&self, stream: &mut RngStream, out: &mut [f64]) {
        let p = self.model.p;
        debug_assert_eq!(out.len(), p);
        let t = self.draw_t(stream);
        let radial = (1.0 - t * t).max(0.0).sqrt();
        // U via normalized Gaussians in the orthonormal basis of theta-perp.
        let mut coefs = vec![0.0; p - 1];
        loop {
            let mut norm2 = 0.0;
            for c in coefs.iter_mut() {
                *c = stream.next_normal();
                norm2 += *c * *c;
            }
            if norm2 > 1e-24 {
                let inv = radial / norm2.sqrt();
                coefs.iter_mut().for_each(|c| *c *= inv);
                break;
            }
        }
        for (i, o) in out.iter_mut().enumerate() {
            let mut v = t * self.model.theta[i];
            for (c, b) in coefs.iter().zip(&self.basis) {
                v += c * b[i];
            }
            *o = v;
        }
        // Guard against interpolation round-off.
        let norm: f64 = out.iter().map(|x| x * x).sum::<f64>().sqrt();
        out.iter_mut().for_each(|x| *x /= norm);
    }

    pub fn sample(&self, n: usize, stream: &mut RngStream) -> SphericalSample {
        let p = self.model.p;
        let mut data = vec![0.0; n * p];
        for chunk in data.chunks_exact_mut(p) {
            self.draw_into(stream, chunk);
        }
        SphericalSample::from_unit_rows(p, data)
    }
}

/// Sample n observations from the axial model.
pub fn sample_axial(model: &AxialModel, n: usize, stream: &mut RngStream) -> Result<SphericalSample> {
    if model.kappa == 0.0 {
        return Ok(sample_uniform_sphere(model.p, n, stream));
    }
    Ok(AxialSampler::new(model)?.sample(n, stream))
}
