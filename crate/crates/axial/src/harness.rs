//! Monte Carlo experiment runner: size and power studies, kernel density
//! estimation, and reproduction of the four simulation figures as CSV
//! artifacts.
//!
//! Replicate k always uses the random stream `(master_seed, k)`, and
//! aggregation is order-independent, so outputs do not depend on the
//! number of worker threads.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::limlaw::{
    self, crit_from_table, crit_value, build_table, CritMethod, EigenTestKind, LimitLawTable,
    LimitMatrixSpec, Side,
};
use crate::models::{AngularFunction, AxialModel, AxialSampler, sample_uniform_sphere, SphericalSample};
use crate::rng::RngStream;
use crate::special::{chisq_quantile, noncentral_chisq_pdf, normal_quantile, std_normal_pdf};
use crate::teststats::{
    bingham_q_from_spectrum, delta_theta, eigen_statistics, scatter_matrix, TestName,
};

/// Scale of a figure reproduction: the full Monte Carlo sizes or a
/// faster desk-scale variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Full,
    Desk,
}

/// Parameters of one size/power experiment. Location is fixed to e1
/// (rotation invariance makes this lossless) and kappa = tau * p / sqrt(n).
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub p: usize,
    pub n: usize,
    pub f_label: String,
    pub tau_grid: Vec<f64>,
    pub tests: Vec<TestName>,
    pub alpha: f64,
    pub replicates: usize,
    pub master_seed: u64,
    /// Draw count for the empirical null tables used when p is not 2 or 3.
    pub limlaw_m: usize,
    /// Draw count for the Monte Carlo asymptotic powers of the eigen tests.
    pub power_m: usize,
}

impl ExperimentSpec {
    pub fn new(
        p: usize,
        n: usize,
        tau_grid: Vec<f64>,
        tests: Vec<TestName>,
        alpha: f64,
        replicates: usize,
        master_seed: u64,
    ) -> Result<Self> {
        if replicates < 1 {
            return Err(Error::InvalidArgument("replicates must be >= 1".into()));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument("alpha must lie in (0,1)".into()));
        }
        if tau_grid.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("tau grid must be finite".into()));
        }
        Ok(ExperimentSpec {
            p,
            n,
            f_label: "watson".into(),
            tau_grid,
            tests,
            alpha,
            replicates,
            master_seed,
            limlaw_m: 200_000,
            power_m: 20_000,
        })
    }
}

/// One (test, tau) entry of a power curve.
#[derive(Debug, Clone)]
pub struct PowerPoint {
    pub test: TestName,
    pub tau: f64,
    pub freq: f64,
    pub se: f64,
    pub asym_power: f64,
}

/// Rejection frequencies with Monte Carlo errors and asymptotic powers.
#[derive(Debug, Clone)]
pub struct PowerCurve {
    pub spec: ExperimentSpec,
    pub points: Vec<PowerPoint>,
}

impl PowerCurve {
    pub fn point(&self, test: TestName, tau: f64) -> Option<&PowerPoint> {
        self.points
            .iter()
            .find(|pt| pt.test == test && pt.tau == tau)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "# seed={} alpha={}", self.spec.master_seed, self.spec.alpha)?;
        writeln!(out, "test,tau,n,M,freq,se,asym_power")?;
        for pt in &self.points {
            writeln!(
                out,
                "{},{},{},{},{:.17e},{:.17e},{:.17e}",
                pt.test.as_str(),
                pt.tau,
                self.spec.n,
                self.spec.replicates,
                pt.freq,
                pt.se,
                pt.asym_power
            )?;
        }
        Ok(())
    }
}

// Per-test decision context with precomputed critical values.
struct TestCtx {
    name: TestName,
    crit: f64,
}

fn decide(ctx: &TestCtx, t_spec: f64, q: f64, tp: f64, tm: f64, tpm: f64, rayleigh: f64) -> bool {
    match ctx.name {
        TestName::SpecifiedRight => t_spec > ctx.crit,
        TestName::SpecifiedLeft => t_spec < -ctx.crit,
        TestName::SpecifiedTwoSided => t_spec.abs() > ctx.crit,
        TestName::Bingham => q > ctx.crit,
        TestName::TPlus => tp > ctx.crit,
        TestName::TMinus => tm > ctx.crit,
        TestName::TPm => tpm > ctx.crit,
        TestName::Rayleigh => rayleigh > ctx.crit,
    }
}

fn eigen_kind(name: TestName) -> Option<EigenTestKind> {
    match name {
        TestName::TPlus => Some(EigenTestKind::Plus),
        TestName::TMinus => Some(EigenTestKind::Minus),
        TestName::TPm => Some(EigenTestKind::PlusMinus),
        _ => None,
    }
}

fn build_contexts(spec: &ExperimentSpec) -> Result<(Vec<TestCtx>, Option<LimitLawTable>)> {
    let needs_table =
        spec.p > 3 && spec.tests.iter().any(|t| eigen_kind(*t).is_some());
    let table = if needs_table {
        // Derived seed keeps the null table independent of the replicates.
        Some(build_table(
            &LimitMatrixSpec::new(spec.p, 0.0)?,
            spec.limlaw_m,
            spec.master_seed ^ 0x9e37_79b9_7f4a_7c15,
        )?)
    } else {
        None
    };
    let mut ctxs = Vec::with_capacity(spec.tests.len());
    for &name in &spec.tests {
        let crit = match name {
            TestName::SpecifiedRight | TestName::SpecifiedLeft => normal_quantile(spec.alpha)?,
            TestName::SpecifiedTwoSided => normal_quantile(spec.alpha / 2.0)?,
            TestName::Bingham => chisq_quantile(spec.alpha, limlaw::bingham_df(spec.p))?,
            TestName::Rayleigh => chisq_quantile(spec.alpha, spec.p as u32)?,
            TestName::TPlus | TestName::TMinus | TestName::TPm => {
                let kind = eigen_kind(name).unwrap();
                match &table {
                    Some(t) => crit_from_table(t, kind, spec.alpha),
                    None => crit_value(kind, spec.p, spec.alpha, CritMethod::Analytic, 0, 0)?,
                }
            }
        };
        ctxs.push(TestCtx { name, crit });
    }
    Ok((ctxs, table))
}

fn asym_power_for(spec: &ExperimentSpec, name: TestName, tau: f64) -> Result<f64> {
    match name {
        TestName::SpecifiedRight => limlaw::power_specified(spec.p, tau, spec.alpha, Side::Right),
        TestName::SpecifiedLeft => limlaw::power_specified(spec.p, tau, spec.alpha, Side::Left),
        TestName::SpecifiedTwoSided => {
            limlaw::power_specified(spec.p, tau, spec.alpha, Side::TwoSided)
        }
        TestName::Bingham => limlaw::power_bingham(spec.p, tau, spec.alpha),
        TestName::TPlus | TestName::TMinus | TestName::TPm => limlaw::power_eigen_mc(
            eigen_kind(name).unwrap(),
            spec.p,
            tau,
            spec.alpha,
            spec.power_m,
            spec.master_seed ^ 0x5851_f42d_4c95_7f2d,
        ),
        // The Rayleigh test is asymptotically blind to axial alternatives.
        TestName::Rayleigh => Ok(spec.alpha),
    }
}

// All raw statistics of one replicate sample.
struct ReplicateStats {
    t_spec: f64,
    q: f64,
    tp: f64,
    tm: f64,
    tpm: f64,
    rayleigh: f64,
}

fn replicate_stats(sample: &SphericalSample) -> Result<ReplicateStats> {
    let p = sample.p();
    let n = sample.n();
    let spectrum = scatter_matrix(sample)?;
    let (tp, tm, tpm) = eigen_statistics(sample, &spectrum);
    let mut theta = vec![0.0; p];
    theta[0] = 1.0;
    let t_spec = delta_theta(sample, &theta)? / limlaw::gamma_p_scalar(p).sqrt();
    let q = bingham_q_from_spectrum(n, &spectrum);
    let mut mean = vec![0.0; p];
    for row in sample.rows() {
        for (m, x) in mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    let norm2: f64 = mean.iter().map(|m| (m / n as f64).powi(2)).sum();
    let rayleigh = n as f64 * p as f64 * norm2;
    Ok(ReplicateStats {
        t_spec,
        q,
        tp,
        tm,
        tpm,
        rayleigh,
    })
}

fn sample_for_tau(
    spec: &ExperimentSpec,
    sampler: Option<&AxialSampler>,
    stream: &mut RngStream,
) -> SphericalSample {
    match sampler {
        Some(s) => s.sample(spec.n, stream),
        None => sample_uniform_sphere(spec.p, spec.n, stream),
    }
}

/// Run the full power experiment over the tau grid.
pub fn run_power_experiment(spec: &ExperimentSpec) -> Result<PowerCurve> {
    let (ctxs, _table) = build_contexts(spec)?;
    let mut points = Vec::new();
    for &tau in &spec.tau_grid {
        let kappa = tau * spec.p as f64 / (spec.n as f64).sqrt();
        let sampler = if kappa == 0.0 {
            None
        } else {
            let f = AngularFunction::by_label(&spec.f_label)?;
            let model = AxialModel::with_axis_e1(spec.p, kappa, f)?;
            Some(AxialSampler::new(&model)?)
        };
        // One stream per replicate index; counts merge by summation.
        let rejects: Vec<Vec<bool>> = (0..spec.replicates as u64)
            .into_par_iter()
            .map(|k| {
                let mut stream = RngStream::new(spec.master_seed, k);
                let sample = sample_for_tau(spec, sampler.as_ref(), &mut stream);
                let st = replicate_stats(&sample)?;
                Ok(ctxs
                    .iter()
                    .map(|c| decide(c, st.t_spec, st.q, st.tp, st.tm, st.tpm, st.rayleigh))
                    .collect())
            })
            .collect::<Result<_>>()?;
        for (j, ctx) in ctxs.iter().enumerate() {
            let hits = rejects.iter().filter(|r| r[j]).count();
            let freq = hits as f64 / spec.replicates as f64;
            let se = (freq * (1.0 - freq) / spec.replicates as f64).sqrt();
            points.push(PowerPoint {
                test: ctx.name,
                tau,
                freq,
                se,
                asym_power: asym_power_for(spec, ctx.name, tau)?,
            });
        }
    }
    Ok(PowerCurve {
        spec: spec.clone(),
        points,
    })
}

/// The experiment restricted to tau = 0 (empirical size).
pub fn run_size_experiment(spec: &ExperimentSpec) -> Result<PowerCurve> {
    let mut null_spec = spec.clone();
    if !spec.tau_grid.contains(&0.0) {
        return Err(Error::InvalidArgument(
            "size experiment requires 0 in the tau grid".into(),
        ));
    }
    null_spec.tau_grid = vec![0.0];
    run_power_experiment(&null_spec)
}

/// Values of one statistic across replicates, for distributional checks.
pub fn simulate_statistic(
    spec: &ExperimentSpec,
    test: TestName,
    tau: f64,
) -> Result<Vec<f64>> {
    let kappa = tau * spec.p as f64 / (spec.n as f64).sqrt();
    let sampler = if kappa == 0.0 {
        None
    } else {
        let f = AngularFunction::by_label(&spec.f_label)?;
        let model = AxialModel::with_axis_e1(spec.p, kappa, f)?;
        Some(AxialSampler::new(&model)?)
    };
    (0..spec.replicates as u64)
        .into_par_iter()
        .map(|k| {
            let mut stream = RngStream::new(spec.master_seed, k);
            let sample = sample_for_tau(spec, sampler.as_ref(), &mut stream);
            let st = replicate_stats(&sample)?;
            Ok(match test {
                TestName::SpecifiedRight
                | TestName::SpecifiedLeft
                | TestName::SpecifiedTwoSided => st.t_spec,
                TestName::Bingham => st.q,
                TestName::TPlus => st.tp,
                TestName::TMinus => st.tm,
                TestName::TPm => st.tpm,
                TestName::Rayleigh => st.rayleigh,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Kernel density estimation and histograms
// ---------------------------------------------------------------------------

/// Gaussian kernel density estimate on a 512-point grid.
#[derive(Debug, Clone)]
pub struct KdeCurve {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub bandwidth: f64,
}

/// nrd0 bandwidth: 0.9 * min(sd, IQR/1.34) * n^{-1/5}.
pub fn nrd0_bandwidth(values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InvalidArgument("kde needs at least two values".into()));
    }
    let mean: f64 = values.iter().sum::<f64>() / n as f64;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let iqr = limlaw::quantile_type7(&sorted, 0.75) - limlaw::quantile_type7(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    let bw = 0.9 * spread * (n as f64).powf(-0.2);
    if bw <= 0.0 || !bw.is_finite() {
        return Err(Error::InvalidArgument("kde input has zero spread".into()));
    }
    Ok(bw)
}

pub fn kde(values: &[f64]) -> Result<KdeCurve> {
    let bw = nrd0_bandwidth(values)?;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = min - 3.0 * bw;
    let hi = max + 3.0 * bw;
    let grid: Vec<f64> = (0..512)
        .map(|i| lo + (hi - lo) * i as f64 / 511.0)
        .collect();
    let inv = 1.0 / (values.len() as f64 * bw);
    let density: Vec<f64> = grid
        .par_iter()
        .map(|&g| {
            values
                .iter()
                .map(|&v| std_normal_pdf((g - v) / bw))
                .sum::<f64>()
                * inv
        })
        .collect();
    Ok(KdeCurve {
        grid,
        density,
        bandwidth: bw,
    })
}

impl KdeCurve {
    /// Trapezoid integral over the grid, close to one by construction.
    pub fn integral(&self) -> f64 {
        let mut total = 0.0;
        for i in 1..self.grid.len() {
            total += 0.5 * (self.density[i - 1] + self.density[i]) * (self.grid[i] - self.grid[i - 1]);
        }
        total
    }
}

/// Histogram with Freedman-Diaconis bin widths (counts, not density).
#[derive(Debug, Clone)]
pub struct Histogram {
    pub bin_left: Vec<f64>,
    pub bin_right: Vec<f64>,
    pub count: Vec<u64>,
}

pub fn histogram_fd(values: &[f64]) -> Result<Histogram> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InvalidArgument("histogram needs at least two values".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let iqr = limlaw::quantile_type7(&sorted, 0.75) - limlaw::quantile_type7(&sorted, 0.25);
    let min = sorted[0];
    let max = sorted[n - 1];
    if !(max > min) {
        return Err(Error::InvalidArgument("histogram input has zero spread".into()));
    }
    let width = if iqr > 0.0 {
        2.0 * iqr * (n as f64).powf(-1.0 / 3.0)
    } else {
        (max - min) / 10.0
    };
    let bins = (((max - min) / width).ceil() as usize).clamp(1, 10_000);
    let mut count = vec![0u64; bins];
    for &v in values {
        let idx = (((v - min) / (max - min) * bins as f64) as usize).min(bins - 1);
        count[idx] += 1;
    }
    let bin_left: Vec<f64> = (0..bins)
        .map(|i| min + (max - min) * i as f64 / bins as f64)
        .collect();
    let bin_right: Vec<f64> = (0..bins)
        .map(|i| min + (max - min) * (i + 1) as f64 / bins as f64)
        .collect();
    Ok(Histogram {
        bin_left,
        bin_right,
        count,
    })
}

// ---------------------------------------------------------------------------
// Figure reproduction
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveStyle {
    /// Empirical curves are drawn solid.
    Solid,
    /// Asymptotic reference curves are drawn dashed.
    Dashed,
}

/// A named line for plotting.
#[derive(Debug, Clone)]
pub struct NamedCurve {
    pub name: String,
    pub style: CurveStyle,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// A panel groups the curves that share one pair of axes.
#[derive(Debug, Clone)]
pub struct FigurePanel {
    pub title: String,
    pub curves: Vec<NamedCurve>,
}

/// Figure artifacts: emitted CSV files plus in-memory panels for plotting.
#[derive(Debug, Clone)]
pub struct FigureOutput {
    pub id: u8,
    pub seed: u64,
    pub files: Vec<PathBuf>,
    pub panels: Vec<FigurePanel>,
}

fn write_xy_csv(path: &Path, xname: &str, yname: &str, x: &[f64], y: &[f64]) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "{xname},{yname}")?;
    for (a, b) in x.iter().zip(y) {
        writeln!(out, "{a:.17e},{b:.17e}")?;
    }
    Ok(())
}

fn write_histogram_csv(path: &Path, hist: &Histogram) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "bin_left,bin_right,count")?;
    for i in 0..hist.count.len() {
        writeln!(
            out,
            "{:.17e},{:.17e},{}",
            hist.bin_left[i], hist.bin_right[i], hist.count[i]
        )?;
    }
    Ok(())
}

fn tau_label(tau: f64) -> String {
    format!("{tau}").replace('-', "m").replace('.', "p")
}

// Desk scale trims the Monte Carlo sizes: M 5000 -> 2000 (2000 -> 1000 for
// figure 4) and the p=10 sample sizes by a factor 2.5 (10000 -> 4000,
// 20000 -> 8000); limiting-law tables use 2e5 draws instead of 1e6.
fn fig_m(scale: Scale, full_m: usize) -> usize {
    match scale {
        Scale::Full => full_m,
        Scale::Desk => (full_m * 2) / 5,
    }
}

fn fig_n(scale: Scale, full_n: usize) -> usize {
    match scale {
        Scale::Full => full_n,
        Scale::Desk => {
            if full_n > 4_000 {
                (full_n * 2) / 5
            } else {
                full_n
            }
        }
    }
}

fn limiting_kde_curve(
    p: usize,
    tau: f64,
    kind: EigenTestKind,
    m: usize,
    seed: u64,
) -> Result<KdeCurve> {
    let table = build_table(&LimitMatrixSpec::new(p, tau)?, m, seed)?;
    kde(&table.draws_for(kind))
}

/// Reproduce one of the four simulation figures. Emits the per-panel CSV
/// data plus a manifest listing every artifact with the seed used.
pub fn replicate_figure(id: u8, scale: Scale, seed: u64, out_dir: &Path) -> Result<FigureOutput> {
    std::fs::create_dir_all(out_dir)?;
    let mut output = FigureOutput {
        id,
        seed,
        files: Vec::new(),
        panels: Vec::new(),
    };
    match id {
        1 => figure1(scale, seed, out_dir, &mut output)?,
        2 => figure2(scale, seed, out_dir, &mut output)?,
        3 => figure3(scale, seed, out_dir, &mut output)?,
        4 => figure4(scale, seed, out_dir, &mut output)?,
        other => {
            return Err(Error::InvalidArgument(format!(
                "figure id must be 1..=4, got {other}"
            )))
        }
    }
    // Manifest of all emitted artifacts.
    let manifest_path = out_dir.join(format!("figure{id}_manifest.csv"));
    let mut man = std::io::BufWriter::new(std::fs::File::create(&manifest_path)?);
    writeln!(man, "file,figure,seed")?;
    for f in &output.files {
        writeln!(man, "{},{},{}", f.display(), id, seed)?;
    }
    drop(man);
    output.files.push(manifest_path);
    Ok(output)
}

// Specified-axis statistic: KDEs across tau with N(sqrt(Gamma_p) tau, 1)
// reference densities; histogram at tau = 0.
fn figure1(scale: Scale, seed: u64, out_dir: &Path, output: &mut FigureOutput) -> Result<()> {
    let m = fig_m(scale, 5_000);
    let taus = [-2.0, -1.0, 0.0, 1.0, 2.0];
    for &p in &[3usize, 10] {
        for &n in &[100usize, 1_000] {
            let mut panel = FigurePanel {
                title: format!("specified-axis statistic, p={p}, n={n}"),
                curves: Vec::new(),
            };
            for &tau in &taus {
                let spec = ExperimentSpec::new(
                    p,
                    n,
                    vec![tau],
                    vec![TestName::SpecifiedRight],
                    0.05,
                    m,
                    seed,
                )?;
                let values = simulate_statistic(&spec, TestName::SpecifiedRight, tau)?;
                let curve = kde(&values)?;
                let path = out_dir.join(format!(
                    "figure1_kde_p{p}_n{n}_tau{}.csv",
                    tau_label(tau)
                ));
                write_xy_csv(&path, "grid", "density", &curve.grid, &curve.density)?;
                output.files.push(path);
                // Asymptotic N(sqrt(Gamma_p) tau, 1) density on the same grid.
                let shift = limlaw::gamma_p_scalar(p).sqrt() * tau;
                let asym: Vec<f64> = curve.grid.iter().map(|&x| std_normal_pdf(x - shift)).collect();
                let ref_path = out_dir.join(format!(
                    "figure1_asym_p{p}_n{n}_tau{}.csv",
                    tau_label(tau)
                ));
                write_xy_csv(&ref_path, "grid", "density", &curve.grid, &asym)?;
                output.files.push(ref_path);
                if tau == 0.0 {
                    let hist = histogram_fd(&values)?;
                    let hist_path = out_dir.join(format!("figure1_hist_p{p}_n{n}_tau0.csv"));
                    write_histogram_csv(&hist_path, &hist)?;
                    output.files.push(hist_path);
                }
                panel.curves.push(NamedCurve {
                    name: format!("empirical tau={tau}"),
                    style: CurveStyle::Solid,
                    x: curve.grid.clone(),
                    y: curve.density,
                });
                panel.curves.push(NamedCurve {
                    name: format!("asymptotic tau={tau}"),
                    style: CurveStyle::Dashed,
                    x: curve.grid,
                    y: asym,
                });
            }
            output.panels.push(panel);
        }
    }
    Ok(())
}

// Bingham statistic: KDEs across tau with noncentral chi-square reference
// densities; histogram at tau = 0.
fn figure2(scale: Scale, seed: u64, out_dir: &Path, output: &mut FigureOutput) -> Result<()> {
    let m = fig_m(scale, 5_000);
    let taus = [-4.0, -3.0, 0.0, 3.0, 4.0];
    for &(p, full_n) in &[(3usize, 2_000usize), (10, 10_000)] {
        let n = fig_n(scale, full_n);
        let mut panel = FigurePanel {
            title: format!("Bingham statistic, p={p}, n={n}"),
            curves: Vec::new(),
        };
        let df = limlaw::bingham_df(p);
        for &tau in &taus {
            let spec = ExperimentSpec::new(
                p,
                n,
                vec![tau],
                vec![TestName::Bingham],
                0.05,
                m,
                seed,
            )?;
            let values = simulate_statistic(&spec, TestName::Bingham, tau)?;
            let curve = kde(&values)?;
            let path = out_dir.join(format!("figure2_kde_p{p}_tau{}.csv", tau_label(tau)));
            write_xy_csv(&path, "grid", "density", &curve.grid, &curve.density)?;
            output.files.push(path);
            let delta = 2.0 * (p as f64 - 1.0) * tau * tau / (p as f64 + 2.0);
            let asym: Vec<f64> = curve
                .grid
                .iter()
                .map(|&x| noncentral_chisq_pdf(x, df, delta))
                .collect::<Result<_>>()?;
            let ref_path = out_dir.join(format!("figure2_asym_p{p}_tau{}.csv", tau_label(tau)));
            write_xy_csv(&ref_path, "grid", "density", &curve.grid, &asym)?;
            output.files.push(ref_path);
            if tau == 0.0 {
                let hist = histogram_fd(&values)?;
                let hist_path = out_dir.join(format!("figure2_hist_p{p}_tau0.csv"));
                write_histogram_csv(&hist_path, &hist)?;
                output.files.push(hist_path);
            }
            panel.curves.push(NamedCurve {
                name: format!("empirical tau={tau}"),
                style: CurveStyle::Solid,
                x: curve.grid.clone(),
                y: curve.density,
            });
            panel.curves.push(NamedCurve {
                name: format!("asymptotic tau={tau}"),
                style: CurveStyle::Dashed,
                x: curve.grid,
                y: asym,
            });
        }
        output.panels.push(panel);
    }
    Ok(())
}

// Extreme-eigenvalue statistics: KDEs across tau with limiting-law
// references (exact for p=3 tau=0, simulated otherwise).
fn figure3(scale: Scale, seed: u64, out_dir: &Path, output: &mut FigureOutput) -> Result<()> {
    let m = fig_m(scale, 5_000);
    let table_m = match scale {
        Scale::Full => 1_000_000,
        Scale::Desk => 200_000,
    };
    let taus = [-4.0, -3.0, 0.0, 3.0, 4.0];
    let stats = [
        (TestName::TPlus, EigenTestKind::Plus, "tplus"),
        (TestName::TMinus, EigenTestKind::Minus, "tminus"),
        (TestName::TPm, EigenTestKind::PlusMinus, "tpm"),
    ];
    for &(p, full_n) in &[(3usize, 2_000usize), (10, 10_000)] {
        let n = fig_n(scale, full_n);
        for &(test, kind, label) in &stats {
            let mut panel = FigurePanel {
                title: format!("{} statistic, p={p}, n={n}", test.as_str()),
                curves: Vec::new(),
            };
            for &tau in &taus {
                let spec = ExperimentSpec::new(p, n, vec![tau], vec![test], 0.05, m, seed)?;
                let values = simulate_statistic(&spec, test, tau)?;
                let curve = kde(&values)?;
                let path = out_dir.join(format!(
                    "figure3_kde_{label}_p{p}_tau{}.csv",
                    tau_label(tau)
                ));
                write_xy_csv(&path, "grid", "density", &curve.grid, &curve.density)?;
                output.files.push(path);
                // Reference: exact density (numerical derivative of the
                // closed-form CDF) for p=3 at tau=0, simulated law otherwise.
                let (ref_x, ref_y) = if p == 3 && tau == 0.0 {
                    let h = 1e-6;
                    let y: Vec<f64> = curve
                        .grid
                        .iter()
                        .map(|&x| {
                            let cdf = |v: f64| limlaw::exact_null_cdf(kind, 3, v).unwrap();
                            (cdf(x + h) - cdf(x - h)) / (2.0 * h)
                        })
                        .collect();
                    (curve.grid.clone(), y)
                } else {
                    let asym = limiting_kde_curve(p, tau, kind, table_m, seed ^ 0xabcd_ef01)?;
                    (asym.grid, asym.density)
                };
                let ref_path = out_dir.join(format!(
                    "figure3_asym_{label}_p{p}_tau{}.csv",
                    tau_label(tau)
                ));
                write_xy_csv(&ref_path, "grid", "density", &ref_x, &ref_y)?;
                output.files.push(ref_path);
                if tau == 0.0 {
                    let hist = histogram_fd(&values)?;
                    let hist_path =
                        out_dir.join(format!("figure3_hist_{label}_p{p}_tau0.csv"));
                    write_histogram_csv(&hist_path, &hist)?;
                    output.files.push(hist_path);
                }
                panel.curves.push(NamedCurve {
                    name: format!("empirical tau={tau}"),
                    style: CurveStyle::Solid,
                    x: curve.grid.clone(),
                    y: curve.density,
                });
                panel.curves.push(NamedCurve {
                    name: format!("asymptotic tau={tau}"),
                    style: CurveStyle::Dashed,
                    x: ref_x,
                    y: ref_y,
                });
            }
            output.panels.push(panel);
        }
    }
    Ok(())
}

// Power comparison of the specified-axis, T+, and Bingham tests over
// increasingly severe bipolar alternatives.
fn figure4(scale: Scale, seed: u64, out_dir: &Path, output: &mut FigureOutput) -> Result<()> {
    let m = fig_m(scale, 2_000).max(1_000);
    let taus: Vec<f64> = (0..=5).map(|l| 0.8 * l as f64).collect();
    let tests = vec![TestName::SpecifiedRight, TestName::TPlus, TestName::Bingham];
    for &p in &[3usize, 10] {
        for &full_n in &[200usize, 20_000] {
            let n = fig_n(scale, full_n);
            let spec = ExperimentSpec::new(p, n, taus.clone(), tests.clone(), 0.05, m, seed)?;
            let curve = run_power_experiment(&spec)?;
            let path = out_dir.join(format!("figure4_power_p{p}_n{n}.csv"));
            curve.write_csv(&path)?;
            output.files.push(path);
            let mut panel = FigurePanel {
                title: format!("rejection frequencies, p={p}, n={n}"),
                curves: Vec::new(),
            };
            for &test in &tests {
                let mut freq = Vec::new();
                let mut asym = Vec::new();
                for &tau in &taus {
                    let pt = curve.point(test, tau).expect("point exists");
                    freq.push(pt.freq);
                    asym.push(pt.asym_power);
                }
                panel.curves.push(NamedCurve {
                    name: format!("{} empirical", test.as_str()),
                    style: CurveStyle::Solid,
                    x: taus.clone(),
                    y: freq,
                });
                panel.curves.push(NamedCurve {
                    name: format!("{} asymptotic", test.as_str()),
                    style: CurveStyle::Dashed,
                    x: taus.clone(),
                    y: asym,
                });
            }
            output.panels.push(panel);
        }
    }
    Ok(())
}
