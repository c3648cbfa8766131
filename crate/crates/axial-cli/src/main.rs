mod dataset;
mod report;
mod svg;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use axial::harness::{replicate_figure, run_power_experiment, ExperimentSpec, Scale};
use axial::limlaw::{build_table, crit_value, CritMethod, EigenTestKind, LimitMatrixSpec, Side};
use axial::models::{sample_axial, AngularFunction, AxialModel};
use axial::rng::RngStream;
use axial::teststats::{
    bingham_q, eigen_test, rayleigh_stat, t_specified, EigenNull, TestName,
};
use axial::{Error, LimitLawTable, Result};

use dataset::{load_dataset, write_dataset, DataFileSpec, Delimiter};
use report::JsonReport;

#[derive(Parser)]
#[command(name = "axial", about = "Axial tests of uniformity on the unit hypersphere")]
struct Cli {
    /// Master seed; every random output is a pure function of it.
    #[arg(long, global = true, default_value_t = 20260823)]
    seed: u64,
    /// Worker threads for Monte Carlo work (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory for generated files.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum DelimArg {
    Comma,
    Whitespace,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Analytic,
    Mc,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Desk,
    Full,
}

#[derive(Subcommand)]
enum Cmd {
    /// Draw a sample from an axially symmetric model and write it as CSV.
    Sample {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        kappa: f64,
        /// Angular function: watson or linear.
        #[arg(long, default_value = "watson")]
        f: String,
        /// Location axis as comma-separated coordinates (default e1).
        #[arg(long)]
        theta: Option<String>,
        /// Output file name inside --out.
        #[arg(long, default_value = "sample.csv")]
        name: String,
    },
    /// Run uniformity tests on a dataset and print JSON reports.
    Test {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value_t = DelimArg::Comma)]
        delimiter: DelimArg,
        #[arg(long, default_value_t = false)]
        header: bool,
        #[arg(long, default_value_t = false)]
        renormalize: bool,
        /// Comma-separated test names, e.g. bingham,t_plus,specified_right.
        #[arg(long)]
        tests: String,
        /// Axis for the specified-axis tests, comma-separated coordinates.
        #[arg(long)]
        theta: Option<String>,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        /// Critical values for the eigenvalue tests: analytic (p = 2, 3)
        /// or mc (any p).
        #[arg(long, value_enum, default_value_t = MethodArg::Analytic)]
        crit_method: MethodArg,
        /// Monte Carlo draws for mc critical values.
        #[arg(long, default_value_t = 200_000)]
        m: usize,
    },
    /// Print a critical value for an eigenvalue test.
    Crit {
        #[arg(long)]
        test: String,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Analytic)]
        method: MethodArg,
        #[arg(long, default_value_t = 200_000)]
        m: usize,
    },
    /// Size/power study over a grid of local alternatives.
    Power {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: usize,
        /// Comma-separated tau values (kappa = tau p / sqrt(n)).
        #[arg(long)]
        taus: String,
        #[arg(long)]
        tests: String,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = 2_000)]
        replicates: usize,
    },
    /// Simulate the limiting eigenvalue laws and write the table as CSV.
    Limlaw {
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 0.0)]
        tau: f64,
        #[arg(long, default_value_t = 200_000)]
        m: usize,
    },
    /// Reproduce one of the four simulation figures (CSV + SVG).
    Figure {
        /// Figure id, 1 through 4.
        #[arg(long)]
        id: u8,
        #[arg(long, value_enum, default_value_t = ScaleArg::Desk)]
        scale: ScaleArg,
    },
}

fn parse_theta(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("cannot parse theta component '{f}'")))
        })
        .collect()
}

fn parse_taus(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidArgument(format!("cannot parse tau '{f}'")))
        })
        .collect()
}

fn parse_tests(text: &str) -> Result<Vec<TestName>> {
    text.split(',').map(|t| TestName::parse(t.trim())).collect()
}

fn eigen_kind(name: TestName) -> Option<EigenTestKind> {
    match name {
        TestName::TPlus => Some(EigenTestKind::Plus),
        TestName::TMinus => Some(EigenTestKind::Minus),
        TestName::TPm => Some(EigenTestKind::PlusMinus),
        _ => None,
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    }
    std::fs::create_dir_all(&cli.out)?;
    match cli.cmd {
        Cmd::Sample {
            p,
            n,
            kappa,
            f,
            theta,
            name,
        } => {
            let f = AngularFunction::by_label(&f)?;
            let model = match theta {
                Some(t) => AxialModel::new(p, parse_theta(&t)?, kappa, f)?,
                None => AxialModel::with_axis_e1(p, kappa, f)?,
            };
            let mut stream = RngStream::new(cli.seed, 0);
            let sample = sample_axial(&model, n, &mut stream)?;
            let path = cli.out.join(name);
            write_dataset(&sample, &path)?;
            println!(
                "{}",
                serde_json::json!({
                    "file": path.display().to_string(),
                    "p": p, "n": n, "kappa": kappa, "seed": cli.seed,
                })
            );
        }
        Cmd::Test {
            data,
            delimiter,
            header,
            renormalize,
            tests,
            theta,
            alpha,
            crit_method,
            m,
        } => {
            let spec = DataFileSpec {
                path: data,
                delimiter: match delimiter {
                    DelimArg::Comma => Delimiter::Comma,
                    DelimArg::Whitespace => Delimiter::Whitespace,
                },
                has_header: header,
                renormalize,
            };
            let sample = load_dataset(&spec)?;
            let tests = parse_tests(&tests)?;
            let theta = theta.map(|t| parse_theta(&t)).transpose()?;
            if tests.iter().any(|t| t.needs_theta()) && theta.is_none() {
                return Err(Error::InvalidArgument(
                    "--theta is required for the specified-axis tests".into(),
                ));
            }
            // One shared table serves every eigen test that needs MC criticals.
            let table: Option<LimitLawTable> = match crit_method {
                MethodArg::Mc if tests.iter().any(|t| eigen_kind(*t).is_some()) => Some(
                    build_table(&LimitMatrixSpec::new(sample.p(), 0.0)?, m, cli.seed)?,
                ),
                _ => None,
            };
            let mut reports = Vec::new();
            for test in tests {
                let mut params = BTreeMap::new();
                params.insert("p".into(), serde_json::json!(sample.p()));
                params.insert("n".into(), serde_json::json!(sample.n()));
                if let Some(t) = &theta {
                    if test.needs_theta() {
                        params.insert("theta".into(), serde_json::json!(t));
                    }
                }
                let report = match test {
                    TestName::SpecifiedRight => {
                        t_specified(&sample, theta.as_ref().unwrap(), Side::Right, alpha)?
                    }
                    TestName::SpecifiedLeft => {
                        t_specified(&sample, theta.as_ref().unwrap(), Side::Left, alpha)?
                    }
                    TestName::SpecifiedTwoSided => {
                        t_specified(&sample, theta.as_ref().unwrap(), Side::TwoSided, alpha)?
                    }
                    TestName::Bingham => bingham_q(&sample, alpha)?,
                    TestName::Rayleigh => rayleigh_stat(&sample, alpha)?,
                    TestName::TPlus | TestName::TMinus | TestName::TPm => {
                        let null = match &table {
                            Some(t) => {
                                params.insert("m".into(), serde_json::json!(m));
                                params.insert("seed".into(), serde_json::json!(cli.seed));
                                EigenNull::Table(t)
                            }
                            None => EigenNull::Analytic,
                        };
                        eigen_test(&sample, eigen_kind(test).unwrap(), alpha, null)?
                    }
                };
                reports.push(JsonReport::from_test(&report, params));
            }
            println!("{}", serde_json::to_string_pretty(&reports).unwrap());
        }
        Cmd::Crit {
            test,
            p,
            alpha,
            method,
            m,
        } => {
            let name = TestName::parse(&test)?;
            let kind = eigen_kind(name).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "critical-value lookup applies to t_plus, t_minus, t_pm; got {test}"
                ))
            })?;
            let (method, method_name) = match method {
                MethodArg::Analytic => (CritMethod::Analytic, "analytic"),
                MethodArg::Mc => (CritMethod::MonteCarlo, "mc"),
            };
            let crit = crit_value(kind, p, alpha, method, m, cli.seed)?;
            println!(
                "{}",
                serde_json::json!({
                    "test": name.as_str(), "p": p, "alpha": alpha,
                    "method": method_name, "crit": crit,
                    "m": m, "seed": cli.seed,
                })
            );
        }
        Cmd::Power {
            p,
            n,
            taus,
            tests,
            alpha,
            replicates,
        } => {
            let spec = ExperimentSpec::new(
                p,
                n,
                parse_taus(&taus)?,
                parse_tests(&tests)?,
                alpha,
                replicates,
                cli.seed,
            )?;
            let curve = run_power_experiment(&spec)?;
            let csv_path = cli.out.join(format!("power_p{p}_n{n}.csv"));
            curve.write_csv(&csv_path)?;
            let mut named = Vec::new();
            for &test in &spec.tests {
                let mut freq = Vec::new();
                let mut asym = Vec::new();
                for &tau in &spec.tau_grid {
                    let pt = curve.point(test, tau).unwrap();
                    freq.push(pt.freq);
                    asym.push(pt.asym_power);
                }
                named.push(axial::harness::NamedCurve {
                    name: format!("{} empirical", test.as_str()),
                    style: axial::harness::CurveStyle::Solid,
                    x: spec.tau_grid.clone(),
                    y: freq,
                });
                named.push(axial::harness::NamedCurve {
                    name: format!("{} asymptotic", test.as_str()),
                    style: axial::harness::CurveStyle::Dashed,
                    x: spec.tau_grid.clone(),
                    y: asym,
                });
            }
            let svg_path = cli.out.join(format!("power_p{p}_n{n}.svg"));
            svg::emit_svg(
                &format!("rejection frequencies, p={p}, n={n}"),
                &named,
                &svg_path,
            )?;
            println!(
                "{}",
                serde_json::json!({
                    "csv": csv_path.display().to_string(),
                    "svg": svg_path.display().to_string(),
                    "seed": cli.seed,
                })
            );
        }
        Cmd::Limlaw { p, tau, m } => {
            let table = build_table(&LimitMatrixSpec::new(p, tau)?, m, cli.seed)?;
            let path = cli.out.join(format!("limlaw_p{p}.csv"));
            table.write_csv(&path)?;
            println!(
                "{}",
                serde_json::json!({
                    "file": path.display().to_string(),
                    "p": p, "tau": tau, "m": m, "seed": cli.seed,
                })
            );
        }
        Cmd::Figure { id, scale } => {
            let scale = match scale {
                ScaleArg::Desk => Scale::Desk,
                ScaleArg::Full => Scale::Full,
            };
            let output = replicate_figure(id, scale, cli.seed, &cli.out)?;
            let mut files: Vec<String> =
                output.files.iter().map(|f| f.display().to_string()).collect();
            for (i, panel) in output.panels.iter().enumerate() {
                let path = cli.out.join(format!("figure{id}_panel{}.svg", i + 1));
                svg::emit_svg(&panel.title, &panel.curves, &path)?;
                files.push(path.display().to_string());
            }
            println!(
                "{}",
                serde_json::json!({ "figure": id, "seed": cli.seed, "files": files })
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Numeric(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
