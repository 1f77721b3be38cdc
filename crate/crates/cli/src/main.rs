//! Batch front end: one subcommand per experiment plus `validate` for the
//! acceptance suite. Every run writes `params.echo`, its data CSVs, an SVG
//! where a plot is natural, and a `summary.csv` of pass/fail metrics into
//! `<out>/<experiment>/<name>/`. Identical flags and seed give byte-identical
//! CSV output regardless of the worker count.
//!
//! Exit codes: 0 success, 1 a summary metric failed, 2 usage error,
//! 3 numerical or timeout error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tieddown::bpy::{self, BpyParams};
use tieddown::error::{Error, Result};
use tieddown::maps::{self, MapModel};
use tieddown::renewal::{self, EllDescriptor, RenewalTable};
use tieddown::special::gamma;
use tieddown::stable::{levy_density, StableParams};
use tieddown::stats::{fmt_f64, schema, CsvTable, Series};
use tieddown::suite;

#[derive(Parser)]
#[command(name = "tieddown", version, about = "Occupation-time laboratory for infinite ergodic transformations")]
struct Cli {
    /// Base RNG seed; all randomness is derived from it deterministically.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Worker threads (0 = one per core). Affects wall time only.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Output directory root.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Run name (subdirectory under the experiment); defaults to the seed.
    #[arg(long, global = true)]
    name: Option<String>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct StableArgs {
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    /// Tail coefficients beta_1,..,beta_d (must sum to 1).
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 0.5])]
    beta: Vec<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// One-sided stable density via Fourier inversion, with the alpha = 1/2
    /// closed form as an oracle column when applicable.
    StableDensity {
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value_t = 20.0)]
        ymax: f64,
        #[arg(long, default_value_t = 400)]
        points: usize,
    },
    /// Weighted occupation-law table: moments, Stieltjes transform, marginal CDF.
    BpyTable {
        #[command(flatten)]
        law: StableArgs,
        /// Monte Carlo draws.
        #[arg(long, default_value_t = 100_000)]
        m: u64,
    },
    /// Local limit deviations of the coefficient arrays at growing k.
    RenewalLlt {
        #[command(flatten)]
        law: StableArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [50usize, 100, 200, 400])]
        k: Vec<usize>,
        #[arg(long, default_value_t = 1 << 48)]
        nmax: usize,
    },
    /// Local large-deviation ratios over a (k, n) grid.
    RenewalLld {
        #[command(flatten)]
        law: StableArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 4, 8])]
        k: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [256usize, 512, 1024, 2048])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 1 << 48)]
        nmax: usize,
    },
    /// Exact tied-down functionals (d = 2): total mass and P[U1 <= t].
    RenewalTieddown {
        #[command(flatten)]
        law: StableArgs,
        #[arg(long, default_value_t = 4096)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5, 0.75])]
        t: Vec<f64>,
        #[arg(long, default_value_t = 0.02)]
        tol: f64,
        #[arg(long, default_value_t = 1 << 48)]
        nmax: usize,
    },
    /// Monte Carlo renewal bridge (any d), from stable parameters or a table file.
    RenewalBridge {
        #[command(flatten)]
        law: StableArgs,
        /// Load the step table from a file instead of building a stable one.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, default_value_t = 2048)]
        n: usize,
        #[arg(long, default_value_t = 2000)]
        accepted: usize,
        #[arg(long, default_value_t = 1 << 20)]
        nmax: usize,
    },
    /// Empirical return-time table of an interval map, saved to disk.
    MapReturns {
        #[arg(long, default_value = "boole")]
        map: String,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Unconditioned occupation fractions vs the arcsine law (control).
    MapArcsine {
        #[arg(long, default_value = "boole")]
        map: String,
        #[arg(long, default_value_t = 10_000)]
        n: u64,
        #[arg(long, default_value_t = 100_000)]
        orbits: u64,
    },
    /// Conditioned (tied-down) occupation experiment on the map.
    MapTieddown {
        #[arg(long, default_value = "boole")]
        map: String,
        #[arg(long, default_value_t = 2000)]
        n: u64,
        #[arg(long, default_value_t = 10_000)]
        accepted: usize,
        /// Return-table samples used to fit the normalizing sequence.
        #[arg(long, default_value_t = 200_000)]
        table_samples: u64,
    },
    /// Run the acceptance suite and print one line per criterion.
    Validate {
        /// Include the long conditioned-map criterion.
        #[arg(long)]
        full: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.workers > 0 {
        // affects scheduling only; merge order is fixed by the strata
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global()
        {
            eprintln!("worker pool: {e}");
            return ExitCode::from(3);
        }
    }
    match dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more summary metrics failed; see summary.csv");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

/// Collects summary rows and writes the per-run report files.
struct Reporter {
    dir: PathBuf,
    summary: CsvTable,
    all_pass: bool,
}

impl Reporter {
    fn new(cli: &Cli, experiment: &str, params: &[(&str, String)]) -> Result<Self> {
        let name = cli.name.clone().unwrap_or_else(|| format!("seed{}", cli.seed));
        let dir = cli.out.join(experiment).join(name);
        std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let mut echo = String::new();
        let _ = writeln!(echo, "seed = {}", cli.seed);
        let _ = writeln!(echo, "workers = {}", cli.workers);
        for (k, v) in params {
            let _ = writeln!(echo, "{k} = {v}");
        }
        let path = dir.join("params.echo");
        std::fs::write(&path, echo).map_err(|e| Error::io(&path, e))?;
        Ok(Self {
            dir,
            summary: schema::summary(),
            all_pass: true,
        })
    }

    fn record(&mut self, experiment: &str, n: u64, metric: &str, value: f64, tol: f64, pass: bool) {
        self.all_pass &= pass;
        self.summary.push(vec![
            experiment.to_string(),
            n.to_string(),
            metric.to_string(),
            fmt_f64(value),
            fmt_f64(tol),
            pass.to_string(),
        ]);
    }

    fn csv(&self, file: &str, table: &CsvTable) -> Result<()> {
        table.emit(&self.dir.join(file))
    }

    fn svg(&self, file: &str, title: &str, series: &[Series]) -> Result<()> {
        tieddown::stats::emit_svg(&self.dir.join(file), title, series)
    }

    fn finish(self) -> Result<bool> {
        self.summary.emit(&self.dir.join("summary.csv"))?;
        println!("report written to {}", self.dir.display());
        Ok(self.all_pass)
    }
}

fn load_map(spec: &str) -> Result<MapModel> {
    if Path::new(spec).exists() {
        let text = std::fs::read_to_string(spec).map_err(|e| Error::io(Path::new(spec), e))?;
        maps::parse_map_spec(&text)
    } else {
        maps::parse_map_spec(spec)
    }
}

fn fmt_vec(v: &[f64]) -> String {
    v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(",")
}

/// Cartesian power of the standard evaluation values, one point per cell.
fn llt_grid(d: usize) -> Vec<Vec<f64>> {
    let vals = [0.25, 0.5, 1.0, 2.0];
    let mut grid: Vec<Vec<f64>> = vec![vec![]];
    for _ in 0..d {
        grid = grid
            .into_iter()
            .flat_map(|p| {
                vals.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    grid
}

fn dispatch(cli: &Cli) -> Result<bool> {
    match &cli.cmd {
        Cmd::StableDensity {
            alpha,
            scale,
            ymax,
            points,
        } => {
            let mut rep = Reporter::new(
                cli,
                "stable-density",
                &[
                    ("alpha", fmt_f64(*alpha)),
                    ("scale", fmt_f64(*scale)),
                    ("ymax", fmt_f64(*ymax)),
                    ("points", points.to_string()),
                ],
            )?;
            let p = StableParams::new(*alpha, *scale)?;
            let closed = (*alpha - 0.5).abs() < 1e-15;
            let mut csv = if closed {
                CsvTable::new(&["y", "psi", "closed_form"])
            } else {
                CsvTable::new(&["y", "psi"])
            };
            let mut curve = Vec::with_capacity(*points);
            let mut max_err = 0.0f64;
            for i in 1..=*points {
                let y = *ymax * i as f64 / *points as f64;
                let psi = p.density(y)?;
                curve.push((y, psi));
                let mut row = vec![fmt_f64(y), fmt_f64(psi)];
                if closed {
                    let reference = levy_density(*scale, y);
                    max_err = max_err.max((psi - reference).abs());
                    row.push(fmt_f64(reference));
                }
                csv.push(row);
            }
            rep.csv("density.csv", &csv)?;
            rep.svg(
                "density.svg",
                "one-sided stable density",
                &[Series {
                    label: format!("psi (alpha={alpha}, scale={scale})"),
                    points: curve,
                }],
            )?;
            if closed {
                rep.record("stable-density", *points as u64, "max_error_vs_closed_form", max_err, 1e-6, max_err < 1e-6);
            }
            rep.finish()
        }

        Cmd::BpyTable { law, m } => {
            let mut rep = Reporter::new(
                cli,
                "bpy-table",
                &[
                    ("alpha", fmt_f64(law.alpha)),
                    ("beta", fmt_vec(&law.beta)),
                    ("m", m.to_string()),
                ],
            )?;
            let p = BpyParams::new(law.alpha, law.beta.clone())?;
            let d = p.dim();
            let draws = bpy::sample_weighted(&p, *m, cli.seed)?;
            let mut csv = schema::bpy_samples(d);
            for draw in &draws {
                let mut row: Vec<String> = draw.u.iter().map(|&u| fmt_f64(u)).collect();
                row.push(fmt_f64(draw.w));
                row.push(fmt_f64(draw.weight));
                csv.push(row);
            }
            rep.csv("bpy_samples.csv", &csv)?;
            for q in 1u32..=2 {
                let target = gamma(1.0 + law.alpha) * tieddown::special::factorial(q + 1)?
                    / gamma(1.0 + (q + 1) as f64 * law.alpha);
                let mc = bpy::expectation(&p, move |_, w| w.powi(q as i32), *m, cli.seed)?;
                let sig = mc.sigmas_from(target);
                rep.record("bpy-table", *m, &format!("w_moment_q{q}_sigmas"), sig, 4.0, sig < 4.0);
            }
            if d == 2 {
                for lambda in [0.5, 1.0, 2.0] {
                    let closed = bpy::u1_stieltjes(&p, lambda)?;
                    let alpha = law.alpha;
                    let mc = bpy::expectation(&p, move |u, _| (lambda + u[0]).powf(-alpha), *m, cli.seed)?;
                    let sig = mc.sigmas_from(closed);
                    rep.record("bpy-table", *m, &format!("stieltjes_lambda{lambda}_sigmas"), sig, 4.0, sig < 4.0);
                }
            }
            if d == 2 && (law.alpha - 0.5).abs() < 1e-15 {
                let emp = bpy::empirical(&p, *m, cli.seed)?;
                let beta1 = law.beta[0];
                let ks = emp.ks_distance(0, |x| {
                    bpy::u1_cdf_half(beta1, x.clamp(0.0, 1.0)).unwrap_or(if x < 0.0 { 0.0 } else { 1.0 })
                })?;
                let tol = 0.01 + 4.0 / (*m as f64).sqrt();
                rep.record("bpy-table", *m, "ks_u1_vs_closed_form", ks, tol, ks < tol);
            }
            rep.finish()
        }

        Cmd::RenewalLlt { law, k, nmax } => {
            let mut rep = Reporter::new(
                cli,
                "renewal-llt",
                &[
                    ("alpha", fmt_f64(law.alpha)),
                    ("beta", fmt_vec(&law.beta)),
                    ("k", k.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")),
                    ("nmax", nmax.to_string()),
                ],
            )?;
            let table = renewal::make_stable_table(law.alpha, &law.beta, EllDescriptor::Constant(1.0), *nmax)?;
            let grid = llt_grid(table.dims());
            let mut csv = schema::llt(table.dims());
            let mut maxima = Vec::new();
            for &kk in k {
                let devs = renewal::llt_deviation_points(&table, kk, &grid)?;
                let mut worst = 0.0f64;
                for (y, dev) in grid.iter().zip(&devs) {
                    let mut row = vec![kk.to_string()];
                    row.extend(y.iter().map(|&v| fmt_f64(v)));
                    row.push(fmt_f64(*dev));
                    csv.push(row);
                    worst = worst.max(*dev);
                }
                maxima.push((kk as f64, worst));
            }
            rep.csv("llt.csv", &csv)?;
            rep.svg(
                "llt.svg",
                "local limit deviation vs k",
                &[Series {
                    label: "max deviation".into(),
                    points: maxima.clone(),
                }],
            )?;
            let decreasing = maxima.windows(2).all(|w| w[1].1 < w[0].1);
            let last = maxima.last().map_or(f64::NAN, |p| p.1);
            rep.record("renewal-llt", *k.last().unwrap_or(&0) as u64, "deviation_at_largest_k", last, 0.05, last < 0.05 && decreasing);
            rep.finish()
        }

        Cmd::RenewalLld { law, k, n, nmax } => {
            let mut rep = Reporter::new(
                cli,
                "renewal-lld",
                &[
                    ("alpha", fmt_f64(law.alpha)),
                    ("beta", fmt_vec(&law.beta)),
                    ("k", k.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")),
                    ("n", n.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")),
                    ("nmax", nmax.to_string()),
                ],
            )?;
            let table = renewal::make_stable_table(law.alpha, &law.beta, EllDescriptor::Constant(1.0), *nmax)?;
            let mut csv = schema::lld();
            let mut ratios = Vec::new();
            for &kk in k {
                let a_k = table.scaling_a(kk)?;
                for &nn in n {
                    if nn < a_k {
                        continue;
                    }
                    let ratio = renewal::lld_ratio(&table, nn, kk)?;
                    csv.push(vec![nn.to_string(), kk.to_string(), fmt_f64(ratio)]);
                    ratios.push(ratio);
                }
            }
            rep.csv("lld.csv", &csv)?;
            let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
            let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
            let spread = max / min;
            rep.record("renewal-lld", *n.last().unwrap_or(&0) as u64, "ratio_spread", spread, 10.0, spread < 10.0);
            rep.finish()
        }

        Cmd::RenewalTieddown { law, n, t, tol, nmax } => {
            let mut rep = Reporter::new(
                cli,
                "renewal-tieddown",
                &[
                    ("alpha", fmt_f64(law.alpha)),
                    ("beta", fmt_vec(&law.beta)),
                    ("n", n.to_string()),
                    ("t", fmt_vec(t)),
                    ("tol", fmt_f64(*tol)),
                    ("nmax", nmax.to_string()),
                ],
            )?;
            let table = renewal::make_stable_table(law.alpha, &law.beta, EllDescriptor::Constant(1.0), *nmax)?;
            let one = |_: &[f64], _: f64| 1.0;
            let indicators: Vec<Box<dyn Fn(&[f64], f64) -> f64>> = t
                .iter()
                .map(|&ti| {
                    Box::new(move |u: &[f64], _: f64| f64::from(u8::from(u[0] <= ti)))
                        as Box<dyn Fn(&[f64], f64) -> f64>
                })
                .collect();
            let mut gs: Vec<&dyn Fn(&[f64], f64) -> f64> = vec![&one];
            gs.extend(indicators.iter().map(|b| b.as_ref()));
            let vals = renewal::tied_down_functional_many(&table, *n, &gs)?;
            let mass_err = (vals[0] - 1.0).abs();
            rep.record("renewal-tieddown", *n as u64, "total_mass_error", mass_err, *tol, mass_err < *tol);
            for (ti, vi) in t.iter().zip(&vals[1..]) {
                let err = (vi - ti).abs();
                rep.record("renewal-tieddown", *n as u64, &format!("uniform_law_error_t{ti}"), err, *tol, err < *tol);
            }
            rep.finish()
        }

        Cmd::RenewalBridge {
            law,
            table,
            n,
            accepted,
            nmax,
        } => {
            let mut rep = Reporter::new(
                cli,
                "renewal-bridge",
                &[
                    ("alpha", fmt_f64(law.alpha)),
                    ("beta", fmt_vec(&law.beta)),
                    ("table", table.as_ref().map_or("<stable>".into(), |p| p.display().to_string())),
                    ("n", n.to_string()),
                    ("accepted", accepted.to_string()),
                    ("nmax", nmax.to_string()),
                ],
            )?;
            let tab = match table {
                Some(path) => RenewalTable::load(path)?,
                None => renewal::make_stable_table(law.alpha, &law.beta, EllDescriptor::Constant(1.0), *nmax)?,
            };
            let bridge = renewal::bridge_sample_mc(&tab, *n, *accepted, cli.seed)?;
            let mut csv = schema::bridge(tab.dims());
            for (k, occ) in &bridge.samples {
                let mut row = vec![n.to_string(), k.to_string()];
                row.extend(occ.iter().map(ToString::to_string));
                csv.push(row);
            }
            rep.csv("bridge.csv", &csv)?;
            rep.record(
                "renewal-bridge",
                *n as u64,
                "acceptance_rate",
                bridge.acceptance_rate,
                renewal::ACCEPTANCE_FLOOR,
                bridge.acceptance_rate > renewal::ACCEPTANCE_FLOOR,
            );
            if tab.dims() == 2 && (tab.alpha() - 0.5).abs() < 1e-12 {
                let beta1 = tab.beta()[0];
                let ks = bridge.dist.ks_distance(0, |x| {
                    bpy::u1_cdf_half(beta1, x.clamp(0.0, 1.0)).unwrap_or(if x < 0.0 { 0.0 } else { 1.0 })
                })?;
                let tol = 3.0 / (*accepted as f64).sqrt() + 0.02;
                rep.record("renewal-bridge", *n as u64, "ks_u1_vs_closed_form", ks, tol, ks < tol);
            }
            rep.finish()
        }

        Cmd::MapReturns { map, samples } => {
            let mut rep = Reporter::new(
                cli,
                "map-returns",
                &[("map", map.clone()), ("samples", samples.to_string())],
            )?;
            let m = load_map(map)?;
            let part = maps::build_partition(&m)?;
            let est = maps::estimate_return_table(&m, &part, *samples, cli.seed)?;
            est.table.save(&rep.dir.join("return_table.txt"))?;
            let tail: Vec<f64> = (0..=1024usize)
                .map(|nn| if nn == 0 { 1.0 } else { est.table.phi_tail(nn) })
                .collect();
            let fitted = tieddown::stats::fit_tail_exponent(&tail, 16..1024)?;
            rep.record(
                "map-returns",
                *samples,
                "fitted_tail_exponent",
                fitted,
                0.05,
                (0.45..=0.55).contains(&fitted),
            );
            let c = maps::fit_tail_constant(&est.table, 16, 1024);
            rep.record("map-returns", *samples, "fitted_tail_constant", c, f64::INFINITY, c > 0.0);
            rep.record("map-returns", *samples, "lumped_excursions", est.lumped as f64, f64::INFINITY, true);
            rep.svg(
                "tail.svg",
                "return-time tail (log-log)",
                &[Series {
                    label: "log2 tail vs log2 n".into(),
                    points: (4..=10)
                        .map(|e| (e as f64, est.table.phi_tail(1 << e).log2()))
                        .collect(),
                }],
            )?;
            rep.finish()
        }

        Cmd::MapArcsine { map, n, orbits } => {
            let mut rep = Reporter::new(
                cli,
                "map-arcsine",
                &[
                    ("map", map.clone()),
                    ("n", n.to_string()),
                    ("orbits", orbits.to_string()),
                ],
            )?;
            let m = load_map(map)?;
            let part = maps::build_partition(&m)?;
            let nu = maps::NuSampler::new(|_| 1.0)?;
            let emp = maps::arcsine_experiment(&m, &part, &nu, *n, *orbits, cli.seed)?;
            let ks = emp.ks_distance(0, maps::arcsine_cdf)?;
            rep.record("map-arcsine", *n, "ks_vs_arcsine", ks, 0.02, ks < 0.02);
            let mut ecdf = Vec::new();
            let mut pts: Vec<f64> = emp.projection(0)?.into_iter().map(|(v, _)| v).collect();
            pts.sort_by(f64::total_cmp);
            for q in 0..=100 {
                let idx = (q * (pts.len() - 1)) / 100;
                ecdf.push((pts[idx], idx as f64 / (pts.len() - 1) as f64));
            }
            let curve: Vec<(f64, f64)> = (0..=100)
                .map(|i| {
                    let t = i as f64 / 100.0;
                    (t, maps::arcsine_cdf(t))
                })
                .collect();
            rep.svg(
                "arcsine.svg",
                "occupation fraction CDF vs arcsine law",
                &[
                    Series {
                        label: "empirical".into(),
                        points: ecdf,
                    },
                    Series {
                        label: "arcsine".into(),
                        points: curve,
                    },
                ],
            )?;
            rep.finish()
        }

        Cmd::MapTieddown {
            map,
            n,
            accepted,
            table_samples,
        } => {
            let mut rep = Reporter::new(
                cli,
                "map-tieddown",
                &[
                    ("map", map.clone()),
                    ("n", n.to_string()),
                    ("accepted", accepted.to_string()),
                    ("table_samples", table_samples.to_string()),
                ],
            )?;
            let m = load_map(map)?;
            let part = maps::build_partition(&m)?;
            let nu = maps::NuSampler::new(|_| 1.0)?;
            let est = maps::estimate_return_table(&m, &part, *table_samples, cli.seed ^ 0x5151)?;
            let c = maps::fit_tail_constant(&est.table, 16, 1024);
            let b_n = maps::b_from_constant(m.alpha(), c, *n as usize);
            let run = maps::tied_down_experiment(
                &m,
                &part,
                &nu,
                *n,
                (part.y_lo, part.y_hi),
                b_n,
                *accepted,
                cli.seed,
            )?;
            let mut csv = schema::map_accept(m.dims());
            for r in &run.records {
                let mut row = vec![fmt_f64(r.x0), n.to_string()];
                row.extend(r.s_a.iter().map(ToString::to_string));
                row.push(r.s_y.to_string());
                csv.push(row);
            }
            rep.csv("map_accept.csv", &csv)?;
            let ks = run.dist.ks_distance(0, |t| t.clamp(0.0, 1.0))?;
            rep.record("map-tieddown", *n, "ks_vs_uniform", ks, 0.05, ks < 0.05);
            let predicted = b_n / (gamma(m.alpha()) * *n as f64);
            let ratio = run.acceptance_rate / predicted;
            rep.record("map-tieddown", *n, "rate_over_predicted", ratio, 0.1, (0.9..=1.1).contains(&ratio));
            rep.finish()
        }

        Cmd::Validate { full } => {
            let mut rep = Reporter::new(cli, "validate", &[("full", full.to_string())])?;
            let results = suite::run_suite(*full, cli.seed);
            for r in &results {
                println!("{}", r.line());
                if !r.skipped {
                    rep.record(r.name, r.id as u64, "pass", f64::from(u8::from(r.pass)), 1.0, r.pass);
                }
            }
            rep.finish()
        }
    }
}
