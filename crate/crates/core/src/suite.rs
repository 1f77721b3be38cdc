//! The acceptance suite: thirteen property checks tying the samplers, the
//! renewal machinery, and the interval-map experiments to their independent
//! oracles. Shared by the `validate` subcommand and the acceptance test
//! target so both report the same numbers.

use crate::bpy::{self, BpyParams};
use crate::error::Result;
use crate::exec::KahanSum;
use crate::maps::{self, MapModel};
use crate::renewal::{self, EllDescriptor, RenewalTable};
use crate::special::gamma;
use crate::stable::{levy_density, StableParams};
use crate::stats;

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub skipped: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let status = if self.skipped {
            "SKIP"
        } else if self.pass {
            "pass"
        } else {
            "FAIL"
        };
        format!("[{status}] {:2}. {} — {}", self.id, self.name, self.detail)
    }
}

/// Horizon for the closed-form stable tables: big enough that the truncated
/// tail mass (N+1)^(-1/2) ~ 1.5e-5 is invisible at every n the suite visits.
const BIG_HORIZON: usize = 1 << 48;

fn run<F: FnOnce() -> Result<(bool, String)>>(
    id: usize,
    name: &'static str,
    f: F,
) -> CriterionResult {
    match f() {
        Ok((pass, detail)) => CriterionResult {
            id,
            name,
            pass,
            skipped: false,
            detail,
        },
        Err(e) => CriterionResult {
            id,
            name,
            pass: false,
            skipped: false,
            detail: format!("error: {e}"),
        },
    }
}

fn skip(id: usize, name: &'static str, why: &str) -> CriterionResult {
    CriterionResult {
        id,
        name,
        pass: true,
        skipped: true,
        detail: why.to_string(),
    }
}

/// Runs the suite; the long conditioned-map experiment (criterion 12) only
/// runs when `full` is set. Deterministic for a fixed seed.
pub fn run_suite(full: bool, seed: u64) -> Vec<CriterionResult> {
    let s = |id: u64| seed.wrapping_add(id.wrapping_mul(0x9e3779b97f4a7c15));
    let mut out = Vec::with_capacity(13);
    out.push(run(1, "stable density inversion matches closed form", || {
        c1_stable_oracle()
    }));
    out.push(run(2, "uniform marginal of the weighted occupation law", || {
        c2_bpy_uniform(s(2))
    }));
    out.push(run(3, "Stieltjes transform closed form vs Monte Carlo", || {
        c3_stieltjes(s(3))
    }));
    out.push(run(4, "local-time weight moments", || c4_w_moments(s(4))));
    out.push(run(5, "coefficient arrays match brute-force enumeration", || {
        c5_enumeration()
    }));
    out.push(run(6, "local limit approaches the product of stable densities", || {
        c6_llt()
    }));
    out.push(run(7, "local large-deviation ratio bounded and stable", || {
        c7_lld()
    }));
    out.push(run(8, "tied-down functional reproduces the uniform law", || {
        c8_tied_down()
    }));
    out.push(run(9, "inverse scaling sequences agree asymptotically", || {
        c9_scaling()
    }));
    out.push(run(10, "map return-time tail exponent and symmetry", || {
        c10_return_tails(s(10))
    }));
    out.push(run(11, "occupation fraction follows the arcsine law", || {
        c11_arcsine(s(11))
    }));
    if full {
        out.push(run(12, "conditioned map occupation uniform, rate as predicted", || {
            c12_map_tied_down(s(12))
        }));
    } else {
        out.push(skip(
            12,
            "conditioned map occupation uniform, rate as predicted",
            "skipped (run with --full)",
        ));
    }
    out.push(run(13, "map and renewal bridge samplers agree", || {
        c13_cross_engine(s(13))
    }));
    out
}

fn c1_stable_oracle() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for &scale in &[0.25, 0.5, 1.0, 2.0] {
        let p = StableParams::new(0.5, scale)?;
        for i in 1..=400 {
            let y = i as f64 * 0.05;
            let err = (p.density(y)? - levy_density(scale, y)).abs();
            worst = worst.max(err);
        }
    }
    Ok((
        worst < 1e-6,
        format!("max |inversion − closed form| = {worst:.2e} (tol 1e-6)"),
    ))
}

fn c2_bpy_uniform(seed: u64) -> Result<(bool, String)> {
    let p = BpyParams::new(0.5, vec![0.5, 0.5])?;
    let emp = bpy::empirical(&p, 1_000_000, seed)?;
    let ks = emp.ks_distance(0, |t| t.clamp(0.0, 1.0))?;
    Ok((ks < 0.005, format!("KS vs uniform = {ks:.4} (tol 0.005)")))
}

fn c3_stieltjes(seed: u64) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for &alpha in &[0.3, 0.5, 0.7] {
        for &beta1 in &[0.3, 0.5, 0.7] {
            let p = BpyParams::new(alpha, vec![beta1, 1.0 - beta1])?;
            for &lambda in &[0.5, 1.0, 2.0] {
                let closed = bpy::u1_stieltjes(&p, lambda)?;
                let mc = bpy::expectation(
                    &p,
                    move |u, _| (lambda + u[0]).powf(-alpha),
                    1_000_000,
                    seed,
                )?;
                worst = worst.max(mc.sigmas_from(closed));
            }
        }
    }
    Ok((
        worst < 3.0,
        format!("worst of 27 cells: {worst:.2} standard errors (tol 3)"),
    ))
}

fn c4_w_moments(seed: u64) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for &alpha in &[0.3, 0.5, 0.7] {
        let p = BpyParams::new(alpha, vec![0.5, 0.5])?;
        for q in 1u32..=2 {
            let target =
                gamma(1.0 + alpha) * crate::special::factorial(q + 1)? / gamma(1.0 + (q + 1) as f64 * alpha);
            let mc = bpy::expectation(&p, move |_, w| w.powi(q as i32), 1_000_000, seed)?;
            worst = worst.max(mc.sigmas_from(target));
        }
    }
    Ok((
        worst < 3.0,
        format!("worst of 6 moments: {worst:.2} standard errors (tol 3)"),
    ))
}

/// Brute force: every k-step cell sequence, truncated to the retained box.
fn enum_tn(table: &RenewalTable, k: usize, horizon: usize) -> Vec<f64> {
    let d = table.dims();
    let mut cells: Vec<(f64, usize, usize)> = vec![(table.r00(), usize::MAX, 0)];
    for j in 0..d {
        for m in 1..=table.n_max() {
            let v = table.r_value(j, m);
            if v > 0.0 {
                cells.push((v, j, m));
            }
        }
    }
    fn rec(
        cells: &[(f64, usize, usize)],
        left: usize,
        occ: &mut [usize],
        p: f64,
        horizon: usize,
        out: &mut [f64],
    ) {
        if left == 0 {
            if occ.iter().all(|&o| o < horizon) {
                let idx = occ.iter().fold(0, |a, &i| a * horizon + i);
                out[idx] += p;
            }
            return;
        }
        for &(prob, j, m) in cells {
            if j != usize::MAX {
                occ[j] += m;
            }
            rec(cells, left - 1, occ, p * prob, horizon, out);
            if j != usize::MAX {
                occ[j] -= m;
            }
        }
    }
    let mut out = vec![0.0; horizon.pow(d as u32)];
    let mut occ = vec![0usize; d];
    rec(&cells, k, &mut occ, 1.0, horizon, &mut out);
    out
}

fn c5_enumeration() -> Result<(bool, String)> {
    let tables = vec![
        RenewalTable::from_parts(
            0.5,
            vec![0.5, 0.5],
            0.3,
            vec![vec![0.0, 0.2, 0.1, 0.05], vec![0.0, 0.15, 0.1, 0.1]],
            EllDescriptor::Constant(1.0),
        )?,
        RenewalTable::from_parts(
            0.4,
            vec![1.0 / 3.0; 3],
            0.25,
            vec![vec![0.0, 0.1, 0.08, 0.07]; 3],
            EllDescriptor::Constant(1.0),
        )?,
    ];
    let mut worst = 0.0f64;
    for table in &tables {
        let d = table.dims();
        for k in 0..=5usize {
            let horizon = 3 * k + 1;
            let reference = enum_tn(table, k, horizon);
            let tn = renewal::tn_coefficients(table, k, horizon)?;
            let mut idx = vec![0usize; d];
            for (flat, &want) in reference.iter().enumerate() {
                let mut rem = flat;
                for slot in idx.iter_mut().rev() {
                    *slot = rem % horizon;
                    rem /= horizon;
                }
                worst = worst.max((tn.get(&idx) - want).abs());
            }
        }
    }
    Ok((
        worst < 1e-12,
        format!("max |fft/direct − enumeration| = {worst:.2e} (tol 1e-12)"),
    ))
}

fn c6_llt() -> Result<(bool, String)> {
    let table = renewal::make_stable_table(0.5, &[0.5, 0.5], EllDescriptor::Constant(1.0), BIG_HORIZON)?;
    let vals = [0.25, 0.5, 1.0, 2.0];
    let grid: Vec<Vec<f64>> = vals
        .iter()
        .flat_map(|&a| vals.iter().map(move |&b| vec![a, b]))
        .collect();
    let d50 = renewal::llt_deviation(&table, 50, &grid)?;
    let d400 = renewal::llt_deviation(&table, 400, &grid)?;
    Ok((
        d400 < d50 / 2.0 && d400 < 0.05,
        format!("deviation {d50:.4} at k=50 → {d400:.4} at k=400 (need halving and < 0.05)"),
    ))
}

fn c7_lld() -> Result<(bool, String)> {
    let table = renewal::make_stable_table(0.5, &[0.5, 0.5], EllDescriptor::Constant(1.0), BIG_HORIZON)?;
    let mut all = Vec::new();
    let mut monotone_growth = false;
    for &k in &[1usize, 2, 4, 8] {
        let a_k = table.scaling_a(k)?;
        let row: Vec<f64> = [256usize, 512, 1024, 2048]
            .iter()
            .filter(|&&n| n >= a_k)
            .map(|&n| renewal::lld_ratio(&table, n, k))
            .collect::<Result<_>>()?;
        // An increasing row is drift only if it keeps growing at the same or a
        // faster pace; geometric convergence to the limit from below shows
        // strictly shrinking increments across n-doublings.
        if row.len() >= 3 && row.windows(2).all(|w| w[1] > w[0]) {
            let incs: Vec<f64> = row.windows(2).map(|w| w[1] - w[0]).collect();
            if !incs.windows(2).all(|w| w[1] < w[0]) {
                monotone_growth = true;
            }
        }
        all.extend(row);
    }
    let max = all.iter().cloned().fold(f64::MIN, f64::max);
    let min = all.iter().cloned().fold(f64::MAX, f64::min);
    Ok((
        max / min < 10.0 && !monotone_growth,
        format!(
            "ratio range [{min:.4}, {max:.4}], spread {:.2} (tol 10), monotone growth: {monotone_growth}",
            max / min
        ),
    ))
}

fn c8_tied_down() -> Result<(bool, String)> {
    let table = renewal::make_stable_table(0.5, &[0.5, 0.5], EllDescriptor::Constant(1.0), BIG_HORIZON)?;
    let one = |_: &[f64], _: f64| 1.0;
    let q25 = |u: &[f64], _: f64| f64::from(u8::from(u[0] <= 0.25));
    let q50 = |u: &[f64], _: f64| f64::from(u8::from(u[0] <= 0.5));
    let q75 = |u: &[f64], _: f64| f64::from(u8::from(u[0] <= 0.75));
    let gs: Vec<&dyn Fn(&[f64], f64) -> f64> = vec![&one, &q25, &q50, &q75];
    let vals = renewal::tied_down_functional_many(&table, 4096, &gs)?;
    let errs = [
        (vals[0] - 1.0).abs(),
        (vals[1] - 0.25).abs(),
        (vals[2] - 0.5).abs(),
        (vals[3] - 0.75).abs(),
    ];
    let worst = errs.iter().cloned().fold(0.0f64, f64::max);
    Ok((
        worst < 0.02,
        format!(
            "mass {:.4}, P[U1<=t] errors {:.4}/{:.4}/{:.4} (tol 0.02)",
            vals[0], errs[1], errs[2], errs[3]
        ),
    ))
}

fn scaling_gap(table: &RenewalTable, n: usize) -> Result<f64> {
    let alpha = table.alpha();
    let b_n = table.scaling_b(n as f64)?;
    let k_lo = (table.scaling_b(n as f64 / 2.0)?.ceil() as usize).max(1);
    let k_hi = table.scaling_b(2.0 * n as f64)?;
    let mut worst = 0.0f64;
    let mut k = k_lo;
    while (k as f64) < k_hi {
        let a_k = table.scaling_a(k)?;
        worst = worst.max((k as f64 / b_n - (a_k as f64 / n as f64).powf(alpha)).abs());
        k += 1;
    }
    Ok(worst)
}

fn c9_scaling() -> Result<(bool, String)> {
    let table = renewal::make_stable_table(0.5, &[0.5, 0.5], EllDescriptor::Constant(1.0), BIG_HORIZON)?;
    let coarse = scaling_gap(&table, 1 << 10)?;
    let fine = scaling_gap(&table, 1 << 14)?;
    Ok((
        fine < coarse / 2.0,
        format!("max |k/b_n − (a_k/n)^α| = {coarse:.4} at n=2^10 → {fine:.4} at n=2^14 (need halving)"),
    ))
}

fn c10_return_tails(seed: u64) -> Result<(bool, String)> {
    let m = MapModel::Boole;
    let part = maps::build_partition(&m)?;
    let est = maps::estimate_return_table(&m, &part, 1_000_000, seed)?;
    let t = &est.table;
    let tail: Vec<f64> = (0..=1024usize)
        .map(|n| if n == 0 { 1.0 } else { t.phi_tail(n) })
        .collect();
    let fitted = stats::fit_tail_exponent(&tail, 16..1024)?;
    let mut symmetric = true;
    for n in [1usize, 4, 16, 64, 256] {
        let (t1, t2) = (t.tail(0, n), t.tail(1, n));
        let se = (t1.max(t2) / est.samples as f64).sqrt();
        if (t1 - t2).abs() > 3.0 * se + 1e-12 {
            symmetric = false;
        }
    }
    Ok((
        (0.45..=0.55).contains(&fitted) && symmetric,
        format!("fitted tail exponent {fitted:.3} (need [0.45, 0.55]), cells symmetric within 3σ: {symmetric}"),
    ))
}

fn c11_arcsine(seed: u64) -> Result<(bool, String)> {
    let m = MapModel::Boole;
    let part = maps::build_partition(&m)?;
    let nu = maps::NuSampler::new(|_| 1.0)?;
    let emp = maps::arcsine_experiment(&m, &part, &nu, 10_000, 100_000, seed)?;
    let ks = emp.ks_distance(0, maps::arcsine_cdf)?;
    Ok((ks < 0.02, format!("KS vs arcsine = {ks:.4} (tol 0.02)")))
}

fn c12_map_tied_down(seed: u64) -> Result<(bool, String)> {
    let m = MapModel::Boole;
    let part = maps::build_partition(&m)?;
    let nu = maps::NuSampler::new(|_| 1.0)?;
    let n = 2000u64;
    let est = maps::estimate_return_table(&m, &part, 200_000, seed ^ 0x5151)?;
    let c = maps::fit_tail_constant(&est.table, 16, 1024);
    let b_n = maps::b_from_constant(m.alpha(), c, n as usize);
    let run = maps::tied_down_experiment(
        &m,
        &part,
        &nu,
        n,
        (part.y_lo, part.y_hi),
        b_n,
        10_000,
        seed,
    )?;
    let ks = run.dist.ks_distance(0, |t| t.clamp(0.0, 1.0))?;
    // target cell is all of Y, whose normalized measure is 1
    let predicted = b_n / (gamma(m.alpha()) * n as f64);
    let ratio = run.acceptance_rate / predicted;
    Ok((
        ks < 0.05 && (0.9..=1.1).contains(&ratio),
        format!("conditional KS vs uniform = {ks:.4} (tol 0.05), rate/predicted = {ratio:.3} (need [0.9, 1.1])"),
    ))
}

fn c13_cross_engine(seed: u64) -> Result<(bool, String)> {
    let m = MapModel::Boole;
    let part = maps::build_partition(&m)?;
    let nu = maps::NuSampler::new(|_| 1.0)?;
    let n = 2048usize;
    let accepted = 2000usize;
    let est = maps::estimate_return_table(&m, &part, 200_000, seed ^ 0xabcd)?;
    let c = maps::fit_tail_constant(&est.table, 16, 1024);
    let b_n = maps::b_from_constant(m.alpha(), c, n);
    let map_run = maps::tied_down_experiment(
        &m,
        &part,
        &nu,
        n as u64,
        (part.y_lo, part.y_hi),
        b_n,
        accepted,
        seed,
    )?;
    let bridge = renewal::bridge_sample_mc(&est.table, n, accepted, seed ^ 0x77)?;
    let ks = map_run.dist.ks_two_sample(0, &bridge.dist, 0)?;
    let m1 = accepted as f64;
    let noise = ((m1 + m1) / (m1 * m1)).sqrt();
    let tol = 3.0 * noise;
    Ok((
        ks < tol,
        format!("two-sample KS on U1 = {ks:.4} (tol 3×noise = {tol:.4})"),
    ))
}

/// Total mass of an empirical table minus one; used as a report line.
pub fn table_mass_defect(table: &RenewalTable) -> f64 {
    let mut acc = KahanSum::new();
    acc.add(table.r00());
    for j in 0..table.dims() {
        for n in 1..=table.n_max() {
            acc.add(table.r_value(j, n));
        }
    }
    acc.value() - 1.0
}
