//! Limit-theorem checks and the tied-down functional.
//!
//! Everything here rides on one decomposition: a k-step path splits by how
//! many steps landed in each cell, so the d-dimensional coefficient
//! T_{n_1..n_d}(k) is a multinomially weighted sum of products of 1-d
//! convolution powers. That turns lattices of ~10^12 cells into a few
//! thousand 1-d FFTs.

use crate::error::{Error, Result};
use crate::exec::{run_strata, KahanSum};
use crate::special::ln_gamma;
use crate::stable::StableParams;
use crate::stats::EmpiricalDistribution;

use super::convolution::KernelFft;
use super::{convolution, RenewalTable};

/// Per-term floor for the multinomial pair sums; terms bounded below this
/// contribute less than ~1e-9 in aggregate.
const LN_PAIR_TOL: f64 = -36.84; // ln(1e-16)

fn ln_factorials(k: usize) -> Vec<f64> {
    (0..=k).map(|i| ln_gamma(i as f64 + 1.0)).collect()
}

struct AxisPowers {
    kernel: Vec<f64>,
    needed: Vec<usize>,
    /// vals[m][p] = (kernel^{*m})[needed[p]]
    vals: Vec<Vec<f64>>,
}

/// Local limit deviations |a_k^d T_{floor(y a_k)}(k) - prod psi_j(y_j)|, one
/// per grid point.
pub fn llt_deviation_points(
    table: &RenewalTable,
    k: usize,
    grid: &[Vec<f64>],
) -> Result<Vec<f64>> {
    let d = table.dims();
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty evaluation grid".into()));
    }
    for y in grid {
        if y.len() != d {
            return Err(Error::Dimension(y.len()));
        }
        if y.iter().any(|&c| !(c > 0.0)) {
            return Err(Error::Domain("grid points must be strictly positive".into()));
        }
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    let a_k = table.scaling_a(k)? as f64;

    // distinct lattice indices needed per axis
    let needed_per_axis: Vec<Vec<usize>> = (0..d)
        .map(|j| {
            let mut v: Vec<usize> = grid.iter().map(|y| (y[j] * a_k).floor() as usize).collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect();

    // 1-d convolution powers per axis, shared between identical axes
    let mut axes: Vec<AxisPowers> = Vec::new();
    let mut axis_of: Vec<usize> = Vec::with_capacity(d);
    for j in 0..d {
        let needed = &needed_per_axis[j];
        let h = *needed.last().unwrap();
        let kernel = table.kernel_row(j, h);
        if let Some(pos) = axes
            .iter()
            .position(|a| a.kernel == kernel && &a.needed == needed)
        {
            axis_of.push(pos);
            continue;
        }
        let conv = KernelFft::new(&kernel, h + 1);
        let mut vals: Vec<Vec<f64>> = Vec::with_capacity(k + 1);
        vals.push(needed.iter().map(|&i| f64::from(u8::from(i == 0))).collect());
        let mut cur = vec![1.0];
        for _ in 1..=k {
            cur = conv.apply(&cur)?;
            vals.push(needed.iter().map(|&i| cur[i]).collect());
        }
        axes.push(AxisPowers {
            kernel,
            needed: needed.clone(),
            vals,
        });
        axis_of.push(axes.len() - 1);
    }

    let lnfact = ln_factorials(k);
    let r00 = table.r00();
    let densities: Vec<StableParams> = table
        .beta()
        .iter()
        .map(|&b| StableParams::new(table.alpha(), b))
        .collect::<Result<_>>()?;

    let mut out = Vec::with_capacity(grid.len());
    for y in grid {
        // column of each axis' value table for this point
        let cols: Vec<usize> = (0..d)
            .map(|j| {
                let idx = (y[j] * a_k).floor() as usize;
                axes[axis_of[j]].needed.binary_search(&idx).unwrap()
            })
            .collect();
        let mut t_sum = KahanSum::new();
        combine(
            &axes, &axis_of, &cols, 0, k, 0.0, 1.0, &lnfact, r00, &mut t_sum,
        );
        let mut psi = 1.0;
        for (j, dens) in densities.iter().enumerate() {
            psi *= dens.density(y[j])?;
        }
        out.push((a_k.powi(d as i32) * t_sum.value() - psi).abs());
    }
    Ok(out)
}

/// Max of [`llt_deviation_points`] over the grid.
pub fn llt_deviation(table: &RenewalTable, k: usize, grid: &[Vec<f64>]) -> Result<f64> {
    Ok(llt_deviation_points(table, k, grid)?
        .into_iter()
        .fold(0.0, f64::max))
}

/// Recursive multinomial sum over per-axis step counts; `rem` steps are still
/// unassigned, axis `j` is next.
#[allow(clippy::too_many_arguments)]
fn combine(
    axes: &[AxisPowers],
    axis_of: &[usize],
    cols: &[usize],
    j: usize,
    rem: usize,
    ln_acc: f64,
    prod: f64,
    lnfact: &[f64],
    r00: f64,
    out: &mut KahanSum,
) {
    if prod == 0.0 {
        return;
    }
    if j == axis_of.len() {
        let k0 = rem;
        if k0 > 0 && r00 == 0.0 {
            return;
        }
        let ln_w = lnfact[lnfact.len() - 1] + ln_acc - lnfact[k0]
            + if k0 > 0 { k0 as f64 * r00.ln() } else { 0.0 };
        out.add(ln_w.exp() * prod);
        return;
    }
    let vals = &axes[axis_of[j]].vals;
    let col = cols[j];
    for kj in 0..=rem {
        let v = vals[kj][col];
        if v == 0.0 {
            continue;
        }
        combine(
            axes,
            axis_of,
            cols,
            j + 1,
            rem - kj,
            ln_acc - lnfact[kj],
            prod * v,
            lnfact,
            r00,
            out,
        );
    }
}

/// Local large deviation ratio: the total bridge mass at exact time n with k
/// returns, divided by the bound shape k n^{-alpha-1} ell(n). Along
/// n_1+..+n_d = n-k the coefficients collapse to a 1-d convolution power of
/// the step-duration kernel.
pub fn lld_ratio(table: &RenewalTable, n: usize, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    let a_k = table.scaling_a(k)?;
    if n < a_k {
        return Err(Error::Precondition(format!(
            "local large deviation needs n >= a_k, got n = {n} < a_{k} = {a_k}"
        )));
    }
    let mut q = vec![0.0; n + 1];
    if n >= 1 {
        q[1] = table.r00();
    }
    for (m, slot) in q.iter_mut().enumerate().skip(2) {
        *slot = (0..table.dims()).map(|j| table.r_value(j, m - 1)).sum();
    }
    let p = convolution::pow_trunc(&q, k, n + 1)?;
    let nf = n as f64;
    let denom = k as f64 * nf.powf(-table.alpha() - 1.0) * table.ell().eval(nf);
    Ok(p[n] / denom)
}

/// w(n) * sum over k, n_1+n_2 = n-k of g(n_1/n, n_2/n, k/b_n) T_{n_1,n_2}(k),
/// evaluated for every g in one lattice pass. Exact path, d = 2 only.
pub fn tied_down_functional_many(
    table: &RenewalTable,
    n: usize,
    gs: &[&dyn Fn(&[f64], f64) -> f64],
) -> Result<Vec<f64>> {
    if table.dims() != 2 {
        return Err(Error::Dimension(table.dims()));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!("n = {n} too small")));
    }
    let b_n = table.scaling_b(n as f64)?;
    let w_n = table.normalizer_w(n)?;
    let r00 = table.r00();
    let nf = n as f64;

    let kern1 = table.kernel_row(0, n);
    let kern2 = table.kernel_row(1, n);
    let same_kernels = kern1 == kern2;
    let conv1 = KernelFft::new(&kern1, n + 1);
    let conv2 = if same_kernels {
        None
    } else {
        Some(KernelFft::new(&kern2, n + 1))
    };

    let mut delta = vec![0.0; n + 1];
    delta[0] = 1.0;
    let mut pow1: Vec<Vec<f64>> = vec![delta.clone()];
    let mut pow2: Vec<Vec<f64>> = vec![delta];
    let mut ln_mass1 = vec![0.0f64];
    let mut ln_mass2 = vec![0.0f64];

    let lnfact = ln_factorials(n);
    let ln_r00 = if r00 > 0.0 { r00.ln() } else { f64::NEG_INFINITY };

    let mut acc: Vec<KahanSum> = gs.iter().map(|_| KahanSum::new()).collect();
    let mut quiet_streak = 0usize;
    let min_k_before_stop = (2.0 * b_n).ceil() as usize + 8;

    for k in 1..=n {
        pow1.push(conv1.apply(&pow1[k - 1])?);
        ln_mass1.push(pow1[k].iter().copied().collect::<KahanSum>().value().ln());
        if let Some(c2) = &conv2 {
            pow2.push(c2.apply(&pow2[k - 1])?);
            ln_mass2.push(pow2[k].iter().copied().collect::<KahanSum>().value().ln());
        }
        let (p2, lm2): (&[Vec<f64>], &[f64]) = if same_kernels {
            (&pow1, &ln_mass1)
        } else {
            (&pow2, &ln_mass2)
        };

        let span = n - k; // n_1 + n_2 on the exact-hit slice
        let mut v = vec![0.0f64; span + 1];
        for k1 in 0..=k {
            if !ln_mass1[k1].is_finite() {
                continue;
            }
            for k2 in 0..=(k - k1) {
                let k0 = k - k1 - k2;
                if k0 > 0 && r00 == 0.0 {
                    continue;
                }
                let ln_w = lnfact[k] - lnfact[k0] - lnfact[k1] - lnfact[k2]
                    + if k0 > 0 { k0 as f64 * ln_r00 } else { 0.0 };
                if ln_w + ln_mass1[k1] + lm2[k2] < LN_PAIR_TOL {
                    continue;
                }
                let w = ln_w.exp();
                let a = &pow1[k1];
                let b = &p2[k2];
                for (n1, slot) in v.iter_mut().enumerate() {
                    *slot += w * a[n1] * b[span - n1];
                }
            }
        }

        let mass_k: f64 = v.iter().copied().collect::<KahanSum>().value();
        let w_frac = k as f64 / b_n;
        for (gi, g) in gs.iter().enumerate() {
            let mut s = KahanSum::new();
            for (n1, &val) in v.iter().enumerate() {
                if val != 0.0 {
                    s.add(val * g(&[n1 as f64 / nf, (span - n1) as f64 / nf], w_frac));
                }
            }
            acc[gi].add(s.value());
        }

        if w_n * mass_k < 1e-10 {
            quiet_streak += 1;
            if quiet_streak >= 3 && k >= min_k_before_stop {
                break;
            }
        } else {
            quiet_streak = 0;
        }
    }
    Ok(acc.into_iter().map(|s| w_n * s.value()).collect())
}

pub fn tied_down_functional<G: Fn(&[f64], f64) -> f64>(
    table: &RenewalTable,
    n: usize,
    g: G,
) -> Result<f64> {
    Ok(tied_down_functional_many(table, n, &[&g])?[0])
}

/// Below this acceptance rate the rejection sampler gives up.
pub const ACCEPTANCE_FLOOR: f64 = 1e-6;

pub struct BridgeSample {
    /// (k, occupation counts), satisfying n_1+..+n_d+k = n exactly.
    pub samples: Vec<(usize, Vec<usize>)>,
    /// Points ((n_j/n)_j, k/b_n), unit weights.
    pub dist: EmpiricalDistribution,
    pub acceptance_rate: f64,
    pub trials: u64,
}

/// Rejection sampler for the renewal bridge: run i.i.d. steps until the
/// elapsed time reaches n and keep the path on an exact hit. Deterministic
/// for a fixed seed regardless of worker count.
pub fn bridge_sample_mc(
    table: &RenewalTable,
    n: usize,
    accepted: usize,
    seed: u64,
) -> Result<BridgeSample> {
    if accepted == 0 {
        return Err(Error::InvalidParameter("need at least one accepted path".into()));
    }
    let d = table.dims();
    let b_n = table.scaling_b(n as f64)?;

    // cumulative step distribution; everything past the last cell is the
    // lumped certain-overshoot tail (duration > n)
    let top = n.saturating_sub(1).min(table.n_max());
    let mut cum: Vec<f64> = Vec::with_capacity(1 + d * top);
    let mut meta: Vec<(usize, usize)> = Vec::with_capacity(cum.capacity());
    let mut running = KahanSum::new();
    running.add(table.r00());
    cum.push(running.value());
    meta.push((usize::MAX, 0)); // the phi = 1 cell
    for j in 0..d {
        for m in 1..=top {
            let p = table.r_value(j, m);
            if p > 0.0 {
                running.add(p);
                cum.push(running.value());
                meta.push((j, m));
            }
        }
    }

    type StratumOut = std::result::Result<(Vec<(usize, Vec<usize>)>, u64), Error>;
    let per_stratum: Vec<StratumOut> = run_strata(seed, accepted as u64, |_, quota, rng| {
        use rand::Rng;
        let mut kept = Vec::with_capacity(quota as usize);
        let mut trials = 0u64;
        let trial_limit = 10_000u64.max((quota as f64 / ACCEPTANCE_FLOOR) as u64);
        while (kept.len() as u64) < quota {
            trials += 1;
            if trials > trial_limit {
                return Err(Error::Timeout {
                    floor: ACCEPTANCE_FLOOR,
                    accepted: kept.len() as u64,
                    trials,
                });
            }
            let mut elapsed = 0usize;
            let mut k = 0usize;
            let mut occ = vec![0usize; d];
            loop {
                let u: f64 = rng.random();
                let idx = cum.partition_point(|&c| c <= u);
                if idx >= meta.len() {
                    break; // lumped tail: certain overshoot
                }
                let (j, m) = meta[idx];
                elapsed += m + 1;
                if j != usize::MAX {
                    occ[j] += m;
                }
                k += 1;
                if elapsed >= n {
                    if elapsed == n {
                        kept.push((k, occ));
                    }
                    break;
                }
            }
        }
        Ok((kept, trials))
    });

    let mut samples = Vec::with_capacity(accepted);
    let mut trials = 0u64;
    for res in per_stratum {
        let (kept, t) = res?;
        samples.extend(kept);
        trials += t;
    }
    let nf = n as f64;
    let points: Vec<(Vec<f64>, f64)> = samples
        .iter()
        .map(|(k, occ)| {
            let mut coords: Vec<f64> = occ.iter().map(|&o| o as f64 / nf).collect();
            coords.push(*k as f64 / b_n);
            (coords, 1.0)
        })
        .collect();
    let dist = EmpiricalDistribution::new(points, d + 1)?;
    Ok(BridgeSample {
        samples,
        dist,
        acceptance_rate: accepted as f64 / trials as f64,
        trials,
    })
}
