//! Scalar renewal engine: return-distribution tables, the scaling sequences
//! b_t and a_k, and exact tied-down coefficients via convolution powers.
//!
//! A table describes one renewal step: with probability `r00` the step takes
//! one time unit and touches no cell; with probability `r[j][n]` it spends n
//! units in cell j and n+1 units of time in total. Tables built by
//! [`make_stable_table`] have regularly varying tails by construction, which
//! is exactly the regime where the local limit theorem and the tied-down
//! uniform laws apply.

pub(crate) mod convolution;
mod limits;

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::exec::KahanSum;
use crate::special::gamma;
use crate::stats::fmt_f64;

pub use limits::{
    bridge_sample_mc, lld_ratio, llt_deviation, llt_deviation_points, tied_down_functional,
    tied_down_functional_many, BridgeSample, ACCEPTANCE_FLOOR,
};

/// Slowly varying factor of the return-tail asymptotics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EllDescriptor {
    Constant(f64),
    /// c * (log(e + t))^p
    LogPower { c: f64, p: f64 },
}

impl EllDescriptor {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            EllDescriptor::Constant(c) => c,
            EllDescriptor::LogPower { c, p } => c * (std::f64::consts::E + t).ln().powf(p),
        }
    }

    fn validate(&self) -> Result<()> {
        let c = match *self {
            EllDescriptor::Constant(c) => c,
            EllDescriptor::LogPower { c, .. } => c,
        };
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "slowly varying constant must be positive, got {c}"
            )));
        }
        Ok(())
    }
}

/// Largest horizon for which rows are materialized densely.
pub const DENSE_HORIZON_BOUND: usize = 1 << 26;

enum Rows {
    /// Explicit rows plus per-row suffix sums (file tables, log-power tables).
    Dense {
        r: Vec<Vec<f64>>,
        suffix: Vec<Vec<f64>>,
    },
    /// Closed-form telescoping rows r[j][n] = beta_j (n^-a - (n+1)^-a); the
    /// tails need no storage, so the horizon can be astronomically large.
    Telescoped,
}

pub struct RenewalTable {
    alpha: f64,
    beta: Vec<f64>,
    r00: f64,
    ell: EllDescriptor,
    n_max: usize,
    rows: Rows,
}

fn validate_alpha_beta(alpha: f64, beta: &[f64]) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0,1), got {alpha}"
        )));
    }
    if beta.is_empty() {
        return Err(Error::InvalidParameter("beta is empty".into()));
    }
    for &b in beta {
        if !(b > 0.0 && b <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "every beta_j must lie in (0,1], got {b}"
            )));
        }
    }
    let sum: f64 = beta.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "beta must sum to 1, got {sum}"
        )));
    }
    Ok(())
}

/// Telescoping table with exact power-law tails: r[j][n] proportional to
/// beta_j ell(n) (n^-a - (n+1)^-a), rescaled so total mass is exactly 1 with
/// the leftover on r00. For a constant ell the rescale makes the constant 1
/// and every tail is closed-form, so no rows are stored and `n_max` may be
/// huge; log-power tables are materialized and bounded by
/// [`DENSE_HORIZON_BOUND`].
pub fn make_stable_table(
    alpha: f64,
    beta: &[f64],
    ell: EllDescriptor,
    n_max: usize,
) -> Result<RenewalTable> {
    validate_alpha_beta(alpha, beta)?;
    ell.validate()?;
    if n_max < 64 {
        return Err(Error::InvalidParameter(format!(
            "n_max must be at least 64, got {n_max}"
        )));
    }
    match ell {
        EllDescriptor::Constant(_) => Ok(RenewalTable {
            alpha,
            beta: beta.to_vec(),
            r00: ((n_max + 1) as f64).powf(-alpha),
            ell: EllDescriptor::Constant(1.0),
            n_max,
            rows: Rows::Telescoped,
        }),
        EllDescriptor::LogPower { c, p } => {
            if n_max > DENSE_HORIZON_BOUND {
                return Err(Error::MemoryBound {
                    cells: n_max,
                    bound: DENSE_HORIZON_BOUND,
                });
            }
            let mut r: Vec<Vec<f64>> = beta.iter().map(|_| vec![0.0; n_max + 1]).collect();
            let mut total = KahanSum::new();
            let mut pow_n = 1.0f64; // 1^-a
            for n in 1..=n_max {
                let pow_n1 = ((n + 1) as f64).powf(-alpha);
                let step = ell.eval(n as f64) * (pow_n - pow_n1);
                for (j, bj) in beta.iter().enumerate() {
                    r[j][n] = bj * step;
                    total.add(bj * step);
                }
                pow_n = pow_n1;
            }
            let leftover = ell.eval(n_max as f64) * pow_n;
            let sigma = 1.0 / (total.value() + leftover);
            for row in &mut r {
                for v in row.iter_mut() {
                    *v *= sigma;
                }
            }
            let r00 = 1.0 - sigma * total.value();
            RenewalTable::from_parts(
                alpha,
                beta.to_vec(),
                r00,
                r,
                EllDescriptor::LogPower { c: c * sigma, p },
            )
        }
    }
}

impl RenewalTable {
    /// Dense table from explicit rows; `r[j]` is indexed by n with entry 0
    /// unused. Total mass must already be 1 within 1e-12.
    pub fn from_parts(
        alpha: f64,
        beta: Vec<f64>,
        r00: f64,
        r: Vec<Vec<f64>>,
        ell: EllDescriptor,
    ) -> Result<Self> {
        validate_alpha_beta(alpha, &beta)?;
        ell.validate()?;
        if r.len() != beta.len() {
            return Err(Error::InvalidParameter(format!(
                "{} rows for {} cells",
                r.len(),
                beta.len()
            )));
        }
        if !(r00 >= 0.0) {
            return Err(Error::InvalidParameter(format!("r00 = {r00} < 0")));
        }
        let n_max = r.iter().map(|row| row.len().saturating_sub(1)).max().unwrap_or(0);
        if n_max == 0 {
            return Err(Error::InvalidParameter("rows are empty".into()));
        }
        let mut r: Vec<Vec<f64>> = r;
        let mut total = KahanSum::new();
        total.add(r00);
        for row in &mut r {
            row.resize(n_max + 1, 0.0);
            row[0] = 0.0;
            for &v in row.iter() {
                if !(v >= 0.0) {
                    return Err(Error::InvalidParameter(format!("negative row entry {v}")));
                }
                total.add(v);
            }
        }
        if (total.value() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "table mass is {}, must be 1 within 1e-12",
                total.value()
            )));
        }
        let suffix = r
            .iter()
            .map(|row| {
                let mut s = vec![0.0; n_max + 2];
                let mut acc = KahanSum::new();
                for n in (1..=n_max).rev() {
                    acc.add(row[n]);
                    s[n] = acc.value();
                }
                s
            })
            .collect();
        Ok(Self {
            alpha,
            beta,
            r00,
            ell,
            n_max,
            rows: Rows::Dense { r, suffix },
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn dims(&self) -> usize {
        self.beta.len()
    }

    pub fn r00(&self) -> f64 {
        self.r00
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn ell(&self) -> EllDescriptor {
        self.ell
    }

    /// Single-row entry r[j][n] (0-based j).
    pub fn r_value(&self, j: usize, n: usize) -> f64 {
        debug_assert!(j < self.beta.len());
        if n == 0 || n > self.n_max {
            return 0.0;
        }
        match &self.rows {
            Rows::Dense { r, .. } => r[j][n],
            Rows::Telescoped => {
                self.beta[j] * ((n as f64).powf(-self.alpha) - ((n + 1) as f64).powf(-self.alpha))
            }
        }
    }

    /// Row tail sum over m >= n (n >= 1).
    pub fn tail(&self, j: usize, n: usize) -> f64 {
        debug_assert!(j < self.beta.len() && n >= 1);
        if n > self.n_max {
            return 0.0;
        }
        match &self.rows {
            Rows::Dense { suffix, .. } => suffix[j][n],
            Rows::Telescoped => {
                self.beta[j]
                    * ((n as f64).powf(-self.alpha) - ((self.n_max + 1) as f64).powf(-self.alpha))
            }
        }
    }

    /// Tail mass of the return time: phi = 1 on the r00 cell, n+1 on (j,n).
    pub fn phi_tail(&self, m: usize) -> f64 {
        if m <= 1 {
            return 1.0;
        }
        (0..self.beta.len()).map(|j| self.tail(j, m - 1)).sum()
    }

    /// Row j as a dense convolution kernel up to index `h` (entry 0 is 0).
    pub(crate) fn kernel_row(&self, j: usize, h: usize) -> Vec<f64> {
        let top = h.min(self.n_max);
        (0..=top).map(|n| self.r_value(j, n)).collect()
    }

    /// b_t = 1 / (Gamma(1-alpha) mu[phi >= floor(t)]).
    pub fn scaling_b(&self, t: f64) -> Result<f64> {
        if !(t >= 1.0) {
            return Err(Error::Domain(format!("b_t needs t >= 1, got {t}")));
        }
        let m = t.floor() as usize;
        if m > self.n_max {
            return Err(Error::Horizon {
                requested: m,
                horizon: self.n_max,
            });
        }
        Ok(1.0 / (gamma(1.0 - self.alpha) * self.phi_tail(m)))
    }

    /// a_k = min{ n : b_n > k }.
    pub fn scaling_a(&self, k: usize) -> Result<usize> {
        if k == 0 {
            return Err(Error::InvalidParameter("a_k needs k >= 1".into()));
        }
        // b_n > k  <=>  phi_tail(n) < 1/(Gamma(1-alpha) k); the tail is
        // nonincreasing in n, so binary search applies.
        let cut = 1.0 / (gamma(1.0 - self.alpha) * k as f64);
        if self.phi_tail(self.n_max) >= cut {
            return Err(Error::Horizon {
                requested: k,
                horizon: self.n_max,
            });
        }
        let (mut lo, mut hi) = (1usize, self.n_max); // phi_tail(hi) < cut
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.phi_tail(mid) < cut {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(lo)
    }

    /// w(n) = Gamma(alpha) n / b_n, asymptotically pi/sin(pi alpha) n^(1-a) ell(n).
    pub fn normalizer_w(&self, n: usize) -> Result<f64> {
        Ok(gamma(self.alpha) * n as f64 / self.scaling_b(n as f64)?)
    }

    /// Writes `alpha beta_1 .. beta_d r00 N_max` then `j n r` lines (1-based j,
    /// zero entries skipped). Formatting is shortest-round-trip, so a
    /// save/load cycle is lossless.
    pub fn save(&self, path: &Path) -> Result<()> {
        if self.n_max > DENSE_HORIZON_BOUND {
            return Err(Error::MemoryBound {
                cells: self.n_max,
                bound: DENSE_HORIZON_BOUND,
            });
        }
        let mut out = String::new();
        out.push_str(&fmt_f64(self.alpha));
        for b in &self.beta {
            let _ = write!(out, " {}", fmt_f64(*b));
        }
        let _ = writeln!(out, " {} {}", fmt_f64(self.r00), self.n_max);
        for j in 0..self.beta.len() {
            for n in 1..=self.n_max {
                let v = self.r_value(j, n);
                if v > 0.0 {
                    let _ = writeln!(out, "{} {n} {}", j + 1, fmt_f64(v));
                }
            }
        }
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        std::fs::write(path, out).map_err(|e| Error::io(path, e))
    }

    /// Parses the plain-text table format. The total mass is renormalized if
    /// it deviates from 1 by less than 1e-9 and rejected otherwise.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|m| Error::parse(path, m))
    }

    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or("empty table file")?;
        let tok: Vec<&str> = header.split_whitespace().collect();
        if tok.len() < 4 {
            return Err(format!("header has {} fields, need at least 4", tok.len()));
        }
        let d = tok.len() - 3;
        let alpha: f64 = tok[0].parse().map_err(|e| format!("alpha: {e}"))?;
        let beta: Vec<f64> = tok[1..=d]
            .iter()
            .map(|s| s.parse().map_err(|e| format!("beta: {e}")))
            .collect::<std::result::Result<_, _>>()?;
        let r00: f64 = tok[d + 1].parse().map_err(|e| format!("r00: {e}"))?;
        let n_max: usize = tok[d + 2].parse().map_err(|e| format!("N_max: {e}"))?;
        if n_max == 0 || n_max > DENSE_HORIZON_BOUND {
            return Err(format!("N_max {n_max} out of range"));
        }
        let mut r: Vec<Vec<f64>> = (0..d).map(|_| vec![0.0; n_max + 1]).collect();
        for (lineno, line) in lines.enumerate() {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(format!("row {}: expected `j n r`", lineno + 2));
            }
            let j: usize = f[0].parse().map_err(|e| format!("j: {e}"))?;
            let n: usize = f[1].parse().map_err(|e| format!("n: {e}"))?;
            let v: f64 = f[2].parse().map_err(|e| format!("r: {e}"))?;
            if j == 0 || j > d || n == 0 || n > n_max {
                return Err(format!("row {}: index ({j},{n}) out of range", lineno + 2));
            }
            if r[j - 1][n] != 0.0 {
                return Err(format!("row {}: duplicate entry ({j},{n})", lineno + 2));
            }
            r[j - 1][n] = v;
        }
        let mut total = KahanSum::new();
        total.add(r00);
        for row in &r {
            for &v in row {
                total.add(v);
            }
        }
        let dev = (total.value() - 1.0).abs();
        if dev >= 1e-9 {
            return Err(format!(
                "total mass {} deviates from 1 by {dev:e} (>= 1e-9), rejected",
                total.value()
            ));
        }
        let scale = 1.0 / total.value();
        for row in &mut r {
            for v in row.iter_mut() {
                *v *= scale;
            }
        }
        Self::from_parts(alpha, beta, r00 * scale, r, EllDescriptor::Constant(1.0))
            .map_err(|e| e.to_string())
    }
}

/// Dense multi-index array of tied-down coefficients T_{n_1..n_d}(k).
pub struct TnArray {
    pub k: usize,
    pub d: usize,
    pub horizon: usize,
    values: Vec<f64>,
}

impl TnArray {
    pub fn get(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.d);
        let mut flat = 0usize;
        for &i in idx {
            debug_assert!(i <= self.horizon);
            flat = flat * (self.horizon + 1) + i;
        }
        self.values[flat]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total_mass(&self) -> f64 {
        self.values.iter().copied().collect::<KahanSum>().value()
    }
}

/// Memory bound for the dense lattice, in cells.
pub const TN_CELL_BOUND: usize = 1 << 26;
const TN_FFT_THRESHOLD: usize = 1 << 12;

/// k-fold convolution power of the single-step kernel on the lattice
/// [0,horizon]^d. Truncation is exact: the kernel has no negative indices, so
/// retained entries never depend on discarded ones.
pub fn tn_coefficients(table: &RenewalTable, k: usize, horizon: usize) -> Result<TnArray> {
    tn_coefficients_impl(table, k, horizon, None)
}

pub(crate) fn tn_coefficients_impl(
    table: &RenewalTable,
    k: usize,
    horizon: usize,
    force_fft: Option<bool>,
) -> Result<TnArray> {
    let d = table.dims();
    let mut cells: usize = 1;
    for _ in 0..d {
        cells = cells
            .checked_mul(horizon + 1)
            .ok_or(Error::MemoryBound {
                cells: usize::MAX,
                bound: TN_CELL_BOUND,
            })?;
    }
    if cells > TN_CELL_BOUND {
        return Err(Error::MemoryBound {
            cells,
            bound: TN_CELL_BOUND,
        });
    }
    let use_fft = force_fft.unwrap_or(cells > TN_FFT_THRESHOLD);

    let mut cur = vec![0.0; cells];
    cur[0] = 1.0;
    if k == 0 {
        return Ok(TnArray {
            k,
            d,
            horizon,
            values: cur,
        });
    }

    // strides for row-major [0..=horizon]^d
    let mut stride = vec![1usize; d];
    for a in (0..d.saturating_sub(1)).rev() {
        stride[a] = stride[a + 1] * (horizon + 1);
    }

    if use_fft {
        let mut kernel = vec![0.0; cells];
        kernel[0] = table.r00();
        for j in 0..d {
            for m in 1..=horizon.min(table.n_max()) {
                kernel[m * stride[j]] = table.r_value(j, m);
            }
        }
        let dims = vec![horizon + 1; d];
        let mut mul = convolution::NdKernelConvolver::new(&kernel, &dims);
        for _ in 0..k {
            cur = mul.apply(&cur)?;
        }
    } else {
        let top = horizon.min(table.n_max());
        for _ in 0..k {
            let mut next = vec![0.0; cells];
            for (flat, &v) in cur.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                next[flat] += table.r00() * v;
                let mut rem = flat;
                for j in 0..d {
                    let idx_j = rem / stride[j];
                    rem %= stride[j];
                    for m in 1..=(horizon - idx_j).min(top) {
                        next[flat + m * stride[j]] += table.r_value(j, m) * v;
                    }
                }
            }
            cur = next;
        }
    }
    Ok(TnArray {
        k,
        d,
        horizon,
        values: cur,
    })
}

#[cfg(test)]
mod tests;
