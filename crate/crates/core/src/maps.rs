//! Intermittent interval maps: the Boole-conjugate map, its partition
//! (A_1, Y, A_2), invariant density, orbit occupation statistics, empirical
//! return tables, and the tied-down conditional experiment.
//!
//! Orbits are iterated in (distance-to-nearest-endpoint, side) coordinates.
//! The endpoints are the neutral fixed points, iterates cluster there, and
//! `1 - x` for x near 1 loses every digit that matters; the symmetric
//! coordinates keep full precision in the laminar phase.

use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::{run_strata, KahanSum};
use crate::special::gamma;
use crate::stats::EmpiricalDistribution;

/// f(x) = x(1-x)/(1-x-x^2) on [0,1/2], extended by f(x) = 1 - f(1-x). Two
/// full increasing branches with neutral fixed points at 0 and 1.
pub fn boole_map(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("map argument {x} outside [0,1]")));
    }
    if x <= 0.5 {
        Ok(x * (1.0 - x) / (1.0 - x - x * x))
    } else {
        let s = 1.0 - x;
        Ok(1.0 - s * (1.0 - s) / (1.0 - s - s * s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapModel {
    Boole,
}

impl MapModel {
    pub fn dims(&self) -> usize {
        2
    }

    pub fn alpha(&self) -> f64 {
        0.5
    }

    pub fn apply(&self, x: f64) -> Result<f64> {
        boole_map(x)
    }
}

/// One symmetric iteration step in (distance, flip) form: returns the new
/// distance to the nearest endpoint and whether the side changed. The far
/// composition 1 - f(s) = (1-2s)/(1-s-s^2) is evaluated directly, without
/// the cancelling subtraction.
#[inline]
fn boole_step(s: f64) -> (f64, bool) {
    let denom = 1.0 - s - s * s;
    let u = s * (1.0 - s) / denom;
    if u <= 0.5 {
        (u, false)
    } else {
        ((1.0 - 2.0 * s) / denom, true)
    }
}

/// Map spec text: either the single token `boole`, or
/// `custom <d> <alpha>` followed by d lines `<left> <right>` of branch
/// endpoints. Custom declarations parse but name no concrete branch maps, so
/// they are rejected as unsupported rather than half-simulated.
pub fn parse_map_spec(text: &str) -> Result<MapModel> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let head: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::InvalidParameter("empty map spec".into()))?
        .split_whitespace()
        .collect();
    match head.as_slice() {
        ["boole"] => Ok(MapModel::Boole),
        ["custom", d, alpha] => {
            let d: usize = d
                .parse()
                .map_err(|e| Error::InvalidParameter(format!("branch count: {e}")))?;
            let alpha: f64 = alpha
                .parse()
                .map_err(|e| Error::InvalidParameter(format!("alpha: {e}")))?;
            if d < 2 || !(alpha > 0.0 && alpha < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "custom map needs d >= 2 branches and alpha in (0,1), got d = {d}, alpha = {alpha}"
                )));
            }
            let mut prev_right = 0.0;
            for j in 0..d {
                let line = lines.next().ok_or_else(|| {
                    Error::InvalidParameter(format!("missing endpoints for branch {}", j + 1))
                })?;
                let ends: Vec<f64> = line
                    .split_whitespace()
                    .map(|t| t.parse().map_err(|e| Error::InvalidParameter(format!("endpoint: {e}"))))
                    .collect::<Result<_>>()?;
                if ends.len() != 2 || ends[0] != prev_right || ends[1] <= ends[0] {
                    return Err(Error::InvalidParameter(format!(
                        "branch {} endpoints must partition [0,1] in order",
                        j + 1
                    )));
                }
                prev_right = ends[1];
            }
            if prev_right != 1.0 {
                return Err(Error::InvalidParameter("branches must end at 1".into()));
            }
            Err(Error::UnsupportedMap(format!("custom({d} branches)")))
        }
        _ => Err(Error::InvalidParameter(format!(
            "unrecognized map spec head `{}`",
            head.join(" ")
        ))),
    }
}

/// Reference cell Y = [gamma, f(gamma)] between the 2-periodic points, with
/// A_1 = [0, gamma) and A_2 = (f(gamma), 1].
#[derive(Debug, Clone)]
pub struct Partition {
    pub gamma: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    /// Unnormalized mu-mass of Y; the invariant density is divided by this.
    pub mu_y: f64,
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if flo * fhi > 0.0 {
        return Err(Error::RootNotFound(format!(
            "no sign change on [{lo}, {hi}] (f: {flo} .. {fhi})"
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) * flo > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Finds the 2-periodic point by bisection and checks dynamical separation
/// on a 1e5-point grid. The search for f^2(x) = x is restricted to the part
/// of the first branch where f lands on the second branch; below that f^2
/// jumps (both branches are full), and the jump is not a root.
pub fn build_partition(m: &MapModel) -> Result<Partition> {
    let MapModel::Boole = m;
    let f = |x: f64| boole_map(x).unwrap();
    // crossing point f(x) = 1/2 on the first branch
    let xc = bisect(|x| f(x) - 0.5, 1e-9, 0.5, 1e-15)?;
    let gamma = bisect(|x| f(f(x)) - x, xc + 1e-9, 0.5 - 1e-9, 1e-14)?;
    let y_lo = gamma;
    let y_hi = f(gamma);
    let mu_y = mu_unnormalized(y_lo, y_hi);

    // separation: a point of A_i maps into A_i or Y, never across
    let grid = 100_000;
    for i in 0..=grid {
        let x = i as f64 / grid as f64;
        let fx = f(x);
        if x < gamma && fx > y_hi + 1e-12 {
            return Err(Error::Precondition(format!(
                "separation fails at x = {x}: f(x) = {fx} crosses into A_2"
            )));
        }
        if x > y_hi && fx < gamma - 1e-12 {
            return Err(Error::Precondition(format!(
                "separation fails at x = {x}: f(x) = {fx} crosses into A_1"
            )));
        }
    }
    Ok(Partition {
        gamma,
        y_lo,
        y_hi,
        mu_y,
    })
}

/// Integral of the unnormalized invariant density 1/x^2 + 1/(1-x)^2 over [a,b].
pub fn mu_unnormalized(a: f64, b: f64) -> f64 {
    debug_assert!(0.0 < a && a <= b && b < 1.0);
    (1.0 / a - 1.0 / b) + (1.0 / (1.0 - b) - 1.0 / (1.0 - a))
}

/// Invariant density normalized so that mu(Y) = 1.
pub fn invariant_density(m: &MapModel, part: &Partition, x: f64) -> Result<f64> {
    let MapModel::Boole = m;
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain(format!(
            "density has non-integrable singularities at the fixed points; got x = {x}"
        )));
    }
    Ok((1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x))) / part.mu_y)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitStats {
    /// Occupation counts of A_1..A_d over times 1..n.
    pub s_a: Vec<u64>,
    /// Occupation count of Y over times 1..n.
    pub s_y: u64,
    pub n: u64,
    pub final_x: f64,
    /// 0..d for A_{j+1}, d for Y.
    pub final_cell: usize,
}

#[inline]
fn classify(s: f64, left: bool, gamma: f64) -> usize {
    if s < gamma {
        usize::from(!left)
    } else {
        2
    }
}

/// Iterates n steps from x0, counting cell membership of f^k(x0), k = 1..n.
pub fn simulate_orbit(
    m: &MapModel,
    part: &Partition,
    x0: f64,
    n: u64,
) -> Result<OrbitStats> {
    let MapModel::Boole = m;
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(Error::Domain(format!("x0 = {x0} outside (0,1)")));
    }
    let mut s = x0.min(1.0 - x0);
    let mut left = x0 <= 0.5;
    let mut s_a = vec![0u64; 2];
    let mut s_y = 0u64;
    for step in 1..=n {
        let (mut ns, flip) = boole_step(s);
        if !(-1e-12..=0.5 + 1e-12).contains(&ns) {
            return Err(Error::NumericalEscape { step });
        }
        ns = ns.clamp(0.0, 0.5);
        s = ns;
        left ^= flip;
        match classify(s, left, part.gamma) {
            2 => s_y += 1,
            j => s_a[j] += 1,
        }
    }
    let final_x = if left { s } else { 1.0 - s };
    Ok(OrbitStats {
        final_cell: classify(s, left, part.gamma),
        s_a,
        s_y,
        n,
        final_x,
    })
}

/// Inverse of the normalized mu-CDF restricted to Y, in closed form: the
/// defining equation collapses to a quadratic in x.
pub fn sample_y(part: &Partition, u: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&u));
    let q0 = 1.0 / part.y_lo - 1.0 / (1.0 - part.y_lo);
    let q = q0 - part.mu_y * u;
    let x = 2.0 / ((q + 2.0) + (q * q + 4.0).sqrt());
    x.clamp(part.y_lo, part.y_hi)
}

/// Excursions longer than this are lumped into the table's top bucket; the
/// bucket index is known once the excursion exceeds the cap, so iteration
/// stops there and no orbit runs away.
pub const RETURN_LUMP_CAP: usize = 1 << 16;

pub struct ReturnTableEstimate {
    pub table: crate::renewal::RenewalTable,
    /// Excursions that exceeded [`RETURN_LUMP_CAP`] and were lumped.
    pub lumped: u64,
    pub samples: u64,
}

/// Draws starting points from the invariant measure on Y, runs each to its
/// first return, and bins (cell, occupation) into an empirical renewal table.
pub fn estimate_return_table(
    m: &MapModel,
    part: &Partition,
    samples: u64,
    seed: u64,
) -> Result<ReturnTableEstimate> {
    let MapModel::Boole = m;
    if samples < 100_000 {
        return Err(Error::Precondition(format!(
            "return-table estimation needs at least 1e5 samples, got {samples}"
        )));
    }
    struct Counts {
        r00: u64,
        rows: Vec<Vec<u64>>,
        lumped: u64,
    }
    let per: Vec<Counts> = run_strata(seed, samples, |_, quota, rng| {
        let mut c = Counts {
            r00: 0,
            rows: vec![vec![0u64; RETURN_LUMP_CAP + 1], vec![0u64; RETURN_LUMP_CAP + 1]],
            lumped: 0,
        };
        for _ in 0..quota {
            let x = sample_y(part, rng.random());
            let mut s = x.min(1.0 - x);
            let mut left = x <= 0.5;
            // first step decides between r00 and an excursion
            let (ns, flip) = boole_step(s);
            s = ns.clamp(0.0, 0.5);
            left ^= flip;
            let cell = classify(s, left, part.gamma);
            if cell == 2 {
                c.r00 += 1;
                continue;
            }
            let mut occupied = 1usize;
            loop {
                let (ns, flip) = boole_step(s);
                s = ns.clamp(0.0, 0.5);
                left ^= flip;
                if classify(s, left, part.gamma) == 2 {
                    break;
                }
                occupied += 1;
                if occupied >= RETURN_LUMP_CAP {
                    c.lumped += 1;
                    break;
                }
            }
            c.rows[cell][occupied.min(RETURN_LUMP_CAP)] += 1;
        }
        c
    });

    let mut r00_count = 0u64;
    let mut lumped = 0u64;
    let mut rows = vec![vec![0u64; RETURN_LUMP_CAP + 1], vec![0u64; RETURN_LUMP_CAP + 1]];
    for c in per {
        r00_count += c.r00;
        lumped += c.lumped;
        for (j, row) in c.rows.iter().enumerate() {
            for (n, &v) in row.iter().enumerate() {
                rows[j][n] += v;
            }
        }
    }
    let total = samples as f64;
    let row_mass: Vec<u64> = rows.iter().map(|r| r.iter().sum()).collect();
    let occupied_total = (row_mass[0] + row_mass[1]) as f64;
    if occupied_total == 0.0 {
        return Err(Error::EmptyDistribution("no excursions observed".into()));
    }
    let beta = vec![
        row_mass[0] as f64 / occupied_total,
        1.0 - row_mass[0] as f64 / occupied_total,
    ];
    let r: Vec<Vec<f64>> = rows
        .iter()
        .map(|row| row.iter().map(|&v| v as f64 / total).collect())
        .collect();
    let table = crate::renewal::RenewalTable::from_parts(
        m.alpha(),
        beta,
        r00_count as f64 / total,
        r,
        crate::renewal::EllDescriptor::Constant(1.0),
    )?;
    Ok(ReturnTableEstimate {
        table,
        lumped,
        samples,
    })
}

/// Slowly-varying constant of the return-time tail, fitted at the known
/// exponent: the average of mu[phi >= n] n^alpha over a geometric grid.
pub fn fit_tail_constant(table: &crate::renewal::RenewalTable, lo: usize, hi: usize) -> f64 {
    let mut acc = KahanSum::new();
    let mut count = 0usize;
    let mut n = lo;
    while n <= hi {
        acc.add(table.phi_tail(n) * (n as f64).powf(table.alpha()));
        count += 1;
        n *= 2;
    }
    acc.value() / count as f64
}

/// b_n for a pure tail mu[phi >= t] = c t^-alpha.
pub fn b_from_constant(alpha: f64, c: f64, n: usize) -> f64 {
    (n as f64).powf(alpha) / (gamma(1.0 - alpha) * c)
}

/// Inverse-CDF sampler for a Riemann-integrable density on [0,1]: cumulative
/// trapezoid sums on 2^16 panels, linear interpolation inside a panel.
pub struct NuSampler {
    cum: Vec<f64>,
}

const NU_PANELS: usize = 1 << 16;

impl NuSampler {
    pub fn new<F: Fn(f64) -> f64>(density: F) -> Result<Self> {
        let mut cum = Vec::with_capacity(NU_PANELS + 1);
        cum.push(0.0);
        let mut acc = KahanSum::new();
        let h = 1.0 / NU_PANELS as f64;
        let mut prev = density(0.0);
        if !(prev >= 0.0) {
            return Err(Error::InvalidParameter("density negative at 0".into()));
        }
        for i in 1..=NU_PANELS {
            let x = i as f64 * h;
            let cur = density(x);
            if !(cur >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "density negative at {x}"
                )));
            }
            acc.add(0.5 * (prev + cur) * h);
            cum.push(acc.value());
            prev = cur;
        }
        let total = acc.value();
        if (total - 1.0).abs() > 1e-3 {
            return Err(Error::InvalidParameter(format!(
                "density integrates to {total}, not 1"
            )));
        }
        for v in &mut cum {
            *v /= total;
        }
        Ok(Self { cum })
    }

    pub fn sample(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let i = self.cum.partition_point(|&c| c <= u).clamp(1, NU_PANELS);
        let (lo, hi) = (self.cum[i - 1], self.cum[i]);
        let frac = if hi > lo { (u - lo) / (hi - lo) } else { 0.5 };
        ((i - 1) as f64 + frac) / NU_PANELS as f64
    }
}

pub struct TiedDownRecord {
    pub x0: f64,
    pub s_a: Vec<u64>,
    pub s_y: u64,
}

pub struct TiedDownRun {
    pub records: Vec<TiedDownRecord>,
    /// Points ((S_{A_j}(n)/n)_j, S_Y(n)/b_n), unit weights.
    pub dist: EmpiricalDistribution,
    pub acceptance_rate: f64,
    pub trials: u64,
}

const MAP_ACCEPTANCE_FLOOR: f64 = 1e-6;

/// Conditional occupation experiment: draw x0 from nu, run n steps, accept
/// iff f^n(x0) lands in the subinterval `a` of Y.
#[allow(clippy::too_many_arguments)]
pub fn tied_down_experiment(
    m: &MapModel,
    part: &Partition,
    nu: &NuSampler,
    n: u64,
    a: (f64, f64),
    b_n: f64,
    accepted: usize,
    seed: u64,
) -> Result<TiedDownRun> {
    let MapModel::Boole = m;
    if !(part.y_lo <= a.0 && a.0 < a.1 && a.1 <= part.y_hi) {
        return Err(Error::InvalidParameter(format!(
            "target interval [{}, {}] must sit inside Y = [{}, {}]",
            a.0, a.1, part.y_lo, part.y_hi
        )));
    }
    if accepted == 0 {
        return Err(Error::InvalidParameter("need at least one accepted orbit".into()));
    }
    type StratumOut = std::result::Result<(Vec<TiedDownRecord>, u64), Error>;
    let per: Vec<StratumOut> = run_strata(seed, accepted as u64, |_, quota, rng| {
        let mut kept = Vec::with_capacity(quota as usize);
        let mut trials = 0u64;
        let limit = 10_000u64.max((quota as f64 / MAP_ACCEPTANCE_FLOOR) as u64);
        while (kept.len() as u64) < quota {
            trials += 1;
            if trials > limit {
                return Err(Error::Timeout {
                    floor: MAP_ACCEPTANCE_FLOOR,
                    accepted: kept.len() as u64,
                    trials,
                });
            }
            let x0 = nu.sample(rng.random());
            if !(x0 > 0.0 && x0 < 1.0) {
                continue;
            }
            let stats = simulate_orbit(m, part, x0, n)?;
            if stats.final_cell == 2 && stats.final_x >= a.0 && stats.final_x <= a.1 {
                kept.push(TiedDownRecord {
                    x0,
                    s_a: stats.s_a,
                    s_y: stats.s_y,
                });
            }
        }
        Ok((kept, trials))
    });

    let mut records = Vec::with_capacity(accepted);
    let mut trials = 0u64;
    for res in per {
        let (kept, t) = res?;
        records.extend(kept);
        trials += t;
    }
    let nf = n as f64;
    let points: Vec<(Vec<f64>, f64)> = records
        .iter()
        .map(|r| {
            let mut coords: Vec<f64> = r.s_a.iter().map(|&c| c as f64 / nf).collect();
            coords.push(r.s_y as f64 / b_n);
            (coords, 1.0)
        })
        .collect();
    let dist = EmpiricalDistribution::new(points, m.dims() + 1)?;
    Ok(TiedDownRun {
        records,
        dist,
        acceptance_rate: accepted as f64 / trials as f64,
        trials,
    })
}

/// Unconditioned control: occupation fractions (S_{A_j}(n)/n)_j over `orbits`
/// independent starts drawn from nu.
pub fn arcsine_experiment(
    m: &MapModel,
    part: &Partition,
    nu: &NuSampler,
    n: u64,
    orbits: u64,
    seed: u64,
) -> Result<EmpiricalDistribution> {
    let MapModel::Boole = m;
    type StratumOut = std::result::Result<Vec<(Vec<f64>, f64)>, Error>;
    let per: Vec<StratumOut> = run_strata(seed, orbits, |_, quota, rng| {
        let mut pts = Vec::with_capacity(quota as usize);
        for _ in 0..quota {
            let mut x0 = nu.sample(rng.random());
            if x0 <= 0.0 || x0 >= 1.0 {
                x0 = 0.5;
            }
            let stats = simulate_orbit(m, part, x0, n)?;
            let nf = n as f64;
            pts.push((
                stats.s_a.iter().map(|&c| c as f64 / nf).collect(),
                1.0,
            ));
        }
        Ok(pts)
    });
    let mut points = Vec::with_capacity(orbits as usize);
    for res in per {
        points.extend(res?);
    }
    EmpiricalDistribution::new(points, m.dims())
}

/// CDF of the arcsine law on [0,1].
pub fn arcsine_cdf(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        2.0 / std::f64::consts::PI * t.sqrt().asin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn boole() -> (MapModel, Partition) {
        let m = MapModel::Boole;
        let p = build_partition(&m).unwrap();
        (m, p)
    }

    #[test]
    fn boole_point_values() {
        assert_eq!(boole_map(0.0).unwrap(), 0.0);
        assert_eq!(boole_map(1.0).unwrap(), 1.0);
        let g = 2f64.sqrt() - 1.0;
        assert!((boole_map(g).unwrap() - (2.0 - 2f64.sqrt())).abs() < 1e-15);
        assert!((boole_map(0.25).unwrap() - 3.0 / 11.0).abs() < 1e-15);
        assert!(boole_map(-0.1).is_err());
        assert!(boole_map(1.1).is_err());
    }

    #[test]
    fn boole_symmetry_grid() {
        for i in 0..=100_000u32 {
            // the two full branches meet at 1/2 with a jump, so the symmetry
            // identity holds everywhere except exactly at the midpoint
            if i == 50_000 {
                continue;
            }
            let x = i as f64 / 100_000.0;
            let lhs = boole_map(1.0 - x).unwrap();
            let rhs = 1.0 - boole_map(x).unwrap();
            assert!((lhs - rhs).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn boole_tangency_at_zero() {
        // f(x) - x ~ x^3, i.e. c_j = 1 with 1 + 1/alpha = 3; the next series
        // term gives ratio = 1 + x + O(x^2)
        for k in 7..16 {
            let x = 2f64.powi(-k);
            let ratio = (boole_map(x).unwrap() - x) / (x * x * x);
            assert!((ratio - 1.0).abs() < 0.02, "x = {x}: {ratio}");
        }
    }

    #[test]
    fn partition_matches_analytic() {
        let (m, p) = boole();
        let g = 2f64.sqrt() - 1.0;
        assert!((p.gamma - g).abs() < 1e-12, "gamma = {}", p.gamma);
        assert!((p.y_hi - (1.0 - g)).abs() < 1e-12);
        let f2g = m.apply(m.apply(p.gamma).unwrap()).unwrap();
        assert!((f2g - p.gamma).abs() < 1e-11);
        assert!((p.mu_y - 2f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn invariant_density_values() {
        let (m, p) = boole();
        let at_half = invariant_density(&m, &p, 0.5).unwrap();
        assert!((at_half - 8.0 / 2f64.sqrt()).abs() < 1e-10);
        assert!(invariant_density(&m, &p, 0.0).is_err());
        assert!(invariant_density(&m, &p, 1.0).is_err());
        // integrates to 1 over Y
        let integral = crate::quad::integrate(
            &|x| invariant_density(&m, &p, x).unwrap(),
            p.y_lo,
            p.y_hi,
            1e-12,
        )
        .unwrap();
        assert!((integral - 1.0).abs() < 1e-10, "{integral}");
        // h(x) ~ x^(-1/alpha) near 0: log-log slope -> -2
        let density = |x: f64| invariant_density(&m, &p, x).unwrap();
        let slope = (density(1e-6).ln() - density(1e-4).ln()) / (1e-6f64.ln() - 1e-4f64.ln());
        assert!((slope + 2.0).abs() < 0.05, "slope = {slope}");
    }

    #[test]
    fn measure_preservation_via_branch_inverses() {
        let (m, p) = boole();
        let _ = p;
        // branch inverses by bisection on each full branch
        let inv1 = |y: f64| bisect(|x| m.apply(x).unwrap() - y, 0.0, 0.5, 1e-14).unwrap();
        let inv2 = |y: f64| 1.0 - inv1(1.0 - y);
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let a = 0.05 + 0.85 * rng.random::<f64>();
            let b = (a + 0.02 + 0.05 * rng.random::<f64>()).min(0.95);
            let direct = mu_unnormalized(a, b);
            let pre = mu_unnormalized(inv1(a), inv1(b)) + mu_unnormalized(inv2(a), inv2(b));
            assert!((direct - pre).abs() < 1e-8, "[{a},{b}]: {direct} vs {pre}");
        }
    }

    fn boole_exact(x: &BigRational) -> BigRational {
        let one = BigRational::from(BigInt::from(1));
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        if *x <= half {
            x * (&one - x) / (&one - x - x * x)
        } else {
            let s = &one - x;
            &one - &s * (&one - &s) / (&one - &s - &s * &s)
        }
    }

    /// x < sqrt(2) - 1 decided exactly: (x+1)^2 < 2 over the rationals.
    fn in_a1_exact(x: &BigRational) -> bool {
        let one = BigRational::from(BigInt::from(1));
        let two = BigRational::from(BigInt::from(2));
        let y = x + &one;
        &y * &y < two
    }

    #[test]
    fn orbit_matches_rational_reference() {
        let (m, p) = boole();
        let mut x = BigRational::new(BigInt::from(3), BigInt::from(10));
        let mut expect_a = [0u64; 2];
        let mut expect_y = 0u64;
        let mut float_iterates = Vec::new();
        for _ in 0..10 {
            x = boole_exact(&x);
            float_iterates.push(num_traits::ToPrimitive::to_f64(&x).unwrap());
            let one = BigRational::from(BigInt::from(1));
            let mirrored = &one - &x;
            if in_a1_exact(&x) {
                expect_a[0] += 1;
            } else if in_a1_exact(&mirrored) {
                expect_a[1] += 1;
            } else {
                expect_y += 1;
            }
        }
        let stats = simulate_orbit(&m, &p, 0.3, 10).unwrap();
        assert_eq!(stats.s_a, expect_a.to_vec());
        assert_eq!(stats.s_y, expect_y);
        assert_eq!(stats.s_a[0] + stats.s_a[1] + stats.s_y, 10);
        assert!((stats.final_x - float_iterates[9]).abs() < 1e-9);
    }

    #[test]
    fn occupation_of_y_is_sublinear() {
        let (m, p) = boole();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let x0 = 0.01 + 0.98 * rng.random::<f64>();
            let stats = simulate_orbit(&m, &p, x0, 100_000).unwrap();
            let frac = stats.s_y as f64 / 100_000.0;
            assert!(frac < 0.05, "x0 = {x0}: S_Y/n = {frac}");
        }
    }

    #[test]
    fn y_sampler_matches_density() {
        let (m, p) = boole();
        // G(sample(u)) = u for the analytic Y-restricted CDF
        let cdf = |x: f64| mu_unnormalized(p.y_lo, x) / p.mu_y;
        for i in 1..100 {
            let u = i as f64 / 100.0;
            let x = sample_y(&p, u);
            assert!((cdf(x) - u).abs() < 1e-12, "u = {u}");
        }
        let _ = m;
    }

    #[test]
    fn return_table_recovers_alpha_and_beta() {
        let (m, p) = boole();
        let est = estimate_return_table(&m, &p, 200_000, 5).unwrap();
        let t = &est.table;
        // mass 1 by construction (validated in from_parts); tail exponent
        let tail: Vec<f64> = (0..=2048usize).map(|n| if n == 0 { 1.0 } else { t.tail(0, n) }).collect();
        let a = crate::stats::fit_tail_exponent(&tail, 16..1024).unwrap();
        assert!((0.45..=0.55).contains(&a), "fitted exponent {a}");
        // symmetric cells agree within 3 binomial standard errors
        for n in [1usize, 4, 16, 64] {
            let t1 = t.tail(0, n);
            let t2 = t.tail(1, n);
            let se = (t1.max(t2) / est.samples as f64).sqrt();
            assert!((t1 - t2).abs() < 3.0 * se + 1e-12, "n = {n}: {t1} vs {t2}");
        }
        assert!(estimate_return_table(&m, &p, 1000, 5).is_err());
    }

    #[test]
    fn nu_sampler_uniform_round_trip() {
        let nu = NuSampler::new(|_| 1.0).unwrap();
        for i in 0..=20 {
            let u = i as f64 / 20.0;
            assert!((nu.sample(u) - u).abs() < 1e-4, "u = {u}");
        }
        assert!(NuSampler::new(|x| x - 0.5).is_err()); // negative on [0, 1/2)
        assert!(NuSampler::new(|_| 3.0).is_err()); // integrates to 3
    }

    #[test]
    fn tied_down_experiment_smoke() {
        let (m, p) = boole();
        let nu = NuSampler::new(|_| 1.0).unwrap();
        let n = 256u64;
        let est = estimate_return_table(&m, &p, 100_000, 2).unwrap();
        let c = fit_tail_constant(&est.table, 16, 1024);
        let b_n = b_from_constant(m.alpha(), c, n as usize);
        let run =
            tied_down_experiment(&m, &p, &nu, n, (p.y_lo, p.y_hi), b_n, 400, 9).unwrap();
        assert_eq!(run.records.len(), 400);
        assert_eq!(run.dist.dims(), 3);
        for r in &run.records {
            assert!(r.s_a[0] + r.s_a[1] + r.s_y == n);
        }
        assert!(run.acceptance_rate > 0.0 && run.acceptance_rate < 1.0);
        // deterministic under re-run
        let again =
            tied_down_experiment(&m, &p, &nu, n, (p.y_lo, p.y_hi), b_n, 400, 9).unwrap();
        assert_eq!(run.trials, again.trials);
    }

    #[test]
    fn map_spec_parsing() {
        assert_eq!(parse_map_spec("boole\n").unwrap(), MapModel::Boole);
        assert!(matches!(
            parse_map_spec("custom 3 0.5\n0 0.3\n0.3 0.7\n0.7 1\n"),
            Err(Error::UnsupportedMap(_))
        ));
        assert!(parse_map_spec("custom 3 0.5\n0 0.3\n0.4 0.7\n0.7 1\n").is_err());
        assert!(parse_map_spec("frobnicate").is_err());
        assert!(parse_map_spec("").is_err());
    }
}
