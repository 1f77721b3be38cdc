//! The Barlow-Pitman-Yor generalized uniform distribution.
//!
//! For `alpha` in (0,1) and weights `beta_1..beta_d` summing to 1, draw
//! independent one-sided stable variables `xi_j` with scales `beta_j`, set
//! `eta = sum xi_j`, and represent the law of `(U_1..U_d, W)` by the
//! importance-weighted samples
//! `((xi_j/eta)_j, eta^{-alpha})` with weight `Gamma(1+alpha) eta^{-alpha}`.
//! The weights have mean 1, so every bounded expectation is estimated
//! unbiasedly by a plain weighted average.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::{self, KahanSum};
use crate::special::gamma;
use crate::stable::StableParams;
use crate::stats::EmpiricalDistribution;

const BETA_SUM_TOL: f64 = 1e-12;

/// Parameters `(alpha, beta_1..beta_d)` of the BPY law.
#[derive(Debug, Clone, PartialEq)]
pub struct BpyParams {
    alpha: f64,
    beta: Vec<f64>,
}

impl BpyParams {
    pub fn new(alpha: f64, beta: Vec<f64>) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0,1), got {alpha}"
            )));
        }
        if beta.len() < 2 {
            return Err(Error::InvalidParameter(
                "need at least two occupation weights".into(),
            ));
        }
        if beta.iter().any(|&b| !(b > 0.0 && b < 1.0)) {
            return Err(Error::InvalidParameter(
                "each beta_j must lie in (0,1)".into(),
            ));
        }
        let total: f64 = beta.iter().sum();
        if (total - 1.0).abs() > BETA_SUM_TOL {
            return Err(Error::InvalidParameter(format!(
                "beta must sum to 1, got {total}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn dim(&self) -> usize {
        self.beta.len()
    }

    fn stables(&self) -> Result<Vec<StableParams>> {
        self.beta
            .iter()
            .map(|&b| StableParams::new(self.alpha, b))
            .collect()
    }
}

/// One importance-weighted draw: occupation fractions `u`, normalized local
/// time `w = eta^{-alpha}`, and weight `Gamma(1+alpha) w`.
#[derive(Debug, Clone, PartialEq)]
pub struct BpyDraw {
    pub u: Vec<f64>,
    pub w: f64,
    pub weight: f64,
}

fn draw_one<R: Rng + ?Sized>(stables: &[StableParams], g1a: f64, rng: &mut R) -> BpyDraw {
    let xi: Vec<f64> = stables.iter().map(|s| s.sample(rng)).collect();
    let eta: f64 = xi.iter().sum();
    let alpha = stables[0].alpha();
    let w = eta.powf(-alpha);
    BpyDraw {
        u: xi.iter().map(|&x| x / eta).collect(),
        w,
        weight: g1a * w,
    }
}

/// `m` weighted draws, reproducible for a given seed and independent of the
/// worker count.
pub fn sample_weighted(p: &BpyParams, m: u64, seed: u64) -> Result<Vec<BpyDraw>> {
    let stables = p.stables()?;
    let g1a = gamma(1.0 + p.alpha);
    let chunks = exec::run_strata(seed, m, |_, count, rng| {
        (0..count).map(|_| draw_one(&stables, g1a, rng)).collect::<Vec<_>>()
    });
    Ok(chunks.into_iter().flatten().collect())
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl McEstimate {
    /// |value - target| measured in standard errors.
    pub fn sigmas_from(&self, target: f64) -> f64 {
        (self.value - target).abs() / self.std_error
    }
}

/// Importance estimate of `E[g(U_1..U_d, W)]` with standard error.
///
/// The weights integrate to 1 exactly, so the plain average `sum w_i g_i / m`
/// is unbiased; the reported error is the i.i.d. standard error of the
/// weighted summands.
pub fn expectation<G>(p: &BpyParams, g: G, m: u64, seed: u64) -> Result<McEstimate>
where
    G: Fn(&[f64], f64) -> f64 + Sync,
{
    if m < 1_000 {
        return Err(Error::Precondition(format!(
            "need at least 1000 draws for a standard-error estimate, got {m}"
        )));
    }
    let stables = p.stables()?;
    let g1a = gamma(1.0 + p.alpha);
    let partials = exec::run_strata(seed, m, |_, count, rng: &mut ChaCha8Rng| {
        let mut sum = KahanSum::new();
        let mut sumsq = KahanSum::new();
        for _ in 0..count {
            let d = draw_one(&stables, g1a, rng);
            let v = d.weight * g(&d.u, d.w);
            sum.add(v);
            sumsq.add(v * v);
        }
        (sum.value(), sumsq.value())
    });
    let mut sum = KahanSum::new();
    let mut sumsq = KahanSum::new();
    for (s, s2) in partials {
        sum.add(s);
        sumsq.add(s2);
    }
    let mf = m as f64;
    let mean = sum.value() / mf;
    let var = (sumsq.value() / mf - mean * mean).max(0.0);
    Ok(McEstimate {
        value: mean,
        std_error: (var / mf).sqrt(),
        samples: m,
    })
}

/// MC estimate of the joint CDF `P[U_1<=t_1,..,U_d<=t_d, W<=t_w]`.
pub fn joint_cdf(p: &BpyParams, t: &[f64], t_w: f64, m: u64, seed: u64) -> Result<McEstimate> {
    if t.len() != p.dim() {
        return Err(Error::InvalidParameter(format!(
            "threshold vector has length {}, expected {}",
            t.len(),
            p.dim()
        )));
    }
    let t = t.to_vec();
    expectation(
        p,
        move |u, w| {
            let inside = u.iter().zip(&t).all(|(&ui, &ti)| ui <= ti) && w <= t_w;
            f64::from(u8::from(inside))
        },
        m,
        seed,
    )
}

/// Weighted draws packaged as an empirical distribution over `(u_1..u_d, w)`.
pub fn empirical(p: &BpyParams, m: u64, seed: u64) -> Result<EmpiricalDistribution> {
    let draws = sample_weighted(p, m, seed)?;
    let dims = p.dim() + 1;
    EmpiricalDistribution::new(
        draws
            .into_iter()
            .map(|d| {
                let mut v = d.u;
                v.push(d.w);
                (v, d.weight)
            })
            .collect(),
        dims,
    )
}

/// Closed-form density of `U_1` at `alpha = 1/2`, d = 2:
/// `beta_1 beta_2 / 2 * (beta_1^2 (1-x) + beta_2^2 x)^{-3/2}`, obtained by
/// integrating the weighted product of two Levy densities over the sum
/// variable.
pub fn u1_density_half(beta1: f64, x: f64) -> Result<f64> {
    if !(beta1 > 0.0 && beta1 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "beta1 must lie in (0,1), got {beta1}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x must lie in [0,1], got {x}")));
    }
    let beta2 = 1.0 - beta1;
    let q = beta1 * beta1 * (1.0 - x) + beta2 * beta2 * x;
    Ok(beta1 * beta2 / 2.0 * q.powf(-1.5))
}

/// CDF of `U_1` at `alpha = 1/2` by antidifferentiation of the closed form:
/// `F(x) = beta_1 beta_2 / (beta_2^2 - beta_1^2) * (1/beta_1 - q(x)^{-1/2})`
/// for `beta_1 != 1/2`, and the uniform CDF at `beta_1 = 1/2`.
pub fn u1_cdf_half(beta1: f64, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x must lie in [0,1], got {x}")));
    }
    let beta2 = 1.0 - beta1;
    let slope = beta2 * beta2 - beta1 * beta1;
    if slope.abs() < 1e-12 {
        return Ok(x);
    }
    let q = beta1 * beta1 * (1.0 - x) + beta2 * beta2 * x;
    Ok((beta1 * beta2 / slope) * (1.0 / beta1 - q.powf(-0.5)))
}

/// Stieltjes transform of `U_1` for d = 2:
/// `E[(lambda + U_1)^{-alpha}] = (beta_1 (1+lambda)^alpha + (1-beta_1) lambda^alpha)^{-1}`.
pub fn u1_stieltjes(p: &BpyParams, lambda: f64) -> Result<f64> {
    if p.dim() != 2 {
        return Err(Error::Dimension(p.dim()));
    }
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let (alpha, beta1) = (p.alpha, p.beta[0]);
    Ok(1.0 / (beta1 * (1.0 + lambda).powf(alpha) + (1.0 - beta1) * lambda.powf(alpha)))
}
