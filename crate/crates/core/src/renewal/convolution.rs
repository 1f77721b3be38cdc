//! Truncated nonnegative convolutions. Every kernel here has support in the
//! nonnegative orthant, so truncating the output lattice is exact for the
//! retained indices: a discarded index can never feed back into a kept one.
//! FFT sizes are padded past the full linear-convolution length, so there is
//! no wrap-around either; the only FFT artifact is rounding noise, which is
//! clamped when slightly negative and treated as a bug when large.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Anything below this is a genuine sign error, not FFT rounding.
pub(crate) const NEGATIVE_RESIDUE_FLOOR: f64 = -1e-10;

pub(crate) fn clamp_residue(v: &mut [f64]) -> Result<()> {
    for x in v.iter_mut() {
        if *x < 0.0 {
            if *x < NEGATIVE_RESIDUE_FLOOR {
                return Err(Error::NegativeResidue(*x));
            }
            *x = 0.0;
        }
    }
    Ok(())
}

/// Plain linear convolution truncated to indices 0..out_len.
pub(crate) fn conv_trunc_naive(a: &[f64], b: &[f64], out_len: usize) -> Vec<f64> {
    let mut out = vec![0.0; out_len];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 || i >= out_len {
            continue;
        }
        let top = (out_len - i).min(b.len());
        for (j, &bj) in b[..top].iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Repeated convolution against one fixed 1-d kernel, FFT-accelerated with
/// the kernel transform cached.
pub(crate) struct KernelFft {
    size: usize,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    kernel_freq: Vec<Complex64>,
    kernel: Vec<f64>,
    out_len: usize,
    naive: bool,
}

impl KernelFft {
    pub fn new(kernel: &[f64], out_len: usize) -> Self {
        // below this work size the direct sum wins and has no rounding residue
        let naive = out_len.saturating_mul(kernel.len()) < (1 << 16);
        if naive {
            return Self {
                size: 0,
                fft: FftPlanner::new().plan_fft_forward(1),
                ifft: FftPlanner::new().plan_fft_inverse(1),
                kernel_freq: Vec::new(),
                kernel: kernel.to_vec(),
                out_len,
                naive,
            };
        }
        let size = (out_len + kernel.len()).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(size);
        let ifft = planner.plan_fft_inverse(size);
        let mut kf: Vec<Complex64> = kernel.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        kf.resize(size, Complex64::new(0.0, 0.0));
        fft.process(&mut kf);
        Self {
            size,
            fft,
            ifft,
            kernel_freq: kf,
            kernel: kernel.to_vec(),
            out_len,
            naive,
        }
    }

    pub fn apply(&self, a: &[f64]) -> Result<Vec<f64>> {
        if self.naive {
            return Ok(conv_trunc_naive(a, &self.kernel, self.out_len));
        }
        debug_assert!(a.len() <= self.out_len);
        let mut buf: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        buf.resize(self.size, Complex64::new(0.0, 0.0));
        self.fft.process(&mut buf);
        for (x, k) in buf.iter_mut().zip(&self.kernel_freq) {
            *x *= k;
        }
        self.ifft.process(&mut buf);
        let scale = 1.0 / self.size as f64;
        let mut out: Vec<f64> = buf[..self.out_len].iter().map(|c| c.re * scale).collect();
        clamp_residue(&mut out)?;
        Ok(out)
    }
}

/// k-th truncated convolution power of a 1-d kernel by binary exponentiation.
pub(crate) fn pow_trunc(kernel: &[f64], k: usize, out_len: usize) -> Result<Vec<f64>> {
    let mut result = vec![0.0; out_len];
    if out_len > 0 {
        result[0] = 1.0;
    }
    if k == 0 {
        return Ok(result);
    }
    let mut base: Vec<f64> = kernel[..kernel.len().min(out_len)].to_vec();
    base.resize(out_len, 0.0);
    let mut e = k;
    let mut first = true;
    loop {
        if e & 1 == 1 {
            result = if first {
                first = false;
                base.clone()
            } else {
                mul_trunc(&result, &base, out_len)?
            };
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = mul_trunc(&base, &base, out_len)?;
    }
    Ok(result)
}

fn mul_trunc(a: &[f64], b: &[f64], out_len: usize) -> Result<Vec<f64>> {
    if a.len().saturating_mul(b.len()) < (1 << 18) {
        return Ok(conv_trunc_naive(a, b, out_len));
    }
    let size = (a.len() + b.len()).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(size);
    let ifft = planner.plan_fft_inverse(size);
    let mut fa: Vec<Complex64> = a.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fa.resize(size, Complex64::new(0.0, 0.0));
    let mut fb: Vec<Complex64> = b.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fb.resize(size, Complex64::new(0.0, 0.0));
    fft.process(&mut fa);
    fft.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    ifft.process(&mut fa);
    let scale = 1.0 / size as f64;
    let mut out: Vec<f64> = fa[..out_len.min(size)].iter().map(|c| c.re * scale).collect();
    out.resize(out_len, 0.0);
    clamp_residue(&mut out)?;
    Ok(out)
}

/// Repeated convolution against a fixed d-dimensional kernel on the box
/// prod [0, dims_i), padded per axis past the linear-convolution length.
pub(crate) struct NdKernelConvolver {
    dims: Vec<usize>,
    pad: Vec<usize>,
    kernel_freq: Vec<Complex64>,
    planner: FftPlanner<f64>,
}

impl NdKernelConvolver {
    pub fn new(kernel: &[f64], dims: &[usize]) -> Self {
        let pad: Vec<usize> = dims
            .iter()
            .map(|&d| (2 * d - 1).next_power_of_two())
            .collect();
        let total: usize = pad.iter().product();
        let mut planner = FftPlanner::new();
        let mut kf = embed(kernel, dims, &pad, total);
        fft_nd(&mut kf, &pad, &mut planner, false);
        Self {
            dims: dims.to_vec(),
            pad,
            kernel_freq: kf,
            planner,
        }
    }

    pub fn apply(&mut self, a: &[f64]) -> Result<Vec<f64>> {
        let total = self.kernel_freq.len();
        let mut buf = embed(a, &self.dims, &self.pad, total);
        fft_nd(&mut buf, &self.pad, &mut self.planner, false);
        for (x, k) in buf.iter_mut().zip(&self.kernel_freq) {
            *x *= k;
        }
        fft_nd(&mut buf, &self.pad, &mut self.planner, true);
        let scale = 1.0 / total as f64;
        let mut out = vec![0.0; self.dims.iter().product()];
        extract(&buf, &self.dims, &self.pad, scale, &mut out);
        clamp_residue(&mut out)?;
        Ok(out)
    }
}

fn embed(a: &[f64], dims: &[usize], pad: &[usize], total: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); total];
    let d = dims.len();
    let mut idx = vec![0usize; d];
    for &v in a {
        let mut flat = 0usize;
        for (i, &ix) in idx.iter().enumerate() {
            flat = flat * pad[i] + ix;
        }
        out[flat] = Complex64::new(v, 0.0);
        // advance the multi-index in row-major order over `dims`
        for i in (0..d).rev() {
            idx[i] += 1;
            if idx[i] < dims[i] {
                break;
            }
            idx[i] = 0;
        }
    }
    out
}

fn extract(buf: &[Complex64], dims: &[usize], pad: &[usize], scale: f64, out: &mut [f64]) {
    let d = dims.len();
    let mut idx = vec![0usize; d];
    for v in out.iter_mut() {
        let mut flat = 0usize;
        for (i, &ix) in idx.iter().enumerate() {
            flat = flat * pad[i] + ix;
        }
        *v = buf[flat].re * scale;
        for i in (0..d).rev() {
            idx[i] += 1;
            if idx[i] < dims[i] {
                break;
            }
            idx[i] = 0;
        }
    }
}

/// In-place FFT along every axis of a row-major d-dimensional array.
fn fft_nd(buf: &mut [Complex64], pad: &[usize], planner: &mut FftPlanner<f64>, inverse: bool) {
    let d = pad.len();
    for axis in 0..d {
        let len = pad[axis];
        let fft = if inverse {
            planner.plan_fft_inverse(len)
        } else {
            planner.plan_fft_forward(len)
        };
        let inner: usize = pad[axis + 1..].iter().product();
        let outer: usize = pad[..axis].iter().product();
        let mut line = vec![Complex64::new(0.0, 0.0); len];
        for o in 0..outer {
            let block = o * len * inner;
            for i in 0..inner {
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = buf[block + t * inner + i];
                }
                fft.process(&mut line);
                for (t, &val) in line.iter().enumerate() {
                    buf[block + t * inner + i] = val;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn naive_matches_fft_1d() {
        let kernel: Vec<f64> = (0..300).map(|i| ((i * 37 + 11) % 101) as f64 / 101.0).collect();
        let a: Vec<f64> = (0..400).map(|i| ((i * 53 + 7) % 97) as f64 / 97.0).collect();
        let conv = KernelFft::new(&kernel, 600);
        // force the FFT branch by construction: 600*300 > 2^16
        assert!(!conv.naive);
        let fft_out = conv.apply(&a).unwrap();
        let naive_out = conv_trunc_naive(&a, &kernel, 600);
        for (x, y) in fft_out.iter().zip(&naive_out) {
            assert!((x - y).abs() < 1e-9, "{x} vs {y}");
        }
    }

    #[test]
    fn pow_trunc_matches_repeated() {
        let kernel = [0.0, 0.5, 0.3, 0.2];
        let p5 = pow_trunc(&kernel, 5, 20).unwrap();
        let mut rep = vec![0.0; 20];
        rep[0] = 1.0;
        for _ in 0..5 {
            rep = conv_trunc_naive(&rep, &kernel, 20);
        }
        for (x, y) in p5.iter().zip(&rep) {
            assert!((x - y).abs() < 1e-14);
        }
        // full mass retained when the horizon is wide enough
        let total: f64 = p5.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nd_convolver_matches_direct_2d() {
        // kernel on a 4x4 box, state on the same box, one application
        let dims = [4usize, 4usize];
        let mut kernel = vec![0.0; 16];
        kernel[0] = 0.4;
        kernel[1] = 0.25; // (0,1)
        kernel[4] = 0.35; // (1,0)
        let mut state = vec![0.0; 16];
        state[0] = 1.0;
        let mut conv = NdKernelConvolver::new(&kernel, &dims);
        let mut cur = state;
        for _ in 0..3 {
            cur = conv.apply(&cur).unwrap();
        }
        // direct trinomial: T[(i,j)] = C(3;i,j) 0.35^i 0.25^j 0.4^(3-i-j)
        let c3 = |i: usize, j: usize| -> f64 {
            let k0 = 3 - i - j;
            let fact = [1.0, 1.0, 2.0, 6.0];
            fact[3] / (fact[i] * fact[j] * fact[k0])
                * 0.35f64.powi(i as i32)
                * 0.25f64.powi(j as i32)
                * 0.4f64.powi(k0 as i32)
        };
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i + j <= 3 { c3(i, j) } else { 0.0 };
                let got = cur[i * 4 + j];
                assert!((got - expect).abs() < 1e-12, "({i},{j}): {got} vs {expect}");
            }
        }
    }

    #[test]
    fn clamp_distinguishes_rounding_from_bugs() {
        let mut fine = vec![0.3, -1e-13, 0.7];
        clamp_residue(&mut fine).unwrap();
        assert_eq!(fine[1], 0.0);
        let mut bad = vec![0.3, -1e-6];
        assert!(matches!(
            clamp_residue(&mut bad),
            Err(Error::NegativeResidue(_))
        ));
    }
}
