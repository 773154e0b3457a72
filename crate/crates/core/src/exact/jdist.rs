//! The law of the number of collisions `J_n` of the block-counting chain.
//!
//! One step maps the distribution `D` over block counts to
//! `D'[c] = sum_{d >= 1} D[c+d] (c+d)/(c+d-1) / (d(d+1))`; the mass arriving
//! at 1 after `j` steps is `P(J_n = j)`. The sum is a correlation with the
//! fixed kernel `1/(d(d+1))`, done by FFT for large `n`.

use num_rational::BigRational;
use num_traits::Zero;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::coalescent::forward_prob;
use crate::error::{domain, Error, Result};

/// Largest `n` for the floating-point law and mean.
pub const MAX_J_N: usize = 20_000;
/// Largest `n` for the rational law.
pub const MAX_RATIONAL_J_N: usize = 150;
/// The step recursion stops once the mass not yet absorbed is below this.
pub const TAIL_MASS: f64 = 1e-15;
const DIRECT_LIMIT: usize = 256;

#[derive(Clone, Debug, PartialEq)]
pub struct JDistribution {
    pub n: usize,
    /// `probs[j] = P(J_n = j)`; `probs[0] = 0`.
    pub probs: Vec<f64>,
    /// Mass left unresolved when the recursion stopped.
    pub tail_mass: f64,
}

impl JDistribution {
    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(j, p)| j as f64 * p).sum()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn prob(&self, j: usize) -> f64 {
        self.probs.get(j).copied().unwrap_or(0.0)
    }
}

fn check_n(n: usize, cap: usize) -> Result<()> {
    if n < 2 {
        return domain("the collision count law needs n >= 2");
    }
    if n > cap {
        return Err(Error::Size(format!("collision count law is capped at n = {cap}")));
    }
    Ok(())
}

fn weight(d: usize) -> f64 {
    let d = d as f64;
    1.0 / (d * (d + 1.0))
}

fn step_direct(dist: &[f64], top: usize) -> Vec<f64> {
    let mut out = vec![0.0; top + 1];
    for b in 2..=top {
        if dist[b] == 0.0 {
            continue;
        }
        let c = dist[b] * b as f64 / (b - 1) as f64;
        for (t, slot) in out.iter_mut().enumerate().take(b).skip(1) {
            *slot += c * weight(b - t);
        }
    }
    out
}

struct FftStep {
    size: usize,
    kernel: Vec<Complex<f64>>,
    planner: FftPlanner<f64>,
}

impl FftStep {
    fn new(n: usize) -> Self {
        let size = (2 * (n + 1)).next_power_of_two();
        let mut planner = FftPlanner::new();
        let mut kernel = vec![Complex::new(0.0, 0.0); size];
        for (d, slot) in kernel.iter_mut().enumerate().take(n + 1).skip(1) {
            slot.re = weight(d);
        }
        planner.plan_fft_forward(size).process(&mut kernel);
        Self {
            size,
            kernel,
            planner,
        }
    }

    /// With `r[i] = c[top - i]`, `D'[t] = (r * w)[top - t]`.
    fn step(&mut self, dist: &[f64], top: usize) -> Vec<f64> {
        let mut r = vec![Complex::new(0.0, 0.0); self.size];
        for b in 2..=top {
            r[top - b].re = dist[b] * b as f64 / (b - 1) as f64;
        }
        self.planner.plan_fft_forward(self.size).process(&mut r);
        for (x, k) in r.iter_mut().zip(&self.kernel) {
            *x *= *k;
        }
        self.planner.plan_fft_inverse(self.size).process(&mut r);
        let scale = 1.0 / self.size as f64;
        let mut out = vec![0.0; top + 1];
        for (t, slot) in out.iter_mut().enumerate().take(top).skip(1) {
            *slot = (r[top - t].re * scale).max(0.0);
        }
        out
    }
}

/// `P(J_n = j)` for `j = 1, 2, ...` until the remaining mass drops below
/// [`TAIL_MASS`].
pub fn exact_j_distribution(n: usize) -> Result<JDistribution> {
    check_n(n, MAX_J_N)?;
    let mut dist = vec![0.0; n + 1];
    dist[n] = 1.0;
    let mut probs = vec![0.0];
    let mut fft = (n > DIRECT_LIMIT).then(|| FftStep::new(n));
    let mut top = n;
    let mut remaining = 1.0;
    while top > 1 && remaining >= TAIL_MASS {
        let mut next = match fft.as_mut() {
            Some(f) if top > DIRECT_LIMIT => f.step(&dist, top),
            _ => step_direct(&dist, top),
        };
        probs.push(next[1]);
        next[1] = 0.0;
        top -= 1;
        while top > 1 && next[top] == 0.0 {
            top -= 1;
        }
        next.truncate(top + 1);
        remaining = next.iter().sum();
        dist = next;
    }
    Ok(JDistribution {
        n,
        probs,
        tail_mass: remaining.max(0.0),
    })
}

/// `P(J_n = j)` as exact rationals, `j = 0..n-1`.
pub fn exact_j_distribution_rational(n: usize) -> Result<Vec<BigRational>> {
    check_n(n, MAX_RATIONAL_J_N)?;
    let zero = BigRational::zero();
    let p: Vec<Vec<BigRational>> = (0..=n)
        .map(|b| {
            (0..=b)
                .map(|k| if b >= 2 && k >= 2 { forward_prob(b, k).unwrap() } else { zero.clone() })
                .collect()
        })
        .collect();
    let mut dist = vec![zero.clone(); n + 1];
    dist[n] = BigRational::from_integer(1.into());
    let mut probs = vec![zero.clone()];
    for step in 1..n {
        let top = n - step + 1;
        let mut next = vec![zero.clone(); top];
        for b in 2..=top {
            if dist[b].is_zero() {
                continue;
            }
            for k in 2..=b {
                next[b - k + 1] += &dist[b] * &p[b][k];
            }
        }
        probs.push(std::mem::replace(&mut next[1], zero.clone()));
        dist = next;
    }
    Ok(probs)
}

/// `E[J_n]` from `E_b = 1 + sum_k p_{b,b-k+1} E_{b-k+1}`, `E_1 = 0`.
pub fn exact_j_mean(n: usize) -> Result<f64> {
    check_n(n, MAX_J_N)?;
    let mut e = vec![0.0; n + 1];
    for b in 2..=n {
        let bf = b as f64;
        let mut s = 0.0;
        for k in 2..=b {
            let kf = k as f64;
            s += e[b - k + 1] / (kf * (kf - 1.0));
        }
        e[b] = 1.0 + s * bf / (bf - 1.0);
    }
    Ok(e[n])
}
