//! Zero-temperature amplitude damping.
//!
//! The Kraus operators
//! `S_j(t) = Σ_{n≥j} sqrt(C(n, j)) e^{−(n−j)γt/2} (1 − e^{−γt})^{j/2} |n−j⟩⟨n|`
//! give `ρ(t) = Σ_j S_j ρ(0) S_j†` directly for any `t`. The bath couples
//! through the ordinary bosonic `a, a†`, whatever algebra built the initial
//! state. [`integrate_lindblad`] solves the master equation
//! `dρ/dt = γ a ρ a† − (γ/2){a†a, ρ}` with fixed-step RK4 as an independent
//! check of the Kraus route.

use ndarray::Array2;
use num_complex::Complex64;
use serde::Serialize;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};

/// Trace drift tolerated by [`apply_channel`] before it reports an
/// insufficient cutoff.
pub const CHANNEL_TRACE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DampingChannel {
    gamma: f64,
    t: f64,
}

impl DampingChannel {
    pub fn new(gamma: f64, t: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Config(format!("damping rate must be positive, got {gamma}")));
        }
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::Config(format!("time must be non-negative, got {t}")));
        }
        Ok(Self { gamma, t })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `γt`.
    pub fn decay_exponent(&self) -> f64 {
        self.gamma * self.t
    }

    /// Survival probability `e^{−γt}` of a single quantum.
    pub fn survival(&self) -> f64 {
        (-self.decay_exponent()).exp()
    }

    /// `ln e^{−γt}` and `ln(1 − e^{−γt})`; the latter is `-inf` at `t = 0`.
    pub(crate) fn log_weights(&self) -> (f64, f64) {
        let gt = self.decay_exponent();
        (-gt, (-(-gt).exp_m1()).ln())
    }
}

/// `ln k!` for `k = 0..=n`.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    for k in 1..=n {
        out.push(out[k - 1] + (k as f64).ln());
    }
    out
}

/// Table of `(S_j)_{n−j,n}` indexed `[j][n]` for `0 ≤ j ≤ n ≤ cutoff`,
/// zero elsewhere. Built in log space.
pub(crate) fn kraus_table(channel: &DampingChannel, cutoff: usize) -> Vec<Vec<f64>> {
    let ln_fact = ln_factorials(cutoff);
    let (ln_keep, ln_lose) = channel.log_weights();
    (0..=cutoff)
        .map(|j| {
            (0..=cutoff)
                .map(|n| {
                    if n < j {
                        return 0.0;
                    }
                    let lose = if j == 0 { 0.0 } else { j as f64 * ln_lose };
                    let ln_binom = ln_fact[n] - ln_fact[n - j] - ln_fact[j];
                    (0.5 * (ln_binom + (n - j) as f64 * ln_keep + lose)).exp()
                })
                .collect()
        })
        .collect()
}

/// Dense `S_j(t)` on `|0⟩..|cutoff⟩`.
pub fn kraus_operator(j: usize, channel: &DampingChannel, cutoff: usize) -> Result<Array2<f64>> {
    if j > cutoff {
        return Err(Error::OutOfRange { index: j, cutoff });
    }
    let row = &kraus_table(channel, cutoff)[j];
    let mut s = Array2::zeros((cutoff + 1, cutoff + 1));
    for n in j..=cutoff {
        s[[n - j, n]] = row[n];
    }
    Ok(s)
}

/// `Σ_j S_j ρ S_j†`, using that `S_j` only connects `|n⟩ → |n−j⟩`:
/// `ρ(t)_{kl} = Σ_j (S_j)_{k,k+j} (S_j)_{l,l+j} ρ_{k+j,l+j}`.
pub fn apply_channel(rho0: &DensityMatrix, channel: &DampingChannel) -> Result<DensityMatrix> {
    let cutoff = rho0.cutoff();
    let table = kraus_table(channel, cutoff);
    let src = rho0.entries();
    let out = Array2::from_shape_fn((cutoff + 1, cutoff + 1), |(k, l)| {
        let top = cutoff - k.max(l);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, row) in table.iter().enumerate().take(top + 1) {
            acc += src[[k + j, l + j]] * (row[k + j] * row[l + j]);
        }
        acc
    });
    let rho = DensityMatrix::from_entries(out)?;
    let deviation = (rho.trace() - 1.0).norm();
    if deviation > CHANNEL_TRACE_TOL {
        return Err(Error::TraceDeviation { deviation });
    }
    Ok(rho)
}

/// `γ a ρ a† − (γ/2){a†a, ρ}` with the ordinary oscillator `a`,
/// `(a)_{n−1,n} = √n`, truncated at the matrix size.
pub fn lindblad_rhs(rho: &DensityMatrix, gamma: f64) -> Array2<Complex64> {
    let dim = rho.dim();
    let src = rho.entries().as_standard_layout();
    let mut out = Array2::zeros((dim, dim));
    LindbladKernel::new(dim, gamma).apply(
        src.as_slice().expect("standard layout"),
        out.as_slice_mut().expect("fresh array"),
    );
    out
}

/// Row-major right-hand side with `√n` tabulated once.
struct LindbladKernel {
    dim: usize,
    gamma: f64,
    sqrt_n: Vec<f64>,
}

impl LindbladKernel {
    fn new(dim: usize, gamma: f64) -> Self {
        Self {
            dim,
            gamma,
            sqrt_n: (0..=dim).map(|n| (n as f64).sqrt()).collect(),
        }
    }

    fn apply(&self, rho: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim;
        for k in 0..n {
            let row = &rho[k * n..(k + 1) * n];
            let out_row = &mut out[k * n..(k + 1) * n];
            for (l, (o, r)) in out_row.iter_mut().zip(row).enumerate() {
                *o = -(r * (0.5 * (k + l) as f64));
            }
            if k + 1 < n {
                let below = &rho[(k + 1) * n..(k + 2) * n];
                let sk = self.sqrt_n[k + 1];
                for l in 0..n - 1 {
                    out_row[l] += below[l + 1] * (sk * self.sqrt_n[l + 1]);
                }
            }
            for o in out_row.iter_mut() {
                *o *= self.gamma;
            }
        }
    }
}

/// `max(1000, ⌈2000·γt⌉)`.
pub fn default_lindblad_steps(gamma: f64, t: f64) -> usize {
    ((2000.0 * gamma * t).ceil() as usize).max(1000)
}

/// Classical fixed-step RK4 from 0 to `t`.
pub fn integrate_lindblad(rho0: &DensityMatrix, gamma: f64, t: f64, steps: usize) -> Result<DensityMatrix> {
    if steps == 0 {
        return Err(Error::Config("integrator needs at least one step".into()));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let dim = rho0.dim();
    let h = t / steps as f64;
    let kernel = LindbladKernel::new(dim, gamma);
    let mut rho: Vec<Complex64> = rho0.entries().iter().copied().collect();
    let zero = Complex64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4, mut probe) = (
        vec![zero; dim * dim],
        vec![zero; dim * dim],
        vec![zero; dim * dim],
        vec![zero; dim * dim],
        vec![zero; dim * dim],
    );
    let shifted = |probe: &mut [Complex64], rho: &[Complex64], k: &[Complex64], scale: f64| {
        for ((p, r), d) in probe.iter_mut().zip(rho).zip(k) {
            *p = r + d * scale;
        }
    };
    for _ in 0..steps {
        kernel.apply(&rho, &mut k1);
        shifted(&mut probe, &rho, &k1, 0.5 * h);
        kernel.apply(&probe, &mut k2);
        shifted(&mut probe, &rho, &k2, 0.5 * h);
        kernel.apply(&probe, &mut k3);
        shifted(&mut probe, &rho, &k3, h);
        kernel.apply(&probe, &mut k4);
        let mut finite = true;
        for i in 0..rho.len() {
            rho[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
            finite &= rho[i].re.is_finite() && rho[i].im.is_finite();
        }
        if !finite {
            return Err(Error::NonFinite("Lindblad integration"));
        }
    }
    DensityMatrix::from_entries(Array2::from_shape_vec((dim, dim), rho).expect("dim² entries"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{AlgebraKind, DeformationParams};
    use crate::states::{adaptive_ladder, cat_state, coherent_amplitudes, Parity};

    fn channel(gamma: f64, t: f64) -> DampingChannel {
        DampingChannel::new(gamma, t).unwrap()
    }

    fn max_diff(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
        a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn channel_rejects_bad_arguments() {
        assert!(DampingChannel::new(0.0, 1.0).is_err());
        assert!(DampingChannel::new(1.0, -1.0).is_err());
        assert!(DampingChannel::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn kraus_examples() {
        let s0 = kraus_operator(0, &channel(1.0, 0.0), 6).unwrap();
        assert_eq!(max_diff(&s0, &Array2::eye(7)), 0.0);
        let s1 = kraus_operator(1, &channel(1.0, 0.0), 6).unwrap();
        assert!(s1.iter().all(|x| *x == 0.0));
        let s0 = kraus_operator(0, &channel(1.0, 4f64.ln()), 6).unwrap();
        for n in 0..=6 {
            assert!((s0[[n, n]] - 0.5f64.powi(n as i32)).abs() < 1e-15);
        }
        assert!(kraus_operator(7, &channel(1.0, 1.0), 6).is_err());
    }

    #[test]
    fn kraus_completeness() {
        for gt in [0.0, 0.3, 1.0, 5.0, 50.0] {
            let ch = channel(1.0, gt);
            let cutoff = 40;
            let mut sum = Array2::<f64>::zeros((cutoff + 1, cutoff + 1));
            for j in 0..=cutoff {
                let s = kraus_operator(j, &ch, cutoff).unwrap();
                sum = sum + s.t().dot(&s);
            }
            assert!(max_diff(&sum, &Array2::eye(cutoff + 1)) < 1e-12, "γt = {gt}");
        }
    }

    /// Σ_j S_j ρ S_jᵀ with dense matrices, independent of the banded kernel.
    fn dense_channel(rho: &DensityMatrix, ch: &DampingChannel) -> Array2<Complex64> {
        let cutoff = rho.cutoff();
        let mut out = Array2::<Complex64>::zeros((cutoff + 1, cutoff + 1));
        for j in 0..=cutoff {
            let s = kraus_operator(j, ch, cutoff).unwrap().mapv(|x| Complex64::new(x, 0.0));
            out = out + s.dot(rho.entries()).dot(&s.t());
        }
        out
    }

    #[test]
    fn banded_kernel_matches_dense_products() {
        let params = DeformationParams::new(0.7, 0.2, 0.1);
        let coeffs = adaptive_ladder(AlgebraKind::GeneralizedSu11, &params, 1.5).unwrap();
        let rho = DensityMatrix::from_pure(&cat_state(1.5, Parity::Even, &coeffs).unwrap());
        let ch = channel(1.0, 0.7);
        let fast = apply_channel(&rho, &ch).unwrap();
        let dense = dense_channel(&rho, &ch);
        let diff = fast.entries().iter().zip(dense.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-14);
    }

    #[test]
    fn identity_at_zero_time() {
        let coeffs = adaptive_ladder(AlgebraKind::Gha, &DeformationParams::new(0.9, 0.2, 0.1), 2.0).unwrap();
        let rho = DensityMatrix::from_pure(&cat_state(2.0, Parity::Even, &coeffs).unwrap());
        let out = apply_channel(&rho, &channel(1.0, 0.0)).unwrap();
        assert!(out.max_abs_diff(&rho).unwrap() < 1e-14);
    }

    #[test]
    fn single_photon_decay() {
        let rho = DensityMatrix::fock(1, 5).unwrap();
        for gt in [0.2, 1.0, 3.0] {
            let out = apply_channel(&rho, &channel(1.0, gt)).unwrap();
            let e = out.entries();
            assert!((e[[0, 0]].re - (1.0 - (-gt).exp())).abs() < 1e-15);
            assert!((e[[1, 1]].re - (-gt).exp()).abs() < 1e-15);
            assert_eq!(e[[0, 1]], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn glauber_state_shrinks() {
        let h = DeformationParams::harmonic(0.2);
        let coeffs = adaptive_ladder(AlgebraKind::Gha, &h, 2.0).unwrap();
        let rho = DensityMatrix::from_pure(&coherent_amplitudes(2.0, &coeffs).unwrap());
        for t in [0.1, 1.0, 2.5] {
            let out = apply_channel(&rho, &channel(1.0, t)).unwrap();
            let shrunk = coherent_amplitudes(2.0 * (-t / 2.0f64).exp(), &coeffs).unwrap();
            let expect = DensityMatrix::from_pure(&shrunk);
            assert!(out.max_abs_diff(&expect).unwrap() < 1e-8);
        }
    }

    #[test]
    fn vacuum_is_fixed() {
        let vac = DensityMatrix::vacuum(10);
        for t in [0.5, 5.0, 50.0] {
            assert_eq!(apply_channel(&vac, &channel(1.3, t)).unwrap(), vac);
        }
        assert!(lindblad_rhs(&vac, 1.0).iter().all(|c| *c == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn semigroup_composition() {
        let coeffs = adaptive_ladder(AlgebraKind::Gha, &DeformationParams::new(0.7, 0.2, 0.1), 1.0).unwrap();
        let rho = DensityMatrix::from_pure(&cat_state(1.0, Parity::Even, &coeffs).unwrap());
        let twice = apply_channel(&apply_channel(&rho, &channel(1.0, 0.4)).unwrap(), &channel(1.0, 1.1)).unwrap();
        let once = apply_channel(&rho, &channel(1.0, 1.5)).unwrap();
        assert!(twice.max_abs_diff(&once).unwrap() < 1e-8);
    }

    #[test]
    fn lindblad_rhs_single_photon() {
        let rhs = lindblad_rhs(&DensityMatrix::fock(1, 3).unwrap(), 0.8);
        assert!((rhs[[0, 0]].re - 0.8).abs() < 1e-15);
        assert!((rhs[[1, 1]].re + 0.8).abs() < 1e-15);
        let others: f64 = rhs.iter().map(|c| c.norm()).sum::<f64>() - 1.6;
        assert!(others.abs() < 1e-15);
    }

    #[test]
    fn lindblad_matches_kraus() {
        let rho = DensityMatrix::fock(1, 4).unwrap();
        let rk4 = integrate_lindblad(&rho, 1.0, 1.0, 1000).unwrap();
        let kraus = apply_channel(&rho, &channel(1.0, 1.0)).unwrap();
        assert!(rk4.max_abs_diff(&kraus).unwrap() < 1e-6);

        let coeffs = adaptive_ladder(AlgebraKind::Gha, &DeformationParams::harmonic(0.2), 1.0).unwrap();
        let cat = DensityMatrix::from_pure(&cat_state(1.0, Parity::Even, &coeffs).unwrap());
        let rk4 = integrate_lindblad(&cat, 1.0, 0.5, default_lindblad_steps(1.0, 0.5)).unwrap();
        let kraus = apply_channel(&cat, &channel(1.0, 0.5)).unwrap();
        assert!(rk4.max_abs_diff(&kraus).unwrap() < 1e-6);
        assert_eq!(integrate_lindblad(&cat, 1.0, 0.0, 10).unwrap(), cat);
    }
}
