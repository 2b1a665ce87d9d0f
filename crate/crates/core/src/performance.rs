//! Spectral efficiency: instantaneous SE under MRT, Monte Carlo ergodic SE,
//! and the closed-form Jensen upper bounds.

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{
    appendix_cross_terms, stream_rng, CascadedLink, ChannelRealization, CrossTerms,
    DerivedCoefficients,
};
use crate::geometry::wrap_angle;
use crate::stats::Estimate;
use crate::{Error, Result, C64};

/// Argument below which the high-SNR approximation is flagged as unreliable.
pub const HIGH_SNR_THRESHOLD: f64 = 10.0;

/// RIS phase shifts in radians, kept in `[0, 2pi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    angles: Vec<f64>,
}

impl PhaseProfile {
    pub fn new(angles: Vec<f64>) -> Self {
        Self {
            angles: angles.into_iter().map(wrap_angle).collect(),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self { angles: vec![0.0; n] }
    }

    /// I.i.d. uniform phases on `[0, 2pi)`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self::new((0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect())
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn get(&self, n: usize) -> f64 {
        self.angles[n]
    }

    pub fn set(&mut self, n: usize, angle: f64) {
        self.angles[n] = wrap_angle(angle);
    }

    /// Diagonal of `Phi`.
    pub fn phasors(&self) -> Vec<C64> {
        self.angles.iter().map(|&a| C64::from_polar(1.0, a)).collect()
    }

    /// Adds a common offset to every phase.
    pub fn rotated(&self, offset: f64) -> Self {
        Self::new(self.angles.iter().map(|a| a + offset).collect())
    }
}

/// `sum_n rho_n exp(j phi_n)`, i.e. `hbar_i^H Phi hbar_B` for `rho = conj(hbar_i) . hbar_B`.
pub fn coherent_sum(rho: &[C64], phases: &PhaseProfile) -> C64 {
    rho.iter()
        .zip(phases.angles())
        .map(|(r, &a)| r * C64::from_polar(1.0, a))
        .sum()
}

/// MRT beamformer `(g + d) / ||g + d||`.
pub fn mrt_beamformer(g: &[C64], d: &[C64]) -> Result<Vec<C64>> {
    if g.len() != d.len() {
        return Err(Error::invalid(format!("length mismatch {} vs {}", g.len(), d.len())));
    }
    let sum: Vec<C64> = g.iter().zip(d).map(|(a, b)| a + b).collect();
    let norm = sum.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::DegenerateChannel("composite channel g + d is zero".into()));
    }
    Ok(sum.into_iter().map(|z| z / norm).collect())
}

/// Cascaded channel `d` with `d^H = h^H Phi H`.
pub fn cascaded_channel(real: &ChannelRealization, phases: &PhaseProfile) -> Vec<C64> {
    let h = &real.h_bs_ris;
    let weights: Vec<C64> = real
        .h_ris_user
        .iter()
        .zip(phases.angles())
        .map(|(hn, &a)| hn.conj() * C64::from_polar(1.0, a))
        .collect();
    (0..h.cols)
        .map(|m| {
            let row_sum: C64 = (0..h.rows).map(|n| weights[n] * h.get(n, m)).sum();
            row_sum.conj()
        })
        .collect()
}

/// `log2(1 + s |(g + d)^H f|^2)` with MRT `f`; zero when the channel vanishes.
pub fn instantaneous_se(real: &ChannelRealization, phases: &PhaseProfile, snr_s: f64) -> f64 {
    let d = cascaded_channel(real, phases);
    let Ok(f) = mrt_beamformer(&real.g_direct, &d) else {
        return 0.0;
    };
    let gain: C64 = real
        .g_direct
        .iter()
        .zip(&d)
        .zip(&f)
        .map(|((g, d), f)| (g + d).conj() * f)
        .sum();
    (1.0 + snr_s * gain.norm_sqr()).log2()
}

/// `eta M |hbar_i^H Phi hbar_B|^2 + c`, the bound's estimate of `E ||d + g||^2`.
pub fn bound_argument(
    coeffs: &DerivedCoefficients,
    phases: &PhaseProfile,
    h_bar_b: &[C64],
    h_bar_i: &[C64],
) -> f64 {
    let s: C64 = h_bar_i
        .iter()
        .zip(h_bar_b)
        .zip(phases.angles())
        .map(|((u, b), &a)| u.conj() * C64::from_polar(1.0, a) * b)
        .sum();
    coeffs.eta * coeffs.m as f64 * s.norm_sqr() + coeffs.c_const
}

/// Jensen upper bound on one user's ergodic SE.
pub fn lemma1_bound(
    coeffs: &DerivedCoefficients,
    phases: &PhaseProfile,
    h_bar_b: &[C64],
    h_bar_i: &[C64],
    snr_s: f64,
) -> f64 {
    (1.0 + snr_s * bound_argument(coeffs, phases, h_bar_b, h_bar_i)).log2()
}

/// One user's contribution to the sum bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTerm {
    pub snr_s: f64,
    /// `eta ||hbar^H Phi Hbar||^2 + c`.
    pub argument: f64,
}

impl BoundTerm {
    pub fn exact(&self) -> f64 {
        (1.0 + self.snr_s * self.argument).log2()
    }

    pub fn high_snr(&self) -> f64 {
        (self.snr_s * self.argument).log2()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumBound {
    pub value: f64,
    /// False when some `s (eta ||.||^2 + c)` falls below [`HIGH_SNR_THRESHOLD`]
    /// while the high-SNR form was requested.
    pub high_snr_valid: bool,
}

/// Sum of per-user bounds, exact or in the high-SNR form.
pub fn sum_se_upper_bound(terms: &[BoundTerm], high_snr: bool) -> SumBound {
    let value = terms
        .iter()
        .map(|t| if high_snr { t.high_snr() } else { t.exact() })
        .sum();
    let high_snr_valid =
        !high_snr || terms.iter().all(|t| t.snr_s * t.argument >= HIGH_SNR_THRESHOLD);
    SumBound {
        value,
        high_snr_valid,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeReport {
    pub se_mc: f64,
    pub se_mc_stderr: f64,
    pub se_ub: f64,
    pub se_ub_highsnr: f64,
    pub num_trials: usize,
}

impl SeReport {
    /// Jensen check at `k` standard errors.
    pub fn jensen_holds(&self, k: f64) -> bool {
        self.se_mc <= self.se_ub + k * self.se_mc_stderr + 1e-12 * self.se_ub.abs()
    }
}

fn check_trials(num_trials: usize) -> Result<()> {
    if num_trials < 2 {
        return Err(Error::invalid(format!("need at least 2 trials, got {num_trials}")));
    }
    Ok(())
}

/// Monte Carlo ergodic SE of one user, alongside its closed-form bounds.
///
/// Trial `t` uses stream `t` of `seed`, so equal seeds give common random
/// numbers across phase profiles and identical results regardless of thread
/// count.
pub fn ergodic_se_mc(
    link: &CascadedLink,
    phases: &PhaseProfile,
    num_trials: usize,
    seed: u64,
) -> Result<SeReport> {
    check_trials(num_trials)?;
    let snr = link.user.snr_s();
    let samples: Vec<f64> = (0..num_trials as u64)
        .into_par_iter()
        .map(|t| {
            let real = link.sample(&mut stream_rng(seed, t));
            instantaneous_se(&real, phases, snr)
        })
        .collect();
    let est = Estimate::from_samples(&samples);
    let coeffs = link.coefficients();
    let arg = bound_argument(&coeffs, phases, &link.los.h_bar_b, &link.los.h_bar_user);
    let term = BoundTerm {
        snr_s: snr,
        argument: arg,
    };
    Ok(SeReport {
        se_mc: est.mean,
        se_mc_stderr: est.stderr,
        se_ub: term.exact(),
        se_ub_highsnr: term.high_snr(),
        num_trials,
    })
}

/// Monte Carlo estimates of the second moments behind the bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMoments {
    /// Estimates of `x1, x2, x3`.
    pub cross_mc: [Estimate; 3],
    pub cross_analytic: CrossTerms,
    /// Estimate of `E ||d + g||^2`.
    pub total_mc: Estimate,
    /// `eta ||hbar^H Phi Hbar||^2 + x1 + x2 + x3 + sigma^2 M`.
    pub total_analytic: f64,
}

impl SecondMoments {
    pub fn all_agree(&self, k: f64) -> bool {
        let a = &self.cross_analytic;
        self.cross_mc[0].agrees_with(a.x1, k)
            && self.cross_mc[1].agrees_with(a.x2, k)
            && self.cross_mc[2].agrees_with(a.x3, k)
            && self.total_mc.agrees_with(self.total_analytic, k)
    }
}

/// Samples of `||lambda htilde^H Phi Htilde||^2`,
/// `||lambda sqrt(K_u) hbar^H Phi Htilde||^2`,
/// `||lambda sqrt(K_B) htilde^H Phi Hbar||^2` and `||d + g||^2`.
fn moment_samples(
    link: &CascadedLink,
    coeffs: &DerivedCoefficients,
    real: &ChannelRealization,
    phases: &PhaseProfile,
    phasors: &[C64],
) -> [f64; 4] {
    let (n, m) = (link.num_ris(), link.num_bs());
    let lam = coeffs.lambda_comp;
    // weights of the row combination w^H Phi X for each user-side vector
    let w_nlos: Vec<C64> = (0..n).map(|k| real.nlos_ris_user[k].conj() * phasors[k]).collect();
    let w_los: Vec<C64> = (0..n)
        .map(|k| link.los.h_bar_user[k].conj() * phasors[k])
        .collect();
    let mut x = [0.0; 3];
    // Hbar = hbar_B a^H, so w^H Phi Hbar = (w^H Phi hbar_B) a^H
    let los_scalar: C64 = (0..n).map(|k| w_nlos[k] * link.los.h_bar_b[k]).sum();
    let a_norm_sq: f64 = link.bs_steering.iter().map(|z| z.norm_sqr()).sum();
    x[2] = (lam * lam * coeffs.k_bs) * los_scalar.norm_sqr() * a_norm_sq;
    for col in 0..m {
        let mut s1 = C64::new(0.0, 0.0);
        let mut s2 = C64::new(0.0, 0.0);
        for k in 0..n {
            let ht = real.nlos_bs_ris.get(k, col);
            s1 += w_nlos[k] * ht;
            s2 += w_los[k] * ht;
        }
        x[0] += lam * lam * s1.norm_sqr();
        x[1] += lam * lam * coeffs.k_user * s2.norm_sqr();
    }
    let d = cascaded_channel(real, phases);
    let total = d
        .iter()
        .zip(&real.g_direct)
        .map(|(a, b)| (a + b).norm_sqr())
        .sum();
    [x[0], x[1], x[2], total]
}

/// Checks the closed-form second moments against `num_trials` realizations.
pub fn second_moments_mc(
    link: &CascadedLink,
    phases: &PhaseProfile,
    num_trials: usize,
    seed: u64,
) -> Result<SecondMoments> {
    check_trials(num_trials)?;
    let coeffs = link.coefficients();
    let phasors = phases.phasors();
    let samples: Vec<[f64; 4]> = (0..num_trials as u64)
        .into_par_iter()
        .map(|t| {
            let real = link.sample(&mut stream_rng(seed, t));
            moment_samples(link, &coeffs, &real, phases, &phasors)
        })
        .collect();
    let column = |i: usize| Estimate::from_samples(&samples.iter().map(|s| s[i]).collect::<Vec<_>>());
    let cross_analytic = appendix_cross_terms(&coeffs);
    let los_part = bound_argument(&coeffs, phases, &link.los.h_bar_b, &link.los.h_bar_user)
        - coeffs.c_const;
    let total_analytic = los_part
        + cross_analytic.total()
        + coeffs.direct_var * coeffs.m as f64;
    Ok(SecondMoments {
        cross_mc: [column(0), column(1), column(2)],
        cross_analytic,
        total_mc: column(3),
        total_analytic,
    })
}
