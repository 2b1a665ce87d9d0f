//! Statistical channel state for the BS-RIS-user cascade.
//!
//! Each link is Rician: a deterministic line-of-sight part fixed by the
//! angles, plus Rayleigh scattering restricted to the visible region. The
//! BS-user direct path is pure Rayleigh. Closed-form second moments of the
//! cascade live in [`DerivedCoefficients`] and [`appendix_cross_terms`].

use std::f64::consts::FRAC_1_SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::geometry::{
    array_response, visibility_mask, ArrayDescriptor, ArrayKind, VisibilityMask,
};
use crate::{Error, Result, C64};

/// Whether the scattered components are present. `LosOnly` is the
/// infinite-Rician-factor limit: LoS amplitude `sqrt(beta)`, no scattering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fading {
    #[default]
    Rician,
    LosOnly,
}

/// Long-term statistics of one link, all in linear units.
///
/// For the BS-RIS link only `rician_k` and `pathloss_beta` are used.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkStats {
    pub rician_k: f64,
    pub pathloss_beta: f64,
    /// Variance of each direct-path coefficient per BS antenna.
    pub direct_var: f64,
    /// Transmit power (mW).
    pub tx_power: f64,
    /// Receiver noise variance (mW).
    pub noise_var: f64,
}

impl LinkStats {
    /// Transmit SNR `p / delta^2`.
    pub fn snr_s(&self) -> f64 {
        self.tx_power / self.noise_var
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rician_k", self.rician_k),
            ("pathloss_beta", self.pathloss_beta),
            ("direct_var", self.direct_var),
            ("tx_power", self.tx_power),
            ("noise_var", self.noise_var),
        ];
        for (name, v) in fields {
            if v.is_nan() || v < 0.0 {
                return Err(Error::invalid(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// `K / (K + 1)`, the LoS power fraction (1 in the LoS-only limit).
fn los_fraction(k: f64, fading: Fading) -> f64 {
    match fading {
        Fading::LosOnly => 1.0,
        Fading::Rician => k / (k + 1.0),
    }
}

/// `1 / (K + 1)`, the scattered power fraction.
fn nlos_fraction(k: f64, fading: Fading) -> f64 {
    match fading {
        Fading::LosOnly => 0.0,
        Fading::Rician => 1.0 / (k + 1.0),
    }
}

/// Closed-form coefficients of the ergodic-SE bound for one BS-RIS-user cascade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedCoefficients {
    /// Weight of the coherent LoS term.
    pub eta: f64,
    /// Scattered-power weight per overlapping element and antenna.
    pub chi: f64,
    /// Phase-independent part of `E ||d + g||^2`: `chi M overlap + sigma^2 M`.
    pub c_const: f64,
    /// `sqrt(beta_B beta_i / ((K_B + 1)(K_i + 1)))`.
    pub lambda_comp: f64,
    /// Number of elements visible to both the BS and the user.
    pub vr_overlap: usize,
    pub m: usize,
    pub k_bs: f64,
    pub k_user: f64,
    pub direct_var: f64,
}

pub fn derive_coefficients(
    bs: &LinkStats,
    user: &LinkStats,
    m: usize,
    vr_overlap: usize,
    fading: Fading,
) -> DerivedCoefficients {
    let beta = bs.pathloss_beta * user.pathloss_beta;
    let (kb, ki) = (bs.rician_k, user.rician_k);
    let eta = beta * los_fraction(kb, fading) * los_fraction(ki, fading);
    let chi = match fading {
        Fading::LosOnly => 0.0,
        Fading::Rician => beta * (kb + ki + 1.0) / ((kb + 1.0) * (ki + 1.0)),
    };
    let lambda_sq = beta * nlos_fraction(kb, fading) * nlos_fraction(ki, fading);
    let m_f = m as f64;
    DerivedCoefficients {
        eta,
        chi,
        c_const: chi * m_f * vr_overlap as f64 + user.direct_var * m_f,
        lambda_comp: lambda_sq.sqrt(),
        vr_overlap,
        m,
        k_bs: kb,
        k_user: ki,
        direct_var: user.direct_var,
    }
}

/// The three scattered contributions to `E ||d||^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossTerms {
    /// Scattered x scattered.
    pub x1: f64,
    /// LoS user link x scattered BS link.
    pub x2: f64,
    /// Scattered user link x LoS BS link.
    pub x3: f64,
}

impl CrossTerms {
    pub fn total(&self) -> f64 {
        self.x1 + self.x2 + self.x3
    }
}

pub fn appendix_cross_terms(coeffs: &DerivedCoefficients) -> CrossTerms {
    let base = coeffs.lambda_comp.powi(2) * coeffs.m as f64 * coeffs.vr_overlap as f64;
    CrossTerms {
        x1: base,
        x2: base * coeffs.k_user,
        x3: base * coeffs.k_bs,
    }
}

/// Masked LoS vectors of the cascade: `hbar_B = c_N(bs) . r_N(bs)` and the
/// same for the user. On planar arrays the masks are all ones.
#[derive(Debug, Clone, PartialEq)]
pub struct LosVectors {
    pub h_bar_b: Vec<C64>,
    pub h_bar_user: Vec<C64>,
    pub mask_bs: VisibilityMask,
    pub mask_user: VisibilityMask,
}

pub fn los_cascaded_vectors(
    ris: &ArrayDescriptor,
    bs_azimuth: f64,
    bs_elevation: f64,
    user_azimuth: f64,
    user_elevation: f64,
) -> Result<LosVectors> {
    if ris.kind == ArrayKind::Ula {
        return Err(Error::invalid("RIS must be a UCA or UPA"));
    }
    let mask_bs = visibility_mask(ris, bs_azimuth);
    let mask_user = visibility_mask(ris, user_azimuth);
    let mut h_bar_b = array_response(ris, bs_azimuth, bs_elevation)?;
    let mut h_bar_user = array_response(ris, user_azimuth, user_elevation)?;
    mask_bs.apply(&mut h_bar_b);
    mask_user.apply(&mut h_bar_user);
    Ok(LosVectors {
        h_bar_b,
        h_bar_user,
        mask_bs,
        mask_user,
    })
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
}

/// One draw of every channel seen by a single user.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// BS-RIS channel `H`, N x M.
    pub h_bs_ris: CMatrix,
    /// RIS-user channel `h`, length N.
    pub h_ris_user: Vec<C64>,
    /// BS-user direct channel `g`, length M.
    pub g_direct: Vec<C64>,
    /// Unit-variance masked scattering of `H` before scaling.
    pub nlos_bs_ris: CMatrix,
    /// Unit-variance masked scattering of `h` before scaling.
    pub nlos_ris_user: Vec<C64>,
}

/// Everything needed to evaluate or sample one user's cascaded link.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadedLink {
    pub bs: LinkStats,
    pub user: LinkStats,
    pub fading: Fading,
    pub los: LosVectors,
    /// BS array steering vector toward the RIS, length M.
    pub bs_steering: Vec<C64>,
}

impl CascadedLink {
    pub fn num_ris(&self) -> usize {
        self.los.h_bar_b.len()
    }

    pub fn num_bs(&self) -> usize {
        self.bs_steering.len()
    }

    pub fn vr_overlap(&self) -> usize {
        self.los.mask_bs.overlap(&self.los.mask_user)
    }

    pub fn coefficients(&self) -> DerivedCoefficients {
        derive_coefficients(&self.bs, &self.user, self.num_bs(), self.vr_overlap(), self.fading)
    }

    /// `rho = conj(hbar_user) . hbar_B`, the per-element coherent gain.
    pub fn rho(&self) -> Vec<C64> {
        self.los
            .h_bar_user
            .iter()
            .zip(&self.los.h_bar_b)
            .map(|(u, b)| u.conj() * b)
            .collect()
    }

    /// Draws a realization. The random stream is consumed in a fixed order
    /// (BS-RIS scattering row-major, RIS-user scattering, direct path) that
    /// does not depend on masks, statistics or fading mode.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ChannelRealization {
        let (n, m) = (self.num_ris(), self.num_bs());

        let mut nlos_bs_ris = CMatrix::zeros(n, m);
        for r in 0..n {
            let on = self.los.mask_bs.bits[r];
            for c in 0..m {
                let z = complex_normal(rng);
                if on {
                    nlos_bs_ris.data[r * m + c] = z;
                }
            }
        }
        let nlos_ris_user: Vec<C64> = (0..n)
            .map(|r| {
                let z = complex_normal(rng);
                if self.los.mask_user.bits[r] {
                    z
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        let g_scale = self.user.direct_var.sqrt();
        let g_direct: Vec<C64> = (0..m).map(|_| complex_normal(rng) * g_scale).collect();

        let (kb, ku) = (self.bs.rician_k, self.user.rician_k);
        let b_los = (self.bs.pathloss_beta * los_fraction(kb, self.fading)).sqrt();
        let b_nlos = (self.bs.pathloss_beta * nlos_fraction(kb, self.fading)).sqrt();
        let u_los = (self.user.pathloss_beta * los_fraction(ku, self.fading)).sqrt();
        let u_nlos = (self.user.pathloss_beta * nlos_fraction(ku, self.fading)).sqrt();

        let mut h_bs_ris = CMatrix::zeros(n, m);
        for r in 0..n {
            let hb = self.los.h_bar_b[r];
            for c in 0..m {
                let los = hb * self.bs_steering[c].conj();
                h_bs_ris.data[r * m + c] = los * b_los + nlos_bs_ris.get(r, c) * b_nlos;
            }
        }
        let h_ris_user = self
            .los
            .h_bar_user
            .iter()
            .zip(&nlos_ris_user)
            .map(|(l, s)| l * u_los + s * u_nlos)
            .collect();

        ChannelRealization {
            h_bs_ris,
            h_ris_user,
            g_direct,
            nlos_bs_ris,
            nlos_ris_user,
        }
    }
}

/// Circularly symmetric unit-variance complex Gaussian.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * FRAC_1_SQRT_2
}

/// Deterministic generator for sub-stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws realization number `stream` of `link` under `seed`.
pub fn sample_realization(link: &CascadedLink, seed: u64, stream: u64) -> ChannelRealization {
    link.sample(&mut stream_rng(seed, stream))
}
