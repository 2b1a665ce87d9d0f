//! Array geometry: steering vectors (array response vectors) for linear,
//! cylindrical and planar arrays, visible-region masks on the cylinder, and
//! the shared/specific/inactive partition of RIS elements.
//!
//! UCA element ordering is layer-major: element `layer * ring_nr + i` sits in
//! layer `layer` at ring angle `2 pi i / ring_nr`. UPA ordering is row-major.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::{Error, Result, C64};

/// Slack on the `cos >= 0` visibility test so that elements sitting exactly
/// on the boundary (cos = 0 analytically) are not lost to rounding.
const BOUNDARY_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrayKind {
    Ula,
    Uca,
    Upa,
}

/// Geometry of one array panel.
///
/// Only the fields relevant to `kind` are meaningful; constructors set the
/// others to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayDescriptor {
    pub kind: ArrayKind,
    pub num_elements_m: usize,
    pub layers_nc: usize,
    pub ring_nr: usize,
    pub spacing_d: f64,
    pub wavelength: f64,
    pub upa_rows: usize,
    pub upa_cols: usize,
}

impl ArrayDescriptor {
    pub fn ula(m: usize, spacing_d: f64, wavelength: f64) -> Result<Self> {
        let desc = Self {
            kind: ArrayKind::Ula,
            num_elements_m: m,
            layers_nc: 1,
            ring_nr: 1,
            spacing_d,
            wavelength,
            upa_rows: 1,
            upa_cols: 1,
        };
        desc.validate()?;
        Ok(desc)
    }

    pub fn uca(layers_nc: usize, ring_nr: usize, spacing_d: f64, wavelength: f64) -> Result<Self> {
        let desc = Self {
            kind: ArrayKind::Uca,
            num_elements_m: 1,
            layers_nc,
            ring_nr,
            spacing_d,
            wavelength,
            upa_rows: 1,
            upa_cols: 1,
        };
        desc.validate()?;
        Ok(desc)
    }

    pub fn upa(rows: usize, cols: usize, spacing_d: f64, wavelength: f64) -> Result<Self> {
        let desc = Self {
            kind: ArrayKind::Upa,
            num_elements_m: 1,
            layers_nc: 1,
            ring_nr: 1,
            spacing_d,
            wavelength,
            upa_rows: rows,
            upa_cols: cols,
        };
        desc.validate()?;
        Ok(desc)
    }

    /// Planar baseline with half as many elements as `uca`: `layers_nc` rows
    /// by `ring_nr / 2` columns, same spacing and wavelength.
    pub fn upa_baseline_for(uca: &ArrayDescriptor) -> Result<Self> {
        if uca.kind != ArrayKind::Uca {
            return Err(Error::invalid("UPA baseline needs a UCA descriptor"));
        }
        if !uca.ring_nr.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "UPA baseline needs an even ring size, got {}",
                uca.ring_nr
            )));
        }
        Self::upa(uca.layers_nc, uca.ring_nr / 2, uca.spacing_d, uca.wavelength)
    }

    pub fn num_elements(&self) -> usize {
        match self.kind {
            ArrayKind::Ula => self.num_elements_m,
            ArrayKind::Uca => self.layers_nc * self.ring_nr,
            ArrayKind::Upa => self.upa_rows * self.upa_cols,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let counts_ok = match self.kind {
            ArrayKind::Ula => self.num_elements_m >= 1,
            ArrayKind::Uca => self.layers_nc >= 1 && self.ring_nr >= 1,
            ArrayKind::Upa => self.upa_rows >= 1 && self.upa_cols >= 1,
        };
        if !counts_ok {
            return Err(Error::invalid(format!("{:?}: element counts must be >= 1", self.kind)));
        }
        if !(self.spacing_d.is_finite() && self.spacing_d > 0.0) {
            return Err(Error::invalid(format!("spacing must be positive, got {}", self.spacing_d)));
        }
        if !(self.wavelength.is_finite() && self.wavelength > 0.0) {
            return Err(Error::invalid(format!(
                "wavelength must be positive, got {}",
                self.wavelength
            )));
        }
        Ok(())
    }
}

/// Departure/arrival angles of every link, in radians.
///
/// `*_br` is the BS direction seen from the RIS, `aod_bs` the RIS direction
/// seen from the BS array, `*_ru` the UAV and `*_rv` the ground vehicle (ITV)
/// as seen from the RIS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleSet {
    pub azimuth_aoa_br: f64,
    pub elevation_aoa_br: f64,
    pub aod_bs: f64,
    pub azimuth_aod_ru: f64,
    pub elevation_aod_ru: f64,
    pub azimuth_aod_rv: f64,
    pub elevation_aod_rv: f64,
}

impl AngleSet {
    /// Wraps azimuths into `[0, 2pi)` and checks that elevations lie in `[0, pi]`.
    pub fn normalized(self) -> Result<Self> {
        let all = [
            self.azimuth_aoa_br,
            self.elevation_aoa_br,
            self.aod_bs,
            self.azimuth_aod_ru,
            self.elevation_aod_ru,
            self.azimuth_aod_rv,
            self.elevation_aod_rv,
        ];
        if all.iter().any(|a| !a.is_finite()) {
            return Err(Error::invalid("angles must be finite"));
        }
        for el in [self.elevation_aoa_br, self.elevation_aod_ru, self.elevation_aod_rv] {
            if !(0.0..=PI).contains(&el) {
                return Err(Error::invalid(format!("elevation {el} rad outside [0, pi]")));
            }
        }
        Ok(Self {
            azimuth_aoa_br: wrap_angle(self.azimuth_aoa_br),
            azimuth_aod_ru: wrap_angle(self.azimuth_aod_ru),
            azimuth_aod_rv: wrap_angle(self.azimuth_aod_rv),
            ..self
        })
    }
}

/// Wraps an angle into `[0, 2pi)`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Per-element 0/1 activation of the RIS for one transceiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisibilityMask {
    pub bits: Vec<bool>,
}

impl VisibilityMask {
    pub fn all_ones(n: usize) -> Self {
        Self { bits: vec![true; n] }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn count_active(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Inner product of two 0/1 masks (size of the common visible region).
    pub fn overlap(&self, other: &VisibilityMask) -> usize {
        self.bits.iter().zip(&other.bits).filter(|(a, b)| **a && **b).count()
    }

    /// Zeroes the entries of `v` that are masked off.
    pub fn apply(&self, v: &mut [C64]) {
        for (x, &on) in v.iter_mut().zip(&self.bits) {
            if !on {
                *x = C64::new(0.0, 0.0);
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementRole {
    UavSpecific,
    ItvSpecific,
    Shared,
    Inactive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementClassification {
    pub labels: Vec<ElementRole>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RoleCounts {
    pub shared: usize,
    pub uav_specific: usize,
    pub itv_specific: usize,
    pub inactive: usize,
}

impl ElementClassification {
    pub fn indices_of(&self, role: ElementRole) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, r)| **r == role)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn counts(&self) -> RoleCounts {
        let mut c = RoleCounts::default();
        for r in &self.labels {
            match r {
                ElementRole::Shared => c.shared += 1,
                ElementRole::UavSpecific => c.uav_specific += 1,
                ElementRole::ItvSpecific => c.itv_specific += 1,
                ElementRole::Inactive => c.inactive += 1,
            }
        }
        c
    }
}

/// Steering vector of an `m`-element ULA:
/// entry `k` is `exp(j 2 pi d k cos(theta) / lambda)`.
pub fn ula_arv(m: usize, theta: f64, spacing_d: f64, wavelength: f64) -> Result<Vec<C64>> {
    if !theta.is_finite() {
        return Err(Error::invalid(format!("non-finite angle {theta}")));
    }
    if m == 0 {
        return Err(Error::invalid("ULA needs at least one element"));
    }
    if !(spacing_d > 0.0 && wavelength > 0.0) {
        return Err(Error::invalid("spacing and wavelength must be positive"));
    }
    let step = TAU * spacing_d * theta.cos() / wavelength;
    Ok((0..m).map(|k| C64::from_polar(1.0, step * k as f64)).collect())
}

/// Ring radius term `pi d sin(theta) / (2 lambda sin(pi / N_r))`.
pub fn uca_mu(desc: &ArrayDescriptor, theta: f64) -> f64 {
    PI * desc.spacing_d * theta.sin() / (2.0 * desc.wavelength * (PI / desc.ring_nr as f64).sin())
}

/// Steering vector of a cylindrical array: the layer ULA (elevation term)
/// Kronecker the ring vector `exp(j mu cos(phi - 2 pi i / N_r))`.
pub fn uca_arv(desc: &ArrayDescriptor, phi: f64, theta: f64) -> Result<Vec<C64>> {
    if desc.kind != ArrayKind::Uca {
        return Err(Error::invalid("uca_arv needs a UCA descriptor"));
    }
    desc.validate()?;
    if desc.ring_nr < 2 {
        return Err(Error::invalid("UCA ring needs at least two elements"));
    }
    if !phi.is_finite() {
        return Err(Error::invalid(format!("non-finite angle {phi}")));
    }
    let layer = ula_arv(desc.layers_nc, theta, desc.spacing_d, desc.wavelength)?;
    let mu = uca_mu(desc, theta);
    let nr = desc.ring_nr;
    let ring: Vec<C64> = (0..nr)
        .map(|i| {
            let omega = TAU * i as f64 / nr as f64;
            C64::from_polar(1.0, mu * (phi - omega).cos())
        })
        .collect();
    Ok(kron(&layer, &ring))
}

/// Steering vector of a planar array standing in the x-z plane (broadside
/// along +y, i.e. azimuth pi/2 at elevation pi/2). Rows stack vertically and
/// carry the `cos(theta)` term; columns run horizontally and carry
/// `sin(theta) cos(phi)`. Phase reference is element (0, 0).
pub fn upa_arv(desc: &ArrayDescriptor, phi: f64, theta: f64) -> Result<Vec<C64>> {
    if desc.kind != ArrayKind::Upa {
        return Err(Error::invalid("upa_arv needs a UPA descriptor"));
    }
    desc.validate()?;
    if !phi.is_finite() || !theta.is_finite() {
        return Err(Error::invalid("non-finite angle"));
    }
    let rows = ula_arv(desc.upa_rows, theta, desc.spacing_d, desc.wavelength)?;
    let col_step = TAU * desc.spacing_d * theta.sin() * phi.cos() / desc.wavelength;
    let cols: Vec<C64> = (0..desc.upa_cols)
        .map(|c| C64::from_polar(1.0, col_step * c as f64))
        .collect();
    Ok(kron(&rows, &cols))
}

/// Steering vector for whichever array kind `desc` describes. ULAs ignore `phi`.
pub fn array_response(desc: &ArrayDescriptor, phi: f64, theta: f64) -> Result<Vec<C64>> {
    match desc.kind {
        ArrayKind::Ula => ula_arv(desc.num_elements_m, theta, desc.spacing_d, desc.wavelength),
        ArrayKind::Uca => uca_arv(desc, phi, theta),
        ArrayKind::Upa => upa_arv(desc, phi, theta),
    }
}

/// Visible region of a transceiver at azimuth `phi`.
///
/// On the cylinder, ring element `i` is visible iff `cos(phi - 2 pi i / N_r) >= 0`
/// (boundary elements count as visible), replicated over every layer. Planar
/// and linear arrays are fully visible.
pub fn visibility_mask(desc: &ArrayDescriptor, phi: f64) -> VisibilityMask {
    if desc.kind != ArrayKind::Uca {
        return VisibilityMask::all_ones(desc.num_elements());
    }
    let nr = desc.ring_nr;
    let ring: Vec<bool> = (0..nr)
        .map(|i| {
            let omega = TAU * i as f64 / nr as f64;
            // angular distance in [0, pi]; cos >= 0 <=> distance <= pi/2
            let diff = wrap_angle(phi - omega);
            let dist = diff.min(TAU - diff);
            dist <= FRAC_PI_2 + BOUNDARY_SLACK
        })
        .collect();
    let bits = (0..desc.layers_nc).flat_map(|_| ring.iter().copied()).collect();
    VisibilityMask { bits }
}

/// Partitions elements by which of the BS/UAV/ITV regions they lie in.
pub fn classify_elements(
    mask_bs: &VisibilityMask,
    mask_uav: &VisibilityMask,
    mask_itv: &VisibilityMask,
) -> Result<ElementClassification> {
    if mask_bs.len() != mask_uav.len() || mask_bs.len() != mask_itv.len() {
        return Err(Error::invalid(format!(
            "mask lengths differ: {}, {}, {}",
            mask_bs.len(),
            mask_uav.len(),
            mask_itv.len()
        )));
    }
    let labels = mask_bs
        .bits
        .iter()
        .zip(&mask_uav.bits)
        .zip(&mask_itv.bits)
        .map(|((&b, &u), &v)| match (b, u, v) {
            (true, true, true) => ElementRole::Shared,
            (true, true, false) => ElementRole::UavSpecific,
            (true, false, true) => ElementRole::ItvSpecific,
            _ => ElementRole::Inactive,
        })
        .collect();
    Ok(ElementClassification { labels })
}

pub(crate) fn kron(outer: &[C64], inner: &[C64]) -> Vec<C64> {
    outer.iter().flat_map(|&a| inner.iter().map(move |&b| a * b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn assert_cvec_eq(got: &[C64], want: &[C64], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).norm() < tol, "got {g}, want {w}");
        }
    }

    fn ring_bits(mask: &VisibilityMask) -> Vec<u8> {
        mask.bits.iter().map(|&b| b as u8).collect()
    }

    #[test]
    fn ula_examples() {
        assert_cvec_eq(&ula_arv(1, 0.3, 0.5, 1.0).unwrap(), &[C64::new(1.0, 0.0)], 1e-15);
        let one = C64::new(1.0, 0.0);
        assert_cvec_eq(&ula_arv(3, FRAC_PI_2, 0.7, 1.0).unwrap(), &[one; 3], 1e-12);
        assert_cvec_eq(&ula_arv(2, 0.0, 0.5, 1.0).unwrap(), &[one, -one], 1e-12);
    }

    #[test]
    fn ula_rejects_bad_input() {
        assert!(ula_arv(4, f64::NAN, 0.5, 1.0).is_err());
        assert!(ula_arv(4, f64::INFINITY, 0.5, 1.0).is_err());
        assert!(ula_arv(0, 0.0, 0.5, 1.0).is_err());
        assert!(ula_arv(2, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn uca_zero_elevation_has_flat_ring() {
        let desc = ArrayDescriptor::uca(2, 8, 0.5, 1.0).unwrap();
        let v = uca_arv(&desc, 1.234, 0.0).unwrap();
        // layer factor is exp(j pi k) at theta = 0, ring factor all ones
        for (idx, x) in v.iter().enumerate() {
            let layer = idx / 8;
            let want = if layer == 0 { 1.0 } else { -1.0 };
            assert_abs_diff_eq!(x.re, want, epsilon = 1e-12);
            assert_abs_diff_eq!(x.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn uca_four_element_ring() {
        // mu = pi / (4 sin(pi/4)) = 1.1107207345395915
        let mu = 1.110_720_734_539_591_5;
        let desc = ArrayDescriptor::uca(1, 4, 0.5, 1.0).unwrap();
        assert_abs_diff_eq!(uca_mu(&desc, FRAC_PI_2), mu, epsilon = 1e-13);
        let v = uca_arv(&desc, 0.0, FRAC_PI_2).unwrap();
        let want = [
            C64::from_polar(1.0, mu),
            C64::new(1.0, 0.0),
            C64::from_polar(1.0, -mu),
            C64::new(1.0, 0.0),
        ];
        assert_cvec_eq(&v, &want, 1e-12);
    }

    #[test]
    fn uca_layers_repeat_ring_at_horizon() {
        let one = ArrayDescriptor::uca(1, 6, 0.5, 1.0).unwrap();
        let two = ArrayDescriptor::uca(2, 6, 0.5, 1.0).unwrap();
        let ring = uca_arv(&one, 0.4, FRAC_PI_2).unwrap();
        let full = uca_arv(&two, 0.4, FRAC_PI_2).unwrap();
        assert_cvec_eq(&full[..6], &ring, 1e-12);
        assert_cvec_eq(&full[6..], &ring, 1e-12);
    }

    #[test]
    fn uca_rejects_degenerate_ring() {
        let desc = ArrayDescriptor::uca(2, 1, 0.5, 1.0).unwrap();
        assert!(uca_arv(&desc, 0.0, 1.0).is_err());
        let upa = ArrayDescriptor::upa(2, 2, 0.5, 1.0).unwrap();
        assert!(uca_arv(&upa, 0.0, 1.0).is_err());
    }

    #[test]
    fn upa_examples() {
        let single = ArrayDescriptor::upa(1, 1, 0.5, 1.0).unwrap();
        assert_cvec_eq(&upa_arv(&single, 0.3, 0.2).unwrap(), &[C64::new(1.0, 0.0)], 1e-15);

        let panel = ArrayDescriptor::upa(3, 4, 0.5, 1.0).unwrap();
        let v = upa_arv(&panel, FRAC_PI_2, FRAC_PI_2).unwrap();
        assert_cvec_eq(&v, &[C64::new(1.0, 0.0); 12], 1e-12);
    }

    #[test]
    fn upa_matches_element_coordinates() {
        // Oracle: element (r, c) at (c d, 0, r d), phase 2 pi / lambda * <pos, u>
        // with u the unit direction (sin t cos p, sin t sin p, cos t).
        let check = |rows: usize, cols: usize, d: f64, phi: f64, theta: f64| {
            let desc = ArrayDescriptor::upa(rows, cols, d, 1.0).unwrap();
            let v = upa_arv(&desc, phi, theta).unwrap();
            let u = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            for r in 0..rows {
                for c in 0..cols {
                    let pos = [c as f64 * d, 0.0, r as f64 * d];
                    let dot: f64 = pos.iter().zip(&u).map(|(a, b)| a * b).sum();
                    let want = C64::from_polar(1.0, TAU * dot);
                    assert!((v[r * cols + c] - want).norm() < 1e-12);
                }
            }
        };
        check(2, 2, 0.5, 0.0, FRAC_PI_2);
        check(3, 5, 0.5, 0.7, 1.1);
        check(4, 2, 0.3, 2.5, 0.4);

        // explicit 2x2 broadside-in-elevation values: [1, -1, 1, -1]
        let desc = ArrayDescriptor::upa(2, 2, 0.5, 1.0).unwrap();
        let v = upa_arv(&desc, 0.0, FRAC_PI_2).unwrap();
        let (p, m) = (C64::new(1.0, 0.0), C64::new(-1.0, 0.0));
        assert_cvec_eq(&v, &[p, m, p, m], 1e-12);
    }

    #[test]
    fn mask_examples() {
        let d4 = ArrayDescriptor::uca(1, 4, 0.5, 1.0).unwrap();
        assert_eq!(ring_bits(&visibility_mask(&d4, 0.0)), vec![1, 1, 0, 1]);
        let d8 = ArrayDescriptor::uca(1, 8, 0.5, 1.0).unwrap();
        assert_eq!(ring_bits(&visibility_mask(&d8, 0.0)), vec![1, 1, 1, 0, 0, 0, 1, 1]);
        let d4x2 = ArrayDescriptor::uca(2, 4, 0.5, 1.0).unwrap();
        assert_eq!(ring_bits(&visibility_mask(&d4x2, 0.0)), vec![1, 1, 0, 1, 1, 1, 0, 1]);
        let upa = ArrayDescriptor::upa(2, 3, 0.5, 1.0).unwrap();
        assert_eq!(visibility_mask(&upa, 2.0).count_active(), 6);
    }

    #[test]
    fn classification_examples() {
        let m = |v: &[u8]| VisibilityMask { bits: v.iter().map(|&b| b == 1).collect() };
        let c = classify_elements(&m(&[1, 1, 0, 1]), &m(&[1, 0, 1, 1]), &m(&[0, 1, 1, 1])).unwrap();
        use ElementRole::*;
        assert_eq!(c.labels, vec![UavSpecific, ItvSpecific, Inactive, Shared]);

        let ones = m(&[1; 5]);
        let c = classify_elements(&ones, &ones, &ones).unwrap();
        assert!(c.labels.iter().all(|&r| r == Shared));

        let c = classify_elements(&m(&[0; 5]), &ones, &ones).unwrap();
        assert!(c.labels.iter().all(|&r| r == Inactive));
        assert_eq!(c.counts().inactive, 5);

        assert!(classify_elements(&m(&[1, 1]), &ones, &ones).is_err());
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(-1e-300), 0.0);
        assert_abs_diff_eq!(wrap_angle(-FRAC_PI_2), 1.5 * PI, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_angle(TAU + 0.25), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn angle_set_normalization() {
        let a = AngleSet {
            azimuth_aoa_br: -0.5,
            elevation_aoa_br: 1.0,
            aod_bs: 1.0,
            azimuth_aod_ru: 7.0,
            elevation_aod_ru: 0.3,
            azimuth_aod_rv: 1.0,
            elevation_aod_rv: PI,
        };
        let n = a.normalized().unwrap();
        assert!((0.0..TAU).contains(&n.azimuth_aoa_br));
        assert_abs_diff_eq!(n.azimuth_aod_ru, 7.0 - TAU, epsilon = 1e-12);
        let bad = AngleSet { elevation_aod_ru: -0.1, ..a };
        assert!(bad.normalized().is_err());
    }

    proptest! {
        #[test]
        fn arv_entries_unit_modulus(
            nc in 1usize..5, nr in 2usize..40, phi in -10.0f64..10.0, theta in 0.0f64..PI,
            d in 0.05f64..2.0,
        ) {
            let desc = ArrayDescriptor::uca(nc, nr, d, 1.0).unwrap();
            for x in uca_arv(&desc, phi, theta).unwrap() {
                prop_assert!((x.norm() - 1.0).abs() < 1e-12);
            }
            let upa = ArrayDescriptor::upa(nc, nr, d, 1.0).unwrap();
            for x in upa_arv(&upa, phi, theta).unwrap() {
                prop_assert!((x.norm() - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn mask_covers_about_half_ring(nr in 2usize..200, phi in -10.0f64..10.0) {
            let desc = ArrayDescriptor::uca(1, nr, 0.5, 1.0).unwrap();
            let active = visibility_mask(&desc, phi).count_active();
            prop_assert!(active >= nr / 2 && active <= nr / 2 + 2, "nr={} active={}", nr, active);
        }

        #[test]
        fn mask_rotates_with_azimuth(nr in 2usize..100, phi in 0.0f64..TAU) {
            let desc = ArrayDescriptor::uca(2, nr, 0.5, 1.0).unwrap();
            let base = visibility_mask(&desc, phi);
            let rotated = visibility_mask(&desc, phi + TAU / nr as f64);
            for layer in 0..2 {
                for i in 0..nr {
                    prop_assert_eq!(
                        rotated.bits[layer * nr + (i + 1) % nr],
                        base.bits[layer * nr + i]
                    );
                }
            }
        }

        #[test]
        fn shared_only_where_all_masks_visible(
            nr in 2usize..64, pb in 0.0f64..TAU, pu in 0.0f64..TAU, pv in 0.0f64..TAU,
        ) {
            let desc = ArrayDescriptor::uca(2, nr, 0.5, 1.0).unwrap();
            let (b, u, v) = (
                visibility_mask(&desc, pb),
                visibility_mask(&desc, pu),
                visibility_mask(&desc, pv),
            );
            let c = classify_elements(&b, &u, &v).unwrap();
            let counts = c.counts();
            prop_assert_eq!(
                counts.shared + counts.uav_specific + counts.itv_specific + counts.inactive,
                2 * nr
            );
            for (i, r) in c.labels.iter().enumerate() {
                if *r == ElementRole::Shared {
                    prop_assert!(b.bits[i] && u.bits[i] && v.bits[i]);
                }
            }
        }
    }

    #[test]
    fn wide_user_separation_empties_shared_set() {
        // users at +/- 100 degrees around the BS arc, separation 200 degrees
        let nr = 32;
        let desc = ArrayDescriptor::uca(2, nr, 0.5, 1.0).unwrap();
        let deg = PI / 180.0;
        let c = classify_elements(
            &visibility_mask(&desc, 0.0),
            &visibility_mask(&desc, 100.0 * deg),
            &visibility_mask(&desc, -100.0 * deg),
        )
        .unwrap();
        assert_eq!(c.counts().shared, 0);
        assert!(c.counts().uav_specific > 0);
    }
}
