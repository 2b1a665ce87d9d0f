//! A two-user deployment in internal units (radians, linear power).

use crate::channel::{los_cascaded_vectors, CascadedLink, Fading, LinkStats};
use crate::geometry::{
    classify_elements, ula_arv, visibility_mask, wrap_angle, AngleSet, ArrayDescriptor,
    ArrayKind, ElementClassification,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum User {
    Uav,
    Itv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Architecture {
    /// Cylindrical RIS with visible regions.
    Uca,
    /// Planar RIS with half the elements, fully visible to everyone.
    Upa,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Cylindrical RIS.
    pub ris: ArrayDescriptor,
    /// Planar baseline RIS.
    pub upa: ArrayDescriptor,
    /// BS array (ULA with M antennas).
    pub bs_array: ArrayDescriptor,
    pub angles: AngleSet,
    /// BS-RIS link (only K and beta are used).
    pub bs_link: LinkStats,
    pub uav: LinkStats,
    pub itv: LinkStats,
    pub fading: Fading,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.ris.kind != ArrayKind::Uca {
            return Err(Error::invalid("scenario RIS must be a UCA"));
        }
        if self.upa.kind != ArrayKind::Upa {
            return Err(Error::invalid("scenario baseline must be a UPA"));
        }
        if self.bs_array.kind != ArrayKind::Ula {
            return Err(Error::invalid("BS array must be a ULA"));
        }
        self.ris.validate()?;
        self.upa.validate()?;
        self.bs_array.validate()?;
        if self.ris.ring_nr < 2 {
            return Err(Error::invalid("UCA ring needs at least two elements"));
        }
        if 2 * self.upa.num_elements() != self.ris.num_elements() {
            return Err(Error::invalid(format!(
                "UPA must have half the UCA elements: {} vs {}",
                self.upa.num_elements(),
                self.ris.num_elements()
            )));
        }
        for s in [&self.bs_link, &self.uav, &self.itv] {
            s.validate()?;
        }
        self.angles.normalized()?;
        Ok(())
    }

    pub fn user_stats(&self, user: User) -> &LinkStats {
        match user {
            User::Uav => &self.uav,
            User::Itv => &self.itv,
        }
    }

    fn user_angles(&self, user: User) -> (f64, f64) {
        match user {
            User::Uav => (self.angles.azimuth_aod_ru, self.angles.elevation_aod_ru),
            User::Itv => (self.angles.azimuth_aod_rv, self.angles.elevation_aod_rv),
        }
    }

    pub fn ris_for(&self, arch: Architecture) -> &ArrayDescriptor {
        match arch {
            Architecture::Uca => &self.ris,
            Architecture::Upa => &self.upa,
        }
    }

    /// Cascaded link of `user` through the chosen RIS.
    pub fn link(&self, arch: Architecture, user: User) -> Result<CascadedLink> {
        let (az, el) = self.user_angles(user);
        let los = los_cascaded_vectors(
            self.ris_for(arch),
            self.angles.azimuth_aoa_br,
            self.angles.elevation_aoa_br,
            az,
            el,
        )?;
        let bs_steering = ula_arv(
            self.bs_array.num_elements_m,
            self.angles.aod_bs,
            self.bs_array.spacing_d,
            self.bs_array.wavelength,
        )?;
        Ok(CascadedLink {
            bs: self.bs_link,
            user: *self.user_stats(user),
            fading: self.fading,
            los,
            bs_steering,
        })
    }

    /// Element roles on the chosen RIS. Every UPA element is shared.
    pub fn classification(&self, arch: Architecture) -> ElementClassification {
        let ris = self.ris_for(arch);
        let b = visibility_mask(ris, self.angles.azimuth_aoa_br);
        let u = visibility_mask(ris, self.angles.azimuth_aod_ru);
        let v = visibility_mask(ris, self.angles.azimuth_aod_rv);
        classify_elements(&b, &u, &v).expect("masks of one array have equal length")
    }

    /// Places the UAV at azimuth `uav_azimuth` and the ITV at its mirror image
    /// about the BS azimuth.
    pub fn with_symmetric_users(&self, uav_azimuth: f64) -> Scenario {
        let bs = self.angles.azimuth_aoa_br;
        let mut next = self.clone();
        next.angles.azimuth_aod_ru = wrap_angle(uav_azimuth);
        next.angles.azimuth_aod_rv = wrap_angle(2.0 * bs - uav_azimuth);
        next
    }

    /// Same deployment with `ring_nr` elements per ring; the UPA baseline is
    /// resized to `layers x ring_nr / 2`.
    pub fn with_ring_size(&self, ring_nr: usize) -> Result<Scenario> {
        let mut next = self.clone();
        next.ris = ArrayDescriptor::uca(self.ris.layers_nc, ring_nr, self.ris.spacing_d, self.ris.wavelength)?;
        next.upa = ArrayDescriptor::upa_baseline_for(&next.ris)?;
        next.validate()?;
        Ok(next)
    }

    /// Same deployment with `layers_nc` layers.
    pub fn with_layers(&self, layers_nc: usize) -> Result<Scenario> {
        let mut next = self.clone();
        next.ris = ArrayDescriptor::uca(layers_nc, self.ris.ring_nr, self.ris.spacing_d, self.ris.wavelength)?;
        next.upa = ArrayDescriptor::upa_baseline_for(&next.ris)?;
        next.validate()?;
        Ok(next)
    }
}
