//! Flat `key = value` scenario files.
//!
//! One assignment per line; `#` starts a comment. Values are plain numbers in
//! the unit named by the key suffix (`_deg`, `_db`, `_dbm`, `_m`). Lists take
//! the syntax of [`super::lists`]. Missing keys keep their defaults.

use std::collections::HashSet;
use std::path::Path;

use super::lists::{format_list, parse_f64_list, parse_usize_list};
use crate::channel::{Fading, LinkStats};
use crate::geometry::{AngleSet, ArrayDescriptor};
use crate::optimizer::OptimizerOptions;
use crate::scenario::Scenario;
use crate::{Error, Result};

trait ConfigValue: Sized {
    fn parse_value(s: &str) -> std::result::Result<Self, String>;
    fn emit_value(&self) -> String;
}

impl ConfigValue for f64 {
    fn parse_value(s: &str) -> std::result::Result<Self, String> {
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            Ok(_) => Err(format!("{s:?} is not finite")),
            Err(_) => Err(format!("{s:?} is not a number")),
        }
    }
    fn emit_value(&self) -> String {
        self.to_string()
    }
}

impl ConfigValue for usize {
    fn parse_value(s: &str) -> std::result::Result<Self, String> {
        s.parse().map_err(|_| format!("{s:?} is not a non-negative integer"))
    }
    fn emit_value(&self) -> String {
        self.to_string()
    }
}

impl ConfigValue for u64 {
    fn parse_value(s: &str) -> std::result::Result<Self, String> {
        s.parse().map_err(|_| format!("{s:?} is not a non-negative integer"))
    }
    fn emit_value(&self) -> String {
        self.to_string()
    }
}

impl ConfigValue for bool {
    fn parse_value(s: &str) -> std::result::Result<Self, String> {
        match s {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(format!("{s:?} is not true/false")),
        }
    }
    fn emit_value(&self) -> String {
        self.to_string()
    }
}

impl ConfigValue for Vec<f64> {
    fn parse_value(s: &str) -> std::result::Result<Self, String> {
        parse_f64_list(s)
    }
    fn emit_value(&self) -> String {
        format_list(self)
    }
}

impl ConfigValue for Vec<usize> {
    fn parse_value(s: &str) -> std::result::Result<Self, String> {
        parse_usize_list(s)
    }
    fn emit_value(&self) -> String {
        format_list(self)
    }
}

macro_rules! config_fields {
    ($( $(#[doc = $doc:literal])* $name:ident : $ty:ty = $default:expr, )*) => {
        /// Scenario file contents in file units (degrees, dB, dBm, meters).
        #[derive(Debug, Clone, PartialEq)]
        pub struct ScenarioConfig {
            $( $(#[doc = $doc])* pub $name: $ty, )*
        }

        impl Default for ScenarioConfig {
            fn default() -> Self {
                Self { $( $name: $default, )* }
            }
        }

        impl ScenarioConfig {
            /// All recognized keys in file order.
            pub const KEYS: &'static [&'static str] = &[$( stringify!($name), )*];

            fn set(&mut self, key: &str, value: &str) -> Option<std::result::Result<(), String>> {
                match key {
                    $( stringify!($name) => Some(<$ty>::parse_value(value).map(|v| self.$name = v)), )*
                    _ => None,
                }
            }

            fn entries(&self) -> Vec<(&'static str, String)> {
                vec![$( (stringify!($name), self.$name.emit_value()), )*]
            }
        }
    };
}

config_fields! {
    /// BS antennas (M).
    bs_antennas: usize = 16,
    /// UCA layers.
    ris_layers: usize = 4,
    /// UCA elements per ring.
    ris_ring: usize = 64,
    /// Element and layer spacing (m).
    element_spacing_m: f64 = 0.05,
    wavelength_m: f64 = 0.1,
    /// Planar baseline shape; rows x cols must be half the UCA size.
    upa_rows: usize = 4,
    upa_cols: usize = 32,
    /// Azimuth of the BS seen from the RIS.
    bs_azimuth_deg: f64 = 0.0,
    bs_elevation_deg: f64 = 90.0,
    /// Departure angle at the BS array.
    bs_aod_deg: f64 = 90.0,
    uav_azimuth_deg: f64 = 30.0,
    uav_elevation_deg: f64 = 60.0,
    itv_azimuth_deg: f64 = 330.0,
    itv_elevation_deg: f64 = 90.0,
    rician_k_bs_db: f64 = 13.0,
    rician_k_uav_db: f64 = 13.0,
    rician_k_itv_db: f64 = 13.0,
    tx_power_dbm: f64 = 30.0,
    /// Receiver noise power.
    noise_dbm: f64 = -107.0,
    /// Per-antenna variance of the direct BS-user path.
    direct_var_db: f64 = -110.0,
    /// Path loss at the reference distance of 1 m.
    pathloss_ref: f64 = 1e-3,
    alpha_bs: f64 = 2.0,
    alpha_uav: f64 = 3.0,
    alpha_itv: f64 = 2.0,
    dist_bs_m: f64 = 80.0,
    dist_uav_m: f64 = 80.0,
    dist_itv_m: f64 = 400.0,
    /// Drop all scattered components.
    los_only: bool = false,
    step_k: f64 = 1.0,
    step_t: f64 = -4.0,
    max_iterations: usize = 100_000,
    tolerance: f64 = 1e-6,
    /// Armijo fraction for accepting a gradient step; 0 accepts any non-decreasing step.
    sufficient_increase: f64 = 0.5,
    seed: u64 = 0,
    mc_trials: usize = 10_000,
    bench_trials: usize = 100,
    azimuth_sweep_deg: Vec<f64> = parse_f64_list("0:5:90").expect("valid default"),
    layer_sweep: Vec<usize> = vec![2, 4, 8],
    ring_sweep: Vec<usize> = vec![8, 16, 32, 64],
    bench_azimuth_deg: Vec<f64> = parse_f64_list("10:10:80").expect("valid default"),
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::ConfigSyntax { line, msg: msg.into() }
}

impl ScenarioConfig {
    /// Parses file text. Errors carry the 1-based line and the key.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(syntax(line, format!("expected key = value, got {content:?}")));
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(syntax(line, "missing key"));
            }
            if !seen.insert(key.to_string()) {
                return Err(Error::ConfigField {
                    line,
                    field: key.into(),
                    msg: "duplicate key".into(),
                });
            }
            match cfg.set(key, value) {
                None => {
                    return Err(Error::ConfigField {
                        line,
                        field: key.into(),
                        msg: "unknown key".into(),
                    })
                }
                Some(Err(msg)) => return Err(Error::ConfigField { line, field: key.into(), msg }),
                Some(Ok(())) => {}
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Every key with its current value, one per line.
    pub fn emit(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.entries() {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::ConfigInvariant(msg));
        for (name, v) in [("bs_antennas", self.bs_antennas), ("ris_layers", self.ris_layers)] {
            if v == 0 {
                return fail(format!("{name} must be positive"));
            }
        }
        if self.ris_ring < 2 || !self.ris_ring.is_multiple_of(2) {
            return fail(format!("ris_ring must be even and >= 2, got {}", self.ris_ring));
        }
        let upa = self.upa_rows.checked_mul(self.upa_cols).and_then(|n| n.checked_mul(2));
        let uca = self.ris_layers.checked_mul(self.ris_ring);
        if upa.is_none() || upa != uca {
            return fail(format!(
                "upa_rows x upa_cols ({} x {}) must be half of ris_layers x ris_ring ({} x {})",
                self.upa_rows, self.upa_cols, self.ris_layers, self.ris_ring
            ));
        }
        let positive = [
            ("element_spacing_m", self.element_spacing_m),
            ("wavelength_m", self.wavelength_m),
            ("pathloss_ref", self.pathloss_ref),
            ("dist_bs_m", self.dist_bs_m),
            ("dist_uav_m", self.dist_uav_m),
            ("dist_itv_m", self.dist_itv_m),
            ("step_k", self.step_k),
            ("tolerance", self.tolerance),
        ];
        for (name, v) in positive {
            if v <= 0.0 {
                return fail(format!("{name} must be positive, got {v}"));
            }
        }
        for (name, v) in [
            ("bs_elevation_deg", self.bs_elevation_deg),
            ("uav_elevation_deg", self.uav_elevation_deg),
            ("itv_elevation_deg", self.itv_elevation_deg),
            ("bs_aod_deg", self.bs_aod_deg),
        ] {
            if !(0.0..=180.0).contains(&v) {
                return fail(format!("{name} must lie in [0, 180], got {v}"));
            }
        }
        if !(0.0..1.0).contains(&self.sufficient_increase) {
            return fail(format!("sufficient_increase must lie in [0, 1), got {}", self.sufficient_increase));
        }
        if self.max_iterations == 0 {
            return fail("max_iterations must be positive".into());
        }
        if self.mc_trials < 2 || self.bench_trials == 0 {
            return fail("mc_trials must be >= 2 and bench_trials >= 1".into());
        }
        for (name, list) in [("layer_sweep", &self.layer_sweep)] {
            if list.contains(&0) {
                return fail(format!("{name} entries must be positive"));
            }
        }
        if self.ring_sweep.iter().any(|&r| r < 2 || !r.is_multiple_of(2)) {
            return fail("ring_sweep entries must be even and >= 2".into());
        }
        Ok(())
    }

    fn link(&self, k_db: f64, alpha: f64, dist: f64) -> LinkStats {
        LinkStats {
            rician_k: db_to_linear(k_db),
            pathloss_beta: self.pathloss_ref * dist.powf(-alpha),
            direct_var: db_to_linear(self.direct_var_db),
            tx_power: db_to_linear(self.tx_power_dbm),
            noise_var: db_to_linear(self.noise_dbm),
        }
    }

    /// Deployment in internal units.
    pub fn scenario(&self) -> Result<Scenario> {
        self.validate()?;
        let (d, lambda) = (self.element_spacing_m, self.wavelength_m);
        let rad = f64::to_radians;
        let scenario = Scenario {
            ris: ArrayDescriptor::uca(self.ris_layers, self.ris_ring, d, lambda)?,
            upa: ArrayDescriptor::upa(self.upa_rows, self.upa_cols, d, lambda)?,
            bs_array: ArrayDescriptor::ula(self.bs_antennas, d, lambda)?,
            angles: AngleSet {
                azimuth_aoa_br: rad(self.bs_azimuth_deg),
                elevation_aoa_br: rad(self.bs_elevation_deg),
                aod_bs: rad(self.bs_aod_deg),
                azimuth_aod_ru: rad(self.uav_azimuth_deg),
                elevation_aod_ru: rad(self.uav_elevation_deg),
                azimuth_aod_rv: rad(self.itv_azimuth_deg),
                elevation_aod_rv: rad(self.itv_elevation_deg),
            }
            .normalized()?,
            bs_link: self.link(self.rician_k_bs_db, self.alpha_bs, self.dist_bs_m),
            uav: self.link(self.rician_k_uav_db, self.alpha_uav, self.dist_uav_m),
            itv: self.link(self.rician_k_itv_db, self.alpha_itv, self.dist_itv_m),
            fading: if self.los_only { Fading::LosOnly } else { Fading::Rician },
        };
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn optimizer_options(&self) -> OptimizerOptions {
        OptimizerOptions {
            step_k: self.step_k,
            step_t: self.step_t,
            max_iterations: self.max_iterations,
            tolerance: self.tolerance,
            sufficient_increase: self.sufficient_increase,
            ..OptimizerOptions::default()
        }
    }
}

/// Reads and parses a scenario file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    ScenarioConfig::parse(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn empty_text_gives_defaults() {
        let cfg = ScenarioConfig::parse("").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
        assert_eq!(ScenarioConfig::parse("# only a comment\n\n").unwrap(), cfg);
        assert_eq!(cfg.bs_antennas, 16);
        assert_eq!((cfg.ris_layers, cfg.ris_ring), (4, 64));
        assert_eq!((cfg.tx_power_dbm, cfg.noise_dbm, cfg.direct_var_db), (30.0, -107.0, -110.0));
        assert_eq!((cfg.alpha_bs, cfg.alpha_uav, cfg.alpha_itv), (2.0, 3.0, 2.0));
        assert_eq!((cfg.dist_bs_m, cfg.dist_uav_m, cfg.dist_itv_m), (80.0, 80.0, 400.0));
        assert_eq!((cfg.bs_azimuth_deg, cfg.bs_elevation_deg), (0.0, 90.0));
    }

    #[test]
    fn emit_reload_round_trips() {
        let cfg = ScenarioConfig::default();
        assert_eq!(ScenarioConfig::parse(&cfg.emit()).unwrap(), cfg);
        let odd = ScenarioConfig {
            tolerance: 3.3e-7,
            element_spacing_m: 0.1 / 3.0,
            azimuth_sweep_deg: vec![0.1, 0.2 + 0.1],
            ..cfg
        };
        assert_eq!(ScenarioConfig::parse(&odd.emit()).unwrap(), odd);
        assert_eq!(odd.emit().lines().count(), ScenarioConfig::KEYS.len());
    }

    #[test]
    fn suffix_on_number_names_field() {
        let err = ScenarioConfig::parse("ris_ring = 16\nupa_cols = 8\nrician_k_bs_db = 13dB\n").unwrap_err();
        match err {
            Error::ConfigField { line, field, .. } => {
                assert_eq!(line, 3);
                assert_eq!(field, "rician_k_bs_db");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_duplicate_and_malformed() {
        let field = |text: &str| match ScenarioConfig::parse(text).unwrap_err() {
            Error::ConfigField { field, msg, .. } => (field, msg),
            other => panic!("unexpected {other:?}"),
        };
        assert_eq!(field("K_B = 13\n").1, "unknown key");
        assert_eq!(field("seed = 1\nseed = 2\n").1, "duplicate key");
        assert_eq!(field("tolerance = nan").0, "tolerance");
        assert_eq!(field("los_only = 1").0, "los_only");
        assert_eq!(field("ring_sweep = 8,x").0, "ring_sweep");
        assert!(matches!(ScenarioConfig::parse("just words"), Err(Error::ConfigSyntax { line: 1, .. })));
        assert!(matches!(ScenarioConfig::parse(" = 4"), Err(Error::ConfigSyntax { .. })));
    }

    #[test]
    fn invariant_violations() {
        for text in [
            "ris_ring = 63",
            "upa_cols = 31",
            "dist_uav_m = 0",
            "uav_elevation_deg = 181",
            "mc_trials = 1",
            "ring_sweep = 8,15",
            "bs_antennas = 0",
        ] {
            assert!(matches!(ScenarioConfig::parse(text), Err(Error::ConfigInvariant(_))), "{text}");
        }
    }

    #[test]
    fn comments_and_spacing() {
        let cfg = ScenarioConfig::parse("  seed=7 # trailing\n\tris_ring = 16\nupa_cols = 8\n").unwrap();
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.ris_ring, 16);
    }

    #[test]
    fn unit_conversion() {
        let sc = ScenarioConfig::default().scenario().unwrap();
        assert_relative_eq!(sc.uav.tx_power, 1000.0, max_relative = 1e-12);
        assert_relative_eq!(sc.uav.noise_var, 10f64.powf(-10.7), max_relative = 1e-12);
        assert_relative_eq!(sc.uav.direct_var, 1e-11, max_relative = 1e-12);
        assert_relative_eq!(sc.uav.rician_k, 10f64.powf(1.3), max_relative = 1e-12);
        assert_relative_eq!(sc.uav.pathloss_beta, 1e-3 / 512_000.0, max_relative = 1e-12);
        assert_relative_eq!(sc.itv.pathloss_beta, 1e-3 / 160_000.0, max_relative = 1e-12);
        assert_relative_eq!(sc.angles.elevation_aod_ru, std::f64::consts::FRAC_PI_3, max_relative = 1e-12);
        assert_relative_eq!(sc.angles.azimuth_aod_rv, 330f64.to_radians(), max_relative = 1e-12);
        assert_eq!(sc.upa.num_elements() * 2, sc.ris.num_elements());
    }

    #[test]
    fn huge_sizes_are_rejected_not_overflowed() {
        let text = format!("upa_rows = {}\nupa_cols = 4\n", usize::MAX);
        assert!(matches!(ScenarioConfig::parse(&text), Err(Error::ConfigInvariant(_))));
    }

    proptest::proptest! {
        #[test]
        fn arbitrary_lines_never_panic(
            lines in proptest::collection::vec(
                (proptest::sample::select(ScenarioConfig::KEYS.to_vec()), "[-0-9a-z.:,= e]{0,12}"),
                0..6,
            )
        ) {
            let text: String = lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
            if let Ok(cfg) = ScenarioConfig::parse(&text) {
                proptest::prop_assert_eq!(ScenarioConfig::parse(&cfg.emit()).unwrap(), cfg.clone());
                let _ = cfg.scenario();
            }
        }
    }

    #[test]
    fn load_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.cfg");
        std::fs::write(&path, "seed = 5\n").unwrap();
        assert_eq!(load_config(&path).unwrap().seed, 5);
        assert!(matches!(load_config(dir.path().join("missing")), Err(Error::Io(_))));
    }
}
