//! Experiments over a [`ScenarioConfig`], each producing a CSV [`Table`].
//!
//! Sweep points run in parallel; rows come back in sweep order and every
//! random draw is keyed by the run seed, so outputs are bit-identical across
//! runs and thread counts.

pub mod config;
pub mod lists;
pub mod table;

use rayon::prelude::*;

pub use config::{load_config, ScenarioConfig};
pub use table::{Cell, Table};

use crate::geometry::{ElementClassification, RoleCounts};
use crate::optimizer::{hybrid_optimize, upa_optimize, OptimizerReport};
use crate::performance::{ergodic_se_mc, second_moments_mc};
use crate::scenario::{Architecture, Scenario, User};
use crate::stats::{mean_std, Estimate};
use crate::{Error, Result};

/// Independent child seed number `index` of `seed` (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn role_cells(c: &ElementClassification) -> Vec<Cell> {
    let RoleCounts { shared, uav_specific, itv_specific, inactive } = c.counts();
    vec![shared.into(), uav_specific.into(), itv_specific.into(), inactive.into()]
}

fn bound_cells(r: &OptimizerReport) -> Vec<Cell> {
    vec![r.sum_se_ub.into(), r.per_user_se_ub.0.into(), r.per_user_se_ub.1.into()]
}

pub const AZIMUTH_SWEEP_COLUMNS: &[&str] = &[
    "layers",
    "ring",
    "uav_azimuth_deg",
    "itv_azimuth_deg",
    "shared",
    "uav_specific",
    "itv_specific",
    "inactive",
    "uca_sum_se",
    "uca_uav_se",
    "uca_itv_se",
    "upa_sum_se",
    "upa_uav_se",
    "upa_itv_se",
    "uca_iterations",
    "upa_iterations",
];

/// Optimized UCA and UPA bounds with the UAV at each azimuth (degrees) and
/// the ITV mirrored about the BS, for every layer count in `layers`.
pub fn sweep_uav_azimuth(
    config: &ScenarioConfig,
    azimuths_deg: &[f64],
    layers: &[usize],
    seed: u64,
) -> Result<Table> {
    let base = config.scenario()?;
    let options = config.optimizer_options();
    let points: Vec<(usize, f64)> = layers
        .iter()
        .flat_map(|&nc| azimuths_deg.iter().map(move |&az| (nc, az)))
        .collect();
    let rows: Vec<Result<Vec<Cell>>> = points
        .par_iter()
        .map(|&(nc, az)| {
            let sc = base.with_layers(nc)?.with_symmetric_users(az.to_radians());
            let uca = hybrid_optimize(&sc, seed, &options)?;
            let upa = upa_optimize(&sc, seed, &options)?;
            let mut row: Vec<Cell> = vec![
                nc.into(),
                sc.ris.ring_nr.into(),
                az.into(),
                sc.angles.azimuth_aod_rv.to_degrees().into(),
            ];
            row.extend(role_cells(&sc.classification(Architecture::Uca)));
            row.extend(bound_cells(&uca));
            row.extend(bound_cells(&upa));
            row.push(uca.gradient_iterations.into());
            row.push(upa.gradient_iterations.into());
            Ok(row)
        })
        .collect();
    let mut table = Table::new(AZIMUTH_SWEEP_COLUMNS);
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

pub const RING_SWEEP_COLUMNS: &[&str] = &[
    "layers",
    "ring",
    "uca_elements",
    "upa_elements",
    "shared",
    "uav_specific",
    "itv_specific",
    "inactive",
    "uca_sum_se",
    "uca_uav_se",
    "uca_itv_se",
    "upa_sum_se",
    "upa_uav_se",
    "upa_itv_se",
];

/// Optimized UCA and UPA bounds for each ring size at the configured user positions.
pub fn sweep_ring_size(config: &ScenarioConfig, rings: &[usize], seed: u64) -> Result<Table> {
    let base = config.scenario()?;
    let options = config.optimizer_options();
    let rows: Vec<Result<Vec<Cell>>> = rings
        .par_iter()
        .map(|&nr| {
            let sc = base.with_ring_size(nr)?;
            let uca = hybrid_optimize(&sc, seed, &options)?;
            let upa = upa_optimize(&sc, seed, &options)?;
            let mut row: Vec<Cell> = vec![
                sc.ris.layers_nc.into(),
                nr.into(),
                sc.ris.num_elements().into(),
                sc.upa.num_elements().into(),
            ];
            row.extend(role_cells(&sc.classification(Architecture::Uca)));
            row.extend(bound_cells(&uca));
            row.extend(bound_cells(&upa));
            Ok(row)
        })
        .collect();
    let mut table = Table::new(RING_SWEEP_COLUMNS);
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

pub const BENCH_COLUMNS: &[&str] = &[
    "uav_azimuth_deg",
    "shared",
    "uav_specific",
    "itv_specific",
    "inactive",
    "trials",
    "uca_mean_iterations",
    "uca_std_iterations",
    "upa_mean_iterations",
    "upa_std_iterations",
    "uca_mean_sweeps",
    "uca_unconverged",
    "upa_unconverged",
];

/// Gradient-iteration statistics of both optimizers over `trials` random
/// starts per azimuth. Trial `t` uses the same start seed at every azimuth.
pub fn benchmark_iterations(
    config: &ScenarioConfig,
    azimuths_deg: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Table> {
    if trials == 0 {
        return Err(Error::invalid("benchmark needs at least one trial"));
    }
    let base = config.scenario()?;
    let options = config.optimizer_options();
    let scenarios: Vec<Scenario> =
        azimuths_deg.iter().map(|az| base.with_symmetric_users(az.to_radians())).collect();
    let jobs: Vec<(usize, usize)> =
        (0..scenarios.len()).flat_map(|a| (0..trials).map(move |t| (a, t))).collect();
    let runs: Vec<Result<(OptimizerReport, OptimizerReport)>> = jobs
        .par_iter()
        .map(|&(a, t)| {
            let s = derive_seed(seed, t as u64);
            Ok((hybrid_optimize(&scenarios[a], s, &options)?, upa_optimize(&scenarios[a], s, &options)?))
        })
        .collect();
    let runs: Vec<(OptimizerReport, OptimizerReport)> = runs.into_iter().collect::<Result<_>>()?;
    let mut table = Table::new(BENCH_COLUMNS);
    for (a, chunk) in runs.chunks(trials).enumerate() {
        let uca: Vec<f64> = chunk.iter().map(|(u, _)| u.gradient_iterations as f64).collect();
        let upa: Vec<f64> = chunk.iter().map(|(_, p)| p.gradient_iterations as f64).collect();
        let sweeps: Vec<f64> = chunk.iter().map(|(u, _)| u.closed_form_sweeps as f64).collect();
        let (uca_mean, uca_std) = mean_std(&uca);
        let (upa_mean, upa_std) = mean_std(&upa);
        let mut row: Vec<Cell> = vec![azimuths_deg[a].into()];
        row.extend(role_cells(&scenarios[a].classification(Architecture::Uca)));
        row.extend([
            trials.into(),
            uca_mean.into(),
            uca_std.into(),
            upa_mean.into(),
            upa_std.into(),
            mean_std(&sweeps).0.into(),
            chunk.iter().filter(|(u, _)| !u.converged).count().into(),
            chunk.iter().filter(|(_, p)| !p.converged).count().into(),
        ]);
        table.push(row);
    }
    Ok(table)
}

pub const VALIDATION_COLUMNS: &[&str] =
    &["user", "quantity", "analytic", "mc_mean", "mc_stderr", "pass"];

/// Standard errors allowed between a Monte Carlo estimate and its closed form.
pub const VALIDATION_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub table: Table,
    pub all_pass: bool,
    /// Human-readable digest of the table.
    pub summary: String,
}

/// Monte Carlo checks of the SE bound and the second moments at the
/// optimized UCA phases. `ergodic_se` rows pass when the estimate does not
/// exceed the bound by more than three standard errors; moment rows pass
/// when the estimate is within three standard errors of the closed form.
pub fn validate_bounds(config: &ScenarioConfig, trials: usize, seed: u64) -> Result<ValidationReport> {
    if trials < 2 {
        return Err(Error::invalid("validation needs at least two trials"));
    }
    let sc = config.scenario()?;
    let phases = hybrid_optimize(&sc, seed, &config.optimizer_options())?.final_phases;
    let mc_seed = derive_seed(seed, u64::MAX);
    let mut table = Table::new(VALIDATION_COLUMNS);
    let mut summary = String::new();
    let mut all_pass = true;
    for (user, name) in [(User::Uav, "uav"), (User::Itv, "itv")] {
        let link = sc.link(Architecture::Uca, user)?;
        let se = ergodic_se_mc(&link, &phases, trials, mc_seed)?;
        let moments = second_moments_mc(&link, &phases, trials, mc_seed)?;
        let se_pass = se.jensen_holds(VALIDATION_SIGMAS);
        table.push(vec![
            name.into(),
            "ergodic_se".into(),
            se.se_ub.into(),
            se.se_mc.into(),
            se.se_mc_stderr.into(),
            se_pass.into(),
        ]);
        summary.push_str(&format!(
            "{name}: ergodic SE {:.6} +/- {:.2e} vs bound {:.6} (gap {:.3e}) {}\n",
            se.se_mc,
            se.se_mc_stderr,
            se.se_ub,
            se.se_ub - se.se_mc,
            if se_pass { "ok" } else { "FAIL" }
        ));
        all_pass &= se_pass;
        let a = moments.cross_analytic;
        let checks: [(&str, f64, Estimate); 4] = [
            ("x1", a.x1, moments.cross_mc[0]),
            ("x2", a.x2, moments.cross_mc[1]),
            ("x3", a.x3, moments.cross_mc[2]),
            ("total_power", moments.total_analytic, moments.total_mc),
        ];
        for (q, analytic, est) in checks {
            let pass = est.agrees_with(analytic, VALIDATION_SIGMAS);
            all_pass &= pass;
            table.push(vec![
                name.into(),
                q.into(),
                analytic.into(),
                est.mean.into(),
                est.stderr.into(),
                pass.into(),
            ]);
            summary.push_str(&format!(
                "{name}: {q} analytic {analytic:.6e} mc {:.6e} +/- {:.2e} {}\n",
                est.mean,
                est.stderr,
                if pass { "ok" } else { "FAIL" }
            ));
        }
    }
    summary.push_str(if all_pass { "all checks passed\n" } else { "some checks FAILED\n" });
    Ok(ValidationReport { table, all_pass, summary })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ScenarioConfig {
        ScenarioConfig {
            ris_layers: 2,
            ris_ring: 16,
            upa_rows: 2,
            upa_cols: 8,
            bs_antennas: 4,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn derived_seeds_differ() {
        let s: Vec<u64> = (0..100).map(|i| derive_seed(7, i)).collect();
        let mut sorted = s.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 100);
        assert_ne!(derive_seed(0, 0), derive_seed(1, 0));
    }

    #[test]
    fn azimuth_zero_has_no_specific_elements() {
        let t = sweep_uav_azimuth(&small(), &[0.0], &[2], 1).unwrap();
        let sc = small().scenario().unwrap();
        let visible_bs = crate::geometry::visibility_mask(&sc.ris, 0.0).count_active();
        assert_eq!(t.reals("shared"), vec![visible_bs as f64]);
        assert_eq!(t.reals("uav_specific"), vec![0.0]);
        assert_eq!(t.reals("itv_specific"), vec![0.0]);
        assert_eq!(t.reals("itv_azimuth_deg"), vec![0.0]);
    }

    #[test]
    fn wide_separation_has_no_shared_elements() {
        // ring quantum 22.5 deg: 90 + 22.5 rounds up to 115
        let t = sweep_uav_azimuth(&small(), &[115.0], &[2], 1).unwrap();
        assert_eq!(t.reals("shared"), vec![0.0]);
        assert_eq!(t.reals("uca_iterations"), vec![0.0]);
        assert!(t.reals("uav_specific")[0] > 0.0);
    }

    #[test]
    fn sweep_rows_follow_input_order() {
        let t = sweep_uav_azimuth(&small(), &[40.0, 10.0, 20.0], &[2, 1], 3).unwrap();
        assert_eq!(t.rows.len(), 6);
        assert_eq!(t.reals("uav_azimuth_deg"), vec![40.0, 10.0, 20.0, 40.0, 10.0, 20.0]);
        assert_eq!(t.reals("layers"), vec![2.0, 2.0, 2.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn ring_sweep_halves_upa() {
        let t = sweep_ring_size(&small(), &[8, 16], 0).unwrap();
        let (uca, upa) = (t.reals("uca_elements"), t.reals("upa_elements"));
        for (a, b) in uca.iter().zip(&upa) {
            assert_eq!(*a, 2.0 * b);
        }
    }

    #[test]
    fn benchmark_is_deterministic() {
        let cfg = small();
        let a = benchmark_iterations(&cfg, &[20.0, 60.0], 3, 5).unwrap();
        let b = benchmark_iterations(&cfg, &[20.0, 60.0], 3, 5).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.rows.len(), 2);
        assert!(benchmark_iterations(&cfg, &[20.0], 0, 5).is_err());
    }

    #[test]
    fn los_only_validation_is_exact() {
        let cfg = ScenarioConfig { los_only: true, direct_var_db: -1000.0, ..small() };
        let rep = validate_bounds(&cfg, 50, 2).unwrap();
        assert!(rep.all_pass, "{}", rep.summary);
        for row in &rep.table.rows {
            if row[1] == Cell::from("ergodic_se") {
                let (ub, mc) = (row[2].as_real().unwrap(), row[3].as_real().unwrap());
                assert!((ub - mc).abs() <= 1e-9 * ub);
            }
        }
    }
}
