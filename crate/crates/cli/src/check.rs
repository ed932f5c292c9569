//! Invariant suites for `expoweb check`.

use expoweb_core::fatou::{conjugacy_residual, semiconjugacy_residual};
use expoweb_core::growth::{growth_sandwich, verify_r_zero};
use expoweb_core::raster::{complement_components, ComponentInfo, Mask};
use expoweb_core::{Parameter, TOOL_VERSION};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::commands::write_json;
use crate::config::JobConfig;
use crate::CliError;

pub const SUITES: [&str; 4] = ["growth", "r_zero", "residuals", "raster"];
const RESIDUAL_TOL: f64 = 1e-10;
const RASTER_MASKS: usize = 500;

#[derive(Debug, Default, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    pub failures: usize,
    pub precondition_violations: usize,
    /// Smallest slack seen; negative means a failure.
    pub worst_margin: Option<f64>,
    pub notes: Vec<String>,
}

impl SuiteResult {
    fn new(name: &str) -> Self {
        Self { name: name.into(), ..Default::default() }
    }

    fn record(&mut self, ok: bool, margin: f64) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
        }
        self.worst_margin = Some(self.worst_margin.map_or(margin, |m| m.min(margin)));
    }

    fn finish(mut self) -> Self {
        self.passed = self.failures == 0 && self.precondition_violations == 0;
        self
    }
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub tool_version: &'static str,
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

pub struct CheckConfig {
    pub k: Option<f64>,
    pub samples: usize,
    pub seed: u64,
}

pub fn growth_suite(cfg: &CheckConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut res = SuiteResult::new("growth");
    if let Some(k) = cfg.k.filter(|&k| !(k >= 1.0)) {
        res.precondition_violations = cfg.samples;
        res.notes.push(format!("K = {k} is below 1; no samples evaluated"));
        return res.finish();
    }
    for _ in 0..cfg.samples {
        let a = Complex64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let p = Parameter::new(a).expect("finite");
        let k = cfg.k.unwrap_or_else(|| rng.gen_range(1.0..10.0));
        let x = p.sandwich_threshold(k) + 10f64.powf(rng.gen_range(-3.0..4.0));
        let z = Complex64::new(x, rng.gen_range(-100.0..100.0));
        match growth_sandwich(z, k, &p) {
            Ok(c) => res.record(c.holds, c.lower_slack.min(c.upper_slack)),
            Err(e) => {
                res.precondition_violations += 1;
                res.notes.push(e.to_string());
            }
        }
    }
    res.finish()
}

pub fn r_zero_suite() -> SuiteResult {
    let mut res = SuiteResult::new("r_zero");
    let radii: Vec<f64> = (-3..=2).map(|e| 10f64.powi(e)).collect();
    let axis = |i: usize| -5.0 + 10.0 * i as f64 / 19.0;
    for i in 0..20 {
        for j in 0..20 {
            let p = Parameter::new(Complex64::new(axis(i), axis(j))).expect("finite");
            match verify_r_zero(&p, &radii) {
                Ok(rep) => rep.entries.iter().for_each(|e| res.record(e.holds, e.margin / e.r)),
                Err(e) => {
                    res.failures += 1;
                    res.notes.push(e.to_string());
                }
            }
        }
    }
    res.finish()
}

pub fn residual_suite(cfg: &CheckConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut res = SuiteResult::new("residuals");
    let mut point = || Complex64::new(rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
    for _ in 0..cfg.samples {
        let r = semiconjugacy_residual(point());
        res.record(r <= RESIDUAL_TOL, RESIDUAL_TOL - r);
        let r = conjugacy_residual(point());
        res.record(r <= RESIDUAL_TOL, RESIDUAL_TOL - r);
    }
    res.finish()
}

/// Complement components by label relaxation: every false pixel repeatedly
/// takes the smallest index among itself and its false 4-neighbours.
pub fn relaxation_components(m: &Mask) -> (Vec<u32>, Vec<ComponentInfo>) {
    let (nx, ny) = (m.nx(), m.ny());
    let mut rep: Vec<usize> = (0..nx * ny).collect();
    let free = |i: usize, j: usize| !m.get(i, j);
    loop {
        let mut changed = false;
        for j in 0..ny {
            for i in 0..nx {
                if !free(i, j) {
                    continue;
                }
                let me = j * nx + i;
                let mut best = rep[me];
                if i > 0 && free(i - 1, j) {
                    best = best.min(rep[me - 1]);
                }
                if i + 1 < nx && free(i + 1, j) {
                    best = best.min(rep[me + 1]);
                }
                if j > 0 && free(i, j - 1) {
                    best = best.min(rep[me - nx]);
                }
                if j + 1 < ny && free(i, j + 1) {
                    best = best.min(rep[me + nx]);
                }
                if best < rep[me] {
                    rep[me] = best;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut labels = vec![0u32; nx * ny];
    let mut comps: Vec<ComponentInfo> = Vec::new();
    for idx in 0..nx * ny {
        let (i, j) = (idx % nx, idx / nx);
        if !free(i, j) {
            continue;
        }
        let label = if rep[idx] == idx {
            let label = comps.len() as u32 + 1;
            comps.push(ComponentInfo { label, size: 0, bounded: true, bbox: [i, j, i, j] });
            label
        } else {
            labels[rep[idx]]
        };
        labels[idx] = label;
        let c = &mut comps[label as usize - 1];
        c.size += 1;
        c.bounded &= !(i == 0 || j == 0 || i + 1 == nx || j + 1 == ny);
        c.bbox = [c.bbox[0].min(i), c.bbox[1].min(j), c.bbox[2].max(i), c.bbox[3].max(j)];
    }
    (labels, comps)
}

pub fn raster_suite(rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut res = SuiteResult::new("raster");
    for _ in 0..RASTER_MASKS {
        let (nx, ny) = (rng.gen_range(1..=16), rng.gen_range(1..=16));
        let density = rng.gen_range(0.1..0.9);
        let bits = (0..nx * ny).map(|_| rng.gen_bool(density)).collect();
        let m = Mask::from_bits(nx, ny, bits).expect("sizes match");
        let got = complement_components(&m);
        let (labels, comps) = relaxation_components(&m);
        let same = got.labels == labels && got.components == comps;
        res.record(same, if same { 0.0 } else { -1.0 });
    }
    res.finish()
}

pub fn run_suites(names: &[String], cfg: &CheckConfig) -> Result<CheckReport, CliError> {
    if let Some(bad) = names.iter().find(|n| !SUITES.contains(&n.as_str())) {
        return Err(CliError::Config(format!("unknown suite {bad:?}; known: {}", SUITES.join(", "))));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let suites: Vec<SuiteResult> = names
        .iter()
        .map(|n| match n.as_str() {
            "growth" => growth_suite(cfg, &mut rng),
            "r_zero" => r_zero_suite(),
            "residuals" => residual_suite(cfg, &mut rng),
            _ => raster_suite(&mut rng),
        })
        .collect();
    Ok(CheckReport { tool_version: TOOL_VERSION, passed: suites.iter().all(|s| s.passed), suites })
}

pub fn run(cfg: &JobConfig) -> Result<(), CliError> {
    let names = cfg.suites.clone().unwrap_or_else(|| SUITES.iter().map(|s| s.to_string()).collect());
    let check = CheckConfig { k: cfg.k, samples: cfg.samples.unwrap_or(10_000), seed: cfg.seed.unwrap_or(7) };
    let report = run_suites(&names, &check)?;
    write_json(cfg.out.as_deref(), &report)?;
    if !report.passed {
        let failed: Vec<&str> = report.suites.iter().filter(|s| !s.passed).map(|s| s.name.as_str()).collect();
        return Err(CliError::Verification(format!("suites failed: {}", failed.join(", "))));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_on_a_ring() {
        let m = Mask::from_fn(5, 5, |i, j| (1..=3).contains(&i) && (1..=3).contains(&j) && !(i == 2 && j == 2));
        let (labels, comps) = relaxation_components(&m);
        assert_eq!(comps.len(), 2);
        assert!(!comps[0].bounded && comps[1].bounded);
        assert_eq!(labels[12], 2);
        assert_eq!(complement_components(&m).labels, labels);
    }

    #[test]
    fn broken_k_is_a_precondition_violation() {
        let cfg = CheckConfig { k: Some(0.5), samples: 10, seed: 1 };
        let r = growth_suite(&cfg, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(!r.passed);
        assert_eq!((r.precondition_violations, r.checked), (10, 0));
    }

    #[test]
    fn empty_selection() {
        let rep = run_suites(&[], &CheckConfig { k: None, samples: 1, seed: 1 }).unwrap();
        assert!(rep.passed && rep.suites.is_empty());
        assert!(run_suites(&["nope".into()], &CheckConfig { k: None, samples: 1, seed: 1 }).is_err());
    }
}
