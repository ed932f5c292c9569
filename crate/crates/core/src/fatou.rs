//! Fatou's function `f(z) = z + 1 + e^{-z}` and its relatives.
//!
//! `g(z) = e^{-z}` semiconjugates `f` to `h(zeta) = e^{-1} zeta e^{-zeta}`, and
//! `w = -zeta - 1` conjugates `h` to `(w + 1) e^w - 1`.

use std::f64::consts::{E, PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::{eval_f, TowerValue};

/// Above this modulus of `e^{-z}` the semiconjugacy residual is measured on
/// logarithms.
const LOG_DOMAIN_SWITCH: f64 = 700.0;

/// `z + 1 + e^{-z}`.
pub fn eval_fatou(z: Complex64) -> Complex64 {
    z + 1.0 + (-z).exp()
}

/// `e^{-1} zeta e^{-zeta}`.
pub fn eval_h(zeta: Complex64) -> Complex64 {
    zeta * (-zeta).exp() / E
}

/// `(w + 1) e^w - 1`.
pub fn eval_h_tilde(w: Complex64) -> Complex64 {
    (w + 1.0) * w.exp() - 1.0
}

/// Relative residual of `e^{-f(z)} = h(e^{-z})`.
///
/// When `|e^{-z}|` is large both sides are ill-conditioned in value, so the
/// exponents `-f(z)` and `-1 - z - e^{-z}` are compared instead (modulo
/// `2 pi i`, relative to `|f(z)|`).
pub fn semiconjugacy_residual(z: Complex64) -> f64 {
    let zeta = (-z).exp();
    let fz = eval_fatou(z);
    let direct = zeta.norm() <= LOG_DOMAIN_SWITCH && fz.re.abs() <= LOG_DOMAIN_SWITCH;
    if direct {
        let lhs = (-fz).exp();
        let rhs = eval_h(zeta);
        (lhs - rhs).norm() / rhs.norm()
    } else {
        let d = -fz - (-1.0 - z - zeta);
        let im = d.im - TAU * (d.im / TAU).round();
        Complex64::new(d.re, im).norm() / fz.norm().max(1.0)
    }
}

/// Relative residual of `h~(-zeta - 1) = -h(zeta) - 1`.
pub fn conjugacy_residual(zeta: Complex64) -> f64 {
    let lhs = eval_h_tilde(-zeta - 1.0);
    let rhs = -eval_h(zeta) - 1.0;
    (lhs - rhs).norm() / rhs.norm().max(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FatouOrbitConfig {
    /// Base of the thresholds `F^k(T)`.
    pub t: f64,
    pub n0_max: usize,
    pub depth: usize,
}

impl Default for FatouOrbitConfig {
    fn default() -> Self {
        Self { t: 1.0, n0_max: 8, depth: 4 }
    }
}

impl FatouOrbitConfig {
    pub fn new(t: f64, n0_max: usize, depth: usize) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::invalid(format!("T must be positive, got {t}")));
        }
        if depth == 0 {
            return Err(Error::invalid("depth must be at least 1"));
        }
        Ok(Self { t, n0_max, depth })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FatouMembership {
    /// `|f^{n0+k}(z)| >= F^k(T)` for all `k <= depth`.
    Verified { n0: usize, depth: usize },
    NotVerified,
}

/// Certain lower bounds for `|f^n(z)|`, `n = 0, 1, ...`, up to `len` terms or
/// until the orbit can no longer be followed.
fn modulus_lower_bounds(z: Complex64, len: usize) -> Vec<TowerValue> {
    let mut out = Vec::with_capacity(len);
    let mut w = z;
    while out.len() < len {
        out.push(TowerValue::from_f64(w.norm() * (1.0 - 1e-12)));
        if -w.re > 700.0 {
            // |f(w)| >= e^{-Re w} - |w| - 1, far beyond f64.
            if out.len() < len {
                out.push(TowerValue::from_parts(1, -w.re - 1e-9));
            }
            break;
        }
        w = eval_fatou(w);
        if !(w.re.is_finite() && w.im.is_finite()) {
            break;
        }
    }
    out
}

/// Searches `n0 <= n0_max` with `|f^{n0+k}(z)| >= F^k(T)` for every `k <= depth`.
pub fn fatou_a_membership(z: Complex64, cfg: &FatouOrbitConfig) -> Result<FatouMembership> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::invalid("point is not finite"));
    }
    let cfg = FatouOrbitConfig::new(cfg.t, cfg.n0_max, cfg.depth)?;
    let lower = modulus_lower_bounds(z, cfg.n0_max + cfg.depth + 1);
    let mut thresholds = vec![TowerValue::from_f64(cfg.t)];
    for k in 1..=cfg.depth {
        thresholds.push(eval_f(thresholds[k - 1]));
    }
    // Thresholds are exact up to rounding; demand a small relative excess.
    let thresholds: Vec<TowerValue> = thresholds
        .iter()
        .map(|v| v.as_f64().map_or(*v, |x| TowerValue::from_f64(x * (1.0 + 1e-12))))
        .collect();
    for n0 in 0..=cfg.n0_max {
        let ok = (0..=cfg.depth).all(|k| lower.get(n0 + k).is_some_and(|l| *l >= thresholds[k]));
        if ok {
            return Ok(FatouMembership::Verified { n0, depth: cfg.depth });
        }
    }
    Ok(FatouMembership::NotVerified)
}

/// Coarse fate of an orbit under `h` or `h~`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitFate {
    /// Reaches the attracting fixed point (`0` for `h`, `-1` for `h~`).
    Attracted,
    /// Modulus passes `1e8`.
    Large,
    Undecided,
}

fn fate(mut w: Complex64, fixed: Complex64, map: impl Fn(Complex64) -> Complex64, max_iter: usize) -> OrbitFate {
    for _ in 0..max_iter {
        if (w - fixed).norm() < 1e-6 {
            return OrbitFate::Attracted;
        }
        if !(w.norm() < 1e8) {
            return OrbitFate::Large;
        }
        w = map(w);
    }
    OrbitFate::Undecided
}

pub fn h_orbit_fate(zeta: Complex64, max_iter: usize) -> OrbitFate {
    fate(zeta, Complex64::new(0.0, 0.0), eval_h, max_iter)
}

pub fn h_tilde_orbit_fate(w: Complex64, max_iter: usize) -> OrbitFate {
    fate(w, Complex64::new(-1.0, 0.0), eval_h_tilde, max_iter)
}

/// `i pi`, a fixed point of `f`.
pub const FIXED_I_PI: Complex64 = Complex64::new(0.0, PI);
