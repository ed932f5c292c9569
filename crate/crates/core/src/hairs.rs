//! Hairs of `e^z + a` for real `a < -1`, traced by inverse branches.
//!
//! An address `s = (s_0, s_1, ...)` acts through the branches
//! `L_s(w) = Log(w - a) + 2 pi i s`. The depth-`d` picture of the hair is
//! `L_{s_0} ∘ ... ∘ L_{s_{d-1}}` applied to the horizontal seed ray
//! `t + 2 pi i s_d`.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::{GrowthConstants, Parameter};
use crate::orbit::{classify_point, PointClass};

/// Default bound on address entries.
pub const ADDRESS_BOUND: i64 = 1000;

/// Endpoint estimates closer than this between consecutive depths count as converged.
pub const ENDPOINT_TOL: f64 = 1e-6;

/// An eventually periodic sequence of integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalAddress {
    prefix: Vec<i64>,
    tail: Vec<i64>,
}

impl ExternalAddress {
    pub fn new(prefix: Vec<i64>, tail: Vec<i64>) -> Result<Self> {
        Self::with_bound(prefix, tail, ADDRESS_BOUND)
    }

    pub fn with_bound(prefix: Vec<i64>, tail: Vec<i64>, bound: i64) -> Result<Self> {
        if tail.is_empty() {
            return Err(Error::invalid("address needs a non-empty repeating tail"));
        }
        if let Some(s) = prefix.iter().chain(&tail).find(|s| s.abs() > bound) {
            return Err(Error::invalid(format!("address entry {s} exceeds the bound {bound}")));
        }
        Ok(Self { prefix, tail })
    }

    /// `(0, 0, 0, ...)`.
    pub fn zeros() -> Self {
        Self { prefix: Vec::new(), tail: vec![0] }
    }

    pub fn entry(&self, k: usize) -> i64 {
        match self.prefix.get(k) {
            Some(&s) => s,
            None => self.tail[(k - self.prefix.len()) % self.tail.len()],
        }
    }

    /// The address with its first entry dropped.
    pub fn shift(&self) -> Self {
        if self.prefix.is_empty() {
            let mut tail = self.tail.clone();
            tail.rotate_left(1);
            Self { prefix: Vec::new(), tail }
        } else {
            Self { prefix: self.prefix[1..].to_vec(), tail: self.tail.clone() }
        }
    }
}

impl fmt::Display for ExternalAddress {
    /// `1,2,(0)` for the prefix `1, 2` followed by zeros.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.prefix {
            write!(f, "{s},")?;
        }
        let tail: Vec<String> = self.tail.iter().map(|s| s.to_string()).collect();
        write!(f, "({})", tail.join(","))
    }
}

impl std::str::FromStr for ExternalAddress {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let open = s.find('(').ok_or_else(|| Error::invalid(format!("address {s:?} lacks a (tail)")))?;
        if !s.ends_with(')') {
            return Err(Error::invalid(format!("address {s:?} must end with the tail in parentheses")));
        }
        let ints = |part: &str| -> Result<Vec<i64>> {
            part.split(',')
                .map(str::trim)
                .filter(|p| !p.is_empty())
                .map(|p| p.parse().map_err(|_| Error::invalid(format!("bad address entry {p:?}"))))
                .collect()
        };
        Self::new(ints(&s[..open])?, ints(&s[open + 1..s.len() - 1])?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HairOptions {
    /// Seed potentials run over `[t_min, t_max]`, evenly in `ln(1 + t)`.
    pub t_min: f64,
    pub seeds: usize,
    /// Trace complex parameters without endpoint claims.
    pub experimental: bool,
}

impl Default for HairOptions {
    fn default() -> Self {
        Self { t_min: 0.0, seeds: 64, experimental: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HairPoint {
    /// Seed potential.
    pub t: f64,
    /// Number of inverse branches applied.
    pub level: usize,
    pub z: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HairPolyline {
    pub address: ExternalAddress,
    pub depth: usize,
    /// Levels `0..=depth`, each with `t` descending.
    pub points: Vec<HairPoint>,
    pub endpoint_estimate: Complex64,
    /// Distance between the endpoint estimates at depths `depth` and `depth - 1`.
    pub endpoint_gap: f64,
    pub experimental: bool,
}

impl HairPolyline {
    pub fn level(&self, level: usize) -> impl Iterator<Item = &HairPoint> {
        self.points.iter().filter(move |p| p.level == level)
    }

    pub fn converged(&self, tol: f64) -> bool {
        self.endpoint_gap <= tol
    }

    pub fn export(&self) -> HairExport {
        HairExport {
            address: self.address.to_string(),
            points: self.points.iter().map(|p| ExportPoint { t: p.t, level: p.level, re: p.z.re, im: p.z.im }).collect(),
            endpoint: [self.endpoint_estimate.re, self.endpoint_estimate.im],
            gap: self.endpoint_gap,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExportPoint {
    pub t: f64,
    pub level: usize,
    pub re: f64,
    pub im: f64,
}

/// JSON shape of a traced hair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HairExport {
    pub address: String,
    pub points: Vec<ExportPoint>,
    pub endpoint: [f64; 2],
    pub gap: f64,
}

/// `L_{s_0} ∘ ... ∘ L_{s_{level-1}}(t + 2 pi i s_level)`.
fn chain(addr: &ExternalAddress, a: Complex64, level: usize, t: f64) -> Result<Complex64> {
    let mut w = Complex64::new(t, TAU * addr.entry(level) as f64);
    for k in (0..level).rev() {
        let d = w - a;
        if d.im == 0.0 && d.re <= 0.0 {
            return Err(Error::BranchCut { step: level - k, point: format!("{w}") });
        }
        w = d.ln() + Complex64::new(0.0, TAU * addr.entry(k) as f64);
    }
    Ok(w)
}

pub fn trace_hair(addr: &ExternalAddress, p: &Parameter, pullback_depth: usize, t_max: f64) -> Result<HairPolyline> {
    trace_hair_with(addr, p, pullback_depth, t_max, &HairOptions::default())
}

pub fn trace_hair_with(
    addr: &ExternalAddress,
    p: &Parameter,
    pullback_depth: usize,
    t_max: f64,
    opts: &HairOptions,
) -> Result<HairPolyline> {
    let a = p.a();
    if !opts.experimental && !(p.is_real() && a.re < -1.0) {
        return Err(Error::Unsupported(format!("hairs are traced for real a < -1, got {a}")));
    }
    if pullback_depth == 0 {
        return Err(Error::invalid("pullback depth must be at least 1"));
    }
    if !(t_max > opts.t_min && opts.t_min >= 0.0) || opts.seeds < 2 {
        return Err(Error::invalid(format!("need 0 <= t_min < t_max and two seeds, got [{}, {t_max}]", opts.t_min)));
    }
    let (u0, u1) = (opts.t_min.ln_1p(), t_max.ln_1p());
    let last = opts.seeds - 1;
    let ts: Vec<f64> = (0..opts.seeds)
        .rev()
        .map(|i| match i {
            0 => opts.t_min,
            i if i == last => t_max,
            i => (u0 + (u1 - u0) * i as f64 / last as f64).exp_m1(),
        })
        .collect();
    let mut points = Vec::with_capacity(ts.len() * (pullback_depth + 1));
    for level in 0..=pullback_depth {
        for &t in &ts {
            points.push(HairPoint { t, level, z: chain(addr, a, level, t)? });
        }
    }
    let endpoint_estimate = chain(addr, a, pullback_depth, opts.t_min)?;
    let previous = chain(addr, a, pullback_depth - 1, opts.t_min)?;
    Ok(HairPolyline {
        address: addr.clone(),
        depth: pullback_depth,
        points,
        endpoint_estimate,
        endpoint_gap: (endpoint_estimate - previous).norm(),
        experimental: opts.experimental,
    })
}

/// Traces several hairs in parallel.
pub fn trace_hairs(addrs: &[ExternalAddress], p: &Parameter, pullback_depth: usize, t_max: f64) -> Result<Vec<HairPolyline>> {
    addrs.par_iter().map(|s| trace_hair(s, p, pullback_depth, t_max)).collect()
}

/// Classifies the endpoint estimate. The estimate has to have converged.
pub fn classify_endpoint(h: &HairPolyline, p: &Parameter, cfg: &GrowthConstants, depth: usize) -> Result<PointClass> {
    if h.experimental {
        return Err(Error::Unsupported("no endpoint claims for experimental hairs".into()));
    }
    if !h.converged(ENDPOINT_TOL) {
        return Err(Error::NonConvergence { gap: h.endpoint_gap, tol: ENDPOINT_TOL });
    }
    classify_point(h.endpoint_estimate, p, cfg, depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbit::Label;

    const FIXED: f64 = 1.146_193_220_620_582_5;

    fn minus_two() -> Parameter {
        Parameter::real(-2.0).unwrap()
    }

    #[test]
    fn address_parsing_and_shift() {
        let s: ExternalAddress = "1, -2,(0,3)".parse().unwrap();
        assert_eq!((s.entry(0), s.entry(1), s.entry(2), s.entry(3), s.entry(4)), (1, -2, 0, 3, 0));
        assert_eq!(s.to_string(), "1,-2,(0,3)");
        assert_eq!(s.shift().shift().to_string(), "(0,3)");
        assert_eq!(s.shift().shift().shift().to_string(), "(3,0)");
        assert!("1,2".parse::<ExternalAddress>().is_err());
        assert!(ExternalAddress::new(vec![5000], vec![0]).is_err());
    }

    #[test]
    fn zero_hair_is_real() {
        let h = trace_hair(&ExternalAddress::zeros(), &minus_two(), 40, 100.0).unwrap();
        assert!(h.points.iter().all(|p| p.z.im.abs() < 1e-12));
        assert!((h.endpoint_estimate.re - FIXED).abs() < 1e-12);
        assert!(h.endpoint_estimate.im == 0.0);
    }

    #[test]
    fn one_then_zeros() {
        let s = ExternalAddress::new(vec![1], vec![0]).unwrap();
        let h = trace_hair(&s, &minus_two(), 40, 100.0).unwrap();
        let expect = Complex64::new((FIXED + 2.0).ln(), TAU);
        assert!((h.endpoint_estimate - expect).norm() < 1e-12);
    }

    #[test]
    fn branches_invert_the_map() {
        let p = minus_two();
        let s = ExternalAddress::new(vec![2, -1], vec![1, 0]).unwrap();
        let h = trace_hair(&s, &p, 6, 50.0).unwrap();
        let shifted = trace_hair(&s.shift(), &p, 6, 50.0).unwrap();
        for q in h.points.iter().filter(|q| q.level > 0) {
            let back = shifted.points.iter().find(|r| r.level == q.level - 1 && r.t == q.t).unwrap();
            assert!((p.map(q.z) - back.z).norm() <= 1e-9 * back.z.norm().max(1.0));
        }
    }

    #[test]
    fn endpoint_classification() {
        let p = minus_two();
        let cfg = GrowthConstants::with_radius(&p, 3.0).unwrap();
        let h = trace_hair(&ExternalAddress::zeros(), &p, 40, 100.0).unwrap();
        assert_eq!(classify_endpoint(&h, &p, &cfg, 3).unwrap().label, Label::MeanderingCandidate(3));
        let shallow = trace_hair(&ExternalAddress::zeros(), &p, 3, 100.0).unwrap();
        assert!(matches!(classify_endpoint(&shallow, &p, &cfg, 3), Err(Error::NonConvergence { .. })));
    }

    #[test]
    fn complex_parameter_needs_opt_in() {
        let p = Parameter::new(Complex64::new(-2.0, 0.5)).unwrap();
        assert!(trace_hair(&ExternalAddress::zeros(), &p, 5, 10.0).is_err());
        let opts = HairOptions { experimental: true, ..HairOptions::default() };
        assert!(trace_hair_with(&ExternalAddress::zeros(), &p, 5, 10.0, &opts).is_ok());
    }
}
