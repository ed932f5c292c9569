//! Orbits, attracting cycles and point classification.
//!
//! Classification runs on orbits that carry a first-order bound on the
//! accumulated rounding error, so every decision (entering a basin ball,
//! passing an `M^k(R)` threshold) is made for the whole error disc.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::{
    continued_growth_k, iterate_f, max_modulus_sequence, GrowthConstants, IteratedModulus, Parameter, TowerValue,
    LN_TOWER_CUTOFF,
};

/// Orbits are abandoned once a point exceeds this modulus.
pub const BAILOUT: f64 = 1e300;

/// Smallest absorbing radius accepted around an attracting cycle point.
pub const BASIN_RADIUS_FLOOR: f64 = 1e-8;

/// A tracked orbit stops when its error bound exceeds this fraction of `max(1, |w|)`.
pub const PRECISION_LIMIT: f64 = 1e-6;

pub const DEFAULT_MAX_ITER: usize = 1000;
const CYCLE_SEARCH_ITER: usize = 10_000;
const CYCLE_TOL: f64 = 1e-7;
const MAX_PERIOD: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    DepthExhausted,
    Overflow,
    BasinConverged,
    TrapEntered,
    PrecisionExhausted,
}

/// A plain floating-point orbit `z, f(z), f^2(z), ...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub start: Complex64,
    pub points: Vec<Complex64>,
    pub terminated_by: Termination,
}

/// Iterates `n` times, stopping early once `|w| > bailout` or `w` is not finite.
/// The offending point is kept when it is finite.
pub fn iterate_map(z: Complex64, p: &Parameter, n: usize, bailout: f64) -> Orbit {
    let mut points = Vec::with_capacity(n + 1);
    let mut w = z;
    let mut terminated_by = Termination::DepthExhausted;
    for k in 0..=n {
        let finite = w.re.is_finite() && w.im.is_finite();
        if finite {
            points.push(w);
        }
        if !finite || w.norm() > bailout {
            terminated_by = Termination::Overflow;
            break;
        }
        if k < n {
            w = p.map(w);
        }
    }
    Orbit { start: z, points, terminated_by }
}

/// One point of an orbit together with what is known about the exact value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tracked {
    /// The exact point lies within `err` of `z`.
    Finite { z: Complex64, err: f64 },
    /// Only `ln|w| >= ln_abs_lower` is known.
    Huge { ln_abs_lower: f64 },
}

impl Tracked {
    /// A certain lower bound on the modulus.
    pub fn abs_lower(&self) -> TowerValue {
        match *self {
            Tracked::Finite { z, err } => TowerValue::from_f64((z.norm() - err).max(0.0)),
            Tracked::Huge { ln_abs_lower } => TowerValue::from_parts(1, ln_abs_lower),
        }
    }

    pub fn abs_upper(&self) -> f64 {
        match *self {
            Tracked::Finite { z, err } => z.norm() + err,
            Tracked::Huge { .. } => f64::INFINITY,
        }
    }

    pub fn finite(&self) -> Option<(Complex64, f64)> {
        match *self {
            Tracked::Finite { z, err } => Some((z, err)),
            Tracked::Huge { .. } => None,
        }
    }
}

/// Iterator over tracked orbit points. It ends after the first [`Tracked::Huge`]
/// point, or when the error bound stops being meaningful.
#[derive(Clone, Debug)]
pub struct TrackedOrbit {
    p: Parameter,
    next: Option<Tracked>,
    exhausted: bool,
}

impl TrackedOrbit {
    pub fn new(z: Complex64, p: &Parameter) -> Self {
        Self { p: *p, next: Some(Tracked::Finite { z, err: f64::EPSILON * z.norm() }), exhausted: false }
    }

    /// True when iteration stopped because the error bound grew too large.
    pub fn precision_exhausted(&self) -> bool {
        self.exhausted
    }

    fn step(&mut self, cur: Tracked) -> Option<Tracked> {
        let (z, err) = cur.finite()?;
        if err > PRECISION_LIMIT * z.norm().max(1.0) {
            self.exhausted = true;
            return None;
        }
        if z.re > LN_TOWER_CUTOFF {
            // |e^z + a| >= e^(Re z - err) - |a|, and e^(Re z - err) > 1e299 here
            let ln_abs_lower = (z.re - err) * (1.0 - 1e-15) - 1e-9;
            return Some(Tracked::Huge { ln_abs_lower });
        }
        let e = z.exp();
        let w = e + self.p.a();
        let ea = e.norm();
        // |e^(z+d) - e^z| <= |e^z| (e^|d| - 1), and <= e^(Re z + |d|) when |d| is large
        let spread = if err < 1.0 { ea * err.exp_m1() } else { (z.re + err).exp() };
        let err = spread + 4.0 * f64::EPSILON * (ea + w.norm());
        Some(Tracked::Finite { z: w, err })
    }
}

impl Iterator for TrackedOrbit {
    type Item = Tracked;

    fn next(&mut self) -> Option<Tracked> {
        let cur = self.next.take()?;
        self.next = self.step(cur);
        Some(cur)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleKind {
    Attracting,
    ParabolicSuspect,
    None,
}

/// The cycle the singular value is attracted to, if any.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cycle {
    pub period: usize,
    pub points: Vec<Complex64>,
    pub multiplier: Complex64,
    pub kind: CycleKind,
    /// `f^p` maps the disc of this radius around each cycle point into the
    /// disc of half the radius. Zero unless attracting.
    pub absorbing_radius: f64,
    pub note: Option<String>,
}

impl Cycle {
    fn none(note: &str) -> Self {
        Cycle {
            period: 0,
            points: Vec::new(),
            multiplier: Complex64::new(0.0, 0.0),
            kind: CycleKind::None,
            absorbing_radius: 0.0,
            note: Some(note.to_string()),
        }
    }

    /// Index of the cycle point whose absorbing disc contains the whole
    /// error disc around `z`.
    pub fn absorbing_index(&self, z: Complex64, err: f64) -> Option<usize> {
        if self.kind != CycleKind::Attracting {
            return None;
        }
        self.points.iter().position(|&c| (z - c).norm() + err <= self.absorbing_radius)
    }
}

/// Follows the orbit of the singular value `a` and refines the cycle it
/// settles on. Returns a cycle of kind `None` when no cycle is detected.
pub fn find_cycle(p: &Parameter, max_iter: usize, tol: f64) -> Cycle {
    let keep = 2 * MAX_PERIOD + 1;
    let mut hist: Vec<Complex64> = Vec::with_capacity(keep);
    let mut w = p.a();
    for _ in 0..max_iter.max(keep) {
        if !(w.re.is_finite() && w.im.is_finite()) || w.norm() > BAILOUT || w.re > LN_TOWER_CUTOFF {
            return Cycle::none("singular orbit escapes");
        }
        if hist.len() == keep {
            hist.remove(0);
        }
        hist.push(w);
        w = p.map(w);
    }
    let last = *hist.last().expect("history is non-empty");
    let period = (1..=MAX_PERIOD).find(|&q| (last - hist[hist.len() - 1 - q]).norm() <= tol * last.norm().max(1.0));
    let Some(period) = period else {
        return Cycle::none("no cycle detected");
    };

    let (z0, residual) = refine_cycle(p, last, period);
    let mut note = None;
    let start = if residual <= 1e-10 * z0.norm().max(1.0) {
        z0
    } else {
        note = Some(format!("refinement diverged, residual {residual:e}"));
        last
    };
    let mut points = Vec::with_capacity(period);
    let mut z = start;
    for _ in 0..period {
        points.push(z);
        z = p.map(z);
    }
    let multiplier = points.iter().map(|z| z.exp()).product::<Complex64>();
    let m = multiplier.norm();
    let kind = if m < 1.0 - 1e-6 {
        CycleKind::Attracting
    } else if (m - 1.0).abs() <= 1e-6 {
        CycleKind::ParabolicSuspect
    } else {
        CycleKind::None
    };
    let mut cycle = Cycle { period, points, multiplier, kind, absorbing_radius: 0.0, note };
    if kind == CycleKind::Attracting {
        cycle.absorbing_radius = absorbing_radius(p, &cycle);
        if cycle.absorbing_radius == 0.0 {
            cycle.kind = CycleKind::None;
            cycle.note = Some("no absorbing disc found".into());
        }
    }
    cycle
}

/// Newton's method on `f^q(z) - z`. Returns the best iterate and its residual.
fn refine_cycle(p: &Parameter, start: Complex64, q: usize) -> (Complex64, f64) {
    let eval = |z: Complex64| {
        let mut w = z;
        let mut d = Complex64::new(1.0, 0.0);
        for _ in 0..q {
            d *= w.exp();
            w = p.map(w);
        }
        (w - z, d - 1.0)
    };
    let mut z = start;
    let (mut g, mut dg) = eval(z);
    let mut best = (z, g.norm());
    for _ in 0..200 {
        if dg.norm() == 0.0 {
            break;
        }
        let next = z - g / dg;
        if !(next.re.is_finite() && next.im.is_finite()) {
            break;
        }
        z = next;
        (g, dg) = eval(z);
        if g.norm() < best.1 {
            best = (z, g.norm());
        }
        if best.1 == 0.0 || (z - best.0).norm() > 1.0 {
            break;
        }
    }
    best
}

/// Largest `r = 2^-k` with `|f^p(w) - z_i| <= r/2` on the sampled circle
/// `|w - z_i| = r`, for every cycle point. Zero if none down to the floor.
fn absorbing_radius(p: &Parameter, cycle: &Cycle) -> f64 {
    const SAMPLES: usize = 256;
    let mut sep = f64::INFINITY;
    for (i, zi) in cycle.points.iter().enumerate() {
        for zj in &cycle.points[i + 1..] {
            sep = sep.min((zi - zj).norm());
        }
    }
    let mut r = 1.0f64;
    while r >= BASIN_RADIUS_FLOOR {
        if 3.0 * r <= sep {
            let ok = cycle.points.iter().all(|&c| {
                (0..SAMPLES).all(|j| {
                    let mut w = c + Complex64::from_polar(r, 2.0 * PI * j as f64 / SAMPLES as f64);
                    for _ in 0..cycle.period {
                        w = p.map(w);
                    }
                    (w - c).norm() <= 0.5 * r
                })
            });
            if ok {
                return r;
            }
        }
        r *= 0.5;
    }
    0.0
}

/// `find_cycle` with the defaults used throughout the crate.
pub fn default_cycle(p: &Parameter) -> Cycle {
    find_cycle(p, CYCLE_SEARCH_ITER, CYCLE_TOL)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Basin,
    /// `|f^k(z)| >= M^k(R)` verified for every `k` up to the depth.
    ArVerified(usize),
    EscapingNumerical,
    MeanderingCandidate(usize),
    Undecided,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub iterations: usize,
    pub basin_entry: Option<usize>,
    /// Phase of the basin component, `(i - n) mod p` for entry at cycle point `i` after `n` steps.
    pub phase: Option<usize>,
    /// Number of leading thresholds `k = 0, 1, ...` that were verified.
    pub verified_thresholds: usize,
    pub first_failed_threshold: Option<usize>,
    pub overflow_at: Option<usize>,
    pub precision_exhausted: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointClass {
    pub label: Label,
    pub depth: usize,
    pub evidence: Evidence,
}

/// Outcome of comparing a tracked point against `M^k(R)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThresholdTest {
    Above,
    Below,
    Inconclusive,
}

pub fn threshold_test(t: &Tracked, m: &IteratedModulus) -> ThresholdTest {
    if m.certainly_below(t.abs_lower()) {
        ThresholdTest::Above
    } else if t.abs_upper().is_finite() && m.certainly_above(TowerValue::from_f64(t.abs_upper())) {
        ThresholdTest::Below
    } else {
        ThresholdTest::Inconclusive
    }
}

/// Classifies many points against one parameter, caching the cycle and the
/// thresholds `M^k(R)`.
#[derive(Clone, Debug)]
pub struct Classifier {
    p: Parameter,
    cycle: Cycle,
    r: f64,
    depth: usize,
    max_iter: usize,
    thresholds: Vec<IteratedModulus>,
}

impl Classifier {
    pub fn new(p: &Parameter, r: f64, depth: usize, cycle: Cycle, max_iter: usize) -> Result<Self> {
        let thresholds = max_modulus_sequence(r, p, depth)?;
        Ok(Self { p: *p, cycle, r, depth, max_iter, thresholds })
    }

    /// Finds the cycle with default settings.
    pub fn for_parameter(p: &Parameter, r: f64, depth: usize) -> Result<Self> {
        Self::new(p, r, depth, default_cycle(p), DEFAULT_MAX_ITER)
    }

    pub fn parameter(&self) -> &Parameter {
        &self.p
    }

    pub fn cycle(&self) -> &Cycle {
        &self.cycle
    }

    pub fn radius(&self) -> f64 {
        self.r
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn thresholds(&self) -> &[IteratedModulus] {
        &self.thresholds
    }

    /// Basin phase of `z`, if its orbit is seen to enter an absorbing disc.
    pub fn basin_phase(&self, z: Complex64) -> Option<usize> {
        self.basin_entry(z).map(|(_, phase)| phase)
    }

    /// `(steps, phase)` of basin entry.
    pub fn basin_entry(&self, z: Complex64) -> Option<(usize, usize)> {
        if self.cycle.kind != CycleKind::Attracting {
            return None;
        }
        TrackedOrbit::new(z, &self.p).take(self.max_iter + 1).enumerate().find_map(|(n, t)| {
            let (w, err) = t.finite()?;
            let i = self.cycle.absorbing_index(w, err)?;
            Some((n, self.phase_of(i, n)))
        })
    }

    fn phase_of(&self, i: usize, n: usize) -> usize {
        let q = self.cycle.period;
        (i + q - n % q) % q
    }

    pub fn classify(&self, z: Complex64) -> PointClass {
        let mut ev = Evidence::default();
        let mut verified_run = true;
        let mut any_fail = false;
        let mut inconclusive = false;
        let parabolic = self.cycle.kind == CycleKind::ParabolicSuspect;
        let mut dist: Vec<f64> = Vec::new();

        let mut orbit = TrackedOrbit::new(z, &self.p);
        let mut steps = 0;
        for (k, t) in orbit.by_ref().take(self.max_iter + 1).enumerate() {
            steps = k + 1;
            if k <= self.depth {
                match threshold_test(&t, &self.thresholds[k]) {
                    ThresholdTest::Above => {
                        if verified_run {
                            ev.verified_thresholds += 1;
                        }
                    }
                    ThresholdTest::Below => {
                        verified_run = false;
                        any_fail = true;
                        ev.first_failed_threshold.get_or_insert(k);
                    }
                    ThresholdTest::Inconclusive => {
                        verified_run = false;
                        inconclusive = true;
                    }
                }
            }
            match t {
                Tracked::Huge { .. } => {
                    ev.overflow_at = Some(k);
                }
                Tracked::Finite { z: w, err } => {
                    if let Some(i) = self.cycle.absorbing_index(w, err) {
                        ev.basin_entry = Some(k);
                        ev.phase = Some(self.phase_of(i, k));
                        break;
                    }
                    if parabolic {
                        let d = self.cycle.points.iter().map(|c| (w - c).norm()).fold(f64::INFINITY, f64::min);
                        dist.push(d);
                    }
                }
            }
        }
        ev.iterations = steps;
        ev.precision_exhausted = orbit.precision_exhausted();
        if parabolic && ev.basin_entry.is_none() && cesaro_converging(&dist) {
            ev.basin_entry = Some(steps.saturating_sub(1));
        }

        let label = if ev.basin_entry.is_some() {
            Label::Basin
        } else if ev.verified_thresholds == self.depth + 1 {
            Label::ArVerified(self.depth)
        } else if ev.overflow_at.is_some() {
            Label::EscapingNumerical
        } else if any_fail && !inconclusive {
            Label::MeanderingCandidate(self.depth)
        } else {
            Label::Undecided
        };
        PointClass { label, depth: self.depth, evidence: ev }
    }
}

/// Heuristic for parabolic basins: the mean distance to the cycle over the
/// last 100 iterates is small and smaller than over the 100 before.
fn cesaro_converging(dist: &[f64]) -> bool {
    if dist.len() < 200 {
        return false;
    }
    let n = dist.len();
    let recent: f64 = dist[n - 100..].iter().sum::<f64>() / 100.0;
    let before: f64 = dist[n - 200..n - 100].iter().sum::<f64>() / 100.0;
    recent < 0.5 && recent < before
}

/// Classifies a single point. Finds the cycle on every call; use
/// [`Classifier`] for many points.
pub fn classify_point(z: Complex64, p: &Parameter, cfg: &GrowthConstants, depth: usize) -> Result<PointClass> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::invalid("point is not finite"));
    }
    Ok(Classifier::for_parameter(p, cfg.r, depth)?.classify(z))
}

/// A point whose forward orbit reaches the continued-growth region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum EscapeShift {
    Certified {
        /// First index with `Re f^m(z) >= max(R + 3, K(R + 1))`.
        m: usize,
        /// `Re f^m(z)`.
        base: f64,
        /// Side conditions checked for `f^{m+k}(z)`, `k < steps`.
        steps: usize,
        /// `F^k(base - 2)` for `k = 0..=steps`, lower bounds for `|f^{m+k}(z)|`.
        lower_bounds: Vec<TowerValue>,
    },
    Rejected { reason: String },
}

/// Searches the first `depth` iterates for one in the continued-growth
/// region with `mu = R + 1`, then checks the side conditions along the
/// computable part of the orbit.
pub fn certified_escape_shift(z: Complex64, p: &Parameter, r: f64, depth: usize) -> Result<EscapeShift> {
    if !(r > 0.0) {
        return Err(Error::invalid(format!("R must be positive, got {r}")));
    }
    let mu = r + 1.0;
    let threshold = (r + 3.0).max(continued_growth_k(mu, p));
    let orbit = iterate_map(z, p, depth, BAILOUT);
    let Some(m) = orbit.points.iter().position(|w| w.re >= threshold) else {
        return Ok(EscapeShift::Rejected {
            reason: format!("no iterate up to {depth} has real part >= {threshold}"),
        });
    };
    let base = orbit.points[m].re;
    // Continue past `depth` while the orbit is representable.
    let tail = iterate_map(orbit.points[m], p, 64, BAILOUT);
    let mut steps = 0;
    let mut level = TowerValue::from_f64(mu);
    for w in &tail.points {
        if TowerValue::from_f64((-w.re).max(w.im.abs())) > level {
            break;
        }
        steps += 1;
        level = crate::growth::eval_f(level);
    }
    let lower_bounds = (0..=steps).map(|k| iterate_f(base - 2.0, k)).collect();
    Ok(EscapeShift::Certified { m, base, steps, lower_bounds })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn iterate_map_example() {
        let p = Parameter::real(0.0).unwrap();
        let o = iterate_map(c(0.0, 0.0), &p, 3, BAILOUT);
        assert_eq!(o.points.len(), 4);
        assert!((o.points[3].re - std::f64::consts::E.exp()).abs() < 1e-12);
        let o = iterate_map(c(0.0, 0.0), &p, 10, BAILOUT);
        assert_eq!(o.terminated_by, Termination::Overflow);
    }

    #[test]
    fn cycles_of_reference_parameters() {
        let cy = default_cycle(&Parameter::real(-2.0).unwrap());
        assert_eq!(cy.period, 1);
        assert_eq!(cy.kind, CycleKind::Attracting);
        assert!((cy.points[0].re + 1.841_405_660_436_961).abs() < 1e-12);
        assert!(cy.absorbing_radius >= 0.5);

        let cy = default_cycle(&Parameter::new(c(2.061, 1.569)).unwrap());
        assert_eq!(cy.period, 3);
        assert_eq!(cy.kind, CycleKind::Attracting);
        assert!((cy.multiplier.norm() - 0.2044).abs() < 1e-3);

        let cy = default_cycle(&Parameter::real(-1.0).unwrap());
        assert_eq!(cy.period, 1);
        assert_eq!(cy.kind, CycleKind::ParabolicSuspect);

        let cy = default_cycle(&Parameter::real(1.0).unwrap());
        assert_eq!(cy.kind, CycleKind::None);
    }

    #[test]
    fn cycle_points_are_consistent() {
        let p = Parameter::new(c(2.061, 1.569)).unwrap();
        let cy = default_cycle(&p);
        for i in 0..cy.period {
            let next = cy.points[(i + 1) % cy.period];
            assert!((p.map(cy.points[i]) - next).norm() <= 1e-10);
        }
    }

    #[test]
    fn classify_examples() {
        let p = Parameter::real(-2.0).unwrap();
        let cls = Classifier::for_parameter(&p, 3.0, 3).unwrap();
        assert_eq!(cls.classify(c(-3.0, 0.0)).label, Label::Basin);
        assert_eq!(cls.classify(c(5.0, 0.0)).label, Label::ArVerified(3));
        let fixed = 1.146_193_220_620_582_6;
        assert_eq!(cls.classify(c(fixed, 0.0)).label, Label::MeanderingCandidate(3));
    }

    #[test]
    fn classify_point_wrapper() {
        let p = Parameter::real(-2.0).unwrap();
        let cfg = GrowthConstants::with_radius(&p, 3.0).unwrap();
        assert_eq!(classify_point(c(5.0, 0.0), &p, &cfg, 3).unwrap().label, Label::ArVerified(3));
        assert!(classify_point(c(f64::NAN, 0.0), &p, &cfg, 3).is_err());
    }

    #[test]
    fn basin_phase_of_period_three() {
        let p = Parameter::new(c(2.061, 1.569)).unwrap();
        let cls = Classifier::for_parameter(&p, 3.0, 2).unwrap();
        let pa = cls.basin_phase(p.a()).unwrap();
        let pfa = cls.basin_phase(p.map(p.a())).unwrap();
        assert_eq!((pa + 1) % 3, pfa);
        assert_eq!(cls.basin_phase(c(-40.0, 0.0)), Some((pa + 2) % 3));
    }

    #[test]
    fn escape_shift() {
        let p = Parameter::real(-2.0).unwrap();
        match certified_escape_shift(c(20.0, 0.0), &p, 3.0, 3).unwrap() {
            EscapeShift::Certified { m, steps, lower_bounds, .. } => {
                assert_eq!(m, 0);
                assert_eq!(steps, 2);
                assert_eq!(lower_bounds.len(), 3);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            certified_escape_shift(c(-3.0, 0.0), &p, 3.0, 3).unwrap(),
            EscapeShift::Rejected { .. }
        ));
    }
}
