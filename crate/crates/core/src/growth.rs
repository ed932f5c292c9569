//! The growth calculus: `F(t) = e^t - 1`, the maximum modulus of `f_a` on
//! circles and the inequalities that compare the two.
//!
//! Iterates of `F` leave the f64 range after two or three steps, so they are
//! carried as [`TowerValue`]s.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Values above this are stored one exponential level up.
pub const TOWER_CUTOFF: f64 = 1e300;

/// `ln(TOWER_CUTOFF)`.
pub const LN_TOWER_CUTOFF: f64 = 690.775_527_898_213_7;

/// Largest `x` with `e^x` finite.
pub const LN_F64_MAX: f64 = 709.782_712_893_384;

/// Number of angles in the coarse scan of [`max_modulus`].
pub const MAX_MODULUS_GRID: usize = 4096;

/// Relative accuracy promised by [`max_modulus`].
pub const MAX_MODULUS_RTOL: f64 = 1e-10;

/// Relative slack allowed when testing the growth sandwich.
pub const SANDWICH_RTOL: f64 = 1e-12;

/// A point of the parameter plane, `f(z) = e^z + a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Parameter {
    a: Complex64,
}

impl Parameter {
    pub fn new(a: Complex64) -> Result<Self> {
        if !(a.re.is_finite() && a.im.is_finite()) {
            return Err(Error::invalid(format!("parameter {a} is not finite")));
        }
        Ok(Self { a })
    }

    pub fn real(a: f64) -> Result<Self> {
        Self::new(Complex64::new(a, 0.0))
    }

    #[inline]
    pub fn a(&self) -> Complex64 {
        self.a
    }

    #[inline]
    pub fn abs(&self) -> f64 {
        self.a.norm()
    }

    pub fn is_real(&self) -> bool {
        self.a.im == 0.0
    }

    /// `e^z + a`.
    #[inline]
    pub fn map(&self, z: Complex64) -> Complex64 {
        z.exp() + self.a
    }

    /// Threshold on `Re z` above which the growth sandwich holds with constant `k`.
    pub fn sandwich_threshold(&self, k: f64) -> f64 {
        (2.0 * (self.abs() + k)).ln_1p()
    }
}

impl TryFrom<[f64; 2]> for Parameter {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Parameter::new(Complex64::new(v[0], v[1]))
    }
}

impl From<Parameter> for [f64; 2] {
    fn from(p: Parameter) -> Self {
        [p.a.re, p.a.im]
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a = {}", self.a)
    }
}

/// A nonnegative-or-small real number that may be far outside the f64 range.
///
/// Level 0 is a plain float `<= 1e300`. Level `k > 0` stands for
/// `exp^k(base)` with `base` in `(ln 1e300, 1e300]`. The representation is
/// canonical, so the derived ordering on `(level, base)` is the numeric one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerValue {
    level: u32,
    base: f64,
}

impl TowerValue {
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "tower value from non-finite {x}");
        Self::normalized(0, x)
    }

    /// `exp^level(base)`.
    pub fn from_parts(level: u32, base: f64) -> Self {
        assert!(base.is_finite(), "tower base is not finite");
        assert!(level == 0 || base > 0.0, "tower base must be positive above level 0");
        Self::normalized(level, base)
    }

    fn normalized(mut level: u32, mut base: f64) -> Self {
        loop {
            if base > TOWER_CUTOFF {
                base = base.ln();
                level += 1;
            } else if level > 0 && base <= LN_TOWER_CUTOFF {
                base = base.exp();
                level -= 1;
            } else {
                return Self { level, base };
            }
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    /// The value as a float, if it is at level 0.
    pub fn as_f64(&self) -> Option<f64> {
        (self.level == 0).then_some(self.base)
    }

    /// Like [`as_f64`](Self::as_f64) but maps large values to infinity.
    pub fn to_f64_saturating(&self) -> f64 {
        self.as_f64().unwrap_or(f64::INFINITY)
    }

    /// Natural logarithm. Panics on nonpositive level-0 values.
    pub fn ln(&self) -> Self {
        if self.level == 0 {
            assert!(self.base > 0.0, "ln of nonpositive {}", self.base);
            Self::from_f64(self.base.ln())
        } else {
            Self::normalized(self.level - 1, self.base)
        }
    }

    /// `log10` as a tower value.
    pub fn log10(&self) -> Self {
        let l = self.ln();
        match l.as_f64() {
            Some(x) => Self::from_f64(x / std::f64::consts::LN_10),
            // Dividing a level >= 1 value by ln 10 is below its resolution.
            None => l,
        }
    }

    /// Adds a float. Above level 0 the shift is far below the resolution of
    /// the representation and the value is returned unchanged.
    pub fn add(&self, x: f64) -> Self {
        if self.level == 0 {
            Self::from_f64(self.base + x)
        } else {
            *self
        }
    }
}

impl Eq for TowerValue {}

impl PartialOrd for TowerValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TowerValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.level
            .cmp(&other.level)
            .then(self.base.total_cmp(&other.base))
    }
}

impl From<f64> for TowerValue {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl fmt::Display for TowerValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.level == 0 {
            write!(f, "{}", self.base)
        } else {
            write!(f, "exp^{}({})", self.level, self.base)
        }
    }
}

/// `F(t) = e^t - 1`.
pub fn eval_f(t: TowerValue) -> TowerValue {
    match t.as_f64() {
        Some(x) if x <= LN_TOWER_CUTOFF => TowerValue::from_f64(x.exp_m1()),
        // e^t - 1 and e^t agree to ~1e-300 relative here.
        Some(x) => TowerValue::normalized(1, x),
        None => TowerValue::normalized(t.level + 1, t.base),
    }
}

/// `F^n(t)`.
pub fn iterate_f(t: f64, n: usize) -> TowerValue {
    (0..n).fold(TowerValue::from_f64(t), |v, _| eval_f(v))
}

/// Constants shared by the escaping-set machinery.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthConstants {
    /// Additive constant in the growth sandwich.
    pub k: f64,
    /// Side-condition level for continued growth.
    pub mu: f64,
    /// Radius of the escaping set `A_R`.
    pub r: f64,
    /// Left half-plane used as a trap, `Re z <= -c`.
    pub c: f64,
    /// `max(2 + ln(5 + |a|), mu + 2)`.
    pub k_growth: f64,
}

impl GrowthConstants {
    pub fn new(p: &Parameter, k: f64, mu: f64, r: f64, c: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::invalid(format!("K must be positive, got {k}")));
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::invalid(format!("R must be positive, got {r}")));
        }
        if !mu.is_finite() || !c.is_finite() {
            return Err(Error::invalid("mu and c must be finite"));
        }
        Ok(Self { k, mu, r, c, k_growth: continued_growth_k(mu, p) })
    }

    /// `K = 1, mu = 0, c = ln 10` with the given radius.
    pub fn with_radius(p: &Parameter, r: f64) -> Result<Self> {
        Self::new(p, 1.0, 0.0, r, 10f64.ln())
    }
}

/// `max(2 + ln(5 + |a|), mu + 2)`.
pub fn continued_growth_k(mu: f64, p: &Parameter) -> f64 {
    (2.0 + (5.0 + p.abs()).ln()).max(mu + 2.0)
}

/// Maximum of `|e^z + a|` over `|z| = r`, to relative accuracy 1e-10.
///
/// A 4096-point scan of the circle seeds golden-section refinement of the
/// best local maxima.
pub fn max_modulus(r: f64, p: &Parameter) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::invalid(format!("radius must be positive, got {r}")));
    }
    if r > LN_F64_MAX {
        return Err(Error::Overflow { r });
    }
    let a = p.a();
    let g = |theta: f64| {
        let (s, c) = theta.sin_cos();
        (Complex64::from_polar((r * c).exp(), r * s) + a).norm()
    };

    let n = MAX_MODULUS_GRID;
    let step = 2.0 * PI / n as f64;
    let vals: Vec<f64> = (0..n).map(|j| g(-PI + step * j as f64)).collect();
    let mut peaks: Vec<usize> = (0..n)
        .filter(|&j| {
            let v = vals[j];
            v >= vals[(j + n - 1) % n] && v >= vals[(j + 1) % n]
        })
        .collect();
    peaks.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    peaks.truncate(16);

    let mut best = g(0.0).max(g(PI));
    for j in peaks {
        let centre = -PI + step * j as f64;
        best = best.max(golden_max(&g, centre - step, centre + step));
    }
    Ok(best)
}

fn golden_max(g: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut g1, mut g2) = (g(x1), g(x2));
    let mut best = g1.max(g2);
    for _ in 0..80 {
        if g1 < g2 {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + INV_PHI * (hi - lo);
            g2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - INV_PHI * (hi - lo);
            g1 = g(x1);
        }
        best = best.max(g1).max(g2);
        if hi - lo < 1e-15 {
            break;
        }
    }
    best
}

/// `M^n(R)`, either computed exactly or enclosed by the growth sandwich.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IteratedModulus {
    pub n: usize,
    /// Set when every step could be evaluated in f64.
    pub exact: Option<f64>,
    pub lower: TowerValue,
    pub upper: TowerValue,
}

impl IteratedModulus {
    fn exact(n: usize, v: f64) -> Self {
        let (lo, hi) = if n == 0 {
            (v, v)
        } else {
            (v * (1.0 - 2.0 * MAX_MODULUS_RTOL), v * (1.0 + 2.0 * MAX_MODULUS_RTOL))
        };
        Self { n, exact: Some(v), lower: lo.into(), upper: hi.into() }
    }

    /// True when `x` is certainly at least `M^n(R)`.
    pub fn certainly_below(&self, x: TowerValue) -> bool {
        x >= self.upper
    }

    /// True when `x` is certainly smaller than `M^n(R)`.
    pub fn certainly_above(&self, x: TowerValue) -> bool {
        x < self.lower
    }
}

/// `M^k(R)` for `k = 0..=depth`.
///
/// Once a value passes the f64 range the remaining entries are bracketed by
/// `F^j(v - 1) + 1 <= M^j(v) <= F^j(v + 1) - 1`, started from the last exact
/// value `v` (which is above 709, so the sandwich applies).
pub fn max_modulus_sequence(r: f64, p: &Parameter, depth: usize) -> Result<Vec<IteratedModulus>> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::invalid(format!("radius must be positive, got {r}")));
    }
    let mut out = vec![IteratedModulus::exact(0, r)];
    let mut v = r;
    for k in 1..=depth {
        if v > LN_F64_MAX {
            let j = k - out.iter().rposition(|m| m.exact.is_some()).unwrap_or(0);
            debug_assert!(j >= 1);
            let lower = iterate_f(v - 1.0, j).add(1.0);
            let upper = iterate_f(v + 1.0, j).add(-1.0);
            out.push(IteratedModulus { n: k, exact: None, lower, upper });
        } else {
            v = max_modulus(v, p)?;
            out.push(IteratedModulus::exact(k, v));
        }
    }
    Ok(out)
}

/// `M^n(R)`.
pub fn max_modulus_iter(r: f64, p: &Parameter, n: usize) -> Result<IteratedModulus> {
    Ok(*max_modulus_sequence(r, p, n)?.last().expect("sequence is never empty"))
}

/// `(F^n(R - 1) + K, F^n(R + 1) - K)`, which encloses `M^n(R)` when
/// `R >= max(3, ln(1 + 2(|a| + K)))`.
pub fn growth_bracket(r: f64, n: usize, k: f64, p: &Parameter) -> Result<(TowerValue, TowerValue)> {
    if !(k > 0.0) {
        return Err(Error::invalid(format!("K must be positive, got {k}")));
    }
    let need = p.sandwich_threshold(k).max(3.0);
    if !(r >= need) {
        return Err(Error::precondition(format!("R = {r} is below max(3, ln(1 + 2(|a| + K))) = {need}")));
    }
    Ok((iterate_f(r - 1.0, n).add(k), iterate_f(r + 1.0, n).add(-k)))
}

/// Outcome of testing `F(Re z - 1) + K <= |f(z)| <= F(Re z + 1) - K`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichCheck {
    pub holds: bool,
    /// `(|f(z)| - lower) / |f(z)|`, or the log-domain difference for large `Re z`.
    pub lower_slack: f64,
    /// `(upper - |f(z)|) / |f(z)|`, likewise.
    pub upper_slack: f64,
}

/// Tests the growth sandwich at `z`. Requires `Re z >= ln(1 + 2(|a| + K))`.
pub fn growth_sandwich(z: Complex64, k: f64, p: &Parameter) -> Result<SandwichCheck> {
    if !(k > 0.0) {
        return Err(Error::invalid(format!("K must be positive, got {k}")));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::invalid("point is not finite"));
    }
    let need = p.sandwich_threshold(k);
    if !(z.re >= need) {
        return Err(Error::precondition(format!("Re z = {} is below ln(1 + 2(|a| + K)) = {need}", z.re)));
    }
    let x = z.re;
    let (lower_slack, upper_slack) = if x + 1.0 <= LN_F64_MAX {
        let val = p.map(z).norm();
        let lo = (x - 1.0).exp_m1() + k;
        let hi = (x + 1.0).exp_m1() - k;
        ((val - lo) / val, (hi - val) / val)
    } else {
        // ln|e^z + a| = x + ln|1 + a e^{-z}|
        let ln_val = x + (Complex64::new(1.0, 0.0) + p.a() * (-z).exp()).norm().ln();
        let ln_lo = (x - 1.0) + ((k - 1.0) * (1.0 - x).exp()).ln_1p();
        let ln_hi = (x + 1.0) + (-(k + 1.0) * (-1.0 - x).exp()).ln_1p();
        (ln_val - ln_lo, ln_hi - ln_val)
    };
    Ok(SandwichCheck {
        holds: lower_slack >= -SANDWICH_RTOL && upper_slack >= -SANDWICH_RTOL,
        lower_slack,
        upper_slack,
    })
}

/// Result of the continued-growth test along a computed orbit prefix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ContinuedGrowth {
    /// `|f^n(z)| >= F^n(Re z - 2)` with `n` the prefix length.
    Certified { n: usize, lower_bound: TowerValue },
    /// The side condition `max(-Re w_k, |Im w_k|) <= F^k(mu)` failed at `index`.
    Rejected { index: usize },
}

/// Checks the side conditions on `prefix = [z, f(z), ..., f^{n-1}(z)]` and
/// returns the lower bound for `|f^n(z)|`. Requires `Re z >= K(mu)`.
pub fn continued_growth_bound(z: Complex64, mu: f64, p: &Parameter, prefix: &[Complex64]) -> Result<ContinuedGrowth> {
    let kg = continued_growth_k(mu, p);
    if !(z.re >= kg) {
        return Err(Error::precondition(format!("Re z = {} is below K = {kg}", z.re)));
    }
    let mut w = z;
    for (index, &given) in prefix.iter().enumerate() {
        let diff = (given - w).norm();
        if !(diff <= 1e-9 * w.norm().max(1.0)) {
            return Err(Error::OrbitMismatch { index, diff });
        }
        w = p.map(w);
    }
    let mut level = TowerValue::from_f64(mu);
    for (index, w) in prefix.iter().enumerate() {
        let side = (-w.re).max(w.im.abs());
        if TowerValue::from_f64(side) > level {
            return Ok(ContinuedGrowth::Rejected { index });
        }
        level = eval_f(level);
    }
    Ok(ContinuedGrowth::Certified { n: prefix.len(), lower_bound: iterate_f(z.re - 2.0, prefix.len()) })
}

/// Which half of the argument for `M(R) > R` applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RZeroCase {
    /// `R + e^{-R} < -Re a`: use `|f(-R)| >= -Re a - e^{-R}`.
    LeftPoint,
    /// Otherwise `|f(R)| >= e^R + Re a >= 2 sinh R - R`.
    RightPoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RZeroEntry {
    pub r: f64,
    pub m: f64,
    pub margin: f64,
    pub case: RZeroCase,
    /// Analytic lower bound for `M(R)` from the applicable case.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RZeroReport {
    pub parameter: Parameter,
    pub entries: Vec<RZeroEntry>,
    pub all_hold: bool,
}

/// Checks `M(R) > R` at each radius, together with the analytic lower bound.
pub fn verify_r_zero(p: &Parameter, radii: &[f64]) -> Result<RZeroReport> {
    let entries = radii
        .iter()
        .map(|&r| {
            let m = max_modulus(r, p)?;
            let (case, bound) = if r + (-r).exp() < -p.a().re {
                (RZeroCase::LeftPoint, -p.a().re - (-r).exp())
            } else {
                (RZeroCase::RightPoint, 2.0 * r.sinh() - r)
            };
            let holds = m > r && bound > r && m >= bound * (1.0 - MAX_MODULUS_RTOL);
            Ok(RZeroEntry { r, m, margin: m - r, case, bound, holds })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RZeroReport { parameter: *p, all_hold: entries.iter().all(|e| e.holds), entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_max(r: f64, p: &Parameter, n: usize) -> f64 {
        (0..n)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / n as f64;
                p.map(Complex64::from_polar(r, t)).norm()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn f_values() {
        assert_eq!(iterate_f(0.0, 5).as_f64(), Some(0.0));
        assert!((iterate_f(1.0, 1).as_f64().unwrap() - 1.718_281_828_459_045).abs() < 1e-15);
        // e^(e - 1) - 1
        assert!((iterate_f(1.0, 2).as_f64().unwrap() - 4.574_941_524_760_88).abs() < 1e-12);
    }

    #[test]
    fn tower_levels() {
        let v = iterate_f(3.0, 3);
        assert_eq!(v.level(), 1);
        let l10 = v.log10().as_f64().unwrap();
        assert!((l10 / 8.49e7 - 1.0).abs() < 1e-2, "{l10}");
        assert!(iterate_f(3.0, 4) > v);
        assert_eq!(iterate_f(3.0, 4).level(), 2);
        assert_eq!(v.ln().ln().level(), 0);
    }

    #[test]
    fn tower_normalisation_round_trips() {
        let v = TowerValue::from_parts(2, 5.0);
        // exp(exp(5)) = exp(148.4), still level 0
        assert_eq!(v.level(), 0);
        assert!((v.base().ln() - 5f64.exp()).abs() < 1e-9);
        let w = TowerValue::from_parts(1, 1e6);
        assert_eq!(w.level(), 1);
        assert!(w > TowerValue::from_f64(1e300));
    }

    #[test]
    fn max_modulus_matches_dense_scan() {
        let p = Parameter::real(-2.0).unwrap();
        let m = max_modulus(3.0, &p).unwrap();
        assert!((m - (3f64.exp() - 2.0)).abs() < 1e-9 * m, "{m}");
        let q = Parameter::new(Complex64::new(2.061, 1.569)).unwrap();
        for r in [0.01, 0.7, 3.0, 11.0] {
            let m = max_modulus(r, &q).unwrap();
            let d = dense_max(r, &q, 400_000);
            assert!(m >= d * (1.0 - 1e-10) && m <= d * (1.0 + 1e-8), "r={r} m={m} dense={d}");
        }
    }

    #[test]
    fn max_modulus_large_radius_and_overflow() {
        let p = Parameter::real(-2.0).unwrap();
        let m = max_modulus(700.0, &p).unwrap();
        assert!((m / (700f64.exp() - 2.0) - 1.0).abs() < 1e-12);
        assert!(matches!(max_modulus(710.0, &p), Err(Error::Overflow { .. })));
        assert!(max_modulus(0.0, &p).is_err());
    }

    #[test]
    fn k_growth_values() {
        let p = Parameter::real(-2.0).unwrap();
        assert!((continued_growth_k(0.0, &p) - (2.0 + 7f64.ln())).abs() < 1e-15);
        assert_eq!(continued_growth_k(10.0, &p), 12.0);
    }

    #[test]
    fn iterated_modulus_switches_to_bracket() {
        let p = Parameter::real(-2.0).unwrap();
        let seq = max_modulus_sequence(3.0, &p, 4).unwrap();
        assert_eq!(seq[0].exact, Some(3.0));
        assert!(seq[2].exact.is_some());
        // M^3(3) = e^(e^(e^3-2)-2) - 2 overflows f64
        assert!(seq[3].exact.is_none());
        assert!(seq[3].lower < seq[3].upper);
        assert!(seq[3].lower >= seq[2].upper);
        let (lo, hi) = growth_bracket(3.0, 4, 1.0, &p).unwrap();
        assert!(lo <= seq[4].lower && seq[4].upper <= hi);
    }

    #[test]
    fn bracket_preconditions() {
        let p = Parameter::real(-2.0).unwrap();
        assert!(matches!(growth_bracket(2.0, 1, 1.0, &p), Err(Error::Precondition(_))));
        assert!(growth_bracket(3.0, 1, 0.0, &p).is_err());
    }

    #[test]
    fn sandwich_at_threshold_and_far_right() {
        let p = Parameter::new(Complex64::new(0.3, -1.2)).unwrap();
        let x = p.sandwich_threshold(1.0);
        assert!(growth_sandwich(Complex64::new(x, 0.7), 1.0, &p).unwrap().holds);
        assert!(growth_sandwich(Complex64::new(900.0, 2.0), 1.0, &p).unwrap().holds);
        assert!(growth_sandwich(Complex64::new(x - 1e-3, 0.0), 1.0, &p).is_err());
    }

    #[test]
    fn continued_growth_examples() {
        let p = Parameter::real(-2.0).unwrap();
        let z = Complex64::new(10.0, 0.0);
        match continued_growth_bound(z, 0.0, &p, &[z]).unwrap() {
            ContinuedGrowth::Certified { n, lower_bound } => {
                assert_eq!(n, 1);
                assert!((lower_bound.as_f64().unwrap() - 8f64.exp_m1()).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
        let z = Complex64::new(10.0, 3.0);
        assert_eq!(continued_growth_bound(z, 0.0, &p, &[z]).unwrap(), ContinuedGrowth::Rejected { index: 0 });
        let bad = [z, Complex64::new(0.0, 0.0)];
        assert!(matches!(continued_growth_bound(z, 0.0, &p, &bad), Err(Error::OrbitMismatch { index: 1, .. })));
        assert!(continued_growth_bound(Complex64::new(1.0, 0.0), 0.0, &p, &[]).is_err());
    }

    #[test]
    fn r_zero_cases() {
        let p = Parameter::real(-5.0).unwrap();
        let rep = verify_r_zero(&p, &[0.5, 6.0]).unwrap();
        assert!(rep.all_hold);
        assert_eq!(rep.entries[0].case, RZeroCase::LeftPoint);
        assert_eq!(rep.entries[1].case, RZeroCase::RightPoint);
    }
}
