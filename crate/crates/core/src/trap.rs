//! Access arcs, trap sets and separation certificates.
//!
//! The trap is `M = f^{-1}(D(a, eps) ∪ sigma)`: the half-plane `Re z <= -c`
//! (with `eps = e^{-c}`) together with the `2 pi i` translates of one
//! preimage of the access arc `sigma`. A point belongs to the truncated set
//! `X_N` when, for every `k <= N`, either `|f^k(z)| >= M^k(R)` or its orbit
//! entered the trap before time `k`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::{continued_growth_k, max_modulus_sequence, IteratedModulus, Parameter};
use crate::orbit::{threshold_test, Classifier, Cycle, CycleKind, ThresholdTest, Tracked, TrackedOrbit, DEFAULT_MAX_ITER};
use crate::raster::{flood_fill, GridSpec, Mask};
use crate::TOOL_VERSION;

/// Points within this distance of a trap arc polyline count as on the arc.
pub const ARC_TOL: f64 = 1e-9;

/// Choices made while building an access arc.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArcOptions {
    /// Vertical offsets tried, in order, before running left.
    pub offsets: Vec<f64>,
    /// The leftward ray reaches `Re = start - (e^u - 1)` for `u` up to this.
    pub left_reach: f64,
    /// Step in `u` along the leftward ray.
    pub ray_step: f64,
    /// Arcs are cut after the first vertex with real part above this.
    pub re_cap: f64,
    /// Minimum distance between the source curve and the singular orbit.
    pub avoid: f64,
    /// Segments are bisected while their image jumps by more than this.
    pub max_jump: f64,
}

impl Default for ArcOptions {
    fn default() -> Self {
        Self {
            offsets: vec![0.0, PI / 2.0, -PI / 2.0, PI, -PI, 1.0, -1.0, 2.0, -2.0],
            left_reach: 680.0,
            ray_step: 0.25,
            re_cap: 50.0,
            avoid: 1e-3,
            max_jump: PI / 2.0,
        }
    }
}

/// An arc in the Fatou component of `a`, from the circle `|z - a| = eps` to
/// large real part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AccessArc {
    pub vertices: Vec<Complex64>,
    /// Real part is nondecreasing from this vertex on.
    pub realpart_monotone_from: usize,
    pub eps: f64,
    /// Vertical offset of the source curve.
    pub offset: f64,
    /// Number of pullbacks applied to the source curve.
    pub pullbacks: usize,
}

/// `Log(w - a) + 2 pi i k` with the principal logarithm.
#[inline]
pub fn branch_log(w: Complex64, a: Complex64, k: i64) -> Complex64 {
    (w - a).ln() + Complex64::new(0.0, TAU * k as f64)
}

fn unwrap_near(l: Complex64, im: f64) -> Complex64 {
    let k = ((im - l.im) / TAU).round();
    l + Complex64::new(0.0, TAU * k)
}

/// Pulls a polyline back under `f` by continuation of one logarithm branch.
///
/// The branch at the first vertex is the one landing nearest `start`, or
/// the principal one. Segments are bisected while consecutive images are
/// more than `max_jump` apart.
pub fn pull_back(curve: &[Complex64], a: Complex64, start: Option<Complex64>, max_jump: f64) -> Result<Vec<Complex64>> {
    let Some(&first) = curve.first() else {
        return Ok(Vec::new());
    };
    let log = |w: Complex64, step: usize| {
        if w == a {
            Err(Error::BranchCut { step, point: format!("{w}") })
        } else {
            Ok((w - a).ln())
        }
    };
    let mut img = log(first, 0)?;
    if let Some(s) = start {
        img = unwrap_near(img, s.im);
    }
    let mut out = Vec::with_capacity(curve.len());
    out.push(img);
    let mut src = first;
    for (step, &target) in curve.iter().enumerate().skip(1) {
        let mut pending = vec![target];
        while let Some(&t) = pending.last() {
            let l = unwrap_near(log(t, step)?, img.im);
            let tiny = (t - src).norm() <= 1e-13 * t.norm().max(1.0);
            if (l - img).norm() > max_jump && !tiny && pending.len() < 64 {
                pending.push((src + t) * 0.5);
                continue;
            }
            out.push(l);
            img = l;
            src = t;
            pending.pop();
        }
    }
    Ok(out)
}

fn dist_to_segment(z: Complex64, p: Complex64, q: Complex64) -> f64 {
    let d = q - p;
    let len = d.norm();
    if len == 0.0 {
        return (z - p).norm();
    }
    // Unit direction first: far vertices overflow |d|^2.
    let u = d / len;
    let t = ((z - p) * u.conj()).re.clamp(0.0, len);
    (z - (p + u * t)).norm()
}

/// A vertical step by `h` from `start`, then a ray running left.
fn source_curve(start: Complex64, h: f64, opts: &ArcOptions) -> Vec<Complex64> {
    let mut v = vec![start];
    if h != 0.0 {
        let steps = 32;
        v.extend((1..=steps).map(|j| start + Complex64::new(0.0, h * j as f64 / steps as f64)));
    }
    let corner = *v.last().expect("non-empty");
    let count = (opts.left_reach / opts.ray_step).ceil() as usize;
    v.extend((1..=count).map(|j| corner - (j as f64 * opts.ray_step).exp_m1()));
    v
}

fn avoids(curve: &[Complex64], points: &[Complex64], tol: f64) -> bool {
    curve.windows(2).all(|s| points.iter().all(|&o| dist_to_segment(o, s[0], s[1]) >= tol))
}

/// Cuts `curve` where it last leaves the disc `|z - a| <= eps`, then after
/// the first vertex beyond `re_cap`.
fn trim(curve: &[Complex64], a: Complex64, eps: f64, re_cap: f64) -> Result<Vec<Complex64>> {
    let last_in = curve
        .iter()
        .rposition(|z| (z - a).norm() <= eps)
        .ok_or_else(|| Error::ArcConstruction("curve does not start inside the disc".into()))?;
    if last_in + 1 >= curve.len() {
        return Err(Error::ArcConstruction("curve never leaves the disc".into()));
    }
    let (p, q) = (curve[last_in], curve[last_in + 1]);
    // Larger root of |p - a + t (q - p)| = eps.
    let d = q - p;
    let e = p - a;
    let (aa, bb, cc) = (d.norm_sqr(), 2.0 * (e * d.conj()).re, e.norm_sqr() - eps * eps);
    let t = (-bb + (bb * bb - 4.0 * aa * cc).max(0.0).sqrt()) / (2.0 * aa);
    let off = e + d * t.clamp(0.0, 1.0);
    let cross = a + off * (eps / off.norm());
    let mut out = vec![cross];
    for &z in &curve[last_in + 1..] {
        out.push(z);
        if z.re > re_cap {
            break;
        }
    }
    Ok(out)
}

fn monotone_from(v: &[Complex64]) -> usize {
    let mut i = v.len().saturating_sub(1);
    while i > 0 && v[i - 1].re <= v[i].re {
        i -= 1;
    }
    i
}

/// Builds the access arc from the circle `|z - a| = eps` to large real part.
///
/// A source curve starting at `f^n(a)`, `n = max(1, p - 1)`, is chosen in the
/// Fatou component containing a left half-plane and pulled back `n` times
/// along the orbit of `a`.
pub fn build_access_arc(p: &Parameter, cycle: &Cycle, eps: f64) -> Result<AccessArc> {
    build_access_arc_with(p, cycle, eps, &ArcOptions::default())
}

pub fn build_access_arc_with(p: &Parameter, cycle: &Cycle, eps: f64, opts: &ArcOptions) -> Result<AccessArc> {
    if cycle.kind != CycleKind::Attracting {
        return Err(Error::Unsupported(format!("access arcs need an attracting cycle, found {:?}", cycle.kind)));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("eps must lie in (0, 1), got {eps}")));
    }
    let a = p.a();
    let cls = Classifier::new(p, 1.0, 0, cycle.clone(), DEFAULT_MAX_ITER)?;
    let phase_a = cls
        .basin_phase(a)
        .ok_or_else(|| Error::ArcConstruction("singular value not seen in the basin".into()))?;
    for j in 0..64 {
        let w = a + Complex64::from_polar(eps, TAU * j as f64 / 64.0);
        if cls.basin_phase(w) != Some(phase_a) {
            return Err(Error::ArcConstruction(format!("disc of radius {eps} around a leaves the Fatou component at {w}")));
        }
    }

    let n = cycle.period.saturating_sub(1).max(1);
    let mut orbit = vec![a];
    for _ in 0..n {
        orbit.push(p.map(*orbit.last().expect("non-empty")));
    }
    let phase_n = (phase_a + n) % cycle.period;

    let mut last_err = None;
    for &h in &opts.offsets {
        let gamma0 = source_curve(orbit[n], h, opts);
        if !avoids(&gamma0, &orbit[..n], opts.avoid) {
            last_err = Some(format!("offset {h}: source curve passes the singular orbit"));
            continue;
        }
        if let Some(w) = gamma0.iter().find(|&&w| cls.basin_phase(w) != Some(phase_n)) {
            last_err = Some(format!("offset {h}: source vertex {w} not in the expected component"));
            continue;
        }
        let mut curve = gamma0;
        for j in (0..n).rev() {
            curve = pull_back(&curve, a, Some(orbit[j]), opts.max_jump)?;
        }
        if (curve[0] - a).norm() > 1e-9 * a.norm().max(1.0) {
            last_err = Some(format!("offset {h}: pullback starts at {} instead of a", curve[0]));
            continue;
        }
        let vertices = trim(&curve, a, eps, opts.re_cap)?;
        if let Some(w) = vertices.iter().find(|&&w| cls.basin_phase(w) != Some(phase_a)) {
            last_err = Some(format!("offset {h}: arc vertex {w} failed basin verification"));
            continue;
        }
        return Ok(AccessArc {
            realpart_monotone_from: monotone_from(&vertices),
            vertices,
            eps,
            offset: h,
            pullbacks: n,
        });
    }
    Err(Error::ArcConstruction(last_err.unwrap_or_else(|| "no offsets configured".into())))
}

/// Buckets polyline segments by real part for distance queries.
#[derive(Clone, Debug, PartialEq)]
struct SegmentIndex {
    re_min: f64,
    re_max: f64,
    buckets: Vec<Vec<u32>>,
}

impl SegmentIndex {
    const BUCKETS: usize = 512;

    fn new(v: &[Complex64]) -> Self {
        let re_min = v.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        let re_max = v.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let mut buckets = vec![Vec::new(); Self::BUCKETS];
        let idx = Self { re_min, re_max, buckets: Vec::new() };
        for (s, w) in v.windows(2).enumerate() {
            let (lo, hi) = (idx.bucket(w[0].re.min(w[1].re)), idx.bucket(w[0].re.max(w[1].re)));
            for b in &mut buckets[lo..=hi] {
                b.push(s as u32);
            }
        }
        Self { buckets, ..idx }
    }

    fn bucket(&self, re: f64) -> usize {
        let span = (self.re_max - self.re_min).max(1e-300);
        (((re - self.re_min) / span * Self::BUCKETS as f64) as usize).min(Self::BUCKETS - 1)
    }

    fn distance(&self, v: &[Complex64], z: Complex64, tol: f64) -> f64 {
        if z.re < self.re_min - tol || z.re > self.re_max + tol || v.len() < 2 {
            return f64::INFINITY;
        }
        let (lo, hi) = (self.bucket(z.re - tol), self.bucket(z.re + tol));
        self.buckets[lo..=hi]
            .iter()
            .flatten()
            .map(|&s| dist_to_segment(z, v[s as usize], v[s as usize + 1]))
            .fold(f64::INFINITY, f64::min)
    }
}

/// `{Re z <= -c}` together with the `2 pi i` translates of one preimage of
/// the access arc.
#[derive(Clone, Debug)]
pub struct TrapSet {
    parameter: Parameter,
    eps: f64,
    c: f64,
    sigma: Vec<Complex64>,
    base_arc: Vec<Complex64>,
    im_min: f64,
    im_max: f64,
    delta: f64,
    index: SegmentIndex,
}

impl TrapSet {
    pub fn parameter(&self) -> &Parameter {
        &self.parameter
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `-ln eps`.
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn sigma(&self) -> &[Complex64] {
        &self.sigma
    }

    pub fn base_arc(&self) -> &[Complex64] {
        &self.base_arc
    }

    /// Imaginary extent of the base arc, including its limit at the far end.
    pub fn im_range(&self) -> (f64, f64) {
        (self.im_min, self.im_max)
    }

    /// Membership of the exact point `z`.
    pub fn contains(&self, z: Complex64) -> bool {
        self.contains_within(z, 0.0)
    }

    /// True when every point within `err` of `z` lies in the trap.
    /// Arc membership uses the tolerance [`ARC_TOL`] and is a lenient test.
    pub fn contains_within(&self, z: Complex64, err: f64) -> bool {
        if z.re + err <= -self.c {
            return true;
        }
        let tol = ARC_TOL;
        if err > tol {
            return false;
        }
        let k_lo = ((z.im - self.im_max - tol) / TAU).ceil() as i64;
        let k_hi = ((z.im - self.im_min + tol) / TAU).floor() as i64;
        (k_lo..=k_hi).any(|k| {
            let w = Complex64::new(z.re, z.im - TAU * k as f64);
            self.index.distance(&self.base_arc, w, tol) + err <= tol
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Builds the trap from an access arc.
pub fn build_trap(p: &Parameter, eps: f64, sigma: &AccessArc) -> Result<TrapSet> {
    trap_from_curve(p, eps, &sigma.vertices)
}

fn trap_from_curve(p: &Parameter, eps: f64, sigma: &[Complex64]) -> Result<TrapSet> {
    if sigma.len() < 2 {
        return Err(Error::invalid("access arc needs at least two vertices"));
    }
    let base_arc = pull_back(sigma, p.a(), None, ArcOptions::default().max_jump)?;
    let last = *base_arc.last().expect("non-empty");
    // The arc goes off to large real part, where the argument of w - a settles
    // on a multiple of 2 pi.
    let limit = TAU * (last.im / TAU).round();
    let (im_min, im_max) = base_arc
        .iter()
        .fold((limit, limit), |(lo, hi), z| (lo.min(z.im), hi.max(z.im)));
    let index = SegmentIndex::new(&base_arc);
    Ok(TrapSet {
        parameter: *p,
        eps,
        c: -eps.ln(),
        sigma: sigma.to_vec(),
        delta: TAU + (im_max - im_min),
        base_arc,
        im_min,
        im_max,
        index,
    })
}

/// `2 pi` plus the imaginary oscillation of the base arc.
pub fn strip_delta(trap: &TrapSet) -> f64 {
    trap.delta()
}

/// `max(|z0|, c, 3, ln(1 + 2(|a| + delta))) + 1`.
pub fn choose_r(z0: Complex64, trap: &TrapSet, p: &Parameter) -> f64 {
    z0.norm().max(trap.c()).max(3.0).max(p.sandwich_threshold(trap.delta())) + 1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub re_min: f64,
    pub re_max: f64,
    pub im_abs_max: f64,
}

impl Rectangle {
    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re_min && z.re <= self.re_max && z.im.abs() <= self.im_abs_max
    }

    pub fn contains_rect(&self, other: &Rectangle) -> bool {
        self.re_min <= other.re_min && self.re_max >= other.re_max && self.im_abs_max >= other.im_abs_max
    }
}

/// The box that must contain the component of `z0` in the complement of `X`,
/// grown by `margin`: `Re` in `[-R, max(R + 3, K(R + 1))]`, `|Im| <= R + delta`.
///
/// Points of that component with `|z| < R` have `Re z > -R`; the others have
/// not entered the trap yet, so `Re z > -c > -R`.
pub fn bounding_rectangle(r: f64, trap: &TrapSet, p: &Parameter, margin: f64) -> Rectangle {
    Rectangle {
        re_min: -r.max(trap.c()) - margin,
        re_max: (r + 3.0).max(continued_growth_k(r + 1.0, p)) + margin,
        im_abs_max: r + trap.delta() + margin,
    }
}

/// What was verified about a point in `X_N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct XEvidence {
    pub member: bool,
    pub first_trap_index: Option<usize>,
    /// Indices `k` with `|f^k(z)| >= M^k(R)` verified.
    pub threshold_indices: Vec<usize>,
    /// First `k` whose condition could not be verified.
    pub failed_at: Option<usize>,
}

/// Tests membership in `X_N` for one trap, radius and depth.
#[derive(Clone, Debug)]
pub struct XTester<'a> {
    trap: &'a TrapSet,
    depth: usize,
    thresholds: Vec<IteratedModulus>,
}

impl<'a> XTester<'a> {
    pub fn new(trap: &'a TrapSet, r: f64, depth: usize) -> Result<Self> {
        Ok(Self { trap, depth, thresholds: max_modulus_sequence(r, trap.parameter(), depth)? })
    }

    pub fn thresholds(&self) -> &[IteratedModulus] {
        &self.thresholds
    }

    pub fn evaluate(&self, z: Complex64) -> XEvidence {
        let mut ev = XEvidence { member: false, first_trap_index: None, threshold_indices: Vec::new(), failed_at: None };
        let mut orbit = TrackedOrbit::new(z, self.trap.parameter());
        for k in 0..=self.depth {
            let Some(t) = orbit.next() else {
                ev.failed_at = Some(k);
                return ev;
            };
            if threshold_test(&t, &self.thresholds[k]) != ThresholdTest::Above {
                ev.failed_at = Some(k);
                return ev;
            }
            ev.threshold_indices.push(k);
            if let Tracked::Finite { z: w, err } = t {
                if self.trap.contains_within(w, err) {
                    // Every later condition holds through this entry.
                    ev.first_trap_index = Some(k);
                    break;
                }
            }
        }
        ev.member = true;
        ev
    }
}

/// Membership of `z` in `X_depth`.
pub fn x_membership(z: Complex64, trap: &TrapSet, r: f64, depth: usize) -> Result<XEvidence> {
    Ok(XTester::new(trap, r, depth)?.evaluate(z))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleVerdict {
    /// Verified in `X_N` directly.
    XMember,
    /// `|z| >= R` and the orbit enters an absorbing disc of the attracting cycle.
    Fatou,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateSample {
    pub z: [f64; 2],
    pub verdict: SampleVerdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub first_trap_index: Option<usize>,
    pub threshold_indices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnclosedRegion {
    pub pixels: usize,
    pub re_range: [f64; 2],
    pub im_range: [f64; 2],
}

/// Samples surrounding `z0`, each verified to lie in `A_R ∪ F`.
///
/// The samples are the pixels adjacent to the flood-filled component of `z0`
/// in a raster of the bounding rectangle, so they form a closed barrier at
/// the reported spacing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationCertificate {
    pub parameter: Parameter,
    pub eps: f64,
    pub c: f64,
    pub delta: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub depth: usize,
    pub z0: [f64; 2],
    pub rectangle: Rectangle,
    pub grid: [usize; 2],
    pub spacing: f64,
    pub enclosed: EnclosedRegion,
    pub samples: Vec<CertificateSample>,
    pub tool_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateOptions {
    pub arc: ArcOptions,
    pub margin: f64,
    pub max_iter: usize,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self { arc: ArcOptions::default(), margin: 1.0, max_iter: DEFAULT_MAX_ITER }
    }
}

/// Everything the certificate pipeline derives from `(a, eps, z0)`.
#[derive(Clone, Debug)]
pub struct Construction {
    pub cycle: Cycle,
    pub arc: AccessArc,
    pub trap: TrapSet,
    pub r: f64,
    pub rectangle: Rectangle,
    /// The rectangle without margin.
    pub bare_rectangle: Rectangle,
}

pub fn construct(z0: Complex64, p: &Parameter, eps: f64, opts: &CertificateOptions) -> Result<Construction> {
    let cycle = crate::orbit::default_cycle(p);
    if cycle.kind != CycleKind::Attracting {
        return Err(Error::Unsupported(format!(
            "separation certificates need an attracting cycle, found {:?}",
            cycle.kind
        )));
    }
    let arc = build_access_arc_with(p, &cycle, eps, &opts.arc)?;
    let trap = build_trap(p, eps, &arc)?;
    let r = choose_r(z0, &trap, p);
    Ok(Construction {
        rectangle: bounding_rectangle(r, &trap, p, opts.margin),
        bare_rectangle: bounding_rectangle(r, &trap, p, 0.0),
        cycle,
        arc,
        trap,
        r,
    })
}

/// Classifies one certificate candidate; `None` when neither route verifies it.
fn verify_sample(z: Complex64, r: f64, x: &XTester<'_>, cls: &Classifier) -> Option<CertificateSample> {
    let ev = x.evaluate(z);
    let zz = [z.re, z.im];
    if ev.member {
        return Some(CertificateSample {
            z: zz,
            verdict: SampleVerdict::XMember,
            first_trap_index: ev.first_trap_index,
            threshold_indices: ev.threshold_indices,
        });
    }
    let err = f64::EPSILON * z.norm();
    if z.norm() - err >= r && cls.basin_entry(z).is_some() {
        return Some(CertificateSample { z: zz, verdict: SampleVerdict::Fatou, first_trap_index: None, threshold_indices: Vec::new() });
    }
    None
}

pub fn separation_certificate(
    z0: Complex64,
    p: &Parameter,
    eps: f64,
    depth: usize,
    samples_per_side: usize,
) -> Result<SeparationCertificate> {
    separation_certificate_with(z0, p, eps, depth, samples_per_side, &CertificateOptions::default())
}

pub fn separation_certificate_with(
    z0: Complex64,
    p: &Parameter,
    eps: f64,
    depth: usize,
    samples_per_side: usize,
    opts: &CertificateOptions,
) -> Result<SeparationCertificate> {
    if depth < 2 {
        return Err(Error::invalid(format!("certificate depth must be at least 2, got {depth}")));
    }
    let k = construct(z0, p, eps, opts)?;
    let rect = k.rectangle;
    let grid = GridSpec::covering(rect.re_min, rect.re_max, -rect.im_abs_max, rect.im_abs_max, samples_per_side, samples_per_side)?;
    let x = XTester::new(&k.trap, k.r, depth)?;
    let cls = Classifier::new(p, k.r, 0, k.cycle.clone(), opts.max_iter)?;

    let verdicts: Vec<Option<CertificateSample>> =
        grid.centers().into_par_iter().map(|z| verify_sample(z, k.r, &x, &cls)).collect();
    let mask = Mask::from_fn(grid.nx(), grid.ny(), |i, j| verdicts[grid.index(i, j)].is_some());

    let (si, sj) = grid
        .pixel_of(z0)
        .ok_or_else(|| Error::invalid(format!("z0 = {z0} lies outside the rectangle")))?;
    if mask.get(si, sj) {
        return Err(Error::invalid(format!("z0 = {z0} itself lies in the verified set")));
    }
    let fill = flood_fill(&mask, si, sj);
    let frame: Vec<[f64; 2]> = fill
        .iter()
        .filter(|&&(i, j)| i == 0 || j == 0 || i + 1 == grid.nx() || j + 1 == grid.ny())
        .map(|&(i, j)| {
            let z = grid.center(i, j);
            [z.re, z.im]
        })
        .collect();
    if !frame.is_empty() {
        return Err(Error::Certificate { reason: "region around z0 reaches the rectangle frame".into(), samples: frame });
    }
    let outside: Vec<[f64; 2]> = fill
        .iter()
        .map(|&(i, j)| grid.center(i, j))
        .filter(|z| !k.bare_rectangle.contains(*z))
        .map(|z| [z.re, z.im])
        .collect();
    if !outside.is_empty() {
        return Err(Error::Certificate { reason: "region around z0 leaves the unpadded rectangle".into(), samples: outside });
    }

    let mut in_fill = vec![false; grid.nx() * grid.ny()];
    for &(i, j) in &fill {
        in_fill[grid.index(i, j)] = true;
    }
    let mut samples = Vec::new();
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            if !mask.get(i, j) {
                continue;
            }
            let touches = grid.neighbours4(i, j).any(|(u, v)| in_fill[grid.index(u, v)]);
            if touches {
                samples.push(verdicts[grid.index(i, j)].clone().expect("mask pixel has a verdict"));
            }
        }
    }

    let pts: Vec<Complex64> = fill.iter().map(|&(i, j)| grid.center(i, j)).collect();
    let fold = |f: fn(&Complex64) -> f64| {
        pts.iter().map(f).fold([f64::INFINITY, f64::NEG_INFINITY], |[lo, hi], v| [lo.min(v), hi.max(v)])
    };
    Ok(SeparationCertificate {
        parameter: *p,
        eps,
        c: k.trap.c(),
        delta: k.trap.delta(),
        r: k.r,
        depth,
        z0: [z0.re, z0.im],
        rectangle: rect,
        grid: [grid.nx(), grid.ny()],
        spacing: grid.dx().max(grid.dy()),
        enclosed: EnclosedRegion { pixels: fill.len(), re_range: fold(|z| z.re), im_range: fold(|z| z.im) },
        samples,
        tool_version: TOOL_VERSION.to_string(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReverifyReport {
    pub checked: usize,
    /// Samples whose recomputed verdict or evidence differs.
    pub failures: Vec<[f64; 2]>,
}

impl ReverifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Rebuilds the trap from the certificate's parameters and recomputes every
/// sample from scratch.
pub fn reverify_certificate(cert: &SeparationCertificate) -> Result<ReverifyReport> {
    let p = cert.parameter;
    let z0 = Complex64::new(cert.z0[0], cert.z0[1]);
    let k = construct(z0, &p, cert.eps, &CertificateOptions::default())?;
    if (k.r - cert.r).abs() > 1e-12 * cert.r {
        return Err(Error::Certificate { reason: format!("radius {} does not match recomputed {}", cert.r, k.r), samples: Vec::new() });
    }
    let x = XTester::new(&k.trap, cert.r, cert.depth)?;
    let cls = Classifier::new(&p, cert.r, 0, k.cycle.clone(), DEFAULT_MAX_ITER)?;
    let failures = cert
        .samples
        .par_iter()
        .filter(|s| verify_sample(Complex64::new(s.z[0], s.z[1]), cert.r, &x, &cls).as_ref() != Some(*s))
        .map(|s| s.z)
        .collect();
    Ok(ReverifyReport { checked: cert.samples.len(), failures })
}

/// The trap built around a point of `D(a, eps)` whose orbit reaches the
/// half-plane `Re z <= -c`, for parameters in the Julia set.
#[derive(Clone, Debug)]
pub struct JuliaTrap {
    pub trap: TrapSet,
    pub zeta: Complex64,
    pub n: usize,
    pub sigma0: Vec<Complex64>,
}

/// Searches a `grid x grid` lattice of `D(a, eps)` for the smallest `n <= max_n`
/// with `Re f^n(zeta) <= -c`, then pulls a left-running curve from
/// `f^n(zeta)` back along the orbit of `zeta`.
pub fn trap_from_julia(p: &Parameter, eps: f64, max_n: usize, grid: usize) -> Result<JuliaTrap> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::invalid(format!("eps must lie in (0, 1), got {eps}")));
    }
    if grid < 2 || max_n == 0 {
        return Err(Error::invalid("grid must be at least 2 and max_n at least 1"));
    }
    let a = p.a();
    let c = -eps.ln();
    let seeds: Vec<Complex64> = (0..grid)
        .flat_map(|j| (0..grid).map(move |i| (i, j)))
        .map(|(i, j)| {
            let s = |t: usize| -1.0 + 2.0 * t as f64 / (grid - 1) as f64;
            a + Complex64::new(s(i), s(j)) * eps
        })
        .filter(|z| (z - a).norm() < eps)
        .collect();
    let mut cur = seeds.clone();
    let mut hit = None;
    'search: for n in 1..=max_n {
        for (idx, w) in cur.iter_mut().enumerate() {
            *w = if w.re.is_finite() && w.re <= 700.0 { p.map(*w) } else { Complex64::new(f64::NAN, f64::NAN) };
            if w.re <= -c {
                hit = Some((seeds[idx], n));
                break 'search;
            }
        }
    }
    let (zeta, n) = hit.ok_or_else(|| {
        Error::SearchExhausted(format!("no point of a {grid}x{grid} lattice in D(a, {eps}) reaches Re <= {} within {max_n} steps", -c))
    })?;

    let mut zorbit = vec![zeta];
    let mut aorbit = vec![a];
    for _ in 0..n {
        zorbit.push(p.map(*zorbit.last().expect("non-empty")));
        aorbit.push(p.map(*aorbit.last().expect("non-empty")));
    }
    let opts = ArcOptions::default();
    let avoid = &aorbit[..n];
    let sigma0 = opts
        .offsets
        .iter()
        .map(|&h| source_curve(zorbit[n], h, &opts))
        .find(|g| avoids(g, avoid, opts.avoid))
        .ok_or_else(|| Error::ArcConstruction("no source curve avoids the singular orbit".into()))?;
    let mut curve = sigma0.clone();
    for j in (0..n).rev() {
        curve = pull_back(&curve, a, Some(zorbit[j]), opts.max_jump)?;
    }
    let sigma = trim(&curve, a, eps, opts.re_cap)?;
    Ok(JuliaTrap { trap: trap_from_curve(p, eps, &sigma)?, zeta, n, sigma0 })
}

/// True when the computed orbit keeps distance more than `eps` from `a`.
pub fn avoids_singular_value(z: Complex64, p: &Parameter, eps: f64, n: usize) -> bool {
    crate::orbit::iterate_map(z, p, n, crate::orbit::BAILOUT)
        .points
        .iter()
        .all(|w| (w - p.a()).norm() > eps)
}
