//! Binary masks on pixel grids and the topology of their complements.
//!
//! True pixels are joined 8-connectedly and false pixels 4-connectedly, the
//! usual dual pairing. A complement component is unbounded when it touches
//! the grid frame.

use std::collections::VecDeque;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_PIXELS: usize = 8;

/// A grid of pixel centres. Column `i` runs left to right, row `j` top to
/// bottom.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    nx: usize,
    ny: usize,
    /// Centre of pixel `(0, 0)`.
    re_first: f64,
    im_first: f64,
    dx: f64,
    dy: f64,
}

impl GridSpec {
    /// Pixel centres at `(re_first + i dx, im_top - j dy)`.
    pub fn from_centers(re_first: f64, im_top: f64, dx: f64, dy: f64, nx: usize, ny: usize) -> Result<Self> {
        if nx < MIN_PIXELS || ny < MIN_PIXELS {
            return Err(Error::invalid(format!("grid must be at least {MIN_PIXELS}x{MIN_PIXELS}, got {nx}x{ny}")));
        }
        if !(dx > 0.0 && dy > 0.0) || !re_first.is_finite() || !im_top.is_finite() {
            return Err(Error::invalid("grid spacing must be positive and the origin finite"));
        }
        Ok(Self { nx, ny, re_first, im_first: im_top, dx, dy })
    }

    /// `nx x ny` pixels tiling the rectangle `[re_min, re_max] x [im_min, im_max]`.
    pub fn covering(re_min: f64, re_max: f64, im_min: f64, im_max: f64, nx: usize, ny: usize) -> Result<Self> {
        if !(re_max > re_min && im_max > im_min) {
            return Err(Error::invalid(format!("empty region [{re_min}, {re_max}] x [{im_min}, {im_max}]")));
        }
        let dx = (re_max - re_min) / nx as f64;
        let dy = (im_max - im_min) / ny as f64;
        Self::from_centers(re_min + 0.5 * dx, im_max - 0.5 * dy, dx, dy, nx, ny)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(re_min, re_max, im_min, im_max)` of the covered region.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        (
            self.re_first - 0.5 * self.dx,
            self.re_first + (self.nx as f64 - 0.5) * self.dx,
            self.im_first - (self.ny as f64 - 0.5) * self.dy,
            self.im_first + 0.5 * self.dy,
        )
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn center(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.re_first + i as f64 * self.dx, self.im_first - j as f64 * self.dy)
    }

    /// All pixel centres in row-major order.
    pub fn centers(&self) -> Vec<Complex64> {
        (0..self.ny).flat_map(|j| (0..self.nx).map(move |i| (i, j))).map(|(i, j)| self.center(i, j)).collect()
    }

    /// The pixel containing `z`.
    pub fn pixel_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let u = ((z.re - self.re_first) / self.dx + 0.5).floor();
        let v = ((self.im_first - z.im) / self.dy + 0.5).floor();
        (u >= 0.0 && v >= 0.0 && u < self.nx as f64 && v < self.ny as f64).then(|| (u as usize, v as usize))
    }

    pub fn on_frame(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    pub fn neighbours4(&self, i: usize, j: usize) -> impl Iterator<Item = (usize, usize)> {
        neighbours(self.nx, self.ny, i, j, &[(-1, 0), (1, 0), (0, -1), (0, 1)])
    }
}

const N8: [(isize, isize); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];

fn neighbours(
    nx: usize,
    ny: usize,
    i: usize,
    j: usize,
    offs: &'static [(isize, isize)],
) -> impl Iterator<Item = (usize, usize)> {
    offs.iter().filter_map(move |&(di, dj)| {
        let (u, v) = (i as isize + di, j as isize + dj);
        (u >= 0 && v >= 0 && (u as usize) < nx && (v as usize) < ny).then_some((u as usize, v as usize))
    })
}

fn neighbours4(nx: usize, ny: usize, i: usize, j: usize) -> impl Iterator<Item = (usize, usize)> {
    neighbours(nx, ny, i, j, &[(-1, 0), (1, 0), (0, -1), (0, 1)])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mask {
    nx: usize,
    ny: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(nx: usize, ny: usize, value: bool) -> Self {
        Self { nx, ny, bits: vec![value; nx * ny] }
    }

    pub fn from_fn(nx: usize, ny: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let bits = (0..ny).flat_map(|j| (0..nx).map(move |i| (i, j))).map(|(i, j)| f(i, j)).collect();
        Self { nx, ny, bits }
    }

    /// Row-major bits.
    pub fn from_bits(nx: usize, ny: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != nx * ny {
            return Err(Error::invalid(format!("{} bits for a {nx}x{ny} mask", bits.len())));
        }
        Ok(Self { nx, ny, bits })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[j * self.nx + i]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.bits[j * self.nx + i] = v;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Binary PGM, true pixels white.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.nx, self.ny).into_bytes();
        out.extend(self.bits.iter().map(|&b| if b { 255u8 } else { 0 }));
        out
    }

    /// Number of 8-connected components of true pixels.
    pub fn components8(&self) -> usize {
        let mut seen = vec![false; self.bits.len()];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.bits.len() {
            if !self.bits[start] || seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(p) = queue.pop_front() {
                let (i, j) = (p % self.nx, p / self.nx);
                for (u, v) in neighbours(self.nx, self.ny, i, j, &N8) {
                    let q = v * self.nx + u;
                    if self.bits[q] && !seen[q] {
                        seen[q] = true;
                        queue.push_back(q);
                    }
                }
            }
        }
        count
    }
}

/// Evaluates `pred` at every pixel centre, in parallel.
pub fn rasterize(grid: &GridSpec, pred: impl Fn(Complex64) -> bool + Sync) -> Mask {
    let bits = (0..grid.len())
        .into_par_iter()
        .map(|k| pred(grid.center(k % grid.nx, k / grid.nx)))
        .collect();
    Mask { nx: grid.nx, ny: grid.ny, bits }
}

/// The 4-connected component of false pixels containing `(i, j)`, in BFS order.
/// Empty if that pixel is true.
pub fn flood_fill(m: &Mask, i: usize, j: usize) -> Vec<(usize, usize)> {
    let mut seen = vec![false; m.bits.len()];
    fill_into(m, i, j, &mut seen)
}

fn fill_into(m: &Mask, i: usize, j: usize, seen: &mut [bool]) -> Vec<(usize, usize)> {
    let start = j * m.nx + i;
    if m.bits[start] || seen[start] {
        return Vec::new();
    }
    let mut out = vec![(i, j)];
    seen[start] = true;
    let mut head = 0;
    while head < out.len() {
        let (ci, cj) = out[head];
        head += 1;
        for (u, v) in neighbours4(m.nx, m.ny, ci, cj) {
            let q = v * m.nx + u;
            if !m.bits[q] && !seen[q] {
                seen[q] = true;
                out.push((u, v));
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentInfo {
    pub label: u32,
    pub size: usize,
    pub bounded: bool,
    /// `[i_min, j_min, i_max, j_max]` in pixels.
    pub bbox: [usize; 4],
}

/// Labels of the 4-connected components of false pixels. Label 0 marks true
/// pixels; components are numbered from 1 in scan order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentLabels {
    pub nx: usize,
    pub ny: usize,
    pub labels: Vec<u32>,
    pub components: Vec<ComponentInfo>,
}

impl ComponentLabels {
    pub fn label(&self, i: usize, j: usize) -> u32 {
        self.labels[j * self.nx + i]
    }

    pub fn info(&self, label: u32) -> Option<&ComponentInfo> {
        label.checked_sub(1).and_then(|l| self.components.get(l as usize))
    }
}

pub fn complement_components(m: &Mask) -> ComponentLabels {
    let mut labels = vec![0u32; m.bits.len()];
    let mut seen = vec![false; m.bits.len()];
    let mut components = Vec::new();
    for start in 0..m.bits.len() {
        if m.bits[start] || seen[start] {
            continue;
        }
        let label = components.len() as u32 + 1;
        let pix = fill_into(m, start % m.nx, start / m.nx, &mut seen);
        let mut bbox = [usize::MAX, usize::MAX, 0, 0];
        let mut bounded = true;
        for &(i, j) in &pix {
            labels[j * m.nx + i] = label;
            bbox = [bbox[0].min(i), bbox[1].min(j), bbox[2].max(i), bbox[3].max(j)];
            bounded &= !(i == 0 || j == 0 || i + 1 == m.nx || j + 1 == m.ny);
        }
        components.push(ComponentInfo { label, size: pix.len(), bounded, bbox });
    }
    ComponentLabels { nx: m.nx, ny: m.ny, labels, components }
}

fn touches_frame(m: &Mask, pix: &[(usize, usize)]) -> bool {
    pix.iter().any(|&(i, j)| i == 0 || j == 0 || i + 1 == m.nx || j + 1 == m.ny)
}

fn check_grid(m: &Mask, grid: &GridSpec) -> Result<()> {
    if m.nx != grid.nx || m.ny != grid.ny {
        return Err(Error::invalid(format!("mask is {}x{} but grid is {}x{}", m.nx, m.ny, grid.nx, grid.ny)));
    }
    Ok(())
}

/// Whether the mask separates `z` from the frame.
///
/// For a true pixel the pixel itself is switched off and the component it
/// then belongs to is tested, so points of the mask are covered as well.
pub fn separates_point(m: &Mask, grid: &GridSpec, z: Complex64) -> Result<bool> {
    check_grid(m, grid)?;
    let (i, j) = grid.pixel_of(z).ok_or_else(|| Error::invalid(format!("{z} lies outside the grid")))?;
    let pix = if m.get(i, j) {
        let mut removed = m.clone();
        removed.set(i, j, false);
        flood_fill(&removed, i, j)
    } else {
        flood_fill(m, i, j)
    };
    Ok(!touches_frame(m, &pix))
}

/// One nested domain of the spider's-web witness.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainLink {
    /// Radius of the disc `K_n` around the grid centre.
    pub radius: f64,
    pub pixels: usize,
    pub bounded: bool,
    pub bbox: [usize; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSeparation {
    pub z: [f64; 2],
    pub on_mask: bool,
    pub separated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpiderWebReport {
    pub verdict: bool,
    pub mask_components: usize,
    pub samples: Vec<SampleSeparation>,
    pub failing: Vec<[f64; 2]>,
    /// Fills `G_n` of discs of increasing radius, while they stay bounded.
    pub chain: Vec<ChainLink>,
}

/// The fill of `K` together with every false component meeting it or
/// bordering it, and whether that fill stays off the frame.
fn nested_domain(m: &Mask, in_k: &[bool]) -> (Vec<bool>, bool) {
    let (nx, ny) = (m.nx, m.ny);
    let mut in_u = in_k.to_vec();
    let mut seen = vec![false; m.bits.len()];
    let mut queue: VecDeque<usize> = (0..in_u.len()).filter(|&p| in_u[p]).collect();
    // Grow U by whole false components adjacent to it.
    while let Some(p) = queue.pop_front() {
        let (i, j) = (p % nx, p / nx);
        let here = std::iter::once((i, j)).chain(neighbours4(nx, ny, i, j));
        for (u, v) in here {
            let q = v * nx + u;
            if m.bits[q] || seen[q] {
                continue;
            }
            for (a, b) in fill_into(m, u, v, &mut seen) {
                let r = b * nx + a;
                if !in_u[r] {
                    in_u[r] = true;
                    queue.push_back(r);
                }
            }
        }
    }
    // Fill holes: everything not reachable from the frame through pixels outside U.
    let outside = Mask { nx, ny, bits: in_u.clone() };
    let mut reach = vec![false; in_u.len()];
    for j in 0..ny {
        for i in 0..nx {
            if (i == 0 || j == 0 || i + 1 == nx || j + 1 == ny) && !in_u[j * nx + i] {
                fill_into(&outside, i, j, &mut reach);
            }
        }
    }
    let bounded = !(0..ny).any(|j| (0..nx).any(|i| (i == 0 || j == 0 || i + 1 == nx || j + 1 == ny) && in_u[j * nx + i]));
    let g = reach.iter().map(|&r| !r).collect();
    (g, bounded)
}

/// The nested-domain witness for discs of radius `r_n` about the grid centre.
pub fn nested_chain(m: &Mask, grid: &GridSpec, radii: &[f64]) -> Result<Vec<ChainLink>> {
    check_grid(m, grid)?;
    let (re0, re1, im0, im1) = grid.bounds();
    let centre = Complex64::new(0.5 * (re0 + re1), 0.5 * (im0 + im1));
    let centers = grid.centers();
    let mut out = Vec::new();
    for &radius in radii {
        let in_k: Vec<bool> = centers.iter().map(|z| (z - centre).norm() <= radius).collect();
        let (g, bounded) = nested_domain(m, &in_k);
        let mut bbox = [usize::MAX, usize::MAX, 0, 0];
        let mut pixels = 0;
        for (p, _) in g.iter().enumerate().filter(|(_, &b)| b) {
            let (i, j) = (p % grid.nx, p / grid.nx);
            bbox = [bbox[0].min(i), bbox[1].min(j), bbox[2].max(i), bbox[3].max(j)];
            pixels += 1;
        }
        out.push(ChainLink { radius, pixels, bounded, bbox });
        if !bounded {
            break;
        }
    }
    Ok(out)
}

/// An `n x n` lattice of sample points in the middle half of the grid.
pub fn inner_samples(grid: &GridSpec, n: usize) -> Vec<Complex64> {
    let (re0, re1, im0, im1) = grid.bounds();
    let (w, h) = (re1 - re0, im1 - im0);
    let t = |k: usize| 0.25 + 0.5 * (k as f64 + 0.5) / n as f64;
    (0..n)
        .flat_map(|j| (0..n).map(move |i| (i, j)))
        .map(|(i, j)| Complex64::new(re0 + w * t(i), im0 + h * t(j)))
        .collect()
}

/// Radii `r_max (n + 1) / (count + 1)` for the nested chain, with `r_max` half
/// the shorter side of the grid.
pub fn default_radii(grid: &GridSpec, count: usize) -> Vec<f64> {
    let (re0, re1, im0, im1) = grid.bounds();
    let r_max = 0.5 * (re1 - re0).min(im1 - im0);
    (0..count).map(|n| r_max * (n + 1) as f64 / (count + 1) as f64).collect()
}

/// Mask connected (8-neighbour) and every sample separated from the frame,
/// with the nested-domain chain as a witness.
pub fn spiders_web_verdict(m: &Mask, grid: &GridSpec, samples: &[Complex64]) -> Result<SpiderWebReport> {
    check_grid(m, grid)?;
    let sep = samples
        .par_iter()
        .map(|&z| {
            let (i, j) = grid.pixel_of(z).ok_or_else(|| Error::invalid(format!("sample {z} lies outside the grid")))?;
            Ok(SampleSeparation { z: [z.re, z.im], on_mask: m.get(i, j), separated: separates_point(m, grid, z)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let failing: Vec<[f64; 2]> = sep.iter().filter(|s| !s.separated).map(|s| s.z).collect();
    let mask_components = m.components8();
    let chain = nested_chain(m, grid, &default_radii(grid, 8))?
        .into_iter()
        .filter(|l| l.bounded)
        .collect();
    Ok(SpiderWebReport { verdict: mask_components == 1 && failing.is_empty(), mask_components, samples: sep, failing, chain })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairSeparation {
    /// Distinct bounded complement components.
    Witness { label_p: u32, label_q: u32, size_p: usize, size_q: usize },
    Failure { reason: String },
}

/// Two off-mask points lying in distinct bounded complement components.
pub fn pairwise_separation_witness(m: &Mask, grid: &GridSpec, p: Complex64, q: Complex64) -> Result<PairSeparation> {
    check_grid(m, grid)?;
    let pix = |z: Complex64| {
        let (i, j) = grid.pixel_of(z).ok_or_else(|| Error::invalid(format!("{z} lies outside the grid")))?;
        if m.get(i, j) {
            return Err(Error::invalid(format!("{z} lies on the mask")));
        }
        Ok((i, j))
    };
    let (pi, pj) = pix(p)?;
    let (qi, qj) = pix(q)?;
    let labels = complement_components(m);
    let (lp, lq) = (labels.label(pi, pj), labels.label(qi, qj));
    let (ip, iq) = (labels.info(lp).expect("label exists"), labels.info(lq).expect("label exists"));
    let fail = |reason: &str| Ok(PairSeparation::Failure { reason: reason.into() });
    if lp == lq {
        return fail("both points lie in one complement component");
    }
    if !ip.bounded || !iq.bounded {
        return fail("a complement component reaches the frame");
    }
    Ok(PairSeparation::Witness { label_p: lp, label_q: lq, size_p: ip.size, size_q: iq.size })
}

/// JSON-ready summary of a mask's complement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub components: Vec<ComponentInfo>,
    pub verdict: Option<bool>,
    pub samples: Vec<SampleSeparation>,
}
