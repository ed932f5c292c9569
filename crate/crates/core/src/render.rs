//! RGB rasters of classified grids, with vector overlays.
//!
//! Every pixel is computed independently of the others, so images do not
//! depend on the number of threads.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::orbit::{Classifier, Label, PointClass};
use crate::raster::GridSpec;
use crate::trap::{CertificateSample, Rectangle, SampleVerdict, TrapSet};

pub type Rgb = [u8; 3];

pub const HAIR_COLOUR: Rgb = [220, 40, 40];
pub const RECTANGLE_COLOUR: Rgb = [240, 200, 0];
pub const TRAP_COLOUR: Rgb = [0, 200, 220];
pub const DISC_COLOUR: Rgb = [200, 0, 200];
pub const X_SAMPLE_COLOUR: Rgb = [0, 170, 0];
pub const FATOU_SAMPLE_COLOUR: Rgb = [40, 80, 255];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Palette {
    /// Basin components in colour by phase, Julia set in grey.
    #[default]
    Phase,
    /// Basin black, Julia set grey.
    Mono,
}

impl std::str::FromStr for Palette {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "phase" => Ok(Self::Phase),
            "mono" => Ok(Self::Mono),
            _ => Err(crate::Error::invalid(format!("unknown palette {s:?}, expected phase or mono"))),
        }
    }
}

const PHASE_HUES: [Rgb; 6] = [[40, 90, 200], [230, 150, 30], [40, 170, 90], [190, 60, 160], [30, 180, 190], [200, 200, 60]];

pub fn colour_of(class: &PointClass, palette: Palette) -> Rgb {
    match class.label {
        Label::Basin => match palette {
            Palette::Mono => [0, 0, 0],
            Palette::Phase => {
                let base = PHASE_HUES[class.evidence.phase.unwrap_or(0) % PHASE_HUES.len()];
                let steps = class.evidence.basin_entry.unwrap_or(0) as f64;
                let shade = 0.35 + 0.65 * 0.92f64.powf(steps);
                base.map(|c| (c as f64 * shade).round() as u8)
            }
        },
        Label::ArVerified(_) => [205, 205, 205],
        Label::EscapingNumerical => [175, 175, 175],
        Label::MeanderingCandidate(_) => [125, 125, 125],
        Label::Undecided => [85, 85, 85],
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<Rgb>,
}

impl Image {
    pub fn new(width: usize, height: usize, fill: Rgb) -> Self {
        Self { width, height, pixels: vec![fill; width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, i: usize, j: usize) -> Rgb {
        self.pixels[j * self.width + i]
    }

    pub fn put(&mut self, i: usize, j: usize, c: Rgb) {
        if i < self.width && j < self.height {
            self.pixels[j * self.width + i] = c;
        }
    }

    /// Row-major RGB bytes.
    pub fn raw(&self) -> Vec<u8> {
        self.pixels.iter().flatten().copied().collect()
    }

    /// Binary PPM (P6, maxval 255).
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.raw());
        out
    }
}

/// Classifies every pixel centre.
pub fn classify_grid(cls: &Classifier, grid: &GridSpec) -> Vec<PointClass> {
    grid.centers().par_iter().map(|&z| cls.classify(z)).collect()
}

pub fn render_classes(grid: &GridSpec, classes: &[PointClass], palette: Palette) -> Image {
    assert_eq!(classes.len(), grid.len(), "one class per pixel");
    Image { width: grid.nx(), height: grid.ny(), pixels: classes.iter().map(|c| colour_of(c, palette)).collect() }
}

pub fn render(cls: &Classifier, grid: &GridSpec, palette: Palette) -> Image {
    render_classes(grid, &classify_grid(cls, grid), palette)
}

/// Continuous pixel coordinates of `z`.
fn to_pixel(grid: &GridSpec, z: Complex64) -> (f64, f64) {
    let c0 = grid.center(0, 0);
    ((z.re - c0.re) / grid.dx(), (c0.im - z.im) / grid.dy())
}

/// Draws the segment `[z0, z1]`, clipped to the image.
pub fn draw_segment(img: &mut Image, grid: &GridSpec, z0: Complex64, z1: Complex64, c: Rgb) {
    let (x0, y0) = to_pixel(grid, z0);
    let (x1, y1) = to_pixel(grid, z1);
    let (w, h) = (img.width as f64, img.height as f64);
    // Clip against a slightly enlarged frame so overflowing far ends are harmless.
    let Some((t0, t1)) = clip(x0, y0, x1, y1, -1.0, -1.0, w, h) else { return };
    // Clamping bounds the step count when huge endpoints lose precision.
    let at = |t: f64| ((x0 + t * (x1 - x0)).clamp(-1.0, w), (y0 + t * (y1 - y0)).clamp(-1.0, h));
    let ((ax, ay), (bx, by)) = (at(t0), at(t1));
    let steps = (bx - ax).abs().max((by - ay).abs()).ceil().max(1.0) as usize;
    for s in 0..=steps {
        let t = s as f64 / steps as f64;
        let (x, y) = ((ax + t * (bx - ax)).round(), (ay + t * (by - ay)).round());
        if x >= 0.0 && y >= 0.0 {
            img.put(x as usize, y as usize, c);
        }
    }
}

/// Liang-Barsky parameter interval of the segment inside the box.
#[allow(clippy::too_many_arguments)]
fn clip(x0: f64, y0: f64, x1: f64, y1: f64, xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Option<(f64, f64)> {
    let (dx, dy) = (x1 - x0, y1 - y0);
    let mut t0: f64 = 0.0;
    let mut t1: f64 = 1.0;
    for (p, q) in [(-dx, x0 - xmin), (dx, xmax - x0), (-dy, y0 - ymin), (dy, ymax - y0)] {
        if !(p.is_finite() && q.is_finite()) {
            return None;
        }
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    (t0 <= t1).then_some((t0, t1))
}

pub fn draw_polyline(img: &mut Image, grid: &GridSpec, pts: &[Complex64], c: Rgb) {
    for w in pts.windows(2) {
        draw_segment(img, grid, w[0], w[1], c);
    }
}

pub fn draw_circle(img: &mut Image, grid: &GridSpec, centre: Complex64, radius: f64, c: Rgb) {
    let n = 720;
    let pts: Vec<Complex64> = (0..=n).map(|k| centre + Complex64::from_polar(radius, TAU * k as f64 / n as f64)).collect();
    draw_polyline(img, grid, &pts, c);
}

pub fn draw_rectangle(img: &mut Image, grid: &GridSpec, r: &Rectangle, c: Rgb) {
    let corners = [
        Complex64::new(r.re_min, -r.im_abs_max),
        Complex64::new(r.re_max, -r.im_abs_max),
        Complex64::new(r.re_max, r.im_abs_max),
        Complex64::new(r.re_min, r.im_abs_max),
        Complex64::new(r.re_min, -r.im_abs_max),
    ];
    draw_polyline(img, grid, &corners, c);
}

/// A small cross at `z`.
pub fn mark(img: &mut Image, grid: &GridSpec, z: Complex64, c: Rgb) {
    if let Some((i, j)) = grid.pixel_of(z) {
        img.put(i, j, c);
        for (di, dj) in [(1, 0), (0, 1)] {
            img.put(i + di, j + dj, c);
            if i >= di && j >= dj {
                img.put(i - di, j - dj, c);
            }
        }
    }
}

/// The half plane `Re z <= -c` (its edge) and every visible `2 pi i`
/// translate of the base arc.
pub fn draw_trap(img: &mut Image, grid: &GridSpec, trap: &TrapSet, c: Rgb) {
    let (re_min, _, im_min, im_max) = grid.bounds();
    if -trap.c() >= re_min {
        draw_segment(img, grid, Complex64::new(-trap.c(), im_min), Complex64::new(-trap.c(), im_max), c);
    }
    let (lo, hi) = trap.im_range();
    let k_lo = ((im_min - hi) / TAU).floor() as i64;
    let k_hi = ((im_max - lo) / TAU).ceil() as i64;
    for k in k_lo..=k_hi {
        let shift = Complex64::new(0.0, TAU * k as f64);
        let arc: Vec<Complex64> = trap.base_arc().iter().map(|z| z + shift).collect();
        draw_polyline(img, grid, &arc, c);
    }
}

pub fn draw_samples(img: &mut Image, grid: &GridSpec, samples: &[CertificateSample]) {
    for s in samples {
        let c = match s.verdict {
            SampleVerdict::XMember => X_SAMPLE_COLOUR,
            SampleVerdict::Fatou => FATOU_SAMPLE_COLOUR,
        };
        if let Some((i, j)) = grid.pixel_of(Complex64::new(s.z[0], s.z[1])) {
            img.put(i, j, c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::Parameter;

    #[test]
    fn ppm_layout() {
        let mut img = Image::new(3, 2, [1, 2, 3]);
        img.put(2, 1, [9, 9, 9]);
        img.put(7, 7, [5, 5, 5]);
        let ppm = img.to_ppm();
        assert!(ppm.starts_with(b"P6\n3 2\n255\n"));
        assert_eq!(ppm.len(), 11 + 18);
        assert_eq!(&ppm[ppm.len() - 3..], &[9, 9, 9]);
    }

    #[test]
    fn tiny_render() {
        let p = Parameter::real(-2.0).unwrap();
        let cls = Classifier::for_parameter(&p, 1.0, 3).unwrap();
        let grid = GridSpec::covering(-2.0, 7.0, -4.5, 4.5, 9, 9).unwrap();
        let img = render(&cls, &grid, Palette::Phase);
        assert_eq!((img.width(), img.height()), (9, 9));
        // Row 4 is the real axis: basin on the left, escaping on the right.
        assert_eq!(img.get(8, 4), [205, 205, 205]);
        let left = img.get(0, 4);
        assert!(left[2] > left[0]);
        assert_eq!(render(&cls, &grid, Palette::Mono).get(0, 4), [0, 0, 0]);
    }

    #[test]
    fn segments_clip_and_overlay() {
        let grid = GridSpec::covering(-1.0, 1.0, -1.0, 1.0, 16, 16).unwrap();
        let mut img = Image::new(16, 16, [0; 3]);
        draw_segment(&mut img, &grid, Complex64::new(-1e6, 0.03), Complex64::new(1e6, 0.03), [255; 3]);
        assert!((0..16).all(|i| img.get(i, 7) == [255; 3]));
        draw_circle(&mut img, &grid, Complex64::new(0.0, 0.0), 0.5, DISC_COLOUR);
        let disc = (0..16).flat_map(|j| (0..16).map(move |i| (i, j))).filter(|&(i, j)| img.get(i, j) == DISC_COLOUR);
        assert!(disc.count() > 20);
        let rect = Rectangle { re_min: -0.8, re_max: 0.8, im_abs_max: 0.8 };
        draw_rectangle(&mut img, &grid, &rect, RECTANGLE_COLOUR);
        assert_eq!(img.get(0, 0), [0; 3]);
        assert_eq!(img.get(1, 1), RECTANGLE_COLOUR);
    }
}
