use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use expoweb_core::fatou::{fatou_a_membership, semiconjugacy_residual, FatouMembership, FatouOrbitConfig};
use expoweb_core::hairs::{trace_hair_with, trace_hairs, ExternalAddress, HairExport, HairOptions, HairPolyline};
use expoweb_core::raster::{GridSpec, Mask};
use expoweb_core::render::{self, Image, Palette};
use expoweb_core::trap::{construct, reverify_certificate, separation_certificate, CertificateOptions};
use expoweb_core::{Classifier, Label, Parameter};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::JobConfig;
use crate::CliError;

const DEFAULT_A: [f64; 2] = [-2.0, 0.0];
const HAIR_DEPTH: usize = 40;
const HAIR_T_MAX: f64 = 100.0;
const OVERLAY_HAIR_DEPTH: usize = 12;

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// PNG when the extension says so, PPM otherwise.
pub fn write_image(path: &Path, img: &Image) -> Result<(), CliError> {
    let png = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("png"));
    if png {
        let buf = image::RgbImage::from_raw(img.width() as u32, img.height() as u32, img.raw())
            .expect("buffer matches dimensions");
        buf.save_with_format(path, image::ImageFormat::Png).map_err(|e| io_err(path, e))
    } else {
        std::fs::write(path, img.to_ppm()).map_err(|e| io_err(path, e))
    }
}

/// Pretty JSON to `path`, or to stdout.
pub fn write_json(path: Option<&Path>, value: &impl Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| io_err(p, e)),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

fn palette(cfg: &JobConfig) -> Result<Palette, CliError> {
    Ok(cfg.palette.as_deref().map(str::parse).transpose()?.unwrap_or_default())
}

fn parse_addresses(cfg: &JobConfig, default: &[&str]) -> Result<Vec<ExternalAddress>, CliError> {
    match &cfg.addresses {
        Some(list) => list.iter().map(|s| Ok(s.parse()?)).collect(),
        None => Ok(default.iter().map(|s| s.parse().expect("valid default")).collect()),
    }
}

pub fn render(cfg: &JobConfig) -> Result<(), CliError> {
    let p = cfg.parameter(DEFAULT_A)?;
    let (nx, ny) = cfg.grid_size((512, 512))?;
    let [re0, re1, im0, im1] = cfg.view.unwrap_or([-4.0, 8.0, -6.0, 6.0]);
    let grid = GridSpec::covering(re0, re1, im0, im1, nx, ny)?;
    let cls = Classifier::for_parameter(&p, cfg.r.unwrap_or(1.0), cfg.depth.unwrap_or(60))?;
    let classes = render::classify_grid(&cls, &grid);
    let mut img = render::render_classes(&grid, &classes, palette(cfg)?);
    if cfg.addresses.is_some() {
        // Every pullback level of seeds with t >= 5 lies close to the hair,
        // so their union draws it from the far end down to the endpoint.
        let opts = HairOptions { t_min: 5.0, ..HairOptions::default() };
        let t_max = cfg.t_max.unwrap_or(HAIR_T_MAX);
        for addr in parse_addresses(cfg, &[])? {
            let h = trace_hair_with(&addr, &p, OVERLAY_HAIR_DEPTH, t_max, &opts)?;
            for level in 0..=h.depth {
                let pts: Vec<Complex64> = h.level(level).map(|q| q.z).collect();
                render::draw_polyline(&mut img, &grid, &pts, render::HAIR_COLOUR);
            }
        }
    }
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("render.ppm"));
    write_image(&out, &img)?;
    if let Some(path) = &cfg.mask {
        let bits = classes.iter().map(|c| matches!(c.label, Label::Basin | Label::ArVerified(_))).collect();
        let mask = Mask::from_bits(nx, ny, bits)?;
        std::fs::write(path, mask.to_pgm()).map_err(|e| io_err(path, e))?;
    }
    Ok(())
}

pub fn certify(cfg: &JobConfig) -> Result<(), CliError> {
    let p = cfg.parameter(DEFAULT_A)?;
    let [zr, zi] = cfg.z0.unwrap_or([0.0, 0.0]);
    let z0 = Complex64::new(zr, zi);
    let eps = cfg.eps.unwrap_or(0.1);
    let depth = cfg.depth.unwrap_or(3);
    let cert = separation_certificate(z0, &p, eps, depth, cfg.samples.unwrap_or(512))?;
    write_json(cfg.out.as_deref(), &cert)?;
    let report = reverify_certificate(&cert)?;
    eprintln!(
        "certificate: R = {:.4}, delta = {:.4}, {} samples, re-verified {} with {} failures",
        cert.r,
        cert.delta,
        cert.samples.len(),
        report.checked,
        report.failures.len()
    );
    if let Some(path) = &cfg.overlay {
        let img = certificate_overlay(cfg, &p, z0, eps, depth, &cert)?;
        write_image(path, &img)?;
    }
    if !report.passed() {
        return Err(CliError::Verification(format!("{} samples failed re-verification", report.failures.len())));
    }
    Ok(())
}

fn certificate_overlay(
    cfg: &JobConfig,
    p: &Parameter,
    z0: Complex64,
    eps: f64,
    depth: usize,
    cert: &expoweb_core::trap::SeparationCertificate,
) -> Result<Image, CliError> {
    let rect = cert.rectangle;
    let (w, h) = (rect.re_max - rect.re_min, 2.0 * rect.im_abs_max);
    let default_ny = ((512.0 * h / w).round() as usize).max(8);
    let (nx, ny) = cfg.grid_size((512, default_ny))?;
    let grid = GridSpec::covering(rect.re_min, rect.re_max, -rect.im_abs_max, rect.im_abs_max, nx, ny)?;
    let cls = Classifier::for_parameter(p, cert.r, depth)?;
    let mut img = render::render(&cls, &grid, palette(cfg)?);
    let built = construct(z0, p, eps, &CertificateOptions::default())?;
    render::draw_trap(&mut img, &grid, &built.trap, render::TRAP_COLOUR);
    for m in cls.thresholds() {
        if let Some(radius) = m.upper.as_f64().filter(|&v| v < 1e6) {
            render::draw_circle(&mut img, &grid, Complex64::new(0.0, 0.0), radius, render::DISC_COLOUR);
        }
    }
    render::draw_rectangle(&mut img, &grid, &built.bare_rectangle, render::RECTANGLE_COLOUR);
    render::draw_samples(&mut img, &grid, &cert.samples);
    render::mark(&mut img, &grid, z0, [255, 255, 255]);
    Ok(img)
}

pub fn hairs(cfg: &JobConfig) -> Result<(), CliError> {
    let p = cfg.parameter(DEFAULT_A)?;
    let addrs = parse_addresses(cfg, &["(0)", "1,(0)"])?;
    let traced = trace_hairs(&addrs, &p, cfg.depth.unwrap_or(HAIR_DEPTH), cfg.t_max.unwrap_or(HAIR_T_MAX))?;
    let export: Vec<HairExport> = traced.iter().map(HairPolyline::export).collect();
    write_json(cfg.out.as_deref(), &export)
}

#[derive(Serialize)]
struct FatouPointReport {
    z: [f64; 2],
    membership: FatouMembership,
    semiconjugacy_residual: f64,
}

#[derive(Serialize)]
struct FatouReport {
    config: FatouOrbitConfig,
    points: Vec<FatouPointReport>,
}

pub fn fatou(cfg: &JobConfig) -> Result<(), CliError> {
    let defaults = FatouOrbitConfig::default();
    let orbit_cfg = FatouOrbitConfig::new(
        cfg.t.unwrap_or(defaults.t),
        cfg.n0_max.unwrap_or(defaults.n0_max),
        cfg.depth.unwrap_or(defaults.depth),
    )?;
    let pts = cfg.points.clone().unwrap_or_else(|| vec![[100.0, 0.0], [-100.0, 0.0], [0.0, PI]]);
    let points = pts
        .into_iter()
        .map(|z| {
            let w = Complex64::new(z[0], z[1]);
            Ok(FatouPointReport {
                z,
                membership: fatou_a_membership(w, &orbit_cfg)?,
                semiconjugacy_residual: semiconjugacy_residual(w),
            })
        })
        .collect::<Result<_, CliError>>()?;
    write_json(cfg.out.as_deref(), &FatouReport { config: orbit_cfg, points })
}
