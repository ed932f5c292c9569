//! Job parameters from flags and from TOML files. File values win.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Every knob any subcommand reads. Unset fields fall back to the
/// subcommand's defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub a: Option<[f64; 2]>,
    pub eps: Option<f64>,
    pub depth: Option<usize>,
    /// `"WxH"`.
    pub grid: Option<String>,
    pub out: Option<PathBuf>,
    pub palette: Option<String>,
    /// Radius of `A_R` for rendering.
    pub r: Option<f64>,
    /// `[re_min, re_max, im_min, im_max]`.
    pub view: Option<[f64; 4]>,
    pub z0: Option<[f64; 2]>,
    pub samples: Option<usize>,
    pub overlay: Option<PathBuf>,
    pub mask: Option<PathBuf>,
    pub addresses: Option<Vec<String>>,
    pub t_max: Option<f64>,
    pub points: Option<Vec<[f64; 2]>>,
    pub t: Option<f64>,
    pub n0_max: Option<usize>,
    pub suites: Option<Vec<String>>,
    pub k: Option<f64>,
    pub seed: Option<u64>,
}

macro_rules! prefer {
    ($hi:expr, $lo:expr, $($f:ident),+) => {
        JobConfig { $($f: $hi.$f.or($lo.$f)),+ }
    };
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `self` take precedence over `flags`.
    pub fn over(self, flags: JobConfig) -> JobConfig {
        prefer!(
            self, flags, a, eps, depth, grid, out, palette, r, view, z0, samples, overlay, mask, addresses, t_max,
            points, t, n0_max, suites, k, seed
        )
    }

    pub fn parameter(&self, default: [f64; 2]) -> Result<expoweb_core::Parameter, CliError> {
        let [re, im] = self.a.unwrap_or(default);
        Ok(expoweb_core::Parameter::new(Complex64::new(re, im))?)
    }

    pub fn grid_size(&self, default: (usize, usize)) -> Result<(usize, usize), CliError> {
        self.grid.as_deref().map_or(Ok(default), parse_grid)
    }
}

pub fn parse_complex(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| format!("bad number {p:?} in {s:?}"));
    match parts.as_slice() {
        [re] => Ok([num(re)?, 0.0]),
        [re, im] => Ok([num(re)?, num(im)?]),
        _ => Err(format!("expected re,im, got {s:?}")),
    }
}

pub fn parse_view(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number {p:?} in view {s:?}")))
        .collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| format!("view needs re_min,re_max,im_min,im_max, got {s:?}"))
}

pub fn parse_grid(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Config(format!("grid must look like 512x512, got {s:?}"));
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((w.trim().parse().map_err(|_| bad())?, h.trim().parse().map_err(|_| bad())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_values_override_flags() {
        let flags = JobConfig { eps: Some(0.1), depth: Some(3), ..Default::default() };
        let file: JobConfig = toml::from_str("eps = 0.05\ngrid = \"64x32\"").unwrap();
        let cfg = file.over(flags);
        assert_eq!((cfg.eps, cfg.depth), (Some(0.05), Some(3)));
        assert_eq!(cfg.grid_size((1, 1)).unwrap(), (64, 32));
    }

    #[test]
    fn parsers() {
        assert_eq!(parse_complex("-2").unwrap(), [-2.0, 0.0]);
        assert_eq!(parse_complex("2.061, 1.569").unwrap(), [2.061, 1.569]);
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_grid("12").is_err());
        assert_eq!(parse_view("-1,1,-2,2").unwrap(), [-1.0, 1.0, -2.0, 2.0]);
        assert!(toml::from_str::<JobConfig>("colour = 1").is_err());
    }
}
