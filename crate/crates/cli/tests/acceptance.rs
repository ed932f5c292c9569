//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any fails.

use std::f64::consts::TAU;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use expoweb_core::fatou::{conjugacy_residual, fatou_a_membership, semiconjugacy_residual, FatouMembership, FatouOrbitConfig};
use expoweb_core::growth::{growth_bracket, growth_sandwich, max_modulus_sequence, verify_r_zero};
use expoweb_core::hairs::{trace_hair, ExternalAddress};
use expoweb_core::raster::{
    complement_components, pairwise_separation_witness, spiders_web_verdict, GridSpec, Mask, PairSeparation,
};
use expoweb_core::trap::{construct, separation_certificate, CertificateOptions, SampleVerdict, SeparationCertificate, TrapSet};
use expoweb_core::{render, Classifier, Label, Parameter};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SANDWICH_TOL: f64 = 1e-12;
const RESIDUAL_TOL: f64 = 1e-10;
const ENDPOINT_TOL: f64 = 1e-6;
const REALITY_TOL: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn period_three() -> Parameter {
    Parameter::new(c(2.061, 1.569)).unwrap()
}

/// Positive root of `e^x - x = 2` by bisection.
fn repelling_fixed_point() -> f64 {
    let (mut lo, mut hi) = (0.5f64, 2.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid.exp() - mid - 2.0 > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn growth_lemma() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    let n = 100_000;
    for _ in 0..n {
        let p = Parameter::new(c(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0))).unwrap();
        let k = rng.gen_range(1.0..10.0);
        let x = (1.0 + 2.0 * (p.abs() + k)).ln() + 10f64.powf(rng.gen_range(-3.0..4.0));
        let z = c(x, rng.gen_range(-100.0..100.0));
        let check = growth_sandwich(z, k, &p).unwrap();
        worst = worst.min(check.lower_slack.min(check.upper_slack));
        // Direct evaluation where it is representable.
        let direct_ok = x + 1.0 > 700.0 || {
            let v = (z.exp() + p.a()).norm();
            v >= ((x - 1.0).exp_m1() + k) * (1.0 - SANDWICH_TOL) && v <= ((x + 1.0).exp_m1() - k) * (1.0 + SANDWICH_TOL)
        };
        if !check.holds || !direct_ok {
            failures += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(failures == 0 && secs < 5.0, format!("{n} samples, {failures} failures, min slack {worst:.3e}, {secs:.2} s"))
}

fn modulus_sandwich() -> Outcome {
    let start = Instant::now();
    let cases = [(Parameter::real(-2.0).unwrap(), 0.1), (Parameter::real(-1.5).unwrap(), 0.1), (period_three(), 0.05)];
    let k = 1.0;
    let mut checked = 0;
    let mut bad = Vec::new();
    for (p, eps) in cases {
        let mut radii = vec![3.0];
        match construct(c(0.0, 0.0), &p, eps, &CertificateOptions::default()) {
            Ok(built) => radii.push(built.r),
            Err(e) => bad.push(format!("{}: {e}", p.a())),
        }
        for r in radii {
            let seq = max_modulus_sequence(r, &p, 6).unwrap();
            for (n, m) in seq.iter().enumerate() {
                let (lo, hi) = growth_bracket(r, n, k, &p).unwrap();
                checked += 1;
                if !(lo <= m.lower && m.upper <= hi) {
                    bad.push(format!("a = {}, R = {r}, n = {n}", p.a()));
                }
                // M^3 exceeds f64 here, so only n <= 2 can be direct.
                if n <= 2 && m.exact.is_none() {
                    bad.push(format!("a = {}, R = {r}, n = {n} not computed directly", p.a()));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(bad.is_empty() && secs < 10.0, format!("{checked} brackets, {} violations {bad:?}, {secs:.2} s", bad.len()))
}

/// Largest `|e^z + a|` over a dense sample of the circle.
fn naive_max_modulus(r: f64, a: Complex64, points: usize) -> f64 {
    (0..points).map(|k| (Complex64::from_polar(r, TAU * k as f64 / points as f64).exp() + a).norm()).fold(0.0, f64::max)
}

fn r_zero_grid() -> Outcome {
    let radii: Vec<f64> = (-3..=2).map(|e| 10f64.powi(e)).collect();
    let axis = |i: usize| -5.0 + 10.0 * i as f64 / 19.0;
    let (mut checked, mut failures) = (0, 0);
    for i in 0..20 {
        for j in 0..20 {
            let p = Parameter::new(c(axis(i), axis(j))).unwrap();
            let rep = verify_r_zero(&p, &radii).unwrap();
            for e in &rep.entries {
                checked += 1;
                let naive = naive_max_modulus(e.r, p.a(), 2048);
                if !(e.holds && naive > e.r && naive <= e.m * (1.0 + 1e-9)) {
                    failures += 1;
                }
            }
        }
    }
    outcome(failures == 0, format!("{checked} (a, R) pairs, {failures} failures"))
}

/// `ln M^k(R)` for `k = 0..=depth`, by dense circle sampling, rounded up.
fn naive_log_thresholds(r: f64, a: Complex64, depth: usize) -> Vec<f64> {
    let mut out = vec![r.ln()];
    let mut m = r;
    for _ in 0..depth {
        let ln_next = if m < 700.0 { naive_max_modulus(m, a, 1 << 16).ln() } else { m };
        out.push(ln_next * (1.0 + 1e-9));
        m = ln_next.exp();
    }
    out
}

/// `ln |f^k(z)|` by plain iteration, as long as it can be followed.
fn naive_log_orbit(z: Complex64, a: Complex64, len: usize) -> Vec<(f64, Option<Complex64>)> {
    let mut out = Vec::with_capacity(len);
    let mut w = z;
    while out.len() < len {
        out.push((w.norm().ln(), Some(w)));
        if w.re > 700.0 {
            if out.len() < len {
                out.push((w.re, None));
            }
            break;
        }
        w = w.exp() + a;
    }
    out
}

fn dist_to_segment(z: Complex64, p: Complex64, q: Complex64) -> f64 {
    let d = q - p;
    let len = d.norm();
    if len == 0.0 {
        return (z - p).norm();
    }
    let u = d / len;
    let t = ((z - p) * u.conj()).re.clamp(0.0, len);
    (z - (p + u * t)).norm()
}

fn naive_in_trap(w: Complex64, trap: &TrapSet) -> bool {
    if w.re <= -trap.c() {
        return true;
    }
    let (lo, hi) = trap.im_range();
    let k_lo = ((w.im - hi) / TAU).floor() as i64;
    let k_hi = ((w.im - lo) / TAU).ceil() as i64;
    (k_lo..=k_hi).any(|k| {
        let v = w - c(0.0, TAU * k as f64);
        trap.base_arc().windows(2).any(|s| dist_to_segment(v, s[0], s[1]) <= 1e-9)
    })
}

/// Cycle points of the attracting cycle, by iterating the singular value.
fn naive_cycle(a: Complex64) -> Vec<Complex64> {
    let mut w = a;
    for _ in 0..20_000 {
        w = w.exp() + a;
    }
    let mut pts = vec![w];
    loop {
        w = w.exp() + a;
        if (w - pts[0]).norm() < 1e-9 || pts.len() > 64 {
            return pts;
        }
        pts.push(w);
    }
}

fn naive_agrees(cert: &SeparationCertificate, trap: &TrapSet) -> (usize, usize) {
    let a = cert.parameter.a();
    let logs = naive_log_thresholds(cert.r, a, cert.depth);
    let cycle = naive_cycle(a);
    let agree = cert
        .samples
        .iter()
        .filter(|s| {
            let z = c(s.z[0], s.z[1]);
            match s.verdict {
                SampleVerdict::XMember => {
                    let last = s.first_trap_index.unwrap_or(cert.depth);
                    let orbit = naive_log_orbit(z, a, last + 1);
                    orbit.len() == last + 1
                        && orbit.iter().enumerate().all(|(k, (ln_abs, _))| *ln_abs >= logs[k])
                        && s.first_trap_index.map_or(true, |m| orbit[m].1.is_some_and(|w| naive_in_trap(w, trap)))
                }
                SampleVerdict::Fatou => {
                    let mut w = z;
                    for _ in 0..2000 {
                        w = w.exp() + a;
                    }
                    z.norm() >= cert.r && cycle.iter().any(|p| (w - p).norm() < 1e-8)
                }
            }
        })
        .count();
    (agree, cert.samples.len())
}

fn certificates() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for (p, eps) in [(Parameter::real(-2.0).unwrap(), 0.1), (period_three(), 0.05)] {
        let start = Instant::now();
        match separation_certificate(c(0.0, 0.0), &p, eps, 3, 512) {
            Ok(cert) => {
                let secs = start.elapsed().as_secs_f64();
                let built = construct(c(0.0, 0.0), &p, eps, &CertificateOptions::default()).unwrap();
                let (agree, total) = naive_agrees(&cert, &built.trap);
                let enclosed = cert.enclosed.re_range[0] < 0.0 && cert.enclosed.re_range[1] > 0.0;
                pass &= agree == total && total > 0 && secs < 60.0 && enclosed;
                lines.push(format!("a = {}: {total} samples, oracle agrees on {agree}, {secs:.2} s", p.a()));
            }
            Err(e) => {
                pass = false;
                lines.push(format!("a = {}: {e}", p.a()));
            }
        }
    }
    outcome(pass, lines.join("; "))
}

fn fast_or_basin_mask(p: &Parameter, grid: &GridSpec) -> Mask {
    let cls = Classifier::for_parameter(p, 1.0, 3).unwrap();
    let classes = render::classify_grid(&cls, grid);
    let bits = classes.iter().map(|c| matches!(c.label, Label::Basin | Label::ArVerified(_))).collect();
    Mask::from_bits(grid.nx(), grid.ny(), bits).unwrap()
}

fn spiders_web() -> Outcome {
    let p = Parameter::real(-2.0).unwrap();
    let mut verdicts = Vec::new();
    let mut detail = Vec::new();
    for n in [256, 512] {
        let grid = GridSpec::covering(-8.0, 8.0, -8.0, 8.0, n, n).unwrap();
        let mask = fast_or_basin_mask(&p, &grid);
        let samples = expoweb_core::raster::inner_samples(&grid, 16);
        let rep = spiders_web_verdict(&mask, &grid, &samples).unwrap();
        detail.push(format!(
            "{n}^2: verdict {}, {} mask components, chain {}, {} failing samples",
            rep.verdict,
            rep.mask_components,
            rep.chain.len(),
            rep.failing.len()
        ));
        verdicts.push((rep.verdict, rep.chain.len()));
    }
    let pass = verdicts.iter().all(|&(v, _)| v) && verdicts[1].1 >= 3;
    outcome(pass, detail.join("; "))
}

fn endpoint_witness() -> Outcome {
    let p = Parameter::real(-2.0).unwrap();
    let fixed = repelling_fixed_point();
    let zero = trace_hair(&ExternalAddress::zeros(), &p, 40, 100.0).unwrap().endpoint_estimate;
    let one = trace_hair(&ExternalAddress::new(vec![1], vec![0]).unwrap(), &p, 40, 100.0).unwrap().endpoint_estimate;
    let one_oracle = c((fixed + 2.0).ln(), TAU);
    let values_ok = (zero - c(fixed, 0.0)).norm() < ENDPOINT_TOL && (one - one_oracle).norm() < ENDPOINT_TOL;

    let (n, dy, dx) = (512, TAU / 160.0, 12.0 / 512.0);
    let (re_min, im_max) = (fixed - 256.5 * dx, 350.5 * dy);
    let grid = GridSpec::covering(re_min, re_min + n as f64 * dx, im_max - n as f64 * dy, im_max, n, n).unwrap();
    let mask = fast_or_basin_mask(&p, &grid);
    let witness = pairwise_separation_witness(&mask, &grid, zero, one);
    let sep_ok = matches!(witness, Ok(PairSeparation::Witness { .. }));
    outcome(
        values_ok && sep_ok,
        format!("endpoints {zero:.9} and {one:.9} (oracles {fixed:.9}, {one_oracle:.9}); witness {witness:?}"),
    )
}

fn hair_tracing() -> Outcome {
    let p = Parameter::real(-2.0).unwrap();
    let h = trace_hair(&ExternalAddress::zeros(), &p, 15, 100.0).unwrap();
    let max_im = h.points.iter().map(|q| q.z.im.abs()).fold(0.0, f64::max);
    let gaps: Vec<f64> = (5..=15).map(|d| trace_hair(&ExternalAddress::zeros(), &p, d, 100.0).unwrap().endpoint_gap).collect();
    let min_ratio = gaps.windows(2).map(|w| w[0] / w[1]).fold(f64::INFINITY, f64::min);
    outcome(max_im < REALITY_TOL && min_ratio >= 2.0, format!("max |Im| {max_im:.1e}, min gap ratio {min_ratio:.3} over depths 5-15"))
}

fn fatou_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let z = c(rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
        let zeta = c(rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
        worst = worst.max(semiconjugacy_residual(z)).max(conjugacy_residual(zeta));
    }
    let cfg = FatouOrbitConfig::default();
    let slow = fatou_a_membership(c(100.0, 0.0), &cfg).unwrap();
    let fast = fatou_a_membership(c(-100.0, 0.0), &cfg).unwrap();
    let pass = worst <= RESIDUAL_TOL && slow == FatouMembership::NotVerified && matches!(fast, FatouMembership::Verified { .. });
    outcome(pass, format!("worst residual {worst:.2e}; x = 100 {slow:?}; z = -100 {fast:?}"))
}

/// Complement components by union-find over 4-neighbours.
fn union_find_components(m: &Mask) -> Vec<usize> {
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let (nx, ny) = (m.nx(), m.ny());
    let mut parent: Vec<usize> = (0..nx * ny).collect();
    for j in 0..ny {
        for i in 0..nx {
            if m.get(i, j) {
                continue;
            }
            for (u, v) in [(i + 1, j), (i, j + 1)] {
                if u < nx && v < ny && !m.get(u, v) {
                    let (a, b) = (root(&mut parent, j * nx + i), root(&mut parent, v * nx + u));
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    (0..nx * ny).map(|x| root(&mut parent, x)).collect()
}

fn raster_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut mismatches = 0;
    let mut pixels = 0;
    for _ in 0..500 {
        let (nx, ny) = (rng.gen_range(1..=16), rng.gen_range(1..=16));
        let density = rng.gen_range(0.05..0.95);
        let m = Mask::from_bits(nx, ny, (0..nx * ny).map(|_| rng.gen_bool(density)).collect()).unwrap();
        let got = complement_components(&m);
        let roots = union_find_components(&m);
        let touches = |r: usize| (0..nx * ny).any(|x| roots[x] == r && (x % nx == 0 || x / nx == 0 || x % nx + 1 == nx || x / nx + 1 == ny));
        for x in 0..nx * ny {
            pixels += 1;
            let (i, j) = (x % nx, x / nx);
            let ok = if m.get(i, j) {
                got.label(i, j) == 0
            } else {
                let info = got.info(got.label(i, j));
                let same_partition =
                    (0..nx * ny).filter(|&y| !m.bits()[y]).all(|y| (got.labels[y] == got.labels[x]) == (roots[y] == roots[x]));
                info.is_some_and(|c| c.bounded == !touches(roots[x])) && same_partition
            };
            if !ok {
                mismatches += 1;
            }
        }
    }
    outcome(mismatches == 0, format!("500 masks, {pixels} pixels, {mismatches} mismatches"))
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let golden_ppm = std::fs::read(golden_dir().join("render_minus2_128.ppm")).unwrap();
    let golden_json = std::fs::read(golden_dir().join("certificate_minus2.json")).unwrap();
    let mut runs = 0;
    let mut diffs = Vec::new();
    for (run, threads) in [(0, "1"), (1, "4"), (2, "8"), (3, "4"), (4, "4")] {
        let ppm = dir.path().join(format!("r{run}.ppm"));
        let json = dir.path().join(format!("c{run}.json"));
        let exe = env!("CARGO_BIN_EXE_expoweb");
        let render_ok = Command::new(exe)
            .args(["render", "--grid", "128x128", "--out", ppm.to_str().unwrap()])
            .env("EXPOWEB_THREADS", threads)
            .status()
            .unwrap()
            .success();
        let certify_ok = Command::new(exe)
            .args(["certify", "--out", json.to_str().unwrap()])
            .env("EXPOWEB_THREADS", threads)
            .stderr(std::process::Stdio::null())
            .status()
            .unwrap()
            .success();
        runs += 1;
        if !(render_ok && certify_ok) {
            diffs.push(format!("run {run} failed"));
            continue;
        }
        if std::fs::read(&ppm).unwrap() != golden_ppm {
            diffs.push(format!("ppm differs at {threads} threads"));
        }
        if std::fs::read(&json).unwrap() != golden_json {
            diffs.push(format!("json differs at {threads} threads"));
        }
    }
    outcome(diffs.is_empty(), format!("{runs} runs over 1/4/8 threads, differences: {diffs:?}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("growth lemma on random samples", growth_lemma),
        ("iterated maximum modulus sandwich", modulus_sandwich),
        ("M(R) > R on the parameter grid", r_zero_grid),
        ("separation certificates with independent oracle", certificates),
        ("spider's web verdict at 256 and 512", spiders_web),
        ("endpoint separation witness", endpoint_witness),
        ("hair reality and endpoint contraction", hair_tracing),
        ("Fatou function identities and membership", fatou_identities),
        ("complement components against union-find", raster_oracle),
        ("golden outputs across runs and thread counts", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} {}: {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
