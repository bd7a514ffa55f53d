//! Batch front-end: a `key = value` config file selects a spectrum, schemes
//! and grids; each subcommand writes CSV tables into `output.dir`.
//!
//! Recognized keys (defaults in brackets):
//!
//! ```text
//! subcommand        diagnose | weights | converge | compare-norms | contours | factorize-check
//! family            shifted_integers | kadec_perturbed | clustered_pairs | custom_list [shifted_integers]
//! count             window size [50]
//! delta, eps, amp   family parameters [0.3, 0.5, 0.2]
//! points            custom_list points, `re:im` comma list
//! scheme            comma list of naive, projection, universal [projection]
//! schedule          comma list of increasing radii [5,10,20,40]
//! grid.X, grid.h    real-line grid [200, 0.01]
//! output.dir        [out]
//! seed              [0]
//! l.ratio           contour half-width ratio [2]
//! alpha.safety      [1.2]
//! contours.l_min, contours.l_max, contours.l_step, contours.count, contours.samples
//! pw.atoms          test function, `mu_re:mu_im:c_re:c_im` comma list [0:0.3:1:0]
//! k.center, k.radius, k.samples     compact set for sup errors [0:0, 3, 200]
//! probe.trials, probe.atoms, probe.iterations
//! diag.X, diag.a    window and line shift for the diagnostics [20, 0]
//! ```

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::blaschke::{BlaschkeEvaluator, Orientation};
use crate::contours::{build_schedule, ContourSchedule, ScheduleConfig, MIN_SIDE_SAMPLES};
use crate::diagnostics;
use crate::engine::{LagrangeSystem, PWFunction};
use crate::error::{Error, Result};
use crate::genfun::{check_factorization, OuterEvaluator};
use crate::genfun::GeneratingFunctionEvaluator;
use crate::spectrum::{make_family, FamilySpec, Spectrum};
use crate::weights::{SchemeKind, WeightScheme};

const KNOWN_KEYS: &[&str] = &[
    "subcommand",
    "family",
    "count",
    "delta",
    "eps",
    "amp",
    "points",
    "scheme",
    "schedule",
    "grid.X",
    "grid.h",
    "output.dir",
    "seed",
    "l.ratio",
    "alpha.safety",
    "contours.l_min",
    "contours.l_max",
    "contours.l_step",
    "contours.count",
    "contours.samples",
    "pw.atoms",
    "k.center",
    "k.radius",
    "k.samples",
    "probe.trials",
    "probe.atoms",
    "probe.iterations",
    "diag.X",
    "diag.a",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Diagnose,
    Weights,
    Converge,
    CompareNorms,
    Contours,
    FactorizeCheck,
}

impl Command {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "diagnose" => Command::Diagnose,
            "weights" => Command::Weights,
            "converge" => Command::Converge,
            "compare-norms" => Command::CompareNorms,
            "contours" => Command::Contours,
            "factorize-check" => Command::FactorizeCheck,
            other => return Err(Error::Config(format!("unknown subcommand `{other}`"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Diagnose => "diagnose",
            Command::Weights => "weights",
            Command::Converge => "converge",
            Command::CompareNorms => "compare-norms",
            Command::Contours => "contours",
            Command::FactorizeCheck => "factorize-check",
        }
    }
}

/// Parsed `key = value` file. Blank lines and `#` comments are skipped.
#[derive(Clone, Debug, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if !KNOWN_KEYS.contains(&k) {
                return Err(Error::Config(format!("line {}: unknown key `{k}`", no + 1)));
            }
            if values.insert(k.to_string(), v.to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key `{k}`", no + 1)));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.values.insert(key.to_string(), value.to_string());
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("bad value `{v}` for `{key}`"))),
        }
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64> {
        self.parsed(key, default)
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize> {
        self.parsed(key, default)
    }

    fn list(&self, key: &str) -> Vec<String> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            })
            .unwrap_or_default()
    }

    fn reals(&self, key: &str, item: &str) -> Result<Vec<f64>> {
        item.split(':')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad entry `{item}` in `{key}`")))
            })
            .collect()
    }

    fn complex(&self, key: &str, item: &str) -> Result<Complex64> {
        match self.reals(key, item)?.as_slice() {
            [re, im] => Ok(Complex64::new(*re, *im)),
            _ => Err(Error::Config(format!("`{key}` expects re:im, got `{item}`"))),
        }
    }

    pub fn command(&self) -> Result<Command> {
        let s = self
            .get("subcommand")
            .ok_or_else(|| Error::Config("no subcommand given".into()))?;
        Command::parse(s)
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        let family = self.get("family").unwrap_or("shifted_integers");
        let count = self.usize("count", 50)?;
        let mut params = BTreeMap::new();
        params.insert("delta".to_string(), self.f64("delta", 0.3)?);
        params.insert("eps".to_string(), self.f64("eps", 0.5)?);
        params.insert("amp".to_string(), self.f64("amp", 0.2)?);
        let spec = match FamilySpec::from_name(family, &params).map_err(config_err)? {
            FamilySpec::CustomList(_) => {
                let pts = self
                    .list("points")
                    .iter()
                    .map(|p| self.complex("points", p))
                    .collect::<Result<Vec<_>>>()?;
                if pts.is_empty() {
                    return Err(Error::Config("custom_list needs `points`".into()));
                }
                FamilySpec::CustomList(pts)
            }
            s => s,
        };
        make_family(&spec, count).map_err(config_err)
    }

    pub fn schemes(&self) -> Result<Vec<SchemeKind>> {
        let names = self.list("scheme");
        if names.is_empty() {
            return Ok(vec![SchemeKind::Projection]);
        }
        names
            .iter()
            .map(|n| SchemeKind::parse(n).map_err(config_err))
            .collect()
    }

    pub fn radii(&self) -> Result<Vec<f64>> {
        let items = self.list("schedule");
        if items.is_empty() {
            return Ok(vec![5.0, 10.0, 20.0, 40.0]);
        }
        items
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad radius `{s}` in `schedule`")))
            })
            .collect()
    }

    pub fn test_function(&self) -> Result<PWFunction> {
        let items = self.list("pw.atoms");
        if items.is_empty() {
            return Ok(PWFunction::kernel(Complex64::new(0.0, 0.3)));
        }
        let atoms = items
            .iter()
            .map(|s| match self.reals("pw.atoms", s)?.as_slice() {
                [a, b, c, d] => Ok((Complex64::new(*a, *b), Complex64::new(*c, *d))),
                _ => Err(Error::Config(format!(
                    "`pw.atoms` expects mu_re:mu_im:c_re:c_im, got `{s}`"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        PWFunction::new(atoms).map_err(config_err)
    }

    pub fn schedule_config(&self, s: &Spectrum) -> Result<ScheduleConfig> {
        let l_min = self.f64("contours.l_min", 2.0)?;
        let l_max = self.f64("contours.l_max", s.max_modulus().max(2.0 * l_min))?;
        let step = self.f64("contours.l_step", 0.25)?;
        if !(step > 0.0) || !(l_max > l_min) || !(l_min > 0.0) {
            return Err(Error::Config("contour candidate range".into()));
        }
        let mut cfg = ScheduleConfig::uniform(l_min, l_max, step, self.usize("contours.count", 3)?);
        cfg.ratio = self.f64("l.ratio", cfg.ratio)?;
        cfg.safety = self.f64("alpha.safety", cfg.safety)?;
        cfg.samples_per_side = self.usize("contours.samples", MIN_SIDE_SAMPLES)?;
        Ok(cfg)
    }
}

fn config_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

/// 0 on success, 3 for a failed numerical precondition, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        3
    } else {
        2
    }
}

/// Upper and lower contour schedules for the halfplanes `s` occupies.
pub fn contour_schedules(
    s: &Spectrum,
    cfg: &ScheduleConfig,
) -> Result<(Option<ContourSchedule>, Option<ContourSchedule>)> {
    let build = |o: Orientation| -> Result<Option<ContourSchedule>> {
        let occupied = s
            .points()
            .iter()
            .any(|p| (p.im > 0.0) == (o == Orientation::Upper));
        if !occupied {
            return Ok(None);
        }
        build_schedule(&BlaschkeEvaluator::new(s, o), cfg).map(Some)
    };
    Ok((build(Orientation::Upper)?, build(Orientation::Lower)?))
}

pub fn build_scheme(kind: SchemeKind, s: &Spectrum, cfg: &Config) -> Result<WeightScheme> {
    match kind {
        SchemeKind::Naive => WeightScheme::naive(s, cfg.radii()?),
        SchemeKind::Projection => WeightScheme::projection(s, cfg.radii()?),
        SchemeKind::Universal => {
            let (up, low) = contour_schedules(s, &cfg.schedule_config(s)?)?;
            WeightScheme::universal(s, up, low)
        }
    }
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    let path = dir.join(name);
    Ok((path.clone(), BufWriter::new(File::create(&path)?)))
}

fn write_rows<T: Serialize>(dir: &Path, name: &str, rows: &[T]) -> Result<PathBuf> {
    let (path, f) = create(dir, name)?;
    let mut wr = csv::Writer::from_writer(f);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(path)
}

#[derive(Serialize)]
struct ErrorRow {
    n: f64,
    scheme: &'static str,
    l2_error: f64,
    #[serde(rename = "sup_error_K")]
    sup_error_k: f64,
    tail_bound: f64,
}

#[derive(Serialize)]
struct NormRow {
    n: f64,
    scheme: &'static str,
    norm_lower_bound: f64,
}

#[derive(Serialize)]
struct WeightRow {
    scheme: &'static str,
    n: f64,
    k: usize,
    lambda_re: f64,
    lambda_im: f64,
    w_re: f64,
    w_im: f64,
}

#[derive(Serialize)]
struct FactorRow {
    z_re: f64,
    z_im: f64,
    g_abs: f64,
    rel_error: f64,
}

fn grid(cfg: &Config) -> Result<(f64, f64)> {
    let x = cfg.f64("grid.X", 200.0)?;
    let h = cfg.f64("grid.h", 0.01)?;
    if !(x > 0.0) || !(h > 0.0) || h >= x {
        return Err(Error::Config("grid.X and grid.h must satisfy 0 < h < X".into()));
    }
    Ok((x, h))
}

fn compact_set(cfg: &Config) -> Result<(Complex64, f64, usize)> {
    let center = match cfg.get("k.center") {
        Some(v) => cfg.complex("k.center", v)?,
        None => Complex64::new(0.0, 0.0),
    };
    Ok((center, cfg.f64("k.radius", 3.0)?, cfg.usize("k.samples", 200)?))
}

fn run_converge(cfg: &Config, s: &Spectrum, dir: &Path) -> Result<Vec<PathBuf>> {
    let (x, h) = grid(cfg)?;
    let f = cfg.test_function()?;
    let (center, radius, samples) = compact_set(cfg)?;
    let g = GeneratingFunctionEvaluator::new(s.clone());
    let sys = LagrangeSystem::new(&g, x, h)?;
    let target = sys.template().map(|xx, _| f.eval(Complex64::new(xx, 0.0)));
    let tail = f.tail_bound(x);
    let mut rows = Vec::new();
    for kind in cfg.schemes()? {
        let ws = build_scheme(kind, s, cfg)?;
        let step_rows = (0..ws.steps())
            .into_par_iter()
            .map(|n| {
                let approx = sys.partial_sum(&f, &ws, n)?;
                Ok(ErrorRow {
                    n: ws.step_label(n),
                    scheme: kind.name(),
                    l2_error: crate::engine::l2_error(&approx, &target)?,
                    sup_error_k: sys.compactwise_error(&f, &ws, n, center, radius, samples)?,
                    tail_bound: tail,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.extend(step_rows);
    }
    Ok(vec![write_rows(dir, "errors.csv", &rows)?])
}

fn run_norms(cfg: &Config, s: &Spectrum, dir: &Path) -> Result<Vec<PathBuf>> {
    let (x, h) = grid(cfg)?;
    let seed = cfg.parsed::<u64>("seed", 0)?;
    let trials = cfg.usize("probe.trials", 4)?;
    let atoms = cfg.usize("probe.atoms", 40)?;
    let iterations = cfg.usize("probe.iterations", 30)?;
    let g = GeneratingFunctionEvaluator::new(s.clone());
    let sys = LagrangeSystem::new(&g, x, h)?;
    let mut rows = Vec::new();
    for kind in cfg.schemes()? {
        let ws = build_scheme(kind, s, cfg)?;
        for n in 0..ws.steps() {
            rows.push(NormRow {
                n: ws.step_label(n),
                scheme: kind.name(),
                norm_lower_bound: sys.operator_norm_probe(&ws, n, trials, seed, atoms, iterations)?,
            });
        }
    }
    Ok(vec![write_rows(dir, "norms.csv", &rows)?])
}

fn run_weights(cfg: &Config, s: &Spectrum, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut rows = Vec::new();
    for kind in cfg.schemes()? {
        let ws = build_scheme(kind, s, cfg)?;
        for n in 0..ws.steps() {
            for (k, w) in ws.weight_row(n)? {
                let l = s.points()[k];
                rows.push(WeightRow {
                    scheme: kind.name(),
                    n: ws.step_label(n),
                    k,
                    lambda_re: l.re,
                    lambda_im: l.im,
                    w_re: w.re,
                    w_im: w.im,
                });
            }
        }
    }
    Ok(vec![write_rows(dir, "weights.csv", &rows)?])
}

fn run_contours(cfg: &Config, s: &Spectrum, dir: &Path) -> Result<Vec<PathBuf>> {
    let (up, low) = contour_schedules(s, &cfg.schedule_config(s)?)?;
    let mut out = Vec::new();
    for (sched, name) in [(up, "contours.csv"), (low, "contours_lower.csv")] {
        if let Some(sched) = sched {
            let (path, f) = create(dir, name)?;
            sched.write_csv(f)?;
            out.push(path);
        }
    }
    Ok(out)
}

fn run_diagnose(cfg: &Config, s: &Spectrum, dir: &Path) -> Result<Vec<PathBuf>> {
    let (_, h) = grid(cfg)?;
    let g = GeneratingFunctionEvaluator::new(s.clone());
    let rows = diagnostics::diagnose(&g, cfg.f64("diag.X", 20.0)?, cfg.f64("diag.a", 0.0)?, h)?;
    let (path, f) = create(dir, "report.csv")?;
    diagnostics::write_report_csv(&rows, f)?;
    Ok(vec![path])
}

fn run_factorize(cfg: &Config, s: &Spectrum, dir: &Path) -> Result<Vec<PathBuf>> {
    let (x, h) = grid(cfg)?;
    let g = GeneratingFunctionEvaluator::new(s.clone());
    let o = OuterEvaluator::from_generating_function(&g, x, h)?;
    let bp = BlaschkeEvaluator::new(s, Orientation::Upper);
    let bm = BlaschkeEvaluator::new(s, Orientation::Lower);
    let reach = (x / 4.0).min(10.0).floor() as i64;
    let mut pts = Vec::new();
    for y in [0.5, 1.25, 2.5, -0.5, -1.25, -2.5] {
        for j in -reach..=reach {
            let z = Complex64::new(j as f64 + 0.25, y);
            if s.points().iter().all(|l| (z - l).norm() > 1e-6) {
                pts.push(z);
            }
        }
    }
    let rows = pts
        .par_iter()
        .map(|&z| {
            let rep = check_factorization(&g, &o, &bp, &bm, &[z])?;
            Ok(FactorRow {
                z_re: z.re,
                z_im: z.im,
                g_abs: g.eval_g(z)?.norm(),
                rel_error: rep.max_relative_error,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(vec![write_rows(dir, "factorization.csv", &rows)?])
}

/// Runs `command` (or the config's `subcommand`) and returns the files written.
pub fn run_config(cfg: &Config, command: Option<Command>) -> Result<Vec<PathBuf>> {
    let command = match command {
        Some(c) => c,
        None => cfg.command()?,
    };
    let s = cfg.spectrum()?;
    let dir = PathBuf::from(cfg.get("output.dir").unwrap_or("out"));
    fs::create_dir_all(&dir)?;
    match command {
        Command::Diagnose => run_diagnose(cfg, &s, &dir),
        Command::Weights => run_weights(cfg, &s, &dir),
        Command::Converge => run_converge(cfg, &s, &dir),
        Command::CompareNorms => run_norms(cfg, &s, &dir),
        Command::Contours => run_contours(cfg, &s, &dir),
        Command::FactorizeCheck => run_factorize(cfg, &s, &dir),
    }
}

/// Loads `config_path` and runs it; relative `output.dir` values resolve
/// against the working directory.
pub fn run(config_path: &Path, command: Option<Command>) -> Result<Vec<PathBuf>> {
    run_config(&Config::load(config_path)?, command)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let c = Config::parse("# header\nfamily = clustered_pairs # trailing\ncount=3\n\ngrid.X = 40\n").unwrap();
        assert_eq!(c.get("family"), Some("clustered_pairs"));
        assert_eq!(c.usize("count", 0).unwrap(), 3);
        assert_eq!(c.f64("grid.X", 0.0).unwrap(), 40.0);
        assert_eq!(c.f64("grid.h", 0.01).unwrap(), 0.01);
        assert_eq!(c.spectrum().unwrap().len(), 13);
    }

    #[test]
    fn rejects_bad_config() {
        assert!(matches!(Config::parse("nonsense"), Err(Error::Config(_))));
        assert!(matches!(Config::parse("colour = red"), Err(Error::Config(_))));
        assert!(matches!(Config::parse("count = 1\ncount = 2"), Err(Error::Config(_))));
        let c = Config::parse("count = many").unwrap();
        assert!(matches!(c.spectrum(), Err(Error::Config(_))));
        let c = Config::parse("family = zigzag").unwrap();
        assert!(matches!(c.spectrum(), Err(Error::Config(_))));
        let c = Config::parse("scheme = fancy").unwrap();
        assert!(matches!(c.schemes(), Err(Error::Config(_))));
    }

    #[test]
    fn custom_points_and_atoms() {
        let c = Config::parse("family = custom_list\ncount = 5\npoints = 0:1, 2:-1\npw.atoms = 0:0:1:0, 1:0.5:0.5:0").unwrap();
        let s = c.spectrum().unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(c.test_function().unwrap().atoms().len(), 2);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::AllSlopesHitZeros), 3);
    }
}
