//! Triangle contours `[−l, l] ∪ [l, icl] ∪ [icl, −l]` for the universal
//! method and the selection of `l_n`, `c_n`, `α_n`.
//!
//! Contours live in the upper-halfplane frame of a [`BlaschkeEvaluator`];
//! for a lower evaluator the frame is the mirror image.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::blaschke::BlaschkeEvaluator;
use crate::error::{Error, Result};
use crate::spectrum::{Spectrum, TruncationIndex};

pub const MIN_SIDE_SAMPLES: usize = 512;
pub const ALPHA_FLOOR: f64 = 1e-9;
const INSIDE_SHRINK: f64 = 1e-9;
const ZERO_HIT: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct TriangleContour {
    pub l: f64,
    pub c: f64,
    right: Vec<Complex64>,
    left: Vec<Complex64>,
}

impl TriangleContour {
    pub fn new(l: f64, c: f64, samples_per_side: usize) -> Result<Self> {
        if !(l > 0.0) || !l.is_finite() {
            return Err(Error::BadParameter("l".into()));
        }
        if !(1.0..=10.0).contains(&c) {
            return Err(Error::BadParameter("c".into()));
        }
        let n = samples_per_side.max(MIN_SIDE_SAMPLES);
        let apex = Complex64::new(0.0, c * l);
        let side = |start: Complex64| -> Vec<Complex64> {
            (0..n)
                .map(|j| start + (apex - start) * (j as f64 / (n - 1) as f64))
                .collect()
        };
        Ok(Self {
            l,
            c,
            right: side(Complex64::new(l, 0.0)),
            left: side(Complex64::new(-l, 0.0)),
        })
    }

    pub fn apex(&self) -> Complex64 {
        Complex64::new(0.0, self.c * self.l)
    }

    pub fn right_side(&self) -> &[Complex64] {
        &self.right
    }

    pub fn left_side(&self) -> &[Complex64] {
        &self.left
    }

    /// Both slanted sides, right then left.
    pub fn slanted_samples(&self) -> impl Iterator<Item = &Complex64> {
        self.right.iter().chain(self.left.iter())
    }

    /// Uniform samples of the base `[−l, l]`.
    pub fn base_samples(&self) -> Vec<Complex64> {
        let n = self.right.len();
        (0..n)
            .map(|j| Complex64::new(-self.l + 2.0 * self.l * j as f64 / (n - 1) as f64, 0.0))
            .collect()
    }

    /// Strict containment in the triangle shrunk towards its centroid by a
    /// relative `1e−9`.
    pub fn contains(&self, z: Complex64) -> bool {
        let verts = [
            Complex64::new(-self.l, 0.0),
            Complex64::new(self.l, 0.0),
            self.apex(),
        ];
        let g = (verts[0] + verts[1] + verts[2]) / 3.0;
        let v: Vec<Complex64> = verts
            .iter()
            .map(|&p| g + (p - g) * (1.0 - INSIDE_SHRINK))
            .collect();
        (0..3).all(|i| {
            let a = v[i];
            let b = v[(i + 1) % 3];
            let e = b - a;
            let p = z - a;
            e.re * p.im - e.im * p.re > 0.0
        })
    }
}

/// Indices of spectrum points strictly inside the contour.
pub fn lambda_inside(s: &Spectrum, t: &TriangleContour) -> TruncationIndex {
    TruncationIndex {
        n: t.l,
        included: (0..s.len()).filter(|&k| t.contains(s.points()[k])).collect(),
    }
}

/// Same for a contour living in the frame of `b` (mirrored for lower evaluators).
pub fn lambda_inside_frame(s: &Spectrum, t: &TriangleContour, b: &BlaschkeEvaluator) -> TruncationIndex {
    TruncationIndex {
        n: t.l,
        included: (0..s.len())
            .filter(|&k| t.contains(b.frame(s.points()[k])))
            .collect(),
    }
}

fn score(b: &BlaschkeEvaluator, l: f64) -> f64 {
    b.arg_derivative_on_r(l).max(b.arg_derivative_on_r(-l))
}

/// Picks `count` half-widths. The first is taken from `[c_min, ratio·c_min)`,
/// each next one from `[ratio·l_prev, ratio²·l_prev)`; within a window the
/// smallest admissible candidate whose score `max((arg B)′(±l))` is within
/// `slack` of the window minimum wins. A candidate is inadmissible when
/// `±l` hits the real part of a zero.
pub fn select_l(
    b: &BlaschkeEvaluator,
    candidates: &[f64],
    count: usize,
    ratio: f64,
    slack: f64,
) -> Result<Vec<f64>> {
    if !(ratio > 1.0) {
        return Err(Error::BadParameter("l.ratio".into()));
    }
    let mut cand: Vec<f64> = candidates.iter().copied().filter(|&x| x > 0.0).collect();
    cand.sort_by(f64::total_cmp);
    cand.dedup();
    let Some(&first) = cand.first() else {
        return Err(Error::NoAdmissibleCandidate("empty candidate grid".into()));
    };
    let reals: Vec<f64> = b.points().iter().map(|p| p.re).collect();
    let admissible = |l: f64| {
        let tol = 1e-9 * (1.0 + l.abs());
        !reals
            .iter()
            .any(|&r| (l - r).abs() < tol || (-l - r).abs() < tol)
    };
    let mut out = Vec::with_capacity(count);
    let (mut lo, mut hi) = (first, ratio * first);
    for step in 0..count {
        let window: Vec<(f64, f64)> = cand
            .iter()
            .copied()
            .filter(|&x| x >= lo && x < hi && admissible(x))
            .map(|x| (x, score(b, x)))
            .collect();
        if window.is_empty() {
            return Err(Error::NoAdmissibleCandidate(format!(
                "step {} window [{lo}, {hi})",
                step + 1
            )));
        }
        let best = window.iter().map(|w| w.1).fold(f64::INFINITY, f64::min);
        let pick = window
            .iter()
            .find(|w| w.1 <= best + slack)
            .map(|w| w.0)
            .expect("window minimum exists");
        out.push(pick);
        lo = ratio * pick;
        hi = ratio * ratio * pick;
    }
    Ok(out)
}

/// `ε̂(c) = max over side samples of −log|B(ζ)|/|ζ|`, or `None` if a
/// sample meets a zero.
fn eps_hat(b: &BlaschkeEvaluator, t: &TriangleContour) -> Result<Option<f64>> {
    let zeros = b.frame_points();
    let mut worst = 0.0_f64;
    for &w in t.slanted_samples() {
        if zeros
            .iter()
            .any(|&l| (w - l).norm() < ZERO_HIT * (1.0 + l.norm()))
        {
            return Ok(None);
        }
        let v = b.eval_b(b.frame(w), None)?.norm();
        if v == 0.0 {
            return Ok(None);
        }
        worst = worst.max(-v.ln() / w.norm());
    }
    Ok(Some(worst))
}

/// Apex slope minimizing `ε̂` over a uniform grid of `[1, 10]`, ties to
/// the smaller slope. Returns `(c, ε̂)`.
pub fn select_c(b: &BlaschkeEvaluator, l: f64, grid_size: usize, samples_per_side: usize) -> Result<(f64, f64)> {
    if grid_size < 16 {
        return Err(Error::BadParameter("grid_size must be >= 16".into()));
    }
    let scores = (0..grid_size)
        .into_par_iter()
        .map(|j| {
            let c = 1.0 + 9.0 * j as f64 / (grid_size - 1) as f64;
            let t = TriangleContour::new(l, c, samples_per_side)?;
            Ok((c, eps_hat(b, &t)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<(f64, f64)> = None;
    for (c, e) in scores {
        if let Some(e) = e {
            if best.map_or(true, |(_, be)| e < be) {
                best = Some((c, e));
            }
        }
    }
    best.ok_or(Error::AllSlopesHitZeros)
}

/// `α = safety · 5 · ε̂ · sup|ζ| / l`, clamped below by [`ALPHA_FLOOR`].
pub fn select_alpha(l: f64, eps_hat: f64, sup_zeta: f64, safety: f64) -> Result<f64> {
    if !eps_hat.is_finite() || eps_hat < 0.0 {
        return Err(Error::NonFinite(format!("eps_hat = {eps_hat}")));
    }
    Ok((safety * 5.0 * eps_hat * sup_zeta / l).max(ALPHA_FLOOR))
}

/// `min over side samples of α l/5 + log|B(ζ)|`.
pub fn domination_margin(b: &BlaschkeEvaluator, t: &TriangleContour, alpha: f64) -> Result<f64> {
    let mut m = f64::INFINITY;
    for &w in t.slanted_samples() {
        let v = b.eval_b(b.frame(w), None)?.norm();
        m = m.min(alpha * t.l / 5.0 + v.ln());
    }
    Ok(m)
}

#[derive(Clone, Debug)]
pub struct ScheduleConfig {
    pub candidates: Vec<f64>,
    pub count: usize,
    pub ratio: f64,
    pub slack: f64,
    pub c_grid: usize,
    pub samples_per_side: usize,
    pub safety: f64,
}

impl ScheduleConfig {
    /// Candidates on `[l_min, l_max]` with spacing `step`.
    pub fn uniform(l_min: f64, l_max: f64, step: f64, count: usize) -> Self {
        let n = ((l_max - l_min) / step).floor() as usize;
        Self {
            candidates: (0..=n).map(|j| l_min + j as f64 * step).collect(),
            count,
            ratio: 2.0,
            slack: 1e-3,
            c_grid: 16,
            samples_per_side: MIN_SIDE_SAMPLES,
            safety: 1.2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ContourSchedule {
    pub contours: Vec<TriangleContour>,
    pub alphas: Vec<f64>,
    pub eps_hat: Vec<f64>,
    pub margins: Vec<f64>,
}

#[derive(Serialize)]
struct ScheduleRow {
    n: usize,
    l: f64,
    c: f64,
    alpha: f64,
    eps_hat: f64,
    margin: f64,
}

impl ContourSchedule {
    pub fn len(&self) -> usize {
        self.contours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contours.is_empty()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for (i, t) in self.contours.iter().enumerate() {
            wr.serialize(ScheduleRow {
                n: i + 1,
                l: t.l,
                c: t.c,
                alpha: self.alphas[i],
                eps_hat: self.eps_hat[i],
                margin: self.margins[i],
            })?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// `l_n` by [`select_l`], then `c_n`, `α_n` and the domination margin per step.
pub fn build_schedule(b: &BlaschkeEvaluator, cfg: &ScheduleConfig) -> Result<ContourSchedule> {
    let ls = select_l(b, &cfg.candidates, cfg.count, cfg.ratio, cfg.slack)?;
    let mut sched = ContourSchedule {
        contours: Vec::new(),
        alphas: Vec::new(),
        eps_hat: Vec::new(),
        margins: Vec::new(),
    };
    for l in ls {
        let (c, e) = select_c(b, l, cfg.c_grid, cfg.samples_per_side)?;
        let t = TriangleContour::new(l, c, cfg.samples_per_side)?;
        let sup = t.slanted_samples().map(|z| z.norm()).fold(0.0, f64::max);
        let alpha = select_alpha(l, e, sup, cfg.safety)?;
        let margin = domination_margin(b, &t, alpha)?;
        sched.contours.push(t);
        sched.alphas.push(alpha);
        sched.eps_hat.push(e);
        sched.margins.push(margin);
    }
    Ok(sched)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blaschke::Orientation;
    use crate::spectrum::{make_family, FamilySpec};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn upper(s: &Spectrum) -> BlaschkeEvaluator {
        BlaschkeEvaluator::new(s, Orientation::Upper)
    }

    fn lattice(count: usize) -> Spectrum {
        make_family(&FamilySpec::ShiftedIntegers { delta: 0.3 }, count).unwrap()
    }

    #[test]
    fn sides_have_endpoints_and_enough_samples() {
        let t = TriangleContour::new(10.0, 2.0, 100).unwrap();
        assert_eq!(t.right_side().len(), 512);
        assert_eq!(t.right_side()[0], c(10.0, 0.0));
        assert_eq!(*t.right_side().last().unwrap(), c(0.0, 20.0));
        assert_eq!(t.left_side()[0], c(-10.0, 0.0));
        assert!(TriangleContour::new(10.0, 0.5, 512).is_err());
    }

    #[test]
    fn containment_examples() {
        let t = TriangleContour::new(10.0, 1.0, 512).unwrap();
        let s = Spectrum::custom(vec![c(0.0, 1.0)]).unwrap();
        assert_eq!(lambda_inside(&s, &t).included, vec![0]);
        let s = Spectrum::custom(vec![c(20.0, 1.0)]).unwrap();
        assert!(lambda_inside(&s, &t).included.is_empty());
        // on the right side: x + y = 10
        let s = Spectrum::custom(vec![c(4.0, 6.0)]).unwrap();
        assert!(lambda_inside(&s, &t).included.is_empty());
    }

    #[test]
    fn lattice_selects_half_integers() {
        let s = lattice(200);
        let b = upper(&s);
        let cand: Vec<f64> = (0..=3000).map(|j| 2.0 + j as f64 * 0.01).collect();
        let ls = select_l(&b, &cand, 4, 2.0, 1e-3).unwrap();
        for l in &ls {
            assert!(((l - 0.5) - (l - 0.5).round()).abs() < 1e-6, "{l}");
        }
        // fine-grid oracle: nothing in the window scores lower
        let d = 0.3_f64;
        let closed = |t: f64| {
            2.0 * std::f64::consts::PI * (2.0 * std::f64::consts::PI * d).sinh()
                / ((2.0 * std::f64::consts::PI * d).cosh() - (2.0 * std::f64::consts::PI * t).cos())
        };
        for &l in &ls {
            assert!((b.arg_derivative_on_r(l) - closed(0.5)).abs() < 1e-3);
        }
        assert!(ls.windows(2).all(|w| w[1] >= 2.0 * w[0]));
    }

    #[test]
    fn single_point_takes_smallest() {
        let s = Spectrum::custom(vec![c(0.0, 1.0)]).unwrap();
        let b = upper(&s);
        let cand: Vec<f64> = (0..=1000).map(|j| 50.0 + j as f64 * 0.5).collect();
        assert_eq!(select_l(&b, &cand, 1, 2.0, 1e-3).unwrap(), vec![50.0]);
    }

    #[test]
    fn candidates_on_zeros_fail() {
        let s = lattice(20);
        let b = upper(&s);
        let cand: Vec<f64> = (1..=20).map(|j| j as f64).collect();
        assert!(matches!(
            select_l(&b, &cand, 2, 2.0, 1e-3),
            Err(Error::NoAdmissibleCandidate(_))
        ));
    }

    #[test]
    fn select_c_far_zero() {
        let s = Spectrum::custom(vec![c(0.0, 1.0)]).unwrap();
        let b = upper(&s);
        let (cc, e) = select_c(&b, 100.0, 16, 512).unwrap();
        assert!((1.0..=10.0).contains(&cc));
        // direct evaluation oracle: −log|B| ≈ 2 Im(1/ζ)-scale on the sides
        assert!(e < 1e-3, "{e}");
    }

    #[test]
    fn select_c_rejects_slope_through_zero() {
        // grid c_j = 1 + 0.6 j; put a zero on the right side for c = 1
        let l = 10.0;
        let s = Spectrum::custom(vec![c(5.0, 5.0)]).unwrap();
        let b = upper(&s);
        let t = TriangleContour::new(l, 1.0, 513).unwrap();
        assert_eq!(eps_hat(&b, &t).unwrap(), None);
        let (cc, e) = select_c(&b, l, 16, 513).unwrap();
        assert!(cc > 1.0 && e.is_finite());
    }

    #[test]
    fn alpha_rule() {
        assert_eq!(select_alpha(100.0, 0.0, 1000.0, 1.2).unwrap(), ALPHA_FLOOR);
        let a = select_alpha(100.0, 0.01, 100.0 * 101f64.sqrt(), 1.2).unwrap();
        assert!((a - 0.603).abs() < 1e-3);
        let a2 = select_alpha(100.0, 0.02, 100.0 * 101f64.sqrt(), 1.2).unwrap();
        assert!((a2 - 2.0 * a).abs() < 1e-15);
        assert!(select_alpha(1.0, f64::INFINITY, 1.0, 1.2).is_err());
    }

    #[test]
    fn lattice_schedule_is_certified_and_nested() {
        let s = lattice(100);
        let b = upper(&s);
        let cfg = ScheduleConfig::uniform(2.0, 95.0, 0.01, 5);
        let sched = build_schedule(&b, &cfg).unwrap();
        assert_eq!(sched.len(), 5);
        let mut prev: Vec<usize> = Vec::new();
        for (i, t) in sched.contours.iter().enumerate() {
            assert!(sched.margins[i] >= 0.0);
            assert!(sched.alphas[i] > 0.0);
            let inside = lambda_inside(&s, t).included;
            assert!(prev.iter().all(|k| inside.contains(k)));
            prev = inside;
        }
        assert!(sched.contours.windows(2).all(|w| w[1].l > w[0].l));
        // grid-search oracle on the closed-form lattice product
        let pi = std::f64::consts::PI;
        let id = c(0.0, 0.3);
        let closed = |z: Complex64| ((pi * (z - id)).sin() / (pi * (z + id)).sin()).norm();
        let oracle = (0..16)
            .map(|j| {
                let t = TriangleContour::new(10.5, 1.0 + 9.0 * j as f64 / 15.0, 512).unwrap();
                t.slanted_samples()
                    .map(|&z| -closed(z).ln() / z.norm())
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min);
        let (_, e) = select_c(&b, 10.5, 16, 512).unwrap();
        assert!((e - oracle).abs() < 1e-6 * oracle, "{e} vs {oracle}");
        let mut buf = Vec::new();
        sched.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("n,l,c,alpha,eps_hat,margin\n"));
    }

    #[test]
    fn select_c_deterministic() {
        let s = lattice(30);
        let b = upper(&s);
        assert_eq!(select_c(&b, 7.5, 20, 512).unwrap(), select_c(&b, 7.5, 20, 512).unwrap());
    }

    proptest! {
        #[test]
        fn inside_points_are_inside(x in -30.0..30.0f64, y in 0.01..60.0f64, l in 1.0..25.0f64, cc in 1.0..10.0f64) {
            let t = TriangleContour::new(l, cc, 512).unwrap();
            let z = c(x, y);
            let geometric = y < cc * (l - x.abs());
            if t.contains(z) { prop_assert!(geometric); }
        }
    }
}
