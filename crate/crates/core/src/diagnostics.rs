//! Numerical evidence for the (A2), Carleson and integrability conditions.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::genfun::GeneratingFunctionEvaluator;
use crate::special::inverse_square_tail;
use crate::spectrum::Spectrum;

pub const DEFAULT_SPACING: f64 = 0.01;
/// `I(2X)/I(X)` above this flags an integral as divergent.
pub const DIVERGENCE_RATIO: f64 = 1.25;

/// Trapezoid prefix sums: `p[j] = ∫_{x_0}^{x_j}`.
fn prefix(v: &[f64], h: f64) -> Vec<f64> {
    let mut p = vec![0.0; v.len()];
    for j in 1..v.len() {
        p[j] = p[j - 1] + 0.5 * h * (v[j - 1] + v[j]);
    }
    p
}

/// Lower bound for the (A2) constant of `w(x) = |G(x + ia)|²` over dyadic
/// aligned intervals in `[−X, X]` of `2^j` grid cells, `j ≥ 2`; clamped
/// below by 1.
pub fn a2_from_modulus_sq(w: &[f64], spacing: f64) -> f64 {
    let n = w.len() - 1;
    let inv: Vec<f64> = w.iter().map(|v| 1.0 / v).collect();
    let pu = prefix(w, spacing);
    let pv = prefix(&inv, spacing);
    let mut best = 1.0_f64;
    let mut len = 4usize;
    while len <= n {
        let width = len as f64 * spacing;
        let mut s = 0;
        while s + len <= n {
            let au = (pu[s + len] - pu[s]) / width;
            let av = (pv[s + len] - pv[s]) / width;
            best = best.max(au * av);
            s += len;
        }
        len *= 2;
    }
    best
}

fn check_line(g: &GeneratingFunctionEvaluator, a: f64) -> Result<()> {
    if g
        .spectrum()
        .points()
        .iter()
        .any(|l| (l.im - a).abs() <= 1e-12 * (1.0 + a.abs()))
    {
        return Err(Error::VanishesOnLine(a));
    }
    Ok(())
}

fn modulus_sq_on_line(g: &GeneratingFunctionEvaluator, x: f64, a: f64, h: f64) -> Result<Vec<f64>> {
    let n = crate::engine::interval_count(x, h)?;
    (0..=n)
        .into_par_iter()
        .map(|j| {
            let t = -x + j as f64 * h;
            let v = g.eval_g(Complex64::new(t, a))?.norm_sqr();
            if v == 0.0 || !v.is_finite() {
                return Err(Error::VanishesOnLine(a));
            }
            Ok(v)
        })
        .collect()
}

/// (A2) lower bound for `|G(x + ia)|²` on `[−X, X]` with the default spacing.
pub fn a2_estimate(g: &GeneratingFunctionEvaluator, x: f64, a: f64) -> Result<f64> {
    a2_estimate_with(g, x, a, DEFAULT_SPACING)
}

pub fn a2_estimate_with(g: &GeneratingFunctionEvaluator, x: f64, a: f64, spacing: f64) -> Result<f64> {
    check_line(g, a)?;
    let w = modulus_sq_on_line(g, x, a, spacing)?;
    Ok(a2_from_modulus_sq(&w, spacing))
}

/// `sup_λ Σ_{μ≠λ} (1+|Im λ|)(1+|Im μ|)/|λ − μ|²` over the stored window,
/// plus the analytic remainder of the declared lattice beyond it.
pub fn carleson_sup(s: &Spectrum) -> f64 {
    if s.len() < 2 {
        return 0.0;
    }
    // translation-invariant summation order
    let mut pts = s.points().to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let tail = s.family().lattice_tail();
    (0..pts.len())
        .into_par_iter()
        .map(|i| {
            let l = pts[i];
            let wl = 1.0 + l.im.abs();
            let mut sum = 0.0;
            for (j, mu) in pts.iter().enumerate() {
                if j != i {
                    sum += wl * (1.0 + mu.im.abs()) / (l - mu).norm_sqr();
                }
            }
            if let Some(t) = tail {
                let nn = t.count as f64;
                let k = l.re - t.offset;
                let wm = 1.0 + t.delta.abs();
                sum += t.multiplicity as f64
                    * wl
                    * wm
                    * (inverse_square_tail(nn + 1.0 - k) + inverse_square_tail(nn + 1.0 + k));
            }
            sum
        })
        .reduce(|| 0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntGReport {
    pub window_x: f64,
    /// `∫ |G|²/(1+x²)` on `[−X, X]`
    pub pos_integral: f64,
    /// `∫ 1/(|G|²(1+x²))` on `[−X, X]`
    pub neg_integral: f64,
    pub pos_trend: f64,
    pub neg_trend: f64,
}

impl IntGReport {
    pub fn pos_divergent(&self) -> bool {
        self.pos_trend > DIVERGENCE_RATIO
    }

    pub fn neg_divergent(&self) -> bool {
        self.neg_trend > DIVERGENCE_RATIO
    }
}

/// Both integrals on `[−X, X]` and `[−2X, 2X]` for a given `|G(x)|²`.
pub fn int_g_from_modulus_sq<F>(modulus_sq: F, x: f64, spacing: f64) -> Result<IntGReport>
where
    F: Fn(f64) -> f64 + Sync,
{
    let integrals = |xx: f64| -> Result<(f64, f64)> {
        let n = crate::engine::interval_count(xx, spacing)?;
        let (p, m) = (0..=n)
            .into_par_iter()
            .map(|j| {
                let t = -xx + j as f64 * spacing;
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                let v = modulus_sq(t);
                let d = 1.0 + t * t;
                (w * v / d, w / (v * d))
            })
            .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
        Ok((p * spacing, m * spacing))
    };
    let (p1, m1) = integrals(x)?;
    let (p2, m2) = integrals(2.0 * x)?;
    Ok(IntGReport {
        window_x: x,
        pos_integral: p1,
        neg_integral: m1,
        pos_trend: p2 / p1,
        neg_trend: m2 / m1,
    })
}

pub fn int_g_check(g: &GeneratingFunctionEvaluator, x: f64) -> Result<IntGReport> {
    check_line(g, 0.0)?;
    int_g_from_modulus_sq(
        |t| {
            g.eval_g(Complex64::new(t, 0.0))
                .map(|v| v.norm_sqr())
                .unwrap_or(0.0)
        },
        x,
        DEFAULT_SPACING,
    )
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ReportRow {
    pub condition: String,
    #[serde(rename = "window_X")]
    pub window_x: f64,
    pub value: f64,
    pub trend_ratio: f64,
}

/// Rows for the (A2) estimate at `X` and `2X`, the Carleson sup and both
/// integrability integrals.
pub fn diagnose(g: &GeneratingFunctionEvaluator, x: f64, a: f64, spacing: f64) -> Result<Vec<ReportRow>> {
    let a1 = a2_estimate_with(g, x, a, spacing)?;
    let a2 = a2_estimate_with(g, 2.0 * x, a, spacing)?;
    let c = carleson_sup(g.spectrum());
    let ig = int_g_from_modulus_sq(
        |t| {
            g.eval_g(Complex64::new(t, 0.0))
                .map(|v| v.norm_sqr())
                .unwrap_or(0.0)
        },
        x,
        spacing,
    )?;
    Ok(vec![
        ReportRow {
            condition: "a2".into(),
            window_x: x,
            value: a1,
            trend_ratio: a2 / a1,
        },
        ReportRow {
            condition: "a2".into(),
            window_x: 2.0 * x,
            value: a2,
            trend_ratio: a2 / a1,
        },
        ReportRow {
            condition: "carleson".into(),
            window_x: g.spectrum().max_modulus(),
            value: c,
            trend_ratio: 1.0,
        },
        ReportRow {
            condition: "intG_pos".into(),
            window_x: x,
            value: ig.pos_integral,
            trend_ratio: ig.pos_trend,
        },
        ReportRow {
            condition: "intG_neg".into(),
            window_x: x,
            value: ig.neg_integral,
            trend_ratio: ig.neg_trend,
        },
    ])
}

pub fn write_report_csv<W: Write>(rows: &[ReportRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r)?;
    }
    wr.flush()?;
    Ok(())
}
