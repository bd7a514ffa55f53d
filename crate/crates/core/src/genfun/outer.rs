//! Outer factor `ω` of `G` in the upper halfplane, built from samples of
//! `log|G|` on a uniform real grid, and the modulus check of
//! `G = ω B⁺ e^{−iτz}` (upper) / `G = ω^# B⁻ e^{iτz}` (lower).

use std::f64::consts::PI;

use num_complex::Complex64;

use super::GeneratingFunctionEvaluator;
use crate::blaschke::BlaschkeEvaluator;
use crate::engine::GridFunction;
use crate::error::{Error, Result};

/// Least-squares model `log|G(t)| ≈ m + s log(|t|/X)` beyond one grid end.
#[derive(Clone, Copy, Debug, PartialEq)]
struct TailFit {
    m: f64,
    s: f64,
}

fn fit_tail(pts: &[(f64, f64)], x_end: f64) -> TailFit {
    let n = pts.len() as f64;
    let (mut su, mut sy, mut suu, mut suy) = (0.0, 0.0, 0.0, 0.0);
    for &(t, y) in pts {
        let u = (t.abs() / x_end).ln();
        su += u;
        sy += y;
        suu += u * u;
        suy += u * y;
    }
    let det = n * suu - su * su;
    if det.abs() < 1e-300 {
        return TailFit { m: sy / n, s: 0.0 };
    }
    let s = (n * suy - su * sy) / det;
    TailFit {
        m: (sy - s * su) / n,
        s,
    }
}

#[derive(Clone, Debug)]
pub struct OuterEvaluator {
    boundary_log_modulus: GridFunction,
    right: TailFit,
    left: TailFit,
}

impl OuterEvaluator {
    /// Samples `log|G|` on `[−X, X]` with spacing `h`.
    pub fn from_generating_function(
        g: &GeneratingFunctionEvaluator,
        halfwidth: f64,
        spacing: f64,
    ) -> Result<Self> {
        let grid = GridFunction::try_from_fn(halfwidth, spacing, |x| {
            let v = g.eval_g(Complex64::new(x, 0.0))?;
            if v.norm() == 0.0 || !v.is_finite() {
                return Err(Error::NonFinite(format!("log|G({x})|")));
            }
            Ok(Complex64::new(v.norm().ln(), 0.0))
        })?;
        Self::from_log_modulus(grid)
    }

    /// Real parts of `grid` are taken as `log|G(x_j)|`.
    pub fn from_log_modulus(grid: GridFunction) -> Result<Self> {
        if grid.samples().iter().any(|v| !v.re.is_finite()) {
            return Err(Error::NonFinite("boundary log-modulus".into()));
        }
        let x = grid.halfwidth();
        let width = (x / 10.0).max(2.0 * grid.spacing()).min(x);
        let right: Vec<(f64, f64)> = (0..grid.len())
            .filter(|&j| grid.x(j) >= x - width)
            .map(|j| (grid.x(j), grid.samples()[j].re))
            .collect();
        let left: Vec<(f64, f64)> = (0..grid.len())
            .filter(|&j| grid.x(j) <= -x + width)
            .map(|j| (grid.x(j), grid.samples()[j].re))
            .collect();
        Ok(Self {
            right: fit_tail(&right, x),
            left: fit_tail(&left, x),
            boundary_log_modulus: grid,
        })
    }

    pub fn boundary_log_modulus(&self) -> &GridFunction {
        &self.boundary_log_modulus
    }

    pub fn grid_halfwidth(&self) -> f64 {
        self.boundary_log_modulus.halfwidth()
    }

    pub fn spacing(&self) -> f64 {
        self.boundary_log_modulus.spacing()
    }

    /// `∫_X^∞ [1/(t−z) − t/(1+t²)] (m + s log(t/X)) dt` for `|z| < X`.
    fn tail_integral(fit: TailFit, z: Complex64, x: f64) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        let zx = z / x;
        let mut zk = Complex64::new(1.0, 0.0);
        for k in 1..400 {
            zk *= zx;
            let kf = k as f64;
            let term = zk * (fit.m / kf + fit.s / (kf * kf));
            sum += term;
            if term.norm() < 1e-17 * (1.0 + sum.norm()) {
                break;
            }
        }
        let x2 = 1.0 / (x * x);
        let mut j_s = 0.0;
        let mut p = 1.0;
        for j in 1..60 {
            p *= x2;
            let jf = 2.0 * j as f64;
            let term = p / (jf * jf);
            j_s += if j % 2 == 1 { term } else { -term };
            if term < 1e-18 {
                break;
            }
        }
        sum + fit.m * 0.5 * x2.ln_1p() + fit.s * j_s
    }

    /// `log ω(z)` up to an additive imaginary constant.
    pub fn log_outer(&self, z: Complex64) -> Result<Complex64> {
        let g = &self.boundary_log_modulus;
        let h = g.spacing();
        let x = g.halfwidth();
        if z.im < h {
            return Err(Error::TooCloseToAxis { z, min_im: h });
        }
        if z.re.abs() > x / 2.0 || z.norm() > 0.9 * x {
            return Err(Error::GridTooShort {
                halfwidth: x,
                re: z.re,
            });
        }
        let n = g.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, v) in g.samples().iter().enumerate() {
            let t = g.x(j);
            let kernel = 1.0 / (Complex64::new(t, 0.0) - z) - t / (1.0 + t * t);
            let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            acc += kernel * (w * v.re);
        }
        acc *= h;
        acc += Self::tail_integral(self.right, z, x);
        acc -= Self::tail_integral(self.left, -z, x);
        Ok(acc / Complex64::new(0.0, PI))
    }

    pub fn eval_outer(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.log_outer(z)?.exp())
    }

    /// `|ω^#(z)| = |ω(z̄)|` for `Im z < 0`.
    pub fn eval_outer_modulus(&self, z: Complex64) -> Result<f64> {
        let w = if z.im < 0.0 { z.conj() } else { z };
        Ok(self.log_outer(w)?.re.exp())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationReport {
    /// Largest `| |G| − |ω B e^{∓iτz}| | / |G|` over all samples.
    pub max_relative_error: f64,
    pub max_upper: f64,
    pub max_lower: f64,
}

/// Compares `|G(z)|` against `|ω(z) B⁺(z) e^{−iτz}|` for `Im z > 0` and
/// against `|ω(z̄) B⁻(z) e^{iτz}|` for `Im z < 0`, where `τ` is the
/// exponential type of `g`.
pub fn check_factorization(
    g: &GeneratingFunctionEvaluator,
    o: &OuterEvaluator,
    b_plus: &BlaschkeEvaluator,
    b_minus: &BlaschkeEvaluator,
    sample_points: &[Complex64],
) -> Result<FactorizationReport> {
    let tau = g.exponential_type();
    let mut rep = FactorizationReport {
        max_relative_error: 0.0,
        max_upper: 0.0,
        max_lower: 0.0,
    };
    for &z in sample_points {
        let gz = g.eval_g(z)?.norm();
        let (rhs, slot) = if z.im > 0.0 {
            let b = b_plus.eval_b(z, None)?.norm();
            (o.eval_outer_modulus(z)? * b * (tau * z.im).exp(), &mut rep.max_upper)
        } else {
            let b = b_minus.eval_b(z, None)?.norm();
            (o.eval_outer_modulus(z)? * b * (-tau * z.im).exp(), &mut rep.max_lower)
        };
        let err = (gz - rhs).abs() / gz;
        *slot = slot.max(err);
        rep.max_relative_error = rep.max_relative_error.max(err);
    }
    Ok(rep)
}
