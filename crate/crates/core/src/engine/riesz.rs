//! Discrete Hilbert transform and Riesz projections on a uniform grid,
//! and the projector identity check for one-sided spectra.
//!
//! Convention: `Hf(x) = (1/π) PV∫ f(t)/(x − t) dt`, so that `H = −i` on
//! `H²(ℂ⁺)` boundary values and `P₊ = (I + iH)/2`, `P₋ = I − P₊`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::grid::GridFunction;
use super::pw::PWFunction;
use crate::blaschke::{BlaschkeEvaluator, Orientation};
use crate::error::{Error, Result};
use crate::genfun::{GeneratingFunctionEvaluator, OuterEvaluator};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// A transformed grid function with its estimated `L²` error.
#[derive(Clone, Debug)]
pub struct Projected {
    pub value: GridFunction,
    pub error_bar: f64,
}

/// `(2/π) Σ_{j−k odd} f_k/(j − k)` for every `j`, by FFT convolution.
fn odd_kernel_sum(f: &[Complex64]) -> Vec<Complex64> {
    let n = f.len();
    let len = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(len);
    let inv = planner.plan_fft_inverse(len);
    let mut kern = vec![Complex64::new(0.0, 0.0); len];
    for m in 1..n {
        if m % 2 == 1 {
            let v = 2.0 / (PI * m as f64);
            kern[m] = Complex64::new(v, 0.0);
            kern[len - m] = Complex64::new(-v, 0.0);
        }
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    buf[..n].copy_from_slice(f);
    fwd.process(&mut kern);
    fwd.process(&mut buf);
    for (b, k) in buf.iter_mut().zip(&kern) {
        *b *= k;
    }
    inv.process(&mut buf);
    let scale = 1.0 / len as f64;
    buf[..n].iter().map(|v| v * scale).collect()
}

/// Average of `t f(t)` over the last `width` of one grid end, and the
/// largest deviation from it.
fn end_moment(g: &GridFunction, right: bool, width: f64) -> (Complex64, f64) {
    let x = g.halfwidth();
    let idx: Vec<usize> = (0..g.len())
        .filter(|&j| {
            let t = g.x(j);
            if right {
                t >= x - width
            } else {
                t <= -x + width
            }
        })
        .collect();
    let vals: Vec<Complex64> = idx.iter().map(|&j| g.samples()[j] * g.x(j)).collect();
    let mean = vals.iter().sum::<Complex64>() / vals.len() as f64;
    let dev = vals.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max);
    (mean, dev)
}

/// `(1/π) ∫_{|t| > X+h} (a/t)/(x − t) dt` split by side, for unit `a`.
fn tail_basis(x: f64, xe: f64) -> (f64, f64) {
    if x.abs() < 1e-12 * xe {
        return (-1.0 / (PI * xe), -1.0 / (PI * xe));
    }
    let right = (1.0 - x / xe).ln() / x / PI;
    let left = -(1.0 + x / xe).ln() / x / PI;
    (right, left)
}

fn hilbert_raw(g: &GridFunction) -> Vec<Complex64> {
    odd_kernel_sum(g.samples())
}

/// Discrete Hilbert transform with the `a/t` tail model at both ends.
/// Returns the transform and an `L²` error estimate (Richardson
/// discretization estimate plus the tail-model residual).
pub fn hilbert(g: &GridFunction) -> Result<Projected> {
    let x = g.halfwidth();
    let h = g.spacing();
    let xe = x + h;
    let width = (x / 4.0).min(2.0).max(4.0 * h);
    let (ap, dp) = end_moment(g, true, width);
    let (am, dm) = end_moment(g, false, width);
    let raw = hilbert_raw(g);
    let mut out = Vec::with_capacity(g.len());
    let mut basis_r = Vec::with_capacity(g.len());
    let mut basis_l = Vec::with_capacity(g.len());
    for (j, v) in raw.iter().enumerate() {
        let (br, bl) = tail_basis(g.x(j), xe);
        basis_r.push(Complex64::new(br, 0.0));
        basis_l.push(Complex64::new(bl, 0.0));
        out.push(v + ap * br + am * bl);
    }
    let value = GridFunction::new(x, h, out)?;
    let nr = GridFunction::new(x, h, basis_r)?.l2_norm();
    let nl = GridFunction::new(x, h, basis_l)?.l2_norm();
    let tail_bar = dp * nr + dm * nl;
    // Richardson: the same rule on every other sample
    let n_int = g.len() - 1;
    let disc_bar = if n_int % 4 == 0 {
        let coarse_samples: Vec<Complex64> = g.samples().iter().step_by(2).copied().collect();
        let coarse = GridFunction::new(x, 2.0 * h, coarse_samples)?;
        let hc = hilbert_raw(&coarse);
        let mut s = 0.0;
        for (m, v) in hc.iter().enumerate() {
            let (br, bl) = tail_basis(coarse.x(m), x + 2.0 * h);
            let fine = value.samples()[2 * m];
            let cv = v + ap * br + am * bl;
            s += (fine - cv).norm_sqr();
        }
        (s * 2.0 * h).sqrt() / 3.0
    } else {
        0.0
    };
    Ok(Projected {
        value,
        error_bar: disc_bar + tail_bar,
    })
}

/// `P₊ g = (g + iHg)/2` or `P₋ g = g − P₊ g`. The weight argument is
/// accepted for interface symmetry and does not change the projection.
pub fn riesz_project(g: &GridFunction, sign: Sign, weight_log_modulus: Option<&GridFunction>) -> Result<Projected> {
    if let Some(w) = weight_log_modulus {
        if !w.same_grid(g) {
            return Err(Error::GridMismatch("weight and function grids differ".into()));
        }
    }
    let h = hilbert(g)?;
    let i = Complex64::new(0.0, 1.0);
    let plus = g.map(|_, v| v);
    let mut plus_samples = plus.into_samples();
    for (p, hv) in plus_samples.iter_mut().zip(h.value.samples()) {
        *p = (*p + i * hv) * 0.5;
    }
    let plus = GridFunction::new(g.halfwidth(), g.spacing(), plus_samples)?;
    let value = match sign {
        Sign::Plus => plus,
        Sign::Minus => g.sub(&plus)?,
    };
    Ok(Projected {
        value,
        error_bar: 0.5 * h.error_bar,
    })
}

#[derive(Clone, Debug)]
pub struct ProjectorCheck {
    /// `‖(Φ − B_n P₊ B̄_n Φ) − Σ Φ(λ) B_n/(B_n′(λ)(x − λ))‖₂`
    pub mismatch: f64,
    /// Riesz-projection bar plus the spread of the outer-constant fit.
    pub error_bar: f64,
    pub lhs_norm: f64,
    pub rhs_norm: f64,
}

/// Checks the model-space interpolation identity on the grid for
/// `Φ = F e^{iπx}/ω`, with `B_n` the Blaschke product over `|λ| < n`.
/// Requires a spectrum in the upper halfplane.
pub fn weighted_projector_check(
    f: &PWFunction,
    g: &GeneratingFunctionEvaluator,
    b_plus: &BlaschkeEvaluator,
    outer: &OuterEvaluator,
    n: f64,
    halfwidth: f64,
    spacing: f64,
) -> Result<ProjectorCheck> {
    if g.spectrum().points().iter().any(|p| p.im < 0.0) {
        return Err(Error::BadParameter(
            "projector check needs a spectrum in the upper halfplane".into(),
        ));
    }
    if b_plus.orientation() != Orientation::Upper {
        return Err(Error::BadParameter("upper Blaschke evaluator expected".into()));
    }
    let tau = g.exponential_type();
    let i = Complex64::new(0.0, 1.0);
    // ω = G e^{iτz}/B up to the constant of the quadrature outer function
    let raw_outer = |z: Complex64| -> Result<Complex64> {
        Ok(g.eval_g(z)? * (i * tau * z).exp() / b_plus.eval_b(z, None)?)
    };
    let pts = b_plus.frame_points();
    let refs: Vec<Complex64> = [-2.0, -1.0, 0.0, 1.0, 2.0]
        .iter()
        .map(|&xr| Complex64::new(xr, 1.0))
        .collect();
    let y_ref = [1.0, 1.25, 1.5, 2.0, 2.5, 3.0]
        .into_iter()
        .find(|&y| {
            refs.iter()
                .all(|r| pts.iter().all(|l| (Complex64::new(r.re, y) - l).norm() > 0.05))
        })
        .unwrap_or(1.1);
    let mut kappas = Vec::new();
    for r in &refs {
        let z = Complex64::new(r.re, y_ref);
        kappas.push(outer.eval_outer(z)? / raw_outer(z)?);
    }
    let kappa = kappas.iter().sum::<Complex64>() / kappas.len() as f64;
    let spread = kappas
        .iter()
        .map(|k| (k - kappa).norm() / kappa.norm())
        .fold(0.0, f64::max);

    let phi_grid = GridFunction::try_from_fn(halfwidth, spacing, |x| {
        let z = Complex64::new(x, 0.0);
        Ok(f.eval(z) * (i * PI * x).exp() / (kappa * raw_outer(z)?))
    })?;
    let bn = GridFunction::try_from_fn(halfwidth, spacing, |x| b_plus.eval_b(Complex64::new(x, 0.0), Some(n)))?;
    let inner = phi_grid.mul(&bn.conj())?;
    let proj = riesz_project(&inner, Sign::Plus, None)?;
    let lhs = phi_grid.sub(&bn.mul(&proj.value)?)?;

    let mut terms = Vec::new();
    for (k, &l) in pts.iter().enumerate() {
        if l.norm() >= n {
            break;
        }
        let phi_l = f.eval(l) * (i * PI * l).exp() / outer.eval_outer(l)?;
        terms.push((l, phi_l / b_plus.eval_b_prime(k, n)?));
    }
    let rhs = bn.map(|x, b| {
        let s: Complex64 = terms
            .iter()
            .map(|&(l, a)| a / (Complex64::new(x, 0.0) - l))
            .sum();
        b * s
    });
    let mismatch = lhs.sub(&rhs)?.l2_norm();
    Ok(ProjectorCheck {
        mismatch,
        error_bar: proj.error_bar + spread * rhs.l2_norm(),
        lhs_norm: lhs.l2_norm(),
        rhs_norm: rhs.l2_norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::l2_error;
    use crate::spectrum::{make_family, FamilySpec, Spectrum};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn cauchy(sign: f64) -> GridFunction {
        GridFunction::from_fn(100.0, 0.01, |x| 1.0 / c(x, sign)).unwrap()
    }

    #[test]
    fn upper_cauchy_kernel_is_fixed() {
        let g = cauchy(1.0);
        let p = riesz_project(&g, Sign::Plus, None).unwrap();
        assert!(l2_error(&p.value, &g).unwrap() < 1e-3);
        let m = riesz_project(&g, Sign::Minus, None).unwrap();
        assert!(m.value.l2_norm() < 1e-3);
    }

    #[test]
    fn lower_cauchy_kernel_is_annihilated() {
        let g = cauchy(-1.0);
        assert!(riesz_project(&g, Sign::Plus, None).unwrap().value.l2_norm() < 1e-3);
    }

    #[test]
    fn split_of_a_sum() {
        let a = cauchy(1.0);
        let b = cauchy(-1.0).scale(c(0.5, -2.0));
        let s = a.add(&b).unwrap();
        let p = riesz_project(&s, Sign::Plus, None).unwrap();
        let m = riesz_project(&s, Sign::Minus, None).unwrap();
        assert!(l2_error(&p.value, &a).unwrap() < 3e-3);
        assert!(l2_error(&m.value, &b).unwrap() < 3e-3);
        // exact complement
        let back = p.value.add(&m.value).unwrap();
        assert!(l2_error(&back, &s).unwrap() < 1e-13);
    }

    #[test]
    fn idempotent_on_grid() {
        let g = GridFunction::from_fn(60.0, 0.01, |x| {
            1.0 / c(x - 1.0, 0.5) + c(0.3, 0.0) / c(x + 2.0, -2.0)
        })
        .unwrap();
        let p = riesz_project(&g, Sign::Plus, None).unwrap();
        let pp = riesz_project(&p.value, Sign::Plus, None).unwrap();
        assert!(l2_error(&pp.value, &p.value).unwrap() < 2e-3);
    }

    #[test]
    fn hilbert_of_lorentzian() {
        // H[1/(1+t²)](x) = x/(1+x²)
        let g = GridFunction::from_fn(100.0, 0.01, |x| c(1.0 / (1.0 + x * x), 0.0)).unwrap();
        let hx = hilbert(&g).unwrap();
        let want = GridFunction::from_fn(100.0, 0.01, |x| c(x / (1.0 + x * x), 0.0)).unwrap();
        let e = l2_error(&hx.value, &want).unwrap();
        assert!(e < 1e-3, "{e}");
        assert!(hx.error_bar.is_finite());
    }

    #[test]
    fn projector_identity_single_point() {
        let s = Spectrum::custom(vec![c(0.0, 1.0)]).unwrap();
        let g = GeneratingFunctionEvaluator::new(s.clone());
        let b = BlaschkeEvaluator::new(&s, Orientation::Upper);
        let o = OuterEvaluator::from_generating_function(&g, 200.0, 0.01).unwrap();
        let f = PWFunction::kernel(c(0.0, 1.0));
        let r = weighted_projector_check(&f, &g, &b, &o, 2.0, 60.0, 0.01).unwrap();
        assert!(r.mismatch <= 5.0 * r.error_bar.max(1e-4), "{r:?}");
        assert!(r.rhs_norm > 1e-3);
    }

    #[test]
    fn projector_identity_empty_truncation() {
        let s = make_family(&FamilySpec::ShiftedIntegers { delta: 0.3 }, 30).unwrap();
        let g = GeneratingFunctionEvaluator::new(s.clone());
        let b = BlaschkeEvaluator::new(&s, Orientation::Upper);
        let o = OuterEvaluator::from_generating_function(&g, 200.0, 0.01).unwrap();
        let f = PWFunction::kernel(c(0.0, 0.3));
        let r = weighted_projector_check(&f, &g, &b, &o, 0.1, 40.0, 0.01).unwrap();
        assert_eq!(r.rhs_norm, 0.0);
        assert!(r.lhs_norm < 1e-2, "{r:?}");
    }
}
