//! Uniform real-line grids `x_j = -X + j h`, `j = 0..=2X/h`.

use std::io::{Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    halfwidth: f64,
    spacing: f64,
    samples: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct Row {
    x: f64,
    re: f64,
    im: f64,
}

/// Number of intervals `2X/h`, if it is (close to) an integer.
pub fn interval_count(halfwidth: f64, spacing: f64) -> Result<usize> {
    if !(halfwidth > 0.0 && spacing > 0.0) || !halfwidth.is_finite() {
        return Err(Error::InvalidGrid(format!("X={halfwidth}, h={spacing}")));
    }
    let q = 2.0 * halfwidth / spacing;
    let n = q.round();
    if (q - n).abs() > 1e-6 * q.max(1.0) || n < 2.0 {
        return Err(Error::InvalidGrid(format!(
            "2X/h = {q} is not an integer >= 2"
        )));
    }
    Ok(n as usize)
}

impl GridFunction {
    pub fn new(halfwidth: f64, spacing: f64, samples: Vec<Complex64>) -> Result<Self> {
        let n = interval_count(halfwidth, spacing)?;
        if samples.len() != n + 1 {
            return Err(Error::InvalidGrid(format!(
                "expected {} samples, got {}",
                n + 1,
                samples.len()
            )));
        }
        Ok(Self {
            halfwidth,
            spacing,
            samples,
        })
    }

    /// Zero function on the grid.
    pub fn template(halfwidth: f64, spacing: f64) -> Result<Self> {
        let n = interval_count(halfwidth, spacing)?;
        Ok(Self {
            halfwidth,
            spacing,
            samples: vec![Complex64::new(0.0, 0.0); n + 1],
        })
    }

    pub fn from_fn<F>(halfwidth: f64, spacing: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Sync,
    {
        let mut g = Self::template(halfwidth, spacing)?;
        let (x0, h) = (-halfwidth, spacing);
        g.samples
            .par_iter_mut()
            .enumerate()
            .for_each(|(j, s)| *s = f(x0 + j as f64 * h));
        Ok(g)
    }

    pub fn try_from_fn<F>(halfwidth: f64, spacing: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<Complex64> + Sync,
    {
        let template = Self::template(halfwidth, spacing)?;
        let samples = (0..template.len())
            .into_par_iter()
            .map(|j| f(template.x(j)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            samples,
            ..template
        })
    }

    /// Same grid, new samples computed from the abscissa and the old value.
    pub fn map<F>(&self, f: F) -> Self
    where
        F: Fn(f64, Complex64) -> Complex64 + Sync,
    {
        let samples = self
            .samples
            .par_iter()
            .enumerate()
            .map(|(j, &v)| f(self.x(j), v))
            .collect();
        Self {
            samples,
            ..*self
        }
    }

    pub fn halfwidth(&self) -> f64 {
        self.halfwidth
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.halfwidth + j as f64 * self.spacing
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.x(j)).collect()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [Complex64] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.samples.len() == other.samples.len()
            && self.halfwidth == other.halfwidth
            && self.spacing == other.spacing
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "(X={}, h={}, {} samples) vs (X={}, h={}, {} samples)",
                self.halfwidth,
                self.spacing,
                self.len(),
                other.halfwidth,
                other.spacing,
                other.len()
            )))
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            samples,
            ..*self
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            samples,
            ..*self
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b)
            .collect();
        Ok(Self {
            samples,
            ..*self
        })
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            samples: self.samples.iter().map(|v| v * c).collect(),
            ..*self
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            samples: self.samples.iter().map(|v| v.conj()).collect(),
            ..*self
        }
    }

    /// Trapezoid rule for `∫ f dx` over `[-X, X]`.
    pub fn integral(&self) -> Complex64 {
        let n = self.samples.len();
        let inner: Complex64 = self.samples[1..n - 1].iter().sum();
        (inner + (self.samples[0] + self.samples[n - 1]) * 0.5) * self.spacing
    }

    /// Trapezoid `(∫ |f|^2)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let n = self.samples.len();
        let inner: f64 = self.samples[1..n - 1].iter().map(|v| v.norm_sqr()).sum();
        let ends = 0.5 * (self.samples[0].norm_sqr() + self.samples[n - 1].norm_sqr());
        ((inner + ends) * self.spacing).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for (j, v) in self.samples.iter().enumerate() {
            wr.serialize(Row {
                x: self.x(j),
                re: v.re,
                im: v.im,
            })?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Reads a CSV written by [`GridFunction::write_csv`]; the grid is
    /// recovered from the first two abscissae and the row count.
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let rows = rd
            .deserialize::<Row>()
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if rows.len() < 3 {
            return Err(Error::InvalidGrid("fewer than 3 rows".into()));
        }
        let halfwidth = -rows[0].x;
        let spacing = 2.0 * halfwidth / (rows.len() - 1) as f64;
        let samples = rows.iter().map(|r| Complex64::new(r.re, r.im)).collect();
        Self::new(halfwidth, spacing, samples)
    }
}

/// Trapezoid `‖a − b‖₂` on a shared grid.
pub fn l2_error(a: &GridFunction, b: &GridFunction) -> Result<f64> {
    Ok(a.sub(b)?.l2_norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_non_integral_grids() {
        assert!(GridFunction::template(1.0, 0.3).is_err());
        assert!(GridFunction::template(1.0, 0.0).is_err());
        assert_eq!(GridFunction::template(1.0, 0.25).unwrap().len(), 9);
    }

    #[test]
    fn identical_inputs_have_zero_error() {
        let g = GridFunction::from_fn(2.0, 0.1, |x| c(x.sin(), x)).unwrap();
        assert_eq!(l2_error(&g, &g).unwrap(), 0.0);
    }

    #[test]
    fn constant_shift_on_interior_samples() {
        let a = GridFunction::template(1.0, 0.01).unwrap();
        let mut b = a.clone();
        let phi = c(0.3, -0.4);
        for s in &mut b.samples_mut()[10..35] {
            *s += phi;
        }
        let want = phi.norm() * (25.0_f64).sqrt() * (0.01_f64).sqrt();
        assert!((l2_error(&a, &b).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn conjugate_has_same_norm() {
        let g = GridFunction::from_fn(3.0, 0.05, |x| c(x.cos(), x * 0.2)).unwrap();
        assert!((g.l2_norm() - g.conj().l2_norm()).abs() < 1e-14);
    }

    #[test]
    fn mismatched_grids_error() {
        let a = GridFunction::template(1.0, 0.1).unwrap();
        let b = GridFunction::template(2.0, 0.1).unwrap();
        assert!(matches!(l2_error(&a, &b), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn trapezoid_integrates_lorentzian() {
        let g = GridFunction::from_fn(1000.0, 0.05, |x| c(1.0 / (1.0 + x * x), 0.0)).unwrap();
        let want = 2.0 * 1000f64.atan();
        assert!((g.integral().re - want).abs() < 1e-6);
    }

    #[test]
    fn csv_roundtrip() {
        let g = GridFunction::from_fn(1.0, 0.25, |x| c(x, -x * x)).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x,re,im\n"));
        let back = GridFunction::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, g);
    }
}
