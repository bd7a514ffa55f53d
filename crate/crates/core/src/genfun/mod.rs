//! The generating function `G(z) = G(0) ∏ (1 − z/λ)` of a spectrum, its
//! derivative at the zeros, and the outer factor recovered from `|G|` on ℝ.

mod outer;

pub use outer::{check_factorization, FactorizationReport, OuterEvaluator};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::{lattice_pair_tail, ScaledProduct};
use crate::spectrum::{LatticeTail, Spectrum};

/// How the product beyond the stored window is accounted for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailModel {
    /// Closed-form remainder of the declared lattice family.
    LatticeAnalytic,
    /// Product stops at the truncation radius.
    None,
}

#[derive(Clone, Debug)]
pub struct GeneratingFunctionEvaluator {
    spectrum: Spectrum,
    radius: f64,
    normalization: Complex64,
    tail_model: TailModel,
    used: usize,
    lattice: Option<LatticeTail>,
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

impl GeneratingFunctionEvaluator {
    /// All stored points, `G(0) = 1`, lattice tail when the family has one.
    pub fn new(spectrum: Spectrum) -> Self {
        Self::with_radius(spectrum, f64::INFINITY, one()).expect("default evaluator")
    }

    pub fn with_radius(spectrum: Spectrum, radius: f64, normalization: Complex64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::BadParameter("radius".into()));
        }
        if normalization == Complex64::new(0.0, 0.0) || !normalization.is_finite() {
            return Err(Error::BadParameter("normalization".into()));
        }
        let used = spectrum.truncation_at(radius).included.len();
        let lattice = if used == spectrum.len() {
            spectrum.family().lattice_tail()
        } else {
            None
        };
        Ok(Self {
            tail_model: if lattice.is_some() {
                TailModel::LatticeAnalytic
            } else {
                TailModel::None
            },
            spectrum,
            radius,
            normalization,
            used,
            lattice,
        })
    }

    /// Same product times a nonzero constant.
    pub fn scaled(&self, c: Complex64) -> Result<Self> {
        Self::with_radius(self.spectrum.clone(), self.radius, self.normalization * c)
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn normalization(&self) -> Complex64 {
        self.normalization
    }

    pub fn tail_model(&self) -> TailModel {
        self.tail_model
    }

    /// Set when stored points beyond the truncation radius are ignored.
    pub fn tail_warning(&self) -> bool {
        self.used < self.spectrum.len()
    }

    /// Exponential type of the modelled function along the imaginary axis:
    /// `π` per lattice copy, `0` for a finite product.
    pub fn exponential_type(&self) -> f64 {
        self.lattice
            .map_or(0.0, |l| std::f64::consts::PI * l.multiplicity as f64)
    }

    /// `Σ_{|λ| ≥ R} |z/λ| + |z/λ|²` over stored points left out by the radius.
    pub fn tail_error_estimate(&self, z: Complex64) -> f64 {
        self.spectrum.points()[self.used..]
            .iter()
            .map(|l| {
                let r = (z / l).norm();
                r + r * r
            })
            .sum()
    }

    fn used_points(&self) -> &[Complex64] {
        &self.spectrum.points()[..self.used]
    }

    fn lattice_factor(&self, z: Complex64) -> Complex64 {
        match self.lattice {
            Some(l) => {
                let c = Complex64::new(l.offset, l.delta);
                let num = vec![z - c; l.multiplicity];
                let den = vec![c; l.multiplicity];
                lattice_pair_tail(&num, &den, l.count as u64)
            }
            None => one(),
        }
    }

    pub fn eval_g(&self, z: Complex64) -> Result<Complex64> {
        let mut p = ScaledProduct::new();
        for &l in self.used_points() {
            if (z - l).norm() <= 1e-12 * l.norm() {
                return Err(Error::Collision { z, lambda: l });
            }
            p.mul(one() - z / l);
        }
        Ok(self.normalization * p.value() * self.lattice_factor(z))
    }

    pub fn eval_g_prime_at_lambda(&self, k: usize) -> Result<Complex64> {
        let lk = self.spectrum.get(k)?;
        let mut p = ScaledProduct::new();
        for (j, &mu) in self.used_points().iter().enumerate() {
            if j != k {
                p.mul(one() - lk / mu);
            }
        }
        Ok(self.normalization * (-1.0 / lk) * p.value() * self.lattice_factor(lk))
    }
}
