//! Paley–Wiener test functions `F(z) = Σ c_j k_{μ_j}(z)`,
//! `k_μ(z) = sin(π(z − μ̄))/(π(z − μ̄))`.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::sinc;

#[derive(Clone, Debug, PartialEq)]
pub struct PWFunction {
    atoms: Vec<(Complex64, Complex64)>,
}

#[derive(Serialize, Deserialize)]
struct AtomRow {
    mu_re: f64,
    mu_im: f64,
    c_re: f64,
    c_im: f64,
}

impl PWFunction {
    /// Atoms `(μ_j, c_j)` with distinct centers.
    pub fn new(atoms: Vec<(Complex64, Complex64)>) -> Result<Self> {
        for (i, a) in atoms.iter().enumerate() {
            if !a.0.is_finite() || !a.1.is_finite() {
                return Err(Error::NonFinite(format!("atom {i}")));
            }
            if atoms[..i].iter().any(|b| b.0 == a.0) {
                return Err(Error::BadParameter(format!("duplicate atom center {}", a.0)));
            }
        }
        Ok(Self { atoms })
    }

    pub fn kernel(mu: Complex64) -> Self {
        Self {
            atoms: vec![(mu, Complex64::new(1.0, 0.0))],
        }
    }

    pub fn atoms(&self) -> &[(Complex64, Complex64)] {
        &self.atoms
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.atoms
            .iter()
            .map(|&(mu, c)| c * sinc(z - mu.conj()))
            .sum()
    }

    /// `F^#(z) = conj F(z̄)`: centers and coefficients conjugated.
    pub fn conj(&self) -> Self {
        Self {
            atoms: self.atoms.iter().map(|(m, c)| (m.conj(), c.conj())).collect(),
        }
    }

    /// Bound on `(∫_{|x|>X} |F|²)^{1/2}` from `|k_μ(x)| ≤ cosh(π Im μ)/(π(|x| − |Re μ|))`.
    pub fn tail_bound(&self, halfwidth: f64) -> f64 {
        let r = self.atoms.iter().map(|(m, _)| m.re.abs()).fold(0.0, f64::max);
        if halfwidth <= r {
            return f64::INFINITY;
        }
        let amp: f64 = self
            .atoms
            .iter()
            .map(|(m, c)| c.norm() * (std::f64::consts::PI * m.im).cosh())
            .sum();
        amp / std::f64::consts::PI * (2.0 / (halfwidth - r)).sqrt()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for (m, c) in &self.atoms {
            wr.serialize(AtomRow {
                mu_re: m.re,
                mu_im: m.im,
                c_re: c.re,
                c_im: c.im,
            })?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let atoms = rd
            .deserialize::<AtomRow>()
            .map(|row| row.map(|a| (Complex64::new(a.mu_re, a.mu_im), Complex64::new(a.c_re, a.c_im))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::new(atoms)
    }
}
