//! Blaschke products of one halfplane: `B`, partial products `B_n`, tail
//! ratios `β_n = B/B_n`, the boundary phase derivative and Hayman-type
//! exceptional disks.
//!
//! Everything is computed in the upper halfplane. A lower-halfplane
//! evaluator stores the conjugated points and conjugates inputs and
//! outputs.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::special::{lattice_pair_tail, ScaledProduct};
use crate::spectrum::{LatticeTail, Spectrum};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Upper,
    Lower,
}

#[derive(Clone, Debug)]
pub struct BlaschkeEvaluator {
    /// Zeros mapped to the upper halfplane, sorted by modulus.
    points: Vec<Complex64>,
    orientation: Orientation,
    lattice: Option<LatticeTail>,
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `(λ̄/λ)(z − λ)/(z − λ̄)`
fn factor(l: Complex64, z: Complex64) -> Complex64 {
    (l.conj() / l) * (z - l) / (z - l.conj())
}

impl BlaschkeEvaluator {
    /// Evaluator for `Λ ∩ ℂ⁺` or `Λ ∩ ℂ⁻`. The lattice tail is used only
    /// when the whole spectrum lies in the chosen halfplane.
    pub fn new(s: &Spectrum, orientation: Orientation) -> Self {
        let (up, low) = s.split_halfplanes();
        let part = match orientation {
            Orientation::Upper => up,
            Orientation::Lower => low.conj(),
        };
        let lattice = part.family().lattice_tail().filter(|l| l.delta > 0.0);
        Self {
            points: part.points().to_vec(),
            orientation,
            lattice,
        }
    }

    /// Stored zeros in the original coordinates.
    pub fn points(&self) -> Vec<Complex64> {
        self.points.iter().map(|&p| self.unmap(p)).collect()
    }

    /// Stored zeros in the upper-halfplane frame.
    pub fn frame_points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn has_lattice_tail(&self) -> bool {
        self.lattice.is_some()
    }

    /// Conjugation for lower evaluators, identity otherwise (an involution).
    pub fn frame(&self, z: Complex64) -> Complex64 {
        match self.orientation {
            Orientation::Upper => z,
            Orientation::Lower => z.conj(),
        }
    }

    fn unmap(&self, w: Complex64) -> Complex64 {
        self.frame(w)
    }

    fn lattice_factor(&self, z: Complex64) -> Complex64 {
        match self.lattice {
            Some(l) => {
                let c = Complex64::new(l.offset, l.delta);
                let mut num = vec![c.conj(); l.multiplicity];
                num.extend(std::iter::repeat(z - c).take(l.multiplicity));
                let mut den = vec![c; l.multiplicity];
                den.extend(std::iter::repeat(z - c.conj()).take(l.multiplicity));
                lattice_pair_tail(&num, &den, l.count as u64)
            }
            None => one(),
        }
    }

    fn check_pole(&self, w: Complex64) -> Result<()> {
        for &l in &self.points {
            if w == l.conj() {
                return Err(Error::Pole(self.unmap(w)));
            }
        }
        Ok(())
    }

    /// `B(z)` over all zeros (with the lattice remainder), or `B_n(z)` over
    /// `|λ| < cutoff`.
    pub fn eval_b(&self, z: Complex64, cutoff: Option<f64>) -> Result<Complex64> {
        let w = self.frame(z);
        self.check_pole(w)?;
        let mut p = ScaledProduct::new();
        let end = match cutoff {
            Some(n) => self.points.partition_point(|l| l.norm() < n),
            None => self.points.len(),
        };
        for &l in &self.points[..end] {
            p.mul(factor(l, w));
        }
        let mut v = p.value();
        if cutoff.is_none() {
            v *= self.lattice_factor(w);
        }
        Ok(self.frame(v))
    }

    /// `∏_{|μ| ≥ n} f_μ(z)` including the lattice remainder, so that
    /// `eval_b(z) = eval_b(z, n) · tail_product(z, n)`.
    pub fn tail_product(&self, z: Complex64, n: f64) -> Result<Complex64> {
        let w = self.frame(z);
        self.check_pole(w)?;
        let start = self.points.partition_point(|l| l.norm() < n);
        let mut p = ScaledProduct::new();
        for &l in &self.points[start..] {
            p.mul(factor(l, w));
        }
        Ok(self.frame(p.value() * self.lattice_factor(w)))
    }

    /// `β_n(λ_k)` for the `k`-th stored zero; `0` once `|λ_k| ≥ n`.
    pub fn eval_beta(&self, k: usize, n: f64) -> Result<Complex64> {
        let l = *self.points.get(k).ok_or(Error::InvalidIndex {
            index: k,
            len: self.points.len(),
        })?;
        if l.norm() >= n {
            return Ok(Complex64::new(0.0, 0.0));
        }
        self.tail_product(self.unmap(l), n)
    }

    /// Index of a zero given in original coordinates.
    pub fn index_of(&self, lambda: Complex64) -> Option<usize> {
        let w = self.frame(lambda);
        self.points.iter().position(|&p| p == w)
    }

    /// `B_n′(λ_k)` with `B_n` the product over `|μ| < n`; requires `|λ_k| < n`.
    pub fn eval_b_prime(&self, k: usize, n: f64) -> Result<Complex64> {
        let l = *self.points.get(k).ok_or(Error::InvalidIndex {
            index: k,
            len: self.points.len(),
        })?;
        let end = self.points.partition_point(|p| p.norm() < n);
        let mut p = ScaledProduct::new();
        p.mul((l.conj() / l) / (l - l.conj()));
        for (j, &mu) in self.points[..end].iter().enumerate() {
            if j != k {
                p.mul(factor(mu, l));
            }
        }
        Ok(self.frame(p.value()))
    }

    /// `(arg B)′(t) = 2 Σ Im λ / |t − λ|²`, with the lattice remainder
    /// approximated by its midpoint integral.
    pub fn arg_derivative_on_r(&self, t: f64) -> f64 {
        let mut s = 0.0;
        for &l in &self.points {
            s += l.im / (Complex64::new(t, 0.0) - l).norm_sqr();
        }
        let mut v = 2.0 * s;
        if let Some(lt) = self.lattice {
            let tt = t - lt.offset;
            let m = lt.count as f64 + 0.5;
            let d = lt.delta;
            v += 2.0
                * lt.multiplicity as f64
                * (PI - ((m - tt) / d).atan() - ((m + tt) / d).atan());
        }
        v
    }

    /// Disks `D(λ, ρ|λ|/(1+|λ|)²)` around every zero in the region, with `ρ`
    /// the largest value whose view sum fits the budget. Succeeds when
    /// `−log|B(z)| ≤ ε(|z|)|z|` holds outside the disks on a polar
    /// verification grid; otherwise reports the view sum the smallest
    /// feasible `ρ` would need.
    pub fn hayman_scan(&self, region_radius: f64, profile: &EpsilonProfile) -> Result<HaymanResult> {
        self.hayman_scan_with(region_radius, profile, DEFAULT_VIEW_BUDGET, 128, 128)
    }

    pub fn hayman_scan_with(
        &self,
        region_radius: f64,
        profile: &EpsilonProfile,
        budget: f64,
        n_radii: usize,
        n_angles: usize,
    ) -> Result<HaymanResult> {
        if !(region_radius > 0.0) {
            return Err(Error::BadParameter("region_radius".into()));
        }
        let zeros: Vec<Complex64> = self
            .points
            .iter()
            .copied()
            .filter(|l| l.norm() <= region_radius * 1.5 + 1.0)
            .collect();
        let weight: f64 = zeros.iter().map(|l| 1.0 / (1.0 + l.norm()).powi(2)).sum();
        // verification grid in the mapped upper halfplane, with -log|B|
        let samples: Vec<(Complex64, f64)> = (1..=n_radii)
            .flat_map(|i| {
                let r = region_radius * i as f64 / n_radii as f64;
                (0..n_angles).map(move |j| {
                    Complex64::from_polar(r, PI * j as f64 / (n_angles - 1) as f64)
                })
            })
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|w| {
                let b = self.eval_b(self.unmap(w), None).map(|b| b.norm()).unwrap_or(0.0);
                (w, -b.ln())
            })
            .collect();
        let radii = |rho: f64| -> Vec<f64> {
            zeros
                .iter()
                .map(|l| rho * l.norm() / (1.0 + l.norm()).powi(2))
                .collect()
        };
        let violations = |rho: f64| -> bool {
            let r = radii(rho);
            samples.iter().any(|&(w, nl)| {
                let excluded = zeros.iter().zip(&r).any(|(l, rl)| (w - l).norm() < *rl);
                !excluded && nl > profile.eval(w.norm()) * w.norm() * (1.0 + 1e-12) + 1e-12
            })
        };
        let rho_max = if weight > 0.0 { budget / weight } else { 0.0 };
        if violations(rho_max) {
            // find the minimal feasible rho by doubling then bisection
            let mut hi = rho_max.max(1e-12) * 2.0;
            let mut tries = 0;
            while violations(hi) {
                hi *= 2.0;
                tries += 1;
                if tries > 80 {
                    return Err(Error::BudgetInfeasible(f64::INFINITY));
                }
            }
            let mut lo = rho_max;
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                if violations(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Err(Error::BudgetInfeasible(hi * weight));
        }
        let r = radii(rho_max);
        let disks: Vec<(Complex64, f64)> = zeros
            .iter()
            .zip(&r)
            .map(|(&l, &rl)| (self.unmap(l), rl))
            .collect();
        let view_sum = disks.iter().map(|(c, r)| r / c.norm()).sum();
        // measured profile: ring maxima of -log|B|/|z| outside the disks
        let mut achieved = Vec::with_capacity(n_radii);
        for i in 0..n_radii {
            let ring = &samples[i * n_angles..(i + 1) * n_angles];
            let rad = ring[0].0.norm();
            let worst = ring
                .iter()
                .filter(|(w, _)| !zeros.iter().zip(&r).any(|(l, rl)| (w - l).norm() < *rl))
                .map(|&(_, nl)| nl / rad)
                .fold(0.0, f64::max);
            achieved.push((rad, worst));
        }
        Ok(HaymanResult {
            disks: DiskFamily { disks, view_sum },
            achieved,
        })
    }
}

pub const DEFAULT_VIEW_BUDGET: f64 = 1e-3;

/// Piecewise-linear `ε(r)` through `(r, ε)` samples, constant beyond the ends.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonProfile {
    samples: Vec<(f64, f64)>,
}

impl EpsilonProfile {
    pub fn new(mut samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.is_empty() || samples.iter().any(|&(r, e)| !(r >= 0.0) || !(e > 0.0)) {
            return Err(Error::BadParameter("epsilon profile".into()));
        }
        samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { samples })
    }

    pub fn constant(eps: f64) -> Result<Self> {
        Self::new(vec![(0.0, eps)])
    }

    pub fn eval(&self, r: f64) -> f64 {
        let s = &self.samples;
        if r <= s[0].0 {
            return s[0].1;
        }
        for w in s.windows(2) {
            let ((r0, e0), (r1, e1)) = (w[0], w[1]);
            if r <= r1 {
                return e0 + (e1 - e0) * (r - r0) / (r1 - r0);
            }
        }
        s[s.len() - 1].1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiskFamily {
    pub disks: Vec<(Complex64, f64)>,
    pub view_sum: f64,
}

#[derive(Serialize)]
struct DiskRow {
    center_re: f64,
    center_im: f64,
    radius: f64,
}

impl DiskFamily {
    pub fn contains(&self, z: Complex64) -> bool {
        self.disks.iter().any(|(c, r)| (z - c).norm() < *r)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for (c, r) in &self.disks {
            wr.serialize(DiskRow {
                center_re: c.re,
                center_im: c.im,
                radius: *r,
            })?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HaymanResult {
    pub disks: DiskFamily,
    /// `(|z|, max −log|B(z)|/|z|)` per verification ring, outside the disks.
    pub achieved: Vec<(f64, f64)>,
}
