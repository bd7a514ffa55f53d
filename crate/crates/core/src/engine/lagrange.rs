//! Lagrange partial sums `S_n(z) = Σ w(λ,n) F(λ) G(z)/(G′(λ)(z − λ))`,
//! sup errors on compact sets and operator-norm probes.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::grid::GridFunction;
use super::pw::PWFunction;
use crate::error::{Error, Result};
use crate::genfun::GeneratingFunctionEvaluator;
use crate::special::sinc;
use crate::weights::WeightScheme;

/// `G` cached on a grid and `G′` cached at every spectrum point.
#[derive(Clone, Debug)]
pub struct LagrangeSystem<'a> {
    g: &'a GeneratingFunctionEvaluator,
    template: GridFunction,
    g_grid: Vec<Complex64>,
    g_prime: Vec<Complex64>,
}

/// Coefficients `(k, w(λ_k,n) F(λ_k)/G′(λ_k))` of one partial sum.
pub type Coefficients = Vec<(usize, Complex64)>;

impl<'a> LagrangeSystem<'a> {
    pub fn new(g: &'a GeneratingFunctionEvaluator, halfwidth: f64, spacing: f64) -> Result<Self> {
        let template = GridFunction::template(halfwidth, spacing)?;
        let g_grid = (0..template.len())
            .into_par_iter()
            .map(|j| g.eval_g(Complex64::new(template.x(j), 0.0)))
            .collect::<Result<Vec<_>>>()?;
        let g_prime = (0..g.spectrum().len())
            .into_par_iter()
            .map(|k| g.eval_g_prime_at_lambda(k))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            g,
            template,
            g_grid,
            g_prime,
        })
    }

    pub fn generating_function(&self) -> &GeneratingFunctionEvaluator {
        self.g
    }

    pub fn template(&self) -> &GridFunction {
        &self.template
    }

    pub fn g_on_grid(&self) -> &[Complex64] {
        &self.g_grid
    }

    pub fn g_prime(&self, k: usize) -> Complex64 {
        self.g_prime[k]
    }

    fn check_scheme(&self, ws: &WeightScheme) -> Result<()> {
        if ws.spectrum().points() != self.g.spectrum().points() {
            return Err(Error::BadParameter(
                "weight scheme and generating function use different spectra".into(),
            ));
        }
        Ok(())
    }

    /// Coefficients from prescribed values `F(λ_k)`.
    pub fn coefficients_from_values(&self, values: &[Complex64], ws: &WeightScheme, n: usize) -> Result<Coefficients> {
        self.check_scheme(ws)?;
        if values.len() != self.g_prime.len() {
            return Err(Error::BadParameter("one value per spectrum point expected".into()));
        }
        Ok(ws
            .weight_row(n)?
            .into_iter()
            .map(|(k, w)| (k, w * values[k] / self.g_prime[k]))
            .collect())
    }

    pub fn coefficients(&self, f: &PWFunction, ws: &WeightScheme, n: usize) -> Result<Coefficients> {
        self.check_scheme(ws)?;
        Ok(ws
            .weight_row(n)?
            .into_iter()
            .map(|(k, w)| (k, w * f.eval(self.g.spectrum().points()[k]) / self.g_prime[k]))
            .collect())
    }

    pub fn sum_on_grid(&self, coeffs: &[(usize, Complex64)]) -> GridFunction {
        let pts = self.g.spectrum().points();
        let terms: Vec<(Complex64, Complex64)> = coeffs.iter().map(|&(k, a)| (pts[k], a)).collect();
        self.template.map(|x, _| {
            let j = ((x + self.template.halfwidth()) / self.template.spacing()).round() as usize;
            let s: Complex64 = terms
                .iter()
                .map(|&(l, a)| a / (Complex64::new(x, 0.0) - l))
                .sum();
            self.g_grid[j] * s
        })
    }

    /// The sum at an arbitrary complex point (interpolated value at nodes).
    pub fn sum_at(&self, coeffs: &[(usize, Complex64)], z: Complex64) -> Result<Complex64> {
        let pts = self.g.spectrum().points();
        for (k, &l) in pts.iter().enumerate() {
            if (z - l).norm() <= 1e-10 * (1.0 + l.norm()) {
                return Ok(coeffs
                    .iter()
                    .find(|c| c.0 == k)
                    .map_or(Complex64::new(0.0, 0.0), |&(_, a)| a * self.g_prime[k]));
            }
        }
        let gz = self.g.eval_g(z)?;
        let s: Complex64 = coeffs.iter().map(|&(k, a)| a / (z - pts[k])).sum();
        Ok(gz * s)
    }

    pub fn partial_sum(&self, f: &PWFunction, ws: &WeightScheme, n: usize) -> Result<GridFunction> {
        Ok(self.sum_on_grid(&self.coefficients(f, ws, n)?))
    }

    /// Samples of `G_{λ_k}(x) = G(x)/(G′(λ_k)(x − λ_k))`.
    pub fn lagrange_element(&self, k: usize) -> Result<GridFunction> {
        if k >= self.g_prime.len() {
            return Err(Error::InvalidIndex {
                index: k,
                len: self.g_prime.len(),
            });
        }
        Ok(self.sum_on_grid(&[(k, 1.0 / self.g_prime[k])]))
    }

    /// `max |S_n − F|` over a polar sample set of the disk `K`.
    pub fn compactwise_error(
        &self,
        f: &PWFunction,
        ws: &WeightScheme,
        n: usize,
        center: Complex64,
        radius: f64,
        samples: usize,
    ) -> Result<f64> {
        let coeffs = self.coefficients(f, ws, n)?;
        let pts = disk_samples(center, radius, samples);
        let errs = pts
            .par_iter()
            .map(|&z| Ok((self.sum_at(&coeffs, z)? - f.eval(z)).norm()))
            .collect::<Result<Vec<f64>>>()?;
        Ok(errs.into_iter().fold(0.0, f64::max))
    }

    /// Lower bound on the norm of `c ↦ S_n(Σ_j c_j k_j)` over integer atoms
    /// `|j| ≤ atoms_halfwidth` (an orthonormal family, so `‖F‖ = ‖c‖`),
    /// measured in the grid `L²` norm. Power iteration from `trials` seeded
    /// random starts; the largest Rayleigh ratio is returned.
    pub fn operator_norm_probe(
        &self,
        ws: &WeightScheme,
        n: usize,
        trials: usize,
        seed: u64,
        atoms_halfwidth: usize,
        iterations: usize,
    ) -> Result<f64> {
        self.check_scheme(ws)?;
        if trials == 0 {
            return Err(Error::BadParameter("trials must be >= 1".into()));
        }
        let row = ws.weight_row(n)?;
        if row.is_empty() {
            return Ok(0.0);
        }
        let pts = self.g.spectrum().points();
        let lam: Vec<Complex64> = row.iter().map(|&(k, _)| pts[k]).collect();
        let d: Vec<Complex64> = row.iter().map(|&(k, w)| w / self.g_prime[k]).collect();
        let j0 = atoms_halfwidth as i64;
        let atoms: Vec<f64> = (-j0..=j0).map(|j| j as f64).collect();
        // S[k][j] = k_j(λ_k) = sinc(λ_k − j)
        let s: Vec<Vec<Complex64>> = lam
            .iter()
            .map(|&l| atoms.iter().map(|&a| sinc(l - a)).collect())
            .collect();
        let h = self.template.spacing();
        let nx = self.template.len();
        let m: Vec<Vec<Complex64>> = (0..nx)
            .into_par_iter()
            .map(|i| {
                let x = self.template.x(i);
                let tw = if i == 0 || i == nx - 1 { 0.5 } else { 1.0 };
                let scale = self.g_grid[i] * (tw * h).sqrt();
                lam.iter()
                    .map(|&l| scale / (Complex64::new(x, 0.0) - l))
                    .collect()
            })
            .collect();
        let apply = |c: &[Complex64]| -> Vec<Complex64> {
            let u: Vec<Complex64> = s
                .iter()
                .zip(&d)
                .map(|(srow, dk)| dk * srow.iter().zip(c).map(|(a, b)| a * b).sum::<Complex64>())
                .collect();
            m.par_iter()
                .map(|mrow| mrow.iter().zip(&u).map(|(a, b)| a * b).sum())
                .collect()
        };
        let apply_adj = |y: &[Complex64]| -> Vec<Complex64> {
            let kk = lam.len();
            let v: Vec<Complex64> = (0..kk)
                .into_par_iter()
                .map(|k| m.iter().zip(y).map(|(mrow, yi)| mrow[k].conj() * yi).sum())
                .collect();
            let u: Vec<Complex64> = v.iter().zip(&d).map(|(a, dk)| a * dk.conj()).collect();
            (0..atoms.len())
                .map(|j| s.iter().zip(&u).map(|(srow, uk)| srow[j].conj() * uk).sum())
                .collect()
        };
        let norm = |v: &[Complex64]| v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let starts: Vec<Vec<Complex64>> = (0..trials)
            .map(|_| {
                (0..atoms.len())
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect()
            })
            .collect();
        let mut best = 0.0_f64;
        for mut c in starts {
            let mut ratio = 0.0_f64;
            for _ in 0..iterations.max(1) {
                let nc = norm(&c);
                if nc == 0.0 {
                    break;
                }
                c.iter_mut().for_each(|a| *a /= nc);
                let y = apply(&c);
                ratio = ratio.max(norm(&y));
                c = apply_adj(&y);
            }
            best = best.max(ratio);
        }
        Ok(best)
    }
}

/// Center plus `rings` concentric circles filling the disk, about
/// `samples` points in total.
pub fn disk_samples(center: Complex64, radius: f64, samples: usize) -> Vec<Complex64> {
    let rings = ((samples as f64).sqrt() / 2.0).ceil().max(1.0) as usize;
    let per = (samples.saturating_sub(1) / rings).max(8);
    let mut pts = vec![center];
    for r in 1..=rings {
        let rad = radius * r as f64 / rings as f64;
        for j in 0..per {
            pts.push(center + Complex64::from_polar(rad, std::f64::consts::TAU * j as f64 / per as f64));
        }
    }
    pts
}

/// One-shot partial sum on a fresh grid.
pub fn partial_sum(
    f: &PWFunction,
    g: &GeneratingFunctionEvaluator,
    ws: &WeightScheme,
    n: usize,
    grid: &GridFunction,
) -> Result<GridFunction> {
    LagrangeSystem::new(g, grid.halfwidth(), grid.spacing())?.partial_sum(f, ws, n)
}
