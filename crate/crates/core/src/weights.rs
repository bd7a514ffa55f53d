//! Summation matrices `w(λ, n)` for the naive, projection and universal
//! schemes.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::Serialize;

use crate::blaschke::{BlaschkeEvaluator, Orientation};
use crate::contours::{lambda_inside_frame, ContourSchedule};
use crate::error::{Error, Result};
use crate::quadrature::integrate_pieces;
use crate::spectrum::Spectrum;

/// `Φ(ζ) = ∫_{|u|>1/2} [1/(ζ − u) + 1/u] du` in closed form,
/// `log(1/2 − ζ) − log(−1/2 − ζ) − iπ`, with real arguments taken as
/// limits from the upper halfplane.
pub fn phi(zeta: Complex64) -> Result<Complex64> {
    if zeta.im < 0.0 {
        return Err(Error::BadParameter(format!(
            "outer weight needs Im z >= 0, got {zeta}"
        )));
    }
    if zeta.im == 0.0 && (zeta.re.abs() - 0.5) == 0.0 {
        return Err(Error::BranchPoint(zeta));
    }
    // 1/2 − ζ and −1/2 − ζ sit in the closed lower halfplane
    let log_lower = |w: Complex64| {
        if w.im == 0.0 && w.re < 0.0 {
            Complex64::new((-w.re).ln(), -PI)
        } else {
            w.ln()
        }
    };
    let a = Complex64::new(0.5 - zeta.re, -zeta.im);
    let b = Complex64::new(-0.5 - zeta.re, -zeta.im);
    Ok(log_lower(a) - log_lower(b) - Complex64::new(0.0, PI))
}

/// The same integral by adaptive quadrature, truncated at `|u| = 10⁶` with
/// the leading `−2ζ/U` tail. Used to validate [`phi`].
pub fn phi_quadrature(zeta: Complex64) -> Complex64 {
    let big = 1e6;
    let f = |u: f64| 1.0 / (zeta - u) + 1.0 / u;
    let mut breaks = vec![0.5];
    let y = zeta.im.max(1e-12);
    for k in [-8.0, -2.0, -0.5, 0.0, 0.5, 2.0, 8.0] {
        let p = zeta.re.abs() + k * y;
        if p > 0.5 && p < big {
            breaks.push(p);
        }
    }
    let mut g = 1.0;
    while g < big {
        if g > 0.5 {
            breaks.push(g);
        }
        g *= 2.0;
    }
    breaks.push(big);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let right = integrate_pieces(&f, &breaks, 1e-13);
    let neg: Vec<f64> = breaks.iter().rev().map(|b| -b).collect();
    let left = integrate_pieces(&f, &neg, 1e-13);
    right + left - zeta * (2.0 / big)
}

/// `w(z) = exp(−iαl Φ(z/l))`: modulus 1 on `(−l/2, l/2)` and `e^{−παl}`
/// on the rest of ℝ.
pub fn outer_weight(l: f64, alpha: f64, z: Complex64) -> Result<Complex64> {
    let p = phi(z / l)?;
    Ok((Complex64::new(0.0, -alpha * l) * p).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeKind {
    Naive,
    Projection,
    Universal,
}

impl SchemeKind {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::Naive => "naive",
            SchemeKind::Projection => "projection",
            SchemeKind::Universal => "universal",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "naive" => Ok(SchemeKind::Naive),
            "projection" => Ok(SchemeKind::Projection),
            "universal" => Ok(SchemeKind::Universal),
            other => Err(Error::Config(format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
enum Data {
    Radii(Vec<f64>),
    Contours {
        upper: Option<ContourSchedule>,
        lower: Option<ContourSchedule>,
        steps: usize,
    },
}

#[derive(Clone, Debug)]
pub struct WeightScheme {
    kind: SchemeKind,
    spectrum: Spectrum,
    data: Data,
    b_plus: BlaschkeEvaluator,
    b_minus: BlaschkeEvaluator,
    /// per spectrum index: evaluator side and index within it
    slot: Vec<(Orientation, usize)>,
}

#[derive(Serialize)]
struct WeightRow {
    n: f64,
    k: usize,
    lambda_re: f64,
    lambda_im: f64,
    w_re: f64,
    w_im: f64,
}

impl WeightScheme {
    fn base(kind: SchemeKind, spectrum: &Spectrum, data: Data) -> Self {
        let b_plus = BlaschkeEvaluator::new(spectrum, Orientation::Upper);
        let b_minus = BlaschkeEvaluator::new(spectrum, Orientation::Lower);
        let slot = spectrum
            .points()
            .iter()
            .map(|&p| {
                if p.im > 0.0 {
                    (Orientation::Upper, b_plus.index_of(p).expect("upper point"))
                } else {
                    (Orientation::Lower, b_minus.index_of(p).expect("lower point"))
                }
            })
            .collect();
        Self {
            kind,
            spectrum: spectrum.clone(),
            data,
            b_plus,
            b_minus,
            slot,
        }
    }

    fn check_radii(radii: &[f64]) -> Result<()> {
        if radii.is_empty() || radii.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::Config("radius schedule must be nonempty and positive".into()));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("radius schedule must be increasing".into()));
        }
        Ok(())
    }

    /// `w = 1` for `|λ| < n`, else `0`.
    pub fn naive(spectrum: &Spectrum, radii: Vec<f64>) -> Result<Self> {
        Self::check_radii(&radii)?;
        Ok(Self::base(SchemeKind::Naive, spectrum, Data::Radii(radii)))
    }

    /// `w = β±_n(λ)` by the sign of `Im λ`.
    pub fn projection(spectrum: &Spectrum, radii: Vec<f64>) -> Result<Self> {
        Self::check_radii(&radii)?;
        Ok(Self::base(SchemeKind::Projection, spectrum, Data::Radii(radii)))
    }

    /// `w = w_n(λ)` inside `C_n`; lower points use the mirrored schedule.
    pub fn universal(
        spectrum: &Spectrum,
        upper: Option<ContourSchedule>,
        lower: Option<ContourSchedule>,
    ) -> Result<Self> {
        let has_up = spectrum.points().iter().any(|p| p.im > 0.0);
        let has_low = spectrum.points().iter().any(|p| p.im < 0.0);
        if has_up && upper.is_none() || has_low && lower.is_none() {
            return Err(Error::Config("missing contour schedule for a halfplane".into()));
        }
        let steps = [upper.as_ref(), lower.as_ref()]
            .into_iter()
            .flatten()
            .map(|s| s.len())
            .min()
            .unwrap_or(0);
        if steps == 0 && !spectrum.is_empty() {
            return Err(Error::Config("empty contour schedule".into()));
        }
        Ok(Self::base(
            SchemeKind::Universal,
            spectrum,
            Data::Contours {
                upper,
                lower,
                steps,
            },
        ))
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn blaschke(&self, o: Orientation) -> &BlaschkeEvaluator {
        match o {
            Orientation::Upper => &self.b_plus,
            Orientation::Lower => &self.b_minus,
        }
    }

    pub fn steps(&self) -> usize {
        match &self.data {
            Data::Radii(r) => r.len(),
            Data::Contours { steps, .. } => *steps,
        }
    }

    /// Radius for radius schedules, 1-based step number for contours.
    pub fn step_label(&self, n: usize) -> f64 {
        match &self.data {
            Data::Radii(r) => r[n],
            Data::Contours { .. } => (n + 1) as f64,
        }
    }

    fn check_step(&self, n: usize) -> Result<()> {
        if n >= self.steps() {
            return Err(Error::InvalidIndex {
                index: n,
                len: self.steps(),
            });
        }
        Ok(())
    }

    /// `w(λ_k, n)` for the 0-based schedule step `n`.
    pub fn weight(&self, k: usize, n: usize) -> Result<Complex64> {
        self.check_step(n)?;
        let lambda = self.spectrum.get(k)?;
        let (side, j) = self.slot[k];
        let zero = Complex64::new(0.0, 0.0);
        match (&self.data, self.kind) {
            (Data::Radii(r), SchemeKind::Naive) => Ok(if lambda.norm() < r[n] {
                Complex64::new(1.0, 0.0)
            } else {
                zero
            }),
            (Data::Radii(r), _) => self.blaschke(side).eval_beta(j, r[n]),
            (Data::Contours { upper, lower, .. }, _) => {
                let sched = match side {
                    Orientation::Upper => upper.as_ref(),
                    Orientation::Lower => lower.as_ref(),
                }
                .expect("schedule checked at construction");
                let b = self.blaschke(side);
                let t = &sched.contours[n];
                let w = b.frame(lambda);
                if !t.contains(w) {
                    return Ok(zero);
                }
                Ok(b.frame(outer_weight(t.l, sched.alphas[n], w)?))
            }
        }
    }

    /// Nonzero weights of step `n` in increasing `k`.
    pub fn weight_row(&self, n: usize) -> Result<Vec<(usize, Complex64)>> {
        self.check_step(n)?;
        let candidates: Vec<usize> = match &self.data {
            Data::Radii(r) => self.spectrum.truncation_at(r[n]).included,
            Data::Contours { upper, lower, .. } => {
                let mut v = Vec::new();
                if let Some(s) = upper {
                    v.extend(lambda_inside_frame(&self.spectrum, &s.contours[n], &self.b_plus).included
                        .into_iter()
                        .filter(|&k| self.slot[k].0 == Orientation::Upper));
                }
                if let Some(s) = lower {
                    v.extend(lambda_inside_frame(&self.spectrum, &s.contours[n], &self.b_minus).included
                        .into_iter()
                        .filter(|&k| self.slot[k].0 == Orientation::Lower));
                }
                v.sort_unstable();
                v
            }
        };
        let mut row = Vec::with_capacity(candidates.len());
        for k in candidates {
            let w = self.weight(k, n)?;
            if w != Complex64::new(0.0, 0.0) {
                row.push((k, w));
            }
        }
        Ok(row)
    }

    pub fn write_rows_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for n in 0..self.steps() {
            for (k, v) in self.weight_row(n)? {
                let l = self.spectrum.points()[k];
                wr.serialize(WeightRow {
                    n: self.step_label(n),
                    k,
                    lambda_re: l.re,
                    lambda_im: l.im,
                    w_re: v.re,
                    w_im: v.im,
                })?;
            }
        }
        wr.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contours::{build_schedule, lambda_inside, ScheduleConfig};
    use crate::spectrum::{make_family, FamilySpec};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn boundary_profile() {
        let (l, a) = (40.0, 0.05);
        for x in [-19.9, -10.0, 0.0, 3.3, 19.99] {
            assert!((outer_weight(l, a, c(x, 0.0)).unwrap().norm() - 1.0).abs() < 1e-12);
        }
        let low = (-PI * a * l).exp();
        for x in [-300.0, -20.01, 20.5, 35.0, 1e4] {
            assert!((outer_weight(l, a, c(x, 0.0)).unwrap().norm() - low).abs() < 1e-12);
        }
        assert!(matches!(
            outer_weight(l, a, c(20.0, 0.0)),
            Err(Error::BranchPoint(_))
        ));
    }

    #[test]
    fn linear_phase_near_origin() {
        // Φ′(0) = −4, so w ≈ exp(4iαz)
        let z = c(1e-3, 2e-3);
        let w = outer_weight(100.0, 0.1, z).unwrap();
        assert!((w - (c(0.0, 0.4) * z).exp()).norm() < 1e-7);
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for zeta in [c(0.1, 0.01), c(-0.7, 0.2), c(0.49, 0.001), c(3.0, 5.0), c(0.0, 0.5)] {
            let a = phi(zeta).unwrap();
            let q = phi_quadrature(zeta);
            assert!((a - q).norm() <= 1e-8 * a.norm().max(1.0), "{zeta}: {a} vs {q}");
        }
    }

    #[test]
    fn projection_example() {
        let s = Spectrum::custom(vec![c(0.0, 1.0), c(0.0, 5.0)]).unwrap();
        let ws = WeightScheme::projection(&s, vec![2.0, 6.0]).unwrap();
        assert!((ws.weight(0, 0).unwrap() - c(2.0 / 3.0, 0.0)).norm() < 1e-15);
        assert_eq!(ws.weight(1, 0).unwrap(), c(0.0, 0.0));
        assert_eq!(ws.weight(0, 1).unwrap(), c(1.0, 0.0));
        assert_eq!(ws.weight_row(1).unwrap().len(), 2);
    }

    #[test]
    fn naive_rows() {
        let s = Spectrum::custom(vec![c(0.0, 1.0), c(2.0, -1.0)]).unwrap();
        let ws = WeightScheme::naive(&s, vec![0.5, 2.0, 3.0]).unwrap();
        assert!(ws.weight_row(0).unwrap().is_empty());
        assert_eq!(ws.weight_row(1).unwrap(), vec![(0, c(1.0, 0.0))]);
        assert_eq!(ws.weight_row(2).unwrap().len(), 2);
        assert!(WeightScheme::naive(&s, vec![2.0, 1.0]).is_err());
    }

    #[test]
    fn projection_mixed_halfplanes_end_at_one() {
        let s = Spectrum::custom(vec![c(0.0, 1.0), c(0.0, -1.0), c(1.0, 2.0), c(-3.0, -0.4)]).unwrap();
        let ws = WeightScheme::projection(&s, vec![1.5, 2.5, 10.0]).unwrap();
        for k in 0..s.len() {
            assert!((ws.weight(k, 2).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
            for n in 0..3 {
                assert!(ws.weight(k, n).unwrap().norm() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn universal_support_is_contour_interior() {
        let s = make_family(&FamilySpec::ShiftedIntegers { delta: 0.3 }, 60).unwrap();
        let b = BlaschkeEvaluator::new(&s, Orientation::Upper);
        let sched = build_schedule(&b, &ScheduleConfig::uniform(2.0, 50.0, 0.01, 3)).unwrap();
        let ws = WeightScheme::universal(&s, Some(sched.clone()), None).unwrap();
        for n in 0..3 {
            let support: Vec<usize> = ws.weight_row(n).unwrap().iter().map(|r| r.0).collect();
            assert_eq!(support, lambda_inside(&s, &sched.contours[n]).included);
            for &(_, w) in &ws.weight_row(n).unwrap() {
                assert!(w.norm() <= 1.0 + 1e-12);
            }
        }
        let far = s.points().iter().position(|p| p.re == 55.0).unwrap();
        assert_eq!(ws.weight(far, 0).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn universal_lower_mirrors_upper() {
        let s = make_family(&FamilySpec::ShiftedIntegers { delta: 0.3 }, 40).unwrap();
        let sc = s.conj();
        let cfg = ScheduleConfig::uniform(2.0, 30.0, 0.01, 2);
        let up = build_schedule(&BlaschkeEvaluator::new(&s, Orientation::Upper), &cfg).unwrap();
        let low = build_schedule(&BlaschkeEvaluator::new(&sc, Orientation::Lower), &cfg).unwrap();
        let wu = WeightScheme::universal(&s, Some(up), None).unwrap();
        let wl = WeightScheme::universal(&sc, None, Some(low)).unwrap();
        for k in 0..s.len() {
            let j = sc.points().iter().position(|p| *p == s.points()[k].conj()).unwrap();
            assert!((wu.weight(k, 1).unwrap().conj() - wl.weight(j, 1).unwrap()).norm() < 1e-14);
        }
    }

    #[test]
    fn csv_columns() {
        let s = Spectrum::custom(vec![c(0.0, 1.0)]).unwrap();
        let ws = WeightScheme::naive(&s, vec![2.0]).unwrap();
        let mut buf = Vec::new();
        ws.write_rows_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "n,k,lambda_re,lambda_im,w_re,w_im\n2.0,0,0.0,1.0,1.0,0.0\n"
        );
    }

    proptest! {
        #[test]
        fn outer_weight_bounded_in_closed_upper_halfplane(x in -100.0..100.0f64, y in 0.0..100.0f64, a in 1e-4..0.5f64) {
            prop_assume!((x.abs() - 20.0).abs() > 1e-9 || y > 0.0);
            prop_assert!(outer_weight(40.0, a, c(x, y)).unwrap().norm() <= 1.0 + 1e-12);
        }
    }
}
