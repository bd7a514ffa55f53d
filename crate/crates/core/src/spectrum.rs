//! Spectra: finite windows of a frequency sequence off the real axis.
//!
//! Points are kept sorted by modulus (ties broken by argument) so every
//! truncation `{k : |lambda_k| < n}` is a prefix and every product over the
//! spectrum is evaluated in one fixed order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Points with `|Im lambda|` below this are rejected.
pub const MIN_IMAG: f64 = 1e-12;

/// Declared asymptotic family of a stored window. Lattice-like families
/// carry enough information for analytic tail corrections.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// `{n + offset + i delta : |n| <= count}`
    ShiftedIntegers { delta: f64, count: usize, offset: f64 },
    /// `{n + amp sin(n) + offset + i delta : |n| <= count}`
    KadecPerturbed {
        delta: f64,
        amp: f64,
        count: usize,
        offset: f64,
    },
    /// `{n + offset + i delta} ∪ {n + offset + i delta + eps/|n| : n != 0}`
    ClusteredPairs {
        delta: f64,
        eps: f64,
        count: usize,
        offset: f64,
    },
    Custom,
}

/// Lattice description used by the analytic tail models: the points
/// `±m + offset + i delta` for `m > count`, each repeated `multiplicity` times.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeTail {
    pub offset: f64,
    pub delta: f64,
    pub multiplicity: usize,
    pub count: usize,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::ShiftedIntegers { .. } => "shifted_integers",
            Family::KadecPerturbed { .. } => "kadec_perturbed",
            Family::ClusteredPairs { .. } => "clustered_pairs",
            Family::Custom => "custom_list",
        }
    }

    pub fn lattice_tail(&self) -> Option<LatticeTail> {
        match *self {
            Family::ShiftedIntegers {
                delta,
                count,
                offset,
            }
            | Family::KadecPerturbed {
                delta,
                count,
                offset,
                ..
            } => Some(LatticeTail {
                offset,
                delta,
                multiplicity: 1,
                count,
            }),
            Family::ClusteredPairs {
                delta,
                count,
                offset,
                ..
            } => Some(LatticeTail {
                offset,
                delta,
                multiplicity: 2,
                count,
            }),
            Family::Custom => None,
        }
    }

    fn header(&self) -> String {
        let mut h = format!("# family={}", self.name());
        match *self {
            Family::ShiftedIntegers {
                delta,
                count,
                offset,
            } => {
                let _ = write!(h, " delta={delta} count={count} offset={offset}");
            }
            Family::KadecPerturbed {
                delta,
                amp,
                count,
                offset,
            } => {
                let _ = write!(h, " delta={delta} amp={amp} count={count} offset={offset}");
            }
            Family::ClusteredPairs {
                delta,
                eps,
                count,
                offset,
            } => {
                let _ = write!(h, " delta={delta} eps={eps} count={count} offset={offset}");
            }
            Family::Custom => {}
        }
        h
    }
}

/// Parameters of a built-in family before a window size is chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum FamilySpec {
    ShiftedIntegers { delta: f64 },
    KadecPerturbed { delta: f64, amp: f64 },
    ClusteredPairs { delta: f64, eps: f64 },
    CustomList(Vec<Complex64>),
}

impl FamilySpec {
    /// Build from a family identifier and named real parameters.
    /// `custom_list` takes its points separately, see [`FamilySpec::CustomList`].
    pub fn from_name(name: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |key: &str| -> Result<f64> {
            params
                .get(key)
                .copied()
                .ok_or_else(|| Error::BadParameter(key.to_string()))
        };
        match name {
            "shifted_integers" => Ok(FamilySpec::ShiftedIntegers {
                delta: get("delta")?,
            }),
            "kadec_perturbed" => Ok(FamilySpec::KadecPerturbed {
                delta: get("delta")?,
                amp: params.get("amp").copied().unwrap_or(0.2),
            }),
            "clustered_pairs" => Ok(FamilySpec::ClusteredPairs {
                delta: get("delta")?,
                eps: get("eps")?,
            }),
            "custom_list" => Ok(FamilySpec::CustomList(Vec::new())),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }
}

/// Build a spectrum window from a family.
pub fn make_family(spec: &FamilySpec, count: usize) -> Result<Spectrum> {
    if count == 0 {
        return Err(Error::BadParameter("count".into()));
    }
    let c = count as i64;
    match *spec {
        FamilySpec::ShiftedIntegers { delta } => {
            if !(delta > 0.0) {
                return Err(Error::BadParameter("delta".into()));
            }
            let pts = (-c..=c)
                .map(|n| Complex64::new(n as f64, delta))
                .collect();
            Spectrum::new(
                pts,
                Family::ShiftedIntegers {
                    delta,
                    count,
                    offset: 0.0,
                },
            )
        }
        FamilySpec::KadecPerturbed { delta, amp } => {
            if !(delta > 0.0) {
                return Err(Error::BadParameter("delta".into()));
            }
            if !(amp.abs() < 0.25) {
                return Err(Error::BadParameter("amp".into()));
            }
            let pts = (-c..=c)
                .map(|n| {
                    let nf = n as f64;
                    Complex64::new(nf + amp * nf.sin(), delta)
                })
                .collect();
            Spectrum::new(
                pts,
                Family::KadecPerturbed {
                    delta,
                    amp,
                    count,
                    offset: 0.0,
                },
            )
        }
        FamilySpec::ClusteredPairs { delta, eps } => {
            if !(delta > 0.0) {
                return Err(Error::BadParameter("delta".into()));
            }
            if !(eps > 0.0) {
                return Err(Error::BadParameter("eps".into()));
            }
            let mut pts = Vec::with_capacity(4 * count + 1);
            for n in -c..=c {
                let nf = n as f64;
                pts.push(Complex64::new(nf, delta));
                if n != 0 {
                    pts.push(Complex64::new(nf + eps / nf.abs(), delta));
                }
            }
            Spectrum::new(
                pts,
                Family::ClusteredPairs {
                    delta,
                    eps,
                    count,
                    offset: 0.0,
                },
            )
        }
        FamilySpec::CustomList(ref pts) => {
            let take = pts.len().min(count);
            Spectrum::new(pts[..take].to_vec(), Family::Custom)
        }
    }
}

/// Finite window of a spectrum; immutable after construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    points: Vec<Complex64>,
    family: Family,
    delta_floor: f64,
}

/// Indices `{k : |lambda_k| < n}` (or, for contour truncations, the points
/// inside a contour whose half-width is stored in `n`).
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationIndex {
    pub n: f64,
    pub included: Vec<usize>,
}

fn order(a: &Complex64, b: &Complex64) -> Ordering {
    a.norm()
        .total_cmp(&b.norm())
        .then_with(|| a.arg().total_cmp(&b.arg()))
}

impl Spectrum {
    pub fn new(mut points: Vec<Complex64>, family: Family) -> Result<Self> {
        for p in &points {
            if !p.re.is_finite() || !p.im.is_finite() {
                return Err(Error::NonFinite(format!("spectrum point {p}")));
            }
            if p.re == 0.0 && p.im == 0.0 {
                return Err(Error::ZeroPoint(*p));
            }
            if p.im.abs() < MIN_IMAG {
                return Err(Error::RealPoint(*p));
            }
        }
        points.sort_by(order);
        for w in points.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicatePoint(w[0]));
            }
        }
        let delta_floor = points
            .iter()
            .map(|p| p.im.abs())
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            points,
            family,
            delta_floor: if delta_floor.is_finite() {
                delta_floor
            } else {
                0.0
            },
        })
    }

    pub fn custom(points: Vec<Complex64>) -> Result<Self> {
        Self::new(points, Family::Custom)
    }

    pub fn empty() -> Self {
        Self {
            points: Vec::new(),
            family: Family::Custom,
            delta_floor: 0.0,
        }
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn get(&self, k: usize) -> Result<Complex64> {
        self.points.get(k).copied().ok_or(Error::InvalidIndex {
            index: k,
            len: self.points.len(),
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// `min_k |Im lambda_k|` (0 for the empty spectrum).
    pub fn delta_floor(&self) -> f64 {
        self.delta_floor
    }

    pub fn max_modulus(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.norm())
    }

    /// `(Λ⁺, Λ⁻)`; both keep the sort order and the family tag when the
    /// family lies entirely in one halfplane.
    pub fn split_halfplanes(&self) -> (Spectrum, Spectrum) {
        let (upper, lower): (Vec<Complex64>, Vec<Complex64>) =
            self.points.iter().partition(|p| p.im > 0.0);
        let tag = |pts: &[Complex64]| {
            if pts.len() == self.points.len() {
                self.family.clone()
            } else {
                Family::Custom
            }
        };
        let make = |pts: Vec<Complex64>| {
            let family = tag(&pts);
            let delta_floor = pts
                .iter()
                .map(|p| p.im.abs())
                .fold(f64::INFINITY, f64::min);
            Spectrum {
                points: pts,
                family,
                delta_floor: if delta_floor.is_finite() {
                    delta_floor
                } else {
                    0.0
                },
            }
        };
        (make(upper), make(lower))
    }

    pub fn truncation_at(&self, n: f64) -> TruncationIndex {
        let end = self.points.partition_point(|p| p.norm() < n);
        TruncationIndex {
            n,
            included: (0..end).collect(),
        }
    }

    /// Translate every point by a real `t`; lattice families keep their tag
    /// with a shifted offset.
    pub fn translated(&self, t: f64) -> Result<Spectrum> {
        let pts = self.points.iter().map(|p| p + t).collect();
        let family = match self.family.clone() {
            Family::ShiftedIntegers {
                delta,
                count,
                offset,
            } => Family::ShiftedIntegers {
                delta,
                count,
                offset: offset + t,
            },
            Family::KadecPerturbed {
                delta,
                amp,
                count,
                offset,
            } => Family::KadecPerturbed {
                delta,
                amp,
                count,
                offset: offset + t,
            },
            Family::ClusteredPairs {
                delta,
                eps,
                count,
                offset,
            } => Family::ClusteredPairs {
                delta,
                eps,
                count,
                offset: offset + t,
            },
            Family::Custom => Family::Custom,
        };
        Spectrum::new(pts, family)
    }

    /// Complex conjugate spectrum; lattice families flip the sign of delta
    /// and the offset stays put.
    pub fn conj(&self) -> Spectrum {
        let pts = self.points.iter().map(|p| p.conj()).collect();
        let family = match self.family.clone() {
            Family::ShiftedIntegers {
                delta,
                count,
                offset,
            } => Family::ShiftedIntegers {
                delta: -delta,
                count,
                offset,
            },
            Family::KadecPerturbed {
                delta,
                amp,
                count,
                offset,
            } => Family::KadecPerturbed {
                delta: -delta,
                amp,
                count,
                offset,
            },
            Family::ClusteredPairs {
                delta,
                eps,
                count,
                offset,
            } => Family::ClusteredPairs {
                delta: -delta,
                eps,
                count,
                offset,
            },
            Family::Custom => Family::Custom,
        };
        // conjugation preserves validity
        Spectrum::new(pts, family).expect("conjugate of a valid spectrum")
    }

    /// Text form: optional `# family=...` header, then one `re im` per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if self.family != Family::Custom {
            out.push_str(&self.family.header());
            out.push('\n');
        }
        for p in &self.points {
            let _ = writeln!(out, "{} {}", p.re, p.im);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Spectrum> {
        let mut family = Family::Custom;
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(f) = parse_header(rest)? {
                    family = f;
                }
                continue;
            }
            let mut it = line.split_whitespace();
            let (Some(re), Some(im), None) = (it.next(), it.next(), it.next()) else {
                return Err(Error::Parse(format!(
                    "line {}: expected `re im`",
                    lineno + 1
                )));
            };
            let re: f64 = re
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad real part", lineno + 1)))?;
            let im: f64 = im
                .parse()
                .map_err(|_| Error::Parse(format!("line {}: bad imaginary part", lineno + 1)))?;
            points.push(Complex64::new(re, im));
        }
        Spectrum::new(points, family)
    }
}

fn parse_header(rest: &str) -> Result<Option<Family>> {
    let mut kv = BTreeMap::new();
    for tok in rest.split_whitespace() {
        if let Some((k, v)) = tok.split_once('=') {
            kv.insert(k.to_string(), v.to_string());
        }
    }
    let Some(name) = kv.get("family") else {
        return Ok(None);
    };
    let num = |key: &str| -> Result<f64> {
        kv.get(key)
            .ok_or_else(|| Error::BadParameter(key.into()))?
            .parse::<f64>()
            .map_err(|_| Error::BadParameter(key.into()))
    };
    let count = num("count")? as usize;
    let offset = num("offset").unwrap_or(0.0);
    let fam = match name.as_str() {
        "shifted_integers" => Family::ShiftedIntegers {
            delta: num("delta")?,
            count,
            offset,
        },
        "kadec_perturbed" => Family::KadecPerturbed {
            delta: num("delta")?,
            amp: num("amp")?,
            count,
            offset,
        },
        "clustered_pairs" => Family::ClusteredPairs {
            delta: num("delta")?,
            eps: num("eps")?,
            count,
            offset,
        },
        "custom_list" => Family::Custom,
        other => return Err(Error::UnknownFamily(other.into())),
    };
    Ok(Some(fam))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn shifted_integers_small_window() {
        let s = make_family(&FamilySpec::ShiftedIntegers { delta: 0.3 }, 2).unwrap();
        let mut got: Vec<_> = s.points().to_vec();
        got.sort_by(|a, b| a.re.total_cmp(&b.re));
        let want: Vec<_> = (-2..=2).map(|n| c(n as f64, 0.3)).collect();
        assert_eq!(got, want);
        assert_eq!(s.delta_floor(), 0.3);
    }

    #[test]
    fn custom_single_point() {
        let s = make_family(&FamilySpec::CustomList(vec![c(0.0, 1.0)]), 1).unwrap();
        assert_eq!(s.points(), &[c(0.0, 1.0)]);
    }

    #[test]
    fn clustered_pairs_perturb_real_part() {
        let s = make_family(
            &FamilySpec::ClusteredPairs {
                delta: 1.0,
                eps: 0.5,
            },
            1,
        )
        .unwrap();
        let pts = s.points();
        assert!(pts.contains(&c(1.0, 1.0)));
        assert!(pts.contains(&c(1.5, 1.0)));
        assert!(pts.contains(&c(-0.5, 1.0)));
        assert_eq!(s.len(), 5);
    }

    #[test]
    fn rejects_unknown_and_degenerate() {
        assert!(matches!(
            FamilySpec::from_name("bogus", &BTreeMap::new()),
            Err(Error::UnknownFamily(_))
        ));
        assert!(matches!(
            Spectrum::custom(vec![c(1.0, 0.0)]),
            Err(Error::RealPoint(_))
        ));
        assert!(matches!(
            Spectrum::custom(vec![c(0.0, 0.0)]),
            Err(Error::ZeroPoint(_))
        ));
        assert!(matches!(
            Spectrum::custom(vec![c(1.0, 1e-13)]),
            Err(Error::RealPoint(_))
        ));
        assert!(matches!(
            Spectrum::custom(vec![c(1.0, 1.0), c(1.0, 1.0)]),
            Err(Error::DuplicatePoint(_))
        ));
        assert!(make_family(&FamilySpec::ShiftedIntegers { delta: 0.0 }, 3).is_err());
    }

    #[test]
    fn split_examples() {
        let s = Spectrum::custom(vec![c(0.0, 1.0), c(0.0, -1.0), c(1.0, 1.0)]).unwrap();
        let (u, l) = s.split_halfplanes();
        assert_eq!(u.points(), &[c(0.0, 1.0), c(1.0, 1.0)]);
        assert_eq!(l.points(), &[c(0.0, -1.0)]);

        let s = make_family(&FamilySpec::ShiftedIntegers { delta: 0.3 }, 3).unwrap();
        let (u, l) = s.split_halfplanes();
        assert_eq!(u, s);
        assert!(l.is_empty());

        let (u, l) = Spectrum::empty().split_halfplanes();
        assert!(u.is_empty() && l.is_empty());
    }

    #[test]
    fn truncation_examples() {
        let s = Spectrum::custom(vec![c(0.0, 1.0), c(0.0, 3.0)]).unwrap();
        assert_eq!(s.truncation_at(2.0).included, vec![0]);
        assert_eq!(s.truncation_at(10.0).included, vec![0, 1]);

        let lat = make_family(&FamilySpec::ShiftedIntegers { delta: 0.3 }, 50).unwrap();
        let t = lat.truncation_at(10.5);
        let brute: Vec<usize> = (0..lat.len())
            .filter(|&k| lat.points()[k].norm() < 10.5)
            .collect();
        assert_eq!(t.included, brute);
        assert_eq!(t.included.len(), 21);
    }

    #[test]
    fn symmetric_partners_are_adjacent() {
        let s = make_family(&FamilySpec::ShiftedIntegers { delta: 0.3 }, 4).unwrap();
        let p = s.points();
        for k in (1..p.len()).step_by(2) {
            assert_eq!(p[k].re, -p[k + 1].re);
        }
    }

    #[test]
    fn text_roundtrip_keeps_family() {
        let s = make_family(
            &FamilySpec::ClusteredPairs {
                delta: 1.0,
                eps: 0.5,
            },
            3,
        )
        .unwrap();
        let text = s.to_text();
        assert!(text.starts_with("# family=clustered_pairs"));
        assert_eq!(Spectrum::from_text(&text).unwrap(), s);
    }

    fn arb_spectrum() -> impl Strategy<Value = Spectrum> {
        prop::collection::vec((-20.0..20.0f64, 0.05..5.0f64, any::<bool>()), 0..40).prop_map(
            |v| {
                let mut pts: Vec<Complex64> = v
                    .into_iter()
                    .map(|(re, im, up)| c(re, if up { im } else { -im }))
                    .collect();
                pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
                pts.dedup();
                Spectrum::custom(pts).unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn truncation_is_monotone(s in arb_spectrum(), a in 0.01..30.0f64, b in 0.01..30.0f64) {
            let (n1, n2) = if a <= b { (a, b) } else { (b, a) };
            let i1 = s.truncation_at(n1).included;
            let i2 = s.truncation_at(n2).included;
            prop_assert!(i1.iter().all(|k| i2.contains(k)));
            for &k in &i1 { prop_assert!(s.points()[k].norm() < n1); }
        }

        #[test]
        fn split_partitions(s in arb_spectrum()) {
            let (u, l) = s.split_halfplanes();
            prop_assert_eq!(u.len() + l.len(), s.len());
            prop_assert!(l.points().iter().all(|p| p.im < 0.0));
            prop_assert!(u.points().iter().all(|p| p.im > 0.0));
        }

        #[test]
        fn delta_floor_is_min_imag(s in arb_spectrum()) {
            if !s.is_empty() {
                let m = s.points().iter().map(|p| p.im.abs()).fold(f64::INFINITY, f64::min);
                prop_assert_eq!(s.delta_floor(), m);
                prop_assert!(s.delta_floor() > 0.0);
            }
        }
    }
}
