//! Small special-function helpers shared by the evaluators: complex sinc,
//! power tail sums and the closed-form remainder of symmetric lattice
//! products.

use num_complex::Complex64;
use std::f64::consts::PI;

/// `sin(pi w) / (pi w)` with the removable singularity at `w = 0`.
pub fn sinc(w: Complex64) -> Complex64 {
    let pw = w * PI;
    if w.norm() < 1e-8 {
        Complex64::new(1.0, 0.0) - pw * pw / 6.0
    } else {
        pw.sin() / pw
    }
}

/// `sum_{n >= a} n^{-s}` for integer `s >= 2`, `a >= 1`.
///
/// Direct summation up to `max(a, s + 20)`, Euler-Maclaurin beyond.
pub fn power_tail_sum(s: u32, a: u64) -> f64 {
    assert!(s >= 2 && a >= 1);
    let start = a.max(u64::from(s) + 20);
    let si = s as i32;
    let mut sum = 0.0;
    for n in a..start {
        sum += (n as f64).powi(-si);
    }
    let x = start as f64;
    let sf = f64::from(s);
    let xs = x.powi(-si);
    sum += x * xs / (sf - 1.0) + xs / 2.0 + sf * xs / x / 12.0
        - sf * (sf + 1.0) * (sf + 2.0) * xs / x.powi(3) / 720.0
        + sf * (sf + 1.0) * (sf + 2.0) * (sf + 3.0) * (sf + 4.0) * xs / x.powi(5) / 30240.0;
    sum
}

/// Trigamma-style tail: `sum_{j >= 0} 1/(x + j)^2` for real `x > 0`.
pub fn inverse_square_tail(x: f64) -> f64 {
    assert!(x > 0.0);
    let mut sum = 0.0;
    let mut y = x;
    while y < 30.0 {
        sum += 1.0 / (y * y);
        y += 1.0;
    }
    let y2 = y * y;
    sum + 1.0 / y + 1.0 / (2.0 * y2) + 1.0 / (6.0 * y2 * y) - 1.0 / (30.0 * y2 * y2 * y)
        + 1.0 / (42.0 * y2 * y2 * y2 * y)
}

/// Product accumulator that keeps a separate binary exponent so long
/// products of large or small factors do not overflow.
#[derive(Clone, Copy, Debug)]
pub struct ScaledProduct {
    mantissa: Complex64,
    exponent: i32,
}

impl Default for ScaledProduct {
    fn default() -> Self {
        Self::new()
    }
}

impl ScaledProduct {
    pub fn new() -> Self {
        Self {
            mantissa: Complex64::new(1.0, 0.0),
            exponent: 0,
        }
    }

    pub fn mul(&mut self, factor: Complex64) {
        self.mantissa *= factor;
        let m = self.mantissa.norm();
        if m > 1e150 || (m < 1e-150 && m > 0.0) {
            let e = m.log2().round() as i32;
            self.mantissa = self.mantissa * 2f64.powi(-e);
            self.exponent += e;
        }
    }

    pub fn value(&self) -> Complex64 {
        if self.exponent == 0 {
            return self.mantissa;
        }
        // Split the scaling so intermediate powers stay finite.
        let half = self.exponent / 2;
        self.mantissa * 2f64.powi(half) * 2f64.powi(self.exponent - half)
    }
}

/// Remainder of a symmetric lattice product,
///
/// `prod_{m > from} prod_a (1 - a^2/m^2) / prod_b (1 - b^2/m^2)`.
///
/// Factors are multiplied explicitly while `m` is comparable to the
/// arguments; past `M >= 2 max(|a|, |b|)` the logarithm is summed as a
/// power series against `sum_{m > M} m^{-2k}`.
pub fn lattice_pair_tail(num: &[Complex64], den: &[Complex64], from: u64) -> Complex64 {
    let reach = num
        .iter()
        .chain(den.iter())
        .map(|a| a.norm())
        .fold(0.0_f64, f64::max);
    let explicit_to = from.max((2.0 * reach).ceil() as u64 + 1);
    let mut prod = ScaledProduct::new();
    for m in (from + 1)..=explicit_to {
        let m2 = (m as f64) * (m as f64);
        let mut f = Complex64::new(1.0, 0.0);
        for a in num {
            f *= Complex64::new(1.0, 0.0) - a * a / m2;
        }
        for b in den {
            f /= Complex64::new(1.0, 0.0) - b * b / m2;
        }
        prod.mul(f);
    }
    let num2: Vec<Complex64> = num.iter().map(|a| a * a).collect();
    let den2: Vec<Complex64> = den.iter().map(|b| b * b).collect();
    let mut num_pow = num2.clone();
    let mut den_pow = den2.clone();
    let mut log_rest = Complex64::new(0.0, 0.0);
    for k in 1..=80u32 {
        let moment: Complex64 =
            num_pow.iter().sum::<Complex64>() - den_pow.iter().sum::<Complex64>();
        let term = moment / f64::from(k) * power_tail_sum(2 * k, explicit_to + 1);
        log_rest -= term;
        if term.norm() < 1e-18 * (1.0 + log_rest.norm()) && k > 2 {
            break;
        }
        for (p, a2) in num_pow.iter_mut().zip(&num2) {
            *p *= a2;
        }
        for (p, b2) in den_pow.iter_mut().zip(&den2) {
            *p *= b2;
        }
    }
    prod.value() * log_rest.exp()
}
