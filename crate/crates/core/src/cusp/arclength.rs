use crate::cusp::characteristic::Characteristic;
use crate::error::{Error, Result};

// 7-point Gauss / 15-point Kronrod pair on [-1, 1].
const XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let (f1, f2) = (f(c - h * XK[i]), f(c + h * XK[i]));
        k += WK[i] * (f1 + f2);
        if i % 2 == 1 {
            g += WG[i / 2] * (f1 + f2);
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss-Kronrod quadrature to relative tolerance `rtol`.
pub fn adaptive_quad(f: impl Fn(f64) -> f64, a: f64, b: f64, rtol: f64) -> Result<f64> {
    let mut stack = vec![(a, b, 0usize)];
    let mut total = 0.0;
    let mut pieces = 0usize;
    let (whole, _) = gk15(&f, a, b);
    let scale = whole.abs().max(f64::MIN_POSITIVE);
    while let Some((lo, hi, depth)) = stack.pop() {
        let (v, err) = gk15(&f, lo, hi);
        if !v.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integrand on [{lo:e}, {hi:e}]")));
        }
        pieces += 1;
        if err <= rtol * scale * (hi - lo) / (b - a).abs().max(f64::MIN_POSITIVE) || depth > 48 {
            total += v;
        } else {
            if pieces > 200_000 {
                return Err(Error::Quadrature("subdivision limit reached".into()));
            }
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
    }
    Ok(total)
}

/// Arclength map `ρ(s) = ∫_s^1 dt/R(t)` of the metric `dr²/R²` and its inverse.
#[derive(Debug, Clone)]
pub struct ArclengthMap {
    r: Characteristic,
}

impl ArclengthMap {
    pub fn new(r: Characteristic) -> Self {
        ArclengthMap { r }
    }

    pub fn characteristic(&self) -> &Characteristic {
        &self.r
    }

    fn integrand(&self) -> impl Fn(f64) -> f64 + '_ {
        // substitution t = e^x
        move |x: f64| {
            let t = x.exp();
            t / self.r.eval(t)
        }
    }

    /// `∫_a^b dt/R` for `0 < a ≤ b ≤ 1`.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        if !(a > 0.0 && a <= b && b <= 1.0) {
            return Err(Error::InvalidParameter(format!("arclength interval [{a}, {b}] not in (0, 1]")));
        }
        if a == b {
            return Ok(0.0);
        }
        adaptive_quad(self.integrand(), a.ln(), b.ln(), 1e-14)
    }

    /// `ρ(t)`; `ρ(1) = 0`.
    pub fn rho(&self, t: f64) -> Result<f64> {
        self.integral(t, 1.0)
    }

    /// `ρ(t)` allowing `+∞` when `1/R` overflows.
    pub(crate) fn rho_unbounded(&self, t: f64) -> f64 {
        self.rho(t).unwrap_or(f64::INFINITY)
    }

    /// `dρ/dt = −1/R(t)`.
    pub fn derivative(&self, t: f64) -> f64 {
        -1.0 / self.r.eval(t)
    }

    /// The `t ∈ (0, 1]` with `ρ(t) = s`, by safeguarded Newton iteration in
    /// `log t` inside a bisection bracket, to `1e-12` relative accuracy.
    pub fn inverse(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::InvalidParameter(format!("arclength {s} must be finite and >= 0")));
        }
        if s == 0.0 {
            return Ok(1.0);
        }
        // bracket [lo, hi] in x = log t with ρ(e^lo) > s >= ρ(e^hi)
        let mut hi = 0.0f64;
        let mut lo = -1.0f64;
        while self.rho_unbounded(lo.exp()) <= s {
            hi = lo;
            lo *= 2.0;
            if lo < -700.0 {
                return Err(Error::Quadrature(format!("no bracket for arclength {s}")));
            }
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let f = self.rho_unbounded(x.exp()) - s;
            if f > 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let t = x.exp();
            let fp = -t / self.r.eval(t);
            let mut next = x - f / fp;
            if !next.is_finite() || next <= lo || next >= hi {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-14 * (1.0 + x.abs()) || hi - lo <= 1e-14 * (1.0 + x.abs()) {
                return Ok(next.exp());
            }
            x = next;
        }
        Err(Error::Quadrature(format!("inverse arclength did not converge for s = {s}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let m1 = ArclengthMap::new(Characteristic::power(1.0).unwrap());
        assert!((m1.rho((-2.0f64).exp()).unwrap() - 2.0).abs() < 1e-10);
        let m2 = ArclengthMap::new(Characteristic::power(2.0).unwrap());
        assert!((m2.rho(0.5).unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(m2.rho(1.0).unwrap(), 0.0);
    }

    #[test]
    fn inverse_roundtrip() {
        for r in [Characteristic::power(1.0).unwrap(), Characteristic::power(2.0).unwrap(), Characteristic::exponential(1.0, 1.0).unwrap()] {
            let m = ArclengthMap::new(r);
            for &s in &[0.0, 0.1, 1.0, 3.7, 8.0] {
                let t = m.inverse(s).unwrap();
                assert!((m.rho(t).unwrap() - s).abs() < 1e-11 * (1.0 + s), "s = {s}");
            }
        }
        let m = ArclengthMap::new(Characteristic::power(2.0).unwrap());
        // 1/t - 1 = s
        assert!((m.inverse(3.0).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn quadrature_of_polynomial() {
        let v = adaptive_quad(|x| x * x, 0.0, 3.0, 1e-14).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
    }
}
