use crate::cusp::arclength::ArclengthMap;
use crate::error::{Error, Result};

/// Points of the certification grid `10^{-8} … 1`.
pub const CERT_POINTS: usize = 2048;

/// Cusp characteristic `R: (0,1] → (0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Characteristic {
    /// `t^α`, `α ≥ 1`.
    Power { alpha: f64 },
    /// `exp(α(1 − t^{-β}))`, `α, β > 0`.
    Exponential { alpha: f64, beta: f64 },
    /// Profile given by samples, interpolated by local cubics in `(log t, log R)`
    /// and continued as a power law below the first sample.
    Sampled(SampledProfile),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledProfile {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl SampledProfile {
    pub fn new(t: &[f64], r: &[f64]) -> Result<Self> {
        if t.len() != r.len() || t.len() < 4 {
            return Err(Error::InvalidCharacteristic("sampled profile needs at least 4 (t, R) pairs".into()));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) || !(t[0] > 0.0) || (t[t.len() - 1] - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidCharacteristic("sample abscissae must increase on (0, 1] and end at 1".into()));
        }
        if r.iter().any(|&v| !(v > 0.0 && v <= 1.0)) {
            return Err(Error::InvalidCharacteristic("sampled R must lie in (0, 1]".into()));
        }
        Ok(SampledProfile { x: t.iter().map(|v| v.ln()).collect(), y: r.iter().map(|v| v.ln()).collect() })
    }

    /// `P(x) = log R(e^x)` and its first four x-derivatives.
    fn log_jet(&self, x: f64) -> [f64; 5] {
        let n = self.x.len();
        if x < self.x[0] {
            // power-law continuation with the slope of the first interval
            let p = (self.y[1] - self.y[0]) / (self.x[1] - self.x[0]);
            return [self.y[0] + p * (x - self.x[0]), p, 0.0, 0.0, 0.0];
        }
        let i = self.x.partition_point(|&v| v <= x).saturating_sub(1);
        let s = i.saturating_sub(1).min(n - 4);
        let xs = [self.x[s], self.x[s + 1], self.x[s + 2], self.x[s + 3]];
        let ys = [self.y[s], self.y[s + 1], self.y[s + 2], self.y[s + 3]];
        // Newton divided differences
        let mut c = ys;
        for j in 1..4 {
            for i in (j..4).rev() {
                c[i] = (c[i] - c[i - 1]) / (xs[i] - xs[i - j]);
            }
        }
        newton_jet(&c, &xs, x)
    }
}

/// Value and derivatives (up to order 3) of a cubic in Newton form.
fn newton_jet(c: &[f64; 4], xs: &[f64; 4], x: f64) -> [f64; 5] {
    // q(x) = c0 + c1 (x-x0) + c2 (x-x0)(x-x1) + c3 (x-x0)(x-x1)(x-x2)
    let (d0, d1, d2) = (x - xs[0], x - xs[1], x - xs[2]);
    let v = c[0] + c[1] * d0 + c[2] * d0 * d1 + c[3] * d0 * d1 * d2;
    let v1 = c[1] + c[2] * (d0 + d1) + c[3] * (d0 * d1 + d0 * d2 + d1 * d2);
    let v2 = 2.0 * c[2] + 2.0 * c[3] * (d0 + d1 + d2);
    let v3 = 6.0 * c[3];
    [v, v1, v2, v3, 0.0]
}

/// `R, R', R'', R''', R''''` from the derivatives `L', …, L''''` of `L = log R`.
fn exp_jet(r: f64, l: [f64; 4]) -> [f64; 5] {
    let [l1, l2, l3, l4] = l;
    [
        r,
        r * l1,
        r * (l2 + l1 * l1),
        r * (l3 + 3.0 * l1 * l2 + l1.powi(3)),
        r * (l4 + 4.0 * l1 * l3 + 3.0 * l2 * l2 + 6.0 * l1 * l1 * l2 + l1.powi(4)),
    ]
}

impl Characteristic {
    /// Power characteristic, certified on construction.
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha >= 1.0) || !alpha.is_finite() {
            return Err(Error::InvalidCharacteristic(format!(
                "power characteristic needs alpha >= 1 (got {alpha}); otherwise the arclength integral is finite"
            )));
        }
        Self::certified(Characteristic::Power { alpha })
    }

    pub fn exponential(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidCharacteristic(format!(
                "exponential characteristic needs alpha, beta > 0 (got {alpha}, {beta})"
            )));
        }
        Self::certified(Characteristic::Exponential { alpha, beta })
    }

    pub fn sampled(t: &[f64], r: &[f64]) -> Result<Self> {
        Self::certified(Characteristic::Sampled(SampledProfile::new(t, r)?))
    }

    fn certified(c: Self) -> Result<Self> {
        c.certify_range()?;
        c.certify_divergence(10.0)?;
        Ok(c)
    }

    /// Whether this is `t ↦ t`, the characteristic of cones.
    pub fn is_linear(&self) -> bool {
        matches!(self, Characteristic::Power { alpha } if *alpha == 1.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Characteristic::Power { alpha } => t.powf(*alpha),
            Characteristic::Exponential { alpha, beta } => (alpha * (1.0 - t.powf(-beta))).exp(),
            Characteristic::Sampled(p) => p.log_jet(t.ln())[0].exp(),
        }
    }

    /// `[R, R', R'', R''', R'''']` at `t`.
    pub fn jet(&self, t: f64) -> [f64; 5] {
        match self {
            Characteristic::Power { alpha } => {
                let a = *alpha;
                let mut out = [0.0; 5];
                let mut coef = 1.0;
                for (j, o) in out.iter_mut().enumerate() {
                    *o = if coef == 0.0 { 0.0 } else { coef * t.powf(a - j as f64) };
                    coef *= a - j as f64;
                }
                out
            }
            Characteristic::Exponential { alpha, beta } => {
                let (a, b) = (*alpha, *beta);
                let tb = t.powf(-b);
                let r = (a * (1.0 - tb)).exp();
                let l1 = a * b * tb / t;
                let l2 = -a * b * (b + 1.0) * tb / (t * t);
                let l3 = a * b * (b + 1.0) * (b + 2.0) * tb / t.powi(3);
                let l4 = -a * b * (b + 1.0) * (b + 2.0) * (b + 3.0) * tb / t.powi(4);
                exp_jet(r, [l1, l2, l3, l4])
            }
            Characteristic::Sampled(p) => {
                let [v, p1, p2, p3, p4] = p.log_jet(t.ln());
                let l1 = p1 / t;
                let l2 = (p2 - p1) / (t * t);
                let l3 = (p3 - 3.0 * p2 + 2.0 * p1) / t.powi(3);
                let l4 = (p4 - 6.0 * p3 + 11.0 * p2 - 6.0 * p1) / t.powi(4);
                exp_jet(v.exp(), [l1, l2, l3, l4])
            }
        }
    }

    /// `∂_t log R` at `t`.
    pub fn log_derivative(&self, t: f64) -> f64 {
        let j = self.jet(t);
        j[1] / j[0]
    }

    fn certify_range(&self) -> Result<()> {
        for t in certification_grid() {
            let r = self.eval(t);
            // R underflows to 0 near t = 0 for steep characteristics; only
            // values above the float range or non-positive in the bulk count.
            if r.is_nan() || r > 1.0 + 1e-12 || (r <= 0.0 && t > 1e-2) {
                return Err(Error::InvalidCharacteristic(format!("R({t:e}) = {r:e} outside (0, 1]")));
            }
        }
        Ok(())
    }

    /// Certified divergence of `∫_ε^1 dt/R`: partial integrals over
    /// `ε = 10^{-2}, …, 10^{-8}` increase strictly and exceed `threshold`.
    pub fn certify_divergence(&self, threshold: f64) -> Result<Vec<f64>> {
        let map = ArclengthMap::new(self.clone());
        let mut values = Vec::new();
        for e in 2..=8 {
            let eps = 10f64.powi(-e);
            let v = map.rho_unbounded(eps);
            if let Some(&prev) = values.last() {
                if !(v > prev) {
                    return Err(Error::InvalidCharacteristic(format!(
                        "partial arclength integrals stop increasing at eps = {eps:e}"
                    )));
                }
            }
            values.push(v);
            if !v.is_finite() {
                break;
            }
        }
        let last = *values.last().unwrap_or(&0.0);
        if !(last > threshold) {
            return Err(Error::InvalidCharacteristic(format!(
                "integral of 1/R over [1e-8, 1] is {last:.6}, below the divergence threshold {threshold}"
            )));
        }
        Ok(values)
    }
}

/// Log-spaced grid of [`CERT_POINTS`] points from `1e-8` to `1`.
pub fn certification_grid() -> Vec<f64> {
    (0..CERT_POINTS)
        .map(|i| 10f64.powf(-8.0 + 8.0 * i as f64 / (CERT_POINTS - 1) as f64))
        .collect()
}

/// `c(j) = max_grid |R^{j-1} R^{(j)}|` for `j = 1..=j_max`.
pub fn validate_characteristic(r: &Characteristic, j_max: usize, grid: &[f64]) -> Result<Vec<f64>> {
    if j_max == 0 || j_max > 4 {
        return Err(Error::InvalidParameter(format!("j_max = {j_max} not in 1..=4")));
    }
    let mut c = vec![0.0f64; j_max];
    for &t in grid {
        let jet = r.jet(t);
        for j in 1..=j_max {
            // R^{j-1} R^{(j)}; R^0 = 1 even where R underflows
            let v = if j == 1 { jet[1] } else { jet[0].powi(j as i32 - 1) * jet[j] };
            let v = if jet[0] == 0.0 { 0.0 } else { v };
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("R^{}·R^({j}) at t = {t:e}", j - 1)));
            }
            c[j - 1] = c[j - 1].max(v.abs());
        }
    }
    Ok(c)
}

/// `max_grid |R^k ∂^k log R|` for `k = 1..=k_max`.
pub fn log_derivative_bounds(r: &Characteristic, k_max: usize, grid: &[f64]) -> Result<Vec<f64>> {
    if k_max == 0 || k_max > 4 {
        return Err(Error::InvalidParameter(format!("k_max = {k_max} not in 1..=4")));
    }
    let mut c = vec![0.0f64; k_max];
    for &t in grid {
        let [r0, r1, r2, r3, r4] = r.jet(t);
        if r0 == 0.0 {
            continue;
        }
        let (l1, l2) = (r1 / r0, r2 / r0);
        let (l3, l4) = (r3 / r0, r4 / r0);
        // derivatives of log R from those of R (Faà di Bruno)
        let d = [
            l1,
            l2 - l1 * l1,
            l3 - 3.0 * l1 * l2 + 2.0 * l1.powi(3),
            l4 - 4.0 * l1 * l3 - 3.0 * l2 * l2 + 12.0 * l1 * l1 * l2 - 6.0 * l1.powi(4),
        ];
        for k in 1..=k_max {
            let v = r0.powi(k as i32) * d[k - 1];
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("R^{k} ∂^{k} log R at t = {t:e}")));
            }
            c[k - 1] = c[k - 1].max(v.abs());
        }
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_values() {
        let r = Characteristic::power(2.0).unwrap();
        let j = r.jet(0.5);
        assert_eq!(j[0], 0.25);
        assert_eq!(j[1], 1.0);
        assert_eq!(j[3], 0.0);
        let lin = Characteristic::power(1.0).unwrap();
        assert!(lin.is_linear());
        assert_eq!(lin.jet(0.3)[1], 1.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Characteristic::power(0.5).is_err());
        assert!(Characteristic::exponential(0.0, 1.0).is_err());
        // R ≡ 1 has a bounded arclength integral
        let t: Vec<f64> = (0..=10).map(|i| 0.1 * i as f64).skip(1).collect();
        let ones = vec![1.0; t.len()];
        assert!(matches!(Characteristic::sampled(&t, &ones), Err(Error::InvalidCharacteristic(_))));
    }

    #[test]
    fn exponential_jet_matches_finite_differences() {
        let r = Characteristic::exponential(1.0, 1.0).unwrap();
        let h = 1e-5;
        for &t in &[0.3, 0.5, 0.9] {
            let j = r.jet(t);
            let jp = r.jet(t + h);
            let jm = r.jet(t - h);
            for d in 0..4 {
                let fd = (jp[d] - jm[d]) / (2.0 * h);
                assert!((fd - j[d + 1]).abs() < 1e-5 * (1.0 + j[d + 1].abs()), "order {d} at {t}: {fd} vs {}", j[d + 1]);
            }
        }
    }

    #[test]
    fn sampled_reproduces_power_law() {
        let t: Vec<f64> = (0..40).map(|i| 10f64.powf(-3.0 + 3.0 * i as f64 / 39.0)).collect();
        let r: Vec<f64> = t.iter().map(|v| v * v).collect();
        let c = Characteristic::sampled(&t, &r).unwrap();
        for &x in &[1e-5, 0.02, 0.5, 1.0] {
            let j = c.jet(x);
            assert!((j[0] - x * x).abs() < 1e-12 * (1.0 + x * x));
            assert!((j[1] - 2.0 * x).abs() < 1e-9);
            assert!((j[2] - 2.0).abs() < 1e-7);
        }
    }

    #[test]
    fn bounds() {
        let g = certification_grid();
        let c = validate_characteristic(&Characteristic::power(3.0).unwrap(), 3, &g).unwrap();
        assert!((c[0] - 3.0).abs() < 1e-9);
        let c = validate_characteristic(&Characteristic::power(1.0).unwrap(), 2, &g).unwrap();
        assert_eq!(c[1], 0.0);
        let l = log_derivative_bounds(&Characteristic::power(2.0).unwrap(), 2, &g).unwrap();
        // R ∂ log R = α t^{α-1}
        assert!((l[0] - 2.0).abs() < 1e-9);
    }
}
