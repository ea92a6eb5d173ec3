use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{ScalarField, Valence};
use crate::weighted::WeightedManifold;

/// Minimal corpus size accepted by the ratio reports.
pub const MIN_CORPUS: usize = 12;

/// Decay exponents cycled through the corpus.
pub const DECAY_RATES: [f64; 3] = [0.5, 1.0, 2.0];

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `cos(ω_s s + φ_s) cos(k θ + φ_θ)`.
    Trig { omega_s: f64, phase_s: f64, k_theta: f64, phase_theta: f64 },
    /// `(1 + (s − c)²/w²)⁻¹ (1 + a cos(k θ + φ))`.
    Bump { center: f64, width: f64, amplitude: f64, k_theta: f64, phase_theta: f64 },
}

/// One test function `u = ρ^μ · shape(s, θ) · χ(s)`, where `χ` is a smooth
/// cutoff equal to 1 below `s_flat` and 0 beyond `s_support`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusFunction {
    pub id: String,
    pub mu: f64,
    pub shape: Shape,
    pub s_flat: f64,
    pub s_support: f64,
}

/// `C^∞` step: 0 for `x ≤ 0`, 1 for `x ≥ 1`.
pub fn smooth_step(x: f64) -> f64 {
    let f = |y: f64| if y > 0.0 { (-1.0 / y).exp() } else { 0.0 };
    let a = f(x);
    let b = f(1.0 - x);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

impl CorpusFunction {
    pub fn cutoff(&self, s: f64) -> f64 {
        1.0 - smooth_step((s - self.s_flat) / (self.s_support - self.s_flat))
    }

    pub fn shape_value(&self, s: f64, theta: f64) -> f64 {
        match self.shape {
            Shape::Trig { omega_s, phase_s, k_theta, phase_theta } => {
                (omega_s * s + phase_s).cos() * (k_theta * theta + phase_theta).cos()
            }
            Shape::Bump { center, width, amplitude, k_theta, phase_theta } => {
                let x = (s - center) / width;
                (1.0 + amplitude * (k_theta * theta + phase_theta).cos()) / (1.0 + x * x)
            }
        }
    }

    pub fn eval(&self, s: f64, theta: f64, rho: f64) -> f64 {
        rho.powf(self.mu) * self.shape_value(s, theta) * self.cutoff(s)
    }

    /// Sample on the grid of `wm`; the first chart coordinate plays the role of `s`.
    pub fn sample(&self, wm: &WeightedManifold) -> ScalarField {
        let grid = wm.grid();
        let rho = wm.rho();
        let data = crate::par::map_range(grid.len(), |n| {
            let [s, th] = grid.point(n);
            self.eval(s, th, rho.value(n))
        });
        ScalarField::from_data(grid, Valence::SCALAR, data).expect("scalar length")
    }
}

/// Seeded family of test functions with decay rates `ρ^μ`, `μ ∈ {0.5, 1, 2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    functions: Vec<CorpusFunction>,
}

impl Corpus {
    /// `count` functions supported in `s < s_support`; angular frequencies are
    /// integers so the functions are periodic on a full circle.
    pub fn generate(seed: u64, count: usize, s_support: f64) -> Result<Self> {
        if count < MIN_CORPUS {
            return Err(Error::CorpusTooSmall { found: count, required: MIN_CORPUS });
        }
        if !(s_support > 0.0) {
            return Err(Error::InvalidParameter(format!("corpus support {s_support} must be positive")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s_flat = 0.5 * s_support;
        let functions = (0..count)
            .map(|j| {
                let mu = DECAY_RATES[j % DECAY_RATES.len()];
                let k_theta = rng.gen_range(0..=2) as f64;
                let phase_theta = rng.gen_range(0.0..TAU);
                let shape = if (j / DECAY_RATES.len()) % 2 == 0 {
                    Shape::Trig { omega_s: rng.gen_range(0.5..2.0), phase_s: rng.gen_range(0.0..TAU), k_theta, phase_theta }
                } else {
                    Shape::Bump {
                        center: rng.gen_range(0.0..s_flat),
                        width: rng.gen_range(0.5..1.5),
                        amplitude: rng.gen_range(0.0..0.5),
                        k_theta,
                        phase_theta,
                    }
                };
                CorpusFunction { id: format!("u{j:02}"), mu, shape, s_flat, s_support }
            })
            .collect();
        Ok(Corpus { functions })
    }

    pub fn from_functions(functions: Vec<CorpusFunction>) -> Result<Self> {
        if functions.len() < MIN_CORPUS {
            return Err(Error::CorpusTooSmall { found: functions.len(), required: MIN_CORPUS });
        }
        Ok(Corpus { functions })
    }

    pub fn functions(&self) -> &[CorpusFunction] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_sized() {
        let a = Corpus::generate(7, 12, 4.0).unwrap();
        let b = Corpus::generate(7, 12, 4.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, Corpus::generate(8, 12, 4.0).unwrap());
        assert!(matches!(Corpus::generate(7, 5, 4.0), Err(Error::CorpusTooSmall { .. })));
        let mus: Vec<f64> = a.functions().iter().map(|f| f.mu).collect();
        for m in DECAY_RATES {
            assert_eq!(mus.iter().filter(|&&x| x == m).count(), 4);
        }
    }

    #[test]
    fn cutoff_support() {
        let c = Corpus::generate(1, 12, 4.0).unwrap();
        let f = &c.functions()[0];
        assert_eq!(f.cutoff(1.0), 1.0);
        assert_eq!(f.cutoff(4.0), 0.0);
        assert_eq!(f.eval(5.0, 0.3, 0.1), 0.0);
        assert!(smooth_step(0.5) == 0.5);
    }
}
