//! Compiled samplers for [`DistSpec`]: the per-family setup is done once,
//! draws are then pure functions of the RNG stream.

use super::DistSpec;
use crate::{Error, Result};
use rand::Rng;
use rand_distr::{Beta, Distribution, Exp1, Gamma, Normal, Poisson, StandardNormal};

pub(super) enum Sampler {
    Normal(Normal<f64>),
    Beta(Beta<f64>),
    Gamma(Gamma<f64>),
    FoldedNormal(Normal<f64>),
    Laplace { location: f64, scale: f64 },
    VonMises { mu: f64, kappa: f64 },
    Skellam { p1: Poisson<f64>, p2: Poisson<f64> },
    // Gamma-Poisson mixture: rate ~ Gamma(size, mu/size), count ~ Poisson(rate).
    NegativeBinomial { gamma: Gamma<f64> },
    Poisson(Poisson<f64>),
    Mixture { cum_weights: Vec<f64>, components: Vec<Sampler> },
    Shifted { base: Box<Sampler>, delta: f64 },
}

impl Sampler {
    pub(super) fn compile(spec: &DistSpec) -> Result<Self> {
        let invalid = |e: String| Error::InvalidDistribution(e);
        Ok(match spec {
            DistSpec::Normal { mean, variance } => Sampler::Normal(
                Normal::new(*mean, variance.sqrt()).map_err(|e| invalid(e.to_string()))?,
            ),
            DistSpec::Beta { alpha, beta } => {
                Sampler::Beta(Beta::new(*alpha, *beta).map_err(|e| invalid(e.to_string()))?)
            }
            DistSpec::Gamma { shape, rate } => Sampler::Gamma(
                Gamma::new(*shape, 1.0 / rate).map_err(|e| invalid(e.to_string()))?,
            ),
            DistSpec::FoldedNormal { mu, sigma } => Sampler::FoldedNormal(
                Normal::new(*mu, *sigma).map_err(|e| invalid(e.to_string()))?,
            ),
            DistSpec::Laplace { location, scale } => Sampler::Laplace {
                location: *location,
                scale: *scale,
            },
            DistSpec::VonMises { mu, kappa } => Sampler::VonMises {
                mu: *mu,
                kappa: *kappa,
            },
            DistSpec::Skellam { lambda1, lambda2 } => Sampler::Skellam {
                p1: Poisson::new(*lambda1).map_err(|e| invalid(e.to_string()))?,
                p2: Poisson::new(*lambda2).map_err(|e| invalid(e.to_string()))?,
            },
            DistSpec::NegativeBinomial { mu, size } => Sampler::NegativeBinomial {
                gamma: Gamma::new(*size, mu / size).map_err(|e| invalid(e.to_string()))?,
            },
            DistSpec::Poisson { rate } => {
                Sampler::Poisson(Poisson::new(*rate).map_err(|e| invalid(e.to_string()))?)
            }
            DistSpec::Mixture(components) => {
                let mut cum = 0.0;
                let mut cum_weights = Vec::with_capacity(components.len());
                let mut compiled = Vec::with_capacity(components.len());
                for (w, c) in components {
                    cum += w;
                    cum_weights.push(cum);
                    compiled.push(Sampler::compile(c)?);
                }
                // Guard the last edge against weight rounding.
                if let Some(last) = cum_weights.last_mut() {
                    *last = f64::INFINITY;
                }
                Sampler::Mixture {
                    cum_weights,
                    components: compiled,
                }
            }
            DistSpec::Shifted { base, delta } => Sampler::Shifted {
                base: Box::new(Sampler::compile(base)?),
                delta: *delta,
            },
        })
    }

    pub(super) fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Normal(d) => d.sample(rng),
            Sampler::Beta(d) => d.sample(rng),
            Sampler::Gamma(d) => d.sample(rng),
            Sampler::FoldedNormal(d) => d.sample(rng).abs(),
            Sampler::Laplace { location, scale } => {
                // Difference of two unit exponentials is Laplace(0, 1).
                let e1: f64 = Exp1.sample(rng);
                let e2: f64 = Exp1.sample(rng);
                location + scale * (e1 - e2)
            }
            Sampler::VonMises { mu, kappa } => mu + von_mises_angle(*kappa, rng),
            Sampler::Skellam { p1, p2 } => p1.sample(rng) - p2.sample(rng),
            Sampler::NegativeBinomial { gamma } => {
                let rate = gamma.sample(rng);
                if rate > 0.0 {
                    Poisson::new(rate).map(|p| p.sample(rng)).unwrap_or(0.0)
                } else {
                    0.0
                }
            }
            Sampler::Poisson(d) => d.sample(rng),
            Sampler::Mixture {
                cum_weights,
                components,
            } => {
                let u: f64 = rng.gen();
                let idx = cum_weights.iter().position(|&c| u < c).unwrap_or(0);
                components[idx].draw(rng)
            }
            Sampler::Shifted { base, delta } => base.draw(rng) + delta,
        }
    }
}

/// Best-Fisher rejection sampler for a von Mises angle about 0, in (−π, π].
fn von_mises_angle<R: Rng>(kappa: f64, rng: &mut R) -> f64 {
    let a = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
    let b = (a - (2.0 * a).sqrt()) / (2.0 * kappa);
    let r = (1.0 + b * b) / (2.0 * b);
    loop {
        let u1: f64 = rng.gen();
        let z = (std::f64::consts::PI * u1).cos();
        let f = (1.0 + r * z) / (r + z);
        let c = kappa * (r - f);
        let u2: f64 = rng.gen();
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let u3: f64 = rng.gen();
            return (u3 - 0.5).signum() * f.clamp(-1.0, 1.0).acos();
        }
    }
}

// Silences the unused-import lint when StandardNormal is only pulled in by
// Exp1's bounds on some rand_distr versions.
#[allow(dead_code)]
fn _standard_normal_anchor(_: StandardNormal) {}
