//! Seeded synthetic instances.
//!
//! Specs have a compact text form used by the CLI, for example
//! `gaussian-mixture:n=50000,d=4,components=64,spread=1,separation=100,seed=7`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use kmpp::Dataset;

use crate::error::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case")]
pub enum Generator {
    /// Isotropic gaussian blobs centered on a lattice with the given spacing.
    GaussianMixture {
        components: usize,
        spread: f64,
        separation: f64,
    },
    /// Uniform in `[0, side)^d`.
    UniformBox { side: f64 },
    /// Uniform directions at one fixed radius.
    SphereShell { radius: f64 },
    /// Points spread over concentric shells of radius `growth^s`, blurred by
    /// `spread` times the shell radius.
    RadialShells { shells: usize, growth: f64, spread: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    #[serde(flatten)]
    pub generator: Generator,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
}

/// Output of the mixture generator with its ground truth.
#[derive(Debug, Clone)]
pub struct Mixture {
    pub dataset: Dataset,
    /// `components x d` row-major component centers.
    pub centers: Vec<f64>,
    pub labels: Vec<usize>,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Spec(m));
        if self.n == 0 || self.d == 0 {
            return bad("n and d must be positive".into());
        }
        match self.generator {
            Generator::GaussianMixture {
                components,
                spread,
                separation,
            } => {
                if components == 0 || components > self.n {
                    return bad(format!("need 1 <= components <= n, got {components}"));
                }
                if !(spread >= 0.0 && spread.is_finite()) || !(separation > 0.0 && separation.is_finite()) {
                    return bad("spread must be >= 0 and separation > 0".into());
                }
            }
            Generator::UniformBox { side } => {
                if !(side > 0.0 && side.is_finite()) {
                    return bad("side must be positive".into());
                }
            }
            Generator::SphereShell { radius } => {
                if !(radius > 0.0 && radius.is_finite()) {
                    return bad("radius must be positive".into());
                }
            }
            Generator::RadialShells { shells, growth, spread } => {
                if shells == 0 || shells > self.n {
                    return bad(format!("need 1 <= shells <= n, got {shells}"));
                }
                if !(growth > 0.0 && growth.is_finite()) || !(spread >= 0.0 && spread.is_finite()) {
                    return bad("growth must be positive and spread >= 0".into());
                }
            }
        }
        Ok(())
    }
}

pub fn generate(spec: &SyntheticSpec) -> Result<Dataset, HarnessError> {
    spec.validate()?;
    let (n, d) = (spec.n, spec.d);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let data = match spec.generator {
        Generator::GaussianMixture { .. } => return Ok(gaussian_mixture(spec)?.dataset),
        Generator::UniformBox { side } => (0..n * d).map(|_| rng.random::<f64>() * side).collect(),
        Generator::SphereShell { radius } => {
            let mut data = Vec::with_capacity(n * d);
            for _ in 0..n {
                data.extend(direction(&mut rng, d).into_iter().map(|x| x * radius));
            }
            data
        }
        Generator::RadialShells { shells, growth, spread } => {
            let mut data = Vec::with_capacity(n * d);
            for i in 0..n {
                let r = growth.powi((i % shells) as i32);
                for x in direction(&mut rng, d) {
                    let z: f64 = rng.sample(StandardNormal);
                    data.push(r * (x + spread * z));
                }
            }
            data
        }
    };
    Ok(Dataset::new(d, data)?)
}

/// Gaussian mixture with its component centers and labels. Points are
/// assigned to components round-robin.
pub fn gaussian_mixture(spec: &SyntheticSpec) -> Result<Mixture, HarnessError> {
    spec.validate()?;
    let Generator::GaussianMixture {
        components,
        spread,
        separation,
    } = spec.generator
    else {
        return Err(HarnessError::Spec("not a gaussian-mixture spec".into()));
    };
    let (n, d) = (spec.n, spec.d);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    // smallest lattice side with at least `components` nodes
    let mut side = 1usize;
    while (side as f64).powi(d as i32) < components as f64 {
        side += 1;
    }
    let mut taken = HashSet::with_capacity(components);
    let mut centers = Vec::with_capacity(components * d);
    while taken.len() < components {
        let node: Vec<usize> = (0..d).map(|_| rng.random_range(0..side)).collect();
        if taken.insert(node.clone()) {
            centers.extend(node.iter().map(|&c| c as f64 * separation));
        }
    }

    let mut data = Vec::with_capacity(n * d);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let c = i % components;
        labels.push(c);
        for j in 0..d {
            let z: f64 = rng.sample(StandardNormal);
            data.push(centers[c * d + j] + spread * z);
        }
    }
    Ok(Mixture {
        dataset: Dataset::new(d, data)?,
        centers,
        labels,
    })
}

fn direction(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

impl fmt::Display for SyntheticSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d, seed) = (self.n, self.d, self.seed);
        match self.generator {
            Generator::GaussianMixture {
                components,
                spread,
                separation,
            } => write!(
                f,
                "gaussian-mixture:n={n},d={d},components={components},spread={spread},separation={separation},seed={seed}"
            ),
            Generator::UniformBox { side } => write!(f, "uniform-box:n={n},d={d},side={side},seed={seed}"),
            Generator::SphereShell { radius } => write!(f, "sphere-shell:n={n},d={d},radius={radius},seed={seed}"),
            Generator::RadialShells { shells, growth, spread } => write!(
                f,
                "radial-shells:n={n},d={d},shells={shells},growth={growth},spread={spread},seed={seed}"
            ),
        }
    }
}

impl FromStr for SyntheticSpec {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |m: String| HarnessError::Spec(m);
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = std::collections::HashMap::new();
        for kv in rest.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got '{kv}'")))?;
            params.insert(k.trim().to_string(), v.trim().to_string());
        }
        let mut take = |key: &str, default: Option<f64>| -> Result<f64, HarnessError> {
            match params.remove(key) {
                Some(v) => v.parse::<f64>().map_err(|_| err(format!("bad value for {key}: '{v}'"))),
                None => default.ok_or_else(|| err(format!("missing parameter '{key}'"))),
            }
        };
        let n = take("n", None)? as usize;
        let d = take("d", None)? as usize;
        let seed = take("seed", Some(0.0))? as u64;
        let generator = match kind {
            "gaussian-mixture" => Generator::GaussianMixture {
                components: take("components", None)? as usize,
                spread: take("spread", Some(1.0))?,
                separation: take("separation", Some(100.0))?,
            },
            "uniform-box" => Generator::UniformBox {
                side: take("side", Some(1.0))?,
            },
            "sphere-shell" => Generator::SphereShell {
                radius: take("radius", Some(1.0))?,
            },
            "radial-shells" => Generator::RadialShells {
                shells: take("shells", Some(8.0))? as usize,
                growth: take("growth", Some(3.0))?,
                spread: take("spread", Some(0.05))?,
            },
            other => return Err(err(format!("unknown generator '{other}'"))),
        };
        if let Some(extra) = params.keys().next() {
            return Err(err(format!("unknown parameter '{extra}' for {kind}")));
        }
        let spec = SyntheticSpec { generator, n, d, seed };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use kmpp::{norm_variance_pct, sed, ReferencePoint};

    fn spec(generator: Generator, n: usize, d: usize, seed: u64) -> SyntheticSpec {
        SyntheticSpec { generator, n, d, seed }
    }

    #[test]
    fn sphere_shell_has_flat_norms() {
        let ds = generate(&spec(Generator::SphereShell { radius: 1.0 }, 100, 3, 1)).unwrap();
        assert!(norm_variance_pct(&ds, &ReferencePoint::origin(3)) < 1e-12);
    }

    #[test]
    fn deterministic_per_seed() {
        for g in [
            Generator::UniformBox { side: 2.0 },
            Generator::SphereShell { radius: 3.0 },
            Generator::RadialShells {
                shells: 4,
                growth: 2.0,
                spread: 0.1,
            },
            Generator::GaussianMixture {
                components: 5,
                spread: 1.0,
                separation: 10.0,
            },
        ] {
            let a = generate(&spec(g.clone(), 50, 3, 9)).unwrap();
            let b = generate(&spec(g.clone(), 50, 3, 9)).unwrap();
            let c = generate(&spec(g, 50, 3, 10)).unwrap();
            assert_eq!(a.data(), b.data());
            assert_ne!(a.data(), c.data());
        }
    }

    #[test]
    fn mixture_components_are_separated() {
        let s = spec(
            Generator::GaussianMixture {
                components: 16,
                spread: 1.0,
                separation: 100.0,
            },
            2000,
            2,
            3,
        );
        let m = gaussian_mixture(&s).unwrap();
        let d = 2;
        for a in 0..16 {
            for b in 0..a {
                assert!(sed(&m.centers[a * d..][..d], &m.centers[b * d..][..d]) >= 100.0 * 100.0);
            }
        }
        for (i, x) in m.dataset.rows().enumerate() {
            for c in 0..16 {
                let dist = sed(x, &m.centers[c * d..][..d]);
                if c == m.labels[i] {
                    assert!(dist <= 25.0, "point {i} at {dist} from own center");
                } else {
                    assert!(dist >= 2500.0);
                }
            }
        }
        assert_eq!(generate(&s).unwrap().data(), m.dataset.data());
    }

    #[test]
    fn radial_shells_have_high_norm_variance() {
        let ds = generate(&spec(
            Generator::RadialShells {
                shells: 8,
                growth: 3.0,
                spread: 0.05,
            },
            4000,
            4,
            2,
        ))
        .unwrap();
        assert!(norm_variance_pct(&ds, &ReferencePoint::origin(4)) > 70.0);
    }

    #[test]
    fn parse_and_display_round_trip() {
        let s: SyntheticSpec = "gaussian-mixture:n=500,d=4,components=8,spread=1,separation=100,seed=7"
            .parse()
            .unwrap();
        assert_eq!(s.to_string().parse::<SyntheticSpec>().unwrap(), s);
        let s: SyntheticSpec = "sphere-shell:n=10,d=3".parse().unwrap();
        assert_eq!(s.generator, Generator::SphereShell { radius: 1.0 });
        assert!("sphere-shell:n=10".parse::<SyntheticSpec>().is_err());
        assert!("blob:n=10,d=2".parse::<SyntheticSpec>().is_err());
        assert!("uniform-box:n=10,d=2,colour=3".parse::<SyntheticSpec>().is_err());
        assert!("gaussian-mixture:n=3,d=2,components=4"
            .parse::<SyntheticSpec>()
            .is_err());
        assert!("sphere-shell:n=10,d=2,radius=-1".parse::<SyntheticSpec>().is_err());
    }
}
