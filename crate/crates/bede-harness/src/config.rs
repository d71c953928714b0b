//! Experiment configuration: TOML-backed Monte Carlo study descriptions and
//! a stable hash for output provenance.

use crate::error::{Error, Result};
use serde::Deserialize;

/// Mixture data-generating process: draw from the contaminant with
/// probability `epsilon`, otherwise from the target. Both components live in
/// the same model family.
#[derive(Debug, Clone, Deserialize)]
pub struct ContaminationSpec {
    /// Model family: "normal" (θ = mean, sd) or "poisson" (θ = rate).
    pub model: String,
    pub target: Vec<f64>,
    #[serde(default)]
    pub contaminant: Vec<f64>,
    #[serde(default)]
    pub epsilon: f64,
}

/// A Monte Carlo efficiency study.
#[derive(Debug, Clone, Deserialize)]
pub struct MCConfig {
    pub spec: ContaminationSpec,
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    /// Tuning pairs as (α, β) arrays; the likelihood member (0, 0) is always
    /// evaluated as the reference and need not be listed.
    pub pairs: Vec<[f64; 2]>,
    /// Parameter value the MSE is measured against (the target component's
    /// parameter, not the mixture's).
    pub target_param: Vec<f64>,
}

impl MCConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: MCConfig = toml::from_str(text).map_err(|e| Error::Config {
            detail: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |detail: &str| {
            Err(Error::Config {
                detail: detail.to_string(),
            })
        };
        if self.replications < 1 {
            return fail("replications must be >= 1");
        }
        if self.n < 2 {
            return fail("n must be >= 2");
        }
        if !(0.0..1.0).contains(&self.spec.epsilon) {
            return fail("epsilon must lie in [0, 1)");
        }
        match self.spec.model.as_str() {
            "normal" => {
                if self.spec.target.len() != 2 || (self.spec.epsilon > 0.0 && self.spec.contaminant.len() != 2) {
                    return fail("normal components need (mean, sd)");
                }
            }
            "poisson" => {
                if self.spec.target.len() != 1 || (self.spec.epsilon > 0.0 && self.spec.contaminant.len() != 1) {
                    return fail("poisson components need (rate)");
                }
            }
            other => {
                return Err(Error::Config {
                    detail: format!("unknown model family {other:?}"),
                })
            }
        }
        Ok(())
    }

    /// FNV-1a hash over a canonical rendering of every field; identifies the
    /// configuration in output metadata independent of TOML formatting.
    pub fn fingerprint(&self) -> u64 {
        let mut canon = String::new();
        canon.push_str(&self.spec.model);
        for v in self
            .spec
            .target
            .iter()
            .chain(&self.spec.contaminant)
            .chain([self.spec.epsilon].iter())
            .chain(self.target_param.iter())
        {
            canon.push_str(&format!("|{}", v.to_bits()));
        }
        canon.push_str(&format!("|{}|{}|{}", self.n, self.replications, self.seed));
        for [a, b] in &self.pairs {
            canon.push_str(&format!("|{}:{}", a.to_bits(), b.to_bits()));
        }
        fnv1a(canon.as_bytes())
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
