//! Scenario files.
//!
//! A scenario is a TOML document. Top-level keys describe the arrays, the
//! SNR points and the Monte Carlo settings; every `[[cluster]]` table holds
//! one `[[cluster.user]]` table per user. Unknown keys are rejected.
//!
//! ```toml
//! bs_antennas = 16          # T_BS, BS ULA elements
//! mu_antennas = 4           # T_MU, user ULA elements
//! spacing_ratio = 0.5       # d / lambda (default 0.5)
//! rf_chains = 2             # optional; must be >= number of clusters
//! snr_db = [0.0, 5.0]       # one value or a list; P_t = 10^(snr/10), unit noise
//! intra_fractions = [0.25, 0.75]  # optional; default 2*3^(m-1)/(3^M-1)
//! seed = 7                  # default 0
//! trials = 1000             # default 1000
//!
//! [[cluster]]
//! [[cluster.user]]
//! aod_deg = 60.0            # degrees in [-90, 90] or "random"
//! aoa_deg = "random"        # default "random"
//! large_scale_db = 0.0      # default 0
//! gain = [1.0, 0.0]         # optional fixed small-scale gain (re, im)
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// An angle in degrees, or a uniform draw over `[-90°, 90°]` per trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AngleField {
    Degrees(f64),
    Keyword(Keyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Keyword {
    #[serde(rename = "random")]
    Random,
}

impl AngleField {
    pub const RANDOM: AngleField = AngleField::Keyword(Keyword::Random);

    pub fn fixed(&self) -> Option<f64> {
        match self {
            AngleField::Degrees(d) => Some(*d),
            AngleField::Keyword(_) => None,
        }
    }
}

impl Default for AngleField {
    fn default() -> Self {
        Self::RANDOM
    }
}

/// One SNR value or several.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SnrSpec {
    One(f64),
    Many(Vec<f64>),
}

impl SnrSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            SnrSpec::One(v) => vec![*v],
            SnrSpec::Many(v) => v.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserSpec {
    pub aod_deg: AngleField,
    #[serde(default)]
    pub aoa_deg: AngleField,
    #[serde(default)]
    pub large_scale_db: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain: Option<[f64; 2]>,
}

impl UserSpec {
    pub fn fixed(aod_deg: f64, large_scale_db: f64) -> Self {
        Self {
            aod_deg: AngleField::Degrees(aod_deg),
            aoa_deg: AngleField::RANDOM,
            large_scale_db,
            gain: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterSpec {
    #[serde(rename = "user")]
    pub users: Vec<UserSpec>,
}

fn default_spacing() -> f64 {
    0.5
}

fn default_trials() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub bs_antennas: usize,
    pub mu_antennas: usize,
    #[serde(default = "default_spacing")]
    pub spacing_ratio: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rf_chains: Option<usize>,
    pub snr_db: SnrSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intra_fractions: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(rename = "cluster")]
    pub clusters: Vec<ClusterSpec>,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            HarnessError::Config(msg) => HarnessError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("scenario serialises to TOML")
    }

    pub fn num_clusters(&self) -> usize {
        self.clusters.len()
    }

    pub fn users_per_cluster(&self) -> usize {
        self.clusters.first().map_or(0, |c| c.users.len())
    }

    pub fn snr_values(&self) -> Vec<f64> {
        self.snr_db.values()
    }

    /// Configured fractions, or the geometric default.
    pub fn fractions(&self) -> Vec<f64> {
        self.intra_fractions
            .clone()
            .unwrap_or_else(|| hbnoma_core::default_fractions(self.users_per_cluster()))
    }

    pub fn user(&self, n: usize, m: usize) -> Option<&UserSpec> {
        self.clusters.get(n).and_then(|c| c.users.get(m))
    }

    pub fn user_mut(&mut self, n: usize, m: usize) -> Option<&mut UserSpec> {
        self.clusters.get_mut(n).and_then(|c| c.users.get_mut(m))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.bs_antennas == 0 || self.mu_antennas == 0 {
            return bad("bs_antennas and mu_antennas must be at least 1".into());
        }
        if !(self.spacing_ratio > 0.0) || !self.spacing_ratio.is_finite() {
            return bad(format!("spacing_ratio must be positive, got {}", self.spacing_ratio));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        let n = self.num_clusters();
        if n == 0 {
            return bad("at least one [[cluster]] is required".into());
        }
        if let Some(rf) = self.rf_chains {
            if n > rf {
                return bad(format!("{n} clusters need {n} RF chains but rf_chains = {rf}"));
            }
        }
        if n > self.bs_antennas {
            return bad(format!(
                "{n} clusters cannot be separated by {} BS antennas",
                self.bs_antennas
            ));
        }
        let m = self.users_per_cluster();
        if m == 0 {
            return bad("cluster 1 has no users".into());
        }
        if let Some((i, c)) = self.clusters.iter().enumerate().find(|(_, c)| c.users.len() != m) {
            return bad(format!(
                "every cluster must hold the same number of users: cluster 1 has {m}, cluster {} has {}",
                i + 1,
                c.users.len()
            ));
        }
        let snr = self.snr_values();
        if snr.is_empty() || snr.iter().any(|s| !s.is_finite()) {
            return bad("snr_db must be a finite value or a nonempty list of finite values".into());
        }
        hbnoma_core::validate_fractions(&self.fractions()).map_err(HarnessError::from)?;
        if self.fractions().len() != m {
            return bad(format!(
                "{} intra_fractions given for {m} users per cluster",
                self.fractions().len()
            ));
        }
        for (ci, c) in self.clusters.iter().enumerate() {
            for (ui, u) in c.users.iter().enumerate() {
                let who = format!("cluster {} user {}", ci + 1, ui + 1);
                for (name, angle) in [("aod_deg", u.aod_deg), ("aoa_deg", u.aoa_deg)] {
                    if let Some(d) = angle.fixed() {
                        if !(-90.0..=90.0).contains(&d) {
                            return bad(format!("{who}: {name} = {d} outside [-90, 90]"));
                        }
                    }
                }
                if !u.large_scale_db.is_finite() {
                    return bad(format!("{who}: large_scale_db must be finite"));
                }
                if let Some(g) = u.gain {
                    if !g.iter().all(|x| x.is_finite()) || g == [0.0, 0.0] {
                        return bad(format!("{who}: fixed gain must be finite and nonzero"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Two clusters of two users, 16-element BS and 4-element user arrays,
    /// first users at 0 dB and second users at -10 dB.
    ///
    /// Cluster 1 is anchored at 60°, cluster 2 at 20° with its second user at
    /// 10°. The swept user is MU-(1,2).
    pub fn fig2_preset() -> Self {
        Self {
            bs_antennas: 16,
            mu_antennas: 4,
            spacing_ratio: 0.5,
            rf_chains: None,
            snr_db: SnrSpec::Many(vec![0.0, 5.0]),
            intra_fractions: Some(vec![0.25, 0.75]),
            seed: 0,
            trials: 1000,
            clusters: vec![
                ClusterSpec {
                    users: vec![UserSpec::fixed(60.0, 0.0), UserSpec::fixed(50.0, -10.0)],
                },
                ClusterSpec {
                    users: vec![UserSpec::fixed(20.0, 0.0), UserSpec::fixed(10.0, -10.0)],
                },
            ],
        }
    }

    /// Three clusters anchored at 0°, -40° and 40° with unit gains; the swept
    /// user is MU-(1,2).
    pub fn fig3_preset() -> Self {
        let unit = |aod: f64, db: f64| UserSpec {
            aod_deg: AngleField::Degrees(aod),
            aoa_deg: AngleField::Degrees(0.0),
            large_scale_db: db,
            gain: Some([1.0, 0.0]),
        };
        Self {
            bs_antennas: 16,
            mu_antennas: 4,
            spacing_ratio: 0.5,
            rf_chains: None,
            snr_db: SnrSpec::One(5.0),
            intra_fractions: Some(vec![0.25, 0.75]),
            seed: 0,
            trials: 1,
            clusters: vec![
                ClusterSpec {
                    users: vec![unit(0.0, 0.0), unit(0.0, -10.0)],
                },
                ClusterSpec {
                    users: vec![unit(-40.0, 0.0), unit(-30.0, -10.0)],
                },
                ClusterSpec {
                    users: vec![unit(40.0, 0.0), unit(30.0, -10.0)],
                },
            ],
        }
    }
}
