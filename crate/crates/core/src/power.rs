//! User ordering inside clusters and the fixed two-stage power split.

use std::cmp::Ordering;

use crate::channel::SinglePathChannel;
use crate::error::{Error, Result};
use crate::precoding::EffectiveChannelSet;
use crate::scalar::Real;

/// Quantity a cluster's SIC order is sorted by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderingBasis {
    LargeScaleGain,
    EffectiveNorm,
}

/// Cluster membership in SIC order, plus the anchor that steers each beam.
///
/// The anchor is chosen once from the path gains and never changes. The SIC
/// order is re-sorted by effective-channel norm after the analog stage, which
/// can in principle move the anchor away from position 0; such clusters are
/// listed by [`ClusterPlan::demoted_anchors`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterPlan {
    assignments: Vec<Vec<usize>>,
    first_user: Vec<usize>,
    basis: OrderingBasis,
}

impl ClusterPlan {
    /// Orders every cluster by `|β|` and takes the strongest user as anchor.
    ///
    /// `clusters` lists user indices into `channels`. Each user must appear
    /// in exactly one cluster and no cluster may be empty.
    pub fn by_gain<T: Real>(clusters: &[Vec<usize>], channels: &[SinglePathChannel<T>]) -> Result<Self> {
        let gains: Vec<T> = channels.iter().map(|c| c.gain.magnitude()).collect();
        Self::from_gains(clusters, &gains)
    }

    /// As [`ClusterPlan::by_gain`] with `gains[u]` standing in for `|β_u|`.
    pub fn from_gains<T: Real>(clusters: &[Vec<usize>], gains: &[T]) -> Result<Self> {
        if clusters.is_empty() {
            return Err(Error::Config("at least one cluster is required".into()));
        }
        let mut seen = vec![false; gains.len()];
        for (n, cluster) in clusters.iter().enumerate() {
            if cluster.is_empty() {
                return Err(Error::Config(format!("cluster {n} has no users")));
            }
            for &u in cluster {
                match seen.get_mut(u) {
                    None => {
                        return Err(Error::Config(format!(
                            "cluster {n} references user {u}, but only {} users exist",
                            gains.len()
                        )))
                    }
                    Some(true) => return Err(Error::Config(format!("user {u} appears in more than one cluster slot"))),
                    Some(flag) => *flag = true,
                }
            }
        }
        if let Some(u) = seen.iter().position(|&s| !s) {
            return Err(Error::Config(format!("user {u} is not assigned to any cluster")));
        }
        let assignments: Vec<Vec<usize>> = clusters
            .iter()
            .map(|c| {
                let g: Vec<T> = c.iter().map(|&u| gains[u]).collect();
                order_by_gain(c, &g)
            })
            .collect();
        let first_user = assignments.iter().map(|c| c[0]).collect();
        Ok(Self {
            assignments,
            first_user,
            basis: OrderingBasis::LargeScaleGain,
        })
    }

    /// SIC order of every cluster: `assignments()[n][m]` is MU-(n, m).
    pub fn assignments(&self) -> &[Vec<usize>] {
        &self.assignments
    }

    pub fn cluster(&self, n: usize) -> &[usize] {
        &self.assignments[n]
    }

    /// Beam anchor of every cluster.
    pub fn first_users(&self) -> &[usize] {
        &self.first_user
    }

    pub fn basis(&self) -> OrderingBasis {
        self.basis
    }

    pub fn num_clusters(&self) -> usize {
        self.assignments.len()
    }

    pub fn num_users(&self) -> usize {
        self.assignments.iter().map(Vec::len).sum()
    }

    /// `(cluster, SIC position)` of user `u`.
    pub fn position(&self, u: usize) -> Option<(usize, usize)> {
        self.assignments
            .iter()
            .enumerate()
            .find_map(|(n, c)| c.iter().position(|&x| x == u).map(|m| (n, m)))
    }

    /// Clusters whose anchor is no longer first in SIC order.
    pub fn demoted_anchors(&self) -> Vec<usize> {
        self.assignments
            .iter()
            .zip(&self.first_user)
            .enumerate()
            .filter(|(_, (c, &a))| c[0] != a)
            .map(|(n, _)| n)
            .collect()
    }
}

fn descending_then_id<T: Real>(a: (usize, T), b: (usize, T)) -> Ordering {
    b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then(a.0.cmp(&b.0))
}

/// Sorts `ids` by descending `gains` (parallel slice), ties by ascending id.
pub fn order_by_gain<T: Real>(ids: &[usize], gains: &[T]) -> Vec<usize> {
    assert_eq!(ids.len(), gains.len(), "one gain per user");
    let mut pairs: Vec<(usize, T)> = ids.iter().copied().zip(gains.iter().copied()).collect();
    pairs.sort_by(|&a, &b| descending_then_id(a, b));
    pairs.into_iter().map(|(u, _)| u).collect()
}

/// Re-sorts each cluster by descending `‖h̄‖`; anchors are kept as they are.
pub fn reorder_by_effective_norm<T: Real>(effective: &EffectiveChannelSet<T>, plan: &ClusterPlan) -> ClusterPlan {
    let assignments = plan
        .assignments
        .iter()
        .map(|c| {
            let norms: Vec<T> = c.iter().map(|&u| effective.norm(u)).collect();
            order_by_gain(c, &norms)
        })
        .collect();
    ClusterPlan {
        assignments,
        first_user: plan.first_user.clone(),
        basis: OrderingBasis::EffectiveNorm,
    }
}

/// Geometric split with ratio 3: `2·3^(m-1) / (3^M - 1)`.
pub fn default_fractions<T: Real>(users_per_cluster: usize) -> Vec<T> {
    let total = 3f64.powi(users_per_cluster as i32) - 1.0;
    (0..users_per_cluster)
        .map(|m| T::lit(2.0 * 3f64.powi(m as i32) / total))
        .collect()
}

/// Per-user transmit powers aligned with a [`ClusterPlan`]'s SIC order.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerPlan<T: Real> {
    pub total_power: T,
    pub cluster_power: T,
    /// `user_powers[n][m]` is `P_{n,m}`.
    pub user_powers: Vec<Vec<T>>,
}

impl<T: Real> PowerPlan<T> {
    pub fn power(&self, n: usize, m: usize) -> T {
        self.user_powers[n][m]
    }

    /// `Σ_{k<m} P_{n,k}`.
    pub fn predecessor_power(&self, n: usize, m: usize) -> T {
        self.user_powers[n][..m].iter().copied().sum()
    }

    pub fn cluster_total(&self, n: usize) -> T {
        self.user_powers[n].iter().copied().sum()
    }
}

/// Checks that `fractions` are positive, nondecreasing and sum to one.
pub fn validate_fractions<T: Real>(fractions: &[T]) -> Result<()> {
    if fractions.is_empty() {
        return Err(Error::Config("power fractions are empty".into()));
    }
    if let Some(f) = fractions.iter().find(|f| !(**f > T::zero()) || !f.is_finite()) {
        return Err(Error::Config(format!("power fraction {f} is not positive")));
    }
    if fractions.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Config(
            "power fractions must be nondecreasing in SIC order".into(),
        ));
    }
    let sum: T = fractions.iter().copied().sum();
    let tolerance = T::lit(1e-9).max(T::epsilon() * T::lit(16.0 * fractions.len() as f64));
    if (sum - T::one()).abs() > tolerance {
        return Err(Error::Config(format!("power fractions sum to {sum}, not 1")));
    }
    Ok(())
}

/// `P_c = P_t / N` per cluster and `P_{n,m} = fractions[m] · P_c`.
pub fn allocate_power<T: Real>(plan: &ClusterPlan, total_power: T, fractions: &[T]) -> Result<PowerPlan<T>> {
    if !(total_power > T::zero()) || !total_power.is_finite() {
        return Err(Error::Config(format!(
            "total power must be positive and finite, got {total_power}"
        )));
    }
    validate_fractions(fractions)?;
    if let Some((n, c)) = plan
        .assignments()
        .iter()
        .enumerate()
        .find(|(_, c)| c.len() != fractions.len())
    {
        return Err(Error::Config(format!(
            "cluster {n} has {} users but {} power fractions were given",
            c.len(),
            fractions.len()
        )));
    }
    let cluster_power = total_power / T::lit(plan.num_clusters() as f64);
    let user_powers = plan
        .assignments()
        .iter()
        .map(|_| fractions.iter().map(|&f| f * cluster_power).collect())
        .collect();
    Ok(PowerPlan {
        total_power,
        cluster_power,
        user_powers,
    })
}
