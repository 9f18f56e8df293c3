//! SINR terms and achievable rates under error-free SIC, unit noise power.
//!
//! Users are addressed as MU-(n, m): cluster `n`, SIC position `m`
//! (0-based) in the plan's current order.

use crate::power::{ClusterPlan, PowerPlan};
use crate::precoding::{beam_gains, BasebandPrecoder, EffectiveChannelSet};
use crate::scalar::Real;

/// Signal and interference powers of one user, with the resulting rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBreakdown<T: Real> {
    pub desired_power: T,
    pub intra_interference: T,
    pub inter_interference: T,
    pub rate_bps_hz: T,
    pub lower_bound_bps_hz: Option<T>,
}

/// `log2(1 + desired / (intra + inter + 1))`.
pub fn rate_from_terms<T: Real>(desired: T, intra: T, inter: T) -> T {
    (T::one() + desired / (intra + inter + T::one())).log2()
}

/// Borrowed view of a designed system for evaluating SINR terms.
#[derive(Debug, Clone, Copy)]
pub struct RateContext<'a, T: Real> {
    pub effective: &'a EffectiveChannelSet<T>,
    pub baseband: &'a BasebandPrecoder<T>,
    pub plan: &'a ClusterPlan,
    pub powers: &'a PowerPlan<T>,
}

impl<'a, T: Real> RateContext<'a, T> {
    fn user(&self, n: usize, m: usize) -> usize {
        self.plan.cluster(n)[m]
    }

    /// `|w* H F_RF f^ℓ|²` of MU-(n, m) for every beam `ℓ`.
    pub fn beam_gains(&self, n: usize, m: usize) -> Vec<T> {
        beam_gains(self.effective.row(self.user(n, m)), self.baseband)
    }

    /// `Σ_{k<m} P_{n,k} |c_n|²`.
    pub fn intra_interference(&self, n: usize, m: usize) -> T {
        let own = self.beam_gains(n, m)[n];
        self.powers.user_powers[n][..m]
            .iter()
            .fold(T::zero(), |acc, &p| acc + p * own)
    }

    /// `Σ_{ℓ≠n} Σ_q P_{ℓ,q} |c_ℓ|²`, accumulated in (cluster, user) order.
    pub fn inter_interference(&self, n: usize, m: usize) -> T {
        let gains = self.beam_gains(n, m);
        let mut total = T::zero();
        for (l, powers) in self.powers.user_powers.iter().enumerate() {
            if l == n {
                continue;
            }
            for &p in powers {
                total += p * gains[l];
            }
        }
        total
    }

    pub fn user_rate(&self, n: usize, m: usize) -> RateBreakdown<T> {
        let desired_power = self.powers.power(n, m) * self.beam_gains(n, m)[n];
        let intra_interference = self.intra_interference(n, m);
        let inter_interference = self.inter_interference(n, m);
        RateBreakdown {
            desired_power,
            intra_interference,
            inter_interference,
            rate_bps_hz: rate_from_terms(desired_power, intra_interference, inter_interference),
            lower_bound_bps_hz: None,
        }
    }

    /// Breakdowns for every user, indexed `[n][m]`.
    pub fn all_rates(&self) -> Vec<Vec<RateBreakdown<T>>> {
        (0..self.plan.num_clusters())
            .map(|n| (0..self.plan.cluster(n).len()).map(|m| self.user_rate(n, m)).collect())
            .collect()
    }

    pub fn sum_rate(&self) -> T {
        sum_rate(&self.all_rates())
    }
}

/// `Σ_n Σ_m R_{n,m}` in index order.
pub fn sum_rate<T: Real>(rates: &[Vec<RateBreakdown<T>>]) -> T {
    rates.iter().flatten().fold(T::zero(), |acc, r| acc + r.rate_bps_hz)
}
