//! The full design pipeline for one channel realisation, and per-user
//! evaluation of rate, correlation and bound.

use crate::bound::{
    eta_factor, hermitian_correlation, kernel_sum, lambda_max_s, lower_bound_rate, BoundComponents, BoundInputs,
    CorrelationReport,
};
use crate::channel::SinglePathChannel;
use crate::error::Result;
use crate::power::{allocate_power, reorder_by_effective_norm, ClusterPlan, PowerPlan};
use crate::precoding::{
    design_analog_stage, effective_channels, zero_forcing_precoder, AnalogCombiner, AnalogPrecoder, BasebandPrecoder,
    EffectiveChannelSet,
};
use crate::rate::{RateBreakdown, RateContext};
use crate::scalar::Real;

/// Analog stage, ZF baseband, SIC order and powers for one realisation.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignedSystem<T: Real> {
    pub channels: Vec<SinglePathChannel<T>>,
    /// Final plan: SIC order by effective norm, anchors from the path gains.
    pub plan: ClusterPlan,
    pub analog: AnalogPrecoder<T>,
    pub combiners: Vec<AnalogCombiner<T>>,
    pub effective: EffectiveChannelSet<T>,
    pub baseband: BasebandPrecoder<T>,
    pub powers: PowerPlan<T>,
}

/// Outcome for MU-(n, m).
#[derive(Debug, Clone, PartialEq)]
pub struct UserReport<T: Real> {
    pub user: usize,
    pub cluster: usize,
    pub position: usize,
    /// Correlation with the cluster anchor; one for the anchor itself and
    /// zero when the user's effective channel vanishes.
    pub rho: T,
    /// Rate terms; `lower_bound_bps_hz` is always set.
    pub breakdown: RateBreakdown<T>,
    /// Present when the bound formula was evaluated (non-anchor users past
    /// SIC position 0 with a nonzero effective channel).
    pub bound: Option<BoundComponents<T>>,
}

impl<T: Real> DesignedSystem<T> {
    /// Orders users by path gain, steers the beams at the anchors, builds the
    /// ZF stage, re-sorts SIC order by effective norm and splits the power.
    pub fn design(
        channels: Vec<SinglePathChannel<T>>,
        clusters: &[Vec<usize>],
        total_power: T,
        fractions: &[T],
    ) -> Result<Self> {
        let by_gain = ClusterPlan::by_gain(clusters, &channels)?;
        let (analog, combiners) = design_analog_stage(&channels, &by_gain)?;
        let effective = effective_channels(&channels, &analog, &combiners)?;
        let baseband = zero_forcing_precoder(&effective, &analog, by_gain.first_users(), &channels)?;
        let plan = reorder_by_effective_norm(&effective, &by_gain);
        let powers = allocate_power(&plan, total_power, fractions)?;
        Ok(Self {
            channels,
            plan,
            analog,
            combiners,
            effective,
            baseband,
            powers,
        })
    }

    pub fn rate_context(&self) -> RateContext<'_, T> {
        RateContext {
            effective: &self.effective,
            baseband: &self.baseband,
            plan: &self.plan,
            powers: &self.powers,
        }
    }

    /// Correlation of user `u` with its cluster's anchor.
    pub fn correlation(&self, u: usize) -> Result<CorrelationReport<T>> {
        let (n, _) = self
            .plan
            .position(u)
            .ok_or_else(|| crate::Error::Config(format!("user {u} is not in the plan")))?;
        let anchor = self.plan.first_users()[n];
        hermitian_correlation(self.effective.vector(u).view(), self.effective.vector(anchor).view())
    }

    /// Rate, correlation and bound for every user, indexed `[n][m]`.
    pub fn evaluate(&self) -> Result<Vec<Vec<UserReport<T>>>> {
        let ctx = self.rate_context();
        let eta = eta_factor(&self.analog)?;
        let anchors = self.plan.first_users();
        let anchor_aods = self.analog.anchor_aods();
        let t_bs = self.analog.num_antennas();
        let mut out = Vec::with_capacity(self.plan.num_clusters());
        for (n, cluster) in self.plan.assignments().iter().enumerate() {
            let lambda = lambda_max_s(&self.baseband, n)?;
            let kernel_first = kernel_sum(anchor_aods, anchor_aods[n], t_bs);
            let mut reports = Vec::with_capacity(cluster.len());
            for (m, &u) in cluster.iter().enumerate() {
                let mut breakdown = ctx.user_rate(n, m);
                let is_anchor = u == anchors[n];
                let vanished = !(self.effective.norm(u) > T::zero());
                let rho = if is_anchor {
                    T::one()
                } else if vanished {
                    T::zero()
                } else {
                    self.correlation(u)?.rho
                };
                let mut bound = None;
                let value = if is_anchor || m == 0 {
                    breakdown.rate_bps_hz
                } else if vanished {
                    T::zero()
                } else {
                    let ch = &self.channels[u];
                    let tt = T::lit((ch.bs_array.num_elements() * ch.mu_array.num_elements()) as f64);
                    let inputs = BoundInputs {
                        rho,
                        user_power: self.powers.power(n, m),
                        predecessor_power: self.powers.predecessor_power(n, m),
                        cluster_power: self.powers.cluster_power,
                        array_gain_sqr: tt * ch.beta().norm_sqr(),
                        eta,
                        lambda_max_s: lambda,
                        kernel_sum_first: kernel_first,
                        kernel_sum_user: kernel_sum(anchor_aods, ch.aod.normalized(), t_bs),
                    };
                    let (value, parts) = lower_bound_rate(&inputs)?;
                    bound = Some(parts);
                    value
                };
                breakdown.lower_bound_bps_hz = Some(value);
                reports.push(UserReport {
                    user: u,
                    cluster: n,
                    position: m,
                    rho,
                    breakdown,
                    bound,
                });
            }
            out.push(reports);
        }
        Ok(out)
    }
}
