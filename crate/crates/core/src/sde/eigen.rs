//! Euler–Maruyama integrators for the eigenvalue SDE, in plain and log
//! coordinates, with adaptive step halving.

use serde::{Deserialize, Serialize};

use crate::domain::{GaussianNoise, OrderedConfig, RandomSource, SdeParams, Trajectory};
use crate::error::{Error, Result};

/// Which coordinates the Euler scheme is applied in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    /// `x_i` directly.
    Eigen,
    /// `y_i = log x_i`; positivity is automatic.
    #[default]
    Log,
}

/// Bookkeeping for one call of a stepper.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    /// Smallest substep that was accepted.
    pub accepted_dt: f64,
    /// Number of accepted substeps.
    pub substeps: usize,
    /// Number of rejected proposals (each one triggers a halving).
    pub projections: usize,
}

/// Full drift `b_i = -(η/2) x_i + c + Σ_{j≠i} x_i x_j / (x_i - x_j)`.
pub(crate) fn eigen_drift(x: &[f64], eta: f64, c: f64, out: &mut [f64]) {
    for (o, &xi) in out.iter_mut().zip(x) {
        *o = -0.5 * eta * xi + c;
    }
    for i in 0..x.len() {
        let xi = x[i];
        for j in i + 1..x.len() {
            let t = xi * x[j] / (xi - x[j]);
            out[i] += t;
            out[j] -= t;
        }
    }
}

/// True if `new` keeps every gap above `safety` times the old one and stays
/// above the positivity floor.
pub(crate) fn acceptable(old: &[f64], new: &[f64], params: &SdeParams) -> bool {
    if new.iter().any(|v| !v.is_finite()) {
        return false;
    }
    let ordered = old
        .windows(2)
        .zip(new.windows(2))
        .all(|(o, n)| n[0] - n[1] > params.gap_safety * (o[0] - o[1]));
    ordered && new[new.len() - 1] > params.positivity_floor
}

/// Reusable integrator state. Buffers are allocated once per particle count.
#[derive(Debug, Clone)]
pub struct Stepper {
    integrator: Integrator,
    params: SdeParams,
    drift: Vec<f64>,
    noise: Vec<f64>,
    proposal: Vec<f64>,
}

impl Stepper {
    pub fn new(integrator: Integrator, params: SdeParams, n: usize) -> Self {
        Self { integrator, params, drift: vec![0.0; n], noise: vec![0.0; n], proposal: vec![0.0; n] }
    }

    pub fn params(&self) -> &SdeParams {
        &self.params
    }

    fn propose(&mut self, x: &[f64], h: f64) {
        let c = self.params.entrance_drift(x.len());
        eigen_drift(x, self.params.eta, c, &mut self.drift);
        let sq = h.sqrt();
        match self.integrator {
            Integrator::Eigen => {
                for i in 0..x.len() {
                    self.proposal[i] = x[i] + x[i] * sq * self.noise[i] + self.drift[i] * h;
                }
            }
            Integrator::Log => {
                for i in 0..x.len() {
                    let dy = sq * self.noise[i] + (self.drift[i] / x[i] - 0.5) * h;
                    self.proposal[i] = x[i] * dy.exp();
                }
            }
        }
    }

    /// Advances `x` in place by exactly `duration`, in substeps of at most
    /// `dt_max`. A rejected proposal halves the substep and draws fresh
    /// variates; after an acceptance the substep doubles back towards `dt_max`.
    pub fn advance<G: GaussianNoise + ?Sized>(
        &mut self,
        x: &mut [f64],
        duration: f64,
        noise: &mut G,
    ) -> Result<StepReport> {
        let dt_max = self.params.dt_max;
        let min_h = 1e-12 * dt_max;
        let mut report = StepReport { accepted_dt: f64::INFINITY, substeps: 0, projections: 0 };
        let mut t = 0.0;
        let mut h = dt_max.min(duration);
        while t < duration {
            let remaining = duration - t;
            let last = h >= remaining;
            let h_try = if last { remaining } else { h };
            noise.fill_standard_normal(&mut self.noise);
            self.propose(x, h_try);
            if acceptable(x, &self.proposal, &self.params) {
                x.copy_from_slice(&self.proposal);
                t = if last { duration } else { t + h_try };
                report.substeps += 1;
                report.accepted_dt = report.accepted_dt.min(h_try);
                h = (2.0 * h_try).min(dt_max);
            } else {
                report.projections += 1;
                h = 0.5 * h_try;
                if h < min_h {
                    return Err(Error::StepFailure { time: t, min_dt: h });
                }
            }
        }
        Ok(report)
    }
}

fn step_with<G: GaussianNoise + ?Sized>(
    integrator: Integrator,
    state: &OrderedConfig,
    params: &SdeParams,
    dt: f64,
    noise: &mut G,
) -> Result<(OrderedConfig, StepReport)> {
    params.validate()?;
    state.require_strict_interior()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Parameter(format!("dt = {dt} must be positive")));
    }
    let mut x = state.values().to_vec();
    let report = Stepper::new(integrator, *params, x.len()).advance(&mut x, dt, noise)?;
    Ok((OrderedConfig::from_sorted_unchecked(x), report))
}

/// One step of length `dt` of the eigenvalue SDE in `x` coordinates.
pub fn step_eigen_sde<G: GaussianNoise + ?Sized>(
    state: &OrderedConfig,
    params: &SdeParams,
    dt: f64,
    noise: &mut G,
) -> Result<(OrderedConfig, StepReport)> {
    step_with(Integrator::Eigen, state, params, dt, noise)
}

/// One step of length `dt` of the same dynamics in `log x` coordinates.
pub fn step_log_sde<G: GaussianNoise + ?Sized>(
    state: &OrderedConfig,
    params: &SdeParams,
    dt: f64,
    noise: &mut G,
) -> Result<(OrderedConfig, StepReport)> {
    step_with(Integrator::Log, state, params, dt, noise)
}

/// Simulates one path, saving the state at `0` and at every entry of `save_times`.
pub fn simulate(
    initial: &OrderedConfig,
    params: &SdeParams,
    horizon: f64,
    save_times: &[f64],
    source: RandomSource,
    integrator: Integrator,
) -> Result<Trajectory> {
    let mut rng = source.rng();
    let mut traj = simulate_with_noise(initial, params, horizon, save_times, &mut rng, integrator)?;
    traj.seed = source.master_seed;
    traj.stream = source.stream;
    Ok(traj)
}

/// [`simulate`] driven by an arbitrary noise source.
pub fn simulate_with_noise<G: GaussianNoise + ?Sized>(
    initial: &OrderedConfig,
    params: &SdeParams,
    horizon: f64,
    save_times: &[f64],
    noise: &mut G,
    integrator: Integrator,
) -> Result<Trajectory> {
    params.validate()?;
    initial.require_strict_interior()?;
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::Parameter(format!("horizon = {horizon} must be >= 0")));
    }
    if save_times.iter().any(|t| !(*t >= 0.0 && *t <= horizon)) {
        return Err(Error::Parameter("save times must lie in [0, horizon]".into()));
    }
    if save_times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Parameter("save times must be strictly increasing".into()));
    }
    let mut x = initial.values().to_vec();
    let mut stepper = Stepper::new(integrator, *params, x.len());
    let mut times = vec![0.0];
    let mut states = vec![initial.clone()];
    let mut t = 0.0;
    for &s in save_times.iter().filter(|s| **s > 0.0) {
        stepper.advance(&mut x, s - t, noise).map_err(|e| match e {
            Error::StepFailure { time, min_dt } => Error::StepFailure { time: t + time, min_dt },
            other => other,
        })?;
        t = s;
        times.push(s);
        states.push(OrderedConfig::from_sorted_unchecked(x.clone()));
    }
    Ok(Trajectory { times, states, seed: 0, stream: 0, params: *params })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{singular_drift, ZeroNoise};
    use proptest::prelude::*;

    /// Replays a fixed list of variates, cycling.
    struct FixedNoise(Vec<f64>, usize);

    impl GaussianNoise for FixedNoise {
        fn fill_standard_normal(&mut self, out: &mut [f64]) {
            for o in out {
                *o = self.0[self.1 % self.0.len()];
                self.1 += 1;
            }
        }
    }

    fn cfg(v: &[f64]) -> OrderedConfig {
        OrderedConfig::new(v.to_vec()).unwrap()
    }

    fn plain(dt_max: f64) -> SdeParams {
        SdeParams::default().with_dt_max(dt_max)
    }

    #[test]
    fn zero_noise_single_particle() {
        let (x, r) = step_eigen_sde(&cfg(&[1.0]), &plain(0.1), 0.1, &mut ZeroNoise).unwrap();
        assert!((x.values()[0] - 1.05).abs() < 1e-15);
        assert_eq!((r.substeps, r.projections), (1, 0));
    }

    #[test]
    fn zero_noise_pair_drift() {
        let dt = 1e-6;
        let (x, _) = step_eigen_sde(&cfg(&[2.0, 1.0]), &plain(dt), dt, &mut ZeroNoise).unwrap();
        assert!((x.values()[0] - (2.0 + 2.5 * dt)).abs() < 1e-15);
        assert!((x.values()[1] - (1.0 - 1.5 * dt)).abs() < 1e-15);
    }

    #[test]
    fn rescaled_single_particle_matches_plain() {
        let p = SdeParams { rescaled: true, ..plain(0.01) };
        let (a, _) = step_eigen_sde(&cfg(&[1.0]), &p, 0.01, &mut ZeroNoise).unwrap();
        let (b, _) = step_eigen_sde(&cfg(&[1.0]), &plain(0.01), 0.01, &mut ZeroNoise).unwrap();
        assert_eq!(a, b);
        assert!((a.values()[0] - 1.005).abs() < 1e-15);
    }

    #[test]
    fn log_step_examples() {
        let p = SdeParams { rescaled: true, ..plain(0.01) };
        let (x, _) = step_log_sde(&cfg(&[1.0]), &p, 0.01, &mut ZeroNoise).unwrap();
        assert_eq!(x.values()[0], 1.0);
        let (x, _) = step_log_sde(&cfg(&[2.0]), &p, 0.01, &mut ZeroNoise).unwrap();
        assert!((x.values()[0].ln() - 2f64.ln() - (-0.5 + 0.25) * 0.01).abs() < 1e-15);
    }

    #[test]
    fn drift_matches_singular_drift() {
        let x = cfg(&[5.0, 3.5, 1.2, 0.4]);
        let mut out = vec![0.0; 4];
        eigen_drift(x.values(), 0.7, 0.5, &mut out);
        for i in 0..4 {
            let want = -0.35 * x.values()[i] + 0.5 + singular_drift(i, &x).unwrap();
            assert!((out[i] - want).abs() < 1e-12);
        }
    }

    /// With antithetic unit variates the `O(dt)` Itô term cancels, leaving an
    /// `O(dt²)` gap between the two schemes.
    #[test]
    fn log_and_eigen_steps_agree_to_second_order() {
        let x = cfg(&[3.0, 2.0, 1.0]);
        let gap = |dt: f64| {
            let p = plain(dt);
            let mut acc = [0.0; 3];
            for s in [1.0, -1.0] {
                let (a, _) = step_eigen_sde(&x, &p, dt, &mut FixedNoise(vec![s], 0)).unwrap();
                let (b, _) = step_log_sde(&x, &p, dt, &mut FixedNoise(vec![s], 0)).unwrap();
                for i in 0..3 {
                    acc[i] += 0.5 * (b.values()[i] - a.values()[i]);
                }
            }
            acc.iter().map(|v| v.abs()).fold(0.0, f64::max)
        };
        let (g1, g2) = (gap(1e-4), gap(5e-5));
        assert!(g1 < 1e-6, "{g1}");
        let ratio = g1 / g2;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn rejected_steps_halve() {
        // A unit variate of -40 on the top particle would push it below the
        // second one for dt = 1e-2, so the first proposal must be rejected.
        let mut noise = FixedNoise(vec![-40.0, 0.0, 0.0, 0.0, 0.0, 0.0], 0);
        let x = cfg(&[1.1, 1.0, 0.5]);
        let (y, r) = step_eigen_sde(&x, &plain(1e-2), 1e-2, &mut noise).unwrap();
        assert!(r.projections >= 1);
        assert!(r.accepted_dt < 1e-2);
        assert!(y.is_strict_interior());
    }

    #[test]
    fn step_failure_is_reported() {
        let mut noise = FixedNoise(vec![-1e9], 0);
        let e = step_eigen_sde(&cfg(&[2.0, 1.0]), &plain(1e-3), 1e-3, &mut noise).unwrap_err();
        assert!(matches!(e, Error::StepFailure { .. }));
    }

    #[test]
    fn zero_noise_simulation_is_deterministic() {
        let x = cfg(&[3.0, 2.0, 1.0]);
        let p = plain(1e-3);
        let a = simulate_with_noise(&x, &p, 1.0, &[0.5, 1.0], &mut ZeroNoise, Integrator::Log).unwrap();
        let b = simulate_with_noise(&x, &p, 1.0, &[0.5, 1.0], &mut ZeroNoise, Integrator::Log).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.times, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn simulate_reproducible_and_ordered() {
        let x = cfg(&[3.0, 2.0, 1.0]);
        let p = plain(1e-3);
        let src = RandomSource::new(11, 2);
        let a = simulate(&x, &p, 1.0, &[0.0, 0.25, 1.0], src, Integrator::Eigen).unwrap();
        let b = simulate(&x, &p, 1.0, &[0.0, 0.25, 1.0], src, Integrator::Eigen).unwrap();
        assert_eq!(a, b);
        a.validate().unwrap();
        assert_eq!(a.times, vec![0.0, 0.25, 1.0]);
        assert!(a.states.iter().all(OrderedConfig::is_strict_interior));
        assert!(simulate(&x, &p, 1.0, &[0.5, 0.25], src, Integrator::Eigen).is_err());
        assert!(simulate(&x, &p, 1.0, &[2.0], src, Integrator::Eigen).is_err());
    }

    #[test]
    fn requires_interior_start() {
        assert!(step_eigen_sde(&cfg(&[1.0, 1.0]), &plain(1e-3), 1e-3, &mut ZeroNoise).is_err());
        assert!(step_log_sde(&cfg(&[1.0, 0.0]), &plain(1e-3), 1e-3, &mut ZeroNoise).is_err());
    }

    proptest! {
        /// Doubling the state doubles the diffusion part of an Euler update.
        #[test]
        fn diffusion_increment_scales(z in proptest::collection::vec(-2.0f64..2.0, 3)) {
            let x = cfg(&[3.0, 2.0, 1.0]);
            let x2 = x.scaled(2.0).unwrap();
            let p = plain(1e-6);
            let inc = |s: &OrderedConfig| {
                let (a, _) = step_eigen_sde(s, &p, 1e-6, &mut FixedNoise(z.clone(), 0)).unwrap();
                let (b, _) = step_eigen_sde(s, &p, 1e-6, &mut ZeroNoise).unwrap();
                a.values().iter().zip(b.values()).map(|(u, v)| u - v).collect::<Vec<_>>()
            };
            for (a, b) in inc(&x).iter().zip(inc(&x2)) {
                prop_assert!((2.0 * a - b).abs() <= 1e-13);
            }
        }

        #[test]
        fn steps_stay_interior(seed in 0u64..1000, eta in -0.5f64..3.0) {
            let x = cfg(&[2.0, 1.9, 0.3, 0.01]);
            let p = SdeParams::default().with_eta(eta);
            let mut rng = RandomSource::new(seed, 0).rng();
            for integ in [Integrator::Eigen, Integrator::Log] {
                let (y, r) = step_with(integ, &x, &p, 0.05, &mut rng).unwrap();
                prop_assert!(y.is_strict_interior());
                prop_assert!(r.accepted_dt <= p.dt_max && r.substeps >= 1);
            }
        }
    }
}
