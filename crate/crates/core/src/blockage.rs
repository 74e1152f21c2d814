//! Blockage of the direct link modelled as an M/M/∞ queue of obstacles.
//!
//! The link is non-LoS while at least one obstacle is present (a busy
//! period, `X`) and LoS otherwise (an idle period, `Y`). A virtual time slot
//! runs from one 0→1 transition of the obstacle count to the next, so
//! `T = X + Y`.
//!
//! Closed forms: `E[X] = (e^{λ/ν} - 1)/λ`, `E[Y] = 1/λ`.
//!
//! [`BlockageSimulator`] draws the same periods from an event-driven
//! simulation and is used as the independent check of those closed forms.
//! It uses ChaCha8 seeded through `SeedableRng::seed_from_u64`, with the
//! stream number selecting independent substreams, so samples are identical
//! across platforms for a given `(seed, stream)`.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};
use crate::scenario::ObstacleProcess;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockageStats {
    pub mean_nonlos_s: f64,
    pub mean_los_s: f64,
    pub mean_slot_s: f64,
    /// `E[X] / E[T]`.
    pub blockage_fraction: f64,
}

impl BlockageStats {
    /// Stats from directly specified mean period lengths.
    pub fn from_means(mean_nonlos_s: f64, mean_los_s: f64) -> Self {
        let mean_slot_s = mean_nonlos_s + mean_los_s;
        BlockageStats {
            mean_nonlos_s,
            mean_los_s,
            mean_slot_s,
            blockage_fraction: mean_nonlos_s / mean_slot_s,
        }
    }
}

/// Mean non-LoS (busy) period, `(e^{λ/ν} - 1)/λ`.
pub fn expected_nonlos(proc: &ObstacleProcess) -> f64 {
    proc.load().exp_m1() / proc.lambda_per_s
}

/// Mean LoS (idle) period, `1/λ`.
pub fn expected_los(proc: &ObstacleProcess) -> f64 {
    1.0 / proc.lambda_per_s
}

pub fn blockage_stats(proc: &ObstacleProcess) -> BlockageStats {
    BlockageStats::from_means(expected_nonlos(proc), expected_los(proc))
}

/// Departure rate that yields `fraction = E[X]/E[T]` at arrival rate `lambda`.
///
/// The fraction map simplifies to `1 - e^{-λ/ν}`, which inverts in closed form.
/// Returns `None` unless `0 < fraction < 1`.
pub fn nu_for_blockage_fraction(lambda_per_s: f64, fraction: f64) -> Option<f64> {
    if !(fraction > 0.0 && fraction < 1.0) || !(lambda_per_s > 0.0) {
        return None;
    }
    let load = -(-fraction).ln_1p();
    let nu = lambda_per_s / load;
    nu.is_finite().then_some(nu)
}

/// Sampled non-LoS / LoS period pairs, one per virtual time slot.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodSamples {
    pub nonlos_s: Vec<f64>,
    pub los_s: Vec<f64>,
    pub seed: u64,
    pub n_slots: usize,
}

impl PeriodSamples {
    pub fn mean_nonlos(&self) -> f64 {
        mean(&self.nonlos_s)
    }

    pub fn mean_los(&self) -> f64 {
        mean(&self.los_s)
    }

    pub fn slot_durations(&self) -> impl Iterator<Item = f64> + '_ {
        self.nonlos_s.iter().zip(&self.los_s).map(|(x, y)| x + y)
    }

    pub fn mean_slot(&self) -> f64 {
        self.slot_durations().sum::<f64>() / self.n_slots as f64
    }

    pub fn min_slot(&self) -> f64 {
        self.slot_durations().fold(f64::INFINITY, f64::min)
    }

    /// Long-run fraction of time spent non-LoS, `ΣX / ΣT`.
    pub fn busy_fraction(&self) -> f64 {
        let busy: f64 = self.nonlos_s.iter().sum();
        let idle: f64 = self.los_s.iter().sum();
        busy / (busy + idle)
    }

    /// Per-slot average of `X_i / T_i`.
    pub fn mean_of_ratios(&self) -> f64 {
        self.nonlos_s
            .iter()
            .zip(&self.los_s)
            .map(|(x, y)| x / (x + y))
            .sum::<f64>()
            / self.n_slots as f64
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Draws obstacle sojourn times.
pub trait SojournSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64;
}

#[derive(Debug, Clone, Copy)]
pub struct ExponentialSojourn(Exp<f64>);

impl ExponentialSojourn {
    pub fn new(nu_per_s: f64) -> Result<Self> {
        Exp::new(nu_per_s)
            .map(ExponentialSojourn)
            .map_err(|_| Error::invalid("obstacles.nu_per_s", "must be positive"))
    }
}

impl SojournSampler for ExponentialSojourn {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.0.sample(rng)
    }
}

/// Output of one simulation run, with the extra accounting used by health checks.
#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub samples: PeriodSamples,
    /// Sojourn of the obstacle that opened each non-LoS period.
    pub opener_sojourn_s: Vec<f64>,
    /// Time from the first 0→1 transition to the end of the last LoS period.
    pub observed_time_s: f64,
    /// Integral of the obstacle count over each slot.
    pub occupancy_s: Vec<f64>,
}

impl SimulationRun {
    /// Time-averaged number of obstacles present.
    pub fn mean_occupancy(&self) -> f64 {
        self.occupancy_s.iter().sum::<f64>() / self.observed_time_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct EventTime(f64);

impl Eq for EventTime {}

impl PartialOrd for EventTime {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EventTime {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Event-driven M/G/∞ obstacle simulator with Poisson arrivals.
#[derive(Debug, Clone)]
pub struct BlockageSimulator<S = ExponentialSojourn> {
    arrivals: Exp<f64>,
    sojourn: S,
}

impl BlockageSimulator<ExponentialSojourn> {
    pub fn exponential(proc: &ObstacleProcess) -> Result<Self> {
        proc.validate()?;
        Self::with_sojourn(proc.lambda_per_s, ExponentialSojourn::new(proc.nu_per_s)?)
    }
}

impl<S: SojournSampler> BlockageSimulator<S> {
    pub fn with_sojourn(lambda_per_s: f64, sojourn: S) -> Result<Self> {
        let arrivals =
            Exp::new(lambda_per_s).map_err(|_| Error::invalid("obstacles.lambda_per_s", "must be positive"))?;
        Ok(BlockageSimulator { arrivals, sojourn })
    }

    /// Simulates until `n_slots` complete (X, Y) pairs have been observed.
    ///
    /// The system starts empty at t = 0; the first slot opens with the first
    /// arrival and each slot closes at the arrival that ends its LoS period.
    pub fn run(&self, n_slots: usize, seed: u64, stream: u64) -> Result<SimulationRun> {
        if n_slots == 0 {
            return Err(Error::NoSlots);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);

        let mut nonlos = Vec::with_capacity(n_slots);
        let mut los = Vec::with_capacity(n_slots);
        let mut openers = Vec::with_capacity(n_slots);
        let mut occupancy_s = Vec::with_capacity(n_slots);
        let mut departures: BinaryHeap<Reverse<EventTime>> = BinaryHeap::new();

        let mut now = 0.0;
        let mut occupancy = 0.0;
        let mut first_start = None;
        let mut slot_start = 0.0;
        let mut busy_end = 0.0;
        let mut next_arrival = self.arrivals.sample(&mut rng);

        loop {
            match departures.peek() {
                Some(&Reverse(EventTime(t))) if t < next_arrival => {
                    occupancy += departures.len() as f64 * (t - now);
                    now = t;
                    departures.pop();
                    if departures.is_empty() {
                        busy_end = now;
                    }
                }
                _ => {
                    occupancy += departures.len() as f64 * (next_arrival - now);
                    now = next_arrival;
                    let sojourn = self.sojourn.sample(&mut rng);
                    if departures.is_empty() {
                        if first_start.is_some() {
                            nonlos.push(busy_end - slot_start);
                            los.push(now - busy_end);
                            occupancy_s.push(occupancy);
                            occupancy = 0.0;
                            if nonlos.len() == n_slots {
                                break;
                            }
                        } else {
                            first_start = Some(now);
                        }
                        slot_start = now;
                        openers.push(sojourn);
                    }
                    departures.push(Reverse(EventTime(now + sojourn)));
                    next_arrival = now + self.arrivals.sample(&mut rng);
                }
            }
        }

        openers.truncate(n_slots);
        let observed_time_s = now - first_start.unwrap_or(0.0);
        Ok(SimulationRun {
            samples: PeriodSamples {
                nonlos_s: nonlos,
                los_s: los,
                seed,
                n_slots,
            },
            opener_sojourn_s: openers,
            observed_time_s,
            occupancy_s,
        })
    }
}

/// Samples `n_slots` (X, Y) pairs of the exponential-sojourn obstacle queue.
pub fn simulate_periods(proc: &ObstacleProcess, n_slots: usize, seed: u64) -> Result<PeriodSamples> {
    Ok(BlockageSimulator::exponential(proc)?.run(n_slots, seed, 0)?.samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert, prop_assert_eq, prop_assume, proptest};

    fn proc(lambda: f64, nu: f64) -> ObstacleProcess {
        ObstacleProcess::new(lambda, nu).unwrap()
    }

    #[test]
    fn closed_form_means() {
        assert!((expected_nonlos(&proc(0.5, 0.5)) - 2.0 * (1f64.exp() - 1.0)).abs() < 1e-12);
        assert!((expected_nonlos(&proc(0.5, 0.5)) - 3.4366).abs() < 1e-4);
        assert!((expected_nonlos(&proc(0.5, 1.0)) - 1.2974).abs() < 1e-4);
        assert_eq!(expected_los(&proc(0.5, 1.0)), 2.0);
        assert_eq!(expected_los(&proc(1.0, 1.0)), 1.0);
        assert_eq!(expected_los(&proc(2.0, 1.0)), 0.5);
    }

    #[test]
    fn light_load_busy_period_is_one_service_time() {
        let nu = 3.0;
        let x = expected_nonlos(&proc(1e-9, nu));
        assert!((x * nu - 1.0).abs() < 1e-6);
    }

    #[test]
    fn blockage_fraction_values() {
        let s = blockage_stats(&proc(0.5, 0.5));
        assert!((s.blockage_fraction - 0.6321).abs() < 1e-4);
        assert_eq!(s.mean_slot_s, s.mean_nonlos_s + s.mean_los_s);
        assert!((blockage_stats(&proc(0.5, 1.0)).blockage_fraction - 0.3935).abs() < 1e-4);
        assert!(blockage_stats(&proc(0.5, 1e9)).blockage_fraction < 1e-8);
    }

    #[test]
    fn nu_inversion_matches_bisection() {
        let lambda = 0.5;
        for f in [0.05, 0.3, 0.5, 0.8, 0.95] {
            let nu = nu_for_blockage_fraction(lambda, f).unwrap();
            // bisection on the monotone (decreasing in nu) fraction map
            let (mut lo, mut hi): (f64, f64) = (1e-6, 1e6);
            for _ in 0..200 {
                let mid = (lo * hi).sqrt();
                if blockage_stats(&proc(lambda, mid)).blockage_fraction > f {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            assert!((nu - lo).abs() <= 1e-9 * nu, "f={f}: {nu} vs {lo}");
        }
        assert!(nu_for_blockage_fraction(lambda, 0.0).is_none());
        assert!(nu_for_blockage_fraction(lambda, 1.0).is_none());
    }

    #[test]
    fn zero_slots_rejected() {
        assert!(matches!(simulate_periods(&proc(0.5, 0.5), 0, 1), Err(Error::NoSlots)));
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let a = simulate_periods(&proc(0.5, 0.5), 2000, 99).unwrap();
        let b = simulate_periods(&proc(0.5, 0.5), 2000, 99).unwrap();
        assert_eq!(a, b);
        let c = simulate_periods(&proc(0.5, 0.5), 2000, 100).unwrap();
        assert_ne!(a.nonlos_s, c.nonlos_s);
    }

    #[test]
    fn streams_are_independent() {
        let sim = BlockageSimulator::exponential(&proc(0.5, 0.5)).unwrap();
        let a = sim.run(100, 7, 0).unwrap();
        let b = sim.run(100, 7, 1).unwrap();
        assert_ne!(a.samples.nonlos_s, b.samples.nonlos_s);
    }

    #[test]
    fn sample_shapes_and_busy_period_lower_bound() {
        let run = BlockageSimulator::exponential(&proc(0.5, 0.75))
            .unwrap()
            .run(5000, 3, 0)
            .unwrap();
        let s = &run.samples;
        assert_eq!(s.nonlos_s.len(), 5000);
        assert_eq!(s.los_s.len(), 5000);
        assert_eq!(run.opener_sojourn_s.len(), 5000);
        assert!(s.nonlos_s.iter().chain(&s.los_s).all(|&v| v > 0.0));
        for (x, opener) in s.nonlos_s.iter().zip(&run.opener_sojourn_s) {
            assert!(x + 1e-9 >= *opener);
        }
        let total: f64 = s.slot_durations().sum();
        assert!((total - run.observed_time_s).abs() < 1e-6 * total);
    }

    #[test]
    fn idle_periods_are_exponential_ks() {
        let lambda = 0.5;
        let s = simulate_periods(&proc(lambda, 0.5), 10_000, 11).unwrap();
        let mut y = s.los_s.clone();
        y.sort_by(f64::total_cmp);
        let n = y.len() as f64;
        let d = y
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let cdf = 1.0 - (-lambda * v).exp();
                (cdf - i as f64 / n).abs().max(((i + 1) as f64 / n - cdf).abs())
            })
            .fold(0.0, f64::max);
        // Kolmogorov-Smirnov critical value at the 1% level
        let critical = 1.628 / n.sqrt();
        assert!(d < critical, "D = {d}, critical = {critical}");
    }

    #[test]
    fn simulated_means_track_closed_forms() {
        let p = proc(0.5, 0.5);
        let run = BlockageSimulator::exponential(&p)
            .unwrap()
            .run(100_000, 2024, 0)
            .unwrap();
        let s = &run.samples;
        let stats = blockage_stats(&p);
        assert!((s.mean_nonlos() / stats.mean_nonlos_s - 1.0).abs() < 0.02);
        assert!((s.mean_los() / stats.mean_los_s - 1.0).abs() < 0.02);
        assert!((s.busy_fraction() / stats.blockage_fraction - 1.0).abs() < 0.02);
        assert!((run.mean_occupancy() / p.load() - 1.0).abs() < 0.02);
    }

    /// Sojourn sampler that always returns the same value, for M/D/∞ runs.
    struct Fixed(f64);

    impl SojournSampler for Fixed {
        fn sample<R: Rng + ?Sized>(&self, _rng: &mut R) -> f64 {
            self.0
        }
    }

    #[test]
    fn pluggable_sojourn_sampler() {
        // deterministic sojourns: busy period still has mean (e^{λd} - 1)/λ
        let lambda = 0.5;
        let d = 2.0;
        let run = BlockageSimulator::with_sojourn(lambda, Fixed(d))
            .unwrap()
            .run(50_000, 5, 0)
            .unwrap();
        let expected = (lambda * d).exp_m1() / lambda;
        assert!((run.samples.mean_nonlos() / expected - 1.0).abs() < 0.03);
        assert!(run.samples.nonlos_s.iter().all(|&x| x >= d - 1e-12));
    }

    proptest! {
        #[test]
        fn fraction_inversion_roundtrip(lambda in 0.01f64..10.0, f in 0.001f64..0.999) {
            let nu = nu_for_blockage_fraction(lambda, f).unwrap();
            let back = blockage_stats(&proc(lambda, nu)).blockage_fraction;
            prop_assert!((back - f).abs() < 1e-9);
        }

        #[test]
        fn stats_are_consistent(lambda in 0.01f64..10.0, nu in 0.01f64..10.0) {
            prop_assume!(lambda / nu < 30.0);
            let s = blockage_stats(&proc(lambda, nu));
            prop_assert!(s.mean_nonlos_s > 0.0 && s.mean_los_s > 0.0);
            prop_assert!(s.blockage_fraction > 0.0 && s.blockage_fraction < 1.0);
            prop_assert_eq!(s.mean_slot_s, s.mean_nonlos_s + s.mean_los_s);
        }
    }
}
