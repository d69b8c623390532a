//! The concrete experiments: two envelopes, the random railroad, "next stop
//! Willoughby" and the two biased coins.
//!
//! Each scenario has a closed-form PSP, compiles to a `(TrialSpec, Strategy)`
//! pair for the generic algebra in [`crate::trial`], and implements
//! [`TrialRunner`] to simulate the physical procedure event by event: prepare,
//! draw the pointer, compare, realize the outcome, score.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::montecarlo::{SimResult, SimulationPlan, TrialOutcome, TrialRunner};
use crate::pointer::{ParameterDistribution, PointerDistribution};
use crate::stream::RandomStream;
use crate::trial::{Strategy, TrialSpec};
use crate::TOLERANCE;

/// Chance level of every scenario here: the marginal success probability is 1/2.
pub const CHANCE_LEVEL: f64 = 0.5;

fn finite(v: f64, what: &'static str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidScenario(what))
    }
}

/// Two envelopes holding `small_amount < large_amount`. One is opened at random;
/// the guess is "the other one is larger" when the pointer exceeds the amount seen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeScenario {
    small_amount: f64,
    large_amount: f64,
    pointer: PointerDistribution,
}

impl EnvelopeScenario {
    pub fn new(small_amount: f64, large_amount: f64, pointer: PointerDistribution) -> Result<Self> {
        finite(small_amount, "small_amount must be finite")?;
        finite(large_amount, "large_amount must be finite")?;
        if !(0.0 < small_amount && small_amount < large_amount) {
            return Err(Error::InvalidScenario(
                "requires 0 < small_amount < large_amount",
            ));
        }
        Ok(Self {
            small_amount,
            large_amount,
            pointer: pointer.validated()?,
        })
    }

    pub fn small_amount(&self) -> f64 {
        self.small_amount
    }

    pub fn large_amount(&self) -> f64 {
        self.large_amount
    }

    pub fn pointer(&self) -> PointerDistribution {
        self.pointer
    }

    /// `(p, q)`: pointer below the small amount, pointer above the large amount.
    pub fn tail_masses(&self) -> (f64, f64) {
        (
            self.pointer.cdf(self.small_amount),
            self.pointer.sf(self.large_amount),
        )
    }

    /// `1 - (p + q) / 2`.
    pub fn psp(&self) -> f64 {
        let (p, q) = self.tail_masses();
        1.0 - 0.5 * (p + q)
    }

    /// Outcome 1: the small envelope was opened; outcome 2: the large one.
    /// Success means "the other envelope holds more".
    pub fn to_trial(&self) -> (TrialSpec, Strategy) {
        let trial = TrialSpec::new(&[(0.5, 1.0), (0.5, 0.0)]).expect("valid by construction");
        let y = vec![
            self.pointer.sf(self.small_amount),
            self.pointer.sf(self.large_amount),
        ];
        (trial, Strategy::new(y).expect("probabilities"))
    }
}

pub fn envelope_psp(sc: &EnvelopeScenario) -> f64 {
    sc.psp()
}

impl TrialRunner for EnvelopeScenario {
    fn run(&self, stream: &mut RandomStream) -> TrialOutcome {
        let opened_small = stream.bernoulli(0.5);
        let seen = if opened_small {
            self.small_amount
        } else {
            self.large_amount
        };
        let pointer = self.pointer.sample(stream);
        let guess_other_larger = pointer > seen;
        TrialOutcome {
            hit: guess_other_larger == opened_small,
            success: opened_small,
            cell: Some(if opened_small { 0 } else { 1 }),
        }
    }
}

/// Railroad with stations `s1_position < s2_position` on the real line. The
/// train is at either station with probability 1/2; a spinner lands red with
/// probability `r`, sending it back toward the origin station, blue away from it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RailroadScenario {
    s1_position: f64,
    s2_position: f64,
    r: f64,
    pointer: PointerDistribution,
}

impl RailroadScenario {
    pub fn new(
        s1_position: f64,
        s2_position: f64,
        r: f64,
        pointer: PointerDistribution,
    ) -> Result<Self> {
        finite(s1_position, "s1_position must be finite")?;
        finite(s2_position, "s2_position must be finite")?;
        if s1_position >= s2_position {
            return Err(Error::InvalidScenario("requires s1_position < s2_position"));
        }
        if !(0.5 < r && r < 1.0) {
            return Err(Error::InvalidScenario("requires 1/2 < r < 1"));
        }
        Ok(Self {
            s1_position,
            s2_position,
            r,
            pointer: pointer.validated()?,
        })
    }

    /// Places the stations so that `P(pointer west of S1) = p` and
    /// `P(pointer east of S2) = q`.
    pub fn with_tail_masses(r: f64, p: f64, q: f64, pointer: PointerDistribution) -> Result<Self> {
        if !(p > 0.0 && q > 0.0 && p + q < 1.0) {
            return Err(Error::InvalidScenario(
                "tail masses need p, q > 0 and p + q < 1",
            ));
        }
        Self::new(pointer.quantile(p), pointer.quantile(1.0 - q), r, pointer)
    }

    pub fn s1_position(&self) -> f64 {
        self.s1_position
    }

    pub fn s2_position(&self) -> f64 {
        self.s2_position
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn pointer(&self) -> PointerDistribution {
        self.pointer
    }

    /// `(p, q)`: pointer west of S1, pointer east of S2.
    pub fn tail_masses(&self) -> (f64, f64) {
        (
            self.pointer.cdf(self.s1_position),
            self.pointer.sf(self.s2_position),
        )
    }

    /// `r - (r - 1/2)(p + q)`.
    pub fn psp(&self) -> f64 {
        let (p, q) = self.tail_masses();
        self.r - (self.r - 0.5) * (p + q)
    }

    /// Outcome 1: at S1, outcome 2: at S2; success is "the train goes east".
    /// The passenger predicts east when the pointer lies east of the current
    /// station, so `y = (1 - p, q)`.
    pub fn to_trial(&self) -> (TrialSpec, Strategy) {
        let trial =
            TrialSpec::new(&[(0.5, self.r), (0.5, 1.0 - self.r)]).expect("valid by construction");
        let y = vec![
            self.pointer.sf(self.s1_position),
            self.pointer.sf(self.s2_position),
        ];
        (trial, Strategy::new(y).expect("probabilities"))
    }

    /// Analytic probability of each (station, spinner) row: station S1 or S2,
    /// red or blue, the pointer's chance of being right there, and the combined mass.
    pub fn table(&self) -> [RailroadRow; 4] {
        let (p, q) = self.tail_masses();
        let r = self.r;
        [
            RailroadRow {
                station: Station::S1,
                red: true,
                east: true,
                pointer_correct: 1.0 - p,
                combined: 0.5 * r * (1.0 - p),
            },
            RailroadRow {
                station: Station::S1,
                red: false,
                east: false,
                pointer_correct: p,
                combined: 0.5 * (1.0 - r) * p,
            },
            RailroadRow {
                station: Station::S2,
                red: true,
                east: false,
                pointer_correct: 1.0 - q,
                combined: 0.5 * r * (1.0 - q),
            },
            RailroadRow {
                station: Station::S2,
                red: false,
                east: true,
                pointer_correct: q,
                combined: 0.5 * (1.0 - r) * q,
            },
        ]
    }
}

pub fn railroad_psp(sc: &RailroadScenario) -> f64 {
    sc.psp()
}

pub fn railroad_to_trial(sc: &RailroadScenario) -> (TrialSpec, Strategy) {
    sc.to_trial()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Station {
    S1,
    S2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RailroadRow {
    pub station: Station,
    pub red: bool,
    pub east: bool,
    pub pointer_correct: f64,
    pub combined: f64,
}

impl TrialRunner for RailroadScenario {
    fn run(&self, stream: &mut RandomStream) -> TrialOutcome {
        let at_s1 = stream.bernoulli(0.5);
        let red = stream.bernoulli(self.r);
        // Red heads back toward R: east from S1, west from S2.
        let east = at_s1 == red;
        let here = if at_s1 {
            self.s1_position
        } else {
            self.s2_position
        };
        let predict_east = self.pointer.sample(stream) > here;
        let cell = if at_s1 { 0 } else { 2 } + if red { 0 } else { 1 };
        TrialOutcome {
            hit: predict_east == east,
            success: east,
            cell: Some(cell),
        }
    }
}

/// Stations `west_station < current_station < east_station`, where
/// `current_station` is Willoughby, the announced next stop. The passenger is
/// stopped at one of the flanking stations with probability 1/2 each and guesses
/// east when the pointer lies east of their position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilloughbyScenario {
    west_station: f64,
    current_station: f64,
    east_station: f64,
    pointer: PointerDistribution,
}

impl WilloughbyScenario {
    pub fn new(
        west_station: f64,
        current_station: f64,
        east_station: f64,
        pointer: PointerDistribution,
    ) -> Result<Self> {
        finite(west_station, "west_station must be finite")?;
        finite(current_station, "current_station must be finite")?;
        finite(east_station, "east_station must be finite")?;
        if !(west_station < current_station && current_station < east_station) {
            return Err(Error::InvalidScenario(
                "requires west_station < current_station < east_station",
            ));
        }
        Ok(Self {
            west_station,
            current_station,
            east_station,
            pointer: pointer.validated()?,
        })
    }

    pub fn west_station(&self) -> f64 {
        self.west_station
    }

    pub fn current_station(&self) -> f64 {
        self.current_station
    }

    pub fn east_station(&self) -> f64 {
        self.east_station
    }

    pub fn pointer(&self) -> PointerDistribution {
        self.pointer
    }

    /// `(p, q)`: pointer west of the west station, pointer east of the east station.
    pub fn tail_masses(&self) -> (f64, f64) {
        (
            self.pointer.cdf(self.west_station),
            self.pointer.sf(self.east_station),
        )
    }

    pub fn psp(&self) -> f64 {
        let (p, q) = self.tail_masses();
        1.0 - 0.5 * (p + q)
    }

    /// Outcome 1: stopped west of Willoughby (the train goes east for sure);
    /// outcome 2: stopped east of it. Success is "the train goes east".
    pub fn to_trial(&self) -> (TrialSpec, Strategy) {
        let trial = TrialSpec::new(&[(0.5, 1.0), (0.5, 0.0)]).expect("valid by construction");
        let y = vec![
            self.pointer.sf(self.west_station),
            self.pointer.sf(self.east_station),
        ];
        (trial, Strategy::new(y).expect("probabilities"))
    }

    fn stop(&self, east: bool) -> f64 {
        // Heading east to Willoughby means standing at the west station.
        if east {
            self.west_station
        } else {
            self.east_station
        }
    }

    /// Guess of a passenger comparing `pointer` with the stop: `true` is east.
    pub fn guess(&self, stop: f64, pointer: f64) -> bool {
        pointer > stop
    }
}

pub fn willoughby_psp(sc: &WilloughbyScenario) -> f64 {
    sc.psp()
}

impl TrialRunner for WilloughbyScenario {
    fn run(&self, stream: &mut RandomStream) -> TrialOutcome {
        let east = stream.bernoulli(0.5);
        let stop = self.stop(east);
        let predict_east = self.guess(stop, self.pointer.sample(stream));
        TrialOutcome {
            hit: predict_east == east,
            success: east,
            cell: Some(if east { 0 } else { 1 }),
        }
    }
}

/// Guesses of two passengers sharing one pointer and one preparation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimingComparison {
    /// Guess (`true` = east) recorded before the direction coin is revealed.
    pub before: Vec<bool>,
    /// Guess formed after the coin has been revealed.
    pub after: Vec<bool>,
    pub hits_before: u64,
    pub hits_after: u64,
}

/// Runs `n` Willoughby trials for a passenger who predicts before the coin is
/// revealed and one who infers afterwards. Coin and pointer come from separate
/// substreams of `seed`, and the two passengers consume them in opposite order.
pub fn willoughby_timing(sc: &WilloughbyScenario, n: usize, seed: u64) -> TimingComparison {
    const COIN_STREAM: u64 = 0;
    const POINTER_STREAM: u64 = 1;

    let mut before = Vec::with_capacity(n);
    let mut hits_before = 0;
    {
        let mut coins = RandomStream::substream(seed, COIN_STREAM);
        let mut pointers = RandomStream::substream(seed, POINTER_STREAM);
        for _ in 0..n {
            let pointer = sc.pointer.sample(&mut pointers);
            // The passenger only reads the stop; the direction is revealed after the guess.
            let coin = coins.bernoulli(0.5);
            let guess = sc.guess(sc.stop(coin), pointer);
            before.push(guess);
            hits_before += u64::from(guess == coin);
        }
    }

    let mut after = Vec::with_capacity(n);
    let mut hits_after = 0;
    {
        let mut coins = RandomStream::substream(seed, COIN_STREAM);
        let mut pointers = RandomStream::substream(seed, POINTER_STREAM);
        for _ in 0..n {
            let coin = coins.bernoulli(0.5);
            let stop = sc.stop(coin);
            let guess = sc.guess(stop, sc.pointer.sample(&mut pointers));
            after.push(guess);
            hits_after += u64::from(guess == coin);
        }
    }

    TimingComparison {
        before,
        after,
        hits_before,
        hits_after,
    }
}

/// Which physical quantity the pointer is compared with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PointerModel {
    /// Distance from the left edge of the table; Coin 2 sits further left.
    #[default]
    Position,
    /// Coin mass; Coin 2 is lighter.
    Mass,
    /// Time-lock setting; Coin 2 gets the earlier time.
    Time,
}

/// Preparation parameters of one coin-bag realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinBagRealization {
    pub coin1_parameter: f64,
    pub coin2_parameter: f64,
}

/// Two biased coins with heads probabilities `s1 < 1/2 < s2`, `s1 + s2 = 1`.
/// Coin 2 always receives the smaller parameter; one coin is kept by a fair
/// coin flip and the experimenter predicts heads when the pointer exceeds the
/// kept coin's parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinBagScenario {
    s1: f64,
    s2: f64,
    model: PointerModel,
    parameter_sampler: [ParameterDistribution; 2],
    pointer: PointerDistribution,
}

impl CoinBagScenario {
    pub fn new(
        s1: f64,
        s2: f64,
        model: PointerModel,
        parameter_sampler: [ParameterDistribution; 2],
        pointer: PointerDistribution,
    ) -> Result<Self> {
        if !(0.0..0.5).contains(&s1) || !(s2 > 0.5 && s2 <= 1.0) {
            return Err(Error::InvalidScenario("requires 0 <= s1 < 1/2 < s2 <= 1"));
        }
        if (s1 + s2 - 1.0).abs() > TOLERANCE {
            return Err(Error::InvalidScenario("requires s1 + s2 = 1"));
        }
        Ok(Self {
            s1,
            s2,
            model,
            parameter_sampler,
            pointer: pointer.validated()?,
        })
    }

    /// `s = (1/3, 2/3)`, two uniform(0, 1) parameters and a standard Cauchy pointer.
    pub fn thirds(model: PointerModel) -> Self {
        Self::new(
            1.0 / 3.0,
            2.0 / 3.0,
            model,
            [ParameterDistribution::default(); 2],
            PointerDistribution::default(),
        )
        .expect("valid by construction")
    }

    pub fn s1(&self) -> f64 {
        self.s1
    }

    pub fn s2(&self) -> f64 {
        self.s2
    }

    pub fn model(&self) -> PointerModel {
        self.model
    }

    pub fn parameter_sampler(&self) -> [ParameterDistribution; 2] {
        self.parameter_sampler
    }

    pub fn pointer(&self) -> PointerDistribution {
        self.pointer
    }

    /// Draws two parameters and hands the smaller to Coin 2. Ties have
    /// probability zero and are redrawn.
    pub fn draw_realization(&self, stream: &mut RandomStream) -> CoinBagRealization {
        loop {
            let a = self.parameter_sampler[0].sample(stream);
            let b = self.parameter_sampler[1].sample(stream);
            if a != b {
                return CoinBagRealization {
                    coin1_parameter: a.max(b),
                    coin2_parameter: a.min(b),
                };
            }
        }
    }

    /// `y_k = P(pointer > parameter_k)`.
    pub fn strategy_for(&self, realization: &CoinBagRealization) -> Result<[f64; 2]> {
        if realization.coin2_parameter == realization.coin1_parameter {
            return Err(Error::DegenerateRealization(
                "coins share one parameter value",
            ));
        }
        if realization
            .coin2_parameter
            .partial_cmp(&realization.coin1_parameter)
            != Some(Ordering::Less)
        {
            return Err(Error::DegenerateRealization(
                "Coin 2 must have the smaller parameter",
            ));
        }
        let y1 = self.pointer.sf(realization.coin1_parameter);
        let y2 = self.pointer.sf(realization.coin2_parameter);
        if y2.partial_cmp(&y1) != Some(Ordering::Greater) {
            return Err(Error::DegenerateRealization(
                "pointer does not separate the parameters",
            ));
        }
        Ok([y1, y2])
    }

    /// Closed form `1/2 + (y_2 - y_1)(s_2 - 1/2)` for one realization.
    pub fn psp(&self, realization: &CoinBagRealization) -> Result<f64> {
        let [y1, y2] = self.strategy_for(realization)?;
        Ok(0.5 + (y2 - y1) * (self.s2 - 0.5))
    }

    pub fn to_trial(&self, realization: &CoinBagRealization) -> Result<(TrialSpec, Strategy)> {
        let [y1, y2] = self.strategy_for(realization)?;
        let trial = TrialSpec::new(&[(0.5, self.s1), (0.5, self.s2)])?;
        Ok((trial, Strategy::new(vec![y1, y2])?))
    }

    /// PSP averaged over `samples` realizations drawn from `stream`.
    /// Realizations the pointer cannot separate count at chance level.
    pub fn expected_psp(&self, samples: usize, stream: &mut RandomStream) -> f64 {
        let total: f64 = (0..samples)
            .map(|_| {
                self.psp(&self.draw_realization(stream))
                    .unwrap_or(CHANCE_LEVEL)
            })
            .sum();
        total / samples.max(1) as f64
    }
}

pub fn coin_bag_to_trial(
    sc: &CoinBagScenario,
    realization: &CoinBagRealization,
) -> Result<(TrialSpec, Strategy)> {
    sc.to_trial(realization)
}

impl CoinBagScenario {
    fn run_with(
        &self,
        realization: &CoinBagRealization,
        stream: &mut RandomStream,
    ) -> TrialOutcome {
        let keep_coin2 = stream.bernoulli(0.5);
        let (parameter, heads_prob) = if keep_coin2 {
            (realization.coin2_parameter, self.s2)
        } else {
            (realization.coin1_parameter, self.s1)
        };
        // Right of the coin, heavier than it, or arriving after the lock opens.
        let predict_heads = self.pointer.sample(stream) > parameter;
        let heads = stream.bernoulli(heads_prob);
        TrialOutcome {
            hit: predict_heads == heads,
            success: heads,
            cell: Some(if keep_coin2 { 1 } else { 0 }),
        }
    }
}

impl TrialRunner for CoinBagScenario {
    fn run(&self, stream: &mut RandomStream) -> TrialOutcome {
        let realization = self.draw_realization(stream);
        self.run_with(&realization, stream)
    }
}

/// A coin bag whose two coins keep the same parameters on every trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedCoinBag {
    pub scenario: CoinBagScenario,
    pub realization: CoinBagRealization,
}

impl FixedCoinBag {
    pub fn new(scenario: CoinBagScenario, realization: CoinBagRealization) -> Result<Self> {
        scenario.strategy_for(&realization)?;
        Ok(FixedCoinBag {
            scenario,
            realization,
        })
    }

    pub fn psp(&self) -> f64 {
        self.scenario
            .psp(&self.realization)
            .expect("checked on construction")
    }
}

impl TrialRunner for FixedCoinBag {
    fn run(&self, stream: &mut RandomStream) -> TrialOutcome {
        self.scenario.run_with(&self.realization, stream)
    }
}

/// Any of the physical scenarios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    Envelope(EnvelopeScenario),
    Railroad(RailroadScenario),
    Willoughby(WilloughbyScenario),
    CoinBag(CoinBagScenario),
}

impl Scenario {
    pub fn chance_level(&self) -> f64 {
        CHANCE_LEVEL
    }
}

impl TrialRunner for Scenario {
    fn run(&self, stream: &mut RandomStream) -> TrialOutcome {
        match self {
            Scenario::Envelope(s) => s.run(stream),
            Scenario::Railroad(s) => s.run(stream),
            Scenario::Willoughby(s) => s.run(stream),
            Scenario::CoinBag(s) => s.run(stream),
        }
    }
}

/// Simulates `n` physical trials of `sc` sequentially with the default partition size.
pub fn simulate_physical(sc: &Scenario, n: u64, seed: u64) -> Result<SimResult> {
    Ok(crate::montecarlo::simulate(
        sc,
        &SimulationPlan::with_default_partitions(n, seed)?,
    ))
}
