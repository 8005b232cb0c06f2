//! Four social dilemmas: game construction, the tolerance needed to
//! cooperate, relative tolerance, and cooperation rates over a population
//! of relative types.
//!
//! Throughout, a player *cooperates* by playing their part of the
//! welfare-maximizing profile and *defects* by playing their part of the
//! unique Nash profile. A belief `beta` means every opponent independently
//! cooperates with probability `beta` and defects otherwise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::games::{Game, MixedProfile, MixedStrategy};
use crate::{Error, Result};

/// Largest payoff tensor (in pure profiles) `build_game` will materialize.
pub const MAX_PROFILES: usize = 1 << 24;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DilemmaSpec {
    /// Cooperating costs `cost` and gives `benefit` to the other player.
    #[serde(rename = "pd")]
    PrisonersDilemma {
        #[serde(rename = "b")]
        benefit: f64,
        #[serde(rename = "c")]
        cost: f64,
    },
    /// Claims in `[low, high]`; the lower claimant gets a bonus, the other
    /// pays the same penalty.
    #[serde(rename = "td")]
    TravelersDilemma {
        #[serde(rename = "l", alias = "L")]
        low: i64,
        #[serde(rename = "h", alias = "H")]
        high: i64,
        #[serde(rename = "b")]
        bonus: i64,
    },
    /// `players` each contribute part of a unit endowment; the pool is
    /// returned at marginal rate `rho` to everyone.
    #[serde(rename = "pg")]
    PublicGoods {
        #[serde(rename = "n", alias = "N")]
        players: usize,
        rho: f64,
    },
    /// `firms` post integer prices in `[floor, reservation]`; the lowest
    /// price sells, ties split.
    #[serde(rename = "bertrand")]
    Bertrand {
        #[serde(rename = "n")]
        firms: usize,
        #[serde(rename = "l", alias = "L")]
        floor: i64,
        #[serde(rename = "h", alias = "H")]
        reservation: i64,
    },
}

impl DilemmaSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidDilemma(m));
        match *self {
            Self::PrisonersDilemma { benefit, cost } => {
                if !(benefit.is_finite() && cost.is_finite() && benefit > cost && cost > 0.0) {
                    return bad(format!("PD needs b > c > 0, got b = {benefit}, c = {cost}"));
                }
            }
            Self::TravelersDilemma { low, high, bonus } => {
                if !(high > low && low >= 1 && bonus >= 1) {
                    return bad(format!(
                        "TD needs H > L >= 1 and b >= 1, got L = {low}, H = {high}, b = {bonus}"
                    ));
                }
            }
            Self::PublicGoods { players, rho } => {
                if players < 2 || !(rho > 1.0 / players as f64 && rho < 1.0) {
                    return bad(format!(
                        "public goods needs N >= 2 and 1/N < rho < 1, got N = {players}, rho = {rho}"
                    ));
                }
            }
            Self::Bertrand {
                firms,
                floor,
                reservation,
            } => {
                if firms < 2 || floor < 2 || reservation <= floor {
                    return bad(format!(
                        "Bertrand needs n >= 2 and H > L >= 2, got n = {firms}, L = {floor}, H = {reservation}"
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn num_players(&self) -> usize {
        match *self {
            Self::PrisonersDilemma { .. } | Self::TravelersDilemma { .. } => 2,
            Self::PublicGoods { players, .. } => players,
            Self::Bertrand { firms, .. } => firms,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Self::PrisonersDilemma { .. } => "Prisoner's Dilemma",
            Self::TravelersDilemma { .. } => "Traveler's Dilemma",
            Self::PublicGoods { .. } => "Public Goods",
            Self::Bertrand { .. } => "Bertrand competition",
        }
    }

    /// Whether the threshold depends on the belief `beta`.
    pub fn needs_belief(&self) -> bool {
        matches!(self, Self::TravelersDilemma { .. } | Self::Bertrand { .. })
    }
}

/// A built dilemma with the cooperate/defect strategy index shared by all
/// players.
#[derive(Debug, Clone)]
pub struct DilemmaGame {
    pub game: Game,
    pub cooperate: usize,
    pub defect: usize,
}

impl DilemmaGame {
    /// Every player except `player` cooperates with probability `beta`;
    /// `player` cooperates outright.
    pub fn belief_profile(&self, player: usize, beta: f64) -> MixedProfile {
        let n = self.game.num_players();
        MixedProfile::new(
            (0..n)
                .map(|p| {
                    let k = self.game.num_strategies(p);
                    if p == player {
                        MixedStrategy::pure(k, self.cooperate)
                    } else {
                        MixedStrategy::mix_of_two(k, self.cooperate, self.defect, beta)
                    }
                })
                .collect(),
        )
    }
}

/// Explicit normal-form game for `spec`. Public goods uses contributions
/// `{0, 1}`.
pub fn build_game(spec: &DilemmaSpec) -> Result<DilemmaGame> {
    build_game_with_levels(spec, 1)
}

/// As [`build_game`], with public-goods contributions on the grid
/// `{0, 1/levels, ..., 1}`. `levels` is ignored for the other games.
pub fn build_game_with_levels(spec: &DilemmaSpec, levels: usize) -> Result<DilemmaGame> {
    spec.validate()?;
    let counts: Vec<usize> = match *spec {
        DilemmaSpec::PrisonersDilemma { .. } => vec![2, 2],
        DilemmaSpec::TravelersDilemma { low, high, .. } => vec![(high - low + 1) as usize; 2],
        DilemmaSpec::PublicGoods { players, .. } => {
            if levels == 0 {
                return Err(Error::InvalidDilemma("contribution grid needs >= 1 level".into()));
            }
            vec![levels + 1; players]
        }
        DilemmaSpec::Bertrand {
            firms,
            floor,
            reservation,
        } => vec![(reservation - floor + 1) as usize; firms],
    };
    let size = counts
        .iter()
        .try_fold(1usize, |acc, &k| acc.checked_mul(k))
        .filter(|&s| s <= MAX_PROFILES)
        .ok_or_else(|| Error::InvalidDilemma(format!("{counts:?} strategies is too large to materialize")))?;
    debug_assert!(size > 0);

    let (labels, cooperate, defect): (Vec<Vec<String>>, usize, usize) = match *spec {
        DilemmaSpec::PrisonersDilemma { .. } => (vec![vec!["C".into(), "D".into()]; 2], 0, 1),
        DilemmaSpec::TravelersDilemma { low, high, .. } => {
            let l: Vec<String> = (low..=high).map(|m| m.to_string()).collect();
            (vec![l; 2], (high - low) as usize, 0)
        }
        DilemmaSpec::PublicGoods { players, .. } => {
            let l: Vec<String> = (0..=levels).map(|j| format!("{}", j as f64 / levels as f64)).collect();
            (vec![l; players], levels, 0)
        }
        DilemmaSpec::Bertrand {
            firms,
            floor,
            reservation,
        } => {
            let l: Vec<String> = (floor..=reservation).map(|p| p.to_string()).collect();
            (vec![l; firms], (reservation - floor) as usize, 0)
        }
    };

    let game = match *spec {
        DilemmaSpec::PrisonersDilemma { benefit: b, cost: c } => {
            Game::from_fn(labels, |s| match (s[0], s[1]) {
                (0, 0) => vec![b - c, b - c],
                (0, _) => vec![-c, b],
                (_, 0) => vec![b, -c],
                _ => vec![0.0, 0.0],
            })?
        }
        DilemmaSpec::TravelersDilemma { low, bonus, .. } => Game::from_fn(labels, |s| {
            let (m1, m2) = (low + s[0] as i64, low + s[1] as i64);
            let (u1, u2) = match m1.cmp(&m2) {
                std::cmp::Ordering::Equal => (m1, m2),
                std::cmp::Ordering::Less => (m1 + bonus, m1 - bonus),
                std::cmp::Ordering::Greater => (m2 - bonus, m2 + bonus),
            };
            vec![u1 as f64, u2 as f64]
        })?,
        DilemmaSpec::PublicGoods { rho, .. } => Game::from_fn(labels, |s| {
            let x: Vec<f64> = s.iter().map(|&j| j as f64 / levels as f64).collect();
            let pool: f64 = x.iter().sum();
            x.iter().map(|xi| 1.0 - xi + rho * pool).collect()
        })?,
        DilemmaSpec::Bertrand { floor, .. } => Game::from_fn(labels, |s| {
            let low = *s.iter().min().unwrap();
            let winners = s.iter().filter(|&&k| k == low).count() as f64;
            let price = (floor + low as i64) as f64;
            s.iter()
                .map(|&k| if k == low { price / winners } else { 0.0 })
                .collect()
        })?,
    };
    Ok(DilemmaGame {
        game,
        cooperate,
        defect,
    })
}

/// `sum_{k=0}^{n-1} beta^k (1-beta)^{n-1-k} C(n-1, k) / (n-k)`: the expected
/// share a firm pricing at the floor receives when each of the other
/// `n - 1` firms independently prices at the reservation value with
/// probability `beta`.
pub fn bertrand_f(n: usize, beta: f64) -> f64 {
    assert!(n >= 1, "need at least one firm");
    if beta <= 0.0 {
        return 1.0 / n as f64;
    }
    if beta >= 1.0 {
        return 1.0;
    }
    let m = n - 1;
    let (lb, lq) = (beta.ln(), (-beta).ln_1p());
    let mut ln_binom = 0.0;
    let mut sum = 0.0;
    for k in 0..=m {
        if k > 0 {
            ln_binom += ((m - k + 1) as f64).ln() - (k as f64).ln();
        }
        let w = (ln_binom + k as f64 * lb + (m - k) as f64 * lq).exp();
        sum += w / (n - k) as f64;
    }
    sum
}

fn check_beta(beta: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&beta) {
        Ok(beta)
    } else {
        Err(Error::OutOfRange(format!("belief β = {beta} outside [0, 1]")))
    }
}

/// Minimal absolute tolerance at which cooperating is consistent. `beta`
/// is required for Traveler's Dilemma (without it, the belief-free bound
/// `2b - 1` is returned) and for Bertrand competition; it is ignored for
/// the Prisoner's Dilemma and Public Goods.
pub fn cooperation_threshold(spec: &DilemmaSpec, beta: Option<f64>) -> Result<f64> {
    spec.validate()?;
    Ok(match *spec {
        DilemmaSpec::PrisonersDilemma { cost, .. } => cost,
        DilemmaSpec::PublicGoods { rho, .. } => 1.0 - rho,
        DilemmaSpec::TravelersDilemma { low, high, bonus } => match beta {
            None => (2 * bonus - 1) as f64,
            Some(beta) => {
                let beta = check_beta(beta)?;
                let (b, spread) = (bonus as f64, (high - low) as f64);
                f64::max(beta * (b - 1.0), b - beta * spread)
            }
        },
        DilemmaSpec::Bertrand {
            firms,
            floor,
            reservation,
        } => {
            let beta = check_beta(beta.ok_or(Error::MissingBelief(spec.name()))?)?;
            let all_coop = beta.powi(firms as i32 - 1);
            let (l, h) = (floor as f64, reservation as f64);
            f64::max(all_coop * (h - 1.0), bertrand_f(firms, beta) * l) - all_coop * h / firms as f64
        }
    })
}

/// Payoff to each player when everyone cooperates; the unit of relative
/// tolerance.
pub fn cooperative_payoff(spec: &DilemmaSpec) -> f64 {
    match *spec {
        DilemmaSpec::PrisonersDilemma { benefit, cost } => benefit - cost,
        DilemmaSpec::TravelersDilemma { high, .. } => high as f64,
        DilemmaSpec::PublicGoods { players, rho } => players as f64 * rho,
        DilemmaSpec::Bertrand {
            firms, reservation, ..
        } => reservation as f64 / firms as f64,
    }
}

/// Absolute tolerance for relative tolerance `t_rel` in `[0, 1]`.
pub fn relative_to_absolute(spec: &DilemmaSpec, t_rel: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&t_rel) {
        return Err(Error::OutOfRange(format!(
            "relative tolerance {t_rel} outside [0, 1]"
        )));
    }
    spec.validate()?;
    Ok(t_rel * cooperative_payoff(spec))
}

/// Relative tolerance needed to cooperate: threshold over the cooperative
/// payoff. May exceed 1, in which case nobody cooperates.
pub fn relative_threshold(spec: &DilemmaSpec, beta: f64) -> Result<f64> {
    let belief = spec.needs_belief().then_some(beta);
    Ok(cooperation_threshold(spec, belief)? / cooperative_payoff(spec))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Disposition {
    Cooperate,
    Defect,
}

/// `(relative tolerance, belief, disposition)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeType {
    pub t_rel: f64,
    pub beta: f64,
    pub disposition: Disposition,
}

impl RelativeType {
    pub fn new(t_rel: f64, beta: f64, disposition: Disposition) -> Result<Self> {
        if !(0.0..=1.0).contains(&t_rel) {
            return Err(Error::OutOfRange(format!("relative tolerance {t_rel}")));
        }
        check_beta(beta)?;
        Ok(Self {
            t_rel,
            beta,
            disposition,
        })
    }
}

/// Whether a player of this relative type cooperates: disposed to, and
/// cooperation within their tolerance given their belief.
pub fn will_cooperate(spec: &DilemmaSpec, ty: &RelativeType, eps: f64) -> Result<bool> {
    if ty.disposition == Disposition::Defect {
        return Ok(false);
    }
    let t = relative_to_absolute(spec, ty.t_rel)?;
    let belief = spec.needs_belief().then_some(ty.beta);
    Ok(t >= cooperation_threshold(spec, belief)? - eps)
}

/// Law of the belief component of a relative type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BeliefLaw {
    Uniform,
    Fixed(f64),
}

/// Population of relative types: relative tolerance uniform on `[0, 1]`,
/// belief per [`BeliefLaw`] and independent of it, disposition C with
/// probability `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeTypeDistribution {
    pub q: f64,
    pub belief: BeliefLaw,
}

impl Default for RelativeTypeDistribution {
    fn default() -> Self {
        Self {
            q: 1.0,
            belief: BeliefLaw::Uniform,
        }
    }
}

impl RelativeTypeDistribution {
    pub fn uniform(q: f64) -> Result<Self> {
        Self::new(q, BeliefLaw::Uniform)
    }

    pub fn new(q: f64, belief: BeliefLaw) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::OutOfRange(format!("disposition probability {q}")));
        }
        if let BeliefLaw::Fixed(b) = belief {
            check_beta(b)?;
        }
        Ok(Self { q, belief })
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> RelativeType {
        let t_rel = rng.gen::<f64>();
        let beta = match self.belief {
            BeliefLaw::Uniform => rng.gen::<f64>(),
            BeliefLaw::Fixed(b) => b,
        };
        let disposition = if rng.gen::<f64>() < self.q {
            Disposition::Cooperate
        } else {
            Disposition::Defect
        };
        RelativeType {
            t_rel,
            beta,
            disposition,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub exact: f64,
    pub mc: f64,
    pub mc_stderr: f64,
}

/// Fraction of relative tolerances in `[0, 1]` at least `x`.
fn uniform_tail(x: f64) -> f64 {
    (1.0 - x).clamp(0.0, 1.0)
}

/// Probability that a random relative type cooperates, computed by
/// integrating the threshold region.
pub fn exact_cooperation_rate(spec: &DilemmaSpec, dist: &RelativeTypeDistribution) -> Result<f64> {
    spec.validate()?;
    let mass = match dist.belief {
        BeliefLaw::Fixed(beta) => uniform_tail(relative_threshold(spec, beta)?),
        BeliefLaw::Uniform => match *spec {
            DilemmaSpec::PrisonersDilemma { .. } | DilemmaSpec::PublicGoods { .. } => {
                uniform_tail(relative_threshold(spec, 0.0)?)
            }
            DilemmaSpec::TravelersDilemma { low, high, bonus } => {
                td_uniform_belief_rate(low, high, bonus)
            }
            DilemmaSpec::Bertrand { .. } => bertrand_uniform_belief_rate(spec)?,
        },
    };
    Ok(dist.q * mass)
}

/// Integral over beta of the tail above `max(beta(b-1), b - beta(H-L)) / H`.
/// The integrand is piecewise linear, so the trapezoid rule over its
/// breakpoints is exact.
fn td_uniform_belief_rate(low: i64, high: i64, bonus: i64) -> f64 {
    let (b, spread, h) = (bonus as f64, (high - low) as f64, high as f64);
    let rising = |beta: f64| beta * (b - 1.0) / h;
    let falling = |beta: f64| (b - beta * spread) / h;
    let tail = |beta: f64| uniform_tail(f64::max(rising(beta), falling(beta)));
    let mut points = vec![0.0, 1.0, b / (b - 1.0 + spread), b / spread, (b - h) / spread];
    if b > 1.0 {
        points.push(h / (b - 1.0));
    }
    points.retain(|p| p.is_finite() && *p > 0.0 && *p < 1.0);
    points.push(0.0);
    points.push(1.0);
    points.sort_by(f64::total_cmp);
    points.dedup();
    points
        .windows(2)
        .map(|w| 0.5 * (w[1] - w[0]) * (tail(w[0]) + tail(w[1])))
        .sum()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let n = order;
    (0..n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Sign changes of `f` on a uniform grid over `[lo, hi]`, each refined by
/// bisection.
fn sign_changes<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, grid: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let mut prev = (lo, f(lo));
    for k in 1..=grid {
        let x = lo + (hi - lo) * k as f64 / grid as f64;
        let fx = f(x);
        if prev.1 == 0.0 {
            out.push(prev.0);
        } else if prev.1.signum() != fx.signum() && fx != 0.0 {
            let (mut a, mut b, fa) = (prev.0, x, prev.1);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if f(m).signum() == fa.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
        }
        prev = (x, fx);
    }
    if prev.1 == 0.0 {
        out.push(prev.0);
    }
    out
}

/// Integral over beta of the Bertrand tail. Splits at the kinks of the max
/// and the clamp, then applies composite Gauss-Legendre on each smooth
/// piece (exact for polynomial pieces up to degree 39).
fn bertrand_uniform_belief_rate(spec: &DilemmaSpec) -> Result<f64> {
    let DilemmaSpec::Bertrand {
        firms,
        floor,
        reservation,
    } = *spec
    else {
        unreachable!()
    };
    let (l, h) = (floor as f64, reservation as f64);
    let high_branch = |beta: f64| beta.powi(firms as i32 - 1) * (h - 1.0) - bertrand_f(firms, beta) * l;
    let rel = |beta: f64| relative_threshold(spec, beta).expect("validated");
    let mut cuts = vec![0.0, 1.0];
    cuts.extend(sign_changes(high_branch, 0.0, 1.0, 4000));
    cuts.extend(sign_changes(|b| rel(b) - 1.0, 0.0, 1.0, 4000));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let nodes = gauss_legendre(20);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let pieces = 16;
        for k in 0..pieces {
            let a = w[0] + (w[1] - w[0]) * k as f64 / pieces as f64;
            let b = w[0] + (w[1] - w[0]) * (k + 1) as f64 / pieces as f64;
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            total += nodes
                .iter()
                .map(|(x, wt)| wt * uniform_tail(rel(mid + half * x)))
                .sum::<f64>()
                * half;
        }
    }
    Ok(total)
}

/// Monte Carlo estimate of the cooperation rate, seeded for
/// reproducibility, alongside the exact rate.
pub fn cooperation_rate(
    spec: &DilemmaSpec,
    dist: &RelativeTypeDistribution,
    samples: usize,
    seed: u64,
    eps: f64,
) -> Result<RateEstimate> {
    if samples == 0 {
        return Err(Error::OutOfRange("need at least one sample".into()));
    }
    let exact = exact_cooperation_rate(spec, dist)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..samples {
        let ty = dist.sample(&mut rng);
        if will_cooperate(spec, &ty, eps)? {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    Ok(RateEstimate {
        exact,
        mc: p,
        mc_stderr: (p * (1.0 - p) / samples as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games;
    use crate::DEFAULT_EPS;

    fn pd(b: f64, c: f64) -> DilemmaSpec {
        DilemmaSpec::PrisonersDilemma { benefit: b, cost: c }
    }
    fn td(l: i64, h: i64, b: i64) -> DilemmaSpec {
        DilemmaSpec::TravelersDilemma { low: l, high: h, bonus: b }
    }
    fn pg(n: usize, rho: f64) -> DilemmaSpec {
        DilemmaSpec::PublicGoods { players: n, rho }
    }
    fn bertrand(n: usize, l: i64, h: i64) -> DilemmaSpec {
        DilemmaSpec::Bertrand { firms: n, floor: l, reservation: h }
    }

    #[test]
    fn built_payoffs() {
        let g = build_game(&pd(5.0, 2.0)).unwrap().game;
        let cases = [([0, 0], [3.0, 3.0]), ([0, 1], [-2.0, 5.0]), ([1, 0], [5.0, -2.0]), ([1, 1], [0.0, 0.0])];
        for (p, u) in cases {
            assert_eq!([g.payoff(0, &p), g.payoff(1, &p)], u);
        }
        let t = build_game(&td(2, 3, 2)).unwrap();
        assert_eq!((t.cooperate, t.defect), (1, 0));
        let g = t.game;
        assert_eq!([g.payoff(0, &[1, 1]), g.payoff(1, &[1, 1])], [3.0, 3.0]);
        assert_eq!([g.payoff(0, &[0, 1]), g.payoff(1, &[0, 1])], [4.0, 0.0]);
        assert_eq!([g.payoff(0, &[1, 0]), g.payoff(1, &[1, 0])], [0.0, 4.0]);
        assert_eq!([g.payoff(0, &[0, 0]), g.payoff(1, &[0, 0])], [2.0, 2.0]);
        let g = build_game(&bertrand(2, 2, 3)).unwrap().game;
        assert_eq!([g.payoff(0, &[1, 1]), g.payoff(1, &[1, 1])], [1.5, 1.5]);
        assert_eq!([g.payoff(0, &[0, 1]), g.payoff(1, &[0, 1])], [2.0, 0.0]);
        assert_eq!([g.payoff(0, &[0, 0]), g.payoff(1, &[0, 0])], [1.0, 1.0]);
        let g = build_game(&pg(3, 0.5)).unwrap().game;
        assert_eq!(g.payoff(0, &[1, 1, 1]), 1.5);
        assert_eq!(g.payoff(0, &[0, 1, 1]), 2.0);
    }

    #[test]
    fn invalid_specs() {
        assert!(build_game(&pd(2.0, 2.0)).is_err());
        assert!(build_game(&td(3, 3, 1)).is_err());
        assert!(build_game(&pg(3, 0.3)).is_err());
        assert!(build_game(&bertrand(2, 1, 10)).is_err());
        assert!(build_game(&bertrand(6, 2, 100)).is_err());
        assert!(matches!(
            cooperation_threshold(&bertrand(2, 2, 100), None),
            Err(Error::MissingBelief(_))
        ));
    }

    #[test]
    fn thresholds() {
        assert!((cooperation_threshold(&pg(3, 0.4), None).unwrap() - 0.6).abs() < 1e-15);
        assert_eq!(cooperation_threshold(&pd(5.0, 2.0), Some(0.3)).unwrap(), 2.0);
        assert_eq!(cooperation_threshold(&td(2, 100, 2), Some(0.5)).unwrap(), 0.5);
        assert_eq!(cooperation_threshold(&td(2, 100, 2), None).unwrap(), 3.0);
        let t = cooperation_threshold(&bertrand(2, 2, 100), Some(0.8)).unwrap();
        assert!((t - 39.2).abs() < 1e-12, "{t}");
    }

    #[test]
    fn td_threshold_by_utility_enumeration() {
        // expected utilities of H, H-1, L against beta H + (1-beta) L
        let beta = 0.5;
        let (l, h, b) = (2.0, 100.0, 2.0);
        let u_h = beta * h + (1.0 - beta) * (l - b);
        let u_h1: f64 = beta * (h - 1.0 + b) + (1.0 - beta) * (l - b);
        let u_l = beta * (l + b) + (1.0 - beta) * l;
        let oracle = u_h1.max(u_l) - u_h;
        assert_eq!(cooperation_threshold(&td(2, 100, 2), Some(beta)).unwrap(), oracle);
    }

    #[test]
    fn bertrand_threshold_by_outcome_enumeration() {
        let (n, l, h, beta) = (2usize, 2.0, 100.0, 0.8);
        // opponent prices H with probability beta, L otherwise
        let u_coop = beta * h / 2.0;
        let u_h1: f64 = beta * (h - 1.0);
        let u_l = beta * l + (1.0 - beta) * l / 2.0;
        let oracle = u_h1.max(u_l) - u_coop;
        let t = cooperation_threshold(&bertrand(n, 2, 100), Some(beta)).unwrap();
        assert!((t - oracle).abs() < 1e-12);
    }

    #[test]
    fn bertrand_f_values() {
        for n in 2..8 {
            assert!((bertrand_f(n, 0.0) - 1.0 / n as f64).abs() < 1e-15);
            assert_eq!(bertrand_f(n, 1.0), 1.0);
        }
        assert!((bertrand_f(2, 0.8) - 0.9).abs() < 1e-15);
    }

    #[test]
    fn relative_tolerance() {
        for spec in [pd(5.0, 2.0), td(2, 100, 2), pg(4, 0.5), bertrand(3, 2, 100)] {
            assert_eq!(relative_to_absolute(&spec, 0.0).unwrap(), 0.0);
        }
        assert_eq!(relative_to_absolute(&td(2, 100, 2), 0.02).unwrap(), 2.0);
        assert!((relative_to_absolute(&pg(4, 0.5), 0.3).unwrap() - 0.6).abs() < 1e-15);
        assert!(relative_to_absolute(&pg(4, 0.5), 1.1).is_err());
    }

    #[test]
    fn cooperation_decisions() {
        let d = RelativeType::new(1.0, 1.0, Disposition::Defect).unwrap();
        assert!(!will_cooperate(&pd(5.0, 2.0), &d, DEFAULT_EPS).unwrap());
        let c = RelativeType::new(0.7, 0.1, Disposition::Cooperate).unwrap();
        assert!(will_cooperate(&pd(5.0, 2.0), &c, DEFAULT_EPS).unwrap());
        let c = RelativeType::new(0.004, 0.5, Disposition::Cooperate).unwrap();
        assert!(!will_cooperate(&td(2, 100, 2), &c, DEFAULT_EPS).unwrap());
        let c = RelativeType::new(0.005, 0.5, Disposition::Cooperate).unwrap();
        assert!(will_cooperate(&td(2, 100, 2), &c, DEFAULT_EPS).unwrap());
    }

    #[test]
    fn rates() {
        let none = RelativeTypeDistribution::uniform(0.0).unwrap();
        let r = cooperation_rate(&pd(5.0, 2.0), &none, 1000, 7, DEFAULT_EPS).unwrap();
        assert_eq!((r.exact, r.mc), (0.0, 0.0));
        let all = RelativeTypeDistribution::default();
        let r = cooperation_rate(&pd(5.0, 2.0), &all, 200_000, 11, DEFAULT_EPS).unwrap();
        assert!((r.exact - 1.0 / 3.0).abs() < 1e-15);
        assert!((r.mc - r.exact).abs() < 5.0 * r.mc_stderr);
        let r = cooperation_rate(&pg(4, 0.5), &all, 200_000, 11, DEFAULT_EPS).unwrap();
        assert!((r.exact - 0.75).abs() < 1e-15);
        assert!((r.mc - r.exact).abs() < 5.0 * r.mc_stderr);
    }

    #[test]
    fn exact_rates_match_monte_carlo_under_uniform_belief() {
        let all = RelativeTypeDistribution::default();
        for spec in [td(2, 100, 2), td(2, 10, 3), bertrand(2, 2, 100), bertrand(3, 2, 20)] {
            let r = cooperation_rate(&spec, &all, 400_000, 3, DEFAULT_EPS).unwrap();
            assert!(
                (r.mc - r.exact).abs() < 5.0 * r.mc_stderr.max(1e-4),
                "{spec:?}: exact {} vs mc {}",
                r.exact,
                r.mc
            );
        }
    }

    #[test]
    fn td_rate_matches_fine_midpoint_quadrature() {
        for spec in [td(2, 100, 2), td(2, 5, 3), td(10, 12, 30)] {
            let exact = exact_cooperation_rate(&spec, &RelativeTypeDistribution::default()).unwrap();
            let n = 200_000;
            let approx: f64 = (0..n)
                .map(|k| {
                    let beta = (k as f64 + 0.5) / n as f64;
                    uniform_tail(relative_threshold(&spec, beta).unwrap())
                })
                .sum::<f64>()
                / n as f64;
            assert!((exact - approx).abs() < 1e-8, "{spec:?}: {exact} vs {approx}");
        }
    }

    #[test]
    fn threshold_matches_raw_payoffs() {
        let specs = [pd(5.0, 2.0), td(2, 12, 3), td(2, 3, 2), pg(3, 0.4), bertrand(2, 2, 20), bertrand(3, 2, 9)];
        for spec in specs {
            let built = build_game(&spec).unwrap();
            for bi in 0..=10 {
                let beta = bi as f64 / 10.0;
                let theta = cooperation_threshold(&spec, spec.needs_belief().then_some(beta)).unwrap();
                let prof = built.belief_profile(0, beta);
                let regret = games::regret(&built.game, &prof, 0, built.cooperate).unwrap();
                assert!((regret - theta).abs() < 1e-9, "{spec:?} beta {beta}: {regret} vs {theta}");
            }
        }
    }

    #[test]
    fn large_market_bertrand_limit() {
        let (l, h) = (2i64, 100i64);
        for n in [200usize, 400] {
            for bi in 3..=7 {
                let beta = bi as f64 / 10.0;
                let spec = bertrand(n, l, h);
                let got = relative_threshold(&spec, beta).unwrap();
                let limit = l as f64 / ((1.0 - beta) * h as f64);
                assert!(((got - limit) / limit).abs() < 0.1, "n {n} beta {beta}: {got} vs {limit}");
            }
        }
    }

    #[test]
    fn spec_json_shapes() {
        let s: DilemmaSpec = serde_json::from_str(r#"{"kind":"pd","b":5,"c":2}"#).unwrap();
        assert_eq!(s, pd(5.0, 2.0));
        let s: DilemmaSpec = serde_json::from_str(r#"{"kind":"td","L":2,"H":100,"b":2}"#).unwrap();
        assert_eq!(s, td(2, 100, 2));
        let s: DilemmaSpec = serde_json::from_str(r#"{"kind":"bertrand","n":3,"l":2,"h":100}"#).unwrap();
        assert_eq!(s, bertrand(3, 2, 100));
        let back: DilemmaSpec = serde_json::from_str(&serde_json::to_string(&pg(4, 0.5)).unwrap()).unwrap();
        assert_eq!(back, pg(4, 0.5));
    }
}
