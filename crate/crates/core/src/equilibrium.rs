//! Verification of tolerant equilibria.
//!
//! For each player, consistency sets are nested in the tolerance: a
//! strategy tolerated at `t` is tolerated at every `t' >= t`. Splitting
//! `sigma_i` across tolerance types is therefore a transportation problem
//! whose feasibility reduces to one inequality per tolerance atom:
//!
//! ```text
//! F(t) <= sigma_i({ s : regret(s) <= t })
//! ```
//!
//! When every inequality holds, a witness is built greedily by walking the
//! atoms upward and handing each one the lowest-regret mass still unused.

use crate::games::{self, Game, MixedProfile, MixedStrategy};
use crate::tolerance::{DiscreteToleranceDist, DiscreteToleranceProfile, TypeStrategyMap};
use crate::{Error, Result};

/// Why a profile fails to be a tolerant equilibrium for some player.
#[derive(Debug, Clone, PartialEq)]
pub enum ViolationKind {
    /// Types up to `threshold` carry more mass than the strategies they
    /// tolerate.
    Threshold,
    /// A strategy in the support has regret above every tolerance atom.
    UntoleratedStrategy { strategy: usize, regret: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub player: usize,
    pub kind: ViolationKind,
    /// Tolerance atom at which the inequality fails (the largest atom for
    /// an untolerated strategy).
    pub threshold: f64,
    /// Type mass that cannot be matched.
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EquilibriumVerdict {
    /// Per-player witness maps satisfying both decomposition conditions.
    Equilibrium { witness: Vec<TypeStrategyMap> },
    NotEquilibrium(Violation),
}

impl EquilibriumVerdict {
    pub fn is_equilibrium(&self) -> bool {
        matches!(self, Self::Equilibrium { .. })
    }

    pub fn witness(&self) -> Option<&[TypeStrategyMap]> {
        match self {
            Self::Equilibrium { witness } => Some(witness),
            Self::NotEquilibrium(_) => None,
        }
    }

    pub fn violation(&self) -> Option<&Violation> {
        match self {
            Self::Equilibrium { .. } => None,
            Self::NotEquilibrium(v) => Some(v),
        }
    }
}

fn check_pi(game: &Game, pi: &DiscreteToleranceProfile) -> Result<()> {
    if pi.num_players() != game.num_players() {
        return Err(Error::DimensionMismatch(format!(
            "tolerance profile for {} players, game has {}",
            pi.num_players(),
            game.num_players()
        )));
    }
    Ok(())
}

/// Checks whether `profile` is a tolerant equilibrium under `pi`,
/// returning a witness or the first violated inequality.
pub fn verify_tolerant_equilibrium(
    game: &Game,
    profile: &MixedProfile,
    pi: &DiscreteToleranceProfile,
    eps: f64,
) -> Result<EquilibriumVerdict> {
    check_pi(game, pi)?;
    let mut witness = Vec::with_capacity(game.num_players());
    for player in 0..game.num_players() {
        let regrets = games::regrets(game, profile, player)?;
        match decompose(profile.get(player), &regrets, pi.get(player), player, eps) {
            Ok(map) => witness.push(map),
            Err(v) => return Ok(EquilibriumVerdict::NotEquilibrium(v)),
        }
    }
    Ok(EquilibriumVerdict::Equilibrium { witness })
}

fn decompose(
    sigma: &MixedStrategy,
    regrets: &[f64],
    dist: &DiscreteToleranceDist,
    player: usize,
    eps: f64,
) -> std::result::Result<TypeStrategyMap, Violation> {
    let probs = sigma.probs();
    let mut order: Vec<usize> = sigma.support().collect();
    order.sort_by(|&a, &b| regrets[a].total_cmp(&regrets[b]).then(a.cmp(&b)));

    let t_max = dist.max_tolerance();
    if let Some(&s) = order.iter().find(|&&s| regrets[s] > t_max + eps) {
        return Err(Violation {
            player,
            kind: ViolationKind::UntoleratedStrategy {
                strategy: s,
                regret: regrets[s],
            },
            threshold: t_max,
            excess: probs[s],
        });
    }

    // Hall inequalities over downward-closed type sets.
    let mut tolerated = 0.0;
    let mut next = 0;
    for (k, &t) in dist.support().iter().enumerate() {
        while next < order.len() && regrets[order[next]] <= t + eps {
            tolerated += probs[order[next]];
            next += 1;
        }
        let needed = dist.cdf_at_atom(k);
        if needed > tolerated + eps {
            return Err(Violation {
                player,
                kind: ViolationKind::Threshold,
                threshold: t,
                excess: needed - tolerated,
            });
        }
    }

    // Greedy witness: ascending atoms take ascending-regret mass.
    let mut remaining: Vec<f64> = order.iter().map(|&s| probs[s]).collect();
    let mut cur = 0;
    let mut strategies = Vec::with_capacity(dist.len());
    let last = dist.len() - 1;
    for (k, &t) in dist.support().iter().enumerate() {
        let eligible = order.partition_point(|&s| regrets[s] <= t + eps);
        let mut need = dist.probs()[k];
        let mut alloc = vec![0.0; probs.len()];
        while cur < eligible && (need > 0.0 || k == last) {
            let take = if k == last { remaining[cur] } else { need.min(remaining[cur]) };
            alloc[order[cur]] += take;
            remaining[cur] -= take;
            need -= take;
            if remaining[cur] <= 0.0 {
                cur += 1;
            }
        }
        let total: f64 = alloc.iter().sum();
        let g = if total > 0.0 {
            alloc.iter_mut().for_each(|x| *x /= total);
            alloc
        } else {
            // Shortfall within eps; fall back to the best response.
            let mut v = vec![0.0; probs.len()];
            v[order[0]] = 1.0;
            v
        };
        strategies.push(MixedStrategy::new(g, 1e-6).expect("normalized allocation"));
    }
    Ok(TypeStrategyMap::new(dist, strategies).expect("one strategy per atom"))
}

/// Checks a claimed witness: every pure strategy played by type `t` has
/// regret at most `t` (up to `eps`), and the type mixture reproduces the
/// profile within `mix_tol`. Returns a description of the first defect.
pub fn witness_defect(
    game: &Game,
    profile: &MixedProfile,
    pi: &DiscreteToleranceProfile,
    witness: &[TypeStrategyMap],
    eps: f64,
    mix_tol: f64,
) -> Result<Option<String>> {
    check_pi(game, pi)?;
    if witness.len() != game.num_players() {
        return Err(Error::DimensionMismatch(format!(
            "witness for {} players, game has {}",
            witness.len(),
            game.num_players()
        )));
    }
    for (player, g) in witness.iter().enumerate() {
        let regrets = games::regrets(game, profile, player)?;
        for (t, s) in g.atoms().iter().zip(g.strategies()) {
            if let Some(k) = s.support().find(|&k| regrets[k] > t + eps) {
                return Ok(Some(format!(
                    "player {player}: type {t} plays strategy {k} with regret {}",
                    regrets[k]
                )));
            }
        }
        let mix = g.mixture(pi.get(player));
        for (k, (a, b)) in mix.iter().zip(profile.get(player).probs()).enumerate() {
            if (a - b).abs() > mix_tol {
                return Ok(Some(format!(
                    "player {player}: mixture puts {a} on strategy {k}, profile has {b}"
                )));
            }
        }
    }
    Ok(None)
}

/// Nash equilibrium: tolerant equilibrium under a point mass at zero.
pub fn verify_nash(game: &Game, profile: &MixedProfile, eps: f64) -> Result<bool> {
    let pi = DiscreteToleranceProfile::point_masses(0.0, game.num_players())?;
    Ok(verify_tolerant_equilibrium(game, profile, &pi, eps)?.is_equilibrium())
}

/// Support-based epsilon-Nash: every strategy in every support is an
/// `epsilon`-best response.
pub fn verify_gp_epsilon_nash(
    game: &Game,
    profile: &MixedProfile,
    epsilon: f64,
    eps: f64,
) -> Result<bool> {
    if epsilon < 0.0 || epsilon.is_nan() {
        return Err(Error::NegativeTolerance(epsilon));
    }
    for player in 0..game.num_players() {
        let regrets = games::regrets(game, profile, player)?;
        if profile.get(player).support().any(|s| regrets[s] > epsilon + eps) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Standard epsilon-Nash: no player gains more than `epsilon` by a
/// unilateral deviation from their mixed strategy.
pub fn verify_standard_epsilon_nash(
    game: &Game,
    profile: &MixedProfile,
    epsilon: f64,
    eps: f64,
) -> Result<bool> {
    if epsilon < 0.0 || epsilon.is_nan() {
        return Err(Error::NegativeTolerance(epsilon));
    }
    for player in 0..game.num_players() {
        let payoffs = games::pure_payoffs(game, profile, player)?;
        let best = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let current: f64 = payoffs
            .iter()
            .zip(profile.get(player).probs())
            .map(|(u, p)| u * p)
            .sum();
        if best - current > epsilon + eps {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A closed range of cooperation probabilities `[lo, hi]` on strategy 0,
/// merged from adjacent passing grid points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaInterval {
    pub lo: f64,
    pub hi: f64,
}

impl AlphaInterval {
    pub fn contains(&self, alpha: f64, tol: f64) -> bool {
        alpha >= self.lo - tol && alpha <= self.hi + tol
    }

    /// Symmetric profile where both players put `alpha` on strategy 0.
    pub fn profile(alpha: f64) -> MixedProfile {
        MixedProfile::new(vec![MixedStrategy::two_point(alpha); 2])
    }
}

fn check_symmetric_2x2(game: &Game, eps: f64) -> Result<()> {
    if game.num_players() != 2 || game.num_strategies(0) != 2 || game.num_strategies(1) != 2 {
        return Err(Error::NotSymmetric2x2(format!(
            "strategy counts {:?}",
            game.strategy_counts()
        )));
    }
    for i in 0..2 {
        for j in 0..2 {
            let (a, b) = (game.payoff(0, &[i, j]), game.payoff(1, &[j, i]));
            if (a - b).abs() > eps {
                return Err(Error::NotSymmetric2x2(format!(
                    "u1({i},{j}) = {a} but u2({j},{i}) = {b}"
                )));
            }
        }
    }
    Ok(())
}

/// Scans symmetric profiles `(alpha, 1 - alpha)` for both players on a grid
/// of `grid` points over `[0, 1]` and returns the passing ranges.
pub fn find_symmetric_2x2_equilibria(
    game: &Game,
    pi: &DiscreteToleranceProfile,
    grid: usize,
    eps: f64,
) -> Result<Vec<AlphaInterval>> {
    check_symmetric_2x2(game, eps)?;
    check_pi(game, pi)?;
    if grid < 2 {
        return Err(Error::DegenerateGrid { min: 2, got: grid });
    }
    let mut out: Vec<AlphaInterval> = Vec::new();
    let mut open: Option<AlphaInterval> = None;
    for k in 0..grid {
        let alpha = k as f64 / (grid - 1) as f64;
        let ok = verify_tolerant_equilibrium(game, &AlphaInterval::profile(alpha), pi, eps)?
            .is_equilibrium();
        open = match (open, ok) {
            (Some(mut iv), true) => {
                iv.hi = alpha;
                Some(iv)
            }
            (None, true) => Some(AlphaInterval { lo: alpha, hi: alpha }),
            (Some(iv), false) => {
                out.push(iv);
                None
            }
            (None, false) => None,
        };
    }
    out.extend(open);
    Ok(out)
}
