//! Finite normal-form games, mixed strategies, expected utility and regret.
//!
//! Payoffs are stored per player as a flat row-major table over pure
//! profiles: player 0's strategy index varies slowest and the last
//! player's fastest. The same ordering is used by the JSON schema in
//! [`crate::io`].

use crate::{Error, Result};

/// A finite n-player normal-form game.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    labels: Vec<Vec<String>>,
    /// `payoffs[player][flat_index(profile)]`
    payoffs: Vec<Vec<f64>>,
    strides: Vec<usize>,
}

impl Game {
    /// Builds a game from strategy labels and per-player flat payoff tables.
    pub fn new(labels: Vec<Vec<String>>, payoffs: Vec<Vec<f64>>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidGame("a game needs at least one player".into()));
        }
        if let Some(p) = labels.iter().position(|l| l.is_empty()) {
            return Err(Error::InvalidGame(format!("player {p} has no strategies")));
        }
        if payoffs.len() != labels.len() {
            return Err(Error::InvalidGame(format!(
                "{} payoff tables for {} players",
                payoffs.len(),
                labels.len()
            )));
        }
        let strides = strides_for(&labels);
        let size: usize = labels.iter().map(Vec::len).product();
        for (p, table) in payoffs.iter().enumerate() {
            if table.len() != size {
                return Err(Error::InvalidGame(format!(
                    "player {p} payoff table has {} entries, expected {size}",
                    table.len()
                )));
            }
            if let Some(k) = table.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidGame(format!(
                    "player {p} payoff at flat index {k} is not finite"
                )));
            }
        }
        Ok(Self {
            labels,
            payoffs,
            strides,
        })
    }

    /// Builds a game by evaluating `payoff(profile)` on every pure profile.
    /// The closure returns one payoff per player.
    pub fn from_fn<F>(labels: Vec<Vec<String>>, mut payoff: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> Vec<f64>,
    {
        let n = labels.len();
        let counts: Vec<usize> = labels.iter().map(Vec::len).collect();
        let size: usize = counts.iter().product();
        let mut payoffs = vec![Vec::with_capacity(size); n];
        if size > 0 && n > 0 {
            let mut profile = vec![0usize; n];
            loop {
                let v = payoff(&profile);
                if v.len() != n {
                    return Err(Error::InvalidGame(format!(
                        "payoff function returned {} values for {n} players",
                        v.len()
                    )));
                }
                for (table, x) in payoffs.iter_mut().zip(v) {
                    table.push(x);
                }
                if !advance(&mut profile, &counts) {
                    break;
                }
            }
        }
        Self::new(labels, payoffs)
    }

    pub fn num_players(&self) -> usize {
        self.labels.len()
    }

    pub fn num_strategies(&self, player: usize) -> usize {
        self.labels[player].len()
    }

    pub fn strategy_counts(&self) -> Vec<usize> {
        self.labels.iter().map(Vec::len).collect()
    }

    pub fn strategy_labels(&self) -> &[Vec<String>] {
        &self.labels
    }

    /// Flat table of `player`'s payoffs in row-major profile order.
    pub fn payoff_table(&self, player: usize) -> &[f64] {
        &self.payoffs[player]
    }

    pub fn flat_index(&self, profile: &[usize]) -> usize {
        profile.iter().zip(&self.strides).map(|(s, k)| s * k).sum()
    }

    /// Payoff to `player` at a pure profile.
    pub fn payoff(&self, player: usize, profile: &[usize]) -> f64 {
        self.payoffs[player][self.flat_index(profile)]
    }

    /// Every pure profile, in row-major order.
    pub fn pure_profiles(&self) -> Vec<Vec<usize>> {
        let counts = self.strategy_counts();
        let mut out = Vec::new();
        let mut profile = vec![0usize; counts.len()];
        loop {
            out.push(profile.clone());
            if !advance(&mut profile, &counts) {
                break;
            }
        }
        out
    }

    fn check_profile(&self, profile: &MixedProfile) -> Result<()> {
        if profile.num_players() != self.num_players() {
            return Err(Error::DimensionMismatch(format!(
                "profile has {} players, game has {}",
                profile.num_players(),
                self.num_players()
            )));
        }
        for (p, s) in profile.strategies().iter().enumerate() {
            if s.len() != self.num_strategies(p) {
                return Err(Error::DimensionMismatch(format!(
                    "player {p} mixes over {} strategies, game has {}",
                    s.len(),
                    self.num_strategies(p)
                )));
            }
        }
        Ok(())
    }

    fn check_player(&self, player: usize) -> Result<()> {
        if player >= self.num_players() {
            return Err(Error::DimensionMismatch(format!(
                "player {player} out of range for {}-player game",
                self.num_players()
            )));
        }
        Ok(())
    }
}

fn strides_for(labels: &[Vec<String>]) -> Vec<usize> {
    let mut strides = vec![1usize; labels.len()];
    for p in (0..labels.len().saturating_sub(1)).rev() {
        strides[p] = strides[p + 1] * labels[p + 1].len();
    }
    strides
}

/// Odometer increment with the last position fastest. Returns false on wrap.
fn advance(profile: &mut [usize], counts: &[usize]) -> bool {
    for p in (0..profile.len()).rev() {
        profile[p] += 1;
        if profile[p] < counts[p] {
            return true;
        }
        profile[p] = 0;
    }
    false
}

/// A probability distribution over one player's pure strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStrategy(Vec<f64>);

impl MixedStrategy {
    /// Validates entries in `[0, 1]` summing to one within `eps`.
    /// Entries within `eps` below zero are clamped to zero.
    pub fn new(probs: Vec<f64>, eps: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidStrategy("empty probability vector".into()));
        }
        for (k, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < -eps || p > 1.0 + eps {
                return Err(Error::InvalidStrategy(format!(
                    "probability {p} at index {k} outside [0, 1]"
                )));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > eps {
            return Err(Error::InvalidStrategy(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        Ok(Self(probs.into_iter().map(|p| p.clamp(0.0, 1.0)).collect()))
    }

    pub fn pure(num_strategies: usize, index: usize) -> Self {
        let mut v = vec![0.0; num_strategies];
        v[index] = 1.0;
        Self(v)
    }

    pub fn uniform(num_strategies: usize) -> Self {
        Self(vec![1.0 / num_strategies as f64; num_strategies])
    }

    /// `alpha` on strategy 0 and `1 - alpha` on strategy 1.
    pub fn two_point(alpha: f64) -> Self {
        Self(vec![alpha, 1.0 - alpha])
    }

    /// Mixture putting `weight` on strategy `a` and the rest on `b`.
    pub fn mix_of_two(num_strategies: usize, a: usize, b: usize, weight: f64) -> Self {
        let mut v = vec![0.0; num_strategies];
        v[a] += weight;
        v[b] += 1.0 - weight;
        Self(v)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Indices with strictly positive probability.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(k, _)| k)
    }
}

/// One mixed strategy per player.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedProfile(Vec<MixedStrategy>);

impl MixedProfile {
    pub fn new(strategies: Vec<MixedStrategy>) -> Self {
        Self(strategies)
    }

    /// Validates raw probability vectors against `game`.
    pub fn from_probs(game: &Game, probs: Vec<Vec<f64>>, eps: f64) -> Result<Self> {
        let strategies = probs
            .into_iter()
            .map(|p| MixedStrategy::new(p, eps))
            .collect::<Result<Vec<_>>>()?;
        let profile = Self(strategies);
        game.check_profile(&profile)?;
        Ok(profile)
    }

    /// Every player plays the same pure strategy index.
    pub fn pure(game: &Game, profile: &[usize]) -> Self {
        Self(
            profile
                .iter()
                .enumerate()
                .map(|(p, &s)| MixedStrategy::pure(game.num_strategies(p), s))
                .collect(),
        )
    }

    pub fn num_players(&self) -> usize {
        self.0.len()
    }

    pub fn strategies(&self) -> &[MixedStrategy] {
        &self.0
    }

    pub fn get(&self, player: usize) -> &MixedStrategy {
        &self.0[player]
    }

    /// Copy with `player`'s component replaced.
    pub fn with(&self, player: usize, strategy: MixedStrategy) -> Self {
        let mut v = self.0.clone();
        v[player] = strategy;
        Self(v)
    }
}

/// Payoff to `player` of each of their pure strategies against the other
/// players' components of `profile`. The player's own component is ignored.
pub fn pure_payoffs(game: &Game, profile: &MixedProfile, player: usize) -> Result<Vec<f64>> {
    game.check_profile(profile)?;
    game.check_player(player)?;
    let table = game.payoff_table(player);
    let stride = game.strides[player];
    let mut out = vec![0.0; game.num_strategies(player)];
    // Weighted base offsets over the product of opponents' supports.
    let mut stack: Vec<(usize, usize, f64)> = vec![(0, 0, 1.0)];
    while let Some((p, offset, weight)) = stack.pop() {
        if p == game.num_players() {
            for (s, slot) in out.iter_mut().enumerate() {
                *slot += weight * table[offset + s * stride];
            }
            continue;
        }
        if p == player {
            stack.push((p + 1, offset, weight));
            continue;
        }
        for (s, &q) in profile.get(p).probs().iter().enumerate() {
            if q > 0.0 {
                stack.push((p + 1, offset + s * game.strides[p], weight * q));
            }
        }
    }
    Ok(out)
}

/// Expected payoff of `player` under the mixed profile.
pub fn expected_utility(game: &Game, profile: &MixedProfile, player: usize) -> Result<f64> {
    let payoffs = pure_payoffs(game, profile, player)?;
    Ok(payoffs
        .iter()
        .zip(profile.get(player).probs())
        .map(|(u, p)| u * p)
        .sum())
}

/// Regret of every pure strategy of `player` against the opponents in
/// `profile`: best-response payoff minus the strategy's payoff.
pub fn regrets(game: &Game, profile: &MixedProfile, player: usize) -> Result<Vec<f64>> {
    let payoffs = pure_payoffs(game, profile, player)?;
    let best = payoffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(payoffs.iter().map(|u| best - u).collect())
}

/// Regret of a single pure strategy. Always non-negative.
pub fn regret(game: &Game, profile: &MixedProfile, player: usize, strategy: usize) -> Result<f64> {
    let r = regrets(game, profile, player)?;
    r.get(strategy).copied().ok_or_else(|| {
        Error::DimensionMismatch(format!(
            "strategy {strategy} out of range for player {player}"
        ))
    })
}

/// Whether `strategy` is a `t`-best response for `player` against the
/// opponents in `profile` (weak inequality, with `eps` slack).
pub fn is_consistent(
    game: &Game,
    profile: &MixedProfile,
    player: usize,
    strategy: usize,
    t: f64,
    eps: f64,
) -> Result<bool> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTolerance(t));
    }
    Ok(regret(game, profile, player, strategy)? <= t + eps)
}
