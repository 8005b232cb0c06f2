//! Tolerance distributions and the dominance remapping of type strategies.
//!
//! A [`DiscreteToleranceDist`] is a finite distribution over non-negative
//! tolerances. A [`ToleranceCdf`] is one of a few continuous families used
//! by the Prisoner's Dilemma analysis. [`dominance_remap`] transports a
//! type-to-strategy assignment from a distribution to any distribution that
//! stochastically dominates it, preserving the aggregate mixture.

use crate::games::MixedStrategy;
use crate::{Error, Result};

/// Finite-support distribution over tolerances.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteToleranceDist {
    support: Vec<f64>,
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl DiscreteToleranceDist {
    /// `support` must be strictly ascending and non-negative, `probs` in
    /// `(0, 1]` summing to one within `eps`.
    pub fn new(support: Vec<f64>, probs: Vec<f64>, eps: f64) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if support.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} atoms but {} probabilities",
                support.len(),
                probs.len()
            )));
        }
        if support.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(Error::InvalidDistribution(
                "tolerances must be finite and non-negative".into(),
            ));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDistribution(
                "support must be strictly ascending".into(),
            ));
        }
        if probs.iter().any(|p| !(*p > 0.0 && *p <= 1.0 + eps)) {
            return Err(Error::InvalidDistribution(
                "probabilities must lie in (0, 1]".into(),
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > eps {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        let mut cumulative: Vec<f64> = probs
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(Self {
            support,
            probs,
            cumulative,
        })
    }

    pub fn point_mass(t: f64) -> Result<Self> {
        Self::new(vec![t], vec![1.0], 0.0)
    }

    pub fn support(&self) -> &[f64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Cumulative mass at atom index `k`.
    pub fn cdf_at_atom(&self, k: usize) -> f64 {
        self.cumulative[k]
    }

    /// Total mass of atoms `<= t`.
    pub fn cdf(&self, t: f64) -> f64 {
        let k = self.support.partition_point(|&s| s <= t);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// Total mass of atoms strictly below `t`.
    pub fn cdf_strict(&self, t: f64) -> f64 {
        let k = self.support.partition_point(|&s| s < t);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    pub fn max_tolerance(&self) -> f64 {
        *self.support.last().unwrap()
    }

    /// `F^self <= F^other + eps` at every atom of either distribution.
    pub fn dominates(&self, other: &Self, eps: f64) -> bool {
        self.first_dominance_violation(other, eps).is_none()
    }

    fn first_dominance_violation(&self, other: &Self, eps: f64) -> Option<f64> {
        let mut points: Vec<f64> = self.support.iter().chain(&other.support).copied().collect();
        points.sort_by(f64::total_cmp);
        points
            .into_iter()
            .find(|&t| self.cdf(t) > other.cdf(t) + eps)
    }
}

/// Evaluate the discrete CDF at `t`.
pub fn cdf_of_discrete(dist: &DiscreteToleranceDist, t: f64) -> f64 {
    dist.cdf(t)
}

/// One tolerance distribution per player.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteToleranceProfile(Vec<DiscreteToleranceDist>);

impl DiscreteToleranceProfile {
    pub fn new(per_player: Vec<DiscreteToleranceDist>) -> Self {
        Self(per_player)
    }

    /// The same distribution for each of `n` players.
    pub fn symmetric(dist: DiscreteToleranceDist, n: usize) -> Self {
        Self(vec![dist; n])
    }

    /// Point mass at `t` for each of `n` players.
    pub fn point_masses(t: f64, n: usize) -> Result<Self> {
        Ok(Self::symmetric(DiscreteToleranceDist::point_mass(t)?, n))
    }

    pub fn num_players(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, player: usize) -> &DiscreteToleranceDist {
        &self.0[player]
    }

    pub fn per_player(&self) -> &[DiscreteToleranceDist] {
        &self.0
    }
}

/// Whether `hi` stochastically dominates `lo` for every player.
pub fn stochastically_dominates(
    hi: &DiscreteToleranceProfile,
    lo: &DiscreteToleranceProfile,
    eps: f64,
) -> Result<bool> {
    if hi.num_players() != lo.num_players() {
        return Err(Error::DimensionMismatch(format!(
            "profiles for {} and {} players",
            hi.num_players(),
            lo.num_players()
        )));
    }
    Ok(hi.0.iter().zip(&lo.0).all(|(h, l)| h.dominates(l, eps)))
}

/// Continuous tolerance distribution families.
#[derive(Debug, Clone, PartialEq)]
pub enum ToleranceCdf {
    /// Uniform on `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    /// Linear interpolation through `(x, F(x))` knots; the first knot has
    /// `F = 0` and the last `F = 1`.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
    /// Exponential with `rate`, starting at `loc` and truncated at `loc + cap`.
    TruncatedExponential { rate: f64, cap: f64, loc: f64 },
}

impl ToleranceCdf {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        let cdf = Self::Uniform { lo, hi };
        cdf.validate()?;
        Ok(cdf)
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        let cdf = Self::PiecewiseLinear { knots };
        cdf.validate()?;
        Ok(cdf)
    }

    pub fn truncated_exponential(rate: f64, cap: f64) -> Result<Self> {
        let cdf = Self::TruncatedExponential { rate, cap, loc: 0.0 };
        cdf.validate()?;
        Ok(cdf)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidDistribution(m.to_string()));
        match self {
            Self::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite()) || *lo < 0.0 || hi <= lo {
                    return bad("uniform needs 0 <= lo < hi");
                }
            }
            Self::PiecewiseLinear { knots } => {
                if knots.len() < 2 {
                    return bad("piecewise-linear CDF needs at least two knots");
                }
                if knots.iter().any(|(x, f)| !x.is_finite() || !f.is_finite()) {
                    return bad("knots must be finite");
                }
                if knots[0].0 < 0.0 {
                    return bad("knots must start at a non-negative tolerance");
                }
                if knots.windows(2).any(|w| w[0].0 >= w[1].0 || w[0].1 > w[1].1) {
                    return bad("knot abscissae must ascend strictly and values must not decrease");
                }
                if knots[0].1 != 0.0 || knots[knots.len() - 1].1 != 1.0 {
                    return bad("first knot must have F = 0 and last knot F = 1");
                }
            }
            Self::TruncatedExponential { rate, cap, loc } => {
                if !(rate.is_finite() && *rate > 0.0) {
                    return bad("rate must be positive");
                }
                if !(cap.is_finite() && *cap > 0.0) {
                    return bad("cap must be positive");
                }
                if !(loc.is_finite() && *loc >= 0.0) {
                    return bad("location must be non-negative");
                }
            }
        }
        Ok(())
    }

    /// All supported families are continuous everywhere.
    pub fn is_continuous(&self) -> bool {
        true
    }

    /// F(x).
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Self::PiecewiseLinear { knots } => {
                if x <= knots[0].0 {
                    return 0.0;
                }
                let last = knots[knots.len() - 1];
                if x >= last.0 {
                    return 1.0;
                }
                let k = knots.partition_point(|&(kx, _)| kx <= x);
                let (x0, f0) = knots[k - 1];
                let (x1, f1) = knots[k];
                f0 + (f1 - f0) * (x - x0) / (x1 - x0)
            }
            Self::TruncatedExponential { rate, cap, loc } => {
                let z = x - loc;
                if z <= 0.0 {
                    0.0
                } else if z >= *cap {
                    1.0
                } else {
                    (-(-rate * z).exp_m1() / -(-rate * cap).exp_m1()).clamp(0.0, 1.0)
                }
            }
        }
    }

    /// The distribution translated right by `delta`; stochastically
    /// dominates `self` when `delta >= 0`.
    pub fn shifted(&self, delta: f64) -> Result<Self> {
        let out = match self {
            Self::Uniform { lo, hi } => Self::Uniform {
                lo: lo + delta,
                hi: hi + delta,
            },
            Self::PiecewiseLinear { knots } => Self::PiecewiseLinear {
                knots: knots.iter().map(|&(x, f)| (x + delta, f)).collect(),
            },
            Self::TruncatedExponential { rate, cap, loc } => Self::TruncatedExponential {
                rate: *rate,
                cap: *cap,
                loc: loc + delta,
            },
        };
        out.validate()?;
        Ok(out)
    }

    /// Smallest x with F(x) = 0 on its left, i.e. the lower end of the support.
    pub fn support_start(&self) -> f64 {
        match self {
            Self::Uniform { lo, .. } => *lo,
            Self::PiecewiseLinear { knots } => knots[0].0,
            Self::TruncatedExponential { loc, .. } => *loc,
        }
    }

    /// Upper end of the support.
    pub fn support_end(&self) -> f64 {
        match self {
            Self::Uniform { hi, .. } => *hi,
            Self::PiecewiseLinear { knots } => knots[knots.len() - 1].0,
            Self::TruncatedExponential { cap, loc, .. } => loc + cap,
        }
    }
}

/// Assignment of a mixed strategy to every atom of a tolerance distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeStrategyMap {
    atoms: Vec<f64>,
    strategies: Vec<MixedStrategy>,
}

impl TypeStrategyMap {
    /// `strategies[k]` is played by the type at `dist.support()[k]`.
    pub fn new(dist: &DiscreteToleranceDist, strategies: Vec<MixedStrategy>) -> Result<Self> {
        if strategies.len() != dist.len() {
            return Err(Error::DomainMismatch(format!(
                "{} strategies for {} tolerance atoms",
                strategies.len(),
                dist.len()
            )));
        }
        if let Some(s) = strategies.iter().find(|s| s.len() != strategies[0].len()) {
            return Err(Error::DomainMismatch(format!(
                "strategies over {} and {} pure strategies",
                strategies[0].len(),
                s.len()
            )));
        }
        Ok(Self {
            atoms: dist.support().to_vec(),
            strategies,
        })
    }

    /// Builds from explicit `(tolerance, strategy)` pairs, checked against `dist`.
    pub fn from_entries(
        dist: &DiscreteToleranceDist,
        entries: Vec<(f64, MixedStrategy)>,
        eps: f64,
    ) -> Result<Self> {
        if entries.len() != dist.len()
            || entries
                .iter()
                .zip(dist.support())
                .any(|((t, _), s)| (t - s).abs() > eps)
        {
            return Err(Error::DomainMismatch(
                "entry tolerances differ from the distribution's support".into(),
            ));
        }
        Self::new(dist, entries.into_iter().map(|(_, s)| s).collect())
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn strategies(&self) -> &[MixedStrategy] {
        &self.strategies
    }

    pub fn strategy_at(&self, k: usize) -> &MixedStrategy {
        &self.strategies[k]
    }

    pub fn num_pure(&self) -> usize {
        self.strategies[0].len()
    }

    /// `sum_t pi(t) g(t)` as a probability vector.
    pub fn mixture(&self, dist: &DiscreteToleranceDist) -> Vec<f64> {
        let mut out = vec![0.0; self.num_pure()];
        for (p, g) in dist.probs().iter().zip(&self.strategies) {
            for (o, q) in out.iter_mut().zip(g.probs()) {
                *o += p * q;
            }
        }
        out
    }

    fn matches(&self, dist: &DiscreteToleranceDist) -> bool {
        self.atoms.len() == dist.len() && self.atoms.iter().zip(dist.support()).all(|(a, b)| a == b)
    }
}

/// How mass of one atom of the dominating distribution is drawn from the
/// atoms of the dominated one.
#[derive(Debug, Clone, PartialEq)]
pub struct RemapStep {
    /// Index of the last dominated atom drawn from (least `h` with
    /// `F(t_h) >= F'(t'_j)`).
    pub alpha: usize,
    /// Mass allocated to that atom's strategy.
    pub beta: f64,
    /// `(dominated atom index, mass)` pairs; masses sum to `pi'(t'_j)`.
    pub weights: Vec<(usize, f64)>,
}

/// Monotone transport plan from `lo` onto the dominating `hi`.
pub fn remap_plan(
    lo: &DiscreteToleranceDist,
    hi: &DiscreteToleranceDist,
    eps: f64,
) -> Result<Vec<RemapStep>> {
    if let Some(at) = hi.first_dominance_violation(lo, eps) {
        return Err(Error::DominanceViolation { player: 0, at });
    }
    let f = |h: usize| lo.cdf_at_atom(h);
    // F(t_{h-1}) with F(t_0) = 0 below the support.
    let f_before = |h: usize| if h == 0 { 0.0 } else { lo.cdf_at_atom(h - 1) };
    let mut steps: Vec<RemapStep> = Vec::with_capacity(hi.len());
    for j in 0..hi.len() {
        let target = hi.cdf_at_atom(j);
        let alpha = (0..lo.len())
            .find(|&h| f(h) >= target - eps)
            .unwrap_or(lo.len() - 1);
        if lo.support()[alpha] > hi.support()[j] {
            return Err(Error::DominanceViolation {
                player: 0,
                at: hi.support()[j],
            });
        }
        let mut weights = Vec::new();
        let beta;
        match steps.last() {
            Some(prev) if prev.alpha == alpha => {
                // Same dominated atom continues to supply the whole atom.
                beta = hi.probs()[j];
                weights.push((alpha, beta));
            }
            prev => {
                if let Some(prev) = prev {
                    let residual = f(prev.alpha) - hi.cdf_at_atom(j - 1);
                    if residual < -eps {
                        return Err(Error::NegativeResidual {
                            index: j,
                            value: residual,
                        });
                    }
                    weights.push((prev.alpha, residual.max(0.0)));
                    for h in prev.alpha + 1..alpha {
                        weights.push((h, lo.probs()[h]));
                    }
                } else {
                    for h in 0..alpha {
                        weights.push((h, lo.probs()[h]));
                    }
                }
                let b = target - f_before(alpha);
                if b < -eps {
                    return Err(Error::NegativeResidual { index: j, value: b });
                }
                beta = b.max(0.0);
                weights.push((alpha, beta));
            }
        }
        weights.retain(|&(_, w)| w > 0.0);
        steps.push(RemapStep {
            alpha,
            beta,
            weights,
        });
    }
    Ok(steps)
}

/// Transports `g` (defined on `lo`'s support) to a map on `hi`'s support
/// such that `sum pi'(t') g'(t') = sum pi(t) g(t)` and every type `t'`
/// only draws from types `t <= t'`.
pub fn dominance_remap(
    lo: &DiscreteToleranceDist,
    hi: &DiscreteToleranceDist,
    g: &TypeStrategyMap,
    eps: f64,
) -> Result<TypeStrategyMap> {
    if !g.matches(lo) {
        return Err(Error::DomainMismatch(
            "map is not defined on the dominated distribution's support".into(),
        ));
    }
    let plan = remap_plan(lo, hi, eps)?;
    let n = g.num_pure();
    let strategies = plan
        .iter()
        .map(|step| {
            let mut v = vec![0.0; n];
            let total: f64 = step.weights.iter().map(|(_, w)| w).sum();
            for &(h, w) in &step.weights {
                for (o, q) in v.iter_mut().zip(g.strategy_at(h).probs()) {
                    *o += w * q;
                }
            }
            if total > 0.0 {
                v.iter_mut().for_each(|x| *x /= total);
            } else {
                // Degenerate atom with no recorded mass; draw from the nearest source.
                v = g.strategy_at(step.alpha).probs().to_vec();
            }
            MixedStrategy::new(v, 1e-6)
        })
        .collect::<Result<Vec<_>>>()?;
    TypeStrategyMap::new(hi, strategies)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_EPS;
    use proptest::prelude::*;

    fn dist(pairs: &[(f64, f64)]) -> DiscreteToleranceDist {
        DiscreteToleranceDist::new(
            pairs.iter().map(|p| p.0).collect(),
            pairs.iter().map(|p| p.1).collect(),
            DEFAULT_EPS,
        )
        .unwrap()
    }

    const C: usize = 0;
    const D: usize = 1;

    #[test]
    fn discrete_cdf_values() {
        let pm = DiscreteToleranceDist::point_mass(0.0).unwrap();
        assert_eq!(cdf_of_discrete(&pm, 0.0), 1.0);
        let d = dist(&[(0.0, 0.7), (3.0, 0.3)]);
        assert_eq!(cdf_of_discrete(&d, 1.0), 0.7);
        assert_eq!(cdf_of_discrete(&d, -1.0), 0.0);
        assert_eq!(d.cdf(3.0), 1.0);
        assert_eq!(d.cdf_strict(3.0), 0.7);
    }

    #[test]
    fn distribution_validation() {
        assert!(DiscreteToleranceDist::new(vec![1.0, 0.5], vec![0.5, 0.5], DEFAULT_EPS).is_err());
        assert!(DiscreteToleranceDist::new(vec![-1.0], vec![1.0], DEFAULT_EPS).is_err());
        assert!(DiscreteToleranceDist::new(vec![0.0, 1.0], vec![0.5, 0.4], DEFAULT_EPS).is_err());
        assert!(DiscreteToleranceDist::new(vec![0.0, 1.0], vec![1.0, 0.0], DEFAULT_EPS).is_err());
        assert!(ToleranceCdf::uniform(2.0, 1.0).is_err());
        assert!(ToleranceCdf::piecewise_linear(vec![(0.0, 0.1), (1.0, 1.0)]).is_err());
        assert!(ToleranceCdf::truncated_exponential(-1.0, 1.0).is_err());
    }

    #[test]
    fn dominance_examples() {
        let a = DiscreteToleranceProfile::new(vec![dist(&[(1.0, 0.5), (4.0, 0.5)])]);
        assert!(stochastically_dominates(&a, &a, DEFAULT_EPS).unwrap());
        let zero = DiscreteToleranceProfile::point_masses(0.0, 2).unwrap();
        let small = DiscreteToleranceProfile::point_masses(0.01, 2).unwrap();
        assert!(stochastically_dominates(&small, &zero, DEFAULT_EPS).unwrap());
        assert!(!stochastically_dominates(&zero, &small, DEFAULT_EPS).unwrap());
        let hi = DiscreteToleranceProfile::new(vec![dist(&[(0.0, 0.5), (5.0, 0.5)])]);
        assert!(!stochastically_dominates(&hi, &a, DEFAULT_EPS).unwrap());
    }

    #[test]
    fn continuous_families() {
        let u = ToleranceCdf::uniform(0.0, 4.0).unwrap();
        assert_eq!(u.eval(-1.0), 0.0);
        assert_eq!(u.eval(1.6), 0.4);
        assert_eq!(u.eval(9.0), 1.0);
        let pl = ToleranceCdf::piecewise_linear(vec![(1.0, 0.0), (2.0, 0.5), (4.0, 1.0)]).unwrap();
        assert_eq!(pl.eval(0.5), 0.0);
        assert_eq!(pl.eval(1.5), 0.25);
        assert_eq!(pl.eval(3.0), 0.75);
        assert_eq!(pl.eval(4.0), 1.0);
        let e = ToleranceCdf::truncated_exponential(1.0, 2.0).unwrap();
        let expect = (1.0 - (-1.0f64).exp()) / (1.0 - (-2.0f64).exp());
        assert!((e.eval(1.0) - expect).abs() < 1e-14);
        assert_eq!(e.eval(2.0), 1.0);
        let s = u.shifted(1.0).unwrap();
        assert_eq!(s.eval(1.0), 0.0);
        assert_eq!(s.eval(3.0), 0.5);
        let es = e.shifted(0.5).unwrap();
        assert!((es.eval(1.5) - expect).abs() < 1e-14);
    }

    #[test]
    fn identity_remap() {
        let d = dist(&[(0.0, 0.2), (1.0, 0.3), (2.0, 0.5)]);
        let g = TypeStrategyMap::new(
            &d,
            vec![
                MixedStrategy::pure(2, D),
                MixedStrategy::two_point(0.4),
                MixedStrategy::pure(2, C),
            ],
        )
        .unwrap();
        let plan = remap_plan(&d, &d, DEFAULT_EPS).unwrap();
        for (j, step) in plan.iter().enumerate() {
            assert_eq!(step.alpha, j);
            assert!((step.beta - d.probs()[j]).abs() < 1e-12);
        }
        let out = dominance_remap(&d, &d, &g, DEFAULT_EPS).unwrap();
        for (a, b) in out.strategies().iter().zip(g.strategies()) {
            for (x, y) in a.probs().iter().zip(b.probs()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shifted_two_atom_remap() {
        let lo = dist(&[(0.0, 0.5), (3.0, 0.5)]);
        let hi = dist(&[(1.0, 0.5), (4.0, 0.5)]);
        let g = TypeStrategyMap::new(&lo, vec![MixedStrategy::pure(2, D), MixedStrategy::pure(2, C)]).unwrap();
        let plan = remap_plan(&lo, &hi, DEFAULT_EPS).unwrap();
        assert_eq!((plan[0].alpha, plan[1].alpha), (0, 1));
        assert!((plan[0].beta - 0.5).abs() < 1e-12 && (plan[1].beta - 0.5).abs() < 1e-12);
        let out = dominance_remap(&lo, &hi, &g, DEFAULT_EPS).unwrap();
        assert_eq!(out.strategy_at(0).probs(), &[0.0, 1.0]);
        assert_eq!(out.strategy_at(1).probs(), &[1.0, 0.0]);
        assert_eq!(out.mixture(&hi), g.mixture(&lo));
    }

    #[test]
    fn single_atom_absorbs_everything() {
        let lo = dist(&[(0.0, 0.25), (2.0, 0.75)]);
        let hi = DiscreteToleranceDist::point_mass(2.0).unwrap();
        let g = TypeStrategyMap::new(&lo, vec![MixedStrategy::pure(2, D), MixedStrategy::pure(2, C)]).unwrap();
        let out = dominance_remap(&lo, &hi, &g, DEFAULT_EPS).unwrap();
        let p = out.strategy_at(0).probs();
        assert!((p[C] - 0.75).abs() < 1e-12 && (p[D] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn one_source_atom_feeds_several_targets() {
        let lo = DiscreteToleranceDist::point_mass(0.0).unwrap();
        let hi = dist(&[(1.0, 1.0 / 3.0), (2.0, 1.0 / 3.0), (3.0, 1.0 / 3.0)]);
        let g = TypeStrategyMap::new(&lo, vec![MixedStrategy::two_point(0.25)]).unwrap();
        let plan = remap_plan(&lo, &hi, DEFAULT_EPS).unwrap();
        for (j, step) in plan.iter().enumerate() {
            assert_eq!(step.alpha, 0);
            assert!(step.beta >= 0.0 && step.beta <= hi.probs()[j] + 1e-12);
        }
        let out = dominance_remap(&lo, &hi, &g, DEFAULT_EPS).unwrap();
        for s in out.strategies() {
            assert!((s.probs()[0] - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn remap_errors() {
        let lo = dist(&[(1.0, 0.5), (4.0, 0.5)]);
        let hi = dist(&[(0.0, 0.5), (5.0, 0.5)]);
        let g = TypeStrategyMap::new(&lo, vec![MixedStrategy::pure(2, D), MixedStrategy::pure(2, C)]).unwrap();
        assert!(matches!(
            dominance_remap(&lo, &hi, &g, DEFAULT_EPS),
            Err(Error::DominanceViolation { .. })
        ));
        let other = dist(&[(0.0, 0.5), (2.0, 0.5)]);
        assert!(matches!(
            dominance_remap(&other, &lo, &g, DEFAULT_EPS),
            Err(Error::DomainMismatch(_))
        ));
    }

    fn arb_dist() -> impl Strategy<Value = DiscreteToleranceDist> {
        prop::collection::btree_set(0u32..40, 1..6)
            .prop_flat_map(|atoms| {
                let n = atoms.len();
                (Just(atoms), prop::collection::vec(0.05f64..1.0, n))
            })
            .prop_map(|(atoms, w)| {
                let s: f64 = w.iter().sum();
                let mut probs: Vec<f64> = w.iter().map(|x| x / s).collect();
                let head: f64 = probs[..probs.len() - 1].iter().sum();
                *probs.last_mut().unwrap() = 1.0 - head;
                DiscreteToleranceDist::new(
                    atoms.into_iter().map(|a| a as f64 * 0.25).collect(),
                    probs,
                    DEFAULT_EPS,
                )
                .unwrap()
            })
    }

    /// A dominating distribution: move every atom right by a random amount.
    fn arb_dominating_pair() -> impl Strategy<Value = (DiscreteToleranceDist, DiscreteToleranceDist)> {
        arb_dist().prop_flat_map(|lo| {
            let n = lo.len();
            (Just(lo), prop::collection::vec(0u32..12, n))
        })
        .prop_map(|(lo, shifts)| {
            let mut moved: Vec<(f64, f64)> = lo
                .support()
                .iter()
                .zip(lo.probs())
                .zip(&shifts)
                .map(|((t, p), s)| (t + *s as f64 * 0.25, *p))
                .collect();
            moved.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut support: Vec<f64> = Vec::new();
            let mut probs: Vec<f64> = Vec::new();
            for (t, p) in moved {
                if support.last() == Some(&t) {
                    *probs.last_mut().unwrap() += p;
                } else {
                    support.push(t);
                    probs.push(p);
                }
            }
            let hi = DiscreteToleranceDist::new(support, probs, 1e-9).unwrap();
            (lo, hi)
        })
    }

    proptest! {
        #[test]
        fn remap_conserves_mass_and_orders_support(
            (lo, hi) in arb_dominating_pair(),
            seeds in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 3), 6),
        ) {
            prop_assert!(hi.dominates(&lo, DEFAULT_EPS));
            let strategies = (0..lo.len()).map(|k| {
                let w = &seeds[k];
                let s: f64 = w.iter().sum::<f64>() + 1e-6;
                MixedStrategy::new(w.iter().map(|x| (x + 1e-6 / 3.0) / s).collect(), 1e-9).unwrap()
            }).collect();
            let g = TypeStrategyMap::new(&lo, strategies).unwrap();
            let plan = remap_plan(&lo, &hi, DEFAULT_EPS).unwrap();
            for (j, step) in plan.iter().enumerate() {
                prop_assert!(lo.support()[step.alpha] <= hi.support()[j]);
                prop_assert!(step.beta >= 0.0 && step.beta <= hi.probs()[j] + 1e-12);
                let total: f64 = step.weights.iter().map(|w| w.1).sum();
                prop_assert!((total - hi.probs()[j]).abs() < 1e-9);
                for &(h, _) in &step.weights {
                    prop_assert!(lo.support()[h] <= hi.support()[j]);
                }
            }
            let out = dominance_remap(&lo, &hi, &g, DEFAULT_EPS).unwrap();
            for s in out.strategies() {
                prop_assert!((s.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
            for (a, b) in out.mixture(&hi).iter().zip(g.mixture(&lo)) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn dominance_reflexive_and_transitive(a in arb_dist(), b in arb_dist(), c in arb_dist()) {
            prop_assert!(a.dominates(&a, DEFAULT_EPS));
            if b.dominates(&a, DEFAULT_EPS) && c.dominates(&b, DEFAULT_EPS) {
                prop_assert!(c.dominates(&a, DEFAULT_EPS));
            }
        }
    }
}
