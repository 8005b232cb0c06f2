//! Particularly cooperative equilibria of the Prisoner's Dilemma.
//!
//! A player facing an opponent who cooperates with probability `alpha`
//! gains `alpha * dC + (1 - alpha) * dD` by defecting, where `dC = c - a`
//! and `dD = d - b`. Players cooperate whenever that gain is within their
//! tolerance, so with tolerance CDF `F` a symmetric equilibrium
//! cooperation rate solves
//!
//! ```text
//! 1 - alpha = F(alpha * dC + (1 - alpha) * dD)
//! ```
//!
//! Continuous `F` always admits a solution; with atoms a solution may not
//! exist, which [`solve_discrete`] detects exactly.

use crate::games::{Game, MixedStrategy};
use crate::tolerance::{DiscreteToleranceDist, ToleranceCdf};
use crate::{Error, Result};

/// Row-player payoffs for `(C,C)`, `(C,D)`, `(D,C)`, `(D,D)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdPayoffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl PdPayoffs {
    /// Requires `c > a > d > b`.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if ![a, b, c, d].iter().all(|x| x.is_finite()) || !(c > a && a > d && d > b) {
            return Err(Error::InvalidPayoffs(format!(
                "need c > a > d > b, got a = {a}, b = {b}, c = {c}, d = {d}"
            )));
        }
        Ok(Self { a, b, c, d })
    }

    /// Gain from defecting against a cooperator.
    pub fn delta_c(&self) -> f64 {
        self.c - self.a
    }

    /// Gain from defecting against a defector.
    pub fn delta_d(&self) -> f64 {
        self.d - self.b
    }

    /// The symmetric two-player game, strategy 0 = C and 1 = D.
    pub fn to_game(&self) -> Game {
        let Self { a, b, c, d } = *self;
        Game::from_fn(vec![vec!["C".into(), "D".into()]; 2], |s| match (s[0], s[1]) {
            (0, 0) => vec![a, a],
            (0, _) => vec![b, c],
            (_, 0) => vec![c, b],
            _ => vec![d, d],
        })
        .expect("2x2 payoffs are finite")
    }
}

fn check_alpha(alpha: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(alpha)
    } else {
        Err(Error::OutOfRange(format!("cooperation probability {alpha}")))
    }
}

/// Minimal tolerance at which cooperating is acceptable when the opponent
/// cooperates with probability `alpha_other`.
pub fn willingness_gap(p: &PdPayoffs, alpha_other: f64) -> Result<f64> {
    let alpha = check_alpha(alpha_other)?;
    Ok(gap(p, alpha))
}

fn gap(p: &PdPayoffs, alpha: f64) -> f64 {
    alpha * p.delta_c() + (1.0 - alpha) * p.delta_d()
}

/// Share of the population tolerant enough to cooperate.
pub fn cooperation_probability(p: &PdPayoffs, cdf: &ToleranceCdf, alpha_other: f64) -> Result<f64> {
    Ok(1.0 - cdf.eval(willingness_gap(p, alpha_other)?))
}

/// `1 - alpha - F(gap(alpha))`; zero exactly at symmetric equilibria.
pub fn fixed_point_residual(p: &PdPayoffs, cdf: &ToleranceCdf, alpha: f64) -> f64 {
    1.0 - alpha - cdf.eval(gap(p, alpha))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointRoot {
    pub alpha: f64,
    /// Grid cell (or point) the root was found in.
    pub bracket: (f64, f64),
    pub residual: f64,
    /// Touches zero without changing sign.
    pub marginal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    /// `dC > dD`: the right-hand side increases in `alpha`, one crossing.
    Unique,
    /// `dC <= dD`: several crossings are possible.
    PossiblyMultiple,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointReport {
    pub roots: Vec<FixedPointRoot>,
    /// `alpha = 0` is an equilibrium, i.e. `F(dD) = 1`.
    pub has_zero_root: bool,
    pub uniqueness_certified: bool,
    pub classification: Structure,
}

impl FixedPointReport {
    pub fn alphas(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.alpha).collect()
    }
}

/// Bisect a sign change of `f` on `[lo, hi]` down to adjacent floats.
fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
    }
    if f_lo.abs() <= f_hi.abs() {
        lo
    } else {
        hi
    }
}

/// Golden-section minimum of `|f|` on `[lo, hi]`.
fn min_abs<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1).abs(), f(x2).abs());
    for _ in 0..200 {
        if hi - lo < 1e-15 {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1).abs();
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2).abs();
        }
    }
    if f1 < f2 {
        x1
    } else {
        x2
    }
}

/// All roots of `f` on `[0, 1]`: grid points with `|f| <= tol`, bisected
/// sign changes, and tangential touches found by minimizing `|f|` around
/// grid-level local minima.
fn scan_roots<F: Fn(f64) -> f64>(f: F, grid: usize, tol: f64) -> Vec<FixedPointRoot> {
    let xs: Vec<f64> = (0..=grid).map(|k| k as f64 / grid as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let zero: Vec<bool> = ys.iter().map(|y| y.abs() <= tol).collect();
    let mut roots = Vec::new();
    for k in 0..=grid {
        if zero[k] && (k == 0 || !zero[k - 1]) {
            roots.push(FixedPointRoot {
                alpha: xs[k],
                bracket: (xs[k], xs[k]),
                residual: ys[k],
                marginal: false,
            });
        }
    }
    for k in 0..grid {
        if !zero[k] && !zero[k + 1] && ys[k].signum() != ys[k + 1].signum() {
            let x = bisect(&f, xs[k], xs[k + 1]);
            roots.push(FixedPointRoot {
                alpha: x,
                bracket: (xs[k], xs[k + 1]),
                residual: f(x),
                marginal: false,
            });
        }
    }
    for k in 1..grid {
        let same_sign = ys[k - 1].signum() == ys[k].signum() && ys[k].signum() == ys[k + 1].signum();
        let local_min = ys[k].abs() <= ys[k - 1].abs() && ys[k].abs() <= ys[k + 1].abs();
        if same_sign && local_min && !zero[k - 1] && !zero[k] && !zero[k + 1] {
            let x = min_abs(&f, xs[k - 1], xs[k + 1]);
            let r = f(x);
            if r.abs() <= tol {
                roots.push(FixedPointRoot {
                    alpha: x,
                    bracket: (xs[k - 1], xs[k + 1]),
                    residual: r,
                    marginal: true,
                });
            }
        }
    }
    roots.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    roots
}

fn check_solver(grid: usize, tol_root: f64) -> Result<()> {
    if grid < 1000 {
        return Err(Error::DegenerateGrid { min: 1000, got: grid });
    }
    if tol_root.is_nan() || tol_root <= 0.0 {
        return Err(Error::OutOfRange(format!("root tolerance {tol_root}")));
    }
    Ok(())
}

/// All symmetric particularly cooperative equilibria for continuous `cdf`.
pub fn solve_symmetric(
    p: &PdPayoffs,
    cdf: &ToleranceCdf,
    grid: usize,
    tol_root: f64,
    eps: f64,
) -> Result<FixedPointReport> {
    check_solver(grid, tol_root)?;
    let roots = scan_roots(|a| fixed_point_residual(p, cdf, a), grid, tol_root);
    let unique = p.delta_c() > p.delta_d();
    Ok(FixedPointReport {
        roots,
        has_zero_root: cdf.eval(p.delta_d()) >= 1.0 - eps,
        uniqueness_certified: unique,
        classification: if unique {
            Structure::Unique
        } else {
            Structure::PossiblyMultiple
        },
    })
}

/// `(alpha, lhs, rhs)` samples of both sides of the fixed-point equation.
pub fn fixed_point_curve(p: &PdPayoffs, cdf: &ToleranceCdf, points: usize) -> Vec<(f64, f64, f64)> {
    let n = points.max(2) - 1;
    (0..=n)
        .map(|k| {
            let alpha = k as f64 / n as f64;
            (alpha, 1.0 - alpha, cdf.eval(gap(p, alpha)))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum DiscreteOutcome {
    Solutions(Vec<f64>),
    NonExistence,
}

/// Symmetric particularly cooperative equilibria for a finite tolerance
/// distribution. A type exactly at the gap cooperates, so the cooperation
/// share at `alpha` is `1 - P(T < gap(alpha))`. That share can only take
/// the values `1 - F(t_k)` (and 1), so checking each of them as a
/// candidate finds every solution.
pub fn solve_discrete(p: &PdPayoffs, pi: &DiscreteToleranceDist, eps: f64) -> DiscreteOutcome {
    let share = |alpha: f64| 1.0 - pi.cdf_strict(gap(p, alpha) - eps);
    let mut candidates: Vec<f64> = std::iter::once(1.0)
        .chain((0..pi.len()).map(|k| 1.0 - pi.cdf_at_atom(k)))
        .map(|v| v.clamp(0.0, 1.0))
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup_by(|x, y| (*x - *y).abs() <= eps);
    let solutions: Vec<f64> = candidates
        .into_iter()
        .filter(|&v| (share(v) - v).abs() <= eps)
        .collect();
    if solutions.is_empty() {
        DiscreteOutcome::NonExistence
    } else {
        DiscreteOutcome::Solutions(solutions)
    }
}

/// Mutually consistent cooperation probabilities `(alpha1, alpha2)` where
/// each player's share is `1 - F_i(gap_i(alpha_j))`.
pub fn solve_asymmetric(
    p1: &PdPayoffs,
    p2: &PdPayoffs,
    f1: &ToleranceCdf,
    f2: &ToleranceCdf,
    grid: usize,
    tol_root: f64,
) -> Result<Vec<(f64, f64)>> {
    check_solver(grid, tol_root)?;
    let reply1 = |alpha2: f64| 1.0 - f1.eval(gap(p1, alpha2));
    let reply2 = |alpha1: f64| 1.0 - f2.eval(gap(p2, alpha1));
    let roots = scan_roots(|a1| a1 - reply1(reply2(a1)), grid, tol_root);
    Ok(roots.into_iter().map(|r| (r.alpha, reply2(r.alpha))).collect())
}

/// Parameter varied in a comparative-statics sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    A,
    B,
    C,
    D,
    /// Sets `c = a + value`.
    DeltaC,
    /// Sets `b = d - value`.
    DeltaD,
    /// Translates the CDF right by `value`.
    Shift,
}

impl std::str::FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "a" => Self::A,
            "b" => Self::B,
            "c" => Self::C,
            "d" => Self::D,
            "dc" | "delta_c" | "deltac" => Self::DeltaC,
            "dd" | "delta_d" | "deltad" => Self::DeltaD,
            "shift" => Self::Shift,
            other => return Err(Error::Parse(format!("unknown sweep parameter '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub alpha_star: f64,
    pub branch: usize,
    pub marginal: bool,
}

/// Re-solves the symmetric equation for each value and follows every root
/// present at the first value by nearest-root continuation.
pub fn comparative_statics_sweep(
    base: &PdPayoffs,
    cdf: &ToleranceCdf,
    parameter: SweepParameter,
    values: &[f64],
    grid: usize,
    tol_root: f64,
    eps: f64,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    let mut branches: Vec<f64> = Vec::new();
    for &v in values {
        let PdPayoffs { a, b, c, d } = *base;
        let (payoffs, law) = match parameter {
            SweepParameter::A => (PdPayoffs::new(v, b, c, d)?, cdf.clone()),
            SweepParameter::B => (PdPayoffs::new(a, v, c, d)?, cdf.clone()),
            SweepParameter::C => (PdPayoffs::new(a, b, v, d)?, cdf.clone()),
            SweepParameter::D => (PdPayoffs::new(a, b, c, v)?, cdf.clone()),
            SweepParameter::DeltaC => (PdPayoffs::new(a, b, a + v, d)?, cdf.clone()),
            SweepParameter::DeltaD => (PdPayoffs::new(a, d - v, c, d)?, cdf.clone()),
            SweepParameter::Shift => (*base, cdf.shifted(v)?),
        };
        let report = solve_symmetric(&payoffs, &law, grid, tol_root, eps)?;
        if branches.is_empty() {
            branches = report.alphas();
        }
        for (id, prev) in branches.iter_mut().enumerate() {
            let nearest = report
                .roots
                .iter()
                .min_by(|x, y| (x.alpha - *prev).abs().total_cmp(&(y.alpha - *prev).abs()))
                .expect("a continuous CDF always yields a root");
            *prev = nearest.alpha;
            rows.push(SweepRow {
                value: v,
                alpha_star: nearest.alpha,
                branch: id,
                marginal: nearest.marginal,
            });
        }
    }
    Ok(rows)
}

/// Mixed strategy cooperating with probability `alpha`.
pub fn cooperation_mix(alpha: f64) -> MixedStrategy {
    MixedStrategy::two_point(alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{self, MixedProfile};
    use crate::DEFAULT_EPS;
    use proptest::prelude::*;

    fn example() -> PdPayoffs {
        PdPayoffs::new(3.0, -1.0, 5.0, 0.0).unwrap()
    }

    /// u_D - u_C computed from the 2x2 game's expected utilities.
    fn gap_via_utilities(p: &PdPayoffs, alpha: f64) -> f64 {
        let g = p.to_game();
        let prof = MixedProfile::new(vec![MixedStrategy::pure(2, 0), cooperation_mix(alpha)]);
        games::regret(&g, &prof, 0, 0).unwrap()
    }

    #[test]
    fn payoff_validation() {
        assert!(PdPayoffs::new(3.0, -1.0, 2.0, 0.0).is_err());
        assert!(PdPayoffs::new(3.0, 1.0, 5.0, 0.0).is_err());
        let p = example();
        assert_eq!((p.delta_c(), p.delta_d()), (2.0, 1.0));
    }

    #[test]
    fn gap_values() {
        let p = example();
        assert_eq!(willingness_gap(&p, 0.0).unwrap(), p.delta_d());
        for alpha in [0.0, 0.25, 0.5, 1.0] {
            assert!((willingness_gap(&p, alpha).unwrap() - (alpha + 1.0)).abs() < 1e-15);
        }
        assert!(willingness_gap(&p, 1.5).is_err());
    }

    #[test]
    fn probability_values() {
        let p = example();
        let small = ToleranceCdf::uniform(0.0, 0.9).unwrap();
        let big = ToleranceCdf::uniform(2.5, 3.0).unwrap();
        let mid = ToleranceCdf::uniform(0.0, 4.0).unwrap();
        for k in 0..=10 {
            let alpha = k as f64 / 10.0;
            assert_eq!(cooperation_probability(&p, &small, alpha).unwrap(), 0.0);
            assert_eq!(cooperation_probability(&p, &big, alpha).unwrap(), 1.0);
        }
        assert!((cooperation_probability(&p, &mid, 0.6).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn uniform_instance_has_closed_form_root() {
        let f = ToleranceCdf::uniform(0.0, 4.0).unwrap();
        let r = solve_symmetric(&example(), &f, 10_000, 1e-12, DEFAULT_EPS).unwrap();
        assert_eq!(r.roots.len(), 1);
        assert!((r.roots[0].alpha - 0.6).abs() < 1e-9);
        assert!(r.uniqueness_certified && !r.has_zero_root);
        assert_eq!(r.classification, Structure::Unique);
    }

    #[test]
    fn zero_root_when_everyone_tolerates_less_than_dd() {
        let p = example();
        let f = ToleranceCdf::uniform(0.0, p.delta_d()).unwrap();
        let r = solve_symmetric(&p, &f, 10_000, 1e-12, DEFAULT_EPS).unwrap();
        assert!(r.has_zero_root);
        assert_eq!(r.roots[0].alpha, 0.0);
    }

    #[test]
    fn full_cooperation_root_at_right_endpoint() {
        let p = example();
        let f = ToleranceCdf::uniform(5.0, 10.0).unwrap();
        let r = solve_symmetric(&p, &f, 10_000, 1e-12, DEFAULT_EPS).unwrap();
        assert_eq!(r.alphas(), vec![1.0]);
        assert_eq!(r.roots[0].residual, 0.0);
    }

    #[test]
    fn steep_cdf_gives_three_crossings() {
        // dD = 2 > dC = 1
        let p = PdPayoffs::new(3.0, -2.0, 4.0, 0.0).unwrap();
        let f = ToleranceCdf::piecewise_linear(vec![
            (0.0, 0.0),
            (1.0, 0.05),
            (1.4, 0.3),
            (1.7, 0.8),
            (2.0, 0.9),
            (3.0, 1.0),
        ])
        .unwrap();
        let r = solve_symmetric(&p, &f, 10_000, 1e-12, DEFAULT_EPS).unwrap();
        assert_eq!(r.roots.len(), 3, "{:?}", r.roots);
        assert_eq!(r.classification, Structure::PossiblyMultiple);
        let crossings = fixed_point_curve(&p, &f, 2001)
            .windows(2)
            .filter(|w| (w[0].1 - w[0].2).signum() != (w[1].1 - w[1].2).signum())
            .count();
        assert!(crossings >= 2);
    }

    #[test]
    fn tangential_root_is_marginal() {
        // dD = 2, dC = 1, so with u = 2 - alpha the residual is u - 1 - F(u).
        // F meets the line u - 1 at u = 1.45 and stays below it on both sides.
        let p = PdPayoffs::new(3.0, -2.0, 4.0, 0.0).unwrap();
        let f = ToleranceCdf::piecewise_linear(vec![(1.2, 0.0), (1.45, 0.45), (2.0, 0.8), (3.0, 1.0)]).unwrap();
        let r = solve_symmetric(&p, &f, 1001, 1e-12, DEFAULT_EPS).unwrap();
        assert!(
            r.roots.iter().any(|x| x.marginal && (x.alpha - 0.55).abs() < 1e-9),
            "{:?}",
            r.roots
        );
        // F(dC) = 0 puts the other root at full cooperation.
        assert!(r.roots.iter().any(|x| x.alpha == 1.0 && !x.marginal));
    }

    #[test]
    fn discrete_point_masses() {
        let p = example();
        let high = DiscreteToleranceDist::point_mass(2.0).unwrap();
        assert_eq!(solve_discrete(&p, &high, DEFAULT_EPS), DiscreteOutcome::Solutions(vec![1.0]));
        let low = DiscreteToleranceDist::point_mass(0.5).unwrap();
        assert_eq!(solve_discrete(&p, &low, DEFAULT_EPS), DiscreteOutcome::Solutions(vec![0.0]));
        let mid = DiscreteToleranceDist::point_mass(1.5).unwrap();
        assert_eq!(solve_discrete(&p, &mid, DEFAULT_EPS), DiscreteOutcome::NonExistence);
    }

    #[test]
    fn discrete_approximation_converges() {
        let p = example();
        let n = 10_000;
        let support: Vec<f64> = (0..n).map(|k| (k as f64 + 0.5) * 4.0 / n as f64).collect();
        let pi = DiscreteToleranceDist::new(support, vec![1.0 / n as f64; n], 1e-9).unwrap();
        let DiscreteOutcome::Solutions(sols) = solve_discrete(&p, &pi, DEFAULT_EPS) else {
            panic!("no solution")
        };
        assert!(sols.iter().all(|s| (s - 0.6).abs() < 1e-3), "{sols:?}");
    }

    #[test]
    fn asymmetric_examples() {
        let p = example();
        let f = ToleranceCdf::uniform(0.0, 4.0).unwrap();
        let pairs = solve_asymmetric(&p, &p, &f, &f, 10_000, 1e-12).unwrap();
        assert!(pairs.iter().any(|(x, y)| (x - 0.6).abs() < 1e-9 && (y - 0.6).abs() < 1e-9));

        let never = ToleranceCdf::uniform(0.0, 0.5).unwrap();
        let pairs = solve_asymmetric(&p, &p, &f, &never, 10_000, 1e-12).unwrap();
        assert_eq!(pairs.len(), 1);
        let expect = 1.0 - f.eval(p.delta_d());
        assert!((pairs[0].0 - expect).abs() < 1e-9 && pairs[0].1 == 0.0);
    }

    #[test]
    fn sweeps_move_in_predicted_directions() {
        let f = ToleranceCdf::uniform(0.0, 4.0).unwrap();
        let base = example();
        let vals: Vec<f64> = (0..=20).map(|k| 1.5 + 0.1 * k as f64).collect();
        let rows = comparative_statics_sweep(&base, &f, SweepParameter::DeltaC, &vals, 2000, 1e-12, DEFAULT_EPS).unwrap();
        for (r, v) in rows.iter().zip(&vals) {
            // alpha* = 3 / (3 + dC) for dD = 1 and uniform(0, 4)
            assert!((r.alpha_star - 3.0 / (3.0 + v)).abs() < 1e-9);
        }
        assert!(rows.windows(2).all(|w| w[1].alpha_star <= w[0].alpha_star + DEFAULT_EPS));
        assert!(comparative_statics_sweep(&base, &f, SweepParameter::A, &[6.0], 2000, 1e-12, DEFAULT_EPS).is_err());
    }

    proptest! {
        #[test]
        fn gap_matches_utility_difference(
            b in -5.0f64..0.0, gaps in (0.1f64..3.0, 0.1f64..3.0, 0.1f64..3.0), alpha in 0.0f64..=1.0,
        ) {
            let d = b + gaps.0;
            let a = d + gaps.1;
            let c = a + gaps.2;
            let p = PdPayoffs::new(a, b, c, d).unwrap();
            prop_assert!((willingness_gap(&p, alpha).unwrap() - gap_via_utilities(&p, alpha)).abs() < 1e-12);
        }

        #[test]
        fn residual_via_utilities_agrees(
            b in -5.0f64..0.0, gaps in (0.1f64..3.0, 0.1f64..3.0, 0.1f64..3.0), hi in 0.5f64..8.0,
        ) {
            let d = b + gaps.0;
            let a = d + gaps.1;
            let c = a + gaps.2;
            let p = PdPayoffs::new(a, b, c, d).unwrap();
            let f = ToleranceCdf::uniform(0.0, hi).unwrap();
            let r = solve_symmetric(&p, &f, 1000, 1e-12, DEFAULT_EPS).unwrap();
            prop_assert!(!r.roots.is_empty());
            for root in &r.roots {
                prop_assert!(root.residual.abs() <= 1e-12);
                let h = 1.0 - root.alpha - f.eval(gap_via_utilities(&p, root.alpha));
                prop_assert!((h - root.residual).abs() < 1e-9);
            }
        }
    }
}
