//! JSON schemas and CSV emitters shared with the command-line tool.
//!
//! Game:
//!
//! ```json
//! {"players": 2,
//!  "strategies": [["C", "D"], ["C", "D"]],
//!  "payoffs": [[[3, -2], [5, 0]], [[3, 5], [-2, 0]]]}
//! ```
//!
//! `payoffs[i]` is player `i`'s payoff tensor, nested by player 0's
//! strategy first, then player 1's, and so on: `payoffs[i][s0][s1]...`.
//!
//! Mixed profile: `{"profile": [[0.3, 0.7], [0.3, 0.7]]}`.
//!
//! Distributions, tagged by `type`:
//!
//! ```json
//! {"type": "discrete", "support": [0, 3], "probs": [0.7, 0.3]}
//! {"type": "uniform", "lo": 0, "hi": 4}
//! {"type": "piecewise_linear", "knots": [[0, 0], [1, 0.5], [2, 1]]}
//! {"type": "truncated_exponential", "rate": 1, "cap": 3, "loc": 0}
//! ```
//!
//! A tolerance profile is one discrete distribution (shared by every
//! player), a list with one per player, or `{"players": [...]}`.
//!
//! Type-strategy map: `{"entries": [{"tolerance": 0, "strategy": [0, 1]}, ...]}`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::equilibrium::{EquilibriumVerdict, ViolationKind};
use crate::games::{Game, MixedProfile, MixedStrategy};
use crate::pd_tolerant::{FixedPointReport, SweepRow};
use crate::tolerance::{DiscreteToleranceDist, DiscreteToleranceProfile, ToleranceCdf, TypeStrategyMap};
use crate::{Error, Result};

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        Error::Parse(format!(
            "{what}: {e} (line {}, column {})",
            e.line(),
            e.column()
        ))
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct GameFile {
    players: usize,
    strategies: Vec<Vec<String>>,
    payoffs: Vec<Value>,
}

fn flatten(value: &Value, depth: usize, counts: &[usize], out: &mut Vec<f64>, path: &str) -> Result<()> {
    if depth == counts.len() {
        let x = value
            .as_f64()
            .ok_or_else(|| Error::Parse(format!("{path}: expected a number")))?;
        out.push(x);
        return Ok(());
    }
    let arr = value
        .as_array()
        .ok_or_else(|| Error::Parse(format!("{path}: expected an array")))?;
    if arr.len() != counts[depth] {
        return Err(Error::Parse(format!(
            "{path}: expected {} entries for player {depth}'s strategies, found {}",
            counts[depth],
            arr.len()
        )));
    }
    for (k, v) in arr.iter().enumerate() {
        flatten(v, depth + 1, counts, out, &format!("{path}[{k}]"))?;
    }
    Ok(())
}

fn nest(table: &[f64], counts: &[usize]) -> Value {
    match counts.split_first() {
        None => json!(table[0]),
        Some((&n, rest)) => {
            let chunk = table.len() / n;
            Value::Array((0..n).map(|k| nest(&table[k * chunk..(k + 1) * chunk], rest)).collect())
        }
    }
}

pub fn parse_game(text: &str) -> Result<Game> {
    let file: GameFile = parse_json(text, "game")?;
    if file.strategies.len() != file.players {
        return Err(Error::Parse(format!(
            "game.strategies: {} strategy lists for {} players",
            file.strategies.len(),
            file.players
        )));
    }
    if file.payoffs.len() != file.players {
        return Err(Error::Parse(format!(
            "game.payoffs: {} payoff tensors for {} players",
            file.payoffs.len(),
            file.players
        )));
    }
    let counts: Vec<usize> = file.strategies.iter().map(Vec::len).collect();
    let mut tables = Vec::with_capacity(file.players);
    for (p, v) in file.payoffs.iter().enumerate() {
        let mut flat = Vec::new();
        flatten(v, 0, &counts, &mut flat, &format!("game.payoffs[{p}]"))?;
        tables.push(flat);
    }
    Game::new(file.strategies, tables)
}

pub fn game_to_json(game: &Game) -> String {
    let counts = game.strategy_counts();
    let file = GameFile {
        players: game.num_players(),
        strategies: game.strategy_labels().to_vec(),
        payoffs: (0..game.num_players())
            .map(|p| nest(game.payoff_table(p), &counts))
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("serializable")
}

#[derive(Debug, Serialize, Deserialize)]
struct ProfileFile {
    profile: Vec<Vec<f64>>,
}

pub fn parse_profile(text: &str, game: &Game, eps: f64) -> Result<MixedProfile> {
    let file: ProfileFile = parse_json(text, "profile")?;
    MixedProfile::from_probs(game, file.profile, eps)
}

pub fn profile_to_json(profile: &MixedProfile) -> String {
    let file = ProfileFile {
        profile: profile.strategies().iter().map(|s| s.probs().to_vec()).collect(),
    };
    serde_json::to_string_pretty(&file).expect("serializable")
}

/// Wire form of every distribution family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DistributionFile {
    Discrete { support: Vec<f64>, probs: Vec<f64> },
    Uniform { lo: f64, hi: f64 },
    PiecewiseLinear { knots: Vec<(f64, f64)> },
    TruncatedExponential {
        rate: f64,
        cap: f64,
        #[serde(default)]
        loc: f64,
    },
}

/// A parsed tolerance law, discrete or continuous.
#[derive(Debug, Clone, PartialEq)]
pub enum ToleranceLaw {
    Discrete(DiscreteToleranceDist),
    Continuous(ToleranceCdf),
}

impl ToleranceLaw {
    pub fn as_continuous(&self) -> Result<&ToleranceCdf> {
        match self {
            Self::Continuous(c) => Ok(c),
            Self::Discrete(_) => Err(Error::NotContinuous("the continuous fixed-point solver")),
        }
    }

    pub fn as_discrete(&self) -> Result<&DiscreteToleranceDist> {
        match self {
            Self::Discrete(d) => Ok(d),
            Self::Continuous(_) => Err(Error::InvalidDistribution(
                "expected a discrete distribution".into(),
            )),
        }
    }
}

impl DistributionFile {
    pub fn into_law(self, eps: f64) -> Result<ToleranceLaw> {
        Ok(match self {
            Self::Discrete { support, probs } => {
                ToleranceLaw::Discrete(DiscreteToleranceDist::new(support, probs, eps)?)
            }
            Self::Uniform { lo, hi } => ToleranceLaw::Continuous(ToleranceCdf::uniform(lo, hi)?),
            Self::PiecewiseLinear { knots } => {
                ToleranceLaw::Continuous(ToleranceCdf::piecewise_linear(knots)?)
            }
            Self::TruncatedExponential { rate, cap, loc } => {
                let cdf = ToleranceCdf::TruncatedExponential { rate, cap, loc };
                cdf.validate()?;
                ToleranceLaw::Continuous(cdf)
            }
        })
    }

    pub fn from_law(law: &ToleranceLaw) -> Self {
        match law {
            ToleranceLaw::Discrete(d) => Self::Discrete {
                support: d.support().to_vec(),
                probs: d.probs().to_vec(),
            },
            ToleranceLaw::Continuous(ToleranceCdf::Uniform { lo, hi }) => Self::Uniform { lo: *lo, hi: *hi },
            ToleranceLaw::Continuous(ToleranceCdf::PiecewiseLinear { knots }) => {
                Self::PiecewiseLinear { knots: knots.clone() }
            }
            ToleranceLaw::Continuous(ToleranceCdf::TruncatedExponential { rate, cap, loc }) => {
                Self::TruncatedExponential {
                    rate: *rate,
                    cap: *cap,
                    loc: *loc,
                }
            }
        }
    }
}

pub fn parse_distribution(text: &str, eps: f64) -> Result<ToleranceLaw> {
    parse_json::<DistributionFile>(text, "distribution")?.into_law(eps)
}

pub fn distribution_to_json(law: &ToleranceLaw) -> String {
    serde_json::to_string_pretty(&DistributionFile::from_law(law)).expect("serializable")
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PiFile {
    Wrapped { players: Vec<DistributionFile> },
    List(Vec<DistributionFile>),
    Shared(DistributionFile),
}

/// Parses a tolerance profile for `num_players` players.
pub fn parse_pi(text: &str, num_players: usize, eps: f64) -> Result<DiscreteToleranceProfile> {
    let files = match parse_json::<PiFile>(text, "tolerance profile")? {
        PiFile::Shared(d) => vec![d; num_players],
        PiFile::List(v) | PiFile::Wrapped { players: v } => v,
    };
    if files.len() != num_players {
        return Err(Error::Parse(format!(
            "tolerance profile lists {} distributions for {num_players} players",
            files.len()
        )));
    }
    let dists = files
        .into_iter()
        .enumerate()
        .map(|(p, f)| {
            f.into_law(eps)?
                .as_discrete()
                .cloned()
                .map_err(|e| Error::Parse(format!("players[{p}]: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiscreteToleranceProfile::new(dists))
}

pub fn pi_to_json(pi: &DiscreteToleranceProfile) -> String {
    let players: Vec<DistributionFile> = pi
        .per_player()
        .iter()
        .map(|d| DistributionFile::from_law(&ToleranceLaw::Discrete(d.clone())))
        .collect();
    serde_json::to_string_pretty(&json!({ "players": players })).expect("serializable")
}

#[derive(Debug, Serialize, Deserialize)]
struct MapEntry {
    tolerance: f64,
    strategy: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct MapFile {
    entries: Vec<MapEntry>,
}

pub fn parse_type_map(text: &str, dist: &DiscreteToleranceDist, eps: f64) -> Result<TypeStrategyMap> {
    let file: MapFile = parse_json(text, "type-strategy map")?;
    let entries = file
        .entries
        .into_iter()
        .enumerate()
        .map(|(k, e)| {
            MixedStrategy::new(e.strategy, eps)
                .map(|s| (e.tolerance, s))
                .map_err(|err| Error::Parse(format!("entries[{k}].strategy: {err}")))
        })
        .collect::<Result<Vec<_>>>()?;
    TypeStrategyMap::from_entries(dist, entries, eps)
}

pub fn type_map_to_json(map: &TypeStrategyMap) -> String {
    let file = MapFile {
        entries: map
            .atoms()
            .iter()
            .zip(map.strategies())
            .map(|(t, s)| MapEntry {
                tolerance: *t,
                strategy: s.probs().to_vec(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("serializable")
}

/// `{"equilibrium": bool, "witness": {player: {tolerance: probs}}, "violation": {...}}`
pub fn verdict_to_value(verdict: &EquilibriumVerdict) -> Value {
    let witness = verdict.witness().map(|maps| {
        let mut players = Map::new();
        for (p, m) in maps.iter().enumerate() {
            let mut types = Map::new();
            for (t, s) in m.atoms().iter().zip(m.strategies()) {
                types.insert(t.to_string(), json!(s.probs()));
            }
            players.insert(p.to_string(), Value::Object(types));
        }
        Value::Object(players)
    });
    let violation = verdict.violation().map(|v| {
        let mut obj = json!({
            "player": v.player,
            "threshold": v.threshold,
            "excess": v.excess,
        });
        match v.kind {
            ViolationKind::Threshold => {
                obj["kind"] = json!("threshold");
            }
            ViolationKind::UntoleratedStrategy { strategy, regret } => {
                obj["kind"] = json!("untolerated_strategy");
                obj["strategy"] = json!(strategy);
                obj["regret"] = json!(regret);
            }
        }
        obj
    });
    json!({
        "equilibrium": verdict.is_equilibrium(),
        "witness": witness,
        "violation": violation,
    })
}

pub fn report_to_value(report: &FixedPointReport) -> Value {
    json!({
        "roots": report.roots.iter().map(|r| json!({
            "alpha_star": r.alpha,
            "bracket": [r.bracket.0, r.bracket.1],
            "residual": r.residual,
            "marginal": r.marginal,
        })).collect::<Vec<_>>(),
        "has_zero_root": report.has_zero_root,
        "uniqueness_certified": report.uniqueness_certified,
        "classification": match report.classification {
            crate::pd_tolerant::Structure::Unique => "unique",
            crate::pd_tolerant::Structure::PossiblyMultiple => "possibly-multiple",
        },
    })
}

/// Columns `alpha,lhs,rhs`.
pub fn curve_csv(points: &[(f64, f64, f64)]) -> String {
    let mut out = String::from("alpha,lhs,rhs\n");
    for (a, l, r) in points {
        out.push_str(&format!("{a},{l},{r}\n"));
    }
    out
}

/// Columns `param_value,alpha_star,branch_id,marginal_flag`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("param_value,alpha_star,branch_id,marginal_flag\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.value, r.alpha_star, r.branch, r.marginal as u8
        ));
    }
    out
}

/// One row of a cooperation-rate sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRow {
    pub value: f64,
    pub exact_rate: f64,
    pub mc_rate: f64,
    pub mc_stderr: f64,
}

/// Columns `<param>,exact_rate,mc_rate,mc_stderr`.
pub fn rate_csv(param: &str, rows: &[RateRow]) -> String {
    let mut out = format!("{param},exact_rate,mc_rate,mc_stderr\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.value, r.exact_rate, r.mc_rate, r.mc_stderr
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::verify_tolerant_equilibrium;
    use crate::DEFAULT_EPS;
    use proptest::prelude::*;

    const PD: &str = r#"{"players": 2, "strategies": [["C","D"],["C","D"]],
        "payoffs": [[[3,-2],[5,0]], [[3,5],[-2,0]]]}"#;

    #[test]
    fn parses_pd_layout() {
        let g = parse_game(PD).unwrap();
        assert_eq!(g.payoff(0, &[0, 1]), -2.0);
        assert_eq!(g.payoff(1, &[0, 1]), 5.0);
        assert_eq!(g.payoff(0, &[1, 0]), 5.0);
    }

    #[test]
    fn schema_errors_carry_context() {
        let bad = r#"{"players": 2, "strategies": [["C","D"],["C","D"]], "payoffs": [[[3,-2]], [[3,5],[-2,0]]]}"#;
        let err = parse_game(bad).unwrap_err().to_string();
        assert!(err.contains("game.payoffs[0]"), "{err}");
        let err = parse_game("{\n\"players\": 2,\n}").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        let g = parse_game(PD).unwrap();
        assert!(parse_profile(r#"{"profile": [[0.5, 0.4], [1, 0]]}"#, &g, DEFAULT_EPS).is_err());
        assert!(parse_pi(r#"{"type":"uniform","lo":0,"hi":1}"#, 2, DEFAULT_EPS).is_err());
    }

    #[test]
    fn pi_forms() {
        let shared = parse_pi(r#"{"type":"discrete","support":[0,3],"probs":[0.7,0.3]}"#, 2, DEFAULT_EPS).unwrap();
        let listed = parse_pi(
            r#"[{"type":"discrete","support":[0,3],"probs":[0.7,0.3]},{"type":"discrete","support":[0,3],"probs":[0.7,0.3]}]"#,
            2,
            DEFAULT_EPS,
        )
        .unwrap();
        assert_eq!(shared, listed);
        assert_eq!(parse_pi(&pi_to_json(&shared), 2, DEFAULT_EPS).unwrap(), shared);
    }

    #[test]
    fn verdict_shape() {
        let g = parse_game(PD).unwrap();
        let prof = parse_profile(r#"{"profile": [[0.3, 0.7], [0.3, 0.7]]}"#, &g, DEFAULT_EPS).unwrap();
        let pi = parse_pi(r#"{"type":"discrete","support":[0,3],"probs":[0.7,0.3]}"#, 2, DEFAULT_EPS).unwrap();
        let v = verdict_to_value(&verify_tolerant_equilibrium(&g, &prof, &pi, DEFAULT_EPS).unwrap());
        assert_eq!(v["equilibrium"], json!(true));
        assert_eq!(v["witness"]["0"]["0"], json!([0.0, 1.0]));
        assert!(v["violation"].is_null());
    }

    #[test]
    fn continuous_distributions_round_trip() {
        for text in [
            r#"{"type":"uniform","lo":0,"hi":4}"#,
            r#"{"type":"piecewise_linear","knots":[[0,0],[1,0.5],[2,1]]}"#,
            r#"{"type":"truncated_exponential","rate":1.5,"cap":3}"#,
        ] {
            let law = parse_distribution(text, DEFAULT_EPS).unwrap();
            assert_eq!(parse_distribution(&distribution_to_json(&law), DEFAULT_EPS).unwrap(), law);
        }
    }

    proptest! {
        #[test]
        fn game_round_trip(counts in prop::collection::vec(1usize..4, 1..4), seed in prop::collection::vec(-100i32..100, 64)) {
            let n = counts.len();
            let labels: Vec<Vec<String>> = counts.iter().map(|&k| (0..k).map(|j| format!("s{j}")).collect()).collect();
            let mut i = 0;
            let g = Game::from_fn(labels, |_| {
                (0..n).map(|_| { i += 1; seed[i % seed.len()] as f64 / 7.0 }).collect()
            }).unwrap();
            prop_assert_eq!(parse_game(&game_to_json(&g)).unwrap(), g);
        }

        #[test]
        fn discrete_and_map_round_trip(w in prop::collection::vec(0.01f64..1.0, 1..6), mix in 0.0f64..1.0) {
            let s: f64 = w.iter().sum();
            let probs: Vec<f64> = w.iter().map(|x| x / s).collect();
            let support: Vec<f64> = (0..probs.len()).map(|k| k as f64 * 0.7).collect();
            let d = DiscreteToleranceDist::new(support, probs, 1e-9).unwrap();
            let law = ToleranceLaw::Discrete(d.clone());
            prop_assert_eq!(parse_distribution(&distribution_to_json(&law), 1e-9).unwrap(), law);
            let map = TypeStrategyMap::new(&d, vec![MixedStrategy::two_point(mix); d.len()]).unwrap();
            prop_assert_eq!(parse_type_map(&type_map_to_json(&map), &d, 1e-9).unwrap(), map);
        }
    }
}
