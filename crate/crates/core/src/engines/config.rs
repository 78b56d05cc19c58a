use serde::{Deserialize, Serialize};

use crate::adaptation::AdaptationParams;
use crate::error::{Error, Result};
use crate::selection::SelectionPolicy;

/// Population size `18 * D` used by LSHADE and the unbounded family.
pub fn default_initial_size(dimension: usize) -> usize {
    18 * dimension
}

/// Engine choice plus its parameters. Every default reproduces the settings
/// of the published comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "engine", rename_all = "snake_case")]
pub enum EngineConfig {
    De(DeConfig),
    Shade(ShadeConfig),
    Lshade(LshadeConfig),
    Ude(UdeConfig),
    Ushade(UshadeConfig),
    UshadeDf(UshadeConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineKind {
    De,
    Shade,
    Lshade,
    Ude,
    Ushade,
    UshadeDf,
}

impl EngineKind {
    pub const ALL: [EngineKind; 6] = [
        EngineKind::De,
        EngineKind::Shade,
        EngineKind::Lshade,
        EngineKind::Ude,
        EngineKind::Ushade,
        EngineKind::UshadeDf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EngineKind::De => "de",
            EngineKind::Shade => "shade",
            EngineKind::Lshade => "lshade",
            EngineKind::Ude => "ude",
            EngineKind::Ushade => "ushade",
            EngineKind::UshadeDf => "ushade_df",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let norm = s.to_ascii_lowercase().replace(['/', '-'], "_");
        EngineKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| Error::Config(format!("unknown engine `{s}`")))
    }

    pub fn default_config(self) -> EngineConfig {
        match self {
            EngineKind::De => EngineConfig::De(DeConfig::default()),
            EngineKind::Shade => EngineConfig::Shade(ShadeConfig::default()),
            EngineKind::Lshade => EngineConfig::Lshade(LshadeConfig::default()),
            EngineKind::Ude => EngineConfig::Ude(UdeConfig::default()),
            EngineKind::Ushade => EngineConfig::Ushade(UshadeConfig::default()),
            EngineKind::UshadeDf => EngineConfig::UshadeDf(UshadeConfig::default()),
        }
    }
}

/// Classical DE with current-to-pbest mutation, fixed F and C, no archive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeConfig {
    pub population_size: usize,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub pbest_rate: f64,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            f: 0.5,
            c: 0.5,
            pbest_rate: 0.11,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ShadeConfig {
    pub population_size: usize,
    pub pbest_rate: f64,
    /// Archive capacity as a multiple of the population size.
    pub archive_rate: f64,
    /// `H` defaults to the problem dimension.
    pub adaptation: AdaptationParams,
}

impl Default for ShadeConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            pbest_rate: 0.10,
            archive_rate: 2.0,
            adaptation: AdaptationParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LshadeConfig {
    /// `None` means `18 * D`.
    pub initial_size: Option<usize>,
    pub pbest_rate: f64,
    pub archive_rate: f64,
    /// The reduction schedule ends at `schedule_factor * budget` evaluations
    /// (0.5 for the half schedule, 2.0 for the double one).
    pub schedule_factor: f64,
    /// Absolute schedule end; overrides `schedule_factor`.
    pub target_budget: Option<u64>,
    /// `H` defaults to 6.
    pub adaptation: AdaptationParams,
}

impl Default for LshadeConfig {
    fn default() -> Self {
        Self {
            initial_size: None,
            pbest_rate: 0.11,
            archive_rate: 1.4,
            schedule_factor: 1.0,
            target_budget: None,
            adaptation: AdaptationParams::default(),
        }
    }
}

impl LshadeConfig {
    pub fn target_for(&self, budget: u64) -> u64 {
        self.target_budget
            .unwrap_or_else(|| (self.schedule_factor * budget as f64).round() as u64)
            .max(1)
    }
}

/// How the non-adaptive UDE sets its tournament divisor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TRule {
    /// `T = |P^1|`, so the tournament grows with the population.
    #[default]
    FixedInitial,
    /// `T = round(|P^t| / |P^1|)`, which keeps the tournament near `|P^1|`.
    GrowthRatio,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectionConfig {
    pub policy: SelectionPolicy,
    pub t_rule: TRule,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            policy: SelectionPolicy::Dpt,
            t_rule: TRule::FixedInitial,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UdeConfig {
    pub initial_size: Option<usize>,
    pub gensize: usize,
    #[serde(rename = "F")]
    pub f: f64,
    #[serde(rename = "C")]
    pub c: f64,
    pub pbest_rate: f64,
    pub selection: SelectionConfig,
    /// Keep only offspring that match or beat their parent (UDE/DF).
    pub discard_failed: bool,
}

impl Default for UdeConfig {
    fn default() -> Self {
        Self {
            initial_size: None,
            gensize: 100,
            f: 0.5,
            c: 0.5,
            pbest_rate: 0.11,
            selection: SelectionConfig::default(),
            discard_failed: false,
        }
    }
}

/// Shared by USHADE and USHADE/DF. There is deliberately no budget-dependent
/// field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UshadeConfig {
    pub initial_size: Option<usize>,
    pub gensize: usize,
    pub pbest_rate: f64,
    pub selection: SelectionConfig,
    /// `H` defaults to 6.
    pub adaptation: AdaptationParams,
}

impl Default for UshadeConfig {
    fn default() -> Self {
        Self {
            initial_size: None,
            gensize: 100,
            pbest_rate: 0.11,
            selection: SelectionConfig::default(),
            adaptation: AdaptationParams::default(),
        }
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Config(msg()))
    }
}

fn check_rate(name: &str, p: f64) -> Result<()> {
    check(p > 0.0 && p <= 1.0, || format!("{name} must lie in (0, 1], got {p}"))
}

fn check_fc(f: f64, c: f64) -> Result<()> {
    check(f > 0.0 && f <= 1.0, || format!("F must lie in (0, 1], got {f}"))?;
    check((0.0..=1.0).contains(&c), || format!("C must lie in [0, 1], got {c}"))
}

fn check_unbounded(initial: usize, gensize: usize, selection: &SelectionConfig) -> Result<()> {
    check(gensize >= 1, || "gensize must be positive".into())?;
    if selection.policy == SelectionPolicy::Dpt {
        check(gensize >= 3, || "DPT needs gensize >= 3 for three distinct subsets".into())?;
        check(initial >= gensize, || {
            format!("DPT needs |P^1| >= gensize so no subset starts empty ({initial} < {gensize})")
        })?;
    }
    Ok(())
}

impl EngineConfig {
    pub fn kind(&self) -> EngineKind {
        match self {
            EngineConfig::De(_) => EngineKind::De,
            EngineConfig::Shade(_) => EngineKind::Shade,
            EngineConfig::Lshade(_) => EngineKind::Lshade,
            EngineConfig::Ude(_) => EngineKind::Ude,
            EngineConfig::Ushade(_) => EngineKind::Ushade,
            EngineConfig::UshadeDf(_) => EngineKind::UshadeDf,
        }
    }

    /// `|P^1|` for a problem of the given dimension.
    pub fn initial_size(&self, dimension: usize) -> usize {
        let d = default_initial_size(dimension);
        match self {
            EngineConfig::De(c) => c.population_size,
            EngineConfig::Shade(c) => c.population_size,
            EngineConfig::Lshade(c) => c.initial_size.unwrap_or(d),
            EngineConfig::Ude(c) => c.initial_size.unwrap_or(d),
            EngineConfig::Ushade(c) | EngineConfig::UshadeDf(c) => c.initial_size.unwrap_or(d),
        }
    }

    /// Rejects parameter combinations the engines cannot run.
    pub fn validate(&self, dimension: usize, budget: u64) -> Result<()> {
        let initial = self.initial_size(dimension);
        check(initial >= 4, || format!("|P^1| must be at least 4, got {initial}"))?;
        check(budget >= initial as u64, || {
            format!("budget {budget} cannot evaluate the initial population of {initial}")
        })?;
        let check_history = |a: &AdaptationParams| -> Result<()> {
            a.validate()?;
            check(a.history.is_none_or(|h| h >= 1), || "H must be positive".into())
        };
        match self {
            EngineConfig::De(c) => {
                check_fc(c.f, c.c)?;
                check_rate("pbest_rate", c.pbest_rate)
            }
            EngineConfig::Shade(c) => {
                check_rate("pbest_rate", c.pbest_rate)?;
                check(c.archive_rate >= 0.0, || "archive_rate must be non-negative".into())?;
                check_history(&c.adaptation)
            }
            EngineConfig::Lshade(c) => {
                check_rate("pbest_rate", c.pbest_rate)?;
                check(c.archive_rate >= 0.0, || "archive_rate must be non-negative".into())?;
                check(c.schedule_factor > 0.0, || "schedule_factor must be positive".into())?;
                check_history(&c.adaptation)
            }
            EngineConfig::Ude(c) => {
                check_fc(c.f, c.c)?;
                check_rate("pbest_rate", c.pbest_rate)?;
                check_unbounded(initial, c.gensize, &c.selection)
            }
            EngineConfig::Ushade(c) | EngineConfig::UshadeDf(c) => {
                check_rate("pbest_rate", c.pbest_rate)?;
                check_history(&c.adaptation)?;
                check_unbounded(initial, c.gensize, &c.selection)
            }
        }
    }
}
