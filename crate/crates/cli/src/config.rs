//! Campaign configuration: which suites run, at what scale, and how.

use std::fmt;
use std::str::FromStr;

use finfam_core::phi::{
    required_ground_size, schedule_compact, schedule_paper, SizeSchedule,
};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ScheduleChoice {
    Paper,
    Compact,
}

impl ScheduleChoice {
    pub fn build(&self, arity: usize, max_cell: u32) -> Result<Box<dyn SizeSchedule>> {
        Ok(match self {
            ScheduleChoice::Paper => Box::new(schedule_paper(arity, max_cell)?),
            ScheduleChoice::Compact => Box::new(schedule_compact(arity, max_cell)?),
        })
    }
}

impl FromStr for ScheduleChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "paper" => Ok(ScheduleChoice::Paper),
            "compact" => Ok(ScheduleChoice::Compact),
            other => Err(format!("unknown schedule '{other}' (try paper|compact)")),
        }
    }
}

impl fmt::Display for ScheduleChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScheduleChoice::Paper => "paper",
            ScheduleChoice::Compact => "compact",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SuiteId {
    Fact311,
    Nilpotency,
    PhiRoundtrip,
    Encodings,
    Ramsey,
    Fraenkel,
}

impl SuiteId {
    pub const ALL: [SuiteId; 6] = [
        SuiteId::Fact311,
        SuiteId::Nilpotency,
        SuiteId::PhiRoundtrip,
        SuiteId::Encodings,
        SuiteId::Ramsey,
        SuiteId::Fraenkel,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SuiteId::Fact311 => "fact-311",
            SuiteId::Nilpotency => "nilpotency",
            SuiteId::PhiRoundtrip => "phi-roundtrip",
            SuiteId::Encodings => "encodings",
            SuiteId::Ramsey => "ramsey",
            SuiteId::Fraenkel => "fraenkel",
        }
    }
}

impl FromStr for SuiteId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        SuiteId::ALL
            .iter()
            .find(|id| id.name() == s)
            .copied()
            .ok_or_else(|| {
                let names: Vec<&str> = SuiteId::ALL.iter().map(|i| i.name()).collect();
                format!("unknown suite '{s}' (available: {})", names.join(", "))
            })
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One full verification campaign.
#[derive(Debug, Clone)]
pub struct CampaignConfig {
    pub ground_size: u32,
    pub arity: usize,
    pub max_cell: u32,
    pub schedule: ScheduleChoice,
    pub suites: Vec<SuiteId>,
    pub seed: u64,
    pub samples: u64,
    pub threads: usize,
    pub force: bool,
    pub timings: bool,
    pub mutate: Option<String>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            ground_size: 8,
            arity: 1,
            max_cell: 1,
            schedule: ScheduleChoice::Compact,
            suites: SuiteId::ALL.to_vec(),
            seed: 1,
            samples: 500,
            threads: 0,
            force: false,
            timings: false,
            mutate: None,
        }
    }
}

/// Hard refusal threshold for estimated work, overridable with `--force`.
const COST_REFUSAL_THRESHOLD: f64 = 1e12;

impl CampaignConfig {
    pub fn enabled(&self) -> Vec<SuiteId> {
        let mut suites = if self.suites.is_empty() {
            SuiteId::ALL.to_vec()
        } else {
            self.suites.clone()
        };
        suites.sort();
        suites.dedup();
        suites
    }

    /// Minimum ground size demanded by the enabled suites under the
    /// configured codec parameters.
    pub fn required_ground(&self) -> Result<u64> {
        let mut needed = 1u64;
        if self.enabled().contains(&SuiteId::PhiRoundtrip) {
            let schedule = self.schedule.build(self.arity, self.max_cell)?;
            needed = needed.max(required_ground_size(schedule.as_ref()));
            // the exhaustive sweep fixes families over atoms {0..7}
            needed = needed.max(8);
        }
        Ok(needed)
    }

    /// Rough operation-count estimate for the enabled suites, used only to
    /// refuse runaway parameter combinations.
    pub fn cost_estimate(&self) -> Result<f64> {
        let mut cost = 0f64;
        for suite in self.enabled() {
            cost += match suite {
                SuiteId::Fact311 => 5e6,
                SuiteId::Nilpotency => 5e7,
                SuiteId::PhiRoundtrip => {
                    let ground = self.ground_size as f64;
                    let mut stage_cost = 0f64;
                    for cell in finfam_core::phi::admissible_cells(self.arity, self.max_cell) {
                        let mut k_cell = 1f64;
                        for &k in cell.sizes() {
                            let mut c = 1f64;
                            for i in 0..k as u64 {
                                c = c * (ground - i as f64) / (i as f64 + 1.0);
                            }
                            k_cell *= c;
                        }
                        stage_cost += (cell.size_sum() as f64 + 1.0) * k_cell * 64.0;
                    }
                    (self.samples as f64 + 512.0) * stage_cost
                }
                SuiteId::Encodings => 5e6,
                SuiteId::Ramsey => 5e8,
                SuiteId::Fraenkel => 5e7,
            };
        }
        Ok(cost)
    }

    /// Refuses infeasible configurations: a too-small ground set, or an
    /// estimated cost beyond the threshold without `--force`.
    pub fn validate(&self) -> Result<()> {
        if self.arity == 0 {
            return Err(CliError::Config("arity must be at least 1".into()));
        }
        let required = self.required_ground()?;
        if (self.ground_size as u64) < required {
            return Err(CliError::GroundTooSmall {
                required,
                actual: self.ground_size as u64,
            });
        }
        let cost = self.cost_estimate()?;
        if cost > COST_REFUSAL_THRESHOLD && !self.force {
            return Err(CliError::TooExpensive {
                estimate: cost,
                threshold: COST_REFUSAL_THRESHOLD,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        CampaignConfig::default().validate().unwrap();
    }

    #[test]
    fn small_ground_is_refused_with_required_size() {
        let cfg = CampaignConfig {
            ground_size: 3,
            ..Default::default()
        };
        match cfg.validate() {
            Err(CliError::GroundTooSmall { required, actual }) => {
                assert_eq!(required, 8);
                assert_eq!(actual, 3);
            }
            other => panic!("expected ground refusal, got {other:?}"),
        }
    }

    #[test]
    fn runaway_parameters_are_refused_without_force() {
        let mut cfg = CampaignConfig {
            arity: 3,
            max_cell: 3,
            suites: vec![SuiteId::PhiRoundtrip],
            samples: 1_000_000,
            ..Default::default()
        };
        cfg.ground_size = cfg.required_ground().unwrap() as u32 + 1;
        assert!(matches!(cfg.validate(), Err(CliError::TooExpensive { .. })));
    }

    #[test]
    fn suite_names_round_trip() {
        for id in SuiteId::ALL {
            assert_eq!(id.name().parse::<SuiteId>().unwrap(), id);
        }
        assert!("nope".parse::<SuiteId>().is_err());
    }
}
