use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Planner configurations compared in batch runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "vern")]
    Vern,
    /// Height measure forced to zero in the clearing function.
    #[serde(rename = "vern-no-height")]
    VernNoHeight,
    /// No response to freezing or entrapment.
    #[serde(rename = "vern-no-recovery")]
    VernNoRecovery,
    /// Plain dynamic window on the raw low layer.
    #[serde(rename = "dwa-baseline")]
    DwaBaseline,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Vern,
        Variant::VernNoHeight,
        Variant::VernNoRecovery,
        Variant::DwaBaseline,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Vern => "vern",
            Variant::VernNoHeight => "vern-no-height",
            Variant::VernNoRecovery => "vern-no-recovery",
            Variant::DwaBaseline => "dwa-baseline",
        }
    }

    pub fn clears(self) -> bool {
        self != Variant::DwaBaseline
    }

    pub fn uses_height(self) -> bool {
        !matches!(self, Variant::VernNoHeight | Variant::DwaBaseline)
    }

    pub fn recovers(self) -> bool {
        matches!(self, Variant::Vern | Variant::VernNoHeight)
    }

    pub fn stunts(self) -> bool {
        self.clears()
    }

    /// Whether the heading term aims along a route around obstacles rather
    /// than straight at the goal.
    pub fn guided(self) -> bool {
        self.clears()
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown variant {s:?}; expected one of vern, vern-no-height, vern-no-recovery, dwa-baseline"
                ))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
            assert_eq!(serde_json::to_string(&v).unwrap(), format!("\"{}\"", v.name()));
        }
        assert!("vern2".parse::<Variant>().is_err());
    }

    #[test]
    fn feature_flags() {
        assert!(Variant::Vern.recovers() && Variant::Vern.uses_height());
        assert!(!Variant::VernNoHeight.uses_height() && Variant::VernNoHeight.recovers());
        assert!(!Variant::VernNoRecovery.recovers() && Variant::VernNoRecovery.clears());
        assert!(!Variant::DwaBaseline.clears() && !Variant::DwaBaseline.recovers());
    }
}
