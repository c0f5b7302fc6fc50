use std::fmt;

use serde::{Deserialize, Serialize};

use super::PipelineError;

pub const NUM_CLASSES: usize = 5;

/// The five modelled ship classes; cargo and tanker vessels share one class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassLabel {
    CargoTanker,
    Fishing,
    Passenger,
    PleasureCraft,
    Tug,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; NUM_CLASSES] = [
        ClassLabel::CargoTanker,
        ClassLabel::Fishing,
        ClassLabel::Passenger,
        ClassLabel::PleasureCraft,
        ClassLabel::Tug,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassLabel::CargoTanker => "Cargo-Tanker",
            ClassLabel::Fishing => "Fishing",
            ClassLabel::Passenger => "Passenger",
            ClassLabel::PleasureCraft => "Pleasure Craft",
            ClassLabel::Tug => "Tug",
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Map an ITU type-of-ship code onto a class.
///
/// 70-79 cargo and 80-89 tanker form one class; 30 fishing; 60-69
/// passenger; 37 pleasure craft; 52 tug. Everything else is rejected.
pub fn map_class(code: u8) -> Result<ClassLabel, PipelineError> {
    match code {
        70..=89 => Ok(ClassLabel::CargoTanker),
        30 => Ok(ClassLabel::Fishing),
        60..=69 => Ok(ClassLabel::Passenger),
        37 => Ok(ClassLabel::PleasureCraft),
        52 => Ok(ClassLabel::Tug),
        other => Err(PipelineError::UnmappedShipType(other)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mapping() {
        assert_eq!(map_class(83).unwrap(), ClassLabel::CargoTanker);
        assert_eq!(map_class(70).unwrap(), ClassLabel::CargoTanker);
        assert_eq!(map_class(30).unwrap(), ClassLabel::Fishing);
        assert_eq!(map_class(65).unwrap(), ClassLabel::Passenger);
        assert_eq!(map_class(37).unwrap(), ClassLabel::PleasureCraft);
        assert_eq!(map_class(52).unwrap(), ClassLabel::Tug);
        assert!(matches!(map_class(99), Err(PipelineError::UnmappedShipType(99))));
        assert!(map_class(0).is_err());
        assert!(map_class(90).is_err());
    }

    #[test]
    fn five_classes_round_trip_index() {
        for (i, c) in ClassLabel::ALL.iter().enumerate() {
            assert_eq!(c.index(), i);
            assert_eq!(ClassLabel::from_index(i), Some(*c));
        }
        assert_eq!(ClassLabel::from_index(5), None);
    }
}
