use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TodaError};

/// Cartan–Killing type of a simple Lie algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::A,
        Family::B,
        Family::C,
        Family::D,
        Family::E,
        Family::F,
        Family::G,
    ];

    /// Families whose Cartan matrix is already symmetric (`D = I`).
    pub fn is_simply_laced(self) -> bool {
        matches!(self, Family::A | Family::D | Family::E)
    }

    pub fn is_classical(self) -> bool {
        matches!(self, Family::A | Family::B | Family::C | Family::D)
    }

    pub fn min_rank(self) -> usize {
        match self {
            Family::A => 1,
            Family::B | Family::C => 2,
            Family::D => 3,
            Family::E => 6,
            Family::F => 4,
            Family::G => 2,
        }
    }

    pub fn admits_rank(self, rank: usize) -> bool {
        match self {
            Family::A | Family::B | Family::C | Family::D => rank >= self.min_rank(),
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        }
    }

    /// Every admissible rank up to and including `max_rank`.
    pub fn ranks_up_to(self, max_rank: usize) -> Vec<usize> {
        (1..=max_rank).filter(|&r| self.admits_rank(r)).collect()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        };
        write!(f, "{c}")
    }
}

impl FromStr for Family {
    type Err = TodaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Family::A),
            "B" => Ok(Family::B),
            "C" => Ok(Family::C),
            "D" => Ok(Family::D),
            "E" => Ok(Family::E),
            "F" => Ok(Family::F),
            "G" => Ok(Family::G),
            other => Err(TodaError::InvalidAlgebra {
                family: other.to_string(),
                rank: 0,
                reason: "unknown family, expected one of A B C D E F G".into(),
            }),
        }
    }
}

/// A simple Lie algebra `Xₙ`, validated on construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawLieFamily", into = "RawLieFamily")]
pub struct LieFamily {
    family: Family,
    rank: usize,
}

#[derive(Serialize, Deserialize)]
struct RawLieFamily {
    family: Family,
    rank: usize,
}

impl TryFrom<RawLieFamily> for LieFamily {
    type Error = TodaError;
    fn try_from(raw: RawLieFamily) -> Result<Self> {
        LieFamily::new(raw.family, raw.rank)
    }
}

impl From<LieFamily> for RawLieFamily {
    fn from(l: LieFamily) -> Self {
        RawLieFamily {
            family: l.family,
            rank: l.rank,
        }
    }
}

impl LieFamily {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        if !family.admits_rank(rank) {
            let reason = match family {
                Family::E => "E exists only for ranks 6, 7, 8".to_string(),
                Family::F => "F exists only for rank 4".to_string(),
                Family::G => "G exists only for rank 2".to_string(),
                _ => format!("rank must be at least {}", family.min_rank()),
            };
            return Err(TodaError::InvalidAlgebra {
                family: family.to_string(),
                rank,
                reason,
            });
        }
        Ok(LieFamily { family, rank })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// All algebras of the given family with rank at most `max_rank`.
    pub fn enumerate(family: Family, max_rank: usize) -> Vec<LieFamily> {
        family
            .ranks_up_to(max_rank)
            .into_iter()
            .map(|rank| LieFamily { family, rank })
            .collect()
    }
}

impl fmt::Display for LieFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family, self.rank)
    }
}

impl FromStr for LieFamily {
    type Err = TodaError;

    /// Parses names such as `A2`, `g2` or `E8`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, tail) = s.split_at(s.chars().next().map_or(0, char::len_utf8));
        let family: Family = head.parse()?;
        let rank = tail.parse::<usize>().map_err(|_| TodaError::InvalidAlgebra {
            family: family.to_string(),
            rank: 0,
            reason: format!("cannot parse rank from {tail:?}"),
        })?;
        LieFamily::new(family, rank)
    }
}
