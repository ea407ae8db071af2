//! The three-level sense hierarchy: class, type and directionality.
//!
//! Level-2 types form a closed inventory of twenty labels. Their order here is
//! the canonical order for output heads, tables and argmax tie-breaking.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level1 {
    Comparison,
    Contingency,
    Expansion,
    Temporal,
}

impl Level1 {
    pub fn as_str(self) -> &'static str {
        match self {
            Level1::Comparison => "Comparison",
            Level1::Contingency => "Contingency",
            Level1::Expansion => "Expansion",
            Level1::Temporal => "Temporal",
        }
    }
}

impl FromStr for Level1 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Comparison" => Ok(Level1::Comparison),
            "Contingency" => Ok(Level1::Contingency),
            "Expansion" => Ok(Level1::Expansion),
            "Temporal" => Ok(Level1::Temporal),
            _ => Err(Error::validation("sense class", s)),
        }
    }
}

struct TypeEntry {
    class: Level1,
    name: &'static str,
    directions: &'static [&'static str],
}

const fn entry(class: Level1, name: &'static str, directions: &'static [&'static str]) -> TypeEntry {
    TypeEntry {
        class,
        name,
        directions,
    }
}

use Level1::*;

static TYPES: [TypeEntry; 20] = [
    entry(Comparison, "Concession", &["Arg1-as-denier", "Arg2-as-denier"]),
    entry(Comparison, "Concession+SpeechAct", &["Arg2-as-denier+SpeechAct"]),
    entry(Comparison, "Contrast", &[]),
    entry(Comparison, "Similarity", &[]),
    entry(Contingency, "Cause", &["Reason", "Result", "NegResult"]),
    entry(Contingency, "Cause+SpeechAct", &["Reason+SpeechAct", "Result+SpeechAct"]),
    entry(Contingency, "Cause+Belief", &["Reason+Belief", "Result+Belief"]),
    entry(Contingency, "Condition", &["Arg1-as-cond", "Arg2-as-cond"]),
    entry(Contingency, "Condition+SpeechAct", &[]),
    entry(Contingency, "Purpose", &["Arg1-as-goal", "Arg2-as-goal"]),
    entry(Expansion, "Conjunction", &[]),
    entry(Expansion, "Disjunction", &[]),
    entry(Expansion, "Equivalence", &[]),
    entry(Expansion, "Exception", &["Arg1-as-excpt", "Arg2-as-excpt"]),
    entry(Expansion, "Instantiation", &["Arg1-as-instance", "Arg2-as-instance"]),
    entry(Expansion, "Level-of-detail", &["Arg1-as-detail", "Arg2-as-detail"]),
    entry(Expansion, "Manner", &["Arg1-as-manner", "Arg2-as-manner"]),
    entry(Expansion, "Substitution", &["Arg1-as-subst", "Arg2-as-subst"]),
    entry(Temporal, "Asynchronous", &["Precedence", "Succession"]),
    entry(Temporal, "Synchronous", &[]),
];

/// Level-3 leaves that the 31-way head folds into a neighbouring label.
fn level3_head_name(level2: &str, level3: Option<&str>) -> Option<String> {
    match (level2, level3) {
        ("Cause", Some("NegResult")) => Some("Result".to_string()),
        ("Cause+SpeechAct", _) => None,
        (_, l3) => l3.map(str::to_string),
    }
}

/// A hierarchical sense label. `level2` always belongs to the closed inventory.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SenseLabel {
    pub level1: Level1,
    pub level2: String,
    pub level3: Option<String>,
}

impl SenseLabel {
    pub fn new(level1: Level1, level2: &str, level3: Option<&str>) -> Result<Self> {
        let entry = TYPES
            .iter()
            .find(|e| e.name == level2)
            .ok_or_else(|| Error::validation("sense type", level2))?;
        if entry.class != level1 {
            return Err(Error::validation(
                "sense",
                format!("{}.{}", level1.as_str(), level2),
            ));
        }
        if let Some(l3) = level3 {
            if !entry.directions.contains(&l3) {
                return Err(Error::validation(
                    "sense",
                    format!("{}.{}.{}", level1.as_str(), level2, l3),
                ));
            }
        }
        Ok(SenseLabel {
            level1,
            level2: level2.to_string(),
            level3: level3.map(str::to_string),
        })
    }

    /// Position of the level-2 type in the canonical inventory order.
    pub fn level2_index(&self) -> usize {
        TYPES
            .iter()
            .position(|e| e.name == self.level2)
            .expect("level2 validated at construction")
    }

    /// `Class.Type`, e.g. `Contingency.Cause`.
    pub fn level2_name(&self) -> String {
        format!("{}.{}", self.level1.as_str(), self.level2)
    }

    /// Drop the directionality.
    pub fn to_level2(&self) -> SenseLabel {
        SenseLabel {
            level1: self.level1,
            level2: self.level2.clone(),
            level3: None,
        }
    }
}

impl fmt::Display for SenseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.level1.as_str(), self.level2)?;
        if let Some(l3) = &self.level3 {
            write!(f, ".{l3}")?;
        }
        Ok(())
    }
}

impl FromStr for SenseLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut parts = s.splitn(3, '.');
        let l1 = parts.next().unwrap_or_default();
        let l2 = parts.next().ok_or_else(|| Error::validation("sense", s))?;
        let l3 = parts.next();
        let level1 = l1.parse::<Level1>().map_err(|_| Error::validation("sense", s))?;
        SenseLabel::new(level1, l2, l3).map_err(|_| Error::validation("sense", s))
    }
}

impl Serialize for SenseLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SenseLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Granularity of the classification target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SenseLevel {
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "3")]
    Three,
}

impl SenseLevel {
    pub fn from_number(n: u8) -> Result<Self> {
        match n {
            2 => Ok(SenseLevel::Two),
            3 => Ok(SenseLevel::Three),
            _ => Err(Error::invalid(format!("sense level must be 2 or 3, got {n}"))),
        }
    }

    pub fn number(self) -> u8 {
        match self {
            SenseLevel::Two => 2,
            SenseLevel::Three => 3,
        }
    }
}

/// Ordered label set of an output head.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SenseInventory {
    level: SenseLevel,
    labels: Vec<String>,
}

impl SenseInventory {
    pub fn new(level: SenseLevel) -> Self {
        let mut labels = Vec::new();
        for e in TYPES.iter() {
            let l2 = format!("{}.{}", e.class.as_str(), e.name);
            match level {
                SenseLevel::Two => labels.push(l2),
                SenseLevel::Three => {
                    let mut leaves: Vec<String> = Vec::new();
                    for d in e.directions {
                        if let Some(name) = level3_head_name(e.name, Some(d)) {
                            if !leaves.contains(&name) {
                                leaves.push(name);
                            }
                        }
                    }
                    if leaves.is_empty() {
                        labels.push(l2);
                    } else {
                        labels.extend(leaves.into_iter().map(|d| format!("{l2}.{d}")));
                    }
                }
            }
        }
        SenseInventory { level, labels }
    }

    pub fn level(&self) -> SenseLevel {
        self.level
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    /// Head index of a sense. At level 3 a sense lacking directionality maps
    /// to its level-2 slot when that type has no level-3 leaves, otherwise `None`.
    pub fn index_of(&self, sense: &SenseLabel) -> Option<usize> {
        let name = match self.level {
            SenseLevel::Two => sense.level2_name(),
            SenseLevel::Three => match level3_head_name(&sense.level2, sense.level3.as_deref()) {
                Some(d) => format!("{}.{}", sense.level2_name(), d),
                None => sense.level2_name(),
            },
        };
        self.labels.iter().position(|l| *l == name)
    }

    pub fn index_of_name(&self, name: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == name)
    }
}

/// Level-2 type names in canonical order, without the class prefix.
pub fn level2_types() -> impl Iterator<Item = (Level1, &'static str)> {
    TYPES.iter().map(|e| (e.class, e.name))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_sense() {
        let s: SenseLabel = "Expansion.Level-of-detail.Arg2-as-detail".parse().unwrap();
        assert_eq!(s.level1, Level1::Expansion);
        assert_eq!(s.level2, "Level-of-detail");
        assert_eq!(s.level3.as_deref(), Some("Arg2-as-detail"));
        assert_eq!(s.to_string(), "Expansion.Level-of-detail.Arg2-as-detail");
    }

    #[test]
    fn rejects_unknown_and_misplaced() {
        assert!("Bogus.Label".parse::<SenseLabel>().is_err());
        assert!("Expansion.Cause".parse::<SenseLabel>().is_err());
        assert!("Expansion.Conjunction.Arg2-as-detail".parse::<SenseLabel>().is_err());
        assert!("Expansion".parse::<SenseLabel>().is_err());
    }

    #[test]
    fn inventory_sizes() {
        assert_eq!(SenseInventory::new(SenseLevel::Two).len(), 20);
        assert_eq!(SenseInventory::new(SenseLevel::Three).len(), 31);
    }

    #[test]
    fn level2_order_follows_table() {
        let inv = SenseInventory::new(SenseLevel::Two);
        assert_eq!(inv.label(0), "Comparison.Concession");
        assert_eq!(inv.label(4), "Contingency.Cause");
        assert_eq!(inv.label(9), "Contingency.Purpose");
        assert_eq!(inv.label(19), "Temporal.Synchronous");
    }

    #[test]
    fn level3_projection() {
        let inv = SenseInventory::new(SenseLevel::Three);
        let neg: SenseLabel = "Contingency.Cause.NegResult".parse().unwrap();
        let res: SenseLabel = "Contingency.Cause.Result".parse().unwrap();
        assert_eq!(inv.index_of(&neg), inv.index_of(&res));
        let sa: SenseLabel = "Contingency.Cause+SpeechAct.Reason+SpeechAct".parse().unwrap();
        assert_eq!(inv.index_of(&sa), inv.index_of_name("Contingency.Cause+SpeechAct"));
        let conj: SenseLabel = "Expansion.Conjunction".parse().unwrap();
        assert!(inv.index_of(&conj).is_some());
        let bare: SenseLabel = "Expansion.Instantiation".parse().unwrap();
        assert_eq!(inv.index_of(&bare), None);
        let l2 = SenseInventory::new(SenseLevel::Two);
        assert_eq!(l2.index_of(&bare), Some(14));
    }
}
