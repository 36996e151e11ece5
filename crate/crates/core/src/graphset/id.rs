use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Eight-digit failure-mode code: category, system, subsystem, component and
/// mode, segmented 1-1-2-2-2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FailureModeId {
    pub category: u8,
    pub system: u8,
    pub subsystem: u8,
    pub component: u8,
    pub mode: u8,
}

pub fn parse_id(text: &str) -> Result<FailureModeId> {
    let bad = |msg: String| Error::parse("failure-mode id", None, format!("{text:?}: {msg}"));
    let bytes = text.as_bytes();
    if bytes.len() != 8 {
        return Err(bad(format!(
            "expected 8 digits, got {} characters",
            text.chars().count()
        )));
    }
    if let Some(pos) = bytes.iter().position(|b| !b.is_ascii_digit()) {
        return Err(bad(format!("non-digit at position {}", pos + 1)));
    }
    let d = |i: usize| bytes[i] - b'0';
    let id = FailureModeId {
        category: d(0),
        system: d(1),
        subsystem: d(2) * 10 + d(3),
        component: d(4) * 10 + d(5),
        mode: d(6) * 10 + d(7),
    };
    if !(1..=3).contains(&id.category) {
        return Err(bad(format!("category {} outside 1-3", id.category)));
    }
    Ok(id)
}

pub fn format_id(id: &FailureModeId) -> String {
    id.to_string()
}

impl fmt::Display for FailureModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}{:02}{:02}{:02}",
            self.category, self.system, self.subsystem, self.component, self.mode
        )
    }
}

impl FromStr for FailureModeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_id(s)
    }
}

impl Serialize for FailureModeId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FailureModeId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_id(&s).map_err(serde::de::Error::custom)
    }
}

/// System classes in label order, keyed by (category, system number).
pub const SYSTEMS: [(u8, u8, &str); 12] = [
    (1, 1, "Target and Obstacle Perception System"),
    (1, 2, "Positioning System"),
    (1, 3, "Side Propulsion System"),
    (1, 4, "Power System"),
    (1, 5, "Navigational Aid System"),
    (2, 1, "Ship-to-Shore Communication System"),
    (2, 2, "Shore-based Dispatch Communication System"),
    (2, 3, "Shore-based Meteorological Service System"),
    (2, 4, "Shore-based Remote Control Center"),
    (3, 1, "Intelligent Navigation Control System"),
    (3, 2, "Intelligent Energy Storage System"),
    (3, 3, "Intelligent Cargo Hold System"),
];

pub const CATEGORY_NAMES: [&str; 3] = [
    "Basic function",
    "Autonomous interaction",
    "Intelligent system",
];

impl FailureModeId {
    /// Class label index into [`SYSTEMS`], if the category/system pair exists.
    pub fn label(&self) -> Option<usize> {
        SYSTEMS
            .iter()
            .position(|&(c, s, _)| c == self.category && s == self.system)
    }
}

pub fn label_names() -> Vec<String> {
    SYSTEMS.iter().map(|s| s.2.to_string()).collect()
}
