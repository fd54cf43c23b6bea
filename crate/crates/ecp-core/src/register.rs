//! Qubit labels: named register positions with a physical role.
//!
//! A label is `role + name`, e.g. `atom1` or `photon2`. The role fixes how
//! basis values are rendered: atoms use the degenerate ground states
//! (`g_L` = 0, `g_R` = 1), photons use circular polarization (`L` = 0,
//! `R` = 1).

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Atom,
    Photon,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QubitLabel {
    pub role: Role,
    pub name: String,
}

impl QubitLabel {
    pub fn atom(name: impl Into<String>) -> Self {
        QubitLabel {
            role: Role::Atom,
            name: name.into(),
        }
    }

    pub fn photon(name: impl Into<String>) -> Self {
        QubitLabel {
            role: Role::Photon,
            name: name.into(),
        }
    }

    /// Render a basis value for this label's role: `g_L`/`g_R` for atoms,
    /// `L`/`R` for photons.
    pub fn bit_name(&self, bit: u8) -> &'static str {
        match (self.role, bit) {
            (Role::Atom, 0) => "g_L",
            (Role::Atom, _) => "g_R",
            (Role::Photon, 0) => "L",
            (Role::Photon, _) => "R",
        }
    }
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_names_follow_role() {
        let a = QubitLabel::atom("atom1");
        let p = QubitLabel::photon("photon");
        assert_eq!(a.bit_name(0), "g_L");
        assert_eq!(a.bit_name(1), "g_R");
        assert_eq!(p.bit_name(0), "L");
        assert_eq!(p.bit_name(1), "R");
    }

    #[test]
    fn labels_compare_by_role_and_name() {
        assert_eq!(QubitLabel::atom("x"), QubitLabel::atom("x"));
        assert_ne!(QubitLabel::atom("x"), QubitLabel::photon("x"));
    }
}
