//! Influence kinds, roles and the role economy.
//!
//! Every role has one speciality kind, two kinds it may buy at the higher
//! price and two kinds it can only obtain by trading. The sets follow a
//! cycle over [`InfluenceKind::ALL`]: the speciality's two neighbours are
//! trade-only and the two kinds at cyclic distance two are purchasable.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};

/// One of the five influence resources.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum InfluenceKind {
    Culture,
    Legacy,
    Science,
    Governance,
    Finance,
}

impl InfluenceKind {
    pub const ALL: [InfluenceKind; 5] = [
        InfluenceKind::Culture,
        InfluenceKind::Legacy,
        InfluenceKind::Science,
        InfluenceKind::Governance,
        InfluenceKind::Finance,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> InfluenceKind {
        Self::ALL[index % 5]
    }

    pub fn name(self) -> &'static str {
        match self {
            InfluenceKind::Culture => "Culture",
            InfluenceKind::Legacy => "Legacy",
            InfluenceKind::Science => "Science",
            InfluenceKind::Governance => "Governance",
            InfluenceKind::Finance => "Finance",
        }
    }

    /// Name used in rendered prompts. The prompt texts say "Government".
    pub fn prompt_name(self) -> &'static str {
        match self {
            InfluenceKind::Governance => "Government",
            other => other.name(),
        }
    }

    /// Case-insensitive lookup that also accepts "Government".
    pub fn parse(text: &str) -> Option<InfluenceKind> {
        let norm = text.trim().to_ascii_lowercase();
        let norm = norm.trim_end_matches(" resources").trim_end_matches(" resource");
        match norm {
            "culture" => Some(InfluenceKind::Culture),
            "legacy" => Some(InfluenceKind::Legacy),
            "science" => Some(InfluenceKind::Science),
            "governance" | "government" => Some(InfluenceKind::Governance),
            "finance" => Some(InfluenceKind::Finance),
            _ => None,
        }
    }

    fn offset(self, by: isize) -> InfluenceKind {
        let i = (self.index() as isize + by).rem_euclid(5) as usize;
        Self::from_index(i)
    }
}

impl fmt::Display for InfluenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Player role. Declaration order is the seat order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Role {
    Curator,
    Pioneer,
    Researcher,
    Politician,
    Entrepreneur,
}

impl Role {
    pub const ALL: [Role; 5] = [
        Role::Curator,
        Role::Pioneer,
        Role::Researcher,
        Role::Politician,
        Role::Entrepreneur,
    ];

    pub fn seat(self) -> usize {
        self as usize
    }

    pub fn from_seat(seat: usize) -> Role {
        Self::ALL[seat]
    }

    pub fn name(self) -> &'static str {
        match self {
            Role::Curator => "Curator",
            Role::Pioneer => "Pioneer",
            Role::Researcher => "Researcher",
            Role::Politician => "Politician",
            Role::Entrepreneur => "Entrepreneur",
        }
    }

    pub fn parse(text: &str) -> Option<Role> {
        let norm = text.trim().trim_start_matches("The ").trim_start_matches("the ");
        Self::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(norm.trim()))
    }

    pub fn speciality(self) -> InfluenceKind {
        InfluenceKind::from_index(self.seat())
    }

    /// Kinds purchasable at the non-speciality price.
    pub fn purchasable(self) -> [InfluenceKind; 2] {
        let s = self.speciality();
        let mut kinds = [s.offset(-2), s.offset(2)];
        kinds.sort();
        kinds
    }

    /// Kinds this role can only get through trades.
    pub fn trade_only(self) -> [InfluenceKind; 2] {
        let s = self.speciality();
        let mut kinds = [s.offset(-1), s.offset(1)];
        kinds.sort();
        kinds
    }

    /// The role whose speciality is `kind`.
    pub fn speciality_owner(kind: InfluenceKind) -> Role {
        Role::from_seat(kind.index())
    }

    pub fn access(self, kind: InfluenceKind) -> Access {
        if kind == self.speciality() {
            Access::Speciality
        } else if self.purchasable().contains(&kind) {
            Access::Purchasable
        } else {
            Access::TradeOnly
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How a role can obtain a given kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Access {
    Speciality,
    Purchasable,
    TradeOnly,
}

/// Coin prices for influence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prices {
    pub speciality: u32,
    pub non_speciality: u32,
}

impl Default for Prices {
    fn default() -> Self {
        Prices {
            speciality: 2,
            non_speciality: 3,
        }
    }
}

impl Prices {
    /// `None` when the kind is trade-only for the role.
    pub fn price(&self, role: Role, kind: InfluenceKind) -> Option<u32> {
        match role.access(kind) {
            Access::Speciality => Some(self.speciality),
            Access::Purchasable => Some(self.non_speciality),
            Access::TradeOnly => None,
        }
    }
}

/// Price of one unit of `kind` for `role` at the standard 2/3 prices.
pub fn influence_price(role: Role, kind: InfluenceKind) -> Option<u32> {
    Prices::default().price(role, kind)
}

/// Counts per influence kind. Serialized as a map that omits zero entries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "BTreeMap<InfluenceKind, u32>", into = "BTreeMap<InfluenceKind, u32>")]
pub struct Bundle([u32; 5]);

impl Bundle {
    pub const EMPTY: Bundle = Bundle([0; 5]);

    pub fn new(counts: [u32; 5]) -> Self {
        Bundle(counts)
    }

    pub fn single(kind: InfluenceKind, qty: u32) -> Self {
        let mut b = Bundle::EMPTY;
        b[kind] = qty;
        b
    }

    pub fn from_pairs<I: IntoIterator<Item = (InfluenceKind, u32)>>(pairs: I) -> Self {
        let mut b = Bundle::EMPTY;
        for (k, q) in pairs {
            b[k] += q;
        }
        b
    }

    pub fn counts(&self) -> [u32; 5] {
        self.0
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    /// True when every count in `self` is at least the matching count in `other`.
    pub fn covers(&self, other: &Bundle) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a >= b)
    }

    /// What is still needed to reach `target`.
    pub fn shortfall(&self, target: &Bundle) -> Bundle {
        let mut out = Bundle::EMPTY;
        for k in InfluenceKind::ALL {
            out[k] = target[k].saturating_sub(self[k]);
        }
        out
    }

    pub fn checked_sub(&self, other: &Bundle) -> Option<Bundle> {
        let mut out = *self;
        for k in InfluenceKind::ALL {
            out[k] = self[k].checked_sub(other[k])?;
        }
        Some(out)
    }

    pub fn add(&mut self, other: &Bundle) {
        for k in InfluenceKind::ALL {
            self[k] += other[k];
        }
    }

    /// Non-zero entries in kind order.
    pub fn iter(&self) -> impl Iterator<Item = (InfluenceKind, u32)> + '_ {
        InfluenceKind::ALL
            .into_iter()
            .map(|k| (k, self[k]))
            .filter(|(_, q)| *q > 0)
    }

    /// "2 Science, 1 Legacy" using prompt names; "none" when empty.
    pub fn describe(&self) -> String {
        if self.is_empty() {
            return "none".to_string();
        }
        self.iter()
            .map(|(k, q)| format!("{q} {}", k.prompt_name()))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl Index<InfluenceKind> for Bundle {
    type Output = u32;
    fn index(&self, kind: InfluenceKind) -> &u32 {
        &self.0[kind.index()]
    }
}

impl IndexMut<InfluenceKind> for Bundle {
    fn index_mut(&mut self, kind: InfluenceKind) -> &mut u32 {
        &mut self.0[kind.index()]
    }
}

impl From<BTreeMap<InfluenceKind, u32>> for Bundle {
    fn from(map: BTreeMap<InfluenceKind, u32>) -> Self {
        Bundle::from_pairs(map)
    }
}

impl From<Bundle> for BTreeMap<InfluenceKind, u32> {
    fn from(b: Bundle) -> Self {
        b.iter().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn politician_matches_published_prices() {
        let p = Prices::default();
        assert_eq!(p.price(Role::Politician, InfluenceKind::Governance), Some(2));
        assert_eq!(p.price(Role::Politician, InfluenceKind::Culture), Some(3));
        assert_eq!(p.price(Role::Politician, InfluenceKind::Legacy), Some(3));
        assert_eq!(p.price(Role::Politician, InfluenceKind::Science), None);
        assert_eq!(p.price(Role::Politician, InfluenceKind::Finance), None);
    }

    #[test]
    fn entrepreneur_buys_legacy_and_science_at_three() {
        assert_eq!(influence_price(Role::Entrepreneur, InfluenceKind::Legacy), Some(3));
        assert_eq!(influence_price(Role::Entrepreneur, InfluenceKind::Science), Some(3));
        assert_eq!(influence_price(Role::Entrepreneur, InfluenceKind::Finance), Some(2));
    }

    #[test]
    fn every_role_partitions_the_kinds() {
        for role in Role::ALL {
            let mut seen = vec![role.speciality()];
            seen.extend(role.purchasable());
            seen.extend(role.trade_only());
            seen.sort();
            assert_eq!(seen, InfluenceKind::ALL.to_vec(), "{role}");
        }
    }

    #[test]
    fn speciality_pairs() {
        assert_eq!(Role::Curator.speciality(), InfluenceKind::Culture);
        assert_eq!(Role::Pioneer.speciality(), InfluenceKind::Legacy);
        assert_eq!(Role::Researcher.speciality(), InfluenceKind::Science);
        assert_eq!(Role::Politician.speciality(), InfluenceKind::Governance);
        assert_eq!(Role::Entrepreneur.speciality(), InfluenceKind::Finance);
        for k in InfluenceKind::ALL {
            assert_eq!(Role::speciality_owner(k).speciality(), k);
        }
    }

    #[test]
    fn kind_parsing_accepts_government_alias() {
        assert_eq!(InfluenceKind::parse(" government "), Some(InfluenceKind::Governance));
        assert_eq!(InfluenceKind::parse("SCIENCE"), Some(InfluenceKind::Science));
        assert_eq!(InfluenceKind::parse("cobalt"), None);
    }

    #[test]
    fn bundle_serializes_as_sparse_map() {
        let b = Bundle::from_pairs([(InfluenceKind::Science, 2), (InfluenceKind::Legacy, 1)]);
        let json = serde_json::to_string(&b).unwrap();
        assert_eq!(json, r#"{"Legacy":1,"Science":2}"#);
        let back: Bundle = serde_json::from_str(&json).unwrap();
        assert_eq!(back, b);
        assert_eq!(b.describe(), "1 Legacy, 2 Science");
    }
}
