//! Golden datasets: the nine-dimensional worked example (a complete set of
//! ten classes, the classes formed from two four-class subsets, and the
//! resulting unextendible sets of eight and five classes) and the
//! four-dimensional unextendible triple.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{MubError, Result};
use crate::lattice::{ClassLattice, CommutingClass};
use crate::pauli::{PauliWord, Prime};
use crate::records::{from_json, ClassSetRecord, SCHEMA_VERSION};
use crate::spread::{ClassSet, SetKind};

pub const WORKED_P3_JSON: &str = include_str!("../fixtures/worked_p3.json");
pub const D4_JSON: &str = include_str!("../fixtures/d4.json");

/// Names of the sets in the `p = 3` dataset, in replay order.
pub const P3_SET_NAMES: [&str; 5] =
    ["complete", "new_from_first", "unextendible_8", "new_from_second", "unextendible_5"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenDataset {
    pub schema: u32,
    pub p: u32,
    #[serde(default)]
    pub subsets: BTreeMap<String, Vec<String>>,
    pub sets: BTreeMap<String, ClassSetRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<Vec<[u8; 4]>>,
}

/// A parsed, validated dataset with classes addressable by name.
#[derive(Debug, Clone)]
pub struct Golden {
    pub p: Prime,
    sets: BTreeMap<String, (ClassSet, Vec<String>)>,
    classes: BTreeMap<String, CommutingClass>,
    subsets: BTreeMap<String, Vec<String>>,
    residual: Option<Vec<PauliWord>>,
}

impl Golden {
    /// Parses and validates every set; errors name the failing artifact.
    pub fn parse(text: &str, lattice: Option<&ClassLattice>) -> Result<Self> {
        let raw: GoldenDataset = from_json(text)?;
        if raw.schema != SCHEMA_VERSION {
            return Err(MubError::Record(format!("unsupported schema {}", raw.schema)));
        }
        let p = Prime::new(raw.p)?;
        let mut sets = BTreeMap::new();
        let mut classes: BTreeMap<String, CommutingClass> = BTreeMap::new();
        for (set_name, rec) in &raw.sets {
            let set = rec.to_set(lattice).map_err(|e| MubError::Record(format!("set {set_name}: {e}")))?;
            if set.prime() != p {
                return Err(MubError::Record(format!("set {set_name}: wrong prime")));
            }
            let mut names = Vec::new();
            for (i, (name, class)) in rec.names().into_iter().zip(set.classes()).enumerate() {
                let name = name.unwrap_or_else(|| format!("{set_name}[{i}]"));
                if let Some(prev) = classes.get(&name) {
                    if prev != class {
                        return Err(MubError::Record(format!("set {set_name}: class {name} differs between sets")));
                    }
                }
                classes.insert(name.clone(), class.clone());
                names.push(name);
            }
            sets.insert(set_name.clone(), (set, names));
        }
        for (sub_name, members) in &raw.subsets {
            if let Some(m) = members.iter().find(|m| !classes.contains_key(*m)) {
                return Err(MubError::Record(format!("subset {sub_name}: unknown class {m}")));
            }
        }
        let residual = raw.residual.map(|ws| ws.into_iter().map(PauliWord).collect());
        Ok(Golden { p, sets, classes, subsets: raw.subsets, residual })
    }

    pub fn worked_p3() -> Result<Self> {
        Self::parse(WORKED_P3_JSON, None)
    }

    pub fn d4() -> Result<Self> {
        Self::parse(D4_JSON, None)
    }

    pub fn set(&self, name: &str) -> Result<&ClassSet> {
        self.sets.get(name).map(|(s, _)| s).ok_or_else(|| MubError::Record(format!("missing set {name}")))
    }

    pub fn set_names(&self, name: &str) -> Result<&[String]> {
        self.sets.get(name).map(|(_, n)| n.as_slice()).ok_or_else(|| MubError::Record(format!("missing set {name}")))
    }

    pub fn class(&self, name: &str) -> Result<&CommutingClass> {
        self.classes.get(name).ok_or_else(|| MubError::Record(format!("missing class {name}")))
    }

    pub fn classes(&self, names: &[&str]) -> Result<Vec<CommutingClass>> {
        names.iter().map(|n| self.class(n).cloned()).collect()
    }

    /// The dataset's name for `class`, if it has one.
    pub fn name_of(&self, class: &CommutingClass) -> Option<&str> {
        self.classes.iter().find(|(_, c)| *c == class).map(|(n, _)| n.as_str())
    }

    pub fn subset(&self, name: &str) -> Result<&[String]> {
        self.subsets.get(name).map(|v| v.as_slice()).ok_or_else(|| MubError::Record(format!("missing subset {name}")))
    }

    /// Indices of a named subset's classes within a named set.
    pub fn subset_indices(&self, set: &str, subset: &str) -> Result<Vec<usize>> {
        let names = self.set_names(set)?;
        self.subset(subset)?
            .iter()
            .map(|m| {
                names.iter().position(|n| n == m).ok_or_else(|| MubError::Record(format!("class {m} not in set {set}")))
            })
            .collect()
    }

    pub fn residual(&self) -> Option<&[PauliWord]> {
        self.residual.as_deref()
    }

    /// Checks declared kinds against the data itself.
    pub fn kind_of(&self, name: &str) -> Result<SetKind> {
        self.set(name).map(|s| s.kind())
    }
}
