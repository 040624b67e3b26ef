//! JSON records for classes, class sets, and bases.
//!
//! Every top-level document carries `"schema": 1`. Words are written as
//! `[m, n, k, l]`; class members are canonically sorted.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{MubError, Result};
use crate::lattice::{ClassLattice, CommutingClass};
use crate::pauli::{PauliWord, Prime};
use crate::spread::{ClassSet, SetKind, UnextCertificate};
use crate::states::{Basis, BasisLabel, StateVector};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub p: u32,
    pub generators: Vec<[u8; 4]>,
    pub members: Vec<[u8; 4]>,
}

impl ClassRecord {
    pub fn named(name: impl Into<String>, class: &CommutingClass) -> Self {
        ClassRecord { name: Some(name.into()), ..Self::from(class) }
    }

    fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| format!("{:?}", self.generators))
    }

    /// Rebuilds the class, requiring canonical generators and the exact member list.
    pub fn to_class(&self) -> Result<CommutingClass> {
        let p = Prime::new(self.p)?;
        let bad = |why: &str| MubError::Record(format!("class {}: {why}", self.label()));
        let [g1, g2] = <[[u8; 4]; 2]>::try_from(self.generators.as_slice())
            .map_err(|_| bad("expected two generators"))?
            .map(PauliWord);
        if !g1.is_valid(p) || !g2.is_valid(p) {
            return Err(bad("exponent outside F_p"));
        }
        let class = CommutingClass::span(&g1, &g2, p).map_err(|e| bad(&e.to_string()))?;
        if class.generators() != [g1, g2] {
            return Err(bad("generators are not in canonical form"));
        }
        if class.members().iter().map(|w| w.exponents()).ne(self.members.iter().copied()) {
            return Err(bad("member list does not match the span of the generators"));
        }
        Ok(class)
    }
}

impl From<&CommutingClass> for ClassRecord {
    fn from(c: &CommutingClass) -> Self {
        ClassRecord {
            name: None,
            p: c.prime().get(),
            generators: c.generators().iter().map(|g| g.exponents()).collect(),
            members: c.members().iter().map(|w| w.exponents()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSetRecord {
    pub schema: u32,
    pub p: u32,
    pub kind: SetKind,
    pub classes: Vec<ClassRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<UnextCertificate>,
}

impl ClassSetRecord {
    pub fn from_set(set: &ClassSet, names: Option<&[String]>) -> Self {
        let classes = set
            .classes()
            .iter()
            .enumerate()
            .map(|(i, c)| match names.and_then(|n| n.get(i)) {
                Some(n) => ClassRecord::named(n.clone(), c),
                None => ClassRecord::from(c),
            })
            .collect();
        ClassSetRecord {
            schema: SCHEMA_VERSION,
            p: set.prime().get(),
            kind: set.kind(),
            classes,
            certificate: set.certificate(),
        }
    }

    /// Rebuilds and re-validates the set. Certified sets are re-certified
    /// when a lattice is supplied.
    pub fn to_set(&self, lattice: Option<&ClassLattice>) -> Result<ClassSet> {
        if self.schema != SCHEMA_VERSION {
            return Err(MubError::Record(format!("unsupported schema {}", self.schema)));
        }
        let p = Prime::new(self.p)?;
        let classes = self.classes.iter().map(ClassRecord::to_class).collect::<Result<Vec<_>>>()?;
        if let Some(c) = classes.iter().find(|c| c.prime() != p) {
            return Err(MubError::PrimeMismatch(p.get(), c.prime().get()));
        }
        ClassSet::from_parts(p, self.kind, classes, self.certificate, lattice)
    }

    pub fn names(&self) -> Vec<Option<String>> {
        self.classes.iter().map(|c| c.name.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub label: Vec<u8>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisRecord {
    pub class: ClassRecord,
    pub states: Vec<StateRecord>,
}

impl From<&Basis> for BasisRecord {
    fn from(b: &Basis) -> Self {
        BasisRecord {
            class: ClassRecord::from(b.class()),
            states: b
                .labels()
                .iter()
                .zip(b.states())
                .map(|(x, s)| StateRecord {
                    label: x.entries().to_vec(),
                    re: s.iter().map(|a| a.re).collect(),
                    im: s.iter().map(|a| a.im).collect(),
                })
                .collect(),
        }
    }
}

impl BasisRecord {
    pub fn to_basis(&self) -> Result<Basis> {
        let class = self.class.to_class()?;
        let p = class.prime();
        let mut labels = Vec::with_capacity(self.states.len());
        let mut states = Vec::with_capacity(self.states.len());
        for s in &self.states {
            labels.push(BasisLabel::new(s.label.clone(), p)?);
            if s.re.len() != s.im.len() {
                return Err(MubError::Record("re/im length mismatch".into()));
            }
            states.push(StateVector::from_iterator(
                s.re.len(),
                s.re.iter().zip(&s.im).map(|(&r, &i)| Complex64::new(r, i)),
            ));
        }
        Basis::from_parts(class, labels, states)
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}

pub fn from_json<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| MubError::Record(e.to_string()))
}
