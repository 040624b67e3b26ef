//! Maximal commuting classes as canonical Lagrangian subspaces of `F_p^4`.
//!
//! A class is stored by the reduced row-echelon form of a 2×4 generator
//! matrix (rows ordered by pivot column), so equal classes compare equal.
//! The member list mirrors the operator-class convention and excludes the
//! identity.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{MubError, Result};
use crate::par;
use crate::pauli::{PauliWord, Prime};

/// Default upper bound on `p` for exhaustive enumeration.
pub const DEFAULT_GUARD_MAX_P: u32 = 7;

/// Fixed-size bitset over word indices `0..p⁴`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WordSet {
    bits: Vec<u64>,
}

impl WordSet {
    pub fn empty(p: Prime) -> Self {
        WordSet { bits: vec![0; p.word_count().div_ceil(64)] }
    }

    /// Every nonidentity word.
    pub fn all_nonidentity(p: Prime) -> Self {
        let mut s = Self::empty(p);
        for i in 1..p.word_count() {
            s.insert_index(i);
        }
        s
    }

    #[inline]
    pub fn insert_index(&mut self, i: usize) {
        self.bits[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub fn contains_index(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn union_with(&mut self, other: &WordSet) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }

    pub fn difference_with(&mut self, other: &WordSet) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a &= !b;
        }
    }

    pub fn is_disjoint(&self, other: &WordSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &WordSet) -> bool {
        self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits
            .iter()
            .enumerate()
            .flat_map(|(w, &b)| (0..64).filter(move |i| b >> i & 1 == 1).map(move |i| w * 64 + i))
    }

    pub fn words(&self, p: Prime) -> Vec<PauliWord> {
        self.indices().map(|i| PauliWord::from_index(i, p)).collect()
    }
}

/// Reduced row-echelon form of the span of two vectors, or the failure reason.
fn rref_pair(u: &PauliWord, v: &PauliWord, p: Prime) -> Result<[PauliWord; 2]> {
    let mut rows = [u.0.map(|e| e % p.get() as u8), v.0.map(|e| e % p.get() as u8)];
    let mut pivots = [usize::MAX; 2];
    let mut r = 0;
    for col in 0..4 {
        if r == 2 {
            break;
        }
        let Some(src) = (r..2).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(r, src);
        let inv = p.inv(rows[r][col]).expect("nonzero pivot");
        rows[r] = rows[r].map(|e| p.mul(e, inv));
        for other in 0..2 {
            if other != r && rows[other][col] != 0 {
                let f = rows[other][col];
                let pivot_row = rows[r];
                for (c, e) in rows[other].iter_mut().enumerate() {
                    *e = p.add(*e, p.neg(p.mul(f, pivot_row[c])));
                }
            }
        }
        pivots[r] = col;
        r += 1;
    }
    if r < 2 {
        return Err(MubError::RankDeficient);
    }
    debug_assert!(pivots[0] < pivots[1]);
    Ok([PauliWord(rows[0]), PauliWord(rows[1])])
}

/// A maximal commuting class: a 2-dimensional isotropic subspace of `F_p^4`.
#[derive(Clone)]
pub struct CommutingClass {
    p: Prime,
    generators: [PauliWord; 2],
    members: Vec<PauliWord>,
    mask: WordSet,
}

impl CommutingClass {
    /// The class `⟨u, v⟩` spanned by two commuting independent words.
    pub fn span(u: &PauliWord, v: &PauliWord, p: Prime) -> Result<Self> {
        if u.is_identity() || v.is_identity() || !u.independent(v, p)? {
            return Err(MubError::RankDeficient);
        }
        if !u.commutes_with(v, p) {
            return Err(MubError::NotIsotropic);
        }
        let generators = rref_pair(u, v, p)?;
        Ok(Self::from_canonical(generators, p))
    }

    fn from_canonical(generators: [PauliWord; 2], p: Prime) -> Self {
        let q = p.get() as u8;
        let mut mask = WordSet::empty(p);
        for a in 0..q {
            for b in 0..q {
                if a == 0 && b == 0 {
                    continue;
                }
                let w = generators[0].power(a, p).compose(&generators[1].power(b, p), p);
                mask.insert_index(w.index(p));
            }
        }
        let members = mask.words(p);
        CommutingClass { p, generators, members, mask }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    /// Canonical (RREF) generator pair.
    pub fn generators(&self) -> [PauliWord; 2] {
        self.generators
    }

    /// The `p² − 1` nonidentity members, sorted.
    pub fn members(&self) -> &[PauliWord] {
        &self.members
    }

    pub fn mask(&self) -> &WordSet {
        &self.mask
    }

    pub fn contains(&self, w: &PauliWord) -> bool {
        w.is_valid(self.p) && self.mask.contains_index(w.index(self.p))
    }

    /// The `p + 1` independent representatives `σ⁽¹⁾ = g₁`, `σ⁽²⁾ = g₂`,
    /// `σ⁽ᵏ⁾ = g₁^(k−2)·g₂`; their nonzero powers exhaust the members.
    pub fn independent_representatives(&self) -> Vec<PauliWord> {
        let [g1, g2] = self.generators;
        let q = self.p.get() as u8;
        let mut reps = vec![g1, g2];
        reps.extend((1..q).map(|t| g1.power(t, self.p).compose(&g2, self.p)));
        reps
    }

    pub fn disjoint(&self, other: &CommutingClass) -> Result<bool> {
        if self.p != other.p {
            return Err(MubError::PrimeMismatch(self.p.get(), other.p.get()));
        }
        Ok(self.mask.is_disjoint(&other.mask))
    }

    fn sort_key(&self) -> (Prime, [PauliWord; 2]) {
        (self.p, self.generators)
    }
}

impl PartialEq for CommutingClass {
    fn eq(&self, other: &Self) -> bool {
        self.sort_key() == other.sort_key()
    }
}

impl Eq for CommutingClass {}

impl PartialOrd for CommutingClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CommutingClass {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl std::hash::Hash for CommutingClass {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.sort_key().hash(state);
    }
}

impl fmt::Debug for CommutingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b] = self.generators;
        write!(f, "⟨{:?}, {:?}⟩ mod {}", a.0, b.0, self.p)
    }
}

/// Every maximal commuting class for `p`, in canonical order.
///
/// Walks the six RREF pivot patterns of 2×4 matrices over `F_p` and keeps the
/// isotropic ones, so each class is produced exactly once.
pub fn enumerate_all_classes(p: Prime, guard_max_p: u32) -> Result<Vec<CommutingClass>> {
    if p.get() > guard_max_p {
        return Err(MubError::GuardExceeded { p: p.get(), max: guard_max_p });
    }
    let q = p.get() as u8;
    let mut forms: Vec<[PauliWord; 2]> = Vec::new();
    for c0 in 0..4 {
        for c1 in c0 + 1..4 {
            forms.extend(rref_forms(c0, c1, q));
        }
    }
    let mut classes: Vec<CommutingClass> =
        par::filter_map(&forms, |g| g[0].commutes_with(&g[1], p).then(|| CommutingClass::from_canonical(*g, p)));
    classes.sort();
    Ok(classes)
}

/// All 2×4 RREF matrices with pivots in columns `c0 < c1`.
fn rref_forms(c0: usize, c1: usize, q: u8) -> Vec<[PauliWord; 2]> {
    // free entries: row 0 right of c0 except the pivot column c1, row 1 right of c1
    let slots: Vec<(usize, usize)> =
        (c0 + 1..4).filter(|&c| c != c1).map(|c| (0, c)).chain((c1 + 1..4).map(|c| (1, c))).collect();
    let total = (q as usize).pow(slots.len() as u32);
    (0..total)
        .map(|mut code| {
            let mut rows = [[0u8; 4]; 2];
            rows[0][c0] = 1;
            rows[1][c1] = 1;
            for &(r, c) in slots.iter().rev() {
                rows[r][c] = (code % q as usize) as u8;
                code /= q as usize;
            }
            [PauliWord(rows[0]), PauliWord(rows[1])]
        })
        .collect()
}

/// All classes for one prime, with a word → containing-classes index.
#[derive(Debug, Clone)]
pub struct ClassLattice {
    p: Prime,
    classes: Vec<CommutingClass>,
    by_word: Vec<Vec<u32>>,
}

impl ClassLattice {
    pub fn new(p: Prime) -> Result<Self> {
        Self::with_guard(p, DEFAULT_GUARD_MAX_P)
    }

    pub fn with_guard(p: Prime, guard_max_p: u32) -> Result<Self> {
        let classes = enumerate_all_classes(p, guard_max_p)?;
        let mut by_word = vec![Vec::new(); p.word_count()];
        for (ci, c) in classes.iter().enumerate() {
            for i in c.mask.indices() {
                by_word[i].push(ci as u32);
            }
        }
        Ok(ClassLattice { p, classes, by_word })
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn classes(&self) -> &[CommutingClass] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn index_of(&self, c: &CommutingClass) -> Option<usize> {
        self.classes.binary_search(c).ok()
    }

    /// Indices of the classes containing word index `w`.
    pub fn classes_containing(&self, w: usize) -> &[u32] {
        &self.by_word[w]
    }
}

/// Per-member commutation counts of one class against a disjoint class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Property2Report {
    /// For each member of the first class (sorted order), how many members
    /// of the second class it commutes with.
    pub counts: Vec<usize>,
    /// Whether, for every member, its commutant in the second class is the
    /// set of nonzero powers of a single word.
    pub single_line: bool,
}

impl Property2Report {
    /// Every count is `p − 1` and every commutant is one line.
    pub fn holds(&self, p: Prime) -> bool {
        self.single_line && self.counts.iter().all(|&c| c == p.as_usize() - 1)
    }
}

/// Counts, for each member of `a`, the members of `b` it commutes with.
pub fn check_property2(a: &CommutingClass, b: &CommutingClass) -> Result<Property2Report> {
    if !a.disjoint(b)? {
        return Err(MubError::NotDisjoint);
    }
    let p = a.p;
    let q = p.get() as u8;
    let mut counts = Vec::with_capacity(a.members.len());
    let mut single_line = true;
    for u in &a.members {
        let commuting: Vec<PauliWord> = b.members.iter().copied().filter(|v| u.commutes_with(v, p)).collect();
        counts.push(commuting.len());
        if let Some(first) = commuting.first() {
            let line: Vec<PauliWord> = (1..q).map(|t| first.power(t, p)).collect();
            single_line &= commuting.iter().all(|w| line.contains(w));
        } else {
            single_line = false;
        }
    }
    Ok(Property2Report { counts, single_line })
}

/// The unique `m` with `k·m + l ≡ 0 (mod p)`.
pub fn partner_exponent(l: u8, k: u8, p: Prime) -> Result<u8> {
    let inv = p.inv(k).ok_or(MubError::DegenerateCommutationConstant)?;
    Ok(p.mul(p.neg(l % p.get() as u8), inv))
}
