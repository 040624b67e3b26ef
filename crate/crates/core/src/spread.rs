//! Complete sets (spreads), new-class formation from `p + 1` classes, and
//! assembly plus certification of unextendible sets.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::ControlFlow;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{MubError, Result};
use crate::lattice::{ClassLattice, CommutingClass, WordSet};
use crate::par;
use crate::pauli::Prime;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetKind {
    Complete,
    Candidate,
    CertifiedUnextendible,
}

/// Certificate of absence: no class of the lattice fits inside the residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnextCertificate {
    pub residual_word_count: usize,
    pub lagrangians_checked: usize,
}

/// Ordered collection of pairwise-disjoint classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassSet {
    p: Prime,
    kind: SetKind,
    classes: Vec<CommutingClass>,
    certificate: Option<UnextCertificate>,
}

impl ClassSet {
    /// A candidate set; classes must share `p` and be pairwise disjoint.
    pub fn candidate(p: Prime, classes: Vec<CommutingClass>) -> Result<Self> {
        check_pairwise_disjoint(p, &classes)?;
        Ok(ClassSet { p, kind: SetKind::Candidate, classes, certificate: None })
    }

    /// A complete set: `p² + 1` disjoint classes covering every nonidentity word.
    pub fn complete(p: Prime, classes: Vec<CommutingClass>) -> Result<Self> {
        check_pairwise_disjoint(p, &classes)?;
        if classes.len() != p.dim() + 1 {
            return Err(MubError::InvalidClassSet(format!(
                "complete set needs {} classes, got {}",
                p.dim() + 1,
                classes.len()
            )));
        }
        if union_mask(p, &classes) != WordSet::all_nonidentity(p) {
            return Err(MubError::InvalidClassSet("classes do not cover every word".into()));
        }
        Ok(ClassSet { p, kind: SetKind::Complete, classes, certificate: None })
    }

    /// Rebuilds a set from stored parts, re-validating the kind.
    pub fn from_parts(
        p: Prime,
        kind: SetKind,
        classes: Vec<CommutingClass>,
        certificate: Option<UnextCertificate>,
        lattice: Option<&ClassLattice>,
    ) -> Result<Self> {
        match kind {
            SetKind::Complete => Self::complete(p, classes),
            SetKind::Candidate => Self::candidate(p, classes),
            SetKind::CertifiedUnextendible => {
                let set = Self::candidate(p, classes)?;
                let claimed =
                    certificate.ok_or_else(|| MubError::InvalidClassSet("certified set without certificate".into()))?;
                match lattice {
                    Some(lattice) => match certify_unextendible(&set, lattice) {
                        Certification::Unextendible(cert) if cert == claimed => Ok(set.with_certificate(cert)),
                        Certification::Unextendible(_) => {
                            Err(MubError::InvalidClassSet("certificate counts do not match".into()))
                        }
                        Certification::Extendible { .. } => Err(MubError::InvalidClassSet("set is extendible".into())),
                    },
                    None => Ok(set.with_certificate(claimed)),
                }
            }
        }
    }

    fn with_certificate(mut self, cert: UnextCertificate) -> Self {
        self.kind = SetKind::CertifiedUnextendible;
        self.certificate = Some(cert);
        self
    }

    /// Certifies the set, or returns the class that extends it.
    pub fn certified(self, lattice: &ClassLattice) -> std::result::Result<Self, Box<CommutingClass>> {
        match certify_unextendible(&self, lattice) {
            Certification::Unextendible(cert) => Ok(self.with_certificate(cert)),
            Certification::Extendible { witness } => Err(Box::new(witness)),
        }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn kind(&self) -> SetKind {
        self.kind
    }

    pub fn classes(&self) -> &[CommutingClass] {
        &self.classes
    }

    pub fn certificate(&self) -> Option<UnextCertificate> {
        self.certificate
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Words used by some class of the set.
    pub fn covered(&self) -> WordSet {
        union_mask(self.p, &self.classes)
    }

    /// Nonidentity words outside every class.
    pub fn residual(&self) -> WordSet {
        let mut r = WordSet::all_nonidentity(self.p);
        r.difference_with(&self.covered());
        r
    }

    /// Canonically sorted copy of the classes, for set comparison.
    pub fn sorted_classes(&self) -> Vec<CommutingClass> {
        let mut v = self.classes.clone();
        v.sort();
        v
    }

    pub fn same_classes(&self, other: &ClassSet) -> bool {
        self.sorted_classes() == other.sorted_classes()
    }
}

fn check_pairwise_disjoint(p: Prime, classes: &[CommutingClass]) -> Result<()> {
    for (i, a) in classes.iter().enumerate() {
        if a.prime() != p {
            return Err(MubError::PrimeMismatch(p.get(), a.prime().get()));
        }
        for b in &classes[i + 1..] {
            if !a.disjoint(b)? {
                return Err(MubError::NotDisjoint);
            }
        }
    }
    Ok(())
}

pub fn union_mask<'a>(p: Prime, classes: impl IntoIterator<Item = &'a CommutingClass>) -> WordSet {
    let mut m = WordSet::empty(p);
    for c in classes {
        m.union_with(c.mask());
    }
    m
}

/// Candidate-ordering rule for the complete-set backtracking.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TieBreak {
    /// Canonical (lexicographic on generator matrices).
    Canonical,
    /// A seeded permutation of the canonical order.
    Seeded(u64),
}

impl TieBreak {
    fn ranks(self, n: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..n).collect();
        if let TieBreak::Seeded(seed) = self {
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        }
        let mut rank = vec![0; n];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        rank
    }
}

/// Depth-first enumeration of complete sets over a lattice, bounded by a
/// node budget. Branches on the uncovered word with the fewest available
/// classes (lowest word index on ties); options follow the tie-break order.
pub struct CompleteSetSearch<'a> {
    lattice: &'a ClassLattice,
    rank: Vec<usize>,
    budget: u64,
    nodes: u64,
}

impl<'a> CompleteSetSearch<'a> {
    pub fn new(lattice: &'a ClassLattice, tie_break: TieBreak, budget: u64) -> Self {
        CompleteSetSearch { lattice, rank: tie_break.ranks(lattice.len()), budget, nodes: 0 }
    }

    pub fn nodes_expanded(&self) -> u64 {
        self.nodes
    }

    pub fn budget_exhausted(&self) -> bool {
        self.nodes >= self.budget
    }

    /// Calls `visit` with the lattice indices of each complete set found.
    /// Returns `Break` if the visitor or the budget stopped the search.
    pub fn run<F>(&mut self, mut visit: F) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        let p = self.lattice.prime();
        let n = self.lattice.len();
        let mut state = SearchState {
            uncovered: WordSet::all_nonidentity(p),
            available: vec![true; n],
            chosen: Vec::with_capacity(p.dim() + 1),
        };
        self.descend(&mut state, &mut visit)
    }

    fn descend<F>(&mut self, st: &mut SearchState, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        if self.nodes >= self.budget {
            return ControlFlow::Break(());
        }
        self.nodes += 1;
        if st.uncovered.is_empty() {
            return visit(&st.chosen);
        }
        // most constrained uncovered word
        let mut best: Option<(usize, Vec<usize>)> = None;
        for w in st.uncovered.indices() {
            let opts: Vec<usize> =
                self.lattice.classes_containing(w).iter().map(|&c| c as usize).filter(|&c| st.available[c]).collect();
            let better = best.as_ref().is_none_or(|(_, b)| opts.len() < b.len());
            if better {
                let dead = opts.is_empty();
                best = Some((w, opts));
                if dead {
                    break;
                }
            }
        }
        let (_, mut opts) = best.expect("uncovered word exists");
        opts.sort_by_key(|&c| self.rank[c]);
        for c in opts {
            let class = &self.lattice.classes()[c];
            let mut blocked = Vec::new();
            for w in class.mask().indices() {
                for &o in self.lattice.classes_containing(w) {
                    if st.available[o as usize] {
                        st.available[o as usize] = false;
                        blocked.push(o as usize);
                    }
                }
            }
            st.uncovered.difference_with(class.mask());
            st.chosen.push(c);
            let flow = self.descend(st, visit);
            st.chosen.pop();
            st.uncovered.union_with(class.mask());
            for o in blocked {
                st.available[o] = true;
            }
            flow?;
        }
        ControlFlow::Continue(())
    }
}

struct SearchState {
    uncovered: WordSet,
    available: Vec<bool>,
    chosen: Vec<usize>,
}

/// The first complete set found by backtracking in tie-break order.
pub fn build_complete_set(lattice: &ClassLattice, tie_break: TieBreak) -> Result<ClassSet> {
    let mut found = None;
    let mut search = CompleteSetSearch::new(lattice, tie_break, u64::MAX);
    let _ = search.run(|chosen| {
        found = Some(chosen.to_vec());
        ControlFlow::Break(())
    });
    let chosen = found.expect("complete sets exist for every prime");
    let classes = chosen.into_iter().map(|i| lattice.classes()[i].clone()).collect();
    ClassSet::complete(lattice.prime(), classes)
}

/// All lattice classes lying inside the union of `subset` that are not
/// themselves members of `subset`.
pub fn new_classes_from_subset(subset: &[&CommutingClass], lattice: &ClassLattice) -> Result<Vec<CommutingClass>> {
    let p = lattice.prime();
    if subset.len() != p.as_usize() + 1 {
        return Err(MubError::WrongSubsetSize { expected: p.as_usize() + 1, got: subset.len() });
    }
    let owned: Vec<CommutingClass> = subset.iter().map(|c| (*c).clone()).collect();
    check_pairwise_disjoint(p, &owned)?;
    let union = union_mask(p, subset.iter().copied());
    Ok(par::filter_map(lattice.classes(), |c| (c.mask().is_subset(&union) && !subset.contains(&c)).then(|| c.clone())))
}

/// Replaces the classes at `subset_indices` by the new classes they admit.
pub fn assemble_unextendible(base: &ClassSet, subset_indices: &[usize], lattice: &ClassLattice) -> Result<ClassSet> {
    let mut picked = BTreeSet::new();
    for &i in subset_indices {
        if i >= base.len() {
            return Err(MubError::IndexOutOfRange { index: i, len: base.len() });
        }
        if !picked.insert(i) {
            return Err(MubError::Precondition(format!("duplicate subset index {i}")));
        }
    }
    let subset: Vec<&CommutingClass> = picked.iter().map(|&i| &base.classes[i]).collect();
    let new = new_classes_from_subset(&subset, lattice)?;
    if new.is_empty() {
        return Err(MubError::NoNewClass);
    }
    let mut classes: Vec<CommutingClass> = base
        .classes
        .iter()
        .enumerate()
        .filter(|(i, _)| !picked.contains(i))
        .map(|(_, c)| c.clone())
        .chain(new)
        .collect();
    classes.sort();
    ClassSet::candidate(base.p, classes)
}

/// Outcome of an unextendibility check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certification {
    Unextendible(UnextCertificate),
    /// The canonically first class that fits inside the residual.
    Extendible {
        witness: CommutingClass,
    },
}

impl Certification {
    pub fn is_unextendible(&self) -> bool {
        matches!(self, Certification::Unextendible(_))
    }
}

/// Scans every class of the lattice against the residual word set.
pub fn certify_unextendible(candidate: &ClassSet, lattice: &ClassLattice) -> Certification {
    let residual = candidate.residual();
    match par::find_first(lattice.classes(), |c| c.mask().is_subset(&residual)) {
        Some(witness) => Certification::Extendible { witness: witness.clone() },
        None => Certification::Unextendible(UnextCertificate {
            residual_word_count: residual.len(),
            lagrangians_checked: lattice.len(),
        }),
    }
}

/// New-class counts for every `(p + 1)`-subset of a complete set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetScan {
    /// `(sorted subset indices, number of new classes)` in lexicographic order.
    pub counts: Vec<(Vec<usize>, usize)>,
    /// Number of subsets per new-class count.
    pub histogram: BTreeMap<usize, usize>,
}

impl SubsetScan {
    pub fn max_count(&self) -> usize {
        self.histogram.keys().copied().max().unwrap_or(0)
    }

    /// No subset admits exactly one new class, and none admits more than two.
    pub fn never_exactly_one(&self) -> bool {
        !self.histogram.contains_key(&1) && self.max_count() <= 2
    }
}

/// k-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Runs [`new_classes_from_subset`] on every `(p + 1)`-subset of `complete`.
pub fn subset_scan(complete: &ClassSet, lattice: &ClassLattice) -> Result<SubsetScan> {
    if complete.kind != SetKind::Complete {
        return Err(MubError::Precondition("subset scan needs a complete set".into()));
    }
    let subsets = combinations(complete.len(), complete.p.as_usize() + 1);
    let counts = par::map(&subsets, |s| {
        let sub: Vec<&CommutingClass> = s.iter().map(|&i| &complete.classes[i]).collect();
        new_classes_from_subset(&sub, lattice).map(|v| (s.clone(), v.len()))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let mut histogram = BTreeMap::new();
    for (_, c) in &counts {
        *histogram.entry(*c).or_insert(0) += 1;
    }
    Ok(SubsetScan { counts, histogram })
}

/// Exhaustive 4-subset scan of a complete set at `p = 3`.
pub fn theorem2_scan(complete: &ClassSet, lattice: &ClassLattice) -> Result<SubsetScan> {
    if complete.p.get() != 3 {
        return Err(MubError::WrongPrime { expected: 3, got: complete.p.get() });
    }
    subset_scan(complete, lattice)
}

/// The `(p + 1)`-subsets of a complete set that admit at least one new
/// class, found by indexing each non-member class by the complete-set
/// classes it meets. Agrees with [`subset_scan`] on every nonzero entry.
pub fn admissible_subsets(complete: &ClassSet, lattice: &ClassLattice) -> BTreeMap<Vec<usize>, Vec<CommutingClass>> {
    let p = complete.p;
    let k = p.as_usize() + 1;
    let outside: Vec<&CommutingClass> = lattice.classes().iter().filter(|c| !complete.classes.contains(c)).collect();
    let hits = par::map(&outside, |c| {
        let meets: Vec<usize> = complete
            .classes
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.mask().is_disjoint(c.mask()))
            .map(|(i, _)| i)
            .collect();
        (meets, (*c).clone())
    });
    let mut out: BTreeMap<Vec<usize>, Vec<CommutingClass>> = BTreeMap::new();
    for (meets, class) in hits {
        if meets.len() > k {
            continue;
        }
        // any (p+1)-superset of the met classes contains this class
        let rest: Vec<usize> = (0..complete.len()).filter(|i| !meets.contains(i)).collect();
        for extra in combinations(rest.len(), k - meets.len()) {
            let mut subset: Vec<usize> = meets.iter().copied().chain(extra.iter().map(|&j| rest[j])).collect();
            subset.sort_unstable();
            out.entry(subset).or_default().push(class.clone());
        }
    }
    for v in out.values_mut() {
        v.sort();
    }
    out
}

/// Result of [`search_unextendible`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub target_size: usize,
    /// Distinct certified sets, canonically sorted.
    pub sets: Vec<ClassSet>,
    pub nodes_expanded: u64,
    pub complete_sets_visited: usize,
    pub budget_exhausted: bool,
}

/// Enumerates complete sets (bounded by `budget` search nodes) and collects
/// every certified unextendible set of `target_size` obtainable by replacing
/// `p + 1` classes with the classes they admit.
pub fn search_unextendible(
    lattice: &ClassLattice,
    target_size: usize,
    budget: u64,
    tie_break: TieBreak,
) -> Result<SearchReport> {
    let p = lattice.prime();
    let base = p.dim() - p.as_usize();
    if target_size != base + 1 && target_size != base + 2 {
        return Err(MubError::Precondition(format!(
            "target size must be {} or {}, got {target_size}",
            base + 1,
            base + 2
        )));
    }
    if budget == 0 {
        return Err(MubError::Precondition("budget must be positive".into()));
    }
    let wanted_new = target_size - base;
    let mut found: BTreeSet<Vec<CommutingClass>> = BTreeSet::new();
    let mut visited = 0usize;
    let mut search = CompleteSetSearch::new(lattice, tie_break, budget);
    let mut failure = None;
    let _ = search.run(|chosen| {
        visited += 1;
        let classes = chosen.iter().map(|&i| lattice.classes()[i].clone()).collect();
        let complete = match ClassSet::complete(p, classes) {
            Ok(c) => c,
            Err(e) => {
                failure = Some(e);
                return ControlFlow::Break(());
            }
        };
        for (subset, new) in admissible_subsets(&complete, lattice) {
            if new.len() != wanted_new {
                continue;
            }
            let mut classes: Vec<CommutingClass> = complete
                .classes
                .iter()
                .enumerate()
                .filter(|(i, _)| !subset.contains(i))
                .map(|(_, c)| c.clone())
                .chain(new)
                .collect();
            classes.sort();
            found.insert(classes);
        }
        ControlFlow::Continue(())
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let candidates: Vec<Vec<CommutingClass>> = found.into_iter().collect();
    let sets =
        par::filter_map(&candidates, |classes| ClassSet::candidate(p, classes.clone()).ok()?.certified(lattice).ok());
    Ok(SearchReport {
        target_size,
        sets,
        nodes_expanded: search.nodes_expanded(),
        complete_sets_visited: visited,
        budget_exhausted: search.budget_exhausted(),
    })
}
