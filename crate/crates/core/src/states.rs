//! Dense matrices for Pauli words and analytic eigenbases of commuting classes.
//!
//! Each class eigenstate is labelled by `x ∈ F_p^{p+1}` with
//! `x_k = (k − 2)·x₁ + x₂`, and its projector is
//! `ρ = (1/p²)[I + Σ_l Σ_{j=1}^{p−1} ω^{j·x_l} (σ⁽ˡ⁾)^j]`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{MubError, Result};
use crate::lattice::CommutingClass;
use crate::par;
use crate::pauli::{PauliWord, Prime};

pub type DenseOperator = DMatrix<Complex64>;
pub type StateVector = DVector<Complex64>;

/// Tolerance for algebraic identities on monomial matrices.
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Tolerance for projector and orthonormality checks.
pub const PROJECTOR_TOL: f64 = 1e-10;
/// Tolerance for comparing two independent numerical routes.
pub const CROSS_PATH_TOL: f64 = 1e-9;

/// `ω^k` for `k ∈ 0..p`, each computed from its exact angle.
pub fn omega_table(p: Prime) -> Vec<Complex64> {
    let q = p.get() as f64;
    (0..p.get()).map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / q)).collect()
}

/// `X^m Z^n ⊗ X^k Z^l` with `X|j⟩ = |j+1⟩`, `Z|j⟩ = ω^j|j⟩`, no extra scalar.
pub fn realize_word(w: &PauliWord, p: Prime) -> DenseOperator {
    let q = p.as_usize();
    let omega = omega_table(p);
    let [m, n, k, l] = w.exponents().map(|e| e as usize % q);
    let d = q * q;
    let mut out = DenseOperator::zeros(d, d);
    // (X^m Z^n)|j⟩ = ω^{n j} |j + m⟩
    for j1 in 0..q {
        for j2 in 0..q {
            let col = j1 * q + j2;
            let row = ((j1 + m) % q) * q + (j2 + k) % q;
            out[(row, col)] = omega[(n * j1 + l * j2) % q];
        }
    }
    out
}

/// [`realize_word`] rescaled by a unit phase so that `W^p = I`.
///
/// For odd `p` this is the plain realization. For `p = 2` a factor `XZ`
/// squares to `−I`, so the word picks up `i` (the Hermitian `Y` convention).
pub fn realize_word_order_p(w: &PauliWord, p: Prime) -> DenseOperator {
    let mut m = realize_word(w, p);
    let mut acc = DenseOperator::identity(m.nrows(), m.ncols());
    for _ in 0..p.get() {
        acc = &acc * &m;
    }
    let c = acc[(0, 0)];
    if (c - Complex64::new(1.0, 0.0)).norm() > ALGEBRAIC_TOL {
        // pick λ with λ^p · c = 1
        let lambda = Complex64::from_polar(1.0, -c.arg() / p.get() as f64);
        m *= lambda;
    }
    m
}

/// Eigenvalue label `x ∈ F_p^{p+1}` of one class eigenstate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BasisLabel(Vec<u8>);

impl BasisLabel {
    /// The label determined by `(x₁, x₂)`.
    pub fn from_pair(x1: u8, x2: u8, p: Prime) -> Self {
        let q = p.get() as u8;
        let (x1, x2) = (x1 % q, x2 % q);
        let mut x = vec![x1, x2];
        x.extend((1..q).map(|t| p.add(p.mul(t, x1), x2)));
        BasisLabel(x)
    }

    /// Validates length `p + 1`, range, and `x_k = (k−2)x₁ + x₂`.
    pub fn new(x: Vec<u8>, p: Prime) -> Result<Self> {
        if x.len() != p.as_usize() + 1 {
            return Err(MubError::InconsistentLabel(format!("expected {} entries, got {}", p.as_usize() + 1, x.len())));
        }
        if x.iter().any(|&e| e as u32 >= p.get()) {
            return Err(MubError::InconsistentLabel("entry outside F_p".into()));
        }
        let expected = Self::from_pair(x[0], x[1], p);
        if expected.0 != x {
            return Err(MubError::InconsistentLabel(format!("{x:?} violates x_k = (k-2)x_1 + x_2")));
        }
        Ok(BasisLabel(x))
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    /// Number of coordinates on which two labels agree.
    pub fn agreements(&self, other: &BasisLabel) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a == b).count()
    }
}

/// Matrix powers `(σ⁽ˡ⁾)^j`, `l ∈ 1..=p+1`, `j ∈ 0..p`, for one class.
///
/// `σ⁽¹⁾`, `σ⁽²⁾` are the order-`p` realizations of the canonical generators
/// and `σ⁽ᵏ⁾ = (σ⁽¹⁾)^{k−2} σ⁽²⁾` as matrix products, so the whole family is a
/// faithful copy of `Z_p × Z_p`.
#[derive(Debug, Clone)]
pub struct ClassOperators {
    p: Prime,
    powers: Vec<Vec<DenseOperator>>,
}

impl ClassOperators {
    pub fn new(class: &CommutingClass) -> Self {
        let p = class.prime();
        let q = p.as_usize();
        let [g1, g2] = class.generators();
        let s1 = realize_word_order_p(&g1, p);
        let s2 = realize_word_order_p(&g2, p);
        let mut sigmas = vec![s1.clone(), s2.clone()];
        let mut s1_pow = s1.clone();
        for _ in 1..q {
            sigmas.push(&s1_pow * &s2);
            s1_pow = &s1_pow * &s1;
        }
        let d = p.dim();
        let powers = sigmas
            .iter()
            .map(|s| {
                let mut row = Vec::with_capacity(q);
                let mut acc = DenseOperator::identity(d, d);
                for _ in 0..q {
                    row.push(acc.clone());
                    acc = &acc * s;
                }
                row
            })
            .collect();
        ClassOperators { p, powers }
    }

    /// `(σ⁽ˡ⁾)^j` with `l` 1-based.
    pub fn sigma_power(&self, l: usize, j: usize) -> &DenseOperator {
        &self.powers[l - 1][j % self.p.as_usize()]
    }

    pub fn projector(&self, x: &BasisLabel) -> Result<DenseOperator> {
        let p = self.p;
        let label = BasisLabel::new(x.0.clone(), p)?;
        let q = p.as_usize();
        let omega = omega_table(p);
        let d = p.dim();
        let mut rho = DenseOperator::identity(d, d);
        for (l, xl) in label.0.iter().enumerate() {
            for j in 1..q {
                let phase = omega[(j * *xl as usize) % q];
                rho += &self.powers[l][j] * phase;
            }
        }
        rho /= Complex64::new((q * q) as f64, 0.0);
        Ok(rho)
    }
}

/// The eigenprojector of `class` with label `x`.
pub fn projector_from_label(class: &CommutingClass, x: &BasisLabel) -> Result<DenseOperator> {
    ClassOperators::new(class).projector(x)
}

/// `‖ρ² − ρ‖_F`.
pub fn idempotency_error(rho: &DenseOperator) -> f64 {
    (rho * rho - rho).norm()
}

pub fn hermiticity_error(m: &DenseOperator) -> f64 {
    (m - m.adjoint()).norm()
}

/// `‖U U† − I‖_F`.
pub fn unitarity_error(m: &DenseOperator) -> f64 {
    (m * m.adjoint() - DenseOperator::identity(m.nrows(), m.ncols())).norm()
}

/// Common eigenbasis of one class, states indexed by their labels.
#[derive(Debug, Clone)]
pub struct Basis {
    class: CommutingClass,
    labels: Vec<BasisLabel>,
    states: Vec<StateVector>,
}

impl Basis {
    pub fn class(&self) -> &CommutingClass {
        &self.class
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn dim(&self) -> usize {
        self.class.prime().dim()
    }

    /// Rebuilds a basis from stored parts without re-deriving the states.
    pub fn from_parts(class: CommutingClass, labels: Vec<BasisLabel>, states: Vec<StateVector>) -> Result<Self> {
        let d = class.prime().dim();
        if labels.len() != d || states.len() != d {
            return Err(MubError::Record(format!("basis needs {d} states")));
        }
        if let Some(s) = states.iter().find(|s| s.len() != d) {
            return Err(MubError::DimensionMismatch(s.len(), d));
        }
        Ok(Basis { class, labels, states })
    }

    /// `max |⟨a|b⟩ − δ_ab|` over all pairs.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.states.iter().enumerate() {
            for (j, b) in self.states.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.dotc(b) - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// Unit vector spanning a rank-one projector, first nonzero amplitude real positive.
fn vector_from_projector(rho: &DenseOperator) -> Result<StateVector> {
    let trace = rho.trace().re;
    let err = idempotency_error(rho);
    if (trace - 1.0).abs() > 1e-8 || err > 1e-8 {
        return Err(MubError::NotRankOne { trace, error: err });
    }
    let (col, _) =
        (0..rho.ncols())
            .map(|j| (j, rho[(j, j)].re))
            .fold((0, f64::MIN), |best, cur| if cur.1 > best.1 { cur } else { best });
    let mut v: StateVector = rho.column(col).into_owned();
    v /= Complex64::new(v.norm(), 0.0);
    let pivot = v.iter().copied().find(|a| a.norm() > 1e-9).expect("nonzero vector");
    let phase = pivot.conj() / pivot.norm();
    v *= phase;
    Ok(v)
}

/// The `p²` common eigenvectors of `class`, labels `(x₁, x₂)` in lexicographic order.
pub fn build_basis(class: &CommutingClass) -> Result<Basis> {
    let p = class.prime();
    let q = p.get() as u8;
    let ops = ClassOperators::new(class);
    let labels: Vec<BasisLabel> =
        (0..q).flat_map(|x1| (0..q).map(move |x2| BasisLabel::from_pair(x1, x2, p))).collect();
    let states = par::map(&labels, |x| ops.projector(x).and_then(|rho| vector_from_projector(&rho)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(Basis { class: class.clone(), labels, states })
}

/// `max | |⟨a|b⟩|² − 1/d |` over `a ∈ b1`, `b ∈ b2`.
pub fn verify_unbiased(b1: &Basis, b2: &Basis) -> Result<f64> {
    if b1.dim() != b2.dim() {
        return Err(MubError::DimensionMismatch(b1.dim(), b2.dim()));
    }
    let inv_d = 1.0 / b1.dim() as f64;
    let mut worst: f64 = 0.0;
    for a in &b1.states {
        for b in &b2.states {
            worst = worst.max((a.dotc(b).norm_sqr() - inv_d).abs());
        }
    }
    Ok(worst)
}
