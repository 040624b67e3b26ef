//! Two-qudit generalized Pauli words over a prime field.
//!
//! A word `X^m Z^n ⊗ X^k Z^l` is stored projectively as its exponent vector
//! `(m, n, k, l)` in `F_p^4`. Composition adds exponents and drops the phase;
//! commutation is governed by the symplectic form
//! `s(u, v) = (n·m' − n'·m) + (l·k' − l'·k) mod p`, which satisfies
//! `U V = ω^s V U` for the matrix realization with `Z X = ω X Z`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{MubError, Result};

/// A validated prime modulus small enough for `u8` exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Self> {
        if p < 2 || (2..).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(MubError::NotPrime(p));
        }
        if p > u8::MAX as u32 {
            return Err(MubError::PrimeTooLarge { p });
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn as_usize(self) -> usize {
        self.0 as usize
    }

    /// Hilbert-space dimension `p²`.
    #[inline]
    pub fn dim(self) -> usize {
        self.as_usize() * self.as_usize()
    }

    /// Number of words including the identity, `p⁴`.
    #[inline]
    pub fn word_count(self) -> usize {
        self.dim() * self.dim()
    }

    #[inline]
    pub fn reduce(self, a: i64) -> u8 {
        a.rem_euclid(self.0 as i64) as u8
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        ((a as u32 + b as u32) % self.0) as u8
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        ((a as u32 * b as u32) % self.0) as u8
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        ((self.0 - a as u32 % self.0) % self.0) as u8
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: u8) -> Option<u8> {
        let a = a as u32 % self.0;
        if a == 0 {
            return None;
        }
        // Fermat: a^(p-2)
        let mut acc = 1u32;
        let mut base = a;
        let mut e = self.0 - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.0;
            }
            base = base * base % self.0;
            e >>= 1;
        }
        Some(acc as u8)
    }
}

impl<'de> Deserialize<'de> for Prime {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let p = u32::deserialize(d)?;
        Prime::new(p).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Phase-free exponent vector `[m, n, k, l]` of `X^m Z^n ⊗ X^k Z^l`.
///
/// Ordering is lexicographic on the exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PauliWord(pub [u8; 4]);

impl PauliWord {
    pub const IDENTITY: PauliWord = PauliWord([0; 4]);

    pub const fn new(m: u8, n: u8, k: u8, l: u8) -> Self {
        PauliWord([m, n, k, l])
    }

    /// Builds a word after reducing every exponent mod `p`.
    pub fn reduced(exps: [i64; 4], p: Prime) -> Self {
        PauliWord(exps.map(|e| p.reduce(e)))
    }

    pub fn exponents(&self) -> [u8; 4] {
        self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0 == [0; 4]
    }

    /// True when every exponent lies in `[0, p)`.
    pub fn is_valid(&self, p: Prime) -> bool {
        self.0.iter().all(|&e| (e as u32) < p.get())
    }

    /// Dense index `((m·p + n)·p + k)·p + l`; monotone in the word order.
    pub fn index(&self, p: Prime) -> usize {
        let p = p.as_usize();
        self.0.iter().fold(0, |acc, &e| acc * p + e as usize)
    }

    pub fn from_index(mut idx: usize, p: Prime) -> Self {
        let p = p.as_usize();
        let mut exps = [0u8; 4];
        for slot in exps.iter_mut().rev() {
            *slot = (idx % p) as u8;
            idx /= p;
        }
        PauliWord(exps)
    }

    /// All `p⁴ − 1` nonidentity words in lexicographic order.
    pub fn nonidentity(p: Prime) -> impl Iterator<Item = PauliWord> {
        (1..p.word_count()).map(move |i| PauliWord::from_index(i, p))
    }

    /// `s` with `U V = ω^s V U`; zero iff the words commute.
    pub fn symplectic_form(&self, other: &PauliWord, p: Prime) -> u8 {
        let [m, n, k, l] = self.0.map(i64::from);
        let [m2, n2, k2, l2] = other.0.map(i64::from);
        p.reduce((n * m2 - n2 * m) + (l * k2 - l2 * k))
    }

    pub fn commutes_with(&self, other: &PauliWord, p: Prime) -> bool {
        self.symplectic_form(other, p) == 0
    }

    /// Product `U V` with the phase discarded.
    pub fn compose(&self, other: &PauliWord, p: Prime) -> PauliWord {
        let mut out = [0u8; 4];
        for (o, (a, b)) in out.iter_mut().zip(self.0.iter().zip(other.0.iter())) {
            *o = p.add(*a % p.get() as u8, *b % p.get() as u8);
        }
        PauliWord(out)
    }

    /// `U^a` with the phase discarded.
    pub fn power(&self, a: u8, p: Prime) -> PauliWord {
        PauliWord(self.0.map(|e| p.mul(e, a)))
    }

    /// Whether `u` and `v` are linearly independent over `F_p`, i.e. no
    /// `U^k = V^l` other than the trivial one.
    pub fn independent(&self, other: &PauliWord, p: Prime) -> Result<bool> {
        if self.is_identity() || other.is_identity() {
            return Err(MubError::IdentityWord);
        }
        let u = self.0.map(|e| e % p.get() as u8);
        let v = other.0.map(|e| e % p.get() as u8);
        let pivot = u.iter().position(|&e| e != 0).expect("nonidentity");
        let scale = p.mul(v[pivot], p.inv(u[pivot]).expect("nonzero pivot"));
        Ok(u.iter().zip(v.iter()).any(|(&a, &b)| p.mul(a, scale) != b))
    }
}

impl fmt::Display for PauliWord {
    /// Renders as `X^m Z^n | X^k Z^l`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [m, n, k, l] = self.0;
        write!(f, "X^{m} Z^{n} | X^{k} Z^{l}")
    }
}
