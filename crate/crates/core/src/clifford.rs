//! Complexified Clifford algebras `Cl(p,q) ⊗ ℂ` on the subset basis.
//!
//! Generators are numbered `0..p` for the `e_i` (square `-1`) followed by
//! `p..p+q` for the `f_j` (square `+1`). A basis word is a bitmask over these
//! indices, always read in ascending order.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on `p + q`; words are stored in a `u32`.
pub const MAX_GENERATORS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CliffordSignature {
    pub p: usize,
    pub q: usize,
}

impl CliffordSignature {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p + q > MAX_GENERATORS {
            return Err(Error::InvalidArgument(format!(
                "signature ({p},{q}) exceeds {MAX_GENERATORS} generators"
            )));
        }
        Ok(Self { p, q })
    }

    pub fn generators(&self) -> usize {
        self.p + self.q
    }

    /// Complex dimension `2^(p+q)`.
    pub fn dim(&self) -> usize {
        1 << self.generators()
    }

    /// Square of generator `g`: `-1` for an `e`, `+1` for an `f`.
    pub fn square(&self, g: usize) -> f64 {
        if g < self.p {
            -1.0
        } else {
            1.0
        }
    }

    /// Bitmask of the `f` generators.
    pub fn f_mask(&self) -> u32 {
        (((1u64 << self.generators()) - 1) as u32) & !(((1u64 << self.p) - 1) as u32)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorKind {
    E,
    F,
}

/// Sign picked up when reordering the concatenated word `a·b` into
/// ascending order: one factor of `-1` per inverted pair.
pub fn reorder_sign(a: u32, b: u32) -> f64 {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Product of two basis words: `(sign, word)`.
pub fn word_product(sig: CliffordSignature, a: u32, b: u32) -> (f64, u32) {
    let mut sign = reorder_sign(a, b);
    // e_i^2 = -1 for every shared e generator
    let shared_e = (a & b) & !sig.f_mask();
    if shared_e.count_ones() % 2 == 1 {
        sign = -sign;
    }
    (sign, a ^ b)
}

/// Image of a basis word under the generator substitution `g ↦ images[g]`
/// (injective): the new word and the sign of reordering it.
pub fn map_word(w: u32, images: &[usize]) -> (u32, f64) {
    let mut sign = 1.0;
    let mut acc = 0u32;
    let mut rest = w;
    while rest != 0 {
        let g = rest.trailing_zeros() as usize;
        let bit = 1u32 << images[g];
        sign *= reorder_sign(acc, bit);
        acc |= bit;
        rest &= rest - 1;
    }
    (acc, sign)
}

/// Parity of a word under the grading involution.
pub fn word_parity(w: u32) -> f64 {
    if w.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Sign of a word under the Real involution `c` (each `f` flips sign).
pub fn word_theta_sign(sig: CliffordSignature, w: u32) -> f64 {
    if (w & sig.f_mask()).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Element of `ℂl(p,q)` in canonical form (no stored zero coefficients).
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordElement {
    signature: CliffordSignature,
    coefficients: BTreeMap<u32, Complex64>,
}

impl CliffordElement {
    pub fn zero(signature: CliffordSignature) -> Self {
        Self {
            signature,
            coefficients: BTreeMap::new(),
        }
    }

    pub fn scalar(signature: CliffordSignature, value: Complex64) -> Self {
        Self::from_word(signature, 0, value)
    }

    pub fn one(signature: CliffordSignature) -> Self {
        Self::scalar(signature, Complex64::new(1.0, 0.0))
    }

    pub fn from_word(signature: CliffordSignature, word: u32, value: Complex64) -> Self {
        let mut out = Self::zero(signature);
        out.add_term(word, value);
        out
    }

    /// Builds an element from 1-based generator subsets (`e` first, then `f`).
    pub fn from_subsets(
        signature: CliffordSignature,
        terms: &[(Vec<usize>, Complex64)],
    ) -> Result<Self> {
        let mut out = Self::zero(signature);
        for (subset, value) in terms {
            let mut word = 0u32;
            let mut last = 0;
            for &g in subset {
                if g == 0 || g > signature.generators() || g <= last {
                    return Err(Error::InvalidArgument(format!(
                        "subset {subset:?} is not a sorted subset of 1..={}",
                        signature.generators()
                    )));
                }
                last = g;
                word |= 1 << (g - 1);
            }
            out.add_term(word, *value);
        }
        Ok(out)
    }

    pub fn generator(signature: CliffordSignature, kind: GeneratorKind, index: usize) -> Result<Self> {
        let (bound, offset) = match kind {
            GeneratorKind::E => (signature.p, 0),
            GeneratorKind::F => (signature.q, signature.p),
        };
        if index == 0 || index > bound {
            return Err(Error::IndexOutOfRange {
                what: match kind {
                    GeneratorKind::E => "e generator",
                    GeneratorKind::F => "f generator",
                },
                index,
                bound,
            });
        }
        Ok(Self::from_word(
            signature,
            1 << (offset + index - 1),
            Complex64::new(1.0, 0.0),
        ))
    }

    fn add_term(&mut self, word: u32, value: Complex64) {
        let entry = self
            .coefficients
            .entry(word)
            .or_insert(Complex64::new(0.0, 0.0));
        *entry += value;
        if *entry == Complex64::new(0.0, 0.0) {
            self.coefficients.remove(&word);
        }
    }

    pub fn signature(&self) -> CliffordSignature {
        self.signature
    }

    pub fn coefficient(&self, word: u32) -> Complex64 {
        self.coefficients
            .get(&word)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, Complex64)> + '_ {
        self.coefficients.iter().map(|(w, c)| (*w, *c))
    }

    /// Terms with 1-based generator subsets, as serialized.
    pub fn subset_terms(&self) -> Vec<(Vec<usize>, Complex64)> {
        self.terms()
            .map(|(w, c)| {
                let subset = (0..self.signature.generators())
                    .filter(|g| w & (1 << g) != 0)
                    .map(|g| g + 1)
                    .collect();
                (subset, c)
            })
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if self.signature != other.signature {
            return Err(Error::SignatureMismatch {
                left: (self.signature.p, self.signature.q),
                right: (other.signature.p, other.signature.q),
            });
        }
        let mut out = Self::zero(self.signature);
        for (wa, ca) in self.terms() {
            for (wb, cb) in other.terms() {
                let (sign, w) = word_product(self.signature, wa, wb);
                out.add_term(w, ca * cb * sign);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, value: Complex64) -> Self {
        let mut out = Self::zero(self.signature);
        for (w, c) in self.terms() {
            out.add_term(w, c * value);
        }
        out
    }

    /// The grading involution `ε`.
    pub fn grading_involution(&self) -> Self {
        let mut out = Self::zero(self.signature);
        for (w, c) in self.terms() {
            out.add_term(w, c * word_parity(w));
        }
        out
    }

    /// The antilinear Real involution `θ`.
    pub fn real_involution(&self) -> Self {
        let mut out = Self::zero(self.signature);
        for (w, c) in self.terms() {
            out.add_term(w, c.conj() * word_theta_sign(self.signature, w));
        }
        out
    }

    /// Largest coefficient modulus of `self - other`.
    pub fn max_abs_difference(&self, other: &Self) -> f64 {
        let mut words: Vec<u32> = self.coefficients.keys().copied().collect();
        words.extend(other.coefficients.keys().copied());
        words
            .into_iter()
            .map(|w| (self.coefficient(w) - other.coefficient(w)).norm())
            .fold(0.0, f64::max)
    }
}

impl Add for &CliffordElement {
    type Output = CliffordElement;

    fn add(self, rhs: Self) -> CliffordElement {
        assert_eq!(self.signature, rhs.signature, "signature mismatch in add");
        let mut out = self.clone();
        for (w, c) in rhs.terms() {
            out.add_term(w, c);
        }
        out
    }
}

impl Neg for &CliffordElement {
    type Output = CliffordElement;

    fn neg(self) -> CliffordElement {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &CliffordElement {
    type Output = CliffordElement;

    fn mul(self, rhs: Self) -> CliffordElement {
        self.multiply(rhs).expect("signature mismatch in product")
    }
}

impl fmt::Display for CliffordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let p = self.signature.p;
        let mut first = true;
        for (w, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for g in 0..self.signature.generators() {
                if w & (1 << g) != 0 {
                    if g < p {
                        write!(f, "e{}", g + 1)?;
                    } else {
                        write!(f, "f{}", g - p + 1)?;
                    }
                }
            }
        }
        Ok(())
    }
}
