//! Free-group words, the integral group ring, endomorphisms of F(a, b) and
//! Fox derivatives.
//!
//! Generators are indexed from zero. In the bundle setting index 0 is `a`,
//! 1 is `b` and 2 is the stable letter `x`. Text uses lower case for a
//! generator, upper case for its inverse, and `^n` for powers.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Default generator names: fibre generators `a`, `b` and stable letter `x`.
pub const BUNDLE_NAMES: [char; 3] = ['a', 'b', 'x'];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub gen: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: usize, inverse: bool) -> Self {
        Letter { gen, inverse }
    }

    pub fn inv(self) -> Self {
        Letter { gen: self.gen, inverse: !self.inverse }
    }
}

/// A freely reduced word. Construction always reduces.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn generator(gen: usize) -> Self {
        Word(vec![Letter::new(gen, false)])
    }

    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Parse with the bundle names `a`, `b`, `x`.
    pub fn parse(s: &str) -> Result<Self> {
        Self::parse_with(s, &BUNDLE_NAMES)
    }

    /// Parse a word over single-character generator names. Upper case is the
    /// inverse; `g^n` and `g^-n` are powers. `1` or an empty string is the
    /// identity.
    pub fn parse_with(s: &str, names: &[char]) -> Result<Self> {
        let chars: Vec<(usize, char)> = s.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        if chars.len() == 1 && chars[0].1 == '1' {
            return Ok(Word::identity());
        }
        let mut letters = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let (pos, c) = chars[i];
            let lower = c.to_ascii_lowercase();
            let gen = names
                .iter()
                .position(|&n| n == lower)
                .filter(|_| c.is_ascii_alphabetic())
                .ok_or_else(|| Error::parse(pos, format!("unexpected character {c:?}")))?;
            let inverse = c.is_ascii_uppercase();
            i += 1;
            let mut power: i64 = 1;
            if i < chars.len() && chars[i].1 == '^' {
                i += 1;
                let mut digits = String::new();
                if i < chars.len() && chars[i].1 == '-' {
                    digits.push('-');
                    i += 1;
                }
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    digits.push(chars[i].1);
                    i += 1;
                }
                power = digits.parse().map_err(|_| Error::parse(pos, "exponent after '^' must be an integer"))?;
            }
            let letter = Letter::new(gen, inverse != (power < 0));
            for _ in 0..power.unsigned_abs() {
                letters.push(letter);
            }
        }
        Ok(Word::from_letters(letters))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = &out * &base;
        }
        out
    }

    /// Largest generator index used, if any.
    pub fn max_gen(&self) -> Option<usize> {
        self.0.iter().map(|l| l.gen).max()
    }

    pub fn exponent_sum(&self, gen: usize) -> i64 {
        self.0.iter().filter(|l| l.gen == gen).map(|l| if l.inverse { -1 } else { 1 }).sum()
    }

    /// Strip matching inverse pairs from the two ends.
    pub fn cyclically_reduced(&self) -> Word {
        let mut s = 0;
        let mut e = self.0.len();
        while e - s >= 2 && self.0[s] == self.0[e - 1].inv() {
            s += 1;
            e -= 1;
        }
        Word(self.0[s..e].to_vec())
    }

    pub fn display_with<'a>(&'a self, names: &'a [char]) -> WordDisplay<'a> {
        WordDisplay { word: self, names }
    }
}

impl Mul for &Word {
    type Output = Word;
    fn mul(self, rhs: &Word) -> Word {
        Word::from_letters(self.0.iter().chain(rhs.0.iter()).copied())
    }
}

impl Mul for Word {
    type Output = Word;
    fn mul(self, rhs: Word) -> Word {
        &self * &rhs
    }
}

pub struct WordDisplay<'a> {
    word: &'a Word,
    names: &'a [char],
}

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_identity() {
            return write!(f, "1");
        }
        for (letter, run) in runs(self.word.letters()) {
            let name = self.names.get(letter.gen).copied().unwrap_or('?');
            let c = if letter.inverse { name.to_ascii_uppercase() } else { name };
            if run == 1 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}^{run}")?;
            }
        }
        Ok(())
    }
}

fn runs(letters: &[Letter]) -> Vec<(Letter, usize)> {
    let mut out: Vec<(Letter, usize)> = Vec::new();
    for &l in letters {
        match out.last_mut() {
            Some((prev, n)) if *prev == l => *n += 1,
            _ => out.push((l, 1)),
        }
    }
    out
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display_with(&BUNDLE_NAMES).fmt(f)
    }
}

/// Finite integer combination of words. Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroupRingElem(BTreeMap<Word, i64>);

impl GroupRingElem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_word(Word::identity())
    }

    pub fn from_word(w: Word) -> Self {
        Self::from_terms([(w, 1)])
    }

    pub fn from_terms<I: IntoIterator<Item = (Word, i64)>>(terms: I) -> Self {
        let mut e = Self::zero();
        for (w, c) in terms {
            e.add_term(w, c);
        }
        e
    }

    pub fn add_term(&mut self, w: Word, c: i64) {
        if c == 0 {
            return;
        }
        match self.0.entry(w) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, i64)> {
        self.0.iter().map(|(w, &c)| (w, c))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of coefficients (the augmentation map to the integers).
    pub fn augmentation(&self) -> i64 {
        self.0.values().sum()
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::from_terms(self.terms().map(|(w, c)| (w.clone(), c * k)))
    }

    /// Apply a map on words termwise, extended linearly.
    pub fn map_words<F: FnMut(&Word) -> Word>(&self, mut f: F) -> Self {
        Self::from_terms(self.terms().map(|(w, c)| (f(w), c)))
    }
}

impl Add for &GroupRingElem {
    type Output = GroupRingElem;
    fn add(self, rhs: &GroupRingElem) -> GroupRingElem {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&GroupRingElem> for GroupRingElem {
    fn add_assign(&mut self, rhs: &GroupRingElem) {
        for (w, c) in rhs.terms() {
            self.add_term(w.clone(), c);
        }
    }
}

impl Neg for &GroupRingElem {
    type Output = GroupRingElem;
    fn neg(self) -> GroupRingElem {
        self.scale(-1)
    }
}

impl Sub for &GroupRingElem {
    type Output = GroupRingElem;
    fn sub(self, rhs: &GroupRingElem) -> GroupRingElem {
        self + &(-rhs)
    }
}

impl Mul for &GroupRingElem {
    type Output = GroupRingElem;
    fn mul(self, rhs: &GroupRingElem) -> GroupRingElem {
        let mut out = GroupRingElem::zero();
        for (u, c) in self.terms() {
            for (v, d) in rhs.terms() {
                out.add_term(u * v, c * d);
            }
        }
        out
    }
}

impl fmt::Display for GroupRingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms().enumerate() {
            let sign = if c < 0 {
                "-"
            } else if i > 0 {
                "+"
            } else {
                ""
            };
            let sep = if i > 0 { " " } else { "" };
            let space = if i > 0 { " " } else { "" };
            let mag = c.abs();
            if mag == 1 {
                write!(f, "{sep}{sign}{space}{w}")?;
            } else {
                write!(f, "{sep}{sign}{space}{mag}{w}")?;
            }
        }
        Ok(())
    }
}

/// Fox derivative of `w` with respect to generator `gen`.
///
/// One left-to-right pass: an occurrence of `gen` contributes the prefix
/// before it, an occurrence of its inverse contributes minus the prefix
/// including it.
pub fn fox_derivative(w: &Word, gen: usize) -> GroupRingElem {
    let mut out = GroupRingElem::zero();
    let mut prefix: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w.letters() {
        if l.gen == gen && !l.inverse {
            out.add_term(Word(prefix.clone()), 1);
        }
        prefix.push(l);
        if l.gen == gen && l.inverse {
            out.add_term(Word(prefix.clone()), -1);
        }
    }
    out
}

/// The letters from which monodromies are spelled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AutLetter {
    /// a -> ab, b -> b
    L,
    /// a -> a, b -> ba
    R,
    /// The lift of -I that fixes the commutator aba^-1b^-1:
    /// a -> b a^-1 b^-1, b -> b a b^-1 a^-1 b^-1.
    I,
}

impl AutLetter {
    fn images(self, inverse: bool) -> [Word; 2] {
        let w = |s: &str| Word::parse(s).expect("static word");
        match (self, inverse) {
            (AutLetter::L, false) => [w("ab"), w("b")],
            (AutLetter::L, true) => [w("aB"), w("b")],
            (AutLetter::R, false) => [w("a"), w("ba")],
            (AutLetter::R, true) => [w("a"), w("bA")],
            (AutLetter::I, false) => [w("bAB"), w("baBAB")],
            (AutLetter::I, true) => [w("abABA"), w("aBA")],
        }
    }
}

/// Endomorphism of F(a, b) given by the images of `a` and `b`. When it was
/// spelled from [`AutLetter`]s the spelling is kept so it can be inverted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndoF2 {
    images: [Word; 2],
    spelling: Option<Vec<(AutLetter, bool)>>,
}

impl EndoF2 {
    pub fn identity() -> Self {
        EndoF2 { images: [Word::generator(0), Word::generator(1)], spelling: Some(Vec::new()) }
    }

    pub fn from_images(a: Word, b: Word) -> Result<Self> {
        for w in [&a, &b] {
            if let Some(g) = w.max_gen().filter(|&g| g > 1) {
                return Err(Error::UnknownGenerator(g));
            }
        }
        Ok(EndoF2 { images: [a, b], spelling: None })
    }

    pub fn letter(l: AutLetter) -> Self {
        Self::letter_power(l, false)
    }

    fn letter_power(l: AutLetter, inverse: bool) -> Self {
        EndoF2 { images: l.images(inverse), spelling: Some(vec![(l, inverse)]) }
    }

    /// Composite of letters; the rightmost letter acts first.
    pub fn from_letters(letters: &[AutLetter]) -> Self {
        letters.iter().fold(Self::identity(), |acc, &l| acc.compose(&Self::letter(l)))
    }

    pub fn image(&self, gen: usize) -> &Word {
        &self.images[gen]
    }

    pub fn images(&self) -> &[Word; 2] {
        &self.images
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        let mut out = Vec::new();
        for l in w.letters() {
            let img = self.images.get(l.gen).ok_or(Error::UnknownGenerator(l.gen))?;
            if l.inverse {
                out.extend(img.inverse().letters().iter().copied());
            } else {
                out.extend(img.letters().iter().copied());
            }
        }
        Ok(Word::from_letters(out))
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &EndoF2) -> EndoF2 {
        let images = [
            self.apply(&other.images[0]).expect("images lie in F(a,b)"),
            self.apply(&other.images[1]).expect("images lie in F(a,b)"),
        ];
        let spelling = match (&self.spelling, &other.spelling) {
            (Some(s), Some(o)) => Some(s.iter().chain(o.iter()).copied().collect()),
            _ => None,
        };
        EndoF2 { images, spelling }
    }

    /// Inverse of an endomorphism spelled from letters.
    pub fn inverse(&self) -> Result<EndoF2> {
        let spelling = self.spelling.as_ref().ok_or(Error::NoKnownInverse)?;
        Ok(spelling.iter().rev().fold(Self::identity(), |acc, &(l, inv)| acc.compose(&Self::letter_power(l, !inv))))
    }

    /// Whether the commutator aba^-1b^-1 is fixed on the nose.
    pub fn fixes_longitude(&self) -> bool {
        let l = longitude();
        self.apply(&l).map(|w| w == l).unwrap_or(false)
    }

    /// Induced map on the abelianization, columns = images of a and b.
    pub fn abelianized(&self) -> [[i64; 2]; 2] {
        [
            [self.images[0].exponent_sum(0), self.images[1].exponent_sum(0)],
            [self.images[0].exponent_sum(1), self.images[1].exponent_sum(1)],
        ]
    }
}

/// The fibre boundary word aba^-1b^-1.
pub fn longitude() -> Word {
    Word::parse("abAB").expect("static word")
}
