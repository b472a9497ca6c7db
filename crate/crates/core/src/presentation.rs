//! Monodromy words, the mapping-torus presentation, and presentation files.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::CMatrix;
use crate::words::{AutLetter, EndoF2, Word, BUNDLE_NAMES};

/// A monodromy spelled as an optional leading `-` (the hyperelliptic
/// involution) followed by letters `L`, `R`, with optional `^n` powers.
/// Composition is right to left: the last letter acts first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonodromySpec {
    negate: bool,
    letters: Vec<AutLetter>,
}

impl MonodromySpec {
    pub fn parse(s: &str) -> Result<Self> {
        let chars: Vec<(usize, char)> = s.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
        let mut i = 0;
        let mut negate = false;
        if chars.first().is_some_and(|&(_, c)| c == '-') {
            negate = true;
            i = 1;
        }
        let mut letters = Vec::new();
        while i < chars.len() {
            let (pos, c) = chars[i];
            let letter = match c {
                'L' | 'l' => AutLetter::L,
                'R' | 'r' => AutLetter::R,
                _ => return Err(Error::parse(pos, format!("expected L or R, found {c:?}"))),
            };
            i += 1;
            let mut power = 1usize;
            if i < chars.len() && chars[i].1 == '^' {
                i += 1;
                let mut digits = String::new();
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    digits.push(chars[i].1);
                    i += 1;
                }
                power = digits.parse().map_err(|_| Error::parse(pos, "power after '^' must be a positive integer"))?;
            }
            letters.extend(std::iter::repeat_n(letter, power));
        }
        Ok(MonodromySpec { negate, letters })
    }

    pub fn negated(&self) -> bool {
        self.negate
    }

    /// Letters in composition order, with the involution first when present.
    pub fn aut_letters(&self) -> Vec<AutLetter> {
        let mut out = Vec::with_capacity(self.letters.len() + 1);
        if self.negate {
            out.push(AutLetter::I);
        }
        out.extend(&self.letters);
        out
    }

    /// The induced matrix in SL(2, Z): product of R = [[1,1],[0,1]] and
    /// L = [[1,0],[1,1]] in word order, negated for a leading `-`.
    pub fn matrix(&self) -> [[i64; 2]; 2] {
        let mut m = [[1i64, 0], [0, 1]];
        for l in &self.letters {
            let g = match l {
                AutLetter::R => [[1, 1], [0, 1]],
                AutLetter::L => [[1, 0], [1, 1]],
                AutLetter::I => [[-1, 0], [0, -1]],
            };
            m = mat_mul(m, g);
        }
        if self.negate {
            m = [[-m[0][0], -m[0][1]], [-m[1][0], -m[1][1]]];
        }
        m
    }

    pub fn trace(&self) -> i64 {
        let m = self.matrix();
        m[0][0] + m[1][1]
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.trace().abs() > 2
    }

    pub fn endomorphism(&self) -> EndoF2 {
        EndoF2::from_letters(&self.aut_letters())
    }

    pub fn ensure_hyperbolic(&self) -> Result<()> {
        if self.is_hyperbolic() {
            Ok(())
        } else {
            Err(Error::NotHyperbolic { word: self.to_string(), trace: self.trace() })
        }
    }
}

impl fmt::Display for MonodromySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negate {
            write!(f, "-")?;
        }
        for l in &self.letters {
            write!(f, "{}", if *l == AutLetter::L { 'L' } else { 'R' })?;
        }
        Ok(())
    }
}

fn mat_mul(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

pub fn monodromy_matrix(spec: &MonodromySpec) -> [[i64; 2]; 2] {
    spec.matrix()
}

/// Finite presentation over single-character generator names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    names: Vec<char>,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(names: Vec<char>, relators: Vec<Word>) -> Result<Self> {
        for r in &relators {
            if let Some(g) = r.max_gen().filter(|&g| g >= names.len()) {
                return Err(Error::UnknownGenerator(g));
            }
        }
        Ok(Presentation { names, relators })
    }

    pub fn generator_count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[char] {
        &self.names
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// At least two generators and exactly one fewer relator.
    pub fn check_deficiency_one(&self) -> Result<()> {
        let n = self.names.len();
        if n < 2 || self.relators.len() + 1 != n {
            return Err(Error::Deficiency { generators: n, relators: self.relators.len() });
        }
        Ok(())
    }
}

/// Homomorphism to the integers, stored as the image of each generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianizationMap(pub Vec<i64>);

impl AbelianizationMap {
    pub fn weight(&self, w: &Word) -> i64 {
        w.letters().iter().map(|l| if l.inverse { -self.0[l.gen] } else { self.0[l.gen] }).sum()
    }
}

/// The map must have one weight per generator, kill every relator, and be
/// onto the integers.
pub fn validate_abelianization(p: &Presentation, alpha: &AbelianizationMap) -> Result<()> {
    if alpha.0.len() != p.generator_count() {
        return Err(Error::Abelianization(format!("{} weights for {} generators", alpha.0.len(), p.generator_count())));
    }
    for (i, r) in p.relators().iter().enumerate() {
        let w = alpha.weight(r);
        if w != 0 {
            return Err(Error::Abelianization(format!("relator {i} has weight {w}")));
        }
    }
    let g = alpha.0.iter().fold(0i64, |g, &x| gcd(g, x.abs()));
    if g != 1 {
        return Err(Error::Abelianization(format!("weights have gcd {g}, so the map is not onto")));
    }
    Ok(())
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// ⟨a, b, x | x a x⁻¹ = φ(a), x b x⁻¹ = φ(b)⟩, written as the relators
/// φ(a) x a⁻¹ x⁻¹ and φ(b) x b⁻¹ x⁻¹, with α = (0, 0, 1).
pub fn bundle_presentation(spec: &MonodromySpec) -> Result<(Presentation, AbelianizationMap)> {
    spec.ensure_hyperbolic()?;
    let phi = spec.endomorphism();
    let x = Word::generator(2);
    let relators = (0..2)
        .map(|g| {
            let tail = &(&x * &Word::generator(g).inverse()) * &x.inverse();
            phi.image(g) * &tail
        })
        .collect();
    let p = Presentation::new(BUNDLE_NAMES.to_vec(), relators)?;
    Ok((p, AbelianizationMap(vec![0, 0, 1])))
}

/// On-disk form of a presentation with an optional representation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PresentationFile {
    pub generators: Vec<String>,
    pub relators: Vec<String>,
    pub abelianization: Vec<i64>,
    /// One matrix per generator, rows of `[re, im]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representation: Option<Vec<Vec<Vec<[f64; 2]>>>>,
}

/// A parsed and validated presentation file.
#[derive(Clone, Debug)]
pub struct LoadedPresentation {
    pub presentation: Presentation,
    pub abelianization: AbelianizationMap,
    pub representation: Option<Vec<CMatrix>>,
}

impl PresentationFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(&self) -> Result<LoadedPresentation> {
        let mut names = Vec::with_capacity(self.generators.len());
        for (i, g) in self.generators.iter().enumerate() {
            let mut chars = g.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) if c.is_ascii_lowercase() && !names.contains(&c) => names.push(c),
                _ => {
                    return Err(Error::parse(
                        i,
                        format!("generator name {g:?} must be a distinct single lower-case letter"),
                    ))
                }
            }
        }
        let relators = self.relators.iter().map(|r| Word::parse_with(r, &names)).collect::<Result<Vec<_>>>()?;
        let presentation = Presentation::new(names, relators)?;
        let abelianization = AbelianizationMap(self.abelianization.clone());
        validate_abelianization(&presentation, &abelianization)?;
        let representation = match &self.representation {
            None => None,
            Some(mats) => {
                if mats.len() != presentation.generator_count() {
                    return Err(Error::Representation(format!(
                        "{} matrices for {} generators",
                        mats.len(),
                        presentation.generator_count()
                    )));
                }
                let mats = mats.iter().map(|m| CMatrix::from_pairs(m)).collect::<Result<Vec<_>>>()?;
                let d = mats[0].rows();
                if mats.iter().any(|m| m.rows() != d || m.cols() != d) || d == 0 {
                    return Err(Error::Representation("matrices must be square and of one size".into()));
                }
                Some(mats)
            }
        };
        Ok(LoadedPresentation { presentation, abelianization, representation })
    }
}
