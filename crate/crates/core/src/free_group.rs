//! The free group on `a`, `b` and its right Cayley graph as a tree.
//!
//! Vertices are reduced words; `u` and `v` are adjacent iff `u⁻¹v` is a
//! single letter. Left translations `Φ_x : w ↦ xw` act by tree isometries,
//! and so does the exponent-flipping map [`gamma`], which fixes the branch
//! starting with an `a`-power and inverts every exponent elsewhere.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Default maximum word length; longer results are an error, never truncated.
pub const MAX_WORD_LEN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A, Letter::AInv, Letter::B, Letter::BInv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
        }
    }

    pub fn is_a_power(self) -> bool {
        matches!(self, Letter::A | Letter::AInv)
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::AInv => 'A',
            Letter::B => 'b',
            Letter::BInv => 'B',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c {
            'a' => Some(Letter::A),
            'A' => Some(Letter::AInv),
            'b' => Some(Letter::B),
            'B' => Some(Letter::BInv),
            _ => None,
        }
    }
}

/// A reduced word in `F₂ = ⟨a, b⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

// The empty word is the identity; see `is_identity`.
#[allow(clippy::len_without_is_empty)]
impl Word {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn letter(l: Letter) -> Self {
        Self { letters: vec![l] }
    }

    /// Freely reduces `letters`.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> Result<Self> {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        if out.len() > MAX_WORD_LEN {
            return Err(Error::WordTooLong { max: MAX_WORD_LEN });
        }
        Ok(Self { letters: out })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses `{a, A, b, B}*` or `"1"`; rejects unreduced input.
    fn from_str(s: &str) -> Result<Self> {
        if s == "1" || s.is_empty() {
            return Ok(Word::identity());
        }
        let letters = s
            .chars()
            .map(|c| Letter::from_char(c).ok_or_else(|| Error::WordParse(format!("bad letter {c:?} in {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let w = Word::reduce(letters.iter().copied())?;
        if w.len() != letters.len() {
            return Err(Error::WordParse(format!("{s:?} is not reduced")));
        }
        Ok(w)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Reduced concatenation `uv`.
pub fn word_concat(u: &Word, v: &Word) -> Result<Word> {
    Word::reduce(u.letters.iter().chain(&v.letters).copied())
}

/// Path length between `u` and `v` in the Cayley tree: `|u⁻¹v|`.
pub fn tree_dist(u: &Word, v: &Word) -> usize {
    let common = u
        .letters
        .iter()
        .zip(&v.letters)
        .take_while(|(a, b)| a == b)
        .count();
    u.len() + v.len() - 2 * common
}

/// All reduced words of length exactly `n`, length-lexicographic in the
/// letter order `a, A, b, B`.
pub fn sphere(n: usize) -> Vec<Word> {
    let mut layer = vec![Word::identity()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(layer.len() * 3);
        for w in &layer {
            for l in Letter::ALL {
                if w.letters.last() != Some(&l.inverse()) {
                    let mut letters = w.letters.clone();
                    letters.push(l);
                    next.push(Word { letters });
                }
            }
        }
        layer = next;
    }
    layer
}

/// All reduced words of length at most `radius`, `2(3^r - 1) + 1` of them.
pub fn ball(radius: usize) -> Vec<Word> {
    (0..=radius).flat_map(sphere).collect()
}

/// `γ(a^{n₁} b^{n₂} ⋯) = a^{n₁} b^{n₂} ⋯` if `n₁ ≠ 0`, else every exponent
/// is negated. Length preserving and an involution.
pub fn gamma(w: &Word) -> Word {
    match w.letters.first() {
        Some(l) if l.is_a_power() => w.clone(),
        _ => Word {
            letters: w.letters.iter().map(|l| l.inverse()).collect(),
        },
    }
}

/// The inverse of γ is γ itself; this is checked once, exhaustively on a
/// ball, before the first use of [`TreeMap::GammaInverse`].
fn gamma_inverse(w: &Word) -> Word {
    static CHECKED: OnceLock<()> = OnceLock::new();
    CHECKED.get_or_init(|| {
        for v in ball(6) {
            assert_eq!(gamma(&gamma(&v)), v, "gamma is not an involution at {v}");
        }
    });
    gamma(w)
}

/// A tree isometry built from left translations and γ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeMap {
    LeftTranslation(Word),
    Gamma,
    GammaInverse,
    /// `[f, g, h]` is `f ∘ g ∘ h`; the last map is applied first.
    Composition(Vec<TreeMap>),
}

impl TreeMap {
    pub fn translation(w: Word) -> Self {
        TreeMap::LeftTranslation(w)
    }

    /// `γ⁻¹ ∘ Φ_x ∘ γ`, an element of the conjugate `γ⁻¹Γ₁γ`.
    pub fn gamma_conjugate(x: Word) -> Self {
        TreeMap::Composition(vec![
            TreeMap::GammaInverse,
            TreeMap::LeftTranslation(x),
            TreeMap::Gamma,
        ])
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        apply(self, w)
    }
}

pub fn apply(m: &TreeMap, w: &Word) -> Result<Word> {
    match m {
        TreeMap::LeftTranslation(x) => word_concat(x, w),
        TreeMap::Gamma => Ok(gamma(w)),
        TreeMap::GammaInverse => Ok(gamma_inverse(w)),
        TreeMap::Composition(maps) => maps
            .iter()
            .rev()
            .try_fold(w.clone(), |acc, f| apply(f, &acc)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EdgeAudit {
    pub ok: bool,
    pub edges_checked: usize,
    pub counterexample: Option<(Word, Word)>,
}

/// Checks that `m` maps every edge of the radius ball to an edge.
pub fn edge_audit(m: &TreeMap, radius: usize) -> Result<EdgeAudit> {
    edge_audit_with(|w| apply(m, w), radius)
}

/// [`edge_audit`] for an arbitrary vertex map.
pub fn edge_audit_with<F>(f: F, radius: usize) -> Result<EdgeAudit>
where
    F: Fn(&Word) -> Result<Word>,
{
    if radius == 0 {
        return Err(Error::OutOfRange("edge audit radius must be at least 1".into()));
    }
    let mut edges_checked = 0;
    // Each non-identity vertex w has exactly one edge toward the identity,
    // to w with its last letter removed.
    for n in 1..=radius {
        for w in sphere(n) {
            let parent = Word {
                letters: w.letters[..n - 1].to_vec(),
            };
            edges_checked += 1;
            if tree_dist(&f(&parent)?, &f(&w)?) != 1 {
                return Ok(EdgeAudit {
                    ok: false,
                    edges_checked,
                    counterexample: Some((parent, w)),
                });
            }
        }
    }
    Ok(EdgeAudit {
        ok: true,
        edges_checked,
        counterexample: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomomorphyProbe {
    pub fails: bool,
    pub witness_y: Option<Word>,
}

/// Searches `|y| ≤ y_radius` for `γ(x₁y) ≠ γ(x₁)γ(y)`.
pub fn homomorphy_probe(x1: &Word, y_radius: usize) -> Result<HomomorphyProbe> {
    if x1.is_identity() {
        return Err(Error::OutOfRange("homomorphy probe needs x1 != e".into()));
    }
    let gx = gamma(x1);
    for y in ball(y_radius) {
        if gamma(&word_concat(x1, &y)?) != word_concat(&gx, &gamma(&y))? {
            return Ok(HomomorphyProbe {
                fails: true,
                witness_y: Some(y),
            });
        }
    }
    Ok(HomomorphyProbe {
        fails: false,
        witness_y: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntersectionProbe {
    pub x_radius: usize,
    pub test_radius: usize,
    pub candidates: usize,
    pub survivors: Vec<Word>,
}

/// For each `x₁ ≠ e` with `|x₁| ≤ x_radius`, tests whether `γ Φ_{x₁} γ⁻¹`
/// agrees with `Φ_{γ(x₁)}` on the test ball. Survivors are candidates for a
/// nontrivial element of `Γ₁ ∩ γ⁻¹Γ₁γ`.
pub fn conjugate_intersection_probe(x_radius: usize, test_radius: usize) -> Result<IntersectionProbe> {
    let tests = ball(test_radius);
    let mut survivors = Vec::new();
    let mut candidates = 0;
    for x1 in ball(x_radius).into_iter().skip(1) {
        candidates += 1;
        let x2 = gamma(&x1);
        let conj = TreeMap::Composition(vec![
            TreeMap::Gamma,
            TreeMap::LeftTranslation(x1.clone()),
            TreeMap::GammaInverse,
        ]);
        let mut agrees = true;
        for w in &tests {
            if apply(&conj, w)? != word_concat(&x2, w)? {
                agrees = false;
                break;
            }
        }
        if agrees {
            survivors.push(x1);
        }
    }
    Ok(IntersectionProbe {
        x_radius,
        test_radius,
        candidates,
        survivors,
    })
}
