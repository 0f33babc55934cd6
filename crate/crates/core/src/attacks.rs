//! Collision attacks: the linear-length attack for pairs with det(A0 − A1) = 0 and the
//! two-phase generic attack.
//!
//! Phase 2 never targets 𝒦 by meet-in-the-middle: the 𝒦-coset of a triangular product is
//! not determined by the cosets of its factors, so there is no code to match on. Only the
//! 𝒟 and commuting searches exist.

use alloc::boxed::Box;
use core::fmt;

use hashbrown::HashMap;

use crate::engine::{
    default_budget, derive_seed, mitm_filtered, with_retries, DCodes, FibSampler, LevelSampler, Sampler, TCodes,
    WalkSampler, WalkSpec,
};
use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::sl2::{Group, Matrix, Rational, Shape, Split};
use crate::words::{code_commute, hash, Code, GeneratorPair, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase2 {
    IntoD,
    Commute,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Trivial,
    Linear,
    Generic { phase2: Phase2, compressed: bool },
    Even,
    Pqtz,
    Oracle,
    Lifted,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Trivial => "trivial",
            Method::Linear => "linear",
            Method::Generic { phase2: Phase2::IntoD, compressed: false } => "generic-d",
            Method::Generic { phase2: Phase2::IntoD, compressed: true } => "generic-d-compressed",
            Method::Generic { phase2: Phase2::Commute, compressed: false } => "generic-commute",
            Method::Generic { phase2: Phase2::Commute, compressed: true } => "generic-commute-compressed",
            Method::Even => "even-q",
            Method::Pqtz => "pqtz",
            Method::Oracle => "oracle",
            Method::Lifted => "lifted",
        }
    }

    pub fn parse(s: &str) -> Result<Method> {
        const ALL: [Method; 10] = [
            Method::Trivial,
            Method::Linear,
            Method::Generic { phase2: Phase2::IntoD, compressed: false },
            Method::Generic { phase2: Phase2::IntoD, compressed: true },
            Method::Generic { phase2: Phase2::Commute, compressed: false },
            Method::Generic { phase2: Phase2::Commute, compressed: true },
            Method::Even,
            Method::Pqtz,
            Method::Oracle,
            Method::Lifted,
        ];
        ALL.into_iter().find(|m| m.as_str() == s).ok_or(Error::Parse("unknown method"))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-phase figures of a generic run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Phases {
    /// |u0|, the diagonalizable word.
    pub u0_len: usize,
    pub diag_work: u64,
    /// Work of the search into 𝒯.
    pub tri_work: u64,
    /// |u1|.
    pub u1_len: usize,
    pub phase2_work: u64,
    /// The collision over the {u0, u1} alphabet.
    pub c_words: (Word, Word),
}

/// Two distinct words with equal hash under the generators they were built for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Collision {
    pub w1: Word,
    pub w2: Word,
    pub hash: Matrix,
    /// Multiplications charged while searching.
    pub work: u64,
    pub length: usize,
    pub method: Method,
    pub phases: Option<Phases>,
}

impl Collision {
    /// Verifies under `gens` and records the common hash.
    pub fn checked(f: &Field, gens: &GeneratorPair, w1: Word, w2: Word, work: u64, method: Method) -> Result<Collision> {
        if w1 == w2 {
            return Err(Error::Verification);
        }
        let g = Group::new(f.clone());
        let h = hash(&g, gens, &w1);
        if h != hash(&g, gens, &w2) {
            return Err(Error::Verification);
        }
        let length = w1.len().max(w2.len());
        Ok(Collision { w1, w2, hash: h, work, length, method, phases: None })
    }
}

/// Where search samples come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplerKind {
    /// All words by length, each from its prefix; seeded order within a length.
    Levels,
    /// Independent uniform words of fixed length.
    Walk { segment_length: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchOpts {
    pub seed: u64,
    /// Samples per search before a retry; `None` for the field default.
    pub budget: Option<u64>,
    pub dp_bits: u32,
    pub sampler: SamplerKind,
}

impl Default for SearchOpts {
    fn default() -> Self {
        SearchOpts { seed: 0, budget: None, dp_bits: 0, sampler: SamplerKind::Levels }
    }
}

impl SearchOpts {
    pub fn with_seed(seed: u64) -> SearchOpts {
        SearchOpts { seed, ..Default::default() }
    }

    fn budget(&self, f: &Field) -> u64 {
        self.budget.unwrap_or_else(|| default_budget(f))
    }

    fn sampler(&self, gens: GeneratorPair, seed: u64) -> Box<dyn Sampler> {
        match self.sampler {
            SamplerKind::Levels => Box::new(LevelSampler::shuffled(gens, seed)),
            SamplerKind::Walk { segment_length } => {
                Box::new(WalkSampler::new(gens, &WalkSpec { segment_length, alphabet: 2, seed, c: 10.0 }))
            }
        }
    }
}

fn w(s: &str) -> Word {
    s.parse().expect("literal word")
}

/// ("0"+w+"1", "1"+w+"0") with w = reverse(v)·(v without its first symbol).
pub(crate) fn palindromic_pair(v: &Word) -> (Word, Word) {
    let mid = v.reversed().concat(&v.tail());
    (w("0").concat(&mid).concat(&w("1")), w("1").concat(&mid).concat(&w("0")))
}

fn is_rational(g: &Group, b: &GeneratorPair) -> bool {
    let m1 = g.field().int(-1);
    [b.a0, b.a1].iter().all(|m| m.b == m1 && m.c == Elem::ONE && m.d.is_zero())
}

/// The palindromic collision of a word hashing into 𝒯 under a pair in [[ξ, −1], [1, 0]] form.
pub fn assemble_palindromic(g: &Group, b: &GeneratorPair, v: &Word) -> Result<(Word, Word)> {
    if v.is_empty() || v.alphabet() > 2 || !is_rational(g, b) || !g.is_upper(&hash(g, b, v)) {
        return Err(Error::Precondition("assemble_palindromic needs a rational pair and a word hashing into 𝒯"));
    }
    Ok(palindromic_pair(v))
}

/// v·i·reverse(v without its first symbol), which hashes into 𝒦.
pub fn k_string(g: &Group, b: &GeneratorPair, v: &Word, i: u8) -> Result<Word> {
    if v.is_empty() || i > 1 || !is_rational(g, b) || !g.is_upper(&hash(g, b, v)) {
        return Err(Error::Precondition("k_string needs a rational pair and a word hashing into 𝒯"));
    }
    let s = v.concat(&Word::symbol(i)).concat(&v.tail().reversed());
    let m = hash(g, b, &s);
    if m.a != Elem::ONE || !m.c.is_zero() || m.d != Elem::ONE {
        return Err(Error::Verification);
    }
    Ok(s)
}

fn trivial(f: &Field, a: &GeneratorPair, g: &Group, w1: &str, w2: &str) -> Result<Collision> {
    Collision::checked(f, a, w(w1), w(w2), g.work(), Method::Trivial)
}

/// A word whose hash under the rational-form conjugate lies in 𝒯, with that form.
fn word_into_t(g: &Group, a: &GeneratorPair, opts: &SearchOpts) -> Result<(GeneratorPair, Word)> {
    let Rational::Ok(rf) = g.rational_form(&a.a0, &a.a1)? else {
        return Err(Error::Precondition("generators are not conjugate to [[ξ, −1], [1, 0]] form"));
    };
    let b = a.conjugate(g, &rf.p, &rf.p_inv);
    let hit = with_retries(opts.budget(g.field()), opts.seed, |budget, seed| {
        let mut s = opts.sampler(b, seed);
        mitm_filtered(g, &mut *s, &TCodes, |_, _| true, |_, _| true, opts.dp_bits, budget)
    })?;
    Ok((b, hit.product))
}

/// Collision of length about 2 lg q for a pair with det(A0 − A1) = 0.
pub fn linear_attack(g: &Group, a: &GeneratorPair, opts: &SearchOpts) -> Result<Collision> {
    let f = g.field();
    let start = g.work();
    match g.rational_form(&a.a0, &a.a1)? {
        Rational::Degenerate => return trivial(f, a, g, "0", "1"),
        Rational::Triangularizable(p) => {
            if g.commutes(&a.a0, &a.a1) {
                return trivial(f, a, g, "01", "10");
            }
            let p_inv = g.inv(&p)?;
            let b = a.conjugate(g, &p, &p_inv);
            let tp = TriangularPair { c0: b.a0, c1: b.a1, u0: w("0"), u1: w("1") };
            let out = phase2(g, &tp, Phase2::Commute, false, opts)?;
            return Collision::checked(f, a, out.w1, out.w2, g.work() - start, Method::Linear);
        }
        Rational::Ok(_) => {}
    }
    let (_, v) = word_into_t(g, a, opts)?;
    let (w1, w2) = palindromic_pair(&v);
    Collision::checked(f, a, w1, w2, g.work() - start, Method::Linear)
}

pub(crate) fn mat_pow(g: &Group, m: &Matrix, mut e: u64) -> Matrix {
    let mut acc = Matrix::IDENTITY;
    let mut base = *m;
    while e > 0 {
        if e & 1 == 1 {
            acc = g.mul(&acc, &base);
        }
        base = g.mul(&base, &base);
        e >>= 1;
    }
    acc
}

/// A nonempty word hashing to the identity: a 𝒦-word repeated p times.
pub fn identity_preimage(g: &Group, a: &GeneratorPair, opts: &SearchOpts) -> Result<Word> {
    let (b, v) = word_into_t(g, a, opts)?;
    let s = k_string(g, &b, &v, 0)?;
    let p = g.field().p();
    if (s.len() as u128) * (p as u128) > 1 << 28 {
        return Err(Error::OverBound);
    }
    let check = Group::new(g.field().clone());
    if mat_pow(&check, &hash(&check, a, &s), p) != Matrix::IDENTITY {
        return Err(Error::Verification);
    }
    Ok(s.repeat(p as usize))
}

/// Triangular images C0 (diagonal in the generic attack) and C1 with their preimages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangularPair {
    pub c0: Matrix,
    pub c1: Matrix,
    pub u0: Word,
    pub u1: Word,
}

/// Phase-2 result: the collision over the C alphabet and its expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Phase2Out {
    pub c1: Word,
    pub c2: Word,
    pub w1: Word,
    pub w2: Word,
}

fn phase2_sampler(tp: &TriangularPair, compressed: bool, seed: u64) -> Result<Box<dyn Sampler>> {
    let gens = GeneratorPair { a0: tp.c0, a1: tp.c1 };
    let (l0, l1) = (tp.u0.len() as u64, tp.u1.len() as u64);
    Ok(if !compressed {
        Box::new(LevelSampler::shuffled(gens, seed))
    } else if l0 == l1 {
        Box::new(LevelSampler::lexicographic(gens))
    } else {
        Box::new(FibSampler::new(gens, l0, l1)?)
    })
}

/// Single-sided search for two candidates with commuting hashes. The code of C0 is
/// preloaded under the word "0".
fn commute_search(g: &Group, sampler: &mut dyn Sampler, c0: &Matrix, budget: u64) -> Result<(Word, Word)> {
    let f = g.field();
    let zero = w("0");
    let mut store: HashMap<Code, Word> = HashMap::new();
    if !g.is_pm_identity(c0) {
        store.insert(code_commute(f, c0)?, zero.clone());
    }
    for _ in 0..budget {
        let Some((v, m)) = sampler.next_sample(g) else { break };
        if v.count(1) == 0 {
            continue;
        }
        if g.is_pm_identity(&m) {
            return Ok((v.concat(&zero), zero.concat(&v)));
        }
        let code = code_commute(f, &m)?;
        match store.get(&code) {
            Some(u) => {
                let (x, y) = (u.concat(&v), v.concat(u));
                if x != y {
                    return Ok((x, y));
                }
            }
            None => {
                store.insert(code, v);
            }
        }
    }
    Err(Error::Exhausted)
}

/// Phase 2 on a triangular pair. `IntoD` needs C0 diagonal.
pub fn phase2(g: &Group, tp: &TriangularPair, variant: Phase2, compressed: bool, opts: &SearchOpts) -> Result<Phase2Out> {
    let f = g.field();
    let (c1, c2) = with_retries(opts.budget(f), derive_seed(opts.seed, 2), |budget, seed| {
        let mut s = phase2_sampler(tp, compressed, seed)?;
        match variant {
            Phase2::IntoD => {
                if g.shape_of(&tp.c0) != Shape::Diagonal {
                    return Err(Error::Precondition("the 𝒟 search needs a diagonal C0"));
                }
                let hit =
                    mitm_filtered(g, &mut *s, &DCodes, |v, _| v.count(1) > 0, |_, _| true, opts.dp_bits, budget)?;
                let zero = w("0");
                Ok((hit.product.concat(&zero), zero.concat(&hit.product)))
            }
            Phase2::Commute => commute_search(g, &mut *s, &tp.c0, budget),
        }
    })?;
    let images = [&tp.u0, &tp.u1];
    let (w1, w2) = (c1.substitute(&images), c2.substitute(&images));
    Ok(Phase2Out { c1, c2, w1, w2 })
}

/// Longest word tried when looking for a diagonalizable hash.
pub const DIAGONAL_SEARCH_CAP: usize = 12;

/// Two-phase attack for arbitrary non-commuting generators.
pub fn generic_attack(g: &Group, a: &GeneratorPair, variant: Phase2, compressed: bool, opts: &SearchOpts) -> Result<Collision> {
    let f = g.field();
    if a.a0 == a.a1 {
        return Err(Error::Precondition("generic attack needs A0 ≠ A1"));
    }
    if g.commutes(&a.a0, &a.a1) {
        return trivial(f, a, g, "01", "10");
    }
    let method = Method::Generic { phase2: variant, compressed };
    let start = g.work();
    // a shared eigenvector puts the whole group in a Borel subgroup: no non-diagonal
    // 𝒯-hits after diagonalizing, but the pair is already triangular
    if let Some(p) = g.common_eigenvector(&a.a0, &a.a1) {
        let p_inv = g.inv(&p)?;
        let b = a.conjugate(g, &p, &p_inv);
        let tp = TriangularPair { c0: b.a0, c1: b.a1, u0: w("0"), u1: w("1") };
        let out = phase2(g, &tp, Phase2::Commute, false, opts)?;
        return Collision::checked(f, a, out.w1, out.w2, g.work() - start, method);
    }
    let mut levels = LevelSampler::lexicographic(*a);
    let (u0, lambda, p) = loop {
        let Some((u0, m)) = levels.next_sample(g) else { return Err(Error::EnumerationCap) };
        if u0.len() > DIAGONAL_SEARCH_CAP {
            return Err(Error::EnumerationCap);
        }
        if g.is_pm_identity(&m) {
            continue;
        }
        if let Split::Split { lambda, p } = g.eigen_split(&m)? {
            break (u0, lambda, p);
        }
    };
    let diag_work = g.work() - start;
    let p_inv = g.inv(&p)?;
    let b = a.conjugate(g, &p, &p_inv);
    let c0 = Matrix::new(lambda, Elem::ZERO, Elem::ZERO, f.inv(lambda)?);
    let tri_start = g.work();
    let hit = with_retries(opts.budget(f), derive_seed(opts.seed, 1), |budget, seed| {
        let mut s = opts.sampler(b, seed);
        let keep = |_: &Word, m: &Matrix| !matches!(g.shape_of(m), Shape::Diagonal | Shape::PlusMinusIdentity);
        mitm_filtered(g, &mut *s, &TCodes, |_, _| true, keep, opts.dp_bits, budget)
    })?;
    let tri_work = g.work() - tri_start;
    let tp = TriangularPair { c0, c1: hit.hash, u0, u1: hit.product };
    let p2_start = g.work();
    let out = phase2(g, &tp, variant, compressed, opts)?;
    let phase2_work = g.work() - p2_start;
    let mut c = Collision::checked(f, a, out.w1, out.w2, g.work() - start, method)?;
    c.phases = Some(Phases {
        u0_len: tp.u0.len(),
        diag_work,
        tri_work,
        u1_len: tp.u1.len(),
        phase2_work,
        c_words: (out.c1, out.c2),
    });
    Ok(c)
}

/// All words of length 1..=n, shortest first.
#[cfg(test)]
pub(crate) fn words_up_to(n: usize) -> alloc::vec::Vec<Word> {
    let mut out = alloc::vec::Vec::new();
    for len in 1..=n {
        for bits in 0..1u64 << len {
            out.push(Word::new((0..len).map(|i| ((bits >> (len - 1 - i)) & 1) as u8).collect()).expect("binary"));
        }
    }
    out
}
