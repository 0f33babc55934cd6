//! The characteristic-2 attack for arbitrary generators, and the discrete-log baseline
//! built on integer relations among 𝒯-hashes.

use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::attacks::{
    generic_attack, mat_pow, palindromic_pair, phase2, Collision, Method, Phase2, SearchOpts, TriangularPair,
};
use crate::engine::{default_budget, derive_seed, mitm_filtered, with_retries, LevelSampler, Sampler, TCodes};
use crate::error::{Error, Result};
use crate::gf::{Elem, Field, DLOG_BOUND};
use crate::sl2::{Group, Intertwiner, Matrix, Rational, Shape, Split, TransposePair};
use crate::words::{hash, GeneratorPair, Word};

/// Symbols of words over {C, Cᵀ, E}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ESym {
    C,
    T,
    E,
}

pub type EWord = Vec<ESym>;

/// Rewrites a word over D0 = C·E, D1 = C into E^parity times a word over {C, Cᵀ}.
///
/// Each E moved to the front transposes every symbol it passes, so a symbol ends up
/// transposed iff an odd number of E's stood to its right.
pub fn push_e(d: &Word) -> (u8, EWord) {
    let mut out = vec![ESym::C; d.len()];
    let mut e_right = 0usize;
    for (i, &s) in d.symbols().iter().enumerate().rev() {
        if s == 0 {
            e_right += 1;
        }
        out[i] = if e_right % 2 == 1 { ESym::T } else { ESym::C };
    }
    ((e_right % 2) as u8, out)
}

/// The D-alphabet word as a word over {C, E}.
pub fn expand_d(d: &Word) -> EWord {
    let mut out = Vec::with_capacity(2 * d.len());
    for &s in d.symbols() {
        out.push(ESym::C);
        if s == 0 {
            out.push(ESym::E);
        }
    }
    out
}

/// Product of an E-word.
pub fn eval_eword(g: &Group, c: &Matrix, e: &Matrix, w: &[ESym]) -> Matrix {
    let ct = c.transpose();
    let mut m = Matrix::IDENTITY;
    for s in w {
        let x = match s {
            ESym::C => c,
            ESym::T => &ct,
            ESym::E => e,
        };
        m = g.mul(&m, x);
    }
    m
}

fn b_word(r: &[ESym]) -> Word {
    let mut v = Vec::with_capacity(2 * r.len());
    for s in r {
        match s {
            ESym::C => v.extend_from_slice(&[0, 1]),
            ESym::T => v.extend_from_slice(&[1, 0]),
            ESym::E => unreachable!("E pushed out"),
        }
    }
    Word::new(v).expect("binary")
}

/// Collision of length about 4 lg q in characteristic 2, for any generators.
pub fn even_attack(g: &Group, a: &GeneratorPair, opts: &SearchOpts) -> Result<Collision> {
    let f = g.field();
    if f.p() != 2 {
        return Err(Error::Precondition("even attack needs characteristic 2"));
    }
    let start = g.work();
    let b0 = g.mul(&a.a0, &a.a1);
    let b1 = g.mul(&a.a1, &a.a0);
    let w01: Word = "01".parse().expect("literal");
    let w10: Word = "10".parse().expect("literal");
    if b0 == b1 {
        return Collision::checked(f, a, w01, w10, g.work() - start, Method::Trivial);
    }
    if let Some(p) = g.common_eigenvector(&b0, &b1) {
        let p_inv = g.inv(&p)?;
        let tp = TriangularPair { c0: g.conj(&p, &p_inv, &b0), c1: g.conj(&p, &p_inv, &b1), u0: w01, u1: w10 };
        let out = phase2(g, &tp, Phase2::Commute, false, opts)?;
        return Collision::checked(f, a, out.w1, out.w2, g.work() - start, Method::Even);
    }
    let form = match g.transpose_pair_form(&b0, &b1)? {
        TransposePair::Ok(form) => form,
        TransposePair::Alternating | TransposePair::NoSolution => {
            return generic_attack(g, a, Phase2::Commute, true, opts);
        }
    };
    let c = form.c;
    let e = match g.orthogonal_intertwiner(&c) {
        Ok(Intertwiner::Ok(e)) => e,
        Ok(Intertwiner::Symmetric) | Err(Error::NoIntertwiner) => {
            return generic_attack(g, a, Phase2::Commute, true, opts);
        }
        Err(err) => return Err(err),
    };
    let d = GeneratorPair { a0: g.mul(&c, &e), a1: c };
    // words over the D alphabet with equal hashes
    let (x, y) = match g.rational_form(&d.a0, &d.a1)? {
        Rational::Ok(rf) => {
            let r = d.conjugate(g, &rf.p, &rf.p_inv);
            let hit = with_retries(opts.budget.unwrap_or_else(|| default_budget(f)), opts.seed, |budget, seed| {
                let mut s = LevelSampler::shuffled(r, seed);
                mitm_filtered(g, &mut s, &TCodes, |_, _| true, |_, _| true, opts.dp_bits, budget)
            })?;
            palindromic_pair(&hit.product)
        }
        Rational::Triangularizable(p) => {
            let p_inv = g.inv(&p)?;
            let r = d.conjugate(g, &p, &p_inv);
            let tp = TriangularPair { c0: r.a0, c1: r.a1, u0: Word::symbol(0), u1: Word::symbol(1) };
            let out = phase2(g, &tp, Phase2::Commute, false, opts)?;
            (out.c1, out.c2)
        }
        Rational::Degenerate => return Err(Error::Verification),
    };
    let (px, rx) = push_e(&x);
    let (py, ry) = push_e(&y);
    let (w1, w2) = if px == py {
        (b_word(&rx), b_word(&ry))
    } else {
        // squaring both D-words equalizes the parities
        let (_, rxx) = push_e(&x.concat(&x));
        let (_, ryy) = push_e(&y.concat(&y));
        (b_word(&rxx), b_word(&ryy))
    };
    Collision::checked(f, a, w1, w2, g.work() - start, Method::Even)
}

/// Exponents k ≥ 0 (not all zero) with ∏ λᵢ^kᵢ = 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationInstance {
    pub lambdas: Vec<Elem>,
    pub words: Vec<Word>,
    pub exponents: Vec<u64>,
    pub group_order: u64,
}

/// Largest half-box enumerated in the relation search.
const HALF_BOX_LIMIT: u64 = 1 << 22;

fn norm2(k: &[u64]) -> u64 {
    k.iter().map(|x| x * x).sum()
}

fn half_vectors(n: usize, bound: u64) -> impl Iterator<Item = Vec<u64>> {
    let total = (bound + 1).pow(n as u32);
    (0..total).map(move |mut idx| {
        let mut v = vec![0u64; n];
        for x in v.iter_mut() {
            *x = idx % (bound + 1);
            idx /= bound + 1;
        }
        v
    })
}

/// Small non-negative exponents with Σ kᵢ·log λᵢ ≡ 0 mod (q − 1), by meeting in the middle
/// over boxes kᵢ ≤ K for K = 1, …, `max_bound`. Minimal norm within the first box that
/// holds a relation.
pub fn relation_search(f: &Field, lambdas: &[Elem], max_bound: u64) -> Result<Vec<u64>> {
    let n = lambdas.len();
    if n == 0 {
        return Err(Error::NoRelation);
    }
    if let Some(i) = lambdas.iter().position(|&l| l == Elem::ONE) {
        let mut k = vec![0; n];
        k[i] = 1;
        return Ok(k);
    }
    let order = (f.q() - 1) as u64;
    let gen = f.primitive_element();
    let logs: Vec<u64> = lambdas.iter().map(|&l| f.discrete_log(gen, l, DLOG_BOUND)).collect::<Result<_>>()?;
    let (na, nb) = (n / 2, n - n / 2);
    let residue = |part: &[u64], v: &[u64]| -> u64 {
        part.iter().zip(v).fold(0u128, |acc, (&e, &k)| (acc + e as u128 * k as u128) % order as u128) as u64
    };
    for bound in 1..=max_bound {
        if (bound + 1).saturating_pow(nb as u32) > HALF_BOX_LIMIT {
            break;
        }
        let mut left: HashMap<u64, Vec<u64>> = HashMap::new();
        for v in half_vectors(na, bound) {
            if v.iter().all(|&x| x == 0) {
                continue;
            }
            let r = residue(&logs[..na], &v);
            let e = left.entry(r).or_insert_with(|| v.clone());
            if norm2(&v) < norm2(e) {
                *e = v;
            }
        }
        let mut best: Option<Vec<u64>> = None;
        let mut consider = |k: Vec<u64>| {
            if best.as_ref().is_none_or(|b| norm2(&k) < norm2(b)) {
                best = Some(k);
            }
        };
        for v in half_vectors(nb, bound) {
            let r = residue(&logs[na..], &v);
            let need = (order - r) % order;
            let zero_b = v.iter().all(|&x| x == 0);
            if need == 0 && !zero_b {
                consider([vec![0; na], v.clone()].concat());
            }
            if let Some(u) = left.get(&need) {
                consider([u.clone(), v].concat());
            }
        }
        if let Some(k) = best {
            let prod = lambdas.iter().zip(&k).fold(Elem::ONE, |acc, (&l, &e)| f.mul(acc, f.pow(l, e as u128)));
            if prod != Elem::ONE {
                return Err(Error::Verification);
            }
            return Ok(k);
        }
    }
    Err(Error::NoRelation)
}

/// Output of the discrete-log attack.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PqtzResult {
    pub identity_word: Word,
    pub collision: Collision,
    pub relation: RelationInstance,
}

/// A conjugate of the pair in which searches into 𝒯 make sense.
fn searchable_conjugate(g: &Group, a: &GeneratorPair) -> Result<GeneratorPair> {
    if let Ok(Rational::Ok(rf)) = g.rational_form(&a.a0, &a.a1) {
        return Ok(a.conjugate(g, &rf.p, &rf.p_inv));
    }
    let mut levels = LevelSampler::lexicographic(*a);
    loop {
        let (u0, m) = levels.next_sample(g).ok_or(Error::EnumerationCap)?;
        if u0.len() > crate::attacks::DIAGONAL_SEARCH_CAP {
            return Err(Error::EnumerationCap);
        }
        if g.is_pm_identity(&m) {
            continue;
        }
        if let Split::Split { p, .. } = g.eigen_split(&m)? {
            let p_inv = g.inv(&p)?;
            return Ok(a.conjugate(g, &p, &p_inv));
        }
    }
}

fn power_word(ws: &[Word], k: &[u64]) -> Word {
    let mut v = Word::empty();
    for (w, &e) in ws.iter().zip(k) {
        v = v.concat(&w.repeat(e as usize));
    }
    v
}

/// Identity preimage and collision from a multiplicative relation among the top-left
/// entries of ⌈lg q⌉ words hashing into 𝒯.
pub fn pqtz_attack(g: &Group, a: &GeneratorPair, opts: &SearchOpts) -> Result<PqtzResult> {
    let f = g.field();
    if f.q() - 1 > DLOG_BOUND {
        return Err(Error::OverBound);
    }
    if g.commutes(&a.a0, &a.a1) {
        return Err(Error::Precondition("pqtz attack needs non-commuting generators"));
    }
    let start = g.work();
    let b = searchable_conjugate(g, a)?;
    let n_words = libm::ceil(f.lg_q()).max(2.0) as usize;
    let budget = opts.budget.unwrap_or_else(|| default_budget(f));
    let mut words: Vec<Word> = Vec::new();
    let mut lambdas: Vec<Elem> = Vec::new();
    let mut attempt = 0u64;
    let mut relation = None;
    while relation.is_none() {
        while words.len() < n_words {
            attempt += 1;
            if attempt > 8 * n_words as u64 + 64 {
                return Err(Error::Exhausted);
            }
            let hit = with_retries(budget, derive_seed(opts.seed, attempt), |bud, seed| {
                let mut s = LevelSampler::shuffled(b, seed);
                // diagonal hits include powers of a diagonalized generator, which commute as strings
                let fresh = |w: &Word, m: &Matrix| {
                    !matches!(g.shape_of(m), Shape::Diagonal | Shape::PlusMinusIdentity) && !words.contains(w)
                };
                mitm_filtered(g, &mut s, &TCodes, |_, _| true, fresh, opts.dp_bits, bud)
            })?;
            lambdas.push(hit.hash.a);
            words.push(hit.product);
        }
        match relation_search(f, &lambdas, 8) {
            Ok(k) => relation = Some(k),
            Err(Error::NoRelation) => {
                words.clear();
                lambdas.clear();
            }
            Err(e) => return Err(e),
        }
    }
    let k = relation.expect("loop exit");
    let p = f.p();
    let v = power_word(&words, &k);
    if (v.len() as u128) * (p as u128) > 1 << 28 {
        return Err(Error::OverBound);
    }
    let check = Group::new(f.clone());
    let hv = hash(&check, a, &v);
    if mat_pow(&check, &hv, p) != Matrix::IDENTITY {
        return Err(Error::Verification);
    }
    let identity_word = v.repeat(p as usize);

    // collision: two 𝒦-words that do not commute as strings
    let support: Vec<usize> = (0..k.len()).filter(|&i| k[i] > 0).collect();
    let pair = (0..support.len())
        .flat_map(|i| (i + 1..support.len()).map(move |j| (i, j)))
        .map(|(i, j)| (support[i], support[j]))
        .find(|&(i, j)| words[i].concat(&words[j]) != words[j].concat(&words[i]));
    let (x, y) = if let Some((i, j)) = pair {
        let mut rest = k.clone();
        rest[i] -= 1;
        rest[j] -= 1;
        let wrest = power_word(&words, &rest);
        let w12 = words[i].concat(&words[j]);
        let w21 = words[j].concat(&words[i]);
        let v1 = w12.concat(&wrest);
        let u1 = w21.concat(&wrest);
        (v1.concat(&w21), u1.concat(&w12))
    } else {
        // a single word already hashes into 𝒦 up to a power; pair it with a second relation
        let i = support[0];
        let others: Vec<Elem> = (0..lambdas.len()).filter(|&j| j != i).map(|j| lambdas[j]).collect();
        let k2 = relation_search(f, &others, 8)?;
        let mut full = vec![0u64; k.len()];
        let mut it = k2.into_iter();
        for j in (0..k.len()).filter(|&j| j != i) {
            full[j] = it.next().expect("same length");
        }
        let v2 = power_word(&words, &full);
        let v1 = v.clone();
        (v1.concat(&v2), v2.concat(&v1))
    };
    let collision = Collision::checked(f, a, x, y, g.work() - start, Method::Pqtz)?;
    let group_order = (f.q() - 1) as u64;
    Ok(PqtzResult { identity_word, collision, relation: RelationInstance { lambdas, words, exponents: k, group_order } })
}
