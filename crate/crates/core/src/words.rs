//! Words, the homomorphic hash, coset codes and the weighted enumerator.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::sl2::{Group, Matrix};

/// A string over {0, 1} or {0, 1, 2}.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(symbols: Vec<u8>) -> Result<Word> {
        if symbols.iter().any(|&s| s > 2) {
            return Err(Error::Parse("word symbol out of range"));
        }
        Ok(Word(symbols))
    }

    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn symbol(s: u8) -> Word {
        debug_assert!(s <= 2);
        Word(alloc::vec![s])
    }

    pub fn symbols(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 3 if the word uses the symbol 2, otherwise 2.
    pub fn alphabet(&self) -> u8 {
        if self.0.contains(&2) {
            3
        } else {
            2
        }
    }

    pub fn push(&mut self, s: u8) {
        debug_assert!(s <= 2);
        self.0.push(s);
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn repeat(&self, k: usize) -> Word {
        Word(self.0.repeat(k))
    }

    /// The word without its first symbol.
    pub fn tail(&self) -> Word {
        Word(self.0.get(1..).unwrap_or(&[]).to_vec())
    }

    pub fn count(&self, s: u8) -> usize {
        self.0.iter().filter(|&&x| x == s).count()
    }

    pub fn is_palindrome(&self) -> bool {
        self.0.iter().eq(self.0.iter().rev())
    }

    /// Replaces every symbol `s` by `images[s]`.
    pub fn substitute(&self, images: &[&Word]) -> Word {
        let mut out = Vec::new();
        for &s in &self.0 {
            out.extend_from_slice(&images[s as usize].0);
        }
        Word(out)
    }

    pub fn without(&self, s: u8) -> Word {
        Word(self.0.iter().copied().filter(|&x| x != s).collect())
    }

    pub fn cmp_length_lex(&self, other: &Word) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.0.iter().map(|&b| (b'0' + b) as char).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        let mut v = Vec::with_capacity(s.len());
        for ch in s.bytes() {
            match ch {
                b'0' | b'1' | b'2' => v.push(ch - b'0'),
                _ => return Err(Error::Parse("word character")),
            }
        }
        Ok(Word(v))
    }
}

/// Images of the symbols 0 and 1; the symbol 2 maps to the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneratorPair {
    pub a0: Matrix,
    pub a1: Matrix,
}

impl GeneratorPair {
    pub fn new(g: &Group, a0: Matrix, a1: Matrix) -> Result<GeneratorPair> {
        if g.det(&a0) != Elem::ONE || g.det(&a1) != Elem::ONE {
            return Err(Error::Precondition("generators must have determinant 1"));
        }
        Ok(GeneratorPair { a0, a1 })
    }

    #[inline]
    pub fn get(&self, s: u8) -> Matrix {
        match s {
            0 => self.a0,
            1 => self.a1,
            _ => Matrix::IDENTITY,
        }
    }

    /// The pair P⁻¹A_iP.
    pub fn conjugate(&self, g: &Group, p: &Matrix, p_inv: &Matrix) -> GeneratorPair {
        GeneratorPair { a0: g.conj(p, p_inv, &self.a0), a1: g.conj(p, p_inv, &self.a1) }
    }
}

/// Left-to-right product; costs |v| − 1 multiplications.
pub fn hash(g: &Group, gens: &GeneratorPair, v: &Word) -> Matrix {
    let mut it = v.symbols().iter();
    let Some(&first) = it.next() else { return Matrix::IDENTITY };
    let mut m = gens.get(first);
    for &s in it {
        m = g.mul(&m, &gens.get(s));
    }
    m
}

/// Hash of the reversed word for a pair in [[ξ, −1], [1, 0]] form.
pub fn reverse_hash(f: &Field, m: &Matrix) -> Matrix {
    Matrix::new(m.a, f.neg(m.c), f.neg(m.b), m.d)
}

/// A field element or ∞. `Infinity` sorts after every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Code {
    Finite(Elem),
    Infinity,
}

impl Code {
    pub fn to_text(self, f: &Field) -> String {
        match self {
            Code::Finite(e) => f.fmt_elem(e),
            Code::Infinity => String::from("inf"),
        }
    }

    pub fn parse(f: &Field, s: &str) -> Result<Code> {
        if s == "inf" {
            Ok(Code::Infinity)
        } else {
            Ok(Code::Finite(f.parse_elem(s)?))
        }
    }

    /// A 64-bit key for this code, used by distinguished-point filtering.
    pub fn key(self) -> u64 {
        match self {
            Code::Finite(e) => e.raw(),
            Code::Infinity => u64::MAX,
        }
    }
}

fn ratio(f: &Field, num: Elem, den: Elem) -> Code {
    match f.inv(den) {
        Ok(i) => Code::Finite(f.mul(num, i)),
        Err(_) => Code::Infinity,
    }
}

/// Code of the coset M·𝒯: α/γ.
pub fn code_t(f: &Field, m: &Matrix) -> Code {
    ratio(f, m.a, m.c)
}

/// Code of M⁻¹·𝒯 read off M: −δ/γ.
pub fn code_t_inv(f: &Field, m: &Matrix) -> Code {
    ratio(f, f.neg(m.d), m.c)
}

/// Both 𝒯-codes with a single inversion.
pub fn code_t_both(f: &Field, m: &Matrix) -> (Code, Code) {
    match f.inv(m.c) {
        Ok(i) => (Code::Finite(f.mul(m.a, i)), Code::Finite(f.neg(f.mul(m.d, i)))),
        Err(_) => (Code::Infinity, Code::Infinity),
    }
}

/// Code of M·𝒟 inside 𝒯: αβ.
pub fn code_d(f: &Field, m: &Matrix) -> Result<Elem> {
    if !m.c.is_zero() {
        return Err(Error::Precondition("code_d needs an upper triangular matrix"));
    }
    Ok(f.mul(m.a, m.b))
}

/// Code of M⁻¹·𝒟 read off M: M⁻¹ = [[α⁻¹, −β], [0, α]], so the code is −β·α⁻¹.
pub fn code_d_inv(f: &Field, m: &Matrix) -> Result<Elem> {
    if !m.c.is_zero() {
        return Err(Error::Precondition("code_d needs an upper triangular matrix"));
    }
    Ok(f.neg(f.div(m.b, m.a)?))
}

/// (α − α⁻¹)/β on 𝒯 \ {±I}; equal codes ⇔ commuting matrices.
pub fn code_commute(f: &Field, m: &Matrix) -> Result<Code> {
    if !m.c.is_zero() {
        return Err(Error::Precondition("code_commute needs an upper triangular matrix"));
    }
    let m1 = f.int(-1);
    if m.b.is_zero() && (m.a == Elem::ONE || m.a == m1) {
        return Err(Error::Precondition("code_commute is undefined on ±I"));
    }
    let num = f.sub(m.a, f.inv(m.a)?);
    Ok(ratio(f, num, m.b))
}

/// (ν0, ν1, ν0·l0 + ν1·l1).
pub fn word_stats(v: &Word, l0: u64, l1: u64) -> (usize, usize, u64) {
    let n0 = v.count(0);
    let n1 = v.count(1);
    (n0, n1, n0 as u64 * l0 + n1 as u64 * l1)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Enumerates binary words by weighted length: batch S_n holds every word of weighted
/// length g·n, built as S_n = S_{n−k0}·0 ∪ S_{n−k1}·1 from S_0 = {ε}.
///
/// Each word carries a payload extended symbol by symbol (a hash, for instance).
pub struct FibEnumerator<T = ()> {
    l0: u64,
    l1: u64,
    swapped: bool,
    g: u64,
    k0: usize,
    k1: usize,
    n: usize,
    /// S_{n−k1} .. S_n, newest last
    history: VecDeque<Vec<(Word, T)>>,
}

impl<T: Clone> FibEnumerator<T> {
    /// The payload of ε is `empty`.
    pub fn with_payload(l0: u64, l1: u64, empty: T) -> Result<Self> {
        if l0 == 0 || l1 == 0 {
            return Err(Error::Precondition("weights must be positive"));
        }
        if l0 == l1 {
            return Err(Error::Precondition("equal weights; use plain length order"));
        }
        let swapped = l0 > l1;
        let (lo, hi) = if swapped { (l1, l0) } else { (l0, l1) };
        let g = gcd(lo, hi);
        let mut history = VecDeque::new();
        history.push_back(alloc::vec![(Word::empty(), empty)]);
        Ok(FibEnumerator {
            l0,
            l1,
            swapped,
            g,
            k0: (lo / g) as usize,
            k1: (hi / g) as usize,
            n: 0,
            history,
        })
    }

    pub fn weights(&self) -> (u64, u64) {
        (self.l0, self.l1)
    }

    pub fn gcd(&self) -> u64 {
        self.g
    }

    /// Index of the most recent batch.
    pub fn level(&self) -> usize {
        self.n
    }

    /// The next batch S_n, extending payloads with `extend(parent_word, parent_payload, symbol)`.
    /// Symbols passed to `extend` and stored in words are in the caller's labelling.
    pub fn next_batch_with(&mut self, mut extend: impl FnMut(&Word, &T, u8) -> T) -> Vec<(Word, T)> {
        self.n += 1;
        let n = self.n;
        let (light, heavy) = if self.swapped { (1u8, 0u8) } else { (0u8, 1u8) };
        let mut out = Vec::new();
        let len = self.history.len();
        // history[len-1] is S_{n-1}; S_{n-j} sits at index len - j
        for (k, sym) in [(self.k0, light), (self.k1, heavy)] {
            if k <= n && k <= len {
                for (w, t) in &self.history[len - k] {
                    let payload = extend(w, t, sym);
                    let mut nw = w.clone();
                    nw.push(sym);
                    out.push((nw, payload));
                }
            }
        }
        self.history.push_back(out.clone());
        while self.history.len() > self.k1 {
            self.history.pop_front();
        }
        out
    }
}

impl FibEnumerator<()> {
    pub fn new(l0: u64, l1: u64) -> Result<Self> {
        Self::with_payload(l0, l1, ())
    }

    pub fn fib_next(&mut self) -> Vec<Word> {
        self.next_batch_with(|_, _, _| ()).into_iter().map(|(w, _)| w).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2::{enumerate_sl2, Shape};
    use alloc::string::ToString;
    use alloc::vec;
    use hashbrown::{HashMap, HashSet};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn xi_pair(g: &Group, x0: u64, x1: u64) -> GeneratorPair {
        let f = g.field();
        let m1 = f.int(-1);
        GeneratorPair {
            a0: Matrix::new(g.elem(x0), m1, Elem::ONE, Elem::ZERO),
            a1: Matrix::new(g.elem(x1), m1, Elem::ONE, Elem::ZERO),
        }
    }

    fn random_word(rng: &mut ChaCha8Rng, max: usize) -> Word {
        let len = rng.random_range(0..=max);
        Word((0..len).map(|_| rng.random_range(0..2u8)).collect())
    }

    #[test]
    fn hash_examples() {
        let g = Group::new(Field::new(7, 1).unwrap());
        let a = xi_pair(&g, 0, 1);
        assert_eq!(hash(&g, &a, &w("01")), g.matrix(6, 0, 1, 6));
        let before = g.work();
        assert_eq!(hash(&g, &a, &Word::empty()), Matrix::IDENTITY);
        assert_eq!(g.work(), before);
        hash(&g, &a, &w("0110101"));
        assert_eq!(g.work(), before + 6);
        hash(&g, &a, &w("2"));
        assert_eq!(g.work(), before + 6);
        assert_eq!(hash(&g, &a, &w("0202")), g.mul(&a.a0, &a.a0));
        let rev = reverse_hash(g.field(), &g.matrix(6, 0, 1, 6));
        assert_eq!(rev, g.matrix(6, 6, 0, 6));
        assert_eq!(rev, hash(&g, &a, &w("10")));
        assert_eq!(reverse_hash(g.field(), &Matrix::IDENTITY), Matrix::IDENTITY);
    }

    #[test]
    fn homomorphism_and_reversal_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (p, n) in [(7u64, 1u32), (2, 3), (3, 2), (2, 8)] {
            let g = Group::new(Field::new(p, n).unwrap());
            let f = g.field();
            for _ in 0..2500 {
                let a = GeneratorPair { a0: g.random_sl2(&mut rng), a1: g.random_sl2(&mut rng) };
                let u = random_word(&mut rng, 32);
                let v = random_word(&mut rng, 32);
                assert_eq!(hash(&g, &a, &u.concat(&v)), g.mul(&hash(&g, &a, &u), &hash(&g, &a, &v)));
                let x = xi_pair(&g, f.sample(&mut rng).raw(), f.sample(&mut rng).raw());
                let v = random_word(&mut rng, 64);
                let h = hash(&g, &x, &v);
                assert_eq!(reverse_hash(f, &h), hash(&g, &x, &v.reversed()));
                assert_eq!(reverse_hash(f, &reverse_hash(f, &h)), h);
            }
        }
    }

    #[test]
    fn code_examples() {
        let g = Group::new(Field::new(7, 1).unwrap());
        let f = g.field();
        assert_eq!(code_t(f, &g.matrix(1, 0, 1, 1)), Code::Finite(Elem::ONE));
        assert_eq!(code_t(f, &Matrix::IDENTITY), Code::Infinity);
        assert_eq!(code_d(f, &g.matrix(6, 6, 0, 6)).unwrap(), Elem::ONE);
        assert_eq!(code_d(f, &g.matrix(3, 0, 0, 5)).unwrap(), Elem::ZERO);
        assert!(code_d(f, &g.matrix(0, 6, 1, 0)).is_err());
        assert_eq!(code_commute(f, &g.matrix(3, 0, 0, 5)).unwrap(), Code::Infinity);
        assert_eq!(code_commute(f, &g.matrix(6, 6, 0, 6)).unwrap(), Code::Finite(Elem::ZERO));
        assert!(code_commute(f, &Matrix::IDENTITY).is_err());
        assert_eq!(Code::Infinity.to_text(f), "inf");
        assert!(Code::Finite(g.elem(6)) < Code::Infinity);
        assert_eq!(Code::parse(f, "inf").unwrap(), Code::Infinity);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let m = g.random_sl2(&mut rng);
            let mi = g.inv(&m).unwrap();
            assert_eq!(code_t_inv(f, &m), code_t(f, &mi));
            assert_eq!(code_t_both(f, &m), (code_t(f, &m), code_t_inv(f, &m)));
            let l = f.sample_nonzero(&mut rng);
            let t = Matrix::new(l, f.sample(&mut rng), Elem::ZERO, f.inv(l).unwrap());
            let ti = g.inv(&t).unwrap();
            assert_eq!(code_d_inv(f, &t).unwrap(), code_d(f, &ti).unwrap());
        }
    }

    #[test]
    fn coset_code_bijections() {
        for (p, n) in [(3u64, 1u32), (2, 2), (5, 1)] {
            let g = Group::new(Field::new(p, n).unwrap());
            let f = g.field();
            let q = f.q() as usize;
            let all = enumerate_sl2(&g);
            assert_eq!(all.len(), (q - 1) * q * (q + 1));
            let tri: Vec<Matrix> = all.iter().copied().filter(|m| g.is_upper(m)).collect();
            let mut classes: HashMap<Code, Vec<Matrix>> = HashMap::new();
            for m in &all {
                classes.entry(code_t(f, m)).or_default().push(*m);
            }
            assert_eq!(classes.len(), q + 1);
            for members in classes.values() {
                let m = members[0];
                let coset: HashSet<Matrix> = tri.iter().map(|t| g.mul(&m, t)).collect();
                assert_eq!(coset, members.iter().copied().collect::<HashSet<_>>());
            }
        }
    }

    #[test]
    fn triangular_codes_exhaustive() {
        for (p, n) in [(5u64, 1u32), (7, 1), (2, 3), (3, 1), (2, 2)] {
            let g = Group::new(Field::new(p, n).unwrap());
            let f = g.field();
            let q = f.q() as usize;
            let tri: Vec<Matrix> = enumerate_sl2(&g).into_iter().filter(|m| g.is_upper(m)).collect();
            assert_eq!(tri.len(), q * (q - 1));
            let diag: Vec<Matrix> = tri.iter().copied().filter(|m| m.b.is_zero()).collect();
            let mut classes: HashMap<Elem, HashSet<Matrix>> = HashMap::new();
            for m in &tri {
                classes.entry(code_d(f, m).unwrap()).or_default().insert(*m);
            }
            assert_eq!(classes.len(), q);
            for members in classes.values() {
                let m = *members.iter().next().unwrap();
                let coset: HashSet<Matrix> = diag.iter().map(|d| g.mul(&m, d)).collect();
                assert_eq!(&coset, members);
            }
            let nonscalar: Vec<Matrix> = tri.iter().copied().filter(|m| g.shape_of(m) != Shape::PlusMinusIdentity).collect();
            for m in &nonscalar {
                for k in &nonscalar {
                    let same = code_commute(f, m).unwrap() == code_commute(f, k).unwrap();
                    assert_eq!(same, g.commutes(m, k), "{m:?} {k:?}");
                }
            }
        }
    }

    #[test]
    fn word_stats_examples() {
        assert_eq!(word_stats(&w("0110"), 3, 5), (2, 2, 16));
        assert_eq!(word_stats(&Word::empty(), 3, 5), (0, 0, 0));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let (u, v) = (random_word(&mut rng, 20), random_word(&mut rng, 20));
            let (l0, l1) = (rng.random_range(1..9), rng.random_range(1..9));
            assert_eq!(word_stats(&u.concat(&v), l0, l1).2, word_stats(&u, l0, l1).2 + word_stats(&v, l0, l1).2);
        }
    }

    #[test]
    fn fib_examples() {
        let mut e = FibEnumerator::new(1, 2).unwrap();
        assert_eq!(e.fib_next(), vec![w("0")]);
        assert_eq!(e.fib_next(), vec![w("00"), w("1")]);
        assert_eq!(e.fib_next(), vec![w("000"), w("10"), w("01")]);
        let mut e = FibEnumerator::new(2, 3).unwrap();
        let batches: Vec<Vec<Word>> = (0..5).map(|_| e.fib_next()).collect();
        assert_eq!(batches[4], vec![w("10"), w("01")]);
        assert!(batches[0].is_empty());
        assert_eq!(batches[1], vec![w("0")]);
        assert_eq!(batches[2], vec![w("1")]);
        assert!(FibEnumerator::new(3, 3).is_err());
    }

    #[test]
    fn fib_recurrence_and_completeness() {
        for (l0, l1) in [(1u64, 2u64), (2, 3), (3, 2), (2, 4), (1, 16), (3, 7), (5, 3)] {
            let mut e = FibEnumerator::new(l0, l1).unwrap();
            let g = gcd(l0, l1);
            let (k0, k1) = ((l0.min(l1) / g) as usize, (l0.max(l1) / g) as usize);
            let mut sizes = vec![1usize];
            let mut union = 1usize; // ε
            for n in 1..=20usize {
                let batch = e.fib_next();
                for v in &batch {
                    assert_eq!(word_stats(v, l0, l1).2, g * n as u64);
                }
                if n > k1 {
                    assert_eq!(batch.len(), sizes[n - k0] + sizes[n - k1]);
                }
                sizes.push(batch.len());
                union += batch.len();
                let base = l1.max(l0) / l1.min(l0);
                let exp = (g * n as u64) / (2 * l1.max(l0));
                assert!(union as u64 >= base.pow(exp as u32), "growth ({l0},{l1}) n={n}");
                if n <= 15 {
                    // brute force over all binary words of length ≤ n
                    let mut expect: Vec<Word> = Vec::new();
                    for len in 0..=n {
                        for bits in 0..(1u32 << len) {
                            let v = Word((0..len).map(|i| ((bits >> i) & 1) as u8).collect());
                            if word_stats(&v, l0, l1).2 == g * n as u64 {
                                expect.push(v);
                            }
                        }
                    }
                    let mut got = batch.clone();
                    got.sort();
                    expect.sort();
                    assert_eq!(got, expect, "({l0},{l1}) n={n}");
                }
            }
        }
    }

    #[test]
    fn word_text() {
        assert_eq!(w("0120").to_string(), "0120");
        assert!("013".parse::<Word>().is_err());
        assert_eq!(w("0120").alphabet(), 3);
        assert_eq!(w("0110").alphabet(), 2);
        assert_eq!(w("10").tail(), w("0"));
        assert!(w("01210").is_palindrome());
        assert_eq!(w("0120").without(2), w("010"));
        assert_eq!(w("01").substitute(&[&w("1"), &w("00")]), w("100"));
    }
}
