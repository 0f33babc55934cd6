//! Sample streams and the meet-in-the-middle search.

use alloc::vec::Vec;

use hashbrown::HashMap;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf::Field;
use crate::sl2::{Group, Matrix};
use crate::words::{code_d, code_d_inv, code_t_both, hash, Code, FibEnumerator, GeneratorPair, Word};

/// Parameters of uniform word sampling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkSpec {
    pub segment_length: usize,
    /// 2 for {0,1}, 3 for {0,1,2}.
    pub alphabet: u8,
    pub seed: u64,
    /// Walk-length constant for random homomorphisms.
    pub c: f64,
}

impl WalkSpec {
    /// Segment length ⌈lg q / 2⌉ over {0,1}.
    pub fn for_field(f: &Field, seed: u64) -> WalkSpec {
        let seg = libm::ceil(f.lg_q() / 2.0).max(1.0) as usize;
        WalkSpec { segment_length: seg, alphabet: 2, seed, c: 10.0 }
    }
}

/// A uniform word of the given length together with its hash.
pub fn walk_sample<R: Rng + ?Sized>(g: &Group, gens: &GeneratorPair, len: usize, alphabet: u8, rng: &mut R) -> (Word, Matrix) {
    let mut w = Word::empty();
    for _ in 0..len {
        w.push(rng.random_range(0..alphabet));
    }
    let m = hash(g, gens, &w);
    (w, m)
}

/// A stream of (word, hash) samples charged to a group's counter.
pub trait Sampler {
    fn next_sample(&mut self, g: &Group) -> Option<(Word, Matrix)>;
}

/// Independent uniform words of fixed length, each hashed from scratch.
pub struct WalkSampler {
    gens: GeneratorPair,
    len: usize,
    alphabet: u8,
    rng: ChaCha8Rng,
}

impl WalkSampler {
    pub fn new(gens: GeneratorPair, spec: &WalkSpec) -> WalkSampler {
        WalkSampler {
            gens,
            len: spec.segment_length.max(1),
            alphabet: spec.alphabet,
            rng: ChaCha8Rng::seed_from_u64(spec.seed),
        }
    }
}

impl Sampler for WalkSampler {
    fn next_sample(&mut self, g: &Group) -> Option<(Word, Matrix)> {
        Some(walk_sample(g, &self.gens, self.len, self.alphabet, &mut self.rng))
    }
}

/// All binary words by increasing length, each obtained from its prefix with one
/// multiplication. Within a length the order is lexicographic, or a seeded shuffle.
pub struct LevelSampler {
    gens: GeneratorPair,
    rng: Option<ChaCha8Rng>,
    level: usize,
    /// words of the previous length as (bits, hash), bit i = symbol i
    parents: Vec<(u64, Matrix)>,
    /// pending (parent index, symbol) for the current length
    pending: Vec<(u32, u8)>,
    pos: usize,
    done: Vec<(u64, Matrix)>,
}

impl LevelSampler {
    pub fn lexicographic(gens: GeneratorPair) -> LevelSampler {
        Self::build(gens, None)
    }

    pub fn shuffled(gens: GeneratorPair, seed: u64) -> LevelSampler {
        Self::build(gens, Some(ChaCha8Rng::seed_from_u64(seed)))
    }

    fn build(gens: GeneratorPair, rng: Option<ChaCha8Rng>) -> LevelSampler {
        let mut s = LevelSampler {
            gens,
            rng,
            level: 0,
            parents: alloc::vec![(0, Matrix::IDENTITY)],
            pending: Vec::new(),
            pos: 0,
            done: Vec::new(),
        };
        s.open_level();
        s
    }

    fn open_level(&mut self) {
        self.level += 1;
        let mut pending = Vec::with_capacity(self.parents.len() * 2);
        for i in 0..self.parents.len() as u32 {
            pending.push((i, 0u8));
            pending.push((i, 1u8));
        }
        if let Some(rng) = &mut self.rng {
            pending.shuffle(rng);
        }
        self.pending = pending;
        self.pos = 0;
    }
}

fn bits_to_word(bits: u64, len: usize) -> Word {
    Word::new((0..len).map(|i| ((bits >> i) & 1) as u8).collect()).expect("binary")
}

impl Sampler for LevelSampler {
    fn next_sample(&mut self, g: &Group) -> Option<(Word, Matrix)> {
        if self.pos == self.pending.len() {
            if self.level >= 63 {
                return None;
            }
            self.parents = core::mem::take(&mut self.done);
            self.open_level();
        }
        let (pi, s) = self.pending[self.pos];
        self.pos += 1;
        let (pbits, pm) = self.parents[pi as usize];
        let m = if self.level == 1 { self.gens.get(s) } else { g.mul(&pm, &self.gens.get(s)) };
        let bits = pbits | (s as u64) << (self.level - 1);
        self.done.push((bits, m));
        Some((bits_to_word(bits, self.level), m))
    }
}

/// Words in increasing weighted length, from the weighted enumerator.
pub struct FibSampler {
    gens: GeneratorPair,
    en: FibEnumerator<Matrix>,
    batch: alloc::vec::IntoIter<(Word, Matrix)>,
}

impl FibSampler {
    pub fn new(gens: GeneratorPair, l0: u64, l1: u64) -> Result<FibSampler> {
        Ok(FibSampler {
            gens,
            en: FibEnumerator::with_payload(l0, l1, Matrix::IDENTITY)?,
            batch: Vec::new().into_iter(),
        })
    }
}

impl Sampler for FibSampler {
    fn next_sample(&mut self, g: &Group) -> Option<(Word, Matrix)> {
        loop {
            if let Some(x) = self.batch.next() {
                return Some(x);
            }
            if self.en.level() > 100_000 {
                return None;
            }
            let gens = self.gens;
            let b = self.en.next_batch_with(|w, m, s| if w.is_empty() { gens.get(s) } else { g.mul(m, &gens.get(s)) });
            self.batch = b.into_iter();
        }
    }
}

/// Left code (stored) and right code (probed) of a sample. Codes match for samples
/// u (stored) and v (probing) when h(v)·h(u) lies in the target subgroup.
pub trait Codes {
    fn codes(&self, f: &Field, m: &Matrix) -> (Code, Code);
}

/// Target 𝒯.
pub struct TCodes;

impl Codes for TCodes {
    fn codes(&self, f: &Field, m: &Matrix) -> (Code, Code) {
        code_t_both(f, m)
    }
}

/// Target 𝒟, for samples already in 𝒯.
pub struct DCodes;

impl Codes for DCodes {
    fn codes(&self, f: &Field, m: &Matrix) -> (Code, Code) {
        let l = code_d(f, m).expect("sample in 𝒯");
        let r = code_d_inv(f, m).expect("sample in 𝒯");
        (Code::Finite(l), Code::Finite(r))
    }
}

/// Codes from a pair of closures.
pub struct FnCodes<L, R>(pub L, pub R);

impl<L: Fn(&Field, &Matrix) -> Code, R: Fn(&Field, &Matrix) -> Code> Codes for FnCodes<L, R> {
    fn codes(&self, f: &Field, m: &Matrix) -> (Code, Code) {
        (self.0(f, m), self.1(f, m))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MitmHit {
    /// The stored sample.
    pub u: Word,
    /// The probing sample.
    pub v: Word,
    /// v·u.
    pub product: Word,
    /// h(v)·h(u).
    pub hash: Matrix,
    pub code: Code,
    /// Counter reading at the hit.
    pub work: u64,
    pub samples: u64,
    pub stored: u64,
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Whether a code is distinguished: its mixed key ends in `bits` zero bits.
pub fn is_distinguished(c: Code, bits: u32) -> bool {
    bits == 0 || mix(c.key()).trailing_zeros() >= bits
}

/// Meet-in-the-middle with a hash table: probe each sample's right code against stored
/// left codes, then store its left code. `accept` rejects forbidden samples outright.
pub fn mitm<S, C, F>(g: &Group, sampler: &mut S, codes: &C, accept: F, budget: u64) -> Result<MitmHit>
where
    S: Sampler + ?Sized,
    C: Codes + ?Sized,
    F: FnMut(&Word, &Matrix) -> bool,
{
    mitm_filtered(g, sampler, codes, accept, |_, _| true, 0, budget)
}

/// As [`mitm`], storing only samples whose left code is distinguished.
pub fn mitm_distinguished<S, C, F>(
    g: &Group,
    sampler: &mut S,
    codes: &C,
    accept: F,
    bits: u32,
    budget: u64,
) -> Result<MitmHit>
where
    S: Sampler + ?Sized,
    C: Codes + ?Sized,
    F: FnMut(&Word, &Matrix) -> bool,
{
    mitm_filtered(g, sampler, codes, accept, |_, _| true, bits, budget)
}

/// The general search. Matches whose product fails `accept_hit` are dropped and the
/// search goes on.
#[allow(clippy::too_many_arguments)]
pub fn mitm_filtered<S, C, F, H>(
    g: &Group,
    sampler: &mut S,
    codes: &C,
    mut accept: F,
    mut accept_hit: H,
    bits: u32,
    budget: u64,
) -> Result<MitmHit>
where
    S: Sampler + ?Sized,
    C: Codes + ?Sized,
    F: FnMut(&Word, &Matrix) -> bool,
    H: FnMut(&Word, &Matrix) -> bool,
{
    let mut store: HashMap<Code, (Word, Matrix)> = HashMap::new();
    let mut samples = 0u64;
    while samples < budget {
        let Some((v, m)) = sampler.next_sample(g) else { break };
        samples += 1;
        if !accept(&v, &m) {
            continue;
        }
        let (left, right) = codes.codes(g.field(), &m);
        if is_distinguished(right, bits) {
            if let Some((u, mu)) = store.get(&right) {
                if *u != v {
                    let product = v.concat(u);
                    let hash = g.mul(&m, mu);
                    if accept_hit(&product, &hash) {
                        return Ok(MitmHit {
                            u: u.clone(),
                            v,
                            product,
                            hash,
                            code: right,
                            work: g.work(),
                            samples,
                            stored: store.len() as u64,
                        });
                    }
                }
            }
        }
        if is_distinguished(left, bits) {
            store.entry(left).or_insert((v, m));
        }
    }
    Err(Error::Exhausted)
}

/// Fraction of stored samples in a search that ran to its budget, for diagnostics.
pub fn distinguished_fraction<S: Sampler + ?Sized, C: Codes + ?Sized>(g: &Group, sampler: &mut S, codes: &C, bits: u32, samples: u64) -> f64 {
    let mut stored = 0u64;
    for _ in 0..samples {
        let Some((_, m)) = sampler.next_sample(g) else { break };
        if is_distinguished(codes.codes(g.field(), &m).0, bits) {
            stored += 1;
        }
    }
    stored as f64 / samples as f64
}

/// True iff the words differ and hash to the same matrix.
pub fn verify_collision(f: &Field, gens: &GeneratorPair, w1: &Word, w2: &Word) -> bool {
    if w1 == w2 {
        return false;
    }
    let g = Group::new(f.clone());
    hash(&g, gens, w1) == hash(&g, gens, w2)
}

/// Default sample budget for one search: 16√q, at least 4096.
pub fn default_budget(f: &Field) -> u64 {
    let s = libm::sqrt(f.q() as f64);
    (16.0 * s).max(4096.0) as u64
}

/// Derives an independent seed.
pub fn derive_seed(seed: u64, k: u64) -> u64 {
    mix(seed ^ mix(k.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

/// Runs `attempt(budget, seed)`, doubling the budget and reseeding after each exhaustion,
/// at most three retries.
pub fn with_retries<T>(budget: u64, seed: u64, mut attempt: impl FnMut(u64, u64) -> Result<T>) -> Result<T> {
    let mut b = budget;
    let mut s = seed;
    for k in 0..4u64 {
        match attempt(b, s) {
            Err(Error::Exhausted) => {
                b = b.saturating_mul(2);
                s = derive_seed(seed, k + 1);
            }
            other => return other,
        }
    }
    Err(Error::Exhausted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::Elem;
    use crate::sl2::Shape;
    use alloc::string::ToString;
    use alloc::vec;

    fn xi_pair(g: &Group, x0: Elem, x1: Elem) -> GeneratorPair {
        let m1 = g.field().int(-1);
        GeneratorPair { a0: Matrix::new(x0, m1, Elem::ONE, Elem::ZERO), a1: Matrix::new(x1, m1, Elem::ONE, Elem::ZERO) }
    }

    #[test]
    fn walk_samples() {
        let g = Group::new(Field::new(7, 1).unwrap());
        let a = xi_pair(&g, g.elem(0), g.elem(1));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (w, m) = walk_sample(&g, &a, 1, 2, &mut rng);
        assert!(w.len() == 1 && m == a.get(w.symbols()[0]));
        let spec = WalkSpec { segment_length: 8, alphabet: 2, seed: 4, c: 10.0 };
        let mut s1 = WalkSampler::new(a, &spec);
        let mut s2 = WalkSampler::new(a, &spec);
        assert_eq!(s1.next_sample(&g), s2.next_sample(&g));
        let before = g.work();
        s1.next_sample(&g);
        assert_eq!(g.work() - before, 7);
        let mut counts = vec![0u32; 256];
        for _ in 0..1000 {
            let (w, _) = s1.next_sample(&g).unwrap();
            let idx = w.symbols().iter().enumerate().fold(0usize, |acc, (i, &b)| acc | (b as usize) << i);
            counts[idx] += 1;
        }
        let expect = 1000.0 / 256.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expect) * (c as f64 - expect) / expect).sum();
        // 255 degrees of freedom: mean 255, sd ≈ 22.6
        assert!(chi2 < 255.0 + 5.0 * 22.6, "chi2 {chi2}");
    }

    #[test]
    fn level_sampler_order_and_cost() {
        let g = Group::new(Field::new(7, 1).unwrap());
        let a = xi_pair(&g, g.elem(0), g.elem(1));
        let mut s = LevelSampler::lexicographic(a);
        let words: Vec<_> = (0..14).map(|_| s.next_sample(&g).unwrap()).collect();
        let text: Vec<_> = words.iter().map(|(w, _)| w.to_string()).collect();
        assert_eq!(
            text,
            ["0", "1", "00", "01", "10", "11", "000", "001", "010", "011", "100", "101", "110", "111"]
        );
        for (w, m) in &words {
            assert_eq!(*m, hash(&Group::new(g.field().clone()), &a, w));
        }
        assert_eq!(g.work(), 12);
        let mut sh = LevelSampler::shuffled(a, 3);
        let mut level3: Vec<_> = (0..14).map(|_| sh.next_sample(&g).unwrap().0.to_string()).collect();
        level3[6..].sort();
        assert_eq!(level3[6..], text[6..]);
    }

    #[test]
    fn fib_sampler_hashes() {
        let g = Group::new(Field::new(7, 1).unwrap());
        let a = xi_pair(&g, g.elem(3), g.elem(5));
        let mut s = FibSampler::new(a, 2, 3).unwrap();
        let oracle = Group::new(g.field().clone());
        for _ in 0..200 {
            let (w, m) = s.next_sample(&g).unwrap();
            assert_eq!(m, hash(&oracle, &a, &w));
        }
    }

    #[test]
    fn mitm_examples() {
        let g = Group::new(Field::new(7, 1).unwrap());
        let a = xi_pair(&g, g.elem(0), g.elem(1));
        assert_eq!(g.shape_of(&hash(&g, &a, &"10".parse().unwrap())), Shape::UpperTriangular);
        let spec = WalkSpec { segment_length: 1, alphabet: 2, seed: 0, c: 10.0 };
        let hit = mitm(&g, &mut WalkSampler::new(a, &spec), &TCodes, |_, _| true, 64).unwrap();
        assert_eq!(hit.product.len(), 2);
        assert!(g.is_upper(&hash(&g, &a, &hit.product)));
        assert_eq!(
            mitm(&g, &mut WalkSampler::new(a, &spec), &TCodes, |_, _| true, 0).unwrap_err(),
            Error::Exhausted
        );
    }

    #[test]
    fn mitm_hits_land_in_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (p, n) in [(2u64, 8u32), (3, 5), (251, 1)] {
            let f = Field::new(p, n).unwrap();
            for t in 0..100 {
                let g = Group::new(f.clone());
                let a = GeneratorPair { a0: g.random_sl2(&mut rng), a1: g.random_sl2(&mut rng) };
                let hit = mitm(&g, &mut LevelSampler::shuffled(a, t), &TCodes, |_, _| true, 1 << 16).unwrap();
                assert!(g.is_upper(&hash(&g, &a, &hit.product)));
                assert_eq!(hit.hash, hash(&g, &a, &hit.product));
                assert_ne!(hit.u, hit.v);
                let mut spec = WalkSpec::for_field(&f, t);
                spec.segment_length += 6;
                let hit = mitm_distinguished(&g, &mut WalkSampler::new(a, &spec), &TCodes, |_, _| true, 2, 1 << 18).unwrap_or_else(|e| panic!("{p} {n} {t} {e:?} {a:?}"));
                assert!(g.is_upper(&hash(&g, &a, &hit.product)));
            }
        }
    }

    #[test]
    fn distinguished_modes() {
        let f = Field::new(2, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let g = Group::new(f.clone());
        let a = GeneratorPair { a0: g.random_sl2(&mut rng), a1: g.random_sl2(&mut rng) };
        let spec = WalkSpec::for_field(&f, 5);
        let h0 = mitm(&g, &mut WalkSampler::new(a, &spec), &TCodes, |_, _| true, 1 << 12).unwrap();
        let h1 = mitm_distinguished(&g, &mut WalkSampler::new(a, &spec), &TCodes, |_, _| true, 0, 1 << 12).unwrap();
        assert_eq!((h0.u, h0.v), (h1.u, h1.v));
        let f16 = Field::new(2, 16).unwrap();
        let g16 = Group::new(f16.clone());
        let a16 = GeneratorPair { a0: g16.random_sl2(&mut rng), a1: g16.random_sl2(&mut rng) };
        let spec16 = WalkSpec { segment_length: 20, alphabet: 2, seed: 9, c: 10.0 };
        let n = 4000u64;
        let frac = distinguished_fraction(&g16, &mut WalkSampler::new(a16, &spec16), &TCodes, 2, n);
        let sigma = libm::sqrt(0.25 * 0.75 / n as f64);
        assert!(libm::fabs(frac - 0.25) < 5.0 * sigma, "{frac}");
    }

    #[test]
    fn verification() {
        let f = Field::new(7, 1).unwrap();
        let g = Group::new(f.clone());
        let m = g.matrix(2, 3, 1, 2);
        let same = GeneratorPair { a0: m, a1: m };
        let v: Word = "0110".parse().unwrap();
        assert!(!verify_collision(&f, &same, &v, &v));
        assert!(verify_collision(&f, &same, &"01".parse().unwrap(), &"10".parse().unwrap()));
    }

    #[test]
    fn retries_double_budget() {
        let mut seen = Vec::new();
        let r: Result<()> = with_retries(10, 1, |b, s| {
            seen.push((b, s));
            Err(Error::Exhausted)
        });
        assert_eq!(r.unwrap_err(), Error::Exhausted);
        assert_eq!(seen.iter().map(|x| x.0).collect::<Vec<_>>(), [10, 20, 40, 80]);
        assert_eq!(with_retries(10, 1, |b, _| if b >= 40 { Ok(b) } else { Err(Error::Exhausted) }).unwrap(), 40);
    }
}
