//! Random homomorphisms and walk mixing, palindrome checks, the exhaustive
//! shortest-collision oracle and the cost table for q = 2^n.

use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;
use nalgebra::{DMatrix, Schur};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::attacks::{Collision, Method, SearchOpts};
use crate::engine::{derive_seed, WalkSpec};
use crate::error::{Error, Result};
use crate::gf::{Elem, Field};
use crate::sl2::{enumerate_sl2, Group, Matrix};
use crate::words::{hash, GeneratorPair, Word};

/// Default expansion constant of the Cayley graph.
pub const DEFAULT_EPSILON: f64 = 0.1;

/// Largest group accepted by [`walk_distance`].
pub const MIXING_ORDER_LIMIT: u64 = 10_000;

/// |SL2(F_q)| as a float.
pub fn group_order(f: &Field) -> f64 {
    let q = f.q() as f64;
    (q - 1.0) * q * (q + 1.0)
}

/// ⌈c · 27/ε² · ln|G|⌉.
pub fn walk_length(f: &Field, c: f64, eps: f64) -> usize {
    libm::ceil(c * 27.0 / (eps * eps) * libm::log(group_order(f))) as usize
}

/// Two walk words over {0,1,2} and their images.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RandomHom {
    pub r: GeneratorPair,
    pub v0: Word,
    pub v1: Word,
    /// Multiplications spent hashing the walks.
    pub work: u64,
}

/// Draws v0, v1 uniformly from {0,1,2}^m and hashes them with the identity as
/// third generator. `m` defaults to [`walk_length`] with `spec.c` and `eps`.
pub fn random_homomorphism(g: &Group, gens: &GeneratorPair, spec: &WalkSpec, eps: f64, m: Option<usize>) -> RandomHom {
    let m = m.unwrap_or_else(|| walk_length(g.field(), spec.c, eps));
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let before = g.work();
    let draw = |rng: &mut ChaCha8Rng| {
        let v = Word::new((0..m).map(|_| rng.random_range(0..3u8)).collect()).expect("symbols below 3");
        // The identity factors change nothing, so only the 0/1 part is multiplied.
        let r = hash(g, gens, &v.without(2));
        (v, r)
    };
    let (v0, r0) = draw(&mut rng);
    let (v1, r1) = draw(&mut rng);
    RandomHom { r: GeneratorPair { a0: r0, a1: r1 }, v0, v1, work: g.work() - before }
}

/// Rewrites a collision under `hom.r` as one under `gens`.
pub fn lift_collision(f: &Field, gens: &GeneratorPair, hom: &RandomHom, inner: &Collision) -> Result<Collision> {
    let images = [&hom.v0, &hom.v1];
    let w1 = inner.w1.substitute(&images).without(2);
    let w2 = inner.w2.substitute(&images).without(2);
    Collision::checked(f, gens, w1, w2, inner.work + hom.work, Method::Lifted)
}

/// Runs `inner` on fresh random homomorphisms until a lifted collision verifies.
pub fn lifted_attack<F>(g: &Group, gens: &GeneratorPair, spec: &WalkSpec, eps: f64, m: Option<usize>, attempts: u32, mut inner: F) -> Result<Collision>
where
    F: FnMut(&Group, &GeneratorPair, &SearchOpts) -> Result<Collision>,
{
    let start = g.work();
    let mut last = Error::Exhausted;
    for k in 0..attempts as u64 {
        let s = WalkSpec { seed: derive_seed(spec.seed, 2 * k), ..*spec };
        let hom = random_homomorphism(g, gens, &s, eps, m);
        if hom.r.a0 == hom.r.a1 && hom.v0 == hom.v1 {
            continue;
        }
        let opts = SearchOpts::with_seed(derive_seed(spec.seed, 2 * k + 1));
        match inner(g, &hom.r, &opts).and_then(|c| lift_collision(g.field(), gens, &hom, &c)) {
            Ok(mut c) => {
                c.work = g.work() - start;
                return Ok(c);
            }
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Exact walk distances on a tiny group.
#[derive(Clone, Debug, PartialEq)]
pub struct MixingReport {
    pub group_order: u64,
    pub walk_lengths: Vec<usize>,
    pub l1_distances: Vec<f64>,
    /// λ(Γ)/d for the Cayley graph of (G, {g0, g1, e}).
    pub lambda_ratio: f64,
}

impl MixingReport {
    /// ½√|G|·α^m for each reported m.
    pub fn bounds(&self) -> Vec<f64> {
        let s = libm::sqrt(self.group_order as f64);
        self.walk_lengths.iter().map(|&m| 0.5 * s * libm::pow(self.lambda_ratio, m as f64)).collect()
    }

    /// Whether ½‖dist_m − u‖₁ stays under the spectral bound (with slack `tol`).
    pub fn bound_holds(&self, tol: f64) -> bool {
        self.l1_distances.iter().zip(self.bounds()).all(|(d, b)| 0.5 * d <= b + tol)
    }
}

fn cayley_table(g: &Group, gens: &GeneratorPair) -> Result<(Vec<[usize; 3]>, usize)> {
    let q = g.field().q();
    if q > 64 || (q * q * q - q) as u64 > MIXING_ORDER_LIMIT {
        return Err(Error::FieldTooLarge);
    }
    let elems = enumerate_sl2(g);
    let index: HashMap<Matrix, usize> = elems.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let step = [gens.a0, gens.a1, Matrix::IDENTITY];
    let f = g.field();
    let mul = |x: &Matrix, y: &Matrix| {
        Matrix::new(
            f.add(f.mul(x.a, y.a), f.mul(x.b, y.c)),
            f.add(f.mul(x.a, y.b), f.mul(x.b, y.d)),
            f.add(f.mul(x.c, y.a), f.mul(x.d, y.c)),
            f.add(f.mul(x.c, y.b), f.mul(x.d, y.d)),
        )
    };
    let table = elems.iter().map(|x| step.map(|s| index[&mul(x, &s)])).collect();
    Ok((table, index[&Matrix::IDENTITY]))
}

/// L1 distance from uniform of the walk x ↦ x·s, s uniform in {g0, g1, e},
/// started at the identity, for each requested length.
pub fn walk_distance(g: &Group, gens: &GeneratorPair, lengths: &[usize]) -> Result<MixingReport> {
    let (table, id) = cayley_table(g, gens)?;
    let n = table.len();
    let mut targets: Vec<usize> = lengths.to_vec();
    targets.sort_unstable();
    let mut dist = vec![0.0f64; n];
    dist[id] = 1.0;
    let mut done = 0usize;
    let mut at = HashMap::new();
    let u = 1.0 / n as f64;
    for &m in &targets {
        while done < m {
            let mut next = vec![0.0f64; n];
            for (x, row) in table.iter().enumerate() {
                let w = dist[x] / 3.0;
                for &y in row {
                    next[y] += w;
                }
            }
            dist = next;
            done += 1;
        }
        at.insert(m, dist.iter().map(|p| libm::fabs(p - u)).sum::<f64>());
    }
    let l1_distances = lengths.iter().map(|m| at[m]).collect();

    let mut adj = DMatrix::<f64>::zeros(n, n);
    for (x, row) in table.iter().enumerate() {
        for &y in row {
            adj[(x, y)] += 1.0;
        }
    }
    // Drop the trivial eigenvalue d once; a repeat means the pair does not generate.
    let mut moduli = spectrum_moduli(adj)?;
    moduli.sort_by(|x, y| y.total_cmp(x));
    let lambda = moduli.get(1).copied().unwrap_or(0.0).min(3.0);
    Ok(MixingReport { group_order: n as u64, walk_lengths: lengths.to_vec(), l1_distances, lambda_ratio: lambda / 3.0 })
}

/// Moduli of the eigenvalues. QR iteration can stall on permutation-like
/// matrices, so a stalled run is retried on a random orthogonal conjugate.
fn spectrum_moduli(m: DMatrix<f64>) -> Result<Vec<f64>> {
    let n = m.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut a = m.clone();
    for _ in 0..8 {
        if let Some(schur) = Schur::try_new(a.clone(), 1e-13, 50 * n * n + 1000) {
            return Ok(schur.complex_eigenvalues().iter().map(|z| libm::hypot(z.re, z.im)).collect());
        }
        let r = DMatrix::<f64>::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let q = r.qr().q();
        a = q.transpose() * &m * q;
    }
    Err(Error::Exhausted)
}

/// The pair [[α, −1], [1, 0]], [[α+1, −1], [1, 0]].
pub fn alpha_pair(f: &Field, alpha: Elem) -> GeneratorPair {
    let m1 = f.neg(Elem::ONE);
    GeneratorPair {
        a0: Matrix::new(alpha, m1, Elem::ONE, Elem::ZERO),
        a1: Matrix::new(f.add(alpha, Elem::ONE), m1, Elem::ONE, Elem::ZERO),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PalindromeCheck {
    /// h(v).
    pub form: Matrix,
    /// h(0v0) − h(1v1).
    pub delta: Matrix,
    /// h(v) = [[a, b], [−b, d]].
    pub form_ok: bool,
    /// delta = [[−2aα − a − 2b, a], [−a, 0]].
    pub delta_ok: bool,
    pub collides: bool,
}

/// Checks the shape of h(v) and of h(0v0) − h(1v1) for the pair built on `alpha`.
pub fn palindrome_check(g: &Group, alpha: Elem, v: &Word) -> Result<PalindromeCheck> {
    let f = g.field();
    if !v.is_palindrome() || v.alphabet() > 2 {
        return Err(Error::Precondition("word must be a binary palindrome"));
    }
    if f.order(alpha)? as u128 != f.q() - 1 {
        return Err(Error::Precondition("alpha must be primitive"));
    }
    let a = alpha_pair(f, alpha);
    let h = hash(g, &a, v);
    let outer = |s: u8| g.mul(&g.mul(&a.get(s), &h), &a.get(s));
    let delta = g.sub(&outer(0), &outer(1));
    let form_ok = h.c == f.neg(h.b);
    let two = f.int(2);
    let expect = Matrix::new(
        f.sub(f.neg(f.add(f.mul(two, f.mul(h.a, alpha)), h.a)), f.mul(two, h.b)),
        h.a,
        f.neg(h.a),
        Elem::ZERO,
    );
    let zero = Matrix::new(Elem::ZERO, Elem::ZERO, Elem::ZERO, Elem::ZERO);
    Ok(PalindromeCheck { form: h, delta, form_ok, delta_ok: delta == expect, collides: delta == zero })
}

/// A uniformly random binary palindrome of the given length.
pub fn random_palindrome<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Word {
    let half: Vec<u8> = (0..len.div_ceil(2)).map(|_| rng.random_range(0..2u8)).collect();
    let mut s = half.clone();
    s.extend(half.iter().rev().skip(len % 2));
    Word::new(s).expect("binary symbols")
}

fn bits_word(bits: u64, len: u32) -> Word {
    Word::new((0..len).map(|i| ((bits >> i) & 1) as u8).collect()).expect("binary symbols")
}

/// Shortest collision by breadth-first enumeration in length-lexicographic
/// order. The first hash seen twice gives the pair; the stored word is the
/// lexicographically first earlier preimage.
pub fn bfs_shortest_collision(g: &Group, a: &GeneratorPair, work_cap: u64) -> Result<Collision> {
    let start = g.work();
    let mut seen: HashMap<Matrix, (u64, u32)> = HashMap::new();
    // Symbol i of a word sits in bit i; a level is kept in lexicographic order, and
    // each product is checked as soon as it is formed.
    let mut level: Vec<(u64, Matrix)> = Vec::new();
    for (bits, m) in [(0, a.a0), (1, a.a1)] {
        if let Some(&(b0, l0)) = seen.get(&m) {
            return Collision::checked(g.field(), a, bits_word(b0, l0), bits_word(bits, 1), 0, Method::Oracle);
        }
        seen.insert(m, (bits, 1));
        level.push((bits, m));
    }
    let mut len = 1u32;
    loop {
        if len >= 63 {
            return Err(Error::EnumerationCap);
        }
        let mut next = Vec::with_capacity(level.len() * 2);
        for &(bits, m) in &level {
            for s in 0..2u8 {
                if g.work() - start >= work_cap {
                    return Err(Error::Exhausted);
                }
                let (b, p) = (bits | (s as u64) << len, g.mul(&m, &a.get(s)));
                if let Some(&(b0, l0)) = seen.get(&p) {
                    let work = g.work() - start;
                    return Collision::checked(g.field(), a, bits_word(b0, l0), bits_word(b, len + 1), work, Method::Oracle);
                }
                seen.insert(p, (b, len + 1));
                next.push((b, p));
            }
        }
        level = next;
        len += 1;
    }
}

/// One row of the cost comparison for q = 2^n.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostPoint {
    pub n: u32,
    pub n0: u32,
    /// Real-valued n0 the subexponential columns are computed from.
    pub n0_exact: f64,
    pub subexp_work_log2: f64,
    pub subexp_length_log2: f64,
    pub our_work_log2: f64,
    pub our_length_log2: i64,
}

pub const OMEGA: f64 = 2.8;

fn subexp_length_log2(n: f64, n0: f64) -> f64 {
    libm::log2(32.0 * n * n * n / n0) + n0 * libm::log2(3.0)
}

/// For each n, the largest n0 whose collision length stays within
/// 2^`length_budget_log2`, and the resulting costs next to ours.
pub fn subexp_table(ns: &[u32], length_budget_log2: f64) -> Result<Vec<CostPoint>> {
    let mut out = Vec::with_capacity(ns.len());
    for &n in ns {
        if n < 4 {
            return Err(Error::Precondition("n must be at least 4"));
        }
        let nf = n as f64;
        // n0 is the largest real root of length(n0) = budget; length is convex in n0.
        let (mut lo, mut hi) = (1.5f64, nf);
        if subexp_length_log2(nf, lo) > length_budget_log2 {
            return Err(Error::Precondition("length budget admits no n0"));
        }
        if subexp_length_log2(nf, hi) <= length_budget_log2 {
            lo = hi;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if subexp_length_log2(nf, mid) <= length_budget_log2 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let k = lo;
        let ln = libm::log;
        let work = OMEGA * nf * ln(nf) * ln(k) / (k * ln(nf / k));
        let lg = nf;
        out.push(CostPoint {
            n,
            n0: k as u32,
            n0_exact: k,
            subexp_work_log2: work,
            subexp_length_log2: subexp_length_log2(nf, k),
            our_work_log2: nf / 2.0,
            our_length_log2: libm::round(libm::log2(2.0 * lg * lg / libm::log2(lg))) as i64,
        });
    }
    Ok(out)
}

/// n = 64, 128, …, 16384.
pub fn table6_ns() -> Vec<u32> {
    (6..=14).map(|k| 1u32 << k).collect()
}
