//! Multi-threaded meet-in-the-middle over independent walk streams.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;

use sl2c_core::engine::{derive_seed, is_distinguished, Codes, Sampler, WalkSampler, WalkSpec};
use sl2c_core::{Code, Error, Field, GeneratorPair, Group, Matrix, Word};

const SHARDS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelHit {
    pub u: Word,
    pub v: Word,
    /// v·u.
    pub product: Word,
    pub hash: Matrix,
    /// Multiplications summed over all workers.
    pub work: u64,
    pub samples: u64,
}

type Shard = Mutex<HashMap<Code, (Word, Matrix)>>;

fn shard(store: &[Shard], c: Code) -> &Shard {
    &store[(c.key() % SHARDS as u64) as usize]
}

/// Each worker walks its own seed stream with a private counter; the code store is
/// sharded behind locks. Any valid hit is returned, not a reproducible one.
#[allow(clippy::too_many_arguments)]
pub fn parallel_mitm<C, H>(
    f: &Field,
    gens: &GeneratorPair,
    codes: &C,
    accept_hit: H,
    spec: &WalkSpec,
    threads: usize,
    dp_bits: u32,
    budget: u64,
) -> Result<ParallelHit, Error>
where
    C: Codes + Sync,
    H: Fn(&Word, &Matrix) -> bool + Sync,
{
    let store: Vec<Shard> = (0..SHARDS).map(|_| Mutex::new(HashMap::new())).collect();
    let samples = AtomicU64::new(0);
    let work = AtomicU64::new(0);
    let stop = AtomicBool::new(false);
    let found: Mutex<Option<ParallelHit>> = Mutex::new(None);

    std::thread::scope(|s| {
        for t in 0..threads.max(1) {
            let (store, samples, work, stop, found, accept_hit) = (&store, &samples, &work, &stop, &found, &accept_hit);
            s.spawn(move || {
                let g = Group::new(f.clone());
                let mut sampler = WalkSampler::new(*gens, &WalkSpec { seed: derive_seed(spec.seed, t as u64), ..*spec });
                while !stop.load(Ordering::Relaxed) && samples.fetch_add(1, Ordering::Relaxed) < budget {
                    let Some((v, m)) = sampler.next_sample(&g) else { break };
                    let (left, right) = codes.codes(f, &m);
                    if is_distinguished(right, dp_bits) {
                        let other = shard(store, right).lock().expect("store lock").get(&right).cloned();
                        if let Some((u, mu)) = other {
                            if u != v {
                                let product = v.concat(&u);
                                let hash = g.mul(&m, &mu);
                                if accept_hit(&product, &hash) {
                                    let mut slot = found.lock().expect("result lock");
                                    if slot.is_none() {
                                        *slot = Some(ParallelHit { u, v, product, hash, work: 0, samples: 0 });
                                    }
                                    stop.store(true, Ordering::Relaxed);
                                    break;
                                }
                            }
                        }
                    }
                    if is_distinguished(left, dp_bits) {
                        shard(store, left).lock().expect("store lock").entry(left).or_insert((v, m));
                    }
                }
                work.fetch_add(g.work(), Ordering::Relaxed);
            });
        }
    });

    let mut hit = found.into_inner().expect("result lock").ok_or(Error::Exhausted)?;
    hit.work = work.load(Ordering::Relaxed);
    hit.samples = samples.load(Ordering::Relaxed).min(budget);
    Ok(hit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sl2c_core::engine::TCodes;
    use sl2c_core::words::hash;

    #[test]
    fn parallel_hits_land_in_t() {
        let f = Field::new(2, 20).unwrap();
        let g = Group::new(f.clone());
        let a = crate::presets::appendix_b(&f);
        let spec = WalkSpec { segment_length: 16, ..WalkSpec::for_field(&f, 3) };
        for threads in [1, 4] {
            for bits in [0, 3] {
                let hit = parallel_mitm(&f, &a, &TCodes, |_, _| true, &spec, threads, bits, 1 << 22).unwrap();
                let m = hash(&g, &a, &hit.product);
                assert_eq!(m, hit.hash);
                assert!(m.c.is_zero());
                assert!(hit.work >= hit.samples);
            }
        }
    }

    #[test]
    fn budget_exhaustion() {
        let f = Field::new(65521, 1).unwrap();
        let a = crate::presets::appendix_b(&f);
        let spec = WalkSpec::for_field(&f, 1);
        assert_eq!(parallel_mitm(&f, &a, &TCodes, |_, _| true, &spec, 2, 0, 10).unwrap_err(), Error::Exhausted);
    }
}
