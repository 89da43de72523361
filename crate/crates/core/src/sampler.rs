//! The population `S` of sanitized/auxiliary node pairs and stratified
//! reservoir subsamples drawn from it in a single pass.
//!
//! `S` is the full cross product `V_san × V_aux`. Pairs of the same original
//! node are identical (label 1), everything else is non-identical (label 0).
//! The population is never materialized: non-identical pairs are visited in
//! the order of a keyed Feistel permutation over pair indices.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::seed;
use crate::split::OverlapSplit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PairExample {
    pub san: NodeId,
    pub aux: NodeId,
    /// 1 for identical, 0 for non-identical.
    pub label: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePlan {
    /// Number of subsamples `ℓ`.
    pub subsamples: usize,
    pub subsample_size: usize,
    pub seed: u64,
    /// Upper bound on streamed non-identical pairs.
    pub negative_cap: Option<u64>,
}

impl Default for SamplePlan {
    fn default() -> Self {
        SamplePlan {
            subsamples: 1000,
            subsample_size: 2000,
            seed: 0,
            negative_cap: Some(5_000_000),
        }
    }
}

impl SamplePlan {
    pub fn validate(&self) -> Result<()> {
        if self.subsamples == 0 {
            return Err(Error::invalid("need at least one subsample"));
        }
        if self.subsample_size < 20 {
            return Err(Error::invalid(format!(
                "subsample size {} is below the minimum of 20",
                self.subsample_size
            )));
        }
        Ok(())
    }
}

/// Classic Algorithm R reservoir with its own RNG stream.
#[derive(Debug, Clone)]
pub struct Reservoir<T> {
    capacity: usize,
    items: Vec<T>,
    seen: u64,
    rng: seed::Rng,
}

impl<T> Reservoir<T> {
    pub fn new(capacity: usize, seed: u64) -> Self {
        Reservoir {
            capacity,
            items: Vec::with_capacity(capacity),
            seen: 0,
            rng: seed::rng(seed),
        }
    }

    pub fn offer(&mut self, item: T) {
        self.seen += 1;
        if self.items.len() < self.capacity {
            self.items.push(item);
        } else if self.capacity > 0 {
            let j = self.rng.gen_range(0..self.seen);
            if (j as usize) < self.capacity {
                self.items[j as usize] = item;
            }
        }
    }

    pub fn seen(&self) -> u64 {
        self.seen
    }

    pub fn items(&self) -> &[T] {
        &self.items
    }

    pub fn into_items(self) -> Vec<T> {
        self.items
    }
}

/// Keyed pseudo-random permutation of `[0, domain)`: a balanced four-round
/// Feistel network on the next even power of two, cycle-walked into range.
#[derive(Debug, Clone, Copy)]
pub struct IndexPermutation {
    domain: u64,
    half_bits: u32,
    key: u64,
}

impl IndexPermutation {
    pub fn new(domain: u64, key: u64) -> Self {
        let bits = (64 - domain.saturating_sub(1).leading_zeros()).max(2);
        IndexPermutation {
            domain,
            half_bits: bits.div_ceil(2),
            key,
        }
    }

    fn encrypt(&self, x: u64) -> u64 {
        let mask = (1u64 << self.half_bits) - 1;
        let (mut l, mut r) = (x >> self.half_bits, x & mask);
        for round in 0..4u64 {
            let f = seed::mix(self.key ^ round.wrapping_mul(0x9E37_79B9), r) & mask;
            (l, r) = (r, l ^ f);
        }
        (l << self.half_bits) | r
    }

    pub fn apply(&self, i: u64) -> u64 {
        debug_assert!(i < self.domain);
        let mut y = self.encrypt(i);
        while y >= self.domain {
            y = self.encrypt(y);
        }
        y
    }
}

/// Identical and non-identical pairs of one split.
#[derive(Debug, Clone)]
pub struct PairPopulation {
    san_nodes: usize,
    aux_nodes: usize,
    san_origin: Vec<NodeId>,
    aux_origin: Vec<NodeId>,
    positives: Vec<PairExample>,
}

impl PairPopulation {
    pub fn new(split: &OverlapSplit) -> Result<PairPopulation> {
        if split.identity.is_empty() {
            return Err(Error::EmptyOverlap);
        }
        Ok(PairPopulation {
            san_nodes: split.san.node_count(),
            aux_nodes: split.aux.node_count(),
            san_origin: split.san_origin.clone(),
            aux_origin: split.aux_origin.clone(),
            positives: split
                .identity
                .iter()
                .map(|&(san, aux)| PairExample { san, aux, label: 1 })
                .collect(),
        })
    }

    /// `|S| = |V_san|·|V_aux|`.
    pub fn size(&self) -> u64 {
        self.san_nodes as u64 * self.aux_nodes as u64
    }

    pub fn positive_count(&self) -> u64 {
        self.positives.len() as u64
    }

    pub fn negative_count(&self) -> u64 {
        self.size() - self.positive_count()
    }

    /// Identical pairs (shuffled) followed by up to `negative_cap`
    /// non-identical pairs in permuted order.
    pub fn stream(&self, seed: u64, negative_cap: Option<u64>) -> PairStream<'_> {
        let mut positives = self.positives.clone();
        positives.shuffle(&mut seed::rng(seed::derive(seed, 0)));
        PairStream {
            population: self,
            positives: positives.into_iter(),
            permutation: IndexPermutation::new(self.size(), seed::derive(seed, 1)),
            next_index: 0,
            negatives_left: negative_cap.unwrap_or(u64::MAX).min(self.negative_count()),
        }
    }
}

pub struct PairStream<'a> {
    population: &'a PairPopulation,
    positives: std::vec::IntoIter<PairExample>,
    permutation: IndexPermutation,
    next_index: u64,
    negatives_left: u64,
}

impl Iterator for PairStream<'_> {
    type Item = PairExample;

    fn next(&mut self) -> Option<PairExample> {
        if let Some(p) = self.positives.next() {
            return Some(p);
        }
        let pop = self.population;
        while self.negatives_left > 0 && self.next_index < pop.size() {
            let idx = self.permutation.apply(self.next_index);
            self.next_index += 1;
            let san = (idx / pop.aux_nodes as u64) as usize;
            let aux = (idx % pop.aux_nodes as u64) as usize;
            if pop.san_origin[san] != pop.aux_origin[aux] {
                self.negatives_left -= 1;
                return Some(PairExample { san, aux, label: 0 });
            }
        }
        None
    }
}

#[derive(Debug, Clone)]
pub struct Subsamples {
    pub samples: Vec<Vec<PairExample>>,
    pub population_size: u64,
    pub negatives_streamed: u64,
    pub positive_quota: usize,
}

/// Draws `plan.subsamples` stratified reservoirs of `plan.subsample_size`
/// pairs in one pass over the stream. Identical pairs fill
/// `min(|V_α|, size/2)` slots (more if non-identical pairs run short) and
/// non-identical pairs the rest; each reservoir owns an independent RNG.
pub fn reservoir_subsamples(population: &PairPopulation, plan: &SamplePlan) -> Result<Subsamples> {
    plan.validate()?;
    let size = plan.subsample_size;
    let pos_avail = population.positive_count();
    let neg_avail = population
        .negative_count()
        .min(plan.negative_cap.unwrap_or(u64::MAX));
    if pos_avail + neg_avail < size as u64 {
        return Err(Error::PopulationTooSmall {
            population: pos_avail + neg_avail,
            needed: size,
        });
    }
    if pos_avail < 2 {
        return Err(Error::invalid(format!(
            "overlap of {pos_avail} node(s) cannot give every subsample two identical pairs"
        )));
    }
    let floor = (size as u64).saturating_sub(neg_avail);
    let pos_quota = pos_avail.min((size as u64 / 2).max(floor)) as usize;
    let neg_quota = size - pos_quota;

    let mut reservoirs: Vec<(Reservoir<PairExample>, Reservoir<PairExample>)> = (0..plan.subsamples)
        .map(|i| {
            let s = seed::derive(plan.seed, i as u64 + 1);
            (
                Reservoir::new(pos_quota, seed::derive(s, 0)),
                Reservoir::new(neg_quota, seed::derive(s, 1)),
            )
        })
        .collect();

    const CHUNK: usize = 1 << 16;
    let mut stream = population.stream(seed::derive(plan.seed, 0), plan.negative_cap);
    let mut chunk = Vec::with_capacity(CHUNK);
    let mut negatives = 0u64;
    loop {
        chunk.clear();
        chunk.extend(stream.by_ref().take(CHUNK));
        if chunk.is_empty() {
            break;
        }
        negatives += chunk.iter().filter(|p| p.label == 0).count() as u64;
        reservoirs.par_iter_mut().for_each(|(pos, neg)| {
            for &p in &chunk {
                if p.label == 1 {
                    pos.offer(p);
                } else {
                    neg.offer(p);
                }
            }
        });
    }

    let samples = reservoirs
        .into_iter()
        .map(|(pos, neg)| {
            let mut s = pos.into_items();
            s.extend(neg.into_items());
            s
        })
        .collect();
    Ok(Subsamples {
        samples,
        population_size: population.size(),
        negatives_streamed: negatives,
        positive_quota: pos_quota,
    })
}

pub fn write_subsample_csv<W: Write>(mut w: W, sample: &[PairExample]) -> std::io::Result<()> {
    writeln!(w, "san_id,aux_id,label")?;
    for p in sample {
        writeln!(w, "{},{},{}", p.san, p.aux, p.label)?;
    }
    Ok(())
}
