//! Seeded generation of valid systems.
//!
//! Randomness comes from `ChaCha8Rng` seeded with `seed_from_u64`, whose output
//! stream is fixed across platforms. Suite runs give system `i` its own stream
//! (`set_stream(i)`), so a corpus does not depend on evaluation order.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{validate_ceps, Ceps, ConditionalExpectationOp, RieszHomMap};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// Random partition, `S` permutes each block, weights constant on cycles.
    BlockPermutation,
    /// One block, `S` any permutation, weights constant on cycles.
    Global,
    /// `S = I` with an arbitrary strictly positive `T`.
    Identity,
}

impl Profile {
    pub const ALL: [Profile; 3] = [Profile::BlockPermutation, Profile::Global, Profile::Identity];

    pub fn name(&self) -> &'static str {
        match self {
            Profile::BlockPermutation => "block-permutation",
            Profile::Global => "global",
            Profile::Identity => "identity",
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Profile::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown profile {s:?}")))
    }
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A system of random dimension in `1..=max_dim`.
pub fn generate_ceps(seed: u64, max_dim: usize, profile: Profile) -> Result<Ceps> {
    if max_dim == 0 {
        return Err(Error::InvalidConfig("max_dim must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_dim);
    Ok(generate_with_rng(&mut rng, n, profile))
}

/// A system of exactly dimension `n`.
pub fn generate_dim(seed: u64, n: usize, profile: Profile) -> Result<Ceps> {
    if n == 0 {
        return Err(Error::InvalidConfig("dimension must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(generate_with_rng(&mut rng, n, profile))
}

pub fn generate_with_rng<R: Rng>(rng: &mut R, n: usize, profile: Profile) -> Ceps {
    match profile {
        Profile::Identity => {
            let discrete = rng.gen_bool(0.5);
            generate_identity(rng, n, discrete)
        }
        _ => retry(|| {
            let blocks = match profile {
                Profile::BlockPermutation => random_partition(rng, n),
                _ => vec![(0..n).collect()],
            };
            let mut sigma = vec![0; n];
            for block in &blocks {
                let image = if rng.gen_bool(0.5) {
                    cyclic_arrangement(rng, block)
                } else {
                    let mut img = block.clone();
                    img.shuffle(rng);
                    img
                };
                for (&i, &j) in block.iter().zip(&image) {
                    sigma[i] = j;
                }
            }
            let weights = cycle_constant_weights(rng, &sigma);
            (blocks, weights, sigma)
        }),
    }
}

/// `S = I`; the partition is the discrete one (`T = I`) when `discrete`.
pub fn generate_identity<R: Rng>(rng: &mut R, n: usize, discrete: bool) -> Ceps {
    retry(|| {
        let blocks = if discrete {
            (0..n).map(|i| vec![i]).collect()
        } else {
            random_partition(rng, n)
        };
        let raw: Vec<Rational> = (0..n).map(|_| rational::int(rng.gen_range(1..=9))).collect();
        (blocks, normalize(raw), (0..n).collect())
    })
}

fn retry(mut build: impl FnMut() -> (Vec<Vec<usize>>, Vec<Rational>, Vec<usize>)) -> Ceps {
    loop {
        let (blocks, weights, sigma) = build();
        let built = ConditionalExpectationOp::new(blocks, weights)
            .and_then(|t| RieszHomMap::new(sigma).and_then(|s| validate_ceps(t, s)));
        if let Ok(sys) = built {
            return sys;
        }
    }
}

/// Blocks sorted internally and by least element.
fn random_partition<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut current = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        current.push(i);
        if pos + 1 == n || rng.gen_bool(0.5) {
            current.sort_unstable();
            blocks.push(std::mem::take(&mut current));
        }
    }
    blocks.sort_by_key(|b| b[0]);
    blocks
}

/// Images for a single cycle through all of `block`.
fn cyclic_arrangement<R: Rng>(rng: &mut R, block: &[usize]) -> Vec<usize> {
    let mut order = block.to_vec();
    order.shuffle(rng);
    let mut image = vec![0; block.len()];
    for k in 0..order.len() {
        let from = block.iter().position(|&x| x == order[k]).expect("member");
        image[from] = order[(k + 1) % order.len()];
    }
    image
}

/// Weights constant along every cycle of the permutation `sigma`, normalised to sum 1.
fn cycle_constant_weights<R: Rng>(rng: &mut R, sigma: &[usize]) -> Vec<Rational> {
    let n = sigma.len();
    let mut raw: Vec<Option<Rational>> = vec![None; n];
    for start in 0..n {
        if raw[start].is_some() {
            continue;
        }
        let w = rational::int(rng.gen_range(1..=9));
        let mut i = start;
        while raw[i].is_none() {
            raw[i] = Some(w.clone());
            i = sigma[i];
        }
    }
    normalize(raw.into_iter().map(|w| w.expect("every index is on a cycle")).collect())
}

fn normalize(raw: Vec<Rational>) -> Vec<Rational> {
    let total: Rational = raw.iter().sum();
    raw.into_iter().map(|w| w / &total).collect()
}
