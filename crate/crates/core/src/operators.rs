//! Conditional expectation operators, Riesz homomorphisms fixing `e`, and
//! validated conditional-expectation-preserving systems.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{check_dim, Component, Element, SpaceDescriptor};
use crate::rational::{self, Rational};

/// Dense `n x n` matrix of exact rationals, row-major (`m[i][j]` is row `i`).
pub type Matrix = Vec<Vec<Rational>>;

/// Weighted block averaging: `(Tf)_i = sum_{j in B(i)} w_j f_j / sum_{j in B(i)} w_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionalExpectationOp {
    blocks: Vec<Vec<usize>>,
    weights: Vec<Rational>,
    block_of: Vec<usize>,
    block_mass: Vec<Rational>,
}

impl ConditionalExpectationOp {
    pub fn new(blocks: Vec<Vec<usize>>, weights: Vec<Rational>) -> Result<Self> {
        let n = weights.len();
        SpaceDescriptor::new(n)?;
        if let Some(index) = weights.iter().position(|w| !w.is_positive()) {
            return Err(Error::NonPositiveWeight {
                index,
                value: rational::format(&weights[index]),
            });
        }
        let mut block_of = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {b} is empty")));
            }
            for &i in block {
                if i >= n {
                    return Err(Error::InvalidPartition(format!(
                        "index {i} in block {b} is outside 0..{n}"
                    )));
                }
                if block_of[i] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "index {i} appears in blocks {} and {b}",
                        block_of[i]
                    )));
                }
                block_of[i] = b;
            }
        }
        if let Some(i) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::InvalidPartition(format!("index {i} is not covered")));
        }
        let block_mass = blocks
            .iter()
            .map(|block| block.iter().map(|&i| &weights[i]).sum())
            .collect();
        Ok(ConditionalExpectationOp {
            blocks,
            weights,
            block_of,
            block_mass,
        })
    }

    /// One block with uniform weights: the global mean.
    pub fn global_mean(n: usize) -> Result<Self> {
        Self::new(vec![(0..n).collect()], vec![rational::one(); n])
    }

    /// Singleton blocks: `T = I`.
    pub fn identity(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| vec![i]).collect(), vec![rational::one(); n])
    }

    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn space(&self) -> SpaceDescriptor {
        SpaceDescriptor::new(self.dimension()).expect("validated nonempty")
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.block_of[i]
    }

    pub fn block_mass(&self, b: usize) -> &Rational {
        &self.block_mass[b]
    }

    pub fn apply(&self, f: &Element) -> Result<Element> {
        check_dim(self.dimension(), f.dimension())?;
        let means: Vec<Rational> = self
            .blocks
            .iter()
            .zip(&self.block_mass)
            .map(|(block, mass)| {
                let s: Rational = block.iter().map(|&j| &self.weights[j] * f.get(j)).sum();
                s / mass
            })
            .collect();
        Element::new(self.block_of.iter().map(|&b| means[b].clone()).collect())
    }

    /// `T p` for a component: per block, the weight of `p` over the block mass.
    pub fn apply_component(&self, p: &Component) -> Result<Element> {
        check_dim(self.dimension(), p.dimension())?;
        let mut sums = vec![Rational::zero(); self.blocks.len()];
        for j in p.ones() {
            sums[self.block_of[j]] += &self.weights[j];
        }
        let means: Vec<Rational> = sums
            .into_iter()
            .zip(&self.block_mass)
            .map(|(s, mass)| if s.is_zero() { s } else { s / mass })
            .collect();
        Element::new(self.block_of.iter().map(|&b| means[b].clone()).collect())
    }

    /// `T delta_j`: `w_j / W_B` on the block `B` of `j`.
    pub fn apply_basis(&self, j: usize) -> Element {
        let b = self.block_of[j];
        let v = &self.weights[j] / &self.block_mass[b];
        Element::new(
            self.block_of
                .iter()
                .map(|&bi| if bi == b { v.clone() } else { Rational::zero() })
                .collect(),
        )
        .expect("nonempty")
    }

    /// `f` is in the range of `T` iff it is constant on every block.
    pub fn is_fixed(&self, f: &Element) -> Result<bool> {
        check_dim(self.dimension(), f.dimension())?;
        Ok(self
            .blocks
            .iter()
            .all(|block| block.iter().all(|&i| f.get(i) == f.get(block[0]))))
    }

    pub fn is_identity(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    pub fn matrix(&self) -> Matrix {
        let n = self.dimension();
        let mut m = vec![vec![Rational::zero(); n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            let b = self.block_of[i];
            for &j in &self.blocks[b] {
                row[j] = &self.weights[j] / &self.block_mass[b];
            }
        }
        m
    }
}

/// Composition operator `(Sf)_i = f_{sigma(i)}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RieszHomMap {
    sigma: Vec<usize>,
}

impl RieszHomMap {
    pub fn new(sigma: Vec<usize>) -> Result<Self> {
        let n = sigma.len();
        SpaceDescriptor::new(n)?;
        if let Some(index) = sigma.iter().position(|&v| v >= n) {
            return Err(Error::MapOutOfRange {
                index,
                value: sigma[index],
                dimension: n,
            });
        }
        Ok(RieszHomMap { sigma })
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new((0..n).collect())
    }

    /// `sigma(i) = i + 1 mod n`.
    pub fn rotation(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| (i + 1) % n).collect())
    }

    pub fn dimension(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn image(&self, i: usize) -> usize {
        self.sigma[i]
    }

    pub fn is_identity(&self) -> bool {
        self.sigma.iter().enumerate().all(|(i, &s)| i == s)
    }

    pub fn apply(&self, f: &Element) -> Result<Element> {
        check_dim(self.dimension(), f.dimension())?;
        Element::new(self.sigma.iter().map(|&s| f.get(s).clone()).collect())
    }

    pub fn apply_component(&self, p: &Component) -> Result<Component> {
        check_dim(self.dimension(), p.dimension())?;
        Component::new(self.sigma.iter().map(|&s| p.contains(s)).collect())
    }

    /// `S^k` as an index map: `i -> sigma^k(i)`.
    pub fn power(&self, k: usize) -> RieszHomMap {
        let mut acc: Vec<usize> = (0..self.dimension()).collect();
        for _ in 0..k {
            acc = acc.iter().map(|&i| self.sigma[i]).collect();
        }
        RieszHomMap { sigma: acc }
    }

    pub fn matrix(&self) -> Matrix {
        let n = self.dimension();
        let mut m = vec![vec![Rational::zero(); n]; n];
        for (i, &s) in self.sigma.iter().enumerate() {
            m[i][s] = rational::one();
        }
        m
    }
}

/// A validated system `(E, T, S, e)` with `TS = T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ceps {
    t: ConditionalExpectationOp,
    s: RieszHomMap,
}

impl Ceps {
    pub fn new(t: ConditionalExpectationOp, s: RieszHomMap) -> Result<Self> {
        validate_ceps(t, s)
    }

    pub fn t(&self) -> &ConditionalExpectationOp {
        &self.t
    }

    pub fn s(&self) -> &RieszHomMap {
        &self.s
    }

    pub fn dimension(&self) -> usize {
        self.t.dimension()
    }

    pub fn space(&self) -> SpaceDescriptor {
        self.t.space()
    }
}

pub fn apply_t(t: &ConditionalExpectationOp, f: &Element) -> Result<Element> {
    t.apply(f)
}

pub fn apply_s(s: &RieszHomMap, f: &Element) -> Result<Element> {
    s.apply(f)
}

/// Accepts iff `T S delta_j = T delta_j` for every basis component `delta_j`.
/// The witness on failure is the least `j` where `T S delta_j` loses mass.
///
/// `S delta_j` is the indicator of `sigma^{-1}(j)`, so `T S delta_j` on block
/// `B` is the weight of `sigma^{-1}(j) ∩ B` over the mass of `B`. The check is
/// therefore that, block by block, the preimage weight of `j` equals `w_j` when
/// `j` is in the block and vanishes otherwise.
pub fn validate_ceps(t: ConditionalExpectationOp, s: RieszHomMap) -> Result<Ceps> {
    check_dim(t.dimension(), s.dimension())?;
    let n = t.dimension();
    // preimage[j] = (block, weight) pairs of sigma^{-1}(j), accumulated per block.
    let mut preimage: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
    for i in 0..n {
        let j = s.image(i);
        let b = t.block_of(i);
        match preimage[j].iter_mut().find(|(bb, _)| *bb == b) {
            Some((_, w)) => *w += &t.weights()[i],
            None => preimage[j].push((b, t.weights()[i].clone())),
        }
    }
    // Both TS e and T e equal e, so any failure has some j where TS delta_j
    // falls below T delta_j on j's own block. The smallest such j is reported.
    let deficit = preimage.iter().enumerate().find(|(j, masses)| {
        let home = t.block_of(*j);
        let kept = masses.iter().find(|(b, _)| *b == home).map_or_else(Rational::zero, |(_, w)| w.clone());
        kept < t.weights()[*j]
    });
    let failing = deficit.map(|(j, _)| j).or_else(|| {
        preimage.iter().enumerate().position(|(j, masses)| {
            !(masses.len() == 1 && masses[0].0 == t.block_of(j) && masses[0].1 == t.weights()[j])
        })
    });
    if let Some(j) = failing {
        let delta = Component::basis(n, j).to_element();
        let ts = t.apply(&s.apply(&delta)?)?;
        let tj = t.apply_basis(j);
        return Err(Error::NotMeasurePreserving { witness: j, ts, t: tj });
    }
    Ok(Ceps { t, s })
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, Vec::len);
    let mut out = vec![vec![Rational::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                if !b[l][j].is_zero() {
                    out[i][j] += &a[i][l] * &b[l][j];
                }
            }
        }
    }
    out
}
