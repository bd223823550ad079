//! Decision procedures for ergodicity and conditional weak mixing, density-zero
//! checks, and constructive Koopman-von Neumann extraction.
//!
//! Every sequence `a_k = T((S^k p) q)` of a finite system is eventually
//! periodic, so its Cesaro limit is the period mean and the Cesaro limit of
//! `|a_k - alpha|` vanishes iff `a_k = alpha` on the whole periodic tail. Both
//! conditions are bilinear in `(p, q)`, so basis pairs `(delta_i, delta_j)`
//! decide them for all components.

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dynamics::{cesaro_limit, cesaro_limit_abs_dev, EventuallyPeriodic, FunctionalGraph, SystemDynamics};
use crate::error::{Error, Result};
use crate::lattice::{check_dim, Component, Element};
use crate::operators::Ceps;
use crate::rational::{self, Rational};

/// A checkpoint average must drop to at most this fraction of the previous one.
pub const DECAY_FACTOR: (i64, i64) = (9, 10);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    Ergodic,
    WeakMixing,
}

/// First failing basis pair in lexicographic `(i, j, k)` order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub i: usize,
    pub j: usize,
    /// For weak mixing: the first tail index `k >= K` with `a_k != alpha`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    /// Ergodic: `lim S_n-average - T delta_i T delta_j`. Weak mixing: the
    /// Cesaro limit of `|a_k - alpha|`.
    pub residual: Element,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErgodicDecision {
    /// Route A, `T = L_S`. Definitional.
    pub operator_equality: bool,
    /// Route B, basis-pair Cesaro limits.
    pub component_limits: bool,
    pub witness: Option<Witness>,
}

impl ErgodicDecision {
    pub fn ergodic(&self) -> bool {
        self.operator_equality
    }

    pub fn routes_agree(&self) -> bool {
        self.operator_equality == self.component_limits
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakMixingDecision {
    pub weak_mixing: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Routes {
    pub operator_equality: bool,
    pub component_limits: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixingReport {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub system_id: Option<String>,
    pub dimension: usize,
    pub ergodic: bool,
    pub weak_mixing: bool,
    pub invariant_dimension: usize,
    pub route_agreement: bool,
    pub routes: Routes,
    pub witnesses: Vec<Witness>,
}

impl MixingReport {
    /// Weak mixing without ergodicity, or disagreeing routes.
    pub fn has_defect(&self) -> bool {
        !self.route_agreement || (self.weak_mixing && !self.ergodic)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(id) = &self.system_id {
            out.push_str(&format!("system: {id}\n"));
        }
        out.push_str(&format!("dimension: {}\n", self.dimension));
        out.push_str(&format!("ergodic: {}\n", self.ergodic));
        out.push_str(&format!("weak_mixing: {}\n", self.weak_mixing));
        out.push_str(&format!("invariant_dimension: {}\n", self.invariant_dimension));
        out.push_str(&format!(
            "routes: operator_equality={} component_limits={} agree={}\n",
            self.routes.operator_equality, self.routes.component_limits, self.route_agreement
        ));
        for w in &self.witnesses {
            let kind = match w.kind {
                WitnessKind::Ergodic => "ergodic",
                WitnessKind::WeakMixing => "weak_mixing",
            };
            match w.k {
                Some(k) => out.push_str(&format!(
                    "witness {kind}: i={} j={} k={} residual={}\n",
                    w.i, w.j, k, w.residual
                )),
                None => out.push_str(&format!("witness {kind}: i={} j={} residual={}\n", w.i, w.j, w.residual)),
            }
        }
        out
    }
}

pub fn is_ergodic(sys: &Ceps) -> Result<ErgodicDecision> {
    is_ergodic_with(&SystemDynamics::new(sys))
}

/// `T = L_S` as exact matrices.
fn operator_equality(dynamics: &SystemDynamics<'_>) -> bool {
    dynamics.graph().ergodic_limit_matrix() == dynamics.system().t().matrix()
}

/// Basis pairs in closed form. With `delta_i, delta_j` basis components,
/// `T((S^k delta_i) delta_j) = [sigma^k(j) = i] T delta_j` and
/// `T delta_i T delta_j = lambda_ij T delta_j`, where `lambda_ij = w_i / W_B`
/// if `i, j` share the block `B` and `0` otherwise. Both decisions reduce to
/// comparing the orbit indicator `[sigma^k(j) = i]` with `lambda_ij`.
struct BasisPairs<'a> {
    sys: &'a Ceps,
    pre: usize,
    /// `sigma^k(j)` for `k` in `[pre, pre + L_j)`, `L_j` the length of `j`'s cycle.
    tails: Vec<Vec<usize>>,
}

impl<'a> BasisPairs<'a> {
    fn new(dynamics: &SystemDynamics<'a>) -> Self {
        let sys = dynamics.system();
        let graph = dynamics.graph();
        let pre = graph.preperiod_bound();
        let tails = (0..sys.dimension())
            .map(|j| {
                let len = graph.cycles()[graph.terminal_cycle(j)].len();
                let mut x = j;
                for _ in 0..pre {
                    x = sys.s().image(x);
                }
                (0..len)
                    .map(|_| {
                        let here = x;
                        x = sys.s().image(x);
                        here
                    })
                    .collect()
            })
            .collect();
        BasisPairs { sys, pre, tails }
    }

    fn lambda(&self, i: usize, j: usize) -> Rational {
        let t = self.sys.t();
        if t.block_of(i) == t.block_of(j) {
            &t.weights()[i] / t.block_mass(t.block_of(i))
        } else {
            rational::zero()
        }
    }

    /// Cesaro limit of `[sigma^k(j) = i]`.
    fn frequency(&self, i: usize, j: usize) -> Rational {
        let tail = &self.tails[j];
        let hits = tail.iter().filter(|&&x| x == i).count();
        rational::ratio(hits as i64, tail.len() as i64)
    }

    /// First tail offset where `[sigma^k(j) = i] != lambda_ij`.
    fn first_tail_mismatch(&self, i: usize, j: usize) -> Option<usize> {
        let lambda = self.lambda(i, j);
        let (one, zero) = (rational::one(), rational::zero());
        self.tails[j]
            .iter()
            .position(|&x| if x == i { one != lambda } else { zero != lambda })
    }
}

fn is_ergodic_with(dynamics: &SystemDynamics<'_>) -> Result<ErgodicDecision> {
    let sys = dynamics.system();
    let n = sys.dimension();
    let pairs = BasisPairs::new(dynamics);
    let mut witness = None;
    'pairs: for i in 0..n {
        for j in 0..n {
            let gap = pairs.frequency(i, j) - pairs.lambda(i, j);
            if !gap.is_zero() {
                witness = Some(Witness {
                    kind: WitnessKind::Ergodic,
                    i,
                    j,
                    k: None,
                    residual: sys.t().apply_basis(j).scale(&gap),
                });
                break 'pairs;
            }
        }
    }
    Ok(ErgodicDecision {
        operator_equality: operator_equality(dynamics),
        component_limits: witness.is_none(),
        witness,
    })
}

pub fn is_weak_mixing(sys: &Ceps) -> Result<WeakMixingDecision> {
    is_weak_mixing_with(&SystemDynamics::new(sys))
}

fn is_weak_mixing_with(dynamics: &SystemDynamics<'_>) -> Result<WeakMixingDecision> {
    let sys = dynamics.system();
    let n = sys.dimension();
    let pairs = BasisPairs::new(dynamics);
    for i in 0..n {
        for j in 0..n {
            if let Some(r) = pairs.first_tail_mismatch(i, j) {
                return Ok(WeakMixingDecision {
                    weak_mixing: false,
                    witness: Some(weak_mixing_witness(dynamics, i, j, pairs.pre + r)?),
                });
            }
        }
    }
    Ok(WeakMixingDecision {
        weak_mixing: true,
        witness: None,
    })
}

fn weak_mixing_witness(dynamics: &SystemDynamics<'_>, i: usize, j: usize, k: usize) -> Result<Witness> {
    let sys = dynamics.system();
    let n = sys.dimension();
    let seq = dynamics.seq_t_skp_q(&Component::basis(n, i), &Component::basis(n, j))?;
    let alpha = sys.t().apply_basis(i).f_product(&sys.t().apply_basis(j))?;
    Ok(Witness {
        kind: WitnessKind::WeakMixing,
        i,
        j,
        k: Some(k),
        residual: cesaro_limit_abs_dev(&seq, &alpha)?,
    })
}

/// Reference form of [`is_ergodic`]: materializes every basis-pair sequence
/// `T((S^k delta_i) delta_j)` and compares its Cesaro limit with the target.
pub fn is_ergodic_by_sequences(sys: &Ceps) -> Result<ErgodicDecision> {
    let dynamics = SystemDynamics::new(sys);
    let n = sys.dimension();
    let t_basis: Vec<Element> = (0..n).map(|i| sys.t().apply_basis(i)).collect();
    let mut witness = None;
    'pairs: for i in 0..n {
        let p = Component::basis(n, i);
        for j in 0..n {
            let seq = dynamics.seq_t_skp_q(&p, &Component::basis(n, j))?;
            let limit = cesaro_limit(&seq)?;
            let target = t_basis[i].f_product(&t_basis[j])?;
            if limit != target {
                witness = Some(Witness {
                    kind: WitnessKind::Ergodic,
                    i,
                    j,
                    k: None,
                    residual: limit.sub(&target)?,
                });
                break 'pairs;
            }
        }
    }
    Ok(ErgodicDecision {
        operator_equality: operator_equality(&dynamics),
        component_limits: witness.is_none(),
        witness,
    })
}

/// Reference form of [`is_weak_mixing`] over materialized sequences.
pub fn is_weak_mixing_by_sequences(sys: &Ceps) -> Result<WeakMixingDecision> {
    let dynamics = SystemDynamics::new(sys);
    let n = sys.dimension();
    let t_basis: Vec<Element> = (0..n).map(|i| sys.t().apply_basis(i)).collect();
    for i in 0..n {
        let p = Component::basis(n, i);
        for j in 0..n {
            let seq = dynamics.seq_t_skp_q(&p, &Component::basis(n, j))?;
            let alpha = t_basis[i].f_product(&t_basis[j])?;
            if let Some(r) = seq.period().iter().position(|a| a != &alpha) {
                return Ok(WeakMixingDecision {
                    weak_mixing: false,
                    witness: Some(weak_mixing_witness(&dynamics, i, j, seq.preperiod().len() + r)?),
                });
            }
        }
    }
    Ok(WeakMixingDecision {
        weak_mixing: true,
        witness: None,
    })
}

pub fn analyze(sys: &Ceps) -> Result<MixingReport> {
    let dynamics = SystemDynamics::new(sys);
    let erg = is_ergodic_with(&dynamics)?;
    let wm = is_weak_mixing_with(&dynamics)?;
    let witnesses = erg.witness.iter().chain(wm.witness.iter()).cloned().collect();
    Ok(MixingReport {
        system_id: None,
        dimension: sys.dimension(),
        ergodic: erg.ergodic(),
        weak_mixing: wm.weak_mixing,
        invariant_dimension: dynamics.graph().invariant_dimension(),
        route_agreement: erg.routes_agree(),
        routes: Routes {
            operator_equality: erg.operator_equality,
            component_limits: erg.component_limits,
        },
        witnesses,
    })
}

/// Both decisions by brute force over all `2^n x 2^n` component pairs.
/// Returns `(ergodic, weak_mixing)`.
pub fn exhaustive_component_decisions(sys: &Ceps) -> Result<(bool, bool)> {
    let n = sys.dimension();
    if n > 10 {
        return Err(Error::InvalidConfig(format!(
            "exhaustive component enumeration is capped at n <= 10 (got {n})"
        )));
    }
    let dynamics = SystemDynamics::new(sys);
    let space = sys.space();
    let comps: Vec<Component> = space.components().collect();
    let t_comps: Vec<Element> = comps
        .iter()
        .map(|c| sys.t().apply(&c.to_element()))
        .collect::<Result<_>>()?;
    let (mut ergodic, mut weak_mixing) = (true, true);
    for (p, tp) in comps.iter().zip(&t_comps) {
        for (q, tq) in comps.iter().zip(&t_comps) {
            let seq = dynamics.seq_t_skp_q(p, q)?;
            let alpha = tp.f_product(tq)?;
            if cesaro_limit(&seq)? != alpha {
                ergodic = false;
            }
            if !cesaro_limit_abs_dev(&seq, &alpha)?.is_zero() {
                weak_mixing = false;
            }
        }
    }
    Ok((ergodic, weak_mixing))
}

/// A sequence of components: exactly eventually periodic, or a finite prefix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComponentSeq {
    Exact(EventuallyPeriodic<Component>),
    Prefix(Vec<Component>),
}

impl ComponentSeq {
    pub fn dimension(&self) -> Result<usize> {
        let mut all: Box<dyn Iterator<Item = &Component>> = match self {
            ComponentSeq::Exact(s) => Box::new(s.preperiod().iter().chain(s.period())),
            ComponentSeq::Prefix(v) => Box::new(v.iter()),
        };
        let n = all.next().ok_or(Error::EmptySequence)?.dimension();
        for c in all {
            check_dim(n, c.dimension())?;
        }
        Ok(n)
    }

    /// The first `len` terms (fewer if a prefix is shorter).
    pub fn prefix(&self, len: usize) -> Vec<Component> {
        match self {
            ComponentSeq::Exact(s) => s.prefix(len),
            ComponentSeq::Prefix(v) => v.iter().take(len).cloned().collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: usize,
    pub average: Element,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DensityCertificate {
    /// Decided: the Cesaro limit is the period mean.
    Exact { limit: Element, density_zero: bool },
    /// Diagnostic only: running densities `(1/n) sum_{k<n} p_k` at checkpoints.
    Prefix {
        horizon: usize,
        checkpoints: Vec<Checkpoint>,
        consistent_with_density_zero: bool,
    },
}

impl DensityCertificate {
    pub fn is_density_zero(&self) -> bool {
        match self {
            DensityCertificate::Exact { density_zero, .. } => *density_zero,
            DensityCertificate::Prefix {
                consistent_with_density_zero,
                ..
            } => *consistent_with_density_zero,
        }
    }

    /// Running density at the horizon (prefix mode) or the exact limit.
    pub fn final_density(&self) -> &Element {
        match self {
            DensityCertificate::Exact { limit, .. } => limit,
            DensityCertificate::Prefix { checkpoints, .. } => {
                &checkpoints.last().expect("at least one checkpoint").average
            }
        }
    }
}

/// `horizon / 10^k` for every `k` with a positive result, ascending, ending at `horizon`.
pub fn checkpoints(horizon: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = horizon;
    while n >= 1 {
        out.push(n);
        n /= 10;
    }
    out.reverse();
    out.dedup();
    out
}

/// First coordinate whose running average fails to decay over the last
/// decade: positive at the horizon `N` and above `DECAY_FACTOR` times the
/// average at `N / 10` (or positive with no earlier checkpoint).
/// Early transients are ignored.
fn first_stall(points: &[Checkpoint]) -> Option<(usize, usize)> {
    let factor = rational::ratio(DECAY_FACTOR.0, DECAY_FACTOR.1);
    let last = points.last()?;
    let prev = points.len().checked_sub(2).map(|t| &points[t]);
    (0..last.average.dimension())
        .find(|&i| {
            let v = last.average.get(i);
            v.is_positive() && prev.is_none_or(|p| v > &(p.average.get(i) * &factor))
        })
        .map(|i| (last.n, i))
}

fn running_averages(values: &[Element], horizon: usize) -> Result<Vec<Checkpoint>> {
    let marks = checkpoints(horizon);
    let mut out = Vec::with_capacity(marks.len());
    let mut acc = values[0].space().zero();
    let mut next = 0;
    for (k, v) in values.iter().take(horizon).enumerate() {
        acc = acc.add(v)?;
        if k + 1 == marks[next] {
            out.push(Checkpoint {
                n: k + 1,
                average: acc.scale(&rational::ratio(1, (k + 1) as i64)),
            });
            next += 1;
            if next == marks.len() {
                break;
            }
        }
    }
    Ok(out)
}

fn running_densities(comps: &[Component], horizon: usize) -> Vec<Checkpoint> {
    let marks = checkpoints(horizon);
    let dim = comps[0].dimension();
    let mut counts = vec![0i64; dim];
    let mut out = Vec::with_capacity(marks.len());
    let mut next = 0;
    for (k, c) in comps.iter().take(horizon).enumerate() {
        for i in c.ones() {
            counts[i] += 1;
        }
        if k + 1 == marks[next] {
            let n = (k + 1) as i64;
            out.push(Checkpoint {
                n: k + 1,
                average: Element::new(counts.iter().map(|&c| rational::ratio(c, n)).collect())
                    .expect("dim >= 1"),
            });
            next += 1;
            if next == marks.len() {
                break;
            }
        }
    }
    out
}

/// Exact mode decides density zero; prefix mode reports running densities up to
/// `horizon` (default: the whole prefix) and a non-proof verdict.
pub fn density_zero_check(seq: &ComponentSeq, horizon: Option<usize>) -> Result<DensityCertificate> {
    seq.dimension()?;
    match seq {
        ComponentSeq::Exact(s) => {
            let as_elements: Vec<Element> = s.period().iter().map(Component::to_element).collect();
            let limit = Element::sum(as_elements.iter())?.scale(&rational::ratio(1, as_elements.len() as i64));
            Ok(DensityCertificate::Exact {
                density_zero: s.period().iter().all(Component::is_zero),
                limit,
            })
        }
        ComponentSeq::Prefix(v) => {
            let horizon = horizon.unwrap_or(v.len());
            if horizon == 0 || horizon > v.len() {
                return Err(Error::InvalidConfig(format!(
                    "horizon {horizon} must be in 1..={}",
                    v.len()
                )));
            }
            let checkpoints = running_densities(v, horizon);
            Ok(DensityCertificate::Prefix {
                horizon,
                consistent_with_density_zero: first_stall(&checkpoints).is_none(),
                checkpoints,
            })
        }
    }
}

/// Threshold schedule `eps_1 > eps_2 > ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Thresholds {
    /// `eps_m = 1/m`, unbounded.
    Harmonic,
    /// A finite strictly decreasing list; the last level never switches.
    Custom(Vec<Rational>),
}

impl Thresholds {
    pub fn custom(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty()
            || !values.iter().all(Signed::is_positive)
            || values.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(Error::InvalidThresholds);
        }
        Ok(Thresholds::Custom(values))
    }

    /// `eps_m` for `m >= 1`; `None` past the end of a custom list.
    pub fn get(&self, m: usize) -> Option<Rational> {
        match self {
            Thresholds::Harmonic => Some(rational::ratio(1, m as i64)),
            Thresholds::Custom(v) => v.get(m - 1).cloned(),
        }
    }

    /// Smallest level `m` with `eps_m <= x`, for `x > 0`.
    fn entry_level(&self, x: &Rational) -> Option<usize> {
        if !x.is_positive() {
            return None;
        }
        match self {
            Thresholds::Harmonic => {
                // 1/m <= x  <=>  m >= 1/x
                let inv = x.recip();
                let m = inv.numer().div_ceil(inv.denom());
                let m: usize = m.try_into().unwrap_or(usize::MAX);
                Some(m.max(1))
            }
            Thresholds::Custom(v) => v.iter().position(|eps| eps <= x).map(|p| p + 1),
        }
    }

    fn has_level(&self, m: usize) -> bool {
        match self {
            Thresholds::Harmonic => true,
            Thresholds::Custom(v) => m <= v.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KvnExtraction {
    pub horizon: usize,
    /// `p_k` for `k < horizon`.
    pub components: Vec<Component>,
    /// Per coordinate, the switch points `n_1 < n_2 < ...`; level `m` is active
    /// on `[n_{m-1}, n_m)` with `n_0 = 0`.
    pub switch_points: Vec<Vec<usize>>,
    /// Running Cesaro averages of the input sequence.
    pub input_checkpoints: Vec<Checkpoint>,
    pub certificate: DensityCertificate,
}

impl KvnExtraction {
    /// Active level at index `k` for coordinate `i` (1-based).
    pub fn level(&self, i: usize, k: usize) -> usize {
        1 + self.switch_points[i].iter().filter(|&&s| s <= k).count()
    }

    /// Earliest switch point over all coordinates, or `0` if none switched.
    pub fn first_switch_point(&self) -> usize {
        self.switch_points
            .iter()
            .filter_map(|s| s.first().copied())
            .min()
            .unwrap_or(0)
    }

    /// `(e - p_k) f_k`.
    pub fn residual(&self, f: &Element, k: usize) -> Result<Element> {
        self.components[k].complement().project(f)
    }
}

/// Nested-threshold construction of a density-zero component sequence `(p_k)`
/// with `(e - p_k) f_k <= eps_{m(k)} e`.
///
/// Per coordinate: `J_m = {k : f_k >= eps_m}`; the switch point `n_m` is the
/// least index past `n_{m-1}` beyond which the running density of `J_{m+1}`
/// stays below `1/(m+1)` up to the horizon; `p_k = 1` iff `k` lies in `J_m` for
/// the level `m` active at `k`. Switching stops once no later index would enter
/// a new `J_m`, since `p` can no longer change.
pub fn kvn_extract(fseq: &[Element], horizon: usize, thresholds: &Thresholds) -> Result<KvnExtraction> {
    let first = fseq.first().ok_or(Error::EmptySequence)?;
    if horizon == 0 || horizon > fseq.len() {
        return Err(Error::InvalidConfig(format!(
            "horizon {horizon} must be in 1..={}",
            fseq.len()
        )));
    }
    let dim = first.dimension();
    let values = &fseq[..horizon];
    for v in values {
        check_dim(dim, v.dimension())?;
        if let Some(index) = v.coords().iter().position(Signed::is_negative) {
            return Err(Error::NegativeInput { index });
        }
    }

    let input_checkpoints = running_averages(values, horizon)?;
    if let Some((checkpoint, coordinate)) = first_stall(&input_checkpoints) {
        let average = input_checkpoints
            .iter()
            .find(|c| c.n == checkpoint)
            .map(|c| rational::format(c.average.get(coordinate)))
            .unwrap_or_default();
        return Err(Error::CesaroNotVanishing {
            checkpoint,
            coordinate,
            average,
        });
    }

    let mut bits = vec![vec![false; dim]; horizon];
    let mut switch_points = Vec::with_capacity(dim);
    for i in 0..dim {
        let entry: Vec<Option<usize>> = values.iter().map(|v| thresholds.entry_level(v.get(i))).collect();
        let switches = switch_points_for(&entry, thresholds);
        let mut level = 1;
        let mut next = 0;
        for (k, (e, row)) in entry.iter().zip(bits.iter_mut()).enumerate() {
            while next < switches.len() && switches[next] <= k {
                level += 1;
                next += 1;
            }
            row[i] = e.is_some_and(|m| m <= level);
        }
        switch_points.push(switches);
    }

    let components: Vec<Component> = bits
        .into_iter()
        .map(|b| Component::new(b).expect("dim >= 1"))
        .collect();
    let certificate = density_zero_check(&ComponentSeq::Prefix(components.clone()), Some(horizon))?;
    Ok(KvnExtraction {
        horizon,
        components,
        switch_points,
        input_checkpoints,
        certificate,
    })
}

fn switch_points_for(entry: &[Option<usize>], thresholds: &Thresholds) -> Vec<usize> {
    let horizon = entry.len();
    let mut switches = Vec::new();
    let mut prev = 0usize;
    let mut m = 1usize;
    loop {
        // Later indices that would join some J beyond the current level.
        let pending = entry[prev..].iter().any(|e| e.is_some_and(|l| l > m));
        if !pending || !thresholds.has_level(m + 1) {
            break;
        }
        let next_level = m + 1;
        // count[n] = |J_{m+1} ∩ [0, n)|
        let mut count = vec![0u64; horizon + 1];
        for (k, e) in entry.iter().enumerate() {
            count[k + 1] = count[k] + u64::from(e.is_some_and(|l| l <= next_level));
        }
        let bad = |n: usize| count[n] * next_level as u64 >= n as u64;
        let last_bad = (prev + 1..=horizon).rev().find(|&n| bad(n)).unwrap_or(prev);
        let switch = last_bad.max(prev) + 1;
        if switch >= horizon {
            break;
        }
        switches.push(switch);
        prev = switch;
        m = next_level;
    }
    switches
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KvnMixingCheck {
    /// `(e - r_k) |a_k - alpha| = 0` over the last full period before the horizon.
    pub holds: bool,
    pub extraction: KvnExtraction,
}

/// Runs the extraction on `|T((S^k p) q) - Tp Tq|`.
pub fn weak_mixing_via_kvn(sys: &Ceps, p: &Component, q: &Component, horizon: usize) -> Result<KvnMixingCheck> {
    let dynamics = SystemDynamics::new(sys);
    let seq = dynamics.seq_t_skp_q(p, q)?;
    let (pre, per) = (seq.preperiod().len(), seq.period().len());
    if horizon < pre + per {
        return Err(Error::InvalidConfig(format!(
            "horizon {horizon} is shorter than preperiod + period ({})",
            pre + per
        )));
    }
    let alpha = sys.t().apply(&p.to_element())?.f_product(&sys.t().apply(&q.to_element())?)?;
    let devs: Vec<Element> = (0..horizon)
        .map(|k| seq.value(k).sub(&alpha).map(|d| d.abs()))
        .collect::<Result<_>>()?;
    let extraction = kvn_extract(&devs, horizon, &Thresholds::Harmonic)?;
    let mut holds = true;
    for (k, d) in devs.iter().enumerate().skip(horizon - per) {
        if !extraction.residual(d, k)?.is_zero() {
            holds = false;
            break;
        }
    }
    Ok(KvnMixingCheck { holds, extraction })
}

/// `k -> T1((S1^k p1) q1) ⊗ T2((S2^k p2) q2)`.
pub fn product_sequence(
    a: &Ceps,
    (p1, q1): (&Component, &Component),
    b: &Ceps,
    (p2, q2): (&Component, &Component),
) -> Result<EventuallyPeriodic<Element>> {
    let s1 = SystemDynamics::new(a).seq_t_skp_q(p1, q1)?;
    let s2 = SystemDynamics::new(b).seq_t_skp_q(p2, q2)?;
    s1.zip_with(&s2, crate::tensor::tensor_elements)
}

/// Dimension of the space of `S`-invariant elements.
pub fn invariant_dimension(sys: &Ceps) -> usize {
    FunctionalGraph::new(sys.s()).invariant_dimension()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate_ceps, Profile};
    use crate::operators::{ConditionalExpectationOp, RieszHomMap};
    use crate::rational::ratio;

    fn rotation(n: usize) -> Ceps {
        Ceps::new(
            ConditionalExpectationOp::global_mean(n).unwrap(),
            RieszHomMap::rotation(n).unwrap(),
        )
        .unwrap()
    }

    fn identity_system(n: usize) -> Ceps {
        Ceps::new(
            ConditionalExpectationOp::identity(n).unwrap(),
            RieszHomMap::identity(n).unwrap(),
        )
        .unwrap()
    }

    fn squares(n: usize, dim: usize) -> Vec<Element> {
        (0..n)
            .map(|k| {
                let r = (k as f64).sqrt() as usize;
                let sq = (r.saturating_sub(1)..=r + 1).any(|s| s * s == k);
                Element::constant(dim, if sq { rational::one() } else { rational::zero() }).unwrap()
            })
            .collect()
    }

    #[test]
    fn ergodic_examples() {
        let d = is_ergodic(&rotation(4)).unwrap();
        assert!(d.ergodic() && d.component_limits && d.witness.is_none());

        let sys = Ceps::new(
            ConditionalExpectationOp::global_mean(2).unwrap(),
            RieszHomMap::identity(2).unwrap(),
        )
        .unwrap();
        let d = is_ergodic(&sys).unwrap();
        assert!(!d.ergodic() && !d.component_limits);
        let w = d.witness.unwrap();
        assert_eq!((w.i, w.j), (0, 0));
        // limit T(delta_0) = 1/2 e, target (1/2 e)^2 = 1/4 e
        assert_eq!(w.residual, Element::constant(2, ratio(1, 4)).unwrap());

        for n in 1..5 {
            assert!(is_ergodic(&identity_system(n)).unwrap().ergodic());
        }
    }

    #[test]
    fn weak_mixing_examples() {
        let d = is_weak_mixing(&rotation(4)).unwrap();
        assert!(!d.weak_mixing);
        let w = d.witness.unwrap();
        assert_eq!((w.i, w.j, w.k), (0, 0, Some(0)));
        assert_eq!(w.residual, Element::constant(4, ratio(3, 32)).unwrap());
        assert!(is_weak_mixing(&identity_system(3)).unwrap().weak_mixing);
        let one = Ceps::new(
            ConditionalExpectationOp::global_mean(1).unwrap(),
            RieszHomMap::identity(1).unwrap(),
        )
        .unwrap();
        let r = analyze(&one).unwrap();
        assert!(r.ergodic && r.weak_mixing);
    }

    #[test]
    fn report_json_shape() {
        let r = analyze(&rotation(4)).unwrap();
        assert!(r.ergodic && !r.weak_mixing && r.route_agreement);
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        for key in ["ergodic", "weak_mixing", "witnesses", "routes"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["routes"]["operator_equality"], true);
        assert_eq!(v["routes"]["component_limits"], true);
        assert_eq!(v["witnesses"][0]["kind"], "weak_mixing");
        assert_eq!(v["witnesses"][0]["residual"][0], "3/32");
        assert!(r.to_text().contains("weak_mixing: false"));
    }

    #[test]
    fn basis_reduction_matches_exhaustive_oracle() {
        for profile in Profile::ALL {
            for seed in 0..30 {
                let sys = generate_ceps(seed, 4, profile).unwrap();
                let (erg, wm) = exhaustive_component_decisions(&sys).unwrap();
                assert_eq!(erg, is_ergodic(&sys).unwrap().ergodic(), "{profile} {seed}");
                assert_eq!(wm, is_weak_mixing(&sys).unwrap().weak_mixing, "{profile} {seed}");
            }
        }
    }

    #[test]
    fn closed_form_matches_materialized_sequences() {
        for profile in Profile::ALL {
            for seed in 0..60 {
                let sys = generate_ceps(seed, 8, profile).unwrap();
                assert_eq!(is_ergodic(&sys).unwrap(), is_ergodic_by_sequences(&sys).unwrap());
                assert_eq!(is_weak_mixing(&sys).unwrap(), is_weak_mixing_by_sequences(&sys).unwrap());
            }
        }
        for sys in [rotation(4), rotation(6), identity_system(3)] {
            let product = crate::tensor::tensor_ceps(&sys, &sys).unwrap();
            assert_eq!(is_ergodic(&product).unwrap(), is_ergodic_by_sequences(&product).unwrap());
            assert_eq!(is_weak_mixing(&product).unwrap(), is_weak_mixing_by_sequences(&product).unwrap());
        }
    }

    #[test]
    fn weak_mixing_implies_ergodic_and_routes_agree() {
        for profile in Profile::ALL {
            for seed in 0..60 {
                let r = analyze(&generate_ceps(seed, 8, profile).unwrap()).unwrap();
                assert!(r.route_agreement);
                assert!(!r.weak_mixing || r.ergodic);
            }
        }
    }

    #[test]
    fn density_exact_examples() {
        let zero = ComponentSeq::Exact(EventuallyPeriodic::constant(Component::zero(2)));
        assert!(density_zero_check(&zero, None).unwrap().is_density_zero());
        let half = ComponentSeq::Exact(
            EventuallyPeriodic::new(vec![], vec![Component::unit(2), Component::zero(2)]).unwrap(),
        );
        let cert = density_zero_check(&half, None).unwrap();
        assert!(!cert.is_density_zero());
        assert_eq!(cert.final_density(), &Element::constant(2, ratio(1, 2)).unwrap());
        assert!(matches!(
            density_zero_check(&ComponentSeq::Prefix(vec![]), None),
            Err(Error::EmptySequence)
        ));
    }

    #[test]
    fn density_prefix_squares() {
        let comps: Vec<Component> = squares(10_000, 1).iter().map(|e| e.to_component().unwrap()).collect();
        let cert = density_zero_check(&ComponentSeq::Prefix(comps), Some(10_000)).unwrap();
        assert!(cert.is_density_zero());
        assert!(cert.final_density().get(0) <= &ratio(101, 10_000));
        assert_eq!(cert.final_density().get(0), &ratio(100, 10_000));
    }

    #[test]
    fn density_prefix_rejects_arithmetic_progressions() {
        for modulus in [2, 4, 7, 11] {
            let comps: Vec<Component> = (0..10_000)
                .map(|k| if k % modulus == 3 % modulus { Component::unit(1) } else { Component::zero(1) })
                .collect();
            let cert = density_zero_check(&ComponentSeq::Prefix(comps), None).unwrap();
            assert!(!cert.is_density_zero(), "mod {modulus}");
        }
    }

    #[test]
    fn checkpoint_schedule() {
        assert_eq!(checkpoints(10_000), vec![1, 10, 100, 1000, 10_000]);
        assert_eq!(checkpoints(12_345), vec![1, 12, 123, 1234, 12_345]);
        assert_eq!(checkpoints(1), vec![1]);
    }

    #[test]
    fn kvn_squares() {
        let f = squares(10_000, 2);
        let x = kvn_extract(&f, 10_000, &Thresholds::Harmonic).unwrap();
        let start = x.first_switch_point();
        for (k, fk) in f.iter().enumerate() {
            if k >= start {
                assert!(x.residual(fk, k).unwrap().is_zero());
                assert_eq!(x.components[k].to_element(), *fk);
            }
        }
        assert!(x.certificate.is_density_zero());
        assert!(x.certificate.final_density().get(0) <= &ratio(101, 10_000));
    }

    #[test]
    fn kvn_zero_sequence() {
        let f = vec![Element::constant(3, rational::zero()).unwrap(); 500];
        let x = kvn_extract(&f, 500, &Thresholds::Harmonic).unwrap();
        assert!(x.components.iter().all(Component::is_zero));
    }

    #[test]
    fn kvn_rejects_stalled_averages() {
        let sys = rotation(4);
        let d0 = Component::basis(4, 0);
        match weak_mixing_via_kvn(&sys, &d0, &d0, 1000) {
            Err(Error::CesaroNotVanishing { checkpoint, .. }) => assert!(checkpoint <= 1000),
            other => panic!("expected stall, got {other:?}"),
        }
        let f: Vec<Element> = (0..1000).map(|_| Element::constant(1, ratio(3, 32)).unwrap()).collect();
        assert!(matches!(
            kvn_extract(&f, 1000, &Thresholds::Harmonic),
            Err(Error::CesaroNotVanishing { .. })
        ));
    }

    #[test]
    fn kvn_input_errors() {
        assert!(matches!(kvn_extract(&[], 1, &Thresholds::Harmonic), Err(Error::EmptySequence)));
        let neg = vec![Element::from_ints(&[1, -1]).unwrap(); 20];
        assert!(matches!(
            kvn_extract(&neg, 20, &Thresholds::Harmonic),
            Err(Error::NegativeInput { index: 1 })
        ));
        assert!(kvn_extract(&neg, 21, &Thresholds::Harmonic).is_err());
        assert!(Thresholds::custom(vec![ratio(1, 2), ratio(1, 2)]).is_err());
        assert!(Thresholds::custom(vec![ratio(1, 2), ratio(-1, 3)]).is_err());
        assert!(Thresholds::custom(vec![]).is_err());
    }

    #[test]
    fn kvn_bound_with_decaying_sequence() {
        // f_k = 1/(k+1): Cesaro means ~ ln(n)/n vanish.
        let f: Vec<Element> = (0..3000).map(|k| Element::constant(1, ratio(1, k + 1)).unwrap()).collect();
        let x = kvn_extract(&f, 3000, &Thresholds::Harmonic).unwrap();
        assert!(!x.switch_points[0].is_empty());
        for (k, fk) in f.iter().enumerate() {
            let eps = Thresholds::Harmonic.get(x.level(0, k)).unwrap();
            assert!(x.residual(fk, k).unwrap().get(0) <= &eps);
        }
        let sw = &x.switch_points[0];
        assert!(sw.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn kvn_custom_thresholds() {
        let f: Vec<Element> = (0..2000).map(|k| Element::constant(1, ratio(1, k + 1)).unwrap()).collect();
        let th = Thresholds::custom(vec![ratio(1, 2), ratio(1, 10), ratio(1, 100)]).unwrap();
        let x = kvn_extract(&f, 2000, &th).unwrap();
        assert!(x.switch_points[0].len() <= 2);
        for (k, fk) in f.iter().enumerate() {
            let eps = th.get(x.level(0, k)).unwrap();
            assert!(x.residual(fk, k).unwrap().get(0) < &eps);
        }
    }

    #[test]
    fn kvn_agrees_with_weak_mixing_on_identity() {
        let sys = identity_system(3);
        for i in 0..3 {
            for j in 0..3 {
                let c = weak_mixing_via_kvn(&sys, &Component::basis(3, i), &Component::basis(3, j), 200).unwrap();
                assert!(c.holds);
                assert!(c.extraction.components.iter().all(Component::is_zero));
            }
        }
    }

    #[test]
    fn harmonic_entry_levels() {
        let h = Thresholds::Harmonic;
        assert_eq!(h.entry_level(&rational::one()), Some(1));
        assert_eq!(h.entry_level(&rational::int(5)), Some(1));
        assert_eq!(h.entry_level(&ratio(1, 3)), Some(3));
        assert_eq!(h.entry_level(&ratio(2, 7)), Some(4));
        assert_eq!(h.entry_level(&rational::zero()), None);
    }
}
