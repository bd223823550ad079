//! Exact ergodic averages.
//!
//! Every orbit of a finite map `sigma` falls onto a cycle after finitely many
//! steps, so the Cesaro averages `S_n f` converge and every sequence of the form
//! `k -> T((S^k p) q)` is eventually periodic. Limits are computed as period
//! means, with no truncation.

use num_integer::Integer;
use num_traits::Zero;
use serde::de::Deserializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{check_dim, Component, Element};
use crate::operators::{Ceps, Matrix, RieszHomMap};
use crate::rational::{self, Rational};

/// Longest period a sequence may materialise.
pub const MAX_PERIOD: u128 = 1 << 20;

/// Cycle structure of `sigma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionalGraph {
    sigma: Vec<usize>,
    depth: Vec<usize>,
    cycle_of: Vec<usize>,
    cycles: Vec<Vec<usize>>,
    preperiod_bound: usize,
    period: Option<u128>,
}

impl FunctionalGraph {
    pub fn new(map: &RieszHomMap) -> Self {
        let sigma = map.sigma().to_vec();
        let n = sigma.len();
        const UNSEEN: usize = usize::MAX;
        let mut cycle_of = vec![UNSEEN; n];
        let mut depth = vec![0usize; n];
        let mut on_path = vec![usize::MAX; n];
        let mut cycles: Vec<Vec<usize>> = Vec::new();

        for start in 0..n {
            if cycle_of[start] != UNSEEN {
                continue;
            }
            let mut path = Vec::new();
            let mut i = start;
            while cycle_of[i] == UNSEEN && on_path[i] == usize::MAX {
                on_path[i] = path.len();
                path.push(i);
                i = sigma[i];
            }
            let tail_len = if cycle_of[i] == UNSEEN {
                // Closed a new cycle at position on_path[i].
                let pos = on_path[i];
                let mut cycle = path[pos..].to_vec();
                let min_at = cycle.iter().enumerate().min_by_key(|(_, &v)| v).map(|(k, _)| k).unwrap_or(0);
                cycle.rotate_left(min_at);
                let id = cycles.len();
                for &c in &cycle {
                    cycle_of[c] = id;
                    depth[c] = 0;
                }
                cycles.push(cycle);
                pos
            } else {
                path.len()
            };
            // Tree part of the path, walked backwards from the entry point.
            let (id, mut d) = (cycle_of[i], depth[i]);
            for &v in path[..tail_len].iter().rev() {
                d += 1;
                cycle_of[v] = id;
                depth[v] = d;
            }
            for &v in &path {
                on_path[v] = usize::MAX;
            }
        }

        let preperiod_bound = depth.iter().copied().max().unwrap_or(0);
        let period = cycles
            .iter()
            .try_fold(1u128, |acc, c| checked_lcm(acc, c.len() as u128));
        FunctionalGraph {
            sigma,
            depth,
            cycle_of,
            cycles,
            preperiod_bound,
            period,
        }
    }

    pub fn dimension(&self) -> usize {
        self.sigma.len()
    }

    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    /// Index into `cycles()` of the cycle that the orbit of `i` reaches.
    pub fn terminal_cycle(&self, i: usize) -> usize {
        self.cycle_of[i]
    }

    /// Steps from `i` to its cycle.
    pub fn depth(&self, i: usize) -> usize {
        self.depth[i]
    }

    /// `K`: `sigma^K(i)` is on a cycle for every `i`.
    pub fn preperiod_bound(&self) -> usize {
        self.preperiod_bound
    }

    /// `d`: lcm of the cycle lengths, `None` if it overflows `u128`.
    pub fn period(&self) -> Option<u128> {
        self.period
    }

    /// Eventual period of `k -> S^k p`: the lcm, over cycles, of the rotation
    /// period of `p` restricted to the cycle. Always divides `d`.
    pub fn sequence_period(&self, p: &Component) -> Result<u128> {
        check_dim(self.dimension(), p.dimension())?;
        self.cycles.iter().try_fold(1u128, |acc, cycle| {
            let bits: Vec<bool> = cycle.iter().map(|&i| p.contains(i)).collect();
            let len = bits.len();
            let rot = (1..=len)
                .filter(|&r| len.is_multiple_of(r))
                .find(|&r| (0..len).all(|k| bits[k] == bits[(k + r) % len]))
                .unwrap_or(len);
            checked_lcm(acc, rot as u128).ok_or(Error::PeriodTooLong(u128::MAX))
        })
    }

    /// Indicators of the weakly connected pieces of the graph. They span the
    /// `S`-invariant elements `{f : Sf = f}`.
    pub fn invariant_basis(&self) -> Vec<Component> {
        let n = self.dimension();
        (0..self.cycles.len())
            .map(|id| {
                Component::new((0..n).map(|i| self.cycle_of[i] == id).collect()).expect("nonempty")
            })
            .collect()
    }

    pub fn invariant_dimension(&self) -> usize {
        self.cycles.len()
    }

    /// `(L_S f)_i`: the unweighted mean of `f` over the cycle reached from `i`.
    pub fn ergodic_limit(&self, f: &Element) -> Result<Element> {
        check_dim(self.dimension(), f.dimension())?;
        let means: Vec<Rational> = self
            .cycles
            .iter()
            .map(|c| {
                let s: Rational = c.iter().map(|&i| f.get(i)).sum();
                s / rational::int(c.len() as i64)
            })
            .collect();
        Element::new(self.cycle_of.iter().map(|&c| means[c].clone()).collect())
    }

    /// Matrix of `L_S`: row `i` averages the cycle reached from `i`.
    pub fn ergodic_limit_matrix(&self) -> Matrix {
        let n = self.dimension();
        let mut m = vec![vec![Rational::zero(); n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            let cycle = &self.cycles[self.cycle_of[i]];
            let w = rational::ratio(1, cycle.len() as i64);
            for &j in cycle {
                row[j] = w.clone();
            }
        }
        m
    }
}

fn checked_lcm(a: u128, b: u128) -> Option<u128> {
    (a / a.gcd(&b)).checked_mul(b)
}

/// `value(k) = preperiod[k]` for `k < |preperiod|`, else
/// `period[(k - |preperiod|) mod |period|]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EventuallyPeriodic<T> {
    preperiod: Vec<T>,
    period: Vec<T>,
}

pub type EventuallyPeriodicSeq = EventuallyPeriodic<Element>;

impl<T: Clone> EventuallyPeriodic<T> {
    pub fn new(preperiod: Vec<T>, period: Vec<T>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::EmptySequence);
        }
        Ok(EventuallyPeriodic { preperiod, period })
    }

    pub fn constant(value: T) -> Self {
        EventuallyPeriodic {
            preperiod: Vec::new(),
            period: vec![value],
        }
    }

    pub fn preperiod(&self) -> &[T] {
        &self.preperiod
    }

    pub fn period(&self) -> &[T] {
        &self.period
    }

    pub fn value(&self, k: usize) -> &T {
        if k < self.preperiod.len() {
            &self.preperiod[k]
        } else {
            &self.period[(k - self.preperiod.len()) % self.period.len()]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> + '_ {
        self.preperiod.iter().chain(self.period.iter().cycle())
    }

    pub fn prefix(&self, n: usize) -> Vec<T> {
        self.iter().take(n).cloned().collect()
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> EventuallyPeriodic<U> {
        EventuallyPeriodic {
            preperiod: self.preperiod.iter().map(&f).collect(),
            period: self.period.iter().map(&f).collect(),
        }
    }

    /// Pointwise combination. The result has preperiod `max` and period `lcm`
    /// of the inputs.
    pub fn zip_with<U: Clone, V: Clone>(
        &self,
        other: &EventuallyPeriodic<U>,
        f: impl Fn(&T, &U) -> V,
    ) -> Result<EventuallyPeriodic<V>> {
        let pre = self.preperiod.len().max(other.preperiod.len());
        let per = checked_lcm(self.period.len() as u128, other.period.len() as u128)
            .filter(|&p| p <= MAX_PERIOD)
            .ok_or(Error::PeriodTooLong(u128::MAX))? as usize;
        let values = |range: std::ops::Range<usize>| -> Vec<V> {
            range.map(|k| f(self.value(k), other.value(k))).collect()
        };
        Ok(EventuallyPeriodic {
            preperiod: values(0..pre),
            period: values(pre..pre + per),
        })
    }
}

impl<'de, T: Clone + Deserialize<'de>> Deserialize<'de> for EventuallyPeriodic<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields, bound = "T: Deserialize<'de>")]
        struct Raw<T> {
            #[serde(default)]
            preperiod: Vec<T>,
            period: Vec<T>,
        }
        let raw = Raw::<T>::deserialize(d)?;
        EventuallyPeriodic::new(raw.preperiod, raw.period).map_err(serde::de::Error::custom)
    }
}

impl EventuallyPeriodicSeq {
    /// All entries share a dimension.
    pub fn dimension(&self) -> Result<usize> {
        let n = self.period[0].dimension();
        for x in self.preperiod.iter().chain(&self.period) {
            check_dim(n, x.dimension())?;
        }
        Ok(n)
    }
}

/// `S_n f = (1/n) sum_{k<n} S^k f`.
pub fn cesaro_prefix(s: &RieszHomMap, f: &Element, n: usize) -> Result<Element> {
    if n == 0 {
        return Err(Error::InvalidConfig("Cesaro prefix needs n >= 1".into()));
    }
    check_dim(s.dimension(), f.dimension())?;
    let mut term = f.clone();
    let mut acc = f.clone();
    for _ in 1..n {
        term = s.apply(&term)?;
        acc = acc.add(&term)?;
    }
    Ok(acc.scale(&rational::ratio(1, n as i64)))
}

/// `L_S f = lim S_n f`.
pub fn ergodic_limit(s: &RieszHomMap, f: &Element) -> Result<Element> {
    FunctionalGraph::new(s).ergodic_limit(f)
}

/// A system together with its cycle structure, for repeated sequence queries.
#[derive(Clone, Debug)]
pub struct SystemDynamics<'a> {
    sys: &'a Ceps,
    graph: FunctionalGraph,
}

impl<'a> SystemDynamics<'a> {
    pub fn new(sys: &'a Ceps) -> Self {
        SystemDynamics {
            sys,
            graph: FunctionalGraph::new(sys.s()),
        }
    }

    pub fn system(&self) -> &'a Ceps {
        self.sys
    }

    pub fn graph(&self) -> &FunctionalGraph {
        &self.graph
    }

    /// `k -> T((S^k p) q)`, with preperiod `K` and period dividing `d`.
    pub fn seq_t_skp_q(&self, p: &Component, q: &Component) -> Result<EventuallyPeriodicSeq> {
        let n = self.sys.dimension();
        check_dim(n, p.dimension())?;
        check_dim(n, q.dimension())?;
        let pre = self.graph.preperiod_bound();
        let per = self.graph.sequence_period(p)?;
        if per > MAX_PERIOD {
            return Err(Error::PeriodTooLong(per));
        }
        let per = per as usize;
        let mut values = Vec::with_capacity(pre + per);
        let mut shifted = p.clone();
        for k in 0..pre + per {
            if k > 0 {
                shifted = self.sys.s().apply_component(&shifted)?;
            }
            values.push(self.sys.t().apply_component(&shifted.meet(q)?)?);
        }
        let period = values.split_off(pre);
        EventuallyPeriodic::new(values, period)
    }
}

pub fn seq_t_skp_q(sys: &Ceps, p: &Component, q: &Component) -> Result<EventuallyPeriodicSeq> {
    SystemDynamics::new(sys).seq_t_skp_q(p, q)
}

/// Order limit of the Cesaro means: the mean of the period block.
pub fn cesaro_limit(seq: &EventuallyPeriodicSeq) -> Result<Element> {
    seq.dimension()?;
    let sum = Element::sum(seq.period().iter())?;
    Ok(sum.scale(&rational::ratio(1, seq.period().len() as i64)))
}

/// Limit of `(1/n) sum_{k<n} |value(k) - target|`.
pub fn cesaro_limit_abs_dev(seq: &EventuallyPeriodicSeq, target: &Element) -> Result<Element> {
    check_dim(seq.dimension()?, target.dimension())?;
    let devs = seq
        .period()
        .iter()
        .map(|v| v.sub(target).map(|d| d.abs()))
        .collect::<Result<Vec<_>>>()?;
    let sum = Element::sum(devs.iter())?;
    Ok(sum.scale(&rational::ratio(1, devs.len() as i64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{mat_mul, ConditionalExpectationOp};
    use crate::rational::ratio;

    fn el(v: &[i64]) -> Element {
        Element::from_ints(v).unwrap()
    }

    fn rotation_system(n: usize) -> Ceps {
        Ceps::new(
            ConditionalExpectationOp::global_mean(n).unwrap(),
            RieszHomMap::rotation(n).unwrap(),
        )
        .unwrap()
    }

    /// Brute-force Cesaro average of an explicit prefix.
    fn prefix_mean(values: &[Element]) -> Element {
        Element::sum(values.iter())
            .unwrap()
            .scale(&ratio(1, values.len() as i64))
    }

    #[test]
    fn graph_of_rho_shape() {
        // 5 -> 4 -> 0 -> 1 -> 2 -> 0, 3 -> 3
        let s = RieszHomMap::new(vec![1, 2, 0, 3, 0, 4]).unwrap();
        let g = FunctionalGraph::new(&s);
        assert_eq!(g.cycles(), &[vec![0, 1, 2], vec![3]]);
        assert_eq!(g.preperiod_bound(), 2);
        assert_eq!(g.period(), Some(3));
        assert_eq!(g.depth(5), 2);
        assert_eq!(g.depth(4), 1);
        assert_eq!(g.terminal_cycle(5), 0);
        assert_eq!(g.invariant_dimension(), 2);
        for i in 0..6 {
            let k = g.preperiod_bound();
            let a = s.power(k).image(i);
            assert_eq!(s.power(k + 3).image(i), a);
            assert!(g.cycles()[g.terminal_cycle(i)].contains(&a));
        }
    }

    #[test]
    fn cesaro_prefix_examples() {
        let f = Element::from_ratios(&[(1, 2), (3, 1), (-2, 5)]).unwrap();
        let id = RieszHomMap::identity(3).unwrap();
        for n in 1..5 {
            assert_eq!(cesaro_prefix(&id, &f, n).unwrap(), f);
        }
        let rot = RieszHomMap::rotation(4).unwrap();
        assert_eq!(
            cesaro_prefix(&rot, &el(&[1, 0, 0, 0]), 4).unwrap(),
            Element::constant(4, ratio(1, 4)).unwrap()
        );
        assert_eq!(cesaro_prefix(&rot, &el(&[7, 1, 0, 2]), 1).unwrap(), el(&[7, 1, 0, 2]));
        assert!(cesaro_prefix(&rot, &el(&[1, 0, 0, 0]), 0).is_err());
    }

    #[test]
    fn ergodic_limit_examples() {
        let rot = RieszHomMap::rotation(4).unwrap();
        assert_eq!(
            ergodic_limit(&rot, &el(&[1, 0, 0, 0])).unwrap(),
            Element::constant(4, ratio(1, 4)).unwrap()
        );
        let absorb = RieszHomMap::new(vec![0, 0, 0]).unwrap();
        assert_eq!(ergodic_limit(&absorb, &el(&[5, 1, 2])).unwrap(), el(&[5, 5, 5]));
        let f = el(&[3, -1, 4]);
        assert_eq!(ergodic_limit(&RieszHomMap::identity(3).unwrap(), &f).unwrap(), f);
    }

    #[test]
    fn rotation_sequence_example() {
        let sys = rotation_system(4);
        let d0 = Component::basis(4, 0);
        let seq = seq_t_skp_q(&sys, &d0, &d0).unwrap();
        let quarter = Element::constant(4, ratio(1, 4)).unwrap();
        let zero = sys.space().zero();
        assert!(seq.preperiod().is_empty());
        assert_eq!(seq.period(), &[quarter, zero.clone(), zero.clone(), zero]);

        let limit = cesaro_limit(&seq).unwrap();
        assert_eq!(limit, Element::constant(4, ratio(1, 16)).unwrap());
        let dev = cesaro_limit_abs_dev(&seq, &limit).unwrap();
        assert_eq!(dev, Element::constant(4, ratio(3, 32)).unwrap());
    }

    #[test]
    fn three_thirty_seconds_by_brute_force() {
        // Oracle: explicit Cesaro prefix of |a_k - 1/16| with a_k computed from
        // S^k directly, at horizon 10^4 (a multiple of the period 4).
        let sys = rotation_system(4);
        let d0 = Component::basis(4, 0).to_element();
        let target = Element::constant(4, ratio(1, 16)).unwrap();
        let mut shifted = d0.clone();
        let mut acc = sys.space().zero();
        let horizon = 10_000;
        for _ in 0..horizon {
            let a = sys.t().apply(&shifted.f_product(&d0).unwrap()).unwrap();
            acc = acc.add(&a.sub(&target).unwrap().abs()).unwrap();
            shifted = sys.s().apply(&shifted).unwrap();
        }
        let brute = acc.scale(&ratio(1, horizon));
        assert_eq!(brute, Element::constant(4, ratio(3, 32)).unwrap());
    }

    #[test]
    fn trivial_sequences() {
        let t = ConditionalExpectationOp::new(
            vec![vec![0, 2], vec![1]],
            vec![ratio(1, 3), ratio(1, 3), ratio(1, 3)],
        )
        .unwrap();
        let sys = Ceps::new(t, RieszHomMap::identity(3).unwrap()).unwrap();
        let p = Component::from_indices(3, &[0, 1]).unwrap();
        let q = Component::from_indices(3, &[0]).unwrap();
        let seq = seq_t_skp_q(&sys, &p, &q).unwrap();
        assert_eq!(seq.period().len(), 1);
        let pq = p.meet(&q).unwrap().to_element();
        assert_eq!(seq.period()[0], sys.t().apply(&pq).unwrap());

        let rot = rotation_system(3);
        let seq = seq_t_skp_q(&rot, &Component::unit(3), &q).unwrap();
        assert_eq!(seq.period(), &[rot.t().apply(&q.to_element()).unwrap()]);
    }

    #[test]
    fn cesaro_limit_examples() {
        let c = el(&[2, 5]);
        assert_eq!(cesaro_limit(&EventuallyPeriodic::constant(c.clone())).unwrap(), c);
        let seq = EventuallyPeriodic::new(vec![el(&[100, 100])], vec![el(&[0, 0])]).unwrap();
        assert!(cesaro_limit(&seq).unwrap().is_zero());
        assert!(cesaro_limit_abs_dev(&EventuallyPeriodic::constant(c.clone()), &c)
            .unwrap()
            .is_zero());
        let e = el(&[1, 1]);
        assert_eq!(
            cesaro_limit_abs_dev(&EventuallyPeriodic::constant(e.clone()), &el(&[0, 0])).unwrap(),
            e
        );
        assert!(cesaro_limit_abs_dev(&seq, &el(&[0])).is_err());
        assert!(EventuallyPeriodicSeq::new(vec![], vec![]).is_err());
    }

    #[test]
    fn value_and_zip() {
        let a = EventuallyPeriodic::new(vec![10], vec![1, 2]).unwrap();
        let b = EventuallyPeriodic::new(vec![], vec![0, 0, 5]).unwrap();
        assert_eq!(a.prefix(6), vec![10, 1, 2, 1, 2, 1]);
        let z = a.zip_with(&b, |x, y| x + y).unwrap();
        assert_eq!(z.preperiod().len(), 1);
        assert_eq!(z.period().len(), 6);
        for k in 0..40 {
            assert_eq!(*z.value(k), a.value(k) + b.value(k));
        }
    }

    #[test]
    fn sequence_json_shape() {
        let seq = EventuallyPeriodic::new(
            vec![Element::from_ratios(&[(1, 2)]).unwrap()],
            vec![el(&[0])],
        )
        .unwrap();
        let json = serde_json::to_string(&seq).unwrap();
        assert_eq!(json, r#"{"preperiod":[["1/2"]],"period":[["0"]]}"#);
        let back: EventuallyPeriodicSeq = serde_json::from_str(&json).unwrap();
        assert_eq!(back, seq);
        assert!(serde_json::from_str::<EventuallyPeriodicSeq>(r#"{"preperiod":[],"period":[]}"#).is_err());
    }

    #[test]
    fn birkhoff_identities_on_generated_systems() {
        use crate::generate::{generate_ceps, Profile};
        for profile in Profile::ALL {
            for seed in 0..40 {
                let sys = generate_ceps(seed, 7, profile).unwrap();
                let g = FunctionalGraph::new(sys.s());
                let l = g.ergodic_limit_matrix();
                let s = sys.s().matrix();
                let t = sys.t().matrix();
                assert_eq!(mat_mul(&l, &l), l);
                assert_eq!(mat_mul(&s, &l), l);
                assert_eq!(mat_mul(&l, &s), l);
                assert_eq!(mat_mul(&t, &l), t);
            }
        }
    }

    #[test]
    fn prefix_converges_at_rate_two_k_sup_over_n() {
        // Non-permutation maps have a nontrivial preperiod.
        let s = RieszHomMap::new(vec![1, 2, 0, 3, 0, 4, 5]).unwrap();
        let g = FunctionalGraph::new(&s);
        let (k, d) = (g.preperiod_bound(), g.period().unwrap() as usize);
        let f = Element::from_ratios(&[(3, 1), (-1, 2), (0, 1), (7, 3), (-4, 1), (9, 1), (1, 5)]).unwrap();
        let limit = g.ergodic_limit(&f).unwrap();
        let c = f.sup_norm() * rational::int(2 * k as i64);
        for m in 1..6 {
            let n = k + m * d;
            let err = cesaro_prefix(&s, &f, n).unwrap().sub(&limit).unwrap().sup_norm();
            assert!(err <= &c / rational::int(n as i64), "n={n}");
        }
    }

    #[test]
    fn cesaro_limit_matches_long_prefix() {
        let s = RieszHomMap::new(vec![1, 2, 0, 0, 3, 6, 5]).unwrap();
        let t = ConditionalExpectationOp::global_mean(7).unwrap();
        // Not a valid system (the map is not onto), but the sequence machinery
        // only needs T and S; build the dynamics by hand.
        let g = FunctionalGraph::new(&s);
        let p = Component::from_indices(7, &[0, 5]).unwrap();
        let q = Component::from_indices(7, &[1, 4, 6]).unwrap();
        let pre = g.preperiod_bound();
        let per = g.sequence_period(&p).unwrap() as usize;
        let mut values = Vec::new();
        let mut shifted = p.clone();
        for _ in 0..pre + per {
            values.push(t.apply(&shifted.meet(&q).unwrap().to_element()).unwrap());
            shifted = s.apply_component(&shifted).unwrap();
        }
        let period = values.split_off(pre);
        let seq = EventuallyPeriodic::new(values, period).unwrap();
        let limit = cesaro_limit(&seq).unwrap();
        let horizon = 10 * (pre + g.period().unwrap() as usize);
        let brute = prefix_mean(&seq.prefix(horizon));
        let m = seq.iter().take(pre + per).map(|v| v.sup_norm()).max().unwrap();
        let bound = m * rational::int(2 * (pre + per) as i64) / rational::int(horizon as i64);
        assert!(brute.sub(&limit).unwrap().sup_norm() <= bound);
        // Direct evaluation agrees with the stored representation.
        let mut shifted = p.clone();
        for k in 0..horizon {
            let direct = t.apply(&shifted.meet(&q).unwrap().to_element()).unwrap();
            assert_eq!(&direct, seq.value(k));
            shifted = s.apply_component(&shifted).unwrap();
        }
    }

    #[test]
    fn invariant_basis_is_the_fixed_space_of_l() {
        let s = RieszHomMap::new(vec![1, 0, 2, 2, 5, 4, 4]).unwrap();
        let g = FunctionalGraph::new(&s);
        for b in g.invariant_basis() {
            let f = b.to_element();
            assert_eq!(s.apply(&f).unwrap(), f);
            assert_eq!(g.ergodic_limit(&f).unwrap(), f);
        }
        // dim {f : L f = f} equals the rank of L, which is the number of cycles.
        assert_eq!(g.invariant_dimension(), 3);
        let not_invariant = Component::from_indices(7, &[0]).unwrap().to_element();
        assert_ne!(g.ergodic_limit(&not_invariant).unwrap(), not_invariant);
    }

    #[test]
    fn sequence_period_divides_global_period() {
        let s = RieszHomMap::new(vec![1, 0, 3, 4, 2, 5]).unwrap();
        let g = FunctionalGraph::new(&s);
        assert_eq!(g.period(), Some(6));
        assert_eq!(g.sequence_period(&Component::basis(6, 0)).unwrap(), 2);
        assert_eq!(g.sequence_period(&Component::basis(6, 3)).unwrap(), 3);
        assert_eq!(g.sequence_period(&Component::from_indices(6, &[0, 2]).unwrap()).unwrap(), 6);
        assert_eq!(g.sequence_period(&Component::from_indices(6, &[2, 3, 4]).unwrap()).unwrap(), 1);
    }
}
