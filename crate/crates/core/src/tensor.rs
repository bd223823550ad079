//! Tensor products of systems on the finite model.
//!
//! The Dedekind-complete Fremlin tensor product of `Q^n` and `Q^m` is the
//! matrix space `Q^{n x m}`, stored row-major: cell `(i, j)` is coordinate
//! `i * m + j`. This pairing is part of the wire format.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::lattice::{check_dim, Component, Element};
use crate::mixing::ComponentSeq;
use crate::operators::{validate_ceps, Ceps, ConditionalExpectationOp, RieszHomMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TensorSpace {
    left: usize,
    right: usize,
}

impl TensorSpace {
    pub fn new(left: usize, right: usize) -> Result<Self> {
        if left == 0 || right == 0 {
            return Err(Error::EmptySpace);
        }
        left.checked_mul(right).ok_or(Error::TensorTooLarge {
            dimension: usize::MAX,
            cap: usize::MAX,
        })?;
        Ok(TensorSpace { left, right })
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn dimension(&self) -> usize {
        self.left * self.right
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.right + j
    }

    pub fn split(&self, k: usize) -> (usize, usize) {
        (k / self.right, k % self.right)
    }

    pub fn is_square(&self) -> bool {
        self.left == self.right
    }
}

/// Outer product: entry `(i, j)` is `f_i g_j`.
pub fn tensor_elements(f: &Element, g: &Element) -> Element {
    let coords = f
        .coords()
        .iter()
        .flat_map(|a| g.coords().iter().map(move |b| a * b))
        .collect();
    Element::new(coords).expect("both factors are nonempty")
}

pub fn tensor_component(p: &Component, q: &Component) -> Component {
    let bits = p
        .bits()
        .iter()
        .flat_map(|&a| q.bits().iter().map(move |&b| a && b))
        .collect();
    Component::new(bits).expect("both factors are nonempty")
}

/// `p ⊗ q` for elements that must be components.
pub fn tensor_component_of(p: &Element, q: &Element) -> Result<Component> {
    Ok(tensor_component(&p.to_component()?, &q.to_component()?))
}

/// A component of `e ⊗ e'` written as the join of rectangles `p ⊗ q <= u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub rectangles: Vec<(Component, Component)>,
    /// The join of the rectangles equals `u` and each lies below `u`.
    pub verified: bool,
}

/// Inclusion-maximal rectangles below `u`.
///
/// A column set is closed when it is an intersection of row supports of `u`;
/// each closed set `C`, paired with every row whose support contains `C`, is a
/// maximal rectangle, and every maximal rectangle arises this way.
pub fn component_decompose(space: TensorSpace, u: &Component) -> Result<Decomposition> {
    check_dim(space.dimension(), u.dimension())?;
    let (n, m) = (space.left(), space.right());
    let rows: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..m).map(|j| u.contains(space.index(i, j))).collect())
        .collect();

    let mut closed: BTreeSet<Vec<bool>> = BTreeSet::new();
    let mut work: Vec<Vec<bool>> = Vec::new();
    for row in &rows {
        if row.iter().any(|&b| b) && closed.insert(row.clone()) {
            work.push(row.clone());
        }
    }
    while let Some(set) = work.pop() {
        for row in &rows {
            let meet: Vec<bool> = set.iter().zip(row).map(|(a, b)| *a && *b).collect();
            if meet.iter().any(|&b| b) && closed.insert(meet.clone()) {
                work.push(meet);
            }
        }
    }

    let mut rectangles: Vec<(Component, Component)> = closed
        .into_iter()
        .map(|cols| {
            let row_bits = rows
                .iter()
                .map(|row| cols.iter().zip(row).all(|(c, r)| !c || *r))
                .collect();
            (
                Component::new(row_bits).expect("n >= 1"),
                Component::new(cols).expect("m >= 1"),
            )
        })
        .collect();
    rectangles.sort();

    let verified = verify_cover(space, u, &rectangles)?;
    Ok(Decomposition {
        rectangles,
        verified,
    })
}

/// True iff every `p ⊗ q` lies below `u` and their join is `u`.
pub fn verify_cover(space: TensorSpace, u: &Component, family: &[(Component, Component)]) -> Result<bool> {
    let mut join = Component::zero(space.dimension());
    for (p, q) in family {
        check_dim(space.left(), p.dimension())?;
        check_dim(space.right(), q.dimension())?;
        let r = tensor_component(p, q);
        if !r.le(u)? {
            return Ok(false);
        }
        join = join.join(&r)?;
    }
    Ok(&join == u)
}

/// Product partition `{B x C}` with weights `w1_i w2_j`.
pub fn tensor_t(t1: &ConditionalExpectationOp, t2: &ConditionalExpectationOp) -> Result<ConditionalExpectationOp> {
    let space = TensorSpace::new(t1.dimension(), t2.dimension())?;
    let blocks = t1
        .blocks()
        .iter()
        .flat_map(|b| {
            t2.blocks().iter().map(move |c| {
                b.iter()
                    .flat_map(|&i| c.iter().map(move |&j| space.index(i, j)))
                    .collect::<Vec<_>>()
            })
        })
        .collect();
    let weights = t1
        .weights()
        .iter()
        .flat_map(|a| t2.weights().iter().map(move |b| a * b))
        .collect();
    ConditionalExpectationOp::new(blocks, weights)
}

/// `(i, j) -> (sigma1(i), sigma2(j))`.
pub fn tensor_s(s1: &RieszHomMap, s2: &RieszHomMap) -> Result<RieszHomMap> {
    let space = TensorSpace::new(s1.dimension(), s2.dimension())?;
    let sigma = (0..space.dimension())
        .map(|k| {
            let (i, j) = space.split(k);
            space.index(s1.image(i), s2.image(j))
        })
        .collect();
    RieszHomMap::new(sigma)
}

/// The product system. A validation failure here is a defect: the product of
/// two valid systems is always valid.
pub fn tensor_ceps(a: &Ceps, b: &Ceps) -> Result<Ceps> {
    let t = tensor_t(a.t(), b.t())?;
    let s = tensor_s(a.s(), b.s())?;
    validate_ceps(t, s).map_err(|e| Error::Defect(format!("tensor product failed validation: {e}")))
}

pub fn tensor_ceps_capped(a: &Ceps, b: &Ceps, cap: usize) -> Result<Ceps> {
    let dimension = a.dimension().saturating_mul(b.dimension());
    if dimension > cap {
        return Err(Error::TensorTooLarge { dimension, cap });
    }
    tensor_ceps(a, b)
}

/// The multiplication map `j(f ⊗ g) = f g`: the diagonal of a square tensor.
pub fn j_multiply(space: TensorSpace, m: &Element) -> Result<Element> {
    if !space.is_square() {
        return Err(Error::NonSquareTensor {
            left: space.left(),
            right: space.right(),
        });
    }
    check_dim(space.dimension(), m.dimension())?;
    Element::new((0..space.left()).map(|i| m.get(space.index(i, i)).clone()).collect())
}

/// `r_k = p_k ⊗ q_k`. Two exact sequences give an exact sequence; otherwise the
/// result is a prefix as long as the shorter prefix.
pub fn tensor_density_zero(pseq: &ComponentSeq, qseq: &ComponentSeq) -> Result<ComponentSeq> {
    let (n, m) = (pseq.dimension()?, qseq.dimension()?);
    TensorSpace::new(n, m)?;
    match (pseq, qseq) {
        (ComponentSeq::Exact(p), ComponentSeq::Exact(q)) => {
            Ok(ComponentSeq::Exact(p.zip_with(q, tensor_component)?))
        }
        _ => {
            let len = match (pseq, qseq) {
                (ComponentSeq::Prefix(p), ComponentSeq::Prefix(q)) => p.len().min(q.len()),
                (ComponentSeq::Prefix(p), _) => p.len(),
                (_, ComponentSeq::Prefix(q)) => q.len(),
                _ => unreachable!(),
            };
            let p = pseq.prefix(len);
            let q = qseq.prefix(len);
            if len == 0 {
                return Err(Error::EmptySequence);
            }
            Ok(ComponentSeq::Prefix(
                p.iter().zip(&q).map(|(a, b)| tensor_component(a, b)).collect(),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::EventuallyPeriodic;
    use crate::lattice::SpaceDescriptor;
    use crate::rational::{self, ratio};

    fn el(v: &[i64]) -> Element {
        Element::from_ints(v).unwrap()
    }

    fn comp(v: &[u8]) -> Component {
        Component::new(v.iter().map(|&b| b == 1).collect()).unwrap()
    }

    #[test]
    fn tensor_elements_examples() {
        assert_eq!(tensor_elements(&el(&[1, 0]), &el(&[1, 1])), el(&[1, 1, 0, 0]));
        let e2 = SpaceDescriptor::new(2).unwrap().unit();
        let e3 = SpaceDescriptor::new(3).unwrap().unit();
        assert_eq!(tensor_elements(&e2, &e3), SpaceDescriptor::new(6).unwrap().unit());
        assert!(tensor_elements(&el(&[3, -2]), &el(&[0, 0, 0])).is_zero());
    }

    #[test]
    fn tensor_component_examples() {
        let r = tensor_component(&comp(&[1, 0]), &comp(&[0, 1]));
        assert_eq!(r, comp(&[0, 1, 0, 0]));
        assert_eq!(tensor_component(&Component::unit(2), &Component::unit(3)), Component::unit(6));
        assert!(tensor_component(&Component::zero(2), &comp(&[1, 1])).is_zero());
        assert!(matches!(
            tensor_component_of(&Element::from_ratios(&[(1, 2), (1, 1)]).unwrap(), &el(&[1])),
            Err(Error::NotAComponent { index: 0, .. })
        ));
    }

    #[test]
    fn decompose_examples() {
        let space = TensorSpace::new(2, 2).unwrap();
        // cells (0,0), (0,1), (1,0)
        let u = comp(&[1, 1, 1, 0]);
        let d = component_decompose(space, &u).unwrap();
        assert!(d.verified);
        let mut expect = vec![
            (comp(&[1, 0]), comp(&[1, 1])),
            (comp(&[1, 1]), comp(&[1, 0])),
        ];
        expect.sort();
        assert_eq!(d.rectangles, expect);

        let p = comp(&[0, 1, 1]);
        let q = comp(&[1, 0, 1, 1]);
        let space = TensorSpace::new(3, 4).unwrap();
        let d = component_decompose(space, &tensor_component(&p, &q)).unwrap();
        assert_eq!(d.rectangles, vec![(p, q)]);
        assert!(d.verified);

        let d = component_decompose(space, &Component::zero(12)).unwrap();
        assert!(d.rectangles.is_empty());
        assert!(d.verified);
    }

    /// Oracle: enumerate every rectangle below `u` and keep the maximal ones.
    fn maximal_rectangles_brute(space: TensorSpace, u: &Component) -> Vec<(Component, Component)> {
        let rows = SpaceDescriptor::new(space.left()).unwrap();
        let cols = SpaceDescriptor::new(space.right()).unwrap();
        let below: Vec<(Component, Component)> = rows
            .components()
            .filter(|p| !p.is_zero())
            .flat_map(|p| cols.components().filter(|q| !q.is_zero()).map(move |q| (p.clone(), q)))
            .filter(|(p, q)| tensor_component(p, q).le(u).unwrap())
            .collect();
        let mut out: Vec<_> = below
            .iter()
            .filter(|(p, q)| {
                !below.iter().any(|(p2, q2)| {
                    (p2, q2) != (p, q) && p.le(p2).unwrap() && q.le(q2).unwrap()
                })
            })
            .cloned()
            .collect();
        out.sort();
        out
    }

    #[test]
    fn maximal_rectangles_match_brute_force() {
        for (n, m) in [(1, 1), (1, 3), (2, 2), (2, 3), (3, 2), (3, 3)] {
            let space = TensorSpace::new(n, m).unwrap();
            for u in SpaceDescriptor::new(n * m).unwrap().components() {
                let d = component_decompose(space, &u).unwrap();
                assert!(d.verified);
                assert_eq!(d.rectangles, maximal_rectangles_brute(space, &u), "{n}x{m} {u:?}");
            }
        }
    }

    #[test]
    fn tensor_t_examples() {
        let t = ConditionalExpectationOp::global_mean(2).unwrap();
        let tt = tensor_t(&t, &t).unwrap();
        let d0 = Component::basis(2, 0).to_element();
        let got = tt.apply(&tensor_elements(&d0, &d0)).unwrap();
        assert_eq!(got, Element::constant(4, ratio(1, 4)).unwrap());
        let e = SpaceDescriptor::new(4).unwrap().unit();
        assert_eq!(tt.apply(&e).unwrap(), e);
        let id = tensor_t(
            &ConditionalExpectationOp::identity(2).unwrap(),
            &ConditionalExpectationOp::identity(3).unwrap(),
        )
        .unwrap();
        assert!(id.is_identity());
        assert!(id.weights().iter().all(|w| w == &rational::one()));
    }

    #[test]
    fn tensor_s_examples() {
        let r = RieszHomMap::rotation(2).unwrap();
        assert_eq!(tensor_s(&r, &r).unwrap().sigma(), &[3, 2, 1, 0]);
        let id = tensor_s(&RieszHomMap::identity(2).unwrap(), &RieszHomMap::identity(3).unwrap()).unwrap();
        assert!(id.is_identity());
    }

    #[test]
    fn j_examples() {
        let space = TensorSpace::new(2, 2).unwrap();
        let (f, g) = (el(&[1, 2]), el(&[3, 4]));
        assert_eq!(j_multiply(space, &tensor_elements(&f, &g)).unwrap(), el(&[3, 8]));
        assert_eq!(j_multiply(space, &el(&[1, 1, 1, 1])).unwrap(), el(&[1, 1]));
        assert!(j_multiply(space, &el(&[0, 0, 0, 0])).unwrap().is_zero());
        assert!(matches!(
            j_multiply(TensorSpace::new(2, 3).unwrap(), &el(&[0; 6])),
            Err(Error::NonSquareTensor { .. })
        ));
    }

    #[test]
    fn density_zero_tensor_exact_and_prefix() {
        let zero = ComponentSeq::Exact(EventuallyPeriodic::constant(Component::zero(2)));
        let q = ComponentSeq::Exact(EventuallyPeriodic::constant(Component::unit(3)));
        match tensor_density_zero(&zero, &q).unwrap() {
            ComponentSeq::Exact(r) => {
                assert_eq!(r.period(), &[Component::zero(6)]);
            }
            other => panic!("expected exact, got {other:?}"),
        }
        let prefix = ComponentSeq::Prefix(vec![Component::unit(2); 5]);
        match tensor_density_zero(&prefix, &q).unwrap() {
            ComponentSeq::Prefix(r) => {
                assert_eq!(r.len(), 5);
                assert!(r.iter().all(|c| c == &Component::unit(6)));
            }
            other => panic!("expected prefix, got {other:?}"),
        }
    }
}
