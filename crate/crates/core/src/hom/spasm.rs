//! Spasm enumeration and the Möbius inversion
//! `inj(F, G) = Σ_P μ(P) · hom(F/P, G)` over vertex partitions `P` of `F`
//! whose blocks are independent sets, with
//! `μ(P) = Π_B (−1)^{|B|−1} (|B|−1)!`.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::{count_aut, count_hom, HomCount, DEFAULT_SPASM_CAP};
use crate::canon::{canonical_form_with_cap, CanonicalLabel};
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Debug, Serialize)]
pub struct SpasmMember {
    pub graph: Graph,
    /// Sum of `μ(P)` over the partitions whose quotient is this member.
    #[serde(serialize_with = "ser_rational")]
    pub coefficient: BigRational,
    /// Number of partitions producing this member.
    pub partitions: usize,
    #[serde(skip)]
    pub label: CanonicalLabel,
}

fn ser_rational<S: serde::Serializer>(
    r: &BigRational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

/// All homomorphic images of a pattern, deduplicated by isomorphism.
#[derive(Clone, Debug, Serialize)]
pub struct Spasm {
    pub members: Vec<SpasmMember>,
}

impl Spasm {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, g: &Graph) -> Result<bool> {
        let label = canonical_form_with_cap(g, g.n().max(DEFAULT_SPASM_CAP))?;
        Ok(self.members.iter().any(|m| m.label == label))
    }
}

pub fn spasm(f: &Graph) -> Result<Spasm> {
    spasm_with_cap(f, DEFAULT_SPASM_CAP)
}

pub fn spasm_with_cap(f: &Graph, cap: usize) -> Result<Spasm> {
    if f.n() > cap {
        return Err(Error::CapExceeded { n: f.n(), cap });
    }
    let mut found: HashMap<CanonicalLabel, SpasmMember> = HashMap::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut err = None;
    partitions(f, 0, &mut blocks, &mut |blocks| {
        if err.is_some() {
            return;
        }
        let quotient = quotient(f, blocks);
        let label = match canonical_form_with_cap(&quotient, cap) {
            Ok(l) => l,
            Err(e) => {
                err = Some(e);
                return;
            }
        };
        let mu = mobius(blocks);
        let entry = found.entry(label.clone()).or_insert_with(|| SpasmMember {
            graph: quotient,
            coefficient: BigRational::zero(),
            partitions: 0,
            label,
        });
        entry.coefficient += BigRational::from_integer(mu);
        entry.partitions += 1;
    });
    if let Some(e) = err {
        return Err(e);
    }
    let mut members: Vec<SpasmMember> = found.into_values().collect();
    members.sort_by(|a, b| {
        (b.graph.n(), b.graph.edge_count())
            .cmp(&(a.graph.n(), a.graph.edge_count()))
            .then_with(|| a.label.cmp(&b.label))
    });
    Ok(Spasm { members })
}

/// Enumerates partitions of `0..f.n()` into independent blocks, in
/// restricted-growth order.
fn partitions(
    f: &Graph,
    v: usize,
    blocks: &mut Vec<Vec<usize>>,
    visit: &mut impl FnMut(&[Vec<usize>]),
) {
    if v == f.n() {
        visit(blocks);
        return;
    }
    for b in 0..blocks.len() {
        if blocks[b].iter().any(|&u| f.has_edge(u, v)) {
            continue;
        }
        blocks[b].push(v);
        partitions(f, v + 1, blocks, visit);
        blocks[b].pop();
    }
    blocks.push(vec![v]);
    partitions(f, v + 1, blocks, visit);
    blocks.pop();
}

fn quotient(f: &Graph, blocks: &[Vec<usize>]) -> Graph {
    let mut block_of = vec![0; f.n()];
    for (i, b) in blocks.iter().enumerate() {
        for &v in b {
            block_of[v] = i;
        }
    }
    Graph::from_edges_dedup(
        blocks.len(),
        f.edges().iter().map(|&(u, v)| (block_of[u], block_of[v])),
    )
}

fn mobius(blocks: &[Vec<usize>]) -> BigInt {
    let mut mu = BigInt::one();
    for b in blocks {
        let k = b.len() - 1;
        let fact: BigInt = (1..=k).map(BigInt::from).product();
        mu *= fact;
        if k % 2 == 1 {
            mu = -mu;
        }
    }
    mu
}

/// Subgraph count through the spasm: `Σ coeff · hom(F′, g)` gives
/// `inj(f, g)`, which is then divided by `aut(f)`.
pub fn sub_via_spasm(f: &Graph, g: &Graph) -> Result<HomCount> {
    let inj = inj_via_spasm(&spasm(f)?, g)?;
    inj.checked_div(&count_aut(f)?)
}

pub(crate) fn inj_via_spasm(sp: &Spasm, g: &Graph) -> Result<HomCount> {
    let mut total = BigRational::zero();
    for m in &sp.members {
        if m.coefficient.is_zero() {
            continue;
        }
        let hom = BigInt::from(count_hom(&m.graph, g)?.into_inner());
        total += &m.coefficient * BigRational::from_integer(hom);
    }
    if !total.is_integer() || total.is_negative() {
        return Err(Error::InexactDivision(format!(
            "spasm inversion produced {total}"
        )));
    }
    let value: BigUint = total.to_integer().to_biguint().expect("nonnegative");
    Ok(HomCount(value))
}

/// Requires `f1 ∈ spasm(f2)`; returns `hom(f2, g) >= hom(f1, g)`.
pub fn spasm_lower_bound_check(f1: &Graph, f2: &Graph, g: &Graph) -> Result<bool> {
    if !spasm(f2)?.contains(f1)? {
        return Err(Error::Precondition(
            "first pattern is not in the spasm of the second".into(),
        ));
    }
    Ok(count_hom(f2, g)? >= count_hom(f1, g)?)
}

/// Envelope `(m, m²)` for `hom(P3, g)` given `m = hom(P2, g)`.
pub fn p3_interval(m: &BigUint) -> (BigUint, BigUint) {
    (m.clone(), m * m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::is_isomorphic;
    use crate::graph::{clique, cycle, path, paw};
    use crate::hom::count_sub;

    fn member_shapes(sp: &Spasm) -> Vec<(usize, usize)> {
        sp.members
            .iter()
            .map(|m| (m.graph.n(), m.graph.edge_count()))
            .collect()
    }

    #[test]
    fn spasm_examples() {
        let c4 = spasm(&cycle(4)).unwrap();
        assert_eq!(member_shapes(&c4), vec![(4, 4), (3, 2), (2, 1)]);
        assert!(is_isomorphic(&c4.members[1].graph, &path(3)).unwrap());
        assert_eq!(spasm(&clique(3)).unwrap().len(), 1);
        let p3 = spasm(&path(3)).unwrap();
        assert_eq!(member_shapes(&p3), vec![(3, 2), (2, 1)]);
    }

    #[test]
    fn coefficients_of_c4() {
        let c4 = spasm(&cycle(4)).unwrap();
        let coeffs: Vec<String> = c4
            .members
            .iter()
            .map(|m| m.coefficient.to_string())
            .collect();
        assert_eq!(coeffs, vec!["1", "-2", "1"]);
    }

    #[test]
    fn sub_via_spasm_examples() {
        assert_eq!(sub_via_spasm(&cycle(4), &cycle(4)).unwrap(), 1);
        assert_eq!(sub_via_spasm(&path(3), &clique(3)).unwrap(), 3);
        assert_eq!(sub_via_spasm(&clique(3), &path(4)).unwrap(), 0);
        assert_eq!(
            sub_via_spasm(&paw(), &clique(4)).unwrap(),
            count_sub(&paw(), &clique(4)).unwrap()
        );
    }

    #[test]
    fn lower_bound_check() {
        assert!(spasm_lower_bound_check(&path(2), &path(3), &paw()).unwrap());
        assert!(spasm_lower_bound_check(&path(2), &cycle(4), &clique(3)).unwrap());
        assert!(spasm_lower_bound_check(&path(3), &cycle(4), &cycle(4)).unwrap());
        assert!(matches!(
            spasm_lower_bound_check(&clique(3), &cycle(4), &clique(3)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn p3_interval_examples() {
        let (lo, hi) = p3_interval(&BigUint::from(6u32));
        assert_eq!((lo, hi), (BigUint::from(6u32), BigUint::from(36u32)));
        assert_eq!(
            p3_interval(&BigUint::zero()),
            (BigUint::zero(), BigUint::zero())
        );
        let (lo, hi) = p3_interval(&BigUint::from(8u32));
        let actual = count_hom(&path(3), &cycle(4)).unwrap().into_inner();
        assert!(lo <= actual && actual <= hi);
    }

    #[test]
    fn cap_enforced() {
        assert!(matches!(
            spasm(&Graph::empty(11)),
            Err(Error::CapExceeded { .. })
        ));
    }
}
