use serde::Serialize;

use crate::error::{Error, Result};
use crate::polyfam::PolyFamily;
use crate::tuples::KTuple;

/// `f_{j1}(X) = f_{j2}(X + delta)` with `delta != 0` (0-based member indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ShiftRelation {
    pub j1: usize,
    pub j2: usize,
    pub delta: i128,
}

/// Edge `{i1, i2}` (with `i1 < i2`) of the degeneracy graph, witnessed by
/// `f_{j1}(X + h_{i1}) = f_{j2}(X + h_{i2})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DegeneracyEdge {
    pub i1: usize,
    pub i2: usize,
    pub relation: ShiftRelation,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegeneracyGraph {
    pub k: usize,
    pub edges: Vec<DegeneracyEdge>,
    /// Connected components, singletons included.
    pub components: usize,
    /// Components with at least two vertices.
    pub nonsingleton_components: usize,
}

impl DegeneracyGraph {
    pub fn has_edges(&self) -> bool {
        !self.edges.is_empty()
    }
}

/// All ordered shift relations between members of `f`.
///
/// The shift is read off the two top coefficients,
/// `delta = (a_{d-1}(j1) - a_{d-1}(j2)) / (d a_d)`, then verified by expansion.
pub fn shift_relations(f: &PolyFamily) -> Result<Vec<ShiftRelation>> {
    let members = f.members();
    let mut out = Vec::new();
    for (j1, a) in members.iter().enumerate() {
        for (j2, b) in members.iter().enumerate() {
            if j1 == j2 || a.degree() != b.degree() || a.leading() != b.leading() {
                continue;
            }
            let d = a.degree();
            let num = a.coeffs()[d - 1] - b.coeffs()[d - 1];
            let den = d as i128 * a.leading();
            if num == 0 || num % den != 0 {
                continue;
            }
            let delta = num / den;
            if b.shift(delta)? == *a {
                out.push(ShiftRelation { j1, j2, delta });
            }
        }
    }
    Ok(out)
}

/// Graph on tuple indices joining `i1, i2` whenever some shift relation makes
/// two members of the composed family coincide.
pub fn degeneracy_graph(f: &PolyFamily, h: &KTuple) -> Result<DegeneracyGraph> {
    if !h.is_distinct() {
        return Err(Error::Degenerate(format!("tuple {:?} has repeated entries", h.entries())));
    }
    let rels = shift_relations(f)?;
    let e = h.entries();
    let k = e.len();
    let mut edges = Vec::new();
    for i1 in 0..k {
        for i2 in i1 + 1..k {
            let diff = e[i2] as i128 - e[i1] as i128;
            // f_{j1}(X + h_{i1}) = f_{j2}(X + h_{i1} + delta) = f_{j2}(X + h_{i2})
            edges.extend(
                rels.iter()
                    .filter(|r| r.delta == diff)
                    .map(|&relation| DegeneracyEdge { i1, i2, relation }),
            );
        }
    }
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = x;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for edge in &edges {
        let (a, b) = (find(&mut parent, edge.i1), find(&mut parent, edge.i2));
        if a != b {
            parent[a] = b;
        }
    }
    let mut sizes = vec![0usize; k];
    for v in 0..k {
        let r = find(&mut parent, v);
        sizes[r] += 1;
    }
    Ok(DegeneracyGraph {
        k,
        components: sizes.iter().filter(|&&s| s > 0).count(),
        nonsingleton_components: sizes.iter().filter(|&&s| s > 1).count(),
        edges,
    })
}

/// Whether `f o h` has pairwise distinct members.
pub fn composed_is_primitive(f: &PolyFamily, h: &KTuple) -> Result<bool> {
    if !h.is_distinct() {
        return Err(Error::Degenerate(format!("tuple {:?} has repeated entries", h.entries())));
    }
    let composed = f.compose(h)?;
    Ok(composed.distinct_member_count() == composed.m())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tuples::enumerate_distinct;

    fn fam(s: &str) -> PolyFamily {
        s.parse().unwrap()
    }

    fn tuple(v: &[u64]) -> KTuple {
        KTuple::new(v.to_vec()).unwrap()
    }

    const QUAD: &str = "x^2+7,x^2+4*x+11,x^2+8*x+23";

    #[test]
    fn twin_relations() {
        let rels = shift_relations(&fam("x,x+2")).unwrap();
        assert_eq!(
            rels,
            vec![
                ShiftRelation { j1: 0, j2: 1, delta: -2 },
                ShiftRelation { j1: 1, j2: 0, delta: 2 },
            ]
        );
        // f_1(X) = f_2(X - 2)
        let f = fam("x,x+2");
        assert_eq!(f.members()[1].shift(-2).unwrap(), f.members()[0]);
    }

    #[test]
    fn no_relations_for_distinct_leading() {
        assert!(shift_relations(&fam("x,2*x+1")).unwrap().is_empty());
    }

    #[test]
    fn quadratic_chain_relations() {
        let rels = shift_relations(&fam(QUAD)).unwrap();
        assert_eq!(rels.len(), 6);
        let mut deltas: Vec<i128> = rels.iter().map(|r| r.delta).collect();
        deltas.sort_unstable();
        assert_eq!(deltas, vec![-4, -2, -2, 2, 2, 4]);
        // f_1(X+2) = f_2(X) and f_2(X+2) = f_3(X)
        assert!(rels.contains(&ShiftRelation { j1: 1, j2: 0, delta: 2 }));
        assert!(rels.contains(&ShiftRelation { j1: 2, j2: 1, delta: 2 }));
    }

    #[test]
    fn graph_examples() {
        let g = degeneracy_graph(&fam("x,x+2"), &tuple(&[3, 1])).unwrap();
        assert_eq!(g.edges.len(), 1);
        assert_eq!((g.edges[0].i1, g.edges[0].i2), (0, 1));
        assert_eq!((g.components, g.nonsingleton_components), (1, 1));

        let g = degeneracy_graph(&fam("x,2*x+1"), &tuple(&[1, 5, 9])).unwrap();
        assert!(!g.has_edges());
        assert_eq!((g.components, g.nonsingleton_components), (3, 0));

        let g = degeneracy_graph(&fam(QUAD), &tuple(&[1, 3])).unwrap();
        assert_eq!((g.components, g.nonsingleton_components), (1, 1));
        assert!(g.edges.iter().all(|e| (e.i1, e.i2) == (0, 1)));
    }

    #[test]
    fn composed_primitivity_examples() {
        assert!(composed_is_primitive(&fam("x,x+2"), &tuple(&[1, 2])).unwrap());
        assert!(!composed_is_primitive(&fam("x,x+2"), &tuple(&[3, 1])).unwrap());
        for h in enumerate_distinct(2, 8).unwrap().iter() {
            assert!(composed_is_primitive(&fam("x^2+1"), &h).unwrap());
        }
        assert!(composed_is_primitive(&fam("x"), &tuple(&[2, 2])).is_err());
    }

    #[test]
    fn graph_edges_iff_imprimitive() {
        for f in [fam("x,x+2"), fam(QUAD), fam("x,x+6,2*x+1")] {
            for k in 1..=3 {
                for h in enumerate_distinct(k, 9).unwrap().iter() {
                    let g = degeneracy_graph(&f, &h).unwrap();
                    assert_eq!(g.has_edges(), !composed_is_primitive(&f, &h).unwrap(), "{f} {h:?}");
                }
            }
        }
    }

    #[test]
    fn distinct_members_lower_bound() {
        // |f o h| >= c m + d
        for f in [fam("x,x+2"), fam(QUAD), fam("x,x+2,x+6")] {
            for k in 1..=3 {
                for h in enumerate_distinct(k, 12).unwrap().iter() {
                    let g = degeneracy_graph(&f, &h).unwrap();
                    let n = f.compose(&h).unwrap().distinct_member_count();
                    assert!(
                        n >= g.components * f.m() + g.nonsingleton_components,
                        "{f} {h:?}: {n} < {} * {} + {}",
                        g.components,
                        f.m(),
                        g.nonsingleton_components
                    );
                }
            }
        }
    }

    #[test]
    fn twin_imprimitive_count_is_two_h_minus_two() {
        let f = fam("x,x+2");
        for h in [3u64, 4, 10, 57, 200] {
            let bad = enumerate_distinct(2, h)
                .unwrap()
                .iter()
                .filter(|t| !composed_is_primitive(&f, t).unwrap())
                .count() as u64;
            assert_eq!(bad, 2 * (h - 2), "h={h}");
        }
    }
}
