//! Diagrams of modified classes.
//!
//! A modified class determines a graph: one core node per Stokes circle
//! carrying the entry's multiplicity, symmetric integer edge values computed
//! from irregularity and ramification counts, and on each core node a leg
//! encoding its conjugacy class.  Unlike the fission forest, the diagram does
//! not move under twists, scalings or the Fourier transform, which is what
//! makes it useful for recognizing a class across different presentations.

use crate::circle::{irr_hom, StokesCircle};
use crate::exact::SpherePoint;
use crate::formal::{ConjClass, Flavor, GlobalClass};
use crate::{Error, Result};

/// One core node of a diagram.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramNode {
    pub point: SpherePoint,
    pub circle: StokesCircle,
    pub mult: u64,
    /// Multiplicities along the leg glued to this node, inward to outward.
    pub leg: Vec<u64>,
}

/// A core diagram with legs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram {
    pub nodes: Vec<DiagramNode>,
    /// Symmetric edge values between core nodes; a diagonal entry is twice
    /// the number of loops on that node.
    pub b: Vec<Vec<i64>>,
}

/// Leg multiplicities of a conjugacy class: order the distinct eigenvalues
/// by decreasing total multiplicity (ties by eigenvalue key), then after
/// each of the first w - 1 of them record the dimension minus the number of
/// Jordan blocks seen so far, stopping at zero.
pub fn legs(c: &ConjClass) -> Vec<u64> {
    let dim = c.dim();
    let mut eigs: Vec<(u64, u64)> = Vec::new();
    let mut keys: Vec<_> = c.spectrum().iter().collect();
    keys.sort_by(|(ea, ba), (eb, bb)| {
        let ta: u64 = ba.iter().sum();
        let tb: u64 = bb.iter().sum();
        tb.cmp(&ta).then(ea.cmp(eb))
    });
    for (_, blocks) in keys {
        eigs.push((blocks.iter().sum(), blocks.len() as u64));
    }
    let mut out = Vec::new();
    let mut blocks_seen = 0u64;
    for &(_, count) in eigs.iter().take(eigs.len().saturating_sub(1)) {
        blocks_seen += count;
        let d = dim - blocks_seen;
        if d == 0 {
            break;
        }
        out.push(d);
    }
    out
}

fn edge_value(i: &StokesCircle, j: &StokesCircle, same_node: bool) -> Result<i64> {
    let (ai, bi) = (i.irr() as i64, i.ram() as i64);
    let (aj, bj) = (j.irr() as i64, j.ram() as i64);
    let v = match (i.point().is_infinity(), j.point().is_infinity()) {
        (true, true) => {
            let a = irr_hom(i, j)? as i64;
            if same_node {
                a - bi * bi + 1
            } else {
                a - bi * bj
            }
        }
        (false, false) if i.point() == j.point() => {
            let a = irr_hom(i, j)? as i64;
            if same_node {
                a - bi * bi + 1 - 2 * ai * bi
            } else {
                a - bi * bj - ai * bj - aj * bi
            }
        }
        (false, false) => 0,
        (true, false) => bi * (aj + bj),
        (false, true) => bj * (ai + bi),
    };
    Ok(v)
}

/// Builds the diagram of a modified class.
pub fn diagram(g: &GlobalClass) -> Result<Diagram> {
    if g.flavor() != Flavor::Modified {
        return Err(Error::ExpectedModified);
    }
    let mut nodes = Vec::new();
    for local in g.locals() {
        for e in local.entries() {
            nodes.push(DiagramNode {
                point: local.point().clone(),
                circle: e.circle.clone(),
                mult: e.mult,
                leg: legs(&e.class),
            });
        }
    }
    let n = nodes.len();
    let mut b = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = edge_value(&nodes[i].circle, &nodes[j].circle, i == j)?;
            b[i][j] = v;
            b[j][i] = v;
        }
    }
    Ok(Diagram { nodes, b })
}

impl Diagram {
    /// The dimension 2 - (d, (2 Id - B)d) of the quadratic form attached to
    /// the diagram, with legs glued in as chains of weight-one edges and d
    /// the vector of all node multiplicities.
    pub fn dimension(&self) -> i64 {
        let core: Vec<i64> = self.nodes.iter().map(|x| x.mult as i64).collect();
        let mut total_sq: i64 = core.iter().map(|x| x * x).sum();
        let mut quad = 0i64;
        for i in 0..core.len() {
            quad += self.b[i][i] * core[i] * core[i];
            for j in i + 1..core.len() {
                quad += 2 * self.b[i][j] * core[i] * core[j];
            }
        }
        for node in &self.nodes {
            let mut prev = node.mult as i64;
            for &l in &node.leg {
                let l = l as i64;
                total_sq += l * l;
                quad += 2 * prev * l;
                prev = l;
            }
        }
        2 - (2 * total_sq - quad)
    }
}

/// Graph isomorphism of diagrams: a bijection of core nodes preserving
/// multiplicities, legs, loops and edge values.  Points and circles are
/// deliberately not compared; the diagram forgets where nodes came from.
pub fn diagram_eq(x: &Diagram, y: &Diagram) -> bool {
    let n = x.nodes.len();
    if n != y.nodes.len() {
        return false;
    }
    let sig = |d: &Diagram, i: usize| (d.nodes[i].mult, d.nodes[i].leg.clone(), d.b[i][i]);
    let xs: Vec<_> = (0..n).map(|i| sig(x, i)).collect();
    let ys: Vec<_> = (0..n).map(|i| sig(y, i)).collect();
    let mut sx = xs.clone();
    let mut sy = ys.clone();
    sx.sort();
    sy.sort();
    if sx != sy {
        return false;
    }

    // The cores are tiny, so plain backtracking over signature-compatible
    // assignments is plenty.
    fn go(
        i: usize,
        assigned: &mut Vec<usize>,
        used: &mut [bool],
        x: &Diagram,
        y: &Diagram,
        xs: &[(u64, Vec<u64>, i64)],
        ys: &[(u64, Vec<u64>, i64)],
    ) -> bool {
        let n = xs.len();
        if i == n {
            return true;
        }
        for j in 0..n {
            if used[j] || ys[j] != xs[i] {
                continue;
            }
            if (0..i).all(|p| x.b[p][i] == y.b[assigned[p]][j]) {
                used[j] = true;
                assigned.push(j);
                if go(i + 1, assigned, used, x, y, xs, ys) {
                    return true;
                }
                assigned.pop();
                used[j] = false;
            }
        }
        false
    }

    go(0, &mut Vec::new(), &mut vec![false; n], x, y, &xs, &ys)
}
