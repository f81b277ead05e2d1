//! Nearby readings of a formal class.
//!
//! Genericizing a class parks every circle at infinity with a well defined
//! quadratic parameter lambda.  Each finite lambda value shared by a group of
//! circles yields one further reading of the class: untwist that value and
//! apply the Fourier transform, so exactly that group drops to the finite
//! part of the sphere.  Together with the generic reading (the fission forest
//! of the genericized class itself) this gives k + 1 readings, where k is the
//! number of groups.
//!
//! The enriched tree records how the readings fit together: it is the fission
//! tree of the genericized class grown up to height at least two, and the
//! groups sit below its height-two vertices.

use std::collections::{BTreeMap, BTreeSet};

use crate::exact::{rat_i, ExactScalar, SpherePoint};
use crate::fission::{
    build_tree_upto, canonical_form_with_classes, FissionForest, FissionTree, TreeNode,
};
use crate::formal::GlobalClass;
use crate::sl2::{
    apply_word, forest_of_shapes, genericize, lambda_coeff, shape_datum, shape_of, Elementary,
    ShapeClass,
};
use crate::{Error, Result};

/// Entries of the genericized class sharing one finite lambda value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub lambda: ExactScalar,
    /// Indices into the genericized shape class, ascending.
    pub members: Vec<usize>,
}

/// The fission tree of the genericized class, grown to height at least two,
/// together with the lambda grouping of its entries.
#[derive(Debug, Clone)]
pub struct EnrichedTree {
    shapes: ShapeClass,
    word: Vec<Elementary>,
    tree: FissionTree,
    groups: Vec<Group>,
}

/// One reading of a class: the fission forest seen after moving a chosen
/// group of circles to the finite part of the sphere.
#[derive(Debug, Clone)]
pub struct Reading {
    pub label: String,
    /// Rank left at infinity.
    pub rank: u64,
    pub finite_singularities: u64,
    pub total_singularities: u64,
    pub forest: FissionForest,
}

/// The generic reading plus one reading per lambda group.
#[derive(Debug, Clone)]
pub struct NearbyReadings {
    pub enriched: EnrichedTree,
    pub generic: Reading,
    pub nearby: Vec<Reading>,
}

fn collect_at_two<'a>(node: &'a TreeNode, out: &mut Vec<&'a TreeNode>) {
    if let TreeNode::Inner(n) = node {
        if n.height == rat_i(2) {
            out.push(node);
        } else if n.height > rat_i(2) {
            // Heights strictly decrease downwards, so nothing below a vertex
            // of height under two can sit at height two.
            for c in &n.children {
                collect_at_two(c, out);
            }
        }
    }
}

impl EnrichedTree {
    /// The genericized shape class the tree was built from.
    pub fn shapes(&self) -> &ShapeClass {
        &self.shapes
    }

    /// The genericizing word, acting left to right.
    pub fn word(&self) -> &[Elementary] {
        &self.word
    }

    pub fn tree(&self) -> &FissionTree {
        &self.tree
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    /// Number of lambda groups, hence of non-generic readings.
    pub fn k(&self) -> usize {
        self.groups.len()
    }

    /// The height-two vertex of the tree above the given group.
    pub fn principal_subtree(&self, group: usize) -> Result<&TreeNode> {
        let g = self
            .groups
            .get(group)
            .ok_or_else(|| Error::Invalid("no such reading group".into()))?;
        let mut cands = Vec::new();
        collect_at_two(&self.tree.top, &mut cands);
        for node in cands {
            let set: BTreeSet<usize> = node.leaves().iter().map(|l| l.entry).collect();
            if g.members.iter().all(|m| set.contains(m)) {
                return Ok(node);
            }
        }
        Err(Error::Invalid(
            "reading group has no vertex at height two".into(),
        ))
    }

    /// Number of finite singularities of the reading for the given group,
    /// read off the tree: the children of its height-two vertex sitting at
    /// height exactly one.
    pub fn finite_singularities(&self, group: usize) -> Result<u64> {
        let node = self.principal_subtree(group)?;
        let TreeNode::Inner(n) = node else {
            return Err(Error::Invalid("height-two vertex is a leaf".into()));
        };
        let one = rat_i(1);
        Ok(n.children
            .iter()
            .filter(|c| c.top_height() == Some(&one))
            .count() as u64)
    }

    /// Isomorphism key: the class-inclusive canonical form of the tree plus
    /// the multiset of principal subtrees.  Lambda values are left out on
    /// purpose, they move under twists while the tree does not.
    pub fn invariant_key(&self) -> Result<String> {
        let whole = canonical_form_with_classes(&self.tree);
        let mut subs = Vec::with_capacity(self.groups.len());
        for i in 0..self.groups.len() {
            let t = FissionTree {
                point: None,
                top: self.principal_subtree(i)?.clone(),
            };
            subs.push(canonical_form_with_classes(&t));
        }
        subs.sort();
        Ok(format!("{}|{}", whole, subs.join(",")))
    }
}

/// Builds the enriched tree of an already flattened shape class.
pub fn enriched_of_shapes(sc: &ShapeClass) -> Result<EnrichedTree> {
    let (shapes, word) = genericize(sc)?;
    debug_assert!(shapes.entries().iter().all(|e| e.shape.point.is_infinity()));
    let idxs: Vec<usize> = (0..shapes.entries().len()).collect();
    let datum = shape_datum(&shapes, &idxs)?;
    debug_assert_eq!(datum.len(), idxs.len());
    let upto = datum.natural_upto().max(rat_i(2));
    let mut tree = build_tree_upto(&datum, &upto)?;
    tree.point = Some(SpherePoint::Infinity);
    let mut by_lambda: BTreeMap<ExactScalar, Vec<usize>> = BTreeMap::new();
    for (i, e) in shapes.entries().iter().enumerate() {
        if let Some(l) = lambda_coeff(&e.shape) {
            by_lambda.entry(l).or_default().push(i);
        }
    }
    let groups = by_lambda
        .into_iter()
        .map(|(lambda, members)| Group { lambda, members })
        .collect();
    Ok(EnrichedTree {
        shapes,
        word,
        tree,
        groups,
    })
}

/// Builds the enriched tree of a modified class.
pub fn enriched_tree(g: &GlobalClass) -> Result<EnrichedTree> {
    enriched_of_shapes(&shape_of(g)?)
}

/// All k + 1 readings of an already flattened shape class.
pub fn readings_of_shapes(sc: &ShapeClass) -> Result<NearbyReadings> {
    let enriched = enriched_of_shapes(sc)?;
    let generic = Reading {
        label: "generic".into(),
        rank: enriched.shapes.rank(),
        finite_singularities: 0,
        total_singularities: 1,
        forest: forest_of_shapes(&enriched.shapes)?,
    };
    let mut nearby = Vec::with_capacity(enriched.groups.len());
    for g in &enriched.groups {
        let a = g
            .lambda
            .to_rat()
            .ok_or_else(|| Error::IrrationalParameter(g.lambda.to_string()))?;
        let word = vec![Elementary::Twist(-a), Elementary::Fourier];
        let out = apply_word(&enriched.shapes, &word)?;
        let finite = out.points().iter().filter(|p| !p.is_infinity()).count() as u64;
        nearby.push(Reading {
            label: g.lambda.to_string(),
            rank: out.rank_at(&SpherePoint::Infinity),
            finite_singularities: finite,
            total_singularities: finite + 1,
            forest: forest_of_shapes(&out)?,
        });
    }
    Ok(NearbyReadings {
        enriched,
        generic,
        nearby,
    })
}

/// All k + 1 readings of a modified class.
pub fn readings(g: &GlobalClass) -> Result<NearbyReadings> {
    readings_of_shapes(&shape_of(g)?)
}

/// Rank at infinity of the reading for the given group, computed from level
/// data alone: group members keep rank only above level one, every other
/// grouped entry keeps its full ramification, and ungrouped entries shrink
/// under the stationary phase rescaling.
pub fn reading_rank(e: &EnrichedTree, group: usize) -> Result<u64> {
    let members: BTreeSet<usize> = e
        .groups
        .get(group)
        .ok_or_else(|| Error::Invalid("no such reading group".into()))?
        .members
        .iter()
        .copied()
        .collect();
    let grouped: BTreeSet<usize> = e
        .groups
        .iter()
        .flat_map(|g| g.members.iter().copied())
        .collect();
    let one = rat_i(1);
    let two = rat_i(2);
    let mut rank = 0u64;
    for (i, entry) in e.shapes.entries().iter().enumerate() {
        let n = entry.mult;
        if members.contains(&i) {
            let ds = entry.shape.deep.slope();
            if ds > one && ds < two {
                rank += n * (entry.shape.deep.irr - entry.shape.deep.ram);
            }
        } else if grouped.contains(&i) {
            rank += n * entry.shape.ram_total();
        } else {
            rank += n * (entry.shape.irr_total() - entry.shape.ram_total());
        }
    }
    Ok(rank)
}

fn forest_rank_at_infinity(f: &FissionForest) -> u64 {
    f.trees
        .iter()
        .filter(|t| t.point == Some(SpherePoint::Infinity))
        .flat_map(|t| t.leaves())
        .map(|l| l.mult * l.levels.ram())
        .sum()
}

/// Checks each reading against the enriched tree: the rank left at infinity
/// must match the level count and the forest, and the finite singularities
/// must match the height-one children of the group's height-two vertex.
pub fn verify_readings(r: &NearbyReadings) -> Result<()> {
    for (i, reading) in r.nearby.iter().enumerate() {
        let closed = reading_rank(&r.enriched, i)?;
        if reading.rank != closed {
            return Err(Error::Invalid(format!(
                "reading {} has rank {} but its levels predict {}",
                reading.label, reading.rank, closed
            )));
        }
        let from_forest = forest_rank_at_infinity(&reading.forest);
        if reading.rank != from_forest {
            return Err(Error::Invalid(format!(
                "reading {} has rank {} but its forest carries {}",
                reading.label, reading.rank, from_forest
            )));
        }
        let from_tree = r.enriched.finite_singularities(i)?;
        if reading.finite_singularities != from_tree {
            return Err(Error::Invalid(format!(
                "reading {} has {} finite singularities but the tree shows {}",
                reading.label, reading.finite_singularities, from_tree
            )));
        }
    }
    Ok(())
}

/// Number of pairwise non-isomorphic forests among all k + 1 readings.
pub fn distinct_forest_count(r: &NearbyReadings) -> usize {
    let mut set = BTreeSet::new();
    set.insert(r.generic.forest.canonical_form());
    for n in &r.nearby {
        set.insert(n.forest.canonical_form());
    }
    set.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{ExpFactor, StokesCircle};
    use crate::exact::rat;
    use crate::fission::canonical_form;
    use crate::formal::{ConjClass, EigVal, Flavor, GlobalClass, LocalClass, LocalEntry};

    fn sym(name: &str) -> ConjClass {
        ConjClass::new(vec![(EigVal::symbolic(name), vec![1])]).unwrap()
    }

    fn circle(terms: &[((i64, i64), i64)]) -> StokesCircle {
        let terms = terms
            .iter()
            .map(|&((n, d), c)| (rat(n, d), ExactScalar::from_int(c)))
            .collect();
        StokesCircle::new(ExpFactor::new(SpherePoint::Infinity, terms).unwrap())
    }

    fn at_infinity(circles: Vec<(StokesCircle, &str)>) -> GlobalClass {
        let entries = circles
            .into_iter()
            .map(|(circle, name)| LocalEntry {
                circle,
                mult: 1,
                class: sym(name),
            })
            .collect();
        let local = LocalClass::new(SpherePoint::Infinity, entries).unwrap();
        GlobalClass::new(Flavor::Modified, vec![local]).unwrap()
    }

    fn profile(r: &NearbyReadings) -> Vec<(u64, u64)> {
        let mut out: Vec<(u64, u64)> = std::iter::once(&r.generic)
            .chain(r.nearby.iter())
            .map(|x| (x.rank, x.total_singularities))
            .collect();
        out.sort();
        out
    }

    #[test]
    fn a_cubic_and_a_tame_circle_give_three_readings() {
        let g = at_infinity(vec![
            (circle(&[((3, 1), 1)]), "t1"),
            (StokesCircle::tame(SpherePoint::Infinity), "t2"),
        ]);
        let r = readings(&g).unwrap();
        assert_eq!(r.enriched.k(), 2);
        assert_eq!(
            r.enriched.word(),
            &[Elementary::Twist(rat(1, 1)), Elementary::Fourier]
        );

        // Groups come out sorted by lambda: the twisted tame circle first.
        assert_eq!(r.enriched.groups()[0].lambda, ExactScalar::from_int(-1));
        assert_eq!(r.enriched.groups()[0].members, vec![0]);
        assert!(r.enriched.groups()[1].lambda.is_zero());
        assert_eq!(r.enriched.groups()[1].members, vec![1]);

        assert_eq!((r.generic.rank, r.generic.total_singularities), (3, 1));
        assert_eq!(profile(&r), vec![(2, 1), (2, 2), (3, 1)]);

        assert_eq!(r.enriched.finite_singularities(0).unwrap(), 1);
        assert_eq!(r.enriched.finite_singularities(1).unwrap(), 0);
        assert_eq!(reading_rank(&r.enriched, 0).unwrap(), 2);
        assert_eq!(reading_rank(&r.enriched, 1).unwrap(), 2);
        verify_readings(&r).unwrap();

        assert_eq!(distinct_forest_count(&r), 3);
        let subs: BTreeSet<String> = (0..2)
            .map(|i| {
                let t = FissionTree {
                    point: None,
                    top: r.enriched.principal_subtree(i).unwrap().clone(),
                };
                canonical_form(&t)
            })
            .collect();
        assert_eq!(distinct_forest_count(&r), 1 + subs.len());
    }

    #[test]
    fn a_single_steep_circle_keeps_one_group() {
        let g = at_infinity(vec![(circle(&[((5, 2), 1)]), "t1")]);
        let r = readings(&g).unwrap();
        // Slope 5/2 has no lambda of its own; only its Fourier image, of
        // slope 5/3, is grouped.
        assert_eq!(r.enriched.k(), 1);
        assert!(r.enriched.groups()[0].lambda.is_zero());
        assert_eq!(profile(&r), vec![(2, 1), (3, 1)]);
        assert_eq!(r.enriched.finite_singularities(0).unwrap(), 0);
        verify_readings(&r).unwrap();
        assert_eq!(distinct_forest_count(&r), 2);
    }

    #[test]
    fn a_group_may_split_between_infinity_and_a_finite_point() {
        let g = at_infinity(vec![
            (circle(&[((3, 2), 1)]), "t1"),
            (StokesCircle::tame(SpherePoint::Infinity), "t2"),
        ]);
        let r = readings(&g).unwrap();
        // Both circles twist to quadratic coefficient -1/2, so they share
        // one lambda; under its reading the slope 3/2 part stays at
        // infinity while the tame part lands at a finite point.
        assert_eq!(r.enriched.k(), 1);
        assert_eq!(r.nearby.len(), 1);
        assert_eq!(r.nearby[0].rank, 1);
        assert_eq!(r.nearby[0].finite_singularities, 1);
        assert_eq!(r.nearby[0].total_singularities, 2);
        assert_eq!(reading_rank(&r.enriched, 0).unwrap(), 1);
        verify_readings(&r).unwrap();
    }

    #[test]
    fn irrational_quadratic_coefficients_are_reported() {
        let root2 = ExactScalar::from_int(2).pow(&rat(1, 2)).unwrap();
        let q = ExpFactor::new(SpherePoint::Infinity, vec![(rat(2, 1), root2)]).unwrap();
        let local = LocalClass::new(
            SpherePoint::Infinity,
            vec![LocalEntry {
                circle: StokesCircle::new(q),
                mult: 1,
                class: sym("t1"),
            }],
        )
        .unwrap();
        let g = GlobalClass::new(Flavor::Modified, vec![local]).unwrap();
        assert!(enriched_tree(&g).is_ok());
        assert!(matches!(readings(&g), Err(Error::IrrationalParameter(_))));
    }

    #[test]
    fn the_enriched_tree_survives_twists_and_the_transform() {
        let g = at_infinity(vec![
            (circle(&[((3, 1), 1)]), "t1"),
            (StokesCircle::tame(SpherePoint::Infinity), "t2"),
        ]);
        let sc = shape_of(&g).unwrap();
        let base = enriched_of_shapes(&sc).unwrap().invariant_key().unwrap();
        for word in [
            vec![Elementary::Twist(rat(7, 1))],
            vec![Elementary::Scale(rat(3, 1))],
            vec![Elementary::Fourier],
            vec![Elementary::Twist(rat(-2, 1)), Elementary::Fourier],
        ] {
            let moved = apply_word(&sc, &word).unwrap();
            let key = enriched_of_shapes(&moved).unwrap().invariant_key().unwrap();
            assert_eq!(key, base, "word {:?}", word);
        }
    }
}
