//! End-to-end flows through the public API on hand-worked examples: classes
//! built directly from parts, their diagrams checked against hand
//! computations of the Cartan dimension formula, one Fourier crossing
//! checked coefficient by coefficient, and a hand-written tree realized
//! back into a class.

use std::collections::BTreeSet;

use wildrep_core::{
    apply_word, diagram, fission_exponent, forest_of, is_isomorphic, rat, rat_i, readings,
    realize, shape_of, verify_readings, ConjClass, EigVal, Elementary, ExactScalar, ExpFactor,
    FissionForest, FissionTree, Flavor, GlobalClass, InnerNode, LeafNode, LevelDatum, LocalClass,
    LocalEntry, SpherePoint, StokesCircle, TreeNode,
};

fn finite(k: i64) -> SpherePoint {
    SpherePoint::Finite(ExactScalar::from_rat(&rat_i(k)))
}

fn symbols(names: &[&str]) -> ConjClass {
    ConjClass::new(
        names
            .iter()
            .map(|n| (EigVal::symbolic(n), vec![1]))
            .collect(),
    )
    .expect("distinct unit blocks")
}

fn tame_entry(point: &SpherePoint, class: ConjClass) -> LocalEntry {
    LocalEntry {
        circle: StokesCircle::tame(point.clone()),
        mult: class.dim(),
        class,
    }
}

fn wild_entry(point: &SpherePoint, terms: Vec<(Rat, ExactScalar)>, class: ConjClass) -> LocalEntry {
    let q = ExpFactor::new(point.clone(), terms).expect("well-formed factor");
    LocalEntry {
        circle: StokesCircle::new(q),
        mult: class.dim(),
        class,
    }
}

use wildrep_core::Rat;

/// Three generic tame points: rank two at infinity, rank one at 0 and 1.
/// The diagram is a star whose Cartan form is definite, so the moduli
/// dimension comes out 0 (the classical rigid case), unlike the four-point
/// class of the same shape which has dimension 2.
#[test]
fn three_tame_points_make_a_rigid_star() {
    let g = GlobalClass::new(
        Flavor::Modified,
        vec![
            LocalClass::new(
                SpherePoint::Infinity,
                vec![tame_entry(&SpherePoint::Infinity, symbols(&["t1", "t2"]))],
            )
            .unwrap(),
            LocalClass::new(finite(0), vec![tame_entry(&finite(0), symbols(&["t3"]))]).unwrap(),
            LocalClass::new(finite(1), vec![tame_entry(&finite(1), symbols(&["t4"]))]).unwrap(),
        ],
    )
    .unwrap();

    let d = diagram(&g).unwrap();
    let nodes: Vec<(String, String, u64, Vec<u64>)> = d
        .nodes
        .iter()
        .map(|n| {
            (
                n.point.to_string(),
                n.circle.to_string(),
                n.mult,
                n.leg.clone(),
            )
        })
        .collect();
    assert_eq!(
        nodes,
        vec![
            ("inf".into(), "<0>".into(), 2, vec![1]),
            ("0".into(), "<0>".into(), 1, vec![]),
            ("1".into(), "<0>".into(), 1, vec![]),
        ]
    );
    assert_eq!(d.b, vec![vec![0, 1, 1], vec![1, 0, 0], vec![1, 0, 0]]);
    // by hand: with the leg node attached, d = (2,1,1,1) and C = 2I - B
    // gives d'Cd = 2, so the dimension is 2 - 2 = 0
    assert_eq!(d.dimension(), 0);

    let r = readings(&g).unwrap();
    verify_readings(&r).unwrap();
    // the generic reading gathers the whole rank at one singularity
    assert_eq!(r.generic.rank, 4);
    assert_eq!(r.generic.total_singularities, 1);
}

/// Doubling the multiplicity of a circle changes the dimension vector but
/// no edge of the diagram, and leaves the enriched tree alone.
#[test]
fn multiplicity_scales_the_dimension_vector_not_the_edges() {
    let inf = SpherePoint::Infinity;
    let doubled = ConjClass::new(vec![(EigVal::symbolic("t2"), vec![1, 1])]).unwrap();
    let g = GlobalClass::new(
        Flavor::Modified,
        vec![LocalClass::new(
            inf.clone(),
            vec![
                tame_entry(&inf, symbols(&["t1"])),
                wild_entry(&inf, vec![(rat_i(3), ExactScalar::one())], doubled),
            ],
        )
        .unwrap()],
    )
    .unwrap();

    let d = diagram(&g).unwrap();
    // same circles as the single-multiplicity class, hence the same edges
    assert_eq!(d.b, vec![vec![0, 2], vec![2, 0]]);
    let mults: Vec<u64> = d.nodes.iter().map(|n| n.mult).collect();
    assert_eq!(mults, vec![1, 2]);
    assert!(d.nodes.iter().all(|n| n.leg.is_empty()));
    // by hand: C = [[2,-2],[-2,2]], d = (1,2), d'Cd = 2, dimension 0
    assert_eq!(d.dimension(), 0);

    let r = readings(&g).unwrap();
    verify_readings(&r).unwrap();
    // the tree only sees the circles, so the group count matches the
    // multiplicity-one class
    assert_eq!(r.enriched.k(), 2);
    assert_eq!(r.nearby.len(), 2);
}

/// One slope-1/3 circle at infinity crossing to a finite point: the
/// ramification drops by the irregularity, the levels rescale by r/(r-s),
/// and the eigenvalues pick up the sign (-1)^s.
#[test]
fn a_shallow_circle_crosses_the_sphere_under_fourier() {
    let two = ConjClass::new(vec![(
        EigVal::Exact(ExactScalar::from_rat(&rat_i(2))),
        vec![1],
    )])
    .unwrap();
    let g = GlobalClass::new(
        Flavor::Modified,
        vec![LocalClass::new(
            SpherePoint::Infinity,
            vec![wild_entry(
                &SpherePoint::Infinity,
                vec![(rat(1, 3), ExactScalar::one())],
                two,
            )],
        )
        .unwrap()],
    )
    .unwrap();

    let s = shape_of(&g).unwrap();
    assert_eq!(s.rank(), 3);
    let t = apply_word(&s, &[Elementary::Fourier]).unwrap();
    assert_eq!(t.entries().len(), 1);
    let e = &t.entries()[0];
    assert_eq!(e.shape.point, finite(0));
    assert_eq!(e.shape.deep.ram, 2);
    assert_eq!(e.shape.deep.irr, 1);
    assert_eq!(e.shape.deep.levels.levels().to_vec(), vec![rat(1, 2)]);
    assert_eq!(e.shape.slope_total(), rat(1, 2));
    assert_eq!(e.mult, 1);
    assert_eq!(t.rank(), 2);

    let negated = ConjClass::new(vec![(
        EigVal::Exact(ExactScalar::from_rat(&rat_i(-2))),
        vec![1],
    )])
    .unwrap();
    assert_eq!(e.class, negated);
}

/// A tree written out by hand, in the shape the builder produces (each
/// leaf under the chain of its admissible vertices, branches merging at
/// the first shared vertex above their fission exponent), realizes to a
/// concrete class that reads back to the same tree.
#[test]
fn a_hand_written_tree_realizes_and_reads_back() {
    let three = ConjClass::new(vec![(
        EigVal::Exact(ExactScalar::from_rat(&rat_i(3))),
        vec![1],
    )])
    .unwrap();
    let mut wild = TreeNode::Leaf(LeafNode {
        mult: 1,
        class: three.clone(),
        levels: LevelDatum::new(vec![rat(3, 2)]).unwrap(),
        slope: rat(3, 2),
        entry: 0,
    });
    // the half-integer grid below the level 3/2; only the level itself
    // must carry a term
    for h in [rat(1, 2), rat_i(1), rat(3, 2)] {
        let mandatory = h == rat(3, 2);
        wild = TreeNode::Inner(InnerNode {
            height: h,
            mandatory,
            children: vec![wild],
        });
    }
    let plain = TreeNode::Inner(InnerNode {
        height: rat_i(1),
        mandatory: false,
        children: vec![TreeNode::Leaf(LeafNode {
            mult: 1,
            class: symbols(&["m"]),
            levels: LevelDatum::default(),
            slope: rat_i(0),
            entry: 1,
        })],
    });
    // the branch tops 3/2 and 1 read back as fission exponent 3/2; the
    // merge vertex 2 is the first integer above it
    let forest = FissionForest {
        trees: vec![FissionTree {
            point: Some(SpherePoint::Infinity),
            top: TreeNode::Inner(InnerNode {
                height: rat_i(2),
                mandatory: false,
                children: vec![wild, plain],
            }),
        }],
    };

    let g = realize(&forest).unwrap();
    let local = &g.locals()[0];
    assert_eq!(local.point(), &SpherePoint::Infinity);
    assert_eq!(local.entries().len(), 2);
    assert_eq!(local.rank(), 3);
    let wild = local.entries().iter().find(|e| e.circle.ram() == 2).unwrap();
    let plain = local.entries().iter().find(|e| e.circle.ram() == 1).unwrap();
    // the ramified leaf keeps its recorded slope, level, and class
    assert_eq!(wild.circle.slope(), rat(3, 2));
    assert_eq!(wild.circle.levels(), BTreeSet::from([rat(3, 2)]));
    assert_eq!(wild.class, three);
    // the other branch is free to carry a marker term, but stays
    // unramified and keeps its class
    assert_eq!(plain.circle.levels(), BTreeSet::new());
    assert_eq!(plain.class, symbols(&["m"]));
    // the two circles become distinguishable exactly at the branch tops
    assert_eq!(
        fission_exponent(&wild.circle, &plain.circle).unwrap(),
        rat(3, 2)
    );

    let back = forest_of(&g).unwrap();
    assert!(is_isomorphic(&back, &forest));
}
