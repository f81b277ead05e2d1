//! Fission trees and forests.
//!
//! A fission datum records, for the circles at one point, their level data
//! and the pairwise fission exponents. The datum is displayed as a rooted
//! tree whose inner vertices sit at exponent heights; building the tree
//! validates that the datum is realizable, and `realize` produces a concrete
//! global class whose fission data reproduce the forest.

use crate::circle::{fission_exponent, ExpFactor, StokesCircle};
use crate::exact::{next_multiple_above, rat_i, ExactScalar, Rat, SpherePoint};
use crate::formal::{ConjClass, Flavor, GlobalClass, LocalClass, LocalEntry};
use crate::{Error, Result};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// The levels of a circle, stored in strictly decreasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LevelDatum {
    levels: Vec<Rat>,
}

impl LevelDatum {
    pub fn new(levels: impl IntoIterator<Item = Rat>) -> Result<Self> {
        let mut levels: Vec<Rat> = levels.into_iter().collect();
        levels.sort_by(|a, b| b.cmp(a));
        levels.dedup();
        if levels.iter().any(|l| !l.is_positive()) {
            return Err(Error::Invalid("levels must be strictly positive".into()));
        }
        Ok(LevelDatum { levels })
    }

    /// Filters a set of exponents down to its levels: scanning downward, an
    /// exponent is a level exactly when it enlarges the running denominator
    /// lcm. In particular integer exponents are never levels.
    pub fn from_exponents(exponents: impl IntoIterator<Item = Rat>) -> Self {
        let mut exponents: Vec<Rat> = exponents.into_iter().collect();
        exponents.sort_by(|a, b| b.cmp(a));
        let mut levels = Vec::new();
        let mut running = num_bigint::BigInt::from(1);
        for k in exponents {
            let next = running.lcm(k.denom());
            if next != running {
                running = next;
                levels.push(k);
            }
        }
        LevelDatum { levels }
    }

    /// Levels in strictly decreasing order.
    pub fn levels(&self) -> &[Rat] {
        &self.levels
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn top(&self) -> Option<&Rat> {
        self.levels.first()
    }

    pub fn contains(&self, h: &Rat) -> bool {
        self.levels.contains(h)
    }

    /// Least common multiple of the level denominators.
    pub fn ram(&self) -> u64 {
        self.levels.iter().fold(1u64, |acc, l| {
            acc.lcm(&l.denom().to_u64().expect("level denominator exceeds u64"))
        })
    }

    /// The possible branch-vertex heights for a circle with these levels:
    /// descending through the levels, the admissible exponents refine from
    /// integers above the top level to multiples of `1/ram` below the last,
    /// each segment half-open from below.
    pub fn possible_exponents(&self, upto: &Rat) -> Vec<Rat> {
        let mut out: BTreeSet<Rat> = BTreeSet::new();
        let top = self.top().cloned().unwrap_or_else(Rat::zero);
        // Integers in (top, upto].
        let one = rat_i(1);
        let mut k = next_multiple_above(&one, &top);
        while k <= *upto {
            out.insert(k.clone());
            k += &one;
        }
        // Multiples of the partial ram in (next level down, this level].
        let mut running = 1u64;
        for (i, l) in self.levels.iter().enumerate() {
            running = running.lcm(&l.denom().to_u64().expect("level denominator exceeds u64"));
            let lower = self
                .levels
                .get(i + 1)
                .cloned()
                .unwrap_or_else(Rat::zero);
            let step = rat_i(1) / rat_i(running as i64);
            let mut k = next_multiple_above(&step, &lower);
            while k <= *l {
                out.insert(k.clone());
                k += &step;
            }
        }
        out.into_iter().rev().collect()
    }
}

impl fmt::Display for LevelDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.levels.iter().map(|l| l.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// One entry of a fission datum: the level data, slope, multiplicity, and
/// conjugacy class of a circle, with the circle itself forgotten.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FissionEntry {
    pub levels: LevelDatum,
    pub slope: Rat,
    pub mult: u64,
    pub class: ConjClass,
}

impl FissionEntry {
    /// A slope is consistent with level data when it is zero on empty
    /// levels, equal to the top level, or an integer above it (a fractional
    /// top exponent is always a level).
    fn check_slope(&self) -> Result<()> {
        let ok = match self.levels.top() {
            None => self.slope.is_integer() && !self.slope.is_negative(),
            Some(top) => {
                self.slope == *top || (self.slope.is_integer() && self.slope > *top)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Invalid(format!(
                "slope {} is inconsistent with levels {}",
                self.slope, self.levels
            )))
        }
    }

}

/// The fission data at one point: entries plus the symmetric matrix of
/// pairwise fission exponents. Entries at exponent distance zero are merged
/// on construction, so stored off-diagonal exponents are strictly positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FissionDatum {
    entries: Vec<FissionEntry>,
    fission: Vec<Vec<Rat>>,
}

impl FissionDatum {
    pub fn new(entries: Vec<FissionEntry>, fission: Vec<Vec<Rat>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::Invalid("a fission datum needs at least one entry".into()));
        }
        if fission.len() != n || fission.iter().any(|row| row.len() != n) {
            return Err(Error::Invalid("fission matrix shape mismatch".into()));
        }
        for e in &entries {
            e.check_slope()?;
            if e.mult == 0 || e.class.dim() != e.mult {
                return Err(Error::Invalid(
                    "entry multiplicity must be positive and match its class dimension".into(),
                ));
            }
        }
        for i in 0..n {
            if !fission[i][i].is_zero() {
                return Err(Error::Invalid("fission exponent of an entry with itself must be zero".into()));
            }
            for j in 0..n {
                if fission[i][j] != fission[j][i] || fission[i][j].is_negative() {
                    return Err(Error::Invalid("fission matrix must be symmetric and nonnegative".into()));
                }
            }
        }
        // Merge entries at distance zero; the relation is transitive for
        // realizable data, and we reject it when it is not.
        let mut group_of: Vec<Option<usize>> = vec![None; n];
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for i in 0..n {
            if group_of[i].is_some() {
                continue;
            }
            let gid = groups.len();
            let mut members = vec![i];
            group_of[i] = Some(gid);
            for j in i + 1..n {
                if fission[i][j].is_zero() {
                    if group_of[j].is_some() {
                        return Err(Error::Invalid("zero fission exponents are not transitive".into()));
                    }
                    group_of[j] = Some(gid);
                    members.push(j);
                }
            }
            groups.push(members);
        }
        let mut merged_entries = Vec::with_capacity(groups.len());
        for members in &groups {
            let first = &entries[members[0]];
            let mut mult = 0;
            let mut spectrum: BTreeMap<_, Vec<u64>> = BTreeMap::new();
            for &i in members {
                let e = &entries[i];
                if e.levels != first.levels || e.slope != first.slope {
                    return Err(Error::Invalid(
                        "entries at fission distance zero must share levels and slope".into(),
                    ));
                }
                mult += e.mult;
                for (eig, blocks) in e.class.spectrum() {
                    spectrum.entry(eig.clone()).or_default().extend(blocks.iter().copied());
                }
            }
            merged_entries.push(FissionEntry {
                levels: first.levels.clone(),
                slope: first.slope.clone(),
                mult,
                class: ConjClass::new(spectrum.into_iter().collect())?,
            });
        }
        let m = groups.len();
        let mut merged_f = vec![vec![Rat::zero(); m]; m];
        for a in 0..m {
            for b in 0..m {
                if a == b {
                    continue;
                }
                let v = &fission[groups[a][0]][groups[b][0]];
                for &i in &groups[a] {
                    for &j in &groups[b] {
                        if &fission[i][j] != v {
                            return Err(Error::Invalid(
                                "fission exponents disagree across entries at distance zero".into(),
                            ));
                        }
                    }
                }
                merged_f[a][b] = v.clone();
            }
        }
        Ok(FissionDatum {
            entries: merged_entries,
            fission: merged_f,
        })
    }

    pub fn entries(&self) -> &[FissionEntry] {
        &self.entries
    }

    pub fn f(&self, i: usize, j: usize) -> &Rat {
        &self.fission[i][j]
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The default vertex ceiling: nothing above the leaf data for a single
    /// entry, one integer step above the largest fission exponent otherwise.
    pub fn natural_upto(&self) -> Rat {
        if self.len() == 1 {
            return Rat::zero();
        }
        let mut max = Rat::zero();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                max = max.max(self.fission[i][j].clone());
            }
        }
        max.floor() + rat_i(1)
    }
}

/// Reads the fission datum off a local class.
pub fn fission_datum(l: &LocalClass) -> Result<FissionDatum> {
    let entries: Vec<FissionEntry> = l
        .entries()
        .iter()
        .map(|e| FissionEntry {
            levels: LevelDatum::from_exponents(
                e.circle.rep().terms().iter().map(|(k, _)| k.clone()),
            ),
            slope: e.circle.slope(),
            mult: e.mult,
            class: e.class.clone(),
        })
        .collect();
    let n = entries.len();
    let mut fission = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let f = fission_exponent(&l.entries()[i].circle, &l.entries()[j].circle)?;
            fission[i][j] = f.clone();
            fission[j][i] = f;
        }
    }
    FissionDatum::new(entries, fission)
}

/// A vertex of a fission tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeNode {
    Inner(InnerNode),
    Leaf(LeafNode),
}

/// An inner vertex at an exponent height. Mandatory vertices sit at a level
/// of every leaf below them; optional vertices mark admissible but unused
/// exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InnerNode {
    pub height: Rat,
    pub mandatory: bool,
    pub children: Vec<TreeNode>,
}

/// A leaf carrying the data of one fission entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafNode {
    pub mult: u64,
    pub class: ConjClass,
    pub levels: LevelDatum,
    pub slope: Rat,
    /// Index of the originating entry in the datum the tree was built from.
    pub entry: usize,
}

impl TreeNode {
    /// Height of this node if inner, `None` for a leaf.
    pub fn top_height(&self) -> Option<&Rat> {
        match self {
            TreeNode::Inner(n) => Some(&n.height),
            TreeNode::Leaf(_) => None,
        }
    }

    /// All leaves below this node, left to right.
    pub fn leaves(&self) -> Vec<&LeafNode> {
        match self {
            TreeNode::Leaf(l) => vec![l],
            TreeNode::Inner(n) => n.children.iter().flat_map(|c| c.leaves()).collect(),
        }
    }
}

/// A fission tree: a formal root above a single top vertex (or lone leaf),
/// optionally pinned to a point of the sphere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FissionTree {
    pub point: Option<SpherePoint>,
    pub top: TreeNode,
}

impl FissionTree {
    pub fn leaves(&self) -> Vec<&LeafNode> {
        self.top.leaves()
    }
}

/// A multiset of fission trees.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FissionForest {
    pub trees: Vec<FissionTree>,
}

struct Builder<'a> {
    datum: &'a FissionDatum,
    vertices: Vec<Vec<Rat>>,
}

impl<'a> Builder<'a> {
    fn cluster(&self, members: &[usize], ub: Option<&Rat>) -> Result<TreeNode> {
        if members.len() == 1 {
            let i = members[0];
            let e = &self.datum.entries[i];
            let mut node = TreeNode::Leaf(LeafNode {
                mult: e.mult,
                class: e.class.clone(),
                levels: e.levels.clone(),
                slope: e.slope.clone(),
                entry: i,
            });
            for h in self.vertices[i].iter().rev() {
                if let Some(ub) = ub {
                    if h >= ub {
                        continue;
                    }
                }
                node = TreeNode::Inner(InnerNode {
                    height: h.clone(),
                    mandatory: e.levels.contains(h),
                    children: vec![node],
                });
            }
            return Ok(node);
        }
        // Pairs merge at their join: the least admissible vertex strictly
        // above their fission exponent. The topmost join is this vertex.
        let mut joins: BTreeMap<(usize, usize), Rat> = BTreeMap::new();
        let mut top = Rat::zero();
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                let h = self.join(i, j)?;
                top = top.max(h.clone());
                joins.insert((i.min(j), i.max(j)), h);
            }
        }
        let jn = |i: usize, j: usize| &joins[&(i.min(j), i.max(j))];
        // Split into connected components of the relation join < top.
        let mut part_of: Vec<Option<usize>> = vec![None; members.len()];
        let mut parts: Vec<Vec<usize>> = Vec::new();
        for a in 0..members.len() {
            if part_of[a].is_some() {
                continue;
            }
            let pid = parts.len();
            let mut stack = vec![a];
            part_of[a] = Some(pid);
            let mut part = Vec::new();
            while let Some(x) = stack.pop() {
                part.push(members[x]);
                for (b, &j) in members.iter().enumerate() {
                    if part_of[b].is_none() && jn(members[x], j) < &top {
                        part_of[b] = Some(pid);
                        stack.push(b);
                    }
                }
            }
            parts.push(part);
        }
        for part in &parts {
            for (a, &i) in part.iter().enumerate() {
                for &j in &part[a + 1..] {
                    if jn(i, j) == &top {
                        return Err(Error::Unrealizable(format!(
                            "fission exponents are not ultrametric: entries {i} and {j} merge at \
                             {top} yet sit inside a cluster glued strictly below it"
                        )));
                    }
                }
            }
        }
        let children = parts
            .iter()
            .map(|part| self.cluster(part, Some(&top)))
            .collect::<Result<Vec<_>>>()?;
        let mut node = TreeNode::Inner(InnerNode {
            height: top.clone(),
            mandatory: self.mandatory_at(members, &top)?,
            children,
        });
        // Shared chain above the merge vertex, bounded by the parent if any.
        let chain: BTreeSet<Rat> = self.vertices[members[0]]
            .iter()
            .filter(|h| {
                **h > top
                    && match ub {
                        Some(ub) => *h < ub,
                        None => true,
                    }
            })
            .cloned()
            .collect();
        for h in chain {
            node = TreeNode::Inner(InnerNode {
                height: h.clone(),
                mandatory: self.mandatory_at(members, &h)?,
                children: vec![node],
            });
        }
        Ok(node)
    }

    /// The height where two branches merge: the least admissible vertex
    /// strictly above their fission exponent. The pair checks in
    /// [`build_tree_upto`] guarantee both grids agree up there.
    fn join(&self, i: usize, j: usize) -> Result<Rat> {
        let f = self.datum.f(i, j);
        self.vertices[i]
            .iter()
            .chain(self.vertices[j].iter())
            .filter(|h| *h > f)
            .min()
            .cloned()
            .ok_or_else(|| {
                Error::Unrealizable(format!(
                    "no admissible vertex above the fission exponent {f} of entries {i} and {j}"
                ))
            })
    }

    fn mandatory_at(&self, members: &[usize], h: &Rat) -> Result<bool> {
        let flag = self.datum.entries[members[0]].levels.contains(h);
        for &i in &members[1..] {
            if self.datum.entries[i].levels.contains(h) != flag {
                return Err(Error::Unrealizable(format!(
                    "leaves below the vertex at {h} disagree on whether it is a level"
                )));
            }
        }
        Ok(flag)
    }
}

/// Builds the fission tree of a datum with the default vertex ceiling.
pub fn build_tree(datum: &FissionDatum) -> Result<FissionTree> {
    build_tree_upto(datum, &datum.natural_upto())
}

/// Builds the fission tree with an explicit vertex ceiling, validating the
/// datum along the way and verifying afterwards that the tree reads back to
/// the datum's fission exponents.
pub fn build_tree_upto(datum: &FissionDatum, upto: &Rat) -> Result<FissionTree> {
    let vertices: Vec<Vec<Rat>> = datum
        .entries
        .iter()
        .map(|e| e.levels.possible_exponents(upto))
        .collect();
    for i in 0..datum.len() {
        for j in i + 1..datum.len() {
            let f = datum.f(i, j);
            if !vertices[i].contains(f) && !vertices[j].contains(f) {
                return Err(Error::Unrealizable(format!(
                    "fission exponent {f} of entries {i} and {j} is not an admissible vertex \
                     height for either"
                )));
            }
            fn above<'a>(v: &'a [Rat], f: &Rat) -> Vec<&'a Rat> {
                v.iter().filter(|h| *h > f).collect()
            }
            if above(&vertices[i], f) != above(&vertices[j], f) {
                return Err(Error::Unrealizable(format!(
                    "entries {i} and {j} admit different vertices above their fission exponent {f}"
                )));
            }
            let li: Vec<&Rat> = datum.entries[i].levels.levels().iter().filter(|l| *l > f).collect();
            let lj: Vec<&Rat> = datum.entries[j].levels.levels().iter().filter(|l| *l > f).collect();
            if li != lj {
                return Err(Error::Unrealizable(format!(
                    "entries {i} and {j} carry different levels above their fission exponent {f}"
                )));
            }
        }
    }
    let builder = Builder {
        datum,
        vertices,
    };
    let members: Vec<usize> = (0..datum.len()).collect();
    let top = builder.cluster(&members, None)?;
    let tree = FissionTree { point: None, top };
    verify_readback(&tree.top, datum)?;
    Ok(tree)
}

/// Checks that for every pair of leaves, the heights of the topmost vertices
/// strictly below their meet reproduce the datum's fission exponent.
fn verify_readback(node: &TreeNode, datum: &FissionDatum) -> Result<()> {
    let TreeNode::Inner(inner) = node else {
        return Ok(());
    };
    for (a, ca) in inner.children.iter().enumerate() {
        for cb in &inner.children[a + 1..] {
            let ta = ca.top_height().cloned().unwrap_or_else(Rat::zero);
            let tb = cb.top_height().cloned().unwrap_or_else(Rat::zero);
            let reconstructed = ta.max(tb);
            for li in ca.leaves() {
                for lj in cb.leaves() {
                    if datum.f(li.entry, lj.entry) != &reconstructed {
                        return Err(Error::Unrealizable(format!(
                            "tree reads back exponent {reconstructed} for entries {} and {} \
                             instead of {}",
                            li.entry,
                            lj.entry,
                            datum.f(li.entry, lj.entry)
                        )));
                    }
                }
            }
        }
    }
    for c in &inner.children {
        verify_readback(c, datum)?;
    }
    Ok(())
}

fn canonical_node(node: &TreeNode, with_classes: bool) -> String {
    match node {
        TreeNode::Leaf(l) => {
            let mut s = format!("L(m={},lv={})", l.mult, l.levels);
            if with_classes {
                s.push_str(&format!(",c={}", l.class));
            }
            s
        }
        TreeNode::Inner(n) => {
            let mut keys: Vec<String> = n
                .children
                .iter()
                .map(|c| canonical_node(c, with_classes))
                .collect();
            keys.sort();
            format!(
                "N(h={},{}[{}])",
                n.height,
                if n.mandatory { "*" } else { "-" },
                keys.join(";")
            )
        }
    }
}

/// A canonical key for the shape of a tree: vertex heights, mandatory flags,
/// leaf multiplicities and levels. Classes, slopes, and point annotations are
/// deliberately not part of it.
pub fn canonical_form(tree: &FissionTree) -> String {
    format!("wfv1:{}", canonical_node(&tree.top, false))
}

/// Like [`canonical_form`] but with leaf conjugacy classes included.
pub fn canonical_form_with_classes(tree: &FissionTree) -> String {
    format!("wfv1c:{}", canonical_node(&tree.top, true))
}

impl FissionForest {
    fn sorted_keys(&self, with_classes: bool) -> Vec<String> {
        let mut keys: Vec<String> = self
            .trees
            .iter()
            .map(|t| format!("wf:{}", canonical_node(&t.top, with_classes)))
            .collect();
        keys.sort();
        keys
    }

    /// Canonical key of the whole forest, as an unordered multiset of trees.
    pub fn canonical_form(&self) -> String {
        format!("wfv1:{{{}}}", self.sorted_keys(false).join(","))
    }

    pub fn canonical_form_with_classes(&self) -> String {
        format!("wfv1c:{{{}}}", self.sorted_keys(true).join(","))
    }
}

/// Forest isomorphism: equality of canonical forms, so classes, slopes, and
/// points are ignored.
pub fn is_isomorphic(a: &FissionForest, b: &FissionForest) -> bool {
    a.canonical_form() == b.canonical_form()
}

/// The fission forest of a modified global class: one tree per point, each
/// annotated with its point.
pub fn forest_of(g: &GlobalClass) -> Result<FissionForest> {
    if g.flavor() != Flavor::Modified {
        return Err(Error::ExpectedModified);
    }
    let mut trees = Vec::new();
    for l in g.locals() {
        let datum = fission_datum(l)?;
        let mut tree = build_tree(&datum)?;
        tree.point = Some(l.point().clone());
        trees.push(tree);
    }
    Ok(FissionForest { trees })
}

fn small_primes() -> impl Iterator<Item = u64> {
    (2u64..).filter(|n| {
        let mut d = 2;
        while d * d <= *n {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    })
}

struct Realizer<I: Iterator<Item = u64>> {
    primes: I,
}

impl<I: Iterator<Item = u64>> Realizer<I> {
    fn walk(
        &mut self,
        node: &TreeNode,
        inherited: Vec<(Rat, ExactScalar)>,
        out: &mut Vec<(LeafNode, Vec<(Rat, ExactScalar)>)>,
    ) -> Result<()> {
        match node {
            TreeNode::Leaf(l) => {
                let mut terms = inherited;
                for lv in l.levels.levels() {
                    if !terms.iter().any(|(k, _)| k == lv) {
                        terms.push((lv.clone(), ExactScalar::one()));
                    }
                }
                if l.slope.is_positive() && terms.iter().all(|(k, _)| *k < l.slope) {
                    terms.push((l.slope.clone(), ExactScalar::one()));
                }
                out.push((l.clone(), terms));
                Ok(())
            }
            TreeNode::Inner(n) => {
                let mut terms = inherited;
                if n.mandatory && !terms.iter().any(|(k, _)| k == &n.height) {
                    terms.push((n.height.clone(), ExactScalar::one()));
                }
                if n.children.len() > 1 {
                    let bare = n
                        .children
                        .iter()
                        .filter(|c| c.top_height().is_none())
                        .count();
                    if bare > 1 {
                        return Err(Error::Unrealizable(format!(
                            "two sibling leaves hang bare below the vertex at {}; they would \
                             realize identically",
                            n.height
                        )));
                    }
                }
                for c in &n.children {
                    let mut sub = terms.clone();
                    if n.children.len() > 1 {
                        if let Some(t) = c.top_height() {
                            let p = self.primes.next().expect("prime stream is infinite");
                            sub.push((t.clone(), ExactScalar::from_int(p as i64)));
                        }
                    }
                    self.walk(c, sub, out)?;
                }
                Ok(())
            }
        }
    }
}

/// Produces a concrete modified global class whose fission forest is
/// isomorphic to the given one and whose finite-distance slopes match the
/// recorded leaf slopes. Sibling branches are told apart by marker terms
/// with distinct prime coefficients; annotated trees keep their points,
/// unannotated trees are planted at fresh small integers.
pub fn realize(forest: &FissionForest) -> Result<GlobalClass> {
    let mut used: BTreeSet<SpherePoint> = BTreeSet::new();
    for t in &forest.trees {
        if let Some(p) = &t.point {
            if !used.insert(p.clone()) {
                return Err(Error::Unrealizable(format!(
                    "two trees are planted at the same point {p}"
                )));
            }
        }
    }
    let mut next_int = 0i64;
    let mut realizer = Realizer {
        primes: small_primes(),
    };
    let mut locals = Vec::new();
    for t in &forest.trees {
        let point = match &t.point {
            Some(p) => p.clone(),
            None => loop {
                let candidate = SpherePoint::Finite(ExactScalar::from_int(next_int));
                next_int += 1;
                if !used.contains(&candidate) {
                    used.insert(candidate.clone());
                    break candidate;
                }
            },
        };
        let mut leaves = Vec::new();
        realizer.walk(&t.top, Vec::new(), &mut leaves)?;
        let mut entries = Vec::new();
        for (leaf, terms) in leaves {
            let q = ExpFactor::new(point.clone(), terms)?;
            entries.push(LocalEntry {
                circle: StokesCircle::new(q),
                mult: leaf.mult,
                class: leaf.class,
            });
        }
        locals.push(LocalClass::new(point, entries)?);
    }
    GlobalClass::new(Flavor::Modified, locals)
}

impl fmt::Display for FissionTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(p) = &self.point {
            write!(f, "@{p}:")?;
        }
        fmt_node(&self.top, f)
    }
}

fn fmt_node(node: &TreeNode, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match node {
        TreeNode::Leaf(l) => {
            write!(f, "#{}", l.mult)?;
            if !l.levels.is_empty() {
                write!(f, "{}", l.levels)?;
            }
            Ok(())
        }
        TreeNode::Inner(n) => {
            write!(f, "({}{}", n.height, if n.mandatory { "*" } else { "" })?;
            for c in &n.children {
                write!(f, " ")?;
                fmt_node(c, f)?;
            }
            write!(f, ")")
        }
    }
}

impl fmt::Display for FissionForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, t) in self.trees.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "}}")
    }
}
