//! JSON reports, and the forest JSON consumed by `realize`.
//!
//! Rationals are strings like `"5/2"` (integers shorten to `"2"`), points
//! are `"inf"` or a rational, and field order is fixed by the structs here,
//! so serialized reports are byte-stable. Forests round-trip exactly as
//! long as every point, coefficient, and eigenvalue is rational or
//! symbolic; irrational scalars appear in display form and are not
//! accepted back.
//!
//! In forest input, a leaf's `slope` may be omitted (it defaults to the top
//! level, or zero for a tame leaf), `class` may be omitted (a fresh
//! symbolic eigenvalue with unit blocks), and an inner vertex's `mandatory`
//! flag defaults to true.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use wildrep_core::{
    ConjClass, EigVal, ExactScalar, FissionForest, FissionTree, InnerNode, LeafNode, LevelDatum,
    NearbyReadings, Rat, Reading, SpherePoint, TreeNode,
};

use crate::pipeline::{Analysis, CliError};

pub const SCHEMA: &str = "wildrep-report/1";

#[derive(Debug, Serialize, Deserialize)]
pub struct ReportDto {
    pub schema: String,
    pub name: String,
    pub input: String,
    pub k: usize,
    pub enriched_tree: EnrichedDto,
    pub readings: Vec<ReadingDto>,
    pub diagram: DiagramDto,
    pub distinct_forests: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EnrichedDto {
    /// Word of elementary transformations that produced the tree's class.
    pub word: Vec<String>,
    pub point: String,
    pub tree: NodeDto,
    pub groups: Vec<GroupDto>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GroupDto {
    pub lambda: String,
    pub members: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ReadingDto {
    pub label: String,
    pub rank: u64,
    pub finite_singularities: u64,
    pub total_singularities: u64,
    pub forest: ForestDto,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DiagramDto {
    pub nodes: Vec<DiagramNodeDto>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<i64>>,
    pub legs: Vec<Vec<u64>>,
    pub d: Vec<u64>,
    pub dimension: i64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DiagramNodeDto {
    pub point: String,
    pub circle: String,
    pub mult: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ForestDto {
    pub trees: Vec<TreeDto>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TreeDto {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<String>,
    pub root: NodeDto,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NodeDto {
    Inner {
        height: String,
        #[serde(default = "default_true")]
        mandatory: bool,
        children: Vec<NodeDto>,
    },
    Leaf {
        mult: u64,
        levels: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        slope: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        class: Option<Vec<EigDto>>,
        #[serde(default)]
        entry: usize,
    },
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EigDto {
    pub eig: String,
    pub blocks: Vec<u64>,
}

fn class_dto(c: &ConjClass) -> Vec<EigDto> {
    c.spectrum()
        .iter()
        .map(|(e, blocks)| EigDto {
            eig: e.to_string(),
            blocks: blocks.clone(),
        })
        .collect()
}

fn node_dto(n: &TreeNode) -> NodeDto {
    match n {
        TreeNode::Inner(i) => NodeDto::Inner {
            height: i.height.to_string(),
            mandatory: i.mandatory,
            children: i.children.iter().map(node_dto).collect(),
        },
        TreeNode::Leaf(l) => NodeDto::Leaf {
            mult: l.mult,
            levels: l.levels.levels().iter().map(|q| q.to_string()).collect(),
            slope: Some(l.slope.to_string()),
            class: Some(class_dto(&l.class)),
            entry: l.entry,
        },
    }
}

pub fn forest_to_dto(f: &FissionForest) -> ForestDto {
    ForestDto {
        trees: f
            .trees
            .iter()
            .map(|t| TreeDto {
                point: t.point.as_ref().map(|p| p.to_string()),
                root: node_dto(&t.top),
            })
            .collect(),
    }
}

fn reading_dto(r: &Reading) -> ReadingDto {
    ReadingDto {
        label: r.label.clone(),
        rank: r.rank,
        finite_singularities: r.finite_singularities,
        total_singularities: r.total_singularities,
        forest: forest_to_dto(&r.forest),
    }
}

/// Builds the full report for one analysis.
pub fn report(a: &Analysis) -> ReportDto {
    let r: &NearbyReadings = &a.readings;
    let enriched = EnrichedDto {
        word: r.enriched.word().iter().map(|e| e.to_string()).collect(),
        point: r
            .enriched
            .tree()
            .point
            .as_ref()
            .map(|p| p.to_string())
            .unwrap_or_else(|| "inf".to_string()),
        tree: node_dto(&r.enriched.tree().top),
        groups: r
            .enriched
            .groups()
            .iter()
            .map(|g| GroupDto {
                lambda: g.lambda.to_string(),
                members: g.members.clone(),
            })
            .collect(),
    };
    let mut readings = vec![reading_dto(&r.generic)];
    readings.extend(r.nearby.iter().map(reading_dto));
    ReportDto {
        schema: SCHEMA.to_string(),
        name: a.name.clone(),
        input: a.source.clone(),
        k: r.enriched.k(),
        enriched_tree: enriched,
        readings,
        diagram: DiagramDto {
            nodes: a
                .diagram
                .nodes
                .iter()
                .map(|n| DiagramNodeDto {
                    point: n.point.to_string(),
                    circle: n.circle.to_string(),
                    mult: n.mult,
                })
                .collect(),
            b: a.diagram.b.clone(),
            legs: a.diagram.nodes.iter().map(|n| n.leg.clone()).collect(),
            d: a.diagram.nodes.iter().map(|n| n.mult).collect(),
            dimension: a.diagram.dimension(),
        },
        distinct_forests: a.distinct_forests,
    }
}

pub fn to_json(r: &ReportDto) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("report serialization cannot fail");
    s.push('\n');
    s
}

fn parse_rat(s: &str, what: &str) -> Result<Rat, CliError> {
    Rat::from_str(s).map_err(|_| CliError::Semantic(format!("{what} `{s}` is not a rational")))
}

fn eig_from_str(s: &str) -> Result<EigVal, CliError> {
    if let Ok(q) = Rat::from_str(s) {
        return Ok(EigVal::Exact(ExactScalar::from_rat(&q)));
    }
    let (neg, name) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let mut chars = name.chars();
    let head_ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_');
    if !head_ok || chars.any(|c| !c.is_ascii_alphanumeric() && c != '_') {
        return Err(CliError::Semantic(format!(
            "eigenvalue `{s}` is neither a rational nor a symbol"
        )));
    }
    let e = EigVal::symbolic(name);
    Ok(if neg { e.neg() } else { e })
}

struct ForestReader {
    used: std::collections::BTreeSet<String>,
    counter: u64,
}

impl ForestReader {
    fn fresh(&mut self) -> String {
        loop {
            self.counter += 1;
            let name = format!("t{}", self.counter);
            if !self.used.contains(&name) {
                return name;
            }
        }
    }

    fn node(&mut self, dto: &NodeDto) -> Result<TreeNode, CliError> {
        match dto {
            NodeDto::Inner {
                height,
                mandatory,
                children,
            } => {
                let height = parse_rat(height, "vertex height")?;
                let children = children
                    .iter()
                    .map(|c| self.node(c))
                    .collect::<Result<Vec<_>, _>>()?;
                if children.is_empty() {
                    return Err(CliError::Semantic(format!(
                        "the vertex at height {height} has no children"
                    )));
                }
                Ok(TreeNode::Inner(InnerNode {
                    height,
                    mandatory: *mandatory,
                    children,
                }))
            }
            NodeDto::Leaf {
                mult,
                levels,
                slope,
                class,
                entry,
            } => {
                let levels = levels
                    .iter()
                    .map(|l| parse_rat(l, "level"))
                    .collect::<Result<Vec<_>, _>>()?;
                let levels =
                    LevelDatum::new(levels).map_err(|e| CliError::Semantic(e.to_string()))?;
                let slope = match slope {
                    Some(s) => parse_rat(s, "slope")?,
                    None => levels.top().cloned().unwrap_or_default(),
                };
                let class = match class {
                    Some(eigs) => {
                        let pairs = eigs
                            .iter()
                            .map(|e| Ok((eig_from_str(&e.eig)?, e.blocks.clone())))
                            .collect::<Result<Vec<_>, CliError>>()?;
                        ConjClass::new(pairs).map_err(|e| CliError::Semantic(e.to_string()))?
                    }
                    None => ConjClass::new(vec![(EigVal::symbolic(&self.fresh()), vec![1; *mult as usize])])
                        .map_err(|e| CliError::Semantic(e.to_string()))?,
                };
                if class.dim() != *mult {
                    return Err(CliError::Semantic(format!(
                        "leaf class dimension {} does not match its multiplicity {}",
                        class.dim(),
                        mult
                    )));
                }
                Ok(TreeNode::Leaf(LeafNode {
                    mult: *mult,
                    class,
                    levels,
                    slope,
                    entry: *entry,
                }))
            }
        }
    }
}

/// Rebuilds a forest from its JSON form.
pub fn forest_from_dto(dto: &ForestDto) -> Result<FissionForest, CliError> {
    let mut used = std::collections::BTreeSet::new();
    for t in &dto.trees {
        collect_symbols(&t.root, &mut used);
    }
    let mut reader = ForestReader { used, counter: 0 };
    let mut trees = Vec::with_capacity(dto.trees.len());
    for t in &dto.trees {
        let point = match t.point.as_deref() {
            None => None,
            Some("inf") => Some(SpherePoint::Infinity),
            Some(s) => Some(SpherePoint::Finite(ExactScalar::from_rat(&parse_rat(
                s, "point",
            )?))),
        };
        let top = reader.node(&t.root)?;
        trees.push(FissionTree { point, top });
    }
    Ok(FissionForest { trees })
}

fn collect_symbols(dto: &NodeDto, used: &mut std::collections::BTreeSet<String>) {
    match dto {
        NodeDto::Inner { children, .. } => {
            for c in children {
                collect_symbols(c, used);
            }
        }
        NodeDto::Leaf { class, .. } => {
            for e in class.iter().flatten() {
                let name = e.eig.strip_prefix('-').unwrap_or(&e.eig);
                if Rat::from_str(name).is_err() {
                    used.insert(name.to_string());
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::analyze_source;
    use wildrep_core::{is_isomorphic, realize};

    #[test]
    fn reports_round_trip_through_json() {
        let a = analyze_source("class c { at inf: <x^(3)>, <0>; }", false).unwrap();
        let r = report(&a);
        let json = to_json(&r);
        let back: ReportDto = serde_json::from_str(&json).unwrap();
        assert_eq!(to_json(&back), json);
        assert_eq!(back.schema, SCHEMA);
        assert_eq!(back.k, 2);
        assert_eq!(back.readings.len(), 3);
        assert_eq!(back.diagram.dimension, 2);
    }

    #[test]
    fn forests_round_trip_exactly() {
        let a = analyze_source("class c { at inf: <x^(3)>, <0>; }", false).unwrap();
        for r in std::iter::once(&a.readings.generic).chain(a.readings.nearby.iter()) {
            let dto = forest_to_dto(&r.forest);
            let json = serde_json::to_string(&dto).unwrap();
            let back = forest_from_dto(&serde_json::from_str(&json).unwrap()).unwrap();
            assert_eq!(back, r.forest, "reading {}", r.label);
        }
    }

    #[test]
    fn omitted_leaf_fields_get_defaults() {
        let json = r#"{ "trees": [
            { "point": "inf",
              "root": { "height": "2", "children": [
                { "mult": 1, "levels": ["3/2"] },
                { "mult": 2, "levels": [] }
              ] } }
        ] }"#;
        let forest = forest_from_dto(&serde_json::from_str(json).unwrap()).unwrap();
        let leaves = forest.trees[0].leaves();
        assert_eq!(leaves[0].slope, wildrep_core::rat(3, 2));
        assert_eq!(leaves[1].slope, wildrep_core::rat(0, 1));
        assert_eq!(leaves[1].class.dim(), 2);
        // each defaulted class gets its own fresh symbol
        let names: Vec<String> = leaves
            .iter()
            .flat_map(|l| l.class.spectrum().keys().map(|e| e.to_string()))
            .collect();
        assert_eq!(names, vec!["t1", "t2"]);
    }

    #[test]
    fn reading_forests_realize_back_to_the_same_forest() {
        let a = analyze_source("class c { at inf: <x^(3)>, <0>; }", false).unwrap();
        for r in std::iter::once(&a.readings.generic).chain(a.readings.nearby.iter()) {
            let dto = forest_to_dto(&r.forest);
            let back = forest_from_dto(&dto).unwrap();
            let g = realize(&back).unwrap();
            let forest2 = wildrep_core::forest_of(&g).unwrap();
            assert!(is_isomorphic(&back, &forest2), "reading {}", r.label);
        }
    }

    #[test]
    fn bad_forest_fields_are_semantic_errors() {
        let json = r#"{ "trees": [ { "root": { "mult": 1, "levels": ["x"] } } ] }"#;
        let err = forest_from_dto(&serde_json::from_str(json).unwrap()).unwrap_err();
        assert_eq!(err.exit_code(), 3);

        let json = r#"{ "trees": [ { "root": {
            "mult": 2, "levels": [], "class": [ { "eig": "e1", "blocks": [1] } ]
        } } ] }"#;
        let err = forest_from_dto(&serde_json::from_str(json).unwrap()).unwrap_err();
        assert!(matches!(err, CliError::Semantic(m) if m.contains("does not match")));

        let json = r#"{ "trees": [ { "root": {
            "mult": 1, "levels": [], "class": [ { "eig": "3x", "blocks": [1] } ]
        } } ] }"#;
        let err = forest_from_dto(&serde_json::from_str(json).unwrap()).unwrap_err();
        assert!(matches!(err, CliError::Semantic(m) if m.contains("neither")));
    }
}
