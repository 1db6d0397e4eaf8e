//! Finite graphs with wrapping rules, the germ calculus, axioms and orientation.

mod axioms;
mod dsl;
mod orientation;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;

use crate::ktheory::matrix::IntegerMatrix;

pub use axioms::{primitivity_exponent, turn_closure, validate_axioms, AxiomOptions, AxiomReport, Expansion, Flattening, Mixing, Nonfolding};
pub use dsl::{parse_solenoid_file, ParseError};
pub use orientation::{orientation_check, OrientationVerdict};

/// Default cap on the total letter count of any expanded rule.
pub const DEFAULT_LETTER_BUDGET: u128 = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeDecl {
    pub id: String,
    pub src: usize,
    pub dst: usize,
}

/// A finite graph with a chosen direction on every edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Graph {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDecl>,
}

impl Graph {
    /// One vertex `v` with a loop for every listed edge id.
    pub fn wedge(edge_ids: &[&str]) -> Self {
        Graph {
            vertices: vec!["v".to_string()],
            edges: edge_ids.iter().map(|id| EdgeDecl { id: id.to_string(), src: 0, dst: 0 }).collect(),
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }
}

/// A letter `e^{±1}` of an edge word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Letter {
    pub edge: usize,
    /// `+1` or `−1`.
    pub sign: i8,
}

impl Letter {
    pub fn pos(edge: usize) -> Self {
        Letter { edge, sign: 1 }
    }

    pub fn neg(edge: usize) -> Self {
        Letter { edge, sign: -1 }
    }

    pub fn inverse(self) -> Self {
        Letter { edge: self.edge, sign: -self.sign }
    }

    /// Germ through which a path traversing this letter arrives at its end vertex.
    pub fn arrival(self) -> Germ {
        if self.sign > 0 {
            Germ::terminal(self.edge)
        } else {
            Germ::start(self.edge)
        }
    }

    /// Germ through which a path traversing this letter leaves its start vertex.
    pub fn departure(self) -> Germ {
        if self.sign > 0 {
            Germ::start(self.edge)
        } else {
            Germ::terminal(self.edge)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    Start,
    Terminal,
}

/// A direction at a vertex: one end of one edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Germ {
    pub edge: usize,
    pub end: End,
}

impl Germ {
    pub fn start(edge: usize) -> Self {
        Germ { edge, end: End::Start }
    }

    pub fn terminal(edge: usize) -> Self {
        Germ { edge, end: End::Terminal }
    }

    /// Dense index `2·edge + (end == Terminal)`.
    pub fn index(self) -> usize {
        2 * self.edge + usize::from(self.end == End::Terminal)
    }

    pub fn from_index(i: usize) -> Self {
        Germ { edge: i / 2, end: if i.is_multiple_of(2) { End::Start } else { End::Terminal } }
    }

    pub fn vertex(self, g: &Graph) -> usize {
        match self.end {
            End::Start => g.edges[self.edge].src,
            End::Terminal => g.edges[self.edge].dst,
        }
    }

    pub fn label(self, g: &Graph) -> String {
        let id = &g.edges[self.edge].id;
        match self.end {
            End::Start => format!("{id}_start"),
            End::Terminal => format!("{id}_term"),
        }
    }
}

/// An unordered pair of germs; the two germs may coincide (a degenerate turn).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Turn(Germ, Germ);

impl Turn {
    pub fn new(a: Germ, b: Germ) -> Self {
        if a <= b {
            Turn(a, b)
        } else {
            Turn(b, a)
        }
    }

    pub fn germs(self) -> (Germ, Germ) {
        (self.0, self.1)
    }

    pub fn is_degenerate(self) -> bool {
        self.0 == self.1
    }

    pub fn contains(self, g: Germ) -> bool {
        self.0 == g || self.1 == g
    }

    /// Turn at the junction of two consecutive letters.
    pub fn at_junction(x: Letter, y: Letter) -> Self {
        Turn::new(x.arrival(), y.departure())
    }

    pub fn map(self, dh: &GermMap) -> Self {
        Turn::new(dh.apply(self.0), dh.apply(self.1))
    }

    pub fn label(self, g: &Graph) -> String {
        format!("{{{},{}}}", self.0.label(g), self.1.label(g))
    }
}

/// The induced map on germs, indexed by [`Germ::index`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GermMap {
    image: Vec<Germ>,
}

impl GermMap {
    pub fn identity(edges: usize) -> Self {
        GermMap { image: (0..2 * edges).map(Germ::from_index).collect() }
    }

    pub fn apply(&self, g: Germ) -> Germ {
        self.image[g.index()]
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &GermMap) -> GermMap {
        GermMap { image: other.image.iter().map(|&g| self.apply(g)).collect() }
    }

    pub fn pow(&self, k: usize) -> GermMap {
        let mut acc = GermMap::identity(self.image.len() / 2);
        for _ in 0..k {
            acc = self.compose(&acc);
        }
        acc
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Germ, Germ)> + '_ {
        self.image.iter().enumerate().map(|(i, &g)| (Germ::from_index(i), g))
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }
}

/// Errors raised when a wrapping rule violates a structural invariant.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RuleError {
    #[error("graph has no edges")]
    NoEdges,
    #[error("edge {edge} has an empty word")]
    EmptyWord { edge: String },
    #[error("letter refers to unknown edge index {index}")]
    UnknownEdge { index: usize },
    #[error("word for edge {edge} is not a path: letter {position} does not start where letter {} ends", position - 1)]
    Continuity { edge: String, position: usize },
    #[error("word for edge {edge} folds: letter {position} cancels the letter before it")]
    AdjacentCancellation { edge: String, position: usize },
    #[error("vertex {vertex} would have to map to both {first} and {second}")]
    VertexImage { vertex: String, first: String, second: String },
    #[error("vertex {vertex} has no incident edge, so its image is undetermined")]
    IsolatedVertex { vertex: String },
    #[error("expanded rule needs {required} letters, over the budget of {budget}")]
    TooLong { required: u128, budget: u128 },
}

/// A graph together with a signed edge word for every edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WrappingRule {
    graph: Graph,
    vertex_image: Vec<usize>,
    words: Vec<Vec<Letter>>,
}

fn letter_start(g: &Graph, l: Letter) -> usize {
    let e = &g.edges[l.edge];
    if l.sign > 0 {
        e.src
    } else {
        e.dst
    }
}

fn letter_end(g: &Graph, l: Letter) -> usize {
    let e = &g.edges[l.edge];
    if l.sign > 0 {
        e.dst
    } else {
        e.src
    }
}

impl WrappingRule {
    /// Validates continuity and the absence of immediate folds, and infers the vertex map.
    pub fn new(graph: Graph, words: Vec<Vec<Letter>>) -> Result<Self, RuleError> {
        if graph.edges.is_empty() {
            return Err(RuleError::NoEdges);
        }
        assert_eq!(words.len(), graph.edges.len(), "one word per edge");
        let mut image: Vec<Option<usize>> = vec![None; graph.vertices.len()];
        for (e, w) in words.iter().enumerate() {
            let id = graph.edges[e].id.clone();
            if w.is_empty() {
                return Err(RuleError::EmptyWord { edge: id });
            }
            if let Some(l) = w.iter().find(|l| l.edge >= graph.edges.len()) {
                return Err(RuleError::UnknownEdge { index: l.edge });
            }
            for k in 1..w.len() {
                if w[k] == w[k - 1].inverse() {
                    return Err(RuleError::AdjacentCancellation { edge: id, position: k });
                }
                if letter_end(&graph, w[k - 1]) != letter_start(&graph, w[k]) {
                    return Err(RuleError::Continuity { edge: id, position: k });
                }
            }
            let decl = &graph.edges[e];
            for (v, target) in [(decl.src, letter_start(&graph, w[0])), (decl.dst, letter_end(&graph, *w.last().unwrap()))] {
                match image[v] {
                    None => image[v] = Some(target),
                    Some(t) if t == target => {}
                    Some(t) => {
                        return Err(RuleError::VertexImage {
                            vertex: graph.vertices[v].clone(),
                            first: graph.vertices[t].clone(),
                            second: graph.vertices[target].clone(),
                        })
                    }
                }
            }
        }
        let vertex_image = image
            .iter()
            .enumerate()
            .map(|(v, t)| t.ok_or_else(|| RuleError::IsolatedVertex { vertex: graph.vertices[v].clone() }))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(WrappingRule { graph, vertex_image, words })
    }

    /// Convenience constructor for single-vertex rules written as `("a", "b a^-1")` pairs.
    pub fn wedge_from_words(rules: &[(&str, &str)]) -> Result<Self, ParseError> {
        let mut text = String::new();
        for (e, w) in rules {
            text.push_str(&format!("rule {e} = {w}\n"));
        }
        parse_solenoid_file(&text)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn vertex_image(&self) -> &[usize] {
        &self.vertex_image
    }

    pub fn words(&self) -> &[Vec<Letter>] {
        &self.words
    }

    pub fn word(&self, e: usize) -> &[Letter] {
        &self.words[e]
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edges.len()
    }

    pub fn is_single_vertex(&self) -> bool {
        self.graph.vertices.len() == 1
    }

    pub fn edge_id(&self, e: usize) -> &str {
        &self.graph.edges[e].id
    }

    /// Renders a word as `b a^-1 …`.
    pub fn word_string(&self, w: &[Letter]) -> String {
        w.iter()
            .map(|l| if l.sign > 0 { self.edge_id(l.edge).to_string() } else { format!("{}^-1", self.edge_id(l.edge)) })
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Canonical DSL text for this rule.
    pub fn to_dsl(&self) -> String {
        let g = &self.graph;
        let mut out = String::new();
        let trivial = g.vertices.len() == 1 && g.vertices[0] == "v";
        if !trivial {
            out.push_str(&format!("vertices: {}\n", g.vertices.join(" ")));
            for e in &g.edges {
                out.push_str(&format!("edge {}: {} -> {}\n", e.id, g.vertices[e.src], g.vertices[e.dst]));
            }
        } else {
            out.push_str(&format!("edges: {}\n", g.edges.iter().map(|e| e.id.as_str()).collect::<Vec<_>>().join(" ")));
        }
        for (e, w) in self.words.iter().enumerate() {
            out.push_str(&format!("rule {} = {}\n", self.edge_id(e), self.word_string(w)));
        }
        out
    }

    /// Image of a signed letter: the word, or its formal inverse.
    pub fn image_of(&self, l: Letter) -> Vec<Letter> {
        let w = &self.words[l.edge];
        if l.sign > 0 {
            w.clone()
        } else {
            w.iter().rev().map(|x| x.inverse()).collect()
        }
    }

    /// Substitutes every letter of `w` by its image.
    pub fn apply_to_word(&self, w: &[Letter]) -> Vec<Letter> {
        w.iter().flat_map(|&l| self.image_of(l)).collect()
    }

    /// Relabels edges: new edge `k` is old edge `order[k]`.
    pub fn renumbered(&self, order: &[usize]) -> WrappingRule {
        let n = self.edge_count();
        assert_eq!(order.len(), n);
        let mut new_index = vec![0; n];
        for (k, &old) in order.iter().enumerate() {
            new_index[old] = k;
        }
        let graph = Graph {
            vertices: self.graph.vertices.clone(),
            edges: order.iter().map(|&o| self.graph.edges[o].clone()).collect(),
        };
        let words = order
            .iter()
            .map(|&o| self.words[o].iter().map(|l| Letter { edge: new_index[l.edge], sign: l.sign }).collect())
            .collect();
        WrappingRule { graph, vertex_image: self.vertex_image.clone(), words }
    }

    /// Reverses the chosen direction of the listed edges.
    pub fn with_flipped_edges(&self, flip: &[bool]) -> WrappingRule {
        let mut graph = self.graph.clone();
        for (e, decl) in graph.edges.iter_mut().enumerate() {
            if flip[e] {
                std::mem::swap(&mut decl.src, &mut decl.dst);
            }
        }
        let relabel = |l: &Letter| if flip[l.edge] { l.inverse() } else { *l };
        let words = self
            .words
            .iter()
            .enumerate()
            .map(|(e, w)| {
                let w: Vec<Letter> = w.iter().map(relabel).collect();
                if flip[e] {
                    w.iter().rev().map(|l| l.inverse()).collect()
                } else {
                    w
                }
            })
            .collect();
        WrappingRule { graph, vertex_image: self.vertex_image.clone(), words }
    }

    /// Letter counts per edge of the `m`-th power: column sums of `H^m`, in `u128`.
    pub fn power_lengths(&self, m: u32) -> Option<Vec<u128>> {
        let n = self.edge_count();
        let mut lens = vec![1u128; n];
        for _ in 0..m {
            let mut next = vec![0u128; n];
            for (e, w) in self.words.iter().enumerate() {
                for l in w {
                    next[e] = next[e].checked_add(lens[l.edge])?;
                }
            }
            lens = next;
        }
        Some(lens)
    }
}

/// `h^m` as a wrapping rule.
pub fn power(rule: &WrappingRule, m: u32) -> Result<WrappingRule, RuleError> {
    power_with_budget(rule, m, DEFAULT_LETTER_BUDGET)
}

pub fn power_with_budget(rule: &WrappingRule, m: u32, budget: u128) -> Result<WrappingRule, RuleError> {
    assert!(m >= 1, "power needs m ≥ 1");
    let total = rule.power_lengths(m).map(|v| v.iter().fold(0u128, |a, b| a.saturating_add(*b))).unwrap_or(u128::MAX);
    if total > budget {
        return Err(RuleError::TooLong { required: total, budget });
    }
    let mut words = rule.words.clone();
    for _ in 1..m {
        words = words.iter().map(|w| rule.apply_to_word(w)).collect();
    }
    let mut vertex_image = rule.vertex_image.clone();
    for _ in 1..m {
        vertex_image = vertex_image.iter().map(|&v| rule.vertex_image[v]).collect();
    }
    Ok(WrappingRule { graph: rule.graph.clone(), vertex_image, words })
}

/// The germ map `Dh`.
pub fn germ_map(rule: &WrappingRule) -> GermMap {
    let mut image = Vec::with_capacity(2 * rule.edge_count());
    for w in &rule.words {
        image.push(w[0].departure());
        image.push(w.last().unwrap().arrival());
    }
    GermMap { image }
}

/// `H_ij` = occurrences of edge `i` (either sign) in the word of edge `j`.
pub fn edge_cover_matrix(rule: &WrappingRule) -> IntegerMatrix {
    let n = rule.edge_count();
    let mut h = IntegerMatrix::zeros(n, n);
    for (j, w) in rule.words.iter().enumerate() {
        for l in w {
            *h.entry_mut(l.edge, j) += 1;
        }
    }
    h
}

/// Turns at the interior junctions of a word, with multiplicity.
pub fn junction_turns(w: &[Letter]) -> impl Iterator<Item = Turn> + '_ {
    w.windows(2).map(|p| Turn::at_junction(p[0], p[1]))
}

/// Counts of each turn occurring in a word.
pub fn turn_counts(w: &[Letter]) -> BTreeMap<Turn, u64> {
    let mut m = BTreeMap::new();
    for t in junction_turns(w) {
        *m.entry(t).or_insert(0) += 1;
    }
    m
}

/// All germs located at each vertex.
pub fn germs_at_vertices(g: &Graph) -> Vec<Vec<Germ>> {
    let mut out = vec![Vec::new(); g.vertices.len()];
    for i in 0..2 * g.edges.len() {
        let germ = Germ::from_index(i);
        out[germ.vertex(g)].push(germ);
    }
    out
}

impl fmt::Display for WrappingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (e, w) in self.words.iter().enumerate() {
            if e > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{} ↦ {}", self.edge_id(e), self.word_string(w))?;
        }
        Ok(())
    }
}

/// Integer vector helper: occurrences of every edge in a word.
pub fn letter_counts(w: &[Letter], edges: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::from(0); edges];
    for l in w {
        c[l.edge] += 1;
    }
    c
}

#[cfg(test)]
pub(crate) mod corpus {
    use super::*;

    pub fn w1() -> WrappingRule {
        WrappingRule::wedge_from_words(&[("a", "a^-1 b^-1"), ("b", "a^-1 b^-1")]).unwrap()
    }
    pub fn w2() -> WrappingRule {
        WrappingRule::wedge_from_words(&[("a", "b a"), ("b", "b a")]).unwrap()
    }
    pub fn w3() -> WrappingRule {
        let a = format!("{} {}", ["a"; 65].join(" "), ["b"; 7].join(" "));
        let b = format!("{} {}", vec!["a"; 24].join(" "), vec!["b"; 67].join(" "));
        WrappingRule::wedge_from_words(&[("a", &a), ("b", &b)]).unwrap()
    }
    pub fn w4() -> WrappingRule {
        WrappingRule::wedge_from_words(&[("a", "b a b^-1"), ("b", "a^-1 b a")]).unwrap()
    }
    pub fn dyadic() -> WrappingRule {
        WrappingRule::wedge_from_words(&[("a", "a a")]).unwrap()
    }
}
