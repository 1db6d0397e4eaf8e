//! Diagram construction: germ normalization, the length table, descent through the
//! block structure, adic paths and the Vershik map.

use std::collections::BTreeSet;

use serde::Serialize;

use super::DihedralError;
use crate::building_blocks::PassageSystem;
use crate::ktheory::matrix::IntegerMatrix;
use crate::presolenoid::{edge_cover_matrix, germ_map, power, End, Germ, GermMap, Letter, WrappingRule};

/// Hard cap on the depth of the length table.
const MAX_TABLE_DEPTH: usize = 64;

/// One incoming arrow of a vertex: the letter at that slot of the vertex's word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArrowLabel {
    pub slot: usize,
    pub source: String,
    pub sign: i8,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagramNormalization {
    /// Whether the stabilized rule had to be squared once more.
    pub extra_squaring: bool,
    /// Input edge ids in their new order.
    pub renumbering: Vec<String>,
    /// `"j = 1"` when both limit germs sit on the first edge, `"j = n"` otherwise.
    pub case: String,
    pub limit_germs: [String; 2],
    pub log: Vec<String>,
}

/// The stationary ordered diagram of a single-vertex rule `g`.
#[derive(Clone, Debug, Serialize)]
pub struct OrderedBratteli {
    pub edge_ids: Vec<String>,
    /// Words of the diagram rule, in DSL letter syntax.
    pub words: Vec<String>,
    /// `a_ij` = occurrences of `e_j` in `g(e_i)`.
    pub incidence: IntegerMatrix,
    /// Level-one vertices `(+, i)` and `(−, i)`.
    pub level_one: Vec<String>,
    /// Incoming arrows of every vertex in increasing order.
    pub order: Vec<Vec<ArrowLabel>>,
    /// Number of germ-map iterations after which every germ lands on a limit germ.
    pub exit_depth: usize,
    pub normalization: DiagramNormalization,
    #[serde(skip)]
    pub(crate) rule: WrappingRule,
    /// `lengths[k][c] = |g^k(e_c)|` for every depth that fits in `u128`.
    #[serde(skip)]
    pub(crate) lengths: Vec<Vec<u128>>,
    /// Words of `g^t` for `t = exit_depth`.
    #[serde(skip)]
    pub(crate) exit_words: Vec<Vec<Letter>>,
    /// `Dg^t`.
    #[serde(skip)]
    pub(crate) exit_germs: GermMap,
    #[serde(skip)]
    pub(crate) limit: [Germ; 2],
}

fn image_set(dg: &GermMap, of: &BTreeSet<Germ>) -> BTreeSet<Germ> {
    of.iter().map(|&g| dg.apply(g)).collect()
}

/// Eventual image of the germ map and the number of steps needed to reach it.
fn eventual_image(rule: &WrappingRule) -> (BTreeSet<Germ>, usize) {
    let dg = germ_map(rule);
    let mut current: BTreeSet<Germ> = (0..2 * rule.edge_count()).map(Germ::from_index).collect();
    let mut steps = 0;
    loop {
        let next = image_set(&dg, &current);
        if next == current {
            return (current, steps);
        }
        current = next;
        steps += 1;
    }
}

fn germ_label(rule: &WrappingRule, g: Germ) -> String {
    g.label(rule.graph())
}

fn letter_string(rule: &WrappingRule, l: Letter) -> String {
    if l.sign > 0 {
        rule.edge_id(l.edge).to_string()
    } else {
        format!("{}^-1", rule.edge_id(l.edge))
    }
}

/// Builds the ordered diagram of the stabilized rule of `ps`.
///
/// The rule is squared once more if its germ map swaps the two limit germs, and the
/// edges are renumbered so the start-type limit germ lies on the first edge and the other
/// limit germ on the last edge.
pub fn build_diagram(ps: &PassageSystem) -> Result<OrderedBratteli, DihedralError> {
    let mut g = ps.rule.clone();
    if !g.is_single_vertex() {
        return Err(DihedralError::Unsupported(
            "the dihedral model needs a single-vertex rule; reducing a general graph to a wedge of circles is out of scope".into(),
        ));
    }
    let mut log = Vec::new();
    let (mut limit, _) = eventual_image(&g);
    if limit.len() != 2 {
        return Err(DihedralError::Normalization(format!(
            "the germ map has an eventual image of {} germs; a pre-solenoid needs exactly 2",
            limit.len()
        )));
    }
    let mut extra_squaring = false;
    let dg = germ_map(&g);
    if limit.iter().any(|&x| dg.apply(x) != x) {
        g = power(&g, 2).map_err(|e| DihedralError::Normalization(e.to_string()))?;
        extra_squaring = true;
        log.push("the germ map swaps the limit germs: square the rule".to_string());
        limit = eventual_image(&g).0;
    }
    let limit_vec: Vec<Germ> = limit.iter().copied().collect();
    let (first, last) = match (limit_vec[0].end, limit_vec[1].end) {
        (End::Start, _) => (limit_vec[0], limit_vec[1]),
        (_, End::Start) => (limit_vec[1], limit_vec[0]),
        _ => {
            log.push("both limit germs are terminal germs".to_string());
            (limit_vec[0], limit_vec[1])
        }
    };
    let n = g.edge_count();
    let mut order = vec![first.edge];
    order.extend((0..n).filter(|&e| e != first.edge && e != last.edge));
    if last.edge != first.edge {
        order.push(last.edge);
    }
    let case = if first.edge == last.edge { "j = 1" } else { "j = n" };
    log.push(format!(
        "limit germs {} and {}: {} becomes the first edge ({case})",
        germ_label(&g, first),
        germ_label(&g, last),
        g.edge_id(first.edge)
    ));
    let renumbering: Vec<String> = order.iter().map(|&e| g.edge_id(e).to_string()).collect();
    let g = g.renumbered(&order);
    let (limit_set, t) = eventual_image(&g);
    let limit_vec: Vec<Germ> = limit_set.into_iter().collect();
    let limit = [limit_vec[0], limit_vec[1]];
    let dg = germ_map(&g);
    if limit.iter().any(|&x| dg.apply(x) != x) {
        return Err(DihedralError::Consistency("limit germs are not fixed after normalization".into()));
    }
    let exit_words = if t == 0 {
        (0..n).map(|e| vec![Letter::pos(e)]).collect()
    } else {
        power(&g, t as u32).map_err(|e| DihedralError::Normalization(e.to_string()))?.words().to_vec()
    };
    let mut lengths = vec![vec![1u128; n]];
    while lengths.len() <= MAX_TABLE_DEPTH {
        let prev = lengths.last().unwrap();
        let mut next = Vec::with_capacity(n);
        let mut ok = true;
        for w in g.words() {
            match w.iter().try_fold(0u128, |acc, l| acc.checked_add(prev[l.edge])) {
                Some(v) => next.push(v),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            break;
        }
        lengths.push(next);
    }
    let incidence = edge_cover_matrix(&g).transpose();
    let order_tables = g
        .words()
        .iter()
        .map(|w| {
            w.iter()
                .enumerate()
                .map(|(slot, &l)| ArrowLabel { slot, source: g.edge_id(l.edge).to_string(), sign: l.sign })
                .collect()
        })
        .collect();
    let edge_ids: Vec<String> = (0..n).map(|e| g.edge_id(e).to_string()).collect();
    let level_one = ["+", "−"].iter().flat_map(|s| edge_ids.iter().map(move |e| format!("({s},{e})"))).collect();
    Ok(OrderedBratteli {
        words: g.words().iter().map(|w| w.iter().map(|&l| letter_string(&g, l)).collect::<Vec<_>>().join(" ")).collect(),
        edge_ids,
        incidence,
        level_one,
        order: order_tables,
        exit_depth: t,
        normalization: DiagramNormalization {
            extra_squaring,
            renumbering,
            case: case.to_string(),
            limit_germs: [germ_label(&g, limit[0]), germ_label(&g, limit[1])],
            log,
        },
        exit_germs: germ_map(&g).pow(t),
        exit_words,
        limit,
        lengths,
        rule: g,
    })
}

/// Result of descending from a depth-`D` position to a shallower level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Descent {
    pub edge: usize,
    pub position: u128,
    /// Product of the exponents of the block letters passed through.
    pub sign: i8,
}

impl OrderedBratteli {
    pub fn edge_count(&self) -> usize {
        self.rule.edge_count()
    }

    /// The wrapping rule the diagram is built from.
    pub fn rule(&self) -> &WrappingRule {
        &self.rule
    }

    /// Deepest level whose word lengths fit in `u128`.
    pub fn max_depth(&self) -> usize {
        self.lengths.len() - 1
    }

    /// `|g^depth(e_c)|`.
    pub fn len(&self, depth: usize, c: usize) -> Result<u128, DihedralError> {
        self.lengths.get(depth).map(|row| row[c]).ok_or(DihedralError::Overflow { depth })
    }

    /// Number of depth-`depth` cylinders, both signs included.
    pub fn cylinder_count(&self, depth: usize) -> Result<u128, DihedralError> {
        let row = self.lengths.get(depth).ok_or(DihedralError::Overflow { depth })?;
        row.iter().try_fold(0u128, |a, &l| a.checked_add(l)).and_then(|s| s.checked_mul(2)).ok_or(DihedralError::Overflow { depth })
    }

    /// The limit germs (start-type first when there is one).
    pub fn limit_germs(&self) -> [Germ; 2] {
        self.limit
    }

    /// The other limit germ.
    pub(crate) fn partner(&self, g: Germ) -> Germ {
        if g == self.limit[0] {
            self.limit[1]
        } else {
            self.limit[0]
        }
    }

    pub(crate) fn check_position(&self, c: usize, depth: usize, p: u128) -> Result<(), DihedralError> {
        if c >= self.edge_count() {
            return Err(DihedralError::InvalidPoint(format!("edge {c} out of range")));
        }
        let l = self.len(depth, c)?;
        if p >= l {
            return Err(DihedralError::InvalidPoint(format!("position {p} outside a word of length {l}")));
        }
        Ok(())
    }

    /// Locates the block containing `p` in `g(e_c)` at `level` (blocks are `g^{level−1}` of
    /// the letters): returns the slot, the block start and the letter.
    fn block_at(&self, c: usize, level: usize, p: u128) -> (usize, u128, Letter) {
        let below = &self.lengths[level - 1];
        let mut start = 0u128;
        for (slot, &l) in self.rule.word(c).iter().enumerate() {
            let len = below[l.edge];
            if p < start + len {
                return (slot, start, l);
            }
            start += len;
        }
        unreachable!("position inside the word")
    }

    /// Follows position `p` of `g^depth(e_c)` down to level `to`.
    pub(crate) fn descend(&self, c: usize, depth: usize, p: u128, to: usize) -> Descent {
        let mut cur = Descent { edge: c, position: p, sign: 1 };
        for level in (to + 1..=depth).rev() {
            let (_, start, l) = self.block_at(cur.edge, level, cur.position);
            let len = self.lengths[level - 1][l.edge];
            let mut off = cur.position - start;
            if l.sign < 0 {
                off = len - 1 - off;
            }
            cur = Descent { edge: l.edge, position: off, sign: cur.sign * l.sign };
        }
        cur
    }

    /// The letter at position `p` of `g^depth(e_c)`.
    pub fn letter_at(&self, c: usize, depth: usize, p: u128) -> Letter {
        let d = self.descend(c, depth, p, 0);
        Letter { edge: d.edge, sign: d.sign }
    }

    /// Exponent of the letter at position `p` of `g^depth(e_c)`.
    pub fn exponent_at(&self, c: usize, depth: usize, p: u128) -> i8 {
        self.descend(c, depth, p, 0).sign
    }

    /// Vertices `c_0, …, c_D` of a slot path (root-first slots) ending at `top`.
    pub fn path_vertices(&self, top: usize, slots: &[usize]) -> Result<Vec<usize>, DihedralError> {
        let d = slots.len();
        let mut v = vec![0; d + 1];
        v[d] = top;
        for k in (0..d).rev() {
            let w = self.rule.word(v[k + 1]);
            let l = w.get(slots[k]).ok_or_else(|| DihedralError::InvalidPoint(format!("slot {} at level {k}", slots[k])))?;
            v[k] = l.edge;
        }
        Ok(v)
    }

    /// Root-first arrow slots of position `p` of `g^depth(e_c)`.
    pub fn adic_path(&self, c: usize, depth: usize, p: u128) -> Vec<usize> {
        let mut slots = vec![0; depth];
        let mut edge = c;
        let mut pos = p;
        for level in (1..=depth).rev() {
            let (slot, start, l) = self.block_at(edge, level, pos);
            let len = self.lengths[level - 1][l.edge];
            let mut off = pos - start;
            if l.sign < 0 {
                off = len - 1 - off;
            }
            slots[level - 1] = slot;
            edge = l.edge;
            pos = off;
        }
        slots
    }

    fn block_start(&self, c: usize, level: usize, slot: usize) -> u128 {
        let below = &self.lengths[level - 1];
        self.rule.word(c)[..slot].iter().map(|l| below[l.edge]).sum()
    }

    /// Geometric position in `g^D(e_top)` of a root-first slot path.
    pub fn position_of_path(&self, top: usize, slots: &[usize]) -> Result<u128, DihedralError> {
        let v = self.path_vertices(top, slots)?;
        self.len(slots.len(), top)?;
        let mut pos = 0u128;
        for k in 0..slots.len() {
            let l = self.rule.word(v[k + 1])[slots[k]];
            let inner = if l.sign < 0 { self.lengths[k][l.edge] - 1 - pos } else { pos };
            pos = self.block_start(v[k + 1], k + 1, slots[k]) + inner;
        }
        Ok(pos)
    }

    /// Rank of a path in the adic (lexicographic, top-first) order of paths into `top`.
    pub fn adic_rank(&self, top: usize, slots: &[usize]) -> Result<u128, DihedralError> {
        let v = self.path_vertices(top, slots)?;
        self.len(slots.len(), top)?;
        Ok((0..slots.len()).map(|k| self.block_start(v[k + 1], k + 1, slots[k])).sum())
    }

    /// The path of a given adic rank.
    pub fn path_of_rank(&self, top: usize, depth: usize, mut rank: u128) -> Result<Vec<usize>, DihedralError> {
        self.check_position(top, depth, rank)?;
        let mut slots = vec![0; depth];
        let mut edge = top;
        for level in (1..=depth).rev() {
            let (slot, start, l) = self.block_at(edge, level, rank);
            slots[level - 1] = slot;
            rank -= start;
            edge = l.edge;
        }
        Ok(slots)
    }

    /// The Vershik successor of a root-first slot path: the lowest non-maximal arrow is
    /// advanced to the next arrow into the same vertex and every arrow below it is reset
    /// to the minimal one.
    pub fn vershik(&self, top: usize, slots: &[usize]) -> Result<Vec<usize>, DihedralError> {
        let v = self.path_vertices(top, slots)?;
        let k = (0..slots.len())
            .find(|&k| slots[k] + 1 < self.rule.word(v[k + 1]).len())
            .ok_or(DihedralError::MaxPath { depth: slots.len() })?;
        let mut out = slots.to_vec();
        out[k] += 1;
        for s in out.iter_mut().take(k) {
            *s = 0;
        }
        Ok(out)
    }

    /// The Vershik predecessor.
    pub fn vershik_inverse(&self, top: usize, slots: &[usize]) -> Result<Vec<usize>, DihedralError> {
        let k = slots.iter().position(|&s| s > 0).ok_or(DihedralError::MaxPath { depth: slots.len() })?;
        let mut out = slots.to_vec();
        out[k] -= 1;
        // Arrows below the changed one become maximal; the vertices below depend on the
        // new slots, so walk top-down.
        let mut edge = top;
        for j in (0..slots.len()).rev() {
            if j < k {
                out[j] = self.rule.word(edge).len() - 1;
            }
            edge = self.rule.word(edge)[out[j]].edge;
        }
        Ok(out)
    }

    /// The all-minimal and all-maximal paths into `top`.
    pub fn extremal_path(&self, top: usize, depth: usize, maximal: bool) -> Vec<usize> {
        let mut out = vec![0; depth];
        let mut edge = top;
        for j in (0..depth).rev() {
            let w = self.rule.word(edge);
            out[j] = if maximal { w.len() - 1 } else { 0 };
            edge = w[out[j]].edge;
        }
        out
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::building_blocks::{stabilize, StabilizeOptions};
    use crate::presolenoid::corpus;

    pub(crate) fn diagram_of(rule: &WrappingRule) -> OrderedBratteli {
        build_diagram(&stabilize(rule, &StabilizeOptions::default()).unwrap()).unwrap()
    }

    #[test]
    fn incidence_examples() {
        assert_eq!(diagram_of(&corpus::dyadic()).incidence, IntegerMatrix::from_rows(&[vec![2]]));
        assert_eq!(diagram_of(&corpus::w2()).incidence, IntegerMatrix::from_rows(&[vec![2, 2], vec![2, 2]]));
        assert_eq!(diagram_of(&corpus::w4()).incidence, IntegerMatrix::from_rows(&[vec![5, 4], vec![4, 5]]));
    }

    #[test]
    fn normalization_puts_a_start_limit_germ_on_the_first_edge() {
        for rule in [corpus::w1(), corpus::w2(), corpus::w4(), corpus::dyadic(), corpus::w3()] {
            let d = diagram_of(&rule);
            let dg = germ_map(&d.rule);
            for g in d.limit {
                assert_eq!(dg.apply(g), g);
            }
            let starts: Vec<Germ> = d.limit.iter().copied().filter(|g| g.end == End::Start).collect();
            if let Some(s) = starts.first() {
                assert_eq!(s.edge, 0);
                // the first letter of g(e_1) is e_1 itself
                assert_eq!(d.rule.word(0)[0], Letter::pos(0));
            }
            for e in 0..2 * d.edge_count() {
                assert!(d.limit.contains(&d.exit_germs.apply(Germ::from_index(e))));
            }
        }
    }

    #[test]
    fn descent_matches_explicit_words() {
        let d = diagram_of(&corpus::w4());
        for depth in 0..=3usize {
            for c in 0..2 {
                let word = if depth == 0 { vec![Letter::pos(c)] } else { power(&d.rule, depth as u32).unwrap().word(c).to_vec() };
                assert_eq!(word.len() as u128, d.len(depth, c).unwrap());
                for (p, l) in word.iter().enumerate() {
                    assert_eq!(d.letter_at(c, depth, p as u128), *l);
                    let path = d.adic_path(c, depth, p as u128);
                    assert_eq!(d.position_of_path(c, &path).unwrap(), p as u128);
                }
            }
        }
    }

    #[test]
    fn vershik_on_the_odometer() {
        let d = diagram_of(&corpus::dyadic());
        assert_eq!(d.vershik(0, &[0, 0, 1]).unwrap(), vec![1, 0, 1]);
        assert_eq!(d.vershik(0, &[1, 1, 0]).unwrap(), vec![0, 0, 1]);
        assert_eq!(d.vershik(0, &[1, 1, 1]), Err(DihedralError::MaxPath { depth: 3 }));
    }

    #[test]
    fn vershik_steps_the_rank_and_inverts() {
        let d = diagram_of(&corpus::w4());
        for c in 0..2 {
            let depth = 3;
            let total = d.len(depth, c).unwrap();
            for r in 0..total {
                let path = d.path_of_rank(c, depth, r).unwrap();
                assert_eq!(d.adic_rank(c, &path).unwrap(), r);
                if r + 1 < total {
                    let next = d.vershik(c, &path).unwrap();
                    assert_eq!(d.adic_rank(c, &next).unwrap(), r + 1);
                    assert_eq!(d.vershik_inverse(c, &next).unwrap(), path);
                } else {
                    assert_eq!(path, d.extremal_path(c, depth, true));
                }
            }
        }
    }

    #[test]
    fn minimal_path_follows_the_maximal_one_after_deepening() {
        let d = diagram_of(&corpus::w4());
        let depth = 12;
        for c in 0..2 {
            // Max below level 11, not max at the top arrow.
            let mut path = d.extremal_path(c, depth, true);
            path[depth - 1] = 0;
            let v = d.path_vertices(c, &path).unwrap();
            let mut lower = d.extremal_path(v[depth - 1], depth - 1, true);
            lower.push(0);
            let next = d.vershik(c, &lower).unwrap();
            assert_eq!(next[depth - 1], 1);
            let top_below = d.path_vertices(c, &next).unwrap()[depth - 1];
            assert_eq!(&next[..depth - 1], &d.extremal_path(top_below, depth - 1, false)[..]);
        }
    }

    #[test]
    fn multi_vertex_input_is_unsupported() {
        // The vertex count is checked before anything else, so a valid passage system
        // carrying a two-vertex rule is enough.
        let text = "vertices: u w\nedge a: u -> u\nedge b: w -> w\nrule a = b b\nrule b = a a";
        let rule = crate::presolenoid::parse_solenoid_file(text).unwrap();
        let mut ps = stabilize(&corpus::w2(), &StabilizeOptions::default()).unwrap();
        ps.base = rule.clone();
        ps.rule = rule;
        assert!(matches!(build_diagram(&ps), Err(DihedralError::Unsupported(_))));
    }
}
