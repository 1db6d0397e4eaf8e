//! Finite-depth checks of the dihedral action: orbit comparison with the Vershik map,
//! freeness, minimality and the two-to-one endpoint map.

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::SeedableRng;
use serde::Serialize;

use super::action::{Chain, SigmaPoint};
use super::diagram::OrderedBratteli;
use super::{serialize_u128, DihedralError};
use crate::presolenoid::orientation_check;

/// Rank differences up to this size are checked by iterating the Vershik map itself.
const ITERATION_CAP: u128 = 4096;

/// Largest enumeration accepted by the exhaustive checks.
const ENUMERATION_CAP: u128 = 4_000_000;

#[derive(Clone, Debug, Serialize)]
pub struct ConjugacyReport {
    pub depth: usize,
    pub seed: u64,
    pub samples: usize,
    pub bound: i64,
    pub comparisons: usize,
    pub agreements: usize,
    pub undetermined: usize,
    /// Agreements confirmed by stepping the Vershik map.
    pub iterated: usize,
    /// Agreements confirmed by adic rank arithmetic (tail equality at the truncation).
    pub ranked: usize,
    /// Comparisons where the two points carry different signs.
    pub sign_flips: usize,
    pub disagreements: Vec<String>,
}

fn step_vershik(d: &OrderedBratteli, top: usize, path: &[usize], delta: i128) -> Result<Vec<usize>, DihedralError> {
    let mut p = path.to_vec();
    for _ in 0..delta.unsigned_abs() {
        p = if delta > 0 { d.vershik(top, &p)? } else { d.vershik_inverse(top, &p)? };
    }
    Ok(p)
}

/// For sampled points `σ` and `|k| ≤ bound`, checks that the paths of `φ^k σ` and `S σ`
/// lie in the Vershik orbit of the path of `σ` (same tail beyond the truncation).
pub fn conjugacy_check(d: &OrderedBratteli, depth: usize, samples: usize, bound: i64, seed: u64) -> Result<ConjugacyReport, DihedralError> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut r = ConjugacyReport {
        depth,
        seed,
        samples,
        bound,
        comparisons: 0,
        agreements: 0,
        undetermined: 0,
        iterated: 0,
        ranked: 0,
        sign_flips: 0,
        disagreements: Vec::new(),
    };
    for _ in 0..samples {
        let x = d.sample(depth, &mut rng)?;
        let path = d.path_of(&x);
        let rank = d.adic_rank(x.top, &path)?;
        let mut targets: Vec<(String, Result<SigmaPoint, DihedralError>)> =
            (-bound..=bound).map(|k| (format!("φ^{k}"), d.phi_pow(&x, k))).collect();
        targets.push(("S".to_string(), Ok(d.s(&x))));
        for (label, y) in targets {
            r.comparisons += 1;
            let y = match y {
                Ok(y) => y,
                Err(DihedralError::Undetermined { .. }) => {
                    r.undetermined += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            if y.sign != x.sign {
                r.sign_flips += 1;
            }
            if y.top != x.top {
                r.disagreements.push(format!("{label} of {x:?} changes the tail"));
                continue;
            }
            let ypath = d.path_of(&y);
            let delta = d.adic_rank(y.top, &ypath)? as i128 - rank as i128;
            let reached = if delta.unsigned_abs() <= ITERATION_CAP {
                r.iterated += 1;
                step_vershik(d, x.top, &path, delta)?
            } else {
                r.ranked += 1;
                d.path_of_rank(x.top, depth, (rank as i128 + delta) as u128)?
            };
            if reached == ypath {
                r.agreements += 1;
            } else {
                r.disagreements.push(format!("{label} of {x:?}: Vershik orbit misses {ypath:?}"));
            }
        }
    }
    Ok(r)
}

#[derive(Clone, Debug, Serialize)]
pub struct FreenessReport {
    pub depth: usize,
    pub seed: u64,
    pub samples: usize,
    /// Points at the ends of edges (periodic min/max paths) added to the random ones.
    pub adversarial: usize,
    pub k_bound: i64,
    pub checks: usize,
    pub undetermined: usize,
    pub violations: Vec<String>,
    pub pass: bool,
}

/// Checks `S^j φ^k σ ≠ σ` for `(j, k) ≠ (0, 0)`, `j ∈ {0, 1}`, `|k| ≤ K₀`, where `K₀` is
/// one less than the shortest word at the depth (so `K₀ + 1` distinct intervals exist in
/// every edge), capped at 32.
pub fn freeness_check(d: &OrderedBratteli, depth: usize, samples: usize, seed: u64) -> Result<FreenessReport, DihedralError> {
    let min_len = (0..d.edge_count()).map(|c| d.len(depth, c)).collect::<Result<Vec<_>, _>>()?.into_iter().min().unwrap();
    let k_bound = (min_len - 1).min(32) as i64;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut points = Vec::new();
    for _ in 0..samples {
        points.push(d.sample(depth, &mut rng)?);
    }
    let mut adversarial = 0;
    for c in 0..d.edge_count() {
        for maximal in [false, true] {
            let path = d.extremal_path(c, depth, maximal);
            for sign in [1, -1] {
                points.push(d.point_of_path(sign, c, &path)?);
                adversarial += 1;
            }
        }
    }
    let mut r = FreenessReport {
        depth,
        seed,
        samples,
        adversarial,
        k_bound,
        checks: 0,
        undetermined: 0,
        violations: Vec::new(),
        pass: false,
    };
    for x in &points {
        for forward in [true, false] {
            let mut y = *x;
            for k in 1..=k_bound {
                let next = if forward { d.phi(&y) } else { d.phi_inv(&y) };
                match next {
                    Ok(z) => y = z,
                    Err(DihedralError::Undetermined { .. }) => {
                        // Both j for every remaining k.
                        r.undetermined += 2 * (k_bound - k + 1) as usize;
                        break;
                    }
                    Err(e) => return Err(e),
                }
                let signed_k = if forward { k } else { -k };
                for (j, z) in [(0, y), (1, d.s(&y))] {
                    r.checks += 1;
                    if z == *x {
                        r.violations.push(format!("S^{j} φ^{signed_k} fixes {x:?}"));
                    }
                }
            }
        }
        r.checks += 1;
        if d.s(x) == *x {
            r.violations.push(format!("S fixes {x:?}"));
        }
    }
    r.pass = r.violations.is_empty();
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimalityVerdict {
    PhiMinimal,
    InvariantClopen,
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimalityReport {
    pub depth: usize,
    #[serde(serialize_with = "serialize_u128")]
    pub cylinders: u128,
    /// Chain graph: `"a+"` is edge `a` travelled forwards.
    pub chain_edges: BTreeMap<String, Vec<String>>,
    pub components: Vec<Vec<String>>,
    pub strongly_connected: bool,
    /// Upper bound on the number of `φ` steps from any cylinder to any other.
    pub visit_bound: Option<String>,
    pub threshold: String,
    pub verdict: MinimalityVerdict,
    /// The invariant clopen set as a union of chains (every cylinder lies on one chain).
    pub invariant_set: Option<Vec<String>>,
    pub sigma_disjoint: Option<bool>,
    pub sigma_cover: Option<bool>,
    pub oriented: bool,
}

fn chain_label(d: &OrderedBratteli, ch: Chain) -> String {
    format!("{}{}", d.edge_ids[ch.edge], if ch.direction > 0 { "+" } else { "−" })
}

/// Successor chains of every chain: where `φ` goes after the last cylinder of the chain.
pub(crate) fn chain_graph(d: &OrderedBratteli, depth: usize) -> Result<Vec<Vec<usize>>, DihedralError> {
    let m = 2 * d.edge_count();
    let mut succ = vec![Vec::new(); m];
    for (i, out) in succ.iter_mut().enumerate() {
        let ch = Chain::from_index(i);
        let l = d.len(depth, ch.edge)?;
        let last = d.chain_cylinder(ch, depth, l - 1)?;
        for y in d.phi_images(&last)? {
            let t = d.chain_of(&y).index();
            if !out.contains(&t) {
                out.push(t);
            }
        }
        out.sort();
    }
    Ok(succ)
}

fn reach(succ: &[Vec<usize>], from: usize) -> Vec<bool> {
    let mut seen = vec![false; succ.len()];
    let mut stack = vec![from];
    seen[from] = true;
    while let Some(a) = stack.pop() {
        for &b in &succ[a] {
            if !seen[b] {
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    seen
}

/// Searches for a `φ`-invariant union of depth-`depth` cylinders through the chain graph,
/// and cross-checks the verdict against the orientation of the rule.
pub fn minimality_check(d: &OrderedBratteli, depth: usize) -> Result<MinimalityReport, DihedralError> {
    let succ = chain_graph(d, depth)?;
    let m = succ.len();
    let cylinders = d.cylinder_count(depth)?;
    // Weak components by union-find.
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for (a, out) in succ.iter().enumerate() {
        for &b in out {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
    }
    let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for a in 0..m {
        let r = find(&mut parent, a);
        comps.entry(r).or_default().push(a);
    }
    let comps: Vec<Vec<usize>> = comps.into_values().collect();
    let strongly_connected = (0..m).all(|a| reach(&succ, a).iter().all(|&x| x));
    // Visit bound: weighted shortest paths where leaving chain A costs L_A steps.
    let lens: Vec<u128> = (0..m).map(|i| d.len(depth, Chain::from_index(i).edge)).collect::<Result<_, _>>()?;
    // dist[a][b]: fewest φ steps from the first cylinder of chain a to the first cylinder
    // of chain b along paths leaving a at least once (leaving chain a costs L_a steps).
    let inf = u128::MAX;
    let mut dist = vec![vec![inf; m]; m];
    for a in 0..m {
        for &b in &succ[a] {
            dist[a][b] = dist[a][b].min(lens[a]);
        }
    }
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                if dist[i][k] != inf && dist[k][j] != inf {
                    let v = dist[i][k].saturating_add(dist[k][j]);
                    if v < dist[i][j] {
                        dist[i][j] = v;
                    }
                }
            }
        }
    }
    // Starting anywhere on chain a is no worse than starting at its first cylinder; the
    // target may sit at the far end of chain b.
    let mut bound = Some(0u128);
    for row in &dist {
        for (&x, &len) in row.iter().zip(&lens) {
            bound = match (bound, x) {
                (Some(cur), x) if x != inf => Some(cur.max(x.saturating_add(len - 1))),
                _ => None,
            };
        }
    }
    let threshold = cylinders.saturating_mul(cylinders).saturating_mul(10);
    let oriented = orientation_check(&d.rule).oriented();
    let minimal = comps.len() == 1 && strongly_connected && bound.is_some_and(|b| b <= threshold);
    let chain_edges = (0..m)
        .map(|a| (chain_label(d, Chain::from_index(a)), succ[a].iter().map(|&b| chain_label(d, Chain::from_index(b))).collect()))
        .collect();
    let components: Vec<Vec<String>> =
        comps.iter().map(|c| c.iter().map(|&a| chain_label(d, Chain::from_index(a))).collect()).collect();
    let (verdict, invariant_set, sigma_disjoint, sigma_cover) = if minimal {
        (MinimalityVerdict::PhiMinimal, None, None, None)
    } else {
        let f = &comps[0];
        let flipped: Vec<usize> = f.iter().map(|&a| a ^ 1).collect();
        let disjoint = f.iter().all(|a| !flipped.contains(a));
        let cover = (0..m).all(|a| f.contains(&a) || flipped.contains(&a));
        (
            MinimalityVerdict::InvariantClopen,
            Some(f.iter().map(|&a| chain_label(d, Chain::from_index(a))).collect()),
            Some(disjoint),
            Some(cover),
        )
    };
    let report = MinimalityReport {
        depth,
        cylinders,
        chain_edges,
        components,
        strongly_connected,
        visit_bound: bound.map(|b| b.to_string()),
        threshold: threshold.to_string(),
        verdict,
        invariant_set,
        sigma_disjoint,
        sigma_cover,
        oriented,
    };
    let found = verdict == MinimalityVerdict::InvariantClopen && sigma_disjoint == Some(true) && sigma_cover == Some(true);
    if found != oriented {
        return Err(DihedralError::Consistency(format!(
            "minimality search {} an invariant clopen set but the rule is {}oriented",
            if found { "found" } else { "did not find" },
            if oriented { "" } else { "not " }
        )));
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct LambdaReport {
    pub depth: usize,
    #[serde(serialize_with = "serialize_u128")]
    pub cylinders: u128,
    /// Cut points strictly inside an edge.
    pub internal_cuts: usize,
    /// Internal cuts whose preimage is exactly `{σ, φSσ}`.
    pub pairs_verified: usize,
    /// Cylinders whose trailing endpoint is the vertex.
    pub vertex_cylinders: usize,
    pub violations: Vec<String>,
    pub pass: bool,
}

/// The endpoint map `Λ` sends a cylinder to its trailing endpoint (the end it leaves behind
/// when travelling in its direction). Exhaustively checks that two cylinders share an
/// internal endpoint exactly when they form a pair `{σ, φSσ}`.
pub fn lambda_check(d: &OrderedBratteli, depth: usize) -> Result<LambdaReport, DihedralError> {
    let cylinders = d.cylinder_count(depth)?;
    if cylinders > ENUMERATION_CAP {
        return Err(DihedralError::Depth(format!("{cylinders} cylinders exceed the enumeration cap")));
    }
    let mut by_cut: BTreeMap<(usize, u128), Vec<SigmaPoint>> = BTreeMap::new();
    for x in d.cylinders(depth)? {
        let cut = if d.direction(&x) > 0 { x.position } else { x.position + 1 };
        by_cut.entry((x.top, cut)).or_default().push(x);
    }
    let mut r = LambdaReport { depth, cylinders, internal_cuts: 0, pairs_verified: 0, vertex_cylinders: 0, violations: Vec::new(), pass: false };
    for ((top, cut), xs) in &by_cut {
        let l = d.len(depth, *top)?;
        if *cut == 0 || *cut == l {
            r.vertex_cylinders += xs.len();
            continue;
        }
        r.internal_cuts += 1;
        let ok = xs.len() == 2 && d.phi(&d.s(&xs[0])).ok() == Some(xs[1]);
        if ok {
            r.pairs_verified += 1;
        } else {
            r.violations.push(format!("cut {cut} of edge {}: {xs:?}", d.edge_ids[*top]));
        }
    }
    r.pass = r.violations.is_empty();
    Ok(r)
}
