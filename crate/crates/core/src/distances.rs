//! Bottleneck distance between diagrams and interleavings between modules.
//!
//! An ε-interleaving of `V` and `W` is stored as two strict morphisms,
//! `fwd: V → shift(W, ε)` and `bwd: W → shift(V, ε)`, where `shift` moves every
//! critical value down by ε. Checking one amounts to refining everything to
//! a grid containing all relevant translates and comparing matrices.

use std::collections::{BTreeMap, VecDeque};

use crate::decomp::{decompose, Decomposition};
use crate::diagrams::{check_field, diagram, Diagram, DiagramPoint};
use crate::error::{Error, Result};
use crate::exactfield::Mat;
use crate::observable::bar;
use crate::persmod::{piece_representative, union_grid, DecoratedInterval, Decoration, GridModule, Morphism};
use crate::real::{ExtReal, Real};

fn coord_dist(x: ExtReal, y: ExtReal) -> ExtReal {
    match (x, y) {
        (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite((a - b).abs()),
        (a, b) if a == b => ExtReal::Finite(Real::zero()),
        _ => ExtReal::PosInf,
    }
}

pub fn dinf(x: &DiagramPoint, y: &DiagramPoint) -> ExtReal {
    coord_dist(x.p, y.p).max(coord_dist(x.q, y.q))
}

/// Distance to the diagonal.
pub fn diagonal_gap(x: &DiagramPoint) -> ExtReal {
    match (x.p, x.q) {
        (ExtReal::Finite(p), ExtReal::Finite(q)) => ExtReal::Finite((q - p).half()),
        _ => ExtReal::PosInf,
    }
}

/// A partial matching between the expanded point lists of two diagrams.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub unmatched1: Vec<usize>,
    pub unmatched2: Vec<usize>,
    pub cost: ExtReal,
}

impl Matching {
    /// Cost of a partial matching; also checks that it is one.
    pub fn evaluate(d1: &Diagram, d2: &Diagram, pairs: &[(usize, usize)]) -> Result<Matching> {
        let (x, y) = (d1.expanded(), d2.expanded());
        let mut used1 = vec![false; x.len()];
        let mut used2 = vec![false; y.len()];
        let mut cost = ExtReal::Finite(Real::zero());
        for &(i, j) in pairs {
            if i >= x.len() || j >= y.len() || used1[i] || used2[j] {
                return Err(Error::InvalidMatching(format!("pair ({i}, {j}) is out of range or repeated")));
            }
            used1[i] = true;
            used2[j] = true;
            cost = cost.max(dinf(&x[i], &y[j]));
        }
        let unmatched1: Vec<usize> = (0..x.len()).filter(|&i| !used1[i]).collect();
        let unmatched2: Vec<usize> = (0..y.len()).filter(|&j| !used2[j]).collect();
        for &i in &unmatched1 {
            cost = cost.max(diagonal_gap(&x[i]));
        }
        for &j in &unmatched2 {
            cost = cost.max(diagonal_gap(&y[j]));
        }
        let mut pairs = pairs.to_vec();
        pairs.sort();
        Ok(Matching {
            pairs,
            unmatched1,
            unmatched2,
            cost,
        })
    }
}

/// Maximum matching in a bipartite graph given by left adjacency lists.
/// Returns, for each left vertex, its partner on the right.
pub fn hopcroft_karp(n_right: usize, adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    const INF: usize = usize::MAX;
    let n_left = adj.len();
    let mut match_l: Vec<Option<usize>> = vec![None; n_left];
    let mut match_r: Vec<Option<usize>> = vec![None; n_right];
    let mut dist = vec![INF; n_left];

    fn bfs(adj: &[Vec<usize>], match_l: &[Option<usize>], match_r: &[Option<usize>], dist: &mut [usize]) -> bool {
        let mut queue = VecDeque::new();
        for (u, m) in match_l.iter().enumerate() {
            if m.is_none() {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match match_r[v] {
                    None => found = true,
                    Some(w) if dist[w] == usize::MAX => {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                    _ => {}
                }
            }
        }
        found
    }

    fn dfs(
        u: usize,
        adj: &[Vec<usize>],
        match_l: &mut [Option<usize>],
        match_r: &mut [Option<usize>],
        dist: &mut [usize],
    ) -> bool {
        for i in 0..adj[u].len() {
            let v = adj[u][i];
            let ok = match match_r[v] {
                None => true,
                Some(w) => dist[w] == dist[u] + 1 && dfs(w, adj, match_l, match_r, dist),
            };
            if ok {
                match_l[u] = Some(v);
                match_r[v] = Some(u);
                return true;
            }
        }
        dist[u] = usize::MAX;
        false
    }

    while bfs(adj, &match_l, &match_r, &mut dist) {
        for u in 0..n_left {
            if match_l[u].is_none() && dist[u] != INF {
                dfs(u, adj, &mut match_l, &mut match_r, &mut dist);
            }
        }
    }
    match_l
}

/// Left vertices are the points of `x` then one diagonal copy per point of `y`;
/// right vertices are the points of `y` then one diagonal copy per point of `x`.
/// A perfect matching is a partial matching of cost at most `tau`.
fn feasible(x: &[DiagramPoint], y: &[DiagramPoint], tau: ExtReal) -> Option<Vec<(usize, usize)>> {
    let (n1, n2) = (x.len(), y.len());
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n1 + n2];
    for (i, xi) in x.iter().enumerate() {
        for (j, yj) in y.iter().enumerate() {
            if dinf(xi, yj) <= tau {
                adj[i].push(j);
            }
        }
        if diagonal_gap(xi) <= tau {
            adj[i].push(n2 + i);
        }
    }
    for (j, yj) in y.iter().enumerate() {
        if diagonal_gap(yj) <= tau {
            adj[n1 + j].push(j);
        }
        adj[n1 + j].extend(n2..n2 + n1);
    }
    let m = hopcroft_karp(n1 + n2, &adj);
    if m.iter().any(Option::is_none) {
        return None;
    }
    Some(
        m[..n1]
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.filter(|&j| j < n2).map(|j| (i, j)))
            .collect(),
    )
}

/// Exact bottleneck distance with an optimal matching.
pub fn bottleneck(d1: &Diagram, d2: &Diagram) -> (ExtReal, Matching) {
    let (x, y) = (d1.expanded(), d2.expanded());
    let mut candidates: Vec<ExtReal> = vec![ExtReal::Finite(Real::zero())];
    for xi in &x {
        candidates.extend(y.iter().map(|yj| dinf(xi, yj)));
    }
    candidates.extend(x.iter().chain(&y).map(diagonal_gap));
    candidates.retain(ExtReal::is_finite);
    candidates.sort();
    candidates.dedup();

    let (mut lo, mut hi) = (0, candidates.len());
    let mut best = None;
    while lo < hi {
        let mid = (lo + hi) / 2;
        match feasible(&x, &y, candidates[mid]) {
            Some(pairs) => {
                best = Some(pairs);
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    let pairs = match best {
        Some(p) => p,
        None => feasible(&x, &y, ExtReal::PosInf).expect("everything is feasible at infinity"),
    };
    let m = Matching::evaluate(d1, d2, &pairs).expect("matching from feasibility is valid");
    (m.cost, m)
}

/// `evaluate_dim(shift(v, eps), t) = evaluate_dim(v, t + eps)`.
pub fn shift(v: &GridModule, eps: Real) -> GridModule {
    v.translated(-eps)
}

pub fn shift_morphism(f: &Morphism, eps: Real) -> Morphism {
    f.translated(-eps)
}

/// The structure maps `V_t → V_{t+ε}` as a morphism `v → shift(v, ε)` on the
/// common refinement of the two grids.
pub fn shift_map(v: &GridModule, eps: Real) -> Result<Morphism> {
    if eps.is_negative() {
        return Err(Error::NegativeShift(eps.to_string()));
    }
    let target = shift(v, eps);
    let grid = union_grid(v.criticals(), target.criticals());
    let comps = (0..2 * grid.len() + 1)
        .map(|k| {
            let t = piece_representative(&grid, k);
            v.composite(v.piece_of(t), v.piece_of(t + eps))
        })
        .collect::<Result<Vec<Mat>>>()?;
    Morphism::new(v.refine_to(&grid)?, target.refine_to(&grid)?, comps)
}

#[derive(Clone, Debug)]
pub struct Interleaving {
    pub epsilon: Real,
    pub fwd: Morphism,
    pub bwd: Morphism,
}

fn grid_with_translates(grids: &[&[Real]], eps: Real) -> Vec<Real> {
    let mut all = Vec::new();
    for g in grids {
        for &c in g.iter() {
            all.extend([c, c - eps, c - eps - eps]);
        }
    }
    all.sort();
    all.dedup();
    all
}

/// Checks both interleaving identities after refining to a common grid.
pub fn verify_interleaving(v: &GridModule, w: &GridModule, il: &Interleaving) -> Result<bool> {
    let eps = il.epsilon;
    if eps.is_negative() {
        return Err(Error::NegativeShift(eps.to_string()));
    }
    let grid = grid_with_translates(
        &[v.criticals(), w.criticals(), il.fwd.criticals(), il.bwd.criticals()],
        eps,
    );
    let fwd = il.fwd.refine_to(&grid)?;
    let bwd = il.bwd.refine_to(&grid)?;
    let (vg, wg) = (v.refine_to(&grid)?, w.refine_to(&grid)?);
    if fwd.source() != &vg
        || bwd.source() != &wg
        || fwd.target() != &shift(w, eps).refine_to(&grid)?
        || bwd.target() != &shift(v, eps).refine_to(&grid)?
    {
        return Err(Error::GridMismatch);
    }
    if !fwd.is_natural() || !bwd.is_natural() {
        return Ok(false);
    }
    let sb = shift_morphism(&il.bwd, eps).refine_to(&grid)?;
    let sf = shift_morphism(&il.fwd, eps).refine_to(&grid)?;
    let lhs_v = fwd.then(&sb)?;
    let lhs_w = bwd.then(&sf)?;
    Ok(lhs_v == shift_map(v, eps + eps)?.refine_to(&grid)? && lhs_w == shift_map(w, eps + eps)?.refine_to(&grid)?)
}

/// Whether `k_from → k_to` admits a nonzero morphism (sending generator to generator).
fn generator_map_exists(from: &DecoratedInterval, to: &DecoratedInterval) -> bool {
    let (lo, hi) = (from.start().max(to.start()), from.end().min(to.end()));
    let overlap = lo.0 < hi.0 || (lo.0 == hi.0 && lo.1 == Decoration::At && hi.1 == Decoration::At);
    overlap && to.start() <= from.start() && to.end() <= from.end()
}

/// Summand positions of a decomposition listed in the order of the diagram's expanded points.
fn summands_by_point(d: &Decomposition) -> Vec<usize> {
    let mut by_point: BTreeMap<DiagramPoint, Vec<usize>> = BTreeMap::new();
    for (i, iv) in d.summands.iter().enumerate() {
        if !iv.is_singleton() {
            by_point.entry(DiagramPoint::of_interval(iv)).or_default().push(i);
        }
    }
    by_point.into_values().flatten().collect()
}

/// Morphism `v → shift(w, eps)` sending each matched generator of `v` to its
/// partner where the shifted supports allow it, and everything else to zero.
fn half_interleaving(
    v: &GridModule,
    w: &GridModule,
    dv: &Decomposition,
    dw: &Decomposition,
    pairs: &[(usize, usize)],
    eps: Real,
) -> Result<Morphism> {
    let target = shift(w, eps);
    let grid = union_grid(v.criticals(), target.criticals());
    let iso_v = dv.iso.refine_to(&grid)?;
    let iso_w = shift_morphism(&dw.iso, eps).refine_to(&grid)?;
    let sv = &dv.summands;
    let sw: Vec<DecoratedInterval> = dw.summands.iter().map(|iv| iv.translated(-eps)).collect();
    let alive = |ivs: &[DecoratedInterval], k: usize| -> Vec<usize> {
        (0..ivs.len())
            .filter(|&i| {
                let (a, b) = ivs[i].piece_range(&grid).expect("summand endpoints lie on the grid");
                a <= k && k <= b
            })
            .collect()
    };
    let comps = (0..2 * grid.len() + 1)
        .map(|k| {
            let (av, aw) = (alive(sv, k), alive(&sw, k));
            let mut m = Mat::zeros(v.field(), aw.len(), av.len());
            for &(i, j) in pairs {
                if !generator_map_exists(&sv[i], &sw[j]) {
                    continue;
                }
                if let (Some(col), Some(row)) = (av.iter().position(|&x| x == i), aw.iter().position(|&x| x == j)) {
                    m.set(row, col, 1);
                }
            }
            let inv = iso_v.comp(k).inverse().expect("decomposition iso is invertible");
            iso_w.comp(k) * &(&m * &inv)
        })
        .collect();
    Morphism::new(v.refine_to(&grid)?, target.refine_to(&grid)?, comps)
}

/// Builds an interleaving from a matching of `diagram(v)` with `diagram(w)`.
///
/// Matched summands are mapped generator to generator whenever that is a
/// morphism; the result is verified by [`verify_interleaving`] for every
/// `eps` strictly above the matching cost, and at `eps` equal to the cost
/// when the decorations of the summands allow it (always for bar modules).
pub fn build_interleaving(v: &GridModule, w: &GridModule, m: &Matching, eps: Real) -> Result<Interleaving> {
    check_field(v, w)?;
    if eps.is_negative() {
        return Err(Error::NegativeShift(eps.to_string()));
    }
    if ExtReal::Finite(eps) < m.cost {
        return Err(Error::EpsilonBelowCost {
            eps: eps.to_string(),
            cost: m.cost.to_string(),
        });
    }
    let (dv, dw) = (decompose(v), decompose(w));
    let (pv, pw) = (summands_by_point(&dv), summands_by_point(&dw));
    let checked = Matching::evaluate(&diagram(v), &diagram(w), &m.pairs)?;
    if checked.cost != m.cost {
        return Err(Error::InvalidMatching(format!(
            "stated cost {} differs from actual cost {}",
            m.cost, checked.cost
        )));
    }
    let mut fwd_pairs: Vec<(usize, usize)> = m.pairs.iter().map(|&(i, j)| (pv[i], pw[j])).collect();
    // singleton summands only matter at eps = 0, where equal ones are paired
    let mut singles_w: BTreeMap<DecoratedInterval, Vec<usize>> = BTreeMap::new();
    for (j, iv) in dw.summands.iter().enumerate().rev().filter(|(_, iv)| iv.is_singleton()) {
        singles_w.entry(*iv).or_default().push(j);
    }
    for (i, iv) in dv.summands.iter().enumerate().filter(|(_, iv)| iv.is_singleton()) {
        if let Some(j) = singles_w.get_mut(iv).and_then(Vec::pop) {
            fwd_pairs.push((i, j));
        }
    }
    let bwd_pairs: Vec<(usize, usize)> = fwd_pairs.iter().map(|&(i, j)| (j, i)).collect();
    Ok(Interleaving {
        epsilon: eps,
        fwd: half_interleaving(v, w, &dv, &dw, &fwd_pairs, eps)?,
        bwd: half_interleaving(w, v, &dw, &dv, &bwd_pairs, eps)?,
    })
}

/// The interleaving distance, computed as the bottleneck distance of the diagrams.
pub fn interleaving_distance(v: &GridModule, w: &GridModule) -> Result<ExtReal> {
    check_field(v, w)?;
    Ok(bottleneck(&diagram(v), &diagram(w)).0)
}

/// The distance together with an interleaving attaining it. The interleaving
/// relates `bar(v)` and `bar(w)`, which are ob-isomorphic to `v` and `w`;
/// `None` when the distance is infinite.
pub fn optimal_interleaving(v: &GridModule, w: &GridModule) -> Result<(ExtReal, Option<Interleaving>)> {
    check_field(v, w)?;
    let (bv, bw) = (bar(v), bar(w));
    let (value, m) = bottleneck(&diagram(&bv), &diagram(&bw));
    let il = match value {
        ExtReal::Finite(eps) => Some(build_interleaving(&bv, &bw, &m, eps)?),
        _ => None,
    };
    Ok((value, il))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagrams::ob_isomorphic;
    use crate::exactfield::FieldSpec;
    use crate::observable::radical;
    use crate::persmod::{interval_module, random_module};

    fn r(s: &str) -> Real {
        s.parse().unwrap()
    }

    fn pt(p: &str, q: &str) -> DiagramPoint {
        DiagramPoint::new(p.parse().unwrap(), q.parse().unwrap()).unwrap()
    }

    fn fin(s: &str) -> ExtReal {
        ExtReal::Finite(r(s))
    }

    fn f2() -> FieldSpec {
        FieldSpec::gf2()
    }

    fn k(iv: DecoratedInterval) -> GridModule {
        let mut g: Vec<Real> = [iv.inf(), iv.sup()].iter().filter_map(ExtReal::finite).collect();
        g.dedup();
        interval_module(f2(), &iv, &g).unwrap()
    }

    #[test]
    fn dinf_and_gap_examples() {
        assert_eq!(dinf(&pt("0", "2"), &pt("0", "2")), fin("0"));
        assert_eq!(dinf(&pt("0", "2"), &pt("1", "2.5")), fin("1"));
        assert_eq!(dinf(&pt("-inf", "2"), &pt("0", "2")), ExtReal::PosInf);
        assert_eq!(dinf(&pt("-inf", "+inf"), &pt("-inf", "+inf")), fin("0"));
        assert_eq!(diagonal_gap(&pt("0", "2")), fin("1"));
        assert_eq!(diagonal_gap(&pt("3", "3.5")), fin("0.25"));
        assert_eq!(diagonal_gap(&pt("-inf", "3")), ExtReal::PosInf);
    }

    #[test]
    fn bottleneck_examples() {
        let a = Diagram::from_points([pt("0", "2")]);
        let (val, m) = bottleneck(&a, &Diagram::empty());
        assert_eq!(val, fin("1"));
        assert_eq!(m.unmatched1, vec![0]);

        let b = Diagram::from_points([pt("0", "3")]);
        let c = Diagram::from_points([pt("0.5", "3.5")]);
        let (val, m) = bottleneck(&b, &c);
        assert_eq!(val, fin("0.5"));
        assert_eq!(m.pairs, vec![(0, 0)]);

        let d = Diagram::from_points([pt("0", "1"), pt("0", "1"), pt("-inf", "4"), pt("2", "+inf")]);
        let (val, m) = bottleneck(&d, &d);
        assert_eq!(val, fin("0"));
        assert_eq!(m.pairs.len(), 4);

        let e = Diagram::from_points([pt("-inf", "4")]);
        assert_eq!(bottleneck(&e, &Diagram::empty()).0, ExtReal::PosInf);
        assert_eq!(bottleneck(&Diagram::empty(), &Diagram::empty()).0, fin("0"));
    }

    #[test]
    fn matching_evaluate_rejects_repeats() {
        let a = Diagram::from_points([pt("0", "2"), pt("1", "3")]);
        assert!(Matching::evaluate(&a, &a, &[(0, 0), (1, 0)]).is_err());
        assert!(Matching::evaluate(&a, &a, &[(0, 5)]).is_err());
    }

    #[test]
    fn hopcroft_karp_finds_maximum() {
        // a path graph where greedy would fail
        let adj = vec![vec![0, 1], vec![0]];
        let m = hopcroft_karp(2, &adj);
        assert_eq!(m, vec![Some(1), Some(0)]);
    }

    #[test]
    fn shift_examples() {
        let v = k(DecoratedInterval::closed(1, 2));
        assert_eq!(shift(&v, Real::zero()), v);
        assert_eq!(shift(&v, Real::from(1)), k(DecoratedInterval::closed(0, 1)));
        let w = random_module(3, f2(), 3, 2);
        assert_eq!(shift(&shift(&w, r("0.5")), r("1.25")), shift(&w, r("1.75")));
        for t in ["-1", "0", "0.5", "1", "1.5", "3"] {
            assert_eq!(shift(&v, r("0.5")).evaluate_dim(r(t)), v.evaluate_dim(r(t) + r("0.5")));
        }
    }

    #[test]
    fn shift_map_examples() {
        let v = random_module(11, f2(), 3, 3);
        assert_eq!(shift_map(&v, Real::zero()).unwrap(), Morphism::identity(&v));
        assert!(matches!(shift_map(&v, r("-1")), Err(Error::NegativeShift(_))));

        let k03 = k(DecoratedInterval::closed(0, 3));
        let s = shift_map(&k03, Real::from(1)).unwrap();
        assert!(s.is_natural());
        // nonzero exactly on [0, 2]
        for (k, c) in s.comps().iter().enumerate() {
            let t = crate::persmod::piece_representative(s.criticals(), k);
            let inside = r("0") <= t && t <= r("2");
            assert_eq!(!c.is_zero(), inside, "piece {k}");
        }
        assert!(shift_map(&k03, Real::from(4)).unwrap().is_zero());
    }

    #[test]
    fn verify_examples() {
        let v = random_module(5, FieldSpec::new(5).unwrap(), 3, 3);
        let id = Interleaving {
            epsilon: Real::zero(),
            fwd: Morphism::identity(&v),
            bwd: Morphism::identity(&v),
        };
        assert!(verify_interleaving(&v, &v, &id).unwrap());

        let v = k(DecoratedInterval::open(0, 1));
        let z = GridModule::zero(f2(), vec![]);
        let eps = r("0.5");
        let zero_il = Interleaving {
            epsilon: eps,
            fwd: Morphism::zero(&v, &shift(&z, eps).refine_to(v.criticals()).unwrap()).unwrap(),
            bwd: Morphism::zero(&z.refine_to(shift(&v, eps).criticals()).unwrap(), &shift(&v, eps)).unwrap(),
        };
        assert!(verify_interleaving(&v, &z, &zero_il).unwrap());
        let short = Interleaving { epsilon: r("0.25"), ..zero_il };
        assert!(!verify_interleaving(&v, &z, &short).unwrap_or(false));
    }

    #[test]
    fn perturbed_interleaving_fails() {
        let v = k(DecoratedInterval::open(0, 2));
        let w = k(DecoratedInterval::open(r("0.5"), r("2.5")));
        let (val, m) = bottleneck(&diagram(&v), &diagram(&w));
        assert_eq!(val, fin("0.5"));
        let il = build_interleaving(&v, &w, &m, r("0.5")).unwrap();
        assert!(verify_interleaving(&v, &w, &il).unwrap());
        let k = (0..il.fwd.comps().len()).find(|&k| !il.fwd.comp(k).is_zero()).unwrap();
        let mut comps = il.fwd.comps().to_vec();
        comps[k] = Mat::zeros(f2(), comps[k].rows(), comps[k].cols());
        let broken = Interleaving {
            fwd: Morphism::new(il.fwd.source().clone(), il.fwd.target().clone(), comps).unwrap(),
            ..il
        };
        assert!(!verify_interleaving(&v, &w, &broken).unwrap());
    }

    #[test]
    fn build_examples() {
        let v = random_module(8, FieldSpec::new(3).unwrap(), 3, 3);
        let d = diagram(&v);
        let (val, m) = bottleneck(&d, &d);
        assert_eq!(val, fin("0"));
        let il = build_interleaving(&v, &v, &m, Real::zero()).unwrap();
        assert!(verify_interleaving(&v, &v, &il).unwrap());

        let v = k(DecoratedInterval::open(0, 1));
        let z = GridModule::zero(f2(), vec![]);
        let (val, m) = bottleneck(&diagram(&v), &diagram(&z));
        assert_eq!(val, fin("0.5"));
        let il = build_interleaving(&v, &z, &m, r("0.5")).unwrap();
        assert!(il.fwd.is_zero() && il.bwd.is_zero());
        assert!(verify_interleaving(&v, &z, &il).unwrap());
        assert!(matches!(
            build_interleaving(&v, &z, &m, r("0.4")),
            Err(Error::EpsilonBelowCost { .. })
        ));
    }

    #[test]
    fn interleaving_distance_examples() {
        let v = random_module(21, f2(), 4, 3);
        assert_eq!(interleaving_distance(&v, &v).unwrap(), fin("0"));
        assert_eq!(interleaving_distance(&v, &radical(&v)).unwrap(), fin("0"));
        let a = k(DecoratedInterval::open(0, 2));
        let b = k(DecoratedInterval::open(0, 3));
        assert_eq!(interleaving_distance(&a, &b).unwrap(), fin("1"));
    }

    #[test]
    fn optimal_interleaving_attains_distance() {
        for seed in 0..40 {
            let v = random_module(seed, f2(), 3, 2);
            let w = random_module(seed + 1000, f2(), 3, 2);
            let (val, il) = optimal_interleaving(&v, &w).unwrap();
            assert_eq!(val, interleaving_distance(&v, &w).unwrap());
            if let Some(il) = il {
                assert!(verify_interleaving(&bar(&v), &bar(&w), &il).unwrap(), "seed {seed}");
            }
        }
    }

    #[test]
    fn distance_zero_iff_ob_isomorphic() {
        for seed in 0..60 {
            let v = random_module(seed, f2(), 2, 2);
            let w = random_module(seed + 7, f2(), 2, 2);
            let zero = interleaving_distance(&v, &w).unwrap() == fin("0");
            assert_eq!(zero, ob_isomorphic(&v, &w).unwrap());
        }
    }

    #[test]
    fn mixed_decorations_interleave_above_the_distance() {
        // [0, 2) and (0.5, 2): the distance 0.5 is only approached
        let v = k(DecoratedInterval::closed_open(0, 2));
        let w = k(DecoratedInterval::open(r("0.5"), r("2")));
        let (val, m) = bottleneck(&diagram(&v), &diagram(&w));
        assert_eq!(val, fin("0.5"));
        let at = build_interleaving(&v, &w, &m, r("0.5")).unwrap();
        assert!(!verify_interleaving(&v, &w, &at).unwrap());
        let above = build_interleaving(&v, &w, &m, r("0.51")).unwrap();
        assert!(verify_interleaving(&v, &w, &above).unwrap());
    }
}
