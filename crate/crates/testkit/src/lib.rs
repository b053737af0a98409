//! Brute-force oracles and random generators for testing `obpers`.
//!
//! The oracles deliberately avoid the production code paths: they use only
//! matrices and subspaces from `obpers::exactfield` and the raw data of a
//! [`GridModule`].

use std::fmt;

use obpers::diagrams::{Diagram, DiagramPoint, Rectangle};
use obpers::persmod::{interval_module, random_grid, random_module_with, Bound, DecoratedInterval, GridModule, Morphism};
use obpers::{ExtReal, FieldSpec, Mat, Real, Subspace};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, thiserror::Error)]
pub enum TestkitError {
    #[error("brute force supports at most {limit} points, got {got}")]
    TooLarge { limit: usize, got: usize },
    #[error(transparent)]
    Core(#[from] obpers::Error),
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Outcome of running an oracle over many cases.
#[derive(Clone, Debug, Default)]
pub struct OracleReport {
    pub cases: usize,
    pub mismatches: Vec<(u64, String)>,
}

impl OracleReport {
    pub fn new() -> OracleReport {
        OracleReport::default()
    }

    pub fn check(&mut self, seed: u64, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.mismatches.push((seed, describe()));
        }
    }

    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }

    pub fn merge(&mut self, other: OracleReport) {
        self.cases += other.cases;
        self.mismatches.extend(other.mismatches);
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} cases, {} mismatches", self.cases, self.mismatches.len())?;
        if let Some((seed, what)) = self.mismatches.first() {
            write!(f, " (first: seed {seed}: {what})")?;
        }
        Ok(())
    }
}

// bottleneck by enumeration

pub const BRUTE_BOTTLENECK_LIMIT: usize = 7;

fn gap_to(x: ExtReal, y: ExtReal) -> ExtReal {
    if x == y {
        return ExtReal::Finite(Real::zero());
    }
    match (x.finite(), y.finite()) {
        (Some(a), Some(b)) => ExtReal::Finite(if a < b { b - a } else { a - b }),
        _ => ExtReal::PosInf,
    }
}

fn linf(x: &DiagramPoint, y: &DiagramPoint) -> ExtReal {
    gap_to(x.p, y.p).max(gap_to(x.q, y.q))
}

fn to_diagonal(x: &DiagramPoint) -> ExtReal {
    match (x.p.finite(), x.q.finite()) {
        (Some(p), Some(q)) => ExtReal::Finite((q - p).half()),
        _ => ExtReal::PosInf,
    }
}

/// Minimum cost over every partial matching, enumerated explicitly.
pub fn brute_bottleneck(d1: &Diagram, d2: &Diagram) -> Result<ExtReal, TestkitError> {
    let (x, y) = (d1.expanded(), d2.expanded());
    let got = x.len() + y.len();
    if got > BRUTE_BOTTLENECK_LIMIT {
        return Err(TestkitError::TooLarge {
            limit: BRUTE_BOTTLENECK_LIMIT,
            got,
        });
    }
    fn go(i: usize, x: &[DiagramPoint], y: &[DiagramPoint], used: &mut Vec<bool>, acc: ExtReal) -> ExtReal {
        if i == x.len() {
            return y
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .fold(acc, |c, (p, _)| c.max(to_diagonal(p)));
        }
        let mut best = go(i + 1, x, y, used, acc.max(to_diagonal(&x[i])));
        for j in 0..y.len() {
            if !used[j] {
                used[j] = true;
                best = best.min(go(i + 1, x, y, used, acc.max(linf(&x[i], &y[j]))));
                used[j] = false;
            }
        }
        best
    }
    Ok(go(0, &x, &y, &mut vec![false; y.len()], ExtReal::Finite(Real::zero())))
}

// rectangle multiplicities through subspace lattices

fn composite(v: &GridModule, from: usize, to: usize) -> Mat {
    (from..to).fold(Mat::identity(v.field(), v.dim(from)), |acc, k| v.map(k) * &acc)
}

/// Multiplicity of the summand supported exactly on `b..=c` in the restriction
/// of `v` to pieces `a < b ≤ c < d`, with `None` standing for ±∞.
///
/// Inside `V_b`, with `I` the image from `a` and `K_c ⊆ K_d` the kernels towards
/// `c` and `d`, the count is `dim K_d / (K_c + (I ∩ K_d))`.
pub fn brute_multiplicity(v: &GridModule, a: Option<usize>, b: usize, c: usize, d: Option<usize>) -> usize {
    let field = v.field();
    let n = v.dim(b);
    let image = match a {
        Some(a) => Subspace::span(&composite(v, a, b)),
        None => Subspace::zero(field, n),
    };
    let k_c = composite(v, b, c).kernel_basis();
    let k_d = match d {
        Some(d) => composite(v, b, d).kernel_basis(),
        None => Subspace::full(field, n),
    };
    let lower = k_c.sum(&image.intersect(&k_d).unwrap()).unwrap();
    k_d.dim() - lower.dim()
}

fn piece_containing(criticals: &[Real], t: Real) -> Option<usize> {
    let below = criticals.iter().filter(|&&c| c < t).count();
    if criticals.contains(&t) {
        None
    } else {
        Some(2 * below)
    }
}

/// [`brute_multiplicity`] on the pieces containing the corners of `r`.
/// `None` if a corner sits on a critical value.
pub fn brute_measure(v: &GridModule, r: &Rectangle) -> Option<usize> {
    let crit = v.criticals();
    let outer = |t: ExtReal| match t {
        ExtReal::Finite(x) => piece_containing(crit, x).map(Some),
        _ => Some(None),
    };
    Some(brute_multiplicity(
        v,
        outer(r.a)?,
        piece_containing(crit, r.b)?,
        piece_containing(crit, r.c)?,
        outer(r.d)?,
    ))
}

// weak isomorphisms by changing singleton pieces

/// Replaces the space at singleton piece `k`: quotient by `kill` (columns
/// spanning a subspace of the kernel of the outgoing map), then append
/// `x.cols()` new dimensions mapped forward by `x`, then change basis by `g`.
/// Returns `w` and the weak isomorphism `v → w`.
pub fn jitter_at(v: &GridModule, k: usize, kill: &Mat, x: &Mat, g: &Mat) -> Result<(GridModule, Morphism), TestkitError> {
    assert!(k % 2 == 1, "piece {k} is not a singleton");
    let field = v.field();
    let (alpha, beta) = (v.map(k - 1), v.map(k));
    let kernel = Subspace::span(kill);
    debug_assert!((beta * kernel.basis()).is_zero(), "killed vectors must die going forward");
    let q = kernel.quotient_coords(&Mat::identity(field, v.dim(k)));
    let beta_tilde = beta * &kernel.complement();
    let extra = x.cols();
    let pad = Mat::zeros(field, extra, v.dim(k));
    let f_k = g * &q.vstack(&pad)?;
    let g_inv = g.inverse()?;
    let new_alpha = &f_k * alpha;
    let new_beta = &beta_tilde.hstack(x)? * &g_inv;

    let mut dims = v.dims().to_vec();
    dims[k] = q.rows() + extra;
    let mut maps = v.maps().to_vec();
    maps[k - 1] = new_alpha;
    maps[k] = new_beta;
    let w = GridModule::new(field, v.criticals().to_vec(), dims, maps)?;
    let comps = (0..v.n_pieces())
        .map(|j| if j == k { f_k.clone() } else { Mat::identity(field, v.dim(j)) })
        .collect();
    let f = Morphism::new(v.clone(), w.clone(), comps)?;
    Ok((w, f))
}

/// How much [`jitter_weak_iso_with`] may change each singleton.
#[derive(Clone, Copy, Debug)]
pub struct JitterSpec {
    pub max_shrink: usize,
    pub max_grow: usize,
    pub change_basis: bool,
}

impl JitterSpec {
    pub fn none() -> JitterSpec {
        JitterSpec {
            max_shrink: 0,
            max_grow: 0,
            change_basis: false,
        }
    }
}

impl Default for JitterSpec {
    fn default() -> JitterSpec {
        JitterSpec {
            max_shrink: 2,
            max_grow: 2,
            change_basis: true,
        }
    }
}

pub fn jitter_weak_iso(v: &GridModule, seed: u64) -> (GridModule, Morphism) {
    jitter_weak_iso_with(v, &mut rng(seed), JitterSpec::default())
}

/// A module differing from `v` only at singleton pieces, with a weak isomorphism `v → w`.
pub fn jitter_weak_iso_with<R: Rng + ?Sized>(v: &GridModule, rng: &mut R, spec: JitterSpec) -> (GridModule, Morphism) {
    let field = v.field();
    let mut w = v.clone();
    let mut f = Morphism::identity(v);
    for k in (1..v.n_pieces()).step_by(2) {
        let ker = w.map(k).kernel_basis();
        let shrink = rng.gen_range(0..=spec.max_shrink.min(ker.dim()));
        let kill = ker.basis() * &Mat::random(field, ker.dim(), shrink, rng);
        let kept = w.dim(k) - Subspace::span(&kill).dim();
        let grow = rng.gen_range(0..=spec.max_grow);
        let x = Mat::random(field, w.dim(k + 1), grow, rng);
        let g = if spec.change_basis {
            Mat::random_invertible(field, kept + grow, rng)
        } else {
            Mat::identity(field, kept + grow)
        };
        let (next, step) = jitter_at(&w, k, &kill, &x, &g).expect("shapes agree by construction");
        f = f.then(&step).expect("same grid");
        w = next;
    }
    (w, f)
}

// generators

/// Field GF(2) or GF(5), alternating with the seed.
pub fn field_for(seed: u64) -> FieldSpec {
    if seed.is_multiple_of(2) {
        FieldSpec::gf2()
    } else {
        FieldSpec::new(5).unwrap()
    }
}

pub fn random_module<R: Rng + ?Sized>(rng: &mut R, field: FieldSpec, max_criticals: usize, max_dim: usize) -> GridModule {
    let n = rng.gen_range(0..=max_criticals);
    random_module_with(rng, field, n, max_dim)
}

/// An interval whose finite endpoints are taken from `grid`.
pub fn random_interval<R: Rng + ?Sized>(rng: &mut R, grid: &[Real]) -> DecoratedInterval {
    loop {
        let pick = |rng: &mut R, open: bool| -> Bound {
            if grid.is_empty() || rng.gen_ratio(1, 6) {
                return Bound::Unbounded;
            }
            let c = *grid.choose(rng).unwrap();
            if open {
                Bound::Open(c)
            } else {
                Bound::Closed(c)
            }
        };
        let (lo, hi) = (rng.gen_bool(0.5), rng.gen_bool(0.5));
        let (l, r) = (pick(rng, lo), pick(rng, hi));
        if let Ok(iv) = DecoratedInterval::new(l, r) {
            return iv;
        }
    }
}

/// A direct sum of random interval modules, disguised by a random change of
/// basis at every piece. Returns the module and its intervals.
pub fn random_interval_sum<R: Rng + ?Sized>(
    rng: &mut R,
    field: FieldSpec,
    grid: &[Real],
    count: usize,
) -> (GridModule, Vec<DecoratedInterval>) {
    let ivs: Vec<DecoratedInterval> = (0..count).map(|_| random_interval(rng, grid)).collect();
    let mods: Vec<GridModule> = ivs.iter().map(|iv| interval_module(field, iv, grid).unwrap()).collect();
    let sum = if mods.is_empty() {
        GridModule::zero(field, grid.to_vec())
    } else {
        obpers::persmod::direct_sum(field, &mods).unwrap()
    };
    (change_basis(rng, &sum), ivs)
}

/// The same module after a random invertible change of basis at every piece.
pub fn change_basis<R: Rng + ?Sized>(rng: &mut R, v: &GridModule) -> GridModule {
    let field = v.field();
    let gs: Vec<Mat> = v.dims().iter().map(|&d| Mat::random_invertible(field, d, rng)).collect();
    let maps = (0..v.last_piece())
        .map(|k| &(&gs[k + 1] * v.map(k)) * &gs[k].inverse().unwrap())
        .collect();
    GridModule::new(field, v.criticals().to_vec(), v.dims().to_vec(), maps).unwrap()
}

/// A module whose open pieces are all zero.
pub fn random_ephemeral<R: Rng + ?Sized>(rng: &mut R, field: FieldSpec, n: usize, max_dim: usize) -> GridModule {
    let grid = random_grid(rng, n);
    let dims: Vec<usize> = (0..2 * n + 1)
        .map(|k| if k % 2 == 1 { rng.gen_range(0..=max_dim) } else { 0 })
        .collect();
    let maps = dims.windows(2).map(|w| Mat::zeros(field, w[1], w[0])).collect();
    GridModule::new(field, grid, dims, maps).unwrap()
}

/// A short exact sequence `0 → sub → mid → quot → 0`.
pub struct ShortExact {
    pub inclusion: Morphism,
    pub projection: Morphism,
}

impl ShortExact {
    pub fn sub(&self) -> &GridModule {
        self.inclusion.source()
    }

    pub fn mid(&self) -> &GridModule {
        self.inclusion.target()
    }

    pub fn quot(&self) -> &GridModule {
        self.projection.target()
    }
}

/// The submodule of `w` generated piecewise by `seeds[k]` together with the image of earlier pieces.
pub fn generated_submodule(w: &GridModule, seeds: &[Mat]) -> Morphism {
    let field = w.field();
    let mut bases: Vec<Mat> = Vec::new();
    assert_eq!(seeds.len(), w.n_pieces(), "one seed matrix per piece");
    for (k, seed) in seeds.iter().enumerate().take(w.n_pieces()) {
        let pushed = match bases.last() {
            Some(prev) => w.map(k - 1) * prev,
            None => Mat::zeros(field, w.dim(0), 0),
        };
        let span = Subspace::span(&pushed.hstack(seed).unwrap());
        bases.push(span.basis().clone());
    }
    let spaces: Vec<Subspace> = bases.iter().map(Subspace::span).collect();
    let dims: Vec<usize> = bases.iter().map(Mat::cols).collect();
    let maps = (0..w.last_piece())
        .map(|k| spaces[k + 1].coordinates(&(w.map(k) * &bases[k])).expect("stable under structure maps"))
        .collect();
    let sub = GridModule::new(field, w.criticals().to_vec(), dims, maps).unwrap();
    Morphism::new(sub, w.clone(), bases).unwrap()
}

/// Random short exact sequences, biased so that each of the three terms is
/// ephemeral reasonably often.
pub fn random_short_exact<R: Rng + ?Sized>(rng: &mut R, field: FieldSpec, max_criticals: usize, max_dim: usize) -> ShortExact {
    let n = rng.gen_range(0..=max_criticals);
    let mode = rng.gen_range(0..4);
    let w = if mode == 0 {
        random_ephemeral(rng, field, n, max_dim)
    } else {
        random_module_with(rng, field, n, max_dim)
    };
    let seeds: Vec<Mat> = (0..w.n_pieces())
        .map(|k| match mode {
            // only vectors at singletons that die immediately: an ephemeral submodule
            1 if k % 2 == 1 && k < w.last_piece() => {
                let ker = w.map(k).kernel_basis();
                let c = rng.gen_range(0..=ker.dim());
                ker.basis() * &Mat::random(field, ker.dim(), c, rng)
            }
            1 => Mat::zeros(field, w.dim(k), 0),
            // everything except some singleton directions: an ephemeral quotient
            2 if k % 2 == 0 => Mat::identity(field, w.dim(k)),
            2 => Mat::zeros(field, w.dim(k), 0),
            _ => {
                let c = rng.gen_range(0..=2);
                Mat::random(field, w.dim(k), c, rng)
            }
        })
        .collect();
    let inclusion = generated_submodule(&w, &seeds);
    let projection = inclusion.cokernel_projection();
    ShortExact { inclusion, projection }
}

/// The points `k / 2 + 1 / 4`, which never coincide with grid values from
/// [`random_grid`].
pub fn off_grid<R: Rng + ?Sized>(rng: &mut R, lo: i64, hi: i64) -> Real {
    Real::new((2 * rng.gen_range(2 * lo..2 * hi) + 1) as i128, 4)
}

/// A rectangle with corners off the half-integer lattice, `a` and `d` sometimes infinite.
pub fn random_rectangle<R: Rng + ?Sized>(rng: &mut R) -> Rectangle {
    loop {
        let mut xs: Vec<Real> = (0..4).map(|_| off_grid(rng, -1, 8)).collect();
        xs.sort();
        xs.dedup();
        if xs.len() < 4 {
            continue;
        }
        let a = if rng.gen_ratio(1, 5) { ExtReal::NegInf } else { ExtReal::Finite(xs[0]) };
        let d = if rng.gen_ratio(1, 5) { ExtReal::PosInf } else { ExtReal::Finite(xs[3]) };
        return Rectangle::new(a, xs[1], xs[2], d).unwrap();
    }
}

/// A point whose finite coordinates are quarter-integers in `[0, 4]`.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R) -> DiagramPoint {
    loop {
        let p = if rng.gen_ratio(1, 8) { ExtReal::NegInf } else { ExtReal::Finite(Real::new(rng.gen_range(0..=16), 4)) };
        let q = if rng.gen_ratio(1, 8) { ExtReal::PosInf } else { ExtReal::Finite(Real::new(rng.gen_range(0..=16), 4)) };
        if let Ok(x) = DiagramPoint::new(p, q) {
            return x;
        }
    }
}

pub fn random_diagram<R: Rng + ?Sized>(rng: &mut R, max_points: usize) -> Diagram {
    let n = rng.gen_range(0..=max_points);
    Diagram::from_points((0..n).map(|_| random_point(rng)).collect::<Vec<_>>())
}

/// The same module with each critical value moved by a multiple of `eps / 4`
/// in `[-eps, eps]`, keeping the values strictly increasing.
pub fn perturb_criticals<R: Rng + ?Sized>(rng: &mut R, v: &GridModule, eps: Real) -> GridModule {
    let quarter = Real::new(eps.numer(), eps.denom() * 4);
    loop {
        let moved: Vec<Real> = v
            .criticals()
            .iter()
            .map(|&c| {
                let steps = rng.gen_range(-4i64..=4);
                let mut shift = Real::zero();
                for _ in 0..steps.abs() {
                    shift = shift + quarter;
                }
                if steps < 0 {
                    c - shift
                } else {
                    c + shift
                }
            })
            .collect();
        if moved.windows(2).all(|w| w[0] < w[1]) {
            return GridModule::new(v.field(), moved, v.dims().to_vec(), v.maps().to_vec()).unwrap();
        }
    }
}
