//! Constructible persistence modules over the real line.
//!
//! A module with critical values `c_1 < … < c_n` is constant on each of the
//! `2n + 1` pieces
//!
//! ```text
//! piece:  0         1      2           3     …   2n
//!         (-inf,c1) {c1}   (c1,c2)     {c2}  …   (cn,+inf)
//! ```
//!
//! so it is described by one vector space per piece and one structure map
//! between each pair of adjacent pieces. Even pieces are open intervals and
//! odd pieces are singletons.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exactfield::{FieldSpec, Mat, Subspace};
use crate::real::{ExtReal, Real};

/// Index of a piece of the grid, in `0..=2n`.
pub type PieceIndex = usize;

pub fn piece_count(criticals: &[Real]) -> usize {
    2 * criticals.len() + 1
}

pub fn is_singleton_piece(k: PieceIndex) -> bool {
    k % 2 == 1
}

/// The piece of the grid containing `t`.
pub fn piece_of(criticals: &[Real], t: Real) -> PieceIndex {
    match criticals.binary_search(&t) {
        Ok(i) => 2 * i + 1,
        Err(i) => 2 * i,
    }
}

/// A point inside piece `k`.
pub fn piece_representative(criticals: &[Real], k: PieceIndex) -> Real {
    let n = criticals.len();
    if is_singleton_piece(k) {
        return criticals[k / 2];
    }
    let j = k / 2;
    match (j, n) {
        (_, 0) => Real::zero(),
        (0, _) => criticals[0] - Real::from(1),
        (j, n) if j == n => criticals[n - 1] + Real::from(1),
        (j, _) => Real::midpoint(criticals[j - 1], criticals[j]),
    }
}

/// Sorted union of two strictly increasing grids.
pub fn union_grid(a: &[Real], b: &[Real]) -> Vec<Real> {
    let mut out: Vec<Real> = a.iter().chain(b).copied().collect();
    out.sort();
    out.dedup();
    out
}

/// Position of a decorated endpoint relative to a real value: `r⁻ < r < r⁺`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Decoration {
    Below,
    At,
    Above,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    Unbounded,
    Open(Real),
    Closed(Real),
}

impl Bound {
    pub fn value(&self) -> Option<Real> {
        match self {
            Bound::Unbounded => None,
            Bound::Open(v) | Bound::Closed(v) => Some(*v),
        }
    }

    fn translated(&self, by: Real) -> Bound {
        match self {
            Bound::Unbounded => Bound::Unbounded,
            Bound::Open(v) => Bound::Open(*v + by),
            Bound::Closed(v) => Bound::Closed(*v + by),
        }
    }
}

/// An interval of the real line with decorated endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DecoratedInterval {
    left: Bound,
    right: Bound,
}

impl DecoratedInterval {
    pub fn new(left: Bound, right: Bound) -> Result<DecoratedInterval> {
        let iv = DecoratedInterval { left, right };
        let ok = match (left.value(), right.value()) {
            (Some(a), Some(b)) => {
                a < b || (a == b && matches!((left, right), (Bound::Closed(_), Bound::Closed(_))))
            }
            _ => true,
        };
        if ok {
            Ok(iv)
        } else {
            Err(Error::InvalidInterval(format!("{iv} is empty")))
        }
    }

    pub fn closed(a: impl Into<Real>, b: impl Into<Real>) -> DecoratedInterval {
        Self::new(Bound::Closed(a.into()), Bound::Closed(b.into())).expect("nonempty interval")
    }

    pub fn open(a: impl Into<Real>, b: impl Into<Real>) -> DecoratedInterval {
        Self::new(Bound::Open(a.into()), Bound::Open(b.into())).expect("nonempty interval")
    }

    pub fn closed_open(a: impl Into<Real>, b: impl Into<Real>) -> DecoratedInterval {
        Self::new(Bound::Closed(a.into()), Bound::Open(b.into())).expect("nonempty interval")
    }

    pub fn open_closed(a: impl Into<Real>, b: impl Into<Real>) -> DecoratedInterval {
        Self::new(Bound::Open(a.into()), Bound::Closed(b.into())).expect("nonempty interval")
    }

    pub fn singleton(c: impl Into<Real>) -> DecoratedInterval {
        let c = c.into();
        DecoratedInterval {
            left: Bound::Closed(c),
            right: Bound::Closed(c),
        }
    }

    pub fn whole_line() -> DecoratedInterval {
        DecoratedInterval {
            left: Bound::Unbounded,
            right: Bound::Unbounded,
        }
    }

    pub fn left(&self) -> Bound {
        self.left
    }

    pub fn right(&self) -> Bound {
        self.right
    }

    pub fn is_singleton(&self) -> bool {
        matches!((self.left, self.right), (Bound::Closed(a), Bound::Closed(b)) if a == b)
    }

    /// Undecorated left endpoint.
    pub fn inf(&self) -> ExtReal {
        self.left.value().map_or(ExtReal::NegInf, ExtReal::Finite)
    }

    /// Undecorated right endpoint.
    pub fn sup(&self) -> ExtReal {
        self.right.value().map_or(ExtReal::PosInf, ExtReal::Finite)
    }

    /// The decorated starting position, for comparisons like "starts no later than".
    pub fn start(&self) -> (ExtReal, Decoration) {
        match self.left {
            Bound::Unbounded => (ExtReal::NegInf, Decoration::At),
            Bound::Closed(v) => (ExtReal::Finite(v), Decoration::At),
            Bound::Open(v) => (ExtReal::Finite(v), Decoration::Above),
        }
    }

    /// The decorated ending position.
    pub fn end(&self) -> (ExtReal, Decoration) {
        match self.right {
            Bound::Unbounded => (ExtReal::PosInf, Decoration::At),
            Bound::Closed(v) => (ExtReal::Finite(v), Decoration::At),
            Bound::Open(v) => (ExtReal::Finite(v), Decoration::Below),
        }
    }

    /// The open interval with the same undecorated endpoints, or `None` for a singleton.
    pub fn interior(&self) -> Option<DecoratedInterval> {
        if self.is_singleton() {
            return None;
        }
        let open = |b: Bound| match b {
            Bound::Closed(v) => Bound::Open(v),
            other => other,
        };
        Some(DecoratedInterval {
            left: open(self.left),
            right: open(self.right),
        })
    }

    pub fn contains(&self, t: Real) -> bool {
        let after_left = match self.left {
            Bound::Unbounded => true,
            Bound::Open(a) => t > a,
            Bound::Closed(a) => t >= a,
        };
        let before_right = match self.right {
            Bound::Unbounded => true,
            Bound::Open(b) => t < b,
            Bound::Closed(b) => t <= b,
        };
        after_left && before_right
    }

    pub fn translated(&self, by: Real) -> DecoratedInterval {
        DecoratedInterval {
            left: self.left.translated(by),
            right: self.right.translated(by),
        }
    }

    /// The contiguous range of pieces `[a, b]` of the grid covered by this interval.
    pub fn piece_range(&self, criticals: &[Real]) -> Result<(PieceIndex, PieceIndex)> {
        let locate = |v: Real| {
            criticals
                .binary_search(&v)
                .map_err(|_| Error::InvalidInterval(format!("endpoint {v} of {self} is not a critical value")))
        };
        let a = match self.left {
            Bound::Unbounded => 0,
            Bound::Closed(v) => 2 * locate(v)? + 1,
            Bound::Open(v) => 2 * locate(v)? + 2,
        };
        let b = match self.right {
            Bound::Unbounded => 2 * criticals.len(),
            Bound::Closed(v) => 2 * locate(v)? + 1,
            Bound::Open(v) => 2 * locate(v)?,
        };
        Ok((a, b))
    }

    /// Inverse of [`DecoratedInterval::piece_range`].
    pub fn from_piece_range(criticals: &[Real], a: PieceIndex, b: PieceIndex) -> DecoratedInterval {
        let n = criticals.len();
        assert!(a <= b && b <= 2 * n, "bad piece range {a}..={b}");
        let left = if a == 0 {
            Bound::Unbounded
        } else if is_singleton_piece(a) {
            Bound::Closed(criticals[a / 2])
        } else {
            Bound::Open(criticals[a / 2 - 1])
        };
        let right = if b == 2 * n {
            Bound::Unbounded
        } else if is_singleton_piece(b) {
            Bound::Closed(criticals[b / 2])
        } else {
            Bound::Open(criticals[b / 2])
        };
        DecoratedInterval { left, right }
    }
}

impl Ord for DecoratedInterval {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.start(), self.end()).cmp(&(other.start(), other.end()))
    }
}

impl PartialOrd for DecoratedInterval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DecoratedInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.left {
            Bound::Unbounded => f.write_str("(-inf")?,
            Bound::Open(v) => write!(f, "({v}")?,
            Bound::Closed(v) => write!(f, "[{v}")?,
        }
        f.write_str(", ")?;
        match self.right {
            Bound::Unbounded => f.write_str("+inf)"),
            Bound::Open(v) => write!(f, "{v})"),
            Bound::Closed(v) => write!(f, "{v}]"),
        }
    }
}

/// A constructible persistence module: one vector space per piece and a
/// structure map from each piece to the next.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GridModule {
    field: FieldSpec,
    criticals: Vec<Real>,
    dims: Vec<usize>,
    maps: Vec<Mat>,
}

impl GridModule {
    pub fn new(field: FieldSpec, criticals: Vec<Real>, dims: Vec<usize>, maps: Vec<Mat>) -> Result<GridModule> {
        if criticals.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidModule("critical values must be strictly increasing".into()));
        }
        let pieces = piece_count(&criticals);
        if dims.len() != pieces {
            return Err(Error::InvalidModule(format!(
                "{} critical values need {pieces} piece dimensions, got {}",
                criticals.len(),
                dims.len()
            )));
        }
        if maps.len() != pieces - 1 {
            return Err(Error::InvalidModule(format!(
                "{} critical values need {} structure maps, got {}",
                criticals.len(),
                pieces - 1,
                maps.len()
            )));
        }
        for (k, m) in maps.iter().enumerate() {
            if m.field() != field {
                return Err(Error::FieldMismatch(field.characteristic(), m.field().characteristic()));
            }
            if m.cols() != dims[k] || m.rows() != dims[k + 1] {
                return Err(Error::InvalidModule(format!(
                    "map {k} is {}x{} but must be {}x{} (dims[{}] x dims[{k}])",
                    m.rows(),
                    m.cols(),
                    dims[k + 1],
                    dims[k],
                    k + 1
                )));
            }
        }
        Ok(GridModule {
            field,
            criticals,
            dims,
            maps,
        })
    }

    pub fn zero(field: FieldSpec, criticals: Vec<Real>) -> GridModule {
        let pieces = piece_count(&criticals);
        GridModule {
            field,
            criticals,
            dims: vec![0; pieces],
            maps: vec![Mat::zeros(field, 0, 0); pieces - 1],
        }
    }

    /// The module with the same space `k^dim` everywhere and identity maps.
    pub fn constant(field: FieldSpec, criticals: Vec<Real>, dim: usize) -> GridModule {
        let pieces = piece_count(&criticals);
        GridModule {
            field,
            criticals,
            dims: vec![dim; pieces],
            maps: vec![Mat::identity(field, dim); pieces - 1],
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn criticals(&self) -> &[Real] {
        &self.criticals
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn maps(&self) -> &[Mat] {
        &self.maps
    }

    pub fn map(&self, k: PieceIndex) -> &Mat {
        &self.maps[k]
    }

    pub fn dim(&self, k: PieceIndex) -> usize {
        self.dims[k]
    }

    pub fn n_pieces(&self) -> usize {
        self.dims.len()
    }

    pub fn last_piece(&self) -> PieceIndex {
        self.dims.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|&d| d == 0)
    }

    pub fn piece_of(&self, t: Real) -> PieceIndex {
        piece_of(&self.criticals, t)
    }

    /// The composite structure map from piece `from` to piece `to`.
    pub fn composite(&self, from: PieceIndex, to: PieceIndex) -> Result<Mat> {
        if from > to {
            return Err(Error::PieceOrder { from, to });
        }
        let mut acc = Mat::identity(self.field, self.dims[from]);
        for k in from..to {
            acc = &self.maps[k] * &acc;
        }
        Ok(acc)
    }

    pub fn structure_rank(&self, from: PieceIndex, to: PieceIndex) -> Result<usize> {
        Ok(self.composite(from, to)?.rank())
    }

    pub fn evaluate_dim(&self, t: Real) -> usize {
        self.dims[self.piece_of(t)]
    }

    /// True iff every structure map between distinct parameters vanishes.
    pub fn is_ephemeral(&self) -> bool {
        let open_zero = self.dims.iter().step_by(2).all(|&d| d == 0);
        if !open_zero {
            return false;
        }
        (0..self.n_pieces()).all(|from| {
            let mut acc = Mat::identity(self.field, self.dims[from]);
            (from..self.last_piece()).all(|k| {
                acc = &self.maps[k] * &acc;
                acc.is_zero()
            })
        })
    }

    /// Re-expresses the module on a finer grid. `grid` must contain every current critical value.
    pub fn refine_to(&self, grid: &[Real]) -> Result<GridModule> {
        if grid == self.criticals.as_slice() {
            return Ok(self.clone());
        }
        let coarse = fine_to_coarse(&self.criticals, grid)?;
        let dims: Vec<usize> = coarse.iter().map(|&c| self.dims[c]).collect();
        let maps = coarse
            .windows(2)
            .map(|w| {
                if w[0] == w[1] {
                    Mat::identity(self.field, self.dims[w[0]])
                } else {
                    self.maps[w[0]].clone()
                }
            })
            .collect();
        GridModule::new(self.field, grid.to_vec(), dims, maps)
    }

    /// Adds the given critical values; evaluation at every real point is unchanged.
    pub fn refine(&self, extra: &[Real]) -> GridModule {
        let mut extra = extra.to_vec();
        extra.sort();
        extra.dedup();
        let grid = union_grid(&self.criticals, &extra);
        self.refine_to(&grid).expect("union contains the original grid")
    }

    /// The same module with every critical value moved by `by`.
    pub fn translated(&self, by: Real) -> GridModule {
        GridModule {
            criticals: self.criticals.iter().map(|&c| c + by).collect(),
            ..self.clone()
        }
    }

    /// Returns a copy with the data at one piece replaced; used by constructions
    /// that only touch singleton pieces.
    pub(crate) fn with_piece(&self, k: PieceIndex, dim: usize, incoming: Option<Mat>, outgoing: Option<Mat>) -> GridModule {
        let mut out = self.clone();
        out.dims[k] = dim;
        if let Some(m) = incoming {
            out.maps[k - 1] = m;
        }
        if let Some(m) = outgoing {
            out.maps[k] = m;
        }
        out
    }
}

/// For each piece of `fine`, the piece of `coarse` containing it.
pub(crate) fn fine_to_coarse(coarse: &[Real], fine: &[Real]) -> Result<Vec<PieceIndex>> {
    if fine.windows(2).any(|w| w[0] >= w[1]) || coarse.iter().any(|c| fine.binary_search(c).is_err()) {
        return Err(Error::GridMismatch);
    }
    Ok((0..piece_count(fine))
        .map(|k| piece_of(coarse, piece_representative(fine, k)))
        .collect())
}

pub fn interval_module(field: FieldSpec, interval: &DecoratedInterval, criticals: &[Real]) -> Result<GridModule> {
    let (a, b) = interval.piece_range(criticals)?;
    let pieces = piece_count(criticals);
    let dims: Vec<usize> = (0..pieces).map(|k| (a <= k && k <= b) as usize).collect();
    let maps = (0..pieces - 1)
        .map(|k| {
            let m = Mat::zeros(field, dims[k + 1], dims[k]);
            if dims[k] == 1 && dims[k + 1] == 1 {
                Mat::identity(field, 1)
            } else {
                m
            }
        })
        .collect();
    GridModule::new(field, criticals.to_vec(), dims, maps)
}

/// Pointwise direct sum, on the union of the summands' grids.
pub fn direct_sum(field: FieldSpec, vs: &[GridModule]) -> Result<GridModule> {
    if let Some(v) = vs.iter().find(|v| v.field != field) {
        return Err(Error::FieldMismatch(field.characteristic(), v.field.characteristic()));
    }
    let grid = vs.iter().fold(Vec::new(), |g, v| union_grid(&g, &v.criticals));
    let refined: Vec<GridModule> = vs.iter().map(|v| v.refine_to(&grid)).collect::<Result<_>>()?;
    let pieces = piece_count(&grid);
    let dims = (0..pieces).map(|k| refined.iter().map(|v| v.dims[k]).sum()).collect();
    let maps = (0..pieces - 1)
        .map(|k| {
            let blocks: Vec<&Mat> = refined.iter().map(|v| &v.maps[k]).collect();
            Mat::block_diag(field, &blocks)
        })
        .collect();
    GridModule::new(field, grid, dims, maps)
}

/// A uniformly random module with the given number of critical values and
/// piece dimensions in `0..=max_dim`. Critical values are multiples of 1/2.
pub fn random_module(seed: u64, field: FieldSpec, n_criticals: usize, max_dim: usize) -> GridModule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_module_with(&mut rng, field, n_criticals, max_dim)
}

pub fn random_module_with<R: Rng + ?Sized>(rng: &mut R, field: FieldSpec, n_criticals: usize, max_dim: usize) -> GridModule {
    let criticals = random_grid(rng, n_criticals);
    let pieces = piece_count(&criticals);
    let dims: Vec<usize> = (0..pieces).map(|_| rng.gen_range(0..=max_dim)).collect();
    let maps = (0..pieces - 1)
        .map(|k| Mat::random(field, dims[k + 1], dims[k], rng))
        .collect();
    GridModule::new(field, criticals, dims, maps).expect("shapes agree by construction")
}

/// Strictly increasing critical values: a start in `{0, 1/2, …, 2}` followed by gaps in `{1/2, …, 2}`.
pub fn random_grid<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Real> {
    let mut at = rng.gen_range(0..=4i128);
    (0..n)
        .map(|i| {
            if i > 0 {
                at += rng.gen_range(1..=4i128);
            }
            Real::new(at, 2)
        })
        .collect()
}

/// A natural transformation between two modules on the same grid.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Morphism {
    source: GridModule,
    target: GridModule,
    comps: Vec<Mat>,
}

impl Morphism {
    /// Checks shapes and grids; naturality is checked separately by [`Morphism::is_natural`].
    pub fn new(source: GridModule, target: GridModule, comps: Vec<Mat>) -> Result<Morphism> {
        if source.criticals != target.criticals {
            return Err(Error::GridMismatch);
        }
        if source.field != target.field {
            return Err(Error::FieldMismatch(source.field.characteristic(), target.field.characteristic()));
        }
        if comps.len() != source.n_pieces() {
            return Err(Error::InvalidModule(format!(
                "morphism needs {} components, got {}",
                source.n_pieces(),
                comps.len()
            )));
        }
        for (k, c) in comps.iter().enumerate() {
            if c.rows() != target.dims[k] || c.cols() != source.dims[k] || c.field() != source.field {
                return Err(Error::InvalidModule(format!(
                    "component {k} is {}x{}, expected {}x{}",
                    c.rows(),
                    c.cols(),
                    target.dims[k],
                    source.dims[k]
                )));
            }
        }
        Ok(Morphism { source, target, comps })
    }

    /// Like [`Morphism::new`], additionally requiring naturality.
    pub fn new_natural(source: GridModule, target: GridModule, comps: Vec<Mat>) -> Result<Morphism> {
        let f = Morphism::new(source, target, comps)?;
        f.validate()?;
        Ok(f)
    }

    pub fn identity(v: &GridModule) -> Morphism {
        let comps = v.dims.iter().map(|&d| Mat::identity(v.field, d)).collect();
        Morphism {
            source: v.clone(),
            target: v.clone(),
            comps,
        }
    }

    pub fn zero(source: &GridModule, target: &GridModule) -> Result<Morphism> {
        let comps = (0..source.n_pieces())
            .map(|k| Mat::zeros(source.field, target.dims.get(k).copied().unwrap_or(0), source.dims[k]))
            .collect();
        Morphism::new(source.clone(), target.clone(), comps)
    }

    pub fn source(&self) -> &GridModule {
        &self.source
    }

    pub fn target(&self) -> &GridModule {
        &self.target
    }

    pub fn comps(&self) -> &[Mat] {
        &self.comps
    }

    pub fn comp(&self, k: PieceIndex) -> &Mat {
        &self.comps[k]
    }

    pub fn criticals(&self) -> &[Real] {
        &self.source.criticals
    }

    /// The first piece index at which naturality fails, if any.
    pub fn naturality_defect(&self) -> Option<PieceIndex> {
        (0..self.source.last_piece()).find(|&k| {
            &self.comps[k + 1] * &self.source.maps[k] != &self.target.maps[k] * &self.comps[k]
        })
    }

    pub fn is_natural(&self) -> bool {
        self.naturality_defect().is_none()
    }

    pub fn validate(&self) -> Result<()> {
        match self.naturality_defect() {
            None => Ok(()),
            Some(k) => Err(Error::NotNatural(format!("square between pieces {k} and {} does not commute", k + 1))),
        }
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &Morphism) -> Result<Morphism> {
        if self.target != g.source {
            return Err(Error::GridMismatch);
        }
        let comps = g.comps.iter().zip(&self.comps).map(|(b, a)| b * a).collect();
        Ok(Morphism {
            source: self.source.clone(),
            target: g.target.clone(),
            comps,
        })
    }

    pub fn is_iso(&self) -> bool {
        self.is_natural() && self.comps.iter().all(Mat::is_invertible)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Mat::is_zero)
    }

    pub fn refine_to(&self, grid: &[Real]) -> Result<Morphism> {
        let coarse = fine_to_coarse(self.criticals(), grid)?;
        let comps = coarse.iter().map(|&c| self.comps[c].clone()).collect();
        Ok(Morphism {
            source: self.source.refine_to(grid)?,
            target: self.target.refine_to(grid)?,
            comps,
        })
    }

    pub fn refine(&self, extra: &[Real]) -> Morphism {
        let grid = union_grid(self.criticals(), extra);
        self.refine_to(&grid).expect("union contains the original grid")
    }

    pub fn translated(&self, by: Real) -> Morphism {
        Morphism {
            source: self.source.translated(by),
            target: self.target.translated(by),
            comps: self.comps.clone(),
        }
    }

    /// Pointwise kernel together with its inclusion into the source.
    pub fn kernel_inclusion(&self) -> Morphism {
        let subs: Vec<Subspace> = self.comps.iter().map(Mat::kernel_basis).collect();
        let sub = submodule(&self.source, &subs);
        let comps = subs.iter().map(|s| s.basis().clone()).collect();
        Morphism {
            source: sub,
            target: self.source.clone(),
            comps,
        }
    }

    /// Pointwise image together with its inclusion into the target.
    pub fn image_inclusion(&self) -> Morphism {
        let subs: Vec<Subspace> = self.comps.iter().map(Mat::image_basis).collect();
        let sub = submodule(&self.target, &subs);
        let comps = subs.iter().map(|s| s.basis().clone()).collect();
        Morphism {
            source: sub,
            target: self.target.clone(),
            comps,
        }
    }

    /// Pointwise cokernel together with the quotient map from the target.
    /// Quotients are represented on the canonical complement of each image.
    pub fn cokernel_projection(&self) -> Morphism {
        let subs: Vec<Subspace> = self.comps.iter().map(Mat::image_basis).collect();
        let quotient = quotient_module(&self.target, &subs);
        let comps = subs
            .iter()
            .zip(&self.target.dims)
            .map(|(s, &d)| s.quotient_coords(&Mat::identity(self.target.field, d)))
            .collect();
        Morphism {
            source: self.target.clone(),
            target: quotient,
            comps,
        }
    }

    pub fn kernel(&self) -> GridModule {
        self.kernel_inclusion().source
    }

    pub fn image(&self) -> GridModule {
        self.image_inclusion().source
    }

    pub fn cokernel(&self) -> GridModule {
        self.cokernel_projection().target
    }
}

/// The submodule spanned by `subs[k]` at each piece; the subspaces must be
/// carried into each other by the structure maps.
pub(crate) fn submodule(v: &GridModule, subs: &[Subspace]) -> GridModule {
    let dims = subs.iter().map(Subspace::dim).collect();
    let maps = (0..v.last_piece())
        .map(|k| {
            let pushed = &v.maps[k] * subs[k].basis();
            subs[k + 1]
                .coordinates(&pushed)
                .expect("subspaces are stable under structure maps")
        })
        .collect();
    GridModule::new(v.field, v.criticals.clone(), dims, maps).expect("shapes agree by construction")
}

/// The quotient of `v` by stable subspaces `subs`.
pub(crate) fn quotient_module(v: &GridModule, subs: &[Subspace]) -> GridModule {
    let dims = subs
        .iter()
        .zip(&v.dims)
        .map(|(s, &d)| d - s.dim())
        .collect();
    let maps = (0..v.last_piece())
        .map(|k| subs[k + 1].quotient_coords(&(&v.maps[k] * &subs[k].complement())))
        .collect();
    GridModule::new(v.field, v.criticals.clone(), dims, maps).expect("shapes agree by construction")
}

pub fn morphism_compose(f: &Morphism, g: &Morphism) -> Result<Morphism> {
    f.then(g)
}

pub fn morphism_validate(f: &Morphism) -> bool {
    f.is_natural()
}

pub fn kernel(f: &Morphism) -> GridModule {
    f.kernel()
}

pub fn image(f: &Morphism) -> GridModule {
    f.image()
}

pub fn cokernel(f: &Morphism) -> GridModule {
    f.cokernel()
}

/// Column-major unknown layout for the solution space of a family of linear
/// matrix equations; used for Hom-space dimensions.
pub(crate) struct MatrixUnknowns {
    offsets: Vec<usize>,
    shapes: Vec<(usize, usize)>,
}

impl MatrixUnknowns {
    pub(crate) fn new(shapes: Vec<(usize, usize)>) -> MatrixUnknowns {
        let mut offsets = Vec::with_capacity(shapes.len());
        let mut at = 0;
        for &(r, c) in &shapes {
            offsets.push(at);
            at += r * c;
        }
        offsets.push(at);
        MatrixUnknowns { offsets, shapes }
    }

    pub(crate) fn count(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub(crate) fn index(&self, block: usize, i: usize, j: usize) -> usize {
        self.offsets[block] + i * self.shapes[block].1 + j
    }

    pub(crate) fn shape(&self, block: usize) -> (usize, usize) {
        self.shapes[block]
    }
}

/// Appends the equations `X_b · left - right · X_a = 0` for unknown blocks
/// `X_a` (shape r_a × c) and `X_b` (shape r × c_b), where `left: c_b × c`
/// and `right: r × r_a`.
pub(crate) fn push_commuting_square(
    rows: &mut Vec<Vec<u32>>,
    unknowns: &MatrixUnknowns,
    field: FieldSpec,
    block_a: usize,
    block_b: usize,
    left: &Mat,
    right: &Mat,
) {
    let (r, _) = unknowns.shape(block_b);
    let c = left.cols();
    for i in 0..r {
        for j in 0..c {
            let mut row = vec![0u32; unknowns.count()];
            for l in 0..left.rows() {
                let idx = unknowns.index(block_b, i, l);
                row[idx] = field.add(row[idx], left.get(l, j));
            }
            for l in 0..right.cols() {
                let idx = unknowns.index(block_a, l, j);
                row[idx] = field.sub(row[idx], right.get(i, l));
            }
            rows.push(row);
        }
    }
}

pub(crate) fn solution_dim(field: FieldSpec, unknowns: &MatrixUnknowns, rows: Vec<Vec<u32>>) -> usize {
    let n = unknowns.count();
    if rows.is_empty() {
        return n;
    }
    let m = rows.len();
    let system = Mat::from_residues(field, m, n, rows.into_iter().flatten().collect()).expect("residues");
    n - system.rank()
}

/// Dimension of the space of all morphisms `v → w`.
pub fn hom_space_dim(v: &GridModule, w: &GridModule) -> Result<usize> {
    if v.field != w.field {
        return Err(Error::FieldMismatch(v.field.characteristic(), w.field.characteristic()));
    }
    let grid = union_grid(&v.criticals, &w.criticals);
    let (v, w) = (v.refine_to(&grid)?, w.refine_to(&grid)?);
    let unknowns = MatrixUnknowns::new((0..v.n_pieces()).map(|k| (w.dims[k], v.dims[k])).collect());
    let mut rows = Vec::new();
    for k in 0..v.last_piece() {
        push_commuting_square(&mut rows, &unknowns, v.field, k, k + 1, &v.maps[k], &w.maps[k]);
    }
    Ok(solution_dim(v.field, &unknowns, rows))
}
