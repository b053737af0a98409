//! Persistence measures and undecorated diagrams.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::decomp::{decompose, Barcode};
use crate::error::{Error, Result};
use crate::exactfield::Mat;
use crate::observable::ObMorphism;
use crate::persmod::{union_grid, DecoratedInterval, GridModule, PieceIndex};
use crate::real::{ExtReal, Real};

/// A point of the extended open half-plane, `p < q`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DiagramPoint {
    pub p: ExtReal,
    pub q: ExtReal,
}

impl DiagramPoint {
    pub fn new(p: ExtReal, q: ExtReal) -> Result<DiagramPoint> {
        if p < q && p != ExtReal::PosInf && q != ExtReal::NegInf {
            Ok(DiagramPoint { p, q })
        } else {
            Err(Error::InvalidInterval(format!("diagram point needs p < q, got ({p}, {q})")))
        }
    }

    pub fn finite(p: impl Into<Real>, q: impl Into<Real>) -> DiagramPoint {
        DiagramPoint::new(ExtReal::Finite(p.into()), ExtReal::Finite(q.into())).expect("p < q")
    }

    /// The endpoints of an interval, forgetting decorations.
    pub fn of_interval(iv: &DecoratedInterval) -> DiagramPoint {
        DiagramPoint {
            p: iv.inf(),
            q: iv.sup(),
        }
    }
}

impl fmt::Display for DiagramPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}

/// A finite multiset of diagram points, canonically sorted.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Diagram {
    points: Vec<(DiagramPoint, usize)>,
}

impl Diagram {
    pub fn empty() -> Diagram {
        Diagram::default()
    }

    pub fn from_points<I: IntoIterator<Item = DiagramPoint>>(points: I) -> Diagram {
        Diagram::from_counts(points.into_iter().map(|x| (x, 1)))
    }

    pub fn from_counts<I: IntoIterator<Item = (DiagramPoint, usize)>>(counts: I) -> Diagram {
        let mut acc: BTreeMap<DiagramPoint, usize> = BTreeMap::new();
        for (x, m) in counts {
            *acc.entry(x).or_default() += m;
        }
        Diagram {
            points: acc.into_iter().filter(|&(_, m)| m > 0).collect(),
        }
    }

    /// Points of the non-singleton bars.
    pub fn from_barcode(b: &Barcode) -> Diagram {
        Diagram::from_counts(
            b.bars()
                .iter()
                .filter(|(iv, _)| !iv.is_singleton())
                .map(|&(iv, m)| (DiagramPoint::of_interval(&iv), m)),
        )
    }

    pub fn points(&self) -> &[(DiagramPoint, usize)] {
        &self.points
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn multiplicity(&self, x: &DiagramPoint) -> usize {
        self.points.iter().find(|(y, _)| y == x).map_or(0, |&(_, m)| m)
    }

    pub fn total(&self) -> usize {
        self.points.iter().map(|&(_, m)| m).sum()
    }

    /// Points repeated by multiplicity, in canonical order. Matchings index into this list.
    pub fn expanded(&self) -> Vec<DiagramPoint> {
        self.points
            .iter()
            .flat_map(|&(x, m)| std::iter::repeat_n(x, m))
            .collect()
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (x, m) in &self.points {
            writeln!(f, "{} {} {m}", x.p, x.q)?;
        }
        Ok(())
    }
}

impl FromStr for Diagram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Diagram> {
        let mut counts = Vec::new();
        for line in s.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(Error::ParseReal(line.to_string()));
            }
            let m: usize = toks[2].parse().map_err(|_| Error::ParseReal(toks[2].to_string()))?;
            counts.push((DiagramPoint::new(toks[0].parse()?, toks[1].parse()?)?, m));
        }
        Ok(Diagram::from_counts(counts))
    }
}

pub fn diagram_equals(d1: &Diagram, d2: &Diagram) -> bool {
    d1 == d2
}

/// A rectangle `[a, b] × [c, d]` with `a < b < c < d`; only `a` and `d` may be infinite.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Rectangle {
    pub a: ExtReal,
    pub b: Real,
    pub c: Real,
    pub d: ExtReal,
}

impl Rectangle {
    pub fn new(a: ExtReal, b: Real, c: Real, d: ExtReal) -> Result<Rectangle> {
        let (eb, ec) = (ExtReal::Finite(b), ExtReal::Finite(c));
        if a < eb && eb < ec && ec < d {
            Ok(Rectangle { a, b, c, d })
        } else {
            Err(Error::InvalidRectangle(format!("need a < b < c < d, got {a}, {b}, {c}, {d}")))
        }
    }

    pub fn finite(a: Real, b: Real, c: Real, d: Real) -> Result<Rectangle> {
        Rectangle::new(a.into(), b, c, d.into())
    }
}

impl fmt::Display for Rectangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}] x [{}, {}]", self.a, self.b, self.c, self.d)
    }
}

/// Rank of the composite between two (possibly infinite) parameters; zero at ±∞.
fn rk(v: &GridModule, from: Option<PieceIndex>, to: Option<PieceIndex>) -> usize {
    match (from, to) {
        (Some(a), Some(b)) => v.structure_rank(a, b).expect("pieces are ordered"),
        _ => 0,
    }
}

fn four_term(v: &GridModule, a: Option<PieceIndex>, b: PieceIndex, c: PieceIndex, d: Option<PieceIndex>) -> usize {
    let m = rk(v, Some(b), Some(c)) as i64 - rk(v, a, Some(c)) as i64 - rk(v, Some(b), d) as i64 + rk(v, a, d) as i64;
    debug_assert!(m >= 0);
    m as usize
}

pub fn measure(v: &GridModule, r: &Rectangle) -> Result<usize> {
    let piece = |t: Real| -> Result<PieceIndex> {
        if v.criticals().binary_search(&t).is_ok() {
            Err(Error::CornerOnCritical(t.to_string()))
        } else {
            Ok(v.piece_of(t))
        }
    };
    let opt = |t: ExtReal| -> Result<Option<PieceIndex>> {
        match t {
            ExtReal::Finite(x) => piece(x).map(Some),
            _ => Ok(None),
        }
    };
    Ok(four_term(v, opt(r.a)?, piece(r.b)?, piece(r.c)?, opt(r.d)?))
}

/// The undecorated diagram, read off the grid: each candidate point is
/// measured on the smallest rectangle around it at piece granularity.
pub fn diagram(v: &GridModule) -> Diagram {
    let n = v.criticals().len();
    let mut counts = Vec::new();
    // endpoint index 0 stands for -inf (left) or +inf (right), i + 1 for criticals[i]
    for i in 0..=n {
        for j in 0..=n {
            let (p, a, b) = if i == 0 {
                (ExtReal::NegInf, None, 0)
            } else {
                (ExtReal::Finite(v.criticals()[i - 1]), Some(2 * i - 2), 2 * i)
            };
            let (q, c, d) = if j == 0 {
                (ExtReal::PosInf, 2 * n, None)
            } else {
                (ExtReal::Finite(v.criticals()[j - 1]), 2 * j - 2, Some(2 * j))
            };
            if p >= q {
                continue;
            }
            let m = four_term(v, a, b, c, d);
            if m > 0 {
                counts.push((DiagramPoint { p, q }, m));
            }
        }
    }
    Diagram::from_counts(counts)
}

pub fn ob_isomorphic(v: &GridModule, w: &GridModule) -> Result<bool> {
    check_field(v, w)?;
    Ok(diagram(v) == diagram(w))
}

pub(crate) fn check_field(v: &GridModule, w: &GridModule) -> Result<()> {
    if v.field() != w.field() {
        return Err(Error::FieldMismatch(v.field().characteristic(), w.field().characteristic()));
    }
    Ok(())
}

/// An explicit ob-isomorphism between `v` and `w` refined to their common grid,
/// or `None` when the diagrams differ. Summands with equal interiors are paired
/// in canonical order and their generators mapped to each other.
pub fn ob_iso_witness(v: &GridModule, w: &GridModule) -> Result<Option<ObMorphism>> {
    if !ob_isomorphic(v, w)? {
        return Ok(None);
    }
    let grid = union_grid(v.criticals(), w.criticals());
    let (v, w) = (v.refine_to(&grid)?, w.refine_to(&grid)?);
    let (dv, dw) = (decompose(&v), decompose(&w));
    let mut partner: Vec<Option<usize>> = vec![None; dv.summands.len()];
    let mut pool: BTreeMap<DecoratedInterval, Vec<usize>> = BTreeMap::new();
    for (j, iv) in dw.summands.iter().enumerate().rev() {
        if let Some(int) = iv.interior() {
            pool.entry(int).or_default().push(j);
        }
    }
    for (i, iv) in dv.summands.iter().enumerate() {
        if let Some(int) = iv.interior() {
            partner[i] = pool.get_mut(&int).and_then(Vec::pop);
        }
    }
    let field = v.field();
    let comps = (0..=grid.len())
        .map(|j| {
            let k = 2 * j;
            let (av, aw) = (dv.alive_at(k), dw.alive_at(k));
            let mut m = Mat::zeros(field, aw.len(), av.len());
            for (col, &i) in av.iter().enumerate() {
                if let Some(row) = partner[i].and_then(|pj| aw.iter().position(|&x| x == pj)) {
                    m.set(row, col, 1);
                }
            }
            let inv = dv.iso.comp(k).inverse().expect("decomposition iso is invertible");
            dw.iso.comp(k) * &(&m * &inv)
        })
        .collect();
    ObMorphism::new_compatible(v, w, comps).map(Some)
}
