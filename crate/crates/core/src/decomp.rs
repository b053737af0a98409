//! Interval decomposition of grid modules.
//!
//! [`barcode_formula`] reads the barcode off ranks of composite structure
//! maps by inclusion–exclusion. [`decompose`] builds an explicit isomorphism
//! from a direct sum of interval modules, sweeping left to right over the
//! pieces and keeping a basis of each piece made of images of bar generators.
//! When the images of those basis vectors become dependent, the youngest
//! bar involved is rewritten to map to zero and dies.

use std::collections::BTreeMap;
use std::fmt;

use crate::exactfield::{FieldSpec, Mat, Subspace};
use crate::persmod::{direct_sum, interval_module, DecoratedInterval, GridModule, Morphism, PieceIndex};

/// A multiset of intervals, canonically sorted.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Barcode {
    bars: Vec<(DecoratedInterval, usize)>,
}

impl Barcode {
    pub fn from_intervals<I: IntoIterator<Item = DecoratedInterval>>(intervals: I) -> Barcode {
        let mut counts: BTreeMap<DecoratedInterval, usize> = BTreeMap::new();
        for iv in intervals {
            *counts.entry(iv).or_default() += 1;
        }
        Barcode {
            bars: counts.into_iter().collect(),
        }
    }

    fn from_counts(counts: BTreeMap<DecoratedInterval, usize>) -> Barcode {
        Barcode {
            bars: counts.into_iter().filter(|&(_, m)| m > 0).collect(),
        }
    }

    pub fn bars(&self) -> &[(DecoratedInterval, usize)] {
        &self.bars
    }

    pub fn is_empty(&self) -> bool {
        self.bars.is_empty()
    }

    pub fn multiplicity(&self, iv: &DecoratedInterval) -> usize {
        self.bars.iter().find(|(b, _)| b == iv).map_or(0, |&(_, m)| m)
    }

    /// Total number of bars, counted with multiplicity.
    pub fn total(&self) -> usize {
        self.bars.iter().map(|&(_, m)| m).sum()
    }

    /// Each interval repeated according to its multiplicity.
    pub fn expanded(&self) -> Vec<DecoratedInterval> {
        self.bars
            .iter()
            .flat_map(|&(iv, m)| std::iter::repeat_n(iv, m))
            .collect()
    }

    /// Replaces every interval by its interior and drops singletons.
    pub fn interiors(&self) -> Barcode {
        Barcode::from_intervals(self.expanded().into_iter().filter_map(|iv| iv.interior()))
    }
}

impl fmt::Display for Barcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (iv, m) in &self.bars {
            writeln!(f, "{iv} x {m}")?;
        }
        Ok(())
    }
}

/// `ranks[a][b - a]` is the rank of the composite from piece `a` to piece `b`.
fn rank_table(v: &GridModule) -> Vec<Vec<usize>> {
    (0..v.n_pieces())
        .map(|a| {
            let mut acc = Mat::identity(v.field(), v.dim(a));
            let mut row = vec![acc.rank()];
            for k in a..v.last_piece() {
                acc = v.map(k) * &acc;
                row.push(acc.rank());
            }
            row
        })
        .collect()
}

/// Barcode by inclusion–exclusion over composite ranks; pieces outside the
/// grid contribute rank zero.
pub fn barcode_formula(v: &GridModule) -> Barcode {
    let ranks = rank_table(v);
    let last = v.last_piece() as isize;
    let rk = |a: isize, b: isize| -> i64 {
        if a < 0 || b > last {
            0
        } else {
            ranks[a as usize][(b - a) as usize] as i64
        }
    };
    let mut counts = BTreeMap::new();
    for a in 0..=last {
        for b in a..=last {
            let m = rk(a, b) - rk(a - 1, b) - rk(a, b + 1) + rk(a - 1, b + 1);
            debug_assert!(m >= 0, "negative multiplicity {m} on pieces {a}..={b}");
            if m > 0 {
                let iv = DecoratedInterval::from_piece_range(v.criticals(), a as usize, b as usize);
                counts.insert(iv, m as usize);
            }
        }
    }
    Barcode::from_counts(counts)
}

/// An interval decomposition: `iso` maps the direct sum of the interval
/// modules of `summands` (in that order) isomorphically onto the module.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub barcode: Barcode,
    pub summands: Vec<DecoratedInterval>,
    pub iso: Morphism,
}

impl Decomposition {
    /// Positions (in `summands`) of the summands alive at piece `k` of the iso's grid,
    /// in the order used by the direct sum's basis at that piece.
    pub fn alive_at(&self, k: PieceIndex) -> Vec<usize> {
        let grid = self.iso.criticals();
        self.summands
            .iter()
            .enumerate()
            .filter(|(_, iv)| {
                let (a, b) = iv.piece_range(grid).expect("summand endpoints lie on the grid");
                a <= k && k <= b
            })
            .map(|(i, _)| i)
            .collect()
    }
}

struct Bar {
    birth: PieceIndex,
    death: Option<PieceIndex>,
    /// Column vectors at pieces `birth..` (one per piece while alive).
    traj: Vec<Mat>,
}

impl Bar {
    fn at(&self, k: PieceIndex) -> &Mat {
        &self.traj[k - self.birth]
    }
}

/// Incremental echelon form over a list of vectors, remembering each
/// reduced row as a combination of the inserted vectors.
struct Reducer {
    field: FieldSpec,
    rows: Vec<(Vec<u32>, usize, Vec<u32>)>,
    inserted: usize,
}

impl Reducer {
    fn new(field: FieldSpec) -> Reducer {
        Reducer {
            field,
            rows: Vec::new(),
            inserted: 0,
        }
    }

    /// Either inserts `y` (returning `None`) or returns `c` with `y = Σ c_j y_j`
    /// over the previously inserted vectors.
    fn insert(&mut self, y: &Mat) -> Option<Vec<u32>> {
        let f = self.field;
        let mut vec: Vec<u32> = (0..y.rows()).map(|i| y.get(i, 0)).collect();
        let mut combo = vec![0u32; self.inserted + 1];
        combo[self.inserted] = 1;
        for (row, pivot, row_combo) in &self.rows {
            let x = vec[*pivot];
            if x == 0 {
                continue;
            }
            let factor = f.mul(x, f.inv(row[*pivot]));
            for (v, &r) in vec.iter_mut().zip(row) {
                *v = f.sub(*v, f.mul(factor, r));
            }
            for (c, &r) in combo.iter_mut().zip(row_combo) {
                *c = f.sub(*c, f.mul(factor, r));
            }
        }
        match vec.iter().position(|&x| x != 0) {
            Some(pivot) => {
                self.rows.push((vec, pivot, combo));
                self.inserted += 1;
                None
            }
            // 0 = y - Σ c_j y_j
            None => Some(combo[..self.inserted].iter().map(|&c| f.neg(c)).collect()),
        }
    }
}

pub fn decompose(v: &GridModule) -> Decomposition {
    let field = v.field();
    let last = v.last_piece();
    let mut bars: Vec<Bar> = Vec::new();
    let mut alive: Vec<usize> = Vec::new();

    let spawn = |bars: &mut Vec<Bar>, alive: &mut Vec<usize>, k: PieceIndex, span: &Subspace| {
        let fresh = span.complement();
        for c in 0..fresh.cols() {
            alive.push(bars.len());
            bars.push(Bar {
                birth: k,
                death: None,
                traj: vec![fresh.column(c)],
            });
        }
    };
    spawn(&mut bars, &mut alive, 0, &Subspace::zero(field, v.dim(0)));

    for k in 0..last {
        let mut reducer = Reducer::new(field);
        let mut kept: Vec<usize> = Vec::new();
        let mut images: Vec<Mat> = Vec::new();
        // `alive` is ordered oldest first
        for &i in &alive {
            let y = v.map(k) * bars[i].at(k);
            match reducer.insert(&y) {
                None => {
                    kept.push(i);
                    images.push(y);
                }
                Some(coeffs) => {
                    let birth = bars[i].birth;
                    for l in birth..=k {
                        let mut g = bars[i].at(l).clone();
                        for (&j, &c) in kept.iter().zip(&coeffs) {
                            if c != 0 {
                                g = g.sub(&bars[j].at(l).scale(c)).expect("same shape");
                            }
                        }
                        bars[i].traj[l - birth] = g;
                    }
                    bars[i].death = Some(k);
                }
            }
        }
        for (&i, y) in kept.iter().zip(images) {
            bars[i].traj.push(y);
        }
        alive = kept;
        let span = if alive.is_empty() {
            Subspace::zero(field, v.dim(k + 1))
        } else {
            let cols: Vec<&Mat> = alive.iter().map(|&i| bars[i].at(k + 1)).collect();
            Subspace::span(&hstack_all(field, v.dim(k + 1), &cols))
        };
        spawn(&mut bars, &mut alive, k + 1, &span);
    }
    for &i in &alive {
        bars[i].death = Some(last);
    }

    let mut order: Vec<usize> = (0..bars.len()).collect();
    let interval_of = |b: &Bar| DecoratedInterval::from_piece_range(v.criticals(), b.birth, b.death.unwrap());
    order.sort_by_key(|&i| (interval_of(&bars[i]), i));
    let summands: Vec<DecoratedInterval> = order.iter().map(|&i| interval_of(&bars[i])).collect();

    let modules: Vec<GridModule> = summands
        .iter()
        .map(|iv| interval_module(field, iv, v.criticals()).expect("endpoints on grid"))
        .collect();
    let source = if modules.is_empty() {
        GridModule::zero(field, v.criticals().to_vec())
    } else {
        direct_sum(field, &modules).expect("same field and grid")
    };
    let comps = (0..=last)
        .map(|k| {
            let cols: Vec<&Mat> = order
                .iter()
                .map(|&i| &bars[i])
                .filter(|b| b.birth <= k && k <= b.death.unwrap())
                .map(|b| b.at(k))
                .collect();
            hstack_all(field, v.dim(k), &cols)
        })
        .collect();
    let iso = Morphism::new(source, v.clone(), comps).expect("shapes agree by construction");
    Decomposition {
        barcode: Barcode::from_intervals(summands.iter().copied()),
        summands,
        iso,
    }
}

fn hstack_all(field: FieldSpec, rows: usize, cols: &[&Mat]) -> Mat {
    let mut m = Mat::zeros(field, rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for i in 0..rows {
            m.set(i, j, c.get(i, 0));
        }
    }
    m
}

/// The barcode up to ob-isomorphism: interiors of the non-singleton bars.
pub fn ob_barcode(v: &GridModule) -> Barcode {
    barcode_formula(v).interiors()
}
