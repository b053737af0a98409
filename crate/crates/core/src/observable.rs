//! The observable category: modules up to ephemeral summands.
//!
//! An ob-morphism only specifies maps `V_s → W_t` for `s < t`. On a grid every
//! such pair factors through an open piece, so an ob-morphism is recorded by
//! one component per open piece. Adjacent open pieces are linked through the
//! singleton between them by *skip maps* (the composite of the two structure
//! maps around the singleton); compatibility with skip maps is the only
//! condition.

use crate::error::{Error, Result};
use crate::exactfield::{Mat, Subspace};
use crate::persmod::{
    fine_to_coarse, push_commuting_square, solution_dim, union_grid, DecoratedInterval, GridModule,
    MatrixUnknowns, Morphism, PieceIndex,
};
use crate::real::Real;

/// Composite of the two structure maps around singleton `{c_j}`, `j` in `1..=n`:
/// from open piece `j - 1` to open piece `j`.
pub fn skip_map(v: &GridModule, j: usize) -> Mat {
    let s = 2 * j - 1;
    v.map(s) * v.map(s - 1)
}

fn singletons(v: &GridModule) -> impl Iterator<Item = PieceIndex> {
    (1..v.n_pieces()).step_by(2)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ObMorphism {
    source: GridModule,
    target: GridModule,
    open_comps: Vec<Mat>,
}

impl ObMorphism {
    pub fn new(source: GridModule, target: GridModule, open_comps: Vec<Mat>) -> Result<ObMorphism> {
        if source.criticals() != target.criticals() {
            return Err(Error::GridMismatch);
        }
        if source.field() != target.field() {
            return Err(Error::FieldMismatch(
                source.field().characteristic(),
                target.field().characteristic(),
            ));
        }
        let n_open = source.criticals().len() + 1;
        if open_comps.len() != n_open {
            return Err(Error::InvalidModule(format!(
                "ob-morphism needs {n_open} open components, got {}",
                open_comps.len()
            )));
        }
        for (j, c) in open_comps.iter().enumerate() {
            if c.rows() != target.dim(2 * j) || c.cols() != source.dim(2 * j) {
                return Err(Error::InvalidModule(format!(
                    "open component {j} is {}x{}, expected {}x{}",
                    c.rows(),
                    c.cols(),
                    target.dim(2 * j),
                    source.dim(2 * j)
                )));
            }
        }
        Ok(ObMorphism {
            source,
            target,
            open_comps,
        })
    }

    pub fn new_compatible(source: GridModule, target: GridModule, open_comps: Vec<Mat>) -> Result<ObMorphism> {
        let f = ObMorphism::new(source, target, open_comps)?;
        f.validate()?;
        Ok(f)
    }

    pub fn identity(v: &GridModule) -> ObMorphism {
        let open_comps = (0..=v.criticals().len())
            .map(|j| Mat::identity(v.field(), v.dim(2 * j)))
            .collect();
        ObMorphism {
            source: v.clone(),
            target: v.clone(),
            open_comps,
        }
    }

    pub fn zero(source: &GridModule, target: &GridModule) -> Result<ObMorphism> {
        let open_comps = (0..=source.criticals().len())
            .map(|j| Mat::zeros(source.field(), target.dims().get(2 * j).copied().unwrap_or(0), source.dim(2 * j)))
            .collect();
        ObMorphism::new(source.clone(), target.clone(), open_comps)
    }

    pub fn source(&self) -> &GridModule {
        &self.source
    }

    pub fn target(&self) -> &GridModule {
        &self.target
    }

    pub fn open_comps(&self) -> &[Mat] {
        &self.open_comps
    }

    pub fn criticals(&self) -> &[Real] {
        self.source.criticals()
    }

    /// The first singleton index `j` (1-based) whose skip square fails to commute.
    pub fn compatibility_defect(&self) -> Option<usize> {
        (1..self.open_comps.len()).find(|&j| {
            &skip_map(&self.target, j) * &self.open_comps[j - 1] != &self.open_comps[j] * &skip_map(&self.source, j)
        })
    }

    pub fn is_compatible(&self) -> bool {
        self.compatibility_defect().is_none()
    }

    pub fn validate(&self) -> Result<()> {
        match self.compatibility_defect() {
            None => Ok(()),
            Some(j) => Err(Error::NotNatural(format!("skip square across critical value {j} does not commute"))),
        }
    }

    pub fn is_iso(&self) -> bool {
        self.is_compatible() && self.open_comps.iter().all(Mat::is_invertible)
    }

    pub fn is_zero(&self) -> bool {
        self.open_comps.iter().all(Mat::is_zero)
    }

    /// Splits open pieces at the new critical values; both halves keep the old component.
    pub fn refine_to(&self, grid: &[Real]) -> Result<ObMorphism> {
        let coarse = fine_to_coarse(self.criticals(), grid)?;
        let open_comps = coarse
            .iter()
            .step_by(2)
            .map(|&c| self.open_comps[c / 2].clone())
            .collect();
        Ok(ObMorphism {
            source: self.source.refine_to(grid)?,
            target: self.target.refine_to(grid)?,
            open_comps,
        })
    }

    /// `g ∘ self`, refining both onto a common grid first.
    pub fn then(&self, g: &ObMorphism) -> Result<ObMorphism> {
        let grid = union_grid(self.criticals(), g.criticals());
        let (f, g) = (self.refine_to(&grid)?, g.refine_to(&grid)?);
        if f.target != g.source {
            return Err(Error::GridMismatch);
        }
        let open_comps = g.open_comps.iter().zip(&f.open_comps).map(|(b, a)| b * a).collect();
        Ok(ObMorphism {
            source: f.source,
            target: g.target,
            open_comps,
        })
    }

    /// Equality after refining both sides to a common grid.
    pub fn same_as(&self, other: &ObMorphism) -> bool {
        let grid = union_grid(self.criticals(), other.criticals());
        match (self.refine_to(&grid), other.refine_to(&grid)) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }
}

/// `g ∘ f`.
pub fn ob_compose(g: &ObMorphism, f: &ObMorphism) -> Result<ObMorphism> {
    f.then(g)
}

/// Forgets the components at singleton pieces.
pub fn project(f: &Morphism) -> Result<ObMorphism> {
    f.validate()?;
    let open_comps = f.comps().iter().step_by(2).cloned().collect();
    ObMorphism::new(f.source().clone(), f.target().clone(), open_comps)
}

/// Inverts an ob-morphism whose open components are all invertible.
pub fn ob_invert(f: &ObMorphism) -> Result<ObMorphism> {
    f.validate()?;
    let open_comps = f
        .open_comps
        .iter()
        .enumerate()
        .map(|(j, c)| c.inverse().map_err(|_| Error::NotObInvertible(j)))
        .collect::<Result<Vec<_>>>()?;
    ObMorphism::new(f.target.clone(), f.source.clone(), open_comps)
}

/// Replaces each singleton value by the value on the open piece to its left.
pub fn bar(v: &GridModule) -> GridModule {
    singletons(v).fold(v.clone(), |acc, s| {
        let d = v.dim(s - 1);
        let skip = v.map(s) * v.map(s - 1);
        acc.with_piece(s, d, Some(Mat::identity(v.field(), d)), Some(skip))
    })
}

/// Replaces each singleton value by the value on the open piece to its right.
pub fn underbar(v: &GridModule) -> GridModule {
    singletons(v).fold(v.clone(), |acc, s| {
        let d = v.dim(s + 1);
        let skip = v.map(s) * v.map(s - 1);
        acc.with_piece(s, d, Some(skip), Some(Mat::identity(v.field(), d)))
    })
}

/// The canonical weak isomorphism `bar(v) → v`.
pub fn nat_n(v: &GridModule) -> Morphism {
    let comps = (0..v.n_pieces())
        .map(|k| {
            if k % 2 == 1 {
                v.map(k - 1).clone()
            } else {
                Mat::identity(v.field(), v.dim(k))
            }
        })
        .collect();
    Morphism::new(bar(v), v.clone(), comps).expect("shapes agree by construction")
}

/// The canonical weak isomorphism `v → underbar(v)`.
pub fn nat_u(v: &GridModule) -> Morphism {
    let comps = (0..v.n_pieces())
        .map(|k| {
            if k % 2 == 1 {
                v.map(k).clone()
            } else {
                Mat::identity(v.field(), v.dim(k))
            }
        })
        .collect();
    Morphism::new(v.clone(), underbar(v), comps).expect("shapes agree by construction")
}

/// Applies `bar` to a morphism: the singleton component becomes the component
/// of the open piece on its left.
pub fn bar_morphism(f: &ObMorphism) -> Morphism {
    let comps = (0..f.source.n_pieces())
        .map(|k| f.open_comps[if k % 2 == 1 { (k - 1) / 2 } else { k / 2 }].clone())
        .collect();
    Morphism::new(bar(&f.source), bar(&f.target), comps).expect("shapes agree by construction")
}

/// Applies `underbar` to a morphism.
pub fn underbar_morphism(f: &ObMorphism) -> Morphism {
    let comps = (0..f.source.n_pieces())
        .map(|k| f.open_comps[if k % 2 == 1 { k.div_ceil(2) } else { k / 2 }].clone())
        .collect();
    Morphism::new(underbar(&f.source), underbar(&f.target), comps).expect("shapes agree by construction")
}

/// The radical together with its inclusion into `v`.
///
/// On open pieces the radical is all of `v`; at a singleton it is the image
/// of the incoming structure map.
pub fn radical_inclusion(v: &GridModule) -> Morphism {
    let mut rad = v.clone();
    let mut comps: Vec<Mat> = v.dims().iter().map(|&d| Mat::identity(v.field(), d)).collect();
    for s in singletons(v) {
        let im: Subspace = v.map(s - 1).image_basis();
        let incoming = im.coordinates(v.map(s - 1)).expect("map lands in its image");
        let outgoing = v.map(s) * im.basis();
        rad = rad.with_piece(s, im.dim(), Some(incoming), Some(outgoing));
        comps[s] = im.basis().clone();
    }
    Morphism::new(rad, v.clone(), comps).expect("shapes agree by construction")
}

pub fn radical(v: &GridModule) -> GridModule {
    radical_inclusion(v).source().clone()
}

/// Kernel and cokernel both ephemeral.
pub fn is_weak_iso(f: &Morphism) -> Result<bool> {
    f.validate()?;
    Ok(f.kernel().is_ephemeral() && f.cokernel().is_ephemeral())
}

/// Dimension of the space of ob-morphisms `v ⇢ w`, computed by solving the
/// skip-map compatibility equations.
pub fn ob_hom_space_dim(v: &GridModule, w: &GridModule) -> Result<usize> {
    if v.field() != w.field() {
        return Err(Error::FieldMismatch(v.field().characteristic(), w.field().characteristic()));
    }
    let grid = union_grid(v.criticals(), w.criticals());
    let (v, w) = (v.refine_to(&grid)?, w.refine_to(&grid)?);
    let n_open = grid.len() + 1;
    let unknowns = MatrixUnknowns::new((0..n_open).map(|j| (w.dim(2 * j), v.dim(2 * j))).collect());
    let mut rows = Vec::new();
    for j in 1..n_open {
        push_commuting_square(&mut rows, &unknowns, v.field(), j - 1, j, &skip_map(&v, j), &skip_map(&w, j));
    }
    Ok(solution_dim(v.field(), &unknowns, rows))
}

/// Dimension of ob-morphisms between two interval modules: 1 exactly when
/// `inf J ≤ inf I < sup J ≤ sup I`, comparing undecorated endpoints.
pub fn ob_hom_dim(i: &DecoratedInterval, j: &DecoratedInterval) -> Result<usize> {
    if let Some(s) = [i, j].into_iter().find(|x| x.is_singleton()) {
        return Err(Error::InvalidInterval(format!("{s} is a singleton")));
    }
    Ok((j.inf() <= i.inf() && i.inf() < j.sup() && j.sup() <= i.sup()) as usize)
}

/// The four limiting ranks at `s < t`, plus the plain rank of `V_s → V_t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LimitingRanks {
    /// `rk_[st]`: from the left limit at `s` to the right limit at `t`.
    pub closed_closed: usize,
    /// `rk_[st)`
    pub closed_open: usize,
    /// `rk_(st]`
    pub open_closed: usize,
    /// `rk_(st)`
    pub open_open: usize,
    pub strict: usize,
}

impl LimitingRanks {
    pub fn chain_holds(&self) -> bool {
        let middle = [self.strict, self.closed_open, self.open_closed];
        middle.iter().all(|&m| self.closed_closed <= m && m <= self.open_open)
    }
}

pub fn limiting_ranks(v: &GridModule, s: Real, t: Real) -> Result<LimitingRanks> {
    if s >= t {
        return Err(Error::EmptyRange(s.to_string(), t.to_string()));
    }
    let v = v.refine(&[s, t]);
    let (ps, pt) = (v.piece_of(s), v.piece_of(t));
    let rk = |a, b| v.structure_rank(a, b);
    Ok(LimitingRanks {
        closed_closed: rk(ps - 1, pt + 1)?,
        closed_open: rk(ps - 1, pt - 1)?,
        open_closed: rk(ps + 1, pt + 1)?,
        open_open: rk(ps + 1, pt - 1)?,
        strict: rk(ps, pt)?,
    })
}

/// Every grid module is q-tame: all its spaces are finite-dimensional.
pub fn is_qtame(_v: &GridModule) -> bool {
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactfield::FieldSpec;
    use crate::persmod::{interval_module, random_module};

    fn f2() -> FieldSpec {
        FieldSpec::gf2()
    }

    fn grid(xs: &[i64]) -> Vec<Real> {
        xs.iter().map(|&x| Real::from(x)).collect()
    }

    fn k(iv: DecoratedInterval, g: &[Real]) -> GridModule {
        interval_module(f2(), &iv, g).unwrap()
    }

    fn decorations(p: i64, q: i64) -> [DecoratedInterval; 4] {
        [
            DecoratedInterval::closed(p, q),
            DecoratedInterval::closed_open(p, q),
            DecoratedInterval::open_closed(p, q),
            DecoratedInterval::open(p, q),
        ]
    }

    #[test]
    fn bar_and_underbar_of_intervals() {
        let g = grid(&[1, 2]);
        for iv in decorations(1, 2) {
            assert_eq!(bar(&k(iv, &g)), k(DecoratedInterval::open_closed(1, 2), &g), "{iv}");
            assert_eq!(underbar(&k(iv, &g)), k(DecoratedInterval::closed_open(1, 2), &g), "{iv}");
        }
        let z = GridModule::zero(f2(), g);
        assert_eq!(bar(&z), z);
        assert_eq!(underbar(&z), z);
    }

    #[test]
    fn bar_is_idempotent() {
        for seed in 0..50 {
            let v = random_module(seed, f2(), 3, 3);
            assert_eq!(bar(&bar(&v)), bar(&v));
            assert_eq!(underbar(&underbar(&v)), underbar(&v));
        }
    }

    #[test]
    fn nat_n_examples() {
        let g = grid(&[1, 2]);
        let v = k(DecoratedInterval::open(1, 2), &g);
        let n = nat_n(&v);
        assert!(n.is_natural());
        assert_eq!(n.source(), &k(DecoratedInterval::open_closed(1, 2), &g));
        assert_eq!(n.comp(2), &Mat::identity(f2(), 1));
        assert!(is_weak_iso(&n).unwrap());

        let w = k(DecoratedInterval::open_closed(0, 1), &grid(&[0, 1]));
        let n = nat_n(&w);
        assert_eq!(n.source(), &w);
        assert!(n.comps().iter().all(Mat::is_invertible));

        let z = GridModule::zero(f2(), g);
        assert!(nat_n(&z).is_zero() && nat_u(&z).is_zero());
    }

    #[test]
    fn canonical_maps_are_weak_isos() {
        for seed in 0..100 {
            let v = random_module(seed, FieldSpec::new(3).unwrap(), 4, 3);
            for f in [nat_n(&v), nat_u(&v), radical_inclusion(&v)] {
                assert!(f.is_natural());
                assert!(is_weak_iso(&f).unwrap());
                assert!(project(&f).unwrap().is_iso());
            }
        }
    }

    #[test]
    fn radical_examples() {
        let g = grid(&[1, 2]);
        assert_eq!(
            radical(&k(DecoratedInterval::closed(1, 2), &g)),
            k(DecoratedInterval::open_closed(1, 2), &g)
        );
        let z = GridModule::zero(f2(), g.clone());
        assert_eq!(radical(&z), z);
        for seed in 0..50 {
            let v = random_module(seed, f2(), 3, 3);
            assert_eq!(radical(&radical(&v)), radical(&v));
        }
    }

    #[test]
    fn zero_morphism_is_not_weak_iso() {
        let v = k(DecoratedInterval::closed(1, 2), &grid(&[1, 2]));
        assert!(is_weak_iso(&Morphism::identity(&v)).unwrap());
        assert!(!is_weak_iso(&Morphism::zero(&v, &v).unwrap()).unwrap());
    }

    #[test]
    fn project_examples() {
        let v = random_module(9, f2(), 3, 2);
        assert_eq!(project(&Morphism::identity(&v)).unwrap(), ObMorphism::identity(&v));
        assert!(project(&Morphism::zero(&v, &v).unwrap()).unwrap().is_zero());
        // nat_n followed by nat_u: bar(v) ⇢ underbar(v), the identity on open pieces
        let g = grid(&[1, 2]);
        let v = k(DecoratedInterval::closed(1, 2), &g);
        let f = nat_n(&v).then(&nat_u(&v)).unwrap();
        let ob = project(&f).unwrap();
        assert_eq!(ob.source(), &k(DecoratedInterval::open_closed(1, 2), &g));
        assert_eq!(ob.target(), &k(DecoratedInterval::closed_open(1, 2), &g));
        assert_eq!(ob.open_comps()[1], Mat::identity(f2(), 1));
        assert!(ob.is_iso());
    }

    #[test]
    fn projection_is_functorial() {
        for seed in 0..40 {
            let v = random_module(seed, f2(), 3, 2);
            let f = nat_n(&v);
            let g = nat_u(&v);
            let gf = f.then(&g).unwrap();
            assert_eq!(project(&gf).unwrap(), ob_compose(&project(&g).unwrap(), &project(&f).unwrap()).unwrap());
        }
    }

    #[test]
    fn ob_compose_examples() {
        let g = grid(&[1, 2]);
        let ivs = decorations(1, 2);
        let kk: Vec<GridModule> = ivs.iter().map(|&iv| k(iv, &g)).collect();
        let canon = |a: &GridModule, b: &GridModule| {
            ObMorphism::new_compatible(
                a.clone(),
                b.clone(),
                (0..3).map(|j| Mat::from_fn(f2(), b.dim(2 * j), a.dim(2 * j), |_, _| 1)).collect(),
            )
            .unwrap()
        };
        // [1,2] ⇢ (1,2) ⇢ [1,2)
        let f = canon(&kk[0], &kk[3]);
        let h = canon(&kk[3], &kk[1]);
        assert_eq!(ob_compose(&h, &f).unwrap(), canon(&kk[0], &kk[1]));
        assert_eq!(ob_compose(&ObMorphism::identity(&kk[3]), &f).unwrap(), f);
        let zero = ObMorphism::zero(&kk[0], &kk[0]).unwrap();
        assert!(ob_compose(&f, &zero).unwrap().is_zero());
    }

    #[test]
    fn ob_compose_refines_mismatched_grids() {
        let a = k(DecoratedInterval::open(0, 3), &grid(&[0, 3]));
        let id_fine = ObMorphism::identity(&a).refine_to(&grid(&[0, 1, 3])).unwrap();
        let composed = ob_compose(&id_fine, &ObMorphism::identity(&a)).unwrap();
        assert!(composed.same_as(&ObMorphism::identity(&a)));
    }

    #[test]
    fn ob_invert_examples() {
        let g = grid(&[0, 1]);
        let v = k(DecoratedInterval::closed(0, 1), &g);
        let id = ObMorphism::identity(&v);
        assert_eq!(ob_invert(&id).unwrap(), id);

        let open = k(DecoratedInterval::open(0, 1), &g);
        let f = ObMorphism::new_compatible(v.clone(), open.clone(), vec![
            Mat::zeros(f2(), 0, 0),
            Mat::identity(f2(), 1),
            Mat::zeros(f2(), 0, 0),
        ])
        .unwrap();
        let inv = ob_invert(&f).unwrap();
        assert_eq!(inv.source(), &open);
        assert_eq!(inv.open_comps()[1], Mat::identity(f2(), 1));

        let n = project(&nat_n(&v)).unwrap();
        let back = ob_invert(&n).unwrap();
        assert_eq!(ob_compose(&n, &back).unwrap(), ObMorphism::identity(&v));
        assert_eq!(ob_compose(&back, &n).unwrap(), ObMorphism::identity(n.source()));

        let zero = ObMorphism::zero(&v, &v).unwrap();
        assert_eq!(ob_invert(&zero), Err(Error::NotObInvertible(1)));
    }

    #[test]
    fn ob_hom_dim_examples() {
        let iv = |a, b| DecoratedInterval::open(a, b);
        assert_eq!(ob_hom_dim(&iv(0, 1), &iv(0, 1)).unwrap(), 1);
        assert_eq!(ob_hom_dim(&iv(0, 1), &iv(2, 3)).unwrap(), 0);
        assert_eq!(ob_hom_dim(&iv(0, 2), &iv(1, 3)).unwrap(), 0);
        assert_eq!(ob_hom_dim(&iv(1, 3), &iv(0, 2)).unwrap(), 1);
        assert!(ob_hom_dim(&DecoratedInterval::singleton(1), &iv(0, 2)).is_err());

        let g = grid(&[0, 1, 2, 3]);
        for (i, j) in [((0, 1), (0, 1)), ((0, 1), (2, 3)), ((0, 2), (1, 3)), ((1, 3), (0, 2))] {
            let (i, j) = (iv(i.0, i.1), iv(j.0, j.1));
            assert_eq!(ob_hom_space_dim(&k(i, &g), &k(j, &g)).unwrap(), ob_hom_dim(&i, &j).unwrap());
        }
    }

    #[test]
    fn limiting_rank_examples() {
        let g = grid(&[1, 2]);
        let v = k(DecoratedInterval::closed(1, 2), &g);
        let r = limiting_ranks(&v, Real::from(1), Real::from(2)).unwrap();
        assert_eq!(
            (r.closed_closed, r.closed_open, r.open_closed, r.open_open, r.strict),
            (0, 0, 0, 1, 1)
        );
        assert!(r.chain_holds());

        let z = GridModule::zero(f2(), g.clone());
        let r = limiting_ranks(&z, Real::from(0), Real::from(5)).unwrap();
        assert_eq!(r, LimitingRanks { closed_closed: 0, closed_open: 0, open_closed: 0, open_open: 0, strict: 0 });
        assert!(limiting_ranks(&v, Real::from(2), Real::from(1)).is_err());
    }

    #[test]
    fn limiting_ranks_in_one_open_piece() {
        let v = GridModule::constant(f2(), grid(&[0, 10]), 3);
        let r = limiting_ranks(&v, Real::from(2), Real::from(3)).unwrap();
        assert_eq!([r.closed_closed, r.closed_open, r.open_closed, r.open_open, r.strict], [3; 5]);
    }

    #[test]
    fn qtame_is_vacuous() {
        let v = random_module(3, f2(), 3, 3);
        assert!(is_qtame(&v));
        assert_eq!(is_qtame(&radical(&v)), is_qtame(&v));
        assert!(is_qtame(&GridModule::zero(f2(), vec![])));
    }

    #[test]
    fn bar_is_functorial_on_ob_morphisms() {
        for seed in 0..30 {
            let v = random_module(seed, f2(), 3, 2);
            let f = project(&nat_u(&v)).unwrap();
            let g = ob_invert(&f).unwrap();
            let gf = ob_compose(&g, &f).unwrap();
            assert_eq!(bar_morphism(&gf), bar_morphism(&f).then(&bar_morphism(&g)).unwrap());
            assert_eq!(underbar_morphism(&gf), underbar_morphism(&f).then(&underbar_morphism(&g)).unwrap());
            assert!(bar_morphism(&f).is_natural() && underbar_morphism(&g).is_natural());
        }
    }
}
