use obpers::decomp::{barcode_formula, decompose, ob_barcode};
use obpers::diagrams::{diagram, Diagram, DiagramPoint};
use obpers::distances::{bottleneck, build_interleaving, shift, verify_interleaving};
use obpers::persmod::{random_module, GridModule};
use obpers::{ExtReal, FieldSpec, Mat, Real};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn field(five: bool) -> FieldSpec {
    if five {
        FieldSpec::new(5).unwrap()
    } else {
        FieldSpec::gf2()
    }
}

fn point() -> impl Strategy<Value = DiagramPoint> {
    (0i64..12, 1i64..8, 0u8..10).prop_map(|(p, len, kind)| {
        let (p, q) = (Real::new(p as i128, 2), Real::new((p + len) as i128, 2));
        match kind {
            0 => DiagramPoint::new(ExtReal::NegInf, q.into()).unwrap(),
            1 => DiagramPoint::new(p.into(), ExtReal::PosInf).unwrap(),
            _ => DiagramPoint::finite(p, q),
        }
    })
}

fn diagram_strategy() -> impl Strategy<Value = Diagram> {
    proptest::collection::vec(point(), 0..5).prop_map(Diagram::from_points)
}

fn conjugated(v: &GridModule, seed: u64) -> GridModule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = v.field();
    let gs: Vec<Mat> = v.dims().iter().map(|&d| Mat::random_invertible(f, d, &mut rng)).collect();
    let maps = (0..v.last_piece())
        .map(|k| &(&gs[k + 1] * v.map(k)) * &gs[k].inverse().unwrap())
        .collect();
    GridModule::new(f, v.criticals().to_vec(), v.dims().to_vec(), maps).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn bottleneck_is_a_metric(a in diagram_strategy(), b in diagram_strategy(), c in diagram_strategy()) {
        let d = |x: &Diagram, y: &Diagram| bottleneck(x, y).0;
        prop_assert_eq!(d(&a, &a), ExtReal::from(0));
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        let (ab, bc, ac) = (d(&a, &b), d(&b, &c), d(&a, &c));
        if let (Some(x), Some(y)) = (ab.finite(), bc.finite()) {
            prop_assert!(ac <= ExtReal::Finite(x + y));
        }
    }

    #[test]
    fn witness_cost_is_the_value(a in diagram_strategy(), b in diagram_strategy()) {
        let (value, m) = bottleneck(&a, &b);
        prop_assert_eq!(value, m.cost);
        prop_assert_eq!(m.pairs.len() + m.unmatched1.len(), a.total());
        prop_assert_eq!(m.pairs.len() + m.unmatched2.len(), b.total());
    }

    #[test]
    fn barcode_is_a_strict_invariant(seed in 0u64..10_000, five: bool) {
        let v = random_module(seed, field(five), 4, 4);
        let w = conjugated(&v, seed);
        prop_assert_eq!(barcode_formula(&v), barcode_formula(&w));
        prop_assert_eq!(decompose(&w).barcode, barcode_formula(&v));
        prop_assert_eq!(ob_barcode(&v), ob_barcode(&w));
    }

    #[test]
    fn translation_interleaves(seed in 0u64..10_000, quarters in 1i128..8) {
        let v = random_module(seed, FieldSpec::gf2(), 4, 3);
        let eps = Real::new(quarters, 4);
        let w = shift(&v, eps);
        let (db, m) = bottleneck(&diagram(&v), &diagram(&w));
        prop_assert!(db <= ExtReal::Finite(eps));
        let il = build_interleaving(&v, &w, &m, eps + Real::new(1, 64)).unwrap();
        prop_assert!(verify_interleaving(&v, &w, &il).unwrap());
    }
}
