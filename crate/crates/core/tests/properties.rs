use num_traits::Zero;
use proptest::prelude::*;

use higgs5::arith::{int, q, LogForm, Poly, ProjPoint, RMat2, RatFunc, Rational};
use higgs5::bundles::{
    classify_stability, classify_table1, lines_through, Direction, Marked, MarkedSphere, ParabolicBundle, Stability,
    WeightVector,
};
use higgs5::connections::{
    connection_space, is_generic, pi_mu_limit, residue_sum, triple_point_family, EigenvalueVector, PiMuLimit,
};
use higgs5::elem::{elem_bundle, elem_higgs, weight_transform, ElemMask};
use higgs5::higgs::{higgs_det, higgs_space, higgs_stability, invariance_defect, invariant_lines, InvariantLines};
use higgs5::hitchin::{classify_fiber_point, discriminant_value, FiberClass};
use higgs5::sample::Sampler;

fn rat() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=9).prop_map(|(n, d)| q(n, d))
}

fn poly(max_len: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(rat(), 0..=max_len).prop_map(Poly::new)
}

fn nonzero_ratfunc() -> impl Strategy<Value = RatFunc> {
    (poly(4), poly(4)).prop_filter_map("zero", |(n, d)| {
        if n.is_zero() || d.is_zero() {
            None
        } else {
            RatFunc::new(n, d).ok()
        }
    })
}

fn sphere() -> MarkedSphere {
    MarkedSphere::new(int(2), int(3)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn residues_of_log_forms_sum_to_zero(
        poles in prop::collection::btree_set(-20i64..=20, 1..6),
        coeffs in prop::collection::vec(rat(), 6),
    ) {
        let poles: Vec<Rational> = poles.into_iter().map(int).collect();
        let num = Poly::new(coeffs[..poles.len()].to_vec());
        let f = RatFunc::new(num, Poly::from_roots(&poles)).unwrap();
        let mut allowed: Vec<ProjPoint> = poles.iter().cloned().map(ProjPoint::Finite).collect();
        allowed.push(ProjPoint::Infinity);
        let form = LogForm::new(f, &allowed).unwrap();
        let total: Rational = allowed.iter().map(|p| form.residue(p).unwrap()).sum();
        prop_assert!(total.is_zero());
    }

    #[test]
    fn reduction_is_idempotent(f in nonzero_ratfunc()) {
        let again = RatFunc::new(f.num().clone(), f.den().clone()).unwrap();
        prop_assert_eq!(again, f);
    }

    #[test]
    fn pole_orders_add(f in nonzero_ratfunc(), g in nonzero_ratfunc(), p in -5i64..=5) {
        let fg = &f * &g;
        for pt in [ProjPoint::Finite(int(p)), ProjPoint::Infinity] {
            prop_assert_eq!(fg.pole_order(&pt).unwrap(), f.pole_order(&pt).unwrap() + g.pole_order(&pt).unwrap());
        }
    }

    #[test]
    fn stable_bundles_have_two_dimensional_fields(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let b = s.stable_bundle(&sphere());
        prop_assert_eq!(higgs_space(&b).unwrap().len(), 2);
    }

    #[test]
    fn determinant_is_quadratic(seed in any::<u64>(), c in rat()) {
        let mut s = Sampler::new(seed);
        let b = s.stable_bundle(&sphere());
        let th = s.field_on(&b).unwrap();
        let d = higgs_det(&th).unwrap();
        let dc = higgs_det(&th.scale(&c)).unwrap();
        let c2 = &c * &c;
        prop_assert_eq!(dc.h1, &d.h1 * &c2);
        prop_assert_eq!(dc.h2, &d.h2 * &c2);
    }

    #[test]
    fn residues_are_nilpotent(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let b = s.stable_bundle(&sphere());
        let th = s.field_on(&b).unwrap();
        for m in Marked::ALL {
            let r = th.residue_matrix(m);
            prop_assert!(r.mul(&r).is_zero());
            prop_assert!(r.trace().is_zero());
        }
    }

    #[test]
    fn invariant_lines_are_invariant(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let sph = sphere();
        let line = s.pick(&higgs5::bundles::Line16::all());
        let (th, _) = s.ni_field(&sph, line).unwrap();
        match invariant_lines(&th).unwrap() {
            InvariantLines::One(l) => prop_assert!(invariance_defect(&th, &l.a, &l.b).is_zero()),
            other => prop_assert!(false, "expected one kernel line, got {:?}", other),
        }
    }

    #[test]
    fn elem_preserves_the_determinant(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let b = s.stable_bundle(&sphere());
        let th = s.field_on(&b).unwrap();
        let mask = s.pick(&ElemMask::all());
        prop_assert_eq!(higgs_det(&elem_higgs(&th, mask).unwrap()).unwrap(), higgs_det(&th).unwrap());
    }

    #[test]
    fn stability_is_elem_equivariant(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let sph = sphere();
        let b = if s.rng_index(2) == 0 { s.stable_bundle(&sph) } else {
            let line = s.pick(&higgs5::bundles::Line16::all());
            s.bundle_on_line(&sph, line)
        };
        let w: [Rational; 5] = std::array::from_fn(|_| q(1 + s.rng_index(7) as i64, 8));
        let mu = WeightVector::new(w).unwrap();
        let mask = s.pick(&ElemMask::all());
        let moved = elem_bundle(&b, mask).unwrap().bundle;
        prop_assert_eq!(
            classify_stability(&moved, &weight_transform(&mu, mask)).class,
            classify_stability(&b, &mu).class
        );
    }

    #[test]
    fn constant_frame_changes_preserve_bundle_invariants(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let sph = sphere();
        let b = match s.rng_index(3) {
            0 => s.generic_bundle(&sph),
            1 => {
                let line = s.pick(&higgs5::bundles::Line16::all()[..15]);
                s.bundle_on_line(&sph, line)
            }
            _ => higgs5::elem::table1_representative(&sph, s.pick(&higgs5::bundles::Table1Label::all()[..10]), &Poly::zero()),
        };
        let p = s.invertible();
        let dirs: [Direction; 5] = std::array::from_fn(|i| Direction::from_vec(&p.apply(b.dirs[i].coords())).unwrap());
        let moved = ParabolicBundle::new(sph, 0, dirs).unwrap();
        let mu = WeightVector::central();
        prop_assert_eq!(classify_stability(&moved, &mu).value, classify_stability(&b, &mu).value);
        prop_assert_eq!(lines_through(&moved), lines_through(&b));
        prop_assert_eq!(classify_table1(&moved), classify_table1(&b));
    }

    #[test]
    fn genericity_ignores_order_and_signs(
        nu in prop::array::uniform5((-30i64..=30, 1i64..=12)),
        perm in Just([0usize, 1, 2, 3, 4]).prop_shuffle(),
        signs in 0u8..32,
    ) {
        let v: [Rational; 5] = std::array::from_fn(|i| q(nu[i].0, nu[i].1));
        let w: [Rational; 5] = std::array::from_fn(|i| {
            let x = v[perm[i]].clone();
            if signs >> i & 1 == 1 { -x } else { x }
        });
        prop_assert_eq!(is_generic(&EigenvalueVector(v)), is_generic(&EigenvalueVector(w)));
    }

    #[test]
    fn connection_residues_sum_to_zero(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let sph = sphere();
        let nu = s.generic_eigenvalues();
        let b = s.stable_bundle(&sph);
        let (c, space) = connection_space(&b, &nu).unwrap();
        let th = s.field_on(&b).unwrap();
        let c2 = c.add_higgs(&th).unwrap();
        prop_assert_eq!(residue_sum(&c2).unwrap(), RMat2::zero());
        prop_assert_eq!(space.len(), 2);
        let mask = s.pick(&ElemMask::all());
        let moved = higgs5::connections::elem_connection(&c2, mask).unwrap();
        prop_assert_eq!(residue_sum(&moved).unwrap(), RMat2::zero());
    }

    #[test]
    fn limits_are_semistable(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let sph = sphere();
        let nu = s.generic_eigenvalues();
        let mu = WeightVector::central();
        let c = triple_point_family(&sph, &nu, &s.rational(), &s.rational()).unwrap();
        match pi_mu_limit(&c, &mu).unwrap() {
            PiMuLimit::Family { field, .. } => prop_assert_eq!(higgs_stability(&field, &mu).unwrap(), Stability::Stable),
            other => prop_assert!(false, "unexpected limit {:?}", other),
        }
    }

    #[test]
    fn nodal_iff_on_a_discriminant_line(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let sph = sphere();
        let b = s.stable_bundle(&sph);
        let th = s.field_on(&b).unwrap();
        let det = higgs_det(&th).unwrap();
        let class = classify_fiber_point(&th, &WeightVector::central()).unwrap();
        let on_line = !det.is_zero() && Marked::ALL.iter().any(|m| discriminant_value(&sph, &det, *m).is_zero());
        let nodal = matches!(class, FiberClass::NodalHol(_) | FiberClass::NodalApp(_) | FiberClass::NodalBoth(_));
        prop_assert_eq!(nodal, on_line);
    }
}
