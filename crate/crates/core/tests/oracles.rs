use num_traits::{One, Zero};

use higgs5::arith::{int, FMat2, RMat2, RatFunc, Rational};
use higgs5::bundles::{lines_through, Line16, Marked, MarkedSphere, ParabolicBundle, Table1Label};
use higgs5::elem::{elem_bundle, line_permutations, table1_permutations, ElemMask};
use higgs5::higgs::HiggsField;
use higgs5::hitchin::is_apparent;
use higgs5::sample::{both_fiber, nodal_fibers, Sampler};
use higgs5::verify::{locus_values, pencil_has_null_field, sample_on_locus};

fn sphere() -> MarkedSphere {
    MarkedSphere::new(int(2), int(3)).unwrap()
}

#[test]
fn label_matching_is_equivariant() {
    let sph = sphere();
    let t1 = table1_permutations(&sph).unwrap();
    let lines = line_permutations(&sph).unwrap();
    for ((m1, img1), (m2, img2)) in t1.iter().zip(&lines) {
        assert_eq!(m1, m2);
        let matched: Vec<Line16> = img1.iter().map(|l| l.matching_line()).collect();
        assert_eq!(&matched, img2, "mask {m1}");
    }
    assert_eq!(Table1Label::all()[0].matching_line(), Line16::all()[0]);
}

/// Lines through a bundle read off directly agree with the lines through
/// its transform, pulled back along the permutation action.
#[test]
fn direct_line_detection_matches_the_permutation_action() {
    let sph = sphere();
    let perms = line_permutations(&sph).unwrap();
    let mut s = Sampler::new(11);
    for round in 0..24 {
        let b = if round % 3 == 0 {
            s.stable_bundle(&sph)
        } else {
            let line = s.pick(&Line16::all());
            s.bundle_on_line(&sph, line)
        };
        let here = lines_through(&b).unwrap();
        for (mask, image) in &perms {
            let moved = elem_bundle(&b, *mask).unwrap().bundle;
            let there = lines_through(&moved).unwrap();
            let mut want: Vec<Line16> = here.iter().map(|l| image[l.index() - 1]).collect();
            want.sort_by_key(|l| l.index());
            assert_eq!(there, want, "bundle {b:?} under {mask}");
        }
    }
}

/// `f` composed with the chart change `x = 1/w`, as a function of `w`.
fn at_infinity(f: &RatFunc) -> RatFunc {
    let flip = |p: &higgs5::arith::Poly, n: usize| {
        let mut c = p.coeffs().to_vec();
        c.resize(n + 1, Rational::zero());
        c.reverse();
        higgs5::arith::Poly::new(c)
    };
    let n = f.num().coeffs().len().max(f.den().coeffs().len());
    RatFunc::new(flip(f.num(), n), flip(f.den(), n)).unwrap()
}

/// Apparent at `m` iff, in a constant frame whose first vector spans `l_m`,
/// the lower-left entry of the form vanishes to order 2 after removing the
/// pole: its residue part is zero and so is its constant term.
fn apparent_oracle(th: &HiggsField, m: Marked) -> bool {
    assert_eq!(th.base.d, 0);
    let l = th.base.dir(m).coords().clone();
    let other = if l[0].is_zero() { [Rational::one(), Rational::zero()] } else { [Rational::zero(), Rational::one()] };
    let p = RMat2::from_cols(l, other);
    let pinv = p.inverse().unwrap();
    let lift = |r: &RMat2| -> FMat2 { r.try_map(|v| Ok::<_, ()>(RatFunc::constant(v.clone()))).unwrap() };
    let adapted = lift(&pinv).mul(&th.matrix()).mul(&lift(&p));
    let entry = adapted.get(1, 0).clone();
    if entry.is_zero() {
        return true;
    }
    // Local parameter z and the form's coefficient in dz.
    let (f, z0) = match th.base.sphere.coord(m) {
        Some(p) => (entry, p),
        None => {
            // dx = -dw / w^2
            let w2 = RatFunc::from_poly(higgs5::arith::Poly::monomial(int(1), 2));
            (-(at_infinity(&entry).checked_div(&w2).unwrap()), Rational::zero())
        }
    };
    let order = f.pole_order(&higgs5::arith::ProjPoint::Finite(z0)).unwrap();
    // z f vanishing to order 2 at z0.
    order <= -1
}

#[test]
fn apparent_test_agrees_with_adapted_frame_oracle() {
    let sph = sphere();
    let mut s = Sampler::new(5);
    let mut counts = [0usize; 3];
    for m in Marked::ALL {
        let mut fibers = nodal_fibers(&mut s, &sph, m, 50).unwrap();
        fibers.extend(both_fiber(&mut s, &sph, m, 4000).unwrap());
        for f in fibers {
            for (k, (members, want)) in [(&f.hol, false), (&f.app, true), (&f.both, true)].into_iter().enumerate() {
                for th in members {
                    counts[k] += 1;
                    assert_eq!(apparent_oracle(th, m), want, "node {m}");
                    assert_eq!(is_apparent(th, m), want, "node {m}");
                }
            }
        }
    }
    assert!(counts.iter().all(|c| *c > 0), "{counts:?}");
}

/// On the normalized chart the pencil contains a nonzero field of
/// determinant zero iff the bundle lies on a special line.
#[test]
fn null_fields_iff_special_line() {
    let sph = sphere();
    let mut s = Sampler::new(9);
    let mut on = 0;
    let mut off = 0;
    for k in 0..6 {
        for _ in 0..15 {
            let (u, v) = if k < 5 { sample_on_locus(&mut s, &sph, k) } else { (s.rational(), s.rational()) };
            let b = ParabolicBundle::normalized(sph.clone(), u.clone(), v.clone());
            let Ok(lines) = lines_through(&b) else { continue };
            let null = pencil_has_null_field(&sph, &u, &v).unwrap();
            assert_eq!(null, !lines.is_empty(), "u = {u}, v = {v}");
            assert_eq!(null, locus_values(&sph, &u, &v).iter().any(Zero::is_zero));
            if null {
                on += 1;
            } else {
                off += 1;
            }
        }
    }
    assert!(on > 40 && off > 5, "{on} on, {off} off");
}

#[test]
fn elem_over_every_mask_is_defined_on_stable_bundles() {
    let sph = sphere();
    let mut s = Sampler::new(2);
    let b = s.stable_bundle(&sph);
    for mask in ElemMask::all() {
        let out = elem_bundle(&b, mask).unwrap();
        assert!(out.bundle.d == 0 || out.bundle.d == 1);
    }
}
