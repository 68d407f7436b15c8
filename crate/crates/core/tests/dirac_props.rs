mod common;

use common::*;
use poired::dirac::{check_omega_b, check_pushpull, graph_of_bivector, kernel_and_form, omega_b, pullback, pulled_back_structure, stretch};
use poired::fixtures::{fixture, FIXTURES};
use poired::reduce::{Complement, ReductionProblem};
use poired::sublinalg::{span_eq, Base, FrameKind, FramedSubbundle, Row};
use proptest::prelude::*;

const CHART4: &[&str] = &["a", "b", "c", "w"];

proptest! {
    #![proptest_config(cases(100))]

    /// Graph, stretch and pullback give isotropic frames of full rank.
    #[test]
    fn constructions_are_lagrangian(
        pi in prop::collection::vec(poly(3, 1, 2), 6),
        b in prop::collection::vec(prop::collection::vec(poly(3, 1, 2), 4), 0..=2),
    ) {
        let c = chart(CHART4);
        let pi = bivector(&c, &pi);
        let g = graph_of_bivector(&pi);
        prop_assert!(g.is_lagrangian());
        let on_n = g.restrict(&[3]).unwrap();
        prop_assert!(on_n.is_lagrangian());
        let rows: Vec<Row> = b.iter().map(|r| r.iter().map(|e| over(&c, e)).collect()).collect();
        let b = FramedSubbundle::spanned_by(&c, FrameKind::Vector, Base::AlongN, &rows).unwrap();
        let s = stretch(&on_n, &b).unwrap();
        prop_assert!(s.is_lagrangian(), "{:?}", s.isotropy_failure());
        let p = pullback(&s, &[0, 1, 2]).unwrap();
        prop_assert!(p.is_lagrangian());
        prop_assert_eq!(p.rank(), 3);
        if b.is_zero() {
            prop_assert!(s.span_eq(&on_n));
        }
    }

    /// `omega^B` is nondegenerate exactly when the reduced bivector is invertible.
    #[test]
    fn omega_b_flag_matches_invertibility(num in -6i64..=6, den in 1i64..=5) {
        let scene = fixture("poissonex").unwrap().scene().with_param("lambda", &format!("{num}/{den}")).unwrap();
        let p = ReductionProblem::from_scene(&scene).unwrap();
        let (report, ob) = check_omega_b(&p).unwrap();
        prop_assert!(report.holds(), "{report:?}");
        prop_assert_eq!(ob.nondegenerate, num != 0);
        let r = p.reduced_bivector(Complement::Default).unwrap().bivector;
        prop_assert_eq!(r.is_zero(), num == 0);
    }
}

#[test]
fn pullback_kernel_is_f_on_fixtures() {
    let mut checked = 0;
    for f in FIXTURES {
        let Ok(p) = ReductionProblem::from_scene(&f.scene()) else { continue };
        if !p.check_well_defined().unwrap().holds() {
            continue;
        }
        let k = kernel_and_form(&pulled_back_structure(&p).unwrap()).unwrap();
        let n = p.n_chart();
        let kernel = FramedSubbundle::spanned_by(&n, FrameKind::Vector, Base::OnM, &k.kernel).unwrap();
        let f_rows: Vec<Row> = p.f().rows().iter().map(|r| p.n_positions().iter().map(|&i| r[i].clone()).collect()).collect();
        let fb = FramedSubbundle::spanned_by(&n, FrameKind::Vector, Base::OnM, &f_rows).unwrap();
        assert!(span_eq(&kernel, &fb), "{}", f.name);
        checked += 1;
    }
    assert!(checked >= 12, "{checked}");
}

#[test]
fn pushpull_holds_wherever_reduction_succeeds() {
    for f in FIXTURES {
        let Ok(p) = ReductionProblem::from_scene(&f.scene()) else { continue };
        if p.reduced_bivector(Complement::Default).is_err() {
            continue;
        }
        let r = check_pushpull(&p).unwrap();
        assert!(r.holds(), "{}: {r:?}", f.name);
    }
}

#[test]
fn omega_b_flag_on_symplectic_fixtures() {
    for f in FIXTURES {
        let Ok(p) = ReductionProblem::from_scene(&f.scene()) else { continue };
        if p.omega().is_none() || p.reduced_bivector(Complement::Default).is_err() {
            continue;
        }
        let (r, _) = check_omega_b(&p).unwrap();
        assert!(r.holds(), "{}: {r:?}", f.name);
        assert!(omega_b(&p).unwrap().d_omega.is_empty() || !omega_b(&p).unwrap().nondegenerate, "{}", f.name);
    }
}
