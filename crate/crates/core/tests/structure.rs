//! Structural checks on both worked bundles: residuals, kernel and
//! centralizer dimensions, fibre invariants, and agreement of the bundle
//! Wada shortcut with the generic three-generator computation.

use rigidity_core::alexander::{bundle_twisted_alexander, res_l_map, twisted_alexander, RingRep};
use rigidity_core::holonomy::{
    adjoint_family, holonomy_from_triple, kronecker_rep, solve_traces, LinearRepN, SolveOptions,
};
use rigidity_core::numeric::{cint, CMatrix, ScalarExt, Tolerances};
use rigidity_core::presentation::{bundle_presentation, MonodromySpec};
use rigidity_core::words::longitude;

const BUNDLES: [&str; 2] = ["LLRR", "RRL"];

fn centralizer(rep: &LinearRepN, tol: f64) -> usize {
    let l = rep.word_matrix(&longitude());
    (&l - &CMatrix::identity(rep.dim())).nullspace(tol).cols()
}

#[test]
fn residuals_within_bounds_for_every_solution() {
    let tol = Tolerances::default();
    for s in BUNDLES {
        let phi = MonodromySpec::parse(s).unwrap().endomorphism();
        let sols = solve_traces(&phi, &SolveOptions::default()).unwrap();
        assert!(!sols.is_empty());
        for t in sols {
            let markov = t.a * t.a + t.b * t.b + t.c * t.c - t.a * t.b * t.c;
            assert!(markov.abs_f64() <= 1e-10, "{s}: markov {:e}", markov.abs_f64());
            let h = holonomy_from_triple(&phi, &t, &tol).unwrap();
            assert!(h.rep4.lorentz_residual() <= 1e-9);
            assert!(h.rep4.relation_residual(&phi) <= 1e-7);
            let fam = adjoint_family(&h.rep4, &tol).unwrap();
            let gl = kronecker_rep(&h.rep4);
            for rep in [&fam.sl4, &fam.pso, &fam.v, &gl] {
                let r = rep.relation_residual(&phi);
                assert!(r <= 1e-7, "{s} {}: {r:e}", rep.label.name());
            }
        }
    }
}

#[test]
fn kernels_centralizers_and_invariants() {
    let tol = Tolerances::default();
    for s in BUNDLES {
        let phi = MonodromySpec::parse(s).unwrap().endomorphism();
        for t in solve_traces(&phi, &SolveOptions::default()).unwrap() {
            let h = holonomy_from_triple(&phi, &t, &tol).unwrap();
            let fam = adjoint_family(&h.rep4, &tol).unwrap();
            assert_eq!(res_l_map(&fam.sl4).nullspace(tol.null).cols(), 15, "{s}");
            assert_eq!(res_l_map(&fam.v).nullspace(tol.null).cols(), 9, "{s}");
            assert_eq!(centralizer(&fam.sl4, tol.null), 5, "{s}");
            assert_eq!(centralizer(&fam.pso, tol.null), 2, "{s}");
            assert_eq!(centralizer(&fam.v, tol.null), 3, "{s}");
            let id = CMatrix::identity(15);
            let fixed = CMatrix::vstack(&[&(&id - fam.sl4.matrix(0)), &(&id - fam.sl4.matrix(1))]);
            assert_eq!(fixed.nullspace(tol.null).cols(), 0, "{s}");
        }
    }
}

#[test]
fn bundle_shortcut_matches_generic_wada() {
    let tol = Tolerances::default();
    for s in BUNDLES {
        let spec = MonodromySpec::parse(s).unwrap();
        let phi = spec.endomorphism();
        let t = solve_traces(&phi, &SolveOptions::default()).unwrap()[0];
        let h = holonomy_from_triple(&phi, &t, &tol).unwrap();
        let fam = adjoint_family(&h.rep4, &tol).unwrap();
        let fast = bundle_twisted_alexander(&phi, &fam.sl4, &tol).unwrap().quotient.normalized();

        let (p, alpha) = bundle_presentation(&spec).unwrap();
        let mats = (0..3).map(|g| fam.sl4.matrix(g).clone()).collect();
        let w = twisted_alexander(&p, &RingRep::new(mats, alpha).unwrap(), &tol).unwrap();
        let (n, d) = &w.reduced;
        // The generic route may leave a unit-modulus constant in front.
        let slow = n.normalized();
        let k = fast.leading() / slow.leading();
        let slow = slow.scale(k);
        assert!(d.span() == 0 && (d.coeff(d.min_exp()) - cint(1)).abs_f64() < 1e-12);
        let err = (&fast - &slow).norm_inf() / fast.norm_inf();
        assert!(err < 1e-9, "{s}: {err:e}\n{}\n{}", fast.display("t"), slow.display("t"));
    }
}
