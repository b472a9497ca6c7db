//! Holonomy matrices of the two worked bundles, entry by entry.

use rigidity_core::holonomy::{
    holonomy_from_sl2, holonomy_from_triple, solve_traces, to_so31, Rep2, SolveOptions, TraceTriple,
};
use rigidity_core::numeric::{cint, cs, CMatrix, CScalar, ScalarExt, Tolerances};
use rigidity_core::presentation::MonodromySpec;

fn real(rows: [[f64; 4]; 4]) -> CMatrix {
    let r: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    CMatrix::from_real_rows(&r)
}

fn sqrt(x: f64) -> f64 {
    x.sqrt()
}

#[test]
fn llrr_so31_generators() {
    let phi = MonodromySpec::parse("LLRR").unwrap().endomorphism();
    // B = -sqrt(2 - 2i), A = -sqrt2 B / sqrt(B^2 - 2), C = -2 sqrt2 / sqrt(B^2 - 2)
    let b = -cs(2.0, -2.0).sqrt_principal();
    let s2c = cs(2.0, 0.0).sqrt_principal();
    let r = (b * b - cint(2)).sqrt_principal();
    let t = TraceTriple::new(-s2c * b / r, b, -cint(2) * s2c / r);
    assert!((t.a - cs(1.5537739740300374, 0.6435942529055826)).abs_f64() < 1e-12);
    let h = holonomy_from_triple(&phi, &t, &Tolerances::default()).unwrap();

    let s2 = sqrt(2.0);
    let pa = real([
        [-1.0 / s2, -1.0 / s2, s2, -s2],
        [3.0 / s2, -1.0 / s2, -7.0 / (2.0 * s2), 9.0 / (2.0 * s2)],
        [1.0 / s2, 1.0 / (2.0 * s2), 7.0 / (8.0 * s2), -1.0 / (8.0 * s2)],
        [3.0 / s2, -1.0 / (2.0 * s2), -31.0 / (8.0 * s2), 41.0 / (8.0 * s2)],
    ]);
    let pb = real([
        [1.0 / s2, 1.0 / s2, -1.0 / (2.0 * s2), -1.0 / (2.0 * s2)],
        [1.0 / s2, 1.0 / s2, s2, -s2],
        [1.0 / (2.0 * s2), -s2, -9.0 / (8.0 * s2), 15.0 / (8.0 * s2)],
        [-1.0 / (2.0 * s2), -s2, -15.0 / (8.0 * s2), 25.0 / (8.0 * s2)],
    ]);
    let px = real([[1.0, 0.0, 1.0, 1.0], [0.0, 1.0, 0.0, 0.0], [-1.0, 0.0, 0.5, -0.5], [1.0, 0.0, 0.5, 1.5]]);
    assert!(h.rep4.a.dist(&pa) < 1e-14, "{:?}", h.rep4.a.to_pairs());
    assert!(h.rep4.b.dist(&pb) < 1e-14);
    assert!(h.rep4.x.dist(&px) < 1e-14);
}

fn rrl_sl2() -> Rep2 {
    let i = cs(0.0, 1.0);
    let s7 = cs(7.0, 0.0).sqrt_principal();
    let z = (cs(0.5, 0.0) * (cint(5) - i * s7)).sqrt_principal();
    let half = cs(0.5, 0.0);
    let m = |e: [CScalar; 4]| CMatrix::from_fn(2, 2, |r, c| e[2 * r + c]);
    let a = m([
        -z * half,
        (cint(6) + cint(2) * i * s7) / (cint(8) * (cint(10) - cint(2) * i * s7).sqrt_principal()),
        -z,
        -z * half,
    ]);
    let b = m([
        (s7 + cint(13) * i) / (cint(2) * s7 + cint(2) * i),
        i / cint(8) * (s7 + i),
        -(s7 + cint(5) * i) / (s7 + i),
        (cint(1) - i * s7) / cint(4),
    ]);
    let x = m([cint(-1), -(i / cint(4)) * (s7 - i), cint(0), cint(-1)]);
    Rep2 { a, b, x }
}

#[test]
fn rrl_sl2_generators_satisfy_relations_and_map_to_so31() {
    let phi = MonodromySpec::parse("RRL").unwrap().endomorphism();
    let rep = rrl_sl2();
    let h = holonomy_from_sl2(&phi, rep.clone(), None).unwrap();
    assert!(h.diagnostics.sl2_relation_residual.unwrap() < 1e-25);
    assert!(h.diagnostics.geometric_candidate);

    let s2 = sqrt(2.0);
    let s7 = sqrt(7.0);
    let q = sqrt(3.5);
    let qa = real([
        [5.0 / (4.0 * s2), q / 4.0, q / 8.0, q / 8.0],
        [q / 4.0, 3.0 / (4.0 * s2), -17.0 / (8.0 * s2), 15.0 / (8.0 * s2)],
        [-q / 8.0, 17.0 / (8.0 * s2), -17.0 / (16.0 * s2), 31.0 / (16.0 * s2)],
        [q / 8.0, 15.0 / (8.0 * s2), -31.0 / (16.0 * s2), 49.0 / (16.0 * s2)],
    ]);
    let qb = real([
        [-0.75, -s7 / 4.0, -s7 / 2.0, s7 / 2.0],
        [3.0 * s7 / 4.0, -1.25, 17.0 / 4.0, -19.0 / 4.0],
        [-s7 / 4.0, 0.0, 15.0 / 16.0, -9.0 / 16.0],
        [-3.0 * s7 / 4.0, 1.0, -71.0 / 16.0, 81.0 / 16.0],
    ]);
    let qx = real([
        [1.0, 0.0, -s7 / 4.0, -s7 / 4.0],
        [0.0, 1.0, 0.25, 0.25],
        [s7 / 4.0, -0.25, 0.75, -0.25],
        [-s7 / 4.0, 0.25, 0.25, 1.25],
    ]);
    assert!(to_so31(&rep.a).dist(&qa) < 1e-14);
    assert!(to_so31(&rep.b).dist(&qb) < 1e-14);
    assert!(to_so31(&rep.x).dist(&qx) < 1e-14);
}

#[test]
fn rrl_solver_finds_the_class_of_the_displayed_representation() {
    let phi = MonodromySpec::parse("RRL").unwrap().endomorphism();
    let rep = rrl_sl2();
    let (ta, tb, tc) = (rep.a.trace(), rep.b.trace(), (&rep.a * &rep.b).trace());
    let sols = solve_traces(&phi, &SolveOptions::default()).unwrap();
    let hit = sols.iter().any(|s| {
        [false, true].iter().any(|&conj| {
            [(1, 1), (-1, 1), (1, -1), (-1, -1)].iter().any(|&(ea, eb)| {
                let f = |z: CScalar| if conj { z.conj() } else { z };
                (f(s.a) * cint(ea) - ta).abs_f64() < 1e-9
                    && (f(s.b) * cint(eb) - tb).abs_f64() < 1e-9
                    && (f(s.c) * cint(ea * eb) - tc).abs_f64() < 1e-9
            })
        })
    });
    assert!(hit, "traces {:?} {:?} {:?} not among {sols:?}", ta.pair(), tb.pair(), tc.pair());
}

#[test]
fn rrl_meridian_in_normal_form_is_parabolic() {
    let phi = MonodromySpec::parse("RRL").unwrap().endomorphism();
    for s in solve_traces(&phi, &SolveOptions::default()).unwrap() {
        let h = holonomy_from_triple(&phi, &s, &Tolerances::default()).unwrap();
        let x = &h.rep2.unwrap().x;
        assert!((x.trace() + cint(2)).abs_f64() < 1e-20);
        assert!((x[(1, 0)]).abs_f64() < 1e-20);
        // Upper-right entry is ±(1/4)(√7 ∓ i) up to sign and conjugation.
        assert!((x[(0, 1)].abs_f64() - 0.5 * 2.0f64.sqrt()).abs() < 1e-14);
    }
}
