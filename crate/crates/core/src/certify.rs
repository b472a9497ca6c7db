//! Rigidity rel cusp certificates from root-1 multiplicities, with the
//! cross-checks that have to agree before a verdict is issued.
//!
//! Three sufficient conditions are tested, each only at *exact* multiplicity:
//! the relative characteristic polynomial on sl(4) vanishing to order 5 at
//! t = 1, the one on the complement v to order 3, and the tensor-square
//! twisted Alexander polynomial to order 4. No condition ever certifies
//! non-rigidity.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::alexander::{
    bundle_twisted_alexander, coboundary_residual, monodromy_action, res_l_map, wada_action_agreement, Direction,
};
use crate::error::{Error, Result};
use crate::holonomy::{
    adjoint_family, holonomy_from_triple, kronecker_rep, solve_traces, trace_system, Holonomy, LinearRepN, RepLabel,
    SolveOptions,
};
use crate::numeric::{cone, CMatrix, LaurentPoly, PolySystem, ScalarExt, Tolerances, RELATION_TOL};
use crate::presentation::MonodromySpec;
use crate::words::{longitude, EndoF2};

#[derive(Clone, Debug, PartialEq)]
pub struct CertifyOptions {
    pub tol: Tolerances,
    pub seed: u64,
    pub starts: usize,
    /// Any of Sl4, V, Gl16.
    pub reps: Vec<RepLabel>,
    /// Restrict to one solution index.
    pub solution: Option<usize>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            tol: Tolerances::default(),
            seed: 0,
            starts: 64,
            reps: vec![RepLabel::Sl4, RepLabel::V, RepLabel::Gl16],
            solution: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    RigidRelCusp,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::RigidRelCusp => "rigid-rel-cusp",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolySource {
    /// det(M - t) of the inverse monodromy action on ker res_l.
    RelativeCharPoly,
    /// Twisted Alexander polynomial of the bundle.
    Wada,
}

/// A polynomial, normalised up to ±t^k, with its behaviour at t = 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyEvidence {
    pub representation: RepLabel,
    pub source: PolySource,
    /// Coefficients from t^0 upward, as [re, im].
    pub coefficients: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integer: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factored: Option<String>,
    pub multiplicity: usize,
    /// |p / (t - 1)^m| at t = 1.
    pub deflated_value: f64,
    /// Root test threshold: tol_root · ‖p‖∞.
    pub threshold: f64,
}

impl PolyEvidence {
    pub fn new(representation: RepLabel, source: PolySource, p: &LaurentPoly, tol: &Tolerances) -> Self {
        let p = p.normalized();
        let (multiplicity, _, value) = p.root_multiplicity(cone(), tol.root);
        let integer = p.integer_round(tol.root);
        let factored = integer.as_ref().and_then(|q| q.factor()).map(|f| f.display("t").to_string());
        PolyEvidence {
            representation,
            source,
            coefficients: p.coeffs().iter().map(|c| c.pair()).collect(),
            integer: integer.map(|q| q.coeffs),
            factored,
            multiplicity,
            deflated_value: value.abs_f64(),
            threshold: tol.root * p.norm_inf(),
        }
    }

    /// The deflated value clears the root threshold by a factor of ten.
    pub fn decisive(&self) -> bool {
        self.deflated_value > 10.0 * self.threshold
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateKind {
    /// Relative characteristic polynomial on sl(4) has 1 as a root of multiplicity 5.
    Sl4Relative,
    /// Relative characteristic polynomial on v has 1 as a root of multiplicity 3.
    VRelative,
    /// Tensor-square twisted Alexander polynomial has 1 as a root of multiplicity 4.
    Gl16Wada,
}

impl CertificateKind {
    pub fn required_multiplicity(self) -> usize {
        match self {
            CertificateKind::Sl4Relative => 5,
            CertificateKind::VRelative => 3,
            CertificateKind::Gl16Wada => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CertificateKind::Sl4Relative => "sl4-relative",
            CertificateKind::VRelative => "v-relative",
            CertificateKind::Gl16Wada => "gl16-wada",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub multiplicity: usize,
    pub required: usize,
    pub decisive: bool,
    pub fired: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub markov: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sl2_relations: Option<f64>,
    pub lorentz: f64,
    pub so31_relations: f64,
    /// Per representation: relation residual, in the order computed.
    pub representations: Vec<(RepLabel, f64)>,
    pub split_leak: f64,
    pub action_leak: f64,
    pub coboundary: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub index: usize,
    /// tr a, tr b, tr ab; absent when the holonomy was supplied in SO(3, 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub traces: Option<[[f64; 2]; 3]>,
    pub geometric_candidate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meridian_trace: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub longitude_trace: Option<[f64; 2]>,
    #[serde(default)]
    pub residuals: Residuals,
    #[serde(default)]
    pub evidence: Vec<PolyEvidence>,
    #[serde(default)]
    pub certificates: Vec<Certificate>,
    #[serde(default)]
    pub cross_checks: Vec<CrossCheck>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub monodromy: String,
    pub matrix: [[i64; 2]; 2],
    pub trace: i64,
    /// φ(a), φ(b).
    pub images: [String; 2],
    pub tolerances: Tolerances,
    pub seed: u64,
    pub starts: usize,
    pub representations: Vec<RepLabel>,
    pub solutions: Vec<SolutionReport>,
    /// Rigid when some geometric candidate is certified.
    pub verdict: Verdict,
}

impl RigidityReport {
    pub fn all_inconclusive(&self) -> bool {
        self.solutions.iter().all(|s| s.verdict == Verdict::Inconclusive)
    }
}

fn check(name: &str, passed: bool, detail: String) -> CrossCheck {
    CrossCheck { name: name.to_string(), passed, detail }
}

fn kernel_dim(m: &CMatrix, tol: f64) -> usize {
    m.nullspace(tol).cols()
}

/// ker(ρ(l) - I) in the given module.
fn centralizer_dim(rep: &LinearRepN, tol: f64) -> usize {
    let l = rep.word_matrix(&longitude());
    kernel_dim(&(&l - &CMatrix::identity(rep.dim())), tol)
}

fn invariants_dim(rep: &LinearRepN, tol: f64) -> usize {
    let id = CMatrix::identity(rep.dim());
    kernel_dim(&CMatrix::vstack(&[&(&id - rep.matrix(0)), &(&id - rep.matrix(1))]), tol)
}

fn evidence_of(ev: &[PolyEvidence], rep: RepLabel, src: PolySource) -> Option<&PolyEvidence> {
    ev.iter().find(|e| e.representation == rep && e.source == src)
}

fn analyze(phi: &EndoF2, spec: &MonodromySpec, h: &Holonomy, opts: &CertifyOptions) -> Result<SolutionReport> {
    let tol = &opts.tol;
    let want = |l: RepLabel| opts.reps.contains(&l);
    let mut res = Residuals {
        markov: h
            .triple
            .map(|t| {
                let sys = trace_system(phi).expect("bundle images use a and b only");
                sys.residual(&t.as_vec()).iter().map(|z| z.abs_f64()).fold(0.0, f64::max)
            })
            .unwrap_or(0.0),
        sl2_relations: h.diagnostics.sl2_relation_residual,
        lorentz: h.diagnostics.lorentz_residual,
        so31_relations: h.diagnostics.so31_relation_residual,
        ..Default::default()
    };
    let mut evidence = Vec::new();
    let mut checks = Vec::new();

    let fam = if want(RepLabel::Sl4) || want(RepLabel::V) { Some(adjoint_family(&h.rep4, tol)?) } else { None };
    let gl = want(RepLabel::Gl16).then(|| kronecker_rep(&h.rep4));

    let mut record = |rep: &LinearRepN| -> Result<()> {
        let r = rep.relation_residual(phi);
        res.representations.push((rep.label, r));
        if r > RELATION_TOL {
            return Err(Error::Residual { what: format!("{} bundle relations", rep.label.name()), residual: r });
        }
        Ok(())
    };
    if let Some(f) = &fam {
        res.split_leak = f.split_leak;
        record(&f.sl4)?;
        record(&f.pso)?;
        record(&f.v)?;
    }
    if let Some(g) = &gl {
        record(g)?;
    }

    // Relative characteristic polynomials and Wada polynomials for the adjoint modules.
    if let Some(f) = &fam {
        let mut modules: Vec<(&LinearRepN, usize)> = Vec::new();
        if want(RepLabel::Sl4) {
            modules.push((&f.sl4, 15));
        }
        if want(RepLabel::V) {
            modules.push((&f.v, 9));
        }
        for (rep, expected) in modules {
            let dim = kernel_dim(&res_l_map(rep), tol.null);
            checks.push(check(
                &format!("{}-kernel-dimension", rep.label.name()),
                dim == expected,
                format!("dim ker res_l = {dim}, expected {expected}"),
            ));
            let act = monodromy_action(phi, rep, Direction::Inverse, tol)?;
            res.action_leak = res.action_leak.max(act.leak);
            evidence.push(PolyEvidence::new(
                rep.label,
                PolySource::RelativeCharPoly,
                &act.relative_char_poly(tol)?,
                tol,
            ));
            let wada = bundle_twisted_alexander(phi, rep, tol)?;
            evidence.push(PolyEvidence::new(rep.label, PolySource::Wada, &wada.quotient, tol));
            let fwd = monodromy_action(phi, rep, Direction::Forward, tol)?;
            let cob = coboundary_residual(&fwd, rep);
            res.coboundary = res.coboundary.max(cob);
            checks.push(check(
                &format!("{}-coboundary-action", rep.label.name()),
                cob <= RELATION_TOL,
                format!("‖M B - B x‖ = {cob:.3e}"),
            ));
            let t1 = wada_action_agreement(phi, rep, tol)?;
            checks.push(check(
                &format!("{}-wada-equals-action", rep.label.name()),
                t1.matched,
                format!(
                    "coefficient distance {:.3e}{}",
                    t1.distance,
                    if t1.reciprocal { " (after t -> 1/t)" } else { "" }
                ),
            ));
        }
        // Centralizer of the longitude and invariants of the fibre group.
        let (c_sl, c_pso, c_v) =
            (centralizer_dim(&f.sl4, tol.null), centralizer_dim(&f.pso, tol.null), centralizer_dim(&f.v, tol.null));
        checks.push(check(
            "longitude-centralizer",
            c_sl == 5 && c_pso == 2 && c_v == 3,
            format!("dim {c_sl} in sl4 = {c_pso} in so(3,1) + {c_v} in v; expected 5 = 2 + 3"),
        ));
        let h0 = invariants_dim(&f.sl4, tol.null);
        checks.push(check("fibre-invariants", h0 == 0, format!("dim H0(F2; sl4) = {h0}")));
    }
    if let Some(g) = &gl {
        let wada = bundle_twisted_alexander(phi, g, tol)?;
        evidence.push(PolyEvidence::new(RepLabel::Gl16, PolySource::Wada, &wada.quotient, tol));
    }

    // Structural relations between the polynomials.
    let sl_w = evidence_of(&evidence, RepLabel::Sl4, PolySource::Wada);
    let sl_r = evidence_of(&evidence, RepLabel::Sl4, PolySource::RelativeCharPoly);
    let v_r = evidence_of(&evidence, RepLabel::V, PolySource::RelativeCharPoly);
    let gl_w = evidence_of(&evidence, RepLabel::Gl16, PolySource::Wada);
    if let (Some(s), Some(g)) = (sl_w, gl_w) {
        checks.push(check(
            "gl16-multiplicity",
            g.multiplicity + 1 == s.multiplicity,
            format!("m_gl16 = {}, m_sl4 = {}; expected m_gl16 = m_sl4 - 1", g.multiplicity, s.multiplicity),
        ));
        let torsion = g.deflated_value / s.deflated_value;
        let target = (spec.trace() - 2).abs() as f64;
        checks.push(check(
            "torsion-order",
            (torsion - target).abs() <= 1e-6 * target.max(1.0),
            format!("|extra factor at 1| = {torsion:.9}, |tr - 2| = {target}"),
        ));
    }
    if let (Some(s), Some(v)) = (sl_r, v_r) {
        checks.push(check(
            "v-multiplicity",
            v.multiplicity + 2 == s.multiplicity,
            format!("m_v = {}, m_sl4 = {}; expected m_v = m_sl4 - 2", v.multiplicity, s.multiplicity),
        ));
    }

    let mut certificates = Vec::new();
    for (kind, ev) in
        [(CertificateKind::Sl4Relative, sl_r), (CertificateKind::VRelative, v_r), (CertificateKind::Gl16Wada, gl_w)]
    {
        if let Some(ev) = ev {
            let required = kind.required_multiplicity();
            let decisive = ev.decisive();
            certificates.push(Certificate {
                kind,
                multiplicity: ev.multiplicity,
                required,
                decisive,
                fired: ev.multiplicity == required && decisive,
            });
        }
    }

    let fired = certificates.iter().any(|c| c.fired);
    let consistent = checks.iter().all(|c| c.passed);
    Ok(SolutionReport {
        index: 0,
        traces: h.triple.map(|t| t.pairs()),
        geometric_candidate: h.diagnostics.geometric_candidate,
        meridian_trace: h.diagnostics.meridian_trace.map(|z| z.pair()),
        longitude_trace: h.diagnostics.longitude_trace.map(|z| z.pair()),
        residuals: res,
        evidence,
        certificates,
        cross_checks: checks,
        verdict: if fired && consistent { Verdict::RigidRelCusp } else { Verdict::Inconclusive },
        error: None,
    })
}

fn failed(index: usize, h: Option<&Holonomy>, e: &Error) -> SolutionReport {
    SolutionReport {
        index,
        traces: h.and_then(|h| h.triple).map(|t| t.pairs()),
        geometric_candidate: h.is_some_and(|h| h.diagnostics.geometric_candidate),
        meridian_trace: None,
        longitude_trace: None,
        residuals: Residuals::default(),
        evidence: Vec::new(),
        certificates: Vec::new(),
        cross_checks: Vec::new(),
        verdict: Verdict::Inconclusive,
        error: Some(e.to_string()),
    }
}

/// Pick out the requested solution, or all of them.
pub fn select<T>(items: Vec<T>, which: Option<usize>) -> Result<Vec<(usize, T)>> {
    let count = items.len();
    let all = items.into_iter().enumerate();
    match which {
        None => Ok(all.collect()),
        Some(index) if index < count => Ok(all.filter(|(i, _)| *i == index).collect()),
        Some(index) => Err(Error::SolutionIndex { index, count }),
    }
}

/// Solve for the holonomy and run every requested certificate on each trace
/// solution. Per-solution failures are recorded, not propagated.
pub fn certify(spec: &MonodromySpec, opts: &CertifyOptions) -> Result<RigidityReport> {
    spec.ensure_hyperbolic()?;
    let phi = spec.endomorphism();
    let triples = solve_traces(&phi, &SolveOptions { starts: opts.starts, seed: opts.seed })?;
    let mut solutions = Vec::new();
    for (i, t) in select(triples, opts.solution)? {
        let report = match holonomy_from_triple(&phi, &t, &opts.tol) {
            Ok(h) => run_one(&phi, spec, i, &h, opts),
            Err(e) => {
                let mut r = failed(i, None, &e);
                r.traces = Some(t.pairs());
                r
            }
        };
        solutions.push(report);
    }
    Ok(assemble(spec, &phi, opts, solutions))
}

/// As [`certify`], with the holonomy given.
pub fn certify_holonomy(spec: &MonodromySpec, h: &Holonomy, opts: &CertifyOptions) -> Result<RigidityReport> {
    spec.ensure_hyperbolic()?;
    let phi = spec.endomorphism();
    let solutions = vec![run_one(&phi, spec, 0, h, opts)];
    Ok(assemble(spec, &phi, opts, solutions))
}

fn run_one(phi: &EndoF2, spec: &MonodromySpec, index: usize, h: &Holonomy, opts: &CertifyOptions) -> SolutionReport {
    match analyze(phi, spec, h, opts) {
        Ok(mut r) => {
            r.index = index;
            r
        }
        Err(e) => failed(index, Some(h), &e),
    }
}

fn assemble(
    spec: &MonodromySpec,
    phi: &EndoF2,
    opts: &CertifyOptions,
    solutions: Vec<SolutionReport>,
) -> RigidityReport {
    let verdict = if solutions.iter().any(|s| s.geometric_candidate && s.verdict == Verdict::RigidRelCusp) {
        Verdict::RigidRelCusp
    } else {
        Verdict::Inconclusive
    };
    RigidityReport {
        monodromy: spec.to_string(),
        matrix: spec.matrix(),
        trace: spec.trace(),
        images: [phi.image(0).to_string(), phi.image(1).to_string()],
        tolerances: opts.tol,
        seed: opts.seed,
        starts: opts.starts,
        representations: opts.reps.clone(),
        solutions,
        verdict,
    }
}

/// Complex number to ten decimals, without "-0.0000000000".
pub fn fmt_c(z: [f64; 2]) -> String {
    let clean = |v: f64| if v.abs() < 5e-11 { 0.0 } else { v };
    let (re, im) = (clean(z[0]), clean(z[1]));
    format!("{re:.10} {} {:.10}i", if im < 0.0 { '-' } else { '+' }, im.abs())
}

/// The coefficient list, or the factored integer form when there is one.
pub fn render_poly(e: &PolyEvidence) -> String {
    match (&e.factored, &e.integer) {
        (Some(f), _) => f.clone(),
        (None, Some(c)) => format!("{c:?}"),
        (None, None) => format!("[{}]", e.coefficients.iter().map(|&c| fmt_c(c)).collect::<Vec<_>>().join(", ")),
    }
}

pub fn render_text(r: &RigidityReport) -> String {
    let mut s = String::new();
    let m = r.matrix;
    let _ = writeln!(
        s,
        "monodromy {}  matrix [[{}, {}], [{}, {}]]  trace {}",
        r.monodromy, m[0][0], m[0][1], m[1][0], m[1][1], r.trace
    );
    let _ = writeln!(s, "  x a x^-1 = {}   x b x^-1 = {}", r.images[0], r.images[1]);
    let _ = writeln!(
        s,
        "  tolerances det {:e} root {:e} null {:e}; seed {}; starts {}",
        r.tolerances.det, r.tolerances.root, r.tolerances.null, r.seed, r.starts
    );
    for sol in &r.solutions {
        let _ = writeln!(
            s,
            "\nsolution {}{}",
            sol.index,
            if sol.geometric_candidate { "  (geometric candidate)" } else { "" }
        );
        if let Some(t) = sol.traces {
            let _ = writeln!(s, "  tr a  = {}\n  tr b  = {}\n  tr ab = {}", fmt_c(t[0]), fmt_c(t[1]), fmt_c(t[2]));
        }
        if let Some(e) = &sol.error {
            let _ = writeln!(s, "  pipeline failed: {e}");
        }
        for e in &sol.evidence {
            let src = match e.source {
                PolySource::RelativeCharPoly => "relative char poly",
                PolySource::Wada => "twisted Alexander",
            };
            let _ = writeln!(s, "  {:<5} {:<18}: {}", e.representation.name(), src, render_poly(e));
            let _ = writeln!(
                s,
                "        multiplicity at 1: {}  (deflated |value| {:.6e}, threshold {:.3e})",
                e.multiplicity, e.deflated_value, e.threshold
            );
        }
        for c in &sol.certificates {
            let _ = writeln!(
                s,
                "  certificate {:<13} multiplicity {} (needs exactly {}){} -> {}",
                c.kind.name(),
                c.multiplicity,
                c.required,
                if c.decisive { "" } else { ", margin too small" },
                if c.fired { "fires" } else { "does not fire" }
            );
        }
        for c in &sol.cross_checks {
            let _ = writeln!(s, "  check {:<28} {}  {}", c.name, if c.passed { "ok  " } else { "FAIL" }, c.detail);
        }
        let _ = writeln!(s, "  verdict: {}", sol.verdict.as_str());
    }
    let _ = writeln!(s, "\nverdict: {}", r.verdict.as_str());
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::LaurentPoly;

    #[test]
    fn multiplicity_six_does_not_fire() {
        // (t - 1)^6 (t^2 - 18t + 1)
        let mut p = LaurentPoly::from_ints(0, &[1, -18, 1]);
        for _ in 0..6 {
            p = &p * &LaurentPoly::from_ints(0, &[-1, 1]);
        }
        let ev = PolyEvidence::new(RepLabel::Sl4, PolySource::RelativeCharPoly, &p, &Tolerances::default());
        assert_eq!(ev.multiplicity, 6);
        assert!(ev.decisive());
        assert_ne!(ev.multiplicity, CertificateKind::Sl4Relative.required_multiplicity());
    }

    #[test]
    fn evidence_is_normalised_and_factored() {
        let p = LaurentPoly::from_ints(3, &[-1, 4, -1]);
        let ev = PolyEvidence::new(RepLabel::Gl16, PolySource::Wada, &p, &Tolerances::default());
        assert_eq!(ev.integer, Some(vec![1, -4, 1]));
        assert_eq!(ev.multiplicity, 0);
        assert!((ev.deflated_value - 2.0).abs() < 1e-12);
        assert_eq!(ev.factored.as_deref(), Some("t^2 - 4t + 1"));
    }

    #[test]
    fn solution_selection() {
        assert_eq!(select(vec!['p', 'q'], Some(1)).unwrap(), vec![(1, 'q')]);
        assert!(matches!(select(vec!['p'], Some(3)), Err(Error::SolutionIndex { index: 3, count: 1 })));
    }
}
