//! Reports for the subcommands other than `certify`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use rigidity_core::alexander::{
    monodromy_action, twisted_alexander, twisted_alexander_with_column, Direction, RingRep,
};
use rigidity_core::certify::{fmt_c, render_poly, select, PolyEvidence, PolySource};
use rigidity_core::error::Result;
use rigidity_core::holonomy::{
    adjoint_family, holonomy_from_triple, kronecker_rep, solve_traces, trace_system, Holonomy, LinearRepN, RepLabel,
    SolveOptions,
};
use rigidity_core::numeric::{CMatrix, LaurentPoly, PolySystem, ScalarExt, Tolerances};
use rigidity_core::presentation::{LoadedPresentation, MonodromySpec};
use rigidity_core::words::EndoF2;

type Pairs = Vec<Vec<[f64; 2]>>;

fn fmt_matrix(out: &mut String, name: &str, m: &Pairs) {
    let _ = writeln!(out, "    {name} =");
    for row in m {
        let cells: Vec<String> = row.iter().map(|&z| format!("{:>34}", fmt_c(z))).collect();
        let _ = writeln!(out, "      [{}]", cells.join(" "));
    }
}

fn fmt_real_matrix(out: &mut String, name: &str, m: &Pairs) {
    let _ = writeln!(out, "    {name} =");
    for row in m {
        let cells: Vec<String> =
            row.iter().map(|z| format!("{:>16.10}", if z[0].abs() < 5e-11 { 0.0 } else { z[0] })).collect();
        let _ = writeln!(out, "      [{}]", cells.join(" "));
    }
}

fn header(spec: &MonodromySpec, phi: &EndoF2) -> String {
    let m = spec.matrix();
    format!(
        "monodromy {}  matrix [[{}, {}], [{}, {}]]  trace {}\n  x a x^-1 = {}   x b x^-1 = {}\n",
        spec,
        m[0][0],
        m[0][1],
        m[1][0],
        m[1][1],
        spec.trace(),
        phi.image(0),
        phi.image(1)
    )
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSolution {
    pub index: usize,
    pub traces: [[f64; 2]; 3],
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSolveReport {
    pub monodromy: String,
    pub images: [String; 2],
    /// Polynomials in A = tr a, B = tr b, C = tr ab that vanish at a solution.
    pub equations: [String; 3],
    pub solutions: Vec<TraceSolution>,
}

pub fn trace_solve(spec: &MonodromySpec, opts: &SolveOptions, which: Option<usize>) -> Result<TraceSolveReport> {
    spec.ensure_hyperbolic()?;
    let phi = spec.endomorphism();
    let sys = trace_system(&phi)?;
    let sols = solve_traces(&phi, opts)?;
    let solutions = select(sols, which)?
        .into_iter()
        .map(|(index, t)| TraceSolution {
            index,
            traces: t.pairs(),
            residual: sys.residual(&t.as_vec()).iter().map(|z| z.abs_f64()).fold(0.0, f64::max),
        })
        .collect();
    let eq = sys.equations();
    Ok(TraceSolveReport {
        monodromy: spec.to_string(),
        images: [phi.image(0).to_string(), phi.image(1).to_string()],
        equations: [format!("{} = 0", eq[0]), format!("{} = 0", eq[1]), format!("{} = 0", eq[2])],
        solutions,
    })
}

pub fn render_trace_solve(r: &TraceSolveReport) -> String {
    let mut s =
        format!("monodromy {}\n  x a x^-1 = {}   x b x^-1 = {}\n  equations:\n", r.monodromy, r.images[0], r.images[1]);
    for e in &r.equations {
        let _ = writeln!(s, "    {e}");
    }
    for sol in &r.solutions {
        let _ = writeln!(
            s,
            "solution {}: A = {}, B = {}, C = {}  (residual {:.2e})",
            sol.index,
            fmt_c(sol.traces[0]),
            fmt_c(sol.traces[1]),
            fmt_c(sol.traces[2]),
            sol.residual
        );
    }
    s
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Generators {
    pub a: Pairs,
    pub b: Pairs,
    pub x: Pairs,
}

impl Generators {
    fn new(m: [CMatrix; 3]) -> Self {
        let [a, b, x] = m;
        Generators { a: a.to_pairs(), b: b.to_pairs(), x: x.to_pairs() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolonomySolution {
    pub index: usize,
    pub traces: [[f64; 2]; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometric_candidate: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sl2: Option<Generators>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub so31: Option<Generators>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meridian_trace: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lorentz_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolonomyReport {
    pub monodromy: String,
    pub images: [String; 2],
    pub solutions: Vec<HolonomySolution>,
}

/// Solution index, traces, and the holonomy built from them (or why not).
type SolvedHolonomy = (usize, [[f64; 2]; 3], Result<Holonomy>);

fn holonomies(
    spec: &MonodromySpec,
    opts: &SolveOptions,
    which: Option<usize>,
    tol: &Tolerances,
) -> Result<Vec<SolvedHolonomy>> {
    spec.ensure_hyperbolic()?;
    let phi = spec.endomorphism();
    let sols = solve_traces(&phi, opts)?;
    Ok(select(sols, which)?.into_iter().map(|(i, t)| (i, t.pairs(), holonomy_from_triple(&phi, &t, tol))).collect())
}

pub fn holonomy(
    spec: &MonodromySpec,
    opts: &SolveOptions,
    which: Option<usize>,
    tol: &Tolerances,
) -> Result<HolonomyReport> {
    let phi = spec.endomorphism();
    let solutions = holonomies(spec, opts, which, tol)?
        .into_iter()
        .map(|(index, traces, h)| match h {
            Ok(h) => HolonomySolution {
                index,
                traces,
                geometric_candidate: Some(h.diagnostics.geometric_candidate),
                sl2: h.rep2.as_ref().map(|r| Generators::new(r.generators())),
                so31: Some(Generators::new(h.rep4.generators())),
                meridian_trace: h.diagnostics.meridian_trace.map(|z| z.pair()),
                lorentz_residual: Some(h.diagnostics.lorentz_residual),
                relation_residual: Some(h.diagnostics.so31_relation_residual),
                error: None,
            },
            Err(e) => HolonomySolution {
                index,
                traces,
                geometric_candidate: None,
                sl2: None,
                so31: None,
                meridian_trace: None,
                lorentz_residual: None,
                relation_residual: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    Ok(HolonomyReport {
        monodromy: spec.to_string(),
        images: [phi.image(0).to_string(), phi.image(1).to_string()],
        solutions,
    })
}

pub fn render_holonomy(spec: &MonodromySpec, r: &HolonomyReport) -> String {
    let mut s = header(spec, &spec.endomorphism());
    for sol in &r.solutions {
        let _ = writeln!(
            s,
            "\nsolution {}{}",
            sol.index,
            if sol.geometric_candidate == Some(true) { "  (geometric candidate)" } else { "" }
        );
        let _ = writeln!(
            s,
            "  tr a = {}, tr b = {}, tr ab = {}",
            fmt_c(sol.traces[0]),
            fmt_c(sol.traces[1]),
            fmt_c(sol.traces[2])
        );
        if let Some(e) = &sol.error {
            let _ = writeln!(s, "  failed: {e}");
            continue;
        }
        if let Some(g) = &sol.sl2 {
            let _ = writeln!(s, "  SL(2,C):");
            fmt_matrix(&mut s, "a", &g.a);
            fmt_matrix(&mut s, "b", &g.b);
            fmt_matrix(&mut s, "x", &g.x);
        }
        if let Some(g) = &sol.so31 {
            let _ = writeln!(s, "  SO(3,1), Lorentz form diag(1, 1, 1, -1):");
            fmt_real_matrix(&mut s, "a", &g.a);
            fmt_real_matrix(&mut s, "b", &g.b);
            fmt_real_matrix(&mut s, "x", &g.x);
        }
        if let (Some(l), Some(rr)) = (sol.lorentz_residual, sol.relation_residual) {
            let _ = writeln!(s, "  residuals: Lorentz {l:.2e}, bundle relations {rr:.2e}");
        }
    }
    s
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModuleAction {
    pub representation: RepLabel,
    pub kernel_dimension: usize,
    pub leak: f64,
    pub restricted: Pairs,
    pub char_poly: PolyEvidence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionSolution {
    pub index: usize,
    pub traces: [[f64; 2]; 3],
    pub modules: Vec<ModuleAction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionReport {
    pub monodromy: String,
    pub direction: Direction,
    pub solutions: Vec<ActionSolution>,
}

fn module_actions(
    phi: &EndoF2,
    h: &Holonomy,
    reps: &[RepLabel],
    dir: Direction,
    tol: &Tolerances,
) -> Result<Vec<ModuleAction>> {
    let mut chosen: Vec<LinearRepN> = Vec::new();
    if reps.contains(&RepLabel::Sl4) || reps.contains(&RepLabel::V) {
        let fam = adjoint_family(&h.rep4, tol)?;
        if reps.contains(&RepLabel::Sl4) {
            chosen.push(fam.sl4);
        }
        if reps.contains(&RepLabel::V) {
            chosen.push(fam.v);
        }
    }
    if reps.contains(&RepLabel::Gl16) {
        chosen.push(kronecker_rep(&h.rep4));
    }
    chosen
        .iter()
        .map(|rep| {
            let act = monodromy_action(phi, rep, dir, tol)?;
            let p = act.relative_char_poly(tol)?;
            Ok(ModuleAction {
                representation: rep.label,
                kernel_dimension: act.kernel_dim(),
                leak: act.leak,
                restricted: act.restricted.to_pairs(),
                char_poly: PolyEvidence::new(rep.label, PolySource::RelativeCharPoly, &p, tol),
            })
        })
        .collect()
}

pub fn action(
    spec: &MonodromySpec,
    opts: &SolveOptions,
    which: Option<usize>,
    reps: &[RepLabel],
    dir: Direction,
    tol: &Tolerances,
) -> Result<ActionReport> {
    let phi = spec.endomorphism();
    if dir == Direction::Forward {
        phi.inverse()?;
    }
    let solutions = holonomies(spec, opts, which, tol)?
        .into_iter()
        .map(|(index, traces, h)| match h.and_then(|h| module_actions(&phi, &h, reps, dir, tol)) {
            Ok(modules) => ActionSolution { index, traces, modules, error: None },
            Err(e) => ActionSolution { index, traces, modules: Vec::new(), error: Some(e.to_string()) },
        })
        .collect();
    Ok(ActionReport { monodromy: spec.to_string(), direction: dir, solutions })
}

pub fn render_action(spec: &MonodromySpec, r: &ActionReport) -> String {
    let mut s = header(spec, &spec.endomorphism());
    let _ = writeln!(s, "  action: {:?} on ker res_l", r.direction);
    for sol in &r.solutions {
        let _ = writeln!(s, "\nsolution {}", sol.index);
        let _ = writeln!(
            s,
            "  tr a = {}, tr b = {}, tr ab = {}",
            fmt_c(sol.traces[0]),
            fmt_c(sol.traces[1]),
            fmt_c(sol.traces[2])
        );
        if let Some(e) = &sol.error {
            let _ = writeln!(s, "  failed: {e}");
        }
        for m in &sol.modules {
            let _ = writeln!(
                s,
                "  {:<5} kernel dimension {:>2}, leak {:.2e}\n        char poly: {}\n        multiplicity at 1: {}",
                m.representation.name(),
                m.kernel_dimension,
                m.leak,
                render_poly(&m.char_poly),
                m.char_poly.multiplicity
            );
        }
    }
    s
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlexanderReport {
    pub generators: Vec<char>,
    pub relators: Vec<String>,
    pub abelianization: Vec<i64>,
    pub dimension: usize,
    /// Generator whose column was removed.
    pub column: usize,
    pub numerator: Vec<[f64; 2]>,
    pub denominator: Vec<[f64; 2]>,
    /// Exponent of the lowest numerator coefficient minus that of the denominator.
    pub shift: i32,
    pub exact: bool,
    /// Lowest terms; the denominator is monic.
    pub reduced_numerator: Vec<[f64; 2]>,
    pub reduced_denominator: Vec<[f64; 2]>,
    pub display: String,
}

fn coeffs(p: &LaurentPoly) -> Vec<[f64; 2]> {
    p.coeffs().iter().map(|c| c.pair()).collect()
}

fn show(p: &LaurentPoly, tol: f64) -> String {
    match p.integer_round(tol) {
        Some(q) => match q.factor() {
            Some(f) => f.display("x").to_string(),
            None => q.display("x").to_string(),
        },
        None => p.display("x").to_string(),
    }
}

pub fn alexander(loaded: &LoadedPresentation, column: Option<usize>, tol: &Tolerances) -> Result<AlexanderReport> {
    let p = &loaded.presentation;
    let rep = match &loaded.representation {
        Some(m) => RingRep::new(m.clone(), loaded.abelianization.clone())?,
        None => RingRep::trivial(1, loaded.abelianization.clone()),
    };
    let w = match column {
        Some(k) => twisted_alexander_with_column(p, &rep, k, tol)?,
        None => twisted_alexander(p, &rep, tol)?,
    };
    let (rn, rd) = &w.reduced;
    let shift = rn.min_exp() - rd.min_exp();
    let num = rn.shift(-rn.min_exp());
    let display = if w.quotient.is_some() {
        let q = num.normalized();
        show(&q, tol.root)
    } else {
        format!("x^{shift} ({}) / ({})", show(&num, tol.root), show(rd, tol.root))
    };
    Ok(AlexanderReport {
        generators: p.names().to_vec(),
        relators: p.relators().iter().map(|r| r.display_with(p.names()).to_string()).collect(),
        abelianization: loaded.abelianization.0.clone(),
        dimension: rep.dim(),
        column: w.column,
        numerator: coeffs(&w.numerator),
        denominator: coeffs(&w.denominator),
        shift,
        exact: w.quotient.is_some(),
        reduced_numerator: coeffs(&num),
        reduced_denominator: coeffs(rd),
        display,
    })
}

pub fn render_alexander(r: &AlexanderReport) -> String {
    let gens: String = r.generators.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ");
    format!(
        "presentation <{gens} | {}>, abelianization {:?}, representation dimension {}\n  column removed: {} ({})\n  twisted Alexander polynomial{}: {}\n",
        r.relators.join(", "),
        r.abelianization,
        r.dimension,
        r.column,
        r.generators[r.column],
        if r.exact { " (up to ±x^k)" } else { " (lowest terms, up to ±x^k)" },
        r.display
    )
}
