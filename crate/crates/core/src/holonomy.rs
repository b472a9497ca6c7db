//! From a monodromy to explicit representations: trace polynomials, the
//! trace system and its solutions, normal-form SL(2, C) matrices, the
//! meridian, the SO(3, 1) image, and the linear representations built on it
//! (adjoint on sl(4), the 9-dimensional complement v of so(3, 1), and the
//! tensor square on gl(4)).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{
    cint, cone, cs, czero, newton_multistart, CMatrix, CScalar, NewtonOptions, PolySystem, ScalarExt, Tolerances,
    RELATION_TOL,
};
use crate::words::{EndoF2, GroupRingElem, Letter, Word};

// ---------------------------------------------------------------------------
// Trace polynomials

/// Integer polynomial in A = tr a, B = tr b, C = tr ab. Keys are exponent
/// triples; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TracePoly(BTreeMap<[u32; 3], i64>);

impl TracePoly {
    pub fn constant(c: i64) -> Self {
        let mut p = TracePoly::default();
        p.add_term([0, 0, 0], c);
        p
    }

    /// The variable A (0), B (1) or C (2).
    pub fn var(i: usize) -> Self {
        let mut e = [0; 3];
        e[i] = 1;
        let mut p = TracePoly::default();
        p.add_term(e, 1);
        p
    }

    fn add_term(&mut self, e: [u32; 3], c: i64) {
        if c == 0 {
            return;
        }
        let v = self.0.entry(e).or_insert(0);
        *v += c;
        if *v == 0 {
            self.0.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ([u32; 3], i64)> + '_ {
        self.0.iter().map(|(&e, &c)| (e, c))
    }

    pub fn add(&self, o: &TracePoly) -> TracePoly {
        let mut p = self.clone();
        for (e, c) in o.terms() {
            p.add_term(e, c);
        }
        p
    }

    pub fn sub(&self, o: &TracePoly) -> TracePoly {
        let mut p = self.clone();
        for (e, c) in o.terms() {
            p.add_term(e, -c);
        }
        p
    }

    pub fn mul(&self, o: &TracePoly) -> TracePoly {
        let mut p = TracePoly::default();
        for (e, c) in self.terms() {
            for (f, d) in o.terms() {
                p.add_term([e[0] + f[0], e[1] + f[1], e[2] + f[2]], c * d);
            }
        }
        p
    }

    pub fn partial(&self, var: usize) -> TracePoly {
        let mut p = TracePoly::default();
        for (mut e, c) in self.terms() {
            if e[var] > 0 {
                let k = e[var] as i64;
                e[var] -= 1;
                p.add_term(e, c * k);
            }
        }
        p
    }

    pub fn eval(&self, x: &[CScalar]) -> CScalar {
        let mut acc = czero();
        for (e, c) in self.terms() {
            let mut t = cint(c);
            for (v, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t *= x[v];
                }
            }
            acc += t;
        }
        acc
    }
}

impl fmt::Display for TracePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.0.iter().rev() {
            let mono: String = ["A", "B", "C"]
                .iter()
                .zip(e)
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| if k == 1 { v.to_string() } else { format!("{v}^{k}") })
                .collect();
            let mag = c.abs();
            if first {
                if *c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if *c < 0 { '-' } else { '+' })?;
            }
            first = false;
            if mono.is_empty() || mag != 1 {
                write!(f, "{mag}")?;
            }
            write!(f, "{mono}")?;
        }
        Ok(())
    }
}

fn chebyshev(n: usize, x: &TracePoly) -> TracePoly {
    let (mut prev, mut cur) = (TracePoly::constant(2), x.clone());
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        let next = x.mul(&cur).sub(&prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// Memoised trace reduction on cyclic words.
#[derive(Default)]
struct TraceReducer {
    memo: HashMap<Vec<Letter>, TracePoly>,
}

fn cyclic_reduce(w: Vec<Letter>) -> Vec<Letter> {
    Word::from_letters(w).cyclically_reduced().letters().to_vec()
}

fn rotate(w: &[Letter], k: usize) -> Vec<Letter> {
    w[k..].iter().chain(&w[..k]).copied().collect()
}

/// Least rotation of the word or of its inverse; trace is invariant under both.
fn canonical(w: &[Letter]) -> Vec<Letter> {
    let inv: Vec<Letter> = w.iter().rev().map(|l| l.inv()).collect();
    (0..w.len()).flat_map(|k| [rotate(w, k), rotate(&inv, k)]).min().unwrap_or_default()
}

impl TraceReducer {
    fn trace(&mut self, w: Vec<Letter>) -> TracePoly {
        let w = cyclic_reduce(w);
        if w.is_empty() {
            return TracePoly::constant(2);
        }
        let key = canonical(&w);
        if let Some(p) = self.memo.get(&key) {
            return p.clone();
        }
        let p = self.compute(key.clone());
        self.memo.insert(key, p.clone());
        p
    }

    fn compute(&mut self, w: Vec<Letter>) -> TracePoly {
        let n = w.len();
        if w.iter().all(|l| l.gen == w[0].gen) {
            return chebyshev(n, &TracePoly::var(w[0].gen));
        }
        // Rotate to a syllable boundary.
        let start = (0..n).find(|&i| w[(i + n - 1) % n] != w[i]).expect("two generators present");
        let w = rotate(&w, start);
        // A syllable g^k with k >= 2: tr(g·Y) = tr g · tr Y - tr(g⁻¹·Y).
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && w[j + 1] == w[i] {
                j += 1;
            }
            if j > i {
                let g = w[i];
                let rest = rotate(&w, i);
                let y: Vec<Letter> = rest[1..].to_vec();
                let y2: Vec<Letter> = rest[2..].to_vec();
                let tg = TracePoly::var(g.gen);
                return tg.mul(&self.trace(y)).sub(&self.trace(y2));
            }
            i = j + 1;
        }
        // All syllables are single letters. A letter occurring twice:
        // w = gUgV, tr w = tr(gU) tr(gV) - tr(UV⁻¹).
        for i in 0..n {
            for j in i + 1..n {
                if w[i] == w[j] {
                    let r = rotate(&w, i);
                    let k = j - i;
                    let gu = r[..k].to_vec();
                    let gv = r[k..].to_vec();
                    let u = &r[1..k];
                    let v = &r[k + 1..];
                    let uv: Vec<Letter> = u.iter().copied().chain(v.iter().rev().map(|l| l.inv())).collect();
                    return self.trace(gu).mul(&self.trace(gv)).sub(&self.trace(uv));
                }
            }
        }
        let (a, b, c) = (TracePoly::var(0), TracePoly::var(1), TracePoly::var(2));
        match n {
            2 => {
                if w[0].inverse == w[1].inverse {
                    c
                } else {
                    a.mul(&b).sub(&c)
                }
            }
            // a^±1 b^±1 a^∓1 b^∓1: a commutator.
            4 => a.mul(&a).add(&b.mul(&b)).add(&c.mul(&c)).sub(&a.mul(&b).mul(&c)).sub(&TracePoly::constant(2)),
            _ => unreachable!("cyclically reduced word with distinct letters has length 2 or 4"),
        }
    }
}

/// tr ρ(w) as a polynomial in tr a, tr b, tr ab, for w in F(a, b).
pub fn trace_polynomial(w: &Word) -> Result<TracePoly> {
    if let Some(g) = w.max_gen().filter(|&g| g > 1) {
        return Err(Error::UnknownGenerator(g));
    }
    Ok(TraceReducer::default().trace(w.letters().to_vec()))
}

// ---------------------------------------------------------------------------
// The trace system

/// tr φ(a) = A, tr φ(b) = B, and the once-punctured-torus condition
/// A² + B² + C² = ABC (parabolic commutator, trace -2).
#[derive(Clone, Debug)]
pub struct TraceSystem {
    equations: [TracePoly; 3],
    jacobian: Vec<Vec<TracePoly>>,
}

impl TraceSystem {
    pub fn equations(&self) -> &[TracePoly; 3] {
        &self.equations
    }
}

pub fn trace_system(phi: &EndoF2) -> Result<TraceSystem> {
    let a = TracePoly::var(0);
    let b = TracePoly::var(1);
    let c = TracePoly::var(2);
    let markov = a.mul(&a).add(&b.mul(&b)).add(&c.mul(&c)).sub(&a.mul(&b).mul(&c));
    let equations = [trace_polynomial(phi.image(0))?.sub(&a), trace_polynomial(phi.image(1))?.sub(&b), markov];
    let jacobian = equations.iter().map(|e| (0..3).map(|v| e.partial(v)).collect()).collect();
    Ok(TraceSystem { equations, jacobian })
}

impl PolySystem for TraceSystem {
    fn dim(&self) -> usize {
        3
    }

    fn residual(&self, x: &[CScalar]) -> Vec<CScalar> {
        self.equations.iter().map(|e| e.eval(x)).collect()
    }

    fn jacobian(&self, x: &[CScalar]) -> CMatrix {
        CMatrix::from_fn(3, 3, |i, j| self.jacobian[i][j].eval(x))
    }
}

/// (tr a, tr b, tr ab)
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceTriple {
    pub a: CScalar,
    pub b: CScalar,
    pub c: CScalar,
}

impl TraceTriple {
    pub fn new(a: CScalar, b: CScalar, c: CScalar) -> Self {
        TraceTriple { a, b, c }
    }

    pub fn as_vec(&self) -> Vec<CScalar> {
        vec![self.a, self.b, self.c]
    }

    pub fn pairs(&self) -> [[f64; 2]; 3] {
        [self.a.pair(), self.b.pair(), self.c.pair()]
    }

    fn conj(&self) -> Self {
        TraceTriple::new(self.a.conj(), self.b.conj(), self.c.conj())
    }

    /// The sign changes (A, B, C) -> (εA, δB, εδC), i.e. twisting by a
    /// character F2 -> {±1}, composed optionally with complex conjugation.
    fn variants(&self) -> Vec<TraceTriple> {
        let mut out = Vec::with_capacity(8);
        for base in [*self, self.conj()] {
            for (ea, eb) in [(1, 1), (-1, 1), (1, -1), (-1, -1)] {
                out.push(TraceTriple::new(base.a * cint(ea), base.b * cint(eb), base.c * cint(ea * eb)));
            }
        }
        out
    }

    fn key(&self) -> [i64; 6] {
        let q = |x: f64| (x * 1e6).round() as i64;
        [
            q(self.a.re_f64()),
            q(self.b.re_f64()),
            q(self.c.re_f64()),
            q(self.a.im_f64()),
            q(self.b.im_f64()),
            q(self.c.im_f64()),
        ]
    }

    fn max_dist(&self, o: &TraceTriple) -> f64 {
        [(self.a - o.a), (self.b - o.b), (self.c - o.c)].iter().map(|z| z.abs_f64()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub starts: usize,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { starts: 64, seed: 0 }
    }
}

/// Solve the trace system and keep the non-real solutions with tr ab ≠ 0.
///
/// Sign twists and complex conjugation give equivalent representations, so
/// each class is reported once, by a fixed representative among the members
/// that actually solve the system.
pub fn solve_traces(phi: &EndoF2, opts: &SolveOptions) -> Result<Vec<TraceTriple>> {
    let sys = trace_system(phi)?;
    let newton = NewtonOptions { starts: opts.starts, seed: opts.seed, ..Default::default() };
    let roots = newton_multistart(&sys, &newton)?;
    let residual_ok = |t: &TraceTriple| {
        sys.residual(&t.as_vec()).iter().map(|z| z.abs_f64()).fold(0.0, f64::max) <= newton.residual_tol
    };
    let mut reps: Vec<TraceTriple> = Vec::new();
    for r in roots {
        let t = TraceTriple::new(r[0], r[1], r[2]);
        let nonreal = [t.a, t.b, t.c].iter().any(|z| z.im_f64().abs() > 1e-6);
        if !nonreal || t.c.abs_f64() < 1e-8 {
            continue;
        }
        let rep = t
            .variants()
            .into_iter()
            .filter(residual_ok)
            .max_by_key(|v| v.key())
            .expect("the triple itself solves the system");
        if !reps.iter().any(|q| q.max_dist(&rep) <= newton.dedupe) {
            reps.push(rep);
        }
    }
    if reps.is_empty() {
        return Err(Error::NoSolution);
    }
    reps.sort_by_key(|t| std::cmp::Reverse(t.key()));
    Ok(reps)
}

// ---------------------------------------------------------------------------
// SL(2, C)

/// Normal form realising a trace triple with tr ab ≠ 0:
/// a = [[AC - B, A/C], [AC, B]] / C, b = [[BC - A, -B/C], [-BC, A]] / C.
pub fn maclachlan_reid(t: &TraceTriple) -> Result<(CMatrix, CMatrix)> {
    if t.c.abs_f64() < 1e-12 {
        return Err(Error::DegenerateTrace);
    }
    let (a, b, c) = (t.a, t.b, t.c);
    let ic = cone() / c;
    let ma = CMatrix::from_fn(2, 2, |i, j| {
        ic * match (i, j) {
            (0, 0) => a * c - b,
            (0, 1) => a / c,
            (1, 0) => a * c,
            _ => b,
        }
    });
    let mb = CMatrix::from_fn(2, 2, |i, j| {
        ic * match (i, j) {
            (0, 0) => b * c - a,
            (0, 1) => -b / c,
            (1, 0) => -b * c,
            _ => a,
        }
    });
    Ok((ma, mb))
}

fn sl2_inverse(m: &CMatrix) -> CMatrix {
    CMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => m[(1, 1)],
        (1, 1) => m[(0, 0)],
        _ => -m[(i, j)],
    })
}

fn eval_word(w: &Word, mats: &[CMatrix], invs: &[CMatrix]) -> CMatrix {
    let n = mats[0].rows();
    w.letters().iter().fold(CMatrix::identity(n), |acc, l| &acc * if l.inverse { &invs[l.gen] } else { &mats[l.gen] })
}

/// The matrix X with X g X⁻¹ = ρ(φ(g)) for g = a, b, det X = 1, signed so its
/// trace is nearest -2.
pub fn solve_meridian(a: &CMatrix, b: &CMatrix, phi: &EndoF2, tol_null: f64) -> Result<CMatrix> {
    let mats = [a.clone(), b.clone()];
    let invs = [sl2_inverse(a), sl2_inverse(b)];
    let mut sys = CMatrix::zeros(8, 4);
    for (g, m) in mats.iter().enumerate() {
        let n = eval_word(phi.image(g), &mats, &invs);
        // (X m - n X)_{ij}, unknowns x_{kl} at index 2k + l.
        for i in 0..2 {
            for j in 0..2 {
                let row = 4 * g + 2 * i + j;
                for k in 0..2 {
                    sys[(row, 2 * i + k)] += m[(k, j)];
                    sys[(row, 2 * k + j)] -= n[(i, k)];
                }
            }
        }
    }
    let kernel = sys.nullspace(tol_null);
    if kernel.cols() != 1 {
        return Err(Error::MeridianNullity(kernel.cols()));
    }
    let mut x = CMatrix::from_fn(2, 2, |i, j| kernel[(2 * i + j, 0)]);
    let d = x.det();
    if d.abs_f64() < 1e-20 {
        return Err(Error::MeridianNullity(0));
    }
    x = x.scale(cone() / d.sqrt_principal());
    let tr = x.trace();
    if (tr + cint(2)).abs_f64() > (tr - cint(2)).abs_f64() {
        x = x.scale(-cone());
    }
    Ok(x)
}

/// ρ(a), ρ(b), ρ(x) in SL(2, C).
#[derive(Clone, Debug, PartialEq)]
pub struct Rep2 {
    pub a: CMatrix,
    pub b: CMatrix,
    pub x: CMatrix,
}

impl Rep2 {
    pub fn generators(&self) -> [CMatrix; 3] {
        [self.a.clone(), self.b.clone(), self.x.clone()]
    }

    pub fn det_residual(&self) -> f64 {
        [&self.a, &self.b, &self.x].iter().map(|m| (m.det() - cone()).abs_f64()).fold(0.0, f64::max)
    }

    /// Largest ‖X g X⁻¹ ∓ ρ(φ(g))‖, allowing the sign ambiguity of PSL.
    pub fn relation_residual(&self, phi: &EndoF2) -> f64 {
        let mats = [self.a.clone(), self.b.clone()];
        let invs = [sl2_inverse(&self.a), sl2_inverse(&self.b)];
        let xi = sl2_inverse(&self.x);
        (0..2)
            .map(|g| {
                let lhs = &(&self.x * &mats[g]) * &xi;
                let rhs = eval_word(phi.image(g), &mats, &invs);
                lhs.dist(&rhs).min((&lhs + &rhs).norm_max())
            })
            .fold(0.0, f64::max)
    }
}

// ---------------------------------------------------------------------------
// SO(3, 1)

/// The Lorentz form diag(1, 1, 1, -1).
pub fn lorentz_form() -> CMatrix {
    CMatrix::from_fn(4, 4, |i, j| {
        if i != j {
            czero()
        } else if i == 3 {
            cint(-1)
        } else {
            cone()
        }
    })
}

/// Hermitian basis: [[0, -i], [i, 0]], [[0, 1], [1, 0]], diag(-1, 1), I.
fn hermitian_basis() -> [CMatrix; 4] {
    let i = cs(0.0, 1.0);
    [
        CMatrix::from_fn(2, 2, |r, c| match (r, c) {
            (0, 1) => -i,
            (1, 0) => i,
            _ => czero(),
        }),
        CMatrix::from_fn(2, 2, |r, c| if r != c { cone() } else { czero() }),
        CMatrix::from_fn(2, 2, |r, c| match (r, c) {
            (0, 0) => cint(-1),
            (1, 1) => cone(),
            _ => czero(),
        }),
        CMatrix::identity(2),
    ]
}

fn hermitian_coords(h: &CMatrix) -> [CScalar; 4] {
    let half = cs(0.5, 0.0);
    let re = |z: CScalar| CScalar::new(z.re, czero().re);
    [
        re(CScalar::new(-h[(0, 1)].im, czero().re)),
        re(h[(0, 1)]),
        re((h[(1, 1)] - h[(0, 0)]) * half),
        re((h[(0, 0)] + h[(1, 1)]) * half),
    ]
}

/// SL(2, C) -> SO(3, 1) through the action H ↦ M H M* on 2×2 Hermitian
/// matrices, whose determinant is the Lorentz form.
pub fn to_so31(m: &CMatrix) -> CMatrix {
    let basis = hermitian_basis();
    let ms = m.adjoint();
    let mut out = CMatrix::zeros(4, 4);
    for (k, h) in basis.iter().enumerate() {
        let img = &(m * h) * &ms;
        for (r, v) in hermitian_coords(&img).into_iter().enumerate() {
            out[(r, k)] = v;
        }
    }
    out
}

/// ρ(a), ρ(b), ρ(x) in SO(3, 1).
#[derive(Clone, Debug, PartialEq)]
pub struct Rep4 {
    pub a: CMatrix,
    pub b: CMatrix,
    pub x: CMatrix,
}

impl Rep4 {
    pub fn from_rep2(r: &Rep2) -> Self {
        Rep4 { a: to_so31(&r.a), b: to_so31(&r.b), x: to_so31(&r.x) }
    }

    pub fn generators(&self) -> [CMatrix; 3] {
        [self.a.clone(), self.b.clone(), self.x.clone()]
    }

    /// g⁻¹ = J gᵀ J, exact for Lorentz matrices.
    pub fn inverses(&self) -> [CMatrix; 3] {
        let j = lorentz_form();
        self.generators().map(|g| &(&j * &g.transpose()) * &j)
    }

    pub fn lorentz_residual(&self) -> f64 {
        let j = lorentz_form();
        self.generators().iter().map(|g| (&(&g.transpose() * &j) * g).dist(&j)).fold(0.0, f64::max)
    }

    pub fn det_residual(&self) -> f64 {
        self.generators().iter().map(|g| (g.det() - cone()).abs_f64()).fold(0.0, f64::max)
    }

    /// Largest imaginary part among the entries; SO(3, 1) matrices are real.
    pub fn imaginary_residual(&self) -> f64 {
        self.generators()
            .iter()
            .flat_map(|g| (0..4).flat_map(move |i| (0..4).map(move |j| g[(i, j)].im_f64().abs())))
            .fold(0.0, f64::max)
    }

    pub fn relation_residual(&self, phi: &EndoF2) -> f64 {
        self.as_linear(RepLabel::So31).relation_residual(phi)
    }

    pub fn as_linear(&self, label: RepLabel) -> LinearRepN {
        LinearRepN::new(label, self.generators().to_vec(), self.inverses().to_vec())
    }
}

// ---------------------------------------------------------------------------
// Linear representations of the bundle group

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepLabel {
    /// Adjoint action on sl(4), dimension 15.
    Sl4,
    /// Adjoint action restricted to the Killing complement of so(3, 1), dimension 9.
    V,
    /// Adjoint action on so(3, 1), dimension 6.
    Pso,
    /// g ⊗ g on gl(4) = C^4 ⊗ C^4, dimension 16.
    Gl16,
    /// The defining 4-dimensional representation.
    So31,
    /// Anything supplied from outside.
    Custom,
}

impl RepLabel {
    pub fn name(self) -> &'static str {
        match self {
            RepLabel::Sl4 => "sl4",
            RepLabel::V => "v",
            RepLabel::Pso => "pso",
            RepLabel::Gl16 => "gl16",
            RepLabel::So31 => "so31",
            RepLabel::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "sl4" => RepLabel::Sl4,
            "v" => RepLabel::V,
            "pso" => RepLabel::Pso,
            "gl16" => RepLabel::Gl16,
            "so31" => RepLabel::So31,
            _ => return None,
        })
    }
}

/// Matrices for each generator, with their inverses.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearRepN {
    pub label: RepLabel,
    mats: Vec<CMatrix>,
    invs: Vec<CMatrix>,
}

impl LinearRepN {
    pub fn new(label: RepLabel, mats: Vec<CMatrix>, invs: Vec<CMatrix>) -> Self {
        assert_eq!(mats.len(), invs.len());
        LinearRepN { label, mats, invs }
    }

    /// Inverses computed by LU.
    pub fn from_matrices(label: RepLabel, mats: Vec<CMatrix>) -> Result<Self> {
        let invs = mats.iter().map(|m| m.inverse()).collect::<Result<Vec<_>>>()?;
        Ok(LinearRepN { label, mats, invs })
    }

    pub fn dim(&self) -> usize {
        self.mats[0].rows()
    }

    pub fn generator_count(&self) -> usize {
        self.mats.len()
    }

    pub fn matrix(&self, gen: usize) -> &CMatrix {
        &self.mats[gen]
    }

    pub fn inverse(&self, gen: usize) -> &CMatrix {
        &self.invs[gen]
    }

    pub fn word_matrix(&self, w: &Word) -> CMatrix {
        eval_word(w, &self.mats, &self.invs)
    }

    /// Linear extension to the group ring.
    pub fn ring_matrix(&self, e: &GroupRingElem) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for (w, c) in e.terms() {
            out = &out + &self.word_matrix(w).scale(cint(c));
        }
        out
    }

    /// Largest ‖ρ(x) ρ(g) ρ(x)⁻¹ - ρ(φ(g))‖ over g = a, b (generator 2 is x).
    pub fn relation_residual(&self, phi: &EndoF2) -> f64 {
        (0..2)
            .map(|g| {
                let lhs = &(&self.mats[2] * &self.mats[g]) * &self.invs[2];
                lhs.dist(&self.word_matrix(phi.image(g)))
            })
            .fold(0.0, f64::max)
    }

    /// Conjugate by an orthonormal basis of an invariant subspace.
    pub fn restrict(&self, label: RepLabel, basis: &CMatrix) -> LinearRepN {
        let bh = basis.adjoint();
        let squeeze = |m: &CMatrix| &(&bh * m) * basis;
        LinearRepN {
            label,
            mats: self.mats.iter().map(squeeze).collect(),
            invs: self.invs.iter().map(squeeze).collect(),
        }
    }

    /// Worst ‖M B - B (Bᴴ M B)‖ over generators: zero iff span B is invariant.
    pub fn invariance_leak(&self, basis: &CMatrix) -> f64 {
        let bh = basis.adjoint();
        self.mats
            .iter()
            .map(|m| {
                let mb = m * basis;
                mb.dist(&(basis * &(&bh * &mb)))
            })
            .fold(0.0, f64::max)
    }
}

/// Basis of sl(4): E_ij (i ≠ j, row-major), then diag(1,-1,0,0),
/// diag(0,1,-1,0), diag(0,0,1,-1).
pub fn sl4_basis() -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(15);
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                let mut m = CMatrix::zeros(4, 4);
                m[(i, j)] = cone();
                out.push(m);
            }
        }
    }
    for k in 0..3 {
        let mut m = CMatrix::zeros(4, 4);
        m[(k, k)] = cone();
        m[(k + 1, k + 1)] = cint(-1);
        out.push(m);
    }
    out
}

/// Coordinates of a traceless 4×4 matrix in [`sl4_basis`].
pub fn sl4_coords(x: &CMatrix) -> Vec<CScalar> {
    let mut out = Vec::with_capacity(15);
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                out.push(x[(i, j)]);
            }
        }
    }
    let d1 = x[(0, 0)];
    let d2 = d1 + x[(1, 1)];
    let d3 = d2 + x[(2, 2)];
    out.extend([d1, d2, d3]);
    out
}

fn adjoint_matrix(g: &CMatrix, gi: &CMatrix, basis: &[CMatrix]) -> CMatrix {
    let mut out = CMatrix::zeros(15, 15);
    for (k, e) in basis.iter().enumerate() {
        let img = &(g * e) * gi;
        for (r, v) in sl4_coords(&img).into_iter().enumerate() {
            out[(r, k)] = v;
        }
    }
    out
}

/// Ad ∘ ρ on sl(4).
pub fn adjoint_rep(r: &Rep4) -> LinearRepN {
    let basis = sl4_basis();
    let gens = r.generators();
    let invs = r.inverses();
    let mats = gens.iter().zip(&invs).map(|(g, gi)| adjoint_matrix(g, gi, &basis)).collect();
    let imats = gens.iter().zip(&invs).map(|(g, gi)| adjoint_matrix(gi, g, &basis)).collect();
    LinearRepN::new(RepLabel::Sl4, mats, imats)
}

/// sl(4) = so(3, 1) ⊕ v, with v the orthogonal complement of so(3, 1) under
/// the trace form. Returns orthonormal bases (in sl(4) coordinates) of the
/// two summands: 15×6 and 15×9.
pub fn killing_split(tol_null: f64) -> Result<(CMatrix, CMatrix)> {
    let basis = sl4_basis();
    let j = lorentz_form();
    let mut cond = CMatrix::zeros(16, 15);
    for (k, e) in basis.iter().enumerate() {
        let s = &(&e.transpose() * &j) + &(&j * e);
        for r in 0..16 {
            cond[(r, k)] = s[(r / 4, r % 4)];
        }
    }
    let pso = cond.nullspace(tol_null);
    if pso.cols() != 6 {
        return Err(Error::Dimension { what: "so(3,1) inside sl(4)".into(), expected: 6, found: pso.cols() });
    }
    let gram = CMatrix::from_fn(15, 15, |a, b| (&basis[a] * &basis[b]).trace());
    let v = (&pso.transpose() * &gram).nullspace(tol_null);
    if v.cols() != 9 {
        return Err(Error::Dimension { what: "Killing complement v".into(), expected: 9, found: v.cols() });
    }
    Ok((pso, v))
}

/// g ⊗ g on C^4 ⊗ C^4.
pub fn kronecker_rep(r: &Rep4) -> LinearRepN {
    let gens = r.generators();
    let invs = r.inverses();
    LinearRepN::new(RepLabel::Gl16, gens.iter().map(|g| g.kron(g)).collect(), invs.iter().map(|g| g.kron(g)).collect())
}

/// The adjoint representation together with its two invariant summands.
#[derive(Clone, Debug)]
pub struct AdjointFamily {
    pub sl4: LinearRepN,
    pub pso: LinearRepN,
    pub v: LinearRepN,
    pub pso_basis: CMatrix,
    pub v_basis: CMatrix,
    /// Worst invariance leak of either summand.
    pub split_leak: f64,
}

pub fn adjoint_family(r: &Rep4, tol: &Tolerances) -> Result<AdjointFamily> {
    let sl4 = adjoint_rep(r);
    let (pso_basis, v_basis) = killing_split(tol.null)?;
    let split_leak = sl4.invariance_leak(&pso_basis).max(sl4.invariance_leak(&v_basis));
    if split_leak > RELATION_TOL {
        return Err(Error::InvariantLeak(split_leak));
    }
    let pso = sl4.restrict(RepLabel::Pso, &pso_basis);
    let v = sl4.restrict(RepLabel::V, &v_basis);
    Ok(AdjointFamily { sl4, pso, v, pso_basis, v_basis, split_leak })
}

// ---------------------------------------------------------------------------
// Assembled holonomy

#[derive(Clone, Debug)]
pub struct HolonomyDiagnostics {
    pub sl2_det_residual: Option<f64>,
    pub sl2_relation_residual: Option<f64>,
    pub lorentz_residual: f64,
    pub so31_det_residual: f64,
    pub so31_relation_residual: f64,
    pub meridian_trace: Option<CScalar>,
    pub longitude_trace: Option<CScalar>,
    /// Meridian and longitude both parabolic.
    pub geometric_candidate: bool,
}

#[derive(Clone, Debug)]
pub struct Holonomy {
    pub triple: Option<TraceTriple>,
    pub rep2: Option<Rep2>,
    pub rep4: Rep4,
    pub diagnostics: HolonomyDiagnostics,
}

fn is_parabolic_trace(t: CScalar) -> bool {
    (t - cint(2)).abs_f64() < 1e-6 || (t + cint(2)).abs_f64() < 1e-6
}

/// Normal form, meridian, SO(3, 1) image and checks, from a trace triple.
pub fn holonomy_from_triple(phi: &EndoF2, t: &TraceTriple, tol: &Tolerances) -> Result<Holonomy> {
    let (a, b) = maclachlan_reid(t)?;
    let x = solve_meridian(&a, &b, phi, tol.null)?;
    holonomy_from_sl2(phi, Rep2 { a, b, x }, Some(*t))
}

pub fn holonomy_from_sl2(phi: &EndoF2, rep2: Rep2, triple: Option<TraceTriple>) -> Result<Holonomy> {
    let det = rep2.det_residual();
    if det > RELATION_TOL {
        return Err(Error::Residual { what: "SL(2,C) determinant".into(), residual: det });
    }
    let rel = rep2.relation_residual(phi);
    if rel > RELATION_TOL {
        return Err(Error::Residual { what: "SL(2,C) bundle relations".into(), residual: rel });
    }
    let rep4 = Rep4::from_rep2(&rep2);
    let mut h = holonomy_from_so31(phi, rep4)?;
    let l = &(&(&rep2.a * &rep2.b) * &sl2_inverse(&rep2.a)) * &sl2_inverse(&rep2.b);
    let mt = rep2.x.trace();
    let lt = l.trace();
    h.diagnostics.sl2_det_residual = Some(det);
    h.diagnostics.sl2_relation_residual = Some(rel);
    h.diagnostics.meridian_trace = Some(mt);
    h.diagnostics.longitude_trace = Some(lt);
    h.diagnostics.geometric_candidate = is_parabolic_trace(mt) && is_parabolic_trace(lt);
    h.triple = triple;
    h.rep2 = Some(rep2);
    Ok(h)
}

/// Checks for SO(3, 1) matrices supplied directly.
pub fn holonomy_from_so31(phi: &EndoF2, rep4: Rep4) -> Result<Holonomy> {
    let lorentz = rep4.lorentz_residual();
    if lorentz > RELATION_TOL {
        return Err(Error::Residual { what: "Lorentz form".into(), residual: lorentz });
    }
    let det = rep4.det_residual();
    if det > RELATION_TOL {
        return Err(Error::Residual { what: "SO(3,1) determinant".into(), residual: det });
    }
    let rel = rep4.relation_residual(phi);
    if rel > RELATION_TOL {
        return Err(Error::Residual { what: "SO(3,1) bundle relations".into(), residual: rel });
    }
    let lin = rep4.as_linear(RepLabel::So31);
    let l = lin.word_matrix(&crate::words::longitude());
    // In SO(3, 1) a parabolic element has trace 4 = |±2|².
    let parabolic4 = |m: &CMatrix| (m.trace() - cint(4)).abs_f64() < 1e-6;
    let geometric = parabolic4(&rep4.x) && parabolic4(&l);
    Ok(Holonomy {
        triple: None,
        rep2: None,
        rep4,
        diagnostics: HolonomyDiagnostics {
            sl2_det_residual: None,
            sl2_relation_residual: None,
            lorentz_residual: lorentz,
            so31_det_residual: det,
            so31_relation_residual: rel,
            meridian_trace: None,
            longitude_trace: None,
            geometric_candidate: geometric,
        },
    })
}

/// Explicit holonomy matrices for a, b, x, in either model, bypassing the
/// trace solver. Entries are `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolonomyFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sl2: Option<Vec<Vec<Vec<[f64; 2]>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub so31: Option<Vec<Vec<Vec<[f64; 2]>>>>,
}

impl HolonomyFile {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn holonomy(&self, phi: &EndoF2) -> Result<Holonomy> {
        let read = |mats: &Vec<Vec<Vec<[f64; 2]>>>, n: usize| -> Result<[CMatrix; 3]> {
            if mats.len() != 3 {
                return Err(Error::Representation(format!("expected 3 matrices (a, b, x), found {}", mats.len())));
            }
            let ms = mats.iter().map(|m| CMatrix::from_pairs(m)).collect::<Result<Vec<_>>>()?;
            if ms.iter().any(|m| m.rows() != n || m.cols() != n) {
                return Err(Error::Representation(format!("matrices must be {n}x{n}")));
            }
            Ok([ms[0].clone(), ms[1].clone(), ms[2].clone()])
        };
        // Supplied matrices that fail their checks are bad input, not a numerical failure.
        let supplied = |e: Error| match e {
            Error::Residual { what, residual } => {
                Error::Representation(format!("{what}: residual {residual:.3e} exceeds tolerance"))
            }
            e => e,
        };
        match (&self.sl2, &self.so31) {
            (Some(m), None) => {
                let [a, b, x] = read(m, 2)?;
                let t = TraceTriple::new(a.trace(), b.trace(), (&a * &b).trace());
                holonomy_from_sl2(phi, Rep2 { a, b, x }, Some(t)).map_err(supplied)
            }
            (None, Some(m)) => {
                let [a, b, x] = read(m, 4)?;
                holonomy_from_so31(phi, Rep4 { a, b, x }).map_err(supplied)
            }
            _ => Err(Error::Representation("holonomy file needs exactly one of \"sl2\" or \"so31\"".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::MonodromySpec;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn phi(s: &str) -> EndoF2 {
        MonodromySpec::parse(s).unwrap().endomorphism()
    }

    #[test]
    fn trace_of_ab_squared() {
        assert_eq!(trace_polynomial(&w("abb")).unwrap().to_string(), "-A + BC");
    }

    #[test]
    fn trace_of_commutator() {
        let p = trace_polynomial(&w("abAB")).unwrap();
        assert_eq!(p.to_string(), "A^2 - ABC + B^2 + C^2 - 2");
        assert_eq!(trace_polynomial(&w("aBAb")).unwrap(), p);
    }

    #[test]
    fn trace_small_words() {
        assert_eq!(trace_polynomial(&w("")).unwrap(), TracePoly::constant(2));
        assert_eq!(trace_polynomial(&w("AB")).unwrap(), TracePoly::var(2));
        assert_eq!(trace_polynomial(&w("aB")).unwrap().to_string(), "AB - C");
        assert_eq!(trace_polynomial(&w("a^3")).unwrap().to_string(), "A^3 - 3A");
        assert!(trace_polynomial(&w("ax")).is_err());
    }

    #[test]
    fn random_matrices_agree_with_trace_polynomials() {
        let m1 = CMatrix::from_fn(2, 2, |i, j| cs(0.3 + i as f64 - 0.7 * j as f64, 0.2 * (i + j) as f64 - 0.1));
        let m2 = CMatrix::from_fn(2, 2, |i, j| cs(1.1 - 0.4 * i as f64 + 0.9 * j as f64, 0.5 - 0.3 * j as f64));
        let normalise = |m: CMatrix| m.scale(cone() / m.det().sqrt_principal());
        let (a, b) = (normalise(m1), normalise(m2));
        let mats = [a.clone(), b.clone()];
        let invs = [sl2_inverse(&a), sl2_inverse(&b)];
        let x = [a.trace(), b.trace(), (&a * &b).trace()];
        for s in ["ab^2AB^3", "abAbaB", "a^2b^2a^-2b^3", "bab^2ab^2", "abAB abAB", "AbbaBa"] {
            let word = w(s);
            let direct = eval_word(&word, &mats, &invs).trace();
            let poly = trace_polynomial(&word).unwrap().eval(&x);
            assert!((direct - poly).abs_f64() < 1e-25, "{s}");
        }
    }

    #[test]
    fn llrr_trace_system_has_known_solution() {
        // B = -sqrt(2 - 2i), A = -sqrt(2) B / sqrt(B^2 - 2), C = -2 sqrt(2) / sqrt(B^2 - 2)
        let b = -cs(2.0, -2.0).sqrt_principal();
        let s2 = cs(2.0, 0.0).sqrt_principal();
        let r = (b * b - cint(2)).sqrt_principal();
        let t = TraceTriple::new(-s2 * b / r, b, -cint(2) * s2 / r);
        let sys = trace_system(&phi("LLRR")).unwrap();
        for e in sys.residual(&t.as_vec()) {
            assert!(e.abs_f64() < 1e-28);
        }
    }

    #[test]
    fn solved_triples_are_deduplicated_classes() {
        let sols = solve_traces(&phi("LLRR"), &SolveOptions::default()).unwrap();
        let sys = trace_system(&phi("LLRR")).unwrap();
        for s in &sols {
            assert!(sys.residual(&s.as_vec()).iter().all(|e| e.abs_f64() < 1e-10));
            assert!(s.c.abs_f64() > 1e-8);
        }
        for (i, s) in sols.iter().enumerate() {
            for t in &sols[i + 1..] {
                assert!(s.variants().iter().all(|v| v.max_dist(t) > 1e-6));
            }
        }
        let b = cs(-1.5537739740300374, 0.6435942529055826);
        assert!(sols.iter().any(|s| s.variants().iter().any(|v| (v.b - b).abs_f64() < 1e-9)));
    }

    #[test]
    fn normal_form_realises_triple() {
        let t = TraceTriple::new(cs(1.2, 0.3), cs(-0.4, 1.0), cs(0.0, 0.0));
        assert!(matches!(maclachlan_reid(&t), Err(Error::DegenerateTrace)));
        let sols = solve_traces(&phi("RRL"), &SolveOptions::default()).unwrap();
        for s in sols {
            let (a, b) = maclachlan_reid(&s).unwrap();
            assert!((a.det() - cone()).abs_f64() < 1e-25);
            assert!((b.det() - cone()).abs_f64() < 1e-25);
            assert!((a.trace() - s.a).abs_f64() < 1e-25);
            assert!((b.trace() - s.b).abs_f64() < 1e-25);
            assert!(((&a * &b).trace() - s.c).abs_f64() < 1e-25);
        }
    }

    fn llrr_reference_triple() -> TraceTriple {
        let b = -cs(2.0, -2.0).sqrt_principal();
        let s2 = cs(2.0, 0.0).sqrt_principal();
        let r = (b * b - cint(2)).sqrt_principal();
        TraceTriple::new(-s2 * b / r, b, -cint(2) * s2 / r)
    }

    #[test]
    fn llrr_meridian_and_so31_image() {
        let f = phi("LLRR");
        let h = holonomy_from_triple(&f, &llrr_reference_triple(), &Tolerances::default()).unwrap();
        let x = &h.rep2.as_ref().unwrap().x;
        let expect = CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) | (1, 1) => cint(-1),
            (0, 1) => cs(0.0, 1.0),
            _ => czero(),
        });
        assert!(x.dist(&expect) < 1e-25, "{x:?}");
        let x4 = CMatrix::from_real_rows(&[
            &[1.0, 0.0, 1.0, 1.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[-1.0, 0.0, 0.5, -0.5],
            &[1.0, 0.0, 0.5, 1.5],
        ]);
        assert!(h.rep4.x.dist(&x4) < 1e-25);
        assert!(h.diagnostics.geometric_candidate);
        assert!(h.diagnostics.lorentz_residual < 1e-25);
    }

    #[test]
    fn so31_trace_is_squared_modulus() {
        let m = CMatrix::from_fn(2, 2, |i, j| cs(0.4 + i as f64, 0.3 * j as f64 - 0.2));
        let m = m.scale(cone() / m.det().sqrt_principal());
        let t = m.trace().abs_f64();
        assert!((to_so31(&m).trace().re_f64() - t * t).abs() < 1e-25);
    }

    #[test]
    fn adjoint_and_split_dimensions() {
        let f = phi("LLRR");
        let h = holonomy_from_triple(&f, &llrr_reference_triple(), &Tolerances::default()).unwrap();
        let fam = adjoint_family(&h.rep4, &Tolerances::default()).unwrap();
        assert_eq!(fam.sl4.dim(), 15);
        assert_eq!(fam.pso.dim(), 6);
        assert_eq!(fam.v.dim(), 9);
        assert!(fam.split_leak < 1e-25);
        for rep in [&fam.sl4, &fam.pso, &fam.v] {
            assert!(rep.relation_residual(&f) < 1e-24, "{:?}", rep.label);
        }
        let k = kronecker_rep(&h.rep4);
        assert_eq!(k.dim(), 16);
        assert!(k.relation_residual(&f) < 1e-24);
    }

    #[test]
    fn sl4_coordinates_round_trip() {
        let basis = sl4_basis();
        for (k, e) in basis.iter().enumerate() {
            let c = sl4_coords(e);
            for (i, v) in c.iter().enumerate() {
                assert_eq!(*v, if i == k { cone() } else { czero() });
            }
        }
    }
}
