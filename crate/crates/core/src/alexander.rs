//! Wada's twisted Alexander polynomial, its torus-bundle form, and the
//! monodromy action on cocycles Z¹(F₂; 𝔤) ≅ 𝔤 × 𝔤.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::holonomy::{LinearRepN, RepLabel};
use crate::numeric::{char_poly, cone, CMatrix, LaurentPoly, PolyMatrix, ScalarExt, Tolerances, RELATION_TOL};
use crate::presentation::{validate_abelianization, AbelianizationMap, Presentation};
use crate::words::{fox_derivative, longitude, EndoF2, GroupRingElem, Word};

/// A representation together with the abelianization that supplies the
/// powers of the formal variable.
#[derive(Clone, Debug)]
pub struct RingRep {
    pub rep: LinearRepN,
    pub alpha: AbelianizationMap,
}

impl RingRep {
    pub fn new(mats: Vec<CMatrix>, alpha: AbelianizationMap) -> Result<Self> {
        if mats.is_empty() || mats.len() != alpha.0.len() {
            return Err(Error::Representation(format!(
                "{} matrices for {} abelianization weights",
                mats.len(),
                alpha.0.len()
            )));
        }
        let d = mats[0].rows();
        if mats.iter().any(|m| m.rows() != d || m.cols() != d) {
            return Err(Error::Representation("matrices must be square and of one size".into()));
        }
        let rep = LinearRepN::from_matrices(RepLabel::Custom, mats)
            .map_err(|_| Error::Representation("a generator matrix is singular".into()))?;
        Ok(RingRep { rep, alpha })
    }

    /// Every generator acts as the identity on C^dim.
    pub fn trivial(dim: usize, alpha: AbelianizationMap) -> Self {
        let mats = vec![CMatrix::identity(dim); alpha.0.len()];
        RingRep { rep: LinearRepN::new(RepLabel::Custom, mats.clone(), mats), alpha }
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }
}

/// Σ c_w · t^{α(w)} · ρ(w).
pub fn phi_map(e: &GroupRingElem, rep: &RingRep) -> Result<PolyMatrix> {
    let n = rep.dim();
    let mut terms: Vec<(i32, CMatrix)> = Vec::new();
    for (w, c) in e.terms() {
        if let Some(g) = w.max_gen().filter(|&g| g >= rep.rep.generator_count()) {
            return Err(Error::UnknownGenerator(g));
        }
        let exp = rep.alpha.weight(w) as i32;
        let m = rep.rep.word_matrix(w).scale(crate::numeric::cint(c));
        match terms.iter_mut().find(|(k, _)| *k == exp) {
            Some((_, acc)) => *acc = &*acc + &m,
            None => terms.push((exp, m)),
        }
    }
    Ok(PolyMatrix::from_terms(n, n, &terms))
}

/// Blocks Φ(∂r_i/∂a_j): one block row per relator, one block column per generator.
pub fn alexander_matrix(p: &Presentation, rep: &RingRep) -> Result<PolyMatrix> {
    let blocks = p
        .relators()
        .iter()
        .map(|r| (0..p.generator_count()).map(|j| phi_map(&fox_derivative(r, j), rep)).collect())
        .collect::<Result<Vec<Vec<PolyMatrix>>>>()?;
    Ok(PolyMatrix::from_blocks(&blocks))
}

/// det A_k / det Φ(1 - a_k), kept as a fraction when the division is not exact.
#[derive(Clone, Debug)]
pub struct WadaInvariant {
    pub numerator: LaurentPoly,
    pub denominator: LaurentPoly,
    /// Generator whose block column was removed.
    pub column: usize,
    /// Present when the denominator divides the numerator.
    pub quotient: Option<LaurentPoly>,
    /// Lowest-terms numerator and monic denominator (exponents from 0 in the
    /// denominator; the numerator carries any shift).
    pub reduced: (LaurentPoly, LaurentPoly),
}

fn check_relators(p: &Presentation, rep: &RingRep) -> Result<()> {
    let id = CMatrix::identity(rep.dim());
    for r in p.relators() {
        let res = rep.rep.word_matrix(r).dist(&id);
        if res > RELATION_TOL {
            return Err(Error::Representation(format!("relator {r} is not sent to the identity (residual {res:.3e})")));
        }
    }
    Ok(())
}

/// Wada's invariant, removing the first generator whose Φ(1 - a_k) has
/// nonzero determinant.
pub fn twisted_alexander(p: &Presentation, rep: &RingRep, tol: &Tolerances) -> Result<WadaInvariant> {
    prepare(p, rep)?;
    let one = GroupRingElem::one();
    for k in 0..p.generator_count() {
        let den = phi_map(&(&one - &GroupRingElem::from_word(Word::generator(k))), rep)?.det(tol.det)?;
        if den.norm_inf() > tol.det {
            return finish(p, rep, k, den, tol);
        }
    }
    Err(Error::Singular)
}

/// Same, with the removed column chosen by the caller.
pub fn twisted_alexander_with_column(
    p: &Presentation,
    rep: &RingRep,
    column: usize,
    tol: &Tolerances,
) -> Result<WadaInvariant> {
    prepare(p, rep)?;
    if column >= p.generator_count() {
        return Err(Error::UnknownGenerator(column));
    }
    let one = GroupRingElem::one();
    let den = phi_map(&(&one - &GroupRingElem::from_word(Word::generator(column))), rep)?.det(tol.det)?;
    if den.norm_inf() <= tol.det {
        return Err(Error::Singular);
    }
    finish(p, rep, column, den, tol)
}

fn prepare(p: &Presentation, rep: &RingRep) -> Result<()> {
    p.check_deficiency_one()?;
    validate_abelianization(p, &rep.alpha)?;
    if rep.rep.generator_count() != p.generator_count() {
        return Err(Error::Representation(format!(
            "{} matrices for {} generators",
            rep.rep.generator_count(),
            p.generator_count()
        )));
    }
    check_relators(p, rep)
}

fn finish(p: &Presentation, rep: &RingRep, k: usize, den: LaurentPoly, tol: &Tolerances) -> Result<WadaInvariant> {
    let l = rep.dim();
    let minor = alexander_matrix(p, rep)?;
    let keep: Vec<usize> = (0..minor.cols()).filter(|c| c / l != k).collect();
    let square = PolyMatrix::from_fn(minor.rows(), keep.len(), |i, j| minor.get(i, keep[j]));
    let num = square.det(tol.det)?;
    Ok(assemble(num, den, k, tol))
}

fn assemble(num: LaurentPoly, den: LaurentPoly, column: usize, tol: &Tolerances) -> WadaInvariant {
    let quotient = num.div_exact(&den, tol.det).ok();
    let reduced = match &quotient {
        Some(q) => (q.clone(), LaurentPoly::constant(cone())),
        None => reduce_fraction(&num, &den, tol.root),
    };
    WadaInvariant { numerator: num, denominator: den, column, quotient, reduced }
}

/// Cancel common roots. Roots of the denominator are located numerically
/// and removed from both sides when the numerator also vanishes there.
pub fn reduce_fraction(num: &LaurentPoly, den: &LaurentPoly, tol: f64) -> (LaurentPoly, LaurentPoly) {
    let shift = num.min_exp() - den.min_exp();
    let mut n = num.shift(-num.min_exp());
    let mut d = den.shift(-den.min_exp());
    for z in d.roots() {
        let (m, _, _) = n.root_multiplicity(z, tol);
        let (md, _, _) = d.root_multiplicity(z, tol);
        if m >= 1 && md >= 1 {
            n = n.deflate(z).0;
            d = d.deflate(z).0;
        }
    }
    let lead = cone() / d.leading();
    (n.scale(lead).shift(shift), d.scale(lead))
}

// ---------------------------------------------------------------------------
// Torus bundles

/// Numerator, denominator and quotient of the bundle's twisted Alexander
/// polynomial with the x-column removed.
#[derive(Clone, Debug)]
pub struct BundleWada {
    pub numerator: LaurentPoly,
    pub denominator: LaurentPoly,
    pub quotient: LaurentPoly,
}

/// det [Φ(∂φ(g)/∂h) - δ_gh · t ρ(x)] / det(I - t ρ(x)) for g, h ∈ {a, b}.
pub fn bundle_twisted_alexander(phi: &EndoF2, rep: &LinearRepN, tol: &Tolerances) -> Result<BundleWada> {
    let n = rep.dim();
    let x = rep.matrix(2);
    let mut blocks = Vec::with_capacity(2);
    for g in 0..2 {
        let mut row = Vec::with_capacity(2);
        for h in 0..2 {
            let base = rep.ring_matrix(&fox_derivative(phi.image(g), h));
            let mut terms = vec![(0, base)];
            if g == h {
                terms.push((1, -x));
            }
            row.push(PolyMatrix::from_terms(n, n, &terms));
        }
        blocks.push(row);
    }
    let numerator = PolyMatrix::from_blocks(&blocks).det(tol.det)?;
    let denominator = PolyMatrix::from_terms(n, n, &[(0, CMatrix::identity(n)), (1, -x)]).det(tol.det)?;
    let quotient = numerator.div_exact(&denominator, tol.det)?;
    Ok(BundleWada { numerator, denominator, quotient })
}

// ---------------------------------------------------------------------------
// The monodromy action on cocycles

/// f ↦ f(l) for the longitude l = aba⁻¹b⁻¹, as a map 𝔤 × 𝔤 → 𝔤:
/// [I - ρ(aba⁻¹) | ρ(a) - ρ(aba⁻¹b⁻¹)].
pub fn res_l_map(rep: &LinearRepN) -> CMatrix {
    let l = longitude();
    let parts: Vec<CMatrix> = (0..2).map(|h| rep.ring_matrix(&fox_derivative(&l, h))).collect();
    CMatrix::hstack(&[&parts[0], &parts[1]])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// (φf)(g) = x · f(x⁻¹ g x) = x · f(φ⁻¹(g))
    Forward,
    /// (φ⁻¹f)(g) = x⁻¹ · f(φ(g))
    Inverse,
}

#[derive(Clone, Debug)]
pub struct CocycleAction {
    pub direction: Direction,
    /// On 𝔤 × 𝔤, block (g, h) acting on f(h) to give the new f(g).
    pub full: CMatrix,
    /// Orthonormal basis of ker res_l.
    pub kernel: CMatrix,
    pub restricted: CMatrix,
    /// ‖M K - K (Kᴴ M K)‖: how far the action is from preserving the kernel.
    pub leak: f64,
}

impl CocycleAction {
    pub fn kernel_dim(&self) -> usize {
        self.kernel.cols()
    }

    /// Characteristic polynomial det(M - tI) on ker res_l.
    pub fn relative_char_poly(&self, tol: &Tolerances) -> Result<LaurentPoly> {
        char_poly(&self.restricted, tol.det)
    }
}

fn action_matrix(aut: &EndoF2, rep: &LinearRepN, x: &CMatrix) -> CMatrix {
    let n = rep.dim();
    let mut full = CMatrix::zeros(2 * n, 2 * n);
    for g in 0..2 {
        for h in 0..2 {
            let block = x * &rep.ring_matrix(&fox_derivative(aut.image(g), h));
            full.set_block(g * n, h * n, &block);
        }
    }
    full
}

pub fn monodromy_action(
    phi: &EndoF2,
    rep: &LinearRepN,
    direction: Direction,
    tol: &Tolerances,
) -> Result<CocycleAction> {
    let full = match direction {
        Direction::Forward => action_matrix(&phi.inverse()?, rep, rep.matrix(2)),
        Direction::Inverse => action_matrix(phi, rep, rep.inverse(2)),
    };
    let kernel = res_l_map(rep).nullspace(tol.null);
    let kh = kernel.adjoint();
    let mk = &full * &kernel;
    let restricted = &kh * &mk;
    let leak = mk.dist(&(&kernel * &restricted));
    if leak > RELATION_TOL {
        return Err(Error::InvariantLeak(leak));
    }
    Ok(CocycleAction { direction, full, kernel, restricted, leak })
}

/// The coboundaries X ↦ ((I - ρ(a))X, (I - ρ(b))X) inside 𝔤 × 𝔤.
pub fn coboundary_embedding(rep: &LinearRepN) -> CMatrix {
    let n = rep.dim();
    let id = CMatrix::identity(n);
    let a = &id - rep.matrix(0);
    let b = &id - rep.matrix(1);
    CMatrix::vstack(&[&a, &b])
}

/// ‖M B - B ρ(x)‖ for the forward action: on coboundaries the monodromy acts
/// as ρ(x).
pub fn coboundary_residual(action: &CocycleAction, rep: &LinearRepN) -> f64 {
    let b = coboundary_embedding(rep);
    let x = match action.direction {
        Direction::Forward => rep.matrix(2),
        Direction::Inverse => rep.inverse(2),
    };
    (&action.full * &b).dist(&(&b * x))
}

/// Result of comparing the bundle's twisted Alexander polynomial with
/// det(M - t) / det(ρ(x) - t) for the forward action M on 𝔤 × 𝔤.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteAgreement {
    pub matched: bool,
    /// The match needed t ↦ 1/t.
    pub reciprocal: bool,
    /// Largest coefficient difference after monic normalisation.
    pub distance: f64,
}

fn monic(p: &LaurentPoly) -> LaurentPoly {
    let p = p.shift(-p.min_exp());
    p.scale(cone() / p.leading())
}

fn coeff_distance(p: &LaurentPoly, q: &LaurentPoly) -> f64 {
    if p.span() != q.span() {
        return f64::INFINITY;
    }
    let scale = p.norm_inf().max(1.0);
    p.coeffs().iter().zip(q.coeffs()).map(|(a, b)| (*a - *b).abs_f64()).fold(0.0, f64::max) / scale
}

pub fn wada_action_agreement(phi: &EndoF2, rep: &LinearRepN, tol: &Tolerances) -> Result<RouteAgreement> {
    let wada = bundle_twisted_alexander(phi, rep, tol)?;
    let action = monodromy_action(phi, rep, Direction::Forward, tol)?;
    let big = char_poly(&action.full, tol.det)?;
    let small = char_poly(rep.matrix(2), tol.det)?;
    let ratio = big.div_exact(&small, tol.det)?;
    let w = monic(&wada.quotient);
    let direct = coeff_distance(&w, &monic(&ratio));
    let flipped = coeff_distance(&w, &monic(&ratio.reciprocal()));
    let (distance, reciprocal) = if direct <= flipped { (direct, false) } else { (flipped, true) };
    Ok(RouteAgreement { matched: distance <= tol.root, reciprocal, distance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{cint, cs, CScalar};

    fn trefoil() -> Presentation {
        Presentation::new(vec!['a', 'b'], vec![Word::parse("a^2b^-3").unwrap()]).unwrap()
    }

    #[test]
    fn phi_of_one_minus_a_is_one_minus_x_cubed() {
        let rep = RingRep::trivial(1, AbelianizationMap(vec![3, 2]));
        let e = &GroupRingElem::one() - &GroupRingElem::from_word(Word::generator(0));
        let m = phi_map(&e, &rep).unwrap();
        assert_eq!(m.get(0, 0), LaurentPoly::from_ints(0, &[1, 0, 0, -1]));
    }

    #[test]
    fn phi_of_fox_entry() {
        let rep = RingRep::trivial(1, AbelianizationMap(vec![3, 2]));
        let e = GroupRingElem::from_terms([
            (Word::parse("a^2b^-1").unwrap(), -1),
            (Word::parse("a^2b^-2").unwrap(), -1),
            (Word::identity(), -1),
        ]);
        assert_eq!(phi_map(&e, &rep).unwrap().get(0, 0), LaurentPoly::from_ints(0, &[-1, 0, -1, 0, -1]));
        assert!(phi_map(&GroupRingElem::zero(), &rep).unwrap().get(0, 0).is_zero());
    }

    #[test]
    fn trefoil_trivial_rep_reduces_to_standard_fraction() {
        let rep = RingRep::trivial(1, AbelianizationMap(vec![3, 2]));
        let w = twisted_alexander(&trefoil(), &rep, &Tolerances::default()).unwrap();
        assert_eq!(w.column, 0);
        assert!(w.quotient.is_none());
        let (n, d) = &w.reduced;
        let n = n.shift(-n.min_exp());
        let err = (&n - &LaurentPoly::from_ints(0, &[1, -1, 1])).norm_inf();
        assert!(err < 1e-20, "{} {err:e} {:?}", n.display("x"), n);
        assert!((d - &LaurentPoly::from_ints(0, &[-1, 1])).norm_inf() < 1e-20);
    }

    #[test]
    fn res_l_vanishes_for_trivial_rep() {
        let id = CMatrix::identity(3);
        let rep = LinearRepN::new(RepLabel::Custom, vec![id.clone(); 3], vec![id; 3]);
        assert_eq!(res_l_map(&rep).norm_max(), 0.0);
    }

    pub(crate) fn heusener(s: CScalar, t: CScalar) -> RingRep {
        let w = crate::numeric::root_of_unity(1, 3);
        let w2 = w * w;
        let z = cint(0);
        let one = cint(1);
        let a = CMatrix::from_fn(3, 3, |i, j| match (i, j) {
            (0, 0) => one,
            (1, 0) => s,
            (2, 0) => t,
            (1, 1) | (2, 2) => -one,
            _ => z,
        });
        let b = CMatrix::from_fn(3, 3, |i, j| match (i, j) {
            (0, 0) => one,
            (0, 1) => w - one,
            (0, 2) => w2 - one,
            (1, 1) => w,
            (2, 2) => w2,
            _ => z,
        });
        RingRep::new(vec![a, b], AbelianizationMap(vec![3, 2])).unwrap()
    }

    #[test]
    fn heusener_rep_gives_one_minus_x_cubed() {
        let rep = heusener(cs(0.3, -1.2), cs(2.0, 0.5));
        let w = twisted_alexander(&trefoil(), &rep, &Tolerances::default()).unwrap();
        let q = w.quotient.expect("exact").normalized();
        assert!((&q - &LaurentPoly::from_ints(0, &[1, 0, 0, -1])).norm_inf() < 1e-20, "{}", q.display("x"));
    }
}
