//! Birkhoff-James orthogonality of vectors.
//!
//! `x ⊥_B y` holds when `‖x + λy‖ ≥ ‖x‖` for every real `λ`. Because
//! `λ ↦ ‖x + λy‖` is convex, this is equivalent to the one-sided derivative
//! test `ρ′₋(x,y) ≤ 0 ≤ ρ′₊(x,y)`, and splits into the two cones
//! `y ∈ x⁺` (`ρ′₊ ≥ 0`) and `y ∈ x⁻` (`ρ′₋ ≤ 0`).
//!
//! Verdicts combine both views: the derivative test decides, and a direct
//! golden-section minimization of `λ ↦ ‖x + λy‖` supplies the margin, which
//! certifies non-orthogonality on its own.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minimize::{bisect_subgradient, minimize_convex};
use crate::norm::{NormSpec, VectorR};

/// Absolute tolerance on unit-normalized inputs.
pub const TAU_ORTH: f64 = 1e-7;

/// Final bracket width of the golden-section search behind vector margins.
const LAMBDA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Decision {
    Orthogonal,
    NotOrthogonal,
    Indeterminate,
}

/// Outcome of an orthogonality test `x ⊥_B y` (or `T ⊥_B A`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthoVerdict {
    pub decision: Decision,
    /// `min_λ ‖x̂ + λŷ‖ − 1` on normalized inputs; never positive, and below
    /// `−τ` it is a certified violation.
    pub margin: f64,
    /// Minimizing `λ` in the original (unnormalized) scaling.
    pub lambda_star: f64,
    pub deriv_plus: f64,
    pub deriv_minus: f64,
    /// Set when the left argument is zero, which is orthogonal to everything.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
}

impl OrthoVerdict {
    pub fn is_orthogonal(&self) -> bool {
        self.decision == Decision::Orthogonal
    }

    pub(crate) fn trivially_orthogonal(degenerate: bool) -> Self {
        OrthoVerdict {
            decision: Decision::Orthogonal,
            margin: 0.0,
            lambda_star: 0.0,
            deriv_plus: 0.0,
            deriv_minus: 0.0,
            degenerate,
        }
    }
}

/// Combines a margin and a derivative pair into a decision.
///
/// A margin below `−tol` is a concrete λ that shrinks the norm, so it wins.
/// Otherwise the derivative test decides; when it fails but the violation is
/// too shallow for the margin to certify, the answer is indeterminate.
pub(crate) fn decide(margin: f64, deriv_minus: f64, deriv_plus: f64, tol: f64) -> Decision {
    if margin < -tol {
        Decision::NotOrthogonal
    } else if deriv_minus <= tol && deriv_plus >= -tol {
        Decision::Orthogonal
    } else {
        Decision::Indeterminate
    }
}

/// [`decide`] for derivatives known in closed form, where a violation beyond
/// `tol` already proves non-orthogonality however shallow the margin.
pub(crate) fn decide_exact(margin: f64, deriv_minus: f64, deriv_plus: f64, tol: f64) -> Decision {
    if margin >= -tol && deriv_minus <= tol && deriv_plus >= -tol {
        Decision::Orthogonal
    } else {
        Decision::NotOrthogonal
    }
}

/// `x ⊥_B y` at the default tolerance.
pub fn is_bj_orthogonal(spec: &NormSpec, x: &VectorR, y: &VectorR) -> Result<OrthoVerdict> {
    is_bj_orthogonal_with(spec, x, y, TAU_ORTH)
}

/// `x ⊥_B y` at tolerance `tol`.
pub fn is_bj_orthogonal_with(spec: &NormSpec, x: &VectorR, y: &VectorR, tol: f64) -> Result<OrthoVerdict> {
    let nx = spec.eval_norm(x)?;
    let ny = spec.eval_norm(y)?;
    if nx == 0.0 {
        return Ok(OrthoVerdict::trivially_orthogonal(true));
    }
    if ny == 0.0 {
        return Ok(OrthoVerdict::trivially_orthogonal(false));
    }
    let xh = x / nx;
    let yh = y / ny;
    let (dm, dp) = spec.dir_derivs(&xh, &yh)?;
    let mut buf = [0.0; crate::norm::MAX_DIM];
    let n = spec.dim();
    let min = minimize_convex(
        |mu| {
            for i in 0..n {
                buf[i] = xh[i] + mu * yh[i];
            }
            spec.norm(&buf[..n])
        },
        0.0,
        2.0,
        LAMBDA_TOL,
    );
    let margin = (min.value - 1.0).min(0.0);
    Ok(OrthoVerdict {
        decision: decide_exact(margin, dm, dp, tol),
        margin,
        lambda_star: min.arg * nx / ny,
        deriv_plus: dp,
        deriv_minus: dm,
        degenerate: false,
    })
}

/// `y ∈ x⁺`: `‖x + λy‖ ≥ ‖x‖` for all `λ ≥ 0`.
pub fn in_plus(spec: &NormSpec, x: &VectorR, y: &VectorR) -> Result<bool> {
    let (_, dp) = unit_derivs(spec, x, y)?;
    Ok(dp >= -TAU_ORTH)
}

/// `y ∈ x⁻`: `‖x + λy‖ ≥ ‖x‖` for all `λ ≤ 0`.
pub fn in_minus(spec: &NormSpec, x: &VectorR, y: &VectorR) -> Result<bool> {
    let (dm, _) = unit_derivs(spec, x, y)?;
    Ok(dm <= TAU_ORTH)
}

/// Directional derivatives at `x/‖x‖` towards `y/‖y‖`; zero when `y = 0`.
pub(crate) fn unit_derivs(spec: &NormSpec, x: &VectorR, y: &VectorR) -> Result<(f64, f64)> {
    let nx = spec.eval_norm(x)?;
    let ny = spec.eval_norm(y)?;
    if nx == 0.0 {
        return Err(Error::ZeroVector);
    }
    if ny == 0.0 {
        return Ok((0.0, 0.0));
    }
    spec.dir_derivs(&(x / nx), &(y / ny))
}

/// The scalar `a₀` minimizing `‖y + a·x‖`, so that `(y + a₀x) ⊥_B x`.
pub fn james_foot(spec: &NormSpec, x: &VectorR, y: &VectorR) -> Result<f64> {
    let nx = spec.eval_norm(x)?;
    let ny = spec.eval_norm(y)?;
    if nx == 0.0 {
        return Err(Error::ZeroVector);
    }
    if ny == 0.0 {
        return Ok(0.0);
    }
    let xx = x.dot(x);
    let c = x.dot(y) / xx;
    if (y - c * x).norm() <= 1e-14 * y.norm() {
        return Ok(-c);
    }
    // ‖y + a x‖ ≥ |a|‖x‖ − ‖y‖ ≥ ‖y‖ once |a| ≥ 2‖y‖/‖x‖.
    let r = 2.0 * ny / nx;
    let a = bisect_subgradient(
        |a| {
            let z = y + a * x;
            match spec.dir_derivs(&z, x) {
                Ok(d) => d,
                Err(_) => (-nx, nx),
            }
        },
        -r,
        r,
    );
    Ok(a)
}

/// Basis of the hyperplane `{h : x ⊥_B h}` at a smooth point `x`: the kernel
/// of its supporting functional. Vectors are unit in `spec`.
pub fn orthogonal_hyperplane(spec: &NormSpec, x: &VectorR) -> Result<Vec<VectorR>> {
    let f = spec.supporting_functional(x)?;
    Ok(kernel_basis(spec, f.coeffs()))
}

/// Unit basis of `ker f` built as `eᵢ − (fᵢ/f_k)e_k` around the largest
/// coefficient `f_k`.
pub(crate) fn kernel_basis(spec: &NormSpec, f: &VectorR) -> Vec<VectorR> {
    let n = f.len();
    let k = f.iamax();
    (0..n)
        .filter(|&i| i != k)
        .map(|i| {
            let mut v = DVector::zeros(n);
            v[i] = 1.0;
            v[k] = -f[i] / f[k];
            spec.normalize(&v).expect("kernel vector is nonzero")
        })
        .collect()
}

/// A unit `y` with `y ⊥_B x`, from the James foot of a random direction.
pub fn find_orthogonal_to(spec: &NormSpec, x: &VectorR, seed: u64) -> Result<VectorR> {
    let nx = spec.eval_norm(x)?;
    if nx == 0.0 {
        return Err(Error::ZeroVector);
    }
    let n = spec.dim();
    if n < 2 {
        return Err(Error::InvalidSpec("orthogonal complements need dimension >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xe = x / x.norm();
    let mut tries = 0;
    let raw = loop {
        tries += 1;
        let r: VectorR = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        let r = &r / r.norm();
        if r.dot(&xe).abs() < 0.95 || tries > 64 {
            break r;
        }
    };
    let a0 = james_foot(spec, x, &raw)?;
    let y = &raw + a0 * x;
    spec.normalize(&y).ok_or(Error::ZeroVector)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PointSymmetry {
    /// No counterexample among the searched directions.
    SymmetricUpToBudget,
    /// A certified counterexample was found.
    Refuted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrySearch {
    pub verdict: PointSymmetry,
    /// For left symmetry: `x ⊥_B y` but `y ̸⊥_B x`. For right symmetry:
    /// `y ⊥_B x` but `x ̸⊥_B y`.
    pub witness: Option<VectorR>,
    pub checked: usize,
}

impl SymmetrySearch {
    pub fn is_refuted(&self) -> bool {
        self.verdict == PointSymmetry::Refuted
    }
}

/// Candidate directions `y` with `x ⊥_B y`.
///
/// `‖x + t(r + cx)‖` has one-sided slopes `ρ′±(x,r) + c‖x‖` at `t = 0`, so any
/// `c` between `−ρ′₊(x,r)/‖x‖` and `−ρ′₋(x,r)/‖x‖` puts `r + cx` in the
/// orthogonality set of `x`. At smooth points that interval is a single value
/// and the candidates fill the hyperplane `ker f_x`.
fn left_candidates(spec: &NormSpec, x: &VectorR, budget: usize, seed: u64) -> Vec<VectorR> {
    let n = spec.dim();
    let nx = spec.norm(x.as_slice());
    let mut out = Vec::with_capacity(budget + n);
    if let Ok(basis) = orthogonal_hyperplane(spec, x) {
        out.extend(basis);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..budget {
        let r: VectorR = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        let Ok((dm, dp)) = spec.dir_derivs(x, &r) else { continue };
        let (c_lo, c_hi) = (-dp / nx, -dm / nx);
        let cs: &[f64] = if (c_hi - c_lo).abs() <= 1e-15 { &[0.5] } else { &[0.0, 0.5, 1.0] };
        for &s in cs {
            let c = c_lo + s * (c_hi - c_lo);
            if let Some(y) = spec.normalize(&(&r + c * x)) {
                out.push(y);
            }
        }
    }
    out
}

/// Budgeted search for a `y` with `x ⊥_B y` and `y ̸⊥_B x`. The failing
/// side must come with a λ that shrinks the norm by more than `TAU_ORTH`.
pub fn is_left_symmetric_point(spec: &NormSpec, x: &VectorR, budget: usize, seed: u64) -> Result<SymmetrySearch> {
    let nx = spec.eval_norm(x)?;
    if nx == 0.0 {
        return Err(Error::ZeroVector);
    }
    let candidates = left_candidates(spec, x, budget.max(1), seed);
    // Rank by how badly y ⊥_B x fails to first order, then certify the best.
    let scored = score(&candidates, |y| unit_derivs(spec, y, x));
    certify(candidates, scored, |y| {
        let back = is_bj_orthogonal(spec, y, x)?;
        let fwd = is_bj_orthogonal(spec, x, y)?;
        Ok(back.margin < -TAU_ORTH && fwd.decision == Decision::Orthogonal)
    })
}

/// Budgeted search for a `y` with `y ⊥_B x` and `x ̸⊥_B y`.
pub fn is_right_symmetric_point(spec: &NormSpec, x: &VectorR, budget: usize, seed: u64) -> Result<SymmetrySearch> {
    let nx = spec.eval_norm(x)?;
    if nx == 0.0 {
        return Err(Error::ZeroVector);
    }
    let n = spec.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates = Vec::with_capacity(budget.max(1));
    for _ in 0..budget.max(1) {
        let r: VectorR = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        let a0 = james_foot(spec, x, &r)?;
        if let Some(y) = spec.normalize(&(&r + a0 * x)) {
            candidates.push(y);
        }
    }
    let scored = score(&candidates, |y| unit_derivs(spec, x, y));
    certify(candidates, scored, |y| {
        let fwd = is_bj_orthogonal(spec, x, y)?;
        let back = is_bj_orthogonal(spec, y, x)?;
        Ok(fwd.margin < -TAU_ORTH && back.decision == Decision::Orthogonal)
    })
}

fn score<F>(candidates: &[VectorR], derivs: F) -> Vec<(usize, f64)>
where
    F: Fn(&VectorR) -> Result<(f64, f64)>,
{
    let mut scored: Vec<(usize, f64)> = candidates
        .iter()
        .enumerate()
        .filter_map(|(i, y)| derivs(y).ok().map(|(dm, dp)| (i, dm.max(-dp))))
        .collect();
    // Highest violation first; ties keep the lower index.
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored
}

fn certify<F>(candidates: Vec<VectorR>, scored: Vec<(usize, f64)>, check: F) -> Result<SymmetrySearch>
where
    F: Fn(&VectorR) -> Result<bool>,
{
    let checked = candidates.len();
    for &(i, violation) in scored.iter().take(8) {
        if violation <= TAU_ORTH {
            break;
        }
        if check(&candidates[i])? {
            return Ok(SymmetrySearch {
                verdict: PointSymmetry::Refuted,
                witness: Some(candidates[i].clone()),
                checked,
            });
        }
    }
    Ok(SymmetrySearch { verdict: PointSymmetry::SymmetricUpToBudget, witness: None, checked })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::dvector;

    fn lp(p: f64, n: usize) -> NormSpec {
        NormSpec::lp(p, n).unwrap()
    }

    #[test]
    fn hilbert_examples() {
        let s = lp(2.0, 2);
        let v = is_bj_orthogonal(&s, &dvector![1.0, 0.0], &dvector![0.0, 1.0]).unwrap();
        assert_eq!(v.decision, Decision::Orthogonal);
        let v = is_bj_orthogonal(&s, &dvector![1.0, 0.0], &dvector![1.0, 1.0]).unwrap();
        assert_eq!(v.decision, Decision::NotOrthogonal);
        assert!(v.lambda_star < 0.0);
        assert_abs_diff_eq!(v.lambda_star, -0.5, epsilon = 1e-6);
    }

    #[test]
    fn taxicab_flat_minimum_is_orthogonal() {
        let v = is_bj_orthogonal(&lp(1.0, 2), &dvector![1.0, 0.0], &dvector![1.0, 1.0]).unwrap();
        assert_eq!(v.decision, Decision::Orthogonal);
        assert!(v.margin >= -1e-15);
    }

    #[test]
    fn zero_arguments() {
        let s = lp(3.0, 2);
        let v = is_bj_orthogonal(&s, &dvector![0.0, 0.0], &dvector![1.0, 2.0]).unwrap();
        assert!(v.degenerate && v.is_orthogonal());
        let v = is_bj_orthogonal(&s, &dvector![1.0, 2.0], &dvector![0.0, 0.0]).unwrap();
        assert!(!v.degenerate && v.is_orthogonal());
        assert_eq!(in_plus(&s, &dvector![0.0, 0.0], &dvector![1.0, 0.0]), Err(Error::ZeroVector));
        assert_eq!(james_foot(&s, &dvector![0.0, 0.0], &dvector![1.0, 0.0]), Err(Error::ZeroVector));
    }

    #[test]
    fn cones() {
        let s = lp(2.0, 2);
        let x = dvector![1.0, 0.0];
        assert!(in_plus(&s, &x, &dvector![0.0, 1.0]).unwrap());
        assert!(in_minus(&s, &x, &dvector![0.0, 1.0]).unwrap());
        for spec in [lp(2.0, 2), lp(1.0, 2), lp(3.0, 2), lp(f64::INFINITY, 2)] {
            let x = dvector![0.3, -0.8];
            assert!(in_plus(&spec, &x, &x).unwrap());
            assert!(!in_minus(&spec, &x, &x).unwrap());
        }
        let s3 = lp(3.0, 2);
        let x = s3.normalize(&dvector![1.0, 1.0]).unwrap();
        assert!(in_plus(&s3, &x, &dvector![1.0, -1.0]).unwrap());
        assert!(in_minus(&s3, &x, &dvector![1.0, -1.0]).unwrap());
    }

    #[test]
    fn james_foot_examples() {
        assert_abs_diff_eq!(james_foot(&lp(2.0, 2), &dvector![1.0, 0.0], &dvector![1.0, 1.0]).unwrap(), -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(james_foot(&lp(3.0, 2), &dvector![1.0, 0.0], &dvector![1.0, 1.0]).unwrap(), -1.0, epsilon = 1e-12);
        // Parallel inputs: the foot is exactly zero.
        let a = james_foot(&lp(3.0, 2), &dvector![1.0, 2.0], &dvector![-2.0, -4.0]).unwrap();
        assert_abs_diff_eq!(a, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn hyperplane_examples() {
        let b = orthogonal_hyperplane(&lp(2.0, 3), &dvector![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(b.len(), 2);
        for h in &b {
            assert_abs_diff_eq!(h[0], 0.0);
        }
        let b = orthogonal_hyperplane(&lp(3.0, 2), &dvector![1.0, 0.0]).unwrap();
        assert_eq!(b, vec![dvector![0.0, 1.0]]);
        assert_eq!(orthogonal_hyperplane(&lp(1.0, 2), &dvector![1.0, 0.0]), Err(Error::NotSmoothPoint));
    }

    #[test]
    fn find_orthogonal_examples() {
        let y = find_orthogonal_to(&lp(2.0, 2), &dvector![1.0, 0.0], 3).unwrap();
        assert_abs_diff_eq!(y[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(y[1].abs(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn point_symmetry_examples() {
        let s2 = lp(2.0, 3);
        let r = is_left_symmetric_point(&s2, &dvector![0.2, -1.0, 0.4], 64, 1).unwrap();
        assert_eq!(r.verdict, PointSymmetry::SymmetricUpToBudget);
        let s3 = lp(3.0, 2);
        let r = is_left_symmetric_point(&s3, &dvector![1.0, 0.0], 64, 1).unwrap();
        assert_eq!(r.verdict, PointSymmetry::SymmetricUpToBudget);
        let x = s3.normalize(&dvector![1.0, 0.5]).unwrap();
        let r = is_left_symmetric_point(&s3, &x, 64, 1).unwrap();
        assert!(r.is_refuted());
        let w = r.witness.unwrap();
        assert!(is_bj_orthogonal(&s3, &x, &w).unwrap().is_orthogonal());
        assert_eq!(is_bj_orthogonal(&s3, &w, &x).unwrap().decision, Decision::NotOrthogonal);
        // The diagonal of ℓ_3² is fixed by the isometry swapping coordinates
        // and negating one, which maps it onto its own orthogonal line.
        let d = s3.normalize(&dvector![1.0, 1.0]).unwrap();
        assert!(!is_left_symmetric_point(&s3, &d, 64, 1).unwrap().is_refuted());
    }

    #[test]
    fn right_symmetry_search() {
        let s3 = lp(3.0, 2);
        let x = s3.normalize(&dvector![1.0, 0.5]).unwrap();
        let r = is_right_symmetric_point(&s3, &x, 32, 2).unwrap();
        assert!(r.is_refuted());
        let w = r.witness.unwrap();
        assert!(is_bj_orthogonal(&s3, &w, &x).unwrap().is_orthogonal());
        assert_eq!(is_bj_orthogonal(&s3, &x, &w).unwrap().decision, Decision::NotOrthogonal);
        let r = is_right_symmetric_point(&lp(2.0, 2), &x, 32, 2).unwrap();
        assert!(!r.is_refuted());
    }

    #[test]
    fn decide_bands() {
        assert_eq!(decide(-1e-3, 0.5, 0.5, TAU_ORTH), Decision::NotOrthogonal);
        assert_eq!(decide(0.0, -0.1, 0.1, TAU_ORTH), Decision::Orthogonal);
        assert_eq!(decide(-1e-9, 1e-4, 1e-4, TAU_ORTH), Decision::Indeterminate);
        assert_eq!(decide_exact(-1e-9, 1e-4, 1e-4, TAU_ORTH), Decision::NotOrthogonal);
        assert_eq!(decide_exact(-1e-9, 1e-8, -1e-8, TAU_ORTH), Decision::Orthogonal);
    }
}
