//! Witness operators refuting left and right symmetry in `B(X)`.
//!
//! Each construction produces a candidate `A` and a trace of the data it was
//! built from. A candidate becomes a [`WitnessCertificate`] only after the
//! direct route confirms both orthogonality verdicts, once at the working
//! resolution and again on a finer, independently sampled search.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm::{NormSpec, VectorR};
use crate::operator::{AttainmentShape, LinearOperator, OperatorSpace};
use crate::orthogonality::{
    find_orthogonal_to, is_bj_orthogonal_with, is_left_symmetric_point, james_foot, kernel_basis, Decision,
    OrthoVerdict,
};
use crate::seed::derive;
use crate::settings::{SearchSettings, Tolerances};

/// Random attempts in the rank-one fallbacks.
const FALLBACK_BUDGET: usize = 48;
/// Directions tried when searching a point for left asymmetry.
const POINT_BUDGET: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Direction {
    /// `T ⊥_B A` but `A ̸⊥_B T`.
    RefutesLeftSymmetry,
    /// `A ⊥_B T` but `T ̸⊥_B A`.
    RefutesRightSymmetry,
}

/// Which construction produced a witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Branch {
    /// `A = Tz ⊗ f_z` with `z` in the hyperplane orthogonal to a maximizer.
    KernelImage,
    /// `Ax₁ = u`, `Ax₂ = v`, zero on the rest of a basis.
    TwoPoint,
    /// `A = Tz ⊗ f_z` with `z ⊥_B x₁`, so that `Ax₁ = 0`.
    ReverseKernel,
    /// Randomized `A = u ⊗ f_w` with `Tx₁ ⊥_B u`.
    RankOneSearch,
    /// `A = Tx₀ ⊗ f_y` for a direction `y` exposing left asymmetry of `x₀`.
    AsymmetricPoint,
    /// `A = (d·Tz′ + Th₀) ⊗ f_{z′}` with `z′` tilted off the maximizer.
    TiltedMaximizer,
    /// Randomized `A = a ⊗ f_w` with `a ⊥_B Tw`.
    RankOneFoot,
    /// `A = ½(I + u₀ ⊗ f_{u₀})` for a left symmetric `u₀` that `T` kills.
    HalfIdentity,
}

/// The data a witness was built from. Unused fields are omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub branch: Branch,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::serde_vec::option")]
    pub x1: Option<VectorR>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::serde_vec::option")]
    pub x2: Option<VectorR>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::serde_vec::option")]
    pub u: Option<VectorR>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::serde_vec::option")]
    pub v: Option<VectorR>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::serde_vec::option")]
    pub h0: Option<VectorR>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::serde_vec::option")]
    pub z: Option<VectorR>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::serde_vec::option")]
    pub w: Option<VectorR>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::serde_vec::option")]
    pub u0: Option<VectorR>,
    /// Constructions tried before this one succeeded, in order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rejected: Vec<Branch>,
    /// Random draws used by a fallback branch.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attempts: Option<usize>,
}

impl Trace {
    fn new(branch: Branch) -> Self {
        Trace {
            branch,
            x1: None,
            x2: None,
            u: None,
            v: None,
            delta: None,
            epsilon: None,
            t0: None,
            d: None,
            h0: None,
            z: None,
            w: None,
            u0: None,
            rejected: Vec::new(),
            attempts: None,
        }
    }
}

/// A witness operator together with the verdicts that make it one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessCertificate {
    pub spec: NormSpec,
    pub target_matrix: LinearOperator,
    pub witness_matrix: LinearOperator,
    pub direction: Direction,
    /// `T ⊥_B A` for left, `A ⊥_B T` for right; always orthogonal.
    pub forward: OrthoVerdict,
    /// The failing direction; always not orthogonal.
    pub backward: OrthoVerdict,
    pub trace: Trace,
    pub tolerances: Tolerances,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EigenKernelCase {
    /// `rank T ≥ n − 1`; nothing to construct.
    #[serde(rename = "RANK_GE_N_MINUS_1")]
    RankGeNMinus1,
    Witness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenKernelReport {
    pub case: EigenKernelCase,
    pub rank: usize,
    #[serde(with = "crate::serde_vec")]
    pub x0: VectorR,
    pub eigenvalue: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<WitnessCertificate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IdentityKernelCase {
    /// `I ⊥_B T` and `T ⊥_B I`.
    MutualWithIdentity,
    Witness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityKernelReport {
    pub case: IdentityKernelCase,
    #[serde(with = "crate::serde_vec")]
    pub x0: VectorR,
    #[serde(with = "crate::serde_vec")]
    pub u0: VectorR,
    pub i_perp_t: OrthoVerdict,
    pub t_perp_i: OrthoVerdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<WitnessCertificate>,
}

/// Outcome of checking that `x ⊥_B y` implies `Tx ⊥_B Ty` for a maximizer `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    #[serde(with = "crate::serde_vec")]
    pub x: VectorR,
    pub trials: usize,
    pub passed: usize,
    pub worst_margin: f64,
    /// Largest `max(ρ′₋, −ρ′₊)` of `Tx` towards `Ty` over the trials.
    pub worst_slope: f64,
}

impl TransferReport {
    pub fn all_passed(&self) -> bool {
        self.passed == self.trials
    }
}

/// `T = diag(1, ½, ½)` and `A = diag(0, 1, 0)` on Euclidean `ℝ³`, where
/// `T ⊥_B A` but `A ̸⊥_B T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalPairReport {
    pub t_perp_a: OrthoVerdict,
    pub a_perp_t: OrthoVerdict,
    pub t_perp_a_via_attainment: OrthoVerdict,
    pub a_perp_t_via_attainment: OrthoVerdict,
    /// `T ⊥_B A`, `A ̸⊥_B T`, and both routes agree.
    pub holds: bool,
}

/// Builds and certifies witnesses on one normed space.
pub struct SymmetryLab {
    space: OperatorSpace,
    fine: OperatorSpace,
    budget: usize,
}

fn gaussian(n: usize, rng: &mut ChaCha8Rng) -> VectorR {
    DVector::from_fn(n, |_, _| StandardNormal.sample(rng))
}

/// A random Gaussian combination of `basis`.
fn combination(basis: &[VectorR], rng: &mut ChaCha8Rng) -> VectorR {
    let n = basis[0].len();
    basis.iter().fold(DVector::zeros(n), |acc, h| {
        let c: f64 = StandardNormal.sample(rng);
        acc + h * c
    })
}

/// `x ↦ f(x)·a`.
fn rank_one(a: &VectorR, f: &VectorR) -> LinearOperator {
    LinearOperator(a * f.transpose())
}

/// The operator sending `basis[i]` to `images[i]`.
fn from_basis(basis: &[VectorR], images: &[VectorR]) -> Option<LinearOperator> {
    let n = basis.len();
    let b = DMatrix::from_columns(basis);
    let im = DMatrix::from_columns(images);
    let lu = b.full_piv_lu();
    let sv = DMatrix::from_columns(basis).singular_values();
    if sv.min() <= 1e-9 * sv.max() {
        return None;
    }
    let b_inv = lu.try_inverse()?;
    debug_assert_eq!(b_inv.nrows(), n);
    Some(LinearOperator(im * b_inv))
}

impl SymmetryLab {
    pub fn new(spec: &NormSpec) -> Self {
        Self::with_settings(spec, SearchSettings::default(), Tolerances::default())
    }

    pub fn with_settings(spec: &NormSpec, settings: SearchSettings, tol: Tolerances) -> Self {
        let space = OperatorSpace::with_settings(spec, settings, tol);
        let fine = space.doubled();
        SymmetryLab { space, fine, budget: POINT_BUDGET }
    }

    pub fn space(&self) -> &OperatorSpace {
        &self.space
    }

    fn spec(&self) -> &NormSpec {
        self.space.spec()
    }

    fn tol(&self) -> &Tolerances {
        self.space.tolerances()
    }

    fn require_smooth(&self) -> Result<()> {
        let spec = self.spec();
        if !(spec.is_smooth() && spec.is_strictly_convex()) {
            return Err(Error::SpecNotScSmooth(spec.to_string()));
        }
        if spec.dim() < 2 {
            return Err(Error::HypothesisFailed("constructions need dimension >= 2".into()));
        }
        Ok(())
    }

    fn prepare(&self, t: &LinearOperator) -> Result<()> {
        self.spec().check_dim(t.dim())?;
        if t.is_zero() {
            return Err(Error::ZeroOperator);
        }
        self.require_smooth()
    }

    /// Unit supporting functional coefficients at `x`.
    fn functional(&self, x: &VectorR) -> Result<VectorR> {
        Ok(self.spec().supporting_functional(x)?.0)
    }

    fn unit(&self, x: &VectorR) -> Result<VectorR> {
        self.spec().normalize(x).ok_or(Error::ZeroVector)
    }

    /// Direct-route verdicts for `(left ⊥ right, right ⊥ left)`, accepted
    /// when the first holds, the second fails by at least the certificate
    /// margin, and both survive the finer search.
    fn verify(
        &self,
        left: &LinearOperator,
        right: &LinearOperator,
    ) -> Result<Option<(OrthoVerdict, OrthoVerdict)>> {
        let tol = self.tol();
        let fwd = self.space.bj_orthogonal(left, right)?;
        if !fwd.is_orthogonal() {
            return Ok(None);
        }
        let back = self.space.bj_orthogonal(right, left)?;
        if back.decision != Decision::NotOrthogonal || back.margin >= -tol.certificate {
            return Ok(None);
        }
        let fwd2 = self.fine.bj_orthogonal(left, right)?;
        if !fwd2.is_orthogonal() || fwd2.margin < -tol.orth / 2.0 {
            return Ok(None);
        }
        let back2 = self.fine.bj_orthogonal(right, left)?;
        if back2.decision != Decision::NotOrthogonal || back2.margin >= -2.0 * tol.orth {
            return Ok(None);
        }
        Ok(Some((fwd, back)))
    }

    fn certify(
        &self,
        t: &LinearOperator,
        a: &LinearOperator,
        direction: Direction,
        trace: &Trace,
        seed: u64,
    ) -> Result<Option<WitnessCertificate>> {
        let verdicts = match direction {
            Direction::RefutesLeftSymmetry => self.verify(t, a)?,
            Direction::RefutesRightSymmetry => self.verify(a, t)?,
        };
        Ok(verdicts.map(|(forward, backward)| WitnessCertificate {
            spec: self.spec().clone(),
            target_matrix: t.clone(),
            witness_matrix: a.clone(),
            direction,
            forward,
            backward,
            trace: trace.clone(),
            tolerances: *self.tol(),
            seed,
        }))
    }

    /// A witness `A` with `T ⊥_B A` and `A ̸⊥_B T`, showing that a nonzero
    /// `T` is not left symmetric.
    pub fn refute_left_symmetry(&self, t: &LinearOperator, seed: u64) -> Result<WitnessCertificate> {
        self.prepare(t)?;
        let nt = self.space.norm(t)?;
        let th = t.scaled(1.0 / nt);
        let att = self.space.attainment(&th)?;
        let x1 = att.maximizers.first().cloned().ok_or(Error::ZeroOperator)?;
        let tx1 = th.apply(&x1);
        let f1 = self.functional(&x1)?;
        let hyper = kernel_basis(self.spec(), &f1);
        let mut rejected = Vec::new();

        if let Some(c) = self.kernel_image(t, &th, &x1, &hyper, seed)? {
            return Ok(c);
        }
        rejected.push(Branch::KernelImage);

        if let Some(mut c) = self.two_point(t, &th, &x1, &tx1, &hyper, seed)? {
            c.trace.rejected = rejected;
            return Ok(c);
        }
        rejected.push(Branch::TwoPoint);

        if let Some(mut c) = self.reverse_kernel(t, &th, &x1, seed)? {
            c.trace.rejected = rejected;
            return Ok(c);
        }
        rejected.push(Branch::ReverseKernel);

        // Tx₁ ⊥_B Ax₁ is enough for T ⊥_B A.
        let mut rng = ChaCha8Rng::seed_from_u64(derive(seed, "rank-one-search"));
        let n = self.spec().dim();
        let g = self.functional(&tx1)?;
        let image_hyper = kernel_basis(self.spec(), &g);
        for attempt in 0..FALLBACK_BUDGET {
            let u = if attempt == 0 {
                self.unit(&image_hyper[0])?
            } else {
                let raw = combination(&image_hyper, &mut rng);
                let Some(u) = self.spec().normalize(&raw) else { continue };
                u
            };
            let fu = self.functional(&u)?;
            let w = if attempt % 2 == 0 {
                self.spec().dual_preimage(th.0.tr_mul(&fu).as_slice())
            } else {
                self.spec().normalize(&gaussian(n, &mut rng))
            };
            let Some(w) = w else { continue };
            let a = rank_one(&u, &self.functional(&w)?);
            let mut trace = Trace::new(Branch::RankOneSearch);
            trace.x1 = Some(x1.clone());
            trace.u = Some(u);
            trace.w = Some(w);
            trace.attempts = Some(attempt + 1);
            trace.rejected = rejected.clone();
            if let Some(c) = self.certify(t, &a, Direction::RefutesLeftSymmetry, &trace, seed)? {
                return Ok(c);
            }
        }
        Err(Error::BudgetExhausted(format!(
            "no left-symmetry witness for {t} after {FALLBACK_BUDGET} rank-one draws"
        )))
    }

    /// `A = Tz ⊗ f_z` with `x₁ ⊥_B z` and `‖Tz‖` as large as the hyperplane
    /// allows. Then `Az = Tz`, `M_A = {±z}`, and `Tx₁ ⊥_B Tz`.
    fn kernel_image(
        &self,
        t: &LinearOperator,
        th: &LinearOperator,
        x1: &VectorR,
        hyper: &[VectorR],
        seed: u64,
    ) -> Result<Option<WitnessCertificate>> {
        let mut rng = ChaCha8Rng::seed_from_u64(derive(seed, "kernel-image"));
        let mut candidates: Vec<VectorR> = hyper.to_vec();
        if hyper.len() > 1 {
            for _ in 0..16 {
                let raw = combination(&hyper, &mut rng);
                if let Some(z) = self.spec().normalize(&raw) {
                    candidates.push(z);
                }
            }
        }
        let image = |z: &VectorR| self.spec().norm(th.apply(z).as_slice());
        candidates.sort_by(|a, b| image(b).total_cmp(&image(a)));
        for z in candidates.iter().take(3) {
            let tz = th.apply(z);
            if self.spec().norm(tz.as_slice()) <= self.tol().rank {
                break;
            }
            let a = rank_one(&tz, &self.functional(z)?);
            let mut trace = Trace::new(Branch::KernelImage);
            trace.x1 = Some(x1.clone());
            trace.z = Some(z.clone());
            if let Some(c) = self.certify(t, &a, Direction::RefutesLeftSymmetry, &trace, seed)? {
                return Ok(Some(c));
            }
        }
        Ok(None)
    }

    /// `A = Tz ⊗ f_z` for `z` with `f_z(x₁) = 0`. Then `Ax₁ = 0` and
    /// `M_A = {±z}` with `Az = Tz`, which fails as soon as `Tz ≠ 0`.
    fn reverse_kernel(
        &self,
        t: &LinearOperator,
        th: &LinearOperator,
        x1: &VectorR,
        seed: u64,
    ) -> Result<Option<WitnessCertificate>> {
        let spec = self.spec();
        let annihilator = kernel_basis(spec, x1);
        let mut rng = ChaCha8Rng::seed_from_u64(derive(seed, "reverse-kernel"));
        let mut functionals = annihilator.clone();
        if annihilator.len() > 1 {
            functionals.extend((0..16).map(|_| combination(&annihilator, &mut rng)));
        }
        let mut candidates: Vec<VectorR> =
            functionals.iter().filter_map(|g| spec.dual_preimage(g.as_slice())).collect();
        let image = |z: &VectorR| spec.norm(th.apply(z).as_slice());
        candidates.sort_by(|a, b| image(b).total_cmp(&image(a)));
        for z in candidates.iter().take(3) {
            let tz = th.apply(z);
            if spec.norm(tz.as_slice()) <= self.tol().rank {
                break;
            }
            let a = rank_one(&tz, &self.functional(z)?);
            let mut trace = Trace::new(Branch::ReverseKernel);
            trace.x1 = Some(x1.clone());
            trace.z = Some(z.clone());
            if let Some(c) = self.certify(t, &a, Direction::RefutesLeftSymmetry, &trace, seed)? {
                return Ok(Some(c));
            }
        }
        Ok(None)
    }

    /// `Ax₁ = u`, `Ax₂ = v = t₀u + (1 − t₀)Tx₁`, `A = 0` on the rest of a
    /// basis of the hyperplane through `x₂`, where `Tx₁ ⊥_B u` and `Tx₂ ≈ 0`.
    fn two_point(
        &self,
        t: &LinearOperator,
        th: &LinearOperator,
        x1: &VectorR,
        tx1: &VectorR,
        hyper: &[VectorR],
        seed: u64,
    ) -> Result<Option<WitnessCertificate>> {
        let spec = self.spec();
        let k = (0..hyper.len())
            .min_by(|&i, &j| {
                let a = spec.norm(th.apply(&hyper[i]).as_slice());
                let b = spec.norm(th.apply(&hyper[j]).as_slice());
                a.total_cmp(&b)
            })
            .expect("hyperplane basis is nonempty");
        let x2 = hyper[k].clone();
        if spec.norm(th.apply(&x2).as_slice()) > self.tol().rank {
            return Ok(None);
        }
        let u = find_orthogonal_to(spec, tx1, derive(seed, "two-point"))?;
        let delta = 2.0 - spec.norm((x1 + &x2).as_slice());
        if !(delta > 0.0 && delta < 1.0) {
            return Ok(None);
        }
        let epsilon = delta / (2.0 * (3.0 - delta));
        let gap = spec.norm((&u - tx1).as_slice());
        let t0 = (1.0 - epsilon / (2.0 * gap)).max(0.5);
        let v = t0 * &u + (1.0 - t0) * tx1;
        let mut basis = vec![x1.clone(), x2.clone()];
        let mut images = vec![u.clone(), v.clone()];
        for (i, h) in hyper.iter().enumerate() {
            if i != k {
                basis.push(h.clone());
                images.push(DVector::zeros(spec.dim()));
            }
        }
        let Some(a) = from_basis(&basis, &images) else { return Ok(None) };
        let mut trace = Trace::new(Branch::TwoPoint);
        trace.x1 = Some(x1.clone());
        trace.x2 = Some(x2);
        trace.u = Some(u);
        trace.v = Some(v);
        trace.delta = Some(delta);
        trace.epsilon = Some(epsilon);
        trace.t0 = Some(t0);
        self.certify(t, &a, Direction::RefutesLeftSymmetry, &trace, seed)
    }

    /// The unique maximizer pair `±x₀` of `T`, or [`Error::NotAntipodalMt`].
    fn antipodal_maximizer(&self, t: &LinearOperator) -> Result<VectorR> {
        let proxy = self.space.smooth_proxy(t)?;
        match proxy.x0 {
            Some(x0) if proxy.antipodal_mt && proxy.image_smooth => Ok(x0),
            _ => Err(Error::NotAntipodalMt),
        }
    }

    /// A witness `A` with `A ⊥_B T` and `T ̸⊥_B A`, for `T` whose norm is
    /// attained only at `±x₀`.
    pub fn refute_right_symmetry_smooth(&self, t: &LinearOperator, seed: u64) -> Result<WitnessCertificate> {
        self.prepare(t)?;
        let spec = self.spec();
        let nt = self.space.norm(t)?;
        let th = t.scaled(1.0 / nt);
        let x0 = self.antipodal_maximizer(&th)?;
        let tx0 = th.apply(&x0);
        let mut rejected = Vec::new();

        // x₀ ⊥_B y but y ̸⊥_B x₀: then A = Tx₀ ⊗ f_y has M_A = {±y},
        // Ay = Tx₀ ⊥_B Ty, while Ax₀ = f_y(x₀)Tx₀ is radial at Tx₀.
        let search = is_left_symmetric_point(spec, &x0, self.budget, derive(seed, "asymmetric-point"))?;
        if let Some(y) = search.witness {
            let a = rank_one(&tx0, &self.functional(&y)?);
            let mut trace = Trace::new(Branch::AsymmetricPoint);
            trace.x1 = Some(x0.clone());
            trace.w = Some(y);
            if let Some(c) = self.certify(t, &a, Direction::RefutesRightSymmetry, &trace, seed)? {
                return Ok(c);
            }
        }
        rejected.push(Branch::AsymmetricPoint);

        let f0 = self.functional(&x0)?;
        let hyper = kernel_basis(spec, &f0);
        let h = hyper
            .iter()
            .max_by(|a, b| spec.norm(th.apply(a).as_slice()).total_cmp(&spec.norm(th.apply(b).as_slice())))
            .expect("hyperplane basis is nonempty");
        let th_norm = spec.norm(th.apply(h).as_slice());
        if th_norm > self.tol().rank {
            if let Some(mut c) = self.tilted_maximizer(t, &th, &x0, h, th_norm, seed)? {
                c.trace.rejected = rejected;
                return Ok(c);
            }
            rejected.push(Branch::TiltedMaximizer);
        }
        let restricted_zero = th_norm <= self.tol().rank;

        let n = spec.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(derive(seed, "rank-one-foot"));
        for attempt in 0..FALLBACK_BUDGET {
            let w = if attempt == 0 { x0.clone() } else { self.unit(&gaussian(n, &mut rng))? };
            let tw = th.apply(&w);
            let r = gaussian(n, &mut rng);
            let a_vec = if spec.norm(tw.as_slice()) > self.tol().rank {
                let a0 = james_foot(spec, &tw, &r)?;
                &r + a0 * &tw
            } else {
                r
            };
            let Some(a_vec) = spec.normalize(&a_vec) else { continue };
            let a = rank_one(&a_vec, &self.functional(&w)?);
            let mut trace = Trace::new(Branch::RankOneFoot);
            trace.x1 = Some(x0.clone());
            trace.u = Some(a_vec);
            trace.w = Some(w);
            trace.attempts = Some(attempt + 1);
            trace.rejected = rejected.clone();
            if let Some(c) = self.certify(t, &a, Direction::RefutesRightSymmetry, &trace, seed)? {
                return Ok(c);
            }
        }
        if restricted_zero {
            return Err(Error::TRestrictedZero);
        }
        Err(Error::BudgetExhausted(format!(
            "no right-symmetry witness for {t} after {FALLBACK_BUDGET} rank-one draws"
        )))
    }

    /// `h₀ ∈ ker f_{x₀}` scaled so `‖Th₀‖ > ‖T‖`, `z′ = (x₀ + h₀)/‖x₀ + h₀‖`,
    /// `d` the foot with `(d·Tz′ + Th₀) ⊥_B Tz′`, and
    /// `A = (d·Tz′ + Th₀) ⊗ f_{z′}`.
    fn tilted_maximizer(
        &self,
        t: &LinearOperator,
        th: &LinearOperator,
        x0: &VectorR,
        h: &VectorR,
        th_norm: f64,
        seed: u64,
    ) -> Result<Option<WitnessCertificate>> {
        let spec = self.spec();
        for scale in [2.0, 4.0, 1.25] {
            let h0 = h * (scale / th_norm);
            let z = self.unit(&(x0 + &h0))?;
            let tz = th.apply(&z);
            if spec.norm(tz.as_slice()) <= self.tol().rank {
                continue;
            }
            let th0 = th.apply(&h0);
            let d = james_foot(spec, &tz, &th0)?;
            let image = d * &tz + &th0;
            if spec.norm(image.as_slice()) <= self.tol().rank {
                continue;
            }
            let a = rank_one(&image, &self.functional(&z)?);
            let mut trace = Trace::new(Branch::TiltedMaximizer);
            trace.x1 = Some(x0.clone());
            trace.h0 = Some(h0);
            trace.z = Some(z);
            trace.d = Some(d);
            if let Some(c) = self.certify(t, &a, Direction::RefutesRightSymmetry, &trace, seed)? {
                return Ok(Some(c));
            }
        }
        Ok(None)
    }

    /// Singular values, largest first.
    fn singular_values(t: &LinearOperator) -> Vec<f64> {
        let mut s: Vec<f64> = t.0.clone().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Orthonormal (Euclidean) basis of `ker T` at the numerical-rank cut-off.
    fn kernel(&self, t: &LinearOperator) -> Vec<VectorR> {
        let n = t.dim();
        let svd = t.0.clone().svd(false, true);
        let v_t = svd.v_t.expect("requested");
        let smax = svd.singular_values.max();
        (0..n)
            .filter(|&i| svd.singular_values[i] <= self.tol().rank * smax)
            .map(|i| v_t.row(i).transpose())
            .collect()
    }

    /// `A = ½(I + u₀ ⊗ f_{u₀})`, built on the basis `{u₀} ∪ ker f_{u₀}` as
    /// `Au₀ = u₀` and `Ah = ½h`.
    fn half_identity(&self, u0: &VectorR) -> Result<LinearOperator> {
        let f = self.functional(u0)?;
        let hyper = kernel_basis(self.spec(), &f);
        let mut basis = vec![u0.clone()];
        let mut images = vec![u0.clone()];
        for h in hyper {
            images.push(0.5 * &h);
            basis.push(h);
        }
        from_basis(&basis, &images).ok_or_else(|| Error::HypothesisFailed("degenerate basis around u0".into()))
    }

    /// Rank dichotomy for `T` with `M_T = {±x₀}`, `Tx₀ ∥ x₀`, and `x₀` left
    /// symmetric: either `rank T ≥ n − 1`, or there is a witness `A` with
    /// `A ⊥_B T` and `T ̸⊥_B A`.
    pub fn eigen_kernel_check(&self, t: &LinearOperator, seed: u64) -> Result<EigenKernelReport> {
        self.spec().check_dim(t.dim())?;
        if t.is_zero() {
            return Err(Error::ZeroOperator);
        }
        let spec = self.spec();
        let n = spec.dim();
        let att = self.space.attainment(t)?;
        let x0 = att
            .single_pair()
            .cloned()
            .ok_or_else(|| Error::HypothesisFailed("norm is not attained at a single pair".into()))?;
        let tx0 = t.apply(&x0);
        let eigenvalue = tx0.dot(&x0) / x0.dot(&x0);
        if (&tx0 - eigenvalue * &x0).norm() > self.tol().orth * tx0.norm() {
            return Err(Error::HypothesisFailed("maximizer is not an eigenvector".into()));
        }
        if is_left_symmetric_point(spec, &x0, self.budget, derive(seed, "x0-left"))?.is_refuted() {
            return Err(Error::HypothesisFailed("maximizer is not a left symmetric point".into()));
        }
        let sv = Self::singular_values(t);
        let rank = sv.iter().filter(|s| **s > self.tol().rank * sv[0]).count();
        if rank + 1 >= n {
            return Ok(EigenKernelReport {
                case: EigenKernelCase::RankGeNMinus1,
                rank,
                x0,
                eigenvalue,
                certificate: None,
            });
        }
        // u₀ ∈ ker f_{x₀} ∩ ker T: null space of T stacked on f_{x₀}.
        let f0 = self.functional(&x0)?;
        let mut stacked = DMatrix::zeros(n + 1, n);
        stacked.rows_mut(0, n).copy_from(&t.0);
        stacked.row_mut(n).copy_from(&f0.transpose());
        let svd = stacked.svd(false, true);
        let v_t = svd.v_t.expect("requested");
        let k = svd.singular_values.imin();
        let u0 = self.unit(&v_t.row(k).transpose())?;
        let a = self.half_identity(&u0)?;
        let mut trace = Trace::new(Branch::HalfIdentity);
        trace.x1 = Some(x0.clone());
        trace.u0 = Some(u0);
        let certificate = self
            .certify(t, &a, Direction::RefutesRightSymmetry, &trace, seed)?
            .ok_or_else(|| Error::BudgetExhausted("half-identity witness did not certify".into()))?;
        Ok(EigenKernelReport {
            case: EigenKernelCase::Witness,
            rank,
            x0,
            eigenvalue,
            certificate: Some(certificate),
        })
    }

    /// For `T` with `M_T = {±x₀}` and a left symmetric unit `u₀ ∈ ker T`:
    /// `I ⊥_B T` always, and either `T ⊥_B I` or there is a witness `A` with
    /// `A ⊥_B T` and `T ̸⊥_B A`.
    pub fn identity_kernel_check(&self, t: &LinearOperator, seed: u64) -> Result<IdentityKernelReport> {
        self.spec().check_dim(t.dim())?;
        if t.is_zero() {
            return Err(Error::ZeroOperator);
        }
        let spec = self.spec();
        let n = spec.dim();
        let att = self.space.attainment(t)?;
        let x0 = att
            .single_pair()
            .cloned()
            .ok_or_else(|| Error::HypothesisFailed("norm is not attained at a single pair".into()))?;
        let kernel = self.kernel(t);
        if kernel.is_empty() {
            return Err(Error::HypothesisFailed("T has trivial kernel".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive(seed, "kernel-point"));
        let mut candidates: Vec<VectorR> = kernel.iter().filter_map(|k| spec.normalize(k)).collect();
        if kernel.len() > 1 {
            for _ in 0..8 {
                let raw = combination(&kernel, &mut rng);
                if let Some(u) = spec.normalize(&raw) {
                    candidates.push(u);
                }
            }
        }
        let mut u0 = None;
        for (i, c) in candidates.iter().enumerate() {
            let s = is_left_symmetric_point(spec, c, self.budget, derive(seed, &format!("u0-left-{i}")))?;
            if !s.is_refuted() {
                u0 = Some(c.clone());
                break;
            }
        }
        let u0 = u0.ok_or_else(|| Error::HypothesisFailed("no left symmetric point found in ker T".into()))?;
        let u0 = {
            let k = u0.iamax();
            if u0[k] < 0.0 { -u0 } else { u0 }
        };

        let id = LinearOperator::identity(n);
        let i_perp_t = self.space.bj_orthogonal(&id, t)?;
        let t_perp_i = self.space.bj_orthogonal(t, &id)?;
        if t_perp_i.is_orthogonal() {
            return Ok(IdentityKernelReport {
                case: IdentityKernelCase::MutualWithIdentity,
                x0,
                u0,
                i_perp_t,
                t_perp_i,
                certificate: None,
            });
        }
        let a = self.half_identity(&u0)?;
        let mut trace = Trace::new(Branch::HalfIdentity);
        trace.x1 = Some(x0.clone());
        trace.u0 = Some(u0.clone());
        let certificate = self
            .certify(t, &a, Direction::RefutesRightSymmetry, &trace, seed)?
            .ok_or_else(|| Error::BudgetExhausted("half-identity witness did not certify".into()))?;
        Ok(IdentityKernelReport {
            case: IdentityKernelCase::Witness,
            x0,
            u0,
            i_perp_t,
            t_perp_i,
            certificate: Some(certificate),
        })
    }

    /// Samples `trials` directions `y` with `x ⊥_B y` for a maximizer `x` of
    /// `T` and checks `Tx ⊥_B Ty` for each.
    pub fn transfer_check(&self, t: &LinearOperator, trials: usize, seed: u64) -> Result<TransferReport> {
        self.spec().check_dim(t.dim())?;
        if t.is_zero() {
            return Err(Error::ZeroOperator);
        }
        self.require_smooth()?;
        let spec = self.spec();
        let att = self.space.attainment(t)?;
        if att.shape != AttainmentShape::Finite {
            return Err(Error::HypothesisFailed("norm-attainment set is not resolved".into()));
        }
        let x = att.maximizers[0].clone();
        let tx = t.apply(&x);
        let hyper = kernel_basis(spec, &self.functional(&x)?);
        let mut rng = ChaCha8Rng::seed_from_u64(derive(seed, "transfer"));
        let (mut passed, mut worst_margin, mut worst_slope) = (0, 0.0f64, f64::NEG_INFINITY);
        for _ in 0..trials {
            let y = combination(&hyper, &mut rng);
            let v = is_bj_orthogonal_with(spec, &tx, &t.apply(&y), self.tol().orth)?;
            if v.is_orthogonal() {
                passed += 1;
            }
            worst_margin = worst_margin.min(v.margin);
            worst_slope = worst_slope.max(v.deriv_minus.max(-v.deriv_plus));
        }
        Ok(TransferReport { x, trials, passed, worst_margin, worst_slope })
    }
}

/// Both routes, both orders, on `diag(1, ½, ½)` and `diag(0, 1, 0)` in
/// Euclidean `ℝ³`.
pub fn diagonal_pair_check() -> Result<DiagonalPairReport> {
    let spec = NormSpec::lp(2.0, 3)?;
    let space = OperatorSpace::new(&spec);
    let t = LinearOperator::diag(&[1.0, 0.5, 0.5]);
    let a = LinearOperator::diag(&[0.0, 1.0, 0.0]);
    let t_perp_a = space.bj_orthogonal(&t, &a)?;
    let a_perp_t = space.bj_orthogonal(&a, &t)?;
    let t_perp_a_via_attainment = space.bj_orthogonal_via_attainment(&t, &a)?;
    let a_perp_t_via_attainment = space.bj_orthogonal_via_attainment(&a, &t)?;
    let holds = t_perp_a.is_orthogonal()
        && a_perp_t.decision == Decision::NotOrthogonal
        && t_perp_a_via_attainment.decision == t_perp_a.decision
        && a_perp_t_via_attainment.decision == a_perp_t.decision;
    Ok(DiagonalPairReport { t_perp_a, a_perp_t, t_perp_a_via_attainment, a_perp_t_via_attainment, holds })
}

pub fn refute_left_symmetry(spec: &NormSpec, t: &LinearOperator, seed: u64) -> Result<WitnessCertificate> {
    SymmetryLab::new(spec).refute_left_symmetry(t, seed)
}

pub fn refute_right_symmetry_smooth(spec: &NormSpec, t: &LinearOperator, seed: u64) -> Result<WitnessCertificate> {
    SymmetryLab::new(spec).refute_right_symmetry_smooth(t, seed)
}

pub fn eigen_kernel_check(spec: &NormSpec, t: &LinearOperator, seed: u64) -> Result<EigenKernelReport> {
    SymmetryLab::new(spec).eigen_kernel_check(t, seed)
}

pub fn identity_kernel_check(spec: &NormSpec, t: &LinearOperator, seed: u64) -> Result<IdentityKernelReport> {
    SymmetryLab::new(spec).identity_kernel_check(t, seed)
}

pub fn transfer_check(spec: &NormSpec, t: &LinearOperator, trials: usize, seed: u64) -> Result<TransferReport> {
    SymmetryLab::new(spec).transfer_check(t, trials, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(p: f64, n: usize) -> NormSpec {
        NormSpec::lp(p, n).unwrap()
    }

    fn op(s: &str) -> LinearOperator {
        s.parse().unwrap()
    }

    #[test]
    fn left_witness_for_diagonal() {
        let c = refute_left_symmetry(&lp(3.0, 2), &LinearOperator::diag(&[1.0, 0.5]), 1).unwrap();
        assert_eq!(c.direction, Direction::RefutesLeftSymmetry);
        assert!(c.forward.is_orthogonal());
        assert!(c.backward.margin < -1e-5);
    }

    #[test]
    fn rank_one_uses_two_point_construction() {
        // T vanishes on the hyperplane orthogonal to its maximizer e₁.
        let c = refute_left_symmetry(&lp(3.0, 3), &op("1,0,0;0,0,0;0,0,0"), 5).unwrap();
        assert_eq!(c.trace.branch, Branch::TwoPoint);
        let (d, e, t0) = (c.trace.delta.unwrap(), c.trace.epsilon.unwrap(), c.trace.t0.unwrap());
        assert!(0.0 < d && d < 1.0 && 0.0 < e && e < d / (3.0 - d) && 0.0 < t0 && t0 < 1.0);
    }

    #[test]
    fn zero_and_nonsmooth_are_rejected() {
        let z = LinearOperator::zero(2);
        assert_eq!(refute_left_symmetry(&lp(3.0, 2), &z, 0).unwrap_err(), Error::ZeroOperator);
        assert_eq!(refute_right_symmetry_smooth(&lp(3.0, 2), &z, 0).unwrap_err(), Error::ZeroOperator);
        let e = refute_left_symmetry(&lp(1.0, 2), &LinearOperator::identity(2), 0).unwrap_err();
        assert!(matches!(e, Error::SpecNotScSmooth(_)));
    }

    #[test]
    fn right_witness_and_identity_rejection() {
        let c = refute_right_symmetry_smooth(&lp(3.0, 2), &LinearOperator::diag(&[2.0, 1.0]), 1).unwrap();
        assert_eq!(c.direction, Direction::RefutesRightSymmetry);
        assert_eq!(
            refute_right_symmetry_smooth(&lp(2.0, 2), &LinearOperator::identity(2), 1).unwrap_err(),
            Error::NotAntipodalMt
        );
    }

    #[test]
    fn half_identity_matches_closed_form() {
        let spec = lp(3.0, 3);
        let lab = SymmetryLab::new(&spec);
        let u0 = spec.normalize(&DVector::from_vec(vec![0.2, -1.0, 0.7])).unwrap();
        let a = lab.half_identity(&u0).unwrap();
        let f = spec.supporting_functional(&u0).unwrap().0;
        let closed = (DMatrix::identity(3, 3) + &u0 * f.transpose()) * 0.5;
        assert!((a.0 - closed).amax() < 1e-12);
    }

    #[test]
    fn eigen_kernel_cases() {
        let spec = lp(3.0, 3);
        let r = eigen_kernel_check(&spec, &LinearOperator::diag(&[2.0, 1.0, 0.0]), 1).unwrap();
        assert_eq!(r.case, EigenKernelCase::RankGeNMinus1);
        let r = eigen_kernel_check(&spec, &LinearOperator::diag(&[2.0, 0.0, 0.0]), 1).unwrap();
        assert_eq!(r.case, EigenKernelCase::Witness);
        assert!(r.certificate.is_some());
    }

    #[test]
    fn identity_kernel_instance() {
        let r = identity_kernel_check(&lp(3.0, 3), &LinearOperator::diag(&[0.0, 1.0, 0.5]), 1).unwrap();
        assert!(r.i_perp_t.is_orthogonal());
        assert_eq!(r.t_perp_i.decision, Decision::NotOrthogonal);
        assert_eq!(r.case, IdentityKernelCase::Witness);
        let e = identity_kernel_check(&lp(3.0, 3), &LinearOperator::diag(&[1.0, 0.5, 0.25]), 1).unwrap_err();
        assert!(matches!(e, Error::HypothesisFailed(_)));
    }

    #[test]
    fn transfer_on_diagonal() {
        let r = transfer_check(&lp(3.0, 2), &LinearOperator::diag(&[2.0, 1.0]), 20, 3).unwrap();
        assert!(r.all_passed());
    }

    #[test]
    fn diagonal_pair() {
        assert!(diagonal_pair_check().unwrap().holds);
    }

    #[test]
    fn certificate_json_round_trip() {
        let c = refute_left_symmetry(&lp(2.0, 2), &op("1,0.5;0,0.3"), 2).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        let back: WitnessCertificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
