//! Linear operators on a normed `ℝⁿ`: operator norm, the norm-attainment set
//! `M_T`, and operator-level Birkhoff-James orthogonality.
//!
//! Two routes decide `T ⊥_B A`:
//!
//! * **direct**: minimize the convex map `λ ↦ ‖T + λA‖` (each evaluation is a
//!   global operator-norm search) and test its one-sided slopes at `λ = 0`;
//! * **via attainment**: `T ⊥_B A` iff some `x ∈ M_T` has `Ax ∈ (Tx)⁺` and
//!   some `y ∈ M_T` has `Ay ∈ (Ty)⁻`. This only needs `M_T`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minimize::{golden_section, minimize_convex};
use crate::norm::{parse_real, NormSpec, VectorR, MAX_DIM};
use crate::orthogonality::{decide, is_bj_orthogonal_with, Decision, OrthoVerdict};
use crate::settings::{SearchSettings, Tolerances};

/// A real `n×n` matrix acting on coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator(pub DMatrix<f64>);

impl LinearOperator {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Parse(format!("operator must be square, got {}x{}", m.nrows(), m.ncols())));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse("operator has non-finite entries".into()));
        }
        Ok(LinearOperator(m))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parse("operator rows must form a nonempty square matrix".into()));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        LinearOperator(DMatrix::identity(n, n))
    }

    pub fn zero(n: usize) -> Self {
        LinearOperator(DMatrix::zeros(n, n))
    }

    pub fn diag(d: &[f64]) -> Self {
        LinearOperator(DMatrix::from_diagonal(&DVector::from_column_slice(d)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|v| *v == 0.0)
    }

    pub fn apply(&self, x: &VectorR) -> VectorR {
        &self.0 * x
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.0.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        LinearOperator(&self.0 * s)
    }

    /// `self + s·other`.
    pub fn plus_scaled(&self, s: f64, other: &LinearOperator) -> Self {
        LinearOperator(&self.0 + &other.0 * s)
    }
}

/// `out = m·x` for a column-major `n×n` matrix.
#[inline]
fn apply_into(m: &[f64], n: usize, x: &[f64], out: &mut [f64]) {
    out[..n].fill(0.0);
    for (j, &xj) in x.iter().enumerate().take(n) {
        let col = &m[j * n..(j + 1) * n];
        for i in 0..n {
            out[i] += col[i] * xj;
        }
    }
}

fn fmt_entry(v: f64) -> String {
    if v == 0.0 || (1e-5..1e16).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl fmt::Display for LinearOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .0
            .row_iter()
            .map(|r| r.iter().map(|v| fmt_entry(*v)).collect::<Vec<_>>().join(","))
            .collect();
        f.write_str(&rows.join(";"))
    }
}

impl FromStr for LinearOperator {
    type Err = Error;

    /// Rows separated by `;`, entries by `,`: `1,0;0,0.5`.
    fn from_str(s: &str) -> Result<Self> {
        let rows = s
            .trim()
            .split(';')
            .map(|row| row.split(',').map(parse_real).collect::<Result<Vec<f64>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(&rows)
    }
}

impl Serialize for LinearOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinearOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        Self::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AttainmentShape {
    /// `T = 0`: every unit vector attains, nothing is reported.
    Zero,
    /// Finitely many antipodal pairs.
    Finite,
    /// The maximizers do not separate into isolated pairs (e.g. `T = I`).
    Continuum,
}

/// Operator norm with the computed attainment set `M_T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormAttainment {
    pub op_norm: f64,
    /// One unit vector per antipodal pair, sign fixed so the largest
    /// coordinate is positive.
    #[serde(with = "crate::serde_vec::list")]
    pub maximizers: Vec<VectorR>,
    /// `op_norm` minus the best value found away from every maximizer.
    pub cluster_gap: f64,
    pub shape: AttainmentShape,
}

impl NormAttainment {
    /// The maximizer when `M_T` is a single antipodal pair.
    pub fn single_pair(&self) -> Option<&VectorR> {
        (self.shape == AttainmentShape::Finite && self.maximizers.len() == 1).then(|| &self.maximizers[0])
    }
}

/// Output of the smooth-operator proxy: the consequences of operator
/// smoothness that the right-symmetry construction uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothProxy {
    pub antipodal_mt: bool,
    #[serde(with = "crate::serde_vec::option")]
    pub x0: Option<VectorR>,
    pub image_smooth: bool,
}

/// Refinement seeds kept after clustering the best samples.
const MAX_SEEDS: usize = 16;
/// Antipodal distance separating two seed clusters.
const SEED_RADIUS: f64 = 0.25;
/// Refined points closer than this are the same maximizer.
const MERGE_RADIUS: f64 = 1e-4;
/// Samples inside this radius of a maximizer do not count towards the gap.
const EXCLUSION_RADIUS: f64 = 0.1;
/// More maximizer pairs than this are read as a continuum.
const MAX_PAIRS: usize = 8;
const POWER_ITERS: usize = 500;

/// `min(‖a − b‖, ‖a + b‖)` in Euclidean coordinates.
fn antipodal_dist(a: &[f64], b: &[f64]) -> f64 {
    let (mut d_minus, mut d_plus) = (0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        d_minus += (x - y) * (x - y);
        d_plus += (x + y) * (x + y);
    }
    d_minus.min(d_plus).sqrt()
}

fn canonical_sign(mut x: VectorR) -> VectorR {
    let k = x.iamax();
    if x[k] < 0.0 {
        x.neg_mut();
    }
    x
}

/// Starting points of the global search.
enum Candidates {
    /// Vertices of a polytope unit ball; the maximum is exact.
    Vertices(Vec<f64>),
    /// Angular grid on the half circle, cyclic under `u ↦ −u`.
    Circle(Vec<f64>),
    /// Random unit vectors.
    Cloud(Vec<f64>),
}

struct Search {
    op: f64,
    /// Refined local maxima, best first.
    peaks: Vec<(VectorR, f64)>,
    /// `‖Tu‖` for every candidate point, possibly as a gauge.
    values: Vec<f64>,
    gauged: bool,
}

/// A normed space together with the settings for operator-norm searches on
/// it. Building one samples the unit sphere once; reuse it across calls.
pub struct OperatorSpace {
    spec: NormSpec,
    settings: SearchSettings,
    tol: Tolerances,
    candidates: Candidates,
}

impl OperatorSpace {
    pub fn new(spec: &NormSpec) -> Self {
        Self::with_settings(spec, SearchSettings::default(), Tolerances::default())
    }

    pub fn with_settings(spec: &NormSpec, settings: SearchSettings, tol: Tolerances) -> Self {
        let n = spec.dim();
        let candidates = if !spec.is_smooth() {
            Candidates::Vertices(spec.vertices().iter().flatten().copied().collect())
        } else if n == 2 {
            let m = settings.grid_2d.max(8);
            let mut pts = Vec::with_capacity(2 * m);
            for k in 0..m {
                let th = std::f64::consts::PI * k as f64 / m as f64;
                let u = DVector::from_column_slice(&[th.cos(), th.sin()]);
                pts.extend(spec.normalize(&u).expect("nonzero").iter());
            }
            Candidates::Circle(pts)
        } else {
            let pts = spec.sphere_sample(settings.samples.max(1), settings.sample_seed);
            Candidates::Cloud(pts.iter().flat_map(|u| u.iter().copied()).collect())
        };
        OperatorSpace { spec: spec.clone(), settings, tol, candidates }
    }

    pub fn spec(&self) -> &NormSpec {
        &self.spec
    }

    pub fn settings(&self) -> &SearchSettings {
        &self.settings
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// The same space searched at twice the resolution.
    pub fn doubled(&self) -> Self {
        Self::with_settings(&self.spec, self.settings.doubled(), self.tol)
    }

    fn check(&self, t: &LinearOperator) -> Result<()> {
        self.spec.check_dim(t.dim())
    }

    fn candidate_points(&self) -> &[f64] {
        match &self.candidates {
            Candidates::Vertices(p) | Candidates::Circle(p) | Candidates::Cloud(p) => p,
        }
    }

    /// `‖Tx‖` for a unit `x`.
    fn value(&self, m: &[f64], x: &[f64]) -> f64 {
        let n = self.spec.dim();
        let mut buf = [0.0; MAX_DIM];
        apply_into(m, n, x, &mut buf);
        self.spec.norm(&buf[..n])
    }

    fn search(&self, t: &LinearOperator) -> Search {
        let n = self.spec.dim();
        let m = t.0.as_slice();
        let pts = self.candidate_points();
        // Rank by the root-free gauge when entries are in a safe range.
        let amax = t.0.amax();
        let gauged = (1e-30..1e30).contains(&amax);
        let values: Vec<f64> = if gauged {
            self.gauges(m, pts)
        } else {
            pts.chunks_exact(n).map(|u| self.value(m, u)).collect()
        };
        if t.is_zero() {
            return Search { op: 0.0, peaks: Vec::new(), values, gauged };
        }
        let point = |i: usize| DVector::from_column_slice(&pts[i * n..(i + 1) * n]);

        if let Candidates::Vertices(_) = self.candidates {
            let values: Vec<f64> = values.iter().map(|v| self.norm_of_gauge(*v, gauged)).collect();
            let op = values.iter().copied().fold(0.0, f64::max);
            let mut order: Vec<usize> = (0..values.len()).collect();
            order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
            let peaks = order.into_iter().map(|i| (canonical_sign(point(i)), values[i])).collect();
            return Search { op, peaks, values, gauged: false };
        }

        // Local maxima of the circle grid, or the best cloud samples.
        let mut starts: Vec<usize> = match self.candidates {
            Candidates::Circle(_) => {
                let k = values.len();
                (0..k)
                    .filter(|&i| {
                        let v = values[i];
                        v >= values[(i + k - 1) % k] && v >= values[(i + 1) % k]
                    })
                    .collect()
            }
            _ => (0..values.len()).collect(),
        };
        // Ties keep the lowest index first.
        let by_value = |a: &usize, b: &usize| values[*b].total_cmp(&values[*a]).then(a.cmp(b));
        if let Candidates::Cloud(_) = self.candidates {
            let k = self.settings.top_k.max(1);
            if starts.len() > k {
                starts.select_nth_unstable_by(k - 1, by_value);
                starts.truncate(k);
            }
        }
        starts.sort_by(by_value);

        let mut seeds: Vec<usize> = Vec::new();
        for &i in &starts {
            let u = &pts[i * n..(i + 1) * n];
            if seeds.iter().all(|&s| antipodal_dist(u, &pts[s * n..(s + 1) * n]) > SEED_RADIUS) {
                seeds.push(i);
                if seeds.len() == MAX_SEEDS {
                    break;
                }
            }
        }

        let mut peaks: Vec<(VectorR, f64)> = Vec::with_capacity(seeds.len());
        for &s in &seeds {
            let mut x = point(s);
            if let Candidates::Circle(_) = self.candidates {
                x = self.refine_angle(m, s, values.len());
            }
            let (x, v) = self.polish(t, x);
            peaks.push((canonical_sign(x), v));
        }
        peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
        let mut merged: Vec<(VectorR, f64)> = Vec::with_capacity(peaks.len());
        for (x, v) in peaks {
            if merged.iter().all(|(y, _)| antipodal_dist(x.as_slice(), y.as_slice()) > MERGE_RADIUS) {
                merged.push((x, v));
            }
        }
        let best_sample = self.norm_of_gauge(values.iter().copied().fold(0.0, f64::max), gauged);
        let op = merged.first().map_or(0.0, |p| p.1).max(best_sample);
        Search { op, peaks: merged, values, gauged }
    }

    /// Gauge of `T u` for every candidate `u`, with the exponent dispatched
    /// once outside the loop.
    fn gauges(&self, m: &[f64], pts: &[f64]) -> Vec<f64> {
        fn run<F: Fn(f64) -> f64>(m: &[f64], n: usize, pts: &[f64], w: &[f64], pw: F) -> Vec<f64> {
            let count = pts.len() / n;
            let mm = nalgebra::DMatrixView::from_slice(m, n, n);
            let pv = nalgebra::DMatrixView::from_slice(pts, n, count);
            let img = mm * pv;
            img.as_slice()
                .chunks_exact(n)
                .map(|y| y.iter().zip(w).map(|(a, b)| pw((a * b).abs())).sum())
                .collect()
        }
        let n = self.spec.dim();
        if !self.spec.is_smooth() {
            let mut buf = [0.0; MAX_DIM];
            return pts
                .chunks_exact(n)
                .map(|u| {
                    apply_into(m, n, u, &mut buf);
                    self.spec.norm(&buf[..n])
                })
                .collect();
        }
        let w = self.spec.weights();
        match self.spec.p() {
            Some(p) if p == 2.0 => run(m, n, pts, w, |a| a * a),
            Some(p) if p == 3.0 => run(m, n, pts, w, |a| a * a * a),
            Some(p) if p == 1.5 => run(m, n, pts, w, |a| a * a.sqrt()),
            Some(p) => run(m, n, pts, w, |a| a.powf(p)),
            None => unreachable!("smooth families have an exponent"),
        }
    }

    fn norm_of_gauge(&self, v: f64, gauged: bool) -> f64 {
        if gauged {
            self.spec.from_gauge(v)
        } else {
            v
        }
    }

    /// Golden-section search on the angle around grid point `k` of `m`.
    fn refine_angle(&self, mat: &[f64], k: usize, m: usize) -> VectorR {
        let step = std::f64::consts::PI / m as f64;
        let th0 = step * k as f64;
        let at = |th: f64| {
            let u = DVector::from_column_slice(&[th.cos(), th.sin()]);
            self.spec.normalize(&u).expect("nonzero")
        };
        let best = golden_section(&mut |th| -self.value(mat, at(th).as_slice()), th0 - step, th0 + step, 1e-12);
        at(best.arg)
    }

    /// Fixed-point iteration `x ← J⁻¹(Tᵀ J(Tx))`, with `J` the duality map.
    /// `‖Tx‖` never decreases along it, and its fixed points are the
    /// critical points of `‖Tx‖` on the sphere. When two competing maxima
    /// are close in value the steps shrink slowly; a line search along the
    /// last step then jumps ahead.
    fn polish(&self, t: &LinearOperator, mut x: VectorR) -> (VectorR, f64) {
        let m = t.0.as_slice();
        let mut v = self.value(m, x.as_slice());
        let mut stalls = 0;
        let mut prev_step = f64::INFINITY;
        for _ in 0..POWER_ITERS {
            let y = t.apply(&x);
            let Ok(g) = self.spec.supporting_functional(&y) else { break };
            let h = t.0.tr_mul(g.coeffs());
            let Some(mut next) = self.spec.dual_preimage(h.as_slice()) else { break };
            let mut nv = self.value(m, next.as_slice());
            if nv < v * (1.0 - 4.0 * f64::EPSILON) {
                break;
            }
            let step = (&next - &x).amax();
            if step > 1e-12 && step > 0.5 * prev_step {
                let (z, zv) = self.extrapolate(m, &x, &(&next - &x), nv);
                if zv > nv {
                    next = z;
                    nv = zv;
                }
            }
            prev_step = step;
            stalls = if nv <= v { stalls + 1 } else { 0 };
            x = next;
            v = v.max(nv);
            if step <= 1e-15 || stalls >= 3 {
                break;
            }
        }
        (x, v)
    }

    /// Maximizes `s ↦ ‖T (x + s·d)/‖x + s·d‖‖` for `s ≥ 1`, given its value
    /// `v1` at `s = 1`. Gains near `s = 2` can be below rounding on flat
    /// ridges, so the whole range `s = 2ᵏ` is scanned before refining.
    fn extrapolate(&self, m: &[f64], x: &VectorR, d: &VectorR, v1: f64) -> (VectorR, f64) {
        let at = |s: f64| self.spec.normalize(&(x + s * d));
        let g = |s: f64| at(s).map_or(f64::NEG_INFINITY, |u| self.value(m, u.as_slice()));
        let (mut best_s, mut best) = (1.0, v1);
        let mut s = 2.0;
        for _ in 0..40 {
            let v = g(s);
            if v > best {
                (best_s, best) = (s, v);
            }
            s *= 2.0;
        }
        let r = golden_section(&mut |s| -g(s), 0.5 * best_s, 2.0 * best_s, 1e-9 * best_s);
        let s = if -r.value > best { r.arg } else { best_s };
        match at(s) {
            Some(u) => {
                let val = self.value(m, u.as_slice());
                (u, val)
            }
            None => (x.clone(), f64::NEG_INFINITY),
        }
    }

    /// `‖T‖ = max_{‖x‖=1} ‖Tx‖`.
    pub fn norm(&self, t: &LinearOperator) -> Result<f64> {
        self.check(t)?;
        Ok(self.search(t).op)
    }

    /// `‖T‖` together with the attainment set `M_T`.
    pub fn attainment(&self, t: &LinearOperator) -> Result<NormAttainment> {
        self.check(t)?;
        let s = self.search(t);
        if s.op == 0.0 {
            return Ok(NormAttainment {
                op_norm: 0.0,
                maximizers: Vec::new(),
                cluster_gap: 0.0,
                shape: AttainmentShape::Zero,
            });
        }
        let n = self.spec.dim();
        let m = t.0.as_slice();
        let floor = s.op * (1.0 - self.tol.mt);
        let (maximizers, others): (Vec<_>, Vec<_>) = s.peaks.into_iter().partition(|p| p.1 >= floor);
        let maximizers: Vec<VectorR> = maximizers.into_iter().map(|p| p.0).collect();

        let far = |u: &[f64]| maximizers.iter().all(|x| antipodal_dist(u, x.as_slice()) >= EXCLUSION_RADIUS);
        let best_far = self
            .candidate_points()
            .chunks_exact(n)
            .zip(&s.values)
            .filter(|(u, _)| far(u))
            .map(|(_, v)| self.norm_of_gauge(*v, s.gauged))
            .chain(others.iter().filter(|p| far(p.0.as_slice())).map(|p| p.1))
            .fold(f64::NEG_INFINITY, f64::max);
        let cluster_gap = if best_far.is_finite() { s.op - best_far } else { s.op };

        // Two maximizers whose normalized midpoint also attains lie on a
        // common flat piece of the maximizing set.
        let mut joined = false;
        for i in 0..maximizers.len() {
            for j in i + 1..maximizers.len() {
                for sg in [1.0, -1.0] {
                    let mid = &maximizers[i] + sg * &maximizers[j];
                    if let Some(u) = self.spec.normalize(&mid) {
                        joined |= self.value(m, u.as_slice()) >= floor;
                    }
                }
            }
        }
        let continuum = joined || maximizers.len() > MAX_PAIRS || cluster_gap < self.tol.mt * s.op;
        Ok(NormAttainment {
            op_norm: s.op,
            maximizers,
            cluster_gap,
            shape: if continuum { AttainmentShape::Continuum } else { AttainmentShape::Finite },
        })
    }

    fn checked_pair(&self, t: &LinearOperator, a: &LinearOperator) -> Result<Option<OrthoVerdict>> {
        self.check(t)?;
        self.check(a)?;
        if t.is_zero() {
            return Ok(Some(OrthoVerdict::trivially_orthogonal(true)));
        }
        if a.is_zero() {
            return Ok(Some(OrthoVerdict::trivially_orthogonal(false)));
        }
        Ok(None)
    }

    /// `T ⊥_B A` from the definition: minimize `λ ↦ ‖T̂ + λÂ‖` over `λ` on
    /// operator-norm-normalized inputs. Slopes at `λ = 0` are secant
    /// quotients, Richardson-extrapolated unless a kink sits within reach.
    pub fn bj_orthogonal(&self, t: &LinearOperator, a: &LinearOperator) -> Result<OrthoVerdict> {
        if let Some(v) = self.checked_pair(t, a)? {
            return Ok(v);
        }
        let nt = self.search(t).op;
        let na = self.search(a).op;
        if na == 0.0 {
            return Ok(OrthoVerdict::trivially_orthogonal(false));
        }
        let th = t.scaled(1.0 / nt);
        let ah = a.scaled(1.0 / na);
        let f = |mu: f64| self.search(&th.plus_scaled(mu, &ah)).op;
        let f0 = f(0.0);
        let min = minimize_convex(f, 0.0, 2.0, self.settings.lambda_tol);
        let margin = (min.value - f0).min(0.0);

        let slope = |sign: f64| {
            let d = |h: f64| sign * (f(sign * h) - f0) / h;
            let (d5, d6) = (d(1e-5), d(1e-6));
            if (d5 - d6).abs() > 1e-3 {
                d6
            } else {
                (10.0 * d6 - d5) / 9.0
            }
        };
        let dp = slope(1.0);
        let dm = slope(-1.0);
        Ok(OrthoVerdict {
            decision: decide(margin, dm, dp, self.tol.orth),
            margin,
            lambda_star: min.arg * nt / na,
            deriv_plus: dp,
            deriv_minus: dm,
            degenerate: false,
        })
    }

    /// `T ⊥_B A` from the attainment set: orthogonal iff
    /// `max_{x∈M_T} ρ′₊(Tx, Ax) ≥ 0` and `min_{y∈M_T} ρ′₋(Ty, Ay) ≤ 0`.
    ///
    /// The reported margin is `max_{x∈M_T} min_λ ‖T̂x + λÂx‖ − 1`, a lower
    /// bound on the operator margin, so a negative one certifies `T ̸⊥_B A`.
    pub fn bj_orthogonal_via_attainment(&self, t: &LinearOperator, a: &LinearOperator) -> Result<OrthoVerdict> {
        if let Some(v) = self.checked_pair(t, a)? {
            return Ok(v);
        }
        let na = self.search(a).op;
        if na == 0.0 {
            return Ok(OrthoVerdict::trivially_orthogonal(false));
        }
        let att = self.attainment(t)?;
        if att.shape != AttainmentShape::Finite {
            return Err(Error::MtUnresolved);
        }
        let nt = att.op_norm;
        let (mut dm, mut dp) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut best: Option<(f64, f64)> = None;
        for x in &att.maximizers {
            let tx = t.apply(x) / nt;
            let ax = a.apply(x) / na;
            let (m, p) = self.spec.dir_derivs(&tx, &ax)?;
            dm = dm.min(m);
            dp = dp.max(p);
            let v = is_bj_orthogonal_with(&self.spec, &tx, &ax, self.tol.orth)?;
            let margin = v.margin * self.spec.norm(tx.as_slice());
            if best.is_none_or(|b| margin > b.0) {
                best = Some((margin, v.lambda_star));
            }
        }
        let (margin, lam) = best.expect("finite attainment set is nonempty");
        let decision = if dm <= self.tol.orth && dp >= -self.tol.orth {
            Decision::Orthogonal
        } else if margin < -self.tol.orth {
            Decision::NotOrthogonal
        } else {
            Decision::Indeterminate
        };
        Ok(OrthoVerdict {
            decision,
            margin,
            lambda_star: lam * nt / na,
            deriv_plus: dp,
            deriv_minus: dm,
            degenerate: false,
        })
    }

    /// Whether `M_T` is one antipodal pair `{±x₀}` and `Tx₀` is a smooth point.
    pub fn smooth_proxy(&self, t: &LinearOperator) -> Result<SmoothProxy> {
        self.check(t)?;
        if t.is_zero() {
            return Err(Error::ZeroOperator);
        }
        let att = self.attainment(t)?;
        Ok(match att.single_pair() {
            Some(x0) => SmoothProxy {
                antipodal_mt: true,
                image_smooth: self.spec.supporting_functional(&t.apply(x0)).is_ok(),
                x0: Some(x0.clone()),
            },
            None => SmoothProxy { antipodal_mt: false, x0: None, image_smooth: false },
        })
    }
}

/// `‖T‖` and `M_T` with default search settings.
pub fn operator_norm(spec: &NormSpec, t: &LinearOperator) -> Result<NormAttainment> {
    OperatorSpace::new(spec).attainment(t)
}

/// `T ⊥_B A` by minimizing `λ ↦ ‖T + λA‖`.
pub fn op_bj_orthogonal_direct(spec: &NormSpec, t: &LinearOperator, a: &LinearOperator) -> Result<OrthoVerdict> {
    OperatorSpace::new(spec).bj_orthogonal(t, a)
}

/// `T ⊥_B A` by cone tests over the attainment set of `T`.
pub fn op_bj_orthogonal_via_attainment(spec: &NormSpec, t: &LinearOperator, a: &LinearOperator) -> Result<OrthoVerdict> {
    OperatorSpace::new(spec).bj_orthogonal_via_attainment(t, a)
}

pub fn is_smooth_operator_proxy(spec: &NormSpec, t: &LinearOperator) -> Result<SmoothProxy> {
    OperatorSpace::new(spec).smooth_proxy(t)
}
