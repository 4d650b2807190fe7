//! Norm families on ℝⁿ.
//!
//! Three families are supported:
//!
//! * `lp:<p>:<dim>`: the ℓ_p norm, `1 ≤ p ≤ ∞` (`inf` spells infinity);
//! * `wlp:<p>:<w1,...,wn>`: the diagonally weighted norm `‖x‖ = ‖(w₁x₁, …, wₙxₙ)‖_p`;
//! * `poly:<f11,f12;f21,f22;...>`: the polyhedral norm `‖x‖ = maxⱼ |⟨fⱼ, x⟩|`,
//!   whose rows must span ℝⁿ.
//!
//! Smoothness and strict convexity are analytic flags: both hold exactly for
//! the (weighted) ℓ_p family with `1 < p < ∞`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of ℝⁿ.
pub type VectorR = DVector<f64>;

/// Largest supported dimension. Hot loops use stack buffers of this size.
pub const MAX_DIM: usize = 8;

/// Relative tolerance used to decide which pieces of a non-smooth norm are
/// active at a point.
pub(crate) const ACTIVE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum NormFamily {
    Lp,
    WeightedLp,
    Polyhedral,
}

/// A linear functional on ℝⁿ, paired with vectors by the dot product.
#[derive(Debug, Clone, PartialEq)]
pub struct Functional(pub VectorR);

impl Functional {
    pub fn apply(&self, x: &VectorR) -> f64 {
        self.0.dot(x)
    }

    pub fn coeffs(&self) -> &VectorR {
        &self.0
    }
}

/// Description of a norm on ℝⁿ.
#[derive(Debug, Clone)]
pub struct NormSpec {
    family: NormFamily,
    dim: usize,
    /// Exponent; `f64::NAN` for polyhedral norms.
    p: f64,
    /// All ones for the plain ℓ_p family; empty for polyhedral norms.
    weights: Vec<f64>,
    /// Rows of a polyhedral norm.
    functionals: Vec<Vec<f64>>,
    /// Extreme points of the unit ball, one per antipodal pair. Only
    /// populated for non-smooth families (p ∈ {1, ∞} and polyhedral).
    vertices: Vec<Vec<f64>>,
    source: String,
}

impl PartialEq for NormSpec {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family
            && self.dim == other.dim
            && (self.p == other.p || (self.p.is_nan() && other.p.is_nan()))
            && self.weights == other.weights
            && self.functionals == other.functionals
    }
}

fn fmt_real(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v}")
    }
}

impl NormSpec {
    /// The ℓ_p norm on ℝ^dim.
    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        let source = format!("lp:{}:{}", fmt_real(p), dim);
        Self::build_lp(NormFamily::Lp, p, vec![1.0; dim], source)
    }

    /// The weighted norm `‖(w₁x₁, …, wₙxₙ)‖_p`.
    pub fn weighted_lp(p: f64, weights: Vec<f64>) -> Result<Self> {
        let w: Vec<String> = weights.iter().map(|w| fmt_real(*w)).collect();
        let source = format!("wlp:{}:{}", fmt_real(p), w.join(","));
        Self::build_lp(NormFamily::WeightedLp, p, weights, source)
    }

    /// The polyhedral norm `maxⱼ |⟨fⱼ, x⟩|`.
    pub fn polyhedral(functionals: Vec<Vec<f64>>) -> Result<Self> {
        let rows: Vec<String> = functionals
            .iter()
            .map(|r| r.iter().map(|v| fmt_real(*v)).collect::<Vec<_>>().join(","))
            .collect();
        let source = format!("poly:{}", rows.join(";"));
        Self::build_poly(functionals, source)
    }

    fn build_lp(family: NormFamily, p: f64, weights: Vec<f64>, source: String) -> Result<Self> {
        let dim = weights.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidSpec(format!("dimension must be in 1..={MAX_DIM}, got {dim}")));
        }
        if !(p >= 1.0) {
            return Err(Error::InvalidSpec(format!("exponent must satisfy 1 <= p <= inf, got {p}")));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidSpec(format!("weights must be positive and finite, got {w}")));
        }
        let mut spec = NormSpec {
            family,
            dim,
            p,
            weights,
            functionals: Vec::new(),
            vertices: Vec::new(),
            source,
        };
        spec.vertices = spec.compute_lp_vertices();
        Ok(spec)
    }

    fn build_poly(functionals: Vec<Vec<f64>>, source: String) -> Result<Self> {
        let dim = functionals.first().map(Vec::len).unwrap_or(0);
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidSpec(format!("dimension must be in 1..={MAX_DIM}, got {dim}")));
        }
        if functionals.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidSpec("polyhedral rows have unequal lengths".into()));
        }
        if functionals.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("polyhedral rows must be finite".into()));
        }
        let m = DMatrix::from_fn(functionals.len(), dim, |i, j| functionals[i][j]);
        let sv = m.singular_values();
        let top = sv.max();
        let rank = sv.iter().filter(|s| **s > 1e-12 * top.max(f64::MIN_POSITIVE)).count();
        if rank < dim {
            return Err(Error::InvalidSpec(format!(
                "polyhedral functionals span a subspace of dimension {rank} < {dim}"
            )));
        }
        let mut spec = NormSpec {
            family: NormFamily::Polyhedral,
            dim,
            p: f64::NAN,
            weights: Vec::new(),
            functionals,
            vertices: Vec::new(),
            source,
        };
        spec.vertices = spec.compute_poly_vertices();
        Ok(spec)
    }

    pub fn family(&self) -> NormFamily {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Exponent of an ℓ_p-type norm, `None` for polyhedral norms.
    pub fn p(&self) -> Option<f64> {
        (self.family != NormFamily::Polyhedral).then_some(self.p)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn functionals(&self) -> &[Vec<f64>] {
        &self.functionals
    }

    /// Extreme points of the unit ball (one per antipodal pair) for the
    /// non-smooth families; empty otherwise.
    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn is_strictly_convex(&self) -> bool {
        self.family != NormFamily::Polyhedral && self.p > 1.0 && self.p.is_finite()
    }

    pub fn is_smooth(&self) -> bool {
        self.is_strictly_convex()
    }

    /// Text form; parsing it gives back an equal spec.
    pub fn as_str(&self) -> &str {
        &self.source
    }

    pub fn check_dim(&self, got: usize) -> Result<()> {
        if got == self.dim {
            Ok(())
        } else {
            Err(Error::DimMismatch { expected: self.dim, got })
        }
    }

    /// Norm of a coordinate slice. No dimension check; hot loops use this.
    pub fn norm(&self, x: &[f64]) -> f64 {
        match self.family {
            NormFamily::Polyhedral => self
                .functionals
                .iter()
                .map(|f| dot(f, x).abs())
                .fold(0.0, f64::max),
            _ => weighted_lp_norm(self.p, &self.weights, x),
        }
    }

    /// Inverse of the root-free ℓ_p gauge `Σ|wᵢxᵢ|^p`; the identity for
    /// non-smooth families, whose gauge is the norm itself.
    pub(crate) fn from_gauge(&self, g: f64) -> f64 {
        if self.is_smooth() {
            root(g, self.p)
        } else {
            g
        }
    }

    /// `‖x‖`, checking the dimension and finiteness of `x`.
    pub fn eval_norm(&self, x: &VectorR) -> Result<f64> {
        self.check_dim(x.len())?;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("vector has non-finite entries".into()));
        }
        Ok(self.norm(x.as_slice()))
    }

    /// `x / ‖x‖`, or `None` for the zero vector.
    pub fn normalize(&self, x: &VectorR) -> Option<VectorR> {
        let n = self.norm(x.as_slice());
        (n > 0.0 && n.is_finite()).then(|| x / n)
    }

    /// One-sided directional derivatives `(ρ′₋(x,y), ρ′₊(x,y))` of the norm
    /// at `x` in direction `y`.
    pub fn dir_derivs(&self, x: &VectorR, y: &VectorR) -> Result<(f64, f64)> {
        self.check_dim(x.len())?;
        self.check_dim(y.len())?;
        let nx = self.norm(x.as_slice());
        if nx == 0.0 {
            return Err(Error::ZeroVector);
        }
        let p = self.p;
        let w = &self.weights;
        let out = match self.family {
            NormFamily::Polyhedral => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for f in &self.functionals {
                    let fx = dot(f, x.as_slice());
                    if fx.abs() >= nx * (1.0 - ACTIVE_TOL) {
                        let d = fx.signum() * dot(f, y.as_slice());
                        lo = lo.min(d);
                        hi = hi.max(d);
                    }
                }
                (lo, hi)
            }
            _ if p == 1.0 => {
                let mut smooth_part = 0.0;
                let mut kink = 0.0;
                for i in 0..self.dim {
                    let z = w[i] * x[i];
                    if z.abs() <= ACTIVE_TOL * nx {
                        kink += (w[i] * y[i]).abs();
                    } else {
                        smooth_part += z.signum() * w[i] * y[i];
                    }
                }
                (smooth_part - kink, smooth_part + kink)
            }
            _ if p.is_infinite() => {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for i in 0..self.dim {
                    let z = w[i] * x[i];
                    if z.abs() >= nx * (1.0 - ACTIVE_TOL) {
                        let d = z.signum() * w[i] * y[i];
                        lo = lo.min(d);
                        hi = hi.max(d);
                    }
                }
                (lo, hi)
            }
            _ => {
                let f = self.smooth_functional(x.as_slice(), nx);
                let d = f.dot(y);
                (d, d)
            }
        };
        Ok(out)
    }

    /// ρ′₊(x,y) = lim_{t→0⁺} (‖x+ty‖ − ‖x‖)/t.
    pub fn dir_deriv_plus(&self, x: &VectorR, y: &VectorR) -> Result<f64> {
        self.dir_derivs(x, y).map(|(_, plus)| plus)
    }

    /// ρ′₋(x,y) = lim_{t→0⁻} (‖x+ty‖ − ‖x‖)/t.
    pub fn dir_deriv_minus(&self, x: &VectorR, y: &VectorR) -> Result<f64> {
        self.dir_derivs(x, y).map(|(minus, _)| minus)
    }

    /// Closed-form supporting functional of the weighted ℓ_p norm, `1 < p < ∞`.
    fn smooth_functional(&self, x: &[f64], nx: f64) -> VectorR {
        let p = self.p;
        DVector::from_fn(self.dim, |i, _| {
            let u = self.weights[i] * x[i] / nx;
            self.weights[i] * u.signum() * abs_pow(u.abs(), p - 1.0)
        })
    }

    /// The norm-one functional `f` with `f(x) = ‖x‖`, when it is unique.
    pub fn supporting_functional(&self, x: &VectorR) -> Result<Functional> {
        self.check_dim(x.len())?;
        let nx = self.norm(x.as_slice());
        if nx == 0.0 {
            return Err(Error::ZeroVector);
        }
        let w = &self.weights;
        match self.family {
            NormFamily::Polyhedral => {
                let mut chosen: Option<VectorR> = None;
                for f in &self.functionals {
                    let fx = dot(f, x.as_slice());
                    if fx.abs() >= nx * (1.0 - ACTIVE_TOL) {
                        let cand = DVector::from_iterator(self.dim, f.iter().map(|v| v * fx.signum()));
                        match &chosen {
                            None => chosen = Some(cand),
                            Some(c) if (c - &cand).amax() <= 1e-12 * c.amax() => {}
                            Some(_) => return Err(Error::NotSmoothPoint),
                        }
                    }
                }
                chosen.map(Functional).ok_or(Error::NotSmoothPoint)
            }
            _ if self.p == 1.0 => {
                if (0..self.dim).any(|i| (w[i] * x[i]).abs() <= ACTIVE_TOL * nx) {
                    return Err(Error::NotSmoothPoint);
                }
                Ok(Functional(DVector::from_fn(self.dim, |i, _| w[i] * x[i].signum())))
            }
            _ if self.p.is_infinite() => {
                let active: Vec<usize> = (0..self.dim)
                    .filter(|&i| (w[i] * x[i]).abs() >= nx * (1.0 - ACTIVE_TOL))
                    .collect();
                if active.len() != 1 {
                    return Err(Error::NotSmoothPoint);
                }
                let k = active[0];
                let mut f = DVector::zeros(self.dim);
                f[k] = w[k] * x[k].signum();
                Ok(Functional(f))
            }
            _ => Ok(Functional(self.smooth_functional(x.as_slice(), nx))),
        }
    }

    /// Dual norm `sup_{‖x‖=1} f(x)`.
    pub fn dual_norm(&self, f: &Functional) -> f64 {
        let h = f.coeffs();
        match self.family {
            NormFamily::Polyhedral => self
                .vertices
                .iter()
                .map(|v| dot(v, h.as_slice()).abs())
                .fold(0.0, f64::max),
            _ => {
                let scaled: Vec<f64> = (0..self.dim).map(|i| h[i] / self.weights[i]).collect();
                let ones = vec![1.0; self.dim];
                weighted_lp_norm(conjugate_exponent(self.p), &ones, &scaled)
            }
        }
    }

    /// Unit vector whose supporting functional is proportional to `h`.
    /// Only defined for smooth, strictly convex families (where this inverse
    /// duality map is single valued) and `h ≠ 0`.
    pub fn dual_preimage(&self, h: &[f64]) -> Option<VectorR> {
        if !self.is_smooth() || h.iter().all(|v| *v == 0.0) {
            return None;
        }
        let e = 1.0 / (self.p - 1.0);
        let scale = h
            .iter()
            .zip(&self.weights)
            .map(|(hi, wi)| (hi / wi).abs())
            .fold(0.0, f64::max);
        let x = DVector::from_fn(self.dim, |i, _| {
            let v = h[i] / self.weights[i] / scale;
            v.signum() * abs_pow(v.abs(), e) / self.weights[i]
        });
        self.normalize(&x)
    }

    /// `count` unit vectors, deterministic in `seed`: Gaussian directions
    /// normalized in this norm.
    pub fn sphere_sample(&self, count: usize, seed: u64) -> Vec<VectorR> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let g = DVector::from_fn(self.dim, |_, _| StandardNormal.sample(&mut rng));
            if g.norm() < 1e-8 {
                continue;
            }
            if let Some(u) = self.normalize(&g) {
                out.push(u);
            }
        }
        out
    }

    fn compute_lp_vertices(&self) -> Vec<Vec<f64>> {
        let n = self.dim;
        if self.p == 1.0 {
            (0..n)
                .map(|i| {
                    let mut v = vec![0.0; n];
                    v[i] = 1.0 / self.weights[i];
                    v
                })
                .collect()
        } else if self.p.is_infinite() {
            (0..1usize << (n - 1))
                .map(|mask| {
                    (0..n)
                        .map(|i| {
                            let neg = i > 0 && (mask >> (i - 1)) & 1 == 1;
                            let s = if neg { -1.0 } else { 1.0 };
                            s / self.weights[i]
                        })
                        .collect()
                })
                .collect()
        } else {
            Vec::new()
        }
    }

    fn compute_poly_vertices(&self) -> Vec<Vec<f64>> {
        let n = self.dim;
        let m = self.functionals.len();
        let mut found: Vec<Vec<f64>> = Vec::new();
        for subset in combinations(m, n) {
            let a = DMatrix::from_fn(n, n, |i, j| self.functionals[subset[i]][j]);
            let lu = a.clone().full_piv_lu();
            if !lu.is_invertible() {
                continue;
            }
            for signs in 0..1usize << n {
                let rhs = DVector::from_fn(n, |i, _| if (signs >> i) & 1 == 1 { -1.0 } else { 1.0 });
                let Some(x) = lu.solve(&rhs) else { continue };
                if !x.iter().all(|v| v.is_finite()) {
                    continue;
                }
                if self.norm(x.as_slice()) > 1.0 + 1e-9 {
                    continue;
                }
                let scale = x.amax().max(1.0);
                let dup = found.iter().any(|v| {
                    let same = v.iter().zip(x.iter()).all(|(a, b)| (a - b).abs() <= 1e-9 * scale);
                    let anti = v.iter().zip(x.iter()).all(|(a, b)| (a + b).abs() <= 1e-9 * scale);
                    same || anti
                });
                if !dup {
                    found.push(x.iter().copied().collect());
                }
            }
        }
        found
    }
}

impl fmt::Display for NormSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl Serialize for NormSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.source)
    }
}

impl<'de> Deserialize<'de> for NormSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a decimal literal (or `inf`) exactly as Rust's correctly rounded
/// `f64` parser does.
pub(crate) fn parse_real(s: &str) -> Result<f64> {
    let t = s.trim();
    match t {
        "inf" | "Inf" | "INF" | "infinity" => Ok(f64::INFINITY),
        _ => {
            let v: f64 = t.parse().map_err(|_| Error::Parse(format!("not a number: {t:?}")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Parse(format!("not a finite number: {t:?}")))
            }
        }
    }
}

/// Parses comma-separated reals, e.g. `1,0,-2.5`.
pub fn parse_csv(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Err(Error::Parse("empty list".into()));
    }
    s.split(',')
        .map(|t| {
            let v = parse_real(t)?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Parse(format!("entries must be finite, got {t:?}")))
            }
        })
        .collect()
}

impl FromStr for NormSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("norm spec needs a family prefix: {s:?}")))?;
        let mut spec = match kind {
            "lp" => {
                let (p, dim) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("expected lp:<p>:<dim>, got {s:?}")))?;
                let p = parse_real(p)?;
                let dim: usize = dim
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad dimension in {s:?}")))?;
                NormSpec::lp(p, dim)?
            }
            "wlp" => {
                let (p, w) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::Parse(format!("expected wlp:<p>:<w1,...>, got {s:?}")))?;
                NormSpec::weighted_lp(parse_real(p)?, parse_csv(w)?)?
            }
            "poly" => {
                let rows = rest.split(';').map(parse_csv).collect::<Result<Vec<_>>>()?;
                NormSpec::polyhedral(rows)?
            }
            other => return Err(Error::Parse(format!("unknown norm family {other:?}"))),
        };
        spec.source = s.to_string();
        Ok(spec)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `a^p` for `a ≥ 0`, with fast paths for the exponents used most.
#[inline]
pub(crate) fn abs_pow(a: f64, p: f64) -> f64 {
    if p == 2.0 {
        a * a
    } else if p == 3.0 {
        a * a * a
    } else if p == 1.5 {
        a * a.sqrt()
    } else if p == 1.0 {
        a
    } else if p == 0.5 {
        a.sqrt()
    } else if p == 4.0 {
        let b = a * a;
        b * b
    } else {
        a.powf(p)
    }
}

#[inline]
fn root(s: f64, p: f64) -> f64 {
    if p == 2.0 {
        s.sqrt()
    } else if p == 3.0 {
        s.cbrt()
    } else if p == 1.5 {
        (s * s).cbrt()
    } else {
        s.powf(1.0 / p)
    }
}

pub(crate) fn conjugate_exponent(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

#[inline]
fn weighted_lp_norm(p: f64, w: &[f64], x: &[f64]) -> f64 {
    if p.is_infinite() {
        return x.iter().zip(w).map(|(a, b)| (a * b).abs()).fold(0.0, f64::max);
    }
    if p == 1.0 {
        return x.iter().zip(w).map(|(a, b)| (a * b).abs()).sum();
    }
    let m = x.iter().zip(w).map(|(a, b)| (a * b).abs()).fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    if (1e-150..1e150).contains(&m) {
        let s: f64 = x.iter().zip(w).map(|(a, b)| abs_pow((a * b).abs(), p)).sum();
        root(s, p)
    } else {
        let s: f64 = x.iter().zip(w).map(|(a, b)| abs_pow((a * b / m).abs(), p)).sum();
        m * root(s, p)
    }
}

/// All `k`-subsets of `0..m` in lexicographic order.
fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > m {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + m - k) else {
            return out;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::dvector;

    const TAU_REL: f64 = 1e-10;

    fn lp(p: f64, n: usize) -> NormSpec {
        NormSpec::lp(p, n).unwrap()
    }

    #[test]
    fn closed_form_norms() {
        assert_relative_eq!(lp(2.0, 2).eval_norm(&dvector![3.0, 4.0]).unwrap(), 5.0, max_relative = TAU_REL);
        assert_relative_eq!(lp(1.0, 2).eval_norm(&dvector![1.0, -2.0]).unwrap(), 3.0, max_relative = TAU_REL);
        assert_relative_eq!(
            lp(3.0, 2).eval_norm(&dvector![1.0, 1.0]).unwrap(),
            1.259921049894873,
            max_relative = TAU_REL
        );
        assert_relative_eq!(lp(f64::INFINITY, 3).norm(&[1.0, -7.0, 2.0]), 7.0);
        let w = NormSpec::weighted_lp(2.0, vec![3.0, 4.0]).unwrap();
        assert_relative_eq!(w.norm(&[1.0, 1.0]), 5.0, max_relative = TAU_REL);
        let poly: NormSpec = "poly:1,0;0,1;1,1".parse().unwrap();
        assert_relative_eq!(poly.norm(&[1.0, 1.0]), 2.0);
        assert_relative_eq!(poly.norm(&[1.0, -1.0]), 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(lp(2.0, 2).eval_norm(&dvector![1.0, 2.0, 3.0]), Err(Error::DimMismatch { .. })));
        assert!(matches!(NormSpec::weighted_lp(2.0, vec![1.0, 0.0]), Err(Error::InvalidSpec(_))));
        assert!(matches!(NormSpec::lp(0.5, 2), Err(Error::InvalidSpec(_))));
        assert!(matches!("poly:1,1;2,2".parse::<NormSpec>(), Err(Error::InvalidSpec(_))));
        assert!(matches!("lq:2:2".parse::<NormSpec>(), Err(Error::Parse(_))));
        assert!(matches!("lp:2".parse::<NormSpec>(), Err(Error::Parse(_))));
    }

    #[test]
    fn parsing_keeps_source_text() {
        for s in ["lp:3:2", "lp:1.5:3", "lp:inf:2", "wlp:2.5:1,0.25,3", "poly:1,0;0,1;0.5,0.5"] {
            let spec: NormSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
            assert_eq!(spec.as_str().parse::<NormSpec>().unwrap(), spec);
        }
        let spec: NormSpec = "lp:0.1e1:2".parse().unwrap();
        assert_eq!(spec.p(), Some(1.0));
        assert_eq!(spec.to_string(), "lp:0.1e1:2");
    }

    #[test]
    fn flags_follow_family() {
        assert!(lp(1.5, 2).is_smooth() && lp(1.5, 2).is_strictly_convex());
        assert!(!lp(1.0, 2).is_smooth());
        assert!(!lp(f64::INFINITY, 2).is_strictly_convex());
        assert!(!"poly:1,0;0,1".parse::<NormSpec>().unwrap().is_smooth());
    }

    #[test]
    fn derivative_examples() {
        let e1 = dvector![1.0, 0.0];
        let e2 = dvector![0.0, 1.0];
        assert_relative_eq!(lp(2.0, 2).dir_deriv_plus(&e1, &e2).unwrap(), 0.0);
        assert_relative_eq!(lp(2.0, 2).dir_deriv_plus(&e1, &e1).unwrap(), 1.0);
        let (m, p) = lp(1.0, 2).dir_derivs(&e1, &e2).unwrap();
        assert_relative_eq!(p, 1.0);
        assert_relative_eq!(m, -1.0);
        assert_eq!(lp(2.0, 2).dir_derivs(&dvector![0.0, 0.0], &e1), Err(Error::ZeroVector));
    }

    #[test]
    fn supporting_functional_examples() {
        let f = lp(2.0, 2).supporting_functional(&dvector![0.6, 0.8]).unwrap();
        assert_relative_eq!(f.0, dvector![0.6, 0.8], epsilon = 1e-15);
        let f = lp(3.0, 2).supporting_functional(&dvector![1.0, 0.0]).unwrap();
        assert_relative_eq!(f.0, dvector![1.0, 0.0]);
        assert_eq!(
            lp(1.0, 2).supporting_functional(&dvector![1.0, 0.0]),
            Err(Error::NotSmoothPoint)
        );
        assert_eq!(
            lp(f64::INFINITY, 2).supporting_functional(&dvector![1.0, 1.0]),
            Err(Error::NotSmoothPoint)
        );
        let poly: NormSpec = "poly:1,0;0,1;1,1".parse().unwrap();
        assert_eq!(poly.supporting_functional(&dvector![1.0, 1.0]).unwrap().0, dvector![1.0, 1.0]);
        assert_eq!(poly.supporting_functional(&dvector![1.0, 0.0]), Err(Error::NotSmoothPoint));
    }

    #[test]
    fn dual_preimage_inverts_duality_map() {
        let spec = NormSpec::weighted_lp(3.0, vec![1.0, 2.0, 0.5]).unwrap();
        let x = spec.normalize(&dvector![0.3, -0.7, 1.1]).unwrap();
        let f = spec.supporting_functional(&x).unwrap();
        let back = spec.dual_preimage(f.0.as_slice()).unwrap();
        assert_relative_eq!(back, x, epsilon = 1e-12);
        assert!(lp(1.0, 2).dual_preimage(&[1.0, 0.0]).is_none());
    }

    #[test]
    fn vertices_of_non_smooth_balls() {
        assert_eq!(lp(1.0, 3).vertices().len(), 3);
        assert_eq!(lp(f64::INFINITY, 3).vertices().len(), 4);
        // A hexagon has three antipodal vertex pairs.
        let hex: NormSpec = "poly:1,0;0,1;1,1".parse().unwrap();
        assert_eq!(hex.vertices().len(), 3);
        for v in hex.vertices() {
            assert_relative_eq!(hex.norm(v), 1.0, epsilon = 1e-12);
        }
        assert!(lp(2.0, 3).vertices().is_empty());
    }

    #[test]
    fn dual_norms() {
        let f = Functional(dvector![1.0, 1.0]);
        assert_relative_eq!(lp(2.0, 2).dual_norm(&f), 2f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(lp(1.0, 2).dual_norm(&f), 1.0);
        assert_relative_eq!(lp(f64::INFINITY, 2).dual_norm(&f), 2.0);
        let hex: NormSpec = "poly:1,0;0,1;1,1".parse().unwrap();
        // |x + y| <= 1 is one of the facets
        assert_relative_eq!(hex.dual_norm(&f), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn sphere_sample_contract() {
        let a = lp(2.0, 2).sphere_sample(4, 0);
        assert_eq!(a.len(), 4);
        for v in &a {
            assert_relative_eq!(lp(2.0, 2).norm(v.as_slice()), 1.0, max_relative = TAU_REL);
        }
        let spec = lp(3.0, 3);
        let b = spec.sphere_sample(1000, 7);
        assert!(b.iter().all(|v| (spec.norm(v.as_slice()) - 1.0).abs() <= TAU_REL));
        assert_eq!(b, spec.sphere_sample(1000, 7));
    }

    #[test]
    fn combinations_enumerates_subsets() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert!(combinations(2, 3).is_empty());
    }
}
