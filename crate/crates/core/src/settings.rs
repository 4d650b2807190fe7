use serde::{Deserialize, Serialize};

/// Numerical tolerances shared by every check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Closed-form norm identities.
    pub rel: f64,
    /// Claims certified on a sampled sphere grid.
    pub grid: f64,
    /// Orthogonality band, absolute on normalized inputs.
    pub orth: f64,
    /// Relative slack for membership in the norm-attainment set.
    pub mt: f64,
    /// Numerical rank cut-off, relative to the largest singular value.
    pub rank: f64,
    /// How far below zero a witness's failing margin must be.
    pub certificate: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel: 1e-10,
            grid: 1e-6,
            orth: 1e-7,
            mt: 1e-9,
            rank: 1e-8,
            certificate: 1e-5,
        }
    }
}

/// Resolution of the global operator-norm search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchSettings {
    /// Angular grid size in dimension 2.
    pub grid_2d: usize,
    /// Sphere samples in dimension 3 and up.
    pub samples: usize,
    /// Best samples handed to local refinement.
    pub top_k: usize,
    pub sample_seed: u64,
    /// Final bracket width of the λ search in operator orthogonality.
    pub lambda_tol: f64,
}

impl Default for SearchSettings {
    fn default() -> Self {
        SearchSettings {
            grid_2d: 4096,
            samples: 20_000,
            top_k: 50,
            sample_seed: 0x5EED_0F_5A4D,
            lambda_tol: 1e-10,
        }
    }
}

impl SearchSettings {
    /// Twice the resolution, with an independent sample set.
    pub fn doubled(&self) -> Self {
        SearchSettings {
            grid_2d: self.grid_2d * 2,
            samples: self.samples * 2,
            top_k: self.top_k * 2,
            sample_seed: self.sample_seed ^ 0xD0_0B1E,
            lambda_tol: self.lambda_tol / 2.0,
        }
    }
}
