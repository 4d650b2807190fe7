pub mod error;
pub mod minimize;
pub mod norm;
pub mod operator;
pub mod orthogonality;
pub mod seed;
pub mod settings;
pub mod suite;
pub mod witness;
mod serde_vec;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/norms.md")]
    mod norms {}
    #[doc = include_str!("../../../book/src/orthogonality.md")]
    mod orthogonality {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/witnesses.md")]
    mod witnesses {}
    #[doc = include_str!("../../../book/src/suite.md")]
    mod suite {}
}
