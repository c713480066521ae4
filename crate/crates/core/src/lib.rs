pub mod error;
pub mod exceptional;
pub mod gldim;
pub mod lepotier;
pub mod numk;
pub mod plane;
pub mod rat;
pub mod stability;
pub mod surd;
pub mod walls;
pub mod verify;

/// The book's code listings, compiled and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/characters.md")]
    mod characters {}
    #[doc = include_str!("../../../book/src/exact-numbers.md")]
    mod exact_numbers {}
    #[doc = include_str!("../../../book/src/exceptional-bundles.md")]
    mod exceptional_bundles {}
    #[doc = include_str!("../../../book/src/le-potier-curve.md")]
    mod le_potier_curve {}
    #[doc = include_str!("../../../book/src/regions.md")]
    mod regions {}
    #[doc = include_str!("../../../book/src/global-dimension.md")]
    mod global_dimension {}
    #[doc = include_str!("../../../book/src/walls.md")]
    mod walls {}
}
