//! Exact computations for free-by-cyclic groups: collection in free nilpotent
//! quotients, Magnus series, finite p-quotients of suspensions, graphs of
//! groups, conjugacy in piecewise trivial suspensions, and vertex fillings.

pub mod error;
pub mod filling;
pub mod gog;
pub mod hall;
pub mod lattice;
pub mod magnus;
pub mod nilpotent;
pub mod perm;
pub mod pts;
pub mod word;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/words.md")]
    mod words {}
    #[doc = include_str!("../../../book/src/collection.md")]
    mod collection {}
    #[doc = include_str!("../../../book/src/magnus.md")]
    mod magnus {}
    #[doc = include_str!("../../../book/src/quotients.md")]
    mod quotients {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/conjugacy.md")]
    mod conjugacy {}
    #[doc = include_str!("../../../book/src/fillings.md")]
    mod fillings {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/formats.md")]
    mod formats {}
}
