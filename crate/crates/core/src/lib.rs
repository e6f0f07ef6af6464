//! Cellular automata on finitely generated groups.
//!
//! Group elements and balls live in [`group`], configurations in [`config`],
//! the cone evolution engine in [`engine`]. [`blocking`] verifies and
//! searches blocking words, [`vz`] glues them on virtually-`Z` groups,
//! [`lift`] moves automata from `Z` to free groups through the subgroup
//! `⟨a⟩`, and [`freeca`] holds the free-group automaton that is almost
//! equicontinuous without blocking words. [`cli`] drives everything from
//! the `groupca` binary.

pub mod blocking;
pub mod cli;
pub mod config;
pub mod engine;
pub mod error;
pub mod freeca;
pub mod group;
pub mod lift;
pub mod vz;

pub use config::{Alphabet, Configuration, Pattern, Symbol};
pub use engine::{builtin, evolve, CellularAutomaton};
pub use error::{Error, Result};
pub use group::{Family, FreeWord, GroupCtx, GroupElement};
