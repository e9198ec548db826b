//! Nearest- and farthest-neighbor map realizability.

pub mod funcgraph;
pub mod realize;
pub mod verify;
pub mod spherical;
pub mod embed;
pub mod maxreal2d;
