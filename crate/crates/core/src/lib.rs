pub mod cli;
pub mod coalescent;
pub mod cutting;
pub mod error;
pub mod exact;
pub mod rng;
pub mod rrt;
pub mod stats;
pub mod verify;
