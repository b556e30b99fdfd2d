//! Desk-scale DRAM memory-controller design-space exploration.
//!
//! The crate bundles everything needed to search the ten-parameter
//! controller design space against latency/power/energy objectives:
//!
//! * [`sim`] — a deterministic transaction-level surrogate of a single-rank
//!   DDR controller plus DRAM device.
//! * [`trace`] — streaming / random memory access trace generators and the
//!   plain-text trace file format.
//! * [`env`] — a gym-style environment wrapping the simulator: factored
//!   action space, `<latency, power, energy>` observations, target-tracking
//!   rewards.
//! * [`nn`] — the tiny MLP / Adam / GAE / PPO / discrete-SAC substrate the
//!   agents are built on (hand-rolled, no autodiff framework).
//! * [`agents`] — four optimizer formulations: decentralized multi-agent
//!   PPO, single-agent PPO, single-agent discrete SAC, and a time-division
//!   multiplexed PPO.
//! * [`analysis`] — random grid search, a phi-k style correlation matrix,
//!   and an exhaustive oracle over reduced subspaces.

pub mod agents;
pub mod analysis;
pub mod env;
pub mod nn;
pub mod rng;
pub mod sim;
pub mod trace;
