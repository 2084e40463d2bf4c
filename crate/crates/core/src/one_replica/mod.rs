//! 1-replica sector: the averaged state is a pattern of scar (`|0><0|`) and
//! infinite-temperature (`1`) sites separated by randomly walking interfaces.

pub mod interface;
pub mod walker;

pub use interface::{
    analytic_channel, analytic_profile, simulate_interface, simulate_trajectories, velocity_diffusion,
    InterfaceEnsemble, InterfaceTrajectory, SlopeEstimate, VelocityDiffusion,
};
pub use walker::{
    absorbing_probability, finite_chain_order_parameter, golden_rule_rate, order_parameter,
    order_parameter_series, relaxation_fit, relaxation_rate, walker_pair_step, PerturbationParams,
    RelaxationFit, WalkerDistribution,
};
