//! Distributions, channels, empirical types and information measures.

mod io;
mod joint;
mod ops;
mod prob;
mod types;

pub use io::{channel_from_json, channel_to_json, read_channel};
pub use joint::{joint_type, JointDistribution, JointType};
pub(crate) use ops::mix_into;
pub use ops::{
    apply_jammer_kernel, average_out_state, bayes_estimator, distortion_at, expected_distortion,
    induce_u_channel, AuxLaw, DistortionReport, Estimator, EstimatorDomain, InducedChannel,
    JammerLaw,
};
pub use prob::{
    binary_entropy, check_distribution, entropy, kl_divergence, mi_input_channel, plogp,
    point_mass, uniform, STOCHASTIC_TOL,
};
pub use types::{validate_channel, AVChannel, Composite, Kernel, RawChannel, StateChannel};
