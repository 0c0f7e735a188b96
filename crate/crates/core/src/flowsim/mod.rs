//! Lagrangian machinery along streamlines of a steady field.
//!
//! Trajectories are integrated with an embedded Dormand–Prince 5(4) pair.
//! Streamlines carry their arc length as a fourth state component
//! (`dz/dt = |u|`); the flow-map Jacobian is integrated jointly with the
//! position through the variational equation `dJ/dt = ∇u(η) J`, which also
//! transports vorticity (`ω(t) = J ω₀`) and the tangent plane of a material
//! disk.

mod flowmap;
mod rk;
mod streamline;

pub use flowmap::{
    cauchy_vorticity, completion_basis, disk_probe, flow_map_jacobian, flow_map_series,
    flow_map_state, DiskProbeConfig, DiskProbeResult, DiskProbeRow, FlowMapState, RING_MARKERS,
};
pub use rk::IntegratorStats;
pub use streamline::{
    integrate_streamline, ArcLengthMap, IntegratorConfig, Streamline, StreamlineSample,
    Termination,
};

use crate::error::{Error, Result};
use crate::fieldkit::VelocityField;
use crate::linalg::Vec3;

/// Positions and signed arc lengths at the given times (any sign, monotone away
/// from 0), integrated with step control that lands on each time exactly.
pub fn trajectory_points(
    field: &VelocityField,
    seed: &Vec3,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<(Vec3, f64)>> {
    let Some(&t_end) = times.last() else {
        return Ok(Vec::new());
    };
    if times.iter().any(|t| t * t_end < 0.0) {
        return Err(Error::InvalidArgument("times must lie on one side of 0".into()));
    }
    let traj = rk::integrate(
        |_, y: &[f64; 4]| {
            let u = field.velocity(&Vec3([y[0], y[1], y[2]]))?;
            Ok([u[0], u[1], u[2], u.norm()])
        },
        [seed[0], seed[1], seed[2], 0.0],
        t_end,
        times,
        &cfg.control(),
        |_, _| false,
    )?;
    Ok(traj
        .output_idx
        .iter()
        .map(|&i| {
            let y = traj.nodes[i].y;
            (Vec3([y[0], y[1], y[2]]), y[3])
        })
        .collect())
}
