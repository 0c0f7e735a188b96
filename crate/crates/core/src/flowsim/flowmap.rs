use serde::Serialize;

use super::rk::integrate;
use super::streamline::IntegratorConfig;
use crate::diffgeo::{frenet_sample, TolerancePolicy};
use crate::error::{Error, Result};
use crate::fieldkit::VelocityField;
use crate::linalg::{Mat3, Vec3};

/// Position on the trajectory together with the flow-map Jacobian `∂η/∂x₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlowMapState {
    pub t: f64,
    pub x: Vec3,
    pub jacobian: Mat3,
}

fn pack(x: &Vec3, j: &Mat3) -> [f64; 12] {
    let mut y = [0.0; 12];
    y[..3].copy_from_slice(&x.0);
    for r in 0..3 {
        y[3 + 3 * r..6 + 3 * r].copy_from_slice(&j.0[r]);
    }
    y
}

fn unpack(y: &[f64; 12]) -> (Vec3, Mat3) {
    let mut j = Mat3::ZERO;
    for r in 0..3 {
        j.0[r].copy_from_slice(&y[3 + 3 * r..6 + 3 * r]);
    }
    (Vec3([y[0], y[1], y[2]]), j)
}

fn check_seed(field: &VelocityField, seed: &Vec3, cfg: &IntegratorConfig) -> Result<()> {
    let speed = field.velocity(seed)?.norm();
    if speed > cfg.eps_stagnation {
        Ok(())
    } else {
        Err(Error::StagnationPoint { speed })
    }
}

/// Integrates the trajectory and the variational equation `dJ/dt = ∇u(η) J`
/// jointly, reporting the state at each requested time. Times must be
/// non-decreasing and non-negative, or non-increasing and non-positive.
pub fn flow_map_series(
    field: &VelocityField,
    seed: &Vec3,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<FlowMapState>> {
    if times.is_empty() {
        return Ok(Vec::new());
    }
    let t_end = times[times.len() - 1];
    let forward = t_end >= 0.0;
    let ordered = times.windows(2).all(|w| if forward { w[1] >= w[0] } else { w[1] <= w[0] });
    if !ordered || times.iter().any(|t| !t.is_finite() || (t * t_end) < 0.0) {
        return Err(Error::InvalidArgument(
            "flow-map times must be monotone and on one side of 0".into(),
        ));
    }
    let traj = integrate(
        |_, y: &[f64; 12]| {
            let (x, j) = unpack(y);
            let jet = field.jet(&x)?;
            Ok(pack(&jet.u, &jet.grad_u.mul_mat(&j)))
        },
        pack(seed, &Mat3::IDENTITY),
        t_end,
        times,
        &cfg.control(),
        |_, _| false,
    )?;
    Ok(traj
        .output_idx
        .iter()
        .zip(times)
        .map(|(&i, &t)| {
            let (x, jacobian) = unpack(&traj.nodes[i].y);
            FlowMapState { t, x, jacobian }
        })
        .collect())
}

/// Flow-map Jacobian `J(t) = ∂η(t, x₀)/∂x₀`, `J(0) = I`.
pub fn flow_map_jacobian(field: &VelocityField, seed: &Vec3, t: f64, cfg: &IntegratorConfig) -> Result<Mat3> {
    check_seed(field, seed, cfg)?;
    Ok(flow_map_state(field, seed, t, cfg)?.jacobian)
}

pub fn flow_map_state(field: &VelocityField, seed: &Vec3, t: f64, cfg: &IntegratorConfig) -> Result<FlowMapState> {
    let series = flow_map_series(field, seed, &[t], cfg)?;
    Ok(series[0])
}

/// Vorticity carried by the material element at `seed`: `ω(t) = J(t) ω₀`.
pub fn cauchy_vorticity(
    field: &VelocityField,
    seed: &Vec3,
    omega0: &Vec3,
    t: f64,
    cfg: &IntegratorConfig,
) -> Result<Vec3> {
    if t == 0.0 {
        return Ok(*omega0);
    }
    Ok(flow_map_jacobian(field, seed, t, cfg)?.mul_vec(omega0))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct DiskProbeConfig {
    pub integrator: IntegratorConfig,
    /// Radius of the optional 8-marker ring integrated at finite size.
    pub ring_radius: Option<f64>,
}

pub const RING_MARKERS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiskProbeRow {
    pub t: f64,
    /// `unit(J n₀) · τ(η(t))`
    pub defect_n: f64,
    /// `unit(J b₀) · τ(η(t))`
    pub defect_b: f64,
    /// `|u(η(t))| / |u(x₀)|`
    pub axis_stretch: f64,
    /// Largest `|unit(Φ(t, m) − η(t, x₀)) · τ|` over the ring markers `m`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ring_defect: Option<f64>,
}

/// Perpendicularity of an evolved material disk to the stretching direction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiskProbeResult {
    pub seed: Vec3,
    pub basis: [Vec3; 2],
    /// Whether the basis is the Frenet `(n, b)` pair.
    pub frenet_basis: bool,
    pub series: Vec<DiskProbeRow>,
}

impl DiskProbeResult {
    pub fn max_abs_defect(&self) -> f64 {
        self.series
            .iter()
            .fold(0.0_f64, |m, r| m.max(r.defect_n.abs()).max(r.defect_b.abs()))
    }
}

/// Orthonormal pair completing `tau`: Gram–Schmidt of the coordinate axis
/// where `tau` has its smallest component (first such axis on ties).
pub fn completion_basis(tau: &Vec3) -> (Vec3, Vec3) {
    let mut k = 0;
    for i in 1..3 {
        if tau[i].abs() < tau[k].abs() {
            k = i;
        }
    }
    let e = Vec3::axis(k);
    let n = (e - *tau * tau.dot(&e)).normalized();
    (n, tau.cross(&n))
}

fn unit_dot(v: &Vec3, tau: &Vec3) -> f64 {
    let len = v.norm();
    if len > 0.0 {
        (v.dot(tau) / len).clamp(-1.0, 1.0)
    } else {
        0.0
    }
}

/// Tracks the material disk through `seed` spanned by `(n₀, b₀)`.
pub fn disk_probe(field: &VelocityField, seed: &Vec3, cfg: &DiskProbeConfig) -> Result<DiskProbeResult> {
    let icfg = &cfg.integrator;
    icfg.validate()?;
    let tol = TolerancePolicy {
        eps_stagnation: icfg.eps_stagnation,
        ..Default::default()
    };
    let frame = frenet_sample(field, seed, &tol)?;
    let (n0, b0, frenet_basis) = match (frame.normal, frame.binormal) {
        (Some(n), Some(b)) => (n, b, true),
        _ => {
            let (n, b) = completion_basis(&frame.tau);
            (n, b, false)
        }
    };
    let times = icfg.sample_times();
    let states = flow_map_series(field, seed, &times, icfg)?;

    let ring = match cfg.ring_radius {
        Some(r) if !(r > 0.0 && r.is_finite()) => {
            return Err(Error::InvalidArgument(format!("ring radius must be positive, got {r}")))
        }
        Some(r) => Some(ring_positions(field, seed, &n0, &b0, r, &times, icfg)?),
        None => None,
    };

    let speed0 = frame.speed;
    let mut series = Vec::with_capacity(states.len());
    for (k, st) in states.iter().enumerate() {
        let u = field.velocity(&st.x)?;
        let speed = u.norm();
        if !(speed > icfg.eps_stagnation) {
            return Err(Error::StagnationPoint { speed });
        }
        let tau = u * (1.0 / speed);
        let (defect_n, defect_b) = if st.t == 0.0 {
            // the initial disk is perpendicular by construction
            (0.0, 0.0)
        } else {
            (
                unit_dot(&st.jacobian.mul_vec(&n0), &tau),
                unit_dot(&st.jacobian.mul_vec(&b0), &tau),
            )
        };
        let ring_defect = ring.as_ref().map(|markers| {
            if st.t == 0.0 {
                return 0.0;
            }
            markers
                .iter()
                .map(|m| unit_dot(&(m[k] - st.x), &tau).abs())
                .fold(0.0, f64::max)
        });
        series.push(DiskProbeRow {
            t: st.t,
            defect_n,
            defect_b,
            axis_stretch: speed / speed0,
            ring_defect,
        });
    }
    Ok(DiskProbeResult {
        seed: *seed,
        basis: [n0, b0],
        frenet_basis,
        series,
    })
}

fn ring_positions(
    field: &VelocityField,
    seed: &Vec3,
    n0: &Vec3,
    b0: &Vec3,
    radius: f64,
    times: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<Vec<Vec3>>> {
    (0..RING_MARKERS)
        .map(|m| {
            let theta = 2.0 * std::f64::consts::PI * m as f64 / RING_MARKERS as f64;
            let start = *seed + (*n0 * theta.cos() + *b0 * theta.sin()) * radius;
            let traj = integrate(
                |_, y: &[f64; 3]| Ok(field.velocity(&Vec3(*y))?.0),
                start.0,
                times[times.len() - 1],
                times,
                &cfg.control(),
                |_, _| false,
            )?;
            Ok(traj.output_idx.iter().map(|&i| Vec3(traj.nodes[i].y)).collect())
        })
        .collect()
}
