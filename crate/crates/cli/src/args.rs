use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use vortex_core::diffgeo::TolerancePolicy;
use vortex_core::flowsim::IntegratorConfig;
use vortex_core::Vec3;

#[derive(Debug, Parser)]
#[command(
    name = "vortex-criterion",
    version,
    about = "Streamline stretching diagnostics for steady 3D velocity fields"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Omit the leading `#` metadata line of CSV output.
    #[arg(long, global = true)]
    pub no_header: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Frenet geometry, criterion and verdict at one point.
    Eval {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_parser = triple, allow_hyphen_values = true)]
        point: Vec3,
        /// Also report the finite-difference criterion with this step.
        #[arg(long, value_parser = positive)]
        fd_step: Option<f64>,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Integrate the streamline through a seed with arc length and geometry.
    Streamline {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_parser = triple, allow_hyphen_values = true)]
        seed: Vec3,
        #[command(flatten)]
        integ: IntegArgs,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Classify every node of a grid.
    Classify {
        #[command(flatten)]
        field: FieldArgs,
        /// Lower box corner.
        #[arg(long, value_parser = triple, allow_hyphen_values = true)]
        lo: Vec3,
        /// Upper box corner.
        #[arg(long, value_parser = triple, allow_hyphen_values = true)]
        hi: Vec3,
        /// Nodes per axis, e.g. 50,50,1.
        #[arg(long, value_parser = resolution)]
        resolution: [usize; 3],
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Lagrangian probes along the flow map.
    Probe {
        #[command(subcommand)]
        probe: Probe,
    },
    /// Criterion along three routes: analytic, finite difference, trajectory.
    Compare {
        #[command(flatten)]
        field: FieldArgs,
        /// Repeat for several points.
        #[arg(long = "point", value_parser = triple, allow_hyphen_values = true, required = true)]
        points: Vec<Vec3>,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Run a built-in verification suite.
    Verify {
        #[arg(value_parser = ["corollary", "section3", "helix", "pressure", "remark12", "flowmap", "all"])]
        suite: String,
    },
    /// Field utilities.
    Field {
        #[command(subcommand)]
        action: FieldAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum Probe {
    /// Perpendicularity defect of the material disk spanned by the normal plane.
    Disk {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_parser = triple, allow_hyphen_values = true)]
        seed: Vec3,
        /// Also track an 8-marker ring of this radius.
        #[arg(long, value_parser = positive)]
        ring_radius: Option<f64>,
        #[command(flatten)]
        integ: IntegArgs,
    },
    /// Vorticity transported by the flow-map Jacobian.
    Cauchy {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_parser = triple, allow_hyphen_values = true)]
        seed: Vec3,
        /// Initial vorticity vector.
        #[arg(long, value_parser = triple, allow_hyphen_values = true)]
        omega: Vec3,
        #[command(flatten)]
        integ: IntegArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum FieldAction {
    /// Parse the field and audit exact jets against finite differences.
    Check {
        #[command(flatten)]
        field: FieldArgs,
        /// Number of random audit points.
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, value_parser = triple, allow_hyphen_values = true, default_value = "-1,-1,-1")]
        lo: Vec3,
        #[arg(long, value_parser = triple, allow_hyphen_values = true, default_value = "1,1,1")]
        hi: Vec3,
        /// Seed of the point generator.
        #[arg(long, default_value_t = 0)]
        rng_seed: u64,
        /// Finite-difference step; default scales with the point.
        #[arg(long, value_parser = positive)]
        fd_step: Option<f64>,
    },
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["catalog", "expr", "field_file"])))]
pub struct FieldArgs {
    /// Built-in field: planar_strain_paper, planar_strain_stated, axisym_strain,
    /// rigid_rotation, helical, abc.
    #[arg(long)]
    pub catalog: Option<String>,
    /// Catalog parameters, comma separated.
    #[arg(long, value_parser = finite, value_delimiter = ',', allow_hyphen_values = true)]
    pub params: Vec<f64>,
    /// Velocity components as "u1, u2, u3" in x, y, z.
    #[arg(long)]
    pub expr: Option<String>,
    /// File holding the component expressions; `#` starts a comment line.
    #[arg(long)]
    pub field_file: Option<PathBuf>,
    /// Pressure expression for parsed fields.
    #[arg(long)]
    pub pressure: Option<String>,
    /// Reverse the field (u -> -u).
    #[arg(long)]
    pub backward: bool,
}

#[derive(Debug, Args)]
pub struct TolArgs {
    #[arg(long, value_parser = positive)]
    pub eps_stagnation: Option<f64>,
    #[arg(long, value_parser = positive)]
    pub eps_kappa: Option<f64>,
    #[arg(long, value_parser = positive)]
    pub abs_tol: Option<f64>,
    #[arg(long, value_parser = positive)]
    pub rel_tol: Option<f64>,
}

impl TolArgs {
    pub fn policy(&self) -> TolerancePolicy {
        let d = TolerancePolicy::default();
        TolerancePolicy {
            eps_stagnation: self.eps_stagnation.unwrap_or(d.eps_stagnation),
            eps_kappa: self.eps_kappa.unwrap_or(d.eps_kappa),
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            eps_alpha: d.eps_alpha,
        }
    }
}

#[derive(Debug, Args)]
pub struct IntegArgs {
    /// Integration time; use --backward to follow the flow in reverse.
    #[arg(long, value_parser = non_negative, default_value_t = 1.0)]
    pub t_span: f64,
    /// Output samples, endpoints included.
    #[arg(long, default_value_t = 101)]
    pub samples: usize,
    #[arg(long, value_parser = positive)]
    pub rtol: Option<f64>,
    #[arg(long, value_parser = positive)]
    pub atol: Option<f64>,
    #[arg(long, value_parser = positive)]
    pub max_step: Option<f64>,
}

impl IntegArgs {
    pub fn config(&self) -> IntegratorConfig {
        let d = IntegratorConfig::default();
        IntegratorConfig {
            rel_tol: self.rtol.unwrap_or(d.rel_tol),
            abs_tol: self.atol.unwrap_or(d.abs_tol),
            max_step: self.max_step.unwrap_or(d.max_step),
            t_span: self.t_span,
            samples: self.samples,
            eps_stagnation: d.eps_stagnation,
        }
    }
}

pub fn finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{s}' is not finite"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v = finite(s)?;
    if v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("'{s}' must not be negative"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = finite(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("'{s}' must be positive"))
    }
}

pub fn triple(s: &str) -> Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z but got '{s}'"));
    }
    let mut v = Vec3::ZERO;
    for (i, p) in parts.iter().enumerate() {
        v[i] = finite(p)?;
    }
    Ok(v)
}

fn resolution(s: &str) -> Result<[usize; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected n1,n2,n3 but got '{s}'"));
    }
    let mut r = [0; 3];
    for (i, p) in parts.iter().enumerate() {
        r[i] = p.trim().parse().map_err(|_| format!("'{p}' is not a node count"))?;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triples() {
        assert_eq!(triple("2,1,0").unwrap(), Vec3::new(2.0, 1.0, 0.0));
        assert_eq!(triple(" -1.5, 2e-1 ,3").unwrap(), Vec3::new(-1.5, 0.2, 3.0));
        assert!(triple("1,2").is_err());
        assert!(triple("1,nan,2").is_err());
        assert!(triple("1;2;3").is_err());
    }

    #[test]
    fn exactly_one_field_source() {
        let ok = Cli::try_parse_from(["vc", "eval", "--catalog", "abc", "--params", "1,1,1", "--point", "0,0,0"]);
        assert!(ok.is_ok());
        let none = Cli::try_parse_from(["vc", "eval", "--point", "0,0,0"]);
        assert!(none.is_err());
        let two = Cli::try_parse_from(["vc", "eval", "--catalog", "abc", "--expr", "x,y,z", "--point", "0,0,0"]);
        assert!(two.is_err());
    }

    #[test]
    fn negative_values() {
        let c = Cli::try_parse_from(["vc", "eval", "--expr", "x,y,z", "--point", "-1,2,-3"]).unwrap();
        match c.command {
            Command::Eval { point, .. } => assert_eq!(point, Vec3::new(-1.0, 2.0, -3.0)),
            _ => unreachable!(),
        }
    }
}
