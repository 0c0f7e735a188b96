use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::diffgeo::{classify_point, PointClass, TolerancePolicy, Verdict};
use crate::error::{Error, Result};
use crate::fieldkit::VelocityField;
use crate::linalg::Vec3;

/// Axis-aligned box sampled on a tensor grid.
///
/// An axis with `lo == hi` is a slice and takes resolution 1; any other
/// axis needs at least two nodes, both endpoints included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    pub resolution: [usize; 3],
}

impl GridSpec {
    pub fn new(lo: [f64; 3], hi: [f64; 3], resolution: [usize; 3]) -> Result<Self> {
        let g = GridSpec { lo, hi, resolution };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for k in 0..3 {
            let (lo, hi, n) = (self.lo[k], self.hi[k], self.resolution[k]);
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return Err(Error::InvalidArgument(format!(
                    "axis {k}: bounds must be finite with lo <= hi, got [{lo}, {hi}]"
                )));
            }
            if lo == hi && n != 1 {
                return Err(Error::InvalidArgument(format!(
                    "axis {k}: a flat axis takes resolution 1, got {n}"
                )));
            }
            if lo < hi && n < 2 {
                return Err(Error::InvalidArgument(format!(
                    "axis {k}: resolution must be at least 2, got {n}"
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn coord(&self, axis: usize, i: usize) -> f64 {
        let n = self.resolution[axis];
        if n == 1 {
            self.lo[axis]
        } else if i == n - 1 {
            self.hi[axis]
        } else {
            self.lo[axis] + (self.hi[axis] - self.lo[axis]) * i as f64 / (n - 1) as f64
        }
    }

    /// Node with flat index `idx`; the first axis varies fastest.
    pub fn node(&self, idx: usize) -> Vec3 {
        let [n0, n1, _] = self.resolution;
        let (i, j, k) = (idx % n0, (idx / n0) % n1, idx / (n0 * n1));
        Vec3::new(self.coord(0, i), self.coord(1, j), self.coord(2, k))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub field: String,
    pub grid: GridSpec,
    pub tolerances: TolerancePolicy,
    pub points: Vec<PointClass>,
    pub summary: BTreeMap<Verdict, usize>,
}

impl ClassificationReport {
    pub fn count(&self, v: Verdict) -> usize {
        self.summary.get(&v).copied().unwrap_or(0)
    }
}

/// Classifies every grid node using the global rayon pool.
pub fn classify_grid(field: &VelocityField, grid: &GridSpec, tol: &TolerancePolicy) -> Result<ClassificationReport> {
    classify_grid_with_workers(field, grid, tol, None)
}

/// Same as [`classify_grid`] on a dedicated pool of `workers` threads.
/// The report does not depend on the worker count.
pub fn classify_grid_with_workers(
    field: &VelocityField,
    grid: &GridSpec,
    tol: &TolerancePolicy,
    workers: Option<usize>,
) -> Result<ClassificationReport> {
    grid.validate()?;
    tol.validate()?;
    let run = || -> Result<Vec<PointClass>> {
        (0..grid.len())
            .into_par_iter()
            .map(|idx| classify_point(field, &grid.node(idx), tol))
            .collect()
    };
    let points = match workers {
        None => run()?,
        Some(0) => return Err(Error::InvalidArgument("worker count must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?
            .install(run)?,
    };
    let mut summary: BTreeMap<Verdict, usize> = Verdict::ALL.iter().map(|v| (*v, 0)).collect();
    for p in &points {
        *summary.entry(p.verdict).or_default() += 1;
    }
    Ok(ClassificationReport {
        field: field.label(),
        grid: *grid,
        tolerances: *tol,
        points,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(name: &str) -> VelocityField {
        VelocityField::catalog(name, &[]).unwrap()
    }

    #[test]
    fn planar_strain_region_map() {
        let grid = GridSpec::new([0.1, 0.1, 0.0], [2.0, 2.0, 0.0], [50, 50, 1]).unwrap();
        let rep = classify_grid(&field("planar_strain_stated"), &grid, &TolerancePolicy::default()).unwrap();
        assert_eq!(rep.points.len(), 2500);
        assert_eq!(rep.summary.values().sum::<usize>(), 2500);
        let mut diagonal = 0;
        for p in &rep.points {
            let (x1, x2) = (p.x[0].abs(), p.x[1].abs());
            if x2 > x1 {
                assert_eq!(p.verdict, Verdict::ViolatesNecessaryCondition, "{p:?}");
            } else if x2 < x1 {
                assert_eq!(p.verdict, Verdict::NotStretching, "{p:?}");
            } else {
                diagonal += 1;
                assert!(p.criterion_zero && p.criterion_residual.abs() < 1e-14);
            }
        }
        assert_eq!(diagonal, 50);
    }

    #[test]
    fn axis_segment_is_candidate_stable() {
        let grid = GridSpec::new([0.0, 0.0, 0.5], [0.0, 0.0, 2.0], [1, 1, 7]).unwrap();
        let rep = classify_grid(&field("axisym_strain"), &grid, &TolerancePolicy::default()).unwrap();
        assert_eq!(rep.count(Verdict::CandidateStable), 7);
    }

    #[test]
    fn rotation_never_stretches() {
        let grid = GridSpec::new([0.2, -1.0, -1.0], [1.0, 1.0, 1.0], [4, 5, 3]).unwrap();
        let rep = classify_grid(&field("rigid_rotation"), &grid, &TolerancePolicy::default()).unwrap();
        assert_eq!(rep.count(Verdict::NotStretching), 60);
    }

    #[test]
    fn stagnation_node_is_degenerate() {
        let grid = GridSpec::new([-1.0, -1.0, 0.0], [1.0, 1.0, 0.0], [3, 3, 1]).unwrap();
        let rep = classify_grid(&field("planar_strain_paper"), &grid, &TolerancePolicy::default()).unwrap();
        let centre = &rep.points[4];
        assert!(centre.stagnation);
        assert_eq!(centre.verdict, Verdict::Degenerate);
    }

    #[test]
    fn worker_count_does_not_matter() {
        let f = VelocityField::catalog("abc", &[1.0, 1.0, 1.0]).unwrap();
        let grid = GridSpec::new([0.0; 3], [1.0; 3], [6, 5, 4]).unwrap();
        let tol = TolerancePolicy::default();
        let one = classify_grid_with_workers(&f, &grid, &tol, Some(1)).unwrap();
        let four = classify_grid_with_workers(&f, &grid, &tol, Some(4)).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn bad_grids_rejected() {
        assert!(GridSpec::new([0.0; 3], [1.0, 1.0, 0.0], [2, 2, 2]).is_err());
        assert!(GridSpec::new([0.0; 3], [1.0; 3], [2, 1, 2]).is_err());
        assert!(GridSpec::new([1.0, 0.0, 0.0], [0.0, 1.0, 1.0], [2, 2, 2]).is_err());
        assert!(GridSpec::new([f64::NAN, 0.0, 0.0], [1.0; 3], [2, 2, 2]).is_err());
    }
}
