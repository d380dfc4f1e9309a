//! Recursive zonal equal-measure partition of S^k.
//!
//! The sphere splits into two polar caps of measure 1/z and a stack of
//! collars; each collar is a polar-angle band crossed with a partition of
//! the next sphere down, recursing until the circle, which splits into
//! equal arcs. Collar boundaries are placed by inverse cap measure at
//! cumulative region counts, so every cell has measure exactly 1/z up to
//! root-finding tolerance. Cell diameters are measured from boundary
//! corner candidates plus seeded interior probes.

use std::f64::consts::PI;
use std::io::Write;

use rand::Rng;
use statrs::function::gamma::ln_gamma;

use super::{cap_angle_from_measure, cap_measure_angle, SpherePoint};
use crate::error::{Error, Result};
use crate::rng::substream;

const TWO_PI: f64 = 2.0 * PI;

/// A cell region as a chain of angular intervals.
///
/// Entry j constrains the polar angle on the sphere of dimension k - j
/// (or the azimuth once the chain reaches the circle). Levels beyond the
/// chain are unconstrained: the cell spans the whole residual sphere.
#[derive(Clone, Debug)]
pub struct CellRegion {
    k: usize,
    intervals: Vec<(f64, f64)>,
}

impl CellRegion {
    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    /// Sphere dimension at chain level `j`.
    fn dim_at(&self, j: usize) -> usize {
        self.k - j
    }

    /// Whether the point lies in this region. Boundaries follow a
    /// half-open convention closed at the top of each range.
    pub fn contains(&self, p: &SpherePoint) -> bool {
        debug_assert_eq!(p.dim(), self.k);
        let mut v: Vec<f64> = p.coords().to_vec();
        for (j, &(lo, hi)) in self.intervals.iter().enumerate() {
            let d = self.dim_at(j);
            if d >= 2 {
                let c = v[v.len() - 1].clamp(-1.0, 1.0);
                let theta = c.acos();
                if !in_interval(theta, lo, hi, PI) {
                    return false;
                }
                v.pop();
                let norm: f64 = v.iter().map(|w| w * w).sum::<f64>().sqrt();
                if norm < 1e-12 {
                    // at a pole the residual direction is arbitrary
                    v.iter_mut().for_each(|w| *w = 0.0);
                    v[0] = 1.0;
                } else {
                    v.iter_mut().for_each(|w| *w /= norm);
                }
            } else {
                let psi = wrap_azimuth(v[1].atan2(v[0]));
                if !in_interval(psi, lo, hi, TWO_PI) {
                    return false;
                }
            }
        }
        true
    }

    /// Normalized measure: the product of the per-level interval measures.
    fn measure(&self) -> Result<f64> {
        let mut m = 1.0;
        for (j, &(lo, hi)) in self.intervals.iter().enumerate() {
            let d = self.dim_at(j);
            if d >= 2 {
                m *= cap_measure_angle(d, hi)? - cap_measure_angle(d, lo)?;
            } else {
                m *= (hi - lo) / TWO_PI;
            }
        }
        Ok(m)
    }

    /// Point assembled from one angle per constrained level; unconstrained
    /// residual levels sit at the first-axis pole.
    fn point_at(&self, angles: &[f64], residual: Option<&[f64]>) -> SpherePoint {
        let depth = self.intervals.len();
        debug_assert_eq!(angles.len(), depth);
        let innermost_dim = if depth == 0 { self.k } else { self.dim_at(depth - 1) };
        // seed vector: the residual sphere below the last constrained level
        let mut v: Vec<f64> = if depth > 0 && innermost_dim == 1 {
            let psi = angles[depth - 1];
            vec![psi.cos(), psi.sin()]
        } else {
            // residual sphere of dimension innermost_dim - 1 (or k if no
            // constraint at all)
            let m = if depth == 0 { self.k } else { innermost_dim - 1 };
            match residual {
                Some(r) => {
                    debug_assert_eq!(r.len(), m + 1);
                    r.to_vec()
                }
                None => {
                    let mut r = vec![0.0; m + 1];
                    r[0] = 1.0;
                    r
                }
            }
        };
        let polar_levels = if depth > 0 && innermost_dim == 1 { depth - 1 } else { depth };
        for j in (0..polar_levels).rev() {
            let theta = angles[j];
            let (s, c) = theta.sin_cos();
            let mut next = Vec::with_capacity(v.len() + 1);
            next.extend(v.iter().map(|w| w * s));
            next.push(c);
            v = next;
        }
        SpherePoint::normalized(v).expect("assembled point is on the sphere")
    }

    fn representative(&self) -> SpherePoint {
        let mids: Vec<f64> = self.intervals.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect();
        self.point_at(&mids, None)
    }

    /// Measured diameter: max pairwise chord over boundary corner
    /// candidates, antipodal residual directions, and seeded probes.
    fn measured_diameter<R: Rng>(&self, rng: &mut R, probes: usize) -> f64 {
        let depth = self.intervals.len();
        let mut per_level: Vec<Vec<f64>> = Vec::with_capacity(depth);
        for (j, &(lo, hi)) in self.intervals.iter().enumerate() {
            let d = self.dim_at(j);
            let mut vals = vec![lo, 0.5 * (lo + hi), hi];
            if d >= 2 {
                // the angle pair theta + theta' = pi extremizes chords
                for cand in [PI - lo, PI - hi] {
                    if cand > lo && cand < hi {
                        vals.push(cand);
                    }
                }
            } else {
                for cand in [lo + PI, hi - PI] {
                    if cand > lo && cand < hi {
                        vals.push(cand);
                    }
                }
            }
            vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
            vals.dedup();
            per_level.push(vals);
        }
        let innermost_dim = if depth == 0 { self.k } else { self.dim_at(depth - 1) };
        let residual_dim =
            if depth == 0 { Some(self.k) } else if innermost_dim >= 2 { Some(innermost_dim - 1) } else { None };
        let residuals: Vec<Option<Vec<f64>>> = match residual_dim {
            None => vec![None],
            Some(m) => {
                let mut plus = vec![0.0; m + 1];
                plus[0] = 1.0;
                let mut minus = vec![0.0; m + 1];
                minus[0] = -1.0;
                vec![Some(plus), Some(minus)]
            }
        };

        // Corner candidates: the full product for shallow chains, a seeded
        // sample of corner combinations once the product explodes.
        const CORNER_CAP: usize = 512;
        let product = per_level.iter().try_fold(1usize, |acc, v| {
            acc.checked_mul(v.len()).filter(|p| *p <= CORNER_CAP)
        });
        let mut corner_angles: Vec<Vec<f64>> = Vec::new();
        match product {
            Some(_) => {
                let mut index = vec![0usize; depth];
                'outer: loop {
                    corner_angles.push(
                        index.iter().enumerate().map(|(j, &i)| per_level[j][i]).collect(),
                    );
                    let mut j = 0;
                    loop {
                        if j == depth {
                            break 'outer;
                        }
                        index[j] += 1;
                        if index[j] < per_level[j].len() {
                            break;
                        }
                        index[j] = 0;
                        j += 1;
                    }
                }
            }
            None => {
                for _ in 0..CORNER_CAP {
                    corner_angles.push(
                        per_level
                            .iter()
                            .map(|v| v[rng.random_range(0..v.len())])
                            .collect(),
                    );
                }
                // always include the all-low / all-high / all-mid corners
                for pick in 0..3usize {
                    corner_angles
                        .push(per_level.iter().map(|v| v[pick.min(v.len() - 1)]).collect());
                }
            }
        }

        let mut candidates: Vec<SpherePoint> =
            Vec::with_capacity(corner_angles.len() * residuals.len() + probes);
        for angles in &corner_angles {
            for res in &residuals {
                candidates.push(self.point_at(angles, res.as_deref()));
            }
        }
        for _ in 0..probes {
            let angles: Vec<f64> = self
                .intervals
                .iter()
                .map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
                .collect();
            let res = residual_dim.map(|m| {
                let p = super::uniform_point(m, rng);
                p.coords().to_vec()
            });
            candidates.push(self.point_at(&angles, res.as_deref()));
        }

        let mut best = 0.0f64;
        for i in 0..candidates.len() {
            for j in (i + 1)..candidates.len() {
                best = best.max(candidates[i].dist(&candidates[j]));
            }
        }
        best
    }
}

fn in_interval(x: f64, lo: f64, hi: f64, top: f64) -> bool {
    if x < lo {
        return false;
    }
    if x < hi {
        return true;
    }
    hi >= top - 1e-12 && x <= top + 1e-12
}

fn wrap_azimuth(psi: f64) -> f64 {
    let mut p = psi % TWO_PI;
    if p < 0.0 {
        p += TWO_PI;
    }
    p
}

/// One cell of the partition.
#[derive(Clone, Debug)]
pub struct SphereCell {
    pub index: usize,
    pub representative: SpherePoint,
    pub measure: f64,
    pub diameter_bound: f64,
    pub region: CellRegion,
}

/// A full equal-measure partition with its achieved diameter record.
#[derive(Clone, Debug)]
pub struct Partition {
    pub k: usize,
    pub z: usize,
    pub cells: Vec<SphereCell>,
    /// Largest measured cell diameter; downstream margins that the target
    /// diameter cannot meet at this z use this value instead.
    pub max_diameter: f64,
    pub diameter_target: f64,
    pub meets_target: bool,
}

impl Partition {
    pub fn representatives(&self) -> Vec<SpherePoint> {
        self.cells.iter().map(|c| c.representative.clone()).collect()
    }

    /// Index of the cell containing `p`, if any.
    pub fn locate(&self, p: &SpherePoint) -> Option<usize> {
        self.cells.iter().position(|c| c.region.contains(p))
    }

    /// CSV export: cell_index, coordinates, measure, diameter.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        write!(w, "cell_index")?;
        for i in 0..=self.k {
            write!(w, ",c{i}")?;
        }
        writeln!(w, ",measure,diameter")?;
        for cell in &self.cells {
            write!(w, "{}", cell.index)?;
            for c in cell.representative.coords() {
                write!(w, ",{c:.17}")?;
            }
            writeln!(w, ",{:.17},{:.17}", cell.measure, cell.diameter_bound)?;
        }
        Ok(())
    }
}

/// Equal-measure partition of S^k into z cells.
///
/// Deterministic given (k, z); the seed drives the interior probes of the
/// per-cell diameter measurement. When the scheme cannot meet
/// `diameter_target` at this z, the achieved maximum is recorded and
/// `meets_target` is false.
pub fn partition_sphere(k: usize, z: usize, diameter_target: f64, seed: u64) -> Result<Partition> {
    if k < 2 {
        return Err(Error::Domain(format!("partition requires k >= 2, got {k}")));
    }
    if z < 2 {
        return Err(Error::Domain(format!("partition requires z >= 2 cells, got {z}")));
    }
    let chains = eq_intervals(k, z)?;
    debug_assert_eq!(chains.len(), z);
    let mut rng = substream(seed, "partition-diameter");
    let mut cells = Vec::with_capacity(z);
    let mut max_diameter = 0.0f64;
    for (index, intervals) in chains.into_iter().enumerate() {
        let region = CellRegion { k, intervals };
        let representative = region.representative();
        let measure = region.measure()?;
        let diameter_bound = region.measured_diameter(&mut rng, 48);
        max_diameter = max_diameter.max(diameter_bound);
        cells.push(SphereCell { index, representative, measure, diameter_bound, region });
    }
    Ok(Partition {
        k,
        z,
        cells,
        max_diameter,
        diameter_target,
        meets_target: max_diameter <= diameter_target,
    })
}

/// ln of the surface area of S^d.
fn ln_sphere_area(d: usize) -> f64 {
    let v = (d as f64 + 1.0) / 2.0;
    (2.0f64).ln() + v * PI.ln() - ln_gamma(v)
}

/// Recursive region builder: returns one interval chain per cell.
fn eq_intervals(d: usize, n: usize) -> Result<Vec<Vec<(f64, f64)>>> {
    if n == 1 {
        return Ok(vec![vec![]]);
    }
    if d == 1 {
        return Ok((0..n)
            .map(|i| vec![(TWO_PI * i as f64 / n as f64, TWO_PI * (i + 1) as f64 / n as f64)])
            .collect());
    }
    let phi_c = cap_angle_from_measure(d, 1.0 / n as f64)?;
    if n == 2 {
        return Ok(vec![vec![(0.0, phi_c)], vec![(phi_c, PI)]]);
    }

    // ideal collar count from the side length of an equal-measure cell
    let delta_ideal = ((ln_sphere_area(d) - (n as f64).ln()) / d as f64).exp();
    let span = PI - 2.0 * phi_c;
    let n_collars = ((span / delta_ideal).round() as usize).clamp(1, n - 2);

    // ideal region counts per equal-angle collar, then cumulative rounding
    let mut ideal = Vec::with_capacity(n_collars);
    for i in 0..n_collars {
        let a = phi_c + span * i as f64 / n_collars as f64;
        let b = phi_c + span * (i + 1) as f64 / n_collars as f64;
        ideal.push(n as f64 * (cap_measure_angle(d, b)? - cap_measure_angle(d, a)?));
    }
    let mut counts = Vec::with_capacity(n_collars);
    let mut acc = 0.0f64;
    let mut assigned = 0usize;
    for (i, &y_ideal) in ideal.iter().enumerate() {
        let remaining = n - 2 - assigned;
        let collars_left = n_collars - i;
        let y = if collars_left == 1 {
            remaining
        } else {
            let upper = remaining - (collars_left - 1);
            ((y_ideal + acc).round() as isize).clamp(1, upper as isize) as usize
        };
        acc += y_ideal - y as f64;
        counts.push(y);
        assigned += y;
    }
    debug_assert_eq!(assigned, n - 2);

    // exact boundaries at cumulative cell counts
    let mut bounds = Vec::with_capacity(n_collars + 1);
    let mut cum = 1usize;
    bounds.push(phi_c);
    for &y in &counts {
        cum += y;
        bounds.push(cap_angle_from_measure(d, cum as f64 / n as f64)?);
    }

    let mut out = Vec::with_capacity(n);
    out.push(vec![(0.0, phi_c)]);
    for (i, &y) in counts.iter().enumerate() {
        let band = (bounds[i], bounds[i + 1]);
        for sub in eq_intervals(d - 1, y)? {
            let mut chain = Vec::with_capacity(1 + sub.len());
            chain.push(band);
            chain.extend(sub);
            out.push(chain);
        }
    }
    out.push(vec![(bounds[n_collars], PI)]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::uniform_point;

    #[test]
    fn two_cells_are_hemispheres() {
        let p = partition_sphere(2, 2, 0.5, 1).unwrap();
        assert_eq!(p.cells.len(), 2);
        for cell in &p.cells {
            assert!((cell.measure - 0.5).abs() < 1e-9);
            assert!((cell.diameter_bound - 2.0).abs() < 1e-9, "hemisphere diameter");
        }
        assert!(!p.meets_target);
    }

    #[test]
    fn measures_are_equal_and_sum_to_one() {
        for (k, z) in [(2usize, 7usize), (2, 100), (3, 33), (5, 16), (50, 32)] {
            let p = partition_sphere(k, z, 0.1, 3).unwrap();
            assert_eq!(p.cells.len(), z);
            let total: f64 = p.cells.iter().map(|c| c.measure).sum();
            assert!((total - 1.0).abs() < 1e-6, "k={k} z={z} total {total}");
            for c in &p.cells {
                let rel = (c.measure * z as f64 - 1.0).abs();
                assert!(rel < 0.05, "k={k} z={z} cell {} off by {rel}", c.index);
            }
        }
    }

    #[test]
    fn representatives_lie_in_their_own_cells() {
        for (k, z) in [(2usize, 12usize), (3, 20), (6, 15)] {
            let p = partition_sphere(k, z, 0.1, 5).unwrap();
            for c in &p.cells {
                assert!(
                    c.region.contains(&c.representative),
                    "k={k} z={z} cell {}",
                    c.index
                );
                assert_eq!(p.locate(&c.representative), Some(c.index));
            }
        }
    }

    #[test]
    fn random_points_land_in_exactly_one_cell() {
        let p = partition_sphere(3, 24, 0.1, 7).unwrap();
        let mut rng = crate::rng::substream(7, "partition-cover-test");
        for _ in 0..2000 {
            let x = uniform_point(3, &mut rng);
            let hits = p.cells.iter().filter(|c| c.region.contains(&x)).count();
            assert_eq!(hits, 1, "point {:?}", x.coords());
        }
    }

    #[test]
    fn finer_partitions_have_smaller_cells() {
        let coarse = partition_sphere(2, 100, 0.0, 9).unwrap();
        let fine = partition_sphere(2, 10_000, 0.0, 9).unwrap();
        assert!(coarse.max_diameter < 2.0);
        assert!(
            fine.max_diameter < coarse.max_diameter,
            "fine {} vs coarse {}",
            fine.max_diameter,
            coarse.max_diameter
        );
    }

    #[test]
    fn rejects_degenerate_requests() {
        assert!(partition_sphere(2, 1, 0.1, 0).is_err());
        assert!(partition_sphere(1, 4, 0.1, 0).is_err());
    }

    #[test]
    fn csv_export_has_header_and_rows() {
        let p = partition_sphere(2, 4, 0.1, 0).unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[0].starts_with("cell_index,c0,c1,c2,measure,diameter"));
    }
}
