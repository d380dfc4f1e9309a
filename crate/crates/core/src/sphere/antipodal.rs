//! Near-antipodal distance checks: the chain-amplification inequality, the
//! rhombus impossibility scan, and the greedy antipodal path search that
//! feeds the bipartite witness check.

use rand::Rng;

use super::{SpherePoint, DIST_SLACK};
use crate::error::{Error, Result};
use crate::hypercube::BipartiteAux;
use crate::rng::substream;

/// Result of one chain-amplification check.
#[derive(Clone, Debug)]
pub struct ChainCheck {
    pub holds: bool,
    /// measured d(x_1, x_{2h})
    pub distance: f64,
    /// the amplified bound 2 - 4 h^2 a
    pub bound: f64,
    pub margin: f64,
}

/// Checks the chain-amplification inequality: points with consecutive
/// distances at least 2 - a satisfy d(x_1, x_{2h}) > 2 - 4 h^2 a, provided
/// a < 1/(16 h^4). Returns the verdict with the measured slack; for any
/// input meeting the preconditions the verdict is true.
pub fn chain_antipodal_amplify_check(points: &[SpherePoint], a: f64, h: usize) -> Result<ChainCheck> {
    if h == 0 {
        return Err(Error::Domain("h must be >= 1".into()));
    }
    let cap = 1.0 / (16.0 * (h as f64).powi(4));
    if a <= 0.0 || a >= cap {
        return Err(Error::Precondition(format!(
            "a = {a} outside (0, 1/(16 h^4)) = (0, {cap})"
        )));
    }
    if points.len() < 2 * h {
        return Err(Error::Domain(format!(
            "need at least {} chain points, got {}",
            2 * h,
            points.len()
        )));
    }
    for i in 0..(2 * h - 1) {
        let d = points[i].dist(&points[i + 1]);
        if d < 2.0 - a - DIST_SLACK {
            return Err(Error::Precondition(format!(
                "consecutive distance d(x_{}, x_{}) = {d} < 2 - a = {}",
                i + 1,
                i + 2,
                2.0 - a
            )));
        }
    }
    let distance = points[0].dist(&points[2 * h - 1]);
    let bound = 2.0 - 4.0 * (h * h) as f64 * a;
    Ok(ChainCheck { holds: distance > bound - DIST_SLACK, distance, bound, margin: distance - bound })
}

/// A quadruple violating the rhombus impossibility (never produced by
/// points actually on a sphere; nonempty output means broken input).
#[derive(Clone, Debug)]
pub struct RhombusViolation {
    pub p1: usize,
    pub p2: usize,
    pub q1: usize,
    pub q2: usize,
}

/// Searches for quadruples p1, p2, q1, q2 with both within-pair distances
/// at least 2 - gamma and all four cross distances at most sqrt(2) - gamma.
///
/// Exhaustive when |points|^4 <= 10^8, otherwise a seeded sample of
/// `trials` quadruples. The returned list is empty for genuine sphere
/// points (theorem-backed for 0 < gamma < 1/4).
pub fn rhombus_scan(
    points: &[SpherePoint],
    gamma: f64,
    trials: usize,
    seed: u64,
) -> Result<Vec<RhombusViolation>> {
    if !(gamma > 0.0 && gamma < 0.25) {
        return Err(Error::Domain(format!("gamma = {gamma} outside (0, 1/4)")));
    }
    let n = points.len();
    let far = 2.0 - gamma;
    let near = 2.0f64.sqrt() - gamma;
    let mut out = Vec::new();
    let is_violation = |p1: usize, p2: usize, q1: usize, q2: usize| -> bool {
        points[p1].dist(&points[p2]) >= far
            && points[q1].dist(&points[q2]) >= far
            && points[p1].dist(&points[q1]) <= near
            && points[p1].dist(&points[q2]) <= near
            && points[p2].dist(&points[q1]) <= near
            && points[p2].dist(&points[q2]) <= near
    };
    if (n as u64).pow(4) <= 100_000_000 {
        // exhaustive over pairs of nearly-antipodal pairs
        let mut antipodal_pairs = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if points[i].dist(&points[j]) >= far {
                    antipodal_pairs.push((i, j));
                }
            }
        }
        for (ai, &(p1, p2)) in antipodal_pairs.iter().enumerate() {
            for &(q1, q2) in &antipodal_pairs[ai..] {
                if is_violation(p1, p2, q1, q2) {
                    out.push(RhombusViolation { p1, p2, q1, q2 });
                }
            }
        }
    } else {
        let mut rng = substream(seed, "rhombus-scan");
        for _ in 0..trials {
            let p1 = rng.random_range(0..n);
            let p2 = rng.random_range(0..n);
            let q1 = rng.random_range(0..n);
            let q2 = rng.random_range(0..n);
            if is_violation(p1, p2, q1, q2) {
                out.push(RhombusViolation { p1, p2, q1, q2 });
            }
        }
    }
    Ok(out)
}

/// Outcome of the greedy antipodal path search.
#[derive(Clone, Debug)]
pub enum PathSearch {
    Found(Vec<SpherePoint>),
    Failed {
        /// 0-based index of the set where the search stalled
        at: usize,
        best_distance: f64,
    },
}

/// Greedy path: start at the first point of the first set and repeatedly
/// pick the farthest point of the next set. Succeeds when every
/// consecutive distance reaches 2 - theta_fine.
pub fn find_antipodal_path(sets: &[Vec<SpherePoint>], theta_fine: f64) -> Result<PathSearch> {
    if sets.is_empty() {
        return Err(Error::Domain("no point sets given".into()));
    }
    for (i, s) in sets.iter().enumerate() {
        if s.is_empty() {
            return Err(Error::Domain(format!("point set {i} is empty")));
        }
    }
    let mut path = vec![sets[0][0].clone()];
    for (i, set) in sets.iter().enumerate().skip(1) {
        let last = path.last().unwrap();
        let mut best = &set[0];
        let mut best_d = last.dist(best);
        for p in &set[1..] {
            let d = last.dist(p);
            if d > best_d {
                best_d = d;
                best = p;
            }
        }
        if best_d < 2.0 - theta_fine - DIST_SLACK {
            return Ok(PathSearch::Failed { at: i, best_distance: best_d });
        }
        path.push(best.clone());
    }
    Ok(PathSearch::Found(path))
}

/// Checks the amplified conclusion along a near-antipodal path: for every
/// edge of `b` joining opposite-parity path positions, the two points are
/// at distance greater than 2 - theta.
///
/// Precondition: consecutive path distances at least 2 - theta/r^2 (the
/// failing pair is named otherwise). In the construction's regime
/// (theta < 1/r^2) the amplification inequality makes the result true
/// whenever the precondition holds.
pub fn bipartite_antipodal_witness(
    path: &[SpherePoint],
    theta: f64,
    b: &BipartiteAux,
) -> Result<bool> {
    let r = path.len();
    if r < 2 {
        return Err(Error::Domain("path needs at least 2 points".into()));
    }
    let step = 2.0 - theta / (r * r) as f64;
    for i in 0..(r - 1) {
        let d = path[i].dist(&path[i + 1]);
        if d < step - DIST_SLACK {
            return Err(Error::Precondition(format!(
                "consecutive distance d(p_{}, p_{}) = {d} < {step}",
                i + 1,
                i + 2
            )));
        }
    }
    let needed = 2.0 - theta;
    for &i in &b.part0 {
        for &j in &b.part1 {
            if i >= r || j >= r {
                return Err(Error::Domain(format!(
                    "bipartite vertex {} outside path of length {r}",
                    i.max(j)
                )));
            }
            if (i + j) % 2 == 1 && path[i].dist(&path[j]) <= needed - DIST_SLACK {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use crate::sphere::uniform_point;

    /// Point at chord distance about `2 - delta` from p: the antipode
    /// nudged along a tangent direction.
    fn near_antipode<R: Rng>(p: &SpherePoint, delta: f64, rng: &mut R) -> SpherePoint {
        let k = p.dim();
        // tangent direction
        let raw = uniform_point(k, rng);
        let proj = raw.dot(p);
        let mut tang: Vec<f64> =
            raw.coords().iter().zip(p.coords()).map(|(r, c)| r - proj * c).collect();
        let norm: f64 = tang.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-9 {
            return p.antipode();
        }
        tang.iter_mut().for_each(|x| *x /= norm);
        // chord 2 - delta corresponds to moving the antipode by angle eta
        // with cos(eta) = (2 - delta)^2 / 2 - 1
        let cos_eta = ((2.0 - delta).powi(2) / 2.0 - 1.0).clamp(-1.0, 1.0);
        let eta = cos_eta.acos();
        let anti = p.antipode();
        let coords: Vec<f64> = anti
            .coords()
            .iter()
            .zip(&tang)
            .map(|(a, t)| a * eta.cos() + t * eta.sin())
            .collect();
        SpherePoint::normalized(coords).unwrap()
    }

    #[test]
    fn exact_alternating_chain_holds_with_full_margin() {
        let p = SpherePoint::pole(3);
        let chain = vec![p.clone(), p.antipode(), p.clone(), p.antipode()];
        let res = chain_antipodal_amplify_check(&chain, 1e-6, 1).unwrap();
        assert!(res.holds);
        assert!((res.distance - 2.0).abs() < 1e-12);
    }

    #[test]
    fn perturbed_chains_hold() {
        let mut rng = substream(11, "chain-test");
        for _ in 0..200 {
            let h = 1 + rng.random_range(0..3usize);
            let a = 0.9 / (16.0 * (h as f64).powi(4));
            let mut chain = vec![uniform_point(6, &mut rng)];
            for _ in 1..(2 * h) {
                // consecutive distance >= 2 - a/2 > 2 - a
                let prev = chain.last().unwrap().clone();
                chain.push(near_antipode(&prev, a * 0.5 * rng.random::<f64>(), &mut rng));
            }
            let res = chain_antipodal_amplify_check(&chain, a, h).unwrap();
            assert!(res.holds, "margin {}", res.margin);
        }
    }

    #[test]
    fn domain_boundary_for_a_is_enforced() {
        let p = SpherePoint::pole(2);
        let chain = vec![p.clone(), p.antipode()];
        // 1/16 = 0.0625 is the boundary for h = 1
        assert!(matches!(
            chain_antipodal_amplify_check(&chain, 0.0626, 1),
            Err(Error::Precondition(_))
        ));
        assert!(chain_antipodal_amplify_check(&chain, 0.05, 1).is_ok());
    }

    #[test]
    fn broken_chain_names_the_index() {
        let p = SpherePoint::pole(3);
        let q = uniform_point(3, &mut substream(1, "x"));
        let err = chain_antipodal_amplify_check(&[p.clone(), q, p.antipode(), p.clone()], 1e-4, 2)
            .unwrap_err();
        assert!(err.to_string().contains("x_1"), "got: {err}");
    }

    #[test]
    fn orthonormal_frame_is_not_a_rhombus_violation() {
        // p2 = -p1, q2 = -q1, q's orthogonal to p's: cross distances are
        // sqrt(2), above the sqrt(2) - gamma cutoff
        let mut e1 = vec![0.0; 6];
        e1[0] = 1.0;
        let mut e2 = vec![0.0; 6];
        e2[1] = 1.0;
        let p1 = SpherePoint::new(e1).unwrap();
        let q1 = SpherePoint::new(e2).unwrap();
        let pts = vec![p1.clone(), p1.antipode(), q1.clone(), q1.antipode()];
        let v = rhombus_scan(&pts, 0.2, 10, 0).unwrap();
        assert!(v.is_empty());
    }

    #[test]
    fn random_scans_find_nothing() {
        let mut rng = substream(23, "rhombus-points");
        let pts: Vec<SpherePoint> = (0..40).map(|_| uniform_point(10, &mut rng)).collect();
        let v = rhombus_scan(&pts, 0.2, 1000, 7).unwrap();
        assert!(v.is_empty());
    }

    #[test]
    fn gamma_domain_is_enforced() {
        let pts = vec![SpherePoint::pole(2)];
        assert!(rhombus_scan(&pts, 0.25, 10, 0).is_err());
        assert!(rhombus_scan(&pts, 0.0, 10, 0).is_err());
    }

    #[test]
    fn greedy_path_on_antipode_closed_sets_succeeds() {
        let mut rng = substream(31, "path-test");
        // closed under antipodes: every point's antipode is available
        let mut pts: Vec<SpherePoint> = (0..24).map(|_| uniform_point(8, &mut rng)).collect();
        let antis: Vec<SpherePoint> = pts.iter().map(|p| p.antipode()).collect();
        pts.extend(antis);
        let sets = vec![pts.clone(), pts.clone(), pts.clone(), pts];
        match find_antipodal_path(&sets, 1e-6).unwrap() {
            PathSearch::Found(path) => {
                for w in path.windows(2) {
                    assert!(w[0].dist(&w[1]) >= 2.0 - 1e-6 - 1e-9);
                }
            }
            PathSearch::Failed { at, best_distance } => {
                panic!("failed at {at} with best {best_distance}")
            }
        }
    }

    #[test]
    fn capped_second_set_fails_with_report() {
        let p = SpherePoint::pole(4);
        let mut rng = substream(37, "path-fail");
        // second set confined near p itself, so nothing is far from p
        let near: Vec<SpherePoint> = (0..10)
            .map(|_| {
                let mut c = p.coords().to_vec();
                for x in c.iter_mut().skip(1) {
                    *x += 0.01 * (rng.random::<f64>() - 0.5);
                }
                SpherePoint::normalized(c).unwrap()
            })
            .collect();
        match find_antipodal_path(&[vec![p], near], 0.1).unwrap() {
            PathSearch::Failed { at, best_distance } => {
                assert_eq!(at, 1);
                assert!(best_distance < 1.0);
            }
            PathSearch::Found(_) => panic!("must fail"),
        }
    }

    #[test]
    fn single_set_is_trivially_found() {
        let p = SpherePoint::pole(3);
        match find_antipodal_path(&[vec![p]], 0.5).unwrap() {
            PathSearch::Found(path) => assert_eq!(path.len(), 1),
            _ => panic!(),
        }
    }

    #[test]
    fn exact_alternating_path_passes_any_opposite_parity_bipartite() {
        let p = SpherePoint::pole(5);
        let path = vec![p.clone(), p.antipode(), p.clone(), p.antipode()];
        let b = BipartiteAux { index: 1, part0: vec![0, 2], part1: vec![1, 3] };
        assert!(bipartite_antipodal_witness(&path, 0.2, &b).unwrap());
    }

    #[test]
    fn short_consecutive_distance_is_a_precondition_error() {
        let p = SpherePoint::pole(4);
        let mut q = vec![0.0; 5];
        q[1] = 1.0; // distance sqrt(2), far from antipodal
        let path = vec![p.clone(), SpherePoint::new(q).unwrap(), p.clone()];
        let b = BipartiteAux { index: 1, part0: vec![0, 2], part1: vec![1] };
        let err = bipartite_antipodal_witness(&path, 0.1, &b).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
        assert!(err.to_string().contains("p_1"), "got: {err}");
    }

    #[test]
    fn perturbed_paths_pass_witness() {
        let mut rng = substream(41, "witness-test");
        for _ in 0..100 {
            let r = 4usize;
            let theta = 0.9 / (r * r) as f64;
            let step_slack = theta / (r * r) as f64;
            let mut path = vec![uniform_point(20, &mut rng)];
            for _ in 1..r {
                let prev = path.last().unwrap().clone();
                path.push(near_antipode(&prev, step_slack * rng.random::<f64>(), &mut rng));
            }
            let b = BipartiteAux { index: 1, part0: vec![0, 2], part1: vec![1, 3] };
            assert!(bipartite_antipodal_witness(&path, theta, &b).unwrap());
        }
    }
}
