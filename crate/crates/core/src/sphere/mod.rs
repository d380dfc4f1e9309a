//! Geometry on the k-dimensional unit sphere S^k in R^(k+1): points and
//! chord distances, spherical cap measures in closed form, selection of the
//! construction margins (epsilon, k), the equal-measure partition, and the
//! near-antipodal distance checks.

mod antipodal;
mod partition;

pub use antipodal::{
    bipartite_antipodal_witness, chain_antipodal_amplify_check, find_antipodal_path, rhombus_scan,
    ChainCheck, PathSearch, RhombusViolation,
};
pub use partition::{partition_sphere, CellRegion, Partition, SphereCell};

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

/// Unit-norm tolerance for sphere points.
pub const NORM_TOL: f64 = 1e-9;

/// Fixed numeric slack guarding strict distance inequalities against
/// floating-point ties. The construction margins are many orders of
/// magnitude above this.
pub const DIST_SLACK: f64 = 1e-9;

/// A point on S^k, stored as its k+1 Euclidean coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    /// Wraps coordinates that are already unit-norm (within 1e-9).
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::Domain("sphere points need at least 2 coordinates".into()));
        }
        let norm2: f64 = coords.iter().map(|c| c * c).sum();
        if (norm2.sqrt() - 1.0).abs() > NORM_TOL {
            return Err(Error::Domain(format!(
                "coordinates have norm {} (must be 1 within {NORM_TOL})",
                norm2.sqrt()
            )));
        }
        Ok(Self { coords })
    }

    /// Normalizes arbitrary coordinates onto the sphere.
    pub fn normalized(mut coords: Vec<f64>) -> Result<Self> {
        let norm: f64 = coords.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::Domain("cannot normalize a near-zero vector".into()));
        }
        for c in &mut coords {
            *c /= norm;
        }
        Self::new(coords)
    }

    /// Sphere dimension k (one less than the coordinate count).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }

    /// Euclidean (chord) distance.
    pub fn dist(&self, other: &SpherePoint) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn antipode(&self) -> SpherePoint {
        SpherePoint { coords: self.coords.iter().map(|c| -c).collect() }
    }

    /// The basis point e_1 on S^k.
    pub fn pole(k: usize) -> SpherePoint {
        let mut coords = vec![0.0; k + 1];
        coords[0] = 1.0;
        SpherePoint { coords }
    }
}

/// Uniform random point on S^k.
pub fn uniform_point<R: Rng + ?Sized>(k: usize, rng: &mut R) -> SpherePoint {
    loop {
        let coords: Vec<f64> = (0..=k).map(|_| rng.sample(StandardNormal)).collect();
        if let Ok(p) = SpherePoint::normalized(coords) {
            return p;
        }
    }
}

/// Normalized measure of a spherical cap with polar angle `phi` on S^k.
///
/// Closed form via the regularized incomplete beta function of sin^2(phi);
/// the hemisphere case phi = pi/2 evaluates to 1/2 exactly.
pub fn cap_measure_angle(k: usize, phi: f64) -> Result<f64> {
    if k < 1 {
        return Err(Error::Domain("sphere dimension k must be >= 1".into()));
    }
    if !(0.0..=std::f64::consts::PI + 1e-12).contains(&phi) || phi.is_nan() {
        return Err(Error::Domain(format!("polar angle {phi} outside [0, pi]")));
    }
    let half = std::f64::consts::FRAC_PI_2;
    if phi <= half {
        let x = phi.sin().powi(2);
        Ok(0.5 * beta_reg(k as f64 / 2.0, 0.5, x))
    } else {
        let x = (std::f64::consts::PI - phi).sin().powi(2);
        Ok(1.0 - 0.5 * beta_reg(k as f64 / 2.0, 0.5, x))
    }
}

/// Normalized measure of the cap {x : d(x, c) <= radius} for chord radius
/// in [0, 2]. Monotone nondecreasing in the radius.
pub fn cap_measure(k: usize, radius: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&radius) || radius.is_nan() {
        return Err(Error::Domain(format!("cap radius {radius} outside [0, 2]")));
    }
    // chord d and polar angle phi relate by d^2 = 2 - 2 cos(phi)
    let cos_phi = (1.0 - radius * radius / 2.0).clamp(-1.0, 1.0);
    cap_measure_angle(k, cos_phi.acos())
}

/// Polar angle of the cap with the given normalized measure (bisection).
pub fn cap_angle_from_measure(k: usize, measure: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&measure) {
        return Err(Error::Domain(format!("cap measure {measure} outside [0, 1]")));
    }
    let (mut lo, mut hi) = (0.0f64, std::f64::consts::PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if cap_measure_angle(k, mid)? < measure {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Chord radius of a cap of the given diameter.
///
/// Caps are parameterized by Euclidean (chord) distance from the center
/// throughout, so a cap of diameter D is the cap of chord radius D/2.
pub fn cap_radius_from_diameter(diameter: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&diameter) || diameter.is_nan() {
        return Err(Error::Domain(format!("cap diameter {diameter} outside [0, 2]")));
    }
    Ok(diameter / 2.0)
}

/// The construction margins: given target constants alpha and beta, the
/// pair (epsilon, k) and theta = epsilon / sqrt(k).
#[derive(Clone, Debug)]
pub struct SphereParams {
    pub alpha: f64,
    pub beta: f64,
    pub epsilon: f64,
    pub k: usize,
    pub theta: f64,
    pub r: usize,
}

impl SphereParams {
    pub fn new(alpha: f64, beta: f64, epsilon: f64, k: usize, r: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) || alpha <= 0.0 {
            return Err(Error::Domain(format!("alpha {alpha} outside (0, 1)")));
        }
        if !(0.0..1.0).contains(&beta) || beta <= 0.0 {
            return Err(Error::Domain(format!("beta {beta} outside (0, 1)")));
        }
        if epsilon <= 0.0 {
            return Err(Error::Domain(format!("epsilon {epsilon} must be positive")));
        }
        if k < 2 {
            return Err(Error::Domain(format!("sphere dimension k={k} must be >= 2")));
        }
        if r < 2 {
            return Err(Error::Domain(format!("r={r} must be >= 2")));
        }
        let theta = epsilon / (k as f64).sqrt();
        Ok(Self { alpha, beta, epsilon, k, theta, r })
    }

    /// Measure of the cap of radius sqrt(2) - theta; the first property
    /// requires this to be at least 1/2 - alpha.
    pub fn p1_measure(&self) -> Result<f64> {
        cap_measure(self.k, (2.0f64.sqrt() - self.theta).clamp(0.0, 2.0))
    }

    pub fn p1_holds(&self) -> Result<bool> {
        Ok(self.p1_measure()? >= 0.5 - self.alpha)
    }

    /// Chord diameter of the caps the second property bounds.
    pub fn p2_diameter(&self) -> f64 {
        2.0 - self.epsilon / (2.0 * (self.r * self.r) as f64 * (self.k as f64).sqrt())
    }

    /// Measure of a cap of that diameter; must be at most beta.
    pub fn p2_measure(&self) -> Result<f64> {
        cap_measure(self.k, cap_radius_from_diameter(self.p2_diameter())?)
    }

    pub fn p2_holds(&self) -> Result<bool> {
        Ok(self.p2_measure()? <= self.beta)
    }
}

/// Smallest k in [3, k_max] and largest grid epsilon in {1, 1/2, ..., 2^-20}
/// such that both cap properties hold. Deterministic: k ascends, epsilon
/// descends, first success wins.
pub fn select_sphere_params(alpha: f64, beta: f64, r: usize, k_max: usize) -> Result<SphereParams> {
    if k_max < 3 {
        return Err(Error::Domain(format!("k_max={k_max} must be >= 3")));
    }
    // Track the closest miss for the error report.
    let mut best_shortfall = f64::INFINITY;
    let mut best: Option<(f64, usize, f64, f64)> = None;
    for k in 3..=k_max {
        for j in 0..=20u32 {
            let epsilon = (0.5f64).powi(j as i32);
            let params = SphereParams::new(alpha, beta, epsilon, k, r)?;
            let p1 = params.p1_measure()?;
            let p2 = params.p2_measure()?;
            if p1 >= 0.5 - alpha && p2 <= beta {
                return Ok(params);
            }
            let alpha_needed = (0.5 - p1).max(0.0);
            let shortfall = (alpha_needed - alpha).max(p2 - beta);
            if shortfall < best_shortfall {
                best_shortfall = shortfall;
                best = Some((epsilon, k, alpha_needed, p2));
            }
        }
    }
    let (epsilon, k, alpha_needed, beta_achieved) = best.unwrap();
    Err(Error::ResourceLimit(format!(
        "no (epsilon, k) with k <= {k_max} satisfies both cap properties for \
         alpha={alpha}, beta={beta}, r={r}; best achieved alpha'={alpha_needed:.6}, \
         beta'={beta_achieved:.6} at (epsilon={epsilon}, k={k})"
    )))
}

/// Monte Carlo estimators kept deliberately independent of the closed-form
/// path; tests use them as oracles.
pub mod oracle {
    use super::{uniform_point, SpherePoint};
    use crate::rng::substream;

    /// Estimates the cap measure by sampling; returns (estimate, standard
    /// error).
    pub fn mc_cap_measure(k: usize, radius: f64, samples: usize, seed: u64) -> (f64, f64) {
        let mut rng = substream(seed, "mc-cap-measure");
        let center = SpherePoint::pole(k);
        let mut hits = 0usize;
        for _ in 0..samples {
            let p = uniform_point(k, &mut rng);
            if p.dist(&center) <= radius {
                hits += 1;
            }
        }
        let est = hits as f64 / samples as f64;
        let se = (est * (1.0 - est) / samples as f64).sqrt();
        (est, se)
    }
}
