// scratch probe for parameter exploration (not part of the deliverable surface)
use rt_core::sphere::*;

fn main() {
    for (alpha, beta) in [(0.2, 0.2), (0.2, 0.1), (0.2, 0.05), (0.15, 0.15), (0.1, 0.15)] {
        match select_sphere_params(alpha, beta, 2, 200) {
            Ok(p) => println!(
                "a={alpha} b={beta}: k={} eps={} theta={:.4} p1={:.3} p2={:.3}",
                p.k,
                p.epsilon,
                p.theta,
                p.p1_measure().unwrap(),
                p.p2_measure().unwrap()
            ),
            Err(e) => println!("a={alpha} b={beta}: {e}"),
        }
    }
    for (k, z) in [
        (3usize, 16usize),
        (3, 20),
        (3, 24),
        (3, 32),
        (3, 40),
        (4, 20),
        (4, 40),
        (5, 20),
        (6, 20),
        (6, 40),
    ] {
        let p = partition_sphere(k, z, 0.05, 7).unwrap();
        let reps = p.representatives();
        let theta = 0.1443;
        let mut partners = vec![0usize; reps.len()];
        let mut close = 0usize;
        for i in 0..reps.len() {
            for j in 0..reps.len() {
                if i != j && reps[i].dist(&reps[j]) > 2.0 - theta {
                    partners[i] += 1;
                }
                if reps[i].dist(&reps[j]) < 2.0f64.sqrt() - theta {
                    close += 1;
                }
            }
        }
        let with1 = partners.iter().filter(|&&c| c >= 1).count();
        let with2 = partners.iter().filter(|&&c| c >= 2).count();
        println!(
            "k={k} z={z}: maxdiam={:.3} pts_with>=1_partner={} pts_with>=2={} c_k={:.4}",
            p.max_diameter,
            with1,
            with2,
            close as f64 / (reps.len() * reps.len()) as f64
        );
    }
    // c_k trend across k for fixed z and epsilon (criterion-8 style)
    for z in [8usize, 16, 32] {
        let eps = 0.25f64;
        let mut row = format!("eps={eps} z={z}: c_k = ");
        for k in [10usize, 25, 50] {
            let theta = eps / (k as f64).sqrt();
            let p = partition_sphere(k, z, 0.05, 11).unwrap();
            let reps = p.representatives();
            let mut close = 0usize;
            for i in 0..reps.len() {
                for j in 0..reps.len() {
                    if reps[i].dist(&reps[j]) < 2.0f64.sqrt() - theta {
                        close += 1;
                    }
                }
            }
            row.push_str(&format!("{:.5} ", close as f64 / (reps.len() * reps.len()) as f64));
        }
        println!("{row}");
    }
}
