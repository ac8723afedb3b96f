/// Euclidean projection onto the probability simplex (sort-based).
///
/// Non-finite entries are treated as zero mass before projecting.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    let clean: Vec<f64> = v.iter().map(|&x| if x.is_finite() { x } else { 0.0 }).collect();
    let mut u = clean.clone();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cumsum += ui;
        let t = (cumsum - 1.0) / (i as f64 + 1.0);
        if ui - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    clean.iter().map(|&x| (x - theta).max(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(project_simplex(&[0.5, 0.5]), vec![0.5, 0.5]);
        assert_eq!(project_simplex(&[1.2, -0.2]), vec![1.0, 0.0]);
        let p = project_simplex(&[0.0, 0.0, 0.0]);
        for x in p {
            assert!((x - 1.0 / 3.0).abs() < 1e-15);
        }
    }

    /// Brute-force oracle: the projection is the unique simplex point `q`
    /// with `q_i = max(v_i - theta, 0)`; bisect on theta.
    fn bisect(v: &[f64]) -> Vec<f64> {
        let mass = |t: f64| v.iter().map(|&x| (x - t).max(0.0)).sum::<f64>();
        let (mut lo, mut hi) = (v.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0, v.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mass(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        v.iter().map(|&x| (x - 0.5 * (lo + hi)).max(0.0)).collect()
    }

    proptest! {
        #[test]
        fn lands_on_simplex_and_matches_bisection(v in prop::collection::vec(-2.0f64..2.0, 1..40)) {
            let p = project_simplex(&v);
            prop_assert!(p.iter().all(|&x| x >= 0.0));
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for (a, b) in p.iter().zip(bisect(&v)) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }

        #[test]
        fn idempotent_on_simplex(w in prop::collection::vec(0.0f64..1.0, 1..20)) {
            let s: f64 = w.iter().sum();
            prop_assume!(s > 1e-6);
            let p: Vec<f64> = w.iter().map(|x| x / s).collect();
            for (a, b) in project_simplex(&p).iter().zip(&p) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }
    }
}
