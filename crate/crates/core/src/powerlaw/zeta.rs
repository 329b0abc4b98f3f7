//! Hurwitz zeta `zeta(s, q) = sum_{k>=0} (k + q)^(-s)` for `s > 1, q > 0`,
//! by Euler-Maclaurin summation.

const DIRECT_TERMS: usize = 12;

// B_2j / (2j)!
const BERNOULLI_OVER_FACT: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30_240.0,
    -1.0 / 1_209_600.0,
    1.0 / 47_900_160.0,
    -691.0 / 1_307_674_368_000.0,
    1.0 / 74_724_249_600.0,
];

pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    debug_assert!(s > 1.0 && q > 0.0);
    let mut sum = 0.0;
    for k in 0..DIRECT_TERMS {
        sum += (q + k as f64).powf(-s);
    }
    let a = q + DIRECT_TERMS as f64;
    let a_pow = a.powf(-s);
    sum += a * a_pow / (s - 1.0) + 0.5 * a_pow;
    // rising product s (s+1) ... (s+2j-2) times a^(-s-2j+1)
    let mut rising = s;
    let mut power = a_pow / a;
    for (j, coef) in BERNOULLI_OVER_FACT.iter().enumerate() {
        sum += coef * rising * power;
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        power /= a * a;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn riemann_values() {
        let pi = std::f64::consts::PI;
        assert!((hurwitz_zeta(2.0, 1.0) - pi * pi / 6.0).abs() < 1e-14);
        assert!((hurwitz_zeta(4.0, 1.0) - pi.powi(4) / 90.0).abs() < 1e-14);
        // zeta(3/2) = 2.612375348685488...
        assert!((hurwitz_zeta(1.5, 1.0) - 2.612_375_348_685_488).abs() < 1e-12);
    }

    #[test]
    fn shift_identity() {
        // zeta(s, q) = q^-s + zeta(s, q + 1)
        for &(s, q) in &[(1.2, 1.0), (2.5, 3.0), (3.7, 17.0), (1.01, 2.0)] {
            let lhs = hurwitz_zeta(s, q);
            let rhs = q.powf(-s) + hurwitz_zeta(s, q + 1.0);
            assert!(((lhs - rhs) / lhs).abs() < 1e-13, "s={s} q={q}");
        }
    }

    #[test]
    fn matches_long_direct_sum() {
        let s = 3.0;
        let direct: f64 = (0..200_000).map(|k| (5.0 + k as f64).powf(-s)).sum::<f64>()
            + (200_005f64).powf(1.0 - s) / (s - 1.0);
        assert!((hurwitz_zeta(s, 5.0) - direct).abs() < 1e-12);
    }
}
