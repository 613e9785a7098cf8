//! Log-domain arithmetic helpers shared by the likelihood and statistics code.

use std::sync::OnceLock;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Largest argument served from the exact-product table.
const TABLE_MAX: u64 = 20;

fn small_table() -> &'static [f64; TABLE_MAX as usize + 1] {
    static TABLE: OnceLock<[f64; TABLE_MAX as usize + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = [0.0; TABLE_MAX as usize + 1];
        let mut fact: u64 = 1;
        for (i, slot) in out.iter_mut().enumerate().skip(1) {
            fact *= i as u64;
            *slot = (fact as f64).ln();
        }
        out
    })
}

/// `ln(n!)`, accurate to a few ulps for every integer argument.
///
/// Arguments up to 20 come from exactly computed factorials; above that a
/// Stirling series for `ln Γ(n + 1)` with four correction terms is used,
/// whose truncation error is below 1e-15 at the switch point.
pub fn ln_factorial(n: u64) -> f64 {
    if n <= TABLE_MAX {
        return small_table()[n as usize];
    }
    let x = n as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series =
        inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0))));
    (x - 0.5) * x.ln() - x + LN_SQRT_2PI + series
}

/// `ln((x)_j) = ln(x (x-1) ... (x-j+1))`; negative infinity when `j > x`.
pub fn ln_falling(x: u64, j: u64) -> f64 {
    if j > x {
        return f64::NEG_INFINITY;
    }
    if j <= 32 {
        let mut acc = NeumaierSum::default();
        for t in 0..j {
            acc.add(((x - t) as f64).ln());
        }
        acc.value()
    } else {
        ln_factorial(x) - ln_factorial(x - j)
    }
}

/// Neumaier's variant of Kahan compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Binomial coefficient `C(n, r)` saturating at `u128::MAX`.
pub fn binomial_saturating(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // acc * (n - i) / (i + 1) stays integral at every step.
        let num = match acc.checked_mul((n - i) as u128) {
            Some(v) => v,
            None => return u128::MAX,
        };
        acc = num / (i as u128 + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ln_factorial_by_sum(n: u64) -> f64 {
        (1..=n)
            .map(|i| (i as f64).ln())
            .collect::<NeumaierSum>()
            .value()
    }

    #[test]
    fn ln_factorial_small_values() {
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-15);
        assert!((ln_factorial(20) - 2_432_902_008_176_640_000f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn ln_factorial_matches_direct_sum_across_switch() {
        for n in [19, 20, 21, 22, 30, 50, 100, 500, 2000] {
            let direct = ln_factorial_by_sum(n);
            let got = ln_factorial(n);
            assert!(
                (got - direct).abs() <= 1e-13 * direct.max(1.0),
                "n={n}: {got} vs {direct}"
            );
        }
    }

    #[test]
    fn ln_factorial_reference_value() {
        // ln(100!) = 363.73937555556347... (standard tables)
        assert!((ln_factorial(100) - 363.739_375_555_563_47).abs() < 1e-11);
    }

    #[test]
    fn falling_factorial_routes_agree() {
        for (x, j) in [(10, 3), (100, 32), (100, 33), (1000, 500), (40, 40)] {
            let direct: f64 = (0..j).map(|t| ((x - t) as f64).ln()).sum();
            assert!((ln_falling(x, j) - direct).abs() < 1e-9, "x={x} j={j}");
        }
        assert_eq!(ln_falling(3, 4), f64::NEG_INFINITY);
        assert_eq!(ln_falling(7, 0), 0.0);
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        let s: NeumaierSum = xs.into_iter().collect();
        assert_eq!(s.value(), 2.0);
    }

    #[test]
    fn binomial_coefficients() {
        assert_eq!(binomial_saturating(3, 1), 3);
        assert_eq!(binomial_saturating(6, 2), 15);
        assert_eq!(binomial_saturating(14, 2), 91);
        assert_eq!(binomial_saturating(5, 7), 0);
        assert_eq!(binomial_saturating(10_000, 5_000), u128::MAX);
    }
}
