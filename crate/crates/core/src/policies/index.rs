use rand::Rng;
use rand_distr::StandardNormal;

/// UCB index `mean + sqrt(2 alpha sigma^2 ln t / n)`; `+inf` for an unpulled arm.
#[inline]
pub fn ucb_index(mean: f64, n: u64, t: u64, alpha: f64, sigma: f64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    mean + (2.0 * alpha * sigma * sigma * (t as f64).ln() / n as f64).sqrt()
}

/// Exploration function `ln t + 3 ln(max(1, ln t))` of the Gaussian KL-UCB index.
#[inline]
pub fn klucb_exploration(t: u64) -> f64 {
    let lt = (t as f64).ln();
    lt + 3.0 * lt.max(1.0).ln()
}

/// Gaussian KL-UCB index `mean + sqrt(2 sigma^2 f(t) / n)`; `+inf` when unpulled.
#[inline]
pub fn klucb_index(mean: f64, n: u64, t: u64, sigma: f64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    mean + (2.0 * sigma * sigma * klucb_exploration(t) / n as f64).sqrt()
}

/// One draw from `N(mean, beta sigma^2 / n)`, consuming exactly one normal
/// variate; `+inf` (and no draw) for an unpulled arm.
#[inline]
pub fn ts_sample<R: Rng + ?Sized>(mean: f64, n: u64, beta: f64, sigma: f64, rng: &mut R) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    let z: f64 = rng.sample(StandardNormal);
    mean + (beta * sigma * sigma / n as f64).sqrt() * z
}
