//! Timing harness comparing the generator-power operation in U^2(Z_n)
//! against the otimes-power in U^3(Z_m) for groups of comparable order.
//!
//! One record per timed exponentiation, nanosecond monotonic clock,
//! strictly single-threaded so the scheduler stays out of the samples.

use std::fmt;
use std::hint::black_box;
use std::io::Write;
use std::time::Instant;

use num_bigint::{BigUint, RandBigInt};
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

use crate::number_theory::{euler_phi, find_primitive_root, NumberTheoryError};
use crate::unit_groups::{UnitGroupError, UnitGroupTower};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("no comparable moduli with order >= {target} and slack {slack:?} below {bound}")]
    NoPairFound {
        target: u64,
        slack: Option<u64>,
        bound: u64,
    },
    #[error("no samples for scheme {0}")]
    EmptyInput(BenchScheme),
    #[error(transparent)]
    Group(#[from] UnitGroupError),
    #[error(transparent)]
    NumberTheory(#[from] NumberTheoryError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, BenchError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchScheme {
    U2,
    U3,
}

impl fmt::Display for BenchScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchScheme::U2 => f.write_str("u2"),
            BenchScheme::U3 => f.write_str("u3"),
        }
    }
}

/// One timed exponentiation sample; the clock brackets the power
/// operation only, setup is excluded.
#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub scheme: BenchScheme,
    pub iteration: usize,
    pub exponent: BigUint,
    pub elapsed_ns: u128,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub n_u2: BigUint,
    pub n_u3: BigUint,
    pub runs: usize,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SchemeStats {
    pub count: usize,
    pub mean_ns: f64,
    pub median_ns: u128,
    pub min_ns: u128,
    pub max_ns: u128,
}

#[derive(Debug, Clone)]
pub struct BenchSummary {
    pub u2: SchemeStats,
    pub u3: SchemeStats,
    /// Ratio of mean elapsed times, U3 over U2.
    pub ratio_u3_over_u2: f64,
}

// ---- modulus search (u64 sieves; desk-scale bounds) ----

struct Sieves {
    phi: Vec<u64>,
    spf: Vec<u32>,
}

impl Sieves {
    fn new(bound: usize) -> Self {
        let mut phi: Vec<u64> = (0..=bound as u64).collect();
        let mut spf: Vec<u32> = vec![0; bound + 1];
        for i in 2..=bound {
            if phi[i] == i as u64 {
                for j in (i..=bound).step_by(i) {
                    phi[j] -= phi[j] / i as u64;
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                }
            }
        }
        Self { phi, spf }
    }

    fn is_prime_power_odd(&self, mut n: usize) -> bool {
        if n < 3 {
            return false;
        }
        let p = self.spf[n] as usize;
        if p == 2 {
            return false;
        }
        while n % p == 0 {
            n /= p;
        }
        n == 1
    }

    fn cyclic(&self, n: usize) -> bool {
        match n {
            0 => false,
            1 | 2 | 4 => true,
            _ => {
                if n % 2 == 0 {
                    n % 4 != 0 && self.is_prime_power_odd(n / 2)
                } else {
                    self.is_prime_power_odd(n)
                }
            }
        }
    }

    fn case1_valid(&self, n: usize) -> bool {
        self.cyclic(n) && self.cyclic(self.phi[n] as usize)
    }

    fn u3_valid(&self, n: usize) -> bool {
        self.case1_valid(n) && self.cyclic(self.phi[self.phi[n] as usize] as usize)
    }

    fn phi2(&self, n: usize) -> u64 {
        self.phi[self.phi[n] as usize]
    }

    fn phi3(&self, n: usize) -> u64 {
        self.phi[self.phi2(n) as usize]
    }
}

/// Finds the smallest tower-valid n_u3 with phi^3 >= target that admits
/// a case-1 n_u2 with phi^2 >= target and |phi^2 - phi^3| <= slack, and
/// the smallest such n_u2. `slack = None` drops the comparability
/// constraint entirely.
pub fn find_comparable_moduli(
    target_order: u64,
    slack: Option<u64>,
    bound: u64,
) -> Result<(BigUint, BigUint)> {
    let bound_us = bound as usize;
    let sieves = Sieves::new(bound_us);
    let no_pair = || BenchError::NoPairFound {
        target: target_order,
        slack,
        bound,
    };
    // smallest case-1 modulus per phi^2 value
    let mut best_u2: Vec<u64> = vec![0; bound_us + 1];
    for n in 5..=bound_us {
        if sieves.case1_valid(n) {
            let order = sieves.phi2(n) as usize;
            if best_u2[order] == 0 {
                best_u2[order] = n as u64;
            }
        }
    }
    let smallest_u2_at_least = |min_order: u64| -> Option<u64> {
        (min_order..=bound)
            .filter_map(|o| {
                let n = best_u2[o as usize];
                (n != 0).then_some(n)
            })
            .min()
    };
    for n3 in 5..=bound_us {
        if !sieves.u3_valid(n3) {
            continue;
        }
        let order3 = sieves.phi3(n3);
        if order3 < target_order {
            continue;
        }
        let candidate = match slack {
            None => smallest_u2_at_least(target_order),
            Some(slack) => {
                let lo = target_order.max(order3.saturating_sub(slack));
                let hi = (order3 + slack).min(bound);
                (lo..=hi)
                    .filter_map(|o| {
                        let n = best_u2[o as usize];
                        (n != 0).then_some(n)
                    })
                    .min()
            }
        };
        if let Some(n2) = candidate {
            return Ok((BigUint::from(n2), BigUint::from(n3)));
        }
    }
    Err(no_pair())
}

/// Runs the timing loop: for each iteration one seeded random exponent,
/// one timed U^2 generator power (theta1^(s^i mod phi) mod n) and one
/// timed U^3 otimes power. Emits 2 * runs records.
pub fn run_benchmark(config: &BenchConfig) -> Result<Vec<BenchRecord>> {
    // U^2 side setup
    let n2 = &config.n_u2;
    let phi = euler_phi(n2)?;
    let order_u2 = euler_phi(&phi)?;
    let theta1 = find_primitive_root(n2)?;
    let s = find_primitive_root(&phi)?;
    // U^3 side setup
    let tower = UnitGroupTower::build(&config.n_u3)?;
    let g = tower.u3_generator();
    let order_u3 = tower.phi3().clone();

    let u2_power = |e: &BigUint| -> BigUint {
        let exp = s.modpow(e, &phi);
        theta1.modpow(&exp, n2)
    };

    let one = BigUint::one();
    // warm-up, excluded from the samples
    black_box(u2_power(&one));
    black_box(tower.op_pow(&g, &one));

    let min_order = order_u2.min(order_u3);
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let mut records = Vec::with_capacity(config.runs * 2);
    for iteration in 0..config.runs {
        let exponent = rng.gen_biguint_range(&one, &(&min_order + 1u32));

        let start = Instant::now();
        black_box(u2_power(&exponent));
        let elapsed_u2 = start.elapsed().as_nanos();

        let start = Instant::now();
        black_box(tower.op_pow(&g, &exponent));
        let elapsed_u3 = start.elapsed().as_nanos();

        records.push(BenchRecord {
            scheme: BenchScheme::U2,
            iteration,
            exponent: exponent.clone(),
            elapsed_ns: elapsed_u2,
        });
        records.push(BenchRecord {
            scheme: BenchScheme::U3,
            iteration,
            exponent,
            elapsed_ns: elapsed_u3,
        });
    }
    Ok(records)
}

fn stats_for(records: &[BenchRecord], scheme: BenchScheme) -> Result<SchemeStats> {
    let mut samples: Vec<u128> = records
        .iter()
        .filter(|r| r.scheme == scheme)
        .map(|r| r.elapsed_ns)
        .collect();
    if samples.is_empty() {
        return Err(BenchError::EmptyInput(scheme));
    }
    samples.sort_unstable();
    let sum: u128 = samples.iter().sum();
    Ok(SchemeStats {
        count: samples.len(),
        mean_ns: sum as f64 / samples.len() as f64,
        median_ns: samples[samples.len() / 2],
        min_ns: samples[0],
        max_ns: *samples.last().unwrap(),
    })
}

pub fn summarize(records: &[BenchRecord]) -> Result<BenchSummary> {
    let u2 = stats_for(records, BenchScheme::U2)?;
    let u3 = stats_for(records, BenchScheme::U3)?;
    let ratio = u3.mean_ns / u2.mean_ns;
    Ok(BenchSummary {
        u2,
        u3,
        ratio_u3_over_u2: ratio,
    })
}

/// CSV with a `scheme,iteration,exponent,elapsed_ns` header and the
/// summary as trailing `#` comment lines.
pub fn write_csv<W: Write>(
    w: &mut W,
    records: &[BenchRecord],
    summary: Option<&BenchSummary>,
) -> Result<()> {
    writeln!(w, "scheme,iteration,exponent,elapsed_ns")?;
    for r in records {
        writeln!(w, "{},{},{},{}", r.scheme, r.iteration, r.exponent, r.elapsed_ns)?;
    }
    if let Some(s) = summary {
        for (tag, st) in [("u2", &s.u2), ("u3", &s.u3)] {
            writeln!(
                w,
                "# {tag}: count={} mean_ns={:.1} median_ns={} min_ns={} max_ns={}",
                st.count, st.mean_ns, st.median_ns, st.min_ns, st.max_ns
            )?;
        }
        writeln!(w, "# ratio_u3_over_u2={:.3}", s.ratio_u3_over_u2)?;
    }
    Ok(())
}

/// Two-column `iteration elapsed_ns` data for one scheme, gnuplot style.
pub fn write_gnuplot<W: Write>(
    w: &mut W,
    records: &[BenchRecord],
    scheme: BenchScheme,
) -> Result<()> {
    for r in records.iter().filter(|r| r.scheme == scheme) {
        writeln!(w, "{} {}", r.iteration, r.elapsed_ns)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_runs_yield_no_records() {
        let (n_u2, n_u3) = find_comparable_moduli(2, Some(2), 10_000).unwrap();
        let config = BenchConfig {
            n_u2,
            n_u3,
            runs: 0,
            seed: 1,
        };
        let records = run_benchmark(&config).unwrap();
        assert!(records.is_empty());
        assert!(summarize(&records).is_err());
    }

    #[test]
    fn record_counts_and_tags() {
        let (n_u2, n_u3) = find_comparable_moduli(6, Some(2), 10_000).unwrap();
        let config = BenchConfig {
            n_u2,
            n_u3,
            runs: 10,
            seed: 2,
        };
        let records = run_benchmark(&config).unwrap();
        assert_eq!(records.len(), 20);
        assert_eq!(
            records.iter().filter(|r| r.scheme == BenchScheme::U2).count(),
            10
        );
        assert_eq!(
            records.iter().filter(|r| r.scheme == BenchScheme::U3).count(),
            10
        );
    }

    #[test]
    fn same_seed_same_exponents() {
        let config = BenchConfig {
            n_u2: BigUint::from(11u32),
            n_u3: BigUint::from(81u32),
            runs: 20,
            seed: 42,
        };
        let a = run_benchmark(&config).unwrap();
        let b = run_benchmark(&config).unwrap();
        let exps = |rs: &[BenchRecord]| -> Vec<BigUint> {
            rs.iter().map(|r| r.exponent.clone()).collect()
        };
        assert_eq!(exps(&a), exps(&b));
    }

    #[test]
    fn comparable_moduli_respect_constraints() {
        let (n_u2, n_u3) = find_comparable_moduli(6, Some(2), 10_000).unwrap();
        let phi2 = euler_phi(&euler_phi(&n_u2).unwrap()).unwrap();
        let phi3 = {
            let t = UnitGroupTower::build(&n_u3).unwrap();
            t.phi3().clone()
        };
        assert!(phi2 >= BigUint::from(6u32));
        assert!(phi3 >= BigUint::from(6u32));
        let diff = if phi2 > phi3 {
            &phi2 - &phi3
        } else {
            &phi3 - &phi2
        };
        assert!(diff <= BigUint::from(2u32));
    }

    #[test]
    fn unconstrained_slack_returns_smallest_individuals() {
        let (n_u2, n_u3) = find_comparable_moduli(2, None, 1000).unwrap();
        // smallest case-1 modulus with phi^2 >= 2 and smallest tower-valid
        // modulus with phi^3 >= 2; confirmed by an exhaustive scan
        let sieves = Sieves::new(1000);
        let want_u2 = (5..=1000usize)
            .find(|&n| sieves.case1_valid(n) && sieves.phi2(n) >= 2)
            .unwrap() as u64;
        let want_u3 = (5..=1000usize)
            .find(|&n| sieves.u3_valid(n) && sieves.phi3(n) >= 2)
            .unwrap() as u64;
        assert_eq!(n_u2, BigUint::from(want_u2));
        assert_eq!(n_u3, BigUint::from(want_u3));
    }

    #[test]
    fn no_pair_when_bound_too_small() {
        assert!(matches!(
            find_comparable_moduli(1_000, Some(0), 20),
            Err(BenchError::NoPairFound { .. })
        ));
    }

    #[test]
    fn csv_shape() {
        let config = BenchConfig {
            n_u2: BigUint::from(11u32),
            n_u3: BigUint::from(81u32),
            runs: 3,
            seed: 3,
        };
        let records = run_benchmark(&config).unwrap();
        let summary = summarize(&records).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &records, Some(&summary)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "scheme,iteration,exponent,elapsed_ns");
        assert_eq!(text.lines().filter(|l| l.starts_with("u2,")).count(), 3);
        assert_eq!(text.lines().filter(|l| l.starts_with("u3,")).count(), 3);
        assert_eq!(text.lines().filter(|l| l.starts_with('#')).count(), 3);
    }
}
