use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TauVariant {
    #[serde(rename = "tau_a")]
    TauA,
    #[default]
    #[serde(rename = "tau_b")]
    TauB,
}

impl fmt::Display for TauVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TauVariant::TauA => "tau_a",
            TauVariant::TauB => "tau_b",
        })
    }
}

impl FromStr for TauVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tau_a" => Ok(TauVariant::TauA),
            "tau_b" => Ok(TauVariant::TauB),
            other => Err(Error::Config(format!("unknown tau variant {other:?} (expected tau_a or tau_b)"))),
        }
    }
}

/// Pair counts behind both tau variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct PairCounts {
    total: u64,
    tied_x: u64,
    tied_y: u64,
    /// Concordant minus discordant.
    net: i64,
}

fn cmp(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).expect("NaN rejected on entry")
}

/// Number of pairs within runs of equal values in a sorted sequence.
fn tied_pairs<T>(sorted: &[T], eq: impl Fn(&T, &T) -> bool) -> u64 {
    let mut total = 0;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if eq(&w[0], &w[1]) {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Stable merge sort of `v` that returns the number of inversions
/// (pairs `i < j` with `v[i] > v[j]`).
fn sort_counting_swaps(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = sort_counting_swaps(&mut v[..mid], &mut buf[..mid]);
    swaps += sort_counting_swaps(&mut v[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if cmp(v[j], v[i]) == Ordering::Less {
            swaps += (mid - i) as u64;
            buf[k] = v[j];
            j += 1;
        } else {
            buf[k] = v[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    swaps
}

/// O(n log n) pair counting: sort by (x, y), count joint and x ties, then
/// count the inversions left in y with a merge sort.
fn pair_counts(x: &[f64], y: &[f64]) -> PairCounts {
    let n = x.len() as u64;
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| cmp(a.0, b.0).then(cmp(a.1, b.1)));
    let tied_x = tied_pairs(&pairs, |a, b| a.0 == b.0);
    let tied_xy = tied_pairs(&pairs, |a, b| a.0 == b.0 && a.1 == b.1);
    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut buf = vec![0.0; ys.len()];
    let discordant = sort_counting_swaps(&mut ys, &mut buf);
    let tied_y = tied_pairs(&ys, |a, b| a == b);
    let total = n * (n - 1) / 2;
    let net = total as i64 - tied_x as i64 - tied_y as i64 + tied_xy as i64 - 2 * discordant as i64;
    PairCounts {
        total,
        tied_x,
        tied_y,
        net,
    }
}

/// Kendall rank correlation between `x` and `y`.
///
/// `TauB` fails with [`Error::UndefinedTau`] when either input is constant.
pub fn kendall_tau(x: &[f64], y: &[f64], variant: TauVariant) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Invalid(format!("tau inputs differ in length: {} vs {}", x.len(), y.len())));
    }
    if x.len() < 2 {
        return Err(Error::Invalid("tau needs at least two observations".into()));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::Invalid("tau input contains NaN".into()));
    }
    let c = pair_counts(x, y);
    match variant {
        TauVariant::TauA => Ok(c.net as f64 / c.total as f64),
        TauVariant::TauB => {
            let (dx, dy) = (c.total - c.tied_x, c.total - c.tied_y);
            if dx == 0 || dy == 0 {
                return Err(Error::UndefinedTau("an input is constant".into()));
            }
            Ok(c.net as f64 / ((dx as f64) * (dy as f64)).sqrt())
        }
    }
}
