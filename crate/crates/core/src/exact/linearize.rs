//! Linear reformulations of the model's nonlinear terms.

use super::model::{MilpModel, Sense};
use super::ExactError;

/// McCormick envelope for `s = q * n` with `q` in `[0, a]`, `n` in `[0, b]`:
/// `s <= b q`, `s <= a n`, `s >= b q + a n - a b` (and `s >= 0` via its bound).
pub fn linearize_bilinear(
    model: &mut MilpModel,
    q: usize,
    n: usize,
    s: usize,
    a: f64,
    b: f64,
    tag: &str,
) -> Result<(), ExactError> {
    if !(a > 0.0 && b > 0.0) {
        return Err(ExactError::NonPositiveBound { a, b });
    }
    model.add_constraint(format!("mc_hq_{tag}"), [(s, 1.0), (q, -b)], Sense::Le, 0.0);
    model.add_constraint(format!("mc_hn_{tag}"), [(s, 1.0), (n, -a)], Sense::Le, 0.0);
    model.add_constraint(format!("mc_lo_{tag}"), [(s, 1.0), (q, -b), (n, -a)], Sense::Ge, -a * b);
    Ok(())
}

/// Interval the envelope admits for `s` at a given `(q, n)`.
pub fn bilinear_envelope(a: f64, b: f64, q: f64, n: f64) -> Result<(f64, f64), ExactError> {
    if !(a > 0.0 && b > 0.0) {
        return Err(ExactError::NonPositiveBound { a, b });
    }
    let lo = (b * q + a * n - a * b).max(0.0);
    let hi = (b * q).min(a * n);
    Ok((lo, hi))
}

/// `z = prod(xs)` over binaries: `z <= x_i`, `z >= sum(x) - (len - 1)`.
pub fn linearize_binary_product(model: &mut MilpModel, xs: &[usize], z: usize, tag: &str) {
    for (j, &x) in xs.iter().enumerate() {
        model.add_constraint(format!("bp_{tag}_{j}"), [(z, 1.0), (x, -1.0)], Sense::Le, 0.0);
    }
    let mut terms = vec![(z, 1.0)];
    terms.extend(xs.iter().map(|&x| (x, -1.0)));
    model.add_constraint(format!("bp_{tag}_all"), terms, Sense::Ge, -(xs.len() as f64 - 1.0));
}

/// `p = t * E` for binary `t` and a linear expression `E` in `[lo, hi]`. Exact.
pub fn linearize_binary_times(
    model: &mut MilpModel,
    t: usize,
    expr: &[(usize, f64)],
    lo: f64,
    hi: f64,
    p: usize,
    tag: &str,
) {
    model.add_constraint(format!("bt_hi_{tag}"), [(p, 1.0), (t, -hi)], Sense::Le, 0.0);
    model.add_constraint(format!("bt_lo_{tag}"), [(p, 1.0), (t, -lo)], Sense::Ge, 0.0);
    // p <= E - lo (1 - t)
    let mut upper = vec![(p, 1.0), (t, -lo)];
    upper.extend(expr.iter().map(|&(v, c)| (v, -c)));
    model.add_constraint(format!("bt_eu_{tag}"), upper, Sense::Le, -lo);
    // p >= E - hi (1 - t)
    let mut lower = vec![(p, 1.0), (t, -hi)];
    lower.extend(expr.iter().map(|&(v, c)| (v, -c)));
    model.add_constraint(format!("bt_el_{tag}"), lower, Sense::Ge, -hi);
}

/// Subset sums `b_j` for every subset mask `j` of the given variances
/// (bit `i` of `j` selects element `i`).
pub fn subset_sums(sigma2: &[f64], subset_cap: usize) -> Result<Vec<f64>, ExactError> {
    if sigma2.len() > subset_cap {
        return Err(ExactError::SubsetCap {
            retailers: sigma2.len(),
            cap: subset_cap,
        });
    }
    let n = sigma2.len();
    let mut sums = vec![0.0; 1 << n];
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + sigma2[low];
    }
    Ok(sums)
}

/// Square-root table: `sqrt(l * b_j)` per subset and the subset sums.
pub fn linearize_sqrt(sigma2: &[f64], lead: f64, subset_cap: usize) -> Result<(Vec<f64>, Vec<f64>), ExactError> {
    let sums = subset_sums(sigma2, subset_cap)?;
    let roots = sums.iter().map(|b| (lead * b).sqrt()).collect();
    Ok((sums, roots))
}

/// Mask of the subset a 0/1 pattern selects.
pub fn pattern_mask(pattern: &[bool]) -> usize {
    pattern
        .iter()
        .enumerate()
        .filter(|(_, &on)| on)
        .fold(0, |m, (i, _)| m | (1 << i))
}

/// Links one indicator per subset to the pattern of `ys`:
/// `sum_{i in j} y_i + sum_{i not in j} (1 - y_i)` is at least `|I| tau_j`
/// and at most `tau_j + |I| - 1`.
pub fn emit_subset_indicators(model: &mut MilpModel, ys: &[usize], taus: &[usize], tag: &str) {
    let n = ys.len();
    debug_assert_eq!(taus.len(), 1 << n);
    for (mask, &tau) in taus.iter().enumerate() {
        let members = mask.count_ones() as f64;
        let pattern: Vec<(usize, f64)> = ys
            .iter()
            .enumerate()
            .map(|(i, &y)| (y, if mask & (1 << i) != 0 { 1.0 } else { -1.0 }))
            .collect();
        // Constant part of the count is n - |j|.
        let mut ge = pattern.clone();
        ge.push((tau, -(n as f64)));
        model.add_constraint(format!("sub_ge_{tag}_{mask}"), ge, Sense::Ge, members - n as f64);
        let mut le = pattern;
        le.push((tau, -1.0));
        model.add_constraint(format!("sub_le_{tag}_{mask}"), le, Sense::Le, members - 1.0);
    }
}
