//! MDL-governed diagonal Gaussian mixture fitting with an outlier category.
//!
//! For each candidate component count `K` the fitter runs
//! expectation-maximisation, hard-assigns points, and then lets every point
//! choose between its cluster route (label bits plus the ideal
//! arithmetic-coding residual) and direct specification at `c*m` bits (the
//! outlier symbol `x`). The `K` with the smallest total description length
//! wins:
//!
//! ```text
//! total = model + labels + sum_i min(c*m, label_i + residual_i)
//! ```
//!
//! where `model = K * m * c` bits per component for means, doubled when
//! variances are charged too, and `labels` is the Shannon content of the
//! label distribution over the `K` retained components *and* the `x`
//! category.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coding::{categorical_code_length, CostBreakdown, Precision};
use crate::{Error, Result};

/// Label value marking an outlier point.
pub const X_LABEL: u32 = u32::MAX;

/// What the per-component model cost charges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelCostMode {
    /// Means and diagonal variances: `2 * m * c` bits per component.
    Full,
    /// Means only: `m * c` bits per component.
    MeansOnly,
}

impl ModelCostMode {
    fn factor(self) -> f64 {
        match self {
            ModelCostMode::Full => 2.0,
            ModelCostMode::MeansOnly => 1.0,
        }
    }
}

/// One fitted mixture component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianComponent {
    pub mean: Vec<f64>,
    /// Diagonal variances, floored at the precision's `eps^2`.
    pub diag_var: Vec<f64>,
    /// Raw maximum-likelihood variances before flooring; zero for
    /// degenerate clusters. Sampling-based reconstruction uses these so a
    /// zero-variance component reproduces its mean exactly.
    pub sample_var: Vec<f64>,
    pub count: usize,
}

/// A fitted partition: components, per-point labels (component index or
/// [`X_LABEL`]) and the resulting cost breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdlPartition {
    pub components: Vec<GaussianComponent>,
    pub labels: Vec<u32>,
    pub precision: Precision,
    pub mode: ModelCostMode,
    pub costs: CostBreakdown,
}

/// Total cost of each candidate `K`, for auditing the selection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KTrace {
    pub k: usize,
    pub retained: usize,
    pub total_cost: f64,
}

/// Fitting knobs. The defaults fix the unstated EM specifics: k-means++
/// style seeding, 100-iteration cap, relative log-likelihood tolerance
/// 1e-6, three restarts keeping the best total cost.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitOptions {
    pub k_max: usize,
    pub precision: Precision,
    pub mode: ModelCostMode,
    pub seed: u64,
    pub restarts: usize,
    pub max_em_iters: usize,
    pub tol: f64,
}

impl FitOptions {
    pub fn new(precision: Precision, seed: u64) -> Self {
        FitOptions {
            k_max: 15,
            precision,
            mode: ModelCostMode::Full,
            seed,
            restarts: 3,
            max_em_iters: 100,
            tol: 1e-6,
        }
    }
}

/// Borrowed view of `n` points of dimension `m`, stored row-major.
#[derive(Clone, Copy)]
pub struct Points<'a> {
    pub data: &'a [f64],
    pub m: usize,
}

impl<'a> Points<'a> {
    pub fn new(data: &'a [f64], m: usize) -> Result<Self> {
        if m == 0 || data.len() % m != 0 {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: data.len(),
            });
        }
        Ok(Points { data, m })
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.m
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, i: usize) -> &'a [f64] {
        &self.data[i * self.m..(i + 1) * self.m]
    }
}

/// Per-component cached terms for fast residual-bit evaluation:
/// `bits(x) = base + sum_j (x_j - mu_j)^2 * inv_j`, floored at zero.
struct CostedComponent {
    mean: Vec<f64>,
    base: f64,
    inv: Vec<f64>,
}

impl CostedComponent {
    fn new(mean: &[f64], floored_var: &[f64], precision: Precision) -> Self {
        let c = precision.bits() as f64;
        let mut base = 0.0;
        let mut inv = Vec::with_capacity(mean.len());
        for &v in floored_var {
            base += 0.5 * (std::f64::consts::TAU * v).log2() + c;
            inv.push(0.5 * std::f64::consts::LOG2_E / v);
        }
        CostedComponent {
            mean: mean.to_vec(),
            base,
            inv,
        }
    }

    fn residual_bits(&self, x: &[f64]) -> f64 {
        let mut bits = self.base;
        for j in 0..x.len() {
            let d = x[j] - self.mean[j];
            bits += d * d * self.inv[j];
        }
        bits.max(0.0)
    }
}

fn component_stats(points: Points, members: &[usize], floor: f64) -> GaussianComponent {
    let m = points.m;
    let n = members.len();
    let mut mean = vec![0.0; m];
    for &i in members {
        for (j, mj) in mean.iter_mut().enumerate() {
            *mj += points.point(i)[j];
        }
    }
    for mj in mean.iter_mut() {
        *mj /= n as f64;
    }
    let mut var = vec![0.0; m];
    for &i in members {
        for (j, vj) in var.iter_mut().enumerate() {
            let d = points.point(i)[j] - mean[j];
            *vj += d * d;
        }
    }
    for vj in var.iter_mut() {
        *vj /= n as f64;
    }
    let diag_var = var.iter().map(|&v| v.max(floor)).collect();
    GaussianComponent {
        mean,
        diag_var,
        sample_var: var,
        count: n,
    }
}

/// Recomputes components and every cost term from scratch for a given
/// assignment. This is the audit path: it shares no state with the fitting
/// loop beyond the label vector.
pub fn partition_cost(
    points: Points,
    labels: &[u32],
    precision: Precision,
    mode: ModelCostMode,
) -> Result<(Vec<GaussianComponent>, CostBreakdown)> {
    if labels.len() != points.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            got: labels.len(),
        });
    }
    let floor = precision.variance_floor();
    let mut ids: Vec<u32> = labels.iter().copied().filter(|&l| l != X_LABEL).collect();
    ids.sort_unstable();
    ids.dedup();
    let mut components = Vec::with_capacity(ids.len());
    for &id in &ids {
        let members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == id).collect();
        components.push(component_stats(points, &members, floor));
    }
    let costs = assignment_cost(points, labels, &ids, &components, precision, mode);
    Ok((components, costs))
}

fn assignment_cost(
    points: Points,
    labels: &[u32],
    ids: &[u32],
    components: &[GaussianComponent],
    precision: Precision,
    mode: ModelCostMode,
) -> CostBreakdown {
    let m = points.m as f64;
    let c = precision.bits() as f64;
    let direct = c * m;
    let model = components.len() as f64 * mode.factor() * m * c;

    let mut counts: Vec<usize> = components.iter().map(|g| g.count).collect();
    counts.push(labels.iter().filter(|&&l| l == X_LABEL).count());
    let idx = categorical_code_length(&counts);

    let costed: Vec<CostedComponent> = components
        .iter()
        .map(|g| CostedComponent::new(&g.mean, &g.diag_var, precision))
        .collect();
    let mut residual = 0.0;
    for (i, &label) in labels.iter().enumerate() {
        if label == X_LABEL {
            residual += direct;
        } else {
            let k = ids.binary_search(&label).expect("label id present");
            residual += costed[k].residual_bits(points.point(i));
        }
    }
    CostBreakdown::new(model, idx, residual)
}

/// Mode assignment: the `k` most frequent distinct points (ties broken by
/// value order) become one exact-match group each; everything else starts
/// as `x`. Exact repeats are common in label-composition space, where a
/// repeated point is its own best centre; smooth EM from wide variances
/// cannot reach such needle-thin groups, so one restart starts here.
fn mode_labels(points: Points, k: usize) -> Vec<u32> {
    let mut counts: std::collections::HashMap<Vec<u64>, usize> = std::collections::HashMap::new();
    for i in 0..points.len() {
        let key: Vec<u64> = points.point(i).iter().map(|v| v.to_bits()).collect();
        *counts.entry(key).or_insert(0) += 1;
    }
    let mut ranked: Vec<(Vec<u64>, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(k);
    let index: std::collections::HashMap<&[u64], u32> = ranked
        .iter()
        .enumerate()
        .map(|(j, (key, _))| (key.as_slice(), j as u32))
        .collect();
    (0..points.len())
        .map(|i| {
            let key: Vec<u64> = points.point(i).iter().map(|v| v.to_bits()).collect();
            index.get(key.as_slice()).copied().unwrap_or(X_LABEL)
        })
        .collect()
}

/// k-means++ style seeding: first centre uniform, then proportional to the
/// squared distance to the nearest chosen centre.
fn seed_means(points: Points, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut means: Vec<Vec<f64>> = Vec::with_capacity(k);
    means.push(points.point(rng.gen_range(0..n)).to_vec());
    let mut d2 = vec![0.0f64; n];
    while means.len() < k {
        let last = means.last().expect("non-empty");
        let mut total = 0.0;
        for i in 0..n {
            let p = points.point(i);
            let d: f64 = p
                .iter()
                .zip(last)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if means.len() == 1 || d < d2[i] {
                d2[i] = d;
            }
            total += d2[i];
        }
        if total <= 0.0 {
            // all remaining points coincide with a centre
            means.push(points.point(rng.gen_range(0..n)).to_vec());
            continue;
        }
        let mut target = rng.gen_range(0.0..total);
        let mut chosen = n - 1;
        for i in 0..n {
            target -= d2[i];
            if target <= 0.0 {
                chosen = i;
                break;
            }
        }
        means.push(points.point(chosen).to_vec());
    }
    means
}

/// Soft EM with diagonal covariances; returns hard assignments by maximum
/// responsibility.
fn em_hard_assign(
    points: Points,
    k: usize,
    opts: &FitOptions,
    rng: &mut ChaCha8Rng,
) -> Vec<u32> {
    let n = points.len();
    let m = points.m;
    let floor = opts.precision.variance_floor();

    let mut means = seed_means(points, k, rng);
    let mut vars = vec![global_variance(points, floor); k];
    let mut weights = vec![1.0 / k as f64; k];
    let mut resp = vec![0.0f64; n * k];
    let mut prev_ll = f64::NEG_INFINITY;

    for _ in 0..opts.max_em_iters {
        // E step
        let mut ll = 0.0;
        for i in 0..n {
            let p = points.point(i);
            let row = &mut resp[i * k..(i + 1) * k];
            let mut max_log = f64::NEG_INFINITY;
            for (j, r) in row.iter_mut().enumerate() {
                let mut logp = weights[j].ln();
                for d in 0..m {
                    let v = vars[j][d];
                    let diff = p[d] - means[j][d];
                    logp += -0.5 * (std::f64::consts::TAU * v).ln() - diff * diff / (2.0 * v);
                }
                *r = logp;
                if logp > max_log {
                    max_log = logp;
                }
            }
            let mut sum = 0.0;
            for r in row.iter_mut() {
                *r = (*r - max_log).exp();
                sum += *r;
            }
            for r in row.iter_mut() {
                *r /= sum;
            }
            ll += max_log + sum.ln();
        }
        // M step
        for j in 0..k {
            let mut wsum = 0.0;
            let mut mean = vec![0.0; m];
            for i in 0..n {
                let r = resp[i * k + j];
                wsum += r;
                let p = points.point(i);
                for d in 0..m {
                    mean[d] += r * p[d];
                }
            }
            if wsum <= 1e-12 {
                continue; // dead component; hard assignment will drop it
            }
            for md in mean.iter_mut() {
                *md /= wsum;
            }
            let mut var = vec![0.0; m];
            for i in 0..n {
                let r = resp[i * k + j];
                let p = points.point(i);
                for d in 0..m {
                    let diff = p[d] - mean[d];
                    var[d] += r * diff * diff;
                }
            }
            for vd in var.iter_mut() {
                *vd = (*vd / wsum).max(floor);
            }
            means[j] = mean;
            vars[j] = var;
            weights[j] = wsum / n as f64;
        }
        if (ll - prev_ll).abs() <= opts.tol * ll.abs().max(1.0) {
            break;
        }
        prev_ll = ll;
    }

    (0..n)
        .map(|i| {
            let row = &resp[i * k..(i + 1) * k];
            let mut best = 0;
            for (j, r) in row.iter().enumerate() {
                if *r > row[best] {
                    best = j;
                }
            }
            best as u32
        })
        .collect()
}

fn global_variance(points: Points, floor: f64) -> Vec<f64> {
    let members: Vec<usize> = (0..points.len()).collect();
    component_stats(points, &members, floor).diag_var
}

/// Improves an assignment in place: alternates parameter refits with
/// point-wise moves (to another component or to `x`) accepted only when
/// they lower the exact total cost with parameters held fixed. Terminates
/// at a point-wise local optimum of the assignment.
fn refine_assignment(
    points: Points,
    labels: &mut Vec<u32>,
    precision: Precision,
    mode: ModelCostMode,
) -> (Vec<GaussianComponent>, CostBreakdown) {
    let n = points.len();
    let m = points.m as f64;
    let c = precision.bits() as f64;
    let direct = c * m;
    let floor = precision.variance_floor();
    let n_f = n as f64;

    // Initial carve by the per-point min(c*m, residual) rule, label terms
    // excluded. Wide components otherwise trap their own outliers: once a
    // point is the only candidate for x, the label surcharge of a
    // one-member category blocks every single-point escape.
    {
        let mut ids: Vec<u32> = labels.iter().copied().filter(|&l| l != X_LABEL).collect();
        ids.sort_unstable();
        ids.dedup();
        let comps: Vec<GaussianComponent> = ids
            .iter()
            .map(|&id| {
                let members: Vec<usize> = (0..n).filter(|&i| labels[i] == id).collect();
                component_stats(points, &members, floor)
            })
            .collect();
        let costed: Vec<CostedComponent> = comps
            .iter()
            .map(|g| CostedComponent::new(&g.mean, &g.diag_var, precision))
            .collect();
        if !costed.is_empty() {
            for i in 0..n {
                let p = points.point(i);
                let (best, bits) = costed
                    .iter()
                    .enumerate()
                    .map(|(j, cc)| (j, cc.residual_bits(p)))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("non-empty");
                labels[i] = if bits > direct { X_LABEL } else { ids[best] };
            }
        }
    }

    for _outer in 0..20 {
        // refit parameters and compact label ids
        let mut ids: Vec<u32> = labels.iter().copied().filter(|&l| l != X_LABEL).collect();
        ids.sort_unstable();
        ids.dedup();
        for l in labels.iter_mut() {
            if *l != X_LABEL {
                *l = ids.binary_search(l).expect("present") as u32;
            }
        }
        let k = ids.len();
        let mut comps: Vec<GaussianComponent> = (0..k)
            .map(|j| {
                let members: Vec<usize> =
                    (0..n).filter(|&i| labels[i] == j as u32).collect();
                component_stats(points, &members, floor)
            })
            .collect();
        let costed: Vec<CostedComponent> = comps
            .iter()
            .map(|g| CostedComponent::new(&g.mean, &g.diag_var, precision))
            .collect();
        let mut counts: Vec<usize> = comps.iter().map(|g| g.count).collect();
        let mut x_count = labels.iter().filter(|&&l| l == X_LABEL).count();

        // point-wise moves under fixed parameters; label-entropy deltas are
        // exact in the count adjustments
        let term = |cnt: usize| -> f64 {
            if cnt == 0 {
                0.0
            } else {
                cnt as f64 * (n_f / cnt as f64).log2()
            }
        };
        let per_component_model = mode.factor() * m * c;
        let mut moved_any = false;
        for _sweep in 0..30 {
            let mut moved = false;
            for i in 0..n {
                let p = points.point(i);
                let cur = labels[i];
                let (cur_cnt, cur_point_cost) = if cur == X_LABEL {
                    (x_count, direct)
                } else {
                    (counts[cur as usize], costed[cur as usize].residual_bits(p))
                };
                // vacating a singleton component drops its model cost
                let vacate = if cur != X_LABEL && cur_cnt == 1 {
                    -per_component_model
                } else {
                    0.0
                };
                // (delta, target); only strictly improving moves are taken
                let mut best = (0.0f64, cur);
                for (j, cc) in costed.iter().enumerate() {
                    if cur == j as u32 {
                        continue;
                    }
                    // re-entering an emptied component re-pays its model cost
                    let revive = if counts[j] == 0 { per_component_model } else { 0.0 };
                    let delta = vacate
                        + revive
                        + move_delta(
                            term,
                            cur_cnt,
                            counts[j],
                            cur_point_cost,
                            cc.residual_bits(p),
                        );
                    if delta < best.0 - 1e-9 {
                        best = (delta, j as u32);
                    }
                }
                if cur != X_LABEL {
                    let delta =
                        vacate + move_delta(term, cur_cnt, x_count, cur_point_cost, direct);
                    if delta < best.0 - 1e-9 {
                        best = (delta, X_LABEL);
                    }
                }
                let best_target = best.1;
                if best_target != cur {
                    if cur == X_LABEL {
                        x_count -= 1;
                    } else {
                        counts[cur as usize] -= 1;
                    }
                    if best_target == X_LABEL {
                        x_count += 1;
                    } else {
                        counts[best_target as usize] += 1;
                    }
                    labels[i] = best_target;
                    moved = true;
                    moved_any = true;
                }
            }
            if !moved {
                break;
            }
        }
        if !moved_any {
            // assignment is stable under the refitted parameters
            comps.retain(|g| g.count >= 1);
            let mut ids: Vec<u32> = labels.iter().copied().filter(|&l| l != X_LABEL).collect();
            ids.sort_unstable();
            ids.dedup();
            let costs = assignment_cost(points, labels, &ids, &comps, precision, mode);
            return (comps, costs);
        }
    }
    // cap reached; report whatever the last refit yields
    let (comps, costs) = partition_cost(points, labels, precision, mode).expect("valid labels");
    (comps, costs)
}

/// Exact total-cost change of moving one point from a category with
/// `from_cnt` members to one with `to_cnt`, under fixed parameters.
fn move_delta(
    term: impl Fn(usize) -> f64,
    from_cnt: usize,
    to_cnt: usize,
    from_point_cost: f64,
    to_point_cost: f64,
) -> f64 {
    let d_label = term(from_cnt - 1) - term(from_cnt) + term(to_cnt + 1) - term(to_cnt);
    d_label + to_point_cost - from_point_cost
}

/// Fits the MDL partition: EM at each `K` in `1..=k_max` with restarts,
/// outlier carving, and selection of the `K` with the smallest total cost.
/// Deterministic given `(points, opts)`.
pub fn fit_mdl_gmm(points: Points, opts: &FitOptions) -> Result<MdlPartition> {
    Ok(fit_mdl_gmm_with_trace(points, opts)?.0)
}

/// [`fit_mdl_gmm`] plus the per-`K` total-cost trace.
pub fn fit_mdl_gmm_with_trace(
    points: Points,
    opts: &FitOptions,
) -> Result<(MdlPartition, Vec<KTrace>)> {
    if points.is_empty() {
        return Err(Error::EmptyInput("fit_mdl_gmm"));
    }
    if opts.k_max < 1 {
        return Err(Error::Config("k_max must be >= 1".into()));
    }
    let n = points.len();
    let k_cap = opts.k_max.min(n);

    let fit_one_k = |k: usize| -> (MdlPartition, KTrace) {
        // restart 0 assigns exact matches of the k commonest points; the
        // rest run EM from k-means++ draws
        let restarts = if k == 1 { 1 } else { opts.restarts.max(1) + 1 };
        let mut best: Option<MdlPartition> = None;
        for r in 0..restarts {
            let mut rng = ChaCha8Rng::seed_from_u64(
                opts.seed
                    ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
                    ^ (r as u64).wrapping_mul(0xD1B5_4A32_D192_ED03),
            );
            let mut labels = if r == 0 && k > 1 {
                mode_labels(points, k)
            } else {
                em_hard_assign(points, k, opts, &mut rng)
            };
            let (comps, costs) = refine_assignment(points, &mut labels, opts.precision, opts.mode);
            let cand = MdlPartition {
                components: comps,
                labels,
                precision: opts.precision,
                mode: opts.mode,
                costs,
            };
            let better = match &best {
                None => true,
                Some(b) => cand.costs.total() < b.costs.total() - 1e-12,
            };
            if better {
                best = Some(cand);
            }
        }
        let best = best.expect("at least one restart");
        let trace = KTrace {
            k,
            retained: best.components.len(),
            total_cost: best.costs.total(),
        };
        (best, trace)
    };

    let results: Vec<(MdlPartition, KTrace)> =
        (1..=k_cap).into_par_iter().map(fit_one_k).collect();

    // K = 0, everything specified directly, is always a candidate; the
    // label-entropy coupling makes it unreachable by single-point moves,
    // so it must be scored explicitly.
    let all_x = MdlPartition {
        components: Vec::new(),
        labels: vec![X_LABEL; n],
        precision: opts.precision,
        mode: opts.mode,
        costs: CostBreakdown::new(
            0.0,
            0.0,
            n as f64 * points.m as f64 * opts.precision.bits() as f64,
        ),
    };
    let mut traces = vec![KTrace {
        k: 0,
        retained: 0,
        total_cost: all_x.costs.total(),
    }];
    let mut best = all_x;
    for (cand, trace) in results {
        traces.push(trace);
        // strict improvement keeps the smallest K on ties
        if cand.costs.total() < best.costs.total() - 1e-12 {
            best = cand;
        }
    }
    Ok((best, traces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn precision(bits: u32) -> Precision {
        Precision::new(bits).unwrap()
    }

    fn flat(points: &[[f64; 2]]) -> Vec<f64> {
        points.iter().flatten().copied().collect()
    }

    #[test]
    fn identical_points_collapse_to_one_cheap_cluster() {
        let data: Vec<f64> = std::iter::repeat([0.25, 0.5, 0.75])
            .take(50)
            .flatten()
            .collect();
        let pts = Points::new(&data, 3).unwrap();
        let opts = FitOptions {
            k_max: 5,
            ..FitOptions::new(precision(8), 7)
        };
        let part = fit_mdl_gmm(pts, &opts).unwrap();
        assert_eq!(part.components.len(), 1);
        assert!(part.labels.iter().all(|&l| l == 0));
        assert_eq!(part.costs.idx_cost, 0.0);
        // residual after flooring: (m/2) * log2(2*pi) per point, tiny
        // against the 24-bit direct cost
        assert!(part.costs.residual_cost < 50.0 * 3.0 * 1.4);
        assert!(part
            .components[0]
            .diag_var
            .iter()
            .all(|&v| v == precision(8).variance_floor()));
    }

    #[test]
    fn two_separated_blobs_select_k2() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut pts: Vec<[f64; 2]> = Vec::new();
        for _ in 0..500 {
            pts.push([rng.gen::<f64>() * 0.02, rng.gen::<f64>() * 0.02]);
        }
        for _ in 0..500 {
            pts.push([0.8 + rng.gen::<f64>() * 0.02, 0.8 + rng.gen::<f64>() * 0.02]);
        }
        let data = flat(&pts);
        let points = Points::new(&data, 2).unwrap();
        let opts = FitOptions {
            k_max: 3,
            ..FitOptions::new(precision(16), 3)
        };
        let (part, trace) = fit_mdl_gmm_with_trace(points, &opts).unwrap();
        assert_eq!(part.components.len(), 2);
        let t = |k: usize| {
            trace
                .iter()
                .find(|t| t.k == k)
                .map(|t| t.total_cost)
                .unwrap()
        };
        assert!(t(2) < t(1), "k2 {} vs k1 {}", t(2), t(1));
        assert!(t(2) <= t(3) + 1e-9, "k2 {} vs k3 {}", t(2), t(3));
    }

    #[test]
    fn partition_cost_matches_fit_costs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let data: Vec<f64> = (0..600).map(|_| rng.gen::<f64>()).collect();
        let points = Points::new(&data, 3).unwrap();
        let opts = FitOptions {
            k_max: 4,
            ..FitOptions::new(precision(8), 21)
        };
        let part = fit_mdl_gmm(points, &opts).unwrap();
        let (_, audited) = partition_cost(points, &part.labels, part.precision, part.mode).unwrap();
        assert!((audited.total() - part.costs.total()).abs() < 1e-6);
        assert!((audited.model_cost - part.costs.model_cost).abs() < 1e-9);
        assert!((audited.idx_cost - part.costs.idx_cost).abs() < 1e-9);
    }

    #[test]
    fn all_x_partition_costs_direct_only() {
        let data = [0.1, 0.9, 0.4, 0.6];
        let points = Points::new(&data, 1).unwrap();
        let labels = vec![X_LABEL; 4];
        let (comps, costs) = partition_cost(points, &labels, precision(8), ModelCostMode::Full)
            .unwrap();
        assert!(comps.is_empty());
        assert_eq!(costs.model_cost, 0.0);
        assert_eq!(costs.idx_cost, 0.0);
        assert_eq!(costs.residual_cost, 4.0 * 8.0);
    }

    #[test]
    fn model_cost_linear_in_k() {
        let data: Vec<f64> = (0..40).map(|i| i as f64 / 40.0).collect();
        let points = Points::new(&data, 1).unwrap();
        let labels_k2: Vec<u32> = (0..40).map(|i| (i / 20) as u32).collect();
        let labels_k4: Vec<u32> = (0..40).map(|i| (i / 10) as u32).collect();
        let (_, c2) = partition_cost(points, &labels_k2, precision(8), ModelCostMode::Full)
            .unwrap();
        let (_, c4) = partition_cost(points, &labels_k4, precision(8), ModelCostMode::Full)
            .unwrap();
        assert!((c2.model_cost - 2.0 * 2.0 * 8.0).abs() < 1e-12);
        assert!((c4.model_cost - 4.0 * 2.0 * 8.0).abs() < 1e-12);
        let (_, m2) = partition_cost(points, &labels_k2, precision(8), ModelCostMode::MeansOnly)
            .unwrap();
        assert!((m2.model_cost - 2.0 * 8.0).abs() < 1e-12);
    }

    #[test]
    fn translation_leaves_costs_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let data: Vec<f64> = (0..300).map(|_| rng.gen::<f64>() * 0.3).collect();
        let shifted: Vec<f64> = data.iter().map(|v| v + 5.0).collect();
        let opts = FitOptions {
            k_max: 4,
            ..FitOptions::new(precision(12), 2)
        };
        let a = fit_mdl_gmm(Points::new(&data, 2).unwrap(), &opts).unwrap();
        let b = fit_mdl_gmm(Points::new(&shifted, 2).unwrap(), &opts).unwrap();
        assert!((a.costs.total() - b.costs.total()).abs() < 1e-6);
        assert_eq!(a.labels, b.labels);
        for (ca, cb) in a.components.iter().zip(&b.components) {
            for (ma, mb) in ca.mean.iter().zip(&cb.mean) {
                assert!((ma + 5.0 - mb).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn fit_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let data: Vec<f64> = (0..240).map(|_| rng.gen::<f64>()).collect();
        let points = Points::new(&data, 2).unwrap();
        let opts = FitOptions {
            k_max: 6,
            ..FitOptions::new(precision(10), 99)
        };
        let a = fit_mdl_gmm(points, &opts).unwrap();
        let b = fit_mdl_gmm(points, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn assignment_is_pointwise_locally_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut data: Vec<f64> = Vec::new();
        for _ in 0..80 {
            data.push(rng.gen::<f64>() * 0.05);
        }
        for _ in 0..80 {
            data.push(0.7 + rng.gen::<f64>() * 0.05);
        }
        for _ in 0..12 {
            data.push(rng.gen::<f64>());
        }
        let points = Points::new(&data, 1).unwrap();
        let opts = FitOptions {
            k_max: 4,
            ..FitOptions::new(precision(16), 4)
        };
        let part = fit_mdl_gmm(points, &opts).unwrap();
        let base = part.costs.total();
        let k = part.components.len();
        // moving any single point to any other category must not lower the
        // recomputed total cost (parameters refitted by the audit path may
        // shift slightly, hence the small tolerance)
        for i in 0..points.len() {
            for target in 0..=k {
                let new_label = if target == k { X_LABEL } else { target as u32 };
                if part.labels[i] == new_label {
                    continue;
                }
                let mut labels = part.labels.clone();
                labels[i] = new_label;
                let costed: Vec<CostedComponent> = part
                    .components
                    .iter()
                    .map(|g| CostedComponent::new(&g.mean, &g.diag_var, part.precision))
                    .collect();
                // fixed-parameter cost of the modified assignment
                let n_f = points.len() as f64;
                let mut counts: Vec<usize> = vec![0; k];
                let mut x_count = 0usize;
                let mut resid = 0.0;
                for (p_idx, &l) in labels.iter().enumerate() {
                    if l == X_LABEL {
                        x_count += 1;
                        resid += part.precision.bits() as f64;
                    } else {
                        counts[l as usize] += 1;
                        resid += costed[l as usize].residual_bits(points.point(p_idx));
                    }
                }
                let mut all_counts = counts.clone();
                all_counts.push(x_count);
                // a vacated component stops paying model cost
                let retained = counts.iter().filter(|&&c| c > 0).count();
                let model = retained as f64 * 2.0 * part.precision.bits() as f64;
                let moved_total = model + categorical_code_length(&all_counts) + resid;
                assert!(
                    moved_total >= base - 1e-6,
                    "point {i} to {target}: {moved_total} < {base}"
                );
            }
        }
    }
}
