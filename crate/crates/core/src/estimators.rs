//! Histogram density estimation and the point estimators: global MAP and
//! posterior mean (CM), plus their local counterparts LMAP and LCM that
//! remain meaningful when the posterior is multimodal.
//!
//! A local MAP is a bin that strictly dominates its neighborhood and clears
//! a fraction ε of the global peak; a local CM is the sample mean
//! conditioned on a region. In one dimension regions are carved
//! automatically at the lowest bin between adjacent local peaks; in two
//! dimensions regions are caller-supplied rectangles, because the
//! interesting solution sets there are curves that rectangles cannot chase.

use crate::models::ForwardModel;
use crate::sampler::Chain;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error("region {0} contains no post-burn-in samples")]
    EmptyRegion(usize),
    #[error("bins must be given per axis and be at least 1")]
    BadBins,
}

/// Histogram over the prior box. Heights are normalized so that
/// Σ height·bin_volume = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityEstimate {
    /// Per-axis bin edges; axis a has bins(a)+1 ascending edges spanning
    /// exactly the prior box.
    pub bin_edges: Vec<Vec<f64>>,
    /// Row-major over axes (last axis fastest).
    pub counts: Vec<u64>,
    pub normalized_heights: Vec<f64>,
    total: u64,
}

impl DensityEstimate {
    pub fn dimension(&self) -> usize {
        self.bin_edges.len()
    }

    pub fn bins(&self, axis: usize) -> usize {
        self.bin_edges[axis].len() - 1
    }

    pub fn bin_width(&self, axis: usize) -> f64 {
        let e = &self.bin_edges[axis];
        (e[e.len() - 1] - e[0]) / (e.len() - 1) as f64
    }

    pub fn bin_volume(&self) -> f64 {
        (0..self.dimension()).map(|a| self.bin_width(a)).product()
    }

    pub fn total_count(&self) -> u64 {
        self.total
    }

    /// Center coordinates of a multi-index bin.
    pub fn bin_center(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter()
            .enumerate()
            .map(|(a, &i)| self.bin_edges[a][0] + (i as f64 + 0.5) * self.bin_width(a))
            .collect()
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for (a, &i) in idx.iter().enumerate() {
            flat = flat * self.bins(a) + i;
        }
        flat
    }

    fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dimension()];
        for a in (0..self.dimension()).rev() {
            idx[a] = flat % self.bins(a);
            flat /= self.bins(a);
        }
        idx
    }

    /// CSV rows `bin_center[,bin_center_y],height,count`, axes in order.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        if self.dimension() == 1 {
            writeln!(w, "bin_center,height,count")?;
        } else {
            writeln!(w, "bin_center_x,bin_center_y,height,count")?;
        }
        for flat in 0..self.counts.len() {
            let center = self.bin_center(&self.multi_index(flat));
            for c in &center {
                write!(w, "{c},")?;
            }
            writeln!(w, "{},{}", self.normalized_heights[flat], self.counts[flat])?;
        }
        Ok(())
    }
}

/// Bin the post-burn-in samples over the prior box.
///
/// Every sample must lie inside the box: chains produced by the sampler
/// always do, and surrogate chains are expected to be truncated by whoever
/// built them.
pub fn estimate_density(
    chain: &Chain,
    lower: &[f64],
    upper: &[f64],
    bins: &[usize],
) -> Result<DensityEstimate, EstimatorError> {
    let dim = chain.dim();
    if bins.len() != dim || bins.contains(&0) {
        return Err(EstimatorError::BadBins);
    }
    assert_eq!(lower.len(), dim);
    assert_eq!(upper.len(), dim);

    let bin_edges: Vec<Vec<f64>> = (0..dim)
        .map(|a| {
            (0..=bins[a])
                .map(|i| lower[a] + i as f64 * (upper[a] - lower[a]) / bins[a] as f64)
                .collect()
        })
        .collect();
    let n_flat: usize = bins.iter().product();
    let mut counts = vec![0u64; n_flat];
    let mut total = 0u64;
    for s in chain.post_burn_in() {
        let mut flat = 0;
        for a in 0..dim {
            let x = s[a];
            assert!(
                lower[a] <= x && x < upper[a],
                "sample {x} outside the box [{}, {}) on axis {a}",
                lower[a],
                upper[a]
            );
            let i = (((x - lower[a]) / (upper[a] - lower[a])) * bins[a] as f64) as usize;
            flat = flat * bins[a] + i.min(bins[a] - 1);
        }
        counts[flat] += 1;
        total += 1;
    }
    let volume: f64 = (0..dim).map(|a| (upper[a] - lower[a]) / bins[a] as f64).product();
    let normalized_heights = counts.iter().map(|&c| c as f64 / (total as f64 * volume)).collect();
    Ok(DensityEstimate { bin_edges, counts, normalized_heights, total })
}

/// Center of the globally highest bin; ties go to the first bin in scan
/// order, i.e. the lexicographically smallest coordinates.
pub fn map_estimate(density: &DensityEstimate) -> Vec<f64> {
    let mut best = 0;
    for (i, h) in density.normalized_heights.iter().enumerate() {
        if *h > density.normalized_heights[best] {
            best = i;
        }
    }
    density.bin_center(&density.multi_index(best))
}

/// Mean of the post-burn-in samples.
pub fn cm_estimate(chain: &Chain) -> Vec<f64> {
    let mut mean = vec![0.0; chain.dim()];
    let n = chain.post_burn_in_len();
    for s in chain.post_burn_in() {
        for (m, v) in mean.iter_mut().zip(s) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    mean
}

/// One local posterior maximum on the histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct Lmap {
    pub bins: Vec<usize>,
    pub center: Vec<f64>,
    pub height: f64,
}

/// Bins that dominate their neighborhood (per-axis window of half-width
/// `min_separation`) and reach at least `epsilon` of the global peak,
/// sorted by descending height. Dominance is strict; among exactly equal
/// heights inside one window only the first bin in scan order qualifies, so
/// a flat-topped peak yields one LMAP, not several.
pub fn find_lmaps(density: &DensityEstimate, epsilon: f64, min_separation: usize) -> Vec<Lmap> {
    assert!(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0,1), got {epsilon}");
    let dim = density.dimension();
    let global_max = density.normalized_heights.iter().cloned().fold(0.0f64, f64::max);
    let mut lmaps = Vec::new();
    'bins: for flat in 0..density.counts.len() {
        let h = density.normalized_heights[flat];
        if h < epsilon * global_max || h == 0.0 {
            continue;
        }
        let idx = density.multi_index(flat);
        // Walk the neighborhood window (clipped at the box faces).
        let window: Vec<(usize, usize)> = (0..dim)
            .map(|a| {
                let lo = idx[a].saturating_sub(min_separation);
                let hi = (idx[a] + min_separation).min(density.bins(a) - 1);
                (lo, hi)
            })
            .collect();
        let mut probe: Vec<usize> = window.iter().map(|&(lo, _)| lo).collect();
        loop {
            let other = density.flat_index(&probe);
            if other != flat {
                let oh = density.normalized_heights[other];
                if oh > h || (oh == h && other < flat) {
                    continue 'bins;
                }
            }
            // Odometer step through the window.
            let mut advanced = false;
            for a in (0..dim).rev() {
                if probe[a] < window[a].1 {
                    probe[a] += 1;
                    for b in a + 1..dim {
                        probe[b] = window[b].0;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
        lmaps.push(Lmap { bins: idx.clone(), center: density.bin_center(&idx), height: h });
    }
    lmaps.sort_by(|a, b| b.height.partial_cmp(&a.height).unwrap());
    lmaps
}

/// Axis-aligned half-open box [lower, upper).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Region {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        assert_eq!(lower.len(), upper.len());
        assert!(
            lower.iter().zip(&upper).all(|(lo, hi)| lo < hi),
            "region must have lower < upper on every axis"
        );
        Region { lower, upper }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.lower.len()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v < hi)
    }
}

/// Split the 1-D box into one region per local peak, cutting at the left
/// edge of the lowest bin strictly between adjacent peaks (leftmost lowest
/// bin when several tie). Regions are disjoint and cover the box exactly.
pub fn partition_1d(density: &DensityEstimate, lmaps: &[Lmap]) -> Vec<Region> {
    assert_eq!(density.dimension(), 1, "automatic partitioning is 1-D only");
    assert!(!lmaps.is_empty(), "need at least one local peak to partition");
    let lo = density.bin_edges[0][0];
    let hi = *density.bin_edges[0].last().unwrap();
    let mut peak_bins: Vec<usize> = lmaps.iter().map(|l| l.bins[0]).collect();
    peak_bins.sort_unstable();
    let mut cuts = Vec::new();
    for w in peak_bins.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut min_bin = a + 1;
        for i in a + 1..b {
            if density.normalized_heights[i] < density.normalized_heights[min_bin] {
                min_bin = i;
            }
        }
        cuts.push(density.bin_edges[0][min_bin]);
    }
    let mut regions = Vec::with_capacity(cuts.len() + 1);
    let mut left = lo;
    for c in cuts {
        regions.push(Region::new(vec![left], vec![c]));
        left = c;
    }
    regions.push(Region::new(vec![left], vec![hi]));
    regions
}

/// Mean of the post-burn-in samples that fall inside `region`.
pub fn lcm_estimate(chain: &Chain, region: &Region) -> Result<Vec<f64>, EstimatorError> {
    let mut mean = vec![0.0; chain.dim()];
    let mut n = 0u64;
    for s in chain.post_burn_in() {
        if region.contains(s) {
            for (m, v) in mean.iter_mut().zip(s) {
                *m += v;
            }
            n += 1;
        }
    }
    if n == 0 {
        return Err(EstimatorError::EmptyRegion(0));
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    Ok(mean)
}

/// Fraction of post-burn-in samples inside `region`.
pub fn region_mass(chain: &Chain, region: &Region) -> f64 {
    let n = chain.post_burn_in().filter(|s| region.contains(s)).count();
    n as f64 / chain.post_burn_in_len() as f64
}

/// Forward scalar at the local estimators of one region; `None` entries
/// mean the model refused the point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForwardCheck {
    pub lmap: Option<f64>,
    pub lcm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub lmap: Vec<f64>,
    pub lcm: Vec<f64>,
    pub mass: f64,
    pub peak_height: f64,
    pub forward_check: Option<ForwardCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmapReport {
    pub center: Vec<f64>,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub map: Vec<f64>,
    pub cm: Vec<f64>,
    pub forward_at_map: Option<f64>,
    pub forward_at_cm: Option<f64>,
    pub lmaps: Vec<LmapReport>,
    pub regions: Vec<RegionReport>,
}

impl EstimatorReport {
    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

fn scalar_or_none(model: Option<&dyn ForwardModel>, x: &[f64]) -> Option<f64> {
    model.and_then(|m| m.scalar_check(x)).and_then(|r| r.ok())
}

/// Assemble the full estimator report. One-dimensional chains get their
/// regions from [`partition_1d`]; otherwise `manual_regions` is used (no
/// regions when absent). `model` enables the forward scalar checks.
pub fn full_report(
    chain: &Chain,
    density: &DensityEstimate,
    epsilon: f64,
    min_separation: usize,
    model: Option<&dyn ForwardModel>,
    manual_regions: Option<&[Region]>,
) -> Result<EstimatorReport, EstimatorError> {
    let map = map_estimate(density);
    let cm = cm_estimate(chain);
    let lmaps = find_lmaps(density, epsilon, min_separation);

    let regions: Vec<Region> = match manual_regions {
        Some(r) => r.to_vec(),
        None if density.dimension() == 1 && !lmaps.is_empty() => partition_1d(density, &lmaps),
        None => Vec::new(),
    };

    let mut region_reports = Vec::with_capacity(regions.len());
    for (i, region) in regions.iter().enumerate() {
        // The region's peak: highest bin whose center lies inside it.
        let mut peak: Option<(usize, f64)> = None;
        for flat in 0..density.counts.len() {
            let center = density.bin_center(&density.multi_index(flat));
            if region.contains(&center) {
                let h = density.normalized_heights[flat];
                if peak.is_none_or(|(_, ph)| h > ph) {
                    peak = Some((flat, h));
                }
            }
        }
        let (peak_flat, peak_height) = peak.ok_or(EstimatorError::EmptyRegion(i))?;
        let lmap = density.bin_center(&density.multi_index(peak_flat));
        let lcm = lcm_estimate(chain, region).map_err(|_| EstimatorError::EmptyRegion(i))?;
        let forward_check = model.map(|_| ForwardCheck {
            lmap: scalar_or_none(model, &lmap),
            lcm: scalar_or_none(model, &lcm),
        });
        region_reports.push(RegionReport {
            lo: region.lower.clone(),
            hi: region.upper.clone(),
            lmap,
            lcm,
            mass: region_mass(chain, region),
            peak_height,
            forward_check,
        });
    }

    Ok(EstimatorReport {
        forward_at_map: scalar_or_none(model, &map),
        forward_at_cm: scalar_or_none(model, &cm),
        map,
        cm,
        lmaps: lmaps
            .into_iter()
            .map(|l| LmapReport { center: l.center, height: l.height })
            .collect(),
        regions: region_reports,
    })
}
