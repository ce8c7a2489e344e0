//! Rankings and the measures used to compare them: top-k intersection
//! similarity, Kendall's tau-b and Spearman's rank correlation.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::hash::Hash;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RankError {
    #[error("score at index {index} is NaN")]
    NaN { index: usize },
    #[error("k = {k} is out of range 1..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("score vectors have different lengths ({0} and {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 scores, got {0}")]
    TooShort(usize),
}

/// Entity ids ordered by descending score; ties go to the smaller id.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    order: Vec<usize>,
    scores: Vec<f64>,
}

impl RankedList {
    /// Ids from best to worst.
    pub fn ids(&self) -> &[usize] {
        &self.order
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// The best `k` ids (fewer if the list is shorter).
    pub fn top(&self, k: usize) -> &[usize] {
        &self.order[..k.min(self.order.len())]
    }
}

pub fn rank(scores: &[f64]) -> Result<RankedList, RankError> {
    if let Some(index) = scores.iter().position(|s| s.is_nan()) {
        return Err(RankError::NaN { index });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    Ok(RankedList {
        order,
        scores: scores.to_vec(),
    })
}

/// Top-`k` intersection similarity
///
/// ```text
/// isim_k(a, b) = 1 - (1/k) sum_{t=1..k} |a_t Δ b_t| / (2t)
/// ```
///
/// where `a_t` is the set of the first `t` entries of `a`. Equals 1 exactly
/// when the two prefixes agree position by position and 0 when they share no
/// element.
pub fn intersection_similarity<T: Eq + Hash>(a: &[T], b: &[T], k: usize) -> Result<f64, RankError> {
    let max = a.len().min(b.len());
    if k == 0 || k > max {
        return Err(RankError::KOutOfRange { k, max });
    }
    Ok(intersection_similarity_curve(&a[..k], &b[..k])[k - 1])
}

/// `isim_k` for every `k` from 1 to the shorter list's length, in one pass.
pub fn intersection_similarity_curve<T: Eq + Hash>(a: &[T], b: &[T]) -> Vec<f64> {
    let len = a.len().min(b.len());
    let mut seen_a: HashSet<&T> = HashSet::with_capacity(len);
    let mut seen_b: HashSet<&T> = HashSet::with_capacity(len);
    let mut common = 0usize;
    let mut acc = 0.0;
    let mut curve = Vec::with_capacity(len);
    for t in 1..=len {
        let (x, y) = (&a[t - 1], &b[t - 1]);
        seen_a.insert(x);
        seen_b.insert(y);
        if x == y {
            common += 1;
        } else {
            common += usize::from(seen_b.contains(x)) + usize::from(seen_a.contains(y));
        }
        let sym_diff = 2 * t - 2 * common;
        acc += sym_diff as f64 / (2 * t) as f64;
        curve.push(1.0 - acc / t as f64);
    }
    curve
}

fn check_pair(a: &[f64], b: &[f64]) -> Result<(), RankError> {
    if a.len() != b.len() {
        return Err(RankError::LengthMismatch(a.len(), b.len()));
    }
    if a.len() < 2 {
        return Err(RankError::TooShort(a.len()));
    }
    if let Some(index) = a.iter().chain(b).position(|s| s.is_nan()) {
        return Err(RankError::NaN {
            index: index % a.len(),
        });
    }
    Ok(())
}

fn cmp(a: f64, b: f64) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

/// Number of tied pairs in a sorted sequence.
fn tied_pairs<T: PartialEq>(sorted: impl Iterator<Item = T>) -> u64 {
    let mut total = 0u64;
    let mut run = 0u64;
    let mut last: Option<T> = None;
    for item in sorted {
        if last.as_ref() == Some(&item) {
            run += 1;
        } else {
            total += run * (run + 1) / 2;
            run = 0;
        }
        last = Some(item);
    }
    total + run * (run + 1) / 2
}

/// Merge sort by `b`, counting strict inversions.
fn sort_counting_swaps(idx: &mut [usize], b: &[f64], buf: &mut [usize]) -> u64 {
    let n = idx.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = sort_counting_swaps(&mut idx[..mid], b, &mut buf[..mid])
        + sort_counting_swaps(&mut idx[mid..], b, &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if cmp(b[idx[j]], b[idx[i]]) == Ordering::Less {
            buf[k] = idx[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = idx[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&idx[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&idx[j..n]);
    idx.copy_from_slice(&buf[..n]);
    swaps
}

/// Kendall's tau-b in O(n log n) (Knight's algorithm). `Ok(None)` when either
/// input is constant.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> Result<Option<f64>, RankError> {
    check_pair(a, b)?;
    let n = a.len() as u64;
    let mut idx: Vec<usize> = (0..a.len()).collect();
    idx.sort_by(|&i, &j| cmp(a[i], a[j]).then(cmp(b[i], b[j])));

    let pairs = n * (n - 1) / 2;
    let ties_a = tied_pairs(idx.iter().map(|&i| a[i]));
    let ties_joint = tied_pairs(idx.iter().map(|&i| (a[i], b[i])));

    let mut buf = vec![0; idx.len()];
    let swaps = sort_counting_swaps(&mut idx, b, &mut buf);
    let ties_b = tied_pairs(idx.iter().map(|&i| b[i]));

    if pairs == ties_a || pairs == ties_b {
        return Ok(None);
    }
    let numerator =
        pairs as f64 - ties_a as f64 - ties_b as f64 + ties_joint as f64 - 2.0 * swaps as f64;
    let denominator = ((pairs - ties_a) as f64 * (pairs - ties_b) as f64).sqrt();
    Ok(Some((numerator / denominator).clamp(-1.0, 1.0)))
}

/// 1-based ranks with ties replaced by their average rank.
pub fn mid_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| cmp(v[i], v[j]));
    let mut ranks = vec![0.0; v.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && v[idx[end]] == v[idx[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rank correlation: the Pearson correlation of the mid-ranks.
/// `Ok(None)` when either input is constant.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<Option<f64>, RankError> {
    check_pair(a, b)?;
    Ok(pearson(&mid_ranks(a), &mid_ranks(b)))
}

/// Restricts both score vectors to the `k` best entities under `reference`
/// (the first list), keeping `reference`'s order.
fn restrict_top_k(
    reference: &[f64],
    other: &[f64],
    k: usize,
) -> Result<(Vec<f64>, Vec<f64>), RankError> {
    if reference.len() != other.len() {
        return Err(RankError::LengthMismatch(reference.len(), other.len()));
    }
    if k == 0 || k > reference.len() {
        return Err(RankError::KOutOfRange {
            k,
            max: reference.len(),
        });
    }
    let ranked = rank(reference)?;
    let top = ranked.top(k);
    Ok((
        top.iter().map(|&i| reference[i]).collect(),
        top.iter().map(|&i| other[i]).collect(),
    ))
}

/// Kendall's tau-b between the two score vectors restricted to the top `k`
/// entities of `reference`.
pub fn top_k_kendall(reference: &[f64], other: &[f64], k: usize) -> Result<Option<f64>, RankError> {
    let (a, b) = restrict_top_k(reference, other, k)?;
    kendall_tau(&a, &b)
}

/// Spearman's correlation between the two score vectors restricted to the top
/// `k` entities of `reference`.
pub fn top_k_spearman(
    reference: &[f64],
    other: &[f64],
    k: usize,
) -> Result<Option<f64>, RankError> {
    let (a, b) = restrict_top_k(reference, other, k)?;
    spearman(&a, &b)
}

/// One row of a similarity-versus-k curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityPoint {
    pub k: usize,
    pub isim: f64,
    pub kendall: Option<f64>,
    pub spearman: Option<f64>,
}

/// Similarity curves for `k = 1..=max_k` between two score vectors over the
/// same entities. The rank correlations use the top `k` of `reference`;
/// they are `None` where undefined (fewer than two entities, or constant
/// scores).
pub fn similarity_curves(
    reference: &[f64],
    other: &[f64],
    max_k: usize,
) -> Result<Vec<SimilarityPoint>, RankError> {
    if reference.len() != other.len() {
        return Err(RankError::LengthMismatch(reference.len(), other.len()));
    }
    if max_k == 0 || max_k > reference.len() {
        return Err(RankError::KOutOfRange {
            k: max_k,
            max: reference.len(),
        });
    }
    let ra = rank(reference)?;
    let rb = rank(other)?;
    let isim = intersection_similarity_curve(ra.top(max_k), rb.top(max_k));
    (1..=max_k)
        .map(|k| {
            let (kendall, spearman) = if k < 2 {
                (None, None)
            } else {
                (
                    top_k_kendall(reference, other, k)?,
                    top_k_spearman(reference, other, k)?,
                )
            };
            Ok(SimilarityPoint {
                k,
                isim: isim[k - 1],
                kendall,
                spearman,
            })
        })
        .collect()
}
