//! Ranking metrics for binary relevance.

/// Indices ordered by descending score; equal scores keep index order.
pub fn ranking(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    idx
}

/// Mean over positives of the precision at each positive's rank.
///
/// `None` unless there is at least one positive and one negative.
pub fn average_precision(scores: &[f64], labels: &[bool]) -> Option<f64> {
    assert_eq!(scores.len(), labels.len());
    let pos = labels.iter().filter(|&&l| l).count();
    if pos == 0 || pos == labels.len() {
        return None;
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (rank, &i) in ranking(scores).iter().enumerate() {
        if labels[i] {
            hits += 1;
            sum += hits as f64 / (rank + 1) as f64;
        }
    }
    Some(sum / pos as f64)
}

/// Probability that a random positive outscores a random negative, ties
/// counted as one half.
pub fn auroc(scores: &[f64], labels: &[bool]) -> Option<f64> {
    assert_eq!(scores.len(), labels.len());
    let pos = labels.iter().filter(|&&l| l).count() as u64;
    let neg = labels.len() as u64 - pos;
    if pos == 0 || neg == 0 {
        return None;
    }
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Twice the Mann-Whitney statistic, kept integral.
    let mut twice_u = 0u64;
    let mut neg_below = 0u64;
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        let (mut p, mut n) = (0u64, 0u64);
        while j < idx.len() && scores[idx[j]].total_cmp(&scores[idx[i]]).is_eq() {
            if labels[idx[j]] {
                p += 1;
            } else {
                n += 1;
            }
            j += 1;
        }
        twice_u += p * (2 * neg_below + n);
        neg_below += n;
        i = j;
    }
    Some(twice_u as f64 / (2 * pos * neg) as f64)
}
