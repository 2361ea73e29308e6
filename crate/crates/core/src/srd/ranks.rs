/// Ascending fractional ranks (smallest value gets rank 1).
///
/// Sorted values are chained into tie classes: a value joins the previous
/// class when it equals its predecessor or lies closer than `tie_epsilon` to
/// it. Every member of a class gets the mean of the positions it occupies.
pub fn fractional_ranks(column: &[f64], tie_epsilon: f64) -> Vec<f64> {
    let n = column.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| column[a].total_cmp(&column[b]).then(a.cmp(&b)));

    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n {
            let gap = column[order[end]] - column[order[end - 1]];
            if gap == 0.0 || gap < tie_epsilon {
                end += 1;
            } else {
                break;
            }
        }
        // positions start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// True if any two ranks coincide.
pub fn has_ties(ranks: &[f64]) -> bool {
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).any(|w| w[0] == w[1])
}
