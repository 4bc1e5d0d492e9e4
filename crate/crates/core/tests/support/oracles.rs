//! Brute-force references. Each one avoids the code path it checks.

use rand::Rng;

/// Pair counts (a, b, c, d) by looping over all pairs: a = together in both,
/// b = together only in `first`, c = together only in `second`.
pub fn pair_counts(first: &[usize], second: &[usize]) -> [u64; 4] {
    let mut out = [0u64; 4];
    for i in 0..first.len() {
        for j in i + 1..first.len() {
            let s1 = first[i] == first[j];
            let s2 = second[i] == second[j];
            let slot = match (s1, s2) {
                (true, true) => 0,
                (true, false) => 1,
                (false, true) => 2,
                (false, false) => 3,
            };
            out[slot] += 1;
        }
    }
    out
}

pub fn rand_from_pairs(p: [u64; 4]) -> f64 {
    (p[0] + p[3]) as f64 / p.iter().sum::<u64>() as f64
}

pub fn fm_from_pairs(p: [u64; 4]) -> f64 {
    p[0] as f64 / (((p[0] + p[1]) * (p[0] + p[2])) as f64).sqrt()
}

/// Adjusted Rand in pair-count form.
pub fn ari_from_pairs(p: [u64; 4]) -> f64 {
    let t = p.iter().sum::<u64>() as f64;
    let (r, c) = ((p[0] + p[1]) as f64, (p[0] + p[2]) as f64);
    let expected = r * c / t;
    let max = (r + c) / 2.0;
    if max == expected {
        return 0.0;
    }
    (p[0] as f64 - expected) / (max - expected)
}

fn sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Σ over clusters of (1/|c|) Σ_{i<j in c} ‖x_i − x_j‖².
pub fn wcss_pairwise(rows: &[Vec<f64>], labels: &[usize]) -> f64 {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut total = 0.0;
    for c in 0..k {
        let members: Vec<usize> = (0..rows.len()).filter(|&i| labels[i] == c).collect();
        let mut s = 0.0;
        for (p, &i) in members.iter().enumerate() {
            for &j in &members[p + 1..] {
                s += sq(&rows[i], &rows[j]);
            }
        }
        if !members.is_empty() {
            total += s / members.len() as f64;
        }
    }
    total
}

/// Components after removing the k−1 heaviest edges of a Prim minimum
/// spanning tree.
pub fn mst_components(rows: &[Vec<f64>], k: usize) -> Vec<usize> {
    let n = rows.len();
    let mut in_tree = vec![false; n];
    let mut best = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut edges = Vec::new();
    best[0] = 0.0;
    for _ in 0..n {
        let u = (0..n).filter(|&i| !in_tree[i]).min_by(|&a, &b| best[a].total_cmp(&best[b])).unwrap();
        in_tree[u] = true;
        if parent[u] != usize::MAX {
            edges.push((best[u], parent[u], u));
        }
        for v in 0..n {
            let d = sq(&rows[u], &rows[v]).sqrt();
            if !in_tree[v] && d < best[v] {
                best[v] = d;
                parent[v] = u;
            }
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0));
    edges.truncate(n - k);
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(c: &mut [usize], x: usize) -> usize {
        if c[x] != x {
            let r = find(c, c[x]);
            c[x] = r;
        }
        c[x]
    }
    for &(_, a, b) in &edges {
        let (ra, rb) = (find(&mut comp, a), find(&mut comp, b));
        comp[ra] = rb;
    }
    (0..n).map(|i| find(&mut comp, i)).collect()
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Largest number of items on which `second`, relabeled by some bijection
/// of max(k1, k2) labels, agrees with `first`.
pub fn best_overlap(first: &[usize], k1: usize, second: &[usize], k2: usize) -> usize {
    permutations(k1.max(k2))
        .iter()
        .map(|perm| first.iter().zip(second).filter(|(&a, &b)| perm[b] == a).count())
        .max()
        .unwrap()
}

/// Number of set partitions of n items into each block count 0..=n, by
/// walking restricted growth strings.
pub fn partition_counts(n: usize) -> Vec<u128> {
    let mut counts = vec![0u128; n + 1];
    fn walk(s: &mut Vec<usize>, n: usize, max: usize, counts: &mut [u128]) {
        if s.len() == n {
            counts[max] += 1;
            return;
        }
        for v in 0..=max {
            s.push(v);
            walk(s, n, max.max(v + 1), counts);
            s.pop();
        }
    }
    if n == 0 {
        counts[0] = 1;
    } else {
        walk(&mut vec![], n, 0, &mut counts);
    }
    counts
}

pub fn random_rows(rng: &mut impl Rng, n: usize, m: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..m).map(|_| rng.random_range(-5.0..5.0)).collect()).collect()
}

pub fn random_labels(rng: &mut impl Rng, n: usize, k: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..k)).collect()
}
