//! Brute-force reference implementations used as test oracles.
//!
//! Nothing in here depends on `mscd-core`: graphs are plain edge lists and
//! covers are plain `Vec<Vec<usize>>`, so every check stays independent of
//! the code path it is verifying.

use std::collections::BTreeMap;

use rand::Rng;

/// Undirected edge `(u, v, weight)` with `u != v`.
pub type Edge = (usize, usize, f64);

/// LFK community fitness evaluated directly from its definition.
pub fn fitness(k_in: f64, k_out: f64, alpha: f64) -> f64 {
    let total = k_in + k_out;
    if total == 0.0 {
        0.0
    } else {
        k_in / total.powf(alpha)
    }
}

/// `(k_in, k_out)` of `members` by scanning every edge once.
///
/// `k_in` counts each internal edge from both endpoints.
pub fn degrees(edges: &[Edge], node_count: usize, members: &[usize]) -> (f64, f64) {
    let mut inside = vec![false; node_count];
    for &m in members {
        inside[m] = true;
    }
    let (mut k_in, mut k_out) = (0.0, 0.0);
    for &(u, v, w) in edges {
        match (inside[u], inside[v]) {
            (true, true) => k_in += 2.0 * w,
            (true, false) | (false, true) => k_out += w,
            _ => {}
        }
    }
    (k_in, k_out)
}

/// Fitness of a node set recomputed from scratch.
pub fn set_fitness(edges: &[Edge], node_count: usize, members: &[usize], alpha: f64) -> f64 {
    let (k_in, k_out) = degrees(edges, node_count, members);
    fitness(k_in, k_out, alpha)
}

/// Erdős–Rényi style random graph over `n` nodes; weights are integers in
/// `1..=max_weight`.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64, max_weight: u32) -> Vec<Edge> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random_bool(p) {
                let w = rng.random_range(1..=max_weight) as f64;
                edges.push((u, v, w));
            }
        }
    }
    edges
}

/// Random cover: `k` non-empty communities over `0..n`, each node kept with
/// probability `density`.
pub fn random_cover<R: Rng>(rng: &mut R, n: usize, k: usize, density: f64) -> Vec<Vec<usize>> {
    (0..k)
        .map(|_| {
            let mut c: Vec<usize> = (0..n).filter(|_| rng.random_bool(density)).collect();
            if c.is_empty() {
                c.push(rng.random_range(0..n));
            }
            c
        })
        .collect()
}

/// Communities in `cover` (other than `c` itself) whose overlap with
/// `cover[c]` satisfies `max(|A∩B|/|A|, |A∩B|/|B|) >= eta`.
pub fn qualifying_partners(cover: &[Vec<usize>], c: usize, eta: f64) -> Vec<usize> {
    let a = &cover[c];
    (0..cover.len())
        .filter(|&o| o != c)
        .filter(|&o| {
            let b = &cover[o];
            let inter = a.iter().filter(|x| b.contains(x)).count() as f64;
            let ratio = (inter / a.len() as f64).max(inter / b.len() as f64);
            ratio >= eta - 1e-12
        })
        .collect()
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// Overlapping-cover NMI computed straight from per-node indicator vectors.
pub fn overlapping_nmi(x: &[Vec<usize>], y: &[Vec<usize>], n: usize) -> f64 {
    if x.is_empty() && y.is_empty() {
        return 1.0;
    }
    if x.is_empty() || y.is_empty() {
        return 0.0;
    }
    let indicators = |cover: &[Vec<usize>]| -> Vec<Vec<bool>> {
        cover
            .iter()
            .map(|c| {
                let mut row = vec![false; n];
                for &v in c {
                    row[v] = true;
                }
                row
            })
            .collect()
    };
    let ix = indicators(x);
    let iy = indicators(y);
    let side = |a: &[Vec<bool>], b: &[Vec<bool>]| -> f64 {
        let mut total = 0.0;
        for xa in a {
            let ones = xa.iter().filter(|&&t| t).count() as f64 / n as f64;
            let h_a = plogp(ones) + plogp(1.0 - ones);
            let mut best = h_a;
            for yb in b {
                let mut joint = [[0usize; 2]; 2];
                for node in 0..n {
                    joint[xa[node] as usize][yb[node] as usize] += 1;
                }
                let p = |i: usize, j: usize| joint[i][j] as f64 / n as f64;
                let matched = plogp(p(1, 1)) + plogp(p(0, 0)) >= plogp(p(0, 1)) + plogp(p(1, 0));
                if !matched {
                    continue;
                }
                // H(A|B) = sum p(a,b) log(p(b)/p(a,b))
                let mut cond = 0.0;
                for j in 0..2 {
                    let pb = p(0, j) + p(1, j);
                    for i in 0..2 {
                        let pab = p(i, j);
                        if pab > 0.0 {
                            cond += pab * (pb / pab).log2();
                        }
                    }
                }
                best = best.min(cond);
            }
            total += if h_a > 0.0 { best / h_a } else { 0.0 };
        }
        total / a.len() as f64
    };
    1.0 - 0.5 * (side(&ix, &iy) + side(&iy, &ix))
}

/// Every non-isomorphic connected simple graph on exactly `n` nodes, as
/// edge lists. Intended for `n <= 8`.
pub fn connected_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    assert!((1..=8).contains(&n), "supported for 1..=8 nodes");
    let mut level: Vec<Vec<u8>> = vec![vec![0u8]];
    for k in 1..n {
        let mut next: BTreeMap<u64, Vec<u8>> = BTreeMap::new();
        for rows in &level {
            for mask in 1u32..(1 << k) {
                let mut grown = rows.clone();
                grown.push(mask as u8);
                for (i, row) in grown.iter_mut().enumerate().take(k) {
                    if mask & (1 << i) != 0 {
                        *row |= 1 << k;
                    }
                }
                let code = canonical_code(&grown);
                next.entry(code).or_insert(grown);
            }
        }
        level = next.into_values().collect();
    }
    level
        .iter()
        .map(|rows| {
            let mut edges = Vec::new();
            for u in 0..rows.len() {
                for v in (u + 1)..rows.len() {
                    if rows[u] & (1 << v) != 0 {
                        edges.push((u, v));
                    }
                }
            }
            edges
        })
        .collect()
}

/// Canonical code: minimum upper-triangle bit string over all vertex orders
/// compatible with a colour refinement, which is isomorphism invariant.
fn canonical_code(rows: &[u8]) -> u64 {
    let n = rows.len();
    let mut colors: Vec<usize> = rows.iter().map(|r| r.count_ones() as usize).collect();
    loop {
        let signatures: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<usize> =
                    (0..n).filter(|&u| rows[v] & (1 << u) != 0).map(|u| colors[u]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut distinct = signatures.clone();
        distinct.sort();
        distinct.dedup();
        let refined: Vec<usize> = signatures
            .iter()
            .map(|s| distinct.binary_search(s).unwrap())
            .collect();
        let before = colors.iter().collect::<std::collections::BTreeSet<_>>().len();
        colors = refined;
        if distinct.len() == before {
            break;
        }
    }
    let mut cells: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (v, &c) in colors.iter().enumerate() {
        cells.entry(c).or_default().push(v);
    }
    let cells: Vec<Vec<usize>> = cells.into_values().collect();
    let mut best = u64::MAX;
    let mut order = Vec::with_capacity(n);
    permute_cells(&cells, 0, &mut order, rows, &mut best);
    best
}

fn permute_cells(cells: &[Vec<usize>], cell: usize, order: &mut Vec<usize>, rows: &[u8], best: &mut u64) {
    if cell == cells.len() {
        let n = order.len();
        let mut code = 0u64;
        let mut bit = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                if rows[order[i]] & (1 << order[j]) != 0 {
                    code |= 1 << bit;
                }
                bit += 1;
            }
        }
        *best = (*best).min(code);
        return;
    }
    let mut members = cells[cell].clone();
    heap_permutations(&mut members, 0, &mut |perm| {
        let len = order.len();
        order.extend_from_slice(perm);
        permute_cells(cells, cell + 1, order, rows, best);
        order.truncate(len);
    });
}

fn heap_permutations(items: &mut [usize], k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        heap_permutations(items, k + 1, visit);
        items.swap(k, i);
    }
}
