//! Oracle suites shared by the integration tests and the acceptance run.
//! Each suite returns a description of the first disagreement it finds.
#![allow(dead_code)]

use mscd_core::growth::{grow_community, GrowthConfig, SizeRegistry};
use mscd_core::{
    community_degrees, find_merge_candidates, overlapping_nmi, rebuild_membership, Community, CommunityId, Cover, Graph,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Outcome = Result<(), String>;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// Random add/remove steps on random graphs; cached degrees must equal a
/// from-scratch edge scan after every step.
pub fn incremental_degrees(steps: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    while done < steps {
        let n = rng.random_range(2..=50);
        let p = rng.random_range(0.05..0.5);
        let edges = mscd_testkit::random_graph(&mut rng, n, p, 4);
        let g = Graph::from_edges(n, edges.clone()).map_err(|e| e.to_string())?;
        let mut c = Community::singleton(CommunityId(0), &g, rng.random_range(0..n)).map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let v = rng.random_range(0..n);
            if c.contains(v) {
                if c.len() == 1 {
                    continue;
                }
                c.remove_node(&g, v).map_err(|e| e.to_string())?;
            } else {
                c.add_node(&g, v).map_err(|e| e.to_string())?;
            }
            let members = c.nodes();
            let (k_in, k_out) = mscd_testkit::degrees(&edges, n, &members);
            if !close(k_in, c.k_in()) || !close(k_out, c.k_out()) {
                return Err(format!(
                    "step {done}: cached ({}, {}) vs scanned ({k_in}, {k_out}) for {members:?}",
                    c.k_in(),
                    c.k_out()
                ));
            }
            let (a, b) = community_degrees(&g, &members).map_err(|e| e.to_string())?;
            if !close(a, k_in) || !close(b, k_out) {
                return Err(format!("community_degrees disagrees with the edge scan on {members:?}"));
            }
            done += 1;
        }
    }
    Ok(())
}

/// Grows a singleton from every node of every connected graph with up to
/// `max_nodes` nodes, at each scale in `alphas`, and checks that no single
/// addition or removal improves the result.
pub fn growth_maximality(max_nodes: usize, alphas: &[f64]) -> Outcome {
    for n in 2..=max_nodes {
        for shape in mscd_testkit::connected_graphs(n) {
            let edges: Vec<(usize, usize, f64)> = shape.iter().map(|&(u, v)| (u, v, 1.0)).collect();
            let g = Graph::from_edges(n, edges.clone()).map_err(|e| e.to_string())?;
            for &alpha in alphas {
                let config = GrowthConfig::new(alpha, 0.5, 5).map_err(|e| e.to_string())?;
                for start in 0..n {
                    let cover = Cover::from_node_sets(&g, &[vec![start]]).map_err(|e| e.to_string())?;
                    let table = rebuild_membership(&cover, n);
                    let sizes = SizeRegistry::from_cover(&cover);
                    let mut c = cover.communities()[0].clone();
                    grow_community(&g, &mut c, &table, &sizes, &config);
                    check_maximal(&edges, n, &c.nodes(), alpha)
                        .map_err(|m| format!("graph {shape:?}, start {start}, alpha {alpha}: {m}"))?;
                    if (0..n).any(|v| table.contains(v, c.id()) != c.contains(v)) {
                        return Err(format!("graph {shape:?}: membership table out of step"));
                    }
                }
            }
        }
    }
    Ok(())
}

fn check_maximal(edges: &[(usize, usize, f64)], n: usize, members: &[usize], alpha: f64) -> Outcome {
    let base = mscd_testkit::set_fitness(edges, n, members, alpha);
    let tol = 1e-9 * base.abs().max(1.0);
    for v in 0..n {
        if members.contains(&v) {
            if members.len() == 1 {
                continue;
            }
            let without: Vec<usize> = members.iter().copied().filter(|&x| x != v).collect();
            if mscd_testkit::set_fitness(edges, n, &without, alpha) > base + tol {
                return Err(format!("removing {v} from {members:?} improves the fitness"));
            }
        } else if edges.iter().any(|&(a, b, _)| (a == v && members.contains(&b)) || (b == v && members.contains(&a))) {
            let mut with = members.to_vec();
            with.push(v);
            if mscd_testkit::set_fitness(edges, n, &with, alpha) > base + tol {
                return Err(format!("adding {v} to {members:?} improves the fitness"));
            }
        }
    }
    Ok(())
}

/// Check-phase pairs against an all-pairs overlap scan on random covers.
pub fn merge_candidates(covers: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for round in 0..covers {
        let n = rng.random_range(5..=200);
        let k = rng.random_range(2..=12);
        let density = rng.random_range(0.02..0.4);
        let eta = [0.1, 0.3, 0.5, 0.75, 1.0][rng.random_range(0..5)];
        let sets = mscd_testkit::random_cover(&mut rng, n, k, density);
        let g = Graph::from_edges(n, std::iter::empty()).map_err(|e| e.to_string())?;
        let cover = Cover::from_node_sets(&g, &sets).map_err(|e| e.to_string())?;
        let table = rebuild_membership(&cover, n);
        let mut check: Vec<usize> = (0..k).filter(|_| rng.random_bool(0.7)).collect();
        check.shuffle(&mut rng);
        let ids: Vec<CommunityId> = check.iter().map(|&i| CommunityId(i as u32)).collect();
        let pairs = find_merge_candidates(&ids, &table, &cover, eta, 1 + round % 4);
        for p in &pairs {
            let (a, b) = (p.keep.0 as usize, p.absorb.0 as usize);
            if !mscd_testkit::qualifying_partners(&sets, a, eta).contains(&b) {
                return Err(format!("round {round}: pair ({a}, {b}) does not reach eta {eta}"));
            }
        }
        for &c in &check {
            let qualifies = !mscd_testkit::qualifying_partners(&sets, c, eta).is_empty();
            let emitted = pairs.iter().any(|p| p.keep.0 as usize == c || p.absorb.0 as usize == c);
            if qualifies && !emitted {
                return Err(format!("round {round}: community {c} has a partner but no pair was emitted"));
            }
        }
        let mut keys: Vec<(u32, u32)> = pairs.iter().map(|p| (p.keep.0.min(p.absorb.0), p.keep.0.max(p.absorb.0))).collect();
        let len = keys.len();
        keys.sort_unstable();
        keys.dedup();
        if keys.len() != len {
            return Err(format!("round {round}: duplicate unordered pair"));
        }
    }
    Ok(())
}

fn random_pair(rng: &mut ChaCha8Rng) -> (usize, Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let n = rng.random_range(1..=12);
    let kx = rng.random_range(1..=6);
    let ky = rng.random_range(1..=6);
    let dx = rng.random_range(0.05..0.95);
    let dy = rng.random_range(0.05..0.95);
    let x = mscd_testkit::random_cover(rng, n, kx, dx);
    let y = mscd_testkit::random_cover(rng, n, ky, dy);
    (n, x, y)
}

/// Overlapping NMI against the indicator-vector reference, to 1e-10.
pub fn nmi_reference(pairs: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..pairs {
        let (n, x, y) = random_pair(&mut rng);
        let got = overlapping_nmi(&x, &y, n).map_err(|e| e.to_string())?;
        let want = mscd_testkit::overlapping_nmi(&x, &y, n);
        if (got - want).abs() > 1e-10 {
            return Err(format!("pair {i}: {got} vs reference {want} for {x:?} / {y:?}"));
        }
    }
    Ok(())
}

/// Identity, symmetry, relabeling invariance and range, all exact.
pub fn nmi_exact_properties(pairs: usize, seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..pairs {
        let (n, x, y) = random_pair(&mut rng);
        let nmi = |a: &Vec<Vec<usize>>, b: &Vec<Vec<usize>>| overlapping_nmi(a, b, n).map_err(|e| e.to_string());
        if nmi(&x, &x)? != 1.0 {
            return Err(format!("pair {i}: NMI(X, X) != 1 for {x:?}"));
        }
        let xy = nmi(&x, &y)?;
        if xy != nmi(&y, &x)? {
            return Err(format!("pair {i}: NMI is not symmetric for {x:?} / {y:?}"));
        }
        if !(0.0..=1.0).contains(&xy) {
            return Err(format!("pair {i}: NMI {xy} out of range"));
        }
        let mut shuffled = y.clone();
        shuffled.shuffle(&mut rng);
        for c in &mut shuffled {
            c.shuffle(&mut rng);
        }
        if nmi(&x, &shuffled)? != xy {
            return Err(format!("pair {i}: relabeling communities changed the NMI"));
        }
    }
    Ok(())
}
