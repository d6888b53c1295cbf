//! Exact maximum clique (greedy-colouring branch and bound).

use crate::error::Result;
use crate::par;
use crate::state::StateSet;

/// Greedy colouring of `p`; returns vertices grouped by colour and each vertex's colour (1-based).
fn colour_sort(adj: &[Vec<bool>], p: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &v in p {
        match classes.iter_mut().find(|c| c.iter().all(|&u| !adj[v][u])) {
            Some(c) => c.push(v),
            None => classes.push(vec![v]),
        }
    }
    let mut order = Vec::with_capacity(p.len());
    let mut colours = Vec::with_capacity(p.len());
    for (k, c) in classes.into_iter().enumerate() {
        for v in c {
            order.push(v);
            colours.push(k + 1);
        }
    }
    (order, colours)
}

fn expand(adj: &[Vec<bool>], r: &mut Vec<usize>, p: &[usize], best: &mut Vec<usize>) {
    let (order, colours) = colour_sort(adj, p);
    for i in (0..order.len()).rev() {
        if r.len() + colours[i] <= best.len() {
            return;
        }
        let v = order[i];
        r.push(v);
        let next: Vec<usize> = order[..i].iter().copied().filter(|&u| adj[v][u]).collect();
        if next.is_empty() {
            if r.len() > best.len() {
                *best = r.clone();
            }
        } else {
            expand(adj, r, &next, best);
        }
        r.pop();
    }
}

/// Vertices of a maximum clique, sorted ascending. Empty graph gives an empty clique.
pub fn max_clique(adj: &[Vec<bool>]) -> Vec<usize> {
    let n = adj.len();
    let mut p: Vec<usize> = (0..n).collect();
    let degree = |v: usize| adj[v].iter().filter(|&&e| e).count();
    p.sort_by_key(|&v| std::cmp::Reverse(degree(v)));
    let mut best = Vec::new();
    expand(adj, &mut Vec::new(), &p, &mut best);
    best.sort_unstable();
    best
}

/// Exhaustive maximum clique size; test oracle for small graphs.
pub fn brute_force_clique_size(adj: &[Vec<bool>]) -> usize {
    let n = adj.len();
    assert!(n <= 20, "brute force is for small graphs");
    (0u32..(1 << n))
        .filter(|mask| {
            let vs: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            vs.iter().enumerate().all(|(a, &i)| vs[a + 1..].iter().all(|&j| adj[i][j]))
        })
        .map(u32::count_ones)
        .max()
        .unwrap_or(0) as usize
}

fn graph(n: usize, edge: impl Fn(usize, usize) -> bool + Sync) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; n]; n];
    for (i, j) in par::filter_pairs(n, |i, j| edge(i, j).then_some((i, j))) {
        adj[i][j] = true;
        adj[j][i] = true;
    }
    adj
}

/// Clique size and member labels.
pub type CliqueWitness = (usize, Vec<String>);

fn witness(set: &StateSet, members: Vec<usize>) -> CliqueWitness {
    (members.len(), members.iter().map(|&i| set.states()[i].label.clone()).collect())
}

/// Largest family of states pairwise non-orthogonal on `party`.
pub fn nonorth_clique(set: &StateSet, party: &str) -> Result<CliqueWitness> {
    let p = set.space().party_index(party)?;
    let st = set.states();
    let adj = graph(st.len(), |i, j| !st[i].local_inner(&st[j], p).is_zero());
    Ok(witness(set, max_clique(&adj)))
}

/// Largest family pairwise non-orthogonal on every party except `excluded` jointly.
pub fn joint_nonorth_clique(set: &StateSet, excluded: usize) -> CliqueWitness {
    let st = set.states();
    let adj = graph(st.len(), |i, j| !st[i].inner_excluding(&st[j], excluded).is_zero());
    witness(set, max_clique(&adj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::type2_set_78;
    use proptest::prelude::*;

    fn adj_from(n: usize, bits: &[bool]) -> Vec<Vec<bool>> {
        let mut adj = vec![vec![false; n]; n];
        let mut k = 0;
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            for j in i + 1..n {
                adj[i][j] = bits[k];
                adj[j][i] = bits[k];
                k += 1;
            }
        }
        adj
    }

    #[test]
    fn edgeless_and_complete() {
        assert_eq!(max_clique(&adj_from(5, &[false; 10])).len(), 1);
        assert_eq!(max_clique(&adj_from(5, &[true; 10])).len(), 5);
        assert!(max_clique(&[]).is_empty());
    }

    #[test]
    fn example4_cliques() {
        let set = type2_set_78().unwrap();
        let (a, _) = nonorth_clique(&set, "A").unwrap();
        let (b, _) = nonorth_clique(&set, "B").unwrap();
        assert!(a >= 5);
        assert!(b >= 4);
        let p = |l: &str| set.position(l).unwrap();
        let group = ["psi1", "psi2", "psi3", "psi4", "psi5"];
        for x in group {
            for y in group {
                if x != y {
                    assert!(!set.local_inner(p(x), p(y), "A").unwrap().is_zero());
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn agrees_with_brute_force(n in 1usize..=15, seed in any::<u64>(), density in 0.1f64..0.9) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let bits: Vec<bool> = (0..n * (n - 1) / 2).map(|_| rng.random_bool(density)).collect();
            let adj = adj_from(n, &bits);
            let c = max_clique(&adj);
            prop_assert_eq!(c.len(), brute_force_clique_size(&adj));
            for (a, &i) in c.iter().enumerate() {
                for &j in &c[a + 1..] {
                    prop_assert!(adj[i][j]);
                }
            }
        }
    }
}
