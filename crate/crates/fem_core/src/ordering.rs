use std::collections::VecDeque;

/// Reverse Cuthill–McKee ordering of the graph `adj` restricted to the
/// vertices with `include[v]`. Returns the included vertices in their new
/// order; each connected component starts from a pseudo-peripheral vertex.
pub fn reverse_cuthill_mckee(adj: &[Vec<usize>], include: &[bool]) -> Vec<usize> {
    let n = adj.len();
    let degree = |v: usize| adj[v].iter().filter(|&&w| include[w]).count();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut candidates: Vec<usize> = (0..n).filter(|&v| include[v]).collect();
    candidates.sort_by_key(|&v| (degree(v), v));
    for &seed in &candidates {
        if visited[seed] {
            continue;
        }
        let start = peripheral(adj, include, seed, &degree);
        visited[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| include[w] && !visited[w]).collect();
            next.sort_by_key(|&w| (degree(w), w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// BFS levels from `root` within its component.
fn levels(adj: &[Vec<usize>], include: &[bool], root: usize) -> Vec<Vec<usize>> {
    let mut seen = std::collections::HashSet::from([root]);
    let mut out = vec![vec![root]];
    loop {
        let mut next = Vec::new();
        for &v in out.last().unwrap() {
            for &w in &adj[v] {
                if include[w] && seen.insert(w) {
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            return out;
        }
        out.push(next);
    }
}

fn peripheral(adj: &[Vec<usize>], include: &[bool], seed: usize, degree: &dyn Fn(usize) -> usize) -> usize {
    let mut root = seed;
    let mut depth = levels(adj, include, root).len();
    for _ in 0..8 {
        let lv = levels(adj, include, root);
        let cand = *lv.last().unwrap().iter().min_by_key(|&&v| (degree(v), v)).unwrap();
        let d = levels(adj, include, cand).len();
        if d <= depth {
            break;
        }
        root = cand;
        depth = d;
    }
    root
}

/// Largest distance in the new numbering between adjacent included vertices.
pub fn bandwidth(adj: &[Vec<usize>], order: &[usize]) -> usize {
    let mut pos = vec![usize::MAX; adj.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    order
        .iter()
        .flat_map(|&v| adj[v].iter().filter(|&&w| pos[w] != usize::MAX).map(move |&w| (v, w)))
        .map(|(v, w)| pos[v].abs_diff(pos[w]))
        .max()
        .unwrap_or(0)
}
