#![allow(dead_code)]

//! Independent oracles shared by the integration tests.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use qmtree::bruhat_tits::TreeVertex;

fn squarefree_part(mut n: i64) -> i64 {
    let sign = n.signum();
    n = n.abs();
    let mut out = 1;
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e % 2 == 1 {
            out *= p;
        }
        p += 1;
    }
    sign * out * n
}

fn val(mut n: i64, p: i64) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Whether `z² = a·x² + b·y²` has a nontrivial solution over `Q_p`, by
/// exhaustive search modulo `p^m` with a Hensel-liftable witness.
///
/// After reducing to squarefree `a, b` a primitive solution exists iff one
/// exists modulo `p^m` whose gradient has valuation `k` with `2k + 1 ≤ m`;
/// `k ≤ 1` for odd `p` and `k ≤ 2` for `p = 2`, which fixes `m`.
pub fn padic_solvable(a: i64, b: i64, p: i64) -> bool {
    let a = squarefree_part(a);
    let b = squarefree_part(b);
    let m: u32 = if p == 2 {
        5
    } else if a % p != 0 && b % p != 0 {
        1
    } else {
        3
    };
    let q = p.pow(m);
    let f = |x: i64, y: i64, z: i64, modulus: i64| -> bool {
        let v = (z * z - a * x * x - b * y * y).rem_euclid(modulus);
        v == 0
    };
    let grad_val = |x: i64, y: i64, z: i64| -> u32 {
        [2 * a * x, 2 * b * y, 2 * z]
            .iter()
            .map(|&g| val(g.rem_euclid(q), p))
            .min()
            .unwrap()
    };
    // projective charts: the first coordinate that is a unit is 1
    for chart in 0..3 {
        // solutions modulo p^j of the two free coordinates
        let mut level: Vec<(i64, i64)> = vec![(0, 0)];
        let mut modulus = 1;
        for _ in 0..m {
            let next_mod = modulus * p;
            let mut next = Vec::new();
            for &(u, w) in &level {
                for du in 0..p {
                    for dw in 0..p {
                        let (u2, w2) = (u + du * modulus, w + dw * modulus);
                        let (x, y, z) = match chart {
                            0 => (1, u2, w2),
                            1 => (u2, 1, w2),
                            _ => (u2, w2, 1),
                        };
                        // earlier coordinates must be non-units in later charts
                        let ok_chart = match chart {
                            0 => true,
                            1 => x % p == 0,
                            _ => x % p == 0 && y % p == 0,
                        };
                        if ok_chart && f(x, y, z, next_mod) {
                            next.push((u2, w2));
                        }
                    }
                }
            }
            level = next;
            modulus = next_mod;
            if level.is_empty() {
                break;
            }
        }
        for &(u, w) in &level {
            let (x, y, z) = match chart {
                0 => (1, u, w),
                1 => (u, 1, w),
                _ => (u, w, 1),
            };
            if 2 * grad_val(x, y, z) < m {
                return true;
            }
        }
    }
    false
}

/// Hop count by breadth-first search through `neighbors` only.
pub fn bfs_distance(u: &TreeVertex, v: &TreeVertex, limit: u32) -> Option<u32> {
    let mut seen = BTreeSet::from([u.clone()]);
    let mut queue = VecDeque::from([(u.clone(), 0)]);
    while let Some((x, d)) = queue.pop_front() {
        if &x == v {
            return Some(d);
        }
        if d == limit {
            continue;
        }
        for y in x.neighbors() {
            if seen.insert(y.clone()) {
                queue.push_back((y, d + 1));
            }
        }
    }
    None
}

/// All permutations `π` of `0..n` with `dist[π(i)][π(j)] = dist[i][j]` and
/// `marked` mapped onto itself.
pub fn isometries(dist: &[Vec<u32>], marked: &BTreeSet<usize>) -> Vec<Vec<usize>> {
    let n = dist.len();
    let mut out = Vec::new();
    let mut perm = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        i: usize,
        dist: &[Vec<u32>],
        marked: &BTreeSet<usize>,
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let n = dist.len();
        if i == n {
            out.push(perm.clone());
            return;
        }
        for c in 0..n {
            if used[c] || marked.contains(&i) != marked.contains(&c) {
                continue;
            }
            if (0..i).all(|j| dist[perm[j]][c] == dist[j][i]) {
                perm[i] = c;
                used[c] = true;
                go(i + 1, dist, marked, perm, used, out);
                used[c] = false;
            }
        }
        perm[i] = usize::MAX;
    }
    go(0, dist, marked, &mut perm, &mut used, &mut out);
    out
}

/// Deterministic xorshift stream for building random scenarios without
/// touching the library's own seeded generator.
pub struct XorShift(pub u64);

impl XorShift {
    pub fn next(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }

    pub fn shuffle<T>(&mut self, v: &mut [T]) {
        for i in (1..v.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            v.swap(i, j);
        }
    }
}

/// The vertices within distance `r` of the edge `{u, w}` as a rooted
/// structure: `children[x]` lists the neighbors of `x` away from the edge.
pub struct EdgeBall {
    pub vertices: Vec<TreeVertex>,
    pub side: Vec<usize>,
    pub depth: Vec<u32>,
    pub children: Vec<Vec<usize>>,
}

pub fn edge_ball(u: &TreeVertex, w: &TreeVertex, r: u32) -> EdgeBall {
    let mut vertices = vec![u.clone(), w.clone()];
    let mut side = vec![0, 1];
    let mut depth = vec![0, 0];
    let mut children = vec![Vec::new(), Vec::new()];
    let mut index: BTreeMap<TreeVertex, usize> = BTreeMap::new();
    index.insert(u.clone(), 0);
    index.insert(w.clone(), 1);
    let mut queue = VecDeque::from([0usize, 1]);
    while let Some(x) = queue.pop_front() {
        if depth[x] == r {
            continue;
        }
        for y in vertices[x].neighbors() {
            if index.contains_key(&y) {
                continue;
            }
            let id = vertices.len();
            index.insert(y.clone(), id);
            vertices.push(y);
            side.push(side[x]);
            depth.push(depth[x] + 1);
            children.push(Vec::new());
            children[x].push(id);
            queue.push_back(id);
        }
    }
    EdgeBall { vertices, side, depth, children }
}

impl EdgeBall {
    /// A random involutive automorphism, swapping the two sides when `swap`
    /// is set.
    pub fn random_involution(&self, rng: &mut XorShift, swap: bool) -> Vec<usize> {
        let mut image = vec![usize::MAX; self.vertices.len()];
        if swap {
            self.pair(0, 1, rng, &mut image);
        } else {
            self.fix(0, rng, &mut image);
            self.fix(1, rng, &mut image);
        }
        image
    }

    /// Exchanges the subtrees below `a` and `b`.
    fn pair(&self, a: usize, b: usize, rng: &mut XorShift, image: &mut [usize]) {
        image[a] = b;
        image[b] = a;
        let mut targets = self.children[b].clone();
        rng.shuffle(&mut targets);
        for (&c, t) in self.children[a].iter().zip(targets) {
            self.pair(c, t, rng, image);
        }
    }

    /// Fixes `x` and acts as a random involution below it.
    fn fix(&self, x: usize, rng: &mut XorShift, image: &mut [usize]) {
        image[x] = x;
        let mut kids = self.children[x].clone();
        rng.shuffle(&mut kids);
        let mut rest = kids.as_slice();
        while let Some((&c, tail)) = rest.split_first() {
            match tail.split_first() {
                Some((&d, tail2)) if rng.below(2) == 1 => {
                    self.pair(c, d, rng, image);
                    rest = tail2;
                }
                _ => {
                    self.fix(c, rng, image);
                    rest = tail;
                }
            }
        }
    }
}

/// Pairwise hop counts through `neighbors` only.
pub fn bfs_distance_matrix(vertices: &[TreeVertex]) -> Vec<Vec<u32>> {
    let n = vertices.len();
    let mut out = vec![vec![0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = bfs_distance(&vertices[i], &vertices[j], 64).expect("connected");
            out[i][j] = d;
            out[j][i] = d;
        }
    }
    out
}

/// Members of `s` minimizing the eccentricity with respect to `s`, over the
/// index set `0..dist.len()` (which must contain the spanned subtree).
pub fn eccentricity_center(dist: &[Vec<u32>], s: &[usize]) -> Vec<usize> {
    let ecc: Vec<u32> = (0..dist.len()).map(|x| s.iter().map(|&m| dist[x][m]).max().unwrap()).collect();
    let best = *ecc.iter().min().unwrap();
    (0..dist.len()).filter(|&x| ecc[x] == best).collect()
}

/// Vertices on some geodesic between members of `s`.
pub fn hull(dist: &[Vec<u32>], s: &[usize]) -> Vec<usize> {
    (0..dist.len())
        .filter(|&x| {
            s.iter().any(|&u| s.iter().any(|&v| dist[u][x] + dist[x][v] == dist[u][v]))
        })
        .collect()
}

/// Checks `center` and `midpoint` on every subset of size `1..=max_size`
/// of the ball of radius `r` around the root, against the eccentricity
/// oracle and all isometries of the spanned subtree fixing the subset.
/// Returns the number of subsets examined.
pub fn center_sweep(ell: u64, r: u32, max_size: usize) -> Result<usize, String> {
    use qmtree::bruhat_tits::ball;
    use qmtree::center::{center, midpoint, Center};

    let vertices = ball(&TreeVertex::root(ell), r);
    let dist = bfs_distance_matrix(&vertices);
    let n = vertices.len();
    let mut checked = 0;
    let mut subset = Vec::new();
    fn rec(
        start: usize,
        n: usize,
        max_size: usize,
        subset: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> Result<(), String>,
    ) -> Result<(), String> {
        if !subset.is_empty() {
            visit(subset)?;
        }
        if subset.len() == max_size {
            return Ok(());
        }
        for i in start..n {
            subset.push(i);
            rec(i + 1, n, max_size, subset, visit)?;
            subset.pop();
        }
        Ok(())
    }
    let index_of = |v: &TreeVertex| vertices.iter().position(|x| x == v).expect("center inside the ball");
    let mut visit = |s: &[usize]| -> Result<(), String> {
        checked += 1;
        let members: Vec<TreeVertex> = s.iter().map(|&i| vertices[i].clone()).collect();
        let c = center(&members).map_err(|e| e.to_string())?;
        let c_idx: BTreeSet<usize> = c.vertices().into_iter().map(index_of).collect();
        let oracle: BTreeSet<usize> = eccentricity_center(&dist, s).into_iter().collect();
        if c_idx != oracle {
            return Err(format!("{members:?}: center {c} but eccentricity minimizers {oracle:?}"));
        }
        let diam = s.iter().flat_map(|&u| s.iter().map(move |&v| (u, v))).map(|(u, v)| dist[u][v]).max().unwrap();
        for &u in s {
            for &v in s {
                if u < v && dist[u][v] == diam {
                    let m = midpoint(&vertices[u], &vertices[v]).map_err(|e| e.to_string())?;
                    if m != c {
                        return Err(format!("{members:?}: pair ({u},{v}) gives {m}, center is {c}"));
                    }
                }
            }
        }
        if s.len() == 1 && !matches!(c, Center::Vertex(_)) {
            return Err("singleton with an edge center".into());
        }
        let h = hull(&dist, s);
        let local: Vec<Vec<u32>> = h.iter().map(|&x| h.iter().map(|&y| dist[x][y]).collect()).collect();
        let marked: BTreeSet<usize> = (0..h.len()).filter(|&k| s.contains(&h[k])).collect();
        let c_local: BTreeSet<usize> = (0..h.len()).filter(|&k| c_idx.contains(&h[k])).collect();
        if c_local.len() != c_idx.len() {
            return Err(format!("{members:?}: center outside the spanned subtree"));
        }
        for pi in isometries(&local, &marked) {
            let moved: BTreeSet<usize> = c_local.iter().map(|&k| pi[k]).collect();
            if moved != c_local {
                return Err(format!("{members:?}: an isometry moves the center {c}"));
            }
        }
        Ok(())
    };
    rec(0, n, max_size, &mut subset, &mut visit)?;
    Ok(checked)
}
