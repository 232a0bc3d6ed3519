use super::{Digraph, Vertex};

/// Bitset adjacency over positions `0..n`, `n <= 64`; position `i` stands
/// for `ids[i]`, and ids stay sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Dense {
    pub ids: Vec<Vertex>,
    pub out: Vec<u64>,
    pub inn: Vec<u64>,
}

#[inline]
pub(crate) fn bit(i: usize) -> u64 {
    1u64 << i
}

#[inline]
pub(crate) fn full(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Drops bit `i` from `mask`, shifting higher bits down by one.
#[inline]
pub(crate) fn squeeze(mask: u64, i: usize) -> u64 {
    let low = mask & (bit(i) - 1);
    let high = if i + 1 >= 64 {
        0
    } else {
        (mask >> (i + 1)) << i
    };
    low | high
}

impl Dense {
    pub fn from_digraph(g: &Digraph) -> Self {
        let ids: Vec<Vertex> = g.vertices().collect();
        assert!(
            ids.len() <= 64,
            "dense representation holds at most 64 vertices"
        );
        let pos = |v: Vertex| ids.binary_search(&v).expect("vertex present");
        let n = ids.len();
        let mut out = vec![0u64; n];
        let mut inn = vec![0u64; n];
        for (u, v) in g.arcs() {
            let (i, j) = (pos(u), pos(v));
            out[i] |= bit(j);
            inn[j] |= bit(i);
        }
        Dense { ids, out, inn }
    }

    #[cfg(test)]
    pub fn to_digraph(&self) -> Digraph {
        let mut g = Digraph::with_vertices(self.ids.iter().copied());
        for i in 0..self.n() {
            let mut m = self.out[i];
            while m != 0 {
                let j = m.trailing_zeros() as usize;
                m &= m - 1;
                g.insert_arc(self.ids[i], self.ids[j]);
            }
        }
        g
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn arc_count(&self) -> usize {
        self.out.iter().map(|m| m.count_ones() as usize).sum()
    }

    pub fn has(&self, i: usize, j: usize) -> bool {
        self.out[i] & bit(j) != 0
    }

    fn add(&mut self, i: usize, j: usize) {
        if i != j {
            self.out[i] |= bit(j);
            self.inn[j] |= bit(i);
        }
    }

    /// Removes position `i`, renumbering later positions.
    pub fn remove(&mut self, i: usize) {
        self.ids.remove(i);
        self.out.remove(i);
        self.inn.remove(i);
        for m in self.out.iter_mut().chain(self.inn.iter_mut()) {
            *m = squeeze(*m, i);
        }
    }

    /// Out-contraction of `(i, j)`: in-arcs of `i` move to `j`, then `i` goes.
    pub fn out_contract(&self, i: usize, j: usize) -> Dense {
        let mut d = self.clone();
        let mut preds = d.inn[i] & !bit(j);
        while preds != 0 {
            let x = preds.trailing_zeros() as usize;
            preds &= preds - 1;
            d.add(x, j);
        }
        d.remove(i);
        d
    }

    /// In-contraction of `(i, j)`: out-arcs of `j` move to `i`, then `j` goes.
    pub fn in_contract(&self, i: usize, j: usize) -> Dense {
        let mut d = self.clone();
        let mut succs = d.out[j] & !bit(i);
        while succs != 0 {
            let x = succs.trailing_zeros() as usize;
            succs &= succs - 1;
            d.add(i, x);
        }
        d.remove(j);
        d
    }

    /// Contracts the vertex set `cycle` (positions) into a fresh vertex whose id
    /// is one past the current maximum; it lands at the last position.
    pub fn contract_set(&self, cycle: u64) -> Dense {
        let n = self.n();
        let fresh = self.ids.last().map_or(0, |m| m + 1);
        let mut ids = Vec::with_capacity(n + 1);
        let mut out = Vec::with_capacity(n + 1);
        let mut inn = Vec::with_capacity(n + 1);
        let mut w_out = 0u64;
        let mut w_in = 0u64;
        for i in 0..n {
            if cycle & bit(i) != 0 {
                w_out |= self.out[i];
                w_in |= self.inn[i];
            }
        }
        w_out &= !cycle;
        w_in &= !cycle;
        let keep: Vec<usize> = (0..n).filter(|&i| cycle & bit(i) == 0).collect();
        let k = keep.len();
        let remap = |m: u64| -> u64 {
            let mut r = 0u64;
            for (p, &i) in keep.iter().enumerate() {
                if m & bit(i) != 0 {
                    r |= bit(p);
                }
            }
            r
        };
        for &i in &keep {
            ids.push(self.ids[i]);
            let mut o = remap(self.out[i]);
            let mut n_in = remap(self.inn[i]);
            if self.out[i] & cycle != 0 {
                o |= bit(k);
            }
            if self.inn[i] & cycle != 0 {
                n_in |= bit(k);
            }
            out.push(o);
            inn.push(n_in);
        }
        ids.push(fresh);
        out.push(remap(w_out));
        inn.push(remap(w_in));
        Dense { ids, out, inn }
    }

    /// Positions reachable from `sources` through `allowed` (sources included).
    pub fn reach_within(&self, sources: u64, allowed: u64) -> u64 {
        let mut seen = sources;
        let mut frontier = sources;
        while frontier != 0 {
            let mut next = 0u64;
            let mut f = frontier;
            while f != 0 {
                let i = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= self.out[i];
            }
            next &= allowed & !seen;
            seen |= next;
            frontier = next;
        }
        seen
    }

    /// Size of the largest strongly connected component.
    pub fn largest_scc(&self) -> usize {
        let n = self.n();
        let all = full(n);
        let mut assigned = 0u64;
        let mut best = 0;
        for i in 0..n {
            if assigned & bit(i) != 0 {
                continue;
            }
            let fwd = self.reach_within(bit(i), all);
            let bwd = self.reach_back(bit(i), all);
            let comp = fwd & bwd;
            assigned |= comp;
            best = best.max(comp.count_ones() as usize);
        }
        best
    }

    fn reach_back(&self, sources: u64, allowed: u64) -> u64 {
        let mut seen = sources;
        let mut frontier = sources;
        while frontier != 0 {
            let mut next = 0u64;
            let mut f = frontier;
            while f != 0 {
                let i = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= self.inn[i];
            }
            next &= allowed & !seen;
            seen |= next;
            frontier = next;
        }
        seen
    }

    /// Simple directed cycles as position sequences; each cycle is reported
    /// once, starting at its smallest position.
    pub fn simple_cycles(&self, limit: usize) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut found = Vec::new();
        let mut path = Vec::new();
        for start in 0..n {
            // only positions > start may appear after the root
            let allowed = (full(n) & !full(start + 1)) | bit(start);
            path.clear();
            path.push(start);
            self.cycles_from(
                start,
                start,
                allowed,
                bit(start),
                &mut path,
                &mut found,
                limit,
            );
            if found.len() >= limit {
                break;
            }
        }
        found
    }

    #[allow(clippy::too_many_arguments)]
    fn cycles_from(
        &self,
        root: usize,
        at: usize,
        allowed: u64,
        on_path: u64,
        path: &mut Vec<usize>,
        found: &mut Vec<Vec<usize>>,
        limit: usize,
    ) {
        let mut succ = self.out[at] & allowed;
        while succ != 0 {
            if found.len() >= limit {
                return;
            }
            let j = succ.trailing_zeros() as usize;
            succ &= succ - 1;
            if j == root {
                if path.len() >= 2 {
                    found.push(path.clone());
                }
            } else if on_path & bit(j) == 0 {
                path.push(j);
                self.cycles_from(root, j, allowed, on_path | bit(j), path, found, limit);
                path.pop();
            }
        }
    }
}
