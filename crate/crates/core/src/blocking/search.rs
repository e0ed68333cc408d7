//! Exact minimum hitting sets over the blocks of an [`Incidence`].
//!
//! The minimum size is found by branch and bound, branching on the points of
//! an uncovered block with the fewest candidates and pruning with a greedy
//! disjoint-block packing bound. A second pass walks point ids in ascending
//! order, include-first, to return the lexicographically least set of that
//! size (or every such set).

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::incidence::Incidence;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    /// Minimum size, or `None` when no hitting set fits within `max_size`.
    pub min: Option<usize>,
    /// Lexicographically least hitting set of minimum size.
    pub witness: Option<Vec<usize>>,
    pub nodes: u64,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SearchOptions {
    /// Only look for hitting sets of at most this size.
    pub max_size: Option<usize>,
    /// A proven lower bound; the search stops as soon as it is attained.
    pub lower_bound: usize,
}

struct State<'a> {
    inc: &'a Incidence,
    covered: Vec<u32>,
    uncovered: usize,
    chosen: Vec<usize>,
    forbidden: FixedBitSet,
    nodes: u64,
}

impl<'a> State<'a> {
    fn new(inc: &'a Incidence) -> State<'a> {
        State {
            inc,
            covered: vec![0; inc.blocks().len()],
            uncovered: inc.blocks().len(),
            chosen: Vec::new(),
            forbidden: FixedBitSet::with_capacity(inc.v()),
            nodes: 0,
        }
    }

    fn choose(&mut self, p: usize) {
        for &b in self.inc.blocks_through(p) {
            if self.covered[b] == 0 {
                self.uncovered -= 1;
            }
            self.covered[b] += 1;
        }
        self.chosen.push(p);
    }

    fn unchoose(&mut self) {
        let p = self.chosen.pop().expect("chosen point");
        for &b in self.inc.blocks_through(p) {
            self.covered[b] -= 1;
            if self.covered[b] == 0 {
                self.uncovered += 1;
            }
        }
    }

    fn covers_new(&self, p: usize) -> bool {
        self.inc.blocks_through(p).iter().any(|&b| self.covered[b] == 0)
    }

    /// Number of pairwise disjoint uncovered blocks, counting only points
    /// accepted by `allowed`; `None` if some uncovered block has no allowed
    /// point left.
    fn packing_bound(&self, allowed: impl Fn(usize) -> bool) -> Option<usize> {
        let mut used = FixedBitSet::with_capacity(self.inc.v());
        let mut count = 0;
        for (b, block) in self.inc.blocks().iter().enumerate() {
            if self.covered[b] != 0 {
                continue;
            }
            let mut any = false;
            let mut clash = false;
            for &p in block {
                if allowed(p) {
                    any = true;
                    clash |= used.contains(p);
                }
            }
            if !any {
                return None;
            }
            if !clash {
                count += 1;
                for &p in block {
                    if allowed(p) {
                        used.insert(p);
                    }
                }
            }
        }
        Some(count)
    }
}

fn greedy(inc: &Incidence) -> Vec<usize> {
    let mut st = State::new(inc);
    while st.uncovered > 0 {
        let best = (0..inc.v())
            .max_by_key(|&p| {
                let gain = inc.blocks_through(p).iter().filter(|&&b| st.covered[b] == 0).count();
                (gain, std::cmp::Reverse(p))
            })
            .expect("nonempty point set");
        st.choose(best);
    }
    let mut set = st.chosen;
    set.sort_unstable();
    set
}

struct MinSearch<'a> {
    st: State<'a>,
    best: usize,
    lower_bound: usize,
}

impl MinSearch<'_> {
    fn run(&mut self) {
        self.st.nodes += 1;
        if self.best <= self.lower_bound {
            return;
        }
        if self.st.uncovered == 0 {
            self.best = self.best.min(self.st.chosen.len());
            return;
        }
        let depth = self.st.chosen.len();
        if depth + 1 >= self.best {
            return;
        }
        let forbidden = &self.st.forbidden;
        match self.st.packing_bound(|p| !forbidden.contains(p)) {
            Some(lb) if depth + lb < self.best => {}
            _ => return,
        }
        let inc = self.st.inc;
        let (block, _) = inc
            .blocks()
            .iter()
            .enumerate()
            .filter(|(b, _)| self.st.covered[*b] == 0)
            .map(|(b, pts)| (b, pts.iter().filter(|&&p| !self.st.forbidden.contains(p)).count()))
            .min_by_key(|&(b, avail)| (avail, b))
            .expect("an uncovered block exists");
        let candidates: Vec<usize> = inc.blocks()[block]
            .iter()
            .copied()
            .filter(|&p| !self.st.forbidden.contains(p))
            .collect();
        let mut banned = Vec::new();
        for p in candidates {
            self.st.choose(p);
            self.run();
            self.st.unchoose();
            self.st.forbidden.insert(p);
            banned.push(p);
            if self.best <= self.lower_bound {
                break;
            }
        }
        for p in banned {
            self.st.forbidden.set(p, false);
        }
    }
}

struct LexSearch<'a> {
    st: State<'a>,
    size: usize,
    collect_all: bool,
    found: Vec<Vec<usize>>,
}

impl LexSearch<'_> {
    /// Returns true when the search should stop.
    fn run(&mut self, next: usize) -> bool {
        self.st.nodes += 1;
        if self.st.uncovered == 0 {
            self.found.push(self.st.chosen.clone());
            return !self.collect_all;
        }
        let budget = self.size - self.st.chosen.len();
        if budget == 0 || next == self.st.inc.v() {
            return false;
        }
        match self.st.packing_bound(|p| p >= next) {
            Some(lb) if lb <= budget => {}
            _ => return false,
        }
        // In a minimum hitting set every point covers some block first.
        if self.st.covers_new(next) {
            self.st.choose(next);
            let stop = self.run(next + 1);
            self.st.unchoose();
            if stop {
                return true;
            }
        }
        self.run(next + 1)
    }
}

/// Exact minimum hitting set with the lexicographically least witness.
pub fn min_hitting_set(inc: &Incidence, opts: SearchOptions) -> SearchResult {
    if inc.blocks().is_empty() {
        return SearchResult {
            min: Some(0),
            witness: Some(Vec::new()),
            nodes: 0,
        };
    }
    if inc.blocks().iter().any(|b| b.is_empty()) {
        return SearchResult {
            min: None,
            witness: None,
            nodes: 0,
        };
    }
    let initial = greedy(inc).len();
    let cap = opts.max_size.unwrap_or(usize::MAX - 1);
    // `best` is an exclusive bound: the search only accepts smaller sets.
    let known = initial <= cap;
    let mut search = MinSearch {
        st: State::new(inc),
        best: if known { initial } else { cap + 1 },
        lower_bound: opts.lower_bound,
    };
    search.run();
    let mut nodes = search.st.nodes;
    let min = search.best;
    if !known && min > cap {
        return SearchResult {
            min: None,
            witness: None,
            nodes,
        };
    }
    let (witness, n2) = lex_search(inc, min, false);
    nodes += n2;
    SearchResult {
        min: Some(min),
        witness: witness.into_iter().next(),
        nodes,
    }
}

fn lex_search(inc: &Incidence, size: usize, collect_all: bool) -> (Vec<Vec<usize>>, u64) {
    let mut search = LexSearch {
        st: State::new(inc),
        size,
        collect_all,
        found: Vec::new(),
    };
    search.run(0);
    (search.found, search.st.nodes)
}

/// All hitting sets of size `min`, in lexicographic order. `min` must be the
/// minimum hitting set size: larger sizes would also need redundant points,
/// which this enumeration skips.
pub fn all_minimum_hitting_sets(inc: &Incidence, min: usize) -> Vec<Vec<usize>> {
    lex_search(inc, min, true).0
}

/// True when every block meets `set`.
pub fn hits_all(inc: &Incidence, set: &[usize]) -> bool {
    let mut mark = FixedBitSet::with_capacity(inc.v());
    for &p in set {
        mark.insert(p);
    }
    inc.blocks().iter().all(|b| b.iter().any(|&p| mark.contains(p)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fano() -> Incidence {
        Incidence::new(
            7,
            vec![
                vec![0, 1, 2],
                vec![0, 3, 4],
                vec![0, 5, 6],
                vec![1, 3, 5],
                vec![1, 4, 6],
                vec![2, 3, 6],
                vec![2, 4, 5],
            ],
        )
        .unwrap()
    }

    fn brute_force_min(inc: &Incidence) -> (usize, Vec<usize>) {
        let v = inc.v();
        let mut best: Option<(usize, Vec<usize>)> = None;
        for mask in 0u32..(1 << v) {
            let set: Vec<usize> = (0..v).filter(|&i| mask & (1 << i) != 0).collect();
            if hits_all(inc, &set) {
                let cand = (set.len(), set);
                if best.as_ref().is_none_or(|b| cand < *b) {
                    best = Some(cand);
                }
            }
        }
        best.unwrap()
    }

    #[test]
    fn fano_plane_minimum_is_a_line() {
        let inc = fano();
        let r = min_hitting_set(&inc, SearchOptions::default());
        assert_eq!(r.min, Some(3));
        assert_eq!(r.witness, Some(vec![0, 1, 2]));
        let all = all_minimum_hitting_sets(&inc, 3);
        assert_eq!(all.len(), 7);
        assert_eq!(all, inc.blocks().to_vec());
    }

    #[test]
    fn max_size_cuts_off() {
        let inc = fano();
        let r = min_hitting_set(&inc, SearchOptions { max_size: Some(2), lower_bound: 0 });
        assert_eq!(r.min, None);
        let r = min_hitting_set(&inc, SearchOptions { max_size: Some(3), lower_bound: 0 });
        assert_eq!(r.min, Some(3));
        let r = min_hitting_set(&inc, SearchOptions { max_size: Some(5), lower_bound: 3 });
        assert_eq!(r.min, Some(3));
    }

    #[test]
    fn matches_brute_force_on_random_instances() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let v = rng.gen_range(3..12);
            let nb = rng.gen_range(1..15);
            let blocks = (0..nb)
                .map(|_| {
                    let mut b: Vec<usize> = (0..v).filter(|_| rng.gen_bool(0.3)).collect();
                    if b.is_empty() {
                        b.push(rng.gen_range(0..v));
                    }
                    b
                })
                .collect();
            let inc = Incidence::new(v, blocks).unwrap();
            let (size, set) = brute_force_min(&inc);
            let r = min_hitting_set(&inc, SearchOptions::default());
            assert_eq!(r.min, Some(size));
            assert_eq!(r.witness, Some(set));
        }
    }
}
