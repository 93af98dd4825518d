use std::ops::Range;

use super::vsm::SentenceMatch;

/// A connected group of matched sentence pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchCluster {
    pub susp: Range<usize>,
    pub src: Range<usize>,
    pub pairs: usize,
    pub sim_sum: f64,
}

impl MatchCluster {
    pub fn mean_sim(&self) -> f64 {
        self.sim_sum / self.pairs as f64
    }
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins so the result does not depend on visit order
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Joins matches whose sentence indices differ by at most `1 + merge_gap` on
/// both sides, then reports each connected component as the bounding box of
/// its pairs. Output is sorted by `(susp.start, src.start)`.
pub fn merge_matches(matches: &[SentenceMatch], merge_gap: usize) -> Vec<MatchCluster> {
    let reach = 1 + merge_gap;
    let mut order: Vec<usize> = (0..matches.len()).collect();
    order.sort_by_key(|&k| (matches[k].susp, matches[k].src));
    let mut dsu = Dsu((0..matches.len()).collect());
    for (pos, &a) in order.iter().enumerate() {
        for &b in &order[pos + 1..] {
            if matches[b].susp - matches[a].susp > reach {
                break;
            }
            if matches[a].src.abs_diff(matches[b].src) <= reach {
                dsu.union(a, b);
            }
        }
    }

    let mut slots: Vec<Option<MatchCluster>> = vec![None; matches.len()];
    for (k, m) in matches.iter().enumerate() {
        let root = dsu.find(k);
        match &mut slots[root] {
            Some(c) => {
                c.susp.start = c.susp.start.min(m.susp);
                c.susp.end = c.susp.end.max(m.susp + 1);
                c.src.start = c.src.start.min(m.src);
                c.src.end = c.src.end.max(m.src + 1);
                c.pairs += 1;
                c.sim_sum += m.sim;
            }
            slot @ None => {
                *slot = Some(MatchCluster {
                    susp: m.susp..m.susp + 1,
                    src: m.src..m.src + 1,
                    pairs: 1,
                    sim_sum: m.sim,
                })
            }
        }
    }
    let mut out: Vec<MatchCluster> = slots.into_iter().flatten().collect();
    out.sort_by_key(|c| (c.susp.start, c.src.start, c.susp.end, c.src.end));
    out
}
