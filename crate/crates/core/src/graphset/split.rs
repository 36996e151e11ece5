use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }

    pub fn parse(s: &str) -> Option<Split> {
        Split::ALL.into_iter().find(|x| x.name() == s)
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Fractions assigned to train, validation and test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train: 0.2,
            val: 0.2,
            test: 0.6,
        }
    }
}

impl SplitSpec {
    pub fn fractions(&self) -> [f64; 3] {
        [self.train, self.val, self.test]
    }

    pub fn validate(&self) -> Result<()> {
        let f = self.fractions();
        if f.iter().any(|x| !(0.0..=1.0).contains(x)) || (f.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(Error::Config(format!(
                "split fractions {f:?} must be in [0,1] and sum to 1"
            )));
        }
        Ok(())
    }
}

fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r
    } else {
        x
    }
}

/// Integer split sizes per class. Each cell is the floor or ceiling of
/// `class_size * fraction`, rows sum to the class size and column totals are
/// the largest-remainder rounding of the overall targets. Remainders are
/// placed by a max-flow over (class, split) cells with fractional parts.
pub fn split_counts(class_sizes: &[usize], spec: &SplitSpec) -> Result<Vec<[usize; 3]>> {
    spec.validate()?;
    let f = spec.fractions();
    let n_total: usize = class_sizes.iter().sum();
    let targets: Vec<[f64; 3]> = class_sizes
        .iter()
        .map(|&n| [0, 1, 2].map(|s| snap(n as f64 * f[s])))
        .collect();
    let mut counts: Vec<[usize; 3]> = targets
        .iter()
        .map(|t| t.map(|x| x.floor() as usize))
        .collect();
    let row_rem: Vec<usize> = class_sizes
        .iter()
        .zip(&counts)
        .map(|(&n, c)| n - c.iter().sum::<usize>())
        .collect();

    // column totals by largest remainder
    let col_target: [f64; 3] = [0, 1, 2].map(|s| snap(n_total as f64 * f[s]));
    let mut col_total = col_target.map(|x| x.floor() as usize);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| {
        (col_target[b] - col_target[b].floor())
            .total_cmp(&(col_target[a] - col_target[a].floor()))
            .then(a.cmp(&b))
    });
    let mut short = n_total - col_total.iter().sum::<usize>();
    for &s in order.iter().cycle() {
        if short == 0 {
            break;
        }
        col_total[s] += 1;
        short -= 1;
    }
    let floor_cols: [usize; 3] = [0, 1, 2].map(|s| counts.iter().map(|c| c[s]).sum());
    let col_rem: [usize; 3] = [0, 1, 2].map(|s| col_total[s].saturating_sub(floor_cols[s]));

    // nodes: 0 source, 1..=C classes, C+1..=C+3 splits, C+4 sink
    let c = class_sizes.len();
    let nodes = c + 5;
    let sink = c + 4;
    let mut cap = vec![vec![0i64; nodes]; nodes];
    for i in 0..c {
        cap[0][1 + i] = row_rem[i] as i64;
        for s in 0..3 {
            if targets[i][s].fract() > 0.0 {
                cap[1 + i][c + 1 + s] = 1;
            }
        }
    }
    for s in 0..3 {
        cap[c + 1 + s][sink] = col_rem[s] as i64;
    }
    let flow = max_flow(&mut cap, 0, sink);
    let needed: usize = row_rem.iter().sum();
    for i in 0..c {
        for s in 0..3 {
            // a used unit edge has its forward capacity drained to zero
            if targets[i][s].fract() > 0.0 && cap[1 + i][c + 1 + s] == 0 {
                counts[i][s] += 1;
            }
        }
    }
    if flow as usize != needed {
        // column totals cannot all be met; finish rows by largest fraction
        log::warn!(
            "controlled rounding fell short by {} units",
            needed - flow as usize
        );
        for i in 0..c {
            let mut left = class_sizes[i] - counts[i].iter().sum::<usize>();
            let mut order = [0usize, 1, 2];
            order.sort_by(|&a, &b| {
                targets[i][b]
                    .fract()
                    .total_cmp(&targets[i][a].fract())
                    .then(a.cmp(&b))
            });
            for &s in &order {
                if left == 0 {
                    break;
                }
                if (counts[i][s] as f64) < targets[i][s].ceil() {
                    counts[i][s] += 1;
                    left -= 1;
                }
            }
        }
    }
    Ok(counts)
}

/// Edmonds-Karp on a dense capacity matrix; leaves residual capacities in `cap`.
fn max_flow(cap: &mut [Vec<i64>], source: usize, sink: usize) -> i64 {
    let n = cap.len();
    let mut total = 0;
    loop {
        let mut prev = vec![usize::MAX; n];
        prev[source] = source;
        let mut queue = std::collections::VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if prev[v] == usize::MAX && cap[u][v] > 0 {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if prev[sink] == usize::MAX {
            return total;
        }
        let mut bottleneck = i64::MAX;
        let mut v = sink;
        while v != source {
            let u = prev[v];
            bottleneck = bottleneck.min(cap[u][v]);
            v = u;
        }
        let mut v = sink;
        while v != source {
            let u = prev[v];
            cap[u][v] -= bottleneck;
            cap[v][u] += bottleneck;
            v = u;
        }
        total += bottleneck;
    }
}

/// Stratified assignment: members of each class are shuffled with a seeded
/// generator and cut at the sizes from [`split_counts`].
pub fn stratified_split<S: AsRef<str> + Ord>(
    ids: &[S],
    labels: &[usize],
    spec: &SplitSpec,
    seed: u64,
) -> Result<Vec<Split>> {
    if ids.len() != labels.len() {
        return Err(Error::Shape(format!(
            "{} ids vs {} labels",
            ids.len(),
            labels.len()
        )));
    }
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &l) in labels.iter().enumerate() {
        members[l].push(i);
    }
    let sizes: Vec<usize> = members.iter().map(Vec::len).collect();
    let counts = split_counts(&sizes, spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![Split::Train; ids.len()];
    for (class, mut idx) in members.into_iter().enumerate() {
        idx.sort_by(|&a, &b| ids[a].as_ref().cmp(ids[b].as_ref()));
        idx.shuffle(&mut rng);
        let [tr, va, _] = counts[class];
        for (pos, &i) in idx.iter().enumerate() {
            out[i] = if pos < tr {
                Split::Train
            } else if pos < tr + va {
                Split::Val
            } else {
                Split::Test
            };
        }
    }
    Ok(out)
}
