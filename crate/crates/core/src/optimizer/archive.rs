use super::fitness::Objectives;

/// Non-dominated set of evaluated combinations.
#[derive(Debug, Clone, Default)]
pub struct ParetoArchive {
    entries: Vec<(Vec<usize>, Objectives)>,
}

impl ParetoArchive {
    /// Insert unless dominated or already present; evicts entries the new
    /// point dominates. Returns whether the point was added.
    pub fn insert(&mut self, combo: &[usize], obj: Objectives) -> bool {
        if self
            .entries
            .iter()
            .any(|(c, o)| o.dominates(&obj) || c.as_slice() == combo)
        {
            return false;
        }
        self.entries.retain(|(_, o)| !obj.dominates(o));
        self.entries.push((combo.to_vec(), obj));
        true
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn best_relevance(&self) -> Option<(&[usize], Objectives)> {
        self.entries
            .iter()
            .max_by(|a, b| {
                a.1.f2
                    .total_cmp(&b.1.f2)
                    .then(b.1.f1.total_cmp(&a.1.f1))
                    .then_with(|| b.0.cmp(&a.0))
            })
            .map(|(c, o)| (c.as_slice(), *o))
    }

    pub fn min_balance(&self) -> Option<f64> {
        self.entries
            .iter()
            .map(|(_, o)| o.f1)
            .min_by(f64::total_cmp)
    }

    /// Entries ordered by `f1`, then descending `f2`, then combination.
    pub fn sorted(&self) -> Vec<(&[usize], Objectives)> {
        let mut v: Vec<_> = self
            .entries
            .iter()
            .map(|(c, o)| (c.as_slice(), *o))
            .collect();
        v.sort_by(|a, b| {
            a.1.f1
                .total_cmp(&b.1.f1)
                .then(b.1.f2.total_cmp(&a.1.f2))
                .then_with(|| a.0.cmp(b.0))
        });
        v
    }
}
