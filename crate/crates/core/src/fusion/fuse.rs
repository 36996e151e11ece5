use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Record fields contributing a block to the fused row, in layout order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    SubCom,
    Mode,
    Reason,
    Decision,
    Effect,
}

impl Field {
    pub const ALL: [Field; 5] = [
        Field::SubCom,
        Field::Mode,
        Field::Reason,
        Field::Decision,
        Field::Effect,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Field::SubCom => "sub_com",
            Field::Mode => "failure_mode",
            Field::Reason => "failure_reason",
            Field::Decision => "emergency_measure",
            Field::Effect => "failure_effect",
        }
    }
}

/// Per-record vectors for the five fused fields. Mode and reason are the
/// already reduced projections.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RecordBlocks {
    pub id: String,
    pub sub_com: Option<Vec<f64>>,
    pub mode: Option<Vec<f64>>,
    pub reason: Option<Vec<f64>>,
    pub decision: Option<Vec<f64>>,
    pub effect: Option<Vec<f64>>,
}

impl RecordBlocks {
    fn block(&self, field: Field) -> Option<&[f64]> {
        match field {
            Field::SubCom => self.sub_com.as_deref(),
            Field::Mode => self.mode.as_deref(),
            Field::Reason => self.reason.as_deref(),
            Field::Decision => self.decision.as_deref(),
            Field::Effect => self.effect.as_deref(),
        }
    }
}

/// Hierarchy weight shared by every record, attention and verb weights per record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionWeights {
    pub omega1: f64,
    pub omega2: Vec<f64>,
    pub omega3: Vec<f64>,
}

impl FusionWeights {
    pub fn ones(n: usize) -> Self {
        Self {
            omega1: 1.0,
            omega2: vec![1.0; n],
            omega3: vec![1.0; n],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusedFeatureMatrix {
    pub ids: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Width of each field block in layout order.
    pub block_widths: Vec<(Field, usize)>,
    pub standardized: bool,
}

impl FusedFeatureMatrix {
    pub fn width(&self) -> usize {
        self.block_widths.iter().map(|(_, w)| w).sum()
    }

    pub fn standardize(&mut self) -> Result<()> {
        standardize(&mut self.rows)?;
        self.standardized = true;
        Ok(())
    }
}

/// Row width for a sub-com block of `d_sub`, two reduced blocks of `k` and two
/// sentence blocks of `d_sentence`.
pub fn fused_width(d_sub: usize, k: usize, d_sentence: usize) -> usize {
    d_sub + 2 * k + 2 * d_sentence
}

/// Weighted concatenation `[sub_com*w1 | mode*w2 | reason*w2 | decision*w3 | effect*w3]`.
pub fn fuse(records: &[RecordBlocks], weights: &FusionWeights) -> Result<FusedFeatureMatrix> {
    let n = records.len();
    if weights.omega2.len() != n || weights.omega3.len() != n {
        return Err(Error::Shape(format!(
            "{n} records but {} attention and {} verb weights",
            weights.omega2.len(),
            weights.omega3.len()
        )));
    }
    for r in records {
        for f in Field::ALL {
            if r.block(f).is_none() {
                return Err(Error::Assembly(format!(
                    "record {} is missing its {} block",
                    r.id,
                    f.tag()
                )));
            }
        }
    }
    let block_widths: Vec<(Field, usize)> = match records.first() {
        Some(r) => Field::ALL
            .iter()
            .map(|&f| (f, r.block(f).map_or(0, <[f64]>::len)))
            .collect(),
        None => Field::ALL.iter().map(|&f| (f, 0)).collect(),
    };
    let mut rows = Vec::with_capacity(n);
    for (i, r) in records.iter().enumerate() {
        let mut row = Vec::with_capacity(block_widths.iter().map(|b| b.1).sum());
        for &(f, w) in &block_widths {
            let block = r.block(f).unwrap_or_default();
            if block.len() != w {
                return Err(Error::Shape(format!(
                    "record {} has a {} block of width {}, expected {w}",
                    r.id,
                    f.tag(),
                    block.len()
                )));
            }
            let scale = match f {
                Field::SubCom => weights.omega1,
                Field::Mode | Field::Reason => weights.omega2[i],
                Field::Decision | Field::Effect => weights.omega3[i],
            };
            row.extend(block.iter().map(|x| x * scale));
        }
        rows.push(row);
    }
    Ok(FusedFeatureMatrix {
        ids: records.iter().map(|r| r.id.clone()).collect(),
        rows,
        block_widths,
        standardized: false,
    })
}

/// Column-wise z-score with population standard deviation; constant columns
/// become zero.
pub fn standardize(rows: &mut [Vec<f64>]) -> Result<()> {
    if rows.len() < 2 {
        return Err(Error::Shape(format!(
            "standardization needs at least 2 rows, got {}",
            rows.len()
        )));
    }
    let d = rows[0].len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(Error::Shape("rows differ in length".into()));
    }
    let n = rows.len() as f64;
    for c in 0..d {
        let mean = rows.iter().map(|r| r[c]).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r[c] - mean).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        // relative test so that float noise around a constant column is not amplified
        let constant = sd <= 1e-12 * mean.abs().max(1e-300) || sd == 0.0;
        for r in rows.iter_mut() {
            r[c] = if constant { 0.0 } else { (r[c] - mean) / sd };
        }
    }
    Ok(())
}
