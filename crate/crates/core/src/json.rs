//! JSON documents for grids, functions, partitions, lattices and kernel
//! representations — the file formats the CLI reads and writes.
//!
//! Complex numbers serialize as `[re, im]`; multi-dimensional arrays are
//! flattened row-major (first axis outermost).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::approx_operator::{PartitionBox, PartitionSpec};
use crate::error::{Error, Result};
use crate::grid::{GridAxis, GridFunction, TensorGrid};
use crate::nuclear_ops::NuclearRep;
use crate::simple::{BoxRegion, SimpleFunction};
use crate::stft_gabor::{LatticeCoefficients, TFGridFunction};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxisDoc {
    pub points: Vec<f64>,
    pub measures: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridDoc {
    pub axes: Vec<AxisDoc>,
}

impl GridDoc {
    pub fn from_grid(grid: &TensorGrid) -> Self {
        Self {
            axes: grid
                .axes()
                .iter()
                .map(|ax| AxisDoc {
                    points: ax.points().to_vec(),
                    measures: ax.measures().to_vec(),
                })
                .collect(),
        }
    }

    pub fn to_grid(&self) -> Result<TensorGrid> {
        TensorGrid::new(
            self.axes
                .iter()
                .map(|ax| GridAxis::new(ax.points.clone(), ax.measures.clone()))
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

fn pack_complex(values: impl Iterator<Item = Complex64>) -> Vec<[f64; 2]> {
    values.map(|z| [z.re, z.im]).collect()
}

fn unpack_complex(values: &[[f64; 2]]) -> Vec<Complex64> {
    values.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridFunctionDoc {
    pub grid: GridDoc,
    /// Row-major flattened complex samples.
    pub values: Vec<[f64; 2]>,
}

impl GridFunctionDoc {
    pub fn from_parts(f: &GridFunction, grid: &TensorGrid) -> Self {
        Self {
            grid: GridDoc::from_grid(grid),
            values: pack_complex(f.values().iter().cloned()),
        }
    }

    pub fn to_parts(&self) -> Result<(GridFunction, TensorGrid)> {
        let grid = self.grid.to_grid()?;
        let shape = grid.shape();
        let expected: usize = shape.iter().product();
        if self.values.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "document has {} values but the grid has {expected} cells",
                self.values.len()
            )));
        }
        let values = ndarray::ArrayD::from_shape_vec(
            ndarray::IxDyn(&shape),
            unpack_complex(&self.values),
        )
        .expect("sized above");
        Ok((GridFunction::new(&grid, values)?, grid))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoxDoc {
    pub intervals: Vec<[usize; 2]>,
    pub coeff: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimpleFunctionDoc {
    pub grid: GridDoc,
    pub boxes: Vec<BoxDoc>,
}

impl SimpleFunctionDoc {
    pub fn from_parts(f: &SimpleFunction, grid: &TensorGrid) -> Self {
        Self {
            grid: GridDoc::from_grid(grid),
            boxes: f
                .boxes()
                .iter()
                .zip(f.coeffs())
                .map(|(b, c)| BoxDoc {
                    intervals: b.intervals().iter().map(|&(lo, hi)| [lo, hi]).collect(),
                    coeff: [c.re, c.im],
                })
                .collect(),
        }
    }

    pub fn to_parts(&self) -> Result<(SimpleFunction, TensorGrid)> {
        let grid = self.grid.to_grid()?;
        let mut boxes = Vec::with_capacity(self.boxes.len());
        let mut coeffs = Vec::with_capacity(self.boxes.len());
        for b in &self.boxes {
            let region =
                BoxRegion::new(b.intervals.iter().map(|&[lo, hi]| (lo, hi)).collect())?;
            region.check_on_grid(&grid)?;
            boxes.push(region);
            coeffs.push(Complex64::new(b.coeff[0], b.coeff[1]));
        }
        Ok((SimpleFunction::new(boxes, coeffs)?, grid))
    }
}

/// Either kind of sampled function, tagged.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionDoc {
    Grid(GridFunctionDoc),
    Simple(SimpleFunctionDoc),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TfDoc {
    pub x_axis: AxisDoc,
    pub xi_axis: AxisDoc,
    /// Row-major with the time axis outermost.
    pub values: Vec<[f64; 2]>,
}

impl TfDoc {
    pub fn from_tf(tf: &TFGridFunction) -> Self {
        Self {
            x_axis: AxisDoc {
                points: tf.x_axis().points().to_vec(),
                measures: tf.x_axis().measures().to_vec(),
            },
            xi_axis: AxisDoc {
                points: tf.xi_axis().points().to_vec(),
                measures: tf.xi_axis().measures().to_vec(),
            },
            values: pack_complex(tf.values().iter().cloned()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeDoc {
    pub alpha: f64,
    pub beta: f64,
    pub kmax: i64,
    pub lmax: i64,
    pub weight_tag: String,
    /// Row-major over `(k, l)`, `k` outermost.
    pub coeffs: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl LatticeDoc {
    pub fn from_lattice(a: &LatticeCoefficients) -> Self {
        Self {
            alpha: a.alpha(),
            beta: a.beta(),
            kmax: a.k_range().1,
            lmax: a.l_range().1,
            weight_tag: a.weight_tag().to_string(),
            coeffs: pack_complex(a.coeffs().iter().cloned()),
            weights: a.weights().iter().cloned().collect(),
        }
    }

    pub fn to_lattice(&self) -> Result<LatticeCoefficients> {
        LatticeCoefficients::from_parts(
            self.alpha,
            self.beta,
            self.kmax,
            self.lmax,
            unpack_complex(&self.coeffs),
            Some(self.weights.clone()),
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionBoxDoc {
    pub cell: Vec<usize>,
    #[serde(default = "one")]
    pub gamma: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionDoc {
    pub grid: GridDoc,
    /// Per-axis disjoint interval lists.
    pub axis_intervals: Vec<Vec<[usize; 2]>>,
    /// Selected boxes; omitted means every tensor cell with `γ = 1`.
    #[serde(default)]
    pub boxes: Option<Vec<PartitionBoxDoc>>,
}

impl PartitionDoc {
    pub fn to_parts(&self) -> Result<(PartitionSpec, TensorGrid)> {
        let grid = self.grid.to_grid()?;
        let intervals: Vec<Vec<(usize, usize)>> = self
            .axis_intervals
            .iter()
            .map(|axis| axis.iter().map(|&[lo, hi]| (lo, hi)).collect())
            .collect();
        let part = match &self.boxes {
            None => PartitionSpec::full_tensor(intervals, None)?,
            Some(boxes) => PartitionSpec::new(
                intervals,
                boxes
                    .iter()
                    .map(|b| PartitionBox {
                        cell: b.cell.clone(),
                        gamma: b.gamma,
                    })
                    .collect(),
            )?,
        };
        part.check_on_grid(&grid)?;
        Ok((part, grid))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorPairDoc {
    pub g: Vec<[f64; 2]>,
    pub h: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RepDoc {
    pub pairs: Vec<FactorPairDoc>,
}

impl RepDoc {
    pub fn from_rep(rep: &NuclearRep) -> Self {
        Self {
            pairs: rep
                .pairs()
                .iter()
                .map(|(g, h)| FactorPairDoc {
                    g: pack_complex(g.values().iter().cloned()),
                    h: pack_complex(h.values().iter().cloned()),
                })
                .collect(),
        }
    }

    /// Build a Hilbert-space representation over the given grid.
    pub fn to_rep(&self, grid: &TensorGrid) -> Result<NuclearRep> {
        let shape = grid.shape();
        let expected: usize = shape.iter().product();
        let mut pairs = Vec::with_capacity(self.pairs.len());
        for (i, p) in self.pairs.iter().enumerate() {
            if p.g.len() != expected || p.h.len() != expected {
                return Err(Error::DimensionMismatch(format!(
                    "factor pair {i} does not match the grid size {expected}"
                )));
            }
            let g = GridFunction::new(
                grid,
                ndarray::ArrayD::from_shape_vec(
                    ndarray::IxDyn(&shape),
                    unpack_complex(&p.g),
                )
                .expect("sized above"),
            )?;
            let h = GridFunction::new(
                grid,
                ndarray::ArrayD::from_shape_vec(
                    ndarray::IxDyn(&shape),
                    unpack_complex(&p.h),
                )
                .expect("sized above"),
            )?;
            pairs.push((g, h));
        }
        NuclearRep::hilbert(grid.clone(), pairs)
    }
}
