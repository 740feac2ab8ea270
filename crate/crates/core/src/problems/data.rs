use std::io::{BufRead, Write};

use crate::error::{contract, Error, Result};
use crate::linalg::io::read_table;
use crate::linalg::Matrix;
use crate::rng::RngStream;
use crate::scalar::Real;

/// `n` points in `R^m` with one response each.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet<T> {
    points: Matrix<T>,
    responses: Vec<T>,
}

impl<T: Real> DataSet<T> {
    pub fn new(points: Matrix<T>, responses: Vec<T>) -> Result<Self> {
        contract(points.rows() >= 1, || "a data set needs at least one point".into())?;
        if responses.len() != points.rows() {
            return Err(Error::DimensionMismatch {
                expected: points.rows(),
                found: responses.len(),
            });
        }
        contract(
            points.is_finite() && responses.iter().all(|v| v.is_finite()),
            || "data entries must be finite".into(),
        )?;
        Ok(Self { points, responses })
    }

    pub fn points(&self) -> &Matrix<T> {
        &self.points
    }

    pub fn responses(&self) -> &[T] {
        &self.responses
    }

    pub fn len(&self) -> usize {
        self.points.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn features(&self) -> usize {
        self.points.cols()
    }

    /// CSV with `m + 1` columns per row, the response last.
    pub fn read_csv<R: BufRead>(reader: R) -> Result<Self> {
        let rows = read_table(reader)?;
        if rows.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "no data rows".into(),
            });
        }
        let cols = rows[0].len();
        if cols < 2 {
            return Err(Error::Parse {
                line: 0,
                message: "need at least one feature column and the response".into(),
            });
        }
        let n = rows.len();
        let mut pts = Vec::with_capacity(n * (cols - 1));
        let mut y = Vec::with_capacity(n);
        for r in rows {
            pts.extend(r[..cols - 1].iter().map(|&v| T::lit(v)));
            y.push(T::lit(r[cols - 1]));
        }
        Self::new(Matrix::from_row_major(n, cols - 1, pts)?, y)
    }

    pub fn write_csv<W: Write>(&self, mut w: W, metadata: &[String]) -> Result<()> {
        for line in metadata {
            writeln!(w, "# {line}")?;
        }
        for i in 0..self.len() {
            let mut fields: Vec<String> = self.points.row(i).iter().map(|v| format!("{v:e}")).collect();
            fields.push(format!("{:e}", self.responses[i]));
            writeln!(w, "{}", fields.join(","))?;
        }
        Ok(())
    }
}

/// How responses are generated from points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResponseModel {
    /// `y = aᵀw + noise·ε` with `w ~ N(0, I)` drawn once per data set.
    Linear { noise: f64 },
    /// `y = sin(a_0) + noise·ε`.
    SineFirstCoordinate { noise: f64 },
}

impl Default for ResponseModel {
    fn default() -> Self {
        Self::SineFirstCoordinate { noise: 1.0 }
    }
}

const CENTER_STREAM: u64 = 1;
const WEIGHT_STREAM: u64 = 2;

fn responses<T: Real>(pts: &Matrix<T>, model: ResponseModel, rng: &mut RngStream) -> Vec<T> {
    let n = pts.rows();
    match model {
        ResponseModel::Linear { noise } => {
            let mut wrng = rng.substream(WEIGHT_STREAM);
            let w: Vec<f64> = (0..pts.cols()).map(|_| wrng.normal()).collect();
            (0..n)
                .map(|i| {
                    let clean: f64 = pts
                        .row(i)
                        .iter()
                        .zip(&w)
                        .map(|(a, b)| a.to_f64_lossy() * b)
                        .sum();
                    T::lit(clean + noise * rng.normal())
                })
                .collect()
        }
        ResponseModel::SineFirstCoordinate { noise } => (0..n)
            .map(|i| T::lit(pts[(i, 0)].to_f64_lossy().sin() + noise * rng.normal()))
            .collect(),
    }
}

/// `n` i.i.d. points from `N(0, η² I_m)`.
pub fn gaussian_data<T: Real>(
    n: usize,
    m: usize,
    eta: f64,
    model: ResponseModel,
    rng: &mut RngStream,
) -> Result<DataSet<T>> {
    contract(n >= 1 && m >= 1, || "n and m must be positive".into())?;
    contract(eta > 0.0, || format!("eta must be positive, got {eta}"))?;
    let pts = Matrix::from_fn(n, m, |_, _| T::lit(eta * rng.normal()));
    let y = responses(&pts, model, rng);
    DataSet::new(pts, y)
}

/// Equal-weight mixture: centers i.i.d. `N(0, separation² I)`, unit
/// within-cluster variance. Returns the data and each point's cluster.
pub fn gaussian_mixture_labeled<T: Real>(
    n: usize,
    m: usize,
    clusters: usize,
    separation: f64,
    model: ResponseModel,
    rng: &mut RngStream,
) -> Result<(DataSet<T>, Vec<usize>)> {
    contract(n >= clusters && clusters >= 1 && m >= 1, || {
        format!("need n >= clusters >= 1 and m >= 1, got n={n}, clusters={clusters}, m={m}")
    })?;
    contract(separation >= 0.0 && separation.is_finite(), || {
        format!("separation must be nonnegative, got {separation}")
    })?;
    let mut crng = rng.substream(CENTER_STREAM);
    let centers: Vec<Vec<f64>> = (0..clusters)
        .map(|_| (0..m).map(|_| separation * crng.normal()).collect())
        .collect();
    let labels: Vec<usize> = (0..n).map(|_| crng.below(clusters)).collect();
    let pts = Matrix::from_fn(n, m, |i, j| T::lit(centers[labels[i]][j] + rng.normal()));
    let y = responses(&pts, model, rng);
    Ok((DataSet::new(pts, y)?, labels))
}

pub fn gaussian_mixture_data<T: Real>(
    n: usize,
    m: usize,
    clusters: usize,
    separation: f64,
    model: ResponseModel,
    rng: &mut RngStream,
) -> Result<DataSet<T>> {
    gaussian_mixture_labeled(n, m, clusters, separation, model, rng).map(|(d, _)| d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cluster_reduces_to_gaussian() {
        for model in [
            ResponseModel::default(),
            ResponseModel::Linear { noise: 0.5 },
        ] {
            let a: DataSet<f64> =
                gaussian_mixture_data(50, 3, 1, 0.0, model, &mut RngStream::new(7, 3)).unwrap();
            let b: DataSet<f64> = gaussian_data(50, 3, 1.0, model, &mut RngStream::new(7, 3)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let gen = || {
            gaussian_mixture_data::<f64>(40, 2, 4, 3.0, ResponseModel::default(), &mut RngStream::new(1, 0))
                .unwrap()
        };
        assert_eq!(gen(), gen());
    }

    #[test]
    fn cluster_proportions() {
        let n = 8000;
        let (_, labels) = gaussian_mixture_labeled::<f64>(
            n,
            2,
            8,
            5.0,
            ResponseModel::default(),
            &mut RngStream::new(42, 0),
        )
        .unwrap();
        let mut counts = [0usize; 8];
        labels.iter().for_each(|&l| counts[l] += 1);
        let sd = (n as f64 * 0.125 * 0.875).sqrt();
        for c in counts {
            assert!((c as f64 - 1000.0).abs() <= 3.0 * sd, "count {c}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let d: DataSet<f64> =
            gaussian_data(5, 2, 1.0, ResponseModel::default(), &mut RngStream::new(3, 0)).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf, &["n=5".into()]).unwrap();
        let back = DataSet::<f64>::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn rejects_bad_shapes() {
        let pts = Matrix::<f64>::zeros(2, 1);
        assert!(DataSet::new(pts, vec![0.0]).is_err());
        let bad = "1.0,2.0\n3.0\n";
        assert!(matches!(
            DataSet::<f64>::read_csv(bad.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
