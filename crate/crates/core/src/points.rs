use serde::{Deserialize, Serialize};

/// An ordered collection of points in `R^d`, stored row-major in one buffer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Points {
    dim: usize,
    coords: Vec<f64>,
}

impl Points {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "points need dimension >= 1");
        Points {
            dim,
            coords: Vec::new(),
        }
    }

    /// Builds from a flat coordinate buffer; its length must be a multiple of `dim`.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Self {
        assert!(dim >= 1, "points need dimension >= 1");
        assert!(
            coords.len().is_multiple_of(dim),
            "flat buffer of length {} is not a multiple of dimension {}",
            coords.len(),
            dim
        );
        assert!(
            coords.iter().all(|c| c.is_finite()),
            "coordinates must be finite"
        );
        Points { dim, coords }
    }

    pub fn from_rows<R: AsRef<[f64]>>(dim: usize, rows: impl IntoIterator<Item = R>) -> Self {
        let mut points = Points::new(dim);
        for row in rows {
            points.push(row.as_ref());
        }
        points
    }

    /// Uniform grid with `resolution` points per axis on `[0, 1]^dim`.
    ///
    /// Coordinates are `i / (resolution - 1)`; the last axis varies fastest.
    pub fn grid(resolution: usize, dim: usize) -> Self {
        assert!(resolution >= 2, "grid resolution must be >= 2");
        assert!(dim >= 1, "grid dimension must be >= 1");
        let n = resolution.pow(dim as u32);
        let step = 1.0 / (resolution - 1) as f64;
        let mut coords = Vec::with_capacity(n * dim);
        for flat in 0..n {
            let mut rem = flat;
            let start = coords.len();
            coords.resize(start + dim, 0.0);
            for axis in (0..dim).rev() {
                coords[start + axis] = (rem % resolution) as f64 * step;
                rem /= resolution;
            }
        }
        Points { dim, coords }
    }

    pub fn push(&mut self, point: &[f64]) {
        assert_eq!(point.len(), self.dim, "point dimension mismatch");
        assert!(
            point.iter().all(|c| c.is_finite()),
            "coordinates must be finite"
        );
        self.coords.extend_from_slice(point);
    }

    #[inline]
    pub fn get(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// The points at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Points {
        let mut out = Points::new(self.dim);
        out.coords.reserve(indices.len() * self.dim);
        for &i in indices {
            out.coords.extend_from_slice(self.get(i));
        }
        out
    }

    /// The first `n` points.
    pub fn prefix(&self, n: usize) -> Points {
        assert!(n <= self.len());
        Points {
            dim: self.dim,
            coords: self.coords[..n * self.dim].to_vec(),
        }
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }
}
