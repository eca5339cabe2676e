//! Forward measurement operator and the block-Hankel lift of the radar
//! channel, each with adjoint and dense materialization.
//!
//! The operator maps the stacked unknown x = [h_r; v] (normalized units) to
//! the MP frequency-domain measurements. The sqrt(N) normalization is folded
//! into the map so solvers work directly on the normalized unknown.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{czero, real, Cx, Scalar};
use crate::scene::{comm_response_block, Scene};

/// Problem dimensions shared by operator and solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OperatorDims {
    pub m: usize,
    pub p: usize,
    pub j: usize,
}

impl OperatorDims {
    /// Measurement count MP.
    pub fn n_meas(&self) -> usize {
        self.m * self.p
    }

    /// Unknown count (M+J)P, also the normalization constant N.
    pub fn n_unknown(&self) -> usize {
        (self.m + self.j) * self.p
    }
}

/// Flat measurement index for frequency bin `n` of pulse `p`.
pub fn index_map(n: usize, p: usize, dims: &OperatorDims) -> Result<usize> {
    if n >= dims.m {
        return Err(Error::Dimension {
            context: "index_map frequency index",
            expected: dims.m,
            got: n,
        });
    }
    if p >= dims.p {
        return Err(Error::Dimension {
            context: "index_map pulse index",
            expected: dims.p,
            got: p,
        });
    }
    Ok(n + p * dims.m)
}

/// The linear map from x = [h_r; v] to measurements, with sqrt(N) folded in.
#[derive(Debug, Clone)]
pub struct ForwardOperator<T> {
    /// Waveform spectrum, length M.
    s: DVector<Cx<T>>,
    /// Known comm frequency response, one length-M block per pulse.
    hc: Vec<DVector<Cx<T>>>,
    /// Subspace basis blocks (complexified for application), M x J each.
    d: Vec<DMatrix<Cx<T>>>,
    dims: OperatorDims,
    scale: T,
}

impl<T: Scalar> ForwardOperator<T> {
    /// Build the operator from the known parts of a scene.
    pub fn from_scene(scene: &Scene<T>) -> Result<Self> {
        let dims = OperatorDims {
            m: scene.config.m,
            p: scene.config.p,
            j: scene.config.j,
        };
        let hc = (0..dims.p)
            .map(|p| comm_response_block(&scene.paths, p, dims.m))
            .collect();
        let d = scene
            .basis
            .blocks
            .iter()
            .map(|b| b.map(|x| Complex::new(x, T::zero())))
            .collect();
        Self::from_parts(scene.waveform.s.clone(), hc, d, dims)
    }

    /// Assemble from explicit parts; validates every block shape.
    pub fn from_parts(
        s: DVector<Cx<T>>,
        hc: Vec<DVector<Cx<T>>>,
        d: Vec<DMatrix<Cx<T>>>,
        dims: OperatorDims,
    ) -> Result<Self> {
        if s.len() != dims.m {
            return Err(Error::Dimension {
                context: "waveform spectrum",
                expected: dims.m,
                got: s.len(),
            });
        }
        if hc.len() != dims.p || d.len() != dims.p {
            return Err(Error::Dimension {
                context: "per-pulse block count",
                expected: dims.p,
                got: hc.len().min(d.len()),
            });
        }
        for block in &hc {
            if block.len() != dims.m {
                return Err(Error::Dimension {
                    context: "comm response block",
                    expected: dims.m,
                    got: block.len(),
                });
            }
        }
        for block in &d {
            if block.nrows() != dims.m || block.ncols() != dims.j {
                return Err(Error::Dimension {
                    context: "basis block rows",
                    expected: dims.m * dims.j,
                    got: block.nrows() * block.ncols(),
                });
            }
        }
        let scale = real::<T>(dims.n_unknown() as f64).sqrt();
        Ok(Self {
            s,
            hc,
            d,
            dims,
            scale,
        })
    }

    pub fn dims(&self) -> OperatorDims {
        self.dims
    }

    /// sqrt(N) factor carried by the map.
    pub fn scale(&self) -> T {
        self.scale
    }

    /// y = A x for x = [h_r; v].
    pub fn apply(&self, x: &DVector<Cx<T>>) -> Result<DVector<Cx<T>>> {
        let (m, p, j) = (self.dims.m, self.dims.p, self.dims.j);
        if x.len() != self.dims.n_unknown() {
            return Err(Error::Dimension {
                context: "apply_forward input",
                expected: self.dims.n_unknown(),
                got: x.len(),
            });
        }
        let v_off = m * p;
        let mut y = DVector::from_element(m * p, czero::<T>());
        for pi in 0..p {
            let hc = &self.hc[pi];
            let dp = &self.d[pi];
            for n in 0..m {
                let mut g = czero::<T>();
                for c in 0..j {
                    g += dp[(n, c)] * x[v_off + pi * j + c];
                }
                let val = self.s[n] * x[pi * m + n] + hc[n] * g;
                y[pi * m + n] = val.scale(self.scale);
            }
        }
        Ok(y)
    }

    /// Adjoint under the Hermitian inner product: A* u.
    pub fn adjoint(&self, u: &DVector<Cx<T>>) -> Result<DVector<Cx<T>>> {
        let (m, p, j) = (self.dims.m, self.dims.p, self.dims.j);
        if u.len() != self.dims.n_meas() {
            return Err(Error::Dimension {
                context: "apply_adjoint input",
                expected: self.dims.n_meas(),
                got: u.len(),
            });
        }
        let v_off = m * p;
        let mut x = DVector::from_element(self.dims.n_unknown(), czero::<T>());
        for pi in 0..p {
            let hc = &self.hc[pi];
            let dp = &self.d[pi];
            for n in 0..m {
                let un = u[pi * m + n];
                x[pi * m + n] = (self.s[n].conj() * un).scale(self.scale);
                let weighted = hc[n].conj() * un;
                for c in 0..j {
                    // basis entries are real, so conjugation leaves them alone
                    x[v_off + pi * j + c] += (dp[(n, c)] * weighted).scale(self.scale);
                }
            }
        }
        Ok(x)
    }

    /// Explicit matrix with the same action, built entry by entry from the
    /// block structure (independent of `apply`).
    pub fn dense(&self) -> DMatrix<Cx<T>> {
        let (m, p, j) = (self.dims.m, self.dims.p, self.dims.j);
        let v_off = m * p;
        let mut a = DMatrix::from_element(self.dims.n_meas(), self.dims.n_unknown(), czero::<T>());
        for pi in 0..p {
            for n in 0..m {
                let row = pi * m + n;
                a[(row, pi * m + n)] = self.s[n].scale(self.scale);
                for c in 0..j {
                    a[(row, v_off + pi * j + c)] =
                        (self.hc[pi][n] * self.d[pi][(n, c)]).scale(self.scale);
                }
            }
        }
        a
    }
}

/// Block-Hankel lift of the per-pulse radar channel, with p1 + p2 = P + 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HankelLift {
    m: usize,
    p: usize,
    p1: usize,
    p2: usize,
}

impl HankelLift {
    /// Balanced split p1 = ceil((P+1)/2).
    pub fn balanced(m: usize, p: usize) -> Self {
        let p1 = (p + 2) / 2;
        Self {
            m,
            p,
            p1,
            p2: p + 1 - p1,
        }
    }

    /// Explicit split; rejects p1 + p2 != P + 1.
    pub fn with_split(m: usize, p: usize, p1: usize, p2: usize) -> Result<Self> {
        if p1 == 0 || p2 == 0 || p1 + p2 != p + 1 {
            return Err(Error::Config(format!(
                "Hankel split must satisfy p1 + p2 = P + 1 with both positive; \
                 got p1={p1}, p2={p2}, P={p}"
            )));
        }
        Ok(Self { m, p, p1, p2 })
    }

    pub fn p1(&self) -> usize {
        self.p1
    }

    pub fn p2(&self) -> usize {
        self.p2
    }

    pub fn block_height(&self) -> usize {
        self.m
    }

    /// Shape of the lifted matrix: (p1 M, p2).
    pub fn shape(&self) -> (usize, usize) {
        (self.p1 * self.m, self.p2)
    }

    /// Number of (i, j) block pairs with i + j = q; the diagonal weight of
    /// the composition adjoint-after-lift.
    pub fn multiplicity(&self, q: usize) -> usize {
        let hi = q.min(self.p1 - 1);
        let lo = q.saturating_sub(self.p2 - 1);
        if hi >= lo {
            hi - lo + 1
        } else {
            0
        }
    }

    /// Lift an MP vector of per-pulse blocks into the block-Hankel matrix.
    pub fn lift<T: Scalar>(&self, h: &DVector<Cx<T>>) -> Result<DMatrix<Cx<T>>> {
        if h.len() != self.m * self.p {
            return Err(Error::Dimension {
                context: "hankel_lift input",
                expected: self.m * self.p,
                got: h.len(),
            });
        }
        let mut g = DMatrix::from_element(self.p1 * self.m, self.p2, czero::<T>());
        for i in 0..self.p1 {
            for jj in 0..self.p2 {
                let src = (i + jj) * self.m;
                for n in 0..self.m {
                    g[(i * self.m + n, jj)] = h[src + n];
                }
            }
        }
        Ok(g)
    }

    /// Adjoint of the lift: anti-diagonal block sums back into an MP vector.
    pub fn adjoint<T: Scalar>(&self, g: &DMatrix<Cx<T>>) -> Result<DVector<Cx<T>>> {
        if g.nrows() != self.p1 * self.m || g.ncols() != self.p2 {
            return Err(Error::Dimension {
                context: "hankel_adjoint input",
                expected: self.p1 * self.m * self.p2,
                got: g.nrows() * g.ncols(),
            });
        }
        let mut h = DVector::from_element(self.m * self.p, czero::<T>());
        for i in 0..self.p1 {
            for jj in 0..self.p2 {
                let dst = (i + jj) * self.m;
                for n in 0..self.m {
                    h[dst + n] += g[(i * self.m + n, jj)];
                }
            }
        }
        Ok(h)
    }
}
