//! Riemannian submersions presented in connection (Kaluza-Klein) form.
//!
//! The total metric is assembled from a base metric, a fiber metric and
//! connection coefficients as
//! `g = g_B,ab dx^a dx^b + g_F,ij (dy^i + A^i_a dx^a)(dy^j + A^j_b dx^b)`,
//! which makes the coordinate projection `(x, y) -> x` a Riemannian
//! submersion by construction.  Fibers are compact: every fiber axis is
//! periodic.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::chart::ChartDomain;
use crate::curvature::{christoffel, curvature_at, Tensor3};
use crate::error::{Error, Result};
use crate::fd::{self, DifferentiationConfig};
use crate::field::{DensityField, MetricField, ScalarField};
use crate::quad::{NeumaierSum, PeriodicGrid};
use crate::report::{MeasureCheck, SubmersionPointReport};
use crate::weighted::WeightedManifold;

pub type BlockFn = Arc<dyn Fn(&[f64], &[f64]) -> DMatrix<f64> + Send + Sync>;
pub type BaseMetricFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;
pub type TotalScalarFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// A Riemannian submersion given by its connection-form data.
#[derive(Clone)]
pub struct KKSubmersion {
    base: ChartDomain,
    fiber: ChartDomain,
    g_base: BaseMetricFn,
    g_fiber: BlockFn,
    connection: BlockFn,
    phi_m: TotalScalarFn,
}

impl KKSubmersion {
    /// Builds a submersion with total-space density `phi_m = 1`.
    ///
    /// `g_base(x)` is `n x n` SPD, `g_fiber(x, y)` is `q x q` SPD and
    /// `connection(x, y)` is the `q x n` matrix of coefficients `A^i_a`.
    pub fn new<GB, GF, C>(
        base: ChartDomain,
        fiber: ChartDomain,
        g_base: GB,
        g_fiber: GF,
        connection: C,
    ) -> Result<Self>
    where
        GB: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
        GF: Fn(&[f64], &[f64]) -> DMatrix<f64> + Send + Sync + 'static,
        C: Fn(&[f64], &[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        if !fiber.is_fully_periodic() {
            return Err(Error::InvalidChart(
                "every fiber axis must be periodic (compact fiber)".into(),
            ));
        }
        Ok(Self {
            base,
            fiber,
            g_base: Arc::new(g_base),
            g_fiber: Arc::new(g_fiber),
            connection: Arc::new(connection),
            phi_m: Arc::new(|_, _| 1.0),
        })
    }

    /// Replaces the total-space density.
    pub fn with_density<F>(mut self, phi_m: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        self.phi_m = Arc::new(phi_m);
        self
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber.dim()
    }

    pub fn total_dim(&self) -> usize {
        self.base.dim() + self.fiber.dim()
    }

    pub fn base_chart(&self) -> &ChartDomain {
        &self.base
    }

    pub fn fiber_chart(&self) -> &ChartDomain {
        &self.fiber
    }

    pub fn product_chart(&self) -> ChartDomain {
        self.base.product(&self.fiber)
    }

    /// Splits a total-space point into base and fiber coordinates.
    pub fn split<'p>(&self, p: &'p [f64]) -> (&'p [f64], &'p [f64]) {
        p.split_at(self.base.dim())
    }

    pub fn join(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let mut p = x.to_vec();
        p.extend_from_slice(y);
        p
    }

    pub fn phi_m_at(&self, x: &[f64], y: &[f64]) -> f64 {
        (self.phi_m)(x, y)
    }

    pub fn g_base_at(&self, x: &[f64]) -> DMatrix<f64> {
        (self.g_base)(x)
    }

    pub fn g_fiber_at(&self, x: &[f64], y: &[f64]) -> DMatrix<f64> {
        (self.g_fiber)(x, y)
    }

    pub fn connection_at(&self, x: &[f64], y: &[f64]) -> DMatrix<f64> {
        (self.connection)(x, y)
    }

    /// The base metric as a field over the base chart.
    pub fn base_metric_field(&self) -> MetricField {
        let g = self.g_base.clone();
        MetricField::new(self.base.clone(), move |x| g(x))
    }

    /// The fiber metric over the fiber chart, at a frozen base point.
    pub fn fiber_metric_field(&self, x: &[f64]) -> MetricField {
        let g = self.g_fiber.clone();
        let x = x.to_vec();
        MetricField::new(self.fiber.clone(), move |y| g(&x, y))
    }

    /// Restriction of the total-space density to the fiber over `x`.
    pub fn fiber_density_field(&self, x: &[f64]) -> DensityField {
        let phi = self.phi_m.clone();
        let x = x.to_vec();
        DensityField::new(self.fiber.clone(), move |y| phi(&x, y))
    }

    /// The fiber over `x` as a weighted manifold `(F, phi^F dvol_F)`.
    pub fn fiber_weighted(&self, x: &[f64]) -> WeightedManifold {
        WeightedManifold::new(self.fiber_metric_field(x), self.fiber_density_field(x))
    }

    /// Assembles the total metric over the product chart.
    pub fn total_metric_field(&self) -> MetricField {
        let n = self.base.dim();
        let q = self.fiber.dim();
        let g_base = self.g_base.clone();
        let g_fiber = self.g_fiber.clone();
        let conn = self.connection.clone();
        MetricField::new(self.product_chart(), move |p| {
            let (x, y) = p.split_at(n);
            let gb = g_base(x);
            let gf = g_fiber(x, y);
            let a = conn(x, y);
            let mut g = DMatrix::zeros(n + q, n + q);
            let atgfa = a.transpose() * &gf * &a;
            for al in 0..n {
                for be in 0..n {
                    g[(al, be)] = gb[(al, be)] + atgfa[(al, be)];
                }
            }
            let gfa = &gf * &a; // (gF A)_{i a}
            for al in 0..n {
                for i in 0..q {
                    g[(al, n + i)] = gfa[(i, al)];
                    g[(n + i, al)] = gfa[(i, al)];
                }
            }
            for i in 0..q {
                for j in 0..q {
                    g[(n + i, n + j)] = gf[(i, j)];
                }
            }
            g
        })
    }

    /// Total space as a weighted manifold `(M, phi^M dvol_M)`.
    pub fn total_weighted(&self) -> WeightedManifold {
        let n = self.base.dim();
        let phi = self.phi_m.clone();
        let phi_field = DensityField::new(self.product_chart(), move |p| {
            let (x, y) = p.split_at(n);
            phi(x, y)
        });
        WeightedManifold::new(self.total_metric_field(), phi_field)
    }

    /// The total-space density as a scalar field over the product chart.
    pub fn phi_total_field(&self) -> ScalarField {
        let n = self.base.dim();
        let phi = self.phi_m.clone();
        ScalarField::new(self.product_chart(), move |p| {
            let (x, y) = p.split_at(n);
            phi(x, y)
        })
    }

    /// Fiberwise quadrature of `integrand(x, y) * sqrt(det g_F(x, y))` over
    /// the fiber box at base point `b`.
    pub fn fiber_integrate<F>(&self, b: &[f64], mut integrand: F, grid: &[usize]) -> Result<f64>
    where
        F: FnMut(&[f64], &[f64]) -> Result<f64>,
    {
        let grid = PeriodicGrid::new(&self.fiber, grid)?;
        let gf_field = self.fiber_metric_field(b);
        let mut acc = NeumaierSum::new();
        for i in 0..grid.node_count() {
            let y = grid.node(i);
            let dv = gf_field.sqrt_det_at(&y)?;
            acc.add(integrand(b, &y)? * dv);
        }
        Ok(acc.total() * grid.cell_volume())
    }

    /// Total fiber volume `vol(F_b)` weighted by `phi^M`, i.e. the value of
    /// the pushforward density at `b`.
    pub fn pushforward_at(&self, b: &[f64], grid: &[usize]) -> Result<f64> {
        let phi = self.phi_m.clone();
        self.fiber_integrate(b, |x, y| Ok(phi(x, y)), grid)
    }

    /// The pushforward density `phi^B` as a field on the base chart.
    ///
    /// Evaluation failures inside the fiber quadrature surface as NaN,
    /// which the density positivity check converts into an error naming
    /// the base point.
    pub fn pushforward_density(&self, grid: &[usize]) -> DensityField {
        let s = self.clone();
        let grid = grid.to_vec();
        DensityField::new(self.base.clone(), move |x| {
            s.pushforward_at(x, &grid).unwrap_or(f64::NAN)
        })
    }

    /// Base space with the pushforward density: `(B, phi^B dvol_B)`.
    pub fn base_weighted(&self, grid: &[usize]) -> WeightedManifold {
        WeightedManifold::new(self.base_metric_field(), self.pushforward_density(grid))
    }

    /// A `g_B`-orthonormal frame of the base tangent space at `b`, as
    /// base-coordinate vectors (columns of the inverse-transpose Cholesky
    /// factor).
    pub fn base_orthonormal_frame(&self, b: &[f64]) -> Result<Vec<DVector<f64>>> {
        let n = self.base.dim();
        let c = inverse_transpose_cholesky(&(self.g_base)(b), b)?;
        Ok((0..n).map(|alpha| c.column(alpha).into_owned()).collect())
    }

    /// `check_delta_n` at `p` using the canonical adapted frame.
    pub fn check_delta_n(&self, p: &[f64], cfg: &DifferentiationConfig) -> Result<f64> {
        let total = self.total_metric_field();
        let frame = self.adapted_frame(p)?;
        let tensors = self.oneill_tensors_with_frame(&total, p, &frame, cfg)?;
        self.check_delta_n_with_frame(&total, p, &frame, &tensors, cfg)
    }

    /// Orthonormal frame adapted to the splitting at `p`: horizontal lifts
    /// of a `g_B`-orthonormal base frame and a `g_F`-orthonormal vertical
    /// frame.
    pub fn adapted_frame(&self, p: &[f64]) -> Result<AdaptedFrame> {
        let n = self.base.dim();
        let q = self.fiber.dim();
        let (x, y) = self.split(p);
        let c = inverse_transpose_cholesky(&(self.g_base)(x), p)?;
        let d = inverse_transpose_cholesky(&(self.g_fiber)(x, y), p)?;
        let a = (self.connection)(x, y);

        let mut horizontal = Vec::with_capacity(n);
        for alpha in 0..n {
            let mut v = DVector::zeros(n + q);
            for beta in 0..n {
                let coeff = c[(beta, alpha)];
                v[beta] += coeff;
                for i in 0..q {
                    v[n + i] -= coeff * a[(i, beta)];
                }
            }
            horizontal.push(v);
        }
        let mut vertical = Vec::with_capacity(q);
        for i in 0..q {
            let mut v = DVector::zeros(n + q);
            for j in 0..q {
                v[n + j] = d[(j, i)];
            }
            vertical.push(v);
        }
        Ok(AdaptedFrame {
            point: p.to_vec(),
            horizontal,
            vertical,
        })
    }

    /// Horizontal projection of a total-space vector at the point where
    /// the connection matrix `a` was evaluated.
    pub fn horizontal_part(&self, a: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
        let n = self.base.dim();
        let q = self.fiber.dim();
        let mut h = DVector::zeros(n + q);
        for al in 0..n {
            h[al] = v[al];
        }
        for i in 0..q {
            let mut ay = 0.0;
            for al in 0..n {
                ay += a[(i, al)] * v[al];
            }
            h[n + i] = -ay;
        }
        h
    }

    /// Vertical projection, the complement of [`KKSubmersion::horizontal_part`].
    pub fn vertical_part(&self, a: &DMatrix<f64>, v: &DVector<f64>) -> DVector<f64> {
        v - self.horizontal_part(a, v)
    }

    /// The mean curvature vector of the fiber through `p`, as a horizontal
    /// total-space vector: `N = sum_i (nabla_{u_i} u_i)^hor`.
    pub fn mean_curvature_at(
        &self,
        total: &MetricField,
        p: &[f64],
        cfg: &DifferentiationConfig,
    ) -> Result<DVector<f64>> {
        let n = self.base.dim();
        let q = self.fiber.dim();
        let (x, y) = self.split(p);
        let gamma = christoffel(total, p, cfg)?;
        let gf = (self.g_fiber)(x, y);
        let gf_inv = nalgebra::Cholesky::new(gf)
            .ok_or(Error::DegenerateMetric { point: p.to_vec() })?
            .inverse();
        let mut v = DVector::zeros(n + q);
        for k in 0..q {
            for l in 0..q {
                let w = gf_inv[(k, l)];
                for c in 0..(n + q) {
                    v[c] += w * gamma.get(c, n + k, n + l);
                }
            }
        }
        let a = (self.connection)(x, y);
        Ok(self.horizontal_part(&a, &v))
    }

    /// O'Neill invariants, curvatures and the residual of the splitting
    /// identity at `p`, using the canonical adapted frame.
    pub fn oneill_invariants(
        &self,
        p: &[f64],
        cfg: &DifferentiationConfig,
    ) -> Result<SubmersionPointReport> {
        let frame = self.adapted_frame(p)?;
        self.oneill_invariants_with_frame(p, &frame, cfg)
    }

    /// As [`KKSubmersion::oneill_invariants`] with a caller-supplied
    /// orthonormal adapted frame (the invariants are frame-independent;
    /// this entry point exists so tests can verify that).
    pub fn oneill_invariants_with_frame(
        &self,
        p: &[f64],
        frame: &AdaptedFrame,
        cfg: &DifferentiationConfig,
    ) -> Result<SubmersionPointReport> {
        let total = self.total_metric_field();
        let chart = total.domain().clone();
        chart.ensure_interior(p, &cfg.margin(&chart, 1))?;

        let tensors = self.oneill_tensors_with_frame(&total, p, frame, cfg)?;
        let check_delta_n = self.check_delta_n_with_frame(&total, p, frame, &tensors, cfg)?;

        let (x, y) = self.split(p);
        let r_m = curvature_at(&total, p, cfg)?.scalar;
        let r_b = curvature_at(&self.base_metric_field(), x, cfg)?.scalar;
        let r_f = curvature_at(&self.fiber_metric_field(x), y, cfg)?.scalar;
        let residual_3_1 = r_m
            - (r_b + r_f
                - tensors.a_norm2
                - tensors.t_norm2
                - tensors.n_norm2
                - 2.0 * check_delta_n);

        Ok(SubmersionPointReport {
            r_m,
            r_b,
            r_f,
            a_norm2: tensors.a_norm2,
            t_norm2: tensors.t_norm2,
            n_norm2: tensors.n_norm2,
            check_delta_n,
            n_vector: tensors.n_vector,
            residual_3_1,
        })
    }

    /// The tensor norms `|A|^2`, `|T|^2`, `|N|^2` and the vector `N` at
    /// `p`.  Cheaper than the full invariants when curvatures and
    /// `check_delta_n` are not needed.
    pub(crate) fn oneill_tensors_with_frame(
        &self,
        total: &MetricField,
        p: &[f64],
        frame: &AdaptedFrame,
        cfg: &DifferentiationConfig,
    ) -> Result<OneillTensors> {
        let n = self.base.dim();
        let q = self.fiber.dim();
        let chart = total.domain();
        let (x, y) = self.split(p);
        let g0 = total.at(p)?;
        let gamma = christoffel(total, p, cfg)?;
        let a_mat = (self.connection)(x, y);

        // T_{ij} = (nabla_{u_i} u_j)^hor over the vertical frame; the
        // constant-coefficient extension of u_j is a vertical field, so the
        // horizontal projection is extension-independent.
        let mut t_norm2 = 0.0;
        let mut n_vector = DVector::zeros(n + q);
        for i in 0..q {
            for j in 0..q {
                let w = covariant_constant(&gamma, &frame.vertical[i], &frame.vertical[j]);
                let h = self.horizontal_part(&a_mat, &w);
                t_norm2 += metric_dot(&g0, &h, &h);
                if i == j {
                    n_vector += &h;
                }
            }
        }
        let n_norm2 = metric_dot(&g0, &n_vector, &n_vector);

        // A_{e_a} e_b = (nabla_{e_a} E_b)^vert with E_b the horizontal
        // extension of e_b through the basic lifts; needs the first
        // derivatives of the connection coefficients.
        let mut d_conn: Vec<DMatrix<f64>> = Vec::with_capacity(n + q);
        let conn = self.connection.clone();
        for axis in 0..(n + q) {
            let da = fd::partial(chart, p, axis, cfg, |pp| {
                let (xx, yy) = pp.split_at(n);
                Ok(conn(xx, yy))
            })?;
            d_conn.push(da);
        }

        let mut a_vecs: Vec<Vec<DVector<f64>>> = Vec::with_capacity(n);
        for ea in &frame.horizontal {
            let mut row = Vec::with_capacity(n);
            for eb in &frame.horizontal {
                // coefficient-derivative part: (e_a . grad) of the fiber
                // components -A^i_c bx^c of the extension of e_b
                let mut w = covariant_constant(&gamma, ea, eb);
                for i in 0..q {
                    let mut dv = 0.0;
                    for axis in 0..(n + q) {
                        let mut da_bx = 0.0;
                        for c in 0..n {
                            da_bx += d_conn[axis][(i, c)] * eb[c];
                        }
                        dv -= ea[axis] * da_bx;
                    }
                    w[n + i] += dv;
                }
                row.push(self.vertical_part(&a_mat, &w));
            }
            a_vecs.push(row);
        }
        let mut a_norm2 = 0.0;
        let mut antisym_residual = 0.0_f64;
        for al in 0..n {
            for be in 0..n {
                a_norm2 += metric_dot(&g0, &a_vecs[al][be], &a_vecs[al][be]);
                let s = &a_vecs[al][be] + &a_vecs[be][al];
                antisym_residual = antisym_residual.max(metric_dot(&g0, &s, &s).sqrt());
            }
        }
        if antisym_residual > 1e-8 {
            return Err(Error::ConsistencyCheck(format!(
                "A-tensor antisymmetry violated: |A_X Y + A_Y X| = {antisym_residual:.3e} at {p:?}"
            )));
        }

        Ok(OneillTensors {
            a_norm2,
            t_norm2,
            n_norm2,
            n_vector,
        })
    }

    /// `check_delta_n = -sum_a <nabla_{e_a} N, e_a>` with the mean
    /// curvature extended as a field and differentiated by nested stencils.
    fn check_delta_n_with_frame(
        &self,
        total: &MetricField,
        p: &[f64],
        frame: &AdaptedFrame,
        tensors: &OneillTensors,
        cfg: &DifferentiationConfig,
    ) -> Result<f64> {
        let n = self.base.dim();
        let q = self.fiber.dim();
        let chart = total.domain();
        let g0 = total.at(p)?;
        let gamma = christoffel(total, p, cfg)?;

        let mut dn: Vec<DVector<f64>> = Vec::with_capacity(n + q);
        for axis in 0..(n + q) {
            dn.push(fd::partial_nested(chart, p, axis, cfg, |pp| {
                self.mean_curvature_at(total, pp, cfg)
            })?);
        }

        let mut delta = 0.0;
        for ea in &frame.horizontal {
            let mut cov = covariant_constant(&gamma, ea, &tensors.n_vector);
            for axis in 0..(n + q) {
                cov += ea[axis] * &dn[axis];
            }
            delta -= metric_dot(&g0, &cov, ea);
        }
        Ok(delta)
    }

    /// Fiberwise-constancy criterion for measure-preserving fiber
    /// transport at base point `b`: for each horizontal frame direction,
    /// the standard deviation over the fiber grid of
    /// `(e_a phi^M)/phi^M - (e_a, N)`.
    pub fn check_measure_preserving(
        &self,
        b: &[f64],
        grid: &[usize],
        cfg: &DifferentiationConfig,
    ) -> Result<MeasureCheck> {
        let n = self.base.dim();
        let total = self.total_metric_field();
        let chart = total.domain().clone();
        let grid = PeriodicGrid::new(&self.fiber, grid)?;
        let phi_field = self.phi_total_field();

        let mut per_direction = vec![Vec::with_capacity(grid.node_count()); n];
        for node in 0..grid.node_count() {
            let y = grid.node(node);
            let p = self.join(b, &y);
            chart.ensure_interior(&p, &cfg.margin(&chart, 0))?;
            let frame = self.adapted_frame(&p)?;
            let g0 = total.at(&p)?;
            let phi = self.fiber_density_field(b).at(&y)?;
            let nvec = self.mean_curvature_at(&total, &p, cfg)?;
            for (alpha, ea) in frame.horizontal.iter().enumerate() {
                let mut dphi = 0.0;
                for axis in 0..chart.dim() {
                    let d: f64 = fd::partial(&chart, &p, axis, cfg, |pp| Ok(phi_field.at(pp)))?;
                    dphi += ea[axis] * d;
                }
                let h = dphi / phi - metric_dot(&g0, ea, &nvec);
                per_direction[alpha].push(h);
            }
        }

        let stds: Vec<f64> = per_direction
            .iter()
            .map(|vals| {
                let m = crate::quad::compensated_sum(vals) / vals.len() as f64;
                let sq: Vec<f64> = vals.iter().map(|v| (v - m) * (v - m)).collect();
                (crate::quad::compensated_sum(&sq) / sq.len() as f64).sqrt()
            })
            .collect();
        let max = stds.iter().fold(0.0_f64, |a, &b| a.max(b));
        Ok(MeasureCheck {
            base_point: b.to_vec(),
            per_direction: stds,
            max_fiber_variance: max,
        })
    }
}

/// Frame-independent O'Neill tensor norms at a point.
pub(crate) struct OneillTensors {
    pub a_norm2: f64,
    pub t_norm2: f64,
    pub n_norm2: f64,
    pub n_vector: DVector<f64>,
}

/// Orthonormal frame splitting the tangent space at a point into
/// horizontal lifts and vertical directions.
#[derive(Clone, Debug)]
pub struct AdaptedFrame {
    pub point: Vec<f64>,
    pub horizontal: Vec<DVector<f64>>,
    pub vertical: Vec<DVector<f64>>,
}

impl AdaptedFrame {
    /// Largest deviation of the frame Gram matrix from the identity (and
    /// of mixed products from zero) under the supplied total metric.
    pub fn gram_residual(&self, g: &DMatrix<f64>) -> f64 {
        let mut worst = 0.0_f64;
        let all: Vec<&DVector<f64>> = self.horizontal.iter().chain(self.vertical.iter()).collect();
        for (i, v) in all.iter().enumerate() {
            for (j, w) in all.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((metric_dot(g, v, w) - target).abs());
            }
        }
        worst
    }

    /// Applies orthogonal mixes to the horizontal and vertical blocks.
    pub fn rotated(&self, hor_rot: &DMatrix<f64>, vert_rot: &DMatrix<f64>) -> AdaptedFrame {
        let mix = |vecs: &[DVector<f64>], rot: &DMatrix<f64>| -> Vec<DVector<f64>> {
            let k = vecs.len();
            (0..k)
                .map(|a| {
                    let mut v = DVector::zeros(vecs[0].len());
                    for b in 0..k {
                        v += rot[(b, a)] * &vecs[b];
                    }
                    v
                })
                .collect()
        };
        AdaptedFrame {
            point: self.point.clone(),
            horizontal: mix(&self.horizontal, hor_rot),
            vertical: mix(&self.vertical, vert_rot),
        }
    }
}

/// `<v, w>` under the metric matrix `g`.
pub fn metric_dot(g: &DMatrix<f64>, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
    (v.transpose() * g * w)[(0, 0)]
}

/// `(nabla_V W)^c = V^a W^b Gamma^c_{ab}` for constant-coefficient vectors.
fn covariant_constant(gamma: &Tensor3, v: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
    let dim = gamma.dim();
    let mut out = DVector::zeros(dim);
    for a in 0..dim {
        if v[a] == 0.0 {
            continue;
        }
        for b in 0..dim {
            if w[b] == 0.0 {
                continue;
            }
            let vw = v[a] * w[b];
            for c in 0..dim {
                out[c] += vw * gamma.get(c, a, b);
            }
        }
    }
    out
}

/// `C` with `C^T g C = I`, from the Cholesky factorization `g = L L^T`.
fn inverse_transpose_cholesky(g: &DMatrix<f64>, p: &[f64]) -> Result<DMatrix<f64>> {
    let chol =
        nalgebra::Cholesky::new(g.clone()).ok_or(Error::DegenerateMetric { point: p.to_vec() })?;
    let l = chol.l();
    l.transpose()
        .try_inverse()
        .ok_or(Error::DegenerateMetric { point: p.to_vec() })
}
