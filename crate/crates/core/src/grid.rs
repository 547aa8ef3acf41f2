//! Flat spin geometry of the source domain: uniform periodic grids on S¹ and T²,
//! spin structures, Clifford representation, Fourier-diagonal calculus, the flat
//! Dirac operator and its spectrum.
//!
//! Antiperiodic spinor fields are stored as periodic coefficient arrays; the twist
//! only enters through shifted derivative modes 2π(k + δ)/L. Pointwise operations
//! (Clifford multiplication, Hermitian products, projections) are insensitive to
//! the unit phase that relates stored and physical values, so the whole calculus
//! runs on plain periodic arrays.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{DhcError, Result};

/// Boundary behaviour of spinors along one period generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Twist {
    /// Trivial spin structure: periodic spinors, derivative modes k.
    Periodic,
    /// Nontrivial spin structure: antiperiodic spinors, derivative modes k + 1/2.
    Antiperiodic,
}

impl Twist {
    pub fn shift(self) -> f64 {
        match self {
            Twist::Periodic => 0.0,
            Twist::Antiperiodic => 0.5,
        }
    }
}

/// Per-axis choice of spin structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinStructure {
    pub twists: [Twist; 2],
}

impl SpinStructure {
    pub fn circle(t: Twist) -> Self {
        SpinStructure {
            twists: [t, Twist::Periodic],
        }
    }

    pub fn torus(tx: Twist, ty: Twist) -> Self {
        SpinStructure { twists: [tx, ty] }
    }

    pub fn trivial() -> Self {
        SpinStructure {
            twists: [Twist::Periodic, Twist::Periodic],
        }
    }

    /// True when every generator carries the trivial structure, i.e. harmonic
    /// spinors (constants) exist.
    pub fn is_trivial(&self, dim: usize) -> bool {
        self.twists[..dim].iter().all(|t| *t == Twist::Periodic)
    }
}

/// Fixed anti-Hermitian Clifford representation.
///
/// dim 1: gamma = i acting on 1-component spinors. dim 2: gamma_1 = i sigma_1,
/// gamma_2 = i sigma_2 on 2-component spinors. Both satisfy
/// gamma_a gamma_b + gamma_b gamma_a = -2 delta_ab exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordRep {
    /// Spinor rank s.
    pub rank: usize,
    /// One s x s row-major matrix per axis.
    gammas: Vec<Vec<Complex64>>,
}

impl CliffordRep {
    fn for_dim(dim: usize) -> Self {
        let i = Complex64::new(0.0, 1.0);
        let zero = Complex64::new(0.0, 0.0);
        match dim {
            1 => CliffordRep {
                rank: 1,
                gammas: vec![vec![i]],
            },
            2 => {
                // i*sigma_1 and i*sigma_2
                let g1 = vec![zero, i, i, zero];
                let g2 = vec![zero, Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), zero];
                CliffordRep {
                    rank: 2,
                    gammas: vec![g1, g2],
                }
            }
            _ => unreachable!("dimension checked at grid construction"),
        }
    }

    /// Matrix entry (gamma_axis)_{row,col}.
    pub fn gamma(&self, axis: usize, row: usize, col: usize) -> Complex64 {
        self.gammas[axis][row * self.rank + col]
    }

    /// Applies gamma_axis to a single spinor (slice of length `rank`).
    pub fn apply(&self, axis: usize, spinor: &[Complex64]) -> Vec<Complex64> {
        let s = self.rank;
        let mut out = vec![Complex64::new(0.0, 0.0); s];
        for row in 0..s {
            let mut acc = Complex64::new(0.0, 0.0);
            for col in 0..s {
                acc += self.gamma(axis, row, col) * spinor[col];
            }
            out[row] = acc;
        }
        out
    }
}

/// One eigenmode of the flat Dirac operator.
#[derive(Debug, Clone)]
pub struct DiracMode {
    /// Integer mode indices; the physical wavenumber is 2π(k + δ)/L per axis.
    pub kvec: [i64; 2],
    pub lambda: f64,
    /// Spinor polarisation (length s, unit norm).
    pub spinor: Vec<Complex64>,
}

/// Uniform periodic node set with spin structure and Clifford representation.
#[derive(Clone)]
pub struct DomainGrid {
    pub dim: usize,
    pub nodes: [usize; 2],
    pub periods: [f64; 2],
    pub spin: SpinStructure,
    cliff: CliffordRep,
    fwd: [Arc<dyn Fft<f64>>; 2],
    inv: [Arc<dyn Fft<f64>>; 2],
}

impl fmt::Debug for DomainGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DomainGrid")
            .field("dim", &self.dim)
            .field("nodes", &self.nodes)
            .field("periods", &self.periods)
            .field("spin", &self.spin)
            .finish()
    }
}

impl PartialEq for DomainGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.nodes == other.nodes
            && self.periods == other.periods
            && self.spin == other.spin
    }
}

impl DomainGrid {
    /// Builds a grid. `dim` must be 1 or 2, every axis needs at least 8 nodes
    /// and a positive period.
    pub fn new(
        dim: usize,
        nodes: &[usize],
        periods: &[f64],
        spin: SpinStructure,
    ) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(DhcError::Domain(format!(
                "dimension must be 1 or 2, got {dim}"
            )));
        }
        if nodes.len() < dim || periods.len() < dim {
            return Err(DhcError::Domain(format!(
                "need {dim} node counts and periods, got {} and {}",
                nodes.len(),
                periods.len()
            )));
        }
        let mut n = [1usize; 2];
        let mut l = [1.0f64; 2];
        for a in 0..dim {
            if nodes[a] < 8 {
                return Err(DhcError::Domain(format!(
                    "axis {a}: need at least 8 nodes, got {}",
                    nodes[a]
                )));
            }
            if !(periods[a] > 0.0) || !periods[a].is_finite() {
                return Err(DhcError::Domain(format!(
                    "axis {a}: period must be positive and finite, got {}",
                    periods[a]
                )));
            }
            n[a] = nodes[a];
            l[a] = periods[a];
        }
        let mut planner = FftPlanner::new();
        let fwd = [
            planner.plan_fft_forward(n[0]),
            planner.plan_fft_forward(n[1]),
        ];
        let inv = [
            planner.plan_fft_inverse(n[0]),
            planner.plan_fft_inverse(n[1]),
        ];
        Ok(DomainGrid {
            dim,
            nodes: n,
            periods: l,
            spin,
            cliff: CliffordRep::for_dim(dim),
            fwd,
            inv,
        })
    }

    pub fn circle(n: usize, period: f64, twist: Twist) -> Result<Self> {
        DomainGrid::new(1, &[n], &[period], SpinStructure::circle(twist))
    }

    pub fn torus(n: [usize; 2], periods: [f64; 2], tw: [Twist; 2]) -> Result<Self> {
        DomainGrid::new(2, &n, &periods, SpinStructure::torus(tw[0], tw[1]))
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes[0] * self.nodes[1]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.periods[axis] / self.nodes[axis] as f64
    }

    /// Volume of one grid cell, i.e. the quadrature weight.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).product()
    }

    pub fn total_volume(&self) -> f64 {
        self.periods[..self.dim].iter().product()
    }

    /// Spinor rank: 1 on S¹, 2 on T².
    pub fn spinor_rank(&self) -> usize {
        self.cliff.rank
    }

    pub fn clifford(&self) -> &CliffordRep {
        &self.cliff
    }

    /// Coordinates of a node; node index runs x-fastest.
    pub fn coords(&self, node: usize) -> [f64; 2] {
        let ix = node % self.nodes[0];
        let iy = node / self.nodes[0];
        [ix as f64 * self.spacing(0), iy as f64 * self.spacing(1)]
    }

    /// Derivative multiplier mu such that the mode with index `i` along `axis`
    /// differentiates to i*mu times itself. The unpaired Nyquist mode of even
    /// untwisted grids gets mu = 0, which keeps the operator skew-adjoint and
    /// real-field-preserving; band-limited fields never populate it.
    pub fn wavenumber(&self, axis: usize, index: usize, twisted: bool) -> f64 {
        let n = self.nodes[axis];
        let shift = if twisted {
            self.spin.twists[axis].shift()
        } else {
            0.0
        };
        let k = if index <= n / 2 && !(n % 2 == 0 && index == n / 2) {
            index as f64
        } else if n % 2 == 0 && index == n / 2 {
            if shift == 0.0 {
                return 0.0;
            }
            -((n / 2) as f64)
        } else {
            index as f64 - n as f64
        };
        2.0 * std::f64::consts::PI * (k + shift) / self.periods[axis]
    }

    fn fft_lines<FnMode>(&self, axis: usize, data: &mut [Complex64], ncomp: usize, f: FnMode)
    where
        FnMode: Fn(usize, &mut Complex64),
    {
        let (nx, ny) = (self.nodes[0], self.nodes[1]);
        let n = self.num_nodes();
        let len = self.nodes[axis];
        let scale = 1.0 / len as f64;
        let mut line = vec![Complex64::new(0.0, 0.0); len];
        for c in 0..ncomp {
            let plane = &mut data[c * n..(c + 1) * n];
            let nlines = n / len;
            for li in 0..nlines {
                // gather
                if axis == 0 {
                    line.copy_from_slice(&plane[li * nx..(li + 1) * nx]);
                } else {
                    for iy in 0..ny {
                        line[iy] = plane[iy * nx + li];
                    }
                }
                self.fwd[axis].process(&mut line);
                for (k, v) in line.iter_mut().enumerate() {
                    f(k, v);
                }
                self.inv[axis].process(&mut line);
                // scatter with 1/len normalisation
                if axis == 0 {
                    for (ix, v) in line.iter().enumerate() {
                        plane[li * nx + ix] = v * scale;
                    }
                } else {
                    for (iy, v) in line.iter().enumerate() {
                        plane[iy * nx + li] = v * scale;
                    }
                }
            }
        }
    }

    /// Fourier-diagonal derivative along `axis` of a planar complex buffer with
    /// `ncomp` component planes. Exact on band-limited fields.
    pub fn derivative(
        &self,
        axis: usize,
        twisted: bool,
        data: &[Complex64],
        ncomp: usize,
    ) -> Vec<Complex64> {
        assert!(axis < self.dim, "axis {axis} out of range for dim {}", self.dim);
        assert_eq!(data.len(), ncomp * self.num_nodes(), "component count mismatch");
        let mut out = data.to_vec();
        let mus: Vec<f64> = (0..self.nodes[axis])
            .map(|k| self.wavenumber(axis, k, twisted))
            .collect();
        self.fft_lines(axis, &mut out, ncomp, |k, v| {
            *v *= Complex64::new(0.0, mus[k]);
        });
        out
    }

    /// Derivative of a real planar buffer (maps and scalar densities).
    pub fn derivative_real(&self, axis: usize, data: &[f64], ncomp: usize) -> Vec<f64> {
        let buf: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let out = self.derivative(axis, false, &buf, ncomp);
        out.iter().map(|z| z.re).collect()
    }

    /// Flat Laplacian, Fourier-diagonal over all axes.
    pub fn laplacian(&self, twisted: bool, data: &[Complex64], ncomp: usize) -> Vec<Complex64> {
        assert_eq!(data.len(), ncomp * self.num_nodes());
        let mut out = data.to_vec();
        for axis in 0..self.dim {
            let mus: Vec<f64> = (0..self.nodes[axis])
                .map(|k| self.wavenumber(axis, k, twisted))
                .collect();
            self.fft_lines(axis, &mut out, ncomp, |k, v| {
                *v *= -mus[k] * mus[k];
            });
        }
        // sum of per-axis second derivatives: fft_lines applied the factor per
        // axis multiplicatively, so rebuild additively instead.
        if self.dim == 2 {
            let mut acc = vec![Complex64::new(0.0, 0.0); data.len()];
            for axis in 0..2 {
                let mut part = data.to_vec();
                let mus: Vec<f64> = (0..self.nodes[axis])
                    .map(|k| self.wavenumber(axis, k, twisted))
                    .collect();
                self.fft_lines(axis, &mut part, ncomp, |k, v| {
                    *v *= -mus[k] * mus[k];
                });
                for (a, p) in acc.iter_mut().zip(part.iter()) {
                    *a += p;
                }
            }
            return acc;
        }
        out
    }

    pub fn laplacian_real(&self, data: &[f64], ncomp: usize) -> Vec<f64> {
        let buf: Vec<Complex64> = data.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let out = self.laplacian(false, &buf, ncomp);
        out.iter().map(|z| z.re).collect()
    }

    /// Uniform quadrature of a real scalar field; spectrally exact for smooth
    /// periodic integrands.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        assert_eq!(f.len(), self.num_nodes());
        f.iter().sum::<f64>() * self.cell_volume()
    }

    pub fn integrate_complex(&self, f: &[Complex64]) -> Complex64 {
        assert_eq!(f.len(), self.num_nodes());
        f.iter().sum::<Complex64>() * self.cell_volume()
    }

    /// Clifford multiplication e_axis applied to every spinor factor of a
    /// planar buffer whose planes are ordered (sigma, ambient) with sigma-major
    /// stride, i.e. plane sigma*q + i.
    pub fn clifford_mul(&self, axis: usize, data: &[Complex64], q: usize) -> Vec<Complex64> {
        assert!(axis < self.dim, "axis {axis} out of range for dim {}", self.dim);
        let s = self.cliff.rank;
        let n = self.num_nodes();
        assert_eq!(data.len(), s * q * n);
        let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
        for row in 0..s {
            for col in 0..s {
                let g = self.cliff.gamma(axis, row, col);
                if g == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for i in 0..q {
                    let src = &data[(col * q + i) * n..(col * q + i + 1) * n];
                    let dst = &mut out[(row * q + i) * n..(row * q + i + 1) * n];
                    for (d, sv) in dst.iter_mut().zip(src.iter()) {
                        *d += g * sv;
                    }
                }
            }
        }
        out
    }

    /// Flat Dirac operator: sum over axes of gamma_axis applied to the twisted
    /// spectral derivative.
    pub fn dirac_flat(&self, data: &[Complex64], q: usize) -> Vec<Complex64> {
        let s = self.cliff.rank;
        let n = self.num_nodes();
        assert_eq!(data.len(), s * q * n);
        let mut out = vec![Complex64::new(0.0, 0.0); data.len()];
        for axis in 0..self.dim {
            let d = self.derivative(axis, true, data, s * q);
            let cd = self.clifford_mul(axis, &d, q);
            for (o, v) in out.iter_mut().zip(cd.iter()) {
                *o += v;
            }
        }
        out
    }

    /// All eigenmodes of the flat Dirac operator for this grid's spin structure,
    /// sorted ascending by |lambda| (ties: ascending lambda, then mode index).
    pub fn dirac_modes(&self) -> Vec<DiracMode> {
        let mut modes = Vec::new();
        let push_k = |idx: usize, n: usize| -> i64 {
            let half = n / 2;
            if idx <= half && !(n % 2 == 0 && idx == half) {
                idx as i64
            } else if n % 2 == 0 && idx == half {
                -(half as i64)
            } else {
                idx as i64 - n as i64
            }
        };
        match self.dim {
            1 => {
                for ix in 0..self.nodes[0] {
                    let mu = self.wavenumber(0, ix, true);
                    modes.push(DiracMode {
                        kvec: [push_k(ix, self.nodes[0]), 0],
                        lambda: -mu,
                        spinor: vec![Complex64::new(1.0, 0.0)],
                    });
                }
            }
            2 => {
                for iy in 0..self.nodes[1] {
                    for ix in 0..self.nodes[0] {
                        let m1 = self.wavenumber(0, ix, true);
                        let m2 = self.wavenumber(1, iy, true);
                        let kv = [push_k(ix, self.nodes[0]), push_k(iy, self.nodes[1])];
                        let norm = (m1 * m1 + m2 * m2).sqrt();
                        if norm == 0.0 {
                            modes.push(DiracMode {
                                kvec: kv,
                                lambda: 0.0,
                                spinor: vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                            });
                            modes.push(DiracMode {
                                kvec: kv,
                                lambda: 0.0,
                                spinor: vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
                            });
                        } else {
                            // symbol of the flat Dirac operator at this mode is
                            // -(m1 sigma_1 + m2 sigma_2); eigenvector for
                            // eigenvalue lambda solves [[0,a],[conj(a),0]] chi = -lambda chi
                            // with a = m1 - i m2.
                            let a = Complex64::new(m1, -m2);
                            for lambda in [norm, -norm] {
                                let mu = -lambda;
                                let chi = vec![a, Complex64::new(mu, 0.0)];
                                let nrm = (chi[0].norm_sqr() + chi[1].norm_sqr()).sqrt();
                                modes.push(DiracMode {
                                    kvec: kv,
                                    lambda,
                                    spinor: chi.iter().map(|z| z / nrm).collect(),
                                });
                            }
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
        modes.sort_by(|a, b| {
            (a.lambda.abs(), a.lambda)
                .partial_cmp(&(b.lambda.abs(), b.lambda))
                .unwrap()
        });
        modes
    }

    /// Sorted Dirac eigenvalues, ascending by absolute value.
    pub fn dirac_spectrum(&self, count: usize) -> Result<Vec<f64>> {
        let total = self.num_nodes() * self.spinor_rank();
        if count > total {
            return Err(DhcError::Domain(format!(
                "requested {count} eigenvalues but the grid carries only {total} modes"
            )));
        }
        Ok(self
            .dirac_modes()
            .into_iter()
            .take(count)
            .map(|m| m.lambda)
            .collect())
    }

    /// Smallest |eigenvalue| of the flat Dirac operator.
    pub fn dirac_gap(&self) -> f64 {
        self.dirac_modes()
            .first()
            .map(|m| m.lambda.abs())
            .unwrap_or(0.0)
    }

    /// Evaluates a single Dirac eigenmode as a stored (periodic-part) spinor
    /// field plane set tensored with the ambient vector `leg`.
    pub fn mode_field(&self, mode: &DiracMode, leg: &[f64]) -> Vec<Complex64> {
        let s = self.spinor_rank();
        let q = leg.len();
        let n = self.num_nodes();
        let mut out = vec![Complex64::new(0.0, 0.0); s * q * n];
        for node in 0..n {
            let xy = self.coords(node);
            // stored periodic part carries integer modes only
            let phase = mode.kvec[0] as f64 * xy[0] * 2.0 * std::f64::consts::PI
                / self.periods[0]
                + if self.dim == 2 {
                    mode.kvec[1] as f64 * xy[1] * 2.0 * std::f64::consts::PI / self.periods[1]
                } else {
                    0.0
                };
            let e = Complex64::new(0.0, phase).exp();
            for sigma in 0..s {
                for i in 0..q {
                    out[(sigma * q + i) * n + node] = e * mode.spinor[sigma] * leg[i];
                }
            }
        }
        out
    }

    /// 2/3-rule spectral filter: zeroes every mode above two thirds of the
    /// Nyquist wavenumber. Optional dealiasing helper for cubic terms.
    pub fn two_thirds_filter(&self, data: &[Complex64], ncomp: usize) -> Vec<Complex64> {
        let mut out = data.to_vec();
        for axis in 0..self.dim {
            let n = self.nodes[axis];
            let cutoff = n as f64 / 3.0;
            let keep: Vec<bool> = (0..n)
                .map(|i| {
                    let k = if i <= n / 2 { i as f64 } else { n as f64 - i as f64 };
                    k <= cutoff
                })
                .collect();
            self.fft_lines(axis, &mut out, ncomp, |k, v| {
                if !keep[k] {
                    *v = Complex64::new(0.0, 0.0);
                }
            });
        }
        out
    }
}
