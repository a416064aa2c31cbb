//! Szegő kernel of the Möbius image `w = 1/(z - z0)` of the exterior domain,
//! with respect to the point `w = 0`, from the Kerzman–Stein equation
//! `(I + A) S = conj(C_0)` on the boundary, `A = C* - C` with `C` the Cauchy
//! integral and `C_0` its kernel at `0`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::discretize::BoundaryDiscretization;
use crate::numeric::{gmres, solve_dense};
use crate::{Error, Result, C64};

/// Largest system solved by dense LU.
pub const DENSE_LIMIT: usize = 1024;
/// Largest system whose matrix is stored for GMRES; larger ones are applied matrix-free.
pub const STORED_LIMIT: usize = 4096;

const GMRES_TOL: f64 = 1e-13;

/// Boundary nodes in the `w`-plane, positively oriented around the image domain.
#[derive(Debug, Clone)]
pub struct MappedNodes {
    pub w: Vec<C64>,
    pub dw: Vec<C64>,
}

impl MappedNodes {
    /// The exterior orientation is reversed before inversion so the image
    /// domain lies to the left of every image curve.
    pub fn new(disc: &BoundaryDiscretization, z0: C64) -> Self {
        let (w, dw) = disc
            .points()
            .zip(disc.dz())
            .map(|(z, dz)| {
                let r = 1.0 / (z - z0);
                (r, dz * r * r)
            })
            .unzip();
        Self { w, dw }
    }
}

/// Boundary values of the Szegő kernel `S(·, 0)` and of the holomorphic part
/// `L0 = L - 1/(2πw)` of the Garabedian kernel.
#[derive(Debug, Clone)]
pub struct SzegoSolution {
    pub s: Vec<C64>,
    pub l0: Vec<C64>,
    /// `2π S(0, 0)`.
    pub gamma: f64,
    pub iterations: usize,
}

struct Kernel<'a> {
    w: &'a [C64],
    root: Vec<f64>,
    p: Vec<C64>,
    q: Vec<C64>,
}

impl<'a> Kernel<'a> {
    fn new(nodes: &'a MappedNodes) -> Self {
        let root: Vec<f64> = nodes.dw.iter().map(|d| d.norm().sqrt()).collect();
        let p: Vec<C64> = nodes.dw.iter().zip(&root).map(|(d, r)| d / (r * r) * *r).collect();
        let q = p.iter().map(|x| x.conj()).collect();
        Self { w: &nodes.w, root, p, q }
    }

    /// Entry `B_ij` of the symmetrized skew-Hermitian kernel.
    #[inline]
    fn entry(&self, i: usize, j: usize) -> C64 {
        if i == j {
            return C64::new(0.0, 0.0);
        }
        let d = self.w[j] - self.w[i];
        let inv = 1.0 / d.norm_sqr();
        let v = (self.p[j] * d.conj() * self.root[i] - self.q[i] * d * self.root[j]) * inv;
        // Multiplication by i/2π.
        C64::new(-v.im, v.re) / (2.0 * PI)
    }

    fn row(&self, i: usize, out: &mut [C64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.entry(i, j);
        }
    }
}

/// Solves the integral equation on `nodes`.
pub fn solve(nodes: &MappedNodes) -> Result<SzegoSolution> {
    let n = nodes.w.len();
    let kernel = Kernel::new(nodes);
    let rhs: Vec<C64> = (0..n)
        .map(|i| {
            let t = nodes.dw[i] / nodes.dw[i].norm();
            (t / (C64::new(0.0, 2.0 * PI) * nodes.w[i])).conj() * kernel.root[i]
        })
        .collect();

    let (x, iterations) = if n <= DENSE_LIMIT {
        let mut m = DMatrix::<C64>::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
            for j in i + 1..n {
                let b = kernel.entry(i, j);
                m[(i, j)] = b;
                m[(j, i)] = -b.conj();
            }
        }
        (solve_dense(m, &rhs)?, 0)
    } else if n <= STORED_LIMIT {
        let mut m = vec![C64::new(0.0, 0.0); n * n];
        m.par_chunks_mut(n).enumerate().for_each(|(i, row)| kernel.row(i, row));
        let apply = |x: &[C64], y: &mut [C64]| {
            y.par_iter_mut().enumerate().for_each(|(i, yi)| {
                let row = &m[i * n..(i + 1) * n];
                *yi = x[i] + row.iter().zip(x).map(|(a, b)| a * b).sum::<C64>();
            });
        };
        let (x, report) = gmres(apply, &rhs, GMRES_TOL, 80, 4000)?;
        (x, report.iterations)
    } else {
        let apply = |x: &[C64], y: &mut [C64]| {
            y.par_iter_mut().enumerate().for_each(|(i, yi)| {
                let mut acc = x[i];
                for (j, xj) in x.iter().enumerate() {
                    acc += kernel.entry(i, j) * xj;
                }
                *yi = acc;
            });
        };
        let (x, report) = gmres(apply, &rhs, GMRES_TOL, 80, 4000)?;
        (x, report.iterations)
    };

    let s: Vec<C64> = x.iter().zip(&kernel.root).map(|(x, r)| x / *r).collect();
    let s00: C64 = s.iter().zip(&nodes.dw).zip(&nodes.w).map(|((s, dw), w)| s * dw / w).sum::<C64>()
        / C64::new(0.0, 2.0 * PI);
    if !(s00.re > 0.0) || !s00.re.is_finite() {
        return Err(Error::Accuracy(format!("Szegő kernel value S(0,0) = {s00} is not positive")));
    }
    let l0 = s
        .iter()
        .zip(&nodes.dw)
        .zip(&nodes.w)
        .map(|((s, dw), w)| {
            let t = dw / dw.norm();
            C64::new(0.0, 1.0) * (s * t).conj() - 1.0 / (2.0 * PI * w)
        })
        .collect();
    Ok(SzegoSolution { s, l0, gamma: 2.0 * PI * s00.re, iterations })
}

