//! Discrete uniformization of genus-zero triangle meshes by vertex scaling.
//!
//! Given the combinatorics of a sphere triangulation, spherical edge lengths and
//! three marked vertices `X`, `Y`, `Z`, [`uniformize::uniformize`] finds the
//! discrete conformal factor `u` for which the scaled mesh is a convex polyhedron
//! inscribed in the unit sphere, normalized so that stereographic projection from
//! the north pole sends `Z → 0`, `Y → 1` and `X → ∞`.
//!
//! The crate is organized bottom-up:
//!
//! * [`mesh`]: triangulations, metric meshes, angles, curvature, Delaunay margins.
//! * [`calculus`]: flows, gradient, divergence, Laplacians, SPD solves.
//! * [`scaling`]: vertex scaling, cotangent weights, curvature Jacobian.
//! * [`stereo`]: stereographic projection and inscribed polyhedra.
//! * [`uniformize`]: the uniformization pipeline.
//! * [`lab`]: test surfaces with known answers and the convergence harness.
//! * [`io`] and [`cli`]: file formats and the `dunif` command line.

pub mod calculus;
pub mod error;
pub mod mesh;
pub mod scaling;
pub mod stereo;
pub mod uniformize;
pub mod lab;
pub mod io;
pub mod cli;

pub use error::{Error, Result, Stage};
