//! Simulation and analysis of mated-CRT random planar maps.
//!
//! The pipeline runs from a correlated Brownian pair ([`path`]) to the
//! ε-mated-CRT graph ([`map`]) and its planar triangulation structure
//! ([`planar`]), then to discrete potential theory on the graph
//! ([`laplace`]), simple random walks ([`walk`]) and scaling experiments
//! that check the continuum estimates at desk scale ([`experiments`]).
//!
//! ```
//! use mcrt::{map, path, planar};
//!
//! let pair = path::sample_brownian_pair(std::f64::consts::SQRT_2, 4.0, 1.0 / 256.0, 7).unwrap();
//! let cells = map::cell_minima(&pair, 1.0 / 32.0).unwrap();
//! let graph = map::build_graph(&cells).unwrap();
//! let structure = planar::planar_structure(&graph).unwrap();
//! assert_eq!(structure.euler_characteristic(), 2);
//! ```

pub mod error;
pub mod experiments;
pub mod io;
pub mod laplace;
pub mod map;
pub mod network;
pub mod path;
pub mod planar;
pub mod rng;
pub mod solver;
pub mod stats;
pub mod walk;
pub mod window;

pub use error::{McrtError, Result};
