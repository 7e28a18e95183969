//! Exact counting, spectral and dispersion analysis of stateful digit-wise
//! operations such as carry propagation in base-`p` addition.
//!
//! A binary-state operation is summarised by its GEN/PROP/KILL class sizes
//! `(g, t, k)`. The number of length-`L` words in which no PROP symbol
//! receives a carry satisfies `a(L) = N a(L-1) - g t a(L-2)`:
//!
//! ```
//! use cascade_core::{count_cascade_free, GpkDecomposition};
//!
//! let gpk = GpkDecomposition::new(1, 2, 1).unwrap();
//! let counts = count_cascade_free(&gpk, 5);
//! let values: Vec<String> = counts.iter().map(|v| v.to_string()).collect();
//! assert_eq!(values, ["1", "4", "14", "48", "164", "560"]);
//! ```

pub mod avoidance;
pub mod chebyshev;
pub mod cli;
pub mod counting;
pub mod error;
pub mod golden;
pub mod instances;
pub mod markov;
pub mod opspec;
pub mod oracle;
pub mod output;
pub mod poisson;

pub use avoidance::{
    char_poly, count_avoiding, restrict, universality_equal, CharPoly, RestrictedTransferMatrix,
    StatefulOperation,
};
pub use chebyshev::{spectral_data, verify_chebyshev_representation, Coupling, SpectralData};
pub use counting::{count_cascade_free, CountSequence, GpkDecomposition, TransferMatrix2};
pub use error::{Error, Result};
pub use instances::{Instance, InstanceDescriptor, InstanceKind};
pub use markov::{markov_chain, moments, MarkovChain, MomentReport, Regime};
pub use poisson::{poisson_root, PoissonRoot};
