//! Spin-chain phase classification on a statevector simulator.
//!
//! The pipeline prepares approximate ground states with a checkerboard VQE,
//! stores only the circuit parameters, expands the training data with
//! Hamiltonian symmetries, and classifies phases with a small convolutional
//! network whose middle layer is a three-qubit circuit.

pub mod ansatz;
pub mod bench;
pub mod dataset;
pub mod error;
pub mod hamiltonian;
pub mod model;
pub mod optim;
pub mod qcnn;
pub mod statevector;
pub mod threads;
pub mod vqe;

pub use error::{Error, Result};
pub use model::Model;
