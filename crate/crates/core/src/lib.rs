//! Bi-objective location-routing-inventory planning with a single supplier,
//! capacitated DCs and heterogeneous vehicle fleets.

pub mod decoder;
pub mod doe;
pub mod evaluation;
pub mod exact;
pub mod instance;
pub mod inventory;
pub mod front;
pub mod metrics;
pub mod moea;
pub mod stats;
