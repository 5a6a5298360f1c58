//! Finite quandles, biquandles, multiple conjugation quandles and biquandles,
//! G-families, and coloring enumeration on diagrams of Y-oriented spatial
//! trivalent graphs.

pub mod linalg;
pub mod ring;
pub mod axioms;
pub mod quandle;
pub mod group;
pub mod mcq;
pub mod family;
pub mod diagram;
pub mod moves;
pub mod coloring;
pub mod formats;
