//! Unit conventions and physical constants.
//!
//! The crate works in SI units except for the transport quantities that are
//! conventionally reported in hybrid units. The full convention, applied
//! everywhere without exception:
//!
//! | quantity           | unit        |
//! |--------------------|-------------|
//! | time               | s           |
//! | voltage            | V           |
//! | current            | A           |
//! | temperature        | K           |
//! | carrier density    | cm⁻³        |
//! | mobility           | cm²/(V·s)   |
//! | device geometry    | cm          |
//! | conductivity       | S/cm        |
//! | optical intensity  | mW/cm²      |
//! | activation energy  | meV         |
//! | energy             | J           |
//! | power density      | nW/mm²      |
//!
//! With density in cm⁻³, mobility in cm²/(V·s), and geometry in cm, the
//! conductivity n·e·μ comes out directly in S/cm and L/(σ·W·T) in Ω, so no
//! hidden conversion factors appear in the transport formulas. The only
//! explicit conversions are the mm²/cm² and mW/W factors in the energy and
//! power-density helpers, done through the constants below.

/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;

/// Boltzmann constant, meV/K.
pub const BOLTZMANN_MEV_PER_K: f64 = 8.617333e-2;

/// Photon energy conversion: E(eV) = EV_NM / λ(nm).
pub const EV_NM: f64 = 1239.842;

/// mm² → cm².
pub const MM2_TO_CM2: f64 = 1e-2;

/// mW → W.
pub const MW_TO_W: f64 = 1e-3;

/// W → nW.
pub const W_TO_NW: f64 = 1e9;
