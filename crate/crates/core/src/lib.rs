//! Quaternion rings `(a, b / Z/nZ)`: arithmetic, classification into the
//! Hamilton or `(1, 1)` class, and checkable isomorphism witnesses.

pub mod classify;
pub mod congruence;
pub mod matrep;
pub mod modint;
pub mod oracle;
pub mod quat;
