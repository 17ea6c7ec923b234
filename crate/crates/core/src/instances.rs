//! Small fixed instances used in tests, docs and the CLI examples.

use crate::arith::rat;
use crate::element::{AmbientElement, Key};
use crate::group::{Group, GroupSpec};
use crate::mult::{PairKey, StructureConstants};

/// Types `tau1` (`P∞ = {2}`) and `tau2` (`P∞ = {3}`), `m = (3, 2)`, `s = (1, 1)`,
/// `I_tau1(C) = {1}`.
pub fn g_ex_spec() -> GroupSpec {
    GroupSpec::default().with_type("tau1", &[2]).with_type("tau2", &[3]).with_b(0, 3, 1).with_b(1, 2, 1).with_c(0, &[1])
}

pub fn g_ex() -> Group {
    Group::new(g_ex_spec()).expect("fixed instance is valid")
}

/// `(2/3)e₀^(tau1) + 4e₁^(tau1) + (3/2)e₀^(tau2)`, with `β = 5 mod 6`.
pub fn x_ex() -> AmbientElement {
    AmbientElement::from_coords([(Key::new(0, 0), rat(2, 3)), (Key::new(0, 1), rat(4, 1)), (Key::new(1, 0), rat(3, 2))])
}

/// `(5/3)e₀^(tau1) + 10e₁^(tau1)`, with `ℓ = (5, 0)`.
pub fn g2() -> AmbientElement {
    AmbientElement::from_coords([(Key::new(0, 0), rat(5, 3)), (Key::new(0, 1), rat(10, 1))])
}

/// `e₀^(tau1) × e₁^(tau1) = e₀^(tau1)` on `G_ex`: extends to `G` but violates the
/// syntactic criterion.
pub fn discrepancy_constants() -> StructureConstants {
    StructureConstants::zero().with(PairKey::new(0, 0, 1), AmbientElement::basis(Key::new(0, 0)))
}
