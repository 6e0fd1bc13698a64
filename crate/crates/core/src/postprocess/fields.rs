use std::f64::consts::PI;
use std::sync::Arc;

use crate::assembly::{ScalarField, VectorField};

/// A scalar pressure field with its velocity `u = −∇p`.
#[derive(Clone)]
pub struct ReferenceFields {
    pub pressure: ScalarField,
    pub velocity: VectorField,
}

impl ReferenceFields {
    /// `p = eˣ sin y`, `u = (−eˣ sin y, −eˣ cos y)`.
    pub fn exp_sin() -> Self {
        ReferenceFields {
            pressure: Arc::new(|p| p[0].exp() * p[1].sin()),
            velocity: Arc::new(|p| [-p[0].exp() * p[1].sin(), -p[0].exp() * p[1].cos()]),
        }
    }

    /// `p = sin(πx) sin(πy)`.
    pub fn sine() -> Self {
        ReferenceFields {
            pressure: Arc::new(|p| (PI * p[0]).sin() * (PI * p[1]).sin()),
            velocity: Arc::new(|p| {
                [
                    -PI * (PI * p[0]).cos() * (PI * p[1]).sin(),
                    -PI * (PI * p[0]).sin() * (PI * p[1]).cos(),
                ]
            }),
        }
    }
}

impl std::fmt::Debug for ReferenceFields {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReferenceFields").finish_non_exhaustive()
    }
}
