//! Objective functions consumed by the optimizers.

/// Maps a candidate vector to a scalar cost (lower is better).
///
/// Implementations must be pure: the same candidate always yields the same
/// cost, so concurrent replicates can share one objective.
pub trait Objective: Sync {
    fn dim(&self) -> usize;

    fn evaluate(&self, x: &[f64]) -> f64;
}

impl<T: Objective + ?Sized> Objective for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        (**self).evaluate(x)
    }
}

/// `sum(x_j^2)`, used as a quick self-check problem.
#[derive(Debug, Clone, Copy)]
pub struct Sphere {
    pub dim: usize,
}

impl Objective for Sphere {
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }
}

/// Any closure `Fn(&[f64]) -> f64` with a declared dimension.
pub struct FnObjective<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnObjective<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Objective for FnObjective<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// Evaluates and maps NaN and infinities to `+inf` so they never win.
pub(crate) fn sanitized_eval<O: Objective + ?Sized>(objective: &O, x: &[f64]) -> f64 {
    let v = objective.evaluate(x);
    if v.is_finite() {
        v
    } else {
        f64::INFINITY
    }
}
