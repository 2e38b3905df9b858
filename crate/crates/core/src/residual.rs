use crate::fields::Point;

/// Worst-case residual over a set of probes, with the probe that produced it.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Residual {
    pub value: f64,
    pub worst: Option<Point>,
}

impl Residual {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Records `value` at `p`; NaN counts as an infinite residual.
    pub fn observe(&mut self, value: f64, p: &Point) {
        let v = if value.is_nan() { f64::INFINITY } else { value.abs() };
        if self.worst.is_none() || v > self.value {
            self.value = v;
            self.worst = Some(p.clone());
        }
    }

    pub fn merge(&mut self, other: Residual) {
        if let Some(p) = other.worst {
            self.observe(other.value, &p);
        }
    }
}
