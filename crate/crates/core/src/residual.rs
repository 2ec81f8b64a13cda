//! Scale-free residuals and their sample-wise maxima.

/// `|value| / (1 + max |term|)`.
pub fn normalized(value: f64, terms: &[f64]) -> f64 {
    let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let r = value.abs() / (1.0 + scale);
    if r.is_nan() {
        f64::INFINITY
    } else {
        r
    }
}

/// Running maximum of a residual together with the sample that attains it.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Worst {
    pub value: f64,
    pub sample: Option<usize>,
}

impl Worst {
    pub fn record(&mut self, value: f64, sample: usize) {
        let value = if value.is_nan() { f64::INFINITY } else { value };
        if self.sample.is_none() || value > self.value {
            self.value = value;
            self.sample = Some(sample);
        }
    }

    pub fn merge(&mut self, other: &Worst) {
        if let Some(s) = other.sample {
            self.record(other.value, s);
        }
    }

    pub fn below(&self, tol: f64) -> bool {
        self.value < tol
    }
}

/// Running minimum, maximum and mean of an estimated scalar.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stats {
    pub min: f64,
    pub max: f64,
    pub sum: f64,
    pub count: usize,
}

impl Default for Stats {
    fn default() -> Self {
        Self {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            sum: 0.0,
            count: 0,
        }
    }
}

impl Stats {
    pub fn push(&mut self, v: f64) {
        self.min = self.min.min(v);
        self.max = self.max.max(v);
        self.sum += v;
        self.count += 1;
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            self.sum / self.count as f64
        }
    }

    /// `max − min`, the spread across samples.
    pub fn spread(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.max - self.min
        }
    }
}
