//! Success-history adaptation of F, C and the tournament divisor T.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Spreads and bounds of the parameter samplers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdaptationParams {
    /// Cauchy scale for F.
    #[serde(rename = "gamma_F")]
    pub gamma_f: f64,
    /// Normal standard deviation for C.
    #[serde(rename = "sigma_C")]
    pub sigma_c: f64,
    /// Normal standard deviation for T.
    #[serde(rename = "sigma_T")]
    pub sigma_t: f64,
    /// Lower bound of T; there is no upper bound.
    #[serde(rename = "T_min")]
    pub t_min: f64,
    /// Memory length `H`; each engine supplies its own default.
    #[serde(rename = "H", skip_serializing_if = "Option::is_none")]
    pub history: Option<usize>,
}

impl Default for AdaptationParams {
    fn default() -> Self {
        Self {
            gamma_f: 0.1,
            sigma_c: 0.1,
            sigma_t: 10.0,
            t_min: 100.0,
            history: None,
        }
    }
}

impl AdaptationParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.gamma_f >= 0.0 && self.sigma_c >= 0.0 && self.sigma_t >= 0.0 && self.t_min >= 1.0;
        if ok && self.gamma_f.is_finite() && self.sigma_c.is_finite() && self.sigma_t.is_finite() && self.t_min.is_finite() {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid adaptation parameters {self:?}")))
        }
    }
}

/// Circular memories `M_F`, `M_C` and optionally `M_T` with cursor `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessHistory {
    m_f: Vec<f64>,
    m_c: Vec<f64>,
    m_t: Option<Vec<f64>>,
    cursor: usize,
    params: AdaptationParams,
}

/// Parameters of one successful offspring.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SuccessSets {
    pub f: Vec<f64>,
    pub c: Vec<f64>,
    pub t: Vec<f64>,
    pub delta_f: Vec<f64>,
}

impl SuccessSets {
    pub fn clear(&mut self) {
        self.f.clear();
        self.c.clear();
        self.t.clear();
        self.delta_f.clear();
    }

    pub fn is_empty(&self) -> bool {
        self.delta_f.is_empty()
    }

    pub fn len(&self) -> usize {
        self.delta_f.len()
    }

    /// Records an offspring with `f(u) <= f(parent)`. Ties (`delta_f == 0`)
    /// carry no weight and are left out.
    pub fn push(&mut self, f: f64, c: f64, t: Option<f64>, delta_f: f64) {
        debug_assert!(delta_f >= 0.0);
        if delta_f > 0.0 {
            self.f.push(f);
            self.c.push(c);
            if let Some(t) = t {
                self.t.push(t);
            }
            self.delta_f.push(delta_f);
        }
    }
}

/// Weighted Lehmer mean `sum(w x^2) / sum(w x)`. A set of zeros (possible
/// for C) has mean 0.
pub fn lehmer_mean(values: &[f64], weights: &[f64]) -> f64 {
    assert!(!values.is_empty(), "Lehmer mean of an empty set");
    assert_eq!(values.len(), weights.len(), "values and weights differ in length");
    let (num, den) = values
        .iter()
        .zip(weights)
        .fold((0.0, 0.0), |(n, d), (x, w)| (n + w * x * x, d + w * x));
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

impl SuccessHistory {
    /// `M_F = M_C = 0.5`; `M_T = initial_t` when T is adapted.
    pub fn new(len: usize, initial_t: Option<f64>, params: AdaptationParams) -> Self {
        assert!(len > 0, "history length must be positive");
        Self {
            m_f: vec![0.5; len],
            m_c: vec![0.5; len],
            m_t: initial_t.map(|t| vec![t.max(params.t_min); len]),
            cursor: 0,
            params,
        }
    }

    pub fn len(&self) -> usize {
        self.m_f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m_f.is_empty()
    }

    pub fn cursor(&self) -> usize {
        self.cursor
    }

    pub fn m_f(&self) -> &[f64] {
        &self.m_f
    }

    pub fn m_c(&self) -> &[f64] {
        &self.m_c
    }

    pub fn m_t(&self) -> Option<&[f64]> {
        self.m_t.as_deref()
    }

    pub fn params(&self) -> &AdaptationParams {
        &self.params
    }

    /// Memory slot `r` shared by the F, C and T draws of one offspring.
    pub fn pick_slot(&self, rng: &mut RngStream) -> usize {
        rng.below(self.len())
    }

    /// Cauchy around `M_F[r]`, clipped to 1 from above, redrawn while `<= 0`.
    pub fn sample_f_at(&self, r: usize, rng: &mut RngStream) -> f64 {
        loop {
            let f = self.m_f[r] + self.params.gamma_f * rng.cauchy();
            if f > 0.0 {
                return f.min(1.0);
            }
        }
    }

    /// Normal around `M_C[r]`, clamped to `[0, 1]`.
    pub fn sample_c_at(&self, r: usize, rng: &mut RngStream) -> f64 {
        (self.m_c[r] + self.params.sigma_c * rng.normal()).clamp(0.0, 1.0)
    }

    /// Normal around `M_T[r]`, floored at `T_min`. Panics without `M_T`.
    pub fn sample_t_at(&self, r: usize, rng: &mut RngStream) -> f64 {
        let m_t = self.m_t.as_ref().expect("history does not adapt T");
        (m_t[r] + self.params.sigma_t * rng.normal()).max(self.params.t_min)
    }

    pub fn sample_f(&self, rng: &mut RngStream) -> f64 {
        let r = self.pick_slot(rng);
        self.sample_f_at(r, rng)
    }

    pub fn sample_c(&self, rng: &mut RngStream) -> f64 {
        let r = self.pick_slot(rng);
        self.sample_c_at(r, rng)
    }

    pub fn sample_t(&self, rng: &mut RngStream) -> f64 {
        let r = self.pick_slot(rng);
        self.sample_t_at(r, rng)
    }

    /// Writes the Lehmer means of a non-empty success set into slot `k` and
    /// advances `k`. An empty set leaves the history untouched.
    pub fn update(&mut self, sets: &SuccessSets) {
        if sets.is_empty() {
            return;
        }
        let k = self.cursor;
        self.m_f[k] = lehmer_mean(&sets.f, &sets.delta_f);
        self.m_c[k] = lehmer_mean(&sets.c, &sets.delta_f);
        if let Some(m_t) = self.m_t.as_mut() {
            if sets.t.len() == sets.delta_f.len() {
                m_t[k] = lehmer_mean(&sets.t, &sets.delta_f).max(self.params.t_min);
            }
        }
        self.cursor = (k + 1) % self.len();
    }
}
