//! Parameter sequences driving the nibble and a checker for the weighted local
//! lemma conditions.
//!
//! `L_1 = (1+ε/9)Δ`, `T_1 = Δ`, `R_1 = εΔ/2`, then with `η = (1−e⁻²)²`:
//! `L' = ηL − L^{2/3}`, `T' = ηT + T^{2/3}`, `R' = (1−e⁻²)R + R^{2/3}`.
//! `i*` is the first `i` with `R_{i+1} < (ε²/18)²Δ/128`.

use crate::numeric::pow_two_thirds;
use serde::Serialize;
use thiserror::Error;

pub const STOPPING_GUARD: usize = 1000;

#[derive(Debug, Error, PartialEq)]
pub enum ScheduleError {
    #[error("invalid schedule input: {0}")]
    InvalidInput(String),
    #[error("R stays above the stopping threshold {threshold} for {guard} iterations (R = {last_r})")]
    StoppingRuleNotReached { guard: usize, last_r: f64, threshold: f64 },
    #[error("beta {beta} does not equal exp(2 ln 2 / nu) = {expected}")]
    BetaNuMismatch { beta: f64, expected: f64 },
    #[error("event {index}: {reason}")]
    InvalidEvent { index: usize, reason: String },
}

pub fn eta() -> f64 {
    let q = 1.0 - (-2.0f64).exp();
    q * q
}

/// Stopping threshold `(ε²/18)²Δ/128`.
pub fn stopping_threshold(eps: f64, delta: usize) -> f64 {
    let a = eps * eps / 18.0;
    a * a * delta as f64 / 128.0
}

/// `Ψ = 4^exponent`, stored by exponent so very long schedules stay exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Psi {
    exponent: u32,
}

impl Psi {
    pub fn from_exponent(exponent: u32) -> Self {
        Psi { exponent }
    }

    pub fn exponent(self) -> u32 {
        self.exponent
    }

    /// Exact while the value is representable (exponents up to 511).
    pub fn value(self) -> f64 {
        4f64.powi(self.exponent as i32)
    }

    pub fn as_u128(self) -> Option<u128> {
        (self.exponent < 64).then(|| 1u128 << (2 * self.exponent))
    }

    /// `count <= Ψ` without overflow.
    pub fn admits(self, count: usize) -> bool {
        self.as_u128().is_none_or(|v| count as u128 <= v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StopRule {
    /// `i*` from the threshold rule.
    Threshold,
    /// `i*` supplied by the caller.
    Forced,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScheduleParams {
    pub eps: f64,
    pub delta: usize,
    pub girth: usize,
    pub k: usize,
    pub eta: f64,
    pub i_star: usize,
    pub stop: StopRule,
    l: Vec<f64>,
    t: Vec<f64>,
    r: Vec<f64>,
    l_primed: Vec<f64>,
    t_primed: Vec<f64>,
    r_primed: Vec<f64>,
    psi: Vec<Psi>,
    lambda: Vec<f64>,
}

fn step(l: f64, t: f64, r: f64) -> (f64, f64, f64) {
    let q = 1.0 - (-2.0f64).exp();
    (eta() * l - pow_two_thirds(l), eta() * t + pow_two_thirds(t), q * r + pow_two_thirds(r))
}

#[allow(clippy::neg_cmp_op_on_partial_ord)] // rejects NaN too
fn validate(eps: f64, delta: usize, girth: usize) -> Result<(), ScheduleError> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(ScheduleError::InvalidInput(format!("eps must be positive, got {eps}")));
    }
    if delta < 1 {
        return Err(ScheduleError::InvalidInput("delta must be at least 1".into()));
    }
    if girth < 3 {
        return Err(ScheduleError::InvalidInput(format!("girth must be at least 3, got {girth}")));
    }
    Ok(())
}

/// Smallest `i >= 1` with `R_{i+1}` below the stopping threshold.
pub fn stopping_index(eps: f64, delta: usize) -> Result<usize, ScheduleError> {
    let threshold = stopping_threshold(eps, delta);
    let (mut l, mut t, mut r) = (0.0, 0.0, eps * delta as f64 / 2.0);
    for i in 1..=STOPPING_GUARD {
        (l, t, r) = step(l, t, r);
        if r < threshold {
            return Ok(i);
        }
    }
    Err(ScheduleError::StoppingRuleNotReached { guard: STOPPING_GUARD, last_r: r, threshold })
}

pub fn compute_schedule(eps: f64, delta: usize, girth: usize) -> Result<ScheduleParams, ScheduleError> {
    validate(eps, delta, girth)?;
    let i_star = stopping_index(eps, delta)?;
    Ok(build(eps, delta, girth, i_star, StopRule::Threshold))
}

/// Schedule with a caller-chosen number of iterations, for inputs whose
/// stopping threshold is out of reach (every desk-scale `Δ`).
pub fn schedule_with_iterations(
    eps: f64,
    delta: usize,
    girth: usize,
    i_star: usize,
) -> Result<ScheduleParams, ScheduleError> {
    validate(eps, delta, girth)?;
    if i_star == 0 || i_star > STOPPING_GUARD {
        return Err(ScheduleError::InvalidInput(format!("iterations must be in 1..={STOPPING_GUARD}")));
    }
    Ok(build(eps, delta, girth, i_star, StopRule::Forced))
}

fn build(eps: f64, delta: usize, girth: usize, i_star: usize, stop: StopRule) -> ScheduleParams {
    let d = delta as f64;
    let (mut l, mut t, mut r) = (vec![(1.0 + eps / 9.0) * d], vec![d], vec![eps * d / 2.0]);
    for i in 0..i_star {
        let (a, b, c) = step(l[i], t[i], r[i]);
        l.push(a);
        t.push(b);
        r.push(c);
    }
    assemble(eps, delta, girth, i_star, stop, l, t, r)
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    eps: f64,
    delta: usize,
    girth: usize,
    i_star: usize,
    stop: StopRule,
    l: Vec<f64>,
    t: Vec<f64>,
    r: Vec<f64>,
) -> ScheduleParams {
    let k = girth / 2;
    let (l_primed, t_primed, r_primed) = primed_from(&l, &t, &r, i_star);
    let psi: Vec<Psi> = (1..=i_star + 1).map(|i| Psi::from_exponent((2 + i_star - i) as u32)).collect();
    let psi1 = psi[0].value();
    let lambda = (1..=i_star + 1).map(|i| 2.0 * k as f64 / 2f64.powi(i as i32 - 1) - 4.0 * psi1 * i as f64).collect();
    ScheduleParams {
        eps,
        delta,
        girth,
        k,
        eta: eta(),
        i_star,
        stop,
        l,
        t,
        r,
        l_primed,
        t_primed,
        r_primed,
        psi,
        lambda,
    }
}

fn primed_from(l: &[f64], t: &[f64], r: &[f64], i_star: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let e = eta();
    let lp = (0..=i_star).map(|i| e.powi(i as i32) * l[0]).collect();
    let tp = (0..=i_star).map(|i| e.powi(i as i32) * t[0]).collect();
    let rp = (0..=i_star).map(|i| e.powf(i as f64 / 2.0) * r[0]).collect();
    (lp, tp, rp)
}

impl ScheduleParams {
    /// Schedule from explicit `L`, `T`, `R` sequences (indices `1..=i*+1`),
    /// used to drive iterations on synthetic states.
    pub fn from_sequences(
        eps: f64,
        delta: usize,
        girth: usize,
        l: Vec<f64>,
        t: Vec<f64>,
        r: Vec<f64>,
    ) -> Result<Self, ScheduleError> {
        validate(eps, delta, girth)?;
        if l.len() < 2 || l.len() != t.len() || l.len() != r.len() {
            return Err(ScheduleError::InvalidInput("sequences need equal length of at least 2".into()));
        }
        let i_star = l.len() - 1;
        Ok(assemble(eps, delta, girth, i_star, StopRule::Forced, l, t, r))
    }

    pub fn iterations(&self) -> usize {
        self.i_star
    }

    pub fn threshold(&self) -> f64 {
        stopping_threshold(self.eps, self.delta)
    }

    fn idx(&self, i: usize) -> usize {
        assert!(i >= 1 && i <= self.i_star + 1, "index {i} outside 1..={}", self.i_star + 1);
        i - 1
    }

    pub fn l(&self, i: usize) -> f64 {
        self.l[self.idx(i)]
    }
    pub fn t(&self, i: usize) -> f64 {
        self.t[self.idx(i)]
    }
    pub fn r(&self, i: usize) -> f64 {
        self.r[self.idx(i)]
    }
    pub fn l_primed(&self, i: usize) -> f64 {
        self.l_primed[self.idx(i)]
    }
    pub fn t_primed(&self, i: usize) -> f64 {
        self.t_primed[self.idx(i)]
    }
    pub fn r_primed(&self, i: usize) -> f64 {
        self.r_primed[self.idx(i)]
    }
    pub fn psi(&self, i: usize) -> Psi {
        self.psi[self.idx(i)]
    }
    pub fn lambda(&self, i: usize) -> f64 {
        self.lambda[self.idx(i)]
    }

    /// CSV table: metadata rows, then one row per index `1..=i*+1`.
    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# eps,{}\n# delta,{}\n# girth,{}\n# k,{}\n# i_star,{}\n",
            self.eps, self.delta, self.girth, self.k, self.i_star
        );
        s.push_str("i,L_i,T_i,R_i,L'_i,T'_i,R'_i,Psi_i,Lambda_i\n");
        for i in 1..=self.i_star + 1 {
            let psi = match self.psi(i).as_u128() {
                Some(v) => v.to_string(),
                None => format!("4^{}", self.psi(i).exponent()),
            };
            s.push_str(&format!(
                "{i},{},{},{},{},{},{},{psi},{}\n",
                self.l(i),
                self.t(i),
                self.r(i),
                self.l_primed(i),
                self.t_primed(i),
                self.r_primed(i),
                self.lambda(i)
            ));
        }
        s
    }
}

/// `L'_{i+1} = η^i L_1`, `T'_{i+1} = η^i T_1`, `R'_{i+1} = η^{i/2} R_1`.
pub fn primed_sequences(p: &ScheduleParams) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    (p.l_primed.clone(), p.t_primed.clone(), p.r_primed.clone())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub i: usize,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    /// `L_i, T_i, R_i >= ε⁸Δ`.
    pub lower_l: Vec<BoundCheck>,
    pub lower_t: Vec<BoundCheck>,
    pub lower_r: Vec<BoundCheck>,
    /// `|X_i − X'_i| <= (X'_i)^{5/6}`.
    pub close_l: Vec<BoundCheck>,
    pub close_t: Vec<BoundCheck>,
    pub close_r: Vec<BoundCheck>,
    /// `L_i/T_i <= 1 + ε/9`, value is the ratio.
    pub ratio: Vec<BoundCheck>,
    pub max_ratio_deviation: f64,
}

impl LemmaReport {
    pub fn all_pass(&self) -> bool {
        [&self.lower_l, &self.lower_t, &self.lower_r, &self.close_l, &self.close_t, &self.close_r, &self.ratio]
            .iter()
            .all(|v| v.iter().all(|c| c.pass))
    }

    pub fn first_failure(&self, checks: &[BoundCheck]) -> Option<usize> {
        checks.iter().find(|c| !c.pass).map(|c| c.i)
    }
}

pub fn verify_schedule_lemmas(p: &ScheduleParams) -> LemmaReport {
    let n = p.i_star + 1;
    let floor = p.eps.powi(8) * p.delta as f64;
    let lower = |xs: &[f64]| -> Vec<BoundCheck> {
        (1..=n).map(|i| BoundCheck { i, value: xs[i - 1], bound: floor, pass: xs[i - 1] >= floor }).collect()
    };
    let close = |xs: &[f64], ps: &[f64]| -> Vec<BoundCheck> {
        (1..=n)
            .map(|i| {
                let (x, xp) = (xs[i - 1], ps[i - 1]);
                let bound = xp.powf(5.0 / 6.0);
                let value = (x - xp).abs();
                BoundCheck { i, value, bound, pass: value <= bound }
            })
            .collect()
    };
    let target = 1.0 + p.eps / 9.0;
    let ratio: Vec<BoundCheck> = (1..=n)
        .map(|i| {
            let value = p.l[i - 1] / p.t[i - 1];
            BoundCheck { i, value, bound: target, pass: value <= target }
        })
        .collect();
    let max_ratio_deviation = ratio.iter().map(|c| (c.value - target).abs()).fold(0.0, f64::max);
    LemmaReport {
        lower_l: lower(&p.l),
        lower_t: lower(&p.t),
        lower_r: lower(&p.r),
        close_l: close(&p.l, &p.l_primed),
        close_t: close(&p.t, &p.t_primed),
        close_r: close(&p.r, &p.r_primed),
        ratio,
        max_ratio_deviation,
    }
}

/// One event for the weighted local lemma: probability bound `h`, weight `w`,
/// and the indices of the events it depends on.
#[derive(Clone, Debug, PartialEq)]
pub struct LllEvent {
    pub h: f64,
    pub w: f64,
    pub dependencies: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LllEventCheck {
    /// `Σ_{s ∈ D_r} β^{w_s} h_s` against `w_r/ν`.
    pub sum: f64,
    pub sum_bound: f64,
    pub sum_ok: bool,
    /// `β^{w_r} h_r` against `1/2`.
    pub own: f64,
    pub own_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LllReport {
    pub events: Vec<LllEventCheck>,
}

impl LllReport {
    pub fn pass(&self) -> bool {
        self.events.iter().all(|e| e.sum_ok && e.own_ok)
    }
}

/// Evaluates conditions (b) and (c) of the weighted local lemma for every
/// event; condition (a), `P(E_r) <= h_r`, is the caller's claim.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn check_weighted_lll(events: &[LllEvent], beta: f64, nu: f64) -> Result<LllReport, ScheduleError> {
    let expected = (2.0 * std::f64::consts::LN_2 / nu).exp();
    if !(nu > 0.0) || ((beta - expected) / expected).abs() > 1e-12 {
        return Err(ScheduleError::BetaNuMismatch { beta, expected });
    }
    for (index, ev) in events.iter().enumerate() {
        let reason = if !(0.0..=1.0).contains(&ev.h) {
            Some(format!("h = {} outside [0, 1]", ev.h))
        } else if !(ev.w >= 1.0) {
            Some(format!("weight {} below 1", ev.w))
        } else {
            ev.dependencies.iter().find(|&&s| s >= events.len()).map(|s| format!("dependency {s} out of range"))
        };
        if let Some(reason) = reason {
            return Err(ScheduleError::InvalidEvent { index, reason });
        }
    }
    let weighted = |s: &LllEvent| beta.powf(s.w) * s.h;
    let checks = events
        .iter()
        .map(|ev| {
            let sum: f64 = ev.dependencies.iter().map(|&s| weighted(&events[s])).sum();
            let sum_bound = ev.w / nu;
            let own = weighted(ev);
            LllEventCheck { sum, sum_bound, sum_ok: sum <= sum_bound, own, own_ok: own <= 0.5 }
        })
        .collect();
    Ok(LllReport { events: checks })
}
