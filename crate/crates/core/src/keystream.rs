//! Chen's chaotic system and the byte keystream drawn from its orbit.
//!
//! The system is
//!
//! ```text
//! dx/dt = a (y - x)
//! dy/dt = (c - a) x - x z + c y
//! dz/dt = x y - b z
//! ```
//!
//! with `a = 35`, `b = 3` and `c` in `[20, 28.4]`. The orbit is integrated with
//! fixed-step classical RK4. After a transient is discarded, each state emits
//! three bytes (x, y, z in that order), each `floor(|v| * 1e14) mod 256`.

use thiserror::Error;

use crate::key::SecretKey;

pub const CHEN_A: f64 = 35.0;
pub const CHEN_B: f64 = 3.0;
pub const CHEN_C_MIN: f64 = 20.0;
pub const CHEN_C_MAX: f64 = 28.4;

pub const DEFAULT_DT: f64 = 0.001;
pub const DEFAULT_TRANSIENT: usize = 3000;

const QUANTIZE_SCALE: f64 = 1e14;

#[derive(Debug, Error, PartialEq)]
pub enum ChaosError {
    #[error("Chen parameter c = {0} is outside [20, 28.4]")]
    ParameterOutOfRange(f64),
    #[error("integration step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("at least one integration step is required")]
    NoSteps,
    #[error("keystream length must be at least 1")]
    EmptyKeystream,
    #[error("Chen orbit diverged to a non-finite state at step {step}")]
    Diverged { step: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChenParams {
    a: f64,
    b: f64,
    c: f64,
}

impl ChenParams {
    pub fn new(c: f64) -> Result<Self, ChaosError> {
        if !(CHEN_C_MIN..=CHEN_C_MAX).contains(&c) {
            return Err(ChaosError::ParameterOutOfRange(c));
        }
        Ok(Self {
            a: CHEN_A,
            b: CHEN_B,
            c,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChenState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl ChenState {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    fn axpy(self, h: f64, d: ChenState) -> ChenState {
        ChenState::new(self.x + h * d.x, self.y + h * d.y, self.z + h * d.z)
    }
}

pub fn chen_derivative(s: ChenState, p: &ChenParams) -> ChenState {
    ChenState {
        x: p.a * (s.y - s.x),
        y: (p.c - p.a) * s.x - s.x * s.z + p.c * s.y,
        z: s.x * s.y - p.b * s.z,
    }
}

fn rk4_step(s: ChenState, p: &ChenParams, dt: f64) -> ChenState {
    let k1 = chen_derivative(s, p);
    let k2 = chen_derivative(s.axpy(dt / 2.0, k1), p);
    let k3 = chen_derivative(s.axpy(dt / 2.0, k2), p);
    let k4 = chen_derivative(s.axpy(dt, k3), p);
    ChenState::new(
        s.x + dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
        s.y + dt / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
        s.z + dt / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z),
    )
}

/// Step size and number of leading steps thrown away before sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub transient: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: DEFAULT_DT,
            transient: DEFAULT_TRANSIENT,
        }
    }
}

/// Iterator over post-transient RK4 states. Yields an error once, at the first
/// non-finite state, and then stops.
#[derive(Debug, Clone)]
pub struct ChenOrbit {
    state: ChenState,
    params: ChenParams,
    dt: f64,
    step: usize,
    transient: usize,
    failed: bool,
}

impl ChenOrbit {
    pub fn new(
        start: ChenState,
        params: ChenParams,
        config: &IntegratorConfig,
    ) -> Result<Self, ChaosError> {
        if !(config.dt.is_finite() && config.dt > 0.0) {
            return Err(ChaosError::InvalidStep(config.dt));
        }
        Ok(Self {
            state: start,
            params,
            dt: config.dt,
            step: 0,
            transient: config.transient,
            failed: false,
        })
    }

    fn advance(&mut self) -> Result<ChenState, ChaosError> {
        self.step += 1;
        self.state = rk4_step(self.state, &self.params, self.dt);
        if !self.state.is_finite() {
            self.failed = true;
            return Err(ChaosError::Diverged { step: self.step });
        }
        Ok(self.state)
    }
}

impl Iterator for ChenOrbit {
    type Item = Result<ChenState, ChaosError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        while self.step < self.transient {
            if let Err(e) = self.advance() {
                return Some(Err(e));
            }
        }
        Some(self.advance())
    }
}

/// Runs `steps` RK4 steps after the configured transient and returns every
/// sampled state.
pub fn integrate_chen(
    start: ChenState,
    params: &ChenParams,
    steps: usize,
    config: &IntegratorConfig,
) -> Result<Vec<ChenState>, ChaosError> {
    if steps == 0 {
        return Err(ChaosError::NoSteps);
    }
    ChenOrbit::new(start, *params, config)?
        .take(steps)
        .collect()
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Keystream(Vec<u8>);

impl Keystream {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        Self(bytes)
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }
}

impl std::fmt::Debug for Keystream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Keystream({} bytes)", self.0.len())
    }
}

pub fn quantize(v: f64) -> u8 {
    (v.abs() * QUANTIZE_SCALE).floor().rem_euclid(256.0) as u8
}

/// Number of orbit states needed for `len` bytes.
pub fn states_for_len(len: usize) -> usize {
    len.div_ceil(3)
}

pub fn derive_keystream(key: &SecretKey, len: usize) -> Result<Keystream, ChaosError> {
    derive_keystream_with(key, len, &IntegratorConfig::default())
}

pub fn derive_keystream_with(
    key: &SecretKey,
    len: usize,
    config: &IntegratorConfig,
) -> Result<Keystream, ChaosError> {
    if len == 0 {
        return Err(ChaosError::EmptyKeystream);
    }
    let params = ChenParams::new(key.c())?;
    let mut bytes = Vec::with_capacity(len + 2);
    for state in ChenOrbit::new(key.chen_start(), params, config)?.take(states_for_len(len)) {
        let s = state?;
        bytes.extend([quantize(s.x), quantize(s.y), quantize(s.z)]);
    }
    bytes.truncate(len);
    Ok(Keystream(bytes))
}
