//! Run configuration and its line-based `key = value` file format.
//!
//! Scalars are plain numbers; vectors and tuples use `;` between elements and
//! `,` inside an element:
//!
//! ```text
//! # comment
//! gamma = 0.95
//! x_star = 1;2;3;4;0;0
//! arena = 1,1;1,5;2,5;2,3
//! sites = 1,1.5,4.25,0.3;2,4.5,1.5,0.3
//! ```
//!
//! Missing keys keep their defaults; unknown keys are rejected.

use std::f64::consts::PI;
use std::path::Path;

use crate::drive::{ExternalState, DEFAULT_EPS_SMOOTH, N_INTERNAL};
use crate::error::{Error, Result};
use crate::world::{Arena, ResourceSite};

/// How the heading enters the networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeadingInput {
    /// `θ / 2π`, one input.
    #[default]
    Linear,
    /// `(cos θ, sin θ)`, two inputs; periodic in `θ`.
    Circular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    // time and learning
    pub dt: f64,
    pub gamma: f64,
    pub eps_start: f64,
    pub eps_end: f64,
    pub lr_f: f64,
    pub lr_j: f64,
    pub steps: usize,
    pub seed: u64,
    pub f_hidden: Vec<usize>,
    pub j_hidden: Vec<usize>,
    pub eps_smooth: f64,
    pub heading_input: HeadingInput,

    // body
    pub decay: [f64; 4],
    pub m_consume: f64,
    pub rho_walk: f64,
    pub rho_run: f64,
    pub v_walk: f64,
    pub v_run: f64,
    pub omega: f64,
    pub kappa_walk: f64,
    pub kappa_run: f64,
    pub r_muscle: f64,
    pub sigma_wake: f64,
    pub sigma_sleep: f64,
    pub run_block: f64,
    pub walk_block: f64,
    pub forced_sleep: f64,
    pub t_sleep_min: f64,
    pub x_star: [f64; N_INTERNAL],
    pub x_max: f64,
    pub fatigue_max: f64,

    // perception and world
    pub view_range: f64,
    pub view_half_angle: f64,
    pub arena: Arena,
    pub sites: Vec<ResourceSite>,
    pub start: ExternalState,

    // oracle
    pub dt_oracle: f64,
    pub horizon_tol: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dt: 0.05,
            gamma: 0.95,
            eps_start: 0.9,
            eps_end: 0.05,
            lr_f: 1e-3,
            lr_j: 1e-3,
            steps: 200_000,
            seed: 1,
            f_hidden: vec![64, 64],
            j_hidden: vec![64, 64],
            eps_smooth: DEFAULT_EPS_SMOOTH,
            heading_input: HeadingInput::Linear,

            decay: [0.05; 4],
            m_consume: 0.5,
            rho_walk: 0.01,
            rho_run: 0.03,
            v_walk: 0.5,
            v_run: 1.5,
            omega: PI / 3.0,
            kappa_walk: 0.1,
            kappa_run: 0.4,
            r_muscle: 0.1,
            sigma_wake: 0.01,
            sigma_sleep: 0.2,
            run_block: 6.0,
            walk_block: 8.0,
            forced_sleep: 10.0,
            t_sleep_min: 1.0,
            x_star: [1.0, 2.0, 3.0, 4.0, 0.0, 0.0],
            x_max: 10.0,
            fatigue_max: 12.0,

            view_range: 3.0,
            view_half_angle: PI / 6.0,
            arena: Arena::default_maze(),
            sites: ResourceSite::defaults(),
            start: ExternalState::new(5.0, 3.25, 0.0),

            dt_oracle: 1e-3,
            horizon_tol: 1e-6,
        }
    }
}

impl RunConfig {
    /// Upper bound on the unsmoothed drive implied by the clipping bounds.
    pub fn drive_max(&self) -> f64 {
        let res: f64 = self.x_star[..4]
            .iter()
            .map(|&s| s.max(self.x_max - s).powi(2))
            .sum();
        let fat: f64 = self.x_star[4..]
            .iter()
            .map(|&s| s.max(self.fatigue_max - s).powi(2))
            .sum();
        (res + fat).sqrt()
    }

    /// Lower and upper bound of internal deviation `i`.
    pub fn delta_bounds(&self, i: usize) -> (f64, f64) {
        let cap = if i < 4 { self.x_max } else { self.fatigue_max };
        (-self.x_star[i], cap - self.x_star[i])
    }

    pub fn from_str(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: line_no,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|msg| Error::Parse { line: line_no, msg })?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_str(&text)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "dt" => self.dt = float(key, value)?,
            "gamma" => self.gamma = float(key, value)?,
            "eps_start" => self.eps_start = float(key, value)?,
            "eps_end" => self.eps_end = float(key, value)?,
            "lr_f" => self.lr_f = float(key, value)?,
            "lr_j" => self.lr_j = float(key, value)?,
            "steps" => self.steps = int(key, value)?,
            "seed" => self.seed = int(key, value)?,
            "f_hidden" => self.f_hidden = int_list(key, value)?,
            "j_hidden" => self.j_hidden = int_list(key, value)?,
            "eps_smooth" => self.eps_smooth = float(key, value)?,
            "heading_input" => {
                self.heading_input = match value {
                    "linear" => HeadingInput::Linear,
                    "circular" => HeadingInput::Circular,
                    _ => return Err(format!("`{key}` is `linear` or `circular`")),
                }
            }
            "decay" => {
                let v = float_list(key, value)?;
                self.decay = match v.len() {
                    1 => [v[0]; 4],
                    4 => [v[0], v[1], v[2], v[3]],
                    n => return Err(format!("`{key}` needs 1 or 4 values, got {n}")),
                };
            }
            "m_consume" => self.m_consume = float(key, value)?,
            "rho_walk" => self.rho_walk = float(key, value)?,
            "rho_run" => self.rho_run = float(key, value)?,
            "v_walk" => self.v_walk = float(key, value)?,
            "v_run" => self.v_run = float(key, value)?,
            "omega" => self.omega = float(key, value)?,
            "kappa_walk" => self.kappa_walk = float(key, value)?,
            "kappa_run" => self.kappa_run = float(key, value)?,
            "r_muscle" => self.r_muscle = float(key, value)?,
            "sigma_wake" => self.sigma_wake = float(key, value)?,
            "sigma_sleep" => self.sigma_sleep = float(key, value)?,
            "run_block" => self.run_block = float(key, value)?,
            "walk_block" => self.walk_block = float(key, value)?,
            "forced_sleep" => self.forced_sleep = float(key, value)?,
            "t_sleep_min" => self.t_sleep_min = float(key, value)?,
            "x_star" => {
                let v = float_list(key, value)?;
                if v.len() != N_INTERNAL {
                    return Err(format!("`{key}` needs {N_INTERNAL} values, got {}", v.len()));
                }
                self.x_star.copy_from_slice(&v);
            }
            "x_max" => self.x_max = float(key, value)?,
            "fatigue_max" => self.fatigue_max = float(key, value)?,
            "view_range" => self.view_range = float(key, value)?,
            "view_half_angle" => self.view_half_angle = float(key, value)?,
            "arena" => {
                let pts = tuples(key, value)?
                    .into_iter()
                    .map(|t| match t[..] {
                        [x, y] => Ok([x, y]),
                        _ => Err(format!("`{key}` vertices need 2 coordinates")),
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                self.arena = Arena::new(pts);
            }
            "sites" => {
                self.sites = tuples(key, value)?
                    .into_iter()
                    .map(|t| match t[..] {
                        [i, x, y, r] if i.fract() == 0.0 && (1.0..=4.0).contains(&i) => {
                            Ok(ResourceSite::new(i as usize, [x, y], r))
                        }
                        _ => Err(format!("`{key}` entries are `index,x,y,radius` with index 1-4")),
                    })
                    .collect::<std::result::Result<Vec<_>, _>>()?;
            }
            "start" => {
                let v = float_list(key, value)?;
                self.start = match v[..] {
                    [x, y] => ExternalState::new(x, y, 0.0),
                    [x, y, h] => ExternalState::new(x, y, h),
                    _ => return Err(format!("`{key}` is `x;y` or `x;y;heading`")),
                };
            }
            "dt_oracle" => self.dt_oracle = float(key, value)?,
            "horizon_tol" => self.horizon_tol = float(key, value)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("dt", self.dt),
            ("lr_f", self.lr_f),
            ("lr_j", self.lr_j),
            ("x_max", self.x_max),
            ("fatigue_max", self.fatigue_max),
            ("dt_oracle", self.dt_oracle),
            ("horizon_tol", self.horizon_tol),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(k, format!("must be positive, got {v}")));
            }
        }
        let nonneg = [
            ("eps_smooth", self.eps_smooth),
            ("m_consume", self.m_consume),
            ("rho_walk", self.rho_walk),
            ("rho_run", self.rho_run),
            ("v_walk", self.v_walk),
            ("v_run", self.v_run),
            ("omega", self.omega),
            ("kappa_walk", self.kappa_walk),
            ("kappa_run", self.kappa_run),
            ("r_muscle", self.r_muscle),
            ("sigma_wake", self.sigma_wake),
            ("sigma_sleep", self.sigma_sleep),
            ("run_block", self.run_block),
            ("walk_block", self.walk_block),
            ("forced_sleep", self.forced_sleep),
            ("t_sleep_min", self.t_sleep_min),
            ("view_range", self.view_range),
            ("view_half_angle", self.view_half_angle),
        ];
        for (k, v) in nonneg {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(k, format!("must be nonnegative, got {v}")));
            }
        }
        if self.decay.iter().any(|c| !(*c >= 0.0 && c.is_finite())) {
            return Err(Error::invalid("decay", "rates must be nonnegative"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::invalid("gamma", format!("must lie in (0, 1), got {}", self.gamma)));
        }
        for (k, v) in [("eps_start", self.eps_start), ("eps_end", self.eps_end)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(k, format!("must lie in [0, 1], got {v}")));
            }
        }
        if self.run_block > self.walk_block {
            return Err(Error::invalid("run_block", "must not exceed walk_block"));
        }
        if self.walk_block > self.forced_sleep {
            return Err(Error::invalid("walk_block", "must not exceed forced_sleep"));
        }
        if self.forced_sleep > self.fatigue_max {
            return Err(Error::invalid("forced_sleep", "must not exceed fatigue_max"));
        }
        for (i, &s) in self.x_star.iter().enumerate() {
            let cap = if i < 4 { self.x_max } else { self.fatigue_max };
            if !(0.0..=cap).contains(&s) {
                return Err(Error::invalid("x_star", format!("component {} outside [0, {cap}]", i + 1)));
            }
        }
        if self.steps == 0 {
            return Err(Error::invalid("steps", "must be at least 1"));
        }
        if self.f_hidden.contains(&0) {
            return Err(Error::invalid("f_hidden", "layer widths must be positive"));
        }
        if self.j_hidden.contains(&0) {
            return Err(Error::invalid("j_hidden", "layer widths must be positive"));
        }
        self.arena.validate().map_err(|m| Error::invalid("arena", m))?;
        for s in &self.sites {
            if !(s.radius > 0.0) {
                return Err(Error::invalid("sites", format!("site {} has nonpositive radius", s.resource_index)));
            }
            if !self.arena.contains(s.center) {
                return Err(Error::invalid("sites", format!("site {} center outside arena", s.resource_index)));
            }
        }
        if !self.arena.contains(self.start.position()) {
            return Err(Error::invalid("start", "start position outside arena"));
        }
        Ok(())
    }
}

fn float(key: &str, v: &str) -> std::result::Result<f64, String> {
    v.parse::<f64>()
        .map_err(|_| format!("`{key}`: cannot parse `{v}` as a number"))
}

fn int<T: std::str::FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
    v.parse::<T>()
        .map_err(|_| format!("`{key}`: cannot parse `{v}` as an integer"))
}

fn float_list(key: &str, v: &str) -> std::result::Result<Vec<f64>, String> {
    v.split(';').map(|p| float(key, p.trim())).collect()
}

fn int_list(key: &str, v: &str) -> std::result::Result<Vec<usize>, String> {
    v.split(';').map(|p| int(key, p.trim())).collect()
}

fn tuples(key: &str, v: &str) -> std::result::Result<Vec<Vec<f64>>, String> {
    v.split(';')
        .map(|t| t.split(',').map(|p| float(key, p.trim())).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(RunConfig::from_str("").unwrap(), RunConfig::default());
        assert_eq!(
            RunConfig::from_str("# only a comment\n\n").unwrap(),
            RunConfig::default()
        );
    }

    #[test]
    fn gamma_out_of_range_names_the_key() {
        let err = RunConfig::from_str("gamma = 1.5").unwrap_err();
        match err {
            Error::Invalid { key, .. } => assert_eq!(key, "gamma"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tuple_values_parse() {
        let cfg = RunConfig::from_str("x_star = 1;2;3;4;0;0\nf_hidden = 32;16\n").unwrap();
        assert_eq!(cfg.x_star, [1.0, 2.0, 3.0, 4.0, 0.0, 0.0]);
        assert_eq!(cfg.f_hidden, vec![32, 16]);

        let cfg = RunConfig::from_str(
            "arena = 0,0;4,0;4,4;0,4\nsites = 2,1,1,0.5\nstart = 2;2;1.0\n",
        )
        .unwrap();
        assert_eq!(cfg.arena.vertices().len(), 4);
        assert_eq!(cfg.sites[0].resource_index, 2);
        assert_eq!(cfg.start.heading, 1.0);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match RunConfig::from_str("dt = 0.1\nbogus = 3\n").unwrap_err() {
            Error::Parse { line, msg } => {
                assert_eq!(line, 2);
                assert!(msg.contains("bogus"));
            }
            other => panic!("unexpected {other:?}"),
        }
        match RunConfig::from_str("\n\ndt 0.1").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            RunConfig::from_str("x_star = 1;2").unwrap_err(),
            Error::Parse { line: 1, .. }
        ));
    }

    #[test]
    fn threshold_order_is_validated() {
        let err = RunConfig::from_str("run_block = 9").unwrap_err();
        assert!(matches!(err, Error::Invalid { ref key, .. } if key == "run_block"));
        let err = RunConfig::from_str("forced_sleep = 13").unwrap_err();
        assert!(matches!(err, Error::Invalid { ref key, .. } if key == "forced_sleep"));
        let err = RunConfig::from_str("sigma_wake = -0.1").unwrap_err();
        assert!(matches!(err, Error::Invalid { ref key, .. } if key == "sigma_wake"));
    }

    #[test]
    fn sites_outside_arena_are_rejected() {
        let err = RunConfig::from_str("sites = 1,6.5,4,0.3").unwrap_err();
        assert!(matches!(err, Error::Invalid { ref key, .. } if key == "sites"));
    }

    #[test]
    fn drive_bound_matches_clipping() {
        let cfg = RunConfig::default();
        let expected = (81.0f64 + 64.0 + 49.0 + 36.0 + 2.0 * 144.0).sqrt();
        assert!((cfg.drive_max() - expected).abs() < 1e-12);
    }
}
