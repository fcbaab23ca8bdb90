//! Frame rendering for recorded replays, as text grids or SVG images.

use std::fmt::Write;

use thiserror::Error;

use super::svg::Svg;
use crate::config::{ConfigError, Domain};
use crate::cyber::{Cyber, CyberState};
use crate::posg::runner::replay_states;
use crate::posg::trace::{peek_header, EpisodeTrace, ReplayError};
use crate::posg::{Cell, Environment};
use crate::rideshare::{Lifecycle, Rideshare, RideshareState};
use crate::wildfire::{FireStatus, Wildfire, WildfireState};

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("replay line {line}: {message}")]
    Corrupt { line: usize, message: String },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

impl From<ReplayError> for RenderError {
    fn from(e: ReplayError) -> Self {
        RenderError::Corrupt { line: e.line, message: e.message }
    }
}

pub trait Render: Environment {
    fn text_frame(&self, state: &Self::State) -> String;
    fn svg_frame(&self, state: &Self::State) -> String;
}

fn letter(i: usize, upper: bool) -> char {
    let c = (b'a' + (i % 26) as u8) as char;
    if upper { c.to_ascii_uppercase() } else { c }
}

fn grid_text(height: usize, width: usize, mut cell: impl FnMut(Cell) -> char) -> String {
    let mut out = String::new();
    for y in 0..height {
        let row: Vec<String> = (0..width).map(|x| cell(Cell::new(y, x)).to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

const CELL: f64 = 40.0;

fn grid_svg(height: usize, width: usize, title: &str) -> Svg {
    let mut svg = Svg::new(width as f64 * CELL + 20.0, height as f64 * CELL + 50.0);
    svg.text(10.0, 20.0, 13.0, "start", title);
    for y in 0..height {
        for x in 0..width {
            svg.rect(10.0 + x as f64 * CELL, 35.0 + y as f64 * CELL, CELL, CELL, "#f4f4f4");
        }
    }
    svg
}

fn cell_origin(c: Cell) -> (f64, f64) {
    (10.0 + c.x as f64 * CELL, 35.0 + c.y as f64 * CELL)
}

impl Render for Wildfire {
    /// Intensity digits for active fires, `#` burned out, `o` put out,
    /// firefighter letters on top (lowercase while away refilling).
    fn text_frame(&self, state: &WildfireState) -> String {
        let cfg = self.settings();
        let mut out = format!("t={}  active fires: {}\n", state.t, state.active_fires().len());
        out += &grid_text(cfg.height, cfg.width, |c| {
            if let Some((i, a)) = state.agents.iter().enumerate().find(|(_, a)| a.position == c) {
                return letter(i, a.present);
            }
            match state.fires.iter().rev().find(|f| f.position == c) {
                Some(f) if f.status == FireStatus::Active => {
                    char::from_digit(f.intensity.min(9), 10).unwrap_or('+')
                }
                Some(f) if f.status == FireStatus::BurnedOut => '#',
                Some(_) => 'o',
                None => '.',
            }
        });
        for (i, a) in state.agents.iter().enumerate() {
            let _ = writeln!(
                out,
                "{} {} suppressant {}/{}{}",
                letter(i, a.present),
                a.id,
                a.suppressant,
                a.capacity,
                if a.present { String::new() } else { format!(" refilling ({} left)", a.refill_timer) }
            );
        }
        out
    }

    fn svg_frame(&self, state: &WildfireState) -> String {
        let cfg = self.settings();
        let mut svg = grid_svg(cfg.height, cfg.width, &format!("wildfire t={}", state.t));
        for f in &state.fires {
            let (x, y) = cell_origin(f.position);
            let fill = match f.status {
                FireStatus::Active => {
                    let heat = f.intensity as f64 / cfg.burnout_level as f64;
                    format!("rgb(255,{},0)", (200.0 * (1.0 - heat)) as u8)
                }
                FireStatus::BurnedOut => "#333".to_string(),
                FireStatus::PutOut => "#9ecae1".to_string(),
            };
            svg.rect(x, y, CELL, CELL, &fill);
            if f.is_active() {
                svg.text(x + CELL - 8.0, y + 12.0, 10.0, "middle", &f.intensity.to_string());
            }
        }
        for (i, a) in state.agents.iter().enumerate() {
            let (x, y) = cell_origin(a.position);
            svg.circle(x + CELL / 2.0, y + CELL / 2.0, CELL / 3.0, if a.present { "#2b8cbe" } else { "#ccc" });
            svg.text(x + CELL / 2.0, y + CELL / 2.0 + 4.0, 12.0, "middle", &letter(i, a.present).to_string());
        }
        svg.finish()
    }
}

fn agent_label(prefix: char, i: usize, present: bool) -> String {
    let p = if present { prefix.to_ascii_uppercase() } else { prefix };
    format!("{p}{i}")
}

impl Render for Cyber {
    /// One line per node; agents as `D<i>`/`X<i>`, lowercase while absent.
    fn text_frame(&self, state: &CyberState) -> String {
        let cfg = self.settings();
        let mut out = format!("t={}\n", state.t);
        for n in &state.nodes {
            let node = n.id as usize;
            let here: Vec<String> = state
                .defenders
                .iter()
                .enumerate()
                .filter(|(_, a)| a.location == node)
                .map(|(i, a)| agent_label('d', i, a.present))
                .chain(
                    state
                        .attackers
                        .iter()
                        .enumerate()
                        .filter(|(_, a)| a.location == node)
                        .map(|(i, a)| agent_label('x', i, a.present)),
                )
                .collect();
            let targets: Vec<String> = cfg.out_neighbors(node).iter().map(|t| t.to_string()).collect();
            let _ = writeln!(
                out,
                "node {node} [{}] -> {}  {}",
                n.state_index,
                if targets.is_empty() { "-".to_string() } else { targets.join(",") },
                here.join(" ")
            );
        }
        out
    }

    fn svg_frame(&self, state: &CyberState) -> String {
        let cfg = self.settings();
        let n = state.nodes.len().max(1);
        let (w, h) = (420.0, 440.0);
        let (cx, cy, r) = (w / 2.0, h / 2.0 + 10.0, 150.0);
        let pos = |i: usize| {
            let a = std::f64::consts::TAU * i as f64 / n as f64 - std::f64::consts::FRAC_PI_2;
            (cx + r * a.cos(), cy + r * a.sin())
        };
        let mut svg = Svg::new(w, h);
        svg.text(10.0, 20.0, 13.0, "start", &format!("cybersecurity t={}", state.t));
        for &[from, to] in &cfg.edges {
            let (a, b) = (pos(from), pos(to));
            svg.line(a.0, a.1, b.0, b.1, "#999");
        }
        const SHADES: [&str; 5] = ["#1a9850", "#91cf60", "#fee08b", "#fc8d59", "#d73027"];
        for node in &state.nodes {
            let (x, y) = pos(node.id as usize);
            svg.circle(x, y, 22.0, SHADES[node.state_index.min(4) as usize]);
            svg.text(x, y + 4.0, 12.0, "middle", &format!("{}:{}", node.id, node.state_index));
        }
        let mut mark = |agents: &[crate::cyber::env::structures::CyberAgent], prefix: char, dy: f64| {
            for (i, a) in agents.iter().enumerate() {
                let (x, y) = pos(a.location);
                svg.text(x + 26.0, y + dy + 12.0 * i as f64, 11.0, "start", &agent_label(prefix, i, a.present));
            }
        };
        mark(&state.defenders, 'd', -10.0);
        mark(&state.attackers, 'x', 14.0);
        svg.finish()
    }
}

impl Render for Rideshare {
    /// Drivers as letters, `o` for unaccepted and `a` for accepted passengers
    /// awaiting pickup.
    fn text_frame(&self, state: &RideshareState) -> String {
        let cfg = self.settings();
        let mut out = format!(
            "t={}  waiting: {}  completed: {}\n",
            state.t,
            state.count(Lifecycle::Unaccepted),
            state.count(Lifecycle::DroppedOff)
        );
        out += &grid_text(cfg.height, cfg.width, |c| {
            if let Some(i) = state.drivers.iter().position(|d| d.position == c) {
                return letter(i, true);
            }
            let waiting = |l: Lifecycle| state.tasks.iter().any(|t| t.lifecycle == l && t.position == c);
            if waiting(Lifecycle::Unaccepted) {
                'o'
            } else if waiting(Lifecycle::Accepted) {
                'a'
            } else {
                '.'
            }
        });
        for (i, d) in state.drivers.iter().enumerate() {
            let _ = writeln!(
                out,
                "{} {} at {} accepted {} riding {}",
                letter(i, true),
                d.id,
                d.position,
                d.accepted_count,
                d.riding_count
            );
        }
        out
    }

    fn svg_frame(&self, state: &RideshareState) -> String {
        let cfg = self.settings();
        let mut svg = grid_svg(cfg.height, cfg.width, &format!("rideshare t={}", state.t));
        for t in &state.tasks {
            let (x, y) = cell_origin(t.position);
            match t.lifecycle {
                Lifecycle::Unaccepted => svg.rect(x + 12.0, y + 12.0, 16.0, 16.0, "#f28e2b"),
                Lifecycle::Accepted => svg.rect(x + 12.0, y + 12.0, 16.0, 16.0, "#edc948"),
                _ => {}
            }
        }
        for (i, d) in state.drivers.iter().enumerate() {
            let (x, y) = cell_origin(d.position);
            svg.circle(x + CELL / 2.0, y + CELL / 2.0, CELL / 3.0, "#4e79a7");
            svg.text(x + CELL / 2.0, y + CELL / 2.0 + 4.0, 12.0, "middle", &letter(i, true).to_string());
        }
        svg.finish()
    }
}

/// The initial state and the state after every recorded step.
fn replayed<E: Render>(env: &E, text: &str) -> Result<(E::State, Vec<E::State>), RenderError> {
    let trace = EpisodeTrace::<E::Action, E::Event>::from_jsonl(text)?;
    replay_states(env, &trace).map_err(|(t, message)| RenderError::Corrupt { line: t + 2, message })
}

macro_rules! dispatch {
    ($text:expr, |$env:ident, $states:ident| $body:expr) => {{
        let header = peek_header($text)?;
        if header.config.domain() != header.domain {
            return Err(RenderError::Corrupt { line: 1, message: "header domain disagrees with its config".into() });
        }
        match &header.config {
            crate::config::EnvConfig::Wildfire(c) => {
                let $env = Wildfire::new(c.clone())?;
                let $states = replayed(&$env, $text)?;
                $body
            }
            crate::config::EnvConfig::Cybersecurity(c) => {
                let $env = Cyber::new(c.clone())?;
                let $states = replayed(&$env, $text)?;
                $body
            }
            crate::config::EnvConfig::Rideshare(c) => {
                let $env = Rideshare::new(c.clone())?;
                let $states = replayed(&$env, $text)?;
                $body
            }
        }
    }};
}

/// Text frames for the initial state and each step, with a `steps: N` footer.
pub fn render_text(text: &str) -> Result<String, RenderError> {
    dispatch!(text, |env, states| {
        let (initial, after) = states;
        let mut out = env.text_frame(&initial);
        for s in &after {
            out.push('\n');
            out += &env.text_frame(s);
        }
        let _ = writeln!(out, "\nsteps: {}", after.len());
        Ok(out)
    })
}

/// One SVG document per recorded step.
pub fn render_svgs(text: &str) -> Result<Vec<String>, RenderError> {
    dispatch!(text, |env, states| Ok(states.1.iter().map(|s| env.svg_frame(s)).collect()))
}

pub fn replay_domain(text: &str) -> Result<Domain, RenderError> {
    Ok(peek_header(text)?.domain)
}
