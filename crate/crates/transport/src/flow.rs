use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64 as C64;
use vortexfield::{dbar_adj, moment_field, sup_norm, FlatBundleFamily, FlatCurve, NewtonReport, VortexConfig, VortexError};

use crate::psi::{pairing, solve_psi_from, PsiOperator};
use crate::{flat_form, toroidal_distance, TransportError};

#[derive(Debug, Clone, PartialEq)]
pub struct TransportOptions {
    /// Uniform steps on `[0, 1]`; path kinks are added as extra nodes.
    pub steps: usize,
    pub moment_tol: f64,
    pub psi_tol: f64,
    /// Step halvings tried before giving up on an interval.
    pub max_halvings: u32,
}

impl TransportOptions {
    pub fn new(steps: usize) -> Self {
        Self { steps, moment_tol: 1e-6, psi_tol: 1e-10, max_halvings: 6 }
    }

    /// Holonomy matching tolerance `10 h²`.
    pub fn match_tol(&self) -> f64 {
        10.0 / (self.steps * self.steps) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransportState {
    pub t: f64,
    pub alpha: Vec<C64>,
    pub phi: Vec<Vec<C64>>,
    /// Auxiliary (0,1)-form, with the right-hand velocity at kinks.
    pub psi: Vec<Vec<C64>>,
    /// Summand holonomies `ã_j(t)` of the family.
    pub holonomies: Vec<[f64; 2]>,
    /// Holonomy of `A`, `ζ` with `α_flat = 2π(ζ_X dx + ζ_Y dy)`.
    pub zeta: [f64; 2],
    pub moment_residual: f64,
    pub phi_l2: f64,
}

#[derive(Debug, Clone)]
pub struct TransportTrace {
    pub curve: FlatCurve,
    pub active: usize,
    pub states: Vec<TransportState>,
    /// Largest accepted step.
    pub h: f64,
    pub moment_tol: f64,
    pub match_tol: f64,
    pub rejections: usize,
}

impl TransportTrace {
    pub fn initial(&self) -> &TransportState {
        &self.states[0]
    }

    pub fn last(&self) -> &TransportState {
        self.states.last().expect("trace holds the initial state")
    }

    pub fn max_moment_residual(&self) -> f64 {
        self.states.iter().map(|s| s.moment_residual).fold(0.0, f64::max)
    }

    /// Largest toroidal distance between `-ζ(t)` and `ã_active(t)`.
    pub fn tracking_error(&self) -> f64 {
        self.states
            .iter()
            .map(|s| toroidal_distance([-s.zeta[0], -s.zeta[1]], s.holonomies[self.active]))
            .fold(0.0, f64::max)
    }

    /// Rebuilds a vortex configuration from a state; `u` is recovered from `|Φ|²`.
    pub fn config(&self, state: &TransportState) -> VortexConfig {
        let u = state.phi[self.active].iter().map(|z| 0.5 * (0.5 * z.norm_sqr()).ln()).collect();
        VortexConfig {
            curve: self.curve.clone(),
            holonomies: state.holonomies.clone(),
            active: self.active,
            zeta: state.zeta,
            u,
            alpha: state.alpha.clone(),
            phi: state.phi.clone(),
            newton: NewtonReport::default(),
        }
    }

    /// One JSON object per accepted step: `t`, `holonomy`, `moment_residual`, `phi_l2`.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for s in &self.states {
            let rec = serde_json::json!({
                "t": s.t,
                "holonomy": s.zeta,
                "moment_residual": s.moment_residual,
                "phi_l2": s.phi_l2,
            });
            out.push_str(&rec.to_string());
            out.push('\n');
        }
        out
    }
}

#[derive(Clone)]
struct Fields {
    alpha: Vec<C64>,
    phi: Vec<Vec<C64>>,
}

impl Fields {
    fn plus(&self, h: f64, d: &Fields) -> Fields {
        let add = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| x + h * y).collect::<Vec<_>>();
        Fields {
            alpha: add(&self.alpha, &d.alpha),
            phi: self.phi.iter().zip(&d.phi).map(|(a, b)| add(a, b)).collect(),
        }
    }
}

struct Flow<'a> {
    curve: &'a FlatCurve,
    family: &'a FlatBundleFamily,
    psi_tol: f64,
}

impl Flow<'_> {
    /// Right side of the transport system at time `t`; `tv` picks the velocity branch at kinks.
    fn rhs(&self, t: f64, tv: f64, y: &Fields, guess: &mut Vec<Vec<C64>>) -> Result<Fields, TransportError> {
        let c = self.curve;
        let hol = self.family.holonomies(t);
        let vel = self.family.velocities(tv);
        let sigma = self.family.tau.sigma(c, t);
        let op = PsiOperator::new(c, &y.alpha, &hol, &y.phi);
        let rhs: Vec<Vec<C64>> = y
            .phi
            .iter()
            .zip(&vel)
            .map(|(f, &v)| {
                let bdot = flat_form(c, v);
                f.iter().zip(&sigma).map(|(z, s)| (s + bdot) * z / SQRT_2).collect()
            })
            .collect();
        let psi = solve_psi_from(&op, &rhs, Some(guess), self.psi_tol)?;
        let u = pairing(&psi, &y.phi);
        let alpha = sigma.iter().zip(&u).map(|(s, w)| s - w / SQRT_2).collect();
        let phi = psi
            .iter()
            .enumerate()
            .map(|(j, s)| dbar_adj(c, op.summand_alpha(j), s).into_iter().map(|z| -C64::i() * z).collect())
            .collect();
        *guess = psi;
        Ok(Fields { alpha, phi })
    }

    fn rk4(&self, t: f64, h: f64, end: f64, y: &Fields, guess: &mut Vec<Vec<C64>>) -> Result<Fields, TransportError> {
        // velocities are sampled inside the current kink-free interval
        let tv = |s: f64| s.min(end - 1e-9 * h);
        let k1 = self.rhs(t, tv(t), y, guess)?;
        let k2 = self.rhs(t + 0.5 * h, tv(t + 0.5 * h), &y.plus(0.5 * h, &k1), guess)?;
        let k3 = self.rhs(t + 0.5 * h, tv(t + 0.5 * h), &y.plus(0.5 * h, &k2), guess)?;
        let k4 = self.rhs(t + h, tv(t + h), &y.plus(h, &k3), guess)?;
        let next = y.plus(h / 6.0, &k1).plus(h / 3.0, &k2).plus(h / 3.0, &k3).plus(h / 6.0, &k4);
        Ok(next)
    }

    fn state(&self, t: f64, y: Fields, guess: &mut Vec<Vec<C64>>) -> Result<TransportState, TransportError> {
        let c = self.curve;
        self.rhs(t, t, &y, guess)?;
        let psi = guess.clone();
        let tau = self.family.tau.tau(c, t);
        let moment_residual = sup_norm(&moment_field(c, &y.alpha, &y.phi, &tau));
        let phi_l2 = y.phi.iter().map(|f| c.norm_sq(f)).sum::<f64>().sqrt();
        let mean = c.integrate_c(&y.alpha) / c.area();
        let z = c.frame_to_lattice(mean);
        Ok(TransportState {
            t,
            zeta: [z[0] / (2.0 * PI), z[1] / (2.0 * PI)],
            holonomies: self.family.holonomies(t),
            alpha: y.alpha,
            phi: y.phi,
            psi,
            moment_residual,
            phi_l2,
        })
    }
}

/// Time nodes: the uniform grid merged with the kinks of every path.
pub fn time_nodes(family: &FlatBundleFamily, steps: usize) -> Vec<f64> {
    let mut nodes: Vec<f64> = (0..=steps).map(|i| i as f64 / steps as f64).collect();
    nodes.extend(family.kinks());
    nodes.sort_by(f64::total_cmp);
    nodes.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    nodes
}

pub fn transport(curve: &FlatCurve, family: &FlatBundleFamily, start: &VortexConfig, steps: usize) -> Result<TransportTrace, TransportError> {
    transport_opts(curve, family, start, &TransportOptions::new(steps))
}

/// RK4 on the transport system, halving the step when the moment residual drifts.
pub fn transport_opts(
    curve: &FlatCurve,
    family: &FlatBundleFamily,
    start: &VortexConfig,
    opts: &TransportOptions,
) -> Result<TransportTrace, TransportError> {
    if opts.steps == 0 {
        return Err(TransportError::InvalidInput("at least one time step is needed".into()));
    }
    if start.curve != *curve || start.phi.len() != family.n() {
        return Err(TransportError::InvalidInput("start configuration does not fit the family".into()));
    }
    let hol0 = family.holonomies(0.0);
    if let Some((a, b)) = hol0
        .iter()
        .zip(&start.holonomies)
        .find(|(a, b)| (a[0] - b[0]).abs() > 1e-9 || (a[1] - b[1]).abs() > 1e-9)
    {
        return Err(VortexError::HolonomyMismatch { field: *b, context: *a }.into());
    }
    let flow = Flow { curve, family, psi_tol: opts.psi_tol };
    let mut y = Fields { alpha: start.alpha.clone(), phi: start.phi.clone() };
    let mut guess: Vec<Vec<C64>> = y.phi.iter().map(|f| vec![C64::default(); f.len()]).collect();
    let first = flow.state(0.0, y.clone(), &mut guess)?;
    if first.moment_residual > opts.moment_tol {
        return Err(TransportError::TrackingLoss { time: 0.0, residual: first.moment_residual });
    }
    let mut states = vec![first];
    let (mut h_max, mut rejections) = (0.0f64, 0);
    let nodes = time_nodes(family, opts.steps);
    for w in nodes.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut halvings = 0;
        'retry: loop {
            let sub = 1usize << halvings;
            let h = (b - a) / sub as f64;
            let mut yy = y.clone();
            let mut g = guess.clone();
            let mut accepted = Vec::with_capacity(sub);
            for i in 0..sub {
                let t = a + i as f64 * h;
                let next = flow.rk4(t, h, b, &yy, &mut g)?;
                let te = if i + 1 == sub { b } else { t + h };
                let st = flow.state(te, next.clone(), &mut g)?;
                if st.moment_residual > opts.moment_tol {
                    if halvings == opts.max_halvings {
                        return Err(TransportError::TrackingLoss { time: te, residual: st.moment_residual });
                    }
                    halvings += 1;
                    rejections += 1;
                    continue 'retry;
                }
                accepted.push(st);
                yy = next;
            }
            h_max = h_max.max(h);
            y = yy;
            guess = g;
            states.extend(accepted);
            break;
        }
    }
    Ok(TransportTrace {
        curve: curve.clone(),
        active: start.active,
        states,
        h: h_max,
        moment_tol: opts.moment_tol,
        match_tol: opts.match_tol(),
        rejections,
    })
}
