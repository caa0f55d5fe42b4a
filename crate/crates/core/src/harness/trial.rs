use serde::{Deserialize, Serialize};

use super::scenario::ScenarioSpec;
use crate::costmap::{
    admissibility_threshold, apply_clearing, build_layer, critical_sum, height_measure, CostMap,
    QuadrantEvidence,
};
use crate::error::{Error, Result};
use crate::geometry::{Point2, Pose2D};
use crate::perception::{extract_footprints, summarize, ClassifierBackend};
use crate::planner::{
    detect_adverse, detect_sustained, record_safe, recovery_command, select_recovery_point,
    select_velocity, steering_target, Adverse, Caution, HistoryEntry, Mode, PlanOutcome, PlannerState, Variant,
};
use crate::costmap::UnsafeRegistry;
use crate::rng::{derive_seed, label_hash, seeded_rng};
use crate::world::{
    collision_check, in_dense_grass, step_dynamics, RobotState, VegClass, VelocityCommand,
    ROBOT_RADIUS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    Frozen,
    Collision,
    Timeout,
    RecoveryFailure,
}

/// Quadrant predictions against the ground-truth dominant class, counted
/// over every cycle. Quadrants showing only free ground are not counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct PredictionCounts {
    pub npv_total: u64,
    /// Non-pliable quadrants predicted pliable.
    pub false_positives: u64,
    pub pv_total: u64,
    /// Pliable quadrants predicted non-pliable.
    pub false_negatives: u64,
}

impl PredictionCounts {
    pub fn add(&mut self, other: &PredictionCounts) {
        self.npv_total += other.npv_total;
        self.false_positives += other.false_positives;
        self.pv_total += other.pv_total;
        self.false_negatives += other.false_negatives;
    }

    pub fn fpr(&self) -> Option<f64> {
        (self.npv_total > 0).then(|| self.false_positives as f64 / self.npv_total as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryEvent {
    pub detected_at: f64,
    pub kind: Adverse,
    /// Where the robot was when the condition was detected (marked unsafe).
    pub location: Point2,
    pub target: Option<Point2>,
    pub arrived_at: Option<f64>,
    /// Distance to the target on arrival.
    pub arrival_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub outcome: Outcome,
    pub seed: u64,
    /// Simulated time at the end of the trial.
    pub elapsed: f64,
    pub straight_line: f64,
    /// Straight-line distance from the start to the edge of the goal region.
    pub reach_distance: f64,
    pub path_length: f64,
    pub final_distance: f64,
    /// Pose after every control step, starting with the start pose.
    pub trajectory: Vec<Pose2D>,
    pub predictions: PredictionCounts,
    pub recoveries: Vec<RecoveryEvent>,
    pub snag_onsets: Vec<f64>,
    /// Cycles in which the velocity space was stunted.
    pub cautious_cycles: u64,
    pub unsafe_points: Vec<Point2>,
}

impl TrialResult {
    pub fn progress(&self) -> f64 {
        if self.straight_line > 0.0 {
            1.0 - self.final_distance / self.straight_line
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct TrialOptions {
    /// Classifier to use instead of the scenario's noisy oracle.
    pub backend: Option<ClassifierBackend>,
    /// Unsafe locations carried over from earlier trials.
    pub initial_unsafe: Vec<Point2>,
}

/// State exposed to observers once per control cycle, after the command has
/// been chosen and before it is applied.
#[derive(Debug)]
pub struct CycleSnapshot<'a> {
    pub t: f64,
    pub pose: Pose2D,
    pub mode: Mode,
    pub snagged: bool,
    /// Realized (v, omega) the planner started from.
    pub velocity: (f64, f64),
    /// Map the planner used this cycle.
    pub cost_map: &'a CostMap,
    pub unsafe_points: &'a [Point2],
    /// Odom-frame point the velocity search steered toward, if it ran.
    pub steering: Option<Point2>,
    pub command: VelocityCommand,
}

pub fn run_trial(spec: &ScenarioSpec, variant: Variant, seed: u64) -> Result<TrialResult> {
    run_trial_with(spec, variant, seed, &TrialOptions::default(), |_| {})
}

/// Closed loop at the planner period: perceive, build maps, plan, act.
pub fn run_trial_with(
    spec: &ScenarioSpec,
    variant: Variant,
    seed: u64,
    options: &TrialOptions,
    mut observe: impl FnMut(&CycleSnapshot<'_>),
) -> Result<TrialResult> {
    spec.validate()?;
    let world = spec.build_world()?;
    let p = &spec.planner;
    let geometry = spec.map;
    let threshold = admissibility_threshold(&spec.clearing);
    let oracle = ClassifierBackend::Oracle(spec.noise);
    let backend = options.backend.as_ref().unwrap_or(&oracle);
    let mut perception_rng = seeded_rng(derive_seed(&[seed, label_hash("perception")]));
    let mut dynamics_rng = seeded_rng(derive_seed(&[seed, label_hash("dynamics")]));

    let mut state = RobotState::new(spec.start, ROBOT_RADIUS);
    if collision_check(&world, &state.pose, state.radius) {
        return Err(Error::config("start pose overlaps a non-pliable obstacle"));
    }
    let mut unsafe_points = UnsafeRegistry::new(p.unsafe_radius);
    for u in &options.initial_unsafe {
        unsafe_points.add(*u);
    }
    let mut planner = PlannerState::with_unsafe(p, unsafe_points);
    planner.note_position(spec.start.position(), geometry.resolution);

    let dt = p.dt;
    let steps = (spec.duration / dt).ceil() as usize;
    let mut history = vec![HistoryEntry {
        t: 0.0,
        pose: state.pose,
        cmd_nonzero: false,
        frozen: false,
    }];
    let mut trajectory = vec![state.pose];
    let mut path_length = 0.0;
    let mut predictions = PredictionCounts::default();
    let mut recoveries: Vec<RecoveryEvent> = Vec::new();
    let mut snag_onsets = Vec::new();
    let mut cautious_cycles = 0;
    let mut forced = false;
    let mut frozen_run = 0;
    let mut guide: Option<Point2> = None;
    let mut outcome = None;
    let mut elapsed = 0.0;

    for k in 0..steps {
        let t = k as f64 * dt;
        let pose = state.pose;
        let origin = pose.as_transform();

        let [low, mid, high] = spec
            .lidar
            .heights
            .map(|z| spec.lidar.scan(&world, &pose, z).map(|s| build_layer(&s, geometry, origin)));
        let (low, mid, high) = (low?, mid?, high?);
        let crit = critical_sum(&low, &mid, &high)?;
        let footprints = extract_footprints(&world, &pose, &spec.camera, &geometry);
        let (matrix, truths) = backend.classify(&world, &footprints, &mut perception_rng)?;
        let mut classes = summarize(&matrix, spec.alpha);
        for c in classes.iter_mut() {
            if c.distance > spec.max_match_distance {
                c.class = VegClass::Unknown;
                c.pliable = false;
            }
        }
        for (truth, c) in truths.iter().zip(&classes) {
            if truth.is_non_pliable() {
                predictions.npv_total += 1;
                predictions.false_positives += u64::from(c.pliable);
            } else if truth.is_pliable() {
                predictions.pv_total += 1;
                predictions.false_negatives += u64::from(!c.pliable);
            }
        }

        let mut cost_map = if variant.clears() {
            let evidence: Vec<QuadrantEvidence<'_>> = footprints
                .iter()
                .zip(&classes)
                .map(|(fp, c)| QuadrantEvidence {
                    cells: &fp.map_cells,
                    classification: *c,
                    height: if variant.uses_height() {
                        height_measure(&crit, &fp.map_cells)
                    } else {
                        0.0
                    },
                })
                .collect();
            apply_clearing(&low, &evidence, &spec.clearing)
        } else {
            low
        };
        planner.stamp_unsafe(&mut cost_map);

        let mut frozen = false;
        if planner.mode == Mode::Recovering {
            frozen_run = 0;
        }
        let command = if planner.mode == Mode::Recovering {
            let target = planner.target().expect("recovering implies a target");
            let (vx, vy) = recovery_command(&pose, target, p.k_p, p.v_max);
            VelocityCommand::Holonomic { vx, vy }
        } else {
            let caution = variant.stunts().then(|| {
                Caution::new(
                    &geometry,
                    footprints.each_ref().map(|f| f.map_cells.as_slice()),
                    classes.map(|c| c.confidence),
                )
            });
            let goal = cost_map.to_body(spec.goal);
            let goal = if variant.guided() {
                let previous = guide.map(|g| cost_map.to_body(g));
                let target = steering_target(&cost_map, goal, previous, threshold, p);
                guide = Some(cost_map.to_odom(target));
                target
            } else {
                goal
            };
            match select_velocity(state.velocity, &cost_map, goal, caution.as_ref(), p, threshold) {
                PlanOutcome::Command(c) => {
                    frozen_run = 0;
                    planner.mode = if c.stunt.is_some() {
                        cautious_cycles += 1;
                        Mode::Cautious
                    } else {
                        Mode::Normal
                    };
                    VelocityCommand::Unicycle {
                        v: c.v,
                        omega: c.omega,
                    }
                }
                PlanOutcome::Frozen => {
                    frozen_run += 1;
                    frozen = frozen_run >= p.freeze_debounce;
                    VelocityCommand::STOP
                }
            }
        };

        observe(&CycleSnapshot {
            t,
            pose,
            mode: planner.mode,
            snagged: state.snagged,
            velocity: state.velocity,
            cost_map: &cost_map,
            unsafe_points: planner.unsafe_points.points(),
            steering: guide,
            command,
        });

        if let Some(at) = spec.forced_snag_at {
            if !forced && !state.snagged && t >= at - 1e-9 && in_dense_grass(&world, &state, spec.dynamics.snag_min_height) {
                state.force_snag(spec.dynamics.escape_time);
                forced = true;
                snag_onsets.push(t);
            }
        }
        let (next, events) = step_dynamics(&state, command, &world, dt, &spec.dynamics, &mut dynamics_rng);
        if events.snag_onset {
            snag_onsets.push(t);
        }
        path_length += next.pose.position().distance(&state.pose.position());
        state = next;
        trajectory.push(state.pose);
        let now = (k + 1) as f64 * dt;
        elapsed = now;
        let here = state.pose.position();

        if events.collision || events.out_of_bounds {
            outcome = Some(Outcome::Collision);
            break;
        }
        if here.distance(&spec.goal) <= p.goal_tolerance {
            outcome = Some(Outcome::Success);
            break;
        }
        history.push(HistoryEntry {
            t: now,
            pose: state.pose,
            cmd_nonzero: !command.is_zero(),
            frozen,
        });
        planner.note_position(here, geometry.resolution);

        if planner.mode == Mode::Recovering {
            let target = planner.target().expect("recovering implies a target");
            if planner.finish_recovery_if_arrived(here, p.arrival_tolerance) {
                let ev = recoveries.last_mut().expect("recovery was started");
                ev.arrived_at = Some(now);
                ev.arrival_error = Some(here.distance(&target));
                history.drain(..history.len() - 1);
            } else if recoveries.last().is_some_and(|ev| now - ev.detected_at > p.recovery_timeout) {
                outcome = Some(Outcome::RecoveryFailure);
                break;
            }
            continue;
        }

        let adverse = if variant.recovers() {
            detect_adverse(&history, p.freeze_window, p.epsilon)
        } else {
            detect_sustained(&history, p.freeze_window, p.epsilon)
        };
        if adverse.is_none() {
            record_safe(&mut planner, now, here, true, p.t_safe);
            continue;
        }
        if !variant.recovers() {
            outcome = Some(Outcome::Frozen);
            break;
        }
        guide = None;
        let selected = select_recovery_point(&mut planner, &state.pose, spec.goal, &mut cost_map, threshold, p);
        recoveries.push(RecoveryEvent {
            detected_at: now,
            kind: adverse,
            location: here,
            target: selected.ok(),
            arrived_at: None,
            arrival_error: None,
        });
        match selected {
            Ok(target) => {
                planner.begin_recovery(target);
                history.drain(..history.len() - 1);
            }
            Err(_) => {
                outcome = Some(Outcome::RecoveryFailure);
                break;
            }
        }
    }

    let final_distance = state.pose.position().distance(&spec.goal);
    Ok(TrialResult {
        outcome: outcome.unwrap_or(Outcome::Timeout),
        seed,
        elapsed,
        straight_line: spec.straight_line(),
        reach_distance: (spec.straight_line() - p.goal_tolerance).max(0.0),
        path_length,
        final_distance,
        trajectory,
        predictions,
        recoveries,
        snag_onsets,
        cautious_cycles,
        unsafe_points: planner.unsafe_points.points().to_vec(),
    })
}
