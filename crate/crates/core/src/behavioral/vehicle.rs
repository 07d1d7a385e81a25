use super::var;
use crate::cosim::{Behavior, StepResult, Variables};
use crate::fmi_map::{Causality, FmiType, FmiVariable, ModelDescription, Value};
use crate::time::RationalTime;

const TORQUE: u32 = 1;
const SPEED: u32 = 2;

const PARAMETERS: [(&str, &str); 16] = [
    ("Mass", "1600"),
    ("Rated_Power", "67113"),
    ("Gear_Ratio", "9.7"),
    ("Wheel_Radius", "0.32"),
    ("Rolling_Resistance", "0.01"),
    ("Drag_Coefficient", "0.29"),
    ("Frontal_Area", "2.3"),
    ("Air_Density", "1.225"),
    ("Gravity", "9.81"),
    ("Driveline_Efficiency", "0.92"),
    ("Regen_Efficiency", "0.7"),
    ("Max_Motor_Torque", "250"),
    ("Road_Grade", "0"),
    ("Wheel_Inertia", "1.2"),
    ("Min_Speed_Epsilon", "0.5"),
    ("Initial_Speed", "0"),
];

/// Physical constants read from the parameter variables at initialization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleParams {
    pub mass: f64,
    pub rated_power: f64,
    /// Wheel force per unit motor torque, 1/m.
    pub drive_gain: f64,
    /// Rolling resistance, N.
    pub c0: f64,
    /// Aerodynamic drag coefficient, N·s²/m².
    pub c2: f64,
    pub max_torque: f64,
    /// Lower bound on the speed used for the power limit, m/s.
    pub speed_epsilon: f64,
    pub initial_speed_kmh: f64,
}

impl VehicleParams {
    fn from_vars(vars: &Variables) -> Self {
        let p = |name: &str| {
            let vr = 3 + PARAMETERS.iter().position(|(n, _)| *n == name).expect("known parameter") as u32;
            vars.f64(vr)
        };
        Self {
            mass: p("Mass"),
            rated_power: p("Rated_Power"),
            drive_gain: p("Gear_Ratio") / p("Wheel_Radius"),
            c0: p("Rolling_Resistance") * p("Mass") * p("Gravity"),
            c2: 0.5 * p("Air_Density") * p("Drag_Coefficient") * p("Frontal_Area"),
            max_torque: p("Max_Motor_Torque"),
            speed_epsilon: p("Min_Speed_Epsilon"),
            initial_speed_kmh: p("Initial_Speed"),
        }
    }

    /// Wheel force for a motor torque at speed `v` (m/s), limited by rated power.
    /// Braking torque has no effect at standstill.
    pub fn tractive_force(&self, torque: f64, v: f64) -> f64 {
        let limit = self.rated_power / v.max(self.speed_epsilon);
        let f = (torque.clamp(-self.max_torque, self.max_torque) * self.drive_gain).clamp(-limit, limit);
        if v <= 0.0 {
            f.max(0.0)
        } else {
            f
        }
    }

    /// Opposing force; at rest it only cancels what would otherwise move the car.
    pub fn resistive_force(&self, tractive: f64, v: f64) -> f64 {
        if v <= 0.0 {
            self.c0.min(tractive.max(0.0))
        } else {
            self.c0 + self.c2 * v * v
        }
    }

    pub fn acceleration(&self, torque: f64, v: f64) -> f64 {
        let f = self.tractive_force(torque, v);
        (f - self.resistive_force(f, v)) / self.mass
    }
}

/// Longitudinal vehicle with the interface of the single-pedal plant FMU:
/// torque request in N·m, speed out in km/h, explicit Euler at 10 ms.
#[derive(Debug, Clone)]
pub struct Vehicle {
    pub substep: f64,
    speed: f64,
    params: Option<VehicleParams>,
}

impl Default for Vehicle {
    fn default() -> Self {
        Self { substep: 0.01, speed: 0.0, params: None }
    }
}

impl Vehicle {
    pub fn description() -> ModelDescription {
        let mut variables = vec![
            var("time", 0, FmiType::Float64, Causality::Independent, None),
            var("Torque_Request", TORQUE, FmiType::Float64, Causality::Input, Some("0")),
            var("Vehicle_Speed", SPEED, FmiType::Float64, Causality::Output, None),
        ];
        variables.extend(PARAMETERS.iter().enumerate().map(|(i, (name, start))| FmiVariable {
            name: name.to_string(),
            value_reference: 3 + i as u32,
            fmi_type: FmiType::Float64,
            causality: Causality::Parameter,
            start: Some(start.to_string()),
        }));
        ModelDescription {
            fmi_version: "3.0".into(),
            model_name: "SinglePedalVehicle".into(),
            model_identifier: "SinglePedalVehicle".into(),
            instantiation_token: "{6f1c2d0e-4b7a-4c55-9e21-3a8d5f0b7c19}".into(),
            variables,
            default_step_size: Some(RationalTime::from_secs(1)),
        }
    }

    /// Speed in m/s.
    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn params(&self) -> Option<VehicleParams> {
        self.params
    }
}

impl Behavior for Vehicle {
    fn model_description(&self) -> ModelDescription {
        Self::description()
    }

    fn initialize(&mut self, vars: &mut Variables) {
        let params = VehicleParams::from_vars(vars);
        self.speed = (params.initial_speed_kmh / 3.6).max(0.0);
        self.params = Some(params);
        vars.set(SPEED, Value::Float64(self.speed * 3.6));
    }

    fn step(&mut self, vars: &mut Variables, _current: RationalTime, step: RationalTime) -> StepResult {
        let params = *self.params.get_or_insert_with(|| VehicleParams::from_vars(vars));
        let torque = vars.f64(TORQUE);
        let h = step.to_f64();
        let n = (h / self.substep).round().max(1.0) as u64;
        let dt = h / n as f64;
        for _ in 0..n {
            self.speed = (self.speed + params.acceleration(torque, self.speed) * dt).max(0.0);
        }
        vars.set(SPEED, Value::Float64(self.speed * 3.6));
        StepResult::completed(step)
    }
}
