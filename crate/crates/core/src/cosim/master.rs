use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Backend, CosimError, FmuInstance, Trace, TraceRow};
use crate::fmi_map::{Causality, Value};
use crate::time::RationalTime;

/// Consecutive early returns tolerated within one scheduled step.
pub const MAX_EARLY_RETURNS: u32 = 1000;

/// `instance.variable`; the instance name ends at the first dot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub struct PortRef {
    pub instance: String,
    pub variable: String,
}

impl PortRef {
    pub fn new(instance: impl Into<String>, variable: impl Into<String>) -> Self {
        Self { instance: instance.into(), variable: variable.into() }
    }
}

impl fmt::Display for PortRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.instance, self.variable)
    }
}

impl From<&str> for PortRef {
    fn from(s: &str) -> Self {
        let (instance, variable) = s.split_once('.').unwrap_or((s, ""));
        Self::new(instance, variable)
    }
}

impl From<String> for PortRef {
    fn from(s: String) -> Self {
        s.as_str().into()
    }
}

impl From<PortRef> for String {
    fn from(p: PortRef) -> String {
        p.to_string()
    }
}

impl FromStr for PortRef {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(s.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Connection {
    pub source: PortRef,
    pub sink: PortRef,
}

struct ScheduledInstance {
    id: String,
    backend: Box<dyn Backend>,
    step: RationalTime,
}

/// Everything needed to build a [`Network`].
pub struct CoSimSchedule {
    instances: Vec<ScheduledInstance>,
    pub connections: Vec<Connection>,
    pub stop_time: RationalTime,
    /// Recorded ports; empty means every output of every instance.
    pub record: Vec<PortRef>,
    pub parameters: Vec<(PortRef, Value)>,
}

impl CoSimSchedule {
    pub fn new(stop_time: RationalTime) -> Self {
        Self { instances: Vec::new(), connections: Vec::new(), stop_time, record: Vec::new(), parameters: Vec::new() }
    }

    pub fn instance(mut self, id: impl Into<String>, backend: Box<dyn Backend>, step: RationalTime) -> Self {
        self.instances.push(ScheduledInstance { id: id.into(), backend, step });
        self
    }

    pub fn connect(mut self, source: impl Into<PortRef>, sink: impl Into<PortRef>) -> Self {
        self.connections.push(Connection { source: source.into(), sink: sink.into() });
        self
    }

    pub fn record(mut self, port: impl Into<PortRef>) -> Self {
        self.record.push(port.into());
        self
    }

    pub fn parameter(mut self, port: impl Into<PortRef>, value: Value) -> Self {
        self.parameters.push((port.into(), value));
        self
    }

    pub fn instance_ids(&self) -> impl Iterator<Item = &str> {
        self.instances.iter().map(|i| i.id.as_str())
    }
}

impl fmt::Debug for CoSimSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoSimSchedule")
            .field("instances", &self.instances.iter().map(|i| (&i.id, i.step)).collect::<Vec<_>>())
            .field("connections", &self.connections)
            .field("stop_time", &self.stop_time)
            .field("record", &self.record)
            .finish()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RunStats {
    pub micro_step: RationalTime,
    /// Scheduled steps per instance, re-steps after early returns excluded.
    pub steps: BTreeMap<String, u64>,
    /// Every `doStep` call per instance.
    pub do_step_calls: BTreeMap<String, u64>,
    pub early_returns: BTreeMap<String, u64>,
    /// Instances whose final step was shortened to end at the stop time.
    pub truncated: Vec<(String, RationalTime)>,
    pub rows: usize,
}

#[derive(Debug, Clone)]
struct Link {
    source: usize,
    source_var: String,
    sink: usize,
    sink_var: String,
}

/// An initialized network, ready to run once.
#[derive(Debug)]
pub struct Network {
    instances: Vec<FmuInstance>,
    steps: Vec<RationalTime>,
    order: Vec<usize>,
    links: Vec<Link>,
    record: Vec<(usize, String)>,
    columns: Vec<String>,
    stop_time: RationalTime,
    micro_step: RationalTime,
}

fn find(ids: &[String], port: &PortRef) -> Result<usize, CosimError> {
    ids.iter().position(|id| *id == port.instance).ok_or_else(|| CosimError::UnknownInstance(port.instance.clone()))
}

/// Kahn's algorithm, lowest declaration index first. Instances on a cycle
/// follow in declaration order and see their predecessors' previous outputs.
fn step_order(n: usize, links: &[Link]) -> Vec<usize> {
    let mut indegree = vec![0usize; n];
    for l in links.iter().filter(|l| l.source != l.sink) {
        indegree[l.sink] += 1;
    }
    let mut order = Vec::with_capacity(n);
    let mut done = vec![false; n];
    while let Some(next) = (0..n).find(|&i| !done[i] && indegree[i] == 0) {
        done[next] = true;
        order.push(next);
        for l in links.iter().filter(|l| l.source == next && l.sink != next) {
            indegree[l.sink] -= 1;
        }
    }
    order.extend((0..n).filter(|&i| !done[i]));
    order
}

/// Checks the schedule, instantiates and initializes every instance.
pub fn instantiate(schedule: CoSimSchedule) -> Result<Network, CosimError> {
    let CoSimSchedule { instances: scheduled, connections, stop_time, record, parameters } = schedule;
    if scheduled.is_empty() {
        return Err(CosimError::EmptySchedule);
    }
    if stop_time.is_zero() {
        return Err(CosimError::InvalidStopTime);
    }
    let ids: Vec<String> = scheduled.iter().map(|s| s.id.clone()).collect();
    for (i, id) in ids.iter().enumerate() {
        if ids[..i].contains(id) {
            return Err(CosimError::DuplicateInstance(id.clone()));
        }
    }
    let mut instances = Vec::with_capacity(scheduled.len());
    let mut steps = Vec::with_capacity(scheduled.len());
    for s in scheduled {
        if s.step.is_zero() {
            return Err(CosimError::InvalidStepSize(s.id));
        }
        steps.push(s.step);
        instances.push(FmuInstance::new(s.id, s.backend)?);
    }

    let mut links = Vec::new();
    let mut driven: Vec<&PortRef> = Vec::new();
    for c in &connections {
        let (source, sink) = (find(&ids, &c.source)?, find(&ids, &c.sink)?);
        let out = instances[source].variable(&c.source.variable)?;
        let input = instances[sink].variable(&c.sink.variable)?;
        if out.causality != Causality::Output {
            return Err(CosimError::CausalityViolation {
                variable: c.source.to_string(),
                causality: out.causality,
                operation: "a connection source",
            });
        }
        if input.causality != Causality::Input {
            return Err(CosimError::CausalityViolation {
                variable: c.sink.to_string(),
                causality: input.causality,
                operation: "a connection sink",
            });
        }
        if out.fmi_type != input.fmi_type {
            return Err(CosimError::TypeMismatch {
                context: format!("{} -> {}", c.source, c.sink),
                expected: input.fmi_type,
                found: out.fmi_type,
            });
        }
        if driven.contains(&&c.sink) {
            return Err(CosimError::DuplicateSink(c.sink.to_string()));
        }
        driven.push(&c.sink);
        links.push(Link { source, source_var: c.source.variable.clone(), sink, sink_var: c.sink.variable.clone() });
    }

    let record_ports: Vec<PortRef> = if record.is_empty() {
        instances
            .iter()
            .flat_map(|inst| inst.model_description().outputs().map(|v| PortRef::new(inst.id(), &v.name)))
            .collect()
    } else {
        record
    };
    let mut recorded = Vec::with_capacity(record_ports.len());
    for port in &record_ports {
        let i = find(&ids, port)?;
        let var = instances[i].variable(&port.variable)?;
        if !matches!(var.causality, Causality::Input | Causality::Output) {
            return Err(CosimError::CausalityViolation {
                variable: port.to_string(),
                causality: var.causality,
                operation: "recording",
            });
        }
        recorded.push((i, port.variable.clone()));
    }

    let micro_step = steps.iter().fold(stop_time, |g, s| g.gcd(*s));
    for inst in &mut instances {
        inst.enter_initialization(RationalTime::ZERO)?;
    }
    for (port, value) in parameters {
        let i = find(&ids, &port)?;
        instances[i].set_parameter(&port.variable, value)?;
    }
    for inst in &mut instances {
        inst.exit_initialization()?;
        let outputs: Vec<String> = inst.model_description().outputs().map(|v| v.name.clone()).collect();
        for name in outputs {
            inst.get_output(&name)?;
        }
    }

    let order = step_order(instances.len(), &links);
    Ok(Network {
        instances,
        steps,
        order,
        links,
        record: recorded,
        columns: record_ports.iter().map(PortRef::to_string).collect(),
        stop_time,
        micro_step,
    })
}

impl Network {
    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn micro_step(&self) -> RationalTime {
        self.micro_step
    }

    pub fn stop_time(&self) -> RationalTime {
        self.stop_time
    }

    /// Instance ids in the order they are stepped within a micro-step.
    pub fn step_order(&self) -> Vec<&str> {
        self.order.iter().map(|&i| self.instances[i].id()).collect()
    }

    pub fn instance(&self, id: &str) -> Option<&FmuInstance> {
        self.instances.iter().find(|i| i.id() == id)
    }

    fn row(&self, time: RationalTime, truncated: bool) -> TraceRow {
        let values = self
            .record
            .iter()
            .map(|(i, name)| {
                let inst = &self.instances[*i];
                inst.last_value(name).cloned().unwrap_or_else(|| {
                    let var = inst.model_description().variable(name).expect("checked when instantiated");
                    Value::parse_literal(var.fmi_type, &var.fmi_type.default_start()).expect("type default parses")
                })
            })
            .collect();
        TraceRow { time, values, truncated }
    }

    fn propagate_into(&mut self, sink: usize) -> Result<(), CosimError> {
        for l in self.links.iter().filter(|l| l.sink == sink) {
            let value = self.instances[l.source]
                .last_value(&l.source_var)
                .cloned()
                .expect("outputs are read after initialization");
            self.instances[sink].set_input(&l.sink_var, value)?;
        }
        Ok(())
    }

    /// Completes one scheduled step of `h`, re-stepping after early returns.
    fn advance(&mut self, i: usize, h: RationalTime, stats: &mut RunStats) -> Result<(), CosimError> {
        let inst = &mut self.instances[i];
        let target = inst.time() + h;
        let mut consecutive = 0u32;
        while inst.time() < target {
            let result = inst.do_step(target - inst.time())?;
            *stats.do_step_calls.entry(inst.id().to_string()).or_default() += 1;
            if !result.early_return {
                break;
            }
            *stats.early_returns.entry(inst.id().to_string()).or_default() += 1;
            consecutive += 1;
            if consecutive > MAX_EARLY_RETURNS {
                return Err(CosimError::EarlyReturnLivelock {
                    instance: inst.id().to_string(),
                    time: inst.time(),
                    count: consecutive,
                });
            }
        }
        *stats.steps.entry(inst.id().to_string()).or_default() += 1;
        let outputs: Vec<String> = inst.model_description().outputs().map(|v| v.name.clone()).collect();
        for name in outputs {
            inst.get_output(&name)?;
        }
        Ok(())
    }

    fn check_clocks(&self, now: RationalTime) -> Result<(), CosimError> {
        for (inst, step) in self.instances.iter().zip(&self.steps) {
            let expected = (*step * now.div_ceil(*step)).min(self.stop_time);
            if inst.time() != expected {
                return Err(CosimError::DivergedClock {
                    instance: inst.id().to_string(),
                    expected,
                    actual: inst.time(),
                });
            }
        }
        Ok(())
    }

    /// Runs to the stop time, handing each trace row to `on_row` as it is produced.
    pub fn run_with(&mut self, mut on_row: impl FnMut(&TraceRow)) -> Result<RunStats, CosimError> {
        let mut stats = RunStats { micro_step: self.micro_step, ..RunStats::default() };
        for inst in &self.instances {
            stats.steps.insert(inst.id().to_string(), 0);
            stats.do_step_calls.insert(inst.id().to_string(), 0);
            stats.early_returns.insert(inst.id().to_string(), 0);
        }
        on_row(&self.row(RationalTime::ZERO, false));
        stats.rows = 1;
        let micro_steps = self.stop_time.div_ceil(self.micro_step);
        for k in 0..micro_steps {
            let now = self.micro_step * k;
            let mut truncated = false;
            for idx in 0..self.order.len() {
                let i = self.order[idx];
                if self.instances[i].time() != now {
                    continue;
                }
                self.propagate_into(i)?;
                let step = self.steps[i];
                let h = step.min(self.stop_time - now);
                if h < step {
                    truncated = true;
                    stats.truncated.push((self.instances[i].id().to_string(), now));
                }
                self.advance(i, h, &mut stats)?;
            }
            let next = self.micro_step * (k + 1);
            self.check_clocks(next)?;
            on_row(&self.row(next, truncated));
            stats.rows += 1;
        }
        for inst in &mut self.instances {
            inst.terminate()?;
        }
        Ok(stats)
    }

    pub fn run(&mut self) -> Result<(Trace, RunStats), CosimError> {
        let mut trace = Trace::new(self.columns.clone());
        let stats = self.run_with(|row| trace.rows.push(row.clone()))?;
        Ok((trace, stats))
    }
}
