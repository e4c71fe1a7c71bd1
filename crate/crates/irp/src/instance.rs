//! Problem instances: customers with constant daily consumption, a depot,
//! a vehicle capacity and a planning horizon, plus Euclidean distances,
//! a seeded random generator and a line-oriented text file format.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
}

/// One customer: position, constant daily consumption and starting stock.
#[derive(Debug, Clone, PartialEq)]
pub struct Customer {
    /// 1-based id; customer ids are exactly 1..n in order.
    pub id: usize,
    pub x: f64,
    pub y: f64,
    /// Units consumed per day, > 0.
    pub consumption: f64,
    /// Units on hand before date 1, >= 0.
    pub initial_inventory: f64,
}

/// A full problem instance. Immutable after construction; dates run 1..=horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    pub horizon: u32,
    pub depot_x: f64,
    pub depot_y: f64,
    /// Vehicle load capacity, > 0. The fleet itself is unbounded.
    pub capacity: f64,
    pub customers: Vec<Customer>,
}

impl Instance {
    /// Builds an instance, checking the structural invariants.
    pub fn new(
        name: String,
        horizon: u32,
        depot: (f64, f64),
        capacity: f64,
        customers: Vec<Customer>,
    ) -> Result<Self, InstanceError> {
        if customers.is_empty() {
            return Err(InstanceError::Invalid("need at least one customer".into()));
        }
        if horizon < 1 {
            return Err(InstanceError::Invalid("horizon must be >= 1".into()));
        }
        if !capacity.is_finite() || capacity <= 0.0 {
            return Err(InstanceError::Invalid("capacity must be > 0".into()));
        }
        for (pos, c) in customers.iter().enumerate() {
            if c.id != pos + 1 {
                return Err(InstanceError::Invalid(format!(
                    "customer ids must be 1..n in order; found id {} at position {}",
                    c.id,
                    pos + 1
                )));
            }
            if !c.consumption.is_finite() || c.consumption <= 0.0 {
                return Err(InstanceError::Invalid(format!(
                    "customer {}: consumption must be > 0",
                    c.id
                )));
            }
            if !c.initial_inventory.is_finite() || c.initial_inventory < 0.0 {
                return Err(InstanceError::Invalid(format!(
                    "customer {}: initial inventory must be >= 0",
                    c.id
                )));
            }
            if !c.x.is_finite() || !c.y.is_finite() {
                return Err(InstanceError::Invalid(format!(
                    "customer {}: coordinates must be finite",
                    c.id
                )));
            }
        }
        Ok(Instance {
            name,
            horizon,
            depot_x: depot.0,
            depot_y: depot.1,
            capacity,
            customers,
        })
    }

    pub fn customer_count(&self) -> usize {
        self.customers.len()
    }

    /// Node coordinates; node 0 is the depot, node i (1..=n) is customer i.
    pub fn node_position(&self, node: usize) -> (f64, f64) {
        if node == 0 {
            (self.depot_x, self.depot_y)
        } else {
            let c = &self.customers[node - 1];
            (c.x, c.y)
        }
    }
}

/// Symmetric Euclidean distances over nodes 0..=n (0 = depot).
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    /// Number of nodes (n + 1, depot included).
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn dist(&self, a: usize, b: usize) -> f64 {
        self.entries[a * self.size + b]
    }
}

/// Full-precision Euclidean distances from the instance coordinates.
pub fn build_distance_matrix(inst: &Instance) -> DistanceMatrix {
    let size = inst.customer_count() + 1;
    let mut entries = vec![0.0; size * size];
    for a in 0..size {
        let (xa, ya) = inst.node_position(a);
        for b in (a + 1)..size {
            let (xb, yb) = inst.node_position(b);
            let d = ((xa - xb).powi(2) + (ya - yb).powi(2)).sqrt();
            entries[a * size + b] = d;
            entries[b * size + a] = d;
        }
    }
    DistanceMatrix { size, entries }
}

/// Knobs for the random instance generator.
///
/// Customer coordinates are uniform in the `[0, area]` square with the depot
/// at its center. Consumption is uniform in `[consumption_min,
/// consumption_max]`; initial inventory is uniform in
/// `[0, inventory_factor * consumption * horizon]`. Capacity is
/// `capacity_factor * consumption_max`, so `capacity_factor >= 1` keeps every
/// customer serviceable.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub area: f64,
    pub consumption_min: f64,
    pub consumption_max: f64,
    pub inventory_factor: f64,
    pub capacity_factor: f64,
}

impl Default for GeneratorParams {
    /// Defaults give instances where several customers need service on the
    /// same day and two or three deliveries fit one vehicle, so the
    /// inventory and routing objectives genuinely interact.
    fn default() -> Self {
        GeneratorParams {
            area: 100.0,
            consumption_min: 4.0,
            consumption_max: 10.0,
            inventory_factor: 0.25,
            capacity_factor: 3.0,
        }
    }
}

impl GeneratorParams {
    fn validate(&self) -> Result<(), InstanceError> {
        if !self.area.is_finite() || self.area <= 0.0 {
            return Err(InstanceError::InvalidParams("area must be > 0".into()));
        }
        if !self.consumption_min.is_finite()
            || self.consumption_min <= 0.0
            || self.consumption_min > self.consumption_max
        {
            return Err(InstanceError::InvalidParams(
                "need 0 < consumption_min <= consumption_max".into(),
            ));
        }
        if !self.consumption_max.is_finite() {
            return Err(InstanceError::InvalidParams("consumption_max must be finite".into()));
        }
        if !self.inventory_factor.is_finite() || self.inventory_factor < 0.0 {
            return Err(InstanceError::InvalidParams("inventory_factor must be >= 0".into()));
        }
        // capacity = capacity_factor * consumption_max; anything below 1 could
        // leave a customer whose daily consumption exceeds a vehicle load.
        if !self.capacity_factor.is_finite() || self.capacity_factor < 1.0 {
            return Err(InstanceError::InvalidParams("capacity_factor must be >= 1".into()));
        }
        Ok(())
    }
}

/// Deterministic random instance: same (seed, n, horizon, params) gives a
/// byte-identical instance.
pub fn generate_instance(
    seed: u64,
    n: usize,
    horizon: u32,
    params: &GeneratorParams,
) -> Result<Instance, InstanceError> {
    if n < 1 {
        return Err(InstanceError::InvalidParams("n must be >= 1".into()));
    }
    if horizon < 1 {
        return Err(InstanceError::InvalidParams("horizon must be >= 1".into()));
    }
    params.validate()?;

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut customers = Vec::with_capacity(n);
    for id in 1..=n {
        let x = rng.random_range(0.0..=params.area);
        let y = rng.random_range(0.0..=params.area);
        let consumption = rng.random_range(params.consumption_min..=params.consumption_max);
        let inventory_cap = params.inventory_factor * consumption * horizon as f64;
        let initial_inventory = if inventory_cap > 0.0 {
            rng.random_range(0.0..=inventory_cap)
        } else {
            0.0
        };
        customers.push(Customer { id, x, y, consumption, initial_inventory });
    }
    let capacity = params.capacity_factor * params.consumption_max;
    let name = format!("rnd-n{n}-h{horizon}-s{seed}");
    Instance::new(name, horizon, (params.area / 2.0, params.area / 2.0), capacity, customers)
}

/// Serializes to the instance text format. Floats use the shortest
/// representation that parses back to the same value.
pub fn instance_to_string(inst: &Instance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "NAME {}", inst.name);
    let _ = writeln!(out, "N {}", inst.customer_count());
    let _ = writeln!(out, "H {}", inst.horizon);
    let _ = writeln!(out, "CAPACITY {}", inst.capacity);
    let _ = writeln!(out, "DEPOT {} {}", inst.depot_x, inst.depot_y);
    for c in &inst.customers {
        let _ = writeln!(out, "{} {} {} {} {}", c.id, c.x, c.y, c.consumption, c.initial_inventory);
    }
    out
}

pub fn write_instance(inst: &Instance, path: &Path) -> Result<(), InstanceError> {
    fs::write(path, instance_to_string(inst))?;
    Ok(())
}

pub fn read_instance(path: &Path) -> Result<Instance, InstanceError> {
    let text = fs::read_to_string(path)?;
    parse_instance(&text)
}

struct LineReader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    current: usize,
}

impl<'a> LineReader<'a> {
    fn new(text: &'a str) -> Self {
        LineReader { lines: text.lines().enumerate(), current: 0 }
    }

    /// Next significant line (skips blanks and `#` comment lines).
    fn next_line(&mut self) -> Option<&'a str> {
        for (idx, line) in self.lines.by_ref() {
            self.current = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            return Some(trimmed);
        }
        None
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> InstanceError {
    InstanceError::Parse { line, message: message.into() }
}

fn expect_tagged(
    reader: &mut LineReader<'_>,
    tag: &str,
) -> Result<(usize, Vec<String>), InstanceError> {
    let line = match reader.next_line() {
        Some(line) => line,
        None => return Err(parse_err(reader.current + 1, format!("missing {tag} line"))),
    };
    let lineno = reader.current;
    let mut parts = line.split_whitespace();
    let found = parts.next().unwrap_or("");
    if found != tag {
        return Err(parse_err(lineno, format!("expected `{tag}`, found `{found}`")));
    }
    Ok((lineno, parts.map(str::to_owned).collect()))
}

/// Parses the instance text format (see the crate docs for the layout).
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let mut reader = LineReader::new(text);

    let (name_line, name_parts) = expect_tagged(&mut reader, "NAME")?;
    if name_parts.is_empty() {
        return Err(parse_err(name_line, "NAME needs a value"));
    }
    let name = name_parts.join(" ");

    let (n_line, n_parts) = expect_tagged(&mut reader, "N")?;
    let n: usize = single_field(&n_parts, n_line, "N")?;
    let (h_line, h_parts) = expect_tagged(&mut reader, "H")?;
    let horizon: u32 = single_field(&h_parts, h_line, "H")?;
    let (q_line, q_parts) = expect_tagged(&mut reader, "CAPACITY")?;
    let capacity: f64 = single_field(&q_parts, q_line, "CAPACITY")?;
    let (d_line, d_parts) = expect_tagged(&mut reader, "DEPOT")?;
    if d_parts.len() != 2 {
        return Err(parse_err(d_line, "DEPOT needs exactly two coordinates"));
    }
    let depot_x: f64 = parse_field(&d_parts[0], d_line, "depot x")?;
    let depot_y: f64 = parse_field(&d_parts[1], d_line, "depot y")?;

    let mut customers = Vec::with_capacity(n);
    let mut seen = vec![false; n + 1];
    for _ in 0..n {
        let line = match reader.next_line() {
            Some(line) => line,
            None => return Err(parse_err(reader.current + 1, "missing customer line")),
        };
        let lineno = reader.current;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(parse_err(
                lineno,
                format!("customer line needs 5 fields (id x y consumption initial_inventory), found {}", fields.len()),
            ));
        }
        let id: usize = parse_field(fields[0], lineno, "customer id")?;
        if id == 0 || id > n {
            return Err(parse_err(lineno, format!("customer id {id} out of range 1..{n}")));
        }
        if seen[id] {
            return Err(parse_err(lineno, format!("duplicate customer id {id}")));
        }
        seen[id] = true;
        customers.push(Customer {
            id,
            x: parse_field(fields[1], lineno, "x")?,
            y: parse_field(fields[2], lineno, "y")?,
            consumption: parse_field(fields[3], lineno, "consumption")?,
            initial_inventory: parse_field(fields[4], lineno, "initial_inventory")?,
        });
    }
    if let Some(extra) = reader.next_line() {
        return Err(parse_err(reader.current, format!("unexpected trailing content: `{extra}`")));
    }

    Instance::new(name, horizon, (depot_x, depot_y), capacity, customers)
}

fn single_field<T: std::str::FromStr>(
    parts: &[String],
    line: usize,
    what: &str,
) -> Result<T, InstanceError> {
    if parts.len() != 1 {
        return Err(parse_err(line, format!("{what} needs exactly one value")));
    }
    parse_field(&parts[0], line, what)
}

fn parse_field<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T, InstanceError> {
    s.parse()
        .map_err(|_| parse_err(line, format!("cannot parse {what} from `{s}`")))
}
