//! Problem data for the three-echelon supplier → DC → retailer network,
//! random instance generation and JSON persistence.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Current version of the on-disk instance schema.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("invalid instance size: {0}")]
    InvalidSize(String),
    #[error("schema error at `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl InstanceError {
    fn schema(field: impl Into<String>, message: impl Into<String>) -> Self {
        InstanceError::Schema {
            field: field.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Candidate distribution center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcSite {
    pub coord: Point,
    /// Annual establishment cost.
    pub fixed_cost: f64,
    /// Fixed cost of one supplier → DC shipment.
    pub inbound_fixed_cost: f64,
    /// Fixed cost of placing one order.
    pub order_cost: f64,
    /// Per-unit supply cost.
    pub supply_cost: f64,
    pub lead_time: f64,
    /// Holding cost per unit-year.
    pub holding_cost: f64,
    /// Annual throughput capacity.
    pub capacity: f64,
    /// Weight of inventory-driven emissions at this DC.
    pub emission_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Retailer {
    pub coord: Point,
    /// Mean annual demand.
    pub demand_mean: f64,
    /// Variance of annual demand.
    pub demand_var: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vehicle {
    pub capacity: f64,
    pub fixed_cost: f64,
    /// Fuel per distance unit when empty.
    pub fuel_empty: f64,
    /// Fuel per distance unit at full load.
    pub fuel_full: f64,
    /// CO2 per fuel unit.
    pub emission_factor: f64,
}

impl Vehicle {
    /// Fuel-per-distance increase for each unit of load.
    pub fn load_slope(&self) -> f64 {
        (self.fuel_full - self.fuel_empty) / self.capacity
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    /// Shipping-cost weight.
    pub beta: f64,
    /// Inventory-cost weight.
    pub theta: f64,
    /// Service level.
    pub alpha: f64,
    pub big_m: f64,
    /// Transportation cost per unit of distance between nodes.
    pub ship_rate: f64,
}

/// A node of the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Node {
    Supplier,
    Dc(usize),
    Retailer(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub schema: u32,
    pub dcs: Vec<DcSite>,
    pub retailers: Vec<Retailer>,
    pub vehicles_in: Vec<Vehicle>,
    pub vehicles_out: Vec<Vehicle>,
    pub supplier: Point,
    pub weights: Weights,
    pub seed: u64,
}

/// Counts `(|K|, |I|, |V_in|, |V_out|)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeSpec {
    pub dcs: usize,
    pub retailers: usize,
    pub vehicles_in: usize,
    pub vehicles_out: usize,
}

impl SizeSpec {
    pub const fn new(dcs: usize, retailers: usize, vehicles_in: usize, vehicles_out: usize) -> Self {
        SizeSpec {
            dcs,
            retailers,
            vehicles_in,
            vehicles_out,
        }
    }

    /// The twelve generated test problems, small ones first.
    pub const STANDARD_SUITE: [SizeSpec; 12] = [
        SizeSpec::new(2, 4, 3, 3),
        SizeSpec::new(2, 4, 4, 3),
        SizeSpec::new(2, 4, 3, 4),
        SizeSpec::new(3, 5, 3, 3),
        SizeSpec::new(3, 5, 4, 4),
        SizeSpec::new(3, 7, 3, 3),
        SizeSpec::new(4, 10, 5, 5),
        SizeSpec::new(5, 15, 7, 7),
        SizeSpec::new(6, 20, 9, 9),
        SizeSpec::new(7, 25, 11, 11),
        SizeSpec::new(8, 30, 13, 13),
        SizeSpec::new(10, 50, 15, 15),
    ];
}

impl std::str::FromStr for SizeSpec {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts = s
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| InstanceError::InvalidSize(format!("`{s}`: {e}")))?;
        match parts.as_slice() {
            [k, i, vin, vout] => Ok(SizeSpec::new(*k, *i, *vin, *vout)),
            _ => Err(InstanceError::InvalidSize(format!(
                "`{s}`: expected four comma-separated counts"
            ))),
        }
    }
}

/// Sampling ranges for the parameters the cost table leaves open.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub fixed_cost: (f64, f64),
    pub inbound_fixed_cost: (f64, f64),
    pub order_cost: (f64, f64),
    pub supply_cost: (f64, f64),
    pub lead_time: (f64, f64),
    pub holding_cost: (f64, f64),
    pub demand_mean: (f64, f64),
    pub demand_var: (f64, f64),
    pub emission_weight: (f64, f64),
    pub inbound_capacity: (f64, f64),
    pub outbound_capacity: (f64, f64),
    pub vehicle_fixed_cost: (f64, f64),
    pub fuel_empty: (f64, f64),
    /// `fuel_full = fuel_empty * U(lo, hi)`.
    pub fuel_full_ratio: (f64, f64),
    pub emission_factor: f64,
    /// Total DC capacity as a multiple of total mean demand.
    pub capacity_slack: f64,
    pub grid_extent: f64,
    pub beta: f64,
    pub theta: f64,
    pub alpha: f64,
    pub ship_rate: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            fixed_cost: (500.0, 1000.0),
            inbound_fixed_cost: (10.0, 15.0),
            order_cost: (10.0, 15.0),
            supply_cost: (5.0, 10.0),
            lead_time: (6.0, 10.0),
            holding_cost: (5.0, 10.0),
            demand_mean: (400.0, 1500.0),
            demand_var: (10.0, 100.0),
            emission_weight: (0.5, 1.5),
            inbound_capacity: (800.0, 1500.0),
            outbound_capacity: (400.0, 900.0),
            vehicle_fixed_cost: (50.0, 100.0),
            fuel_empty: (0.1, 0.2),
            fuel_full_ratio: (1.5, 2.5),
            emission_factor: 2.6,
            capacity_slack: 1.5,
            grid_extent: 100.0,
            beta: 1.0,
            theta: 1.0,
            alpha: 0.95,
            ship_rate: 1.0,
        }
    }
}

fn uniform(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.gen_range(lo..hi)
    } else {
        lo
    }
}

impl Instance {
    /// Draws a random instance; identical `(size, seed, config)` give identical instances.
    pub fn generate(size: SizeSpec, seed: u64) -> Result<Instance, InstanceError> {
        Self::generate_with(size, seed, &GeneratorConfig::default())
    }

    pub fn generate_with(
        size: SizeSpec,
        seed: u64,
        cfg: &GeneratorConfig,
    ) -> Result<Instance, InstanceError> {
        if size.dcs == 0 || size.retailers == 0 || size.vehicles_in == 0 || size.vehicles_out == 0 {
            return Err(InstanceError::InvalidSize(format!(
                "all counts must be at least 1, got {size:?}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let extent = cfg.grid_extent;
        let point = |rng: &mut ChaCha8Rng| Point::new(rng.gen_range(0.0..extent), rng.gen_range(0.0..extent));

        let supplier = point(&mut rng);
        let mut dcs = Vec::with_capacity(size.dcs);
        let mut capacity_shares = Vec::with_capacity(size.dcs);
        for _ in 0..size.dcs {
            dcs.push(DcSite {
                coord: point(&mut rng),
                fixed_cost: uniform(&mut rng, cfg.fixed_cost),
                inbound_fixed_cost: uniform(&mut rng, cfg.inbound_fixed_cost),
                order_cost: uniform(&mut rng, cfg.order_cost),
                supply_cost: uniform(&mut rng, cfg.supply_cost),
                lead_time: uniform(&mut rng, cfg.lead_time),
                holding_cost: uniform(&mut rng, cfg.holding_cost),
                capacity: 0.0,
                emission_weight: uniform(&mut rng, cfg.emission_weight),
            });
            capacity_shares.push(rng.gen_range(0.5..1.5));
        }
        let retailers: Vec<Retailer> = (0..size.retailers)
            .map(|_| Retailer {
                coord: point(&mut rng),
                demand_mean: uniform(&mut rng, cfg.demand_mean),
                demand_var: uniform(&mut rng, cfg.demand_var),
            })
            .collect();
        let vehicle = |rng: &mut ChaCha8Rng, capacity: (f64, f64)| {
            let fuel_empty = uniform(rng, cfg.fuel_empty);
            Vehicle {
                capacity: uniform(rng, capacity),
                fixed_cost: uniform(rng, cfg.vehicle_fixed_cost),
                fuel_empty,
                fuel_full: fuel_empty * uniform(rng, cfg.fuel_full_ratio),
                emission_factor: cfg.emission_factor,
            }
        };
        let vehicles_in = (0..size.vehicles_in)
            .map(|_| vehicle(&mut rng, cfg.inbound_capacity))
            .collect();
        let vehicles_out = (0..size.vehicles_out)
            .map(|_| vehicle(&mut rng, cfg.outbound_capacity))
            .collect();

        let total_demand: f64 = retailers.iter().map(|r| r.demand_mean).sum();
        let share_sum: f64 = capacity_shares.iter().sum();
        let total_capacity = cfg.capacity_slack.max(1.0) * total_demand;
        for (dc, share) in dcs.iter_mut().zip(&capacity_shares) {
            dc.capacity = total_capacity * share / share_sum;
        }

        let instance = Instance {
            schema: SCHEMA_VERSION,
            dcs,
            retailers,
            vehicles_in,
            vehicles_out,
            supplier,
            weights: Weights {
                beta: cfg.beta,
                theta: cfg.theta,
                alpha: cfg.alpha,
                big_m: 2.0 * total_demand,
                ship_rate: cfg.ship_rate,
            },
            seed,
        };
        instance.validate()?;
        Ok(instance)
    }

    pub fn size(&self) -> SizeSpec {
        SizeSpec::new(
            self.dcs.len(),
            self.retailers.len(),
            self.vehicles_in.len(),
            self.vehicles_out.len(),
        )
    }

    /// Length of a chromosome for this instance.
    pub fn key_count(&self) -> usize {
        self.dcs.len() + self.retailers.len() + self.vehicles_in.len() + self.vehicles_out.len()
    }

    pub fn total_demand(&self) -> f64 {
        self.retailers.iter().map(|r| r.demand_mean).sum()
    }

    pub fn coord(&self, node: Node) -> Point {
        match node {
            Node::Supplier => self.supplier,
            Node::Dc(k) => self.dcs[k].coord,
            Node::Retailer(i) => self.retailers[i].coord,
        }
    }

    /// Euclidean distance between two nodes.
    pub fn distance(&self, a: Node, b: Node) -> f64 {
        self.coord(a).distance(&self.coord(b))
    }

    /// Per-unit transportation cost `c_ij` between two nodes.
    pub fn ship_cost(&self, a: Node, b: Node) -> f64 {
        self.weights.ship_rate * self.distance(a, b)
    }

    /// Copy with every mean demand multiplied by `factor`; big-M tracks the new total.
    pub fn with_demand_scaled(&self, factor: f64) -> Instance {
        let mut scaled = self.clone();
        for r in &mut scaled.retailers {
            r.demand_mean *= factor;
        }
        scaled.weights.big_m = 2.0 * scaled.total_demand();
        scaled
    }

    /// Checks every data invariant, naming the first offending field.
    pub fn validate(&self) -> Result<(), InstanceError> {
        if self.schema != SCHEMA_VERSION {
            return Err(InstanceError::schema(
                "schema",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema),
            ));
        }
        for (name, len) in [
            ("dcs", self.dcs.len()),
            ("retailers", self.retailers.len()),
            ("vehicles_in", self.vehicles_in.len()),
            ("vehicles_out", self.vehicles_out.len()),
        ] {
            if len == 0 {
                return Err(InstanceError::schema(name, "must not be empty"));
            }
        }
        let finite = |field: String, v: f64| -> Result<(), InstanceError> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(InstanceError::schema(field, "must be finite"))
            }
        };
        let positive = |field: String, v: f64| -> Result<(), InstanceError> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(InstanceError::schema(field, format!("must be positive, got {v}")))
            }
        };
        let nonneg = |field: String, v: f64| -> Result<(), InstanceError> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(InstanceError::schema(field, format!("must be non-negative, got {v}")))
            }
        };
        finite("supplier.x".into(), self.supplier.x)?;
        finite("supplier.y".into(), self.supplier.y)?;
        for (k, dc) in self.dcs.iter().enumerate() {
            let f = |name: &str| format!("dcs[{k}].{name}");
            finite(f("coord.x"), dc.coord.x)?;
            finite(f("coord.y"), dc.coord.y)?;
            positive(f("fixed_cost"), dc.fixed_cost)?;
            positive(f("inbound_fixed_cost"), dc.inbound_fixed_cost)?;
            positive(f("order_cost"), dc.order_cost)?;
            positive(f("supply_cost"), dc.supply_cost)?;
            positive(f("lead_time"), dc.lead_time)?;
            positive(f("holding_cost"), dc.holding_cost)?;
            positive(f("capacity"), dc.capacity)?;
            positive(f("emission_weight"), dc.emission_weight)?;
        }
        for (i, r) in self.retailers.iter().enumerate() {
            let f = |name: &str| format!("retailers[{i}].{name}");
            finite(f("coord.x"), r.coord.x)?;
            finite(f("coord.y"), r.coord.y)?;
            positive(f("demand_mean"), r.demand_mean)?;
            nonneg(f("demand_var"), r.demand_var)?;
        }
        for (layer, fleet) in [("vehicles_in", &self.vehicles_in), ("vehicles_out", &self.vehicles_out)] {
            for (v, veh) in fleet.iter().enumerate() {
                let f = |name: &str| format!("{layer}[{v}].{name}");
                positive(f("capacity"), veh.capacity)?;
                nonneg(f("fixed_cost"), veh.fixed_cost)?;
                nonneg(f("fuel_empty"), veh.fuel_empty)?;
                nonneg(f("emission_factor"), veh.emission_factor)?;
                if !(veh.fuel_full.is_finite() && veh.fuel_full >= veh.fuel_empty) {
                    return Err(InstanceError::schema(
                        f("fuel_full"),
                        "must be finite and at least fuel_empty",
                    ));
                }
            }
        }
        let w = &self.weights;
        nonneg("weights.beta".into(), w.beta)?;
        nonneg("weights.theta".into(), w.theta)?;
        nonneg("weights.ship_rate".into(), w.ship_rate)?;
        positive("weights.big_m".into(), w.big_m)?;
        if !(w.alpha > 0.5 && w.alpha < 1.0) {
            return Err(InstanceError::schema(
                "weights.alpha",
                format!("service level must lie in (0.5, 1), got {}", w.alpha),
            ));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization is infallible")
    }

    /// Parses and validates an instance document.
    pub fn from_json(text: &str) -> Result<Instance, InstanceError> {
        let instance: Instance = serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            let field = missing_field_name(&msg).unwrap_or_else(|| "<document>".to_string());
            InstanceError::schema(field, msg)
        })?;
        instance.validate()?;
        Ok(instance)
    }

    pub fn save(&self, path: &Path) -> Result<(), InstanceError> {
        fs::write(path, self.to_json()).map_err(|source| InstanceError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Instance, InstanceError> {
        let text = fs::read_to_string(path).map_err(|source| InstanceError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }
}

fn missing_field_name(msg: &str) -> Option<String> {
    let rest = msg.strip_prefix("missing field `")?;
    Some(rest.split('`').next()?.to_string())
}
