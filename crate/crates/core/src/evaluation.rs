//! Cost and emission objectives of a decoded plan.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decoder::{decode, penalty, Chromosome, DecodeOptions, Plan};
use crate::instance::{Instance, Node};
use crate::inventory::{expected_inventory, z_quantile, DcInventoryState};

/// Penalty per unserved retailer unless configured otherwise.
pub const DEFAULT_PENALTY_RATE: f64 = 1e6;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("plan does not match instance: {0}")]
    Dimension(String),
}

/// Cost `z1` and emission `z2`, both minimized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectivePair {
    pub z1: f64,
    pub z2: f64,
}

impl ObjectivePair {
    pub const fn new(z1: f64, z2: f64) -> Self {
        ObjectivePair { z1, z2 }
    }

    pub fn get(&self, m: usize) -> f64 {
        match m {
            0 => self.z1,
            1 => self.z2,
            _ => panic!("objective index {m} out of range"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub fixed_dc: f64,
    pub fixed_fleet: f64,
    pub shipping_inbound: f64,
    pub shipping_outbound: f64,
    pub ordering: f64,
    pub inventory: f64,
    pub penalty: f64,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.fixed_dc
            + self.fixed_fleet
            + self.shipping_inbound
            + self.shipping_outbound
            + self.ordering
            + self.inventory
            + self.penalty
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EmissionBreakdown {
    pub inbound: f64,
    pub outbound: f64,
    pub dc: f64,
    pub penalty: f64,
}

impl EmissionBreakdown {
    pub fn total(&self) -> f64 {
        self.inbound + self.outbound + self.dc + self.penalty
    }
}

fn check_dimensions(plan: &Plan, instance: &Instance) -> Result<(), EvalError> {
    let n_dc = instance.dcs.len();
    if plan.assignment.len() != instance.retailers.len() {
        return Err(EvalError::Dimension(format!(
            "{} assignments for {} retailers",
            plan.assignment.len(),
            instance.retailers.len()
        )));
    }
    if plan.assignment.iter().flatten().any(|&k| k >= n_dc) || plan.orders.iter().any(|o| o.dc >= n_dc) {
        return Err(EvalError::Dimension("DC index out of range".into()));
    }
    if plan
        .orders
        .iter()
        .flat_map(|o| &o.inbound)
        .any(|t| t.vehicle >= instance.vehicles_in.len())
    {
        return Err(EvalError::Dimension("inbound vehicle index out of range".into()));
    }
    for tour in &plan.tours {
        if tour.dc >= n_dc || tour.vehicle >= instance.vehicles_out.len() {
            return Err(EvalError::Dimension("tour index out of range".into()));
        }
        if tour.retailers.iter().any(|&i| i >= instance.retailers.len()) {
            return Err(EvalError::Dimension("tour retailer out of range".into()));
        }
        if tour.loads.len() != tour.retailers.len() + 1 {
            return Err(EvalError::Dimension("tour load vector length".into()));
        }
    }
    Ok(())
}

/// Expected inventory held at each open DC, in `plan.orders` order.
pub fn dc_inventories(plan: &Plan, instance: &Instance, z_alpha: f64) -> Vec<(usize, f64)> {
    let mut mu = vec![0.0; instance.dcs.len()];
    let mut var = vec![0.0; instance.dcs.len()];
    for (i, dc) in plan.assignment.iter().enumerate() {
        if let Some(k) = *dc {
            mu[k] += instance.retailers[i].demand_mean;
            var[k] += instance.retailers[i].demand_var;
        }
    }
    plan.orders
        .iter()
        .map(|o| {
            let state = DcInventoryState::new(
                mu[o.dc],
                var[o.dc],
                f64::from(o.n),
                o.q,
                instance.dcs[o.dc].lead_time,
                z_alpha,
            );
            (o.dc, expected_inventory(&state))
        })
        .collect()
}

fn service_quantile(instance: &Instance) -> f64 {
    z_quantile(instance.weights.alpha).expect("validated instance has alpha in (0, 1)")
}

fn cost_with(plan: &Plan, instance: &Instance, z_alpha: f64, rate: f64) -> CostBreakdown {
    let w = &instance.weights;
    let mut b = CostBreakdown::default();
    for order in &plan.orders {
        let dc = &instance.dcs[order.dc];
        let n = f64::from(order.n);
        b.fixed_dc += dc.fixed_cost;
        b.fixed_fleet += order
            .inbound
            .iter()
            .map(|t| instance.vehicles_in[t.vehicle].fixed_cost)
            .sum::<f64>();
        b.shipping_inbound += w.beta * (dc.inbound_fixed_cost + dc.supply_cost * order.q) * n;
        b.ordering += dc.order_cost * n;
    }
    for tour in &plan.tours {
        let n = f64::from(plan.order_for(tour.dc).map_or(0, |o| o.n));
        b.fixed_fleet += instance.vehicles_out[tour.vehicle].fixed_cost;
        let route: f64 = tour.arcs().map(|(a, c, _)| instance.ship_cost(a, c)).sum();
        b.shipping_outbound += w.beta * route * n;
    }
    b.inventory = w.theta
        * dc_inventories(plan, instance, z_alpha)
            .iter()
            .map(|&(k, inv)| instance.dcs[k].holding_cost * inv)
            .sum::<f64>();
    b.penalty = penalty(plan, rate).0;
    b
}

fn emission_with(plan: &Plan, instance: &Instance, z_alpha: f64, rate: f64) -> EmissionBreakdown {
    let mut b = EmissionBreakdown::default();
    for order in &plan.orders {
        let n = f64::from(order.n);
        let d = instance.distance(Node::Supplier, Node::Dc(order.dc));
        for trip in &order.inbound {
            let v = &instance.vehicles_in[trip.vehicle];
            b.inbound += v.emission_factor * (2.0 * v.fuel_empty + v.load_slope() * trip.load) * n * d;
        }
    }
    for tour in &plan.tours {
        let n = f64::from(plan.order_for(tour.dc).map_or(0, |o| o.n));
        let v = &instance.vehicles_out[tour.vehicle];
        for (a, c, load) in tour.arcs() {
            b.outbound += v.emission_factor * (v.fuel_empty + v.load_slope() * load) * n * instance.distance(a, c);
        }
    }
    b.dc = dc_inventories(plan, instance, z_alpha)
        .iter()
        .map(|&(k, inv)| instance.dcs[k].emission_weight * instance.dcs[k].holding_cost * inv)
        .sum();
    b.penalty = penalty(plan, rate).1;
    b
}

pub fn evaluate_cost(plan: &Plan, instance: &Instance) -> Result<CostBreakdown, EvalError> {
    check_dimensions(plan, instance)?;
    Ok(cost_with(plan, instance, service_quantile(instance), DEFAULT_PENALTY_RATE))
}

pub fn evaluate_emission(plan: &Plan, instance: &Instance) -> Result<EmissionBreakdown, EvalError> {
    check_dimensions(plan, instance)?;
    Ok(emission_with(plan, instance, service_quantile(instance), DEFAULT_PENALTY_RATE))
}

pub fn evaluate(plan: &Plan, instance: &Instance) -> Result<ObjectivePair, EvalError> {
    evaluate_with_rate(plan, instance, DEFAULT_PENALTY_RATE)
}

pub fn evaluate_with_rate(plan: &Plan, instance: &Instance, rate: f64) -> Result<ObjectivePair, EvalError> {
    check_dimensions(plan, instance)?;
    let z = service_quantile(instance);
    Ok(ObjectivePair::new(
        cost_with(plan, instance, z, rate).total(),
        emission_with(plan, instance, z, rate).total(),
    ))
}

/// Decodes and evaluates chromosomes for one instance, counting every call.
#[derive(Debug)]
pub struct Evaluator<'a> {
    instance: &'a Instance,
    opts: DecodeOptions,
    penalty_rate: f64,
    z_alpha: f64,
    count: AtomicU64,
}

impl<'a> Evaluator<'a> {
    pub fn new(instance: &'a Instance, opts: DecodeOptions, penalty_rate: f64) -> Self {
        Evaluator {
            instance,
            opts,
            penalty_rate,
            z_alpha: service_quantile(instance),
            count: AtomicU64::new(0),
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    pub fn options(&self) -> &DecodeOptions {
        &self.opts
    }

    pub fn decode(&self, chromosome: &Chromosome) -> Plan {
        decode(chromosome, self.instance, &self.opts)
    }

    /// Objectives of a plan decoded against this evaluator's instance.
    pub fn objectives_of(&self, plan: &Plan) -> ObjectivePair {
        ObjectivePair::new(
            cost_with(plan, self.instance, self.z_alpha, self.penalty_rate).total(),
            emission_with(plan, self.instance, self.z_alpha, self.penalty_rate).total(),
        )
    }

    /// One function evaluation: decode then evaluate.
    pub fn evaluate(&self, chromosome: &Chromosome) -> ObjectivePair {
        self.count.fetch_add(1, Ordering::Relaxed);
        self.objectives_of(&self.decode(chromosome))
    }

    pub fn evaluations(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::{DcOrder, InboundTrip, Tour};
    use crate::instance::{DcSite, Point, Retailer, Vehicle, Weights, SCHEMA_VERSION};

    fn singleton() -> Instance {
        let v = Vehicle {
            capacity: 100.0,
            fixed_cost: 60.0,
            fuel_empty: 0.1,
            fuel_full: 0.3,
            emission_factor: 2.0,
        };
        Instance {
            schema: SCHEMA_VERSION,
            dcs: vec![DcSite {
                coord: Point::new(0.0, 0.0),
                fixed_cost: 800.0,
                inbound_fixed_cost: 15.0,
                order_cost: 11.0,
                supply_cost: 6.0,
                lead_time: 4.0,
                holding_cost: 9.0,
                capacity: 500.0,
                emission_weight: 1.2,
            }],
            retailers: vec![Retailer {
                coord: Point::new(3.0, 4.0),
                demand_mean: 100.0,
                demand_var: 25.0,
            }],
            vehicles_in: vec![v.clone()],
            vehicles_out: vec![v],
            supplier: Point::new(0.0, 10.0),
            weights: Weights {
                beta: 1.0,
                theta: 1.0,
                alpha: 0.95,
                big_m: 200.0,
                ship_rate: 1.0,
            },
            seed: 0,
        }
    }

    fn singleton_plan(n: u32) -> Plan {
        let q = 100.0 / f64::from(n);
        Plan {
            open_dcs: vec![0],
            assignment: vec![Some(0)],
            orders: vec![DcOrder {
                dc: 0,
                n,
                q,
                inbound: vec![InboundTrip { vehicle: 0, load: q }],
            }],
            tours: vec![Tour {
                dc: 0,
                vehicle: 0,
                retailers: vec![0],
                loads: vec![q, 0.0],
            }],
            unassigned: vec![],
            unserved: vec![],
        }
    }

    #[test]
    fn singleton_matches_hand_expansion() {
        let inst = singleton();
        let plan = singleton_plan(2);
        let z = z_quantile(0.95).unwrap();
        let ss = z * (4.0f64 * 25.0).sqrt();
        // nq = mu, so neither scenario bit is set and inventory is the safety stock.
        let expected_z1 = 800.0 + 60.0 + 60.0 + (15.0 + 6.0 * 50.0) * 2.0 + 10.0 * 2.0 + 11.0 * 2.0 + 9.0 * ss;
        let cost = evaluate_cost(&plan, &inst).unwrap();
        assert!((cost.total() - expected_z1).abs() < 1e-9 * expected_z1);
        assert!((cost.inventory - 9.0 * ss).abs() < 1e-9);

        let slope = 0.2 / 100.0;
        let inbound = 2.0 * (2.0 * 0.1 + slope * 50.0) * 2.0 * 10.0;
        let outbound = 2.0 * (0.1 + slope * 50.0) * 2.0 * 5.0 + 2.0 * 0.1 * 2.0 * 5.0;
        let dc = 1.2 * 9.0 * ss;
        let em = evaluate_emission(&plan, &inst).unwrap();
        assert!((em.inbound - inbound).abs() < 1e-12);
        assert!((em.outbound - outbound).abs() < 1e-12);
        assert!((em.dc - dc).abs() < 1e-9);
    }

    #[test]
    fn inbound_emission_example() {
        let mut inst = singleton();
        inst.vehicles_in[0].emission_factor = 2.0;
        inst.dcs[0].coord = Point::new(0.0, 0.0);
        inst.supplier = Point::new(10.0, 0.0);
        let mut plan = singleton_plan(1);
        plan.orders[0].inbound[0].load = 50.0;
        let em = evaluate_emission(&plan, &inst).unwrap();
        assert!((em.inbound - 6.0).abs() < 1e-12);
    }

    #[test]
    fn empty_plan_is_zero() {
        let mut inst = singleton();
        inst.retailers.clear();
        let plan = Plan {
            open_dcs: vec![],
            assignment: vec![],
            orders: vec![],
            tours: vec![],
            unassigned: vec![],
            unserved: vec![],
        };
        assert_eq!(evaluate_cost(&plan, &inst).unwrap(), CostBreakdown::default());
        assert_eq!(evaluate_emission(&plan, &inst).unwrap(), EmissionBreakdown::default());
    }

    #[test]
    fn beta_scales_shipping_only() {
        let inst = singleton();
        let plan = singleton_plan(2);
        let base = evaluate_cost(&plan, &inst).unwrap();
        let mut doubled = inst.clone();
        doubled.weights.beta = 2.0;
        let c = evaluate_cost(&plan, &doubled).unwrap();
        assert_eq!(c.shipping_inbound, 2.0 * base.shipping_inbound);
        assert_eq!(c.shipping_outbound, 2.0 * base.shipping_outbound);
        assert_eq!(c.fixed_dc, base.fixed_dc);
        assert_eq!(c.inventory, base.inventory);
        assert_eq!(c.ordering, base.ordering);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let inst = singleton();
        let mut plan = singleton_plan(1);
        plan.assignment.push(None);
        assert!(matches!(evaluate(&plan, &inst), Err(EvalError::Dimension(_))));
    }

    #[test]
    fn evaluator_counts_calls() {
        let inst = singleton();
        let ev = Evaluator::new(&inst, DecodeOptions::new(2), DEFAULT_PENALTY_RATE);
        let c = Chromosome::new(vec![0.3; 4], inst.size()).unwrap();
        let a = ev.evaluate(&c);
        let b = ev.evaluate(&c);
        assert_eq!(a, b);
        assert_eq!(ev.evaluations(), 2);
    }
}
