//! Instance input: inline flags or a JSON file, integral or decimal arrival
//! times.

use std::path::Path;

use aop_synth::aop::{dualize, parse_gates};
use aop_synth::fractional::{parse_decimal, FractionalSpec};
use aop_synth::{AopSpec, Error, GateKind, Rational, Result};
use num_rational::Ratio;
use serde::Deserialize;

#[derive(Deserialize)]
struct InstanceFile {
    gates: String,
    arrival: Vec<serde_json::Value>,
}

pub enum Instance {
    Integral(AopSpec),
    Fractional(FractionalSpec),
}

impl Instance {
    pub fn m(&self) -> usize {
        match self {
            Instance::Integral(s) => s.m(),
            Instance::Fractional(s) => s.arrival.len(),
        }
    }

    pub fn rational_arrival(&self) -> Vec<Rational> {
        match self {
            Instance::Integral(s) => {
                s.arrival().iter().map(|&a| Ratio::from_integer(i64::from(a))).collect()
            }
            Instance::Fractional(s) => s.arrival.clone(),
        }
    }
}

pub struct InstanceArgs<'a> {
    pub depth: Option<usize>,
    pub dual: bool,
    pub gates: Option<&'a str>,
    pub arrival: Option<&'a str>,
    pub file: Option<&'a Path>,
}

fn to_decimal(v: &serde_json::Value) -> Result<Rational> {
    match v {
        serde_json::Value::Number(n) => parse_decimal(&n.to_string()),
        serde_json::Value::String(s) => parse_decimal(s),
        other => Err(Error::Parse(format!("arrival time {other} is not a number"))),
    }
}

fn build(gates: Vec<GateKind>, arrival: Vec<Rational>) -> Result<Instance> {
    if arrival.iter().all(|a| a.is_integer()) {
        let mut ints = Vec::with_capacity(arrival.len());
        for a in &arrival {
            let v = u32::try_from(*a.numer())
                .map_err(|_| Error::Parse(format!("arrival time {a} out of range")))?;
            ints.push(v);
        }
        Ok(Instance::Integral(AopSpec::new(gates, ints)?))
    } else {
        Ok(Instance::Fractional(FractionalSpec::new(gates, arrival)?))
    }
}

fn parse_arrival_list(s: &str) -> Result<Vec<Rational>> {
    s.trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(parse_decimal)
        .collect()
}

pub fn load(args: &InstanceArgs) -> Result<Instance> {
    let inst = if let Some(m) = args.depth {
        if m > aop_synth::subset::MAX_INPUTS {
            return Err(Error::UnsupportedSize { m, max: aop_synth::subset::MAX_INPUTS });
        }
        Instance::Integral(AopSpec::depth_instance(m)?)
    } else if let Some(path) = args.file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let f: InstanceFile = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let arrival = f.arrival.iter().map(to_decimal).collect::<Result<Vec<_>>>()?;
        build(parse_gates(&f.gates)?, arrival)?
    } else {
        let gates = parse_gates(args.gates.unwrap_or(""))?;
        let arrival = match args.arrival {
            Some(a) => parse_arrival_list(a)?,
            None => vec![Rational::from_integer(0); gates.len() + 1],
        };
        build(gates, arrival)?
    };
    if !args.dual {
        return Ok(inst);
    }
    Ok(match inst {
        Instance::Integral(s) => Instance::Integral(dualize(&s)),
        Instance::Fractional(s) => {
            Instance::Fractional(FractionalSpec::new(s.gates.iter().map(|g| g.dual()).collect(), s.arrival)?)
        }
    })
}
