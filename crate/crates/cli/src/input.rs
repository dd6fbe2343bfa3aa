//! Input loading: network files in the DSL or previously compiled JSON, and
//! target specifications given as value tuples, delta indices or set files.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

use stpstab_core::ledley::StateSet;
use stpstab_core::logic::{
    level_to_value_string, mixed_radix_encode, parse_network, value_str_to_level, CompiledNetwork,
    Network,
};
use stpstab_core::matrix::LogicalMatrix;
use stpstab_core::synth::TargetSpec;

use crate::TargetArgs;

pub enum NetworkInput {
    Dsl(Network),
    Compiled(CompiledNetwork),
}

impl NetworkInput {
    /// Load a network file; compiled JSON is recognized by a leading '{'.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        if text.trim_start().starts_with('{') {
            let compiled: CompiledNetwork = serde_json::from_str(&text)
                .with_context(|| format!("parsing compiled network {}", path.display()))?;
            compiled.validate().map_err(|e| anyhow!("{}: {e}", path.display()))?;
            Ok(NetworkInput::Compiled(compiled))
        } else {
            let net = parse_network(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
            Ok(NetworkInput::Dsl(net))
        }
    }

    pub fn name(&self) -> &str {
        match self {
            NetworkInput::Dsl(net) => net.name(),
            NetworkInput::Compiled(c) => &c.name,
        }
    }

    pub fn compiled(&self) -> CompiledNetwork {
        match self {
            NetworkInput::Dsl(net) => net.to_compiled(),
            NetworkInput::Compiled(c) => c.clone(),
        }
    }

    pub fn m_f(&self) -> Result<LogicalMatrix> {
        match self {
            NetworkInput::Dsl(net) => Ok(net.compile()),
            NetworkInput::Compiled(c) => c.m_f_logical().map_err(Into::into),
        }
    }

    pub fn state_radices(&self) -> Vec<usize> {
        match self {
            NetworkInput::Dsl(net) => net.state_radices(),
            NetworkInput::Compiled(c) => c.radices.states.clone(),
        }
    }

    pub fn control_radices(&self) -> Vec<usize> {
        match self {
            NetworkInput::Dsl(net) => net.control_radices(),
            NetworkInput::Compiled(c) => c.radices.controls.clone(),
        }
    }

    pub fn state_space(&self) -> usize {
        self.state_radices().iter().product()
    }

    /// Value-tuple labels "(v1,...,vn)" for every state index.
    pub fn state_labels(&self) -> Vec<String> {
        let radices = self.state_radices();
        (1..=self.state_space())
            .map(|x| {
                let digits = stpstab_core::logic::mixed_radix_decode(x, &radices);
                let parts: Vec<String> = digits
                    .iter()
                    .zip(&radices)
                    .map(|(&lvl, &k)| level_to_value_string(k, lvl))
                    .collect();
                format!("({})", parts.join(","))
            })
            .collect()
    }

    /// Parse "v1,...,vn" into a state delta index.
    pub fn tuple_to_index(&self, tuple: &str) -> Result<usize> {
        let radices = self.state_radices();
        let parts: Vec<&str> =
            tuple.trim().trim_start_matches('(').trim_end_matches(')').split(',').collect();
        if parts.len() != radices.len() {
            bail!("tuple ({tuple}) has {} components, expected {}", parts.len(), radices.len());
        }
        let levels = parts
            .iter()
            .zip(&radices)
            .map(|(part, &k)| value_str_to_level(k, part).map_err(|e| anyhow!("{e}")))
            .collect::<Result<Vec<usize>>>()?;
        Ok(mixed_radix_encode(&levels, &radices))
    }

    fn state_index(&self, index: usize) -> Result<usize> {
        let n = self.state_space();
        if index == 0 || index > n {
            bail!("state index {index} out of range 1..={n}");
        }
        Ok(index)
    }

    /// One set item: either a tuple "(v1,...,vn)" or a bare delta index.
    fn set_item_to_index(&self, item: &str) -> Result<usize> {
        let item = item.trim();
        if item.contains(',') || item.starts_with('(') {
            self.tuple_to_index(item)
        } else {
            self.state_index(item.parse().with_context(|| format!("bad state '{item}'"))?)
        }
    }

    /// Inline "{...}" set syntax or a file with one state per line.
    pub fn parse_set(&self, spec: &str) -> Result<StateSet> {
        let trimmed = spec.trim();
        let mut indices = Vec::new();
        if trimmed.starts_with('{') {
            let inner = trimmed.trim_start_matches('{').trim_end_matches('}');
            for item in split_top_level(inner) {
                if !item.trim().is_empty() {
                    indices.push(self.set_item_to_index(&item)?);
                }
            }
        } else {
            let text = fs::read_to_string(trimmed)
                .with_context(|| format!("reading set file {trimmed}"))?;
            for line in text.lines() {
                let line = line.split('#').next().unwrap_or("").trim();
                if !line.is_empty() {
                    indices.push(self.set_item_to_index(line)?);
                }
            }
        }
        if indices.is_empty() {
            bail!("target set is empty");
        }
        StateSet::from_indices(self.state_space(), indices).map_err(|e| anyhow!("{e}"))
    }

    pub fn resolve_target(&self, args: &TargetArgs) -> Result<TargetSpec> {
        if let Some(tuple) = &args.point {
            Ok(TargetSpec::Point(self.tuple_to_index(tuple)?))
        } else if let Some(index) = args.index {
            Ok(TargetSpec::Point(self.state_index(index)?))
        } else if let Some(set) = &args.set {
            Ok(TargetSpec::Set(self.parse_set(set)?))
        } else {
            bail!("one of --point, --index or --set is required");
        }
    }
}

/// Split on commas that are not nested inside parentheses.
fn split_top_level(text: &str) -> Vec<String> {
    let mut items = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for c in text.chars() {
        match c {
            '(' => {
                depth += 1;
                current.push(c);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                current.push(c);
            }
            ',' if depth == 0 => {
                items.push(std::mem::take(&mut current));
            }
            _ => current.push(c),
        }
    }
    if !current.trim().is_empty() {
        items.push(current);
    }
    items
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bcn4() -> NetworkInput {
        NetworkInput::Dsl(
            parse_network(
                "network bcn4\nstate X1 : bool\nstate X2 : bool\nstate X3 : bool\nstate X4 : bool\ncontrol U1 : bool\ncontrol U2 : bool\nX1' = X2 | U1\nX2' = X4 | (U2 & X1)\nX3' = (X1 & X4) ^ (!X3)\nX4' = (!X1) <-> U2\n",
            )
            .unwrap(),
        )
    }

    #[test]
    fn tuples_and_indices() {
        let net = bcn4();
        assert_eq!(net.tuple_to_index("1,1,0,1").unwrap(), 3);
        assert_eq!(net.tuple_to_index("(1,0,1,0)").unwrap(), 6);
        assert!(net.tuple_to_index("1,1,0").is_err());
        assert!(net.tuple_to_index("1,1,0,2").is_err());
    }

    #[test]
    fn inline_sets() {
        let net = bcn4();
        let set = net.parse_set("{(1,0,1,0),(1,0,0,1),(0,1,0,0)}").unwrap();
        assert_eq!(set.to_vec(), vec![6, 7, 12]);
        let set = net.parse_set("{6, 7, 12}").unwrap();
        assert_eq!(set.to_vec(), vec![6, 7, 12]);
        assert!(net.parse_set("{}").is_err());
        assert!(net.parse_set("{17}").is_err());
    }

    #[test]
    fn labels_use_value_tuples() {
        let net = bcn4();
        let labels = net.state_labels();
        assert_eq!(labels[0], "(1,1,1,1)");
        assert_eq!(labels[2], "(1,1,0,1)");
        assert_eq!(labels[15], "(0,0,0,0)");
    }
}
