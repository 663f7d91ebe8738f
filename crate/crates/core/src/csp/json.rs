use serde::{Deserialize, Serialize};

use super::{Bipartition, Constraint, CspInstance};
use crate::error::{Error, Result};

// Field order is alphabetical so serde_json emits sorted keys.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(super) struct InstanceDoc {
    alphabets: Vec<usize>,
    bipartition: Option<Bipartition>,
    edges: Vec<EdgeDoc>,
    n: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    allowed: Vec<[usize; 2]>,
    id: usize,
    u: usize,
    v: usize,
}

impl From<&CspInstance> for InstanceDoc {
    fn from(inst: &CspInstance) -> Self {
        InstanceDoc {
            alphabets: inst.alphabets.clone(),
            bipartition: inst.bipartition.clone(),
            edges: inst
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    allowed: e.allowed.iter().map(|&(a, b)| [a, b]).collect(),
                    id: e.id,
                    u: e.u,
                    v: e.v,
                })
                .collect(),
            n: inst.num_vertices(),
        }
    }
}

impl InstanceDoc {
    pub(super) fn into_instance(self) -> Result<CspInstance> {
        if self.n != self.alphabets.len() {
            return Err(Error::Parse(format!(
                "n = {} but alphabets has {} entries",
                self.n,
                self.alphabets.len()
            )));
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        for (pos, e) in self.edges.into_iter().enumerate() {
            let count = e.allowed.len();
            let c = Constraint::new(e.id, e.u, e.v, e.allowed.into_iter().map(|[a, b]| (a, b)));
            if c.allowed.len() != count {
                return Err(Error::Parse(format!("edges[{pos}] (id {}): duplicate allowed pair", e.id)));
            }
            edges.push(c);
        }
        CspInstance::new(self.alphabets, edges, self.bipartition).map_err(|err| match err {
            Error::Validation(msg) => Error::Parse(msg),
            other => other,
        })
    }
}

pub(super) fn to_canonical(inst: &CspInstance) -> String {
    serde_json::to_string(&InstanceDoc::from(inst)).expect("instance serialization is infallible")
}

pub(super) fn parse(text: &str) -> Result<CspInstance> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    doc.into_instance()
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn single_edge_round_trips_byte_identically() {
        let text = r#"{"alphabets":[2,2],"bipartition":{"A":[0],"B":[1]},"edges":[{"allowed":[[0,0],[1,1]],"id":0,"u":0,"v":1}],"n":2}"#;
        let inst = CspInstance::from_json(text).unwrap();
        assert_eq!(inst, equality_edge(2));
        assert_eq!(inst.to_json(), text);
    }

    #[test]
    fn empty_edge_instance_serializes() {
        let inst = CspInstance::new(vec![3], vec![], None).unwrap();
        let text = inst.to_json();
        assert_eq!(text, r#"{"alphabets":[3],"bipartition":null,"edges":[],"n":1}"#);
        assert_eq!(CspInstance::from_json(&text).unwrap(), inst);
    }

    #[test]
    fn unsorted_input_canonicalizes() {
        let text = r#"{"n":3,"alphabets":[2,2,2],"bipartition":null,"edges":[
            {"id":5,"u":1,"v":2,"allowed":[[1,0],[0,1]]},
            {"id":2,"u":0,"v":1,"allowed":[[1,1],[0,0]]}]}"#;
        let inst = CspInstance::from_json(text).unwrap();
        let canon = inst.to_json();
        assert!(canon.starts_with(r#"{"alphabets":[2,2,2],"bipartition":null,"edges":[{"allowed":[[0,0],[1,1]],"id":2"#));
        assert_eq!(CspInstance::from_json(&canon).unwrap().to_json(), canon);
    }

    #[test]
    fn schema_errors_carry_location() {
        let err = CspInstance::from_json(r#"{"n":2,"alphabets":[2,2],"bipartition":null,"edges":[{"id":0,"u":0}]}"#)
            .unwrap_err();
        match err {
            Error::Parse(msg) => assert!(msg.contains("line 1"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
        let err = CspInstance::from_json(r#"{"n":3,"alphabets":[2,2],"bipartition":null,"edges":[]}"#).unwrap_err();
        assert!(matches!(err, Error::Parse(_)));
        let err = CspInstance::from_json(
            r#"{"n":2,"alphabets":[2,2],"bipartition":null,"edges":[{"id":0,"u":0,"v":1,"allowed":[[0,0],[0,0]]}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse(ref m) if m.contains("edges[0]")));
        let err = CspInstance::from_json(
            r#"{"n":2,"alphabets":[2,2],"bipartition":null,"edges":[{"id":0,"u":0,"v":1,"allowed":[[0,5]]}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse(ref m) if m.contains("edge 0")));
    }
}
