//! Bundled reference tables for cubic fivefolds (`n = 6`, `d = 3`).

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::jacobian::LocusSpec;
use crate::enumerate::MaximalFamily;
use crate::error::{Error, Result};
use crate::lattice::{halfspace_support, SimplexContext, WeightVector};
use crate::orbit::chain::ChainSpec;

pub const EXPECTED_TABLES_JSON: &str = include_str!("../data/expected_tables.json");
pub const EXPECTED_TABLES_SHA256: &str = "b6ae62028d053e7735b9ef227c7de0599a38d4c364b4caa5043618a8db339ac1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyRow {
    pub id: usize,
    pub vector: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnstableRow {
    pub id: usize,
    pub vector: Vec<i64>,
    pub alternates: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularRow {
    pub id: usize,
    pub locus: String,
    pub dimension: i64,
    pub degree: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationsRow {
    pub id: usize,
    pub equations: String,
    pub locus: LocusSpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetainedFamilies {
    pub point: Vec<usize>,
    pub line: Vec<usize>,
    pub conic: Vec<usize>,
    pub two_lines: Vec<usize>,
    pub intersection_2_2: Vec<usize>,
}

impl RetainedFamilies {
    /// `(locus type, ids)` in table order.
    pub fn groups(&self) -> [(&'static str, &[usize]); 5] {
        [
            ("point", &self.point),
            ("line", &self.line),
            ("conic", &self.conic),
            ("two-lines", &self.two_lines),
            ("(2,2)-intersection", &self.intersection_2_2),
        ]
    }

    pub fn ids(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.groups().iter().flat_map(|(_, ids)| ids.iter().copied()).collect();
        v.sort_unstable();
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSupport {
    pub family: usize,
    pub monomials: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedTables {
    pub n: usize,
    pub d: u32,
    pub families: Vec<FamilyRow>,
    pub unstable: UnstableRow,
    pub singular_table: Vec<SingularRow>,
    pub equations_table: Vec<EquationsRow>,
    pub chains: Vec<ChainSpec>,
    pub final_19: RetainedFamilies,
    pub sample_support: SampleSupport,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl ExpectedTables {
    /// The bundled tables, after checking their digest.
    pub fn bundled() -> Result<Self> {
        let digest = sha256_hex(EXPECTED_TABLES_JSON.as_bytes());
        if digest != EXPECTED_TABLES_SHA256 {
            return Err(Error::Internal(format!("bundled tables digest {digest} does not match")));
        }
        Self::from_json(EXPECTED_TABLES_JSON)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: ExpectedTables = serde_json::from_str(text).map_err(|e| Error::MalformedDocument(e.to_string()))?;
        t.validate()?;
        Ok(t)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::MalformedDocument(m));
        for (i, row) in self.families.iter().enumerate() {
            if row.id != i + 1 {
                return bad(format!("family rows out of order at {}", row.id));
            }
        }
        if self.unstable.id != self.families.len() + 1 {
            return bad("unstable family must follow the maximal families".into());
        }
        let ids = |rows: Vec<usize>| rows.iter().enumerate().all(|(i, &id)| id == i + 1) && rows.len() == self.families.len();
        if !ids(self.singular_table.iter().map(|r| r.id).collect()) {
            return bad("singular table rows do not match the families".into());
        }
        if !ids(self.equations_table.iter().map(|r| r.id).collect()) {
            return bad("equations table rows do not match the families".into());
        }
        Ok(())
    }

    /// Number of families including the unstable one.
    pub fn len(&self) -> usize {
        self.families.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vector(&self, id: usize) -> Result<WeightVector> {
        let raw = if id == self.unstable.id {
            &self.unstable.vector
        } else {
            &self.families.get(id.wrapping_sub(1)).ok_or(Error::UnknownFamily(id))?.vector
        };
        WeightVector::new(raw.clone())
    }

    fn check_context(&self, ctx: &SimplexContext) -> Result<()> {
        if ctx.n() != self.n || ctx.d() != self.d {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    /// Families `1..=len()` built from the tabulated vectors, in table order
    /// (index `id - 1`).
    pub fn atlas(&self, ctx: &SimplexContext) -> Result<Vec<MaximalFamily>> {
        self.check_context(ctx)?;
        (1..=self.len())
            .map(|id| {
                let v = self.vector(id)?;
                let alternates = if id == self.unstable.id {
                    self.unstable.alternates.iter().map(|a| WeightVector::new(a.clone())).collect::<Result<_>>()?
                } else {
                    vec![v.clone()]
                };
                Ok(MaximalFamily { support: halfspace_support(ctx, &v, false)?, vector: v, alternates, hull: None })
            })
            .collect()
    }

    pub fn singular_row(&self, id: usize) -> Result<&SingularRow> {
        self.singular_table.get(id.wrapping_sub(1)).ok_or(Error::UnknownFamily(id))
    }

    pub fn equations_row(&self, id: usize) -> Result<&EquationsRow> {
        self.equations_table.get(id.wrapping_sub(1)).ok_or(Error::UnknownFamily(id))
    }
}

/// Computed families matched against the tabulated ones by support.
#[derive(Debug, Clone)]
pub struct Labelling {
    /// `ids[i]` is the table id of `computed[i]`, if any.
    pub ids: Vec<Option<usize>>,
    /// Table ids with no computed family.
    pub missing: Vec<usize>,
}

pub fn label_atlas(ctx: &SimplexContext, computed: &[MaximalFamily], tables: &ExpectedTables) -> Result<Labelling> {
    let atlas = tables.atlas(ctx)?;
    let ids: Vec<Option<usize>> =
        computed.iter().map(|f| atlas.iter().position(|a| a.support == f.support).map(|i| i + 1)).collect();
    let missing = (1..=atlas.len()).filter(|id| !ids.contains(&Some(*id))).collect();
    Ok(Labelling { ids, missing })
}

/// Computed families reordered by table id; unmatched ones are dropped.
pub fn ordered_by_label(computed: &[MaximalFamily], labels: &Labelling) -> Vec<(usize, MaximalFamily)> {
    let mut out: Vec<(usize, MaximalFamily)> =
        computed.iter().zip(&labels.ids).filter_map(|(f, id)| id.map(|id| (id, f.clone()))).collect();
    out.sort_by_key(|(id, _)| *id);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_simplex;

    #[test]
    fn bundled_tables_load() {
        let t = ExpectedTables::bundled().unwrap();
        assert_eq!(t.len(), 23);
        assert_eq!(t.final_19.ids().len(), 19);
        assert_eq!(t.chains.len(), 4);
    }

    #[test]
    fn sample_support_matches_first_family() {
        let t = ExpectedTables::bundled().unwrap();
        let ctx = build_simplex(6, 3).unwrap();
        let atlas = t.atlas(&ctx).unwrap();
        let listed = ctx.support_from_strs(&t.sample_support.monomials).unwrap();
        assert_eq!(listed.len(), 43);
        assert_eq!(atlas[t.sample_support.family - 1].support, listed);
    }

    #[test]
    fn unstable_alternates_share_support() {
        let t = ExpectedTables::bundled().unwrap();
        let ctx = build_simplex(6, 3).unwrap();
        let atlas = t.atlas(&ctx).unwrap();
        let fam = &atlas[22];
        for a in &fam.alternates {
            assert_eq!(halfspace_support(&ctx, a, false).unwrap(), fam.support);
        }
    }

    #[test]
    fn wrong_context_rejected() {
        let t = ExpectedTables::bundled().unwrap();
        let ctx = build_simplex(5, 3).unwrap();
        assert_eq!(t.atlas(&ctx).unwrap_err(), Error::ContextMismatch);
    }
}
