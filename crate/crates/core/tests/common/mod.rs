//! Fixtures shared by the integration tests.

#![allow(dead_code)]

use std::path::PathBuf;

/// A named `ew classify` run whose JSON output is checked in under `tests/golden`.
pub struct Fixture {
    pub name: &'static str,
    pub surface: &'static str,
    pub v: &'static str,
    pub w: &'static str,
    pub det: &'static str,
    pub exit: i32,
}

const POINT: &str = "[0,[0,0],1]";
const STRUCTURE_SHEAF: &str = "[1,[0,0],\"1/2\"]";

pub const FIXTURES: &[Fixture] = &[
    Fixture { name: "hilbert_chow_v2_3", surface: "builtin:U", v: "[1,[0,0],\"-3/2\"]", w: POINT, det: "L", exit: 0 },
    Fixture { name: "hilbert_chow_v2_1", surface: "builtin:U", v: "[1,[0,0],\"-1/2\"]", w: POINT, det: "L", exit: 0 },
    Fixture { name: "lgu", surface: "builtin:U", v: "[2,[0,0],-2]", w: POINT, det: "L", exit: 0 },
    Fixture { name: "p1_spherical", surface: "builtin:U-nodal", v: "[2,[1,1],0]", w: POINT, det: "LK", exit: 0 },
    Fixture { name: "p1_spherical_other_det", surface: "builtin:U-nodal", v: "[2,[1,1],0]", w: POINT, det: "L", exit: 0 },
    Fixture { name: "exceptional_flop", surface: "builtin:U", v: "[1,[1,1],\"-1/2\"]", w: STRUCTURE_SHEAF, det: "L", exit: 0 },
    Fixture { name: "twice_v0_square_one", surface: "builtin:U", v: "[2,[0,0],-1]", w: POINT, det: "LK", exit: 0 },
    Fixture { name: "twice_v0_square_one_other_det", surface: "builtin:U", v: "[2,[0,0],-1]", w: POINT, det: "L", exit: 2 },
    Fixture { name: "nodal_square_two", surface: "builtin:U-nodal", v: "[0,[1,1],1]", w: STRUCTURE_SHEAF, det: "L", exit: 0 },
];

impl Fixture {
    pub fn args(&self) -> Vec<String> {
        ["ew", "classify", "--surface", self.surface, "--v", self.v, "--w", self.w, "--det", self.det].iter().map(|s| s.to_string()).collect()
    }

    pub fn golden_path(&self) -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{}.json", self.name))
    }

    /// Runs the fixture in-process and compares with its golden file; with
    /// `EW_UPDATE_GOLDEN=1` the file is rewritten instead.
    pub fn check(&self) -> Result<serde_json::Value, String> {
        let (code, out, err) = enriques_walls::cli::run(self.args());
        if code != self.exit {
            return Err(format!("{}: exit {code}, expected {}: {err}", self.name, self.exit));
        }
        let got: serde_json::Value = serde_json::from_str(&out).map_err(|e| format!("{}: {e}", self.name))?;
        let path = self.golden_path();
        if std::env::var("EW_UPDATE_GOLDEN").as_deref() == Ok("1") {
            std::fs::write(&path, &out).map_err(|e| e.to_string())?;
            return Ok(got);
        }
        let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        let want: serde_json::Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        if got != want {
            return Err(format!("{}: output differs from {}", self.name, path.display()));
        }
        Ok(got)
    }
}
