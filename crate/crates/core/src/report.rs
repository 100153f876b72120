//! Report data model with deterministic serialization to JSON, CSV and
//! ASCII PLY. Field order is fixed and floats use the shortest roundtrip
//! formatting, so identical runs produce byte-identical files.

use serde::Serialize;

/// Finite value or absent; JSON cannot carry NaN/inf, so degenerate entries
/// serialize as null.
pub fn finite(x: f64) -> Option<f64> {
    if x.is_finite() {
        Some(x)
    } else {
        None
    }
}

pub fn pair(c: &num_complex::Complex<f64>) -> [f64; 2] {
    [c.re, c.im]
}

#[derive(Serialize, Clone, Debug, Default)]
pub struct Residuals {
    pub holo: Option<f64>,
    pub normal: Option<f64>,
    pub sff_match: Option<f64>,
    pub roundtrip: Option<f64>,
}

impl Residuals {
    pub fn fold_max(&mut self, other: &Residuals) {
        let max = |a: &mut Option<f64>, b: Option<f64>| {
            if let Some(v) = b {
                *a = Some(a.map_or(v, |x| x.max(v)));
            }
        };
        max(&mut self.holo, other.holo);
        max(&mut self.normal, other.normal);
        max(&mut self.sff_match, other.sff_match);
        max(&mut self.roundtrip, other.roundtrip);
    }
}

#[derive(Serialize, Clone, Debug, Default)]
pub struct SampleFlags {
    pub cor4_nonsingular: Option<bool>,
    pub cor4_l_in_n1perp: Option<bool>,
}

#[derive(Serialize, Clone, Debug)]
pub struct SampleRecord {
    /// Base chart coordinates.
    pub w: Vec<[f64; 2]>,
    /// Fiber coordinates (empty when not applicable).
    pub c: Vec<[f64; 2]>,
    pub status: String,
    pub nu: Option<usize>,
    pub residuals: Residuals,
    pub flags: SampleFlags,
    /// Map value at the sample, when the record carries one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Vec<[f64; 2]>>,
}

#[derive(Serialize, Clone, Debug, Default)]
pub struct Summary {
    pub samples: usize,
    pub failures: usize,
    pub degenerate: usize,
    pub max_residuals: Residuals,
}

#[derive(Serialize, Clone, Debug)]
pub struct Report {
    pub name: String,
    pub seed: u64,
    pub records: Vec<SampleRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn new(name: impl Into<String>, seed: u64, records: Vec<SampleRecord>) -> Self {
        let mut summary = Summary {
            samples: records.len(),
            ..Summary::default()
        };
        for rec in &records {
            if rec.status.starts_with("error") {
                summary.failures += 1;
            } else if matches!(
                rec.status.as_str(),
                "degenerate" | "singular" | "indeterminate"
            ) {
                summary.degenerate += 1;
            }
            summary.max_residuals.fold_max(&rec.residuals);
        }
        Report {
            name: name.into(),
            seed,
            records,
            summary,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// CSV with the fixed column order
    /// `w_re_0,w_im_0,..,c_re_0,c_im_0,..,f_re_0,f_im_0,..,status,nu`.
    pub fn to_csv(&self) -> String {
        let m = self.records.first().map_or(0, |r| r.w.len());
        let k = self.records.first().map_or(0, |r| r.c.len());
        let n = self
            .records
            .first()
            .and_then(|r| r.value.as_ref())
            .map_or(0, |v| v.len());
        let mut out = String::new();
        let mut header: Vec<String> = Vec::new();
        for i in 0..m {
            header.push(format!("w_re_{i}"));
            header.push(format!("w_im_{i}"));
        }
        for i in 0..k {
            header.push(format!("c_re_{i}"));
            header.push(format!("c_im_{i}"));
        }
        for i in 0..n {
            header.push(format!("f_re_{i}"));
            header.push(format!("f_im_{i}"));
        }
        header.push("status".into());
        header.push("nu".into());
        out.push_str(&header.join(","));
        out.push('\n');
        for rec in &self.records {
            let mut row: Vec<String> = Vec::new();
            for p in &rec.w {
                row.push(fmt_f64(p[0]));
                row.push(fmt_f64(p[1]));
            }
            for p in &rec.c {
                row.push(fmt_f64(p[0]));
                row.push(fmt_f64(p[1]));
            }
            for i in 0..n {
                let p = rec
                    .value
                    .as_ref()
                    .and_then(|v| v.get(i))
                    .copied()
                    .unwrap_or([f64::NAN, f64::NAN]);
                row.push(fmt_f64(p[0]));
                row.push(fmt_f64(p[1]));
            }
            row.push(rec.status.clone());
            row.push(rec.nu.map_or(String::new(), |v| v.to_string()));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// ASCII PLY point cloud of the map values: the first ambient coordinate
    /// supplies x/y and the real part of the second supplies z, giving a
    /// real 2D slice external tools can render directly.
    pub fn to_ply(&self) -> String {
        let points: Vec<[f64; 3]> = self
            .records
            .iter()
            .filter_map(|r| r.value.as_ref())
            .filter(|v| v.len() >= 2)
            .map(|v| [v[0][0], v[0][1], v[1][0]])
            .filter(|p| p.iter().all(|x| x.is_finite()))
            .collect();
        let mut out = String::new();
        out.push_str("ply\nformat ascii 1.0\n");
        out.push_str(&format!("comment {}\n", self.name));
        out.push_str(&format!("element vertex {}\n", points.len()));
        out.push_str("property double x\nproperty double y\nproperty double z\n");
        out.push_str("end_header\n");
        for p in points {
            out.push_str(&format!(
                "{} {} {}\n",
                fmt_f64(p[0]),
                fmt_f64(p[1]),
                fmt_f64(p[2])
            ));
        }
        out
    }
}

fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        // shortest roundtrip formatting: deterministic for identical bits
        format!("{x}")
    } else {
        "nan".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_record() -> SampleRecord {
        SampleRecord {
            w: vec![[1.0, -0.5]],
            c: vec![[0.25, 0.0]],
            status: "ok".into(),
            nu: Some(1),
            residuals: Residuals {
                holo: Some(1e-12),
                ..Residuals::default()
            },
            flags: SampleFlags::default(),
            value: Some(vec![[0.5, 0.25], [2.0, 0.0], [1.0, 1.0]]),
        }
    }

    #[test]
    fn serialization_is_deterministic() {
        let a = Report::new("demo", 0, vec![demo_record()]);
        let b = Report::new("demo", 0, vec![demo_record()]);
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.to_ply(), b.to_ply());
    }

    #[test]
    fn csv_has_the_documented_columns() {
        let rep = Report::new("demo", 0, vec![demo_record()]);
        let csv = rep.to_csv();
        let header = csv.lines().next().unwrap();
        assert_eq!(
            header,
            "w_re_0,w_im_0,c_re_0,c_im_0,f_re_0,f_im_0,f_re_1,f_im_1,f_re_2,f_im_2,status,nu"
        );
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn nan_residuals_become_null() {
        let mut rec = demo_record();
        rec.residuals.normal = finite(f64::NAN);
        rec.status = "degenerate".into();
        let rep = Report::new("demo", 0, vec![rec]);
        assert_eq!(rep.summary.degenerate, 1);
        assert!(rep.to_json().contains("\"normal\": null"));
    }
}
