//! Dataset composition statistics.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::manifest::DatasetManifest;

/// User-supplied category standardization: raw label → canonical label, and
/// canonical label → group (for instance "instrument" or "tissue").
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CategoryTable {
    #[serde(default)]
    pub rename: BTreeMap<String, String>,
    #[serde(default)]
    pub groups: BTreeMap<String, String>,
}

pub const UNLABELED_GROUP: &str = "unlabeled";
pub const OTHER_GROUP: &str = "other";

impl CategoryTable {
    pub fn canonical<'a>(&'a self, raw: &'a str) -> &'a str {
        self.rename.get(raw).map_or(raw, String::as_str)
    }

    pub fn group_of(&self, category: Option<&str>) -> &str {
        match category {
            None => UNLABELED_GROUP,
            Some(raw) => self
                .groups
                .get(self.canonical(raw))
                .map_or(OTHER_GROUP, String::as_str),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DatasetStats {
    pub videos: usize,
    pub frames: usize,
    pub masks_by_group: BTreeMap<String, usize>,
    pub masks: usize,
    pub masklets: usize,
    pub avg_duration_s: f64,
}

/// Counts by exhaustive enumeration. `duration_decimals` rounds the mean
/// duration (0 reproduces whole-second reporting).
pub fn dataset_stats(d: &DatasetManifest, table: &CategoryTable, duration_decimals: u32) -> DatasetStats {
    let mut masks_by_group: BTreeMap<String, usize> = BTreeMap::new();
    let mut masks = 0;
    for m in &d.masklets {
        let group = table.group_of(m.category.as_deref()).to_string();
        *masks_by_group.entry(group).or_default() += m.frames.len();
        masks += m.frames.len();
    }
    let mut total_duration = 0.0;
    for v in &d.videos {
        total_duration += v.duration_s;
    }
    let avg = if d.videos.is_empty() {
        0.0
    } else {
        total_duration / d.videos.len() as f64
    };
    let scale = 10f64.powi(duration_decimals as i32);
    DatasetStats {
        videos: d.videos.len(),
        frames: d.videos.iter().map(|v| v.frame_count).sum(),
        masks_by_group,
        masks,
        masklets: d.masklets.len(),
        avg_duration_s: (avg * scale).round() / scale,
    }
}

impl DatasetStats {
    /// Aligned text table with one column per mask group.
    pub fn to_table(&self, name: &str) -> String {
        let groups: Vec<&String> = self.masks_by_group.keys().collect();
        let mut header = vec!["Dataset".to_string(), "Video".into(), "Frame".into()];
        header.extend(groups.iter().map(|g| capitalize(g)));
        header.extend(["Masklet".to_string(), "Avg. Dur. (s)".into()]);
        let mut row = vec![name.to_string(), self.videos.to_string(), self.frames.to_string()];
        row.extend(groups.iter().map(|g| self.masks_by_group[*g].to_string()));
        row.extend([self.masklets.to_string(), format_number(self.avg_duration_s)]);

        let widths: Vec<usize> = header.iter().zip(&row).map(|(h, r)| h.len().max(r.len())).collect();
        let mut out = String::new();
        for line in [&header, &row] {
            for (i, (cell, w)) in line.iter().zip(&widths).enumerate() {
                if i == 0 {
                    let _ = write!(out, "{cell:<w$}");
                } else {
                    let _ = write!(out, "  {cell:>w$}");
                }
            }
            out.push('\n');
        }
        out
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn format_number(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::manifest::{MaskletRecord, VideoRecord};

    fn video(id: &str, secs: f64) -> VideoRecord {
        VideoRecord {
            id: id.into(),
            frame_count: 3,
            width: 8,
            height: 8,
            duration_s: secs,
        }
    }

    #[test]
    fn empty_manifest_is_all_zeros() {
        let s = dataset_stats(&DatasetManifest::default(), &CategoryTable::default(), 0);
        assert_eq!((s.videos, s.frames, s.masks, s.masklets), (0, 0, 0, 0));
        assert_eq!(s.avg_duration_s, 0.0);
        assert!(s.masks_by_group.is_empty());
    }

    #[test]
    fn mean_duration() {
        let d = DatasetManifest {
            name: "x".into(),
            videos: vec![video("a", 10.0), video("b", 20.0)],
            masklets: vec![],
        };
        assert_eq!(dataset_stats(&d, &CategoryTable::default(), 0).avg_duration_s, 15.0);
    }

    #[test]
    fn groups_follow_the_table() {
        let mut table = CategoryTable::default();
        table.rename.insert("Grasper".into(), "grasper".into());
        table.groups.insert("grasper".into(), "instrument".into());
        table.groups.insert("liver".into(), "tissue".into());
        let rec = |cat: Option<&str>, n: usize| MaskletRecord {
            video_id: "a".into(),
            instance_id: n as u32,
            category: cat.map(str::to_string),
            frames: (0..n).collect(),
            rle_path: None,
        };
        let d = DatasetManifest {
            name: "x".into(),
            videos: vec![video("a", 1.0)],
            masklets: vec![rec(Some("Grasper"), 1), rec(Some("liver"), 2), rec(Some("gauze"), 3), rec(None, 4)],
        };
        let s = dataset_stats(&d, &table, 0);
        assert_eq!(s.masks_by_group["instrument"], 1);
        assert_eq!(s.masks_by_group["tissue"], 2);
        assert_eq!(s.masks_by_group[OTHER_GROUP], 3);
        assert_eq!(s.masks_by_group[UNLABELED_GROUP], 4);
        assert_eq!(s.masks, 10);
        let table = s.to_table("x");
        assert!(table.starts_with("Dataset  Video  Frame  Instrument"));
    }
}
