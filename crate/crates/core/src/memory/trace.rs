//! One-line-per-observation dump of bank transitions, and a validator that
//! re-derives the admission gate from the dump alone.

use std::fmt;

use super::MemoryConfig;

#[derive(Clone, Debug, PartialEq)]
pub enum Event {
    /// The observation became the permanent initial entry.
    Initial,
    /// Stable observation added to the candidate buffer.
    Buffered { streak: usize },
    /// Unstable observation; the buffer was emptied.
    Reset { discarded: usize },
    /// The streak reached `delta` and `selected` joined the long-term queue.
    Admitted {
        selected: usize,
        similarity: f64,
        evicted: Option<usize>,
    },
}

/// State change caused by one `observe` call.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub frame: usize,
    pub confidence: f64,
    pub present: bool,
    pub event: Event,
    /// Long-term frame indices after the transition, oldest first.
    pub long_term: Vec<usize>,
    pub short_len: usize,
    pub buffer_len: usize,
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "t={} conf={} present={} ",
            self.frame,
            self.confidence,
            u8::from(self.present)
        )?;
        match &self.event {
            Event::Initial => write!(f, "event=init")?,
            Event::Buffered { streak } => write!(f, "event=buffer streak={streak}")?,
            Event::Reset { discarded } => write!(f, "event=reset discarded={discarded}")?,
            Event::Admitted {
                selected,
                similarity,
                evicted,
            } => {
                write!(f, "event=admit selected={selected} sim={similarity} evicted=")?;
                match evicted {
                    Some(e) => write!(f, "{e}")?,
                    None => write!(f, "-")?,
                }
            }
        }
        let long: Vec<String> = self.long_term.iter().map(usize::to_string).collect();
        write!(
            f,
            " long=[{}] short={} buffer={}",
            long.join(","),
            self.short_len,
            self.buffer_len
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceProblem {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for TraceProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Replays a dump and reports every line where the recorded state disagrees
/// with the gating rules: admissions only after `delta` consecutive stable
/// observations, selections drawn from the current run, capacity bounds, and
/// an empty buffer after each admission.
pub fn validate_trace(text: &str, cfg: &MemoryConfig) -> Vec<TraceProblem> {
    let mut problems = Vec::new();
    let mut run: Vec<usize> = Vec::new();
    let mut long: Vec<usize> = Vec::new();
    let mut seen_init = false;
    let mut last_frame: Option<usize> = None;

    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let lineno = i + 1;
        let mut problem = |m: String| {
            problems.push(TraceProblem {
                line: lineno,
                message: m,
            })
        };
        let fields: std::collections::HashMap<&str, &str> =
            line.split_whitespace().filter_map(|kv| kv.split_once('=')).collect();
        let get = |k: &str| fields.get(k).copied();
        let (Some(frame), Some(conf), Some(present), Some(event)) = (
            get("t").and_then(|v| v.parse::<usize>().ok()),
            get("conf").and_then(|v| v.parse::<f64>().ok()),
            get("present"),
            get("event"),
        ) else {
            problem(format!("unparseable line '{line}'"));
            continue;
        };
        if last_frame.is_some_and(|l| frame <= l) {
            problem(format!("frame {frame} is not after the previous frame"));
        }
        last_frame = Some(frame);

        if !seen_init {
            if event != "init" {
                problem("first transition must establish the initial entry".into());
            }
            seen_init = true;
            continue;
        }
        if event == "init" {
            problem("initial entry established twice".into());
            continue;
        }

        let stable = conf > cfg.gamma_iou && present == "1";
        if stable {
            run.push(frame);
        } else {
            run.clear();
        }
        match event {
            "reset" if stable => problem(format!("reset on a stable frame (conf {conf})")),
            "buffer" | "admit" if !stable => {
                problem(format!("{event} on an unstable frame (conf {conf}, present {present})"))
            }
            "buffer" if run.len() >= cfg.delta => {
                problem(format!("streak reached {} without an admission", run.len()))
            }
            "admit" => {
                if run.len() != cfg.delta {
                    problem(format!("admission after a streak of {}, expected {}", run.len(), cfg.delta));
                }
                match get("selected").and_then(|v| v.parse::<usize>().ok()) {
                    Some(sel) if run.contains(&sel) => {
                        if long.len() == cfg.n_long {
                            long.remove(0);
                        }
                        long.push(sel);
                    }
                    Some(sel) => problem(format!("selected frame {sel} is not in the current stable run")),
                    None => problem("admission without a selected frame".into()),
                }
                run.clear();
                if get("buffer") != Some("0") {
                    problem("buffer not empty after an admission".into());
                }
            }
            "buffer" | "reset" => {}
            other => problem(format!("unknown event '{other}'")),
        }

        let recorded: Option<Vec<usize>> = get("long").and_then(|v| {
            let inner = v.strip_prefix('[')?.strip_suffix(']')?;
            if inner.is_empty() {
                Some(Vec::new())
            } else {
                inner.split(',').map(|x| x.parse().ok()).collect()
            }
        });
        match recorded {
            Some(r) if r == long => {}
            Some(r) => problem(format!("long-term queue {r:?}, replay gives {long:?}")),
            None => problem("missing long-term queue".into()),
        }
        if let Some(s) = get("short").and_then(|v| v.parse::<usize>().ok()) {
            if s > cfg.n_short {
                problem(format!("short-term size {s} exceeds {}", cfg.n_short));
            }
        }
    }
    problems
}
