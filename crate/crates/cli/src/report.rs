use std::fmt::Write as _;
use std::time::Duration;

use treesq::Bounds;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(String),
    Skipped(String),
}

impl Verdict {
    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail(_))
    }

    fn human(&self) -> String {
        match self {
            Verdict::Pass => "pass".into(),
            Verdict::Fail(why) => format!("FAIL ({why})"),
            Verdict::Skipped(why) => format!("skipped ({why})"),
        }
    }

    fn machine(&self) -> String {
        match self {
            Verdict::Pass => "pass".into(),
            Verdict::Fail(why) => format!("fail:{why}"),
            Verdict::Skipped(why) => format!("skipped:{why}"),
        }
    }
}

/// Summary of one CLI run.
#[derive(Debug, Clone, Default)]
pub struct RunReport {
    pub dims: Vec<usize>,
    pub degrees: Vec<usize>,
    pub bounds: Option<Bounds>,
    pub colours_used: Option<usize>,
    pub clique_size: Option<usize>,
    pub chi_exact: Option<usize>,
    pub verdicts: Vec<(&'static str, Verdict)>,
    pub warnings: Vec<String>,
    pub timings: Vec<(&'static str, Duration)>,
}

impl RunReport {
    pub fn verdict(&mut self, name: &'static str, verdict: Verdict) {
        self.verdicts.push((name, verdict));
    }

    pub fn any_failed(&self) -> bool {
        self.verdicts.iter().any(|(_, v)| v.is_fail())
    }

    pub fn render(&self, machine: bool, timings: bool) -> String {
        if machine {
            self.render_machine(timings)
        } else {
            self.render_human(timings)
        }
    }

    fn render_human(&self, timings: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "instance: d={} dims={} max-degrees={}",
            self.dims.len(),
            join(&self.dims, "x"),
            join(&self.degrees, ",")
        );
        if let Some(b) = &self.bounds {
            let jmv = b.jmv.map_or("undefined".to_string(), |j| j.to_string());
            let _ = writeln!(out, "bounds: lower={} upper={} jmv={jmv}", b.lower, b.upper);
        }
        if let Some(c) = self.clique_size {
            let _ = writeln!(out, "clique certificate size: {c}");
        }
        if let Some(x) = self.chi_exact {
            let _ = writeln!(out, "exact chromatic number of square: {x}");
        }
        if let Some(c) = self.colours_used {
            let _ = writeln!(out, "colours used: {c}");
        }
        for (name, v) in &self.verdicts {
            let _ = writeln!(out, "{name}: {}", v.human());
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        if timings && !self.timings.is_empty() {
            let phases: Vec<String> = self
                .timings
                .iter()
                .map(|(p, d)| format!("{p}={:.3}ms", d.as_secs_f64() * 1e3))
                .collect();
            let _ = writeln!(out, "time: {}", phases.join(" "));
        }
        out
    }

    fn render_machine(&self, timings: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "d={}", self.dims.len());
        let _ = writeln!(out, "dims={}", join(&self.dims, ","));
        let _ = writeln!(out, "max_degrees={}", join(&self.degrees, ","));
        if let Some(b) = &self.bounds {
            let _ = writeln!(out, "lower={}", b.lower);
            let _ = writeln!(out, "upper={}", b.upper);
            let _ = writeln!(
                out,
                "jmv={}",
                b.jmv.map_or("undefined".to_string(), |j| j.to_string())
            );
        }
        if let Some(c) = self.clique_size {
            let _ = writeln!(out, "clique_size={c}");
        }
        if let Some(x) = self.chi_exact {
            let _ = writeln!(out, "chi_exact={x}");
        }
        if let Some(c) = self.colours_used {
            let _ = writeln!(out, "colours_used={c}");
        }
        for (name, v) in &self.verdicts {
            let _ = writeln!(out, "verdict.{}={}", name.replace('-', "_"), v.machine());
        }
        let _ = writeln!(out, "warning={}", !self.warnings.is_empty());
        for w in &self.warnings {
            let _ = writeln!(out, "warning_text={w}");
        }
        if timings {
            for (p, d) in &self.timings {
                let _ = writeln!(out, "time_ms.{p}={:.3}", d.as_secs_f64() * 1e3);
            }
        }
        out
    }
}

fn join(xs: &[usize], sep: &str) -> String {
    xs.iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(sep)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunReport {
        let mut r = RunReport {
            dims: vec![3, 3],
            degrees: vec![2, 2],
            bounds: Some(Bounds {
                lower: 5,
                upper: 5,
                jmv: Some(5),
            }),
            colours_used: Some(5),
            ..Default::default()
        };
        r.verdict("proper-on-square", Verdict::Pass);
        r.verdict("spans-in-windows", Verdict::Skipped("wrapped".into()));
        r.timings.push(("colour", Duration::from_micros(1500)));
        r
    }

    #[test]
    fn machine_output() {
        let text = sample().render(true, false);
        assert_eq!(
            text,
            "d=2\ndims=3,3\nmax_degrees=2,2\nlower=5\nupper=5\njmv=5\ncolours_used=5\n\
             verdict.proper_on_square=pass\nverdict.spans_in_windows=skipped:wrapped\nwarning=false\n"
        );
        assert!(sample()
            .render(true, true)
            .ends_with("time_ms.colour=1.500\n"));
    }

    #[test]
    fn human_output() {
        let text = sample().render(false, true);
        assert!(text.starts_with("instance: d=2 dims=3x3 max-degrees=2,2\n"));
        assert!(text.contains("spans-in-windows: skipped (wrapped)\n"));
        assert!(text.ends_with("time: colour=1.500ms\n"));
        assert!(!sample().render(false, false).contains("time:"));
    }

    #[test]
    fn failure_detection() {
        let mut r = sample();
        assert!(!r.any_failed());
        r.verdict("x", Verdict::Fail("bad".into()));
        assert!(r.any_failed());
    }
}
