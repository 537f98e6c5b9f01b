use laffaille::campaign::{run_suite, to_json_lines, CaseConfig, Status, Suite};
use laffaille::*;

#[test]
fn every_suite_passes_on_a_few_seeds() {
    let a = Ambient::standard(3, 2, 6).unwrap();
    let cfg = CaseConfig { d_max: 2, samples: 5 };
    for suite in Suite::ALL {
        let (rep, cases) = run_suite(&a, suite, &[1, 2, 3], cfg);
        assert!(rep.ok, "{suite}: {:?}", cases.iter().filter(|c| c.status != Status::Pass).collect::<Vec<_>>());
        assert!(cases.iter().all(|c| c.counterexample.is_none()));
    }
}

#[test]
fn json_lines_parse_and_end_with_summaries() {
    let a = Ambient::standard(5, 3, 6).unwrap();
    let (rep, cases) = run_suite(&a, Suite::Section, &[4, 5], CaseConfig::default());
    let text = to_json_lines(&[rep], &cases);
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["suite"], "section");
    assert_eq!(lines[1]["seed"], 5);
    assert_eq!(lines[2]["summary"]["passed"], 2);
}
