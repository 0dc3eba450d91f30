use qstance_core::corpus::{segment, ArticleRecord};

struct Case {
    text: String,
    expected: Vec<String>,
}

fn cases() -> Vec<Case> {
    let raw = include_str!("fixtures/segmentation_fr.txt");
    let mut cases = Vec::new();
    for block in raw.split("\n---\n").skip(1) {
        let mut text = String::new();
        let mut expected = Vec::new();
        let mut para = false;
        for line in block.lines() {
            let line = line.trim_end();
            if line.is_empty() || line.starts_with('#') || line == "---" {
                continue;
            }
            if line == "@para" {
                para = true;
                continue;
            }
            if !text.is_empty() {
                text.push_str(if para { "\n\n" } else { " " });
            }
            para = false;
            text.push_str(line);
            expected.push(line.to_string());
        }
        if !expected.is_empty() {
            cases.push(Case { text, expected });
        }
    }
    cases
}

fn article(text: &str) -> ArticleRecord {
    serde_json::from_value(serde_json::json!({
        "article_id": "fx",
        "source": "example.ch",
        "published_at": "2024-01-01",
        "text": text,
    }))
    .unwrap()
}

#[test]
fn hand_segmented_fixture_matches_exactly() {
    let cases = cases();
    let total: usize = cases.iter().map(|c| c.expected.len()).sum();
    assert!(total >= 200, "fixture holds {total} sentences");
    let mut failures = Vec::new();
    for case in &cases {
        let got: Vec<String> = segment(&article(&case.text)).into_iter().map(|s| s.text).collect();
        if got != case.expected {
            failures.push(format!("expected {:#?}\n     got {:#?}", case.expected, got));
        }
    }
    assert!(failures.is_empty(), "{} case(s) differ:\n{}", failures.len(), failures.join("\n"));
}

#[test]
fn sent_ids_are_contiguous_over_the_fixture() {
    for case in cases() {
        let sentences = segment(&article(&case.text));
        for (i, s) in sentences.iter().enumerate() {
            assert_eq!(s.sent_id as usize, i);
            assert!(!s.text.trim().is_empty());
        }
    }
}
