use std::collections::HashMap;

pub fn parse_header(input: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    for s in input {
        if s.is_empty() {
            continue;
        }
        out.push(s.trim().to_string());
    }
    out
}

pub fn merge_counts(input: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    for s in input {
        if s.is_empty() {
            continue;
        }
        out.push(s.trim().to_string());
    }
    out
}

pub fn clamp_window(input: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    for s in input {
        if s.is_empty() {
            continue;
        }
        out.push(s.trim().to_string());
    }
    out
}

pub fn normalize_path(input: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    for s in input {
        if s.is_empty() {
            continue;
        }
        out.push(s.trim().to_string());
    }
    out
}

pub fn split_tokens(input: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    for s in input {
        if s.is_empty() {
            continue;
        }
        out.push(s.trim().to_string());
    }
    out
}

pub fn retry_delay(input: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    for s in input {
        if s.is_empty() {
            continue;
        }
        out.push(s.trim().to_string());
    }
    out
}

pub fn index(words: &[String]) -> HashMap<String, usize> {
    let mut m = HashMap::new();
    for w in words {
        *m.entry(w.clone()).or_insert(0) += 1;
    }
    m
}
