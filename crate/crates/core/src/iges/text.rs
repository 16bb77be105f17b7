//! Fixed-column IGES text layout: line framing, free-format parameter
//! tokenizing and real-number formatting.

use super::{DirectoryEntry, IgesDocument, IgesError, Param, ParameterRecord};

pub(crate) const LINE_WIDTH: usize = 80;
const DATA_WIDTH: usize = 72;
const P_DATA_WIDTH: usize = 64;

/// E-format with 17 significant digits and a signed two-digit exponent,
/// e.g. `-1.2500000000000000E-03`.
pub fn format_real(x: f64) -> String {
    let s = format!("{x:.16E}");
    let (mantissa, exp) = s.split_once('E').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}E{sign}{:02}", exp.abs())
}

fn hollerith(s: &str) -> String {
    format!("{}H{s}", s.chars().count())
}

fn param_text(p: &Param) -> String {
    match p {
        Param::Integer(i) => i.to_string(),
        Param::Real(x) => format_real(*x),
        Param::Text(s) => hollerith(s),
        Param::Empty => String::new(),
    }
}

/// Delimited tokens: every parameter followed by `pd`, the last by `rd`.
fn delimited(params: &[Param], pd: char, rd: char) -> Vec<String> {
    params
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut t = param_text(p);
            t.push(if i + 1 == params.len() { rd } else { pd });
            t
        })
        .collect()
}

/// Packs tokens into lines of at most `width` characters without splitting
/// a token unless it alone exceeds the width.
fn pack(tokens: &[String], width: usize) -> Vec<String> {
    let mut lines = Vec::new();
    let mut current = String::new();
    for token in tokens {
        if !current.is_empty() && current.len() + token.len() > width {
            lines.push(std::mem::take(&mut current));
        }
        if token.len() > width {
            let chars: Vec<char> = token.chars().collect();
            for chunk in chars.chunks(width) {
                if current.len() + chunk.len() > width {
                    lines.push(std::mem::take(&mut current));
                }
                current.extend(chunk);
            }
        } else {
            current.push_str(token);
        }
    }
    if !current.is_empty() {
        lines.push(current);
    }
    lines
}

fn framed(data: &str, section: char, seq: usize) -> String {
    format!("{data:<DATA_WIDTH$}{section}{seq:>7}")
}

fn field(value: i64) -> String {
    format!("{value:>8}")
}

fn text_field(value: &str) -> String {
    format!("{value:>8}")
}

/// Lays out P-section lines for one record and returns them.
fn parameter_lines(record: &ParameterRecord, pd: char, rd: char) -> Vec<String> {
    pack(&delimited(&record.params, pd, rd), P_DATA_WIDTH)
}

/// Renders a structured document as IGES text, recomputing D→P pointers,
/// P line counts, back-pointers and the terminate counts.
pub fn render(doc: &IgesDocument) -> String {
    let (pd, rd) = doc.delimiters();
    let mut out: Vec<String> = Vec::new();

    let start = if doc.start_lines.is_empty() {
        vec![String::new()]
    } else {
        doc.start_lines.clone()
    };
    for (i, s) in start.iter().enumerate() {
        let data: String = s.chars().take(DATA_WIDTH).collect();
        out.push(framed(&data, 'S', i + 1));
    }

    let global = pack(&delimited(&doc.global_params, pd, rd), DATA_WIDTH);
    for (i, g) in global.iter().enumerate() {
        out.push(framed(g, 'G', i + 1));
    }

    let p_blocks: Vec<Vec<String>> = doc
        .parameter_records
        .iter()
        .map(|r| parameter_lines(r, pd, rd))
        .collect();
    let mut p_start = 1;
    let mut d_lines = Vec::new();
    for (k, (entry, block)) in doc.directory_entries.iter().zip(&p_blocks).enumerate() {
        let d_seq = 2 * k + 1;
        let line1 = [
            field(entry.entity_type),
            field(p_start as i64),
            field(entry.structure),
            field(entry.line_font),
            field(entry.level),
            field(entry.view),
            field(entry.transform),
            field(entry.label_display),
            text_field(&entry.status),
        ]
        .concat();
        let line2 = [
            field(entry.entity_type),
            field(entry.line_weight),
            field(entry.color),
            field(block.len() as i64),
            field(entry.form),
            text_field(""),
            text_field(""),
            text_field(&entry.label),
            field(entry.subscript),
        ]
        .concat();
        d_lines.push(framed(&line1, 'D', d_seq));
        d_lines.push(framed(&line2, 'D', d_seq + 1));
        p_start += block.len();
    }
    out.extend(d_lines);

    let mut p_seq = 1;
    for (k, block) in p_blocks.iter().enumerate() {
        let d_seq = 2 * k + 1;
        for line in block {
            let data = format!("{line:<P_DATA_WIDTH$} {d_seq:>7}");
            out.push(framed(&data, 'P', p_seq));
            p_seq += 1;
        }
    }

    let counts = format!(
        "S{:07}G{:07}D{:07}P{:07}",
        start.len(),
        global.len(),
        2 * doc.directory_entries.len(),
        p_seq - 1
    );
    out.push(framed(&counts, 'T', 1));

    let mut text = out.join("\n");
    text.push('\n');
    text
}

struct Line<'a> {
    number: usize,
    data: &'a str,
    section: char,
}

fn parse_err(line: usize, message: impl Into<String>) -> IgesError {
    IgesError::Parse {
        line,
        message: message.into(),
    }
}

/// Splits text into validated 80-column lines.
fn frame_lines(text: &str) -> Result<Vec<Line<'_>>, IgesError> {
    let mut lines = Vec::new();
    let mut expected_seq = [0usize; 5];
    let mut last_section = 0;
    let raw: Vec<&str> = text.split('\n').collect();
    let count = if raw.last() == Some(&"") { raw.len() - 1 } else { raw.len() };
    for (idx, raw_line) in raw.iter().take(count).enumerate() {
        let number = idx + 1;
        let line = raw_line.strip_suffix('\r').unwrap_or(raw_line);
        if !line.is_ascii() {
            return Err(parse_err(number, "non-ASCII characters in fixed-column file"));
        }
        if line.len() < LINE_WIDTH {
            return Err(parse_err(
                number,
                format!("line has {} columns, expected 80 (truncated?)", line.len()),
            ));
        }
        if !line[LINE_WIDTH..].trim().is_empty() {
            return Err(parse_err(number, "data beyond column 80"));
        }
        let section = line.as_bytes()[72] as char;
        let order = match section {
            'S' => 0,
            'G' => 1,
            'D' => 2,
            'P' => 3,
            'T' => 4,
            'B' | 'C' | 'F' => {
                return Err(parse_err(number, "binary and compressed IGES are not supported"))
            }
            other => {
                return Err(parse_err(
                    number,
                    format!("invalid section letter '{other}' in column 73"),
                ))
            }
        };
        if order < last_section {
            return Err(parse_err(number, format!("section '{section}' out of order")));
        }
        last_section = order;
        let seq: usize = line[73..80]
            .trim()
            .parse()
            .map_err(|_| parse_err(number, "invalid sequence number in columns 74-80"))?;
        expected_seq[order] += 1;
        if seq != expected_seq[order] {
            return Err(parse_err(
                number,
                format!("sequence number {seq}, expected {}", expected_seq[order]),
            ));
        }
        lines.push(Line {
            number,
            data: &line[..72],
            section,
        });
    }
    Ok(lines)
}

/// Splits free-format parameter data into parameters, stopping at the
/// record delimiter.
fn tokenize(data: &str, pd: char, rd: char, line: usize) -> Result<Vec<Param>, IgesError> {
    let chars: Vec<char> = data.chars().collect();
    let mut params = Vec::new();
    let mut i = 0;
    loop {
        while i < chars.len() && chars[i] == ' ' {
            i += 1;
        }
        if i >= chars.len() {
            return Err(parse_err(line, "parameter data ends without record delimiter"));
        }
        // Hollerith string: digits, 'H', then exactly that many characters
        let digits_end = (i..chars.len()).find(|&k| !chars[k].is_ascii_digit()).unwrap_or(chars.len());
        let (param, next) = if digits_end > i && digits_end < chars.len() && chars[digits_end] == 'H' {
            let n: usize = chars[i..digits_end].iter().collect::<String>().parse().unwrap_or(0);
            let body_start = digits_end + 1;
            let body_end = body_start + n;
            if body_end > chars.len() {
                return Err(parse_err(line, "Hollerith string runs past the end of data"));
            }
            (
                Param::Text(chars[body_start..body_end].iter().collect()),
                body_end,
            )
        } else {
            let end = (i..chars.len())
                .find(|&k| chars[k] == pd || chars[k] == rd)
                .unwrap_or(chars.len());
            let raw: String = chars[i..end].iter().collect();
            (parse_scalar(raw.trim(), line)?, end)
        };
        let mut k = next;
        while k < chars.len() && chars[k] == ' ' {
            k += 1;
        }
        if k >= chars.len() {
            return Err(parse_err(line, "parameter data ends without record delimiter"));
        }
        params.push(param);
        if chars[k] == rd {
            return Ok(params);
        }
        if chars[k] != pd {
            return Err(parse_err(line, format!("expected delimiter, found '{}'", chars[k])));
        }
        i = k + 1;
    }
}

fn parse_scalar(raw: &str, line: usize) -> Result<Param, IgesError> {
    if raw.is_empty() {
        return Ok(Param::Empty);
    }
    if let Ok(i) = raw.parse::<i64>() {
        return Ok(Param::Integer(i));
    }
    let normalized = raw.replace(['D', 'd'], "E");
    normalized
        .parse::<f64>()
        .map(Param::Real)
        .map_err(|_| parse_err(line, format!("invalid parameter value '{raw}'")))
}

/// Reads the parameter and record delimiters declared at the start of the
/// global section (`1H,` and `1H;` unless overridden).
fn global_delimiters(data: &str) -> (char, char) {
    let chars: Vec<char> = data.chars().collect();
    let mut pd = ',';
    let mut rd = ';';
    let mut i = 0;
    if chars.len() >= 3 && chars[0] == '1' && chars[1] == 'H' {
        pd = chars[2];
        i = 3;
    }
    // skip the delimiter after parameter 1
    if i < chars.len() && chars[i] == pd {
        i += 1;
    }
    if chars.len() >= i + 3 && chars[i] == '1' && chars[i + 1] == 'H' {
        rd = chars[i + 2];
    }
    (pd, rd)
}

fn int_field(s: &str, line: usize) -> Result<i64, IgesError> {
    let t = s.trim();
    if t.is_empty() {
        return Ok(0);
    }
    t.parse()
        .map_err(|_| parse_err(line, format!("invalid directory field '{t}'")))
}

/// Parses IGES text into its structured sections, checking line framing,
/// section order, sequence numbers, D/P pointers and terminate counts.
pub fn parse(text: &str) -> Result<IgesDocument, IgesError> {
    let lines = frame_lines(text)?;
    let last_line = lines.last().map_or(1, |l| l.number);
    let of = |c: char| lines.iter().filter(move |l| l.section == c);

    let start_lines: Vec<String> = of('S').map(|l| l.data.trim_end().to_string()).collect();
    let g_lines: Vec<&Line> = of('G').collect();
    let d_lines: Vec<&Line> = of('D').collect();
    let p_lines: Vec<&Line> = of('P').collect();
    let t_lines: Vec<&Line> = of('T').collect();

    let t = match t_lines.as_slice() {
        [t] => t,
        [] => return Err(parse_err(last_line, "missing terminate section")),
        [_, extra, ..] => return Err(parse_err(extra.number, "more than one terminate line")),
    };
    let counts: Vec<usize> = [(0, 'S'), (8, 'G'), (16, 'D'), (24, 'P')]
        .iter()
        .map(|&(at, letter)| {
            let field = &t.data[at..at + 8];
            if !field.starts_with(letter) {
                return Err(parse_err(t.number, format!("terminate field for '{letter}' missing")));
            }
            field[1..]
                .trim()
                .parse()
                .map_err(|_| parse_err(t.number, format!("invalid '{letter}' count")))
        })
        .collect::<Result<_, _>>()?;
    let actual = [start_lines.len(), g_lines.len(), d_lines.len(), p_lines.len()];
    for ((letter, want), got) in ['S', 'G', 'D', 'P'].iter().zip(&counts).zip(actual) {
        if *want != got {
            return Err(parse_err(
                t.number,
                format!("terminate line records {want} '{letter}' lines, file has {got}"),
            ));
        }
    }

    let global_data: String = g_lines.iter().map(|l| l.data).collect();
    let g_line = g_lines.first().map_or(last_line, |l| l.number);
    let (pd, rd) = global_delimiters(&global_data);
    let global_params = if global_data.trim().is_empty() {
        Vec::new()
    } else {
        tokenize(&global_data, pd, rd, g_line)?
    };

    if !d_lines.len().is_multiple_of(2) {
        let line = d_lines.last().map_or(last_line, |l| l.number);
        return Err(parse_err(line, "directory section has an odd number of lines"));
    }

    let mut directory_entries = Vec::new();
    let mut parameter_records = Vec::new();
    for (k, pair) in d_lines.chunks(2).enumerate() {
        let (l1, l2) = (pair[0], pair[1]);
        let f1 = |i: usize| &l1.data[8 * i..8 * i + 8];
        let f2 = |i: usize| &l2.data[8 * i..8 * i + 8];
        let entity_type = int_field(f1(0), l1.number)?;
        if int_field(f2(0), l2.number)? != entity_type {
            return Err(parse_err(l2.number, "directory entry lines disagree on entity type"));
        }
        let pointer = int_field(f1(1), l1.number)?;
        let count = int_field(f2(3), l2.number)?;
        let d_seq = 2 * k + 1;
        if pointer < 1 || count < 1 || (pointer + count - 1) as usize > p_lines.len() {
            return Err(parse_err(
                l1.number,
                format!("parameter pointer {pointer} (+{count} lines) outside P section"),
            ));
        }
        let block = &p_lines[pointer as usize - 1..(pointer + count - 1) as usize];
        for pl in block {
            let back: usize = pl.data[65..72]
                .trim()
                .parse()
                .map_err(|_| parse_err(pl.number, "invalid D back-pointer in columns 66-72"))?;
            if back != d_seq {
                return Err(parse_err(
                    pl.number,
                    format!("P line points to D{back}, expected D{d_seq}"),
                ));
            }
        }
        let data: String = block.iter().map(|l| &l.data[..64]).collect();
        let params = tokenize(&data, pd, rd, block[0].number)?;
        match params.first() {
            Some(Param::Integer(t)) if *t == entity_type => {}
            _ => {
                return Err(parse_err(
                    block[0].number,
                    format!("parameter record does not start with entity type {entity_type}"),
                ))
            }
        }
        directory_entries.push(DirectoryEntry {
            entity_type,
            structure: int_field(f1(2), l1.number)?,
            line_font: int_field(f1(3), l1.number)?,
            level: int_field(f1(4), l1.number)?,
            view: int_field(f1(5), l1.number)?,
            transform: int_field(f1(6), l1.number)?,
            label_display: int_field(f1(7), l1.number)?,
            status: f1(8).trim().to_string(),
            line_weight: int_field(f2(1), l2.number)?,
            color: int_field(f2(2), l2.number)?,
            form: int_field(f2(4), l2.number)?,
            label: f2(7).trim().to_string(),
            subscript: int_field(f2(8), l2.number)?,
        });
        parameter_records.push(ParameterRecord { params });
    }

    Ok(IgesDocument {
        start_lines,
        global_params,
        directory_entries,
        parameter_records,
    })
}
