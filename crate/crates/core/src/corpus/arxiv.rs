//! Client for the arXiv Atom query API with an on-disk response cache.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use log::{debug, warn};
use quick_xml::events::Event;
use quick_xml::Reader;
use sha2::{Digest, Sha256};

use super::{normalize_text, Document, Source};
use crate::error::{Error, Result};

pub const ARXIV_ENDPOINT: &str = "http://export.arxiv.org/api/query";
pub const CACHE_DIR_ENV: &str = "FGF_CACHE_DIR";
const MAX_RESULTS_LIMIT: usize = 2000;

/// Something that can GET a URL and return the body.
pub trait Transport {
    fn get(&self, url: &str) -> Result<String>;
}

/// Blocking HTTP transport honoring the service's request spacing, with
/// bounded exponential retry.
pub struct HttpTransport {
    client: reqwest::blocking::Client,
    spacing: Duration,
    retries: u32,
    last_request: Mutex<Option<Instant>>,
}

impl Default for HttpTransport {
    fn default() -> Self {
        Self::new(Duration::from_secs(3), 3)
    }
}

impl HttpTransport {
    pub fn new(spacing: Duration, retries: u32) -> Self {
        Self {
            client: reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(60))
                .build()
                .expect("TLS backend available"),
            spacing,
            retries,
            last_request: Mutex::new(None),
        }
    }

    fn wait_turn(&self) {
        let mut last = self.last_request.lock().unwrap();
        if let Some(t) = *last {
            let elapsed = t.elapsed();
            if elapsed < self.spacing {
                thread::sleep(self.spacing - elapsed);
            }
        }
        *last = Some(Instant::now());
    }

    fn attempt(&self, url: &str) -> std::result::Result<String, String> {
        self.wait_turn();
        let resp = self.client.get(url).send().map_err(|e| e.to_string())?;
        let status = resp.status();
        if !status.is_success() {
            return Err(format!("HTTP {status}"));
        }
        resp.text().map_err(|e| e.to_string())
    }
}

impl Transport for HttpTransport {
    fn get(&self, url: &str) -> Result<String> {
        let mut errors = Vec::new();
        let mut backoff = Duration::from_secs(1);
        for attempt in 0..=self.retries {
            match self.attempt(url) {
                Ok(body) => return Ok(body),
                Err(e) => {
                    warn!(
                        "request {} of {} failed: {e}",
                        attempt + 1,
                        self.retries + 1
                    );
                    errors.push(e);
                    if attempt < self.retries {
                        thread::sleep(backoff);
                        backoff *= 2;
                    }
                }
            }
        }
        Err(Error::Transport(format!(
            "GET {url} failed after {} attempts: {}",
            errors.len(),
            errors.join("; ")
        )))
    }
}

/// Resolve the cache directory, letting `FGF_CACHE_DIR` override `default`.
pub fn cache_dir_from_env(default: impl Into<PathBuf>) -> PathBuf {
    std::env::var_os(CACHE_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| default.into())
}

/// An `OR` query over quoted keywords in all fields.
pub fn build_query<S: AsRef<str>>(keywords: &[S]) -> String {
    keywords
        .iter()
        .map(|k| format!("all:\"{}\"", k.as_ref().trim()))
        .collect::<Vec<_>>()
        .join(" OR ")
}

pub struct ArxivClient<T: Transport> {
    transport: T,
    cache_dir: PathBuf,
}

impl<T: Transport> ArxivClient<T> {
    pub fn new(transport: T, cache_dir: impl Into<PathBuf>) -> Self {
        Self {
            transport,
            cache_dir: cache_dir.into(),
        }
    }

    pub fn cache_dir(&self) -> &Path {
        &self.cache_dir
    }

    fn cache_path(&self, query: &str, max_results: usize) -> PathBuf {
        let key = format!(
            "{}\u{0}start=0\u{0}max_results={max_results}",
            normalize_text(query)
        );
        let digest = Sha256::digest(key.as_bytes());
        self.cache_dir.join(format!("{}.xml", hex::encode(digest)))
    }

    /// Query the API, serving repeated queries from the cache.
    pub fn fetch(&self, query: &str, max_results: usize) -> Result<Vec<Document>> {
        if !(1..=MAX_RESULTS_LIMIT).contains(&max_results) {
            return Err(Error::Config(format!(
                "max_results must be in [1, {MAX_RESULTS_LIMIT}], got {max_results}"
            )));
        }
        let path = self.cache_path(query, max_results);
        let body = if path.exists() {
            debug!("cache hit {}", path.display());
            fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?
        } else {
            let url = reqwest::Url::parse_with_params(
                ARXIV_ENDPOINT,
                &[
                    ("search_query", query.to_string()),
                    ("start", "0".to_string()),
                    ("max_results", max_results.to_string()),
                ],
            )
            .map_err(|e| Error::Config(e.to_string()))?;
            let body = self.transport.get(url.as_str())?;
            // parse before caching so a malformed response is never cached
            parse_feed(&body)?;
            fs::create_dir_all(&self.cache_dir).map_err(|e| Error::io(&self.cache_dir, e))?;
            fs::write(&path, &body).map_err(|e| Error::io(&path, e))?;
            body
        };
        let mut docs = parse_feed(&body)?;
        docs.truncate(max_results);
        Ok(docs)
    }
}

#[derive(Default)]
struct EntryBuilder {
    id: String,
    title: String,
    summary: String,
    pdf_url: String,
}

#[derive(Clone, Copy, PartialEq)]
enum Field {
    None,
    Id,
    Title,
    Summary,
}

fn collapse(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Parse an Atom feed into documents. Entries without a PDF link get an empty
/// `pdf_url`.
pub fn parse_feed(xml: &str) -> Result<Vec<Document>> {
    let mut reader = Reader::from_str(xml);
    let mut docs = Vec::new();
    let mut entry: Option<EntryBuilder> = None;
    let mut entry_no = 0usize;
    let mut field = Field::None;
    let where_ = |n: usize| {
        if n == 0 {
            "feed header".to_string()
        } else {
            format!("entry {n}")
        }
    };

    loop {
        let ev = reader
            .read_event()
            .map_err(|e| Error::parse("arXiv feed", None, format!("{}: {e}", where_(entry_no))))?;
        match ev {
            Event::Start(e) => match e.local_name().as_ref() {
                b"entry" => {
                    entry_no += 1;
                    entry = Some(EntryBuilder::default());
                }
                b"id" if entry.is_some() => field = Field::Id,
                b"title" if entry.is_some() => field = Field::Title,
                b"summary" if entry.is_some() => field = Field::Summary,
                b"link" => handle_link(&e, entry.as_mut(), entry_no)?,
                _ => {}
            },
            Event::Empty(e) => {
                if e.local_name().as_ref() == b"link" {
                    handle_link(&e, entry.as_mut(), entry_no)?;
                }
            }
            Event::Text(t) => {
                if let Some(b) = entry.as_mut() {
                    let text = t.unescape().map_err(|e| {
                        Error::parse("arXiv feed", None, format!("{}: {e}", where_(entry_no)))
                    })?;
                    push_text(b, field, &text);
                }
            }
            Event::CData(t) => {
                if let Some(b) = entry.as_mut() {
                    push_text(b, field, &String::from_utf8_lossy(&t));
                }
            }
            Event::End(e) => match e.local_name().as_ref() {
                b"entry" => {
                    let b = entry.take().expect("inside entry");
                    docs.push(finish_entry(b, entry_no)?);
                    field = Field::None;
                }
                b"id" | b"title" | b"summary" => field = Field::None,
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
    }
    if entry.is_some() {
        return Err(Error::parse(
            "arXiv feed",
            None,
            format!("entry {entry_no}: unterminated"),
        ));
    }
    Ok(docs)
}

fn push_text(b: &mut EntryBuilder, field: Field, text: &str) {
    match field {
        Field::Id => b.id.push_str(text),
        Field::Title => b.title.push_str(text),
        Field::Summary => b.summary.push_str(text),
        Field::None => {}
    }
}

fn handle_link(
    e: &quick_xml::events::BytesStart<'_>,
    entry: Option<&mut EntryBuilder>,
    entry_no: usize,
) -> Result<()> {
    let Some(b) = entry else { return Ok(()) };
    let mut href = None;
    let mut is_pdf = false;
    for attr in e.attributes() {
        let attr = attr
            .map_err(|err| Error::parse("arXiv feed", None, format!("entry {entry_no}: {err}")))?;
        let value = attr
            .unescape_value()
            .map_err(|err| Error::parse("arXiv feed", None, format!("entry {entry_no}: {err}")))?;
        match attr.key.as_ref() {
            b"href" => href = Some(value.into_owned()),
            b"title" if value == "pdf" => is_pdf = true,
            b"type" if value == "application/pdf" => is_pdf = true,
            _ => {}
        }
    }
    if is_pdf && b.pdf_url.is_empty() {
        if let Some(h) = href {
            b.pdf_url = h;
        }
    }
    Ok(())
}

fn finish_entry(b: EntryBuilder, entry_no: usize) -> Result<Document> {
    let raw_id = b.id.trim();
    if raw_id.is_empty() {
        return Err(Error::parse(
            "arXiv feed",
            None,
            format!("entry {entry_no}: missing <id>"),
        ));
    }
    let title = collapse(&b.title);
    if title.is_empty() {
        return Err(Error::parse(
            "arXiv feed",
            None,
            format!("entry {entry_no}: missing <title>"),
        ));
    }
    let id = raw_id
        .rsplit_once("/abs/")
        .map(|(_, tail)| tail)
        .unwrap_or(raw_id)
        .to_string();
    Ok(Document {
        id,
        title,
        abstract_text: collapse(&b.summary),
        pdf_url: b.pdf_url,
        source: Source::Arxiv,
        relevant: None,
    })
}
