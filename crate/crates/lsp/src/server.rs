use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{anyhow, Result};
use crossbeam_channel::RecvTimeoutError;
use lsp_server::{Connection, ErrorCode, Message, Notification, Request, RequestId, Response};
use lsp_types as lsp;
use lsp_types::notification::Notification as _;
use lsp_types::request::Request as _;
use serde_json::Value;

use ezasp_core::config::generate_default_config;
use ezasp_core::methodology::check_ordering;
use ezasp_core::reorder::reorder_program;
use ezasp_core::{Analysis, Code, Config, Workspace};

use crate::convert::{self, Encoding};

pub const COMMAND_REORDER: &str = "ezasp.reorder";
pub const COMMAND_INIT_CONFIG: &str = "ezasp.initConfig";
pub const REORDER_TITLE: &str = "Reorder program (Easy ASP)";
/// Quiet period after the last change before a document is re-analyzed.
pub const DEBOUNCE: Duration = Duration::from_millis(200);

struct Document {
    version: i32,
    text: String,
    path: PathBuf,
    /// Where `ezasp.json` is looked up; none for unsaved documents.
    directory: Option<PathBuf>,
    /// Pending re-analysis deadline.
    due: Option<Instant>,
    analysis: Option<Analysis>,
    config: Config,
}

struct Server {
    connection: Connection,
    encoding: Encoding,
    root: Option<PathBuf>,
    documents: HashMap<lsp::Url, Document>,
    next_request: i32,
}

/// Serves one session over `connection` until the client shuts down.
pub fn run(connection: Connection) -> Result<()> {
    let (id, params) = connection.initialize_start()?;
    let params: lsp::InitializeParams = serde_json::from_value(params)?;
    let encoding = Encoding::negotiate(&params.capabilities);
    let result = lsp::InitializeResult {
        capabilities: capabilities(encoding),
        server_info: Some(lsp::ServerInfo {
            name: "ezasp-lsp".to_string(),
            version: Some(env!("CARGO_PKG_VERSION").to_string()),
        }),
    };
    connection.initialize_finish(id, serde_json::to_value(result)?)?;

    #[allow(deprecated)]
    let root = params
        .workspace_folders
        .as_ref()
        .and_then(|f| f.first())
        .map(|f| f.uri.clone())
        .or(params.root_uri)
        .and_then(|u| u.to_file_path().ok());

    let mut server = Server {
        connection,
        encoding,
        root,
        documents: HashMap::new(),
        next_request: 0,
    };
    server.main_loop()
}

fn capabilities(encoding: Encoding) -> lsp::ServerCapabilities {
    lsp::ServerCapabilities {
        position_encoding: Some(encoding.kind()),
        text_document_sync: Some(lsp::TextDocumentSyncCapability::Kind(
            lsp::TextDocumentSyncKind::FULL,
        )),
        code_action_provider: Some(lsp::CodeActionProviderCapability::Options(
            lsp::CodeActionOptions {
                code_action_kinds: Some(vec![lsp::CodeActionKind::REFACTOR_REWRITE]),
                ..Default::default()
            },
        )),
        execute_command_provider: Some(lsp::ExecuteCommandOptions {
            commands: vec![COMMAND_REORDER.to_string(), COMMAND_INIT_CONFIG.to_string()],
            ..Default::default()
        }),
        ..Default::default()
    }
}

impl Server {
    fn main_loop(&mut self) -> Result<()> {
        loop {
            let next_due = self.documents.values().filter_map(|d| d.due).min();
            let received = match next_due {
                Some(deadline) => self.connection.receiver.recv_deadline(deadline),
                None => self
                    .connection
                    .receiver
                    .recv()
                    .map_err(|_| RecvTimeoutError::Disconnected),
            };
            let message = match received {
                Ok(m) => m,
                Err(RecvTimeoutError::Timeout) => {
                    self.flush_due(Instant::now())?;
                    continue;
                }
                Err(RecvTimeoutError::Disconnected) => return Ok(()),
            };
            match message {
                Message::Request(req) => {
                    if self.connection.handle_shutdown(&req)? {
                        return Ok(());
                    }
                    self.handle_request(req)?;
                }
                Message::Notification(note) => {
                    let method = note.method.clone();
                    if let Err(e) = self.handle_notification(note) {
                        log::error!("{method}: {e:#}");
                    }
                }
                Message::Response(resp) => {
                    if let Some(err) = resp.error {
                        log::warn!("client rejected request {}: {}", resp.id, err.message);
                    }
                }
            }
        }
    }

    fn handle_notification(&mut self, note: Notification) -> Result<()> {
        use lsp::notification::{DidChangeTextDocument, DidCloseTextDocument, DidOpenTextDocument};
        match note.method.as_str() {
            DidOpenTextDocument::METHOD => {
                let p: lsp::DidOpenTextDocumentParams = serde_json::from_value(note.params)?;
                let doc = p.text_document;
                let file = doc.uri.to_file_path().ok();
                let directory = file
                    .as_deref()
                    .and_then(Path::parent)
                    .map(Path::to_path_buf);
                let path = file.unwrap_or_else(|| PathBuf::from(doc.uri.path()));
                self.documents.insert(
                    doc.uri.clone(),
                    Document {
                        version: doc.version,
                        text: doc.text,
                        path,
                        directory,
                        due: None,
                        analysis: None,
                        config: Config::default(),
                    },
                );
                self.analyze_and_publish(&doc.uri)?;
            }
            DidChangeTextDocument::METHOD => {
                let p: lsp::DidChangeTextDocumentParams = serde_json::from_value(note.params)?;
                let Some(doc) = self.documents.get_mut(&p.text_document.uri) else {
                    log::warn!("change for unknown document {}", p.text_document.uri);
                    return Ok(());
                };
                if p.text_document.version < doc.version {
                    log::warn!("ignoring stale change for {}", p.text_document.uri);
                    return Ok(());
                }
                // full sync: the last change carries the whole text
                if let Some(change) = p.content_changes.into_iter().last() {
                    doc.text = change.text;
                }
                doc.version = p.text_document.version;
                doc.due = Some(Instant::now() + DEBOUNCE);
            }
            DidCloseTextDocument::METHOD => {
                let p: lsp::DidCloseTextDocumentParams = serde_json::from_value(note.params)?;
                if self.documents.remove(&p.text_document.uri).is_some() {
                    self.publish(p.text_document.uri, Vec::new(), None)?;
                }
            }
            _ => log::debug!("ignoring notification {}", note.method),
        }
        Ok(())
    }

    fn handle_request(&mut self, req: Request) -> Result<()> {
        use lsp::request::{CodeActionRequest, ExecuteCommand};
        let id = req.id.clone();
        let response = match req.method.as_str() {
            CodeActionRequest::METHOD => {
                let actions = serde_json::from_value::<lsp::CodeActionParams>(req.params)
                    .map_err(anyhow::Error::from)
                    .and_then(|p| self.code_actions(&p.text_document.uri));
                match actions {
                    Ok(actions) => Response::new_ok(id, actions),
                    Err(e) => Response::new_err(id, ErrorCode::InvalidParams as i32, e.to_string()),
                }
            }
            ExecuteCommand::METHOD => {
                let result = serde_json::from_value::<lsp::ExecuteCommandParams>(req.params)
                    .map_err(anyhow::Error::from)
                    .and_then(|p| self.execute_command(&p));
                match result {
                    Ok(value) => Response::new_ok(id, value),
                    Err(e) => Response::new_err(id, ErrorCode::RequestFailed as i32, e.to_string()),
                }
            }
            _ => Response::new_err(
                id,
                ErrorCode::MethodNotFound as i32,
                format!("unsupported request {}", req.method),
            ),
        };
        self.connection.sender.send(Message::Response(response))?;
        Ok(())
    }

    /// Analyzes every document whose debounce deadline has passed.
    fn flush_due(&mut self, now: Instant) -> Result<()> {
        let due: Vec<lsp::Url> = self
            .documents
            .iter()
            .filter(|(_, d)| d.due.is_some_and(|t| t <= now))
            .map(|(u, _)| u.clone())
            .collect();
        for uri in due {
            self.analyze_and_publish(&uri)?;
        }
        Ok(())
    }

    /// Brings a document's analysis up to date with its text.
    fn ensure_current(&mut self, uri: &lsp::Url) -> Result<()> {
        let stale = self
            .documents
            .get(uri)
            .is_some_and(|d| d.due.is_some() || d.analysis.is_none());
        if stale {
            self.analyze_and_publish(uri)?;
        }
        Ok(())
    }

    fn analyze_and_publish(&mut self, uri: &lsp::Url) -> Result<()> {
        let encoding = self.encoding;
        let Some(doc) = self.documents.get_mut(uri) else {
            return Ok(());
        };
        doc.due = None;
        let directory = doc.directory.clone();
        let run = catch_unwind(AssertUnwindSafe(|| {
            let mut workspace = match &directory {
                Some(dir) => Workspace::load(dir),
                None => Workspace {
                    directory: PathBuf::from("."),
                    config: Config::default(),
                    issues: Vec::new(),
                },
            };
            let analysis = workspace.analyze(&doc.text, &doc.path);
            (analysis, workspace)
        }));
        let diagnostics = match run {
            Ok((analysis, workspace)) => {
                for issue in &workspace.issues {
                    log::warn!("{issue}");
                }
                let list = analysis
                    .diagnostics
                    .iter()
                    .map(|d| convert::diagnostic(&doc.text, d, encoding))
                    .collect();
                doc.analysis = Some(analysis);
                doc.config = workspace.config;
                list
            }
            Err(_) => {
                log::error!("analysis of {uri} failed");
                doc.analysis = None;
                Vec::new()
            }
        };
        let version = doc.version;
        self.publish(uri.clone(), diagnostics, Some(version))
    }

    fn publish(
        &self,
        uri: lsp::Url,
        diagnostics: Vec<lsp::Diagnostic>,
        version: Option<i32>,
    ) -> Result<()> {
        let params = lsp::PublishDiagnosticsParams {
            uri,
            diagnostics,
            version,
        };
        self.connection
            .sender
            .send(Message::Notification(Notification::new(
                lsp::notification::PublishDiagnostics::METHOD.to_string(),
                params,
            )))?;
        Ok(())
    }

    /// The reorder edit, if the gate allows it: the program parses, the
    /// configuration enables reordering and at least one construct is out
    /// of order.
    fn reorder_edit(&mut self, uri: &lsp::Url) -> Result<Option<lsp::WorkspaceEdit>> {
        self.ensure_current(uri)?;
        let Some(doc) = self.documents.get(uri) else {
            return Ok(None);
        };
        let Some(analysis) = &doc.analysis else {
            return Ok(None);
        };
        if !doc.config.auto_reorder_enabled || check_ordering(&analysis.program).is_empty() {
            return Ok(None);
        }
        let Ok(outcome) = reorder_program(&analysis.program) else {
            return Ok(None);
        };
        let edit = lsp::TextEdit::new(convert::full_range(&doc.text, self.encoding), outcome.text);
        Ok(Some(lsp::WorkspaceEdit {
            changes: Some(HashMap::from([(uri.clone(), vec![edit])])),
            ..Default::default()
        }))
    }

    fn code_actions(&mut self, uri: &lsp::Url) -> Result<Vec<lsp::CodeActionOrCommand>> {
        let Some(edit) = self.reorder_edit(uri)? else {
            return Ok(Vec::new());
        };
        let doc = &self.documents[uri];
        let diagnostics = doc
            .analysis
            .iter()
            .flat_map(|a| &a.diagnostics)
            .filter(|d| d.code == Code::Order)
            .map(|d| convert::diagnostic(&doc.text, d, self.encoding))
            .collect();
        Ok(vec![lsp::CodeActionOrCommand::CodeAction(
            lsp::CodeAction {
                title: REORDER_TITLE.to_string(),
                kind: Some(lsp::CodeActionKind::REFACTOR_REWRITE),
                diagnostics: Some(diagnostics),
                edit: Some(edit),
                ..Default::default()
            },
        )])
    }

    fn execute_command(&mut self, params: &lsp::ExecuteCommandParams) -> Result<Value> {
        let uri_arg = params
            .arguments
            .first()
            .and_then(Value::as_str)
            .map(lsp::Url::parse)
            .transpose()?;
        match params.command.as_str() {
            COMMAND_REORDER => {
                let uri =
                    uri_arg.ok_or_else(|| anyhow!("{COMMAND_REORDER} expects a document uri"))?;
                if !self.documents.contains_key(&uri) {
                    return Err(anyhow!("{uri} is not open"));
                }
                let Some(edit) = self.reorder_edit(&uri)? else {
                    return Err(anyhow!("the program cannot be reordered: it has syntax errors, is already in order, or reordering is disabled"));
                };
                let id = RequestId::from(format!("ezasp-{}", self.next_request));
                self.next_request += 1;
                let params = lsp::ApplyWorkspaceEditParams {
                    label: Some(REORDER_TITLE.to_string()),
                    edit,
                };
                self.connection.sender.send(Message::Request(Request::new(
                    id,
                    lsp::request::ApplyWorkspaceEdit::METHOD.to_string(),
                    params,
                )))?;
                Ok(Value::Null)
            }
            COMMAND_INIT_CONFIG => {
                let directory = match uri_arg {
                    Some(uri) => {
                        let path = uri
                            .to_file_path()
                            .map_err(|_| anyhow!("{uri} is not a file uri"))?;
                        if path.is_dir() {
                            path
                        } else {
                            path.parent().map(Path::to_path_buf).unwrap_or(path)
                        }
                    }
                    None => self
                        .root
                        .clone()
                        .ok_or_else(|| anyhow!("no workspace folder to hold the configuration"))?,
                };
                let path = generate_default_config(&directory)?;
                let uris: Vec<lsp::Url> = self.documents.keys().cloned().collect();
                for uri in uris {
                    self.analyze_and_publish(&uri)?;
                }
                Ok(Value::String(path.display().to_string()))
            }
            other => Err(anyhow!("unknown command {other}")),
        }
    }
}
