use anyhow::Result;
use lsp_server::Connection;

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let (connection, io_threads) = Connection::stdio();
    ezasp_lsp::run(connection)?;
    io_threads.join()?;
    Ok(())
}
