//! Sequential TCP server that answers encryption queries.

use std::io::{self, BufReader, BufWriter};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Duration;

use log::{debug, info, warn};

use super::wire::{self, ErrorCode, FrameError};
use super::EncryptionMachine;
use crate::key::SecretKey;

const IDLE_TIMEOUT: Duration = Duration::from_secs(30);

/// Stops a running [`OracleServer`] from another thread.
#[derive(Clone)]
pub struct ShutdownHandle {
    flag: Arc<AtomicBool>,
    addr: SocketAddr,
}

impl ShutdownHandle {
    pub fn shutdown(&self) {
        self.flag.store(true, Ordering::SeqCst);
        // unblock accept()
        let _ = TcpStream::connect_timeout(&self.addr, Duration::from_secs(1));
    }
}

pub struct OracleServer {
    listener: TcpListener,
    machine: EncryptionMachine,
    queries: Arc<AtomicU64>,
    stop: Arc<AtomicBool>,
}

impl OracleServer {
    pub fn bind(addr: impl ToSocketAddrs, machine: EncryptionMachine) -> io::Result<Self> {
        Ok(Self {
            listener: TcpListener::bind(addr)?,
            machine,
            queries: Arc::new(AtomicU64::new(0)),
            stop: Arc::new(AtomicBool::new(false)),
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Shared counter of answered queries, readable while the server runs.
    pub fn query_counter(&self) -> Arc<AtomicU64> {
        Arc::clone(&self.queries)
    }

    pub fn shutdown_handle(&self) -> io::Result<ShutdownHandle> {
        Ok(ShutdownHandle {
            flag: Arc::clone(&self.stop),
            addr: self.local_addr()?,
        })
    }

    /// Accepts and serves connections one at a time until shut down.
    pub fn run(self) -> io::Result<()> {
        info!("oracle listening on {}", self.local_addr()?);
        for conn in self.listener.incoming() {
            if self.stop.load(Ordering::SeqCst) {
                break;
            }
            match conn {
                Ok(stream) => {
                    let peer = stream
                        .peer_addr()
                        .map(|a| a.to_string())
                        .unwrap_or_else(|_| "?".into());
                    debug!("connection from {peer}");
                    if let Err(e) = self.handle(stream) {
                        warn!("connection from {peer} ended: {e}");
                    }
                }
                Err(e) => warn!("accept failed: {e}"),
            }
        }
        info!(
            "oracle stopped after {} queries",
            self.queries.load(Ordering::SeqCst)
        );
        Ok(())
    }

    fn handle(&self, stream: TcpStream) -> io::Result<()> {
        stream.set_read_timeout(Some(IDLE_TIMEOUT))?;
        stream.set_nodelay(true)?;
        let mut reader = BufReader::new(stream.try_clone()?);
        let mut writer = BufWriter::new(stream);
        loop {
            let img = match wire::read_request(&mut reader) {
                Ok(Some(img)) => img,
                Ok(None) => return Ok(()),
                Err(FrameError::Io(e)) => return Err(e),
                Err(e) => {
                    let code = e.code().unwrap_or(ErrorCode::Truncated);
                    warn!("rejecting malformed request: {e}");
                    // the peer may already be gone
                    let _ = wire::write_frame(&mut writer, &wire::encode_error(code));
                    return Ok(());
                }
            };
            match self.machine.encrypt(&img) {
                Ok(out) => {
                    wire::write_frame(&mut writer, &wire::encode_response(&out))?;
                    let n = self.queries.fetch_add(1, Ordering::SeqCst) + 1;
                    info!("query {n}: {0}x{0} image", img.side());
                }
                Err(e) => {
                    warn!("query failed: {e}");
                    wire::write_frame(
                        &mut writer,
                        &wire::encode_error(ErrorCode::EncryptionFailed),
                    )?;
                    return Ok(());
                }
            }
        }
    }
}

/// Binds `addr` and serves encryptions under `key` until the process ends.
pub fn serve(key: SecretKey, addr: impl ToSocketAddrs) -> io::Result<()> {
    OracleServer::bind(addr, EncryptionMachine::Keyed(key))?.run()
}
