//! Duplex links carrying wire lines between the two endpoints.

use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::mpsc::{channel, Receiver, Sender};
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};

use super::wire::WireMessage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn tag(self) -> char {
        match self {
            Party::Alice => 'A',
            Party::Bob => 'B',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TransportKind {
    #[default]
    Memory,
    Socket,
}

impl std::str::FromStr for TransportKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "memory" => Ok(TransportKind::Memory),
            "socket" => Ok(TransportKind::Socket),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

pub trait Link: Send {
    fn send_line(&mut self, line: &str) -> Result<()>;
    fn recv_line(&mut self) -> Result<String>;

    fn send(&mut self, msg: &WireMessage) -> Result<()> {
        self.send_line(&msg.encode())
    }

    fn recv(&mut self) -> Result<WireMessage> {
        WireMessage::decode(&self.recv_line()?)
    }
}

impl<L: Link + ?Sized> Link for Box<L> {
    fn send_line(&mut self, line: &str) -> Result<()> {
        (**self).send_line(line)
    }

    fn recv_line(&mut self) -> Result<String> {
        (**self).recv_line()
    }
}

pub struct MemoryLink {
    tx: Sender<String>,
    rx: Receiver<String>,
}

pub fn memory_pair() -> (MemoryLink, MemoryLink) {
    let (tx_a, rx_b) = channel();
    let (tx_b, rx_a) = channel();
    (
        MemoryLink { tx: tx_a, rx: rx_a },
        MemoryLink { tx: tx_b, rx: rx_b },
    )
}

impl Link for MemoryLink {
    fn send_line(&mut self, line: &str) -> Result<()> {
        self.tx
            .send(line.to_string())
            .map_err(|_| Error::Transport("peer hung up".into()))
    }

    fn recv_line(&mut self) -> Result<String> {
        self.rx
            .recv()
            .map_err(|_| Error::Transport("peer hung up".into()))
    }
}

/// Newline-delimited lines over a localhost TCP connection.
pub struct SocketLink {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
}

impl SocketLink {
    fn new(stream: TcpStream) -> Result<Self> {
        stream.set_nodelay(true)?;
        Ok(SocketLink {
            reader: BufReader::new(stream.try_clone()?),
            writer: stream,
        })
    }
}

pub fn socket_pair() -> Result<(SocketLink, SocketLink)> {
    let listener = TcpListener::bind("127.0.0.1:0")?;
    let client = TcpStream::connect(listener.local_addr()?)?;
    let (server, _) = listener.accept()?;
    Ok((SocketLink::new(server)?, SocketLink::new(client)?))
}

impl Link for SocketLink {
    fn send_line(&mut self, line: &str) -> Result<()> {
        self.writer.write_all(line.as_bytes())?;
        self.writer.write_all(b"\n")?;
        self.writer.flush()?;
        Ok(())
    }

    fn recv_line(&mut self) -> Result<String> {
        let mut s = String::new();
        if self.reader.read_line(&mut s)? == 0 {
            return Err(Error::Transport("connection closed".into()));
        }
        if s.ends_with('\n') {
            s.pop();
        }
        Ok(s)
    }
}

pub type LinkPair = (Box<dyn Link>, Box<dyn Link>);

pub fn link_pair(kind: TransportKind) -> Result<LinkPair> {
    Ok(match kind {
        TransportKind::Memory => {
            let (a, b) = memory_pair();
            (Box::new(a), Box::new(b))
        }
        TransportKind::Socket => {
            let (a, b) = socket_pair()?;
            (Box::new(a), Box::new(b))
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoggedMessage {
    pub from: Party,
    pub message: WireMessage,
}

pub type MessageLog = Arc<Mutex<Vec<LoggedMessage>>>;

/// Records every outgoing message in the shared log before sending it.
pub struct Tap<L> {
    inner: L,
    party: Party,
    log: MessageLog,
}

impl<L: Link> Tap<L> {
    pub fn new(inner: L, party: Party, log: MessageLog) -> Self {
        Tap { inner, party, log }
    }

    pub fn send(&mut self, msg: WireMessage) -> Result<()> {
        let line = msg.encode();
        self.log.lock().expect("log lock").push(LoggedMessage {
            from: self.party,
            message: msg,
        });
        self.inner.send_line(&line)
    }

    pub fn recv(&mut self) -> Result<WireMessage> {
        self.inner.recv()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exchange(mut a: Box<dyn Link>, mut b: Box<dyn Link>) {
        let m = WireMessage::Announce {
            round: 4,
            bit: true,
        };
        a.send(&m).unwrap();
        assert_eq!(b.recv().unwrap(), m);
        b.send(&WireMessage::Done { ok: true }).unwrap();
        assert_eq!(a.recv().unwrap(), WireMessage::Done { ok: true });
    }

    #[test]
    fn memory_link() {
        let (a, b) = link_pair(TransportKind::Memory).unwrap();
        exchange(a, b);
    }

    #[test]
    fn socket_link() {
        let (a, b) = link_pair(TransportKind::Socket).unwrap();
        exchange(a, b);
    }

    #[test]
    fn hang_up_is_an_error() {
        let (mut a, b) = memory_pair();
        drop(b);
        assert!(a.recv_line().is_err());
    }

    #[test]
    fn tap_logs_in_order() {
        let log = MessageLog::default();
        let (a, b) = memory_pair();
        let mut a = Tap::new(a, Party::Alice, log.clone());
        let mut b = Tap::new(b, Party::Bob, log.clone());
        a.send(WireMessage::Done { ok: true }).unwrap();
        b.recv().unwrap();
        b.send(WireMessage::Done { ok: false }).unwrap();
        let l = log.lock().unwrap();
        assert_eq!(l.len(), 2);
        assert_eq!(l[0].from, Party::Alice);
        assert_eq!(l[1].from, Party::Bob);
    }
}
