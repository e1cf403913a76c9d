#include "edgeflow/util/frame.hpp"

#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace edgeflow::util {

namespace {

void put_u32(std::uint8_t* p, std::uint32_t v) {
  p[0] = static_cast<std::uint8_t>(v >> 24);
  p[1] = static_cast<std::uint8_t>(v >> 16);
  p[2] = static_cast<std::uint8_t>(v >> 8);
  p[3] = static_cast<std::uint8_t>(v);
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

[[noreturn]] void sys_fail(const std::string& what) {
  throw NetError(what + ": " + std::strerror(errno));
}

// Reads exactly len bytes; returns false on EOF at a frame boundary
// (allow_eof), throws on mid-frame EOF.
bool read_exact(Stream& s, void* data, std::size_t len, bool allow_eof) {
  auto* p = static_cast<std::uint8_t*>(data);
  std::size_t got = 0;
  while (got < len) {
    std::size_t n = s.read_some(p + got, len - got);
    if (n == 0) {
      if (got == 0 && allow_eof) return false;
      throw NetError("connection closed mid-frame");
    }
    got += n;
  }
  return true;
}

}  // namespace

Fd::~Fd() { close(); }

Fd& Fd::operator=(Fd&& o) noexcept {
  if (this != &o) {
    close();
    fd_ = o.fd_;
    o.fd_ = -1;
  }
  return *this;
}

void Fd::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void SocketStream::write_all(const void* data, std::size_t len) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  std::size_t sent = 0;
  while (sent < len) {
    ssize_t n = ::send(fd_.get(), p + sent, len - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      sys_fail("send");
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::size_t SocketStream::read_some(void* data, std::size_t len) {
  while (true) {
    ssize_t n = ::recv(fd_.get(), data, len, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      sys_fail("recv");
    }
    return static_cast<std::size_t>(n);
  }
}

void SocketStream::shutdown() { ::shutdown(fd_.get(), SHUT_RDWR); }

void send_frame(Stream& s, const Json& header) { send_frame(s, header, nullptr, 0); }

void send_frame(Stream& s, const Json& header, const void* blob, std::size_t blob_len) {
  std::string h = header.dump();
  std::vector<std::uint8_t> buf(8 + h.size());
  put_u32(buf.data(), static_cast<std::uint32_t>(4 + h.size() + blob_len));
  put_u32(buf.data() + 4, static_cast<std::uint32_t>(h.size()));
  std::memcpy(buf.data() + 8, h.data(), h.size());
  s.write_all(buf.data(), buf.size());
  if (blob_len > 0) s.write_all(blob, blob_len);
}

bool recv_frame(Stream& s, Frame& out, std::size_t max_frame) {
  std::uint8_t lenbuf[4];
  if (!read_exact(s, lenbuf, 4, true)) return false;
  std::uint32_t frame_len = get_u32(lenbuf);
  if (frame_len < 4 || frame_len > max_frame) throw NetError("bad frame length");
  std::uint8_t hlenbuf[4];
  read_exact(s, hlenbuf, 4, false);
  std::uint32_t header_len = get_u32(hlenbuf);
  if (header_len > frame_len - 4) throw NetError("bad header length");
  std::string header(header_len, '\0');
  if (header_len > 0) read_exact(s, header.data(), header_len, false);
  std::size_t blob_len = frame_len - 4 - header_len;
  out.blob.resize(blob_len);
  if (blob_len > 0) read_exact(s, out.blob.data(), blob_len, false);
  try {
    out.header = parse_json_strict(header, "<frame>");
  } catch (const ParseError& e) {
    throw NetError(std::string("bad frame header: ") + e.what());
  }
  return true;
}

UnixListener::UnixListener(const std::string& path) : path_(path) {
  if (path.size() >= sizeof(sockaddr_un{}.sun_path))
    throw NetError("socket path too long: " + path);
  int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (fd < 0) sys_fail("socket");
  fd_ = Fd(fd);
  ::unlink(path.c_str());
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  std::strncpy(addr.sun_path, path.c_str(), sizeof(addr.sun_path) - 1);
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) sys_fail("bind " + path);
  if (::listen(fd, 64) < 0) sys_fail("listen");
}

UnixListener::~UnixListener() { close(); }

void UnixListener::close() {
  if (fd_.valid()) {
    ::shutdown(fd_.get(), SHUT_RDWR);
    fd_.close();
    ::unlink(path_.c_str());
  }
}

std::unique_ptr<SocketStream> UnixListener::accept() {
  int cfd = ::accept(fd_.get(), nullptr, nullptr);
  if (cfd < 0) {
    if (errno == EINVAL || errno == EBADF) return nullptr;  // listener closed
    sys_fail("accept");
  }
  return std::make_unique<SocketStream>(Fd(cfd));
}

std::unique_ptr<SocketStream> unix_connect(const std::string& path) {
  int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
  if (fd < 0) sys_fail("socket");
  Fd holder(fd);
  sockaddr_un addr{};
  addr.sun_family = AF_UNIX;
  std::strncpy(addr.sun_path, path.c_str(), sizeof(addr.sun_path) - 1);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0)
    sys_fail("connect " + path);
  return std::make_unique<SocketStream>(std::move(holder));
}

std::pair<std::unique_ptr<SocketStream>, std::unique_ptr<SocketStream>> stream_pair() {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) < 0) sys_fail("socketpair");
  return {std::make_unique<SocketStream>(Fd(fds[0])), std::make_unique<SocketStream>(Fd(fds[1]))};
}

}  // namespace edgeflow::util
