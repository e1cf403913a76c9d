#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "edgeflow/util/errors.hpp"
#include "edgeflow/util/jsonio.hpp"

namespace edgeflow::util {

// Stream-socket utilities shared by the engine, faas, and transfer
// services. Every message is a frame:
//
//   u32 frame_len (big endian)  = 4 + header_len + blob_len
//   u32 header_len (big endian)
//   header bytes (JSON text)
//   blob bytes (optional binary payload, e.g. a transfer chunk)

// Owning fd wrapper.
class Fd {
public:
  Fd() : fd_(-1) {}
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd();
  Fd(Fd&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
  Fd& operator=(Fd&& o) noexcept;
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;

  int get() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  void close();

private:
  int fd_;
};

struct Frame {
  Json header;
  std::vector<std::uint8_t> blob;
};

// Byte sink/source so tests can interpose fault injection and pacing
// between the transfer streams and the kernel.
class Stream {
public:
  virtual ~Stream() = default;
  virtual void write_all(const void* data, std::size_t len) = 0;   // throws NetError
  virtual std::size_t read_some(void* data, std::size_t len) = 0;  // 0 = EOF
  virtual void shutdown() {}
};

class SocketStream final : public Stream {
public:
  explicit SocketStream(Fd fd) : fd_(std::move(fd)) {}
  void write_all(const void* data, std::size_t len) override;
  std::size_t read_some(void* data, std::size_t len) override;
  void shutdown() override;
  int fd() const { return fd_.get(); }

private:
  Fd fd_;
};

void send_frame(Stream& s, const Json& header);
void send_frame(Stream& s, const Json& header, const void* blob, std::size_t blob_len);
// Returns false on clean EOF before any byte of a frame.
bool recv_frame(Stream& s, Frame& out, std::size_t max_frame = 64u << 20);

// Unix-domain listener. Removes a stale socket file on bind.
class UnixListener {
public:
  explicit UnixListener(const std::string& path);
  ~UnixListener();
  std::unique_ptr<SocketStream> accept();
  void close();
  const std::string& path() const { return path_; }

private:
  std::string path_;
  Fd fd_;
};

std::unique_ptr<SocketStream> unix_connect(const std::string& path);

// Connected socket pair (tests, in-process wiring).
std::pair<std::unique_ptr<SocketStream>, std::unique_ptr<SocketStream>> stream_pair();

}  // namespace edgeflow::util
