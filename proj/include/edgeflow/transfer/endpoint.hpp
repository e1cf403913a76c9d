#pragma once

#include <atomic>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "edgeflow/transfer/types.hpp"
#include "edgeflow/util/frame.hpp"

namespace edgeflow::transfer {

// Transfer endpoint daemon. As a destination it accepts striped uploads:
//
//   control: OFFER {transfer_id, files:[{i,dst,size}], verify}
//            DIGEST {transfer_id, i, digest}  -> ok | missing(ranges) | corrupt
//            DONE   {transfer_id}             -> per-file summary
//            CANCEL {transfer_id}
//   data:    STREAM {transfer_id, stream} then CHUNK-DATA
//            {transfer_id, i, off, len} frames with the chunk bytes as the
//            frame blob.
//
// Chunks arrive in any order across streams; files reassemble into
// "<dst>.part" and rename into place only after coverage is complete and
// the digest matches. A DIGEST request blocks until the file is covered or
// every data stream of the transfer has closed, so losses surface as
// missing ranges rather than corruption.
//
// As an initiator it accepts PUSH {spec...} and runs the push engine
// against another endpoint (see service.hpp), plus STATUS {transfer_id}.
class EndpointDaemon {
public:
  EndpointDaemon(std::string root_dir, const std::string& socket_path,
                 std::string endpoint_id = "transfer-ep");
  ~EndpointDaemon();
  void stop();

  const std::string& socket_path() const { return socket_path_; }
  const std::string& root() const { return root_; }

private:
  struct IncomingFile {
    std::string dst_rel;
    std::string part_path;
    std::string final_path;
    std::int64_t size = 0;
    std::map<std::int64_t, std::int64_t> intervals;  // offset -> end, merged
    bool completed = false;   // renamed into place
    bool cancelled = false;
  };

  struct IncomingTransfer {
    std::string transfer_id;
    bool verify = true;
    std::map<int, IncomingFile> files;
    int open_streams = 0;
    bool cancelled = false;
    std::condition_variable cv;  // signalled on writes and stream closes
  };

  void accept_loop();
  void serve(std::shared_ptr<util::SocketStream> conn);
  Json handle_offer(const Json& h);
  Json handle_digest(const Json& h);
  Json handle_done(const Json& h);
  Json handle_cancel(const Json& h);
  Json handle_push(const Json& h);
  Json handle_status(const Json& h);
  void serve_data_stream(util::Stream& stream, const Json& hello);
  std::string safe_join(const std::string& rel) const;

  std::string root_;
  std::string socket_path_;
  std::string endpoint_id_;
  util::UnixListener listener_;
  std::atomic<bool> running_{true};
  std::thread accept_thread_;
  std::mutex conns_mu_;
  std::vector<std::thread> conn_threads_;
  std::vector<std::weak_ptr<util::SocketStream>> conns_;

  std::mutex mu_;
  std::map<std::string, std::shared_ptr<IncomingTransfer>> incoming_;
  // Push-side state (initiator role).
  std::shared_ptr<class TransferService> push_service_;
};

}  // namespace edgeflow::transfer
