#pragma once

#include "imhotep/runtime/event_bus.hpp"
#include "imhotep/runtime/task_executor.hpp"
#include "imhotep/scene/scene.hpp"
#include "imhotep/service/protocol.hpp"

#include <functional>
#include <map>
#include <memory>
#include <vector>

namespace imhotep {

struct SessionConfig {
  FrameFormat frame_format = FrameFormat::Raw;
  RenderOptions render;
  ViewportSpec viewport;
  double default_ipd_mm = 64.0;
};

/// Stereo settings owned by the session rather than the scene.
struct StereoState {
  bool enabled = false;
  double ipd_mm = 64.0;
};

/// One viewer connection: owns one scene and turns protocol commands into
/// scene mutations and frame renders. Loads and renders run on the shared
/// executor; their completions come back through the session's own event
/// bus and are only applied when the owner calls poll() on the thread that
/// created the session.
class Session {
 public:
  Session(std::shared_ptr<TaskExecutor> executor, SessionConfig config = {},
          std::function<void()> wake = {});
  ~Session();

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  /// Parses and handles one text command. Always returns at least one reply.
  std::vector<Reply> handle_text(std::string_view text);
  std::vector<Reply> handle_message(const WireMessage& msg);

  /// Applies finished background work and returns the replies it produced
  /// (notifications and frames, frames strictly in sequence order).
  std::vector<Reply> poll();

  /// Blocks until no load or render is outstanding, returning everything
  /// poll() produced meanwhile.
  std::vector<Reply> drain();

  /// True while a load or render is in flight or a frame awaits release.
  bool busy() const;

  /// Installs an already loaded patient, as if load_patient had completed:
  /// queues a `patient_loaded` notification (id null) and a frame.
  void install_patient(const PatientBundle& bundle);

  /// Cancels queued work and detaches from the executor; later completions
  /// are dropped.
  void close();

  const Scene& scene() const { return scene_; }
  const StereoState& stereo() const { return stereo_; }
  std::uint32_t last_sequence() const { return last_sequence_; }
  nlohmann::json scene_json() const;

 private:
  void dispatch(const WireMessage& msg, std::vector<Reply>& out);
  void require_loaded() const;
  void schedule_frame();
  void on_load_done(const Event& ev);
  void announce_patient(std::optional<std::int64_t> request_id);
  void on_render_done(const Event& ev);
  void release_frames();

  std::shared_ptr<TaskExecutor> executor_;
  SessionConfig config_;
  std::shared_ptr<EventBus> bus_;
  Scene scene_;
  StereoState stereo_;

  std::map<std::uint64_t, TaskHandle> in_flight_;         // task id -> handle
  std::map<std::uint64_t, std::int64_t> load_requests_;   // task id -> request id
  std::map<std::uint64_t, std::uint32_t> render_seq_;     // task id -> sequence
  std::map<std::uint32_t, std::vector<FramePacket>> ready_;
  std::uint32_t next_sequence_ = 1;
  std::uint32_t next_release_ = 1;
  std::uint32_t last_sequence_ = 0;
  std::vector<Reply> outbox_;
  bool closed_ = false;

  // Shared with the bus wake callback, which a worker may still be running
  // after the session is gone.
  struct WakeState {
    std::mutex mutex;
    std::condition_variable cv;
    std::function<void()> user;
  };
  std::shared_ptr<WakeState> wake_;
};

}  // namespace imhotep
