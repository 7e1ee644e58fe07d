#pragma once

#include "imhotep/runtime/event_bus.hpp"

#include <any>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace imhotep {

enum class TaskStatus { Pending, Running, Done, Failed };

std::string_view to_string(TaskStatus status);

namespace detail {
struct TaskState {
  std::uint64_t id = 0;
  std::atomic<TaskStatus> status{TaskStatus::Pending};
  std::atomic<double> progress{0.0};
  std::atomic<bool> cancelled{false};
};
}  // namespace detail

class TaskHandle {
 public:
  TaskHandle() = default;
  explicit TaskHandle(std::shared_ptr<detail::TaskState> state) : state_(std::move(state)) {}

  std::uint64_t id() const { return state_->id; }
  TaskStatus status() const { return state_->status.load(); }
  double progress() const { return state_->progress.load(); }
  /// A task cancelled before it starts is never run; it still completes
  /// (as failed) with exactly one event.
  void cancel() const { state_->cancelled.store(true); }
  bool valid() const { return state_ != nullptr; }

 private:
  std::shared_ptr<detail::TaskState> state_;
};

class ProgressReporter {
 public:
  explicit ProgressReporter(detail::TaskState& state) : state_(state) {}
  /// Clamped to [0, 1]; never moves backwards.
  void report(double fraction);
  bool cancelled() const { return state_.cancelled.load(); }

 private:
  detail::TaskState& state_;
};

/// Payload of a completion event.
struct TaskCompletion {
  std::uint64_t task_id = 0;
  TaskStatus status = TaskStatus::Done;
  std::any value;                // set when status == Done
  std::exception_ptr error;      // set when status == Failed
  std::string error_message;
};

/// Background worker pool. Every submitted job produces exactly one event on
/// its completion topic; the event is dropped if the target bus no longer
/// exists.
class TaskExecutor {
 public:
  using Job = std::function<std::any(ProgressReporter&)>;

  /// 0 workers selects the hardware concurrency.
  explicit TaskExecutor(std::size_t workers = 0);
  ~TaskExecutor();

  TaskExecutor(const TaskExecutor&) = delete;
  TaskExecutor& operator=(const TaskExecutor&) = delete;

  /// Throws ExecutorShutDown after shutdown().
  TaskHandle submit_task(Job job, const std::shared_ptr<EventBus>& bus, std::string completion_topic);

  /// Stops accepting work, finishes queued jobs and joins the workers.
  void shutdown();

  /// Blocks until no job is queued or running.
  void wait_idle();

  std::size_t worker_count() const { return workers_.size(); }

 private:
  struct Item {
    std::shared_ptr<detail::TaskState> state;
    Job job;
    std::weak_ptr<EventBus> bus;
    std::string topic;
  };

  void worker_loop();

  std::mutex mutex_;
  std::condition_variable work_cv_;
  std::condition_variable idle_cv_;
  std::deque<Item> queue_;
  std::size_t running_ = 0;
  bool stopping_ = false;
  std::uint64_t next_id_ = 1;
  std::vector<std::thread> workers_;
};

}  // namespace imhotep
