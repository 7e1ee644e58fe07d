#include "imhotep/runtime/task_executor.hpp"

#include "imhotep/core/error.hpp"

#include <algorithm>

namespace imhotep {

std::string_view to_string(TaskStatus status) {
  switch (status) {
    case TaskStatus::Pending: return "pending";
    case TaskStatus::Running: return "running";
    case TaskStatus::Done: return "done";
    case TaskStatus::Failed: return "failed";
  }
  return "pending";
}

void ProgressReporter::report(double fraction) {
  fraction = std::clamp(fraction, 0.0, 1.0);
  double current = state_.progress.load();
  while (fraction > current && !state_.progress.compare_exchange_weak(current, fraction)) {
  }
}

TaskExecutor::TaskExecutor(std::size_t workers) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers_.reserve(workers);
  for (std::size_t i = 0; i < workers; ++i) workers_.emplace_back([this] { worker_loop(); });
}

TaskExecutor::~TaskExecutor() { shutdown(); }

TaskHandle TaskExecutor::submit_task(Job job, const std::shared_ptr<EventBus>& bus,
                                     std::string completion_topic) {
  auto state = std::make_shared<detail::TaskState>();
  {
    std::lock_guard lock(mutex_);
    if (stopping_) fail(ErrorCode::ExecutorShutDown, "executor has been shut down");
    state->id = next_id_++;
    queue_.push_back({state, std::move(job), bus, std::move(completion_topic)});
  }
  work_cv_.notify_one();
  return TaskHandle(state);
}

void TaskExecutor::shutdown() {
  {
    std::lock_guard lock(mutex_);
    if (stopping_ && workers_.empty()) return;
    stopping_ = true;
  }
  work_cv_.notify_all();
  for (auto& t : workers_) {
    if (t.joinable()) t.join();
  }
  workers_.clear();
}

void TaskExecutor::wait_idle() {
  std::unique_lock lock(mutex_);
  idle_cv_.wait(lock, [this] { return queue_.empty() && running_ == 0; });
}

void TaskExecutor::worker_loop() {
  for (;;) {
    Item item;
    {
      std::unique_lock lock(mutex_);
      work_cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;  // stopping and drained
      item = std::move(queue_.front());
      queue_.pop_front();
      ++running_;
    }

    TaskCompletion done;
    done.task_id = item.state->id;
    if (item.state->cancelled.load()) {
      done.status = TaskStatus::Failed;
      done.error_message = "cancelled";
    } else {
      item.state->status.store(TaskStatus::Running);
      ProgressReporter progress(*item.state);
      try {
        done.value = item.job(progress);
        done.status = TaskStatus::Done;
        progress.report(1.0);
      } catch (const std::exception& e) {
        done.status = TaskStatus::Failed;
        done.error = std::current_exception();
        done.error_message = e.what();
      } catch (...) {
        done.status = TaskStatus::Failed;
        done.error = std::current_exception();
        done.error_message = "unknown error";
      }
    }
    item.state->status.store(done.status);
    if (auto bus = item.bus.lock()) bus->publish(item.topic, std::move(done));

    {
      std::lock_guard lock(mutex_);
      --running_;
      if (queue_.empty() && running_ == 0) idle_cv_.notify_all();
    }
  }
}

}  // namespace imhotep
