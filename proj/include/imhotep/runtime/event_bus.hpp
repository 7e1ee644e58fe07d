#pragma once

#include <any>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace imhotep {

namespace topics {
inline constexpr const char* PatientLoaded = "patient.loaded";
inline constexpr const char* FrameRendered = "frame.rendered";
inline constexpr const char* AnnotationAdded = "annotation.added";
}  // namespace topics

struct Event {
  std::string topic;
  std::any payload;
};

using SubscriptionId = std::uint64_t;

/// Publish/subscribe hub. `publish` is safe from any thread; handlers only
/// run inside `pump_events`, on the thread that owns the bus (the
/// coordination context).
class EventBus {
 public:
  using Handler = std::function<void(const Event&)>;
  /// Called after every publish, from the publishing thread.
  using WakeFn = std::function<void()>;

  EventBus();

  SubscriptionId subscribe(std::string topic, Handler handler);
  void unsubscribe(SubscriptionId id);

  void publish(std::string topic, std::any payload = {});

  /// Delivers up to `max` of the events queued before the call, in order.
  /// Events published by handlers wait for the next pump. Returns the
  /// number of events delivered. Throws std::logic_error off the owning
  /// thread.
  std::size_t pump_events(std::size_t max = SIZE_MAX);

  std::size_t pending() const;

  /// Makes the calling thread the coordination context.
  void bind_to_current_thread();
  bool on_coordination_context() const;

  void set_wake(WakeFn wake);

  /// Drops queued events and all subscriptions.
  void clear();

 private:
  struct Subscription {
    SubscriptionId id;
    std::string topic;
    Handler handler;
  };

  mutable std::mutex queue_mutex_;
  std::deque<Event> queue_;
  WakeFn wake_;

  std::mutex subs_mutex_;
  std::vector<Subscription> subs_;
  SubscriptionId next_id_ = 1;

  std::thread::id owner_;
};

}  // namespace imhotep
