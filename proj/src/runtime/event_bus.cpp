#include "imhotep/runtime/event_bus.hpp"

#include <algorithm>
#include <stdexcept>

namespace imhotep {

EventBus::EventBus() : owner_(std::this_thread::get_id()) {}

SubscriptionId EventBus::subscribe(std::string topic, Handler handler) {
  std::lock_guard lock(subs_mutex_);
  const SubscriptionId id = next_id_++;
  subs_.push_back({id, std::move(topic), std::move(handler)});
  return id;
}

void EventBus::unsubscribe(SubscriptionId id) {
  std::lock_guard lock(subs_mutex_);
  std::erase_if(subs_, [id](const Subscription& s) { return s.id == id; });
}

void EventBus::publish(std::string topic, std::any payload) {
  WakeFn wake;
  {
    std::lock_guard lock(queue_mutex_);
    queue_.push_back({std::move(topic), std::move(payload)});
    wake = wake_;
  }
  if (wake) wake();
}

std::size_t EventBus::pump_events(std::size_t max) {
  if (!on_coordination_context()) {
    throw std::logic_error("pump_events called outside the coordination context");
  }
  std::deque<Event> batch;
  {
    std::lock_guard lock(queue_mutex_);
    const std::size_t n = std::min(max, queue_.size());
    for (std::size_t i = 0; i < n; ++i) {
      batch.push_back(std::move(queue_.front()));
      queue_.pop_front();
    }
  }
  for (const Event& ev : batch) {
    // Snapshot ids so handlers may (un)subscribe during delivery.
    std::vector<SubscriptionId> ids;
    {
      std::lock_guard lock(subs_mutex_);
      for (const auto& s : subs_) {
        if (s.topic == ev.topic) ids.push_back(s.id);
      }
    }
    for (SubscriptionId id : ids) {
      Handler handler;
      {
        std::lock_guard lock(subs_mutex_);
        auto it = std::find_if(subs_.begin(), subs_.end(),
                               [id](const Subscription& s) { return s.id == id; });
        if (it == subs_.end()) continue;
        handler = it->handler;
      }
      handler(ev);
    }
  }
  return batch.size();
}

std::size_t EventBus::pending() const {
  std::lock_guard lock(queue_mutex_);
  return queue_.size();
}

void EventBus::bind_to_current_thread() { owner_ = std::this_thread::get_id(); }

bool EventBus::on_coordination_context() const { return std::this_thread::get_id() == owner_; }

void EventBus::set_wake(WakeFn wake) {
  std::lock_guard lock(queue_mutex_);
  wake_ = std::move(wake);
}

void EventBus::clear() {
  {
    std::lock_guard lock(queue_mutex_);
    queue_.clear();
  }
  std::lock_guard lock(subs_mutex_);
  subs_.clear();
}

}  // namespace imhotep
