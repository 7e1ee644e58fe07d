#include "imhotep/service/session.hpp"

#include "imhotep/core/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace imhotep {
namespace {

using nlohmann::json;

constexpr const char* kLoadTopic = "session.load_done";
constexpr const char* kRenderTopic = "session.render_done";

/// BadPayload that remembers which field was wrong.
class FieldError : public Error {
 public:
  FieldError(std::string field, const std::string& message)
      : Error(ErrorCode::BadPayload, "field '" + field + "': " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

const json& field(const json& payload, const char* name) {
  auto it = payload.find(name);
  if (it == payload.end()) throw FieldError(name, "missing");
  return *it;
}

double number_field(const json& payload, const char* name) {
  const json& v = field(payload, name);
  if (!v.is_number()) throw FieldError(name, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw FieldError(name, "expected a finite number");
  return d;
}

double number_field_or(const json& payload, const char* name, double fallback) {
  return payload.contains(name) ? number_field(payload, name) : fallback;
}

std::string string_field(const json& payload, const char* name) {
  const json& v = field(payload, name);
  if (!v.is_string()) throw FieldError(name, "expected a string");
  return v.get<std::string>();
}

bool bool_field(const json& payload, const char* name) {
  const json& v = field(payload, name);
  if (!v.is_boolean()) throw FieldError(name, "expected a boolean");
  return v.get<bool>();
}

Vec3 vec3_field(const json& payload, const char* name) {
  const json& v = field(payload, name);
  if (!v.is_array() || v.size() != 3) throw FieldError(name, "expected an array of 3 numbers");
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number()) throw FieldError(name, "expected an array of 3 numbers");
    out[i] = v[i].get<double>();
    if (!std::isfinite(out[i])) throw FieldError(name, "expected finite numbers");
  }
  return out;
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json error_payload(const Error& e) {
  json p{{"code", to_string(e.code())}, {"message", e.what()}};
  if (const auto* fe = dynamic_cast<const FieldError*>(&e)) p["field"] = fe->field();
  if (const auto* ee = dynamic_cast<const EntryError*>(&e)) p["entry"] = ee->entry();
  return p;
}

json slot_content(const Scene& scene, const ScreenSlot& slot) {
  const PatientRecord& r = scene.record;
  switch (slot.kind) {
    case SlotKind::Text:
      return {{"type", "text"},
              {"name", r.name},
              {"age", r.age},
              {"sex", r.sex},
              {"diagnosis", r.diagnosis},
              {"notes_html", r.notes_html}};
    case SlotKind::Labs: {
      json labs = json::array();
      for (const auto& l : r.labs) {
        labs.push_back({{"name", l.name}, {"value", l.value}, {"unit", l.unit}, {"timestamp", l.timestamp}});
      }
      return {{"type", "labs"}, {"labs", labs}};
    }
    case SlotKind::Image: {
      json images = json::array();
      for (const auto& img : r.images) {
        if (img.slot == slot.id) images.push_back({{"file", img.file}, {"caption", img.caption}});
      }
      return {{"type", "images"}, {"images", images}};
    }
  }
  return nullptr;
}

json camera_json(const Camera& c) {
  return {{"eye", vec_json(c.eye)},
          {"forward", vec_json(c.forward)},
          {"up", vec_json(c.up)},
          {"right", vec_json(c.right)},
          {"vertical_fov", c.vertical_fov},
          {"width", c.width},
          {"height", c.height},
          {"near", c.near_plane},
          {"far", c.far_plane}};
}

}  // namespace

Session::Session(std::shared_ptr<TaskExecutor> executor, SessionConfig config,
                 std::function<void()> wake)
    : executor_(std::move(executor)), config_(std::move(config)), bus_(std::make_shared<EventBus>()) {
  if (!executor_) fail(ErrorCode::InvalidArgument, "session needs an executor");
  if (config_.default_ipd_mm < 0.0) fail(ErrorCode::InvalidArgument, "ipd must be >= 0");
  scene_.viewport = config_.viewport;
  stereo_.ipd_mm = config_.default_ipd_mm;
  wake_ = std::make_shared<WakeState>();
  wake_->user = std::move(wake);
  bus_->set_wake([state = wake_] {
    { std::lock_guard lock(state->mutex); }
    state->cv.notify_all();
    if (state->user) state->user();
  });
  bus_->subscribe(kLoadTopic, [this](const Event& ev) { on_load_done(ev); });
  bus_->subscribe(kRenderTopic, [this](const Event& ev) { on_render_done(ev); });
}

Session::~Session() { close(); }

void Session::close() {
  if (closed_) return;
  closed_ = true;
  for (auto& [id, handle] : in_flight_) handle.cancel();
  in_flight_.clear();
  bus_->set_wake({});
  bus_->clear();
  // Workers hold only a weak reference; completions after this point are
  // dropped together with the bus.
  bus_.reset();
}

std::vector<Reply> Session::handle_text(std::string_view text) {
  std::vector<Reply> out;
  std::optional<std::int64_t> id;
  WireMessage msg;
  try {
    msg = parse_wire_message(text, id);
  } catch (const Error& e) {
    out.emplace_back(make_reply(id, "error", error_payload(e)));
    return out;
  }
  return handle_message(msg);
}

std::vector<Reply> Session::handle_message(const WireMessage& msg) {
  std::vector<Reply> out;
  if (closed_) {
    out.emplace_back(make_reply(msg.id, "error",
                                {{"code", "InvalidArgument"}, {"message", "session closed"}}));
    return out;
  }
  try {
    dispatch(msg, out);
  } catch (const Error& e) {
    out.clear();
    out.emplace_back(make_reply(msg.id, "error", error_payload(e)));
  }
  return out;
}

void Session::require_loaded() const {
  if (!scene_.loaded) fail(ErrorCode::NotLoaded, "no patient loaded");
}

void Session::dispatch(const WireMessage& msg, std::vector<Reply>& out) {
  const json& p = msg.payload;
  const std::string& type = msg.type;

  if (type == "load_patient") {
    const std::string path = string_field(p, "path");
    std::vector<std::string> slots;
    for (const auto& s : scene_.room.screen.slots) slots.push_back(s.id);
    TaskHandle h = executor_->submit_task(
        [path, slots](ProgressReporter&) -> std::any {
          return std::make_shared<const PatientBundle>(load_patient_directory(path, slots));
        },
        bus_, kLoadTopic);
    in_flight_[h.id()] = h;
    load_requests_[h.id()] = msg.id;
    out.emplace_back(make_reply(msg.id, "ack", {{"task", h.id()}}));
    return;
  }
  if (type == "get_scene") {
    out.emplace_back(make_reply(msg.id, "scene", scene_json()));
    return;
  }
  if (type == "set_stereo") {
    const bool enabled = bool_field(p, "enabled");
    const double ipd = number_field_or(p, "ipd_mm", stereo_.ipd_mm);
    if (ipd < 0.0) throw FieldError("ipd_mm", "must be >= 0");
    stereo_.enabled = enabled;
    stereo_.ipd_mm = ipd;
    out.emplace_back(make_reply(msg.id, "ack"));
    if (scene_.loaded) schedule_frame();
    return;
  }
  if (type == "set_view") {
    const std::string view = string_field(p, "view");
    require_loaded();
    set_view(scene_, view);
    out.emplace_back(make_reply(msg.id, "ack"));
    schedule_frame();
    return;
  }
  if (type == "orbit") {
    const double yaw = number_field_or(p, "yaw", 0.0);
    const double pitch = number_field_or(p, "pitch", 0.0);
    const double zoom = number_field_or(p, "zoom", 1.0);
    if (!(zoom > 0.0)) throw FieldError("zoom", "must be > 0");
    require_loaded();
    orbit(scene_, yaw, pitch, zoom);
    scene_.active_view = "custom";
    out.emplace_back(make_reply(msg.id, "ack"));
    schedule_frame();
    return;
  }
  if (type == "set_transfer_function") {
    TransferFunction tf;
    try {
      tf = transfer_function_from_json(p);
    } catch (const FieldError&) {
      throw;
    } catch (const std::exception& e) {
      throw FieldError("points", e.what());
    }
    require_loaded();
    scene_.transfer_function = std::move(tf);
    out.emplace_back(make_reply(msg.id, "ack"));
    schedule_frame();
    return;
  }
  if (type == "set_organ_opacity") {
    const json& mesh = field(p, "mesh");
    const double alpha = number_field(p, "alpha");
    if (alpha < 0.0 || alpha > 1.0) throw FieldError("alpha", "must lie in [0,1]");
    require_loaded();
    int mesh_id = -1;
    if (mesh.is_number_integer()) {
      mesh_id = mesh.get<int>();
    } else if (mesh.is_string()) {
      const std::string name = mesh.get<std::string>();
      for (const auto& o : scene_.organs) {
        if (o.appearance.name == name) mesh_id = o.id;
      }
      if (mesh_id < 0) fail(ErrorCode::UnknownMesh, "no organ named '" + name + "'");
    } else {
      throw FieldError("mesh", "expected an id or a name");
    }
    set_organ_opacity(scene_, mesh_id, alpha);
    out.emplace_back(make_reply(msg.id, "ack"));
    schedule_frame();
    return;
  }
  if (type == "add_annotation") {
    const Vec3 position = vec3_field(p, "position");
    const Vec3 normal = vec3_field(p, "normal");
    const std::string text = string_field(p, "text");
    if (!(normal.norm() > 0.0)) throw FieldError("normal", "must be non-zero");
    require_loaded();
    // Positions arrive in world mm; annotations are stored in patient mm.
    const Affine3 inv = scene_.model.inverse();
    const Vec3 anchor = inv * position;
    const Vec3 n = (inv.linear() * normal).normalized();
    const Annotation& a = add_annotation(scene_, anchor, n, text);
    out.emplace_back(make_reply(msg.id, "ack", {{"annotation", a.id}}));
    schedule_frame();
    return;
  }
  if (type == "pointer_ray") {
    const Vec3 origin = vec3_field(p, "origin");
    const Vec3 dir = vec3_field(p, "dir");
    if (!(dir.norm() > 0.0)) throw FieldError("dir", "must be non-zero");
    require_loaded();
    const Ray ray{origin, dir.normalized()};
    const auto targets = pick_targets(scene_);
    const auto mesh_hit = ray_mesh_pick(targets, ray);
    const auto screen_hit =
        ray_screen_intersect(scene_.room.screen, Ray{origin / 1000.0, ray.dir});
    json result{{"hit", "none"}};
    if (mesh_hit && (!screen_hit || mesh_hit->t <= screen_hit->t * 1000.0)) {
      const SceneOrgan& o = scene_.organs[static_cast<std::size_t>(mesh_hit->mesh_id)];
      result = {{"hit", "mesh"},
                {"mesh", mesh_hit->mesh_id},
                {"name", o.appearance.name},
                {"triangle", mesh_hit->triangle},
                {"t", mesh_hit->t},
                {"point", vec_json(mesh_hit->point)}};
    } else if (screen_hit) {
      const ScreenSlot* slot = scene_.room.screen.slot_at(screen_hit->u, screen_hit->v);
      result = {{"hit", "screen"},
                {"u", screen_hit->u},
                {"v", screen_hit->v},
                {"t", screen_hit->t * 1000.0},
                {"slot", slot ? json(slot->id) : json(nullptr)}};
      if (slot) result["content"] = slot_content(scene_, *slot);
    }
    out.emplace_back(make_reply(msg.id, "pick", result));
    return;
  }
  if (type == "request_frame") {
    require_loaded();
    out.emplace_back(make_reply(msg.id, "ack"));
    schedule_frame();
    return;
  }
  fail(ErrorCode::UnknownType, "unknown message type '" + type + "'");
}

void Session::schedule_frame() {
  const std::uint32_t seq = next_sequence_++;
  RenderScene rs = to_render_scene(scene_);
  std::vector<std::pair<Eye, Camera>> eyes;
  if (stereo_.enabled) {
    const StereoRig rig{scene_.camera, stereo_.ipd_mm};
    eyes.emplace_back(Eye::Left, rig.eye_camera(1));
    eyes.emplace_back(Eye::Right, rig.eye_camera(2));
  } else {
    eyes.emplace_back(Eye::Mono, scene_.camera);
  }
  TaskHandle h = executor_->submit_task(
      [rs = std::move(rs), eyes = std::move(eyes), opts = config_.render,
       format = config_.frame_format, seq](ProgressReporter& progress) -> std::any {
        std::vector<FramePacket> packets;
        for (const auto& [eye, cam] : eyes) {
          if (progress.cancelled()) break;
          packets.push_back(encode_frame(render_view(rs, cam, opts), eye, seq, format));
          progress.report(static_cast<double>(packets.size()) / static_cast<double>(eyes.size()));
        }
        return packets;
      },
      bus_, kRenderTopic);
  in_flight_[h.id()] = h;
  render_seq_[h.id()] = seq;
}

void Session::on_load_done(const Event& ev) {
  const auto& done = std::any_cast<const TaskCompletion&>(ev.payload);
  in_flight_.erase(done.task_id);
  auto req = load_requests_.find(done.task_id);
  if (req == load_requests_.end()) return;
  const std::int64_t request_id = req->second;
  load_requests_.erase(req);

  if (done.status != TaskStatus::Done) {
    json payload{{"code", "InvalidArgument"}, {"message", done.error_message}};
    try {
      if (done.error) std::rethrow_exception(done.error);
    } catch (const Error& e) {
      payload = error_payload(e);
    } catch (...) {
    }
    outbox_.emplace_back(make_reply(request_id, "error", payload));
    return;
  }
  auto bundle = std::any_cast<std::shared_ptr<const PatientBundle>>(done.value);
  try {
    load_into_scene(scene_, *bundle);
  } catch (const Error& e) {
    outbox_.emplace_back(make_reply(request_id, "error", error_payload(e)));
    return;
  }
  announce_patient(request_id);
}

void Session::install_patient(const PatientBundle& bundle) {
  if (closed_) return;
  load_into_scene(scene_, bundle);
  announce_patient(std::nullopt);
}

void Session::announce_patient(std::optional<std::int64_t> request_id) {
  json organs = json::array();
  for (const auto& o : scene_.organs) organs.push_back(o.appearance.name);
  outbox_.emplace_back(make_reply(request_id, "patient_loaded",
                                  {{"organs", organs}, {"has_volume", scene_.volume != nullptr}}));
  schedule_frame();
}

void Session::on_render_done(const Event& ev) {
  const auto& done = std::any_cast<const TaskCompletion&>(ev.payload);
  in_flight_.erase(done.task_id);
  auto it = render_seq_.find(done.task_id);
  if (it == render_seq_.end()) return;
  const std::uint32_t seq = it->second;
  render_seq_.erase(it);
  if (done.status == TaskStatus::Done) {
    ready_[seq] = std::any_cast<std::vector<FramePacket>>(done.value);
  } else {
    ready_[seq] = {};  // leaves a gap in the delivered sequence, never a stall
    outbox_.emplace_back(make_reply(std::nullopt, "error",
                                    {{"code", "InvalidArgument"},
                                     {"message", "render failed: " + done.error_message}}));
  }
  release_frames();
}

void Session::release_frames() {
  while (!ready_.empty() && ready_.begin()->first == next_release_) {
    for (auto& packet : ready_.begin()->second) {
      last_sequence_ = packet.sequence;
      outbox_.emplace_back(std::move(packet));
    }
    ready_.erase(ready_.begin());
    ++next_release_;
  }
}

std::vector<Reply> Session::poll() {
  if (!closed_) bus_->pump_events();
  std::vector<Reply> out = std::move(outbox_);
  outbox_.clear();
  return out;
}

bool Session::busy() const {
  if (closed_) return false;
  return !in_flight_.empty() || bus_->pending() > 0;
}

std::vector<Reply> Session::drain() {
  std::vector<Reply> out;
  for (;;) {
    auto batch = poll();
    std::move(batch.begin(), batch.end(), std::back_inserter(out));
    if (!busy()) return out;
    std::unique_lock lock(wake_->mutex);
    wake_->cv.wait_for(lock, std::chrono::milliseconds(20), [this] { return bus_->pending() > 0; });
  }
}

nlohmann::json Session::scene_json() const {
  const Scene& s = scene_;
  json organs = json::array();
  for (const auto& o : s.organs) {
    organs.push_back({{"id", o.id},
                      {"name", o.appearance.name},
                      {"color", vec_json(o.appearance.color)},
                      {"opacity", o.appearance.opacity},
                      {"effective_opacity", o.effective_opacity()},
                      {"visible", o.state.visible}});
  }
  json annotations = json::array();
  for (std::size_t i = 0; i < s.annotations.size(); ++i) {
    const Annotation& a = s.annotations[i];
    json entry{{"id", a.id},
               {"text", a.text},
               {"anchor_mm", vec_json(a.anchor)},
               {"position", vec_json(s.model * a.anchor)},
               {"normal", vec_json(a.normal)},
               {"label_distance", a.label_distance}};
    if (i < s.labels.rects.size()) {
      const LabelRect& r = s.labels.rects[i];
      entry["label_rect"] = json::array({r.x0, r.y0, r.x1, r.y1});
      entry["label_visible"] = r.visible;
    }
    annotations.push_back(std::move(entry));
  }
  json slots = json::array();
  for (const auto& slot : s.room.screen.slots) {
    slots.push_back({{"id", slot.id},
                     {"kind", to_string(slot.kind)},
                     {"rect", json::array({slot.u0, slot.v0, slot.u1, slot.v1})},
                     {"content", slot_content(s, slot)}});
  }
  return {{"loaded", s.loaded},
          {"organs", organs},
          {"annotations", annotations},
          {"labels_overflow", s.labels.overflow},
          {"slots", slots},
          {"record", to_json(s.record)},
          {"view", s.active_view},
          {"camera", camera_json(s.camera)},
          {"stereo", {{"enabled", stereo_.enabled}, {"ipd_mm", stereo_.ipd_mm}}},
          {"transfer_function", to_json(s.transfer_function)},
          {"has_volume", s.volume != nullptr},
          {"tool", to_string(s.tools.active)},
          {"room", to_json(s.room)},
          {"frame_sequence", last_sequence_}};
}

}  // namespace imhotep
