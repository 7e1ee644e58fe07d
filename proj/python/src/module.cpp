#include "imhotep/core/error.hpp"
#include "imhotep/patient/patient_directory.hpp"
#include "imhotep/render/frame.hpp"
#include "imhotep/scene/scene.hpp"
#include "imhotep/service/session.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace imhotep;

namespace {

py::object to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json from_python(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

Vec3 vec3(const std::array<double, 3>& a) { return Vec3(a[0], a[1], a[2]); }
std::array<double, 3> arr(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

py::array_t<std::uint8_t> image(const Framebuffer& fb) {
  py::array_t<std::uint8_t> out({fb.height, fb.width, 4});
  std::copy(fb.color.begin(), fb.color.end(), out.mutable_data());
  return out;
}

py::array_t<double> matrix(const Mat3& m) {
  py::array_t<double> out({3, 3});
  auto r = out.mutable_unchecked<2>();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = m(i, j);
  return out;
}

py::dict volume_dict(const Volume& v) {
  py::array_t<std::int16_t> voxels({v.dims[2], v.dims[1], v.dims[0]});
  std::copy(v.voxels.begin(), v.voxels.end(), voxels.mutable_data());
  py::dict d;
  d["voxels"] = voxels;
  d["spacing"] = arr(v.spacing);
  d["origin"] = arr(v.origin);
  d["orientation"] = matrix(v.orientation);
  return d;
}

py::object reply_to_python(const Reply& r) {
  if (const auto* text = std::get_if<std::string>(&r)) return py::str(*text);
  const auto bytes = std::get<FramePacket>(r).serialize();
  return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

py::list replies(const std::vector<Reply>& rs) {
  py::list out;
  for (const auto& r : rs) out.append(reply_to_python(r));
  return out;
}

// A scene driven directly, without the session protocol.
class PyScene {
 public:
  PyScene(int width, int height) {
    scene_.viewport.width = width;
    scene_.viewport.height = height;
  }

  void load(const std::filesystem::path& dir) {
    std::vector<std::string> slots;
    for (const auto& s : scene_.room.screen.slots) slots.push_back(s.id);
    PatientBundle bundle;
    {
      py::gil_scoped_release release;
      bundle = load_patient_directory(dir, slots);
    }
    load_into_scene(scene_, std::move(bundle));
  }

  void set_view(const std::string& name) { imhotep::set_view(scene_, name); }
  void orbit(double yaw, double pitch, double zoom) {
    imhotep::orbit(scene_, yaw, pitch, zoom);
    scene_.active_view = "custom";
  }

  void set_organ_opacity(const py::object& mesh, double alpha) {
    int id = -1;
    if (py::isinstance<py::str>(mesh)) {
      const auto name = mesh.cast<std::string>();
      for (const auto& o : scene_.organs)
        if (o.appearance.name == name) id = o.id;
      if (id < 0) fail(ErrorCode::UnknownMesh, "no organ named '" + name + "'");
    } else {
      id = mesh.cast<int>();
    }
    imhotep::set_organ_opacity(scene_, id, alpha);
  }

  void set_transfer_function(const py::object& tf) {
    scene_.transfer_function = transfer_function_from_json(from_python(tf));
  }

  int add_annotation(const std::array<double, 3>& anchor, const std::array<double, 3>& normal,
                     const std::string& text) {
    return imhotep::add_annotation(scene_, vec3(anchor), vec3(normal), text).id;
  }

  py::object pick(const std::array<double, 3>& origin, const std::array<double, 3>& dir) const {
    const Vec3 d = vec3(dir);
    if (!(d.norm() > 0.0)) fail(ErrorCode::InvalidArgument, "direction must be non-zero");
    const auto targets = pick_targets(scene_);
    const auto hit = ray_mesh_pick(targets, Ray{vec3(origin), d.normalized()});
    if (!hit) return py::none();
    py::dict out;
    out["mesh"] = hit->mesh_id;
    out["name"] = scene_.organs[static_cast<std::size_t>(hit->mesh_id)].appearance.name;
    out["triangle"] = hit->triangle;
    out["t"] = hit->t;
    out["point"] = arr(hit->point);
    return out;
  }

  py::object render(bool stereo, double ipd, int workers, double step) const {
    const RenderScene rs = to_render_scene(scene_);
    RenderOptions opts;
    opts.workers = workers;
    opts.step = step;
    if (stereo) {
      StereoFrame f;
      {
        py::gil_scoped_release release;
        f = render_frame(rs, StereoRig{scene_.camera, ipd}, opts);
      }
      return py::make_tuple(image(f.left), image(f.right));
    }
    Framebuffer fb;
    {
      py::gil_scoped_release release;
      fb = render_view(rs, scene_.camera, opts);
    }
    return image(fb);
  }

  py::list organs() const {
    py::list out;
    for (const auto& o : scene_.organs) {
      py::dict d;
      d["id"] = o.id;
      d["name"] = o.appearance.name;
      d["color"] = arr(o.appearance.color);
      d["opacity"] = o.effective_opacity();
      d["visible"] = o.state.visible;
      out.append(d);
    }
    return out;
  }

  py::list annotations() const {
    py::list out;
    for (const auto& a : scene_.annotations) {
      py::dict d;
      d["id"] = a.id;
      d["text"] = a.text;
      d["anchor"] = arr(a.anchor);
      d["label_distance"] = a.label_distance;
      out.append(d);
    }
    return out;
  }

  const Scene& scene() const { return scene_; }

 private:
  Scene scene_;
};

// The session protocol with its own worker pool.
class PySession {
 public:
  PySession(int width, int height, std::size_t workers, bool png)
      : executor_(std::make_shared<TaskExecutor>(workers)), session_(executor_, config(width, height, png)) {}

  py::list handle(const std::string& text) { return replies(session_.handle_text(text)); }
  py::list poll() { return replies(session_.poll()); }
  py::list drain() {
    std::vector<Reply> out;
    {
      py::gil_scoped_release release;
      out = session_.drain();
    }
    return replies(out);
  }
  bool busy() const { return session_.busy(); }
  py::object scene() const { return to_python(session_.scene_json()); }

 private:
  static SessionConfig config(int width, int height, bool png) {
    SessionConfig c;
    c.viewport.width = width;
    c.viewport.height = height;
    c.frame_format = png ? FrameFormat::Png : FrameFormat::Raw;
    return c;
  }

  std::shared_ptr<TaskExecutor> executor_;
  Session session_;
};

py::dict parse_frame(const py::bytes& data) {
  const std::string s = data;
  const FramePacket p = FramePacket::parse(
      std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  const auto pixels = frame_pixels(p);
  py::array_t<std::uint8_t> img({static_cast<int>(p.height), static_cast<int>(p.width), 4});
  std::copy(pixels.begin(), pixels.end(), img.mutable_data());
  py::dict d;
  d["width"] = p.width;
  d["height"] = p.height;
  d["format"] = p.format == FrameFormat::Raw ? "raw" : "png";
  d["eye"] = static_cast<int>(p.eye);
  d["sequence"] = p.sequence;
  d["pixels"] = img;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Patient data loading, volume and mesh rendering, and the viewer session protocol.";

  static py::handle error = py::exception<Error>(m, "ImhotepError").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error(py::str(e.what()));
      exc.attr("code") = std::string(to_string(e.code()));
      if (const auto* entry = dynamic_cast<const EntryError*>(&e)) {
        exc.attr("entry") = entry->entry();
        exc.attr("cause") = std::string(to_string(entry->cause()));
      }
      py::set_error(error, exc);
    }
  });

  m.def(
      "load_dicom_series", [](const std::filesystem::path& dir) { return volume_dict(load_dicom_series(dir)); },
      py::arg("directory"), "Assemble a directory of CT slices into a volume dict (voxels are z, y, x).");

  m.def(
      "validate_patient_directory",
      [](const std::filesystem::path& dir) {
        py::list out;
        for (const auto& r : validate_patient_directory(dir)) out.append(py::make_tuple(r.file, r.ok, r.message));
        return out;
      },
      py::arg("directory"));

  m.def("parse_frame", &parse_frame, py::arg("packet"), "Decode a binary frame packet.");

  py::class_<PyScene>(m, "Scene")
      .def(py::init<int, int>(), py::arg("width") = 512, py::arg("height") = 512)
      .def("load", &PyScene::load, py::arg("directory"))
      .def("set_view", &PyScene::set_view, py::arg("name"))
      .def("orbit", &PyScene::orbit, py::arg("yaw") = 0.0, py::arg("pitch") = 0.0, py::arg("zoom") = 1.0)
      .def("set_organ_opacity", &PyScene::set_organ_opacity, py::arg("mesh"), py::arg("alpha"))
      .def("set_transfer_function", &PyScene::set_transfer_function, py::arg("tf"))
      .def("add_annotation", &PyScene::add_annotation, py::arg("anchor"), py::arg("normal"), py::arg("text"),
           "Anchor and normal in patient millimetres; returns the new id.")
      .def("pick", &PyScene::pick, py::arg("origin"), py::arg("direction"), "World-space ray, millimetres.")
      .def("render", &PyScene::render, py::arg("stereo") = false, py::arg("ipd") = 64.0, py::arg("workers") = 0,
           py::arg("step") = 0.0)
      .def_property_readonly("organs", &PyScene::organs)
      .def_property_readonly("annotations", &PyScene::annotations)
      .def_property_readonly("view", [](const PyScene& s) { return s.scene().active_view; })
      .def_property_readonly("loaded", [](const PyScene& s) { return s.scene().loaded; })
      .def_property_readonly("has_volume", [](const PyScene& s) { return s.scene().volume != nullptr; })
      .def_property_readonly("transfer_function",
                             [](const PyScene& s) { return to_python(to_json(s.scene().transfer_function)); });

  py::class_<PySession>(m, "Session")
      .def(py::init<int, int, std::size_t, bool>(), py::arg("width") = 512, py::arg("height") = 512,
           py::arg("workers") = 0, py::arg("png") = false)
      .def("handle", &PySession::handle, py::arg("message"),
           "Handle one JSON command; returns replies (str) and frame packets (bytes).")
      .def("poll", &PySession::poll)
      .def("drain", &PySession::drain)
      .def_property_readonly("busy", &PySession::busy)
      .def_property_readonly("scene", &PySession::scene);
}
