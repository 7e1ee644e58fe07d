// imhotep: serve sessions, render still images, validate patient directories.

#include "imhotep/core/error.hpp"
#include "imhotep/patient/patient_directory.hpp"
#include "imhotep/render/png.hpp"
#include "imhotep/scene/scene.hpp"
#include "imhotep/service/server.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <regex>
#include <thread>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted.store(true); }

struct RenderArgs {
  std::string patient;
  std::string view = "coronal";
  std::string tf;
  std::string out;
  bool stereo = false;
  double ipd = 64.0;
  std::string size = "512x512";
  double step = 0.0;
  int workers = 0;
};

std::pair<int, int> parse_size(const std::string& text) {
  static const std::regex re(R"((\d{1,5})[xX](\d{1,5}))");
  std::smatch m;
  if (!std::regex_match(text, m, re)) {
    throw CLI::ValidationError("--size", "expected WxH, got '" + text + "'");
  }
  const int w = std::stoi(m[1]);
  const int h = std::stoi(m[2]);
  if (w <= 0 || h <= 0) throw CLI::ValidationError("--size", "image dimensions must be > 0");
  return {w, h};
}

std::vector<std::string> screen_slot_ids() {
  std::vector<std::string> ids;
  for (const auto& s : imhotep::default_room_layout().screen.slots) ids.push_back(s.id);
  return ids;
}

int run_render(const RenderArgs& args) {
  using namespace imhotep;
  const auto [width, height] = parse_size(args.size);

  Scene scene;
  scene.viewport.width = width;
  scene.viewport.height = height;
  const auto slots = screen_slot_ids();
  load_into_scene(scene, load_patient_directory(args.patient, slots));
  set_view(scene, args.view);
  if (!args.tf.empty()) {
    std::ifstream in(args.tf);
    if (!in) fail(ErrorCode::InvalidArgument, "cannot open transfer function '" + args.tf + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::InvalidArgument, args.tf + ": " + e.what());
    }
    scene.transfer_function = transfer_function_from_json(j);
  }

  RenderOptions opts;
  opts.workers = args.workers;
  opts.step = args.step;
  const RenderScene rs = to_render_scene(scene);
  if (args.stereo) {
    const StereoFrame frame = render_frame(rs, StereoRig{scene.camera, args.ipd}, opts);
    const std::string left = args.out + "_left.png";
    const std::string right = args.out + "_right.png";
    write_png(left, frame.left.width, frame.left.height, frame.left.color);
    write_png(right, frame.right.width, frame.right.height, frame.right.color);
    std::cout << left << "\n" << right << "\n";
  } else {
    const Framebuffer fb = render_view(rs, scene.camera, opts);
    const std::string path = args.out + ".png";
    write_png(path, fb.width, fb.height, fb.color);
    std::cout << path << "\n";
  }
  return kExitOk;
}

int run_validate(const std::string& dir) {
  const auto reports = imhotep::validate_patient_directory(dir);
  bool ok = true;
  for (const auto& r : reports) {
    std::cout << (r.ok ? "OK    " : "ERROR ") << r.file;
    if (!r.ok) std::cout << ": " << r.message;
    std::cout << "\n";
    ok = ok && r.ok;
  }
  std::cout << (ok ? "valid" : "invalid") << "\n";
  return ok ? kExitOk : kExitData;
}

int run_serve(const std::string& patient, int port, int workers) {
  using namespace imhotep;
  if (port < 0 || port > 65535) throw CLI::ValidationError("--port", "must lie in [0, 65535]");
  ServerConfig config;
  config.port = static_cast<std::uint16_t>(port);
  config.workers = static_cast<std::size_t>(std::max(workers, 0));
  if (!patient.empty()) config.patient = patient;
  Server server(config);
  server.start();
  std::cout << "listening on port " << server.port() << std::endl;

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_interrupted.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server.stop();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patient visualization engine: serve sessions, render images, validate data"};
  app.require_subcommand(1, 1);

  std::string serve_patient;
  int port = imhotep::kDefaultPort;
  int serve_workers = 0;
  auto* serve = app.add_subcommand("serve", "Run the session service");
  serve->add_option("--patient", serve_patient, "Patient directory installed in every new session")
      ->check(CLI::ExistingDirectory);
  serve->add_option("--port", port, "TCP port (0 picks a free one)")->envname("IMHOTEP_PORT");
  serve->add_option("--workers", serve_workers, "Worker threads (0 = hardware)")
      ->envname("IMHOTEP_WORKERS")
      ->check(CLI::NonNegativeNumber);

  RenderArgs render_args;
  auto* render = app.add_subcommand("render", "Render one view to PNG");
  render->add_option("--patient", render_args.patient, "Patient directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  render->add_option("--view", render_args.view, "View preset")->capture_default_str();
  render->add_option("--tf", render_args.tf, "Transfer function JSON")->check(CLI::ExistingFile);
  render->add_option("--out", render_args.out, "Output prefix")->required();
  render->add_flag("--stereo", render_args.stereo, "Write a left/right pair");
  render->add_option("--ipd", render_args.ipd, "Inter-pupillary distance in mm")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  render->add_option("--size", render_args.size, "Image size WxH")->capture_default_str();
  render->add_option("--step", render_args.step, "Ray step in mm (0 = half the finest spacing)")
      ->check(CLI::NonNegativeNumber);
  render->add_option("--workers", render_args.workers, "Render threads (0 = hardware)")
      ->envname("IMHOTEP_WORKERS")
      ->check(CLI::NonNegativeNumber);

  std::string validate_dir;
  auto* validate = app.add_subcommand("validate", "Check every file of a patient directory");
  validate->add_option("dir", validate_dir, "Patient directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*serve) return run_serve(serve_patient, port, serve_workers);
    if (*render) return run_render(render_args);
    if (*validate) return run_validate(validate_dir);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const imhotep::Error& e) {
    std::cerr << "error [" << imhotep::to_string(e.code()) << "]: " << e.what() << "\n";
    return e.code() == imhotep::ErrorCode::UnknownPreset ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}
