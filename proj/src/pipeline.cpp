#include "shoesplat/pipeline.hpp"

#include <functional>
#include <map>
#include <set>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "shoesplat/colmap_io.hpp"
#include "shoesplat/image_io.hpp"
#include "shoesplat/splat_ply.hpp"
#include "shoesplat/util.hpp"

namespace shoesplat::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Entry {
  ConfigKey key;
  std::function<void(PipelineConfig&, const json&)> set;
  std::function<json(const PipelineConfig&)> get;
};

[[noreturn]] void bad_value(const std::string& key, const std::string& want) {
  fail(ErrorKind::ConfigError, "config key '" + key + "' expects " + want);
}

template <typename T>
T convert(const std::string& key, const json& j) {
  if constexpr (std::is_same_v<T, bool>) {
    if (!j.is_boolean()) bad_value(key, "a boolean");
    return j.get<bool>();
  } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
      bad_value(key, "a non-negative integer");
    }
    return j.get<T>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) bad_value(key, "an integer");
    return j.get<T>();
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!j.is_number()) bad_value(key, "a number");
    return j.get<T>();
  } else if constexpr (std::is_same_v<T, fs::path>) {
    if (!j.is_string()) bad_value(key, "a path string");
    return fs::path(j.get<std::string>());
  } else if constexpr (std::is_same_v<T, Rgb>) {
    if (!j.is_array() || j.size() != 3) bad_value(key, "an [r, g, b] array");
    Rgb out;
    for (int c = 0; c < 3; ++c) {
      if (!j[c].is_number()) bad_value(key, "an [r, g, b] array");
      out[c] = j[c].get<double>();
    }
    return out;
  } else if constexpr (std::is_same_v<T, mesh::MeshFormat>) {
    if (!j.is_string()) bad_value(key, "one of ply, ply_ascii, obj");
    const auto s = j.get<std::string>();
    if (s == "ply") return mesh::MeshFormat::PlyBinary;
    if (s == "ply_ascii") return mesh::MeshFormat::PlyAscii;
    if (s == "obj") return mesh::MeshFormat::Obj;
    bad_value(key, "one of ply, ply_ascii, obj");
  }
}

template <typename T>
json to_json_value(const T& v) {
  if constexpr (std::is_same_v<T, fs::path>) {
    return v.string();
  } else if constexpr (std::is_same_v<T, mesh::MeshFormat>) {
    return v == mesh::MeshFormat::Obj ? "obj" : (v == mesh::MeshFormat::PlyAscii ? "ply_ascii" : "ply");
  } else {
    return v;
  }
}

template <typename Access>
Entry entry(std::string name, std::string help, Access access) {
  Entry e;
  e.key = {name, std::move(help)};
  e.set = [name, access](PipelineConfig& c, const json& j) {
    auto& field = access(c);
    field = convert<std::decay_t<decltype(field)>>(name, j);
  };
  e.get = [access](const PipelineConfig& c) {
    PipelineConfig copy = c;
    return to_json_value(access(copy));
  };
  return e;
}

#define SHOESPLAT_KEY(name, help, member) \
  entry(name, help, [](PipelineConfig& c) -> auto& { return c.member; })

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = {
      SHOESPLAT_KEY("threads", "worker threads, 0 = all cores; results do not depend on it", threads),
      SHOESPLAT_KEY("paths.sfm_dir", "sparse reconstruction directory", paths.sfm_dir),
      SHOESPLAT_KEY("paths.images_dir", "input image directory", paths.images_dir),
      SHOESPLAT_KEY("paths.masks_dir", "input mask directory (255 = foreground)", paths.masks_dir),
      SHOESPLAT_KEY("paths.output_dir", "output directory", paths.output_dir),
      SHOESPLAT_KEY("train.iterations", "optimisation steps", train.iterations),
      SHOESPLAT_KEY("train.lambda", "SSIM weight in the loss, in [0, 1]", train.lambda),
      SHOESPLAT_KEY("train.lr_means_init", "position learning rate at step 0, times scene extent", train.lr.means_init),
      SHOESPLAT_KEY("train.lr_means_final", "position learning rate at the last step, times scene extent", train.lr.means_final),
      SHOESPLAT_KEY("train.lr_sh_dc", "learning rate of the DC colour coefficients", train.lr.sh_dc),
      SHOESPLAT_KEY("train.lr_sh_rest", "learning rate of the higher SH coefficients", train.lr.sh_rest),
      SHOESPLAT_KEY("train.lr_opacity", "learning rate of opacity logits", train.lr.opacity),
      SHOESPLAT_KEY("train.lr_scales", "learning rate of log scales", train.lr.scales),
      SHOESPLAT_KEY("train.lr_rotation", "learning rate of rotation quaternions", train.lr.rotation),
      SHOESPLAT_KEY("train.densify_interval", "steps between densify/prune passes", train.densify_interval),
      SHOESPLAT_KEY("train.densify_from", "first step after which densification runs", train.densify_from),
      SHOESPLAT_KEY("train.densify_until", "step at which densification stops", train.densify_until),
      SHOESPLAT_KEY("train.grad_threshold", "mean view-space gradient norm that triggers densification", train.grad_threshold),
      SHOESPLAT_KEY("train.percent_dense", "scene-extent fraction separating split from clone", train.percent_dense),
      SHOESPLAT_KEY("train.prune_opacity", "opacity below which Gaussians are pruned", train.prune_opacity),
      SHOESPLAT_KEY("train.max_gaussians", "cloud size at which densification stops adding Gaussians", train.max_gaussians),
      SHOESPLAT_KEY("train.eval_interval", "steps between loss log and evaluation points", train.eval_interval),
      SHOESPLAT_KEY("train.seed", "seed of the view shuffle", train.seed),
      SHOESPLAT_KEY("train.background", "background colour [r, g, b] in [0, 1]", train.background),
      SHOESPLAT_KEY("train.scene_extent", "scene extent for learning rates and densification, 0 = from cameras", train.scene_extent),
      SHOESPLAT_KEY("train.diagnostic_dir", "where to dump state on a non-finite loss", train.diagnostic_dir),
      SHOESPLAT_KEY("init.sh_degree", "spherical-harmonic degree of the model, 0..3", init.sh_degree),
      SHOESPLAT_KEY("init.initial_opacity", "opacity of initial Gaussians", init.initial_opacity),
      SHOESPLAT_KEY("init.neighbors", "neighbours averaged for the initial scale", init.neighbors),
      SHOESPLAT_KEY("init.min_scale", "smallest initial scale", init.min_scale),
      SHOESPLAT_KEY("metrics.masked", "score PSNR inside the masks only instead of the full frame", metrics.masked),
      SHOESPLAT_KEY("mesh.resolution", "density grid samples along the longest axis", mesh.resolution),
      SHOESPLAT_KEY("mesh.iso", "density iso level of the extracted surface", mesh.iso),
      SHOESPLAT_KEY("mesh.tau", "vertices whose brightest channel is below this are black", mesh.tau),
      SHOESPLAT_KEY("mesh.bake_k", "nearest Gaussians averaged per vertex colour", mesh.bake_k),
      SHOESPLAT_KEY("mesh.format", "extract output format: ply, ply_ascii or obj", mesh.format),
      SHOESPLAT_KEY("split.train", "fraction of videos in the train split", split.ratios.train),
      SHOESPLAT_KEY("split.val", "fraction of videos in the val split", split.ratios.val),
      SHOESPLAT_KEY("split.test", "fraction of videos in the test split", split.ratios.test),
      SHOESPLAT_KEY("split.seed", "seed of the video shuffle", split.seed),
      SHOESPLAT_KEY("prep.crop_square", "centre-crop frames to a square", prep.crop_square),
      SHOESPLAT_KEY("prep.frames_per_video", "frames sampled evenly per video, 0 = all", prep.frames_per_video),
      SHOESPLAT_KEY("synth.seed", "seed of the synthetic scene", synth.seed),
      SHOESPLAT_KEY("synth.n_gaussians", "ground-truth Gaussians", synth.n_gaussians),
      SHOESPLAT_KEY("synth.n_views", "rendered views", synth.n_views),
      SHOESPLAT_KEY("synth.width", "view width in pixels", synth.width),
      SHOESPLAT_KEY("synth.height", "view height in pixels", synth.height),
      SHOESPLAT_KEY("synth.focal", "focal length in pixels", synth.focal),
      SHOESPLAT_KEY("synth.camera_radius", "camera distance from the origin", synth.camera_radius),
      SHOESPLAT_KEY("synth.points_per_gaussian", "sparse points sampled per Gaussian", synth.points_per_gaussian),
      SHOESPLAT_KEY("synth.mask_threshold", "alpha at which a pixel counts as foreground", synth.mask_threshold),
  };
  return table;
}

#undef SHOESPLAT_KEY

const Entry* find_entry(const std::string& name) {
  for (const auto& e : entries()) {
    if (e.key.name == name) return &e;
  }
  return nullptr;
}

void apply_flat(PipelineConfig& config, const json& j, const std::string& prefix) {
  if (!j.is_object()) fail(ErrorKind::ConfigError, "config must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    const std::string name = prefix.empty() ? k : prefix + "." + k;
    if (const Entry* e = find_entry(name)) {
      e->set(config, v);
    } else if (v.is_object()) {
      apply_flat(config, v, name);
    } else {
      fail(ErrorKind::ConfigError, "unknown config key '" + name + "'");
    }
  }
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& e : entries()) out.push_back(e.key);
    return out;
  }();
  return keys;
}

std::string describe_config(const PipelineConfig& config) {
  std::string s = "Config keys (JSON file, nested by dots; flags > file > defaults):\n";
  for (const auto& e : entries()) {
    s += "  " + e.key.name + " = " + e.get(config).dump() + "\n      " + e.key.help + "\n";
  }
  return s;
}

void apply_json(PipelineConfig& config, const json& j) { apply_flat(config, j, ""); }

void apply_override(PipelineConfig& config, const std::string& key, const std::string& value) {
  const Entry* e = find_entry(key);
  if (!e) fail(ErrorKind::ConfigError, "unknown config key '" + key + "'");
  json j = json::parse(value, nullptr, false);
  if (j.is_discarded()) j = value;
  e->set(config, j);
}

PipelineConfig load_config(const fs::path& path) {
  PipelineConfig config;
  const std::string text = read_file(path);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::ConfigError, "config file is not valid JSON: " + path.string());
  apply_json(config, j);
  return config;
}

std::string config_json(const PipelineConfig& config) {
  nlohmann::ordered_json root;
  for (const auto& e : entries()) {
    nlohmann::ordered_json* node = &root;
    const std::string& name = e.key.name;
    size_t start = 0;
    for (size_t dot; (dot = name.find('.', start)) != std::string::npos; start = dot + 1) {
      node = &(*node)[name.substr(start, dot - start)];
    }
    (*node)[name.substr(start)] = e.get(config);
  }
  return root.dump(2) + "\n";
}

void finalize(PipelineConfig& config) {
  config.train.threads = config.threads;
  config.metrics.threads = config.threads;
  config.metrics.background = config.train.background;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError: return 1;
    case ErrorKind::NonFiniteLoss: return 3;
    default: return 2;
  }
}

ImportSummary cmd_import(const fs::path& sfm_dir, const fs::path& out_manifest) {
  const auto rec = colmap::read_reconstruction(sfm_dir);
  const auto report = colmap::validate_reconstruction(rec.cameras, rec.poses, rec.points);
  if (!report.ok()) {
    std::string msg = std::to_string(report.issues.size()) + " validation issue(s)";
    for (size_t i = 0; i < std::min<size_t>(report.issues.size(), 5); ++i) {
      msg += "; " + report.issues[i].describe();
    }
    fail(ErrorKind::InconsistentReconstruction, msg);
  }

  // Frame index: position of the image name within its video.
  std::map<std::string, std::vector<std::string>> by_video;
  for (const auto& [id, pose] : rec.poses) by_video[prep::video_id_of(pose.image_name)].push_back(pose.image_name);
  prep::DatasetManifest manifest;
  for (auto& [video, names] : by_video) {
    std::sort(names.begin(), names.end());
    for (size_t i = 0; i < names.size(); ++i) {
      fs::path mask = names[i];
      mask.replace_extension(".png");
      manifest.entries.push_back({video, static_cast<std::int64_t>(i), names[i], mask.generic_string(),
                                  prep::Split::Unassigned});
    }
  }
  prep::write_manifest(manifest, out_manifest);

  ImportSummary s;
  s.n_cameras = rec.cameras.size();
  s.n_images = rec.poses.size();
  s.n_points = rec.points.size();
  nlohmann::ordered_json j;
  j["n_cameras"] = s.n_cameras;
  j["n_images"] = s.n_images;
  j["n_points"] = s.n_points;
  j["n_videos"] = by_video.size();
  j["cameras"] = nlohmann::ordered_json::array();
  for (const auto& [id, cam] : rec.cameras) {
    nlohmann::ordered_json c;
    c["camera_id"] = id;
    c["model"] = std::string(colmap::model_name(cam.model));
    c["width"] = cam.width;
    c["height"] = cam.height;
    c["params"] = cam.params;
    j["cameras"].push_back(c);
  }
  s.json = j.dump(2) + "\n";
  fs::path summary = out_manifest;
  summary.replace_extension(".json");
  atomic_write_file(summary, s.json);
  spdlog::info("imported {} cameras, {} images, {} points", s.n_cameras, s.n_images, s.n_points);
  return s;
}

namespace {

colmap::CameraIntrinsics crop_intrinsics(const colmap::CameraIntrinsics& cam, const prep::CropWindow& w) {
  colmap::CameraIntrinsics out = cam;
  const size_t cx = cam.model == colmap::CameraModel::Pinhole ? 2 : 1;
  out.params[cx] -= w.x0;
  out.params[cx + 1] -= w.y0;
  out.width = static_cast<std::uint64_t>(w.side);
  out.height = static_cast<std::uint64_t>(w.side);
  return out;
}

std::map<std::string, const colmap::ViewPose*> poses_by_name(const colmap::Reconstruction& rec) {
  std::map<std::string, const colmap::ViewPose*> out;
  for (const auto& [id, pose] : rec.poses) out[pose.image_name] = &pose;
  return out;
}

}  // namespace

prep::DatasetManifest cmd_prep(const fs::path& manifest_path, const fs::path& images_dir,
                               const fs::path& masks_dir, const fs::path& sfm_dir, const fs::path& out_dir,
                               const PipelineConfig& config) {
  config.split.ratios.validate();
  const auto input = prep::read_manifest(manifest_path);
  auto rec = colmap::read_reconstruction(sfm_dir);
  const auto by_name = poses_by_name(rec);

  // Optional even sampling of frames within each video.
  std::vector<const prep::ManifestEntry*> selected;
  {
    std::map<std::string, std::vector<const prep::ManifestEntry*>> videos;
    for (const auto& e : input.entries) videos[e.video_id].push_back(&e);
    for (auto& [video, frames] : videos) {
      std::sort(frames.begin(), frames.end(),
                [](auto* a, auto* b) { return a->frame_index < b->frame_index; });
      if (config.prep.frames_per_video > 0) {
        for (auto idx : prep::sample_frame_indices(static_cast<std::int64_t>(frames.size()),
                                                   config.prep.frames_per_video)) {
          selected.push_back(frames[static_cast<size_t>(idx)]);
        }
      } else {
        selected.insert(selected.end(), frames.begin(), frames.end());
      }
    }
  }

  std::map<std::uint32_t, prep::CropWindow> windows;
  for (const auto& [id, cam] : rec.cameras) {
    windows[id] = config.prep.crop_square
                      ? prep::square_window(static_cast<int>(cam.width), static_cast<int>(cam.height))
                      : prep::CropWindow{0, 0, -1};
  }

  prep::DatasetManifest out;
  std::set<std::uint32_t> kept_images;
  std::map<std::uint32_t, std::string> new_names;
  for (const auto* e : selected) {
    const auto it = by_name.find(e->image_path);
    if (it == by_name.end()) {
      fail(ErrorKind::InconsistentReconstruction, "image " + e->image_path + " has no pose");
    }
    const colmap::ViewPose& pose = *it->second;
    const auto& cam = rec.cameras.at(pose.camera_id);
    ImageU8 image = to_rgb(read_png(images_dir / e->image_path));
    MaskBuffer mask = mask_from_u8(read_png(masks_dir / e->mask_path));
    if (image.width() != static_cast<int>(cam.width) || image.height() != static_cast<int>(cam.height)) {
      fail(ErrorKind::DimensionMismatch, "image " + e->image_path + " does not match its camera size");
    }
    if (mask.width() != image.width() || mask.height() != image.height()) {
      fail(ErrorKind::DimensionMismatch, "mask " + e->mask_path + " does not match its image");
    }
    const auto& w = windows.at(pose.camera_id);
    if (w.side >= 0) {
      image = prep::crop(image, w);
      mask = prep::crop(mask, w);
    }
    bool any = false;
    for (double m : mask.data()) any = any || m >= 0.5;
    if (!any) {
      spdlog::warn("dropping {}: empty mask", e->image_path);
      continue;
    }
    image = prep::apply_mask(image, mask, config.train.background);
    fs::path name = e->image_path;
    name.replace_extension(".png");
    const std::string png = name.generic_string();
    write_png(out_dir / "images" / png, image);
    write_png(out_dir / "masks" / png, mask_to_u8(mask));
    out.entries.push_back({e->video_id, e->frame_index, "images/" + png, "masks/" + png, prep::Split::Unassigned});
    kept_images.insert(pose.image_id);
    new_names[pose.image_id] = png;
  }
  if (out.entries.empty()) fail(ErrorKind::EmptyMask, "every frame has an empty mask");

  std::vector<std::string> videos;
  for (const auto& e : out.entries) videos.push_back(e.video_id);
  const auto splits = prep::split_by_video(videos, config.split.ratios, config.split.seed);
  for (auto& e : out.entries) e.split = splits.at(e.video_id);

  // Cropped cameras, renamed images, shifted keypoints.
  for (auto& [id, cam] : rec.cameras) {
    if (windows[id].side >= 0) cam = crop_intrinsics(cam, windows[id]);
  }
  for (auto& [id, pose] : rec.poses) {
    if (auto n = new_names.find(id); n != new_names.end()) pose.image_name = n->second;
    const auto& w = windows[pose.camera_id];
    if (w.side < 0) continue;
    for (auto& o : pose.observations) {
      o.u -= w.x0;
      o.v -= w.y0;
    }
  }
  colmap::write_reconstruction(rec, out_dir / "sparse" / "0");
  prep::write_manifest(out, out_dir / "manifest.csv");
  spdlog::info("prepared {} frames ({} dropped)", out.entries.size(), selected.size() - out.entries.size());
  return out;
}

std::vector<View> load_views(const fs::path& prepared_dir, prep::Split split) {
  const auto manifest = prep::read_manifest(prepared_dir / "manifest.csv");
  const auto rec = colmap::read_reconstruction(prepared_dir / "sparse" / "0");
  const auto by_name = poses_by_name(rec);
  std::vector<View> views;
  for (const auto* e : manifest.in_split(split)) {
    const std::string name = fs::path(e->image_path).lexically_relative("images").generic_string();
    const auto it = by_name.find(name);
    if (it == by_name.end()) fail(ErrorKind::InconsistentReconstruction, "image " + name + " has no pose");
    const auto& pose = *it->second;
    const auto cam_it = rec.cameras.find(pose.camera_id);
    if (cam_it == rec.cameras.end()) {
      fail(ErrorKind::InconsistentReconstruction, "image " + name + " names a missing camera");
    }
    View v;
    v.id = name;
    v.image = to_float(to_rgb(read_png(prepared_dir / e->image_path)));
    v.mask = mask_from_u8(read_png(prepared_dir / e->mask_path));
    v.camera = geom::PinholeCamera::from_colmap(cam_it->second, pose);
    if (v.image.width() != v.camera.width || v.image.height() != v.camera.height) {
      fail(ErrorKind::DimensionMismatch, "image " + name + " does not match its camera size");
    }
    views.push_back(std::move(v));
  }
  return views;
}

train::TrainResult cmd_train(const fs::path& prepared_dir, const fs::path& out_dir, const PipelineConfig& config) {
  const auto train_views = load_views(prepared_dir, prep::Split::Train);
  const auto val_views = load_views(prepared_dir, prep::Split::Val);
  const auto rec = colmap::read_reconstruction(prepared_dir / "sparse" / "0");
  auto init = gs::init_from_points(rec.points, config.init);
  spdlog::info("training on {} views ({} val), {} initial gaussians", train_views.size(), val_views.size(),
               init.size());
  auto result = train::train(train_views, val_views, std::move(init), config.train);
  train::save_checkpoint(result.best, out_dir / "checkpoint.ply");
  atomic_write_file(out_dir / "loss_trace.csv", result.trace.csv());
  atomic_write_file(out_dir / "config.json", config_json(config));
  return result;
}

metrics::EvalReport cmd_eval(const fs::path& checkpoint, const fs::path& prepared_dir, const fs::path& out_dir,
                             const PipelineConfig& config) {
  const auto ck = train::load_checkpoint(checkpoint);
  const auto views = load_views(prepared_dir, prep::Split::Test);
  const auto report = metrics::evaluate_model(ck.cloud, views, config.metrics);
  metrics::write_report(report, out_dir / "eval.csv", out_dir / "eval.json");
  spdlog::info("mean PSNR {} over {} views ({} infinite)", metrics::format_psnr(report.mean_psnr),
               report.n_views, report.n_infinite);
  return report;
}

mesh::TriangleMesh extract_mesh(const gs::GaussianCloud& cloud, const MeshConfig& config, int threads) {
  mesh::GridOptions go;
  go.resolution = config.resolution;
  go.threads = threads;
  const auto grid = mesh::sample_density(cloud, go);
  const auto surface = mesh::marching_cubes(grid, config.iso);
  if (surface.faces.empty()) {
    spdlog::warn("iso level {} produced an empty surface", config.iso);
    return surface;
  }
  return mesh::bake_vertex_colors(surface, cloud, config.bake_k);
}

mesh::TriangleMesh cmd_extract(const fs::path& checkpoint, const fs::path& out_mesh, const PipelineConfig& config) {
  const auto ck = train::load_checkpoint(checkpoint);
  const auto m = extract_mesh(ck.cloud, config.mesh, config.threads);
  auto format = mesh::format_for_path(out_mesh);
  if (format == mesh::MeshFormat::PlyBinary && config.mesh.format == mesh::MeshFormat::PlyAscii) {
    format = mesh::MeshFormat::PlyAscii;
  }
  mesh::write_mesh(m, out_mesh, format);
  spdlog::info("extracted {} vertices, {} faces", m.vertex_count(), m.face_count());
  return m;
}

mesh::TriangleMesh cmd_clean(const fs::path& mesh_in, const fs::path& mesh_out, double tau) {
  const auto input = mesh::read_mesh(mesh_in);
  const auto cleaned = mesh::clean(input, tau);
  mesh::write_mesh(cleaned, mesh_out, mesh::format_for_path(mesh_out));
  spdlog::info("cleaned mesh: {} -> {} vertices, {} -> {} faces", input.vertex_count(), cleaned.vertex_count(),
               input.face_count(), cleaned.face_count());
  return cleaned;
}

synth::SynthScene cmd_synth(const fs::path& out_dir, const synth::SynthConfig& config) {
  auto scene = synth::generate(config);
  synth::write_scene(scene, out_dir);
  nlohmann::ordered_json j;
  j["seed"] = config.seed;
  j["n_gaussians"] = config.n_gaussians;
  j["n_views"] = config.n_views;
  j["width"] = config.width;
  j["height"] = config.height;
  j["focal"] = config.focal;
  j["camera_radius"] = config.camera_radius;
  j["points_per_gaussian"] = config.points_per_gaussian;
  j["mask_threshold"] = config.mask_threshold;
  atomic_write_file(out_dir / "synth.json", j.dump(2) + "\n");
  return scene;
}

}  // namespace shoesplat::pipeline
