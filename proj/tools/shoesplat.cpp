// Command-line entry point: import -> prep -> train -> eval -> extract -> clean,
// plus synth for generating a synthetic test scene.

#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "shoesplat/logging.hpp"
#include "shoesplat/pipeline.hpp"

namespace fs = std::filesystem;
using namespace shoesplat;

namespace {

struct Common {
  std::string config_file;
  std::vector<std::string> sets;
  std::optional<int> threads;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config_file, "JSON config file");
  app->add_option("--set", c.sets, "override one config key, KEY=VALUE (repeatable)");
  app->add_option("-j,--threads", c.threads, "worker threads (0 = all cores)");
  app->footer(pipeline::describe_config(pipeline::PipelineConfig{}));
}

pipeline::PipelineConfig resolve(const Common& c) {
  pipeline::PipelineConfig cfg = c.config_file.empty() ? pipeline::PipelineConfig{}
                                                        : pipeline::load_config(c.config_file);
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(ErrorKind::ConfigError, "--set expects KEY=VALUE, got " + s);
    pipeline::apply_override(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  if (c.threads) cfg.threads = *c.threads;
  return cfg;
}

fs::path need(const std::string& flag, const fs::path& value, const fs::path& fallback = {}) {
  if (!value.empty()) return value;
  if (!fallback.empty()) return fallback;
  fail(ErrorKind::ConfigError, "missing " + flag);
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  CLI::App app{"Gaussian-splat reconstruction toolkit for object captures"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  Common common;
  std::string sfm, manifest, images, masks, out, data, checkpoint, mesh_in;
  std::optional<int> iterations, resolution, n_gaussians, n_views;
  std::optional<std::uint64_t> seed;
  std::optional<double> iso, tau;

  auto* imp = app.add_subcommand("import", "parse and validate a sparse reconstruction, write a frame manifest");
  imp->add_option("sfm_dir", sfm, "directory with cameras/images/points3D (.bin or .txt)");
  imp->add_option("-o,--out", out, "manifest CSV to write")->required();
  add_common(imp, common);

  auto* prp = app.add_subcommand("prep", "crop, mask and split frames into a prepared dataset");
  prp->add_option("--manifest", manifest, "manifest from import")->required();
  prp->add_option("--images", images, "image directory (default paths.images_dir)");
  prp->add_option("--masks", masks, "mask directory (default paths.masks_dir)");
  prp->add_option("--sfm", sfm, "sparse reconstruction directory (default paths.sfm_dir)");
  prp->add_option("-o,--out", out, "prepared dataset directory (default paths.output_dir)");
  add_common(prp, common);

  auto* trn = app.add_subcommand("train", "fit Gaussians to a prepared dataset");
  trn->add_option("--data", data, "prepared dataset directory")->required();
  trn->add_option("-o,--out", out, "run directory (default paths.output_dir)");
  trn->add_option("--iterations", iterations, "override train.iterations");
  trn->add_option("--seed", seed, "override train.seed");
  add_common(trn, common);

  auto* evl = app.add_subcommand("eval", "score a checkpoint on the test split");
  evl->add_option("--checkpoint", checkpoint, "checkpoint PLY")->required();
  evl->add_option("--data", data, "prepared dataset directory")->required();
  evl->add_option("-o,--out", out, "report directory (default paths.output_dir)");
  add_common(evl, common);

  auto* ext = app.add_subcommand("extract", "extract a coloured mesh from a checkpoint");
  ext->add_option("--checkpoint", checkpoint, "checkpoint PLY")->required();
  ext->add_option("-o,--out", out, "mesh file (.ply or .obj)")->required();
  ext->add_option("--resolution", resolution, "override mesh.resolution");
  ext->add_option("--iso", iso, "override mesh.iso");
  add_common(ext, common);

  auto* cln = app.add_subcommand("clean", "remove black vertices and keep the largest component");
  cln->add_option("--in", mesh_in, "input mesh (.ply or .obj)")->required();
  cln->add_option("-o,--out", out, "output mesh (.ply or .obj)")->required();
  cln->add_option("--tau", tau, "override mesh.tau");
  add_common(cln, common);

  auto* syn = app.add_subcommand("synth", "generate a synthetic scene with ground truth");
  syn->add_option("-o,--out", out, "output directory")->required();
  syn->add_option("--seed", seed, "override synth.seed");
  syn->add_option("--n-gaussians", n_gaussians, "override synth.n_gaussians");
  syn->add_option("--n-views", n_views, "override synth.n_views");
  add_common(syn, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    auto cfg = resolve(common);
    if (iterations) cfg.train.iterations = *iterations;
    if (resolution) cfg.mesh.resolution = *resolution;
    if (iso) cfg.mesh.iso = *iso;
    if (tau) cfg.mesh.tau = *tau;
    if (n_gaussians) cfg.synth.n_gaussians = *n_gaussians;
    if (n_views) cfg.synth.n_views = *n_views;
    if (seed) {
      if (*trn) cfg.train.seed = *seed;
      if (*syn) cfg.synth.seed = *seed;
    }
    pipeline::finalize(cfg);
    const auto& p = cfg.paths;

    if (*imp) {
      pipeline::cmd_import(need("sfm_dir", sfm, p.sfm_dir), out);
    } else if (*prp) {
      pipeline::cmd_prep(manifest, need("--images", images, p.images_dir), need("--masks", masks, p.masks_dir),
                         need("--sfm", sfm, p.sfm_dir), need("--out", out, p.output_dir), cfg);
    } else if (*trn) {
      cfg.train.validate();
      pipeline::cmd_train(data, need("--out", out, p.output_dir), cfg);
    } else if (*evl) {
      pipeline::cmd_eval(checkpoint, data, need("--out", out, p.output_dir), cfg);
    } else if (*ext) {
      pipeline::cmd_extract(checkpoint, out, cfg);
    } else if (*cln) {
      pipeline::cmd_clean(mesh_in, out, cfg.mesh.tau);
    } else if (*syn) {
      pipeline::cmd_synth(out, cfg.synth);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.name() << ": " << e.what() << "\n";
    return pipeline::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
