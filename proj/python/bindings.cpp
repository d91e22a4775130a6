#include <pybind11/eigen.h>
#include <pybind11/gil_safe_call_once.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "shoesplat/logging.hpp"
#include "shoesplat/metrics.hpp"
#include "shoesplat/pipeline.hpp"
#include "shoesplat/rasterizer.hpp"
#include "shoesplat/splat_ply.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace shoesplat;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

/// HxW or HxWxC array to an interleaved image.
ImageF image_from_array(const Array& a) {
  if (a.ndim() != 2 && a.ndim() != 3) throw py::value_error("expected an HxW or HxWxC array");
  const int h = static_cast<int>(a.shape(0)), w = static_cast<int>(a.shape(1));
  const int c = a.ndim() == 3 ? static_cast<int>(a.shape(2)) : 1;
  ImageF img(w, h, c);
  std::copy(a.data(), a.data() + a.size(), img.data().begin());
  return img;
}

Array array_from_image(const ImageF& img) {
  Array out({img.height(), img.width(), img.channels()});
  std::copy(img.data().begin(), img.data().end(), out.mutable_data());
  return out;
}

pipeline::PipelineConfig make_config(const py::dict& overrides) {
  pipeline::PipelineConfig cfg;
  for (const auto& [k, v] : overrides) {
    const std::string value = py::str(py::module_::import("json").attr("dumps")(v));
    pipeline::apply_override(cfg, py::str(k), value);
  }
  pipeline::finalize(cfg);
  return cfg;
}

py::dict report_dict(const metrics::EvalReport& r) {
  py::dict views;
  for (const auto& v : r.views) views[py::str(v.view_id)] = v.psnr;
  py::dict d;
  d["mean_psnr"] = r.mean_psnr;
  d["n_views"] = r.n_views;
  d["n_infinite"] = r.n_infinite;
  d["views"] = views;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Gaussian-splat reconstruction toolkit";
  init_logging();

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result([&] { return py::object(py::exception<Error>(m, "Error")); });
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const py::object& type = error_type.get_stored();
      py::object inst = type(std::string(e.what()));
      inst.attr("kind") = std::string(e.name());
      PyErr_SetObject(type.ptr(), inst.ptr());
    }
  });

  py::class_<gs::Gaussian>(m, "Gaussian")
      .def(py::init<>())
      .def_readwrite("mean", &gs::Gaussian::mean)
      .def_readwrite("log_scale", &gs::Gaussian::log_scale)
      .def_readwrite("rotation", &gs::Gaussian::rotation)
      .def_readwrite("opacity_logit", &gs::Gaussian::opacity_logit)
      .def_property(
          "sh", [](const gs::Gaussian& g) { return std::vector<double>(g.sh.begin(), g.sh.end()); },
          [](gs::Gaussian& g, const std::vector<double>& v) {
            if (v.size() != g.sh.size()) throw py::value_error("sh needs " + std::to_string(g.sh.size()) + " values");
            std::copy(v.begin(), v.end(), g.sh.begin());
          })
      .def_property_readonly("opacity", &gs::Gaussian::opacity)
      .def_property_readonly("scale", &gs::Gaussian::scale);

  py::class_<gs::GaussianCloud>(m, "GaussianCloud")
      .def(py::init<>())
      .def_readwrite("gaussians", &gs::GaussianCloud::gaussians)
      .def_readwrite("sh_degree", &gs::GaussianCloud::sh_degree)
      .def("__len__", &gs::GaussianCloud::size)
      .def("__eq__", [](const gs::GaussianCloud& a, const gs::GaussianCloud& b) { return a == b; });

  m.def("load_cloud", [](const fs::path& p) { return gs::load_cloud(p); }, py::arg("path"));
  m.def("save_cloud", py::overload_cast<const gs::GaussianCloud&, const fs::path&>(&gs::save_cloud),
        py::arg("cloud"), py::arg("path"));

  py::class_<geom::PinholeCamera>(m, "Camera")
      .def(py::init([](double fx, double fy, double cx, double cy, int width, int height,
                       const geom::Mat3& rotation, const geom::Vec3& translation) {
             geom::PinholeCamera c;
             c.fx = fx;
             c.fy = fy;
             c.cx = cx;
             c.cy = cy;
             c.width = width;
             c.height = height;
             c.pose.rotation = rotation;
             c.pose.translation = translation;
             return c;
           }),
           py::arg("fx"), py::arg("fy"), py::arg("cx"), py::arg("cy"), py::arg("width"), py::arg("height"),
           py::arg("rotation") = geom::Mat3::Identity(), py::arg("translation") = geom::Vec3::Zero())
      .def_readwrite("fx", &geom::PinholeCamera::fx)
      .def_readwrite("fy", &geom::PinholeCamera::fy)
      .def_readwrite("cx", &geom::PinholeCamera::cx)
      .def_readwrite("cy", &geom::PinholeCamera::cy)
      .def_readwrite("width", &geom::PinholeCamera::width)
      .def_readwrite("height", &geom::PinholeCamera::height)
      .def_property_readonly("center", &geom::PinholeCamera::center);

  m.def(
      "render",
      [](const gs::GaussianCloud& cloud, const geom::PinholeCamera& cam, const geom::Vec3& background, int threads) {
        raster::RenderOutput out;
        {
          py::gil_scoped_release release;
          out = raster::render(cloud, cam, background, {.threads = threads});
        }
        Array alpha({out.height(), out.width()});
        std::copy(out.alpha.begin(), out.alpha.end(), alpha.mutable_data());
        return py::make_tuple(array_from_image(out.color), alpha);
      },
      py::arg("cloud"), py::arg("camera"), py::arg("background") = geom::Vec3::Zero(), py::arg("threads") = 1,
      "Returns (HxWx3 colour, HxW alpha).");

  m.def("mse", [](const Array& a, const Array& b) { return metrics::mse(image_from_array(a), image_from_array(b)); });
  m.def("psnr", [](const Array& a, const Array& b, double max_value) {
    return metrics::psnr(image_from_array(a), image_from_array(b), max_value);
  }, py::arg("original"), py::arg("reconstructed"), py::arg("max_value") = 1.0);
  m.def("psnr_from_mse", &metrics::psnr_from_mse, py::arg("mse"), py::arg("max_value"));
  m.def("iou", [](const Array& pred, const Array& truth, double threshold) {
    return metrics::iou(image_from_array(pred), image_from_array(truth), threshold);
  }, py::arg("pred"), py::arg("truth"), py::arg("threshold") = 0.5);

  py::class_<mesh::TriangleMesh>(m, "TriangleMesh")
      .def(py::init<>())
      .def_readwrite("positions", &mesh::TriangleMesh::positions)
      .def_readwrite("colors", &mesh::TriangleMesh::colors)
      .def_readwrite("faces", &mesh::TriangleMesh::faces)
      .def("vertex_count", &mesh::TriangleMesh::vertex_count)
      .def("face_count", &mesh::TriangleMesh::face_count);

  m.def("read_mesh", &mesh::read_mesh, py::arg("path"));
  m.def("write_mesh", [](const mesh::TriangleMesh& mesh, const fs::path& path) {
    mesh::write_mesh(mesh, path, mesh::format_for_path(path));
  }, py::arg("mesh"), py::arg("path"));
  m.def("clean_mesh", &mesh::clean, py::arg("mesh"), py::arg("tau") = mesh::kBlackThreshold);
  m.def("validate_clean", [](const mesh::TriangleMesh& mesh, double tau) {
    const auto r = mesh::validate_clean(mesh, tau);
    py::dict d;
    d["ok"] = r.ok();
    d["dark_vertices"] = r.dark_vertices;
    d["components"] = r.components;
    d["dangling_faces"] = r.dangling_faces;
    d["unreferenced_vertices"] = r.unreferenced_vertices;
    return d;
  }, py::arg("mesh"), py::arg("tau") = mesh::kBlackThreshold);
  m.def("euler_characteristic", &mesh::euler_characteristic);

  m.def("config_keys", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& k : pipeline::config_keys()) out.emplace_back(k.name, k.help);
    return out;
  });
  m.def("config_json", [](const py::dict& overrides) { return pipeline::config_json(make_config(overrides)); },
        py::arg("overrides") = py::dict());

  // Pipeline commands. `overrides` maps dotted config keys to values.
  m.def("synth", [](const fs::path& out_dir, const py::dict& overrides) {
    pipeline::cmd_synth(out_dir, make_config(overrides).synth);
  }, py::arg("out_dir"), py::arg("overrides") = py::dict());
  m.def("import_sfm", [](const fs::path& sfm_dir, const fs::path& out_manifest) {
    const auto s = pipeline::cmd_import(sfm_dir, out_manifest);
    py::dict d;
    d["cameras"] = s.n_cameras;
    d["images"] = s.n_images;
    d["points"] = s.n_points;
    return d;
  }, py::arg("sfm_dir"), py::arg("out_manifest"));
  m.def("prep", [](const fs::path& manifest, const fs::path& images, const fs::path& masks, const fs::path& sfm,
                   const fs::path& out_dir, const py::dict& overrides) {
    return pipeline::cmd_prep(manifest, images, masks, sfm, out_dir, make_config(overrides)).entries.size();
  }, py::arg("manifest"), py::arg("images_dir"), py::arg("masks_dir"), py::arg("sfm_dir"), py::arg("out_dir"),
        py::arg("overrides") = py::dict());
  m.def("train", [](const fs::path& data, const fs::path& out_dir, const py::dict& overrides) {
    const auto cfg = make_config(overrides);
    train::TrainResult r;
    {
      py::gil_scoped_release release;
      r = pipeline::cmd_train(data, out_dir, cfg);
    }
    py::list trace;
    for (const auto& s : r.trace.samples) {
      trace.append(py::make_tuple(s.iteration, s.loss, s.psnr ? py::cast(*s.psnr) : py::none()));
    }
    py::dict d;
    d["best_iteration"] = r.best.iteration;
    d["best_psnr"] = r.best.eval_psnr ? py::cast(*r.best.eval_psnr) : py::none();
    d["trace"] = trace;
    return d;
  }, py::arg("data_dir"), py::arg("out_dir"), py::arg("overrides") = py::dict());
  m.def("evaluate", [](const fs::path& checkpoint, const fs::path& data, const fs::path& out_dir,
                       const py::dict& overrides) {
    return report_dict(pipeline::cmd_eval(checkpoint, data, out_dir, make_config(overrides)));
  }, py::arg("checkpoint"), py::arg("data_dir"), py::arg("out_dir"), py::arg("overrides") = py::dict());
  m.def("extract", [](const fs::path& checkpoint, const fs::path& out_mesh, const py::dict& overrides) {
    return pipeline::cmd_extract(checkpoint, out_mesh, make_config(overrides));
  }, py::arg("checkpoint"), py::arg("out_mesh"), py::arg("overrides") = py::dict());
  m.def("clean", &pipeline::cmd_clean, py::arg("mesh_in"), py::arg("mesh_out"),
        py::arg("tau") = mesh::kBlackThreshold);
}
