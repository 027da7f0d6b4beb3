#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <sstream>

#include "dermaprep/archcheck.hpp"
#include "dermaprep/dedup.hpp"
#include "dermaprep/image.hpp"
#include "dermaprep/imaging.hpp"
#include "dermaprep/maskops.hpp"
#include "dermaprep/metrics.hpp"
#include "dermaprep/purify.hpp"

namespace py = pybind11;
using namespace dermaprep;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using ByteArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

// (H, W) or (H, W, C) float array -> interleaved image.
Image to_image(const FloatArray& a) {
  if (a.ndim() != 2 && a.ndim() != 3) throw py::value_error("expected an (H, W) or (H, W, C) array");
  const int h = static_cast<int>(a.shape(0));
  const int w = static_cast<int>(a.shape(1));
  const int c = a.ndim() == 3 ? static_cast<int>(a.shape(2)) : 1;
  return Image(w, h, c, std::vector<float>(a.data(), a.data() + a.size()));
}

FloatArray from_image(const Image& img) {
  std::vector<py::ssize_t> shape{img.height(), img.width()};
  if (img.channels() != 1) shape.push_back(img.channels());
  FloatArray out(shape);
  std::memcpy(out.mutable_data(), img.data().data(), img.data().size() * sizeof(float));
  return out;
}

// Any non-zero entry is foreground.
BinaryMask to_mask(const ByteArray& a) {
  if (a.ndim() != 2) throw py::value_error("expected an (H, W) mask");
  BinaryMask m(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  const std::uint8_t* src = a.data();
  for (std::size_t i = 0; i < m.size(); ++i) m.bits()[i] = src[i] ? 1 : 0;
  return m;
}

py::array_t<bool> from_mask(const BinaryMask& m) {
  py::array_t<bool> out({m.height(), m.width()});
  bool* dst = out.mutable_data();
  for (std::size_t i = 0; i < m.size(); ++i) dst[i] = m.bits()[i] != 0;
  return out;
}

PurifyConfig purify_config(int width, std::optional<double> threshold) {
  PurifyConfig cfg = PurifyConfig{}.scaled_to(width);
  cfg.luminance_threshold = threshold;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dermoscopy dataset preparation: masks, occlusion removal, shape checks, metrics";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", base.ptr());
  auto config = py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", config.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<arch::ShapeError>(m, "ShapeError", base.ptr());

  // imaging
  m.def("stack_seven", [](const FloatArray& rgb) { return from_image(stack_seven(to_image(rgb))); },
        py::arg("rgb"), "(H, W, 3) RGB in [0,1] -> (380, 380, 7) stack in [-1,1].");
  m.def("rgb_to_hsv", [](const FloatArray& rgb) { return from_image(rgb_to_hsv(to_image(rgb))); },
        py::arg("rgb"));
  m.def("luminance", [](const FloatArray& rgb) { return from_image(luminance_luv(to_image(rgb))); },
        py::arg("rgb"), "CIELUV L* scaled to [0,1].");

  // masks
  m.def("fill_holes", [](const ByteArray& a) { return from_mask(fill_holes(to_mask(a))); }, py::arg("mask"));
  m.def("close_disk",
        [](const ByteArray& a, int radius) {
          return from_mask(close(to_mask(a), StructuringElement::disk(radius)));
        },
        py::arg("mask"), py::arg("radius"));
  m.def("jaccard", [](const ByteArray& a, const ByteArray& b) { return jaccard(to_mask(a), to_mask(b)); },
        py::arg("a"), py::arg("b"));

  // purification
  m.def("detect_occlusions",
        [](const FloatArray& rgb, std::optional<double> threshold) {
          const Image img = to_image(rgb);
          return from_mask(detect_occlusions(img, purify_config(img.width(), threshold)));
        },
        py::arg("rgb"), py::arg("threshold") = py::none(),
        "Hair/ruler mask; the default configuration is scaled to the image width.");
  m.def("purify",
        [](const FloatArray& rgb, const ByteArray& lesion, std::optional<double> threshold) {
          const Image img = to_image(rgb);
          PurifyResult r;
          {
            py::gil_scoped_release release;
            r = purify(img, to_mask(lesion), purify_config(img.width(), threshold));
          }
          return py::make_tuple(from_image(r.image), from_mask(r.occlusions));
        },
        py::arg("rgb"), py::arg("lesion"), py::arg("threshold") = py::none(),
        "Returns (restored image, occlusion mask).");

  // architecture checks
  m.def("infer_conv", &arch::infer_conv, py::arg("size"), py::arg("kernel"), py::arg("stride") = 1,
        py::arg("padding") = 0, py::arg("dilation") = 1);
  m.def("infer_transconv", &arch::infer_transconv, py::arg("size"), py::arg("kernel"), py::arg("stride") = 1,
        py::arg("padding") = 0, py::arg("dilation") = 1);
  m.def("verify_arch",
        [](const std::string& path, bool bias) {
          const arch::VerifyResult r = arch::verify(arch::load_arch(path), {.bias = bias});
          std::ostringstream report;
          arch::print_report(report, r);
          py::dict d;
          d["ok"] = r.ok();
          d["mismatched_rows"] = r.mismatched_rows;
          d["coupling_violations"] = r.coupling ? r.coupling->violations.size() : 0;
          py::list nets;
          for (const auto& t : r.traces) {
            py::dict n;
            n["name"] = t.network;
            n["params"] = t.total_params();
            py::list rows;
            for (const auto& row : t.rows)
              rows.append(py::make_tuple(row.inferred.channels, row.inferred.height, row.inferred.width, row.match));
            n["rows"] = rows;
            nets.append(n);
          }
          d["networks"] = nets;
          d["report"] = report.str();
          return d;
        },
        py::arg("path"), py::arg("bias") = true);

  // metrics
  m.def("roc_auc",
        [](const std::vector<double>& scores, const std::vector<int>& positive) {
          if (scores.size() != positive.size()) throw py::value_error("scores and labels differ in length");
          std::vector<metrics::ScoredPrediction> items(scores.size());
          for (std::size_t i = 0; i < scores.size(); ++i) {
            items[i].scores = {scores[i]};
            items[i].true_label = positive[i] ? 0 : 1;
          }
          return metrics::auc(metrics::roc(items, 0));
        },
        py::arg("scores"), py::arg("positive"), "Binary ROC AUC; `positive` holds 0/1 labels.");
  m.def("evaluate",
        [](const std::filesystem::path& predictions, const std::vector<std::string>& mean_classes) {
          const metrics::EvalReport r = metrics::evaluate(metrics::read_predictions(predictions), mean_classes);
          py::dict auc;
          for (const auto& c : r.per_class) auc[py::str(c.label)] = c.auc;
          std::ostringstream text;
          metrics::print_report(text, r);
          py::dict d;
          d["auc"] = auc;
          d["mean_auc"] = r.mean_auc;
          d["accuracy"] = r.accuracy;
          d["confusion"] = r.confusion.counts;
          d["report"] = text.str();
          return d;
        },
        py::arg("predictions"),
        py::arg("mean_classes") = std::vector<std::string>{"melanoma", "seborrheic_keratosis"});

  // dedup
  m.def("mse", [](const FloatArray& a, const FloatArray& b) { return mse(to_image(a), to_image(b)); },
        py::arg("a"), py::arg("b"));
}
